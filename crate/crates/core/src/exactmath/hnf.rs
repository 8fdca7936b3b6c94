//! Column-style Hermite form via unimodular column operations.

use num_traits::Signed;

use crate::error::Error;
use crate::Result;

use super::matrix::{IntScalar, Matrix};

/// Bring a full-row-rank integral matrix `M` (r x n, r <= n) to the block
/// shape `M * U = [L | 0]` with `L` lower triangular, positive diagonal,
/// entries left of each pivot reduced modulo it, and `U` unimodular.
///
/// Returns `(U, H)` with `H = M * U`.
pub fn hermite_unimodular<T: IntScalar>(m: &Matrix<T>) -> Result<(Matrix<T>, Matrix<T>)> {
    let (r, n) = (m.rows(), m.cols());
    if r > n {
        return Err(Error::RankDeficient);
    }
    // column-major working copies so column ops are cheap
    let mut h: Vec<Vec<T>> = (0..n).map(|c| m.col_vec(c)).collect();
    let mut u: Vec<Vec<T>> = (0..n)
        .map(|c| {
            let mut col = vec![T::zero(); n];
            col[c] = T::one();
            col
        })
        .collect();

    for i in 0..r {
        // gcd out everything to the right of the pivot column
        for j in i + 1..n {
            while !h[j][i].is_zero() {
                let q = h[i][i].div_floor(&h[j][i]);
                if !q.is_zero() {
                    for t in 0..r {
                        let v = h[i][t].clone() - q.clone() * h[j][t].clone();
                        h[i][t] = v;
                    }
                    for t in 0..n {
                        let v = u[i][t].clone() - q.clone() * u[j][t].clone();
                        u[i][t] = v;
                    }
                }
                h.swap(i, j);
                u.swap(i, j);
            }
        }
        if h[i][i].is_zero() {
            return Err(Error::RankDeficient);
        }
        if h[i][i].is_negative() {
            for t in 0..r {
                h[i][t] = -h[i][t].clone();
            }
            for t in 0..n {
                u[i][t] = -u[i][t].clone();
            }
        }
        // reduce the entries left of the pivot into [0, pivot)
        for j in 0..i {
            let q = h[j][i].div_floor(&h[i][i]);
            if q.is_zero() {
                continue;
            }
            for t in 0..r {
                let v = h[j][t].clone() - q.clone() * h[i][t].clone();
                h[j][t] = v;
            }
            for t in 0..n {
                let v = u[j][t].clone() - q.clone() * u[i][t].clone();
                u[j][t] = v;
            }
        }
    }

    let col_major_to_matrix = |cols: &[Vec<T>], rows: usize| {
        let mut out = Matrix::zeros(rows, cols.len());
        for (c, col) in cols.iter().enumerate() {
            for (rr, v) in col.iter().enumerate() {
                out.set(rr, c, v.clone());
            }
        }
        out
    };
    let h_m = col_major_to_matrix(&h, r);
    let u_m = col_major_to_matrix(&u, n);
    debug_assert_eq!(u_m.det().map(|d| d.abs()), Ok(T::one()));
    Ok((u_m, h_m))
}

/// Exact inverse of a unimodular integer matrix, again integral.
pub fn unimodular_inverse(u: &Matrix<crate::Int>) -> Result<Matrix<crate::Int>> {
    if u.det()?.abs() != crate::Int::from(1) {
        return Err(Error::HypothesisFailed("matrix is not unimodular".into()));
    }
    let inv = u
        .to_rat()
        .inverse()?
        .ok_or_else(|| Error::Internal("unimodular matrix must be invertible".into()))?;
    inv.to_int()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Int;
    use num_traits::Zero;

    fn im(rows: &[&[i64]]) -> Matrix<Int> {
        Matrix::from_i64_rows(rows)
    }

    fn check_hermite_shape(m: &Matrix<Int>) {
        let (u, h) = hermite_unimodular(m).unwrap();
        assert_eq!(u.det().unwrap().abs(), Int::from(1));
        assert_eq!(m.matmul(&u), h);
        let r = m.rows();
        for i in 0..r {
            assert!(h.get(i, i) > &Int::from(0), "pivot must be positive");
            for j in i + 1..m.cols() {
                assert!(h.get(i, j).is_zero(), "zero block right of the pivots");
            }
        }
    }

    #[test]
    fn identity_stays_identity() {
        let (u, h) = hermite_unimodular(&Matrix::<Int>::identity(3)).unwrap();
        assert_eq!(u, Matrix::identity(3));
        assert_eq!(h, Matrix::identity(3));
    }

    #[test]
    fn row_gcd_case() {
        // extended gcd of (2, 1) leaves [1, 0]
        let m = im(&[&[2, 1]]);
        let (u, h) = hermite_unimodular(&m).unwrap();
        assert_eq!(h, im(&[&[1, 0]]));
        assert_eq!(m.matmul(&u), h);
        assert_eq!(u.det().unwrap().abs(), Int::from(1));
    }

    #[test]
    fn rank_deficient_rejected() {
        assert!(hermite_unimodular(&im(&[&[1, 2], &[2, 4]])).is_err());
        assert!(hermite_unimodular(&im(&[&[0, 0]])).is_err());
    }

    #[test]
    fn block_shape_on_rectangular_input() {
        check_hermite_shape(&im(&[&[2, 4, 4], &[-6, 6, 12]]));
        check_hermite_shape(&im(&[&[3, 5], &[1, 2]]));
    }

    #[test]
    fn unimodular_inverse_is_integral() {
        let u = im(&[&[1, 3], &[0, -1]]);
        let inv = unimodular_inverse(&u).unwrap();
        assert_eq!(u.matmul(&inv), Matrix::identity(2));
        assert!(unimodular_inverse(&im(&[&[2, 0], &[0, 1]])).is_err());
    }

    proptest::proptest! {
        #[test]
        fn defining_properties_hold(data in proptest::collection::vec(-5i64..=5, 8)) {
            let m = Matrix::new(2, 4, data.iter().map(|&x| Int::from(x)).collect());
            proptest::prop_assume!(m.rank() == 2);
            check_hermite_shape(&m);
        }
    }
}
