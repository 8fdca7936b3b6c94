//! Dimension reduction for slices: rewrite the slice through `ker A_I` as
//! a full-dimensional instance in `d = n - |I|` variables with the same
//! normalized width, via a unimodular change of coordinates computed from
//! the Hermite form of `A_I`.

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::exactmath::{hermite_unimodular, unimodular_inverse, vecops, IndexSet};
use crate::polyhedron::HPolyhedron;
use crate::proximity::{delta_i, kappa_i, NormalizedInstance};
use crate::{IMatrix, IVec, Int, QVec, Rat, Result};

/// The reduced instance together with the coordinate change that produced
/// it. The map `x -> (U^{-1} x) restricted to the last d coordinates` is a
/// linear isomorphism from `ker A_I` onto `R^d` carrying lattice points to
/// lattice points and the slice onto the reduced polyhedron.
#[derive(Clone, Debug)]
pub struct LiftResult {
    pub a_hat: IMatrix,
    pub b_hat: IVec,
    pub alpha_hat: IVec,
    pub u: IMatrix,
    pub u_inv: IMatrix,
    /// Rows of the original system that survive (the complement of `I`).
    pub kept_rows: IndexSet,
    pub i_set: IndexSet,
    pub d: usize,
}

impl LiftResult {
    /// Coordinates of a slice point in the reduced space.
    pub fn project(&self, x: &[Rat]) -> QVec {
        let n = self.u.cols();
        let y = self.u_inv.to_rat().mul_vec(x);
        y[n - self.d..].to_vec()
    }

    /// Slice point realizing given reduced coordinates.
    pub fn embed(&self, z: &[Rat]) -> QVec {
        let n = self.u.cols();
        let mut full = vecops::zeros::<Rat>(n);
        full[n - self.d..].clone_from_slice(z);
        self.u.to_rat().mul_vec(&full)
    }

    pub fn reduced_polyhedron(&self) -> Result<HPolyhedron> {
        HPolyhedron::new(self.a_hat.clone(), vecops::to_rat(&self.b_hat))
    }

    /// Width of the reduced instance in direction `alpha_hat`, normalized
    /// by its directional minor bound.
    pub fn reduced_kappa(&self) -> Result<Rat> {
        let delta = delta_i(&self.a_hat, &self.alpha_hat, &IndexSet::empty())?;
        if delta.is_zero() {
            return Err(Error::DegenerateObjective);
        }
        let (value, _) = self.reduced_polyhedron()?.lp_max(&vecops::to_rat(&self.alpha_hat))?;
        Ok(value / delta)
    }

    pub fn reduced_delta(&self) -> Result<Rat> {
        delta_i(&self.a_hat, &self.alpha_hat, &IndexSet::empty())
    }
}

/// Reduce the slice through `ker A_I` to a full-dimensional instance.
///
/// Requires the rows of `A_I` to be independent and the slice to span the
/// whole kernel (checked through the slice dimension).
pub fn lift(norm: &NormalizedInstance, alpha: &[Int], i_set: &IndexSet) -> Result<LiftResult> {
    let a = norm.instance().a();
    let b = norm.instance().b();
    let n = a.cols();
    assert_eq!(alpha.len(), n, "objective length");
    if i_set.len() >= n {
        return Err(Error::OutOfRange(format!("index set of size {} in dimension {n}", i_set.len())));
    }
    let a_i = a.select_rows_set(i_set);
    if !i_set.is_empty() && a_i.rank() < i_set.len() {
        return Err(Error::RankDeficient);
    }
    let d = n - i_set.len();
    let slice_dim = match norm.slice_poly(i_set)?.dimension() {
        Ok(dim) => dim,
        Err(Error::EmptyPolyhedron) => {
            return Err(Error::HypothesisFailed("slice is empty".into()))
        }
        Err(e) => return Err(e),
    };
    if slice_dim != d {
        return Err(Error::HypothesisFailed(format!(
            "slice spans dimension {slice_dim}, kernel has dimension {d}"
        )));
    }

    let u = if i_set.is_empty() {
        IMatrix::identity(n)
    } else {
        let (u, _h) = hermite_unimodular(&a_i)?;
        u
    };
    let au = a.matmul(&u);
    // the I rows must vanish on the last d columns
    for (block_row, orig) in i_set.iter().enumerate() {
        for c in n - d..n {
            if !au.get(orig, c).is_zero() {
                return Err(Error::Internal(format!(
                    "Hermite block shape violated at row {block_row}"
                )));
            }
        }
    }
    let kept_rows = i_set.complement(a.rows());
    let kept: Vec<usize> = kept_rows.iter().collect();
    let cols: Vec<usize> = (n - d..n).collect();
    let a_hat = au.submatrix(&kept, &cols);
    let b_hat: IVec = kept.iter().map(|&r| b[r].clone()).collect();
    let alpha_row = IMatrix::from_row(alpha.to_vec()).matmul(&u);
    let alpha_hat: IVec = cols.iter().map(|&c| alpha_row.get(0, c).clone()).collect();
    let u_inv = unimodular_inverse(&u)?;

    Ok(LiftResult { a_hat, b_hat, alpha_hat, u, u_inv, kept_rows, i_set: i_set.clone(), d })
}

/// Re-verify the transported identities of a finished reduction: the
/// objective agrees on the slice, the directional minor bounds agree, and
/// the normalized widths agree; additionally the reduced instance has the
/// origin as its only lattice point. Fails naming the identity.
pub fn verify_lift(norm: &NormalizedInstance, alpha: &[Int], lifted: &LiftResult) -> Result<()> {
    let a = norm.instance().a();
    if lifted.u.det()?.abs() != Int::one() {
        return Err(Error::LiftDefect("change of coordinates is not unimodular"));
    }
    let au = a.matmul(&lifted.u);
    let n = a.cols();
    for r in lifted.i_set.iter() {
        for c in n - lifted.d..n {
            if !au.get(r, c).is_zero() {
                return Err(Error::LiftDefect("block shape"));
            }
        }
    }

    // objective transport on every slice vertex, plus the round-trip
    let slice = norm.slice_poly(&lifted.i_set)?;
    let alpha_rat = vecops::to_rat(alpha);
    let alpha_hat_rat = vecops::to_rat(&lifted.alpha_hat);
    for x in slice.vertex_points()? {
        let z = lifted.project(&x);
        if vecops::dot(&alpha_rat, &x) != vecops::dot(&alpha_hat_rat, &z) {
            return Err(Error::LiftDefect("objective transport"));
        }
        if lifted.embed(&z) != x {
            return Err(Error::LiftDefect("coordinate round-trip"));
        }
    }

    let delta_slice = delta_i(a, alpha, &lifted.i_set)?;
    if lifted.reduced_delta()? != delta_slice {
        return Err(Error::LiftDefect("directional minor bound"));
    }

    match (kappa_i(norm, alpha, &lifted.i_set), lifted.reduced_kappa()) {
        (Ok(lhs), Ok(rhs)) if lhs == rhs => {}
        (Err(Error::DegenerateObjective), Err(Error::DegenerateObjective)) => {}
        _ => return Err(Error::LiftDefect("normalized width")),
    }

    let reduced = lifted.reduced_polyhedron()?;
    let lattice = reduced.lattice_points_auto()?;
    if lattice != vec![vecops::zeros::<Int>(lifted.d)] {
        return Err(Error::LiftDefect("reduced lattice is not the origin alone"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::vecops::{from_i64, rat_from_i64};
    use crate::polyhedron::Caps;
    use crate::proximity::Instance;

    fn small_box_norm() -> NormalizedInstance {
        let inst = Instance::new(
            IMatrix::from_i64_rows(&[&[2, 0], &[-2, 0], &[0, 2], &[0, -2]]),
            from_i64(&[1, 1, 1, 1]),
            rat_from_i64(&[1, 1]),
        )
        .unwrap();
        NormalizedInstance::verify(inst, Caps::default()).unwrap()
    }

    #[test]
    fn empty_index_set_reduces_to_the_instance_itself() {
        let norm = small_box_norm();
        let alpha = from_i64(&[1, 0]);
        let lifted = lift(&norm, &alpha, &IndexSet::empty()).unwrap();
        assert_eq!(lifted.d, 2);
        assert_eq!(&lifted.a_hat, norm.instance().a());
        assert_eq!(&lifted.b_hat, norm.instance().b());
        assert_eq!(lifted.alpha_hat, alpha);
        verify_lift(&norm, &alpha, &lifted).unwrap();
    }

    #[test]
    fn axis_slice_reduces_to_an_interval() {
        let norm = small_box_norm();
        let alpha = from_i64(&[1, 0]);
        let i = IndexSet::singleton(2); // ker of (0, 2) is the x-axis
        let lifted = lift(&norm, &alpha, &i).unwrap();
        assert_eq!(lifted.d, 1);
        verify_lift(&norm, &alpha, &lifted).unwrap();
        // the interval sits strictly inside (-1, 1)
        let reduced = lifted.reduced_polyhedron().unwrap();
        let (hi, _) = reduced.lp_max(&rat_from_i64(&[1])).unwrap();
        let (neg_lo, _) = reduced.lp_max(&rat_from_i64(&[-1])).unwrap();
        assert!(hi < Rat::one() && neg_lo < Rat::one());
        assert_eq!(lifted.reduced_kappa().unwrap(), Rat::new(Int::from(1), Int::from(2)));
    }

    #[test]
    fn lift_rejects_dependent_rows() {
        let inst = Instance::new(
            IMatrix::from_i64_rows(&[
                &[2, 0, 0],
                &[-2, 0, 0],
                &[1, 0, 0],
                &[0, 2, 0],
                &[0, -2, 0],
                &[0, 0, 2],
                &[0, 0, -2],
            ]),
            from_i64(&[1, 1, 1, 1, 1, 1, 1]),
            rat_from_i64(&[1, 1, 1]),
        )
        .unwrap();
        let norm = NormalizedInstance::verify(inst, Caps::default()).unwrap();
        let dep = IndexSet::from_sorted(vec![0, 2]); // (2,0,0) and (1,0,0)
        assert!(matches!(
            lift(&norm, &from_i64(&[0, 0, 1]), &dep),
            Err(Error::RankDeficient)
        ));
    }

    #[test]
    fn coordinate_map_is_a_lattice_isomorphism_on_samples() {
        let norm = small_box_norm();
        let lifted = lift(&norm, &from_i64(&[1, 0]), &IndexSet::singleton(2)).unwrap();
        // integer points of the kernel within a small window map to
        // integer reduced coordinates and back
        let a_i = norm.instance().a().select_rows_set(&IndexSet::singleton(2)).to_rat();
        for x0 in -2i64..=2 {
            for x1 in -2i64..=2 {
                let w = rat_from_i64(&[x0, x1]);
                if !vecops::is_zero(&a_i.mul_vec(&w)) {
                    continue;
                }
                let z = lifted.project(&w);
                assert!(vecops::is_integral(&z), "kernel lattice point maps off-lattice");
                assert_eq!(lifted.embed(&z), w);
            }
        }
        // reduced integer points embed into integral kernel points
        for z0 in -2i64..=2 {
            let z = rat_from_i64(&[z0]);
            let w = lifted.embed(&z);
            assert!(vecops::is_integral(&w));
            assert!(vecops::is_zero(&a_i.mul_vec(&w)));
            assert_eq!(lifted.project(&w), z);
        }
    }

    #[test]
    fn corrupted_change_of_coordinates_is_rejected() {
        let norm = small_box_norm();
        let alpha = from_i64(&[1, 0]);
        let mut lifted = lift(&norm, &alpha, &IndexSet::singleton(2)).unwrap();
        lifted.u = IMatrix::from_i64_rows(&[&[2, 0], &[0, 1]]);
        assert!(matches!(
            verify_lift(&norm, &alpha, &lifted),
            Err(Error::LiftDefect("change of coordinates is not unimodular"))
        ));
    }

    #[test]
    fn three_dimensional_slice_width_matches_directly_computed_width() {
        // shrunken box with two asymmetric cuts, only lattice point 0
        let inst = Instance::new(
            IMatrix::from_i64_rows(&[
                &[2, 0, 0],
                &[-2, 0, 0],
                &[0, 2, 0],
                &[0, -2, 0],
                &[0, 0, 2],
                &[0, 0, -2],
                &[1, 1, 1],
                &[-1, 2, -1],
            ]),
            from_i64(&[1, 1, 1, 1, 1, 1, 1, 1]),
            rat_from_i64(&[1, 1, 1]),
        )
        .unwrap();
        let norm = NormalizedInstance::verify(inst, Caps::default()).unwrap();
        for row in 0..norm.instance().num_rows() {
            let i = IndexSet::singleton(row);
            for alpha in [[1i64, 0, 0], [0, 1, 0], [0, 0, 1], [1, -1, 2]] {
                let alpha = from_i64(&alpha);
                let Ok(lifted) = lift(&norm, &alpha, &i) else { continue };
                verify_lift(&norm, &alpha, &lifted).unwrap();
                match (kappa_i(&norm, &alpha, &i), lifted.reduced_kappa()) {
                    (Ok(lhs), Ok(rhs)) => assert_eq!(lhs, rhs),
                    (Err(Error::DegenerateObjective), Err(Error::DegenerateObjective)) => {}
                    (l, r) => panic!("width mismatch: {l:?} vs {r:?}"),
                }
            }
        }
    }
}
