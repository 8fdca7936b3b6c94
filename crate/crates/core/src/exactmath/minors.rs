//! Exhaustive minor enumeration: largest absolute minors, minor gcds, and
//! total-unimodularity testing. Desk scale by design; every caller keeps
//! row counts small enough that full enumeration is cheap.

use itertools::Itertools;

use crate::error::Error;
use crate::Result;

use super::matrix::{IntScalar, Matrix, Scalar};

/// Largest absolute value of a k x k minor.
pub fn max_abs_minor<T: Scalar>(m: &Matrix<T>, k: usize) -> Result<T> {
    if k == 0 || k > m.rows().min(m.cols()) {
        return Err(Error::OutOfRange(format!(
            "minor order {k} for a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let mut best = T::zero();
    for rows in (0..m.rows()).combinations(k) {
        for cols in (0..m.cols()).combinations(k) {
            let d = m.submatrix(&rows, &cols).det()?.abs();
            if d > best {
                best = d;
            }
        }
    }
    Ok(best)
}

/// gcd of the absolute values of all r x r minors, r = rank.
pub fn gcd_minors<T: IntScalar>(m: &Matrix<T>) -> Result<T> {
    let r = m.rank();
    if r == 0 {
        return Err(Error::ZeroMatrix);
    }
    let mut g = T::zero();
    for rows in (0..m.rows()).combinations(r) {
        for cols in (0..m.cols()).combinations(r) {
            let d = m.submatrix(&rows, &cols).det()?;
            g = g.gcd(&d);
            if g == T::one() {
                return Ok(g);
            }
        }
    }
    Ok(g)
}

/// True iff every square minor of every order lies in {-1, 0, 1}.
pub fn is_totally_unimodular<T: Scalar>(m: &Matrix<T>) -> bool {
    let max_k = m.rows().min(m.cols());
    for k in 1..=max_k {
        for rows in (0..m.rows()).combinations(k) {
            for cols in (0..m.cols()).combinations(k) {
                let d = m.submatrix(&rows, &cols).det().expect("square by construction");
                if d.abs() > T::one() {
                    return false;
                }
            }
        }
    }
    true
}
