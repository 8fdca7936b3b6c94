//! Small helpers on plain `Vec` vectors.

use std::cmp::Ordering;

use num_integer::Integer;

use super::matrix::Scalar;
use crate::{Int, QVec, Rat};

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len(), "dot length mismatch");
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn neg<T: Scalar>(a: &[T]) -> Vec<T> {
    a.iter().map(|x| -x.clone()).collect()
}

pub fn scale<T: Scalar>(a: &[T], s: &T) -> Vec<T> {
    a.iter().map(|x| x.clone() * s.clone()).collect()
}

pub fn is_zero<T: Scalar>(a: &[T]) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn linf_norm<T: Scalar>(a: &[T]) -> T {
    a.iter().map(|x| x.abs()).max().unwrap_or_else(T::zero)
}

pub fn norm_sq<T: Scalar>(a: &[T]) -> T {
    dot(a, a)
}

pub fn lex_cmp<T: Ord>(a: &[T], b: &[T]) -> Ordering {
    a.cmp(b)
}

pub fn zeros<T: Scalar>(n: usize) -> Vec<T> {
    vec![T::zero(); n]
}

pub fn unit<T: Scalar>(n: usize, i: usize) -> Vec<T> {
    let mut v = vec![T::zero(); n];
    v[i] = T::one();
    v
}

pub fn to_rat(a: &[Int]) -> QVec {
    a.iter().map(|x| Rat::from_integer(x.clone())).collect()
}

pub fn from_i64(a: &[i64]) -> Vec<Int> {
    a.iter().map(|&x| Int::from(x)).collect()
}

pub fn rat_from_i64(a: &[i64]) -> QVec {
    a.iter().map(|&x| Rat::from_integer(Int::from(x))).collect()
}

pub fn is_integral(a: &[Rat]) -> bool {
    a.iter().all(|x| x.is_integer())
}

pub fn to_int(a: &[Rat]) -> Option<Vec<Int>> {
    is_integral(a).then(|| a.iter().map(|x| x.to_integer()).collect())
}

/// gcd of absolute values; zero for the all-zero vector.
pub fn gcd_all(a: &[Int]) -> Int {
    a.iter().fold(Int::from(0), |acc, x| acc.gcd(x))
}

/// Scale a rational direction to the primitive integer vector on the same
/// ray (positive multiple), or `None` for the zero vector.
pub fn primitive_integer_direction(a: &[Rat]) -> Option<Vec<Int>> {
    if is_zero(a) {
        return None;
    }
    let lcm_den = a
        .iter()
        .fold(Int::from(1), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<Int> = a
        .iter()
        .map(|x| (x.clone() * Rat::from_integer(lcm_den.clone())).to_integer())
        .collect();
    let g = gcd_all(&scaled);
    Some(scaled.into_iter().map(|x| x / g.clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitive_direction_reduces() {
        let v = vec![
            Rat::new(Int::from(2), Int::from(3)),
            Rat::new(Int::from(-4), Int::from(3)),
        ];
        assert_eq!(primitive_integer_direction(&v).unwrap(), from_i64(&[1, -2]));
        assert!(primitive_integer_direction(&rat_from_i64(&[0, 0])).is_none());
    }

    #[test]
    fn linf_and_gcd() {
        assert_eq!(linf_norm(&from_i64(&[-5, 3])), Int::from(5));
        assert_eq!(gcd_all(&from_i64(&[6, -9, 0])), Int::from(3));
    }
}
