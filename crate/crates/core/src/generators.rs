//! Instance generators: the tight lower-bound family built from a
//! near-identity triangular matrix, reproducible random instances, and
//! strictly delta-modular instances with certified factorizations.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::exactmath::{is_totally_unimodular, max_abs_minor, vecops};
use crate::polyhedron::{Caps, HPolyhedron};
use crate::proximity::Instance;
use crate::{IMatrix, IVec, Int, QVec, Rat, Result};

/// The lower-bound family: a parallelepiped `0 <= Bx <= rhs` around the
/// origin with `k` extra rows cutting off every nonzero integer corner,
/// whose unique far vertex sits at max-norm distance `delta - 2` from the
/// origin when `k = n - 2`.
#[derive(Clone, Debug)]
pub struct LowerBoundInstance {
    pub delta: i64,
    pub n: usize,
    pub k: usize,
    /// Lower-triangular base matrix with unit diagonal except the last
    /// entry, which is `delta`.
    pub b_matrix: IMatrix,
    /// Last row of the base matrix without the diagonal entry.
    pub beta_row: IVec,
    /// The `k` cutting rows.
    pub cutting_rows: Vec<IVec>,
    /// Right-hand side of the upper parallelepiped bounds.
    pub rhs: IVec,
    /// The vertex of the parallelepiped sharing no facet with the origin.
    pub x_star: QVec,
    instance: Instance,
}

/// Generate the family member for the given parameters.
///
/// Requires `delta >= 3`, `n >= 2`, `0 <= k <= n-1`, and
/// `delta - n + k >= 1` so the parallelepiped is full-dimensional.
pub fn gen_lower_bound(delta: i64, n: usize, k: usize) -> Result<LowerBoundInstance> {
    if delta < 3 {
        return Err(Error::InvalidParam(format!("delta = {delta} must be at least 3")));
    }
    if n < 2 {
        return Err(Error::InvalidParam(format!("n = {n} must be at least 2")));
    }
    if k > n - 1 {
        return Err(Error::InvalidParam(format!("k = {k} exceeds n - 1 = {}", n - 1)));
    }
    if delta - (n as i64) + (k as i64) < 1 {
        return Err(Error::InvalidParam(format!(
            "delta - n + k = {} must be at least 1",
            delta - (n as i64) + (k as i64)
        )));
    }

    // beta has k zeros then delta - 1 entries
    let beta_row: IVec = (0..n - 1)
        .map(|j| if j < k { Int::zero() } else { Int::from(delta - 1) })
        .collect();
    let mut b_rows: Vec<IVec> = Vec::with_capacity(n);
    for i in 0..n - 1 {
        b_rows.push(vecops::unit::<Int>(n, i));
    }
    let mut last = beta_row.clone();
    last.push(Int::from(delta));
    b_rows.push(last);
    let b_matrix = IMatrix::from_rows(b_rows);

    // rhs = (1, ..., 1, delta - n + k, 1, ..., 1), special entry at k
    let rhs: IVec = (0..n)
        .map(|i| if i == k { Int::from(delta - (n as i64) + (k as i64)) } else { Int::one() })
        .collect();

    let cutting_rows: Vec<IVec> = (0..k)
        .map(|i| {
            let mut row = vecops::zeros::<Int>(n);
            row[i] = Int::one();
            for c in k..n {
                row[c] = Int::from(-delta);
            }
            row
        })
        .collect();

    let mut a = b_matrix.clone().vstack(&b_matrix.neg());
    for row in &cutting_rows {
        a = a.vstack(&IMatrix::from_row(row.clone()));
    }
    let mut b_vec: IVec = rhs.clone();
    b_vec.extend(vecops::zeros::<Int>(n));
    b_vec.extend(vecops::zeros::<Int>(k));

    // objective: the all-ones combination of the rows tight at the far
    // vertex, making it the unique optimum of the relaxation
    let c: QVec = (0..n)
        .map(|j| Rat::from_integer((0..n).fold(Int::zero(), |acc, i| acc + b_matrix.get(i, j))))
        .collect();

    let x_star = b_matrix
        .to_rat()
        .solve_square(&vecops::to_rat(&rhs))?
        .ok_or_else(|| Error::Internal("triangular base matrix must be invertible".into()))?;

    let instance = Instance::new(a, b_vec, c)?;
    Ok(LowerBoundInstance {
        delta,
        n,
        k,
        b_matrix,
        beta_row,
        cutting_rows,
        rhs,
        x_star,
        instance,
    })
}

impl LowerBoundInstance {
    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    /// The parallelepiped `0 <= Bx <= rhs` without the cutting rows.
    pub fn parallelepiped(&self) -> Result<HPolyhedron> {
        let a = self.b_matrix.clone().vstack(&self.b_matrix.neg());
        let mut rhs = vecops::to_rat(&self.rhs);
        rhs.extend(vecops::zeros::<Rat>(self.n));
        HPolyhedron::new(a, rhs)
    }

    /// The totally unimodular factor exhibiting `A = T B`: identity and
    /// negated identity blocks for the parallelepiped rows, and one row
    /// per cut expressing it as an integer combination of base rows.
    pub fn tu_factor(&self) -> IMatrix {
        let n = self.n;
        let mut t = IMatrix::identity(n).vstack(&IMatrix::identity(n).neg());
        for i in 0..self.k {
            let mut row = vecops::zeros::<Int>(n);
            row[i] = Int::one();
            for c in self.k..n {
                row[c] = -Int::one();
            }
            t = t.vstack(&IMatrix::from_row(row));
        }
        t
    }
}

/// Everything [`certify_lower_bound`] measured while validating the
/// claims of a generated family member.
#[derive(Clone, Debug)]
pub struct LowerBoundCertificate {
    pub tu_factor: IMatrix,
    /// Largest absolute (n-1) x (n-1) minor of the assembled system.
    pub delta_top: Int,
    pub dimension: usize,
    pub lattice_points: Vec<IVec>,
}

/// Verify the structural claims of a family member by exact computation:
/// the far vertex is feasible and shares no facet with the origin, the
/// origin is the only integer point, a totally unimodular factor with
/// `|det B| = delta` exists, the top minor equals `delta` when
/// `k = n - 2`, and the polytope is full-dimensional.
pub fn certify_lower_bound(lb: &LowerBoundInstance, caps: Caps) -> Result<LowerBoundCertificate> {
    let poly = lb.instance.polyhedron_with_caps(caps);
    let n = lb.n;

    if !poly.contains(&lb.x_star) {
        return Err(Error::CertificationFailed("far vertex is feasible".into()));
    }
    let origin = vecops::zeros::<Rat>(n);
    let dimension = poly.dimension()?;
    if dimension != n {
        return Err(Error::CertificationFailed("polytope is full-dimensional".into()));
    }
    if poly.shares_facet(&lb.x_star, &origin)? {
        return Err(Error::CertificationFailed(
            "far vertex shares no facet with the origin".into(),
        ));
    }

    let lattice_points = poly.lattice_points_auto()?;
    if lattice_points != vec![vecops::zeros::<Int>(n)] {
        return Err(Error::CertificationFailed("origin is the only integer point".into()));
    }

    let tu_factor = lb.tu_factor();
    if &tu_factor.matmul(&lb.b_matrix) != lb.instance.a() {
        return Err(Error::CertificationFailed("factorization A = T B".into()));
    }
    if !is_totally_unimodular(&tu_factor) {
        return Err(Error::CertificationFailed("factor T is totally unimodular".into()));
    }
    if lb.b_matrix.det()?.abs() != Int::from(lb.delta) {
        return Err(Error::CertificationFailed("base determinant equals delta".into()));
    }

    let delta_top = max_abs_minor(lb.instance.a(), n - 1)?;
    if lb.k + 2 == n && delta_top != Int::from(lb.delta) {
        return Err(Error::CertificationFailed(
            "top minor equals delta for the tight member".into(),
        ));
    }

    Ok(LowerBoundCertificate { tu_factor, delta_top, dimension, lattice_points })
}

/// A reproducible random instance together with its provenance.
#[derive(Clone, Debug)]
pub struct RandomInstance {
    pub instance: Instance,
    pub seed: u64,
    /// Whether a bounding row had to be appended because the sampled rows
    /// did not positively span.
    pub appended_bounding_row: bool,
}

const RESAMPLE_BUDGET: usize = 500;

/// Reproducible random integral instance: full column rank, bounded
/// (resampled or completed by one extra row), and integer-feasible by
/// construction around a small integer anchor.
pub fn gen_random(n: usize, m: usize, entry_bound: i64, seed: u64) -> Result<RandomInstance> {
    if n == 0 || m < n || entry_bound < 1 {
        return Err(Error::InvalidParam(format!(
            "need n >= 1, m >= n, entry_bound >= 1; got n = {n}, m = {m}, bound = {entry_bound}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RESAMPLE_BUDGET {
        let rows: Vec<IVec> = (0..m)
            .map(|_| (0..n).map(|_| Int::from(rng.gen_range(-entry_bound..=entry_bound))).collect())
            .collect();
        let a = IMatrix::from_rows(rows);
        if a.rank() < n {
            continue;
        }
        // bounded iff the rows positively span; otherwise one extra row
        // (the negated sum of a row basis) always closes the cone
        let probe = HPolyhedron::new(a.clone(), vecops::zeros::<Rat>(m))?;
        let (a, appended) = if probe.is_bounded()? {
            (a, false)
        } else {
            let basis = independent_row_subset(&a, n)?;
            let sum = basis
                .iter()
                .fold(vecops::zeros::<Int>(n), |acc, &r| vecops::add(&acc, &a.row_vec(r)));
            (a.vstack(&IMatrix::from_row(vecops::neg(&sum))), true)
        };
        let rows_now = a.rows();

        let anchor: IVec = (0..n).map(|_| Int::from(rng.gen_range(-2..=2i64))).collect();
        let slack: IVec = (0..rows_now).map(|_| Int::from(rng.gen_range(1..=3i64))).collect();
        let b: IVec = a
            .mul_vec(&anchor)
            .into_iter()
            .zip(&slack)
            .map(|(az, u)| az + u)
            .collect();

        let c: QVec = loop {
            let c: Vec<i64> = (0..n).map(|_| rng.gen_range(-entry_bound..=entry_bound)).collect();
            if c.iter().any(|&x| x != 0) {
                break vecops::rat_from_i64(&c);
            }
        };

        let instance = Instance::new(a, b, c)?;
        return Ok(RandomInstance { instance, seed, appended_bounding_row: appended });
    }
    Err(Error::BudgetExhausted("random instance sampling"))
}

fn independent_row_subset(a: &IMatrix, want: usize) -> Result<Vec<usize>> {
    let mut chosen: Vec<usize> = Vec::new();
    for r in 0..a.rows() {
        if chosen.len() == want {
            break;
        }
        let mut candidate = chosen.clone();
        candidate.push(r);
        if a.select_rows(&candidate).rank() == candidate.len() {
            chosen = candidate;
        }
    }
    if chosen.len() == want {
        Ok(chosen)
    } else {
        Err(Error::RankDeficient)
    }
}

/// A strictly delta-modular instance with its factorization witnesses.
#[derive(Clone, Debug)]
pub struct SdmInstance {
    pub instance: Instance,
    pub t: IMatrix,
    pub b_factor: IMatrix,
    pub delta: i64,
    pub seed: u64,
}

/// Generate `A = T B` with `T` drawn from a totally unimodular pattern
/// family (interval rows with random negations, or digraph-incidence
/// rows) stacked on identity blocks, and `B` triangular with diagonal
/// product `delta`, lightly scrambled by unimodular operations.
pub fn gen_strictly_delta_modular(
    n: usize,
    m: usize,
    delta: i64,
    seed: u64,
) -> Result<SdmInstance> {
    if n == 0 || delta < 1 {
        return Err(Error::InvalidParam(format!("need n >= 1 and delta >= 1; got {n}, {delta}")));
    }
    if m < 2 * n {
        return Err(Error::InvalidParam(format!(
            "need m >= 2n = {} for the identity blocks; got {m}",
            2 * n
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let extra = m - 2 * n;
    let mut t = IMatrix::identity(n).vstack(&IMatrix::identity(n).neg());
    let network_family = rng.gen_bool(0.5);
    for _ in 0..extra {
        let mut row = vecops::zeros::<Int>(n);
        if network_family {
            // at most one +1 and one -1
            let i = rng.gen_range(0..n);
            row[i] = Int::one();
            if n > 1 && rng.gen_bool(0.8) {
                let mut j = rng.gen_range(0..n);
                while j == i {
                    j = rng.gen_range(0..n);
                }
                row[j] = -Int::one();
            }
        } else {
            // contiguous ones, possibly negated
            let lo = rng.gen_range(0..n);
            let hi = rng.gen_range(lo..n);
            let sign = if rng.gen_bool(0.5) { Int::one() } else { -Int::one() };
            for c in row.iter_mut().take(hi + 1).skip(lo) {
                *c = sign.clone();
            }
        }
        t = t.vstack(&IMatrix::from_row(row));
    }
    if !is_totally_unimodular(&t) {
        return Err(Error::Internal("pattern family produced a non-TU matrix".into()));
    }

    // triangular base with diagonal product delta
    let mut diag = vec![Int::one(); n];
    let mut rest = delta;
    let mut p = 2i64;
    while rest > 1 {
        while rest % p == 0 {
            let pos = rng.gen_range(0..n);
            diag[pos] *= Int::from(p);
            rest /= p;
        }
        p += 1;
    }
    let mut b = IMatrix::zeros(n, n);
    for i in 0..n {
        b.set(i, i, diag[i].clone());
        for j in 0..i {
            b.set(i, j, Int::from(rng.gen_range(-1..=1i64)));
        }
    }
    // a couple of unimodular column scrambles, keeping entries small
    for _ in 0..2 {
        if n > 1 {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n);
            while j == i {
                j = rng.gen_range(0..n);
            }
            for r in 0..n {
                let v = b.get(r, i) + b.get(r, j);
                b.set(r, i, v);
            }
        }
    }
    debug_assert_eq!(b.det()?.abs(), Int::from(delta));

    let a = t.matmul(&b);
    let anchor: IVec = (0..n).map(|_| Int::from(rng.gen_range(-1..=1i64))).collect();
    let rhs: IVec = a
        .mul_vec(&anchor)
        .into_iter()
        .map(|az| az + Int::from(rng.gen_range(1..=3i64)))
        .collect();
    let c: QVec = loop {
        let c: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3i64)).collect();
        if c.iter().any(|&x| x != 0) {
            break vecops::rat_from_i64(&c);
        }
    };
    let instance = Instance::new(a, rhs, c)?;
    Ok(SdmInstance { instance, t, b_factor: b, delta, seed })
}

/// First `k` columns of the inverse of the base matrix are integral; this
/// is what makes the parallelepiped hold exactly `2^k` integer points.
pub fn base_inverse_integral_columns(lb: &LowerBoundInstance) -> Result<bool> {
    let inv = lb
        .b_matrix
        .to_rat()
        .inverse()?
        .ok_or_else(|| Error::Internal("base matrix must be invertible".into()))?;
    Ok((0..lb.k).all(|j| (0..lb.n).all(|i| inv.get(i, j).is_integer())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::vecops::from_i64;
    use crate::proximity::measure_proximity;

    #[test]
    fn smallest_tight_member_matches_hand_computation() {
        let lb = gen_lower_bound(3, 2, 0).unwrap();
        assert_eq!(lb.b_matrix, IMatrix::from_i64_rows(&[&[1, 0], &[2, 3]]));
        assert_eq!(lb.rhs, from_i64(&[1, 1]));
        assert_eq!(lb.x_star, vec![Rat::one(), Rat::new(Int::from(-1), Int::from(3))]);
        assert_eq!(vecops::linf_norm(&lb.x_star), Rat::one());
        let report = measure_proximity(lb.instance()).unwrap();
        assert_eq!(report.proximity, Rat::one(), "proximity is delta - 2");
    }

    #[test]
    fn parameter_validation() {
        assert!(matches!(gen_lower_bound(2, 2, 0), Err(Error::InvalidParam(_))));
        assert!(matches!(gen_lower_bound(3, 1, 0), Err(Error::InvalidParam(_))));
        assert!(matches!(gen_lower_bound(3, 3, 3), Err(Error::InvalidParam(_))));
        // delta - n + k = 3 - 5 + 0 < 1
        assert!(matches!(gen_lower_bound(3, 5, 0), Err(Error::InvalidParam(_))));
        assert!(gen_lower_bound(3, 4, 2).is_ok(), "boundary delta - n + k = 1");
    }

    #[test]
    fn parallelepiped_lattice_count_is_two_for_one_cut() {
        let lb = gen_lower_bound(4, 3, 1).unwrap();
        let pts = lb.parallelepiped().unwrap().lattice_points_auto().unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts.contains(&from_i64(&[0, 0, 0])));
        assert!(pts.contains(&from_i64(&[1, 0, 0])));
        assert!(base_inverse_integral_columns(&lb).unwrap());
    }

    #[test]
    fn last_member_has_unit_vertex_norm_and_loud_rhs() {
        for delta in [3i64, 4, 5, 6] {
            let lb = gen_lower_bound(delta, 3, 2).unwrap();
            assert_eq!(vecops::linf_norm(&lb.x_star), Rat::one());
            let b_norm = lb.instance().b().iter().map(|x| x.abs()).max().unwrap();
            assert_eq!(b_norm, Int::from(delta - 1));
        }
    }

    #[test]
    fn certification_passes_on_small_members() {
        for (delta, n, k) in [(3i64, 2usize, 0usize), (4, 3, 1), (3, 4, 2), (5, 3, 1)] {
            let lb = gen_lower_bound(delta, n, k).unwrap();
            let cert = certify_lower_bound(&lb, Caps::default()).unwrap();
            if k + 2 == n {
                assert_eq!(cert.delta_top, Int::from(delta));
            }
            assert_eq!(cert.dimension, n);
        }
    }

    #[test]
    fn random_generation_is_deterministic_and_wellformed() {
        let one = gen_random(3, 7, 3, 42).unwrap();
        let two = gen_random(3, 7, 3, 42).unwrap();
        assert_eq!(one.instance, two.instance);
        assert_eq!(one.appended_bounding_row, two.appended_bounding_row);
        let other = gen_random(3, 7, 3, 43).unwrap();
        assert_ne!(one.instance, other.instance);

        for seed in 0..20u64 {
            let r = gen_random(2, 5, 3, seed).unwrap();
            let poly = r.instance.polyhedron();
            assert!(poly.is_bounded().unwrap(), "seed {seed} unbounded");
            let lattice = poly.lattice_points_auto().unwrap();
            assert!(!lattice.is_empty(), "seed {seed} integer-infeasible");
        }
    }

    #[test]
    fn sdm_generation_invariants() {
        for seed in 0..10u64 {
            for delta in [1i64, 2, 3, 4] {
                let sdm = gen_strictly_delta_modular(3, 7, delta, seed).unwrap();
                assert!(is_totally_unimodular(&sdm.t), "seed {seed}");
                assert_eq!(sdm.b_factor.det().unwrap().abs(), Int::from(delta));
                assert_eq!(sdm.t.matmul(&sdm.b_factor), *sdm.instance.a());
                assert!(sdm.instance.polyhedron().is_bounded().unwrap());
            }
        }
    }

    #[test]
    fn unimodular_base_gives_integral_vertices() {
        let sdm = gen_strictly_delta_modular(2, 5, 1, 7).unwrap();
        let report = measure_proximity(&sdm.instance).unwrap();
        assert!(report.proximity.is_zero());
    }

    #[test]
    fn cut_rows_equal_tu_row_times_base() {
        let lb = gen_lower_bound(5, 4, 2).unwrap();
        let t = lb.tu_factor();
        assert_eq!(t.matmul(&lb.b_matrix), *lb.instance().a());
        assert_eq!(lb.cutting_rows.len(), 2);
        assert_eq!(lb.cutting_rows[0], from_i64(&[1, 0, -5, -5]));
    }

    #[test]
    fn objective_makes_far_vertex_unique_optimum() {
        let lb = gen_lower_bound(4, 3, 1).unwrap();
        let poly = lb.instance().polyhedron();
        let opt = poly.optimal_vertices(lb.instance().c()).unwrap();
        assert_eq!(opt.len(), 1);
        assert_eq!(opt[0].point, lb.x_star);
    }
}
