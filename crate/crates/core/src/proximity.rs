//! Determinant parameters, true proximity measurement, origin
//! normalization, slice widths, and per-theorem bound checks.
//!
//! Proximity of an instance is the largest, over optimal vertices of the
//! linear relaxation, distance in the max norm to the nearest optimal
//! integer solution. The normalization rewrites an instance so that its
//! only integer point is the origin, which turns proximity questions into
//! width questions `max alpha^T x` answered by the slice machinery below.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::exactmath::{gcd_minors, is_totally_unimodular, max_abs_minor, vecops, IndexSet};
use crate::polyhedron::{Caps, HPolyhedron};
use crate::{IMatrix, IVec, Int, QVec, Rat, Result};

/// The object whose proximity is studied: `max c^T x : A x <= b` with `A`
/// integral of full column rank and `b` integral.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    a: IMatrix,
    b: IVec,
    c: QVec,
}

impl Instance {
    pub fn new(a: IMatrix, b: IVec, c: QVec) -> Result<Self> {
        if a.rows() != b.len() {
            return Err(Error::Dimension(format!("{} rows vs {} rhs entries", a.rows(), b.len())));
        }
        if a.cols() != c.len() {
            return Err(Error::Dimension(format!("{} cols vs {} objective entries", a.cols(), c.len())));
        }
        if a.cols() == 0 || a.rank() < a.cols() {
            return Err(Error::RankDeficient);
        }
        Ok(Instance { a, b, c })
    }

    pub fn a(&self) -> &IMatrix {
        &self.a
    }

    pub fn b(&self) -> &IVec {
        &self.b
    }

    pub fn c(&self) -> &QVec {
        &self.c
    }

    pub fn num_vars(&self) -> usize {
        self.a.cols()
    }

    pub fn num_rows(&self) -> usize {
        self.a.rows()
    }

    pub fn polyhedron(&self) -> HPolyhedron {
        HPolyhedron::new(self.a.clone(), vecops::to_rat(&self.b))
            .expect("instance dimensions are validated")
    }

    pub fn polyhedron_with_caps(&self, caps: Caps) -> HPolyhedron {
        self.polyhedron().with_caps(caps)
    }

    /// Largest absolute k x k minors for k = 1..n.
    pub fn delta_table(&self) -> Result<Vec<Int>> {
        (1..=self.num_vars()).map(|k| max_abs_minor(&self.a, k)).collect()
    }
}

/// Directional minor bound of a slice: the largest absolute determinant of
/// the objective row stacked over n-1 rows containing `I`, divided by the
/// gcd of the maximal minors of `A_I` (factor 1 for the empty set).
pub fn delta_i(a: &IMatrix, alpha: &[Int], i_set: &IndexSet) -> Result<Rat> {
    let (m, n) = (a.rows(), a.cols());
    assert_eq!(alpha.len(), n, "objective length");
    if i_set.len() + 1 > n {
        return Err(Error::OutOfRange(format!("index set of size {} in dimension {n}", i_set.len())));
    }
    let a_i = a.select_rows_set(i_set);
    if !i_set.is_empty() && a_i.rank() < i_set.len() {
        return Err(Error::RankDeficient);
    }
    let gcd = if i_set.is_empty() { Int::one() } else { gcd_minors(&a_i)? };

    let complement = i_set.complement(m);
    let extra = n - 1 - i_set.len();
    let mut best = Int::zero();
    for add in complement.subsets_within(extra) {
        let k_set = i_set.union(&add);
        let mut rows = vec![alpha.to_vec()];
        for r in k_set.iter() {
            rows.push(a.row_vec(r));
        }
        let d = IMatrix::from_rows(rows).det()?.abs();
        if d > best {
            best = d;
        }
    }
    Ok(Rat::new(best, gcd))
}

/// An instance whose only integer point is the origin, witnessed by
/// lattice enumeration at construction time.
#[derive(Clone, Debug)]
pub struct NormalizedInstance {
    instance: Instance,
    poly: HPolyhedron,
    /// Basis rows that were appended (empty if the instance was accepted
    /// as already normalized).
    basis: IndexSet,
    /// The integer optimum that was moved to the origin.
    shift: IVec,
    /// Whether a nonzero translation was applied.
    pub translated_optimum_at_origin: bool,
}

impl NormalizedInstance {
    /// Accept an instance that already satisfies the invariant.
    pub fn verify(instance: Instance, caps: Caps) -> Result<Self> {
        let poly = instance.polyhedron_with_caps(caps);
        let lattice = poly.lattice_points_auto()?;
        if lattice != vec![vecops::zeros::<Int>(instance.num_vars())] {
            return Err(Error::HypothesisFailed(format!(
                "lattice points are not exactly the origin ({} found)",
                lattice.len()
            )));
        }
        Ok(NormalizedInstance {
            instance,
            poly,
            basis: IndexSet::empty(),
            shift: Vec::new(),
            translated_optimum_at_origin: false,
        })
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn polyhedron(&self) -> &HPolyhedron {
        &self.poly
    }

    pub fn shift(&self) -> &IVec {
        &self.shift
    }

    pub fn appended_basis(&self) -> &IndexSet {
        &self.basis
    }

    pub fn slice_poly(&self, i_set: &IndexSet) -> Result<HPolyhedron> {
        self.poly.slice(i_set)
    }

    /// Extend a factorization witness `A = T B` of the pre-normalization
    /// system to the normalized one by appending the turned-around basis
    /// rows of `T`; negating rows keeps total unimodularity.
    pub fn extend_factor(&self, t: &IMatrix) -> IMatrix {
        if self.basis.is_empty() {
            t.clone()
        } else {
            t.vstack(&t.select_rows_set(&self.basis).neg())
        }
    }
}

/// One measured slice width: index set, slice dimension, direction, and
/// the normalized width.
#[derive(Clone, Debug)]
pub struct WidthSurveyEntry {
    pub i_set: IndexSet,
    pub dim: usize,
    pub alpha: IVec,
    pub kappa: Rat,
}

/// Normalized widths of every slice of dimension 1..=max_dim in every
/// signed unit direction (degenerate direction/slice pairs are skipped).
pub fn width_survey(norm: &NormalizedInstance, max_dim: usize) -> Result<Vec<WidthSurveyEntry>> {
    let a = norm.instance().a();
    let (m, n) = (a.rows(), a.cols());
    let mut alphas: Vec<IVec> = Vec::with_capacity(2 * n);
    for i in 0..n {
        alphas.push(vecops::unit::<Int>(n, i));
        alphas.push(vecops::neg(&vecops::unit::<Int>(n, i)));
    }
    let mut out = Vec::new();
    for size in 0..n {
        for i_set in IndexSet::subsets_of_size(m, size) {
            if !i_set.is_empty() && a.select_rows_set(&i_set).rank() < size {
                continue;
            }
            let slice = norm.slice_poly(&i_set)?;
            let dim = match slice.dimension() {
                Ok(d) => d,
                Err(Error::EmptyPolyhedron) => continue,
                Err(e) => return Err(e),
            };
            if dim == 0 || dim > max_dim {
                continue;
            }
            for alpha in &alphas {
                match kappa_from_slice(norm, &slice, alpha, &i_set) {
                    Ok(kappa) => out.push(WidthSurveyEntry {
                        i_set: i_set.clone(),
                        dim,
                        alpha: alpha.clone(),
                        kappa,
                    }),
                    Err(Error::DegenerateObjective) => continue,
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(out)
}

/// Rewrite an instance so that the chosen optimal integer point sits at
/// the origin and is the unique integer point: append the rows of an
/// optimal basis turned around at that point, then translate.
///
/// The optimal vertex is the lexicographically smallest one, its basis is
/// chosen so that the dual multipliers of the lexicographically perturbed
/// objective are strictly positive, and the integer optimum closest to the
/// vertex is cut against first. If a different integer optimum survives
/// the cut (possible when the nearest one is not the perturbation
/// optimum), the lexicographically smallest integer optimum is used
/// instead; that choice always succeeds.
pub fn normalize(inst: &Instance, caps: Caps) -> Result<NormalizedInstance> {
    let poly = inst.polyhedron_with_caps(caps);
    let optimal_vertices = poly.optimal_vertices(inst.c())?;
    let x_star = optimal_vertices
        .iter()
        .map(|c| &c.point)
        .min_by(|a, b| vecops::lex_cmp(a, b))
        .expect("optimal vertex exists")
        .clone();

    let lattice = poly.lattice_points_auto()?;
    if lattice.is_empty() {
        return Err(Error::Infeasible);
    }
    let ip_value = lattice
        .iter()
        .map(|z| vecops::dot(inst.c(), &vecops::to_rat(z)))
        .max()
        .expect("nonempty lattice");
    let optimal_ints: Vec<&IVec> = lattice
        .iter()
        .filter(|z| vecops::dot(inst.c(), &vecops::to_rat(z)) == ip_value)
        .collect();

    let nearest = optimal_ints
        .iter()
        .min_by(|x, y| {
            let dx = vecops::linf_norm(&vecops::sub(&x_star, &vecops::to_rat(x)));
            let dy = vecops::linf_norm(&vecops::sub(&x_star, &vecops::to_rat(y)));
            dx.cmp(&dy).then_with(|| x.cmp(y))
        })
        .expect("nonempty")
        .to_vec();
    let lex_min = optimal_ints.iter().min().expect("nonempty").to_vec();

    let basis = positive_multiplier_basis(&poly, inst.c(), &x_star)?;

    let mut candidates = vec![nearest.clone()];
    if lex_min != nearest {
        candidates.push(lex_min);
    }
    for z_star in candidates {
        let norm = build_normalized(inst, &basis, &z_star, caps)?;
        let check = norm.poly.lattice_points_auto()?;
        if check == vec![vecops::zeros::<Int>(inst.num_vars())] {
            return Ok(norm);
        }
    }
    Err(Error::Internal("normalization failed to isolate the origin".into()))
}

fn build_normalized(
    inst: &Instance,
    basis: &IndexSet,
    z_star: &IVec,
    caps: Caps,
) -> Result<NormalizedInstance> {
    let a_basis = inst.a().select_rows_set(basis);
    let a_new = inst.a().vstack(&a_basis.neg());
    let az = inst.a().mul_vec(z_star);
    let mut b_new: IVec = inst.b().iter().zip(&az).map(|(bi, azi)| bi - azi).collect();
    b_new.extend(std::iter::repeat_n(Int::zero(), basis.len()));
    let instance = Instance::new(a_new, b_new, inst.c().clone())?;
    let poly = instance.polyhedron_with_caps(caps);
    Ok(NormalizedInstance {
        instance,
        poly,
        basis: basis.clone(),
        translated_optimum_at_origin: !vecops::is_zero(z_star),
        shift: z_star.clone(),
    })
}

/// Basis of tight rows at `x_star` whose dual multipliers for the
/// objective tuple `(c, -e_1, ..., -e_n)` are lexicographically positive
/// row by row: these stay strictly positive for every sufficiently small
/// perturbation step realizing the lexicographic tie-break.
fn positive_multiplier_basis(
    poly: &HPolyhedron,
    c: &[Rat],
    x_star: &[Rat],
) -> Result<IndexSet> {
    let n = poly.ambient_dim();
    let tight = poly.tight_inequalities(x_star);
    for subset in tight.subsets_within(n) {
        let a_s = poly.matrix().select_rows_set(&subset).to_rat();
        let a_s_t = a_s.transpose();
        let mut multiplier_rows: Vec<QVec> = vec![Vec::new(); n];
        let mut singular = false;
        let mut objectives: Vec<QVec> = vec![c.to_vec()];
        for j in 0..n {
            objectives.push(vecops::neg(&vecops::unit::<Rat>(n, j)));
        }
        for obj in &objectives {
            match a_s_t.solve_square(obj)? {
                Some(y) => {
                    for (row, yi) in multiplier_rows.iter_mut().zip(y) {
                        row.push(yi);
                    }
                }
                None => {
                    singular = true;
                    break;
                }
            }
        }
        if singular {
            continue;
        }
        let lex_positive = multiplier_rows.iter().all(|row| {
            row.iter()
                .find(|v| !v.is_zero())
                .is_some_and(|v| v.is_positive())
        });
        if lex_positive {
            return Ok(subset);
        }
    }
    Err(Error::Internal("no basis with lexicographically positive multipliers".into()))
}

/// How a measured value relates to a bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundFlag {
    /// Strictly below the bound.
    Strict,
    /// Equal to the bound.
    Tight,
    /// Above the bound.
    Violated,
    /// The bound does not apply to this instance.
    NotApplicable,
}

impl BoundFlag {
    fn compare(value: &Rat, bound: &Rat) -> Self {
        match value.cmp(bound) {
            Ordering::Less => BoundFlag::Strict,
            Ordering::Equal => BoundFlag::Tight,
            Ordering::Greater => BoundFlag::Violated,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            BoundFlag::Strict => "strict",
            BoundFlag::Tight => "tight",
            BoundFlag::Violated => "violated",
            BoundFlag::NotApplicable => "not-applicable",
        }
    }
}

/// Measured proximity together with the determinant parameters and the
/// values and verdicts of the generic bounds.
#[derive(Clone, Debug)]
pub struct ProximityReport {
    /// Max over optimal vertices of the distance to the nearest optimal
    /// integer solution (the quantity the generic bounds govern).
    pub proximity: Rat,
    /// Same, but against all feasible integer points.
    pub proximity_feasible: Rat,
    pub lp_value: Rat,
    pub ip_value: Rat,
    pub optimal_vertex_count: usize,
    pub optimal_integer_count: usize,
    /// Largest absolute k x k minors, k = 1..n.
    pub delta_table: Vec<Int>,
    /// n times the largest minor over all orders.
    pub bound_cook: Rat,
    /// n times the largest (n-1) minor; a refinement of the same argument.
    pub bound_cook_refined: Option<Rat>,
    /// (n/2) times the largest (n-1) minor; must hold strictly for n >= 2.
    pub bound_main: Option<Rat>,
    /// max(largest (n-1) minor, largest n minor) - 1; applies only with a
    /// certified totally unimodular factorization.
    pub bound_tu: Option<Rat>,
    pub flag_cook: BoundFlag,
    pub flag_main: BoundFlag,
    pub flag_tu: BoundFlag,
}

impl ProximityReport {
    /// True when every applicable bound holds (the main bound must hold
    /// strictly).
    pub fn all_hold(&self) -> bool {
        self.flag_cook != BoundFlag::Violated
            && matches!(self.flag_main, BoundFlag::Strict | BoundFlag::NotApplicable)
            && self.flag_tu != BoundFlag::Violated
    }
}

pub fn measure_proximity(inst: &Instance) -> Result<ProximityReport> {
    measure_proximity_with_caps(inst, Caps::default())
}

/// Solve the relaxation exactly, enumerate optimal vertices and integer
/// points, and report the worst-case distances with all bound values.
pub fn measure_proximity_with_caps(inst: &Instance, caps: Caps) -> Result<ProximityReport> {
    let poly = inst.polyhedron_with_caps(caps);
    let (lp_value, _) = poly.lp_max(inst.c())?;
    let optimal_vertices = poly.optimal_vertices(inst.c())?;

    let lattice = poly.lattice_points_auto()?;
    if lattice.is_empty() {
        return Err(Error::Infeasible);
    }
    let lattice_rat: Vec<QVec> = lattice.iter().map(|z| vecops::to_rat(z)).collect();
    let ip_value = lattice_rat
        .iter()
        .map(|z| vecops::dot(inst.c(), z))
        .max()
        .expect("nonempty lattice");
    let optimal_ints: Vec<&QVec> = lattice_rat
        .iter()
        .filter(|z| vecops::dot(inst.c(), z) == ip_value)
        .collect();

    let worst_distance = |targets: &[&QVec]| -> Rat {
        optimal_vertices
            .iter()
            .map(|v| {
                targets
                    .iter()
                    .map(|z| vecops::linf_norm(&vecops::sub(&v.point, z)))
                    .min()
                    .expect("nonempty targets")
            })
            .max()
            .expect("nonempty vertices")
    };
    let proximity = worst_distance(&optimal_ints);
    let all_ints: Vec<&QVec> = lattice_rat.iter().collect();
    let proximity_feasible = worst_distance(&all_ints);

    let delta_table = inst.delta_table()?;
    let n = inst.num_vars();
    let n_rat = Rat::from_integer(Int::from(n as i64));
    let max_delta = delta_table.iter().max().expect("n >= 1").clone();
    let bound_cook = n_rat.clone() * Rat::from_integer(max_delta);
    let (bound_cook_refined, bound_main) = if n >= 2 {
        let d_top = Rat::from_integer(delta_table[n - 2].clone());
        (
            Some(n_rat.clone() * d_top.clone()),
            Some(n_rat * d_top / Rat::from_integer(Int::from(2))),
        )
    } else {
        (None, None)
    };

    let flag_cook = BoundFlag::compare(&proximity, &bound_cook);
    let flag_main = bound_main
        .as_ref()
        .map_or(BoundFlag::NotApplicable, |b| BoundFlag::compare(&proximity, b));

    Ok(ProximityReport {
        proximity,
        proximity_feasible,
        lp_value,
        ip_value,
        optimal_vertex_count: optimal_vertices.len(),
        optimal_integer_count: optimal_ints.len(),
        delta_table,
        bound_cook,
        bound_cook_refined,
        bound_main,
        bound_tu: None,
        flag_cook,
        flag_main,
        flag_tu: BoundFlag::NotApplicable,
    })
}

/// Normalized width of the slice through `ker A_I` in direction `alpha`:
/// the maximum of `alpha^T x` over the slice divided by the directional
/// minor bound of the slice.
pub fn kappa_i(norm: &NormalizedInstance, alpha: &[Int], i_set: &IndexSet) -> Result<Rat> {
    let slice = norm.slice_poly(i_set)?;
    kappa_from_slice(norm, &slice, alpha, i_set)
}

/// Same as [`kappa_i`] with a previously constructed slice, so the slice's
/// vertex cache can be reused across objectives.
pub fn kappa_from_slice(
    norm: &NormalizedInstance,
    slice: &HPolyhedron,
    alpha: &[Int],
    i_set: &IndexSet,
) -> Result<Rat> {
    let delta = delta_i(norm.instance().a(), alpha, i_set)?;
    if delta.is_zero() {
        return Err(Error::DegenerateObjective);
    }
    let (value, _) = slice.lp_max(&vecops::to_rat(alpha))?;
    Ok(value / delta)
}

/// Max of [`kappa_i`] over all slices of dimension exactly `d` (index sets
/// of independent rows; slices whose minor bound vanishes are skipped).
pub fn kappa_d(norm: &NormalizedInstance, alpha: &[Int], d: usize) -> Result<Rat> {
    let a = norm.instance().a();
    let (m, n) = (a.rows(), a.cols());
    if d > n {
        return Err(Error::OutOfRange(format!("slice dimension {d} in ambient dimension {n}")));
    }
    let mut best: Option<Rat> = None;
    let mut saw_slice = false;
    for size in 0..n.min(m + 1) {
        if n - size < d {
            continue; // slice dimension cannot reach d
        }
        for i_set in IndexSet::subsets_of_size(m, size) {
            if !i_set.is_empty() && a.select_rows_set(&i_set).rank() < size {
                continue;
            }
            let slice = norm.slice_poly(&i_set)?;
            match slice.dimension() {
                Ok(dim) if dim == d => {}
                Ok(_) => continue,
                Err(Error::EmptyPolyhedron) => continue,
                Err(e) => return Err(e),
            }
            saw_slice = true;
            match kappa_from_slice(norm, &slice, alpha, &i_set) {
                Ok(k) => {
                    best = Some(match best {
                        None => k,
                        Some(b) => b.max(k),
                    });
                }
                Err(Error::DegenerateObjective) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    match best {
        Some(b) => Ok(b),
        None if saw_slice => Err(Error::DegenerateObjective),
        None => Err(Error::NoSliceOfDimension(d)),
    }
}

/// Both sides of the width-versus-section-volume inequality, squared so
/// that the Euclidean norms stay rational.
#[derive(Clone, Debug)]
pub struct VolumeBoundCheck {
    /// (width in direction alpha)^2 * vol(section)^2; the width equals
    /// `kappa * delta`, so this is `kappa^2 * delta^2 * vol^2`.
    pub lhs_sq: Rat,
    /// 4^(n-1) * |alpha|_2^2.
    pub rhs_sq: Rat,
    pub holds: bool,
}

/// Check `kappa_n < 2^(n-1) |alpha|_2 / (vol_{n-1}(section) * delta)` in
/// exact squared form for a full-dimensional normalized instance in
/// ambient dimension 2 or 3. The section is `{x : |Ax| <= 1, alpha^T x = 0}`.
pub fn check_volume_bound(norm: &NormalizedInstance, alpha: &[Int]) -> Result<VolumeBoundCheck> {
    let n = norm.instance().num_vars();
    if !(2..=3).contains(&n) {
        return Err(Error::OutOfRange(format!("volume bound needs dimension 2 or 3, got {n}")));
    }
    if norm.polyhedron().dimension()? != n {
        return Err(Error::HypothesisFailed("volume bound needs a full-dimensional instance".into()));
    }
    let section = unit_section(norm.instance().a(), alpha)?;
    let vol_sq = section.volume_low_dim()?.squared();

    // width = kappa_n * delta = max alpha^T x over the whole polyhedron
    let (width, _) = norm.polyhedron().lp_max(&vecops::to_rat(alpha))?;
    let width_sq = width.clone() * width;

    let four_pow = Rat::from_integer(Int::from(4).pow((n - 1) as u32));
    let alpha_norm_sq = Rat::from_integer(vecops::dot(&alpha.to_vec(), &alpha.to_vec()));
    let lhs_sq = width_sq * vol_sq;
    let rhs_sq = four_pow * alpha_norm_sq;
    Ok(VolumeBoundCheck { holds: lhs_sq < rhs_sq, lhs_sq, rhs_sq })
}

/// The polytope `{x : |Ax| <= 1, alpha^T x = 0}`.
pub fn unit_section(a: &IMatrix, alpha: &[Int]) -> Result<HPolyhedron> {
    let m = a.rows();
    let ones: QVec = (0..2 * m).map(|_| Rat::one()).collect();
    let mut rows = a.vstack(&a.neg());
    rows = rows.vstack(&IMatrix::from_row(alpha.to_vec()));
    let mut rhs = ones;
    rhs.push(Rat::zero());
    HPolyhedron::with_equalities(rows, rhs, IndexSet::singleton(2 * m))
}

/// Outcome of the proximity bound check for a certified factorization
/// `A = T B` with `T` totally unimodular.
#[derive(Clone, Debug)]
pub struct SdmBoundCheck {
    pub report: ProximityReport,
    pub bound: Rat,
    pub holds: bool,
}

/// Verify the factorization hypotheses, measure proximity, and compare it
/// against `max(delta_{n-1}, delta_n) - 1`.
pub fn check_strictly_delta_modular_bound(
    inst: &Instance,
    t: &IMatrix,
    b_factor: &IMatrix,
    caps: Caps,
) -> Result<SdmBoundCheck> {
    let n = inst.num_vars();
    if b_factor.rows() != n || b_factor.cols() != n {
        return Err(Error::HypothesisFailed("factor B is not square of order n".into()));
    }
    let det_b = b_factor.det()?.abs();
    if det_b.is_zero() {
        return Err(Error::HypothesisFailed("factor B is singular".into()));
    }
    if &t.matmul(b_factor) != inst.a() {
        return Err(Error::HypothesisFailed("A does not equal T * B".into()));
    }
    if !is_totally_unimodular(t) {
        return Err(Error::HypothesisFailed("factor T is not totally unimodular".into()));
    }
    let delta_n = max_abs_minor(inst.a(), n)?;
    if det_b != delta_n {
        return Err(Error::HypothesisFailed(format!(
            "|det B| = {det_b} differs from the largest n-minor {delta_n}"
        )));
    }

    let mut report = measure_proximity_with_caps(inst, caps)?;
    let delta_top = if n >= 2 { report.delta_table[n - 2].clone() } else { delta_n.clone() };
    let bound = Rat::from_integer(delta_top.max(delta_n) - Int::one());
    report.bound_tu = Some(bound.clone());
    report.flag_tu = BoundFlag::compare(&report.proximity, &bound);
    let holds = report.flag_tu != BoundFlag::Violated;
    Ok(SdmBoundCheck { report, bound, holds })
}
