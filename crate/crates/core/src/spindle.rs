//! Sign cones `C(A, x*)`, spindles `S(A, x*) = C ∩ (x* - C)`, the
//! basis-path construction that finds a vertex between complementary
//! faces, the face-walk that telescopes an objective down to the origin,
//! and primitive-ray decompositions in the auxiliary lattice of a
//! totally unimodular factorization.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::error::Error;
use crate::exactmath::{is_totally_unimodular, vecops, IndexSet};
use crate::polyhedron::{Face, HPolyhedron};
use crate::proximity::{delta_i, kappa_d, NormalizedInstance};
use crate::{IMatrix, IVec, Int, QMatrix, QVec, Rat, Result};

/// What a row of the spindle system encodes relative to the original
/// constraint matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpindleRow {
    /// `-sign(a_i^T x*) a_i^T x <= 0`, tight at the origin.
    Origin(usize),
    /// `sign(a_i^T x*) a_i^T x <= sign(a_i^T x*) a_i^T x*`, tight at the apex.
    Apex(usize),
    /// `a_i^T x = 0` for rows with `a_i^T x* = 0`.
    Zero(usize),
}

/// The spindle of a point: the sign cone of the point intersected with its
/// reflection through the point. Both the origin and the apex belong to
/// it, and it is centrally symmetric about half the apex.
#[derive(Clone, Debug)]
pub struct SpindleRep {
    apex: QVec,
    signs: Vec<i8>,
    system: HPolyhedron,
    rows: Vec<SpindleRow>,
}

/// Sign pattern of `A x*` as -1 / 0 / +1 per row.
pub fn sign_vector(a: &IMatrix, x_star: &[Rat]) -> Vec<i8> {
    (0..a.rows())
        .map(|i| {
            let v = vecops::dot(&vecops::to_rat(&a.row_vec(i)), x_star);
            match v.cmp(&Rat::zero()) {
                std::cmp::Ordering::Less => -1,
                std::cmp::Ordering::Equal => 0,
                std::cmp::Ordering::Greater => 1,
            }
        })
        .collect()
}

/// Membership in the sign cone of `x_star`.
pub fn in_sign_cone(a: &IMatrix, signs: &[i8], y: &[Rat]) -> bool {
    (0..a.rows()).all(|i| {
        let v = vecops::dot(&vecops::to_rat(&a.row_vec(i)), y);
        match signs[i] {
            0 => v.is_zero(),
            1 => !v.is_negative(),
            _ => !v.is_positive(),
        }
    })
}

pub fn build_spindle(a: &IMatrix, x_star: &QVec) -> Result<SpindleRep> {
    assert_eq!(a.cols(), x_star.len(), "apex dimension");
    let signs = sign_vector(a, x_star);
    let mut rows_mat: Vec<IVec> = Vec::new();
    let mut rhs: QVec = Vec::new();
    let mut eq: Vec<usize> = Vec::new();
    let mut rows: Vec<SpindleRow> = Vec::new();
    for i in 0..a.rows() {
        let row = a.row_vec(i);
        match signs[i] {
            0 => {
                eq.push(rows_mat.len());
                rows.push(SpindleRow::Zero(i));
                rows_mat.push(row);
                rhs.push(Rat::zero());
            }
            s => {
                let oriented: IVec = if s > 0 { row.clone() } else { vecops::neg(&row) };
                let level = vecops::dot(&vecops::to_rat(&oriented), x_star);
                rows.push(SpindleRow::Origin(i));
                rows_mat.push(vecops::neg(&oriented));
                rhs.push(Rat::zero());
                rows.push(SpindleRow::Apex(i));
                rows_mat.push(oriented);
                rhs.push(level);
            }
        }
    }
    let system = HPolyhedron::with_equalities(
        IMatrix::from_rows(rows_mat),
        rhs,
        IndexSet::from_sorted(eq),
    )?;
    Ok(SpindleRep { apex: x_star.clone(), signs, system, rows })
}

impl SpindleRep {
    pub fn apex(&self) -> &QVec {
        &self.apex
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn system(&self) -> &HPolyhedron {
        &self.system
    }

    pub fn row_kind(&self, system_row: usize) -> SpindleRow {
        self.rows[system_row]
    }

    pub fn dim(&self) -> Result<usize> {
        self.system.dimension()
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.system.contains(x)
    }

    /// Spindles are bounded, so containment in another polyhedron reduces
    /// to containment of the vertices.
    pub fn contained_in(&self, poly: &HPolyhedron) -> Result<bool> {
        Ok(self.system.vertex_points()?.iter().all(|v| poly.contains(v)))
    }

    fn origin_rows(&self) -> IndexSet {
        (0..self.rows.len())
            .filter(|&r| matches!(self.rows[r], SpindleRow::Origin(_)))
            .collect()
    }

    fn apex_rows(&self) -> IndexSet {
        (0..self.rows.len())
            .filter(|&r| matches!(self.rows[r], SpindleRow::Apex(_)))
            .collect()
    }

    fn zero_rows(&self) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&r| matches!(self.rows[r], SpindleRow::Zero(_)))
            .collect()
    }

    /// Original-matrix row index behind a system row.
    pub fn source_row(&self, system_row: usize) -> usize {
        match self.rows[system_row] {
            SpindleRow::Origin(i) | SpindleRow::Apex(i) | SpindleRow::Zero(i) => i,
        }
    }
}

/// Result of the complementary-face search: a vertex incident both to a
/// `d`-face through the apex and a `(k-d)`-face through the origin,
/// produced by a pivot path whose bases exchange one constraint at a time.
#[derive(Clone, Debug)]
pub struct FacePathResult {
    pub vertex: QVec,
    /// Face of dimension exactly `d` containing the apex and the vertex.
    pub face_apex: Face,
    /// Face of dimension exactly `k - d` containing the origin and the vertex.
    pub face_origin: Face,
    /// Rows of the witnessing basis tight at the origin (as system rows).
    pub basis_origin: IndexSet,
    /// Rows of the witnessing basis tight at the apex (as system rows).
    pub basis_apex: IndexSet,
}

struct BasisWalk<'s> {
    spindle: &'s SpindleRep,
    zero_rank: usize,
}

impl<'s> BasisWalk<'s> {
    fn new(spindle: &'s SpindleRep) -> Self {
        let zero = spindle.zero_rows();
        let zero_rank = if zero.is_empty() {
            0
        } else {
            spindle.system.matrix().select_rows(&zero).rank()
        };
        BasisWalk { spindle, zero_rank }
    }

    /// Copies are independent if, together with the ambient equality rows,
    /// they add full new rank.
    fn independent(&self, copies: &[usize]) -> bool {
        let mut rows: Vec<usize> = copies.to_vec();
        rows.extend(self.spindle.zero_rows());
        self.spindle.system.matrix().select_rows(&rows).rank() == copies.len() + self.zero_rank
    }

    /// Extend `seed` to a size-`target` independent set using rows of
    /// `tight`, greedily in index order.
    fn greedy_basis(&self, tight: &IndexSet, seed: &[usize], target: usize) -> Result<Vec<usize>> {
        let mut basis = seed.to_vec();
        for r in tight.iter() {
            if basis.len() == target {
                break;
            }
            if basis.contains(&r) {
                continue;
            }
            let mut candidate = basis.clone();
            candidate.push(r);
            if self.independent(&candidate) {
                basis = candidate;
            }
        }
        if basis.len() == target {
            Ok(basis)
        } else {
            Err(Error::Internal("tight rows do not span a basis".into()))
        }
    }

    /// Single matroid exchanges turning `basis` into `target`; every
    /// intermediate set stays independent and inside the current tight set.
    fn exchange_chain(
        &self,
        basis: &mut Vec<usize>,
        target: &[usize],
        record: &mut Vec<IndexSet>,
    ) -> Result<()> {
        loop {
            let missing: Vec<usize> =
                target.iter().copied().filter(|r| !basis.contains(r)).collect();
            let Some(&incoming) = missing.first() else {
                return Ok(());
            };
            let mut swapped = false;
            for pos in 0..basis.len() {
                if target.contains(&basis[pos]) {
                    continue;
                }
                let mut candidate = basis.clone();
                candidate[pos] = incoming;
                if self.independent(&candidate) {
                    *basis = candidate;
                    record.push(IndexSet::new(basis.clone(), self.spindle.rows.len())?);
                    swapped = true;
                    break;
                }
            }
            if !swapped {
                return Err(Error::Internal("matroid exchange stalled".into()));
            }
        }
    }

    fn apex_count(&self, basis: &IndexSet) -> usize {
        basis.intersection(&self.spindle.apex_rows()).len()
    }
}

/// Find a vertex of the spindle incident to a `d`-face containing the apex
/// and a `(k-d)`-face containing the origin, by pivoting through feasible
/// bases from an all-tight-at-origin basis toward the apex and stopping at
/// the first basis with exactly `k-d` apex constraints.
///
/// The pivot sequence follows a strictly improving walk on the vertex
/// graph (objective: sum of the oriented normals, maximized uniquely at
/// the apex), with single-exchange rebasing at degenerate vertices; strict
/// improvement makes cycling impossible.
pub fn face_path(spindle: &SpindleRep, d: usize) -> Result<FacePathResult> {
    let sys = spindle.system();
    let k = spindle.dim()?;
    if d == 0 || d > k {
        return Err(Error::OutOfRange(format!("face dimension {d} in a {k}-dimensional spindle")));
    }
    let n = sys.ambient_dim();
    let points = sys.vertex_points()?;
    let origin_id = sys
        .vertex_id_of(&vecops::zeros::<Rat>(n))?
        .ok_or_else(|| Error::Internal("origin is not a vertex of the spindle".into()))?;
    let apex_id = sys
        .vertex_id_of(spindle.apex())?
        .ok_or_else(|| Error::Internal("apex is not a vertex of the spindle".into()))?;

    // objective maximized uniquely at the apex
    let mut phi = vecops::zeros::<Rat>(n);
    for (r, kind) in spindle.rows.iter().enumerate() {
        if matches!(kind, SpindleRow::Apex(_)) {
            phi = vecops::add(&phi, &vecops::to_rat(&sys.matrix().row_vec(r)));
        }
    }

    let walk = BasisWalk::new(spindle);
    let mut states: Vec<IndexSet> = Vec::new();
    let mut state_vertex: Vec<usize> = Vec::new();

    let mut v = origin_id;
    let mut basis = walk.greedy_basis(&sys.vertex_tight_set(v)?, &[], k)?;
    states.push(IndexSet::new(basis.clone(), spindle.rows.len())?);
    state_vertex.push(v);

    while v != apex_id {
        // best strictly improving neighbor
        let phi_v = vecops::dot(&phi, &points[v]);
        let mut next: Option<usize> = None;
        for w in 0..points.len() {
            if w == v || vecops::dot(&phi, &points[w]) <= phi_v {
                continue;
            }
            if sys.face_join(&[v, w])?.dim != 1 {
                continue;
            }
            next = Some(match next {
                None => w,
                Some(best) => {
                    let better = vecops::dot(&phi, &points[w]) > vecops::dot(&phi, &points[best])
                        || (vecops::dot(&phi, &points[w]) == vecops::dot(&phi, &points[best])
                            && vecops::lex_cmp(&points[w], &points[best])
                                == std::cmp::Ordering::Less);
                    if better {
                        w
                    } else {
                        best
                    }
                }
            });
        }
        let w = next.ok_or_else(|| Error::Internal("no improving edge toward the apex".into()))?;

        let edge_tight = sys.vertex_tight_set(v)?.intersection(&sys.vertex_tight_set(w)?);
        let edge_basis = walk.greedy_basis(&edge_tight, &[], k - 1)?;
        // rebase at v so that the edge rows enter the basis
        let mut record: Vec<IndexSet> = Vec::new();
        let target_v = walk.greedy_basis(&sys.vertex_tight_set(v)?, &edge_basis, k)?;
        walk.exchange_chain(&mut basis, &target_v, &mut record)?;
        for b in record.drain(..) {
            states.push(b);
            state_vertex.push(v);
        }
        // pivot across the edge
        let target_w = walk.greedy_basis(&sys.vertex_tight_set(w)?, &edge_basis, k)?;
        walk.exchange_chain(&mut basis, &target_w, &mut record)?;
        if record.len() != 1 {
            return Err(Error::Internal(format!(
                "edge crossing took {} exchanges instead of one",
                record.len()
            )));
        }
        for b in record.drain(..) {
            states.push(b);
            state_vertex.push(w);
        }
        v = w;
    }

    let want_apex = k - d;
    let (state, &vertex_id) = states
        .iter()
        .zip(&state_vertex)
        .find(|(b, _)| walk.apex_count(b) == want_apex)
        .ok_or_else(|| Error::Internal("pivot path skipped the requested apex count".into()))?;

    let basis_apex = state.intersection(&spindle.apex_rows());
    let basis_origin = state.intersection(&spindle.origin_rows());
    let face_apex = sys.expand_face(&sys.face_from_tight(&basis_apex)?, d)?;
    let face_origin = sys.expand_face(&sys.face_from_tight(&basis_origin)?, k - d)?;
    Ok(FacePathResult {
        vertex: points[vertex_id].clone(),
        face_apex,
        face_origin,
        basis_origin,
        basis_apex,
    })
}

/// Vertex positions and dimension of a face, detached from the system
/// that produced it.
#[derive(Clone, Debug)]
pub struct FaceSnapshot {
    pub dim: usize,
    pub vertices: Vec<QVec>,
}

impl FaceSnapshot {
    fn capture(sys: &HPolyhedron, face: &Face) -> Result<Self> {
        let points = sys.vertex_points()?;
        Ok(FaceSnapshot {
            dim: face.dim,
            vertices: face.vertex_ids.iter().map(|&i| points[i].clone()).collect(),
        })
    }
}

/// One step of the telescoping walk.
#[derive(Clone, Debug)]
pub struct WalkStep {
    pub from: QVec,
    pub to: QVec,
    pub spindle_dim: usize,
    pub block: usize,
    pub face_apex: FaceSnapshot,
    pub face_origin: Option<FaceSnapshot>,
    /// Independent rows whose kernel is the span of `from - face_apex`.
    pub slice_rows: IndexSet,
    /// `alpha^T (from - to)`.
    pub step_term: Rat,
    /// `max alpha^T x` over the slice, i.e. the width `kappa_I * delta_I`.
    pub slice_bound: Rat,
}

/// Full trace of the walk from the objective-maximal vertex down to the
/// origin, with per-step certificates and the aggregate width bound.
#[derive(Clone, Debug)]
pub struct WalkTrace {
    pub alpha: IVec,
    pub d_seq: Vec<usize>,
    pub start: QVec,
    pub objective_at_start: Rat,
    pub ambient_rows: IndexSet,
    pub delta_ambient: Rat,
    /// Width bound per block dimension, in block order.
    pub kappa_blocks: Vec<Rat>,
    pub bound_total: Rat,
    pub steps: Vec<WalkStep>,
}

impl WalkTrace {
    /// The step terms sum exactly to the starting objective value.
    pub fn telescopes(&self) -> bool {
        let total: Rat = self.steps.iter().fold(Rat::zero(), |acc, s| acc + s.step_term.clone());
        total == self.objective_at_start
    }

    pub fn steps_within_slice_bounds(&self) -> bool {
        self.steps.iter().all(|s| s.step_term <= s.slice_bound)
    }

    /// Spindle dimension drops by at least the block size at every
    /// non-terminal step.
    pub fn dims_strictly_decrease(&self) -> bool {
        self.steps.windows(2).all(|w| w[1].spindle_dim + w[0].block <= w[0].spindle_dim)
    }

    /// The terminal block is at least as large as the final spindle.
    pub fn last_block_covers(&self) -> bool {
        self.steps.last().is_none_or(|s| s.block >= s.spindle_dim)
    }

    /// The walk uses at most one step per block.
    pub fn step_count_within_blocks(&self) -> bool {
        self.steps.len() <= self.d_seq.len().max(1)
    }

    pub fn within_bound(&self) -> bool {
        self.objective_at_start <= self.bound_total
    }

    pub fn all_certified(&self) -> bool {
        self.telescopes()
            && self.steps_within_slice_bounds()
            && self.dims_strictly_decrease()
            && self.last_block_covers()
            && self.step_count_within_blocks()
            && self.within_bound()
    }
}

/// Block sizes `(3, ..., 3, 2, ..., 2)` with as few twos as possible
/// summing to `d` (a single 1 when `d = 1`).
pub fn default_block_sizes(d: usize) -> Vec<usize> {
    match d {
        0 => Vec::new(),
        1 => vec![1],
        2 => vec![2],
        4 => vec![2, 2],
        _ => match d % 3 {
            0 => vec![3; d / 3],
            2 => {
                let mut v = vec![3; d / 3];
                v.push(2);
                v
            }
            _ => {
                let mut v = vec![3; (d - 4) / 3];
                v.extend([2, 2]);
                v
            }
        },
    }
}

/// Walk from the `alpha`-maximal vertex down to the origin through
/// spindle faces of the prescribed dimensions, certifying every step
/// against the matching slice width.
pub fn template_walk(
    norm: &NormalizedInstance,
    alpha: &[Int],
    d_seq: &[usize],
) -> Result<WalkTrace> {
    let a = norm.instance().a();
    let poly = norm.polyhedron();
    let n = a.cols();
    let dim_p = poly.dimension()?;
    let total: usize = d_seq.iter().sum();
    if total != dim_p || d_seq.iter().any(|&d| d == 0) {
        return Err(Error::InvalidParam(format!(
            "block sizes {d_seq:?} must be positive and sum to the polytope dimension {dim_p}"
        )));
    }

    let ambient_rows = rows_spanning_complement(a, &span_of_polytope(poly)?)?;
    let delta_ambient = delta_i(a, alpha, &ambient_rows)?;
    if delta_ambient.is_zero() {
        return Err(Error::DegenerateObjective);
    }
    let mut kappa_cache: BTreeMap<usize, Rat> = BTreeMap::new();
    for &d in d_seq {
        if let std::collections::btree_map::Entry::Vacant(e) = kappa_cache.entry(d) {
            e.insert(kappa_d(norm, alpha, d)?);
        }
    }
    let kappa_blocks: Vec<Rat> = d_seq.iter().map(|d| kappa_cache[d].clone()).collect();
    let bound_total = kappa_blocks
        .iter()
        .fold(Rat::zero(), |acc, k| acc + k.clone())
        * delta_ambient.clone();

    let alpha_rat = vecops::to_rat(alpha);
    let (objective_at_start, start_cert) = poly.lp_max(&alpha_rat)?;
    let start = start_cert.point;

    let mut steps: Vec<WalkStep> = Vec::new();
    let mut cur = start.clone();
    let mut i = 0usize;
    while !vecops::is_zero(&cur) {
        let spindle = build_spindle(a, &cur)?;
        let k_i = spindle.dim()?;
        let sys = spindle.system();
        let block = if i < d_seq.len() { d_seq[i] } else { k_i.max(1) };
        let (next, face_apex, face_origin) = if i < d_seq.len() && block < k_i {
            let (y, f, g) = lemma_step(&spindle, block, &alpha_rat)?;
            (y, f, Some(g))
        } else {
            // terminal step: the whole spindle is the face
            let whole = sys.face_from_tight(&IndexSet::empty())?;
            if whole.dim != k_i {
                return Err(Error::Internal("spindle face bookkeeping mismatch".into()));
            }
            (vecops::zeros::<Rat>(n), whole, None)
        };

        let apex_face_snapshot = FaceSnapshot::capture(sys, &face_apex)?;
        let origin_face_snapshot = face_origin
            .as_ref()
            .map(|g| FaceSnapshot::capture(sys, g))
            .transpose()?;

        // span of (apex - face), generated by the face's vertices
        let generators: Vec<QVec> = apex_face_snapshot
            .vertices
            .iter()
            .map(|v| vecops::sub(&cur, v))
            .collect();
        let slice_rows = rows_spanning_complement_of_generators(a, &generators, &ambient_rows)?;
        let slice = norm.slice_poly(&slice_rows)?;
        let (slice_bound, _) = slice.lp_max(&alpha_rat)?;
        let step_term = vecops::dot(&alpha_rat, &cur) - vecops::dot(&alpha_rat, &next);
        if step_term > slice_bound {
            return Err(Error::Internal("step term exceeds its slice width".into()));
        }

        steps.push(WalkStep {
            from: cur.clone(),
            to: next.clone(),
            spindle_dim: k_i,
            block,
            face_apex: apex_face_snapshot,
            face_origin: origin_face_snapshot,
            slice_rows,
            step_term,
            slice_bound,
        });
        cur = next;
        i += 1;
        if i > n + d_seq.len() + 1 {
            return Err(Error::Internal("walk failed to terminate".into()));
        }
    }

    Ok(WalkTrace {
        alpha: alpha.to_vec(),
        d_seq: d_seq.to_vec(),
        start,
        objective_at_start,
        ambient_rows,
        delta_ambient,
        kappa_blocks,
        bound_total,
        steps,
    })
}

/// One application of the complementary-face lemma inside the walk:
/// among all vertices lying on a face of dimension <= d through the apex
/// and a face of dimension <= k-d through the origin, take the one with
/// the largest objective (ties lexicographically smallest), then expand
/// the two faces to their exact dimensions.
fn lemma_step(spindle: &SpindleRep, d: usize, alpha_rat: &QVec) -> Result<(QVec, Face, Face)> {
    let sys = spindle.system();
    let k = spindle.dim()?;
    let points = sys.vertex_points()?;
    let n = sys.ambient_dim();
    let origin_id = sys
        .vertex_id_of(&vecops::zeros::<Rat>(n))?
        .ok_or_else(|| Error::Internal("origin is not a vertex".into()))?;
    let apex_id = sys
        .vertex_id_of(spindle.apex())?
        .ok_or_else(|| Error::Internal("apex is not a vertex".into()))?;

    let mut best: Option<usize> = None;
    for y in 0..points.len() {
        if sys.face_join(&[y, apex_id])?.dim > d {
            continue;
        }
        if sys.face_join(&[y, origin_id])?.dim > k - d {
            continue;
        }
        best = Some(match best {
            None => y,
            Some(b) => {
                let vy = vecops::dot(alpha_rat, &points[y]);
                let vb = vecops::dot(alpha_rat, &points[b]);
                if vy > vb
                    || (vy == vb
                        && vecops::lex_cmp(&points[y], &points[b]) == std::cmp::Ordering::Less)
                {
                    y
                } else {
                    b
                }
            }
        });
    }
    let y = best.ok_or_else(|| Error::Internal("no vertex between complementary faces".into()))?;
    let face_apex = sys.expand_face(&sys.face_join(&[y, apex_id])?, d)?;
    let face_origin = sys.expand_face(&sys.face_join(&[y, origin_id])?, k - d)?;
    Ok((points[y].clone(), face_apex, face_origin))
}

/// Linear span of a polytope containing the origin, generated by its
/// vertices.
fn span_of_polytope(poly: &HPolyhedron) -> Result<Vec<QVec>> {
    Ok(poly.vertex_points()?)
}

/// Independent rows of `a` vanishing on all `generators`, enough of them
/// that their kernel is exactly the span of the generators. `must_contain`
/// seeds the selection.
fn rows_spanning_complement_of_generators(
    a: &IMatrix,
    generators: &[QVec],
    must_contain: &IndexSet,
) -> Result<IndexSet> {
    let n = a.cols();
    let nonzero: Vec<QVec> = generators.iter().filter(|g| !vecops::is_zero(g)).cloned().collect();
    let span_dim = if nonzero.is_empty() { 0 } else { QMatrix::from_rows(nonzero).rank() };
    let want = n - span_dim;
    let vanishes = |row: usize| -> bool {
        let r = vecops::to_rat(&a.row_vec(row));
        generators.iter().all(|g| vecops::dot(&r, g).is_zero())
    };
    let mut chosen: Vec<usize> = must_contain.iter().collect();
    if chosen.iter().any(|&i| !vanishes(i)) {
        return Err(Error::Internal("prescribed rows do not vanish on the face span".into()));
    }
    if !chosen.is_empty() && a.select_rows(&chosen).rank() < chosen.len() {
        return Err(Error::Internal("prescribed rows are dependent".into()));
    }
    for i in 0..a.rows() {
        if chosen.len() == want {
            break;
        }
        if chosen.contains(&i) || !vanishes(i) {
            continue;
        }
        let mut candidate = chosen.clone();
        candidate.push(i);
        if a.select_rows(&candidate).rank() == candidate.len() {
            chosen = candidate;
        }
    }
    if chosen.len() != want {
        return Err(Error::Internal("no row subset spans the face complement".into()));
    }
    IndexSet::new(chosen, a.rows())
}

fn rows_spanning_complement(a: &IMatrix, span: &[QVec]) -> Result<IndexSet> {
    rows_spanning_complement_of_generators(a, span, &IndexSet::empty())
}

/// Primitive integer directions of the extreme rays of the sign cone,
/// enumerated through one-dimensional kernels of row subsets.
pub fn cone_rays(a: &IMatrix, apex: &QVec) -> Result<Vec<IVec>> {
    let (m, n) = (a.rows(), a.cols());
    if n == 0 {
        return Ok(Vec::new());
    }
    let signs = sign_vector(a, apex);
    let mut rays: std::collections::BTreeSet<IVec> = std::collections::BTreeSet::new();
    for i_set in IndexSet::subsets_of_size(m, n - 1) {
        let kernel = if n == 1 {
            vec![vec![Rat::one()]]
        } else {
            let sub = a.select_rows_set(&i_set).to_rat();
            if sub.rank() != n - 1 {
                continue;
            }
            sub.kernel_basis()
        };
        if kernel.len() != 1 {
            continue;
        }
        let dir = vecops::primitive_integer_direction(&kernel[0])
            .ok_or_else(|| Error::Internal("kernel vector is zero".into()))?;
        let dir_rat = vecops::to_rat(&dir);
        if in_sign_cone(a, &signs, &dir_rat) {
            rays.insert(dir);
        } else if in_sign_cone(a, &signs, &vecops::neg(&dir_rat)) {
            rays.insert(vecops::neg(&dir));
        }
    }
    Ok(rays.into_iter().collect())
}

use num_traits::One;

/// Is `r` a direction lying on an extreme ray of the sign cone of `apex`?
pub fn is_extreme_ray_direction(a: &IMatrix, apex: &QVec, r: &[Rat]) -> bool {
    if vecops::is_zero(r) {
        return false;
    }
    let signs = sign_vector(a, apex);
    if !in_sign_cone(a, &signs, r) {
        return false;
    }
    let vanishing: Vec<usize> = (0..a.rows())
        .filter(|&i| vecops::dot(&vecops::to_rat(&a.row_vec(i)), r).is_zero())
        .collect();
    a.select_rows(&vanishing).rank() >= a.cols() - 1
}

/// A decomposition of a lattice point as a nonnegative integer
/// combination of primitive auxiliary-lattice vectors on the extreme rays
/// of its sign cone, with the unit-step partial sums retained for
/// verification.
#[derive(Clone, Debug)]
pub struct RayDecomposition {
    /// Primitive ray representatives with their multiplicities.
    pub rays: Vec<(QVec, Int)>,
    /// Partial sums 0 = p_0, ..., p_N = x*, one primitive step at a time.
    pub unit_path: Vec<QVec>,
    pub total_multiplicity: Int,
    /// Indices of nonzero integral partial sums (empty whenever the
    /// surrounding instance has the origin as its only lattice point).
    pub integral_partial_sums: Vec<usize>,
}

/// Decompose `x*` in the auxiliary lattice of the factorization `A = TB`:
/// peel off a vertex adjacent to the origin of the current spindle,
/// record the primitive vector under it, and recurse on the remainder,
/// whose spindle has strictly smaller dimension.
pub fn ray_decomposition(
    a: &IMatrix,
    t: &IMatrix,
    b_factor: &IMatrix,
    x_star: &QVec,
) -> Result<RayDecomposition> {
    let n = a.cols();
    if b_factor.rows() != n || b_factor.cols() != n || b_factor.det()?.is_zero() {
        return Err(Error::HypothesisFailed("factor B must be square and invertible".into()));
    }
    if &t.matmul(b_factor) != a {
        return Err(Error::HypothesisFailed("A does not equal T * B".into()));
    }
    if !is_totally_unimodular(t) {
        return Err(Error::HypothesisFailed("factor T is not totally unimodular".into()));
    }
    let b_rat = b_factor.to_rat();
    let lattice_coords = |v: &QVec| -> Option<IVec> { vecops::to_int(&b_rat.mul_vec(v)) };
    if lattice_coords(x_star).is_none() {
        return Err(Error::HypothesisFailed("point is outside the auxiliary lattice".into()));
    }

    let mut rays: BTreeMap<QVec, Int> = BTreeMap::new();
    let mut unit_path: Vec<QVec> = vec![vecops::zeros::<Rat>(n)];
    let mut chunks: Vec<(QVec, Int)> = Vec::new();

    let mut cur = x_star.clone();
    let mut prev_dim: Option<usize> = None;
    while !vecops::is_zero(&cur) {
        let spindle = build_spindle(a, &cur)?;
        let k = spindle.dim()?;
        if let Some(p) = prev_dim {
            if k >= p {
                return Err(Error::Internal("spindle dimension failed to decrease".into()));
            }
        }
        prev_dim = Some(k);
        if k == 0 {
            return Err(Error::Internal("zero-dimensional spindle with nonzero point".into()));
        }
        let v = if k == 1 {
            cur.clone()
        } else {
            // vertex adjacent to the origin, other than the apex
            let sys = spindle.system();
            let points = sys.vertex_points()?;
            let origin_id = sys
                .vertex_id_of(&vecops::zeros::<Rat>(n))?
                .ok_or_else(|| Error::Internal("origin is not a vertex".into()))?;
            let mut pick: Option<&QVec> = None;
            for (w, point) in points.iter().enumerate() {
                if w == origin_id || point == &cur {
                    continue;
                }
                if sys.face_join(&[origin_id, w])?.dim != 1 {
                    continue;
                }
                pick = Some(match pick {
                    None => point,
                    Some(best) => {
                        if vecops::lex_cmp(point, best) == std::cmp::Ordering::Less {
                            point
                        } else {
                            best
                        }
                    }
                });
            }
            pick.ok_or_else(|| Error::Internal("no origin-adjacent vertex found".into()))?
                .clone()
        };
        let w = lattice_coords(&v).ok_or_else(|| {
            Error::HypothesisFailed("spindle vertex is outside the auxiliary lattice".into())
        })?;
        let g = vecops::gcd_all(&w);
        if g.is_zero() {
            return Err(Error::Internal("zero step in the decomposition".into()));
        }
        let ray: QVec = v.iter().map(|x| x / Rat::from_integer(g.clone())).collect();
        *rays.entry(ray.clone()).or_insert_with(Int::zero) += &g;
        chunks.push((ray, g));
        cur = vecops::sub(&cur, &v);
    }

    // unit-step path in recursion order
    for (ray, mult) in &chunks {
        let mut steps = Int::zero();
        while &steps < mult {
            let last = unit_path.last().expect("path starts at the origin").clone();
            unit_path.push(vecops::add(&last, ray));
            steps += Int::one();
        }
    }
    if unit_path.last() != Some(x_star) {
        return Err(Error::Internal("unit path does not end at the decomposed point".into()));
    }

    let spindle_full = build_spindle(a, x_star)?;
    for p in &unit_path {
        if !spindle_full.contains(p) {
            return Err(Error::Internal("partial sum escapes the spindle".into()));
        }
    }
    let mut sorted_path = unit_path.clone();
    sorted_path.sort_by(|x, y| vecops::lex_cmp(x, y));
    sorted_path.dedup();
    if sorted_path.len() != unit_path.len() {
        return Err(Error::Internal("partial sums are not pairwise distinct".into()));
    }
    let integral_partial_sums = unit_path
        .iter()
        .enumerate()
        .filter(|(_, p)| !vecops::is_zero(p) && vecops::is_integral(p))
        .map(|(i, _)| i)
        .collect();

    let total_multiplicity = rays.values().fold(Int::zero(), |acc, m| acc + m);
    Ok(RayDecomposition {
        rays: rays.into_iter().collect(),
        unit_path,
        total_multiplicity,
        integral_partial_sums,
    })
}
