//! Exact H-polyhedron operations: vertices, faces, dimension, lattice
//! points, linear optimization, and low-dimensional volumes.
//!
//! A system is `a_i^T x <= b_i` for rows outside `equality_rows` and
//! `a_i^T x = 0` for rows inside it (slices through the origin are encoded
//! by appending marked duplicate rows). The constraint matrix is integral;
//! right-hand sides may be rational. Everything below assumes the full row
//! system has rank n, so polyhedra are pointed or empty; all enumeration is
//! exhaustive over basis subsets and guarded by resource caps.

use std::cmp::Ordering;
use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::exactmath::{vecops, IndexSet};
use crate::{IMatrix, Int, QMatrix, QVec, Rat, Result};

/// Resource caps for exhaustive enumeration. Exceeding one is an error,
/// never a silent approximation.
#[derive(Clone, Copy, Debug)]
pub struct Caps {
    /// Largest admissible number of integer points in a scan box.
    pub box_points: u128,
    /// Largest admissible number of basis subsets in a vertex enumeration.
    pub basis_subsets: u128,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { box_points: 50_000_000, basis_subsets: 20_000_000 }
    }
}

/// A vertex together with a witnessing basis of n independent tight rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexCertificate {
    pub point: QVec,
    pub basis: IndexSet,
}

/// Exact length or area of a polytope of dimension <= 2. Lengths and areas
/// of embedded polytopes are generally irrational, so the squared value is
/// the primary result; `exact` is populated when the root is rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VolumeMeasure {
    Point,
    Segment { endpoints: (QVec, QVec), length_sq: Rat, length: Option<Rat> },
    Polygon { area_sq: Rat, area: Option<Rat> },
}

impl VolumeMeasure {
    pub fn squared(&self) -> Rat {
        match self {
            VolumeMeasure::Point => Rat::zero(),
            VolumeMeasure::Segment { length_sq, .. } => length_sq.clone(),
            VolumeMeasure::Polygon { area_sq, .. } => area_sq.clone(),
        }
    }
}

/// A face described by its tight inequality rows and its vertices
/// (indices into the owning polyhedron's vertex cache).
#[derive(Clone, Debug)]
pub struct Face {
    pub tight: IndexSet,
    pub vertex_ids: Vec<usize>,
    pub dim: usize,
}

#[derive(Debug)]
struct VertexData {
    certs: Vec<VertexCertificate>,
    /// Tight inequality rows per vertex (equality rows excluded).
    tight: Vec<IndexSet>,
}

#[derive(Clone, Debug)]
pub struct HPolyhedron {
    a: IMatrix,
    b: QVec,
    equality_rows: IndexSet,
    caps: Caps,
    verts: OnceLock<std::result::Result<std::sync::Arc<VertexData>, Error>>,
    rec_box: OnceLock<std::result::Result<Vec<QVec>, Error>>,
}

impl HPolyhedron {
    pub fn new(a: IMatrix, b: QVec) -> Result<Self> {
        Self::with_equalities(a, b, IndexSet::empty())
    }

    pub fn with_equalities(a: IMatrix, b: QVec, equality_rows: IndexSet) -> Result<Self> {
        if a.rows() != b.len() {
            return Err(Error::Dimension(format!(
                "{} rows vs {} right-hand sides",
                a.rows(),
                b.len()
            )));
        }
        if equality_rows.iter().any(|i| i >= a.rows()) {
            return Err(Error::OutOfRange("equality row index".into()));
        }
        if equality_rows.iter().any(|i| !b[i].is_zero()) {
            return Err(Error::InvalidParam(
                "equality rows carry right-hand side 0 by convention".into(),
            ));
        }
        Ok(HPolyhedron {
            a,
            b,
            equality_rows,
            caps: Caps::default(),
            verts: OnceLock::new(),
            rec_box: OnceLock::new(),
        })
    }

    pub fn from_i64(rows: &[&[i64]], rhs: &[i64]) -> Result<Self> {
        Self::new(IMatrix::from_i64_rows(rows), vecops::rat_from_i64(rhs))
    }

    pub fn with_caps(mut self, caps: Caps) -> Self {
        self.caps = caps;
        self.verts = OnceLock::new();
        self.rec_box = OnceLock::new();
        self
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    pub fn matrix(&self) -> &IMatrix {
        &self.a
    }

    pub fn rhs(&self) -> &QVec {
        &self.b
    }

    pub fn equality_rows(&self) -> &IndexSet {
        &self.equality_rows
    }

    pub fn ambient_dim(&self) -> usize {
        self.a.cols()
    }

    pub fn num_rows(&self) -> usize {
        self.a.rows()
    }

    /// Right-hand side actually enforced for a row (0 for equality rows).
    pub fn effective_rhs(&self, i: usize) -> Rat {
        if self.equality_rows.contains(i) {
            Rat::zero()
        } else {
            self.b[i].clone()
        }
    }

    /// Intersect with `ker A_I`: appends duplicates of the `I` rows marked
    /// as equalities, so the result is set-exact even when some `b_I` is
    /// negative (in which case it is simply empty).
    pub fn slice(&self, i_set: &IndexSet) -> Result<Self> {
        if i_set.iter().any(|i| i >= self.num_rows()) {
            return Err(Error::OutOfRange("slice row index".into()));
        }
        let mut a = self.a.clone();
        let mut b = self.b.clone();
        let mut eq = self.equality_rows.clone();
        for i in i_set.iter() {
            a = a.vstack(&IMatrix::from_row(self.a.row_vec(i)));
            b.push(Rat::zero());
            eq = eq.inserted(a.rows() - 1);
        }
        Ok(HPolyhedron {
            a,
            b,
            equality_rows: eq,
            caps: self.caps,
            verts: OnceLock::new(),
            rec_box: OnceLock::new(),
        })
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        debug_assert_eq!(x.len(), self.ambient_dim());
        (0..self.num_rows()).all(|i| {
            let lhs = vecops::dot(&self.a.row(i).iter().cloned().map(Rat::from_integer).collect::<Vec<_>>(), x);
            if self.equality_rows.contains(i) {
                lhs.is_zero()
            } else {
                lhs <= self.b[i]
            }
        })
    }

    /// Inequality rows tight at `x` (equality rows excluded).
    pub fn tight_inequalities(&self, x: &[Rat]) -> IndexSet {
        (0..self.num_rows())
            .filter(|&i| !self.equality_rows.contains(i))
            .filter(|&i| self.row_value(i, x) == self.b[i])
            .collect()
    }

    fn row_value(&self, i: usize, x: &[Rat]) -> Rat {
        self.a
            .row(i)
            .iter()
            .zip(x)
            .fold(Rat::zero(), |acc, (a, xi)| acc + Rat::from_integer(a.clone()) * xi.clone())
    }

    fn vertex_data(&self) -> Result<&VertexData> {
        let out = self.verts.get_or_init(|| self.compute_vertex_data().map(std::sync::Arc::new));
        match out {
            Ok(data) => Ok(data),
            Err(e) => Err(e.clone()),
        }
    }

    fn compute_vertex_data(&self) -> Result<VertexData> {
        let n = self.ambient_dim();
        if self.a.rank() < n {
            return Err(Error::NoVertex);
        }
        let eq_rows = self.equality_rows.as_slice();
        let a_eq = self.a.select_rows(eq_rows).to_rat();
        let kernel = if eq_rows.is_empty() {
            (0..n).map(|i| vecops::unit::<Rat>(n, i)).collect::<Vec<_>>()
        } else {
            a_eq.kernel_basis()
        };
        let d = kernel.len();
        // reduced inequality rows g_i = a_i^T V
        let ineq: Vec<usize> = (0..self.num_rows())
            .filter(|&i| !self.equality_rows.contains(i))
            .collect();
        let reduced: Vec<QVec> = ineq
            .iter()
            .map(|&i| {
                kernel
                    .iter()
                    .map(|v| self.row_value(i, v))
                    .collect::<QVec>()
            })
            .collect();

        let count = binomial(ineq.len() as u128, d as u128);
        if count > self.caps.basis_subsets {
            return Err(Error::ResourceCap {
                what: "basis subsets",
                cap: self.caps.basis_subsets,
                needed: count,
            });
        }

        let mut found: std::collections::BTreeMap<QVec, VertexCertificate> =
            std::collections::BTreeMap::new();
        let g = QMatrix::from_rows(reduced.clone());
        for subset in IndexSet::subsets_of_size(ineq.len(), d) {
            let rows: Vec<usize> = subset.iter().collect();
            let g_s = g.select_rows(&rows);
            let rhs: QVec = rows.iter().map(|&r| self.b[ineq[r]].clone()).collect();
            let z = match g_s.solve_square(&rhs)? {
                Some(z) => z,
                None => continue,
            };
            // map back to ambient coordinates
            let mut x = vecops::zeros::<Rat>(n);
            for (v, zi) in kernel.iter().zip(&z) {
                x = vecops::add(&x, &vecops::scale(v, zi));
            }
            if !self.contains(&x) {
                continue;
            }
            let basis: IndexSet = rows
                .iter()
                .map(|&r| ineq[r])
                .chain(self.independent_equality_rows(n - d))
                .collect();
            found.entry(x.clone()).or_insert(VertexCertificate { point: x, basis });
        }
        let certs: Vec<VertexCertificate> = found.into_values().collect();
        let tight = certs.iter().map(|c| self.tight_inequalities(&c.point)).collect();
        Ok(VertexData { certs, tight })
    }

    /// A maximal independent subset of the equality rows (size = their rank).
    fn independent_equality_rows(&self, want: usize) -> Vec<usize> {
        let mut chosen: Vec<usize> = Vec::new();
        for i in self.equality_rows.iter() {
            if chosen.len() == want {
                break;
            }
            let mut candidate = chosen.clone();
            candidate.push(i);
            if self.a.select_rows(&candidate).rank() == candidate.len() {
                chosen = candidate;
            }
        }
        chosen
    }

    /// All vertices, each with a witnessing basis. Empty for an empty
    /// polyhedron; `NoVertex` if the row system has rank below n.
    pub fn enumerate_vertices(&self) -> Result<Vec<VertexCertificate>> {
        Ok(self.vertex_data()?.certs.clone())
    }

    pub fn vertex_points(&self) -> Result<Vec<QVec>> {
        Ok(self.vertex_data()?.certs.iter().map(|c| c.point.clone()).collect())
    }

    pub fn is_empty_polytope(&self) -> Result<bool> {
        Ok(self.vertex_data()?.certs.is_empty())
    }

    /// Vertices of the recession cone clipped to the unit box; used for
    /// boundedness queries.
    fn recession_box_vertices(&self) -> Result<&[QVec]> {
        let out = self.rec_box.get_or_init(|| {
            let n = self.ambient_dim();
            let mut rows = self.a.clone();
            let mut rhs: QVec = (0..self.num_rows()).map(|_| Rat::zero()).collect();
            for i in 0..n {
                let mut pos = vecops::zeros::<Int>(n);
                pos[i] = Int::from(1);
                rows = rows.vstack(&IMatrix::from_row(pos.clone()));
                rhs.push(Rat::one());
                rows = rows.vstack(&IMatrix::from_row(vecops::neg(&pos)));
                rhs.push(Rat::one());
            }
            let cone = HPolyhedron {
                a: rows,
                b: rhs,
                equality_rows: self.equality_rows.clone(),
                caps: self.caps,
                verts: OnceLock::new(),
                rec_box: OnceLock::new(),
            };
            cone.vertex_points()
        });
        match out {
            Ok(v) => Ok(v),
            Err(e) => Err(e.clone()),
        }
    }

    /// Is `max obj^T x` finite over the polyhedron?
    pub fn direction_bounded(&self, obj: &[Rat]) -> Result<bool> {
        let rec = self.recession_box_vertices()?;
        Ok(rec.iter().all(|r| vecops::dot(obj, r) <= Rat::zero()))
    }

    pub fn is_bounded(&self) -> Result<bool> {
        let rec = self.recession_box_vertices()?;
        Ok(rec.iter().all(|r| vecops::is_zero(r)))
    }

    /// Exact maximum of a linear objective, with an optimal vertex.
    /// Ties are broken toward the lexicographically smallest point.
    pub fn lp_max(&self, obj: &[Rat]) -> Result<(Rat, VertexCertificate)> {
        let data = self.vertex_data()?;
        if data.certs.is_empty() {
            return Err(Error::Infeasible);
        }
        if !self.direction_bounded(obj)? {
            return Err(Error::Unbounded);
        }
        let mut best: Option<(Rat, &VertexCertificate)> = None;
        for cert in &data.certs {
            let v = vecops::dot(obj, &cert.point);
            best = match best {
                None => Some((v, cert)),
                Some((bv, bc)) => {
                    if v > bv || (v == bv && vecops::lex_cmp(&cert.point, &bc.point) == Ordering::Less)
                    {
                        Some((v, cert))
                    } else {
                        Some((bv, bc))
                    }
                }
            };
        }
        let (value, cert) = best.expect("nonempty vertex list");
        Ok((value, cert.clone()))
    }

    /// All vertices attaining the maximum of `obj`.
    pub fn optimal_vertices(&self, obj: &[Rat]) -> Result<Vec<VertexCertificate>> {
        let (value, _) = self.lp_max(obj)?;
        let data = self.vertex_data()?;
        Ok(data
            .certs
            .iter()
            .filter(|c| vecops::dot(obj, &c.point) == value)
            .cloned()
            .collect())
    }

    /// Componentwise integer bounding box of the vertex hull. Errors when
    /// the polyhedron is empty or unbounded, since the box would then not
    /// contain all integer points.
    pub fn bounding_box(&self) -> Result<Vec<(Int, Int)>> {
        if !self.is_bounded()? {
            return Err(Error::Unbounded);
        }
        let pts = self.vertex_points()?;
        if pts.is_empty() {
            return Err(Error::EmptyPolyhedron);
        }
        let n = self.ambient_dim();
        Ok((0..n)
            .map(|j| {
                let lo = pts.iter().map(|p| p[j].clone()).min().expect("nonempty");
                let hi = pts.iter().map(|p| p[j].clone()).max().expect("nonempty");
                (lo.floor().to_integer(), hi.ceil().to_integer())
            })
            .collect())
    }

    /// All integer points of the polyhedron inside `bounds`, by exhaustive
    /// scan with sound partial-sum pruning. The caller must supply bounds
    /// that contain every integer point of the polyhedron.
    pub fn lattice_points(&self, bounds: &[(Int, Int)]) -> Result<Vec<Vec<Int>>> {
        let n = self.ambient_dim();
        assert_eq!(bounds.len(), n, "bounds per coordinate");
        let mut volume: u128 = 1;
        for (lo, hi) in bounds {
            if hi < lo {
                return Ok(Vec::new());
            }
            let width = (hi - lo) + Int::from(1);
            let w: u128 = u128::try_from(&width).map_err(|_| Error::ResourceCap {
                what: "lattice scan box",
                cap: self.caps.box_points,
                needed: u128::MAX,
            })?;
            volume = volume.saturating_mul(w);
        }
        if volume > self.caps.box_points {
            return Err(Error::ResourceCap {
                what: "lattice scan box",
                cap: self.caps.box_points,
                needed: volume,
            });
        }

        // integer-scaled rows: q_i * a_i^T x <= p_i  (or = 0 for equalities)
        struct ScanRow {
            coef: Vec<Int>,
            rhs: Int,
            eq: bool,
            // suffix_lo[j] / suffix_hi[j]: extreme contribution of x_j..x_{n-1}
            suffix_lo: Vec<Int>,
            suffix_hi: Vec<Int>,
        }
        let mut rows = Vec::with_capacity(self.num_rows());
        for i in 0..self.num_rows() {
            let eq = self.equality_rows.contains(i);
            let rhs_rat = self.effective_rhs(i);
            let den = rhs_rat.denom().clone();
            let coef: Vec<Int> = self.a.row(i).iter().map(|a| a * &den).collect();
            let rhs = rhs_rat.numer().clone();
            let mut suffix_lo = vec![Int::zero(); n + 1];
            let mut suffix_hi = vec![Int::zero(); n + 1];
            for j in (0..n).rev() {
                let c_lo = &coef[j] * &bounds[j].0;
                let c_hi = &coef[j] * &bounds[j].1;
                let (lo, hi) = if c_lo <= c_hi { (c_lo, c_hi) } else { (c_hi, c_lo) };
                suffix_lo[j] = &suffix_lo[j + 1] + lo;
                suffix_hi[j] = &suffix_hi[j + 1] + hi;
            }
            rows.push(ScanRow { coef, rhs, eq, suffix_lo, suffix_hi });
        }

        fn feasible_prefix(rows: &[ScanRow], partial: &[Int], level: usize) -> bool {
            rows.iter().zip(partial).all(|(row, sum)| {
                let min_rest = &row.suffix_lo[level];
                let max_rest = &row.suffix_hi[level];
                if row.eq {
                    // 0 must stay reachable: sum + [min_rest, max_rest] ∋ 0
                    sum + min_rest <= Int::zero() && sum + max_rest >= Int::zero()
                } else {
                    sum + min_rest <= row.rhs
                }
            })
        }

        let mut out = Vec::new();
        let mut point = vec![Int::zero(); n];
        let mut sums: Vec<Vec<Int>> = vec![vec![Int::zero(); rows.len()]];
        fn descend(
            rows: &[ScanRow],
            bounds: &[(Int, Int)],
            level: usize,
            point: &mut Vec<Int>,
            sums: &mut Vec<Vec<Int>>,
            out: &mut Vec<Vec<Int>>,
        ) {
            let n = bounds.len();
            if level == n {
                let sum = sums.last().expect("sum stack");
                let ok = rows.iter().zip(sum).all(|(row, s)| {
                    if row.eq {
                        s.is_zero()
                    } else {
                        *s <= row.rhs
                    }
                });
                if ok {
                    out.push(point.clone());
                }
                return;
            }
            let (lo, hi) = (&bounds[level].0, &bounds[level].1);
            let mut v = lo.clone();
            while &v <= hi {
                let prev = sums.last().expect("sum stack").clone();
                let next: Vec<Int> = rows
                    .iter()
                    .zip(&prev)
                    .map(|(row, s)| s + &row.coef[level] * &v)
                    .collect();
                if feasible_prefix(rows, &next, level + 1) {
                    point[level] = v.clone();
                    sums.push(next);
                    descend(rows, bounds, level + 1, point, sums, out);
                    sums.pop();
                }
                v += Int::from(1);
            }
        }
        descend(&rows, bounds, 0, &mut point, &mut sums, &mut out);
        out.sort();
        Ok(out)
    }

    /// Lattice points using the vertex bounding box; requires boundedness.
    pub fn lattice_points_auto(&self) -> Result<Vec<Vec<Int>>> {
        match self.bounding_box() {
            Ok(bounds) => self.lattice_points(&bounds),
            Err(Error::EmptyPolyhedron) => Ok(Vec::new()),
            Err(e) => Err(e),
        }
    }

    /// Affine dimension. Exact also for unbounded pointed polyhedra: the
    /// span of the recession cone is added to the span of the vertices.
    pub fn dimension(&self) -> Result<usize> {
        let pts = self.vertex_points()?;
        if pts.is_empty() {
            return Err(Error::EmptyPolyhedron);
        }
        let rec = self.recession_box_vertices()?;
        let base = &pts[0];
        let mut rows: Vec<QVec> = pts[1..].iter().map(|p| vecops::sub(p, base)).collect();
        rows.extend(rec.iter().filter(|r| !vecops::is_zero(r)).cloned());
        if rows.is_empty() {
            return Ok(0);
        }
        Ok(QMatrix::from_rows(rows).rank())
    }

    /// Do `u` and `v` lie on a common facet? True iff some facet-defining
    /// row is tight at both. Requires a bounded full-dimensional polytope.
    pub fn shares_facet(&self, u: &[Rat], v: &[Rat]) -> Result<bool> {
        if !self.contains(u) || !self.contains(v) {
            return Err(Error::PointOutside);
        }
        let n = self.ambient_dim();
        if self.dimension()? != n {
            return Err(Error::HypothesisFailed("shares_facet needs a full-dimensional polytope".into()));
        }
        let common = self.tight_inequalities(u).intersection(&self.tight_inequalities(v));
        for i in common.iter() {
            if self.face_dim_of_row(i)? == Some(n - 1) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Affine dimension of the face where row `i` is tight (None if empty).
    fn face_dim_of_row(&self, i: usize) -> Result<Option<usize>> {
        let data = self.vertex_data()?;
        let on_face: Vec<&QVec> = data
            .certs
            .iter()
            .zip(&data.tight)
            .filter(|(_, t)| t.contains(i))
            .map(|(c, _)| &c.point)
            .collect();
        Ok(affine_dim(&on_face))
    }

    // ---- face machinery (bounded polytopes) ----

    /// Face generated by a set of tight inequality rows: all vertices on
    /// which every row of `tight` is tight, with the tight set closed.
    pub fn face_from_tight(&self, tight: &IndexSet) -> Result<Face> {
        let data = self.vertex_data()?;
        let vertex_ids: Vec<usize> = (0..data.certs.len())
            .filter(|&vi| tight.is_subset_of(&data.tight[vi]))
            .collect();
        self.face_from_vertex_ids(vertex_ids)
    }

    /// Smallest face containing the given vertices.
    pub fn face_join(&self, vertex_ids: &[usize]) -> Result<Face> {
        let data = self.vertex_data()?;
        if vertex_ids.is_empty() {
            return Err(Error::InvalidParam("face join of no vertices".into()));
        }
        let mut tight = data.tight[vertex_ids[0]].clone();
        for &vi in &vertex_ids[1..] {
            tight = tight.intersection(&data.tight[vi]);
        }
        self.face_from_tight(&tight)
    }

    fn face_from_vertex_ids(&self, vertex_ids: Vec<usize>) -> Result<Face> {
        let data = self.vertex_data()?;
        if vertex_ids.is_empty() {
            return Err(Error::EmptyPolyhedron);
        }
        let mut closed = data.tight[vertex_ids[0]].clone();
        for &vi in &vertex_ids[1..] {
            closed = closed.intersection(&data.tight[vi]);
        }
        let pts: Vec<&QVec> = vertex_ids.iter().map(|&vi| &data.certs[vi].point).collect();
        let dim = affine_dim(&pts).expect("nonempty");
        Ok(Face { tight: closed, vertex_ids, dim })
    }

    /// Grow a face to one of exactly `target` dimensions containing it.
    /// The face lattice of a polytope is graded, so one vertex at a time
    /// suffices.
    pub fn expand_face(&self, face: &Face, target: usize) -> Result<Face> {
        let data = self.vertex_data()?;
        let mut current = face.clone();
        while current.dim < target {
            let mut grown = None;
            for vi in 0..data.certs.len() {
                if current.vertex_ids.contains(&vi) {
                    continue;
                }
                let mut ids = current.vertex_ids.clone();
                ids.push(vi);
                let candidate = self.face_join(&ids)?;
                if candidate.dim == current.dim + 1 {
                    grown = Some(candidate);
                    break;
                }
            }
            current = grown.ok_or_else(|| {
                Error::Internal(format!("no cover face above dimension {}", current.dim))
            })?;
        }
        if current.dim != target {
            return Err(Error::Internal("face expansion overshot".into()));
        }
        Ok(current)
    }

    pub fn vertex_id_of(&self, point: &[Rat]) -> Result<Option<usize>> {
        let data = self.vertex_data()?;
        Ok(data.certs.iter().position(|c| c.point == point))
    }

    pub fn vertex_tight_set(&self, id: usize) -> Result<IndexSet> {
        Ok(self.vertex_data()?.tight[id].clone())
    }

    // ---- volumes and polars (dimension <= 2) ----

    /// Exact measure of a polytope of dimension <= 2 in any ambient
    /// dimension. Areas of embedded polygons are computed as a shoelace sum
    /// in plane coordinates times the Gram volume factor of the plane basis.
    pub fn volume_low_dim(&self) -> Result<VolumeMeasure> {
        if !self.is_bounded()? {
            return Err(Error::Unbounded);
        }
        let pts = self.vertex_points()?;
        if pts.is_empty() {
            return Err(Error::EmptyPolyhedron);
        }
        let refs: Vec<&QVec> = pts.iter().collect();
        let dim = affine_dim(&refs).expect("nonempty");
        match dim {
            0 => Ok(VolumeMeasure::Point),
            1 => {
                // endpoints are the lexicographic extremes along the segment
                let lo = pts.iter().min_by(|a, b| vecops::lex_cmp(a, b)).expect("nonempty").clone();
                let hi = pts.iter().max_by(|a, b| vecops::lex_cmp(a, b)).expect("nonempty").clone();
                let diff = vecops::sub(&hi, &lo);
                let length_sq = vecops::norm_sq(&diff);
                let length = rat_sqrt(&length_sq);
                Ok(VolumeMeasure::Segment { endpoints: (lo, hi), length_sq, length })
            }
            2 => {
                let base = pts[0].clone();
                let u = vecops::sub(&pts[1], &base);
                let w = pts[2..]
                    .iter()
                    .map(|p| vecops::sub(p, &base))
                    .find(|w| {
                        QMatrix::from_rows(vec![u.clone(), w.clone()]).rank() == 2
                    })
                    .ok_or_else(|| Error::Internal("flat polygon".into()))?;
                let coords = plane_coordinates(&base, &u, &w, &pts)?;
                let hull = hull_2d(&coords);
                let shoelace = shoelace_area(&hull);
                let gram = vecops::norm_sq(&u) * vecops::norm_sq(&w)
                    - vecops::dot(&u, &w) * vecops::dot(&u, &w);
                let area_sq = shoelace.clone() * shoelace * gram;
                let area = rat_sqrt(&area_sq);
                Ok(VolumeMeasure::Polygon { area_sq, area })
            }
            d => Err(Error::OutOfRange(format!("volume of a {d}-dimensional polytope"))),
        }
    }

    /// Vertices of the polar polygon of a bounded full-dimensional planar
    /// polytope with 0 strictly interior; one dual vertex per facet, in
    /// hull order.
    pub fn polar_2d(&self) -> Result<Vec<QVec>> {
        if self.ambient_dim() != 2 {
            return Err(Error::Dimension("polar_2d needs ambient dimension 2".into()));
        }
        if !self.is_bounded()? {
            return Err(Error::Unbounded);
        }
        let pts = self.vertex_points()?;
        if pts.is_empty() {
            return Err(Error::EmptyPolyhedron);
        }
        let refs: Vec<&QVec> = pts.iter().collect();
        if affine_dim(&refs) != Some(2) {
            return Err(Error::ZeroNotInterior);
        }
        let origin = vecops::zeros::<Rat>(2);
        let hull = hull_2d(&pts);
        let mut polar = Vec::with_capacity(hull.len());
        for k in 0..hull.len() {
            let p = &hull[k];
            let q = &hull[(k + 1) % hull.len()];
            let e = vecops::sub(q, p);
            // outward normal of a counterclockwise hull edge
            let g = vec![e[1].clone(), -e[0].clone()];
            let h = vecops::dot(&g, p);
            if h <= vecops::dot(&g, &origin) {
                return Err(Error::ZeroNotInterior);
            }
            polar.push(vec![g[0].clone() / h.clone(), g[1].clone() / h]);
        }
        Ok(polar)
    }

    /// Exact area of a bounded full-dimensional planar polytope.
    pub fn area_2d(&self) -> Result<Rat> {
        if self.ambient_dim() != 2 {
            return Err(Error::Dimension("area_2d needs ambient dimension 2".into()));
        }
        let pts = self.vertex_points()?;
        if pts.is_empty() {
            return Err(Error::EmptyPolyhedron);
        }
        Ok(shoelace_area(&hull_2d(&pts)))
    }

    /// H-representation of the convex hull of planar points (hull must be
    /// full-dimensional). Rows are primitive integer normals.
    pub fn from_points_2d(points: &[QVec]) -> Result<Self> {
        let hull = hull_2d(points);
        if hull.len() < 3 {
            return Err(Error::HypothesisFailed("hull is not full-dimensional".into()));
        }
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for k in 0..hull.len() {
            let p = &hull[k];
            let q = &hull[(k + 1) % hull.len()];
            let e = vecops::sub(q, p);
            let g = vec![e[1].clone(), -e[0].clone()];
            let gi = vecops::primitive_integer_direction(&g)
                .ok_or_else(|| Error::Internal("degenerate hull edge".into()))?;
            let h = vecops::dot(&vecops::to_rat(&gi), p);
            rows.push(gi);
            rhs.push(h);
        }
        Self::new(IMatrix::from_rows(rows), rhs)
    }
}

/// Affine dimension of a point set (None when empty).
pub fn affine_dim(pts: &[&QVec]) -> Option<usize> {
    let base = pts.first()?;
    if pts.len() == 1 {
        return Some(0);
    }
    let rows: Vec<QVec> = pts[1..].iter().map(|p| vecops::sub(p, base)).collect();
    Some(QMatrix::from_rows(rows).rank())
}

/// Rational square root when it exists.
pub fn rat_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let ns = x.numer().sqrt();
    let ds = x.denom().sqrt();
    (&ns * &ns == *x.numer() && &ds * &ds == *x.denom()).then(|| Rat::new(ns, ds))
}

/// Convex hull of planar points in counterclockwise order, strict turns
/// only (monotone chain).
pub fn hull_2d(points: &[QVec]) -> Vec<QVec> {
    let mut pts: Vec<QVec> = points.to_vec();
    pts.sort_by(|a, b| vecops::lex_cmp(a, b));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: &QVec, a: &QVec, b: &QVec| -> Rat {
        (a[0].clone() - o[0].clone()) * (b[1].clone() - o[1].clone())
            - (a[1].clone() - o[1].clone()) * (b[0].clone() - o[0].clone())
    };
    let mut lower: Vec<QVec> = Vec::new();
    for p in &pts {
        while lower.len() >= 2
            && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= Rat::zero()
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<QVec> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= Rat::zero()
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Signed shoelace area of a counterclockwise-ordered polygon, made
/// nonnegative.
fn shoelace_area(hull: &[QVec]) -> Rat {
    let mut twice = Rat::zero();
    for k in 0..hull.len() {
        let p = &hull[k];
        let q = &hull[(k + 1) % hull.len()];
        twice = twice + (p[0].clone() * q[1].clone() - q[0].clone() * p[1].clone());
    }
    (twice / Rat::from_integer(Int::from(2))).abs()
}

fn plane_coordinates(base: &QVec, u: &QVec, w: &QVec, pts: &[QVec]) -> Result<Vec<QVec>> {
    let n = base.len();
    // find coordinate pair where [u w] is invertible
    let mut pivot = None;
    'outer: for p in 0..n {
        for q in p + 1..n {
            let det = u[p].clone() * w[q].clone() - u[q].clone() * w[p].clone();
            if !det.is_zero() {
                pivot = Some((p, q, det));
                break 'outer;
            }
        }
    }
    let (p, q, det) = pivot.ok_or_else(|| Error::Internal("dependent plane basis".into()))?;
    Ok(pts
        .iter()
        .map(|x| {
            let dp = x[p].clone() - base[p].clone();
            let dq = x[q].clone() - base[q].clone();
            let s = (dp.clone() * w[q].clone() - dq.clone() * w[p].clone()) / det.clone();
            let t = (u[p].clone() * dq - u[q].clone() * dp) / det.clone();
            vec![s, t]
        })
        .collect())
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::vecops::{rat_from_i64, to_int};

    fn unit_square() -> HPolyhedron {
        HPolyhedron::from_i64(&[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[1, 1, 0, 0]).unwrap()
    }

    #[test]
    fn unit_square_has_four_vertices() {
        let verts = unit_square().enumerate_vertices().unwrap();
        assert_eq!(verts.len(), 4);
        for cert in &verts {
            let p = unit_square();
            assert!(p.contains(&cert.point));
            // basis rows are tight and independent
            let sub = p.matrix().select_rows_set(&cert.basis);
            assert_eq!(sub.rank(), 2);
            for i in cert.basis.iter() {
                assert_eq!(p.row_value(i, &cert.point), p.effective_rhs(i));
            }
        }
    }

    #[test]
    fn parallelepiped_vertices_include_fractional_corner() {
        // 0 <= Bx <= (1,1) for B = [[1,0],[2,3]]
        let p = HPolyhedron::from_i64(
            &[&[1, 0], &[2, 3], &[-1, 0], &[-2, -3]],
            &[1, 1, 0, 0],
        )
        .unwrap();
        let verts = p.vertex_points().unwrap();
        assert_eq!(verts.len(), 4);
        let target = vec![
            Rat::from_integer(Int::from(1)),
            Rat::new(Int::from(-1), Int::from(3)),
        ];
        assert!(verts.contains(&target));
    }

    #[test]
    fn empty_system_has_no_vertices() {
        let p = HPolyhedron::from_i64(&[&[1], &[-1]], &[-1, 0]).unwrap();
        assert!(p.enumerate_vertices().unwrap().is_empty());
        assert!(p.is_empty_polytope().unwrap());
    }

    #[test]
    fn rank_deficient_system_reports_no_vertex() {
        let p = HPolyhedron::from_i64(&[&[1, 0], &[-1, 0]], &[1, 1]).unwrap();
        assert_eq!(p.enumerate_vertices(), Err(Error::NoVertex));
    }

    #[test]
    fn lp_on_unit_square() {
        let p = unit_square();
        let (v, cert) = p.lp_max(&rat_from_i64(&[1, 1])).unwrap();
        assert_eq!(v, Rat::from_integer(Int::from(2)));
        assert_eq!(cert.point, rat_from_i64(&[1, 1]));
    }

    #[test]
    fn lp_breaks_ties_lexicographically() {
        let p = unit_square();
        let (v, cert) = p.lp_max(&rat_from_i64(&[1, 0])).unwrap();
        assert_eq!(v, Rat::one());
        assert_eq!(cert.point, rat_from_i64(&[1, 0]));
    }

    #[test]
    fn lp_detects_unbounded_and_infeasible() {
        let p = HPolyhedron::from_i64(&[&[-1, 0], &[0, -1], &[0, 1]], &[0, 0, 1]).unwrap();
        assert_eq!(p.lp_max(&rat_from_i64(&[1, 0])), Err(Error::Unbounded));
        assert!(p.lp_max(&rat_from_i64(&[-1, -1])).is_ok());
        let empty = HPolyhedron::from_i64(&[&[1], &[-1]], &[-1, 0]).unwrap();
        assert_eq!(empty.lp_max(&rat_from_i64(&[1])), Err(Error::Infeasible));
    }

    #[test]
    fn lp_over_slice_optimizes_the_facet() {
        // slice of the parallelepiped along its second row
        let p = HPolyhedron::from_i64(
            &[&[1, 0], &[2, 3], &[-1, 0], &[-2, -3]],
            &[1, 1, 0, 0],
        )
        .unwrap();
        let sliced = p.slice(&IndexSet::singleton(1)).unwrap();
        let (v, cert) = sliced.lp_max(&rat_from_i64(&[1, 0])).unwrap();
        assert_eq!(v, Rat::one());
        // on the slice 2x + 3y = 0, so the optimum is (1, -2/3)
        assert_eq!(cert.point[1], Rat::new(Int::from(-2), Int::from(3)));
    }

    #[test]
    fn lattice_points_unit_square() {
        let p = unit_square();
        let pts = p.lattice_points_auto().unwrap();
        assert_eq!(pts.len(), 4);
        assert!(pts.contains(&vec![Int::zero(), Int::zero()]));
        assert!(pts.contains(&vec![Int::from(1), Int::from(1)]));
    }

    #[test]
    fn lattice_points_respect_membership() {
        let p = HPolyhedron::from_i64(
            &[&[1, 0], &[2, 3], &[-1, 0], &[-2, -3]],
            &[1, 1, 0, 0],
        )
        .unwrap();
        let pts = p.lattice_points_auto().unwrap();
        assert_eq!(pts.len(), 1, "only the origin fits");
        for z in &pts {
            assert!(p.contains(&vecops::to_rat(z)));
        }
    }

    #[test]
    fn lattice_scan_cap_is_enforced() {
        let p = unit_square().with_caps(Caps { box_points: 2, basis_subsets: 1000 });
        let bounds = vec![(Int::zero(), Int::from(1)), (Int::zero(), Int::from(1))];
        assert!(matches!(p.lattice_points(&bounds), Err(Error::ResourceCap { .. })));
    }

    #[test]
    fn dimensions() {
        assert_eq!(unit_square().dimension().unwrap(), 2);
        let sliced = unit_square().slice(&IndexSet::singleton(2)).unwrap();
        assert_eq!(sliced.dimension().unwrap(), 1);
        let point = HPolyhedron::from_i64(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]], &[0, 0, 0, 0])
            .unwrap();
        assert_eq!(point.dimension().unwrap(), 0);
    }

    #[test]
    fn shares_facet_on_unit_square() {
        let p = unit_square();
        let a = rat_from_i64(&[0, 0]);
        let b = rat_from_i64(&[0, 1]);
        let c = rat_from_i64(&[1, 1]);
        assert!(p.shares_facet(&a, &b).unwrap());
        assert!(!p.shares_facet(&a, &c).unwrap());
        let outside = rat_from_i64(&[5, 5]);
        assert_eq!(p.shares_facet(&a, &outside), Err(Error::PointOutside));
    }

    #[test]
    fn segment_volume_with_endpoints() {
        let p = HPolyhedron::from_i64(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]], &[1, 1, 0, 0])
            .unwrap();
        match p.volume_low_dim().unwrap() {
            VolumeMeasure::Segment { endpoints, length_sq, length } => {
                assert_eq!(length_sq, Rat::from_integer(Int::from(4)));
                assert_eq!(length, Some(Rat::from_integer(Int::from(2))));
                assert_eq!(to_int(&endpoints.0).unwrap(), vecops::from_i64(&[-1, 0]));
                assert_eq!(to_int(&endpoints.1).unwrap(), vecops::from_i64(&[1, 0]));
            }
            other => panic!("expected segment, got {other:?}"),
        }
    }

    #[test]
    fn unit_square_area_is_one() {
        match unit_square().volume_low_dim().unwrap() {
            VolumeMeasure::Polygon { area_sq, area } => {
                assert_eq!(area_sq, Rat::one());
                assert_eq!(area, Some(Rat::one()));
            }
            other => panic!("expected polygon, got {other:?}"),
        }
    }

    #[test]
    fn embedded_triangle_area_squared() {
        // triangle conv{(0,0,0),(1,0,0),(0,1,1)} in the plane y = z:
        // area = sqrt(2)/2, so squared area = 1/2
        let p = HPolyhedron::with_equalities(
            IMatrix::from_i64_rows(&[&[0, 1, -1], &[-1, 0, 0], &[0, -1, 0], &[1, 1, 0]]),
            rat_from_i64(&[0, 0, 0, 1]),
            IndexSet::singleton(0),
        )
        .unwrap();
        match p.volume_low_dim().unwrap() {
            VolumeMeasure::Polygon { area_sq, area } => {
                assert_eq!(area_sq, Rat::new(Int::from(1), Int::from(2)));
                assert_eq!(area, None);
            }
            other => panic!("expected polygon, got {other:?}"),
        }
    }

    #[test]
    fn polar_of_symmetric_boxes() {
        let big = HPolyhedron::from_i64(&[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[1, 1, 1, 1])
            .unwrap();
        let mut polar = big.polar_2d().unwrap();
        polar.sort_by(|a, b| vecops::lex_cmp(a, b));
        let expected: Vec<QVec> = vec![
            rat_from_i64(&[-1, 0]),
            rat_from_i64(&[0, -1]),
            rat_from_i64(&[0, 1]),
            rat_from_i64(&[1, 0]),
        ];
        assert_eq!(polar, expected);

        let scaled = HPolyhedron::from_i64(&[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[2, 2, 2, 2])
            .unwrap();
        let polar = scaled.polar_2d().unwrap();
        let half = Rat::new(Int::from(1), Int::from(2));
        assert!(polar.iter().any(|v| v[0] == half && v[1].is_zero()));
    }

    #[test]
    fn polar_requires_interior_origin() {
        let shifted =
            HPolyhedron::from_i64(&[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[1, 1, 0, 1]).unwrap();
        // origin on the boundary (x >= 0 tight)
        assert_eq!(shifted.polar_2d(), Err(Error::ZeroNotInterior));
    }

    #[test]
    fn mahler_product_on_boxes() {
        let q = HPolyhedron::from_i64(&[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[1, 1, 1, 1])
            .unwrap();
        let polar = HPolyhedron::from_points_2d(&q.polar_2d().unwrap()).unwrap();
        let product = q.area_2d().unwrap() * polar.area_2d().unwrap();
        assert_eq!(product, Rat::from_integer(Int::from(8)));
    }

    #[test]
    fn face_machinery_on_the_square() {
        let p = unit_square();
        let verts = p.vertex_points().unwrap();
        let origin = p.vertex_id_of(&rat_from_i64(&[0, 0])).unwrap().unwrap();
        let corner = p.vertex_id_of(&rat_from_i64(&[1, 1])).unwrap().unwrap();
        assert_eq!(verts.len(), 4);
        let edge = p.face_join(&[origin, p.vertex_id_of(&rat_from_i64(&[0, 1])).unwrap().unwrap()]).unwrap();
        assert_eq!(edge.dim, 1);
        let all = p.face_join(&[origin, corner]).unwrap();
        assert_eq!(all.dim, 2);
        let vertex_face = p.face_join(&[origin]).unwrap();
        assert_eq!(vertex_face.dim, 0);
        let grown = p.expand_face(&vertex_face, 1).unwrap();
        assert_eq!(grown.dim, 1);
        assert!(grown.vertex_ids.contains(&origin));
    }

    #[test]
    fn hull_is_counterclockwise_and_strict() {
        let pts = vec![
            rat_from_i64(&[0, 0]),
            rat_from_i64(&[2, 0]),
            rat_from_i64(&[1, 0]), // interior of an edge
            rat_from_i64(&[2, 2]),
            rat_from_i64(&[0, 2]),
            rat_from_i64(&[1, 1]), // interior
        ];
        let hull = hull_2d(&pts);
        assert_eq!(hull.len(), 4);
        assert_eq!(shoelace_area(&hull), Rat::from_integer(Int::from(4)));
    }

    #[test]
    fn rat_sqrt_detects_squares() {
        assert_eq!(rat_sqrt(&Rat::new(Int::from(9), Int::from(4))), Some(Rat::new(Int::from(3), Int::from(2))));
        assert_eq!(rat_sqrt(&Rat::from_integer(Int::from(2))), None);
    }
}
