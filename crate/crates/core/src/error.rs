//! Error taxonomy shared by every module.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Matrix or vector dimensions do not line up.
    Dimension(String),
    /// A square matrix was required.
    NonSquare,
    /// Rows that had to be linearly independent are not, or a full-rank
    /// input is rank deficient.
    RankDeficient,
    /// Minor order or face dimension outside the valid range.
    OutOfRange(String),
    /// gcd of minors is undefined for the zero matrix.
    ZeroMatrix,
    /// An integral matrix or vector was required.
    NotIntegral(String),
    /// The polyhedron is empty where a point was required.
    EmptyPolyhedron,
    /// The polyhedron has no vertex (lineality space is nontrivial).
    NoVertex,
    /// Linear program infeasible.
    Infeasible,
    /// Linear program unbounded in the objective direction.
    Unbounded,
    /// A query point lies outside the polyhedron.
    PointOutside,
    /// The origin is not interior to the polytope being polarized.
    ZeroNotInterior,
    /// The objective is degenerate for the requested slice (its minor
    /// bound vanishes), so the normalized width is undefined.
    DegenerateObjective,
    /// No slice of the requested dimension exists.
    NoSliceOfDimension(usize),
    /// An enumeration would exceed a configured resource cap.
    ResourceCap { what: &'static str, cap: u128, needed: u128 },
    /// Invalid parameters for a generator or command.
    InvalidParam(String),
    /// A structural hypothesis (factorization, total unimodularity,
    /// lattice membership, span condition, ...) does not hold.
    HypothesisFailed(String),
    /// A transported identity failed while verifying a dimension reduction.
    LiftDefect(&'static str),
    /// A claimed property of a generated instance failed certification.
    CertificationFailed(String),
    /// A resampling generator ran out of attempts.
    BudgetExhausted(&'static str),
    /// Internal invariant violated; indicates a bug, not bad input.
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension(msg) => write!(f, "dimension mismatch: {msg}"),
            Error::NonSquare => write!(f, "matrix is not square"),
            Error::RankDeficient => write!(f, "rows are linearly dependent"),
            Error::OutOfRange(msg) => write!(f, "out of range: {msg}"),
            Error::ZeroMatrix => write!(f, "gcd of minors is undefined for the zero matrix"),
            Error::NotIntegral(msg) => write!(f, "integrality required: {msg}"),
            Error::EmptyPolyhedron => write!(f, "polyhedron is empty"),
            Error::NoVertex => write!(f, "polyhedron has no vertex"),
            Error::Infeasible => write!(f, "infeasible"),
            Error::Unbounded => write!(f, "unbounded in the objective direction"),
            Error::PointOutside => write!(f, "point lies outside the polyhedron"),
            Error::ZeroNotInterior => write!(f, "origin is not interior"),
            Error::DegenerateObjective => write!(f, "objective degenerate for this slice"),
            Error::NoSliceOfDimension(d) => write!(f, "no slice of dimension {d}"),
            Error::ResourceCap { what, cap, needed } => {
                write!(f, "resource cap exceeded for {what}: need {needed}, cap {cap}")
            }
            Error::InvalidParam(msg) => write!(f, "invalid parameter: {msg}"),
            Error::HypothesisFailed(msg) => write!(f, "hypothesis failed: {msg}"),
            Error::LiftDefect(which) => write!(f, "lift identity failed: {which}"),
            Error::CertificationFailed(claim) => write!(f, "certification failed: {claim}"),
            Error::BudgetExhausted(what) => write!(f, "resampling budget exhausted: {what}"),
            Error::Internal(msg) => write!(f, "internal invariant violated: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
