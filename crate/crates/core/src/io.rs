//! Instance files and report records.
//!
//! All numeric payloads are decimal strings ("p" or "p/q"), never JSON
//! numbers, so arbitrary-precision values round-trip bit-exactly.

use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::exactmath::vecops;
use crate::proximity::{Instance, ProximityReport};
use crate::spindle::{RayDecomposition, WalkTrace};
use crate::{IMatrix, IVec, Int, QVec, Rat, Result};

pub const SCHEMA_VERSION: u32 = 1;

pub fn parse_int(s: &str) -> Result<Int> {
    Int::from_str(s.trim()).map_err(|e| Error::InvalidParam(format!("bad integer {s:?}: {e}")))
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        None => Ok(Rat::from_integer(parse_int(s)?)),
        Some((p, q)) => {
            let num = parse_int(p)?;
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::InvalidParam(format!("zero denominator in {s:?}")));
            }
            Ok(Rat::new(num, den))
        }
    }
}

pub fn format_rat(r: &Rat) -> String {
    r.to_string()
}

pub fn int_matrix_to_strings(m: &IMatrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|r| m.row(r).iter().map(|x| x.to_string()).collect())
        .collect()
}

fn int_matrix_from_strings(rows: &[Vec<String>]) -> Result<IMatrix> {
    let parsed: Vec<IVec> = rows
        .iter()
        .map(|row| row.iter().map(|s| parse_int(s)).collect::<Result<IVec>>())
        .collect::<Result<_>>()?;
    let width = parsed.first().map_or(0, Vec::len);
    if parsed.iter().any(|r| r.len() != width) {
        return Err(Error::InvalidParam("ragged matrix rows".into()));
    }
    Ok(IMatrix::from_rows(parsed))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Metadata {
    pub fn is_empty(&self) -> bool {
        self.seed.is_none() && self.generator.is_none() && self.notes.is_empty()
    }
}

/// On-disk instance: constraint data plus optional factorization
/// witnesses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub schema_version: u32,
    pub a: Vec<Vec<String>>,
    pub b: Vec<String>,
    pub c: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_factor: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Metadata::is_empty")]
    pub metadata: Metadata,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        InstanceFile {
            schema_version: SCHEMA_VERSION,
            a: int_matrix_to_strings(inst.a()),
            b: inst.b().iter().map(|x| x.to_string()).collect(),
            c: inst.c().iter().map(format_rat).collect(),
            t: None,
            b_factor: None,
            metadata: Metadata::default(),
        }
    }

    pub fn with_witnesses(mut self, t: &IMatrix, b_factor: &IMatrix) -> Self {
        self.t = Some(int_matrix_to_strings(t));
        self.b_factor = Some(int_matrix_to_strings(b_factor));
        self
    }

    pub fn with_metadata(mut self, metadata: Metadata) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn to_instance(&self) -> Result<Instance> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidParam(format!(
                "unsupported schema version {}",
                self.schema_version
            )));
        }
        let a = int_matrix_from_strings(&self.a)?;
        let b: IVec = self.b.iter().map(|s| parse_int(s)).collect::<Result<_>>()?;
        let c: QVec = self.c.iter().map(|s| parse_rat(s)).collect::<Result<_>>()?;
        Instance::new(a, b, c)
    }

    pub fn witnesses(&self) -> Result<Option<(IMatrix, IMatrix)>> {
        match (&self.t, &self.b_factor) {
            (Some(t), Some(bf)) => Ok(Some((
                int_matrix_from_strings(t)?,
                int_matrix_from_strings(bf)?,
            ))),
            (None, None) => Ok(None),
            _ => Err(Error::InvalidParam(
                "factorization witnesses must come as a pair".into(),
            )),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files are serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidParam(format!("instance file parse error: {e}")))
    }
}

/// Flattened proximity report for JSON and CSV emission.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportRecord {
    pub instance_id: String,
    pub proximity: String,
    pub proximity_feasible: String,
    pub lp_value: String,
    pub ip_value: String,
    pub optimal_vertex_count: usize,
    pub optimal_integer_count: usize,
    pub delta_table: Vec<String>,
    pub bound_cook: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_cook_refined: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_main: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_tu: Option<String>,
    pub flag_cook: String,
    pub flag_main: String,
    pub flag_tu: String,
    pub all_bounds_hold: bool,
    pub timing_ms: u128,
}

impl ReportRecord {
    pub fn from_report(instance_id: &str, report: &ProximityReport, timing_ms: u128) -> Self {
        ReportRecord {
            instance_id: instance_id.to_string(),
            proximity: format_rat(&report.proximity),
            proximity_feasible: format_rat(&report.proximity_feasible),
            lp_value: format_rat(&report.lp_value),
            ip_value: format_rat(&report.ip_value),
            optimal_vertex_count: report.optimal_vertex_count,
            optimal_integer_count: report.optimal_integer_count,
            delta_table: report.delta_table.iter().map(|x| x.to_string()).collect(),
            bound_cook: format_rat(&report.bound_cook),
            bound_cook_refined: report.bound_cook_refined.as_ref().map(format_rat),
            bound_main: report.bound_main.as_ref().map(format_rat),
            bound_tu: report.bound_tu.as_ref().map(format_rat),
            flag_cook: report.flag_cook.as_str().into(),
            flag_main: report.flag_main.as_str().into(),
            flag_tu: report.flag_tu.as_str().into(),
            all_bounds_hold: report.all_hold(),
            timing_ms,
        }
    }

    pub fn csv_header() -> &'static str {
        "instance_id,proximity,proximity_feasible,lp_value,ip_value,bound_cook,bound_main,bound_tu,flag_cook,flag_main,flag_tu,all_bounds_hold,timing_ms"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.instance_id,
            self.proximity,
            self.proximity_feasible,
            self.lp_value,
            self.ip_value,
            self.bound_cook,
            self.bound_main.as_deref().unwrap_or(""),
            self.bound_tu.as_deref().unwrap_or(""),
            self.flag_cook,
            self.flag_main,
            self.flag_tu,
            self.all_bounds_hold,
            self.timing_ms
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WalkStepRecord {
    pub from: Vec<String>,
    pub to: Vec<String>,
    pub spindle_dim: usize,
    pub block: usize,
    pub face_apex_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub face_origin_dim: Option<usize>,
    pub slice_rows: Vec<usize>,
    pub step_term: String,
    pub slice_bound: String,
}

/// Serializable walk trace.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WalkRecord {
    pub alpha: Vec<String>,
    pub d_seq: Vec<usize>,
    pub start: Vec<String>,
    pub objective_at_start: String,
    pub ambient_rows: Vec<usize>,
    pub delta_ambient: String,
    pub kappa_blocks: Vec<String>,
    pub bound_total: String,
    pub certified: bool,
    pub steps: Vec<WalkStepRecord>,
}

impl WalkRecord {
    pub fn from_trace(trace: &WalkTrace) -> Self {
        WalkRecord {
            alpha: trace.alpha.iter().map(|x| x.to_string()).collect(),
            d_seq: trace.d_seq.clone(),
            start: trace.start.iter().map(format_rat).collect(),
            objective_at_start: format_rat(&trace.objective_at_start),
            ambient_rows: trace.ambient_rows.iter().collect(),
            delta_ambient: format_rat(&trace.delta_ambient),
            kappa_blocks: trace.kappa_blocks.iter().map(format_rat).collect(),
            bound_total: format_rat(&trace.bound_total),
            certified: trace.all_certified(),
            steps: trace
                .steps
                .iter()
                .map(|s| WalkStepRecord {
                    from: s.from.iter().map(format_rat).collect(),
                    to: s.to.iter().map(format_rat).collect(),
                    spindle_dim: s.spindle_dim,
                    block: s.block,
                    face_apex_dim: s.face_apex.dim,
                    face_origin_dim: s.face_origin.as_ref().map(|f| f.dim),
                    slice_rows: s.slice_rows.iter().collect(),
                    step_term: format_rat(&s.step_term),
                    slice_bound: format_rat(&s.slice_bound),
                })
                .collect(),
        }
    }
}

/// Serializable dimension reduction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LiftRecord {
    pub rows: Vec<usize>,
    pub alpha: Vec<String>,
    pub d: usize,
    pub a_hat: Vec<Vec<String>>,
    pub b_hat: Vec<String>,
    pub alpha_hat: Vec<String>,
    pub u: Vec<Vec<String>>,
    pub delta_slice: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<String>,
    pub verified: bool,
}

impl LiftRecord {
    pub fn from_lift(
        lifted: &crate::lifting::LiftResult,
        alpha: &[Int],
        delta_slice: &Rat,
        kappa: Option<&Rat>,
        verified: bool,
    ) -> Self {
        LiftRecord {
            rows: lifted.i_set.iter().collect(),
            alpha: alpha.iter().map(|x| x.to_string()).collect(),
            d: lifted.d,
            a_hat: int_matrix_to_strings(&lifted.a_hat),
            b_hat: lifted.b_hat.iter().map(|x| x.to_string()).collect(),
            alpha_hat: lifted.alpha_hat.iter().map(|x| x.to_string()).collect(),
            u: int_matrix_to_strings(&lifted.u),
            delta_slice: format_rat(delta_slice),
            kappa: kappa.map(format_rat),
            verified,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RayRecord {
    pub direction: Vec<String>,
    pub multiplicity: String,
    pub linf_norm: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RayDecompositionRecord {
    pub point: Vec<String>,
    pub rays: Vec<RayRecord>,
    pub total_multiplicity: String,
    pub path_length: usize,
    pub integral_partial_sums: Vec<usize>,
}

impl RayDecompositionRecord {
    pub fn from_decomposition(point: &[Rat], dec: &RayDecomposition) -> Self {
        RayDecompositionRecord {
            point: point.iter().map(format_rat).collect(),
            rays: dec
                .rays
                .iter()
                .map(|(r, m)| RayRecord {
                    direction: r.iter().map(format_rat).collect(),
                    multiplicity: m.to_string(),
                    linf_norm: format_rat(&vecops::linf_norm(r)),
                })
                .collect(),
            total_multiplicity: dec.total_multiplicity.to_string(),
            path_length: dec.unit_path.len(),
            integral_partial_sums: dec.integral_partial_sums.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::vecops::from_i64;

    fn sample_instance() -> Instance {
        Instance::new(
            IMatrix::from_i64_rows(&[&[1, 0], &[2, 3], &[-1, 0], &[-2, -3]]),
            from_i64(&[1, 1, 0, 0]),
            vec![Rat::new(Int::from(1), Int::from(3)), Rat::from_integer(Int::from(-2))],
        )
        .unwrap()
    }

    #[test]
    fn rational_strings_parse_both_forms() {
        assert_eq!(parse_rat("5").unwrap(), Rat::from_integer(Int::from(5)));
        assert_eq!(parse_rat("-7/3").unwrap(), Rat::new(Int::from(-7), Int::from(3)));
        // normalization: sign moves to the numerator, fraction reduced
        assert_eq!(parse_rat("4/-6").unwrap(), Rat::new(Int::from(-2), Int::from(3)));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn instance_round_trip_is_exact() {
        let inst = sample_instance();
        let file = InstanceFile::from_instance(&inst);
        let back = InstanceFile::from_json(&file.to_json()).unwrap();
        assert_eq!(file, back);
        assert_eq!(back.to_instance().unwrap(), inst);
    }

    #[test]
    fn round_trip_preserves_values_beyond_machine_range() {
        let huge = Int::from_str("123456789012345678901234567890123").unwrap();
        let a = IMatrix::from_rows(vec![vec![huge.clone()], vec![-huge.clone()]]);
        let inst =
            Instance::new(a, vec![huge.clone(), huge.clone()], vec![Rat::new(Int::from(1), huge)])
                .unwrap();
        let file = InstanceFile::from_instance(&inst);
        let back = InstanceFile::from_json(&file.to_json()).unwrap().to_instance().unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn witnesses_must_come_in_pairs() {
        let mut file = InstanceFile::from_instance(&sample_instance());
        file.t = Some(vec![vec!["1".into()]]);
        assert!(file.witnesses().is_err());
        let paired = InstanceFile::from_instance(&sample_instance())
            .with_witnesses(&IMatrix::identity(2), &IMatrix::identity(2));
        assert!(paired.witnesses().unwrap().is_some());
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(InstanceFile::from_json("{"), Err(Error::InvalidParam(_))));
        // wrong shape: numbers instead of strings
        assert!(InstanceFile::from_json(r#"{"schema_version":1,"a":[[1]],"b":[1],"c":[1]}"#).is_err());
    }

    #[test]
    fn report_record_flattens() {
        let inst = sample_instance();
        let report = crate::proximity::measure_proximity(&inst).unwrap();
        let record = ReportRecord::from_report("sample", &report, 12);
        assert_eq!(record.proximity, "1");
        assert_eq!(record.flag_main, "strict");
        assert!(record.csv_row().starts_with("sample,1,"));
    }

    proptest::proptest! {
        #[test]
        fn rational_string_round_trip(p in -1000i64..1000, q in 1i64..1000) {
            let r = Rat::new(Int::from(p), Int::from(q));
            proptest::prop_assert_eq!(parse_rat(&format_rat(&r)).unwrap(), r);
        }
    }
}
