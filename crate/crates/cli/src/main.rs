//! Command-line front end: instance file I/O, single measurements, batch
//! sweeps, walks, dimension reductions, and ray decompositions.
//!
//! Exit codes: 0 success and all applicable bounds hold, 1 a bound check
//! failed, 2 parse or parameter errors, 3 infeasible or unbounded
//! programs, 4 a resource cap was exceeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use proxlab::error::Error;
use proxlab::exactmath::{vecops, IndexSet};
use proxlab::generators::{
    certify_lower_bound, gen_lower_bound, gen_random, gen_strictly_delta_modular,
};
use proxlab::io::{
    format_rat, InstanceFile, LiftRecord, Metadata, RayDecompositionRecord, ReportRecord,
    WalkRecord,
};
use proxlab::lifting::{lift, verify_lift};
use proxlab::polyhedron::Caps;
use proxlab::proximity::{
    check_strictly_delta_modular_bound, check_volume_bound, delta_i, kappa_i,
    measure_proximity_with_caps, normalize, width_survey, Instance, NormalizedInstance,
};
use proxlab::spindle::{default_block_sizes, ray_decomposition, template_walk};
use proxlab::{Int, Rat};

#[derive(Parser)]
#[command(name = "proxlab", version, about = "Exact proximity experiments on integral linear programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Largest admissible number of integer points in a lattice scan box.
    #[arg(long, global = true, default_value_t = 50_000_000)]
    cap_box: u128,
    /// Largest admissible number of basis subsets per vertex enumeration.
    #[arg(long, global = true, default_value_t = 20_000_000)]
    cap_subsets: u128,
}

#[derive(Subcommand)]
enum Command {
    /// Measure proximity and all bound values of an instance file.
    Measure {
        path: PathBuf,
        /// Report destination (defaults to `<path>.report.json`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit an instance file.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Run every configured check over a grid of instances.
    Sweep {
        config: PathBuf,
        /// Aggregate JSON destination (defaults to `<config>.sweep.json`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optional CSV with one row per measured instance.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Walk the objective-maximal vertex down to the origin.
    Walk {
        path: PathBuf,
        /// Comma-separated face dimensions (defaults to 3s then 2s).
        #[arg(long)]
        d_seq: Option<String>,
        /// Comma-separated integral direction (defaults to the first unit vector).
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce a slice to an equivalent full-dimensional instance.
    Lift {
        path: PathBuf,
        /// Comma-separated row indices forming the slice.
        #[arg(long)]
        rows: String,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decompose the farthest vertex into primitive lattice rays.
    DecomposeRays {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenerateKind {
    /// Tight lower-bound family member.
    Lowerbound {
        #[command(flatten)]
        common: OutArg,
        #[arg(long)]
        delta: i64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Seeded random bounded instance.
    Random {
        #[command(flatten)]
        common: OutArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        bound: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Strictly delta-modular instance with factorization witnesses.
    Sdm {
        #[command(flatten)]
        common: OutArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        delta: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct OutArg {
    /// Destination file.
    #[arg(long)]
    out: PathBuf,
}

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::InvalidParam(_)
        | Error::Dimension(_)
        | Error::NonSquare
        | Error::NotIntegral(_)
        | Error::OutOfRange(_) => 2,
        Error::Infeasible | Error::Unbounded | Error::EmptyPolyhedron | Error::NoVertex => 3,
        Error::ResourceCap { .. } | Error::BudgetExhausted(_) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let caps = Caps { box_points: cli.cap_box, basis_subsets: cli.cap_subsets };
    match run(cli.command, caps) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), Error> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)
        .and_then(|()| std::fs::rename(&tmp, path))
        .map_err(|e| Error::InvalidParam(format!("cannot write {}: {e}", path.display())))
}

fn read_instance_file(path: &Path) -> Result<InstanceFile, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParam(format!("cannot read {}: {e}", path.display())))?;
    InstanceFile::from_json(&text)
}

fn parse_int_list(text: &str) -> Result<Vec<i64>, Error> {
    text.split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .map_err(|e| Error::InvalidParam(format!("bad integer {x:?}: {e}")))
        })
        .collect()
}

fn parse_alpha(text: Option<&str>, n: usize) -> Result<Vec<Int>, Error> {
    match text {
        None => Ok(vecops::unit::<Int>(n, 0)),
        Some(t) => {
            let xs = parse_int_list(t)?;
            if xs.len() != n {
                return Err(Error::InvalidParam(format!(
                    "direction has {} entries, instance has {n} variables",
                    xs.len()
                )));
            }
            Ok(vecops::from_i64(&xs))
        }
    }
}

/// Accept an already-normalized instance or normalize it first.
fn normalized_from(inst: &Instance, caps: Caps) -> Result<(NormalizedInstance, bool), Error> {
    match NormalizedInstance::verify(inst.clone(), caps) {
        Ok(norm) => Ok((norm, false)),
        Err(Error::HypothesisFailed(_)) => Ok((normalize(inst, caps)?, true)),
        Err(e) => Err(e),
    }
}

fn run(command: Command, caps: Caps) -> Result<u8, Error> {
    match command {
        Command::Measure { path, out } => cmd_measure(&path, out, caps),
        Command::Generate { kind } => cmd_generate(kind, caps),
        Command::Sweep { config, out, csv } => cmd_sweep(&config, out, csv, caps),
        Command::Walk { path, d_seq, alpha, out } => {
            cmd_walk(&path, d_seq.as_deref(), alpha.as_deref(), out, caps)
        }
        Command::Lift { path, rows, alpha, out } => {
            cmd_lift(&path, &rows, alpha.as_deref(), out, caps)
        }
        Command::DecomposeRays { path, out } => cmd_decompose(&path, out, caps),
    }
}

fn cmd_measure(path: &Path, out: Option<PathBuf>, caps: Caps) -> Result<u8, Error> {
    let file = read_instance_file(path)?;
    let inst = file.to_instance()?;
    let start = Instant::now();
    let report = match file.witnesses()? {
        Some((t, b_factor)) => {
            check_strictly_delta_modular_bound(&inst, &t, &b_factor, caps)?.report
        }
        None => measure_proximity_with_caps(&inst, caps)?,
    };
    let record =
        ReportRecord::from_report(&path.display().to_string(), &report, start.elapsed().as_millis());

    println!("instance        {}", path.display());
    println!("proximity       {}", record.proximity);
    println!("  vs feasible   {}", record.proximity_feasible);
    println!("lp / ip value   {} / {}", record.lp_value, record.ip_value);
    println!("minor table     [{}]", record.delta_table.join(", "));
    println!("coarse bound    {}  ({})", record.bound_cook, record.flag_cook);
    if let Some(b) = &record.bound_main {
        println!("half bound      {b}  ({})", record.flag_main);
    }
    if let Some(b) = &record.bound_tu {
        println!("factor bound    {b}  ({})", record.flag_tu);
    }

    let out = out.unwrap_or_else(|| path.with_extension("report.json"));
    write_atomic(&out, &serde_json::to_string_pretty(&record).expect("serializable"))?;
    println!("report written  {}", out.display());
    Ok(if record.all_bounds_hold { 0 } else { 1 })
}

fn cmd_generate(kind: GenerateKind, caps: Caps) -> Result<u8, Error> {
    let (out, file) = match kind {
        GenerateKind::Lowerbound { common, delta, n, k } => {
            let lb = gen_lower_bound(delta, n, k)?;
            certify_lower_bound(&lb, caps)?;
            let meta = Metadata {
                seed: None,
                generator: Some(format!("lowerbound delta={delta} n={n} k={k}")),
                notes: vec!["all structural claims certified".into()],
            };
            let file = InstanceFile::from_instance(lb.instance())
                .with_witnesses(&lb.tu_factor(), &lb.b_matrix)
                .with_metadata(meta);
            (common.out, file)
        }
        GenerateKind::Random { common, n, m, bound, seed } => {
            let r = gen_random(n, m, bound, seed)?;
            let mut notes = Vec::new();
            if r.appended_bounding_row {
                notes.push("bounding row appended".into());
            }
            let meta = Metadata {
                seed: Some(seed),
                generator: Some(format!("random n={n} m={m} bound={bound}")),
                notes,
            };
            (common.out, InstanceFile::from_instance(&r.instance).with_metadata(meta))
        }
        GenerateKind::Sdm { common, n, m, delta, seed } => {
            let sdm = gen_strictly_delta_modular(n, m, delta, seed)?;
            let meta = Metadata {
                seed: Some(seed),
                generator: Some(format!("sdm n={n} m={m} delta={delta}")),
                notes: Vec::new(),
            };
            let file = InstanceFile::from_instance(&sdm.instance)
                .with_witnesses(&sdm.t, &sdm.b_factor)
                .with_metadata(meta);
            (common.out, file)
        }
    };
    write_atomic(&out, &file.to_json())?;
    println!("instance written {}", out.display());
    Ok(0)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepConfig {
    #[serde(default)]
    random: Vec<RandomGrid>,
    #[serde(default)]
    lower_bound: Vec<LowerBoundGrid>,
    #[serde(default)]
    sdm: Vec<SdmGrid>,
    /// Checks to run: any of "cook", "main", "tu", "kappa", "volume",
    /// "walk". Defaults to all of them.
    #[serde(default)]
    checks: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomGrid {
    n: usize,
    m: usize,
    #[serde(default = "default_bound")]
    entry_bound: i64,
    count: u64,
    #[serde(default)]
    seed: u64,
}

fn default_bound() -> i64 {
    3
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LowerBoundGrid {
    delta: i64,
    n: usize,
    k: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SdmGrid {
    n: usize,
    m: usize,
    delta: i64,
    count: u64,
    #[serde(default)]
    seed: u64,
}

#[derive(Debug, Default, Serialize)]
struct SweepAggregate {
    instances: usize,
    skipped: usize,
    violations: Vec<String>,
    /// Largest observed slice width per dimension (squared for dimension 3,
    /// reported against the threshold 2).
    max_kappa_1: Option<String>,
    max_kappa_2: Option<String>,
    max_kappa_3_squared: Option<String>,
    walks_certified: usize,
    reports: Vec<ReportRecord>,
}

enum SweepItem {
    Plain(String, Instance),
    Witnessed(String, Instance, proxlab::IMatrix, proxlab::IMatrix),
}

fn cmd_sweep(
    config_path: &Path,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
    caps: Caps,
) -> Result<u8, Error> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| Error::InvalidParam(format!("cannot read {}: {e}", config_path.display())))?;
    let config: SweepConfig = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidParam(format!("sweep config parse error: {e}")))?;
    let checks: Vec<String> = config.checks.clone().unwrap_or_else(|| {
        ["cook", "main", "tu", "kappa", "volume", "walk"].map(String::from).to_vec()
    });
    let want = |c: &str| checks.iter().any(|x| x == c);

    let mut items: Vec<SweepItem> = Vec::new();
    for grid in &config.lower_bound {
        let lb = gen_lower_bound(grid.delta, grid.n, grid.k)?;
        let id = format!("lowerbound-d{}-n{}-k{}", grid.delta, grid.n, grid.k);
        items.push(SweepItem::Witnessed(
            id,
            lb.instance().clone(),
            lb.tu_factor(),
            lb.b_matrix.clone(),
        ));
    }
    for grid in &config.random {
        for i in 0..grid.count {
            let seed = grid.seed + i;
            let r = gen_random(grid.n, grid.m, grid.entry_bound, seed)?;
            items.push(SweepItem::Plain(
                format!("random-n{}-m{}-seed{seed}", grid.n, grid.m),
                r.instance,
            ));
        }
    }
    for grid in &config.sdm {
        for i in 0..grid.count {
            let seed = grid.seed + i;
            let sdm = gen_strictly_delta_modular(grid.n, grid.m, grid.delta, seed)?;
            items.push(SweepItem::Witnessed(
                format!("sdm-n{}-d{}-seed{seed}", grid.n, grid.delta),
                sdm.instance,
                sdm.t,
                sdm.b_factor,
            ));
        }
    }

    if items.is_empty() {
        println!("sweep config lists no instances; nothing to do");
        return Ok(0);
    }

    struct PerInstance {
        report: Option<ReportRecord>,
        violations: Vec<String>,
        skipped: bool,
        kappa: [Option<Rat>; 3],
        walk_certified: bool,
    }

    let results: Vec<PerInstance> = items
        .par_iter()
        .map(|item| {
            let (id, inst, witnesses) = match item {
                SweepItem::Plain(id, inst) => (id, inst, None),
                SweepItem::Witnessed(id, inst, t, b) => (id, inst, Some((t, b))),
            };
            let mut per = PerInstance {
                report: None,
                violations: Vec::new(),
                skipped: false,
                kappa: [None, None, None],
                walk_certified: false,
            };
            let start = Instant::now();
            let measured = match witnesses {
                Some((t, b)) if want("tu") => {
                    check_strictly_delta_modular_bound(inst, t, b, caps).map(|c| c.report)
                }
                _ => measure_proximity_with_caps(inst, caps),
            };
            let report = match measured {
                Ok(r) => r,
                Err(Error::ResourceCap { .. }) => {
                    per.skipped = true;
                    return per;
                }
                Err(e) => {
                    per.violations.push(format!("{id}: {e}"));
                    return per;
                }
            };
            if want("cook") && report.flag_cook == proxlab::proximity::BoundFlag::Violated {
                per.violations.push(format!("{id}: coarse bound violated"));
            }
            if want("main")
                && !matches!(
                    report.flag_main,
                    proxlab::proximity::BoundFlag::Strict
                        | proxlab::proximity::BoundFlag::NotApplicable
                )
            {
                per.violations.push(format!("{id}: half bound not strict"));
            }
            if want("tu") && report.flag_tu == proxlab::proximity::BoundFlag::Violated {
                per.violations.push(format!("{id}: factor bound violated"));
            }
            per.report =
                Some(ReportRecord::from_report(id, &report, start.elapsed().as_millis()));

            if want("kappa") || want("volume") || want("walk") {
                let norm = match normalized_from(inst, caps) {
                    Ok((norm, _)) => norm,
                    Err(Error::ResourceCap { .. }) => {
                        per.skipped = true;
                        return per;
                    }
                    Err(e) => {
                        per.violations.push(format!("{id}: normalize: {e}"));
                        return per;
                    }
                };
                if want("kappa") {
                    match width_survey(&norm, 3) {
                        Ok(survey) => {
                            for entry in survey {
                                let slot = &mut per.kappa[entry.dim - 1];
                                let better =
                                    slot.as_ref().is_none_or(|cur| entry.kappa > *cur);
                                if better {
                                    *slot = Some(entry.kappa.clone());
                                }
                                let violated = match entry.dim {
                                    1 | 2 => entry.kappa >= Rat::from_integer(Int::from(1)),
                                    _ => {
                                        entry.kappa.clone() * entry.kappa
                                            >= Rat::from_integer(Int::from(2))
                                    }
                                };
                                if violated {
                                    per.violations
                                        .push(format!("{id}: slice width out of range"));
                                }
                            }
                        }
                        Err(e) => per.violations.push(format!("{id}: widths: {e}")),
                    }
                }
                if want("volume") && (2..=3).contains(&inst.num_vars()) {
                    let n = inst.num_vars();
                    let full = norm.polyhedron().dimension().ok() == Some(n);
                    if full {
                        for i in 0..n {
                            let alpha = vecops::unit::<Int>(n, i);
                            match check_volume_bound(&norm, &alpha) {
                                Ok(c) if c.holds => {}
                                Ok(_) => per
                                    .violations
                                    .push(format!("{id}: width-volume inequality violated")),
                                Err(e) => {
                                    per.violations.push(format!("{id}: volume: {e}"))
                                }
                            }
                        }
                    }
                }
                if want("walk") {
                    let dim = norm.polyhedron().dimension().unwrap_or(0);
                    if dim > 0 {
                        let n = inst.num_vars();
                        match template_walk(&norm, &vecops::unit::<Int>(n, 0), &default_block_sizes(dim))
                        {
                            Ok(trace) if trace.all_certified() => per.walk_certified = true,
                            Ok(_) => per.violations.push(format!("{id}: walk uncertified")),
                            Err(Error::DegenerateObjective) => {}
                            Err(e) => per.violations.push(format!("{id}: walk: {e}")),
                        }
                    }
                }
            }
            per
        })
        .collect();

    let mut agg = SweepAggregate::default();
    let mut max_k: [Option<Rat>; 3] = [None, None, None];
    for per in results {
        agg.instances += 1;
        if per.skipped {
            agg.skipped += 1;
        }
        agg.violations.extend(per.violations);
        if per.walk_certified {
            agg.walks_certified += 1;
        }
        for (slot, seen) in max_k.iter_mut().zip(per.kappa) {
            if let Some(k) = seen {
                let better = slot.as_ref().is_none_or(|cur| k > *cur);
                if better {
                    *slot = Some(k);
                }
            }
        }
        if let Some(r) = per.report {
            agg.reports.push(r);
        }
    }
    agg.max_kappa_1 = max_k[0].as_ref().map(format_rat);
    agg.max_kappa_2 = max_k[1].as_ref().map(format_rat);
    agg.max_kappa_3_squared = max_k[2].as_ref().map(|k| format_rat(&(k.clone() * k.clone())));

    println!(
        "sweep: {} instances, {} skipped, {} violations, {} walks certified",
        agg.instances,
        agg.skipped,
        agg.violations.len(),
        agg.walks_certified
    );
    for v in &agg.violations {
        eprintln!("violation: {v}");
    }
    if let Some(k) = &agg.max_kappa_3_squared {
        println!("largest squared 3-slice width observed: {k} (threshold 2)");
    }

    let out = out.unwrap_or_else(|| config_path.with_extension("sweep.json"));
    write_atomic(&out, &serde_json::to_string_pretty(&agg).expect("serializable"))?;
    println!("aggregate written {}", out.display());
    if let Some(csv_path) = csv {
        let mut text = String::from(ReportRecord::csv_header());
        text.push('\n');
        for r in &agg.reports {
            text.push_str(&r.csv_row());
            text.push('\n');
        }
        write_atomic(&csv_path, &text)?;
        println!("csv written {}", csv_path.display());
    }
    Ok(if agg.violations.is_empty() { 0 } else { 1 })
}

fn cmd_walk(
    path: &Path,
    d_seq: Option<&str>,
    alpha: Option<&str>,
    out: Option<PathBuf>,
    caps: Caps,
) -> Result<u8, Error> {
    let inst = read_instance_file(path)?.to_instance()?;
    let (norm, was_normalized) = normalized_from(&inst, caps)?;
    if was_normalized {
        println!("instance normalized first (origin is now the only integer point)");
    }
    let dim = norm.polyhedron().dimension()?;
    let blocks: Vec<usize> = match d_seq {
        None => default_block_sizes(dim),
        Some(t) => parse_int_list(t)?
            .into_iter()
            .map(|x| usize::try_from(x).map_err(|_| Error::InvalidParam("negative block".into())))
            .collect::<Result<_, Error>>()?,
    };
    let alpha = parse_alpha(alpha, inst.num_vars())?;
    let trace = template_walk(&norm, &alpha, &blocks)?;
    let record = WalkRecord::from_trace(&trace);
    println!(
        "walk: {} steps, objective {} <= bound {}, certified: {}",
        record.steps.len(),
        record.objective_at_start,
        record.bound_total,
        record.certified
    );
    let out = out.unwrap_or_else(|| path.with_extension("walk.json"));
    write_atomic(&out, &serde_json::to_string_pretty(&record).expect("serializable"))?;
    println!("trace written {}", out.display());
    Ok(if record.certified { 0 } else { 1 })
}

fn cmd_lift(
    path: &Path,
    rows: &str,
    alpha: Option<&str>,
    out: Option<PathBuf>,
    caps: Caps,
) -> Result<u8, Error> {
    let inst = read_instance_file(path)?.to_instance()?;
    let (norm, _) = normalized_from(&inst, caps)?;
    let row_list = parse_int_list(rows)?
        .into_iter()
        .map(|x| usize::try_from(x).map_err(|_| Error::InvalidParam("negative row index".into())))
        .collect::<Result<Vec<_>, Error>>()?;
    let i_set = IndexSet::new(row_list, inst.num_rows())?;
    let alpha = parse_alpha(alpha, inst.num_vars())?;
    let lifted = lift(&norm, &alpha, &i_set)?;
    verify_lift(&norm, &alpha, &lifted)?;
    let delta_slice = delta_i(norm.instance().a(), &alpha, &i_set)?;
    let kappa = match kappa_i(&norm, &alpha, &i_set) {
        Ok(k) => Some(k),
        Err(Error::DegenerateObjective) => None,
        Err(e) => return Err(e),
    };
    let record = LiftRecord::from_lift(&lifted, &alpha, &delta_slice, kappa.as_ref(), true);
    println!(
        "lift: {} rows removed, reduced to dimension {}, identities verified",
        i_set.len(),
        record.d
    );
    let out = out.unwrap_or_else(|| path.with_extension("lift.json"));
    write_atomic(&out, &serde_json::to_string_pretty(&record).expect("serializable"))?;
    println!("reduction written {}", out.display());
    Ok(0)
}

fn cmd_decompose(path: &Path, out: Option<PathBuf>, caps: Caps) -> Result<u8, Error> {
    let file = read_instance_file(path)?;
    let inst = file.to_instance()?;
    let Some((t, b_factor)) = file.witnesses()? else {
        return Err(Error::InvalidParam(
            "decompose-rays needs factorization witnesses in the instance file".into(),
        ));
    };
    let (norm, _) = normalized_from(&inst, caps)?;
    let t_ext = norm.extend_factor(&t);
    let verts = norm.polyhedron().vertex_points()?;
    let far = verts
        .iter()
        .max_by(|x, y| {
            vecops::linf_norm(x)
                .cmp(&vecops::linf_norm(y))
                .then_with(|| vecops::lex_cmp(y, x))
        })
        .ok_or(Error::EmptyPolyhedron)?
        .clone();
    let dec = ray_decomposition(norm.instance().a(), &t_ext, &b_factor, &far)?;
    let record = RayDecompositionRecord::from_decomposition(&far, &dec);
    println!(
        "decomposition: {} rays, total multiplicity {}",
        record.rays.len(),
        record.total_multiplicity
    );
    let out = out.unwrap_or_else(|| path.with_extension("rays.json"));
    write_atomic(&out, &serde_json::to_string_pretty(&record).expect("serializable"))?;
    println!("rays written {}", out.display());
    Ok(0)
}
