//! Experiment harness: run campaigns, summarize run-time distributions,
//! fit reference exponentials, sweep the penalty delay, rank algorithm
//! summaries, and export everything as CSV/JSONL.
//!
//! All exported artifacts use 1-based vertex ids; everything in-process
//! is 0-based.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::oracle::verify_clique;
use crate::solver::{solve, solve_instrumented, PerturbationEvent, SolverConfig, SolverError};

/// One solver run within a campaign. `clique` holds sorted 1-based ids:
/// the found clique on success, the best clique seen on failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub run: u64,
    pub seed: u64,
    pub pd: u32,
    pub tcs: u32,
    pub max_steps: u64,
    pub success: bool,
    pub steps: u64,
    /// Wall-clock seconds, rounded to microseconds so that CSV and
    /// JSONL carry the identical value.
    pub time_s: f64,
    pub clique_size: u32,
    #[serde(with = "space_separated")]
    pub clique: Vec<u32>,
}

mod space_separated {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[u32], s: S) -> Result<S::Ok, S::Error> {
        let joined = v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
        s.serialize_str(&joined)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u32>, D::Error> {
        let text = String::deserialize(d)?;
        text.split_whitespace().map(|t| t.parse().map_err(serde::de::Error::custom)).collect()
    }
}

/// Runs `runs` independent solver runs on `g`. Run `i` uses the derived
/// seed `cfg.seed ^ i`, so a campaign is reproducible and immune to
/// scheduling: runs execute in parallel but the output is ordered by
/// run index. A campaign of one run reproduces `solve` exactly.
///
/// Every successful record is re-verified against the graph before
/// being returned.
pub fn run_experiment(
    g: &Graph,
    instance: &str,
    runs: usize,
    cfg: &SolverConfig,
) -> Result<Vec<RunRecord>, SolverError> {
    (0..runs as u64)
        .into_par_iter()
        .map(|i| {
            let run_cfg = SolverConfig { seed: cfg.seed ^ i, ..*cfg };
            let result = solve(g, &run_cfg)?;
            let record = to_record(
                instance,
                i,
                &run_cfg,
                result.success,
                result.steps,
                result.elapsed.as_secs_f64(),
                &result.clique,
            );
            if record.success {
                let zero_based: Vec<u32> = record.clique.iter().map(|&v| v - 1).collect();
                assert!(
                    verify_clique(g, &zero_based),
                    "run {i}: reported clique fails verification"
                );
                assert!(record.clique_size >= cfg.tcs, "run {i}: success below target size");
            }
            Ok(record)
        })
        .collect()
}

/// Instrumented variant: also returns each run's perturbation trace,
/// ordered by run index.
pub fn run_experiment_instrumented(
    g: &Graph,
    instance: &str,
    runs: usize,
    cfg: &SolverConfig,
) -> Result<(Vec<RunRecord>, Vec<Vec<PerturbationEvent>>), SolverError> {
    let both: Vec<(RunRecord, Vec<PerturbationEvent>)> = (0..runs as u64)
        .into_par_iter()
        .map(|i| {
            let run_cfg = SolverConfig { seed: cfg.seed ^ i, ..*cfg };
            let (result, trace) = solve_instrumented(g, &run_cfg)?;
            let record = to_record(
                instance,
                i,
                &run_cfg,
                result.success,
                result.steps,
                result.elapsed.as_secs_f64(),
                &result.clique,
            );
            Ok((record, trace))
        })
        .collect::<Result<_, SolverError>>()?;
    Ok(both.into_iter().unzip())
}

fn to_record(
    instance: &str,
    run: u64,
    cfg: &SolverConfig,
    success: bool,
    steps: u64,
    time_s: f64,
    clique0: &[u32],
) -> RunRecord {
    RunRecord {
        instance: instance.to_string(),
        run,
        seed: cfg.seed,
        pd: cfg.pd,
        tcs: cfg.tcs,
        max_steps: cfg.max_steps,
        success,
        steps,
        time_s: (time_s * 1e6).round() / 1e6,
        clique_size: clique0.len() as u32,
        clique: clique0.iter().map(|&v| v + 1).collect(),
    }
}

/// Location and spread of the successful-run step counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    pub mean: f64,
    /// Midpoint convention: the average of the two middle order
    /// statistics when the sample size is even.
    pub median: f64,
    /// Population standard deviation.
    pub sd: f64,
    /// Coefficient of variation `sd/mean` (0 when the mean is 0).
    pub cv: f64,
}

/// Campaign summary over a record batch.
#[derive(Debug, Clone, PartialEq)]
pub struct RtdSummary {
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Step counts of successful runs, ascending.
    pub steps_sorted: Vec<u64>,
    /// Wall-clock seconds of successful runs, ascending.
    pub time_s_sorted: Vec<f64>,
    /// `None` when no run succeeded.
    pub steps: Option<StepStats>,
    /// Number of distinct cliques among the successful runs.
    pub distinct_solutions: usize,
}

fn median_of_sorted(xs: &[f64]) -> f64 {
    let k = xs.len();
    assert!(k > 0);
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        (xs[k / 2 - 1] + xs[k / 2]) / 2.0
    }
}

pub fn summarize(records: &[RunRecord]) -> RtdSummary {
    let successes: Vec<&RunRecord> = records.iter().filter(|r| r.success).collect();
    let mut steps_sorted: Vec<u64> = successes.iter().map(|r| r.steps).collect();
    steps_sorted.sort_unstable();
    let mut time_s_sorted: Vec<f64> = successes.iter().map(|r| r.time_s).collect();
    time_s_sorted.sort_by(f64::total_cmp);

    let steps = if successes.is_empty() {
        None
    } else {
        let xs: Vec<f64> = steps_sorted.iter().map(|&s| s as f64).collect();
        let k = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / k;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / k;
        let sd = var.sqrt();
        Some(StepStats {
            mean,
            median: median_of_sorted(&xs),
            sd,
            cv: if mean == 0.0 { 0.0 } else { sd / mean },
        })
    };

    let distinct: BTreeSet<&[u32]> = successes.iter().map(|r| r.clique.as_slice()).collect();
    RtdSummary {
        runs: records.len(),
        successes: successes.len(),
        success_rate: if records.is_empty() {
            0.0
        } else {
            successes.len() as f64 / records.len() as f64
        },
        steps_sorted,
        time_s_sorted,
        steps,
        distinct_solutions: distinct.len(),
    }
}

/// Overall campaign throughput: total steps over total wall-clock time,
/// across all runs. `None` when the total time is zero.
pub fn steps_per_second(records: &[RunRecord]) -> Option<f64> {
    let steps: u64 = records.iter().map(|r| r.steps).sum();
    let time: f64 = records.iter().map(|r| r.time_s).sum();
    (time > 0.0).then(|| steps as f64 / time)
}

/// Empirical CDF of a sample: pairs `(x_(i), i/k)` over the sorted
/// sample, one pair per observation.
pub fn rtd_cdf(samples: &[f64]) -> Vec<(f64, f64)> {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let k = xs.len() as f64;
    xs.iter().enumerate().map(|(i, &x)| (x, (i + 1) as f64 / k)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialFit {
    /// The empirical median, which parameterizes the reference
    /// distribution `ed[m](x) = 1 - 2^(-x/m)`.
    pub median: f64,
    /// Two-sided Kolmogorov-Smirnov distance between the empirical CDF
    /// and the reference.
    pub ks_distance: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("cannot fit an empty sample")]
    EmptySample,
    #[error("non-positive sample value {value}")]
    NonPositiveSample { value: f64 },
}

/// Fits the median-parameterized exponential `ed[m](x) = 1 - 2^(-x/m)`
/// and reports the KS distance of the sample against it. A sample of
/// identical values scores exactly 0.5; samples drawn at exact
/// quantiles of `ed[m]` score at most `1/k`.
pub fn exponential_fit(samples: &[f64]) -> Result<ExponentialFit, FitError> {
    if samples.is_empty() {
        return Err(FitError::EmptySample);
    }
    if let Some(&bad) = samples.iter().find(|&&x| x <= 0.0 || x.is_nan()) {
        return Err(FitError::NonPositiveSample { value: bad });
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let m = median_of_sorted(&xs);
    let ed = |x: f64| 1.0 - (-x / m).exp2();
    let k = xs.len() as f64;
    let mut ks: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let below = i as f64 / k;
        let above = (i + 1) as f64 / k;
        ks = ks.max(ed(x) - below).max(above - ed(x));
    }
    Ok(ExponentialFit { median: m, ks_distance: ks })
}

/// One row of a penalty-delay sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub pd: u32,
    pub success_rate: f64,
    pub median_steps: Option<f64>,
    pub median_time_s: Option<f64>,
}

/// Runs one campaign per penalty-delay value, same base seed each.
pub fn pd_sweep(
    g: &Graph,
    instance: &str,
    runs: usize,
    cfg: &SolverConfig,
    pd_values: &[u32],
) -> Result<Vec<SweepRow>, SolverError> {
    pd_values
        .iter()
        .map(|&pd| {
            let records = run_experiment(g, instance, runs, &SolverConfig { pd, ..*cfg })?;
            let summary = summarize(&records);
            Ok(SweepRow {
                pd,
                success_rate: summary.success_rate,
                median_steps: summary.steps.as_ref().map(|s| s.median),
                median_time_s: (!summary.time_s_sorted.is_empty())
                    .then(|| median_of_sorted(&summary.time_s_sorted)),
            })
        })
        .collect()
}

/// Per-instance performance of one algorithm, as published summary
/// tables state it: clique-size extremes and average over the runs, the
/// fraction of runs that reached the instance's reference clique size,
/// and the average CPU time on a common machine scale. Size and time
/// fields may be absent when the source table omits them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceStats {
    pub max_size: Option<u32>,
    pub avg_size: Option<f64>,
    pub min_size: Option<u32>,
    pub success_rate: f64,
    pub avg_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSummary {
    pub algorithm: String,
    pub instances: BTreeMap<String, InstanceStats>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    A,
    B,
    Inconclusive,
}

#[derive(Debug, Error, PartialEq)]
pub enum RankError {
    #[error("algorithm {algorithm:?} has no data for instance {instance:?}")]
    MissingInstance { algorithm: String, instance: String },
}

/// Decides which of two algorithms dominates an instance, applying the
/// standard criteria in strict order:
///
/// 1. if exactly one algorithm ever reached the instance's reference
///    clique size (success rate above zero), it dominates;
/// 2. if both achieved a 100% success rate, the strictly lower average
///    CPU time dominates;
/// 3. if exactly one achieved 100%, it dominates;
/// 4. if neither did, an algorithm dominates only when maximum clique
///    size, average clique size, and average CPU time all agree in its
///    favour (at least one strictly);
/// 5. otherwise the comparison is inconclusive.
pub fn rank_algorithms(
    a: &AlgorithmSummary,
    b: &AlgorithmSummary,
    instance: &str,
) -> Result<Dominance, RankError> {
    let get = |s: &AlgorithmSummary| -> Result<InstanceStats, RankError> {
        s.instances.get(instance).cloned().ok_or_else(|| RankError::MissingInstance {
            algorithm: s.algorithm.clone(),
            instance: instance.to_string(),
        })
    };
    let sa = get(a)?;
    let sb = get(b)?;

    // 1: only one ever found the reference size.
    match (sa.success_rate > 0.0, sb.success_rate > 0.0) {
        (true, false) => return Ok(Dominance::A),
        (false, true) => return Ok(Dominance::B),
        _ => {}
    }
    let full_a = sa.success_rate >= 1.0;
    let full_b = sb.success_rate >= 1.0;
    // 2: both fully reliable; faster wins.
    if full_a && full_b {
        return Ok(match (sa.avg_time_s, sb.avg_time_s) {
            (Some(ta), Some(tb)) if ta < tb => Dominance::A,
            (Some(ta), Some(tb)) if tb < ta => Dominance::B,
            _ => Dominance::Inconclusive,
        });
    }
    // 3: exactly one fully reliable.
    if full_a != full_b {
        return Ok(if full_a { Dominance::A } else { Dominance::B });
    }
    // 4: neither fully reliable; all three measures must agree.
    let (Some(max_a), Some(avg_a), Some(ta)) = (sa.max_size, sa.avg_size, sa.avg_time_s) else {
        return Ok(Dominance::Inconclusive);
    };
    let (Some(max_b), Some(avg_b), Some(tb)) = (sb.max_size, sb.avg_size, sb.avg_time_s) else {
        return Ok(Dominance::Inconclusive);
    };
    let a_wins =
        max_a >= max_b && avg_a >= avg_b && ta <= tb && (max_a > max_b || avg_a > avg_b || ta < tb);
    let b_wins =
        max_b >= max_a && avg_b >= avg_a && tb <= ta && (max_b > max_a || avg_b > avg_a || tb < ta);
    Ok(match (a_wins, b_wins) {
        (true, false) => Dominance::A,
        (false, true) => Dominance::B,
        _ => Dominance::Inconclusive,
    })
}

/// Builds an [`AlgorithmSummary`] from campaign records, grouping by
/// instance name. Success rates are relative to each record's own
/// target, so feed campaigns whose `tcs` is the instance's reference
/// size.
pub fn algorithm_summary_from_records(algorithm: &str, records: &[RunRecord]) -> AlgorithmSummary {
    let mut grouped: BTreeMap<String, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        grouped.entry(r.instance.clone()).or_default().push(r);
    }
    let instances = grouped
        .into_iter()
        .map(|(name, rs)| {
            let sizes: Vec<u32> = rs.iter().map(|r| r.clique_size).collect();
            let successes = rs.iter().filter(|r| r.success).count();
            let stats = InstanceStats {
                max_size: sizes.iter().max().copied(),
                avg_size: Some(sizes.iter().map(|&s| s as f64).sum::<f64>() / sizes.len() as f64),
                min_size: sizes.iter().min().copied(),
                success_rate: successes as f64 / rs.len() as f64,
                avg_time_s: Some(rs.iter().map(|r| r.time_s).sum::<f64>() / rs.len() as f64),
            };
            (name, stats)
        })
        .collect();
    AlgorithmSummary { algorithm: algorithm.to_string(), instances }
}

/// Pooled empirical CDFs of the per-perturbation measures across a
/// campaign's traces. Mobility is undefined at each run's first
/// perturbation and those events are skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct InstrumentationCdfs {
    pub improving_steps: Vec<(f64, f64)>,
    pub plateau_swaps: Vec<(f64, f64)>,
    pub penalized_vertices: Vec<(f64, f64)>,
    pub relative_mobility: Vec<(f64, f64)>,
}

pub fn aggregate_instrumentation(traces: &[Vec<PerturbationEvent>]) -> InstrumentationCdfs {
    let mut improving = Vec::new();
    let mut swaps = Vec::new();
    let mut penalized = Vec::new();
    let mut mobility = Vec::new();
    for trace in traces {
        for ev in trace {
            improving.push(ev.improving_steps as f64);
            swaps.push(ev.plateau_swaps as f64);
            penalized.push(ev.penalized_vertices as f64);
            if let Some(m) = ev.relative_mobility {
                mobility.push(m);
            }
        }
    }
    InstrumentationCdfs {
        improving_steps: rtd_cdf(&improving),
        plateau_swaps: rtd_cdf(&swaps),
        penalized_vertices: rtd_cdf(&penalized),
        relative_mobility: rtd_cdf(&mobility),
    }
}

// --- exports ---

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("unexpected header {got:?}")]
    BadHeader { got: String },
    #[error("field may not contain commas or quotes: {value:?}")]
    UnencodableField { value: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// The frozen run-record CSV header.
pub const RUN_CSV_HEADER: &str =
    "instance,run,seed,pd,tcs,max_steps,success,steps,time_s,clique_size,clique";

/// Renders records to CSV. The clique sits in one quoted field of
/// space-separated 1-based ids; times carry six decimals. The format
/// round-trips byte-identically through [`records_from_csv`].
pub fn records_to_csv(records: &[RunRecord]) -> Result<String, ExportError> {
    let mut out = String::from(RUN_CSV_HEADER);
    out.push('\n');
    for r in records {
        if r.instance.contains(',') || r.instance.contains('"') {
            return Err(ExportError::UnencodableField { value: r.instance.clone() });
        }
        let clique = r.clique.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{:.6},{},\"{}\"\n",
            r.instance,
            r.run,
            r.seed,
            r.pd,
            r.tcs,
            r.max_steps,
            r.success,
            r.steps,
            r.time_s,
            r.clique_size,
            clique
        ));
    }
    Ok(out)
}

pub fn records_from_csv(text: &str) -> Result<Vec<RunRecord>, ExportError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == RUN_CSV_HEADER => {}
        other => {
            return Err(ExportError::BadHeader {
                got: other.map(|(_, h)| h.to_string()).unwrap_or_default(),
            })
        }
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let bad = |msg: &str| ExportError::Malformed { line: lineno, msg: msg.to_string() };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(bad(&format!("expected 11 fields, got {}", fields.len())));
        }
        let quoted = fields[10];
        let clique_text = quoted
            .strip_prefix('"')
            .and_then(|s| s.strip_suffix('"'))
            .ok_or_else(|| bad("clique field must be quoted"))?;
        let clique: Vec<u32> = clique_text
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("bad clique id")))
            .collect::<Result<_, _>>()?;
        let record = RunRecord {
            instance: fields[0].to_string(),
            run: fields[1].parse().map_err(|_| bad("bad run index"))?,
            seed: fields[2].parse().map_err(|_| bad("bad seed"))?,
            pd: fields[3].parse().map_err(|_| bad("bad pd"))?,
            tcs: fields[4].parse().map_err(|_| bad("bad tcs"))?,
            max_steps: fields[5].parse().map_err(|_| bad("bad max_steps"))?,
            success: match fields[6] {
                "true" => true,
                "false" => false,
                _ => return Err(bad("bad success flag")),
            },
            steps: fields[7].parse().map_err(|_| bad("bad steps"))?,
            time_s: fields[8].parse().map_err(|_| bad("bad time"))?,
            clique_size: fields[9].parse().map_err(|_| bad("bad clique size"))?,
            clique,
        };
        if record.clique_size as usize != record.clique.len() {
            return Err(bad("clique_size disagrees with the clique field"));
        }
        records.push(record);
    }
    Ok(records)
}

/// One JSON object per line, mirroring the CSV fields exactly.
pub fn records_to_jsonl(records: &[RunRecord]) -> Result<String, ExportError> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn records_from_jsonl(text: &str) -> Result<Vec<RunRecord>, ExportError> {
    text.lines()
        .filter(|l| !l.is_empty())
        .map(|l| serde_json::from_str(l).map_err(ExportError::from))
        .collect()
}

/// The algorithm-summary CSV header used by the ranking command.
pub const SUMMARY_CSV_HEADER: &str =
    "algorithm,instance,max_size,avg_size,min_size,success_rate,avg_time_s";

pub fn summary_to_csv(s: &AlgorithmSummary) -> Result<String, ExportError> {
    let mut out = String::from(SUMMARY_CSV_HEADER);
    out.push('\n');
    let opt = |x: Option<String>| x.unwrap_or_default();
    for (instance, st) in &s.instances {
        for field in [s.algorithm.as_str(), instance.as_str()] {
            if field.contains(',') || field.contains('"') {
                return Err(ExportError::UnencodableField { value: field.to_string() });
            }
        }
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            s.algorithm,
            instance,
            opt(st.max_size.map(|v| v.to_string())),
            opt(st.avg_size.map(|v| v.to_string())),
            opt(st.min_size.map(|v| v.to_string())),
            st.success_rate,
            opt(st.avg_time_s.map(|v| v.to_string())),
        ));
    }
    Ok(out)
}

/// Parses a summary CSV holding exactly one algorithm's rows.
pub fn summary_from_csv(text: &str) -> Result<AlgorithmSummary, ExportError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == SUMMARY_CSV_HEADER => {}
        other => {
            return Err(ExportError::BadHeader {
                got: other.map(|(_, h)| h.to_string()).unwrap_or_default(),
            })
        }
    }
    let mut algorithm: Option<String> = None;
    let mut instances = BTreeMap::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let bad = |msg: &str| ExportError::Malformed { line: lineno, msg: msg.to_string() };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(bad(&format!("expected 7 fields, got {}", fields.len())));
        }
        match &algorithm {
            None => algorithm = Some(fields[0].to_string()),
            Some(name) if name != fields[0] => {
                return Err(bad("file mixes rows from different algorithms"))
            }
            _ => {}
        }
        fn optional<T: std::str::FromStr>(s: &str) -> Result<Option<T>, ()> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| ())
            }
        }
        let stats = InstanceStats {
            max_size: optional(fields[2]).map_err(|_| bad("bad max_size"))?,
            avg_size: optional(fields[3]).map_err(|_| bad("bad avg_size"))?,
            min_size: optional(fields[4]).map_err(|_| bad("bad min_size"))?,
            success_rate: fields[5].parse().map_err(|_| bad("bad success_rate"))?,
            avg_time_s: optional(fields[6]).map_err(|_| bad("bad avg_time_s"))?,
        };
        if instances.insert(fields[1].to_string(), stats).is_some() {
            return Err(bad("duplicate instance row"));
        }
    }
    Ok(AlgorithmSummary { algorithm: algorithm.unwrap_or_default(), instances })
}

/// Renders a `(value, cumulative probability)` list as two-column CSV.
pub fn cdf_to_csv(cdf: &[(f64, f64)]) -> String {
    let mut out = String::from("value,cum_prob\n");
    for (x, p) in cdf {
        out.push_str(&format!("{x},{p}\n"));
    }
    out
}
