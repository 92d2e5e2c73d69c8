//! Batch runs of the three alignment presets over a log: recovery,
//! detection, parameter sweeps and timing.
//!
//! Cases are processed in parallel with rayon; results keep log order and
//! counts are summed before any ratio is taken, so outputs do not depend on
//! the number of workers.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::align::{align_with, Alignment, CostFunction, SearchOptions, MIN_EPSILON};
use crate::builders::{build_classic_product, build_sync_product, build_weighted_trace_model};
use crate::error::{Error, Result};
use crate::eval::{classify_moves, correct_positions, recover, Confusion, EvalReport};
use crate::io::ReportRow;
use crate::noise::GroundTruth;
use crate::petri::PetriNet;
use crate::problog::{argmax_trace, DetTrace, ProbTrace};

/// Trust threshold of the low-trust baseline.
pub const LOWER_TRUST_EPSILON: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Algorithm {
    /// Unit costs on the most probable activity of each event.
    Standard,
    /// Log-probability costs on the full distribution.
    ProbCost { epsilon: f64 },
    /// [`Algorithm::ProbCost`] at [`LOWER_TRUST_EPSILON`].
    LowerTrust,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Standard => "standard",
            Algorithm::ProbCost { .. } => "probcost",
            Algorithm::LowerTrust => "lowertrust",
        }
    }

    pub fn cost_function(&self) -> Result<CostFunction> {
        match *self {
            Algorithm::Standard => Ok(CostFunction::Standard),
            Algorithm::ProbCost { epsilon } => CostFunction::weighted(epsilon),
            Algorithm::LowerTrust => CostFunction::weighted(LOWER_TRUST_EPSILON),
        }
    }

    pub fn epsilon(&self) -> Option<f64> {
        match *self {
            Algorithm::Standard => None,
            Algorithm::ProbCost { epsilon } => Some(epsilon),
            Algorithm::LowerTrust => Some(LOWER_TRUST_EPSILON),
        }
    }
}

/// Align one trace the way `algorithm` prescribes.
pub fn align_case(
    model: &PetriNet,
    trace: &ProbTrace,
    algorithm: Algorithm,
    options: &SearchOptions,
) -> Result<Alignment> {
    let cf = algorithm.cost_function()?;
    let product = match algorithm {
        Algorithm::Standard => build_classic_product(model, &argmax_trace(trace))?,
        _ => build_sync_product(model, &build_weighted_trace_model(trace)?)?,
    };
    align_with(&product, cf, options)
}

pub struct CaseOutcome {
    pub case_id: String,
    pub result: Result<Alignment>,
    /// Product construction plus search.
    pub elapsed: Duration,
}

pub fn run_suite(
    model: &PetriNet,
    traces: &[ProbTrace],
    algorithm: Algorithm,
    options: &SearchOptions,
) -> Vec<CaseOutcome> {
    traces
        .par_iter()
        .map(|t| {
            let started = Instant::now();
            let result = align_case(model, t, algorithm, options);
            CaseOutcome { case_id: t.case_id.clone(), result, elapsed: started.elapsed() }
        })
        .collect()
}

fn first_error(outcomes: &[CaseOutcome]) -> Result<Vec<&Alignment>> {
    outcomes
        .iter()
        .map(|o| {
            o.result.as_ref().map_err(|e| Error::InvalidInput(format!("case `{}` failed: {e}", o.case_id)))
        })
        .collect()
}

fn check_cases(left: &[String], right: &[String]) -> Result<()> {
    if left.len() != right.len() {
        return Err(Error::LengthMismatch { left: left.len(), right: right.len() });
    }
    if let Some((a, b)) = left.iter().zip(right).find(|(a, b)| a != b) {
        return Err(Error::InvalidInput(format!("case `{a}` does not match case `{b}`")));
    }
    Ok(())
}

/// Correctly recovered events and total events, pooled over all cases.
pub fn recovery_counts(outcomes: &[CaseOutcome], originals: &[DetTrace]) -> Result<(usize, usize)> {
    let ids: Vec<String> = outcomes.iter().map(|o| o.case_id.clone()).collect();
    check_cases(&ids, &originals.iter().map(|t| t.case_id.clone()).collect::<Vec<_>>())?;
    let mut correct = 0;
    let mut total = 0;
    for (a, orig) in first_error(outcomes)?.into_iter().zip(originals) {
        let r = recover(a, orig.case_id.clone())?;
        if r.activities.len() != orig.len() {
            return Err(Error::LengthMismatch { left: r.activities.len(), right: orig.len() });
        }
        correct += correct_positions(&r, orig);
        total += orig.len();
    }
    Ok((correct, total))
}

pub fn recovery_accuracy_of(outcomes: &[CaseOutcome], originals: &[DetTrace]) -> Result<f64> {
    let (c, t) = recovery_counts(outcomes, originals)?;
    Ok(if t == 0 { 0.0 } else { c as f64 / t as f64 })
}

/// Recovery accuracy of simply taking the most probable activity per event.
pub fn argmax_accuracy(traces: &[ProbTrace], originals: &[DetTrace]) -> Result<f64> {
    check_cases(
        &traces.iter().map(|t| t.case_id.clone()).collect::<Vec<_>>(),
        &originals.iter().map(|t| t.case_id.clone()).collect::<Vec<_>>(),
    )?;
    let mut correct = 0;
    let mut total = 0;
    for (t, o) in traces.iter().zip(originals) {
        let guess = argmax_trace(t);
        correct += guess.activities().iter().zip(o.activities()).filter(|(a, b)| a == b).count();
        total += o.len();
    }
    Ok(if total == 0 { 0.0 } else { correct as f64 / total as f64 })
}

/// Confusion counts of move-based predictions against ground-truth labels.
pub fn detection_counts(outcomes: &[CaseOutcome], truth: &[GroundTruth]) -> Result<Confusion> {
    let ids: Vec<String> = outcomes.iter().map(|o| o.case_id.clone()).collect();
    check_cases(&ids, &truth.iter().map(|t| t.case_id.clone()).collect::<Vec<_>>())?;
    first_error(outcomes)?
        .into_iter()
        .zip(truth)
        .map(|(a, gt)| Confusion::tally(&classify_moves(a), &gt.labels()))
        .sum()
}

fn total_seconds(outcomes: &[CaseOutcome]) -> f64 {
    outcomes.iter().map(|o| o.elapsed.as_secs_f64()).sum()
}

/// One detection run: report row plus the raw counts behind it.
pub struct DetectionResult {
    pub row: ReportRow,
    pub report: EvalReport,
    pub outcomes: Vec<CaseOutcome>,
}

pub fn detect(
    model: &PetriNet,
    traces: &[ProbTrace],
    truth: &[GroundTruth],
    t_d: f64,
    algorithm: Algorithm,
    options: &SearchOptions,
) -> Result<DetectionResult> {
    algorithm.cost_function()?;
    let outcomes = run_suite(model, traces, algorithm, options);
    let report = EvalReport::from_counts(detection_counts(&outcomes, truth)?);
    let row =
        ReportRow::new(algorithm.epsilon(), Some(t_d), algorithm.name(), &report, total_seconds(&outcomes));
    Ok(DetectionResult { row, report, outcomes })
}

/// `start, start + step, ...` up to `stop`, with values above `1 - 1e-6`
/// replaced by that bound.
pub fn epsilon_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    let raw = linear_grid(start, stop, step)?;
    let mut out: Vec<f64> = Vec::with_capacity(raw.len());
    for x in raw {
        let x = x.clamp(MIN_EPSILON, 1.0 - MIN_EPSILON);
        if out.last() != Some(&x) {
            out.push(x);
        }
    }
    Ok(out)
}

/// Evenly spaced points, rounded to 12 decimals to avoid drift.
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::InvalidInput(format!("bad grid {start}..{stop} step {step}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect())
}

/// Alignments for a set of algorithms, computed once and reused by sweeps.
fn predictions(
    model: &PetriNet,
    traces: &[ProbTrace],
    algorithm: Algorithm,
    options: &SearchOptions,
) -> Result<(Vec<CaseOutcome>, f64)> {
    algorithm.cost_function()?;
    let outcomes = run_suite(model, traces, algorithm, options);
    first_error(&outcomes)?;
    let secs = total_seconds(&outcomes);
    Ok((outcomes, secs))
}

fn row_for(
    outcomes: &[CaseOutcome],
    truth: &[GroundTruth],
    t_d: f64,
    algorithm: Algorithm,
    secs: f64,
) -> Result<ReportRow> {
    let report = EvalReport::from_counts(detection_counts(outcomes, truth)?);
    Ok(ReportRow::new(algorithm.epsilon(), Some(t_d), algorithm.name(), &report, secs))
}

/// Detection quality over an ε grid at fixed `t_d`. Rows per grid point:
/// standard, probcost, lowertrust.
pub fn sweep_epsilon(
    model: &PetriNet,
    traces: &[ProbTrace],
    truth: &[GroundTruth],
    t_d: f64,
    grid: &[f64],
    options: &SearchOptions,
) -> Result<Vec<ReportRow>> {
    let labels: Vec<GroundTruth> = truth.iter().map(|g| g.relabelled(t_d)).collect();
    let (std_out, std_s) = predictions(model, traces, Algorithm::Standard, options)?;
    let (low_out, low_s) = predictions(model, traces, Algorithm::LowerTrust, options)?;
    let std_row = row_for(&std_out, &labels, t_d, Algorithm::Standard, std_s)?;
    let low_row = row_for(&low_out, &labels, t_d, Algorithm::LowerTrust, low_s)?;
    let mut rows = Vec::with_capacity(grid.len() * 3);
    for &epsilon in grid {
        let alg = Algorithm::ProbCost { epsilon };
        let (out, secs) = predictions(model, traces, alg, options)?;
        let mut s = std_row.clone();
        s.epsilon = Some(epsilon);
        rows.push(s);
        rows.push(row_for(&out, &labels, t_d, alg, secs)?);
        rows.push(low_row.clone());
    }
    Ok(rows)
}

/// Detection quality over a `t_d` grid; probcost uses ε = `t_d` clamped to
/// the admissible range.
pub fn sweep_t_d(
    model: &PetriNet,
    traces: &[ProbTrace],
    truth: &[GroundTruth],
    grid: &[f64],
    options: &SearchOptions,
) -> Result<Vec<ReportRow>> {
    if let Some(bad) = grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::InvalidInput(format!("t_d {bad} is outside [0, 1]")));
    }
    let (std_out, std_s) = predictions(model, traces, Algorithm::Standard, options)?;
    let (low_out, low_s) = predictions(model, traces, Algorithm::LowerTrust, options)?;
    let mut rows = Vec::with_capacity(grid.len() * 3);
    for &t_d in grid {
        let labels: Vec<GroundTruth> = truth.iter().map(|g| g.relabelled(t_d)).collect();
        let alg = Algorithm::ProbCost { epsilon: t_d.clamp(MIN_EPSILON, 1.0 - MIN_EPSILON) };
        let (out, secs) = predictions(model, traces, alg, options)?;
        rows.push(row_for(&std_out, &labels, t_d, Algorithm::Standard, std_s)?);
        rows.push(row_for(&out, &labels, t_d, alg, secs)?);
        rows.push(row_for(&low_out, &labels, t_d, Algorithm::LowerTrust, low_s)?);
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct VariantTiming {
    pub algorithm: String,
    pub epsilon: Option<f64>,
    pub total_s: f64,
    pub mean_case_s: f64,
    pub median_case_s: f64,
    pub max_expanded: u64,
    pub mean_product_transitions: f64,
    pub failures: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub cases: usize,
    pub events_min: usize,
    pub events_max: usize,
    pub events_avg: f64,
    pub events_median: f64,
    pub model_places: usize,
    pub model_transitions: usize,
    pub variants: Vec<VariantTiming>,
    /// Per case: standard time, probcost time, in seconds.
    #[serde(skip)]
    pub per_case: Vec<(f64, f64)>,
}

pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Time standard (argmax) against probcost(`epsilon`) case by case, in one
/// thread so the two variants compete under the same conditions.
pub fn bench(
    model: &PetriNet,
    traces: &[ProbTrace],
    epsilon: f64,
    options: &SearchOptions,
) -> Result<BenchReport> {
    if traces.is_empty() {
        return Err(Error::InvalidInput("no cases to benchmark".into()));
    }
    let variants = [Algorithm::Standard, Algorithm::ProbCost { epsilon }];
    for v in &variants {
        v.cost_function()?;
    }
    let mut times: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    let mut expanded = [0u64; 2];
    let mut sizes = [0usize; 2];
    let mut failures = [0usize; 2];
    for t in traces {
        for (k, v) in variants.iter().enumerate() {
            let started = Instant::now();
            let product = match v {
                Algorithm::Standard => build_classic_product(model, &argmax_trace(t)),
                _ => build_weighted_trace_model(t).and_then(|w| build_sync_product(model, &w)),
            }?;
            let result = align_with(&product, v.cost_function()?, options);
            times[k].push(started.elapsed().as_secs_f64());
            sizes[k] += product.net.transitions.len();
            match result {
                Ok(a) => expanded[k] = expanded[k].max(a.stats.expanded),
                Err(_) => failures[k] += 1,
            }
        }
    }
    let per_case = times[0].iter().copied().zip(times[1].iter().copied()).collect();
    let n = traces.len();
    let mut lengths: Vec<f64> = traces.iter().map(|t| t.len() as f64).collect();
    let variants = variants
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let total: f64 = times[k].iter().sum();
            VariantTiming {
                algorithm: v.name().to_string(),
                epsilon: v.epsilon(),
                total_s: total,
                mean_case_s: total / n as f64,
                median_case_s: median(&mut times[k].clone()),
                max_expanded: expanded[k],
                mean_product_transitions: sizes[k] as f64 / n as f64,
                failures: failures[k],
            }
        })
        .collect();
    Ok(BenchReport {
        cases: n,
        events_min: traces.iter().map(ProbTrace::len).min().unwrap_or(0),
        events_max: traces.iter().map(ProbTrace::len).max().unwrap_or(0),
        events_avg: lengths.iter().sum::<f64>() / n as f64,
        events_median: median(&mut lengths),
        model_places: model.places.len(),
        model_transitions: model.transitions.len(),
        variants,
        per_case,
    })
}
