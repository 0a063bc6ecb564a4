//! Lambda sweeps: per-row solves, error measurement against fixtures, and
//! CSV/JSON emission.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use oscphase::levin::SolverVariant;
use oscphase::solve::{eval_solution_many, solve, Solution, SolveConfig};
use serde::{Deserialize, Serialize};

use crate::fixtures::{reference_values, N_SAMPLES};
use crate::problems::{build_problem, Problem, ProblemId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

/// A sweep specification: which problem, which lambda grid, which solver
/// parameters.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSpec {
    pub problem: ProblemId,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub count: usize,
    pub spacing: Spacing,
    pub eps: f64,
    pub k: usize,
    pub variant: SolverVariant,
    /// Wall-clock repetitions per row; the median is reported.
    pub repeats: usize,
}

impl ExperimentSpec {
    pub fn single(problem: ProblemId, lambda: f64) -> Self {
        ExperimentSpec {
            problem,
            lambda_min: lambda,
            lambda_max: lambda,
            count: 1,
            spacing: Spacing::Log,
            eps: 1e-13,
            k: 16,
            variant: SolverVariant::Rrqr,
            repeats: 3,
        }
    }

    pub fn solve_config(&self) -> SolveConfig {
        SolveConfig {
            k: self.k,
            eps: self.eps,
            variant: self.variant,
            ..SolveConfig::default()
        }
    }

    /// The lambda grid (inclusive of both ends).
    pub fn lambdas(&self) -> Vec<f64> {
        if self.count <= 1 {
            return vec![self.lambda_min];
        }
        let n = self.count;
        (0..n)
            .map(|i| {
                let frac = i as f64 / (n as f64 - 1.0);
                match self.spacing {
                    Spacing::Linear => self.lambda_min + frac * (self.lambda_max - self.lambda_min),
                    Spacing::Log => {
                        10f64.powf(
                            self.lambda_min.log10()
                                + frac * (self.lambda_max.log10() - self.lambda_min.log10()),
                        )
                    }
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    /// Solve succeeded but no reference fixture exists for this lambda.
    NoReference,
    Failed(String),
}

/// One measured sweep row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub max_abs_err: Option<f64>,
    pub time_phase: f64,
    pub time_levin: f64,
    pub time_total: f64,
    pub n_coeffs_phase: usize,
    pub n_coeffs_levin: usize,
    pub status: RowStatus,
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values[values.len() / 2]
}

fn solve_problem(problem: &Problem, config: &SolveConfig) -> oscphase::Result<Solution> {
    let q = problem.q.clone();
    let f = problem.f.clone();
    solve(
        move |t| q(t),
        move |t| f(t),
        problem.interval,
        &problem.bcs,
        config,
    )
}

/// Solve one problem instance: median-of-`repeats` timings, plus the max
/// absolute error over the 10,000-point grid when a reference fixture
/// exists. Solve failures are recorded in the row, not propagated.
pub fn run_problem(spec: &ExperimentSpec, lambda: f64) -> SweepRow {
    let problem = build_problem(spec.problem, lambda);
    let config = spec.solve_config();
    let repeats = spec.repeats.max(1);

    let mut solution = None;
    let mut phase_times = Vec::with_capacity(repeats);
    let mut levin_times = Vec::with_capacity(repeats);
    let mut total_times = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let clock = Instant::now();
        match solve_problem(&problem, &config) {
            Ok(sol) => {
                total_times.push(clock.elapsed().as_secs_f64());
                phase_times.push(sol.report.time_phase);
                levin_times.push(sol.report.time_levin);
                solution = Some(sol);
            }
            Err(err) => {
                return SweepRow {
                    lambda,
                    max_abs_err: None,
                    time_phase: 0.0,
                    time_levin: 0.0,
                    time_total: 0.0,
                    n_coeffs_phase: 0,
                    n_coeffs_levin: 0,
                    status: RowStatus::Failed(err.to_string()),
                };
            }
        }
    }
    let solution = solution.expect("at least one repeat");

    let (max_abs_err, status) = match reference_values(spec.problem, lambda) {
        Ok(Some(fixture)) => {
            let grid = fixture.grid();
            match eval_solution_many(&solution, &grid) {
                Ok(values) => {
                    let err = values
                        .iter()
                        .zip(fixture.y.iter())
                        .map(|((y, _), want)| (y - want).abs())
                        .fold(0.0, f64::max);
                    (Some(err), RowStatus::Ok)
                }
                Err(e) => (None, RowStatus::Failed(e.to_string())),
            }
        }
        Ok(None) => (None, RowStatus::NoReference),
        Err(e) => (None, RowStatus::Failed(format!("fixture load failed: {e}"))),
    };

    SweepRow {
        lambda,
        max_abs_err,
        time_phase: median(phase_times),
        time_levin: median(levin_times),
        time_total: median(total_times),
        n_coeffs_phase: solution.report.n_coeffs_phase,
        n_coeffs_levin: solution.report.n_coeffs_levin,
        status,
    }
}

/// Run every row of the sweep sequentially.
pub fn run_sweep_seq(spec: &ExperimentSpec) -> Vec<SweepRow> {
    spec.lambdas()
        .into_iter()
        .map(|lambda| run_problem(spec, lambda))
        .collect()
}

/// Run every row of the sweep; rows are independent solves and execute in
/// parallel when the `parallel` feature is enabled.
#[cfg(feature = "parallel")]
pub fn run_sweep(spec: &ExperimentSpec) -> Vec<SweepRow> {
    use rayon::prelude::*;
    spec.lambdas()
        .into_par_iter()
        .map(|lambda| run_problem(spec, lambda))
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub fn run_sweep(spec: &ExperimentSpec) -> Vec<SweepRow> {
    run_sweep_seq(spec)
}

/// CSV emission with the fixed column set
/// `lambda,max_abs_err,time_phase,time_levin,time_total,n_coeffs_phase,n_coeffs_levin`.
/// A missing reference leaves `max_abs_err` empty.
pub fn write_csv(path: &Path, rows: &[SweepRow]) -> std::io::Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record([
        "lambda",
        "max_abs_err",
        "time_phase",
        "time_levin",
        "time_total",
        "n_coeffs_phase",
        "n_coeffs_levin",
    ])?;
    for row in rows {
        writer.write_record([
            format!("{}", row.lambda),
            row.max_abs_err.map_or(String::new(), |e| format!("{e}")),
            format!("{}", row.time_phase),
            format!("{}", row.time_levin),
            format!("{}", row.time_total),
            format!("{}", row.n_coeffs_phase),
            format!("{}", row.n_coeffs_levin),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Parse a sweep CSV back (used by round-trip checks).
pub fn read_csv(path: &Path) -> std::io::Result<Vec<(f64, Option<f64>, usize, usize)>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        let lambda: f64 = record[0].parse().map_err(bad_data)?;
        let err = if record[1].is_empty() {
            None
        } else {
            Some(record[1].parse().map_err(bad_data)?)
        };
        let n_phase: usize = record[5].parse().map_err(bad_data)?;
        let n_levin: usize = record[6].parse().map_err(bad_data)?;
        out.push((lambda, err, n_phase, n_levin));
    }
    Ok(out)
}

fn bad_data<E: std::error::Error + Send + Sync + 'static>(e: E) -> std::io::Error {
    std::io::Error::new(std::io::ErrorKind::InvalidData, e)
}

fn git_revision() -> String {
    std::process::Command::new("git")
        .args(["rev-parse", "--short", "HEAD"])
        .output()
        .ok()
        .filter(|out| out.status.success())
        .map(|out| String::from_utf8_lossy(&out.stdout).trim().to_string())
        .unwrap_or_else(|| "unknown".to_string())
}

/// The JSON mirror of a sweep: rows plus run metadata.
pub fn sweep_json(spec: &ExperimentSpec, rows: &[SweepRow]) -> serde_json::Value {
    serde_json::json!({
        "meta": {
            "problem": spec.problem.name(),
            "k": spec.k,
            "eps": spec.eps,
            "variant": spec.variant.to_string(),
            "spacing": spec.spacing,
            "lambda_min": spec.lambda_min,
            "lambda_max": spec.lambda_max,
            "count": spec.count,
            "repeats": spec.repeats,
            "n_samples": N_SAMPLES,
            "git_revision": git_revision(),
            "timestamp": chrono::Utc::now().to_rfc3339(),
        },
        "rows": rows,
    })
}

pub fn write_json(path: &Path, spec: &ExperimentSpec, rows: &[SweepRow]) -> std::io::Result<()> {
    let mut file = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut file, &sweep_json(spec, rows))?;
    file.write_all(b"\n")
}
