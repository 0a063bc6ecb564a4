//! End-to-end solver for `y'' + q(t) y = f(t)` under two-point boundary
//! conditions.
//!
//! The pipeline builds a nonoscillatory phase for the homogeneous equation,
//! then an adaptive Levin table for the running integral
//! `int_a^t exp(i alpha) f / sqrt(alpha') ds`, whose real and imaginary
//! parts are `U = int u f` and `V = int v f`. A particular solution is
//! `z = v U - u V` (so `z(a) = z'(a) = 0`), and the two free constants of
//! `y = c1 u + c2 v + z` are fitted to the boundary rows by a 2x2 solve.

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Stage};
use crate::levin::{adaptive_levin, LevinConfig, LevinTable, OscillatoryIntegrand, SolverVariant};
use crate::ode_solver::SolverConfig;
use crate::phase::{build_phase, PhaseFunction};

/// One boundary functional `w_a y(a) + wp_a y'(a) + w_b y(b) + wp_b y'(b)
/// = beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRow {
    pub w_a: f64,
    pub wp_a: f64,
    pub w_b: f64,
    pub wp_b: f64,
    pub beta: f64,
}

/// Two independent boundary rows. Terminal-value, initial-value, Dirichlet
/// and periodic-type conditions are all instances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryConditions {
    pub rows: [BoundaryRow; 2],
}

impl BoundaryConditions {
    pub fn initial_value(y_a: f64, yp_a: f64) -> Self {
        BoundaryConditions {
            rows: [
                BoundaryRow {
                    w_a: 1.0,
                    wp_a: 0.0,
                    w_b: 0.0,
                    wp_b: 0.0,
                    beta: y_a,
                },
                BoundaryRow {
                    w_a: 0.0,
                    wp_a: 1.0,
                    w_b: 0.0,
                    wp_b: 0.0,
                    beta: yp_a,
                },
            ],
        }
    }

    pub fn terminal_value(y_b: f64, yp_b: f64) -> Self {
        BoundaryConditions {
            rows: [
                BoundaryRow {
                    w_a: 0.0,
                    wp_a: 0.0,
                    w_b: 1.0,
                    wp_b: 0.0,
                    beta: y_b,
                },
                BoundaryRow {
                    w_a: 0.0,
                    wp_a: 0.0,
                    w_b: 0.0,
                    wp_b: 1.0,
                    beta: yp_b,
                },
            ],
        }
    }

    pub fn dirichlet(y_a: f64, y_b: f64) -> Self {
        BoundaryConditions {
            rows: [
                BoundaryRow {
                    w_a: 1.0,
                    wp_a: 0.0,
                    w_b: 0.0,
                    wp_b: 0.0,
                    beta: y_a,
                },
                BoundaryRow {
                    w_a: 0.0,
                    wp_a: 0.0,
                    w_b: 1.0,
                    wp_b: 0.0,
                    beta: y_b,
                },
            ],
        }
    }

    /// `y(a) = y(b)`, `y'(a) = y'(b)`.
    pub fn periodic() -> Self {
        BoundaryConditions {
            rows: [
                BoundaryRow {
                    w_a: 1.0,
                    wp_a: 0.0,
                    w_b: -1.0,
                    wp_b: 0.0,
                    beta: 0.0,
                },
                BoundaryRow {
                    w_a: 0.0,
                    wp_a: 1.0,
                    w_b: 0.0,
                    wp_b: -1.0,
                    beta: 0.0,
                },
            ],
        }
    }
}

/// Parameters for the full pipeline.
#[derive(Debug, Clone, Copy)]
pub struct SolveConfig {
    pub k: usize,
    pub eps: f64,
    pub variant: SolverVariant,
    pub max_intervals: usize,
    pub max_newton: usize,
    pub newton_tol: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            k: 16,
            eps: 1e-13,
            variant: SolverVariant::Rrqr,
            max_intervals: 4096,
            max_newton: 30,
            newton_tol: 1e-14,
        }
    }
}

impl SolveConfig {
    pub fn ode_config(&self) -> SolverConfig {
        SolverConfig {
            k: self.k,
            eps: self.eps,
            max_intervals: self.max_intervals,
            max_newton: self.max_newton,
            newton_tol: self.newton_tol,
        }
    }

    pub fn levin_config(&self) -> LevinConfig {
        LevinConfig {
            k: self.k,
            eps: self.eps,
            max_intervals: self.max_intervals,
            variant: self.variant,
        }
    }
}

/// Timings, sizes and conditioning of one solve.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolveReport {
    pub time_phase: f64,
    pub time_levin: f64,
    pub time_bc: f64,
    pub n_coeffs_phase: usize,
    pub n_coeffs_levin: usize,
    /// `eps0 * cond_2(M)` of the 2x2 boundary system: the attainable scale
    /// of boundary-condition residuals.
    pub residual_estimate: f64,
}

/// The Levin integrand of the pipeline: `g = alpha`, `g' = alpha'`,
/// amplitude `f / sqrt(alpha')`.
pub struct PhaseIntegrand<F: Fn(f64) -> f64 + Send + Sync> {
    pub phase: Arc<PhaseFunction>,
    pub f: F,
}

impl<F: Fn(f64) -> f64 + Send + Sync> OscillatoryIntegrand for PhaseIntegrand<F> {
    fn phase(&self, t: f64) -> f64 {
        self.phase.alpha().eval(t).expect("phase domain")
    }
    fn phase_derivative(&self, t: f64) -> f64 {
        self.phase.alpha_p().eval(t).expect("phase domain")
    }
    fn amplitude(&self, t: f64) -> f64 {
        (self.f)(t) / self.phase.alpha_p().eval(t).expect("phase domain").sqrt()
    }
}

/// A solved problem: `y = c1 u + c2 v + z`, evaluable anywhere in `[a, b]`.
pub struct Solution {
    pub phase: Arc<PhaseFunction>,
    pub table: LevinTable,
    pub c1: f64,
    pub c2: f64,
    pub report: SolveReport,
}

impl Serialize for Solution {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl std::fmt::Debug for Solution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Solution")
            .field("interval", &self.interval())
            .field("c1", &self.c1)
            .field("c2", &self.c2)
            .field("report", &self.report)
            .finish()
    }
}

impl Solution {
    pub fn interval(&self) -> (f64, f64) {
        self.phase.interval()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "phase": self.phase.to_json(),
            "table": self.table.to_json(),
            "c1": self.c1,
            "c2": self.c2,
            "report": serde_json::to_value(self.report).unwrap(),
        })
    }
}

/// The particular solution and derivative at `t`:
/// `z = v U - u V`, `z' = v' U - u' V` with `U + iV = integral_to(t)`
/// (the integrand terms cancel), so `z(a) = z'(a) = 0` by construction.
pub fn particular_eval(phase: &PhaseFunction, table: &LevinTable, t: f64) -> Result<(f64, f64)> {
    let integral = table.integral_to(t)?;
    let basis = phase.basis_at(t)?;
    let (big_u, big_v) = (integral.re, integral.im);
    Ok((
        basis.v * big_u - basis.u * big_v,
        basis.dv * big_u - basis.du * big_v,
    ))
}

/// Outcome of fitting the two free constants.
#[derive(Debug, Clone, Copy)]
pub struct FittedConstants {
    pub c1: f64,
    pub c2: f64,
    /// 2-norm condition number of the 2x2 boundary matrix.
    pub condition: f64,
}

/// Fit `c1, c2` so that `c1 u + c2 v + z` satisfies both boundary rows.
/// Near-singular systems (a homogeneous solution already matching the
/// homogeneous boundary rows) raise [`Error::Resonance`].
pub fn fit_constants(
    phase: &PhaseFunction,
    table: &LevinTable,
    bcs: &BoundaryConditions,
) -> Result<FittedConstants> {
    let (a, b) = phase.interval();
    let basis_a = phase.basis_at(a)?;
    let basis_b = phase.basis_at(b)?;
    let (z_a, zp_a) = particular_eval(phase, table, a)?;
    let (z_b, zp_b) = particular_eval(phase, table, b)?;

    let mut m = [[0.0_f64; 2]; 2];
    let mut rhs = [0.0_f64; 2];
    for (i, row) in bcs.rows.iter().enumerate() {
        m[i][0] = row.w_a * basis_a.u
            + row.wp_a * basis_a.du
            + row.w_b * basis_b.u
            + row.wp_b * basis_b.du;
        m[i][1] = row.w_a * basis_a.v
            + row.wp_a * basis_a.dv
            + row.w_b * basis_b.v
            + row.wp_b * basis_b.dv;
        rhs[i] = row.beta - (row.w_a * z_a + row.wp_a * zp_a + row.w_b * z_b + row.wp_b * zp_b);
    }

    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let frob_sq = m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1];
    let frob = frob_sq.sqrt();
    let threshold = 1e-12 * frob;
    if det.abs() <= threshold {
        return Err(Error::Resonance {
            det: det.abs(),
            threshold,
        });
    }
    let c1 = (rhs[0] * m[1][1] - rhs[1] * m[0][1]) / det;
    let c2 = (rhs[1] * m[0][0] - rhs[0] * m[1][0]) / det;

    // cond_2 of a 2x2 from its Frobenius norm and determinant
    let disc = (frob_sq * frob_sq - 4.0 * det * det).max(0.0).sqrt();
    let sigma_max_sq = 0.5 * (frob_sq + disc);
    let condition = sigma_max_sq / det.abs();

    Ok(FittedConstants { c1, c2, condition })
}

/// Solve `y'' + q y = f` on the interval under the given boundary rows.
pub fn solve<Q, F>(
    q: Q,
    f: F,
    interval: (f64, f64),
    bcs: &BoundaryConditions,
    config: &SolveConfig,
) -> Result<Solution>
where
    Q: Fn(f64) -> f64 + Sync,
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    let clock = Instant::now();
    let phase = Arc::new(
        build_phase(&q, interval, &config.ode_config()).map_err(|e| e.in_stage(Stage::Phase))?,
    );
    let time_phase = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let integrand = PhaseIntegrand {
        phase: Arc::clone(&phase),
        f,
    };
    let table = adaptive_levin(Arc::new(integrand), interval, &config.levin_config())
        .map_err(|e| e.in_stage(Stage::Levin))?;
    let time_levin = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let fitted = fit_constants(&phase, &table, bcs).map_err(|e| e.in_stage(Stage::BoundaryFit))?;
    let time_bc = clock.elapsed().as_secs_f64();

    let report = SolveReport {
        time_phase,
        time_levin,
        time_bc,
        n_coeffs_phase: phase.total_coeffs(),
        n_coeffs_levin: table.total_coeffs(),
        residual_estimate: f64::EPSILON * fitted.condition,
    };
    Ok(Solution {
        phase,
        table,
        c1: fitted.c1,
        c2: fitted.c2,
        report,
    })
}

/// `y` and `y'` at one point.
pub fn eval_solution(solution: &Solution, t: f64) -> Result<(f64, f64)> {
    let basis = solution.phase.basis_at(t)?;
    let (z, zp) = particular_eval(&solution.phase, &solution.table, t)?;
    Ok((
        solution.c1 * basis.u + solution.c2 * basis.v + z,
        solution.c1 * basis.du + solution.c2 * basis.dv + zp,
    ))
}

/// Evaluate at many points, sequentially.
pub fn eval_solution_many_seq(solution: &Solution, ts: &[f64]) -> Result<Vec<(f64, f64)>> {
    ts.iter().map(|&t| eval_solution(solution, t)).collect()
}

/// Evaluate at many points; data-parallel when the `parallel` feature is
/// enabled, with results identical to the sequential path.
#[cfg(feature = "parallel")]
pub fn eval_solution_many(solution: &Solution, ts: &[f64]) -> Result<Vec<(f64, f64)>> {
    use rayon::prelude::*;
    ts.par_iter().map(|&t| eval_solution(solution, t)).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn eval_solution_many(solution: &Solution, ts: &[f64]) -> Result<Vec<(f64, f64)>> {
    eval_solution_many_seq(solution, ts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SolveConfig {
        SolveConfig::default()
    }

    #[test]
    fn forced_unit_oscillator() {
        // y'' + y = 1, y(0) = y'(0) = 0 on [0, pi] has solution 1 - cos t
        let sol = solve(
            |_t| 1.0,
            |_t| 1.0,
            (0.0, std::f64::consts::PI),
            &BoundaryConditions::initial_value(0.0, 0.0),
            &cfg(),
        )
        .unwrap();
        assert!(sol.c1.abs() <= 1e-11, "c1 = {}", sol.c1);
        assert!(sol.c2.abs() <= 1e-11, "c2 = {}", sol.c2);
        for i in 0..=50 {
            let t = std::f64::consts::PI * i as f64 / 50.0;
            let (y, yp) = eval_solution(&sol, t).unwrap();
            assert!((y - (1.0 - t.cos())).abs() <= 1e-12, "t={t}");
            assert!((yp - t.sin()).abs() <= 1e-12, "t={t}");
        }
    }

    #[test]
    fn particular_solution_unit_case() {
        let sol = solve(
            |_t| 1.0,
            |_t| 1.0,
            (0.0, std::f64::consts::PI),
            &BoundaryConditions::initial_value(0.0, 0.0),
            &cfg(),
        )
        .unwrap();
        // z itself is 1 - cos t with derivative sin t
        for i in 0..=20 {
            let t = std::f64::consts::PI * i as f64 / 20.0;
            let (z, zp) = particular_eval(&sol.phase, &sol.table, t).unwrap();
            assert!((z - (1.0 - t.cos())).abs() <= 1e-12);
            assert!((zp - t.sin()).abs() <= 1e-12);
        }
        // exact zeros at the left endpoint
        let (z, zp) = particular_eval(&sol.phase, &sol.table, 0.0).unwrap();
        assert_eq!(z, 0.0);
        assert_eq!(zp, 0.0);
    }

    #[test]
    fn zero_forcing_gives_zero_particular() {
        let sol = solve(
            |t| 2.0 + (0.5 * t).cos(),
            |_t| 0.0,
            (0.0, 2.0),
            &BoundaryConditions::initial_value(1.0, 0.0),
            &cfg(),
        )
        .unwrap();
        for i in 0..=10 {
            let t = 2.0 * i as f64 / 10.0;
            let (z, zp) = particular_eval(&sol.phase, &sol.table, t).unwrap();
            assert_eq!(z, 0.0);
            assert_eq!(zp, 0.0);
        }
    }

    #[test]
    fn homogeneous_cosine_constants() {
        // y'' + y = 0, y(0) = 1, y'(0) = 0 -> y = cos t = 1*u + 0*v
        let sol = solve(
            |_t| 1.0,
            |_t| 0.0,
            (0.0, std::f64::consts::PI),
            &BoundaryConditions::initial_value(1.0, 0.0),
            &cfg(),
        )
        .unwrap();
        assert!((sol.c1 - 1.0).abs() <= 1e-11);
        assert!(sol.c2.abs() <= 1e-11);
        for i in 0..=20 {
            let t = std::f64::consts::PI * i as f64 / 20.0;
            let (y, _) = eval_solution(&sol, t).unwrap();
            assert!((y - t.cos()).abs() <= 1e-12);
        }
    }

    #[test]
    fn constant_coefficient_dirichlet_closed_form() {
        // y'' + 4y = 4 on [0,1], y(0) = y(1) = 0:
        // z = 1 - cos 2t, u = cos(2t)/sqrt2, v = sin(2t)/sqrt2
        // c1 = 0, c2 = -sqrt2 (1 - cos 2)/sin 2
        let sol = solve(
            |_t| 4.0,
            |_t| 4.0,
            (0.0, 1.0),
            &BoundaryConditions::dirichlet(0.0, 0.0),
            &cfg(),
        )
        .unwrap();
        let want_c2 = -2.0_f64.sqrt() * (1.0 - 2.0_f64.cos()) / 2.0_f64.sin();
        assert!(sol.c1.abs() <= 1e-11, "c1 = {}", sol.c1);
        assert!((sol.c2 - want_c2).abs() <= 1e-11 * want_c2.abs());
        // closed form check of y itself
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            let want = want_c2 * (2.0 * t).sin() / 2.0_f64.sqrt() + 1.0 - (2.0 * t).cos();
            let (y, _) = eval_solution(&sol, t).unwrap();
            assert!((y - want).abs() <= 1e-12, "t={t}");
        }
    }

    #[test]
    fn resonant_dirichlet_is_detected() {
        // q = pi^2 on [0,1] with Dirichlet rows: sin(pi t) solves the
        // homogeneous problem with both rows zero
        let err = solve(
            |_t| std::f64::consts::PI * std::f64::consts::PI,
            |_t| 1.0,
            (0.0, 1.0),
            &BoundaryConditions::dirichlet(0.0, 0.0),
            &cfg(),
        )
        .unwrap_err();
        match err {
            Error::Stage { stage, source } => {
                assert_eq!(stage, Stage::BoundaryFit);
                assert!(matches!(*source, Error::Resonance { .. }));
            }
            other => panic!("expected tagged resonance, got {other:?}"),
        }
    }

    #[test]
    fn boundary_rows_hold_after_solve() {
        let bcs = BoundaryConditions::dirichlet(0.3, -0.7);
        let sol = solve(
            |t| 40.0 + 10.0 * (3.0 * t).sin(),
            |t| (2.0 * t).cos(),
            (-1.0, 1.0),
            &bcs,
            &cfg(),
        )
        .unwrap();
        let (ya, _) = eval_solution(&sol, -1.0).unwrap();
        let (yb, _) = eval_solution(&sol, 1.0).unwrap();
        assert!((ya - 0.3).abs() <= 1e-10);
        assert!((yb + 0.7).abs() <= 1e-10);
        assert!(sol.report.n_coeffs_phase > 0);
        assert!(sol.report.n_coeffs_levin > 0);
    }

    #[test]
    fn initial_data_reproduced_at_left_endpoint() {
        let sol = solve(
            |t| 25.0 / (1.0 + t * t),
            |t| t,
            (0.0, 3.0),
            &BoundaryConditions::initial_value(0.4, 1.9),
            &cfg(),
        )
        .unwrap();
        let (y, yp) = eval_solution(&sol, 0.0).unwrap();
        assert!((y - 0.4).abs() <= 1e-11);
        assert!((yp - 1.9).abs() <= 2e-11);
    }

    #[test]
    fn linearity_in_forcing() {
        let q = |t: f64| 30.0 + t;
        let iv = (0.0, 2.0);
        let f1 = |t: f64| (3.0 * t).cos();
        let f2 = |t: f64| t * t;
        let s1 = solve(q, f1, iv, &BoundaryConditions::initial_value(0.7, -0.2), &cfg()).unwrap();
        let s2 = solve(q, f2, iv, &BoundaryConditions::initial_value(0.0, 0.0), &cfg()).unwrap();
        let both = solve(
            q,
            move |t| f1(t) + f2(t),
            iv,
            &BoundaryConditions::initial_value(0.7, -0.2),
            &cfg(),
        )
        .unwrap();
        let mut scale = 0.0_f64;
        for i in 0..=40 {
            let t = 2.0 * i as f64 / 40.0;
            scale = scale.max(eval_solution(&both, t).unwrap().0.abs());
        }
        for i in 0..=40 {
            let t = 2.0 * i as f64 / 40.0;
            let sum = eval_solution(&s1, t).unwrap().0 + eval_solution(&s2, t).unwrap().0;
            let got = eval_solution(&both, t).unwrap().0;
            assert!((sum - got).abs() <= 1e-10 * scale.max(1.0), "t={t}");
        }
    }

    #[test]
    fn many_point_eval_matches_sequential() {
        let sol = solve(
            |_t| 100.0,
            |t| t,
            (0.0, 1.0),
            &BoundaryConditions::initial_value(1.0, 0.0),
            &cfg(),
        )
        .unwrap();
        let ts: Vec<f64> = (0..500).map(|i| i as f64 / 499.0).collect();
        let par = eval_solution_many(&sol, &ts).unwrap();
        let seq = eval_solution_many_seq(&sol, &ts).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn solution_json_bundle() {
        let sol = solve(
            |_t| 9.0,
            |_t| 1.0,
            (0.0, 1.0),
            &BoundaryConditions::initial_value(0.0, 0.0),
            &cfg(),
        )
        .unwrap();
        let v = sol.to_json();
        for key in ["phase", "table", "c1", "c2", "report"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        let text = serde_json::to_string(&sol).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(parsed["report"]["n_coeffs_phase"].as_u64().unwrap() > 0);
    }
}
