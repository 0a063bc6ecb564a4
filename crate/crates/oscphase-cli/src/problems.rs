//! The four built-in benchmark problems, parameterized by the frequency
//! parameter lambda.

use std::f64::consts::PI;
use std::sync::Arc;

use oscphase::solve::BoundaryConditions;
use serde::{Deserialize, Serialize};

/// Gamma(2/3), used by the closed-form terminal data of the `airy` problem.
pub const GAMMA_TWO_THIRDS: f64 = 1.3541179394264005;
/// Gamma(-1/3).
pub const GAMMA_MINUS_ONE_THIRD: f64 = -4.062353818279202;
/// Ai(0) = 1 / (3^(2/3) Gamma(2/3)).
pub const AIRY_AI_ZERO: f64 = 0.3550280538878172;
/// Ai'(0) = Gamma(-1/3) / (2 pi 3^(5/6)).
pub const AIRY_AI_PRIME_ZERO: f64 = -0.2588194037928068;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProblemId {
    /// y'' - lambda^2 t y = lambda^2 t^2 on (-10, 0), terminal data chosen
    /// so that y = -t + Ai(lambda^(2/3) t).
    Airy,
    /// y'' + lambda^2/(0.01 + t^2) y = lambda^2 (1+t) cos(13 t^2) on (0, 1),
    /// y(0) = y'(0) = 1.
    Ivp2,
    /// y'' + lambda^3 (3/2 + cos(ln(lambda) t)) / (1 + lambda e^t) y =
    /// lambda^2 / sqrt(2+t) on (-1, 1), y(-1) = y(1) = 0.
    Bvp3,
    /// y'' + lambda^2 (2 + t^2 cos lambda) / (1 + t^2) y =
    /// lambda^2 cos(3 t^2) on (-1, 1), periodic-type rows
    /// y(-1) = y(1), y'(-1) = y'(1).
    Bvp4,
}

impl ProblemId {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemId::Airy => "airy",
            ProblemId::Ivp2 => "ivp2",
            ProblemId::Bvp3 => "bvp3",
            ProblemId::Bvp4 => "bvp4",
        }
    }

    pub fn all() -> [ProblemId; 4] {
        [
            ProblemId::Airy,
            ProblemId::Ivp2,
            ProblemId::Bvp3,
            ProblemId::Bvp4,
        ]
    }
}

impl std::fmt::Display for ProblemId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl std::str::FromStr for ProblemId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "airy" => Ok(ProblemId::Airy),
            "ivp2" => Ok(ProblemId::Ivp2),
            "bvp3" => Ok(ProblemId::Bvp3),
            "bvp4" => Ok(ProblemId::Bvp4),
            other => Err(format!("unknown problem `{other}`")),
        }
    }
}

/// A fully specified instance: coefficient, forcing, interval and boundary
/// rows.
pub struct Problem {
    pub id: ProblemId,
    pub lambda: f64,
    pub interval: (f64, f64),
    pub q: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub bcs: BoundaryConditions,
}

/// Instantiate a built-in problem at one value of lambda.
pub fn build_problem(id: ProblemId, lambda: f64) -> Problem {
    match id {
        ProblemId::Airy => {
            let lam_sq = lambda * lambda;
            // terminal data of the closed-form solution -t + Ai(lambda^(2/3) t):
            // y(0) = Ai(0), y'(0) = -1 + lambda^(2/3) Ai'(0)
            let y_b = 1.0 / (3.0_f64.powf(2.0 / 3.0) * GAMMA_TWO_THIRDS);
            let yp_b = -1.0
                + lambda.powf(2.0 / 3.0) * GAMMA_MINUS_ONE_THIRD
                    / (2.0 * PI * 3.0_f64.powf(5.0 / 6.0));
            Problem {
                id,
                lambda,
                interval: (-10.0, 0.0),
                q: Arc::new(move |t| -lam_sq * t),
                f: Arc::new(move |t| lam_sq * t * t),
                bcs: BoundaryConditions::terminal_value(y_b, yp_b),
            }
        }
        ProblemId::Ivp2 => {
            let lam_sq = lambda * lambda;
            Problem {
                id,
                lambda,
                interval: (0.0, 1.0),
                q: Arc::new(move |t| lam_sq / (0.01 + t * t)),
                f: Arc::new(move |t| lam_sq * (1.0 + t) * (13.0 * t * t).cos()),
                bcs: BoundaryConditions::initial_value(1.0, 1.0),
            }
        }
        ProblemId::Bvp3 => {
            let lam_cube = lambda * lambda * lambda;
            let lam_sq = lambda * lambda;
            let log_lambda = lambda.ln();
            Problem {
                id,
                lambda,
                interval: (-1.0, 1.0),
                q: Arc::new(move |t| {
                    lam_cube * (1.5 + (log_lambda * t).cos()) / (1.0 + lambda * t.exp())
                }),
                f: Arc::new(move |t| lam_sq / (2.0 + t).sqrt()),
                bcs: BoundaryConditions::dirichlet(0.0, 0.0),
            }
        }
        ProblemId::Bvp4 => {
            let lam_sq = lambda * lambda;
            let cos_lambda = lambda.cos();
            Problem {
                id,
                lambda,
                interval: (-1.0, 1.0),
                q: Arc::new(move |t| lam_sq * (2.0 + t * t * cos_lambda) / (1.0 + t * t)),
                f: Arc::new(move |t| lam_sq * (3.0 * t * t).cos()),
                bcs: BoundaryConditions::periodic(),
            }
        }
    }
}
