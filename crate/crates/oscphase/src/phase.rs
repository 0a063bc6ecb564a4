//! Nonoscillatory phase functions for `y'' + q(t) y = 0` with `q > 0`.
//!
//! Almost every solution of the nonlinear equation satisfied by the
//! derivative of a phase function is oscillatory; the slowly varying one is
//! singled out with a windowed coefficient: `q` is blended into the constant
//! `nu^2 = q((a+b)/2)` by an erf ramp, a terminal value solve for the
//! windowed problem supplies nonoscillatory data at `a`, and an initial
//! value solve with the true coefficient extends it across `[a, b]`. The
//! phase itself is recovered by spectral integration with `alpha(a) = 0`.
//!
//! `u = cos(alpha)/sqrt(alpha')` and `v = sin(alpha)/sqrt(alpha')` then form
//! a basis of the homogeneous solution space with Wronskian exactly one.

use std::cell::Cell;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::chebyshev::{extremal_nodes, PiecewiseChebyshevExpansion};
use crate::error::{Error, Result};
use crate::ode_solver::{solve_ivp, solve_tvp, Inadmissible, OdeSystem, SolverConfig};
use crate::quadrature;
use crate::special::erf;

/// The windowed coefficient: equal to `q` near `a`, equal to the constant
/// `nu^2 = q((a+b)/2)` near `b`, blended by an erf ramp whose width makes
/// the window flat to machine precision at both endpoints.
pub struct WindowedProblem<'a, Q: Fn(f64) -> f64> {
    nu: f64,
    low: f64,
    high: f64,
    q: &'a Q,
}

impl<'a, Q: Fn(f64) -> f64> WindowedProblem<'a, Q> {
    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// The erf window, 0 at `a` and 1 at `b` to machine precision.
    pub fn phi(&self, t: f64) -> f64 {
        let mid = 0.5 * (self.low + self.high);
        0.5 * (1.0 + erf(12.0 / (self.high - self.low) * (t - mid)))
    }

    pub fn q_tilde(&self, t: f64) -> f64 {
        let phi = self.phi(t);
        phi * self.nu * self.nu + (1.0 - phi) * (self.q)(t)
    }
}

/// Build the windowed problem. Fails if `q` is not positive at the midpoint.
pub fn window<Q: Fn(f64) -> f64>(q: &Q, interval: (f64, f64)) -> Result<WindowedProblem<'_, Q>> {
    let (a, b) = interval;
    if !(a < b) {
        return Err(Error::InvalidArgument(format!(
            "invalid interval [{a}, {b}]"
        )));
    }
    let mid = 0.5 * (a + b);
    let q_mid = q(mid);
    if !(q_mid > 0.0) {
        return Err(Error::InvalidCoefficient {
            t: mid,
            value: q_mid,
        });
    }
    Ok(WindowedProblem {
        nu: q_mid.sqrt(),
        low: a,
        high: b,
        q,
    })
}

/// First order system in `(r, r')` with `r = alpha'`, obtained by solving
/// the third order phase equation for its highest derivative:
///
/// ```text
/// r'' = 2 r (q(t) - r^2) + (3/2) r'^2 / r.
/// ```
///
/// Evaluation with `r <= 0` reports an inadmissible state, which makes the
/// adaptive solver bisect instead of continuing into the complex branch.
pub struct KummerSystem<Q: Fn(f64) -> f64 + Sync> {
    q: Q,
}

pub fn kummer_system<Q: Fn(f64) -> f64 + Sync>(q: Q) -> KummerSystem<Q> {
    KummerSystem { q }
}

impl<Q: Fn(f64) -> f64 + Sync> OdeSystem for KummerSystem<Q> {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> std::result::Result<(), Inadmissible> {
        let (r, rp) = (y[0], y[1]);
        if r <= 0.0 {
            return Err(Inadmissible { t });
        }
        dy[0] = rp;
        dy[1] = 2.0 * r * ((self.q)(t) - r * r) + 1.5 * rp * rp / r;
        Ok(())
    }

    fn jacobian(
        &self,
        t: f64,
        y: &[f64],
        jac: &mut [f64],
    ) -> std::result::Result<(), Inadmissible> {
        let (r, rp) = (y[0], y[1]);
        if r <= 0.0 {
            return Err(Inadmissible { t });
        }
        jac[0] = 0.0;
        jac[1] = 1.0;
        jac[2] = 2.0 * (self.q)(t) - 6.0 * r * r - 1.5 * (rp / r) * (rp / r);
        jac[3] = 3.0 * rp / r;
        Ok(())
    }
}

/// Values of the homogeneous basis and its derivative at one point.
#[derive(Debug, Clone, Copy)]
pub struct BasisValues {
    pub u: f64,
    pub v: f64,
    pub du: f64,
    pub dv: f64,
}

/// A nonoscillatory phase function: piecewise Chebyshev expansions of
/// `alpha`, `alpha'` and `alpha''` on `[a, b]`, with `alpha' > 0` and
/// `alpha(a) = 0`.
#[derive(Debug, Clone)]
pub struct PhaseFunction {
    interval: (f64, f64),
    alpha: PiecewiseChebyshevExpansion<f64>,
    alpha_p: PiecewiseChebyshevExpansion<f64>,
    alpha_pp: PiecewiseChebyshevExpansion<f64>,
}

impl PhaseFunction {
    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn alpha(&self) -> &PiecewiseChebyshevExpansion<f64> {
        &self.alpha
    }

    pub fn alpha_p(&self) -> &PiecewiseChebyshevExpansion<f64> {
        &self.alpha_p
    }

    pub fn alpha_pp(&self) -> &PiecewiseChebyshevExpansion<f64> {
        &self.alpha_pp
    }

    /// Total Chebyshev coefficient count of the stored `alpha` expansion.
    pub fn total_coeffs(&self) -> usize {
        self.alpha.total_coeffs()
    }

    /// `u`, `v` and their derivatives at `t`:
    ///
    /// ```text
    /// u  =  cos(alpha)/sqrt(alpha')
    /// u' = -sin(alpha) sqrt(alpha') - cos(alpha) alpha'' / (2 alpha'^{3/2})
    /// ```
    /// and the sine counterparts.
    pub fn basis_at(&self, t: f64) -> Result<BasisValues> {
        let alpha = self.alpha.eval(t)?;
        let ap = self.alpha_p.eval(t)?;
        let app = self.alpha_pp.eval(t)?;
        if !(ap > 0.0) {
            return Err(Error::NonpositiveFrequency { t });
        }
        let root = ap.sqrt();
        let (sin, cos) = alpha.sin_cos();
        let damp = app / (2.0 * ap * root);
        Ok(BasisValues {
            u: cos / root,
            v: sin / root,
            du: -sin * root - cos * damp,
            dv: cos * root - sin * damp,
        })
    }

    /// The Riccati-equation solution `i alpha' - alpha''/(2 alpha')`, the
    /// logarithmic derivative of `exp(i alpha)/sqrt(alpha')`.
    pub fn riccati_at(&self, t: f64) -> Result<Complex64> {
        let ap = self.alpha_p.eval(t)?;
        let app = self.alpha_pp.eval(t)?;
        Ok(Complex64::new(-app / (2.0 * ap), ap))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "interval": [self.interval.0, self.interval.1],
            "alpha": self.alpha.to_json(),
            "alpha_p": self.alpha_p.to_json(),
            "alpha_pp": self.alpha_pp.to_json(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = || Error::InvalidArgument("malformed phase-function JSON".into());
        let iv = v
            .get("interval")
            .and_then(|x| x.as_array())
            .ok_or_else(bad)?;
        if iv.len() != 2 {
            return Err(bad());
        }
        Ok(PhaseFunction {
            interval: (
                iv[0].as_f64().ok_or_else(bad)?,
                iv[1].as_f64().ok_or_else(bad)?,
            ),
            alpha: PiecewiseChebyshevExpansion::from_json(v.get("alpha").ok_or_else(bad)?)?,
            alpha_p: PiecewiseChebyshevExpansion::from_json(v.get("alpha_p").ok_or_else(bad)?)?,
            alpha_pp: PiecewiseChebyshevExpansion::from_json(v.get("alpha_pp").ok_or_else(bad)?)?,
        })
    }
}

impl Serialize for PhaseFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PhaseFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(deserializer)?;
        Self::from_json(&v).map_err(D::Error::custom)
    }
}

/// Construct a nonoscillatory phase function for `y'' + q y = 0` on the
/// interval.
///
/// Stage 1 solves the windowed problem backwards from `(nu, 0)` at `b`;
/// only the values of `(alpha', alpha'')` at `a` are kept. Stage 2 solves
/// the true problem forwards from those values, and `alpha` is the
/// spectral antiderivative of `alpha'` anchored at `alpha(a) = 0`.
pub fn build_phase<Q: Fn(f64) -> f64 + Sync>(
    q: &Q,
    interval: (f64, f64),
    config: &SolverConfig,
) -> Result<PhaseFunction> {
    let (a, _b) = interval;
    let win = window(q, interval)?;
    let nu = win.nu();

    let stage1 = solve_tvp(
        &kummer_system(|t| win.q_tilde(t)),
        interval,
        &[nu, 0.0],
        config,
    )?;
    let rp_a = stage1.eval(0, a)?;
    let rpp_a = stage1.eval(1, a)?;
    if !(rp_a > 0.0) {
        return Err(Error::NonpositiveFrequency { t: a });
    }

    let stage2 = solve_ivp(&kummer_system(|t| q(t)), interval, &[rp_a, rpp_a], config)?;
    let mut components = stage2.into_components();
    let alpha_pp = components.pop().expect("two components");
    let alpha_p = components.pop().expect("two components");

    for piece in alpha_p.pieces() {
        let nodes = extremal_nodes(piece.len().max(2), piece.interval())?;
        for &t in &nodes {
            if !(piece.eval(t)? > 0.0) {
                return Err(Error::NonpositiveFrequency { t });
            }
        }
    }

    let alpha = alpha_p.antiderivative(0.0)?;
    Ok(PhaseFunction {
        interval,
        alpha,
        alpha_p,
        alpha_pp,
    })
}

/// The Liouville-Green (leading order) phase `int_a^t sqrt(q(s)) ds`,
/// computed by adaptive quadrature to 1e-12 relative accuracy.
pub fn liouville_green_phase<Q: Fn(f64) -> f64>(
    q: &Q,
    interval: (f64, f64),
    t: f64,
) -> Result<f64> {
    let (a, b) = interval;
    if t < a || t > b {
        return Err(Error::OutOfDomain {
            point: t,
            low: a,
            high: b,
        });
    }
    let bad = Cell::new(None);
    let value = quadrature::integrate(
        |s| {
            let v = q(s);
            if v <= 0.0 {
                bad.set(Some((s, v)));
                0.0
            } else {
                v.sqrt()
            }
        },
        a,
        t,
        1e-12,
    )?;
    if let Some((s, v)) = bad.get() {
        return Err(Error::InvalidCoefficient { t: s, value: v });
    }
    Ok(value)
}

/// Reduce the general equation `y'' + p y' + q y = 0` to standard form.
///
/// Returns the transformed coefficient `q - p^2/4 - p'/2` and the weight
/// `omega = exp(-P)` for `P` an antiderivative of `p`; a phase built for
/// the transformed coefficient yields the general-equation basis
/// `sqrt(omega/alpha') cos(alpha)`, `sqrt(omega/alpha') sin(alpha)`.
pub fn normalize_general<P, DP, AP, Q>(
    p: P,
    p_prime: DP,
    p_antiderivative: AP,
    q: Q,
) -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64)
where
    P: Fn(f64) -> f64,
    DP: Fn(f64) -> f64,
    AP: Fn(f64) -> f64,
    Q: Fn(f64) -> f64,
{
    let q_std = move |t: f64| q(t) - 0.25 * p(t) * p(t) - 0.5 * p_prime(t);
    let omega = move |t: f64| (-p_antiderivative(t)).exp();
    (q_std, omega)
}
