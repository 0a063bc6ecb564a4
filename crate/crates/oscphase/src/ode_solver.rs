//! Adaptive piecewise-Chebyshev spectral solver for first order systems
//! `y' = F(t, y)`, in both initial-value and terminal-value directions.
//!
//! Each subinterval is solved by collocation of the equivalent integral
//! equation `u(t) = w + int_c^t F(s, u(s)) ds` on the extremal Chebyshev
//! grid; linear problems are solved directly, nonlinear ones by a
//! trapezoid predictor followed by Newton iteration whose linearized
//! problems reuse the same integral-equation collocation. A subinterval is
//! accepted when the upper half of every component's coefficient vector is
//! negligible, otherwise it is bisected.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::chebyshev::{
    extremal_nodes, vals_to_coeffs, ChebyshevExpansion, PiecewiseChebyshevExpansion,
};
use crate::error::{Error, Result};
use crate::linalg::{lu_solve, DenseMatrix};

/// Signal returned by a system when an iterate leaves its admissible region
/// (for example a state component that must stay positive crossing zero).
/// The adaptive driver reacts by bisecting the offending interval.
#[derive(Debug, Clone, Copy)]
pub struct Inadmissible {
    pub t: f64,
}

/// A first order system `y' = F(t, y)` with an optional analytic Jacobian.
///
/// The default Jacobian is a central finite difference with step
/// `sqrt(eps0) * (1 + |y_j|)`.
pub trait OdeSystem: Sync {
    fn dim(&self) -> usize;

    /// Fill `dy` with `F(t, y)`.
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> std::result::Result<(), Inadmissible>;

    /// Fill `jac` (row-major `dim x dim`) with the Jacobian of `F` in `y`.
    fn jacobian(
        &self,
        t: f64,
        y: &[f64],
        jac: &mut [f64],
    ) -> std::result::Result<(), Inadmissible> {
        let n = self.dim();
        let mut shifted = y.to_vec();
        let mut fp = vec![0.0; n];
        let mut fm = vec![0.0; n];
        for j in 0..n {
            let h = f64::EPSILON.sqrt() * (1.0 + y[j].abs());
            shifted[j] = y[j] + h;
            self.rhs(t, &shifted, &mut fp)?;
            shifted[j] = y[j] - h;
            self.rhs(t, &shifted, &mut fm)?;
            shifted[j] = y[j];
            for i in 0..n {
                jac[i * n + j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        Ok(())
    }
}

/// A linear system `y' = A(t) y + g(t)` given by fill callbacks
/// (`a` fills row-major `dim x dim`).
pub struct LinearOde<A, G>
where
    A: Fn(f64, &mut [f64]) + Sync,
    G: Fn(f64, &mut [f64]) + Sync,
{
    pub dim: usize,
    pub a: A,
    pub g: G,
}

impl<A, G> OdeSystem for LinearOde<A, G>
where
    A: Fn(f64, &mut [f64]) + Sync,
    G: Fn(f64, &mut [f64]) + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> std::result::Result<(), Inadmissible> {
        let n = self.dim;
        let mut a = vec![0.0; n * n];
        (self.a)(t, &mut a);
        (self.g)(t, dy);
        for i in 0..n {
            for (j, yj) in y.iter().enumerate() {
                dy[i] += a[i * n + j] * yj;
            }
        }
        Ok(())
    }

    fn jacobian(&self, t: f64, _y: &[f64], jac: &mut [f64]) -> std::result::Result<(), Inadmissible> {
        (self.a)(t, jac);
        Ok(())
    }
}

/// Adaptive solver parameters.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// Collocation points per subinterval.
    pub k: usize,
    /// Coefficient-tail acceptance tolerance.
    pub eps: f64,
    /// Subdivision budget (number of local solves).
    pub max_intervals: usize,
    /// Newton iteration cap for nonlinear local solves.
    pub max_newton: usize,
    /// Relative Newton correction tolerance.
    pub newton_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            k: 16,
            eps: 1e-13,
            max_intervals: 4096,
            max_newton: 30,
            newton_tol: 1e-14,
        }
    }
}

/// Whether data is chained from the left endpoint (initial value problems)
/// or the right endpoint (terminal value problems).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// One local collocation solution: values of every component at the k
/// extremal nodes of one subinterval (component-major layout).
#[derive(Debug, Clone)]
pub struct LocalSolution {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub dim: usize,
}

impl LocalSolution {
    pub fn component(&self, i: usize) -> &[f64] {
        let k = self.nodes.len();
        &self.values[i * k..(i + 1) * k]
    }
}

/// Solution of an adaptive solve: one piecewise expansion per component,
/// all sharing the same partition.
#[derive(Debug, Clone)]
pub struct PiecewiseSolution {
    components: Vec<PiecewiseChebyshevExpansion<f64>>,
}

impl PiecewiseSolution {
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &PiecewiseChebyshevExpansion<f64> {
        &self.components[i]
    }

    pub fn into_components(self) -> Vec<PiecewiseChebyshevExpansion<f64>> {
        self.components
    }

    pub fn breakpoints(&self) -> &[f64] {
        self.components[0].breakpoints()
    }

    pub fn eval(&self, i: usize, t: f64) -> Result<f64> {
        self.components[i].eval(t)
    }
}

// Cached per-k grid machinery: standard nodes and the spectral integration
// matrices anchored at either endpoint of [-1, 1].
struct GridTables {
    std_nodes: Vec<f64>,
    integ_left: DenseMatrix<f64>,
    integ_right: DenseMatrix<f64>,
}

fn integration_matrix(k: usize, anchor_right: bool) -> DenseMatrix<f64> {
    let nodes = extremal_nodes(k, (-1.0, 1.0)).unwrap();
    let anchor = if anchor_right { 1.0 } else { -1.0 };
    let mut m = DenseMatrix::<f64>::zeros(k, k);
    let mut basis = vec![0.0; k];
    for j in 0..k {
        basis.iter_mut().for_each(|v| *v = 0.0);
        basis[j] = 1.0;
        let e = ChebyshevExpansion::from_values((-1.0, 1.0), &basis).unwrap();
        let f = e.antiderivative(anchor, 0.0).unwrap();
        for (i, &t) in nodes.iter().enumerate() {
            m[(i, j)] = f.eval(t).unwrap();
        }
    }
    m
}

fn grid_tables(k: usize) -> Arc<GridTables> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GridTables>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(k)
        .or_insert_with(|| {
            Arc::new(GridTables {
                std_nodes: extremal_nodes(k, (-1.0, 1.0)).unwrap(),
                integ_left: integration_matrix(k, false),
                integ_right: integration_matrix(k, true),
            })
        })
        .clone()
}

fn interval_nodes(tables: &GridTables, lo: f64, hi: f64) -> Vec<f64> {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (lo + hi);
    let k = tables.std_nodes.len();
    let mut nodes: Vec<f64> = tables.std_nodes.iter().map(|&s| mid + half * s).collect();
    nodes[0] = lo;
    nodes[k - 1] = hi;
    nodes
}

fn local_error(e: Error) -> Error {
    e
}

/// Collocation solve of the linear integral equation
/// `u(t) = w + int_anchor^t (A(s) u(s) + g(s)) ds` on one interval.
///
/// `a` fills a row-major `dim x dim` matrix, `g` a length-`dim` vector. A
/// singular collocation matrix surfaces as [`Error::SingularMatrix`], which
/// the adaptive driver treats as a subdivision signal.
pub fn local_solve_linear(
    dim: usize,
    a: &(impl Fn(f64, &mut [f64]) + ?Sized),
    g: &(impl Fn(f64, &mut [f64]) + ?Sized),
    interval: (f64, f64),
    start: &[f64],
    k: usize,
    direction: Direction,
) -> Result<LocalSolution> {
    if start.len() != dim {
        return Err(Error::InvalidArgument(format!(
            "start value length {} does not match dimension {dim}",
            start.len()
        )));
    }
    let (lo, hi) = interval;
    let tables = grid_tables(k);
    let nodes = interval_nodes(&tables, lo, hi);
    let integ = match direction {
        Direction::Forward => &tables.integ_left,
        Direction::Backward => &tables.integ_right,
    };
    let scale = 0.5 * (hi - lo);

    let mut a_at = vec![0.0; dim * dim * k];
    let mut g_at = vec![0.0; dim * k];
    for (l, &t) in nodes.iter().enumerate() {
        a(t, &mut a_at[l * dim * dim..(l + 1) * dim * dim]);
        g(t, &mut g_at[l * dim..(l + 1) * dim]);
    }

    let nk = dim * k;
    let mut m = DenseMatrix::<f64>::zeros(nk, nk);
    let mut rhs = vec![0.0; nk];
    for i in 0..dim {
        for mm in 0..k {
            let row = i * k + mm;
            m[(row, row)] += 1.0;
            let mut acc = start[i];
            for l in 0..k {
                let s_ml = scale * integ[(mm, l)];
                for j in 0..dim {
                    m[(row, j * k + l)] -= s_ml * a_at[l * dim * dim + i * dim + j];
                }
                acc += s_ml * g_at[l * dim + i];
            }
            rhs[row] = acc;
        }
    }
    let values = lu_solve(&m, &rhs).map_err(local_error)?;
    Ok(LocalSolution { nodes, values, dim })
}

/// Nonlinear local solve: trapezoid predictor across the nodes, then Newton
/// on the collocation equations, each linearized step solved through the
/// same spectral integration operator.
pub fn local_solve_nonlinear<S: OdeSystem + ?Sized>(
    system: &S,
    interval: (f64, f64),
    start: &[f64],
    config: &SolverConfig,
    direction: Direction,
) -> Result<LocalSolution> {
    let dim = system.dim();
    if start.len() != dim {
        return Err(Error::InvalidArgument(format!(
            "start value length {} does not match dimension {dim}",
            start.len()
        )));
    }
    let (lo, hi) = interval;
    let k = config.k;
    let tables = grid_tables(k);
    let nodes = interval_nodes(&tables, lo, hi);
    let integ = match direction {
        Direction::Forward => &tables.integ_left,
        Direction::Backward => &tables.integ_right,
    };
    let scale = 0.5 * (hi - lo);
    let reject = |sig: Inadmissible| Error::InadmissibleState { t: sig.t };

    // trapezoid predictor, stepping node to node in the chaining direction
    let mut u = vec![0.0; dim * k];
    {
        let order: Vec<usize> = match direction {
            Direction::Forward => (0..k).collect(),
            Direction::Backward => (0..k).rev().collect(),
        };
        let mut y = start.to_vec();
        let mut f_prev = vec![0.0; dim];
        system.rhs(nodes[order[0]], &y, &mut f_prev).map_err(reject)?;
        for i in 0..dim {
            u[i * k + order[0]] = y[i];
        }
        let mut f_new = vec![0.0; dim];
        let mut trial = vec![0.0; dim];
        for w in order.windows(2) {
            let (prev, cur) = (w[0], w[1]);
            let h = nodes[cur] - nodes[prev];
            for i in 0..dim {
                trial[i] = y[i] + h * f_prev[i];
            }
            for _ in 0..2 {
                system.rhs(nodes[cur], &trial, &mut f_new).map_err(reject)?;
                for i in 0..dim {
                    trial[i] = y[i] + 0.5 * h * (f_prev[i] + f_new[i]);
                }
            }
            y.copy_from_slice(&trial);
            f_prev.copy_from_slice(&f_new);
            for i in 0..dim {
                u[i * k + cur] = y[i];
            }
        }
    }

    // Newton refinement of the collocation equations
    let nk = dim * k;
    let mut f_at = vec![0.0; dim * k];
    let mut jac_at = vec![0.0; dim * dim * k];
    let mut f_buf = vec![0.0; dim];
    let mut jac_buf = vec![0.0; dim * dim];
    let mut y_buf = vec![0.0; dim];
    for iter in 0..=config.max_newton {
        for (l, &t) in nodes.iter().enumerate() {
            for i in 0..dim {
                y_buf[i] = u[i * k + l];
            }
            system.rhs(t, &y_buf, &mut f_buf).map_err(reject)?;
            system.jacobian(t, &y_buf, &mut jac_buf).map_err(reject)?;
            f_at[l * dim..(l + 1) * dim].copy_from_slice(&f_buf);
            jac_at[l * dim * dim..(l + 1) * dim * dim].copy_from_slice(&jac_buf);
        }

        let mut m = DenseMatrix::<f64>::zeros(nk, nk);
        let mut neg_res = vec![0.0; nk];
        for i in 0..dim {
            for mm in 0..k {
                let row = i * k + mm;
                m[(row, row)] += 1.0;
                let mut integral = 0.0;
                for l in 0..k {
                    let s_ml = scale * integ[(mm, l)];
                    integral += s_ml * f_at[l * dim + i];
                    for j in 0..dim {
                        m[(row, j * k + l)] -= s_ml * jac_at[l * dim * dim + i * dim + j];
                    }
                }
                neg_res[row] = start[i] + integral - u[i * k + mm];
            }
        }
        let delta = lu_solve(&m, &neg_res).map_err(local_error)?;
        let unorm = u.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        let dnorm = delta.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        for (uv, dv) in u.iter_mut().zip(delta.iter()) {
            *uv += dv;
        }
        if dnorm <= config.newton_tol * unorm + f64::MIN_POSITIVE {
            return Ok(LocalSolution {
                nodes,
                values: u,
                dim,
            });
        }
        if iter == config.max_newton {
            break;
        }
    }
    Err(Error::NewtonDiverged { low: lo, high: hi })
}

/// Per-component coefficient acceptance: the coefficient tail of every
/// component must be below `eps` times the largest component's coefficient
/// norm. For a single component this is exactly `tail_ratio < eps`.
fn accept_coeffs(coeffs: &[Vec<f64>], k: usize, eps: f64) -> bool {
    let split = k / 2;
    let norm = |v: &[f64]| v.iter().map(|c| c * c).sum::<f64>().sqrt();
    let global = coeffs.iter().map(|c| norm(c)).fold(0.0, f64::max);
    if global == 0.0 {
        return true;
    }
    coeffs.iter().all(|c| norm(&c[split..]) < eps * global)
}

fn adaptive_solve(
    interval: (f64, f64),
    start: &[f64],
    config: &SolverConfig,
    direction: Direction,
    local: &dyn Fn((f64, f64), &[f64]) -> Result<LocalSolution>,
) -> Result<PiecewiseSolution> {
    let (a, b) = interval;
    if !(a < b) {
        return Err(Error::InvalidArgument(format!(
            "invalid solve interval [{a}, {b}]"
        )));
    }
    if !(config.eps > 0.0 && config.eps < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must lie in (0, 1), got {}",
            config.eps
        )));
    }
    let dim = start.len();
    let k = config.k;
    let min_width = 1e-13 * (b - a);

    let mut stack = vec![(a, b)];
    let mut chained = start.to_vec();
    let mut accepted: Vec<(f64, f64, Vec<Vec<f64>>)> = Vec::new();
    let mut processed = 0usize;

    while let Some((lo, hi)) = stack.pop() {
        processed += 1;
        if processed > config.max_intervals {
            return Err(Error::BudgetExceeded {
                budget: config.max_intervals,
                low: lo,
                high: hi,
            });
        }
        let attempt = local((lo, hi), &chained);
        let split_needed = match attempt {
            Ok(sol) => {
                let coeffs: Vec<Vec<f64>> = (0..dim)
                    .map(|i| vals_to_coeffs(sol.component(i)))
                    .collect::<Result<_>>()?;
                if accept_coeffs(&coeffs, k, config.eps) {
                    for i in 0..dim {
                        let idx = match direction {
                            Direction::Forward => k - 1,
                            Direction::Backward => 0,
                        };
                        chained[i] = sol.component(i)[idx];
                    }
                    accepted.push((lo, hi, coeffs));
                    None
                } else {
                    Some(None)
                }
            }
            Err(
                e @ (Error::SingularMatrix
                | Error::NewtonDiverged { .. }
                | Error::InadmissibleState { .. }),
            ) => Some(Some(e)),
            Err(e) => return Err(e),
        };
        if let Some(underlying) = split_needed {
            if hi - lo <= 2.0 * min_width {
                return Err(underlying.unwrap_or(Error::MinWidthReached {
                    low: lo,
                    high: hi,
                    min_width,
                }));
            }
            let mid = 0.5 * (lo + hi);
            match direction {
                Direction::Forward => {
                    stack.push((mid, hi));
                    stack.push((lo, mid));
                }
                Direction::Backward => {
                    stack.push((lo, mid));
                    stack.push((mid, hi));
                }
            }
        }
    }

    if direction == Direction::Backward {
        accepted.reverse();
    }
    let mut per_component: Vec<Vec<ChebyshevExpansion<f64>>> = vec![Vec::new(); dim];
    for (lo, hi, coeffs) in accepted {
        for (i, c) in coeffs.into_iter().enumerate() {
            per_component[i].push(ChebyshevExpansion::new((lo, hi), c)?);
        }
    }
    let components = per_component
        .into_iter()
        .map(PiecewiseChebyshevExpansion::new)
        .collect::<Result<Vec<_>>>()?;
    Ok(PiecewiseSolution { components })
}

/// Adaptive initial value solve of `y' = F(t, y)`, `y(a) = start`.
pub fn solve_ivp<S: OdeSystem + ?Sized>(
    system: &S,
    interval: (f64, f64),
    start: &[f64],
    config: &SolverConfig,
) -> Result<PiecewiseSolution> {
    adaptive_solve(interval, start, config, Direction::Forward, &|iv, w| {
        local_solve_nonlinear(system, iv, w, config, Direction::Forward)
    })
}

/// Adaptive terminal value solve of `y' = F(t, y)`, `y(b) = terminal`.
pub fn solve_tvp<S: OdeSystem + ?Sized>(
    system: &S,
    interval: (f64, f64),
    terminal: &[f64],
    config: &SolverConfig,
) -> Result<PiecewiseSolution> {
    adaptive_solve(interval, terminal, config, Direction::Backward, &|iv, w| {
        local_solve_nonlinear(system, iv, w, config, Direction::Backward)
    })
}

/// Adaptive initial value solve of the linear system `y' = A(t) y + g(t)`
/// through the direct integral-equation local solver.
pub fn solve_ivp_linear(
    dim: usize,
    a: &(impl Fn(f64, &mut [f64]) + ?Sized + Sync),
    g: &(impl Fn(f64, &mut [f64]) + ?Sized + Sync),
    interval: (f64, f64),
    start: &[f64],
    config: &SolverConfig,
) -> Result<PiecewiseSolution> {
    adaptive_solve(interval, start, config, Direction::Forward, &|iv, w| {
        local_solve_linear(dim, a, g, iv, w, config.k, Direction::Forward)
    })
}

/// Terminal-value counterpart of [`solve_ivp_linear`].
pub fn solve_tvp_linear(
    dim: usize,
    a: &(impl Fn(f64, &mut [f64]) + ?Sized + Sync),
    g: &(impl Fn(f64, &mut [f64]) + ?Sized + Sync),
    interval: (f64, f64),
    terminal: &[f64],
    config: &SolverConfig,
) -> Result<PiecewiseSolution> {
    adaptive_solve(interval, terminal, config, Direction::Backward, &|iv, w| {
        local_solve_linear(dim, a, g, iv, w, config.k, Direction::Backward)
    })
}
