//! Single-interval and piecewise Chebyshev machinery: extremal grids,
//! value/coefficient transforms, differentiation, spectral integration,
//! Clenshaw evaluation and the tail diagnostic used by every adaptive loop.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

/// Relative slack allowed when evaluating just outside an interval.
const DOMAIN_SLACK: f64 = 1e-12;

fn check_interval(low: f64, high: f64) -> Result<()> {
    if !(low < high) || !low.is_finite() || !high.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "invalid interval [{low}, {high}]"
        )));
    }
    Ok(())
}

/// The k-point extremal Chebyshev grid on `[a, b]`, in increasing order.
/// The first and last points are exactly `a` and `b`.
pub fn extremal_nodes(k: usize, interval: (f64, f64)) -> Result<Vec<f64>> {
    let (a, b) = interval;
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 grid points, got {k}"
        )));
    }
    check_interval(a, b)?;
    let n = (k - 1) as f64;
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut nodes: Vec<f64> = (0..k)
        .map(|i| half * (std::f64::consts::PI * (k - 1 - i) as f64 / n).cos() + mid)
        .collect();
    nodes[0] = a;
    nodes[k - 1] = b;
    Ok(nodes)
}

/// Standard-interval grid values `s_i = cos(pi (k-1-i)/(k-1))`, ascending.
fn standard_nodes(k: usize) -> Vec<f64> {
    let n = (k - 1) as f64;
    let mut s: Vec<f64> = (0..k)
        .map(|i| (std::f64::consts::PI * (k - 1 - i) as f64 / n).cos())
        .collect();
    s[0] = -1.0;
    s[k - 1] = 1.0;
    s
}

/// Spectral differentiation matrix on the k-point extremal grid of the given
/// interval: maps values of a polynomial of degree < k at the nodes to the
/// values of its derivative at the nodes.
pub fn diff_matrix(k: usize, interval: (f64, f64)) -> Result<DenseMatrix<f64>> {
    let (a, b) = interval;
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 grid points, got {k}"
        )));
    }
    check_interval(a, b)?;
    let s = standard_nodes(k);
    // barycentric weights for Chebyshev extrema: (-1)^j, halved at the ends
    let w: Vec<f64> = (0..k)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == k - 1 {
                0.5 * sign
            } else {
                sign
            }
        })
        .collect();
    let scale = 2.0 / (b - a);
    let mut d = DenseMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        let mut diag = 0.0;
        for j in 0..k {
            if i != j {
                let v = (w[j] / w[i]) / (s[i] - s[j]);
                d[(i, j)] = scale * v;
                diag -= v;
            }
        }
        d[(i, i)] = scale * diag;
    }
    Ok(d)
}

fn cos_table(n: usize) -> Vec<f64> {
    (0..2 * n)
        .map(|s| (std::f64::consts::PI * s as f64 / n as f64).cos())
        .collect()
}

/// Coefficients of the degree k-1 Chebyshev interpolant through values at
/// the k-point extremal grid (ascending node order).
pub fn vals_to_coeffs<C: Scalar>(values: &[C]) -> Result<Vec<C>> {
    let k = values.len();
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 values, got {k}"
        )));
    }
    let n = k - 1;
    let table = cos_table(n);
    let mut coeffs = vec![C::zero(); k];
    for (m, cm) in coeffs.iter_mut().enumerate() {
        // values reversed so index j corresponds to cos(j*pi/n)
        let mut acc = values[n] * 0.5;
        for j in 1..n {
            acc += values[n - j] * table[(j * m) % (2 * n)];
        }
        let endpoint_sign = if m % 2 == 0 { 0.5 } else { -0.5 };
        acc += values[0] * endpoint_sign;
        let p = if m == 0 || m == n { 2.0 } else { 1.0 };
        *cm = acc * (2.0 / (n as f64 * p));
    }
    Ok(coeffs)
}

/// Values of an expansion at the k-point extremal grid (ascending order).
pub fn coeffs_to_vals<C: Scalar>(coeffs: &[C]) -> Result<Vec<C>> {
    let k = coeffs.len();
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 coefficients, got {k}"
        )));
    }
    let s = standard_nodes(k);
    Ok(s.iter().map(|&si| clenshaw(coeffs, si)).collect())
}

/// Clenshaw evaluation of `sum c_j T_j(s)` for `s` in standard coordinates.
fn clenshaw<C: Scalar>(coeffs: &[C], s: f64) -> C {
    let mut b1 = C::zero();
    let mut b2 = C::zero();
    for &c in coeffs.iter().skip(1).rev() {
        let next = c + b1 * (2.0 * s) - b2;
        b2 = b1;
        b1 = next;
    }
    coeffs[0] + b1 * s - b2
}

/// Relative l2 weight of the coefficient tail from `split_index` on:
/// `sqrt(sum_{j>=split} |c_j|^2 / sum_j |c_j|^2)`. All-zero input gives 0
/// (the zero function is always accepted).
pub fn tail_ratio<C: Scalar>(coeffs: &[C], split_index: usize) -> f64 {
    let total: f64 = coeffs.iter().map(|c| c.abs_sq()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let tail: f64 = coeffs
        .iter()
        .skip(split_index)
        .map(|c| c.abs_sq())
        .sum();
    (tail / total).sqrt()
}

/// A Chebyshev expansion `sum c_j T_j` rescaled to one interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevExpansion<C: Scalar> {
    low: f64,
    high: f64,
    coeffs: Vec<C>,
}

impl<C: Scalar> ChebyshevExpansion<C> {
    pub fn new(interval: (f64, f64), coeffs: Vec<C>) -> Result<Self> {
        check_interval(interval.0, interval.1)?;
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("empty coefficient list".into()));
        }
        Ok(ChebyshevExpansion {
            low: interval.0,
            high: interval.1,
            coeffs,
        })
    }

    /// Interpolate values given at the extremal grid of the interval.
    pub fn from_values(interval: (f64, f64), values: &[C]) -> Result<Self> {
        Self::new(interval, vals_to_coeffs(values)?)
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.low, self.high)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn to_standard(&self, t: f64) -> f64 {
        (2.0 * t - self.low - self.high) / (self.high - self.low)
    }

    /// Evaluate at `t`, which must lie in the interval up to a slack of
    /// `1e-12 * (high - low)`.
    pub fn eval(&self, t: f64) -> Result<C> {
        let slack = DOMAIN_SLACK * (self.high - self.low);
        if t < self.low - slack || t > self.high + slack {
            return Err(Error::OutOfDomain {
                point: t,
                low: self.low,
                high: self.high,
            });
        }
        Ok(clenshaw(&self.coeffs, self.to_standard(t)))
    }

    /// Value at the left endpoint, `sum (-1)^j c_j`.
    pub fn value_left(&self) -> C {
        let mut acc = C::zero();
        for (j, &c) in self.coeffs.iter().enumerate() {
            if j % 2 == 0 {
                acc += c;
            } else {
                acc -= c;
            }
        }
        acc
    }

    /// Value at the right endpoint, `sum c_j`.
    pub fn value_right(&self) -> C {
        let mut acc = C::zero();
        for &c in &self.coeffs {
            acc += c;
        }
        acc
    }

    /// Expansion of the derivative (degree one lower).
    pub fn derivative(&self) -> ChebyshevExpansion<C> {
        let k = self.coeffs.len();
        let scale = 2.0 / (self.high - self.low);
        if k == 1 {
            return ChebyshevExpansion {
                low: self.low,
                high: self.high,
                coeffs: vec![C::zero()],
            };
        }
        let n = k - 1;
        let mut d = vec![C::zero(); n];
        d[n - 1] = self.coeffs[n] * (2.0 * n as f64);
        if n >= 2 {
            d[n - 2] = self.coeffs[n - 1] * (2.0 * (n - 1) as f64);
        }
        for j in (0..n.saturating_sub(2)).rev() {
            d[j] = d[j + 2] + self.coeffs[j + 1] * (2.0 * (j + 1) as f64);
        }
        d[0] = d[0] * 0.5;
        for c in &mut d {
            *c = *c * scale;
        }
        ChebyshevExpansion {
            low: self.low,
            high: self.high,
            coeffs: d,
        }
    }

    /// Expansion `F` of degree one higher with `F' = self` exactly as
    /// polynomials and `F(anchor_t) = anchor_value`.
    pub fn antiderivative(&self, anchor_t: f64, anchor_value: C) -> Result<ChebyshevExpansion<C>> {
        let k = self.coeffs.len();
        let h = 0.5 * (self.high - self.low);
        let c = |j: usize| -> C {
            if j < k {
                self.coeffs[j]
            } else {
                C::zero()
            }
        };
        let mut out = vec![C::zero(); k + 1];
        out[1] = (c(0) - c(2) * 0.5) * h;
        for m in 2..=k {
            out[m] = (c(m - 1) - c(m + 1)) * (h / (2.0 * m as f64));
        }
        let mut result = ChebyshevExpansion {
            low: self.low,
            high: self.high,
            coeffs: out,
        };
        let at_anchor = result.eval(anchor_t)?;
        result.coeffs[0] += anchor_value - at_anchor;
        Ok(result)
    }
}

/// A partition of an interval with one Chebyshev expansion per subinterval.
///
/// Evaluation follows the half-open convention: an interior breakpoint
/// belongs to the piece on its right, the last breakpoint to the last piece.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseChebyshevExpansion<C: Scalar> {
    breakpoints: Vec<f64>,
    pieces: Vec<ChebyshevExpansion<C>>,
}

impl<C: Scalar> PiecewiseChebyshevExpansion<C> {
    /// Assemble from contiguous pieces (piece i+1 starts exactly where piece
    /// i ends).
    pub fn new(pieces: Vec<ChebyshevExpansion<C>>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidArgument("no pieces".into()));
        }
        let mut breakpoints = Vec::with_capacity(pieces.len() + 1);
        breakpoints.push(pieces[0].low);
        for (i, piece) in pieces.iter().enumerate() {
            if i > 0 && pieces[i - 1].high != piece.low {
                return Err(Error::InvalidArgument(format!(
                    "pieces are not contiguous at index {i}: {} != {}",
                    pieces[i - 1].high,
                    piece.low
                )));
            }
            if !(piece.low < piece.high) {
                return Err(Error::InvalidArgument("degenerate piece interval".into()));
            }
            breakpoints.push(piece.high);
        }
        Ok(PiecewiseChebyshevExpansion {
            breakpoints,
            pieces,
        })
    }

    pub fn single(piece: ChebyshevExpansion<C>) -> Self {
        PiecewiseChebyshevExpansion {
            breakpoints: vec![piece.low, piece.high],
            pieces: vec![piece],
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[ChebyshevExpansion<C>] {
        &self.pieces
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    /// Total number of stored coefficients across all pieces.
    pub fn total_coeffs(&self) -> usize {
        self.pieces.iter().map(|p| p.len()).sum()
    }

    /// Index of the piece containing `t` under the half-open convention.
    pub fn piece_index(&self, t: f64) -> usize {
        let idx = self.breakpoints.partition_point(|&x| x <= t);
        idx.saturating_sub(1).min(self.pieces.len() - 1)
    }

    pub fn eval(&self, t: f64) -> Result<C> {
        let (low, high) = self.interval();
        let slack = DOMAIN_SLACK * (high - low);
        if t < low - slack || t > high + slack {
            return Err(Error::OutOfDomain {
                point: t,
                low,
                high,
            });
        }
        self.pieces[self.piece_index(t)].eval(t)
    }

    /// Piecewise derivative (same partition).
    pub fn derivative(&self) -> PiecewiseChebyshevExpansion<C> {
        PiecewiseChebyshevExpansion {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|p| p.derivative()).collect(),
        }
    }

    /// Piecewise antiderivative anchored at the left endpoint, with anchor
    /// values chained across the pieces so the result is continuous.
    pub fn antiderivative(&self, anchor_value: C) -> Result<PiecewiseChebyshevExpansion<C>> {
        let mut acc = anchor_value;
        let mut out = Vec::with_capacity(self.pieces.len());
        for piece in &self.pieces {
            let f = piece.antiderivative(piece.low, acc)?;
            acc = f.value_right();
            out.push(f);
        }
        Ok(PiecewiseChebyshevExpansion {
            breakpoints: self.breakpoints.clone(),
            pieces: out,
        })
    }

    /// JSON form: `{"k": ..., "breakpoints": [...], "coeffs": [[...], ...]}`
    /// with coefficients in increasing degree order.
    pub fn to_json(&self) -> serde_json::Value {
        let k = self.pieces.iter().map(|p| p.len()).max().unwrap_or(0);
        serde_json::json!({
            "k": k,
            "breakpoints": self.breakpoints,
            "coeffs": self
                .pieces
                .iter()
                .map(|p| p.coeffs.iter().map(|c| c.to_json()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = || Error::InvalidArgument("malformed piecewise expansion JSON".into());
        let breakpoints: Vec<f64> = v
            .get("breakpoints")
            .and_then(|b| b.as_array())
            .ok_or_else(bad)?
            .iter()
            .map(|x| x.as_f64().ok_or_else(bad))
            .collect::<Result<_>>()?;
        let coeff_lists = v
            .get("coeffs")
            .and_then(|c| c.as_array())
            .ok_or_else(bad)?;
        if breakpoints.len() != coeff_lists.len() + 1 || coeff_lists.is_empty() {
            return Err(bad());
        }
        let mut pieces = Vec::with_capacity(coeff_lists.len());
        for (i, list) in coeff_lists.iter().enumerate() {
            let coeffs: Vec<C> = list
                .as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|x| C::from_json(x).ok_or_else(bad))
                .collect::<Result<_>>()?;
            pieces.push(ChebyshevExpansion::new(
                (breakpoints[i], breakpoints[i + 1]),
                coeffs,
            )?);
        }
        Self::new(pieces)
    }
}

impl<C: Scalar> Serialize for PiecewiseChebyshevExpansion<C> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de, C: Scalar> Deserialize<'de> for PiecewiseChebyshevExpansion<C> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(deserializer)?;
        Self::from_json(&v).map_err(D::Error::custom)
    }
}

/// Adaptively fit a callable by piecewise degree k-1 interpolation, bisecting
/// until the coefficient tail passes `tail_ratio < eps` on every piece.
pub fn fit_function(
    f: impl Fn(f64) -> f64,
    interval: (f64, f64),
    k: usize,
    eps: f64,
    max_intervals: usize,
) -> Result<PiecewiseChebyshevExpansion<f64>> {
    let (a, b) = interval;
    check_interval(a, b)?;
    let min_width = 1e-13 * (b - a);
    let mut stack = vec![(a, b)];
    let mut pieces = Vec::new();
    while let Some((lo, hi)) = stack.pop() {
        if pieces.len() + stack.len() >= max_intervals {
            return Err(Error::BudgetExceeded {
                budget: max_intervals,
                low: lo,
                high: hi,
            });
        }
        let nodes = extremal_nodes(k, (lo, hi))?;
        let values: Vec<f64> = nodes.iter().map(|&t| f(t)).collect();
        let coeffs = vals_to_coeffs(&values)?;
        if tail_ratio(&coeffs, k / 2) < eps || hi - lo <= min_width {
            pieces.push(ChebyshevExpansion::new((lo, hi), coeffs)?);
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi));
            stack.push((lo, mid));
        }
    }
    pieces.sort_by(|p, q| p.low.partial_cmp(&q.low).unwrap());
    PiecewiseChebyshevExpansion::new(pieces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn nodes_small_cases() {
        let n2 = extremal_nodes(2, (-1.0, 1.0)).unwrap();
        assert_eq!(n2, vec![-1.0, 1.0]);

        let n3 = extremal_nodes(3, (-1.0, 1.0)).unwrap();
        assert_eq!(n3[0], -1.0);
        assert!(n3[1].abs() < 1e-15);
        assert_eq!(n3[2], 1.0);

        let n5 = extremal_nodes(5, (0.0, 1.0)).unwrap();
        let sqrt_half = 0.5_f64.sqrt();
        let want = [0.0, 0.5 * (1.0 - sqrt_half), 0.5, 0.5 * (1.0 + sqrt_half), 1.0];
        for (x, w) in n5.iter().zip(want.iter()) {
            assert!((x - w).abs() < 1e-15, "{x} vs {w}");
        }
        assert!(n5.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn nodes_invalid_arguments() {
        assert!(extremal_nodes(1, (0.0, 1.0)).is_err());
        assert!(extremal_nodes(4, (1.0, 1.0)).is_err());
        assert!(extremal_nodes(4, (2.0, 1.0)).is_err());
    }

    #[test]
    fn diff_matrix_constant_and_identity() {
        let k = 7;
        let d = diff_matrix(k, (-1.0, 1.0)).unwrap();
        let ones = vec![1.0; k];
        for v in d.mul_vec(&ones) {
            assert!(v.abs() <= 1e-13);
        }
        let nodes = extremal_nodes(k, (-1.0, 1.0)).unwrap();
        for v in d.mul_vec(&nodes) {
            assert!((v - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn diff_matrix_quadratic_on_unit_interval() {
        let k = 5;
        let d = diff_matrix(k, (0.0, 1.0)).unwrap();
        let nodes = extremal_nodes(k, (0.0, 1.0)).unwrap();
        let values: Vec<f64> = nodes.iter().map(|t| t * t).collect();
        let deriv = d.mul_vec(&values);
        for (v, t) in deriv.iter().zip(nodes.iter()) {
            assert!((v - 2.0 * t).abs() <= 1e-13, "{v} vs {}", 2.0 * t);
        }
    }

    #[test]
    fn transform_constant() {
        let c = vals_to_coeffs(&vec![1.0; 8]).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-15);
        for v in &c[1..] {
            assert!(v.abs() < 1e-15);
        }
    }

    #[test]
    fn transform_quadratic_rescaled() {
        // t^2 on [0,1] = 3/8 + 1/2 T1 + 1/8 T2 in rescaled coordinates
        for k in [3, 6, 16] {
            let nodes = extremal_nodes(k, (0.0, 1.0)).unwrap();
            let values: Vec<f64> = nodes.iter().map(|t| t * t).collect();
            let c = vals_to_coeffs(&values).unwrap();
            assert!((c[0] - 0.375).abs() < 1e-15, "k={k}");
            assert!((c[1] - 0.5).abs() < 1e-15);
            assert!((c[2] - 0.125).abs() < 1e-15);
            for v in &c[3..] {
                assert!(v.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn transform_exponential_frozen_leading_coeffs() {
        // leading interpolation coefficients of e^t on [-1,1] at k = 16,
        // frozen from a 40-digit computation
        let nodes = extremal_nodes(16, (-1.0, 1.0)).unwrap();
        let values: Vec<f64> = nodes.iter().map(|t| t.exp()).collect();
        let c = vals_to_coeffs(&values).unwrap();
        assert!((c[0] - 1.2660658777520084).abs() < 1e-13);
        assert!((c[1] - 1.13031820798497).abs() < 1e-13);
    }

    #[test]
    fn transform_exponential_vs_projection_oracle() {
        // independent oracle: discrete Chebyshev-Gauss projection at high
        // order (first-kind nodes, exact discrete orthogonality)
        let big = 200;
        let proj = |m: usize| -> f64 {
            let mut acc = 0.0;
            for i in 0..big {
                let theta = std::f64::consts::PI * (2.0 * i as f64 + 1.0) / (2.0 * big as f64);
                acc += theta.cos().exp() * (m as f64 * theta).cos();
            }
            acc * 2.0 / big as f64
        };
        let nodes = extremal_nodes(16, (-1.0, 1.0)).unwrap();
        let values: Vec<f64> = nodes.iter().map(|t| t.exp()).collect();
        let c = vals_to_coeffs(&values).unwrap();
        assert!((c[0] - proj(0) / 2.0).abs() < 1e-14);
        for m in 1..6 {
            assert!((c[m] - proj(m)).abs() < 1e-13, "m={m}");
        }
    }

    #[test]
    fn roundtrip_random_coeffs() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(42);
        for k in [2, 3, 8, 16, 32] {
            let coeffs: Vec<f64> = (0..k).map(|_| rng.random::<f64>() - 0.5).collect();
            let vals = coeffs_to_vals(&coeffs).unwrap();
            let back = vals_to_coeffs(&vals).unwrap();
            let scale = coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max);
            for (p, q) in coeffs.iter().zip(back.iter()) {
                assert!((p - q).abs() <= 1e-13 * scale, "k={k}");
            }
        }
    }

    #[test]
    fn eval_cases() {
        let one = ChebyshevExpansion::new((-2.0, 3.0), vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(one.eval(0.7).unwrap(), 1.0);

        let t2 = ChebyshevExpansion::new((-1.0, 1.0), vec![0.0, 0.0, 1.0]).unwrap();
        assert!((t2.eval(0.25).unwrap() - (-0.875)).abs() < 1e-15);

        let nodes = extremal_nodes(16, (-1.0, 1.0)).unwrap();
        let values: Vec<f64> = nodes.iter().map(|t| t.exp()).collect();
        let exp16 = ChebyshevExpansion::from_values((-1.0, 1.0), &values).unwrap();
        assert!((exp16.eval(0.3).unwrap() - 0.3_f64.exp()).abs() <= 1e-13);
    }

    #[test]
    fn eval_domain_slack() {
        let e = ChebyshevExpansion::new((0.0, 1.0), vec![1.0, 1.0]).unwrap();
        assert!(e.eval(1.0 + 0.5e-12).is_ok());
        assert!(matches!(
            e.eval(1.0 + 1e-9),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(matches!(
            e.eval(-1e-9),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn eval_matches_direct_recurrence() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(7);
        let coeffs: Vec<f64> = (0..20).map(|_| rng.random::<f64>() - 0.5).collect();
        let e = ChebyshevExpansion::new((-1.0, 1.0), coeffs.clone()).unwrap();
        for _ in 0..50 {
            let s: f64 = 2.0 * rng.random::<f64>() - 1.0;
            // direct three-term recurrence
            let mut t_prev = 1.0;
            let mut t_cur = s;
            let mut direct = coeffs[0];
            for &c in coeffs.iter().skip(1) {
                direct += c * t_cur;
                let t_next = 2.0 * s * t_cur - t_prev;
                t_prev = t_cur;
                t_cur = t_next;
            }
            let got = e.eval(s).unwrap();
            let scale = direct.abs().max(1.0);
            assert!((got - direct).abs() <= 1e-14 * scale);
        }
    }

    #[test]
    fn antiderivative_cases() {
        // constant 1 on [0,1] anchored F(0)=0 -> t
        let one = ChebyshevExpansion::new((0.0, 1.0), vec![1.0]).unwrap();
        let f = one.antiderivative(0.0, 0.0).unwrap();
        for t in [0.0, 0.25, 0.8, 1.0] {
            assert!((f.eval(t).unwrap() - t).abs() < 1e-15);
        }

        // T1 on [-1,1] anchored F(-1)=0 -> (t^2-1)/2
        let t1 = ChebyshevExpansion::new((-1.0, 1.0), vec![0.0, 1.0]).unwrap();
        let f = t1.antiderivative(-1.0, 0.0).unwrap();
        for t in [-1.0, -0.3, 0.5, 1.0] {
            assert!((f.eval(t).unwrap() - 0.5 * (t * t - 1.0)).abs() < 1e-15);
        }

        // expansion of cos on [0, pi/2] anchored F(0)=0 matches sin
        let k = 16;
        let iv = (0.0, std::f64::consts::FRAC_PI_2);
        let nodes = extremal_nodes(k, iv).unwrap();
        let values: Vec<f64> = nodes.iter().map(|t| t.cos()).collect();
        let c = ChebyshevExpansion::from_values(iv, &values).unwrap();
        let f = c.antiderivative(0.0, 0.0).unwrap();
        for &t in &nodes {
            assert!((f.eval(t).unwrap() - t.sin()).abs() <= 1e-13);
        }
    }

    #[test]
    fn derivative_inverts_antiderivative() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(3);
        let coeffs: Vec<f64> = (0..12).map(|_| rng.random::<f64>() - 0.5).collect();
        let e = ChebyshevExpansion::new((0.5, 2.5), coeffs).unwrap();
        let back = e.antiderivative(1.0, 0.0).unwrap().derivative();
        let nodes = extremal_nodes(12, (0.5, 2.5)).unwrap();
        let scale = nodes
            .iter()
            .map(|&t| e.eval(t).unwrap().abs())
            .fold(0.0, f64::max);
        for &t in &nodes {
            let diff = (back.eval(t).unwrap() - e.eval(t).unwrap()).abs();
            assert!(diff <= 1e-12 * scale);
        }
    }

    #[test]
    fn diff_matrix_matches_antiderivative_roundtrip() {
        let k = 10;
        let iv = (0.0, 2.0);
        let nodes = extremal_nodes(k, iv).unwrap();
        let values: Vec<f64> = nodes.iter().map(|t| (1.5 * t).sin()).collect();
        let e = ChebyshevExpansion::from_values(iv, &values).unwrap();
        let f = e.antiderivative(0.0, 0.0).unwrap();
        let d = diff_matrix(k + 1, iv).unwrap();
        let fine_nodes = extremal_nodes(k + 1, iv).unwrap();
        let fvals: Vec<f64> = fine_nodes.iter().map(|&t| f.eval(t).unwrap()).collect();
        let dvals = d.mul_vec(&fvals);
        let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for (&t, dv) in fine_nodes.iter().zip(dvals.iter()) {
            assert!((dv - e.eval(t).unwrap()).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn interpolation_exact_for_monomials() {
        let k = 9;
        let iv = (-2.0, 1.0);
        let nodes = extremal_nodes(k, iv).unwrap();
        for degree in 0..k {
            let values: Vec<f64> = nodes.iter().map(|t| t.powi(degree as i32)).collect();
            let e = ChebyshevExpansion::from_values(iv, &values).unwrap();
            for i in 0..20 {
                let t = iv.0 + (iv.1 - iv.0) * i as f64 / 19.0;
                let want = t.powi(degree as i32);
                assert!(
                    (e.eval(t).unwrap() - want).abs() <= 1e-13 * want.abs().max(1.0),
                    "degree {degree}"
                );
            }
        }
    }

    #[test]
    fn tail_ratio_cases() {
        assert_eq!(tail_ratio(&[1.0, 0.0, 0.0, 0.0], 2), 0.0);
        assert_eq!(tail_ratio(&[0.0, 0.0, 0.0, 1.0], 2), 1.0);
        let r = tail_ratio(&[1.0, 0.0, 1.0, 0.0], 2);
        assert!((r - 0.5_f64.sqrt()).abs() < 1e-15);
        assert_eq!(tail_ratio(&[0.0_f64; 6], 3), 0.0);
    }

    #[test]
    fn piecewise_eval_conventions() {
        let p1 = ChebyshevExpansion::new((0.0, 1.0), vec![1.0]).unwrap();
        let p2 = ChebyshevExpansion::new((1.0, 2.0), vec![2.0]).unwrap();
        let pw = PiecewiseChebyshevExpansion::new(vec![p1.clone(), p2]).unwrap();
        // interior breakpoint belongs to the right piece
        assert_eq!(pw.eval(1.0).unwrap(), 2.0);
        // right endpoint belongs to the last piece
        assert_eq!(pw.eval(2.0).unwrap(), 2.0);
        assert_eq!(pw.eval(0.0).unwrap(), 1.0);
        // single piece behaves like plain eval
        let single = PiecewiseChebyshevExpansion::single(p1);
        assert_eq!(single.eval(0.5).unwrap(), 1.0);
        assert!(pw.eval(2.5).is_err());
    }

    #[test]
    fn piecewise_antiderivative_is_continuous() {
        let f = fit_function(|t| (3.0 * t).cos(), (0.0, 4.0), 16, 1e-13, 1024).unwrap();
        assert!(f.piece_count() > 1);
        let anti = f.antiderivative(0.0).unwrap();
        for w in anti.breakpoints().windows(2) {
            let left_limit = anti.pieces()[anti.piece_index(w[0])].eval(w[1]).unwrap();
            let right_value = anti.eval(w[1]).unwrap();
            assert!((left_limit - right_value).abs() <= 1e-12);
        }
        // matches sin(3t)/3 anchored at 0
        for i in 0..40 {
            let t = 4.0 * i as f64 / 39.0;
            assert!((anti.eval(t).unwrap() - (3.0 * t).sin() / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn json_roundtrip_real_and_complex() {
        let f = fit_function(|t| t.exp(), (0.0, 1.0), 16, 1e-13, 64).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        let back: PiecewiseChebyshevExpansion<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(f, back);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v.get("k").is_some() && v.get("breakpoints").is_some());

        let piece = ChebyshevExpansion::new(
            (0.0, 1.0),
            vec![Complex64::new(1.0, -2.0), Complex64::new(0.125, 3.5e-17)],
        )
        .unwrap();
        let pw = PiecewiseChebyshevExpansion::single(piece);
        let text = serde_json::to_string(&pw).unwrap();
        let back: PiecewiseChebyshevExpansion<Complex64> = serde_json::from_str(&text).unwrap();
        assert_eq!(pw, back);
    }
}
