//! Dense kernels for the collocation solvers: LU, one-sided Jacobi SVD,
//! truncated-SVD solve and rank-revealing (column-pivoted) QR solve.
//!
//! Everything here operates on small square systems (k = 16 collocation
//! points in practice), so simple O(k^3) routines are the right tool.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Multiplier for the rank threshold `m * eps0 * ||A||_F` shared by the
/// truncated-SVD and rank-revealing-QR solves.
pub const DEFAULT_THRESHOLD_MULTIPLIER: f64 = 10.0;

/// Dense column-major matrix over `f64` or `Complex64`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<C: Scalar> {
    nrows: usize,
    ncols: usize,
    data: Vec<C>,
}

impl<C: Scalar> DenseMatrix<C> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        assert!(nrows >= 1 && ncols >= 1, "matrix dimensions must be >= 1");
        DenseMatrix {
            nrows,
            ncols,
            data: vec![C::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::one();
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> C) -> Self {
        let mut m = Self::zeros(nrows, ncols);
        for j in 0..ncols {
            for i in 0..nrows {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn col(&self, j: usize) -> &[C] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [C] {
        &mut self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.nrows {
            self.data.swap(a * self.nrows + i, b * self.nrows + i);
        }
    }

    pub fn mul_vec(&self, x: &[C]) -> Vec<C> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![C::zero(); self.nrows];
        for j in 0..self.ncols {
            let col = self.col(j);
            let xj = x[j];
            for i in 0..self.nrows {
                y[i] += col[i] * xj;
            }
        }
        y
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.abs_sq()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

impl<C: Scalar> std::ops::Index<(usize, usize)> for DenseMatrix<C> {
    type Output = C;
    fn index(&self, (i, j): (usize, usize)) -> &C {
        &self.data[j * self.nrows + i]
    }
}

impl<C: Scalar> std::ops::IndexMut<(usize, usize)> for DenseMatrix<C> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C {
        &mut self.data[j * self.nrows + i]
    }
}

/// Singular value decomposition `A = U diag(sigma) V*`.
#[derive(Debug, Clone)]
pub struct SvdDecomposition<C: Scalar> {
    pub u: DenseMatrix<C>,
    /// Singular values in descending order.
    pub sigma: Vec<f64>,
    pub v: DenseMatrix<C>,
}

/// Result of a threshold-truncated solve (TSVD or RRQR).
#[derive(Debug, Clone)]
pub struct TruncatedSolve<C: Scalar> {
    pub x: Vec<C>,
    /// Number of directions kept.
    pub rank: usize,
    /// True when every direction fell below the threshold; `x` is then zero.
    pub degenerate: bool,
}

impl<C: Scalar> TruncatedSolve<C> {
    pub fn full_rank(&self, n: usize) -> bool {
        self.rank == n
    }
}

fn require_square_matching<C: Scalar>(a: &DenseMatrix<C>, b: &[C]) -> Result<()> {
    if !a.is_square() {
        return Err(Error::InvalidArgument(format!(
            "expected a square matrix, got {}x{}",
            a.nrows, a.ncols
        )));
    }
    if b.len() != a.nrows {
        return Err(Error::InvalidArgument(format!(
            "right-hand side length {} does not match dimension {}",
            b.len(),
            a.nrows
        )));
    }
    Ok(())
}

/// One-sided Jacobi SVD of a square matrix.
///
/// Columns of a working copy are orthogonalized pairwise with unitary
/// rotations accumulated into `V`; at convergence the working matrix equals
/// `U diag(sigma)`. Quadratically convergent and accurate to machine
/// precision at the sizes used here.
pub fn svd<C: Scalar>(a: &DenseMatrix<C>) -> Result<SvdDecomposition<C>> {
    if !a.is_square() {
        return Err(Error::InvalidArgument(format!(
            "svd expects a square matrix, got {}x{}",
            a.nrows, a.ncols
        )));
    }
    let n = a.nrows;
    let mut w = a.clone();
    let mut v = DenseMatrix::<C>::identity(n);

    const TOL: f64 = 1e-15;
    const MAX_SWEEPS: usize = 64;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n - 1 {
            for j in i + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = C::zero();
                {
                    let (ci, cj) = col_pair(&w, i, j);
                    for r in 0..n {
                        alpha += ci[r].abs_sq();
                        beta += cj[r].abs_sq();
                        gamma += ci[r].conj() * cj[r];
                    }
                }
                let gabs = gamma.abs();
                if gabs * gabs <= TOL * TOL * alpha * beta || gabs == 0.0 {
                    continue;
                }
                rotated = true;
                // unitary 2x2: phase-align column j, then a real Jacobi rotation
                let phase = gamma * (1.0 / gabs);
                let zeta = (beta - alpha) / (2.0 * gabs);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_cols(&mut w, i, j, c, s, phase);
                rotate_cols(&mut v, i, j, c, s, phase);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SvdNoConvergence);
    }

    // singular values and sort
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|j| w.col(j).iter().map(|x| x.abs_sq()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&p, &q| norms[q].partial_cmp(&norms[p]).unwrap());

    let mut u = DenseMatrix::<C>::zeros(n, n);
    let mut v_sorted = DenseMatrix::<C>::zeros(n, n);
    let mut sigma = vec![0.0; n];
    for (dst, &src) in order.iter().enumerate() {
        sigma[dst] = norms[src];
        v_sorted.col_mut(dst).copy_from_slice(v.col(src));
        u.col_mut(dst).copy_from_slice(w.col(src));
    }
    let sigma_max = sigma[0];
    for j in 0..n {
        if sigma[j] > sigma_max * f64::EPSILON * n as f64 && sigma[j] > 0.0 {
            let inv = 1.0 / sigma[j];
            for x in u.col_mut(j) {
                *x = *x * inv;
            }
        } else {
            fill_orthonormal_column(&mut u, j);
        }
    }
    Ok(SvdDecomposition {
        u,
        sigma,
        v: v_sorted,
    })
}

/// Borrow two distinct columns immutably.
fn col_pair<C: Scalar>(m: &DenseMatrix<C>, i: usize, j: usize) -> (&[C], &[C]) {
    (m.col(i), m.col(j))
}

fn rotate_cols<C: Scalar>(m: &mut DenseMatrix<C>, i: usize, j: usize, c: f64, s: f64, phase: C) {
    let n = m.nrows;
    for r in 0..n {
        let xi = m[(r, i)];
        let xj = m[(r, j)] * phase.conj();
        m[(r, i)] = xi * c - xj * s;
        m[(r, j)] = xi * s + xj * c;
    }
}

/// Replace column `j` (numerically zero) by a unit vector orthogonal to all
/// other columns, keeping `U` unitary for rank-deficient inputs.
fn fill_orthonormal_column<C: Scalar>(u: &mut DenseMatrix<C>, j: usize) {
    let n = u.nrows;
    let mut best: Option<(f64, Vec<C>)> = None;
    for cand in 0..n {
        let mut vec = vec![C::zero(); n];
        vec[cand] = C::one();
        for _ in 0..2 {
            for other in 0..n {
                if other == j {
                    continue;
                }
                let col = u.col(other);
                let mut proj = C::zero();
                for r in 0..n {
                    proj += col[r].conj() * vec[r];
                }
                for r in 0..n {
                    vec[r] -= col[r] * proj;
                }
            }
        }
        let norm = vec.iter().map(|x| x.abs_sq()).sum::<f64>().sqrt();
        if best.as_ref().map_or(true, |(b, _)| norm > *b) {
            best = Some((norm, vec));
        }
    }
    let (norm, mut vec) = best.unwrap();
    if norm > 0.0 {
        let inv = 1.0 / norm;
        for x in &mut vec {
            *x = *x * inv;
        }
    }
    u.col_mut(j).copy_from_slice(&vec);
}

/// Solve `A x = b` by truncated SVD: directions with
/// `sigma_i <= multiplier * eps0 * ||A||_F` are dropped.
pub fn tsvd_solve<C: Scalar>(
    a: &DenseMatrix<C>,
    b: &[C],
    multiplier: f64,
) -> Result<TruncatedSolve<C>> {
    require_square_matching(a, b)?;
    let n = a.nrows;
    let dec = svd(a)?;
    let threshold = multiplier * f64::EPSILON * a.frobenius_norm();
    let mut x = vec![C::zero(); n];
    let mut rank = 0;
    for i in 0..n {
        if dec.sigma[i] > threshold {
            rank += 1;
            let ui = dec.u.col(i);
            let mut proj = C::zero();
            for r in 0..n {
                proj += ui[r].conj() * b[r];
            }
            let scale = proj * (1.0 / dec.sigma[i]);
            let vi = dec.v.col(i);
            for r in 0..n {
                x[r] += vi[r] * scale;
            }
        }
    }
    Ok(TruncatedSolve {
        x,
        rank,
        degenerate: rank == 0,
    })
}

/// Solve `A x = b` via column-pivoted Householder QR, truncating at the same
/// threshold scale as [`tsvd_solve`].
pub fn rrqr_solve<C: Scalar>(a: &DenseMatrix<C>, b: &[C]) -> Result<TruncatedSolve<C>> {
    require_square_matching(a, b)?;
    let n = a.nrows;
    let mut r = a.clone();
    let mut qtb: Vec<C> = b.to_vec();
    let mut piv: Vec<usize> = (0..n).collect();
    let mut colnorm: Vec<f64> = (0..n)
        .map(|j| r.col(j).iter().map(|x| x.abs_sq()).sum())
        .collect();

    let threshold = DEFAULT_THRESHOLD_MULTIPLIER * f64::EPSILON * a.frobenius_norm();
    let mut rank = n;
    for s in 0..n {
        // pivot the column with the largest remaining norm to position s
        let (jmax, _) = colnorm
            .iter()
            .enumerate()
            .skip(s)
            .fold((s, -1.0), |acc, (j, &v)| if v > acc.1 { (j, v) } else { acc });
        if jmax != s {
            r.swap_cols(s, jmax);
            piv.swap(s, jmax);
            colnorm.swap(s, jmax);
        }

        let norm_x = {
            let col = r.col(s);
            col[s..].iter().map(|x| x.abs_sq()).sum::<f64>().sqrt()
        };
        if norm_x <= threshold {
            rank = s;
            break;
        }

        // Householder vector v = x + phase*||x||*e1 maps x to -phase*||x||*e1
        let x0 = r[(s, s)];
        let phase = if x0.abs() > 0.0 {
            x0 * (1.0 / x0.abs())
        } else {
            C::one()
        };
        let mut v: Vec<C> = r.col(s)[s..].to_vec();
        v[0] += phase * norm_x;
        let vnorm_sq: f64 = v.iter().map(|x| x.abs_sq()).sum();
        if vnorm_sq == 0.0 {
            rank = s;
            break;
        }
        let scale = 2.0 / vnorm_sq;

        for j in s..n {
            let col = &mut r.col_mut(j)[s..];
            let mut dot = C::zero();
            for (vr, cr) in v.iter().zip(col.iter()) {
                dot += vr.conj() * *cr;
            }
            let factor = dot * scale;
            for (vr, cr) in v.iter().zip(col.iter_mut()) {
                *cr -= *vr * factor;
            }
        }
        {
            let tail = &mut qtb[s..];
            let mut dot = C::zero();
            for (vr, cr) in v.iter().zip(tail.iter()) {
                dot += vr.conj() * *cr;
            }
            let factor = dot * scale;
            for (vr, cr) in v.iter().zip(tail.iter_mut()) {
                *cr -= *vr * factor;
            }
        }

        for j in s + 1..n {
            colnorm[j] -= r[(s, j)].abs_sq();
            if colnorm[j] < 0.0 {
                colnorm[j] = 0.0;
            }
        }
        if r[(s, s)].abs() <= threshold {
            rank = s;
            break;
        }
    }

    // back-substitute on the leading rank x rank block
    let mut z = vec![C::zero(); n];
    for i in (0..rank).rev() {
        let mut acc = qtb[i];
        for j in i + 1..rank {
            acc -= r[(i, j)] * z[j];
        }
        z[i] = acc / r[(i, i)];
    }
    let mut x = vec![C::zero(); n];
    for i in 0..rank {
        x[piv[i]] = z[i];
    }
    Ok(TruncatedSolve {
        x,
        rank,
        degenerate: rank == 0,
    })
}

/// Solve `A x = b` by LU with partial pivoting. Errors on a pivot at or
/// below `eps0 * n * max|A|`.
pub fn lu_solve<C: Scalar>(a: &DenseMatrix<C>, b: &[C]) -> Result<Vec<C>> {
    require_square_matching(a, b)?;
    let n = a.nrows;
    let mut lu = a.clone();
    let mut x: Vec<C> = b.to_vec();
    let pivot_floor = f64::EPSILON * n as f64 * a.max_abs();

    for s in 0..n {
        let (imax, pmax) = (s..n).fold((s, -1.0), |acc, i| {
            let v = lu[(i, s)].abs();
            if v > acc.1 {
                (i, v)
            } else {
                acc
            }
        });
        if pmax <= pivot_floor {
            return Err(Error::SingularMatrix);
        }
        if imax != s {
            for j in 0..n {
                let tmp = lu[(s, j)];
                lu[(s, j)] = lu[(imax, j)];
                lu[(imax, j)] = tmp;
            }
            x.swap(s, imax);
        }
        let inv_pivot = C::one() / lu[(s, s)];
        for i in s + 1..n {
            let factor = lu[(i, s)] * inv_pivot;
            lu[(i, s)] = factor;
            for j in s + 1..n {
                let sub = factor * lu[(s, j)];
                lu[(i, j)] -= sub;
            }
            let sub = factor * x[s];
            x[i] -= sub;
        }
    }
    for i in (0..n).rev() {
        let mut acc = x[i];
        for j in i + 1..n {
            acc -= lu[(i, j)] * x[j];
        }
        x[i] = acc / lu[(i, i)];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_complex_matrix(n: usize, seed: u64) -> DenseMatrix<Complex64> {
        let mut rng = StdRng::seed_from_u64(seed);
        DenseMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    fn reconstruction_error(a: &DenseMatrix<Complex64>, dec: &SvdDecomposition<Complex64>) -> f64 {
        let n = a.nrows();
        let mut worst = 0.0_f64;
        for j in 0..n {
            for i in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for l in 0..n {
                    acc += dec.u[(i, l)] * dec.sigma[l] * dec.v[(j, l)].conj();
                }
                worst = worst.max((acc - a[(i, j)]).abs());
            }
        }
        worst
    }

    fn unitary_error(m: &DenseMatrix<Complex64>) -> f64 {
        let n = m.nrows();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..n {
                    acc += m[(r, i)].conj() * m[(r, j)];
                }
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - want).abs());
            }
        }
        worst
    }

    #[test]
    fn svd_identity() {
        let a = DenseMatrix::<f64>::identity(3);
        let dec = svd(&a).unwrap();
        for s in dec.sigma {
            assert!((s - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn svd_diagonal() {
        let mut a = DenseMatrix::<f64>::zeros(3, 3);
        a[(0, 0)] = 3.0;
        a[(1, 1)] = 2.0;
        a[(2, 2)] = 1.0;
        let dec = svd(&a).unwrap();
        assert!((dec.sigma[0] - 3.0).abs() < 1e-14);
        assert!((dec.sigma[1] - 2.0).abs() < 1e-14);
        assert!((dec.sigma[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn svd_random_complex_reconstructs() {
        let a = random_complex_matrix(8, 7);
        let dec = svd(&a).unwrap();
        let norm = a.frobenius_norm();
        assert!(reconstruction_error(&a, &dec) <= 1e-13 * norm);
        assert!(unitary_error(&dec.u) <= 1e-13);
        assert!(unitary_error(&dec.v) <= 1e-13);
    }

    #[test]
    fn svd_rank_deficient_stays_unitary() {
        let mut a = DenseMatrix::<Complex64>::zeros(4, 4);
        a[(0, 0)] = Complex64::new(1.0, 0.5);
        a[(1, 1)] = Complex64::new(0.0, 2.0);
        let dec = svd(&a).unwrap();
        assert!(unitary_error(&dec.u) <= 1e-13);
        assert!(dec.sigma[2] < 1e-15 && dec.sigma[3] < 1e-15);
    }

    #[test]
    fn svd_singular_values_permutation_invariant() {
        let a = random_complex_matrix(6, 3);
        let mut b = DenseMatrix::<Complex64>::zeros(6, 6);
        // rows rotated by 2, columns reversed
        for i in 0..6 {
            for j in 0..6 {
                b[((i + 2) % 6, 5 - j)] = a[(i, j)];
            }
        }
        let sa = svd(&a).unwrap().sigma;
        let sb = svd(&b).unwrap().sigma;
        for (x, y) in sa.iter().zip(sb.iter()) {
            assert!((x - y).abs() <= 1e-13 * sa[0]);
        }
    }

    #[test]
    fn tsvd_identity_returns_rhs() {
        let a = DenseMatrix::<f64>::identity(4);
        let b = [1.0, -2.0, 3.0, 0.5];
        let sol = tsvd_solve(&a, &b, DEFAULT_THRESHOLD_MULTIPLIER).unwrap();
        for (x, want) in sol.x.iter().zip(b.iter()) {
            assert!((x - want).abs() < 1e-14);
        }
        assert_eq!(sol.rank, 4);
        assert!(!sol.degenerate);
    }

    #[test]
    fn tsvd_drops_tiny_direction() {
        let mut a = DenseMatrix::<f64>::zeros(2, 2);
        a[(0, 0)] = 1.0;
        a[(1, 1)] = 1e-20;
        let sol = tsvd_solve(&a, &[1.0, 1.0], DEFAULT_THRESHOLD_MULTIPLIER).unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-14);
        assert_eq!(sol.x[1], 0.0);
        assert_eq!(sol.rank, 1);
    }

    #[test]
    fn tsvd_degenerate_flag() {
        // the threshold scales with ||A||_F, so only an (effectively) zero
        // matrix has every direction below it
        let a = DenseMatrix::<f64>::zeros(2, 2);
        let sol = tsvd_solve(&a, &[1.0, 1.0], DEFAULT_THRESHOLD_MULTIPLIER).unwrap();
        assert!(sol.degenerate);
        assert!(sol.x.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn tsvd_matches_lu_when_well_conditioned() {
        let a = random_complex_matrix(8, 11);
        let mut rng = StdRng::seed_from_u64(12);
        let b: Vec<Complex64> = (0..8)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let xs = tsvd_solve(&a, &b, DEFAULT_THRESHOLD_MULTIPLIER).unwrap();
        let xl = lu_solve(&a, &b).unwrap();
        let scale = xl.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for (p, q) in xs.x.iter().zip(xl.iter()) {
            assert!((p - q).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn tsvd_minimum_norm_over_retained_subspace() {
        // dropped directions of V are orthogonal to the solution
        let mut a = DenseMatrix::<f64>::zeros(3, 3);
        a[(0, 0)] = 2.0;
        a[(1, 1)] = 1.0;
        a[(2, 2)] = 1e-20;
        let sol = tsvd_solve(&a, &[1.0, 1.0, 1.0], DEFAULT_THRESHOLD_MULTIPLIER).unwrap();
        let dec = svd(&a).unwrap();
        for i in sol.rank..3 {
            let vi = dec.v.col(i);
            let dot: f64 = vi.iter().zip(sol.x.iter()).map(|(p, q)| p * q).sum();
            assert!(dot.abs() < 1e-14);
        }
    }

    #[test]
    fn rrqr_identity_and_rank_deficient() {
        let a = DenseMatrix::<f64>::identity(3);
        let sol = rrqr_solve(&a, &[1.0, 2.0, 3.0]).unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-14);
        assert!((sol.x[1] - 2.0).abs() < 1e-14);
        assert!((sol.x[2] - 3.0).abs() < 1e-14);

        let mut d = DenseMatrix::<f64>::zeros(2, 2);
        d[(0, 0)] = 1.0;
        let sol = rrqr_solve(&d, &[1.0, 0.0]).unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-14);
        assert_eq!(sol.x[1], 0.0);
        assert_eq!(sol.rank, 1);
    }

    #[test]
    fn rrqr_matches_tsvd_well_conditioned() {
        let a = random_complex_matrix(8, 21);
        let b: Vec<Complex64> = (0..8).map(|i| Complex64::new(i as f64, -1.0)).collect();
        let xq = rrqr_solve(&a, &b).unwrap();
        let xs = tsvd_solve(&a, &b, DEFAULT_THRESHOLD_MULTIPLIER).unwrap();
        let scale = xs.x.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for (p, q) in xq.x.iter().zip(xs.x.iter()) {
            assert!((p - q).abs() <= 1e-11 * scale);
        }
    }

    #[test]
    fn lu_small_cases() {
        let a = DenseMatrix::<f64>::identity(3);
        let x = lu_solve(&a, &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(x, vec![4.0, 5.0, 6.0]);

        let mut d = DenseMatrix::<f64>::zeros(2, 2);
        d[(0, 0)] = 2.0;
        d[(1, 1)] = 4.0;
        let x = lu_solve(&d, &[2.0, 4.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lu_residual_random() {
        let a = random_complex_matrix(16, 5);
        let b: Vec<Complex64> = (0..16)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64).cos()))
            .collect();
        let x = lu_solve(&a, &b).unwrap();
        let ax = a.mul_vec(&x);
        let xnorm = x.iter().map(|v| v.abs_sq()).sum::<f64>().sqrt();
        let rnorm = ax
            .iter()
            .zip(b.iter())
            .map(|(p, q)| (p - q).abs_sq())
            .sum::<f64>()
            .sqrt();
        assert!(rnorm <= 1e-12 * a.frobenius_norm() * xnorm);
    }

    #[test]
    fn lu_singular_errors() {
        let a = DenseMatrix::<f64>::zeros(2, 2);
        assert!(matches!(
            lu_solve(&a, &[1.0, 1.0]),
            Err(Error::SingularMatrix)
        ));
    }
}
