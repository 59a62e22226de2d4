//! Discrete Bessel kernel `B_τ` and its extended version `R_τ`.
//!
//! `B_τ` is the spectral projection onto `{H_τ ≤ 0}` for
//! `H_τ ψ(j) = -ψ(j-1) - ψ(j+1) + (j/τ) ψ(j)`. On all of Z the spectrum of
//! `H_τ` is `{m/τ : m ∈ Z}`, so on a truncated window the zero mode sits at
//! `±ε` and the cut is placed halfway to the next level, at `1/(2τ)`.
//!
//! Small windows are diagonalized densely. For large τ only the rows near a
//! requested band are built, from the eigenpairs whose support reaches it,
//! found by Sturm bisection and inverse iteration.

use nalgebra::{DMatrix, DVector};

use super::tridiag::SymTridiagonal;
use super::{theta, LatticeKernel};
use crate::error::{Error, Result};

/// Dense diagonalization is used while the window has at most this many sites.
pub const DENSE_LIMIT: usize = 500;
const CONVERGENCE_TOL: f64 = 1e-10;

/// The lattice window prescribed for `B_τ`: `[⌊-8τ⌋-50, ⌈2τ⌉+⌈10τ^{1/3}⌉+50]`.
pub fn default_window(tau: f64) -> (i64, i64) {
    let lo = (-8.0 * tau).floor() as i64 - 50;
    let hi = (2.0 * tau).ceil() as i64 + (10.0 * tau.cbrt()).ceil() as i64 + 50;
    (lo, hi)
}

fn edge_margin(tau: f64) -> i64 {
    (10.0 * tau.cbrt()).ceil() as i64 + 50
}

fn h_tau(tau: f64, lo: i64, hi: i64) -> SymTridiagonal {
    let n = (hi - lo + 1) as usize;
    let diag = (0..n).map(|k| (lo + k as i64) as f64 / tau).collect();
    SymTridiagonal::new(diag, vec![-1.0; n.saturating_sub(1)])
}

fn check_tau(tau: f64) -> Result<()> {
    if tau.is_finite() && tau > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("tau must be positive and finite, got {tau}")))
    }
}

/// Dense projection onto `{H_τ ≤ 1/(2τ)}` on `[lo, hi]`.
fn dense_projection(tau: f64, lo: i64, hi: i64) -> Result<DMatrix<f64>> {
    let t = h_tau(tau, lo, hi);
    let n = t.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = t.diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = -1.0;
            m[(i + 1, i)] = -1.0;
        }
    }
    let eig = m.symmetric_eigen();
    let cut = 0.5 / tau;
    let keep: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k] <= cut).collect();
    let v = DMatrix::from_fn(n, keep.len(), |i, c| eig.eigenvectors[(i, keep[c])]);
    let p = &v * v.transpose();
    if p.iter().any(|x| !x.is_finite()) {
        return Err(Error::Eigen("non-finite projection entries".into()));
    }
    Ok(p)
}

/// Projection rows restricted to `[lo, hi]`, built from selected eigenpairs.
/// `margin` controls how far the truncated operator extends past the
/// supports of the needed modes.
fn banded_projection(tau: f64, lo: i64, hi: i64, margin: i64) -> Result<DMatrix<f64>> {
    let two_tau = (2.0 * tau).ceil() as i64;
    // modes m with support [m - 2τ - c, m + 2τ + c] that can reach row lo
    let m_lo = lo - two_tau - margin;
    let w_lo = m_lo - two_tau - 2 * margin;
    let w_hi = hi.max(two_tau) + margin;
    let t = h_tau(tau, w_lo, w_hi);
    let e_lo = m_lo as f64 / tau - 0.5 / tau;
    let energies = t.eigenvalues_in(e_lo, 0.5 / tau);
    let rows = (hi - lo + 1) as usize;
    let off = (lo - w_lo) as usize;
    let mut v = DMatrix::zeros(rows, energies.len());
    for (c, &e) in energies.iter().enumerate() {
        let vec = t.eigenvector(e)?;
        for r in 0..rows {
            v[(r, c)] = vec[off + r];
        }
    }
    Ok(&v * v.transpose())
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `B_τ` tabulated on a window of levels.
#[derive(Debug, Clone)]
pub struct DiscreteBesselKernel {
    tau: f64,
    lo: i64,
    hi: i64,
    matrix: DMatrix<f64>,
}

impl DiscreteBesselKernel {
    /// Dense diagonalization on the default window, confirmed by a
    /// doubled-window recomputation.
    pub fn new(tau: f64) -> Result<Self> {
        check_tau(tau)?;
        let (lo, hi) = default_window(tau);
        Self::on_window(tau, lo, hi)
    }

    /// Dense diagonalization on `[lo, hi]`, checked against the window
    /// extended by its own length on both sides.
    pub fn on_window(tau: f64, lo: i64, hi: i64) -> Result<Self> {
        check_tau(tau)?;
        let len = hi - lo + 1;
        if len < 2 {
            return Err(Error::Config("window must contain at least two levels".into()));
        }
        if len as usize > DENSE_LIMIT {
            return Self::for_rows(tau, lo, hi);
        }
        let base = dense_projection(tau, lo, hi)?;
        let wide = dense_projection(tau, lo - len, hi + len)?;
        let n = len as usize;
        let inner = wide.view((len as usize, len as usize), (n, n)).into_owned();
        let diff = max_abs_diff(&base, &inner);
        if diff > CONVERGENCE_TOL {
            return Err(Error::Window {
                message: format!("discrete Bessel window [{lo}, {hi}] not converged: {diff:.2e}"),
                suggested_lo: lo - len,
                suggested_hi: hi + len,
            });
        }
        Ok(DiscreteBesselKernel { tau, lo, hi, matrix: base })
    }

    /// Rows and columns `[lo, hi]` only, from selected eigenpairs; suitable
    /// for large τ. Converged when doubling the edge margin changes no entry
    /// by more than `1e-10`.
    pub fn for_rows(tau: f64, lo: i64, hi: i64) -> Result<Self> {
        check_tau(tau)?;
        if hi < lo {
            return Err(Error::Config("empty row band".into()));
        }
        let c = edge_margin(tau);
        let base = banded_projection(tau, lo, hi, c)?;
        let wide = banded_projection(tau, lo, hi, 2 * c)?;
        let diff = max_abs_diff(&base, &wide);
        if diff > CONVERGENCE_TOL {
            return Err(Error::Window {
                message: format!("selected-mode projection not converged: {diff:.2e}"),
                suggested_lo: lo,
                suggested_hi: hi,
            });
        }
        Ok(DiscreteBesselKernel { tau, lo, hi, matrix: wide })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    fn index(&self, j: i64) -> Result<usize> {
        if j < self.lo || j > self.hi {
            return Err(Error::Window {
                message: format!("level {j} outside tabulated window [{}, {}]", self.lo, self.hi),
                suggested_lo: self.lo.min(j),
                suggested_hi: self.hi.max(j),
            });
        }
        Ok((j - self.lo) as usize)
    }

    pub fn value(&self, i: i64, j: i64) -> Result<f64> {
        Ok(self.matrix[(self.index(i)?, self.index(j)?)])
    }
}

impl LatticeKernel for DiscreteBesselKernel {
    fn evaluate(&self, j: i64, t: f64, jp: i64, tp: f64) -> Result<f64> {
        if t != tp {
            return Err(Error::Kernel("static discrete Bessel kernel evaluated at two times".into()));
        }
        self.value(j, jp)
    }

    fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }
}

/// Exact exponentials of the truncated `H_d ψ(j) = -ψ(j-1) - ψ(j+1)` with
/// Dirichlet ends, from its sine eigenbasis.
#[derive(Debug, Clone)]
struct LaplacianBasis {
    vectors: DMatrix<f64>,
    energies: DVector<f64>,
}

impl LaplacianBasis {
    fn new(n: usize) -> Self {
        let nf = (n + 1) as f64;
        let norm = (2.0 / nf).sqrt();
        let vectors = DMatrix::from_fn(n, n, |i, k| {
            norm * (std::f64::consts::PI * (k + 1) as f64 * (i + 1) as f64 / nf).sin()
        });
        let energies = DVector::from_fn(n, |k, _| -2.0 * (std::f64::consts::PI * (k + 1) as f64 / nf).cos());
        LaplacianBasis { vectors, energies }
    }

    /// Row `i` of `e^{a H_d}`.
    fn exp_row(&self, a: f64, i: usize) -> DVector<f64> {
        let n = self.energies.len();
        let coeff = DVector::from_fn(n, |k, _| (a * self.energies[k]).exp() * self.vectors[(i, k)]);
        &self.vectors * coeff
    }
}

/// `R_τ(j,t;j',t') = (e^{-tH_d}(B_τ - Θ(t-t'))e^{t'H_d})(j,j')`.
#[derive(Debug, Clone)]
pub struct ExtendedDiscreteKernel {
    bessel: DiscreteBesselKernel,
    basis: LaplacianBasis,
    t_max: f64,
}

impl ExtendedDiscreteKernel {
    /// Supports `|t|, |t'| <= t_max <= τ`. The dense window is widened by a
    /// margin covering the spread of `e^{±t_max H_d}`, then confirmed by the
    /// usual doubling test.
    pub fn new(tau: f64, t_max: f64) -> Result<Self> {
        check_tau(tau)?;
        if !(0.0..=tau).contains(&t_max) {
            return Err(Error::OutOfRange(format!("t_max = {t_max} must lie in [0, tau]")));
        }
        let (lo, hi) = default_window(tau);
        let spread = (2.0 * std::f64::consts::E * t_max).ceil() as i64 + 40;
        let bessel = DiscreteBesselKernel::on_window(tau, lo - spread, hi + spread)?;
        let basis = LaplacianBasis::new((hi - lo + 1 + 2 * spread) as usize);
        Ok(ExtendedDiscreteKernel { bessel, basis, t_max })
    }

    pub fn static_kernel(&self) -> &DiscreteBesselKernel {
        &self.bessel
    }

    /// Entry `(e^{a H_d})(i, j)` of the truncated operator.
    pub fn exp_entry(&self, a: f64, i: i64, j: i64) -> Result<f64> {
        let (bi, bj) = (self.bessel.index(i)?, self.bessel.index(j)?);
        Ok(self.basis.exp_row(a, bi)[bj])
    }

    pub fn value(&self, j: i64, t: f64, jp: i64, tp: f64) -> Result<f64> {
        if ![t, tp].iter().all(|v| v.is_finite()) {
            return Err(Error::Kernel("non-finite time".into()));
        }
        if t.abs() > self.t_max || tp.abs() > self.t_max {
            return Err(Error::OutOfRange(format!(
                "times ({t}, {tp}) exceed the prepared range {}",
                self.t_max
            )));
        }
        if t == tp && t == 0.0 {
            return self.bessel.value(j, jp);
        }
        let r = self.basis.exp_row(-t, self.bessel.index(j)?);
        let c = self.basis.exp_row(tp, self.bessel.index(jp)?);
        let mut v = (r.transpose() * self.bessel.matrix() * &c)[(0, 0)];
        if theta(t - tp) > 0.0 {
            v -= r.dot(&c);
        }
        if !v.is_finite() {
            return Err(Error::Kernel("matrix exponential overflow".into()));
        }
        Ok(v)
    }
}

impl LatticeKernel for ExtendedDiscreteKernel {
    fn evaluate(&self, j: i64, t: f64, jp: i64, tp: f64) -> Result<f64> {
        self.value(j, t, jp, tp)
    }

    fn window(&self) -> (i64, i64) {
        self.bessel.window()
    }
}

/// `J_0(x), …, J_{n_max}(x)` for integer orders by Miller's backward recurrence.
pub fn bessel_j_sequence(x: f64, n_max: usize) -> Vec<f64> {
    if x == 0.0 {
        let mut v = vec![0.0; n_max + 1];
        v[0] = 1.0;
        return v;
    }
    let ax = x.abs();
    let start = (n_max.max(ax as usize) + 30 + (3.0 * ax.max(1.0).cbrt() * 10.0) as usize) | 1;
    let mut out = vec![0.0; n_max + 1];
    let mut next = 0.0;
    let mut cur = 1e-300;
    let mut norm = 0.0;
    for k in (0..=start).rev() {
        if k <= n_max {
            out[k] = cur;
        }
        if k % 2 == 0 {
            norm += if k == 0 { cur } else { 2.0 * cur };
        }
        if k == 0 {
            break;
        }
        let prev = 2.0 * k as f64 / ax * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            out.iter_mut().for_each(|v| *v *= 1e-250);
        }
    }
    for (k, v) in out.iter_mut().enumerate() {
        *v /= norm;
        if x < 0.0 && k % 2 == 1 {
            *v = -*v;
        }
    }
    out
}

/// `J_n(x)` for any integer `n`.
pub fn bessel_j(n: i64, x: f64) -> f64 {
    let k = n.unsigned_abs() as usize;
    let v = bessel_j_sequence(x, k)[k];
    if n < 0 && k % 2 == 1 {
        -v
    } else {
        v
    }
}
