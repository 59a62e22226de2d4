//! Stationary Hermitian Ornstein–Uhlenbeck process and Dyson's eigenvalue
//! SDE.
//!
//! The stationary law is GUE with density `∝ exp(−Tr A²/N)`. Matching
//! `Tr A² = Σ a_ii² + 2 Σ_{i<j} |a_ij|²` to the exponent gives diagonal
//! variance `N/2` and variance `N/4` for each real component above the
//! diagonal.
//!
//! Time units: `ou_step` uses the matrix time `s` of `q = e^{−s}`, while
//! `dyson_sde_path` integrates `dλ_j = (−λ_j/N + (β/2) Σ_{i≠j} (λ_j − λ_i)⁻¹) dt + db_j`
//! in its own time `t`. For β = 2 the eigenvalues of the matrix process
//! follow the SDE with `t = N s`. Airy time `t_scaled` corresponds to SDE
//! time `N^{2/3} t_scaled`, hence to matrix time `N^{−1/3} t_scaled`.

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::batch::{try_map_replicas, Execution};
use crate::error::{Error, Result};
use crate::rng::substream;

type C64 = Complex<f64>;

const HERMITIAN_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    entries: DMatrix<C64>,
}

impl HermitianMatrix {
    /// Accepts matrices within `1e-14` of Hermitian and symmetrizes them.
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::Config("Hermitian matrix must be square and non-empty".into()));
        }
        let m = HermitianMatrix { entries };
        let r = m.hermiticity_residual();
        if !(r <= HERMITIAN_TOL * m.norm_max().max(1.0)) {
            return Err(Error::Config(format!("matrix is not Hermitian (residual {r:.2e})")));
        }
        Ok(m.symmetrized())
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Config("empty diagonal".into()));
        }
        let n = diag.len();
        Ok(HermitianMatrix {
            entries: DMatrix::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { C64::new(0.0, 0.0) }),
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    /// `max |A − A†|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut r = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                r = r.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        r
    }

    fn norm_max(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn symmetrized(mut self) -> Self {
        let n = self.dim();
        for i in 0..n {
            self.entries[(i, i)].im = 0.0;
            for j in i + 1..n {
                self.entries[(j, i)] = self.entries[(i, j)].conj();
            }
        }
        self
    }

    /// `Tr A²`.
    pub fn trace_square(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// GUE sample with density `∝ exp(−Tr A²/N)`.
pub fn sample_gue<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<HermitianMatrix> {
    if n == 0 {
        return Err(Error::Config("N must be at least 1".into()));
    }
    let nf = n as f64;
    let sd_diag = (nf / 2.0).sqrt();
    let sd_off = (nf / 4.0).sqrt();
    let mut a = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for i in 0..n {
        let d: f64 = rng.sample(StandardNormal);
        a[(i, i)] = C64::new(sd_diag * d, 0.0);
        for j in i + 1..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = C64::new(sd_off * re, sd_off * im);
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    Ok(HermitianMatrix { entries: a })
}

/// Exact Mehler transition over matrix time `dt`:
/// `A′ = qA + √(1−q²) G` with `q = e^{−dt}` and `G` a fresh GUE sample.
/// `dt = 0` is the identity.
pub fn ou_step<R: Rng + ?Sized>(a: &HermitianMatrix, dt: f64, rng: &mut R) -> Result<HermitianMatrix> {
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(Error::Config(format!("ou_step needs a finite dt >= 0, got {dt}")));
    }
    if dt == 0.0 {
        return Ok(a.clone());
    }
    let q = (-dt).exp();
    let g = sample_gue(a.dim(), rng)?;
    let s = (1.0 - q * q).sqrt();
    Ok(HermitianMatrix {
        entries: a.entries.map(|z| z * q) + g.entries.map(|z| z * s),
    })
}

/// All eigenvalues, descending: Householder reduction to a real tridiagonal
/// matrix, then implicit QR without eigenvectors.
pub fn eigenvalues(a: &HermitianMatrix) -> Result<Vec<f64>> {
    if a.entries.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Eigen("non-finite matrix entry".into()));
    }
    let mut v: Vec<f64> = a.entries.clone().symmetric_eigenvalues().iter().copied().collect();
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Eigen(format!("non-finite eigenvalue for N = {}", a.dim())));
    }
    v.sort_by(|x, y| y.total_cmp(x));
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPath {
    pub times: Vec<f64>,
    /// Descending per time.
    pub eigenvalues: Vec<Vec<f64>>,
    pub beta: u8,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdeOptions {
    /// Base Euler–Maruyama step.
    pub dt: f64,
    /// Drop the Brownian term; a test hook for the deterministic drift.
    pub noise: bool,
}

impl Default for SdeOptions {
    fn default() -> Self {
        SdeOptions { dt: 1e-3, noise: true }
    }
}

/// Deepest bisection of a base step.
const MAX_SPLIT: u32 = 20;

struct Sde<'r, R: ?Sized> {
    n: f64,
    half_beta: f64,
    beta: f64,
    noise: bool,
    rng: &'r mut R,
    scratch: Vec<f64>,
}

impl<R: Rng + ?Sized> Sde<'_, R> {
    fn drift(&self, lam: &[f64], j: usize) -> f64 {
        let mut s = 0.0;
        for (i, &l) in lam.iter().enumerate() {
            if i != j {
                s += 1.0 / (lam[j] - l);
            }
        }
        -lam[j] / self.n + self.half_beta * s
    }

    fn min_gap(lam: &[f64]) -> f64 {
        lam.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min)
    }

    fn normals(&mut self, len: usize, sd: f64) -> Vec<f64> {
        if !self.noise {
            return vec![0.0; len];
        }
        (0..len).map(|_| sd * self.rng.sample::<f64, _>(StandardNormal)).collect()
    }

    /// One step of length `h` driven by the Brownian increments `dw`.
    /// Close pairs or an ordering violation bisect the step along the
    /// Brownian bridge, which keeps the driving path and hence the law.
    fn advance(&mut self, lam: &mut [f64], h: f64, dw: &[f64], depth: u32) -> Result<()> {
        let close = Self::min_gap(lam) < 10.0 * (self.beta * h).sqrt();
        if !(close && depth < MAX_SPLIT) {
            let mut next = std::mem::take(&mut self.scratch);
            next.clear();
            next.extend((0..lam.len()).map(|j| lam[j] + self.drift(lam, j) * h + dw[j]));
            let ordered = next.windows(2).all(|w| w[0] > w[1]) && next.iter().all(|x| x.is_finite());
            if ordered {
                lam.copy_from_slice(&next);
                self.scratch = next;
                return Ok(());
            }
            self.scratch = next;
            if depth >= MAX_SPLIT {
                return Err(Error::Integration(format!(
                    "eigenvalue ordering lost at step {h:.3e} after {MAX_SPLIT} bisections"
                )));
            }
        }
        let bridge = self.normals(lam.len(), (h / 4.0).sqrt());
        let first: Vec<f64> = dw.iter().zip(&bridge).map(|(w, b)| 0.5 * w + b).collect();
        let second: Vec<f64> = dw.iter().zip(&first).map(|(w, f)| w - f).collect();
        self.advance(lam, h / 2.0, &first, depth + 1)?;
        self.advance(lam, h / 2.0, &second, depth + 1)
    }
}

/// Euler–Maruyama path of Dyson's SDE, recorded at `t_grid`. The initial
/// vector is the state at `t_grid[0]`.
pub fn dyson_sde_path<R: Rng + ?Sized>(
    initial: &[f64],
    t_grid: &[f64],
    beta: u8,
    n: usize,
    options: SdeOptions,
    rng: &mut R,
) -> Result<EigenPath> {
    if ![1, 2, 4].contains(&beta) {
        return Err(Error::Config(format!("beta must be 1, 2 or 4, got {beta}")));
    }
    if n == 0 || initial.len() != n {
        return Err(Error::Config(format!("initial vector has {} entries, N = {n}", initial.len())));
    }
    if !initial.windows(2).all(|w| w[0] > w[1]) || initial.iter().any(|x| !x.is_finite()) {
        return Err(Error::Config("initial eigenvalues must be finite and strictly decreasing".into()));
    }
    if t_grid.is_empty() || !t_grid.windows(2).all(|w| w[0] < w[1]) || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::Config("t_grid must be non-empty, finite and increasing".into()));
    }
    if !(options.dt > 0.0 && options.dt.is_finite()) {
        return Err(Error::Config(format!("SDE step must be positive, got {}", options.dt)));
    }
    let mut sde = Sde {
        n: n as f64,
        half_beta: beta as f64 / 2.0,
        beta: beta as f64,
        noise: options.noise,
        rng,
        scratch: Vec::with_capacity(n),
    };
    let mut lam = initial.to_vec();
    let mut out = vec![lam.clone()];
    for w in t_grid.windows(2) {
        let span = w[1] - w[0];
        let steps = (span / options.dt).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        for _ in 0..steps {
            let dw = sde.normals(n, h.sqrt());
            sde.advance(&mut lam, h, &dw, 0)?;
        }
        out.push(lam.clone());
    }
    Ok(EigenPath { times: t_grid.to_vec(), eigenvalues: out, beta })
}

/// `ξ = √2 (λ_max − √2 N) / N^{1/3}`.
pub fn edge_rescale(lambda_max: f64, n: usize) -> f64 {
    let nf = n as f64;
    2f64.sqrt() * (lambda_max - 2f64.sqrt() * nf) / nf.cbrt()
}

/// Matrix-time duration of an Airy-time interval.
pub fn matrix_time(n: usize, dt_scaled: f64) -> f64 {
    dt_scaled / (n as f64).cbrt()
}

/// Rescaled top eigenvalue of the stationary matrix process at each Airy
/// time in `t_grid_scaled`. Replica `r` uses substream `r` of `seed`.
pub fn edge_time_series(
    n: usize,
    t_grid_scaled: &[f64],
    n_samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<Vec<f64>>> {
    if t_grid_scaled.is_empty() || !t_grid_scaled.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Config("t_grid must be non-empty and increasing".into()));
    }
    try_map_replicas(n_samples, exec, |r| {
        let mut rng = substream(seed, r as u64);
        let mut a = sample_gue(n, &mut rng)?;
        let mut xi = Vec::with_capacity(t_grid_scaled.len());
        for (k, &t) in t_grid_scaled.iter().enumerate() {
            if k > 0 {
                a = ou_step(&a, matrix_time(n, t - t_grid_scaled[k - 1]), &mut rng)?;
            }
            xi.push(edge_rescale(eigenvalues(&a)?[0], n));
        }
        Ok(xi)
    })
}

/// Descending GUE spectra, one row per replica.
pub fn gue_spectra(n: usize, n_samples: usize, seed: u64, exec: Execution) -> Result<Vec<Vec<f64>>> {
    try_map_replicas(n_samples, exec, |r| eigenvalues(&sample_gue(n, &mut substream(seed, r as u64))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::HermiteKernel;
    use crate::fredholm::quadrature::QuadratureScheme;
    use crate::stats::{ks_two_sample, ks_two_sample_critical, mean_variance, EmpiricalDistribution};
    use proptest::prelude::{prop_assert, proptest};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn gue_entry_variances() {
        let mut rng = substream(1, 0);
        let n = 100_000;
        let a: Vec<f64> = (0..n).map(|_| sample_gue(1, &mut rng).unwrap().entries[(0, 0)].re).collect();
        let (_, var) = mean_variance(&a).unwrap();
        assert!((var - 0.5).abs() < 3.0 * 0.5 * (2.0 / n as f64).sqrt(), "{var}");

        let tr: Vec<f64> = (0..n).map(|_| sample_gue(2, &mut rng).unwrap().trace_square()).collect();
        let (mean, v) = mean_variance(&tr).unwrap();
        assert!((mean - 4.0).abs() < 3.0 * (v / n as f64).sqrt(), "{mean}");

        for dim in [1, 3, 17] {
            assert_eq!(sample_gue(dim, &mut rng).unwrap().hermiticity_residual(), 0.0);
        }
        assert!(sample_gue(0, &mut rng).is_err());
    }

    #[test]
    fn ou_limits() {
        let mut rng = substream(2, 0);
        let a = sample_gue(4, &mut rng).unwrap();
        assert_eq!(ou_step(&a, 0.0, &mut rng).unwrap(), a);
        assert!(ou_step(&a, -1.0, &mut rng).is_err());

        // dt = 50 forgets the start
        let n = 20_000;
        let pairs: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let a = sample_gue(1, &mut rng).unwrap();
                let b = ou_step(&a, 50.0, &mut rng).unwrap();
                (a.entries[(0, 0)].re, b.entries[(0, 0)].re)
            })
            .collect();
        let corr = pairs.iter().map(|p| p.0 * p.1).sum::<f64>() / n as f64 / 0.5;
        assert!(corr.abs() < 3.0 / (n as f64).sqrt(), "{corr}");
    }

    #[test]
    fn ou_step_is_stationary() {
        let n = 10_000;
        let rows: Vec<(f64, f64)> = crate::batch::map_replicas(n, Execution::Parallel, |r| {
            let mut rng = substream(3, r as u64);
            let a = sample_gue(20, &mut rng).unwrap();
            let b = ou_step(&a, 0.3, &mut rng).unwrap();
            (eigenvalues(&a).unwrap()[0], eigenvalues(&b).unwrap()[0])
        });
        let before = EmpiricalDistribution::new(rows.iter().map(|r| r.0).collect()).unwrap();
        let after = EmpiricalDistribution::new(rows.iter().map(|r| r.1).collect()).unwrap();
        assert!(ks_two_sample(&before, &after) < 0.02);
    }

    #[test]
    fn two_time_covariance_is_mehler() {
        // A(t₀), A(t₁) for N = 1: Cov = q Var with q = e^{−Δt}
        let n = 100_000;
        let dt = 0.7;
        let mut rng = substream(4, 0);
        let mut s = 0.0;
        let mut s2 = 0.0;
        for _ in 0..n {
            let a = sample_gue(1, &mut rng).unwrap();
            let b = ou_step(&a, dt, &mut rng).unwrap();
            let p = a.entries[(0, 0)].re * b.entries[(0, 0)].re;
            s += p;
            s2 += p * p;
        }
        let mean = s / n as f64;
        let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
        let exact = (-dt).exp() * 0.5;
        assert!((mean - exact).abs() < 3.0 * se, "{mean} vs {exact}");
    }

    #[test]
    fn eigenvalue_examples() {
        let d = HermitianMatrix::from_real_diagonal(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(eigenvalues(&d).unwrap(), vec![3.0, 2.0, 1.0]);
        let x = HermitianMatrix::new(DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]))
            .unwrap();
        let e = eigenvalues(&x).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-15 && (e[1] + 1.0).abs() < 1e-15);
        let bad = DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(2., 0.), c(0., 0.)]);
        assert!(HermitianMatrix::new(bad).is_err());
    }

    #[test]
    fn eigenvalues_backward_error_and_trace() {
        let mut rng = substream(5, 0);
        for n in [2, 7, 30] {
            let a = sample_gue(n, &mut rng).unwrap();
            let lam = eigenvalues(&a).unwrap();
            let tr: f64 = (0..n).map(|i| a.entries[(i, i)].re).sum();
            assert!((lam.iter().sum::<f64>() - tr).abs() < 1e-10 * (1.0 + tr.abs()));
            let norm = a.entries.norm();
            for &l in &lam {
                let shifted = a.entries.clone() - DMatrix::from_diagonal_element(n, n, c(l, 0.0));
                let smin = shifted.singular_values().iter().copied().fold(f64::INFINITY, f64::min);
                assert!(smin <= 1e-10 * norm, "{smin}");
            }
        }
    }

    #[test]
    fn scalar_sde_is_ou() {
        let mut rng = substream(6, 0);
        let grid: Vec<f64> = (0..=10_000).map(|k| 2.0 * k as f64).collect();
        let opts = SdeOptions { dt: 1e-2, noise: true };
        let path = dyson_sde_path(&[0.0], &grid, 2, 1, opts, &mut rng).unwrap();
        let x: Vec<f64> = path.eigenvalues[1..].iter().map(|v| v[0]).collect();
        let (_, var) = mean_variance(&x).unwrap();
        assert!((var / 0.5 - 1.0).abs() < 0.05, "{var}");
    }

    #[test]
    fn deterministic_gap_matches_closed_form() {
        // g' = −g/N + β/g, so g² = Nβ + (g₀² − Nβ) e^{−2t/N}
        let a = 0.3;
        let grid = [0.0, 0.25, 0.5, 1.0];
        let opts = SdeOptions { dt: 1e-5, noise: false };
        let path = dyson_sde_path(&[a, -a], &grid, 2, 2, opts, &mut substream(7, 0)).unwrap();
        for (t, lam) in grid.iter().zip(&path.eigenvalues) {
            assert!((lam[0] + lam[1]).abs() < 1e-12);
            let g = lam[0] - lam[1];
            let exact = (4.0 + (4.0 * a * a - 4.0) * (-t).exp()).sqrt();
            assert!((g / exact - 1.0).abs() < 1e-4, "t {t}: {g} vs {exact}");
        }
    }

    #[test]
    fn sde_rejects_bad_input() {
        let mut rng = substream(8, 0);
        let o = SdeOptions::default();
        assert!(dyson_sde_path(&[0.0, 1.0], &[0.0, 1.0], 2, 2, o, &mut rng).is_err());
        assert!(dyson_sde_path(&[1.0, 0.0], &[0.0, 1.0], 3, 2, o, &mut rng).is_err());
        assert!(dyson_sde_path(&[1.0, 0.0], &[1.0, 0.0], 2, 2, o, &mut rng).is_err());
        assert!(dyson_sde_path(&[1.0], &[0.0], 2, 2, o, &mut rng).is_err());
    }

    #[test]
    fn stationary_gap_law_n2() {
        let n = 10_000;
        let rows: Vec<(f64, f64)> = crate::batch::map_replicas(n, Execution::Parallel, |r| {
            let mut rng = substream(9, r as u64);
            let start = eigenvalues(&sample_gue(2, &mut rng).unwrap()).unwrap();
            let path = dyson_sde_path(&start, &[0.0, 4.0], 2, 2, SdeOptions::default(), &mut rng).unwrap();
            let end = &path.eigenvalues[1];
            let fresh = eigenvalues(&sample_gue(2, &mut rng).unwrap()).unwrap();
            (end[0] - end[1], fresh[0] - fresh[1])
        });
        let sde = EmpiricalDistribution::new(rows.iter().map(|r| r.0).collect()).unwrap();
        let gue = EmpiricalDistribution::new(rows.iter().map(|r| r.1).collect()).unwrap();
        assert!(ks_two_sample(&sde, &gue) < 0.03);
    }

    /// λ_max after matrix time `s` from a fixed non-stationary start, by the
    /// matrix route and by the SDE run for time `ratio · s`.
    fn routes(n: usize, s: f64, ratio: f64, seed: u64) -> (EmpiricalDistribution, EmpiricalDistribution) {
        let start: Vec<f64> = (0..n).map(|i| 3.0 * (n as f64).sqrt() * (1.0 - i as f64 / n as f64)).collect();
        let samples = 10_000;
        let rows: Vec<(f64, f64)> = crate::batch::map_replicas(samples, Execution::Parallel, |r| {
            let mut rng = substream(seed, r as u64);
            let a0 = HermitianMatrix::from_real_diagonal(&start).unwrap();
            let m = eigenvalues(&ou_step(&a0, s, &mut rng).unwrap()).unwrap()[0];
            let p = dyson_sde_path(&start, &[0.0, ratio * s], 2, n, SdeOptions::default(), &mut rng).unwrap();
            (m, p.eigenvalues[1][0])
        });
        (
            EmpiricalDistribution::new(rows.iter().map(|r| r.0).collect()).unwrap(),
            EmpiricalDistribution::new(rows.iter().map(|r| r.1).collect()).unwrap(),
        )
    }

    #[test]
    fn matrix_and_sde_routes_agree_with_time_ratio_n() {
        for n in [2usize, 5] {
            let (m, sde) = routes(n, 0.5, n as f64, 10 + n as u64);
            let d = ks_two_sample(&m, &sde);
            assert!(d < 0.03, "N {n}: {d}");
            // the unit ratio is rejected, so the test does fix the time scale
            let (m, sde) = routes(n, 0.5, 1.0, 20 + n as u64);
            assert!(ks_two_sample(&m, &sde) > ks_two_sample_critical(10_000, 10_000), "N {n}");
        }
    }

    #[test]
    fn one_point_density_is_hermite_kernel_diagonal() {
        let n = 50;
        let samples = 10_000;
        let spectra = gue_spectra(n, samples, 11, Execution::Parallel).unwrap();
        let edge = 1.15 * 2f64.sqrt() * n as f64;
        let bins = 40;
        let w = 2.0 * edge / bins as f64;
        let mut counts = vec![0usize; bins];
        for row in &spectra {
            for &l in row {
                let b = ((l + edge) / w).floor();
                if b >= 0.0 && (b as usize) < bins {
                    counts[b as usize] += 1;
                }
            }
        }
        let k = HermiteKernel::new(n).unwrap();
        for (b, &cnt) in counts.iter().enumerate() {
            let lo = -edge + b as f64 * w;
            let q = QuadratureScheme::gauss_legendre(24, lo, lo + w).unwrap();
            let expected = samples as f64 * q.integrate(|x| k.kernel(x, x).unwrap());
            let sigma = expected.sqrt().max(1.0);
            assert!((cnt as f64 - expected).abs() <= 3.0 * sigma, "bin {b}: {cnt} vs {expected:.1}");
        }
    }

    #[test]
    fn edge_rescale_examples() {
        assert_eq!(edge_rescale(2f64.sqrt() * 8.0, 8), 0.0);
        let n = 8usize;
        let l = 2f64.sqrt() * n as f64 + (n as f64).cbrt() / 2f64.sqrt();
        assert!((edge_rescale(l, n) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn edge_series_at_a_single_time_is_the_stationary_edge() {
        let n = 12;
        let series = edge_time_series(n, &[0.0], 50, 12, Execution::Sequential).unwrap();
        for (r, row) in series.iter().enumerate() {
            let a = sample_gue(n, &mut substream(12, r as u64)).unwrap();
            assert_eq!(row, &vec![edge_rescale(eigenvalues(&a).unwrap()[0], n)]);
        }
    }

    #[test]
    fn edge_series_decorrelates() {
        let n = 10;
        let samples = 4000;
        let s = edge_time_series(n, &[0.0, 60.0], samples, 13, Execution::Parallel).unwrap();
        let a: Vec<f64> = s.iter().map(|r| r[0]).collect();
        let b: Vec<f64> = s.iter().map(|r| r[1]).collect();
        let (ma, va) = mean_variance(&a).unwrap();
        let (mb, vb) = mean_variance(&b).unwrap();
        let corr = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / samples as f64 / (va * vb).sqrt();
        assert!(corr.abs() < 3.0 / (samples as f64).sqrt(), "{corr}");
    }

    proptest! {
        #[test]
        fn ou_step_keeps_hermitian(n in 1usize..8, dt in 0.0f64..3.0, seed in 0u64..1000) {
            let mut rng = substream(seed, 0);
            let a = sample_gue(n, &mut rng).unwrap();
            let b = ou_step(&a, dt, &mut rng).unwrap();
            prop_assert!(b.hermiticity_residual() == 0.0);
            let lam = eigenvalues(&b).unwrap();
            prop_assert!(lam.windows(2).all(|w| w[0] >= w[1]));
        }

        #[test]
        fn sde_paths_stay_ordered(n in 2usize..6, seed in 0u64..1000) {
            let mut rng = substream(seed, 1);
            let start = eigenvalues(&sample_gue(n, &mut rng).unwrap()).unwrap();
            let p = dyson_sde_path(&start, &[0.0, 0.5, 1.0], 2, n, SdeOptions::default(), &mut rng).unwrap();
            for lam in &p.eigenvalues {
                prop_assert!(lam.windows(2).all(|w| w[0] > w[1]));
            }
        }
    }
}
