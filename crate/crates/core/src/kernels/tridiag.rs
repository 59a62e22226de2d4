//! Selected eigenpairs of real symmetric tridiagonal matrices.
//!
//! Eigenvalues are located by Sturm-sequence bisection, eigenvectors by
//! inverse iteration. Cost is linear in the matrix size per eigenpair, which
//! is what makes large lattice windows tractable when only a band of the
//! spectrum is needed.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// off[i] couples i and i+1
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1));
        SymTridiagonal { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Gershgorin bounds on the spectrum.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.len() {
            let b2 = if i > 0 { self.off[i - 1] * self.off[i - 1] } else { 0.0 };
            q = self.diag[i] - x - if i > 0 { b2 / q } else { 0.0 };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn kth_eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.spectral_bounds();
        lo -= 1e-12;
        hi += 1e-12;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// All eigenvalues in [lo, hi], ascending.
    pub fn eigenvalues_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let first = self.count_below(lo);
        let last = self.count_below(hi + 1e-14 * (1.0 + hi.abs()));
        (first..last).map(|k| self.kth_eigenvalue(k)).collect()
    }

    /// Unit eigenvector for a (converged) eigenvalue by inverse iteration.
    pub fn eigenvector(&self, lambda: f64) -> Result<Vec<f64>> {
        let n = self.len();
        let (slo, shi) = self.spectral_bounds();
        let shift = lambda + 1e-13 * (shi - slo).max(1.0);
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 13) as f64 * 1e-3).collect();
        normalize(&mut v);
        let mut prev_resid = f64::INFINITY;
        for _ in 0..6 {
            let mut w = self.solve_shifted(shift, &v)?;
            normalize(&mut w);
            let resid = self.residual(&w, lambda);
            v = w;
            if resid < 1e-13 || resid >= prev_resid * 0.5 {
                break;
            }
            prev_resid = resid;
        }
        // fix sign so the largest entry is positive
        let imax = (0..n)
            .max_by(|&a, &b| v[a].abs().partial_cmp(&v[b].abs()).unwrap())
            .unwrap_or(0);
        if v[imax] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        Ok(v)
    }

    pub fn residual(&self, v: &[f64], lambda: f64) -> f64 {
        let n = self.len();
        let mut r = 0.0f64;
        for i in 0..n {
            let mut y = (self.diag[i] - lambda) * v[i];
            if i > 0 {
                y += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                y += self.off[i] * v[i + 1];
            }
            r = r.max(y.abs());
        }
        r
    }

    /// Solve (T - shift I) x = b by Gaussian elimination with partial pivoting.
    fn solve_shifted(&self, shift: f64, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if n == 0 {
            return Ok(Vec::new());
        }
        // banded LU with one extra super-diagonal from pivoting
        let mut d: Vec<f64> = self.diag.iter().map(|x| x - shift).collect();
        let mut du: Vec<f64> = self.off.clone();
        let mut dl: Vec<f64> = self.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut x = b.to_vec();
        let tiny = 1e-300;
        for i in 0..n.saturating_sub(1) {
            if dl[i].abs() > d[i].abs() {
                // swap rows i and i+1
                let l = d[i] / dl[i];
                d[i] = dl[i];
                let tmp = d[i + 1];
                d[i + 1] = du[i] - l * tmp;
                du[i] = tmp;
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -l * du[i + 1];
                }
                x.swap(i, i + 1);
                x[i + 1] -= l * x[i];
                dl[i] = l;
            } else {
                if d[i].abs() < tiny {
                    d[i] = tiny;
                }
                let l = dl[i] / d[i];
                d[i + 1] -= l * du[i];
                x[i + 1] -= l * x[i];
                dl[i] = l;
            }
        }
        if d[n - 1].abs() < tiny {
            d[n - 1] = tiny;
        }
        x[n - 1] /= d[n - 1];
        if n >= 2 {
            x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Eigen("inverse iteration produced non-finite values".into()));
        }
        Ok(x)
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}
