//! Hermite kernel of the scaled oscillator `H_N = -½∂² + x²/(2N²)`.
//!
//! Eigenfunctions are `ψ_n(x) = N^{-1/4} φ_{n-1}(x/√N)` with `φ_k` the
//! normalized Hermite functions and energies taken as `E_n = n/N`. The
//! recursion for `φ_k` runs with a separate log-scale so that it survives
//! arguments far past where `e^{-z²/2}` underflows.

use super::{theta, ContinuousKernel};
use crate::error::{Error, Result};

/// Largest supported number of modes.
pub const MAX_N: usize = 10_000;
/// Hard cap on the number of modes summed in the `t > t'` tail.
pub const MODE_CAP: usize = 20_000_000;
const TAIL_TOL: f64 = 1e-14;
const RESCALE: f64 = 1e150;

/// Running pair `(φ_{k-1}, φ_k)` at a fixed argument, stored as mantissas
/// times `e^{log_scale}`.
#[derive(Debug, Clone)]
struct HermiteRecursion {
    z: f64,
    k: usize,
    prev: f64,
    cur: f64,
    log_scale: f64,
}

impl HermiteRecursion {
    fn new(z: f64) -> Self {
        HermiteRecursion {
            z,
            k: 0,
            prev: 0.0,
            cur: 1.0,
            log_scale: -0.5 * z * z - 0.25 * std::f64::consts::PI.ln(),
        }
    }

    /// Advance to `φ_{k+1}`. Returns the factor by which the mantissas were
    /// divided (1 if no rescale happened).
    fn step(&mut self) -> f64 {
        let k = self.k as f64;
        let next = (2.0 / (k + 1.0)).sqrt() * self.z * self.cur - (k / (k + 1.0)).sqrt() * self.prev;
        self.prev = self.cur;
        self.cur = next;
        self.k += 1;
        if self.cur.abs() > RESCALE {
            self.prev /= RESCALE;
            self.cur /= RESCALE;
            self.log_scale += RESCALE.ln();
            RESCALE
        } else {
            1.0
        }
    }

    fn value(&self) -> f64 {
        self.cur * self.log_scale.exp()
    }
}

/// Normalized Hermite function `φ_k(z)`.
pub fn hermite_function(k: usize, z: f64) -> f64 {
    let mut r = HermiteRecursion::new(z);
    for _ in 0..k {
        r.step();
    }
    r.value()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteKernel {
    n: usize,
}

impl HermiteKernel {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("Hermite kernel needs N >= 1".into()));
        }
        if n > MAX_N {
            return Err(Error::OutOfRange(format!("N = {n} exceeds supported {MAX_N}")));
        }
        Ok(HermiteKernel { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Mode `ψ_n(x)` for `n >= 1`.
    pub fn mode(&self, n: usize, x: f64) -> f64 {
        let nf = self.n as f64;
        nf.powf(-0.25) * hermite_function(n - 1, x / nf.sqrt())
    }

    pub fn energy(&self, n: usize) -> f64 {
        n as f64 / self.n as f64
    }

    /// `Σ_{n=from}^{to} w(n) ψ_n(x) ψ_n(y)`, with an early exit once
    /// `bound(n)` (a bound on the remaining terms) drops below tolerance.
    fn weighted_sum(
        &self,
        x: f64,
        y: f64,
        from: usize,
        to: usize,
        weight: impl Fn(usize) -> f64,
        stop: impl Fn(usize) -> bool,
    ) -> Option<f64> {
        let sn = (self.n as f64).sqrt();
        let mut a = HermiteRecursion::new(x / sn);
        let mut b = HermiteRecursion::new(y / sn);
        // sum is held in the mantissa units of a·b
        let mut sum = 0.0;
        let mut mode = 1;
        loop {
            if mode >= from {
                sum += weight(mode) * a.cur * b.cur;
            }
            if mode >= to {
                break;
            }
            if mode >= from && stop(mode) {
                break;
            }
            sum /= a.step();
            sum /= b.step();
            mode += 1;
            if mode > MODE_CAP {
                return None;
            }
        }
        Some(sum * (a.log_scale + b.log_scale).exp() / sn)
    }

    /// `K_N(x,y) = Σ_{n=1}^N ψ_n(x) ψ_n(y)`.
    pub fn kernel(&self, x: f64, y: f64) -> Result<f64> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::Kernel("non-finite kernel argument".into()));
        }
        Ok(self.weighted_sum(x, y, 1, self.n, |_| 1.0, |_| false).unwrap())
    }

    /// Extended kernel `(e^{-tH_N}(K_N - Θ(t-t'))e^{t'H_N})(x,x')`.
    pub fn extended(&self, x: f64, t: f64, xp: f64, tp: f64) -> Result<f64> {
        if ![x, t, xp, tp].iter().all(|v| v.is_finite()) {
            return Err(Error::Kernel("non-finite kernel argument".into()));
        }
        let d = tp - t;
        if d.abs() > 10.0 {
            return Err(Error::OutOfRange(format!("|t - t'| = {} exceeds 10", d.abs())));
        }
        if theta(t - tp) == 0.0 {
            let w = |n: usize| (d * self.energy(n)).exp();
            return Ok(self.weighted_sum(x, xp, 1, self.n, w, |_| false).unwrap());
        }
        // |φ_k| <= π^{-1/4} bounds the tail by a geometric series
        let nf = self.n as f64;
        let q = (d / nf).exp();
        let envelope = 1.0 / (std::f64::consts::PI.sqrt() * nf.sqrt() * (1.0 - q));
        let w = |n: usize| (d * self.energy(n)).exp();
        let stop = |n: usize| (d * self.energy(n + 1)).exp() * envelope < TAIL_TOL;
        self.weighted_sum(x, xp, self.n + 1, usize::MAX, w, stop)
            .map(|s| -s)
            .ok_or_else(|| Error::Kernel(format!("Hermite tail not converged within {MODE_CAP} modes")))
    }
}

impl ContinuousKernel for HermiteKernel {
    fn evaluate(&self, x: f64, t: f64, xp: f64, tp: f64) -> Result<f64> {
        if t == tp {
            self.kernel(x, xp)
        } else {
            self.extended(x, t, xp, tp)
        }
    }

    fn decay_scale(&self) -> f64 {
        (2.0f64).sqrt() * self.n as f64
    }
}
