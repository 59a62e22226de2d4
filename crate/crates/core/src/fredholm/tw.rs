//! Tracy–Widom distributions.
//!
//! `F₂` is computed both as the Fredholm determinant `det(1 - K)` on
//! `L²(s, ∞)` and from the Hastings–McLeod function,
//! `F₂(s) = exp(-∫_s^∞ (x-s) q(x)² dx)`. `F₁` and `F₄` are not derived
//! here; they use the standard Tracy–Widom identities
//! `F₁(s) = exp(-½∫_s^∞ q) √F₂(s)` and
//! `F₄(s/√2) = cosh(½∫_s^∞ q) √F₂(s)`.

use super::det::{fredholm_det, FredholmValue, RestrictedKernelOperator};
use super::painleve::HastingsMcLeod;
use super::quadrature::gauss_legendre;
use crate::error::{Error, Result};
use crate::kernels::ExtendedAiryKernel;

/// Range on which `f2_cdf` is offered.
pub const F2_RANGE: (f64, f64) = (-10.0, 6.0);
/// Range on which `tw_family_cdfs` is offered.
pub const FAMILY_RANGE: (f64, f64) = (-10.0, 8.0);
/// Where the integrals of `q` are cut off; `q ≈ Ai` is below 1e-40 there.
const INTEGRATION_TOP: f64 = 30.0;

/// `F₂(s)` as a Fredholm determinant, with its convergence record.
pub fn f2_fredholm(s: f64) -> Result<FredholmValue> {
    let k = ExtendedAiryKernel;
    let op = RestrictedKernelOperator::new(&k, &[0.0], &[s])?;
    fredholm_det(&op)
}

/// `F₂(s)` for `s ∈ [-10, 6]` (Fredholm route).
pub fn f2_cdf(s: f64) -> Result<f64> {
    if !(F2_RANGE.0..=F2_RANGE.1).contains(&s) {
        return Err(Error::OutOfRange(format!("F2 argument {s} outside [-10, 6]")));
    }
    Ok(f2_fredholm(s)?.value)
}

/// `∫_s^∞ q` and `∫_s^∞ (x-s) q²`.
fn q_integrals(hm: &HastingsMcLeod, s: f64) -> (f64, f64) {
    let (gx, gw) = gauss_legendre(20);
    let panels = ((INTEGRATION_TOP - s) / 0.5).ceil() as usize;
    let h = (INTEGRATION_TOP - s) / panels as f64;
    let mut u = 0.0;
    let mut e = 0.0;
    for p in 0..panels {
        let a = s + p as f64 * h;
        for (x, w) in gx.iter().zip(&gw) {
            let xi = a + 0.5 * h * (x + 1.0);
            let q = hm.q(xi);
            u += 0.5 * h * w * q;
            e += 0.5 * h * w * (xi - s) * q * q;
        }
    }
    (u, e)
}

/// The three Tracy–Widom distribution functions from one Hastings–McLeod solve.
#[derive(Debug, Clone, Copy)]
pub struct TracyWidom<'a> {
    hm: &'a HastingsMcLeod,
}

impl TracyWidom<'static> {
    pub fn shared() -> Result<Self> {
        Ok(TracyWidom { hm: HastingsMcLeod::shared()? })
    }
}

impl<'a> TracyWidom<'a> {
    pub fn new(hm: &'a HastingsMcLeod) -> Self {
        TracyWidom { hm }
    }

    fn check(&self, s: f64) -> Result<()> {
        if s < self.hm.domain().0 || !s.is_finite() {
            return Err(Error::OutOfRange(format!("argument {s} below the Painlevé domain")));
        }
        Ok(())
    }

    pub fn f2(&self, s: f64) -> Result<f64> {
        self.check(s)?;
        Ok((-q_integrals(self.hm, s).1).exp())
    }

    pub fn f1(&self, s: f64) -> Result<f64> {
        self.check(s)?;
        let (u, e) = q_integrals(self.hm, s);
        Ok((-0.5 * u - 0.5 * e).exp())
    }

    pub fn f4(&self, s: f64) -> Result<f64> {
        let r = std::f64::consts::SQRT_2 * s;
        self.check(r)?;
        let (u, e) = q_integrals(self.hm, r);
        Ok((0.5 * u).cosh() * (-0.5 * e).exp())
    }

    pub fn cdf(&self, beta: u8, s: f64) -> Result<f64> {
        match beta {
            1 => self.f1(s),
            2 => self.f2(s),
            4 => self.f4(s),
            _ => Err(Error::Config(format!("beta must be 1, 2 or 4, got {beta}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwTable {
    pub s: Vec<f64>,
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
    pub f4: Vec<f64>,
}

/// `(F₁, F₂, F₄)` on a grid inside `[-10, 8]`, all from the Painlevé route.
pub fn tw_family_cdfs(s_grid: &[f64]) -> Result<TwTable> {
    if let Some(s) = s_grid.iter().find(|s| !(FAMILY_RANGE.0..=FAMILY_RANGE.1).contains(*s)) {
        return Err(Error::OutOfRange(format!("grid point {s} outside [-10, 8]")));
    }
    let tw = TracyWidom::shared()?;
    let mut table = TwTable { s: s_grid.to_vec(), f1: vec![], f2: vec![], f4: vec![] };
    for &s in s_grid {
        table.f1.push(tw.f1(s)?);
        table.f2.push(tw.f2(s)?);
        table.f4.push(tw.f4(s)?);
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfMoments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
}

/// Mean, variance and skewness of a distribution given by its CDF, using
/// `E[X^k] = ∫_0^∞ k s^{k-1} (1-F) ds - ∫_{-∞}^0 k s^{k-1} F ds` on `[lo, hi]`.
pub fn cdf_moments(cdf: impl Fn(f64) -> Result<f64>, lo: f64, hi: f64) -> Result<CdfMoments> {
    let (gx, gw) = gauss_legendre(16);
    let mut m = [0.0f64; 3];
    for (a, b) in [(lo, 0.0), (0.0, hi)] {
        let panels = ((b - a) / 0.5).ceil() as usize;
        let h = (b - a) / panels as f64;
        for p in 0..panels {
            let left = a + p as f64 * h;
            for (x, w) in gx.iter().zip(&gw) {
                let s = left + 0.5 * h * (x + 1.0);
                let f = cdf(s)?;
                let tail = if s >= 0.0 { 1.0 - f } else { -f };
                for (k, mk) in m.iter_mut().enumerate() {
                    let kf = (k + 1) as f64;
                    *mk += 0.5 * h * w * kf * s.powi(k as i32) * tail;
                }
            }
        }
    }
    let mean = m[0];
    let variance = m[1] - mean * mean;
    let third = m[2] - 3.0 * mean * m[1] + 2.0 * mean.powi(3);
    Ok(CdfMoments { mean, variance, skewness: third / variance.powf(1.5) })
}

/// Moments of `F_β` from the Painlevé route.
pub fn tw_moments(beta: u8) -> Result<CdfMoments> {
    let tw = TracyWidom::shared()?;
    cdf_moments(|s| tw.cdf(beta, s), -10.0, 14.0)
}

/// Moments of `F₂` from the Fredholm route.
pub fn f2_moments_fredholm() -> Result<CdfMoments> {
    cdf_moments(f2_cdf, F2_RANGE.0, F2_RANGE.1)
}
