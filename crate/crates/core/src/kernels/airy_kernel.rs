//! Airy kernel and the extended Airy kernel.
//!
//! With `Δ = t' - t`,
//! `R(x,t;y,t') = ∫_0^∞ e^{-Δμ} Ai(x+μ) Ai(y+μ) dμ - Θ(t-t') G_{t-t'}(x,y)`
//! where `G_s = e^{-sH}` is the Airy heat kernel. For `t - t' >= 1` the
//! subtraction is numerically hopeless (`G_s` grows like `e^{s³/12}`) and the
//! equivalent form `-∫_0^∞ e^{-sλ} Ai(x-λ) Ai(y-λ) dλ` is used instead.

use nalgebra::DMatrix;

use super::airy::{airy_fn, airy_unchecked};
use super::{theta, ContinuousKernel};
use crate::error::{Error, Result};
use crate::fredholm::quadrature::gauss_legendre;

pub(crate) const PANEL: f64 = 0.5;
const PANEL_ORDER: usize = 16;
/// Integrand exponent at which the tail is dropped.
pub(crate) const TAIL_EXPONENT: f64 = 40.0;
/// Backward gap above which the direct negative-side integral is used.
pub(crate) const DIRECT_SWITCH: f64 = 1.0;

/// `K(x,y) = (Ai(x)Ai'(y) - Ai'(x)Ai(y)) / (x - y)`, with the diagonal limit
/// `Ai'(x)² - x Ai(x)²` used when `|x - y| < 1e-6`.
pub fn airy_kernel(x: f64, y: f64) -> Result<f64> {
    if (x - y).abs() < 1e-6 {
        let m = 0.5 * (x + y);
        let (a, ap) = airy_fn(m)?;
        return Ok(ap * ap - m * a * a);
    }
    let (ax, apx) = airy_fn(x)?;
    let (ay, apy) = airy_fn(y)?;
    Ok((ax * apy - apx * ay) / (x - y))
}

/// Airy heat kernel `G_s(x,y) = (e^{-sH})(x,y)` for `s > 0`, where
/// `H = -d²/dx² + x`.
pub fn airy_heat_kernel(s: f64, x: f64, y: f64) -> f64 {
    debug_assert!(s > 0.0);
    let d = x - y;
    (4.0 * std::f64::consts::PI * s).powf(-0.5)
        * (-d * d / (4.0 * s) - s * (x + y) / 2.0 + s * s * s / 12.0).exp()
}

/// Quadrature nodes and weights on [0, end] with panels no longer than `h`.
pub(crate) fn panel_rule(end: f64, h: f64) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(PANEL_ORDER);
    let panels = (end / h).ceil().max(1.0) as usize;
    let len = end / panels as f64;
    let mut nodes = Vec::with_capacity(panels * PANEL_ORDER);
    let mut weights = Vec::with_capacity(panels * PANEL_ORDER);
    for p in 0..panels {
        let a = p as f64 * len;
        for (x, w) in gx.iter().zip(&gw) {
            nodes.push(a + 0.5 * len * (x + 1.0));
            weights.push(0.5 * len * w);
        }
    }
    (nodes, weights)
}

/// Upper limit for `∫_0^M e^{-Δμ} Ai(m+μ)² dμ` beyond which the integrand
/// is below `e^{-40}`.
pub(crate) fn forward_cutoff(m: f64, delta: f64) -> f64 {
    let mut mu = (-m).max(0.0);
    loop {
        let z = m + mu;
        if z > 0.0 && (4.0 / 3.0) * z.powf(1.5) + delta * mu >= TAIL_EXPONENT {
            return mu.max(1.0);
        }
        mu += 0.25;
        if mu > 400.0 {
            return mu;
        }
    }
}

fn check_args(vals: &[f64]) -> Result<()> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Kernel("non-finite kernel argument".into()))
    }
}

/// Scalar extended Airy kernel.
pub fn extended_airy_kernel(x: f64, t: f64, y: f64, tp: f64) -> Result<f64> {
    check_args(&[x, t, y, tp])?;
    if t == tp {
        return airy_kernel(x, y);
    }
    let m = ExtendedAiryKernel.block(&[x], t, &[y], tp)?;
    Ok(m[(0, 0)])
}

/// Extended Airy kernel with batched block evaluation.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExtendedAiryKernel;

impl ExtendedAiryKernel {
    /// `-∫_0^{40/s} e^{-sλ} Ai(x-λ) Ai(y-λ) dλ`.
    fn backward_direct(&self, xs: &[f64], ys: &[f64], s: f64) -> Result<DMatrix<f64>> {
        let end = TAIL_EXPONENT / s;
        let (lam, w) = panel_rule(end, PANEL.min(4.0 / s));
        let scaled: Vec<f64> = lam.iter().zip(&w).map(|(l, w)| -w * (-s * l).exp()).collect();
        let ax = airy_matrix(xs, &lam, -1.0, None)?;
        let ay = airy_matrix(ys, &lam, -1.0, Some(&scaled))?;
        Ok(ax * ay.transpose())
    }
}

/// Rows `Ai(x_i + sign·μ_k) · scale_k`.
pub(crate) fn airy_matrix(xs: &[f64], mu: &[f64], sign: f64, scale: Option<&[f64]>) -> Result<DMatrix<f64>> {
    let lowest = xs.iter().fold(f64::INFINITY, |a, &b| a.min(b))
        + if sign < 0.0 { -mu.last().copied().unwrap_or(0.0) } else { 0.0 };
    if lowest < super::airy::AIRY_MIN_X {
        return Err(Error::Kernel(format!("Airy argument {lowest} below supported range")));
    }
    Ok(DMatrix::from_fn(xs.len(), mu.len(), |i, k| {
        let a = airy_unchecked(xs[i] + sign * mu[k]).0;
        match scale {
            Some(s) => a * s[k],
            None => a,
        }
    }))
}

impl ContinuousKernel for ExtendedAiryKernel {
    fn evaluate(&self, x: f64, t: f64, xp: f64, tp: f64) -> Result<f64> {
        extended_airy_kernel(x, t, xp, tp)
    }

    fn block(&self, xs: &[f64], t: f64, ys: &[f64], tp: f64) -> Result<DMatrix<f64>> {
        check_args(&[t, tp])?;
        check_args(xs)?;
        check_args(ys)?;
        if t == tp {
            let mut out = DMatrix::zeros(xs.len(), ys.len());
            for (i, &x) in xs.iter().enumerate() {
                for (j, &y) in ys.iter().enumerate() {
                    out[(i, j)] = airy_kernel(x, y)?;
                }
            }
            return Ok(out);
        }
        let s = t - tp;
        if s >= DIRECT_SWITCH {
            return self.backward_direct(xs, ys, s);
        }
        let delta = tp - t;
        let min_arg = xs.iter().chain(ys).fold(f64::INFINITY, |a, &b| a.min(b));
        let end = forward_cutoff(min_arg, delta);
        let h = if delta > 0.0 { PANEL.min(4.0 / delta) } else { PANEL };
        let (mu, w) = panel_rule(end, h);
        let scaled: Vec<f64> = mu.iter().zip(&w).map(|(m, w)| w * (-delta * m).exp()).collect();
        let ax = airy_matrix(xs, &mu, 1.0, None)?;
        let ay = airy_matrix(ys, &mu, 1.0, Some(&scaled))?;
        let mut out = ax * ay.transpose();
        if theta(s) > 0.0 {
            for (i, &x) in xs.iter().enumerate() {
                for (j, &y) in ys.iter().enumerate() {
                    out[(i, j)] -= airy_heat_kernel(s, x, y);
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fredholm::quadrature::QuadratureScheme;

    #[test]
    fn diagonal_limit_is_continuous() {
        for x in [-3.0, 0.0, 1.7] {
            let d = airy_kernel(x, x).unwrap();
            let off = airy_kernel(x, x + 2e-6).unwrap();
            assert!((d - off).abs() < 1e-5, "{x}: {d} {off}");
        }
    }

    #[test]
    fn static_kernel_is_integral_of_airy_products() {
        for (x, y) in [(0.0, 0.0), (-2.0, 1.0), (1.0, 3.0)] {
            let q = QuadratureScheme::composite(16, 80, 0.0, 40.0).unwrap();
            let integral = q.integrate(|m| airy_unchecked(x + m).0 * airy_unchecked(y + m).0);
            assert!((integral - airy_kernel(x, y).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn forward_branch_tends_to_static_kernel() {
        let k = airy_kernel(0.3, -0.4).unwrap();
        let r = extended_airy_kernel(0.3, 0.0, -0.4, 1e-7).unwrap();
        assert!((k - r).abs() < 1e-6);
    }

    #[test]
    fn direct_and_subtracted_backward_forms_agree() {
        // both representations evaluated at the switch point
        let s = 1.0;
        for (x, y) in [(0.0, 0.0), (-1.0, 0.5), (1.5, -0.5)] {
            let direct = ExtendedAiryKernel.backward_direct(&[x], &[y], s).unwrap()[(0, 0)];
            let delta = -s;
            let end = forward_cutoff(x.min(y), delta);
            let (mu, w) = panel_rule(end, PANEL);
            let integral: f64 = mu
                .iter()
                .zip(&w)
                .map(|(m, w)| w * (-delta * m).exp() * airy_unchecked(x + m).0 * airy_unchecked(y + m).0)
                .sum();
            let subtracted = integral - airy_heat_kernel(s, x, y);
            assert!((direct - subtracted).abs() < 1e-10, "{direct} {subtracted}");
        }
    }

    #[test]
    fn heat_kernel_semigroup() {
        // G_a * G_b = G_{a+b}
        let q = QuadratureScheme::composite(16, 120, -30.0, 30.0).unwrap();
        let (a, b, x, y) = (0.3, 0.5, 0.2, -0.7);
        let conv = q.integrate(|z| airy_heat_kernel(a, x, z) * airy_heat_kernel(b, z, y));
        let direct = airy_heat_kernel(a + b, x, y);
        assert!((conv - direct).abs() < 1e-12 * direct.abs().max(1.0));
    }

    #[test]
    fn heat_kernel_solves_airy_heat_equation() {
        // ∂_s G = G'' - x G in x
        let (s, x, y, h) = (0.4, 0.3, -0.2, 1e-3);
        let g = |s: f64, x: f64| airy_heat_kernel(s, x, y);
        let ds = (g(s + h, x) - g(s - h, x)) / (2.0 * h);
        let dxx = (g(s, x + h) - 2.0 * g(s, x) + g(s, x - h)) / (h * h);
        assert!((ds - (dxx - x * g(s, x))).abs() < 1e-5);
    }

    #[test]
    fn block_matches_scalar() {
        let xs = [-1.0, 0.0, 2.0];
        let ys = [-0.5, 1.0];
        for (t, tp) in [(0.0, 0.7), (0.7, 0.0), (2.5, 0.0), (0.0, 0.0)] {
            let b = ExtendedAiryKernel.block(&xs, t, &ys, tp).unwrap();
            for i in 0..3 {
                for j in 0..2 {
                    let s = extended_airy_kernel(xs[i], t, ys[j], tp).unwrap();
                    assert!((b[(i, j)] - s).abs() < 1e-14);
                }
            }
        }
    }
}
