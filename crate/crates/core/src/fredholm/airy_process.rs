//! Joint distributions of the Airy process and its two-point statistics.
//!
//! With `F` the one-point law and `G(a,b) = P(𝒜(0) ≤ a, 𝒜(t) ≤ b)`:
//! - the covariance is Hoeffding's integral `∫∫ [G(a,b) - F(a)F(b)] da db`;
//! - by reversibility the structure function is
//!   `E[(𝒜(0)-𝒜(t))²] = 4 ∫∫_{a<b} [F(a) - G(a,b)] da db`, whose integrand
//!   concentrates near the diagonal but stays smooth as `t → 0`.
//!
//! The first is used for `t > 1` and the second for `t ≤ 1`; the other
//! statistic follows from `S = 2 Var - 2 Cov`.

use nalgebra::DMatrix;

use super::det::{det_identity_minus, fredholm_det, RestrictedKernelOperator, L_CUT};
use super::quadrature::gauss_legendre;
use super::tw::tw_moments;
use crate::error::{Error, Result};
use crate::kernels::airy_kernel::{
    airy_heat_kernel, airy_kernel, airy_matrix, forward_cutoff, panel_rule, DIRECT_SWITCH, PANEL,
    TAIL_EXPONENT,
};
use crate::kernels::ExtendedAiryKernel;

pub const MAX_SLICES: usize = 4;
/// Threshold box for two-point integrals.
pub const THRESHOLD_BOX: (f64, f64) = (-8.0, 6.0);
pub const TWO_POINT_RANGE: (f64, f64) = (0.01, 8.0);

/// `P(𝒜(t_1) ≤ ξ_1, …, 𝒜(t_m) ≤ ξ_m)` for up to four distinct times.
pub fn airy_joint_cdf(times: &[f64], thresholds: &[f64]) -> Result<f64> {
    if times.len() != thresholds.len() || times.is_empty() || times.len() > MAX_SLICES {
        return Err(Error::Config(format!("need 1..={MAX_SLICES} matching times and thresholds")));
    }
    let mut pairs: Vec<(f64, f64)> = times.iter().copied().zip(thresholds.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::Config("times must be distinct".into()));
    }
    let t: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let x: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let k = ExtendedAiryKernel;
    let op = RestrictedKernelOperator::new(&k, &t, &x)?;
    Ok(fredholm_det(&op)?.value)
}

/// Precomputed per-threshold data for the pair of times `(0, t)`.
struct Slice {
    /// `Ai(x_a + μ_k)` rows scaled by `√w_a`.
    forward: DMatrix<f64>,
    /// `Ai(x_a - λ_k)` rows scaled by `√w_a`, used when `t` is large.
    backward: Option<DMatrix<f64>>,
    /// Weighted static block.
    k: DMatrix<f64>,
    nodes: Vec<f64>,
    sqrt_w: Vec<f64>,
    /// `F(ξ)`.
    marginal: f64,
}

/// Nyström assembler for `G(a,b)` at a fixed time gap and order.
pub struct TwoTimeCdf {
    t: f64,
    order: usize,
    ref_nodes: Vec<f64>,
    ref_weights: Vec<f64>,
    mu: Vec<f64>,
    fwd_weights: Vec<f64>,
    bwd_weights: Vec<f64>,
    lam: Vec<f64>,
    lam_weights: Vec<f64>,
}

impl TwoTimeCdf {
    /// `lowest` is the smallest threshold that will be requested.
    pub fn new(t: f64, order: usize, lowest: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Config(format!("time gap must be positive, got {t}")));
        }
        let (ref_nodes, ref_weights) = gauss_legendre(order);
        let direct = t >= DIRECT_SWITCH;
        let delta = if direct { t } else { -t };
        let end = forward_cutoff(lowest, delta);
        let (mu, w) = panel_rule(end, PANEL.min(4.0 / t));
        let fwd_weights = mu.iter().zip(&w).map(|(m, w)| w * (-t * m).exp()).collect();
        let bwd_weights = if direct { vec![] } else { mu.iter().zip(&w).map(|(m, w)| w * (t * m).exp()).collect() };
        let (lam, lam_weights) = if direct {
            let (l, lw) = panel_rule(TAIL_EXPONENT / t, PANEL.min(4.0 / t));
            let lw = l.iter().zip(&lw).map(|(l, w)| -w * (-t * l).exp()).collect();
            (l, lw)
        } else {
            (vec![], vec![])
        };
        Ok(TwoTimeCdf { t, order, ref_nodes, ref_weights, mu, fwd_weights, bwd_weights, lam, lam_weights })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn slice(&self, xi: f64) -> Result<Slice> {
        let half = 0.5 * L_CUT;
        let nodes: Vec<f64> = self.ref_nodes.iter().map(|x| xi + half * (x + 1.0)).collect();
        let sqrt_w: Vec<f64> = self.ref_weights.iter().map(|w| (half * w).sqrt()).collect();
        let scale = |m: DMatrix<f64>| {
            let mut m = m;
            for (i, s) in sqrt_w.iter().enumerate() {
                m.row_mut(i).scale_mut(*s);
            }
            m
        };
        let forward = scale(airy_matrix(&nodes, &self.mu, 1.0, None)?);
        let backward = if self.lam.is_empty() {
            None
        } else {
            Some(scale(airy_matrix(&nodes, &self.lam, -1.0, None)?))
        };
        let n = nodes.len();
        let mut k = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = sqrt_w[i] * sqrt_w[j] * airy_kernel(nodes[i], nodes[j])?;
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
        }
        let marginal = det_identity_minus(k.clone());
        Ok(Slice { forward, backward, k, nodes, sqrt_w, marginal })
    }

    fn joint(&self, a: &Slice, b: &Slice) -> f64 {
        let n = self.order;
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&a.k);
        m.view_mut((n, n), (n, n)).copy_from(&b.k);
        let mut bw = b.forward.clone();
        for (k, w) in self.fwd_weights.iter().enumerate() {
            bw.column_mut(k).scale_mut(*w);
        }
        m.view_mut((0, n), (n, n)).copy_from(&(&a.forward * bw.transpose()));
        let lower = match (&a.backward, &b.backward) {
            (Some(ab), Some(bb)) => {
                let mut aw = ab.clone();
                for (k, w) in self.lam_weights.iter().enumerate() {
                    aw.column_mut(k).scale_mut(*w);
                }
                bb * aw.transpose()
            }
            _ => {
                let mut aw = a.forward.clone();
                for (k, w) in self.bwd_weights.iter().enumerate() {
                    aw.column_mut(k).scale_mut(*w);
                }
                let mut l = &b.forward * aw.transpose();
                for i in 0..n {
                    for j in 0..n {
                        l[(i, j)] -= b.sqrt_w[i] * a.sqrt_w[j] * airy_heat_kernel(self.t, b.nodes[i], a.nodes[j]);
                    }
                }
                l
            }
        };
        m.view_mut((n, 0), (n, n)).copy_from(&lower);
        det_identity_minus(m)
    }

    /// `G(a, b) = P(𝒜(0) ≤ a, 𝒜(t) ≤ b)` at this order.
    pub fn cdf(&self, a: f64, b: f64) -> Result<f64> {
        Ok(self.joint(&self.slice(a)?, &self.slice(b)?))
    }

    /// Smallest order in {40, 60, 80, 120, 160} whose doubled value moves by
    /// less than `tol` at a few central threshold pairs.
    pub fn converged_order(t: f64, lowest: f64, tol: f64) -> Result<usize> {
        let probes = [(-1.8, -1.8), (-3.0, -0.5), (0.5, -1.2)];
        for order in [40usize, 60, 80, 120, 160] {
            let lo = TwoTimeCdf::new(t, order, lowest)?;
            let hi = TwoTimeCdf::new(t, 2 * order, lowest)?;
            let mut worst = 0.0f64;
            for (a, b) in probes {
                worst = worst.max((lo.cdf(a, b)? - hi.cdf(a, b)?).abs());
            }
            if worst < tol {
                return Ok(order);
            }
        }
        Err(Error::Fredholm(format!("two-time determinant at t={t} not converged up to order 320")))
    }
}

fn panels(edges: &[f64], points: usize) -> Vec<(f64, f64)> {
    let (gx, gw) = gauss_legendre(points);
    let mut out = Vec::new();
    for w in edges.windows(2) {
        let h = w[1] - w[0];
        if h <= 0.0 {
            continue;
        }
        for (x, wt) in gx.iter().zip(&gw) {
            out.push((w[0] + 0.5 * h * (x + 1.0), 0.5 * h * wt));
        }
    }
    out
}

const OUTER_EDGES: [f64; 11] = [-8.0, -6.0, -4.5, -3.5, -2.5, -1.5, -0.5, 0.5, 1.5, 3.0, 6.0];
const GAP_EDGES: [f64; 7] = [0.0, 0.2, 0.6, 1.4, 3.0, 6.0, 14.0];
const POINTS: usize = 8;

/// `E[(𝒜(0)-𝒜(t))²]` from the triangle integral.
pub fn structure_triangle(cdf: &TwoTimeCdf) -> Result<f64> {
    let (lo, hi) = THRESHOLD_BOX;
    let mut total = 0.0;
    for (a, wa) in panels(&OUTER_EDGES, POINTS) {
        let sa = cdf.slice(a)?;
        let edges: Vec<f64> = GAP_EDGES.iter().map(|d| (a + d).min(hi)).collect();
        let mut inner = 0.0;
        for (b, wb) in panels(&edges, POINTS) {
            let sb = cdf.slice(b)?;
            inner += wb * (sa.marginal - cdf.joint(&sa, &sb));
        }
        total += wa * inner;
    }
    debug_assert!(OUTER_EDGES[0] == lo);
    Ok(4.0 * total)
}

/// `Cov(𝒜(0), 𝒜(t))` from Hoeffding's integral.
pub fn covariance_hoeffding(cdf: &TwoTimeCdf) -> Result<f64> {
    let grid = panels(&OUTER_EDGES, POINTS);
    let slices: Vec<Slice> = grid.iter().map(|(x, _)| cdf.slice(*x)).collect::<Result<_>>()?;
    let mut total = 0.0;
    for (i, (_, wa)) in grid.iter().enumerate() {
        for (j, (_, wb)) in grid.iter().enumerate() {
            let g = cdf.joint(&slices[i], &slices[j]);
            total += wa * wb * (g - slices[i].marginal * slices[j].marginal);
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPoint {
    pub t: f64,
    pub structure: f64,
    pub covariance: f64,
    pub order: usize,
}

/// Structure function and covariance of the Airy process at gap `t ∈ [0.01, 8]`.
pub fn airy_two_point(t: f64) -> Result<TwoPoint> {
    if !(TWO_POINT_RANGE.0..=TWO_POINT_RANGE.1).contains(&t) {
        return Err(Error::OutOfRange(format!("two-point gap {t} outside [0.01, 8]")));
    }
    let variance = tw_moments(2)?.variance;
    let order = TwoTimeCdf::converged_order(t, THRESHOLD_BOX.0, 1e-7)?;
    let cdf = TwoTimeCdf::new(t, order, THRESHOLD_BOX.0)?;
    let (structure, covariance) = if t <= 1.0 {
        let s = structure_triangle(&cdf)?;
        (s, variance - 0.5 * s)
    } else {
        let c = covariance_hoeffding(&cdf)?;
        (2.0 * variance - 2.0 * c, c)
    };
    Ok(TwoPoint { t, structure, covariance, order })
}
