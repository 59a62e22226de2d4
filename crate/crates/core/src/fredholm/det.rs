//! Nyström discretization of restricted kernel operators.

use nalgebra::DMatrix;

use super::quadrature::QuadratureScheme;
use crate::error::{Error, Result};
use crate::kernels::ContinuousKernel;

/// Truncation length above each threshold.
pub const L_CUT: f64 = 16.0;
pub const START_ORDER: usize = 40;
pub const MAX_ORDER: usize = 320;
pub const DOUBLING_TOL: f64 = 1e-8;

/// The operator `χ_ξ R^{(m)} χ_ξ` acting on `m` time slices, slice `i`
/// supported on `[ξ_i, ξ_i + L_cut]`. Slices with `ξ_i = +∞` are dropped.
pub struct RestrictedKernelOperator<'k> {
    kernel: &'k dyn ContinuousKernel,
    times: Vec<f64>,
    thresholds: Vec<f64>,
    l_cut: f64,
}

impl<'k> RestrictedKernelOperator<'k> {
    pub fn new(kernel: &'k dyn ContinuousKernel, times: &[f64], thresholds: &[f64]) -> Result<Self> {
        if times.len() != thresholds.len() || times.is_empty() {
            return Err(Error::Config("times and thresholds must be non-empty and of equal length".into()));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("times must be strictly increasing".into()));
        }
        if times.iter().any(|t| !t.is_finite()) || thresholds.iter().any(|x| x.is_nan() || *x == f64::NEG_INFINITY) {
            return Err(Error::Config("times must be finite and thresholds not NaN or -inf".into()));
        }
        let keep: Vec<usize> = (0..times.len()).filter(|&i| thresholds[i].is_finite()).collect();
        Ok(RestrictedKernelOperator {
            kernel,
            times: keep.iter().map(|&i| times[i]).collect(),
            thresholds: keep.iter().map(|&i| thresholds[i]).collect(),
            l_cut: L_CUT,
        })
    }

    pub fn with_l_cut(mut self, l_cut: f64) -> Self {
        self.l_cut = l_cut;
        self
    }

    pub fn slices(&self) -> usize {
        self.times.len()
    }

    /// `M[(i,a),(j,b)] = √(w_a w_b) R(x_a,t_i; x_b,t_j)` with `order` nodes per slice.
    pub fn matrix(&self, order: usize) -> Result<DMatrix<f64>> {
        let m = self.slices();
        let rules: Vec<QuadratureScheme> = self
            .thresholds
            .iter()
            .map(|&xi| QuadratureScheme::gauss_legendre(order, xi, xi + self.l_cut))
            .collect::<Result<_>>()?;
        let mut out = DMatrix::zeros(m * order, m * order);
        for i in 0..m {
            for j in 0..m {
                let b = self.kernel.block(&rules[i].nodes, self.times[i], &rules[j].nodes, self.times[j])?;
                for a in 0..order {
                    let wa = rules[i].weights[a].sqrt();
                    for c in 0..order {
                        out[(i * order + a, j * order + c)] = wa * rules[j].weights[c].sqrt() * b[(a, c)];
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn det_at_order(&self, order: usize) -> Result<f64> {
        if self.slices() == 0 {
            return Ok(1.0);
        }
        let m = self.matrix(order)?;
        Ok(det_identity_minus(m))
    }
}

/// `det(I - M)` by pivoted LU.
pub fn det_identity_minus(mut m: DMatrix<f64>) -> f64 {
    let n = m.nrows();
    m.neg_mut();
    for i in 0..n {
        m[(i, i)] += 1.0;
    }
    m.lu().determinant()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FredholmValue {
    pub value: f64,
    pub order: usize,
    /// Change from the previous order.
    pub delta: f64,
}

/// `det(1 - R^{(m)})` with order doubling from 40 until successive values
/// differ by less than `1e-8`.
pub fn fredholm_det(op: &RestrictedKernelOperator) -> Result<FredholmValue> {
    fredholm_det_from(op, START_ORDER)
}

pub fn fredholm_det_from(op: &RestrictedKernelOperator, start: usize) -> Result<FredholmValue> {
    let mut order = start;
    let mut prev = op.det_at_order(order)?;
    while order < MAX_ORDER {
        order *= 2;
        let cur = op.det_at_order(order)?;
        let delta = (cur - prev).abs();
        if delta < DOUBLING_TOL {
            return Ok(FredholmValue { value: clamp_probability(cur)?, order, delta });
        }
        prev = cur;
    }
    Err(Error::Fredholm(format!(
        "no convergence under order doubling up to {MAX_ORDER} nodes per slice (last value {prev})"
    )))
}

fn clamp_probability(v: f64) -> Result<f64> {
    if !v.is_finite() || v < -1e-8 || v > 1.0 + 1e-8 {
        return Err(Error::Fredholm(format!("determinant {v} is not a probability")));
    }
    Ok(v.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct RankOne(f64);

    impl ContinuousKernel for RankOne {
        fn evaluate(&self, _: f64, _: f64, _: f64, _: f64) -> Result<f64> {
            Ok(self.0 * self.0)
        }
    }

    #[test]
    fn zero_kernel_gives_one() {
        let k = RankOne(0.0);
        let op = RestrictedKernelOperator::new(&k, &[0.0], &[0.0]).unwrap();
        assert_eq!(fredholm_det(&op).unwrap().value, 1.0);
    }

    #[test]
    fn rank_one_on_unit_interval() {
        for (f, expect) in [(1.0, 0.0), (0.5, 0.75)] {
            let k = RankOne(f);
            let op = RestrictedKernelOperator::new(&k, &[0.0], &[0.0]).unwrap().with_l_cut(1.0);
            let v = op.det_at_order(10).unwrap();
            assert!((v - expect).abs() < 1e-13, "{f}: {v}");
        }
    }

    #[test]
    fn infinite_threshold_drops_slice() {
        let k = RankOne(0.5);
        let one = RestrictedKernelOperator::new(&k, &[0.0], &[0.0]).unwrap().with_l_cut(1.0);
        let two = RestrictedKernelOperator::new(&k, &[0.0, 1.0], &[0.0, f64::INFINITY])
            .unwrap()
            .with_l_cut(1.0);
        assert_eq!(two.slices(), 1);
        assert_eq!(one.det_at_order(8).unwrap(), two.det_at_order(8).unwrap());
    }

    #[test]
    fn rejects_unordered_times() {
        let k = RankOne(0.5);
        assert!(RestrictedKernelOperator::new(&k, &[1.0, 0.0], &[0.0, 0.0]).is_err());
    }
}
