//! Exact evaluators for the correlation kernels of the Dyson, Airy and PNG
//! determinantal fields.
//!
//! Extended (two-time) kernels follow the convention
//! `R(x,t;x',t') = (e^{-tH} (P - 1·Θ(t-t')) e^{t'H})(x,x')` with `Θ(0) = 0`,
//! so every extended kernel reduces to its static projection `P` at equal
//! times by construction.

pub mod airy;
pub mod airy_kernel;
pub mod bessel;
pub mod hermite;
pub mod tridiag;

pub use airy::{airy_fn, AI0, AIP0};
pub use airy_kernel::{airy_heat_kernel, airy_kernel, extended_airy_kernel, ExtendedAiryKernel};
pub use bessel::{DiscreteBesselKernel, ExtendedDiscreteKernel};
pub use hermite::HermiteKernel;

use nalgebra::DMatrix;

use crate::error::Result;

/// Heaviside step with the `Θ(0) = 0` convention.
#[inline]
pub fn theta(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// A kernel on R × R (position, time) × (position, time).
pub trait ContinuousKernel: Sync {
    fn evaluate(&self, x: f64, t: f64, xp: f64, tp: f64) -> Result<f64>;

    /// Matrix `[R(x_i,t; y_j,t')]_{ij}`.
    fn block(&self, xs: &[f64], t: f64, ys: &[f64], tp: f64) -> Result<DMatrix<f64>> {
        let mut out = DMatrix::zeros(xs.len(), ys.len());
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                out[(i, j)] = self.evaluate(x, t, y, tp)?;
            }
        }
        Ok(out)
    }

    /// Length scale beyond which the kernel is negligible above the soft edge.
    fn decay_scale(&self) -> f64 {
        16.0
    }
}

/// A kernel on Z × R (level, time) × (level, time).
pub trait LatticeKernel: Sync {
    fn evaluate(&self, j: i64, t: f64, jp: i64, tp: f64) -> Result<f64>;

    /// Levels at which evaluation is supported.
    fn window(&self) -> (i64, i64);
}
