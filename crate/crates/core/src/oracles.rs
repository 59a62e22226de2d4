//! Longest increasing chains of planar point sets.
//!
//! For droplet PNG, `h(0, τ)` is the longest chain of the nucleations in
//! the backward light cone of `(0, τ)`, read in the rotated coordinates
//! `(u, v) = (t + x, t − x)`. This module computes that length with no
//! reference to the growth dynamics.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::fredholm::det::det_identity_minus;
use crate::kernels::bessel::bessel_j_sequence;
use crate::png::{EventKind, GrowthGeometry, NucleationEventSet};

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarPointSet {
    pub points: Vec<(f64, f64)>,
    /// `(u_lo, u_hi, v_lo, v_hi)`.
    pub bounds: (f64, f64, f64, f64),
}

impl PlanarPointSet {
    pub fn new(points: Vec<(f64, f64)>, bounds: (f64, f64, f64, f64)) -> Result<Self> {
        let (a, b, c, d) = bounds;
        if let Some(p) = points.iter().find(|p| !(p.0 >= a && p.0 <= b && p.1 >= c && p.1 <= d)) {
            return Err(Error::OutOfRange(format!("point {p:?} outside {bounds:?}")));
        }
        Ok(PlanarPointSet { points, bounds })
    }

    /// Poisson process of unit density on `[0, side]²`, independent of the
    /// PNG samplers.
    pub fn poisson_square<R: Rng + ?Sized>(side: f64, rng: &mut R) -> Self {
        let mean = side * side;
        let n = if mean > 0.0 {
            Poisson::new(mean).unwrap().sample(rng) as usize
        } else {
            0
        };
        let points = (0..n).map(|_| (side * rng.gen::<f64>(), side * rng.gen::<f64>())).collect();
        PlanarPointSet {
            points,
            bounds: (0.0, side, 0.0, side),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Whether `(x, t)` lies in the backward light cone of `(0, tau)`.
pub fn in_backward_cone(x: f64, t: f64, tau: f64) -> bool {
    t >= 0.0 && x.abs() <= t && x.abs() <= tau - t
}

/// Rotate droplet events into the square `[0, τ]²`.
pub fn lightcone_to_square(events: &NucleationEventSet, tau: f64) -> Result<PlanarPointSet> {
    if events.geometry != GrowthGeometry::Droplet {
        return Err(Error::Config("the longest-chain map applies to droplet events".into()));
    }
    const SLACK: f64 = 1e-12;
    let mut points = Vec::with_capacity(events.len());
    for e in &events.events {
        let inside = e.t >= 0.0 && e.x.abs() <= e.t + SLACK && e.x.abs() <= tau - e.t + SLACK;
        if e.kind != EventKind::Nucleation || !inside {
            return Err(Error::EventOutsideRegion(format!(
                "({}, {}) not in the backward cone of (0, {tau})",
                e.x, e.t
            )));
        }
        let u = (e.t + e.x).clamp(0.0, tau);
        let v = (e.t - e.x).clamp(0.0, tau);
        points.push((u, v));
    }
    Ok(PlanarPointSet {
        points,
        bounds: (0.0, tau, 0.0, tau),
    })
}

/// Length of the longest chain strictly increasing in both coordinates.
///
/// Sorting by `u` with ties by decreasing `v` makes points sharing a `u`
/// mutually exclusive in the strict patience pass over `v`.
pub fn longest_chain(set: &PlanarPointSet) -> usize {
    let mut pts = set.points.clone();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    let mut piles: Vec<f64> = Vec::new();
    for (_, v) in pts {
        let k = piles.partition_point(|&w| w < v);
        if k == piles.len() {
            piles.push(v);
        } else {
            piles[k] = v;
        }
    }
    piles.len()
}

/// Exhaustive search over all subsets; exponential, for testing.
pub fn longest_chain_brute_force(set: &PlanarPointSet) -> usize {
    let pts = &set.points;
    let n = pts.len();
    assert!(n <= 20, "brute force is limited to 20 points");
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let mut chosen: Vec<(f64, f64)> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| pts[i]).collect();
        if chosen.len() <= best {
            continue;
        }
        chosen.sort_by(|a, b| a.0.total_cmp(&b.0));
        if chosen.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1) {
            best = chosen.len();
        }
    }
    best
}

/// Exact law of the droplet height at the origin,
/// `P(h(0, τ) ≤ k) = det(1 − B)` on `ℓ²({k+1, k+2, …})` with
/// `B(i, j) = Σ_{m≥0} J_{i+m}(2τ)J_{j+m}(2τ)` (Gessel's identity for the
/// longest chain of a unit-density Poisson set in `[0, τ]²`).
pub fn droplet_height_cdf(tau: f64, ks: &[i64]) -> Result<Vec<f64>> {
    if !(tau > 0.0 && tau <= 5000.0) {
        return Err(Error::OutOfRange(format!("tau = {tau} not in (0, 5000]")));
    }
    // levels above `top` carry less than 1e-30 of mass
    let top = (2.0 * tau + 14.0 * tau.cbrt() + 40.0).ceil() as usize;
    let j = bessel_j_sequence(2.0 * tau, top + 80);
    let tail = |i: usize, k: usize| -> f64 { (0..80).map(|m| j[i + m] * j[k + m]).sum() };
    // B(i, j) = B(i+1, j+1) + J_i J_j, filled from the bottom-right corner
    let n = top + 1;
    let mut b = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        b[(top, i)] = tail(top, i);
        b[(i, top)] = b[(top, i)];
    }
    for i in (0..top).rev() {
        for k in (0..top).rev() {
            b[(i, k)] = b[(i + 1, k + 1)] + j[i] * j[k];
        }
    }
    Ok(ks
        .iter()
        .map(|&k| {
            if k < 0 {
                0.0
            } else if k as usize >= top {
                1.0
            } else {
                let lo = k as usize + 1;
                let m = b.view((lo, lo), (n - lo, n - lo)).into_owned();
                det_identity_minus(m).clamp(0.0, 1.0)
            }
        })
        .collect())
}
