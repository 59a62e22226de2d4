//! Polynuclear growth.
//!
//! Steps of unit height move at unit speed (up-steps to the left, down-steps
//! to the right) and annihilate pairwise on contact; nucleations are
//! space-time Poisson events, each creating an up/down pair.
//!
//! Two independent engines live here. [`direct_png`] runs the dynamics
//! chronologically on the real line or a periodic box. The sweep engine
//! works in light-cone coordinates `(u, v) = (t + x, t − x)`, where step
//! world lines are axis-parallel rays and one pass of patience sorting
//! produces the whole space-time history of a line together with the
//! annihilation points that seed the next RSK line ([`evolve_rsk`]).
//! Monte Carlo observables ([`height_observables`]) use the sweep on events
//! sampled only inside the backward light cones of the probes.

mod direct;
mod observables;
mod sample;
mod sweep;

pub use direct::{direct_png, DirectEngine};
pub use observables::{height_observables, rsk_heights_at, Probe};
pub use sample::sample_nucleations;
pub use sweep::{evolve_rsk, occupation};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PRODUCT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthGeometry {
    /// Nucleations in the forward light cone `|x| ≤ t` of the origin.
    Droplet,
    /// Nucleations in `0 ≤ x ≤ t` plus a rate-`gamma` source at `x = 0`.
    HalfDroplet { gamma: f64 },
    /// Light cone of the origin fed through its two boundary diagonals by
    /// the step flux of the stationary state: up-steps enter across
    /// `x = t`, down-steps across `x = −t`, at rates `2α₊` and `2α₋` per
    /// unit time.
    Stationary {
        rho_plus: f64,
        rho_minus: f64,
        alpha_plus: f64,
        alpha_minus: f64,
    },
    /// Flat initial condition on the box `[−ℓ, ℓ)`.
    Flat { box_half_width: f64, periodic: bool },
}

impl GrowthGeometry {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        match *self {
            GrowthGeometry::Droplet => Ok(()),
            GrowthGeometry::HalfDroplet { gamma } => {
                if gamma.is_finite() && gamma >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!("gamma must be nonnegative, got {gamma}")))
                }
            }
            GrowthGeometry::Stationary {
                rho_plus,
                rho_minus,
                alpha_plus,
                alpha_minus,
            } => {
                positive("rho_plus", rho_plus)?;
                positive("rho_minus", rho_minus)?;
                positive("alpha_plus", alpha_plus)?;
                positive("alpha_minus", alpha_minus)?;
                if (rho_plus * rho_minus - 1.0).abs() > PRODUCT_TOL {
                    return Err(Error::Config(format!(
                        "stationarity needs rho_plus*rho_minus = 1, got {}",
                        rho_plus * rho_minus
                    )));
                }
                if (alpha_plus * alpha_minus - 1.0).abs() > PRODUCT_TOL {
                    return Err(Error::Config(format!(
                        "stationarity needs alpha_plus*alpha_minus = 1, got {}",
                        alpha_plus * alpha_minus
                    )));
                }
                Ok(())
            }
            GrowthGeometry::Flat { box_half_width, .. } => positive("box_half_width", box_half_width),
        }
    }

    /// Spatial domain of the height line at time `tau`.
    pub fn domain(&self, tau: f64) -> (f64, f64) {
        match *self {
            GrowthGeometry::Flat { box_half_width, .. } => (-box_half_width, box_half_width),
            _ => (-tau, tau),
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, GrowthGeometry::Flat { periodic: true, .. })
    }

    /// Whether `(x, t)` may carry a bulk nucleation.
    pub fn allows(&self, x: f64, t: f64) -> bool {
        match *self {
            GrowthGeometry::Droplet | GrowthGeometry::Stationary { .. } => x.abs() <= t,
            GrowthGeometry::HalfDroplet { .. } => x >= 0.0 && x <= t,
            GrowthGeometry::Flat { box_half_width, periodic } => {
                if periodic {
                    x >= -box_half_width && x < box_half_width
                } else {
                    x.abs() <= box_half_width
                }
            }
        }
    }
}

fn default_intensity() -> f64 {
    2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub tau: f64,
    #[serde(default = "default_intensity")]
    pub intensity: f64,
    pub geometry: GrowthGeometry,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub keep_lines: bool,
}

impl SimConfig {
    pub fn new(tau: f64, geometry: GrowthGeometry) -> Self {
        SimConfig {
            tau,
            intensity: 2.0,
            geometry,
            seed: 0,
            keep_lines: false,
        }
    }

    pub fn droplet(tau: f64) -> Self {
        Self::new(tau, GrowthGeometry::Droplet)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_intensity(mut self, intensity: f64) -> Self {
        self.intensity = intensity;
        self
    }

    pub fn with_lines(mut self) -> Self {
        self.keep_lines = true;
        self
    }

    /// Intensity 0 is accepted so that the empty process can be configured.
    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::Config(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.intensity.is_finite() && self.intensity >= 0.0) {
            return Err(Error::Config(format!(
                "intensity must be nonnegative, got {}",
                self.intensity
            )));
        }
        self.geometry.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// Creates an up/down pair.
    Nucleation,
    /// Boundary source emitting a single up-step.
    UpSource,
    /// Boundary source emitting a single down-step.
    DownSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub x: f64,
    pub t: f64,
    pub kind: EventKind,
}

impl Event {
    pub fn nucleation(x: f64, t: f64) -> Self {
        Event {
            x,
            t,
            kind: EventKind::Nucleation,
        }
    }
}

/// Events sorted by time, together with the geometry they were drawn for.
#[derive(Debug, Clone, PartialEq)]
pub struct NucleationEventSet {
    pub events: Vec<Event>,
    pub geometry: GrowthGeometry,
    pub tau: f64,
}

impl NucleationEventSet {
    /// Validates region membership and sorts by time. Exact duplicates are
    /// rejected.
    pub fn new(mut events: Vec<Event>, geometry: GrowthGeometry, tau: f64) -> Result<Self> {
        geometry.validate()?;
        const SLACK: f64 = 1e-12;
        for e in &events {
            if !(e.t >= 0.0 && e.t <= tau && e.x.is_finite()) {
                return Err(Error::EventOutsideRegion(format!("({}, {}) not in [0, {tau}]", e.x, e.t)));
            }
            let ok = match (e.kind, geometry) {
                (EventKind::Nucleation, GrowthGeometry::HalfDroplet { .. }) => {
                    e.x >= -SLACK && e.x <= e.t + SLACK
                }
                (EventKind::Nucleation, g) => {
                    g.allows(e.x, e.t) || (!g.is_periodic() && g.allows(e.x.abs() - SLACK, e.t))
                }
                (EventKind::UpSource, GrowthGeometry::Stationary { .. }) => (e.x - e.t).abs() <= SLACK,
                (EventKind::DownSource, GrowthGeometry::Stationary { .. }) => (e.x + e.t).abs() <= SLACK,
                _ => false,
            };
            if !ok {
                return Err(Error::EventOutsideRegion(format!(
                    "{:?} at ({}, {}) not allowed in {:?}",
                    e.kind, e.x, e.t, geometry
                )));
            }
        }
        events.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.x.total_cmp(&b.x)));
        if events.windows(2).any(|w| w[0].t == w[1].t && w[0].x == w[1].x) {
            return Err(Error::EventOutsideRegion("duplicate event".into()));
        }
        Ok(NucleationEventSet { events, geometry, tau })
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// One height line at a fixed time.
///
/// `height(x) = base_level + left_offset + #{up ≤ x} − #{down ≤ x}`. The
/// offset is the value at the left end of the domain relative to the base
/// level; it is nonzero only when steps enter through the left boundary
/// (stationary sources, periodic wrap).
#[derive(Debug, Clone, PartialEq)]
pub struct HeightLine {
    pub base_level: i64,
    pub left_offset: i64,
    pub up_steps: Vec<f64>,
    pub down_steps: Vec<f64>,
    pub domain: (f64, f64),
}

impl HeightLine {
    pub fn flat(base_level: i64, domain: (f64, f64)) -> Self {
        HeightLine {
            base_level,
            left_offset: 0,
            up_steps: Vec::new(),
            down_steps: Vec::new(),
            domain,
        }
    }

    pub fn height(&self, x: f64) -> i64 {
        let ups = self.up_steps.partition_point(|&p| p <= x) as i64;
        let downs = self.down_steps.partition_point(|&p| p <= x) as i64;
        self.base_level + self.left_offset + ups - downs
    }

    pub fn right_level(&self) -> i64 {
        self.base_level + self.left_offset + self.up_steps.len() as i64 - self.down_steps.len() as i64
    }

    pub fn is_trivial(&self) -> bool {
        self.up_steps.is_empty() && self.down_steps.is_empty() && self.left_offset == 0
    }
}

/// Lines `h_0 > h_{−1} > …` at time `time`; every line below the last entry
/// is identically equal to its base level.
#[derive(Debug, Clone, PartialEq)]
pub struct LineEnsemble {
    pub lines: Vec<HeightLine>,
    pub time: f64,
}

impl LineEnsemble {
    /// Highest base level whose line is trivial and not stored.
    pub fn first_trivial_level(&self) -> i64 {
        -(self.lines.len() as i64)
    }

    pub fn height(&self, line: usize, x: f64) -> i64 {
        match self.lines.get(line) {
            Some(l) => l.height(x),
            None => -(line as i64),
        }
    }
}
