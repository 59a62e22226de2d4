use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use super::{Event, EventKind, GrowthGeometry, NucleationEventSet, SimConfig};
use crate::error::Result;
use crate::rng::substream;

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|p| p.sample(rng) as usize).unwrap_or(0)
}

/// Poisson realization of the geometry's events on `[0, tau]`, drawn from
/// substream `stream` of `config.seed`.
pub fn sample_nucleations(config: &SimConfig, stream: u64) -> Result<NucleationEventSet> {
    config.validate()?;
    let mut rng = substream(config.seed, stream);
    let tau = config.tau;
    let c = config.intensity;
    let mut events = Vec::new();
    let cone = |rng: &mut _, mean: f64, half: bool, events: &mut Vec<Event>| {
        for _ in 0..poisson_count(mean, rng) {
            // density of t on the cone is proportional to t
            let t = tau * Rng::gen::<f64>(rng).sqrt();
            let w: f64 = Rng::gen(rng);
            let x = if half { t * w } else { t * (2.0 * w - 1.0) };
            events.push(Event::nucleation(x, t));
        }
    };
    match config.geometry {
        GrowthGeometry::Droplet => cone(&mut rng, c * tau * tau, false, &mut events),
        GrowthGeometry::HalfDroplet { gamma } => {
            cone(&mut rng, 0.5 * c * tau * tau, true, &mut events);
            for _ in 0..poisson_count(gamma * tau, &mut rng) {
                events.push(Event::nucleation(0.0, tau * rng.gen::<f64>()));
            }
        }
        GrowthGeometry::Stationary {
            alpha_plus,
            alpha_minus,
            ..
        } => {
            cone(&mut rng, c * tau * tau, false, &mut events);
            for _ in 0..poisson_count(2.0 * alpha_plus * tau, &mut rng) {
                let t = tau * rng.gen::<f64>();
                events.push(Event {
                    x: t,
                    t,
                    kind: EventKind::UpSource,
                });
            }
            for _ in 0..poisson_count(2.0 * alpha_minus * tau, &mut rng) {
                let t = tau * rng.gen::<f64>();
                events.push(Event {
                    x: -t,
                    t,
                    kind: EventKind::DownSource,
                });
            }
        }
        GrowthGeometry::Flat { box_half_width: l, .. } => {
            for _ in 0..poisson_count(c * 2.0 * l * tau, &mut rng) {
                let x = -l + 2.0 * l * rng.gen::<f64>();
                events.push(Event::nucleation(x.min(l * (1.0 - f64::EPSILON)), tau * rng.gen::<f64>()));
            }
        }
    }
    NucleationEventSet::new(events, config.geometry, tau)
}

/// A point in light-cone coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Pt {
    pub u: f64,
    pub v: f64,
    pub kind: EventKind,
}

impl Pt {
    pub fn from_event(e: &Event) -> Pt {
        // sources sit exactly on the axes
        let (u, v) = match e.kind {
            EventKind::Nucleation => (e.t + e.x, e.t - e.x),
            EventKind::UpSource => (2.0 * e.t, 0.0),
            EventKind::DownSource => (0.0, 2.0 * e.t),
        };
        Pt { u, v, kind: e.kind }
    }
}

/// Events restricted to the union of backward light cones, sorted by `v`.
/// Up-sources (all at `v = 0`) are returned separately as the initial
/// vertical rays.
#[derive(Debug, Clone, Default)]
pub(crate) struct ConeSample {
    pub initial_ups: Vec<f64>,
    pub points: Vec<Pt>,
}

/// Sample the geometry's events inside `⋃ [·, U_i] × [·, V_i]` where
/// `(U_i, V_i)` are the probe corners in light-cone coordinates. The union
/// is a staircase in `v`; each stair is filled by a homogeneous stream in
/// `v` with thinning against the geometry's lower boundary in `u`.
pub(crate) fn sample_cones<R: Rng + ?Sized>(config: &SimConfig, corners: &[(f64, f64)], rng: &mut R) -> ConeSample {
    let density = 0.5 * config.intensity;
    let mut vs: Vec<f64> = corners.iter().map(|c| c.1).collect();
    vs.sort_by(f64::total_cmp);
    vs.dedup();
    let stairs: Vec<(f64, f64)> = vs
        .iter()
        .map(|&vk| {
            let w = corners
                .iter()
                .filter(|c| c.1 >= vk)
                .map(|c| c.0)
                .fold(f64::NEG_INFINITY, f64::max);
            (vk, w)
        })
        .collect();
    let width_at = |v: f64| {
        stairs
            .iter()
            .find(|s| v <= s.0)
            .map(|s| s.1)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let w_max = stairs.first().map(|s| s.1).unwrap_or(0.0);
    let v_max = stairs.last().map(|s| s.0).unwrap_or(0.0);

    let (v_start, lower): (f64, fn(f64) -> f64) = match config.geometry {
        GrowthGeometry::HalfDroplet { .. } => (0.0, |v| v),
        GrowthGeometry::Flat { .. } => (-w_max, |v| -v),
        _ => (0.0, |_| 0.0),
    };

    let mut out = ConeSample::default();
    let mut a = v_start;
    for &(b, w) in &stairs {
        if b <= a {
            continue;
        }
        let lo = lower(a).min(lower(b));
        if w > lo && density > 0.0 {
            let rate = density * (w - lo);
            let mut v = a;
            loop {
                let e: f64 = Exp1.sample(rng);
                v += e / rate;
                if v > b {
                    break;
                }
                let u = lo + (w - lo) * rng.gen::<f64>();
                if u >= lower(v) {
                    out.points.push(Pt {
                        u,
                        v,
                        kind: EventKind::Nucleation,
                    });
                }
            }
        }
        a = b;
    }

    let axis_stream = |rate: f64, end: f64, rng: &mut R| {
        let mut s = Vec::new();
        if rate > 0.0 {
            let mut z = 0.0;
            loop {
                let e: f64 = Exp1.sample(rng);
                z += e / rate;
                if z > end {
                    break;
                }
                s.push(z);
            }
        }
        s
    };
    match config.geometry {
        GrowthGeometry::HalfDroplet { gamma } => {
            let diagonal: Vec<Pt> = axis_stream(gamma, v_max, rng)
                .into_iter()
                .filter(|&t| t <= width_at(t))
                .map(|t| Pt {
                    u: t,
                    v: t,
                    kind: EventKind::Nucleation,
                })
                .collect();
            out.points = merge_by_v(std::mem::take(&mut out.points), diagonal);
        }
        GrowthGeometry::Stationary {
            alpha_plus,
            alpha_minus,
            ..
        } => {
            out.initial_ups = axis_stream(alpha_plus, w_max, rng);
            let left: Vec<Pt> = axis_stream(alpha_minus, v_max, rng)
                .into_iter()
                .map(|v| Pt {
                    u: 0.0,
                    v,
                    kind: EventKind::DownSource,
                })
                .collect();
            out.points = merge_by_v(std::mem::take(&mut out.points), left);
        }
        _ => {}
    }
    out
}

fn merge_by_v(a: Vec<Pt>, b: Vec<Pt>) -> Vec<Pt> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i].v <= b[j].v {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
