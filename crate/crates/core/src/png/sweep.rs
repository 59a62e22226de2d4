//! Light-cone sweep.
//!
//! In `(u, v) = (t + x, t − x)` an up-step world line is a vertical ray
//! (constant `u`) and a down-step world line a horizontal ray (constant
//! `v`). Processing points in increasing `v`, the horizontal ray of a new
//! point hits the first live vertical ray to its right: that is one step of
//! patience sorting, and the hit is the annihilation that nucleates the
//! line below.

use super::sample::Pt;
use super::{EventKind, GrowthGeometry, HeightLine, LineEnsemble, NucleationEventSet, SimConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
struct VRay {
    u: f64,
    v0: f64,
    v1: f64,
}

#[derive(Debug, Clone, Copy)]
struct HRay {
    v: f64,
    u0: f64,
    u1: f64,
}

/// Space-time history of one line.
#[derive(Debug, Clone, Default)]
pub(crate) struct LineHistory {
    vert: Vec<VRay>,
    horiz: Vec<HRay>,
    left_sources: Vec<f64>,
    /// `(u, v)` in increasing `v`.
    pub annihilations: Vec<(f64, f64)>,
}

pub(crate) fn sweep_line(initial_ups: &[f64], points: &[Pt]) -> LineHistory {
    let mut h = LineHistory::default();
    // live vertical rays as (u, ray index), sorted by u
    let mut live: Vec<(f64, usize)> = Vec::with_capacity(initial_ups.len() + 16);
    for &u in initial_ups {
        let k = live.partition_point(|r| r.0 <= u);
        live.insert(k, (u, h.vert.len()));
        h.vert.push(VRay {
            u,
            v0: 0.0,
            v1: f64::INFINITY,
        });
    }
    for p in points {
        match p.kind {
            EventKind::Nucleation => {
                let k = live.partition_point(|r| r.0 <= p.u);
                let ray = h.vert.len();
                h.vert.push(VRay {
                    u: p.u,
                    v0: p.v,
                    v1: f64::INFINITY,
                });
                let u1 = if k < live.len() {
                    let (uk, idx) = live[k];
                    h.vert[idx].v1 = p.v;
                    h.annihilations.push((uk, p.v));
                    live[k] = (p.u, ray);
                    uk
                } else {
                    live.push((p.u, ray));
                    f64::INFINITY
                };
                h.horiz.push(HRay { v: p.v, u0: p.u, u1 });
            }
            EventKind::DownSource => {
                h.left_sources.push(p.v);
                let u1 = if live.is_empty() {
                    f64::INFINITY
                } else {
                    let (u0, idx) = live.remove(0);
                    h.vert[idx].v1 = p.v;
                    h.annihilations.push((u0, p.v));
                    u0
                };
                h.horiz.push(HRay { v: p.v, u0: 0.0, u1 });
            }
            EventKind::UpSource => unreachable!("up-sources enter as initial rays"),
        }
    }
    h
}

impl LineHistory {
    /// The line at time `tau`.
    pub fn at(&self, tau: f64, base_level: i64, domain: (f64, f64)) -> HeightLine {
        let s = 2.0 * tau;
        let mut up_steps: Vec<f64> = self
            .vert
            .iter()
            .filter(|r| r.v0 <= s - r.u && s - r.u < r.v1)
            .map(|r| r.u - tau)
            .collect();
        let mut down_steps: Vec<f64> = self
            .horiz
            .iter()
            .filter(|r| r.u0 <= s - r.v && s - r.v < r.u1)
            .map(|r| tau - r.v)
            .collect();
        up_steps.sort_by(f64::total_cmp);
        down_steps.sort_by(f64::total_cmp);
        HeightLine {
            base_level,
            left_offset: self.left_sources.iter().filter(|&&v| v <= s).count() as i64,
            up_steps,
            down_steps,
            domain,
        }
    }
}

/// Split an event set into initial vertical rays and `v`-sorted points.
pub(crate) fn to_light_cone(events: &NucleationEventSet) -> (Vec<f64>, Vec<Pt>) {
    let mut ups = Vec::new();
    let mut points = Vec::with_capacity(events.len());
    for e in &events.events {
        let p = Pt::from_event(e);
        match p.kind {
            EventKind::UpSource => ups.push(p.u),
            _ => points.push(p),
        }
    }
    ups.sort_by(f64::total_cmp);
    // ties in v broken by u, which cannot create chains (strict order)
    points.sort_by(|a, b| a.v.total_cmp(&b.v).then(a.u.total_cmp(&b.u)));
    (ups, points)
}

/// Full RSK line ensemble at time `config.tau`.
pub fn evolve_rsk(events: &NucleationEventSet, config: &SimConfig) -> Result<LineEnsemble> {
    config.validate()?;
    if !config.keep_lines {
        return Err(Error::Config("evolve_rsk needs keep_lines = true".into()));
    }
    if let GrowthGeometry::Flat { .. } = config.geometry {
        return Err(Error::Config("lower lines are not tracked in flat geometry".into()));
    }
    if events.geometry != config.geometry || events.tau < config.tau {
        return Err(Error::Config("event set was drawn for a different configuration".into()));
    }
    let tau = config.tau;
    let domain = config.geometry.domain(tau);
    let (mut ups, mut points) = to_light_cone(events);
    points.retain(|p| p.u + p.v <= 2.0 * tau);
    ups.retain(|&u| u <= 2.0 * tau);
    let mut lines = Vec::new();
    while !points.is_empty() || !ups.is_empty() {
        let history = sweep_line(&ups, &points);
        lines.push(history.at(tau, -(lines.len() as i64), domain));
        ups.clear();
        points = history
            .annihilations
            .iter()
            .filter(|a| a.0 + a.1 <= 2.0 * tau)
            .map(|&(u, v)| Pt {
                u,
                v,
                kind: EventKind::Nucleation,
            })
            .collect();
    }
    Ok(LineEnsemble { lines, time: tau })
}

/// `η_τ(level, position)`: whether some line passes through `level` at
/// `position`.
pub fn occupation(ensemble: &LineEnsemble, level: i64, position: f64) -> bool {
    level <= ensemble.first_trivial_level() || ensemble.lines.iter().any(|l| l.height(position) == level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::png::{direct_png, sample_nucleations, DirectEngine, Event};

    fn same_steps(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12)
    }

    #[test]
    fn empty_ensemble() {
        let set = NucleationEventSet::new(vec![], GrowthGeometry::Droplet, 1.0).unwrap();
        let ens = evolve_rsk(&set, &SimConfig::droplet(1.0).with_lines()).unwrap();
        assert!(ens.lines.is_empty());
        assert!(occupation(&ens, -3, 0.2));
        assert!(occupation(&ens, 0, 0.2));
        assert!(!occupation(&ens, 1, 0.2));
    }

    #[test]
    fn single_event_occupation() {
        let set = NucleationEventSet::new(vec![Event::nucleation(0.0, 0.4)], GrowthGeometry::Droplet, 1.0).unwrap();
        let ens = evolve_rsk(&set, &SimConfig::droplet(1.0).with_lines()).unwrap();
        assert_eq!(ens.lines.len(), 1);
        assert!(occupation(&ens, 1, 0.0));
        assert!(!occupation(&ens, 0, 0.0));
        assert!(occupation(&ens, 0, 0.9));
    }

    #[test]
    fn one_collision_seeds_one_nucleation_below() {
        let set = NucleationEventSet::new(
            vec![Event::nucleation(-0.2, 0.3), Event::nucleation(0.2, 0.4)],
            GrowthGeometry::Droplet,
            1.0,
        )
        .unwrap();
        let ens = evolve_rsk(&set, &SimConfig::droplet(1.0).with_lines()).unwrap();
        assert_eq!(ens.lines.len(), 2);
        // the collision at (0.05, 0.55) spawned a plateau of half-width 0.45
        let below = &ens.lines[1];
        assert!(same_steps(&below.up_steps, &[0.05 - 0.45]));
        assert!(same_steps(&below.down_steps, &[0.05 + 0.45]));
        assert_eq!(ens.height(1, 0.0), 0);
        assert_eq!(ens.height(2, 0.0), -2);
        assert_eq!(ens.height(0, 0.0), 1);
    }

    #[test]
    fn sweep_matches_direct_engine_on_every_line() {
        let geometries = [
            GrowthGeometry::Droplet,
            GrowthGeometry::HalfDroplet { gamma: 1.5 },
            GrowthGeometry::Stationary {
                rho_plus: 2.0,
                rho_minus: 0.5,
                alpha_plus: 2.0,
                alpha_minus: 0.5,
            },
        ];
        for g in geometries {
            let cfg = SimConfig::new(5.0, g).with_seed(21).with_lines();
            for r in 0..30 {
                let set = sample_nucleations(&cfg, r).unwrap();
                let ens = evolve_rsk(&set, &cfg).unwrap();
                let top = direct_png(&set, &cfg).unwrap();
                assert!(same_steps(&top.up_steps, &ens.lines[0].up_steps), "{g:?} replica {r}");
                assert!(same_steps(&top.down_steps, &ens.lines[0].down_steps));
                assert_eq!(top.left_offset, ens.lines[0].left_offset);
                // iterate the chronological engine on annihilation points
                let mut events = set.clone();
                for (k, line) in ens.lines.iter().enumerate() {
                    let mut engine = DirectEngine::new(&events);
                    engine.advance_to(cfg.tau);
                    let snap = engine.snapshot();
                    assert!(same_steps(&snap.up_steps, &line.up_steps), "{g:?} r {r} line {k}");
                    assert!(same_steps(&snap.down_steps, &line.down_steps));
                    let seeds: Vec<Event> = engine
                        .annihilations()
                        .iter()
                        .map(|&(x, t)| Event::nucleation(x, t))
                        .collect();
                    events = NucleationEventSet {
                        events: seeds,
                        geometry: GrowthGeometry::Droplet,
                        tau: cfg.tau,
                    };
                    events.events.sort_by(|a, b| a.t.total_cmp(&b.t));
                }
                assert!(events.is_empty());
            }
        }
    }

    #[test]
    fn ensemble_invariants_on_a_dense_grid() {
        let cfg = SimConfig::droplet(10.0).with_seed(8).with_lines();
        for r in 0..5 {
            let set = sample_nucleations(&cfg, r).unwrap();
            let ens = evolve_rsk(&set, &cfg).unwrap();
            let grid: Vec<f64> = (0..10_000).map(|k| -10.5 + 21.0 * k as f64 / 9_999.0).collect();
            for (k, line) in ens.lines.iter().enumerate() {
                assert_eq!(line.up_steps.len(), line.down_steps.len());
                assert_eq!(line.base_level, -(k as i64));
                assert_eq!(line.height(-10.0 - 1e-9), line.base_level);
                for &x in &grid {
                    assert!(ens.height(k, x) > ens.height(k + 1, x), "line {k} at {x}");
                }
            }
            // annihilations counted by the chronological engine equal the
            // nucleations the sweep injects into the next line
            let mut current = set.clone();
            for _ in 0..ens.lines.len() {
                let mut engine = DirectEngine::new(&current);
                engine.advance_to(cfg.tau);
                let (ups, pts) = to_light_cone(&current);
                let swept = sweep_line(&ups, &pts)
                    .annihilations
                    .iter()
                    .filter(|a| a.0 + a.1 <= 2.0 * cfg.tau)
                    .count();
                assert_eq!(engine.annihilations().len(), swept);
                let mut evs: Vec<Event> = engine
                    .annihilations()
                    .iter()
                    .map(|&(x, t)| Event::nucleation(x, t))
                    .collect();
                evs.sort_by(|a, b| a.t.total_cmp(&b.t));
                current = NucleationEventSet {
                    events: evs,
                    geometry: GrowthGeometry::Droplet,
                    tau: cfg.tau,
                };
            }
        }
    }

    #[test]
    fn flat_has_no_lower_lines() {
        let g = GrowthGeometry::Flat {
            box_half_width: 4.0,
            periodic: true,
        };
        let cfg = SimConfig::new(2.0, g).with_lines();
        let set = sample_nucleations(&cfg, 0).unwrap();
        assert!(matches!(evolve_rsk(&set, &cfg), Err(Error::Config(_))));
        let no_lines = SimConfig::droplet(2.0);
        let set = sample_nucleations(&no_lines, 0).unwrap();
        assert!(evolve_rsk(&set, &no_lines).is_err());
    }
}
