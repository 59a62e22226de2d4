use serde::{Deserialize, Serialize};

use super::sample::{sample_cones, ConeSample};
use super::{sample_nucleations, DirectEngine, EventKind, GrowthGeometry, SimConfig};
use crate::batch::{try_map_replicas, Execution};
use crate::error::{Error, Result};
use crate::rng::substream;

/// Expected number of events per replica above which a run is refused.
pub const MAX_EXPECTED_EVENTS: f64 = 5.0e7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub x: f64,
    pub tau: f64,
}

impl Probe {
    pub fn new(x: f64, tau: f64) -> Self {
        Probe { x, tau }
    }

    fn corner(&self) -> (f64, f64) {
        (self.tau + self.x, self.tau - self.x)
    }
}

enum Route {
    /// Light-cone sweep on events sampled inside the probes' backward cones.
    Cones,
    /// Chronological engine on the whole box.
    Direct,
}

fn route(config: &SimConfig, probes: &[Probe]) -> Result<Route> {
    config.validate()?;
    if probes.is_empty() {
        return Err(Error::Config("no probes".into()));
    }
    for p in probes {
        if !(p.tau > 0.0 && p.tau <= config.tau * (1.0 + 1e-12)) {
            return Err(Error::OutOfRange(format!("probe time {} not in (0, {}]", p.tau, config.tau)));
        }
    }
    match config.geometry {
        GrowthGeometry::Flat { box_half_width: l, .. } => {
            if probes.iter().any(|p| p.x.abs() > l) {
                return Err(Error::OutOfRange(format!("probe outside the box [-{l}, {l}]")));
            }
            let fits = probes.iter().all(|p| p.x.abs() + p.tau <= l);
            let expected = if fits {
                config.intensity * config.tau * config.tau
            } else {
                config.intensity * 2.0 * l * config.tau
            };
            check_budget(expected)?;
            Ok(if fits { Route::Cones } else { Route::Direct })
        }
        _ => {
            if let Some(p) = probes.iter().find(|p| p.x.abs() > p.tau) {
                return Err(Error::OutOfRange(format!(
                    "probe ({}, {}) outside the light cone",
                    p.x, p.tau
                )));
            }
            check_budget(config.intensity * config.tau * config.tau)?;
            Ok(Route::Cones)
        }
    }
}

fn check_budget(expected: f64) -> Result<()> {
    if expected > MAX_EXPECTED_EVENTS {
        Err(Error::ResourceLimit(format!(
            "{expected:.3e} expected events per replica exceeds {MAX_EXPECTED_EVENTS:.0e}"
        )))
    } else {
        Ok(())
    }
}

/// Heights at the probe corners from one patience-sorting pass.
fn sweep_heights(sample: &ConeSample, corners: &[(f64, f64)]) -> Vec<i64> {
    let mut order: Vec<usize> = (0..corners.len()).collect();
    order.sort_by(|&a, &b| corners[a].1.total_cmp(&corners[b].1));
    let mut out = vec![0i64; corners.len()];
    let mut live = sample.initial_ups.clone();
    let mut left = 0i64;
    let mut next = 0;
    let read = |live: &[f64], left: i64, limit: f64, next: &mut usize, out: &mut [i64]| {
        while *next < order.len() && corners[order[*next]].1 < limit {
            let (u, _) = corners[order[*next]];
            out[order[*next]] = left + live.partition_point(|&w| w <= u) as i64;
            *next += 1;
        }
    };
    for p in &sample.points {
        read(&live, left, p.v, &mut next, &mut out);
        match p.kind {
            EventKind::DownSource => {
                left += 1;
                if !live.is_empty() {
                    live.remove(0);
                }
            }
            _ => {
                let k = live.partition_point(|&w| w <= p.u);
                if k < live.len() {
                    live[k] = p.u;
                } else {
                    live.push(p.u);
                }
            }
        }
    }
    read(&live, left, f64::INFINITY, &mut next, &mut out);
    out
}

fn replica_heights(config: &SimConfig, probes: &[Probe], route: &Route, replica: u64) -> Result<Vec<i64>> {
    match route {
        Route::Cones => {
            let corners: Vec<(f64, f64)> = probes.iter().map(Probe::corner).collect();
            let sample = sample_cones(config, &corners, &mut substream(config.seed, replica));
            Ok(sweep_heights(&sample, &corners))
        }
        Route::Direct => {
            let t_max = probes.iter().map(|p| p.tau).fold(0.0, f64::max);
            let cfg = SimConfig { tau: t_max, ..*config };
            let events = sample_nucleations(&cfg, replica)?;
            let mut engine = DirectEngine::new(&events);
            let mut order: Vec<usize> = (0..probes.len()).collect();
            order.sort_by(|&a, &b| probes[a].tau.total_cmp(&probes[b].tau));
            let mut out = vec![0; probes.len()];
            let mut snap = None;
            for i in order {
                if engine.time() < probes[i].tau || snap.is_none() {
                    engine.advance_to(probes[i].tau);
                    snap = Some(engine.snapshot());
                }
                out[i] = snap.as_ref().unwrap().height(probes[i].x);
            }
            Ok(out)
        }
    }
}

/// `h(probe)` for `n_samples` independent replicas, row `r` drawn from
/// substream `r` of `config.seed`.
pub fn height_observables(
    config: &SimConfig,
    n_samples: usize,
    probes: &[Probe],
    exec: Execution,
) -> Result<Vec<Vec<i64>>> {
    if n_samples == 0 {
        return Err(Error::Config("n_samples must be at least 1".into()));
    }
    let route = route(config, probes)?;
    try_map_replicas(n_samples, exec, |r| replica_heights(config, probes, &route, r as u64))
}

/// Heights of all nontrivial RSK lines at `probe`, top line first, for
/// each replica. Lines further down sit at their base levels.
pub fn rsk_heights_at(config: &SimConfig, probe: Probe, n_samples: usize, exec: Execution) -> Result<Vec<Vec<i64>>> {
    if let GrowthGeometry::Flat { .. } = config.geometry {
        return Err(Error::Config("lower lines are not tracked in flat geometry".into()));
    }
    let route = route(config, &[probe])?;
    debug_assert!(matches!(route, Route::Cones));
    let corner = probe.corner();
    try_map_replicas(n_samples, exec, |r| {
        let sample = sample_cones(config, &[corner], &mut substream(config.seed, r as u64));
        let mut heights = Vec::new();
        let mut ups = sample.initial_ups;
        let mut points = sample.points;
        while !points.is_empty() || !ups.is_empty() {
            let history = super::sweep::sweep_line(&ups, &points);
            let line = history.at(probe.tau, -(heights.len() as i64), (-probe.tau, probe.tau));
            heights.push(line.height(probe.x));
            ups.clear();
            points = history
                .annihilations
                .iter()
                .map(|&(u, v)| super::sample::Pt {
                    u,
                    v,
                    kind: EventKind::Nucleation,
                })
                .collect();
        }
        Ok(heights)
    })
}
