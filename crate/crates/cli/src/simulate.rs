//! `simulate png` and `simulate dyson`.

use kpzlab_core::dyson::{edge_time_series, gue_spectra};
use kpzlab_core::png::{height_observables, GrowthGeometry, Probe, SimConfig};
use kpzlab_core::Execution;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::{Common, Tier};

fn default_intensity() -> f64 {
    2.0
}

fn droplet() -> GrowthGeometry {
    GrowthGeometry::Droplet
}

/// A `SimConfig` plus the batch size and probes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PngRun {
    pub tau: f64,
    #[serde(default = "default_intensity")]
    pub intensity: f64,
    #[serde(default = "droplet")]
    pub geometry: GrowthGeometry,
    #[serde(default)]
    pub seed: Option<u64>,
    pub samples: usize,
    /// Defaults to the single probe `(0, tau)`.
    #[serde(default)]
    pub probes: Option<Vec<Probe>>,
}

impl PngRun {
    pub fn preset(tier: Tier) -> Self {
        let (tau, samples) = match tier {
            Tier::Ci => (200.0, 10_000),
            Tier::Paper => (1000.0, 100_000),
        };
        PngRun { tau, intensity: 2.0, geometry: GrowthGeometry::Droplet, seed: None, samples, probes: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DysonMode {
    /// Fixed-time GUE spectra.
    Spectrum,
    /// Rescaled top eigenvalue of the stationary matrix process over Airy time.
    EdgeSeries,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DysonRun {
    pub n: usize,
    pub samples: usize,
    pub mode: DysonMode,
    #[serde(default)]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl DysonRun {
    pub fn preset(tier: Tier) -> Self {
        let (n, samples) = match tier {
            Tier::Ci => (100, 10_000),
            Tier::Paper => (200, 100_000),
        };
        DysonRun { n, samples, mode: DysonMode::Spectrum, t_grid: None, seed: None }
    }
}

fn csv_bytes(header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn png(common: &Common) -> CliResult<()> {
    let mut run_cfg: PngRun = common.load_config_or(|| PngRun::preset(common.tier))?;
    if let Some(s) = common.seed {
        run_cfg.seed = Some(s);
    }
    let seed = run_cfg.seed.unwrap_or(0);
    run_cfg.seed = Some(seed);
    if run_cfg.samples == 0 {
        return Err(CliError::config("CONFIG_INVALID", "samples must be at least 1"));
    }
    let sim = SimConfig { tau: run_cfg.tau, intensity: run_cfg.intensity, geometry: run_cfg.geometry, seed, keep_lines: false };
    sim.validate()?;
    let probes = run_cfg.probes.clone().unwrap_or_else(|| vec![Probe::new(0.0, run_cfg.tau)]);
    run_cfg.probes = Some(probes.clone());

    let echo = serde_json::to_value(&run_cfg).expect("config serializes");
    let mut run = common.start_run(&echo, Some(seed))?;
    let heights = height_observables(&sim, run_cfg.samples, &probes, Execution::Parallel)?;
    let header: Vec<String> = ["replica", "probe_x", "probe_tau", "height"].iter().map(|s| s.to_string()).collect();
    let rows = heights.iter().enumerate().flat_map(|(r, hs)| {
        probes
            .iter()
            .zip(hs)
            .map(move |(p, h)| vec![r.to_string(), p.x.to_string(), p.tau.to_string(), h.to_string()])
    });
    run.write("png_heights.csv", &csv_bytes(&header, rows))?;
    run.write_metadata("simulate png", &echo)?;
    run.finish()?;
    Ok(())
}

pub fn dyson(common: &Common) -> CliResult<()> {
    let mut run_cfg: DysonRun = common.load_config_or(|| DysonRun::preset(common.tier))?;
    if let Some(s) = common.seed {
        run_cfg.seed = Some(s);
    }
    let seed = run_cfg.seed.unwrap_or(0);
    run_cfg.seed = Some(seed);
    if run_cfg.n == 0 || run_cfg.samples == 0 {
        return Err(CliError::config("CONFIG_INVALID", "n and samples must be at least 1"));
    }
    let echo = serde_json::to_value(&run_cfg).expect("config serializes");
    match run_cfg.mode {
        DysonMode::Spectrum => {
            let mut run = common.start_run(&echo, Some(seed))?;
            let spectra = gue_spectra(run_cfg.n, run_cfg.samples, seed, Execution::Parallel)?;
            let mut header = vec!["replica".to_string()];
            header.extend((1..=run_cfg.n).map(|i| format!("lambda_{i}")));
            let rows = spectra.iter().enumerate().map(|(r, l)| {
                let mut row = vec![r.to_string()];
                row.extend(l.iter().map(|v| v.to_string()));
                row
            });
            run.write("dyson_spectra.csv", &csv_bytes(&header, rows))?;
            run.write_metadata("simulate dyson", &echo)?;
            run.finish()?;
        }
        DysonMode::EdgeSeries => {
            let grid = run_cfg.t_grid.clone().ok_or_else(|| CliError::missing_param("t_grid"))?;
            let mut run = common.start_run(&echo, Some(seed))?;
            let series = edge_time_series(run_cfg.n, &grid, run_cfg.samples, seed, Execution::Parallel)?;
            let header: Vec<String> = ["replica", "t_scaled", "xi"].iter().map(|s| s.to_string()).collect();
            let rows = series.iter().enumerate().flat_map(|(r, xs)| {
                grid.iter().zip(xs).map(move |(t, x)| vec![r.to_string(), t.to_string(), x.to_string()])
            });
            run.write("dyson_edge.csv", &csv_bytes(&header, rows))?;
            run.write_metadata("simulate dyson", &echo)?;
            run.finish()?;
        }
    }
    Ok(())
}
