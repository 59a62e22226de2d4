//! `compare`: statistics of a run's CSV output against the limit laws.
//!
//! The input format is recognized from its header:
//! PNG heights (treated as droplet heights, compared with F₂ after the
//! `τ^{−1/3}(h − 2τ) + t²` rescaling), GUE spectra and edge series
//! (top eigenvalue against F₂), or a Tracy–Widom table (Painlevé F₂ column
//! against the Fredholm determinant).

use std::cell::RefCell;
use std::path::PathBuf;

use clap::Args;
use kpzlab_core::dyson::edge_rescale;
use kpzlab_core::fredholm::tw::{f2_cdf, TracyWidom};
use kpzlab_core::stats::{ks_distance, rescale_droplet_height, EmpiricalDistribution};
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, CliResult, EXIT_ACCEPTANCE};
use crate::{Common, Tier};

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// CSV written by `simulate` or `tw`.
    pub input: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub statistic: String,
    pub value: f64,
    pub band: f64,
    pub pass: bool,
}

impl Check {
    fn upper(statistic: String, value: f64, band: f64) -> Self {
        Check { statistic, value, band, pass: value <= band }
    }
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn read_table(path: &PathBuf) -> CliResult<Table> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io("INPUT_NOT_FOUND", path, e))?;
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    let header: Vec<String> = r
        .headers()
        .map_err(|e| CliError::config("BAD_INPUT", e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::config("BAD_INPUT", e.to_string()))?;
        let row = rec
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| CliError::config("BAD_INPUT", format!("{}: {e}", path.display())))?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::config("EMPTY_INPUT", format!("{} has no data rows", path.display())));
    }
    Ok(Table { header, rows })
}

/// Groups of `values` keyed by `key`, in order of first appearance.
fn grouped<K: PartialEq + Copy>(items: impl Iterator<Item = (K, f64)>) -> Vec<(K, Vec<f64>)> {
    let mut out: Vec<(K, Vec<f64>)> = Vec::new();
    for (k, v) in items {
        match out.iter_mut().find(|g| g.0 == k) {
            Some(g) => g.1.push(v),
            None => out.push((k, vec![v])),
        }
    }
    out
}

fn ks_f2(samples: Vec<f64>) -> CliResult<f64> {
    let tw = TracyWidom::shared()?;
    let emp = EmpiricalDistribution::new(samples)?;
    let err = RefCell::new(None);
    let d = ks_distance(&emp, |s| {
        tw.f2(s.clamp(-10.0, 8.0)).unwrap_or_else(|e| {
            *err.borrow_mut() = Some(e);
            f64::NAN
        })
    });
    match err.into_inner() {
        Some(e) => Err(e.into()),
        None => Ok(d),
    }
}

fn checks(t: &Table, tier: Tier) -> CliResult<Vec<Check>> {
    let h: Vec<&str> = t.header.iter().map(String::as_str).collect();
    let png_band = match tier {
        Tier::Ci => 0.05,
        Tier::Paper => 0.02,
    };
    match h.as_slice() {
        ["replica", "probe_x", "probe_tau", "height"] => {
            let groups = grouped(t.rows.iter().map(|r| ((r[1], r[2]), r[3])));
            let mut out = Vec::new();
            for ((x, tau), hs) in groups {
                let ts = x / tau.powf(2.0 / 3.0);
                let xi = hs.iter().map(|&v| rescale_droplet_height(v as i64, tau, ts)).collect();
                out.push(Check::upper(format!("ks_f2_droplet_height(x={x},tau={tau})"), ks_f2(xi)?, png_band));
            }
            Ok(out)
        }
        ["replica", "t_scaled", "xi"] => {
            let mut out = Vec::new();
            for (ts, xi) in grouped(t.rows.iter().map(|r| (r[1], r[2]))) {
                out.push(Check::upper(format!("ks_f2_edge(t_scaled={ts})"), ks_f2(xi)?, 0.05));
            }
            Ok(out)
        }
        ["replica", first, ..] if *first == "lambda_1" => {
            let n = h.len() - 1;
            let xi = t.rows.iter().map(|r| edge_rescale(r[1], n)).collect();
            Ok(vec![Check::upper(format!("ks_f2_gue_edge(N={n})"), ks_f2(xi)?, 0.05)])
        }
        ["s", "F1", "F2", "F4"] => {
            let mut sup = 0.0f64;
            for r in t.rows.iter().filter(|r| (-8.0..=4.0).contains(&r[0])) {
                sup = sup.max((r[2] - f2_cdf(r[0])?).abs());
            }
            Ok(vec![Check::upper("sup_f2_painleve_vs_fredholm".into(), sup, 1e-6)])
        }
        _ => Err(CliError::config("UNKNOWN_FORMAT", format!("unrecognized header: {}", t.header.join(",")))),
    }
}

pub fn run(common: &Common, a: &CompareArgs) -> CliResult<()> {
    let table = read_table(&a.input)?;
    let checks = checks(&table, common.tier)?;
    let pass = checks.iter().all(|c| c.pass);
    let tier = match common.tier {
        Tier::Ci => "ci",
        Tier::Paper => "paper",
    };
    let report = json!({ "input": a.input.display().to_string(), "tier": tier, "checks": checks, "pass": pass });
    let echo = json!({ "input": a.input.display().to_string(), "tier": tier });
    let mut run = common.start_run(&echo, None)?;
    run.write("compare.json", &serde_json::to_vec_pretty(&report).expect("report serializes"))?;
    run.write_metadata("compare", &echo)?;
    run.finish()?;
    if !pass {
        let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.statistic.as_str()).collect();
        return Err(CliError {
            code: "ACCEPTANCE_FAILED".into(),
            message: format!("outside band: {}", failed.join(", ")),
            exit: EXIT_ACCEPTANCE,
        });
    }
    Ok(())
}
