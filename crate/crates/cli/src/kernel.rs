//! `kernel`: kernel values on a grid.

use clap::Args;
use kpzlab_core::kernels::bessel::default_window;
use kpzlab_core::kernels::{
    airy_kernel, extended_airy_kernel, DiscreteBesselKernel, ExtendedDiscreteKernel, HermiteKernel,
};
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::grid::{levels, parse_grid};
use crate::Common;

pub const KERNELS: [&str; 6] = ["airy", "airy_ext", "hermite", "hermite_ext", "dbessel", "dbessel_ext"];

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// One of airy, airy_ext, hermite, hermite_ext, dbessel, dbessel_ext.
    pub name: String,
    /// First argument grid, `a:b:count` or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    /// Second argument grid; without it the diagonal `x' = x` is evaluated.
    #[arg(long, allow_hyphen_values = true)]
    pub xp: Option<String>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub tp: f64,
    /// Matrix size for the Hermite kernels.
    #[arg(long = "n", short = 'N')]
    pub n: Option<usize>,
    /// PNG time for the discrete Bessel kernels.
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
}

enum Evaluator {
    Airy,
    AiryExt,
    Hermite(HermiteKernel),
    HermiteExt(HermiteKernel),
    Bessel(DiscreteBesselKernel),
    BesselExt(ExtendedDiscreteKernel),
}

impl Evaluator {
    fn build(a: &KernelArgs, all_x: &[f64]) -> CliResult<Self> {
        let hermite = || -> CliResult<HermiteKernel> {
            let n = a.n.ok_or_else(|| CliError::missing_param("N"))?;
            Ok(HermiteKernel::new(n)?)
        };
        let tau = || a.tau.ok_or_else(|| CliError::missing_param("tau"));
        Ok(match a.name.as_str() {
            "airy" => Evaluator::Airy,
            "airy_ext" => Evaluator::AiryExt,
            "hermite" => Evaluator::Hermite(hermite()?),
            "hermite_ext" => Evaluator::HermiteExt(hermite()?),
            "dbessel" => {
                let tau = tau()?;
                let lv = levels(all_x)?;
                let (lo, hi) = default_window(tau);
                let lo = lv.iter().copied().min().unwrap_or(lo).min(lo);
                let hi = lv.iter().copied().max().unwrap_or(hi).max(hi);
                Evaluator::Bessel(DiscreteBesselKernel::on_window(tau, lo, hi)?)
            }
            "dbessel_ext" => {
                levels(all_x)?;
                Evaluator::BesselExt(ExtendedDiscreteKernel::new(tau()?, a.t.abs().max(a.tp.abs()))?)
            }
            other => {
                return Err(CliError::config(
                    "UNKNOWN_KERNEL",
                    format!("unknown kernel '{other}'; available: {}", KERNELS.join(", ")),
                ))
            }
        })
    }

    fn eval(&self, x: f64, t: f64, xp: f64, tp: f64) -> CliResult<f64> {
        let v = match self {
            Evaluator::Airy => airy_kernel(x, xp)?,
            Evaluator::AiryExt => extended_airy_kernel(x, t, xp, tp)?,
            Evaluator::Hermite(k) => k.kernel(x, xp)?,
            Evaluator::HermiteExt(k) => {
                if t == tp {
                    k.kernel(x, xp)?
                } else {
                    k.extended(x, t, xp, tp)?
                }
            }
            Evaluator::Bessel(k) => k.value(x as i64, xp as i64)?,
            Evaluator::BesselExt(k) => k.value(x as i64, t, xp as i64, tp)?,
        };
        Ok(v)
    }
}

pub fn run(common: &Common, a: &KernelArgs) -> CliResult<()> {
    let xs = parse_grid(&a.x)?;
    let xps = match &a.xp {
        Some(spec) => Some(parse_grid(spec)?),
        None => None,
    };
    if !(a.t.is_finite() && a.tp.is_finite()) {
        return Err(CliError::config("CONFIG_INVALID", "times must be finite"));
    }
    let pairs: Vec<(f64, f64)> = match &xps {
        None => xs.iter().map(|&x| (x, x)).collect(),
        Some(ys) => xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect(),
    };
    let all: Vec<f64> = pairs.iter().flat_map(|&(x, y)| [x, y]).collect();
    let eval = Evaluator::build(a, &all)?;

    let echo = json!({
        "kernel": a.name, "x": a.x, "xp": a.xp, "t": a.t, "tp": a.tp, "n": a.n, "tau": a.tau,
    });
    let mut run = common.start_run(&echo, None)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "t", "xp", "tp", "value"]).expect("in-memory write");
    for &(x, xp) in &pairs {
        let v = eval.eval(x, a.t, xp, a.tp)?;
        w.write_record([x.to_string(), a.t.to_string(), xp.to_string(), a.tp.to_string(), v.to_string()])
            .expect("in-memory write");
    }
    let mut body = format!(
        "# kernel={}, N={}, tau={}, version={}\n",
        a.name,
        a.n.map_or("-".into(), |n| n.to_string()),
        a.tau.map_or("-".into(), |t| t.to_string()),
        env!("CARGO_PKG_VERSION")
    )
    .into_bytes();
    body.extend(w.into_inner().expect("in-memory flush"));
    run.write("kernel.csv", &body)?;
    run.write_metadata("kernel", &echo)?;
    run.finish()?;
    Ok(())
}
