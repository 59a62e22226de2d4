//! `tw` and `airy-stats` tables.

use clap::Args;
use kpzlab_core::fredholm::airy_process::airy_two_point;
use kpzlab_core::fredholm::det::L_CUT;
use kpzlab_core::fredholm::painleve::HastingsMcLeod;
use kpzlab_core::fredholm::tw::tw_family_cdfs;
use kpzlab_core::Execution;
use serde_json::json;

use crate::error::CliResult;
use crate::grid::{parse_grid, stepped};
use crate::{Common, Tier};

#[derive(Debug, Args)]
pub struct TwArgs {
    #[arg(long, default_value_t = -8.0, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, default_value_t = 6.0, allow_hyphen_values = true)]
    pub to: f64,
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
}

#[derive(Debug, Args)]
pub struct AiryStatsArgs {
    /// Time gaps in `[0.01, 8]`; the default depends on the tier.
    #[arg(long)]
    pub t: Option<String>,
}

fn header(order: &str) -> String {
    format!("# order={order}, Lcut={L_CUT}, version={}\n", env!("CARGO_PKG_VERSION"))
}

pub fn tw(common: &Common, a: &TwArgs) -> CliResult<()> {
    let grid = stepped(a.from, a.to, a.step)?;
    let table = tw_family_cdfs(&grid)?;
    let degree = HastingsMcLeod::shared()?.degree();
    let echo = json!({ "from": a.from, "to": a.to, "step": a.step });
    let mut run = common.start_run(&echo, None)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["s", "F1", "F2", "F4"]).expect("in-memory write");
    for i in 0..grid.len() {
        w.write_record([table.s[i], table.f1[i], table.f2[i], table.f4[i]].map(|v| v.to_string()))
            .expect("in-memory write");
    }
    let mut body = header(&format!("painleve-chebyshev-{degree}")).into_bytes();
    body.extend(w.into_inner().expect("in-memory flush"));
    run.write("tw.csv", &body)?;
    run.write_metadata("tw", &echo)?;
    run.finish()?;
    Ok(())
}

pub fn airy_stats(common: &Common, a: &AiryStatsArgs) -> CliResult<()> {
    let spec = a.t.clone().unwrap_or_else(|| match common.tier {
        Tier::Ci => "0.05,0.5,4".into(),
        Tier::Paper => "0.05,0.1,0.2,0.5,1,2,4,6".into(),
    });
    let ts = parse_grid(&spec)?;
    let echo = json!({ "t": ts });
    let mut run = common.start_run(&echo, None)?;
    let points = kpzlab_core::batch::try_map_replicas(ts.len(), Execution::Parallel, |i| airy_two_point(ts[i]))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "structure", "covariance"]).expect("in-memory write");
    for p in &points {
        w.write_record([p.t, p.structure, p.covariance].map(|v| v.to_string())).expect("in-memory write");
    }
    let orders: Vec<String> = points.iter().map(|p| p.order.to_string()).collect();
    let mut body = header(&orders.join("/")).into_bytes();
    body.extend(w.into_inner().expect("in-memory flush"));
    run.write("airy_stats.csv", &body)?;
    run.write_metadata("airy-stats", &echo)?;
    run.finish()?;
    Ok(())
}
