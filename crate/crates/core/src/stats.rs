//! Edge-scaling transforms and the estimators used by the acceptance
//! suite: Kolmogorov–Smirnov distances, moments, power-law exponents,
//! two-sample χ² on integer outcomes and bootstrapped covariance series.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::batch::{map_replicas, Execution};
use crate::error::{Error, Result};
use crate::rng::{child_seed, substream};

/// Asymptotic two-sided KS critical value at level 1%.
pub const KS_C_001: f64 = 1.628;

pub const BOOTSTRAP_RESAMPLES: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Stats("empty sample".into()));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::Stats("non-finite sample".into()));
        }
        samples.sort_by(f64::total_cmp);
        Ok(EmpiricalDistribution { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Fraction of samples `≤ x`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.samples.partition_point(|&s| s <= x) as f64 / self.len() as f64
    }

    fn cdf_below(&self, x: f64) -> f64 {
        self.samples.partition_point(|&s| s < x) as f64 / self.len() as f64
    }

    /// Distinct sample values.
    fn atoms(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples
            .iter()
            .enumerate()
            .filter(|(i, &x)| *i == 0 || self.samples[i - 1] != x)
            .map(|(_, &x)| x)
    }

    pub fn moments(&self) -> Result<Moments> {
        moments(&self.samples)
    }
}

/// `sup_x |F_emp(x) − F(x)|` for a continuous `cdf`, evaluated on both
/// sides of every jump of the empirical CDF (ties give one jump).
pub fn ks_distance(emp: &EmpiricalDistribution, cdf: impl Fn(f64) -> f64) -> f64 {
    emp.atoms()
        .map(|x| {
            let f = cdf(x);
            (emp.cdf(x) - f).abs().max((emp.cdf_below(x) - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample KS statistic `sup_x |F_a(x) − F_b(x)|`.
pub fn ks_two_sample(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    a.atoms()
        .chain(b.atoms())
        .map(|x| (a.cdf(x) - b.cdf(x)).abs())
        .fold(0.0, f64::max)
}

/// Critical value of the two-sample statistic at level 1% (asymptotic).
pub fn ks_two_sample_critical(n: usize, m: usize) -> f64 {
    KS_C_001 * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Asymptotic Kolmogorov tail `P(K > λ)`.
pub fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let s: f64 = (1..=100)
        .map(|k| {
            let k = k as f64;
            let sign = if k as i64 % 2 == 1 { 1.0 } else { -1.0 };
            sign * (-2.0 * k * k * lambda * lambda).exp()
        })
        .sum();
    (2.0 * s).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    /// Unbiased.
    pub variance: f64,
    pub skewness: f64,
}

/// Sample mean and unbiased variance.
pub fn mean_variance(x: &[f64]) -> Result<(f64, f64)> {
    if x.len() < 2 {
        return Err(Error::Stats(format!("need at least 2 samples, got {}", x.len())));
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    Ok((mean, x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)))
}

/// Sample mean, unbiased variance and skewness `m₃ / m₂^{3/2}` (central
/// moments with divisor `n`).
pub fn moments(x: &[f64]) -> Result<Moments> {
    let n = x.len();
    if n < 3 {
        return Err(Error::Stats(format!("need at least 3 samples, got {n}")));
    }
    let nf = n as f64;
    let mean = x.iter().sum::<f64>() / nf;
    let m2 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf;
    let m3 = x.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / nf;
    if m2 <= 0.0 {
        return Err(Error::Stats("zero variance: skewness undefined".into()));
    }
    Ok(Moments {
        mean,
        variance: m2 * nf / (nf - 1.0),
        skewness: m3 / m2.powf(1.5),
    })
}

/// Least-squares slope of `log(dispersion)` against `log(scale)` with its
/// standard error.
pub fn exponent_fit(pairs: &[(f64, f64)]) -> Result<(f64, f64)> {
    if pairs.len() < 3 {
        return Err(Error::Stats("exponent fit needs at least 3 scales".into()));
    }
    if pairs.iter().any(|&(s, d)| !(s > 0.0 && d > 0.0)) {
        return Err(Error::Stats("exponent fit needs positive scales and dispersions".into()));
    }
    let pts: Vec<(f64, f64)> = pairs.iter().map(|&(s, d)| (s.ln(), d.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::Stats("exponent fit needs distinct scales".into()));
    }
    let slope = sxy / sxx;
    let rss: f64 = pts
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum();
    let stderr = if pts.len() > 2 {
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok((slope, stderr))
}

/// `τ^{−1/3}(h − 2τ) + t²`: droplet height at `x = t·τ^{2/3}` rescaled to
/// the scale of `𝒜(t)`.
pub fn rescale_droplet_height(h: i64, tau: f64, t_scaled: f64) -> f64 {
    (h as f64 - 2.0 * tau) / tau.cbrt() + t_scaled * t_scaled
}

/// A probe position in scaled units together with the macroscopic scale it
/// refers to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingProbe {
    pub t_scaled: f64,
    /// `τ` for growth, `N` for matrices.
    pub scale: f64,
    pub observable: String,
}

impl ScalingProbe {
    /// Spatial offset `t·τ^{2/3}` of the probe.
    pub fn position(&self) -> f64 {
        self.t_scaled * self.scale.powf(2.0 / 3.0)
    }

    pub fn rescale(&self, h: i64) -> f64 {
        rescale_droplet_height(h, self.scale, self.t_scaled)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Two-sample χ² homogeneity test on integer outcomes. Outcomes are pooled
/// in increasing order until each bin expects at least five counts in each
/// sample; a short remainder joins the last bin.
pub fn chi_square_two_sample(a: &[i64], b: &[i64]) -> Result<ChiSquareResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Stats("empty sample".into()));
    }
    let mut table: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
    for &x in a {
        table.entry(x).or_default().0 += 1.0;
    }
    for &x in b {
        table.entry(x).or_default().1 += 1.0;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let min_pool = 5.0 * (na + nb) / na.min(nb);
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (_, c) in table {
        acc.0 += c.0;
        acc.1 += c.1;
        if acc.0 + acc.1 >= min_pool {
            bins.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.0 + acc.1 > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => bins.push(acc),
        }
    }
    if bins.len() < 2 {
        return Ok(ChiSquareResult {
            statistic: 0.0,
            dof: 0,
            p_value: 1.0,
        });
    }
    let total = na + nb;
    let statistic: f64 = bins
        .iter()
        .map(|&(ca, cb)| {
            let pooled = ca + cb;
            let ea = pooled * na / total;
            let eb = pooled * nb / total;
            (ca - ea).powi(2) / ea + (cb - eb).powi(2) / eb
        })
        .sum();
    let dof = bins.len() - 1;
    let p_value = ChiSquared::new(dof as f64)
        .map_err(|e| Error::Stats(e.to_string()))?
        .sf(statistic);
    Ok(ChiSquareResult {
        statistic,
        dof,
        p_value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub t: f64,
    pub covariance: f64,
    pub covariance_se: f64,
    pub structure: f64,
    pub structure_se: f64,
}

fn cov_and_structure(paths: &[Vec<f64>], idx: &[usize], k: usize) -> (f64, f64) {
    let n = idx.len() as f64;
    let (mut s0, mut sk, mut s0k, mut d2) = (0.0, 0.0, 0.0, 0.0);
    for &i in idx {
        let (a, b) = (paths[i][0], paths[i][k]);
        s0 += a;
        sk += b;
        s0k += a * b;
        d2 += (a - b) * (a - b);
    }
    let cov = (s0k - s0 * sk / n) / (n - 1.0);
    (cov, d2 / n)
}

/// Empirical `Cov(ξ(0), ξ(t))` and `E[(ξ(0) − ξ(t))²]` along `t_grid`
/// (whose first entry is the reference time), with bootstrap standard
/// errors from resampling whole paths.
pub fn covariance_series(paths: &[Vec<f64>], t_grid: &[f64], seed: u64) -> Result<Vec<SeriesPoint>> {
    if t_grid.len() < 2 {
        return Err(Error::Stats("need at least 2 time points".into()));
    }
    if paths.len() < 2 {
        return Err(Error::Stats("need at least 2 paths".into()));
    }
    if paths.iter().any(|p| p.len() != t_grid.len()) {
        return Err(Error::Stats("path length differs from the time grid".into()));
    }
    let all: Vec<usize> = (0..paths.len()).collect();
    let boot_seed = child_seed(seed, 0xB007);
    let resamples: Vec<Vec<(f64, f64)>> = map_replicas(BOOTSTRAP_RESAMPLES, Execution::Parallel, |b| {
        let mut rng = substream(boot_seed, b as u64);
        let idx: Vec<usize> = (0..paths.len()).map(|_| rng.gen_range(0..paths.len())).collect();
        (1..t_grid.len()).map(|k| cov_and_structure(paths, &idx, k)).collect()
    });
    let sd = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
    };
    Ok((1..t_grid.len())
        .map(|k| {
            let (cov, st) = cov_and_structure(paths, &all, k);
            let covs: Vec<f64> = resamples.iter().map(|r| r[k - 1].0).collect();
            let sts: Vec<f64> = resamples.iter().map(|r| r[k - 1].1).collect();
            SeriesPoint {
                t: t_grid[k] - t_grid[0],
                covariance: cov,
                covariance_se: sd(&covs),
                structure: st,
                structure_se: sd(&sts),
            }
        })
        .collect())
}
