//! Gauss–Legendre rules and composite panels.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
///
/// Computed by Newton iteration on P_n from Chebyshev-like initial guesses;
/// results are cached per order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&n) {
        return hit.clone();
    }
    let rule = compute_gauss_legendre(n);
    cache.lock().unwrap().insert(n, rule.clone());
    rule
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// A quadrature rule on a finite interval.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureScheme {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureScheme {
    /// `n`-point Gauss–Legendre on [a, b]. Orders up to 20 are checked to
    /// integrate monomials of degree 2n-1 exactly before being returned.
    pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<Self> {
        if n == 0 || !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Config(format!("invalid quadrature request n={n} on [{a}, {b}]")));
        }
        let (x, w) = gauss_legendre(n);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let scheme = QuadratureScheme {
            nodes: x.iter().map(|t| mid + half * t).collect(),
            weights: w.iter().map(|v| half * v).collect(),
        };
        if n <= 20 {
            verify_exactness(&x, &w)?;
        }
        Ok(scheme)
    }

    /// Composite rule: `panels` equal sub-intervals, `order` points each.
    pub fn composite(order: usize, panels: usize, a: f64, b: f64) -> Result<Self> {
        if panels == 0 {
            return Err(Error::Config("composite rule needs at least one panel".into()));
        }
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(order * panels);
        let mut weights = Vec::with_capacity(order * panels);
        for p in 0..panels {
            let q = Self::gauss_legendre(order, a + p as f64 * h, a + (p + 1) as f64 * h)?;
            nodes.extend(q.nodes);
            weights.extend(q.weights);
        }
        Ok(QuadratureScheme { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

fn verify_exactness(x: &[f64], w: &[f64]) -> Result<()> {
    let n = x.len();
    for k in 0..2 * n {
        let q: f64 = x.iter().zip(w).map(|(x, w)| w * x.powi(k as i32)).sum();
        let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
        if (q - exact).abs() > 1e-13 {
            return Err(Error::Fredholm(format!(
                "Gauss-Legendre order {n} fails exactness at degree {k}: {q} vs {exact}"
            )));
        }
    }
    Ok(())
}
