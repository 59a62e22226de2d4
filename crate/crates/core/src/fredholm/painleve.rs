//! Hastings–McLeod solution of Painlevé II, `q'' = xq + 2q³`, `q ~ Ai` at +∞.
//!
//! Shooting from the right is exponentially unstable, so the boundary value
//! problem is solved directly: Chebyshev collocation on `[A, B]` with
//! `q(B) = Ai(B)` and the left asymptotic series
//! `q(x) ≈ √(-x/2)(1 + 1/(8x³) - 73/(128x⁶) + 10657/(1024x⁹))` at `A`,
//! iterated by damped Newton. Beyond `B` the solution is replaced by `Ai`,
//! which it matches up to `O(Ai³)`.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernels::airy::airy_unchecked;

pub const LEFT_END: f64 = -16.0;
pub const RIGHT_END: f64 = 8.0;
pub const DEFAULT_DEGREE: usize = 180;

#[derive(Debug, Clone)]
pub struct HastingsMcLeod {
    a: f64,
    b: f64,
    /// Chebyshev points of the second kind, ordered from `b` down to `a`.
    nodes: Vec<f64>,
    values: Vec<f64>,
    residual: f64,
    iterations: usize,
}

fn left_asymptote(x: f64) -> f64 {
    (-x / 2.0).sqrt() * (1.0 + 1.0 / (8.0 * x.powi(3)) - 73.0 / (128.0 * x.powi(6)) + 10657.0 / (1024.0 * x.powi(9)))
}

/// Chebyshev differentiation matrix on `cos(πj/n)`, `j = 0..=n`.
fn cheb_diff(n: usize) -> (DMatrix<f64>, Vec<f64>) {
    let t: Vec<f64> = (0..=n).map(|j| (std::f64::consts::PI * j as f64 / n as f64).cos()).collect();
    let c = |j: usize| if j == 0 || j == n { 2.0 } else { 1.0 } * if j % 2 == 0 { 1.0 } else { -1.0 };
    let mut d = DMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                d[(i, j)] = c(i) / c(j) / (t[i] - t[j]);
            }
        }
    }
    for i in 0..=n {
        let s: f64 = (0..=n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
        d[(i, i)] = -s;
    }
    (d, t)
}

impl HastingsMcLeod {
    pub fn solve(a: f64, b: f64, degree: usize) -> Result<Self> {
        if !(a < -4.0 && b > 4.0 && degree >= 16) {
            return Err(Error::Config("Painlevé domain must contain [-4, 4]".into()));
        }
        let (d, t) = cheb_diff(degree);
        let scale = 2.0 / (b - a);
        let d2 = (&d * &d) * (scale * scale);
        let x: Vec<f64> = t.iter().map(|ti| 0.5 * (a + b) + 0.5 * (b - a) * ti).collect();
        let n = degree + 1;
        let mut q = DVector::from_fn(n, |i, _| {
            let xi = x[i];
            let bulk = 0.5 * (1.0 - xi.tanh()) * (xi.abs() / 2.0 + 0.01).sqrt();
            bulk + if xi > 0.0 { airy_unchecked(xi).0 } else { 0.0 }
        });
        let right = airy_unchecked(b).0;
        let left = left_asymptote(a);
        let residual_of = |q: &DVector<f64>| -> DVector<f64> {
            let mut f = &d2 * q;
            for i in 0..n {
                f[i] -= x[i] * q[i] + 2.0 * q[i].powi(3);
            }
            f[0] = q[0] - right;
            f[n - 1] = q[n - 1] - left;
            f
        };
        let mut f = residual_of(&q);
        let mut iterations = 0;
        for it in 0..60 {
            iterations = it + 1;
            let mut jac = d2.clone();
            for i in 0..n {
                jac[(i, i)] -= x[i] + 6.0 * q[i] * q[i];
            }
            for j in 0..n {
                jac[(0, j)] = 0.0;
                jac[(n - 1, j)] = 0.0;
            }
            jac[(0, 0)] = 1.0;
            jac[(n - 1, n - 1)] = 1.0;
            let step = jac
                .lu()
                .solve(&(-&f))
                .ok_or_else(|| Error::Painleve("singular Newton Jacobian".into()))?;
            // damping: halve until the residual decreases
            let norm = f.amax();
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let trial = &q + &step * lambda;
                let ft = residual_of(&trial);
                if ft.amax() < norm || norm < 1e-12 {
                    q = trial;
                    f = ft;
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !accepted {
                if norm < 1e-9 {
                    // at the round-off floor of the collocation operator
                    break;
                }
                return Err(Error::Painleve(format!("damped Newton stalled at residual {norm:.3e}")));
            }
            if (&step * lambda).amax() < 1e-14 * q.amax() {
                break;
            }
        }
        let residual = f.rows(1, n - 2).amax();
        if !residual.is_finite() || residual > 1e-8 {
            return Err(Error::Painleve(format!("collocation residual {residual:.3e} after {iterations} iterations")));
        }
        Ok(HastingsMcLeod { a, b, nodes: x, values: q.iter().copied().collect(), residual, iterations })
    }

    /// Shared solution on the default domain.
    pub fn shared() -> Result<&'static HastingsMcLeod> {
        static SOLUTION: OnceLock<std::result::Result<HastingsMcLeod, String>> = OnceLock::new();
        SOLUTION
            .get_or_init(|| Self::solve(LEFT_END, RIGHT_END, DEFAULT_DEGREE).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| Error::Painleve(e.clone()))
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Chebyshev collocation degree.
    pub fn degree(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Largest collocation residual `|q'' - xq - 2q³|` over interior nodes.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// `q(x)` for `x >= A`; barycentric interpolation inside the domain, `Ai` beyond it.
    pub fn q(&self, x: f64) -> f64 {
        if x >= self.b {
            return airy_unchecked(x).0;
        }
        let n = self.nodes.len() - 1;
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, (&xj, &qj)) in self.nodes.iter().zip(&self.values).enumerate() {
            let diff = x - xj;
            if diff == 0.0 {
                return qj;
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n {
                w *= 0.5;
            }
            num += w / diff * qj;
            den += w / diff;
        }
        num / den
    }
}

/// `q` at each grid point, for grids inside `[-10, 8]`.
pub fn painleve2_hm(grid: &[f64]) -> Result<Vec<f64>> {
    if let Some(x) = grid.iter().find(|x| !(-10.0..=8.0).contains(*x)) {
        return Err(Error::OutOfRange(format!("Painlevé grid point {x} outside [-10, 8]")));
    }
    let hm = HastingsMcLeod::shared()?;
    Ok(grid.iter().map(|&x| hm.q(x)).collect())
}
