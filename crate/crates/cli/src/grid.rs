//! Grid specifications: `a:b:count` (inclusive, evenly spaced) or a comma
//! list.

use crate::error::{CliError, CliResult};

pub fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let bad = |why: &str| CliError::config("BAD_GRID", format!("grid '{spec}': {why}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number")).and_then(|v| {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad("not finite"))
        }
    });
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.len() {
        1 => {
            let v = spec.split(',').map(num).collect::<CliResult<Vec<f64>>>()?;
            if v.is_empty() {
                return Err(bad("empty"));
            }
            Ok(v)
        }
        3 => {
            let (a, b) = (num(parts[0])?, num(parts[1])?);
            let n: usize = parts[2].trim().parse().map_err(|_| bad("count must be a positive integer"))?;
            match n {
                0 => Err(bad("count must be a positive integer")),
                1 => Ok(vec![a]),
                _ => Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()),
            }
        }
        _ => Err(bad("expected a:b:count or a comma list")),
    }
}

/// `from, from + step, …` up to `to` inclusive (to within a tenth of a step).
pub fn stepped(from: f64, to: f64, step: f64) -> CliResult<Vec<f64>> {
    if !(step > 0.0 && from <= to && from.is_finite() && to.is_finite()) {
        return Err(CliError::config("BAD_GRID", format!("range [{from}, {to}] with step {step}")));
    }
    let n = ((to - from) / step + 0.1).floor() as usize;
    Ok((0..=n).map(|k| from + step * k as f64).collect())
}

/// Integer lattice levels.
pub fn levels(values: &[f64]) -> CliResult<Vec<i64>> {
    values
        .iter()
        .map(|&v| {
            if v.fract() == 0.0 && v.abs() < 1e15 {
                Ok(v as i64)
            } else {
                Err(CliError::config("NON_INTEGER_LEVEL", format!("lattice kernels need integer levels, got {v}")))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(parse_grid("0,1.5,-2").unwrap(), vec![0.0, 1.5, -2.0]);
        assert_eq!(parse_grid("-1:1:3").unwrap(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(parse_grid("2:5:1").unwrap(), vec![2.0]);
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("a,b").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert_eq!(stepped(-6.0, 2.0, 0.5).unwrap().len(), 17);
        assert_eq!(levels(&[3.0, -2.0]).unwrap(), vec![3, -2]);
        assert_eq!(levels(&[0.5]).unwrap_err().code, "NON_INTEGER_LEVEL");
    }
}
