//! Log-log growth fits and the scaling experiment table.

use crate::error::{HarnessError, Result};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

/// Least-squares line through `(log x, log y)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthFit {
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square vertical deviation from the fitted line.
    pub residual: f64,
}

impl GrowthFit {
    /// Fits `y ≈ e^intercept · x^slope` from raw positive `(x, y)` pairs.
    pub fn power_law(raw: &[(f64, f64)]) -> Result<GrowthFit> {
        if raw.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
            return Err(HarnessError::Usage("power-law fit needs positive x and y".into()));
        }
        let points: Vec<(f64, f64)> = raw.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
        GrowthFit::linear(points)
    }

    /// Ordinary least squares on already-transformed points.
    pub fn linear(points: Vec<(f64, f64)>) -> Result<GrowthFit> {
        let n = points.len() as f64;
        if points.len() < 2 {
            return Err(HarnessError::Usage("a fit needs at least two points".into()));
        }
        let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
        let my = points.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
        if sxx == 0.0 {
            return Err(HarnessError::Usage("a fit needs at least two distinct x values".into()));
        }
        let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let residual = (points
            .iter()
            .map(|p| (p.1 - intercept - slope * p.0).powi(2))
            .sum::<f64>()
            / n)
            .sqrt();
        Ok(GrowthFit { points, slope, intercept, residual })
    }
}

/// One row of a scaling table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    #[serde(rename = "H")]
    pub h: u64,
    pub count: u128,
    pub candidates_examined: u64,
    pub elapsed_ms: u64,
}

pub fn write_csv<W: Write>(rows: &[ScalingRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ScalingRow>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(HarnessError::from)).collect()
}

/// `start:stop:factor` (geometric, each step multiplying by `factor`) or a
/// comma-separated list. Values must be strictly ascending.
pub fn parse_grid(text: &str) -> Result<Vec<u64>> {
    let bad = || HarnessError::Usage(format!("invalid grid {text:?}"));
    let values: Vec<u64> = if text.contains(':') {
        let parts: Vec<u64> = text
            .split(':')
            .map(|p| p.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [start, stop, factor] = parts[..] else { return Err(bad()) };
        if start == 0 || factor < 2 {
            return Err(bad());
        }
        let mut v = Vec::new();
        let mut x = start;
        while x <= stop {
            v.push(x);
            x = x.checked_mul(factor).ok_or_else(bad)?;
        }
        v
    } else {
        text.split(',')
            .map(|p| p.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if values.is_empty() || values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad());
    }
    Ok(values)
}
