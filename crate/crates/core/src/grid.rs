//! Frequency grids for scans, written `min:max:count:spacing`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{resonance_info, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    Linear,
    Log,
    /// Log below the resonance, dense across it, linear on the plateau and
    /// log-clustered toward the cutoff.
    ResonanceAware,
}

impl FromStr for Spacing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" | "lin" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            "resonance-aware" | "resonance" => Ok(Spacing::ResonanceAware),
            other => Err(Error::domain(format!(
                "unknown spacing {other:?} (expected linear, log or resonance-aware)"
            ))),
        }
    }
}

impl fmt::Display for Spacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spacing::Linear => "linear",
            Spacing::Log => "log",
            Spacing::ResonanceAware => "resonance-aware",
        })
    }
}

/// A grid over `[min, max]`, in units of ω_H.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, count: usize, spacing: Spacing) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min >= 0.0 && min < max) {
            return Err(Error::domain(format!("grid needs 0 <= min < max, got {min}:{max}")));
        }
        if count < 2 {
            return Err(Error::domain(format!("grid needs at least 2 points, got {count}")));
        }
        if spacing != Spacing::Linear && min <= 0.0 {
            return Err(Error::domain(format!("{spacing} grid needs min > 0")));
        }
        Ok(GridSpec { min, max, count, spacing })
    }

    /// Grid points in increasing order. Resonance-aware grids need the model
    /// parameters, are expressed in units of ω_H, always include both ends,
    /// and contain about `count` points after duplicates are dropped.
    pub fn points(&self, p: Option<&ModelParams>) -> Result<Vec<f64>> {
        match self.spacing {
            Spacing::Linear => Ok(linspace(self.min, self.max, self.count)),
            Spacing::Log => Ok(logspace(self.min, self.max, self.count)),
            Spacing::ResonanceAware => {
                let p = p.ok_or_else(|| Error::domain("resonance-aware grid needs model parameters"))?;
                Ok(self.resonance_aware(p))
            }
        }
    }

    fn resonance_aware(&self, p: &ModelParams) -> Vec<f64> {
        let (lo, hi) = (self.min, self.max);
        let n = self.count;
        let wr = p.b();
        let gamma = resonance_info(p).gamma / p.omega_h();
        let quarter = (n / 4).max(2);

        let mut pts = vec![lo, hi];
        // Rayleigh regime and the approach to the resonance
        pts.extend(logspace(lo, (10.0 * wr).min(hi), quarter));
        // across the resonance
        pts.extend(linspace((wr - 10.0 * gamma).max(lo), (wr + 10.0 * gamma).min(hi), quarter));
        // plateau
        let edge = 0.5_f64.max(10.0 * wr).min(1.0);
        pts.extend(linspace((10.0 * wr).min(edge), edge, quarter));
        // toward the cutoff, evenly in ln(1 − ω/ω_H) down past the artifact peak
        let eta_min = (1e-3 * 2.0 * (-2.0 / p.a()).exp()).max(1e-15);
        let eta_max = 1.0 - edge;
        if eta_max > eta_min {
            let rest = n.saturating_sub(3 * quarter).max(2);
            pts.extend(logspace(eta_min, eta_max, rest).into_iter().map(|eta| 1.0 - eta));
            pts.push(1.0);
        }
        if hi > 1.0 {
            pts.extend(linspace(1.0, hi, quarter));
        }

        pts.retain(|&x| x >= lo && x <= hi && x > 0.0);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    /// Parses `min:max:count[:spacing]`; spacing defaults to linear.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(Error::domain(format!("grid {s:?} is not min:max:count[:spacing]")));
        }
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::domain(format!("bad number {t:?} in grid {s:?}")));
        let count = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::domain(format!("bad count {:?} in grid {s:?}", parts[2])))?;
        let spacing = parts.get(3).map(|t| t.parse()).transpose()?.unwrap_or(Spacing::Linear);
        GridSpec::new(num(parts[0])?, num(parts[1])?, count, spacing)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.min, self.max, self.count, self.spacing)
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { hi } else { lo + step * i as f64 }).collect()
}

pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (l, h) = (lo.ln(), hi.ln());
    linspace(l, h, n)
        .into_iter()
        .enumerate()
        .map(|(i, x)| if i == 0 { lo } else if i == n - 1 { hi } else { x.exp() })
        .collect()
}
