//! Photon scattering cross sections, their sum rules, the plateau
//! approximation, and comparisons across cutoff schemes.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::continuum::NaiveLimit;
use crate::error::{Error, Result};
use crate::params::{ModelParams, COUPLING};
use crate::sharp::{self, SumRuleReport};
use crate::smooth::{self, CutoffFunction, SmoothScheme};

/// How the photon self-energy is regulated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum CutoffScheme {
    /// Sharp cutoff at the ω_H of the parameters.
    Sharp,
    Smooth(SmoothScheme),
    /// The ω_H → ∞ limit at fixed Ω_r, r₀,ᵣ.
    NaiveLimit,
}

impl CutoffScheme {
    pub fn label(&self, p: &ModelParams) -> String {
        match self {
            CutoffScheme::Sharp => format!("sharp:{}", p.omega_h()),
            CutoffScheme::Smooth(s) => s.k.to_string(),
            CutoffScheme::NaiveLimit => "naive".to_string(),
        }
    }

    /// The equivalent sharp cutoff; `None` for the naive limit.
    pub fn effective_omega_h(&self, p: &ModelParams) -> Option<f64> {
        match self {
            CutoffScheme::Sharp => Some(p.omega_h()),
            CutoffScheme::Smooth(s) => Some(s.omega_h_eff),
            CutoffScheme::NaiveLimit => None,
        }
    }
}

/// A scheme as written on the command line: a cutoff family string or `naive`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchemeSpec {
    Cutoff(CutoffFunction),
    Naive,
}

impl FromStr for SchemeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("naive") {
            Ok(SchemeSpec::Naive)
        } else {
            Ok(SchemeSpec::Cutoff(s.parse()?))
        }
    }
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeSpec::Cutoff(k) => k.fmt(f),
            SchemeSpec::Naive => f.write_str("naive"),
        }
    }
}

impl SchemeSpec {
    /// Builds the scheme for the parameters' (Ω_r, r₀,ᵣ). With `normalize`,
    /// cutoff functions are first rescaled to the parameters' effective ω_H.
    pub fn build(&self, p: &ModelParams, normalize: bool) -> Result<CutoffScheme> {
        match *self {
            SchemeSpec::Naive => Ok(CutoffScheme::NaiveLimit),
            SchemeSpec::Cutoff(k) => {
                let k = if normalize { k.normalized_to(p.omega_h())? } else { k };
                match k {
                    CutoffFunction::Sharp { omega_h } if omega_h == p.omega_h() => Ok(CutoffScheme::Sharp),
                    _ => Ok(CutoffScheme::Smooth(smooth::build_scheme(k, p.r0r())?)),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossSectionSample {
    pub omega: f64,
    pub sigma: f64,
    pub sigma_over_thomson: f64,
}

/// Relative disagreement tolerated between the two σ formulas.
const OPTICAL_THEOREM_TOL: f64 = 1e-9;

fn sample(omega: f64, sigma: f64, p: &ModelParams) -> CrossSectionSample {
    CrossSectionSample { omega, sigma, sigma_over_thomson: sigma / p.thomson_cross_section() }
}

/// `σ(ω) = (8π/3) r₀,ᵣ² ω⁴ K(ω) |G_r|²`, cross-checked against `2π² r₀,ᵣ ρ(ω)`.
///
/// For the sharp cutoff ω must not exceed ω_H; σ(ω_H) = 0 since G_r vanishes there.
pub fn cross_section(omega: f64, p: &ModelParams, scheme: &CutoffScheme) -> Result<CrossSectionSample> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::domain(format!("omega must be positive, got {omega}")));
    }
    let r = p.r0r();
    let (from_g, from_rho) = match scheme {
        CutoffScheme::Sharp => {
            if omega > p.omega_h() {
                return Err(Error::domain(format!(
                    "the sharp-cutoff cross section is defined for omega <= omega_H = {}, got {omega}",
                    p.omega_h()
                )));
            }
            if omega == p.omega_h() {
                return Ok(sample(omega, 0.0, p));
            }
            let g = sharp::propagator(omega, p)?;
            (g.norm_sqr(), sharp::spectral_density(omega, p)?)
        }
        CutoffScheme::Smooth(s) => {
            let g = smooth::inverse_g_r_smooth(omega, p, s)?.inv();
            (s.k.value(omega) * g.norm_sqr(), smooth::spectral_density_smooth(omega, p, s)?)
        }
        CutoffScheme::NaiveLimit => {
            let inv = NaiveLimit::from_params(p).inverse_g_r(omega);
            let rho = COUPLING * r * omega.powi(4) / inv.norm_sqr();
            (inv.inv().norm_sqr(), rho)
        }
    };
    let sigma = 8.0 * PI / 3.0 * r * r * omega.powi(4) * from_g;
    let sigma_rho = 2.0 * PI * PI * r * from_rho;
    debug_assert!(
        sigma == sigma_rho || ((sigma - sigma_rho) / sigma).abs() < OPTICAL_THEOREM_TOL,
        "optical theorem violated at omega = {omega}: {sigma} vs {sigma_rho}"
    );
    Ok(sample(omega, sigma, p))
}

/// σ extended by zero above a sharp cutoff, where photons decouple (K = 0).
pub fn cross_section_extended(omega: f64, p: &ModelParams, scheme: &CutoffScheme) -> Result<CrossSectionSample> {
    if matches!(scheme, CutoffScheme::Sharp) && omega > p.omega_h() {
        return Ok(sample(omega, 0.0, p));
    }
    cross_section(omega, p, scheme)
}

fn scale_report(report: SumRuleReport, factor: f64) -> SumRuleReport {
    SumRuleReport {
        integral: report.integral * factor,
        integral_error: report.integral_error * factor,
        pole_weight: report.pole_weight * factor,
        total: report.total * factor,
        target: report.target * factor,
        probability_sum: None,
        ..report
    }
}

/// `∫σ dω = 2π² r₀,ᵣ (1/(1 − a) − r_b)` for the sharp cutoff and
/// `2π² r₀,ᵣ/(1 − a_K)` for a smooth one. The reported pole weight is
/// `2π² r₀,ᵣ r_b`, so that `total` is compared with `2π² r₀,ᵣ/(1 − a)`.
pub fn sigma_sum_rule(p: &ModelParams, scheme: &CutoffScheme, rel_tol: f64) -> Result<SumRuleReport> {
    let factor = 2.0 * PI * PI * p.r0r();
    match scheme {
        CutoffScheme::Sharp => {
            let integral = sharp::integrate_spectral(p, |_| factor, rel_tol)?;
            let pole = sharp::bound_state_pole(p)?;
            Ok(SumRuleReport::new(integral, factor * pole.residue, factor / (1.0 - p.a()), rel_tol))
        }
        CutoffScheme::Smooth(s) => Ok(scale_report(smooth::spectral_sum_rule_smooth(p, s, rel_tol)?, factor)),
        CutoffScheme::NaiveLimit => Err(Error::domain(
            "the naive limit has no finite cross-section sum rule (sigma tends to a constant)",
        )),
    }
}

/// `σ/σ_T ≈ 1 + ω² (2r₀,ᵣ/3)² ((6/π)/(r₀,ᵣ ω_H) − 1)`, valid for Ω_r ≪ ω ≪ ω_H.
///
/// The ω² coefficient is positive for a < 8/π² and negative above.
pub fn plateau_correction(omega: f64, p: &ModelParams) -> f64 {
    let r = p.r0r();
    let k = 2.0 * r / 3.0;
    1.0 + omega * omega * k * k * (6.0 / (PI * r * p.omega_h()) - 1.0)
}

/// The range `(10 Ω_r, ω_H/10)` where [`plateau_correction`] is meant to apply.
pub fn plateau_range(p: &ModelParams) -> (f64, f64) {
    (10.0 * p.omega_r(), 0.1 * p.omega_h())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniversalityReport {
    pub schemes: Vec<String>,
    pub threshold: f64,
    pub omega: Vec<f64>,
    /// σ/σ_T per scheme, in scheme order, each over the whole grid.
    pub sigma_over_thomson: Vec<Vec<f64>>,
    /// `(max σ − min σ)/min σ` across the cutoff schemes at each grid point.
    pub max_rel_deviation: Vec<f64>,
    /// First grid frequency at which the cutoff schemes disagree by more than the threshold.
    pub agreement_boundary: Option<f64>,
    /// Largest deviation of the naive limit from any cutoff scheme, per grid point.
    pub naive_deviation: Option<Vec<f64>>,
    /// First grid frequency at which the naive limit departs by more than the threshold.
    pub naive_boundary: Option<f64>,
}

impl UniversalityReport {
    /// Largest cutoff-scheme disagreement over grid points `ω ≤ omega_max`.
    pub fn max_deviation_below(&self, omega_max: f64) -> f64 {
        self.omega
            .iter()
            .zip(&self.max_rel_deviation)
            .filter(|(w, _)| **w <= omega_max)
            .map(|(_, d)| *d)
            .fold(0.0, f64::max)
    }
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if values.len() < 2 || max == min {
        0.0
    } else if min <= 0.0 {
        f64::INFINITY
    } else {
        (max - min) / min
    }
}

fn first_above(omega: &[f64], dev: &[f64], threshold: f64) -> Option<f64> {
    omega.iter().zip(dev).find(|(_, d)| **d > threshold).map(|(w, _)| *w)
}

/// Compares σ(ω) across schemes that share one effective ω_H (that of `p`).
/// A naive-limit entry is reported separately and does not enter the agreement boundary.
pub fn universality_compare(
    p: &ModelParams,
    schemes: &[CutoffScheme],
    omega_grid: &[f64],
    threshold: f64,
) -> Result<UniversalityReport> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(Error::domain(format!("threshold must be positive, got {threshold}")));
    }
    for s in schemes {
        if let Some(w) = s.effective_omega_h(p) {
            if ((w - p.omega_h()) / p.omega_h()).abs() > 1e-9 {
                return Err(Error::domain(format!(
                    "scheme {} has effective omega_H = {w}, expected {}",
                    s.label(p),
                    p.omega_h()
                )));
            }
        }
    }
    let columns = schemes
        .par_iter()
        .map(|s| {
            omega_grid
                .par_iter()
                .map(|&w| cross_section_extended(w, p, s).map(|x| x.sigma_over_thomson))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;

    let cutoff_idx: Vec<usize> =
        (0..schemes.len()).filter(|&i| !matches!(schemes[i], CutoffScheme::NaiveLimit)).collect();
    let naive_idx = schemes.iter().position(|s| matches!(s, CutoffScheme::NaiveLimit));

    let max_rel_deviation: Vec<f64> = (0..omega_grid.len())
        .map(|j| spread(&cutoff_idx.iter().map(|&i| columns[i][j]).collect::<Vec<_>>()))
        .collect();
    let naive_deviation = naive_idx.filter(|_| !cutoff_idx.is_empty()).map(|n| {
        (0..omega_grid.len())
            .map(|j| cutoff_idx.iter().map(|&i| spread(&[columns[n][j], columns[i][j]])).fold(0.0, f64::max))
            .collect::<Vec<f64>>()
    });

    Ok(UniversalityReport {
        schemes: schemes.iter().map(|s| s.label(p)).collect(),
        threshold,
        omega: omega_grid.to_vec(),
        agreement_boundary: first_above(omega_grid, &max_rel_deviation, threshold),
        naive_boundary: naive_deviation.as_ref().and_then(|d| first_above(omega_grid, d, threshold)),
        sigma_over_thomson: columns,
        max_rel_deviation,
        naive_deviation,
    })
}

/// The default scheme set for universality comparisons.
pub fn default_universality_schemes() -> Vec<SchemeSpec> {
    ["sharp", "exptail:1,0.2", "gausstail:1,0.3", "tanhstep:1,0.02", "naive"]
        .iter()
        .map(|s| s.parse().expect("valid built-in scheme"))
        .collect()
}
