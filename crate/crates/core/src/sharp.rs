//! Renormalized propagator, spectral density and pole structure for a sharp
//! frequency cutoff ω_H.
//!
//! The `+iε` prescription is never taken numerically: each branch of
//! `1/G_r(ω² + iε)` carries its imaginary part in closed form. Quantities that
//! cling to the cutoff (the artifact peak below ω_H and the bound-state pole
//! above it) sit at relative distances `η ≈ 2e^{-2/a}` that underflow the
//! resolution of ω itself, so they are computed in the variable `u = ln η`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{find_root, Quadrature, QuadratureResult};
use crate::params::ModelParams;

/// Classification of a real pole of the propagator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PoleKind {
    /// Cutoff artifact at Ω_b = ω_H(1 + η) with positive residue.
    BoundState { eta: f64 },
    /// Pole at ω² = −k_t² with negative residue.
    Tachyon { k_t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoleInfo {
    /// Ω_b for a bound state; the ω²-plane position −k_t² for a tachyon.
    pub location: f64,
    /// Residue in the ω² variable, `G_r ≈ residue/(ω² − pole)`.
    pub residue: f64,
    pub kind: PoleKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralSample {
    pub s: f64,
    pub rho: f64,
}

/// The zero of `Re 1/G_r` just below the cutoff, where σ has its artifact peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffPeak {
    pub omega: f64,
    /// `1 − ω/ω_H`.
    pub eta: f64,
}

/// Total spectral weight compared against its analytic value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumRuleReport {
    /// Integral of the continuum part.
    pub integral: f64,
    pub integral_error: f64,
    /// Weight carried by isolated poles (r_b for the sharp cutoff).
    pub pole_weight: f64,
    pub total: f64,
    pub target: f64,
    pub relative_deviation: f64,
    /// `(1 − a)·total`; the decay probabilities, which must sum to 1.
    pub probability_sum: Option<f64>,
    pub rel_tol: f64,
}

impl SumRuleReport {
    pub(crate) fn new(integral: QuadratureResult, pole_weight: f64, target: f64, rel_tol: f64) -> Self {
        let total = integral.value + pole_weight;
        SumRuleReport {
            integral: integral.value,
            integral_error: integral.error_estimate,
            pole_weight,
            total,
            target,
            relative_deviation: ((total - target) / target).abs(),
            probability_sum: None,
            rel_tol,
        }
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.relative_deviation <= tolerance
    }
}

/// `ln((ω_H − ω)/(ω_H + ω))` for `0 < ω < ω_H`.
fn log_ratio_below(omega: f64, omega_h: f64) -> f64 {
    ((omega_h - omega) / (omega_h + omega)).ln()
}

/// `Re 1/G_r` below the cutoff given the logarithm above.
fn real_part_below(omega: f64, log_ratio: f64, p: &ModelParams) -> f64 {
    let wr = p.omega_r();
    omega * omega - wr * wr + 0.5 * p.a() * omega.powi(3) / p.omega_h() * log_ratio
}

fn imag_part_below(omega: f64, p: &ModelParams) -> f64 {
    0.5 * PI * p.a() * omega.powi(3) / p.omega_h()
}

/// `ln((ω + ω_H)/(ω − ω_H))` at ω = ω_H(1 + e^u), accurate for any u.
fn log_ratio_above_u(u: f64) -> f64 {
    if u > 0.0 {
        (2.0 * (-u).exp()).ln_1p()
    } else {
        (2.0 + u.exp()).ln() - u
    }
}

/// `1/G_r` above the cutoff as a function of ω and the logarithm.
fn inverse_above(omega: f64, log_ratio: f64, p: &ModelParams) -> f64 {
    let wr = p.omega_r();
    omega * omega - wr * wr - 0.5 * p.a() * omega.powi(3) / p.omega_h() * log_ratio
}

/// `1/G_r(ω² + iε)` for `ω > 0`, `ω ≠ ω_H`.
pub fn inverse_g_r(omega: f64, p: &ModelParams) -> Result<Complex64> {
    let wh = p.omega_h();
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::domain(format!("omega must be positive, got {omega}")));
    }
    if omega < wh {
        let re = real_part_below(omega, log_ratio_below(omega, wh), p);
        Ok(Complex64::new(re, imag_part_below(omega, p)))
    } else if omega > wh {
        let log_ratio = ((omega + wh) / (omega - wh)).ln();
        Ok(Complex64::new(inverse_above(omega, log_ratio, p), 0.0))
    } else {
        Err(Error::domain("1/G_r diverges logarithmically at omega = omega_H"))
    }
}

/// `G_r(ω² + iε)`; exactly zero at the cutoff.
pub fn propagator(omega: f64, p: &ModelParams) -> Result<Complex64> {
    if omega == p.omega_h() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(inverse_g_r(omega, p)?.inv())
}

/// `1/G_r(−k²) = −k² − Ω_r² + k³ (4r₀,ᵣ/3π) arctan(ω_H/k)` for `k > 0`.
pub fn inverse_g_r_negative_axis(k: f64, p: &ModelParams) -> f64 {
    debug_assert!(k >= 0.0);
    let wr = p.omega_r();
    let coupling = p.a() / p.omega_h();
    -k * k - wr * wr + k.powi(3) * coupling * (p.omega_h() / k).atan()
}

fn rho_from_parts(s: f64, log_ratio: f64, p: &ModelParams) -> f64 {
    let re = real_part_below(s, log_ratio, p);
    let im = imag_part_below(s, p);
    p.a() * s.powi(4) / p.omega_h() / (re * re + im * im)
}

/// Spectral density ρ(s) on `0 < s < ω_H`.
pub fn spectral_density(s: f64, p: &ModelParams) -> Result<f64> {
    if !(s > 0.0 && s < p.omega_h()) {
        return Err(Error::domain(format!("spectral density is supported on (0, omega_H), got s = {s}")));
    }
    Ok(rho_from_parts(s, log_ratio_below(s, p.omega_h()), p))
}

/// ρ(s) through its definition `(2s/π)(−Im G_r(s² + iε))`.
pub fn spectral_density_from_propagator(s: f64, p: &ModelParams) -> Result<f64> {
    if !(s > 0.0 && s < p.omega_h()) {
        return Err(Error::domain(format!("spectral density is supported on (0, omega_H), got s = {s}")));
    }
    let g = inverse_g_r(s, p)?.inv();
    Ok(2.0 * s / PI * (-g.im))
}

pub fn spectral_sample(s: f64, p: &ModelParams) -> Result<SpectralSample> {
    Ok(SpectralSample { s, rho: spectral_density(s, p)? })
}

/// ρ at `s = ω_H(1 − e^u)`.
fn rho_near_cutoff(u: f64, p: &ModelParams) -> f64 {
    let s = p.omega_h() * (1.0 - u.exp());
    let log_ratio = u - (2.0 - u.exp()).ln();
    rho_from_parts(s, log_ratio, p)
}

fn bound_state_function(u: f64, p: &ModelParams) -> f64 {
    let omega = p.omega_h() * (1.0 + u.exp());
    inverse_above(omega, log_ratio_above_u(u), p)
}

/// The artifact pole Ω_b = ω_H(1 + η) above the cutoff and its residue r_b.
pub fn bound_state_pole(p: &ModelParams) -> Result<PoleInfo> {
    let a = p.a();
    let u_lo = -2.0 / a - 10f64.ln();
    let mut u_hi = 0.0;
    while bound_state_function(u_hi, p) <= 0.0 {
        u_hi += 1.0;
        if u_hi > 60.0 {
            return Err(Error::NoBracket {
                lo: u_lo,
                hi: u_hi,
                f_lo: bound_state_function(u_lo, p),
                f_hi: bound_state_function(u_hi, p),
            });
        }
    }
    let root = find_root(|u| bound_state_function(u, p), u_lo, u_hi, 1e-13)?;
    let eta = root.root.exp();
    let wh = p.omega_h();
    let omega_b = wh * (1.0 + eta);
    let log_ratio = log_ratio_above_u(root.root);
    // d(1/G_r)/dω, with ω² − ω_H² written through η to keep it exact near the cutoff
    let slope = 2.0 * omega_b - 1.5 * a * omega_b * omega_b / wh * log_ratio
        + a * omega_b.powi(3) / (wh * wh * eta * (2.0 + eta));
    let residue = 2.0 * omega_b / slope;
    Ok(PoleInfo { location: omega_b, residue, kind: PoleKind::BoundState { eta } })
}

/// The bound-state pole's η and residue in the small-a limit, `2e^{-2/a}` and `(8/a)e^{-2/a}`.
pub fn bound_state_asymptote(a: f64) -> (f64, f64) {
    let e = (-2.0 / a).exp();
    (2.0 * e, 8.0 / a * e)
}

/// Where σ stops showing a separate peak just below the cutoff.
pub const ARTIFACT_MERGE_A: f64 = 8.0 / (PI * PI);

/// The zero of `Re 1/G_r` nearest to ω_H from below.
pub fn second_peak(p: &ModelParams) -> Result<CutoffPeak> {
    let a = p.a();
    if a >= ARTIFACT_MERGE_A {
        return Err(Error::NoRoot(format!(
            "a = {a} >= 8/pi^2: the cutoff artifact is not separated from the plateau"
        )));
    }
    let wh = p.omega_h();
    let omega_lo = (0.5 * wh).max(0.5 * (p.omega_r() + wh));
    let real = |u: f64| {
        let omega = wh * (1.0 - u.exp());
        real_part_below(omega, u - (2.0 - u.exp()).ln(), p)
    };
    let u_hi = (1.0 - omega_lo / wh).ln();
    let u_lo = -4.0 / a - 10.0;
    if real(u_hi) <= 0.0 {
        return Err(Error::NoRoot(format!(
            "Re 1/G_r does not turn positive between the resonance and the cutoff (a = {a}, b = {})",
            p.b()
        )));
    }
    let root = find_root(real, u_lo, u_hi, 1e-13)?;
    let eta = root.root.exp();
    Ok(CutoffPeak { omega: wh * (1.0 - eta), eta })
}

/// Breakpoints straddling the resonance at Ω_r on the scale of its width.
pub(crate) fn resonance_points(p: &ModelParams) -> Vec<f64> {
    let wr = p.omega_r();
    let gamma = 2.0 / 3.0 * p.r0r() * wr * wr;
    let mut pts = vec![wr];
    for k in [0.5, 2.0, 10.0, 50.0, 250.0] {
        pts.push(wr - k * gamma);
        pts.push(wr + k * gamma);
    }
    pts.retain(|&x| x > 0.0);
    pts
}

/// `∫₀^{ω_H} ρ(s) w(s) ds`.
///
/// Below ω_H/2 (or halfway between Ω_r and ω_H when the resonance is high)
/// the integral runs in s with breakpoints at the resonance. Above, it runs in
/// `v = −ln(1 − s/ω_H)` out to infinity, which resolves the exponentially
/// narrow artifact peak.
pub(crate) fn integrate_spectral<W>(p: &ModelParams, weight: W, rel_tol: f64) -> Result<QuadratureResult>
where
    W: Fn(f64) -> f64,
{
    let q = Quadrature::new(rel_tol);
    let wh = p.omega_h();
    let handoff = (0.5 * wh).max(0.5 * (p.omega_r() + wh));
    let resonance = resonance_points(p);
    let low = q.integrate_points(
        |s| spectral_density(s, p).map(|r| r * weight(s)).unwrap_or(0.0),
        0.0,
        handoff,
        &resonance,
    )?;

    let v0 = -(1.0 - handoff / wh).ln();
    let mut v_points: Vec<f64> = resonance
        .iter()
        .filter(|&&s| s > handoff && s < wh)
        .map(|&s| -(1.0 - s / wh).ln())
        .collect();
    if let Ok(peak) = second_peak(p) {
        let v = -peak.eta.ln();
        v_points.extend([v - 2.0, v, v + 2.0]);
    }
    let high = q.semi_infinite(
        |v| {
            let u = -v;
            let s = wh * (1.0 - u.exp());
            rho_near_cutoff(u, p) * weight(s) * wh * u.exp()
        },
        v0,
        &v_points,
    )?;
    Ok(low.combine(high))
}

/// `∫₀^{ω_H} ρ + r_b = 1/(1 − a)`.
pub fn spectral_sum_rule(p: &ModelParams, rel_tol: f64) -> Result<SumRuleReport> {
    let integral = integrate_spectral(p, |_| 1.0, rel_tol)?;
    let pole = bound_state_pole(p)?;
    let mut report = SumRuleReport::new(integral, pole.residue, 1.0 / (1.0 - p.a()), rel_tol);
    report.probability_sum = Some((1.0 - p.a()) * report.total);
    Ok(report)
}

/// `G_r(−k²)` rebuilt from the spectral representation: the continuum
/// `∫ ρ(s)/(−k² − s²) ds` plus the bound-state pole term.
pub fn spectral_reconstruction_negative_axis(k: f64, p: &ModelParams, rel_tol: f64) -> Result<f64> {
    if k.is_nan() || k <= 0.0 {
        return Err(Error::domain(format!("k must be positive, got {k}")));
    }
    let continuum = integrate_spectral(p, |s| 1.0 / (-k * k - s * s), rel_tol)?;
    let pole = bound_state_pole(p)?;
    Ok(continuum.value + pole.residue / (-k * k - pole.location * pole.location))
}
