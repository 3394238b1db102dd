//! The naive continuum limit ω_H → ∞ and its tachyon, and the tachyon that
//! appears at finite ω_H once the cutoff is pushed past a = 1.
//!
//! Residues are reported as `r_t`, where the propagator's residue in ω² at
//! `ω² = −k_t²` is `−π r_t`; in the naive limit π r_t → 2 as c → 0⁺. The two
//! routes to r_t (slope of `1/G` at the root, and the spectral sum rule)
//! agree in this normalization.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{find_root, Quadrature};
use crate::params::{ModelParams, COUPLING};

const ROOT_TOL: f64 = 1e-15;
const RESIDUE_REL_TOL: f64 = 1e-12;

/// The ω_H → ∞ limit at fixed renormalized (Ω_r, r₀,ᵣ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NaiveLimit {
    pub omega_r: f64,
    pub r0r: f64,
}

impl NaiveLimit {
    /// `omega_r` may be zero; `r0r` must be positive.
    pub fn new(omega_r: f64, r0r: f64) -> Result<Self> {
        if !(omega_r.is_finite() && omega_r >= 0.0) {
            return Err(Error::domain(format!("omega_r must be nonnegative, got {omega_r}")));
        }
        if !(r0r.is_finite() && r0r > 0.0) {
            return Err(Error::domain(format!("r0r must be positive, got {r0r}")));
        }
        Ok(NaiveLimit { omega_r, r0r })
    }

    pub fn from_params(p: &ModelParams) -> Self {
        NaiveLimit { omega_r: p.omega_r(), r0r: p.r0r() }
    }

    /// `c = (2/3) r₀,ᵣ Ω_r`.
    pub fn c(&self) -> f64 {
        2.0 / 3.0 * self.r0r * self.omega_r
    }

    /// `ω² − Ω_r² + i (2/3) r₀,ᵣ ω³`.
    pub fn inverse_g_r(&self, omega: f64) -> Complex64 {
        Complex64::new(omega * omega - self.omega_r * self.omega_r, 2.0 / 3.0 * self.r0r * omega.powi(3))
    }

    /// `−k² − Ω_r² + (2/3) r₀,ᵣ k³`.
    pub fn negative_axis(&self, k: f64) -> f64 {
        -k * k - self.omega_r * self.omega_r + 2.0 / 3.0 * self.r0r * k.powi(3)
    }

    fn negative_axis_slope(&self, k: f64) -> f64 {
        -2.0 * k + 2.0 * self.r0r * k * k
    }

    /// `3/(2r₀,ᵣ) + (2/3) r₀,ᵣ Ω_r²`.
    pub fn k_t_asymptote(&self) -> f64 {
        1.5 / self.r0r + 2.0 / 3.0 * self.r0r * self.omega_r * self.omega_r
    }

    pub fn tachyon(&self) -> Result<TachyonReport> {
        // (1/G)/k² is increasing in k, so the positive root is unique and lies above 3/(2r)
        let lo = 1.5 / self.r0r;
        let mut hi = 2.0 * lo;
        while self.negative_axis(hi) <= 0.0 {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::NoRoot("naive negative-axis function never turns positive".into()));
            }
        }
        let root = find_root(|k| self.negative_axis(k), lo, hi, ROOT_TOL * hi)?;
        let k_t = root.root;
        let slope = self.negative_axis_slope(k_t);
        let c = self.c();
        let r_t_derivative = 2.0 * k_t / (PI * slope);
        Ok(TachyonReport {
            k_t,
            k_t_asymptote: self.k_t_asymptote(),
            r_t_derivative,
            r_t_integral: tachyon_residue_integral(c)?,
            residue: -PI * r_t_derivative,
            c,
        })
    }
}

/// Location and residue of the pole of `G_r` at `ω² = −k_t²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TachyonReport {
    pub k_t: f64,
    pub k_t_asymptote: f64,
    /// `r_t = 2k_t / (π · d(1/G_r(−k²))/dk)` at the root.
    pub r_t_derivative: f64,
    /// `r_t` from the spectral sum rule.
    pub r_t_integral: f64,
    /// Residue of `G_r` in the variable ω², `−π r_t`; negative.
    pub residue: f64,
    /// `c = (2/3) r₀,ᵣ Ω_r`.
    pub c: f64,
}

impl TachyonReport {
    pub fn residue_agreement(&self) -> f64 {
        ((self.r_t_derivative - self.r_t_integral) / self.r_t_integral).abs()
    }
}

pub fn naive_inverse_g_r(omega: f64, p: &ModelParams) -> Complex64 {
    NaiveLimit::from_params(p).inverse_g_r(omega)
}

pub fn naive_negative_axis(k: f64, p: &ModelParams) -> f64 {
    NaiveLimit::from_params(p).negative_axis(k)
}

pub fn tachyon_pole_naive(p: &ModelParams) -> Result<TachyonReport> {
    NaiveLimit::from_params(p).tachyon()
}

/// `r_t = (2/π²) ∫₀^∞ x⁴ / ((x² − c²)² + x⁶) dx`, the sum-rule residue in the
/// naive limit. At c = 0 the integral is π/2, giving `π r_t = 1`; as c → 0⁺
/// the resonance at x ≈ c carries another π/2.
pub fn tachyon_residue_integral(c: f64) -> Result<f64> {
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::domain(format!("c must be nonnegative, got {c}")));
    }
    let f = |x: f64| {
        let d = (x - c) * (x + c);
        let x2 = x * x;
        x2 * x2 / (d * d + x2 * x2 * x2)
    };
    let q = Quadrature::new(RESIDUE_REL_TOL);
    // the resonance at x ≈ c has half-width ≈ c²/2
    let mut points = vec![c, 1.0];
    for k in [0.5, 2.0, 10.0, 50.0] {
        points.push(c - k * 0.5 * c * c);
        points.push(c + k * 0.5 * c * c);
    }
    let body = q.integrate_points(f, 0.0, 1.0, &points)?;
    let tail = q.semi_infinite(f, 1.0, &[2.0, 10.0])?;
    Ok(2.0 / (PI * PI) * (body.value + tail.value))
}

/// `(c, π r_t)` for each `c ∈ (0, 1]`, in input order.
pub fn tachyon_residue_curve(c_values: &[f64]) -> Result<Vec<(f64, f64)>> {
    c_values
        .iter()
        .map(|&c| {
            if !(c > 0.0 && c <= 1.0) {
                return Err(Error::domain(format!("c must lie in (0, 1], got {c}")));
            }
            Ok((c, PI * tachyon_residue_integral(c)?))
        })
        .collect()
}

/// `1/G_r(−k²) = −k² − Ω_r² + k³ (a/ω_H) arctan(ω_H/k)` for any a > 0,
/// including the unphysical a ≥ 1.
pub fn finite_negative_axis(k: f64, a: f64, b: f64, omega_h: f64) -> f64 {
    let wr = b * omega_h;
    -k * k - wr * wr + k.powi(3) * a / omega_h * (omega_h / k).atan()
}

fn finite_negative_axis_slope(k: f64, a: f64, omega_h: f64) -> f64 {
    -2.0 * k + 3.0 * a * k * k / omega_h * (omega_h / k).atan() - a * k.powi(3) / (k * k + omega_h * omega_h)
}

/// Spectral density on `(0, ω_H)` for any a > 0.
fn finite_density(s: f64, a: f64, b: f64, omega_h: f64) -> f64 {
    let x = s / omega_h;
    let wr = b * omega_h;
    // ln((1 − x)/(1 + x)) without cancellation as x → 1
    let log = (-2.0 * x / (1.0 + x)).ln_1p();
    let re = s * s - wr * wr + 0.5 * a * s.powi(3) / omega_h * log;
    let im = 0.5 * PI * a * s.powi(3) / omega_h;
    a * s.powi(4) / omega_h / (re * re + im * im)
}

/// The finite-cutoff tachyon for a > 1, compared with its small-(a − 1) asymptotes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiniteTachyonReport {
    pub a: f64,
    pub b: f64,
    pub omega_h: f64,
    #[serde(flatten)]
    pub tachyon: TachyonReport,
    /// `sqrt((a/3 + b²)/(a − 1))·ω_H`.
    pub k_t_near_threshold: f64,
    /// `1/(a − 1)`, the asymptotic magnitude of the residue in ω².
    pub residue_near_threshold: f64,
}

impl FiniteTachyonReport {
    pub fn k_t_deviation(&self) -> f64 {
        ((self.tachyon.k_t - self.k_t_near_threshold) / self.k_t_near_threshold).abs()
    }

    pub fn residue_deviation(&self) -> f64 {
        ((-self.tachyon.residue - self.residue_near_threshold) / self.residue_near_threshold).abs()
    }
}

/// Root-finds the tachyon of the arctan form. There is none for a ≤ 1:
/// `(1/G)/k²` increases to `a − 1` as k → ∞, so it stays negative, and the
/// search fails with [`Error::NoBracket`].
pub fn tachyon_pole_finite(a: f64, b: f64, omega_h: f64) -> Result<FiniteTachyonReport> {
    for (name, v) in [("a", a), ("omega_h", omega_h)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::domain(format!("{name} must be positive, got {v}")));
        }
    }
    if !(b.is_finite() && b >= 0.0) {
        return Err(Error::domain(format!("b must be nonnegative, got {b}")));
    }
    let k_t_near_threshold = ((a / 3.0 + b * b) / (a - 1.0)).sqrt() * omega_h;
    let hi = if a > 1.0 { 10.0 * k_t_near_threshold } else { 1e3 * omega_h };
    let f = |k: f64| finite_negative_axis(k, a, b, omega_h);
    let root = find_root(f, 1e-3 * omega_h, hi, ROOT_TOL * hi)?;
    let k_t = root.root;
    let magnitude = 2.0 * k_t / finite_negative_axis_slope(k_t, a, omega_h);

    // ∫₀^{ω_H} ρ − |residue| = 1/(1 − a); no real pole above ω_H when a > 1
    let q = Quadrature::new(RESIDUE_REL_TOL);
    let wr = b * omega_h;
    let split = 0.5 * omega_h;
    let low = q.integrate_points(|s| finite_density(s, a, b, omega_h), 0.0, split, &[wr])?;
    let high = q.semi_infinite(
        |v| {
            let t = (-v).exp();
            finite_density(omega_h * (1.0 - t), a, b, omega_h) * omega_h * t
        },
        std::f64::consts::LN_2,
        &[],
    )?;
    let sum_rule_magnitude = low.value + high.value + 1.0 / (a - 1.0);

    let wr2 = wr * wr;
    let r0r = a / (COUPLING * omega_h);
    Ok(FiniteTachyonReport {
        a,
        b,
        omega_h,
        tachyon: TachyonReport {
            k_t,
            k_t_asymptote: 1.5 / r0r + 2.0 / 3.0 * r0r * wr2,
            r_t_derivative: magnitude / PI,
            r_t_integral: sum_rule_magnitude / PI,
            residue: -magnitude,
            c: 2.0 / 3.0 * r0r * wr,
        },
        k_t_near_threshold,
        residue_near_threshold: 1.0 / (a - 1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;
    use proptest::prelude::*;

    fn rel(x: f64, y: f64) -> f64 {
        ((x - y) / y).abs()
    }

    #[test]
    fn naive_inverse_propagator_values() {
        let p = make_params(0.1, 0.01).unwrap();
        assert!(rel(naive_inverse_g_r(1e-9, &p).re, -1e-4) < 1e-12);
        let at_res = naive_inverse_g_r(p.omega_r(), &p);
        assert_eq!(at_res.re, 0.0);
        assert!(rel(at_res.im, 2.0 / 3.0 * p.r0r() * 1e-6) < 1e-15);
    }

    #[test]
    fn naive_cubic_zero() {
        let n = NaiveLimit::new(0.0, 0.1).unwrap();
        assert_eq!(n.negative_axis(15.0), 0.0);
        let t = n.tachyon().unwrap();
        assert_eq!(t.k_t, 15.0);
        assert!(rel(PI * t.r_t_derivative, 2.0) < 1e-14);
        assert!(rel(PI * t.r_t_integral, 1.0) < 1e-12);
    }

    #[test]
    fn k_t_fixed_example() {
        let n = NaiveLimit::new(0.01, 0.1).unwrap();
        let t = n.tachyon().unwrap();
        assert!(rel(t.k_t, 15.000_006_666_666_667) < 1e-6);
        assert!(n.negative_axis(t.k_t * (1.0 - 1e-6)) < 0.0);
        assert!(n.negative_axis(t.k_t * (1.0 + 1e-6)) > 0.0);
        assert!(t.residue < 0.0);
    }

    #[test]
    fn residue_routes_agree() {
        for c in [0.001, 0.01, 0.1] {
            // c = (2/3) r Ω_r; choose r = 0.5
            let n = NaiveLimit::new(c / (2.0 / 3.0 * 0.5), 0.5).unwrap();
            let t = n.tachyon().unwrap();
            assert!(rel(t.c, c) < 1e-14);
            assert!(t.residue_agreement() < 1e-8, "c={c}: {t:?}");
        }
    }

    #[test]
    fn residue_curve_limits() {
        let pr = PI * tachyon_residue_integral(1e-3).unwrap();
        assert!((1.9..=2.0).contains(&pr), "{pr}");
        assert!(PI * tachyon_residue_integral(1e-4).unwrap() > 1.5);
        assert!(rel(PI * tachyon_residue_integral(0.0).unwrap(), 1.0) < 1e-12);
        let curve = tachyon_residue_curve(&[1e-3, 0.1, 1.0]).unwrap();
        assert!(curve[2].1.is_finite() && curve[2].1 < 2.0);
        assert!(curve.windows(2).all(|w| w[1].1 < w[0].1));
        let single = tachyon_residue_curve(&[0.3]).unwrap();
        assert_eq!(single[0].1, PI * tachyon_residue_integral(0.3).unwrap());
        assert!(tachyon_residue_curve(&[0.0]).is_err());
        assert!(tachyon_residue_curve(&[1.5]).is_err());
    }

    #[test]
    fn residue_integral_oracle_c_one() {
        // independent composite Simpson on a mapped variable x = t/(1 − t)
        let c: f64 = 1.0;
        let f = |x: f64| x.powi(4) / ((x * x - c * c).powi(2) + x.powi(6));
        let n = 200_000;
        let h = 1.0 / n as f64;
        let mut sum = 0.0;
        for i in 0..=n {
            let t = i as f64 * h;
            let g = if i == n { 1.0 } else { f(t / (1.0 - t)) / (1.0 - t).powi(2) };
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * g;
        }
        let oracle = 2.0 / (PI * PI) * sum * h / 3.0;
        assert!(rel(tachyon_residue_integral(c).unwrap(), oracle) < 1e-9);
    }

    #[test]
    fn finite_tachyon_sum_rule_matches_slope() {
        let r = tachyon_pole_finite(1.2, 0.01, 1.0).unwrap();
        assert!(rel(r.tachyon.k_t, 1.198_550_106_157_101) < 1e-10);
        assert!(rel(-r.tachyon.residue, 6.832_606_395) < 1e-8);
        assert!(r.tachyon.residue_agreement() < 1e-8, "{r:?}");
        assert!(rel(r.k_t_near_threshold, (0.4001f64 / 0.2).sqrt()) < 1e-15);
        let r = tachyon_pole_finite(1.01, 0.01, 2.0).unwrap();
        assert!(r.k_t_deviation() < 0.05);
        assert!(r.residue_deviation() < 0.05);
    }

    #[test]
    fn no_finite_tachyon_below_one() {
        for a in [0.5, 0.9, 0.99, 1.0] {
            assert!(matches!(tachyon_pole_finite(a, 0.01, 1.0), Err(Error::NoBracket { .. })));
        }
    }

    #[test]
    fn finite_approaches_naive() {
        let (r0r, omega_r) = (0.2, 0.05);
        let naive = NaiveLimit::new(omega_r, r0r).unwrap().tachyon().unwrap();
        let ks: Vec<f64> = [1.1, 2.0, 10.0, 100.0]
            .iter()
            .map(|&a| {
                let omega_h = a / (COUPLING * r0r);
                tachyon_pole_finite(a, omega_r / omega_h, omega_h).unwrap().tachyon.k_t
            })
            .collect();
        assert!(ks.windows(2).all(|w| w[1] < w[0]) || ks.windows(2).all(|w| w[1] > w[0]), "{ks:?}");
        assert!(rel(ks[3], naive.k_t) < 1e-2);
        assert!(rel(ks[3], naive.k_t) < rel(ks[2], naive.k_t));
    }

    proptest! {
        #[test]
        fn naive_root_properties(r in 1e-3f64..10.0, wr in 0.0f64..1.0) {
            let n = NaiveLimit::new(wr, r).unwrap();
            let t = n.tachyon().unwrap();
            prop_assert!(t.k_t > 0.0);
            prop_assert!(n.negative_axis(t.k_t).abs() <= 1e-12 * t.k_t * t.k_t);
            prop_assert!(t.r_t_derivative > 0.0 && t.r_t_integral > 0.0);
            prop_assert!(t.residue < 0.0);
        }

        #[test]
        fn no_tachyon_for_physical_a(a in 0.01f64..1.0, b in 0.0f64..0.9, lk in -4.0f64..6.0) {
            prop_assert!(finite_negative_axis(10f64.powf(lk), a, b, 1.0) < 0.0);
        }
    }
}
