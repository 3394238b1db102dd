//! Smooth cutoff functions K(ω) and the propagator they induce.
//!
//! Every family is exactly 1 below a flat-region edge `F` and decays beyond
//! it. Principal-value integrals `P∫₀^∞ K(ω')/(ω² − ω'²) dω'` are split at a
//! point inside the flat region: the part below is the closed-form logarithm,
//! the tail is integrated numerically.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{Quadrature, QuadratureResult};
use crate::params::{ModelParams, COUPLING};
use crate::sharp::{self, SumRuleReport};

/// Relative tolerance of the inner (per-frequency) tail integrals.
const INNER_REL_TOL: f64 = 1e-12;

/// How many widths below its center a tanh step is taken to be flat.
/// `(1 + tanh 20)/2` rounds to exactly 1.0 in double precision.
pub const TANH_FLAT_WIDTHS: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CutoffFunction {
    /// `K = 1` below ω_H, 0 above.
    Sharp { omega_h: f64 },
    /// `K = exp(−(ω − F)/w)` beyond the flat edge F.
    ExpTail { flat_edge: f64, width: f64 },
    /// `K = exp(−((ω − F)/w)²)` beyond the flat edge F.
    GaussTail { flat_edge: f64, width: f64 },
    /// `K = (1 − tanh((ω − c)/w))/2`.
    TanhStep { center: f64, width: f64 },
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
    }
}

impl CutoffFunction {
    pub fn sharp(omega_h: f64) -> Result<Self> {
        Ok(CutoffFunction::Sharp { omega_h: positive("omega_h", omega_h)? })
    }

    pub fn exp_tail(flat_edge: f64, width: f64) -> Result<Self> {
        Ok(CutoffFunction::ExpTail { flat_edge: positive("flat edge", flat_edge)?, width: positive("width", width)? })
    }

    pub fn gauss_tail(flat_edge: f64, width: f64) -> Result<Self> {
        Ok(CutoffFunction::GaussTail { flat_edge: positive("flat edge", flat_edge)?, width: positive("width", width)? })
    }

    /// Any positive center and width; scheme construction additionally needs
    /// `center > 20·width` so that K is exactly 1 near the origin.
    pub fn tanh_step(center: f64, width: f64) -> Result<Self> {
        Ok(CutoffFunction::TanhStep { center: positive("center", center)?, width: positive("width", width)? })
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            CutoffFunction::Sharp { .. } => "sharp",
            CutoffFunction::ExpTail { .. } => "exptail",
            CutoffFunction::GaussTail { .. } => "gausstail",
            CutoffFunction::TanhStep { .. } => "tanhstep",
        }
    }

    /// K(ω) for ω ≥ 0.
    pub fn value(&self, omega: f64) -> f64 {
        match *self {
            CutoffFunction::Sharp { omega_h } => {
                if omega < omega_h {
                    1.0
                } else {
                    0.0
                }
            }
            CutoffFunction::ExpTail { flat_edge, width } => {
                if omega <= flat_edge {
                    1.0
                } else {
                    (-(omega - flat_edge) / width).exp()
                }
            }
            CutoffFunction::GaussTail { flat_edge, width } => {
                if omega <= flat_edge {
                    1.0
                } else {
                    let x = (omega - flat_edge) / width;
                    (-x * x).exp()
                }
            }
            CutoffFunction::TanhStep { center, width } => 0.5 * (1.0 - ((omega - center) / width).tanh()),
        }
    }

    /// Largest frequency below which K is identically 1. Nonpositive for a
    /// tanh step too wide to be flat anywhere.
    pub fn flat_edge(&self) -> f64 {
        match *self {
            CutoffFunction::Sharp { omega_h } => omega_h,
            CutoffFunction::ExpTail { flat_edge, .. } | CutoffFunction::GaussTail { flat_edge, .. } => flat_edge,
            CutoffFunction::TanhStep { center, width } => center - TANH_FLAT_WIDTHS * width,
        }
    }

    /// Breakpoints on the scale over which the tail falls off.
    pub fn tail_points(&self) -> Vec<f64> {
        match *self {
            CutoffFunction::Sharp { .. } => Vec::new(),
            CutoffFunction::ExpTail { flat_edge, width } => {
                [0.5, 2.0, 5.0, 10.0, 20.0, 40.0].iter().map(|k| flat_edge + k * width).collect()
            }
            CutoffFunction::GaussTail { flat_edge, width } => {
                [0.5, 1.0, 2.0, 3.0, 4.5, 7.0].iter().map(|k| flat_edge + k * width).collect()
            }
            CutoffFunction::TanhStep { center, width } => [-10.0, -5.0, -2.0, 0.0, 2.0, 5.0, 10.0, 20.0]
                .iter()
                .map(|k| center + k * width)
                .collect(),
        }
    }

    /// Whether K vanishes identically beyond the flat edge.
    pub fn has_empty_tail(&self) -> bool {
        matches!(self, CutoffFunction::Sharp { .. })
    }

    /// The same shape with every frequency parameter multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            CutoffFunction::Sharp { omega_h } => CutoffFunction::Sharp { omega_h: omega_h * factor },
            CutoffFunction::ExpTail { flat_edge, width } => {
                CutoffFunction::ExpTail { flat_edge: flat_edge * factor, width: width * factor }
            }
            CutoffFunction::GaussTail { flat_edge, width } => {
                CutoffFunction::GaussTail { flat_edge: flat_edge * factor, width: width * factor }
            }
            CutoffFunction::TanhStep { center, width } => {
                CutoffFunction::TanhStep { center: center * factor, width: width * factor }
            }
        }
    }

    fn tail<Fun>(&self, q: &Quadrature, f: Fun, from: f64) -> Result<QuadratureResult>
    where
        Fun: FnMut(f64) -> f64,
    {
        if self.has_empty_tail() {
            return Ok(QuadratureResult { value: 0.0, error_estimate: 0.0, evaluations: 0 });
        }
        q.semi_infinite(f, from, &self.tail_points())
    }

    /// `∫₀^∞ K(ω) dω`.
    pub fn integral(&self) -> Result<f64> {
        let q = Quadrature::new(INNER_REL_TOL);
        let edge = self.flat_edge().max(0.0);
        Ok(edge + self.tail(&q, |x| self.value(x), edge)?.value)
    }

    /// `∫₀^∞ ω² K(ω) dω`, which must be finite.
    pub fn second_moment(&self) -> Result<f64> {
        let q = Quadrature::new(INNER_REL_TOL);
        let edge = self.flat_edge().max(0.0);
        Ok(edge.powi(3) / 3.0 + self.tail(&q, |x| x * x * self.value(x), edge)?.value)
    }

    /// The equivalent sharp cutoff, `1/ω_H = 1/ω'_H − ∫_{ω'_H}^∞ K(ω)/ω² dω`.
    ///
    /// `omega_prime_h` must lie in the flat region; the result does not depend
    /// on which admissible value is used.
    pub fn effective_omega_h(&self, omega_prime_h: f64) -> Result<f64> {
        let edge = self.flat_edge();
        if !(omega_prime_h > 0.0 && omega_prime_h <= edge) {
            return Err(Error::domain(format!(
                "omega'_H = {omega_prime_h} must lie in the flat region (0, {edge}] of K"
            )));
        }
        let q = Quadrature::new(INNER_REL_TOL);
        let flat = q.integrate(|x| 1.0 / (x * x), omega_prime_h, edge)?.value;
        let tail = self.tail(&q, |x| self.value(x) / (x * x), edge)?.value;
        Ok(1.0 / (1.0 / omega_prime_h - flat - tail))
    }

    /// Rescaled so that its effective sharp cutoff equals `omega_h`.
    pub fn normalized_to(&self, omega_h: f64) -> Result<Self> {
        let current = self.effective_omega_h(self.flat_edge())?;
        Ok(self.scaled(omega_h / current))
    }
}

impl fmt::Display for CutoffFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CutoffFunction::Sharp { omega_h } => write!(f, "sharp:{omega_h}"),
            CutoffFunction::ExpTail { flat_edge, width } => write!(f, "exptail:{flat_edge},{width}"),
            CutoffFunction::GaussTail { flat_edge, width } => write!(f, "gausstail:{flat_edge},{width}"),
            CutoffFunction::TanhStep { center, width } => write!(f, "tanhstep:{center},{width}"),
        }
    }
}

impl FromStr for CutoffFunction {
    type Err = Error;

    /// Parses `family:param1,param2`, e.g. `exptail:1.0,0.1` or `sharp:1`.
    fn from_str(s: &str) -> Result<Self> {
        let (family, args) = s.split_once(':').unwrap_or((s, ""));
        let params = args
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<f64>().map_err(|_| Error::domain(format!("bad number {t:?} in cutoff {s:?}"))))
            .collect::<Result<Vec<f64>>>()?;
        let expect = |n: usize| {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::domain(format!("cutoff family {family:?} takes {n} parameter(s), got {}", params.len())))
            }
        };
        match family.trim().to_ascii_lowercase().as_str() {
            "sharp" => {
                if params.is_empty() {
                    return CutoffFunction::sharp(1.0);
                }
                expect(1)?;
                CutoffFunction::sharp(params[0])
            }
            "exptail" => {
                expect(2)?;
                CutoffFunction::exp_tail(params[0], params[1])
            }
            "gausstail" => {
                expect(2)?;
                CutoffFunction::gauss_tail(params[0], params[1])
            }
            "tanhstep" => {
                expect(2)?;
                CutoffFunction::tanh_step(params[0], params[1])
            }
            other => Err(Error::domain(format!(
                "unknown cutoff family {other:?} (expected sharp, exptail, gausstail or tanhstep)"
            ))),
        }
    }
}

pub fn k_value(k: &CutoffFunction, omega: f64) -> f64 {
    k.value(omega)
}

/// A cutoff function together with the renormalization constants it induces
/// for a given r₀,ᵣ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothScheme {
    pub k: CutoffFunction,
    pub r0r: f64,
    /// `∫₀^∞ K`.
    pub k_integral: f64,
    /// `Δz = (4r₀/3π)∫K`, recovered from `a_K = Δz/(1 + Δz)`.
    pub delta_z: f64,
    /// `a_K = (4/3π) r₀,ᵣ ∫K`.
    pub a_k: f64,
    pub omega_h_eff: f64,
}

pub fn build_scheme(k: CutoffFunction, r0r: f64) -> Result<SmoothScheme> {
    let r0r = positive("r0r", r0r)?;
    if k.flat_edge() <= 0.0 {
        return Err(Error::domain(format!("cutoff {k} has no flat low-frequency region")));
    }
    let k_integral = k.integral()?;
    let a_k = COUPLING * r0r * k_integral;
    if a_k >= 1.0 {
        return Err(Error::domain(format!(
            "a_K = {a_k} >= 1: no bare theory has this r0r with cutoff {k}"
        )));
    }
    Ok(SmoothScheme {
        k,
        r0r,
        k_integral,
        delta_z: a_k / (1.0 - a_k),
        a_k,
        omega_h_eff: k.effective_omega_h(k.flat_edge())?,
    })
}

impl SmoothScheme {
    fn check(&self, p: &ModelParams) -> Result<()> {
        if ((self.r0r - p.r0r()) / p.r0r()).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "scheme was built for r0r = {}, parameters have r0r = {}",
                self.r0r,
                p.r0r()
            )));
        }
        Ok(())
    }

    /// `P∫₀^∞ K(ω')/(ω² − ω'²) dω'`.
    pub fn pv_integral(&self, omega: f64) -> Result<f64> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::domain(format!("omega must be positive, got {omega}")));
        }
        let k = &self.k;
        let edge = k.flat_edge();
        if k.has_empty_tail() {
            if omega == edge {
                return Err(Error::domain("principal value diverges at the sharp cutoff"));
            }
            return Ok(((edge + omega) / (edge - omega).abs()).ln() / (2.0 * omega));
        }

        // keep the split point away from ω; K = 1 anywhere below the edge
        let split = if (omega - edge).abs() < 0.01 * edge { 0.95 * edge } else { edge };
        let flat = ((split + omega) / (split - omega).abs()).ln() / (2.0 * omega);
        // the tail is a correction to `flat`; resolve it relative to the sum
        let q = Quadrature::new(INNER_REL_TOL).with_abs_tol(1e-2 * INNER_REL_TOL * flat.abs());
        let kernel = |x: f64| k.value(x) / ((omega - x) * (omega + x));
        let points = k.tail_points();

        let tail = if omega < split {
            q.semi_infinite(kernel, split, &points)?.value
        } else {
            // 1/(ω² − x²) = f(x)/(x − ω) with f(x) = −K(x)/(x + ω)
            let delta = 0.5 * (omega - split);
            let f = |x: f64| -k.value(x) / (x + omega);
            let f_pole = f(omega);
            let mut window_points = points.clone();
            window_points.push(omega);
            let window =
                q.integrate_points(|x| (f(x) - f_pole) / (x - omega), omega - delta, omega + delta, &window_points)?;
            let left = q.integrate_points(kernel, split, omega - delta, &points)?;
            let right = q.semi_infinite(kernel, omega + delta, &points)?;
            window.value + left.value + right.value
        };
        Ok(flat + tail)
    }
}

/// `b_ω = ω² − Ω_r² − ω⁴ (4/3π) r₀,ᵣ P∫₀^∞ K(ω')/(ω² − ω'²) dω'`, the real part of `1/G_r`.
pub fn b_omega(omega: f64, p: &ModelParams, s: &SmoothScheme) -> Result<f64> {
    s.check(p)?;
    let wr = p.omega_r();
    Ok(omega * omega - wr * wr - omega.powi(4) * COUPLING * p.r0r() * s.pv_integral(omega)?)
}

/// `1/G_r(ω² + iε) = b_ω + i (2/3) r₀,ᵣ ω³ K(ω)`.
pub fn inverse_g_r_smooth(omega: f64, p: &ModelParams, s: &SmoothScheme) -> Result<Complex64> {
    let re = b_omega(omega, p, s)?;
    Ok(Complex64::new(re, 2.0 / 3.0 * p.r0r() * omega.powi(3) * s.k.value(omega)))
}

pub fn spectral_density_smooth(sv: f64, p: &ModelParams, s: &SmoothScheme) -> Result<f64> {
    if !(sv.is_finite() && sv > 0.0) {
        return Err(Error::domain(format!("s must be positive, got {sv}")));
    }
    let kv = s.k.value(sv);
    if kv == 0.0 {
        return Ok(0.0);
    }
    let b = b_omega(sv, p, s)?;
    let weight = sv.powi(4) * COUPLING * p.r0r() * kv;
    let im = weight * PI / (2.0 * sv);
    Ok(weight / (b * b + im * im))
}

/// `1/G_r(−k²) = −k² − Ω_r² + k⁴ (4/3π) r₀,ᵣ ∫₀^∞ K(ω')/(k² + ω'²) dω'`.
pub fn inverse_g_r_smooth_negative_axis(k: f64, p: &ModelParams, s: &SmoothScheme) -> Result<f64> {
    s.check(p)?;
    if k.is_nan() || k <= 0.0 {
        return Err(Error::domain(format!("k must be positive, got {k}")));
    }
    let edge = s.k.flat_edge();
    let q = Quadrature::new(INNER_REL_TOL);
    let tail = s.k.tail(&q, |x| s.k.value(x) / (k * k + x * x), edge)?.value;
    let integral = (edge / k).atan() / k + tail;
    let wr = p.omega_r();
    Ok(-k * k - wr * wr + k.powi(4) * COUPLING * p.r0r() * integral)
}

/// Effective sharp cutoff of the scheme for a chosen ω'_H in the flat region.
pub fn effective_omega_h(s: &SmoothScheme, omega_prime_h: f64) -> Result<f64> {
    s.k.effective_omega_h(omega_prime_h)
}

/// Breakpoints for integrals of the smooth spectral density over (0, ∞).
pub(crate) fn spectral_points(p: &ModelParams, s: &SmoothScheme) -> Vec<f64> {
    let mut pts = sharp::resonance_points(p);
    pts.push(s.k.flat_edge());
    pts.extend(s.k.tail_points());
    pts
}

/// `∫₀^∞ ρ(s) ds = 1/(1 − a_K)`. For the sharp family the bound-state pole
/// weight r_b is added, as in the sharp-cutoff sum rule.
pub fn spectral_sum_rule_smooth(p: &ModelParams, s: &SmoothScheme, rel_tol: f64) -> Result<SumRuleReport> {
    s.check(p)?;
    let q = Quadrature::new(rel_tol);
    let edge = s.k.flat_edge();
    let points = spectral_points(p, s);
    let low = q.try_integrate(|x| spectral_density_smooth(x, p, s), 0.0, edge, &points)?;
    let (integral, pole_weight) = if s.k.has_empty_tail() {
        (low, sharp::bound_state_pole(&p.at_cutoff(edge)?)?.residue)
    } else {
        let high = q.try_semi_infinite(|x| spectral_density_smooth(x, p, s), edge, &points)?;
        (low.combine(high), 0.0)
    };
    let mut report = SumRuleReport::new(integral, pole_weight, 1.0 / (1.0 - s.a_k), rel_tol);
    report.probability_sum = Some((1.0 - s.a_k) * report.total);
    Ok(report)
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
    fn family_values() {
        let sharp = CutoffFunction::sharp(1.0).unwrap();
        assert_eq!(sharp.value(0.5), 1.0);
        assert_eq!(sharp.value(1.5), 0.0);

        let exp = CutoffFunction::exp_tail(1.0, 0.1).unwrap();
        assert_eq!(exp.value(1.0), 1.0);
        assert!((exp.value(1.2) - (-2f64).exp()).abs() < 1e-15);
        assert!((exp.value(1.2) - 0.135_34).abs() < 1e-5);

        let tanh = CutoffFunction::tanh_step(1.0, 0.05).unwrap();
        assert!((tanh.value(1.0) - 0.5).abs() < 1e-15);
        let tanh = CutoffFunction::tanh_step(1.0, 0.04).unwrap();
        assert_eq!(tanh.value(tanh.flat_edge()), 1.0);
        assert_eq!(tanh.value(0.0), 1.0);
    }

    #[test]
    fn parse_and_display() {
        let k: CutoffFunction = "exptail:1.0,0.1".parse().unwrap();
        assert_eq!(k, CutoffFunction::ExpTail { flat_edge: 1.0, width: 0.1 });
        assert_eq!(k.to_string().parse::<CutoffFunction>().unwrap(), k);
        assert_eq!("sharp".parse::<CutoffFunction>().unwrap(), CutoffFunction::Sharp { omega_h: 1.0 });
        assert!("exptail:1.0".parse::<CutoffFunction>().is_err());
        assert!("box:1,2".parse::<CutoffFunction>().is_err());
        assert!("gausstail:1,x".parse::<CutoffFunction>().is_err());
        let wide: CutoffFunction = "tanhstep:1,0.1".parse().unwrap();
        assert!(matches!(build_scheme(wide, 0.1), Err(Error::Domain(_))));
        assert!(matches!(wide.effective_omega_h(0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn k_integrals() {
        let exp = CutoffFunction::exp_tail(1.0, 0.1).unwrap();
        assert!(rel(exp.integral().unwrap(), 1.1) < 1e-12);
        let gauss = CutoffFunction::gauss_tail(1.0, 0.2).unwrap();
        assert!(rel(gauss.integral().unwrap(), 1.0 + 0.2 * PI.sqrt() / 2.0) < 1e-12);
        let tanh = CutoffFunction::tanh_step(2.0, 0.05).unwrap();
        // ∫₀^∞ (1 − tanh((x−c)/w))/2 dx = (w/2) ln(1 + e^{2c/w}) ≈ c for c ≫ w
        assert!(rel(tanh.integral().unwrap(), 2.0) < 1e-12);
        assert!(CutoffFunction::exp_tail(1.0, 0.3).unwrap().second_moment().unwrap().is_finite());
    }

    #[test]
    fn scheme_constants() {
        let r0r = 0.2;
        let s = build_scheme(CutoffFunction::sharp(1.0).unwrap(), r0r).unwrap();
        assert!(rel(s.a_k, COUPLING * r0r) < 1e-15);
        let s = build_scheme(CutoffFunction::exp_tail(1.0, 0.1).unwrap(), r0r).unwrap();
        assert!(rel(s.a_k, COUPLING * r0r * 1.1) < 1e-12);
        assert!(rel(s.a_k, s.delta_z / (1.0 + s.delta_z)) < 1e-14);
        let s = build_scheme(CutoffFunction::exp_tail(1.0, 0.1).unwrap(), 1e-15).unwrap();
        assert!(s.a_k < 1e-14);
        assert!(matches!(
            build_scheme(CutoffFunction::exp_tail(1.0, 0.1).unwrap(), 3.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn sharp_scheme_reduces_to_sharp_module() {
        let p = make_params(0.3, 0.05).unwrap();
        let s = build_scheme(CutoffFunction::sharp(1.0).unwrap(), p.r0r()).unwrap();
        for w in [1e-3, 0.05, 0.4, 0.9, 0.999, 1.2, 3.0] {
            let smooth = inverse_g_r_smooth(w, &p, &s).unwrap();
            let exact = sharp::inverse_g_r(w, &p).unwrap();
            assert!(rel(smooth.re, exact.re) < 1e-12, "w={w}");
            if w < 1.0 {
                assert!(rel(smooth.im, exact.im) < 1e-12);
                let rho = spectral_density_smooth(w, &p, &s).unwrap();
                assert!(rel(rho, sharp::spectral_density(w, &p).unwrap()) < 1e-12);
            } else {
                assert_eq!(smooth.im, 0.0);
            }
        }
        for k in [0.1, 1.0, 7.0] {
            let smooth = inverse_g_r_smooth_negative_axis(k, &p, &s).unwrap();
            assert!(rel(smooth, sharp::inverse_g_r_negative_axis(k, &p)) < 1e-12);
        }
        assert!(rel(s.omega_h_eff, 1.0) < 1e-12);
    }

    #[test]
    fn b_omega_limits() {
        let p = make_params(0.1, 0.01).unwrap();
        let s = build_scheme(CutoffFunction::exp_tail(1.0, 0.2).unwrap(), p.r0r()).unwrap();
        assert!(rel(b_omega(1e-6, &p, &s).unwrap(), -1e-4) < 1e-7);
        // ω ≪ ω'_H: b ≈ ω² − Ω_r² − ω⁴ (4/3π) r₀,ᵣ / ω_H,eff
        let w: f64 = 0.05;
        let approx = w * w - 1e-4 - w.powi(4) * COUPLING * p.r0r() / s.omega_h_eff;
        let exact = b_omega(w, &p, &s).unwrap();
        assert!(((exact - approx) / (w.powi(4) * COUPLING * p.r0r())).abs() < 10.0 * w * w);
    }

    #[test]
    fn imaginary_part_branches() {
        let p = make_params(0.1, 0.01).unwrap();
        let s = build_scheme(CutoffFunction::exp_tail(1.0, 0.1).unwrap(), p.r0r()).unwrap();
        let g = inverse_g_r_smooth(0.5, &p, &s).unwrap();
        assert!(rel(g.im, 2.0 / 3.0 * p.r0r() * 0.125) < 1e-15);
        let g = inverse_g_r_smooth(200.0, &p, &s).unwrap();
        assert_eq!(g.im, 0.0);
        assert_eq!(spectral_density_smooth(200.0, &p, &s).unwrap(), 0.0);
    }

    #[test]
    fn high_frequency_asymptote() {
        let p = make_params(0.3, 0.01).unwrap();
        let s = build_scheme(CutoffFunction::gauss_tail(1.0, 0.2).unwrap(), p.r0r()).unwrap();
        let w = 300.0;
        let g = inverse_g_r_smooth(w, &p, &s).unwrap().inv();
        assert!(rel(w * w * g.re, 1.0 / (1.0 - s.a_k)) < 1e-4);
    }

    #[test]
    fn pv_continuous_across_split_switch() {
        let s = build_scheme(CutoffFunction::exp_tail(1.0, 0.1).unwrap(), 0.1).unwrap();
        let below = s.pv_integral(0.99 - 1e-9).unwrap();
        let above = s.pv_integral(0.99 + 1e-9).unwrap();
        assert!((below - above).abs() < 1e-7, "{below} {above}");
        let below = s.pv_integral(1.01 - 1e-9).unwrap();
        let above = s.pv_integral(1.01 + 1e-9).unwrap();
        assert!((below - above).abs() < 1e-7, "{below} {above}");
    }

    #[test]
    fn pv_matches_direct_kernel_integral() {
        // for ω beyond the support of a narrow tail, the tail integrand is regular
        let s = build_scheme(CutoffFunction::gauss_tail(1.0, 0.05).unwrap(), 0.1).unwrap();
        let w: f64 = 3.0;
        let q = Quadrature::new(1e-13);
        let direct = 1.0 / (2.0 * w) * ((w + 1.0) / (w - 1.0)).ln()
            + q.integrate(|x| s.k.value(x) / (w * w - x * x), 1.0, 2.0).unwrap().value;
        assert!(rel(s.pv_integral(w).unwrap(), direct) < 1e-11);
    }

    #[test]
    fn effective_cutoff_examples() {
        let sharp = CutoffFunction::sharp(1.0).unwrap();
        for wp in [0.2, 0.7, 1.0] {
            assert!(rel(sharp.effective_omega_h(wp).unwrap(), 1.0) < 1e-13);
        }
        let exp = CutoffFunction::exp_tail(1.0, 0.1).unwrap();
        let a = exp.effective_omega_h(1.0).unwrap();
        let b = exp.effective_omega_h(0.9).unwrap();
        assert!(rel(a, b) < 1e-10);
        // oracle: 1/ω_H = 1 − ∫₁^∞ e^{−(x−1)/w}/x² dx on a long finite range
        let tail = crate::numerics::integrate(|x| (-(x - 1.0) / 0.1).exp() / (x * x), 1.0, 10.0, 1e-13).unwrap();
        assert!(rel(a, 1.0 / (1.0 - tail.value)) < 1e-11);
        assert!(a > 1.0);

        let narrow = CutoffFunction::exp_tail(1.0, 1e-6).unwrap();
        assert!(rel(narrow.effective_omega_h(1.0).unwrap(), 1.0) < 2e-6);

        assert!(matches!(exp.effective_omega_h(1.05), Err(Error::Domain(_))));
    }

    #[test]
    fn smooth_sum_rule() {
        let p = make_params(0.1, 0.01).unwrap();
        let s = build_scheme(CutoffFunction::exp_tail(1.0, 0.2).unwrap(), p.r0r()).unwrap();
        let r = spectral_sum_rule_smooth(&p, &s, 1e-10).unwrap();
        assert!(r.relative_deviation < 1e-6, "{r:?}");
    }

    #[test]
    fn resonance_peak_matches_sharp_value() {
        let p = make_params(0.1, 0.01).unwrap();
        let s = build_scheme(CutoffFunction::tanh_step(1.2, 0.02).unwrap(), p.r0r()).unwrap();
        let re = |w: f64| b_omega(w, &p, &s).unwrap();
        let root = crate::numerics::find_root(re, 0.5 * p.omega_r(), 1.5 * p.omega_r(), 1e-16).unwrap();
        let w = root.root;
        let peak = spectral_density_smooth(w, &p, &s).unwrap();
        assert!(rel(peak, 4.0 / (PI * PI * p.a() * w * w)) < 1e-6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn a_k_subcritical_from_bare(r0 in 1e-4f64..50.0, edge in 0.2f64..3.0, width in 0.01f64..0.5, fam in 0usize..4) {
            let k = match fam {
                0 => CutoffFunction::sharp(edge).unwrap(),
                1 => CutoffFunction::exp_tail(edge, width).unwrap(),
                2 => CutoffFunction::gauss_tail(edge, width).unwrap(),
                _ => CutoffFunction::tanh_step(edge + 20.0 * width, width).unwrap(),
            };
            let dz = COUPLING * r0 * k.integral().unwrap();
            let r0r = r0 / (1.0 + dz);
            let s = build_scheme(k, r0r).unwrap();
            prop_assert!(s.a_k < 1.0);
            prop_assert!(rel(s.delta_z, dz) < 1e-9);
        }

        #[test]
        fn no_negative_axis_pole(a in 0.01f64..0.99, b in 0.001f64..0.5, lk in -4.0f64..4.0, fam in 1usize..4) {
            let p = make_params(a, b).unwrap();
            let k = match fam {
                1 => CutoffFunction::exp_tail(0.8, 0.2).unwrap(),
                2 => CutoffFunction::gauss_tail(0.8, 0.3).unwrap(),
                _ => CutoffFunction::tanh_step(1.0, 0.02).unwrap(),
            };
            if let Ok(s) = build_scheme(k, p.r0r()) {
                prop_assert!(inverse_g_r_smooth_negative_axis(10f64.powf(lk), &p, &s).unwrap() < 0.0);
            }
        }

        #[test]
        fn k_bounded(w in 0.0f64..10.0) {
            for k in [
                CutoffFunction::sharp(1.0).unwrap(),
                CutoffFunction::exp_tail(1.0, 0.3).unwrap(),
                CutoffFunction::gauss_tail(1.0, 0.3).unwrap(),
                CutoffFunction::tanh_step(1.0, 0.04).unwrap(),
            ] {
                let v = k.value(w);
                prop_assert!((0.0..=1.0).contains(&v));
                if w <= k.flat_edge() {
                    prop_assert_eq!(v, 1.0);
                }
            }
        }
    }
}
