//! Globally adaptive 15-point Gauss-Kronrod quadrature.
//!
//! The error estimate follows QUADPACK's `qk15`: the Kronrod/Gauss difference
//! rescaled by the integrand's variation, floored at rounding level. The
//! interval with the largest estimate is bisected until the summed estimate
//! meets the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Default relative tolerance for all quadratures.
pub const DEFAULT_REL_TOL: f64 = 1e-10;
/// Maximum bisection depth of any single interval.
pub const DEFAULT_MAX_DEPTH: u32 = 60;
const DEFAULT_MAX_INTERVALS: usize = 20_000;

// 15-point Kronrod nodes and weights as tabulated by QUADPACK, kept to their published digits.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights belong to the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl QuadratureResult {
    fn zero() -> Self {
        QuadratureResult { value: 0.0, error_estimate: 0.0, evaluations: 0 }
    }

    /// Sum of two partial results.
    pub fn combine(self, other: QuadratureResult) -> QuadratureResult {
        QuadratureResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
        }
    }

    pub fn scaled(self, factor: f64) -> QuadratureResult {
        QuadratureResult {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs(),
            evaluations: self.evaluations,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    abs_value: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn checked<F>(f: &mut F, x: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let v = f(x)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { x, value: v })
    }
}

fn kronrod15<F>(f: &mut F, lo: f64, hi: f64, depth: u32) -> Result<Segment>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = checked(f, center)?;
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = checked(f, center - dx)?;
        let f2 = checked(f, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Segment { lo, hi, value, error, abs_value: resabs, depth })
}

/// Configuration of the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            rel_tol: DEFAULT_REL_TOL,
            abs_tol: 0.0,
            max_depth: DEFAULT_MAX_DEPTH,
            max_intervals: DEFAULT_MAX_INTERVALS,
        }
    }
}

impl Quadrature {
    pub fn new(rel_tol: f64) -> Self {
        Quadrature { rel_tol, ..Default::default() }
    }

    pub fn with_abs_tol(self, abs_tol: f64) -> Self {
        Quadrature { abs_tol, ..self }
    }

    /// Integrates a fallible integrand over `[lo, hi]`, splitting first at `points`.
    ///
    /// Breakpoints outside `(lo, hi)` are ignored. The integrand is never
    /// evaluated at the endpoints or at breakpoints, so integrable endpoint
    /// singularities are allowed.
    pub fn try_integrate<F>(&self, mut f: F, lo: f64, hi: f64, points: &[f64]) -> Result<QuadratureResult>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::domain(format!("integration bounds must be finite: [{lo}, {hi}]")));
        }
        if lo == hi {
            return Ok(QuadratureResult::zero());
        }
        if lo > hi {
            return Ok(self.try_integrate(f, hi, lo, points)?.scaled(-1.0));
        }
        let mut edges: Vec<f64> = points.iter().copied().filter(|&x| x > lo && x < hi).collect();
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        edges.insert(0, lo);
        edges.push(hi);

        let mut heap = BinaryHeap::new();
        let mut frozen: Vec<Segment> = Vec::new();
        let mut evaluations = 0;
        let mut total = 0.0;
        let mut total_err = 0.0;
        let mut total_abs = 0.0;
        for w in edges.windows(2) {
            let seg = kronrod15(&mut f, w[0], w[1], 0)?;
            evaluations += 15;
            total += seg.value;
            total_err += seg.error;
            total_abs += seg.abs_value;
            heap.push(seg);
        }

        let tolerance = |total: f64, total_abs: f64| {
            self.abs_tol
                .max(self.rel_tol * total.abs())
                .max(100.0 * f64::EPSILON * total_abs)
        };

        while total_err > tolerance(total, total_abs) {
            if heap.len() + frozen.len() >= self.max_intervals {
                return Err(Error::Convergence {
                    value: total,
                    error_estimate: total_err,
                    tolerance: tolerance(total, total_abs),
                });
            }
            let Some(seg) = heap.pop() else {
                return Err(Error::Convergence {
                    value: total,
                    error_estimate: total_err,
                    tolerance: tolerance(total, total_abs),
                });
            };
            let mid = 0.5 * (seg.lo + seg.hi);
            if seg.depth >= self.max_depth || mid <= seg.lo || mid >= seg.hi {
                frozen.push(seg);
                continue;
            }
            let left = kronrod15(&mut f, seg.lo, mid, seg.depth + 1)?;
            let right = kronrod15(&mut f, mid, seg.hi, seg.depth + 1)?;
            evaluations += 30;
            total += left.value + right.value - seg.value;
            total_err += left.error + right.error - seg.error;
            total_abs += left.abs_value + right.abs_value - seg.abs_value;
            heap.push(left);
            heap.push(right);
        }

        // resum to shed the drift of the running updates
        let all = heap.iter().chain(frozen.iter());
        let (value, error_estimate) = all.fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        Ok(QuadratureResult { value, error_estimate, evaluations })
    }

    pub fn integrate<F>(&self, mut f: F, lo: f64, hi: f64) -> Result<QuadratureResult>
    where
        F: FnMut(f64) -> f64,
    {
        self.try_integrate(|x| Ok(f(x)), lo, hi, &[])
    }

    pub fn integrate_points<F>(&self, mut f: F, lo: f64, hi: f64, points: &[f64]) -> Result<QuadratureResult>
    where
        F: FnMut(f64) -> f64,
    {
        self.try_integrate(|x| Ok(f(x)), lo, hi, points)
    }

    /// Integrates over `[lo, ∞)`.
    ///
    /// For `lo > 0` the substitution `x = lo/t` maps the range onto `(0, 1]`;
    /// otherwise `[lo, 1]` is integrated directly and `[1, ∞)` is mapped. The
    /// integrand must decay faster than `1/x`; callers check this.
    pub fn try_semi_infinite<F>(&self, mut f: F, lo: f64, points: &[f64]) -> Result<QuadratureResult>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        if !lo.is_finite() {
            return Err(Error::domain("lower bound of a semi-infinite integral must be finite"));
        }
        let (anchor, finite) = if lo > 0.0 {
            (lo, QuadratureResult::zero())
        } else {
            (1.0, self.try_integrate(&mut f, lo, 1.0, points)?)
        };
        let mapped: Vec<f64> = points.iter().filter(|&&x| x > anchor).map(|&x| anchor / x).collect();
        let tail = self.try_integrate(
            |t| {
                let x = anchor / t;
                if x.is_infinite() {
                    return Ok(0.0);
                }
                let v = f(x)?;
                Ok(if v == 0.0 { 0.0 } else { v * anchor / (t * t) })
            },
            0.0,
            1.0,
            &mapped,
        )?;
        Ok(finite.combine(tail))
    }

    pub fn semi_infinite<F>(&self, mut f: F, lo: f64, points: &[f64]) -> Result<QuadratureResult>
    where
        F: FnMut(f64) -> f64,
    {
        self.try_semi_infinite(|x| Ok(f(x)), lo, points)
    }

    /// Cauchy principal value of `∫ f(x)/(x − s0) dx` over `[lo, hi]` with an
    /// explicit excision half-width `delta`.
    ///
    /// Outside `|x − s0| < delta` the integrand is integrated as given. Inside,
    /// the symmetric window makes `f(s0) ∫ dx/(x − s0)` vanish, leaving the
    /// regular difference quotient `(f(x) − f(s0))/(x − s0)`.
    pub fn principal_value_excised<F>(
        &self,
        mut f: F,
        s0: f64,
        lo: f64,
        hi: f64,
        delta: f64,
    ) -> Result<QuadratureResult>
    where
        F: FnMut(f64) -> f64,
    {
        if !(lo < s0 && s0 < hi) {
            return Err(Error::domain(format!("pole {s0} must lie strictly inside ({lo}, {hi})")));
        }
        let reach = (s0 - lo).min(hi - s0);
        if !(delta > 0.0 && delta <= reach) {
            return Err(Error::domain(format!("excision half-width {delta} must lie in (0, {reach}]")));
        }
        let f_pole = f(s0);
        if !f_pole.is_finite() {
            return Err(Error::NonFinite { x: s0, value: f_pole });
        }
        let window = self.integrate_points(|x| (f(x) - f_pole) / (x - s0), s0 - delta, s0 + delta, &[s0])?;
        let left = self.integrate(|x| f(x) / (x - s0), lo, s0 - delta)?;
        let right = self.integrate(|x| f(x) / (x - s0), s0 + delta, hi)?;
        Ok(window.combine(left).combine(right))
    }

    /// Principal value with the excision half-width set to half the distance
    /// from `s0` to the nearer endpoint.
    pub fn principal_value<F>(&self, f: F, s0: f64, lo: f64, hi: f64) -> Result<QuadratureResult>
    where
        F: FnMut(f64) -> f64,
    {
        let delta = 0.5 * (s0 - lo).min(hi - s0);
        self.principal_value_excised(f, s0, lo, hi, delta)
    }
}

pub fn integrate<F>(f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    Quadrature::new(rel_tol).integrate(f, lo, hi)
}

pub fn integrate_semi_infinite<F>(f: F, lo: f64, rel_tol: f64) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    Quadrature::new(rel_tol).semi_infinite(f, lo, &[])
}

/// `P ∫_lo^hi f(x)/(x − s0) dx`.
pub fn principal_value<F>(f: F, s0: f64, lo: f64, hi: f64, rel_tol: f64) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    Quadrature::new(rel_tol).principal_value(f, s0, lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn polynomial() {
        let r = integrate(|x| x * x, 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
        assert!(r.error_estimate >= 0.0);
        assert!(r.evaluations > 0);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let r = integrate(|x| x.exp(), 1.0, 0.0, 1e-12).unwrap();
        assert!((r.value + (1f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn log_endpoint_singularity() {
        // ∫₀¹ s ln(1/(1−s)) ds = Σ_{n≥1} 1/(n(n+2)) = 3/4
        let series: f64 = (1..200_000).map(|n| 1.0 / (n as f64 * (n as f64 + 2.0))).sum();
        let tail_bound = 1.0 / 200_000.0;
        assert!((series - 0.75).abs() < tail_bound);
        let r = integrate(|s| -s * (1.0 - s).ln(), 0.0, 1.0, 1e-10).unwrap();
        assert!((r.value - 0.75).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn gamma_three_tail() {
        let r = integrate_semi_infinite(|x| (-x).exp() * x * x, 0.0, 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10, "{}", r.value);
        let r = integrate_semi_infinite(|x| 1.0 / (x * x), 2.0, 1e-12).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let err = integrate(|x| 1.0 / (x - 0.5), 0.0, 1.0, 1e-10).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn exhausted_budget_is_convergence_error() {
        let q = Quadrature { max_intervals: 4, ..Quadrature::new(1e-14) };
        let err = q.integrate(|x| (50.0 * x).sin().abs().sqrt(), 0.0, 10.0).unwrap_err();
        assert!(matches!(err, Error::Convergence { .. }));
    }

    #[test]
    fn pv_log_closed_form() {
        // P∫₀^{ω_H} dω'/(ω² − ω'²) = (1/2ω) ln((ω_H+ω)/(ω_H−ω)), ω = 1, ω_H = 2
        let omega = 1.0;
        let r = principal_value(|x| -1.0 / (x + omega), omega, 0.0, 2.0, 1e-12).unwrap();
        assert!((r.value - 0.5 * 3f64.ln()).abs() < 1e-11, "{}", r.value);
        assert!((r.value - 0.549_306).abs() < 1e-6);
    }

    #[test]
    fn pv_odd_symmetry() {
        let r = Quadrature::new(1e-12).with_abs_tol(1e-14).principal_value(|_| 1.0, 0.0, -1.0, 1.0).unwrap();
        assert!(r.value.abs() < 1e-14);
    }

    #[test]
    fn pv_half_omega() {
        // ω = 0.5, ω_H = 1: (1/(2·0.5)) ln 3
        let r = principal_value(|x| -1.0 / (x + 0.5), 0.5, 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 3f64.ln()).abs() < 1e-11);
        assert!((r.value - 1.098_612).abs() < 1e-6);
    }

    #[test]
    fn pv_rejects_outside_pole() {
        assert!(matches!(
            principal_value(|_| 1.0, 2.0, 0.0, 1.0, 1e-10),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn pv_excision_independence() {
        let q = Quadrature::new(1e-12);
        let f = |x: f64| -1.0 / (x + 0.8);
        let narrow = q.principal_value_excised(f, 0.8, 0.0, 1.0, 0.05).unwrap();
        let wide = q.principal_value_excised(f, 0.8, 0.0, 1.0, 0.1).unwrap();
        let err = narrow.error_estimate.max(wide.error_estimate);
        assert!((narrow.value - wide.value).abs() < err, "{} vs {}", narrow.value, wide.value);
        let exact = (1.8f64 / 0.2).ln() / 1.6;
        assert!((narrow.value - exact).abs() < 1e-11);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn error_estimate_bounds_true_error(
            c0 in -3.0f64..3.0, c1 in -3.0f64..3.0, c2 in -3.0f64..3.0, c3 in -3.0f64..3.0,
            k in -4.0f64..4.0, lo in -2.0f64..0.0, width in 0.1f64..5.0,
        ) {
            let hi = lo + width;
            let f = |x: f64| c0 + c1 * x + c2 * x * x + c3 * x * x * x + (k * x).exp();
            let anti = |x: f64| {
                let e = if k == 0.0 { x } else { (k * x).exp() / k };
                c0 * x + c1 * x * x / 2.0 + c2 * x.powi(3) / 3.0 + c3 * x.powi(4) / 4.0 + e
            };
            let exact = anti(hi) - anti(lo);
            let r = integrate(f, lo, hi, 1e-10).unwrap();
            let scale = exact.abs().max(1.0);
            prop_assert!((r.value - exact).abs() <= r.error_estimate + 1e-14 * scale,
                "value {} exact {} est {}", r.value, exact, r.error_estimate);
        }
    }
}
