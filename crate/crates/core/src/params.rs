//! Model parameters and the maps between bare and renormalized parameter sets.
//!
//! Renormalized parameters are stored in the dimensionless form
//! `a = (4/3π) r₀,ᵣ ω_H` and `b = Ω_r / ω_H` together with the cutoff
//! frequency. Units are ℏ = c = 1; frequencies and inverse lengths share a unit.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// `4/(3π)`, the coupling prefactor of the photon self-energy integral.
pub const COUPLING: f64 = 4.0 / (3.0 * PI);

/// Bare oscillator parameters: frequency Ω, length r₀ = e²/(4πm) and cutoff ω_H.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BareParams {
    pub omega0: f64,
    pub r0: f64,
    pub omega_h: f64,
}

impl BareParams {
    pub fn new(omega0: f64, r0: f64, omega_h: f64) -> Result<Self> {
        for (name, v) in [("omega0", omega0), ("r0", r0), ("omega_h", omega_h)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(BareParams { omega0, r0, omega_h })
    }

    /// The wave-function renormalization shift `z = (4/3π) r₀ ω_H`.
    pub fn z(&self) -> f64 {
        COUPLING * self.r0 * self.omega_h
    }
}

/// Renormalized parameters of the sharp-cutoff model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    a: f64,
    b: f64,
    omega_h: f64,
    omega_r: f64,
    r0r: f64,
}

/// Approximate Breit-Wigner characterization of the oscillator resonance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonanceInfo {
    pub omega_peak: f64,
    /// Full width Γ = (2/3) r₀,ᵣ Ω_r².
    pub gamma: f64,
}

/// Builds parameters in canonical units (ω_H = 1).
pub fn make_params(a: f64, b: f64) -> Result<ModelParams> {
    ModelParams::with_cutoff(a, b, 1.0)
}

impl ModelParams {
    pub fn with_cutoff(a: f64, b: f64, omega_h: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0 && a < 1.0) {
            return Err(Error::domain(format!("a must lie in (0, 1), got {a}")));
        }
        if !(b.is_finite() && b > 0.0 && b < 1.0) {
            return Err(Error::domain(format!("b must lie in (0, 1), got {b}")));
        }
        if !(omega_h.is_finite() && omega_h > 0.0) {
            return Err(Error::domain(format!("omega_h must be positive, got {omega_h}")));
        }
        Ok(ModelParams {
            a,
            b,
            omega_h,
            omega_r: b * omega_h,
            r0r: a / (COUPLING * omega_h),
        })
    }

    /// Parameters from the physical pair (Ω_r, r₀,ᵣ) at cutoff ω_H.
    pub fn from_physical(omega_r: f64, r0r: f64, omega_h: f64) -> Result<Self> {
        if !(omega_h.is_finite() && omega_h > 0.0) {
            return Err(Error::domain(format!("omega_h must be positive, got {omega_h}")));
        }
        Self::with_cutoff(COUPLING * r0r * omega_h, omega_r / omega_h, omega_h)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn omega_h(&self) -> f64 {
        self.omega_h
    }

    /// Renormalized resonance frequency Ω_r.
    pub fn omega_r(&self) -> f64 {
        self.omega_r
    }

    /// Renormalized length r₀,ᵣ; σ_T = (8π/3) r₀,ᵣ².
    pub fn r0r(&self) -> f64 {
        self.r0r
    }

    /// r₀,ᵣ Ω_r; the resonance is narrow when this is small.
    pub fn width_parameter(&self) -> f64 {
        self.r0r * self.omega_r
    }

    pub fn is_narrow_width(&self) -> bool {
        self.width_parameter() < 0.1
    }

    pub fn thomson_cross_section(&self) -> f64 {
        8.0 * PI / 3.0 * self.r0r * self.r0r
    }

    /// The same physical (Ω_r, r₀,ᵣ) at a different cutoff.
    pub fn at_cutoff(&self, omega_h: f64) -> Result<Self> {
        Self::from_physical(self.omega_r, self.r0r, omega_h)
    }
}

/// Maps bare parameters to renormalized ones: Ω_r² = Ω²/(1+z), r₀,ᵣ = r₀/(1+z).
pub fn renormalize(bare: &BareParams) -> Result<ModelParams> {
    let z = bare.z();
    let scale = 1.0 + z;
    let omega_r = bare.omega0 / scale.sqrt();
    let r0r = bare.r0 / scale;
    let a = z / scale;
    let p = ModelParams::with_cutoff(a, omega_r / bare.omega_h, bare.omega_h)?;
    // keep the directly computed values rather than the ones rebuilt from (a, b)
    Ok(ModelParams { omega_r, r0r, ..p })
}

/// Inverts [`renormalize`]; requires a < 1, which [`ModelParams`] guarantees.
pub fn bare_from_renormalized(p: &ModelParams) -> BareParams {
    let scale = 1.0 / (1.0 - p.a);
    BareParams {
        omega0: p.omega_r * scale.sqrt(),
        r0: p.r0r * scale,
        omega_h: p.omega_h,
    }
}

pub fn resonance_info(p: &ModelParams) -> ResonanceInfo {
    ResonanceInfo {
        omega_peak: p.omega_r,
        gamma: 2.0 / 3.0 * p.r0r * p.omega_r * p.omega_r,
    }
}

/// Largest admissible cutoff for a given r₀,ᵣ, where a reaches 1.
pub fn omega_h_max(r0r: f64) -> f64 {
    3.0 * PI / (4.0 * r0r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(x: f64, y: f64) -> f64 {
        ((x - y) / y).abs()
    }

    #[test]
    fn make_params_fig1_values() {
        let p = make_params(0.1, 0.01).unwrap();
        assert_eq!(p.omega_h(), 1.0);
        assert!(rel(p.omega_r(), 0.01) < 1e-15);
        assert!(rel(p.r0r(), 3.0 * PI * 0.1 / 4.0) < 1e-15);
        assert!((p.r0r() - 0.235_62).abs() < 1e-5);
    }

    #[test]
    fn make_params_bounds() {
        assert!(make_params(0.999_999, 0.5).is_ok());
        assert!(matches!(make_params(1.0, 0.01), Err(Error::Domain(_))));
        assert!(make_params(0.0, 0.01).is_err());
        assert!(make_params(0.5, 1.0).is_err());
        assert!(make_params(f64::NAN, 0.1).is_err());
    }

    #[test]
    fn renormalize_unit_shift() {
        // z = 1: Ω_r² = Ω²/2, r₀,ᵣ = r₀/2, a = 1/2
        let omega_h = 10.0;
        let r0 = 1.0 / (COUPLING * omega_h);
        let p = renormalize(&BareParams::new(1.0, r0, omega_h).unwrap()).unwrap();
        assert!(rel(p.omega_r() * p.omega_r(), 0.5) < 1e-15);
        assert!(rel(p.r0r(), r0 / 2.0) < 1e-15);
        assert!(rel(p.a(), 0.5) < 1e-15);
    }

    #[test]
    fn renormalize_z_three() {
        let omega_h = 4.0;
        let r0 = 3.0 / (COUPLING * omega_h);
        let p = renormalize(&BareParams::new(2.0, r0, omega_h).unwrap()).unwrap();
        assert!(rel(p.omega_r(), 1.0) < 1e-15);
        assert!(rel(p.a(), 0.75) < 1e-15);
    }

    #[test]
    fn renormalize_free_limit() {
        let bare = BareParams::new(0.3, 1e-12, 1.0).unwrap();
        let p = renormalize(&bare).unwrap();
        assert!(rel(p.omega_r(), 0.3) < 1e-11);
        assert!(rel(p.r0r(), 1e-12) < 1e-11);
        assert!(p.a() < 1e-11);
    }

    #[test]
    fn renormalize_rejects_resonance_above_cutoff() {
        assert!(renormalize(&BareParams::new(5.0, 0.01, 1.0).unwrap()).is_err());
    }

    #[test]
    fn bare_inversion_examples() {
        let p = ModelParams::with_cutoff(0.5, 0.1, 10.0).unwrap();
        let bare = bare_from_renormalized(&p);
        assert!(rel(bare.z(), 1.0) < 1e-14);
        assert!(rel(bare.omega0 * bare.omega0, 2.0) < 1e-14);

        let p = ModelParams::with_cutoff(0.9, 0.1, 1.0).unwrap();
        assert!(rel(bare_from_renormalized(&p).z(), 9.0) < 1e-14);

        let p = make_params(1e-14, 0.2).unwrap();
        let bare = bare_from_renormalized(&p);
        assert!(rel(bare.omega0, p.omega_r()) < 1e-13);
        assert!(rel(bare.r0, p.r0r()) < 1e-13);
    }

    #[test]
    fn resonance_width() {
        let info = resonance_info(&make_params(0.1, 0.01).unwrap());
        assert!(rel(info.gamma, 2.0 / 3.0 * (0.3 * PI / 4.0) * 1e-4) < 1e-14);
        assert!((info.gamma - 1.5708e-5).abs() < 1e-9);

        let info = resonance_info(&make_params(0.3, 0.1).unwrap());
        assert!((info.gamma - 4.7124e-3).abs() < 1e-7);

        let info = resonance_info(&make_params(1e-12, 0.1).unwrap());
        assert!(info.gamma < 1e-13);
    }

    #[test]
    fn cutoff_maximum_gives_unit_a() {
        let r0r = 0.37;
        let p = ModelParams::from_physical(0.01, r0r, omega_h_max(r0r) * (1.0 - 1e-12)).unwrap();
        assert!((p.a() - 1.0).abs() < 1e-11);
        assert!(ModelParams::from_physical(0.01, r0r, omega_h_max(r0r) * 1.001).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn induced_a_is_subcritical(omega0 in 1e-3f64..1.0, r0 in 1e-6f64..1e4, omega_h in 1.0f64..100.0) {
            let bare = BareParams::new(omega0, r0, omega_h).unwrap();
            let z = bare.z();
            let a = z / (1.0 + z);
            prop_assert!(a > 0.0 && a < 1.0);
        }

        #[test]
        fn round_trip(a in 1e-6f64..0.999, b in 1e-4f64..0.999, omega_h in 0.01f64..100.0) {
            let p = ModelParams::with_cutoff(a, b, omega_h).unwrap();
            let back = renormalize(&bare_from_renormalized(&p)).unwrap();
            prop_assert!(rel(back.a(), p.a()) < 1e-14);
            prop_assert!(rel(back.omega_r(), p.omega_r()) < 1e-14);
            prop_assert!(rel(back.r0r(), p.r0r()) < 1e-14);
            prop_assert!(rel(back.b(), p.b()) < 1e-14);
        }
    }
}
