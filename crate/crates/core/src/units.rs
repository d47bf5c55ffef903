use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unit constants of the radial problem.
///
/// The default is the convention used throughout the reference tables:
/// ħ = 1, m = 1/2, so that ħ²/(2m) = 1. With a = 2 this makes the pure
/// Coulomb binding energies come out as (a − b)²/(4N²) — e.g. exactly
/// 1, 0.25, 0.111… for the b = 0 column. Both constants stay configurable
/// for callers working in other unit systems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    hbar: f64,
    mass: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        UnitSystem {
            hbar: 1.0,
            mass: 0.5,
        }
    }
}

impl UnitSystem {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "hbar must be positive and finite, got {hbar}"
            )));
        }
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mass must be positive and finite, got {mass}"
            )));
        }
        Ok(UnitSystem { hbar, mass })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// ħ²/(2m), the kinetic prefactor of the radial equation.
    pub fn kinetic_factor(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass)
    }

    /// ħ²/m, the combination entering the first-order shift.
    pub fn h2_over_m(&self) -> f64 {
        self.hbar * self.hbar / self.mass
    }

    /// (ħ²/m)^k; the correction formulas use k = 1..5.
    pub fn h2_over_m_pow(&self, k: i32) -> f64 {
        self.h2_over_m().powi(k)
    }

    /// √(2m)/ħ, the factor converting superpotentials to log-derivatives.
    pub fn sqrt_2m_over_hbar(&self) -> f64 {
        (2.0 * self.mass).sqrt() / self.hbar
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_convention_constants() {
        // The table convention fixes ħ²/2m = 1, hence ħ²/m = 2,
        // ħ⁴/m² = 4, ħ⁶/m³ = 8 — the constants entering the closed forms.
        let u = UnitSystem::default();
        assert_eq!(u.kinetic_factor(), 1.0);
        assert_eq!(u.h2_over_m(), 2.0);
        assert_eq!(u.h2_over_m_pow(2), 4.0);
        assert_eq!(u.h2_over_m_pow(3), 8.0);
        assert_eq!(u.h2_over_m_pow(4), 16.0);
        assert_eq!(u.h2_over_m_pow(5), 32.0);
        assert_eq!(u.sqrt_2m_over_hbar(), 1.0);
    }

    #[test]
    fn rejects_nonpositive_constants() {
        assert!(UnitSystem::new(0.0, 0.5).is_err());
        assert!(UnitSystem::new(1.0, -1.0).is_err());
        assert!(UnitSystem::new(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn custom_units_accepted() {
        let u = UnitSystem::new(2.0, 1.0).unwrap();
        assert_eq!(u.kinetic_factor(), 2.0);
        assert_eq!(u.h2_over_m(), 4.0);
    }
}
