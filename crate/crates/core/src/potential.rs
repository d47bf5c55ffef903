//! The potential −a/r + b·exp(−δr)/r, its centrifugal extension, and the
//! small-δ split into a solvable Coulomb part plus a polynomial
//! perturbation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::PotentialParams;
use crate::state::QuantumState;
use crate::units::UnitSystem;

/// V(r) = −a/r + b·exp(−δr)/r. With a = 0 this is the static screened
/// Coulomb form; with b = 0 the pure Coulomb one.
pub fn hellmann_potential(params: &PotentialParams, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius(r));
    }
    Ok((-params.a() + params.b() * (-params.delta() * r).exp()) / r)
}

/// The full radial potential including the angular momentum barrier
/// ħ²ℓ(ℓ+1)/(2m r²).
pub fn effective_potential(
    params: &PotentialParams,
    state: &QuantumState,
    units: &UnitSystem,
    r: f64,
) -> Result<f64> {
    let bare = hellmann_potential(params, r)?;
    Ok(bare + units.kinetic_factor() * state.angular_barrier() / (r * r))
}

/// Screening-expansion coefficients V_i = (−1)^{i+1}/i! for i ≥ 1, i.e.
/// +1, −1/2, 1/6, −1/24, …. They are the series coefficients of
/// 1 − exp(−x) in powers of x = δr, and the potential remainder is
/// ΔV(r) = −(b/r)·Σ_{i≥1} V_i (δr)^i.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCoefficients {
    v: Vec<f64>,
    order: usize,
}

pub const DEFAULT_EXPANSION_ORDER: usize = 4;

impl ExpansionCoefficients {
    pub fn new(order: usize) -> Self {
        let mut v = Vec::with_capacity(order);
        let mut factorial = 1.0;
        for i in 1..=order {
            factorial *= i as f64;
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            v.push(sign / factorial);
        }
        ExpansionCoefficients { v, order }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// V_i for i = 1..=order.
    pub fn coefficient(&self, i: usize) -> f64 {
        assert!(i >= 1 && i <= self.order, "coefficient index out of range");
        self.v[i - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.v
    }
}

impl Default for ExpansionCoefficients {
    fn default() -> Self {
        ExpansionCoefficients::new(DEFAULT_EXPANSION_ORDER)
    }
}

/// The split V(r) = V₀(r) + ΔV(r): a net-Coulomb part V₀ = −(a−b)/r that is
/// exactly solvable, plus the screening remainder expanded to `order` powers
/// of δ,
///
///   ΔV(r) = −bδ + (bδ²/2) r − (bδ³/6) r² + (bδ⁴/24) r³ − ⋯
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSplit {
    params: PotentialParams,
    coefficients: ExpansionCoefficients,
}

impl PotentialSplit {
    pub fn new(params: PotentialParams, order: usize) -> Self {
        PotentialSplit {
            params,
            coefficients: ExpansionCoefficients::new(order),
        }
    }

    pub fn order(&self) -> usize {
        self.coefficients.order()
    }

    /// The solvable part V₀(r) = −(a−b)/r.
    pub fn v0(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::NonPositiveRadius(r));
        }
        Ok(-self.params.net_strength() / r)
    }

    /// The truncated perturbation
    /// ΔV(r) = −b Σ_{i=1..order} V_i δ^i r^{i−1}
    ///       = −bδ + (bδ²/2) r − (bδ³/6) r² + ⋯.
    pub fn delta_v(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::NonPositiveRadius(r));
        }
        let b = self.params.b();
        let delta = self.params.delta();
        let mut acc = 0.0;
        let mut delta_pow = 1.0;
        let mut r_pow = 1.0 / r;
        for i in 1..=self.order() {
            delta_pow *= delta;
            r_pow *= r;
            acc += self.coefficients.coefficient(i) * delta_pow * r_pow;
        }
        Ok(-b * acc)
    }

    /// The untruncated remainder b·(exp(−δr) − 1)/r, for checking how well
    /// the series represents it.
    pub fn delta_v_exact(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::NonPositiveRadius(r));
        }
        let delta = self.params.delta();
        Ok(self.params.b() * ((-delta * r).exp() - 1.0) / r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, b: f64, delta: f64) -> PotentialParams {
        PotentialParams::new(a, b, delta).unwrap()
    }

    #[test]
    fn pure_coulomb() {
        let p = params(2.0, 0.0, 0.7);
        assert_eq!(hellmann_potential(&p, 1.0).unwrap(), -2.0);
    }

    #[test]
    fn exact_cancellation_unscreened() {
        let p = params(2.0, 2.0, 0.0);
        assert_eq!(hellmann_potential(&p, 5.0).unwrap(), 0.0);
    }

    #[test]
    fn screened_coulomb_special_case() {
        // a = 0, b = −4, δ = 0.5 at r = 2: pure Yukawa value −2e^{−1}.
        let p = params(0.0, -4.0, 0.5);
        let v = hellmann_potential(&p, 2.0).unwrap();
        let expected = -2.0 * (-1.0f64).exp();
        assert!((v - expected).abs() < 1e-15, "got {v}, want {expected}");
        assert!((v - (-0.735759)).abs() < 1e-6);
    }

    #[test]
    fn rejects_nonpositive_radius() {
        let p = params(2.0, -1.0, 0.1);
        assert_eq!(
            hellmann_potential(&p, 0.0),
            Err(Error::NonPositiveRadius(0.0))
        );
        assert!(hellmann_potential(&p, -1.0).is_err());
    }

    #[test]
    fn zero_l_barrier_is_identity() {
        let p = params(2.0, -1.0, 0.3);
        let u = UnitSystem::default();
        let s = QuantumState::new(2, 0);
        for r in [0.1, 1.0, 7.5] {
            assert_eq!(
                effective_potential(&p, &s, &u, r).unwrap(),
                hellmann_potential(&p, r).unwrap()
            );
        }
    }

    #[test]
    fn barrier_added_for_positive_l() {
        let p = params(2.0, -1.0, 0.3);
        let u = UnitSystem::default();
        let s = QuantumState::new(0, 2);
        let r = 2.0;
        let expected = hellmann_potential(&p, r).unwrap() + 1.0 * 6.0 / (r * r);
        assert!((effective_potential(&p, &s, &u, r).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn expansion_coefficients_match_series() {
        let c = ExpansionCoefficients::default();
        assert_eq!(c.as_slice(), &[1.0, -0.5, 1.0 / 6.0, -1.0 / 24.0]);
    }

    #[test]
    fn split_with_screening_off() {
        let p = params(2.0, -1.0, 0.0);
        let split = PotentialSplit::new(p, 4);
        for r in [0.2, 1.0, 9.0] {
            assert_eq!(split.delta_v(r).unwrap(), 0.0);
            assert_eq!(split.v0(r).unwrap(), -3.0 / r);
        }
    }

    #[test]
    fn split_reassembles_potential() {
        // V₀ + ΔV(truncated) must approach the full potential as the order
        // grows; at order 12 and δr ≤ 0.5 the remainder is below 1e-12.
        let p = params(2.0, -1.0, 0.05);
        let split = PotentialSplit::new(p, 12);
        for r in [0.5, 2.0, 10.0] {
            let full = hellmann_potential(&p, r).unwrap();
            let sum = split.v0(r).unwrap() + split.delta_v(r).unwrap();
            assert!((full - sum).abs() < 1e-12, "r={r}: {full} vs {sum}");
        }
    }

    #[test]
    fn truncated_series_tracks_exact_remainder() {
        // (a=2, b=−1, δ=0.01): the order-4 series at r = 1 agrees with
        // b(e^{−δ}−1) to O(δ⁵) ≈ 1e-10 absolute.
        let p = params(2.0, -1.0, 0.01);
        let split = PotentialSplit::new(p, 4);
        let series = split.delta_v(1.0).unwrap();
        let exact = split.delta_v_exact(1.0).unwrap();
        let by_hand = 0.01 - 0.00005 + 0.01f64.powi(3) / 6.0 - 0.01f64.powi(4) / 24.0;
        assert!((series - by_hand).abs() < 1e-15);
        assert!(
            (series - exact).abs() < 1e-10,
            "series {series} exact {exact}"
        );
        assert!((exact - 0.00995017).abs() < 1e-7);
    }
}
