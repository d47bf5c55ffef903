//! Normalized bound-state wavefunctions of the net-Coulomb problem
//! V₀ = −(a−b)/r, the zeroth order of the perturbation scheme.
//!
//! The reduced radial function is
//!
//!   χ_{n,ℓ}(r) = N_{n,ℓ} · r^{ℓ+1} · e^{−βr} · L_n^{2ℓ+1}(2βr),
//!
//! with β = m(a−b)/(N ħ²), N = n+ℓ+1, and N_{n,ℓ} chosen so that
//! ∫₀^∞ χ² dr = 1. The normalization is assembled in log space; at large ℓ
//! the prefactor (2β)^{ℓ+1} and the factorial ratio individually overflow
//! long before their product does.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::PotentialParams;
use crate::special::{laguerre, ln_factorial};
use crate::state::QuantumState;
use crate::units::UnitSystem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoulombWavefunction {
    state: QuantumState,
    beta: f64,
    ln_norm: f64,
}

impl CoulombWavefunction {
    pub fn new(params: &PotentialParams, state: QuantumState, units: &UnitSystem) -> Result<Self> {
        if params.a() == params.b() {
            return Err(Error::EqualStrengths(params.a()));
        }
        if params.a() < params.b() {
            return Err(Error::Unbound {
                a: params.a(),
                b: params.b(),
            });
        }
        let n = state.n();
        let l = state.l();
        let big_n = state.principal() as f64;
        let beta = units.mass() * params.net_strength() / (big_n * units.hbar() * units.hbar());
        // N_{n,ℓ} = (2β)^{ℓ+1} · (1/N) · √(Nβ · n!/(n+2ℓ+1)!)
        // using mA/ħ² = Nβ.
        let ln_norm = (l as f64 + 1.0) * (2.0 * beta).ln() - big_n.ln()
            + 0.5 * ((big_n * beta).ln() + ln_factorial(n) - ln_factorial(n + 2 * l + 1));
        Ok(CoulombWavefunction {
            state,
            beta,
            ln_norm,
        })
    }

    pub fn state(&self) -> QuantumState {
        self.state
    }

    /// Inverse decay length β = m(a−b)/(N ħ²).
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The normalization constant N_{n,ℓ}.
    pub fn norm_constant(&self) -> f64 {
        self.ln_norm.exp()
    }

    /// χ(r). Vanishes at r = 0 through the r^{ℓ+1} factor; negative r is a
    /// caller bug and returns 0 as well.
    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let l = self.state.l();
        let envelope = (self.ln_norm + (l as f64 + 1.0) * r.ln() - self.beta * r).exp();
        envelope * laguerre(self.state.n(), 2 * l + 1, 2.0 * self.beta * r)
    }

    /// χ²(r), the radial probability density of the reduced function.
    pub fn density(&self, r: f64) -> f64 {
        let chi = self.eval(r);
        chi * chi
    }

    /// The polynomial factor L_n^{2ℓ+1}(2βr) alone, used to detect grid
    /// points sitting on a node.
    pub fn polynomial_factor(&self, r: f64) -> f64 {
        laguerre(self.state.n(), 2 * self.state.l() + 1, 2.0 * self.beta * r)
    }

    /// χ²(x)/χ²(r_ref), formed in log space. Out at many decay lengths
    /// both densities underflow while their ratio stays well-scaled; the
    /// cumulative superpotential integrals depend on exactly this ratio.
    /// `r_ref` must not sit on a node.
    pub fn density_ratio(&self, x: f64, r_ref: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let lp1 = self.state.l() as f64 + 1.0;
        let log_env = 2.0 * (lp1 * (x.ln() - r_ref.ln()) - self.beta * (x - r_ref));
        let poly = self.polynomial_factor(x) / self.polynomial_factor(r_ref);
        log_env.exp() * poly * poly
    }

    /// Sign changes of χ on (0, r_max) scanned over `points` samples.
    pub fn count_nodes(&self, r_max: f64, points: usize) -> u32 {
        let mut nodes = 0;
        let mut prev = 0.0f64;
        for i in 1..=points {
            let r = r_max * i as f64 / points as f64;
            let v = self.eval(r);
            if prev != 0.0 && v != 0.0 && prev.signum() != v.signum() {
                nodes += 1;
            }
            if v != 0.0 {
                prev = v;
            }
        }
        nodes
    }
}
