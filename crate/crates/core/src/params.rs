use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strengths and screening of the potential −a/r + b·exp(−δr)/r.
///
/// `a` is the (attractive) Coulomb strength, `b` the Yukawa strength of
/// either sign, and `delta` the screening parameter. Construction checks
/// a ≥ 0 and δ ≥ 0 only; a = 0 with b < 0 is the static screened Coulomb
/// special case used for neutral-atom models. The relation between `a`
/// and `b` is enforced at the entry of the perturbative formulas (which
/// divide by (a − b)), not here, so the direct eigensolver can still
/// treat a = b.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    a: f64,
    b: f64,
    delta: f64,
}

impl PotentialParams {
    pub fn new(a: f64, b: f64, delta: f64) -> Result<Self> {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Coulomb strength a must be non-negative and finite, got {a}"
            )));
        }
        if !b.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Yukawa strength b must be finite, got {b}"
            )));
        }
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "screening delta must be non-negative and finite, got {delta}"
            )));
        }
        Ok(PotentialParams { a, b, delta })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Net Coulomb strength a − b seen by the unperturbed problem.
    pub fn net_strength(&self) -> f64 {
        self.a - self.b
    }

    /// Checks the preconditions of the perturbative formulas:
    /// a = b is a singular denominator, a < b leaves no bound state.
    pub fn require_binding(&self) -> Result<()> {
        if self.a == self.b {
            return Err(Error::EqualStrengths(self.a));
        }
        if self.a < self.b {
            return Err(Error::Unbound {
                a: self.a,
                b: self.b,
            });
        }
        Ok(())
    }
}
