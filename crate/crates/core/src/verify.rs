//! The two cross-validation suites behind `verify`: integral definitions
//! against closed forms, and the direct eigensolver against the expansion.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::oracle::{solve_bound_state, SolverConfig};
use crate::params::PotentialParams;
use crate::perturbation::{convergence_report, total_energy};
use crate::quadrature::{
    verify_corrections, CorrectionComparison, CorrectionOptions, QuadratureConfig,
};
use crate::state::QuantumState;
use crate::units::UnitSystem;

/// All states of the complete shells N = 1..=6 (equivalently n+ℓ ≤ 5).
pub fn default_state_grid() -> Vec<String> {
    let mut out = Vec::new();
    for shell in 1..=6u32 {
        for state in QuantumState::shell(shell, shell - 1) {
            out.push(state.to_string());
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSuiteConfig {
    pub states: Vec<String>,
    pub b_values: Vec<f64>,
    pub delta_values: Vec<f64>,
    pub a: f64,
    pub units: UnitSystem,
    pub quadrature: QuadratureConfig,
    pub options: CorrectionOptions,
    /// Absolute deviation floor below which a cell always passes.
    pub abs_floor: f64,
}

impl Default for QuadratureSuiteConfig {
    fn default() -> Self {
        QuadratureSuiteConfig {
            states: default_state_grid(),
            b_values: vec![-10.0, -2.0, -1.0, 1.0],
            delta_values: vec![0.001, 0.01, 0.05],
            a: 2.0,
            units: UnitSystem::default(),
            quadrature: QuadratureConfig::default(),
            options: CorrectionOptions::default(),
            abs_floor: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSuiteReport {
    pub cells: Vec<CorrectionComparison>,
    pub checks: usize,
    pub breaches: usize,
    pub max_abs_dev: f64,
    pub max_rel_dev: f64,
    pub findings: Vec<String>,
    pub passed: bool,
}

pub fn run_quadrature_suite(cfg: &QuadratureSuiteConfig) -> Result<QuadratureSuiteReport> {
    let mut cells = Vec::new();
    let mut checks = 0;
    let mut breaches = 0;
    let mut max_abs_dev: f64 = 0.0;
    let mut max_rel_dev: f64 = 0.0;
    let mut findings = Vec::new();
    for label in &cfg.states {
        let state: QuantumState = label.parse()?;
        for &b in &cfg.b_values {
            for &delta in &cfg.delta_values {
                let params = PotentialParams::new(cfg.a, b, delta)?;
                let cmp = verify_corrections(
                    &params,
                    state,
                    &cfg.units,
                    &cfg.quadrature,
                    &cfg.options,
                    cfg.abs_floor,
                )?;
                for o in &cmp.orders {
                    checks += 1;
                    max_abs_dev = max_abs_dev.max(o.abs_dev);
                    if o.rel_dev.is_finite() {
                        max_rel_dev = max_rel_dev.max(o.rel_dev);
                    }
                    if !o.within_tolerance {
                        breaches += 1;
                    }
                }
                findings.extend(cmp.findings.iter().cloned());
                cells.push(cmp);
            }
        }
    }
    Ok(QuadratureSuiteReport {
        cells,
        checks,
        breaches,
        max_abs_dev,
        max_rel_dev,
        findings,
        passed: breaches == 0,
    })
}

/// Default oracle-vs-expansion tolerance by screening strength: the
/// expansion is validated at 1e−5 relative in the δ ≤ 0.001 regime and
/// 1e−3 up to δ = 0.01; beyond that the comparison is reported without a
/// hard threshold (the series degrades by design there).
pub fn default_oracle_tolerance(delta: f64) -> Option<f64> {
    if delta <= 0.002 {
        Some(1e-5)
    } else if delta <= 0.02 {
        Some(1e-3)
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSuiteConfig {
    pub states: Vec<String>,
    pub b_values: Vec<f64>,
    pub delta_values: Vec<f64>,
    pub a: f64,
    pub units: UnitSystem,
    pub solver: SolverConfig,
    /// Overrides the per-δ default tolerance when set.
    pub rel_tol: Option<f64>,
    /// With strict set, untrusted cells breach instead of warn.
    pub strict: bool,
}

impl Default for OracleSuiteConfig {
    fn default() -> Self {
        OracleSuiteConfig {
            states: vec![
                "1s".into(),
                "2s".into(),
                "2p".into(),
                "3s".into(),
                "3p".into(),
                "3d".into(),
            ],
            b_values: vec![-10.0, -1.0],
            delta_values: vec![0.001, 0.01],
            a: 2.0,
            units: UnitSystem::default(),
            solver: SolverConfig::default(),
            rel_tol: None,
            strict: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCellReport {
    pub state: String,
    pub b: f64,
    pub delta: f64,
    pub oracle_energy: f64,
    pub oracle_converged: bool,
    pub perturbative: f64,
    pub rel_gap: f64,
    pub trusted: bool,
    pub tolerance: Option<f64>,
    pub breach: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSuiteReport {
    pub cells: Vec<OracleCellReport>,
    pub breaches: usize,
    /// Untrusted cells reported without failing (unless strict).
    pub warnings: usize,
    pub max_rel_gap: f64,
    pub passed: bool,
}

pub fn run_oracle_suite(cfg: &OracleSuiteConfig) -> Result<OracleSuiteReport> {
    let mut cells = Vec::new();
    let mut breaches = 0;
    let mut warnings = 0;
    let mut max_rel_gap: f64 = 0.0;
    for label in &cfg.states {
        let state: QuantumState = label.parse()?;
        for &b in &cfg.b_values {
            for &delta in &cfg.delta_values {
                let params = PotentialParams::new(cfg.a, b, delta)?;
                let bd = total_energy(&params, &state, &cfg.units)?;
                let trusted = convergence_report(&params, &state, &cfg.units)?.trusted;
                let oracle = solve_bound_state(&params, &state, &cfg.units, &cfg.solver)?;
                let rel_gap = (bd.total - oracle.energy).abs() / oracle.energy.abs().max(1e-300);
                let tolerance = cfg.rel_tol.or_else(|| default_oracle_tolerance(delta));
                let breach = if trusted {
                    tolerance.is_some_and(|tol| rel_gap > tol)
                } else {
                    // An untrusted expansion is expected to be off; it
                    // only counts against the suite in strict mode.
                    cfg.strict
                };
                if trusted {
                    max_rel_gap = max_rel_gap.max(rel_gap);
                    if breach {
                        breaches += 1;
                    }
                } else {
                    warnings += 1;
                    if breach {
                        breaches += 1;
                    }
                }
                cells.push(OracleCellReport {
                    state: label.clone(),
                    b,
                    delta,
                    oracle_energy: oracle.energy,
                    oracle_converged: oracle.converged,
                    perturbative: bd.total,
                    rel_gap,
                    trusted,
                    tolerance,
                    breach,
                });
            }
        }
    }
    Ok(OracleSuiteReport {
        cells,
        breaches,
        warnings,
        max_rel_gap,
        passed: breaches == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_covers_all_low_shells() {
        let states = default_state_grid();
        assert_eq!(states.len(), 21);
        assert_eq!(states.first().unwrap(), "1s");
        assert_eq!(states.last().unwrap(), "6h");
    }

    #[test]
    fn quadrature_suite_small_slice() {
        // The nodeless tower passes cleanly at every order.
        let cfg = QuadratureSuiteConfig {
            states: vec!["1s".into(), "2p".into()],
            b_values: vec![-10.0, 1.0],
            delta_values: vec![0.01],
            ..Default::default()
        };
        let report = run_quadrature_suite(&cfg).unwrap();
        assert_eq!(report.checks, 12);
        assert!(report.passed, "findings: {:?}", report.findings);
    }

    #[test]
    fn quadrature_suite_flags_excited_third_order() {
        let cfg = QuadratureSuiteConfig {
            states: vec!["2s".into()],
            b_values: vec![-10.0],
            delta_values: vec![0.01],
            ..Default::default()
        };
        let report = run_quadrature_suite(&cfg).unwrap();
        assert!(!report.passed);
        assert_eq!(report.breaches, 1, "only the third order breaches");
        assert_eq!(report.findings.len(), 1);
    }

    #[test]
    fn oracle_suite_weak_screening_passes() {
        let cfg = OracleSuiteConfig {
            states: vec!["1s".into(), "2p".into()],
            b_values: vec![-10.0],
            delta_values: vec![0.001],
            solver: SolverConfig {
                grid_points: 8_000,
                ..Default::default()
            },
            ..Default::default()
        };
        let report = run_oracle_suite(&cfg).unwrap();
        assert!(report.passed, "{report:?}");
        assert!(report.max_rel_gap < 1e-5);
    }

    #[test]
    fn oracle_suite_untrusted_cells_warn_not_fail() {
        let cfg = OracleSuiteConfig {
            states: vec!["4s".into()],
            b_values: vec![-10.0],
            delta_values: vec![0.3],
            solver: SolverConfig {
                grid_points: 8_000,
                ..Default::default()
            },
            ..Default::default()
        };
        let report = run_oracle_suite(&cfg).unwrap();
        assert_eq!(report.warnings, 1);
        assert!(report.passed, "untrusted cells must not fail by default");
        let strict = OracleSuiteConfig {
            strict: true,
            ..cfg
        };
        let report = run_oracle_suite(&strict).unwrap();
        assert!(!report.passed, "strict mode must fail on untrusted cells");
    }
}
