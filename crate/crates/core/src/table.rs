//! Declarative (state × b × δ) grids over the energy engines, with
//! reproducible serialization.
//!
//! A [`TableSpec`] names the cells and the engine; [`TableResult::compute`]
//! fills the grid with a bounded worker pool (capped by the
//! `HELLMANN_THREADS` environment variable) and assembles cells in spec
//! order regardless of completion order, so identical specs produce
//! byte-identical CSV/JSON no matter the thread count. Untrusted
//! perturbative cells always carry their convergence ratios; per-cell
//! failures are recorded in the cell rather than aborting the grid.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{solve_bound_state, SolverConfig};
use crate::params::PotentialParams;
use crate::perturbation::{convergence_report, total_energy, ConvergenceReport, EnergyBreakdown};
use crate::state::QuantumState;
use crate::units::UnitSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Perturbation,
    Oracle,
    Both,
}

impl Engine {
    pub fn as_str(&self) -> &'static str {
        match self {
            Engine::Perturbation => "perturbation",
            Engine::Oracle => "oracle",
            Engine::Both => "both",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "perturbation" | "pert" => Ok(Engine::Perturbation),
            "oracle" => Ok(Engine::Oracle),
            "both" => Ok(Engine::Both),
            other => Err(Error::InvalidParameter(format!(
                "unknown engine `{other}` (expected perturbation, oracle or both)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignConvention {
    /// Print binding energies −E (positive for bound levels), the table
    /// convention of the reference data.
    Binding,
    /// Print the eigenvalue E itself.
    Energy,
}

impl SignConvention {
    pub fn as_str(&self) -> &'static str {
        match self {
            SignConvention::Binding => "binding",
            SignConvention::Energy => "energy",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "binding" => Ok(SignConvention::Binding),
            "energy" => Ok(SignConvention::Energy),
            other => Err(Error::InvalidParameter(format!(
                "unknown sign convention `{other}` (expected binding or energy)"
            ))),
        }
    }

    pub fn apply(&self, energy: f64) -> f64 {
        match self {
            SignConvention::Binding => -energy,
            SignConvention::Energy => energy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableSpec {
    pub states: Vec<String>,
    pub b_values: Vec<f64>,
    pub delta_values: Vec<f64>,
    pub a: f64,
    pub engine: Engine,
    pub sign_convention: SignConvention,
    pub units: UnitSystem,
    #[serde(default)]
    pub solver: SolverConfig,
}

impl Default for TableSpec {
    fn default() -> Self {
        TableSpec {
            states: Vec::new(),
            b_values: Vec::new(),
            delta_values: Vec::new(),
            a: 2.0,
            engine: Engine::Perturbation,
            sign_convention: SignConvention::Binding,
            units: UnitSystem::default(),
            solver: SolverConfig::default(),
        }
    }
}

impl TableSpec {
    pub fn validate(&self) -> Result<()> {
        if self.states.is_empty() {
            return Err(Error::InvalidParameter("no states requested".into()));
        }
        for s in &self.states {
            s.parse::<QuantumState>()?;
        }
        if self.b_values.is_empty() || self.delta_values.is_empty() {
            return Err(Error::InvalidParameter(
                "need at least one b value and one delta value".into(),
            ));
        }
        if !(self.a >= 0.0) || !self.a.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Coulomb strength a must be non-negative, got {}",
                self.a
            )));
        }
        if matches!(self.engine, Engine::Perturbation | Engine::Both) {
            let b_max = self
                .b_values
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max);
            if b_max >= self.a {
                return Err(Error::InvalidParameter(format!(
                    "perturbation engine requires a > every b; a = {} vs max b = {b_max}",
                    self.a
                )));
            }
        }
        Ok(())
    }

    /// Built-in grids reproducing the published table layouts.
    pub fn preset(name: &str) -> Result<TableSpec> {
        let states = |labels: &[&str]| labels.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let spec = match name {
            // 1s–4f against screening at strong attraction.
            "b-10-scan" => TableSpec {
                states: states(&["1s", "2s", "2p", "3s", "3p", "3d", "4s", "4p", "4d", "4f"]),
                b_values: vec![-10.0],
                delta_values: vec![0.001, 0.005, 0.01, 0.05, 0.1, 0.2],
                ..TableSpec::default()
            },
            // 1s–3d against the Yukawa strength at δ = 0.01.
            "delta-0.01-scan" => TableSpec {
                states: states(&["1s", "2s", "2p", "3s", "3p", "3d"]),
                b_values: vec![
                    1.0, 0.5, 0.2, 0.0, -0.2, -0.5, -1.0, -2.0, -5.0, -10.0, -20.0,
                ],
                delta_values: vec![0.01],
                ..TableSpec::default()
            },
            // High excitations 5s–7i at δ = 0.01.
            "high-states" => TableSpec {
                states: states(&[
                    "5s", "5p", "5d", "5f", "5g", "6s", "6p", "6d", "6f", "6g", "6h", "7s", "7p",
                    "7d", "7f", "7g", "7h", "7i",
                ]),
                b_values: vec![1.0, -1.0, -2.0, -4.0, -8.0, -10.0],
                delta_values: vec![0.01],
                ..TableSpec::default()
            },
            // 1s–6h at δ = 0.1 over strong attraction.
            "delta-0.1-scan" => TableSpec {
                states: states(&[
                    "1s", "2s", "2p", "3s", "3p", "3d", "4s", "4p", "4d", "4f", "5s", "5p", "5d",
                    "5f", "5g", "6s", "6p", "6d", "6f", "6g", "6h",
                ]),
                b_values: vec![-5.0, -8.0, -10.0, -20.0, -30.0, -50.0],
                delta_values: vec![0.1],
                ..TableSpec::default()
            },
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown preset `{other}` (expected b-10-scan, delta-0.01-scan, \
                     high-states or delta-0.1-scan)"
                )))
            }
        };
        Ok(spec)
    }

    /// Parse the flat `key = value` configuration format:
    ///
    /// ```text
    /// # grid over two strengths
    /// states = 1s, 2s, 2p
    /// b = -10, -5
    /// delta = 0.01
    /// a = 2
    /// engine = perturbation
    /// sign = binding
    /// ```
    pub fn from_config_text(text: &str) -> Result<TableSpec> {
        let mut spec = TableSpec::default();
        let bad = |line: usize, msg: String| {
            Error::InvalidParameter(format!("config line {}: {msg}", line + 1))
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(i, "expected `key = value`".into()))?;
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim();
            let parse_floats = |v: &str| -> Result<Vec<f64>> {
                v.split(',')
                    .map(|tok| {
                        tok.trim()
                            .parse::<f64>()
                            .map_err(|_| bad(i, format!("unreadable number `{}`", tok.trim())))
                    })
                    .collect()
            };
            match key.as_str() {
                "states" => {
                    spec.states = value.split(',').map(|s| s.trim().to_string()).collect();
                }
                "b" | "b_values" => spec.b_values = parse_floats(value)?,
                "delta" | "delta_values" => spec.delta_values = parse_floats(value)?,
                "a" => {
                    spec.a = value
                        .parse()
                        .map_err(|_| bad(i, format!("unreadable number `{value}`")))?
                }
                "engine" => spec.engine = Engine::parse(value)?,
                "sign" | "sign_convention" => spec.sign_convention = SignConvention::parse(value)?,
                "hbar" => {
                    let hbar = value
                        .parse()
                        .map_err(|_| bad(i, format!("unreadable number `{value}`")))?;
                    spec.units = UnitSystem::new(hbar, spec.units.mass())?;
                }
                "mass" => {
                    let mass = value
                        .parse()
                        .map_err(|_| bad(i, format!("unreadable number `{value}`")))?;
                    spec.units = UnitSystem::new(spec.units.hbar(), mass)?;
                }
                other => return Err(bad(i, format!("unknown key `{other}`"))),
            }
        }
        Ok(spec)
    }

    fn cells(&self) -> Vec<(String, f64, f64)> {
        let mut out = Vec::new();
        for s in &self.states {
            for &b in &self.b_values {
                for &d in &self.delta_values {
                    out.push((s.clone(), b, d));
                }
            }
        }
        out
    }

    /// FNV-1a over the canonical JSON encoding; stored in the metadata so
    /// outputs can be traced back to the exact grid that produced them.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("spec serializes");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in canonical.as_bytes() {
            h ^= *byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub state: String,
    pub b: f64,
    pub delta: f64,
    /// Headline number under the spec's sign convention (perturbative
    /// total, or the oracle eigenvalue when that is the only engine).
    pub value: Option<f64>,
    pub breakdown: Option<EnergyBreakdown>,
    pub convergence: Option<ConvergenceReport>,
    pub trusted: bool,
    pub oracle_energy: Option<f64>,
    pub oracle_converged: Option<bool>,
    /// |perturbative − oracle| / |oracle| when both engines ran.
    pub relative_gap: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMetadata {
    pub generator: String,
    pub version: String,
    pub engine: String,
    pub sign_convention: String,
    pub a: f64,
    pub hbar: f64,
    pub mass: f64,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableResult {
    pub metadata: TableMetadata,
    pub spec: TableSpec,
    pub cells: Vec<CellResult>,
}

fn compute_cell(spec: &TableSpec, state_label: &str, b: f64, delta: f64) -> CellResult {
    let mut cell = CellResult {
        state: state_label.to_string(),
        b,
        delta,
        value: None,
        breakdown: None,
        convergence: None,
        trusted: false,
        oracle_energy: None,
        oracle_converged: None,
        relative_gap: None,
        error: None,
    };
    let state: QuantumState = match state_label.parse() {
        Ok(s) => s,
        Err(e) => {
            cell.error = Some(e.to_string());
            return cell;
        }
    };
    let params = match PotentialParams::new(spec.a, b, delta) {
        Ok(p) => p,
        Err(e) => {
            cell.error = Some(e.to_string());
            return cell;
        }
    };

    if matches!(spec.engine, Engine::Perturbation | Engine::Both) {
        match total_energy(&params, &state, &spec.units) {
            Ok(bd) => {
                let report = convergence_report(&params, &state, &spec.units)
                    .expect("total_energy succeeded");
                cell.trusted = report.trusted;
                cell.value = Some(spec.sign_convention.apply(bd.total));
                cell.breakdown = Some(bd);
                cell.convergence = Some(report);
            }
            Err(e) => cell.error = Some(e.to_string()),
        }
    }
    if matches!(spec.engine, Engine::Oracle | Engine::Both) {
        match solve_bound_state(&params, &state, &spec.units, &spec.solver) {
            Ok(res) => {
                cell.oracle_energy = Some(res.energy);
                cell.oracle_converged = Some(res.converged);
                if spec.engine == Engine::Oracle {
                    cell.value = Some(spec.sign_convention.apply(res.energy));
                    cell.trusted = res.converged;
                } else if let Some(bd) = &cell.breakdown {
                    cell.relative_gap =
                        Some((bd.total - res.energy).abs() / res.energy.abs().max(1e-300));
                }
            }
            Err(e) => {
                if cell.error.is_none() {
                    cell.error = Some(e.to_string());
                }
            }
        }
    }
    cell
}

fn worker_count(requested: Option<usize>, cells: usize) -> usize {
    let cap = requested
        .or_else(|| {
            std::env::var("HELLMANN_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });
    cap.clamp(1, cells.max(1))
}

impl TableResult {
    pub fn compute(spec: &TableSpec) -> Result<TableResult> {
        Self::compute_with_threads(spec, None)
    }

    /// Fill the grid with an explicit worker cap (tests pin this; the CLI
    /// passes `None` and lets `HELLMANN_THREADS` decide). Cell order in
    /// the output is spec order whatever the scheduling.
    pub fn compute_with_threads(spec: &TableSpec, threads: Option<usize>) -> Result<TableResult> {
        spec.validate()?;
        let work = spec.cells();
        let workers = worker_count(threads, work.len());
        let slots: Vec<OnceLock<CellResult>> = work.iter().map(|_| OnceLock::new()).collect();
        let next = AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= work.len() {
                        break;
                    }
                    let (label, b, d) = &work[i];
                    let cell = compute_cell(spec, label, *b, *d);
                    slots[i].set(cell).expect("each slot set once");
                });
            }
        });
        let cells = slots
            .into_iter()
            .map(|slot| slot.into_inner().expect("all cells computed"))
            .collect();
        Ok(TableResult {
            metadata: TableMetadata {
                generator: "hellmann".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                engine: spec.engine.as_str().into(),
                sign_convention: spec.sign_convention.as_str().into(),
                a: spec.a,
                hbar: spec.units.hbar(),
                mass: spec.units.mass(),
                config_hash: spec.config_hash(),
            },
            spec: spec.clone(),
            cells,
        })
    }

    /// Long-form CSV, one row per cell, full float precision (shortest
    /// round-trip formatting), RFC-4180 quoting.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# generator={} version={} engine={} sign={} a={} hbar={} mass={} config_hash={}\n",
            self.metadata.generator,
            self.metadata.version,
            self.metadata.engine,
            self.metadata.sign_convention,
            self.metadata.a,
            self.metadata.hbar,
            self.metadata.mass,
            self.metadata.config_hash
        ));
        out.push_str(
            "state,b,delta,value,e0,const_shift,e1,e2,e3,total,trusted,shift_ratio,e1_ratio,\
             e2_ratio,e3_ratio,oracle_energy,oracle_converged,relative_gap,error\n",
        );
        for c in &self.cells {
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            let bd = c.breakdown.as_ref();
            let cv = c.convergence.as_ref();
            let row = [
                csv_escape(&c.state),
                c.b.to_string(),
                c.delta.to_string(),
                opt(c.value),
                opt(bd.map(|b| b.e0)),
                opt(bd.map(|b| b.const_shift)),
                opt(bd.map(|b| b.e1)),
                opt(bd.map(|b| b.e2)),
                opt(bd.map(|b| b.e3)),
                opt(bd.map(|b| b.total)),
                c.trusted.to_string(),
                opt(cv.map(|r| r.shift_ratio)),
                opt(cv.map(|r| r.e1_ratio)),
                opt(cv.map(|r| r.e2_ratio)),
                opt(cv.map(|r| r.e3_ratio)),
                opt(c.oracle_energy),
                c.oracle_converged
                    .map(|v| v.to_string())
                    .unwrap_or_default(),
                opt(c.relative_gap),
                csv_escape(c.error.as_deref().unwrap_or("")),
            ];
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Stable-key-order JSON (struct field order), full float precision.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
        s.push('\n');
        s
    }

    /// Matrix layout in the style of the reference tables: states down
    /// the side, the varying parameter across, 6 significant digits,
    /// `*` marking cells whose expansion is untrusted.
    pub fn render_text(&self) -> String {
        let col_is_delta = self.spec.delta_values.len() > 1;
        let mut out = String::new();
        out.push_str(&format!(
            "# engine={} sign={} a={} config_hash={}\n",
            self.metadata.engine,
            self.metadata.sign_convention,
            self.metadata.a,
            self.metadata.config_hash
        ));
        let blocks: Vec<f64> = if col_is_delta {
            self.spec.b_values.clone()
        } else {
            self.spec.delta_values.clone()
        };
        let cols: Vec<f64> = if col_is_delta {
            self.spec.delta_values.clone()
        } else {
            self.spec.b_values.clone()
        };
        let mut any_untrusted = false;
        for &block in &blocks {
            if col_is_delta {
                out.push_str(&format!("b = {block}\n"));
            } else {
                out.push_str(&format!("delta = {block}\n"));
            }
            let head = if col_is_delta {
                "state\\delta"
            } else {
                "state\\b"
            };
            out.push_str(&format!("{head:>12}"));
            for &c in &cols {
                out.push_str(&format!(" {c:>13}"));
            }
            out.push('\n');
            for label in &self.spec.states {
                out.push_str(&format!("{label:>12}"));
                for &c in &cols {
                    let (b, d) = if col_is_delta { (block, c) } else { (c, block) };
                    let cell = self
                        .cells
                        .iter()
                        .find(|cell| cell.state == *label && cell.b == b && cell.delta == d);
                    let rendered = match cell {
                        Some(cell) => match cell.value {
                            Some(v) => {
                                let mark = if cell.trusted { "" } else { "*" };
                                if !cell.trusted {
                                    any_untrusted = true;
                                }
                                format!("{}{mark}", format_sig6(v))
                            }
                            None => "err".to_string(),
                        },
                        None => "-".to_string(),
                    };
                    out.push_str(&format!(" {rendered:>13}"));
                }
                out.push('\n');
            }
        }
        if any_untrusted {
            out.push_str("# * expansion untrusted at this cell (see convergence ratios)\n");
        }
        out
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Fixed 6-significant-digit decimal rendering (the reference tables'
/// precision), deterministic across platforms.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0.00000".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (5 - exponent).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding can carry into an extra digit (9.99999e-1 → "1.000000");
    // reformat once against the rounded value's own exponent.
    let rounded: f64 = s.parse().unwrap_or(x);
    if rounded != 0.0 {
        let e2 = rounded.abs().log10().floor() as i32;
        if e2 != exponent {
            let decimals = (5 - e2).max(0) as usize;
            return format!("{rounded:.decimals$}");
        }
    }
    s
}
