//! Command-line front end: single-level energy queries, table presets,
//! verification suites, eigensolver access and wavefunction dumps.
//!
//! Exit codes: 0 success, 2 usage error, 3 domain error (such as a ≤ b),
//! 4 verification breach, 5 numeric failure.

// `!(x > 0.0)` rejects NaN where `x <= 0.0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hellmann_core::oracle::{level_ordering_check, scan_spectrum, solve_bound_state, SolverConfig};
use hellmann_core::perturbation::{convergence_report, total_energy};
use hellmann_core::table::{Engine, SignConvention, TableResult, TableSpec};
use hellmann_core::verify::{
    run_oracle_suite, run_quadrature_suite, OracleSuiteConfig, QuadratureSuiteConfig,
};
use hellmann_core::{Error, ModeratedGroundState, PotentialParams, QuantumState, UnitSystem};

const EXIT_DOMAIN: u8 = 3;
const EXIT_VERIFY: u8 = 4;
const EXIT_NUMERIC: u8 = 5;

#[derive(Parser)]
#[command(
    name = "hellmann",
    version,
    about = "Bound states of the potential -a/r + b*exp(-delta*r)/r: \
             third-order screening expansion, integral cross-checks and a \
             direct eigensolver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form energy breakdown for one level
    Energy(EnergyArgs),
    /// Fill a (state x b x delta) grid and print or save it
    Table(TableArgs),
    /// Cross-validation suites; exits 4 on tolerance breach
    Verify(VerifyArgs),
    /// Direct eigensolver: single level, spectrum scan, or level ordering
    Oracle(OracleArgs),
    /// Sample the moderated ground-state wavefunction
    Wavefunction(WavefunctionArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args)]
struct PhysicsArgs {
    /// Coulomb strength
    #[arg(long, default_value_t = 2.0)]
    a: f64,
    /// Yukawa strength (any sign)
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    /// Screening parameter
    #[arg(long)]
    delta: f64,
    /// Planck constant
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    /// Particle mass (default makes hbar^2/2m = 1)
    #[arg(long, default_value_t = 0.5)]
    mass: f64,
}

impl PhysicsArgs {
    fn params(&self) -> Result<PotentialParams, Error> {
        PotentialParams::new(self.a, self.b, self.delta)
    }

    fn units(&self) -> Result<UnitSystem, Error> {
        UnitSystem::new(self.hbar, self.mass)
    }
}

#[derive(Args)]
struct StateArg {
    /// Spectroscopic label such as 1s or 4f (4f means n=0, l=3)
    #[arg(long, conflicts_with_all = ["n", "l"])]
    state: Option<String>,
    /// Radial quantum number (node count); pair with --l
    #[arg(long, requires = "l")]
    n: Option<u32>,
    /// Orbital angular momentum
    #[arg(long)]
    l: Option<u32>,
}

impl StateArg {
    fn resolve(&self) -> Result<QuantumState, Error> {
        match (&self.state, self.n, self.l) {
            (Some(label), None, None) => label.parse(),
            (None, Some(n), Some(l)) => Ok(QuantumState::new(n, l)),
            _ => Err(Error::InvalidParameter(
                "give either --state or both --n and --l".into(),
            )),
        }
    }
}

#[derive(Args)]
struct EnergyArgs {
    #[command(flatten)]
    physics: PhysicsArgs,
    #[command(flatten)]
    state: StateArg,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct TableArgs {
    /// Built-in grid: b-10-scan, delta-0.01-scan, high-states, delta-0.1-scan
    #[arg(long)]
    preset: Option<String>,
    /// Key-value configuration file describing the grid
    #[arg(long)]
    config: Option<String>,
    /// Comma-separated spectroscopic labels
    #[arg(long, value_delimiter = ',')]
    states: Vec<String>,
    /// Comma-separated Yukawa strengths
    #[arg(long = "b-values", value_delimiter = ',', allow_hyphen_values = true)]
    b_values: Vec<f64>,
    /// Comma-separated screening parameters
    #[arg(long = "delta-values", value_delimiter = ',')]
    delta_values: Vec<f64>,
    #[arg(long, default_value_t = 2.0)]
    a: f64,
    /// perturbation, oracle or both
    #[arg(long, default_value = "perturbation")]
    engine: String,
    /// binding (-E, table convention) or energy (E)
    #[arg(long = "sign-convention", default_value = "binding")]
    sign_convention: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to a file instead of stdout
    #[arg(long)]
    out: Option<String>,
    /// Fail (exit 5) if any cell errored
    #[arg(long)]
    strict: bool,
    /// Worker cap; HELLMANN_THREADS applies when unset
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// quadrature, oracle or all
    #[arg(value_parser = ["quadrature", "oracle", "all"], required_unless_present = "from_file")]
    mode: Option<String>,
    /// Restrict the suite to these states
    #[arg(long, value_delimiter = ',')]
    states: Vec<String>,
    /// Override the suite's b grid
    #[arg(long = "b-values", value_delimiter = ',', allow_hyphen_values = true)]
    b_values: Vec<f64>,
    /// Override the suite's delta grid
    #[arg(long = "delta", value_delimiter = ',')]
    delta_values: Vec<f64>,
    #[arg(long, default_value_t = 2.0)]
    a: f64,
    /// Override the oracle suite's relative tolerance
    #[arg(long = "rel-tol")]
    rel_tol: Option<f64>,
    /// Treat untrusted expansion cells as failures too
    #[arg(long)]
    strict: bool,
    /// Re-validate a stored table JSON instead of running a suite
    #[arg(long = "from-file")]
    from_file: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    physics: PhysicsArgs,
    #[command(flatten)]
    state: StateArg,
    /// Scan the lowest COUNT levels at fixed --l instead of one state
    #[arg(long, conflicts_with = "state")]
    count: Option<u32>,
    /// Check within-shell level ordering up to --shell-max
    #[arg(long)]
    ordering: bool,
    #[arg(long = "shell-max", default_value_t = 4)]
    shell_max: u32,
    #[arg(long = "l-max", default_value_t = 3)]
    l_max: u32,
    #[arg(long = "grid-points")]
    grid_points: Option<usize>,
    #[arg(long = "r-max")]
    r_max: Option<f64>,
    #[arg(long = "energy-tol")]
    energy_tol: Option<f64>,
    /// Print binding energies -E instead of E
    #[arg(long)]
    binding: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct WavefunctionArgs {
    #[command(flatten)]
    physics: PhysicsArgs,
    /// Nodeless state label (1s, 2p, 3d, ...)
    #[arg(long)]
    state: String,
    #[arg(long = "r-max", default_value_t = 40.0)]
    r_max: f64,
    #[arg(long, default_value_t = 400)]
    samples: usize,
    /// Rescale by the numerically computed norm
    #[arg(long)]
    normalize: bool,
    /// Write to a file instead of stdout
    #[arg(long)]
    out: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Energy(args) => cmd_energy(args),
        Command::Table(args) => cmd_table(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Wavefunction(args) => cmd_wavefunction(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_domain() {
                ExitCode::from(EXIT_DOMAIN)
            } else {
                ExitCode::from(EXIT_NUMERIC)
            }
        }
    }
}

fn emit(path: &Option<String>, content: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, content)
            .map_err(|e| Error::InvalidParameter(format!("cannot write {p}: {e}"))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_energy(args: EnergyArgs) -> Result<ExitCode, Error> {
    let params = args.physics.params()?;
    let units = args.physics.units()?;
    let state = args.state.resolve()?;
    let bd = total_energy(&params, &state, &units)?;
    let report = convergence_report(&params, &state, &units)?;
    match args.format {
        Format::Text => {
            println!("state          {state}");
            println!(
                "a, b, delta    {} {} {}",
                params.a(),
                params.b(),
                params.delta()
            );
            println!("e0             {}", bd.e0);
            println!("const_shift    {}", bd.const_shift);
            println!("e1             {}", bd.e1);
            println!("e2             {}", bd.e2);
            println!("e3             {}", bd.e3);
            println!("total          {}", bd.total);
            println!("binding        {}", bd.binding());
            println!(
                "ratios         shift={} e1={} e2={} e3={}",
                report.shift_ratio, report.e1_ratio, report.e2_ratio, report.e3_ratio
            );
            println!("trusted        {}", report.trusted);
            if !report.trusted {
                println!("warning        expansion untrusted at these parameters");
            }
        }
        Format::Csv => {
            println!("state,a,b,delta,e0,const_shift,e1,e2,e3,total,binding,trusted");
            println!(
                "{state},{},{},{},{},{},{},{},{},{},{},{}",
                params.a(),
                params.b(),
                params.delta(),
                bd.e0,
                bd.const_shift,
                bd.e1,
                bd.e2,
                bd.e3,
                bd.total,
                bd.binding(),
                report.trusted
            );
        }
        Format::Json => {
            let doc = serde_json::json!({
                "state": state.to_string(),
                "a": params.a(),
                "b": params.b(),
                "delta": params.delta(),
                "breakdown": bd,
                "convergence": report,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("serializes")
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_table(args: TableArgs) -> Result<ExitCode, Error> {
    let mut spec = if let Some(preset) = &args.preset {
        TableSpec::preset(preset)?
    } else if let Some(path) = &args.config {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read {path}: {e}")))?;
        TableSpec::from_config_text(&text)?
    } else {
        TableSpec {
            states: args.states.clone(),
            b_values: args.b_values.clone(),
            delta_values: args.delta_values.clone(),
            a: args.a,
            ..TableSpec::default()
        }
    };
    spec.engine = Engine::parse(&args.engine)?;
    spec.sign_convention = SignConvention::parse(&args.sign_convention)?;
    let table = TableResult::compute_with_threads(&spec, args.threads)?;
    let failures = table.cells.iter().filter(|c| c.error.is_some()).count();
    let rendered = match args.format {
        Format::Text => table.render_text(),
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    emit(&args.out, &rendered)?;
    if failures > 0 {
        eprintln!("{failures} cell(s) recorded errors");
        if args.strict {
            return Ok(ExitCode::from(EXIT_NUMERIC));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    if let Some(path) = &args.from_file {
        return verify_from_file(path, args.format);
    }
    let mode = args.mode.as_deref().expect("clap enforces mode");
    let mut breached = false;
    let mut json_doc = serde_json::Map::new();

    if mode == "quadrature" || mode == "all" {
        let mut cfg = QuadratureSuiteConfig::default();
        if !args.states.is_empty() {
            cfg.states = args.states.clone();
        }
        if !args.b_values.is_empty() {
            cfg.b_values = args.b_values.clone();
        }
        if !args.delta_values.is_empty() {
            cfg.delta_values = args.delta_values.clone();
        }
        cfg.a = args.a;
        let report = run_quadrature_suite(&cfg)?;
        breached |= !report.passed;
        match args.format {
            Format::Json => {
                json_doc.insert(
                    "quadrature".into(),
                    serde_json::to_value(&report).expect("serializes"),
                );
            }
            _ => {
                println!(
                    "quadrature suite: {} checks, {} breaches, max abs dev {:.3e}, \
                     max rel dev {:.3e} -> {}",
                    report.checks,
                    report.breaches,
                    report.max_abs_dev,
                    report.max_rel_dev,
                    if report.passed { "PASS" } else { "FAIL" }
                );
                for f in &report.findings {
                    println!("  finding: {f}");
                }
            }
        }
    }

    if mode == "oracle" || mode == "all" {
        let mut cfg = OracleSuiteConfig::default();
        if !args.states.is_empty() {
            cfg.states = args.states.clone();
        }
        if !args.b_values.is_empty() {
            cfg.b_values = args.b_values.clone();
        }
        if !args.delta_values.is_empty() {
            cfg.delta_values = args.delta_values.clone();
        }
        cfg.a = args.a;
        cfg.rel_tol = args.rel_tol;
        cfg.strict = args.strict;
        let report = run_oracle_suite(&cfg)?;
        breached |= !report.passed;
        match args.format {
            Format::Json => {
                json_doc.insert(
                    "oracle".into(),
                    serde_json::to_value(&report).expect("serializes"),
                );
            }
            _ => {
                println!(
                    "oracle suite: {} cells, {} breaches, {} untrusted warned, \
                     max trusted rel gap {:.3e} -> {}",
                    report.cells.len(),
                    report.breaches,
                    report.warnings,
                    report.max_rel_gap,
                    if report.passed { "PASS" } else { "FAIL" }
                );
                for cell in report.cells.iter().filter(|c| c.breach || !c.trusted) {
                    println!(
                        "  {} b={} delta={}: oracle {} vs expansion {} (rel gap {:.3e}){}",
                        cell.state,
                        cell.b,
                        cell.delta,
                        cell.oracle_energy,
                        cell.perturbative,
                        cell.rel_gap,
                        if cell.trusted { "" } else { " [untrusted]" }
                    );
                }
            }
        }
    }

    if matches!(args.format, Format::Json) {
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::Value::Object(json_doc)).expect("serializes")
        );
    }
    Ok(if breached {
        ExitCode::from(EXIT_VERIFY)
    } else {
        ExitCode::SUCCESS
    })
}

fn verify_from_file(path: &str, format: Format) -> Result<ExitCode, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {path}: {e}")))?;
    let stored: TableResult = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidParameter(format!("cannot parse {path}: {e}")))?;
    let recomputed = TableResult::compute(&stored.spec)?;
    let mut mismatches = Vec::new();
    if recomputed.metadata.config_hash != stored.metadata.config_hash {
        mismatches.push("config hash differs".to_string());
    }
    if recomputed.cells.len() != stored.cells.len() {
        mismatches.push(format!(
            "cell count differs: stored {} vs recomputed {}",
            stored.cells.len(),
            recomputed.cells.len()
        ));
    } else {
        for (s, r) in stored.cells.iter().zip(recomputed.cells.iter()) {
            if s != r {
                mismatches.push(format!(
                    "cell ({}, b={}, delta={}) does not reproduce",
                    s.state, s.b, s.delta
                ));
            }
        }
    }
    match format {
        Format::Json => {
            let doc = serde_json::json!({
                "file": path,
                "cells": stored.cells.len(),
                "mismatches": mismatches,
                "passed": mismatches.is_empty(),
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("serializes")
            );
        }
        _ => {
            if mismatches.is_empty() {
                println!(
                    "{path}: all {} cells reproduce bit-identically",
                    stored.cells.len()
                );
            } else {
                for m in &mismatches {
                    println!("mismatch: {m}");
                }
            }
        }
    }
    Ok(if mismatches.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY)
    })
}

fn cmd_oracle(args: OracleArgs) -> Result<ExitCode, Error> {
    let params = args.physics.params()?;
    let units = args.physics.units()?;
    let mut solver = SolverConfig::default();
    if let Some(g) = args.grid_points {
        solver.grid_points = g;
    }
    solver.r_max = args.r_max;
    if let Some(t) = args.energy_tol {
        solver.energy_tol = t;
    }
    solver.validate()?;
    let render = |e: f64| if args.binding { -e } else { e };

    if args.ordering {
        let report = level_ordering_check(&params, &units, &solver, args.shell_max, args.l_max)?;
        match args.format {
            Format::Json => println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("serializes")
            ),
            _ => {
                println!(
                    "level ordering: {} comparisons, {} violations",
                    report.comparisons,
                    report.violations.len()
                );
                for (shell, l, e) in &report.energies {
                    println!("  shell {shell} l={l}: {}", render(*e));
                }
                for v in &report.violations {
                    println!(
                        "  violation in shell {}: l={} ({}) vs l={} ({})",
                        v.shell, v.lower_l, v.lower_energy, v.upper_l, v.upper_energy
                    );
                }
                for w in &report.crossings {
                    println!(
                        "  crossing witness: (shell {}, l={}) at {} sits below \
                         (shell {}, l={}) at {}",
                        w.lower.0, w.lower.1, w.lower_energy, w.upper.0, w.upper.1, w.upper_energy
                    );
                }
            }
        }
        return Ok(if report.ok() {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(EXIT_VERIFY)
        });
    }

    if let Some(count) = args.count {
        let l = args.state.l.ok_or_else(|| {
            Error::InvalidParameter("--count scans need --l for the angular momentum".into())
        })?;
        let scan = scan_spectrum(&params, l, &units, &solver, count)?;
        match args.format {
            Format::Json => println!(
                "{}",
                serde_json::to_string_pretty(&scan).expect("serializes")
            ),
            Format::Csv => {
                println!("n,l,energy,nodes,converged,residual");
                for (n, level) in scan.levels.iter().enumerate() {
                    println!(
                        "{n},{l},{},{},{},{}",
                        render(level.energy),
                        level.nodes,
                        level.converged,
                        level.residual
                    );
                }
            }
            Format::Text => {
                for (n, level) in scan.levels.iter().enumerate() {
                    println!(
                        "n={n} l={l}: {} (nodes {}, converged {}, residual {:.2e})",
                        render(level.energy),
                        level.nodes,
                        level.converged,
                        level.residual
                    );
                }
                if !scan.complete {
                    println!("scan truncated: fewer bound levels than requested");
                }
            }
        }
        return Ok(ExitCode::SUCCESS);
    }

    let state = args.state.resolve()?;
    let res = solve_bound_state(&params, &state, &units, &solver)?;
    match args.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&res).expect("serializes")
        ),
        Format::Csv => {
            println!("state,energy,nodes,converged,residual,r_max");
            println!(
                "{state},{},{},{},{},{}",
                render(res.energy),
                res.nodes,
                res.converged,
                res.residual,
                res.r_max
            );
        }
        Format::Text => {
            println!("state       {state}");
            println!("energy      {}", res.energy);
            println!("binding     {}", res.binding());
            println!("nodes       {}", res.nodes);
            println!("converged   {}", res.converged);
            println!("residual    {:.3e}", res.residual);
            println!("r_max       {}", res.r_max);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_wavefunction(args: WavefunctionArgs) -> Result<ExitCode, Error> {
    let params = args.physics.params()?;
    let units = args.physics.units()?;
    let state: QuantumState = args.state.parse()?;
    let moderated = ModeratedGroundState::new(&params, state, &units)?;
    if args.samples < 2 {
        return Err(Error::InvalidParameter("need at least 2 samples".into()));
    }
    if !(args.r_max > 0.0) {
        return Err(Error::InvalidParameter("r-max must be positive".into()));
    }
    let norm = if args.normalize {
        Some(moderated.norm_over(args.r_max)?)
    } else {
        None
    };
    let m = moderated.moderator();
    let mut out = String::new();
    out.push_str(&format!(
        "# generator=hellmann version={} state={state} a={} b={} delta={} hbar={} mass={}\n",
        env!("CARGO_PKG_VERSION"),
        params.a(),
        params.b(),
        params.delta(),
        units.hbar(),
        units.mass()
    ));
    out.push_str(&format!(
        "# p2={} p3={} c={} beta={}\n",
        m.p2,
        m.p3,
        m.c,
        moderated.coulomb().beta()
    ));
    if let Some(n) = norm {
        out.push_str(&format!("# normalized: dividing psi by {n}\n"));
    }
    if let Some(rv) = moderated.validity_radius() {
        out.push_str(&format!(
            "# warning: moderating exponent grows beyond r = {rv}; \
             samples past that radius are not physical\n"
        ));
    }
    out.push_str("r,chi_coulomb,psi_moderated,u\n");
    let scale = norm.unwrap_or(1.0);
    for i in 0..args.samples {
        let r = args.r_max * (i as f64 + 1.0) / args.samples as f64;
        let chi = moderated.coulomb().eval(r);
        let psi = moderated.eval(r) / scale;
        let u = moderated.moderating_factor(r);
        out.push_str(&format!("{r},{chi},{psi},{u}\n"));
    }
    emit(&args.out, &out)?;
    if moderated.validity_radius().is_some() {
        eprintln!("warning: moderating factor diverges; see header for the validity radius");
    }
    Ok(ExitCode::SUCCESS)
}
