use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use skdv::boundary_ops::{cross_validate_linear, CrossValidation, LinearOperator, ValidationReport};
use skdv::config::{load_with_overrides, with_overrides};
use skdv::convergence::{convergence_study, ConvergenceReport, ConvergenceStudy};
use skdv::output::{write_artifacts, write_report};
use skdv::scenarios::{run_scenario, Theorem};
use skdv::stepper::run;
use skdv::{Direction, Error};

const OK: u8 = 0;
const USAGE: u8 = 1;
const FAIL: u8 = 2;
const HALTED: u8 = 4;

/// Schrödinger–KdV half-line solver and experiment driver.
#[derive(Debug, Parser)]
#[command(name = "skdv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the problem described by a TOML config.
    Run {
        config: PathBuf,
        /// key=value, e.g. time.dt=1e-3
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run a growth-bound scenario and write its verdict.
    Scenario {
        #[arg(value_enum)]
        name: ScenarioName,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Cross-check the boundary operators against the linear steppers.
    ValidateBoundaryOps {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Manufactured-solution convergence study.
    Converge {
        #[arg(long, value_enum, default_value = "both")]
        direction: Side,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Print Ai(x).
    Airy {
        #[arg(allow_negative_numbers = true)]
        x: f64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScenarioName {
    T13,
    T14a,
    T14b,
}

impl From<ScenarioName> for Theorem {
    fn from(s: ScenarioName) -> Self {
        match s {
            ScenarioName::T13 => Theorem::T13,
            ScenarioName::T14a => Theorem::T14a,
            ScenarioName::T14b => Theorem::T14b,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Side {
    Right,
    Left,
    Both,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::NonFinite { .. }) { HALTED } else { USAGE })
        }
    }
}

fn dispatch(cmd: Command) -> skdv::Result<u8> {
    match cmd {
        Command::Run { config, overrides, out } => run_config(&config, &overrides, &out),
        Command::Scenario { name, overrides, out } => scenario(name.into(), &overrides, &out),
        Command::ValidateBoundaryOps { out } => validate(&out),
        Command::Converge { direction, out } => converge(direction, &out),
        Command::Airy { x } => {
            println!("{:.10}", skdv::airy::airy_ai(x)?);
            Ok(OK)
        }
    }
}

fn run_config(path: &Path, overrides: &[String], out: &Path) -> skdv::Result<u8> {
    let config = load_with_overrides(path, overrides)?;
    let outcome = run(&config)?;
    write_artifacts(out, &config, Some(&outcome), None)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(r) = &outcome.residuals {
        println!("r_mass {:.3e}  r_moment {:.3e}  r_energy {:.3e}", r.r_mass, r.r_moment, r.r_energy);
    }
    if let Some(h) = &outcome.halt {
        eprintln!("halted at t = {}: {}", h.t, h.reason);
        return Ok(HALTED);
    }
    Ok(OK)
}

fn scenario(theorem: Theorem, overrides: &[String], out: &Path) -> skdv::Result<u8> {
    let config = with_overrides(&theorem.default_config(), overrides)?;
    let s = run_scenario(theorem, &config)?;
    write_artifacts(out, &config, s.run.as_ref(), Some(&s.verdict))?;
    let v = &s.verdict;
    println!("{theorem}: {}", v.status);
    println!("  Q0 = {:.6e}  E0 = {:.6e}", v.hypotheses.q0, v.hypotheses.e0);
    if let (Some(gap), Some(beta)) = (v.hypotheses.q0_minus_8e0, v.hypotheses.beta_minus_2_alpha_gamma) {
        println!("  Q0 - 8E0 = {gap:.6e}  beta - 2|alpha gamma| = {beta:.6e}");
    }
    for f in &v.hypotheses.failures {
        println!("  gate: {f}");
    }
    for c in &v.checks {
        println!("  {}: margin {:.6e} (slack {:.3e})", c.name, c.margin, v.slack);
    }
    for n in &v.notes {
        println!("  note: {n}");
    }
    Ok(v.exit_code() as u8)
}

fn validate(out: &Path) -> skdv::Result<u8> {
    let cases = [
        (LinearOperator::L, Direction::Right),
        (LinearOperator::L, Direction::Left),
        (LinearOperator::V, Direction::Right),
    ];
    let mut reports: Vec<ValidationReport> = Vec::new();
    let mut ok = true;
    for (op, dir) in cases {
        let r = cross_validate_linear(&CrossValidation::standard(op, dir))?;
        let pass = r.trace_error <= 1e-3 && r.pde_residual <= 1e-3 && (1.8..=2.2).contains(&r.convergence_order);
        println!(
            "{op:?} {dir}: trace {:.2e}  pde {:.2e}  order {:.3}  constant {:.6}  {}",
            r.trace_error,
            r.pde_residual,
            r.convergence_order,
            r.normalization_constant,
            if pass { "pass" } else { "FAIL" }
        );
        ok &= pass;
        reports.push(r);
    }
    write_report(&out.join("boundary_ops.json"), &reports)?;
    Ok(if ok { OK } else { FAIL })
}

fn converge(side: Side, out: &Path) -> skdv::Result<u8> {
    let dirs = match side {
        Side::Right => vec![Direction::Right],
        Side::Left => vec![Direction::Left],
        Side::Both => vec![Direction::Right, Direction::Left],
    };
    let mut reports: Vec<ConvergenceReport> = Vec::new();
    let mut ok = true;
    for d in dirs {
        let r = convergence_study(&ConvergenceStudy::standard(d))?;
        let pass = r.monotone && r.order.is_some_and(|p| (1.8..=2.2).contains(&p));
        let errs: Vec<String> = r.levels.iter().map(|l| format!("{:.3e}", l.error)).collect();
        println!(
            "{d}: errors [{}]  order {}  {}",
            errs.join(", "),
            r.order.map_or("n/a".into(), |p| format!("{p:.3}")),
            if pass { "pass" } else { "FAIL" }
        );
        for w in &r.warnings {
            eprintln!("warning: {w}");
        }
        ok &= pass;
        reports.push(r);
    }
    write_report(&out.join("convergence.json"), &reports)?;
    Ok(if ok { OK } else { FAIL })
}
