//! Growth-bound experiments on the nonlinear problems and their verdicts.
//!
//! * `T13`: right half-line, αγ > 0, Q₀ < 0. The weighted norms grow at
//!   least linearly: w(t) ≥ |Q₀| t + w(0), checked for both ∫x|u|² and
//!   ∫x²|u|².
//! * `T14a`: left half-line, αγ < 0, Q₀ > 0: ∫|x||u|² ≥ Q₀ t + w(0).
//! * `T14b`: left half-line, αγ < 0, Q₀ > 8E₀, β ≥ 2|αγ|: the running
//!   supremum of P dominates ((Q₀ − 8E₀)/2) t − η'(0) − η(0)/t on [T/2, T].
//!
//! Every check carries a slack of 5% of the predicted growth over the run.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::diagnostics::{energy_e, moment_q, LawResiduals, Snapshot};
use crate::error::{Error, Result};
use crate::grid::{init_state, CouplingParams, CouplingSign, Direction, HalfLineGrid};
use crate::profile::Profile;
use crate::signals::BoundarySignals;
use crate::stepper::{run, GridSpec, Halt, InitialSpec, RunOutcome, SimConfig, TimeSpec};

/// Relative slack on every growth inequality.
pub const SLACK_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Theorem {
    T13,
    T14a,
    T14b,
}

impl FromStr for Theorem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "t13" => Ok(Theorem::T13),
            "t14a" => Ok(Theorem::T14a),
            "t14b" => Ok(Theorem::T14b),
            _ => Err(Error::Config(format!("unknown scenario `{s}` (expected t13, t14a or t14b)"))),
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Theorem::T13 => "T13",
            Theorem::T14a => "T14a",
            Theorem::T14b => "T14b",
        };
        f.write_str(s)
    }
}

impl Theorem {
    /// Default configuration of the scenario.
    pub fn default_config(self) -> SimConfig {
        let params = |a, b, g| CouplingParams::new(a, b, g).expect("valid constants");
        match self {
            Theorem::T13 => SimConfig {
                tag: "t13".into(),
                grid: GridSpec { direction: Direction::Right, length: 50.0, cells: 2048 },
                coupling: params(1.0, 1.0, 1.0),
                boundary: BoundarySignals::homogeneous(),
                initial: InitialSpec {
                    u0: Profile::Gaussian { amplitude: 1.0, center: 10.0, width: 1.0, wavenumber: 1.0 },
                    v0: Profile::Zero,
                },
                time: TimeSpec { dt: 2.5e-4, t_final: 1.0, stride: 4 },
                forcing: None,
            },
            Theorem::T14a => SimConfig {
                tag: "t14a".into(),
                grid: GridSpec { direction: Direction::Left, length: 50.0, cells: 2048 },
                coupling: params(1.0, 2.0, -1.0),
                boundary: BoundarySignals::homogeneous(),
                initial: InitialSpec {
                    u0: Profile::Gaussian { amplitude: 1.0, center: -10.0, width: 1.0, wavenumber: -1.0 },
                    v0: Profile::Zero,
                },
                time: TimeSpec { dt: 2.5e-4, t_final: 1.0, stride: 4 },
                forcing: None,
            },
            // Q₀ > 8E₀ needs a broad, weak packet with |k| near 1/8, which in
            // turn has to sit far from the boundary.
            Theorem::T14b => SimConfig {
                tag: "t14b".into(),
                grid: GridSpec { direction: Direction::Left, length: 200.0, cells: 2000 },
                coupling: params(1.0, 3.0, -1.0),
                boundary: BoundarySignals::homogeneous(),
                initial: InitialSpec {
                    u0: Profile::Gaussian { amplitude: 0.08, center: -90.0, width: 16.0, wavenumber: -0.125 },
                    v0: Profile::Zero,
                },
                time: TimeSpec { dt: 1e-3, t_final: 10.0, stride: 10 },
                forcing: None,
            },
        }
    }

    fn direction(self) -> Direction {
        match self {
            Theorem::T13 => Direction::Right,
            Theorem::T14a | Theorem::T14b => Direction::Left,
        }
    }

    fn coupling_sign(self) -> CouplingSign {
        match self {
            Theorem::T13 => CouplingSign::Positive,
            Theorem::T14a | Theorem::T14b => CouplingSign::Negative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    Pass,
    Fail,
    HypothesesNotMet,
    Halted,
}

impl VerdictStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            VerdictStatus::Pass => 0,
            VerdictStatus::Fail => 2,
            VerdictStatus::HypothesesNotMet => 3,
            VerdictStatus::Halted => 4,
        }
    }
}

impl fmt::Display for VerdictStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VerdictStatus::Pass => "pass",
            VerdictStatus::Fail => "fail",
            VerdictStatus::HypothesesNotMet => "hypotheses not met",
            VerdictStatus::Halted => "halted",
        };
        f.write_str(s)
    }
}

/// Gate values computed from the configured data.
#[derive(Debug, Clone, Serialize)]
pub struct Hypotheses {
    pub direction: Direction,
    pub direction_ok: bool,
    pub coupling_sign: CouplingSign,
    pub coupling_ok: bool,
    pub homogeneous: bool,
    pub q0: f64,
    pub e0: f64,
    pub q0_ok: bool,
    /// Q₀ − 8E₀ (T14b only).
    pub q0_minus_8e0: Option<f64>,
    /// β − 2|αγ| (T14b only).
    pub beta_minus_2_alpha_gamma: Option<f64>,
    pub satisfied: bool,
    pub failures: Vec<String>,
}

/// One inequality sampled along the run.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub t: Vec<f64>,
    pub predicted: Vec<f64>,
    pub observed: Vec<f64>,
    /// min over samples of observed − predicted.
    pub margin: f64,
}

impl BoundCheck {
    fn new(name: &str, t: Vec<f64>, predicted: Vec<f64>, observed: Vec<f64>) -> Self {
        let margin = observed.iter().zip(&predicted).map(|(o, p)| o - p).fold(f64::INFINITY, f64::min);
        Self { name: name.into(), t, predicted, observed, margin }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremVerdict {
    pub theorem: Theorem,
    pub status: VerdictStatus,
    pub hypotheses: Hypotheses,
    pub slack: f64,
    /// Smallest margin over all checks.
    pub margin: Option<f64>,
    pub checks: Vec<BoundCheck>,
    /// max |M(t) − M(0)| / M(0).
    pub mass_drift: Option<f64>,
    pub residuals: Option<LawResiduals>,
    pub halt: Option<Halt>,
    pub notes: Vec<String>,
}

impl TheoremVerdict {
    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }
}

#[derive(Debug)]
pub struct ScenarioOutcome {
    pub verdict: TheoremVerdict,
    /// Absent when the gates fail; nothing is integrated then.
    pub run: Option<RunOutcome>,
}

/// Evaluates the hypotheses of `theorem` on the configured data.
pub fn check_hypotheses(theorem: Theorem, config: &SimConfig) -> Result<Hypotheses> {
    let g = &config.grid;
    let grid = HalfLineGrid::new(g.direction, g.length, g.cells)?;
    let signals = config.boundary.resolve()?;
    let state = init_state(&grid, &config.initial.u0, &config.initial.v0, Some(&signals))?;
    let p = &config.coupling;
    let q0 = moment_q(&grid, &state, p);
    let e0 = energy_e(&grid, &state, p);

    let mut failures = Vec::new();
    let direction_ok = g.direction == theorem.direction();
    if !direction_ok {
        failures.push(format!("direction must be {}", theorem.direction()));
    }
    let coupling_ok = p.sign_product() == theorem.coupling_sign();
    if !coupling_ok {
        failures.push(format!("alpha*gamma must be {:?}", theorem.coupling_sign()).to_lowercase());
    }
    let homogeneous = config.boundary.is_homogeneous() && config.forcing.is_none();
    if !homogeneous {
        failures.push("boundary data must vanish".into());
    }
    let (q0_ok, q0_minus_8e0, beta_gap) = match theorem {
        Theorem::T13 => (q0 < 0.0, None, None),
        Theorem::T14a => (q0 > 0.0, None, None),
        Theorem::T14b => {
            let gap = q0 - 8.0 * e0;
            let beta_gap = p.beta() - 2.0 * (p.alpha() * p.gamma()).abs();
            if beta_gap < 0.0 {
                failures.push(format!("beta - 2|alpha gamma| = {beta_gap:.6e} < 0"));
            }
            (gap > 0.0, Some(gap), Some(beta_gap))
        }
    };
    if !q0_ok {
        failures.push(match theorem {
            Theorem::T13 => format!("Q0 = {q0:.6e} is not negative"),
            Theorem::T14a => format!("Q0 = {q0:.6e} is not positive"),
            Theorem::T14b => format!("Q0 - 8E0 = {:.6e} is not positive", q0 - 8.0 * e0),
        });
    }
    Ok(Hypotheses {
        direction: g.direction,
        direction_ok,
        coupling_sign: p.sign_product(),
        coupling_ok,
        homogeneous,
        q0,
        e0,
        q0_ok,
        q0_minus_8e0,
        beta_minus_2_alpha_gamma: beta_gap,
        satisfied: failures.is_empty(),
        failures,
    })
}

fn mass_drift(snapshots: &[Snapshot]) -> f64 {
    let m0 = snapshots[0].mass;
    let scale = m0.abs().max(f64::MIN_POSITIVE);
    snapshots.iter().map(|s| (s.mass - m0).abs() / scale).fold(0.0, f64::max)
}

fn linear_check(name: &str, snaps: &[Snapshot], rate: f64, w: impl Fn(&Snapshot) -> f64) -> BoundCheck {
    let w0 = w(&snaps[0]);
    let t: Vec<f64> = snaps.iter().map(|s| s.t).collect();
    let predicted = t.iter().map(|t| rate * t + w0).collect();
    let observed = snaps.iter().map(w).collect();
    BoundCheck::new(name, t, predicted, observed)
}

/// sup_{s ≤ t} P(s) against ((Q₀ − 8E₀)/2) t − η'(0) − η(0)/t for t ≥ T/2.
fn chain_check(snaps: &[Snapshot], gap: f64, eta0: f64, eta_d1: f64, t_final: f64) -> BoundCheck {
    let (mut t, mut predicted, mut observed) = (Vec::new(), Vec::new(), Vec::new());
    let mut sup = f64::NEG_INFINITY;
    for s in snaps {
        sup = sup.max(s.p);
        if s.t >= 0.5 * t_final && s.t > 0.0 {
            t.push(s.t);
            predicted.push(0.5 * gap * s.t - eta_d1 - eta0 / s.t);
            observed.push(sup);
        }
    }
    BoundCheck::new("sup P >= (Q0 - 8E0) t / 2 - eta'(0) - eta(0) / t", t, predicted, observed)
}

fn decide(halted: bool, checks: &[BoundCheck], slack: f64) -> VerdictStatus {
    if halted {
        VerdictStatus::Halted
    } else if checks.iter().all(|c| c.margin >= -slack) {
        VerdictStatus::Pass
    } else {
        VerdictStatus::Fail
    }
}

/// Runs one scenario. The integration is skipped when a gate fails.
pub fn run_scenario(theorem: Theorem, config: &SimConfig) -> Result<ScenarioOutcome> {
    config.validate()?;
    let hypotheses = check_hypotheses(theorem, config)?;
    let t_final = config.time.t_final;
    let mut verdict = TheoremVerdict {
        theorem,
        status: VerdictStatus::HypothesesNotMet,
        hypotheses,
        slack: 0.0,
        margin: None,
        checks: Vec::new(),
        mass_drift: None,
        residuals: None,
        halt: None,
        notes: Vec::new(),
    };
    if !verdict.hypotheses.satisfied {
        return Ok(ScenarioOutcome { verdict, run: None });
    }

    let out = run(config)?;
    let h = &verdict.hypotheses;
    verdict.mass_drift = Some(mass_drift(&out.snapshots));
    verdict.residuals = out.residuals;
    verdict.notes.extend(out.warnings.iter().cloned());
    let snaps = &out.snapshots;
    match theorem {
        Theorem::T13 => {
            let rate = h.q0.abs();
            verdict.slack = SLACK_FRACTION * rate * t_final;
            verdict.checks.push(linear_check("w_u2 >= |Q0| t + w_u2(0)", snaps, rate, |s| s.w_u2));
            verdict.checks.push(linear_check("w_u1 >= |Q0| t + w_u1(0)", snaps, rate, |s| s.w_u1));
        }
        Theorem::T14a => {
            let rate = h.q0;
            verdict.slack = SLACK_FRACTION * rate * t_final;
            verdict.checks.push(linear_check("w_u1 >= Q0 t + w_u1(0)", snaps, rate, |s| s.w_u1));
        }
        Theorem::T14b => {
            let gap = h.q0_minus_8e0.unwrap_or(f64::NAN);
            let (eta0, eta_d1) =
                out.initial_virial.ok_or_else(|| Error::Direction("virial data need the left half-line".into()))?;
            verdict.slack = SLACK_FRACTION * 0.5 * gap * t_final;
            let check = chain_check(snaps, gap, eta0, eta_d1, t_final);
            if check.predicted.iter().all(|p| *p <= 0.0) {
                verdict.notes.push(format!(
                    "chain lower bound is nonpositive on [T/2, T] (eta(0) = {eta0:.6e}, eta'(0) = {eta_d1:.6e}); the check is not sharp for these data"
                ));
            }
            verdict.checks.push(check);
            if let Some(r) = out.residuals.and_then(|r| r.r_virial) {
                verdict.notes.push(format!("virial identity residual at mid-run: {r:.3e}"));
            }
        }
    }
    verdict.margin = verdict.checks.iter().map(|c| c.margin).reduce(f64::min);
    verdict.halt = out.halt.clone();
    verdict.status = decide(out.halt.is_some(), &verdict.checks, verdict.slack);
    Ok(ScenarioOutcome { verdict, run: Some(out) })
}
