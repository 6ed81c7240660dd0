//! Strang-split integration of the coupled system
//!
//! i u_t + u_xx = α u v + β u|u|²,   v_t + v_xxx + v v_x = γ (|u|²)_x
//!
//! around the Crank–Nicolson linear propagators. One step is
//! (a)(b) L (b)(a) with half steps for (a), (b):
//!
//! (a) u ← u e^{−iτ(αv + β|u|²)}, exact with v frozen;
//! (b) v_t = ∂_x(−v²/2 + γ|u|²) by one Heun step, u frozen;
//! L   the full linear step with boundary data at t and t + dt.
//!
//! Nonlinear substeps leave the boundary rows alone.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{analyze, initial_virial_data, snapshot, FunctionalRecord, LawResiduals, Snapshot};
use crate::error::{Error, Result};
use crate::grid::{init_state, CouplingParams, Direction, FieldState, HalfLineGrid};
use crate::profile::Profile;
use crate::propagators::{KdvBoundary, KdvCn, SchrodingerCn};
use crate::signals::BoundarySignals;
use crate::stencil::derivative;

type C = Complex64;

/// Initial data must stay below this on the outer band at t = 0.
pub const OUTER_BAND_INITIAL: f64 = 1e-10;
/// Warn once the outer band exceeds this during a run.
pub const OUTER_BAND_WARN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub direction: Direction,
    pub length: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    #[serde(default = "zero_profile")]
    pub u0: Profile,
    #[serde(default = "zero_profile")]
    pub v0: Profile,
}

fn zero_profile() -> Profile {
    Profile::Zero
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub dt: f64,
    pub t_final: f64,
    /// Diagnostics every `stride` steps.
    #[serde(default = "one")]
    pub stride: usize,
}

fn one() -> usize {
    1
}

/// Source terms (F_u, F_v) added to u_t and v_t; used by manufactured
/// solutions.
#[derive(Clone)]
pub struct Forcing(pub Arc<dyn Fn(f64, f64) -> (C, f64) + Send + Sync>);

impl fmt::Debug for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Forcing")
    }
}

/// Everything that defines a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default)]
    pub tag: String,
    pub grid: GridSpec,
    pub coupling: CouplingParams,
    #[serde(default)]
    pub boundary: BoundarySignals,
    pub initial: InitialSpec,
    pub time: TimeSpec,
    #[serde(skip)]
    pub forcing: Option<Forcing>,
}

impl SimConfig {
    pub fn validate(&self) -> Result<usize> {
        let t = &self.time;
        if !(t.dt > 0.0) || !t.dt.is_finite() {
            return Err(Error::Config(format!("dt must be positive, got {}", t.dt)));
        }
        if !(t.t_final >= 0.0) || !t.t_final.is_finite() {
            return Err(Error::Config(format!("t_final must be nonnegative, got {}", t.t_final)));
        }
        if t.stride == 0 {
            return Err(Error::Config("stride must be at least 1".into()));
        }
        let steps = (t.t_final / t.dt).round();
        if (steps * t.dt - t.t_final).abs() > 1e-9 * t.t_final.max(1.0) {
            return Err(Error::Config(format!("t_final = {} is not a multiple of dt = {}", t.t_final, t.dt)));
        }
        if steps == 1.0 {
            return Err(Error::Config("t_final must be 0 or span at least two steps".into()));
        }
        HalfLineGrid::new(self.grid.direction, self.grid.length, self.grid.cells)?;
        Ok(steps as usize)
    }
}

/// Pointwise phase rotation u ← u e^{−iτ(αv + β|u|²)} on all nodes except
/// the two ends.
pub fn phase_rotation(state: &mut FieldState, tau: f64, params: &CouplingParams) {
    let n = state.u.len();
    let (a, b) = (params.alpha(), params.beta());
    for j in 1..n - 1 {
        let u = state.u[j];
        let theta = -tau * (a * state.v[j] + b * u.norm_sqr());
        state.u[j] = u * C::from_polar(1.0, theta);
    }
}

/// One Heun step of v_t = ∂_x(−v²/2 + γ|u|²); nodes listed in `frozen`
/// keep their values.
pub fn kdv_transport(grid: &HalfLineGrid, state: &mut FieldState, tau: f64, gamma: f64, frozen: &[usize]) {
    let m: Vec<f64> = state.u.iter().map(|z| gamma * z.norm_sqr()).collect();
    let rate = |v: &[f64]| {
        let flux: Vec<f64> = v.iter().zip(&m).map(|(v, m)| m - 0.5 * v * v).collect();
        derivative(&flux, grid.h(), grid.sign())
    };
    let k1 = rate(&state.v);
    let mut v1 = state.v.clone();
    for j in 0..v1.len() {
        if !frozen.contains(&j) {
            v1[j] += tau * k1[j];
        }
    }
    let k2 = rate(&v1);
    for j in 0..v1.len() {
        if !frozen.contains(&j) {
            state.v[j] += 0.5 * tau * (k1[j] + k2[j]);
        }
    }
}

/// The coupled stepper: caches the two linear solvers for one grid.
#[derive(Debug, Clone)]
pub struct CoupledStepper {
    grid: HalfLineGrid,
    params: CouplingParams,
    signals: BoundarySignals,
    forcing: Option<Forcing>,
    schrodinger: SchrodingerCn,
    kdv: KdvCn,
    frozen: Vec<usize>,
}

impl CoupledStepper {
    pub fn new(
        grid: &HalfLineGrid,
        params: CouplingParams,
        signals: BoundarySignals,
        forcing: Option<Forcing>,
    ) -> Self {
        let kdv = KdvCn::new(grid);
        let frozen = kdv.constrained_nodes();
        Self { grid: grid.clone(), params, signals, forcing, schrodinger: SchrodingerCn::new(grid), kdv, frozen }
    }

    pub fn grid(&self) -> &HalfLineGrid {
        &self.grid
    }

    fn kdv_bc(&self, t: f64) -> KdvBoundary {
        KdvBoundary { g: self.signals.g.real(t), h: self.signals.h.real(t) }
    }

    /// Enforces the derivative closures of the KdV rows at time t.
    pub fn impose_closures(&self, state: &mut FieldState) {
        self.kdv.reimpose_closures(&mut state.v, self.kdv_bc(state.t));
    }

    fn check(state: &FieldState) -> Result<()> {
        if state.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite { t: state.t })
        }
    }

    /// (a) then (b) over τ, with the closures taken at time `t_bc`.
    pub fn nonlinear_substep(&self, state: &mut FieldState, tau: f64, t_bc: f64) -> Result<()> {
        phase_rotation(state, tau, &self.params);
        kdv_transport(&self.grid, state, tau, self.params.gamma(), &self.frozen);
        self.kdv.reimpose_closures(&mut state.v, self.kdv_bc(t_bc));
        Self::check(state)
    }

    /// (b) then (a), the mirror of [`nonlinear_substep`](Self::nonlinear_substep).
    pub fn nonlinear_substep_reversed(&self, state: &mut FieldState, tau: f64, t_bc: f64) -> Result<()> {
        kdv_transport(&self.grid, state, tau, self.params.gamma(), &self.frozen);
        self.kdv.reimpose_closures(&mut state.v, self.kdv_bc(t_bc));
        phase_rotation(state, tau, &self.params);
        Self::check(state)
    }

    /// Full linear step from t to t + dt.
    pub fn linear_step(&mut self, state: &mut FieldState, dt: f64) -> Result<()> {
        let (t0, t1) = (state.t, state.t + dt);
        let (fu, fv) = match &self.forcing {
            Some(Forcing(src)) => {
                let x = self.grid.nodes();
                let (mut fu, mut fv) = (Vec::with_capacity(x.len()), Vec::with_capacity(x.len()));
                for &xj in x {
                    let (a0, b0) = src(t0, xj);
                    let (a1, b1) = src(t1, xj);
                    fu.push((a0 + a1) * 0.5);
                    fv.push(0.5 * (b0 + b1));
                }
                (Some(fu), Some(fv))
            }
            None => (None, None),
        };
        let f = &self.signals.f;
        state.u = self.schrodinger.step(&state.u, dt, f.value(t0), f.value(t1), fu.as_deref())?;
        state.v = self.kdv.step(&state.v, dt, self.kdv_bc(t1), fv.as_deref())?;
        state.t = t1;
        Self::check(state)
    }

    /// One Strang step of size dt.
    pub fn strang_step(&mut self, state: &mut FieldState, dt: f64) -> Result<()> {
        let t0 = state.t;
        self.nonlinear_substep(state, 0.5 * dt, t0)?;
        self.linear_step(state, dt)?;
        self.nonlinear_substep_reversed(state, 0.5 * dt, t0 + dt)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Halt {
    pub t: f64,
    pub reason: String,
}

/// Result of [`run`].
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub grid: HalfLineGrid,
    pub snapshots: Vec<Snapshot>,
    pub records: Vec<FunctionalRecord>,
    pub residuals: Option<LawResiduals>,
    /// (η(0), η'(0)) on the left half-line.
    pub initial_virial: Option<(f64, f64)>,
    pub final_state: FieldState,
    pub steps_taken: usize,
    pub halt: Option<Halt>,
    pub warnings: Vec<String>,
}

/// Integrates the configured problem to t_final, sampling diagnostics every
/// `stride` steps and at the final step.
pub fn run(config: &SimConfig) -> Result<RunOutcome> {
    run_with(config, |_, _| {})
}

/// As [`run`], calling `observe` with every sampled state.
pub fn run_with<F: FnMut(&HalfLineGrid, &FieldState)>(config: &SimConfig, mut observe: F) -> Result<RunOutcome> {
    let steps = config.validate()?;
    let g = &config.grid;
    let grid = HalfLineGrid::new(g.direction, g.length, g.cells)?;
    let signals = config.boundary.resolve()?;
    let mut state = init_state(&grid, &config.initial.u0, &config.initial.v0, Some(&signals))?;
    let band = state.outer_band_sup(&grid);
    if band > OUTER_BAND_INITIAL {
        return Err(Error::InitialData(format!(
            "initial data reach {band:.2e} on the outer 10% of the grid (limit {OUTER_BAND_INITIAL:.0e})"
        )));
    }
    let params = config.coupling;
    let mut stepper = CoupledStepper::new(&grid, params, signals, config.forcing.clone());
    stepper.impose_closures(&mut state);
    let initial_virial = match grid.direction() {
        Direction::Left => Some(initial_virial_data(&grid, &state, &params)?),
        Direction::Right => None,
    };

    let dt = config.time.dt;
    let mut snapshots = vec![snapshot(&grid, &state, &params)?];
    observe(&grid, &state);
    let mut warnings = Vec::new();
    let mut halt = None;
    let mut taken = 0;
    for k in 1..=steps {
        let t_old = state.t;
        // keep t on the exact multiple to avoid drift in the sample times
        match stepper.strang_step(&mut state, dt) {
            Ok(()) => state.t = k as f64 * dt,
            Err(Error::NonFinite { .. }) => {
                halt = Some(Halt { t: t_old + dt, reason: "non-finite values after step".into() });
                break;
            }
            Err(e) => return Err(e),
        }
        taken = k;
        if k % config.time.stride == 0 || k == steps {
            snapshots.push(snapshot(&grid, &state, &params)?);
            observe(&grid, &state);
            if warnings.is_empty() {
                let sup = state.outer_band_sup(&grid);
                if sup > OUTER_BAND_WARN {
                    warnings.push(format!(
                        "radiation reached the artificial boundary: outer-band sup {sup:.2e} at t = {:.6}",
                        state.t
                    ));
                }
            }
        }
    }
    let (records, residuals) = if snapshots.len() == 2 {
        (Vec::new(), None)
    } else {
        let (r, l) = analyze(&snapshots, &params, grid.direction())?;
        (r, Some(l))
    };
    Ok(RunOutcome {
        grid,
        snapshots,
        records,
        residuals,
        initial_virial,
        final_state: state,
        steps_taken: taken,
        halt,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, b: f64, g: f64) -> CouplingParams {
        CouplingParams::new(a, b, g).unwrap()
    }

    fn config(direction: Direction, t_final: f64) -> SimConfig {
        let c = direction.sign() * 10.0;
        SimConfig {
            tag: "test".into(),
            grid: GridSpec { direction, length: 40.0, cells: 800 },
            coupling: params(1.0, 1.0, direction.sign()),
            boundary: BoundarySignals::homogeneous(),
            initial: InitialSpec {
                u0: Profile::Gaussian { amplitude: 1.0, center: c, width: 1.0, wavenumber: direction.sign() },
                v0: Profile::Gaussian { amplitude: 0.5, center: c, width: 1.5, wavenumber: 0.0 },
            },
            time: TimeSpec { dt: 1e-3, t_final, stride: 5 },
            forcing: None,
        }
    }

    #[test]
    fn zero_state_stays_zero() {
        let g = HalfLineGrid::new(Direction::Left, 20.0, 200).unwrap();
        let mut s = CoupledStepper::new(&g, params(1.0, 1.0, 1.0), BoundarySignals::homogeneous(), None);
        let mut st = FieldState::zeros(g.len());
        for _ in 0..10 {
            s.strang_step(&mut st, 0.01).unwrap();
        }
        assert!(st.u.iter().all(|z| z.norm() == 0.0) && st.v.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn constant_potential_is_a_uniform_phase() {
        let g = HalfLineGrid::new(Direction::Right, 20.0, 200).unwrap();
        let mut st = FieldState::zeros(g.len());
        for (j, x) in g.nodes().iter().enumerate() {
            st.u[j] = C::new((-(x - 10.0f64).powi(2)).exp(), 0.3);
            st.v[j] = 0.7;
        }
        let before = st.u.clone();
        phase_rotation(&mut st, 0.05, &params(2.0, 0.0, 1.0));
        let want = C::from_polar(1.0, -2.0 * 0.7 * 0.05);
        for j in 1..g.len() - 1 {
            assert!((st.u[j].norm() - before[j].norm()).abs() < 1e-15);
            assert!((st.u[j] - before[j] * want).norm() < 1e-15);
        }
    }

    #[test]
    fn no_coupling_leaves_u_alone() {
        let g = HalfLineGrid::new(Direction::Right, 20.0, 200).unwrap();
        let s = CoupledStepper::new(&g, params(0.0, 0.0, 1.0), BoundarySignals::homogeneous(), None);
        let mut st = FieldState::zeros(g.len());
        for (j, x) in g.nodes().iter().enumerate() {
            st.u[j] = C::new(0.0, (-(x - 10.0f64).powi(2)).exp());
        }
        let u0 = st.u.clone();
        s.nonlinear_substep(&mut st, 0.1, 0.0).unwrap();
        assert_eq!(st.u, u0);
    }

    #[test]
    fn t_final_zero_gives_one_record() {
        let out = run(&config(Direction::Right, 0.0)).unwrap();
        assert_eq!(out.snapshots.len(), 1);
        assert_eq!(out.records.len(), 1);
    }

    #[test]
    fn mass_is_conserved_both_directions() {
        for d in [Direction::Right, Direction::Left] {
            let out = run(&config(d, 0.2)).unwrap();
            let m0 = out.snapshots[0].mass;
            let drift = out.snapshots.iter().map(|s| (s.mass - m0).abs() / m0).fold(0.0, f64::max);
            assert!(drift < 1e-12, "{d}: {drift}");
        }
    }

    #[test]
    fn linear_flow_time_reversal() {
        let g = HalfLineGrid::new(Direction::Left, 30.0, 600).unwrap();
        let mut s = CoupledStepper::new(&g, params(1.0, 1.0, 1.0), BoundarySignals::homogeneous(), None);
        let mut st = FieldState::zeros(g.len());
        for (j, x) in g.nodes().iter().enumerate() {
            st.u[j] = C::from_polar((-(x + 12.0f64).powi(2)).exp(), -x);
            st.v[j] = (-(x + 15.0f64).powi(2)).exp();
        }
        let start = st.clone();
        s.linear_step(&mut st, 0.01).unwrap();
        s.linear_step(&mut st, -0.01).unwrap();
        assert!(st.u.iter().zip(&start.u).all(|(a, b)| (a - b).norm() < 1e-10));
        assert!(st.v.iter().zip(&start.v).all(|(a, b)| (a - b).abs() < 1e-10));
    }

    #[test]
    fn coarse_strong_run_halts() {
        let mut c = config(Direction::Right, 4.0);
        c.coupling = params(50.0, -400.0, 40.0);
        c.initial.u0 = Profile::Gaussian { amplitude: 3.0, center: 10.0, width: 0.5, wavenumber: 0.0 };
        c.time = TimeSpec { dt: 0.05, t_final: 4.0, stride: 1 };
        let out = run(&c).unwrap();
        let h = out.halt.expect("blow-up flagged");
        assert!(h.t > 0.0 && h.t <= 4.0);
        assert!(out.steps_taken < 80);
    }

    #[test]
    fn rejects_bad_time_settings() {
        let mut c = config(Direction::Right, 1.0);
        c.time.dt = 0.3;
        assert!(matches!(run(&c), Err(Error::Config(_))));
        c.time = TimeSpec { dt: 0.1, t_final: 0.1, stride: 1 };
        assert!(matches!(run(&c), Err(Error::Config(_))));
        c.time = TimeSpec { dt: 0.1, t_final: 1.0, stride: 0 };
        assert!(matches!(run(&c), Err(Error::Config(_))));
    }

    #[test]
    fn initial_data_must_fit_in_the_grid() {
        let mut c = config(Direction::Right, 0.0);
        c.initial.u0 = Profile::Gaussian { amplitude: 1.0, center: 38.0, width: 1.0, wavenumber: 0.0 };
        assert!(matches!(run(&c), Err(Error::InitialData(_))));
    }
}
