//! Manufactured-solution convergence study of the coupled stepper.
//!
//! With φ = e^{−(x−c)²} the pair u* = e^{it}φ, v* = φ cos t solves the
//! system once the residuals
//!
//! F_u = u*_t − i u*_xx + i(α u* v* + β|u*|² u*)
//! F_v = v*_t + v*_xxx + v* v*_x − γ(|u*|²)_x
//!
//! are added as sources. Boundary data are the traces of u*, v* (and v*_x on
//! the left half-line).

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::boundary_ops::{fitted_order, Resolution};
use crate::error::{Error, Result};
use crate::grid::{CouplingParams, Direction, HalfLineGrid};
use crate::profile::Profile;
use crate::signals::{BoundarySignals, Signal};
use crate::stepper::{run, Forcing, GridSpec, InitialSpec, SimConfig, TimeSpec};

type C = Complex64;

/// Which manufactured pair to reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Manufactured {
    Gaussian,
    /// u* = v* = 0 with no source.
    Zero,
}

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub direction: Direction,
    pub coupling: CouplingParams,
    pub length: f64,
    pub t_final: f64,
    pub solution: Manufactured,
    pub resolutions: Vec<Resolution>,
}

impl ConvergenceStudy {
    /// L = 20, T = 0.5, c at mid-domain, N = 200·2^k, dt = 0.01/2^k.
    pub fn standard(direction: Direction) -> Self {
        Self {
            direction,
            coupling: CouplingParams::new(1.0, 1.0, 1.0).expect("valid constants"),
            length: 20.0,
            t_final: 0.5,
            solution: Manufactured::Gaussian,
            resolutions: (0..3).map(|k| Resolution { cells: 200 << k, dt: 0.01 / f64::from(1u32 << k) }).collect(),
        }
    }

    fn center(&self) -> f64 {
        0.5 * self.length * self.direction.sign()
    }
}

/// u*, v* and v*_x at (t, x).
fn exact(c: f64, t: f64, x: f64) -> (C, f64, f64) {
    let y = x - c;
    let phi = (-y * y).exp();
    (C::from_polar(phi, t), phi * t.cos(), -2.0 * y * phi * t.cos())
}

fn sources(params: CouplingParams, c: f64) -> Forcing {
    let (a, b, g) = (params.alpha(), params.beta(), params.gamma());
    Forcing(Arc::new(move |t: f64, x: f64| {
        let y = x - c;
        let phi = (-y * y).exp();
        let d1 = -2.0 * y * phi;
        let d2 = (4.0 * y * y - 2.0) * phi;
        let d3 = (-8.0 * y * y * y + 12.0 * y) * phi;
        let (ct, st) = (t.cos(), t.sin());
        let i = C::i();
        let fu = C::from_polar(1.0, t) * i * (phi - d2 + a * phi * phi * ct + b * phi * phi * phi);
        let fv = -phi * st + d3 * ct + phi * d1 * ct * ct - 2.0 * g * phi * d1;
        (fu, fv)
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelError {
    pub cells: usize,
    pub dt: f64,
    pub h: f64,
    pub error_u: f64,
    pub error_v: f64,
    /// (‖u − u*‖² + ‖v − v*‖²)^{1/2} at t_final.
    pub error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub direction: Direction,
    pub solution: Manufactured,
    pub t_final: f64,
    pub levels: Vec<LevelError>,
    /// Least-squares order; absent when an error is exactly zero.
    pub order: Option<f64>,
    pub monotone: bool,
    pub warnings: Vec<String>,
}

fn check_levels(levels: &[Resolution]) -> Result<()> {
    if levels.len() < 3 {
        return Err(Error::Precondition(format!("need at least 3 resolutions, got {}", levels.len())));
    }
    for w in levels.windows(2) {
        let halved = w[1].cells == 2 * w[0].cells && (w[1].dt * 2.0 - w[0].dt).abs() <= 1e-12 * w[0].dt;
        if !halved {
            return Err(Error::Precondition(format!(
                "resolution ({}, {}) does not halve h and dt of ({}, {})",
                w[1].cells, w[1].dt, w[0].cells, w[0].dt
            )));
        }
    }
    Ok(())
}

fn level_config(study: &StudySetup, r: Resolution) -> SimConfig {
    let steps = (study.t_final / r.dt).round() as usize;
    SimConfig {
        tag: format!("mms-{}", r.cells),
        grid: GridSpec { direction: study.direction, length: study.length, cells: r.cells },
        coupling: study.coupling,
        boundary: study.boundary.clone(),
        initial: study.initial.clone(),
        time: TimeSpec { dt: r.dt, t_final: study.t_final, stride: steps.max(1) },
        forcing: study.forcing.clone(),
    }
}

struct StudySetup {
    direction: Direction,
    coupling: CouplingParams,
    length: f64,
    t_final: f64,
    boundary: BoundarySignals,
    initial: InitialSpec,
    forcing: Option<Forcing>,
    center: f64,
    zero: bool,
}

fn run_level(setup: &StudySetup, r: Resolution) -> Result<LevelError> {
    let out = run(&level_config(setup, r))?;
    if let Some(h) = out.halt {
        return Err(Error::NonFinite { t: h.t });
    }
    let grid: &HalfLineGrid = &out.grid;
    let s = &out.final_state;
    let t = s.t;
    let (mut eu, mut ev) = (Vec::with_capacity(grid.len()), Vec::with_capacity(grid.len()));
    for (j, &x) in grid.nodes().iter().enumerate() {
        let (u, v, _) = if setup.zero { (C::new(0.0, 0.0), 0.0, 0.0) } else { exact(setup.center, t, x) };
        eu.push((s.u[j] - u).norm_sqr());
        ev.push((s.v[j] - v).powi(2));
    }
    let (error_u, error_v) = (grid.trapezoid(&eu).sqrt(), grid.trapezoid(&ev).sqrt());
    Ok(LevelError { cells: r.cells, dt: r.dt, h: grid.h(), error_u, error_v, error: error_u.hypot(error_v) })
}

/// Runs every resolution in parallel and fits the global order in h.
pub fn convergence_study(study: &ConvergenceStudy) -> Result<ConvergenceReport> {
    check_levels(&study.resolutions)?;
    let c = study.center();
    let zero = study.solution == Manufactured::Zero;
    let (boundary, initial, forcing) = if zero {
        (BoundarySignals::homogeneous(), InitialSpec { u0: Profile::Zero, v0: Profile::Zero }, None)
    } else {
        let f = Signal::custom(move |t| exact(c, t, 0.0).0);
        let g = Signal::custom(move |t| C::new(exact(c, t, 0.0).1, 0.0));
        let h = match study.direction {
            Direction::Left => Signal::custom(move |t| C::new(exact(c, t, 0.0).2, 0.0)),
            Direction::Right => Signal::Zero,
        };
        let bump = Profile::Gaussian { amplitude: 1.0, center: c, width: 1.0, wavenumber: 0.0 };
        (BoundarySignals { f, g, h }, InitialSpec { u0: bump.clone(), v0: bump }, Some(sources(study.coupling, c)))
    };
    let setup = StudySetup {
        direction: study.direction,
        coupling: study.coupling,
        length: study.length,
        t_final: study.t_final,
        boundary,
        initial,
        forcing,
        center: c,
        zero,
    };
    let levels = study.resolutions.par_iter().map(|&r| run_level(&setup, r)).collect::<Result<Vec<_>>>()?;

    let errs: Vec<f64> = levels.iter().map(|l| l.error).collect();
    let hs: Vec<f64> = levels.iter().map(|l| l.h).collect();
    let monotone = errs.windows(2).all(|w| w[1] <= w[0]);
    let mut warnings = Vec::new();
    if !monotone {
        warnings.push(format!("error does not decrease monotonically under refinement: {errs:?}"));
    }
    let order = if errs.iter().all(|e| *e > 0.0) { Some(fitted_order(&hs, &errs)) } else { None };
    Ok(ConvergenceReport {
        direction: study.direction,
        solution: study.solution,
        t_final: study.t_final,
        levels,
        order,
        monotone,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sources_vanish_for_the_exact_pair() {
        // finite-difference check of the source formulas at a few points
        let p = CouplingParams::new(0.7, -1.3, 2.1).unwrap();
        let c = 3.0;
        let Forcing(src) = sources(p, c);
        let d = 1e-3;
        for &(t, x) in &[(0.3, 2.5), (1.1, 3.7), (0.0, 4.2)] {
            let u = |t: f64, x: f64| exact(c, t, x).0;
            let v = |t: f64, x: f64| exact(c, t, x).1;
            let ut = (u(t + d, x) - u(t - d, x)) / (2.0 * d);
            let uxx = (u(t, x + d) - 2.0 * u(t, x) + u(t, x - d)) / (d * d);
            let vt = (v(t + d, x) - v(t - d, x)) / (2.0 * d);
            let vx = (v(t, x + d) - v(t, x - d)) / (2.0 * d);
            let vxxx =
                (v(t, x + 2.0 * d) - 2.0 * v(t, x + d) + 2.0 * v(t, x - d) - v(t, x - 2.0 * d)) / (2.0 * d * d * d);
            let m = |x: f64| u(t, x).norm_sqr();
            let mx = (m(x + d) - m(x - d)) / (2.0 * d);
            let (uu, vv) = (u(t, x), v(t, x));
            let fu = ut - C::i() * uxx + C::i() * (p.alpha() * uu * vv + p.beta() * uu.norm_sqr() * uu);
            let fv = vt + vxxx + vv * vx - p.gamma() * mx;
            let (su, sv) = src(t, x);
            assert!((su - fu).norm() < 1e-4, "{su} vs {fu}");
            assert!((sv - fv).abs() < 1e-4, "{sv} vs {fv}");
        }
    }

    #[test]
    fn needs_three_halving_levels() {
        let mut s = ConvergenceStudy::standard(Direction::Right);
        s.resolutions.truncate(1);
        assert!(matches!(convergence_study(&s), Err(Error::Precondition(_))));
        s.resolutions = vec![
            Resolution { cells: 100, dt: 0.02 },
            Resolution { cells: 200, dt: 0.01 },
            Resolution { cells: 300, dt: 0.005 },
        ];
        assert!(matches!(convergence_study(&s), Err(Error::Precondition(_))));
    }

    #[test]
    fn zero_problem_has_zero_error() {
        let mut s = ConvergenceStudy::standard(Direction::Left);
        s.solution = Manufactured::Zero;
        let r = convergence_study(&s).unwrap();
        assert!(r.levels.iter().all(|l| l.error == 0.0));
        assert!(r.order.is_none() && r.monotone);
    }

    #[test]
    fn second_order_on_both_half_lines() {
        for d in [Direction::Right, Direction::Left] {
            let r = convergence_study(&ConvergenceStudy::standard(d)).unwrap();
            let order = r.order.unwrap();
            assert!(r.monotone, "{d}: {:?}", r.levels);
            assert!((1.8..=2.2).contains(&order), "{d}: order {order}, {:?}", r.levels);
        }
    }
}
