//! Quadrature evaluation of the explicit solution operators of the linear
//! right half-line problems with zero initial data, used as oracles for the
//! steppers.
//!
//! For i u_t + u_xx = 0, u(0, t) = f(t):
//!
//! L f(x, t) = (1/π) ∫₀^∞ [ e^{i z² t − z x} z q̂(z²) + e^{−i z² t + i z x} z q̂(−z²) ] dz,
//! q̂(τ) = ∫₀^∞ e^{−iτt} f(t) dt.
//!
//! The first branch decays in x; written with e^{−izx} instead of e^{−zx}
//! it would not solve the equation.
//!
//! For v_t + v_xxx = 0, v(0, t) = g(t):
//!
//! V g(x, t) = ∫₀ᵗ 3/(t − t') A''(x (t − t')^{−1/3}) g(t') dt'.
//!
//! Both traces at x = 0⁺ reproduce the boundary data with constant 1.

use num_complex::Complex64;
use serde::Serialize;

use crate::airy::airy_kernel;
use crate::error::{Error, Result};
use crate::grid::{Direction, HalfLineGrid};
use crate::propagators::{KdvBoundary, KdvCn, SchrodingerCn};
use crate::quadrature::{integrate, uniform_breaks, QuadOptions};
use crate::signals::Signal;
use crate::stencil::fd_weights;

type C = Complex64;

/// Boundary data for the operator oracles.
#[derive(Debug, Clone)]
pub struct BoundaryProfile {
    pub signal: Signal,
    /// Signal vanishes for t > support; `None` means unbounded support.
    pub support: Option<f64>,
    /// Number of derivatives vanishing at t = 0 (informational).
    pub vanishing_derivatives: u32,
    pub label: String,
}

impl BoundaryProfile {
    /// Requires signal(0) = 0.
    pub fn new(signal: Signal, support: Option<f64>, vanishing_derivatives: u32, label: &str) -> Result<Self> {
        let s0 = signal.value(0.0).norm();
        if s0 > 1e-14 {
            return Err(Error::Precondition(format!("boundary profile must vanish at t = 0, got {s0:.3e}")));
        }
        if let Some(ts) = support {
            if !(ts > 0.0) {
                return Err(Error::Precondition("support length must be positive".into()));
            }
        }
        Ok(Self { signal, support, vanishing_derivatives, label: label.into() })
    }

    /// t² e^{−t}: value and first derivative vanish at 0.
    pub fn t2_exp() -> Self {
        Self::new(Signal::t2_exp(), None, 2, "t^2 exp(-t)").expect("vanishes at 0")
    }

    pub fn value(&self, t: f64) -> C {
        if t < 0.0 || self.support.is_some_and(|s| t > s) {
            return C::new(0.0, 0.0);
        }
        self.signal.value(t)
    }

    /// q̂(τ) = ∫₀^∞ e^{−iτt} f(t) dt, in closed form when available and by
    /// adaptive quadrature over the support otherwise. NaN on failure.
    pub fn transform(&self, tau: f64) -> C {
        if let Some(q) = self.signal.half_line_transform(tau) {
            return q;
        }
        let Some(ts) = self.support else {
            return C::new(f64::NAN, f64::NAN);
        };
        let pieces = ((tau.abs() * ts / std::f64::consts::PI).ceil() as usize).max(8);
        let opts = QuadOptions { abs_tol: 1e-13, rel_tol: 1e-12, max_intervals: 20 * pieces + 1000 };
        integrate(|s| C::from_polar(1.0, -tau * s) * self.value(s), &uniform_breaks(0.0, ts, pieces), opts)
            .map_or(C::new(f64::NAN, f64::NAN), |r| r.value)
    }

    fn is_zero(&self) -> bool {
        self.signal.is_zero()
    }
}

/// Accuracy controls for the operator quadratures.
#[derive(Debug, Clone, Copy)]
pub struct OperatorOptions {
    /// Target agreement between successive truncations / refinements.
    pub tol: f64,
    /// First z truncation for L; doubled until converged.
    pub z_start: f64,
    /// Largest z truncation tried before giving up.
    pub z_cap: f64,
}

impl Default for OperatorOptions {
    fn default() -> Self {
        Self { tol: 1e-7, z_start: 8.0, z_cap: 1024.0 }
    }
}

impl OperatorOptions {
    /// Tight settings for finite-difference residuals.
    pub fn fine() -> Self {
        Self { tol: 1e-11, ..Self::default() }
    }
}

fn quad_opts(tol: f64) -> QuadOptions {
    QuadOptions { abs_tol: tol, rel_tol: 1e-13, max_intervals: 400_000 }
}

/// L f(x, t) for x ≥ 0, t > 0.
pub fn eval_l(f: &BoundaryProfile, x: f64, t: f64, opts: &OperatorOptions) -> Result<C> {
    if !(x >= 0.0) || !(t > 0.0) {
        return Err(Error::Precondition(format!("L needs x ≥ 0 and t > 0, got ({x}, {t})")));
    }
    if f.is_zero() {
        return Ok(C::new(0.0, 0.0));
    }
    let integrand = |z: f64| {
        let z2 = z * z;
        let decaying = C::from_polar((-z * x).exp(), z2 * t) * f.transform(z2);
        let oscillating = C::from_polar(1.0, z * x - z2 * t) * f.transform(-z2);
        (decaying + oscillating) * (z / std::f64::consts::PI)
    };
    // pieces short enough to hold a few oscillations of e^{i(z²t ± zx)}
    let breaks = |a: f64, b: f64| {
        let phase = (b * b - a * a) * t + (b - a) * x;
        uniform_breaks(a, b, ((phase / std::f64::consts::PI).ceil() as usize).max(16))
    };
    let chunk_opts = quad_opts(opts.tol * 1e-2);
    let mut z = opts.z_start;
    let mut total = integrate(integrand, &breaks(0.0, z), chunk_opts)?.value;
    while z < opts.z_cap {
        let inc = integrate(integrand, &breaks(z, 2.0 * z), chunk_opts)?.value;
        total += inc;
        z *= 2.0;
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(Error::Quadrature("boundary transform not available".into()));
        }
        if inc.norm() < opts.tol {
            return Ok(total);
        }
    }
    Err(Error::Quadrature(format!(
        "z-tail still above {:.1e} at truncation {z}; boundary data not smooth enough",
        opts.tol
    )))
}

/// V g(x, t) for x > 0. Zero for t ≤ 0.
pub fn eval_v(g: &BoundaryProfile, x: f64, t: f64, opts: &OperatorOptions) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::OutOfRange(x));
    }
    if t <= 0.0 || g.is_zero() {
        return Ok(0.0);
    }
    // s = (t − t')^{1/3}: 3/(t−t') A''(x/s) dt' = (3x/s²) A(x/s) ds
    let integrand = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        let y = x / s;
        3.0 * x / (s * s) * airy_kernel(y).unwrap_or(0.0) * g.value(t - s * s * s).re
    };
    let smax = t.cbrt();
    // geometric breaks resolve the layer at s ~ x, uniform ones the rest
    let mut breaks = vec![0.0];
    let mut b = x / 16.0;
    while b < smax {
        breaks.push(b);
        b *= 2.0;
    }
    let tail = uniform_breaks(*breaks.last().expect("nonempty"), smax, 16);
    breaks.extend_from_slice(&tail[1..]);
    Ok(integrate(integrand, &breaks, quad_opts(opts.tol * 1e-2))?.value)
}

/// Richardson extrapolation to x = 0 from samples at h, 2h, 4h, exact for
/// quadratics.
pub fn extrapolate_to_origin<T, F>(eval: F, h: f64) -> Result<T>
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
    F: Fn(f64) -> Result<T>,
{
    let (a, b, c) = (eval(h)?, eval(2.0 * h)?, eval(4.0 * h)?);
    Ok((a * 8.0 - b * 6.0 + c) * (1.0 / 3.0))
}

fn centered(m: usize, half_width: usize) -> Vec<f64> {
    let xs: Vec<f64> = (0..=2 * half_width).map(|k| k as f64 - half_width as f64).collect();
    fd_weights(0.0, &xs, m)
}

fn differentiate<T, F>(eval: F, at: f64, delta: f64, m: usize, half_width: usize) -> Result<T>
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
    F: Fn(f64) -> Result<T>,
{
    let w = centered(m, half_width);
    let mut acc = T::default();
    for (k, wk) in w.iter().enumerate() {
        if *wk != 0.0 {
            acc = acc + eval(at + (k as f64 - half_width as f64) * delta)? * *wk;
        }
    }
    Ok(acc * delta.powi(-(m as i32)))
}

/// |i ∂_t Lf + ∂_x² Lf| at (x, t) by fourth-order centered differences.
pub fn l_pde_residual(f: &BoundaryProfile, x: f64, t: f64, delta: f64, opts: &OperatorOptions) -> Result<f64> {
    let ut: C = differentiate(|s| eval_l(f, x, s, opts), t, delta, 1, 2)?;
    let uxx: C = differentiate(|y| eval_l(f, y, t, opts), x, delta, 2, 2)?;
    Ok((C::i() * ut + uxx).norm())
}

/// |∂_t Vg + ∂_x³ Vg| at (x, t) by fourth-order centered differences.
pub fn v_pde_residual(g: &BoundaryProfile, x: f64, t: f64, delta: f64, opts: &OperatorOptions) -> Result<f64> {
    let vt: f64 = differentiate(|s| eval_v(g, x, s, opts), t, delta, 1, 2)?;
    let vxxx: f64 = differentiate(|y| eval_v(g, y, t, opts), x, delta, 3, 3)?;
    Ok((vt + vxxx).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LinearOperator {
    /// Schrödinger boundary operator L.
    L,
    /// Airy boundary potential V.
    V,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Resolution {
    pub cells: usize,
    pub dt: f64,
}

/// Setup for comparing a linear stepper against its boundary operator.
#[derive(Debug, Clone)]
pub struct CrossValidation {
    pub operator: LinearOperator,
    pub direction: Direction,
    pub profile: BoundaryProfile,
    pub t_final: f64,
    pub length: f64,
    pub resolutions: Vec<Resolution>,
    /// Distances |x| from the boundary at which both sides are compared.
    pub sample_x: Vec<f64>,
    /// Comparison times, each a multiple of every dt.
    pub sample_t: Vec<f64>,
    /// Spacing for the trace extrapolation.
    pub trace_h: f64,
}

impl CrossValidation {
    /// t² e^{−t} data, T = 1, three dyadic refinements.
    pub fn standard(operator: LinearOperator, direction: Direction) -> Self {
        let (length, base) = match operator {
            LinearOperator::L => (30.0, 600),
            LinearOperator::V => (20.0, 400),
        };
        Self {
            operator,
            direction,
            profile: BoundaryProfile::t2_exp(),
            t_final: 1.0,
            length,
            resolutions: (0..3).map(|k| Resolution { cells: base << k, dt: 0.02 / f64::from(1u32 << k) }).collect(),
            sample_x: vec![0.5, 1.0, 2.0, 4.0],
            sample_t: vec![0.5, 1.0],
            trace_h: 0.01,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolutionError {
    pub cells: usize,
    pub dt: f64,
    pub max_discrepancy: f64,
}

/// Validation report; `normalization_constant` is the extrapolated trace
/// divided by the boundary value and is reported, never applied.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub operator: LinearOperator,
    pub direction: Direction,
    pub profile: String,
    pub trace_error: f64,
    pub pde_residual: f64,
    pub normalization_constant: f64,
    pub convergence_order: f64,
    pub errors: Vec<ResolutionError>,
}

/// Least-squares slope of log(err) against log(h).
pub fn fitted_order(h: &[f64], err: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = h.iter().zip(err).filter(|(_, e)| **e > 0.0).map(|(h, e)| (h.ln(), e.ln())).collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn step_count(t: f64, dt: f64) -> Result<usize> {
    let n = (t / dt).round();
    if (n * dt - t).abs() > 1e-9 * t.max(1.0) {
        return Err(Error::Precondition(format!("time {t} is not a multiple of dt = {dt}")));
    }
    Ok(n as usize)
}

fn node_index(grid: &HalfLineGrid, dist: f64) -> Result<usize> {
    let j = (dist / grid.h()).round();
    if (j * grid.h() - dist).abs() > 1e-9 || j as usize >= grid.len() {
        return Err(Error::Precondition(format!("sample |x| = {dist} is not a grid node")));
    }
    Ok(j as usize)
}

/// Runs the linear stepper for the operator from zero initial data and
/// measures the largest discrepancy against the quadrature oracle at the
/// sample points, at every resolution.
///
/// The left Schrödinger problem is compared through x ↦ −x. No explicit
/// operator is available for the left KdV problem.
pub fn cross_validate_linear(cv: &CrossValidation) -> Result<ValidationReport> {
    if cv.operator == LinearOperator::V && cv.direction == Direction::Left {
        return Err(Error::Direction("the Airy boundary potential covers the right half-line only".into()));
    }
    let opts = OperatorOptions::default();
    let fine = OperatorOptions::fine();
    let p = &cv.profile;

    let mut reference = Vec::new();
    for &t in &cv.sample_t {
        for &x in &cv.sample_x {
            let value = match cv.operator {
                LinearOperator::L => eval_l(p, x, t, &fine)?,
                LinearOperator::V => C::new(eval_v(p, x, t, &fine)?, 0.0),
            };
            reference.push((t, x, value));
        }
    }

    let mut errors = Vec::new();
    for res in &cv.resolutions {
        let grid = HalfLineGrid::new(cv.direction, cv.length, res.cells)?;
        let targets: Vec<usize> = cv.sample_t.iter().map(|&t| step_count(t, res.dt)).collect::<Result<_>>()?;
        let last = targets.iter().copied().max().unwrap_or(0);
        let mut snapshots = Vec::new();
        match cv.operator {
            LinearOperator::L => {
                let mut s = SchrodingerCn::new(&grid);
                let mut u = vec![C::new(0.0, 0.0); grid.len()];
                for k in 0..last {
                    let t0 = k as f64 * res.dt;
                    u = s.step(&u, res.dt, p.value(t0), p.value(t0 + res.dt), None)?;
                    if targets.contains(&(k + 1)) {
                        snapshots.push((k + 1, u.clone()));
                    }
                }
            }
            LinearOperator::V => {
                let mut s = KdvCn::new(&grid);
                let mut v = vec![0.0; grid.len()];
                for k in 0..last {
                    let bc = KdvBoundary { g: p.value((k + 1) as f64 * res.dt).re, h: 0.0 };
                    v = s.step(&v, res.dt, bc, None)?;
                    if targets.contains(&(k + 1)) {
                        snapshots.push((k + 1, v.iter().map(|&r| C::new(r, 0.0)).collect()));
                    }
                }
            }
        }
        let mut worst: f64 = 0.0;
        for &(t, x, want) in &reference {
            let k = step_count(t, res.dt)?;
            let snap = &snapshots.iter().find(|(s, _)| *s == k).expect("recorded").1;
            worst = worst.max((snap[node_index(&grid, x)?] - want).norm());
        }
        errors.push(ResolutionError { cells: res.cells, dt: res.dt, max_discrepancy: worst });
    }

    let t_check = cv.sample_t.iter().copied().fold(0.0, f64::max);
    let boundary = p.value(t_check);
    let (trace, pde_residual) = match cv.operator {
        LinearOperator::L => (
            extrapolate_to_origin(|x| eval_l(p, x, t_check, &opts), cv.trace_h)?,
            l_pde_residual(p, 1.0, t_check, 1e-2, &fine)?,
        ),
        LinearOperator::V => (
            C::new(extrapolate_to_origin(|x| eval_v(p, x, t_check, &opts), cv.trace_h)?, 0.0),
            v_pde_residual(p, 1.0, t_check, 1e-2, &fine)?,
        ),
    };
    let normalization_constant = if boundary.norm() > 0.0 { (trace / boundary).re } else { f64::NAN };
    let h: Vec<f64> = cv.resolutions.iter().map(|r| cv.length / r.cells as f64).collect();
    let e: Vec<f64> = errors.iter().map(|r| r.max_discrepancy).collect();
    Ok(ValidationReport {
        operator: cv.operator,
        direction: cv.direction,
        profile: p.label.clone(),
        trace_error: (trace - boundary).norm(),
        pde_residual,
        normalization_constant,
        convergence_order: fitted_order(&h, &e),
        errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_profile() -> BoundaryProfile {
        BoundaryProfile::new(Signal::Zero, None, 0, "zero").unwrap()
    }

    #[test]
    fn zero_data_gives_zero() {
        let o = OperatorOptions::default();
        assert_eq!(eval_l(&zero_profile(), 1.0, 1.0, &o).unwrap(), C::new(0.0, 0.0));
        assert_eq!(eval_v(&zero_profile(), 1.0, 1.0, &o).unwrap(), 0.0);
    }

    #[test]
    fn profile_must_vanish_at_origin() {
        assert!(BoundaryProfile::new(Signal::Constant { re: 1.0, im: 0.0 }, None, 0, "one").is_err());
    }

    #[test]
    fn l_trace_recovers_boundary_value() {
        let p = BoundaryProfile::t2_exp();
        let o = OperatorOptions::default();
        let tr = extrapolate_to_origin(|x| eval_l(&p, x, 1.0, &o), 0.01).unwrap();
        assert!((tr - C::new((-1.0f64).exp(), 0.0)).norm() < 1e-3, "{tr}");
        // direct evaluation at x = 0 agrees as well
        let at0 = eval_l(&p, 0.0, 1.0, &o).unwrap();
        assert!((at0 - C::new((-1.0f64).exp(), 0.0)).norm() < 1e-6, "{at0}");
    }

    #[test]
    fn v_trace_recovers_boundary_value() {
        let p = BoundaryProfile::t2_exp();
        let o = OperatorOptions::default();
        let tr = extrapolate_to_origin(|x| eval_v(&p, x, 1.0, &o), 0.01).unwrap();
        assert!((tr - (-1.0f64).exp()).abs() < 1e-3, "{tr}");
    }

    #[test]
    fn v_rejects_nonpositive_x() {
        assert!(matches!(
            eval_v(&BoundaryProfile::t2_exp(), 0.0, 1.0, &OperatorOptions::default()),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn quadrature_transform_matches_closed_form() {
        // truncated copy of t² e^{-t} without a closed form
        let p =
            BoundaryProfile::new(Signal::custom(|t| C::new(t * t * (-t).exp(), 0.0)), Some(45.0), 2, "custom").unwrap();
        let q = BoundaryProfile::t2_exp();
        for &tau in &[0.0, 2.0, -5.0, 30.0] {
            assert!((p.transform(tau) - q.transform(tau)).norm() < 1e-10);
        }
    }

    #[test]
    fn linearity() {
        let o = OperatorOptions::default();
        let f1 = Signal::t2_exp();
        let f2 = Signal::PowerExp { amplitude: 1.0, amplitude_im: 0.0, power: 3, rate: 2.0, delay: 0.0 };
        let (a, b) = (C::new(2.0, -1.0), C::new(-0.5, 0.0));
        let sum = BoundaryProfile::new(Signal::Sum(vec![(a, f1.clone()), (b, f2.clone())]), None, 2, "sum").unwrap();
        let p1 = BoundaryProfile::new(f1, None, 2, "f1").unwrap();
        let p2 = BoundaryProfile::new(f2, None, 3, "f2").unwrap();
        let lhs = eval_l(&sum, 0.7, 0.9, &o).unwrap();
        let rhs = a * eval_l(&p1, 0.7, 0.9, &o).unwrap() + b * eval_l(&p2, 0.7, 0.9, &o).unwrap();
        assert!((lhs - rhs).norm() < 1e-6);
        let real_sum = BoundaryProfile::new(
            Signal::Sum(vec![(C::new(2.0, 0.0), p1.signal.clone()), (b, p2.signal.clone())]),
            None,
            2,
            "s",
        )
        .unwrap();
        let lhs = eval_v(&real_sum, 0.7, 0.9, &o).unwrap();
        let rhs = 2.0 * eval_v(&p1, 0.7, 0.9, &o).unwrap() - 0.5 * eval_v(&p2, 0.7, 0.9, &o).unwrap();
        assert!((lhs - rhs).abs() < 1e-6);
    }

    #[test]
    fn v_is_causal() {
        // g vanishes on [0, 2]
        let g = Signal::PowerExp { amplitude: 1.0, amplitude_im: 0.0, power: 2, rate: 1.0, delay: 2.0 };
        let p = BoundaryProfile::new(g, None, 2, "delayed").unwrap();
        assert_eq!(eval_v(&p, 0.5, 1.5, &OperatorOptions::default()).unwrap(), 0.0);
    }

    #[test]
    fn v_decays_in_x() {
        let p = BoundaryProfile::t2_exp();
        let o = OperatorOptions::fine();
        let v: Vec<f64> = [2.0, 5.0, 10.0].iter().map(|&x| eval_v(&p, x, 1.0, &o).unwrap().abs()).collect();
        assert!(v[1] < v[0] && v[2] < 1e-6 * v[0], "{v:?}");
    }

    #[test]
    fn pde_residuals_are_small() {
        let p = BoundaryProfile::t2_exp();
        let o = OperatorOptions::fine();
        let rl = l_pde_residual(&p, 1.0, 1.0, 1e-2, &o).unwrap();
        let rv = v_pde_residual(&p, 1.0, 1.0, 1e-2, &o).unwrap();
        assert!(rl < 1e-4, "L residual {rl}");
        assert!(rv < 1e-3, "V residual {rv}");
    }

    #[test]
    fn order_fit() {
        let h = [0.1, 0.05, 0.025];
        let e: Vec<f64> = h.iter().map(|h| 3.0 * h * h).collect();
        assert!((fitted_order(&h, &e) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn left_kdv_is_unsupported() {
        let cv = CrossValidation::standard(LinearOperator::V, Direction::Left);
        assert!(matches!(cross_validate_linear(&cv), Err(Error::Direction(_))));
    }
}
