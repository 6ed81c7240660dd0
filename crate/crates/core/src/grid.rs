//! Half-line discretization, field storage and weighted integrals.
//!
//! Nodes are indexed away from the physical boundary: node 0 is always
//! x = 0 and node N sits at the artificial boundary x = ±L. All integrals
//! use the composite trapezoid rule over the nodes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::Profile;
use crate::signals::BoundarySignals;

/// Smallest admissible cell count.
pub const MIN_CELLS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Right,
    Left,
}

impl Direction {
    /// +1 on the right half-line, -1 on the left one.
    pub fn sign(self) -> f64 {
        match self {
            Direction::Right => 1.0,
            Direction::Left => -1.0,
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Direction::Right => write!(f, "right"),
            Direction::Left => write!(f, "left"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineGrid {
    direction: Direction,
    length: f64,
    cells: usize,
    h: f64,
    nodes: Vec<f64>,
}

impl HalfLineGrid {
    /// Uniform grid on [0, L] (right) or [-L, 0] (left), ordered away from 0.
    pub fn new(direction: Direction, length: f64, cells: usize) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::Config(format!("grid length must be positive, got {length}")));
        }
        if cells < MIN_CELLS {
            return Err(Error::Config(format!("grid needs at least {MIN_CELLS} cells, got {cells}")));
        }
        let h = length / cells as f64;
        let s = direction.sign();
        let mut nodes: Vec<f64> = (0..=cells).map(|j| s * j as f64 * h).collect();
        nodes[cells] = s * length;
        Ok(Self { direction, length, cells, h, nodes })
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn sign(&self) -> f64 {
        self.direction.sign()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Number of nodes, N + 1.
    pub fn len(&self) -> usize {
        self.cells + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn x(&self, j: usize) -> f64 {
        self.nodes[j]
    }

    /// Composite trapezoid rule of nodal samples over the half-line.
    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        let n = values.len() - 1;
        let inner: f64 = values[1..n].iter().sum();
        self.h * (inner + 0.5 * (values[0] + values[n]))
    }

    /// Trapezoid rule of `f(j)` evaluated at every node index.
    pub fn integrate_with<F: Fn(usize) -> f64>(&self, f: F) -> f64 {
        let n = self.cells;
        let inner: f64 = (1..n).map(&f).sum();
        self.h * (inner + 0.5 * (f(0) + f(n)))
    }

    /// First node index of the outer 10% band next to the artificial boundary.
    pub fn outer_band_start(&self) -> usize {
        let band = (self.cells as f64 * 0.1).ceil() as usize;
        self.cells + 1 - band.max(1)
    }
}

/// Coupling constants (alpha, beta, gamma) of the system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCoupling", into = "RawCoupling")]
pub struct CouplingParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingSign {
    Positive,
    Negative,
    /// alpha = 0: neither interaction regime.
    Degenerate,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoupling {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl TryFrom<RawCoupling> for CouplingParams {
    type Error = Error;
    fn try_from(r: RawCoupling) -> Result<Self> {
        CouplingParams::new(r.alpha, r.beta, r.gamma)
    }
}

impl From<CouplingParams> for RawCoupling {
    fn from(p: CouplingParams) -> Self {
        RawCoupling { alpha: p.alpha, beta: p.beta, gamma: p.gamma }
    }
}

impl CouplingParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if gamma == 0.0 || !gamma.is_finite() {
            return Err(Error::Config("gamma must be finite and nonzero".into()));
        }
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::Config("alpha and beta must be finite".into()));
        }
        Ok(Self { alpha, beta, gamma })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// alpha / gamma
    pub fn ratio(&self) -> f64 {
        self.alpha / self.gamma
    }

    pub fn sign_product(&self) -> CouplingSign {
        let p = self.alpha * self.gamma;
        if p > 0.0 {
            CouplingSign::Positive
        } else if p < 0.0 {
            CouplingSign::Negative
        } else {
            CouplingSign::Degenerate
        }
    }
}

/// The pair (u, v) at time t on the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub u: Vec<Complex64>,
    pub v: Vec<f64>,
}

impl FieldState {
    pub fn zeros(n: usize) -> Self {
        Self { t: 0.0, u: vec![Complex64::new(0.0, 0.0); n], v: vec![0.0; n] }
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().all(|z| z.re.is_finite() && z.im.is_finite()) && self.v.iter().all(|x| x.is_finite())
    }

    /// Largest |u| or |v| over the outer band of the grid.
    pub fn outer_band_sup(&self, grid: &HalfLineGrid) -> f64 {
        let start = grid.outer_band_start();
        let su = self.u[start..].iter().map(|z| z.norm()).fold(0.0, f64::max);
        let sv = self.v[start..].iter().map(|x| x.abs()).fold(0.0, f64::max);
        su.max(sv)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    U,
    V,
}

/// ∫ |x|^p |field|² dx by the trapezoid rule, p ∈ {0, 1, 2}.
pub fn weighted_norm_sq(grid: &HalfLineGrid, state: &FieldState, field: Field, p: u32) -> Result<f64> {
    if p > 2 {
        return Err(Error::Precondition(format!("weight power must be 0, 1 or 2, got {p}")));
    }
    if !state.is_finite() {
        return Err(Error::NonFinite { t: state.t });
    }
    let x = grid.nodes();
    let w = |j: usize| x[j].abs().powi(p as i32);
    Ok(match field {
        Field::U => grid.integrate_with(|j| w(j) * state.u[j].norm_sqr()),
        Field::V => grid.integrate_with(|j| w(j) * state.v[j] * state.v[j]),
    })
}

/// Tolerance for the t = 0 corner compatibility check.
const COMPAT_TOL: f64 = 1e-8;

/// Samples initial profiles at the nodes. When boundary signals are given,
/// checks f(0) = u0(0), g(0) = v0(0) and pins the boundary nodes to them.
pub fn init_state(
    grid: &HalfLineGrid,
    u0: &Profile,
    v0: &Profile,
    signals: Option<&BoundarySignals>,
) -> Result<FieldState> {
    let u = u0.sample_complex(grid.nodes())?;
    let v = v0.sample_real(grid.nodes())?;
    let mut state = FieldState { t: 0.0, u, v };
    if !state.is_finite() {
        return Err(Error::InitialData("non-finite sample in initial data".into()));
    }
    if let Some(sig) = signals {
        let f0 = sig.f.value(0.0);
        let g0 = sig.g.real(0.0);
        if (f0 - state.u[0]).norm() > COMPAT_TOL * (1.0 + f0.norm()) {
            return Err(Error::Compatibility(format!("f(0) = {f0} but u0(0) = {}", state.u[0])));
        }
        if (g0 - state.v[0]).abs() > COMPAT_TOL * (1.0 + g0.abs()) {
            return Err(Error::Compatibility(format!("g(0) = {g0} but v0(0) = {}", state.v[0])));
        }
        state.u[0] = f0;
        state.v[0] = g0;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::Signal;
    use std::f64::consts::PI;

    #[test]
    fn right_grid_nodes() {
        let g = HalfLineGrid::new(Direction::Right, 50.0, 1000).unwrap();
        assert!((g.h() - 0.05).abs() < 1e-15);
        assert_eq!(g.x(0), 0.0);
        assert_eq!(g.x(1000), 50.0);
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn left_grid_decreasing() {
        let g = HalfLineGrid::new(Direction::Left, 50.0, 1000).unwrap();
        assert_eq!(g.x(0), 0.0);
        assert_eq!(g.x(1000), -50.0);
        assert!(g.nodes().windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn rejects_small_or_degenerate_grids() {
        assert!(matches!(HalfLineGrid::new(Direction::Right, 1.0, 8), Err(Error::Config(_))));
        assert!(matches!(HalfLineGrid::new(Direction::Right, 0.0, 100), Err(Error::Config(_))));
        assert!(matches!(HalfLineGrid::new(Direction::Left, -3.0, 100), Err(Error::Config(_))));
    }

    #[test]
    fn coupling_sign() {
        assert_eq!(CouplingParams::new(1.0, 0.0, 2.0).unwrap().sign_product(), CouplingSign::Positive);
        assert_eq!(CouplingParams::new(1.0, 0.0, -2.0).unwrap().sign_product(), CouplingSign::Negative);
        assert!(CouplingParams::new(1.0, 0.0, 0.0).is_err());
        assert_eq!(CouplingParams::new(3.0, 0.0, -2.0).unwrap().ratio(), -1.5);
    }

    fn gaussian(k: f64) -> Profile {
        Profile::Gaussian { amplitude: 1.0, center: 10.0, width: 1.0, wavenumber: k }
    }

    #[test]
    fn zero_state() {
        let g = HalfLineGrid::new(Direction::Right, 40.0, 800).unwrap();
        let s = init_state(&g, &Profile::Zero, &Profile::Zero, None).unwrap();
        assert!(s.u.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
        assert!(s.v.iter().all(|x| *x == 0.0));
        for p in 0..=2 {
            assert_eq!(weighted_norm_sq(&g, &s, Field::U, p).unwrap(), 0.0);
        }
    }

    #[test]
    fn gaussian_peak_and_mass() {
        let g = HalfLineGrid::new(Direction::Right, 40.0, 800).unwrap();
        let s = init_state(&g, &gaussian(1.0), &Profile::Zero, None).unwrap();
        assert!((g.x(200) - 10.0).abs() < 1e-12);
        assert!((s.u[200].norm() - 1.0).abs() < 1e-14);
        let m = weighted_norm_sq(&g, &s, Field::U, 0).unwrap();
        // ∫ e^{-2(x-10)^2} dx = sqrt(pi/2); the trapezoid rule is spectrally
        // accurate for a Gaussian this well resolved.
        assert!((m - (PI / 2.0).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn first_weighted_norm_of_gaussian() {
        let g = HalfLineGrid::new(Direction::Right, 40.0, 800).unwrap();
        let s = init_state(&g, &gaussian(0.0), &Profile::Zero, None).unwrap();
        let w1 = weighted_norm_sq(&g, &s, Field::U, 1).unwrap();
        assert!((w1 - 10.0 * (PI / 2.0).sqrt()).abs() < 1e-9);
        assert!(weighted_norm_sq(&g, &s, Field::U, 3).is_err());
    }

    #[test]
    fn trapezoid_refinement_ratio() {
        // f = e^{-x} on [0, 12]: f'(0) != f'(12), so the trapezoid error is
        // a clean O(h^2).
        let exact = 1.0 - (-12.0f64).exp();
        let err = |n: usize| {
            let g = HalfLineGrid::new(Direction::Right, 12.0, n).unwrap();
            let vals: Vec<f64> = g.nodes().iter().map(|x| (-x).exp()).collect();
            (g.trapezoid(&vals) - exact).abs()
        };
        let ratio = err(64) / err(128);
        assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn boundary_nodes_pinned_and_compatibility_checked() {
        let g = HalfLineGrid::new(Direction::Right, 40.0, 800).unwrap();
        let sig = BoundarySignals::homogeneous();
        let s = init_state(&g, &gaussian(1.0), &Profile::Zero, Some(&sig)).unwrap();
        assert_eq!(s.u[0], Complex64::new(0.0, 0.0));

        let bad = BoundarySignals { f: Signal::Constant { re: 1.0, im: 0.0 }, ..BoundarySignals::homogeneous() };
        assert!(matches!(init_state(&g, &gaussian(1.0), &Profile::Zero, Some(&bad)), Err(Error::Compatibility(_))));
    }

    #[test]
    fn interior_nodes_reproduce_profile() {
        let g = HalfLineGrid::new(Direction::Left, 30.0, 300).unwrap();
        let p = Profile::Gaussian { amplitude: 0.7, center: -12.0, width: 2.0, wavenumber: -1.5 };
        let s = init_state(&g, &p, &Profile::Zero, None).unwrap();
        for j in 1..g.cells() {
            assert_eq!(s.u[j], p.eval(g.x(j)).unwrap());
        }
    }
}
