//! Functionals, boundary traces and fluxes, virial quantities, and the
//! residuals of the boundary-flux evolution laws.
//!
//! Sign conventions, with σ = +1 on the right half-line and −1 on the left:
//!
//! M(t) = M(0) + σ 2 Im ∫₀ᵗ u_x(0) ū(0) ds
//! Q(t) = Q(0) − σ ∫₀ᵗ (Q^u + Q^v) ds
//! E(t) = E(0) − σ ∫₀ᵗ (E₁ + E₂) ds

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{weighted_norm_sq, CouplingParams, Direction, Field, FieldState, HalfLineGrid};
use crate::stencil::{derivative, fd_weights, ONE_SIDED_D1, ONE_SIDED_D2};

type C = Complex64;

/// Values and derivatives at x = 0. Spatial derivatives are physical
/// (σ-corrected); time derivatives come from the sampled history.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct BoundaryTraces {
    #[serde(serialize_with = "ser_complex")]
    pub u0: C,
    #[serde(serialize_with = "ser_complex")]
    pub ux0: C,
    pub v0: f64,
    pub vx0: f64,
    pub vxx0: f64,
    #[serde(serialize_with = "ser_complex")]
    pub ut0: C,
    pub vt0: f64,
    pub vxt0: f64,
}

fn ser_complex<S: serde::Serializer>(z: &C, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

/// One-sided second-order traces at node 0; time derivatives left at zero.
pub fn extract_spatial_traces(grid: &HalfLineGrid, state: &FieldState) -> Result<BoundaryTraces> {
    if grid.len() < 4 || state.u.len() != grid.len() || state.v.len() != grid.len() {
        return Err(Error::Precondition("trace extraction needs at least 4 nodes".into()));
    }
    let (h, s) = (grid.h(), grid.sign());
    let (u, v) = (&state.u, &state.v);
    let d1 = |a: f64, b: f64, c: f64| (ONE_SIDED_D1[0] * a + ONE_SIDED_D1[1] * b + ONE_SIDED_D1[2] * c) * s / h;
    let ux0 = (u[0] * ONE_SIDED_D1[0] + u[1] * ONE_SIDED_D1[1] + u[2] * ONE_SIDED_D1[2]) * (s / h);
    let vxx0 = ONE_SIDED_D2.iter().zip(v).map(|(w, x)| w * x).sum::<f64>() / (h * h);
    Ok(BoundaryTraces { u0: u[0], ux0, v0: v[0], vx0: d1(v[0], v[1], v[2]), vxx0, ..Default::default() })
}

/// Fills ut0, vt0, vxt0 by second-order differences on the (possibly
/// nonuniform) sample times, one-sided at both ends.
pub fn fill_time_derivatives(times: &[f64], traces: &mut [BoundaryTraces]) -> Result<()> {
    let n = times.len();
    if n != traces.len() {
        return Err(Error::Precondition("times and traces differ in length".into()));
    }
    if n < 3 {
        if n == 1 {
            return Ok(());
        }
        return Err(Error::ShortSeries { needed: 3, have: n });
    }
    let stencil = |i: usize| -> (usize, Vec<f64>) {
        let start = i.saturating_sub(1).min(n - 3);
        (start, fd_weights(times[i], &times[start..start + 3], 1))
    };
    let derived: Vec<(C, f64, f64)> = (0..n)
        .map(|i| {
            let (start, w) = stencil(i);
            w.iter().enumerate().fold((C::new(0.0, 0.0), 0.0, 0.0), |acc, (k, wk)| {
                let tr = &traces[start + k];
                (acc.0 + tr.u0 * *wk, acc.1 + wk * tr.v0, acc.2 + wk * tr.vx0)
            })
        })
        .collect();
    for (tr, (ut, vt, vxt)) in traces.iter_mut().zip(derived) {
        tr.ut0 = ut;
        tr.vt0 = vt;
        tr.vxt0 = vxt;
    }
    Ok(())
}

/// First derivative of samples y(t) on nonuniform times, second order.
pub fn time_derivative(times: &[f64], y: &[f64]) -> Vec<f64> {
    nth_time_derivative(times, y, 1)
}

fn nth_time_derivative(times: &[f64], y: &[f64], m: usize) -> Vec<f64> {
    let n = times.len();
    let width = m + 2;
    if n < width {
        return vec![f64::NAN; n];
    }
    (0..n)
        .map(|i| {
            let start = i.saturating_sub(width / 2).min(n - width);
            let w = fd_weights(times[i], &times[start..start + width], m);
            w.iter().zip(&y[start..start + width]).map(|(a, b)| a * b).sum()
        })
        .collect()
}

/// Cumulative trapezoid ∫₀^{t_i} y ds.
pub fn cumulative_trapezoid(times: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    for i in 0..times.len() {
        if i > 0 {
            acc += 0.5 * (times[i] - times[i - 1]) * (y[i] + y[i - 1]);
        }
        out.push(acc);
    }
    out
}

/// M = ∫ |u|².
pub fn mass(grid: &HalfLineGrid, state: &FieldState) -> f64 {
    grid.integrate_with(|j| state.u[j].norm_sqr())
}

fn ux(grid: &HalfLineGrid, state: &FieldState) -> Vec<C> {
    derivative(&state.u, grid.h(), grid.sign())
}

fn vx(grid: &HalfLineGrid, state: &FieldState) -> Vec<f64> {
    derivative(&state.v, grid.h(), grid.sign())
}

/// ∫ Im(u ū_x).
fn im_u_conj_ux(grid: &HalfLineGrid, state: &FieldState, ux: &[C]) -> f64 {
    grid.integrate_with(|j| (state.u[j] * ux[j].conj()).im)
}

/// Q = ∫ (α/γ) v² + 2 Im(u ū_x).
pub fn moment_q(grid: &HalfLineGrid, state: &FieldState, params: &CouplingParams) -> f64 {
    let ux = ux(grid, state);
    params.ratio() * grid.integrate_with(|j| state.v[j] * state.v[j]) + 2.0 * im_u_conj_ux(grid, state, &ux)
}

/// E = ∫ αv|u|² − (α/6γ)v³ + (β/2)|u|⁴ + (α/2γ)v_x² + |u_x|².
pub fn energy_e(grid: &HalfLineGrid, state: &FieldState, params: &CouplingParams) -> f64 {
    let (a, b, r) = (params.alpha(), params.beta(), params.ratio());
    let ux = ux(grid, state);
    let vx = vx(grid, state);
    grid.integrate_with(|j| {
        let (v, m) = (state.v[j], state.u[j].norm_sqr());
        a * v * m - r / 6.0 * v * v * v + 0.5 * b * m * m + 0.5 * r * vx[j] * vx[j] + ux[j].norm_sqr()
    })
}

/// The four boundary fluxes entering the moment and energy laws.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Fluxes {
    pub qu: f64,
    pub qv: f64,
    pub e1: f64,
    pub e2: f64,
}

pub fn fluxes(tr: &BoundaryTraces, params: &CouplingParams) -> Fluxes {
    let (b, g, r) = (params.beta(), params.gamma(), params.ratio());
    let m0 = tr.u0.norm_sqr();
    let qu = 2.0 * tr.ux0.norm_sqr() + 2.0 * (tr.u0 * tr.ut0.conj()).im - b * m0 * m0;
    let qv = r * tr.vx0 * tr.vx0 - 2.0 * r * tr.vxx0 * tr.v0 - 2.0 * r / 3.0 * tr.v0.powi(3);
    let e1 = 2.0 * (tr.ux0 * tr.ut0.conj()).re + r * tr.vx0 * tr.vt0;
    let bracket = tr.vxx0 + 0.5 * tr.v0 * tr.v0 - g * m0;
    Fluxes { qu, qv, e1, e2: 0.5 * r * bracket * bracket }
}

/// P = ‖|x|^{1/2}u‖² + 2|α/γ| ‖|x|^{1/2}v‖².
pub fn p_functional(grid: &HalfLineGrid, state: &FieldState, params: &CouplingParams) -> Result<f64> {
    Ok(weighted_norm_sq(grid, state, Field::U, 1)?
        + 2.0 * params.ratio().abs() * weighted_norm_sq(grid, state, Field::V, 1)?)
}

/// Closed-form second time derivative of the virial functional:
/// 8∫|u_x|² + (6α/γ)∫v_x² + 2β∫|u|⁴ − (4α/3γ)∫v³ + 4α∫v|u|² − 2 Im∫u ū_x.
pub fn eta_d2_rhs(grid: &HalfLineGrid, state: &FieldState, params: &CouplingParams) -> f64 {
    let (a, b, r) = (params.alpha(), params.beta(), params.ratio());
    let ux = ux(grid, state);
    let vx = vx(grid, state);
    let local = grid.integrate_with(|j| {
        let (v, m) = (state.v[j], state.u[j].norm_sqr());
        8.0 * ux[j].norm_sqr() + 6.0 * r * vx[j] * vx[j] + 2.0 * b * m * m - 4.0 * r / 3.0 * v * v * v + 4.0 * a * v * m
    });
    local - 2.0 * im_u_conj_ux(grid, state, &ux)
}

/// η(0) = ∫x²|u₀|² and η'(0) = 4 Im∫x ū₀ ∂_x u₀ + (2α/γ)∫|x|v₀² − ∫|x||u₀|²
/// on the left half-line.
pub fn initial_virial_data(grid: &HalfLineGrid, state: &FieldState, params: &CouplingParams) -> Result<(f64, f64)> {
    if grid.direction() != Direction::Left {
        return Err(Error::Direction("the virial functional is defined on the left half-line".into()));
    }
    let ux = ux(grid, state);
    let x = grid.nodes();
    let eta0 = weighted_norm_sq(grid, state, Field::U, 2)?;
    let im = grid.integrate_with(|j| x[j] * (state.u[j].conj() * ux[j]).im);
    let d1 = 4.0 * im + 2.0 * params.ratio() * weighted_norm_sq(grid, state, Field::V, 1)?
        - weighted_norm_sq(grid, state, Field::U, 1)?;
    Ok((eta0, d1))
}

/// Spatial functionals of one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub mass: f64,
    pub moment: f64,
    pub energy: f64,
    pub w_u1: f64,
    pub w_v1: f64,
    pub w_u2: f64,
    pub p: f64,
    pub eta_d2_rhs: f64,
    /// ∫ v²
    pub v_sq: f64,
    pub traces: BoundaryTraces,
}

pub fn snapshot(grid: &HalfLineGrid, state: &FieldState, params: &CouplingParams) -> Result<Snapshot> {
    if !state.is_finite() {
        return Err(Error::NonFinite { t: state.t });
    }
    Ok(Snapshot {
        t: state.t,
        mass: mass(grid, state),
        moment: moment_q(grid, state, params),
        energy: energy_e(grid, state, params),
        w_u1: weighted_norm_sq(grid, state, Field::U, 1)?,
        w_v1: weighted_norm_sq(grid, state, Field::V, 1)?,
        w_u2: weighted_norm_sq(grid, state, Field::U, 2)?,
        p: p_functional(grid, state, params)?,
        eta_d2_rhs: eta_d2_rhs(grid, state, params),
        v_sq: weighted_norm_sq(grid, state, Field::V, 0)?,
        traces: extract_spatial_traces(grid, state)?,
    })
}

/// One row of the time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalRecord {
    pub t: f64,
    pub mass: f64,
    pub moment: f64,
    pub energy: f64,
    pub fluxes: Fluxes,
    pub w_u1: f64,
    pub w_v1: f64,
    pub w_u2: f64,
    /// NaN on the right half-line.
    pub eta: f64,
    pub eta_d1: f64,
    pub eta_d2_fd: f64,
    pub eta_d2_rhs: f64,
    pub p: f64,
    pub r_mass: f64,
    pub r_moment: f64,
    pub r_energy: f64,
    pub traces: BoundaryTraces,
}

/// Summary of the law residuals over a series.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct LawResiduals {
    pub r_mass: f64,
    pub r_moment: f64,
    pub r_energy: f64,
    /// Mid-run |d/dt ∫|x||u|² − law side|, normalized.
    pub r_first_moment_rate: f64,
    /// Mid-run |η''_fd − η''_rhs| / max(1, |η''_rhs|); left half-line only.
    pub r_virial: Option<f64>,
    /// Cumulative boundary integrals at the final sample.
    pub mass_flux: f64,
    pub moment_flux: f64,
    pub energy_flux: f64,
    /// min over samples of d/dt ∫|x||u|² − Q(0), left half-line only.
    pub first_moment_rate_margin: Option<f64>,
}

/// Flux sign overrides, for constructed-failure tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxSigns {
    pub qu: f64,
}

impl Default for FluxSigns {
    fn default() -> Self {
        Self { qu: 1.0 }
    }
}

fn normalized(diff: f64, scale: f64) -> f64 {
    diff.abs() / scale.abs().max(1.0)
}

/// Turns snapshots into records and law residuals.
pub fn analyze(
    series: &[Snapshot],
    params: &CouplingParams,
    direction: Direction,
) -> Result<(Vec<FunctionalRecord>, LawResiduals)> {
    analyze_with_signs(series, params, direction, FluxSigns::default())
}

pub fn analyze_with_signs(
    series: &[Snapshot],
    params: &CouplingParams,
    direction: Direction,
    signs: FluxSigns,
) -> Result<(Vec<FunctionalRecord>, LawResiduals)> {
    let n = series.len();
    if n == 0 {
        return Err(Error::ShortSeries { needed: 1, have: 0 });
    }
    if n == 2 {
        return Err(Error::ShortSeries { needed: 3, have: 2 });
    }
    let s = direction.sign();
    let left = direction == Direction::Left;
    let times: Vec<f64> = series.iter().map(|r| r.t).collect();
    let mut traces: Vec<BoundaryTraces> = series.iter().map(|r| r.traces).collect();
    fill_time_derivatives(&times, &mut traces)?;
    let fl: Vec<Fluxes> = traces
        .iter()
        .map(|tr| {
            let mut f = fluxes(tr, params);
            f.qu *= signs.qu;
            f
        })
        .collect();

    let mass_rate: Vec<f64> = traces.iter().map(|tr| 2.0 * s * (tr.ux0 * tr.u0.conj()).im).collect();
    let moment_rate: Vec<f64> = fl.iter().map(|f| -s * (f.qu + f.qv)).collect();
    let energy_rate: Vec<f64> = fl.iter().map(|f| -s * (f.e1 + f.e2)).collect();
    let mass_int = cumulative_trapezoid(&times, &mass_rate);
    let moment_int = cumulative_trapezoid(&times, &moment_rate);
    let energy_int = cumulative_trapezoid(&times, &energy_rate);

    let first = &series[0];
    let w_u1: Vec<f64> = series.iter().map(|r| r.w_u1).collect();
    let w_v1: Vec<f64> = series.iter().map(|r| r.w_v1).collect();
    let (eta, eta_d1, eta_d2) = if left && n >= 4 {
        let iu = cumulative_trapezoid(&times, &w_u1);
        let iv = cumulative_trapezoid(&times, &w_v1);
        let eta: Vec<f64> = (0..n).map(|i| series[i].w_u2 - iu[i] + 2.0 * params.ratio() * iv[i]).collect();
        let d1 = time_derivative(&times, &eta);
        let d2 = nth_time_derivative(&times, &eta, 2);
        (eta, d1, d2)
    } else {
        (vec![f64::NAN; n], vec![f64::NAN; n], vec![f64::NAN; n])
    };

    let mut records = Vec::with_capacity(n);
    let mut res = LawResiduals::default();
    for i in 0..n {
        let r = &series[i];
        let r_mass = normalized(r.mass - first.mass - mass_int[i], r.mass);
        let r_moment = normalized(r.moment - first.moment - moment_int[i], r.moment);
        let r_energy = normalized(r.energy - first.energy - energy_int[i], r.energy);
        res.r_mass = res.r_mass.max(r_mass);
        res.r_moment = res.r_moment.max(r_moment);
        res.r_energy = res.r_energy.max(r_energy);
        records.push(FunctionalRecord {
            t: r.t,
            mass: r.mass,
            moment: r.moment,
            energy: r.energy,
            fluxes: fl[i],
            w_u1: r.w_u1,
            w_v1: r.w_v1,
            w_u2: r.w_u2,
            eta: eta[i],
            eta_d1: eta_d1[i],
            eta_d2_fd: eta_d2[i],
            eta_d2_rhs: if left { r.eta_d2_rhs } else { f64::NAN },
            p: r.p,
            r_mass,
            r_moment,
            r_energy,
            traces: traces[i],
        });
    }
    res.mass_flux = mass_int[n - 1];
    res.moment_flux = moment_int[n - 1];
    res.energy_flux = energy_int[n - 1];
    if n >= 3 {
        let mid = n / 2;
        // d/dt ∫|x||u|² = σ[(α/γ)∫v² − Q], with Q taken from the moment law
        let rate = time_derivative(&times, &w_u1);
        let q_law = |i: usize| first.moment + moment_int[i];
        let law = |i: usize| s * (params.ratio() * series[i].v_sq - q_law(i));
        res.r_first_moment_rate = normalized(rate[mid] - law(mid), law(mid));
        if left {
            res.first_moment_rate_margin = Some(rate.iter().map(|d| d - first.moment).fold(f64::INFINITY, f64::min));
            if n >= 4 {
                res.r_virial = Some(normalized(eta_d2[mid] - series[mid].eta_d2_rhs, series[mid].eta_d2_rhs));
            }
        }
    }
    Ok((records, res))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::init_state;
    use crate::profile::Profile;
    use std::f64::consts::PI;

    fn grid(d: Direction) -> HalfLineGrid {
        HalfLineGrid::new(d, 40.0, 4000).unwrap()
    }

    fn params(a: f64, b: f64, g: f64) -> CouplingParams {
        CouplingParams::new(a, b, g).unwrap()
    }

    fn gauss(center: f64, k: f64) -> Profile {
        Profile::Gaussian { amplitude: 1.0, center, width: 1.0, wavenumber: k }
    }

    #[test]
    fn zero_state_everything_zero() {
        let g = grid(Direction::Left);
        let s = FieldState::zeros(g.len());
        let p = params(1.0, 1.0, -1.0);
        let snap = snapshot(&g, &s, &p).unwrap();
        assert_eq!(snap.mass, 0.0);
        assert_eq!(snap.moment, 0.0);
        assert_eq!(snap.energy, 0.0);
        assert_eq!(snap.eta_d2_rhs, 0.0);
        assert_eq!(snap.traces, BoundaryTraces::default());
        assert_eq!(fluxes(&snap.traces, &p), Fluxes::default());
        assert_eq!(initial_virial_data(&g, &s, &p).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn trace_stencils_exact_on_polynomials() {
        for d in [Direction::Right, Direction::Left] {
            let g = grid(d);
            let mut s = FieldState::zeros(g.len());
            for (j, x) in g.nodes().iter().enumerate() {
                s.u[j] = C::new(*x, 0.0);
                s.v[j] = x * x;
            }
            let tr = extract_spatial_traces(&g, &s).unwrap();
            assert!((tr.ux0 - C::new(1.0, 0.0)).norm() < 1e-12);
            assert!((tr.vxx0 - 2.0).abs() < 1e-9);
            assert!(tr.vx0.abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_mass_and_scaling() {
        let g = grid(Direction::Right);
        let s = init_state(&g, &gauss(10.0, 0.0), &Profile::Zero, None).unwrap();
        let m = mass(&g, &s);
        assert!((m - (PI / 2.0).sqrt()).abs() < 1e-10);
        let mut s3 = s.clone();
        s3.u.iter_mut().for_each(|z| *z *= C::new(0.0, 3.0));
        assert!((mass(&g, &s3) - 9.0 * m).abs() < 1e-12);
    }

    #[test]
    fn moment_examples() {
        let g = grid(Direction::Right);
        let p = params(1.0, 1.0, 1.0);
        let real = init_state(&g, &gauss(10.0, 0.0), &Profile::Zero, None).unwrap();
        assert!(moment_q(&g, &real, &p).abs() < 1e-14);
        let moving = init_state(&g, &gauss(10.0, 1.0), &Profile::Zero, None).unwrap();
        let q = moment_q(&g, &moving, &p);
        // centered differences: O(h²) with h = 0.01
        assert!((q + 2.0 * (PI / 2.0).sqrt()).abs() < 2e-4, "{q}");
        let v_only = init_state(&g, &Profile::Zero, &gauss(10.0, 0.0), None).unwrap();
        assert!((moment_q(&g, &v_only, &p) - (PI / 2.0).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn energy_examples() {
        let g = grid(Direction::Right);
        let p = params(1.0, 1.0, 1.0);
        let v_only = init_state(&g, &Profile::Zero, &gauss(10.0, 0.0), None).unwrap();
        let want = -(PI / 3.0).sqrt() / 6.0 + 0.5 * (PI / 2.0).sqrt();
        let e = energy_e(&g, &v_only, &p);
        assert!((e - want).abs() < 2e-4, "{e} vs {want}");
        assert!((want - 0.45611).abs() < 1e-5);
        let p0 = params(0.0, 0.0, 1.0);
        let moving = init_state(&g, &gauss(10.0, 2.0), &Profile::Zero, None).unwrap();
        assert!(energy_e(&g, &moving, &p0) > 0.0);
    }

    #[test]
    fn flux_reduced_forms() {
        let p = params(2.0, 1.0, 1.0);
        let tr = BoundaryTraces { ux0: C::new(0.5, -1.0), vx0: 0.3, vxx0: -0.7, vt0: 5.0, ..Default::default() };
        let f = fluxes(&tr, &p);
        assert!((f.qu - 2.0 * 1.25).abs() < 1e-15);
        assert!((f.qv - 2.0 * 0.09).abs() < 1e-15);
        assert!((f.e2 - 0.49).abs() < 1e-15);
        assert!(f.e2 >= 0.0 && f.qv >= 0.0);
    }

    #[test]
    fn p_functional_arithmetic() {
        let g = grid(Direction::Left);
        let p = params(1.0, 1.0, -1.0);
        let s = init_state(&g, &gauss(-10.0, 0.0), &gauss(-8.0, 0.0), None).unwrap();
        let wu = weighted_norm_sq(&g, &s, Field::U, 1).unwrap();
        let wv = weighted_norm_sq(&g, &s, Field::V, 1).unwrap();
        assert!((p_functional(&g, &s, &p).unwrap() - (wu + 2.0 * wv)).abs() < 1e-12);
        assert!(p_functional(&g, &s, &p).unwrap() >= wu);
    }

    #[test]
    fn eta_rhs_reduces_for_real_u() {
        let g = grid(Direction::Left);
        let p = params(0.0, 1.5, 1.0);
        let s = init_state(&g, &gauss(-10.0, 0.0), &Profile::Zero, None).unwrap();
        let ux = derivative(&s.u, g.h(), g.sign());
        let want = g.integrate_with(|j| 8.0 * ux[j].norm_sqr() + 3.0 * s.u[j].norm_sqr().powi(2));
        assert!((eta_d2_rhs(&g, &s, &p) - want).abs() < 1e-12);
    }

    #[test]
    fn initial_virial_gaussian() {
        // u0 = e^{ikx} e^{-(x-c)^2} on x < 0, v0 = 0:
        // η(0) = ∫x²φ² = √(π/2)(c² + 1/4), η'(0) = 4k∫xφ² − ∫|x|φ² = √(π/2)(4kc + c)
        let g = grid(Direction::Left);
        let p = params(1.0, 2.0, -1.0);
        let (c, k) = (-10.0, -1.0);
        let s = init_state(&g, &gauss(c, k), &Profile::Zero, None).unwrap();
        let (e0, d1) = initial_virial_data(&g, &s, &p).unwrap();
        let r = (PI / 2.0).sqrt();
        assert!((e0 - r * (c * c + 0.25)).abs() < 1e-8, "{e0}");
        assert!((d1 - r * (4.0 * k * c + c)).abs() < 1e-4 * d1.abs(), "{d1}");
        let real = init_state(&g, &gauss(c, 0.0), &Profile::Zero, None).unwrap();
        assert!(initial_virial_data(&g, &real, &p).unwrap().1 <= 0.0);
        assert!(matches!(initial_virial_data(&grid(Direction::Right), &s, &p), Err(Error::Direction(_))));
    }

    #[test]
    fn nonuniform_time_derivatives() {
        let t = [0.0, 0.1, 0.25, 0.3, 0.5];
        let y: Vec<f64> = t.iter().map(|t| 3.0 * t * t - t).collect();
        let d = time_derivative(&t, &y);
        for (ti, di) in t.iter().zip(&d) {
            assert!((di - (6.0 * ti - 1.0)).abs() < 1e-12);
        }
        let c = cumulative_trapezoid(&t, &[1.0; 5]);
        assert!((c[4] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_sample_series_is_trivial() {
        let g = grid(Direction::Right);
        let p = params(1.0, 1.0, 1.0);
        let s = init_state(&g, &gauss(10.0, 1.0), &Profile::Zero, None).unwrap();
        let (rec, res) = analyze(&[snapshot(&g, &s, &p).unwrap()], &p, Direction::Right).unwrap();
        assert_eq!(rec.len(), 1);
        assert_eq!((res.r_mass, res.r_moment, res.r_energy), (0.0, 0.0, 0.0));
        let two = [snapshot(&g, &s, &p).unwrap(); 2];
        assert!(matches!(analyze(&two, &p, Direction::Right), Err(Error::ShortSeries { .. })));
    }
}
