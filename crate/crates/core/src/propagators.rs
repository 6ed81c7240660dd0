//! Crank–Nicolson steppers for the linear Schrödinger and Airy (linear KdV)
//! equations on the truncated half-line, and whole-line spectral references.
//!
//! Boundary closures follow the well-posed IBVP counts. The Schrödinger
//! stepper imposes u = f at x = 0 and u = 0 at the far end. The KdV stepper
//! imposes, on the right half-line, v = g at 0 and v = v_x = 0 at x = L; on
//! the left half-line, v = g and v_x = h at 0 and v = 0 at x = -L.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::banded::{BandedLu, BandedMatrix};
use crate::error::{Error, Result};
use crate::grid::{Direction, HalfLineGrid};
use crate::stencil::{index_weights, ONE_SIDED_D1};

type C = Complex64;

/// Cached factorization keyed by the time step; grid and row layout are
/// fixed per stepper instance.
#[derive(Debug, Clone)]
struct Cached<T> {
    dt: f64,
    lu: BandedLu<T>,
}

/// Crank–Nicolson stepper for i u_t + u_xx = 0 (plus optional forcing).
#[derive(Debug, Clone)]
pub struct SchrodingerCn {
    nodes: usize,
    h: f64,
    cache: Option<Cached<C>>,
}

impl SchrodingerCn {
    pub fn new(grid: &HalfLineGrid) -> Self {
        Self { nodes: grid.len(), h: grid.h(), cache: None }
    }

    fn factor(&mut self, dt: f64) -> Result<&BandedLu<C>> {
        let stale = self.cache.as_ref().is_none_or(|c| c.dt != dt);
        if stale {
            let n = self.nodes;
            let r = C::new(0.0, dt / (2.0 * self.h * self.h));
            let mut m = BandedMatrix::zeros(n, 1, 1);
            m.set(0, 0, C::new(1.0, 0.0));
            m.set(n - 1, n - 1, C::new(1.0, 0.0));
            for j in 1..n - 1 {
                m.set(j, j - 1, -r);
                m.set(j, j, 1.0 + 2.0 * r);
                m.set(j, j + 1, -r);
            }
            self.cache = Some(Cached { dt, lu: m.factor()? });
        }
        Ok(&self.cache.as_ref().expect("just filled").lu)
    }

    /// One step of size `dt` (negative steps run the scheme backwards).
    ///
    /// `f_old`, `f_new` are the boundary values at t and t + dt; `forcing`,
    /// when given, is the time-averaged source G in u_t = i u_xx + G.
    pub fn step(&mut self, u: &[C], dt: f64, f_old: C, f_new: C, forcing: Option<&[C]>) -> Result<Vec<C>> {
        let n = self.nodes;
        if u.len() != n {
            return Err(Error::Precondition(format!("field has {} nodes, grid {}", u.len(), n)));
        }
        if dt == 0.0 || !dt.is_finite() {
            return Err(Error::Precondition("time step must be finite and nonzero".into()));
        }
        let r = C::new(0.0, dt / (2.0 * self.h * self.h));
        let mut rhs = vec![C::new(0.0, 0.0); n];
        let old = |j: usize| if j == 0 { f_old } else { u[j] };
        for j in 1..n - 1 {
            let lap = old(j + 1) - 2.0 * old(j) + old(j - 1);
            rhs[j] = old(j) + r * lap;
            if let Some(g) = forcing {
                rhs[j] += g[j] * dt;
            }
        }
        rhs[0] = f_new;
        rhs[n - 1] = C::new(0.0, 0.0);
        let b = rhs.clone();
        let lu = self.factor(dt)?;
        lu.solve_in_place(&mut rhs);
        // one round of iterative refinement keeps the norm drift at roundoff
        let mut res = vec![C::new(0.0, 0.0); n];
        res[0] = b[0] - rhs[0];
        res[n - 1] = b[n - 1] - rhs[n - 1];
        for j in 1..n - 1 {
            res[j] = b[j] - (rhs[j] - r * (rhs[j + 1] - 2.0 * rhs[j] + rhs[j - 1]));
        }
        lu.solve_in_place(&mut res);
        for (x, d) in rhs.iter_mut().zip(&res) {
            *x += d;
        }
        Ok(rhs)
    }
}

/// Boundary values for one KdV step, taken at the new time level.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KdvBoundary {
    /// v(0, t + dt)
    pub g: f64,
    /// v_x(0, t + dt); used only on the left half-line.
    pub h: f64,
}

#[derive(Debug, Clone)]
enum Row {
    /// v_t = Σ w_k v_{start+k}
    Pde { start: usize, weights: Vec<f64> },
    /// Σ w_k v_{start+k} = boundary value
    Constraint { start: usize, weights: Vec<f64>, value: ConstraintValue },
}

#[derive(Debug, Clone, Copy)]
enum ConstraintValue {
    Zero,
    G,
    H,
}

/// Crank–Nicolson stepper for v_t + v_xxx = 0 (plus optional forcing).
#[derive(Debug, Clone)]
pub struct KdvCn {
    direction: Direction,
    rows: Vec<Row>,
    cache: Option<Cached<f64>>,
}

impl KdvCn {
    pub fn new(grid: &HalfLineGrid) -> Self {
        let n = grid.len();
        let last = n - 1;
        let h = grid.h();
        let s = grid.sign();
        // v_t = -∂_x³ v = -(s / h³) D³_index v
        let scale = -s / (h * h * h);
        let scaled = |w: Vec<f64>| w.into_iter().map(|x| x * scale).collect::<Vec<_>>();
        let centered = scaled(index_weights(2.0, 5, 3));
        let dirichlet = |j: usize, value| Row::Constraint { start: j, weights: vec![1.0], value };

        let mut rows = Vec::with_capacity(n);
        for j in 0..n {
            let row = match grid.direction() {
                Direction::Right => match j {
                    0 => dirichlet(0, ConstraintValue::G),
                    1 => Row::Pde { start: 0, weights: scaled(index_weights(1.0, 5, 3)) },
                    j if j == last - 1 => Row::Constraint {
                        start: last - 2,
                        // one-sided v_x(L) = 0, nodes N, N-1, N-2
                        weights: vec![ONE_SIDED_D1[2], ONE_SIDED_D1[1], ONE_SIDED_D1[0]],
                        value: ConstraintValue::Zero,
                    },
                    j if j == last => dirichlet(last, ConstraintValue::Zero),
                    j => Row::Pde { start: j - 2, weights: centered.clone() },
                },
                Direction::Left => match j {
                    0 => dirichlet(0, ConstraintValue::G),
                    1 => Row::Constraint {
                        start: 0,
                        weights: ONE_SIDED_D1.iter().map(|w| w * s / h).collect(),
                        value: ConstraintValue::H,
                    },
                    j if j == last - 1 => Row::Pde { start: last - 4, weights: scaled(index_weights(3.0, 5, 3)) },
                    j if j == last => dirichlet(last, ConstraintValue::Zero),
                    j => Row::Pde { start: j - 2, weights: centered.clone() },
                },
            };
            rows.push(row);
        }
        Self { direction: grid.direction(), rows, cache: None }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Number of constraint rows touching x = 0 (1 on the right, 2 on the left).
    pub fn conditions_at_origin(&self) -> usize {
        self.rows.iter().filter(|r| matches!(r, Row::Constraint { start: 0, .. })).count()
    }

    /// Node indices whose values are fixed by constraint rows.
    pub fn constrained_nodes(&self) -> Vec<usize> {
        self.rows.iter().enumerate().filter(|(_, r)| matches!(r, Row::Constraint { .. })).map(|(j, _)| j).collect()
    }

    fn factor(&mut self, dt: f64) -> Result<&BandedLu<f64>> {
        let stale = self.cache.as_ref().is_none_or(|c| c.dt != dt);
        if stale {
            let n = self.rows.len();
            let mut m = BandedMatrix::zeros(n, 3, 3);
            for (j, row) in self.rows.iter().enumerate() {
                match row {
                    Row::Pde { start, weights } => {
                        for (k, w) in weights.iter().enumerate() {
                            let col = start + k;
                            let diag = if col == j { 1.0 } else { 0.0 };
                            m.set(j, col, diag - 0.5 * dt * w);
                        }
                    }
                    Row::Constraint { start, weights, .. } => {
                        for (k, w) in weights.iter().enumerate() {
                            m.set(j, start + k, *w);
                        }
                    }
                }
            }
            self.cache = Some(Cached { dt, lu: m.factor()? });
        }
        Ok(&self.cache.as_ref().expect("just filled").lu)
    }

    /// One step of size `dt`; `forcing` is the time-averaged source G in
    /// v_t + v_xxx = G.
    pub fn step(&mut self, v: &[f64], dt: f64, bc: KdvBoundary, forcing: Option<&[f64]>) -> Result<Vec<f64>> {
        let n = self.rows.len();
        if v.len() != n {
            return Err(Error::Precondition(format!("field has {} nodes, grid {}", v.len(), n)));
        }
        if dt == 0.0 || !dt.is_finite() {
            return Err(Error::Precondition("time step must be finite and nonzero".into()));
        }
        let mut rhs = vec![0.0; n];
        for (j, row) in self.rows.iter().enumerate() {
            rhs[j] = match row {
                Row::Pde { start, weights } => {
                    let av: f64 = weights.iter().enumerate().map(|(k, w)| w * v[start + k]).sum();
                    v[j] + 0.5 * dt * av + forcing.map_or(0.0, |g| dt * g[j])
                }
                Row::Constraint { value, .. } => match value {
                    ConstraintValue::Zero => 0.0,
                    ConstraintValue::G => bc.g,
                    ConstraintValue::H => bc.h,
                },
            };
        }
        self.factor(dt)?.solve_in_place(&mut rhs);
        Ok(rhs)
    }

    /// Re-imposes the constraint rows that involve more than one node
    /// (the one-sided derivative closures) by adjusting their own node.
    /// Dirichlet rows are left alone.
    pub fn reimpose_closures(&self, v: &mut [f64], bc: KdvBoundary) {
        for (j, row) in self.rows.iter().enumerate() {
            if let Row::Constraint { start, weights, value } = row {
                if weights.len() < 2 {
                    continue;
                }
                let target = match value {
                    ConstraintValue::Zero => 0.0,
                    ConstraintValue::G => bc.g,
                    ConstraintValue::H => bc.h,
                };
                let own = j - start;
                let rest: f64 =
                    weights.iter().enumerate().filter(|(k, _)| *k != own).map(|(k, w)| w * v[start + k]).sum();
                v[j] = (target - rest) / weights[own];
            }
        }
    }
}

/// Samples on the extended (periodic, zero-padded) line used by the
/// spectral references. `x` is increasing in index with spacing `dx`
/// (which carries the sign of the source grid).
#[derive(Debug, Clone)]
pub struct ExtendedLine<T> {
    pub x: Vec<f64>,
    pub values: Vec<T>,
    /// Index of the first input node inside `values`.
    pub offset: usize,
    /// Number of input nodes.
    pub input_len: usize,
    pub dx: f64,
}

impl<T: Copy> ExtendedLine<T> {
    /// Values on the original nodes.
    pub fn restrict(&self) -> Vec<T> {
        self.values[self.offset..self.offset + self.input_len].to_vec()
    }
}

impl ExtendedLine<C> {
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.dx.abs()
    }
}

impl ExtendedLine<f64> {
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|z| z * z).sum::<f64>() * self.dx.abs()
    }
}

/// Relative size of the end samples allowed by the support check.
const SUPPORT_TOL: f64 = 1e-10;

fn spectral_evolve(x0: f64, dx: f64, data: &[C], symbol: impl Fn(f64) -> C) -> Result<ExtendedLine<C>> {
    let n = data.len();
    if n < 2 || dx == 0.0 {
        return Err(Error::Precondition("need at least two samples with nonzero spacing".into()));
    }
    let peak = data.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let ends = data[0].norm().max(data[n - 1].norm());
    if peak > 0.0 && ends > SUPPORT_TOL * peak {
        return Err(Error::Support(format!("end samples {ends:.3e} not negligible against peak {peak:.3e}")));
    }
    let total = (5 * n).next_power_of_two();
    let offset = (total - n) / 2;
    let mut buf = vec![C::new(0.0, 0.0); total];
    buf[offset..offset + n].copy_from_slice(data);

    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(total).process(&mut buf);
    let period = total as f64 * dx;
    for (k, z) in buf.iter_mut().enumerate() {
        let kk = if k <= total / 2 { k as f64 } else { k as f64 - total as f64 };
        let xi = 2.0 * std::f64::consts::PI * kk / period;
        *z *= symbol(xi);
    }
    planner.plan_fft_inverse(total).process(&mut buf);
    let scale = 1.0 / total as f64;
    buf.iter_mut().for_each(|z| *z *= scale);

    let start = x0 - offset as f64 * dx;
    let x = (0..total).map(|k| start + k as f64 * dx).collect();
    Ok(ExtendedLine { x, values: buf, offset, input_len: n, dx })
}

/// Whole-line e^{it∂²} applied to samples on nodes x0 + j dx.
pub fn free_schrodinger_reference(x0: f64, dx: f64, u0: &[C], t: f64) -> Result<ExtendedLine<C>> {
    spectral_evolve(x0, dx, u0, |xi| C::from_polar(1.0, -t * xi * xi))
}

/// Whole-line e^{-t∂³} applied to real samples on nodes x0 + j dx.
pub fn free_airy_reference(x0: f64, dx: f64, v0: &[f64], t: f64) -> Result<ExtendedLine<f64>> {
    let data: Vec<C> = v0.iter().map(|&v| C::new(v, 0.0)).collect();
    let line = spectral_evolve(x0, dx, &data, |xi| C::from_polar(1.0, t * xi * xi * xi))?;
    Ok(ExtendedLine {
        x: line.x,
        values: line.values.iter().map(|z| z.re).collect(),
        offset: line.offset,
        input_len: line.input_len,
        dx: line.dx,
    })
}
