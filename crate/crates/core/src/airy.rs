//! Airy function Ai on the real line and the boundary-potential kernel
//! A(x) = (1/2π) ∫ e^{i(ξ³ + ξx)} dξ = 3^{-1/3} Ai(3^{-1/3} x).

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Ai(0) = 3^{-2/3} / Γ(2/3)
const AI0: f64 = 0.355_028_053_887_817_239_26;
/// -Ai'(0) = 3^{-1/3} / Γ(1/3)
const DAI0: f64 = 0.258_819_403_792_806_798_41;

/// Series and asymptotic representations agree to a few 1e-11 here.
const SWITCH: f64 = 6.0;
/// Beyond this Ai underflows for all practical purposes.
const UPPER_CLAMP: f64 = 50.0;
const LOWER_LIMIT: f64 = -50.0;

/// 3^{-1/3}
pub const CUBE_ROOT_THIRD: f64 = 0.693_361_274_350_634_704_843;

/// Values of Ai and of the kernel family at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryEval {
    pub x: f64,
    pub ai: f64,
    pub kernel: f64,
    pub kernel_d2: f64,
}

impl AiryEval {
    /// `ai` is Ai(x); `kernel` and `kernel_d2` are A(x) and A''(x).
    pub fn at(x: f64) -> Result<Self> {
        Ok(Self { x, ai: airy_ai(x)?, kernel: airy_kernel(x)?, kernel_d2: airy_kernel_d2(x)? })
    }
}

/// Standard Airy function Ai(x) for x ≥ -50. Returns 0 above x = 50.
pub fn airy_ai(x: f64) -> Result<f64> {
    if x.is_nan() || x < LOWER_LIMIT {
        return Err(Error::OutOfRange(x));
    }
    if x > UPPER_CLAMP {
        return Ok(0.0);
    }
    if x.abs() <= SWITCH {
        Ok(maclaurin(x))
    } else if x > 0.0 {
        Ok(asymptotic_positive(x))
    } else {
        Ok(asymptotic_negative(-x))
    }
}

/// A(x) = 3^{-1/3} Ai(3^{-1/3} x).
pub fn airy_kernel(x: f64) -> Result<f64> {
    airy_ai(CUBE_ROOT_THIRD * x).map(|a| CUBE_ROOT_THIRD * a).map_err(|_| Error::OutOfRange(x))
}

/// A''(x) = (x/3) A(x).
pub fn airy_kernel_d2(x: f64) -> Result<f64> {
    airy_kernel(x).map(|a| x / 3.0 * a)
}

/// Ai(x) = Ai(0) f(x) + Ai'(0) g(x) with the two Maclaurin solutions of y'' = xy.
fn maclaurin(x: f64) -> f64 {
    let x3 = x * x * x;
    let (mut f, mut g) = (1.0, x);
    let (mut tf, mut tg) = (1.0, x);
    for k in 1..200 {
        let k3 = 3.0 * k as f64;
        tf *= x3 / ((k3 - 1.0) * k3);
        tg *= x3 / (k3 * (k3 + 1.0));
        f += tf;
        g += tg;
        if tf.abs() <= 1e-17 * f.abs().max(1.0) && tg.abs() <= 1e-17 * g.abs().max(1.0) {
            break;
        }
    }
    AI0 * f - DAI0 * g
}

/// Coefficients u_k of the large-argument expansions.
fn u_coeffs() -> [f64; 40] {
    let mut u = [0.0; 40];
    u[0] = 1.0;
    for k in 1..40 {
        let kf = k as f64;
        u[k] = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
    }
    u
}

fn asymptotic_positive(x: f64) -> f64 {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let u = u_coeffs();
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut zk = 1.0;
    for (k, uk) in u.iter().enumerate() {
        let term = if k % 2 == 0 { uk / zk } else { -uk / zk };
        if term.abs() >= prev {
            break;
        }
        sum += term;
        prev = term.abs();
        zk *= zeta;
    }
    (-zeta).exp() / (2.0 * PI.sqrt() * x.powf(0.25)) * sum
}

/// Ai(-a) for a > 0 via the oscillatory modulus-phase expansion.
fn asymptotic_negative(a: f64) -> f64 {
    let zeta = 2.0 / 3.0 * a.powf(1.5);
    let u = u_coeffs();
    let (mut p, mut q) = (0.0, 0.0);
    let (mut prev_p, mut prev_q) = (f64::INFINITY, f64::INFINITY);
    for k in 0..u.len() / 2 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let tp = sign * u[2 * k] / zeta.powi(2 * k as i32);
        let tq = sign * u[2 * k + 1] / zeta.powi(2 * k as i32 + 1);
        if tp.abs() >= prev_p || tq.abs() >= prev_q {
            break;
        }
        p += tp;
        q += tq;
        prev_p = tp.abs();
        prev_q = tq.abs();
    }
    let theta = zeta + PI / 4.0;
    (theta.sin() * p - theta.cos() * q) / (PI.sqrt() * a.powf(0.25))
}
