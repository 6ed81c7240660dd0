//! Boundary signals f, g, h imposed at x = 0.

use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::profile::SampleTable;

/// A time signal given in closed form, by a sampled table, or by a closure.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
#[derive(Default)]
pub enum Signal {
    #[default]
    Zero,
    Constant {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    /// (a_re + i a_im) (t-d)^m e^{-r(t-d)} for t ≥ d, zero before.
    PowerExp {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        amplitude_im: f64,
        power: u32,
        #[serde(default = "one")]
        rate: f64,
        #[serde(default)]
        delay: f64,
    },
    File {
        path: PathBuf,
    },
    #[serde(skip)]
    Table(SampleTable),
    #[serde(skip)]
    Custom(CustomSignal),
    /// Σ c_k s_k
    #[serde(skip)]
    Sum(Vec<(Complex64, Signal)>),
}

fn one() -> f64 {
    1.0
}

/// Closure-backed signal (manufactured solutions, tests).
#[derive(Clone)]
pub struct CustomSignal(pub Arc<dyn Fn(f64) -> Complex64 + Send + Sync>);

impl fmt::Debug for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Signal::Zero => write!(f, "Zero"),
            Signal::Constant { re, im } => write!(f, "Constant({re}, {im})"),
            Signal::PowerExp { amplitude, amplitude_im, power, rate, delay } => {
                write!(f, "PowerExp({amplitude}+{amplitude_im}i, t^{power}, rate {rate}, delay {delay})")
            }
            Signal::File { path } => write!(f, "File({})", path.display()),
            Signal::Table(t) => write!(f, "Table({:?})", t.range()),
            Signal::Custom(_) => write!(f, "Custom"),
            Signal::Sum(parts) => f.debug_list().entries(parts.iter()).finish(),
        }
    }
}

impl Signal {
    /// t² e^{-t}, the default smooth compatible test signal.
    pub fn t2_exp() -> Self {
        Signal::PowerExp { amplitude: 1.0, amplitude_im: 0.0, power: 2, rate: 1.0, delay: 0.0 }
    }

    pub fn custom<F: Fn(f64) -> Complex64 + Send + Sync + 'static>(f: F) -> Self {
        Signal::Custom(CustomSignal(Arc::new(f)))
    }

    pub fn resolve(&self) -> Result<Signal> {
        match self {
            Signal::File { path } => Ok(Signal::Table(SampleTable::load(path)?)),
            Signal::Sum(parts) => {
                Ok(Signal::Sum(parts.iter().map(|(c, s)| Ok((*c, s.resolve()?))).collect::<Result<_>>()?))
            }
            other => Ok(other.clone()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Signal::Zero => true,
            Signal::Constant { re, im } => *re == 0.0 && *im == 0.0,
            Signal::PowerExp { amplitude, amplitude_im, .. } => *amplitude == 0.0 && *amplitude_im == 0.0,
            _ => false,
        }
    }

    /// Value at time t. Unresolved `File` signals evaluate to zero; call
    /// [`resolve`](Self::resolve) first.
    pub fn value(&self, t: f64) -> Complex64 {
        match self {
            Signal::Zero | Signal::File { .. } => Complex64::new(0.0, 0.0),
            Signal::Constant { re, im } => Complex64::new(*re, *im),
            Signal::PowerExp { amplitude, amplitude_im, power, rate, delay } => {
                let s = t - delay;
                if s < 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                Complex64::new(*amplitude, *amplitude_im) * (s.powi(*power as i32) * (-rate * s).exp())
            }
            Signal::Table(tab) => tab.eval_clamped(t),
            Signal::Custom(c) => (c.0)(t),
            Signal::Sum(parts) => parts.iter().map(|(c, s)| c * s.value(t)).sum(),
        }
    }

    pub fn real(&self, t: f64) -> f64 {
        self.value(t).re
    }

    /// Closed form of ∫₀^∞ e^{-iτt} s(t) dt when one exists.
    pub fn half_line_transform(&self, tau: f64) -> Option<Complex64> {
        match self {
            Signal::Zero => Some(Complex64::new(0.0, 0.0)),
            Signal::PowerExp { amplitude, amplitude_im, power, rate, delay } => {
                let m = *power as i32;
                let fact: f64 = (1..=m).map(f64::from).product();
                let denom = Complex64::new(*rate, tau).powi(m + 1);
                let shift = Complex64::from_polar(1.0, -tau * delay);
                Some(Complex64::new(*amplitude, *amplitude_im) * shift * fact / denom)
            }
            Signal::Sum(parts) => parts
                .iter()
                .try_fold(Complex64::new(0.0, 0.0), |acc, (c, s)| s.half_line_transform(tau).map(|q| acc + c * q)),
            _ => None,
        }
    }
}

/// Boundary data at x = 0: u = f, v = g and, on the left half-line, v_x = h.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySignals {
    #[serde(default)]
    pub f: Signal,
    #[serde(default)]
    pub g: Signal,
    #[serde(default)]
    pub h: Signal,
}

impl BoundarySignals {
    pub fn homogeneous() -> Self {
        Self::default()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.f.is_zero() && self.g.is_zero() && self.h.is_zero()
    }

    pub fn resolve(&self) -> Result<Self> {
        Ok(Self { f: self.f.resolve()?, g: self.g.resolve()?, h: self.h.resolve()? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_exp_values() {
        let s = Signal::t2_exp();
        assert_eq!(s.value(0.0), Complex64::new(0.0, 0.0));
        assert!((s.real(1.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(s.real(-1.0), 0.0);
    }

    #[test]
    fn closed_form_transform_matches_direct_sum() {
        // Midpoint sum of ∫₀^60 e^{-iτt} t² e^{-t} dt on a fine mesh.
        let s = Signal::t2_exp();
        for &tau in &[0.0, 0.7, -3.0] {
            let n = 600_000;
            let dt = 60.0 / n as f64;
            let direct: Complex64 = (0..n)
                .map(|k| {
                    let t = (k as f64 + 0.5) * dt;
                    Complex64::from_polar(1.0, -tau * t) * (t * t * (-t).exp()) * dt
                })
                .sum();
            let closed = s.half_line_transform(tau).unwrap();
            assert!((direct - closed).norm() < 1e-8, "tau {tau}: {direct} vs {closed}");
        }
    }

    #[test]
    fn signals_from_toml() {
        let b: BoundarySignals =
            toml::from_str("f = { kind = \"power_exp\", power = 2 }\ng = { kind = \"zero\" }").unwrap();
        assert!(!b.is_homogeneous());
        assert!((b.f.real(2.0) - 4.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert!(BoundarySignals::homogeneous().is_homogeneous());
    }
}
