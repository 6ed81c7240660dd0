//! Initial-data catalog and whitespace-separated sample tables.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampled function of one real variable, linearly interpolated.
///
/// Text format: one sample per line, either `x value` or `x re im`,
/// whitespace separated, with strictly monotone x. Blank lines and lines
/// starting with `#` are skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleTable {
    x: Vec<f64>,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl SampleTable {
    pub fn new(x: Vec<f64>, re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        if x.len() < 2 || re.len() != x.len() || im.len() != x.len() {
            return Err(Error::InitialData("table needs at least two rows of equal width".into()));
        }
        let inc = x.windows(2).all(|w| w[1] > w[0]);
        let dec = x.windows(2).all(|w| w[1] < w[0]);
        if !(inc || dec) {
            return Err(Error::InitialData("table abscissae are not strictly monotone".into()));
        }
        if x.iter().chain(&re).chain(&im).any(|v| !v.is_finite()) {
            return Err(Error::InitialData("table contains non-finite entries".into()));
        }
        let (mut x, mut re, mut im) = (x, re, im);
        if dec {
            x.reverse();
            re.reverse();
            im.reverse();
        }
        Ok(Self { x, re, im })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (mut x, mut re, mut im) = (Vec::new(), Vec::new(), Vec::new());
        let mut width = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<f64> = line
                .split_whitespace()
                .map(|c| c.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InitialData(format!("line {}: {e}", lineno + 1)))?;
            if cols.len() != 2 && cols.len() != 3 {
                return Err(Error::InitialData(format!(
                    "line {}: expected 2 or 3 columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            match width {
                None => width = Some(cols.len()),
                Some(w) if w != cols.len() => {
                    return Err(Error::InitialData(format!("line {}: column count changed", lineno + 1)))
                }
                _ => {}
            }
            x.push(cols[0]);
            re.push(cols[1]);
            im.push(cols.get(2).copied().unwrap_or(0.0));
        }
        Self::new(x, re, im)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    pub fn is_real(&self) -> bool {
        self.im.iter().all(|v| *v == 0.0)
    }

    /// Linear interpolation; `None` outside the sampled range.
    pub fn eval(&self, x: f64) -> Option<Complex64> {
        let (lo, hi) = self.range();
        let slack = 1e-12 * (hi - lo);
        if x < lo - slack || x > hi + slack {
            return None;
        }
        let k = match self.x.partition_point(|&xi| xi <= x) {
            0 => 0,
            p if p >= self.x.len() => self.x.len() - 2,
            p => p - 1,
        };
        let t = ((x - self.x[k]) / (self.x[k + 1] - self.x[k])).clamp(0.0, 1.0);
        let re = self.re[k] + t * (self.re[k + 1] - self.re[k]);
        let im = self.im[k] + t * (self.im[k + 1] - self.im[k]);
        Some(Complex64::new(re, im))
    }

    /// Like [`eval`](Self::eval) but holds the end values outside the range.
    pub fn eval_clamped(&self, x: f64) -> Complex64 {
        let (lo, hi) = self.range();
        self.eval(x.clamp(lo, hi)).unwrap_or_default()
    }
}

/// Initial-data catalog. All shapes carry an optional plane-wave factor
/// e^{ikx}; the KdV component must be real, so k = 0 there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    Zero,
    /// a e^{ikx} e^{-(x-c)²/w²}
    Gaussian {
        #[serde(default = "one")]
        amplitude: f64,
        center: f64,
        #[serde(default = "one")]
        width: f64,
        #[serde(default)]
        wavenumber: f64,
    },
    /// a e^{ikx} sech((x-c)/w)
    Sech {
        #[serde(default = "one")]
        amplitude: f64,
        center: f64,
        #[serde(default = "one")]
        width: f64,
        #[serde(default)]
        wavenumber: f64,
    },
    File {
        path: PathBuf,
    },
    #[serde(skip)]
    Table(SampleTable),
}

fn one() -> f64 {
    1.0
}

impl Profile {
    /// Replace `File` entries by their loaded table.
    pub fn resolve(&self) -> Result<Profile> {
        match self {
            Profile::File { path } => Ok(Profile::Table(SampleTable::load(path)?)),
            other => Ok(other.clone()),
        }
    }

    pub fn eval(&self, x: f64) -> Result<Complex64> {
        let phase = |k: f64| Complex64::from_polar(1.0, k * x);
        match self {
            Profile::Zero => Ok(Complex64::new(0.0, 0.0)),
            Profile::Gaussian { amplitude, center, width, wavenumber } => {
                let r = (x - center) / width;
                Ok(phase(*wavenumber) * (amplitude * (-r * r).exp()))
            }
            Profile::Sech { amplitude, center, width, wavenumber } => {
                let r = (x - center) / width;
                Ok(phase(*wavenumber) * (amplitude / r.cosh()))
            }
            Profile::Table(t) => t.eval(x).ok_or_else(|| {
                let (lo, hi) = t.range();
                Error::InitialData(format!("table covers [{lo}, {hi}] but grid needs x = {x}"))
            }),
            Profile::File { path } => Err(Error::InitialData(format!("file profile {} not loaded", path.display()))),
        }
    }

    pub fn sample_complex(&self, xs: &[f64]) -> Result<Vec<Complex64>> {
        let p = self.resolve()?;
        xs.iter().map(|&x| p.eval(x)).collect()
    }

    pub fn sample_real(&self, xs: &[f64]) -> Result<Vec<f64>> {
        let p = self.resolve()?;
        match &p {
            Profile::Gaussian { wavenumber, .. } | Profile::Sech { wavenumber, .. } if *wavenumber != 0.0 => {
                return Err(Error::InitialData("real field profile must have zero wavenumber".into()))
            }
            Profile::Table(t) if !t.is_real() => {
                return Err(Error::InitialData("real field table has an imaginary column".into()))
            }
            _ => {}
        }
        xs.iter().map(|&x| p.eval(x).map(|z| z.re)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_two_and_three_column_tables() {
        let t = SampleTable::parse("# header\n0 1\n1 3\n2 5\n").unwrap();
        assert_eq!(t.eval(0.5).unwrap(), Complex64::new(2.0, 0.0));
        let t = SampleTable::parse("0 1 -1\n2 3 1\n").unwrap();
        assert_eq!(t.eval(1.0).unwrap(), Complex64::new(2.0, 0.0));
        assert!(t.eval(2.5).is_none());
    }

    #[test]
    fn decreasing_tables_accepted() {
        let t = SampleTable::parse("0 0\n-1 1\n-2 4\n").unwrap();
        assert_eq!(t.range(), (-2.0, 0.0));
        assert_eq!(t.eval(-1.5).unwrap().re, 2.5);
    }

    #[test]
    fn rejects_malformed_tables() {
        assert!(SampleTable::parse("0 1\n0 2\n").is_err());
        assert!(SampleTable::parse("0 1\n1 2 3\n").is_err());
        assert!(SampleTable::parse("0 1 2 3\n1 2 3 4\n").is_err());
        assert!(SampleTable::parse("0 x\n1 2\n").is_err());
        assert!(SampleTable::parse("0 1\n").is_err());
    }

    #[test]
    fn table_must_cover_grid() {
        let p = Profile::Table(SampleTable::parse("0 1\n5 1\n").unwrap());
        assert!(p.sample_complex(&[0.0, 2.0, 6.0]).is_err());
        assert_eq!(p.sample_real(&[0.0, 2.0, 5.0]).unwrap(), vec![1.0; 3]);
    }

    #[test]
    fn real_field_rejects_phase() {
        let p = Profile::Gaussian { amplitude: 1.0, center: 0.0, width: 1.0, wavenumber: 1.0 };
        assert!(p.sample_real(&[0.0]).is_err());
    }

    #[test]
    fn profile_from_toml() {
        let p: Profile = toml::from_str("kind = \"gaussian\"\ncenter = 10.0\nwavenumber = 1.0").unwrap();
        assert_eq!(p, Profile::Gaussian { amplitude: 1.0, center: 10.0, width: 1.0, wavenumber: 1.0 });
        assert!(toml::from_str::<Profile>("kind = \"gaussian\"\ncenter = 1.0\nbogus = 2").is_err());
    }
}
