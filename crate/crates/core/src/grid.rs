//! Uniformly sampled periodic functions on the computational torus `[-L, L)`.
//!
//! Sample `i` sits at `x_i = (i - n/2) * dx`, which equals `-L + i * dx` but is
//! exactly symmetric about the origin in floating point. Derivatives are
//! fourth-order central differences with periodic wrap; off-grid reads use
//! six-point Lagrange interpolation.

use std::fmt::Write as _;
use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};

/// Smallest admissible sample count.
pub const MIN_SAMPLES: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    half_period: f64,
    dx: f64,
    samples: Vec<f64>,
}

impl GridFunction {
    /// Wraps `samples` as a function on `[-half_period, half_period)`.
    pub fn new(half_period: f64, samples: Vec<f64>) -> Result<Self> {
        let n = samples.len();
        if n < MIN_SAMPLES {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_SAMPLES} samples, got {n}"
            )));
        }
        if !(half_period.is_finite() && half_period > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half period must be positive, got {half_period}"
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("sample {i} is {}", samples[i])));
        }
        Ok(Self {
            half_period,
            dx: 2.0 * half_period / n as f64,
            samples,
        })
    }

    /// Samples `f` at the `n` grid nodes of `[-half_period, half_period)`.
    pub fn from_fn(half_period: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let dx = 2.0 * half_period / n as f64;
        let samples = (0..n).map(|i| f(node(i, n, dx))).collect();
        Self::new(half_period, samples)
    }

    pub fn constant(half_period: f64, n: usize, value: f64) -> Result<Self> {
        Self::new(half_period, vec![value; n])
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// `L`, half the period.
    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    pub fn period(&self) -> f64 {
        2.0 * self.half_period
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Coordinate of node `i`.
    pub fn x(&self, i: usize) -> f64 {
        node(i, self.n(), self.dx)
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.x(i)).collect()
    }

    /// Sample at a periodically wrapped index.
    #[inline]
    pub fn at(&self, i: isize) -> f64 {
        let n = self.n() as isize;
        self.samples[i.rem_euclid(n) as usize]
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.n() == other.n() && self.half_period == other.half_period
    }

    /// Replaces the samples, keeping the grid.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != self.n() {
            return Err(Error::Mismatch(format!(
                "expected {} samples, got {}",
                self.n(),
                samples.len()
            )));
        }
        Self::new(self.half_period, samples)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        self.with_samples(self.samples.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(Error::Mismatch("grid functions live on different grids".into()));
        }
        self.with_samples(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Periodic mean `(1/2L) * sum f_i dx`.
    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.n() as f64
    }

    /// Six-point Lagrange interpolation at an arbitrary `x`, periodic.
    pub fn interpolate(&self, x: f64) -> f64 {
        let n = self.n() as f64;
        let s = ((x + self.half_period) / self.dx).rem_euclid(n);
        let base = s.floor();
        let i = base as isize;
        lagrange_weights(s - base)
            .iter()
            .zip(-2..=3)
            .map(|(w, k)| w * self.at(i + k))
            .sum()
    }

    /// Values at the half-grid points `x_i + dx/2`, by the same six-point rule.
    /// The alternate half-plane integrand divides interpolation errors by `y^2`
    /// near the origin, so a four-point rule would cost it an order.
    pub fn midpoints(&self) -> Vec<f64> {
        let n = self.n() as isize;
        (0..n)
            .map(|i| {
                (150.0 * (self.at(i) + self.at(i + 1)) - 25.0 * (self.at(i - 1) + self.at(i + 2))
                    + 3.0 * (self.at(i - 2) + self.at(i + 3)))
                    / 256.0
            })
            .collect()
    }

    /// Fourth-order central difference of order `k` in `1..=4`.
    pub fn derivative(&self, k: usize) -> Result<Self> {
        if !(1..=4).contains(&k) {
            return Err(Error::InvalidParameter(format!(
                "derivative order must be 1..=4, got {k}"
            )));
        }
        if self.n() < 2 * k + 8 {
            return Err(Error::InvalidGrid(format!(
                "order {k} derivative needs n >= {}, got {}",
                2 * k + 8,
                self.n()
            )));
        }
        let h = self.dx;
        let f = |i: isize| self.at(i);
        let n = self.n() as isize;
        // Stencils are written in difference form so that constants map to an exact zero.
        let out: Vec<f64> = (0..n)
            .map(|i| {
                let d = |j: isize| f(i + j) - f(i - j);
                let s = |j: isize| f(i + j) + f(i - j) - 2.0 * f(i);
                match k {
                    1 => (8.0 * d(1) - d(2)) / (12.0 * h),
                    2 => (16.0 * s(1) - s(2)) / (12.0 * h * h),
                    3 => (8.0 * d(2) - 13.0 * d(1) - d(3)) / (8.0 * h * h * h),
                    _ => (-39.0 * s(1) + 12.0 * s(2) - s(3)) / (6.0 * h * h * h * h),
                }
            })
            .collect();
        self.with_samples(out)
    }

    /// Discrete Fourier sine/cosine amplitudes of the integer mode `k`
    /// (mode count over one period `2L` is `k L / pi`).
    pub fn mode_amplitude(&self, wavenumber: f64) -> (f64, f64) {
        let n = self.n() as f64;
        let (mut s, mut c) = (0.0, 0.0);
        for (i, v) in self.samples.iter().enumerate() {
            let x = self.x(i);
            s += v * (wavenumber * x).sin();
            c += v * (wavenumber * x).cos();
        }
        (2.0 * s / n, 2.0 * c / n)
    }

    /// CSV with header `x,f`, one row per sample, 17 significant digits.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(self.n() * 48);
        out.push_str("x,f\n");
        for (i, v) in self.samples.iter().enumerate() {
            let _ = writeln!(out, "{:.16e},{:.16e}", self.x(i), v);
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    /// Parses the `x,f` CSV layout written by [`GridFunction::to_csv_string`].
    pub fn from_csv_reader(reader: impl BufRead) -> Result<Self> {
        let mut xs = Vec::new();
        let mut fs = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if lineno == 0 {
                if line.replace(' ', "") != "x,f" {
                    return Err(Error::Csv {
                        line: 1,
                        message: format!("expected header `x,f`, found `{line}`"),
                    });
                }
                continue;
            }
            let mut parts = line.split(',');
            let mut field = |name: &str| -> Result<f64> {
                parts
                    .next()
                    .ok_or_else(|| Error::Csv {
                        line: lineno + 1,
                        message: format!("missing column `{name}`"),
                    })?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Csv {
                        line: lineno + 1,
                        message: format!("column `{name}`: {e}"),
                    })
            };
            xs.push(field("x")?);
            fs.push(field("f")?);
        }
        if xs.len() < 2 {
            return Err(Error::Csv {
                line: 0,
                message: "need at least two rows".into(),
            });
        }
        let half_period = -xs[0];
        let n = xs.len();
        let dx = 2.0 * half_period / n as f64;
        let tol = 1e-9 * dx.abs().max(1e-300);
        for (i, &x) in xs.iter().enumerate() {
            if (x - node(i, n, dx)).abs() > tol {
                return Err(Error::Csv {
                    line: i + 2,
                    message: format!("x = {x} is not the uniform node {}", node(i, n, dx)),
                });
            }
        }
        Self::new(half_period, fs)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }
}

#[inline]
fn node(i: usize, n: usize, dx: f64) -> f64 {
    (i as f64 - (n / 2) as f64) * dx
}

/// Lagrange weights for nodes at offsets `-1, 0, 1, 2` evaluated at `t` in `[0, 1)`.
#[inline]
/// Lagrange weights at offset `t` for the nodes `-2..=3`.
fn lagrange_weights(t: f64) -> [f64; 6] {
    let mut w = [1.0; 6];
    for (k, wk) in w.iter_mut().enumerate() {
        let xk = k as f64 - 2.0;
        for m in 0..6 {
            if m != k {
                let xm = m as f64 - 2.0;
                *wk *= (t - xm) / (xk - xm);
            }
        }
    }
    w
}
