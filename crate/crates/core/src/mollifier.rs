//! The smoothing kernel `phi_eps(x) = eps^-1 phi(x / eps)` with
//! `phi(x) = exp(beta x^2 / (x^2 - 1))` on `(-1, 1)`.
//!
//! `phi(0) = 1` holds for every `beta`; `beta` is the unique positive root of
//! `int phi = 1`, found once by bisection and cached.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// Trapezoid panels used for the unit-mass integral. The profile is flat to
/// all orders at `x = +-1`, so the rule converges faster than any power.
const MASS_PANELS: usize = 1 << 14;
const TABLE_POINTS: usize = 257;

/// Unit-scale profile for a given shape parameter.
#[inline]
pub fn profile(beta: f64, x: f64) -> f64 {
    let x2 = x * x;
    if x2 >= 1.0 {
        0.0
    } else {
        (beta * x2 / (x2 - 1.0)).exp()
    }
}

/// Derivative of [`profile`].
#[inline]
pub fn profile_slope(beta: f64, x: f64) -> f64 {
    let x2 = x * x;
    if x2 >= 1.0 {
        0.0
    } else {
        let d = x2 - 1.0;
        profile(beta, x) * beta * (-2.0 * x) / (d * d)
    }
}

fn mass(beta: f64) -> f64 {
    let h = 2.0 / MASS_PANELS as f64;
    // endpoints contribute zero
    (1..MASS_PANELS)
        .map(|i| profile(beta, -1.0 + i as f64 * h))
        .sum::<f64>()
        * h
}

fn solve_beta() -> Result<f64> {
    // mass(0) = 2 and mass decreases monotonically to 0
    let (mut lo, mut hi) = (0.0_f64, 64.0_f64);
    if !(mass(hi) < 1.0) {
        return Err(Error::RootFinding("mass not below 1 at beta = 64".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mass(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let beta = 0.5 * (lo + hi);
    if (mass(beta) - 1.0).abs() > 1e-12 {
        return Err(Error::RootFinding(format!(
            "bisection ended at beta = {beta} with mass {}",
            mass(beta)
        )));
    }
    Ok(beta)
}

/// Shape parameter giving unit mass, computed on first use.
pub fn beta_star() -> Result<f64> {
    static BETA: OnceLock<std::result::Result<f64, String>> = OnceLock::new();
    BETA.get_or_init(|| solve_beta().map_err(|e| e.to_string()))
        .clone()
        .map_err(Error::RootFinding)
}

#[derive(Debug, Clone)]
pub struct Mollifier {
    pub eps: f64,
    pub beta: f64,
    /// `int phi_eps`, computed independently of the root finder's stopping test.
    pub mass: f64,
    /// Measured `max |phi'|` of the unit-scale profile.
    pub max_slope: f64,
    pub slope_bound_ok: bool,
    /// `(x, phi_eps(x))` on a uniform grid of `[-eps, eps]`.
    pub table: Vec<(f64, f64)>,
}

impl Mollifier {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 0.5) {
            return Err(Error::InvalidParameter(format!(
                "mollifier scale must lie in (0, 1/2], got {eps}"
            )));
        }
        let beta = beta_star()?;
        let h = 2.0 / MASS_PANELS as f64;
        let max_slope = (0..=MASS_PANELS)
            .map(|i| profile_slope(beta, -1.0 + i as f64 * h).abs())
            .fold(0.0, f64::max);
        let table = (0..TABLE_POINTS)
            .map(|i| {
                let x = eps * (-1.0 + 2.0 * i as f64 / (TABLE_POINTS - 1) as f64);
                (x, profile(beta, x / eps) / eps)
            })
            .collect();
        Ok(Self {
            eps,
            beta,
            mass: mass(beta),
            max_slope,
            slope_bound_ok: max_slope <= 2.0,
            table,
        })
    }

    /// `phi_eps(x)`.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        profile(self.beta, x / self.eps) / self.eps
    }

    /// Continuous Fourier multiplier `int phi_eps(x) cos(k x) dx`.
    pub fn fourier_multiplier(&self, k: f64) -> f64 {
        let h = 2.0 / MASS_PANELS as f64;
        (1..MASS_PANELS)
            .map(|i| {
                let s = -1.0 + i as f64 * h;
                profile(self.beta, s) * (k * self.eps * s).cos()
            })
            .sum::<f64>()
            * h
    }

    /// Normalized one-sided discrete weights `w_1..w_m` for spacing `dx`;
    /// the full stencil is `w_0 = 1 - 2 sum w_j` at the center.
    pub fn weights(&self, dx: f64) -> Result<Vec<f64>> {
        if self.eps < 2.0 * dx {
            return Err(Error::UnderResolvedMollifier {
                eps: self.eps,
                min: 2.0 * dx,
            });
        }
        let mut raw = vec![self.eval(0.0)];
        let mut j = 1usize;
        while (j as f64) * dx < self.eps {
            raw.push(self.eval(j as f64 * dx));
            j += 1;
        }
        let total = raw[0] + 2.0 * raw[1..].iter().sum::<f64>();
        Ok(raw[1..].iter().map(|w| w / total).collect())
    }

    /// Multiplier the discrete convolution applies to `cos(k x)` on spacing `dx`.
    pub fn discrete_multiplier(&self, k: f64, dx: f64) -> Result<f64> {
        let w = self.weights(dx)?;
        Ok(1.0
            + w.iter()
                .enumerate()
                .map(|(j, wj)| 2.0 * wj * ((k * (j + 1) as f64 * dx).cos() - 1.0))
                .sum::<f64>())
    }

    /// Periodic convolution `phi_eps * g` on the grid.
    pub fn mollify(&self, g: &GridFunction) -> Result<GridFunction> {
        let w = self.weights(g.dx())?;
        let n = g.n() as isize;
        // written as g + sum w_j (second difference) so constants pass through bit-exactly
        let out = (0..n)
            .map(|i| {
                let c = g.at(i);
                let mut acc = 0.0;
                for (j, wj) in w.iter().enumerate().rev() {
                    let j = j as isize + 1;
                    acc += wj * ((g.at(i - j) - c) + (g.at(i + j) - c));
                }
                c + acc
            })
            .collect();
        g.with_samples(out)
    }
}

/// `phi_eps * g` for a freshly built mollifier.
pub fn mollify(g: &GridFunction, eps: f64) -> Result<GridFunction> {
    Mollifier::new(eps)?.mollify(g)
}
