//! Closed-form initial interfaces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::kernels::Geometry;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Constant {
        #[serde(alias = "value")]
        c: f64,
    },
    /// `base + A exp(1 - 1/(1 - s^2))` for `|s| < 1`, `s = (x - x_c)/w`; peak height `A`.
    Bump {
        #[serde(alias = "A")]
        amplitude: f64,
        #[serde(alias = "w")]
        width: f64,
        #[serde(alias = "x_c", default)]
        center: f64,
        #[serde(default)]
        base: f64,
    },
    /// `base + A sin(k x)`. Unless `k L / pi` is an integer the periodic
    /// extension has a small kink at `x = +-L`; such profiles are accepted.
    Sine {
        #[serde(alias = "A")]
        amplitude: f64,
        k: f64,
        #[serde(default)]
        base: f64,
    },
    /// Height `h` away from the gap, exactly 0 on `[a, b]`, joined by quintic
    /// smoothstep ramps of length `smoothing` (so the profile is C^2).
    Invasion {
        #[serde(alias = "h", alias = "heights")]
        height: f64,
        gap: [f64; 2],
        smoothing: f64,
    },
}

/// `6t^5 - 15t^4 + 10t^3`: zero first and second derivatives at both ends.
fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

impl ProfileSpec {
    fn check(&self, half_period: f64) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match *self {
            ProfileSpec::Constant { c } if !c.is_finite() => bad("constant must be finite".into()),
            ProfileSpec::Bump { width, .. } if !(width > 0.0) => {
                bad(format!("bump width must be positive, got {width}"))
            }
            ProfileSpec::Bump { width, center, .. } if center.abs() + width > half_period => bad(format!(
                "bump support [{}, {}] leaves the domain",
                center - width,
                center + width
            )),
            ProfileSpec::Sine { k, .. } if !k.is_finite() => bad(format!("sine wavenumber {k}")),
            ProfileSpec::Invasion {
                height,
                gap: [a, b],
                smoothing,
            } => {
                if !(b >= a && smoothing > 0.0 && height >= 0.0) {
                    bad("invasion needs gap a <= b, smoothing > 0 and height >= 0".into())
                } else if a - smoothing <= -half_period || b + smoothing >= half_period {
                    bad("invasion ramps leave the domain".into())
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            ProfileSpec::Constant { c } => c,
            ProfileSpec::Bump {
                amplitude,
                width,
                center,
                base,
            } => {
                let s = (x - center) / width;
                if s.abs() < 1.0 {
                    base + amplitude * (1.0 - 1.0 / (1.0 - s * s)).exp()
                } else {
                    base
                }
            }
            ProfileSpec::Sine { amplitude, k, base } => base + amplitude * (k * x).sin(),
            ProfileSpec::Invasion {
                height,
                gap: [a, b],
                smoothing,
            } => {
                if x >= a && x <= b {
                    0.0
                } else if x > b {
                    height * smoothstep((x - b) / smoothing)
                } else {
                    height * smoothstep((a - x) / smoothing)
                }
            }
        }
    }
}

/// Samples `spec` on `n` nodes of `[-L, L)` and checks the geometry's admissible range.
pub fn sample_profile(
    spec: &ProfileSpec,
    half_period: f64,
    n: usize,
    geometry: &Geometry,
) -> Result<GridFunction> {
    spec.check(half_period)?;
    let g = GridFunction::from_fn(half_period, n, |x| spec.eval(x))?;
    geometry.check_range(&g, 0.0)?;
    Ok(g)
}
