//! Solver configuration: JSON schema, defaults, validation and a canonical hash.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::kernels::{Geometry, RhsForm};
use crate::profile::{sample_profile, ProfileSpec};

/// Default adaptive safety factor. Explicit RK4 stays stable on the undamped
/// `pi |k|` symbol up to `k = pi/dx` when `dt <= 2.78 dx / pi^2`, i.e. safety ~0.28.
pub const DEFAULT_SAFETY: f64 = 0.25;
pub const DEFAULT_GAMMA: f64 = 0.5;
pub const DEFAULT_EPSILON: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DtPolicy {
    Fixed(f64),
    /// `dt = safety * dx / (1 + |F_x|_inf)`, halved on guard failures.
    Adaptive(f64),
}

impl Default for DtPolicy {
    fn default() -> Self {
        DtPolicy::Adaptive(DEFAULT_SAFETY)
    }
}

fn default_gamma() -> f64 {
    DEFAULT_GAMMA
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub geometry: Geometry,
    /// Half period `L` of the computational torus `[-L, L)`.
    #[serde(rename = "L", alias = "half_period")]
    pub half_period: f64,
    pub n: usize,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    pub t_end: f64,
    #[serde(default)]
    pub dt: DtPolicy,
    /// Regularization schedule; `run` uses the first entry, `0` selects the direct equation.
    #[serde(default)]
    pub epsilons: Vec<f64>,
    /// Quadrature cut-off, defaults to `L`.
    #[serde(default)]
    pub y_max: Option<f64>,
    #[serde(default)]
    pub form: RhsForm,
    pub profile: ProfileSpec,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Time between recorded samples; defaults to `t_end / 10`.
    #[serde(default)]
    pub cadence: Option<f64>,
}

impl SolverConfig {
    pub fn dx(&self) -> f64 {
        2.0 * self.half_period / self.n as f64
    }

    /// The schedule, or `[max(0.05, 2 dx)]` when none was given.
    pub fn epsilon_schedule(&self) -> Vec<f64> {
        if self.epsilons.is_empty() {
            vec![DEFAULT_EPSILON.max(2.0 * self.dx())]
        } else {
            self.epsilons.clone()
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon_schedule()[0]
    }

    pub fn cadence(&self) -> f64 {
        self.cadence.unwrap_or(self.t_end / 10.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        self.geometry
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        if !(self.half_period > 0.0 && self.half_period.is_finite()) {
            return bad(format!("L must be positive, got {}", self.half_period));
        }
        if self.n < crate::grid::MIN_SAMPLES {
            return bad(format!(
                "n must be at least {}, got {}",
                crate::grid::MIN_SAMPLES,
                self.n
            ));
        }
        if self.dx() > 0.25 {
            return bad(format!(
                "dx = 2L/n = {} exceeds 0.25; the local norms need finer grids",
                self.dx()
            ));
        }
        if !(self.gamma > 0.0 && self.gamma <= 0.5) {
            return bad(format!(
                "gamma = {} must lie in (0, 1/2]; larger exponents reduce to this range",
                self.gamma
            ));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        match self.dt {
            DtPolicy::Fixed(v) if !(v > 0.0 && v.is_finite()) => {
                return bad(format!("fixed dt must be positive, got {v}"))
            }
            DtPolicy::Adaptive(s) if !(s > 0.0 && s <= 1.0) => {
                return bad(format!("adaptive safety must lie in (0, 1], got {s}"))
            }
            _ => {}
        }
        for &eps in &self.epsilons {
            if eps != 0.0 && !(eps >= 2.0 * self.dx() && eps <= 0.5) {
                return bad(format!(
                    "epsilon {eps} must be 0 or lie in [2 dx, 1/2] = [{}, 0.5]",
                    2.0 * self.dx()
                ));
            }
        }
        if let Some(y) = self.y_max {
            if !(y > 0.0 && y <= self.half_period) {
                return bad(format!("y_max = {y} must lie in (0, L]"));
            }
        }
        if self.form == RhsForm::Alternate && self.geometry != Geometry::HalfPlane {
            return bad("form \"alternate\" is defined for the half-plane only".into());
        }
        if let Some(c) = self.cadence {
            if !(c > 0.0) {
                return bad(format!("cadence must be positive, got {c}"));
            }
        }
        sample_profile(&self.profile, self.half_period, self.n, &self.geometry)
            .map_err(|e| Error::Config(format!("profile: {e}")))?;
        Ok(())
    }

    /// SHA-256 of the canonical JSON form (object keys sorted), hex encoded.
    pub fn canonical_hash(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let text = serde_json::to_string(&value).expect("value serializes");
        hex_digest(text.as_bytes())
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Parses and validates a config document, naming the offending field on schema errors.
pub fn parse_config_str(text: &str) -> Result<SolverConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: SolverConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        Error::Config(format!(
            "at `{}` (line {}, column {}): {}",
            e.path(),
            inner.line(),
            inner.column(),
            inner
        ))
    })?;
    config.validate()?;
    Ok(config)
}

pub fn parse_config(path: &Path) -> Result<SolverConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str =
        r#"{"geometry":"plane","L":16,"n":256,"t_end":0.1,"profile":{"sine":{"A":1e-4,"k":1}}}"#;

    #[test]
    fn minimal_config_fills_defaults() {
        let c = parse_config_str(MINIMAL).unwrap();
        assert_eq!(c.gamma, 0.5);
        assert_eq!(c.form, RhsForm::Primary);
        assert_eq!(c.y_max, None);
        assert_eq!(c.dt, DtPolicy::Adaptive(DEFAULT_SAFETY));
        assert_eq!(c.epsilon(), 0.05f64.max(2.0 * c.dx()));
    }

    #[test]
    fn gamma_out_of_range() {
        let text = r#"{"geometry":"half_plane","L":8,"n":128,"t_end":0.1,"gamma":0.9,"profile":{"constant":{"c":1}}}"#;
        let err = parse_config_str(text).unwrap_err().to_string();
        assert!(err.contains("gamma"), "{err}");
    }

    #[test]
    fn strip_profile_above_top() {
        let text = r#"{"geometry":{"strip":1.0},"L":8,"n":128,"t_end":0.1,"profile":{"constant":{"c":1.5}}}"#;
        let err = parse_config_str(text).unwrap_err().to_string();
        assert!(err.contains("above"), "{err}");
    }

    #[test]
    fn schema_errors_name_the_field() {
        let text = r#"{"geometry":"plane","L":"wide","n":128,"t_end":0.1,"profile":{"constant":{"c":1}}}"#;
        let err = parse_config_str(text).unwrap_err().to_string();
        assert!(err.contains("`L`") && err.contains("line 1"), "{err}");
        let text = r#"{"geometry":"cube","L":8,"n":128,"t_end":0.1,"profile":{"constant":{"c":1}}}"#;
        assert!(parse_config_str(text)
            .unwrap_err()
            .to_string()
            .contains("geometry"));
    }

    #[test]
    fn epsilon_bounds() {
        let base = r#"{"geometry":"half_plane","L":8,"n":256,"t_end":0.1,"profile":{"constant":{"c":1}},"epsilons":[EPS]}"#;
        assert!(parse_config_str(&base.replace("EPS", "0")).is_ok());
        assert!(parse_config_str(&base.replace("EPS", "0.2")).is_ok());
        assert!(parse_config_str(&base.replace("EPS", "0.1")).is_err());
        assert!(parse_config_str(&base.replace("EPS", "0.7")).is_err());
    }

    #[test]
    fn hash_ignores_key_order_and_tracks_values() {
        let a = r#"{"geometry":"half_plane","L":8,"n":128,"t_end":0.1,"profile":{"constant":{"c":1}}}"#;
        let b = r#"{"profile":{"constant":{"c":1}},"t_end":0.1,"n":128,"L":8,"geometry":"half_plane"}"#;
        let c = r#"{"geometry":"half_plane","L":8,"n":128,"t_end":0.2,"profile":{"constant":{"c":1}}}"#;
        let (ha, hb, hc) = (
            parse_config_str(a).unwrap().canonical_hash(),
            parse_config_str(b).unwrap().canonical_hash(),
            parse_config_str(c).unwrap().canonical_hash(),
        );
        assert_eq!(ha, hb);
        assert_ne!(ha, hc);
        assert_eq!(ha.len(), 64);
    }
}
