//! Right-hand-side kernels for the three geometries and their principal-value quadrature.
//!
//! For a signed offset `y`, write `f0 = f(x)`, `f1 = f(x - y)` and likewise for `f_x`.
//! The integrands are
//!
//! ```text
//! plane       y (fx0 - fx1) / (y^2 + (f0 - f1)^2)
//! half-plane  plane + y (fx0 + fx1) / (y^2 + (f0 + f1)^2)
//! strip       sum_{+-} (fx0 +- fx1) Theta_l(y, f0 +- f1)
//! alternate   sum_{+-} (y fx0 - (f0 +- f1)) / (y^2 + (f0 +- f1)^2)   (half-plane only)
//! ```
//!
//! Quadrature uses midpoint nodes `y_j = (j + 1/2) dx` and always adds the
//! `+y_j` and `-y_j` contributions together, so `y = 0` is never touched and the
//! near-diagonal `1/y` parts cancel pairwise. With these nodes, `x_i - y_j` and
//! `x_i + y_j` are half-grid points, so the fast path reads precomputed
//! midpoint values instead of interpolating.
//!
//! The alternate form differs from the primary one by an exact derivative,
//! `-d/dy arctan((f0 +- f1)/y)`. Over `(-Y, Y)` that derivative integrates to `pi`
//! (the `+` branch jumping at `y = 0` when `f0 > 0`) minus four arctan boundary
//! terms. The boundary terms are added back here so that both forms discretize
//! the same truncated operator.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Plane,
    HalfPlane,
    /// Horizontal strip of the given height.
    Strip(f64),
}

impl Geometry {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Geometry::Strip(l) if !(l > 0.0 && l.is_finite()) => Err(Error::InvalidParameter(format!(
                "strip height must be positive and finite, got {l}"
            ))),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Geometry::Plane => "plane".into(),
            Geometry::HalfPlane => "half_plane".into(),
            Geometry::Strip(l) => format!("strip({l})"),
        }
    }

    /// Checks `margin <= g` (half-plane, strip) and `g <= l - margin` (strip).
    pub fn check_range(&self, g: &GridFunction, margin: f64) -> Result<()> {
        self.validate()?;
        let (lo, hi) = match *self {
            Geometry::Plane => return Ok(()),
            Geometry::HalfPlane => (margin, f64::INFINITY),
            Geometry::Strip(l) => (margin, l - margin),
        };
        for (i, &v) in g.samples().iter().enumerate() {
            if v < lo || v > hi {
                let reason = if v < lo {
                    format!("below {lo} for {}", self.name())
                } else {
                    format!("above {hi} for {}", self.name())
                };
                return Err(Error::RangeViolation {
                    x: g.x(i),
                    value: v,
                    reason,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsForm {
    #[default]
    Primary,
    Alternate,
}

/// Midpoint nodes `y_j = (j + 1/2) dx`, `j < nodes`, so `Y_max = nodes * dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub dx: f64,
    pub nodes: usize,
}

impl QuadratureSpec {
    /// Nodes for `g`'s grid up to `y_max` (default `L`), which must not exceed `L`.
    pub fn for_grid(g: &GridFunction, y_max: Option<f64>) -> Result<Self> {
        let y_max = y_max.unwrap_or(g.half_period());
        let nodes = (y_max / g.dx()).round() as usize;
        if !(y_max > 0.0) || nodes == 0 {
            return Err(Error::InvalidParameter(format!("y_max = {y_max} too small")));
        }
        if nodes > g.n() / 2 {
            return Err(Error::InvalidParameter(format!(
                "y_max = {y_max} exceeds the half period {}",
                g.half_period()
            )));
        }
        Ok(Self { dx: g.dx(), nodes })
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dx
    }

    pub fn y_max(&self) -> f64 {
        self.nodes as f64 * self.dx
    }
}

/// `Theta_l(Y, .)` with the `y`-dependent parts precomputed.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ThetaRow {
    pref: f64,
    scale: f64,
    kind: ThetaKind,
}

#[derive(Debug, Clone, Copy)]
enum ThetaKind {
    /// `pref sinh Y / (2 sinh^2(Y/2) + 2 sin^2(R/2))`.
    Direct { num: f64, base: f64 },
    /// `sgn(Y) pref (1 - u^2) / (1 - 2u cos R + u^2)`, `u = e^{-|Y|}`; avoids overflow.
    Far { sign: f64, u: f64, top: f64 },
}

const THETA_FAR: f64 = 30.0;

impl ThetaRow {
    pub(crate) fn new(y: f64, l: f64) -> Self {
        let pref = PI / (2.0 * l);
        let scale = PI / l;
        let big = scale * y;
        let kind = if big.abs() > THETA_FAR {
            let u = (-big.abs()).exp();
            ThetaKind::Far {
                sign: big.signum(),
                u,
                top: 1.0 - u * u,
            }
        } else {
            let h = (0.5 * big).sinh();
            ThetaKind::Direct {
                num: pref * big.sinh(),
                base: 2.0 * h * h,
            }
        };
        Self { pref, scale, kind }
    }

    /// Value at `r`; the caller guarantees `(y, r)` is off the singular lattice.
    #[inline]
    pub(crate) fn eval(&self, r: f64) -> f64 {
        let big_r = self.scale * r;
        match self.kind {
            ThetaKind::Direct { num, base } => {
                let s = (0.5 * big_r).sin();
                num / (base + 2.0 * s * s)
            }
            ThetaKind::Far { sign, u, top } => sign * self.pref * top / (1.0 - 2.0 * u * big_r.cos() + u * u),
        }
    }
}

/// Closed-form strip kernel `(pi/2l) sinh(pi y/l) / (cosh(pi y/l) - cos(pi r/l))`.
pub fn theta(y: f64, r: f64, l: f64) -> Result<f64> {
    if !(l > 0.0) || !y.is_finite() || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("theta({y}, {r}, {l})")));
    }
    if y == 0.0 {
        let k = r / (2.0 * l);
        if (k - k.round()).abs() < 1e-12 {
            return Err(Error::SingularLattice { y, r, l });
        }
        return Ok(0.0);
    }
    Ok(ThetaRow::new(y, l).eval(r))
}

/// Truncated image sum `sum_{|n| <= N} y / (y^2 + (r - 2 l n)^2)`, smallest terms first.
pub fn lattice_theta(y: f64, r: f64, l: f64, n_terms: usize) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    let term = |n: f64| {
        let d = r - 2.0 * l * n;
        y / (y * y + d * d)
    };
    let mut sum = 0.0;
    for n in (1..=n_terms).rev() {
        let n = n as f64;
        sum += term(n) + term(-n);
    }
    sum + term(0.0)
}

/// An interface prepared for quadrature: values and slopes at nodes and half nodes.
#[derive(Debug, Clone)]
pub struct Interface {
    pub f: GridFunction,
    pub fx: GridFunction,
    f_mid: Vec<f64>,
    fx_mid: Vec<f64>,
}

impl Interface {
    pub fn new(f: GridFunction) -> Result<Self> {
        let fx = f.derivative(1)?;
        let f_mid = f.midpoints();
        let fx_mid = fx.midpoints();
        Ok(Self { f, fx, f_mid, fx_mid })
    }

    fn value_at(&self, x: f64) -> (f64, f64) {
        (self.f.interpolate(x), self.fx.interpolate(x))
    }
}

/// Integrand at one signed offset: `f0, fx0` at `x`, `f1, fx1` at `x - y`.
#[inline]
fn integrand(
    geom: &Geometry,
    theta: Option<&ThetaRow>,
    form: RhsForm,
    y: f64,
    (f0, fx0): (f64, f64),
    (f1, fx1): (f64, f64),
) -> f64 {
    let y2 = y * y;
    match (geom, form) {
        (Geometry::HalfPlane, RhsForm::Alternate) => {
            let (sm, sp) = (f0 - f1, f0 + f1);
            (y * fx0 - sm) / (y2 + sm * sm) + (y * fx0 - sp) / (y2 + sp * sp)
        }
        (Geometry::Plane, _) => {
            let d = f0 - f1;
            y * (fx0 - fx1) / (y2 + d * d)
        }
        (Geometry::HalfPlane, _) => {
            let (sm, sp) = (f0 - f1, f0 + f1);
            y * (fx0 - fx1) / (y2 + sm * sm) + y * (fx0 + fx1) / (y2 + sp * sp)
        }
        (Geometry::Strip(_), _) => {
            let t = theta.expect("strip rows are prepared by the caller");
            (fx0 - fx1) * t.eval(f0 - f1) + (fx0 + fx1) * t.eval(f0 + f1)
        }
    }
}

fn check_form(geom: &Geometry, form: RhsForm) -> Result<()> {
    if form == RhsForm::Alternate && *geom != Geometry::HalfPlane {
        return Err(Error::InvalidParameter(format!(
            "the alternate form exists only for the half-plane, not {}",
            geom.name()
        )));
    }
    geom.validate()
}

/// Closed-form jump and arctan boundary terms that turn the alternate sum into
/// the same truncated operator as the primary one. `fm = f(x - Y)`, `fp = f(x + Y)`.
fn alternate_offset(f0: f64, fm: f64, fp: f64, y_max: f64) -> f64 {
    let jump = if f0 > 0.0 { PI } else { 0.0 };
    let bnd = ((f0 + fm) / y_max).atan()
        + ((f0 + fp) / y_max).atan()
        + ((f0 - fm) / y_max).atan()
        + ((f0 - fp) / y_max).atan();
    jump - bnd
}

/// Paired integrand `I(x, y) + I(x, -y)` with off-grid reads by interpolation.
pub fn rhs_integrand(geom: &Geometry, s: &Interface, x: f64, y: f64, form: RhsForm) -> Result<f64> {
    check_form(geom, form)?;
    if y == 0.0 {
        return Err(Error::InvalidParameter("paired integrand needs y != 0".into()));
    }
    let here = s.value_at(x);
    let minus = s.value_at(x - y);
    let plus = s.value_at(x + y);
    for v in [here.0, minus.0, plus.0] {
        check_value(geom, x, v)?;
    }
    let (ta, tb) = match geom {
        Geometry::Strip(l) => (Some(ThetaRow::new(y, *l)), Some(ThetaRow::new(-y, *l))),
        _ => (None, None),
    };
    Ok(integrand(geom, ta.as_ref(), form, y, here, minus)
        + integrand(geom, tb.as_ref(), form, -y, here, plus))
}

fn check_value(geom: &Geometry, x: f64, v: f64) -> Result<()> {
    let ok = match *geom {
        Geometry::Plane => true,
        Geometry::HalfPlane => v >= 0.0,
        Geometry::Strip(l) => (0.0..=l).contains(&v),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::RangeViolation {
            x,
            value: v,
            reason: format!("outside {} range", geom.name()),
        })
    }
}

/// PV integral at node `i` through the general (interpolating) path.
pub fn pv_integral(
    geom: &Geometry,
    s: &Interface,
    i: usize,
    form: RhsForm,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let x = s.f.x(i);
    let mut sum = 0.0;
    for j in 0..quad.nodes {
        sum += rhs_integrand(geom, s, x, quad.y(j), form)?;
    }
    let mut value = sum * quad.dx;
    if form == RhsForm::Alternate {
        let y = quad.y_max();
        value += alternate_offset(
            s.f.interpolate(x),
            s.f.interpolate(x - y),
            s.f.interpolate(x + y),
            y,
        );
    }
    if !value.is_finite() {
        return Err(Error::NonFinite(format!("pv integral at x = {x}")));
    }
    Ok(value)
}

fn theta_rows(geom: &Geometry, quad: &QuadratureSpec) -> Vec<(ThetaRow, ThetaRow)> {
    match *geom {
        Geometry::Strip(l) => (0..quad.nodes)
            .map(|j| (ThetaRow::new(quad.y(j), l), ThetaRow::new(-quad.y(j), l)))
            .collect(),
        _ => Vec::new(),
    }
}

/// PV integral at every node. Work is `O(n * nodes)`, fanned out one task per node;
/// each node's sum runs in a fixed order, so results do not depend on the thread count.
pub fn pv_integral_all(
    geom: &Geometry,
    s: &Interface,
    form: RhsForm,
    quad: &QuadratureSpec,
) -> Result<Vec<f64>> {
    check_form(geom, form)?;
    let n = s.f.n();
    if quad.nodes > n / 2 || quad.dx != s.f.dx() {
        return Err(Error::Mismatch(
            "quadrature does not match the interface grid".into(),
        ));
    }
    geom.check_range(&s.f, 0.0)?;
    // half-node values can undershoot the nodal range slightly near contact
    for (k, &v) in s.f_mid.iter().enumerate() {
        check_value(geom, s.f.x(k) + 0.5 * s.f.dx(), v)?;
    }
    let rows = theta_rows(geom, quad);
    let f = s.f.samples();
    let fx = s.fx.samples();
    let wrap = |k: isize| k.rem_euclid(n as isize) as usize;
    let y_max = quad.y_max();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let here = (f[i], fx[i]);
            let mut sum = 0.0;
            for j in 0..quad.nodes {
                let y = quad.y(j);
                let lo = wrap(i as isize - j as isize - 1);
                let hi = wrap((i + j) as isize);
                let (ta, tb) = match rows.get(j) {
                    Some((a, b)) => (Some(a), Some(b)),
                    None => (None, None),
                };
                sum += integrand(geom, ta, form, y, here, (s.f_mid[lo], s.fx_mid[lo]))
                    + integrand(geom, tb, form, -y, here, (s.f_mid[hi], s.fx_mid[hi]));
            }
            let mut value = sum * quad.dx;
            if form == RhsForm::Alternate {
                let m = quad.nodes as isize;
                value += alternate_offset(f[i], f[wrap(i as isize - m)], f[wrap(i as isize + m)], y_max);
            }
            if value.is_finite() {
                Ok(value)
            } else {
                Err(Error::NonFinite(format!(
                    "pv integral at node {i} (x = {})",
                    s.f.x(i)
                )))
            }
        })
        .collect()
}

/// Interface velocity and the tangential multiple `M(x) = PV int sum_{+-} y / D_{+-}`,
/// with `u2 + f_x(x) M` equal to the primary half-plane right-hand side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Velocity {
    pub u1: f64,
    pub u2: f64,
    pub tangential: f64,
}

/// Half-plane velocity at node `i`, paired midpoint quadrature as in [`pv_integral`].
pub fn velocity_on_interface(s: &Interface, i: usize, quad: &QuadratureSpec) -> Result<Velocity> {
    Geometry::HalfPlane.check_range(&s.f, 0.0)?;
    let x = s.f.x(i);
    let f0 = s.f.samples()[i];
    let (mut u1, mut u2, mut m) = (0.0, 0.0, 0.0);
    for j in 0..quad.nodes {
        let y0 = quad.y(j);
        for y in [y0, -y0] {
            let (f1, fx1) = s.value_at(x - y);
            let (sp, sm) = (f0 + f1, f0 - f1);
            let (dp, dm) = (y * y + sp * sp, y * y + sm * sm);
            u1 += -sp * fx1 / dp + sm * fx1 / dm;
            u2 += y * fx1 / dp - y * fx1 / dm;
            m += y / dp + y / dm;
        }
    }
    let v = Velocity {
        u1: u1 * quad.dx,
        u2: u2 * quad.dx,
        tangential: m * quad.dx,
    };
    if !(v.u1.is_finite() && v.u2.is_finite() && v.tangential.is_finite()) {
        return Err(Error::NonFinite(format!("velocity at x = {x}")));
    }
    Ok(v)
}
