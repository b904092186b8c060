//! Post-processing checks of computed trajectories against the qualitative
//! theorems: extrema monotonicity, the contact surrogate, the blow-up integral,
//! the existence-time bracket, the a priori growth rate and two-run stability.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::Geometry;
use crate::norms::{local_norm, NormKind};
use crate::report::{Record, RunReport, Snapshot};
use crate::tolerances::{extrema_tolerance, CONTACT_BAND_K};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub pass: bool,
    pub tolerance: f64,
    /// Largest excess over the tolerance-free bound (0 when there is none).
    pub worst_violation: f64,
    /// Record indices where the check failed.
    pub violations: Vec<usize>,
    pub fitted_constants: BTreeMap<String, f64>,
}

impl Verdict {
    fn new(check: &str, tolerance: f64) -> Self {
        Self {
            check: check.into(),
            pass: true,
            tolerance,
            worst_violation: 0.0,
            violations: Vec::new(),
            fitted_constants: BTreeMap::new(),
        }
    }

    fn flag(&mut self, index: usize, excess: f64) {
        self.worst_violation = self.worst_violation.max(excess);
        if excess > self.tolerance {
            self.pass = false;
            self.violations.push(index);
        }
    }
}

/// Monotonicity of `sup f` (non-increasing) and `inf f` (non-decreasing), with
/// `tau` defaulting to [`extrema_tolerance`]. When the initial data touch the
/// bottom (or the strip top) and `eps > 0`, the lifted extremum must also stay
/// in its band `[eps/2, K eps]` (resp. `[l - K eps, l - eps/2]`).
pub fn extrema_check(report: &RunReport, tau: Option<f64>) -> Vec<Verdict> {
    let tau = tau.unwrap_or_else(|| extrema_tolerance(report.dt_max, report.dx));
    let rec = &report.records;
    let mut sup = Verdict::new("sup_nonincreasing", tau);
    let mut inf = Verdict::new("inf_nondecreasing", tau);
    for k in 1..rec.len() {
        sup.flag(k, (rec[k].sup - rec[k - 1].sup).max(0.0));
        inf.flag(k, (rec[k - 1].inf - rec[k].inf).max(0.0));
    }
    let mut out = vec![sup, inf];
    let eps = report.eps;
    let geometry = report.config.geometry;
    if eps > 0.0 && geometry != Geometry::Plane && report.psi_min == 0.0 {
        out.push(band_verdict(
            "bottom_contact_band",
            rec,
            |r| r.inf,
            0.5 * eps,
            CONTACT_BAND_K * eps,
        ));
    }
    if let Geometry::Strip(l) = geometry {
        if eps > 0.0 && report.psi_max == l {
            out.push(band_verdict(
                "top_contact_band",
                rec,
                |r| r.sup,
                l - CONTACT_BAND_K * eps,
                l - 0.5 * eps,
            ));
        }
    }
    out
}

fn band_verdict(check: &str, rec: &[Record], pick: impl Fn(&Record) -> f64, lo: f64, hi: f64) -> Verdict {
    let mut v = Verdict::new(check, 0.0);
    v.fitted_constants.insert("band_lo".into(), lo);
    v.fitted_constants.insert("band_hi".into(), hi);
    for (k, r) in rec.iter().enumerate() {
        let x = pick(r);
        v.flag(k, (lo - x).max(x - hi).max(0.0));
    }
    v
}

/// Cumulative trapezoid integral of `values` over `times`, starting at 0.
pub fn cumulative_trapezoid(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    for k in 0..times.len() {
        if k > 0 {
            acc += 0.5 * (values[k] + values[k - 1]) * (times[k] - times[k - 1]);
        }
        out.push(acc);
    }
    out
}

/// Running value of `int_0^t ||f_x||^4_{C^{1,gamma'}} ds` at each record.
/// Uses the recorded integrand when `gamma'` equals the run's `gamma`, and
/// otherwise re-evaluates it on the stored snapshots.
pub fn blowup_series(report: &RunReport, gamma_prime: f64) -> Result<Vec<f64>> {
    if !(gamma_prime > 0.0 && gamma_prime <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma' = {gamma_prime} outside (0, 1]"
        )));
    }
    let times: Vec<f64> = report.records.iter().map(|r| r.t).collect();
    let values: Vec<f64> = if gamma_prime == report.config.gamma {
        report.records.iter().map(|r| r.blowup_integrand).collect()
    } else {
        report
            .snapshots
            .iter()
            .map(|s| Ok(local_norm(&s.f.derivative(1)?, NormKind::CkGammaHolder(1, gamma_prime))?.powi(4)))
            .collect::<Result<_>>()?
    };
    Ok(cumulative_trapezoid(&times, &values))
}

pub fn blowup_integral(report: &RunReport, gamma_prime: f64) -> Result<f64> {
    Ok(blowup_series(report, gamma_prime)?.last().copied().unwrap_or(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeBound {
    /// `||psi||_{tH^3_gamma}`.
    pub norm: f64,
    /// `min{norm^-4, 1 + |ln norm|}`; `+inf` for constant data.
    pub bound: f64,
    pub note: Option<String>,
}

/// `min{N^-4, 1 + |ln N|}`, the existence-time bracket up to its unknown constant.
pub fn time_bracket(norm: f64) -> f64 {
    if norm == 0.0 {
        f64::INFINITY
    } else {
        norm.powi(-4).min(1.0 + norm.ln().abs())
    }
}

pub fn t_psi_bound(psi: &crate::grid::GridFunction, gamma: f64) -> Result<TimeBound> {
    let norm = local_norm(psi, NormKind::TildeHkGamma(3, gamma))?;
    let note =
        (norm == 0.0).then(|| "constant data: no finite lower bound on the existence time".to_string());
    Ok(TimeBound {
        norm,
        bound: time_bracket(norm),
        note,
    })
}

/// Fits the smallest `C` with `d/dt ||f'''||^2 <= C (1 + ||f||^4_{C^{2,g}_g}) sum_j ||f^(j)||^2`
/// over the recorded series (difference quotients, right-hand side averaged over
/// each interval). Growth where the right-hand side vanishes cannot be absorbed
/// by any `C` and is reported as the residual.
pub fn apriori_rate_check(records: &[Record]) -> Verdict {
    let mut v = Verdict::new("apriori_rate", 0.0);
    let mut c_hat: f64 = 0.0;
    let mut unexplained: f64 = 0.0;
    let rhs = |r: &Record| {
        (1.0 + r.c2_gamma_gamma.powi(4)) * (r.tl2_d1.powi(2) + r.tl2_d2.powi(2) + r.tl2_d3.powi(2))
    };
    for k in 1..records.len() {
        let (a, b) = (&records[k - 1], &records[k]);
        let dt = b.t - a.t;
        if !(dt > 0.0) {
            continue;
        }
        let growth = (b.tl2_d3.powi(2) - a.tl2_d3.powi(2)) / dt;
        let bound = 0.5 * (rhs(a) + rhs(b));
        if !growth.is_finite() || !bound.is_finite() {
            v.flag(k, f64::INFINITY);
            continue;
        }
        if growth <= 0.0 {
            continue;
        }
        if bound > 0.0 {
            c_hat = c_hat.max(growth / bound);
        } else {
            unexplained = unexplained.max(growth);
            v.flag(k, growth);
        }
    }
    v.fitted_constants.insert("c_hat".into(), c_hat);
    v.fitted_constants.insert("residual".into(), unexplained);
    v
}

/// Borrowed view of a trajectory: records and matching snapshots.
#[derive(Debug, Clone, Copy)]
pub struct Trajectory<'a> {
    pub records: &'a [Record],
    pub snapshots: &'a [Snapshot],
}

impl<'a> From<&'a RunReport> for Trajectory<'a> {
    fn from(r: &'a RunReport) -> Self {
        Self {
            records: &r.records,
            snapshots: &r.snapshots,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityCertificate {
    pub mu: f64,
    pub times: Vec<f64>,
    /// `tL2^mu(f_A - f_B)` at each common time.
    pub distance: Vec<f64>,
    /// `int_0^t (1 + ||f_A||^2 + ||f_B||^2)_{C^{2,g}_g} ds`.
    pub integral: Vec<f64>,
    /// Least-squares rate of `ln(D/D0)` against the integral.
    pub k: f64,
    /// Smallest prefactor with `D <= C D0 exp(K I)` at every sample.
    pub prefactor: f64,
    /// Local rates on the second half stay within the first half's envelope.
    pub no_super_exponential: bool,
    pub verdict: Verdict,
}

/// Compares two trajectories sampled at the same times on the same grid.
pub fn stability_compare(a: Trajectory<'_>, b: Trajectory<'_>, mu: f64) -> Result<StabilityCertificate> {
    if a.snapshots.len() != b.snapshots.len()
        || a.records.len() != a.snapshots.len()
        || b.records.len() != b.snapshots.len()
    {
        return Err(Error::Mismatch(
            "trajectories have different sample counts".into(),
        ));
    }
    if a.snapshots.is_empty() {
        return Err(Error::Mismatch("empty trajectories".into()));
    }
    let mut times = Vec::new();
    let mut distance = Vec::new();
    let mut density = Vec::new();
    for k in 0..a.snapshots.len() {
        let (sa, sb) = (&a.snapshots[k], &b.snapshots[k]);
        if !sa.f.same_grid(&sb.f) {
            return Err(Error::Mismatch("trajectories live on different grids".into()));
        }
        if (sa.t - sb.t).abs() > 1e-12 * sa.t.abs().max(1.0) {
            return Err(Error::Mismatch(format!(
                "sample times differ: {} vs {}",
                sa.t, sb.t
            )));
        }
        let diff = sa.f.zip_with(&sb.f, |x, y| (x - y).abs())?;
        times.push(sa.t);
        distance.push(local_norm(&diff, NormKind::TildeL2Mu(mu))?);
        density.push(1.0 + a.records[k].c2_gamma_gamma.powi(2) + b.records[k].c2_gamma_gamma.powi(2));
    }
    let integral = cumulative_trapezoid(&times, &density);
    let d0 = distance[0];
    let mut verdict = Verdict::new("stability_envelope", std::f64::consts::LN_2);
    if d0 == 0.0 {
        let zero = distance.iter().all(|&d| d == 0.0);
        verdict.pass = zero;
        verdict.fitted_constants.insert("k".into(), 0.0);
        return Ok(StabilityCertificate {
            mu,
            times,
            distance,
            integral,
            k: 0.0,
            prefactor: 1.0,
            no_super_exponential: zero,
            verdict,
        });
    }
    let logs: Vec<f64> = distance.iter().map(|d| (d / d0).ln()).collect();
    let k = slope_through_origin(&integral, &logs);
    let prefactor = logs
        .iter()
        .zip(&integral)
        .map(|(l, i)| l - k * i)
        .fold(0.0, f64::max)
        .exp();
    // local rates d ln D / d I
    let rates: Vec<f64> = (1..logs.len())
        .map(|j| (logs[j] - logs[j - 1]) / (integral[j] - integral[j - 1]))
        .collect();
    let half = rates.len().div_ceil(2);
    let early = rates[..half].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let allowance = early + early.abs().max(1.0);
    let mut no_super = true;
    for (j, &r) in rates.iter().enumerate().skip(half) {
        if !(r <= allowance) {
            no_super = false;
            verdict.flag(j + 1, f64::INFINITY);
        }
    }
    if logs.iter().any(|l| !l.is_finite()) {
        no_super = false;
        verdict.pass = false;
    }
    verdict.fitted_constants.insert("k".into(), k);
    verdict.fitted_constants.insert("prefactor".into(), prefactor);
    verdict.fitted_constants.insert("early_rate_max".into(), early);
    Ok(StabilityCertificate {
        mu,
        times,
        distance,
        integral,
        k,
        prefactor,
        no_super_exponential: no_super,
        verdict,
    })
}

fn slope_through_origin(xs: &[f64], ys: &[f64]) -> f64 {
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    if sxx > 0.0 {
        sxy / sxx
    } else {
        0.0
    }
}
