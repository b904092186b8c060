//! Time integration of the direct and mollified interface equations.
//!
//! With `eps > 0` the right-hand side is `phi_eps * PV(F)` where `F = phi_eps * f`;
//! with `eps = 0` it is the PV integral of `f` itself. Initial data are lifted
//! to `phi_eps * psi + 2 eps` (strip: `(1 - 4 eps/l) phi_eps * psi + 2 eps`).
//! Positivity is never enforced by clipping: a state whose minimum falls
//! below `eps/2` (or whose maximum rises above `l - eps/2` in the strip) is
//! rejected, which makes the adaptive stepper halve `dt` and, eventually, abort.

use std::time::Instant;

pub use crate::config::{DtPolicy, SolverConfig};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::kernels::{pv_integral_all, Geometry, Interface, QuadratureSpec, RhsForm};
use crate::mollifier::Mollifier;
use crate::norms::{local_norm, tilde_l2, NormKind};
use crate::profile::sample_profile;
use crate::report::{AbortKind, AbortRecord, Record, RunReport, Snapshot};

/// Maximum consecutive step halvings before a run is abandoned.
pub const MAX_HALVINGS: u32 = 8;
/// A step is rejected when `|f_x|_inf` grows past `SPIKE_FACTOR * old + SPIKE_FLOOR`.
pub const SPIKE_FACTOR: f64 = 1.5;
pub const SPIKE_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub eps: f64,
    pub f: GridFunction,
    pub geometry: Geometry,
}

/// `phi_eps * psi + 2 eps`, with the strip's `(1 - 4 eps / l)` contraction.
pub fn lift_initial(psi: &GridFunction, eps: f64, geometry: &Geometry) -> Result<GridFunction> {
    geometry.check_range(psi, 0.0)?;
    let smooth = Mollifier::new(eps)?.mollify(psi)?;
    let scale = match *geometry {
        Geometry::Strip(l) => 1.0 - 4.0 * eps / l,
        _ => 1.0,
    };
    let lifted = smooth.map(|v| scale * v + 2.0 * eps)?;
    geometry.check_range(&lifted, 0.0)?;
    Ok(lifted)
}

/// Right-hand side evaluator for a fixed grid, geometry, form and `eps`.
#[derive(Debug, Clone)]
pub struct Solver {
    pub geometry: Geometry,
    pub form: RhsForm,
    pub eps: f64,
    quad: QuadratureSpec,
    mollifier: Option<Mollifier>,
}

impl Solver {
    pub fn new(
        geometry: Geometry,
        form: RhsForm,
        grid: &GridFunction,
        eps: f64,
        y_max: Option<f64>,
    ) -> Result<Self> {
        geometry.validate()?;
        let mollifier = if eps > 0.0 {
            let m = Mollifier::new(eps)?;
            m.weights(grid.dx())?;
            Some(m)
        } else if eps == 0.0 {
            None
        } else {
            return Err(Error::InvalidParameter(format!("eps must be >= 0, got {eps}")));
        };
        Ok(Self {
            geometry,
            form,
            eps,
            quad: QuadratureSpec::for_grid(grid, y_max)?,
            mollifier,
        })
    }

    pub fn from_config(config: &SolverConfig, grid: &GridFunction) -> Result<Self> {
        Self::new(config.geometry, config.form, grid, config.epsilon(), config.y_max)
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quad
    }

    /// The abort threshold on the state itself (plane runs are exempt).
    pub fn guard(&self, f: &GridFunction) -> Result<()> {
        if self.eps > 0.0 && self.geometry != Geometry::Plane {
            self.geometry.check_range(f, 0.5 * self.eps)
        } else {
            self.geometry.check_range(f, 0.0)
        }
    }

    /// `F = phi_eps * f` (or `f` itself when `eps = 0`).
    pub fn smoothed(&self, f: &GridFunction) -> Result<GridFunction> {
        match &self.mollifier {
            Some(m) => m.mollify(f),
            None => Ok(f.clone()),
        }
    }

    pub fn rhs(&self, f: &GridFunction) -> Result<GridFunction> {
        self.guard(f)?;
        let big_f = self.smoothed(f)?;
        let s = Interface::new(big_f)?;
        let pv = f.with_samples(pv_integral_all(&self.geometry, &s, self.form, &self.quad)?)?;
        self.smoothed(&pv)
    }

    /// `|F_x|_inf`, the slope entering the step-size heuristic.
    pub fn smoothed_slope(&self, f: &GridFunction) -> Result<f64> {
        Ok(self.smoothed(f)?.derivative(1)?.sup_abs())
    }

    /// One classical RK4 step.
    pub fn step(&self, state: &SimState, dt: f64) -> Result<SimState> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        let f = &state.f;
        let axpy = |a: f64, k: &GridFunction| f.zip_with(k, |x, y| x + a * y);
        let k1 = self.rhs(f)?;
        let k2 = self.rhs(&axpy(0.5 * dt, &k1)?)?;
        let k3 = self.rhs(&axpy(0.5 * dt, &k2)?)?;
        let k4 = self.rhs(&axpy(dt, &k3)?)?;
        let samples: Vec<f64> = (0..f.n())
            .map(|i| {
                let s = |k: &GridFunction| k.samples()[i];
                f.samples()[i] + dt / 6.0 * (s(&k1) + 2.0 * (s(&k2) + s(&k3)) + s(&k4))
            })
            .collect();
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("state at x = {} after step", f.x(i))));
        }
        let next = f.with_samples(samples)?;
        self.guard(&next)?;
        Ok(SimState {
            t: state.t + dt,
            eps: state.eps,
            f: next,
            geometry: state.geometry,
        })
    }

    /// RK4 step with retries: on any guard failure, or when `reject` objects to the
    /// proposed state, `dt` is halved, at most [`MAX_HALVINGS`] times.
    /// Returns the new state, the step used and the number of halvings.
    pub fn advance(
        &self,
        state: &SimState,
        dt: f64,
        reject: &dyn Fn(&SimState, &SimState) -> Option<String>,
    ) -> Result<(SimState, f64, u32)> {
        let mut dt = dt;
        let mut last = String::new();
        for halvings in 0..=MAX_HALVINGS {
            match self.step(state, dt) {
                Ok(next) => match reject(state, &next) {
                    None => return Ok((next, dt, halvings)),
                    Some(why) => last = why,
                },
                Err(e @ (Error::RangeViolation { .. } | Error::NonFinite(_))) => last = e.to_string(),
                Err(e) => return Err(e),
            }
            dt *= 0.5;
        }
        Err(Error::DtCollapse {
            t: state.t,
            halvings: MAX_HALVINGS,
            reason: last,
        })
    }
}

/// Rejects steps whose slope jumps, a cheap blow-up signature.
pub fn slope_spike(old: &SimState, new: &SimState) -> Option<String> {
    let slope = |s: &SimState| s.f.derivative(1).map(|d| d.sup_abs()).unwrap_or(f64::INFINITY);
    let (a, b) = (slope(old), slope(new));
    (b > SPIKE_FACTOR * a + SPIKE_FLOOR).then(|| format!("slope spike {a:.3e} -> {b:.3e}"))
}

/// Diagnostic sample of `f` at time `t`; `f_t` is supplied by the caller.
pub fn record(t: f64, f: &GridFunction, f_t: &GridFunction, gamma: f64) -> Result<Record> {
    let d1 = f.derivative(1)?;
    let d2 = f.derivative(2)?;
    let d3 = f.derivative(3)?;
    Ok(Record {
        t,
        tilde_h3_gamma: local_norm(f, NormKind::TildeHkGamma(3, gamma))?,
        c2_gamma_gamma: local_norm(f, NormKind::CkGammaGamma(2, gamma))?,
        sup: f.max(),
        inf: f.min(),
        rhs_sup: f_t.sup_abs(),
        blowup_integrand: local_norm(&d1, NormKind::CkGammaHolder(1, gamma))?.powi(4),
        tl2_d1: tilde_l2(&d1),
        tl2_d2: tilde_l2(&d2),
        tl2_d3: tilde_l2(&d3),
    })
}

fn abort_from(t: f64, e: &Error) -> AbortRecord {
    let kind = match e {
        Error::RangeViolation { .. } => AbortKind::RangeBreach,
        Error::DtCollapse { .. } => AbortKind::DtCollapse,
        Error::NonFinite(_) => AbortKind::NonFinite,
        _ => AbortKind::Other,
    };
    AbortRecord {
        t,
        kind,
        reason: e.to_string(),
    }
}

/// Lifts `psi`, marches to `t_end` and records diagnostics at the cadence.
/// Failures during the march are embedded in the report, not returned.
pub fn run(config: &SolverConfig) -> Result<RunReport> {
    let started = Instant::now();
    config.validate()?;
    let psi = sample_profile(&config.profile, config.half_period, config.n, &config.geometry)?;
    run_from(config, &psi).map(|mut r| {
        r.timings
            .insert(0, ("total".into(), started.elapsed().as_secs_f64()));
        r
    })
}

/// As [`run`] with an explicit initial interface on the config's grid.
pub fn run_from(config: &SolverConfig, psi: &GridFunction) -> Result<RunReport> {
    let eps = config.epsilon();
    if psi.n() != config.n || psi.half_period() != config.half_period {
        return Err(Error::Mismatch(
            "initial data do not live on the configured grid".into(),
        ));
    }
    let t0 = Instant::now();
    let f0 = if eps > 0.0 {
        lift_initial(psi, eps, &config.geometry)?
    } else {
        config.geometry.check_range(psi, 0.0)?;
        psi.clone()
    };
    let solver = Solver::from_config(config, &f0)?;
    let lift_time = t0.elapsed().as_secs_f64();

    let t_march = Instant::now();
    let mut report = RunReport {
        config: config.clone(),
        eps,
        dx: config.dx(),
        dt_max: 0.0,
        steps: 0,
        halvings: 0,
        psi_min: psi.min(),
        psi_max: psi.max(),
        records: Vec::new(),
        snapshots: Vec::new(),
        abort: None,
        timings: Vec::new(),
    };
    let mut state = SimState {
        t: 0.0,
        eps,
        f: f0,
        geometry: config.geometry,
    };
    let cadence = config.cadence();
    let n_records = (config.t_end / cadence - 1e-9).ceil().max(1.0) as usize;
    let record_time = |k: usize| {
        if k >= n_records {
            config.t_end
        } else {
            k as f64 * cadence
        }
    };

    let take_record = |state: &SimState, report: &mut RunReport| -> Result<()> {
        let f_t = solver.rhs(&state.f)?;
        report
            .records
            .push(record(state.t, &state.f, &f_t, config.gamma)?);
        report.snapshots.push(Snapshot {
            t: state.t,
            f: state.f.clone(),
        });
        Ok(())
    };
    if let Err(e) = take_record(&state, &mut report) {
        report.abort = Some(abort_from(0.0, &e));
    }

    let mut next_k = 1usize;
    while report.abort.is_none() && next_k <= n_records {
        let target = record_time(next_k);
        let proposed = match config.dt {
            DtPolicy::Fixed(v) => Ok(v),
            DtPolicy::Adaptive(safety) => solver
                .smoothed_slope(&state.f)
                .map(|s| safety * config.dx() / (1.0 + s)),
        };
        let outcome = proposed.and_then(|dt| {
            let remaining = target - state.t;
            // land exactly on record times; merge a sliver into the current step
            let dt = if dt >= remaining * (1.0 - 1e-9) {
                remaining
            } else {
                dt.min(remaining)
            };
            match config.dt {
                DtPolicy::Fixed(_) => solver.step(&state, dt).map(|s| (s, dt, 0)),
                DtPolicy::Adaptive(_) => solver.advance(&state, dt, &slope_spike),
            }
        });
        match outcome {
            Ok((mut next, dt, halvings)) => {
                report.steps += 1;
                report.halvings += halvings as usize;
                report.dt_max = report.dt_max.max(dt);
                if (next.t - target).abs() <= 1e-12 * target.max(1.0) {
                    next.t = target;
                }
                state = next;
                if state.t == target {
                    if let Err(e) = take_record(&state, &mut report) {
                        report.abort = Some(abort_from(state.t, &e));
                    }
                    next_k += 1;
                }
            }
            Err(e) => report.abort = Some(abort_from(state.t, &e)),
        }
    }
    report.timings.push(("lift".into(), lift_time));
    report
        .timings
        .push(("march".into(), t_march.elapsed().as_secs_f64()));
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct ContinuationReport {
    pub epsilons: Vec<f64>,
    pub reports: Vec<RunReport>,
    /// `tL2(f_{eps_k} - f_{eps_{k+1}})` at `t_end`.
    pub differences: Vec<f64>,
    /// Least-squares slope of `ln d_k` against `ln eps_k`.
    pub slope: Option<f64>,
    /// Exponent assumed by the extrapolation.
    pub assumed_rate: f64,
    /// Extrapolated `eps -> 0` state from the two smallest `eps`.
    pub richardson: Option<GridFunction>,
    /// Some member run aborted; quantities cover the completed prefix only.
    pub partial: bool,
}

/// Rate assumed for the extrapolation across `eps`.
pub const CONTINUATION_RATE: f64 = 0.5;

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Runs the config at each `eps` of its schedule and measures the Cauchy rate.
pub fn epsilon_continuation(config: &SolverConfig) -> Result<ContinuationReport> {
    config.validate()?;
    let epsilons = config.epsilon_schedule();
    if epsilons.contains(&0.0) {
        return Err(Error::Config(
            "continuation needs a schedule of positive eps".into(),
        ));
    }
    let mut reports = Vec::new();
    let mut partial = false;
    for &eps in &epsilons {
        let mut c = config.clone();
        c.epsilons = vec![eps];
        let r = run(&c)?;
        let ok = r.completed();
        reports.push(r);
        if !ok {
            partial = true;
            break;
        }
    }
    let finals: Vec<&GridFunction> = reports
        .iter()
        .filter(|r| r.completed())
        .filter_map(RunReport::final_state)
        .collect();
    let mut differences = Vec::new();
    for w in finals.windows(2) {
        differences.push(tilde_l2(&w[0].sub(w[1])?));
    }
    let slope = if differences.iter().all(|&d| d > 0.0) {
        let xs: Vec<f64> = epsilons[..differences.len()].iter().map(|e| e.ln()).collect();
        let ys: Vec<f64> = differences.iter().map(|d| d.ln()).collect();
        fit_slope(&xs, &ys)
    } else {
        None
    };
    let k = finals.len();
    let richardson = if k >= 2 && epsilons[k - 2] != epsilons[k - 1] {
        let (e1, e2) = (
            epsilons[k - 2].powf(CONTINUATION_RATE),
            epsilons[k - 1].powf(CONTINUATION_RATE),
        );
        Some(finals[k - 1].zip_with(finals[k - 2], |f2, f1| (f2 * e1 - f1 * e2) / (e1 - e2))?)
    } else {
        None
    };
    Ok(ContinuationReport {
        epsilons,
        reports,
        differences,
        slope,
        assumed_rate: CONTINUATION_RATE,
        richardson,
        partial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::ProfileSpec;
    use std::f64::consts::PI;

    fn cfg(geometry: Geometry, profile: ProfileSpec, l: f64, n: usize, t_end: f64, eps: f64) -> SolverConfig {
        SolverConfig {
            geometry,
            half_period: l,
            n,
            gamma: 0.5,
            t_end,
            dt: DtPolicy::default(),
            epsilons: vec![eps],
            y_max: None,
            form: RhsForm::Primary,
            profile,
            output_dir: None,
            cadence: None,
        }
    }

    #[test]
    fn lift_examples() {
        let zero = GridFunction::constant(4.0, 256, 0.0).unwrap();
        let lifted = lift_initial(&zero, 0.1, &Geometry::HalfPlane).unwrap();
        assert!(lifted.samples().iter().all(|&v| v == 0.2));
        let top = GridFunction::constant(4.0, 256, 2.0).unwrap();
        let lifted = lift_initial(&top, 0.1, &Geometry::Strip(2.0)).unwrap();
        for &v in lifted.samples() {
            assert!((v - 1.8).abs() < 1e-14);
        }
        let neg = GridFunction::from_fn(4.0, 256, |x| x.sin()).unwrap();
        assert!(lift_initial(&neg, 0.1, &Geometry::HalfPlane).is_err());
    }

    #[test]
    fn lift_keeps_two_eps_floor() {
        let psi = GridFunction::from_fn(4.0, 256, |x| (x * 1.7).sin().max(0.0)).unwrap();
        let lifted = lift_initial(&psi, 0.1, &Geometry::HalfPlane).unwrap();
        assert!(lifted.min() >= 0.2);
    }

    #[test]
    fn constant_state_does_not_move() {
        let f = GridFunction::constant(4.0, 256, 0.6).unwrap();
        for geom in [Geometry::Plane, Geometry::HalfPlane, Geometry::Strip(1.0)] {
            for eps in [0.0, 0.1] {
                let solver = Solver::new(geom, RhsForm::Primary, &f, eps, None).unwrap();
                let s = SimState {
                    t: 0.0,
                    eps,
                    f: f.clone(),
                    geometry: geom,
                };
                let next = solver.step(&s, 0.01).unwrap();
                assert_eq!(next.f, f);
                assert_eq!(next.t, 0.01);
            }
        }
    }

    #[test]
    fn one_step_follows_linear_propagator() {
        let (a, l, n) = (1e-4, 16.0 * PI, 512);
        let f = GridFunction::from_fn(l, n, |x| a * x.sin()).unwrap();
        let solver = Solver::new(Geometry::Plane, RhsForm::Primary, &f, 0.0, None).unwrap();
        let rate = {
            let r = solver.rhs(&f).unwrap();
            r.mode_amplitude(1.0).0 / a
        };
        let dt = 0.05;
        let s = SimState {
            t: 0.0,
            eps: 0.0,
            f: f.clone(),
            geometry: Geometry::Plane,
        };
        let next = solver.step(&s, dt).unwrap();
        let amp = next.f.mode_amplitude(1.0).0;
        // oracle: exact linear propagator exp(rate * dt) with the discrete rate
        let z = rate * dt;
        let exact = a * z.exp();
        assert!(
            (amp - exact).abs() / a < z.abs().powi(5) / 100.0,
            "{amp} vs {exact}"
        );
        // and the RK4 stability polynomial reproduces the step to roundoff
        let poly = a * (1.0 + z + z * z / 2.0 + z.powi(3) / 6.0 + z.powi(4) / 24.0);
        assert!((amp - poly).abs() / a < 1e-8);
    }

    #[test]
    fn mollified_rhs_is_attenuated_twice() {
        let (a, l, n, eps) = (1e-4, 8.0 * PI, 1024, 0.2);
        let k = 2.0;
        let f = GridFunction::from_fn(l, n, |x| a * (k * x).sin()).unwrap();
        let direct = Solver::new(Geometry::Plane, RhsForm::Primary, &f, 0.0, None).unwrap();
        let moll = Solver::new(Geometry::Plane, RhsForm::Primary, &f, eps, None).unwrap();
        let r0 = direct.rhs(&f).unwrap().mode_amplitude(k).0;
        let r1 = moll.rhs(&f).unwrap().mode_amplitude(k).0;
        let m = Mollifier::new(eps)
            .unwrap()
            .discrete_multiplier(k, f.dx())
            .unwrap();
        assert!(
            (r1 - r0 * m * m).abs() < 1e-3 * r0.abs(),
            "{r1} vs {}",
            r0 * m * m
        );
    }

    #[test]
    fn adaptive_step_halves_on_injected_breach() {
        let f = GridFunction::constant(4.0, 64, 1.0).unwrap();
        let solver = Solver::new(Geometry::HalfPlane, RhsForm::Primary, &f, 0.0, None).unwrap();
        let s = SimState {
            t: 0.0,
            eps: 0.0,
            f,
            geometry: Geometry::HalfPlane,
        };
        let reject = |_: &SimState, n: &SimState| (n.t > 0.01).then(|| "injected".to_string());
        let (next, dt, halvings) = solver.advance(&s, 0.08, &reject).unwrap();
        assert_eq!(halvings, 3);
        assert_eq!(dt, 0.01);
        assert_eq!(next.t, 0.01);
        let never = |_: &SimState, _: &SimState| Some("always".to_string());
        assert!(matches!(
            solver.advance(&s, 0.08, &never),
            Err(Error::DtCollapse { halvings: 8, .. })
        ));
    }

    #[test]
    fn guard_rejects_low_states() {
        let f = GridFunction::constant(4.0, 256, 0.04).unwrap();
        let solver = Solver::new(Geometry::HalfPlane, RhsForm::Primary, &f, 0.1, None).unwrap();
        assert!(matches!(solver.rhs(&f), Err(Error::RangeViolation { .. })));
        let plane = Solver::new(Geometry::Plane, RhsForm::Primary, &f, 0.1, None).unwrap();
        assert!(plane.rhs(&f).is_ok());
    }

    #[test]
    fn flat_run_records_flat_series() {
        let c = cfg(
            Geometry::HalfPlane,
            ProfileSpec::Constant { c: 1.0 },
            4.0,
            64,
            0.2,
            0.25,
        );
        let r = run(&c).unwrap();
        assert!(r.completed());
        assert_eq!(r.records.len(), 11);
        assert_eq!(r.records.last().unwrap().t, 0.2);
        for rec in &r.records {
            assert_eq!(rec.sup, 1.5);
            assert_eq!(rec.inf, 1.5);
            assert_eq!(rec.rhs_sup, 0.0);
            assert_eq!(rec.blowup_integrand, 0.0);
            assert!(rec.tilde_h3_gamma < 1e-12);
        }
    }

    #[test]
    fn plane_translation_equivariance() {
        let bump = ProfileSpec::Bump {
            amplitude: 0.3,
            width: 1.5,
            center: 0.0,
            base: 0.0,
        };
        let shifted = ProfileSpec::Bump {
            amplitude: 0.3,
            width: 1.5,
            center: 0.0,
            base: 2.0,
        };
        let mut a = cfg(Geometry::Plane, bump, 4.0, 256, 0.1, 0.1);
        a.dt = DtPolicy::Fixed(0.01);
        let mut b = a.clone();
        b.profile = shifted;
        let (ra, rb) = (run(&a).unwrap(), run(&b).unwrap());
        let (fa, fb) = (ra.final_state().unwrap(), rb.final_state().unwrap());
        for (x, y) in fa.samples().iter().zip(fb.samples()) {
            assert!((y - x - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn even_data_stays_even() {
        let bump = ProfileSpec::Bump {
            amplitude: 0.5,
            width: 1.5,
            center: 0.0,
            base: 0.2,
        };
        let c = cfg(Geometry::HalfPlane, bump, 4.0, 256, 0.1, 0.1);
        let r = run(&c).unwrap();
        let f = r.final_state().unwrap();
        let n = f.n();
        for i in 1..n / 2 {
            assert!((f.samples()[n / 2 + i] - f.samples()[n / 2 - i]).abs() < 1e-10);
        }
    }

    #[test]
    fn continuation_on_constant_data() {
        let mut c = cfg(
            Geometry::HalfPlane,
            ProfileSpec::Constant { c: 0.5 },
            4.0,
            64,
            0.1,
            0.25,
        );
        c.epsilons = vec![0.4, 0.25, 0.25];
        let rep = epsilon_continuation(&c).unwrap();
        assert!(!rep.partial);
        // states are the constants 0.5 + 2 eps_k
        assert!((rep.differences[0] - 2.0 * 0.15 * 2f64.sqrt()).abs() < 1e-12);
        assert!(rep.differences[0] <= 4.0 * 0.4);
        assert_eq!(rep.differences[1], 0.0);
        assert!(rep.slope.is_none());
    }

    #[test]
    fn slope_fit() {
        let xs = [0.0, 1.0, 2.0];
        assert!((fit_slope(&xs, &[1.0, 3.0, 5.0]).unwrap() - 2.0).abs() < 1e-15);
        assert!(fit_slope(&[1.0], &[1.0]).is_none());
    }
}
