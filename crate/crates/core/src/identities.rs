//! Standalone checks of the closed-form cancellations, the pointwise bounds for
//! nonnegative profiles, the arctan primitive behind the alternate form, and the
//! strip kernel's image sum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::kernels::{lattice_theta, pv_integral_all, theta, Geometry, Interface, QuadratureSpec, RhsForm};
use crate::tolerances::{
    ARCTAN_RESIDUAL, IDENTITY_ANALYTIC, IDENTITY_FD, RATIO_SLACK, THETA_ERROR, THETA_EXPONENT,
};

pub const DEFAULT_SEED: u64 = 20_240_611;
pub const DEFAULT_DRAWS: usize = 1000;
pub const DEFAULT_NODES: usize = 64;
pub const THETA_SCHEDULE: [usize; 5] = [625, 1250, 2500, 5000, 10_000];

/// Taylor data `a = f(0)`, `b = f'(0)`, `c = f''(0)` of a nonnegative profile with
/// `|f''| <= f2_sup`, and a logarithmic `y`-grid on `[1e-3 sqrt(a), sqrt(a)]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbcSample {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub f2_sup: f64,
    pub ys: Vec<f64>,
}

impl AbcSample {
    pub fn new(a: f64, b: f64, c: f64, f2_sup: f64, nodes: usize) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::InvalidParameter(format!("a = {a} outside (0, 1]")));
        }
        if !(f2_sup >= c.abs()) || !f2_sup.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "|c| = {} exceeds sup|f''| = {f2_sup}",
                c.abs()
            )));
        }
        let b_max = 2.0 * f2_sup.sqrt() * a.sqrt();
        if !(b.abs() <= b_max) {
            return Err(Error::InvalidParameter(format!(
                "|b| = {} violates |f'| <= 2 sup|f''|^(1/2) sqrt(f) = {b_max}",
                b.abs()
            )));
        }
        if nodes < 2 {
            return Err(Error::InvalidParameter("need at least two y nodes".into()));
        }
        let (lo, hi) = ((1e-3 * a.sqrt()).ln(), a.sqrt().ln());
        let ys = (0..nodes)
            .map(|j| (lo + (hi - lo) * j as f64 / (nodes - 1) as f64).exp())
            .collect();
        Ok(Self { a, b, c, f2_sup, ys })
    }

    /// An admissible draw: `a` log-uniform on `[1e-3, 1]`, `sup|f''|` on `[0.1, 4]`.
    pub fn random(rng: &mut impl Rng, nodes: usize) -> Self {
        let a = 10f64.powf(rng.gen_range(-3.0..=0.0));
        let f2_sup: f64 = rng.gen_range(0.1..4.0);
        let c = rng.gen_range(-f2_sup..=f2_sup);
        let b_max = 2.0 * f2_sup.sqrt() * a.sqrt();
        let b = rng.gen_range(-b_max..=b_max);
        Self::new(a, b, c, f2_sup, nodes).expect("draw is admissible by construction")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cancellation {
    S4,
    PQ,
    UV,
}

impl Cancellation {
    pub const ALL: [Cancellation; 3] = [Cancellation::S4, Cancellation::PQ, Cancellation::UV];

    pub fn name(self) -> &'static str {
        match self {
            Cancellation::S4 => "S4",
            Cancellation::PQ => "PQ",
            Cancellation::UV => "UV",
        }
    }
}

/// `coef * y^m / (y^2 + 4a^2)^p`.
#[derive(Debug, Clone, Copy)]
struct Frac {
    coef: f64,
    m: i32,
    p: i32,
}

impl Frac {
    fn new(coef: f64, m: i32, p: i32) -> Self {
        Self { coef, m, p }
    }

    fn value(&self, y: f64, a: f64) -> f64 {
        self.coef * y.powi(self.m) / (y * y + 4.0 * a * a).powi(self.p)
    }

    /// Both pieces of the quotient-rule derivative, kept apart for the residual scale.
    fn deriv_parts(&self, y: f64, a: f64) -> (f64, f64) {
        let d = y * y + 4.0 * a * a;
        let (m, p) = (self.m as f64, self.p as f64);
        (
            self.coef * m * y.powi(self.m - 1) / d.powi(self.p),
            -self.coef * 2.0 * p * y.powi(self.m + 1) / d.powi(self.p + 1),
        )
    }

    fn deriv_fd(&self, y: f64, a: f64) -> f64 {
        let h = 1e-3 * y;
        let f = |s: f64| self.value(y + s * h, a);
        (8.0 * (f(1.0) - f(-1.0)) - (f(2.0) - f(-2.0))) / (12.0 * h)
    }
}

/// Left-hand terms (summed) and the signed antiderivatives on the right.
fn cancellation_terms(which: Cancellation, s: &AbcSample) -> (Vec<Frac>, Vec<Frac>) {
    let (a, b, c) = (s.a, s.b, s.c);
    match which {
        // y S4 = -d/dy [8 b c^2 y^3 / D^2]
        Cancellation::S4 => (
            vec![
                Frac::new(8.0 * b * c * c, 2, 2),
                Frac::new(-128.0 * a * a * b * c * c, 2, 3),
            ],
            vec![Frac::new(-8.0 * b * c * c, 3, 2)],
        ),
        // 3y P4 - 4y^3 Q4 = 16 d/dy [8abc(2ac-b^2) y^3/D^3 - 3bc^2 y^3/D^2 + 4bc^2 y^5/D^3]
        Cancellation::PQ => {
            let lhs = vec![
                Frac::new(3.0 * 16.0 * b * c * c, 2, 2),
                Frac::new(-3.0 * 128.0 * a * b.powi(3) * c, 2, 3),
                Frac::new(-4.0 * 16.0 * b * c * c, 4, 3),
                Frac::new(4.0 * 192.0 * a * b.powi(3) * c, 4, 4),
            ];
            let k = 2.0 * a * c - b * b;
            let rhs = vec![
                Frac::new(16.0 * 8.0 * a * b * c * k, 3, 3),
                Frac::new(-16.0 * 3.0 * b * c * c, 3, 2),
                Frac::new(16.0 * 4.0 * b * c * c, 5, 3),
            ];
            (lhs, rhs)
        }
        // 2y^3 V4 - y U4 = 32 d/dy [-2b^3(4ac+b^2) y^5/(3D^4) + b^3(4ac+b^2) y^3/(3D^3)
        //                           - 16a^2 b^3 (2ac-b^2) y^3/(3D^4)]
        Cancellation::UV => {
            let (b3, b5) = (b.powi(3), b.powi(5));
            let lhs = vec![
                Frac::new(2.0 * 128.0 * a * b3 * c, 4, 4),
                Frac::new(2.0 * 32.0 * b5, 4, 4),
                Frac::new(-2.0 * 1024.0 * a * a * b5, 4, 5),
                Frac::new(-128.0 * a * b3 * c, 2, 3),
                Frac::new(-32.0 * b5, 2, 3),
                Frac::new(768.0 * a * a * b5, 2, 4),
            ];
            let p = b3 * (4.0 * a * c + b * b);
            let q = 16.0 * a * a * b3 * (2.0 * a * c - b * b);
            let rhs = vec![
                Frac::new(-32.0 * 2.0 * p / 3.0, 5, 4),
                Frac::new(32.0 * p / 3.0, 3, 3),
                Frac::new(-32.0 * q / 3.0, 3, 4),
            ];
            (lhs, rhs)
        }
    }
}

/// Largest residual over the `y`-grid. Relative residuals divide by the summed
/// magnitude of every term at that `y`, which for small `a` reaches `1e15` and
/// more, so only the relative figures are comparable across draws.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CancellationResidual {
    pub analytic: f64,
    pub finite_difference: f64,
    pub analytic_abs: f64,
    pub finite_difference_abs: f64,
}

impl CancellationResidual {
    fn merge(self, o: Self) -> Self {
        Self {
            analytic: self.analytic.max(o.analytic),
            finite_difference: self.finite_difference.max(o.finite_difference),
            analytic_abs: self.analytic_abs.max(o.analytic_abs),
            finite_difference_abs: self.finite_difference_abs.max(o.finite_difference_abs),
        }
    }
}

pub fn check_cancellation(which: Cancellation, sample: &AbcSample) -> CancellationResidual {
    let (lhs_terms, rhs_terms) = cancellation_terms(which, sample);
    let a = sample.a;
    let mut out = CancellationResidual::default();
    for &y in &sample.ys {
        let mut lhs = 0.0;
        let mut scale = 0.0;
        for t in &lhs_terms {
            let v = t.value(y, a);
            lhs += v;
            scale += v.abs();
        }
        let mut rhs = 0.0;
        let mut rhs_fd = 0.0;
        for t in &rhs_terms {
            let (p, q) = t.deriv_parts(y, a);
            rhs += p + q;
            scale += p.abs() + q.abs();
            rhs_fd += t.deriv_fd(y, a);
        }
        let (ra, rf) = ((lhs - rhs).abs(), (lhs - rhs_fd).abs());
        let rel = |r: f64| if scale > 0.0 { r / scale } else { r };
        out = out.merge(CancellationResidual {
            analytic: rel(ra),
            finite_difference: rel(rf),
            analytic_abs: ra,
            finite_difference_abs: rf,
        });
    }
    out
}

/// Worst ratios of the three pointwise bounds for nonnegative `f`:
/// `|f'(x)| <= 2 |f''|^(1/2) sqrt(f(x))` and, with `K = 2(1 + |f'|_{C^1})`,
/// `|f'(x-y)| <= K max{|y|, sqrt f(x)}`, `f(x-y) <= K max{y^2, f(x)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityRatios {
    pub slope: f64,
    pub shifted_slope: f64,
    pub shifted_value: f64,
}

impl PositivityRatios {
    pub fn worst(&self) -> f64 {
        self.slope.max(self.shifted_slope).max(self.shifted_value)
    }

    pub fn pass(&self) -> bool {
        self.worst() <= 1.0 + RATIO_SLACK
    }
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else if rhs == 0.0 {
        f64::INFINITY
    } else {
        lhs / rhs
    }
}

/// Scans every node, and for the shifted bounds every `y_stride`-th lag.
pub fn check_positivity_bounds(f: &GridFunction, y_stride: usize) -> Result<PositivityRatios> {
    if let Some(i) = f.samples().iter().position(|&v| !(v >= 0.0)) {
        return Err(Error::RangeViolation {
            x: f.x(i),
            value: f.samples()[i],
            reason: "profile must be nonnegative".into(),
        });
    }
    let d1 = f.derivative(1)?;
    let d2 = f.derivative(2)?;
    let m2 = d2.sup_abs();
    let k = 2.0 * (1.0 + d1.sup_abs() + m2);
    let (fs, f1) = (f.samples(), d1.samples());
    let n = f.n() as isize;
    let stride = y_stride.max(1) as isize;
    let half = n / 2;
    let per_node: Vec<PositivityRatios> = (0..f.n())
        .into_par_iter()
        .map(|i| {
            let fx = fs[i];
            let slope = ratio(f1[i].abs(), 2.0 * m2.sqrt() * fx.sqrt());
            let (mut ss, mut sv) = (0.0f64, 0.0f64);
            let mut j = -half;
            while j <= half {
                let y = (j as f64 * f.dx()).abs();
                let src = (i as isize - j).rem_euclid(n) as usize;
                ss = ss.max(ratio(f1[src].abs(), k * y.max(fx.sqrt())));
                sv = sv.max(ratio(fs[src], k * (y * y).max(fx)));
                j += stride;
            }
            PositivityRatios {
                slope,
                shifted_slope: ss,
                shifted_value: sv,
            }
        })
        .collect();
    Ok(per_node.into_iter().fold(
        PositivityRatios {
            slope: 0.0,
            shifted_slope: 0.0,
            shifted_value: 0.0,
        },
        |acc, r| PositivityRatios {
            slope: acc.slope.max(r.slope),
            shifted_slope: acc.shifted_slope.max(r.shifted_slope),
            shifted_value: acc.shifted_value.max(r.shifted_value),
        },
    ))
}

/// `p(x)^2` for a random trigonometric polynomial `p` of degree 1 to 4 on `[-pi, pi)`.
pub fn random_nonnegative_profile(rng: &mut impl Rng, n: usize) -> Result<GridFunction> {
    let degree = rng.gen_range(1..=4usize);
    let coeffs: Vec<(f64, f64)> = (0..=degree)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    GridFunction::from_fn(std::f64::consts::PI, n, |x| {
        let p: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, &(c, s))| c * (k as f64 * x).cos() + s * (k as f64 * x).sin())
            .sum();
        p * p
    })
}

/// Smallest profile value for which the two half-plane forms are compared.
pub const FORM_MIN_HEIGHT: f64 = 0.05;

/// Largest nodal difference between the primary and alternate half-plane sums.
pub fn check_form_equivalence(f: &GridFunction, y_max: Option<f64>) -> Result<f64> {
    if !(f.min() >= FORM_MIN_HEIGHT) {
        return Err(Error::InvalidParameter(format!(
            "min f = {} below {FORM_MIN_HEIGHT}; the forms differ by a jump near contact",
            f.min()
        )));
    }
    let s = Interface::new(f.clone())?;
    let quad = QuadratureSpec::for_grid(f, y_max)?;
    let g = Geometry::HalfPlane;
    let p = pv_integral_all(&g, &s, RhsForm::Primary, &quad)?;
    let q = pv_integral_all(&g, &s, RhsForm::Alternate, &quad)?;
    Ok(p.iter().zip(&q).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max))
}

/// `|(f(x) +- f(x-y) +- y f'(x-y)) / (y^2 + (f(x) +- f(x-y))^2) + d/dy arctan((f(x) +- f(x-y)) / y)|`,
/// maximized over both branches and the `y`-grid, with the `y`-derivative taken by
/// 5-point differences. `f` returns `(f, f')`.
pub fn check_arctan_primitive(f: &dyn Fn(f64) -> (f64, f64), x: f64, ys: &[f64]) -> Result<f64> {
    let f0 = f(x).0;
    let mut worst: f64 = 0.0;
    for &y in ys {
        if y == 0.0 || !y.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "arctan primitive needs y != 0, got {y}"
            )));
        }
        for sign in [1.0, -1.0] {
            let (f1, fx1) = f(x - y);
            let g = f0 + sign * f1;
            let frac = (g + sign * y * fx1) / (y * y + g * g);
            let at = |t: f64| ((f0 + sign * f(x - t).0) / t).atan();
            let h = 1e-3 * y.abs();
            let d = (8.0 * (at(y + h) - at(y - h)) - (at(y + 2.0 * h) - at(y - 2.0 * h))) / (12.0 * h);
            worst = worst.max((frac + d).abs());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaRowReport {
    pub y: f64,
    pub r: f64,
    /// `|lattice_theta(N) - theta|` for each `N` of the schedule.
    pub errors: Vec<f64>,
    /// Fitted `p` in `error ~ N^-p`; absent when every error vanishes.
    pub exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaTable {
    pub l: f64,
    pub schedule: Vec<usize>,
    pub rows: Vec<ThetaRowReport>,
}

impl ThetaTable {
    pub fn max_final_error(&self) -> f64 {
        self.rows
            .iter()
            .filter_map(|r| r.errors.last().copied())
            .fold(0.0, f64::max)
    }

    pub fn exponent_range(&self) -> Option<(f64, f64)> {
        let e: Vec<f64> = self.rows.iter().filter_map(|r| r.exponent).collect();
        if e.is_empty() {
            return None;
        }
        Some((
            e.iter().copied().fold(f64::INFINITY, f64::min),
            e.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("y,r,N,error\n");
        for row in &self.rows {
            for (n, e) in self.schedule.iter().zip(&row.errors) {
                out.push_str(&format!("{:.16e},{:.16e},{n},{:.16e}\n", row.y, row.r, e));
            }
        }
        out
    }
}

pub fn check_theta_sum(l: f64, samples: &[(f64, f64)], schedule: &[usize]) -> Result<ThetaTable> {
    if schedule.len() < 2 {
        return Err(Error::InvalidParameter(
            "the N schedule needs at least two entries".into(),
        ));
    }
    let rows = samples
        .par_iter()
        .map(|&(y, r)| {
            let exact = theta(y, r, l)?;
            let errors: Vec<f64> = schedule
                .iter()
                .map(|&n| (lattice_theta(y, r, l, n) - exact).abs())
                .collect();
            let pts: Vec<(f64, f64)> = schedule
                .iter()
                .zip(&errors)
                .filter(|(_, &e)| e > 0.0)
                .map(|(&n, &e)| ((n as f64).ln(), e.ln()))
                .collect();
            let exponent = (pts.len() >= 2).then(|| {
                let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
                -crate::evolution::fit_slope(&xs, &ys).unwrap_or(f64::NAN)
            });
            Ok(ThetaRowReport {
                y,
                r,
                errors,
                exponent,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ThetaTable {
        l,
        schedule: schedule.to_vec(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CancellationSummary {
    pub identity: Cancellation,
    pub draws: usize,
    pub residual: CancellationResidual,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub seed: u64,
    pub draws: usize,
    pub cancellations: Vec<CancellationSummary>,
    pub arctan_residual: f64,
    pub arctan_pass: bool,
    pub positivity: PositivityRatios,
    pub positivity_profiles: usize,
    pub positivity_pass: bool,
    pub theta_max_error: f64,
    pub theta_exponent_range: Option<(f64, f64)>,
    pub theta_pass: bool,
    #[serde(skip)]
    pub theta_table: Option<ThetaTable>,
    pub pass: bool,
}

/// Smooth random test function `(f, f')`: a positive base plus three random modes.
fn random_smooth(rng: &mut impl Rng) -> impl Fn(f64) -> (f64, f64) {
    let base = rng.gen_range(0.0..2.0);
    let modes: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.gen_range(-0.5..0.5),
                rng.gen_range(0.2..3.0),
                rng.gen_range(0.0..6.3),
            )
        })
        .collect();
    move |x| {
        modes.iter().fold((base, 0.0), |(v, d), &(amp, k, ph)| {
            (v + amp * (k * x + ph).sin(), d + amp * k * (k * x + ph).cos())
        })
    }
}

/// The full randomized suite at one seed.
pub fn run_identity_suite(seed: u64, draws: usize) -> Result<IdentityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<AbcSample> = (0..draws)
        .map(|_| AbcSample::random(&mut rng, DEFAULT_NODES))
        .collect();
    let cancellations = Cancellation::ALL
        .iter()
        .map(|&which| {
            let residual = samples
                .par_iter()
                .map(|s| check_cancellation(which, s))
                .reduce(CancellationResidual::default, CancellationResidual::merge);
            CancellationSummary {
                identity: which,
                draws,
                residual,
                pass: residual.analytic < IDENTITY_ANALYTIC && residual.finite_difference < IDENTITY_FD,
            }
        })
        .collect::<Vec<_>>();

    let mut arctan_residual: f64 = 0.0;
    for _ in 0..100 {
        let f = random_smooth(&mut rng);
        let x = rng.gen_range(-3.0..3.0);
        let y = rng.gen_range(0.05..5.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        arctan_residual = arctan_residual.max(check_arctan_primitive(&f, x, &[y])?);
    }

    let profiles = draws.clamp(1, 100);
    let mut positivity = PositivityRatios {
        slope: 0.0,
        shifted_slope: 0.0,
        shifted_value: 0.0,
    };
    for _ in 0..profiles {
        let f = random_nonnegative_profile(&mut rng, 512)?;
        let r = check_positivity_bounds(&f, 4)?;
        positivity = PositivityRatios {
            slope: positivity.slope.max(r.slope),
            shifted_slope: positivity.shifted_slope.max(r.shifted_slope),
            shifted_value: positivity.shifted_value.max(r.shifted_value),
        };
    }

    let l = std::f64::consts::PI;
    let mut theta_samples = vec![(1.0, 1.0)];
    theta_samples.extend((1..100).map(|_| (rng.gen_range(0.05..2.0 * l), rng.gen_range(-l..l))));
    let table = check_theta_sum(l, &theta_samples, &THETA_SCHEDULE)?;
    let theta_max_error = table.max_final_error();
    let theta_exponent_range = table.exponent_range();
    let theta_pass = theta_max_error < THETA_ERROR
        && theta_exponent_range.is_some_and(|(lo, hi)| lo >= THETA_EXPONENT.0 && hi <= THETA_EXPONENT.1);

    let arctan_pass = arctan_residual < ARCTAN_RESIDUAL;
    let positivity_pass = positivity.pass();
    let pass = cancellations.iter().all(|c| c.pass) && arctan_pass && positivity_pass && theta_pass;
    Ok(IdentityReport {
        seed,
        draws,
        cancellations,
        arctan_residual,
        arctan_pass,
        positivity,
        positivity_profiles: profiles,
        positivity_pass,
        theta_max_error,
        theta_exponent_range,
        theta_pass,
        theta_table: Some(table),
        pass,
    })
}
