//! Uniformly-local norms of sampled functions.
//!
//! * `tL2(g) = sup_x ||g||_{L2[x-1, x+1]}`, centers at every node.
//! * `tH^k = sum_{j<=k} tL2(g^(j))`, `tH^k_g = sum_{1<=j<=k} tL2(g^(j)) + C''^{1-g}(g)`.
//! * `C''^a(g)`: Holder quotient over pairs at distance `>= 1` (far pairs).
//! * `C'^a(g)`: Holder quotient over all pairs (near pairs).
//! * `C^{k,g} = sum_{j<=k} |g^(j)|_inf + C'^g(g^(k))`, and the `_g` variants swap the
//!   `j = 0` term for the far-pair quotient of `g`.
//!
//! Holder sups use a lag scan: for far pairs every lag from `ceil(1/dx)` for
//! [`DENSE_LAGS`] lags, for near pairs lags `1..=DENSE_LAGS`; beyond that the
//! lag grows geometrically by `2^(1/16)` up to `n/2`. On the torus a lag above
//! `n/2` is the same pair at a shorter distance, so `n/2` is the last lag
//! needed. Cost is `O(n log n)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;

pub const DENSE_LAGS: usize = 16;
const LAG_RATIO: f64 = 1.044_273_782_427_413_8; // 2^(1/16)

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    TildeL2,
    TildeHk(usize),
    /// Far-pair Holder quotient with exponent `alpha`.
    DdotC(f64),
    TildeHkGamma(usize, f64),
    CkGammaHolder(usize, f64),
    CkGammaGamma(usize, f64),
    CkGamma(usize, f64),
    TildeL2Mu(f64),
    TildeL2X0(f64),
}

impl NormKind {
    pub fn label(&self) -> String {
        match self {
            NormKind::TildeL2 => "tilde_l2".into(),
            NormKind::TildeHk(k) => format!("tilde_h{k}"),
            NormKind::DdotC(a) => format!("ddot_c_{a}"),
            NormKind::TildeHkGamma(k, g) => format!("tilde_h{k}_gamma_{g}"),
            NormKind::CkGammaHolder(k, g) => format!("c{k}_{g}"),
            NormKind::CkGammaGamma(k, g) => format!("c{k}_{g}_gamma_{g}"),
            NormKind::CkGamma(k, g) => format!("c{k}_gamma_{g}"),
            NormKind::TildeL2Mu(m) => format!("tilde_l2_mu_{m}"),
            NormKind::TildeL2X0(x) => format!("tilde_l2_x0_{x}"),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::InvalidParameter(what));
        let exp_ok = |a: f64| a > 0.0 && a <= 1.0;
        match *self {
            NormKind::TildeHk(k) if k > 3 => bad(format!("k = {k} outside 0..=3")),
            NormKind::DdotC(a) if !exp_ok(a) => bad(format!("alpha = {a} outside (0, 1]")),
            NormKind::TildeHkGamma(k, g)
            | NormKind::CkGammaHolder(k, g)
            | NormKind::CkGammaGamma(k, g)
            | NormKind::CkGamma(k, g) => {
                if k > 3 {
                    bad(format!("k = {k} outside 0..=3"))
                } else if !exp_ok(g) {
                    bad(format!("gamma = {g} outside (0, 1]"))
                } else {
                    Ok(())
                }
            }
            NormKind::TildeL2Mu(m) if !(m >= 0.0 && m.is_finite()) => {
                bad(format!("mu = {m} must be finite and >= 0"))
            }
            NormKind::TildeL2X0(x) if !x.is_finite() => bad(format!("x0 = {x} not finite")),
            _ => Ok(()),
        }
    }
}

/// Evaluates `kind` on `g`. Requires `dx <= 1/4` so the length-2 windows are resolved.
pub fn local_norm(g: &GridFunction, kind: NormKind) -> Result<f64> {
    kind.validate()?;
    if g.dx() > 0.25 {
        return Err(Error::InvalidGrid(format!(
            "local norms need dx <= 0.25, got {}",
            g.dx()
        )));
    }
    let derivs = |k: usize| -> Result<Vec<GridFunction>> {
        let mut out = vec![g.clone()];
        for j in 1..=k {
            out.push(g.derivative(j)?);
        }
        Ok(out)
    };
    let value = match kind {
        NormKind::TildeL2 => tilde_l2(g),
        NormKind::TildeHk(k) => derivs(k)?.iter().map(tilde_l2).sum(),
        NormKind::DdotC(a) => far_holder(g, a),
        NormKind::TildeHkGamma(k, gamma) => {
            derivs(k)?[1..].iter().map(tilde_l2).sum::<f64>() + far_holder(g, 1.0 - gamma)
        }
        NormKind::CkGammaHolder(k, gamma) => {
            let d = derivs(k)?;
            d.iter().map(GridFunction::sup_abs).sum::<f64>() + near_holder(&d[k], gamma)
        }
        NormKind::CkGammaGamma(k, gamma) => {
            let d = derivs(k)?;
            d[1..].iter().map(GridFunction::sup_abs).sum::<f64>()
                + near_holder(&d[k], gamma)
                + far_holder(g, 1.0 - gamma)
        }
        NormKind::CkGamma(k, gamma) => {
            derivs(k)?[1..].iter().map(GridFunction::sup_abs).sum::<f64>() + far_holder(g, 1.0 - gamma)
        }
        NormKind::TildeL2Mu(mu) => {
            let weighted: Vec<f64> = (0..g.n())
                .map(|i| g.samples()[i] * (1.0 + (mu - g.x(i).abs()).max(0.0)).sqrt())
                .collect();
            tilde_l2(&g.with_samples(weighted)?)
        }
        NormKind::TildeL2X0(x0) => weighted_l2_x0(g, x0),
    };
    if !value.is_finite() {
        return Err(Error::NonFinite(format!("{} evaluated to {value}", kind.label())));
    }
    Ok(value)
}

/// `sup_x ||g||_{L2[x-1,x+1]}` with window centers at the nodes.
///
/// The window integral is the trapezoid rule over the whole cells inside it
/// plus linear interpolation of `g^2` over the two fractional end cells, so
/// constants are integrated exactly.
pub fn tilde_l2(g: &GridFunction) -> f64 {
    let dx = g.dx();
    let sq: Vec<f64> = g.samples().iter().map(|v| v * v).collect();
    let n = sq.len() as isize;
    let at = |i: isize| sq[i.rem_euclid(n) as usize];
    let cells = 1.0 / dx;
    let m = cells.floor() as isize;
    let theta = cells - m as f64;
    let mut best: f64 = 0.0;
    for i in 0..n {
        let mut s = 0.5 * (at(i - m) + at(i + m));
        for j in (i - m + 1)..(i + m) {
            s += at(j);
        }
        let mut total = s * dx;
        if theta > 0.0 {
            for (edge, next) in [(at(i + m), at(i + m + 1)), (at(i - m), at(i - m - 1))] {
                let end = edge + theta * (next - edge);
                total += 0.5 * theta * dx * (edge + end);
            }
        }
        best = best.max(total);
    }
    best.sqrt()
}

fn lag_schedule(first: usize, last: usize) -> Vec<usize> {
    let mut lags = Vec::new();
    let mut lag = first.max(1);
    while lag <= last && lags.len() < DENSE_LAGS {
        lags.push(lag);
        lag += 1;
    }
    let mut real = lag as f64;
    while lag <= last {
        lags.push(lag);
        real *= LAG_RATIO;
        lag = (real.ceil() as usize).max(lag + 1);
    }
    if lags.last().is_some_and(|&l| l < last) {
        lags.push(last);
    }
    lags
}

fn holder_over_lags(g: &GridFunction, alpha: f64, lags: &[usize]) -> f64 {
    let s = g.samples();
    let n = s.len();
    let mut best: f64 = 0.0;
    for &lag in lags {
        let dist = (lag as f64 * g.dx()).powf(alpha);
        let mut m: f64 = 0.0;
        for i in 0..n {
            m = m.max((s[(i + lag) % n] - s[i]).abs());
        }
        best = best.max(m / dist);
    }
    best
}

/// Far-pair quotient `sup_{|x-y| >= 1} |g(x) - g(y)| / |x-y|^alpha` (`alpha` may be 0).
pub fn far_holder(g: &GridFunction, alpha: f64) -> f64 {
    let first = (1.0 / g.dx() - 1e-9).ceil() as usize;
    let lags = lag_schedule(first, g.n() / 2);
    holder_over_lags(g, alpha, &lags)
}

/// Near-pair quotient `sup_{x != y} |g(x) - g(y)| / |x-y|^alpha`.
pub fn near_holder(g: &GridFunction, alpha: f64) -> f64 {
    let lags = lag_schedule(1, g.n() / 2);
    holder_over_lags(g, alpha, &lags)
}

/// `[int_R g^2 min{1, |x - x0|^-2} dx]^{1/2}` for the periodic extension of `g`.
///
/// The weight summed over all periodic images is
/// `(pi/2L)^2 / sin^2(pi d / 2L)` with `d` the wrapped offset; the single image
/// within distance 1 is then capped at 1. Needs `L >= 1`, which `dx <= 1/4` ensures.
pub fn weighted_l2_x0(g: &GridFunction, x0: f64) -> f64 {
    let l = g.half_period();
    let a = std::f64::consts::PI / (2.0 * l);
    let p = 2.0 * l;
    let total: f64 = (0..g.n())
        .map(|i| {
            let d = (g.x(i) - x0 + l).rem_euclid(p) - l;
            let w = if d.abs() < 1.0 {
                // 1 + (all images except k = 0)
                let others = if d.abs() < 1e-3 {
                    a * a / 3.0 + a.powi(4) * d * d / 15.0
                } else {
                    (a / (a * d).sin()).powi(2) - 1.0 / (d * d)
                };
                1.0 + others
            } else {
                (a / (a * d).sin()).powi(2)
            };
            w * g.samples()[i].powi(2)
        })
        .sum();
    (total * g.dx()).sqrt()
}

/// Dyadic-radius Hardy-Littlewood maximal function of `|g|`.
///
/// Radii are `dx * 2^j` up to `L`, together with the zero-radius limit `|g(x_i)|`,
/// so `M g >= |g|` holds exactly at the nodes. Averages use a periodic trapezoid
/// prefix sum, giving `O(n log n)` total work. The dyadic sup is within a factor 2
/// of the sup over all radii.
pub fn maximal_function(g: &GridFunction) -> Result<GridFunction> {
    let n = g.n();
    let abs: Vec<f64> = g.samples().iter().map(|v| v.abs()).collect();
    // prefix[k] = trapezoid integral from node 0 to node k, over three periods
    let ext = 3 * n;
    let mut prefix = vec![0.0; ext + 1];
    for k in 0..ext {
        prefix[k + 1] = prefix[k] + 0.5 * (abs[k % n] + abs[(k + 1) % n]) * g.dx();
    }
    let mut radii = Vec::new();
    let mut m = 1usize;
    while m <= n / 2 {
        radii.push(m);
        m *= 2;
    }
    let out = (0..n)
        .map(|i| {
            let c = i + n;
            radii.iter().fold(abs[i], |best, &m| {
                let avg = (prefix[c + m] - prefix[c - m]) / (2.0 * m as f64 * g.dx());
                best.max(avg)
            })
        })
        .collect();
    g.with_samples(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_tilde_l2() {
        let g = GridFunction::constant(8.0, 128, 3.0).unwrap();
        assert!((local_norm(&g, NormKind::TildeL2).unwrap() - 3.0 * 2f64.sqrt()).abs() < 1e-12);
        // fractional window ends: dx = 0.3 does not divide 1 ... use dx = 16/70
        let h = GridFunction::constant(8.0, 70, 3.0).unwrap();
        assert!((tilde_l2(&h) - 3.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn tilde_l2_matches_fine_quadrature() {
        let g = GridFunction::from_fn(2.0 * PI, 512, |x| (x).sin() + 0.5).unwrap();
        // oracle: brute-force sup over centers of Simpson integrals of the exact function
        let mut best: f64 = 0.0;
        for c in 0..400 {
            let x = -2.0 * PI + 4.0 * PI * c as f64 / 400.0;
            let m = 2000;
            let h = 2.0 / m as f64;
            let s: f64 = (0..=m)
                .map(|j| {
                    let w = if j == 0 || j == m {
                        1.0
                    } else if j % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    let t = x - 1.0 + j as f64 * h;
                    w * (t.sin() + 0.5).powi(2)
                })
                .sum::<f64>()
                * h
                / 3.0;
            best = best.max(s);
        }
        let got = tilde_l2(&g);
        assert!((got - best.sqrt()).abs() < 1e-3, "{got} vs {}", best.sqrt());
    }

    #[test]
    fn mu_zero_is_plain_tilde_l2() {
        let g = GridFunction::from_fn(8.0, 256, |x| (x * 1.3).cos() * x).unwrap();
        assert_eq!(
            local_norm(&g, NormKind::TildeL2Mu(0.0)).unwrap(),
            local_norm(&g, NormKind::TildeL2).unwrap()
        );
        assert!(
            local_norm(&g, NormKind::TildeL2Mu(4.0)).unwrap() >= local_norm(&g, NormKind::TildeL2).unwrap()
        );
    }

    fn brute_holder(g: &GridFunction, alpha: f64, far: bool) -> f64 {
        let n = g.n();
        let s = g.samples();
        let mut best: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                // shortest periodic distance
                let lag = (i as isize - j as isize).unsigned_abs();
                let lag = lag.min(n - lag);
                if lag == 0 {
                    continue;
                }
                let d = lag as f64 * g.dx();
                if far && d < 1.0 - 1e-12 {
                    continue;
                }
                best = best.max((s[i] - s[j]).abs() / d.powf(alpha));
            }
        }
        best
    }

    #[test]
    fn far_holder_matches_brute_force() {
        let g = GridFunction::from_fn(4.0 * PI, 256, f64::sin).unwrap();
        let oracle = brute_holder(&g, 0.5, true);
        let got = local_norm(&g, NormKind::DdotC(0.5)).unwrap();
        assert!(got <= oracle + 1e-14);
        assert!((got - oracle).abs() / oracle < 0.02, "{got} vs {oracle}");
        let near = near_holder(&g, 0.5);
        let near_oracle = brute_holder(&g, 0.5, false);
        assert!((near - near_oracle).abs() / near_oracle < 0.02);
    }

    #[test]
    fn seminorms_vanish_on_constants() {
        let g = GridFunction::constant(8.0, 128, -2.5).unwrap();
        for kind in [
            NormKind::DdotC(0.5),
            NormKind::TildeHkGamma(3, 0.5),
            NormKind::CkGammaGamma(2, 0.5),
            NormKind::CkGamma(2, 0.3),
        ] {
            assert!(local_norm(&g, kind).unwrap() < 1e-12, "{kind:?}");
        }
    }

    #[test]
    fn composite_norms_assemble_from_parts() {
        let g = GridFunction::from_fn(8.0, 256, |x| (-(x * x)).exp()).unwrap();
        let d1 = g.derivative(1).unwrap();
        let d2 = g.derivative(2).unwrap();
        let expect = d1.sup_abs() + d2.sup_abs() + near_holder(&d2, 0.5) + far_holder(&g, 0.5);
        let got = local_norm(&g, NormKind::CkGammaGamma(2, 0.5)).unwrap();
        assert!((got - expect).abs() < 1e-14);
        let th = local_norm(&g, NormKind::TildeHk(1)).unwrap();
        assert!((th - tilde_l2(&g) - tilde_l2(&d1)).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_arguments() {
        let g = GridFunction::constant(8.0, 128, 1.0).unwrap();
        assert!(local_norm(&g, NormKind::TildeHk(4)).is_err());
        assert!(local_norm(&g, NormKind::DdotC(0.0)).is_err());
        assert!(local_norm(&g, NormKind::TildeL2Mu(-1.0)).is_err());
        let coarse = GridFunction::constant(8.0, 32, 1.0).unwrap();
        assert!(local_norm(&coarse, NormKind::TildeL2).is_err());
    }

    #[test]
    fn weighted_norm_matches_direct_image_sum() {
        let l = 4.0;
        let g = GridFunction::from_fn(l, 256, |x| 1.0 + 0.3 * (PI * x / l).sin()).unwrap();
        for &x0 in &[0.0, 1.3, -3.9] {
            // oracle: explicit sum over 2000 periodic images of the capped weight
            let mut total = 0.0;
            for i in 0..g.n() {
                let mut w = 0.0;
                for k in -2000i64..=2000 {
                    let d = g.x(i) + 2.0 * l * k as f64 - x0;
                    w += if d.abs() < 1.0 { 1.0 } else { 1.0 / (d * d) };
                }
                total += w * g.samples()[i].powi(2) * g.dx();
            }
            let got = local_norm(&g, NormKind::TildeL2X0(x0)).unwrap();
            assert!((got - total.sqrt()).abs() < 1e-4, "{got} vs {}", total.sqrt());
        }
    }

    fn indicator(n: usize) -> GridFunction {
        GridFunction::from_fn(8.0, n, |x| if x.abs() <= 1.0 { 1.0 } else { 0.0 }).unwrap()
    }

    #[test]
    fn maximal_function_of_indicator() {
        let g = indicator(512);
        let m = maximal_function(&g).unwrap();
        let i0 = g.n() / 2;
        assert!((m.samples()[i0] - 1.0).abs() < 1e-12);
        // oracle over all radii at x = 2: (y - 1)/(2y) peaks at y = 3 giving 1/3
        let i2 = i0 + (2.0 / g.dx()) as usize;
        let v = m.samples()[i2];
        let mut oracle: f64 = 0.0;
        for r in 1..=g.n() / 2 {
            let s: f64 = (i2 as isize - r as isize..=i2 as isize + r as isize)
                .map(|j| g.at(j).abs())
                .sum::<f64>()
                - 0.5 * (g.at(i2 as isize - r as isize) + g.at((i2 + r) as isize));
            oracle = oracle.max(s / (2.0 * r as f64));
        }
        assert!((oracle - 1.0 / 3.0).abs() < 0.01, "oracle {oracle}");
        assert!(v <= oracle + 1e-12 && v >= oracle / 2.0, "{v} vs {oracle}");
    }

    #[test]
    fn maximal_function_of_constant() {
        let g = GridFunction::constant(8.0, 128, -1.5).unwrap();
        let m = maximal_function(&g).unwrap();
        assert!(m.samples().iter().all(|v| (v - 1.5).abs() < 1e-12));
    }

    proptest! {
        #[test]
        fn maximal_function_dominates_and_is_sublinear(
            a in prop::collection::vec(-3.0f64..3.0, 64),
            b in prop::collection::vec(-3.0f64..3.0, 64),
        ) {
            let ga = GridFunction::new(8.0, a).unwrap();
            let gb = GridFunction::new(8.0, b).unwrap();
            let sum = ga.zip_with(&gb, |x, y| x + y).unwrap();
            let (ma, mb, ms) = (
                maximal_function(&ga).unwrap(),
                maximal_function(&gb).unwrap(),
                maximal_function(&sum).unwrap(),
            );
            for i in 0..64 {
                prop_assert!(ma.samples()[i] >= ga.samples()[i].abs());
                prop_assert!(ms.samples()[i] <= ma.samples()[i] + mb.samples()[i] + 1e-12);
            }
        }

        #[test]
        fn far_holder_bounded_by_twice_sup(vals in prop::collection::vec(-3.0f64..3.0, 64), a in 0.05f64..1.0) {
            let g = GridFunction::new(8.0, vals).unwrap();
            prop_assert!(local_norm(&g, NormKind::DdotC(a)).unwrap() <= 2.0 * g.sup_abs() + 1e-12);
        }

        #[test]
        fn gamma_monotonicity(
            coef in prop::collection::vec(-1.0f64..1.0, 6),
            g_hi in 0.05f64..1.0,
            frac in 0.0f64..1.0,
            k in 2usize..=3,
        ) {
            // smooth periodic test function on [-8, 8)
            let g = GridFunction::from_fn(8.0, 256, |x| {
                coef.iter().enumerate().map(|(j, c)| c * ((j + 1) as f64 * PI * x / 8.0 + j as f64).sin()).sum()
            }).unwrap();
            let g_lo = (g_hi * frac).max(1e-3);
            let lo = local_norm(&g, NormKind::TildeHkGamma(k, g_lo)).unwrap();
            let hi = local_norm(&g, NormKind::TildeHkGamma(k, g_hi)).unwrap();
            let slope = g.derivative(1).unwrap().sup_abs();
            prop_assert!(lo <= hi + slope);
            prop_assert!(hi + slope <= 2.0 * hi + 1e-12);
        }
    }
}
