//! Subcommand bodies. Each returns whether every attached verdict passed.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use muskat_core::io::{load_run, write_json, write_run};
use muskat_core::monitors::{
    apriori_rate_check, blowup_integral, stability_compare, t_psi_bound, Trajectory,
};
use muskat_core::{
    epsilon_continuation, extrema_check, local_norm, parse_config, run, GridFunction, NormKind, Verdict,
};
use serde_json::json;

fn report_verdicts(verdicts: &[Verdict]) -> bool {
    for v in verdicts {
        println!(
            "{} {} (worst {:.3e}, tolerance {:.3e})",
            if v.pass { "PASS" } else { "FAIL" },
            v.check,
            v.worst_violation,
            v.tolerance
        );
    }
    verdicts.iter().all(|v| v.pass)
}

pub fn simulate(config_path: &Path, out: Option<PathBuf>) -> anyhow::Result<bool> {
    let config = parse_config(config_path).with_context(|| format!("reading {}", config_path.display()))?;
    let out = out
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("run"));
    let report = run(&config)?;

    let mut verdicts = extrema_check(&report, None);
    let mut rate = apriori_rate_check(&report.records);
    let blowup = blowup_integral(&report, config.gamma)?;
    rate.fitted_constants.insert("blowup_integral".into(), blowup);
    verdicts.push(rate);
    let mut completed = Verdict {
        check: "completed".into(),
        pass: report.completed(),
        tolerance: 0.0,
        worst_violation: 0.0,
        violations: Vec::new(),
        fitted_constants: Default::default(),
    };
    if let Some(first) = report.snapshots.first() {
        let bound = t_psi_bound(&first.f, config.gamma)?;
        completed
            .fitted_constants
            .insert("tilde_h3_gamma_initial".into(), bound.norm);
        completed
            .fitted_constants
            .insert("t_psi_bracket".into(), bound.bound);
    }
    verdicts.push(completed);

    write_run(&out, &report, &verdicts)?;
    if let Some(a) = &report.abort {
        eprintln!("run aborted at t = {}: {}", a.t, a.reason);
    }
    println!(
        "wrote {} ({} records, {} steps)",
        out.display(),
        report.records.len(),
        report.steps
    );
    Ok(report_verdicts(&verdicts))
}

pub fn verify(seed: u64, draws: usize, out: &Path) -> anyhow::Result<bool> {
    let report = muskat_core::identities::run_identity_suite(seed, draws)?;
    std::fs::create_dir_all(out)?;
    write_json(&out.join("identities.json"), &report)?;
    if let Some(table) = &report.theta_table {
        std::fs::write(out.join("theta_convergence.csv"), table.to_csv())?;
    }
    for c in &report.cancellations {
        println!(
            "{} cancellation {} (relative residual {:.3e} analytic, {:.3e} finite difference)",
            if c.pass { "PASS" } else { "FAIL" },
            c.identity.name(),
            c.residual.analytic,
            c.residual.finite_difference
        );
    }
    let line = |ok: bool, what: String| println!("{} {what}", if ok { "PASS" } else { "FAIL" });
    line(
        report.arctan_pass,
        format!("arctan primitive (residual {:.3e})", report.arctan_residual),
    );
    line(
        report.positivity_pass,
        format!("positivity bounds (worst ratio {:.4})", report.positivity.worst()),
    );
    line(
        report.theta_pass,
        format!(
            "theta lattice sum (error {:.3e}, exponents {:?})",
            report.theta_max_error, report.theta_exponent_range
        ),
    );
    Ok(report.pass)
}

pub fn continuation(config_path: &Path, out: &Path) -> anyhow::Result<bool> {
    let config = parse_config(config_path).with_context(|| format!("reading {}", config_path.display()))?;
    let report = epsilon_continuation(&config)?;
    std::fs::create_dir_all(out)?;
    if let Some(r) = &report.richardson {
        r.write_csv(&out.join("richardson.csv"))?;
    }
    for (eps, run) in report.epsilons.iter().zip(&report.reports) {
        if let Some(f) = run.final_state() {
            f.write_csv(&out.join(format!("final_eps_{eps}.csv")))?;
        }
    }
    let pass = !report.partial && report.slope.is_some_and(|s| s >= 0.4);
    write_json(
        &out.join("continuation.json"),
        &json!({
            "epsilons": report.epsilons,
            "differences": report.differences,
            "slope": report.slope,
            "assumed_rate": report.assumed_rate,
            "partial": report.partial,
            "pass": pass,
        }),
    )?;
    println!(
        "{} continuation: differences {:?}, slope {:?}",
        if pass { "PASS" } else { "FAIL" },
        report.differences,
        report.slope
    );
    Ok(pass)
}

pub fn compare(a: &Path, b: &Path, mu: f64, out: Option<&Path>) -> anyhow::Result<bool> {
    let ra = load_run(a).with_context(|| format!("loading {}", a.display()))?;
    let rb = load_run(b).with_context(|| format!("loading {}", b.display()))?;
    if ra.config.geometry != rb.config.geometry {
        anyhow::bail!("runs use different geometries");
    }
    let cert = stability_compare(Trajectory::from(&ra), Trajectory::from(&rb), mu)?;
    let text = serde_json::to_string_pretty(&cert)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => writeln!(std::io::stdout().lock(), "{text}")?,
    }
    Ok(cert.verdict.pass && cert.no_super_exponential)
}

pub fn norms(csv: &Path, gamma: f64) -> anyhow::Result<bool> {
    let g = GridFunction::read_csv(csv).with_context(|| format!("reading {}", csv.display()))?;
    let kinds = [
        NormKind::TildeL2,
        NormKind::TildeHk(1),
        NormKind::TildeHk(2),
        NormKind::TildeHk(3),
        NormKind::DdotC(gamma),
        NormKind::TildeHkGamma(3, gamma),
        NormKind::CkGammaHolder(1, gamma),
        NormKind::CkGammaGamma(2, gamma),
        NormKind::CkGamma(2, gamma),
    ];
    println!("norm,value");
    for kind in kinds {
        println!("{},{:.16e}", kind.label(), local_norm(&g, kind)?);
    }
    let bound = t_psi_bound(&g, gamma)?;
    println!("t_psi_bracket,{:.16e}", bound.bound);
    if let Some(note) = bound.note {
        eprintln!("{note}");
    }
    Ok(true)
}
