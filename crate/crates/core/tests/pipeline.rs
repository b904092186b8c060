//! End-to-end paths through config, solver, monitors and run directories.

use muskat_core::io::{load_run, write_run};
use muskat_core::monitors::{apriori_rate_check, blowup_integral, Trajectory};
use muskat_core::{extrema_check, parse_config_str, run, stability_compare, Error};
use proptest::prelude::*;

fn bump_config(geometry: &str, n: usize, amplitude: f64, eps: f64) -> String {
    format!(
        r#"{{"geometry":{geometry},"L":8,"n":{n},"t_end":0.1,"cadence":0.02,"epsilons":[{eps}],
            "profile":{{"bump":{{"A":{amplitude},"w":3,"base":0.5}}}}}}"#
    )
}

#[test]
fn run_monitor_store_reload() {
    let config = parse_config_str(&bump_config(r#""half_plane""#, 256, 1.0, 0.0)).unwrap();
    let report = run(&config).unwrap();
    assert!(report.completed());
    assert_eq!(report.records.len(), 6);

    let mut verdicts = extrema_check(&report, None);
    verdicts.push(apriori_rate_check(&report.records));
    assert!(verdicts.iter().all(|v| v.pass), "{verdicts:#?}");

    let dir = tempfile::tempdir().unwrap();
    write_run(dir.path(), &report, &verdicts).unwrap();
    let back = load_run(dir.path()).unwrap();
    assert_eq!(back.records, report.records);

    let cert = stability_compare(Trajectory::from(&report), Trajectory::from(&back), 1.0).unwrap();
    assert!(cert.distance.iter().all(|&d| d == 0.0));
    assert!(cert.verdict.pass);
}

// n = 256 under-resolves the initial C^{1,gamma'} seminorm of this bump by
// about 20%; from 512 up the integrand is converged to a couple of percent.
#[test]
fn blowup_integral_is_resolution_stable() {
    let integral = |n| {
        let config = parse_config_str(&bump_config(r#""half_plane""#, n, 1.0, 0.0)).unwrap();
        blowup_integral(&run(&config).unwrap(), config.gamma).unwrap()
    };
    let (coarse, fine) = (integral(512), integral(1024));
    assert!(fine > 0.0);
    assert!((coarse - fine).abs() <= 0.05 * fine, "{coarse} vs {fine}");
}

#[test]
fn flat_data_has_zero_blowup_integral() {
    let config = parse_config_str(
        r#"{"geometry":"plane","L":4,"n":64,"t_end":0.05,"cadence":0.01,"epsilons":[0],
            "profile":{"constant":{"c":2}}}"#,
    )
    .unwrap();
    assert_eq!(
        blowup_integral(&run(&config).unwrap(), config.gamma).unwrap(),
        0.0
    );
}

#[test]
fn config_errors_point_at_the_field() {
    let unknown = parse_config_str(
        r#"{"geometry":"plane","L":4,"n":64,"t_end":1,"profile":{"constant":{"c":1}},"typo":1}"#,
    );
    assert!(
        matches!(unknown, Err(Error::Config(ref m)) if m.contains("typo")),
        "{unknown:?}"
    );
    let negative =
        parse_config_str(r#"{"geometry":"plane","L":4,"n":64,"t_end":-1,"profile":{"constant":{"c":1}}}"#);
    assert!(matches!(negative, Err(Error::Config(_))), "{negative:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn strip_runs_respect_extrema(amplitude in 0.1f64..2.0, l in 3.0f64..6.0) {
        let config = parse_config_str(&bump_config(&format!(r#"{{"strip":{l}}}"#), 512, amplitude, 0.1)).unwrap();
        let report = run(&config).unwrap();
        prop_assert!(report.completed());
        for v in extrema_check(&report, None) {
            prop_assert!(v.pass, "{v:?}");
        }
    }
}
