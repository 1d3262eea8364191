//! End-to-end runs of the `sim` binary and the library runner.

use std::path::Path;
use std::process::Command;

use proptest::prelude::*;

use pairblock::cli::output::sha256_hex;
use pairblock::cli::{execute, parse_config_str, RunConfig, RunOptions, Scenario, MANIFEST_NAME};
use pairblock::units::{angular_to_ghz, ghz_to_angular};

fn sim(dir: &Path, scenario: &str, config: &str, extra: &[&str]) -> (i32, String) {
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, config).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sim"))
        .arg(scenario)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    let (code, err) = sim(d, "validate", "[model]\nlambda_1 = -0.1\n", &[]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("line 2") && err.contains("model.lambda_1"), "{err}");
    assert_eq!(sim(d, "rabi", "[model]\nkappa = 3 furlongs\n", &[]).0, 2);
    assert_eq!(sim(d, "nonsense", "", &[]).0, 2);
    assert_eq!(sim(d, "rabi", "scenario = validate\n", &[]).0, 2);
    assert_eq!(sim(d, "design", "", &[]).0, 2, "design without [circuit]");

    // closed system: the steady state is not unique
    let (code, err) = sim(d, "validate", "[model]\nkappa = 0 GHz\ngamma = 0 GHz\n", &[]);
    assert_eq!(code, 3, "{err}");

    // detuned drive is refused unless asked for
    let detuned = "[model]\nomega_j = 20 GHz\n[rabi]\nt_end = 5 ns\npoints = 11\n";
    let (code, err) = sim(d, "rabi", detuned, &[]);
    assert_eq!(code, 4, "{err}");
    assert!(err.contains("--allow-detuned"));
    assert_eq!(sim(d, "rabi", detuned, &["--allow-detuned"]).0, 0);

    // a validation tolerance that cannot be met
    assert_eq!(sim(d, "validate", "[tolerances]\nlaguerre = 0\n", &[]).0, 4);
}

#[test]
fn manifest_checksums_match_files() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = sim(dir.path(), "correlations", "[correlations]\npoints = 21\nconvergence_check = false\n", &[]);
    assert_eq!(code, 0, "{err}");
    let out = dir.path().join("out");
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join(MANIFEST_NAME)).unwrap()).unwrap();
    let files = manifest["files"].as_array().unwrap();
    let names: Vec<&str> = files.iter().map(|f| f["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["g11.csv", "g22.csv", "g12.csv", "g1212.csv", "zero_delay.csv"]);
    for f in files {
        let bytes = std::fs::read(out.join(f["name"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), sha256_hex(&bytes));
        assert_eq!(f["bytes"].as_u64().unwrap() as usize, bytes.len());
    }
    assert_eq!(manifest["exit_code"], 0);
    assert_eq!(manifest["params_internal"]["units"], "rad/ns");
    let g11 = std::fs::read_to_string(out.join("g11.csv")).unwrap();
    assert!(g11.starts_with("kappa_tau,tau_ns,value\n"));
    assert_eq!(g11.lines().count(), 22);
}

#[test]
fn output_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config_str("[sweep]\ncount = 9\n").unwrap();
    let mut sums = Vec::new();
    for workers in [1, 4] {
        let out = dir.path().join(format!("w{workers}"));
        let opts = RunOptions {
            scenario: Some(Scenario::EmissionSweep),
            out_dir: Some(out.clone()),
            workers: Some(workers),
            ..Default::default()
        };
        let m = execute(&cfg, &opts).unwrap();
        assert_eq!(m.exit_code, 0);
        sums.push((m.files[0].sha256.clone(), std::fs::read(out.join("emission.csv")).unwrap()));
    }
    assert_eq!(sums[0], sums[1]);
}

#[test]
fn sweep_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config_str("[sweep]\nstart = 0.05\nstop = 0.2\ncount = 4\nspacing = log\n").unwrap();
    let opts =
        RunOptions { scenario: Some(Scenario::EmissionSweep), out_dir: Some(dir.path().into()), ..Default::default() };
    execute(&cfg, &opts).unwrap();
    let text = std::fs::read_to_string(dir.path().join("emission.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "gamma_over_kappa,nbar,S_MHz,n1,n2,S_per_ns");
    let gk: Vec<f64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(gk.len(), 4);
    assert!((gk[0] - 0.05).abs() < 1e-15 && (gk[3] - 0.2).abs() < 1e-15);
    assert!((gk[1] / gk[0] - gk[2] / gk[1]).abs() < 1e-12);
}

fn arb_config() -> impl Strategy<Value = RunConfig> {
    (
        (0.5f64..20.0, 0.5f64..20.0, 0.1f64..10.0, 0.0f64..2.0),
        (0.0f64..0.5, 0.0f64..0.5, proptest::option::of(1.0f64..40.0)),
        (1e-4f64..1.0, 0.0f64..0.5, 2usize..9),
        (proptest::collection::vec(0.01f64..1.0, 1..4), 1.0f64..30.0, 2usize..500, any::<bool>()),
        (0.01f64..0.1, 0.2f64..1.0, 2usize..40, prop_oneof![Just(Scenario::Rabi), Just(Scenario::EmissionSweep)]),
    )
        .prop_map(|((w1, w2, d, ej), (l1, l2, wj), (k, g, n), (gks, ktm, pts, conv), (s0, s1, cnt, sc))| {
            let mut c = RunConfig { scenario: Some(sc), ..RunConfig::default() };
            c.model.omega_1_ghz = w1;
            c.model.omega_2_ghz = w2;
            c.model.delta_ghz = d;
            c.model.e_j_ghz = ej;
            c.model.lambda_1 = l1;
            c.model.lambda_2 = l2;
            c.model.omega_j_ghz = wj;
            c.model.kappa_ghz = k;
            c.model.gamma_ghz = g;
            c.model.cutoff = n;
            c.correlations.gamma_over_kappa = gks;
            c.correlations.kappa_tau_max = ktm;
            c.correlations.points = pts;
            c.correlations.convergence_check = conv;
            c.sweep.start = s0;
            c.sweep.stop = s1;
            c.sweep.count = cnt;
            c
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn config_text_round_trips(cfg in arb_config()) {
        let text = cfg.to_config_string();
        let back = parse_config_str(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn ghz_round_trip(f in -1e3f64..1e3) {
        prop_assert!((angular_to_ghz(ghz_to_angular(f)) - f).abs() <= 1e-12 * f.abs().max(1.0));
    }
}
