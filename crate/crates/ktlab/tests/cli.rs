//! End-to-end tests of the `ktlab` binary: flags, exit codes, file
//! contract, and the shipped alpha2 golden scenario.

use std::path::Path;
use std::process::Command;

fn ktlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ktlab"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("scenarios.cfg");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn shipped_alpha2_scenario_is_golden() {
    let tmp = tempfile::tempdir().unwrap();
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/alpha2.cfg");
    let out = tmp.path().join("out");
    let status = ktlab()
        .args(["--config", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "--strict"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    let dir = out.join("alpha2");
    for file in ["decay.csv", "resolvent.csv", "m.csv", "omega.csv", "report.csv", "report.txt"] {
        assert!(dir.join(file).exists(), "{file} missing");
    }
    // 6 decades at 16 points per decade on a left-open lattice plus the
    // t = 0 row: 97 data rows under one header line.
    let decay = std::fs::read_to_string(dir.join("decay.csv")).unwrap();
    let lines: Vec<&str> = decay.lines().collect();
    assert_eq!(lines[0], "t,kt_observable,mu_observable");
    assert_eq!(lines.len() - 1, 97);
    // with mu = e - delta_0 the two observable columns coincide (up to
    // the arithmetic route: lambda/(1-lambda) vs L(mu)(-lambda))
    for line in &lines[1..] {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 3);
        let kt: f64 = cols[1].parse().unwrap();
        let mu: f64 = cols[2].parse().unwrap();
        assert!((kt - mu).abs() <= 1e-13 * kt.max(1e-300), "{line}");
    }
    let resolvent = std::fs::read_to_string(dir.join("resolvent.csv")).unwrap();
    assert_eq!(resolvent.lines().next().unwrap(), "s,resolvent_norm");
    assert_eq!(resolvent.lines().count() - 1, 97);
}

#[test]
fn splitting_scenario_with_lower_bound_is_inconclusive_strict_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "\
[scenario]
name = split
operator = diagonal eigenvalues((0, 0), (-1, 0))
t_max = 1e4
s_min = 1e-4
checks = LowerBound_2_4
",
    );
    let out = tmp.path().join("out");
    // lenient: inconclusive alone exits 0
    let status = ktlab()
        .args(["--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    // strict: inconclusive becomes exit 3
    let status = ktlab()
        .args(["--config", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "--strict"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
    let report = std::fs::read_to_string(out.join("split/report.csv")).unwrap();
    assert!(report.contains("LowerBound_2_4,inconclusive"));
}

#[test]
fn failing_decay_witness_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    // The lacunary profile decays like 1/log t: no 100x drop by t = 1e4.
    let config = write_config(
        tmp.path(),
        "\
[scenario]
name = too_slow
operator = diagonal lacunary(levels = 5)
t_max = 1e4
checks = MuDecay_3_4
",
    );
    let out = tmp.path().join("out");
    let status = ktlab()
        .args(["--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let report = std::fs::read_to_string(out.join("too_slow/report.csv")).unwrap();
    assert!(report.contains("MuDecay_3_4,inconsistent"));
}

#[test]
fn config_errors_exit_4() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");

    let bad_key = write_config(
        tmp.path(),
        "[scenario]\nname = x\noperator = diagonal exponential(n = 4)\nwhatever = 3\n",
    );
    let output = ktlab()
        .args(["--config", bad_key.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(4));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("unknown key") && stderr.contains("line 4"), "{stderr}");

    let bad_range = write_config(tmp.path(), "[scenario]\nname = x\noperator = diagonal exponential(n = 4)\nepsilon = 1.5\n");
    let status = ktlab()
        .args(["--config", bad_range.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(4));

    let status = ktlab()
        .args(["--config", tmp.path().join("missing.cfg").to_str().unwrap(), "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(4));
}

#[test]
fn scenario_filter_and_seeded_oracle_note() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "\
[scenario]
name = little_jordan
operator = matrix [[-3, 100], [0, -3]]
t_max = 1e3
checks = S0InftyProxy_3_1

[scenario]
name = other
operator = diagonal exponential(n = 4)
t_max = 1e3
checks = S0InftyProxy_3_1
",
    );
    let out = tmp.path().join("out");
    let status = ktlab()
        .args([
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--scenario",
            "little_jordan",
            "--seed",
            "7",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("little_jordan").exists());
    assert!(!out.join("other").exists());
    let report = std::fs::read_to_string(out.join("little_jordan/report.txt")).unwrap();
    assert!(report.contains("norm oracle cross-check (seed 7)"), "{report}");
}

#[test]
fn empty_config_runs_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "# nothing here\n");
    let out = tmp.path().join("out");
    let status = ktlab()
        .args(["--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(!out.exists());
}
