use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_catforge");
const UPDATE_VAR: &str = "CATFORGE_UPDATE_GOLDEN";
/// Demands byte-identical output, for runs on the platform that produced the goldens.
const EXACT_VAR: &str = "CATFORGE_GOLDEN_EXACT";

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("CATFORGE_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn stdout_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn parse_csv(text: &str) -> Csv {
    let mut lines = text.lines();
    let header = lines.next().expect("header").split(',').map(str::to_string).collect();
    let rows = lines.filter(|l| !l.is_empty()).map(|l| l.split(',').map(|t| t.parse().unwrap()).collect()).collect();
    Csv { header, rows }
}

fn column(csv: &Csv, i: usize) -> Vec<f64> {
    csv.rows.iter().map(|r| r[i]).collect()
}

const GOLDEN: &[(&str, &[&str])] = &[
    ("fidelity_gp_n1", &["fidelity-curve", "--protocol", "gp", "--n", "1", "--alpha-grid", "1:3:3"]),
    ("fidelity_ps_n2", &["fidelity-curve", "--protocol", "ps", "--n", "2", "--alpha-grid", "1:3:3"]),
    (
        "fidelity_pa_n1_lossy",
        &["fidelity-curve", "--protocol", "pa", "--n", "1", "--alpha-grid", "1:3:3", "--tau", "0.9"],
    ),
    (
        "fidelity_dispersive",
        &["fidelity-curve", "--protocol", "dispersive", "--alpha-grid", "0.5:6:12", "--tau", "0.95"],
    ),
    (
        "fidelity_dispersive_prob",
        &["fidelity-curve", "--protocol", "dispersive-prob", "--n", "1", "--alpha-grid", "1:3:3"],
    ),
    ("gp_optimize_n2", &["gp-optimize", "--alpha", "2", "--n", "2"]),
    ("gp_optimize_addition", &["gp-optimize", "--alpha", "2", "--family", "addition"]),
    (
        "wigner_cat_lossy",
        &["wigner-cut", "--state", "target-cat", "--alpha", "3", "--ygrid", "-1:1:41", "--tau", "0.9"],
    ),
    ("wigner_gp", &["wigner-cut", "--state", "gp", "--alpha", "1.5", "--ygrid", "-2:2:41"]),
    (
        "wigner_dispersive_imp",
        &[
            "wigner-cut",
            "--state",
            "dispersive:imp",
            "--coop",
            "10",
            "--eta",
            "0.9",
            "--alpha",
            "2",
            "--ygrid",
            "-1:1:41",
            "--x",
            "0.5",
        ],
    ),
    (
        "homodyne_dispersive_pd",
        &["homodyne", "--state", "dispersive:pd", "--pd", "0.2", "--alpha", "2", "--ygrid", "-3:3:61"],
    ),
    ("homodyne_gp_n2", &["homodyne", "--state", "gp", "--n", "2", "--alpha", "2", "--ygrid", "-3:3:61"]),
    ("distill_dispersive_ad", &["distill", "--state", "dispersive:ad", "--ad", "0.3", "--alpha-grid", "0.5:4:8"]),
    ("fisher_cat_qfi", &["fisher", "--state", "target-cat", "--alpha-grid", "0.5:6:12", "--qfi"]),
    (
        "fisher_dispersive_dim",
        &["fisher", "--state", "dispersive", "--alpha-grid", "1:3:5", "--fock-dim", "60", "--qfi"],
    ),
];

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.csv"))
}

#[test]
fn golden_outputs() {
    let update = std::env::var_os(UPDATE_VAR).is_some();
    let exact = std::env::var_os(EXACT_VAR).is_some();
    let mut failures = Vec::new();
    for &(name, args) in GOLDEN {
        let text = stdout_ok(args);
        let path = golden_path(name);
        if update {
            std::fs::write(&path, &text).unwrap();
            continue;
        }
        let expected = std::fs::read_to_string(&path)
            .unwrap_or_else(|_| panic!("missing {}; rerun with {UPDATE_VAR}=1", path.display()));
        if exact && text != expected {
            failures.push(format!("{name}: not byte-identical"));
        }
        let (got, want) = (parse_csv(&text), parse_csv(&expected));
        if got.header != want.header || got.rows.len() != want.rows.len() {
            failures.push(format!("{name}: shape differs"));
            continue;
        }
        for (i, (g, w)) in got.rows.iter().zip(&want.rows).enumerate() {
            for (a, b) in g.iter().zip(w) {
                if (a - b).abs() > 1e-9 * b.abs().max(1.0) {
                    failures.push(format!("{name} row {i}: {a:e} vs {b:e}"));
                }
            }
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn json_matches_csv() {
    let cases: &[&[&str]] = &[
        &["fisher", "--state", "target-cat", "--alpha-grid", "0.5:6:12", "--qfi"],
        &["homodyne", "--state", "dispersive:ideal", "--alpha", "3", "--ygrid", "-4:4:33"],
        &["gp-optimize", "--alpha", "1.5"],
    ];
    for args in cases {
        let csv = parse_csv(&stdout_ok(args));
        let mut with_json = args.to_vec();
        with_json.push("--json");
        let json: serde_json::Value = serde_json::from_str(&stdout_ok(&with_json)).unwrap();
        let rows: Vec<Vec<f64>> = serde_json::from_value(json["rows"].clone()).unwrap();
        assert_eq!(rows, csv.rows, "{args:?}");
        let headers: Vec<String> = json["meta"]["columns"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| format!("{} ({})", c["name"].as_str().unwrap(), c["unit"].as_str().unwrap()))
            .collect();
        assert_eq!(headers, csv.header);
        assert_eq!(json["meta"]["version"], env!("CARGO_PKG_VERSION"));
        assert!(json["params"]["subcommand"].is_string());
    }
}

#[test]
fn fisher_target_cat_sensitivity_improves_with_size() {
    let csv = parse_csv(&stdout_ok(&["fisher", "--state", "target-cat", "--alpha-grid", "0.5:6:12"]));
    assert_eq!(csv.rows.len(), 12);
    let eps = column(&csv, 1);
    assert!(eps.windows(2).all(|w| w[1] < w[0]), "{eps:?}");
}

#[test]
fn dispersive_wigner_cut_has_negative_fringe_near_pi_over_16() {
    let csv =
        parse_csv(&stdout_ok(&["wigner-cut", "--state", "dispersive:ideal", "--alpha", "4", "--ygrid", "-2:2:801"]));
    assert_eq!(csv.header, ["y (canonical)", "W (1/canonical^2)"]);
    let (y, w) = csv.rows.iter().map(|r| (r[0], r[1])).fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    assert!(w < 0.0);
    assert!((y.abs() - PI / 16.0).abs() < 0.05 * PI / 16.0, "{y}");
}

#[test]
fn dispersive_fidelity_at_small_amplitude() {
    let csv =
        parse_csv(&stdout_ok(&["fidelity-curve", "--protocol", "dispersive", "--n", "1", "--alpha-grid", "0.1:0.1:1"]));
    assert_eq!(csv.rows[0][0], 0.1);
    assert!(csv.rows[0][1] >= 0.5);
    assert_eq!(csv.rows[0][2], 1.0);
}

#[test]
fn probabilistic_curve_respects_default_target() {
    let prob = parse_csv(&stdout_ok(&[
        "fidelity-curve",
        "--protocol",
        "dispersive-prob",
        "--n",
        "1",
        "--alpha-grid",
        "1:3:3",
    ]));
    let gp = parse_csv(&stdout_ok(&["fidelity-curve", "--protocol", "gp", "--n", "1", "--alpha-grid", "1:3:3"]));
    for (p, g) in prob.rows.iter().zip(&gp.rows) {
        assert!(p[1] >= g[1] - 1e-6, "{p:?} vs {g:?}");
        assert!(p[2] > 0.0 && p[2] <= 1.0);
    }
    let fixed = parse_csv(&stdout_ok(&[
        "fidelity-curve",
        "--protocol",
        "dispersive-prob",
        "--alpha-grid",
        "2:2:1",
        "--target-fidelity",
        "0.99",
    ]));
    assert!(fixed.rows[0][1] >= 0.99 - 1e-6);
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["fidelity-curve", "--protocol", "gp", "--n", "1", "--alpha-grid", "1:2:3"];
    let one = run_env(&args, &[("CATFORGE_THREADS", "1")]);
    let four = run_env(&args, &[("CATFORGE_THREADS", "4")]);
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cut.csv");
    let args = ["homodyne", "--state", "target-cat", "--alpha", "2", "--ygrid", "-1:1:5"];
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let out = run(&with_out);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout_ok(&args));
}

#[test]
fn argument_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["no-such-command"],
        &["fisher", "--state", "target-cat", "--alpha-grid", "1:2"],
        &["fisher", "--state", "cat", "--alpha-grid", "1:2:3"],
        &["fidelity-curve", "--protocol", "gp", "--n", "4", "--alpha-grid", "1:2:3"],
        &["fisher", "--state", "target-cat", "--alpha-grid", "1:2:3", "--coop", "3"],
        &["fisher", "--state", "dispersive:imp", "--alpha-grid", "1:2:3", "--coop", "3"],
        &["homodyne", "--state", "dispersive:pd", "--alpha", "2", "--ygrid", "-1:1:3"],
        &["wigner-cut", "--state", "target-cat", "--alpha", "2", "--ygrid", "-1:1:3", "--tau", "1.5"],
        &["fidelity-curve", "--protocol", "gp", "--alpha-grid", "1:2:3", "--target-fidelity", "0.9"],
        &["distill", "--state", "target-cat", "--alpha-grid", "-1:2:3"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
        assert!(out.stdout.is_empty());
    }
    let out = run_env(&["gp-optimize", "--alpha", "1"], &[("CATFORGE_THREADS", "zero")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_one() {
    let cases: &[&[&str]] = &[
        &["wigner-cut", "--state", "target-cat", "--alpha", "3", "--ygrid", "0:1:3", "--fock-dim", "4"],
        &["gp-optimize", "--alpha", "7"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let msg = String::from_utf8(out.stderr).unwrap();
        assert!(msg.starts_with("catforge: error:"), "{msg}");
    }
}
