use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn qrm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrm"))
        .args(args)
        .output()
        .expect("binary runs")
}

struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn read(path: &Path) -> Self {
        let text = std::fs::read_to_string(path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# hbar=1, dimensionless"));
        let header = lines
            .next()
            .unwrap()
            .split(',')
            .map(str::to_string)
            .collect();
        let rows = lines
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect();
        Self { header, rows }
    }

    fn column(&self, name: &str) -> Vec<f64> {
        let k = self
            .header
            .iter()
            .position(|h| h == name)
            .unwrap_or_else(|| panic!("no column {name} in {:?}", self.header));
        self.rows.iter().map(|r| r[k].parse().unwrap()).collect()
    }
}

fn run_to_csv(dir: &TempDir, name: &str, args: &[&str]) -> (Output, PathBuf) {
    let out = dir.path().join(name);
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--out", out.to_str().unwrap()]);
    (qrm(&full), out)
}

fn assert_code(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn verify_default_passes() {
    let dir = TempDir::new().unwrap();
    let (output, path) = run_to_csv(&dir, "verify.csv", &["verify"]);
    assert_code(&output, 0);
    let csv = Csv::read(&path);
    assert_eq!(csv.header, ["identity", "residual", "tolerance", "passed"]);
    assert!(csv.rows.len() >= 30);
    // Identity names may contain commas, so read `passed` from the end.
    assert!(csv.rows.iter().all(|r| r.last().unwrap() == "true"));
    assert!(String::from_utf8_lossy(&output.stdout).contains("worst residual"));
}

#[test]
fn verify_at_machine_epsilon_tolerance_fails() {
    let dir = TempDir::new().unwrap();
    let (output, path) = run_to_csv(
        &dir,
        "verify.csv",
        &["verify", "--cutoff", "16", "--tolerance", "1e-16"],
    );
    assert_code(&output, 1);
    let csv = Csv::read(&path);
    assert!(csv.rows.iter().any(|r| r.last().unwrap() == "false"));
}

#[test]
fn verify_minimal_cutoff_passes() {
    let dir = TempDir::new().unwrap();
    let (output, _) = run_to_csv(&dir, "verify.csv", &["verify", "--cutoff", "1"]);
    assert_code(&output, 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_code(&qrm(&["verify", "--bogus"]), 2);
    assert_code(&qrm(&["teleport"]), 2);
    assert_code(&qrm(&["evolve", "--initial", "x9"]), 2);
    assert_code(&qrm(&["evolve", "--model", "nonsense"]), 2);
    assert_code(&qrm(&["compare", "--against", "nonsense"]), 2);
    assert_code(&qrm(&["verify", "--cutoff", "0"]), 2);
    assert_code(&qrm(&["verify", "--g", "-1"]), 2);
    assert_code(&qrm(&["evolve", "--steps", "0"]), 2);

    let dir = TempDir::new().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(&config, r#"{"cutoff": 8, "colour": "blue"}"#).unwrap();
    assert_code(&qrm(&["verify", "--config", config.to_str().unwrap()]), 2);
    assert_code(&qrm(&["verify", "--config", "/nonexistent/run.json"]), 2);
    assert_code(
        &qrm(&["evolve", "--model", "bosonic-closed", "--omega", "0"]),
        2,
    );
}

#[test]
fn cutoff_guard_refuses_with_required_size() {
    let output = qrm(&["evolve", "--cutoff", "10", "--g", "1.0"]);
    assert_code(&output, 3);
    assert!(String::from_utf8_lossy(&output.stderr).contains("N_max >= 40"));
    assert_code(&qrm(&["spectrum", "--cutoff", "20", "--g", "0.5"]), 3);
    assert_code(
        &qrm(&["compare", "--cutoff", "20", "--initial", "coh:e:1.0"]),
        3,
    );
}

#[test]
fn unwritable_output_exits_four() {
    assert_code(
        &qrm(&[
            "verify",
            "--cutoff",
            "2",
            "--out",
            "/nonexistent/dir/out.csv",
        ]),
        4,
    );
}

#[test]
fn print_config_lists_every_default() {
    let output = qrm(&["evolve", "--print-config", "--g", "0.2"]);
    assert_code(&output, 0);
    let value: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    for key in [
        "params",
        "cutoff",
        "grid",
        "initial",
        "model",
        "against",
        "out",
        "tolerance",
        "fermionic_factor",
        "vacuum_energy",
        "dump_states",
    ] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
    assert_eq!(value["params"]["g"], 0.2);
    assert_eq!(value["fermionic_factor"], "paper_2g");
}

#[test]
fn coupling_evolution_reaches_g_squared_t_squared() {
    let dir = TempDir::new().unwrap();
    for model in ["coupling", "coupling-closed"] {
        let args = [
            "evolve", "--model", model, "--g", "0.2", "--t1", "3", "--steps", "30",
        ];
        let (output, path) = run_to_csv(&dir, &format!("{model}.csv"), &args);
        assert_code(&output, 0);
        let n = Csv::read(&path).column("photon_number");
        assert_eq!(n.len(), 31);
        assert!(
            (n.last().unwrap() - 0.36).abs() < 1e-8,
            "{model}: {}",
            n.last().unwrap()
        );
    }
}

#[test]
fn bosonic_evolution_photon_number_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    for model in ["bosonic", "bosonic-closed"] {
        let args = [
            "evolve", "--model", model, "--omega", "1", "--g", "0.3", "--steps", "64",
        ];
        let (output, path) = run_to_csv(&dir, &format!("{model}.csv"), &args);
        assert_code(&output, 0);
        let csv = Csv::read(&path);
        for (t, n) in csv.column("t").iter().zip(csv.column("photon_number")) {
            let want = 4.0 * 0.3f64.powi(2) * (0.5 * t).sin().powi(2);
            assert!((n - want).abs() < 1e-8, "{model} t={t}");
        }
        assert!(csv.column("quadrature").iter().all(|x| x.abs() < 1e-10));
    }
}

#[test]
fn effective_fermionic_from_excited_vacuum_is_frozen() {
    let dir = TempDir::new().unwrap();
    let (output, path) = run_to_csv(
        &dir,
        "fermionic.csv",
        &["evolve", "--model", "effective-fermionic"],
    );
    assert_code(&output, 0);
    let csv = Csv::read(&path);
    assert!(csv.column("drive_x").iter().all(|x| x.abs() < 1e-10));
    assert!(csv
        .column("sigma_z")
        .iter()
        .all(|z| (z - 1.0).abs() < 1e-10));
}

#[test]
fn effective_fermionic_factor_switch_changes_dynamics() {
    let dir = TempDir::new().unwrap();
    let base = [
        "evolve",
        "--model",
        "effective-fermionic",
        "--initial",
        "+0",
        "--cutoff",
        "40",
    ];
    let (a, pa) = run_to_csv(&dir, "a.csv", &base);
    let mut alt = base.to_vec();
    alt.extend(["--fermionic-factor", "substitution_g"]);
    let (b, pb) = run_to_csv(&dir, "b.csv", &alt);
    assert_code(&a, 0);
    assert_code(&b, 0);
    let (za, zb) = (
        Csv::read(&pa).column("sigma_z"),
        Csv::read(&pb).column("sigma_z"),
    );
    assert!(za.iter().zip(&zb).any(|(x, y)| (x - y).abs() > 1e-3));
}

#[test]
fn compare_identical_matrices_give_unit_fidelity() {
    let dir = TempDir::new().unwrap();
    let cases: [&[&str]; 2] = [
        &[
            "compare",
            "--model",
            "full",
            "--against",
            "bosonic",
            "--omega0",
            "0",
        ],
        &[
            "compare",
            "--model",
            "full",
            "--against",
            "transform",
            "--g",
            "0",
        ],
    ];
    for (k, args) in cases.iter().enumerate() {
        let (output, path) = run_to_csv(&dir, &format!("c{k}.csv"), args);
        assert_code(&output, 0);
        assert!(Csv::read(&path)
            .column("fidelity")
            .iter()
            .all(|f| (f - 1.0).abs() < 1e-10));
    }
}

#[test]
fn compare_full_against_coupling_regression() {
    let dir = TempDir::new().unwrap();
    let args = [
        "compare",
        "--model",
        "full",
        "--against",
        "coupling",
        "--cutoff",
        "40",
        "--steps",
        "100",
    ];
    let (output, path) = run_to_csv(&dir, "c.csv", &args);
    assert_code(&output, 0);
    let csv = Csv::read(&path);
    assert_eq!(
        csv.header,
        [
            "t",
            "fidelity",
            "photon_number_full",
            "sigma_z_full",
            "photon_number_coupling",
            "sigma_z_coupling"
        ]
    );
    let min = csv
        .column("fidelity")
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    assert!(min < 1.0);
    assert!(
        (min - FULL_VS_COUPLING_MIN).abs() < 1e-9,
        "min fidelity {min:.16}"
    );
}

// (ω, ω0, g) = (1, 0.8, 0.3) from |e,0⟩ over one period, 101 samples.
const FULL_VS_COUPLING_MIN: f64 = 0.0558638070769244;

#[test]
fn spectrum_of_bosonic_model_is_displaced_ladder() {
    let dir = TempDir::new().unwrap();
    let args = [
        "spectrum", "--model", "bosonic", "--omega", "1", "--g", "0.4", "--cutoff", "60",
    ];
    let (output, path) = run_to_csv(&dir, "s.csv", &args);
    assert_code(&output, 0);
    let csv = Csv::read(&path);
    assert_eq!(csv.header, ["parity", "index", "energy"]);
    for sector in ["+1", "-1"] {
        let energies: Vec<f64> = csv
            .rows
            .iter()
            .filter(|r| r[0] == sector)
            .map(|r| r[2].parse().unwrap())
            .collect();
        assert_eq!(energies.len(), 61);
        for (n, e) in energies.iter().take(10).enumerate() {
            assert!((e - (n as f64 - 0.16)).abs() < 1e-8, "{sector} n={n}: {e}");
        }
    }
}

#[test]
fn spectrum_without_coupling_is_bare_ladder() {
    let dir = TempDir::new().unwrap();
    let (output, path) = run_to_csv(&dir, "s.csv", &["spectrum", "--g", "0", "--cutoff", "20"]);
    assert_code(&output, 0);
    let csv = Csv::read(&path);
    let sector = |label: &str| -> Vec<f64> {
        csv.rows
            .iter()
            .filter(|r| r[0] == label)
            .map(|r| r[2].parse().unwrap())
            .collect()
    };
    // |e,0⟩ (energy +ω0/2) is parity-even; |g,0⟩ (energy −ω0/2) is parity-odd.
    assert!(sector("+1").iter().any(|e| (e - 0.4).abs() < 1e-12));
    assert!(sector("-1").iter().any(|e| (e + 0.4).abs() < 1e-12));
    let mut all: Vec<f64> = sector("+1").into_iter().chain(sector("-1")).collect();
    all.sort_by(f64::total_cmp);
    let mut want: Vec<f64> = (0..=20)
        .flat_map(|n| [n as f64 - 0.4, n as f64 + 0.4])
        .collect();
    want.sort_by(f64::total_cmp);
    for (e, w) in all.iter().zip(&want) {
        assert!((e - w).abs() < 1e-12);
    }

    let (shifted, path) = run_to_csv(
        &dir,
        "v.csv",
        &["spectrum", "--g", "0", "--cutoff", "20", "--vacuum-energy"],
    );
    assert_code(&shifted, 0);
    let lowest = Csv::read(&path)
        .column("energy")
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    assert!((lowest - 0.1).abs() < 1e-12);
}

#[test]
fn flags_override_config_file() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(
        &config,
        r#"{"params": {"g": 0.9}, "cutoff": 12, "grid": {"t0": 0, "t1": 1, "steps": 4}}"#,
    )
    .unwrap();
    let output = qrm(&[
        "evolve",
        "--config",
        config.to_str().unwrap(),
        "--g",
        "0.1",
        "--print-config",
    ]);
    assert_code(&output, 0);
    let value: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(value["params"]["g"], 0.1);
    assert_eq!(value["cutoff"], 12);
    assert_eq!(value["grid"]["steps"], 4);
}

#[test]
fn dump_states_adds_amplitude_columns() {
    let dir = TempDir::new().unwrap();
    let args = ["evolve", "--cutoff", "30", "--steps", "5", "--dump-states"];
    let (output, path) = run_to_csv(&dir, "d.csv", &args);
    assert_code(&output, 0);
    let csv = Csv::read(&path);
    assert_eq!(csv.header.len(), 1 + 5 + 2 * 62);
    let re0 = csv.column("re_0");
    assert!((re0[0] - 1.0).abs() < 1e-12);
}

#[test]
fn csv_output_to_stdout() {
    let output = qrm(&["verify", "--cutoff", "2"]);
    assert_code(&output, 0);
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.starts_with("# hbar=1, dimensionless\nidentity,residual,tolerance,passed\n"));
    assert!(!text.contains('\r'));
}
