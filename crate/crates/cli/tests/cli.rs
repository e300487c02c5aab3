use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn becsq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_becsq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn cfg(name: &str) -> String {
    configs().join(name).display().to_string()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV document, header row first.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

const UNCOUPLED: &str = "[effective]\ng1 = 0.0\ng2 = 0.0\nomega_prime = 1e4\nkappa = 1.0\nn_atoms = 100\n";

#[test]
fn malformed_and_ambiguous_configs_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.cfg", "[effective\nomega_prime = 1");
    assert_eq!(becsq(&["params", "--config", &bad]).status.code(), Some(2));

    let none = write(&dir, "none.cfg", "[spectrum]\ntheta = 0.1\n");
    assert_eq!(becsq(&["params", "--config", &none]).status.code(), Some(2));

    let text = std::fs::read_to_string(configs().join("experimental.cfg")).unwrap();
    let both = write(&dir, "both.cfg", &format!("{text}\n{}", UNCOUPLED));
    assert_eq!(becsq(&["params", "--config", &both]).status.code(), Some(2));

    let negative = write(
        &dir,
        "neg.cfg",
        "[effective]\nomega_prime = -1.0\nkappa = 1.0\nn_atoms = 1\n",
    );
    let o = becsq(&["params", "--config", &negative]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("effective oscillator frequency not positive"));

    assert_eq!(becsq(&["params", "--config", "/no/such/file.cfg"]).status.code(), Some(2));
    assert_eq!(becsq(&["spectrum", "--bogus"]).status.code(), Some(2));
    assert_eq!(becsq(&["spectrum", "--omega-points", "many"]).status.code(), Some(2));
}

#[test]
fn params_reports_experimental_couplings() {
    let o = becsq(&["params", "--config", &cfg("experimental.cfg"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let g = v["effective"]["g1"].as_f64().unwrap();
    let k = v["effective"]["kappa1"].as_f64().unwrap();
    assert!((g - 6.66).abs() < 0.01);
    assert!((k / g - 1.23).abs() < 0.01);
    assert_eq!(v["effective"]["unit"], "MHz");
    let checks = v["regimes"]["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"] == "excited_level_elimination" && c["passed"] == true));
}

#[test]
fn spectrum_csv_layout_and_echo() {
    let o = becsq(&["spectrum", "--config", &cfg("detuned_spectrum.cfg"), "--omega-points", "11", "--theta", "0.25"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(!text.contains('\r'));
    assert!(text.starts_with("# becsq spectrum\n"));
    assert!(text.contains("#   theta = 0.25\n"));
    assert!(text.contains("#   omega_points = 11\n"));
    let r = rows(&text);
    assert_eq!(r[0], ["omega", "S_plus", "S_minus"]);
    assert_eq!(r.len(), 12);
    assert_eq!(r[1][0], "-50");
    assert_eq!(r[11][0], "50");
    for row in &r[1..] {
        let sp: f64 = row[1].parse().unwrap();
        let sm: f64 = row[2].parse().unwrap();
        assert!((sp - sm).abs() < 1e-10);
    }
}

#[test]
fn echoed_configuration_reproduces_the_run() {
    let dir = TempDir::new().unwrap();
    let first = stdout(&becsq(&["spectrum", "--config", &cfg("large_detuning.cfg"), "--omega-points", "5"]));
    let mut echo = String::new();
    for line in first.lines() {
        if line == "# effective model:" {
            break;
        }
        if let Some(rest) = line.strip_prefix("#   ") {
            echo.push_str(rest);
            echo.push('\n');
        } else if line == "#   " {
            echo.push('\n');
        }
    }
    let again = write(&dir, "echo.cfg", &echo);
    let second = stdout(&becsq(&["spectrum", "--config", &again]));
    assert_eq!(rows(&first), rows(&second));
}

#[test]
fn spectrum_is_deterministic_across_workers() {
    let args = |w: &'static str| {
        vec!["spectrum", "--omega-points", "301", "--approx", "--workers", w]
    };
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "sym.cfg", "[effective]\nomega_prime = 1e5\nkappa = 1.0\nn_atoms = 10000\n");
    let run = |w| {
        let mut a = args(w);
        a.extend(["--config", &c]);
        becsq(&a).stdout
    };
    let one = run("1");
    assert_eq!(one, run("3"));
    assert_eq!(one, run("0"));
    assert_eq!(rows(&String::from_utf8(one).unwrap())[0], ["omega", "S_plus", "S_minus", "S_approx"]);
}

#[test]
fn uncoupled_spectrum_is_flat() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "off.cfg", UNCOUPLED);
    let o = becsq(&["spectrum", "--config", &c, "--omega-points", "41"]);
    for row in &rows(&stdout(&o))[1..] {
        let s: f64 = row[1].parse().unwrap();
        assert!((s - 1.0).abs() < 1e-12);
    }
}

#[test]
fn pole_rows_are_omitted_with_warning() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "pole.cfg", "[effective]\nomega_prime = 2.0\nkappa = 1.0\nn_atoms = 1\n");
    let o = becsq(&["spectrum", "--config", &c, "--omega-min", "-4", "--omega-max", "4", "--omega-points", "9"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("# warning: row omitted"));
    let r = rows(&text);
    // each point also needs A(−ω), so −ω′ is guarded as well
    assert_eq!(r.len(), 8);
    assert!(r.iter().all(|row| row[0] != "2" && row[0] != "-2"));
}

#[test]
fn sweep_rows() {
    let dir = TempDir::new().unwrap();
    let single = write(
        &dir,
        "one.cfg",
        "[effective]\nomega_prime = 1e4\nkappa = 1.0\nn_atoms = 10000\n[sweep]\nkappa = [2.0]\nscan_points = 101\n",
    );
    let o = becsq(&["sweep", "--config", &single]);
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o));
    assert_eq!(r[0], ["kappa_or_N", "omega_min", "S_min", "entangled"]);
    assert_eq!(r.len(), 2);
    assert_eq!(r[1][0], "2");
    assert!(r[1][3] == "true" || r[1][3] == "false");

    let o = becsq(&["sweep", "--config", &single, "--param", "N"]);
    let text = stdout(&o);
    assert!(text.contains("# swept parameter: N"));
    let r = rows(&text);
    let ns: Vec<&str> = r[1..].iter().map(|x| x[0].as_str()).collect();
    assert_eq!(ns, ["100", "1000", "10000"]);
}

#[test]
fn evolve_reports() {
    let o = becsq(&["evolve", "--chi-tau", "0", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pair_amplitude"]["re"], 0.0);
    assert_eq!(v["pair_amplitude"]["im"], 0.0);
    assert_eq!(v["entanglement_entropy"], 0.0);

    let o = becsq(&["evolve", "--chi-tau", "0.3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["fidelity_closed_vs_numeric"].as_f64().unwrap() >= 1.0 - 1e-8);
    assert_eq!(v["converged"], true);

    let dir = TempDir::new().unwrap();
    let c = write(&dir, "small.cfg", "[effective]\nomega_prime = 1000.0\nkappa = 1.0\nn_atoms = 100\n");
    let o = becsq(&["evolve", "--config", &c, "--chi-tau", "0.2", "--three-mode", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let t = &v["three_mode"];
    assert!(t["fidelity_with_closed_form"].as_f64().unwrap() >= 0.99);
    assert!(t["charge_mean"].as_f64().unwrap().abs() < 1e-10);

    let text = stdout(&becsq(&["evolve"]));
    assert!(text.contains("fidelity closed vs numeric"));
}

#[test]
fn evolve_flags_unconverged_truncation() {
    let dir = TempDir::new().unwrap();
    let c = write(
        &dir,
        "tight.cfg",
        "[effective]\nomega_prime = 1e4\nkappa = 1.0\nn_atoms = 10000\n[evolve]\nchi_tau = 2.0\nn_max = 3\n",
    );
    assert_eq!(becsq(&["evolve", "--config", &c]).status.code(), Some(1));
}

#[test]
fn validate_exit_codes() {
    let o = becsq(&["validate", "--omega-points", "201"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = becsq(&["validate", "--omega-points", "201", "--flip-drift-sign"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL bogoliubov_identities"));
    let o = becsq(&["validate", "--format", "json", "--omega-points", "21"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
}

#[test]
fn output_file_and_plot_script() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("s.csv");
    let script = dir.path().join("plot.py");
    let o = becsq(&[
        "spectrum",
        "--omega-points",
        "5",
        "--out",
        csv.to_str().unwrap(),
        "--plot-script",
        script.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&csv).unwrap().contains("omega,S_plus,S_minus\n"));
    let py = std::fs::read_to_string(&script).unwrap();
    assert!(py.contains("import matplotlib"));
    assert!(py.contains(csv.to_str().unwrap()));

    let o = becsq(&["sweep", "--plot-script", script.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
