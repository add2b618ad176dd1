use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;
use wigstat_cli::{read_csv, write_csv, Value};

fn wigstat(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wigstat"))
        .args(args)
        .arg("--out-dir")
        .arg(out_dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn data_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

#[test]
fn unknown_system_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = wigstat(&["value-stats", "--system", "baker"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("baker"), "{}", stderr(&out));
    assert!(
        stderr(&out).to_lowercase().contains("usage"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = wigstat(&["spectrogram"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn inconsistent_config_exits_with_two_and_writes_nothing() {
    let dir = TempDir::new().unwrap();
    let out = wigstat(&["relaxation", "--N", "100"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("odd"), "{}", stderr(&out));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn unwritable_output_exits_with_one() {
    let dir = TempDir::new().unwrap();
    let blocker = dir.path().join("occupied");
    fs::write(&blocker, "not a directory").unwrap();
    let out = wigstat(&["relaxation", "--N", "21", "--t-max", "2"], &blocker);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
}

#[test]
fn help_exits_cleanly() {
    let out = Command::new(env!("CARGO_BIN_EXE_wigstat"))
        .arg("--help")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    for sub in [
        "evolve",
        "value-stats",
        "relaxation",
        "autocorr",
        "eigen-excess",
        "goe-excess",
        "wfl-stats",
        "clusters",
    ] {
        assert!(stdout(&out).contains(sub), "help lists {sub}");
    }
}

#[test]
fn empty_table_has_only_headers() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("empty.csv");
    write_csv(
        &path,
        "run 1\nseed 3",
        &["t", "x"],
        Vec::<Vec<Value>>::new(),
    )
    .unwrap();
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text, "# run 1\n# seed 3\nt,x\n");
    let table = read_csv(&path).unwrap();
    assert_eq!(table.header, vec!["run 1", "seed 3"]);
    assert!(table.rows.is_empty());
}

#[test]
fn one_row_gives_two_lines_after_the_header() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("one.csv");
    write_csv(
        &path,
        "h",
        &["t", "x"],
        [vec![Value::Int(1), Value::Real(0.5)]],
    )
    .unwrap();
    let lines = data_lines(&path);
    assert_eq!(lines, vec!["t,x", "1,5.0000000000000000e-1"]);
}

#[test]
fn mismatched_row_width_is_an_error() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.csv");
    assert!(write_csv(&path, "h", &["t", "x"], [vec![Value::Int(1)]]).is_err());
}

#[test]
fn reals_round_trip_bit_for_bit() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("round.csv");
    let mut values = vec![
        0.1,
        1.0 / 3.0,
        -2.0_f64.sqrt(),
        f64::MAX,
        f64::MIN_POSITIVE,
        5e-324,
        -0.0,
        1e300,
        std::f64::consts::PI,
    ];
    // A deterministic spread of awkward mantissas.
    let mut x = 0.7390851332151607_f64;
    for _ in 0..200 {
        x = (x * 1e7).sin() * 10f64.powi(((x * 1e3) as i32 % 40) - 20);
        values.push(x);
    }
    let rows = values
        .iter()
        .enumerate()
        .map(|(i, &v)| vec![Value::from(i), Value::Real(v)]);
    write_csv(&path, "round trip", &["i", "v"], rows).unwrap();
    let table = read_csv(&path).unwrap();
    assert_eq!(table.rows.len(), values.len());
    for (row, v) in table.rows.iter().zip(&values) {
        assert_eq!(row[1].to_bits(), v.to_bits(), "{v:e}");
    }
}

#[test]
fn relaxation_writes_series_and_summary() {
    let dir = TempDir::new().unwrap();
    let out = wigstat(
        &[
            "relaxation",
            "--system",
            "sawtooth",
            "--N",
            "243",
            "--K0",
            "0.5",
            "--L",
            "1",
            "--init",
            "coherent:q=2.0944,p=1.0472",
            "--t-max",
            "20",
            "--seed",
            "7",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let summary = stdout(&out);
    assert!(
        summary.contains("t_r=") && summary.contains("t_c="),
        "{summary}"
    );
    let table = read_csv(&dir.path().join("relaxation.csv")).unwrap();
    assert_eq!(table.columns, vec!["t", "excess", "neg_fraction"]);
    assert_eq!(table.rows.len(), 21);
    assert!(table.header.iter().any(|h| h.starts_with("config {")));
    assert!(table.header.iter().any(|h| h == "seed 7"));
    assert!(table.header.iter().any(|h| h.starts_with("generated")));
    // The coherent start is far from Gaussian and the chaotic end close to it.
    assert!(table.rows[0][1] > 1.0);
    assert!(table.rows[20][1].abs() < 0.5);
}

#[test]
fn kicked_top_eigen_excess_has_one_row_per_eigenstate() {
    let dir = TempDir::new().unwrap();
    let out = wigstat(
        &[
            "eigen-excess",
            "--system",
            "kicked-top",
            "--J",
            "50",
            "--alpha",
            "10",
            "--gamma",
            "1.5707963",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let table = read_csv(&dir.path().join("eigen_excess.csv")).unwrap();
    assert_eq!(table.columns, vec!["k", "omega", "excess"]);
    assert_eq!(table.rows.len(), 101);
    for (k, row) in table.rows.iter().enumerate() {
        assert_eq!(row[0], k as f64);
        assert!((0.0..2.0 * std::f64::consts::PI).contains(&row[1]));
    }
    let cdf = read_csv(&dir.path().join("eigen_excess_cdf.csv")).unwrap();
    assert_eq!(cdf.rows.len(), 101);
    assert_eq!(cdf.rows[100][1], 1.0);
}

fn assert_deterministic(args: &[&str]) {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let mut full = args.to_vec();
    full.push("--no-timestamp");
    for dir in [&a, &b] {
        let out = wigstat(&full, dir.path());
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", stderr(&out));
    }
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(!names.is_empty());
    for name in names {
        let (x, y) = (
            fs::read(a.path().join(&name)).unwrap(),
            fs::read(b.path().join(&name)).unwrap(),
        );
        assert!(x == y, "{args:?}: {name:?} differs between runs");
        assert!(!String::from_utf8(x).unwrap().contains("generated"));
    }
}

#[test]
fn runs_are_byte_identical_for_equal_config_and_seed() {
    assert_deterministic(&[
        "relaxation",
        "--N",
        "81",
        "--t-max",
        "8",
        "--init",
        "random",
        "--seed",
        "3",
    ]);
    assert_deterministic(&[
        "clusters",
        "--system",
        "random-model",
        "--N",
        "51",
        "--ensemble",
        "12",
        "--seed",
        "5",
    ]);
    assert_deterministic(&[
        "wfl-stats",
        "--system",
        "random-model",
        "--N",
        "41",
        "--ensemble",
        "50",
        "--bins",
        "20",
    ]);
    assert_deterministic(&[
        "goe-excess",
        "--N",
        "31",
        "--realizations",
        "3",
        "--seed",
        "9",
    ]);
    assert_deterministic(&[
        "autocorr",
        "--system",
        "random-model",
        "--N",
        "31",
        "--ensemble",
        "6",
    ]);
}

#[test]
fn every_subcommand_produces_its_tables() {
    let cases: &[(&[&str], &[&str])] = &[
        (
            &["evolve", "--N", "21", "--t-max", "2"],
            &["evolve_t0000.csv", "evolve_t0002.csv"],
        ),
        (
            &[
                "evolve",
                "--system",
                "kicked-top",
                "--J",
                "3",
                "--t-max",
                "1",
            ],
            &["evolve_t0001.csv"],
        ),
        (
            &["value-stats", "--N", "21", "--t-max", "3"],
            &["value_stats.csv", "value_hist.csv"],
        ),
        (
            &["autocorr", "--N", "31", "--t-max", "5"],
            &["autocorr_grid.csv", "autocorr_radial.csv"],
        ),
        (
            &["eigen-excess", "--N", "31", "--K0", "1"],
            &["eigen_excess.csv", "eigen_excess_cdf.csv"],
        ),
        (
            &[
                "goe-excess",
                "--geometry",
                "sphere",
                "--J",
                "5",
                "--realizations",
                "2",
            ],
            &["goe_excess.csv"],
        ),
        (
            &["wfl-stats", "--N", "31", "--K0", "10", "--t-max", "12"],
            &[
                "wfl_spacing.csv",
                "wfl_amplitude.csv",
                "wfl_joint.csv",
                "wfl_modes.csv",
            ],
        ),
        (
            &[
                "wfl-stats",
                "--system",
                "kicked-top",
                "--J",
                "10",
                "--t-max",
                "15",
            ],
            &["wfl_spacing.csv"],
        ),
        (
            &["clusters", "--N", "31", "--K0", "2", "--t-max", "12"],
            &["clusters.csv", "cluster_amplitude.csv"],
        ),
    ];
    for (args, files) in cases {
        let dir = TempDir::new().unwrap();
        let out = wigstat(args, dir.path());
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", stderr(&out));
        for file in *files {
            let table = read_csv(&dir.path().join(file))
                .unwrap_or_else(|e| panic!("{args:?}: {file}: {e}"));
            assert!(!table.rows.is_empty(), "{args:?}: {file} is empty");
        }
    }
}

#[test]
fn output_directory_defaults_to_the_environment() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_wigstat"))
        .args(["goe-excess", "--N", "11", "--realizations", "1"])
        .env("WIGSTAT_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(dir.path().join("goe_excess.csv").exists());
}

#[test]
fn random_state_lines_reproduce_the_mode_variances() {
    let dir = TempDir::new().unwrap();
    let out = wigstat(
        &[
            "wfl-stats",
            "--system",
            "random-model",
            "--source",
            "states",
            "--N",
            "41",
            "--ensemble",
            "200",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let table = read_csv(&dir.path().join("wfl_modes.csv")).unwrap();
    assert_eq!(
        table.columns,
        vec!["q", "var_u", "var_v", "model_var_u", "model_var_v"]
    );
    assert_eq!(table.rows.len(), 21);
    // 200 states x 41 lines; the flat torus profile is 2/(N-1) = 0.05.
    for row in &table.rows[1..] {
        assert_eq!(row[3], 0.05);
        assert!((row[1] / row[3] - 1.0).abs() < 0.15, "{row:?}");
        assert!((row[2] / row[4] - 1.0).abs() < 0.15, "{row:?}");
    }
}
