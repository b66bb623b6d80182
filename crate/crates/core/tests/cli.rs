use std::fs;
use std::io::BufReader;
use std::path::Path;
use std::process::{Command, Output};

use keepdg::cli::snapshot::read_snapshot;

fn keepdg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_keepdg"))
        .args(args)
        .env_remove("KEEPDG_THREADS")
        .output()
        .expect("binary runs")
}

fn short_density_wave(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "run",
        "density_wave",
        "--N",
        "16",
        "--n-steps",
        "40",
        "--t-final",
        "0.004",
        "--output-every",
        "10",
        "--output-dir",
        dir.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    keepdg(&args)
}

#[test]
fn unknown_eos_lists_valid_names() {
    let out = keepdg(&["run", "density_wave", "--eos", "soave"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("ig, vdw, pr"), "{err}");
}

#[test]
fn bad_arguments_exit_with_usage_code() {
    assert_eq!(keepdg(&["launch"]).status.code(), Some(2));
    assert_eq!(keepdg(&["run", "density_wave", "--cfl", "0.1", "--n-steps", "3"]).status.code(), Some(2));
    assert_eq!(keepdg(&["run", "nozzle"]).status.code(), Some(2));
    assert_eq!(keepdg(&["verify", "everything"]).status.code(), Some(2));
}

#[test]
fn series_has_expected_columns_and_precision() {
    let dir = tempfile::tempdir().unwrap();
    let out = short_density_wave(dir.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("series.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,S_h,K_h,eps_S,eps_K,mass_total,momentum_total_1,energy_total"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 5);
    for cell in rows.iter().flatten() {
        let mantissa = cell.trim_start_matches('-').split('e').next().unwrap();
        assert_eq!(mantissa.len(), 18, "{cell}");
        cell.parse::<f64>().unwrap();
    }
    let eps: f64 = rows[4][3].parse().unwrap();
    assert!(eps < 1e-12, "{eps}");
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(short_density_wave(a.path(), &["--threads", "1"]).status.success());
    assert!(short_density_wave(b.path(), &["--threads", "3"]).status.success());
    let read = |d: &Path| fs::read(d.join("series.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn snapshots_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    assert!(short_density_wave(dir.path(), &["--snapshots"]).status.success());
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with("snapshot_"))
        .collect();
    names.sort();
    assert_eq!(names.first().map(String::as_str), Some("snapshot_00000000.bin"));
    assert_eq!(names.len(), 5);
    let file = fs::File::open(dir.path().join(names.last().unwrap())).unwrap();
    let (header, data) = read_snapshot(BufReader::new(file)).unwrap();
    assert_eq!((header.dimension, header.cells.clone()), (1, vec![16]));
    assert_eq!(data.len(), 16 * 3);
    assert!((header.time - 0.004).abs() < 1e-15, "{}", header.time);
}

#[test]
fn config_file_with_command_line_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    let out_dir = dir.path().join("out");
    fs::write(
        &config,
        format!(
            "[run]\ncase = \"density_wave\"\ncells = 12\ncfl = 0.5\nt_final = 0.0004\noutput_every = 2\noutput_dir = \"{}\"\n",
            out_dir.display()
        ),
    )
    .unwrap();
    let out = keepdg(&["run", "--config", config.to_str().unwrap(), "--n-steps", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("N = 12, 4 steps"), "{stdout}");
    let csv = fs::read_to_string(out_dir.join("series.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3);

    fs::write(&config, "[run]\ncase = \"density_wave\"\nwidth = 3\n").unwrap();
    assert_eq!(keepdg(&["run", "--config", config.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn eos_table_writes_isobar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("isobar.csv");
    let out = keepdg(&["eos-table", "--eos", "pr", "--points", "4", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = fs::read_to_string(path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "eos,T_r,T,rho,rho_r,c,cp,cp_fd");
    assert_eq!(lines.len(), 5);
    assert!(lines[1..].iter().all(|l| l.starts_with("pr,")));
}

#[test]
fn verify_suite_passes() {
    let out = keepdg(&["verify", "eos", "--samples", "40"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().all(|l| l.starts_with("[PASS]")), "{text}");
}
