use std::path::Path;
use std::process::{Command, Output};

const SMALL: &[&str] = &[
    "--set",
    "Lambda_integral=200",
    "--set",
    "N_integral=2",
    "--set",
    "N_int_angle=3",
    "--set",
    "Start=0",
    "--set",
    "End=300",
    "--set",
    "N_m_prime=12",
];

fn mspec(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mspec"));
    cmd.args(args).env_remove("MSPEC_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("mspec runs")
}

fn spectrum(out: &Path, extra: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut args = vec!["spectrum", "--out", out.to_str().unwrap()];
    args.extend_from_slice(SMALL);
    args.extend_from_slice(extra);
    mspec(&args, envs)
}

#[test]
fn spectrum_writes_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("muon.csv");
    let run = spectrum(&out, &["--reference-mass", "105.7"], &[]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("m_prime,sigma"));
    let rows: Vec<_> = csv.lines().skip(1).filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 12);
    assert!(csv.contains("# process = qed-lepton"));
    assert!(csv.contains("#peak,rank,mass,height,prominence,deviation_percent"));
    let plot = std::fs::read_to_string(dir.path().join("muon.csv.plot")).unwrap();
    assert!(plot.contains("muon.csv"));
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("qed-lepton spectrum, 12 bins"));
}

#[test]
fn peaks_reread_matches_spectrum_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let first = spectrum(&out, &[], &[]);
    assert!(first.status.success());
    let again = mspec(&["peaks", out.to_str().unwrap()], &[]);
    assert!(again.status.success());
    let table = String::from_utf8_lossy(&first.stdout);
    let body: String = table.lines().skip(1).map(|l| format!("{l}\n")).collect();
    assert_eq!(String::from_utf8_lossy(&again.stdout), body);
}

#[test]
fn csv_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (
        dir.path().join("a.csv"),
        dir.path().join("b.csv"),
        dir.path().join("c.csv"),
    );
    assert!(spectrum(&a, &["--threads", "1"], &[]).status.success());
    assert!(spectrum(&b, &["--threads", "4"], &[]).status.success());
    assert!(spectrum(&c, &[], &[("MSPEC_THREADS", "3")]).status.success());
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert_eq!(bytes, std::fs::read(&c).unwrap());
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let run = spectrum(&out, &["--set", "End=-1"], &[]);
    assert_eq!(run.status.code(), Some(2));
    assert!(!out.exists());
    let run = spectrum(&out, &["--set", "colour=red"], &[]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("colour"));
    let run = spectrum(&out, &[], &[("MSPEC_THREADS", "many")]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn config_file_is_read() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("z.cfg");
    std::fs::write(
        &cfg,
        "// weak process\nprocess = z-boson;\ndouble Lambda_integral = 2000;\nN_integral = 1\nN_int_angle = 3\n\
         Start = 1000\nEnd = 3000\nN_m_prime = 4\n",
    )
    .unwrap();
    let out = dir.path().join("z.csv");
    let run = mspec(
        &[
            "spectrum",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ],
        &[],
    );
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.contains("# process = z-boson"));
    let missing = mspec(
        &["spectrum", "--config", dir.path().join("none").to_str().unwrap()],
        &[],
    );
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn peaks_of_missing_file_is_io_error() {
    let run = mspec(&["peaks", "/nonexistent/spectrum.csv"], &[]);
    assert_eq!(run.status.code(), Some(3));
}

#[test]
fn verify_and_oracle_pass() {
    let run = mspec(&["verify", "--trials", "200", "--seed", "7"], &[]);
    assert!(run.status.success());
    let text = String::from_utf8_lossy(&run.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 4, "{text}");
    let run = mspec(&["oracle", "--trials", "50"], &[]);
    assert!(run.status.success());
    assert_eq!(
        String::from_utf8_lossy(&run.stdout)
            .lines()
            .filter(|l| l.starts_with("PASS"))
            .count(),
        2
    );
}
