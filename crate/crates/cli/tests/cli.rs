use std::path::Path;
use std::process::{Command, Output};

fn liability(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liability"))
        .args(args)
        .env("LIABILITY_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn show_thresholds_at_reference_parameters() {
    let o = liability(&["show-thresholds", "--beta", "9/13", "--py", "0.75"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("p_x* = 0.750000000000"), "{text}");
    assert!(text.contains("F^u(p_x*) = 1.250000000000"), "{text}");
    assert!(text.contains("F^b(p_x*) = 1.250000000000"), "{text}");
}

#[test]
fn bundled_sweep_writes_table_and_jumps() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig2a.csv");
    let o = liability(&["sweep", "fig2a", "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(&out).unwrap();
    assert_eq!(table.lines().count(), 402);
    assert!(table.starts_with("mode,axis,value,beta,p_x,p_y,gamma,gamma_bar,case,"));
    let jumps = std::fs::read_to_string(dir.path().join("fig2a.jumps.csv")).unwrap();
    let rows: Vec<&str> = jumps.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("subjective,p_x,0.751,"));
    assert!(rows[0].contains(",down,"));
}

#[test]
fn sweep_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(liability(&["sweep", "fig3b", "--out", path(&a)])
        .status
        .success());
    let o = Command::new(env!("CARGO_BIN_EXE_liability"))
        .args(["sweep", "fig3b", "--out", path(&b)])
        .env("LIABILITY_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn scenario_file_and_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("tiny.toml");
    std::fs::write(
        &file,
        "modes = [\"subjective\", \"ex-post\"]\noutputs = [\"jumps\"]\n\
         [base]\nbeta = \"9/13\"\np_x = 0.75\np_y = 0.75\ngamma = 0.55\nloss = 1\n\
         [sweep]\naxis = \"gamma\"\nstart = 0.6\nstop = 0.9\nstep = 0.1\n",
    )
    .unwrap();
    let out = dir.path().join("tiny.csv");
    let o = liability(&["sweep", path(&file), "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("tiny: 8 rows"));
    assert!(out.exists());

    std::fs::write(&file, "modes = []\n").unwrap();
    let o = liability(&["sweep", path(&file), "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let o = liability(&["sweep", "no-such-scenario", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn region_map_contains_reference_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("region.csv");
    let o = liability(&[
        "region-map",
        "--beta",
        "9/13",
        "--step",
        "0.05",
        "--out",
        path(&out),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("kind,p_x,p_y,case,delta,delta_sign\n"));
    assert!(text
        .lines()
        .any(|l| l.starts_with("locus,0.75,0.75,either-positive,")));
}

#[test]
fn verify_reports_every_property() {
    let o = liability(&["verify", "--trials", "20", "--seed", "4"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS ")).count(), 11);
    let o = liability(&["verify", "--trials", "5", "--property", "no-such-property"]);
    assert_eq!(o.status.code(), Some(2));
}
