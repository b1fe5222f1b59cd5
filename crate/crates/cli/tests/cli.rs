use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_splinegabor"));
    c.env_remove("SPLINEGABOR_OUT");
    c
}

fn run(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("binary runs");
    assert!(
        out.status.success(),
        "exit {:?}\nstdout:\n{}\nstderr:\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn small_run(out: &Path) -> Command {
    let mut c = bin();
    c.args(["run", "--points", "121", "--budgets", "10,40", "--out"]).arg(out);
    c
}

#[test]
fn run_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("res");
    let stdout = String::from_utf8(run(&mut small_run(&out)).stdout).unwrap();
    assert!(stdout.contains("cylinder-k5-dual2: N =    10"), "{stdout}");

    let errors = read(&out.join("errors_N40.csv"));
    let mut lines = errors.lines();
    assert_eq!(lines.next(), Some("x,re_ref,im_ref,re_approx,im_approx,rel_err"));
    assert_eq!(lines.count(), 121);
    assert!(out.join("errors_N10.csv").exists());

    let coefficients = read(&out.join("coefficients.csv"));
    let mut lines = coefficients.lines();
    assert_eq!(lines.next(), Some("rank,m,n,abs_coeff"));
    let mags: Vec<f64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert!(!mags.is_empty());
    // ties within the 1e-9 relative tolerance go to the lower index
    assert!(mags.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)));

    let summary = read(&out.join("summary.csv"));
    assert!(summary.starts_with("experiment,target,k,method,budget,mean_rel_err,l2_rel_err,max_rel_err\n"));
    assert_eq!(summary.lines().count(), 3);

    let plot = read(&out.join("plot.gp"));
    assert!(plot.contains("'errors_N10.csv'") && plot.contains("'coefficients.csv'"));
}

#[test]
fn identical_runs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        run(small_run(out).args(["--method", "omp", "--blocksize", "5"]));
    }
    for file in ["errors_N10.csv", "errors_N40.csv", "coefficients.csv", "summary.csv", "plot.gp"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }
    let rows = read(&a.join("coefficients.csv")).lines().count() - 1;
    assert_eq!(rows, 40);
}

#[test]
fn inadmissible_parameters_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["--b", "0.5"],
        vec!["--a", "3", "--order", "2"],
        vec!["--budgets", "0"],
        vec!["--k=-1"],
    ] {
        let out = small_run(&dir.path().join("x")).args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains("configuration error"), "{args:?}: {err}");
    }
    let out = small_run(&dir.path().join("x")).args(["--b", "0.5"]).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stderr).contains("admissible interval"));

    let out = bin().args(["run", "--method", "fourier"]).output().unwrap();
    assert!(!out.status.success());
    assert!(!dir.path().join("x").exists());
}

#[test]
fn config_file_sections_become_experiments() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(
        &cfg,
        r#"
out = "from-file"

[defaults]
points = 121
b = "1/3"
budgets = [10, 20]

[experiment.dual]
method = "dual1"

[experiment.greedy]
target = "point-source"
method = "omp-functional"
blocksize = 5
"#,
    )
    .unwrap();
    let out = dir.path().join("res");
    run(bin().arg("run").arg("--config").arg(&cfg).arg("--out").arg(&out));
    for name in ["dual", "greedy"] {
        assert!(out.join(name).join("errors_N20.csv").exists(), "{name}");
    }
    let summary = read(&out.join("summary.csv"));
    assert_eq!(summary.lines().count(), 5);
    assert!(summary.contains("greedy,point-source,5,OMP-functional(5),20,"));
    assert!(summary.contains("dual,cylinder,5,Dual1,10,"));

    // without --out the file decides, relative to the working directory
    run(bin().current_dir(dir.path()).arg("run").arg("--config").arg(&cfg).args(["--budgets", "10"]));
    assert!(dir.path().join("from-file/dual/errors_N10.csv").exists());
}

#[test]
fn environment_sets_the_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("env-out");
    run(bin()
        .env("SPLINEGABOR_OUT", &out)
        .args(["run", "--points", "121", "--budgets", "10", "--no-extend"]));
    assert!(out.join("errors_N10.csv").exists());
}

#[test]
fn bad_config_files_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    for text in ["[defaults]\nwavenumber = 5\n", "[defaults]\nk = \"five\"\n", "[experiment.x]\nmethod = \"fourier\"\n", "not toml ["] {
        fs::write(&cfg, text).unwrap();
        let out = bin().arg("run").arg("--config").arg(&cfg).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{text}");
    }
    let out = bin().args(["run", "--config"]).arg(dir.path().join("missing.toml")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn table1_has_every_cell() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t");
    let stdout = String::from_utf8(run(bin().arg("table1").arg("--out").arg(&out)).stdout).unwrap();
    assert!(stdout.contains("OMP(20)"), "{stdout}");

    let table = read(&out.join("table1.csv"));
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("target,k,method,N60,N120,N240"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 8);
    let mut cells = 0;
    for row in &rows {
        let v: Vec<f64> = row[3..].iter().map(|s| s.parse().unwrap()).collect();
        assert!(v.iter().all(|x| x.is_finite() && *x > 0.0), "{row:?}");
        cells += v.len();
        if row[2] == "Dual2" {
            assert!(v[0] > v[1] && v[1] > v[2], "{row:?}");
        }
    }
    assert_eq!(cells, 24);
    assert_eq!(read(&out.join("table1_l2.csv")).lines().count(), 9);
}
