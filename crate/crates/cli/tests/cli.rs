use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cubicrx::detection::{optimize_threshold, BitConditionedLaw, Law, ThresholdSearch};
use cubicrx::lp3::Lp3Params;
use cubicrx::Bit;
use cubicrx_cli::{exit, CliError};
use tempfile::TempDir;

fn cubicrx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubicrx")).args(args).output().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV, split into fields.
fn rows(text: &str) -> Vec<Vec<String>> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema=1"));
    lines.next().unwrap();
    lines.map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn analytic_sweep_row_count() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "sweep.cfg",
        "prd = 25\nsweep = p_r_dbm\nsweep_start = 30dBm\nsweep_stop = 34dBm\nsweep_step = 2\n\
         variants = lp3, gauss_approx\n",
    );
    let out = dir.path().join("sweep.csv");
    let o = cubicrx(&["ber-sweep", "--config", s(&cfg), "--out", s(&out), "--analytic-only"]);
    assert_eq!(o.status.code(), Some(exit::OK), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "x_value,x_kind,prd,rl_ohm,variant,th_opt,ber,error");
    let r = rows(&text);
    assert_eq!(r.len(), 6);
    let xs: Vec<&str> = r.iter().map(|f| f[0].as_str()).collect();
    assert_eq!(xs, ["30", "30", "32", "32", "34", "34"]);
    assert!(r.iter().all(|f| f[1] == "p_r_dbm" && f[3].is_empty() && f[7].is_empty()));
    assert_eq!(r[0][4], "gauss_approx");
    assert_eq!(r[1][4], "lp3");
    let lp3: Vec<f64> = r.iter().filter(|f| f[4] == "lp3").map(|f| f[6].parse().unwrap()).collect();
    assert!(lp3[0] > lp3[1] && lp3[1] > lp3[2]);
}

#[test]
fn shot_thermal_rows_per_load_and_plot_script() {
    let dir = TempDir::new().unwrap();
    let script = dir.path().join("plot.py");
    let cfg = write(
        &dir,
        "st.cfg",
        &format!(
            "prd = 25\nsweep = prd\nprd_list = 10, 25\nvariants = lp3_shot_thermal\n\
             r_l_list = 50ohm, 1kohm\nplot_script = {}\n",
            script.display()
        ),
    );
    let o = cubicrx(&["ber-sweep", "--config", s(&cfg), "--analytic-only"]);
    assert_eq!(o.status.code(), Some(exit::OK), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 4);
    assert_eq!((r[0][3].as_str(), r[1][3].as_str()), ("50", "1000"));
    assert!(r.iter().all(|f| f[1] == "prd" && f[4] == "lp3_shot_thermal"));
    // A heavier load has less thermal noise.
    let ber: Vec<f64> = r.iter().map(|f| f[6].parse().unwrap()).collect();
    assert!(ber[1] <= ber[0] && ber[3] <= ber[2]);
    let py = std::fs::read_to_string(&script).unwrap();
    assert!(py.contains("semilogy") && py.contains("sweep.csv"));
}

#[test]
fn ase_axis_labels() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "ase.cfg",
        "prd = 25\np_r = 35dBm\nsweep = sigma0_sq_dbm\nsweep_start = 15\nsweep_stop = 17\n\
         sweep_step = 1\nvariants = lp3\n",
    );
    let o = cubicrx(&["ber-sweep", "--config", s(&cfg), "--analytic-only"]);
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 3);
    assert!(r.iter().all(|f| f[1] == "sigma0_sq_dbm"));
    let ber: Vec<f64> = r.iter().map(|f| f[6].parse().unwrap()).collect();
    assert!(ber[0] < ber[1] && ber[1] < ber[2]);
}

#[test]
fn identical_laws_give_one_half() {
    let law = Law::Lp3(Lp3Params::new(3.0, 0.2, -12.0).unwrap());
    let f0 = BitConditionedLaw::new(Bit::Zero, law.clone());
    let f1 = BitConditionedLaw::new(Bit::One, law);
    for (lo, hi) in [(1e-8, 1e-3), (1e-6, 1e-4)] {
        let r = optimize_threshold(&f0, &f1, &ThresholdSearch::new(lo, hi)).unwrap();
        assert!((r.pe_min - 0.5).abs() < 1e-12);
    }
}

#[test]
fn mc_receiver_ordering() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "order.cfg",
        "prd = 25\nsweep = p_r_dbm\nsweep_start = 30\nsweep_stop = 36\nsweep_step = 3\n\
         orders = 1, 2, 3\nvariants = mc\ntrials = 100000\nseed = 3\n",
    );
    let o = cubicrx(&["ber-sweep", "--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(exit::OK), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 9);
    let top = |v: &str| -> f64 {
        r.iter().find(|f| f[0] == "36" && f[4] == v).unwrap()[6].parse().unwrap()
    };
    let (c, q, l) = (top("mc"), top("mc_quadratic"), top("mc_linear"));
    assert!(c <= q && q <= l, "{c} {q} {l}");
}

#[test]
fn fit_round_trip() {
    let o = cubicrx(&["fit", "--moments", "1.234568", "1.5625", "2.040816"]);
    assert_eq!(o.status.code(), Some(exit::OK));
    let text = stdout(&o);
    let last = text.lines().last().unwrap();
    let vals: Vec<f64> = last
        .split_whitespace()
        .skip(1)
        .map(|kv| kv.split('=').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!((vals[0] - 2.0).abs() < 1e-4, "{last}");
    assert!((vals[1] - 0.1).abs() < 1e-5);
    assert!(vals[2].abs() < 1e-5);
}

#[test]
fn fit_rejects_bad_moments() {
    let o = cubicrx(&["fit", "--moments", "2", "3", "10"]);
    assert_eq!(o.status.code(), Some(exit::NUMERICAL));
    assert!(!o.stderr.is_empty());
    let o = cubicrx(&["fit"]);
    assert_eq!(o.status.code(), Some(exit::CONFIG));
}

#[test]
fn config_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.cfg", "prd = 25\nprd_ratio = 3\n");
    let o = cubicrx(&["ber-sweep", "--config", s(&bad)]);
    assert_eq!(o.status.code(), Some(exit::CONFIG));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key"));
    let o = cubicrx(&["mc-validate", "--config", "/nonexistent/x.cfg"]);
    assert_eq!(o.status.code(), Some(exit::CONFIG));
    let o = cubicrx(&["mc-validate", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(exit::CONFIG));
    let no_axis = write(&dir, "none.cfg", "prd = 25\n");
    let o = cubicrx(&["ber-sweep", "--config", s(&no_axis)]);
    assert_eq!(o.status.code(), Some(exit::CONFIG));
}

#[test]
fn exit_code_mapping() {
    assert_eq!(CliError::Config("x".into()).exit_code(), 2);
    assert_eq!(CliError::Numerical(cubicrx::Error::NoSolution("x".into())).exit_code(), 3);
    assert_eq!(CliError::Numerical(cubicrx::Error::Config("x".into())).exit_code(), 2);
    assert_eq!(CliError::Tolerance("x".into()).exit_code(), 4);
}

#[test]
fn noiseless_validation() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "quiet.cfg", "prd = 25\np_r = 33dBm\nsigma0_sq = 0\ntrials = 1000\n");
    let o = cubicrx(&["mc-validate", "--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(exit::OK), "{}", stdout(&o));
    let text = stdout(&o);
    let table: Vec<&str> = text.lines().filter(|l| l.starts_with("0,") || l.starts_with("1,")).collect();
    assert_eq!(table.len(), 6);
    for l in table {
        let rel: f64 = l.split(',').nth(5).unwrap().parse().unwrap();
        assert!(rel.abs() < 5e-3, "{l}");
    }
    assert!(text.contains("gof bit=1 skipped"));
    assert!(text.ends_with("# result=pass\n"));
}

#[test]
fn validation_is_reproducible_and_within_tolerance() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "t1.cfg", "prd = 25\np_r = 35dBm\ntrials = 100000\n");
    let a = cubicrx(&["mc-validate", "--config", s(&cfg), "--seed", "9"]);
    let b = cubicrx(&["mc-validate", "--config", s(&cfg), "--seed", "9"]);
    assert_eq!(a.status.code(), Some(exit::OK), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.contains("# gof bit=1\ndistribution,ks,ks_rank,ad,ad_rank,chi2,chi2_rank\n"));
    let c = cubicrx(&["mc-validate", "--config", s(&cfg), "--seed", "10"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn fit_from_mc_samples() {
    let dir = TempDir::new().unwrap();
    let samples = dir.path().join("samples.csv");
    let cfg = write(
        &dir,
        "fit.cfg",
        &format!("prd = 25\np_r = 35dBm\ntrials = 250000\nsamples_out = {}\n", samples.display()),
    );
    let report = dir.path().join("report.csv");
    let o = cubicrx(&["mc-validate", "--config", s(&cfg), "--out", s(&report)]);
    assert_eq!(o.status.code(), Some(exit::OK));
    assert!(o.stdout.is_empty());
    let o = cubicrx(&["fit", "--samples", s(&samples), "--bit", "1"]);
    assert_eq!(o.status.code(), Some(exit::OK), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let ks_line = text.lines().find(|l| l.starts_with("samples ")).unwrap();
    let parts: Vec<&str> = ks_line.split_whitespace().collect();
    assert_eq!(parts[1], "250000");
    let ks: f64 = parts[3].parse().unwrap();
    assert!(ks < 0.01, "{ks_line}");

    let o = cubicrx(&["gof", "--samples", s(&samples), "--bit", "1"]);
    assert_eq!(o.status.code(), Some(exit::OK));
    let r = rows(&stdout(&o));
    let lp3 = r.iter().find(|f| f[0] == "lp3").unwrap();
    assert_eq!(lp3[2], "1");
}
