//! The four subcommands. Each returns the text it writes so that callers
//! and tests can inspect it.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use cubicrx::gof::{ks_statistic, rank_samples, GofReport, MIN_RANK_SAMPLES};
use cubicrx::lp3::{fit_from_moments, Lp3Params};
use cubicrx::moments::CubicReceiver;
use cubicrx::montecarlo::{
    estimate_moments, write_samples_csv, Case, Order, SampleSet, Simulator,
};
use cubicrx::params::{watts_to_dbm, DerivedParams, SystemParams};
use cubicrx::{Bit, MomentTriple};

use crate::config::{Config, RawConfig};
use crate::sweep;
use crate::CliError;

/// Flags shared by every command.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Common {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub analytic_only: bool,
}

impl Common {
    /// Loads the configuration file (or defaults) and applies flag overrides.
    pub fn load(&self) -> Result<Config, CliError> {
        let raw = match &self.config {
            Some(p) => RawConfig::load(p)?,
            None => RawConfig::default(),
        };
        let mut cfg = Config::from_raw(&raw)?;
        if let Some(s) = self.seed {
            cfg.mc.seed = s;
        }
        if let Some(t) = self.trials {
            cfg.mc.trials = t;
        }
        if self.analytic_only {
            cfg.analytic_only = true;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        Ok(cfg)
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })
}

fn io_err(path: &str) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io { path: PathBuf::from(path), source: e }
}

/// Writes `text` to the configured output, or returns it for stdout.
fn emit(cfg: &Config, text: String) -> Result<Option<String>, CliError> {
    match &cfg.out {
        Some(p) => {
            write_file(p, text.as_bytes())?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}

fn derived(cfg: &Config) -> Result<(SystemParams, DerivedParams), CliError> {
    let mut dp = cfg
        .system
        .derive()
        .map_err(|e| CliError::Config(format!("invalid receiver parameters: {e}")))?;
    if let Some(s) = cfg.sigma0_sq {
        dp.sigma0_sq = s;
    }
    Ok((cfg.system, dp))
}

pub fn ber_sweep(common: &Common) -> Result<Option<String>, CliError> {
    let cfg = common.load()?;
    let rows = sweep::run_ber_sweep(&cfg)?;
    let mut buf = Vec::new();
    sweep::write_csv(&mut buf, &rows).map_err(io_err("<buffer>"))?;
    if let Some(script) = &cfg.plot_script {
        let csv_name = cfg
            .out
            .as_ref()
            .and_then(|p| p.file_name())
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "sweep.csv".into());
        write_file(script, sweep::plot_script(&csv_name).as_bytes())?;
    }
    emit(&cfg, String::from_utf8(buf).expect("CSV is UTF-8"))
}

/// Where `fit` takes its input from.
#[derive(Debug, Clone, PartialEq)]
pub enum FitInput {
    Moments([f64; 3]),
    Samples { path: PathBuf, bit: Option<Bit> },
}

/// Reads decision samples from a `trial,order,bit,value` CSV, or from a file
/// holding one number per line.
pub fn read_samples(path: &Path, bit: Option<Bit>) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let mut out = Vec::new();
    let bad = |n: &str| CliError::Config(format!("{}: cannot parse `{n}`", path.display()));
    match lines.next() {
        Some(h) if h.starts_with("trial,") => {
            let cols: Vec<&str> = h.split(',').collect();
            let (Some(bi), Some(vi)) = (
                cols.iter().position(|&c| c == "bit"),
                cols.iter().position(|&c| c == "value"),
            ) else {
                return Err(CliError::Config(format!("{}: missing bit/value columns", path.display())));
            };
            for l in lines {
                let f: Vec<&str> = l.split(',').collect();
                let (b, v) = (f.get(bi).ok_or_else(|| bad(l))?, f.get(vi).ok_or_else(|| bad(l))?);
                if let Some(want) = bit {
                    if b.parse::<u8>().map_err(|_| bad(b))? != want.as_u8() {
                        continue;
                    }
                }
                out.push(v.parse::<f64>().map_err(|_| bad(v))?);
            }
        }
        Some(first) => {
            for l in std::iter::once(first).chain(lines) {
                out.push(l.parse::<f64>().map_err(|_| bad(l))?);
            }
        }
        None => {}
    }
    if out.is_empty() {
        return Err(CliError::Config(format!("{}: no samples", path.display())));
    }
    Ok(out)
}

fn raw_moments(x: &[f64], bit: Bit) -> MomentTriple {
    let n = x.len() as f64;
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    for &v in x {
        a += v;
        b += v * v;
        c += v * v * v;
    }
    MomentTriple::new(a / n, b / n, c / n, bit)
}

pub fn fit(common: &Common, input: &FitInput) -> Result<String, CliError> {
    let cfg = common.load()?;
    let (m, samples) = match input {
        FitInput::Moments([a, b, c]) => (MomentTriple::new(*a, *b, *c, Bit::One), None),
        FitInput::Samples { path, bit } => {
            let mut x = read_samples(path, *bit)?;
            x.sort_by(f64::total_cmp);
            (raw_moments(&x, bit.unwrap_or(Bit::One)), Some(x))
        }
    };
    let p: Lp3Params = fit_from_moments(&m)?;
    let fitted = [p.moment(1)?, p.moment(2)?, p.moment(3)?];
    let ks = match &samples {
        Some(x) => Some(ks_statistic(x, |y| p.cdf(y).unwrap_or(f64::NAN))?),
        None => None,
    };

    let mut s = String::new();
    writeln!(s, "alpha = {:.12e}", p.alpha).unwrap();
    writeln!(s, "beta  = {:.12e}", p.beta).unwrap();
    writeln!(s, "gamma = {:.12e}", p.gamma).unwrap();
    for (k, (want, got)) in [m.mu1, m.mu2, m.mu3].iter().zip(fitted).enumerate() {
        writeln!(s, "mu{} input {:.10e} fitted {:.10e} rel_err {:+.2e}", k + 1, want, got, got / want - 1.0)
            .unwrap();
    }
    if let (Some(x), Some(d)) = (&samples, ks) {
        writeln!(s, "samples {} ks {:.6}", x.len(), d).unwrap();
    }
    writeln!(s, "lp3 alpha={:e} beta={:e} gamma={:e}", p.alpha, p.beta, p.gamma).unwrap();

    if let Some(path) = &cfg.out {
        let mut csv = String::from("# schema=1\nalpha,beta,gamma,mu1,mu2,mu3,n_samples,ks\n");
        writeln!(
            csv,
            "{:e},{:e},{:e},{:e},{:e},{:e},{},{}",
            p.alpha,
            p.beta,
            p.gamma,
            m.mu1,
            m.mu2,
            m.mu3,
            samples.as_ref().map_or(String::new(), |x| x.len().to_string()),
            ks.map_or(String::new(), |d| format!("{d:e}"))
        )
        .unwrap();
        write_file(path, csv.as_bytes())?;
    }
    Ok(s)
}

fn simulate(cfg: &Config, sp: &SystemParams, dp: &DerivedParams, bits: &[Bit]) -> Result<Vec<SampleSet>, CliError> {
    cfg.validate_mc()?;
    let sim = Simulator::new(sp, dp, cfg.mc.noise).map_err(|e| CliError::Config(e.to_string()))?;
    let cases: Vec<Case> = bits.iter().map(|&b| Case::new(Order::CUBIC, b, sp, dp)).collect();
    Ok(sim.run(&cases, cfg.mc.seed, cfg.mc.trials))
}

pub fn gof(common: &Common, samples: Option<(&Path, Option<Bit>)>) -> Result<Option<String>, CliError> {
    let cfg = common.load()?;
    let x = match samples {
        Some((path, bit)) => read_samples(path, bit)?,
        None => {
            let (sp, dp) = derived(&cfg)?;
            simulate(&cfg, &sp, &dp, &[cfg.bit])?.pop().expect("one case").samples
        }
    };
    if x.len() < MIN_RANK_SAMPLES {
        return Err(CliError::Config(format!(
            "gof needs at least {MIN_RANK_SAMPLES} samples, got {}",
            x.len()
        )));
    }
    let report = rank_samples(&x, cfg.bit)?;
    let mut buf = Vec::new();
    report.write_csv(&mut buf).map_err(io_err("<buffer>"))?;
    emit(&cfg, String::from_utf8(buf).expect("CSV is UTF-8"))
}

/// Relative tolerances on μ1, μ2, μ3.
pub const MOMENT_TOLERANCE: [f64; 3] = [0.03, 0.05, 0.10];

fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        if got == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        got / want - 1.0
    }
}

fn gof_section(s: &mut String, r: &GofReport) {
    let mut buf = Vec::new();
    r.write_csv(&mut buf).expect("writing to memory");
    // Drop the schema line; the report carries one at the top.
    for line in String::from_utf8(buf).expect("UTF-8").lines().skip(1) {
        writeln!(s, "{line}").unwrap();
    }
}

/// Outcome of `mc-validate`: the report (`None` when written to a file) and
/// whether every moment met its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Validation {
    pub report: Option<String>,
    pub pass: bool,
}

pub fn mc_validate(common: &Common) -> Result<Validation, CliError> {
    let cfg = common.load()?;
    let (sp, dp) = derived(&cfg)?;
    let sets = simulate(&cfg, &sp, &dp, &[Bit::Zero, Bit::One])?;
    let rx = CubicReceiver::new(&sp, &dp);

    let mut s = String::from("# schema=1\n");
    let dbm = watts_to_dbm(sp.p_r).map_or("-inf".to_string(), |d| format!("{d}"));
    writeln!(
        s,
        "# mc-validate prd={} p_r_dbm={} sigma0_sq={:e} trials={} seed={} oversample={} window={}",
        sp.prd, dbm, dp.sigma0_sq, cfg.mc.trials, cfg.mc.seed, cfg.mc.noise.oversample, cfg.mc.noise.window
    )
    .unwrap();
    writeln!(s, "bit,moment,closed_form,mc,stderr,rel_err,tolerance,status").unwrap();
    let mut pass = true;
    for set in &sets {
        let want = rx.triple(set.bit);
        let est = estimate_moments(set)?;
        let got = [est.moments.mu1, est.moments.mu2, est.moments.mu3];
        let want = [want.mu1, want.mu2, want.mu3];
        for k in 0..3 {
            let e = rel_err(got[k], want[k]);
            let ok = e.abs() <= MOMENT_TOLERANCE[k];
            pass &= ok;
            writeln!(
                s,
                "{},mu{},{:e},{:e},{:e},{:+.6},{},{}",
                set.bit,
                k + 1,
                want[k],
                got[k],
                est.stderr[k],
                e,
                MOMENT_TOLERANCE[k],
                if ok { "pass" } else { "fail" }
            )
            .unwrap();
        }
    }
    for set in &sets {
        if set.samples.len() < MIN_RANK_SAMPLES {
            writeln!(s, "# gof bit={} skipped: fewer than {MIN_RANK_SAMPLES} samples", set.bit).unwrap();
            continue;
        }
        writeln!(s, "# gof bit={}", set.bit).unwrap();
        gof_section(&mut s, &rank_samples(&set.samples, set.bit)?);
    }
    writeln!(s, "# result={}", if pass { "pass" } else { "fail" }).unwrap();

    if let Some(path) = &cfg.samples_out {
        let mut buf = Vec::new();
        write_samples_csv(&mut buf, &sets).map_err(io_err("<buffer>"))?;
        write_file(path, &buf)?;
    }
    Ok(Validation { report: emit(&cfg, s)?, pass })
}
