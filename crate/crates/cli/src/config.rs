//! Flat `key = value` configuration files.
//!
//! Lines are `key = value`; `#` starts a comment. Quantities accept SI
//! numbers or a unit suffix (`100fs`, `35dBm`, `1kohm`, `50dB`). Every key is
//! optional; unset physical parameters fall back to the reference receiver.
//! A key that is not in [`KEYS`] is rejected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use cubicrx::montecarlo::{NoiseConfig, Order};
use cubicrx::params::{dbm_to_watts, SystemParams};

use crate::CliError;

/// Every accepted key.
pub const KEYS: &[&str] = &[
    // link and receiver
    "tau_c", "prd", "lambda", "g_amp", "l1", "l2", "n_sp", "eta", "k", "gamma_nl", "p_r", "t_r",
    "r_l", "sigma0_sq",
    // sweep
    "sweep", "sweep_start", "sweep_stop", "sweep_step", "prd_list", "orders", "variants",
    "r_l_list",
    // Monte-Carlo
    "trials", "seed", "oversample", "window", "analytic_only", "bit",
    // outputs
    "out", "plot_script", "samples_out",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Unit {
    Time,
    Length,
    Power,
    Ratio,
    Temperature,
    Resistance,
    PerWatt,
    Plain,
}

fn unit_of(key: &str) -> Unit {
    match key {
        "tau_c" => Unit::Time,
        "lambda" => Unit::Length,
        "p_r" | "sigma0_sq" => Unit::Power,
        "g_amp" | "l1" | "l2" => Unit::Ratio,
        "t_r" => Unit::Temperature,
        "r_l" | "r_l_list" => Unit::Resistance,
        "gamma_nl" => Unit::PerWatt,
        _ => Unit::Plain,
    }
}

/// Splits `35dBm` into `(35, "dBm")`.
fn split_number(s: &str) -> (&str, &str) {
    let end = s
        .char_indices()
        .find(|&(i, c)| {
            !(c.is_ascii_digit()
                || c == '.'
                || c == '+'
                || c == '-'
                || ((c == 'e' || c == 'E')
                    && s[i + 1..].starts_with(|d: char| d.is_ascii_digit() || d == '-' || d == '+')))
        })
        .map_or(s.len(), |(i, _)| i);
    (s[..end].trim(), s[end..].trim())
}

fn parse_number(key: &str, s: &str) -> Result<f64, CliError> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Config(format!("{key}: `{s}` is not a finite number")))
}

/// Parses one quantity of `key` into SI units.
fn parse_quantity(key: &str, raw: &str) -> Result<f64, CliError> {
    let (num, suffix) = split_number(raw);
    let v = parse_number(key, num)?;
    let scale: f64 = match (unit_of(key), suffix) {
        (_, "") => 1.0,
        (Unit::Time, "s") => 1.0,
        (Unit::Time, "ms") => 1e-3,
        (Unit::Time, "us") => 1e-6,
        (Unit::Time, "ns") => 1e-9,
        (Unit::Time, "ps") => 1e-12,
        (Unit::Time, "fs") => 1e-15,
        (Unit::Length, "m") => 1.0,
        (Unit::Length, "um") => 1e-6,
        (Unit::Length, "nm") => 1e-9,
        (Unit::Power, "W") => 1.0,
        (Unit::Power, "mW") => 1e-3,
        (Unit::Power, "uW") => 1e-6,
        (Unit::Power, "dBm") => return Ok(dbm_to_watts(v)),
        (Unit::Ratio, "dB") => return Ok(10f64.powf(v / 10.0)),
        (Unit::Temperature, "K") => 1.0,
        (Unit::Resistance, "ohm") => 1.0,
        (Unit::Resistance, "kohm") => 1e3,
        (Unit::Resistance, "Mohm") => 1e6,
        (Unit::PerWatt, "/W") => 1.0,
        _ => {
            return Err(CliError::Config(format!("{key}: unknown unit `{suffix}` in `{raw}`")));
        }
    };
    // Divide by exact powers of ten so `1550nm` parses to the nearest double.
    Ok(if scale < 1.0 { v / (1.0 / scale).round() } else { v * scale })
}

/// Parses a dBm-valued sweep bound, with or without the `dBm` suffix.
fn parse_dbm(key: &str, raw: &str) -> Result<f64, CliError> {
    let (num, suffix) = split_number(raw);
    match suffix {
        "" | "dBm" => parse_number(key, num),
        _ => Err(CliError::Config(format!("{key}: expected a dBm value, got `{raw}`"))),
    }
}

fn parse_list(raw: &str) -> Vec<&str> {
    raw.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn parse_bool(key: &str, raw: &str) -> Result<bool, CliError> {
    match raw {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(CliError::Config(format!("{key}: `{raw}` is not a boolean"))),
    }
}

fn parse_int<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T, CliError> {
    let cleaned = raw.replace('_', "");
    if let Ok(v) = cleaned.parse::<T>() {
        return Ok(v);
    }
    // Accept integral scientific notation such as 1e6.
    match cleaned.parse::<f64>() {
        Ok(f) if f.fract() == 0.0 && (0.0..1.8e19).contains(&f) => format!("{}", f as u64)
            .parse::<T>()
            .map_err(|_| CliError::Config(format!("{key}: `{raw}` is out of range"))),
        _ => Err(CliError::Config(format!("{key}: `{raw}` is not an integer"))),
    }
}

/// Raw key/value pairs of one file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!("line {}: expected `key = value`", n + 1)));
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(CliError::Config(format!("line {}: unknown key `{key}`", n + 1)));
            }
            if value.is_empty() {
                return Err(CliError::Config(format!("line {}: `{key}` has no value", n + 1)));
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(CliError::Config(format!("line {}: duplicate key `{key}`", n + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::parse(&text)
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

/// Sweep axis with its points.
#[derive(Debug, Clone, PartialEq)]
pub enum Axis {
    /// Received peak power, dBm.
    PrDbm(Vec<f64>),
    /// ASE variance σ0² with everything else fixed, dBm.
    Sigma0SqDbm(Vec<f64>),
    Prd(Vec<f64>),
}

impl Axis {
    pub fn kind(&self) -> &'static str {
        match self {
            Axis::PrDbm(_) => "p_r_dbm",
            Axis::Sigma0SqDbm(_) => "sigma0_sq_dbm",
            Axis::Prd(_) => "prd",
        }
    }

    pub fn points(&self) -> &[f64] {
        match self {
            Axis::PrDbm(v) | Axis::Sigma0SqDbm(v) | Axis::Prd(v) => v,
        }
    }
}

/// Model variants a sweep can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Variant {
    Lp3,
    Lp3ShotThermal,
    GaussApprox,
    Mc,
}

impl Variant {
    pub const ALL: [Variant; 4] =
        [Variant::Lp3, Variant::Lp3ShotThermal, Variant::GaussApprox, Variant::Mc];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Lp3 => "lp3",
            Variant::Lp3ShotThermal => "lp3_shot_thermal",
            Variant::GaussApprox => "gauss_approx",
            Variant::Mc => "mc",
        }
    }

    fn parse(s: &str) -> Result<Self, CliError> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| CliError::Config(format!("variants: unknown variant `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub trials: u64,
    pub seed: u64,
    pub noise: NoiseConfig,
}

pub const MIN_TRIALS: u64 = 1000;

/// Fully typed configuration shared by every command.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub system: SystemParams,
    /// Replaces the σ0² derived from the amplifier when set.
    pub sigma0_sq: Option<f64>,
    pub axis: Option<Axis>,
    pub orders: Vec<Order>,
    pub variants: Vec<Variant>,
    pub r_l: Vec<f64>,
    pub mc: McSettings,
    pub analytic_only: bool,
    pub bit: cubicrx::Bit,
    pub out: Option<PathBuf>,
    pub plot_script: Option<PathBuf>,
    pub samples_out: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        let system = SystemParams::reference();
        Self {
            system,
            sigma0_sq: None,
            axis: None,
            orders: vec![Order::CUBIC],
            variants: Variant::ALL.to_vec(),
            r_l: vec![system.r_l],
            mc: McSettings { trials: 100_000, seed: 1, noise: NoiseConfig::default() },
            analytic_only: false,
            bit: cubicrx::Bit::One,
            out: None,
            plot_script: None,
            samples_out: None,
        }
    }
}

fn range(key: &str, start: f64, stop: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) {
        return Err(CliError::Config(format!("{key}: sweep_step must be > 0, got {step}")));
    }
    if stop < start {
        return Err(CliError::Config(format!(
            "{key}: sweep_stop {stop} is below sweep_start {start}"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    if n > 100_000 {
        return Err(CliError::Config(format!("{key}: sweep has more than 100000 points")));
    }
    // Round away representation noise so `30 + 3·0.1` prints as 30.3.
    Ok((0..=n).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9).collect())
}

impl Config {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, CliError> {
        let mut c = Config::default();
        let sp = &mut c.system;
        let fields: [(&str, &mut f64); 13] = [
            ("tau_c", &mut sp.tau_c),
            ("prd", &mut sp.prd),
            ("lambda", &mut sp.lambda),
            ("g_amp", &mut sp.g_amp),
            ("l1", &mut sp.l1),
            ("l2", &mut sp.l2),
            ("n_sp", &mut sp.n_sp),
            ("eta", &mut sp.eta),
            ("k", &mut sp.k),
            ("gamma_nl", &mut sp.gamma_nl),
            ("p_r", &mut sp.p_r),
            ("t_r", &mut sp.t_r),
            ("r_l", &mut sp.r_l),
        ];
        for (key, slot) in fields {
            if let Some(v) = raw.get(key) {
                *slot = parse_quantity(key, v)?;
            }
        }
        c.system
            .validate()
            .map_err(|e| CliError::Config(format!("invalid receiver parameters: {e}")))?;
        c.r_l = vec![c.system.r_l];

        if let Some(v) = raw.get("sigma0_sq") {
            let s = parse_quantity("sigma0_sq", v)?;
            if s < 0.0 {
                return Err(CliError::Config(format!("sigma0_sq must be >= 0, got {s}")));
            }
            c.sigma0_sq = Some(s);
        }

        c.axis = match raw.get("sweep") {
            None => {
                for key in ["sweep_start", "sweep_stop", "sweep_step", "prd_list"] {
                    if raw.get(key).is_some() {
                        return Err(CliError::Config(format!("{key} is set but sweep is not")));
                    }
                }
                None
            }
            Some("prd") => {
                let list = raw
                    .get("prd_list")
                    .ok_or_else(|| CliError::Config("sweep = prd needs prd_list".into()))?;
                let v = parse_list(list)
                    .into_iter()
                    .map(|s| parse_number("prd_list", s))
                    .collect::<Result<Vec<_>, _>>()?;
                if v.is_empty() || v.iter().any(|&p| p < 1.0) {
                    return Err(CliError::Config("prd_list needs values >= 1".into()));
                }
                Some(Axis::Prd(v))
            }
            Some(kind @ ("p_r_dbm" | "sigma0_sq_dbm")) => {
                let bound = |key: &str| {
                    raw.get(key)
                        .ok_or_else(|| CliError::Config(format!("sweep = {kind} needs {key}")))
                        .and_then(|s| parse_dbm(key, s))
                };
                let step = raw
                    .get("sweep_step")
                    .ok_or_else(|| CliError::Config(format!("sweep = {kind} needs sweep_step")))
                    .and_then(|s| parse_number("sweep_step", s))?;
                let pts = range("sweep", bound("sweep_start")?, bound("sweep_stop")?, step)?;
                Some(if kind == "p_r_dbm" { Axis::PrDbm(pts) } else { Axis::Sigma0SqDbm(pts) })
            }
            Some(other) => {
                return Err(CliError::Config(format!(
                    "sweep: unknown axis `{other}` (p_r_dbm, sigma0_sq_dbm or prd)"
                )))
            }
        };

        if let Some(v) = raw.get("orders") {
            let mut orders = parse_list(v)
                .into_iter()
                .map(|s| {
                    parse_int::<u8>("orders", s)
                        .and_then(|n| Order::new(n).map_err(|e| CliError::Config(e.to_string())))
                })
                .collect::<Result<Vec<_>, _>>()?;
            orders.sort();
            orders.dedup();
            if orders.is_empty() {
                return Err(CliError::Config("orders is empty".into()));
            }
            c.orders = orders;
        }
        if let Some(v) = raw.get("variants") {
            let mut vs = parse_list(v)
                .into_iter()
                .map(Variant::parse)
                .collect::<Result<Vec<_>, _>>()?;
            vs.sort();
            vs.dedup();
            if vs.is_empty() {
                return Err(CliError::Config("variants is empty".into()));
            }
            c.variants = vs;
        }
        if let Some(v) = raw.get("r_l_list") {
            let list = parse_list(v)
                .into_iter()
                .map(|s| parse_quantity("r_l_list", s))
                .collect::<Result<Vec<_>, _>>()?;
            if list.is_empty() || list.iter().any(|&r| !(r > 0.0)) {
                return Err(CliError::Config("r_l_list needs positive resistances".into()));
            }
            c.r_l = list;
        }

        if let Some(v) = raw.get("trials") {
            c.mc.trials = parse_int("trials", v)?;
        }
        if let Some(v) = raw.get("seed") {
            c.mc.seed = parse_int("seed", v)?;
        }
        if let Some(v) = raw.get("oversample") {
            c.mc.noise.oversample = parse_int("oversample", v)?;
        }
        if let Some(v) = raw.get("window") {
            c.mc.noise.window = parse_int("window", v)?;
        }
        if let Some(v) = raw.get("analytic_only") {
            c.analytic_only = parse_bool("analytic_only", v)?;
        }
        if let Some(v) = raw.get("bit") {
            c.bit = parse_int::<u8>("bit", v)
                .and_then(|b| cubicrx::Bit::try_from(b).map_err(|e| CliError::Config(e.to_string())))?;
        }
        c.out = raw.get("out").map(PathBuf::from);
        c.plot_script = raw.get("plot_script").map(PathBuf::from);
        c.samples_out = raw.get("samples_out").map(PathBuf::from);
        Ok(c)
    }

    /// Checks the Monte-Carlo settings when sampling is enabled.
    pub fn validate_mc(&self) -> Result<(), CliError> {
        if self.mc.trials < MIN_TRIALS {
            return Err(CliError::Config(format!(
                "trials must be >= {MIN_TRIALS} when Monte-Carlo is enabled, got {}",
                self.mc.trials
            )));
        }
        self.mc.noise.validate().map_err(|e| CliError::Config(e.to_string()))
    }
}
