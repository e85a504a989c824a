//! BER sweeps over power, ASE variance or processing ratio.

use std::io::Write;

use cubicrx::ber::{gauss_ber, lp3_ber};
use cubicrx::detection::ThresholdResult;
use cubicrx::montecarlo::{empirical_ber, Case, Order, Simulator};
use cubicrx::params::{dbm_to_watts, DerivedParams, SystemParams};
use cubicrx::Bit;
use rayon::prelude::*;

use crate::config::{Axis, Config, Variant};
use crate::CliError;

pub const HEADER: &str = "x_value,x_kind,prd,rl_ohm,variant,th_opt,ber,error";

/// One output row. `rl_ohm` is set only for variants that depend on the
/// load resistance.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub x_value: f64,
    pub x_kind: &'static str,
    pub prd: f64,
    pub rl_ohm: Option<f64>,
    pub variant: String,
    pub th_opt: f64,
    pub ber: f64,
    pub error: Option<String>,
}

impl Row {
    fn new(
        x: &Point,
        kind: &'static str,
        rl_ohm: Option<f64>,
        variant: String,
        r: cubicrx::Result<ThresholdResult>,
    ) -> Self {
        let (th_opt, ber, error) = match r {
            Ok(t) => (t.th_opt, t.pe_min, None),
            Err(e) => (f64::NAN, f64::NAN, Some(e.to_string())),
        };
        Row { x_value: x.x, x_kind: kind, prd: x.sp.prd, rl_ohm, variant, th_opt, ber, error }
    }
}

fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v}")
    }
}

pub fn write_csv<W: Write>(out: &mut W, rows: &[Row]) -> std::io::Result<()> {
    writeln!(out, "# schema=1")?;
    writeln!(out, "{HEADER}")?;
    for r in rows {
        let err = r.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            num(r.x_value),
            r.x_kind,
            num(r.prd),
            r.rl_ohm.map(num).unwrap_or_default(),
            r.variant,
            num(r.th_opt),
            num(r.ber),
            err
        )?;
    }
    Ok(())
}

/// Variant label, suffixed by receiver order for non-cubic receivers.
pub fn variant_label(v: Variant, order: Order) -> String {
    match order {
        Order::LINEAR => format!("{}_linear", v.name()),
        Order::QUADRATIC => format!("{}_quadratic", v.name()),
        _ => v.name().to_string(),
    }
}

#[derive(Debug, Clone, Copy)]
struct Point {
    x: f64,
    sp: SystemParams,
    dp: DerivedParams,
}

fn points(cfg: &Config, axis: &Axis) -> Result<Vec<Point>, CliError> {
    axis.points()
        .iter()
        .map(|&x| {
            let sp = match axis {
                Axis::PrDbm(_) => cfg.system.with_p_r_dbm(x),
                Axis::Prd(_) => cfg.system.with_prd(x),
                Axis::Sigma0SqDbm(_) => cfg.system,
            };
            let mut dp = sp
                .derive()
                .map_err(|e| CliError::Config(format!("invalid parameters at x = {x}: {e}")))?;
            if let Some(s) = cfg.sigma0_sq {
                dp.sigma0_sq = s;
            }
            if let Axis::Sigma0SqDbm(_) = axis {
                dp.sigma0_sq = dbm_to_watts(x);
            }
            Ok(Point { x, sp, dp })
        })
        .collect()
}

fn analytic_rows(cfg: &Config, kind: &'static str, p: &Point) -> Vec<Row> {
    let mut rows = Vec::new();
    let cubic = cfg.orders.contains(&Order::CUBIC);
    for &v in &cfg.variants {
        match v {
            Variant::Lp3 if cubic => {
                rows.push(Row::new(p, kind, None, v.name().into(), lp3_ber(&p.sp, &p.dp, false)));
            }
            Variant::Lp3ShotThermal if cubic => {
                for &rl in &cfg.r_l {
                    let sp = p.sp.with_r_l(rl);
                    rows.push(Row::new(p, kind, Some(rl), v.name().into(), lp3_ber(&sp, &p.dp, true)));
                }
            }
            Variant::GaussApprox => {
                // No closed-form moments exist for the quadratic receiver.
                for &o in cfg.orders.iter().filter(|&&o| o != Order::QUADRATIC) {
                    rows.push(Row::new(p, kind, None, variant_label(v, o), gauss_ber(&p.sp, &p.dp, o)));
                }
            }
            _ => {}
        }
    }
    rows
}

/// Monte-Carlo rows for a group of points that share one noise process.
fn mc_rows(cfg: &Config, kind: &'static str, group: &[Point]) -> Result<Vec<Row>, CliError> {
    let first = &group[0];
    let sim = Simulator::new(&first.sp, &first.dp, cfg.mc.noise)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut cases = Vec::new();
    for &o in &cfg.orders {
        cases.push(Case::new(o, Bit::Zero, &first.sp, &first.dp));
        for p in group {
            cases.push(Case::new(o, Bit::One, &p.sp, &p.dp));
        }
    }
    let sets = sim.run(&cases, cfg.mc.seed, cfg.mc.trials);
    let per = group.len() + 1;
    let mut rows = Vec::new();
    for (k, &o) in cfg.orders.iter().enumerate() {
        let zero = &sets[k * per];
        for (i, p) in group.iter().enumerate() {
            let r = empirical_ber(zero, &sets[k * per + 1 + i])
                .map(|e| ThresholdResult { th_opt: e.th, pe_min: e.pe });
            rows.push(Row::new(p, kind, None, variant_label(Variant::Mc, o), r));
        }
    }
    Ok(rows)
}

/// Evaluates every (point, variant) pair and returns rows sorted by x,
/// then variant, then load resistance.
pub fn run_ber_sweep(cfg: &Config) -> Result<Vec<Row>, CliError> {
    let axis = cfg
        .axis
        .as_ref()
        .ok_or_else(|| CliError::Config("ber-sweep needs a sweep axis (sweep = ...)".into()))?;
    let kind = axis.kind();
    let pts = points(cfg, axis)?;
    let mut rows: Vec<Row> = pts.par_iter().flat_map_iter(|p| analytic_rows(cfg, kind, p)).collect();
    if cfg.variants.contains(&Variant::Mc) && !cfg.analytic_only {
        cfg.validate_mc()?;
        match axis {
            // Only the pulse power changes, so every point shares the noise.
            Axis::PrDbm(_) => rows.extend(mc_rows(cfg, kind, &pts)?),
            _ => {
                for p in &pts {
                    rows.extend(mc_rows(cfg, kind, std::slice::from_ref(p))?);
                }
            }
        }
    }
    rows.sort_by(|a, b| {
        a.x_value
            .total_cmp(&b.x_value)
            .then_with(|| a.variant.cmp(&b.variant))
            .then_with(|| a.rl_ohm.unwrap_or(0.0).total_cmp(&b.rl_ohm.unwrap_or(0.0)))
    });
    Ok(rows)
}

/// Python script that plots a sweep CSV, one curve per variant and load.
pub fn plot_script(csv_name: &str) -> String {
    format!(
        r##"#!/usr/bin/env python3
# Generated by `cubicrx ber-sweep`; plots {csv_name}.
import csv
import sys
from collections import defaultdict

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "{csv_name}"
curves = defaultdict(list)
kind = None
with open(path) as f:
    rows = csv.DictReader(line for line in f if not line.startswith("#"))
    for r in rows:
        if r["ber"] in ("nan", "") or float(r["ber"]) <= 0:
            continue
        kind = r["x_kind"]
        label = r["variant"] + (f" (R_L={{r['rl_ohm']}} ohm)" if r["rl_ohm"] else "")
        curves[label].append((float(r["x_value"]), float(r["ber"])))

for label, pts in sorted(curves.items()):
    pts.sort()
    plt.semilogy([p[0] for p in pts], [p[1] for p in pts], marker="o", label=label)
plt.xlabel(kind or "x")
plt.ylabel("BER")
plt.grid(True, which="both", alpha=0.3)
plt.legend()
plt.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
"##
    )
}
