//! Monte-Carlo simulation of the receiver, used as the oracle for the
//! analytical pipeline.
//!
//! Time is measured in units of τ_c. The complex noise envelope is
//! synthesized from `L` i.i.d. complex Gaussian coefficients on the integer
//! grid through the period-`L` band-limited interpolation kernel
//! `D(x) = sin(πx) / (L sin(πx/L))`, so that its variance is exactly σ0² at
//! every instant and its autocorrelation is `σ0² D(τ) ≈ σ0² sinc(τ)` across
//! the detection window. Each decision sample integrates `|r|^(2·order)` over
//! `[−PRD/2, PRD/2]` with the trapezoid rule at step `1/M`.
//!
//! Trial `i` of seed `s` always draws from ChaCha8 stream `i` of key `s`, and
//! every accumulation runs in a fixed order, so a sample depends only on
//! `(seed, trial, configuration)`.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::moments::{Bit, MomentTriple};
use crate::params::{DerivedParams, SystemParams};
use crate::special::sinc;

/// Trials processed together by one kernel pass.
pub const BATCH: usize = 32;

/// Oversampling and coefficient window of the noise synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseConfig {
    /// Grid points per τ_c.
    pub oversample: usize,
    /// Extra coefficients, in τ_c, beyond each edge of the window.
    pub window: usize,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self { oversample: 16, window: 32 }
    }
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        if self.oversample < 8 {
            return Err(Error::Config(format!(
                "oversample M must be >= 8, got {}",
                self.oversample
            )));
        }
        if self.window < 16 {
            return Err(Error::Config(format!(
                "window K must be >= 16, got {}",
                self.window
            )));
        }
        Ok(())
    }
}

/// Power law applied before integration: order 1 is the power-linear
/// receiver, 2 the power-quadratic, 3 the power-cubic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Order(u8);

impl Order {
    pub const LINEAR: Order = Order(1);
    pub const QUADRATIC: Order = Order(2);
    pub const CUBIC: Order = Order(3);

    pub fn new(n: u8) -> Result<Self> {
        if (1..=3).contains(&n) {
            Ok(Order(n))
        } else {
            Err(Error::Config(format!("receiver order must be 1, 2 or 3, got {n}")))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Multiplier of `(1/T_p) ∫ |r|^(2n) dt`: `R` for orders 1 and 2
    /// (with unit quadratic coefficient), `R k Γ²` for order 3.
    pub fn prefactor(self, sp: &SystemParams, dp: &DerivedParams) -> f64 {
        match self.0 {
            3 => dp.responsivity * sp.k * sp.gamma_nl * sp.gamma_nl,
            _ => dp.responsivity,
        }
    }
}

impl std::fmt::Display for Order {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One decision variable to evaluate on every noise trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case {
    pub order: Order,
    pub bit: Bit,
    /// Peak pulse power, W.
    pub p_r: f64,
    /// Multiplier in front of the normalized integral.
    pub prefactor: f64,
}

impl Case {
    pub fn new(order: Order, bit: Bit, sp: &SystemParams, dp: &DerivedParams) -> Self {
        Self { order, bit, p_r: sp.p_r, prefactor: order.prefactor(sp, dp) }
    }
}

/// One sampled noise envelope on the integration grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseTrace {
    /// In-phase component, √W.
    pub re: Vec<f64>,
    /// Quadrature component, √W.
    pub im: Vec<f64>,
    /// Grid spacing, s.
    pub step: f64,
    /// Window length, s.
    pub span: f64,
    pub seed: u64,
    pub trial: u64,
}

/// Generation settings recorded with a sample set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub noise: NoiseConfig,
    pub trials: u64,
    pub seed: u64,
}

/// Monte-Carlo samples of one decision variable.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub order: Order,
    pub bit: Bit,
    pub samples: Vec<f64>,
    pub config: McConfig,
}

/// Precomputed grid and kernel for one (PRD, σ0², M, K) configuration.
#[derive(Debug, Clone)]
pub struct Simulator {
    prd: f64,
    sigma0: f64,
    tau_c: f64,
    config: NoiseConfig,
    /// Grid points in τ_c units.
    t: Vec<f64>,
    weights: Vec<f64>,
    /// `sinc(t_j)`, the unit-power pulse.
    pulse: Vec<f64>,
    /// Row-major `t.len() × n_coef` kernel.
    kernel: Vec<f64>,
    n_coef: usize,
}

fn dirichlet(x: f64, l: usize) -> f64 {
    let lf = l as f64;
    let den = (std::f64::consts::PI * x / lf).sin();
    if den.abs() < 1e-12 {
        // x is a multiple of L; L odd gives the limit cos(πx)/cos(πx/L) = ±1.
        let num = (std::f64::consts::PI * x).cos();
        let d = (std::f64::consts::PI * x / lf).cos();
        return num / d;
    }
    (std::f64::consts::PI * x).sin() / (lf * den)
}

impl Simulator {
    pub fn new(sp: &SystemParams, dp: &DerivedParams, config: NoiseConfig) -> Result<Self> {
        Self::with_noise(sp.prd, dp.sigma0_sq, sp.tau_c, config)
    }

    pub fn with_noise(prd: f64, sigma0_sq: f64, tau_c: f64, config: NoiseConfig) -> Result<Self> {
        config.validate()?;
        if !(prd >= 1.0) || !prd.is_finite() {
            return Err(Error::Config(format!("prd must be >= 1, got {prd}")));
        }
        if !(sigma0_sq >= 0.0) {
            return Err(Error::Config(format!("sigma0_sq must be >= 0, got {sigma0_sq}")));
        }
        let intervals = (prd * config.oversample as f64).round().max(1.0) as usize;
        let h = prd / intervals as f64;
        let t: Vec<f64> = (0..=intervals).map(|j| -0.5 * prd + j as f64 * h).collect();
        let weights: Vec<f64> = (0..=intervals)
            .map(|j| if j == 0 || j == intervals { 0.5 * h } else { h })
            .collect();
        let pulse = t.iter().map(|&x| sinc(x)).collect();
        let half = (0.5 * prd + config.window as f64).ceil() as usize;
        let n_coef = 2 * half + 1;
        let mut kernel = Vec::with_capacity(t.len() * n_coef);
        for &tj in &t {
            for m in 0..n_coef {
                let pos = m as f64 - half as f64;
                kernel.push(dirichlet(tj - pos, n_coef));
            }
        }
        Ok(Self {
            prd,
            sigma0: sigma0_sq.sqrt(),
            tau_c,
            config,
            t,
            weights,
            pulse,
            kernel,
            n_coef,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.t
    }

    pub fn coefficients(&self) -> usize {
        self.n_coef
    }

    pub fn config(&self) -> NoiseConfig {
        self.config
    }

    /// Draws the coefficient block of `trials` (coefficient-major, trial-minor).
    fn draw(&self, seed: u64, first: u64, count: usize) -> (Vec<f64>, Vec<f64>) {
        let l = self.n_coef;
        let mut re = vec![0.0; l * count];
        let mut im = vec![0.0; l * count];
        for b in 0..count {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(first + b as u64);
            for m in 0..l {
                re[m * count + b] = rng.sample::<f64, _>(StandardNormal);
                im[m * count + b] = rng.sample::<f64, _>(StandardNormal);
            }
        }
        (re, im)
    }

    /// Noise at grid row `j` for every trial of a block.
    fn row(&self, j: usize, xr: &[f64], xi: &[f64], count: usize, out_r: &mut [f64], out_i: &mut [f64]) {
        out_r[..count].fill(0.0);
        out_i[..count].fill(0.0);
        let krow = &self.kernel[j * self.n_coef..(j + 1) * self.n_coef];
        for (m, &k) in krow.iter().enumerate() {
            let (cr, ci) = (&xr[m * count..(m + 1) * count], &xi[m * count..(m + 1) * count]);
            for b in 0..count {
                out_r[b] += k * cr[b];
                out_i[b] += k * ci[b];
            }
        }
        for b in 0..count {
            out_r[b] *= self.sigma0;
            out_i[b] *= self.sigma0;
        }
    }

    pub fn synth_noise(&self, seed: u64, trial: u64) -> NoiseTrace {
        let (xr, xi) = self.draw(seed, trial, 1);
        let n = self.t.len();
        let (mut re, mut im) = (vec![0.0; n], vec![0.0; n]);
        for j in 0..n {
            self.row(j, &xr, &xi, 1, &mut re[j..j + 1], &mut im[j..j + 1]);
        }
        NoiseTrace {
            re,
            im,
            step: self.tau_c * (self.t[1] - self.t[0]),
            span: self.tau_c * self.prd,
            seed,
            trial,
        }
    }

    /// Decision values of every case for trials `first..first+count`,
    /// returned case-major.
    fn block(&self, cases: &[Case], seed: u64, first: u64, count: usize) -> Vec<f64> {
        let (xr, xi) = self.draw(seed, first, count);
        let amps: Vec<f64> = cases
            .iter()
            .map(|c| c.p_r.sqrt() * c.bit.as_f64())
            .collect();
        let mut acc = vec![0.0; cases.len() * count];
        let (mut nr, mut ni) = ([0.0; BATCH], [0.0; BATCH]);
        for j in 0..self.t.len() {
            self.row(j, &xr, &xi, count, &mut nr, &mut ni);
            let w = self.weights[j];
            for (c, case) in cases.iter().enumerate() {
                let a = amps[c] * self.pulse[j];
                let dst = &mut acc[c * count..(c + 1) * count];
                for b in 0..count {
                    let re = nr[b] + a;
                    let pw = re * re + ni[b] * ni[b];
                    let v = match case.order.0 {
                        1 => pw,
                        2 => pw * pw,
                        _ => pw * pw * pw,
                    };
                    dst[b] += w * v;
                }
            }
        }
        for (c, case) in cases.iter().enumerate() {
            for v in &mut acc[c * count..(c + 1) * count] {
                *v *= case.prefactor / self.prd;
            }
        }
        acc
    }

    /// Samples every case on the same `trials` noise traces.
    pub fn run(&self, cases: &[Case], seed: u64, trials: u64) -> Vec<SampleSet> {
        let blocks: Vec<(u64, usize)> = (0..trials)
            .step_by(BATCH)
            .map(|s| (s, (trials - s).min(BATCH as u64) as usize))
            .collect();
        let parts: Vec<Vec<f64>> = blocks
            .par_iter()
            .map(|&(s, n)| self.block(cases, seed, s, n))
            .collect();
        let config = McConfig { noise: self.config, trials, seed };
        cases
            .iter()
            .enumerate()
            .map(|(c, case)| {
                let mut samples = Vec::with_capacity(trials as usize);
                for (&(_, n), part) in blocks.iter().zip(&parts) {
                    samples.extend_from_slice(&part[c * n..(c + 1) * n]);
                }
                SampleSet { order: case.order, bit: case.bit, samples, config }
            })
            .collect()
    }

    /// A single decision sample.
    pub fn sample(&self, case: &Case, seed: u64, trial: u64) -> f64 {
        self.block(std::slice::from_ref(case), seed, trial, 1)[0]
    }
}

pub fn synth_noise(
    dp: &DerivedParams,
    sp: &SystemParams,
    config: NoiseConfig,
    seed: u64,
    trial: u64,
) -> Result<NoiseTrace> {
    Ok(Simulator::new(sp, dp, config)?.synth_noise(seed, trial))
}

pub fn sample_decision(
    order: Order,
    bit: Bit,
    sp: &SystemParams,
    dp: &DerivedParams,
    config: NoiseConfig,
    seed: u64,
    trial: u64,
) -> Result<f64> {
    let sim = Simulator::new(sp, dp, config)?;
    Ok(sim.sample(&Case::new(order, bit, sp, dp), seed, trial))
}

/// Sample raw moments with jackknife standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub moments: MomentTriple,
    pub stderr: [f64; 3],
}

pub const MIN_MOMENT_SAMPLES: usize = 1000;

pub fn estimate_moments(s: &SampleSet) -> Result<MomentEstimate> {
    estimate_raw_moments(&s.samples, s.bit)
}

/// For a sample mean the delete-one jackknife variance reduces to
/// `Σ (xᵢ − x̄)² / (N (N − 1))`, which is what is computed here.
pub fn estimate_raw_moments(x: &[f64], bit: Bit) -> Result<MomentEstimate> {
    let n = x.len();
    if n < MIN_MOMENT_SAMPLES {
        return Err(Error::InsufficientSamples { needed: MIN_MOMENT_SAMPLES, got: n });
    }
    let nf = n as f64;
    let mut mean = [0.0f64; 3];
    for &v in x {
        mean[0] += v;
        mean[1] += v * v;
        mean[2] += v * v * v;
    }
    for m in &mut mean {
        *m /= nf;
    }
    let mut ss = [0.0f64; 3];
    for &v in x {
        let p = [v, v * v, v * v * v];
        for k in 0..3 {
            ss[k] += (p[k] - mean[k]).powi(2);
        }
    }
    let stderr = ss.map(|s| (s / (nf * (nf - 1.0))).sqrt());
    Ok(MomentEstimate {
        moments: MomentTriple::new(mean[0], mean[1], mean[2], bit),
        stderr,
    })
}

/// Minimum-error threshold between two sample sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalBer {
    pub th: f64,
    pub pe: f64,
}

/// Minimizes `½ P̂(s0 > th) + ½ P̂(s1 ≤ th)` over thresholds at the
/// midpoints between consecutive pooled samples (and beyond both ends).
pub fn empirical_ber(s0: &SampleSet, s1: &SampleSet) -> Result<EmpiricalBer> {
    if s0.order != s1.order {
        return Err(Error::Config(format!(
            "sample sets have different receiver orders {} and {}",
            s0.order, s1.order
        )));
    }
    empirical_ber_values(&s0.samples, &s1.samples)
}

pub fn empirical_ber_values(x0: &[f64], x1: &[f64]) -> Result<EmpiricalBer> {
    if x0.is_empty() || x1.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, got: x0.len().min(x1.len()) });
    }
    let mut pooled: Vec<(f64, bool)> = x0
        .iter()
        .map(|&v| (v, false))
        .chain(x1.iter().map(|&v| (v, true)))
        .collect();
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (n0, n1) = (x0.len() as f64, x1.len() as f64);
    // Threshold below everything: every s0 above, no s1 below.
    let (mut above0, mut below1) = (x0.len(), 0usize);
    let mut best = EmpiricalBer { th: pooled[0].0 - 1.0, pe: 0.5 };
    let mut i = 0;
    while i < pooled.len() {
        let v = pooled[i].0;
        while i < pooled.len() && pooled[i].0 == v {
            if pooled[i].1 {
                below1 += 1;
            } else {
                above0 -= 1;
            }
            i += 1;
        }
        let th = if i < pooled.len() { 0.5 * (v + pooled[i].0) } else { v + 1.0 };
        let pe = 0.5 * above0 as f64 / n0 + 0.5 * below1 as f64 / n1;
        if pe < best.pe {
            best = EmpiricalBer { th, pe };
        }
    }
    Ok(best)
}

/// Writes sample sets as `trial,order,bit,value` rows.
pub fn write_samples_csv<W: Write>(out: &mut W, sets: &[SampleSet]) -> std::io::Result<()> {
    writeln!(out, "# schema=1")?;
    writeln!(out, "trial,order,bit,value")?;
    for s in sets {
        for (i, v) in s.samples.iter().enumerate() {
            writeln!(out, "{},{},{},{:e}", i, s.order, s.bit, v)?;
        }
    }
    Ok(())
}
