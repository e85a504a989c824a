//! Error probability of the on-off-keyed decision, with optional
//! shot/thermal noise, and the optimum threshold.
//!
//! Conditioned on the preprocessed current `Y = y`, the detector adds a
//! Gaussian current with variance `s²(y) = 2 q_e y / T_p + 4 K_B T_r / (R_L T_p)`.
//! With `u(y) = Φ((x − y)/s(y))` the distribution function of the total is
//!
//! ```text
//! F(x) = ∫ u(y) dF_Y(y) = u(y_hi) + ∫ (−u′(y)) F_Y(y) dy
//! ```
//!
//! over `[y_lo, y_hi]`, and the survival function follows symmetrically from
//! the survival function of `Y`, which keeps both tails accurate.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::lp3::Lp3Params;
use crate::moments::Bit;
use crate::params::{DerivedParams, SystemParams, BOLTZMANN, ELECTRON_CHARGE};
use crate::quad;
use crate::roots;
use crate::special::{normal_cdf, normal_pdf, normal_quantile, normal_sf};

/// Lower integration limit as a quantile of `Y`.
pub const Y_LO_QUANTILE: f64 = 1e-14;
/// Upper integration limit as an upper-tail probability of `Y`.
pub const Y_HI_TAIL: f64 = 1e-12;
/// Absolute tolerance of the convolution integral.
pub const CONVOLUTION_TOL: f64 = 1e-12;

/// Shot and thermal noise of the photodetector and load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisePhysics {
    /// Electron charge, C.
    pub q_e: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
    /// Receiver temperature, K.
    pub t_r: f64,
    /// Load resistance, Ω.
    pub r_l: f64,
    /// Detector response time, s; the noise bandwidth is `1/t_p`.
    pub t_p: f64,
}

impl NoisePhysics {
    pub fn new(sp: &SystemParams, dp: &DerivedParams) -> Self {
        Self {
            q_e: ELECTRON_CHARGE,
            k_b: BOLTZMANN,
            t_r: sp.t_r,
            r_l: sp.r_l,
            t_p: dp.t_p,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.q_e, self.k_b, self.t_r, self.r_l, self.t_p]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("noise physics must be positive: {self:?}")))
        }
    }

    /// Shot-noise variance at current `y`, A².
    pub fn shot_variance(&self, y: f64) -> f64 {
        2.0 * self.q_e * y / self.t_p
    }

    /// Thermal-noise variance, A².
    pub fn thermal_variance(&self) -> f64 {
        4.0 * self.k_b * self.t_r / (self.r_l * self.t_p)
    }

    pub fn variance(&self, y: f64) -> f64 {
        self.shot_variance(y.max(0.0)) + self.thermal_variance()
    }
}

/// Distribution of a decision variable before detector noise.
#[derive(Debug, Clone, PartialEq)]
pub enum Law {
    Lp3(Lp3Params),
    Normal { mean: f64, std: f64 },
    /// Sorted samples defining an empirical distribution function.
    Empirical(Vec<f64>),
}

impl Law {
    pub fn empirical(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InsufficientSamples { needed: 1, got: 0 });
        }
        samples.sort_by(f64::total_cmp);
        Ok(Law::Empirical(samples))
    }

    pub fn cdf(&self, y: f64) -> Result<f64> {
        match self {
            Law::Lp3(p) => {
                if y <= 0.0 {
                    Ok(0.0)
                } else {
                    p.cdf(y)
                }
            }
            Law::Normal { mean, std } => Ok(normal_cdf((y - mean) / std)),
            Law::Empirical(s) => Ok(s.partition_point(|v| *v <= y) as f64 / s.len() as f64),
        }
    }

    pub fn sf(&self, y: f64) -> Result<f64> {
        match self {
            Law::Lp3(p) => {
                if y <= 0.0 {
                    Ok(1.0)
                } else {
                    p.sf(y)
                }
            }
            Law::Normal { mean, std } => Ok(normal_sf((y - mean) / std)),
            Law::Empirical(s) => {
                Ok((s.len() - s.partition_point(|v| *v <= y)) as f64 / s.len() as f64)
            }
        }
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        match self {
            Law::Lp3(l) => l.quantile(p),
            Law::Normal { mean, std } => Ok(mean + std * normal_quantile(p)),
            Law::Empirical(s) => {
                let i = ((p * s.len() as f64).ceil() as usize).clamp(1, s.len());
                Ok(s[i - 1])
            }
        }
    }
}

/// `F^(b)`: the law of one bit's decision variable, optionally convolved
/// with detector noise.
#[derive(Debug, Clone, PartialEq)]
pub struct BitConditionedLaw {
    pub bit: Bit,
    pub law: Law,
    pub shot_thermal: Option<NoisePhysics>,
    grid: OnceLock<QuantileGrid>,
}

impl BitConditionedLaw {
    pub fn new(bit: Bit, law: Law) -> Self {
        Self { bit, law, shot_thermal: None, grid: OnceLock::new() }
    }

    pub fn with_shot_thermal(mut self, np: NoisePhysics) -> Self {
        self.shot_thermal = Some(np);
        self
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        match &self.shot_thermal {
            None => self.law.cdf(x),
            Some(np) => convolved(&self.law, self.grid()?, x, np, false),
        }
    }

    pub fn sf(&self, x: f64) -> Result<f64> {
        match &self.shot_thermal {
            None => self.law.sf(x),
            Some(np) => convolved(&self.law, self.grid()?, x, np, true),
        }
    }

    fn grid(&self) -> Result<&QuantileGrid> {
        if let Some(g) = self.grid.get() {
            return Ok(g);
        }
        let g = QuantileGrid::new(&self.law)?;
        Ok(self.grid.get_or_init(|| g))
    }
}

/// Integration limits and interior breakpoints taken from quantiles of `Y`.
#[derive(Debug, Clone, PartialEq)]
struct QuantileGrid {
    y_lo: f64,
    y_hi: f64,
    breaks: Vec<f64>,
}

impl QuantileGrid {
    fn new(law: &Law) -> Result<Self> {
        if let Law::Empirical(_) = law {
            return Ok(Self { y_lo: 0.0, y_hi: 0.0, breaks: Vec::new() });
        }
        let y_lo = law.quantile(Y_LO_QUANTILE)?.max(0.0);
        let y_hi = law.quantile(1.0 - Y_HI_TAIL)?.max(y_lo);
        let breaks = [1e-9, 1e-6, 1e-3, 0.1, 0.5, 0.9, 0.999, 1.0 - 1e-6, 1.0 - 1e-9]
            .iter()
            .map(|&p| law.quantile(p))
            .collect::<Result<_>>()?;
        Ok(Self { y_lo, y_hi, breaks })
    }
}

/// Distribution function of `Y + N(0, s²(Y))` for LP3-distributed `Y`.
pub fn cdf_shot_thermal(law: &Lp3Params, x: f64, np: &NoisePhysics) -> Result<f64> {
    let law = Law::Lp3(*law);
    convolved(&law, &QuantileGrid::new(&law)?, x, np, false)
}

/// Survival function companion of [`cdf_shot_thermal`].
pub fn sf_shot_thermal(law: &Lp3Params, x: f64, np: &NoisePhysics) -> Result<f64> {
    let law = Law::Lp3(*law);
    convolved(&law, &QuantileGrid::new(&law)?, x, np, true)
}

fn convolved(law: &Law, grid: &QuantileGrid, x: f64, np: &NoisePhysics, upper: bool) -> Result<f64> {
    np.validate()?;
    if let Law::Empirical(s) = law {
        let sum: f64 = s
            .iter()
            .map(|&y| {
                let w = (x - y) / np.variance(y).sqrt();
                if upper {
                    normal_sf(w)
                } else {
                    normal_cdf(w)
                }
            })
            .sum();
        return Ok(sum / s.len() as f64);
    }

    let (y_lo, y_hi) = (grid.y_lo, grid.y_hi);
    let a = 2.0 * np.q_e / np.t_p;
    let c = np.thermal_variance();
    let w_of = |y: f64| (x - y) / (a * y + c).sqrt();
    let neg_du = |y: f64| {
        let v = a * y + c;
        let w = (x - y) / v.sqrt();
        normal_pdf(w) * (0.5 * a * (x + y) + c) / (v * v.sqrt())
    };

    let s_x = np.variance(x).sqrt();
    let mut breaks = grid.breaks.clone();
    breaks.push(x);
    for k in [1.0, 3.0, 10.0] {
        breaks.push(x - k * s_x);
        breaks.push(x + k * s_x);
    }

    // Errors from the distribution function are carried out of the closure.
    let mut failure: Option<Error> = None;
    let mut tail = |y: f64| -> f64 {
        let r = if upper { law.sf(y) } else { law.cdf(y) };
        match r {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let integral = quad::integrate_with_breaks(
        |y| neg_du(y) * tail(y),
        y_lo,
        y_hi,
        &breaks,
        CONVOLUTION_TOL,
        0.0,
        4000,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let value = if upper {
        normal_sf(w_of(y_lo)) * law.sf(y_lo)? + integral.value
    } else {
        normal_cdf(w_of(y_hi)) * law.cdf(y_hi)? + integral.value
    };
    Ok(value.clamp(0.0, 1.0))
}

/// `PE = ½ (1 − F^(0)(th)) + ½ F^(1)(th)`.
pub fn error_probability(f0: &BitConditionedLaw, f1: &BitConditionedLaw, th: f64) -> Result<f64> {
    Ok(0.5 * f0.sf(th)? + 0.5 * f1.cdf(th)?)
}

/// Bracket and resolution of the threshold search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSearch {
    pub lo: f64,
    pub hi: f64,
    pub grid_points: usize,
    /// Final bracket width relative to the threshold.
    pub rtol: f64,
}

impl ThresholdSearch {
    /// The default bracket `[m0/100, 10·m1]` from the two conditional means.
    pub fn from_means(m0: f64, m1: f64) -> Self {
        Self { lo: m0 / 100.0, hi: m1 * 10.0, grid_points: 256, rtol: 1e-10 }
    }

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi, grid_points: 256, rtol: 1e-10 }
    }

    fn grid(&self) -> Vec<f64> {
        let n = self.grid_points.max(3);
        let (lo, hi) = (self.lo, self.hi);
        if lo > 0.0 {
            let (l, h) = (lo.ln(), hi.ln());
            (0..n).map(|i| (l + (h - l) * i as f64 / (n - 1) as f64).exp()).collect()
        } else {
            (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
        }
    }
}

/// Optimized threshold and the error probability there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdResult {
    pub th_opt: f64,
    pub pe_min: f64,
}

pub fn optimize_threshold(
    f0: &BitConditionedLaw,
    f1: &BitConditionedLaw,
    search: &ThresholdSearch,
) -> Result<ThresholdResult> {
    if !(search.lo < search.hi) || !search.lo.is_finite() || !search.hi.is_finite() {
        return Err(Error::Bracket(format!(
            "threshold bracket [{}, {}] is empty",
            search.lo, search.hi
        )));
    }
    let grid = search.grid();
    let pe: Vec<f64> = grid
        .iter()
        .map(|&th| error_probability(f0, f1, th))
        .collect::<Result<_>>()?;
    let (best, &pe_best) = pe
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is nonempty");
    let n = grid.len();
    let interior_min = pe[1..n - 1].iter().copied().fold(f64::INFINITY, f64::min);
    if (best == 0 || best == n - 1) && pe_best < interior_min {
        return Err(Error::Bracket(format!(
            "error probability is smallest at the bracket end th = {:e}",
            grid[best]
        )));
    }
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(n - 1)];
    let mut failure: Option<Error> = None;
    let (th, pe_gold) = roots::golden_section(
        |th| match error_probability(f0, f1, th) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        a,
        b,
        search.rtol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(if pe_gold <= pe_best {
        ThresholdResult { th_opt: th, pe_min: pe_gold }
    } else {
        ThresholdResult { th_opt: grid[best], pe_min: pe_best }
    })
}

/// Threshold-optimized error probability when both bits are modeled as
/// Gaussian with the given means and variances.
pub fn gaussian_approx_ber(m0: f64, v0: f64, m1: f64, v1: f64) -> Result<ThresholdResult> {
    if !(v0 > 0.0 && v1 > 0.0) {
        return Err(Error::Domain(format!("variances must be positive, got {v0}, {v1}")));
    }
    let (s0, s1) = (v0.sqrt(), v1.sqrt());
    let f0 = BitConditionedLaw::new(Bit::Zero, Law::Normal { mean: m0, std: s0 });
    let f1 = BitConditionedLaw::new(Bit::One, Law::Normal { mean: m1, std: s1 });
    let lo = m0.min(m1) - 12.0 * s0.max(s1);
    let hi = m0.max(m1) + 12.0 * s0.max(s1);
    let mut search = ThresholdSearch::new(lo, hi);
    search.grid_points = 1024;
    optimize_threshold(&f0, &f1, &search)
}
