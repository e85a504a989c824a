//! Goodness-of-fit statistics and a moment-fitted candidate ranking.

use std::io::Write;

use crate::error::{Error, Result};
use crate::lp3::{fit_from_moments, Lp3Params};
use crate::moments::{Bit, MomentTriple};
use crate::montecarlo::SampleSet;
use crate::special::{normal_cdf, normal_sf, reg_gamma_p};

/// Samples required by [`rank_distributions`].
pub const MIN_RANK_SAMPLES: usize = 10_000;

/// Kolmogorov–Smirnov distance between the empirical cdf of ascending
/// `sorted` and `cdf`.
pub fn ks_statistic<F: FnMut(f64) -> f64>(sorted: &[f64], mut cdf: F) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let i = i as f64;
        d = d.max((i + 1.0) / n - f).max(f - i / n);
    }
    Ok(d)
}

/// Anderson–Darling statistic A² of ascending `sorted` against `cdf`.
pub fn ad_statistic<F: FnMut(f64) -> f64>(sorted: &[f64], mut cdf: F) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let mut f = Vec::with_capacity(sorted.len());
    for &x in sorted {
        let v = cdf(x);
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::Boundary { x, value: v });
        }
        f.push(v);
    }
    let n = f.len();
    let mut s = 0.0;
    for i in 0..n {
        let w = (2 * i + 1) as f64;
        s += w * (f[i].ln() + (-f[n - 1 - i]).ln_1p());
    }
    Ok(-(n as f64) - s / n as f64)
}

/// Bin count for `n` samples: `max(10, n/50)`, capped so every
/// equal-probability bin expects at least 5 samples.
pub fn chi2_bins(n: usize) -> usize {
    (n / 50).max(10).min(n / 5)
}

/// Pearson χ² over `bins` equal-probability bins of `cdf`.
pub fn chi2_statistic<F: FnMut(f64) -> f64>(samples: &[f64], mut cdf: F, bins: usize) -> Result<f64> {
    let expected = samples.len() as f64 / bins as f64;
    if bins < 2 || expected < 5.0 {
        return Err(Error::Binning { expected });
    }
    let mut observed = vec![0usize; bins];
    for &x in samples {
        let u = cdf(x);
        let k = ((u * bins as f64).floor().max(0.0) as usize).min(bins - 1);
        observed[k] += 1;
    }
    Ok(observed
        .iter()
        .map(|&o| (o as f64 - expected).powi(2) / expected)
        .sum())
}

/// Candidate families, listed in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Candidate {
    Gamma,
    InverseGaussian,
    Lognormal,
    Lp3,
    Normal,
}

impl Candidate {
    pub const ALL: [Candidate; 5] = [
        Candidate::Gamma,
        Candidate::InverseGaussian,
        Candidate::Lognormal,
        Candidate::Lp3,
        Candidate::Normal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Candidate::Gamma => "gamma",
            Candidate::InverseGaussian => "inverse_gaussian",
            Candidate::Lognormal => "lognormal",
            Candidate::Lp3 => "lp3",
            Candidate::Normal => "normal",
        }
    }
}

/// A candidate law fitted by moment matching.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fitted {
    Lp3(Lp3Params),
    Normal { mean: f64, std: f64 },
    Lognormal { mu: f64, sigma: f64 },
    Gamma { shape: f64, scale: f64 },
    InverseGaussian { mean: f64, lambda: f64 },
}

/// `ln Φ(−z)`, using the asymptotic tail series where `erfc` underflows.
fn ln_normal_sf(z: f64) -> f64 {
    if z < 20.0 {
        return normal_sf(z).ln();
    }
    let r = 1.0 / (z * z);
    -0.5 * z * z - (z * (2.0 * std::f64::consts::PI).sqrt()).ln()
        + (1.0 - r + 3.0 * r * r - 15.0 * r * r * r).ln()
}

impl Fitted {
    pub fn candidate(&self) -> Candidate {
        match self {
            Fitted::Lp3(_) => Candidate::Lp3,
            Fitted::Normal { .. } => Candidate::Normal,
            Fitted::Lognormal { .. } => Candidate::Lognormal,
            Fitted::Gamma { .. } => Candidate::Gamma,
            Fitted::InverseGaussian { .. } => Candidate::InverseGaussian,
        }
    }

    /// Named parameters, for reporting.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Fitted::Lp3(p) => vec![("alpha", p.alpha), ("beta", p.beta), ("gamma", p.gamma)],
            Fitted::Normal { mean, std } => vec![("mean", mean), ("std", std)],
            Fitted::Lognormal { mu, sigma } => vec![("mu", mu), ("sigma", sigma)],
            Fitted::Gamma { shape, scale } => vec![("shape", shape), ("scale", scale)],
            Fitted::InverseGaussian { mean, lambda } => vec![("mean", mean), ("lambda", lambda)],
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Fitted::Normal { mean, std } => normal_cdf((x - mean) / std),
            _ if x <= 0.0 => 0.0,
            Fitted::Lp3(p) => p.cdf(x).unwrap_or(f64::NAN),
            Fitted::Lognormal { mu, sigma } => normal_cdf((x.ln() - mu) / sigma),
            Fitted::Gamma { shape, scale } => reg_gamma_p(shape, x / scale).unwrap_or(f64::NAN),
            Fitted::InverseGaussian { mean, lambda } => {
                let r = (lambda / x).sqrt();
                let z1 = r * (x / mean - 1.0);
                let z2 = r * (x / mean + 1.0);
                normal_cdf(z1) + (2.0 * lambda / mean + ln_normal_sf(z2)).exp()
            }
        }
    }
}

/// Fits `c` to the raw moments `m`. Two-parameter families use μ1 and μ2.
pub fn fit_candidate(c: Candidate, m: &MomentTriple) -> Result<Fitted> {
    let mean = m.mu1;
    let var = m.variance();
    if !(var > 1e-14 * mean * mean) || !var.is_finite() {
        return Err(Error::Domain(format!("degenerate sample variance {var}")));
    }
    let positive = || {
        if mean > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("{} needs a positive mean, got {mean}", c.name())))
        }
    };
    Ok(match c {
        Candidate::Lp3 => Fitted::Lp3(fit_from_moments(m)?),
        Candidate::Normal => Fitted::Normal { mean, std: var.sqrt() },
        Candidate::Lognormal => {
            positive()?;
            let s2 = (var / (mean * mean)).ln_1p();
            Fitted::Lognormal { mu: mean.ln() - 0.5 * s2, sigma: s2.sqrt() }
        }
        Candidate::Gamma => {
            positive()?;
            Fitted::Gamma { shape: mean * mean / var, scale: var / mean }
        }
        Candidate::InverseGaussian => {
            positive()?;
            Fitted::InverseGaussian { mean, lambda: mean * mean * mean / var }
        }
    })
}

/// Statistics and ranks of one candidate. Unfit candidates carry `NaN`
/// statistics and the error that rejected them.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateReport {
    pub candidate: Candidate,
    pub fit: Result<Fitted>,
    pub ks: f64,
    pub ad: f64,
    pub chi2: f64,
    pub ks_rank: usize,
    pub ad_rank: usize,
    pub chi2_rank: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GofReport {
    pub n: usize,
    pub bins: usize,
    /// One entry per candidate, in [`Candidate::ALL`] order.
    pub rows: Vec<CandidateReport>,
}

impl GofReport {
    pub fn get(&self, c: Candidate) -> &CandidateReport {
        self.rows.iter().find(|r| r.candidate == c).expect("every candidate is reported")
    }

    /// Writes `distribution,ks,ks_rank,ad,ad_rank,chi2,chi2_rank` rows.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "# schema=1")?;
        writeln!(out, "distribution,ks,ks_rank,ad,ad_rank,chi2,chi2_rank")?;
        let num = |v: f64| if v.is_nan() { "nan".to_string() } else { format!("{v:e}") };
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.candidate.name(),
                num(r.ks),
                r.ks_rank,
                num(r.ad),
                r.ad_rank,
                num(r.chi2),
                r.chi2_rank
            )?;
        }
        Ok(())
    }
}

/// Ranks 1..n by ascending value; NaN last, ties by candidate name.
fn ranks(rows: &[CandidateReport], stat: impl Fn(&CandidateReport) -> f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..rows.len()).collect();
    idx.sort_by(|&a, &b| {
        let (x, y) = (stat(&rows[a]), stat(&rows[b]));
        match (x.is_nan(), y.is_nan()) {
            (true, false) => std::cmp::Ordering::Greater,
            (false, true) => std::cmp::Ordering::Less,
            (true, true) => std::cmp::Ordering::Equal,
            _ => x.total_cmp(&y),
        }
        .then_with(|| rows[a].candidate.name().cmp(rows[b].candidate.name()))
    });
    let mut out = vec![0; rows.len()];
    for (r, &i) in idx.iter().enumerate() {
        out[i] = r + 1;
    }
    out
}

pub fn rank_distributions(s: &SampleSet) -> Result<GofReport> {
    rank_samples(&s.samples, s.bit)
}

/// Fits every candidate to `samples` and ranks them by each statistic.
pub fn rank_samples(samples: &[f64], bit: Bit) -> Result<GofReport> {
    let n = samples.len();
    if n < MIN_RANK_SAMPLES {
        return Err(Error::InsufficientSamples { needed: MIN_RANK_SAMPLES, got: n });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let nf = n as f64;
    let (mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0);
    for &x in &sorted {
        s1 += x;
        s2 += x * x;
        s3 += x * x * x;
    }
    let m = MomentTriple::new(s1 / nf, s2 / nf, s3 / nf, bit);
    let bins = chi2_bins(n);
    let mut rows: Vec<CandidateReport> = Candidate::ALL
        .iter()
        .map(|&c| {
            let fit = fit_candidate(c, &m);
            let (ks, ad, chi2) = match &fit {
                Ok(f) => (
                    ks_statistic(&sorted, |x| f.cdf(x)).unwrap_or(f64::NAN),
                    ad_statistic(&sorted, |x| f.cdf(x)).unwrap_or(f64::NAN),
                    chi2_statistic(&sorted, |x| f.cdf(x), bins).unwrap_or(f64::NAN),
                ),
                Err(_) => (f64::NAN, f64::NAN, f64::NAN),
            };
            CandidateReport { candidate: c, fit, ks, ad, chi2, ks_rank: 0, ad_rank: 0, chi2_rank: 0 }
        })
        .collect();
    let (k, a, c) = (ranks(&rows, |r| r.ks), ranks(&rows, |r| r.ad), ranks(&rows, |r| r.chi2));
    for (i, row) in rows.iter_mut().enumerate() {
        row.ks_rank = k[i];
        row.ad_rank = a[i];
        row.chi2_rank = c[i];
    }
    Ok(GofReport { n, bins, rows })
}
