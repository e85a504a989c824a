//! Closed-form raw moments of the power-cubic decision variable
//!
//! ```text
//! Y = R k Γ² / T_p ∫ |√P_r sinc(t/τ_c) b + n(t)|⁶ dt
//! ```
//!
//! for bit `b ∈ {0, 1}`, together with the Gaussian moment identities and
//! sinc-power constants they are built from.
//!
//! Every moment is a polynomial in σ0², P_r and PRD. Terms carrying a power
//! of P_r are multiplied by the bit, so bit 0 keeps only the pure-noise terms.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::params::{DerivedParams, SystemParams};

/// Transmitted on-off-keyed bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub fn as_f64(self) -> f64 {
        match self {
            Bit::Zero => 0.0,
            Bit::One => 1.0,
        }
    }

    pub fn as_u8(self) -> u8 {
        self as u8
    }
}

impl TryFrom<u8> for Bit {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Bit::Zero),
            1 => Ok(Bit::One),
            _ => Err(Error::Domain(format!("bit must be 0 or 1, got {v}"))),
        }
    }
}

impl std::fmt::Display for Bit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// First three raw moments of a decision variable for one bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentTriple {
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub bit: Bit,
}

impl MomentTriple {
    pub fn new(mu1: f64, mu2: f64, mu3: f64, bit: Bit) -> Self {
        Self { mu1, mu2, mu3, bit }
    }

    pub fn variance(&self) -> f64 {
        self.mu2 - self.mu1 * self.mu1
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu1 > 0.0 && self.mu3 > 0.0) || !self.mu2.is_finite() {
            return Err(Error::Domain(format!(
                "moments must be positive and finite, got ({}, {}, {})",
                self.mu1, self.mu2, self.mu3
            )));
        }
        if !(self.mu2 > self.mu1 * self.mu1) {
            return Err(Error::Domain(format!(
                "mu2 = {} does not exceed mu1^2 = {}",
                self.mu2,
                self.mu1 * self.mu1
            )));
        }
        Ok(())
    }
}

/// One monomial `coef · PRD^prd · (σ0²)^s · P_r^p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub prd: i32,
    pub s: i32,
    pub p: i32,
}

const fn t(coef: f64, prd: i32, s: i32, p: i32) -> Term {
    Term { coef, prd, s, p }
}

/// μ1 = RkΓ²/PRD · Σ terms.
pub const MEAN_TERMS: [Term; 4] = [
    t(48.0, 1, 3, 0),
    t(72.0, 0, 2, 1),
    t(12.0, 0, 1, 2),
    t(0.55, 0, 0, 3),
];

/// PRD-linear noise-only variance coefficient, rounded to an integer.
pub const PRD_LINEAR_COEF_ROUNDED: f64 = 35834.0;
/// A digit-transposed form of the same coefficient, ruled out by the row sums.
pub const PRD_LINEAR_COEF_TRANSPOSED: f64 = 35843.0;

/// One row of the variance expansion: `r · σ0^g · P_r^n · I₀`, where the
/// sinc-product integral I₀ is multiplied by PRD when `prd_linear` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceRow {
    pub r: f64,
    pub g: i32,
    pub n: i32,
    pub integral: f64,
    pub prd_linear: bool,
}

const fn row(r: f64, g: i32, n: i32, integral: f64, prd_linear: bool) -> VarianceRow {
    VarianceRow { r, g, n, integral, prd_linear }
}

/// Coefficients and sinc-product integrals of the 28 variance contributions.
pub const VARIANCE_TABLE: [VarianceRow; 28] = [
    row(2304.0, 12, 0, 0.55, true),
    row(6912.0, 10, 1, 0.52, false),
    row(6912.0, 8, 2, 0.394, false),
    row(10368.0, 10, 1, 0.64, false),
    row(10368.0, 10, 1, 0.64, false),
    row(20736.0, 12, 0, 0.667, true),
    row(2688.0, 6, 3, 0.343, false),
    row(10368.0, 8, 2, 0.45, false),
    row(10368.0, 8, 2, 0.45, false),
    row(41472.0, 10, 1, 0.657, false),
    row(468.0, 4, 4, 0.317, false),
    row(3456.0, 6, 3, 0.395, false),
    row(2592.0, 8, 2, 0.66, false),
    row(3456.0, 6, 3, 0.3945, false),
    row(25920.0, 8, 2, 0.5, false),
    row(20736.0, 10, 1, 1.0, false),
    row(2592.0, 8, 2, 0.665, false),
    row(20736.0, 10, 1, 1.0, false),
    row(20736.0, 12, 0, 1.0, true),
    row(36.0, 2, 5, 0.3043, false),
    row(432.0, 4, 4, 0.37, false),
    row(864.0, 6, 3, 0.55, false),
    row(432.0, 4, 4, 0.37, false),
    row(5184.0, 6, 3, 0.45, false),
    row(10368.0, 8, 2, 0.66, false),
    row(864.0, 6, 3, 0.55, false),
    row(10368.0, 8, 2, 0.66, false),
    row(20736.0, 10, 1, 1.0, false),
];

/// Third-moment polynomial, μ3 = (RkΓ²)³/PRD³ · Σ terms.
pub const THIRD_TERMS: [Term; 21] = [
    t(110_592.0, 3, 9, 0),
    t(5.16e6, 2, 9, 0),
    t(4.977e5, 2, 8, 1),
    t(8.3e4, 2, 7, 2),
    t(3.8e3, 2, 6, 3),
    t(1.0538e8, 1, 9, 0),
    t(2.308e7, 1, 8, 1),
    t(8.133e6, 1, 7, 2),
    t(1.306e6, 1, 6, 3),
    t(9.956e4, 1, 5, 4),
    t(3.479e3, 1, 4, 5),
    t(43.56, 1, 3, 6),
    t(4.671e8, 0, 8, 1),
    t(3.241e8, 0, 7, 2),
    t(1.027e8, 0, 6, 3),
    t(1.647e7, 0, 5, 4),
    t(1.451e6, 0, 4, 5),
    t(7.232e4, 0, 3, 6),
    t(2.014e3, 0, 2, 7),
    t(28.97, 0, 1, 8),
    t(0.1664, 0, 0, 9),
];

fn merge(terms: Vec<Term>) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::new();
    for term in terms {
        if let Some(m) = out
            .iter_mut()
            .find(|m| m.prd == term.prd && m.s == term.s && m.p == term.p)
        {
            m.coef += term.coef;
        } else {
            out.push(term);
        }
    }
    out.sort_by_key(|m| (m.p, -m.prd));
    out
}

/// Variance polynomial, Var = (RkΓ²)²/PRD² · Σ terms, summed from
/// [`VARIANCE_TABLE`] by power pattern.
pub fn variance_terms() -> &'static [Term] {
    static CELL: OnceLock<Vec<Term>> = OnceLock::new();
    CELL.get_or_init(|| {
        merge(
            VARIANCE_TABLE
                .iter()
                .map(|r| t(r.r * r.integral, r.prd_linear as i32, r.g / 2, r.n))
                .collect(),
        )
    })
}

/// Second-moment polynomial, μ2 = (RkΓ²)²/PRD² · Σ terms: the square of the
/// mean polynomial plus the variance polynomial.
pub fn second_moment_terms() -> &'static [Term] {
    static CELL: OnceLock<Vec<Term>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut all: Vec<Term> = variance_terms().to_vec();
        for x in &MEAN_TERMS {
            for y in &MEAN_TERMS {
                all.push(t(x.coef * y.coef, x.prd + y.prd, x.s + y.s, x.p + y.p));
            }
        }
        merge(all)
    })
}

/// The PRD-linear noise-only variance coefficient recomputed from the table.
pub fn prd_linear_coef() -> f64 {
    variance_terms()
        .iter()
        .find(|m| m.prd == 1)
        .map(|m| m.coef)
        .unwrap_or(0.0)
}

fn eval(terms: &[Term], prd: f64, s: f64, p: f64, bit: Bit) -> f64 {
    let b = bit.as_f64();
    terms
        .iter()
        .map(|m| {
            let sig = if m.p > 0 { b } else { 1.0 };
            sig * m.coef * prd.powi(m.prd) * s.powi(m.s) * p.powi(m.p)
        })
        .sum()
}

/// Inputs of the closed forms with everything else folded away.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicReceiver {
    /// R·k·Γ², A/W³.
    pub scale: f64,
    /// σ0², W.
    pub sigma0_sq: f64,
    /// Peak received power, W.
    pub p_r: f64,
    pub prd: f64,
}

impl CubicReceiver {
    pub fn new(sp: &SystemParams, dp: &DerivedParams) -> Self {
        Self {
            scale: dp.responsivity * sp.k * sp.gamma_nl * sp.gamma_nl,
            sigma0_sq: dp.sigma0_sq,
            p_r: sp.p_r,
            prd: sp.prd,
        }
    }

    pub fn mean(&self, bit: Bit) -> f64 {
        self.scale / self.prd * eval(&MEAN_TERMS, self.prd, self.sigma0_sq, self.p_r, bit)
    }

    pub fn second_moment(&self, bit: Bit) -> f64 {
        let pre = self.scale / self.prd;
        pre * pre * eval(second_moment_terms(), self.prd, self.sigma0_sq, self.p_r, bit)
    }

    pub fn variance(&self, bit: Bit) -> f64 {
        let pre = self.scale / self.prd;
        pre * pre * eval(variance_terms(), self.prd, self.sigma0_sq, self.p_r, bit)
    }

    pub fn third_moment(&self, bit: Bit) -> f64 {
        let pre = self.scale / self.prd;
        pre * pre * pre * eval(&THIRD_TERMS, self.prd, self.sigma0_sq, self.p_r, bit)
    }

    pub fn triple(&self, bit: Bit) -> MomentTriple {
        MomentTriple::new(
            self.mean(bit),
            self.second_moment(bit),
            self.third_moment(bit),
            bit,
        )
    }
}

pub fn mean_decision(sp: &SystemParams, dp: &DerivedParams, bit: Bit) -> f64 {
    CubicReceiver::new(sp, dp).mean(bit)
}

pub fn second_moment(sp: &SystemParams, dp: &DerivedParams, bit: Bit) -> f64 {
    CubicReceiver::new(sp, dp).second_moment(bit)
}

pub fn variance_decision(sp: &SystemParams, dp: &DerivedParams, bit: Bit) -> f64 {
    CubicReceiver::new(sp, dp).variance(bit)
}

pub fn third_moment(sp: &SystemParams, dp: &DerivedParams, bit: Bit) -> f64 {
    CubicReceiver::new(sp, dp).third_moment(bit)
}

pub fn moment_triple(sp: &SystemParams, dp: &DerivedParams, bit: Bit) -> MomentTriple {
    CubicReceiver::new(sp, dp).triple(bit)
}

/// Mean and variance of the power-linear decision variable
/// `Y₁ = R/T_p ∫ |r(t)|² dt`, using ∫sinc² = 1.
pub fn linear_mean_variance(sp: &SystemParams, dp: &DerivedParams, bit: Bit) -> (f64, f64) {
    let r = dp.responsivity;
    let s = dp.sigma0_sq;
    let p = sp.p_r * bit.as_f64();
    let prd = sp.prd;
    let mean = r * (2.0 * s + p / prd);
    let var = r * r * (4.0 * s * s * prd + 4.0 * s * p) / (prd * prd);
    (mean, var)
}

/// `E[Xⁿ]` for `X ~ N(a, σ²)` and `n ∈ {2, 4, 6}`.
pub fn gaussian_raw_moment(a: f64, sigma: f64, n: u32) -> Result<f64> {
    let a2 = a * a;
    let s2 = sigma * sigma;
    match n {
        2 => Ok(a2 + s2),
        4 => Ok(a2 * a2 + 6.0 * a2 * s2 + 3.0 * s2 * s2),
        6 => Ok(a2 * a2 * a2 + 15.0 * a2 * a2 * s2 + 45.0 * a2 * s2 * s2 + 15.0 * s2 * s2 * s2),
        _ => Err(Error::Unsupported(format!(
            "Gaussian raw moment of order {n}; supported orders are 2, 4, 6"
        ))),
    }
}

/// `∫ sincᵖ(u) du` over the real line, to the precision the closed forms use.
pub fn sinc_power_integral(p: u32) -> Result<f64> {
    match p {
        2 => Ok(1.0),
        4 => Ok(0.667),
        6 => Ok(0.55),
        _ => Err(Error::Unsupported(format!(
            "sinc power integral for p = {p}; supported powers are 2, 4, 6"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rx(s: f64, p: f64, prd: f64) -> CubicReceiver {
        CubicReceiver { scale: 1.0 * 0.01 * 0.01, sigma0_sq: s, p_r: p, prd }
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn coef(terms: &[Term], prd: i32, s: i32, p: i32) -> f64 {
        terms
            .iter()
            .find(|m| m.prd == prd && m.s == s && m.p == p)
            .map(|m| m.coef)
            .unwrap_or(0.0)
    }

    #[test]
    fn mean_bit0_substitution() {
        let m = rx(1.0, 5.0, 25.0).mean(Bit::Zero);
        assert!(rel(m, 4.8e-3) < 1e-14);
    }

    #[test]
    fn mean_noiseless() {
        let r = rx(0.0, 2.0, 25.0);
        assert!(rel(r.mean(Bit::One), 1e-4 * 0.55 * 8.0 / 25.0) < 1e-14);
    }

    #[test]
    fn noiseless_second_is_mean_squared() {
        let r = rx(0.0, 3.0, 40.0);
        let m1 = r.mean(Bit::One);
        assert!(rel(r.second_moment(Bit::One), m1 * m1) < 1e-14);
        assert!(rel(r.second_moment(Bit::One), 0.3025 * 1e-8 * 3f64.powi(6) / 1600.0) < 1e-14);
        assert_eq!(r.variance(Bit::One), 0.0);
    }

    #[test]
    fn noiseless_third_moment() {
        let r = rx(0.0, 2.0, 25.0);
        let want = 0.1664 * 1e-12 * 2f64.powi(9) / 25f64.powi(3);
        assert!(rel(r.third_moment(Bit::One), want) < 1e-14);
        let m1 = r.mean(Bit::One);
        assert!(rel(r.third_moment(Bit::One), m1.powi(3)) < 0.01);
    }

    #[test]
    fn third_moment_bit0_closed_form() {
        let (s, prd) = (0.07, 30.0);
        let r = rx(s, 9.0, prd);
        let want = 1e-12 / prd.powi(3)
            * (110592.0 * s.powi(9) * prd.powi(3)
                + 5.16e6 * s.powi(9) * prd.powi(2)
                + 1.0538e8 * s.powi(9) * prd);
        assert!(rel(r.third_moment(Bit::Zero), want) < 1e-14);
    }

    #[test]
    fn prd_linear_coefficient_resolves_to_35834() {
        let c = prd_linear_coef();
        assert!((c - 2304.0 * 0.55 - 20736.0 * 0.667 - 20736.0).abs() < 1e-9);
        assert!((c - PRD_LINEAR_COEF_ROUNDED).abs() < 0.5);
        assert!((c - PRD_LINEAR_COEF_TRANSPOSED).abs() > 8.0);
    }

    #[test]
    fn variance_bit0_closed_form() {
        let (s, prd) = (0.0705, 50.0);
        let r = rx(s, 3.0, prd);
        let want = prd_linear_coef() * 1e-8 * s.powi(6) / prd;
        assert!(rel(r.variance(Bit::Zero), want) < 1e-14);
        let mu2 = 1e-8 / (prd * prd) * (2304.0 * s.powi(6) * prd * prd + prd_linear_coef() * s.powi(6) * prd);
        assert!(rel(r.second_moment(Bit::Zero), mu2) < 1e-14);
    }

    #[test]
    fn variance_coefficients_match_reference_sums() {
        let v = variance_terms();
        // Reference grouped sums: 106320, 42135, 6933.7, 468, 10.95.
        // Each agrees to half a unit in the last quoted digit.
        for (p, quoted, half_ulp) in [
            (1, 106_320.0, 0.5),
            (2, 42_135.0, 0.5),
            (3, 6933.7, 0.05),
            (4, 468.0, 0.5),
            (5, 10.95, 0.005),
        ] {
            let c = coef(v, 0, 6 - p, p);
            assert!((c - quoted).abs() <= half_ulp, "P^{p}: {c} vs {quoted}");
        }
    }

    #[test]
    fn second_moment_coefficients_match_reference() {
        let m = second_moment_terms();
        assert_eq!(coef(m, 2, 6, 0), 2304.0);
        assert!((coef(m, 1, 5, 1) - 6912.0).abs() < 1e-9);
        assert!((coef(m, 1, 4, 2) - 1152.0).abs() < 1e-9);
        assert!((coef(m, 1, 3, 3) - 52.8).abs() < 1e-9);
        assert!(rel(coef(m, 0, 4, 2), 47_319.0) < 2e-4);
        assert!(rel(coef(m, 0, 3, 3), 8661.7) < 2e-4);
        assert!(rel(coef(m, 0, 2, 4), 691.2) < 2e-4);
        assert!(rel(coef(m, 0, 1, 5), 24.15) < 2e-4);
        assert!((coef(m, 0, 0, 6) - 0.3025).abs() < 1e-12);
        // The σ0¹⁰P variance term carries no PRD factor.
        assert!(rel(coef(m, 0, 5, 1), 106_320.0) < 2e-4);
    }

    #[test]
    fn gaussian_moments() {
        assert_eq!(gaussian_raw_moment(0.0, 1.0, 6).unwrap(), 15.0);
        assert_eq!(gaussian_raw_moment(1.0, 1.0, 6).unwrap(), 76.0);
        assert_eq!(gaussian_raw_moment(2.0, 1.0, 4).unwrap(), 43.0);
        assert!(gaussian_raw_moment(0.0, 1.0, 3).is_err());
    }

    #[test]
    fn sinc_integrals() {
        assert_eq!(sinc_power_integral(2).unwrap(), 1.0);
        assert_eq!(sinc_power_integral(4).unwrap(), 0.667);
        assert_eq!(sinc_power_integral(6).unwrap(), 0.55);
        assert!(sinc_power_integral(3).is_err());
        // Independent quadrature of the three constants.
        for (p, c) in [(2, 1.0), (4, 2.0 / 3.0), (6, 0.55)] {
            let q = crate::quad::integrate_with_breaks(
                |u| crate::special::sinc(u).powi(p),
                -2000.0,
                2000.0,
                &(-2000..=2000).map(|k| k as f64).collect::<Vec<_>>(),
                1e-10,
                0.0,
                100_000,
            )
            .unwrap();
            assert!((q.value - c).abs() < 2e-3, "p={p}: {}", q.value);
        }
    }

    // Exact second moment of the windowed cubic statistic, independent of
    // the closed forms: the six-fold product is expanded into quadrature
    // components, and each joint moment of a bivariate Gaussian pair follows
    // from Isserlis' theorem.
    fn double_fact(n: i64) -> f64 {
        if n <= 0 {
            1.0
        } else {
            n as f64 * double_fact(n - 2)
        }
    }

    fn binom(n: u32, k: u32) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    fn fact(n: u32) -> f64 {
        (1..=n).fold(1.0, |acc, i| acc * i as f64)
    }

    // E[U^i V^j] for zero-mean U, V with common variance s and covariance c.
    fn central(i: u32, j: u32, s: f64, c: f64) -> f64 {
        let mut tot = 0.0;
        for k in 0..=i.min(j) {
            if (i - k) % 2 == 1 || (j - k) % 2 == 1 {
                continue;
            }
            tot += binom(i, k) * binom(j, k) * fact(k) * c.powi(k as i32)
                * double_fact(i as i64 - k as i64 - 1)
                * double_fact(j as i64 - k as i64 - 1)
                * s.powi(((i + j - 2 * k) / 2) as i32);
        }
        tot
    }

    fn raw(m: u32, n: u32, mx: f64, my: f64, s: f64, c: f64) -> f64 {
        let mut tot = 0.0;
        for i in 0..=m {
            for j in 0..=n {
                tot += binom(m, i) * binom(n, j) * mx.powi((m - i) as i32) * my.powi((n - j) as i32)
                    * central(i, j, s, c);
            }
        }
        tot
    }

    fn exact_mu2(prd: f64, p: f64, s: f64, m: usize) -> f64 {
        let n = (prd as usize) * m + 1;
        let h = 1.0 / m as f64;
        let grid: Vec<f64> = (0..n).map(|i| -prd / 2.0 + i as f64 * h).collect();
        let w: Vec<f64> = (0..n)
            .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
            .collect();
        let a: Vec<f64> = grid.iter().map(|&x| p.sqrt() * crate::special::sinc(x)).collect();
        let mut tot = 0.0;
        for i in 0..n {
            for k in 0..n {
                let c = s * crate::special::sinc(grid[i] - grid[k]);
                let mut e = 0.0;
                for j in 0..=3u32 {
                    for l in 0..=3u32 {
                        e += binom(3, j) * binom(3, l)
                            * raw(2 * j, 2 * l, a[i], a[k], s, c)
                            * raw(2 * (3 - j), 2 * (3 - l), 0.0, 0.0, s, c);
                    }
                }
                tot += w[i] * w[k] * e;
            }
        }
        1e-8 * tot / (prd * prd)
    }

    #[test]
    fn second_moment_matches_exact_oracle() {
        let s = 0.0705;
        for (prd, p) in [(10.0, 2.0), (10.0, 4.0), (16.0, 3.0)] {
            let exact = exact_mu2(prd, p, s, 4);
            let closed = rx(s, p, prd).second_moment(Bit::One);
            assert!(rel(closed, exact) < 5e-3, "PRD {prd}, P {p}: {closed} vs {exact}");
        }
    }

    proptest! {
        #[test]
        fn variance_identity(s in 1e-3f64..1.0, p in 0.0f64..10.0, prd in 1.0f64..200.0, b in 0u8..2) {
            let bit = Bit::try_from(b).unwrap();
            let r = rx(s, p, prd);
            let m1 = r.mean(bit);
            let direct = r.variance(bit);
            let diff = r.second_moment(bit) - m1 * m1;
            prop_assert!(direct > 0.0);
            prop_assert!(((diff - direct) / direct).abs() < 1e-10);
        }

        #[test]
        fn moments_monotone(s in 1e-3f64..1.0, p in 0.0f64..10.0, prd in 1.0f64..200.0,
                            ds in 0.0f64..0.5, dp in 0.0f64..3.0) {
            let lo = rx(s, p, prd);
            for hi in [rx(s + ds, p, prd), rx(s, p + dp, prd)] {
                for bit in [Bit::Zero, Bit::One] {
                    prop_assert!(hi.mean(bit) >= lo.mean(bit));
                    prop_assert!(hi.second_moment(bit) >= lo.second_moment(bit));
                    prop_assert!(hi.third_moment(bit) >= lo.third_moment(bit));
                }
            }
        }

        #[test]
        fn scale_law(scale in 1e-6f64..1e2, f in 0.1f64..10.0, s in 1e-3f64..1.0, p in 0.0f64..10.0) {
            let a = CubicReceiver { scale, sigma0_sq: s, p_r: p, prd: 25.0 };
            let b = CubicReceiver { scale: scale * f, ..a };
            prop_assert!(rel(b.mean(Bit::One), f * a.mean(Bit::One)) < 1e-13);
            prop_assert!(rel(b.second_moment(Bit::One), f * f * a.second_moment(Bit::One)) < 1e-13);
            prop_assert!(rel(b.third_moment(Bit::One), f.powi(3) * a.third_moment(Bit::One)) < 1e-13);
        }

        #[test]
        fn triple_is_valid(s in 1e-3f64..1.0, p in 0.0f64..10.0, prd in 1.0f64..200.0, b in 0u8..2) {
            let bit = Bit::try_from(b).unwrap();
            prop_assert!(rx(s, p, prd).triple(bit).validate().is_ok());
        }
    }
}
