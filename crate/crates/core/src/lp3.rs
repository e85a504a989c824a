//! Log-Pearson type III law: `ln Y = γ + β·G` with `G ~ Gamma(α, 1)`.
//!
//! With `z = (ln y − γ)/β` the density is
//! `z^(α−1) e^(−z) / (y |β| Γ(α))` on `z ≥ 0`; the support is `[e^γ, ∞)` for
//! `β > 0` and `(0, e^γ]` for `β < 0`.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{domain, Error, Result};
use crate::moments::MomentTriple;
use crate::roots;
use crate::special::{
    inv_reg_gamma_p, inv_reg_gamma_q, ln_gamma_density, log1pmx, normal_cdf, normal_quantile,
    normal_sf, reg_gamma_p, reg_gamma_q,
};

/// Shape above which the gamma law in `ln Y` is evaluated through the
/// Wilson–Hilferty normal limit.
pub const LARGE_SHAPE: f64 = 1e7;

/// |β| reported by the near-lognormal fallback of [`fit_from_moments`].
pub const FALLBACK_BETA: f64 = 1e-9;

/// Parameters (α, β, γ) of one LP3 law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lp3Params {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Lp3Params {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return domain(format!("alpha must be > 0, got {alpha}"));
        }
        if beta == 0.0 || !beta.is_finite() {
            return domain(format!("beta must be finite and nonzero, got {beta}"));
        }
        if !gamma.is_finite() {
            return domain(format!("gamma must be finite, got {gamma}"));
        }
        Ok(Self { alpha, beta, gamma })
    }

    fn z(&self, y: f64) -> Result<f64> {
        if !(y > 0.0) {
            return domain(format!("LP3 is defined for y > 0, got {y}"));
        }
        Ok((y.ln() - self.gamma) / self.beta)
    }

    /// Support endpoints `(lo, hi)`.
    pub fn support(&self) -> (f64, f64) {
        let edge = self.gamma.exp();
        if self.beta > 0.0 {
            (edge, f64::INFINITY)
        } else {
            (0.0, edge)
        }
    }

    pub fn pdf(&self, y: f64) -> Result<f64> {
        let z = self.z(y)?;
        if z < 0.0 {
            return Ok(0.0);
        }
        if z == 0.0 {
            return match self.alpha {
                a if a < 1.0 => Err(Error::Singular(y)),
                1.0 => Ok(1.0 / (y * self.beta.abs())),
                _ => Ok(0.0),
            };
        }
        Ok(ln_gamma_density(self.alpha, z).exp() / (y * self.beta.abs()))
    }

    /// `P(G ≤ g)` and `P(G > g)` for the underlying unit gamma variable.
    fn gamma_tails(&self, g: f64) -> Result<(f64, f64)> {
        let a = self.alpha;
        if a > LARGE_SHAPE {
            let c = 1.0 / (9.0 * a);
            let w = ((g / a).cbrt() - (1.0 - c)) / c.sqrt();
            return Ok((normal_cdf(w), normal_sf(w)));
        }
        let p = reg_gamma_p(a, g)?;
        let q = reg_gamma_q(a, g)?;
        Ok((p, q))
    }

    fn gamma_inverse(&self, p: f64, upper: bool) -> Result<f64> {
        let a = self.alpha;
        if a > LARGE_SHAPE {
            let w = if upper { -normal_quantile(p) } else { normal_quantile(p) };
            let c = 1.0 / (9.0 * a);
            return Ok(a * (1.0 - c + w * c.sqrt()).max(0.0).powi(3));
        }
        if upper {
            inv_reg_gamma_q(a, p)
        } else {
            inv_reg_gamma_p(a, p)
        }
    }

    pub fn cdf(&self, y: f64) -> Result<f64> {
        let z = self.z(y)?.max(0.0);
        let (p, q) = self.gamma_tails(z)?;
        Ok(if self.beta > 0.0 { p } else { q })
    }

    /// Survival function `1 − cdf`, without cancellation in the upper tail.
    pub fn sf(&self, y: f64) -> Result<f64> {
        let z = self.z(y)?.max(0.0);
        let (p, q) = self.gamma_tails(z)?;
        Ok(if self.beta > 0.0 { q } else { p })
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return domain(format!("probability must lie in [0, 1], got {p}"));
        }
        let g = if self.beta > 0.0 {
            self.gamma_inverse(p, false)?
        } else {
            self.gamma_inverse(p, true)?
        };
        Ok((self.gamma + self.beta * g).exp())
    }

    /// Raw moment `E[Yⁿ] = e^(nγ) (1 − nβ)^(−α)`.
    pub fn moment(&self, n: u32) -> Result<f64> {
        let nb = n as f64 * self.beta;
        if nb >= 1.0 {
            return Err(Error::Divergent { order: n, beta: self.beta });
        }
        Ok((n as f64 * self.gamma - self.alpha * (-nb).ln_1p()).exp())
    }

    /// Draws one variate as `exp(γ + β·G)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let g = Gamma::new(self.alpha, 1.0).expect("validated shape");
        (self.gamma + self.beta * g.sample(rng)).exp()
    }
}

pub fn pdf(p: &Lp3Params, y: f64) -> Result<f64> {
    p.pdf(y)
}

pub fn cdf(p: &Lp3Params, y: f64) -> Result<f64> {
    p.cdf(y)
}

pub fn moment(p: &Lp3Params, n: u32) -> Result<f64> {
    p.moment(n)
}

/// `n·ln(1 − β) − ln(1 − nβ)`, evaluated without cancellation near β = 0.
fn log_gap(n: f64, beta: f64) -> f64 {
    if (n * beta).abs() < 0.25 {
        n * log1pmx(-beta) - log1pmx(-n * beta)
    } else {
        n * (-beta).ln_1p() - (-n * beta).ln_1p()
    }
}

/// Left side of the β equation,
/// `g(β) = (3 ln(1−β) − ln(1−3β)) / (2 ln(1−β) − ln(1−2β))`.
///
/// Increasing on `(−∞, 1/3)`, from 2 at −∞ through 3 at 0 to ∞ at 1/3.
pub fn beta_ratio(beta: f64) -> f64 {
    if beta == 0.0 {
        return 3.0;
    }
    log_gap(3.0, beta) / log_gap(2.0, beta)
}

/// Three-moment solve for (α, β, γ).
pub fn fit_from_moments(m: &MomentTriple) -> Result<Lp3Params> {
    let (mu1, mu2, mu3) = (m.mu1, m.mu2, m.mu3);
    if !(mu1 > 0.0 && mu2 > 0.0 && mu3 > 0.0) || !(mu1 * mu2 * mu3).is_finite() {
        return Err(Error::NoSolution(format!(
            "moments must be positive and finite, got ({mu1}, {mu2}, {mu3})"
        )));
    }
    let (l1, l2, l3) = (mu1.ln(), mu2.ln(), mu3.ln());
    let den = l2 - 2.0 * l1;
    if !(den > 0.0) {
        return Err(Error::NoSolution(format!(
            "ln mu2 - 2 ln mu1 = {den:e} is not positive"
        )));
    }
    let rho = (l3 - 3.0 * l1) / den;
    if !(rho > 2.0) {
        return Err(Error::NoSolution(format!(
            "moment ratio rho = {rho} must exceed 2"
        )));
    }
    let beta = if (rho - 3.0).abs() < 1e-9 {
        if rho >= 3.0 {
            FALLBACK_BETA
        } else {
            -FALLBACK_BETA
        }
    } else {
        solve_beta(rho)?
    };
    let alpha = den / log_gap(2.0, beta);
    let gamma = l1 + alpha * (-beta).ln_1p();
    Lp3Params::new(alpha, beta, gamma)
        .map_err(|e| Error::NoSolution(format!("fitted parameters invalid: {e}")))
}

fn solve_beta(rho: f64) -> Result<f64> {
    let f = |b: f64| beta_ratio(b) - rho;
    if rho > 3.0 {
        let hi = 1.0 / 3.0 - 1e-15;
        if f(hi) < 0.0 {
            return Err(Error::NoSolution(format!(
                "rho = {rho} exceeds g(beta) on the whole positive branch"
            )));
        }
        return roots::brent(f, 1e-12, hi, 1e-300, 1e-15, 500);
    }
    let mut lo = -10.0;
    while f(lo) > 0.0 {
        lo *= 10.0;
        if lo < -1e300 {
            return Err(Error::NoSolution(format!(
                "rho = {rho} is too close to the limit 2 of g(beta)"
            )));
        }
    }
    roots::brent(f, lo, -1e-12, 1e-300, 1e-15, 500)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::Bit;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lp3(a: f64, b: f64, g: f64) -> Lp3Params {
        Lp3Params::new(a, b, g).unwrap()
    }

    fn triple(p: &Lp3Params) -> MomentTriple {
        MomentTriple::new(
            p.moment(1).unwrap(),
            p.moment(2).unwrap(),
            p.moment(3).unwrap(),
            Bit::One,
        )
    }

    #[test]
    fn pdf_support_boundary_and_exponential_case() {
        assert_eq!(lp3(2.0, 0.1, 0.0).pdf(1.0).unwrap(), 0.0);
        let e = std::f64::consts::E;
        let p = lp3(1.0, 1.0, 0.0);
        assert!((p.pdf(e).unwrap() - e.powi(-2)).abs() < 1e-15);
        assert!((p.pdf(3.0).unwrap() - 1.0 / 9.0).abs() < 1e-15);
        assert_eq!(p.pdf(0.5).unwrap(), 0.0);
        assert!(p.pdf(0.0).is_err());
        assert!(matches!(lp3(0.5, 0.2, 0.0).pdf(1.0), Err(Error::Singular(_))));
    }

    #[test]
    fn cdf_examples() {
        let e = std::f64::consts::E;
        let p = lp3(1.0, 1.0, 0.0);
        assert!((p.cdf(e).unwrap() - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert_eq!(lp3(2.0, 0.3, 0.5).cdf(0.5f64.exp()).unwrap(), 0.0);
        let neg = lp3(2.0, -0.3, 0.5);
        assert_eq!(neg.cdf(0.5f64.exp()).unwrap(), 1.0);
        assert!(neg.cdf(0.5f64.exp() * (1.0 - 1e-12)).unwrap() > 1.0 - 1e-12);
        assert!(p.cdf(-1.0).is_err());
    }

    #[test]
    fn moment_examples() {
        let p = lp3(2.0, 0.1, 0.0);
        assert!((p.moment(1).unwrap() - 0.9f64.powi(-2)).abs() < 1e-15);
        assert!((p.moment(2).unwrap() - 1.5625).abs() < 1e-14);
        assert!((p.moment(3).unwrap() - 0.7f64.powi(-2)).abs() < 1e-14);
        assert!((p.moment(1).unwrap() - 1.234568).abs() < 1e-6);
        assert!((p.moment(3).unwrap() - 2.040816).abs() < 1e-6);
        assert!(matches!(lp3(2.0, 0.4, 0.0).moment(3), Err(Error::Divergent { order: 3, .. })));
    }

    #[test]
    fn fit_recovers_reference_example() {
        let m = MomentTriple::new(1.234568, 1.5625, 2.040816, Bit::One);
        let p = fit_from_moments(&m).unwrap();
        assert!((p.alpha - 2.0).abs() < 1e-3);
        assert!((p.beta - 0.1).abs() < 1e-4);
        assert!(p.gamma.abs() < 1e-4);
    }

    #[test]
    fn fit_rejects_bad_triples() {
        for (a, b, c) in [(1.0, 0.9, 1.0), (1.0, 1.0, 1.0), (1.0, 2.0, 1.5), (-1.0, 1.0, 1.0)] {
            assert!(matches!(
                fit_from_moments(&MomentTriple::new(a, b, c, Bit::Zero)),
                Err(Error::NoSolution(_))
            ));
        }
    }

    #[test]
    fn near_lognormal_fallback() {
        // Exactly lognormal moments give rho = 3.
        let (m, s2) = (0.3f64, 0.2f64);
        let mom = |n: f64| (n * m + 0.5 * n * n * s2).exp();
        let t = MomentTriple::new(mom(1.0), mom(2.0), mom(3.0), Bit::One);
        let p = fit_from_moments(&t).unwrap();
        assert_eq!(p.beta.abs(), FALLBACK_BETA);
        for n in 1..=2 {
            let got = p.moment(n).unwrap();
            assert!(((got - mom(n as f64)) / mom(n as f64)).abs() < 1e-6);
        }
        // The limit law is the lognormal.
        let y = (m + 0.7 * s2.sqrt()).exp();
        assert!((p.cdf(y).unwrap() - normal_cdf(0.7)).abs() < 1e-6);
        let q = p.quantile(normal_cdf(0.7)).unwrap();
        assert!(((q - y) / y).abs() < 1e-6);
    }

    #[test]
    fn beta_ratio_removable_singularity() {
        for b in [1e-6, -1e-6] {
            assert!((beta_ratio(b) - 3.0).abs() < 1e-4);
        }
        assert!((beta_ratio(0.1) - (3.0 * 0.9f64.ln() - 0.7f64.ln()) / (2.0 * 0.9f64.ln() - 0.8f64.ln())).abs() < 1e-12);
        // The approach to 2 is only logarithmic.
        assert!(beta_ratio(-1e6) > 2.0 && beta_ratio(-1e6) < 2.05);
        assert!(beta_ratio(-1e100) < 2.002);
    }

    #[test]
    fn pdf_integrates_to_one() {
        let probs = [1e-9, 1e-6, 1e-3, 0.1, 0.5, 0.9, 0.999, 1.0 - 1e-6, 1.0 - 1e-9];
        for p in [lp3(2.0, 0.1, 0.0), lp3(0.7, -0.2, 1.0), lp3(30.0, 0.05, -2.0)] {
            let (lo, hi) = (p.quantile(1e-10).unwrap(), p.quantile(1.0 - 1e-10).unwrap());
            let breaks: Vec<f64> = probs.iter().map(|&u| p.quantile(u).unwrap()).collect();
            let q = crate::quad::integrate_with_breaks(
                |y| p.pdf(y).unwrap(),
                lo,
                hi,
                &breaks,
                1e-13,
                0.0,
                5000,
            )
            .unwrap();
            // The two clipped tails hold 2e-10 of mass.
            assert!((q.value + 2e-10 - 1.0).abs() < 1e-8, "{p:?}: {}", q.value);
        }
    }

    #[test]
    fn derivative_of_cdf_is_pdf() {
        let p = lp3(3.5, -0.12, 0.4);
        for i in 0..20 {
            let y = p.quantile((i as f64 + 0.5) / 20.0).unwrap();
            let h = y * 1e-5;
            let d = (p.cdf(y + h).unwrap() - p.cdf(y - h).unwrap()) / (2.0 * h);
            let f = p.pdf(y).unwrap();
            assert!(((d - f) / f).abs() < 1e-6);
        }
    }

    #[test]
    fn sampling_mean_matches_moment() {
        let p = lp3(4.0, 0.08, 0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let mean = (0..n).map(|_| p.sample(&mut rng)).sum::<f64>() / n as f64;
        let mu = p.moment(1).unwrap();
        assert!(((mean - mu) / mu).abs() < 0.01);
    }

    #[test]
    fn inverse_cdf_sampling_mean_matches_moment() {
        let p = lp3(3.0, -0.1, 0.2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 20_000;
        let mean = (0..n)
            .map(|_| p.quantile(rng.random::<f64>()).unwrap())
            .sum::<f64>()
            / n as f64;
        let mu = p.moment(1).unwrap();
        assert!(((mean - mu) / mu).abs() < 0.01);
    }

    proptest! {
        #[test]
        fn round_trip(a in 0.5f64..50.0, b in -0.3f64..0.3, g in -5.0f64..5.0) {
            prop_assume!(b.abs() >= 1e-3);
            let p = lp3(a, b, g);
            let f = fit_from_moments(&triple(&p)).unwrap();
            prop_assert!((f.beta - b).abs() < 1e-9);
            prop_assert!(((f.alpha - a) / a).abs() < 1e-7);
            prop_assert!((f.gamma - g).abs() < 1e-7 * g.abs().max(1.0));
        }

        #[test]
        fn cdf_monotone_and_bounded(a in 0.3f64..60.0, b in -0.5f64..0.5, g in -3.0f64..3.0,
                                    u in 0.001f64..0.999, du in 1e-4f64..0.5) {
            prop_assume!(b.abs() > 1e-3);
            let p = lp3(a, b, g);
            let y = p.quantile(u).unwrap();
            let y2 = y * (1.0 + du);
            let (c1, c2) = (p.cdf(y).unwrap(), p.cdf(y2).unwrap());
            prop_assert!((0.0..=1.0).contains(&c1));
            prop_assert!(c2 >= c1);
            prop_assert!((c1 + p.sf(y).unwrap() - 1.0).abs() < 1e-14);
            prop_assert!(p.pdf(y2).unwrap() >= 0.0);
            prop_assert!((c1 - u).abs() < 1e-10);
        }

        #[test]
        fn beta_ratio_monotone(b in -5.0f64..0.33, db in 1e-6f64..0.1) {
            prop_assume!(b + db < 1.0 / 3.0);
            prop_assert!(beta_ratio(b + db) > beta_ratio(b));
        }
    }
}
