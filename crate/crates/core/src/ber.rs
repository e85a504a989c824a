//! End-to-end error probability for one operating point.

use crate::detection::{
    gaussian_approx_ber, optimize_threshold, BitConditionedLaw, Law, NoisePhysics, ThresholdResult,
    ThresholdSearch,
};
use crate::error::{Error, Result};
use crate::lp3::{fit_from_moments, Lp3Params};
use crate::moments::{linear_mean_variance, Bit, CubicReceiver};
use crate::montecarlo::Order;
use crate::params::{DerivedParams, SystemParams};

/// Moment-fitted LP3 laws of the cubic receiver for bits 0 and 1.
pub fn cubic_laws(sp: &SystemParams, dp: &DerivedParams) -> Result<(Lp3Params, Lp3Params)> {
    let rx = CubicReceiver::new(sp, dp);
    Ok((fit_from_moments(&rx.triple(Bit::Zero))?, fit_from_moments(&rx.triple(Bit::One))?))
}

/// Optimum-threshold error probability of the cubic receiver under the LP3
/// model, optionally convolved with shot and thermal noise.
pub fn lp3_ber(sp: &SystemParams, dp: &DerivedParams, shot_thermal: bool) -> Result<ThresholdResult> {
    let (l0, l1) = cubic_laws(sp, dp)?;
    let mut f0 = BitConditionedLaw::new(Bit::Zero, Law::Lp3(l0));
    let mut f1 = BitConditionedLaw::new(Bit::One, Law::Lp3(l1));
    if shot_thermal {
        let np = NoisePhysics::new(sp, dp);
        f0 = f0.with_shot_thermal(np);
        f1 = f1.with_shot_thermal(np);
    }
    let rx = CubicReceiver::new(sp, dp);
    let search = ThresholdSearch::from_means(rx.mean(Bit::Zero), rx.mean(Bit::One));
    optimize_threshold(&f0, &f1, &search)
}

/// Gaussian approximation from the closed-form mean and variance. Available
/// for the linear and cubic receivers.
pub fn gauss_ber(sp: &SystemParams, dp: &DerivedParams, order: Order) -> Result<ThresholdResult> {
    let ((m0, v0), (m1, v1)) = match order {
        Order::LINEAR => (
            linear_mean_variance(sp, dp, Bit::Zero),
            linear_mean_variance(sp, dp, Bit::One),
        ),
        Order::CUBIC => {
            let rx = CubicReceiver::new(sp, dp);
            (
                (rx.mean(Bit::Zero), rx.variance(Bit::Zero)),
                (rx.mean(Bit::One), rx.variance(Bit::One)),
            )
        }
        other => {
            return Err(Error::Unsupported(format!(
                "no closed-form moments for receiver order {other}"
            )))
        }
    };
    gaussian_approx_ber(m0, v0, m1, v1)
}
