//! Bit-error-rate analysis of an ultrafast optical receiver with a
//! power-cubic nonlinear preprocessor.
//!
//! The analytical path goes closed-form moments ([`moments`]) → three-moment
//! Log-Pearson III fit ([`lp3`]) → optional shot/thermal convolution and
//! threshold optimization ([`detection`]). [`montecarlo`] simulates the
//! receiver directly and serves as the oracle for all of it; [`gof`] ranks
//! candidate laws against simulated samples.

pub mod ber;
pub mod detection;
pub mod error;
pub mod gof;
pub mod lp3;
pub mod moments;
pub mod montecarlo;
pub mod params;
pub mod quad;
pub mod roots;
pub mod special;

pub use error::{Error, Result};
pub use moments::{Bit, MomentTriple};
pub use params::{DerivedParams, SystemParams};

// Runs the README and guide snippets as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/receiver-model.md")]
    mod receiver_model {}
    #[doc = include_str!("../../../book/src/moments.md")]
    mod moments {}
    #[doc = include_str!("../../../book/src/lp3.md")]
    mod lp3 {}
    #[doc = include_str!("../../../book/src/detection.md")]
    mod detection {}
    #[doc = include_str!("../../../book/src/monte-carlo.md")]
    mod monte_carlo {}
    #[doc = include_str!("../../../book/src/goodness-of-fit.md")]
    mod goodness_of_fit {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/validation.md")]
    mod validation {}
}
