//! Physical and system parameters of the receiver chain.
//!
//! [`SystemParams`] holds what a user configures; [`DerivedParams`] holds the
//! quantities every other module consumes (per-quadrature ASE variance,
//! responsivity, detector response time).

use crate::error::{domain, Result};

/// Planck constant, J·s (exact, SI 2019).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Elementary charge, C (exact).
pub const ELECTRON_CHARGE: f64 = 1.602_176_634e-19;
/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;
/// Boltzmann constant, J/K (exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Receiver configuration in SI units.
///
/// `p_r` is the peak pulse power at the preprocessor input. The path loss
/// `l1` does not enter any formula once `p_r` is given; it is kept so that a
/// configuration file can describe the whole link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Pulse duration τ_c, seconds.
    pub tau_c: f64,
    /// Processing ratio T_p / τ_c.
    pub prd: f64,
    /// Optical wavelength, meters.
    pub lambda: f64,
    /// Amplifier power gain, linear.
    pub g_amp: f64,
    /// Loss before the amplifier, linear, in (0, 1].
    pub l1: f64,
    /// Loss after the amplifier, linear, in (0, 1].
    pub l2: f64,
    /// Spontaneous-emission coefficient.
    pub n_sp: f64,
    /// Photodetector quantum efficiency, in (0, 1].
    pub eta: f64,
    /// Preprocessor power transmittance k.
    pub k: f64,
    /// Nonlinear phase coefficient Γ, 1/W.
    pub gamma_nl: f64,
    /// Received peak power, W.
    pub p_r: f64,
    /// Receiver temperature, K.
    pub t_r: f64,
    /// Load resistance, Ω.
    pub r_l: f64,
}

impl SystemParams {
    /// The reference configuration: 100 fs sinc pulses at 1.55 µm, a 50 dB
    /// amplifier with n_sp = 1.1, k = 0.01, Γ = 0.1 /W, η = 0.8, 300 K,
    /// 1 kΩ load, PRD = 50 and 35 dBm received peak power.
    pub fn reference() -> Self {
        Self {
            tau_c: 100e-15,
            prd: 50.0,
            lambda: 1.55e-6,
            g_amp: 1e5,
            l1: 1.0,
            l2: 1.0,
            n_sp: 1.1,
            eta: 0.8,
            k: 0.01,
            gamma_nl: 0.1,
            p_r: dbm_to_watts(35.0),
            t_r: 300.0,
            r_l: 1e3,
        }
    }

    pub fn with_prd(mut self, prd: f64) -> Self {
        self.prd = prd;
        self
    }

    pub fn with_p_r(mut self, watts: f64) -> Self {
        self.p_r = watts;
        self
    }

    pub fn with_p_r_dbm(self, dbm: f64) -> Self {
        self.with_p_r(dbm_to_watts(dbm))
    }

    pub fn with_r_l(mut self, ohms: f64) -> Self {
        self.r_l = ohms;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let checks: [(bool, &str); 12] = [
            (self.tau_c > 0.0, "tau_c must be > 0"),
            (self.prd >= 1.0, "prd must be >= 1"),
            (self.lambda > 0.0, "lambda must be > 0"),
            (self.g_amp >= 1.0, "g_amp must be >= 1"),
            (self.l1 > 0.0 && self.l1 <= 1.0, "l1 must lie in (0, 1]"),
            (self.l2 > 0.0 && self.l2 <= 1.0, "l2 must lie in (0, 1]"),
            (self.n_sp >= 0.0, "n_sp must be >= 0"),
            (self.eta > 0.0 && self.eta <= 1.0, "eta must lie in (0, 1]"),
            (self.k > 0.0, "k must be > 0"),
            (self.gamma_nl > 0.0, "gamma_nl must be > 0"),
            (self.p_r >= 0.0, "p_r must be >= 0"),
            (self.t_r >= 0.0 && self.r_l > 0.0, "t_r must be >= 0 and r_l > 0"),
        ];
        for (ok, msg) in checks {
            // NaN fails every comparison above, so it lands here too.
            if !ok {
                return domain(msg);
            }
        }
        Ok(())
    }

    pub fn derive(&self) -> Result<DerivedParams> {
        derive(self)
    }
}

/// Quantities computed from [`SystemParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// Per-quadrature ASE variance σ0², W.
    pub sigma0_sq: f64,
    /// Responsivity R, A/W.
    pub responsivity: f64,
    /// Detector response time T_p = PRD·τ_c, s.
    pub t_p: f64,
    /// ASE one-sided spectral density δ = n_sp (G_amp − 1) hν, W/Hz.
    pub delta: f64,
    /// Optical frequency ν, Hz.
    pub nu: f64,
}

pub fn derive(sp: &SystemParams) -> Result<DerivedParams> {
    sp.validate()?;
    let nu = SPEED_OF_LIGHT / sp.lambda;
    let photon = PLANCK * nu;
    let delta = sp.n_sp * (sp.g_amp - 1.0) * photon;
    Ok(DerivedParams {
        sigma0_sq: delta * sp.l2 / (2.0 * sp.tau_c),
        responsivity: sp.eta * ELECTRON_CHARGE / photon,
        t_p: sp.prd * sp.tau_c,
        delta,
        nu,
    })
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> Result<f64> {
    if !(watts > 0.0) {
        return domain(format!("power must be > 0 W to express in dBm, got {watts}"));
    }
    Ok(10.0 * watts.log10() + 30.0)
}
