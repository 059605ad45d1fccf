//! Closed-form array gains, expected channel gains, and SNR helpers.
//!
//! These formulas double as fast evaluators and as oracles for the Monte
//! Carlo engine: every random experiment in [`crate::montecarlo`] has its
//! mean pinned by one of the expressions here.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::channel::RicianFactor;
use crate::codebook::PhaseConfig;

/// Normalized sinc, `sin(pi x) / (pi x)` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

/// Additive decomposition of an expected channel gain (linear power units).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GainBreakdown {
    /// Beamformed LoS contribution.
    pub los: f64,
    /// Diffuse (non-LoS) contribution through the RIS.
    pub nlos: f64,
    /// Direct-path contribution bypassing the RIS.
    pub static_path: f64,
    /// Constructive interference between the RIS path and the static path.
    pub cross: f64,
}

impl GainBreakdown {
    pub fn total(&self) -> f64 {
        self.los + self.nlos + self.static_path + self.cross
    }
}

/// Array gain of an `elements`-element RIS whose phase ramp misses the true
/// angle sum by `delta`:
/// `|1 - e^{-j N pi delta}|^2 / |1 - e^{-j pi delta}|^2`.
///
/// The ratio has removable singularities wherever `e^{-j pi delta} = 1`;
/// near those points the geometric sum is evaluated through its sinc-ratio
/// limit instead, which is exactly `N^2` at the singularity itself.
pub fn array_gain_exact(elements: usize, delta: f64) -> f64 {
    assert!(elements >= 1, "RIS needs at least one element");
    let n = elements as f64;
    let half = PI * delta / 2.0;
    // |1 - e^{-j pi delta}| = 2 |sin(pi delta / 2)|
    if (2.0 * half.sin()).abs() < 1e-9 {
        // Reduce delta by its period of 2 before taking the limit so the
        // sinc ratio is evaluated near zero, where it is well conditioned.
        let reduced = delta - 2.0 * (delta / 2.0).round();
        let amplitude = n * sinc(n * reduced / 2.0) / sinc(reduced / 2.0);
        return amplitude * amplitude;
    }
    let ratio = (n * half).sin() / half.sin();
    ratio * ratio
}

/// Small-offset approximation of [`array_gain_exact`]:
/// `N^2 sinc^2(N delta / 2)`.
pub fn array_gain_approx(elements: usize, delta: f64) -> f64 {
    let n = elements as f64;
    let s = sinc(n * delta / 2.0);
    n * n * s * s
}

/// Array gain of an arbitrary configuration at the given angles:
/// `|sum_n e^{-j (pi n (sin t1 + sin t2) - psi_n)}|^2`. The common rotation
/// shifts every term identically, so it never enters the result.
pub fn array_gain_of_config(ris_to_bs: f64, ue_to_ris: f64, config: &PhaseConfig) -> f64 {
    let slope = PI * (ris_to_bs.sin() + ue_to_ris.sin());
    let sum: Complex64 = config
        .element_phases()
        .iter()
        .enumerate()
        .map(|(n, &psi)| Complex64::from_polar(1.0, psi - slope * n as f64))
        .sum();
    sum.norm_sqr()
}

/// Half-power beamwidth of the array gain in the sin-angle domain,
/// approximately `1.772 / N`.
pub fn hpbw(elements: usize) -> f64 {
    1.772 / elements as f64
}

/// Expected array gain when each element phase is rounded independently to
/// one of `2^bits` uniform points:
/// `N^2 sinc^2(2^-b) + N (1 - sinc^2(2^-b))`.
pub fn elementwise_expected_gain(elements: usize, bits: u32) -> f64 {
    let n = elements as f64;
    let s2 = sinc(2f64.powi(-(bits as i32))).powi(2);
    n * n * s2 + n * (1.0 - s2)
}

/// Expected channel gain of an ideally configured RIS over a Rician UE-RIS
/// link: the LoS component keeps the full `N^2` array gain while the diffuse
/// component only collects energy proportional to `N`.
pub fn rician_expected_gain(
    bs_antennas: usize,
    ris_elements: usize,
    kappa: RicianFactor,
    beta_r: f64,
    beta_t: f64,
) -> GainBreakdown {
    let k = bs_antennas as f64;
    let n = ris_elements as f64;
    let full = k * n * n * beta_r * beta_t;
    let diffuse = k * n * beta_r * beta_t;
    match kappa {
        RicianFactor::PureLos => GainBreakdown {
            los: full,
            ..Default::default()
        },
        RicianFactor::Linear(factor) => GainBreakdown {
            los: factor / (factor + 1.0) * full,
            nlos: 1.0 / (factor + 1.0) * diffuse,
            ..Default::default()
        },
    }
}

/// Resolution of the common-rotation feedback used by
/// [`static_expected_gain`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommonPhaseBits {
    /// The rotation is conveyed with unlimited precision.
    Unquantized,
    /// The rotation is rounded to `2^d` points; zero bits convey nothing.
    Bits(u32),
}

/// Expected channel gain of an ideally configured RIS over a pure LoS
/// cascade plus a Rayleigh static path, with the common rotation fed back at
/// the given resolution. Quantizing the rotation scales the cross term by
/// `sinc(2^-d)`; without any rotation information it averages to zero.
pub fn static_expected_gain(
    bs_antennas: usize,
    ris_elements: usize,
    beta_r: f64,
    beta_t: f64,
    rho: f64,
    common: CommonPhaseBits,
) -> GainBreakdown {
    let k = bs_antennas as f64;
    let n = ris_elements as f64;
    let full_cross = n * (PI * beta_r * beta_t * k * rho).sqrt();
    let cross = match common {
        CommonPhaseBits::Unquantized => full_cross,
        CommonPhaseBits::Bits(0) => 0.0,
        CommonPhaseBits::Bits(d) => sinc(2f64.powi(-(d as i32))) * full_cross,
    };
    GainBreakdown {
        los: n * n * k * beta_r * beta_t,
        nlos: 0.0,
        static_path: k * rho,
        cross,
    }
}

/// Rician factor versus UE-RIS distance from the 3GPP spatial channel
/// model, `13 - 0.03 m` dB, returned in linear scale.
pub fn rician_factor_3gpp(distance_m: f64) -> f64 {
    10f64.powf((13.0 - 0.03 * distance_m) / 10.0)
}

/// Linear SNR for a transmit power, receiver noise power, and channel gain.
pub fn snr_linear(tx_power_w: f64, noise_power_w: f64, gain: f64) -> f64 {
    tx_power_w * gain / noise_power_w
}

/// Power ratio to decibels; zero maps to `-inf`.
pub fn db_from_linear(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Decibels to power ratio.
pub fn linear_from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// dBm to watts.
pub fn watts_from_dbm(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Watts to dBm.
pub fn dbm_from_watts(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}
