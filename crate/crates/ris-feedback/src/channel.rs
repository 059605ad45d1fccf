//! Channel model: deterministic array responses and random realizations.
//!
//! The uplink runs from a single-antenna UE through an `N`-element RIS to a
//! `K`-antenna base station, both modeled as half-wavelength uniform linear
//! arrays. The RIS-BS leg is pure LoS and kept in factored rank-1 form, the
//! UE-RIS leg is Rician, and the direct UE-BS path is Rayleigh.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::codebook::PhaseConfig;
use crate::{Error, Result};

/// Ordered complex amplitudes; the length is fixed by the producing array.
pub type ComplexVec = Vec<Complex64>;

/// Propagation angles of the three LoS legs, each in the open interval
/// (-pi/2, pi/2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Geometry {
    /// Departure angle at the RIS toward the BS.
    pub ris_to_bs: f64,
    /// Arrival angle at the RIS from the UE.
    pub ue_to_ris: f64,
    /// Arrival angle at the BS array.
    pub bs_arrival: f64,
}

impl Geometry {
    pub fn new(ris_to_bs: f64, ue_to_ris: f64, bs_arrival: f64) -> Result<Self> {
        for (name, angle) in [
            ("ris_to_bs", ris_to_bs),
            ("ue_to_ris", ue_to_ris),
            ("bs_arrival", bs_arrival),
        ] {
            if !(angle > -FRAC_PI_2 && angle < FRAC_PI_2) {
                return Err(Error::InvalidArgument(format!(
                    "angle {name} = {angle} outside (-pi/2, pi/2)"
                )));
            }
        }
        Ok(Self {
            ris_to_bs,
            ue_to_ris,
            bs_arrival,
        })
    }

    /// sin(theta_ris_to_bs) + sin(theta_ue_to_ris), the quantity the LoS
    /// codebook conveys. Always inside (-2, 2).
    pub fn sin_sum(&self) -> f64 {
        self.ris_to_bs.sin() + self.ue_to_ris.sin()
    }
}

/// Rician factor of the UE-RIS link. Pure LoS is a distinguished variant so
/// that the kappa -> infinity limit stays exact instead of being a huge
/// float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RicianFactor {
    PureLos,
    Linear(f64),
}

impl RicianFactor {
    pub fn from_db(db: f64) -> Self {
        RicianFactor::Linear(10f64.powf(db / 10.0))
    }

    pub fn is_pure_los(&self) -> bool {
        matches!(self, RicianFactor::PureLos)
    }
}

/// Average power gains of the three legs plus the Rician factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkGains {
    /// RIS -> BS linear power gain.
    pub beta_r: f64,
    /// UE -> RIS linear power gain.
    pub beta_t: f64,
    /// UE -> BS static-path linear power gain (0 disables the path).
    pub rho: f64,
    pub kappa: RicianFactor,
}

impl LinkGains {
    pub fn validate(&self) -> Result<()> {
        if self.beta_r <= 0.0 || !self.beta_r.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "beta_r must be positive, got {}",
                self.beta_r
            )));
        }
        if self.beta_t <= 0.0 || !self.beta_t.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "beta_t must be positive, got {}",
                self.beta_t
            )));
        }
        if self.rho < 0.0 || !self.rho.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "rho must be nonnegative, got {}",
                self.rho
            )));
        }
        if let RicianFactor::Linear(k) = self.kappa {
            if k < 0.0 || !k.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "kappa must be nonnegative, got {k}"
                )));
            }
        }
        Ok(())
    }
}

/// Descriptor of one reproducible random stream.
///
/// The same `(master_seed, stream_index)` pair always yields the same sample
/// sequence, and distinct stream indices give statistically independent
/// streams, so trial `i` of a Monte Carlo run can use stream `i` regardless
/// of scheduling order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    /// Derives a fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Array response of a half-wavelength ULA: entry `m` is
/// `exp(-j pi m sin(angle))`, all unit magnitude.
pub fn array_response(size: usize, angle: f64) -> Result<ComplexVec> {
    if size == 0 {
        return Err(Error::InvalidArgument(
            "array size must be at least 1".into(),
        ));
    }
    let phase_step = -PI * angle.sin();
    Ok((0..size)
        .map(|m| Complex64::from_polar(1.0, phase_step * m as f64))
        .collect())
}

/// One draw of a circularly symmetric complex Gaussian with unit variance
/// (real and imaginary parts each N(0, 1/2)).
fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Samples the UE-RIS channel under Rician fading:
/// `sqrt(kappa beta_t / (kappa+1)) a_N(angle) + sqrt(beta_t / (kappa+1)) w`
/// with `w` i.i.d. CN(0, 1). The pure-LoS variant returns
/// `sqrt(beta_t) a_N(angle)` exactly and consumes no randomness.
pub fn sample_rician_ht<R: Rng>(
    elements: usize,
    ue_to_ris: f64,
    beta_t: f64,
    kappa: RicianFactor,
    rng: &mut R,
) -> ComplexVec {
    let los = array_response(elements, ue_to_ris).expect("element count checked by caller");
    match kappa {
        RicianFactor::PureLos => {
            let amp = beta_t.sqrt();
            los.into_iter().map(|a| a * amp).collect()
        }
        RicianFactor::Linear(k) => {
            let los_amp = (k * beta_t / (k + 1.0)).sqrt();
            let nlos_amp = (beta_t / (k + 1.0)).sqrt();
            los.into_iter()
                .map(|a| a * los_amp + complex_gaussian(rng) * nlos_amp)
                .collect()
        }
    }
}

/// Samples the Rayleigh static path `h_s ~ CN(0, rho I_K)`. A zero gain
/// returns the zero vector without consuming randomness.
pub fn sample_static_path<R: Rng>(antennas: usize, rho: f64, rng: &mut R) -> ComplexVec {
    if rho == 0.0 {
        return vec![Complex64::ZERO; antennas];
    }
    let amp = rho.sqrt();
    (0..antennas).map(|_| complex_gaussian(rng) * amp).collect()
}

/// Assembles the end-to-end channel
/// `h = h_s + sqrt(beta_r) a_K(bs_arrival) e^{j phi} (a_N(ris_to_bs)^T D h_t)`
/// for a given RIS configuration. `h_t` already carries `sqrt(beta_t)`; the
/// rank-1 RIS-BS leg is never materialized as a matrix.
pub fn end_to_end_channel(
    geometry: &Geometry,
    gains: &LinkGains,
    h_t: &[Complex64],
    h_s: &[Complex64],
    config: &PhaseConfig,
) -> Result<ComplexVec> {
    if config.len() != h_t.len() {
        return Err(Error::InvalidArgument(format!(
            "configuration has {} phases but the RIS channel has {} entries",
            config.len(),
            h_t.len()
        )));
    }
    if h_s.is_empty() {
        return Err(Error::InvalidArgument(
            "static path vector must have at least one entry".into(),
        ));
    }
    let ris_response = array_response(h_t.len(), geometry.ris_to_bs)?;
    let bs_response = array_response(h_s.len(), geometry.bs_arrival)?;

    let cascade: Complex64 = ris_response
        .iter()
        .zip(config.element_phases())
        .zip(h_t)
        .map(|((a, &psi), ht)| a * Complex64::from_polar(1.0, psi) * ht)
        .sum();
    let reflected = Complex64::from_polar(gains.beta_r.sqrt(), config.common_phase()) * cascade;

    Ok(h_s
        .iter()
        .zip(&bs_response)
        .map(|(hs, ak)| hs + ak * reflected)
        .collect())
}

/// Maximum-ratio-combining channel gain, the squared Euclidean norm of `h`.
pub fn channel_gain(h: &[Complex64]) -> f64 {
    h.iter().map(Complex64::norm_sqr).sum()
}
