//! Seeded, parallel Monte Carlo engine behind the SNR-versus-feedback-bits
//! experiments.
//!
//! Each trial is one independent coherence block: draw the three LoS angles
//! and the fading realizations, let the BS compute the configuration the
//! active feedback scheme can convey, and score the resulting uplink SNR.
//! Trial `i` always consumes random stream `i` of the master seed, so
//! per-trial results are independent of scheduling and a parallel run
//! reproduces the sequential one.

use std::f64::consts::FRAC_PI_2;

use rand::distr::{Distribution, Uniform};
use rand::Rng;
use rayon::prelude::*;

use crate::analysis::{db_from_linear, snr_linear};
use crate::channel::{
    array_response, channel_gain, end_to_end_channel, sample_rician_ht, sample_static_path,
    Geometry, LinkGains, RngStream,
};
use crate::codebook::{
    optimal_common_phase, optimal_phases, quantize_common_phase, quantize_elementwise, LosCodebook,
};
use crate::{Error, Result};

/// Feedback scheme under test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Unquantized configuration; the upper bound every message competes
    /// against.
    Ideal,
    /// One angle-sum codebook index plus a quantized common rotation,
    /// `index_bits + common_bits` feedback bits in total.
    Codebook { index_bits: u32, common_bits: u32 },
    /// Independent per-element quantization, `N * element_bits` feedback
    /// bits in total.
    Elementwise { element_bits: u32 },
}

impl Scheme {
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::Ideal => "ideal",
            Scheme::Codebook { .. } => "codebook",
            Scheme::Elementwise { .. } => "elementwise",
        }
    }

    /// Total feedback bits the scheme needs for an RIS of the given size;
    /// `None` for the ideal reference, which no finite message realizes.
    pub fn feedback_bits(&self, ris_elements: usize) -> Option<u64> {
        match self {
            Scheme::Ideal => None,
            Scheme::Codebook {
                index_bits,
                common_bits,
            } => Some(u64::from(*index_bits) + u64::from(*common_bits)),
            Scheme::Elementwise { element_bits } => {
                Some(ris_elements as u64 * u64::from(*element_bits))
            }
        }
    }
}

/// Full parameterization of one experiment. Angles are always drawn
/// uniformly over (-pi/2, pi/2); gains and powers are linear units.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub bs_antennas: usize,
    pub ris_elements: usize,
    pub tx_power_w: f64,
    pub noise_power_w: f64,
    pub gains: LinkGains,
    pub scheme: Scheme,
    pub trials: u64,
    pub master_seed: u64,
}

impl Default for Scenario {
    /// Baseline parameter set: 128-element RIS, 4 BS antennas, -80 dB leg
    /// gains, -120 dB static path, 10 dB Rician factor, 100 mW transmit
    /// power, -100.9 dBm noise power, 10 000 trials.
    fn default() -> Self {
        Scenario {
            bs_antennas: 4,
            ris_elements: 128,
            tx_power_w: 0.1,
            noise_power_w: crate::analysis::watts_from_dbm(-100.9),
            gains: LinkGains {
                beta_r: 1e-8,
                beta_t: 1e-8,
                rho: 1e-12,
                kappa: crate::channel::RicianFactor::Linear(10.0),
            },
            scheme: Scheme::Ideal,
            trials: 10_000,
            master_seed: 42,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.bs_antennas == 0 {
            return Err(Error::InvalidArgument("K must be at least 1".into()));
        }
        if self.ris_elements == 0 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        if self.tx_power_w <= 0.0 || !self.tx_power_w.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "transmit power must be positive, got {}",
                self.tx_power_w
            )));
        }
        if self.noise_power_w <= 0.0 || !self.noise_power_w.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "noise power must be positive, got {}",
                self.noise_power_w
            )));
        }
        self.gains.validate()?;
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        match self.scheme {
            Scheme::Ideal => {}
            Scheme::Codebook {
                index_bits,
                common_bits,
            } => {
                if index_bits > 32 || common_bits > 32 {
                    return Err(Error::InvalidArgument(
                        "codebook bit widths must be at most 32".into(),
                    ));
                }
            }
            Scheme::Elementwise { element_bits } => {
                if element_bits == 0 || element_bits > 32 {
                    return Err(Error::InvalidArgument(
                        "element-wise quantizer needs between 1 and 32 bits".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn with_scheme(&self, scheme: Scheme) -> Scenario {
        Scenario {
            scheme,
            ..self.clone()
        }
    }
}

/// Monte Carlo summary of one scenario. SNR is averaged in the linear
/// domain and converted to dB afterwards.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aggregate {
    pub mean_snr_linear: f64,
    pub mean_snr_db: f64,
    pub sample_std: f64,
    pub ci95_halfwidth: f64,
    pub trials: u64,
}

impl Aggregate {
    /// Summarizes per-trial linear SNRs. The standard deviation is the
    /// sample estimate (n - 1 denominator, zero for a single trial) and the
    /// confidence halfwidth is the 1.96 sigma normal approximation.
    pub fn from_samples(samples: &[f64]) -> Aggregate {
        assert!(!samples.is_empty(), "aggregate needs at least one sample");
        let n = samples.len() as f64;
        let mean: f64 = samples.iter().sum::<f64>() / n;
        let sample_std = if samples.len() < 2 {
            0.0
        } else {
            let ss: f64 = samples.iter().map(|x| (x - mean).powi(2)).sum();
            (ss / (n - 1.0)).sqrt()
        };
        Aggregate {
            mean_snr_linear: mean,
            mean_snr_db: db_from_linear(mean),
            sample_std,
            ci95_halfwidth: 1.96 * sample_std / n.sqrt(),
            trials: samples.len() as u64,
        }
    }
}

/// One sweep entry: the scheme, its total feedback bits (when finite), and
/// the aggregated statistics.
#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub scheme: Scheme,
    pub feedback_bits: Option<u64>,
    pub aggregate: Aggregate,
}

pub type SweepResult = Vec<SweepPoint>;

fn sample_open_angle<R: Rng>(rng: &mut R, dist: &Uniform<f64>) -> f64 {
    // Uniform includes the lower bound; redraw the measure-zero endpoint so
    // angles stay strictly inside the open interval.
    loop {
        let angle = dist.sample(rng);
        if angle > -FRAC_PI_2 {
            return angle;
        }
    }
}

fn trial_snr(scenario: &Scenario, trial_index: u64) -> f64 {
    let mut rng = RngStream::new(scenario.master_seed, trial_index).rng();
    let angle_dist = Uniform::new(-FRAC_PI_2, FRAC_PI_2).expect("valid angle range");

    let ris_to_bs = sample_open_angle(&mut rng, &angle_dist);
    let ue_to_ris = sample_open_angle(&mut rng, &angle_dist);
    let bs_arrival = sample_open_angle(&mut rng, &angle_dist);
    let geometry = Geometry::new(ris_to_bs, ue_to_ris, bs_arrival).expect("angles drawn in range");

    let h_t = sample_rician_ht(
        scenario.ris_elements,
        ue_to_ris,
        scenario.gains.beta_t,
        scenario.gains.kappa,
        &mut rng,
    );
    let h_s = sample_static_path(scenario.bs_antennas, scenario.gains.rho, &mut rng);
    let bs_response =
        array_response(scenario.bs_antennas, bs_arrival).expect("antenna count validated");
    let aligned_common = optimal_common_phase(&bs_response, &h_s);

    let config = match scenario.scheme {
        Scheme::Ideal => optimal_phases(ris_to_bs, ue_to_ris, scenario.ris_elements)
            .with_common_phase(aligned_common),
        Scheme::Codebook {
            index_bits,
            common_bits,
        } => {
            let cb =
                LosCodebook::new(index_bits, scenario.ris_elements).expect("bit width validated");
            let index = cb.nearest(geometry.sin_sum()).expect("angle sum in range");
            cb.expand(index)
                .expect("nearest index in range")
                .with_common_phase(quantize_common_phase(aligned_common, common_bits))
        }
        Scheme::Elementwise { element_bits } => {
            let ideal = optimal_phases(ris_to_bs, ue_to_ris, scenario.ris_elements)
                .with_common_phase(aligned_common)
                .fold_common_phase();
            quantize_elementwise(&ideal, element_bits).expect("bit width validated")
        }
    };

    let h = end_to_end_channel(&geometry, &scenario.gains, &h_t, &h_s, &config)
        .expect("dimensions agree by construction");
    snr_linear(
        scenario.tx_power_w,
        scenario.noise_power_w,
        channel_gain(&h),
    )
}

/// Runs a single coherence block and returns its linear SNR. Deterministic
/// in `(scenario.master_seed, trial_index)`.
pub fn run_trial(scenario: &Scenario, trial_index: u64) -> Result<f64> {
    scenario.validate()?;
    Ok(trial_snr(scenario, trial_index))
}

/// Runs all trials of a scenario and aggregates the SNR statistics.
///
/// Trials execute on the current rayon pool. Per-trial SNRs land in trial
/// order before the (sequential) reduction, so the aggregate is bit-identical
/// for every worker count.
pub fn run(scenario: &Scenario) -> Result<Aggregate> {
    scenario.validate()?;
    let snrs: Vec<f64> = (0..scenario.trials)
        .into_par_iter()
        .map(|trial| trial_snr(scenario, trial))
        .collect();
    Ok(Aggregate::from_samples(&snrs))
}

/// Runs the base scenario once per scheme in `schemes`.
pub fn sweep(base: &Scenario, schemes: &[Scheme]) -> Result<SweepResult> {
    schemes
        .iter()
        .map(|&scheme| {
            let scenario = base.with_scheme(scheme);
            run(&scenario).map(|aggregate| SweepPoint {
                scheme,
                feedback_bits: scheme.feedback_bits(base.ris_elements),
                aggregate,
            })
        })
        .collect()
}
