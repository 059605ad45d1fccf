//! Bundled experiment presets behind the `fig2` and `fig3` CLI verbs.

use crate::channel::{LinkGains, RicianFactor};
use crate::montecarlo::{Scenario, Scheme};

/// Largest total bit budget swept by the static-path preset.
pub const FIG3_MAX_BUDGET: u32 = 14;

/// Scenario of the Rician-fading sweep: baseline parameters with a 10 dB
/// Rician factor and no static path, so quantization loss on the reflected
/// beam is the only effect in play.
pub fn fig2_scenario(trials: u64, master_seed: u64) -> Scenario {
    Scenario {
        gains: LinkGains {
            rho: 0.0,
            kappa: RicianFactor::Linear(10.0),
            ..Scenario::default().gains
        },
        trials,
        master_seed,
        ..Scenario::default()
    }
}

/// Schemes of the Rician-fading sweep: the ideal reference, the codebook at
/// l = 1..=12 (no common-phase bits), and element-wise quantization at
/// b = 1..=3 (128, 256, and 384 total bits for the default surface).
pub fn fig2_schemes() -> Vec<Scheme> {
    let mut schemes = vec![Scheme::Ideal];
    schemes.extend((1..=12).map(|index_bits| Scheme::Codebook {
        index_bits,
        common_bits: 0,
    }));
    schemes.extend((1..=3).map(|element_bits| Scheme::Elementwise { element_bits }));
    schemes
}

/// Scenario of the static-path sweep: pure LoS through the RIS plus the
/// baseline -120 dB Rayleigh direct path.
pub fn fig3_scenario(trials: u64, master_seed: u64) -> Scenario {
    Scenario {
        gains: LinkGains {
            kappa: RicianFactor::PureLos,
            ..Scenario::default().gains
        },
        trials,
        master_seed,
        ..Scenario::default()
    }
}

/// Schemes of the static-path sweep: for each split d = 0, 1, 2 of the
/// total budget t between the codebook index (l = t - d) and the common
/// rotation, every t up to [`FIG3_MAX_BUDGET`].
pub fn fig3_schemes() -> Vec<Scheme> {
    let mut schemes = Vec::new();
    for common_bits in 0..=2u32 {
        for total in common_bits.max(1)..=FIG3_MAX_BUDGET {
            schemes.push(Scheme::Codebook {
                index_bits: total - common_bits,
                common_bits,
            });
        }
    }
    schemes
}
