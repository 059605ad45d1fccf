//! Flat key-value scenario files.
//!
//! One `key = value` pair per line; `#` starts a comment. Unset keys fall
//! back to the baseline parameter set of [`Scenario::default`]. Gains and
//! powers can be given either linear (`beta_r`, `P`, `sigma2`, `rho`,
//! `kappa`) or in dB/dBm with an explicit suffix (`beta_r_db`, `P_dBm`,
//! `sigma2_dBm`, `rho_db`, `kappa_db`); giving both forms of the same
//! quantity is an error. `kappa = inf` selects the pure LoS channel.
//!
//! ```text
//! N = 128
//! K = 4
//! P_dBm = 20
//! scheme = codebook
//! l = 9
//! d = 2
//! ```

use std::collections::HashSet;

use crate::analysis::{linear_from_db, watts_from_dbm};
use crate::channel::RicianFactor;
use crate::montecarlo::{Scenario, Scheme};

/// Scenario-file diagnostic, pointing at the offending line.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl ConfigError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        ConfigError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Default)]
struct SchemeFields {
    scheme: Option<(String, usize)>,
    index_bits: Option<(u32, usize)>,
    common_bits: Option<(u32, usize)>,
    element_bits: Option<(u32, usize)>,
}

/// Parses a scenario document. An empty document yields the baseline
/// scenario unchanged.
pub fn parse_config(text: &str) -> Result<Scenario, ConfigError> {
    let mut scenario = Scenario::default();
    let mut seen: HashSet<&'static str> = HashSet::new();
    let mut fields = SchemeFields::default();

    // Records the key under its canonical quantity name so that a linear
    // value and its dB twin collide.
    let claim = |seen: &mut HashSet<&'static str>,
                 quantity: &'static str,
                 key: &str,
                 line: usize|
     -> Result<(), ConfigError> {
        if !seen.insert(quantity) {
            return Err(ConfigError::new(
                line,
                format!("`{key}` conflicts with an earlier setting of {quantity}"),
            ));
        }
        Ok(())
    };

    for (index, raw_line) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::new(
                line,
                format!("expected `key = value`, got `{content}`"),
            ));
        };
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(ConfigError::new(line, format!("`{key}` has no value")));
        }

        let parse_f64 = |what: &str| -> Result<f64, ConfigError> {
            value
                .parse::<f64>()
                .map_err(|_| ConfigError::new(line, format!("`{what}` is not a number: `{value}`")))
        };
        let parse_count = |what: &str| -> Result<u64, ConfigError> {
            value.parse::<u64>().map_err(|_| {
                ConfigError::new(line, format!("`{what}` is not an integer: `{value}`"))
            })
        };
        let parse_bits = |what: &str| -> Result<u32, ConfigError> {
            let bits = value.parse::<u32>().map_err(|_| {
                ConfigError::new(line, format!("`{what}` is not an integer: `{value}`"))
            })?;
            if bits > 32 {
                return Err(ConfigError::new(line, format!("`{what}` exceeds 32 bits")));
            }
            Ok(bits)
        };
        let positive = |what: &str, v: f64| -> Result<f64, ConfigError> {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(ConfigError::new(line, format!("`{what}` must be positive")))
            }
        };

        match key {
            "N" => {
                claim(&mut seen, "N", key, line)?;
                let n = parse_count("N")?;
                if n == 0 {
                    return Err(ConfigError::new(line, "`N` must be at least 1"));
                }
                scenario.ris_elements = n as usize;
            }
            "K" => {
                claim(&mut seen, "K", key, line)?;
                let k = parse_count("K")?;
                if k == 0 {
                    return Err(ConfigError::new(line, "`K` must be at least 1"));
                }
                scenario.bs_antennas = k as usize;
            }
            "P" => {
                claim(&mut seen, "transmit power", key, line)?;
                scenario.tx_power_w = positive("P", parse_f64("P")?)?;
            }
            "P_dBm" => {
                claim(&mut seen, "transmit power", key, line)?;
                scenario.tx_power_w = watts_from_dbm(parse_f64("P_dBm")?);
            }
            "sigma2" => {
                claim(&mut seen, "noise power", key, line)?;
                scenario.noise_power_w = positive("sigma2", parse_f64("sigma2")?)?;
            }
            "sigma2_dBm" => {
                claim(&mut seen, "noise power", key, line)?;
                scenario.noise_power_w = watts_from_dbm(parse_f64("sigma2_dBm")?);
            }
            "beta_r" => {
                claim(&mut seen, "beta_r", key, line)?;
                scenario.gains.beta_r = positive("beta_r", parse_f64("beta_r")?)?;
            }
            "beta_r_db" => {
                claim(&mut seen, "beta_r", key, line)?;
                scenario.gains.beta_r = linear_from_db(parse_f64("beta_r_db")?);
            }
            "beta_t" => {
                claim(&mut seen, "beta_t", key, line)?;
                scenario.gains.beta_t = positive("beta_t", parse_f64("beta_t")?)?;
            }
            "beta_t_db" => {
                claim(&mut seen, "beta_t", key, line)?;
                scenario.gains.beta_t = linear_from_db(parse_f64("beta_t_db")?);
            }
            "rho" => {
                claim(&mut seen, "rho", key, line)?;
                let rho = parse_f64("rho")?;
                if rho < 0.0 || !rho.is_finite() {
                    return Err(ConfigError::new(line, "`rho` must be nonnegative"));
                }
                scenario.gains.rho = rho;
            }
            "rho_db" => {
                claim(&mut seen, "rho", key, line)?;
                scenario.gains.rho = linear_from_db(parse_f64("rho_db")?);
            }
            "kappa" => {
                claim(&mut seen, "kappa", key, line)?;
                scenario.gains.kappa = if value == "inf" {
                    RicianFactor::PureLos
                } else {
                    let kappa = parse_f64("kappa")?;
                    if kappa < 0.0 || !kappa.is_finite() {
                        return Err(ConfigError::new(
                            line,
                            "`kappa` must be nonnegative or `inf`",
                        ));
                    }
                    RicianFactor::Linear(kappa)
                };
            }
            "kappa_db" => {
                claim(&mut seen, "kappa", key, line)?;
                scenario.gains.kappa = RicianFactor::from_db(parse_f64("kappa_db")?);
            }
            "trials" => {
                claim(&mut seen, "trials", key, line)?;
                let trials = parse_count("trials")?;
                if trials == 0 {
                    return Err(ConfigError::new(line, "`trials` must be at least 1"));
                }
                scenario.trials = trials;
            }
            "seed" => {
                claim(&mut seen, "seed", key, line)?;
                scenario.master_seed = parse_count("seed")?;
            }
            "scheme" => {
                claim(&mut seen, "scheme", key, line)?;
                fields.scheme = Some((value.to_string(), line));
            }
            "l" => {
                claim(&mut seen, "l", key, line)?;
                fields.index_bits = Some((parse_bits("l")?, line));
            }
            "d" => {
                claim(&mut seen, "d", key, line)?;
                fields.common_bits = Some((parse_bits("d")?, line));
            }
            "b" => {
                claim(&mut seen, "b", key, line)?;
                fields.element_bits = Some((parse_bits("b")?, line));
            }
            _ => {
                return Err(ConfigError::new(line, format!("unknown key `{key}`")));
            }
        }
    }

    scenario.scheme = resolve_scheme(&fields)?;
    Ok(scenario)
}

fn resolve_scheme(fields: &SchemeFields) -> Result<Scheme, ConfigError> {
    let reject = |opt: &Option<(u32, usize)>, key: &str, scheme: &str| -> Result<(), ConfigError> {
        if let Some((_, line)) = opt {
            return Err(ConfigError::new(
                *line,
                format!("`{key}` does not apply to the {scheme} scheme"),
            ));
        }
        Ok(())
    };

    match &fields.scheme {
        None => {
            reject(&fields.index_bits, "l", "ideal")?;
            reject(&fields.common_bits, "d", "ideal")?;
            reject(&fields.element_bits, "b", "ideal")?;
            Ok(Scheme::Ideal)
        }
        Some((name, line)) => match name.as_str() {
            "ideal" => {
                reject(&fields.index_bits, "l", "ideal")?;
                reject(&fields.common_bits, "d", "ideal")?;
                reject(&fields.element_bits, "b", "ideal")?;
                Ok(Scheme::Ideal)
            }
            "codebook" => {
                reject(&fields.element_bits, "b", "codebook")?;
                let Some((index_bits, _)) = fields.index_bits else {
                    return Err(ConfigError::new(
                        *line,
                        "the codebook scheme needs `l` (codebook index bits)",
                    ));
                };
                let common_bits = fields.common_bits.map_or(0, |(d, _)| d);
                Ok(Scheme::Codebook {
                    index_bits,
                    common_bits,
                })
            }
            "elementwise" => {
                reject(&fields.index_bits, "l", "elementwise")?;
                reject(&fields.common_bits, "d", "elementwise")?;
                let Some((element_bits, _)) = fields.element_bits else {
                    return Err(ConfigError::new(
                        *line,
                        "the elementwise scheme needs `b` (bits per element)",
                    ));
                };
                if element_bits == 0 {
                    return Err(ConfigError::new(*line, "`b` must be at least 1"));
                }
                Ok(Scheme::Elementwise { element_bits })
            }
            other => Err(ConfigError::new(
                *line,
                format!("unknown scheme `{other}` (expected ideal, codebook, or elementwise)"),
            )),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_baseline_scenario() {
        assert_eq!(parse_config("").unwrap(), Scenario::default());
        assert_eq!(
            parse_config("# just a comment\n\n").unwrap(),
            Scenario::default()
        );
    }

    #[test]
    fn dbm_power_is_converted() {
        let scenario = parse_config("P_dBm = 20").unwrap();
        assert!((scenario.tx_power_w - 0.1).abs() < 1e-15);
    }

    #[test]
    fn zero_elements_is_an_error() {
        let err = parse_config("N = 0").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.message.contains("N"));
    }

    #[test]
    fn linear_and_db_forms_conflict() {
        let err = parse_config("beta_r = 1e-8\nbeta_r_db = -80").unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse_config("P_dBm = 20\nP = 0.1").unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn unknown_keys_point_at_their_line() {
        let err = parse_config("N = 4\nbogus = 1").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("bogus"));
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        assert!(parse_config("N = 4\nN = 8").is_err());
    }

    #[test]
    fn non_numeric_values_are_rejected() {
        let err = parse_config("K = four").unwrap_err();
        assert_eq!(err.line, 1);
    }

    #[test]
    fn pure_los_kappa() {
        let scenario = parse_config("kappa = inf").unwrap();
        assert!(scenario.gains.kappa.is_pure_los());
    }

    #[test]
    fn kappa_db_is_converted() {
        let scenario = parse_config("kappa_db = 10").unwrap();
        assert_eq!(scenario.gains.kappa, RicianFactor::Linear(10.0));
    }

    #[test]
    fn codebook_scheme_round_trips() {
        let scenario = parse_config("scheme = codebook\nl = 9\nd = 2").unwrap();
        assert_eq!(
            scenario.scheme,
            Scheme::Codebook {
                index_bits: 9,
                common_bits: 2
            }
        );
    }

    #[test]
    fn scheme_field_mismatches_are_rejected() {
        assert!(parse_config("scheme = codebook\nb = 2").is_err());
        assert!(parse_config("scheme = codebook").is_err());
        assert!(parse_config("scheme = elementwise\nl = 4\nb = 2").is_err());
        assert!(parse_config("scheme = ideal\nd = 1").is_err());
        assert!(parse_config("b = 2").is_err());
        assert!(parse_config("scheme = nonsense").is_err());
    }

    #[test]
    fn elementwise_scheme_round_trips() {
        let scenario = parse_config("scheme = elementwise\nb = 3\ntrials = 5\nseed = 7").unwrap();
        assert_eq!(scenario.scheme, Scheme::Elementwise { element_bits: 3 });
        assert_eq!(scenario.trials, 5);
        assert_eq!(scenario.master_seed, 7);
    }

    #[test]
    fn inline_comments_are_ignored() {
        let scenario = parse_config("N = 64  # smaller surface").unwrap();
        assert_eq!(scenario.ris_elements, 64);
    }
}
