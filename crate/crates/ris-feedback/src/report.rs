//! Deterministic CSV output and the run manifest.
//!
//! Column set, in order:
//! `scheme,l,d,b,t_bits,trials,seed,mean_snr_db,mean_snr_linear,std,ci95`.
//! Fields that do not apply to a row's scheme are left empty. Numbers are
//! printed in plain decimal with six significant digits, so identical
//! scenarios and seeds produce byte-identical files.

use std::fmt;
use std::io::{self, Write};
use std::path::PathBuf;

use crate::montecarlo::{Scenario, Scheme, SweepPoint};

pub const CSV_HEADER: &str = "scheme,l,d,b,t_bits,trials,seed,mean_snr_db,mean_snr_linear,std,ci95";

/// Formats a float in plain decimal notation with six significant digits.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let round_at = |exponent: i32| -> f64 {
        // Scale in two steps so the intermediate stays finite even at the
        // extremes of the exponent range.
        let shift = 5 - exponent;
        let (lo, hi) = (shift / 2, shift - shift / 2);
        let scaled = x * 10f64.powi(lo) * 10f64.powi(hi);
        scaled.round() * 10f64.powi(-lo) * 10f64.powi(-hi)
    };
    let mut exponent = x.abs().log10().floor() as i32;
    let mut rounded = round_at(exponent);
    // Rounding can carry into the next decade (0.9999995 -> 1.00000).
    if rounded.abs() >= 10f64.powi(exponent + 1) {
        exponent += 1;
        rounded = round_at(exponent);
    }
    let decimals = (5 - exponent).max(0) as usize;
    format!("{rounded:.decimals$}")
}

fn csv_row(scenario: &Scenario, point: &SweepPoint) -> String {
    let (l, d, b) = match point.scheme {
        Scheme::Ideal => (String::new(), String::new(), String::new()),
        Scheme::Codebook {
            index_bits,
            common_bits,
        } => (
            index_bits.to_string(),
            common_bits.to_string(),
            String::new(),
        ),
        Scheme::Elementwise { element_bits } => {
            (String::new(), String::new(), element_bits.to_string())
        }
    };
    let t_bits = point.feedback_bits.map_or(String::new(), |t| t.to_string());
    let a = &point.aggregate;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        point.scheme.label(),
        l,
        d,
        b,
        t_bits,
        a.trials,
        scenario.master_seed,
        format_number(a.mean_snr_db),
        format_number(a.mean_snr_linear),
        format_number(a.sample_std),
        format_number(a.ci95_halfwidth),
    )
}

/// Writes the sweep as CSV, header first.
pub fn write_csv<W: Write>(
    mut out: W,
    scenario: &Scenario,
    points: &[SweepPoint],
) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for point in points {
        writeln!(out, "{}", csv_row(scenario, point))?;
    }
    Ok(())
}

/// Provenance record for one invocation: what ran, when, with which
/// resolved scenario, and where the rows went.
#[derive(Clone, Debug)]
pub struct RunManifest {
    pub command: String,
    pub scenario: Scenario,
    pub rows: usize,
    pub tool_version: &'static str,
    pub timestamp: String,
    pub output: Option<PathBuf>,
}

impl RunManifest {
    pub fn new(command: &str, scenario: Scenario, rows: usize, output: Option<PathBuf>) -> Self {
        RunManifest {
            command: command.to_string(),
            scenario,
            rows,
            tool_version: env!("CARGO_PKG_VERSION"),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            output,
        }
    }
}

impl fmt::Display for RunManifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "risfb {} `{}` at {}",
            self.tool_version, self.command, self.timestamp
        )?;
        let s = &self.scenario;
        writeln!(
            f,
            "scenario: N={} K={} P={} W sigma2={} W beta_r={} beta_t={} rho={} kappa={} trials={} seed={}",
            s.ris_elements,
            s.bs_antennas,
            format_number(s.tx_power_w),
            format_number(s.noise_power_w),
            format_number(s.gains.beta_r),
            format_number(s.gains.beta_t),
            format_number(s.gains.rho),
            match s.gains.kappa {
                crate::channel::RicianFactor::PureLos => "inf".to_string(),
                crate::channel::RicianFactor::Linear(k) => format_number(k),
            },
            s.trials,
            s.master_seed,
        )?;
        match &self.output {
            Some(path) => writeln!(f, "rows: {} -> {}", self.rows, path.display()),
            None => writeln!(f, "rows: {} -> stdout", self.rows),
        }
    }
}
