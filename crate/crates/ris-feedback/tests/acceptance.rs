//! Acceptance suite: one pass/fail line per criterion, nonzero exit if any
//! criterion fails. Run with `cargo test --test acceptance` (the target has
//! no harness, so the lines always print).

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::Command;

use num_complex::Complex64;
use rand::distr::{Distribution, Uniform};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use ris_feedback::analysis::{
    db_from_linear, elementwise_expected_gain, rician_expected_gain, snr_linear,
    static_expected_gain, CommonPhaseBits,
};
use ris_feedback::channel::{array_response, sample_static_path, RicianFactor};
use ris_feedback::codebook::{
    decode_message, encode_message, optimal_common_phase, quantize_common_phase, required_bits,
    FeedbackIndices, LosCodebook, QuantizerSpec,
};
use ris_feedback::montecarlo::{run, sweep, Aggregate, Scenario, Scheme};
use ris_feedback::presets;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1 bit bound", criterion_1_bit_bound),
        ("2 half-power guarantee", criterion_2_half_power_guarantee),
        ("3 element-wise gain oracle", criterion_3_elementwise_oracle),
        ("4 Rician mean-gain oracle", criterion_4_rician_oracle),
        ("5 cross-term oracle", criterion_5_cross_term_oracle),
        ("6 Rician sweep reproduction", criterion_6_fig2),
        ("7 static-path sweep ordering", criterion_7_fig3),
        ("8 codec bit-exactness", criterion_8_codec),
        ("9 determinism", criterion_9_determinism),
    ];

    let mut failures = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS [{name}] {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL [{name}] {detail}");
            }
        }
    }
    if failures > 0 {
        println!("{failures} criterion(s) failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}

fn criterion_1_bit_bound() -> Outcome {
    let got = required_bits(128);
    if got == 9 {
        Ok("required_bits(128) = 9".into())
    } else {
        Err(format!("required_bits(128) = {got}, expected 9"))
    }
}

/// 401 x 401 uniform grid strictly inside (-pi/2, pi/2)^2.
fn angle_grid() -> Vec<f64> {
    (0..401)
        .map(|i| -FRAC_PI_2 + PI * (i + 1) as f64 / 402.0)
        .collect()
}

fn criterion_2_half_power_guarantee() -> Outcome {
    let grid = angle_grid();
    let mut details = Vec::new();
    for &n in &[16usize, 64, 128, 256] {
        let cb = LosCodebook::new(required_bits(n), n).expect("valid codebook");
        let min_gain = grid
            .par_iter()
            .map(|&t1| {
                let mut row_min = f64::INFINITY;
                for &t2 in &grid {
                    let sum = t1.sin() + t2.sin();
                    let config = cb
                        .expand(cb.nearest(sum).expect("angle sum in range"))
                        .expect("index in range");
                    let gain = ris_feedback::analysis::array_gain_of_config(t1, t2, &config);
                    row_min = row_min.min(gain);
                }
                row_min
            })
            .reduce(|| f64::INFINITY, f64::min);
        let floor = 0.49 * (n * n) as f64;
        if min_gain < floor {
            return Err(format!(
                "N={n}: min gain {min_gain:.1} below 0.49*N^2 = {floor:.1}"
            ));
        }
        details.push(format!("N={n}: min {:.3}*N^2", min_gain / (n * n) as f64));
    }
    Ok(details.join(", "))
}

fn criterion_3_elementwise_oracle() -> Outcome {
    const TRIALS: u64 = 100_000;
    let mut details = Vec::new();
    for &n in &[4usize, 32, 128] {
        for bits in 1u32..=3 {
            let spread = PI / 2f64.powi(bits as i32);
            let errors = Uniform::new(-spread, spread).expect("valid range");
            let mean: f64 = (0..TRIALS)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = ChaCha8Rng::seed_from_u64(2024);
                    rng.set_stream(trial);
                    let sum: Complex64 = (0..n)
                        .map(|_| Complex64::from_polar(1.0, errors.sample(&mut rng)))
                        .sum();
                    sum.norm_sqr()
                })
                .sum::<f64>()
                / TRIALS as f64;
            let expected = elementwise_expected_gain(n, bits);
            let rel = (mean - expected).abs() / expected;
            if rel > 0.01 {
                return Err(format!(
                    "N={n} b={bits}: mean {mean:.3} vs {expected:.3} ({:.2}% off)",
                    rel * 100.0
                ));
            }
            details.push(format!("N={n},b={bits}:{:.2}%", rel * 100.0));
        }
    }
    Ok(details.join(" "))
}

fn criterion_4_rician_oracle() -> Outcome {
    let mut details = Vec::new();
    for &kappa in &[1.0f64, 10.0] {
        // Unit power and noise make the mean SNR equal the mean gain.
        let scenario = Scenario {
            tx_power_w: 1.0,
            noise_power_w: 1.0,
            gains: ris_feedback::channel::LinkGains {
                beta_r: 1e-8,
                beta_t: 1e-8,
                rho: 0.0,
                kappa: RicianFactor::Linear(kappa),
            },
            scheme: Scheme::Ideal,
            trials: 100_000,
            master_seed: 7,
            ..Scenario::default()
        };
        let mean = run(&scenario).expect("valid scenario").mean_snr_linear;
        let expected =
            rician_expected_gain(4, 128, RicianFactor::Linear(kappa), 1e-8, 1e-8).total();
        let rel = (mean - expected).abs() / expected;
        if rel > 0.01 {
            return Err(format!(
                "kappa={kappa}: mean gain {mean:.4e} vs {expected:.4e} ({:.2}% off)",
                rel * 100.0
            ));
        }
        details.push(format!("kappa={kappa}:{:.2}%", rel * 100.0));
    }
    Ok(details.join(" "))
}

fn criterion_5_cross_term_oracle() -> Outcome {
    const TRIALS: u64 = 100_000;
    let (k, n) = (4usize, 128usize);
    let (beta_r, beta_t, rho) = (1e-8f64, 1e-8f64, 1e-12f64);
    let unquantized =
        static_expected_gain(k, n, beta_r, beta_t, rho, CommonPhaseBits::Unquantized).cross;
    let mut details = Vec::new();
    for d in 0u32..=3 {
        let mean: f64 = (0..TRIALS)
            .into_par_iter()
            .map(|trial| {
                let mut rng = ChaCha8Rng::seed_from_u64(505);
                rng.set_stream(trial);
                let angles = Uniform::new(-FRAC_PI_2, FRAC_PI_2).expect("valid range");
                let bs_arrival = angles.sample(&mut rng);
                let h_s = sample_static_path(k, rho, &mut rng);
                let a_k = array_response(k, bs_arrival).expect("valid size");
                let inner: Complex64 = a_k.iter().zip(&h_s).map(|(a, h)| a.conj() * h).sum();
                let phi = quantize_common_phase(optimal_common_phase(&a_k, &h_s), d);
                2.0 * n as f64
                    * (beta_r * beta_t).sqrt()
                    * (inner * Complex64::from_polar(1.0, -phi)).re
            })
            .sum::<f64>()
            / TRIALS as f64;
        let expected =
            static_expected_gain(k, n, beta_r, beta_t, rho, CommonPhaseBits::Bits(d)).cross;
        let err = (mean - expected).abs();
        // d = 0 has an exactly-zero target; judge it against the scale of
        // the unquantized cross term.
        let tolerance = 0.02 * if d == 0 { unquantized } else { expected };
        if err > tolerance {
            return Err(format!(
                "d={d}: mean cross {mean:.4e} vs {expected:.4e} (err {err:.2e} > {tolerance:.2e})"
            ));
        }
        details.push(format!("d={d}:{:.1}%", err / unquantized * 100.0));
    }
    Ok(details.join(" "))
}

fn criterion_6_fig2() -> Outcome {
    let scenario = presets::fig2_scenario(10_000, 42);
    let points = sweep(&scenario, &presets::fig2_schemes()).expect("valid sweep");

    let find = |scheme: Scheme| -> &Aggregate {
        &points
            .iter()
            .find(|p| p.scheme == scheme)
            .expect("scheme present in sweep")
            .aggregate
    };
    let ideal_db = find(Scheme::Ideal).mean_snr_db;
    let oracle_db = db_from_linear(snr_linear(
        scenario.tx_power_w,
        scenario.noise_power_w,
        rician_expected_gain(4, 128, RicianFactor::Linear(10.0), 1e-8, 1e-8).total(),
    ));
    if (ideal_db - oracle_db).abs() > 0.2 {
        return Err(format!(
            "ideal {ideal_db:.3} dB vs closed-form {oracle_db:.3} dB (> 0.2 dB)"
        ));
    }

    let cb9_db = find(Scheme::Codebook {
        index_bits: 9,
        common_bits: 0,
    })
    .mean_snr_db;
    if (ideal_db - cb9_db).abs() > 1.0 {
        return Err(format!(
            "codebook l=9 {cb9_db:.3} dB not within 1 dB of ideal {ideal_db:.3} dB"
        ));
    }

    let b1_db = find(Scheme::Elementwise { element_bits: 1 }).mean_snr_db;
    if ideal_db - b1_db < 2.0 {
        return Err(format!(
            "element-wise b=1 {b1_db:.3} dB less than 2 dB below ideal {ideal_db:.3} dB"
        ));
    }
    let b3_db = find(Scheme::Elementwise { element_bits: 3 }).mean_snr_db;
    if (ideal_db - b3_db).abs() > 0.5 {
        return Err(format!(
            "element-wise b=3 {b3_db:.3} dB not within 0.5 dB of ideal {ideal_db:.3} dB"
        ));
    }

    Ok(format!(
        "ideal {ideal_db:.3} dB (oracle {oracle_db:.3}), l=9 at -{:.3} dB, b=1 at -{:.3} dB, b=3 at -{:.3} dB",
        ideal_db - cb9_db,
        ideal_db - b1_db,
        ideal_db - b3_db
    ))
}

fn criterion_7_fig3() -> Outcome {
    let scenario = presets::fig3_scenario(10_000, 42);
    let points = sweep(&scenario, &presets::fig3_schemes()).expect("valid sweep");

    let lookup = |common_bits: u32, total: u32| -> &Aggregate {
        &points
            .iter()
            .find(|p| {
                p.scheme
                    == Scheme::Codebook {
                        index_bits: total - common_bits,
                        common_bits,
                    }
            })
            .expect("budget present in sweep")
            .aggregate
    };

    let mut violations = Vec::new();
    let mut checked = 0;
    for total in 9..=presets::FIG3_MAX_BUDGET {
        for (hi, lo) in [(2u32, 1u32), (1, 0)] {
            let a = lookup(hi, total);
            let b = lookup(lo, total);
            let slack = a.ci95_halfwidth.max(b.ci95_halfwidth);
            checked += 1;
            if a.mean_snr_linear < b.mean_snr_linear - slack {
                violations.push(format!(
                    "t={total}: d={hi} mean {:.4} < d={lo} mean {:.4} - ci {:.4}",
                    a.mean_snr_linear, b.mean_snr_linear, slack
                ));
            }
        }
    }
    if violations.is_empty() {
        Ok(format!(
            "d=2 >= d=1 >= d=0 within one CI halfwidth for all t in 9..={} ({checked} comparisons)",
            presets::FIG3_MAX_BUDGET
        ))
    } else {
        Err(violations.join("; "))
    }
}

fn criterion_8_codec() -> Outcome {
    // Hand-packed reference: l=9 entry 5 then d=2 common 3 is the 11-bit
    // string 00000010111, padded to 0x02 0xE0.
    let spec = QuantizerSpec {
        index_bits: 9,
        common_bits: 2,
        element_bits: 0,
    };
    let msg = encode_message(
        &spec,
        &FeedbackIndices::Codebook {
            entry: 5,
            common: 3,
        },
    )
    .expect("valid indices");
    if msg.payload != vec![0x02, 0xE0] {
        return Err(format!("worked example packed to {:02x?}", msg.payload));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut rand_below = |bound: u64| -> u64 {
        Uniform::new(0, bound)
            .expect("valid range")
            .sample(&mut rng)
    };
    for case in 0..10_000u32 {
        if case % 2 == 0 {
            let index_bits = rand_below(17) as u32;
            let common_bits = rand_below(5) as u32;
            let spec = QuantizerSpec {
                index_bits,
                common_bits,
                element_bits: 0,
            };
            let indices = FeedbackIndices::Codebook {
                entry: rand_below(1 << index_bits),
                common: rand_below(1 << common_bits),
            };
            let msg = encode_message(&spec, &indices).expect("valid indices");
            let back = decode_message(&msg, &spec, 1).expect("well-formed message");
            if back != indices {
                return Err(format!("codebook round trip failed for case {case}"));
            }
        } else {
            let element_bits = 1 + rand_below(4) as u32;
            let count = 1 + rand_below(256) as usize;
            let spec = QuantizerSpec {
                index_bits: 0,
                common_bits: 0,
                element_bits,
            };
            let indices = FeedbackIndices::Elementwise(
                (0..count).map(|_| rand_below(1 << element_bits)).collect(),
            );
            let msg = encode_message(&spec, &indices).expect("valid indices");
            let back = decode_message(&msg, &spec, count).expect("well-formed message");
            if back != indices {
                return Err(format!("element-wise round trip failed for case {case}"));
            }
        }
    }
    Ok("worked example 0x02 0xE0 and 10000 random round trips".into())
}

fn criterion_9_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run_fig2 = |name: &str, extra: &[&str]| -> Result<Vec<u8>, String> {
        let path = dir.path().join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_risfb"));
        cmd.args(["fig2", "--seed", "42", "--out"])
            .arg(&path)
            .args(extra);
        let output = cmd.output().map_err(|e| e.to_string())?;
        if !output.status.success() {
            return Err(format!(
                "fig2 run failed: {}",
                String::from_utf8_lossy(&output.stderr)
            ));
        }
        std::fs::read(&path).map_err(|e| e.to_string())
    };

    let first = run_fig2("a.csv", &[])?;
    let second = run_fig2("b.csv", &[])?;
    if first != second {
        return Err("two sequential fig2 runs differ byte-for-byte".into());
    }

    let serial = run_fig2("serial.csv", &["--threads", "1"])?;
    let parallel = run_fig2("parallel.csv", &["--threads", "8"])?;
    let serial_rows = parse_linear_means(&serial)?;
    let parallel_rows = parse_linear_means(&parallel)?;
    if serial_rows.len() != parallel_rows.len() {
        return Err("thread counts produced different row counts".into());
    }
    for (i, (s, p)) in serial_rows.iter().zip(&parallel_rows).enumerate() {
        if (s - p).abs() > 1e-9 * s.abs() {
            return Err(format!("row {i}: serial mean {s} vs 8-thread mean {p}"));
        }
    }
    Ok(format!(
        "byte-identical reruns; {} aggregates match across thread counts",
        serial_rows.len()
    ))
}

fn parse_linear_means(csv: &[u8]) -> Result<Vec<f64>, String> {
    let text = String::from_utf8_lossy(csv);
    text.lines()
        .skip(1)
        .map(|line| {
            line.split(',')
                .nth(8)
                .ok_or_else(|| "short CSV row".to_string())?
                .parse::<f64>()
                .map_err(|e| e.to_string())
        })
        .collect()
}
