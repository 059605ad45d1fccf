//! `risfb`: command-line front end for the RIS feedback-bit simulator.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ris_feedback::codebook::{
    decode_message, encode_message, required_bits, FeedbackIndices, FeedbackMessage,
    FeedbackScheme, QuantizerSpec,
};
use ris_feedback::config::parse_config;
use ris_feedback::montecarlo::{sweep, Scenario, Scheme, SweepPoint};
use ris_feedback::presets;
use ris_feedback::report::{format_number, write_csv, RunManifest};

#[derive(Parser)]
#[command(
    name = "risfb",
    version,
    about = "Monte Carlo SNR sweeps and feedback-message tooling for RIS-aided uplinks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SweepArgs {
    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the number of Monte Carlo trials
    #[arg(long)]
    trials: Option<u64>,
    /// Override the master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the engine (0 = all cores)
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run a custom scenario and emit one CSV row
    Run {
        /// Scenario file with `key = value` lines; baseline values apply
        /// for anything unset
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Rician-fading preset: codebook l=1..=12 vs element-wise b=1..=3
    Fig2 {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Static-path preset: budget splits d=0..=2 over totals t<=14
    Fig3 {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Pack feedback indices into a hex message
    Encode {
        /// Codebook index width in bits (l)
        #[arg(long)]
        index_bits: Option<u32>,
        /// Codebook entry index
        #[arg(long)]
        entry: Option<u64>,
        /// Common-phase width in bits (d)
        #[arg(long, default_value_t = 0)]
        common_bits: u32,
        /// Common-phase index
        #[arg(long, default_value_t = 0)]
        common: u64,
        /// Per-element width in bits (b)
        #[arg(long)]
        element_bits: Option<u32>,
        /// Comma-separated per-element indices
        #[arg(long, value_delimiter = ',')]
        elements: Option<Vec<u64>>,
    },
    /// Unpack a hex message back into feedback indices
    Decode {
        /// Hex payload, e.g. 02e0
        #[arg(long)]
        payload: String,
        /// Codebook index width in bits (l)
        #[arg(long)]
        index_bits: Option<u32>,
        /// Common-phase width in bits (d)
        #[arg(long, default_value_t = 0)]
        common_bits: u32,
        /// Per-element width in bits (b)
        #[arg(long)]
        element_bits: Option<u32>,
        /// Element count for the element-wise layout
        #[arg(long)]
        count: Option<usize>,
    },
    /// Print the codebook bit bound and the rule-of-thumb budget for N
    Bits {
        /// Number of RIS elements
        elements: usize,
    },
}

enum CliError {
    Config(String),
    Runtime(String),
}

impl From<ris_feedback::config::ConfigError> for CliError {
    fn from(err: ris_feedback::config::ConfigError) -> Self {
        CliError::Config(err.to_string())
    }
}

impl From<ris_feedback::Error> for CliError {
    fn from(err: ris_feedback::Error) -> Self {
        CliError::Runtime(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Runtime(err.to_string())
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, sweep } => {
            let text = match &config {
                Some(path) => fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
                None => String::new(),
            };
            let mut scenario = parse_config(&text)?;
            apply_overrides(&mut scenario, &sweep);
            let schemes = [scenario.scheme];
            run_sweep("run", scenario, &schemes, &sweep, &[], None)
        }
        Command::Fig2 { sweep } => {
            let mut scenario = presets::fig2_scenario(10_000, 42);
            apply_overrides(&mut scenario, &sweep);
            let bound = required_bits(scenario.ris_elements);
            let note = format!(
                "half-power bit bound for N={}: l = {bound}",
                scenario.ris_elements
            );
            let mark = Scheme::Codebook {
                index_bits: bound,
                common_bits: 0,
            };
            run_sweep(
                "fig2",
                scenario,
                &presets::fig2_schemes(),
                &sweep,
                &[note],
                Some(mark),
            )
        }
        Command::Fig3 { sweep } => {
            let mut scenario = presets::fig3_scenario(10_000, 42);
            apply_overrides(&mut scenario, &sweep);
            run_sweep(
                "fig3",
                scenario,
                &presets::fig3_schemes(),
                &sweep,
                &[],
                None,
            )
        }
        Command::Encode {
            index_bits,
            entry,
            common_bits,
            common,
            element_bits,
            elements,
        } => cmd_encode(
            index_bits,
            entry,
            common_bits,
            common,
            element_bits,
            elements,
        ),
        Command::Decode {
            payload,
            index_bits,
            common_bits,
            element_bits,
            count,
        } => cmd_decode(&payload, index_bits, common_bits, element_bits, count),
        Command::Bits { elements } => cmd_bits(elements),
    }
}

fn apply_overrides(scenario: &mut Scenario, args: &SweepArgs) {
    if let Some(trials) = args.trials {
        scenario.trials = trials;
    }
    if let Some(seed) = args.seed {
        scenario.master_seed = seed;
    }
}

fn run_sweep(
    command: &str,
    scenario: Scenario,
    schemes: &[Scheme],
    args: &SweepArgs,
    notes: &[String],
    mark: Option<Scheme>,
) -> Result<(), CliError> {
    let points = with_pool(args.threads, || sweep(&scenario, schemes))??;
    let manifest = RunManifest::new(command, scenario.clone(), points.len(), args.out.clone());

    match &args.out {
        Some(path) => {
            let mut file = fs::File::create(path)?;
            write_csv(&mut file, &scenario, &points)?;
            file.flush()?;
            print!("{manifest}");
            print_summary(&mut std::io::stdout(), &points, notes, mark)?;
        }
        None => {
            // Keep stdout pure CSV; the human-readable part goes to stderr.
            let stdout = std::io::stdout();
            write_csv(stdout.lock(), &scenario, &points)?;
            eprint!("{manifest}");
            print_summary(&mut std::io::stderr(), &points, notes, mark)?;
        }
    }
    Ok(())
}

fn print_summary<W: Write>(
    out: &mut W,
    points: &[SweepPoint],
    notes: &[String],
    mark: Option<Scheme>,
) -> std::io::Result<()> {
    for note in notes {
        writeln!(out, "{note}")?;
    }
    writeln!(
        out,
        "{:<12} {:>6} {:>12}",
        "scheme", "t_bits", "mean_snr_db"
    )?;
    for point in points {
        let t = point
            .feedback_bits
            .map_or("-".to_string(), |t| t.to_string());
        let flag = if mark == Some(point.scheme) {
            "  x half-power bound met"
        } else {
            ""
        };
        writeln!(
            out,
            "{:<12} {:>6} {:>12}{flag}",
            point.scheme.label(),
            t,
            format_number(point.aggregate.mean_snr_db)
        )?;
    }
    Ok(())
}

fn with_pool<T: Send>(threads: usize, work: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    if threads == 0 {
        return Ok(work());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(pool.install(work))
}

fn cmd_encode(
    index_bits: Option<u32>,
    entry: Option<u64>,
    common_bits: u32,
    common: u64,
    element_bits: Option<u32>,
    elements: Option<Vec<u64>>,
) -> Result<(), CliError> {
    let (spec, indices) = match (index_bits, element_bits) {
        (Some(index_bits), None) => (
            QuantizerSpec {
                index_bits,
                common_bits,
                element_bits: 0,
            },
            FeedbackIndices::Codebook {
                entry: entry.unwrap_or(0),
                common,
            },
        ),
        (None, Some(element_bits)) => {
            let Some(elements) = elements else {
                return Err(CliError::Config(
                    "--element-bits needs --elements with the per-element indices".into(),
                ));
            };
            (
                QuantizerSpec {
                    index_bits: 0,
                    common_bits: 0,
                    element_bits,
                },
                FeedbackIndices::Elementwise(elements),
            )
        }
        _ => {
            return Err(CliError::Config(
                "give exactly one of --index-bits (codebook) or --element-bits (element-wise)"
                    .into(),
            ))
        }
    };
    let msg = encode_message(&spec, &indices).map_err(|e| CliError::Config(e.to_string()))?;
    println!("scheme: {}", scheme_name(msg.scheme));
    println!("t_bits: {}", msg.bit_len);
    println!("payload: {}", to_hex(&msg.payload));
    Ok(())
}

fn cmd_decode(
    payload: &str,
    index_bits: Option<u32>,
    common_bits: u32,
    element_bits: Option<u32>,
    count: Option<usize>,
) -> Result<(), CliError> {
    let bytes = parse_hex(payload)?;
    let (spec, scheme, elements, bit_len) = match (index_bits, element_bits) {
        (Some(index_bits), None) => (
            QuantizerSpec {
                index_bits,
                common_bits,
                element_bits: 0,
            },
            FeedbackScheme::Codebook,
            0usize,
            index_bits as u64 + common_bits as u64,
        ),
        (None, Some(element_bits)) => {
            let Some(count) = count else {
                return Err(CliError::Config(
                    "--element-bits needs --count with the element count".into(),
                ));
            };
            (
                QuantizerSpec {
                    index_bits: 0,
                    common_bits: 0,
                    element_bits,
                },
                FeedbackScheme::Elementwise,
                count,
                count as u64 * element_bits as u64,
            )
        }
        _ => {
            return Err(CliError::Config(
                "give exactly one of --index-bits (codebook) or --element-bits (element-wise)"
                    .into(),
            ))
        }
    };
    let msg = FeedbackMessage {
        scheme,
        payload: bytes,
        bit_len: u32::try_from(bit_len)
            .map_err(|_| CliError::Config("message too large".into()))?,
    };
    let indices = decode_message(&msg, &spec, elements)?;
    println!("scheme: {}", scheme_name(scheme));
    match indices {
        FeedbackIndices::Codebook { entry, common } => {
            println!("entry: {entry}");
            println!("common: {common}");
        }
        FeedbackIndices::Elementwise(values) => {
            let list: Vec<String> = values.iter().map(u64::to_string).collect();
            println!("elements: {}", list.join(","));
        }
    }
    Ok(())
}

fn cmd_bits(elements: usize) -> Result<(), CliError> {
    if elements == 0 {
        return Err(CliError::Config("N must be at least 1".into()));
    }
    let l = required_bits(elements);
    let rule_of_thumb = (elements as f64).log2().ceil() as u32 + 4;
    println!("N = {elements}");
    println!("codebook bits for half-power guarantee: l = {l}");
    println!("rule-of-thumb total budget (log2(N) + 4): t = {rule_of_thumb}");
    Ok(())
}

fn scheme_name(scheme: FeedbackScheme) -> &'static str {
    match scheme {
        FeedbackScheme::Codebook => "codebook",
        FeedbackScheme::Elementwise => "elementwise",
    }
}

fn to_hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn parse_hex(text: &str) -> Result<Vec<u8>, CliError> {
    let cleaned: String = text
        .trim()
        .trim_start_matches("0x")
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    if !cleaned.len().is_multiple_of(2) {
        return Err(CliError::Config(
            "hex payload needs an even number of digits".into(),
        ));
    }
    (0..cleaned.len())
        .step_by(2)
        .map(|i| {
            u8::from_str_radix(&cleaned[i..i + 2], 16)
                .map_err(|_| CliError::Config(format!("invalid hex byte `{}`", &cleaned[i..i + 2])))
        })
        .collect()
}
