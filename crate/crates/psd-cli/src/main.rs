//! Command-line driver for power-sum decomposition.
//!
//! Exit codes: 0 success, 2 parameter error, 3 numerical-stage failure,
//! 4 verification failure.

use clap::{Args, Parser, Subcommand};
use psd::error::Error;
use psd::harness::io::{
    parse_components_json, parse_instance_json, write_json, ComponentsFile, InstanceFile,
    PolyRecord,
};
use psd::harness::{
    decompose, generate, match_components, AggMode, DecomposeOptions, GenParams, Smoothing,
};
use psd::polyring::{monomial_count, Poly};
use psd::probes::{run_probe, ProbeLemma, ProbeParams};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "psd", about = "Decompose power sums of homogeneous polynomials", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance and write it to a JSON file.
    Gen(GenArgs),
    /// Decompose the polynomial from an instance file.
    Decompose(DecomposeArgs),
    /// Compare estimated components against an instance's ground truth.
    Verify(VerifyArgs),
    /// Run an empirical probe for one of the structural lemmas.
    Probe(ProbeArgs),
    /// Print the non-identifiability witness report.
    Witness(WitnessArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long = "K", default_value_t = 2)]
    k: usize,
    #[arg(long = "D", default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Frobenius norm of the injected coefficient noise.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Smooth an all-ones base component set with this perturbation scale
    /// instead of drawing Gaussian components.
    #[arg(long)]
    smooth_rho: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Restriction size; defaults to max(ceil(sqrt(n)), 2KD).
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long, default_value = "cover")]
    agg: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Pad a non-prime n to the next prime for paper-mode aggregation.
    #[arg(long, default_value_t = true)]
    field_pad: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    est: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    /// Maximum matched component error accepted.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args)]
struct ProbeArgs {
    /// One of: V, N, U, L, desym, vbar, witness.
    #[arg(long)]
    lemma: String,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    ell: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long = "D", default_value_t = 1)]
    d: usize,
    #[arg(long = "K", default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WitnessArgs {
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parameter(_) | Error::Capacity { .. } | Error::UnsupportedField(_) => 2,
        Error::MalformedInput(_) | Error::Io(_) | Error::Json(_) => 2,
        Error::Stage { source, .. } => exit_code_for(source),
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Gen(args) => {
            let params = GenParams {
                n: args.n,
                m: args.m,
                comp_degree: args.k,
                power: args.d,
                seed: args.seed,
            };
            let smoothing = args.smooth_rho.map(|rho| Smoothing {
                base: (0..args.m)
                    .map(|_| {
                        Poly::new(args.n, args.k, vec![1.0; monomial_count(args.n, args.k)])
                            .expect("shape")
                    })
                    .collect(),
                rho,
            });
            let inst = generate(&params, args.noise, smoothing.as_ref())?;
            write_json(&args.out, &InstanceFile::from_instance(&inst))?;
            eprintln!(
                "wrote instance: n={} m={} K={} D={} degree={} noise={:.3e}",
                args.n,
                args.m,
                args.k,
                args.d,
                inst.p.degree(),
                inst.noise_norm
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Decompose(args) => {
            let bytes = std::fs::read(&args.input)?;
            let inst = parse_instance_json(&bytes)?;
            let mut opts = DecomposeOptions::from_gen(&inst.params);
            opts.ell = args.ell;
            opts.agg = args.agg.parse::<AggMode>()?;
            opts.seed = args.seed.unwrap_or(inst.params.seed);
            opts.field_pad = args.field_pad;
            let out = decompose(&inst.p, &opts)?;
            let file = ComponentsFile {
                components: out.components.iter().map(PolyRecord::from_poly).collect(),
                sign_ambiguous: out.sign_ambiguous,
                diagnostics: serde_json::to_value(&out.diagnostics)?,
            };
            write_json(&args.out, &file)?;
            eprintln!(
                "decomposed {} components (mode {}, {} restrictions)",
                out.components.len(),
                out.diagnostics.mode,
                out.diagnostics.family_size
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => {
            let est_bytes = std::fs::read(&args.est)?;
            let (estimates, sign_ambiguous, _) = parse_components_json(&est_bytes)?;
            let truth_bytes = std::fs::read(&args.truth)?;
            let inst = parse_instance_json(&truth_bytes)?;
            if inst.components.is_empty() {
                return Err(Error::MalformedInput(
                    "truth instance carries no components".into(),
                ));
            }
            let report = match_components(&estimates, &inst.components, sign_ambiguous)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            if report.max_error <= args.tol {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!(
                    "verification failed: matched error {:.3e} > tolerance {:.3e}",
                    report.max_error, args.tol
                );
                Ok(ExitCode::from(4))
            }
        }
        Command::Probe(args) => {
            let lemma: ProbeLemma = args.lemma.parse()?;
            let params = ProbeParams {
                n: args.n,
                ell: args.ell,
                m: args.m,
                power: args.d,
                comp_degree: args.k,
                trials: args.trials,
                seed: args.seed,
            };
            let report = run_probe(lemma, &params)?;
            let text = serde_json::to_string_pretty(&report)?;
            match args.out {
                Some(path) => std::fs::write(path, text)?,
                None => println!("{}", text),
            }
            match report.pass {
                Some(false) => Ok(ExitCode::from(4)),
                _ => Ok(ExitCode::SUCCESS),
            }
        }
        Command::Witness(args) => {
            let params = ProbeParams {
                n: args.n,
                ell: 2,
                m: 2,
                power: 1,
                comp_degree: 2,
                trials: 1,
                seed: args.seed,
            };
            let report = run_probe(ProbeLemma::Witness, &params)?;
            let text = serde_json::to_string_pretty(&report)?;
            match args.out {
                Some(path) => std::fs::write(path, text)?,
                None => println!("{}", text),
            }
            match report.pass {
                Some(false) => Ok(ExitCode::from(4)),
                _ => Ok(ExitCode::SUCCESS),
            }
        }
    }
}
