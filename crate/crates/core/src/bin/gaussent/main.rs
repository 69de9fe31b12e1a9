//! Command-line front end: JSON covariance-matrix ingestion, per-module
//! analysis commands, and deterministic CSV sweep emitters.
//!
//! Exit codes: 0 on success, 1 on domain errors (the module error name goes
//! to stderr), 2 on malformed input or usage errors. Mode indices are
//! 0-based everywhere.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use gaussent::error::Error;
use gaussent::multimode::{self, GhzTypeSpec};
use gaussent::phasespace::{Bipartition, CmJson, CovarianceMatrix};
use gaussent::sharing;
use gaussent::teleport::{self, TeleportResourceSpec};
use gaussent::twomode;

/// Analysis output: input digest, the command that ran, a sorted result map
/// and any warnings. Serialization is deterministic (sorted keys, shortest
/// round-trip floats).
#[derive(Debug, Serialize)]
struct AnalysisReport {
    input_digest: String,
    command: String,
    results: BTreeMap<String, Value>,
    warnings: Vec<String>,
}

impl AnalysisReport {
    fn new(digest: impl Into<String>, command: &str) -> Self {
        AnalysisReport {
            input_digest: digest.into(),
            command: command.to_owned(),
            results: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    fn put(&mut self, key: &str, value: Value) {
        self.results.insert(key.to_owned(), value);
    }

    fn print(&self) {
        println!("{}", serde_json::to_string_pretty(self).expect("report serializes"));
    }
}

#[derive(Parser)]
#[command(
    name = "gaussent",
    about = "Phase-space analysis of Gaussian states: spectra, entanglement, monogamy, teleportation networks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check symmetry and physicality of a covariance matrix file.
    Validate { cm: PathBuf },
    /// Symplectic spectrum of a covariance matrix (optionally of its
    /// partial transpose).
    Spectrum {
        cm: PathBuf,
        /// comma-separated 0-based modes to partially transpose first
        #[arg(long, value_delimiter = ',')]
        transpose_side: Vec<usize>,
    },
    /// Purities, invariants, standard form, PPT spectrum, classification
    /// and entanglement of a two-mode state.
    AnalyzeTwoMode { cm: PathBuf },
    /// Entanglement class at given global and marginal purities.
    Classify(PurityArgs),
    /// Extremal (GMEMS/GLEMS) log-negativities and the average estimator.
    Extremal(PurityArgs),
    /// Build covariance matrices (writes CM JSON).
    #[command(subcommand)]
    Make(MakeCommand),
    /// Concentrate the block entanglement of a bisymmetric state onto one
    /// mode pair.
    Localize {
        #[arg(long)]
        cm: PathBuf,
        /// size M of the first block
        #[arg(long)]
        split: usize,
        /// write the equivalent two-mode CM here
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Block-entanglement hierarchy of a fully symmetric 2N-mode state:
    /// CSV rows (k, log_negativity) for k = 1..N.
    BlockScan {
        /// total number of modes (2N)
        #[arg(long)]
        modes: usize,
        #[arg(long, conflicts_with = "mixedness")]
        squeezing: Option<f64>,
        /// single-mode mixedness b (alternative to --squeezing)
        #[arg(long)]
        mixedness: Option<f64>,
        /// build from a (modes + Q)-mode pure state and trace out Q modes
        #[arg(long, default_value_t = 0)]
        trace_out: usize,
    },
    /// Contangle of one mode versus the rest.
    Contangle {
        #[arg(long)]
        cm: PathBuf,
        #[arg(long)]
        focus: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Monogamy budget for every focus mode (adds the residual-contangle
    /// minimum for three-mode states).
    Monogamy {
        #[arg(long)]
        cm: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Pairwise and residual contangle of GHZ/W states over a grid of the
    /// local mixedness b: CSV rows (b, pairwise, residual).
    PromiscuityScan {
        #[arg(long)]
        b_min: f64,
        #[arg(long)]
        b_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Teleportation-network analysis.
    #[command(subcommand)]
    Teleport(TeleportCommand),
}

#[derive(Args)]
struct PurityArgs {
    #[arg(long)]
    mu1: f64,
    #[arg(long)]
    mu2: f64,
    #[arg(long)]
    mu: f64,
}

#[derive(Subcommand)]
enum MakeCommand {
    /// GHZ-type fully symmetric state from squeezed inputs and an N-splitter.
    Ghz {
        #[arg(long)]
        modes: usize,
        #[arg(long)]
        squeezing: f64,
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Two-mode squeezed vacuum.
    Tmsv {
        #[arg(long)]
        squeezing: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Vacuum state.
    Vacuum {
        #[arg(long)]
        modes: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum TeleportCommand {
    /// Optimal fidelity over the squeezing bias at fixed average squeezing.
    Optimize {
        #[arg(long)]
        parties: usize,
        #[arg(long)]
        rbar: f64,
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
    },
    /// Optimal fidelity and E_T for N = 2..parties-max: CSV (n, f_opt, e_t).
    Sweep {
        #[arg(long)]
        parties_max: usize,
        #[arg(long)]
        rbar: f64,
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
    },
}

enum CliError {
    Domain(Error),
    Input(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

fn load_cm(path: &Path) -> Result<(CovarianceMatrix, String), CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let cm: CovarianceMatrix = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Input(format!("malformed CM JSON in {}: {e}", path.display())))?;
    Ok((cm, digest))
}

fn args_digest(parts: &[String]) -> String {
    hex::encode(Sha256::digest(parts.join("\x1f").as_bytes()))
}

fn write_cm(cm: &CovarianceMatrix, output: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&CmJson::from(cm.clone())).expect("CM serializes");
    match output {
        Some(path) => std::fs::write(path, text.as_bytes())
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn spectrum_value(values: &[f64]) -> Value {
    Value::Array(values.iter().map(|v| json!(v)).collect())
}

fn run_command(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Validate { cm } => {
            let (state, digest) = load_cm(&cm)?;
            let rep = state.validate();
            let mut report = AnalysisReport::new(digest, "validate");
            report.put("symmetric", json!(rep.symmetric));
            report.put("physical", json!(rep.physical));
            report.put("nu_min", json!(rep.nu_min));
            report.put("n_modes", json!(state.n_modes()));
            report.print();
            Ok(())
        }
        Command::Spectrum { cm, transpose_side } => {
            let (state, digest) = load_cm(&cm)?;
            let mut report = AnalysisReport::new(digest, "spectrum");
            let spec = if transpose_side.is_empty() {
                state.symplectic_spectrum()?
            } else {
                state.ppt_spectrum(&transpose_side)?
            };
            report.put("values", spectrum_value(spec.values()));
            report.put("of_partial_transpose", json!(spec.is_partial_transpose()));
            report.print();
            Ok(())
        }
        Command::AnalyzeTwoMode { cm } => {
            let (state, digest) = load_cm(&cm)?;
            let inv = twomode::invariants_from_cm(&state)?;
            let sf = twomode::standard_form_from_invariants(&inv)?;
            let ppt = twomode::ppt_eigenvalues(&inv)?;
            let class = twomode::classify_by_purities(inv.mu1, inv.mu2, inv.mu)?;
            let mut report = AnalysisReport::new(digest, "analyze-two-mode");
            report.put("mu1", json!(inv.mu1));
            report.put("mu2", json!(inv.mu2));
            report.put("mu", json!(inv.mu));
            report.put("delta", json!(inv.delta));
            report.put(
                "standard_form",
                json!({"a": sf.a, "b": sf.b, "c_plus": sf.c_plus, "c_minus": sf.c_minus}),
            );
            report.put("nu_tilde_minus", json!(ppt.nu_tilde_minus));
            report.put("nu_tilde_plus", json!(ppt.nu_tilde_plus));
            report.put("log_negativity", json!(twomode::log_negativity_two_mode(&inv)?));
            report.put("classification", json!(class.to_string()));
            match twomode::eof_symmetric(&inv) {
                Ok(eof) => report.put("eof_symmetric", json!(eof)),
                Err(Error::NotSymmetric { .. }) => report
                    .warnings
                    .push("state is not symmetric; no closed-form entanglement of formation".to_owned()),
                Err(e) => return Err(e.into()),
            }
            report.print();
            Ok(())
        }
        Command::Classify(p) => {
            let class = twomode::classify_by_purities(p.mu1, p.mu2, p.mu)?;
            let digest = args_digest(&[
                "classify".into(),
                p.mu1.to_string(),
                p.mu2.to_string(),
                p.mu.to_string(),
            ]);
            let mut report = AnalysisReport::new(digest, "classify");
            report.put("classification", json!(class.to_string()));
            report.print();
            Ok(())
        }
        Command::Extremal(p) => {
            let ex = twomode::extremal_entanglement(p.mu1, p.mu2, p.mu)?;
            let digest = args_digest(&[
                "extremal".into(),
                p.mu1.to_string(),
                p.mu2.to_string(),
                p.mu.to_string(),
            ]);
            let mut report = AnalysisReport::new(digest, "extremal");
            report.put("e_max", json!(ex.e_max));
            report.put("e_min", json!(ex.e_min));
            report.put("e_avg", json!(ex.e_avg));
            report.put("rel_error", json!(ex.rel_error));
            report.print();
            Ok(())
        }
        Command::Make(make) => match make {
            MakeCommand::Ghz { modes, squeezing, noise, output } => {
                let cm = multimode::ghz_type_state(&GhzTypeSpec::new(modes, squeezing, noise)?)?;
                write_cm(&cm, output.as_deref())
            }
            MakeCommand::Tmsv { squeezing, output } => {
                let cm = gaussent::phasespace::two_mode_squeezed_vacuum(squeezing);
                write_cm(&cm, output.as_deref())
            }
            MakeCommand::Vacuum { modes, output } => {
                write_cm(&CovarianceMatrix::vacuum(modes), output.as_deref())
            }
        },
        Command::Localize { cm, split, output } => {
            let (state, digest) = load_cm(&cm)?;
            let loc = multimode::unitary_localization(&state, split)?;
            let n = state.n_modes();
            let original = state.log_negativity(&Bipartition::first_k(split, n)?)?;
            let localized = loc.eq_two_mode.log_negativity(&Bipartition::first_k(1, 2)?)?;
            let cross = multimode::localization_cross_residual(&state, split)?;
            let mut report = AnalysisReport::new(digest, "localize");
            report.put("split", json!(split));
            report.put("log_negativity_original", json!(original));
            report.put("log_negativity_localized", json!(localized));
            report.put("cross_correlation_residual", json!(cross));
            report.put(
                "residual_mode_purities",
                Value::Array(
                    loc.residual_modes
                        .iter()
                        .map(|m| json!(m.purity().unwrap_or(f64::NAN)))
                        .collect(),
                ),
            );
            if let Some(path) = output {
                write_cm(&loc.eq_two_mode, Some(&path))?;
            }
            report.print();
            Ok(())
        }
        Command::BlockScan { modes, squeezing, mixedness, trace_out } => {
            if modes < 2 || modes % 2 != 0 {
                return Err(CliError::Input("--modes must be an even number >= 2".to_owned()));
            }
            let r = match (squeezing, mixedness) {
                (Some(r), None) => r,
                (None, Some(b)) => multimode::squeezing_for_local_mixedness(modes + trace_out, b)?,
                _ => return Err(CliError::Input("give exactly one of --squeezing / --mixedness".to_owned())),
            };
            let pure = multimode::ghz_type_state(&GhzTypeSpec::new(modes + trace_out, r, 1.0)?)?;
            let cm = if trace_out == 0 {
                pure
            } else {
                pure.partial_trace(&(0..modes).collect::<Vec<_>>())?
            };
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "k,log_negativity").expect("stdout");
            for k in 1..=modes / 2 {
                let en = multimode::block_log_negativity(&cm, k)?;
                writeln!(stdout, "{k},{en}").expect("stdout");
            }
            Ok(())
        }
        Command::Contangle { cm, focus, seed } => {
            let (state, digest) = load_cm(&cm)?;
            let c = sharing::gaussian_contangle_one_vs_rest(&state, focus, seed)?;
            let mut report = AnalysisReport::new(digest, "contangle");
            report.put("focus", json!(focus));
            report.put("value", json!(c.value));
            report.put(
                "method",
                json!(match c.method {
                    sharing::ContangleMethod::AnalyticPure => "analytic-pure",
                    sharing::ContangleMethod::GaussianRoofNumeric => "gaussian-roof-numeric",
                }),
            );
            report.put("seed", json!(seed));
            report.print();
            Ok(())
        }
        Command::Monogamy { cm, seed } => {
            let (state, digest) = load_cm(&cm)?;
            let mut report = AnalysisReport::new(digest, "monogamy");
            let mut foci = Vec::new();
            for focus in 0..state.n_modes() {
                let rep = sharing::monogamy_check(&state, focus, seed)?;
                foci.push(json!({
                    "focus": focus,
                    "one_vs_rest": rep.one_vs_rest.value,
                    "pairwise": rep.pairwise.iter().map(|c| c.value).collect::<Vec<_>>(),
                    "residual": rep.residual,
                }));
            }
            report.put("per_focus", Value::Array(foci));
            if state.n_modes() == 3 {
                let res = sharing::residual_contangle(&state, seed)?;
                report.put("residual_contangle_minimum", json!(res.minimum));
            }
            report.put("seed", json!(seed));
            report.print();
            Ok(())
        }
        Command::PromiscuityScan { b_min, b_max, steps, seed } => {
            if steps < 2 || !(b_min >= 1.0 && b_max > b_min) {
                return Err(CliError::Input(
                    "need b_max > b_min >= 1 and at least two steps".to_owned(),
                ));
            }
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "b,pairwise,residual").expect("stdout");
            for k in 0..steps {
                let b = b_min + (b_max - b_min) * k as f64 / (steps - 1) as f64;
                let rep = sharing::promiscuity_report(b, seed)?;
                writeln!(stdout, "{b},{},{}", rep.pairwise_contangle, rep.residual).expect("stdout");
            }
            Ok(())
        }
        Command::Teleport(tp) => match tp {
            TeleportCommand::Optimize { parties, rbar, noise } => {
                TeleportResourceSpec::new(parties, rbar, rbar, noise)?;
                let res = teleport::optimal_fidelity(parties, rbar, noise)?;
                let digest = args_digest(&[
                    "teleport-optimize".into(),
                    parties.to_string(),
                    rbar.to_string(),
                    noise.to_string(),
                ]);
                let mut report = AnalysisReport::new(digest, "teleport optimize");
                report.put("parties", json!(parties));
                report.put("rbar", json!(rbar));
                report.put("noise", json!(noise));
                report.put("fidelity", json!(res.fidelity));
                report.put("e_t", json!(res.e_t));
                report.put("optimal_bias", json!(res.optimal_bias));
                report.print();
                Ok(())
            }
            TeleportCommand::Sweep { parties_max, rbar, noise } => {
                if parties_max < 2 {
                    return Err(CliError::Input("--parties-max must be at least 2".to_owned()));
                }
                let mut stdout = std::io::stdout().lock();
                writeln!(stdout, "n,f_opt,e_t").expect("stdout");
                for n in 2..=parties_max {
                    let res = teleport::optimal_fidelity(n, rbar, noise)?;
                    writeln!(stdout, "{n},{},{}", res.fidelity, res.e_t).expect("stdout");
                }
                Ok(())
            }
        },
    }
}

/// Parse and dispatch; returns the process exit code.
fn run(argv: Vec<String>) -> u8 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_command(cli.command) {
        Ok(()) => 0,
        Err(CliError::Domain(e)) => {
            eprintln!("error: {}: {e}", e.name());
            1
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: malformed input: {msg}");
            2
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args().collect()))
}
