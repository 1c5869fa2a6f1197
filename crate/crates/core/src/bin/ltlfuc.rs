use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ltlfuc::activation::{Algorithm, Status, UcResult};
use ltlfuc::bench::{self, RunOptions, DEFAULT_TIMEOUT_SECS};
use ltlfuc::bmc::{BmcConfig, DEFAULT_K_MAX};
use ltlfuc::formula::Spec;
use ltlfuc::oracle::{oracle_all_min_ucs, oracle_sat_with, OracleConfig};
use ltlfuc::parser::parse_spec;
use ltlfuc::symbolic::BddMode;
use ltlfuc::trp::{self, ProverConfig};

#[derive(Parser)]
#[command(name = "ltlfuc", version, about = "LTLf satisfiability and unsatisfiable cores")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide one spec and report a core or a witness.
    Check {
        file: PathBuf,
        #[arg(long, default_value = "bdd")]
        algo: Algorithm,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run algorithms over a directory of `.ltlf` files and write CSV.
    Bench {
        dir: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "bdd,bmc,native")]
        algos: Vec<Algorithm>,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Compare algorithms with each other and with the explicit oracle.
    Crosscheck {
        dir: PathBuf,
        /// Defaults to bdd,bmc,native plus trp when a prover is given.
        #[arg(long, value_delimiter = ',')]
        algos: Option<Vec<Algorithm>>,
        #[arg(long, default_value_t = 40)]
        max_len: usize,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Explicit-state verdict, shortest witness and all minimal cores.
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = 200)]
        max_len: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Stand-in prover for the trp bridge.
    #[command(hide = true)]
    StubProver {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_K_MAX)]
        k_max: usize,
    },
}

#[derive(Args)]
struct EngineArgs {
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    k_max: usize,
    /// Per-run limit in seconds.
    #[arg(long, default_value_t = DEFAULT_TIMEOUT_SECS)]
    timeout: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "pick-one")]
    bdd_mode: BddMode,
    /// External prover executable.
    #[arg(long)]
    trp_exe: Option<PathBuf>,
    /// Prover argument; `{input}` stands for the input file. Repeatable.
    #[arg(long = "trp-arg", allow_hyphen_values = true)]
    trp_args: Vec<String>,
    /// Prover limit in seconds; defaults to --timeout.
    #[arg(long)]
    trp_timeout: Option<f64>,
}

impl EngineArgs {
    fn options(&self) -> Result<RunOptions> {
        let secs = self.trp_timeout.unwrap_or(self.timeout);
        let prover = ProverConfig {
            executable: self.trp_exe.clone(),
            args: self.trp_args.clone(),
            timeout: Some(Duration::try_from_secs_f64(secs.max(0.0)).context("invalid --trp-timeout")?),
            ..ProverConfig::default()
        };
        Ok(RunOptions { timeout: Some(self.timeout), k_max: self.k_max, seed: self.seed, bdd_mode: self.bdd_mode, prover })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn load(file: &PathBuf) -> Result<Spec> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let name = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parse_spec(&text, name).with_context(|| format!("parsing {}", file.display()))
}

fn exit_code(s: Status) -> u8 {
    match s {
        Status::Sat => 0,
        Status::Unsat => 10,
        Status::Unknown => 20,
        Status::ReducedToFalse => 30,
    }
}

fn render_text(r: &UcResult) -> String {
    let mut s = format!("status: {}\nalgorithm: {}\nelapsed: {:.6}s\n", r.status.as_str(), r.algorithm, r.elapsed.as_secs_f64());
    if let Some(core) = &r.core {
        s.push_str(&format!("core: {}\n", core.iter().cloned().collect::<Vec<_>>().join(" ")));
    }
    if let Some(k) = r.k_reached {
        s.push_str(&format!("k: {k}\n"));
    }
    if let Some(reason) = &r.reason {
        s.push_str(&format!("reason: {reason}\n"));
    }
    if let Some(w) = &r.witness {
        s.push_str("witness:\n");
        s.push_str(&w.to_string());
        if !s.ends_with('\n') {
            s.push('\n');
        }
    }
    s
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Check { file, algo, engine, format } => {
            let spec = load(&file)?;
            let opts = engine.options()?;
            let r = match algo {
                Algorithm::Trp => {
                    let start = Instant::now();
                    match trp::algorithm4_try(&spec, &opts.prover) {
                        Ok(r) => r,
                        Err(e @ (trp::TrpError::Unavailable | trp::TrpError::Timeout)) => {
                            UcResult::unknown(Algorithm::Trp, e.to_string())
                        }
                        Err(e) => return Err(e.into()),
                    }
                    .with_elapsed(start.elapsed())
                }
                _ => bench::run_algorithm(&spec, algo, &opts),
            };
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&r)?),
                Format::Text => print!("{}", render_text(&r)),
            }
            Ok(exit_code(r.status))
        }
        Command::Bench { dir, algos, out, jobs, engine } => {
            let problems = bench::load_problems(&dir)?;
            let records = bench::bench(&problems, &algos, &engine.options()?, jobs);
            match out {
                Some(path) => {
                    let f = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                    bench::write_csv(f, &records)?;
                }
                None => bench::write_csv(io::stdout().lock(), &records)?,
            }
            Ok(0)
        }
        Command::Crosscheck { dir, algos, max_len, engine } => {
            let problems = bench::load_problems(&dir)?;
            let algos = algos.unwrap_or_else(|| {
                let mut v = vec![Algorithm::Bdd, Algorithm::Bmc, Algorithm::Native];
                if engine.trp_exe.is_some() {
                    v.push(Algorithm::Trp);
                }
                v
            });
            let oracle = OracleConfig { max_len, ..OracleConfig::default() };
            let report = bench::crosscheck(&problems, &algos, &engine.options()?, &oracle);
            print!("{}", report.render());
            Ok(u8::from(!report.is_consistent()))
        }
        Command::Oracle { file, max_len, format } => {
            let spec = load(&file)?;
            let cfg = OracleConfig { max_len, ..OracleConfig::default() };
            let v = oracle_sat_with(&spec.formula(), &cfg)?;
            let cores = if v.satisfiable || spec.len() > 20 { None } else { Some(oracle_all_min_ucs(&spec, max_len)?) };
            match format {
                Format::Json => {
                    let out = serde_json::json!({
                        "status": if v.satisfiable { "SAT" } else { "UNSAT" },
                        "witness": v.witness,
                        "minimal_cores": cores,
                    });
                    println!("{}", serde_json::to_string_pretty(&out)?);
                }
                Format::Text => {
                    println!("status: {}", if v.satisfiable { "SAT" } else { "UNSAT" });
                    for c in cores.iter().flatten() {
                        println!("minimal core: {}", c.iter().cloned().collect::<Vec<_>>().join(" "));
                    }
                    if let Some(w) = &v.witness {
                        print!("witness:\n{w}");
                    }
                }
            }
            Ok(if v.satisfiable { 0 } else { 10 })
        }
        Command::StubProver { file, k_max } => {
            let text = fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let out = trp::stub_prover(&text, &BmcConfig { k_max, ..BmcConfig::default() })?;
            if out.starts_with("unknown") {
                bail!("{}", out.trim());
            }
            io::stdout().write_all(out.as_bytes())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
