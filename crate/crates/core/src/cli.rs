//! The `nctool` command line: `ncrank`, `ncsingular`, `oracle` and `gen`.
//!
//! Exit codes: 0 certified, 2 uncertified, 1 input error (no output written).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::Prime;
use crate::bilinear::SymbolicMatrix;
use crate::io::{self, FieldKind, Instance, Metadata, NcRankResult, NcSingularResult, OracleResult, PairJson, SCHEMA_VERSION};
use crate::oracle::{blowup_lower_bound, brute_force_mvsp};
use crate::sppa::{mvsp_to_fr, sppa_run, SolverConfig};
use crate::valdet::{valdet_run, Verdict};

pub const EXIT_CERTIFIED: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_UNCERTIFIED: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] io::IoError),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("{0}")]
    Solver(String),
}

#[derive(Debug, Parser)]
#[command(name = "nctool", version, about = "Noncommutative rank over GF(p) and nc-singularity over the integers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certified nc-rank of a GF(p) instance.
    Ncrank(NcrankArgs),
    /// nc-singularity test of an integer instance via p-adic descent.
    Ncsingular(NcsingularArgs),
    /// Reference oracles: exhaustive search or the blow-up lower bound.
    Oracle(OracleArgs),
    /// Deterministic instance generator.
    Gen(GenArgs),
}

#[derive(Debug, Clone, clap::Args)]
pub struct SolverArgs {
    #[arg(long)]
    pub max_cycles: Option<usize>,
    #[arg(long)]
    pub certify_dmax: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
}

impl SolverArgs {
    fn config(&self, n: usize) -> Result<SolverConfig, CliError> {
        let mut cfg = SolverConfig::defaults(n);
        if let Some(c) = self.max_cycles {
            cfg.max_cycles = c;
        }
        if let Some(d) = self.certify_dmax {
            cfg.certify_dmax = d;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        cfg.seed = self.seed;
        cfg.validate(n).map_err(|e| CliError::Argument(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, clap::Args)]
pub struct NcrankArgs {
    pub file: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct NcsingularArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub p: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleMode {
    Bruteforce,
    Blowup,
}

#[derive(Debug, clap::Args)]
pub struct OracleArgs {
    pub file: PathBuf,
    #[arg(long, value_enum)]
    pub mode: OracleMode,
    /// Largest blow-up size (default `max(1, n − 1)`).
    #[arg(long)]
    pub dmax: Option<usize>,
    #[arg(long, default_value_t = 24)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Random,
    Skew,
    Zerocolumn,
}

#[derive(Debug, clap::Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    /// Number of matrices (default `n`; all `n(n−1)/2` pairs for `skew`).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub p: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Family::Random)]
    pub family: Family,
    /// Emit an integer instance with entries in `[-max_entry, max_entry]`.
    #[arg(long)]
    pub int: bool,
    #[arg(long, default_value_t = 3)]
    pub max_entry: i64,
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

/// Parameters of a generated instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub family: Family,
    pub n: usize,
    pub m: Option<usize>,
    pub p: u64,
    pub seed: u64,
    pub int: bool,
    pub max_entry: i64,
}

/// Generates an instance; identical parameters give identical output.
pub fn generate(spec: &GenSpec) -> Result<Instance, CliError> {
    let GenSpec { family, n, p, seed, int, max_entry, .. } = *spec;
    if n == 0 {
        return Err(CliError::Argument("n must be positive".into()));
    }
    let prime = Prime::new(p).map_err(|_| io::IoError::NotPrime(p.to_string()))?;
    if int && max_entry < 1 {
        return Err(CliError::Argument("max-entry must be positive".into()));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let m = match (family, spec.m) {
        (Family::Skew, None) => pairs.len(),
        (Family::Skew, Some(m)) if m > pairs.len() => {
            return Err(CliError::Argument(format!("skew family has at most {} matrices for n = {n}", pairs.len())));
        }
        (_, Some(m)) => m,
        (_, None) => n,
    };
    if m == 0 {
        return Err(CliError::Argument("m must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entry = |rng: &mut ChaCha8Rng| -> BigInt {
        if int {
            rng.gen_range(-max_entry..=max_entry).into()
        } else {
            rng.gen_range(0..p).into()
        }
    };
    let minus_one: BigInt = if int { (-1).into() } else { (p - 1).into() };
    let matrices: Vec<Vec<Vec<BigInt>>> = (0..m)
        .map(|k| match family {
            Family::Random => (0..n).map(|_| (0..n).map(|_| entry(&mut rng)).collect()).collect(),
            Family::Zerocolumn => (0..n)
                .map(|_| (0..n).map(|j| if j == 0 { BigInt::from(0) } else { entry(&mut rng) }).collect())
                .collect(),
            Family::Skew => {
                let (i, j) = pairs[k];
                let mut a = vec![vec![BigInt::from(0); n]; n];
                a[i][j] = 1.into();
                a[j][i] = minus_one.clone();
                a
            }
        })
        .collect();
    let family_name = match family {
        Family::Random => "random",
        Family::Skew => "skew",
        Family::Zerocolumn => "zerocolumn",
    };
    let field_name = if int { "int".to_string() } else { format!("p{p}") };
    Ok(Instance {
        n,
        field: if int { FieldKind::Int } else { FieldKind::Gfp(prime) },
        matrices,
        metadata: Metadata {
            name: Some(format!("{family_name}-n{n}-m{m}-{field_name}-s{seed}")),
            seed: Some(seed),
        },
    })
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(CliError::Argument("threads must be positive".into())),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| CliError::Argument(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => Ok(io::write_file(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn cmd_ncrank(args: &NcrankArgs) -> Result<i32, CliError> {
    let inst = Instance::load(&args.file)?;
    let a = inst.to_symbolic()?;
    let cfg = args.solver.config(a.n())?;
    let state = with_threads(args.solver.threads, || sppa_run(&a, &cfg))?.map_err(|e| CliError::Solver(e.to_string()))?;
    let cert = mvsp_to_fr(&state.best_feasible, &a).map_err(|e| CliError::Solver(e.to_string()))?;
    let result = NcRankResult::new(&a, &state, &cert, &cfg);
    result.verify(&a).map_err(CliError::Solver)?;
    emit(args.output.as_deref(), &io::to_json(&result))?;
    if state.certified {
        eprintln!("nc-rank = {} (certified at cycle {})", result.nc_rank, state.certified_at.unwrap_or(0));
        Ok(EXIT_CERTIFIED)
    } else {
        eprintln!("nc-rank in [{}, {}] (uncertified after {} cycles)", result.lower_bound, result.nc_rank, state.cycle);
        Ok(EXIT_UNCERTIFIED)
    }
}

pub fn cmd_ncsingular(args: &NcsingularArgs) -> Result<i32, CliError> {
    let inst = Instance::load(&args.file)?;
    let a = inst.to_int()?;
    let p = Prime::new(args.p).map_err(|_| io::IoError::NotPrime(args.p.to_string()))?;
    let cfg = args.solver.config(a.n())?;
    let verdict = with_threads(args.solver.threads, || valdet_run(&a, p, &cfg))?.map_err(|e| CliError::Solver(e.to_string()))?;
    let result = NcSingularResult::new(&a, p, &verdict, &cfg);
    emit(args.output.as_deref(), &io::to_json(&result))?;
    eprintln!("{} after {} steps (objective {}, bound {})", result.verdict, result.iterations, result.objective, result.bound);
    Ok(match verdict.verdict {
        Verdict::Inconclusive => EXIT_UNCERTIFIED,
        Verdict::Regular | Verdict::Singular => EXIT_CERTIFIED,
    })
}

/// Brute force always certifies; the blow-up bound certifies only full rank.
pub fn cmd_oracle(args: &OracleArgs) -> Result<i32, CliError> {
    let inst = Instance::load(&args.file)?;
    let a: SymbolicMatrix = inst.to_symbolic()?;
    let mut result = OracleResult {
        version: SCHEMA_VERSION.into(),
        kind: "oracle".into(),
        mode: String::new(),
        n: a.n(),
        m: a.m(),
        p: a.field().p(),
        nc_rank: None,
        optimal_pair: None,
        lower_bound: None,
        witness: None,
    };
    let code = match args.mode {
        OracleMode::Bruteforce => {
            let (pair, value) = with_threads(args.threads, || brute_force_mvsp(&a))?.map_err(|e| CliError::Argument(e.to_string()))?;
            result.mode = "bruteforce".into();
            result.nc_rank = Some(value);
            result.optimal_pair = Some(PairJson::from(&pair));
            eprintln!("nc-rank = {value}");
            EXIT_CERTIFIED
        }
        OracleMode::Blowup => {
            let dmax = args.dmax.unwrap_or(a.n().saturating_sub(1).max(1));
            if dmax == 0 {
                return Err(CliError::Argument("dmax must be positive".into()));
            }
            let w = with_threads(args.threads, || blowup_lower_bound(&a, dmax, args.trials, args.seed))?;
            result.mode = "blowup".into();
            result.lower_bound = Some(w.bound);
            result.witness = Some((&w).into());
            eprintln!("nc-rank >= {} (d = {})", w.bound, w.d);
            if w.bound == a.n() {
                EXIT_CERTIFIED
            } else {
                EXIT_UNCERTIFIED
            }
        }
    };
    emit(args.output.as_deref(), &io::to_json(&result))?;
    Ok(code)
}

pub fn cmd_gen(args: &GenArgs) -> Result<i32, CliError> {
    let inst = generate(&GenSpec {
        family: args.family,
        n: args.n,
        m: args.m,
        p: args.p,
        seed: args.seed,
        int: args.int,
        max_entry: args.max_entry,
    })?;
    emit(args.output.as_deref(), &inst.to_json())?;
    Ok(EXIT_CERTIFIED)
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_CERTIFIED };
        }
    };
    let outcome = match &cli.command {
        Command::Ncrank(a) => cmd_ncrank(a),
        Command::Ncsingular(a) => cmd_ncsingular(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Gen(a) => cmd_gen(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}
