use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use logizono::cases::lfsr::{key_from_hex, key_to_hex, recover_key, LfsrInstance, LfsrSpec};
use logizono::cases::{boolean10_model, intersection_model};
use logizono::selftest;
use logizono::{reach, Algebra, Error, Mode, Model, ReachOptions, SetValue, DEFAULT_EVAL_CAP};

/// Reachability analysis of logical systems with generator-space sets.
#[derive(Parser)]
#[command(name = "logizono", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute reachable-set sizes of a model over a number of steps.
    Reach(ReachArgs),
    /// Recover an LFSR key from a known message and its ciphertext.
    Lfsr(LfsrArgs),
    /// Print the points of a serialized set.
    Eval(EvalArgs),
    /// Compare the set algebras against point enumeration on random inputs.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Case {
    Intersection,
    Boolean10,
}

#[derive(Args)]
struct ReachArgs {
    /// Model file (JSON).
    #[arg(long, required_unless_present = "case", conflicts_with = "case")]
    model: Option<PathBuf>,
    /// Built-in model instead of a file. `boolean10` draws its sets from `--seed`.
    #[arg(long, value_enum)]
    case: Option<Case>,
    /// Steps at which to report, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    steps: Vec<usize>,
    #[arg(long, visible_alias = "rep", default_value = "poly")]
    algebra: Algebra,
    #[arg(long, default_value = "minkowski")]
    mode: Mode,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Include the per-variable sets of every reported step (JSON only).
    #[arg(long)]
    dump_sets: bool,
    /// Let each next-state reference see an independent copy of that set.
    #[arg(long)]
    break_next_state_deps: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Re-encode a dependent group of poly variables above this many factors;
    /// 0 never re-encodes.
    #[arg(long, default_value_t = 12)]
    rebase_threshold: usize,
}

#[derive(Args)]
struct LfsrArgs {
    /// Register length; taps are scaled from the 60-cell default unless given.
    #[arg(long)]
    lk: Option<usize>,
    /// Feedback taps, comma separated, 1-based.
    #[arg(long, value_delimiter = ',')]
    taps: Option<Vec<usize>>,
    /// Output taps, comma separated, 1-based.
    #[arg(long, value_delimiter = ',')]
    out_taps: Option<Vec<usize>>,
    /// Message length in bits (default: twice the register length).
    #[arg(long)]
    lm: Option<usize>,
    /// Key to encrypt with; random from `--seed` otherwise.
    #[arg(long)]
    key_hex: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Register description (JSON) used as the starting point for the flags.
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Serialized logical or polynomial logical zonotope (JSON).
    input: PathBuf,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Fraction of the full case counts to run.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
}

/// Work caps, overridable through `LOGIZONO_CAP` (number of free binary
/// choices an enumeration may expand).
fn eval_cap() -> Result<usize, Error> {
    match std::env::var("LOGIZONO_CAP") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("LOGIZONO_CAP must be a number, got {v:?}"))),
        Err(_) => Ok(DEFAULT_EVAL_CAP),
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("cannot read {}: {e}", path.display()),
        ))
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("cannot write {}: {e}", p.display()),
            ))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_reach(args: ReachArgs) -> Result<(), Error> {
    let mut steps = args.steps.clone();
    steps.sort_unstable();
    let horizon = *steps.last().expect("clap requires at least one step");
    let model = match (&args.model, args.case) {
        (Some(path), _) => Model::from_json(&read(path)?)?,
        (None, Some(Case::Intersection)) => intersection_model(),
        (None, Some(Case::Boolean10)) => boolean10_model(args.seed, horizon),
        (None, None) => unreachable!("clap requires --model or --case"),
    };
    if args.dump_sets && matches!(args.format, Format::Csv) {
        return Err(Error::Invalid("--dump-sets needs --format json".into()));
    }
    let cap = eval_cap()?;
    let opts = ReachOptions {
        eval_cap: cap,
        point_cap: 1usize << cap.min(40),
        rebase_threshold: (args.rebase_threshold > 0).then_some(args.rebase_threshold),
        break_next_state_deps: args.break_next_state_deps,
        record: Some(steps),
        keep_sets: args.dump_sets,
        seed: Some(args.seed),
        ..ReachOptions::default()
    };
    let result = reach(&model, horizon, args.algebra, args.mode, &opts)?;
    let text = match args.format {
        Format::Csv => result.to_csv()?,
        Format::Json => result.to_json()? + "\n",
    };
    emit(args.out.as_deref(), &text)
}

fn cmd_lfsr(args: LfsrArgs) -> Result<(), Error> {
    let mut spec = match (&args.spec, args.lk) {
        (Some(path), _) => serde_json::from_str::<LfsrSpec>(&read(path)?)?,
        (None, Some(lk)) => LfsrSpec::scaled(lk)?,
        (None, None) => LfsrSpec::default(),
    };
    if let (Some(_), Some(lk)) = (&args.spec, args.lk) {
        spec.length = lk;
    }
    if let Some(t) = args.taps {
        spec.feedback = t;
    }
    if let Some(t) = args.out_taps {
        spec.output = t;
    }
    if let Some(lm) = args.lm {
        spec.message_len = lm;
    }
    spec.validate()?;
    let key = args
        .key_hex
        .as_deref()
        .map(|h| key_from_hex(spec.length, h))
        .transpose()?;
    let instance = LfsrInstance::random(&spec, key, args.seed)?;
    println!(
        "lk={} lm={} feedback={:?} output={:?} seed={}",
        spec.length, spec.message_len, spec.feedback, spec.output, args.seed
    );
    println!("key={}", key_to_hex(&instance.key));
    let start = Instant::now();
    let outcome = recover_key(&spec, &instance.message, &instance.cipher);
    let elapsed = start.elapsed().as_secs_f64();
    let found = outcome?;
    if found.candidates > 1 {
        eprintln!(
            "warning: {} keys reproduce the ciphertext; a longer message (--lm) would pin it down",
            found.candidates
        );
    }
    println!("recovered_key={}", key_to_hex(&found.key));
    println!("candidates={}", found.candidates);
    println!("recovered={}", found.key == instance.key);
    println!("time_seconds={elapsed:.6}");
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<(), Error> {
    let set: SetValue = serde_json::from_str(&read(&args.input)?)?;
    for p in set.evaluate(eval_cap()?)?.sorted() {
        println!("{p}");
    }
    Ok(())
}

fn cmd_selftest(args: SelftestArgs) -> Result<bool, Error> {
    let mut ok = true;
    for report in selftest::run_all(args.seed, args.scale)? {
        println!("{report}");
        ok &= report.passed();
    }
    Ok(ok)
}

fn exit_code(e: &Error) -> u8 {
    match e.root() {
        Error::Capacity { .. } => 3,
        Error::SearchFailure(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Reach(a) => cmd_reach(a).map(|_| true),
        Command::Lfsr(a) => cmd_lfsr(a).map(|_| true),
        Command::Eval(a) => cmd_eval(a).map(|_| true),
        Command::Selftest(a) => cmd_selftest(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
