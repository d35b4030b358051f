mod config;

use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use symrec::arg::{build_arg, ArgConfig};
use symrec::bayesnet::ScoreKind;
use symrec::classifier::{classify, evaluate, train, Baseline, Engine, EvaluationReport, Model};
use symrec::datagen::{generate_protocol, write_dataset, ProtocolConfig};
use symrec::geometry::VectorSymbol;
use symrec::model_io::{read_model, write_model};
use symrec::signature::{compute_signature, read_csv, write_csv, Signature};

use crate::config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    /// Library error, prefixed with the input it came from.
    fn lib(context: impl std::fmt::Display, e: symrec::Error) -> Self {
        match e {
            symrec::Error::Invariant(_) => CliError::Internal(format!("{context}: {e}")),
            _ => CliError::Data(format!("{context}: {e}")),
        }
    }

    fn io(context: impl std::fmt::Display, e: io::Error) -> Self {
        CliError::Data(format!("{context}: {e}"))
    }
}

type CliResult<T> = Result<T, CliError>;

/// Structural recognition of line-drawing symbols.
#[derive(Debug, Parser)]
#[command(name = "symrec", version)]
struct Cli {
    /// TOML settings file; flags override its values.
    #[arg(long, global = true, env = "SYMREC_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic library with train and test splits.
    Gen(GenArgs),
    /// Compute signatures of vector files as CSV rows.
    Extract(ExtractArgs),
    /// Learn a model from a signature CSV.
    Train(TrainArgs),
    /// Classify signatures or vector files with a model.
    Classify(ClassifyArgs),
    /// Score a model on labelled test sets.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    classes: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory; must not exist or be empty.
    #[arg(long)]
    out: PathBuf,
    /// Queries per class and condition.
    #[arg(long)]
    queries: Option<usize>,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    /// Vector files, or directories searched for `*.vec`.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Keep only files whose parent directory has this name (e.g. `train`, `clean`).
    #[arg(long)]
    split: Option<String>,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EngineArg {
    #[value(name = "hill_climb", alias = "hill-climb")]
    HillClimb,
    Ga,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScoreArg {
    Bic,
    Aic,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Training signature CSV.
    #[arg(long)]
    data: PathBuf,
    /// Model file to write.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
    #[arg(long, value_enum)]
    score: Option<ScoreArg>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    max_parents: Option<usize>,
    #[arg(long)]
    m_init: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    population: Option<usize>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("query").required(true).args(["row", "vec", "csv"])))]
struct ClassifyArgs {
    #[arg(long)]
    model: PathBuf,
    /// One CSV row; the trailing label may be `?`.
    #[arg(long)]
    row: Option<String>,
    /// A vector symbol file.
    #[arg(long)]
    vec: Option<PathBuf>,
    /// A signature CSV; every row is classified.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Number of classes listed per query; all when absent.
    #[arg(long)]
    top: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BaselineArg {
    Knn,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    model: PathBuf,
    /// `condition=path` to a labelled signature CSV; repeatable.
    #[arg(long = "test", required = true, value_parser = parse_test_spec)]
    tests: Vec<(String, PathBuf)>,
    #[arg(long, value_enum, requires = "train")]
    baseline: Option<BaselineArg>,
    /// Training CSV for the baseline.
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// CSV report to write.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn parse_test_spec(s: &str) -> Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((cond, path)) if !cond.is_empty() && !path.is_empty() => Ok((cond.to_string(), PathBuf::from(path))),
        _ => Err(format!("expected condition=path, got {s:?}")),
    }
}

/// Writes via a temporary file in the target directory and renames it into place.
fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path.display(), e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path.display(), e))?;
    tmp.persist(path).map_err(|e| CliError::io(path.display(), e.error))?;
    Ok(())
}

fn read_signatures(path: &Path) -> CliResult<Vec<Signature>> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path.display(), e))?;
    read_csv(BufReader::new(file)).map_err(|e| CliError::lib(path.display(), e))
}

fn load_model(path: &Path) -> CliResult<Model> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
    read_model(&text).map_err(|e| CliError::lib(path.display(), e))
}

fn cmd_gen(args: &GenArgs, cfg: &RunConfig) -> CliResult<()> {
    let mut protocol = ProtocolConfig::new(args.classes as usize, args.seed);
    protocol.queries_per_class = args.queries.unwrap_or(cfg.queries_per_class);
    protocol.degrade = cfg.degrade;
    protocol.library = cfg.library;
    protocol.arg = cfg.train.arg;
    let data = generate_protocol(&protocol).map_err(|e| CliError::lib("gen", e))?;

    let out = &args.out;
    if out.exists() {
        let mut entries = std::fs::read_dir(out).map_err(|e| CliError::io(out.display(), e))?;
        if entries.next().is_some() {
            return Err(CliError::Data(format!("{}: directory exists and is not empty", out.display())));
        }
    }
    let parent = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&parent).map_err(|e| CliError::io(parent.display(), e))?;
    let staging = tempfile::Builder::new()
        .prefix(".symrec-gen")
        .tempdir_in(&parent)
        .map_err(|e| CliError::io(parent.display(), e))?;
    write_dataset(staging.path(), &data).map_err(|e| CliError::lib(out.display(), e))?;
    let staged = staging.keep();
    std::fs::rename(&staged, out).map_err(|e| {
        let _ = std::fs::remove_dir_all(&staged);
        CliError::io(out.display(), e)
    })?;
    let tests: usize = data.tests.iter().map(|(_, q)| q.len()).sum();
    eprintln!(
        "wrote {} classes: {} training and {} test symbols to {}",
        data.library.len(),
        data.train.len(),
        tests,
        out.display()
    );
    Ok(())
}

/// `.vec` files under `inputs`, sorted per input for a stable row order.
fn collect_vec_files(inputs: &[PathBuf], split: Option<&str>) -> CliResult<Vec<PathBuf>> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found = Vec::new();
            for entry in walkdir::WalkDir::new(input) {
                let entry = entry.map_err(|e| CliError::Data(format!("{}: {e}", input.display())))?;
                let p = entry.path();
                if entry.file_type().is_file() && p.extension().is_some_and(|x| x == "vec") {
                    found.push(p.to_path_buf());
                }
            }
            found.sort();
            files.extend(found);
        } else if input.is_file() {
            files.push(input.clone());
        } else {
            return Err(CliError::Data(format!("{}: no such file or directory", input.display())));
        }
    }
    if let Some(split) = split {
        files.retain(|f| f.parent().and_then(Path::file_name).is_some_and(|n| n == split));
    }
    Ok(files)
}

/// Label from the file header, else from the `<label>/<split>/<file>` layout.
fn label_from_path(path: &Path) -> Option<String> {
    path.parent()?.parent()?.file_name()?.to_str().map(String::from)
}

fn extract_file(path: &Path, arg: &ArgConfig) -> CliResult<Signature> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
    let symbol = VectorSymbol::parse(&text).map_err(|e| CliError::lib(path.display(), e))?;
    let mut sig = compute_signature(&build_arg(&symbol, arg));
    sig.label = symbol.label.clone().or_else(|| label_from_path(path));
    Ok(sig)
}

fn cmd_extract(args: &ExtractArgs, cfg: &RunConfig) -> CliResult<()> {
    let files = collect_vec_files(&args.inputs, args.split.as_deref())?;
    if files.is_empty() {
        return Err(CliError::Data("no vector files matched".into()));
    }
    let mut rows = Vec::with_capacity(files.len());
    for f in &files {
        let sig = extract_file(f, &cfg.train.arg)?;
        if sig.label.is_none() {
            return Err(CliError::Data(format!("{}: no label in the file or its path", f.display())));
        }
        sig.validate().map_err(|e| CliError::lib(f.display(), e))?;
        rows.push(sig);
    }
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).map_err(|e| CliError::lib("extract", e))?;
    match &args.out {
        Some(path) => write_atomic(path, &buf)?,
        None => io::stdout().write_all(&buf).map_err(|e| CliError::io("stdout", e))?,
    }
    Ok(())
}

fn cmd_train(args: &TrainArgs, cfg: &RunConfig) -> CliResult<()> {
    let mut tc = cfg.train.clone();
    if let Some(e) = args.engine {
        tc.engine = match e {
            EngineArg::HillClimb => Engine::HillClimb,
            EngineArg::Ga => Engine::Ga,
        };
    }
    if let Some(s) = args.score {
        tc.score = match s {
            ScoreArg::Bic => ScoreKind::Bic,
            ScoreArg::Aic => ScoreKind::Aic,
        };
    }
    tc.seed = args.seed.unwrap_or(tc.seed);
    tc.alpha = args.alpha.unwrap_or(tc.alpha);
    tc.max_parents = args.max_parents.unwrap_or(tc.max_parents);
    tc.m_init = args.m_init.or(tc.m_init);
    tc.generations = args.generations.unwrap_or(tc.generations);
    tc.population_size = args.population.unwrap_or(tc.population_size);
    tc.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let rows = read_signatures(&args.data)?;
    let model = train(&rows, &tc).map_err(|e| CliError::lib(args.data.display(), e))?;
    write_atomic(&args.out, write_model(&model).as_bytes())?;
    eprintln!(
        "trained on {} rows, {} classes, {} arcs; {} {:.3} (empty graph {:.3})",
        rows.len(),
        model.classes.len(),
        model.net.dag().n_edges(),
        tc.score.name(),
        model.meta.structure_score,
        model.meta.empty_score
    );
    Ok(())
}

fn cmd_classify(args: &ClassifyArgs, _cfg: &RunConfig) -> CliResult<()> {
    let model = load_model(&args.model)?;
    let queries = if let Some(row) = &args.row {
        vec![Signature::from_csv_row(row, 1).map_err(|e| CliError::lib("--row", e))?]
    } else if let Some(path) = &args.vec {
        vec![extract_file(path, &model.meta.config.arg)?]
    } else if let Some(path) = &args.csv {
        read_signatures(path)?
    } else {
        unreachable!("clap enforces one query source")
    };
    let top = args.top.unwrap_or(model.classes.len()).max(1);
    let mut out = String::new();
    for (i, q) in queries.iter().enumerate() {
        let c = classify(&model, q);
        if queries.len() > 1 {
            out.push_str(&format!("query {}\n", i + 1));
        }
        out.push_str(&format!("label {}\n", c.label));
        for (label, p) in c.ranked(&model).into_iter().take(top) {
            out.push_str(&format!("  {label} {p:.9}\n"));
        }
    }
    io::stdout().write_all(out.as_bytes()).map_err(|e| CliError::io("stdout", e))
}

fn cmd_evaluate(args: &EvaluateArgs, _cfg: &RunConfig) -> CliResult<()> {
    let model = load_model(&args.model)?;
    let mut tests = Vec::with_capacity(args.tests.len());
    for (cond, path) in &args.tests {
        tests.push((cond.clone(), read_signatures(path)?));
    }
    let train_rows = match (&args.baseline, &args.train) {
        (Some(BaselineArg::Knn), Some(path)) => Some(read_signatures(path)?),
        _ => None,
    };
    if args.k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    let baseline = train_rows.as_deref().map(|t| Baseline { train: t, k: args.k });
    let report: EvaluationReport = evaluate(&model, &tests, baseline).map_err(|e| CliError::lib("evaluate", e))?;
    if let Some(path) = &args.report {
        write_atomic(path, report.to_csv().as_bytes())?;
    }
    io::stdout()
        .write_all(report.render_table().as_bytes())
        .map_err(|e| CliError::io("stdout", e))
}

fn run(cli: &Cli) -> CliResult<()> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Gen(a) => cmd_gen(a, &cfg),
        Command::Extract(a) => cmd_extract(a, &cfg),
        Command::Train(a) => cmd_train(a, &cfg),
        Command::Classify(a) => cmd_classify(a, &cfg),
        Command::Evaluate(a) => cmd_evaluate(a, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("symrec: {e}");
            ExitCode::from(e.code())
        }
    }
}
