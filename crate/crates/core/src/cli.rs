//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::benchlib::{get_problem, problem_ids};
use crate::error::{Error, Result};
use crate::harness::dataset::{
    bounding_domain, ingest_dataset, read_dataset, read_queries, write_dataset, write_dataset_to,
};
use crate::harness::{run_benchmark, ExternalData, RunSpec};
use crate::hierarchical::{HkModel, HkModelFile};
use crate::kriging::{Fidelity, KrigingModel, KrigingModelFile, SampleSet};
use crate::mic::mic_screen;
use crate::sampling::{lhs, Domain};
use crate::tuning::{tune, Strategy, TuningConfig};

#[derive(Parser, Debug)]
#[command(name = "hierkrig", version, about = "Hierarchical Kriging for bi-fidelity data")]
struct Cli {
    /// Print tuning stage logs to stderr as JSON lines.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Repeated paired fits on a benchmark problem or external data.
    Bench(BenchArgs),
    /// Tune and fit an HK model from LF and HF dataset files.
    Fit(FitArgs),
    /// Evaluate a saved model at query points.
    Predict(PredictArgs),
    /// MIC importance of each input for a dataset.
    Mic(MicArgs),
    /// List the built-in benchmark problems.
    ListProblems,
    /// Draw an LHS design on a problem and write it as a dataset.
    Sample(SampleArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Conventional,
    Hd,
    Both,
}

impl StrategyArg {
    fn strategies(self) -> Vec<Strategy> {
        match self {
            StrategyArg::Conventional => vec![Strategy::Conventional],
            StrategyArg::Hd => vec![Strategy::Hd],
            StrategyArg::Both => vec![Strategy::Conventional, Strategy::Hd],
        }
    }
}

#[derive(Args, Debug)]
struct BoundsArgs {
    /// Lower domain bounds, comma separated (default: data bounding box).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lower: Option<Vec<f64>>,
    /// Upper domain bounds, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    upper: Option<Vec<f64>>,
}

impl BoundsArgs {
    fn domain(&self) -> Result<Option<Domain>> {
        match (&self.lower, &self.upper) {
            (Some(lo), Some(hi)) => Ok(Some(Domain::new(lo.clone(), hi.clone())?)),
            (None, None) => Ok(None),
            _ => Err(Error::Input("give both --lower and --upper or neither".into())),
        }
    }
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Problem id (see `list-problems`).
    #[arg(long)]
    problem: Option<String>,
    /// JSON file with RunSpec fields; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// External LF dataset (with --hf and --validation instead of --problem).
    #[arg(long)]
    lf: Option<PathBuf>,
    #[arg(long)]
    hf: Option<PathBuf>,
    /// External HF validation dataset.
    #[arg(long)]
    validation: Option<PathBuf>,
    #[command(flatten)]
    bounds: BoundsArgs,
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n_lf: Option<usize>,
    #[arg(long)]
    n_hf: Option<usize>,
    /// LF sample multipliers of d for a size sweep, e.g. `8,10,12`.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    validation_count: Option<usize>,
    /// Run repeats in parallel (fit times are then not comparable).
    #[arg(long)]
    parallel: bool,
    /// Write zero fit times so reports are byte-identical between runs.
    #[arg(long)]
    no_timing: bool,
    /// Output directory for report.csv, aggregates.csv and report.json.
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(long)]
    lf: PathBuf,
    #[arg(long)]
    hf: PathBuf,
    #[command(flatten)]
    bounds: BoundsArgs,
    #[arg(long, value_enum, default_value = "hd")]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the model JSON.
    #[arg(long, default_value = "model.json")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PredictArgs {
    /// Kriging or HK model JSON.
    #[arg(long)]
    model: PathBuf,
    /// CSV with header x1..xd (a trailing y column is ignored).
    #[arg(long)]
    queries: PathBuf,
    /// Predictions CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MicArgs {
    /// Dataset CSV with header x1..xd,y.
    #[arg(long)]
    data: PathBuf,
    /// Report the unfloored MIC values.
    #[arg(long)]
    raw: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FidelityArg {
    Lf,
    Hf,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    problem: String,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "hf")]
    fidelity: FidelityArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

/// Parses `argv` (program name first) and runs the command.
///
/// Returns 0 on success, 2 for usage errors and 1 for anything else.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let verbose = cli.verbose;
    match cli.command {
        Command::Bench(a) => bench(a, verbose),
        Command::Fit(a) => fit(a, verbose),
        Command::Predict(a) => predict(a),
        Command::Mic(a) => mic(a),
        Command::ListProblems => list_problems(),
        Command::Sample(a) => sample(a),
    }
}

fn bench(a: BenchArgs, verbose: bool) -> Result<()> {
    let mut spec: RunSpec = match &a.config {
        Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
        None => RunSpec::default(),
    };
    if let Some(p) = a.problem {
        spec.problem = Some(p);
        spec.external = None;
    }
    match (a.lf, a.hf, a.validation) {
        (Some(lf_csv), Some(hf_csv), Some(validation_csv)) => {
            spec.problem = None;
            spec.external = Some(ExternalData {
                lf_csv,
                hf_csv,
                validation_csv,
                lower: a.bounds.lower,
                upper: a.bounds.upper,
                label: "external".into(),
            });
        }
        (None, None, None) => {}
        _ => {
            return Err(Error::Input(
                "external data needs all of --lf, --hf and --validation".into(),
            ))
        }
    }
    if let Some(s) = a.strategy {
        spec.strategies = s.strategies();
    }
    if let Some(r) = a.repeats {
        spec.repeats = r;
    }
    if let Some(s) = a.seed {
        spec.seed = s;
    }
    if a.n_lf.is_some() {
        spec.n_lf = a.n_lf;
    }
    if a.n_hf.is_some() {
        spec.n_hf = a.n_hf;
    }
    if a.sizes.is_some() {
        spec.sizes = a.sizes;
    }
    if a.validation_count.is_some() {
        spec.validation_count = a.validation_count;
    }
    spec.parallel |= a.parallel;
    if a.no_timing {
        spec.timing = false;
    }
    let report = run_benchmark(&spec)?;
    report.write_to(&a.out)?;
    if verbose {
        let mut err = std::io::stderr().lock();
        for row in &report.rows {
            for trace in row.lf_trace.iter().chain(&row.hf_trace) {
                for line in trace.json_lines() {
                    writeln!(err, "{line}")?;
                }
            }
            if let Some(e) = &row.error {
                writeln!(err, "{} {} repeat {}: {e}", row.problem, row.strategy.label(), row.repeat)?;
            }
        }
    }
    print!("{}", report.summary_table());
    println!("wrote {}", a.out.display());
    Ok(())
}

fn fit(a: FitArgs, verbose: bool) -> Result<()> {
    let strategy = match a.strategy {
        StrategyArg::Conventional => Strategy::Conventional,
        StrategyArg::Hd => Strategy::Hd,
        StrategyArg::Both => {
            return Err(Error::Input("fit takes a single strategy".into()));
        }
    };
    let domain = a.bounds.domain()?;
    let ing = ingest_dataset(&a.lf, &a.hf, domain.as_ref())?;
    if ing.dropped_lf + ing.dropped_hf > 0 {
        eprintln!(
            "dropped {} LF and {} HF rows with missing or non-finite values",
            ing.dropped_lf, ing.dropped_hf
        );
    }
    let cfg = TuningConfig::with_strategy(strategy, a.seed);
    let tuned = tune(&ing.lf, &ing.hf, &cfg)?;
    if verbose {
        let mut err = std::io::stderr().lock();
        for line in tuned.lf_trace.json_lines().into_iter().chain(tuned.hf_trace.json_lines()) {
            writeln!(err, "{line}")?;
        }
    }
    fs::write(&a.out, tuned.model.to_json()?)?;
    println!(
        "beta_star={} evals_lf={} evals_hf={} wrote {}",
        tuned.model.beta_star(),
        tuned.lf_trace.evaluations_used,
        tuned.hf_trace.evaluations_used,
        a.out.display()
    );
    Ok(())
}

enum AnyModel {
    Kriging(KrigingModel),
    Hierarchical(Box<HkModel>),
}

impl AnyModel {
    fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        match value.get("kind").and_then(|k| k.as_str()) {
            Some(HkModelFile::KIND) => Ok(AnyModel::Hierarchical(Box::new(HkModel::from_json(&text)?))),
            Some(KrigingModelFile::KIND) => Ok(AnyModel::Kriging(KrigingModel::from_json(&text)?)),
            other => Err(Error::Input(format!("unrecognized model kind {other:?}"))),
        }
    }

    fn predict_physical(&self, x: &[f64]) -> Result<f64> {
        match self {
            AnyModel::Kriging(m) => m.predict_physical(x),
            AnyModel::Hierarchical(m) => m.predict_physical(x),
        }
    }
}

fn predict(a: PredictArgs) -> Result<()> {
    let model = AnyModel::load(&a.model)?;
    let queries = read_queries(&a.queries)?;
    let preds = queries
        .iter()
        .map(|q| model.predict_physical(q))
        .collect::<Result<Vec<_>>>()?;
    match &a.out {
        Some(path) => write_dataset(path, &queries, &preds),
        None => write_dataset_to(std::io::stdout().lock(), &queries, &preds),
    }
}

fn mic(a: MicArgs) -> Result<()> {
    let data = read_dataset(&a.data)?;
    let domain = bounding_domain(&data.points)?;
    let samples = SampleSet::from_physical(&domain, &data.points, &data.responses, Fidelity::Low)?;
    let res = mic_screen(&samples)?;
    let values = if a.raw { &res.raw } else { &res.omega };
    let mut text = String::from("variable_index,mic\n");
    for (i, v) in values.iter().enumerate() {
        text.push_str(&format!("{},{}\n", i + 1, v));
    }
    emit(a.out.as_deref(), &text)
}

fn list_problems() -> Result<()> {
    let mut text = String::from("id,d,lower,upper\n");
    for id in problem_ids() {
        let p = get_problem(id)?;
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(";");
        text.push_str(&format!(
            "{},{},{},{}\n",
            p.id,
            p.d,
            join(p.domain.lower()),
            join(p.domain.upper())
        ));
    }
    emit(None, &text)
}

fn sample(a: SampleArgs) -> Result<()> {
    let problem = get_problem(&a.problem)?;
    let design = lhs(a.n, &problem.domain, a.seed)?;
    let y: Vec<f64> = design
        .points
        .iter()
        .map(|x| match a.fidelity {
            FidelityArg::Lf => problem.lf(x),
            FidelityArg::Hf => problem.hf(x),
        })
        .collect();
    write_dataset(&a.out, &design.points, &y)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
