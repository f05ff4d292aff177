//! The `cfdp` command line. Every subcommand writes data to stdout or to the
//! files it is given and diagnostics to stderr; JSON records embed the
//! resolved run configuration, including the seed actually used.
//!
//! Exit codes: 0 on success, 1 for usage and input errors, 2 for I/O and
//! other internal failures.

use std::ffi::OsString;
use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::causal_models::{
    counterfactual_posterior, gp_observational_equivalence_check, sample_cross_world, write_draws_csv,
    BinaryTreatmentGaussianModel, GpTreatmentModel,
};
use crate::error::{Error, Result};
use crate::experiments::{load_csv, rank_experiment, save_csv, synth_lawschool, write_rank_outputs, SYNTH_DEFAULT_NOISE_SD};
use crate::fairness::{
    adversary_rho, cf_gap_aggregate, cf_gap_monte_carlo, cf_gap_with, dp_gap_with, strong_assumption_implication_check,
    DistanceKind, GapEvaluation,
};
use crate::graphs::Admg;
use crate::predictors::Predictor;
use crate::repair::{fit_repair, read_scores_csv, write_repaired_csv, RepairMode};

pub const DEFAULT_SEED: u64 = 20240917;

#[derive(Debug, Parser)]
#[command(
    name = "cfdp",
    about = "Demographic parity versus counterfactual fairness in cross-world causal models",
    arg_required_else_help = true,
    allow_negative_numbers = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Test d-separation in an ADMG file (`A -> X`, `A <-> U` lines).
    #[command(allow_negative_numbers = true)]
    Dsep(DsepArgs),
    /// Draw (A, X0, X1, X) from the bivariate-Gaussian model as CSV.
    #[command(allow_negative_numbers = true)]
    Sample(SampleArgs),
    /// Counterfactual posterior of the other arm given (A = a, X = x).
    #[command(allow_negative_numbers = true)]
    Posterior(PosteriorArgs),
    /// Demographic-parity gap of a predictor.
    #[command(allow_negative_numbers = true)]
    DpGap(DpGapArgs),
    /// Counterfactual-fairness gap of a predictor at (x, a).
    #[command(allow_negative_numbers = true)]
    CfGap(CfGapArgs),
    /// Sweep the cross-world correlation and report the worst world.
    #[command(allow_negative_numbers = true)]
    Adversary(AdversaryArgs),
    /// X = A + eps world against its GP-error twin.
    #[command(allow_negative_numbers = true)]
    StrongAssumption(SeedN),
    /// Observational equivalence of shared-error and GP-error models.
    #[command(allow_negative_numbers = true)]
    GpDemo(GpDemoArgs),
    /// Quantile repair of `a,y_bar` scores.
    #[command(allow_negative_numbers = true)]
    Repair(RepairArgs),
    /// Law-school rank experiment (synthetic data unless --data is given).
    #[command(allow_negative_numbers = true)]
    RankExperiment(RankArgs),
    /// Write a synthetic law-school CSV.
    #[command(allow_negative_numbers = true)]
    SynthData(SynthArgs),
}

#[derive(Debug, Args, Serialize)]
struct DsepArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    src: String,
    #[arg(long)]
    dst: String,
    /// Comma-separated conditioning set.
    #[arg(long, value_delimiter = ',')]
    given: Vec<String>,
    /// Emit a JSON record instead of `true`/`false`.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
struct ModelArgs {
    #[arg(long, default_value_t = 0.0)]
    mu0: f64,
    #[arg(long, default_value_t = 0.0)]
    mu1: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma0: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma1: f64,
    #[arg(long, default_value_t = 0.0)]
    rho: f64,
    #[arg(long, default_value_t = 0.5)]
    p1: f64,
}

impl ModelArgs {
    fn model(&self) -> Result<BinaryTreatmentGaussianModel> {
        BinaryTreatmentGaussianModel::new(self.mu0, self.mu1, self.sigma0, self.sigma1, self.rho, self.p1)
    }
}

#[derive(Debug, Args, Serialize)]
struct SeedN {
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Debug, Args, Serialize)]
struct SampleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    run: SeedN,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct PosteriorArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    #[arg(long)]
    x: f64,
    #[arg(long)]
    a: u8,
}

#[derive(Debug, Args, Serialize)]
struct PredictorArgs {
    /// `predictor=<kind> key=value ...`, or just the kind: standardized,
    /// identity, linear_ax, po_linear, rosenblatt, coin_flip.
    #[arg(long, default_value = "predictor=standardized")]
    predictor: String,
    /// Distance between score laws: ks or w1.
    #[arg(long, default_value = "ks")]
    metric: String,
}

impl PredictorArgs {
    fn predictor(&self, model: &BinaryTreatmentGaussianModel) -> Result<Predictor> {
        let text = self.predictor.trim();
        let first = text.split(|c: char| c.is_whitespace() || c == ',').next().unwrap_or("");
        if first.contains('=') {
            Predictor::from_kv_str(text, model)
        } else {
            Predictor::from_kv_str(&format!("predictor={text}"), model)
        }
    }

    fn metric(&self) -> Result<DistanceKind> {
        self.metric.parse()
    }
}

#[derive(Debug, Args, Serialize)]
struct DpGapArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    predictor: PredictorArgs,
    #[command(flatten)]
    #[serde(flatten)]
    run: SeedN,
}

#[derive(Debug, Args, Serialize)]
struct CfGapArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    predictor: PredictorArgs,
    #[arg(long)]
    x: f64,
    #[arg(long)]
    a: u8,
    /// closed-form or monte-carlo.
    #[arg(long, default_value = "closed-form")]
    method: String,
    /// Monte-Carlo draws, or factual draws for the aggregate gap.
    #[arg(long, default_value_t = 1_000_000)]
    n: usize,
    #[arg(long, default_value_t = 0.01)]
    window: f64,
    /// Conditioning points averaged in the aggregate closed-form gap.
    #[arg(long, default_value_t = 200)]
    probe_points: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Debug, Args, Serialize)]
struct AdversaryArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    predictor: PredictorArgs,
    #[arg(long)]
    x: f64,
    #[arg(long)]
    a: u8,
    /// `start:stop:step`, or a comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    #[arg(long, default_value = "closed-form")]
    method: String,
    #[arg(long, default_value_t = 1_000_000)]
    n: usize,
    #[arg(long, default_value_t = 0.01)]
    window: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Also write the (rho, gap) profile as CSV.
    #[arg(long)]
    profile_csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct GpDemoArgs {
    #[arg(long, default_value_t = 1.0)]
    variance: f64,
    #[arg(long, default_value_t = 1.0)]
    length_scale: f64,
    /// Comma-separated treatment levels.
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    levels: String,
    #[command(flatten)]
    #[serde(flatten)]
    run: SeedN,
}

#[derive(Debug, Args, Serialize)]
struct RepairArgs {
    /// empirical or gaussian.
    #[arg(long, default_value = "empirical")]
    mode: String,
    /// Training CSV with header `a,y_bar`.
    #[arg(long)]
    train: PathBuf,
    /// Scores to repair; the training file when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output CSV `a,y_bar,y_hat`; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct RankArgs {
    /// CSV with race, sex, LSAT, UGPA, ZFYA columns.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, default_value = "race=Black")]
    subgroup: String,
    #[arg(long, default_value_t = 40)]
    n_test: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
    /// Rows of the synthetic dataset used when --data is absent.
    #[arg(long, default_value_t = 20_000)]
    synth_n: usize,
}

#[derive(Debug, Args, Serialize)]
struct SynthArgs {
    #[command(flatten)]
    #[serde(flatten)]
    run: SeedN,
    #[arg(long, default_value_t = SYNTH_DEFAULT_NOISE_SD)]
    noise_sd: f64,
    #[arg(long)]
    out: PathBuf,
}

/// Resolved configuration echoed in every JSON record.
#[derive(Debug, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub params: Value,
}

fn run_config(command: &Command) -> Result<RunConfig> {
    let tagged = serde_json::to_value(command)?;
    let (name, params) = match tagged {
        Value::Object(map) => map.into_iter().next().unwrap_or((String::new(), Value::Null)),
        other => (other.to_string(), Value::Null),
    };
    Ok(RunConfig { subcommand: name, params })
}

/// Parse `start:stop:step` (inclusive of `stop` up to rounding) or `a,b,c`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let num = |s: &str| -> Result<f64> {
        s.trim().parse::<f64>().map_err(|_| Error::input(format!("bad grid value `{s}`")))
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if !(step > 0.0) || stop < start {
                return Err(Error::input("grid needs step > 0 and stop >= start"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            // 12 decimals absorb the accumulated float error of start + k*step
            Ok((0..count).map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12).collect())
        }
        [_] => text.split(',').filter(|s| !s.trim().is_empty()).map(num).collect(),
        _ => Err(Error::input(format!("grid `{text}` is neither start:stop:step nor a list"))),
    }
}

fn evaluation(method: &str, n: usize, seed: u64, window: f64) -> Result<GapEvaluation> {
    match method {
        "closed-form" | "closed_form" => Ok(GapEvaluation::ClosedForm),
        "monte-carlo" | "monte_carlo" => Ok(GapEvaluation::MonteCarlo { n, seed, window }),
        other => Err(Error::input(format!("unknown method `{other}`"))),
    }
}

fn emit(out: &mut dyn Write, value: &Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn sink(path: &Option<PathBuf>, stdout: &mut dyn Write, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => f(&mut File::create(p).map_err(Error::at_path(p))?),
        None => f(stdout),
    }
}

fn execute(command: &Command, out: &mut dyn Write) -> Result<()> {
    let config = run_config(command)?;
    match command {
        Command::Dsep(args) => {
            let g = Admg::from_file(&args.graph)?;
            let given: Vec<&str> = args.given.iter().map(String::as_str).collect();
            let sep = g.d_separated(&args.src, &args.dst, &given)?;
            if args.json {
                emit(out, &json!({ "metric": "d_separated", "value": sep, "config": config }))?;
            } else {
                writeln!(out, "{sep}")?;
            }
        }
        Command::Sample(args) => {
            let draws = sample_cross_world(&args.model.model()?, args.run.n, args.run.seed)?;
            sink(&args.out, out, |w| write_draws_csv(&draws, w))?;
        }
        Command::Posterior(args) => {
            let post = counterfactual_posterior(&args.model.model()?, args.a, args.x)?;
            emit(
                out,
                &json!({
                    "metric": "counterfactual_posterior",
                    "mean": post.mean,
                    "variance": post.variance,
                    "degenerate": post.is_degenerate(),
                    "conditioning_point": { "x": args.x, "a": args.a },
                    "config": config,
                }),
            )?;
        }
        Command::DpGap(args) => {
            let model = args.model.model()?;
            let p = args.predictor.predictor(&model)?;
            let d = dp_gap_with(&p, &model, args.run.n, args.run.seed, args.predictor.metric()?)?;
            emit(
                out,
                &json!({
                    "metric": "dp_gap",
                    "distance": d.kind,
                    "value": d.value,
                    "method": "monte_carlo",
                    "n_samples": args.run.n,
                    "seed": args.run.seed,
                    "config": config,
                }),
            )?;
        }
        Command::CfGap(args) => {
            let model = args.model.model()?;
            let p = args.predictor.predictor(&model)?;
            let kind = args.predictor.metric()?;
            let mut record = json!({
                "metric": "cf_gap",
                "distance": kind,
                "conditioning_point": { "x": args.x, "a": args.a },
                "seed": args.seed,
            });
            match evaluation(&args.method, args.n, args.seed, args.window)? {
                GapEvaluation::ClosedForm => {
                    record["value"] = json!(cf_gap_with(&p, &model, args.x, args.a, kind)?.value);
                    record["method"] = json!("closed_form");
                    record["aggregate_value"] = json!(cf_gap_aggregate(&p, &model, args.probe_points, args.seed, kind)?.value);
                    record["n_samples"] = json!(args.probe_points);
                }
                GapEvaluation::MonteCarlo { n, seed, window } => {
                    let mc = cf_gap_monte_carlo(&p, &model, args.x, args.a, n, seed, window, kind)?;
                    record["value"] = json!(mc.distance.value);
                    record["method"] = json!("monte_carlo");
                    record["n_samples"] = json!(n);
                    record["n_accepted"] = json!(mc.n_accepted);
                    record["window"] = json!(window);
                }
            }
            record["config"] = serde_json::to_value(&config)?;
            emit(out, &record)?;
        }
        Command::Adversary(args) => {
            let model = args.model.model()?;
            let p = args.predictor.predictor(&model)?;
            let kind = args.predictor.metric()?;
            let grid = parse_grid(&args.grid)?;
            let eval = evaluation(&args.method, args.n, args.seed, args.window)?;
            let r = adversary_rho(&p, &model, args.x, args.a, &grid, kind, eval)?;
            if let Some(path) = &args.profile_csv {
                let mut w = csv::Writer::from_path(path)?;
                w.write_record(["rho", "gap"])?;
                for g in &r.profile {
                    w.write_record([g.rho.to_string(), g.gap.to_string()])?;
                }
                w.flush()?;
            }
            emit(
                out,
                &json!({
                    "metric": "cf_gap",
                    "distance": kind,
                    "method": if eval == GapEvaluation::ClosedForm { "closed_form" } else { "monte_carlo" },
                    "rho_star": r.rho_star,
                    "value": r.gap_star,
                    "rho_profile": r.profile,
                    "conditioning_point": { "x": args.x, "a": args.a },
                    "n_samples": args.n,
                    "seed": args.seed,
                    "config": config,
                }),
            )?;
        }
        Command::StrongAssumption(args) => {
            let report = strong_assumption_implication_check(args.n, args.seed)?;
            emit(out, &json!({ "metric": "strong_assumption", "report": report, "config": config }))?;
        }
        Command::GpDemo(args) => {
            let levels = parse_grid(&args.levels)?;
            let gp = GpTreatmentModel::new(args.variance, args.length_scale, levels)?;
            let report = gp_observational_equivalence_check(&gp, args.run.n, args.run.seed)?;
            emit(
                out,
                &json!({ "metric": "gp_equivalence", "max_ks": report.max_ks(), "report": report, "config": config }),
            )?;
        }
        Command::Repair(args) => {
            let mode: RepairMode = args.mode.parse()?;
            let train = read_scores_csv(File::open(&args.train).map_err(Error::at_path(&args.train))?)?;
            let model = fit_repair(&train, mode)?;
            let rows = match &args.input {
                Some(p) => read_scores_csv(File::open(p).map_err(Error::at_path(p))?)?,
                None => train,
            };
            let repaired = model.repair_batch(&rows)?;
            sink(&args.out, out, |w| write_repaired_csv(&rows, &repaired, w))?;
        }
        Command::RankExperiment(args) => {
            let (column, value) = args
                .subgroup
                .split_once('=')
                .ok_or_else(|| Error::input("--subgroup must look like column=value"))?;
            let (data, source) = match &args.data {
                Some(p) => (load_csv(p)?, p.display().to_string()),
                None => (synth_lawschool(args.synth_n, args.seed, SYNTH_DEFAULT_NOISE_SD)?, "synthetic".to_string()),
            };
            let result = rank_experiment(&data, (column, value), args.n_test, args.seed)?;
            write_rank_outputs(&result, &args.out_dir)?;
            emit(
                out,
                &json!({
                    "metric": "spearman",
                    "data": source,
                    "n_rows": result.n_rows,
                    "r_squared": result.r_squared,
                    "spearman": result.spearman,
                    "seed": args.seed,
                    "outputs": ["ranks.csv", "spearman.json", "rankplot.svg"],
                    "config": config,
                }),
            )?;
        }
        Command::SynthData(args) => {
            let data = synth_lawschool(args.run.n, args.run.seed, args.noise_sd)?;
            save_csv(&data, &args.out)?;
            emit(out, &json!({ "rows": data.len(), "out": args.out, "config": config }))?;
        }
    }
    Ok(())
}

/// Parse `argv` (program name first) and run, writing to the given streams.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    1
                }
            };
        }
    };
    match execute(&cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
