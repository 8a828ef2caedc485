//! Command-line front end: argument parsing and command dispatch.
//!
//! [`run`] takes the arguments and output streams explicitly so the binary and
//! the tests share one code path.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use catutil::format::json_number;
use catutil::{
    best_split_exhaustive, closed_form_score, greedy_agglomerate, hierarchy_from_merges,
    hierarchy_to_json, level_report, ordering, parse_category, parse_dataset, parse_hierarchy,
    predict_basic_level, simulate, ClusterOptions, Dataset, FeatureRule, GameCondition, Hierarchy,
    MeasureId, MeasureOptions, MeasureReport, Strategy,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

/// Exit status for a usage error (bad or missing flags).
pub const EXIT_USAGE: i32 = 2;
/// Exit status for invalid input files or option values.
pub const EXIT_INVALID: i32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "catutil",
    version,
    about = "Category Utility, rival category measures and basic-level prediction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print every measure averaged per hierarchy level.
    Analyze(AnalyzeArgs),
    /// Predict the preferred level and rank levels under every measure.
    BasicLevel(BasicLevelArgs),
    /// Play the guessing game and compare with the expected score.
    Simulate(SimulateArgs),
    /// Search for a categorization that maximizes Category Utility.
    Cluster(ClusterArgs),
}

#[derive(Debug, Args)]
struct MeasureFlags {
    /// Logarithm base for the entropy measures.
    #[arg(long, default_value_t = 2.0, value_parser = parse_log_base)]
    log_base: f64,
    /// How the features of a category are chosen for the rival measures.
    #[arg(long, value_enum, default_value_t = RuleArg::Modal)]
    feature_rule: RuleArg,
}

impl MeasureFlags {
    fn options(&self) -> MeasureOptions {
        MeasureOptions::default()
            .with_log_base(self.log_base)
            .with_feature_rule(self.feature_rule.into())
    }
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Dataset CSV file.
    #[arg(long)]
    data: PathBuf,
    /// Hierarchy JSON file.
    #[arg(long)]
    hierarchy: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    #[command(flatten)]
    measure: MeasureFlags,
}

#[derive(Debug, Args)]
struct BasicLevelArgs {
    /// Dataset CSV file.
    #[arg(long)]
    data: PathBuf,
    /// Hierarchy JSON file.
    #[arg(long)]
    hierarchy: PathBuf,
    /// Measure used for the prediction.
    #[arg(long, default_value = "cu-info-partition", value_parser = parse_measure)]
    measure: MeasureId,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    #[command(flatten)]
    flags: MeasureFlags,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Dataset CSV file.
    #[arg(long)]
    data: PathBuf,
    /// Category JSON file `{"name":..,"members":[ids]}`; required unless the
    /// condition is `none`.
    #[arg(long)]
    category_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ConditionArg::Partition)]
    condition: ConditionArg,
    #[arg(long, value_enum, default_value_t = StrategyArg::Matching)]
    strategy: StrategyArg,
    /// Number of simulated trials.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Seed for the trial streams; equal seeds give identical output.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct ClusterArgs {
    /// Dataset CSV file.
    #[arg(long)]
    data: PathBuf,
    /// `exhaustive` tries every two-block split (up to 20 instances);
    /// `greedy` merges blocks bottom-up.
    #[arg(long, value_enum, default_value_t = Method::Greedy)]
    method: Method,
    /// Number of blocks; the exhaustive method only splits in two.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    /// Where to write the hierarchy file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RuleArg {
    Modal,
    AllWeighted,
}

impl From<RuleArg> for FeatureRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Modal => FeatureRule::Modal,
            RuleArg::AllWeighted => FeatureRule::AllWeighted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConditionArg {
    None,
    Partition,
    CategoryOnly,
}

impl From<ConditionArg> for GameCondition {
    fn from(c: ConditionArg) -> Self {
        match c {
            ConditionArg::None => GameCondition::None,
            ConditionArg::Partition => GameCondition::Partition,
            ConditionArg::CategoryOnly => GameCondition::CategoryOnly,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Matching,
    Modal,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Matching => Strategy::Matching,
            StrategyArg::Modal => Strategy::Modal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Exhaustive,
    Greedy,
}

fn parse_log_base(s: &str) -> Result<f64, String> {
    let b: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if b.is_finite() && b > 1.0 {
        Ok(b)
    } else {
        Err(format!("log base must be greater than 1, got {s}"))
    }
}

fn parse_measure(s: &str) -> Result<MeasureId, String> {
    s.parse::<MeasureId>().map_err(|_| {
        let names: Vec<&str> = MeasureId::ALL.iter().map(|m| m.as_str()).collect();
        format!("unknown measure `{s}`; expected one of {}", names.join(", "))
    })
}

/// A failure that maps to exit status 1.
struct Failure(String);

type Outcome = std::result::Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: catutil::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_dataset(path: &Path) -> Result<Dataset, Failure> {
    in_file(path, parse_dataset(&read(path)?))
}

fn load_hierarchy(path: &Path, d: &Dataset) -> Result<Hierarchy, Failure> {
    in_file(path, parse_hierarchy(&read(path)?, d))
}

/// Runs the command line `args` (including the program name), writing
/// results to `out` and diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => analyze(a, out),
        Command::BasicLevel(a) => basic_level(a, out),
        Command::Simulate(a) => run_simulation(a, out),
        Command::Cluster(a) => cluster(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INVALID
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Outcome {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure(format!("cannot write output: {e}")))
}

fn json_line(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("JSON value serializes") + "\n"
}

fn report_for(
    data: &Path,
    hierarchy: &Path,
    opts: &MeasureOptions,
) -> Result<MeasureReport, Failure> {
    let d = load_dataset(data)?;
    let h = load_hierarchy(hierarchy, &d)?;
    level_report(&d, &h, opts).map_err(|e| Failure(e.to_string()))
}

fn analyze(a: AnalyzeArgs, out: &mut dyn Write) -> Outcome {
    let report = report_for(&a.data, &a.hierarchy, &a.measure.options())?;
    let text = match a.format {
        Format::Tsv => report.to_tsv(),
        Format::Json => json_line(&report.to_json()),
    };
    emit(out, &text)
}

fn groups_text(groups: &[Vec<usize>]) -> String {
    groups
        .iter()
        .map(|g| g.iter().map(usize::to_string).collect::<Vec<_>>().join(" = "))
        .collect::<Vec<_>>()
        .join(" > ")
}

fn basic_level(a: BasicLevelArgs, out: &mut dyn Write) -> Outcome {
    let report = report_for(&a.data, &a.hierarchy, &a.flags.options())?;
    let p = predict_basic_level(&report, a.measure);
    let level_name = p.winner.map(|w| report.rows[w - 1].name.clone());
    let tie_break = p.tie_break.map(|m| m.as_str());
    let text = match a.format {
        Format::Tsv => {
            let mut s = report.header_comment();
            s.push('\n');
            s.push_str(&format!("measure\t{}\n", p.measure));
            s.push_str(&format!(
                "predicted-level\t{}\n",
                p.winner.map_or("none".to_string(), |w| w.to_string())
            ));
            s.push_str(&format!("level-name\t{}\n", level_name.as_deref().unwrap_or("none")));
            let tied: Vec<String> = p.tied.iter().map(usize::to_string).collect();
            s.push_str(&format!("tied-levels\t{}\n", tied.join(",")));
            s.push_str(&format!("tie-break\t{}\n", tie_break.unwrap_or("none")));
            s.push_str("\nmeasure\tordering\n");
            for m in MeasureId::ALL {
                s.push_str(&format!("{m}\t{}\n", groups_text(&ordering(&report, m))));
            }
            s
        }
        Format::Json => {
            let orderings: serde_json::Map<String, serde_json::Value> = MeasureId::ALL
                .iter()
                .map(|m| (m.as_str().to_string(), json!(ordering(&report, *m))))
                .collect();
            json_line(&json!({
                "measure": p.measure.as_str(),
                "predicted_level": p.winner,
                "level_name": level_name,
                "tied_levels": p.tied,
                "tie_break": tie_break,
                "orderings": orderings,
                "report": report.to_json(),
            }))
        }
    };
    emit(out, &text)
}

fn run_simulation(a: SimulateArgs, out: &mut dyn Write) -> Outcome {
    let cond: GameCondition = a.condition.into();
    let strat: Strategy = a.strategy.into();
    if cond != GameCondition::None && a.category_file.is_none() {
        return Err(Failure(format!(
            "--condition {cond} needs --category-file"
        )));
    }
    let d = load_dataset(&a.data)?;
    let c = match &a.category_file {
        Some(path) => Some(in_file(path, parse_category(&read(path)?, &d))?),
        None => None,
    };
    let fail = |e: catutil::Error| Failure(e.to_string());
    let exact = closed_form_score(&d, c.as_ref(), cond, strat).map_err(fail)?;
    let est = simulate(&d, c.as_ref(), cond, strat, a.trials, a.seed).map_err(fail)?;
    let text = match a.format {
        Format::Json => json_line(&json!({
            "condition": cond.as_str(),
            "strategy": strat.as_str(),
            "category": c.as_ref().map(|c| c.name()),
            "estimate": {
                "mean": json_number(est.mean),
                "stderr": json_number(est.stderr),
                "trials": est.trials,
                "seed": est.seed,
            },
            "closed_form": json_number(exact.value),
        })),
        Format::Tsv => {
            let f = catutil::format::format_report;
            format!(
                "condition\tstrategy\tmean\tstderr\ttrials\tseed\tclosed-form\n{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                cond,
                strat,
                f(est.mean),
                f(est.stderr),
                est.trials,
                est.seed,
                f(exact.value)
            )
        }
    };
    emit(out, &text)
}

fn cluster(a: ClusterArgs, out: &mut dyn Write) -> Outcome {
    let d = load_dataset(&a.data)?;
    let opts = ClusterOptions::default();
    let fail = |e: catutil::Error| Failure(e.to_string());
    let k = usize::try_from(a.k).map_err(|_| Failure(format!("--k {} is too large", a.k)))?;
    let (hierarchy, objective) = match a.method {
        Method::Exhaustive => {
            if k != 2 {
                return Err(Failure(format!(
                    "the exhaustive method finds two-block splits only, got --k {k}"
                )));
            }
            let p = best_split_exhaustive(&d, &opts).map_err(fail)?;
            (p.hierarchy(&d).map_err(fail)?, p.objective)
        }
        Method::Greedy => {
            let p = greedy_agglomerate(&d, k, &opts).map_err(fail)?;
            let trace = p.trace.as_ref().expect("greedy records merges");
            (hierarchy_from_merges(&d, trace, &[]).map_err(fail)?, p.objective)
        }
    };
    let text = hierarchy_to_json(&d, &hierarchy);
    match &a.output {
        Some(path) => {
            fs::write(path, &text)
                .map_err(|e| Failure(format!("cannot write {}: {e}", path.display())))?;
            emit(
                out,
                &format!(
                    "wrote {} levels to {}; objective {}\n",
                    hierarchy.len(),
                    path.display(),
                    catutil::format::format_report(objective)
                ),
            )
        }
        None => emit(out, &text),
    }
}
