//! Command implementations behind the `qlrev` binary.
//!
//! Every command returns the text it prints and, when `--out` is given,
//! writes a report in the requested format. Numbers are printed with four
//! decimals.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use qlrev::io::{
    load_choices, load_experiment, write_choices, write_menus, write_report, FlagRecord, IndexRecord, Report,
    ReportFormat, ReportMeta, SubjectReport, TestRecord,
};
use qlrev::mc::{
    calibrate, empirical_choice_distribution, pass_rate_table, passes, subject_indices, CalibrationConfig, CiMethod,
    PassRateCell, TestRow,
};
use qlrev::sim::{paper_like_design, simulate_population, AgentKind, SimulatedSubject};
use qlrev::{check, index_value, Error, Experiment, IndexKind, SubjectChoices, Theory};
use serde::Serialize;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Parser)]
#[command(name = "qlrev", version, about = "Revealed-preference tests for choices from nonlinear wage menus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact consistency tests per subject, with violating cycles.
    Test(TestArgs),
    /// Houtman-Maks or efficiency indices per subject.
    Index(IndexArgs),
    /// Random-subject cutoffs and pass rates with confidence intervals.
    Calibrate(CalibrateArgs),
    /// Descriptive statistics of choices, and dispersion by HMI.
    Describe(DescribeArgs),
    /// Synthetic menus and choices with a ground-truth manifest.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub input_menus: PathBuf,
    #[arg(long)]
    pub input_choices: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Report path; nothing is written without it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    pub format: ReportFormat,
}

#[derive(Debug, Clone, Args)]
pub struct TheoryArgs {
    /// Theories to evaluate (LNU, QLU, C-LNU, C-QLU); all when omitted.
    #[arg(long = "theory", value_delimiter = ',')]
    pub theories: Vec<Theory>,
}

impl TheoryArgs {
    fn resolve(&self) -> Vec<Theory> {
        if self.theories.is_empty() {
            Theory::ALL.to_vec()
        } else {
            self.theories.clone()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub theories: TheoryArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct IndexArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub theories: TheoryArgs,
    #[arg(long, default_value = "hmi")]
    pub index: IndexKind,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "hmi")]
    pub index: IndexKind,
    /// Significance levels; defaults to 0.10, 0.05 and 0.01.
    #[arg(long = "alpha")]
    pub alphas: Vec<f64>,
    #[arg(long, default_value_t = 400_000)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cap on LNU-passing random subjects used for QLU and C-LNU cutoffs.
    #[arg(long, default_value_t = 20_000)]
    pub parent_population: usize,
    /// Cap on QLU- or C-LNU-passing random subjects used for C-QLU cutoffs.
    #[arg(long, default_value_t = 1_000)]
    pub child_population: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DescribeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub theories: TheoryArgs,
    /// Width of the HMI bins in the dispersion tables.
    #[arg(long, default_value_t = 0.05)]
    pub bin_width: f64,
    /// Writes the statistics as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Output directory for menus.csv, choices.csv and truth.json.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 65)]
    pub agents: usize,
    #[arg(long, default_value_t = 20)]
    pub menus: usize,
    #[arg(long, default_value = "quasilinear")]
    pub kind: AgentKind,
    /// Probability that an agent picks a contract uniformly at random.
    #[arg(long, default_value_t = 0.0)]
    pub tremble: f64,
    /// Only concave wage schedules.
    #[arg(long)]
    pub concave_only: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Reads menus from a file instead of generating them.
    #[arg(long)]
    pub input_menus: Option<PathBuf>,
}

pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Test(a) => cmd_test(a),
        Command::Index(a) => cmd_index(a),
        Command::Calibrate(a) => cmd_calibrate(a),
        Command::Describe(a) => cmd_describe(a),
        Command::Simulate(a) => cmd_simulate(a),
    }
}

fn load(input: &InputArgs) -> Result<(Experiment, Vec<SubjectChoices>)> {
    let exp = load_experiment(&input.input_menus)?;
    let subjects = load_choices(&input.input_choices, &exp)?;
    if subjects.is_empty() {
        return Err(Error::EmptyData("choices file without subjects"));
    }
    Ok((exp, subjects))
}

fn require_theories(theories: &[Theory]) -> Result<()> {
    if theories.is_empty() {
        return Err(Error::Invalid("no theory selected".into()));
    }
    Ok(())
}

fn finish(report: &Report, output: &OutputArgs, mut text: String) -> Result<String> {
    if let Some(path) = &output.out {
        write_report(report, path, output.format)?;
        writeln!(text, "report written to {}", path.display()).unwrap();
    }
    Ok(text)
}

fn witness_ids(exp: &Experiment, witness: &[usize]) -> Vec<String> {
    witness.iter().map(|&t| exp.budget(t).menu_id().to_string()).collect()
}

fn header(text: &mut String, first: &str, columns: impl IntoIterator<Item = String>) {
    write!(text, "{first:<12}").unwrap();
    for c in columns {
        write!(text, " {c:>10}").unwrap();
    }
    text.push('\n');
}

pub fn test_report(exp: &Experiment, subjects: &[SubjectChoices], theories: &[Theory]) -> Result<Report> {
    require_theories(theories)?;
    let mut report = Report::new(ReportMeta::new("test", exp.num_menus(), subjects.len()));
    for s in subjects {
        let mut sr = SubjectReport::new(s.subject_id.clone());
        for &th in theories {
            let r = check(exp, s, th)?;
            sr.tests.push(TestRecord {
                theory: th,
                pass: r.pass,
                witness: witness_ids(exp, &r.witness),
            });
        }
        report.subjects.push(sr);
    }
    Ok(report)
}

pub fn cmd_test(args: &TestArgs) -> Result<String> {
    let theories = args.theories.resolve();
    let (exp, subjects) = load(&args.input)?;
    let report = test_report(&exp, &subjects, &theories)?;
    let mut text = String::new();
    header(&mut text, "subject", theories.iter().map(|t| t.label().to_string()));
    for sr in &report.subjects {
        write!(text, "{:<12}", sr.subject_id).unwrap();
        for t in &sr.tests {
            write!(text, " {:>10}", if t.pass { "pass" } else { "fail" }).unwrap();
        }
        text.push('\n');
    }
    let failures: Vec<_> = report
        .subjects
        .iter()
        .flat_map(|s| s.tests.iter().filter(|t| !t.pass).map(move |t| (&s.subject_id, t)))
        .collect();
    if !failures.is_empty() {
        text.push_str("\nviolating cycles\n");
        for (id, t) in failures {
            writeln!(text, "{id:<12} {:<6} {}", t.theory.label(), t.witness.join(" -> ")).unwrap();
        }
    }
    text.push('\n');
    for (k, &th) in theories.iter().enumerate() {
        let n = report.subjects.iter().filter(|s| s.tests[k].pass).count();
        writeln!(
            text,
            "{:<6} {n}/{} consistent ({:.4})",
            th.label(),
            subjects.len(),
            n as f64 / subjects.len() as f64
        )
        .unwrap();
    }
    finish(&report, &args.output, text)
}

pub fn index_report(
    exp: &Experiment,
    subjects: &[SubjectChoices],
    theories: &[Theory],
    index: IndexKind,
) -> Result<Report> {
    require_theories(theories)?;
    let mut report = Report::new(ReportMeta::new("index", exp.num_menus(), subjects.len()));
    for s in subjects {
        let mut sr = SubjectReport::new(s.subject_id.clone());
        for &th in theories {
            sr.indices.push(IndexRecord {
                theory: th,
                index,
                value: index_value(exp, s, th, index)?,
            });
        }
        report.subjects.push(sr);
    }
    Ok(report)
}

pub fn cmd_index(args: &IndexArgs) -> Result<String> {
    let theories = args.theories.resolve();
    let (exp, subjects) = load(&args.input)?;
    let report = index_report(&exp, &subjects, &theories, args.index)?;
    let mut text = format!("index: {}\n", args.index);
    header(&mut text, "subject", theories.iter().map(|t| t.label().to_string()));
    for sr in &report.subjects {
        write!(text, "{:<12}", sr.subject_id).unwrap();
        for i in &sr.indices {
            write!(text, " {:>10.4}", i.value).unwrap();
        }
        text.push('\n');
    }
    write!(text, "{:<12}", "mean").unwrap();
    for k in 0..theories.len() {
        let mean = report.subjects.iter().map(|s| s.indices[k].value).sum::<f64>() / subjects.len() as f64;
        write!(text, " {mean:>10.4}").unwrap();
    }
    text.push('\n');
    finish(&report, &args.output, text)
}

fn alphas_or_default(alphas: &[f64]) -> Vec<f64> {
    if alphas.is_empty() {
        CalibrationConfig::default().alphas
    } else {
        alphas.to_vec()
    }
}

pub fn calibration_report(
    exp: &Experiment,
    subjects: &[SubjectChoices],
    config: &CalibrationConfig,
) -> Result<Report> {
    let dist = empirical_choice_distribution(subjects, exp)?;
    let cal = calibrate(exp, &dist, config)?;
    let indices = subject_indices(exp, subjects, config.index)?;
    let mut report = Report::new(ReportMeta::new("calibrate", exp.num_menus(), subjects.len()));
    for idx in &indices {
        let mut sr = SubjectReport::new(idx.subject_id.clone());
        for th in Theory::ALL {
            sr.indices.push(IndexRecord {
                theory: th,
                index: config.index,
                value: idx.value(th),
            });
        }
        for &alpha in &config.alphas {
            for row in TestRow::ALL {
                if let Some(pass) = passes(idx, row, alpha, &cal) {
                    sr.flags.push(FlagRecord { row, alpha, pass });
                }
            }
        }
        report.subjects.push(sr);
    }
    report.pass_rates = pass_rate_table(&indices, &cal)?;
    report.calibration = Some(cal);
    Ok(report)
}

fn rate_cell(cell: &PassRateCell, conditional: bool, method: CiMethod) -> String {
    let reports = if conditional { &cell.conditional } else { &cell.unconditional };
    match reports.iter().find(|r| r.method == method) {
        Some(r) => format!(
            "{:.4} ({}/{}) [{:.4}, {:.4}]",
            r.rate, r.passes, r.total, r.ci_low, r.ci_high
        ),
        None => "no subjects".into(),
    }
}

pub fn cmd_calibrate(args: &CalibrateArgs) -> Result<String> {
    let (exp, subjects) = load(&args.input)?;
    let config = CalibrationConfig {
        draws: args.draws,
        seed: args.seed,
        alphas: alphas_or_default(&args.alphas),
        index: args.index,
        parent_population: args.parent_population,
        child_population: args.child_population,
    };
    let report = calibration_report(&exp, &subjects, &config)?;
    let cal = report.calibration.as_ref().unwrap();
    let mut text = format!(
        "{} random subjects, seed {}, index {}\n\ncutoffs\n",
        config.draws, config.seed, config.index
    );
    header(&mut text, "row", config.alphas.iter().map(|a| format!("p={a}")));
    for row in TestRow::ALL {
        write!(text, "{:<12}", row.label()).unwrap();
        for &a in &config.alphas {
            match cal.get(row, a) {
                Some(r) => write!(text, " {:>10.4}", r.cutoff).unwrap(),
                None => write!(text, " {:>10}", "-").unwrap(),
            }
        }
        text.push('\n');
    }
    text.push_str("\nrandom subjects behind each cutoff (population / above cutoff)\n");
    for r in &cal.results {
        writeln!(
            text,
            "{:<12} p={:<6} {} / {}",
            r.row.label(),
            r.alpha,
            r.population_size,
            r.passing
        )
        .unwrap();
    }
    for &alpha in &config.alphas {
        writeln!(text, "\npass rates at p={alpha}").unwrap();
        for cell in report.pass_rates.iter().filter(|c| c.alpha == alpha) {
            let given = match cell.row.parent() {
                Some(p) => format!("{} | {}", cell.row.label(), p.label()),
                None => cell.row.label().to_string(),
            };
            writeln!(text, "{given:<20} clopper-pearson {}", rate_cell(cell, true, CiMethod::ClopperPearson)).unwrap();
            writeln!(text, "{:<20} clt             {}", "", rate_cell(cell, true, CiMethod::Clt)).unwrap();
            if cell.row.parent().is_some() {
                writeln!(text, "{:<20} unconditional   {}", "", rate_cell(cell, false, CiMethod::ClopperPearson))
                    .unwrap();
            }
        }
    }
    if !cal.skipped.is_empty() {
        text.push_str("\nnot calibrated (raise --draws or the population caps)\n");
        for s in &cal.skipped {
            writeln!(text, "{:<12} p={:<6} {}", s.row.label(), s.alpha, s.reason).unwrap();
        }
    }
    finish(&report, &args.output, text)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpreadStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    pub mode: f64,
    pub sd: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HmiBin {
    pub lower: f64,
    pub upper: f64,
    pub subjects: usize,
    pub mean_spread: f64,
    pub mean_variance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Description {
    pub subjects: usize,
    pub menus: usize,
    pub mean_choice: f64,
    pub mean_subject_sd: f64,
    pub spread: SpreadStats,
    pub bins: BTreeMap<String, Vec<HmiBin>>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance with `n - 1` in the denominator; 0 for a single value.
fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

fn spread_stats(xs: &[f64]) -> SpreadStats {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    let mut mode = (sorted[0], 0);
    let mut i = 0;
    while i < n {
        let j = sorted[i..].iter().take_while(|&&x| x == sorted[i]).count();
        if j > mode.1 {
            mode = (sorted[i], j);
        }
        i += j;
    }
    SpreadStats {
        min: sorted[0],
        max: sorted[n - 1],
        mean: mean(xs),
        median,
        mode: mode.0,
        sd: variance(xs).sqrt(),
    }
}

/// Table-1 style statistics over task counts, and spread and variance per HMI bin.
pub fn describe(
    exp: &Experiment,
    subjects: &[SubjectChoices],
    theories: &[Theory],
    bin_width: f64,
) -> Result<Description> {
    if subjects.is_empty() {
        return Err(Error::EmptyData("no subjects"));
    }
    if !(bin_width > 0.0 && bin_width <= 1.0) {
        return Err(Error::Invalid(format!("bin width {bin_width} outside (0, 1]")));
    }
    let tasks: Vec<Vec<f64>> = subjects
        .iter()
        .map(|s| s.tasks(exp).into_iter().map(f64::from).collect())
        .collect();
    let all: Vec<f64> = tasks.iter().flatten().copied().collect();
    let spreads: Vec<f64> = tasks
        .iter()
        .map(|t| t.iter().copied().fold(f64::MIN, f64::max) - t.iter().copied().fold(f64::MAX, f64::min))
        .collect();
    let variances: Vec<f64> = tasks.iter().map(|t| variance(t)).collect();
    let sds: Vec<f64> = variances.iter().map(|v| v.sqrt()).collect();
    let nbins = (1.0 / bin_width).ceil() as usize;
    let mut bins = BTreeMap::new();
    for &th in theories {
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, s) in subjects.iter().enumerate() {
            let h = qlrev::hmi(exp, s, th)?.kept_fraction;
            let b = ((h / bin_width + 1e-9).floor() as usize).min(nbins - 1);
            groups.entry(b).or_default().push(i);
        }
        let rows = groups
            .into_iter()
            .map(|(b, ids)| HmiBin {
                lower: b as f64 * bin_width,
                upper: ((b + 1) as f64 * bin_width).min(1.0),
                subjects: ids.len(),
                mean_spread: ids.iter().map(|&i| spreads[i]).sum::<f64>() / ids.len() as f64,
                mean_variance: ids.iter().map(|&i| variances[i]).sum::<f64>() / ids.len() as f64,
            })
            .collect();
        bins.insert(th.label().to_string(), rows);
    }
    Ok(Description {
        subjects: subjects.len(),
        menus: exp.num_menus(),
        mean_choice: mean(&all),
        mean_subject_sd: mean(&sds),
        spread: spread_stats(&spreads),
        bins,
    })
}

pub fn cmd_describe(args: &DescribeArgs) -> Result<String> {
    let theories = args.theories.resolve();
    let (exp, subjects) = load(&args.input)?;
    let d = describe(&exp, &subjects, &theories, args.bin_width)?;
    let mut text = format!("{} subjects, {} menus\n", d.subjects, d.menus);
    writeln!(text, "mean choice (tasks)        {:.4}", d.mean_choice).unwrap();
    writeln!(text, "mean per-subject sd        {:.4}", d.mean_subject_sd).unwrap();
    let s = &d.spread;
    writeln!(
        text,
        "spread (max - min)         min {:.4} max {:.4} mean {:.4} median {:.4} mode {:.4} sd {:.4}",
        s.min, s.max, s.mean, s.median, s.mode, s.sd
    )
    .unwrap();
    for th in &theories {
        writeln!(text, "\ndispersion by {} HMI", th.label()).unwrap();
        writeln!(text, "{:<16} {:>8} {:>12} {:>12}", "bin", "subjects", "spread", "variance").unwrap();
        for b in &d.bins[th.label()] {
            writeln!(
                text,
                "[{:.4}, {:.4}) {:>8} {:>12.4} {:>12.4}",
                b.lower, b.upper, b.subjects, b.mean_spread, b.mean_variance
            )
            .unwrap();
        }
    }
    if let Some(path) = &args.out {
        let json = serde_json::to_string_pretty(&d).map_err(|e| Error::Write(e.to_string()))?;
        fs::write(path, json).map_err(|e| Error::Write(format!("{}: {e}", path.display())))?;
        writeln!(text, "statistics written to {}", path.display()).unwrap();
    }
    Ok(text)
}

/// Sidecar manifest describing how simulated data were generated.
#[derive(Clone, Debug, Serialize)]
pub struct GroundTruth {
    pub kind: AgentKind,
    pub tremble: f64,
    pub seed: u64,
    pub menus: usize,
    pub concave_only: bool,
    pub agents: Vec<SimulatedSubject>,
}

pub fn simulate(args: &SimulateArgs) -> Result<(Experiment, GroundTruth)> {
    let exp = match &args.input_menus {
        Some(path) => load_experiment(path)?,
        None => paper_like_design(args.menus, args.concave_only, args.seed)?,
    };
    let agents = simulate_population(&exp, args.agents, args.kind, args.tremble, args.seed)?;
    Ok((
        exp.clone(),
        GroundTruth {
            kind: args.kind,
            tremble: args.tremble,
            seed: args.seed,
            menus: exp.num_menus(),
            concave_only: args.concave_only,
            agents,
        },
    ))
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<String> {
    let (exp, truth) = simulate(args)?;
    let dir: &Path = &args.out;
    fs::create_dir_all(dir).map_err(|e| Error::Write(format!("{}: {e}", dir.display())))?;
    let subjects: Vec<SubjectChoices> = truth.agents.iter().map(|a| a.choices.clone()).collect();
    write_menus(&exp, dir.join("menus.csv"))?;
    write_choices(&exp, &subjects, dir.join("choices.csv"))?;
    let json = serde_json::to_string_pretty(&truth).map_err(|e| Error::Write(e.to_string()))?;
    fs::write(dir.join("truth.json"), json).map_err(|e| Error::Write(e.to_string()))?;
    Ok(format!(
        "{} {:?} agents on {} menus (tremble {:.4}) written to {}\n",
        subjects.len(),
        args.kind,
        exp.num_menus(),
        args.tremble,
        dir.display()
    ))
}
