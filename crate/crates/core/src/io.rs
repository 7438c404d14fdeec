//! CSV ingestion of menus and choices, and JSON/CSV result reports.
//!
//! Menus file, header `menu_id,tasks,wage`: one row per contract, wages in
//! dollars with at most two decimals. Choices file, header
//! `subject_id,menu_id,tasks_chosen`: one row per subject and menu.
//!
//! Reports have four sections, `meta`, `subjects`, `calibration` and
//! `pass_rates`. The CSV form stores them as long rows
//! `record,subject_id,theory,alpha,field,value`:
//!
//! | record | key columns | fields |
//! |---|---|---|
//! | `meta` | | `tool`, `version`, `command`, `menus`, `subjects` |
//! | `test` | subject, theory | `pass`, `witness` (menu ids joined by `;`) |
//! | `index` | subject, theory | index kind (`hmi`, `ccei-wealth`, `ccei-jnd`) |
//! | `flag` | subject, row, alpha | `pass` |
//! | `config` | | calibration settings; `alphas` joined by `;` |
//! | `cutoff` | row, alpha | `cutoff`, `conditioning`, `population_size`, `passing` |
//! | `skipped` | row, alpha | `reason` |
//! | `pass_rate` | row, alpha | `cutoff`, `<group>.<method>.<stat>` |
//!
//! Rows of the pass-rate table sit in the `theory` column for `flag`,
//! `cutoff`, `skipped` and `pass_rate` records. Floats are written in
//! shortest round-trip form, so reading a report back gives identical values.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indices::IndexKind;
use crate::mc::{Calibration, CalibrationConfig, CalibrationResult, CiMethod, PassRateCell, PassRateReport, SkippedRow, TestRow};
use crate::model::{Contract, Experiment, Money, SubjectChoices};
use crate::rptests::Theory;

pub const MENUS_HEADER: [&str; 3] = ["menu_id", "tasks", "wage"];
pub const CHOICES_HEADER: [&str; 3] = ["subject_id", "menu_id", "tasks_chosen"];
pub const REPORT_HEADER: [&str; 6] = ["record", "subject_id", "theory", "alpha", "field", "value"];

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Records of a headed CSV text, each with its 1-based line number.
fn records(text: &str, header: &[&str]) -> Result<Vec<(u64, Vec<String>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let found = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if found.iter().collect::<Vec<_>>() != header {
        return Err(parse_err(
            1,
            format!("expected header {:?}, found {:?}", header.join(","), found.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if rec.len() != header.len() {
            return Err(parse_err(line, format!("expected {} fields, found {}", header.len(), rec.len())));
        }
        out.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(out)
}

pub fn parse_experiment(text: &str) -> Result<Experiment> {
    let mut menus: Vec<(String, Vec<Contract>)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (line, row) in records(text, &MENUS_HEADER)? {
        let menu_id = row[0].clone();
        if menu_id.is_empty() {
            return Err(parse_err(line, "empty menu_id"));
        }
        let tasks: u32 = row[1]
            .parse()
            .map_err(|_| parse_err(line, format!("invalid task count {:?}", row[1])))?;
        let wage: Money = row[2].parse().map_err(|e: String| parse_err(line, e))?;
        if !seen.insert((menu_id.clone(), tasks)) {
            return Err(parse_err(line, format!("duplicate contract ({menu_id}, {tasks} tasks)")));
        }
        match menus.iter_mut().find(|(id, _)| *id == menu_id) {
            Some((_, m)) => m.push(Contract::new(tasks, wage)),
            None => menus.push((menu_id, vec![Contract::new(tasks, wage)])),
        }
    }
    let (first_id, first) = menus.first().ok_or(Error::EmptyData("menus file without contracts"))?;
    let mut first_tasks: Vec<u32> = first.iter().map(|c| c.tasks).collect();
    first_tasks.sort_unstable();
    for (id, m) in &menus {
        let mut tasks: Vec<u32> = m.iter().map(|c| c.tasks).collect();
        tasks.sort_unstable();
        if tasks != first_tasks {
            return Err(Error::Validation {
                menu_id: id.clone(),
                message: format!("task grid {tasks:?} differs from menu {first_id} {first_tasks:?}"),
            });
        }
    }
    let k = first_tasks.last().copied().unwrap_or(0);
    let budgets = menus
        .iter()
        .map(|(id, m)| {
            crate::model::reflect_budget(id.clone(), m, k).map_err(|e| Error::Validation {
                menu_id: id.clone(),
                message: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Experiment::new(budgets, k).map_err(|e| Error::Validation {
        menu_id: first_id.clone(),
        message: e.to_string(),
    })
}

/// Reads a menus file; `K` is the largest task count.
pub fn load_experiment(path: impl AsRef<Path>) -> Result<Experiment> {
    parse_experiment(&read_to_string(path.as_ref())?)
}

pub fn parse_choices(text: &str, exp: &Experiment) -> Result<Vec<SubjectChoices>> {
    let mut order: Vec<String> = Vec::new();
    let mut table: BTreeMap<String, Vec<Option<usize>>> = BTreeMap::new();
    for (line, row) in records(text, &CHOICES_HEADER)? {
        let (subject_id, menu_id) = (&row[0], &row[1]);
        if subject_id.is_empty() {
            return Err(parse_err(line, "empty subject_id"));
        }
        let t = exp
            .menu_index(menu_id)
            .ok_or_else(|| parse_err(line, format!("unknown menu {menu_id:?}")))?;
        let tasks: u32 = row[2]
            .parse()
            .map_err(|_| parse_err(line, format!("invalid task count {:?}", row[2])))?;
        if !exp.task_grid().contains(&tasks) {
            return Err(Error::OffGrid(format!(
                "line {line}: subject {subject_id} chose {tasks} tasks in menu {menu_id}"
            )));
        }
        let idx = exp.budget(t).index_of(exp.good_of_tasks(tasks)).unwrap();
        let slots = table.entry(subject_id.clone()).or_insert_with(|| {
            order.push(subject_id.clone());
            vec![None; exp.num_menus()]
        });
        if slots[t].replace(idx).is_some() {
            return Err(parse_err(line, format!("second choice of subject {subject_id} in menu {menu_id}")));
        }
    }
    order
        .into_iter()
        .map(|id| {
            let slots = &table[&id];
            let choices = slots
                .iter()
                .enumerate()
                .map(|(t, c)| {
                    c.ok_or_else(|| Error::MissingMenu {
                        subject_id: id.clone(),
                        menu_id: exp.budget(t).menu_id().to_string(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SubjectChoices::new(id, choices))
        })
        .collect()
}

/// Reads a choices file; subjects come out in order of first appearance.
pub fn load_choices(path: impl AsRef<Path>, exp: &Experiment) -> Result<Vec<SubjectChoices>> {
    parse_choices(&read_to_string(path.as_ref())?, exp)
}

fn write_err(e: impl fmt::Display) -> Error {
    Error::Write(e.to_string())
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).map_err(write_err)?;
    for row in rows {
        w.write_record(&row).map_err(write_err)?;
    }
    String::from_utf8(w.into_inner().map_err(write_err)?).map_err(write_err)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Write(format!("{}: {e}", path.display())))
}

pub fn menus_csv(exp: &Experiment) -> Result<String> {
    let rows = exp.budgets().iter().flat_map(|b| {
        b.to_contracts(exp.k())
            .into_iter()
            .map(|c| vec![b.menu_id().to_string(), c.tasks.to_string(), c.wage.to_string()])
    });
    csv_text(&MENUS_HEADER, rows)
}

pub fn choices_csv(exp: &Experiment, subjects: &[SubjectChoices]) -> Result<String> {
    let mut rows = Vec::new();
    for s in subjects {
        s.validate(exp)?;
        for (t, tasks) in s.tasks(exp).into_iter().enumerate() {
            rows.push(vec![
                s.subject_id.clone(),
                exp.budget(t).menu_id().to_string(),
                tasks.to_string(),
            ]);
        }
    }
    csv_text(&CHOICES_HEADER, rows)
}

pub fn write_menus(exp: &Experiment, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &menus_csv(exp)?)
}

pub fn write_choices(exp: &Experiment, subjects: &[SubjectChoices], path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &choices_csv(exp, subjects)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(format!("unknown report format {s:?}, expected json or csv")),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub menus: usize,
    pub subjects: usize,
}

impl ReportMeta {
    pub fn new(command: impl Into<String>, menus: usize, subjects: usize) -> Self {
        ReportMeta {
            tool: "qlrev".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            menus,
            subjects,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestRecord {
    pub theory: Theory,
    pub pass: bool,
    /// Menu ids along a violating cycle.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witness: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexRecord {
    pub theory: Theory,
    pub index: IndexKind,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlagRecord {
    pub row: TestRow,
    pub alpha: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubjectReport {
    pub subject_id: String,
    #[serde(default)]
    pub tests: Vec<TestRecord>,
    #[serde(default)]
    pub indices: Vec<IndexRecord>,
    /// Whether the subject rejects the random null, per row and level.
    #[serde(default)]
    pub flags: Vec<FlagRecord>,
}

impl SubjectReport {
    pub fn new(subject_id: impl Into<String>) -> Self {
        SubjectReport {
            subject_id: subject_id.into(),
            tests: Vec::new(),
            indices: Vec::new(),
            flags: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub meta: ReportMeta,
    pub subjects: Vec<SubjectReport>,
    pub calibration: Option<Calibration>,
    pub pass_rates: Vec<PassRateCell>,
}

impl Report {
    pub fn new(meta: ReportMeta) -> Self {
        Report {
            meta,
            subjects: Vec::new(),
            calibration: None,
            pass_rates: Vec::new(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(write_err)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| parse_err(e.line() as u64, e.to_string()))
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut rows = Vec::new();
        let mut push = |record: &str, subject: &str, theory: &str, alpha: Option<f64>, field: &str, value: String| {
            rows.push(vec![
                record.to_string(),
                subject.to_string(),
                theory.to_string(),
                alpha.map(|a| a.to_string()).unwrap_or_default(),
                field.to_string(),
                value,
            ]);
        };
        let m = &self.meta;
        push("meta", "", "", None, "tool", m.tool.clone());
        push("meta", "", "", None, "version", m.version.clone());
        push("meta", "", "", None, "command", m.command.clone());
        push("meta", "", "", None, "menus", m.menus.to_string());
        push("meta", "", "", None, "subjects", m.subjects.to_string());
        for s in &self.subjects {
            let id = s.subject_id.as_str();
            if s.tests.is_empty() && s.indices.is_empty() && s.flags.is_empty() {
                push("subject", id, "", None, "", String::new());
            }
            for t in &s.tests {
                push("test", id, t.theory.label(), None, "pass", t.pass.to_string());
                if !t.witness.is_empty() {
                    push("test", id, t.theory.label(), None, "witness", t.witness.join(";"));
                }
            }
            for i in &s.indices {
                push("index", id, i.theory.label(), None, i.index.label(), i.value.to_string());
            }
            for f in &s.flags {
                push("flag", id, f.row.label(), Some(f.alpha), "pass", f.pass.to_string());
            }
        }
        if let Some(cal) = &self.calibration {
            let c = &cal.config;
            push("config", "", "", None, "draws", c.draws.to_string());
            push("config", "", "", None, "seed", c.seed.to_string());
            push("config", "", "", None, "index", c.index.label().to_string());
            let alphas: Vec<String> = c.alphas.iter().map(f64::to_string).collect();
            push("config", "", "", None, "alphas", alphas.join(";"));
            push("config", "", "", None, "parent_population", c.parent_population.to_string());
            push("config", "", "", None, "child_population", c.child_population.to_string());
            for r in &cal.results {
                let (row, a) = (r.row.label(), Some(r.alpha));
                push("cutoff", "", row, a, "cutoff", r.cutoff.to_string());
                push(
                    "cutoff",
                    "",
                    row,
                    a,
                    "conditioning",
                    r.conditioning.map(|t| t.label().to_string()).unwrap_or_default(),
                );
                push("cutoff", "", row, a, "population_size", r.population_size.to_string());
                push("cutoff", "", row, a, "passing", r.passing.to_string());
            }
            for s in &cal.skipped {
                push("skipped", "", s.row.label(), Some(s.alpha), "reason", s.reason.clone());
            }
        }
        for cell in &self.pass_rates {
            let (row, a) = (cell.row.label(), Some(cell.alpha));
            push("pass_rate", "", row, a, "cutoff", cell.cutoff.to_string());
            for (group, reports) in [("conditional", &cell.conditional), ("unconditional", &cell.unconditional)] {
                for r in reports.iter() {
                    let prefix = format!("{group}.{}", r.method.label());
                    push("pass_rate", "", row, a, &format!("{prefix}.passes"), r.passes.to_string());
                    push("pass_rate", "", row, a, &format!("{prefix}.total"), r.total.to_string());
                    push("pass_rate", "", row, a, &format!("{prefix}.rate"), r.rate.to_string());
                    push("pass_rate", "", row, a, &format!("{prefix}.ci_low"), r.ci_low.to_string());
                    push("pass_rate", "", row, a, &format!("{prefix}.ci_high"), r.ci_high.to_string());
                }
            }
        }
        csv_text(&REPORT_HEADER, rows)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut meta: BTreeMap<String, String> = BTreeMap::new();
        let mut config: BTreeMap<String, String> = BTreeMap::new();
        let mut subjects: Vec<SubjectReport> = Vec::new();
        let mut results: Vec<CalibrationResult> = Vec::new();
        let mut skipped = Vec::new();
        let mut cells: Vec<PassRateCell> = Vec::new();

        fn num<T: FromStr>(line: u64, s: &str) -> Result<T> {
            s.parse().map_err(|_| parse_err(line, format!("invalid number {s:?}")))
        }
        fn label<T: FromStr<Err = String>>(line: u64, s: &str) -> Result<T> {
            s.parse().map_err(|e: String| parse_err(line, e))
        }

        for (line, r) in records(text, &REPORT_HEADER)? {
            let [record, subject, theory, alpha, field, value] = <[String; 6]>::try_from(r).unwrap();
            let alpha = || -> Result<f64> { num(line, &alpha) };
            let subject_entry = |subjects: &mut Vec<SubjectReport>| -> usize {
                match subjects.iter().position(|s| s.subject_id == subject) {
                    Some(i) => i,
                    None => {
                        subjects.push(SubjectReport::new(subject.clone()));
                        subjects.len() - 1
                    }
                }
            };
            match record.as_str() {
                "meta" => {
                    meta.insert(field, value);
                }
                "config" => {
                    config.insert(field, value);
                }
                "subject" => {
                    subject_entry(&mut subjects);
                }
                "test" => {
                    let i = subject_entry(&mut subjects);
                    let th: Theory = label(line, &theory)?;
                    let s = &mut subjects[i];
                    let pos = match s.tests.iter().position(|t| t.theory == th) {
                        Some(p) => p,
                        None => {
                            s.tests.push(TestRecord {
                                theory: th,
                                pass: false,
                                witness: Vec::new(),
                            });
                            s.tests.len() - 1
                        }
                    };
                    match field.as_str() {
                        "pass" => s.tests[pos].pass = num(line, &value)?,
                        "witness" => s.tests[pos].witness = value.split(';').map(str::to_string).collect(),
                        _ => return Err(parse_err(line, format!("unknown test field {field:?}"))),
                    }
                }
                "index" => {
                    let i = subject_entry(&mut subjects);
                    subjects[i].indices.push(IndexRecord {
                        theory: label(line, &theory)?,
                        index: label(line, &field)?,
                        value: num(line, &value)?,
                    });
                }
                "flag" => {
                    let i = subject_entry(&mut subjects);
                    subjects[i].flags.push(FlagRecord {
                        row: label(line, &theory)?,
                        alpha: alpha()?,
                        pass: num(line, &value)?,
                    });
                }
                "cutoff" => {
                    let (row, a): (TestRow, f64) = (label(line, &theory)?, alpha()?);
                    let pos = match results.iter().position(|r| r.row == row && r.alpha == a) {
                        Some(p) => p,
                        None => {
                            results.push(CalibrationResult {
                                row,
                                theory: row.theory(),
                                conditioning: None,
                                alpha: a,
                                cutoff: 0.0,
                                population_size: 0,
                                passing: 0,
                            });
                            results.len() - 1
                        }
                    };
                    let r = &mut results[pos];
                    match field.as_str() {
                        "cutoff" => r.cutoff = num(line, &value)?,
                        "conditioning" if value.is_empty() => r.conditioning = None,
                        "conditioning" => r.conditioning = Some(label(line, &value)?),
                        "population_size" => r.population_size = num(line, &value)?,
                        "passing" => r.passing = num(line, &value)?,
                        _ => return Err(parse_err(line, format!("unknown cutoff field {field:?}"))),
                    }
                }
                "skipped" => skipped.push(SkippedRow {
                    row: label(line, &theory)?,
                    alpha: alpha()?,
                    reason: value,
                }),
                "pass_rate" => {
                    let (row, a): (TestRow, f64) = (label(line, &theory)?, alpha()?);
                    let pos = match cells.iter().position(|c| c.row == row && c.alpha == a) {
                        Some(p) => p,
                        None => {
                            cells.push(PassRateCell {
                                row,
                                alpha: a,
                                cutoff: 0.0,
                                conditional: Vec::new(),
                                unconditional: Vec::new(),
                            });
                            cells.len() - 1
                        }
                    };
                    let cell = &mut cells[pos];
                    if field == "cutoff" {
                        cell.cutoff = num(line, &value)?;
                        continue;
                    }
                    let mut parts = field.split('.');
                    let (Some(group), Some(method), Some(stat), None) =
                        (parts.next(), parts.next(), parts.next(), parts.next())
                    else {
                        return Err(parse_err(line, format!("unknown pass_rate field {field:?}")));
                    };
                    let method = match method {
                        "clopper-pearson" => CiMethod::ClopperPearson,
                        "clt" => CiMethod::Clt,
                        _ => return Err(parse_err(line, format!("unknown interval method {method:?}"))),
                    };
                    let reports = match group {
                        "conditional" => &mut cell.conditional,
                        "unconditional" => &mut cell.unconditional,
                        _ => return Err(parse_err(line, format!("unknown pass_rate group {group:?}"))),
                    };
                    let pos = match reports.iter().position(|r| r.method == method) {
                        Some(p) => p,
                        None => {
                            reports.push(PassRateReport {
                                passes: 0,
                                total: 0,
                                rate: 0.0,
                                ci_low: 0.0,
                                ci_high: 0.0,
                                method,
                            });
                            reports.len() - 1
                        }
                    };
                    let r = &mut reports[pos];
                    match stat {
                        "passes" => r.passes = num(line, &value)?,
                        "total" => r.total = num(line, &value)?,
                        "rate" => r.rate = num(line, &value)?,
                        "ci_low" => r.ci_low = num(line, &value)?,
                        "ci_high" => r.ci_high = num(line, &value)?,
                        _ => return Err(parse_err(line, format!("unknown pass_rate field {field:?}"))),
                    }
                }
                other => return Err(parse_err(line, format!("unknown record type {other:?}"))),
            }
        }

        let get = |map: &BTreeMap<String, String>, key: &str, what: &str| -> Result<String> {
            map.get(key)
                .cloned()
                .ok_or_else(|| parse_err(0, format!("missing {what} field {key:?}")))
        };
        let meta = ReportMeta {
            tool: get(&meta, "tool", "meta")?,
            version: get(&meta, "version", "meta")?,
            command: get(&meta, "command", "meta")?,
            menus: num(0, &get(&meta, "menus", "meta")?)?,
            subjects: num(0, &get(&meta, "subjects", "meta")?)?,
        };
        let calibration = if config.is_empty() {
            None
        } else {
            let alphas = get(&config, "alphas", "config")?;
            Some(Calibration {
                config: CalibrationConfig {
                    draws: num(0, &get(&config, "draws", "config")?)?,
                    seed: num(0, &get(&config, "seed", "config")?)?,
                    alphas: if alphas.is_empty() {
                        Vec::new()
                    } else {
                        alphas.split(';').map(|a| num(0, a)).collect::<Result<_>>()?
                    },
                    index: label(0, &get(&config, "index", "config")?)?,
                    parent_population: num(0, &get(&config, "parent_population", "config")?)?,
                    child_population: num(0, &get(&config, "child_population", "config")?)?,
                },
                results,
                skipped,
            })
        };
        Ok(Report {
            meta,
            subjects,
            calibration,
            pass_rates: cells,
        })
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Csv => self.to_csv(),
        }
    }

    pub fn parse(text: &str, format: ReportFormat) -> Result<Self> {
        match format {
            ReportFormat::Json => Report::from_json(text),
            ReportFormat::Csv => Report::from_csv(text),
        }
    }
}

pub fn write_report(report: &Report, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    write_file(path.as_ref(), &report.render(format)?)
}

pub fn read_report(path: impl AsRef<Path>, format: ReportFormat) -> Result<Report> {
    Report::parse(&read_to_string(path.as_ref())?, format)
}
