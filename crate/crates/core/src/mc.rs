//! Monte Carlo calibration of index cutoffs against random choosers.
//!
//! Random subjects pick each menu's contract independently from the empirical
//! choice distribution of that menu. Subject `i` of a run with master seed
//! `seed` draws from ChaCha8 stream `i`, so every index value is a function of
//! `(seed, i)` alone and the run does not depend on thread scheduling.
//!
//! Nested theories are calibrated on conditional populations: QLU and C-LNU
//! cutoffs come from random subjects that pass LNU at the same level, and
//! C-QLU cutoffs from those passing C-LNU (`C-QLU(C)`) or QLU (`C-QLU(Q)`).

use std::fmt;
use std::str::FromStr;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::error::{Error, Result};
use crate::indices::{index_value, IndexKind};
use crate::model::{Experiment, SubjectChoices};
use crate::rptests::Theory;

/// Per-menu probabilities over grid points.
#[derive(Clone, Debug)]
pub struct ChoiceDistribution {
    probs: Vec<Vec<f64>>,
    samplers: Vec<WeightedIndex<f64>>,
}

impl ChoiceDistribution {
    pub fn from_probs(probs: Vec<Vec<f64>>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyData("choice distribution without menus"));
        }
        let samplers = probs
            .iter()
            .enumerate()
            .map(|(t, p)| {
                let sum: f64 = p.iter().sum();
                if p.iter().any(|&x| x.is_nan() || x < 0.0) || (sum - 1.0).abs() > 1e-12 {
                    return Err(Error::Invalid(format!(
                        "menu {t}: probabilities must be nonnegative and sum to 1"
                    )));
                }
                WeightedIndex::new(p.iter().copied())
                    .map_err(|e| Error::Invalid(format!("menu {t}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ChoiceDistribution { probs, samplers })
    }

    pub fn probs(&self) -> &[Vec<f64>] {
        &self.probs
    }

    pub fn num_menus(&self) -> usize {
        self.probs.len()
    }

    /// Choices of random subject `index` under master seed `seed`.
    pub fn sample_subject(&self, seed: u64, index: u64) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        self.samplers.iter().map(|w| w.sample(&mut rng)).collect()
    }
}

pub fn empirical_choice_distribution(subjects: &[SubjectChoices], exp: &Experiment) -> Result<ChoiceDistribution> {
    if subjects.is_empty() {
        return Err(Error::EmptyData("no subjects to estimate choice frequencies from"));
    }
    let mut counts = vec![vec![0u64; exp.grid_len()]; exp.num_menus()];
    for s in subjects {
        s.validate(exp)?;
        for (t, &c) in s.choices.iter().enumerate() {
            counts[t][c] += 1;
        }
    }
    let n = subjects.len() as f64;
    ChoiceDistribution::from_probs(
        counts
            .into_iter()
            .map(|row| row.into_iter().map(|c| c as f64 / n).collect())
            .collect(),
    )
}

pub fn generate_random_subjects(dist: &ChoiceDistribution, n: usize, seed: u64) -> Vec<SubjectChoices> {
    (0..n)
        .map(|i| SubjectChoices::new(format!("r{i}"), dist.sample_subject(seed, i as u64)))
        .collect()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 0.5 {
        Ok(())
    } else {
        Err(Error::Invalid(format!("alpha {alpha} outside (0, 0.5]")))
    }
}

/// The `100 (1 - alpha)` percentile: order statistic `ceil((1 - alpha) n)`,
/// 1-based, of the sorted sample.
pub fn calibrate_cutoff(samples: &[f64], alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let rank = (((1.0 - alpha) * n as f64) - 1e-9).ceil().clamp(1.0, n as f64) as usize;
    Ok(sorted[rank - 1])
}

/// Positions whose index lies strictly above the cutoff.
pub fn conditional_population(
    parent_indices: &[f64],
    parent_theory: Theory,
    parent_cutoff: f64,
    alpha: f64,
) -> Result<Vec<usize>> {
    let kept: Vec<usize> = parent_indices
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > parent_cutoff)
        .map(|(i, _)| i)
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyConditional {
            theory: parent_theory.label().to_string(),
            alpha,
        });
    }
    Ok(kept)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CiMethod {
    #[serde(rename = "clopper-pearson")]
    ClopperPearson,
    #[serde(rename = "clt")]
    Clt,
}

impl CiMethod {
    pub const ALL: [CiMethod; 2] = [CiMethod::ClopperPearson, CiMethod::Clt];

    pub fn label(self) -> &'static str {
        match self {
            CiMethod::ClopperPearson => "clopper-pearson",
            CiMethod::Clt => "clt",
        }
    }
}

impl fmt::Display for CiMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassRateReport {
    pub passes: usize,
    pub total: usize,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub method: CiMethod,
}

/// Exact two-sided 95% binomial interval from Beta quantiles.
pub fn clopper_pearson(passes: usize, total: usize) -> (f64, f64) {
    let (x, n) = (passes as f64, total as f64);
    let lo = if passes == 0 {
        0.0
    } else {
        Beta::new(x, n - x + 1.0).expect("positive shapes").inverse_cdf(0.025)
    };
    let hi = if passes == total {
        1.0
    } else {
        Beta::new(x + 1.0, n - x).expect("positive shapes").inverse_cdf(0.975)
    };
    (lo, hi)
}

/// Normal approximation `rate +- 1.96 sqrt(rate (1 - rate) / total)`, clamped to `[0, 1]`.
pub fn clt_interval(passes: usize, total: usize) -> (f64, f64) {
    let p = passes as f64 / total as f64;
    let half = 1.96 * (p * (1.0 - p) / total as f64).sqrt();
    ((p - half).max(0.0), (p + half).min(1.0))
}

pub fn pass_rate(passes: usize, total: usize, method: CiMethod) -> Result<PassRateReport> {
    if total == 0 {
        return Err(Error::EmptyData("pass rate over an empty group"));
    }
    if passes > total {
        return Err(Error::Invalid(format!("{passes} passes out of {total}")));
    }
    let (ci_low, ci_high) = match method {
        CiMethod::ClopperPearson => clopper_pearson(passes, total),
        CiMethod::Clt => clt_interval(passes, total),
    };
    Ok(PassRateReport {
        passes,
        total,
        rate: passes as f64 / total as f64,
        ci_low,
        ci_high,
        method,
    })
}

/// Rows of the pass-rate table, each a theory with the population it is
/// calibrated and evaluated on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TestRow {
    #[serde(rename = "LNU")]
    Lnu,
    #[serde(rename = "QLU")]
    Qlu,
    #[serde(rename = "C-LNU")]
    Clnu,
    #[serde(rename = "C-QLU(C)")]
    CqluC,
    #[serde(rename = "C-QLU(Q)")]
    CqluQ,
}

impl TestRow {
    pub const ALL: [TestRow; 5] = [TestRow::Lnu, TestRow::Qlu, TestRow::Clnu, TestRow::CqluC, TestRow::CqluQ];

    pub fn label(self) -> &'static str {
        match self {
            TestRow::Lnu => "LNU",
            TestRow::Qlu => "QLU",
            TestRow::Clnu => "C-LNU",
            TestRow::CqluC => "C-QLU(C)",
            TestRow::CqluQ => "C-QLU(Q)",
        }
    }

    pub fn theory(self) -> Theory {
        match self {
            TestRow::Lnu => Theory::Lnu,
            TestRow::Qlu => Theory::Qlu,
            TestRow::Clnu => Theory::Clnu,
            TestRow::CqluC | TestRow::CqluQ => Theory::Cqlu,
        }
    }

    pub fn parent(self) -> Option<TestRow> {
        match self {
            TestRow::Lnu => None,
            TestRow::Qlu | TestRow::Clnu => Some(TestRow::Lnu),
            TestRow::CqluC => Some(TestRow::Clnu),
            TestRow::CqluQ => Some(TestRow::Qlu),
        }
    }
}

impl fmt::Display for TestRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TestRow {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        TestRow::ALL
            .into_iter()
            .find(|r| r.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown row {s:?}"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub draws: usize,
    pub seed: u64,
    pub alphas: Vec<f64>,
    pub index: IndexKind,
    /// Cap on the LNU-passing draws used for QLU and C-LNU cutoffs.
    pub parent_population: usize,
    /// Cap on the QLU- or C-LNU-passing draws used for C-QLU cutoffs.
    pub child_population: usize,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig {
            draws: 400_000,
            seed: 0,
            alphas: vec![0.10, 0.05, 0.01],
            index: IndexKind::Hmi,
            parent_population: 20_000,
            child_population: 1_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub row: TestRow,
    pub theory: Theory,
    pub conditioning: Option<Theory>,
    pub alpha: f64,
    pub cutoff: f64,
    /// Random subjects the cutoff was calibrated on.
    pub population_size: usize,
    /// How many of them lie strictly above the cutoff.
    pub passing: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub config: CalibrationConfig,
    pub results: Vec<CalibrationResult>,
    /// Rows whose conditional population came out empty, and their descendants.
    #[serde(default)]
    pub skipped: Vec<SkippedRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedRow {
    pub row: TestRow,
    pub alpha: f64,
    pub reason: String,
}

impl Calibration {
    pub fn get(&self, row: TestRow, alpha: f64) -> Option<&CalibrationResult> {
        self.results
            .iter()
            .find(|r| r.row == row && r.alpha == alpha)
    }

    pub fn cutoff(&self, row: TestRow, alpha: f64) -> Option<f64> {
        self.get(row, alpha).map(|r| r.cutoff)
    }
}

fn par_map(ids: &[usize], f: impl Fn(usize) -> Result<f64> + Sync + Send) -> Result<Vec<f64>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        ids.par_iter().map(|&i| f(i)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        ids.iter().map(|&i| f(i)).collect()
    }
}

/// Index values of random subjects, computed on demand and cached by draw.
struct NullSample<'a> {
    exp: &'a Experiment,
    dist: &'a ChoiceDistribution,
    seed: u64,
    index: IndexKind,
    cache: [Vec<f64>; 4],
}

impl<'a> NullSample<'a> {
    fn slot(theory: Theory) -> usize {
        Theory::ALL.iter().position(|&t| t == theory).unwrap()
    }

    fn ensure(&mut self, theory: Theory, ids: &[usize]) -> Result<()> {
        let slot = Self::slot(theory);
        let missing: Vec<usize> = ids
            .iter()
            .copied()
            .filter(|&i| self.cache[slot][i].is_nan())
            .collect();
        let (exp, dist, seed, index) = (self.exp, self.dist, self.seed, self.index);
        let values = par_map(&missing, |i| {
            let s = SubjectChoices::new(String::new(), dist.sample_subject(seed, i as u64));
            index_value(exp, &s, theory, index)
        })?;
        for (i, v) in missing.into_iter().zip(values) {
            self.cache[slot][i] = v;
        }
        Ok(())
    }

    fn values(&self, theory: Theory, ids: &[usize]) -> Vec<f64> {
        let slot = Self::slot(theory);
        ids.iter().map(|&i| self.cache[slot][i]).collect()
    }
}

/// Cutoffs for every row of the pass-rate table at every level.
///
/// A row whose parent leaves no random subject above its cutoff cannot be
/// calibrated; it is listed in [`Calibration::skipped`] together with its
/// descendants instead of failing the whole run.
pub fn calibrate(exp: &Experiment, dist: &ChoiceDistribution, config: &CalibrationConfig) -> Result<Calibration> {
    if config.draws == 0 {
        return Err(Error::EmptySample);
    }
    if dist.num_menus() != exp.num_menus() {
        return Err(Error::Invalid(format!(
            "distribution has {} menus, experiment has {}",
            dist.num_menus(),
            exp.num_menus()
        )));
    }
    for &a in &config.alphas {
        check_alpha(a)?;
    }
    let mut null = NullSample {
        exp,
        dist,
        seed: config.seed,
        index: config.index,
        cache: std::array::from_fn(|_| vec![f64::NAN; config.draws]),
    };
    let everyone: Vec<usize> = (0..config.draws).collect();
    null.ensure(Theory::Lnu, &everyone)?;
    let mut results: Vec<CalibrationResult> = Vec::new();
    let mut skipped = Vec::new();
    for &alpha in &config.alphas {
        let mut populations: Vec<(TestRow, Vec<usize>)> = Vec::new();
        for row in TestRow::ALL {
            let ids = match row.parent() {
                None => everyone.clone(),
                Some(parent) => {
                    let Some((_, parent_ids)) = populations.iter().find(|(r, _)| *r == parent) else {
                        skipped.push(SkippedRow {
                            row,
                            alpha,
                            reason: format!("{parent} was not calibrated"),
                        });
                        continue;
                    };
                    let parent_cutoff = results
                        .iter()
                        .find(|r| r.row == parent && r.alpha == alpha)
                        .map(|r| r.cutoff)
                        .unwrap();
                    let parent_values = null.values(parent.theory(), parent_ids);
                    let cap = if parent == TestRow::Lnu {
                        config.parent_population
                    } else {
                        config.child_population
                    };
                    match conditional_population(&parent_values, parent.theory(), parent_cutoff, alpha) {
                        Ok(kept) => kept.into_iter().take(cap).map(|k| parent_ids[k]).collect(),
                        Err(e @ Error::EmptyConditional { .. }) => {
                            skipped.push(SkippedRow {
                                row,
                                alpha,
                                reason: e.to_string(),
                            });
                            continue;
                        }
                        Err(e) => return Err(e),
                    }
                }
            };
            null.ensure(row.theory(), &ids)?;
            let values = null.values(row.theory(), &ids);
            let cutoff = calibrate_cutoff(&values, alpha)?;
            results.push(CalibrationResult {
                row,
                theory: row.theory(),
                conditioning: row.parent().map(TestRow::theory),
                alpha,
                cutoff,
                population_size: ids.len(),
                passing: values.iter().filter(|&&v| v > cutoff).count(),
            });
            populations.push((row, ids));
        }
    }
    Ok(Calibration {
        config: config.clone(),
        results,
        skipped,
    })
}

/// One subject's index under every theory, in [`Theory::ALL`] order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubjectIndices {
    pub subject_id: String,
    pub values: [f64; 4],
}

impl SubjectIndices {
    pub fn value(&self, theory: Theory) -> f64 {
        self.values[NullSample::slot(theory)]
    }
}

pub fn subject_indices(exp: &Experiment, subjects: &[SubjectChoices], index: IndexKind) -> Result<Vec<SubjectIndices>> {
    subjects
        .iter()
        .map(|s| {
            let mut values = [0.0; 4];
            for (slot, &th) in Theory::ALL.iter().enumerate() {
                values[slot] = index_value(exp, s, th, index)?;
            }
            Ok(SubjectIndices {
                subject_id: s.subject_id.clone(),
                values,
            })
        })
        .collect()
}

/// Whether a subject rejects the random null for `row` and every ancestor row.
pub fn passes(subject: &SubjectIndices, row: TestRow, alpha: f64, calibration: &Calibration) -> Option<bool> {
    let own = subject.value(row.theory()) > calibration.cutoff(row, alpha)?;
    match row.parent() {
        None => Some(own),
        Some(parent) => Some(own && passes(subject, parent, alpha, calibration)?),
    }
}

/// One cell of the pass-rate table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassRateCell {
    pub row: TestRow,
    pub alpha: f64,
    pub cutoff: f64,
    /// Among subjects passing the parent row; empty when that group is empty.
    pub conditional: Vec<PassRateReport>,
    /// Among all subjects.
    pub unconditional: Vec<PassRateReport>,
}

/// Cells for every calibrated row; skipped rows are left out.
pub fn pass_rate_table(subjects: &[SubjectIndices], calibration: &Calibration) -> Result<Vec<PassRateCell>> {
    if subjects.is_empty() {
        return Err(Error::EmptyData("no subjects"));
    }
    let mut cells = Vec::new();
    for &alpha in &calibration.config.alphas {
        for row in TestRow::ALL {
            let Some(cutoff) = calibration.cutoff(row, alpha) else {
                continue;
            };
            let group: Vec<&SubjectIndices> = match row.parent() {
                None => subjects.iter().collect(),
                Some(parent) => subjects
                    .iter()
                    .filter(|s| passes(s, parent, alpha, calibration) == Some(true))
                    .collect(),
            };
            let n_pass = group
                .iter()
                .filter(|s| passes(s, row, alpha, calibration) == Some(true))
                .count();
            let reports = |total: usize| -> Result<Vec<PassRateReport>> {
                if total == 0 {
                    return Ok(Vec::new());
                }
                CiMethod::ALL
                    .into_iter()
                    .map(|m| pass_rate(n_pass, total, m))
                    .collect()
            };
            cells.push(PassRateCell {
                row,
                alpha,
                cutoff,
                conditional: reports(group.len())?,
                unconditional: reports(subjects.len())?,
            });
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{paper_like_design, simulate_population, AgentKind};

    fn round2(x: f64) -> f64 {
        (x * 100.0).round() / 100.0
    }

    #[test]
    fn cutoff_order_statistics() {
        assert_eq!(calibrate_cutoff(&[0.5; 7], 0.05).unwrap(), 0.5);
        let tenths: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
        assert_eq!(calibrate_cutoff(&tenths, 0.10).unwrap(), 0.9);
        assert_eq!(calibrate_cutoff(&tenths, 0.05).unwrap(), 1.0);
        assert_eq!(calibrate_cutoff(&tenths, 0.5).unwrap(), 0.5);
        assert!(matches!(calibrate_cutoff(&[], 0.1), Err(Error::EmptySample)));
        assert!(calibrate_cutoff(&tenths, 0.0).is_err());
        assert!(calibrate_cutoff(&tenths, 0.6).is_err());
    }

    #[test]
    fn clopper_pearson_boundaries() {
        let r = pass_rate(0, 20, CiMethod::ClopperPearson).unwrap();
        assert_eq!((r.rate, r.ci_low), (0.0, 0.0));
        assert!(r.ci_high > 0.0 && r.ci_high < 0.2);
        let r = pass_rate(20, 20, CiMethod::ClopperPearson).unwrap();
        assert_eq!(r.ci_high, 1.0);
        assert!(pass_rate(1, 0, CiMethod::Clt).is_err());
    }

    #[test]
    fn interval_reference_values() {
        // Reference quantiles from an independent Beta implementation.
        let cases = [
            (50, 65, 0.6481033437, 0.8647062868),
            (43, 50, 0.7326039975, 0.9418082997),
            (24, 41, 0.4210961427, 0.7368320053),
        ];
        for (x, n, lo, hi) in cases {
            let (a, b) = clopper_pearson(x, n);
            assert!((a - lo).abs() < 1e-8 && (b - hi).abs() < 1e-8, "{x}/{n}: {a} {b}");
        }
        let clt = clt_interval(50, 65);
        assert_eq!((round2(clt.0), round2(clt.1)), (0.67, 0.87));
        let clt = clt_interval(43, 50);
        assert_eq!((round2(clt.0), round2(clt.1)), (0.76, 0.96));
    }

    #[test]
    fn conditional_filter() {
        let v = [0.0, 0.3, 0.7, 1.0];
        assert_eq!(conditional_population(&v, Theory::Lnu, 0.0, 0.05).unwrap(), vec![1, 2, 3]);
        assert!(matches!(
            conditional_population(&v, Theory::Lnu, 1.0, 0.05),
            Err(Error::EmptyConditional { .. })
        ));
    }

    #[test]
    fn empirical_distribution_frequencies() {
        let exp = paper_like_design(2, false, 0).unwrap();
        let subjects = vec![
            SubjectChoices::new("a", vec![3, 1]),
            SubjectChoices::new("b", vec![3, 2]),
        ];
        let dist = empirical_choice_distribution(&subjects, &exp).unwrap();
        let mut point = vec![0.0; 10];
        point[3] = 1.0;
        assert_eq!(dist.probs()[0], point);
        assert_eq!(&dist.probs()[1][..3], &[0.0, 0.5, 0.5]);
        for s in generate_random_subjects(&dist, 50, 1) {
            assert_eq!(s.choices[0], 3);
        }
        assert!(empirical_choice_distribution(&[], &exp).is_err());
    }

    #[test]
    fn random_subjects_are_reproducible() {
        let exp = paper_like_design(20, false, 3).unwrap();
        let pop: Vec<_> = simulate_population(&exp, 65, AgentKind::Quasilinear, 0.4, 2)
            .unwrap()
            .into_iter()
            .map(|s| s.choices)
            .collect();
        let dist = empirical_choice_distribution(&pop, &exp).unwrap();
        for row in dist.probs() {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert_eq!(generate_random_subjects(&dist, 10, 5), generate_random_subjects(&dist, 10, 5));
        assert_ne!(generate_random_subjects(&dist, 10, 5), generate_random_subjects(&dist, 10, 6));
    }

    #[test]
    fn small_calibration_is_consistent() {
        let exp = paper_like_design(20, false, 3).unwrap();
        let pop: Vec<_> = simulate_population(&exp, 65, AgentKind::Quasilinear, 0.4, 2)
            .unwrap()
            .into_iter()
            .map(|s| s.choices)
            .collect();
        let dist = empirical_choice_distribution(&pop, &exp).unwrap();
        let config = CalibrationConfig {
            draws: 4000,
            seed: 17,
            alphas: vec![0.10, 0.05],
            parent_population: 400,
            child_population: 100,
            ..CalibrationConfig::default()
        };
        let cal = calibrate(&exp, &dist, &config).unwrap();
        assert_eq!(cal.results.len() + cal.skipped.len(), 10);
        let lnu: Vec<f64> = config.alphas.iter().map(|&a| cal.cutoff(TestRow::Lnu, a).unwrap()).collect();
        assert!(lnu[0] <= lnu[1]);
        for r in &cal.results {
            assert!((0.05..=1.0).contains(&r.cutoff));
            if let Some(parent) = r.row.parent() {
                let p = cal.get(parent, r.alpha).unwrap();
                let cap = if parent == TestRow::Lnu { 400 } else { 100 };
                assert_eq!(r.population_size, p.passing.min(cap));
            }
        }
        for s in &cal.skipped {
            assert!(cal.get(s.row, s.alpha).is_none());
            for row in TestRow::ALL {
                if row.parent() == Some(s.row) {
                    assert!(cal.skipped.iter().any(|k| k.row == row && k.alpha == s.alpha));
                }
            }
        }
        assert_eq!(calibrate(&exp, &dist, &config).unwrap(), cal);

        let subjects = subject_indices(&exp, &pop, IndexKind::Hmi).unwrap();
        let table = pass_rate_table(&subjects, &cal).unwrap();
        assert_eq!(table.len(), cal.results.len());
        for cell in &table {
            assert_eq!(cell.unconditional.len(), 2);
            if let Some(r) = cell.conditional.first() {
                assert!(r.ci_low <= r.rate && r.rate <= r.ci_high);
                assert_eq!(r.passes, cell.unconditional[0].passes);
            }
        }
    }
}
