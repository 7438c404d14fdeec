//! Browser bindings: a frontier explorer, per-subject tests, and the random
//! chooser HMI distribution. Inputs are the CSV texts of the command-line
//! tool; every call returns a JSON string.

use qlrev::io::{parse_choices, parse_experiment};
use qlrev::mc::{calibrate_cutoff, empirical_choice_distribution, generate_random_subjects};
use qlrev::{check, hmi, Experiment, Theory};
use serde::Serialize;
use wasm_bindgen::prelude::*;

type Result<T> = std::result::Result<T, String>;

#[derive(Serialize)]
struct Point {
    g: i64,
    tasks: u32,
    wage: f64,
    /// Value of the tangent line anchored at this point, at every grid point.
    tangent: Vec<f64>,
    slope: f64,
}

#[derive(Serialize)]
struct Frontier {
    menu_id: String,
    k: u32,
    concave: bool,
    points: Vec<Point>,
}

fn to_json(v: &impl Serialize) -> Result<String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

fn experiment(menus_csv: &str) -> Result<Experiment> {
    parse_experiment(menus_csv).map_err(|e| e.to_string())
}

pub fn frontiers_json(menus_csv: &str) -> Result<String> {
    let exp = experiment(menus_csv)?;
    let frontiers = exp
        .budgets()
        .iter()
        .map(|b| {
            let points = (0..b.len())
                .map(|i| {
                    let line = b.linearize_at(i).map_err(|e| e.to_string())?;
                    Ok(Point {
                        g: b.grid()[i],
                        tasks: exp.tasks_of_good(b.grid()[i]),
                        wage: b.value_at(i).as_dollars(),
                        tangent: b.grid().iter().map(|&g| line.eval(g as f64)).collect(),
                        slope: line.gradient.as_dollars(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Frontier {
                menu_id: b.menu_id().to_string(),
                k: exp.k(),
                concave: b.is_concave(),
                points,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    to_json(&frontiers)
}

#[derive(Serialize)]
struct TheoryOutcome {
    theory: Theory,
    pass: bool,
    witness: Vec<String>,
    hmi: f64,
    excluded: Vec<String>,
}

#[derive(Serialize)]
struct SubjectOutcome {
    subject_id: String,
    theories: Vec<TheoryOutcome>,
}

pub fn test_subjects_json(menus_csv: &str, choices_csv: &str) -> Result<String> {
    let exp = experiment(menus_csv)?;
    let subjects = parse_choices(choices_csv, &exp).map_err(|e| e.to_string())?;
    let ids = |v: &[usize]| v.iter().map(|&t| exp.budget(t).menu_id().to_string()).collect::<Vec<_>>();
    let out = subjects
        .iter()
        .map(|s| {
            let theories = Theory::ALL
                .iter()
                .map(|&th| {
                    let r = check(&exp, s, th).map_err(|e| e.to_string())?;
                    let h = hmi(&exp, s, th).map_err(|e| e.to_string())?;
                    Ok(TheoryOutcome {
                        theory: th,
                        pass: r.pass,
                        witness: ids(&r.witness),
                        hmi: h.kept_fraction,
                        excluded: ids(&h.excluded),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SubjectOutcome {
                subject_id: s.subject_id.clone(),
                theories,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    to_json(&out)
}

#[derive(Serialize)]
struct NullDistribution {
    theory: Theory,
    draws: usize,
    /// `counts[k]` random subjects keep exactly `k` menus.
    counts: Vec<usize>,
    cutoffs: Vec<(f64, f64)>,
}

/// HMI of `draws` random choosers that follow the subjects' per-menu choice frequencies.
pub fn null_hmi_json(menus_csv: &str, choices_csv: &str, theory: &str, draws: usize, seed: u64) -> Result<String> {
    let exp = experiment(menus_csv)?;
    let theory: Theory = theory.parse()?;
    let subjects = parse_choices(choices_csv, &exp).map_err(|e| e.to_string())?;
    let dist = empirical_choice_distribution(&subjects, &exp).map_err(|e| e.to_string())?;
    let mut counts = vec![0; exp.num_menus() + 1];
    let mut values = Vec::with_capacity(draws);
    for s in generate_random_subjects(&dist, draws, seed) {
        let h = hmi(&exp, &s, theory).map_err(|e| e.to_string())?;
        counts[h.kept] += 1;
        values.push(h.kept_fraction);
    }
    let cutoffs = [0.10, 0.05, 0.01]
        .into_iter()
        .map(|a| calibrate_cutoff(&values, a).map(|c| (a, c)).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>>>()?;
    to_json(&NullDistribution {
        theory,
        draws,
        counts,
        cutoffs,
    })
}

#[wasm_bindgen]
pub fn frontiers(menus_csv: &str) -> std::result::Result<String, JsValue> {
    frontiers_json(menus_csv).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn test_subjects(menus_csv: &str, choices_csv: &str) -> std::result::Result<String, JsValue> {
    test_subjects_json(menus_csv, choices_csv).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn null_hmi(
    menus_csv: &str,
    choices_csv: &str,
    theory: &str,
    draws: u32,
    seed: u32,
) -> std::result::Result<String, JsValue> {
    null_hmi_json(menus_csv, choices_csv, theory, draws as usize, seed as u64).map_err(|e| JsValue::from_str(&e))
}
