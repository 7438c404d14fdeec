//! Synthetic agents and designs with known ground truth.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Budget, Contract, Experiment, Money, SubjectChoices};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AgentKind {
    Quasilinear,
    ConcaveQuasilinear,
    Nonseparable,
}

impl std::str::FromStr for AgentKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "quasilinear" | "ql" => Ok(AgentKind::Quasilinear),
            "concave-quasilinear" | "cql" => Ok(AgentKind::ConcaveQuasilinear),
            "nonseparable" => Ok(AgentKind::Nonseparable),
            _ => Err(format!(
                "unknown agent kind {s:?} (expected quasilinear, concave-quasilinear or nonseparable)"
            )),
        }
    }
}

/// Utility over (good, money), tabulated on the experiment grid. Values are in cents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Preferences {
    /// `u(g) + m`.
    Quasilinear { u: Vec<i64> },
    /// `u(g) + m` with nonincreasing increments of `u`.
    ConcaveQuasilinear { u: Vec<i64> },
    /// `v[g][b]` where `b` counts the bracket thresholds at or below `m`.
    Nonseparable { brackets: Vec<Money>, v: Vec<Vec<i64>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub preferences: Preferences,
    /// Probability of a uniform draw instead of the optimal contract.
    pub tremble: f64,
}

impl AgentSpec {
    pub fn new(preferences: Preferences, tremble: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&tremble) {
            return Err(Error::Invalid(format!("tremble {tremble} outside [0, 1]")));
        }
        if let Preferences::ConcaveQuasilinear { u } = &preferences {
            let concave = u.windows(3).all(|w| w[2] - w[1] <= w[1] - w[0]);
            if !concave {
                return Err(Error::Invalid("subutility increments must be nonincreasing".into()));
            }
        }
        if let Preferences::Nonseparable { brackets, v } = &preferences {
            if v.iter().any(|row| row.len() != brackets.len() + 1) {
                return Err(Error::Invalid(format!(
                    "nonseparable table needs {} columns per grid point",
                    brackets.len() + 1
                )));
            }
        }
        Ok(AgentSpec {
            preferences,
            tremble,
        })
    }

    pub fn kind(&self) -> AgentKind {
        match self.preferences {
            Preferences::Quasilinear { .. } => AgentKind::Quasilinear,
            Preferences::ConcaveQuasilinear { .. } => AgentKind::ConcaveQuasilinear,
            Preferences::Nonseparable { .. } => AgentKind::Nonseparable,
        }
    }

    fn grid_len(&self) -> usize {
        match &self.preferences {
            Preferences::Quasilinear { u } | Preferences::ConcaveQuasilinear { u } => u.len(),
            Preferences::Nonseparable { v, .. } => v.len(),
        }
    }

    fn utility(&self, j: usize, money: Money) -> i64 {
        match &self.preferences {
            Preferences::Quasilinear { u } | Preferences::ConcaveQuasilinear { u } => {
                u[j] + money.cents()
            }
            Preferences::Nonseparable { brackets, v } => {
                let b = brackets.iter().filter(|&&t| t <= money).count();
                v[j][b]
            }
        }
    }

    /// Utility-maximizing grid index on a budget, lowest index on ties.
    pub fn best_choice(&self, budget: &Budget) -> usize {
        let mut best = (i64::MIN, 0);
        for (j, &m) in budget.frontier().iter().enumerate() {
            let v = self.utility(j, m);
            if v > best.0 {
                best = (v, j);
            }
        }
        best.1
    }

    /// A random agent of `kind` for a grid of `len` points.
    pub fn random(kind: AgentKind, len: usize, tremble: f64, rng: &mut impl Rng) -> Result<Self> {
        let prefs = match kind {
            AgentKind::Quasilinear => Preferences::Quasilinear {
                u: random_subutility(len, rng),
            },
            AgentKind::ConcaveQuasilinear => Preferences::ConcaveQuasilinear {
                u: random_concave_subutility(len, rng),
            },
            AgentKind::Nonseparable => {
                let brackets: Vec<Money> = {
                    let mut b: Vec<i64> = (0..3).map(|_| rng.gen_range(300..2700)).collect();
                    b.sort_unstable();
                    b.into_iter().map(Money::from_cents).collect()
                };
                let v = (0..len)
                    .map(|_| (0..=brackets.len()).map(|_| rng.gen_range(0..1000)).collect())
                    .collect();
                Preferences::Nonseparable { brackets, v }
            }
        };
        AgentSpec::new(prefs, tremble)
    }
}

/// Increasing subutility with arbitrary increments.
pub fn random_subutility(len: usize, rng: &mut impl Rng) -> Vec<i64> {
    let mut u = Vec::with_capacity(len);
    let mut acc = 0;
    for j in 0..len {
        if j > 0 {
            acc += rng.gen_range(20..600);
        }
        u.push(acc);
    }
    u
}

/// Increasing subutility with nonincreasing increments.
pub fn random_concave_subutility(len: usize, rng: &mut impl Rng) -> Vec<i64> {
    let mut steps: Vec<i64> = (1..len).map(|_| rng.gen_range(20..600)).collect();
    steps.sort_unstable_by(|a, b| b.cmp(a));
    let mut u = vec![0];
    for s in steps {
        u.push(u.last().unwrap() + s);
    }
    u.truncate(len);
    u
}

/// Choices of one agent: per menu, the optimum with probability `1 - tremble`,
/// otherwise a uniform grid point. Each menu consumes the same random draws
/// whatever the tremble, so runs with equal seeds are paired.
pub fn simulate_choices(agent: &AgentSpec, exp: &Experiment, seed: u64) -> Result<SubjectChoices> {
    if agent.grid_len() != exp.grid_len() {
        return Err(Error::GridMismatch(format!(
            "subutility has {} points, experiment grid has {}",
            agent.grid_len(),
            exp.grid_len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let choices = exp
        .budgets()
        .iter()
        .map(|b| {
            let u: f64 = rng.gen();
            let uniform = rng.gen_range(0..b.len());
            if u < agent.tremble {
                uniform
            } else {
                agent.best_choice(b)
            }
        })
        .collect();
    Ok(SubjectChoices::new(format!("sim-{seed}"), choices))
}

/// Ground truth for one simulated subject.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulatedSubject {
    pub agent: AgentSpec,
    pub seed: u64,
    pub choices: SubjectChoices,
}

/// `n` random agents of one kind; agent `i` draws from stream `i` of `seed`.
pub fn simulate_population(
    exp: &Experiment,
    n: usize,
    kind: AgentKind,
    tremble: f64,
    seed: u64,
) -> Result<Vec<SimulatedSubject>> {
    (0..n)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let agent = AgentSpec::random(kind, exp.grid_len(), tremble, &mut rng)?;
            let choice_seed = rng.gen();
            let mut choices = simulate_choices(&agent, exp, choice_seed)?;
            choices.subject_id = format!("s{:03}", i + 1);
            Ok(SimulatedSubject {
                agent,
                seed: choice_seed,
                choices,
            })
        })
        .collect()
}

/// Curvature of generated wage schedules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MenuShape {
    Linear,
    Concave,
    Convex,
}

/// A menu of contracts for 1..=tasks tasks with wages from about `lo` to `hi`
/// dollars, with the given curvature in tasks (and therefore in the good).
pub fn generate_menu(tasks: u32, lo: Money, hi: Money, shape: MenuShape, rng: &mut impl Rng) -> Vec<Contract> {
    let n = tasks as usize;
    let span = (hi.cents() - lo.cents()).max(n as i64);
    let steps = n.saturating_sub(1);
    let mut inc: Vec<i64> = match shape {
        MenuShape::Linear => vec![span / steps.max(1) as i64; steps],
        MenuShape::Concave | MenuShape::Convex => {
            let p: f64 = match shape {
                MenuShape::Concave => rng.gen_range(0.4..0.8),
                _ => rng.gen_range(1.3..2.0),
            };
            (1..=steps)
                .map(|i| {
                    let f = |x: f64| (x / steps as f64).powf(p);
                    ((f(i as f64) - f(i as f64 - 1.0)) * span as f64).round().max(1.0) as i64
                })
                .collect()
        }
    };
    match shape {
        MenuShape::Concave => inc.sort_unstable_by(|a, b| b.cmp(a)),
        MenuShape::Convex => inc.sort_unstable(),
        MenuShape::Linear => {}
    }
    let mut wage = lo.cents();
    let mut menu = vec![Contract::new(1, lo)];
    for (i, d) in inc.into_iter().enumerate() {
        wage += d;
        menu.push(Contract::new(i as u32 + 2, Money::from_cents(wage)));
    }
    menu
}

/// A design shaped like the labor-supply experiment: `menus` menus of
/// contracts for 1..=10 tasks, minimal wages near $3 and maximal near $27.
/// With `concave_only` every menu is concave; otherwise shapes rotate through
/// linear, concave and convex.
pub fn paper_like_design(menus: usize, concave_only: bool, seed: u64) -> Result<Experiment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = (0..menus)
        .map(|i| {
            let shape = if concave_only {
                MenuShape::Concave
            } else {
                [MenuShape::Linear, MenuShape::Concave, MenuShape::Convex][i % 3]
            };
            let lo = Money::from_cents(rng.gen_range(300..600));
            let hi = Money::from_cents(rng.gen_range(1800..2700));
            (format!("m{:02}", i + 1), generate_menu(10, lo, hi, shape, &mut rng))
        })
        .collect();
    Experiment::from_menus(raw)
}

/// Two budgets on goods {1, 2} (K = 3): B1 = {10, 4} with g = 1 chosen,
/// B2 = {17, 9} with g = 2 chosen. GARP holds but the cycle through both
/// observations has weight (10 - 4) + (9 - 17) = -2.
pub fn make_figure2_instance() -> (Experiment, SubjectChoices) {
    let d = Money::dollars;
    let exp = Experiment::new(
        vec![
            Budget::new("B1", vec![1, 2], vec![d(10), d(4)]).expect("valid budget"),
            Budget::new("B2", vec![1, 2], vec![d(17), d(9)]).expect("valid budget"),
        ],
        3,
    )
    .expect("valid experiment");
    (exp, SubjectChoices::new("figure2", vec![0, 1]))
}
