//! Experiments, budgets and choices.
//!
//! Raw menus list contracts `(tasks, wage)`. The engine works in the reflected
//! orientation where the good is `g = K - tasks` and the frontier `mu(g)` is the
//! wage paid for `K - g` tasks, so `mu` is strictly decreasing in `g`.
//!
//! Money is held as integer cents so that every comparison made by the exact
//! tests is free of rounding.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for floating comparisons (dollars).
pub const FLOAT_TOL: f64 = 1e-9;

/// An amount of money in integer cents.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Money(i64);

impl Money {
    pub const ZERO: Money = Money(0);

    pub const fn from_cents(cents: i64) -> Self {
        Money(cents)
    }

    pub const fn dollars(whole: i64) -> Self {
        Money(whole * 100)
    }

    pub const fn cents(self) -> i64 {
        self.0
    }

    pub fn as_dollars(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, rhs: Money) -> Money {
        Money(self.0 - rhs.0)
    }
}

impl Neg for Money {
    type Output = Money;
    fn neg(self) -> Money {
        Money(-self.0)
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:02}", abs / 100, abs % 100)
    }
}

impl FromStr for Money {
    type Err = String;

    /// Parses a decimal amount with at most two fractional digits.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (whole, frac) = match body.split_once('.') {
            Some((w, f)) => (w, f),
            None => (body, ""),
        };
        if whole.is_empty() && frac.is_empty() {
            return Err(format!("invalid amount {s:?}"));
        }
        if frac.len() > 2 {
            return Err(format!("amount {s:?} has more than two decimals"));
        }
        let digits = |part: &str| part.bytes().all(|b| b.is_ascii_digit());
        if !digits(whole) || !digits(frac) {
            return Err(format!("invalid amount {s:?}"));
        }
        let whole: i64 = if whole.is_empty() {
            0
        } else {
            whole.parse().map_err(|_| format!("amount {s:?} out of range"))?
        };
        let mut frac_cents: i64 = if frac.is_empty() { 0 } else { frac.parse().unwrap() };
        if frac.len() == 1 {
            frac_cents *= 10;
        }
        let cents = whole
            .checked_mul(100)
            .and_then(|c| c.checked_add(frac_cents))
            .ok_or_else(|| format!("amount {s:?} out of range"))?;
        Ok(Money(if neg { -cents } else { cents }))
    }
}

/// One menu entry: complete `tasks` tasks for `wage`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contract {
    pub tasks: u32,
    pub wage: Money,
}

impl Contract {
    pub fn new(tasks: u32, wage: Money) -> Self {
        Contract { tasks, wage }
    }
}

/// An exact slope, `rise` cents per `run` units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slope {
    rise: i64,
    run: i64,
}

impl Slope {
    pub fn new(rise: i64, run: i64) -> Self {
        assert!(run != 0, "slope with zero run");
        let (rise, run) = if run < 0 { (-rise, -run) } else { (rise, run) };
        let g = gcd(rise.unsigned_abs(), run as u64) as i64;
        Slope {
            rise: rise / g,
            run: run / g,
        }
    }

    pub fn rise(self) -> i64 {
        self.rise
    }

    pub fn run(self) -> i64 {
        self.run
    }

    /// Dollars per unit.
    pub fn as_dollars(self) -> f64 {
        self.rise as f64 / self.run as f64 / 100.0
    }

    pub fn is_negative(self) -> bool {
        self.rise < 0
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

pub(crate) fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a.unsigned_abs(), b.unsigned_abs()) as i64 * b
}

fn exact_grid_point(g: f64) -> Option<i64> {
    if g.is_finite() && g.fract() == 0.0 && g.abs() < 9.0e15 {
        Some(g as i64)
    } else {
        None
    }
}

/// One menu's frontier in the reflected orientation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    menu_id: String,
    grid: Vec<i64>,
    frontier: Vec<Money>,
}

impl Budget {
    /// Builds a budget from a strictly increasing grid and a strictly decreasing frontier.
    pub fn new(menu_id: impl Into<String>, grid: Vec<i64>, frontier: Vec<Money>) -> Result<Self> {
        let menu_id = menu_id.into();
        if grid.is_empty() {
            return Err(Error::Invalid(format!("menu {menu_id} is empty")));
        }
        if grid.len() != frontier.len() {
            return Err(Error::Invalid(format!(
                "menu {menu_id}: {} grid points but {} frontier values",
                grid.len(),
                frontier.len()
            )));
        }
        for w in grid.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateTasks {
                    menu_id,
                    value: w[0],
                });
            }
            if w[0] > w[1] {
                return Err(Error::Invalid(format!(
                    "menu {menu_id}: grid must be sorted increasing"
                )));
            }
        }
        if frontier.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::NonMonotoneFrontier { menu_id });
        }
        Ok(Budget {
            menu_id,
            grid,
            frontier,
        })
    }

    pub fn menu_id(&self) -> &str {
        &self.menu_id
    }

    pub fn grid(&self) -> &[i64] {
        &self.grid
    }

    pub fn frontier(&self) -> &[Money] {
        &self.frontier
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn index_of(&self, g: i64) -> Option<usize> {
        self.grid.binary_search(&g).ok()
    }

    pub fn value_at(&self, idx: usize) -> Money {
        self.frontier[idx]
    }

    /// Converts back to raw contracts, ordered by tasks.
    pub fn to_contracts(&self, k: u32) -> Vec<Contract> {
        let mut out: Vec<Contract> = self
            .grid
            .iter()
            .zip(&self.frontier)
            .map(|(&g, &w)| Contract::new((k as i64 - g) as u32, w))
            .collect();
        out.sort_by_key(|c| c.tasks);
        out
    }

    /// `mu(g)` at a grid point.
    pub fn frontier_value(&self, g: f64) -> Result<Money> {
        exact_grid_point(g)
            .and_then(|g| self.index_of(g))
            .map(|i| self.frontier[i])
            .ok_or_else(|| Error::OffGrid(format!("g={g} in menu {}", self.menu_id)))
    }

    /// Piecewise-linear frontier in dollars, continued left of the grid along the
    /// first segment.
    pub fn frontier_interp(&self, g: f64) -> Result<f64> {
        let last = *self.grid.last().unwrap();
        if !(g.is_finite()) || g < 0.0 || g > last as f64 {
            return Err(Error::OutOfRange(g));
        }
        if let Some(i) = exact_grid_point(g).and_then(|gi| self.index_of(gi)) {
            return Ok(self.frontier[i].as_dollars());
        }
        if self.grid.len() < 2 {
            return Err(Error::DegenerateBudget {
                menu_id: self.menu_id.clone(),
            });
        }
        // segment [i, i + 1] containing g; i = 0 also covers the left extension
        let i = match self.grid.iter().position(|&x| (x as f64) > g) {
            Some(0) | None => 0,
            Some(p) => p - 1,
        };
        let (g0, g1) = (self.grid[i] as f64, self.grid[i + 1] as f64);
        let (m0, m1) = (
            self.frontier[i].as_dollars(),
            self.frontier[i + 1].as_dollars(),
        );
        Ok(m0 + (m1 - m0) * (g - g0) / (g1 - g0))
    }

    /// Supporting slope used to linearize the frontier at grid index `idx`.
    ///
    /// This is the reflected counterpart of the marginal price: the wage step to
    /// the next task (one grid step left in `g`), except at the largest task count
    /// (smallest `g`) where the step from the previous task is used.
    pub fn slope_at(&self, idx: usize) -> Result<Slope> {
        if self.grid.len() < 2 {
            return Err(Error::DegenerateBudget {
                menu_id: self.menu_id.clone(),
            });
        }
        let (a, b) = if idx == 0 { (0, 1) } else { (idx - 1, idx) };
        Ok(Slope::new(
            self.frontier[b].cents() - self.frontier[a].cents(),
            self.grid[b] - self.grid[a],
        ))
    }

    pub fn linearize(&self, chosen_g: f64) -> Result<LinearizedBudget> {
        let idx = exact_grid_point(chosen_g)
            .and_then(|g| self.index_of(g))
            .ok_or_else(|| Error::OffGrid(format!("g={chosen_g} in menu {}", self.menu_id)))?;
        self.linearize_at(idx)
    }

    pub fn linearize_at(&self, idx: usize) -> Result<LinearizedBudget> {
        let gradient = self.slope_at(idx)?;
        Ok(LinearizedBudget {
            menu_id: self.menu_id.clone(),
            anchor: self.grid[idx],
            gradient,
            intercept: self.frontier[idx],
        })
    }

    /// True when the successive slopes of the frontier are nonincreasing.
    pub fn is_concave(&self) -> bool {
        self.grid.windows(3).zip(self.frontier.windows(3)).all(|(g, m)| {
            let (d0, d1) = (g[1] - g[0], g[2] - g[1]);
            let (r0, r1) = (
                m[1].cents() - m[0].cents(),
                m[2].cents() - m[1].cents(),
            );
            // r1 / d1 <= r0 / d0
            (r1 as i128) * (d0 as i128) <= (r0 as i128) * (d1 as i128)
        })
    }

    /// Largest denominator needed to express linearized values exactly.
    pub(crate) fn gap_lcm(&self) -> i64 {
        self.grid
            .windows(2)
            .fold(1, |acc, w| lcm(acc, w[1] - w[0]))
    }
}

/// Reflects a raw menu into a [`Budget`] over the good `K - tasks`.
pub fn reflect_budget(menu_id: impl Into<String>, menu: &[Contract], k: u32) -> Result<Budget> {
    let menu_id = menu_id.into();
    if menu.is_empty() {
        return Err(Error::Invalid(format!("menu {menu_id} is empty")));
    }
    let mut sorted = menu.to_vec();
    sorted.sort_by_key(|c| c.tasks);
    for w in sorted.windows(2) {
        if w[0].tasks == w[1].tasks {
            return Err(Error::DuplicateTasks {
                menu_id,
                value: w[0].tasks as i64,
            });
        }
    }
    if let Some(c) = sorted.iter().find(|c| c.tasks == 0) {
        return Err(Error::Invalid(format!(
            "menu {menu_id}: contract with {} tasks",
            c.tasks
        )));
    }
    let max_tasks = sorted.last().unwrap().tasks;
    if k < max_tasks {
        return Err(Error::Invalid(format!(
            "menu {menu_id}: K={k} below maximal tasks {max_tasks}"
        )));
    }
    if sorted.windows(2).any(|w| w[1].wage <= w[0].wage) {
        return Err(Error::NonMonotoneFrontier { menu_id });
    }
    // ascending g is descending tasks
    let grid = sorted.iter().rev().map(|c| (k - c.tasks) as i64).collect();
    let frontier = sorted.iter().rev().map(|c| c.wage).collect();
    Budget::new(menu_id, grid, frontier)
}

/// Marginal price (money per task) of a raw menu at `tasks`: the wage step to
/// `tasks + 1`, or from `tasks - 1` at the largest task count.
pub fn marginal_price(menu: &[Contract], tasks: u32) -> Result<Slope> {
    let mut sorted = menu.to_vec();
    sorted.sort_by_key(|c| c.tasks);
    let idx = sorted
        .iter()
        .position(|c| c.tasks == tasks)
        .ok_or_else(|| Error::OffGrid(format!("{tasks} tasks")))?;
    if sorted.len() < 2 {
        return Err(Error::DegenerateBudget {
            menu_id: String::new(),
        });
    }
    let (a, b) = if idx + 1 < sorted.len() {
        (idx, idx + 1)
    } else {
        (idx - 1, idx)
    };
    Ok(Slope::new(
        sorted[b].wage.cents() - sorted[a].wage.cents(),
        sorted[b].tasks as i64 - sorted[a].tasks as i64,
    ))
}

/// The tangent line `mu(x^t) + slope * (g - x^t)` of a budget at a chosen point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearizedBudget {
    pub menu_id: String,
    pub anchor: i64,
    pub gradient: Slope,
    pub intercept: Money,
}

impl LinearizedBudget {
    /// Value in dollars at any real `g`.
    pub fn eval(&self, g: f64) -> f64 {
        self.intercept.as_dollars() + self.gradient.as_dollars() * (g - self.anchor as f64)
    }

    /// Exact value at integer `g`, in cents multiplied by `scale`.
    /// `scale` must be a multiple of the gradient's run.
    pub fn eval_scaled(&self, g: i64, scale: i64) -> i64 {
        debug_assert_eq!(scale % self.gradient.run(), 0);
        self.intercept.cents() * scale
            + self.gradient.rise() * (scale / self.gradient.run()) * (g - self.anchor)
    }
}

/// A collection of menus over a common grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Experiment {
    budgets: Vec<Budget>,
    k: u32,
    task_grid: Vec<u32>,
}

impl Experiment {
    pub fn new(budgets: Vec<Budget>, k: u32) -> Result<Self> {
        let first = budgets
            .first()
            .ok_or(Error::EmptyData("experiment without menus"))?;
        let grid = first.grid().to_vec();
        if grid[0] < 0 || *grid.last().unwrap() >= k as i64 {
            return Err(Error::Invalid(format!(
                "grid {grid:?} does not correspond to task counts 1..={k}"
            )));
        }
        for b in &budgets[1..] {
            if b.grid() != grid.as_slice() {
                return Err(Error::GridMismatch(format!(
                    "menu {} grid {:?} differs from menu {} grid {:?}",
                    b.menu_id(),
                    b.grid(),
                    first.menu_id(),
                    grid
                )));
            }
        }
        let mut ids: Vec<&str> = budgets.iter().map(|b| b.menu_id()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Invalid(format!("duplicate menu id {}", w[0])));
        }
        let mut task_grid: Vec<u32> = grid.iter().map(|&g| (k as i64 - g) as u32).collect();
        task_grid.sort_unstable();
        Ok(Experiment {
            budgets,
            k,
            task_grid,
        })
    }

    /// Builds an experiment from raw menus with `K` set to the largest task count.
    pub fn from_menus<S: Into<String>>(menus: Vec<(S, Vec<Contract>)>) -> Result<Self> {
        let k = menus
            .iter()
            .flat_map(|(_, m)| m.iter().map(|c| c.tasks))
            .max()
            .ok_or(Error::EmptyData("experiment without menus"))?;
        let budgets = menus
            .into_iter()
            .map(|(id, m)| reflect_budget(id, &m, k))
            .collect::<Result<Vec<_>>>()?;
        Experiment::new(budgets, k)
    }

    pub fn budgets(&self) -> &[Budget] {
        &self.budgets
    }

    pub fn budget(&self, t: usize) -> &Budget {
        &self.budgets[t]
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn task_grid(&self) -> &[u32] {
        &self.task_grid
    }

    pub fn grid(&self) -> &[i64] {
        self.budgets[0].grid()
    }

    pub fn num_menus(&self) -> usize {
        self.budgets.len()
    }

    pub fn grid_len(&self) -> usize {
        self.grid().len()
    }

    pub fn menu_index(&self, menu_id: &str) -> Option<usize> {
        self.budgets.iter().position(|b| b.menu_id() == menu_id)
    }

    pub fn good_of_tasks(&self, tasks: u32) -> i64 {
        self.k as i64 - tasks as i64
    }

    pub fn tasks_of_good(&self, g: i64) -> u32 {
        (self.k as i64 - g) as u32
    }

    pub fn is_concave(&self) -> bool {
        self.budgets.iter().all(Budget::is_concave)
    }

    /// Common denominator making every linearized grid value an integer.
    pub fn linear_scale(&self) -> i64 {
        self.budgets[0].gap_lcm()
    }

    /// Keeps only the menus at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Experiment> {
        Experiment::new(
            indices.iter().map(|&i| self.budgets[i].clone()).collect(),
            self.k,
        )
    }
}

/// One subject's chosen grid index in every menu.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubjectChoices {
    pub subject_id: String,
    pub choices: Vec<usize>,
}

impl SubjectChoices {
    pub fn new(subject_id: impl Into<String>, choices: Vec<usize>) -> Self {
        SubjectChoices {
            subject_id: subject_id.into(),
            choices,
        }
    }

    /// From chosen goods `g` (reflected quantities).
    pub fn from_goods(exp: &Experiment, subject_id: impl Into<String>, goods: &[i64]) -> Result<Self> {
        let choices = goods
            .iter()
            .map(|&g| {
                exp.budget(0)
                    .index_of(g)
                    .ok_or_else(|| Error::OffGrid(format!("g={g}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let s = SubjectChoices::new(subject_id, choices);
        s.validate(exp)?;
        Ok(s)
    }

    /// From chosen task counts.
    pub fn from_tasks(exp: &Experiment, subject_id: impl Into<String>, tasks: &[u32]) -> Result<Self> {
        let goods: Vec<i64> = tasks.iter().map(|&x| exp.good_of_tasks(x)).collect();
        SubjectChoices::from_goods(exp, subject_id, &goods)
    }

    pub fn validate(&self, exp: &Experiment) -> Result<()> {
        if self.choices.len() != exp.num_menus() {
            return Err(Error::Invalid(format!(
                "subject {} has {} choices for {} menus",
                self.subject_id,
                self.choices.len(),
                exp.num_menus()
            )));
        }
        if let Some(&bad) = self.choices.iter().find(|&&c| c >= exp.grid_len()) {
            return Err(Error::OffGrid(format!("grid index {bad}")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }

    pub fn chosen_good(&self, exp: &Experiment, t: usize) -> i64 {
        exp.grid()[self.choices[t]]
    }

    pub fn chosen_money(&self, exp: &Experiment, t: usize) -> Money {
        exp.budget(t).value_at(self.choices[t])
    }

    pub fn tasks(&self, exp: &Experiment) -> Vec<u32> {
        (0..self.choices.len())
            .map(|t| exp.tasks_of_good(self.chosen_good(exp, t)))
            .collect()
    }

    /// Keeps only the choices at `indices`.
    pub fn select(&self, indices: &[usize]) -> SubjectChoices {
        SubjectChoices::new(
            self.subject_id.clone(),
            indices.iter().map(|&i| self.choices[i]).collect(),
        )
    }
}

/// Whether tests run on the menus as offered or on their tangent lines at the
/// chosen points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FrontierKind {
    Raw,
    Linearized,
}

/// Every budget evaluated at every grid point, as exact integers.
///
/// `rows[t][j]` is `scale * mu^t(grid[j])` in cents (or the linearized
/// `mu^t_grad` when built with [`FrontierKind::Linearized`]). `chosen[t]` is the
/// grid index chosen from budget `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceTable {
    pub scale: i64,
    pub grid: Vec<i64>,
    pub rows: Vec<Vec<i64>>,
    pub chosen: Vec<usize>,
}

impl ChoiceTable {
    pub fn build(exp: &Experiment, subject: &SubjectChoices, kind: FrontierKind) -> Result<Self> {
        subject.validate(exp)?;
        let grid = exp.grid().to_vec();
        let (scale, rows) = match kind {
            FrontierKind::Raw => (
                1,
                exp.budgets()
                    .iter()
                    .map(|b| b.frontier().iter().map(|m| m.cents()).collect())
                    .collect(),
            ),
            FrontierKind::Linearized => {
                let scale = exp.linear_scale();
                let rows = exp
                    .budgets()
                    .iter()
                    .zip(&subject.choices)
                    .map(|(b, &c)| {
                        let lin = b.linearize_at(c)?;
                        Ok(grid.iter().map(|&g| lin.eval_scaled(g, scale)).collect())
                    })
                    .collect::<Result<Vec<Vec<i64>>>>()?;
                (scale, rows)
            }
        };
        Ok(ChoiceTable {
            scale,
            grid,
            rows,
            chosen: subject.choices.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.is_empty()
    }

    /// `scale * mu^t(x^s)`.
    pub fn cross(&self, t: usize, s: usize) -> i64 {
        self.rows[t][self.chosen[s]]
    }

    /// `scale * m^t`.
    pub fn own(&self, t: usize) -> i64 {
        self.rows[t][self.chosen[t]]
    }

    /// Dense `n x n` matrix of [`ChoiceTable::cross`], row-major by budget.
    pub fn cross_matrix(&self) -> Vec<i64> {
        let n = self.len();
        let mut out = Vec::with_capacity(n * n);
        for t in 0..n {
            for s in 0..n {
                out.push(self.cross(t, s));
            }
        }
        out
    }

    pub fn select(&self, keep: &[usize]) -> ChoiceTable {
        ChoiceTable {
            scale: self.scale,
            grid: self.grid.clone(),
            rows: keep.iter().map(|&i| self.rows[i].clone()).collect(),
            chosen: keep.iter().map(|&i| self.chosen[i]).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(x: i64) -> Money {
        Money::dollars(x)
    }

    fn contracts(pairs: &[(u32, i64)]) -> Vec<Contract> {
        pairs.iter().map(|&(t, w)| Contract::new(t, d(w))).collect()
    }

    #[test]
    fn reflect_pairs_smallest_good_with_most_tasks() {
        let b = reflect_budget("m", &contracts(&[(1, 3), (10, 27)]), 10).unwrap();
        assert_eq!(b.grid(), &[0, 9]);
        assert_eq!(b.frontier(), &[d(27), d(3)]);
    }

    #[test]
    fn reflect_single_contract() {
        let b = reflect_budget("m", &contracts(&[(1, 5)]), 1).unwrap();
        assert_eq!(b.grid(), &[0]);
        assert_eq!(b.frontier(), &[d(5)]);
    }

    #[test]
    fn reflect_rejects_decreasing_wage() {
        let err = reflect_budget("m", &contracts(&[(1, 5), (2, 4)]), 2).unwrap_err();
        assert!(matches!(err, Error::NonMonotoneFrontier { .. }));
        let tie = reflect_budget("m", &contracts(&[(1, 5), (2, 5)]), 2).unwrap_err();
        assert!(matches!(tie, Error::NonMonotoneFrontier { .. }));
    }

    #[test]
    fn reflect_rejects_duplicate_tasks() {
        let err = reflect_budget("m", &contracts(&[(1, 5), (1, 6)]), 2).unwrap_err();
        assert!(matches!(err, Error::DuplicateTasks { .. }));
    }

    #[test]
    fn frontier_lookup() {
        let b = Budget::new("m", vec![1, 2], vec![d(10), d(4)]).unwrap();
        assert_eq!(b.frontier_value(2.0).unwrap(), d(4));
        assert_eq!(b.frontier_value(1.0).unwrap(), d(10));
        assert!(matches!(b.frontier_value(1.5), Err(Error::OffGrid(_))));
    }

    #[test]
    fn frontier_interpolation() {
        let b = Budget::new("m", vec![1, 2], vec![d(10), d(4)]).unwrap();
        assert_eq!(b.frontier_interp(1.5).unwrap(), 7.0);
        assert_eq!(b.frontier_interp(2.0).unwrap(), 4.0);
        // affine continuation of the first segment (slope -6)
        assert_eq!(b.frontier_interp(0.5).unwrap(), 13.0);
        assert!(matches!(b.frontier_interp(2.5), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn marginal_price_slope_rule() {
        let menu = vec![
            Contract::new(1, d(3)),
            Contract::new(2, d(5)),
            Contract::new(3, d(6)),
        ];
        assert_eq!(marginal_price(&menu, 1).unwrap().as_dollars(), 2.0);
        assert_eq!(marginal_price(&menu, 2).unwrap().as_dollars(), 1.0);
        assert_eq!(marginal_price(&menu, 3).unwrap().as_dollars(), 1.0);
        assert!(matches!(marginal_price(&menu, 4), Err(Error::OffGrid(_))));
    }

    #[test]
    fn linearize_mirrors_marginal_price() {
        // wages for 1,2,3 tasks are 5,7,10 with K = 4, so g = 3,2,1
        let b = Budget::new("m", vec![1, 2, 3], vec![d(10), d(7), d(5)]).unwrap();
        let menu = b.to_contracts(4);
        for (g, tasks) in [(1, 3), (2, 2), (3, 1)] {
            let lin = b.linearize(g as f64).unwrap();
            let mp = marginal_price(&menu, tasks).unwrap();
            assert_eq!(lin.gradient.as_dollars(), -mp.as_dollars(), "g={g}");
            assert_eq!(lin.eval(g as f64), lin.intercept.as_dollars());
        }
        let mid = b.linearize(2.0).unwrap();
        assert_eq!(mid.intercept, d(7));
        assert_eq!(mid.gradient.as_dollars(), -3.0);
        assert_eq!(b.linearize(3.0).unwrap().gradient.as_dollars(), -2.0);
        assert_eq!(b.linearize(1.0).unwrap().gradient.as_dollars(), -3.0);
    }

    #[test]
    fn linearize_needs_two_points() {
        let b = Budget::new("m", vec![0], vec![d(5)]).unwrap();
        assert!(matches!(b.linearize(0.0), Err(Error::DegenerateBudget { .. })));
    }

    #[test]
    fn money_parsing() {
        assert_eq!("3".parse::<Money>().unwrap(), Money::from_cents(300));
        assert_eq!("26.5".parse::<Money>().unwrap(), Money::from_cents(2650));
        assert_eq!("0.07".parse::<Money>().unwrap(), Money::from_cents(7));
        assert_eq!("-1.25".parse::<Money>().unwrap(), Money::from_cents(-125));
        assert!("1.234".parse::<Money>().is_err());
        assert!("abc".parse::<Money>().is_err());
        assert_eq!(Money::from_cents(-125).to_string(), "-1.25");
    }

    #[test]
    fn experiment_requires_common_grid() {
        let a = Budget::new("a", vec![0, 1], vec![d(5), d(3)]).unwrap();
        let b = Budget::new("b", vec![0, 2], vec![d(5), d(3)]).unwrap();
        assert!(matches!(
            Experiment::new(vec![a, b], 3),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn linearized_table_is_exact_for_uneven_grids() {
        // gaps 1 and 2 need a common denominator of 2
        let b = Budget::new("a", vec![0, 1, 3], vec![d(9), d(8), d(5)]).unwrap();
        let exp = Experiment::new(vec![b], 4).unwrap();
        let s = SubjectChoices::new("s", vec![2]);
        let table = ChoiceTable::build(&exp, &s, FrontierKind::Linearized).unwrap();
        assert_eq!(table.scale, 2);
        // slope from g=1 to g=3 is -150 cents per unit
        assert_eq!(table.rows[0], vec![2 * 950, 2 * 800, 2 * 500]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn menu_strategy() -> impl Strategy<Value = (Vec<Contract>, u32)> {
            (1usize..10, 0u32..3).prop_flat_map(|(n, extra)| {
                (
                    proptest::collection::btree_set(1u32..20, n),
                    proptest::collection::vec(1i64..500, n),
                    Just(extra),
                )
                    .prop_map(|(tasks, steps, extra)| {
                        let mut wage = 100;
                        let menu: Vec<Contract> = tasks
                            .into_iter()
                            .zip(steps)
                            .map(|(t, s)| {
                                wage += s;
                                Contract::new(t, Money::from_cents(wage))
                            })
                            .collect();
                        let k = menu.iter().map(|c| c.tasks).max().unwrap() + extra;
                        (menu, k)
                    })
            })
        }

        fn concave_budget() -> impl Strategy<Value = Budget> {
            proptest::collection::vec(1i64..400, 2..10).prop_map(|mut drops| {
                drops.sort_unstable();
                let mut v = 5_000;
                let mut frontier = vec![Money::from_cents(v)];
                for d in drops {
                    v -= d;
                    frontier.push(Money::from_cents(v));
                }
                let grid = (0..frontier.len() as i64).collect();
                Budget::new("c", grid, frontier).unwrap()
            })
        }

        proptest! {
            #[test]
            fn reflection_round_trips((menu, k) in menu_strategy()) {
                let b = reflect_budget("m", &menu, k).unwrap();
                prop_assert_eq!(b.to_contracts(k), menu);
            }

            #[test]
            fn interp_agrees_on_grid((menu, k) in menu_strategy()) {
                let b = reflect_budget("m", &menu, k).unwrap();
                for (i, &g) in b.grid().iter().enumerate() {
                    prop_assert_eq!(b.frontier_interp(g as f64).unwrap(), b.value_at(i).as_dollars());
                    prop_assert_eq!(b.frontier_value(g as f64).unwrap(), b.value_at(i));
                }
            }

            #[test]
            fn tangent_lines_dominate_concave_frontiers(b in concave_budget()) {
                prop_assert!(b.is_concave());
                for idx in 0..b.len() {
                    let lin = b.linearize_at(idx).unwrap();
                    prop_assert!(lin.gradient.is_negative());
                    for (j, &g) in b.grid().iter().enumerate() {
                        prop_assert!(lin.eval_scaled(g, lin.gradient.run()) >= b.value_at(j).cents() * lin.gradient.run());
                    }
                }
            }

            #[test]
            fn linear_wages_have_constant_marginal_price(base in 1i64..1000, step in 1i64..500, n in 2u32..12) {
                let menu: Vec<Contract> = (1..=n)
                    .map(|t| Contract::new(t, Money::from_cents(base + step * t as i64)))
                    .collect();
                for t in 1..=n {
                    prop_assert_eq!(marginal_price(&menu, t).unwrap(), Slope::new(step, 1));
                }
            }
        }
    }
}
