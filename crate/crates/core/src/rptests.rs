//! Exact rationalizability tests.
//!
//! * LNU: GARP on the revealed relations of the (nonlinear) budgets.
//! * QLU: cyclical monotonicity, i.e. no negative cycle in the graph with edge
//!   weights `w[s -> t] = mu^t(x^t) - mu^t(x^s)`.
//! * C-LNU / C-QLU: the same tests on budgets linearized at the chosen points.
//!
//! All arithmetic is on integer cents (times a common scale for linearized
//! budgets), so the verdicts never depend on rounding.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{gcd, ChoiceTable, Experiment, FrontierKind, SubjectChoices};

/// Preference hypotheses, from least to most restrictive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Theory {
    #[serde(rename = "LNU")]
    Lnu,
    #[serde(rename = "QLU")]
    Qlu,
    #[serde(rename = "C-LNU")]
    Clnu,
    #[serde(rename = "C-QLU")]
    Cqlu,
}

impl Theory {
    pub const ALL: [Theory; 4] = [Theory::Lnu, Theory::Qlu, Theory::Clnu, Theory::Cqlu];

    pub fn label(self) -> &'static str {
        match self {
            Theory::Lnu => "LNU",
            Theory::Qlu => "QLU",
            Theory::Clnu => "C-LNU",
            Theory::Cqlu => "C-QLU",
        }
    }

    pub fn frontier_kind(self) -> FrontierKind {
        match self {
            Theory::Lnu | Theory::Qlu => FrontierKind::Raw,
            Theory::Clnu | Theory::Cqlu => FrontierKind::Linearized,
        }
    }

    pub fn is_quasilinear(self) -> bool {
        matches!(self, Theory::Qlu | Theory::Cqlu)
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Theory {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().replace('_', "-").as_str() {
            "LNU" => Ok(Theory::Lnu),
            "QLU" | "QL" => Ok(Theory::Qlu),
            "C-LNU" | "CLNU" => Ok(Theory::Clnu),
            "C-QLU" | "CQLU" => Ok(Theory::Cqlu),
            _ => Err(format!("unknown theory {s:?} (expected LNU, QLU, C-LNU or C-QLU)")),
        }
    }
}

/// Revealed relations between observed bundles.
///
/// `weak(s, t)` holds when bundle `s` is affordable in budget `t`
/// (`m^s <= mu^t(x^s)`), so `t` is weakly revealed preferred to `s`;
/// `strict(s, t)` when it lies strictly inside (`m^s < mu^t(x^s)`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RevealedRelations {
    n: usize,
    weak: Vec<bool>,
    strict: Vec<bool>,
}

impl RevealedRelations {
    pub fn from_table(table: &ChoiceTable) -> Self {
        let n = table.len();
        let mut weak = vec![false; n * n];
        let mut strict = vec![false; n * n];
        for s in 0..n {
            let own = table.own(s);
            for t in 0..n {
                let v = table.cross(t, s);
                weak[s * n + t] = v >= own;
                strict[s * n + t] = v > own;
            }
        }
        RevealedRelations { n, weak, strict }
    }

    /// Builds relations from explicit matrices indexed `[s][t]`.
    pub fn from_matrices(weak: Vec<Vec<bool>>, strict: Vec<Vec<bool>>) -> Result<Self> {
        let n = weak.len();
        if strict.len() != n || weak.iter().chain(&strict).any(|r| r.len() != n) {
            return Err(Error::Invalid("relation matrices must be square".into()));
        }
        let weak: Vec<bool> = weak.into_iter().flatten().collect();
        let strict: Vec<bool> = strict.into_iter().flatten().collect();
        if weak.iter().zip(&strict).any(|(&w, &s)| s && !w) {
            return Err(Error::Invalid("strict relation must imply weak".into()));
        }
        Ok(RevealedRelations { n, weak, strict })
    }

    pub(crate) fn from_flat(n: usize, weak: Vec<bool>, strict: Vec<bool>) -> Self {
        debug_assert!(weak.len() == n * n && strict.len() == n * n);
        RevealedRelations { n, weak, strict }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn weak(&self, s: usize, t: usize) -> bool {
        self.weak[s * self.n + t]
    }

    pub fn strict(&self, s: usize, t: usize) -> bool {
        self.strict[s * self.n + t]
    }

    /// True when `cycle` (`c0 R c1 R ... R c0`, each `R` weak revealed
    /// preference) contains at least one strict link.
    pub fn is_violation(&self, cycle: &[usize]) -> bool {
        if cycle.len() < 2 {
            return false;
        }
        let links = cycle
            .iter()
            .zip(cycle.iter().cycle().skip(1))
            .map(|(&a, &b)| (a, b));
        let mut any_strict = false;
        for (a, b) in links {
            if !self.weak(b, a) {
                return false;
            }
            any_strict |= self.strict(b, a);
        }
        any_strict
    }
}

pub fn revealed_relations(exp: &Experiment, subject: &SubjectChoices) -> Result<RevealedRelations> {
    let table = ChoiceTable::build(exp, subject, FrontierKind::Raw)?;
    Ok(RevealedRelations::from_table(&table))
}

/// Outcome of one exact test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyResult {
    pub theory: Theory,
    pub pass: bool,
    /// Observation indices of a violating cycle, empty on pass.
    pub witness: Vec<usize>,
}

impl ConsistencyResult {
    fn from_witness(theory: Theory, witness: Option<Vec<usize>>) -> Self {
        match witness {
            Some(w) => ConsistencyResult {
                theory,
                pass: false,
                witness: w,
            },
            None => ConsistencyResult {
                theory,
                pass: true,
                witness: Vec::new(),
            },
        }
    }
}

/// Shortest GARP violation: a weak revealed-preference path `t -> ... -> s`
/// closed by a strict link from `s` back to `t`.
pub(crate) fn garp_violation(rel: &RevealedRelations) -> Option<Vec<usize>> {
    let n = rel.n;
    // closure[t][s]: t is (transitively) revealed preferred to s
    let mut closure: Vec<bool> = (0..n * n)
        .map(|i| {
            let (t, s) = (i / n, i % n);
            t != s && rel.weak(s, t)
        })
        .collect();
    for k in 0..n {
        for i in 0..n {
            if closure[i * n + k] {
                for j in 0..n {
                    if closure[k * n + j] {
                        closure[i * n + j] = true;
                    }
                }
            }
        }
    }
    let mut best: Option<Vec<usize>> = None;
    for t in 0..n {
        for s in 0..n {
            if s == t || !closure[t * n + s] || !rel.strict(t, s) {
                continue;
            }
            if let Some(path) = bfs_path(n, t, s, |a, b| a != b && rel.weak(b, a)) {
                if best.as_ref().is_none_or(|b| path.len() < b.len()) {
                    best = Some(path);
                }
            }
        }
    }
    best
}

fn bfs_path(n: usize, from: usize, to: usize, edge: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    let mut prev = vec![usize::MAX; n];
    let mut queue = VecDeque::from([from]);
    prev[from] = from;
    while let Some(a) = queue.pop_front() {
        if a == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = prev[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for b in 0..n {
            if prev[b] == usize::MAX && edge(a, b) {
                prev[b] = a;
                queue.push_back(b);
            }
        }
    }
    None
}

/// GARP over the given relations.
pub fn check_lnu(rel: &RevealedRelations) -> ConsistencyResult {
    ConsistencyResult::from_witness(Theory::Lnu, garp_violation(rel))
}

/// Complete directed graph over observations with `weight(s, t) = mu^t(x^t) - mu^t(x^s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QlGraph {
    n: usize,
    weights: Vec<i64>,
    /// Units per cent of the weights.
    scale: i64,
    table: Option<ChoiceTable>,
}

impl QlGraph {
    pub fn from_table(table: ChoiceTable) -> Self {
        let n = table.len();
        let mut weights = vec![0; n * n];
        for s in 0..n {
            for t in 0..n {
                weights[s * n + t] = table.own(t) - table.cross(t, s);
            }
        }
        QlGraph {
            n,
            weights,
            scale: table.scale,
            table: Some(table),
        }
    }

    /// A bare graph from weights indexed `[s][t]`, in cents.
    pub fn from_weights(weights: Vec<Vec<i64>>) -> Result<Self> {
        let n = weights.len();
        if weights.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("weight matrix must be square".into()));
        }
        if (0..n).any(|t| weights[t][t] != 0) {
            return Err(Error::Invalid("self-loop weights must be zero".into()));
        }
        Ok(QlGraph {
            n,
            weights: weights.into_iter().flatten().collect(),
            scale: 1,
            table: None,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Edge weight `s -> t` in scaled cents.
    pub fn weight(&self, s: usize, t: usize) -> i64 {
        self.weights[s * self.n + t]
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn table(&self) -> Option<&ChoiceTable> {
        self.table.as_ref()
    }

    /// Sum of the weights along `c0 -> c1 -> ... -> c0`.
    pub fn cycle_weight(&self, cycle: &[usize]) -> i64 {
        cycle
            .iter()
            .zip(cycle.iter().cycle().skip(1))
            .map(|(&a, &b)| self.weight(a, b))
            .sum()
    }
}

pub fn build_ql_graph(exp: &Experiment, subject: &SubjectChoices) -> Result<QlGraph> {
    Ok(QlGraph::from_table(ChoiceTable::build(exp, subject, FrontierKind::Raw)?))
}

/// Bellman-Ford from a virtual source joined to every vertex by a zero edge.
/// Returns a negative cycle in edge order, if any.
pub(crate) fn negative_cycle(g: &QlGraph) -> Option<Vec<usize>> {
    negative_cycle_by(g.n, |s, t| g.weight(s, t) as i128)
}

/// Negative cycle search over the complete graph with weights `w(s, t)`.
pub(crate) fn negative_cycle_by(n: usize, w: impl Fn(usize, usize) -> i128) -> Option<Vec<usize>> {
    let mut dist = vec![0i128; n];
    let mut pred = vec![usize::MAX; n];
    let mut last_relaxed = None;
    for _round in 0..n {
        last_relaxed = None;
        for s in 0..n {
            for t in 0..n {
                if s == t {
                    continue;
                }
                let cand = dist[s] + w(s, t);
                if cand < dist[t] {
                    dist[t] = cand;
                    pred[t] = s;
                    last_relaxed = Some(t);
                }
            }
        }
        last_relaxed?;
    }
    // still relaxing after n rounds: walk back n steps to land on the cycle
    let mut v = last_relaxed?;
    for _ in 0..n {
        v = pred[v];
    }
    let mut cycle = vec![v];
    let mut cur = pred[v];
    while cur != v {
        cycle.push(cur);
        cur = pred[cur];
    }
    cycle.reverse();
    Some(cycle)
}

/// Cyclical monotonicity: passes iff no cycle has negative total weight.
pub fn check_ql(g: &QlGraph) -> ConsistencyResult {
    ConsistencyResult::from_witness(Theory::Qlu, negative_cycle(g))
}

/// GARP on budgets linearized at the chosen points.
pub fn check_clnu(exp: &Experiment, subject: &SubjectChoices) -> Result<ConsistencyResult> {
    let table = ChoiceTable::build(exp, subject, FrontierKind::Linearized)?;
    let mut res = check_lnu(&RevealedRelations::from_table(&table));
    res.theory = Theory::Clnu;
    Ok(res)
}

/// Cyclical monotonicity on budgets linearized at the chosen points.
pub fn check_cqlu(exp: &Experiment, subject: &SubjectChoices) -> Result<ConsistencyResult> {
    let table = ChoiceTable::build(exp, subject, FrontierKind::Linearized)?;
    let mut res = check_ql(&QlGraph::from_table(table));
    res.theory = Theory::Cqlu;
    Ok(res)
}

/// Runs the exact test of `theory` on a prepared table.
pub fn check_table(table: &ChoiceTable, theory: Theory) -> ConsistencyResult {
    let mut res = if theory.is_quasilinear() {
        check_ql(&QlGraph::from_table(table.clone()))
    } else {
        check_lnu(&RevealedRelations::from_table(table))
    };
    res.theory = theory;
    res
}

pub fn check(exp: &Experiment, subject: &SubjectChoices, theory: Theory) -> Result<ConsistencyResult> {
    let table = ChoiceTable::build(exp, subject, theory.frontier_kind())?;
    Ok(check_table(&table, theory))
}

/// Quasilinear subutility recovered from a consistent graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveredUtility {
    /// Units per cent of `values` and `extension`.
    pub scale: i64,
    /// `u^t` for each observation; the smallest is 0.
    pub values: Vec<i64>,
    /// `u(g)` at every grid point, when the graph carries its budgets.
    pub extension: Option<Vec<i64>>,
    pub grid: Vec<i64>,
}

impl RecoveredUtility {
    /// `u^t` in dollars.
    pub fn value(&self, t: usize) -> f64 {
        self.values[t] as f64 / self.scale as f64 / 100.0
    }

    /// `u(g)` in dollars for a grid point `g`.
    pub fn at(&self, g: i64) -> Option<f64> {
        let j = self.grid.binary_search(&g).ok()?;
        self.extension
            .as_ref()
            .map(|e| e[j] as f64 / self.scale as f64 / 100.0)
    }
}

/// Shortest-walk utilities: `u^s = min(0, min_t w[s -> t] + u^t)` iterated to a
/// fixpoint, then shifted so the minimum is zero. The extension to the grid is
/// `u(g) = min_t u^t + mu^t(x^t) - mu^t(g)`.
pub fn recover_ql_utility(g: &QlGraph) -> Result<RecoveredUtility> {
    if let Some(cycle) = negative_cycle(g) {
        return Err(Error::NegativeCycle { cycle });
    }
    let n = g.n;
    let mut u = vec![0i64; n];
    for _ in 0..n {
        let mut changed = false;
        for s in 0..n {
            for t in 0..n {
                let cand = g.weight(s, t) + u[t];
                if cand < u[s] {
                    u[s] = cand;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let floor = u.iter().copied().min().unwrap_or(0);
    u.iter_mut().for_each(|v| *v -= floor);

    let (extension, grid) = match &g.table {
        Some(table) => {
            let ext = (0..table.grid.len())
                .map(|j| {
                    (0..n)
                        .map(|t| u[t] + table.own(t) - table.rows[t][j])
                        .min()
                        .unwrap_or(0)
                })
                .collect();
            (Some(ext), table.grid.clone())
        }
        None => (None, Vec::new()),
    };
    Ok(RecoveredUtility {
        scale: g.scale,
        values: u,
        extension,
        grid,
    })
}

/// Feasibility of `u^t - u^s >= mu^t(x^s) - mu^t(x^t)` for all pairs (plus
/// monotonicity of `u` over the chosen goods when known), decided by
/// Fourier-Motzkin elimination over exact integers.
pub fn check_ql_lp(g: &QlGraph) -> bool {
    let n = g.n;
    let mut system = LinearSystem::new(n);
    for s in 0..n {
        for t in 0..n {
            if s != t {
                // u_s - u_t <= w[s -> t]
                system.push_difference(s, t, g.weight(s, t));
            }
        }
    }
    if let Some(table) = &g.table {
        for s in 0..n {
            for t in 0..n {
                if s != t && table.grid[table.chosen[s]] <= table.grid[table.chosen[t]] {
                    // monotone: x^s <= x^t implies u_s <= u_t
                    system.push_difference(s, t, 0);
                }
            }
        }
    }
    system.eliminate()
}

/// Inequalities `sum_i a_i x_i <= b` with integer data.
struct LinearSystem {
    vars: usize,
    rows: HashMap<Vec<i128>, i128>,
    contradiction: bool,
}

impl LinearSystem {
    fn new(vars: usize) -> Self {
        LinearSystem {
            vars,
            rows: HashMap::new(),
            contradiction: false,
        }
    }

    fn push_difference(&mut self, plus: usize, minus: usize, bound: i64) {
        let mut a = vec![0i128; self.vars];
        a[plus] += 1;
        a[minus] -= 1;
        self.push(a, bound as i128);
    }

    fn push(&mut self, mut a: Vec<i128>, mut b: i128) {
        if a.iter().all(|&c| c == 0) {
            if b < 0 {
                self.contradiction = true;
            }
            return;
        }
        let g = a
            .iter()
            .fold(0u64, |acc, &c| gcd(acc, c.unsigned_abs() as u64)) as i128;
        // dividing by a positive common factor of the coefficients keeps the
        // real solution set; the bound stays rational so only divide when exact
        if g > 1 && b % g == 0 {
            a.iter_mut().for_each(|c| *c /= g);
            b /= g;
        }
        let slot = self.rows.entry(a).or_insert(b);
        if b < *slot {
            *slot = b;
        }
    }

    /// Eliminates every variable; true when no contradiction appears.
    fn eliminate(mut self) -> bool {
        for k in 0..self.vars {
            if self.contradiction {
                return false;
            }
            let rows = std::mem::take(&mut self.rows);
            let (mut pos, mut neg) = (Vec::new(), Vec::new());
            for (a, b) in rows {
                match a[k].signum() {
                    1 => pos.push((a, b)),
                    -1 => neg.push((a, b)),
                    _ => self.push(a, b),
                }
            }
            for (ap, bp) in &pos {
                for (an, bn) in &neg {
                    let (cp, cn) = (ap[k], -an[k]);
                    let a: Vec<i128> = ap.iter().zip(an).map(|(&x, &y)| x * cn + y * cp).collect();
                    self.push(a, bp * cn + bn * cp);
                }
            }
        }
        !self.contradiction && self.rows.values().all(|&b| b >= 0)
    }
}
