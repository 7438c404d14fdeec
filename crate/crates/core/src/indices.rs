//! Distance-to-rationality indices.
//!
//! The Houtman-Maks index (HMI) is the largest fraction of observations that
//! jointly pass a theory's exact test. It is computed by a branch and bound
//! over bitmasks of kept observations: every node holds a consistent kept set
//! together with an incremental summary (transitive closure for GARP,
//! all-pairs shortest walks for cyclical monotonicity), so adding one
//! observation is checked in `O(T^2)`. Pairs that are inconsistent on their
//! own prune the candidates, and a greedy clique cover of that pairwise
//! conflict graph bounds the best completion.
//!
//! The critical cost efficiency index (CCEI) comes in a wealth variant, where
//! budgets shrink in money only, and a just-noticeable-difference (JND)
//! variant, where the whole budget shrinks toward the origin.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ChoiceTable, Experiment, FrontierKind, SubjectChoices, FLOAT_TOL};
use crate::rptests::{garp_violation, negative_cycle_by, RevealedRelations, Theory};

/// Largest number of observations the HMI search handles.
pub const MAX_OBSERVATIONS: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HmiResult {
    pub theory: Theory,
    pub kept: usize,
    pub total: usize,
    pub kept_fraction: f64,
    /// A minimum exclusion set, lexicographically smallest among ties.
    pub excluded: Vec<usize>,
}

pub fn hmi(exp: &Experiment, subject: &SubjectChoices, theory: Theory) -> Result<HmiResult> {
    let table = ChoiceTable::build(exp, subject, theory.frontier_kind())?;
    hmi_table(&table, theory)
}

/// Number of observations kept by an optimal exclusion, without the exclusion set.
pub fn hmi_kept(table: &ChoiceTable, theory: Theory) -> Result<usize> {
    Ok(HmiEngine::new(table, theory)?.max_kept())
}

pub fn hmi_table(table: &ChoiceTable, theory: Theory) -> Result<HmiResult> {
    let engine = HmiEngine::new(table, theory)?;
    let n = table.len();
    let excluded = engine.lex_min_exclusion();
    let kept = n - excluded.len();
    Ok(HmiResult {
        theory,
        kept,
        total: n,
        kept_fraction: if n == 0 { 1.0 } else { kept as f64 / n as f64 },
        excluded,
    })
}

fn bit(i: usize) -> u64 {
    1u64 << i
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        bit(n) - 1
    }
}

fn ones(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

/// Incremental consistency of a growing kept set.
trait Structure {
    type State: Clone;

    fn empty_state(&self) -> Self::State;

    /// State of `kept | v`, or `None` if adding `v` creates a violation.
    fn try_add(&self, state: &Self::State, kept: u64, v: usize) -> Option<Self::State>;
}

/// GARP: `r[x]` holds the `y` that `x` is weakly revealed preferred to,
/// `rt[v]` the `x` with `x R v`, `pinv[t]` the `s` strictly revealed preferred to `t`.
struct Garp {
    n: usize,
    r: Vec<u64>,
    rt: Vec<u64>,
    pinv: Vec<u64>,
}

impl Garp {
    fn new(rel: &RevealedRelations) -> Self {
        let n = rel.len();
        let mut r = vec![0u64; n];
        let mut rt = vec![0u64; n];
        let mut pinv = vec![0u64; n];
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                // x R y: bundle y affordable in budget x
                if rel.weak(y, x) {
                    r[x] |= bit(y);
                    rt[y] |= bit(x);
                }
                // y P x
                if rel.strict(x, y) {
                    pinv[x] |= bit(y);
                }
            }
        }
        Garp { n, r, rt, pinv }
    }

    fn conflicts(&self) -> Vec<u64> {
        (0..self.n)
            .map(|a| {
                ones(full_mask(self.n) & !bit(a))
                    .filter(|&b| {
                        (self.r[a] & bit(b) != 0 && self.pinv[a] & bit(b) != 0)
                            || (self.r[b] & bit(a) != 0 && self.pinv[b] & bit(a) != 0)
                    })
                    .fold(0, |m, b| m | bit(b))
            })
            .collect()
    }
}

impl Structure for Garp {
    /// Transitive closure rows restricted to the kept set.
    type State = Vec<u64>;

    fn empty_state(&self) -> Vec<u64> {
        vec![0; self.n]
    }

    fn try_add(&self, closure: &Vec<u64>, kept: u64, v: usize) -> Option<Vec<u64>> {
        let succ = self.r[v] & kept;
        let from_v = ones(succ).fold(succ, |acc, y| acc | closure[y]);
        let pred = self.rt[v] & kept;
        let to_v = ones(kept).fold(pred, |acc, x| {
            if closure[x] & pred != 0 {
                acc | bit(x)
            } else {
                acc
            }
        });
        let mut next = closure.clone();
        let through_v = from_v | bit(v);
        for x in ones(to_v) {
            next[x] |= through_v;
        }
        next[v] = if from_v & to_v != 0 {
            from_v | bit(v)
        } else {
            from_v
        };
        let all = kept | bit(v);
        for t in ones(all) {
            if next[t] & self.pinv[t] & all != 0 {
                return None;
            }
        }
        Some(next)
    }
}

/// Cyclical monotonicity with weights `w[s * n + t]`.
struct Cm {
    n: usize,
    w: Vec<i64>,
}

impl Cm {
    fn new(table: &ChoiceTable) -> Self {
        let n = table.len();
        let mut w = vec![0; n * n];
        for s in 0..n {
            for t in 0..n {
                w[s * n + t] = table.own(t) - table.cross(t, s);
            }
        }
        Cm { n, w }
    }

    fn conflicts(&self) -> Vec<u64> {
        let n = self.n;
        (0..n)
            .map(|a| {
                (0..n)
                    .filter(|&b| b != a && self.w[a * n + b] + self.w[b * n + a] < 0)
                    .fold(0, |m, b| m | bit(b))
            })
            .collect()
    }
}

impl Structure for Cm {
    /// Shortest walk lengths between kept observations, `n x n`.
    type State = Vec<i64>;

    fn empty_state(&self) -> Vec<i64> {
        vec![0; self.n * self.n]
    }

    fn try_add(&self, dist: &Vec<i64>, kept: u64, v: usize) -> Option<Vec<i64>> {
        let n = self.n;
        let w = &self.w;
        let mut out_v = vec![0i64; n];
        let mut in_v = vec![0i64; n];
        for y in ones(kept) {
            let mut best_out = w[v * n + y];
            let mut best_in = w[y * n + v];
            for z in ones(kept) {
                best_out = best_out.min(w[v * n + z] + dist[z * n + y]);
                best_in = best_in.min(dist[y * n + z] + w[z * n + v]);
            }
            out_v[y] = best_out;
            in_v[y] = best_in;
        }
        if ones(kept).any(|y| out_v[y] + w[y * n + v] < 0) {
            return None;
        }
        let mut next = dist.clone();
        for x in ones(kept) {
            for y in ones(kept) {
                let via = in_v[x] + out_v[y];
                if via < next[x * n + y] {
                    next[x * n + y] = via;
                }
            }
            next[x * n + v] = in_v[x];
            next[v * n + x] = out_v[x];
        }
        next[v * n + v] = 0;
        Some(next)
    }
}

enum Kind {
    Garp(Garp),
    Cm(Cm),
}

struct HmiEngine {
    n: usize,
    kind: Kind,
    conflicts: Vec<u64>,
}

impl HmiEngine {
    fn new(table: &ChoiceTable, theory: Theory) -> Result<Self> {
        let n = table.len();
        if n > MAX_OBSERVATIONS {
            return Err(Error::Invalid(format!(
                "HMI supports at most {MAX_OBSERVATIONS} observations, got {n}"
            )));
        }
        let (kind, conflicts) = if theory.is_quasilinear() {
            let cm = Cm::new(table);
            let c = cm.conflicts();
            (Kind::Cm(cm), c)
        } else {
            let garp = Garp::new(&RevealedRelations::from_table(table));
            let c = garp.conflicts();
            (Kind::Garp(garp), c)
        };
        Ok(HmiEngine { n, kind, conflicts })
    }

    fn search(&self, forced: u64, allowed: u64, target: usize) -> usize {
        match &self.kind {
            Kind::Garp(g) => Search::run(g, &self.conflicts, forced, allowed, target),
            Kind::Cm(c) => Search::run(c, &self.conflicts, forced, allowed, target),
        }
    }

    fn max_kept(&self) -> usize {
        self.search(0, full_mask(self.n), self.n)
    }

    fn lex_min_exclusion(&self) -> Vec<usize> {
        let n = self.n;
        let k = n - self.max_kept();
        let mut excluded = Vec::with_capacity(k);
        let mut excluded_mask = 0u64;
        let mut forced = 0u64;
        for i in 0..n {
            if excluded.len() == k {
                break;
            }
            let allowed = full_mask(n) & !excluded_mask & !bit(i);
            if self.search(forced, allowed, n - k) >= n - k {
                excluded.push(i);
                excluded_mask |= bit(i);
            } else {
                forced |= bit(i);
            }
        }
        excluded
    }
}

struct Search<'a, S: Structure> {
    structure: &'a S,
    conflicts: &'a [u64],
    best: usize,
    target: usize,
}

impl<'a, S: Structure> Search<'a, S> {
    /// Largest consistent set containing `forced` within `forced | allowed`,
    /// stopping early once `target` is reached. Returns 0 if `forced` itself
    /// is inconsistent.
    fn run(structure: &'a S, conflicts: &'a [u64], forced: u64, allowed: u64, target: usize) -> usize {
        let mut state = structure.empty_state();
        let mut kept = 0u64;
        for v in ones(forced) {
            match structure.try_add(&state, kept, v) {
                Some(next) => {
                    state = next;
                    kept |= bit(v);
                }
                None => return 0,
            }
        }
        let mut cand = allowed & !forced;
        for v in ones(forced) {
            cand &= !conflicts[v];
        }
        let mut search = Search {
            structure,
            conflicts,
            best: 0,
            target,
        };
        search.go(kept, &state, cand);
        search.best
    }

    fn done(&self) -> bool {
        self.best >= self.target
    }

    fn go(&mut self, kept: u64, state: &S::State, cand: u64) {
        let size = kept.count_ones() as usize;
        if size > self.best {
            self.best = size;
        }
        if cand == 0 || self.done() {
            return;
        }
        if size + cand.count_ones() as usize <= self.best
            || size + self.clique_cover(cand) <= self.best
        {
            return;
        }
        let v = self.pick(cand);
        if let Some(next) = self.structure.try_add(state, kept, v) {
            self.go(kept | bit(v), &next, cand & !bit(v) & !self.conflicts[v]);
            if self.done() {
                return;
            }
        }
        self.go(kept, state, cand & !bit(v));
    }

    /// At most one vertex of each clique of pairwise conflicts can be kept.
    fn clique_cover(&self, mut cand: u64) -> usize {
        let mut count = 0;
        while cand != 0 {
            let u = cand.trailing_zeros() as usize;
            cand &= !bit(u);
            let mut members = cand & self.conflicts[u];
            while members != 0 {
                let w = members.trailing_zeros() as usize;
                cand &= !bit(w);
                members &= self.conflicts[w];
            }
            count += 1;
        }
        count
    }

    /// Candidate with the most conflicts among candidates, lowest index on ties.
    fn pick(&self, cand: u64) -> usize {
        let mut best = (0, cand.trailing_zeros() as usize);
        for v in ones(cand) {
            let deg = (self.conflicts[v] & cand).count_ones();
            if deg > best.0 {
                best = (deg, v);
            }
        }
        best.1
    }
}

/// Which index to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IndexKind {
    #[serde(rename = "hmi")]
    Hmi,
    #[serde(rename = "ccei-wealth")]
    CceiWealth,
    #[serde(rename = "ccei-jnd")]
    CceiJnd,
}

impl IndexKind {
    pub const ALL: [IndexKind; 3] = [IndexKind::Hmi, IndexKind::CceiWealth, IndexKind::CceiJnd];

    pub fn label(self) -> &'static str {
        match self {
            IndexKind::Hmi => "hmi",
            IndexKind::CceiWealth => "ccei-wealth",
            IndexKind::CceiJnd => "ccei-jnd",
        }
    }
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for IndexKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        IndexKind::ALL
            .into_iter()
            .find(|k| k.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown index {s:?} (expected hmi, ccei-wealth or ccei-jnd)"))
    }
}

/// The index value in `[0, 1]`: kept fraction for HMI, `e*` for CCEI.
pub fn index_value(exp: &Experiment, subject: &SubjectChoices, theory: Theory, kind: IndexKind) -> Result<f64> {
    match kind {
        IndexKind::Hmi => {
            let table = ChoiceTable::build(exp, subject, theory.frontier_kind())?;
            let n = table.len();
            if n == 0 {
                return Ok(1.0);
            }
            Ok(hmi_kept(&table, theory)? as f64 / n as f64)
        }
        IndexKind::CceiWealth => Ok(ccei(exp, subject, theory, CceiVariant::Wealth)?.e_star),
        IndexKind::CceiJnd => Ok(ccei(exp, subject, theory, CceiVariant::Jnd)?.e_star),
    }
}

/// How budgets shrink as the efficiency level falls.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CceiVariant {
    #[serde(rename = "wealth")]
    Wealth,
    #[serde(rename = "jnd")]
    Jnd,
}

impl CceiVariant {
    pub fn label(self) -> &'static str {
        match self {
            CceiVariant::Wealth => "wealth",
            CceiVariant::Jnd => "jnd",
        }
    }
}

impl fmt::Display for CceiVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CceiVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "wealth" => Ok(CceiVariant::Wealth),
            "jnd" => Ok(CceiVariant::Jnd),
            _ => Err(format!("unknown CCEI variant {s:?} (expected wealth or jnd)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CceiResult {
    pub theory: Theory,
    pub variant: CceiVariant,
    pub e_star: f64,
}

/// Bisection tolerance and iteration cap for the JND variant on raw frontiers.
pub const BISECTION_TOL: f64 = 1e-6;
pub const BISECTION_MAX_ITER: usize = 40;

/// Cross values that are affine in the efficiency level:
/// `relaxed mu^t(x^s) = alpha[t][s] + beta[t][s] * e` with `beta >= 0`.
struct AffineRelaxation {
    n: usize,
    own: Vec<i128>,
    alpha: Vec<i128>,
    beta: Vec<i128>,
}

impl AffineRelaxation {
    fn wealth(table: &ChoiceTable) -> Self {
        let n = table.len();
        let mut alpha = vec![0; n * n];
        let mut beta = vec![0; n * n];
        for t in 0..n {
            for s in 0..n {
                let c = table.cross(t, s) as i128;
                // negative values are left unscaled so relations stay monotone in e
                if c >= 0 {
                    beta[t * n + s] = c;
                } else {
                    alpha[t * n + s] = c;
                }
            }
        }
        AffineRelaxation {
            n,
            own: (0..n).map(|t| table.own(t) as i128).collect(),
            alpha,
            beta,
        }
    }

    /// JND scaling of tangent lines: `e * line(x / e) = e * line(0) + slope * x`.
    fn jnd_linear(exp: &Experiment, subject: &SubjectChoices, table: &ChoiceTable) -> Result<Self> {
        let n = table.len();
        let mut alpha = vec![0; n * n];
        let mut beta = vec![0; n * n];
        for t in 0..n {
            let lin = exp.budget(t).linearize_at(subject.choices[t])?;
            let at_zero = lin.eval_scaled(0, table.scale) as i128;
            for s in 0..n {
                beta[t * n + s] = at_zero;
                alpha[t * n + s] = table.cross(t, s) as i128 - at_zero;
            }
        }
        Ok(AffineRelaxation {
            n,
            own: (0..n).map(|t| table.own(t) as i128).collect(),
            alpha,
            beta,
        })
    }

    fn value(&self, t: usize, s: usize, e: Ratio<i128>) -> Ratio<i128> {
        let i = t * self.n + s;
        Ratio::from_integer(self.alpha[i]) + e * self.beta[i]
    }

    fn relations(&self, e: Ratio<i128>) -> RevealedRelations {
        let n = self.n;
        let mut weak = vec![false; n * n];
        let mut strict = vec![false; n * n];
        for s in 0..n {
            let own = Ratio::from_integer(self.own[s]);
            for t in 0..n {
                if s == t {
                    weak[s * n + t] = true;
                    continue;
                }
                let v = self.value(t, s, e);
                weak[s * n + t] = own <= v;
                strict[s * n + t] = own < v;
            }
        }
        RevealedRelations::from_flat(n, weak, strict)
    }

    /// Supremum of the levels at which GARP holds, from the finite set of
    /// levels where some relation flips.
    fn garp_sup(&self) -> Ratio<i128> {
        let n = self.n;
        let one = Ratio::from_integer(1);
        let mut crit: Vec<Ratio<i128>> = Vec::new();
        for t in 0..n {
            for s in 0..n {
                let i = t * n + s;
                if s != t && self.beta[i] > 0 {
                    let c = Ratio::new(self.own[s] - self.alpha[i], self.beta[i]);
                    if c > Ratio::from_integer(0) && c < one {
                        crit.push(c);
                    }
                }
            }
        }
        crit.push(one);
        crit.sort();
        crit.dedup();
        let mut lo = Ratio::from_integer(0);
        for c in crit {
            let mid = (lo + c) / 2;
            if garp_violation(&self.relations(mid)).is_some() {
                return lo;
            }
            lo = c;
        }
        one
    }

    /// Minimum cycle ratio by Dinkelbach iteration, capped at 1.
    fn cm_sup(&self) -> Ratio<i128> {
        let n = self.n;
        let mut lambda = Ratio::from_integer(1);
        loop {
            let (p, q) = (*lambda.numer(), *lambda.denom());
            let w = |s: usize, t: usize| {
                let i = t * n + s;
                q * (self.own[t] - self.alpha[i]) - p * self.beta[i]
            };
            let Some(cycle) = negative_cycle_by(n, w) else {
                return lambda;
            };
            let (mut a, mut b) = (0i128, 0i128);
            for (&s, &t) in cycle.iter().zip(cycle.iter().cycle().skip(1)) {
                let i = t * n + s;
                a += self.own[t] - self.alpha[i];
                b += self.beta[i];
            }
            // a >= 0 and the cycle is negative at lambda, so b > 0 and a / b < lambda
            lambda = Ratio::new(a, b);
        }
    }
}

fn require_nonnegative(exp: &Experiment) -> Result<()> {
    for b in exp.budgets() {
        if b.frontier().iter().any(|m| m.cents() < 0) {
            return Err(Error::NegativeFrontier {
                menu_id: b.menu_id().to_string(),
            });
        }
    }
    Ok(())
}

pub fn ccei(
    exp: &Experiment,
    subject: &SubjectChoices,
    theory: Theory,
    variant: CceiVariant,
) -> Result<CceiResult> {
    require_nonnegative(exp)?;
    let table = ChoiceTable::build(exp, subject, theory.frontier_kind())?;
    let e_star = match (variant, theory.frontier_kind()) {
        (CceiVariant::Jnd, FrontierKind::Raw) => bisect(|e| relaxed_pass(exp, subject, theory, variant, e))?,
        (CceiVariant::Jnd, FrontierKind::Linearized) => {
            exact_sup(&AffineRelaxation::jnd_linear(exp, subject, &table)?, theory)
        }
        (CceiVariant::Wealth, _) => exact_sup(&AffineRelaxation::wealth(&table), theory),
    };
    Ok(CceiResult {
        theory,
        variant,
        e_star,
    })
}

fn exact_sup(relax: &AffineRelaxation, theory: Theory) -> f64 {
    let e = if theory.is_quasilinear() {
        relax.cm_sup()
    } else {
        relax.garp_sup()
    };
    *e.numer() as f64 / *e.denom() as f64
}

/// Largest passing level found by bisection on `[0, 1]`, assuming `0` passes.
pub fn bisect(mut pass: impl FnMut(f64) -> Result<bool>) -> Result<f64> {
    if pass(1.0)? {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..BISECTION_MAX_ITER {
        if hi - lo < BISECTION_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if pass(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// The `e`-relaxed test evaluated in floating point.
///
/// JND evaluation points `x^s / e` beyond the largest grid value are treated as
/// unaffordable.
pub fn relaxed_pass(
    exp: &Experiment,
    subject: &SubjectChoices,
    theory: Theory,
    variant: CceiVariant,
    e: f64,
) -> Result<bool> {
    if !(0.0..=1.0).contains(&e) {
        return Err(Error::OutOfRange(e));
    }
    let table = ChoiceTable::build(exp, subject, theory.frontier_kind())?;
    let n = table.len();
    let scale = table.scale as f64;
    let max_g = *table.grid.last().unwrap() as f64;
    let lines = match theory.frontier_kind() {
        FrontierKind::Linearized => Some(
            (0..n)
                .map(|t| exp.budget(t).linearize_at(subject.choices[t]))
                .collect::<Result<Vec<_>>>()?,
        ),
        FrontierKind::Raw => None,
    };
    // relaxed mu^t(x^s) in scaled cents, None when unaffordable
    let value = |t: usize, s: usize| -> Result<Option<f64>> {
        let raw = table.cross(t, s) as f64;
        match variant {
            CceiVariant::Wealth => Ok(Some(if raw >= 0.0 { e * raw } else { raw })),
            CceiVariant::Jnd => {
                if e == 0.0 {
                    return Ok(None);
                }
                let x = table.grid[table.chosen[s]] as f64 / e;
                match &lines {
                    Some(lines) => Ok(Some(e * lines[t].eval(x) * 100.0 * scale)),
                    None if x > max_g + FLOAT_TOL => Ok(None),
                    None => {
                        let x = x.min(max_g);
                        Ok(Some(e * exp.budget(t).frontier_interp(x)? * 100.0 * scale))
                    }
                }
            }
        }
    };
    let tol = FLOAT_TOL * 100.0 * scale;
    if theory.is_quasilinear() {
        let mut w = vec![f64::INFINITY; n * n];
        for s in 0..n {
            for t in 0..n {
                w[s * n + t] = if s == t {
                    0.0
                } else {
                    match value(t, s)? {
                        Some(v) => table.own(t) as f64 - v,
                        None => f64::INFINITY,
                    }
                };
            }
        }
        Ok(!has_negative_cycle_f64(n, &w, tol))
    } else {
        let mut weak = vec![false; n * n];
        let mut strict = vec![false; n * n];
        for s in 0..n {
            let own = table.own(s) as f64;
            for t in 0..n {
                if s == t {
                    weak[s * n + t] = true;
                } else if let Some(v) = value(t, s)? {
                    weak[s * n + t] = own <= v + tol;
                    strict[s * n + t] = own < v - tol;
                }
            }
        }
        Ok(garp_violation(&RevealedRelations::from_flat(n, weak, strict)).is_none())
    }
}

fn has_negative_cycle_f64(n: usize, w: &[f64], tol: f64) -> bool {
    let mut dist = vec![0.0f64; n];
    for _ in 0..n {
        let mut changed = false;
        for s in 0..n {
            for t in 0..n {
                let cand = dist[s] + w[s * n + t];
                if cand < dist[t] - tol {
                    dist[t] = cand;
                    changed = true;
                }
            }
        }
        if !changed {
            return false;
        }
    }
    true
}
