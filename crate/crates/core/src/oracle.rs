//! Exhaustive search over all `n^m` allocations.
//!
//! Allocations are scanned as owner vectors in lexicographic order (item 1
//! most significant). The scan is cut into shards by the owners of the first
//! few items; shards may run on a thread pool, and their results are merged
//! in shard order, so the answer never depends on the number of threads.

use std::cmp::Ordering;

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::{get_case, CaseId, CorpusError};
use crate::fairness::{Criterion, FairnessError};
use crate::model::{Allocation, Instance, Kind};
use crate::numeric::{Extended, Scalar};
use crate::Value;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    /// Largest `n^m` the oracle agrees to enumerate.
    pub budget: u64,
    /// Worker threads; 1 runs on the calling thread.
    pub jobs: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { budget: DEFAULT_BUDGET, jobs: 1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    Exists,
    BestFactor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult<S> {
    pub objective: Objective,
    pub criterion: Criterion,
    pub kind: Kind,
    pub exists: bool,
    pub witness: Option<Allocation>,
    /// Best any-item factor; only computed by [`best_factor`].
    pub best_factor: Option<Extended<S>>,
    pub argbest: Option<Allocation>,
    /// Allocations examined: `n^m` on a full scan, the witness's position
    /// plus one when an existence scan stops early.
    pub allocations_scanned: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("enumeration needs {required} allocations, budget is {budget}")]
    BudgetExceeded { required: String, budget: u64 },
    #[error(transparent)]
    Fairness(#[from] FairnessError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("invalid grid point {0}: must lie strictly between 0 and 1")]
    GridPoint(String),
    #[error("thread pool: {0}")]
    Pool(String),
}

/// `n^m`, or [`OracleError::BudgetExceeded`] when it is above `budget`.
pub fn allocation_count(n: usize, m: usize, budget: u64) -> Result<u64, OracleError> {
    let mut total: u128 = 1;
    for _ in 0..m {
        total = total.saturating_mul(n as u128);
    }
    if total > budget as u128 {
        let required = if total == u128::MAX { format!("{n}^{m}") } else { total.to_string() };
        return Err(OracleError::BudgetExceeded { required, budget });
    }
    Ok(total as u64)
}

pub fn exists_exact<S: Scalar>(inst: &Instance<S>, criterion: Criterion) -> Result<OracleResult<S>, OracleError> {
    exists_exact_with(inst, criterion, &OracleOptions::default())
}

/// First allocation, in lexicographic owner order, satisfying `criterion`.
pub fn exists_exact_with<S: Scalar>(inst: &Instance<S>, criterion: Criterion, opts: &OracleOptions) -> Result<OracleResult<S>, OracleError> {
    if !criterion.supports(inst.kind()) {
        return Err(FairnessError::KindMismatch { criterion, kind: inst.kind() }.into());
    }
    let total = allocation_count(inst.n(), inst.m(), opts.budget)?;
    let eval = Evaluator::new(inst, criterion);
    let plan = ShardPlan::new(inst.n(), inst.m());
    let found = run_shards(opts.jobs, plan.count(), |s| {
        let mut owners = plan.first(s);
        loop {
            if eval.satisfied(&owners) {
                return Some(owners);
            }
            if !plan.advance(&mut owners) {
                return None;
            }
        }
    })?
    .into_iter()
    .flatten()
    .next();

    let (witness, scanned) = match found {
        Some(owners) => {
            let scanned = rank(&owners, inst.n()) + 1;
            (Some(to_allocation(owners, inst.n())), scanned)
        }
        None => (None, total),
    };
    Ok(OracleResult {
        objective: Objective::Exists,
        criterion,
        kind: inst.kind(),
        exists: witness.is_some(),
        witness,
        best_factor: None,
        argbest: None,
        allocations_scanned: scanned,
    })
}

pub fn best_factor<S: Scalar>(inst: &Instance<S>) -> Result<OracleResult<S>, OracleError> {
    best_factor_with(inst, &OracleOptions::default())
}

/// The largest WEFX factor (goods) or smallest XWEF factor (chores) over all
/// allocations, attained first by `argbest` in lexicographic owner order.
/// `exists` reports whether that optimum meets the unrelaxed criterion.
pub fn best_factor_with<S: Scalar>(inst: &Instance<S>, opts: &OracleOptions) -> Result<OracleResult<S>, OracleError> {
    let criterion = Criterion::any_item(inst.kind());
    let total = allocation_count(inst.n(), inst.m(), opts.budget)?;
    let eval = Evaluator::new(inst, criterion);
    let plan = ShardPlan::new(inst.n(), inst.m());
    let shard_bests = run_shards(opts.jobs, plan.count(), |s| {
        let mut owners = plan.first(s);
        let mut best: Option<(Frac<S>, Vec<usize>)> = None;
        loop {
            let f = eval.factor(&owners);
            if best.as_ref().is_none_or(|(b, _)| eval.better(&f, b)) {
                best = Some((f, owners.clone()));
            }
            if !plan.advance(&mut owners) {
                return best;
            }
        }
    })?;
    // shards are in lexicographic order, so keeping the earlier of equal optima is enough
    let mut best: Option<(Frac<S>, Vec<usize>)> = None;
    for cand in shard_bests.into_iter().flatten() {
        if best.as_ref().is_none_or(|(b, _)| eval.better(&cand.0, b)) {
            best = Some(cand);
        }
    }
    let (frac, owners) = best.expect("at least one allocation exists");
    let factor = frac.to_extended();
    let one = Extended::Finite(S::one());
    let exists = match inst.kind() {
        Kind::Goods => factor >= one,
        Kind::Chores => factor <= one,
    };
    let argbest = to_allocation(owners, inst.n());
    Ok(OracleResult {
        objective: Objective::BestFactor,
        criterion,
        kind: inst.kind(),
        exists,
        witness: exists.then(|| argbest.clone()),
        best_factor: Some(factor),
        argbest: Some(argbest),
        allocations_scanned: total,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepPoint {
    pub alpha: Value,
    pub result: OracleResult<Value>,
}

/// Best factor of a two-agent corpus case at weights `(alpha, 1 - alpha)`
/// for each grid point, in grid order.
pub fn weight_sweep(case: CaseId, grid: &[Value], opts: &OracleOptions) -> Result<Vec<SweepPoint>, OracleError> {
    if !case.parameterized() {
        return Err(CorpusError::NotParameterized(case).into());
    }
    let (zero, one) = (Value::from_u64(0), Value::from_u64(1));
    if let Some(bad) = grid.iter().find(|a| **a <= zero || **a >= one) {
        return Err(OracleError::GridPoint(bad.render_exact()));
    }
    grid.iter()
        .map(|alpha| {
            let inst = get_case(case, Some(alpha.clone()))?;
            Ok(SweepPoint { alpha: alpha.clone(), result: best_factor_with(&inst, opts)? })
        })
        .collect()
}

fn run_shards<T: Send>(jobs: usize, shards: usize, f: impl Fn(usize) -> T + Sync) -> Result<Vec<T>, OracleError> {
    if jobs <= 1 {
        return Ok((0..shards).map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| OracleError::Pool(e.to_string()))?;
    Ok(pool.install(|| (0..shards).into_par_iter().map(&f).collect()))
}

fn to_allocation(owners: Vec<usize>, n: usize) -> Allocation {
    Allocation::from_owners(owners, n).expect("enumerated owners are in range")
}

/// Position of `owners` in the lexicographic enumeration.
fn rank(owners: &[usize], n: usize) -> u64 {
    owners.iter().fold(0u64, |acc, &o| acc * n as u64 + o as u64)
}

/// Fixes the owners of the first `prefix` items per shard. The split does
/// not depend on the thread count.
struct ShardPlan {
    n: usize,
    m: usize,
    prefix: usize,
}

impl ShardPlan {
    const TARGET_SHARDS: usize = 64;

    fn new(n: usize, m: usize) -> Self {
        let mut prefix = 0;
        let mut shards = 1;
        while prefix < m && shards < Self::TARGET_SHARDS && n > 1 {
            prefix += 1;
            shards *= n;
        }
        ShardPlan { n, m, prefix }
    }

    fn count(&self) -> usize {
        self.n.pow(self.prefix as u32)
    }

    fn first(&self, shard: usize) -> Vec<usize> {
        let mut owners = vec![0; self.m];
        let mut s = shard;
        for g in (0..self.prefix).rev() {
            owners[g] = s % self.n;
            s /= self.n;
        }
        owners
    }

    /// Next owner vector inside the shard; `false` once the shard is exhausted.
    fn advance(&self, owners: &mut [usize]) -> bool {
        for g in (self.prefix..self.m).rev() {
            owners[g] += 1;
            if owners[g] < self.n {
                return true;
            }
            owners[g] = 0;
        }
        false
    }
}

/// A non-negative quotient `num / den`; `den == 0` means `+inf`.
#[derive(Clone, Debug)]
struct Frac<S> {
    num: S,
    den: S,
}

impl<S: Scalar> Frac<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.den.is_zero(), other.den.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => (self.num.clone() * other.den.clone()).cmp(&(other.num.clone() * self.den.clone())),
        }
    }

    fn to_extended(&self) -> Extended<S> {
        Extended::quotient(&self.num, &self.den)
    }
}

/// Lean re-implementation of the verifier's factor for the enumeration hot
/// loop: no reports, no divisions. Cross-checked against `fairness::verify`.
struct Evaluator<'a, S> {
    inst: &'a Instance<S>,
    criterion: Criterion,
}

impl<'a, S: Scalar> Evaluator<'a, S> {
    fn new(inst: &'a Instance<S>, criterion: Criterion) -> Self {
        Evaluator { inst, criterion }
    }

    /// `sums[i][j] = v_i(A_j)` and the item of `A_j` that the criterion
    /// removes from agent `i`'s point of view, as its value.
    fn tables(&self, owners: &[usize]) -> (Vec<Vec<S>>, Vec<Vec<Option<S>>>) {
        let n = self.inst.n();
        let largest = matches!(self.criterion, Criterion::Wef1 | Criterion::OneWef);
        let mut sums = vec![vec![S::zero(); n]; n];
        let mut drop: Vec<Vec<Option<S>>> = vec![vec![None; n]; n];
        for (g, &o) in owners.iter().enumerate() {
            for i in 0..n {
                let v = self.inst.value(i, g);
                sums[i][o] = sums[i][o].clone() + v.clone();
                let slot = &mut drop[i][o];
                let replace = match slot {
                    None => true,
                    Some(cur) if largest => v > cur,
                    Some(cur) => v < cur,
                };
                if replace {
                    *slot = Some(v.clone());
                }
            }
        }
        (sums, drop)
    }

    /// The pair factor `(i, j)` as a fraction.
    fn pair(&self, sums: &[Vec<S>], drop: &[Vec<Option<S>>], i: usize, j: usize) -> Frac<S> {
        let (wi, wj) = (self.inst.weight(i).clone(), self.inst.weight(j).clone());
        let removed = |bundle: usize| match (&self.criterion, &drop[i][bundle]) {
            (Criterion::Wef, _) | (_, None) => sums[i][bundle].clone(),
            (_, Some(v)) => sums[i][bundle].clone() - v.clone(),
        };
        match self.inst.kind() {
            Kind::Goods => Frac { num: sums[i][i].clone() * wj, den: removed(j) * wi },
            Kind::Chores => {
                let lhs = removed(i);
                if lhs.is_zero() {
                    Frac { num: S::zero(), den: S::one() }
                } else {
                    Frac { num: lhs * wj, den: sums[i][j].clone() * wi }
                }
            }
        }
    }

    fn pairs(&self, owners: &[usize]) -> impl Iterator<Item = Frac<S>> + '_ {
        let (sums, drop) = self.tables(owners);
        let n = self.inst.n();
        (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(move |(i, j)| self.pair(&sums, &drop, i, j))
    }

    fn satisfied(&self, owners: &[usize]) -> bool {
        let goods = self.inst.kind() == Kind::Goods;
        self.pairs(owners).all(|f| if goods { f.den.is_zero() || f.num >= f.den } else { !f.den.is_zero() && f.num <= f.den })
    }

    /// Goods: minimum over pairs (`+inf` if none). Chores: maximum (`0` if none).
    fn factor(&self, owners: &[usize]) -> Frac<S> {
        let goods = self.inst.kind() == Kind::Goods;
        let init = if goods { Frac { num: S::one(), den: S::zero() } } else { Frac { num: S::zero(), den: S::one() } };
        self.pairs(owners).fold(init, |acc, f| {
            let keep_new = if goods { f.cmp(&acc) == Ordering::Less } else { f.cmp(&acc) == Ordering::Greater };
            if keep_new {
                f
            } else {
                acc
            }
        })
    }

    /// Whether allocation factor `a` strictly beats `b` for this kind.
    fn better(&self, a: &Frac<S>, b: &Frac<S>) -> bool {
        match self.inst.kind() {
            Kind::Goods => a.cmp(b) == Ordering::Greater,
            Kind::Chores => a.cmp(b) == Ordering::Less,
        }
    }
}
