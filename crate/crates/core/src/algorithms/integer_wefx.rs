use super::{argmin_by, require_kind, violation, violation_in, AlgorithmError};
use crate::fairness::{verify, Criterion};
use crate::model::{Allocation, Instance, Kind};
use crate::numeric::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IcycRun {
    pub allocation: Allocation,
    /// The `W + 1` greedy bundles, absent when `m <= W`.
    pub partition: Option<Vec<Vec<usize>>>,
    /// Index of the bundle agent 1 chose.
    pub chosen: Option<usize>,
}

/// Cut-and-choose for two agents with weights `1` and integer `W`.
///
/// Agent 2 splits the goods greedily into `W + 1` bundles (largest remaining
/// item into the currently poorest bundle); agent 1 takes its favourite
/// bundle and agent 2 keeps the rest. With `m <= W`, agent 1 simply takes
/// its single best good.
pub fn icyc_integer_wefx<S: Scalar>(inst: &Instance<S>) -> Result<IcycRun, AlgorithmError> {
    require_kind(inst, Kind::Goods)?;
    if inst.n() != 2 {
        return Err(AlgorithmError::Precondition(format!("needs exactly 2 agents, got {}", inst.n())));
    }
    if !inst.weight(0).is_one() {
        return Err(AlgorithmError::Precondition(format!("agent 1 must have weight 1, got {}", inst.weight(0))));
    }
    let big_w = match inst.weight(1).to_u64_exact() {
        Some(w) if w >= 1 => w as usize,
        _ => {
            return Err(AlgorithmError::Precondition(format!(
                "agent 2 weight must be a positive integer, got {}",
                inst.weight(1)
            )))
        }
    };
    let m = inst.m();

    let (chosen_items, partition, chosen) = if m <= big_w {
        let best = argmin_by(0..m, |&g, &h| inst.value(0, g) > inst.value(0, h));
        (best.into_iter().collect::<Vec<_>>(), None, None)
    } else {
        let parts = greedy_partition(inst, 1, big_w + 1);
        let values: Vec<S> = parts.iter().map(|p| inst.value_of(0, p)).collect();
        let k = argmin_by(0..parts.len(), |&a, &b| values[a] > values[b]).expect("W + 1 >= 2 bundles");
        (parts[k].clone(), Some(parts), Some(k))
    };

    let mut owners = vec![1; m];
    for &g in &chosen_items {
        owners[g] = 0;
    }
    let allocation = Allocation::from_owners(owners, 2)?;

    if let Some(parts) = &partition {
        if let Some((i, j)) = partition_lemma_violations(inst, 1, parts).first() {
            return Err(violation(inst, "greedy partition lemma", format!("bundles {i} and {j}"), parts));
        }
    }
    let report = verify(inst, &allocation, Criterion::Wefx).map_err(|e| AlgorithmError::Precondition(e.to_string()))?;
    if !report.satisfied {
        let detail = format!("pair {:?}", report.worst_pair);
        return Err(violation_in(inst, "integer-weight cut-and-choose is WEFX", detail, &partition, Some(allocation.bundles())));
    }
    Ok(IcycRun { allocation, partition, chosen })
}

/// Greedy split into `parts` bundles by `agent`'s values: the most valuable
/// remaining item goes to the least valuable bundle, lowest index on ties.
/// Items inside each bundle appear in the order they were added.
pub fn greedy_partition<S: Scalar>(inst: &Instance<S>, agent: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut items: Vec<usize> = (0..inst.m()).collect();
    items.sort_by(|&g, &h| inst.value(agent, h).cmp(inst.value(agent, g)).then(g.cmp(&h)));
    let mut bundles = vec![Vec::new(); parts];
    let mut totals = vec![S::zero(); parts];
    for g in items {
        let k = argmin_by(0..parts, |&a, &b| totals[a] < totals[b]).expect("parts >= 1");
        bundles[k].push(g);
        totals[k] = totals[k].clone() + inst.value(agent, g).clone();
    }
    bundles
}

/// Ordered pairs `(i, j)` with `v(P_i) < v(P_j)` but `v(P_i) < v(P_j - g)`
/// for some `g` in `P_j`; empty when the partition is envy-free up to any item.
pub fn partition_lemma_violations<S: Scalar>(inst: &Instance<S>, agent: usize, partition: &[Vec<usize>]) -> Vec<(usize, usize)> {
    let totals: Vec<S> = partition.iter().map(|p| inst.value_of(agent, p)).collect();
    let mut out = Vec::new();
    for (i, ti) in totals.iter().enumerate() {
        for (j, tj) in totals.iter().enumerate() {
            if ti >= tj {
                continue;
            }
            let min_item = partition[j].iter().map(|&g| inst.value(agent, g)).min().cloned().unwrap_or_else(S::zero);
            if *ti < tj.clone() - min_item {
                out.push((i, j));
            }
        }
    }
    out
}
