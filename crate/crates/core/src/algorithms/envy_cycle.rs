use std::cmp::Ordering;
use std::collections::HashSet;

use super::envy_graph::EnvyGraph;
use super::{argmin_by, require_kind, violation, violation_in, AlgorithmError};
use crate::fairness::{verify_bundles, Criterion};
use crate::model::{Allocation, Instance, Kind};
use crate::numeric::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Every agent has the same value row.
    IdenticalCardinal,
    /// Every agent ranks the items in one common (weak) order.
    IdenticalOrdinal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnvyCycleOptions {
    pub check_preconditions: bool,
    /// Re-verify WEFX after every round and the rotation guarantees.
    pub check_invariants: bool,
}

impl Default for EnvyCycleOptions {
    fn default() -> Self {
        EnvyCycleOptions { check_preconditions: true, check_invariants: true }
    }
}

impl EnvyCycleOptions {
    /// Runs the procedure on arbitrary additive valuations with no checks.
    pub fn unchecked() -> Self {
        EnvyCycleOptions { check_preconditions: false, check_invariants: false }
    }
}

/// One bundle rotation along an envy cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rotation<S> {
    /// Number of items allocated when the rotation happened.
    pub round: usize,
    /// `cycle[t]` envied `cycle[t + 1]` and took its bundle.
    pub cycle: Vec<usize>,
    pub min_weight_member: usize,
    /// That member's value for its own bundle before and after.
    pub before: S,
    pub after: S,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvyCycleRun<S> {
    pub allocation: Allocation,
    /// The common item order.
    pub order: Vec<usize>,
    /// `(agent, item)` in allocation order.
    pub picks: Vec<(usize, usize)>,
    pub rotations: Vec<Rotation<S>>,
}

/// Items sorted by the agents' value vectors, descending lexicographically
/// (agent 1 first), then by index. When any common weak order exists this
/// is one.
pub fn common_order<S: Scalar>(inst: &Instance<S>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..inst.m()).collect();
    order.sort_by(|&g, &h| {
        (0..inst.n())
            .map(|i| inst.value(i, h).cmp(inst.value(i, g)))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
            .then(g.cmp(&h))
    });
    order
}

pub fn envy_cycle_weighted<S: Scalar>(inst: &Instance<S>, mode: Mode) -> Result<EnvyCycleRun<S>, AlgorithmError> {
    envy_cycle_weighted_with(inst, mode, EnvyCycleOptions::default())
}

/// Weighted envy-cycle elimination.
///
/// Each round gives the next item to an unenvied agent: among sources the
/// one with the least `v_i(A_i) / w_i`, which takes its favourite remaining
/// item (earliest in the common order on ties). While no source exists, a
/// cycle of the envy graph is rotated.
pub fn envy_cycle_weighted_with<S: Scalar>(
    inst: &Instance<S>,
    mode: Mode,
    opts: EnvyCycleOptions,
) -> Result<EnvyCycleRun<S>, AlgorithmError> {
    require_kind(inst, Kind::Goods)?;
    let (n, m) = (inst.n(), inst.m());
    let order = common_order(inst);
    if opts.check_preconditions {
        check_mode(inst, mode, &order)?;
    }
    let mut position = vec![0; m];
    for (p, &g) in order.iter().enumerate() {
        position[g] = p;
    }

    let mut bundles: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut remaining: Vec<usize> = order.clone();
    let mut picks = Vec::with_capacity(m);
    let mut rotations: Vec<Rotation<S>> = Vec::new();

    for round in 0..m {
        let mut graph = EnvyGraph::of_bundles(inst, &bundles);
        let mut seen: HashSet<Vec<Vec<usize>>> = HashSet::new();
        while graph.sources().is_empty() {
            if !seen.insert(bundles.clone()) {
                if opts.check_invariants {
                    return Err(violation(inst, "envy-cycle termination", "rotation revisited a state", &rotations));
                }
                return Err(AlgorithmError::NonTermination);
            }
            let cycle = graph.find_cycle().expect("a graph without sources has a cycle");
            let rotation = rotate(inst, &mut bundles, round, cycle);
            if opts.check_invariants {
                if mode == Mode::IdenticalCardinal {
                    return Err(violation(inst, "identical valuations admit no envy cycle", format!("{rotation:?}"), &bundles));
                }
                if rotation.after <= rotation.before {
                    return Err(violation(
                        inst,
                        "rotation strictly improves the minimum-weight member",
                        format!("{rotation:?}"),
                        &bundles,
                    ));
                }
            }
            rotations.push(rotation);
            graph = EnvyGraph::of_bundles(inst, &bundles);
        }

        let sources = graph.sources();
        let own: Vec<S> = (0..n).map(|i| inst.value_of(i, &bundles[i])).collect();
        // least v_i(A_i) / w_i among sources
        let agent = argmin_by(sources, |&a, &b| {
            own[a].clone() * inst.weight(b).clone() < own[b].clone() * inst.weight(a).clone()
        })
        .expect("sources exist");
        let (slot, item) = remaining
            .iter()
            .copied()
            .enumerate()
            .fold(None::<(usize, usize)>, |best, (slot, g)| match best {
                Some((_, b)) if inst.value(agent, g) <= inst.value(agent, b) => best,
                _ => Some((slot, g)),
            })
            .expect("items remain");
        debug_assert!(remaining[..slot].iter().all(|&g| position[g] < position[item]));
        remaining.remove(slot);
        bundles[agent].push(item);
        picks.push((agent, item));

        if opts.check_invariants {
            let report = verify_bundles(inst, &bundles, Criterion::Wefx).map_err(|e| AlgorithmError::Precondition(e.to_string()))?;
            if !report.satisfied {
                let detail = format!("after round {round}, pair {:?}", report.worst_pair);
                return Err(violation_in(inst, "partial allocation stays WEFX", detail, (&picks, &rotations), Some(bundles)));
            }
        }
    }

    for b in &mut bundles {
        b.sort_unstable();
    }
    let allocation = Allocation::from_bundles(&bundles, m)?;
    if opts.check_invariants {
        let report = verify_bundles(inst, &bundles, Criterion::Wefx).map_err(|e| AlgorithmError::Precondition(e.to_string()))?;
        if !report.satisfied {
            let detail = format!("pair {:?}", report.worst_pair);
            return Err(violation_in(inst, "envy-cycle output is WEFX", detail, (&picks, &rotations), Some(bundles)));
        }
    }
    Ok(EnvyCycleRun { allocation, order, picks, rotations })
}

fn check_mode<S: Scalar>(inst: &Instance<S>, mode: Mode, order: &[usize]) -> Result<(), AlgorithmError> {
    match mode {
        Mode::IdenticalCardinal => {
            if let Some(i) = (1..inst.n()).find(|&i| inst.row(i) != inst.row(0)) {
                return Err(AlgorithmError::Mode(format!("value row of agent {} differs from agent 1", i + 1)));
            }
        }
        Mode::IdenticalOrdinal => {
            for i in 0..inst.n() {
                if let Some(w) = order.windows(2).find(|w| inst.value(i, w[0]) < inst.value(i, w[1])) {
                    return Err(AlgorithmError::Mode(format!(
                        "no common ordinal order: agent {} ranks {} above {}",
                        i + 1,
                        inst.items()[w[1]],
                        inst.items()[w[0]]
                    )));
                }
            }
        }
    }
    Ok(())
}

fn rotate<S: Scalar>(inst: &Instance<S>, bundles: &mut [Vec<usize>], round: usize, cycle: Vec<usize>) -> Rotation<S> {
    let min_weight_member = argmin_by(cycle.iter().copied(), |&a, &b| inst.weight(a) < inst.weight(b)).expect("non-empty cycle");
    let before = inst.value_of(min_weight_member, &bundles[min_weight_member]);
    let taken: Vec<Vec<usize>> = (0..cycle.len()).map(|t| bundles[cycle[(t + 1) % cycle.len()]].clone()).collect();
    for (t, bundle) in taken.into_iter().enumerate() {
        bundles[cycle[t]] = bundle;
    }
    let after = inst.value_of(min_weight_member, &bundles[min_weight_member]);
    Rotation { round, cycle, min_weight_member, before, after }
}
