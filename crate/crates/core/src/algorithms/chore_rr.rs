use super::{argmin_by, require_kind, violation_in, AlgorithmError};
use crate::fairness::{verify, Criterion};
use crate::model::{Allocation, Instance, Kind};
use crate::numeric::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pick {
    pub iteration: usize,
    pub agent: usize,
    pub chore: usize,
    /// The agent's counter `t_i` before this pick; counters start at 1.
    pub counter_before: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PickTrace {
    /// Picks made by the weighted loop.
    pub picks: Vec<Pick>,
    /// `(agent, chore)` from the closing pass, in agent order.
    pub final_picks: Vec<(usize, usize)>,
}

impl PickTrace {
    /// Picks (by position in `picks`) where the picker `i` is past its first
    /// pick and some `j` has `t_j / t_i < w_j / w_i`.
    pub fn lemma6_violations<S: Scalar>(&self, weights: &[S]) -> Vec<usize> {
        let mut t = vec![1u64; weights.len()];
        let mut out = Vec::new();
        for (p, pick) in self.picks.iter().enumerate() {
            let i = pick.agent;
            if t[i] != pick.counter_before {
                out.push(p);
            } else if t[i] > 1 {
                let ti = S::from_u64(t[i]);
                let bad = (0..weights.len()).any(|j| S::from_u64(t[j]) * weights[i].clone() < weights[j].clone() * ti.clone());
                if bad {
                    out.push(p);
                }
            }
            t[i] += 1;
        }
        out
    }
}

/// Weighted round-robin for chores.
///
/// While more chores remain than agents, the agent with the least `t_i / w_i`
/// takes its cheapest remaining chore; a closing pass in agent order then
/// hands every agent at most one of the rest. All ties go to the lowest index.
pub fn chore_round_robin<S: Scalar>(inst: &Instance<S>) -> Result<(Allocation, PickTrace), AlgorithmError> {
    require_kind(inst, Kind::Chores)?;
    let (n, l) = (inst.n(), inst.m());
    let orders: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut o: Vec<usize> = (0..l).collect();
            o.sort_by(|&a, &b| inst.value(i, a).cmp(inst.value(i, b)).then(a.cmp(&b)));
            o
        })
        .collect();
    let mut cursor = vec![0usize; n];
    let mut taken = vec![false; l];
    let mut owners = vec![usize::MAX; l];
    let mut remaining = l;
    let mut take = |i: usize, owners: &mut Vec<usize>| {
        while taken[orders[i][cursor[i]]] {
            cursor[i] += 1;
        }
        let c = orders[i][cursor[i]];
        taken[c] = true;
        owners[c] = i;
        c
    };

    let mut t = vec![1u64; n];
    let mut trace = PickTrace::default();
    let mut iteration = 0;
    while remaining > n {
        let agent = argmin_by(0..n, |&a, &b| {
            S::from_u64(t[a]) * inst.weight(b).clone() < S::from_u64(t[b]) * inst.weight(a).clone()
        })
        .expect("n >= 1");
        let chore = take(agent, &mut owners);
        trace.picks.push(Pick { iteration, agent, chore, counter_before: t[agent] });
        t[agent] += 1;
        remaining -= 1;
        iteration += 1;
    }
    for agent in 0..n {
        if remaining == 0 {
            break;
        }
        let chore = take(agent, &mut owners);
        trace.final_picks.push((agent, chore));
        remaining -= 1;
    }

    let allocation = Allocation::from_owners(owners, n)?;
    let bad = trace.lemma6_violations(&inst.weights());
    if !bad.is_empty() {
        return Err(violation_in(inst, "picking counters respect weight ratios", format!("picks {bad:?}"), &trace, Some(allocation.bundles())));
    }
    let report = verify(inst, &allocation, Criterion::OneWef).map_err(|e| AlgorithmError::Precondition(e.to_string()))?;
    if !report.satisfied {
        let detail = format!("{:?}", report.worst_pair);
        return Err(violation_in(inst, "chore round-robin is 1WEF", detail, &trace, Some(allocation.bundles())));
    }
    Ok((allocation, trace))
}
