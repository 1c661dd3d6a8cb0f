//! Problem instances and allocations.
//!
//! Agents and items are addressed by their position in the input; that order
//! is also the lexicographic order every tie-break in the crate uses.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{sum, Scalar};
use crate::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Goods,
    Chores,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Goods => "goods",
            Kind::Chores => "chores",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agent<S> {
    pub id: String,
    pub weight: S,
}

/// One broken instance invariant. Agent and item numbers are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NonPositiveWeight { agent: usize },
    NegativeValue { agent: usize, item: usize },
    DuplicateAgentId(String),
    DuplicateItemId(String),
    DimensionMismatch(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveWeight { agent } => write!(f, "non-positive weight: agent {}", agent + 1),
            Violation::NegativeValue { agent, item } => {
                write!(f, "negative value: agent {}, item {}", agent + 1, item + 1)
            }
            Violation::DuplicateAgentId(id) => write!(f, "duplicate agent id: {id}"),
            Violation::DuplicateItemId(id) => write!(f, "duplicate item id: {id}"),
            Violation::DimensionMismatch(detail) => write!(f, "dimension mismatch: {detail}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid instance: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange { what: &'static str, index: usize, len: usize },
    #[error("agent {} has zero total value", .agent + 1)]
    ZeroTotal { agent: usize },
    #[error("bad allocation: {0}")]
    BadAllocation(String),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Agents with positive weights, items, and a non-negative value (goods) or
/// cost (chores) matrix indexed `[agent][item]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance<S = Value> {
    kind: Kind,
    agents: Vec<Agent<S>>,
    items: Vec<String>,
    matrix: Vec<Vec<S>>,
}

impl<S: Scalar> Instance<S> {
    /// Builds and validates.
    pub fn new(kind: Kind, agents: Vec<Agent<S>>, items: Vec<String>, matrix: Vec<Vec<S>>) -> Result<Self, ModelError> {
        let inst = Self::unchecked(kind, agents, items, matrix);
        let violations = inst.validate();
        if violations.is_empty() {
            Ok(inst)
        } else {
            Err(ModelError::Invalid(violations))
        }
    }

    /// Builds without validation; [`Instance::validate`] reports what is wrong.
    pub fn unchecked(kind: Kind, agents: Vec<Agent<S>>, items: Vec<String>, matrix: Vec<Vec<S>>) -> Self {
        Instance { kind, agents, items, matrix }
    }

    /// Agents named `1..=n`, items `g1..` (goods) or `b1..` (chores).
    pub fn with_default_ids(kind: Kind, weights: Vec<S>, matrix: Vec<Vec<S>>) -> Result<Self, ModelError> {
        let m = matrix.first().map_or(0, Vec::len);
        let prefix = match kind {
            Kind::Goods => "g",
            Kind::Chores => "b",
        };
        let agents = weights
            .into_iter()
            .enumerate()
            .map(|(i, weight)| Agent { id: (i + 1).to_string(), weight })
            .collect();
        let items = (1..=m).map(|g| format!("{prefix}{g}")).collect();
        Self::new(kind, agents, items, matrix)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, a) in self.agents.iter().enumerate() {
            if !a.weight.is_positive() {
                out.push(Violation::NonPositiveWeight { agent: i });
            }
        }
        let mut seen = HashSet::new();
        for a in &self.agents {
            if !seen.insert(a.id.as_str()) {
                out.push(Violation::DuplicateAgentId(a.id.clone()));
            }
        }
        let mut seen = HashSet::new();
        for it in &self.items {
            if !seen.insert(it.as_str()) {
                out.push(Violation::DuplicateItemId(it.clone()));
            }
        }
        if self.matrix.len() != self.agents.len() {
            out.push(Violation::DimensionMismatch(format!(
                "{} value rows for {} agents",
                self.matrix.len(),
                self.agents.len()
            )));
        }
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != self.items.len() {
                out.push(Violation::DimensionMismatch(format!(
                    "row {} has {} entries for {} items",
                    i + 1,
                    row.len(),
                    self.items.len()
                )));
            }
            for (g, x) in row.iter().enumerate() {
                if x.is_negative() {
                    out.push(Violation::NegativeValue { agent: i, item: g });
                }
            }
        }
        out
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn m(&self) -> usize {
        self.items.len()
    }

    pub fn agents(&self) -> &[Agent<S>] {
        &self.agents
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn weight(&self, agent: usize) -> &S {
        &self.agents[agent].weight
    }

    pub fn weights(&self) -> Vec<S> {
        self.agents.iter().map(|a| a.weight.clone()).collect()
    }

    pub fn value(&self, agent: usize, item: usize) -> &S {
        &self.matrix[agent][item]
    }

    pub fn row(&self, agent: usize) -> &[S] {
        &self.matrix[agent]
    }

    pub fn matrix(&self) -> &[Vec<S>] {
        &self.matrix
    }

    /// `v_agent(items)`, additive.
    pub fn value_of(&self, agent: usize, items: &[usize]) -> S {
        sum(items.iter().map(|&g| &self.matrix[agent][g]))
    }

    pub fn total_value(&self, agent: usize) -> S {
        sum(&self.matrix[agent])
    }

    /// Value (or cost) of agent `bundle`'s bundle in the eyes of `evaluator`.
    pub fn bundle_value(&self, alloc: &Allocation, evaluator: usize, bundle: usize) -> Result<S, ModelError> {
        self.check_allocation(alloc)?;
        if evaluator >= self.n() {
            return Err(ModelError::IndexOutOfRange { what: "evaluator", index: evaluator, len: self.n() });
        }
        if bundle >= self.n() {
            return Err(ModelError::IndexOutOfRange { what: "bundle", index: bundle, len: self.n() });
        }
        Ok(sum(alloc.owners().iter().enumerate().filter(|(_, &o)| o == bundle).map(|(g, _)| &self.matrix[evaluator][g])))
    }

    pub fn check_allocation(&self, alloc: &Allocation) -> Result<(), ModelError> {
        if alloc.n_agents() != self.n() || alloc.m() != self.m() {
            return Err(ModelError::BadAllocation(format!(
                "allocation covers {} agents / {} items, instance has {} / {}",
                alloc.n_agents(),
                alloc.m(),
                self.n(),
                self.m()
            )));
        }
        Ok(())
    }

    /// Scales each row to total exactly one; weights are untouched.
    pub fn normalize_values(&self) -> Result<Self, ModelError> {
        let mut matrix = Vec::with_capacity(self.n());
        for (i, row) in self.matrix.iter().enumerate() {
            let total = sum(row);
            if total.is_zero() {
                return Err(ModelError::ZeroTotal { agent: i });
            }
            matrix.push(row.iter().map(|x| x.clone() / total.clone()).collect());
        }
        Ok(Instance { matrix, ..self.clone() })
    }

    pub fn with_weights(&self, weights: Vec<S>) -> Result<Self, ModelError> {
        if weights.len() != self.n() {
            return Err(ModelError::Invalid(vec![Violation::DimensionMismatch(format!(
                "{} weights for {} agents",
                weights.len(),
                self.n()
            ))]));
        }
        let agents = self
            .agents
            .iter()
            .zip(weights)
            .map(|(a, weight)| Agent { id: a.id.clone(), weight })
            .collect();
        Self::new(self.kind, agents, self.items.clone(), self.matrix.clone())
    }

    pub fn with_matrix(&self, matrix: Vec<Vec<S>>) -> Result<Self, ModelError> {
        Self::new(self.kind, self.agents.clone(), self.items.clone(), matrix)
    }

    pub fn with_kind(&self, kind: Kind) -> Self {
        Instance { kind, ..self.clone() }
    }

    pub fn agent_index(&self, id: &str) -> Option<usize> {
        self.agents.iter().position(|a| a.id == id)
    }

    pub fn item_index(&self, id: &str) -> Option<usize> {
        self.items.iter().position(|g| g == id)
    }
}

/// A complete assignment of every item to exactly one agent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Allocation {
    owners: Vec<usize>,
    n_agents: usize,
}

impl Allocation {
    pub fn from_owners(owners: Vec<usize>, n_agents: usize) -> Result<Self, ModelError> {
        if let Some(&bad) = owners.iter().find(|&&o| o >= n_agents) {
            return Err(ModelError::IndexOutOfRange { what: "owner", index: bad, len: n_agents });
        }
        Ok(Allocation { owners, n_agents })
    }

    /// Bundles must partition `0..m` exactly.
    pub fn from_bundles(bundles: &[Vec<usize>], m: usize) -> Result<Self, ModelError> {
        let mut owners = vec![usize::MAX; m];
        for (agent, bundle) in bundles.iter().enumerate() {
            for &g in bundle {
                if g >= m {
                    return Err(ModelError::IndexOutOfRange { what: "item", index: g, len: m });
                }
                if owners[g] != usize::MAX {
                    return Err(ModelError::BadAllocation(format!("item {} assigned twice", g + 1)));
                }
                owners[g] = agent;
            }
        }
        if let Some(g) = owners.iter().position(|&o| o == usize::MAX) {
            return Err(ModelError::BadAllocation(format!("item {} unassigned", g + 1)));
        }
        Ok(Allocation { owners, n_agents: bundles.len() })
    }

    pub fn owners(&self) -> &[usize] {
        &self.owners
    }

    pub fn owner(&self, item: usize) -> usize {
        self.owners[item]
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn m(&self) -> usize {
        self.owners.len()
    }

    /// Items of each agent in increasing item order.
    pub fn bundles(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_agents];
        for (g, &o) in self.owners.iter().enumerate() {
            out[o].push(g);
        }
        out
    }

    pub fn bundle(&self, agent: usize) -> Vec<usize> {
        self.owners.iter().enumerate().filter(|(_, &o)| o == agent).map(|(g, _)| g).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{get_case, CaseId};
    use num_traits::Zero;
    use proptest::prelude::*;

    fn ints(xs: &[u64]) -> Vec<Value> {
        xs.iter().map(|&x| Value::from_u64(x)).collect()
    }

    #[test]
    fn well_formed_instance_validates() {
        let inst = Instance::with_default_ids(Kind::Goods, ints(&[1, 2]), vec![ints(&[1, 2, 3, 4]), ints(&[4, 3, 2, 1])]);
        assert!(inst.unwrap().validate().is_empty());
    }

    #[test]
    fn zero_weight_is_reported() {
        let agents = vec![
            Agent { id: "1".into(), weight: Value::from_u64(1) },
            Agent { id: "2".into(), weight: Value::zero() },
        ];
        let inst = Instance::unchecked(Kind::Goods, agents, vec!["g1".into()], vec![ints(&[1]), ints(&[1])]);
        let v = inst.validate();
        assert_eq!(v, vec![Violation::NonPositiveWeight { agent: 1 }]);
        assert_eq!(v[0].to_string(), "non-positive weight: agent 2");
    }

    #[test]
    fn row_count_mismatch_is_reported() {
        let agents = (1..=2).map(|i| Agent { id: i.to_string(), weight: Value::from_u64(1) }).collect();
        let inst = Instance::unchecked(Kind::Goods, agents, vec!["g1".into()], vec![ints(&[1]); 3]);
        let v = inst.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().starts_with("dimension mismatch"));
    }

    #[test]
    fn negative_values_and_duplicates_are_reported() {
        let agents = vec![
            Agent { id: "x".into(), weight: Value::from_u64(1) },
            Agent { id: "x".into(), weight: Value::from_u64(1) },
        ];
        let m = vec![vec![-Value::from_u64(1), Value::zero()], ints(&[0, 0])];
        let inst = Instance::unchecked(Kind::Chores, agents, vec!["b".into(), "b".into()], m);
        let v = inst.validate();
        assert!(v.contains(&Violation::NegativeValue { agent: 0, item: 0 }));
        assert!(v.contains(&Violation::DuplicateAgentId("x".into())));
        assert!(v.contains(&Violation::DuplicateItemId("b".into())));
    }

    #[test]
    fn bundle_values_on_paper_cases() {
        let goods = get_case(CaseId::WefxN2, None).unwrap();
        // A_1 = {a1, a2}, A_2 = {a3, a4}
        let alloc = Allocation::from_owners(vec![0, 0, 1, 1], 2).unwrap();
        let two_phi = Value::phi() + Value::phi();
        assert_eq!(goods.bundle_value(&alloc, 0, 1).unwrap(), two_phi);
        let chores = get_case(CaseId::XwefN2, None).unwrap();
        assert_eq!(chores.bundle_value(&alloc, 1, 1).unwrap(), two_phi);
        let all_to_first = Allocation::from_owners(vec![0; 4], 2).unwrap();
        assert!(goods.bundle_value(&all_to_first, 1, 1).unwrap().is_zero());
        assert!(matches!(goods.bundle_value(&alloc, 2, 0), Err(ModelError::IndexOutOfRange { .. })));
    }

    #[test]
    fn normalize_scales_rows() {
        let inst = Instance::with_default_ids(Kind::Goods, ints(&[1, 1]), vec![ints(&[1, 1, 2]), ints(&[4, 0, 4])]).unwrap();
        let norm = inst.normalize_values().unwrap();
        let q = |a, b| Value::ratio(a, b);
        assert_eq!(norm.row(0), &[q(1, 4), q(1, 4), q(1, 2)]);
        assert_eq!(norm.row(1), &[q(1, 2), Value::zero(), q(1, 2)]);
        assert_eq!(norm.normalize_values().unwrap(), norm);
        assert_eq!(norm.weights(), inst.weights());
    }

    #[test]
    fn normalize_rejects_zero_rows() {
        let inst = Instance::with_default_ids(Kind::Goods, ints(&[1, 1]), vec![ints(&[0, 0]), ints(&[1, 0])]).unwrap();
        let err = inst.normalize_values().unwrap_err();
        assert_eq!(err.to_string(), "agent 1 has zero total value");
    }

    #[test]
    fn allocation_from_bundles_checks_partition() {
        assert!(Allocation::from_bundles(&[vec![0], vec![0, 1]], 2).is_err());
        assert!(Allocation::from_bundles(&[vec![0], vec![]], 2).is_err());
        let a = Allocation::from_bundles(&[vec![1], vec![0, 2]], 3).unwrap();
        assert_eq!(a.owners(), &[1, 0, 1]);
        assert_eq!(a.bundles(), vec![vec![1], vec![0, 2]]);
    }

    fn instance_and_owners() -> impl Strategy<Value = (Instance, Vec<usize>)> {
        (1usize..4, 0usize..7).prop_flat_map(|(n, m)| {
            (
                proptest::collection::vec(proptest::collection::vec(0u64..20, m), n),
                proptest::collection::vec(1u64..5, n),
                proptest::collection::vec(0..n, m),
            )
                .prop_map(|(rows, w, owners)| {
                    let matrix = rows.iter().map(|r| ints(r)).collect();
                    (Instance::with_default_ids(Kind::Goods, ints(&w), matrix).unwrap(), owners)
                })
        })
    }

    proptest! {
        #[test]
        fn bundle_values_partition_the_total((inst, owners) in instance_and_owners()) {
            let alloc = Allocation::from_owners(owners, inst.n()).unwrap();
            for i in 0..inst.n() {
                let total = (0..inst.n()).map(|j| inst.bundle_value(&alloc, i, j).unwrap()).fold(Value::zero(), |a, b| a + b);
                prop_assert_eq!(total, inst.total_value(i));
                // additivity over a split of each bundle
                for bundle in alloc.bundles() {
                    let (s, t) = bundle.split_at(bundle.len() / 2);
                    prop_assert_eq!(inst.value_of(i, &bundle), inst.value_of(i, s) + inst.value_of(i, t));
                }
            }
        }

        #[test]
        fn normalize_preserves_ratios((inst, _) in instance_and_owners()) {
            let Ok(norm) = inst.normalize_values() else { return Ok(()); };
            prop_assert_eq!(&norm.normalize_values().unwrap(), &norm);
            for i in 0..inst.n() {
                for g in 0..inst.m() {
                    for h in 0..inst.m() {
                        prop_assert_eq!(
                            inst.value(i, g).clone() * norm.value(i, h).clone(),
                            inst.value(i, h).clone() * norm.value(i, g).clone()
                        );
                    }
                }
            }
        }
    }
}
