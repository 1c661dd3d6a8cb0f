//! Weighted envy-freeness criteria and their tight approximation factors.
//!
//! Every ordered pair `(i, j)`, `i != j`, gets a ratio. For goods it is
//! `[v_i(A_i) / w_i] / [rhs / w_j]` where `rhs` is `v_i(A_j)` with the
//! criterion's item removed; the allocation is fair when every ratio is at
//! least one, and the reported factor is the minimum. For chores the ratio is
//! `[lhs / w_i] / [c_i(B_j) / w_j]` where `lhs` is `c_i(B_i)` with the
//! criterion's item removed; fair means at most one, and the factor is the
//! maximum. A zero comparison side makes the ratio `+inf` for goods; for
//! chores a zero own side makes it `0` and otherwise a zero other side makes
//! it `+inf`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::model::{Allocation, Instance, Kind, ModelError};
use crate::numeric::{Extended, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Criterion {
    /// Weighted envy-free (goods or chores).
    Wef,
    /// Up to one good.
    Wef1,
    /// Up to any good.
    Wefx,
    /// Up to one chore.
    OneWef,
    /// Up to any chore.
    Xwef,
}

impl Criterion {
    pub const ALL: [Criterion; 5] = [Criterion::Wef, Criterion::Wef1, Criterion::Wefx, Criterion::OneWef, Criterion::Xwef];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Wef => "wef",
            Criterion::Wef1 => "wef1",
            Criterion::Wefx => "wefx",
            Criterion::OneWef => "1wef",
            Criterion::Xwef => "xwef",
        }
    }

    pub fn supports(self, kind: Kind) -> bool {
        match self {
            Criterion::Wef => true,
            Criterion::Wef1 | Criterion::Wefx => kind == Kind::Goods,
            Criterion::OneWef | Criterion::Xwef => kind == Kind::Chores,
        }
    }

    /// The "up to any item" criterion of a kind.
    pub fn any_item(kind: Kind) -> Criterion {
        match kind {
            Kind::Goods => Criterion::Wefx,
            Kind::Chores => Criterion::Xwef,
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown criterion {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FairnessError {
    #[error("criterion {criterion} does not apply to {kind}")]
    KindMismatch { criterion: Criterion, kind: Kind },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairDetail<S> {
    pub envier: usize,
    pub envied: usize,
    pub factor: Extended<S>,
    /// Item whose removal binds the pair's inequality.
    pub removed: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FairnessReport<S> {
    pub criterion: Criterion,
    pub kind: Kind,
    pub satisfied: bool,
    pub factor: Extended<S>,
    pub worst_pair: Option<(usize, usize)>,
    pub pairs: Vec<PairDetail<S>>,
}

pub fn verify<S: Scalar>(inst: &Instance<S>, alloc: &Allocation, criterion: Criterion) -> Result<FairnessReport<S>, FairnessError> {
    inst.check_allocation(alloc)?;
    verify_bundles(inst, &alloc.bundles(), criterion)
}

/// Like [`verify`] over explicit bundles, which may leave items unassigned.
pub fn verify_bundles<S: Scalar>(
    inst: &Instance<S>,
    bundles: &[Vec<usize>],
    criterion: Criterion,
) -> Result<FairnessReport<S>, FairnessError> {
    if !criterion.supports(inst.kind()) {
        return Err(FairnessError::KindMismatch { criterion, kind: inst.kind() });
    }
    let n = inst.n();
    if bundles.len() != n {
        return Err(ModelError::BadAllocation(format!("{} bundles for {n} agents", bundles.len())).into());
    }
    let goods = inst.kind() == Kind::Goods;
    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1));
    for i in 0..n {
        let own = inst.value_of(i, &bundles[i]);
        for j in (0..n).filter(|&j| j != i) {
            let other = inst.value_of(i, &bundles[j]);
            let (wi, wj) = (inst.weight(i), inst.weight(j));
            let detail = if goods {
                let (removed, rhs) = match criterion {
                    Criterion::Wef => (None, other),
                    Criterion::Wef1 => drop_extreme(inst, i, &bundles[j], other, true),
                    _ => drop_extreme(inst, i, &bundles[j], other, false),
                };
                // [own / wi] / [rhs / wj]
                let factor = Extended::quotient(&(own.clone() * wj.clone()), &(rhs * wi.clone()));
                PairDetail { envier: i, envied: j, factor, removed }
            } else {
                let (removed, lhs) = match criterion {
                    Criterion::Wef => (None, own.clone()),
                    Criterion::OneWef => drop_extreme(inst, i, &bundles[i], own.clone(), true),
                    _ => drop_extreme(inst, i, &bundles[i], own.clone(), false),
                };
                let factor = if lhs.is_zero() {
                    Extended::Finite(S::zero())
                } else {
                    Extended::quotient(&(lhs * wj.clone()), &(other * wi.clone()))
                };
                PairDetail { envier: i, envied: j, factor, removed }
            };
            pairs.push(detail);
        }
    }

    let (factor, worst_pair) = if goods {
        let worst = pairs.iter().filter(|p| !p.factor.is_infinite()).min_by(|a, b| a.factor.cmp(&b.factor));
        match worst {
            Some(p) => (p.factor.clone(), Some((p.envier, p.envied))),
            None => (Extended::PositiveInfinity, None),
        }
    } else {
        // max_by keeps the last maximum; scan in reverse so the first pair wins ties
        let worst = pairs.iter().rev().filter(|p| p.factor != Extended::Finite(S::zero())).max_by(|a, b| a.factor.cmp(&b.factor));
        match worst {
            Some(p) => (p.factor.clone(), Some((p.envier, p.envied))),
            None => (Extended::Finite(S::zero()), None),
        }
    };
    let one = Extended::Finite(S::one());
    let satisfied = if goods { factor >= one } else { factor <= one };
    Ok(FairnessReport { criterion, kind: inst.kind(), satisfied, factor, worst_pair, pairs })
}

/// Removes from `total = v_agent(bundle)` the item of largest (`largest`) or
/// smallest value to `agent`, first index on ties. An empty bundle removes
/// nothing and keeps the zero total.
fn drop_extreme<S: Scalar>(inst: &Instance<S>, agent: usize, bundle: &[usize], total: S, largest: bool) -> (Option<usize>, S) {
    let mut best: Option<usize> = None;
    for &g in bundle {
        let better = match best {
            None => true,
            Some(b) if largest => inst.value(agent, g) > inst.value(agent, b),
            Some(b) => inst.value(agent, g) < inst.value(agent, b),
        };
        if better {
            best = Some(g);
        }
    }
    match best {
        Some(g) => (Some(g), total - inst.value(agent, g).clone()),
        None => (None, total),
    }
}

/// Tight `alpha*`: the allocation is `alpha`-WEFX exactly for `alpha <= min(alpha*, 1)`.
pub fn wefx_factor<S: Scalar>(inst: &Instance<S>, alloc: &Allocation) -> Result<Extended<S>, FairnessError> {
    if inst.kind() != Kind::Goods {
        return Err(FairnessError::KindMismatch { criterion: Criterion::Wefx, kind: inst.kind() });
    }
    Ok(verify(inst, alloc, Criterion::Wefx)?.factor)
}

/// Tight `beta*`: the allocation is `beta`-XWEF exactly for `beta >= beta*`.
pub fn xwef_factor<S: Scalar>(inst: &Instance<S>, alloc: &Allocation) -> Result<Extended<S>, FairnessError> {
    if inst.kind() != Kind::Chores {
        return Err(FairnessError::KindMismatch { criterion: Criterion::Xwef, kind: inst.kind() });
    }
    Ok(verify(inst, alloc, Criterion::Xwef)?.factor)
}

/// The any-item factor of the instance's kind.
pub fn any_item_factor<S: Scalar>(inst: &Instance<S>, alloc: &Allocation) -> Result<Extended<S>, FairnessError> {
    match inst.kind() {
        Kind::Goods => wefx_factor(inst, alloc),
        Kind::Chores => xwef_factor(inst, alloc),
    }
}

/// Checks `v_i(A_i)/w_i >= alpha * max_a v_i(A_j - a)/w_j` for every pair
/// directly, without computing the tight factor.
pub fn is_alpha_wefx<S: Scalar>(inst: &Instance<S>, alloc: &Allocation, alpha: &S) -> bool {
    let bundles = alloc.bundles();
    (0..inst.n()).all(|i| {
        (0..inst.n()).filter(|&j| j != i).all(|j| {
            let best_rest = bundles[j]
                .iter()
                .map(|&a| bundles[j].iter().filter(|&&g| g != a).map(|&g| inst.value(i, g).clone()).fold(S::zero(), |x, y| x + y))
                .max()
                .unwrap_or_else(S::zero);
            inst.value_of(i, &bundles[i]) * inst.weight(j).clone() >= alpha.clone() * best_rest * inst.weight(i).clone()
        })
    })
}

/// Checks `max_b c_i(B_i - b)/w_i <= beta * c_i(B_j)/w_j` for every pair directly.
pub fn is_beta_xwef<S: Scalar>(inst: &Instance<S>, alloc: &Allocation, beta: &S) -> bool {
    let bundles = alloc.bundles();
    (0..inst.n()).all(|i| {
        (0..inst.n()).filter(|&j| j != i).all(|j| {
            let worst_rest = bundles[i]
                .iter()
                .map(|&b| bundles[i].iter().filter(|&&g| g != b).map(|&g| inst.value(i, g).clone()).fold(S::zero(), |x, y| x + y))
                .max()
                .unwrap_or_else(S::zero);
            worst_rest * inst.weight(j).clone() <= beta.clone() * inst.value_of(i, &bundles[j]) * inst.weight(i).clone()
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{get_case, CaseId};
    use crate::Value;

    fn alloc(owners: &[usize], n: usize) -> Allocation {
        Allocation::from_owners(owners.to_vec(), n).unwrap()
    }

    #[test]
    fn worthless_own_bundle_is_zero_wefx() {
        let inst = get_case(CaseId::WefxN2, None).unwrap();
        // A_1 = {a1}, A_2 = {a2, a3, a4}
        let r = verify(&inst, &alloc(&[0, 1, 1, 1], 2), Criterion::Wefx).unwrap();
        assert!(!r.satisfied);
        assert_eq!(r.factor, Extended::Finite(Value::from_u64(0)));
        assert_eq!(r.worst_pair, Some((0, 1)));
    }

    #[test]
    fn single_agent_always_satisfied() {
        let inst = Instance::with_default_ids(Kind::Goods, vec![Value::from_u64(3)], vec![vec![Value::from_u64(1); 3]]).unwrap();
        let a = alloc(&[0, 0, 0], 1);
        for c in [Criterion::Wef, Criterion::Wef1, Criterion::Wefx] {
            let r = verify(&inst, &a, c).unwrap();
            assert!(r.satisfied);
            assert_eq!(r.worst_pair, None);
            assert!(r.factor.is_infinite());
        }
        let chores = inst.with_kind(Kind::Chores);
        for c in [Criterion::Wef, Criterion::OneWef, Criterion::Xwef] {
            let r = verify(&chores, &a, c).unwrap();
            assert!(r.satisfied);
            assert_eq!(r.factor, Extended::Finite(Value::from_u64(0)));
        }
    }

    #[test]
    fn chores_case_six_is_not_xwef() {
        let inst = get_case(CaseId::XwefN2, None).unwrap();
        // B_1 = {b2, b4}, B_2 = {b1, b3}
        let r = verify(&inst, &alloc(&[1, 0, 1, 0], 2), Criterion::Xwef).unwrap();
        assert!(!r.satisfied);
        assert_eq!(r.factor, Extended::Finite(Value::ratio(14, 11)));
    }

    #[test]
    fn wefx_factor_on_goods_case() {
        let inst = get_case(CaseId::WefxN2, None).unwrap();
        // A_1 = {a1, a3}, A_2 = {a2, a4}
        assert_eq!(wefx_factor(&inst, &alloc(&[0, 1, 0, 1], 2)).unwrap(), Extended::Finite(Value::ratio(11, 14)));
        // A_1 = {a1, a2}, A_2 = {a3, a4}: 14 / (11 phi)
        let expected = Value::from_u64(14) / (Value::from_u64(11) * Value::phi());
        assert_eq!(wefx_factor(&inst, &alloc(&[0, 0, 1, 1], 2)).unwrap(), Extended::Finite(expected));
    }

    #[test]
    fn wefx_factor_infinite_when_nothing_to_envy() {
        let rows = vec![
            vec![Value::from_u64(1), Value::from_u64(0), Value::from_u64(0)],
            vec![Value::from_u64(0), Value::from_u64(1), Value::from_u64(0)],
        ];
        let inst = Instance::with_default_ids(Kind::Goods, vec![Value::from_u64(1), Value::from_u64(2)], rows).unwrap();
        assert!(wefx_factor(&inst, &alloc(&[0, 1, 1], 2)).unwrap().is_infinite());
    }

    #[test]
    fn xwef_factor_on_chores_case() {
        let inst = get_case(CaseId::XwefN2, None).unwrap();
        let expected = Value::from_u64(11) * Value::phi() / Value::from_u64(14);
        assert_eq!(xwef_factor(&inst, &alloc(&[0, 0, 1, 1], 2)).unwrap(), Extended::Finite(expected));
        // one chore each (or none): every pair vacuous
        let single = Instance::with_default_ids(Kind::Chores, vec![Value::from_u64(1); 3], vec![vec![Value::from_u64(2); 2]; 3]).unwrap();
        assert_eq!(xwef_factor(&single, &alloc(&[2, 0], 3)).unwrap(), Extended::Finite(Value::from_u64(0)));
        // B_1 = {b1, b3, b4} is costly for agent 1 and B_2 = {b2} costs it nothing
        let r = xwef_factor(&inst, &alloc(&[0, 1, 0, 0], 2)).unwrap();
        assert!(r.is_infinite());
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let goods = get_case(CaseId::WefxN2, None).unwrap();
        let a = alloc(&[0, 0, 1, 1], 2);
        assert!(matches!(verify(&goods, &a, Criterion::Xwef), Err(FairnessError::KindMismatch { .. })));
        assert!(xwef_factor(&goods, &a).is_err());
        let chores = get_case(CaseId::XwefN2, None).unwrap();
        assert!(wefx_factor(&chores, &a).is_err());
        assert!(verify(&chores, &a, Criterion::Wef1).is_err());
    }

    #[test]
    fn binding_item_is_reported() {
        let inst = get_case(CaseId::WefxN2, None).unwrap();
        let r = verify(&inst, &alloc(&[0, 0, 1, 1], 2), Criterion::Wefx).unwrap();
        let p = r.pairs.iter().find(|p| p.envier == 0).unwrap();
        assert_eq!(p.removed, Some(2));
        let r1 = verify(&inst, &alloc(&[0, 1, 1, 0], 2), Criterion::Wef1).unwrap();
        let p = r1.pairs.iter().find(|p| p.envier == 0).unwrap();
        assert_eq!(p.removed, Some(2));
    }

    #[test]
    fn criterion_names_round_trip() {
        for c in Criterion::ALL {
            assert_eq!(c.name().parse::<Criterion>().unwrap(), c);
        }
        assert!("efx".parse::<Criterion>().is_err());
    }
}
