//! Counterexample instances with golden-ratio values, and seeded random
//! instance generation.
//!
//! The generator draws from ChaCha8 (`rand_chacha`), a counter-based stream
//! cipher: a `(seed, stream)` pair fully determines the output, so parallel
//! fuzzers derive independent streams from one seed.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Agent, Instance, Kind};
use crate::numeric::Scalar;
use crate::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseId {
    WefxN2,
    WefxN3,
    XwefN2,
    XwefN3,
}

impl CaseId {
    pub const ALL: [CaseId; 4] = [CaseId::WefxN2, CaseId::WefxN3, CaseId::XwefN2, CaseId::XwefN3];

    pub fn name(self) -> &'static str {
        match self {
            CaseId::WefxN2 => "wefx-n2",
            CaseId::WefxN3 => "wefx-n3",
            CaseId::XwefN2 => "xwef-n2",
            CaseId::XwefN3 => "xwef-n3",
        }
    }

    /// Two-agent cases take the first agent's weight as a parameter.
    pub fn parameterized(self) -> bool {
        matches!(self, CaseId::WefxN2 | CaseId::XwefN2)
    }

    pub fn kind(self) -> Kind {
        match self {
            CaseId::WefxN2 | CaseId::WefxN3 => Kind::Goods,
            CaseId::XwefN2 | CaseId::XwefN3 => Kind::Chores,
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseId {
    type Err = CorpusError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CaseId::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| CorpusError::UnknownCase(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("unknown case {0:?}")]
    UnknownCase(String),
    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    AlphaOutOfRange(String),
    #[error("case {0} takes no weight parameter")]
    NotParameterized(CaseId),
}

/// What the exhaustive search should find on a case at its default weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseExpectation {
    /// Whether an exact WEFX / XWEF allocation exists.
    pub exists: bool,
    /// Published optimum factor, three decimals.
    pub best_factor_3dp: &'static str,
}

pub fn expectation(id: CaseId) -> CaseExpectation {
    let best_factor_3dp = match id {
        CaseId::WefxN2 => "0.786",
        CaseId::WefxN3 => "0.795",
        CaseId::XwefN2 => "1.272",
        CaseId::XwefN3 => "1.214",
    };
    CaseExpectation { exists: false, best_factor_3dp }
}

pub fn default_alpha() -> Value {
    Value::ratio(11, 25)
}

/// Builds a case exactly. `alpha` is the first agent's weight for the
/// two-agent cases (the second gets `1 - alpha`); `None` means 11/25.
pub fn get_case(id: CaseId, alpha: Option<Value>) -> Result<Instance, CorpusError> {
    let phi = Value::phi;
    let int = Value::from_u64;
    let (weights, rows) = match id {
        CaseId::WefxN2 | CaseId::XwefN2 => {
            let a = alpha.unwrap_or_else(default_alpha);
            if a <= int(0) || a >= int(1) {
                return Err(CorpusError::AlphaOutOfRange(a.render_exact()));
            }
            let rows = if id == CaseId::WefxN2 {
                vec![vec![int(0), int(1), phi(), phi()], vec![int(0), int(0), int(1), int(1)]]
            } else {
                vec![vec![int(0), int(0), int(1), int(1)], vec![int(0), int(1), phi(), phi()]]
            };
            (vec![a.clone(), int(1) - a], rows)
        }
        CaseId::WefxN3 => {
            if alpha.is_some() {
                return Err(CorpusError::NotParameterized(id));
            }
            let w = vec![Value::ratio(3, 19), Value::ratio(7, 19), Value::ratio(9, 19)];
            let rows = vec![
                vec![int(0), int(0), int(0), int(0), int(1)],
                vec![phi(), phi(), int(1), int(0), int(0)],
                vec![int(1), int(1), int(0), int(0), int(1)],
            ];
            (w, rows)
        }
        CaseId::XwefN3 => {
            if alpha.is_some() {
                return Err(CorpusError::NotParameterized(id));
            }
            let w = vec![Value::ratio(1, 15), Value::ratio(6, 15), Value::ratio(8, 15)];
            let rows = vec![
                vec![int(1), int(1), phi(), phi(), int(1)],
                vec![int(1), int(0), int(0), int(1), int(1)],
                vec![phi(), int(1), int(0), phi(), phi()],
            ];
            (w, rows)
        }
    };
    let kind = id.kind();
    let prefix = if kind == Kind::Goods { "a" } else { "b" };
    let m = rows[0].len();
    let agents = weights.into_iter().enumerate().map(|(i, weight)| Agent { id: (i + 1).to_string(), weight }).collect();
    let items = (1..=m).map(|g| format!("{prefix}{g}")).collect();
    Ok(Instance::new(kind, agents, items, rows).expect("paper cases are valid"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueScheme {
    /// Independent integers in `0..=max`.
    UniformInt { max: u64 },
    /// Each row is integer cuts divided by their total, summing to exactly one.
    Normalized,
    /// One integer row in `0..=max` shared by every agent.
    IdenticalInt { max: u64 },
    /// Integer rows in `0..=max`, each sorted non-increasing along one shared
    /// random item order.
    OrdinalInt { max: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightScheme {
    Integer { max: u64 },
    Normalized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenConfig {
    pub n: usize,
    pub m: usize,
    pub kind: Kind,
    pub values: ValueScheme,
    pub weights: WeightScheme,
    pub seed: u64,
    pub stream: u64,
}

impl GenConfig {
    pub fn new(n: usize, m: usize, kind: Kind, seed: u64) -> Self {
        GenConfig {
            n,
            m,
            kind,
            values: ValueScheme::UniformInt { max: 10 },
            weights: WeightScheme::Integer { max: 5 },
            seed,
            stream: 0,
        }
    }

    pub fn values(mut self, values: ValueScheme) -> Self {
        self.values = values;
        self
    }

    pub fn weights(mut self, weights: WeightScheme) -> Self {
        self.weights = weights;
        self
    }

    pub fn stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn rng(&self) -> ChaCha8Rng {
        seeded_rng(self.seed, self.stream)
    }
}

/// ChaCha8 keyed by `seed` on word stream `stream`.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const CUT_RESOLUTION: u64 = 1000;

pub fn random_instance<S: Scalar>(config: &GenConfig) -> Instance<S> {
    random_instance_with(config, &mut config.rng())
}

/// Draws from a caller-owned stream; useful for long fuzz runs.
pub fn random_instance_with<S: Scalar, R: Rng>(config: &GenConfig, rng: &mut R) -> Instance<S> {
    let GenConfig { n, m, kind, values, weights, .. } = *config;
    let weights: Vec<S> = match weights {
        WeightScheme::Integer { max } => (0..n).map(|_| S::from_u64(rng.gen_range(1..=max.max(1)))).collect(),
        WeightScheme::Normalized => normalized_row(rng, n, 1),
    };
    let matrix: Vec<Vec<S>> = match values {
        ValueScheme::UniformInt { max } => {
            (0..n).map(|_| (0..m).map(|_| S::from_u64(rng.gen_range(0..=max))).collect()).collect()
        }
        ValueScheme::Normalized => (0..n).map(|_| normalized_row(rng, m, 0)).collect(),
        ValueScheme::IdenticalInt { max } => {
            let row: Vec<S> = (0..m).map(|_| S::from_u64(rng.gen_range(0..=max))).collect();
            vec![row; n]
        }
        ValueScheme::OrdinalInt { max } => {
            let mut order: Vec<usize> = (0..m).collect();
            for k in (1..m).rev() {
                order.swap(k, rng.gen_range(0..=k));
            }
            (0..n)
                .map(|_| {
                    let mut draws: Vec<u64> = (0..m).map(|_| rng.gen_range(0..=max)).collect();
                    draws.sort_unstable_by(|a, b| b.cmp(a));
                    let mut row = vec![S::zero(); m];
                    for (pos, &g) in order.iter().enumerate() {
                        row[g] = S::from_u64(draws[pos]);
                    }
                    row
                })
                .collect()
        }
    };
    Instance::with_default_ids(kind, weights, matrix).expect("generated instances are valid")
}

/// `len` exact rationals summing to one, built from integer cuts in
/// `min..=CUT_RESOLUTION`.
fn normalized_row<S: Scalar, R: Rng>(rng: &mut R, len: usize, min: u64) -> Vec<S> {
    if len == 0 {
        return Vec::new();
    }
    let mut cuts: Vec<u64> = (0..len).map(|_| rng.gen_range(min..=CUT_RESOLUTION)).collect();
    if cuts.iter().all(|&c| c == 0) {
        let k = rng.gen_range(0..len);
        cuts[k] = 1;
    }
    let total: u64 = cuts.iter().sum();
    cuts.into_iter().map(|c| S::ratio(c, total)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_traits::One;

    #[test]
    fn paper_tables() {
        let g2 = get_case(CaseId::WefxN2, None).unwrap();
        assert_eq!(g2.n(), 2);
        assert_eq!(g2.m(), 4);
        assert_eq!(g2.value(0, 2), &Value::phi());
        assert_eq!(g2.weights(), vec![Value::ratio(11, 25), Value::ratio(14, 25)]);
        let g3 = get_case(CaseId::WefxN3, None).unwrap();
        assert_eq!(g3.weights(), vec![Value::ratio(3, 19), Value::ratio(7, 19), Value::ratio(9, 19)]);
        let c3 = get_case(CaseId::XwefN3, None).unwrap();
        assert_eq!(c3.weights(), vec![Value::ratio(1, 15), Value::ratio(6, 15), Value::ratio(8, 15)]);
        assert_eq!(c3.kind(), Kind::Chores);
        assert_eq!(c3.items()[4], "b5");
    }

    #[test]
    fn alpha_bounds() {
        assert!(matches!(get_case(CaseId::WefxN2, Some(Value::from_u64(1))), Err(CorpusError::AlphaOutOfRange(_))));
        assert!(get_case(CaseId::XwefN2, Some(Value::ratio(0, 1))).is_err());
        assert!(get_case(CaseId::WefxN3, Some(Value::ratio(1, 2))).is_err());
        assert!("wefx-n4".parse::<CaseId>().is_err());
    }

    #[test]
    fn generator_is_deterministic() {
        let cfg = GenConfig::new(3, 6, Kind::Goods, 99);
        assert_eq!(random_instance::<Value>(&cfg), random_instance::<Value>(&cfg));
        assert_ne!(random_instance::<Value>(&cfg), random_instance::<Value>(&cfg.stream(1)));
    }

    #[test]
    fn integer_scheme_range() {
        let cfg = GenConfig::new(4, 12, Kind::Chores, 5).values(ValueScheme::UniformInt { max: 10 });
        let inst: Instance<Rational> = random_instance(&cfg);
        for row in inst.matrix() {
            for x in row {
                assert!(*x <= Rational::from_u64(10));
                assert!(x.to_u64_exact().is_some());
            }
        }
    }

    #[test]
    fn normalized_rows_sum_to_one() {
        let cfg = GenConfig::new(3, 7, Kind::Goods, 11).values(ValueScheme::Normalized).weights(WeightScheme::Normalized);
        let inst: Instance<Value> = random_instance(&cfg);
        for i in 0..3 {
            assert!(inst.total_value(i).is_one());
        }
        assert!(crate::numeric::sum(&inst.weights()).is_one());
    }

    #[test]
    fn ordinal_scheme_shares_an_order() {
        let cfg = GenConfig::new(4, 8, Kind::Goods, 3).values(ValueScheme::OrdinalInt { max: 20 });
        let inst: Instance<Value> = random_instance(&cfg);
        for g in 0..8 {
            for h in 0..8 {
                let up = (0..4).any(|i| inst.value(i, g) > inst.value(i, h));
                let down = (0..4).any(|i| inst.value(i, g) < inst.value(i, h));
                assert!(!(up && down));
            }
        }
    }

    #[test]
    fn integer_mean_near_half_range() {
        let mut rng = seeded_rng(2024, 0);
        let cfg = GenConfig::new(1, 1, Kind::Goods, 0).values(ValueScheme::UniformInt { max: 20 });
        let total: u64 = (0..10_000)
            .map(|_| random_instance_with::<Value, _>(&cfg, &mut rng).value(0, 0).to_u64_exact().unwrap())
            .sum();
        let mean = total as f64 / 10_000.0;
        assert!((mean - 10.0).abs() < 0.5, "mean {mean}");
    }
}
