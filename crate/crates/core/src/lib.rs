//! Weighted fair division of indivisible goods and chores.
//!
//! Agents carry positive weights (entitlements) and bundle values are compared
//! after dividing by weight. The crate provides:
//!
//! * exact scalars in `Q(sqrt 5)` ([`numeric`]),
//! * instances and allocations ([`model`]),
//! * verification of WEF, WEF1, WEFX, 1WEF and XWEF with tight
//!   approximation factors ([`fairness`]),
//! * four allocation procedures ([`algorithms`]),
//! * an exhaustive search over all `n^m` allocations ([`oracle`]),
//! * the golden-ratio counterexamples and a seeded generator ([`corpus`]),
//! * the JSON instance format used by the command line ([`io`]).
//!
//! The core is generic over [`numeric::Scalar`]; [`Value`] and [`Rational`]
//! are the concrete choices.

pub mod algorithms;
pub mod corpus;
pub mod fairness;
pub mod io;
pub mod model;
pub mod numeric;
pub mod oracle;

use num_bigint::BigInt;

/// Exact element of `Q(sqrt 5)` with arbitrary-precision coefficients.
pub type Value = numeric::Surd5<BigInt>;

/// Arbitrary-precision rational.
pub type Rational = numeric::RationalScalar<BigInt>;

pub type ValueInstance = model::Instance<Value>;
pub type RationalInstance = model::Instance<Rational>;

pub use fairness::{Criterion, FairnessReport};
pub use model::{Allocation, Instance, Kind};
pub use numeric::{Extended, Scalar};
