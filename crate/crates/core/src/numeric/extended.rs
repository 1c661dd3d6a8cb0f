use std::fmt;

use super::Scalar;

/// A scalar extended with `+inf`.
///
/// Factors of pairs whose comparison side is zero are unbounded; the derived
/// ordering puts `PositiveInfinity` above every finite value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Extended<S> {
    Finite(S),
    PositiveInfinity,
}

impl<S: Scalar> Extended<S> {
    pub fn finite(&self) -> Option<&S> {
        match self {
            Extended::Finite(x) => Some(x),
            Extended::PositiveInfinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::PositiveInfinity)
    }

    /// `num / den` with a zero denominator mapped to `+inf`.
    pub fn quotient(num: &S, den: &S) -> Self {
        match num.try_div(den) {
            Ok(q) => Extended::Finite(q),
            Err(_) => Extended::PositiveInfinity,
        }
    }

    pub fn render_exact(&self) -> String {
        match self {
            Extended::Finite(x) => x.render_exact(),
            Extended::PositiveInfinity => "inf".to_string(),
        }
    }

    pub fn render_decimal(&self, digits: u32) -> String {
        match self {
            Extended::Finite(x) => x.render_decimal(digits),
            Extended::PositiveInfinity => "inf".to_string(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Extended::Finite(x) => x.to_f64(),
            Extended::PositiveInfinity => f64::INFINITY,
        }
    }
}

impl<S: Scalar> From<S> for Extended<S> {
    fn from(x: S) -> Self {
        Extended::Finite(x)
    }
}

impl<S: Scalar> fmt::Display for Extended<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_exact())
    }
}
