//! Exact numbers of the real quadratic field `Q(sqrt 5)`.
//!
//! A [`Surd5`] stores `rat + surd * sqrt(5)` with both coefficients as
//! reduced [`Ratio`]s. `Ratio` keeps itself in lowest terms with a positive
//! denominator, so the pair is canonical and equality is structural.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_integer::{Integer, Roots};
use num_rational::Ratio;
use num_traits::{CheckedDiv, FromPrimitive, One, Signed, ToPrimitive, Zero};

use super::{ArithmeticError, ParseValueError};

/// Integer types that can carry the coefficients of a [`Surd5`].
pub trait SurdBase:
    Integer + Signed + Roots + Clone + FromPrimitive + ToPrimitive + fmt::Display + fmt::Debug + std::hash::Hash + Send + Sync + 'static
{
}

impl<T> SurdBase for T where
    T: Integer + Signed + Roots + Clone + FromPrimitive + ToPrimitive + fmt::Display + fmt::Debug + std::hash::Hash + Send + Sync + 'static
{
}

/// `rat + surd * sqrt(5)`, exact.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Surd5<T: SurdBase> {
    rat: Ratio<T>,
    surd: Ratio<T>,
}

impl<T: SurdBase> Surd5<T> {
    pub fn new(rat: Ratio<T>, surd: Ratio<T>) -> Self {
        Surd5 { rat, surd }
    }

    pub fn from_rational(rat: Ratio<T>) -> Self {
        Surd5 { rat, surd: Ratio::zero() }
    }

    pub fn from_integer(n: T) -> Self {
        Self::from_rational(Ratio::from_integer(n))
    }

    /// `numer / denom`; panics on a zero denominator like `Ratio::new`.
    pub fn fraction(numer: T, denom: T) -> Self {
        Self::from_rational(Ratio::new(numer, denom))
    }

    /// The golden ratio `(1 + sqrt 5) / 2`.
    pub fn phi() -> Self {
        let half = Ratio::new(T::one(), T::one() + T::one());
        Surd5 { rat: half.clone(), surd: half }
    }

    pub fn sqrt5() -> Self {
        Surd5 { rat: Ratio::zero(), surd: Ratio::one() }
    }

    pub fn rat(&self) -> &Ratio<T> {
        &self.rat
    }

    pub fn surd(&self) -> &Ratio<T> {
        &self.surd
    }

    pub fn is_rational(&self) -> bool {
        self.surd.is_zero()
    }

    /// Algebraic conjugate `rat - surd * sqrt(5)`.
    pub fn conjugate(&self) -> Self {
        Surd5 { rat: self.rat.clone(), surd: -self.surd.clone() }
    }

    /// Field norm `rat^2 - 5 surd^2`; zero only for zero.
    pub fn norm(&self) -> Ratio<T> {
        &self.rat * &self.rat - five::<T>() * &self.surd * &self.surd
    }

    pub fn checked_recip(&self) -> Result<Self, ArithmeticError> {
        if self.is_zero() {
            return Err(ArithmeticError::DivisionByZero);
        }
        let norm = self.norm();
        Ok(Surd5 { rat: &self.rat / &norm, surd: -(&self.surd / &norm) })
    }

    pub fn try_div(&self, rhs: &Self) -> Result<Self, ArithmeticError> {
        if rhs.surd.is_zero() {
            if rhs.rat.is_zero() {
                return Err(ArithmeticError::DivisionByZero);
            }
            return Ok(Surd5 { rat: &self.rat / &rhs.rat, surd: &self.surd / &rhs.rat });
        }
        Ok(self.clone() * rhs.checked_recip()?)
    }

    /// Sign of the encoded real, decided without any root extraction.
    pub fn signum_ord(&self) -> Ordering {
        let a = self.rat.numer().signum();
        let b = self.surd.numer().signum();
        let sa = sign_of(&a);
        let sb = sign_of(&b);
        match (sa, sb) {
            (s, Ordering::Equal) => s,
            (Ordering::Equal, s) => s,
            (x, y) if x == y => x,
            // mixed signs: sign(a + b sqrt5) = sign(a) * sign(a^2 - 5 b^2)
            (sa, _) => {
                let a2 = &self.rat * &self.rat;
                let b2 = five::<T>() * &self.surd * &self.surd;
                match a2.cmp(&b2) {
                    Ordering::Greater => sa,
                    Ordering::Less => sa.reverse(),
                    Ordering::Equal => unreachable!("sqrt 5 is irrational"),
                }
            }
        }
    }

    pub fn floor(&self) -> T {
        if self.surd.is_zero() {
            return self.rat.floor().to_integer();
        }
        // |surd| * sqrt5 lies in [k, k + 1) with k = isqrt(floor(5 surd^2))
        let five_b2 = (five::<T>() * &self.surd * &self.surd).floor().to_integer();
        let k = five_b2.sqrt();
        let base = self.rat.floor().to_integer();
        let mut n = if self.surd.is_positive() {
            base + k - T::one()
        } else {
            base - k - T::one() - T::one()
        };
        while Self::from_integer(n.clone() + T::one()) <= *self {
            n = n + T::one();
        }
        while Self::from_integer(n.clone()) > *self {
            n = n - T::one();
        }
        n
    }

    /// Canonical exact text: `p`, `p/q`, `r/s*sqrt5`, or `p/q+r/s*sqrt5`.
    pub fn render_exact(&self) -> String {
        if self.surd.is_zero() {
            return fmt_ratio(&self.rat);
        }
        let coeff = fmt_ratio(&self.surd.abs());
        if self.rat.is_zero() {
            let sign = if self.surd.is_negative() { "-" } else { "" };
            format!("{sign}{coeff}*sqrt5")
        } else {
            let sign = if self.surd.is_negative() { '-' } else { '+' };
            format!("{}{sign}{coeff}*sqrt5", fmt_ratio(&self.rat))
        }
    }

    /// Correctly rounded decimal with `digits` fractional digits, ties to even.
    pub fn render_decimal(&self, digits: u32) -> String {
        let ten = T::from_u32(10).expect("10 fits every integer type");
        let mut scale = T::one();
        for _ in 0..digits {
            scale = scale * ten.clone();
        }
        let scaled = self.clone() * Self::from_integer(scale);
        let mut n = scaled.floor();
        let frac = scaled - Self::from_integer(n.clone());
        let half = Self::fraction(T::one(), T::one() + T::one());
        match frac.cmp(&half) {
            Ordering::Greater => n = n + T::one(),
            Ordering::Equal if n.is_odd() => n = n + T::one(),
            _ => {}
        }
        fmt_fixed(&n, digits as usize)
    }

    pub fn to_f64(&self) -> f64 {
        ratio_f64(&self.rat) + ratio_f64(&self.surd) * 5f64.sqrt()
    }
}

fn five<T: SurdBase>() -> Ratio<T> {
    Ratio::from_integer(T::from_u8(5).expect("5 fits every integer type"))
}

fn sign_of<T: SurdBase>(x: &T) -> Ordering {
    if x.is_positive() {
        Ordering::Greater
    } else if x.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

fn ratio_f64<T: SurdBase>(r: &Ratio<T>) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let (mn, en) = leading_digits(r.numer());
            let (md, ed) = leading_digits(r.denom());
            mn / md * 10f64.powi(en - ed)
        }
    }
}

/// `x ~ mantissa * 10^exp` from the first 17 decimal digits.
fn leading_digits<T: SurdBase>(x: &T) -> (f64, i32) {
    let s = x.to_string();
    let (sign, digits) = s.strip_prefix('-').map_or((1.0, s.as_str()), |d| (-1.0, d));
    let keep = digits.len().min(17);
    let mantissa: f64 = digits[..keep].parse().unwrap_or(f64::NAN);
    (sign * mantissa, (digits.len() - keep) as i32)
}

pub(crate) fn fmt_ratio<T: SurdBase>(r: &Ratio<T>) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Formats the integer `n` as `n / 10^digits` in fixed point.
fn fmt_fixed<T: SurdBase>(n: &T, digits: usize) -> String {
    let mut s = n.abs().to_string();
    if digits > 0 {
        if s.len() <= digits {
            s = format!("{}{s}", "0".repeat(digits + 1 - s.len()));
        }
        s.insert(s.len() - digits, '.');
    }
    if n.is_negative() {
        s.insert(0, '-');
    }
    s
}

impl<T: SurdBase> PartialOrd for Surd5<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: SurdBase> Ord for Surd5<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.surd == other.surd {
            return self.rat.cmp(&other.rat);
        }
        (self.clone() - other.clone()).signum_ord()
    }
}

impl<T: SurdBase> Add for Surd5<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Surd5 { rat: self.rat + rhs.rat, surd: self.surd + rhs.surd }
    }
}

impl<'a, T: SurdBase> Add<&'a Surd5<T>> for Surd5<T> {
    type Output = Self;
    fn add(self, rhs: &'a Self) -> Self {
        Surd5 { rat: self.rat + &rhs.rat, surd: self.surd + &rhs.surd }
    }
}

impl<T: SurdBase> AddAssign for Surd5<T> {
    fn add_assign(&mut self, rhs: Self) {
        self.rat = self.rat.clone() + rhs.rat;
        self.surd = self.surd.clone() + rhs.surd;
    }
}

impl<T: SurdBase> Sub for Surd5<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Surd5 { rat: self.rat - rhs.rat, surd: self.surd - rhs.surd }
    }
}

impl<T: SurdBase> SubAssign for Surd5<T> {
    fn sub_assign(&mut self, rhs: Self) {
        self.rat = self.rat.clone() - rhs.rat;
        self.surd = self.surd.clone() - rhs.surd;
    }
}

impl<T: SurdBase> Mul for Surd5<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.surd.is_zero() && rhs.surd.is_zero() {
            return Self::from_rational(self.rat * rhs.rat);
        }
        // (a + b r5)(c + d r5) = (ac + 5bd) + (ad + bc) r5
        let rat = &self.rat * &rhs.rat + five::<T>() * &self.surd * &rhs.surd;
        let surd = &self.rat * &rhs.surd + &self.surd * &rhs.rat;
        Surd5 { rat, surd }
    }
}

impl<T: SurdBase> Div for Surd5<T> {
    type Output = Self;
    /// Panics on division by zero; use [`Surd5::try_div`] for a `Result`.
    fn div(self, rhs: Self) -> Self {
        match self.try_div(&rhs) {
            Ok(q) => q,
            Err(e) => panic!("{e}"),
        }
    }
}

impl<T: SurdBase> CheckedDiv for Surd5<T> {
    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        self.try_div(rhs).ok()
    }
}

impl<T: SurdBase> Neg for Surd5<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Surd5 { rat: -self.rat, surd: -self.surd }
    }
}

impl<T: SurdBase> Zero for Surd5<T> {
    fn zero() -> Self {
        Surd5 { rat: Ratio::zero(), surd: Ratio::zero() }
    }
    fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.surd.is_zero()
    }
}

impl<T: SurdBase> One for Surd5<T> {
    fn one() -> Self {
        Surd5 { rat: Ratio::one(), surd: Ratio::zero() }
    }
}

impl<T: SurdBase> Sum for Surd5<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

impl<'a, T: SurdBase> Sum<&'a Surd5<T>> for Surd5<T> {
    fn sum<I: Iterator<Item = &'a Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

impl<T: SurdBase> Product for Surd5<T> {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::one(), |acc, x| acc * x)
    }
}

impl<T: SurdBase> From<Ratio<T>> for Surd5<T> {
    fn from(r: Ratio<T>) -> Self {
        Self::from_rational(r)
    }
}

impl<T: SurdBase> fmt::Display for Surd5<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_exact())
    }
}

impl<T: SurdBase> FromStr for Surd5<T> {
    type Err = ParseValueError;

    /// Accepts `INT`, `INT/INT`, and `[RAT]{+|-}[RAT*]sqrt5`, whitespace-free.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseValueError(s.to_string());
        if s.is_empty() || s.chars().any(char::is_whitespace) {
            return Err(bad());
        }
        let Some(body) = s.strip_suffix("sqrt5") else {
            return parse_ratio(s).map(Self::from_rational).ok_or_else(bad);
        };
        // split off the coefficient of sqrt5 at the last sign that is not leading
        let (rat_part, coeff_part) = match body.rfind(['+', '-']) {
            Some(0) | None => ("", body),
            Some(i) => (&body[..i], &body[i..]),
        };
        let rat = if rat_part.is_empty() {
            Ratio::zero()
        } else {
            parse_ratio(rat_part).ok_or_else(bad)?
        };
        let (negative, coeff) = match coeff_part.as_bytes().first() {
            Some(b'-') => (true, &coeff_part[1..]),
            Some(b'+') => (false, &coeff_part[1..]),
            _ => (false, coeff_part),
        };
        let surd = match coeff {
            "" => Ratio::one(),
            c => {
                let c = c.strip_suffix('*').ok_or_else(bad)?;
                if c.starts_with(['+', '-']) {
                    return Err(bad());
                }
                parse_ratio(c).ok_or_else(bad)?
            }
        };
        let surd = if negative { -surd } else { surd };
        Ok(Surd5 { rat, surd })
    }
}

pub(crate) fn parse_ratio<T: SurdBase>(s: &str) -> Option<Ratio<T>> {
    let int = |t: &str| -> Option<T> {
        let digits = t.strip_prefix('-').unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        T::from_str_radix(t, 10).ok()
    };
    match s.split_once('/') {
        None => int(s).map(Ratio::from_integer),
        Some((n, d)) => {
            if d.starts_with('-') {
                return None;
            }
            let (n, d) = (int(n)?, int(d)?);
            if d.is_zero() {
                return None;
            }
            Some(Ratio::new(n, d))
        }
    }
}
