use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Numeric mode of a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Float,
    Rational,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Float => f.pad("float"),
            Mode::Rational => f.pad("rational"),
        }
    }
}

/// Exact rational number, always kept in lowest terms with a positive
/// denominator. Backed by arbitrary-precision integers, so arithmetic never
/// overflows.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// `p/q` in lowest terms. Panics when `q == 0`.
    pub fn new(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_integer(p: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(p)))
    }

    pub fn from_big(numer: BigInt, denom: BigInt) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    /// Exact binary value of a finite float.
    pub fn from_f64_exact(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Rational)
    }

    /// Nearest point of the grid `k / denominator`.
    pub fn round_to_grid(x: f64, denominator: i64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        let scaled = Rational::from_f64_exact(x)? * Rational::from_integer(denominator);
        let k = scaled.0.round().to_integer();
        Some(Rational(BigRational::new(k, BigInt::from(denominator))))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// Integer power; negative exponents invert (panics on zero base).
    pub fn pow(&self, e: i32) -> Self {
        Rational(num_traits::Pow::pow(&self.0, e))
    }

    /// Square root when both numerator and denominator are perfect squares.
    pub fn sqrt(&self) -> Option<Self> {
        if self.0.is_negative() {
            return None;
        }
        let p = self.numer().sqrt();
        let q = self.denom().sqrt();
        if &(&p * &p) == self.numer() && &(&q * &q) == self.denom() {
            Some(Rational(BigRational::new(p, q)))
        } else {
            None
        }
    }

    pub fn signum(&self) -> i32 {
        if self.0.is_zero() {
            0
        } else if self.0.is_negative() {
            -1
        } else {
            1
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `p/q`, `p`, or a plain decimal such as `-0.25` (converted
    /// exactly, so `0.1` becomes `1/10`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational number: {s:?}"));
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            return Rational::from_big(p, q).map_err(|_| bad());
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int.starts_with('-');
            let int_digits = int.trim_start_matches(['-', '+']);
            if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let digits = format!("{int_digits}{frac}");
            let mut p: BigInt = digits.parse().map_err(|_| bad())?;
            if negative {
                p = -p;
            }
            let q = num_traits::pow(BigInt::from(10), frac.len());
            return Rational::from_big(p, q);
        }
        let p: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Rational(BigRational::from_integer(p)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

/// A number as it appears in reports: a JSON number in float mode, a
/// `"p/q"` string in rational mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Float(f64),
    Exact(Rational),
}

impl Number {
    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Float(x) => *x,
            Number::Exact(r) => r.to_f64(),
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Float(x) => write!(f, "{x}"),
            Number::Exact(r) => write!(f, "{r}"),
        }
    }
}

/// Field operations shared by the floating and exact matrix modes.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: Mode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_ratio(p: i64, q: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn to_number(&self) -> Number;

    /// Square root in the same mode, if representable.
    fn sqrt_exact(&self) -> Option<Self>;

    /// Determinant of a dense row-major `n x n` array. Floating mode uses
    /// partial pivoting, exact mode fraction-free (Bareiss) elimination.
    fn det_kernel(n: usize, entries: Vec<Self>) -> Self;

    /// Whether a pivot should be treated as zero relative to `scale`.
    fn is_negligible(&self, scale: f64) -> bool;

    /// `self >= -rel_tol * max(1, scale)` in floating mode, exact sign test
    /// otherwise.
    fn nonneg_within(&self, scale: f64, rel_tol: f64) -> bool;

    fn powi(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        p as f64 / q as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn to_number(&self) -> Number {
        Number::Float(*self)
    }
    fn sqrt_exact(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }
    fn det_kernel(n: usize, entries: Vec<Self>) -> Self {
        lu_determinant(n, entries)
    }
    fn is_negligible(&self, scale: f64) -> bool {
        f64::abs(*self) <= 1e-13 * scale.max(1.0)
    }
    fn nonneg_within(&self, scale: f64, rel_tol: f64) -> bool {
        *self >= -rel_tol * scale.max(1.0)
    }
    fn powi(&self, e: u32) -> Self {
        f64::powi(*self, e as i32)
    }
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Rational;

    fn zero() -> Self {
        Rational(BigRational::zero())
    }
    fn one() -> Self {
        Rational(BigRational::one())
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(v)
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        Rational::new(p, q)
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
    fn abs(&self) -> Self {
        Rational(self.0.abs())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn to_number(&self) -> Number {
        Number::Exact(self.clone())
    }
    fn sqrt_exact(&self) -> Option<Self> {
        self.sqrt()
    }
    fn det_kernel(n: usize, entries: Vec<Self>) -> Self {
        bareiss_determinant(n, entries)
    }
    fn is_negligible(&self, _scale: f64) -> bool {
        self.0.is_zero()
    }
    fn nonneg_within(&self, _scale: f64, _rel_tol: f64) -> bool {
        !self.0.is_negative()
    }
    fn powi(&self, e: u32) -> Self {
        self.pow(e as i32)
    }
}

fn lu_determinant(n: usize, mut a: Vec<f64>) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let pivot_row = (col..n).max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs())).unwrap_or(col);
        let pivot = a[pivot_row * n + col];
        if pivot == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            det = -det;
        }
        det *= pivot;
        for row in col + 1..n {
            let factor = a[row * n + col] / pivot;
            if factor != 0.0 {
                for k in col + 1..n {
                    a[row * n + k] -= factor * a[col * n + k];
                }
            }
        }
    }
    det
}

/// Rows are first cleared of denominators (row `i` multiplied by the lcm of
/// its denominators), then the integer matrix is reduced with Bareiss'
/// fraction-free recurrence, whose intermediate divisions are exact.
fn bareiss_determinant(n: usize, entries: Vec<Rational>) -> Rational {
    if n == 0 {
        return Rational::one();
    }
    let mut row_scale = BigInt::one();
    let mut m: Vec<BigInt> = Vec::with_capacity(n * n);
    for row in entries.chunks(n) {
        let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        for x in row {
            m.push(x.numer() * (&lcm / x.denom()));
        }
        row_scale *= lcm;
    }

    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k * n + k].is_zero() {
            match (k + 1..n).find(|&r| !m[r * n + k].is_zero()) {
                Some(r) => {
                    for c in 0..n {
                        m.swap(k * n + c, r * n + c);
                    }
                    sign = -sign;
                }
                None => return Rational::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i * n + j] * &m[k * n + k] - &m[i * n + k] * &m[k * n + j];
                m[i * n + j] = v / &prev;
            }
        }
        prev = m[k * n + k].clone();
    }
    let mut det = m[n * n - 1].clone();
    if sign < 0 {
        det = -det;
    }
    Rational(BigRational::new(det, row_scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        assert_eq!("6/-8".parse::<Rational>().unwrap().to_string(), "-3/4");
        assert_eq!("-4".parse::<Rational>().unwrap().to_string(), "-4/1");
        assert_eq!("0.25".parse::<Rational>().unwrap(), Rational::new(1, 4));
        assert_eq!("-1.5".parse::<Rational>().unwrap(), Rational::new(-3, 2));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
        assert!("1.2e3".parse::<Rational>().is_err());
    }

    #[test]
    fn normalized_with_positive_denominator() {
        let r = Rational::new(10, -4);
        assert_eq!(r.numer(), &BigInt::from(-5));
        assert_eq!(r.denom(), &BigInt::from(2));
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(Rational::new(9, 4).sqrt(), Some(Rational::new(3, 2)));
        assert_eq!(Rational::new(5, 8).sqrt(), None);
        assert_eq!(Rational::new(-1, 4).sqrt(), None);
    }

    #[test]
    fn grid_rounding() {
        let r = Rational::round_to_grid(0.123_456_789_012_9, 1_000_000_000_000).unwrap();
        assert_eq!(r, Rational::new(123_456_789_013, 1_000_000_000_000));
    }

    #[test]
    fn number_serializes_by_mode() {
        let f = serde_json::to_string(&Number::Float(-4.0)).unwrap();
        let e = serde_json::to_string(&Number::Exact(Rational::new(-4, 1))).unwrap();
        assert_eq!(f, "-4.0");
        assert_eq!(e, "\"-4/1\"");
    }

    #[test]
    fn bareiss_handles_zero_leading_pivot() {
        // [[0,1],[1,0]] has determinant -1
        let e = vec![Rational::zero(), Rational::one(), Rational::one(), Rational::zero()];
        assert_eq!(bareiss_determinant(2, e), Rational::from_integer(-1));
    }

    #[test]
    fn lu_matches_known_value() {
        let d = lu_determinant(3, vec![2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]);
        assert!((d - 4.0).abs() < 1e-14);
    }
}
