//! Scalar abstraction shared by the exact and floating-point solvers.
//!
//! [`Rational`] keeps small fractions inline as a pair of `i64` and only
//! promotes to a heap-allocated `BigRational` when an intermediate result
//! overflows. Almost every quantity in these programs has a small
//! denominator, so the inline path carries nearly all of the work.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Arithmetic mode of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rational,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Rational => f.write_str("rational"),
            Mode::Float => f.write_str("float"),
        }
    }
}

/// Exact rational number.
#[derive(Clone)]
pub enum Rational {
    /// Reduced fraction with positive denominator; the numerator is never `i64::MIN`.
    Small(i64, i64),
    /// Only used when the value does not fit the inline form.
    Big(Box<BigRational>),
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    gcd_u128(a.unsigned_abs() as u128, b.unsigned_abs() as u128) as i64
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_i128(n as i128, 1)
    }

    fn from_i128(mut n: i128, mut d: i128) -> Self {
        if d < 0 {
            n = -n;
            d = -d;
        }
        if n == 0 {
            return Rational::Small(0, 1);
        }
        let g = gcd_u128(n.unsigned_abs(), d as u128) as i128;
        n /= g;
        d /= g;
        if n > i64::MIN as i128 && n <= i64::MAX as i128 && d <= i64::MAX as i128 {
            Rational::Small(n as i64, d as i64)
        } else {
            Rational::Big(Box::new(BigRational::new_raw(BigInt::from(n), BigInt::from(d))))
        }
    }

    pub fn from_big(r: BigRational) -> Self {
        let (n, d) = (r.numer(), r.denom());
        if let (Some(n64), Some(d64)) = (n.to_i64(), d.to_i64()) {
            if n64 != i64::MIN {
                return Rational::Small(n64, d64);
            }
        }
        Rational::Big(Box::new(r))
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rational::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rational::Big(b) => (**b).clone(),
        }
    }

    /// Exact value of a finite float.
    pub fn from_f64_exact(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Self::from_big)
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Rational::Small(n, _) => BigInt::from(*n),
            Rational::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Rational::Small(_, d) => BigInt::from(*d),
            Rational::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rational::Small(_, d) => *d == 1,
            Rational::Big(b) => b.is_integer(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Rational::Small(n, d) => *n as f64 / *d as f64,
            Rational::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Rational::Small(n, _) => n.signum() as i32,
            Rational::Big(b) => {
                if b.is_positive() {
                    1
                } else if b.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Self {
        match self {
            Rational::Small(n, d) => Self::from_i128(*d as i128, *n as i128),
            Rational::Big(b) => Self::from_big(b.recip()),
        }
    }

    /// Best rational approximations of `x` with denominators up to `max_den`,
    /// from the continued-fraction expansion.
    pub fn convergents(x: f64, max_den: i64) -> Vec<Rational> {
        let mut out = Vec::new();
        if !x.is_finite() {
            return out;
        }
        let (mut h0, mut h1) = (0i128, 1i128);
        let (mut k0, mut k1) = (1i128, 0i128);
        let mut r = x;
        for _ in 0..40 {
            let a = r.floor();
            if a.abs() > 1e15 {
                break;
            }
            let ai = a as i128;
            let h2 = ai * h1 + h0;
            let k2 = ai * k1 + k0;
            if k2 > max_den as i128 {
                break;
            }
            out.push(Self::from_i128(h2, k2));
            h0 = h1;
            h1 = h2;
            k0 = k1;
            k1 = k2;
            let frac = r - a;
            if frac.abs() < 1e-15 {
                break;
            }
            r = 1.0 / frac;
        }
        out
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::Small(0, 1)
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Rational {}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        // Small and Big never represent the same value, so hashing the
        // canonical numerator and denominator is consistent with Eq.
        match self {
            Rational::Small(n, d) => {
                n.hash(state);
                d.hash(state);
            }
            Rational::Big(b) => {
                b.numer().hash(state);
                b.denom().hash(state);
            }
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small(n, 1) => write!(f, "{n}"),
            Rational::Small(n, d) => write!(f, "{n}/{d}"),
            Rational::Big(b) => {
                if b.is_integer() {
                    write!(f, "{}", b.numer())
                } else {
                    write!(f, "{}/{}", b.numer(), b.denom())
                }
            }
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts integers, `num/den` fractions and plain or scientific decimals.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational number: {s:?}"));
        if s.is_empty() {
            return Err(bad());
        }
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            return Ok(Self::from_big(BigRational::new(n, d)));
        }
        let (mantissa, exp) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let (neg, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let all: String = format!("{int_part}{frac_part}");
        let mut num: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().map_err(|_| bad())? };
        if neg {
            num = -num;
        }
        let scale = exp - frac_part.len() as i32;
        let ten = BigInt::from(10);
        let r = if scale >= 0 {
            BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
        };
        Ok(Self::from_big(r))
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        &self + &rhs
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        match (self, rhs) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                if b == d {
                    Rational::from_i128(*a as i128 + *c as i128, *b as i128)
                } else {
                    Rational::from_i128(
                        *a as i128 * *d as i128 + *c as i128 * *b as i128,
                        *b as i128 * *d as i128,
                    )
                }
            }
            _ => Rational::from_big(self.to_big() + rhs.to_big()),
        }
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        &self - &rhs
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        match (self, rhs) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                if b == d {
                    Rational::from_i128(*a as i128 - *c as i128, *b as i128)
                } else {
                    Rational::from_i128(
                        *a as i128 * *d as i128 - *c as i128 * *b as i128,
                        *b as i128 * *d as i128,
                    )
                }
            }
            _ => Rational::from_big(self.to_big() - rhs.to_big()),
        }
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        &self * &rhs
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        match (self, rhs) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                if *a == 0 || *c == 0 {
                    return Rational::Small(0, 1);
                }
                let g1 = gcd_i64(*a, *d);
                let g2 = gcd_i64(*c, *b);
                Rational::from_i128(
                    (*a / g1) as i128 * (*c / g2) as i128,
                    (*b / g2) as i128 * (*d / g1) as i128,
                )
            }
            _ => Rational::from_big(self.to_big() * rhs.to_big()),
        }
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        &self / &rhs
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        assert!(rhs.signum() != 0, "division by zero");
        self * &rhs.recip()
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match self {
            Rational::Small(n, d) => Rational::Small(-n, d),
            Rational::Big(b) => Rational::from_big(-*b),
        }
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        *self = &*self + &rhs;
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        *self = &*self - &rhs;
    }
}

impl MulAssign for Rational {
    fn mul_assign(&mut self, rhs: Rational) {
        *self = &*self * &rhs;
    }
}

impl serde::Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Field operations needed by the solvers, implemented for `f64` and [`Rational`].
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + 'static
{
    const MODE: Mode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn from_frac(n: i64, d: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    /// Exact for `Rational` (binary expansion of the float).
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn abs_val(&self) -> Self;

    /// Sign with a tolerance band around zero; the tolerance is ignored in exact mode.
    fn sign_tol(&self, tol: f64) -> i32;

    /// `self -= a * b`
    fn sub_mul(&mut self, a: &Self, b: &Self);

    /// Cleans round-off; a no-op in exact mode.
    fn chop(&mut self) {}

    fn is_exact() -> bool {
        Self::MODE == Mode::Rational
    }

    fn is_zero_val(&self) -> bool {
        self.sign_tol(0.0) == 0
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.clone() - other.clone()).sign_tol(tol) == 0
    }

    /// Decimal or fraction text in the form used for JSON output.
    fn to_text(&self) -> String;
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Rational;

    fn zero() -> Self {
        Rational::Small(0, 1)
    }
    fn one() -> Self {
        Rational::Small(1, 1)
    }
    fn from_int(n: i64) -> Self {
        Rational::from_integer(n)
    }
    fn from_frac(n: i64, d: i64) -> Self {
        Rational::new(n, d)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn from_f64(x: f64) -> Self {
        Rational::from_f64_exact(x).expect("finite float")
    }
    fn to_f64(&self) -> f64 {
        Rational::to_f64(self)
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn sign_tol(&self, _tol: f64) -> i32 {
        self.signum()
    }
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        let prod = a * b;
        *self = &*self - &prod;
    }
    fn to_text(&self) -> String {
        self.to_string()
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
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn from_frac(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }
    fn from_rational(r: &Rational) -> Self {
        r.to_f64()
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn sign_tol(&self, tol: f64) -> i32 {
        if *self > tol {
            1
        } else if *self < -tol {
            -1
        } else {
            0
        }
    }
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
    fn chop(&mut self) {
        if self.abs() < 1e-14 {
            *self = 0.0;
        }
    }
    fn to_text(&self) -> String {
        format_sig(*self, 15)
    }
}

/// Decimal text with `sig` significant digits and trailing zeros removed.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { x.to_string() };
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-6..=15).contains(&mag) {
        let s = format!("{:.*e}", sig.saturating_sub(1), x);
        return match s.split_once('e') {
            Some((m, e)) if m.contains('.') => {
                format!("{}e{}", m.trim_end_matches('0').trim_end_matches('.'), e)
            }
            _ => s,
        };
    }
    let decimals = (sig as i32 - 1 - mag).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// Sum of a slice.
pub fn sum<T: Scalar>(xs: &[T]) -> T {
    let mut s = T::zero();
    for x in xs {
        s += x.clone();
    }
    s
}

/// Inner product of two slices of equal length.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut s = T::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero_val() && !y.is_zero_val() {
            s += x.clone() * y.clone();
        }
    }
    s
}

/// Binary entropy in bits, with the argument clipped to `[0, 1]`.
pub fn binary_entropy(v: f64) -> f64 {
    let v = v.clamp(0.0, 1.0);
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    (term(v) + term(1.0 - v)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(r("1/3"), Rational::new(1, 3));
        assert_eq!(r("0.25"), Rational::new(1, 4));
        assert_eq!(r("-2.5e-1"), Rational::new(-1, 4));
        assert_eq!(r("6/4").to_string(), "3/2");
        assert_eq!(r("3").to_string(), "3");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
        assert!(".".parse::<Rational>().is_err());
    }

    #[test]
    fn overflow_promotes_to_big() {
        let big = Rational::new(i64::MAX, 1);
        let s = &big + &big;
        assert!(matches!(s, Rational::Big(_)));
        assert_eq!(s.to_string(), "18446744073709551614");
        let back = &s - &big;
        assert!(matches!(back, Rational::Small(_, _)));
        assert_eq!(back, big);
        let tiny = Rational::new(1, i64::MAX);
        let sq = &tiny * &tiny;
        assert_eq!(&sq * &Rational::new(i64::MAX, 1), tiny);
    }

    #[test]
    fn ordering_and_hash_agree_across_forms() {
        use std::collections::HashSet;
        let a = Rational::new(1, 2);
        let b = Rational::from_big(BigRational::new(BigInt::from(2), BigInt::from(4)));
        assert_eq!(a, b);
        let mut set = HashSet::new();
        set.insert(a.clone());
        assert!(set.contains(&b));
        assert!(Rational::new(-1, 3) < Rational::new(-1, 4));
    }

    #[test]
    fn convergents_of_sqrt2() {
        let c = Rational::convergents(std::f64::consts::SQRT_2, 100);
        let last = c.last().unwrap();
        assert_eq!(last.to_string(), "99/70");
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(0.2071067811865475, 12), "0.207106781187");
        assert_eq!(format_sig(0.25, 12), "0.25");
        assert_eq!(format_sig(-1.0, 12), "-1");
        assert_eq!(format_sig(1.5e-9, 12), "1.5e-9");
    }

    #[test]
    fn entropy_endpoints() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
        assert_eq!(binary_entropy(-0.1), 0.0);
    }
}
