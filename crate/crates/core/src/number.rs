//! Exact scalars: elements of a real quadratic field `Q(sqrt D)` and their
//! complex extension by `i`.
//!
//! Frequencies such as `sqrt(2)` or the golden ratio live in a quadratic
//! field, and every quantity the normal-form pipeline manipulates (bracket
//! constants, small denominators, resonance thresholds) stays inside it.
//! Sign decisions are therefore exact, which is what makes "this monomial
//! is resonant" a decidable statement.
//!
//! A value carries its radicand. Combining two irrational values with
//! different radicands is a programming error and panics.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;

/// Converts a big rational to the nearest-ish `f64` without overflowing on
/// large numerators and denominators.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    let n = r.numer();
    let d = r.denom();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    if nb < 1000 && db < 1000 {
        if let (Some(nf), Some(df)) = (n.to_f64(), d.to_f64()) {
            if nf.is_finite() && df.is_finite() {
                return nf / df;
            }
        }
    }
    // keep ~64 significant bits of each and fix the exponent by hand
    let ns = (nb - 64).max(0);
    let ds = (db - 64).max(0);
    let nf = (n >> ns as usize).to_f64().unwrap_or(0.0);
    let df = (d >> ds as usize).to_f64().unwrap_or(1.0);
    let exp = (ns - ds) as i32;
    (nf / df) * 2f64.powi(exp)
}

/// Exact rational from an `f64` (every finite double is a dyadic rational).
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Rounds to the nearest integer with ties to even.
pub fn round_half_even(r: &BigRational) -> BigInt {
    let fl = r.floor();
    let frac = r - &fl;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let base = fl.to_integer();
    match frac.cmp(&half) {
        Ordering::Less => base,
        Ordering::Greater => base + 1,
        Ordering::Equal => {
            if base.is_even() {
                base
            } else {
                base + 1
            }
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational, ParseError> {
    let s = s.trim();
    let bad = || ParseError::Number(s.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_rational(num)?;
        let d = parse_rational(den)?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(n / d);
    }
    let (neg, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => (
            &body[..pos],
            body[pos + 1..].parse::<i32>().map_err(|_| bad())?,
        ),
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(n);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -r } else { r })
}

/// Splits `k` into `(s, f)` with `k = s^2 * f` and `f` squarefree.
fn squarefree_split(k: u32) -> (u32, u32) {
    let mut outside = 1u32;
    let mut rest = k;
    let mut p = 2u32;
    while p * p <= rest {
        while rest.is_multiple_of(p * p) {
            outside *= p;
            rest /= p * p;
        }
        p += 1;
    }
    (outside, rest)
}

/// An element `rat + surd * sqrt(radicand)` of a real quadratic field.
///
/// Canonical form: `radicand == 0` exactly when `surd == 0`; otherwise the
/// radicand is squarefree and at least 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    rat: BigRational,
    surd: BigRational,
    radicand: u32,
}

impl QuadSurd {
    pub fn from_rational(r: BigRational) -> Self {
        Self {
            rat: r,
            surd: BigRational::zero(),
            radicand: 0,
        }
    }

    pub fn from_integer(k: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(k)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `rat + surd * sqrt(k)` for any positive integer `k`; square factors
    /// are pulled out of the radical.
    pub fn new(rat: BigRational, surd: BigRational, k: u32) -> Self {
        let (outside, inside) = squarefree_split(k);
        let surd = surd * BigRational::from_integer(BigInt::from(outside));
        if inside == 1 {
            return Self::from_rational(rat + surd);
        }
        Self::canonical(rat, surd, inside)
    }

    pub fn sqrt_of(k: u32) -> Self {
        Self::new(BigRational::zero(), BigRational::one(), k)
    }

    /// Exact conversion of a finite double.
    pub fn from_f64(x: f64) -> Option<Self> {
        rational_from_f64(x).map(Self::from_rational)
    }

    fn canonical(rat: BigRational, surd: BigRational, radicand: u32) -> Self {
        if surd.is_zero() {
            Self::from_rational(rat)
        } else {
            Self {
                rat,
                surd,
                radicand,
            }
        }
    }

    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rat
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.surd
    }

    /// Zero for rational values.
    pub fn radicand(&self) -> u32 {
        self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.surd.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.radicand == 0
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.rat)
    }

    fn common_radicand(&self, other: &Self) -> u32 {
        match (self.radicand, other.radicand) {
            (0, r) | (r, 0) => r,
            (a, b) if a == b => a,
            (a, b) => panic!("mixing quadratic fields Q(sqrt {a}) and Q(sqrt {b})"),
        }
    }

    /// Exact sign.
    pub fn signum(&self) -> Ordering {
        let sa = self.rat.cmp(&BigRational::zero());
        let sb = self.surd.cmp(&BigRational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        // opposite signs: compare rat^2 against surd^2 * D
        let a2 = &self.rat * &self.rat;
        let b2d = &self.surd * &self.surd * BigRational::from_integer(BigInt::from(self.radicand));
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Galois conjugate `rat - surd * sqrt(D)`.
    pub fn conjugate(&self) -> Self {
        Self::canonical(self.rat.clone(), -self.surd.clone(), self.radicand)
    }

    /// Field norm `rat^2 - D surd^2`.
    pub fn norm(&self) -> BigRational {
        &self.rat * &self.rat
            - &self.surd * &self.surd * BigRational::from_integer(BigInt::from(self.radicand))
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        let n = self.norm();
        let c = self.conjugate();
        Self::canonical(&c.rat / &n, &c.surd / &n, self.radicand)
    }

    pub fn to_f64(&self) -> f64 {
        let r = rational_to_f64(&self.rat);
        if self.radicand == 0 {
            r
        } else {
            r + rational_to_f64(&self.surd) * f64::from(self.radicand).sqrt()
        }
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        if let Some(r) = self.as_rational() {
            return r.floor().to_integer();
        }
        let guess = self.to_f64().floor();
        let mut k = BigInt::from(guess as i64);
        let le = |k: &BigInt| {
            (Self::from_rational(BigRational::from_integer(k.clone())) - self.clone()).signum()
                != Ordering::Greater
        };
        while !le(&k) {
            k -= 1;
        }
        while le(&(&k + 1)) {
            k += 1;
        }
        k
    }

    /// Nearest integer, ties to even.
    pub fn round_half_even(&self) -> BigInt {
        if let Some(r) = self.as_rational() {
            return round_half_even(r);
        }
        // an irrational value is never exactly a half-integer
        let half = Self::ratio(1, 2);
        (self.clone() + half).floor()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc *= self.clone();
        }
        acc
    }
}

impl Default for QuadSurd {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<BigRational> for QuadSurd {
    fn from(r: BigRational) -> Self {
        Self::from_rational(r)
    }
}

impl From<i64> for QuadSurd {
    fn from(k: i64) -> Self {
        Self::from_integer(k)
    }
}

impl PartialOrd for QuadSurd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadSurd {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).signum()
    }
}

impl Add for QuadSurd {
    type Output = QuadSurd;
    fn add(self, rhs: Self) -> Self {
        let d = self.common_radicand(&rhs);
        Self::canonical(self.rat + rhs.rat, self.surd + rhs.surd, d)
    }
}

impl Sub for QuadSurd {
    type Output = QuadSurd;
    fn sub(self, rhs: Self) -> Self {
        let d = self.common_radicand(&rhs);
        Self::canonical(self.rat - rhs.rat, self.surd - rhs.surd, d)
    }
}

impl Mul for QuadSurd {
    type Output = QuadSurd;
    fn mul(self, rhs: Self) -> Self {
        let d = self.common_radicand(&rhs);
        let dd = BigRational::from_integer(BigInt::from(d));
        let rat = &self.rat * &rhs.rat + &self.surd * &rhs.surd * dd;
        let surd = &self.rat * &rhs.surd + &self.surd * &rhs.rat;
        Self::canonical(rat, surd, d)
    }
}

impl Div for QuadSurd {
    type Output = QuadSurd;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl Neg for QuadSurd {
    type Output = QuadSurd;
    fn neg(self) -> Self {
        Self::canonical(-self.rat, -self.surd, self.radicand)
    }
}

impl AddAssign for QuadSurd {
    fn add_assign(&mut self, rhs: Self) {
        *self = std::mem::take(self) + rhs;
    }
}

impl SubAssign for QuadSurd {
    fn sub_assign(&mut self, rhs: Self) {
        *self = std::mem::take(self) - rhs;
    }
}

impl MulAssign for QuadSurd {
    fn mul_assign(&mut self, rhs: Self) {
        *self = std::mem::take(self) * rhs;
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.surd.is_zero() {
            return write!(f, "{}", fmt_rational(&self.rat));
        }
        let surd = format!("{}*sqrt({})", fmt_rational(&self.surd.abs()), self.radicand);
        if self.rat.is_zero() {
            let sign = if self.surd.is_negative() { "-" } else { "" };
            write!(f, "{sign}{surd}")
        } else {
            let sign = if self.surd.is_negative() { '-' } else { '+' };
            write!(f, "{}{sign}{surd}", fmt_rational(&self.rat))
        }
    }
}

/// Parses sums of terms such as `3/2`, `1.25`, `sqrt(2)`, `-1/4*sqrt(8)`,
/// `1/2+1/2*sqrt(5)` or `sqrt(5)/2`.
impl FromStr for QuadSurd {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(ParseError::Number(s.to_string()));
        }
        // split into signed terms, ignoring signs that belong to exponents
        let bytes = cleaned.as_bytes();
        let mut terms = Vec::new();
        let mut start = 0;
        for i in 1..bytes.len() {
            let c = bytes[i];
            let prev = bytes[i - 1];
            if (c == b'+' || c == b'-') && prev != b'e' && prev != b'E' && prev != b'*' && prev != b'/' {
                terms.push(&cleaned[start..i]);
                start = i;
            }
        }
        terms.push(&cleaned[start..]);

        let mut acc = QuadSurd::zero();
        for term in terms {
            acc += parse_term(term).map_err(|_| ParseError::Number(s.to_string()))?;
        }
        Ok(acc)
    }
}

fn parse_term(term: &str) -> Result<QuadSurd, ParseError> {
    let Some(pos) = term.find("sqrt(") else {
        return Ok(QuadSurd::from_rational(parse_rational(term)?));
    };
    let bad = || ParseError::Number(term.to_string());
    let prefix = term[..pos].trim_end_matches('*');
    let coeff = match prefix {
        "" | "+" => BigRational::one(),
        "-" => -BigRational::one(),
        p => parse_rational(p)?,
    };
    let rest = &term[pos + 5..];
    let close = rest.find(')').ok_or_else(bad)?;
    let k: u32 = rest[..close].parse().map_err(|_| bad())?;
    if k == 0 {
        return Ok(QuadSurd::zero());
    }
    let suffix = &rest[close + 1..];
    let coeff = match suffix {
        "" => coeff,
        s if s.starts_with('/') => {
            let den = parse_rational(&s[1..])?;
            if den.is_zero() {
                return Err(bad());
            }
            coeff / den
        }
        _ => return Err(bad()),
    };
    Ok(QuadSurd::new(BigRational::zero(), coeff, k))
}

/// A complex number whose real and imaginary parts are [`QuadSurd`]s.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Coeff {
    pub re: QuadSurd,
    pub im: QuadSurd,
}

impl Coeff {
    pub fn new(re: QuadSurd, im: QuadSurd) -> Self {
        Self { re, im }
    }

    pub fn real(re: QuadSurd) -> Self {
        Self {
            re,
            im: QuadSurd::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::real(QuadSurd::one())
    }

    pub fn i() -> Self {
        Self::new(QuadSurd::zero(), QuadSurd::one())
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::real(QuadSurd::ratio(num, den))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Multiplication by the imaginary unit.
    pub fn mul_i(&self) -> Self {
        Self::new(-self.im.clone(), self.re.clone())
    }

    /// `i^k`.
    pub fn i_pow(k: u32) -> Self {
        match k % 4 {
            0 => Self::one(),
            1 => Self::i(),
            2 => Self::real(QuadSurd::from_integer(-1)),
            _ => Self::new(QuadSurd::zero(), QuadSurd::from_integer(-1)),
        }
    }

    pub fn scale(&self, s: &QuadSurd) -> Self {
        Self::new(self.re.clone() * s.clone(), self.im.clone() * s.clone())
    }

    pub fn div_real(&self, s: &QuadSurd) -> Self {
        self.scale(&s.recip())
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// Modulus as a float; used for coefficient-size reports.
    pub fn magnitude(&self) -> f64 {
        self.to_complex().norm()
    }
}

impl Add for Coeff {
    type Output = Coeff;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for Coeff {
    type Output = Coeff;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for Coeff {
    type Output = Coeff;
    fn mul(self, rhs: Self) -> Self {
        let re = self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone();
        let im = self.re * rhs.im + self.im * rhs.re;
        Self::new(re, im)
    }
}

impl<'a> Mul<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn mul(self, rhs: &Coeff) -> Coeff {
        self.clone() * rhs.clone()
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl AddAssign for Coeff {
    fn add_assign(&mut self, rhs: Self) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.re, self.im)
    }
}

impl FromStr for Coeff {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseError::Number(s.to_string());
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (re, im) = inner.split_once(',').ok_or_else(bad)?;
        Ok(Self::new(re.parse()?, im.parse()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QuadSurd {
        s.parse().unwrap()
    }

    #[test]
    fn parses_common_forms() {
        assert_eq!(q("3/2"), QuadSurd::ratio(3, 2));
        assert_eq!(q("1.25"), QuadSurd::ratio(5, 4));
        assert_eq!(q("-2e-1"), QuadSurd::ratio(-1, 5));
        assert_eq!(q("sqrt(8)"), q("2*sqrt(2)"));
        assert_eq!(q("sqrt(4)"), QuadSurd::from_integer(2));
        assert_eq!(q("1/2+1/2*sqrt(5)"), q("sqrt(5)/2 + 0.5"));
        assert!("sqrt(2".parse::<QuadSurd>().is_err());
        assert!("abc".parse::<QuadSurd>().is_err());
        assert!("1/0".parse::<QuadSurd>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["0", "-7/3", "1/2+1/2*sqrt(5)", "-3*sqrt(2)", "5-1/4*sqrt(3)"] {
            let v = q(s);
            assert_eq!(q(&v.to_string()), v);
        }
    }

    #[test]
    fn exact_sign_and_order() {
        let r2 = QuadSurd::sqrt_of(2);
        assert_eq!((r2.clone() - QuadSurd::ratio(141, 100)).signum(), Ordering::Greater);
        assert_eq!((r2.clone() - QuadSurd::ratio(142, 100)).signum(), Ordering::Less);
        // -7 + 5 sqrt 2 = 0.0710...
        let k = QuadSurd::from_integer(-7) + QuadSurd::from_integer(5) * r2.clone();
        assert_eq!(k.signum(), Ordering::Greater);
        assert!(k < QuadSurd::ratio(1, 10));
        assert_eq!((r2.clone() * r2.clone()), QuadSurd::from_integer(2));
        assert_eq!(r2.clone() / r2, QuadSurd::one());
    }

    #[test]
    fn floor_and_rounding() {
        assert_eq!(q("sqrt(2)").floor(), BigInt::from(1));
        assert_eq!(q("-sqrt(2)").floor(), BigInt::from(-2));
        assert_eq!(q("12*sqrt(2)").round_half_even(), BigInt::from(17));
        assert_eq!(q("5/2").round_half_even(), BigInt::from(2));
        assert_eq!(q("7/2").round_half_even(), BigInt::from(4));
        assert_eq!(q("-5/2").round_half_even(), BigInt::from(-2));
    }

    #[test]
    fn complex_ops() {
        let i = Coeff::i();
        assert_eq!(i.clone() * i.clone(), Coeff::real(QuadSurd::from_integer(-1)));
        assert_eq!(Coeff::i_pow(3), -Coeff::i());
        let c: Coeff = "(1/2,-sqrt(2))".parse().unwrap();
        assert_eq!(c.to_string().parse::<Coeff>().unwrap(), c);
        assert_eq!(c.mul_i(), c.clone() * Coeff::i());
    }

    #[test]
    fn big_rational_to_f64_does_not_overflow() {
        let big = BigRational::new(BigInt::from(3) << 3000usize, BigInt::from(1) << 3000usize);
        assert_eq!(rational_to_f64(&big), 3.0);
    }

    #[test]
    #[should_panic(expected = "mixing quadratic fields")]
    fn mixed_fields_panic() {
        let _ = QuadSurd::sqrt_of(2) + QuadSurd::sqrt_of(3);
    }
}
