//! Numeric backends.
//!
//! Every value in the library is generic over a [`Scalar`]: either an exact
//! arbitrary-precision rational ([`Exact`]) or an `f64`. A container never
//! mixes the two, so the exact backend stays closed over the rationals.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Exact = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Exact,
    Float,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            other => Err(Error::Parse(format!("unknown backend {other:?}"))),
        }
    }
}

/// A number type the calculus can run on.
pub trait Scalar:
    Clone + fmt::Debug + PartialOrd + Num + Signed + Send + Sync + 'static
{
    const BACKEND: Backend;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_biguint(n: &BigUint) -> Self;

    /// Converts an exact rational into this backend (rounding on `f64`).
    fn from_exact(q: &Exact) -> Self;

    fn to_f64(&self) -> f64;

    /// Exact rational value (the binary value itself for `f64`).
    fn to_exact(&self) -> Exact;

    /// Absolute slack allowed in sign and equality checks.
    fn tolerance() -> Self;

    fn to_json(&self) -> Value;

    fn from_json(value: &Value) -> Result<Self>;

    /// Text form used in CSV output and error messages.
    fn render(&self) -> String;

    /// Decimal rendering at a fixed number of places.
    fn to_decimal(&self, places: usize) -> String;

    fn from_usize(n: usize) -> Self {
        Self::from_biguint(&BigUint::from(n))
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }

    /// `self < 0` beyond the backend tolerance.
    fn is_clearly_negative(&self) -> bool {
        *self < -Self::tolerance()
    }

    /// `self == 0` up to the backend tolerance.
    fn is_negligible(&self) -> bool {
        self.abs() <= Self::tolerance()
    }

    /// Equality up to the backend tolerance, scaled by magnitude.
    fn approx_eq(&self, other: &Self) -> bool {
        let diff = (self.clone() - other.clone()).abs();
        let scale = Self::one() + self.abs() + other.abs();
        diff <= Self::tolerance() * scale
    }

    fn powu(&self, exp: usize) -> Self {
        num_traits::pow(self.clone(), exp)
    }

    /// `scale · Σ w p^r (1 − p)^s` over `(p, w)` pairs.
    fn weighted_likelihood(pairs: &[(&Self, &Self)], r: usize, s: usize, scale: &BigUint) -> Self {
        let sum = pairs.iter().fold(Self::zero(), |acc, (p, w)| {
            acc + (*w).clone() * p.powu(r) * (Self::one() - (*p).clone()).powu(s)
        });
        if scale.is_one() {
            sum
        } else {
            Self::from_biguint(scale) * sum
        }
    }
}

impl Scalar for Exact {
    const BACKEND: Backend = Backend::Exact;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_biguint(n: &BigUint) -> Self {
        BigRational::from_integer(BigInt::from(n.clone()))
    }

    fn from_exact(q: &Exact) -> Self {
        q.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_exact(&self) -> Exact {
        self.clone()
    }

    fn tolerance() -> Self {
        Self::zero()
    }

    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn from_json(value: &Value) -> Result<Self> {
        match value {
            Value::String(s) => parse_rational(s),
            _ => Err(Error::MixedBackend {
                expected: Backend::Exact,
            }),
        }
    }

    fn render(&self) -> String {
        format_rational(self)
    }

    fn to_decimal(&self, places: usize) -> String {
        format_decimal_exact(self, places)
    }

    fn powu(&self, exp: usize) -> Self {
        // Coprime parts stay coprime, so no reduction is needed.
        let exp = u32::try_from(exp).expect("exponent fits in u32");
        BigRational::new_raw(self.numer().pow(exp), self.denom().pow(exp))
    }

    fn weighted_likelihood(pairs: &[(&Self, &Self)], r: usize, s: usize, scale: &BigUint) -> Self {
        if let Some(q) = small_weighted_likelihood(pairs, r, s, scale) {
            return q;
        }
        // Integer sum over common denominators, reduced once at the end.
        let lcm = |acc: BigInt, q: &&Exact| acc.lcm(q.denom());
        let p_den = pairs.iter().map(|(p, _)| p).fold(BigInt::one(), lcm);
        let w_den = pairs.iter().map(|(_, w)| w).fold(BigInt::one(), lcm);
        let (r32, s32) = (
            u32::try_from(r).expect("exponent fits in u32"),
            u32::try_from(s).expect("exponent fits in u32"),
        );
        let total = pairs.iter().fold(BigInt::zero(), |acc, (p, w)| {
            let a = p.numer() * (&p_den / p.denom());
            let weight = w.numer() * (&w_den / w.denom());
            acc + weight * a.pow(r32) * (&p_den - &a).pow(s32)
        });
        BigRational::new(total * BigInt::from(scale.clone()), w_den * p_den.pow(r32 + s32))
    }
}

/// [`Scalar::weighted_likelihood`] in `i128`, or `None` on overflow.
fn small_weighted_likelihood(
    pairs: &[(&Exact, &Exact)],
    r: usize,
    s: usize,
    scale: &BigUint,
) -> Option<Exact> {
    let parts = |q: &Exact| Some((q.numer().to_i128()?, q.denom().to_i128()?));
    let lcm = |acc: Option<i128>, d: i128| {
        let acc = acc?;
        (acc / acc.gcd(&d)).checked_mul(d)
    };
    let mut p_den = Some(1i128);
    let mut w_den = Some(1i128);
    for (p, w) in pairs {
        p_den = lcm(p_den, parts(p)?.1);
        w_den = lcm(w_den, parts(w)?.1);
    }
    let (p_den, w_den) = (p_den?, w_den?);
    let (r, s) = (u32::try_from(r).ok()?, u32::try_from(s).ok()?);
    let mut total = 0i128;
    for (p, w) in pairs {
        let (pn, pd) = parts(p)?;
        let (wn, wd) = parts(w)?;
        let a = pn.checked_mul(p_den / pd)?;
        let term = wn
            .checked_mul(w_den / wd)?
            .checked_mul(a.checked_pow(r)?)?
            .checked_mul((p_den - a).checked_pow(s)?)?;
        total = total.checked_add(term)?;
    }
    let total = total.checked_mul(scale.to_i128()?)?;
    let den = w_den.checked_mul(p_den.checked_pow(r.checked_add(s)?)?)?;
    let g = total.gcd(&den);
    Some(BigRational::new_raw(
        BigInt::from(total / g),
        BigInt::from(den / g),
    ))
}

impl Scalar for f64 {
    const BACKEND: Backend = Backend::Float;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_biguint(n: &BigUint) -> Self {
        n.to_f64().unwrap_or(f64::INFINITY)
    }

    fn from_exact(q: &Exact) -> Self {
        Scalar::to_f64(q)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_exact(&self) -> Exact {
        BigRational::from_float(*self).unwrap_or_else(Exact::zero)
    }

    fn tolerance() -> Self {
        1e-12
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }

    fn from_json(value: &Value) -> Result<Self> {
        match value {
            Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("{n} is not a finite number"))),
            _ => Err(Error::MixedBackend {
                expected: Backend::Float,
            }),
        }
    }

    fn render(&self) -> String {
        format!("{self}")
    }

    fn to_decimal(&self, places: usize) -> String {
        format!("{:.*}", places, self)
    }
}

/// Binomial coefficient as an exact big integer (multiplicative formula).
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= BigUint::from(n - i);
        acc /= BigUint::from(i + 1);
    }
    acc
}

/// `C(n, 0), …, C(n, n)`.
pub fn binomial_row(n: usize) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigUint::one();
    for k in 0..=n {
        row.push(c.clone());
        c = c * (n - k) / (k + 1);
    }
    row
}

/// Formats as `num/den`, or just `num` for integers.
pub fn format_rational(q: &Exact) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `num/den`, an integer, or a decimal such as `0.25` or `-1.5e-3`
/// into an exact rational. Decimals are converted without rounding.
pub fn parse_rational(text: &str) -> Result<Exact> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
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
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str_radix(&all_digits, 10).map_err(|_| bad())?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let q = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(q)
}

/// Parses text into the requested backend, exactly when possible.
pub fn parse_scalar<S: Scalar>(text: &str) -> Result<S> {
    parse_rational(text).map(|q| S::from_exact(&q))
}

/// Rounds an exact rational to `places` decimals (half away from zero) and
/// formats the result without going through floating point.
pub fn format_decimal_exact(q: &Exact, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10u32), places);
    let scaled = q * BigRational::from_integer(scale.clone());
    let rounded = scaled.round().to_integer();
    let negative = rounded.is_negative();
    let (int_part, frac_part) = rounded.abs().div_rem(&scale);
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    out.push_str(&int_part.to_string());
    if places > 0 {
        let frac = frac_part.to_string();
        out.push('.');
        out.push_str(&"0".repeat(places - frac.len()));
        out.push_str(&frac);
    }
    out
}
