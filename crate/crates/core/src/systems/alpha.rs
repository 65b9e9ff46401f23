use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// (√5 − 1)/2 to 40 digits.
pub const GOLDEN_DIGITS: &str = "0.6180339887498948482045868343656381177203";

/// A rotation number in [0, 1).
///
/// Irrational values are held as an unevaluated double-double `hi + lo`,
/// so that `frac(n α)` stays accurate to roughly 1e-16 for `n` up to 2^53.
/// Rational values `p/q` are kept exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Alpha {
    hi: f64,
    lo: f64,
    rational: Option<(u64, u64)>,
    precision_digits: u32,
    source: String,
}

impl Alpha {
    /// Parses `golden`, a fraction `p/q`, or a decimal literal.
    pub fn parse(text: &str) -> Result<Self> {
        let s = text.trim();
        let err = |msg: String| Error::Parse { line: 0, msg };
        if s.eq_ignore_ascii_case("golden") {
            let mut a = Self::parse_decimal(GOLDEN_DIGITS)?;
            a.source = "golden".into();
            return Ok(a);
        }
        if let Some((p, q)) = s.split_once('/') {
            let p: u64 = p
                .trim()
                .parse()
                .map_err(|_| err(format!("bad numerator in alpha `{s}`")))?;
            let q: u64 = q
                .trim()
                .parse()
                .map_err(|_| err(format!("bad denominator in alpha `{s}`")))?;
            return Self::rational(p, q);
        }
        Self::parse_decimal(s)
    }

    pub fn rational(p: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Parse {
                line: 0,
                msg: "alpha denominator is zero".into(),
            });
        }
        let p = p % q;
        let g = gcd(p, q);
        let (p, q) = (p / g, q / g);
        let hi = p as f64 / q as f64;
        let exact = BigRational::new(BigInt::from(p), BigInt::from(q));
        let lo = residual(&exact, hi);
        Ok(Self {
            hi,
            lo,
            rational: Some((p, q)),
            precision_digits: u32::MAX,
            source: format!("{p}/{q}"),
        })
    }

    pub fn golden() -> Self {
        Self::parse("golden").expect("golden digits parse")
    }

    /// Wraps a plain double. Precision is recorded as 16 digits.
    pub fn from_f64(value: f64) -> Self {
        let v = super::wrap_unit(value);
        Self {
            hi: v,
            lo: 0.0,
            rational: None,
            precision_digits: 16,
            source: format!("{v}"),
        }
    }

    fn parse_decimal(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            line: 0,
            msg: format!("alpha `{s}` is not a decimal, fraction or `golden`"),
        };
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let mantissa: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| bad())?
        };
        let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
        let mut exact = BigRational::new(if neg { -mantissa } else { mantissa }, denom);
        exact = &exact - exact.floor();
        if exact.is_negative() {
            exact += BigRational::one();
        }
        let hi = exact.to_f64().ok_or_else(bad)?;
        let hi = if hi >= 1.0 { 0.0 } else { hi };
        let lo = residual(&exact, hi);
        Ok(Self {
            hi,
            lo,
            rational: None,
            precision_digits: frac_part.len().max(1) as u32,
            source: s.to_string(),
        })
    }

    /// Truncates a decimal (or `golden`) value to `digits` fractional
    /// digits. Rationals are exact and ignore the request.
    pub fn with_precision(self, digits: u32) -> Result<Self> {
        if self.rational.is_some() || digits == self.precision_digits {
            return Ok(self);
        }
        if digits == 0 {
            return Err(Error::Validation("precision_digits must be positive".into()));
        }
        let text = if self.source == "golden" {
            GOLDEN_DIGITS
        } else {
            self.source.as_str()
        };
        let (int_part, frac) = text.split_once('.').unwrap_or((text, ""));
        if frac.len() < digits as usize {
            return Err(Error::Validation(format!(
                "alpha `{}` states {} digits but precision_digits = {digits}",
                self.source,
                frac.len()
            )));
        }
        let mut a = Self::parse_decimal(&format!("{int_part}.{}", &frac[..digits as usize]))?;
        a.source = self.source;
        Ok(a)
    }

    pub fn value(&self) -> f64 {
        self.hi
    }

    pub fn as_rational(&self) -> Option<(u64, u64)> {
        self.rational
    }

    pub fn precision_digits(&self) -> u32 {
        self.precision_digits
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// frac(n·α) in [0, 1).
    pub fn frac_mul(&self, n: u64) -> f64 {
        if let Some((p, q)) = self.rational {
            let r = ((n % q) as u128 * p as u128 % q as u128) as f64;
            return r / q as f64;
        }
        frac_mul_split(self.hi, self.lo, n)
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

/// frac(n·(hi + lo)) using an exact product error term for `n·hi`.
pub(crate) fn frac_mul_split(hi: f64, lo: f64, n: u64) -> f64 {
    let nf = n as f64;
    let p = nf * hi;
    let e = nf.mul_add(hi, -p);
    let base = p - p.floor();
    super::wrap_unit(base + e + nf * lo)
}

fn residual(exact: &BigRational, hi: f64) -> f64 {
    match BigRational::from_float(hi) {
        Some(h) => (exact - h).to_f64().unwrap_or(0.0),
        None => 0.0,
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_matches_closed_form() {
        let a = Alpha::golden();
        assert!((a.value() - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-16);
        assert_eq!(a.precision_digits(), 40);
    }

    #[test]
    fn rational_is_reduced_and_exact() {
        let a = Alpha::parse("2/8").unwrap();
        assert_eq!(a.as_rational(), Some((1, 4)));
        assert_eq!(a.frac_mul(4), 0.0);
        assert_eq!(a.frac_mul(7), 0.75);
    }

    #[test]
    fn split_product_beats_naive() {
        let a = Alpha::golden();
        // 89·α = 55.005...; reference value from a 50-digit evaluation.
        let n = 89u64;
        let f = a.frac_mul(n);
        let dist = f.min(1.0 - f);
        assert!((dist - 0.005_024_998_740_641_49).abs() < 1e-15, "{dist}");
        let big = 1u64 << 40;
        let f = a.frac_mul(big);
        assert!((0.0..1.0).contains(&f));
    }

    #[test]
    fn truncated_golden_keeps_name() {
        let a = Alpha::golden().with_precision(30).unwrap();
        assert_eq!(a.precision_digits(), 30);
        assert_eq!(a.source(), "golden");
        assert!((a.value() - Alpha::golden().value()).abs() < 1e-15);
        assert!(Alpha::parse("0.25").unwrap().with_precision(5).is_err());
    }

    #[test]
    fn rejects_garbage() {
        assert!(Alpha::parse("abc").is_err());
        assert!(Alpha::parse("1/0").is_err());
        assert!(Alpha::parse(".").is_err());
    }

    #[test]
    fn decimal_wraps_into_unit_interval() {
        assert_eq!(Alpha::parse("1.25").unwrap().value(), 0.25);
        assert_eq!(Alpha::parse("-0.25").unwrap().value(), 0.75);
    }
}
