//! Exact vertex weights.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Nonnegative exact rational weight.
pub type Weight = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightParseError {
    #[error("empty weight")]
    Empty,
    #[error("malformed weight {0:?}")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("negative weight {0:?}")]
    Negative(String),
}

pub fn int(v: i64) -> Weight {
    BigRational::from_integer(BigInt::from(v))
}

pub fn ratio(p: i64, q: i64) -> Weight {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn sum<'a>(it: impl IntoIterator<Item = &'a Weight>) -> Weight {
    it.into_iter().fold(Weight::zero(), |acc, w| acc + w)
}

pub fn to_f64(w: &Weight) -> f64 {
    w.to_f64().unwrap_or(f64::NAN)
}

/// Parses `12`, `0.125` or `3/8`. Negative values are rejected.
pub fn parse(s: &str) -> Result<Weight, WeightParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(WeightParseError::Empty);
    }
    if s.starts_with('-') {
        return Err(WeightParseError::Negative(s.to_string()));
    }
    let bad = || WeightParseError::Malformed(s.to_string());
    if let Some((p, q)) = s.split_once('/') {
        if !is_digits(p) || !is_digits(q) {
            return Err(bad());
        }
        let p = BigInt::from_str(p).map_err(|_| bad())?;
        let q = BigInt::from_str(q).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(WeightParseError::ZeroDenominator(s.to_string()));
        }
        return Ok(BigRational::new(p, q));
    }
    let (ip, fp) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if (!ip.is_empty() && !is_digits(ip)) || (!fp.is_empty() && !is_digits(fp)) {
        return Err(bad());
    }
    if s.ends_with('.') {
        return Err(bad());
    }
    let digits = format!("{ip}{fp}");
    let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), fp.len());
    Ok(BigRational::new(num, den))
}

fn is_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// Shortest exact textual form: an integer, a terminating decimal when it is
/// strictly shorter than `p/q`, otherwise `p/q`.
pub fn format(w: &Weight) -> String {
    if w.is_integer() {
        return w.numer().to_string();
    }
    let frac = format!("{}/{}", w.numer(), w.denom());
    match terminating_decimal(w) {
        Some(dec) if dec.len() < frac.len() => dec,
        _ => frac,
    }
}

fn terminating_decimal(w: &Weight) -> Option<String> {
    let mut den = w.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    let places = twos.max(fives);
    let scaled = w * BigRational::from_integer(num_traits::pow(BigInt::from(10), places));
    debug_assert!(scaled.is_integer());
    let digits = scaled.numer().abs().to_string();
    let digits = format!("{digits:0>width$}", width = places + 1);
    let (ip, fp) = digits.split_at(digits.len() - places);
    Some(format!("{ip}.{fp}"))
}

/// Display adapter for a weight in its shortest exact form.
pub struct Exact<'a>(pub &'a Weight);

impl fmt::Display for Exact<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format(self.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        assert_eq!(parse("3").unwrap(), int(3));
        assert_eq!(parse("0.125").unwrap(), ratio(1, 8));
        assert_eq!(parse(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse("6/4").unwrap(), ratio(3, 2));
        assert_eq!(parse("0").unwrap(), int(0));
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(parse("-1"), Err(WeightParseError::Negative(_))));
        assert!(matches!(parse("1/0"), Err(WeightParseError::ZeroDenominator(_))));
        for bad in ["", "a", "1.", "1/2/3", "1e3", "+1", "1 2", "/3", "."] {
            assert!(parse(bad).is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn shortest_form() {
        assert_eq!(format(&int(7)), "7");
        assert_eq!(format(&ratio(1, 2)), "1/2");
        assert_eq!(format(&ratio(1, 8)), "1/8");
        assert_eq!(format(&ratio(3, 20)), "3/20");
        assert_eq!(format(&ratio(125, 2)), "62.5");
        assert_eq!(format(&ratio(7, 3)), "7/3");
        assert_eq!(format(&ratio(1001, 1000)), "1.001");
        assert_eq!(format(&ratio(1, 1024)), "1/1024");
    }

    #[test]
    fn format_round_trips() {
        for p in 0..60 {
            for q in 1..40 {
                let w = ratio(p, q);
                assert_eq!(parse(&format(&w)).unwrap(), w);
            }
        }
    }
}
