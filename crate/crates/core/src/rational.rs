//! Exact rational values and their `"p/q"` text form.

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::Serializer;

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Always `p/q`, including integers (`3/1`) and zero (`0/1`).
pub fn fmt_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Accepts `p`, `p/q`, with an optional leading sign.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = |reason: &str| Error::Descriptor {
        descriptor: text.to_string(),
        reason: reason.to_string(),
    };
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d),
        None => (t, "1"),
    };
    let num: i64 = num.trim().parse().map_err(|_| bad("bad numerator"))?;
    let den: i64 = den.trim().parse().map_err(|_| bad("bad denominator"))?;
    if den == 0 {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

pub fn is_zero(q: &Rational) -> bool {
    q.is_zero()
}

pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(q))
}

pub fn serialize_opt<S: Serializer>(
    q: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_str(&fmt_rational(q)),
        None => s.serialize_none(),
    }
}
