//! Direction vectors. Each coordinate carries a double and, in extended
//! precision, an exact fixed-point value with [`EXACT_DIGITS`] decimals.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Decimal digits kept by the extended-precision path.
pub const EXACT_DIGITS: u32 = 60;
/// Guard digits used while evaluating series.
const GUARD_DIGITS: u32 = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Double,
    Extended,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionVector {
    alphas: Vec<f64>,
    exact: Option<Vec<BigInt>>,
    literals: Vec<String>,
}

pub(crate) fn pow10(n: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), n as usize)
}

/// `atanh(1 / inv)` scaled by `scale`, for integer `inv >= 2`.
fn atanh_inverse(inv: u64, scale: &BigInt) -> BigInt {
    let inv = BigInt::from(inv);
    let inv_sq = &inv * &inv;
    let mut power = scale / &inv;
    let mut sum = BigInt::zero();
    let mut k = 1u64;
    while !power.is_zero() {
        sum += &power / k;
        power /= &inv_sq;
        k += 2;
    }
    sum
}

/// `atanh(x)` for a scaled argument `|x| <= scale / 3`.
fn atanh_scaled(x: &BigInt, scale: &BigInt) -> BigInt {
    let x_sq = x * x / scale;
    let mut power = x.clone();
    let mut sum = BigInt::zero();
    let mut k = 1u64;
    while !power.is_zero() {
        sum += &power / k;
        power = power * &x_sq / scale;
        k += 2;
    }
    sum
}

/// `ln(k) * 10^EXACT_DIGITS`, rounded toward zero.
fn ln_exact(k: u64) -> BigInt {
    let working = pow10(EXACT_DIGITS + GUARD_DIGITS);
    let bits = 63 - k.leading_zeros();
    // k = 2^bits * y with y in [1, 2)
    let y = BigInt::from(k) * &working / (BigInt::one() << bits);
    let ln2 = atanh_inverse(3, &working) * 2;
    let z = (&y - &working) * &working / (&y + &working);
    let ln_y = atanh_scaled(&z, &working) * 2;
    (ln2 * bits + ln_y) / pow10(GUARD_DIGITS)
}

fn sqrt_exact(k: u64) -> BigInt {
    (BigInt::from(k) * pow10(2 * EXACT_DIGITS)).sqrt()
}

/// Parses a decimal literal (`-1.25`, `3`, `2.5e-3`) exactly into fixed point,
/// truncating beyond [`EXACT_DIGITS`] decimals.
fn decimal_exact(text: &str) -> Option<BigInt> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(i) => (&digits[..i], &digits[i + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value: BigInt = all.parse().ok()?;
    let shift = EXACT_DIGITS as i64 + exponent as i64 - frac_part.len() as i64;
    if shift >= 0 {
        value *= pow10(shift as u32);
    } else {
        value /= pow10((-shift) as u32);
    }
    Some(if negative { -value } else { value })
}

fn exact_to_f64(x: &BigInt) -> f64 {
    let s = format!(
        "{}{}e-{}",
        if x.is_negative() { "-" } else { "" },
        x.abs(),
        EXACT_DIGITS
    );
    s.parse().unwrap_or(f64::NAN)
}

/// Parses one coordinate: `sqrt<k>`, `phi`, `log<k>` or a decimal literal,
/// optionally preceded by a sign.
fn parse_token(token: &str) -> Result<(f64, BigInt)> {
    let t = token.trim();
    let (negative, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, t.strip_prefix('+').unwrap_or(t).trim()),
    };
    let bad = || Error::InvalidDirection(format!("unrecognized coordinate {token:?}"));
    let integer_arg = |rest: &str| -> Result<u64> {
        let rest = rest.trim_start_matches('(').trim_end_matches(')');
        rest.parse::<u64>().map_err(|_| bad())
    };
    let (value, exact) = if let Some(rest) = body.strip_prefix("sqrt") {
        let k = integer_arg(rest)?;
        ((k as f64).sqrt(), sqrt_exact(k))
    } else if let Some(rest) = body.strip_prefix("log") {
        let k = integer_arg(rest)?;
        if k == 0 {
            return Err(bad());
        }
        ((k as f64).ln(), ln_exact(k))
    } else if body == "phi" {
        let exact = (pow10(EXACT_DIGITS) + sqrt_exact(5)) / 2;
        ((1.0 + 5f64.sqrt()) / 2.0, exact)
    } else {
        let exact = decimal_exact(body).ok_or_else(bad)?;
        let value: f64 = body.parse().map_err(|_| bad())?;
        (value, exact)
    };
    if negative {
        Ok((-value, -exact))
    } else {
        Ok((value, exact))
    }
}

impl DirectionVector {
    /// Double-precision direction; orderings rely on compensated dot products.
    pub fn from_f64(alphas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidDirection("empty direction".into()));
        }
        if alphas.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidDirection("non-finite coordinate".into()));
        }
        let literals = alphas.iter().map(|a| format!("{a}")).collect();
        Ok(Self { alphas, exact: None, literals })
    }

    /// Extended-precision direction from coordinate tokens.
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S]) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::InvalidDirection("empty direction".into()));
        }
        let mut alphas = Vec::new();
        let mut exact = Vec::new();
        for t in tokens {
            let (v, e) = parse_token(t.as_ref())?;
            alphas.push(v);
            exact.push(e);
        }
        let literals = tokens.iter().map(|t| t.as_ref().trim().to_string()).collect();
        Ok(Self { alphas, exact: Some(exact), literals })
    }

    /// Parses a comma-separated list such as `"sqrt2,sqrt3"` or `"1,phi"`.
    pub fn parse(text: &str) -> Result<Self> {
        let tokens: Vec<&str> = text.split(',').collect();
        Self::from_tokens(&tokens)
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn exact(&self) -> Option<&[BigInt]> {
        self.exact.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    pub fn precision(&self) -> Precision {
        if self.exact.is_some() {
            Precision::Extended
        } else {
            Precision::Double
        }
    }

    /// Human-readable form, e.g. `"(sqrt2, sqrt3)"`.
    pub fn description(&self) -> String {
        format!("({})", self.literals.join(", "))
    }

    /// `c * alpha`, exact in extended precision when `c` is an integer.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let alphas = self.alphas.iter().map(|a| a * c).collect();
        let exact = match (&self.exact, c.fract() == 0.0 && c.abs() < 1e15) {
            (Some(e), true) => Some(e.iter().map(|x| x * BigInt::from(c as i64)).collect()),
            _ => None,
        };
        let literals = self.literals.iter().map(|l| format!("{c}*{l}")).collect();
        Ok(Self { alphas, exact, literals })
    }

    /// Nearest integer to `scale * alpha_m` for each coordinate, exact when possible.
    pub(crate) fn round_scaled(&self, scale: u64) -> Vec<i64> {
        match &self.exact {
            Some(exact) => {
                let unit = pow10(EXACT_DIGITS);
                let half = &unit / 2;
                exact
                    .iter()
                    .map(|x| {
                        let v: BigInt = x * BigInt::from(scale);
                        let shifted: BigInt = if v.is_negative() { v - &half } else { v + &half };
                        let rounded: BigInt = shifted / &unit;
                        rounded.to_i64().unwrap_or(i64::MAX)
                    })
                    .collect()
            }
            None => self
                .alphas
                .iter()
                .map(|a| (a * scale as f64).round() as i64)
                .collect(),
        }
    }

    pub(crate) fn exact_value(x: &BigInt) -> f64 {
        exact_to_f64(x)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoordJson {
    Number(f64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
struct DirectionJson {
    alphas: Vec<CoordJson>,
    #[serde(default = "default_precision")]
    precision: Precision,
}

fn default_precision() -> Precision {
    Precision::Double
}

impl Serialize for DirectionVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let alphas = match self.precision() {
            Precision::Double => self.alphas.iter().map(|&a| CoordJson::Number(a)).collect(),
            Precision::Extended => self.literals.iter().map(|l| CoordJson::Text(l.clone())).collect(),
        };
        DirectionJson { alphas, precision: self.precision() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DirectionVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let json = DirectionJson::deserialize(deserializer)?;
        let tokens: Vec<String> = json
            .alphas
            .iter()
            .map(|c| match c {
                // shortest round-trip decimal, taken as an exact real
                CoordJson::Number(v) => format!("{v:e}"),
                CoordJson::Text(s) => s.clone(),
            })
            .collect();
        let parsed = match json.precision {
            Precision::Extended => Self::from_tokens(&tokens),
            Precision::Double => Self::from_tokens(&tokens)
                .and_then(|d| Self::from_f64(d.alphas.clone())),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT2_50: &str = "1.41421356237309504880168872420969807856967187537694";
    const LN3_50: &str = "1.09861228866810969139524523692252570464749055782274";
    const PHI_50: &str = "1.61803398874989484820458683436563811772030917980576";

    fn leading_digits(x: &BigInt, n: usize) -> String {
        let s = x.to_string();
        format!("{}.{}", &s[..1], &s[1..n])
    }

    #[test]
    fn fifty_digit_constants() {
        let d = DirectionVector::parse("sqrt2,log3,phi").unwrap();
        let e = d.exact().unwrap();
        assert_eq!(leading_digits(&e[0], 51), SQRT2_50);
        assert_eq!(leading_digits(&e[1], 51), LN3_50);
        assert_eq!(leading_digits(&e[2], 51), PHI_50);
        assert!((d.alphas()[0] - 2f64.sqrt()).abs() < 1e-16);
        assert_eq!(d.precision(), Precision::Extended);
    }

    #[test]
    fn log_of_powers_of_two() {
        let l8: BigInt = ln_exact(8);
        let l2 = ln_exact(2);
        let diff: BigInt = l8 - l2 * BigInt::from(3);
        assert!(diff.abs() < BigInt::from(10));
        assert!(ln_exact(1).is_zero());
    }

    #[test]
    fn decimal_literals_are_exact() {
        let d = DirectionVector::parse("0.1, -2.5e-3, 7").unwrap();
        let e = d.exact().unwrap();
        assert_eq!(e[0], pow10(EXACT_DIGITS - 1));
        assert_eq!(e[1], -BigInt::from(25) * pow10(EXACT_DIGITS - 4));
        assert_eq!(e[2], BigInt::from(7) * pow10(EXACT_DIGITS));
        assert!(DirectionVector::parse("sqrtx").is_err());
        assert!(DirectionVector::parse("1.2.3").is_err());
        assert!(DirectionVector::parse("log0").is_err());
    }

    #[test]
    fn json_forms() {
        let d: DirectionVector =
            serde_json::from_str(r#"{"alphas": ["sqrt2", 0.5], "precision": "extended"}"#).unwrap();
        assert_eq!(d.precision(), Precision::Extended);
        assert_eq!(d.exact().unwrap()[1], pow10(EXACT_DIGITS) / 2);
        let back: DirectionVector = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);

        let plain: DirectionVector = serde_json::from_str(r#"{"alphas": [1.5, 2.25]}"#).unwrap();
        assert_eq!(plain.precision(), Precision::Double);
        assert_eq!(plain.alphas(), &[1.5, 2.25]);
    }

    #[test]
    fn rounding_uses_exact_values() {
        let d = DirectionVector::parse("sqrt2,-sqrt3").unwrap();
        assert_eq!(d.round_scaled(1000), vec![1414, -1732]);
        assert_eq!(d.round_scaled(1), vec![1, -2]);
        let f = DirectionVector::from_f64(vec![2f64.sqrt(), -3f64.sqrt()]).unwrap();
        assert_eq!(f.round_scaled(1000), vec![1414, -1732]);
    }
}
