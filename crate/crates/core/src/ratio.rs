//! Exact non-negative rationals, always stored reduced.
//!
//! Steadiness products multiply hundreds of factors (k−1)/k whose raw
//! numerators and denominators would grow quadratically; reducing after
//! every factor with cross gcds keeps the bit growth near minimal.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// A reduced fraction of two arbitrary-precision non-negative integers.
/// The denominator is always ≥ 1 and `gcd(num, den) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactRatio {
    num: BigUint,
    den: BigUint,
}

impl ExactRatio {
    pub fn new(num: BigUint, den: BigUint) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        let g = num.gcd(&den);
        Ok(Self {
            num: &num / &g,
            den: &den / &g,
        })
    }

    pub fn from_u64s(num: u64, den: u64) -> Result<Self> {
        Self::new(BigUint::from(num), BigUint::from(den))
    }

    pub fn one() -> Self {
        Self {
            num: BigUint::one(),
            den: BigUint::one(),
        }
    }

    pub fn from_integer(n: BigUint) -> Self {
        Self {
            num: n,
            den: BigUint::one(),
        }
    }

    /// 2^nu / 6^kappa, reduced. The gcd is 2^min(nu, kappa).
    pub fn pow2_over_pow6(nu: u32, kappa: u32) -> Self {
        let common = nu.min(kappa);
        let num = BigUint::one() << (nu - common) as usize;
        let den = BigUint::from(3u32).pow(kappa) << (kappa - common) as usize;
        Self { num, den }
    }

    pub fn num(&self) -> &BigUint {
        &self.num
    }

    pub fn den(&self) -> &BigUint {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// True iff gcd(num, den) = 1. Stored values always satisfy this;
    /// the accessor exists so tests can assert re-reduction is a no-op.
    pub fn is_reduced(&self) -> bool {
        self.num.gcd(&self.den).is_one()
    }

    /// Multiplies by num/den in place, reducing with cross gcds.
    pub fn mul_fraction(&mut self, num: &BigUint, den: &BigUint) {
        debug_assert!(!den.is_zero());
        let g1 = self.num.gcd(den);
        let g2 = num.gcd(&self.den);
        self.num = (&self.num / &g1) * (num / &g2);
        self.den = (&self.den / &g2) * (den / &g1);
    }

    pub fn mul(&self, other: &ExactRatio) -> ExactRatio {
        let mut out = self.clone();
        out.mul_fraction(&other.num, &other.den);
        out
    }

    /// Exact comparison against an integer.
    pub fn cmp_integer(&self, n: &BigUint) -> Ordering {
        self.num.cmp(&(n * &self.den))
    }

    /// log₂ of the exact value, computed as log₂(num) − log₂(den).
    /// Accurate to a few 1e-14 in absolute terms even for operands of
    /// thousands of bits, which is far inside the 2⁻⁴⁰ budget used by
    /// the log-domain agreement checks.
    pub fn log2(&self) -> f64 {
        log2_biguint(&self.num) - log2_biguint(&self.den)
    }

    pub fn to_f64(&self) -> f64 {
        self.log2().exp2()
    }
}

/// log₂ of a positive big integer via its top 53 bits.
pub fn log2_biguint(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "log2 of zero");
    let bits = x.bits();
    if bits <= 53 {
        x.to_f64().unwrap().log2()
    } else {
        let shift = bits - 53;
        let top = (x >> shift).to_f64().unwrap();
        top.log2() + shift as f64
    }
}

impl PartialOrd for ExactRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl fmt::Display for ExactRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for ExactRatio {
    type Err = Error;

    /// Parses `<num>/<den>` or a bare integer, both in decimal.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("malformed ratio: {s:?}"));
        match s.split_once('/') {
            Some((n, d)) => {
                let num = BigUint::from_str(n.trim()).map_err(|_| bad())?;
                let den = BigUint::from_str(d.trim()).map_err(|_| bad())?;
                Self::new(num, den)
            }
            None => {
                let num = BigUint::from_str(s.trim()).map_err(|_| bad())?;
                Ok(Self::from_integer(num))
            }
        }
    }
}

// Serialized as {"num": "<decimal>", "den": "<decimal>"} for portability.
impl Serialize for ExactRatio {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("ExactRatio", 2)?;
        st.serialize_field("num", &self.num.to_string())?;
        st.serialize_field("den", &self.den.to_string())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for ExactRatio {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            num: String,
            den: String,
        }
        let raw = Raw::deserialize(deserializer)?;
        let num = BigUint::from_str(&raw.num).map_err(serde::de::Error::custom)?;
        let den = BigUint::from_str(&raw.den).map_err(serde::de::Error::custom)?;
        ExactRatio::new(num, den).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `BigUint` as a decimal string field.
pub mod biguint_decimal {
    use super::*;

    pub fn serialize<S: Serializer>(
        value: &BigUint,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<BigUint, D::Error> {
        let s = String::deserialize(deserializer)?;
        BigUint::from_str(&s).map_err(serde::de::Error::custom)
    }
}

/// Same adapter for `Vec<BigUint>`.
pub mod biguint_decimal_vec {
    use super::*;

    pub fn serialize<S: Serializer>(
        value: &[BigUint],
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(value.iter().map(|v| v.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Vec<BigUint>, D::Error> {
        let raw: Vec<String> = Vec::deserialize(deserializer)?;
        raw.iter()
            .map(|s| BigUint::from_str(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Same adapter for `Vec<Vec<BigUint>>` (cluster blocks).
pub mod biguint_decimal_vec_vec {
    use super::*;

    pub fn serialize<S: Serializer>(
        value: &[Vec<BigUint>],
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(
            value
                .iter()
                .map(|row| row.iter().map(|v| v.to_string()).collect::<Vec<_>>()),
        )
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Vec<Vec<BigUint>>, D::Error> {
        let raw: Vec<Vec<String>> = Vec::deserialize(deserializer)?;
        raw.iter()
            .map(|row| {
                row.iter()
                    .map(|s| BigUint::from_str(s).map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: u64, d: u64) -> ExactRatio {
        ExactRatio::from_u64s(n, d).unwrap()
    }

    #[test]
    fn reduces_on_construction() {
        assert_eq!(r(45, 60), r(3, 4));
        assert_eq!(r(45, 60).to_string(), "3/4");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(ExactRatio::from_u64s(1, 0).is_err());
    }

    #[test]
    fn mul_fraction_cross_reduces() {
        // 9/10 * 15/16 * 3/4 = 81/128
        let mut p = ExactRatio::one();
        for (n, d) in [(9u64, 10u64), (15, 16), (3, 4)] {
            p.mul_fraction(&BigUint::from(n), &BigUint::from(d));
        }
        assert_eq!(p, r(81, 128));
        assert!(p.is_reduced());
    }

    #[test]
    fn ordering_is_exact() {
        assert!(r(1, 3) < r(1, 2));
        assert!(r(5152, 10000) > r(1, 2));
        assert_eq!(r(2, 4).cmp(&r(1, 2)), Ordering::Equal);
    }

    #[test]
    fn pow2_over_pow6_reduced() {
        let x = ExactRatio::pow2_over_pow6(20, 6);
        assert_eq!(x.num(), &BigUint::from(1048576u64 / 64));
        assert_eq!(x.den(), &BigUint::from(46656u64 / 64));
        assert!(x.is_reduced());
        assert_eq!(ExactRatio::pow2_over_pow6(0, 0), ExactRatio::one());
    }

    #[test]
    fn parse_and_display_round_trip() {
        let x: ExactRatio = "5152/10000".parse().unwrap();
        assert_eq!(x, r(322, 625));
        let y: ExactRatio = "7".parse().unwrap();
        assert_eq!(y, r(7, 1));
        assert!("".parse::<ExactRatio>().is_err());
        assert!("3/0".parse::<ExactRatio>().is_err());
        assert!("-1/2".parse::<ExactRatio>().is_err());
    }

    #[test]
    fn log2_matches_f64_for_small_values() {
        assert!((r(3, 4).log2() - (0.75f64).log2()).abs() < 1e-14);
        assert!((r(1, 1).log2()).abs() < 1e-15);
    }

    #[test]
    fn log2_handles_huge_operands() {
        let num = BigUint::from(3u32).pow(700);
        let den = BigUint::one() << 1109; // 3^700 ≈ 2^1109.6
        let x = ExactRatio::new(num, den).unwrap();
        let expected = 700.0 * 3f64.log2() - 1109.0;
        assert!((x.log2() - expected).abs() < 1e-9);
    }

    #[test]
    fn serde_uses_decimal_strings() {
        let x = r(45, 64);
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, r#"{"num":"45","den":"64"}"#);
        let back: ExactRatio = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
    }
}
