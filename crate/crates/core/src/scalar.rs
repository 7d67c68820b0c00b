//! Scalar abstraction for derived metrics (efficiencies, means, objectives).
//!
//! All packing decisions are made on exact integers. The numbers derived from
//! a packing (percentages, speedups, harmonic means) are computed through
//! [`Scalar`], so callers choose between exact rationals and floats.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// Numeric type usable for metric computations.
pub trait Scalar: Num + Clone + PartialOrd + Debug + Send + Sync {
    /// Builds `num / den`. `den` must be non-zero.
    fn from_ratio(num: u128, den: u128) -> Self;

    fn from_u64(value: u64) -> Self {
        Self::from_ratio(value as u128, 1)
    }

    fn to_f64(&self) -> f64;

    /// Parses a plain decimal literal such as `83.3333` or `-2`.
    fn parse_decimal(text: &str) -> Option<Self>;

    /// Renders with exactly `places` fractional digits, rounding half away from zero.
    fn to_decimal_string(&self, places: usize) -> String {
        format!("{:.*}", places, self.to_f64())
    }
}

impl Scalar for f64 {
    fn from_ratio(num: u128, den: u128) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn parse_decimal(text: &str) -> Option<Self> {
        text.trim().parse().ok()
    }
}

impl Scalar for f32 {
    fn from_ratio(num: u128, den: u128) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn parse_decimal(text: &str) -> Option<Self> {
        text.trim().parse().ok()
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: u128, den: u128) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse_decimal(text: &str) -> Option<Self> {
        let text = text.trim();
        let (negative, digits) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text.strip_prefix('+').unwrap_or(text)),
        };
        let (int_part, frac_part) = match digits.split_once('.') {
            Some((i, f)) => (i, f),
            None => (digits, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return None;
        }
        let mantissa: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
        let scale = num_traits::pow(BigInt::from(10u8), frac_part.len());
        let value = BigRational::new(mantissa, scale);
        Some(if negative { -value } else { value })
    }

    fn to_decimal_string(&self, places: usize) -> String {
        let scale = num_traits::pow(BigInt::from(10u8), places);
        let scaled = self.abs() * BigRational::from_integer(scale.clone());
        // half away from zero
        let rounded = (scaled + BigRational::new(BigInt::from(1), BigInt::from(2))).floor();
        let units = rounded.to_integer();
        let int_part = &units / &scale;
        let frac_part = &units % &scale;
        let sign = if self.is_negative() && !units.is_zero() { "-" } else { "" };
        if places == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = places)
        }
    }
}
