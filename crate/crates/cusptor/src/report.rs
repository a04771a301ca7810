//! JSON report conventions: exact integers serialize as decimal strings,
//! rationals as "p/q" strings, with decimal approximations rendered at a
//! configurable precision alongside.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

pub fn int_value(n: &BigInt) -> Value {
    Value::String(n.to_string())
}

pub fn rat_value(r: &BigRational) -> Value {
    Value::String(format!("{}/{}", r.numer(), r.denom()))
}

/// Decimal approximation of an exact rational with ~bits significant bits.
pub fn approx_decimal(r: &BigRational, bits: u32) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let digits = (bits as f64 * std::f64::consts::LOG10_2).ceil() as u32 + 1;
    let neg = r.is_negative();
    let a = r.abs();
    let scale = BigInt::from(10).pow(digits);
    let scaled = (&a * BigRational::from(scale.clone())).to_integer();
    let s = scaled.to_string();
    let rendered = if s.len() > digits as usize {
        let split = s.len() - digits as usize;
        format!("{}.{}", &s[..split], &s[split..])
    } else {
        format!("0.{}{}", "0".repeat(digits as usize - s.len()), s)
    };
    let trimmed = rendered.trim_end_matches('0').trim_end_matches('.');
    if neg {
        format!("-{trimmed}")
    } else {
        trimmed.to_string()
    }
}

/// Exact value with its decimal rendering.
pub fn rat_with_float(r: &BigRational, bits: u32) -> Value {
    json!({
        "exact": rat_value(r),
        "approx": approx_decimal(r, bits),
    })
}

pub fn rat_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    #[test]
    fn decimal_rendering() {
        assert_eq!(approx_decimal(&rat(1, 2), 64), "0.5");
        assert_eq!(approx_decimal(&rat(-7, 4), 64), "-1.75");
        assert_eq!(approx_decimal(&rat(0, 1), 64), "0");
        let third = approx_decimal(&rat(1, 3), 64);
        assert!(third.starts_with("0.33333333333333333"), "{third}");
    }
}
