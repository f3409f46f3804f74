//! Exact complex-rational coefficients for the symbolic layer.

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::str::FromStr;

use crate::error::{Error, Result};

/// A complex number with exact rational real and imaginary parts.
pub type Coeff = Complex<BigRational>;

pub fn rational(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn from_int(v: i64) -> Coeff {
    Complex::new(BigRational::from_integer(BigInt::from(v)), BigRational::zero())
}

pub fn from_ratio(numer: i64, denom: i64) -> Coeff {
    Complex::new(rational(numer, denom), BigRational::zero())
}

pub fn from_real(r: BigRational) -> Coeff {
    Complex::new(r, BigRational::zero())
}

pub fn imag_unit() -> Coeff {
    Complex::new(BigRational::zero(), BigRational::one())
}

pub fn half() -> Coeff {
    from_ratio(1, 2)
}

pub fn to_c64(c: &Coeff) -> Complex64 {
    Complex64::new(
        c.re.to_f64().unwrap_or(f64::NAN),
        c.im.to_f64().unwrap_or(f64::NAN),
    )
}

/// Exact conversion of a finite float pair. Non-finite inputs are rejected.
pub fn from_c64(z: Complex64) -> Result<Coeff> {
    let conv = |x: f64| {
        BigRational::from_float(x)
            .ok_or_else(|| Error::Numerical(format!("cannot convert non-finite value {x}")))
    };
    Ok(Complex::new(conv(z.re)?, conv(z.im)?))
}

/// Parses `p`, `p/q` or a plain decimal such as `-0.125` or `1e-3` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Ok(r) = BigRational::from_str(t) {
        return Some(r);
    }
    parse_decimal(t)
}

fn parse_decimal(t: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(pos) => (&digits[..pos], &digits[pos + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(if all.is_empty() { "0" } else { &all }).ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(r)
}

/// Continued-fraction approximation with denominator at most `max_denom`, accepted only
/// when it reproduces `x` within `tol`.
pub fn approx_rational(x: f64, max_denom: i64, tol: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > max_denom as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if ((h1 as f64) / (k1 as f64) - x).abs() <= tol {
            return Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = r - a;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    (k1 != 0 && ((h1 as f64) / (k1 as f64) - x).abs() <= tol)
        .then(|| BigRational::new(BigInt::from(h1), BigInt::from(k1)))
}

pub fn format_rational(r: &BigRational) -> String {
    r.to_string()
}

/// `[re, im]` as rational strings; the serialized coefficient form.
pub fn to_pair(c: &Coeff) -> [String; 2] {
    [format_rational(&c.re), format_rational(&c.im)]
}

pub fn from_pair(re: &str, im: &str) -> Result<Coeff> {
    let bad = |s: &str| Error::spec("coeff", format!("not a rational number: {s:?}"));
    Ok(Complex::new(
        parse_rational(re).ok_or_else(|| bad(re))?,
        parse_rational(im).ok_or_else(|| bad(im))?,
    ))
}

pub fn is_zero(c: &Coeff) -> bool {
    c.re.is_zero() && c.im.is_zero()
}
