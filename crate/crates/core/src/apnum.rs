//! Configurable-precision real and complex arithmetic.
//!
//! Precision is parametrized in decimal digits; internally every value is an
//! MPFR float carrying `ceil(digits * log2(10)) + 8` bits, rounded to nearest.
//! Values are immutable after construction and safe to share across threads.

use std::fmt;

use rug::float::Round;
use rug::ops::{CompleteRound, Pow};
use rug::{Float, Rational};

use crate::error::{Error, Result};

/// Smallest accepted working precision in decimal digits.
pub const MIN_DIGITS: u32 = 20;

/// A fixed working precision, in decimal significant digits.
///
/// All values created through one context carry the same binary precision,
/// so identical inputs produce bit-identical results.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionContext {
    digits: u32,
    bits: u32,
}

impl PrecisionContext {
    /// Context with `digits` decimal digits of working precision.
    pub fn with_digits(digits: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(Error::PrecisionTooLow(digits));
        }
        let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 8;
        Ok(Self { digits, bits })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Exact zero.
    pub fn zero(&self) -> APComplex {
        APComplex {
            re: Float::new(self.bits),
            im: Float::new(self.bits),
        }
    }

    pub fn from_i64(&self, v: i64) -> APComplex {
        self.complex_from(Float::with_val(self.bits, v))
    }

    pub fn from_f64(&self, v: f64) -> APComplex {
        self.complex_from(Float::with_val(self.bits, v))
    }

    pub fn real_from_f64(&self, v: f64) -> Float {
        Float::with_val(self.bits, v)
    }

    pub fn real_from_rational(&self, r: &Rational) -> Float {
        Float::with_val(self.bits, r)
    }

    pub fn real_zero(&self) -> Float {
        Float::new(self.bits)
    }

    /// Promotes a real to a complex value with zero imaginary part.
    pub fn complex_from(&self, re: Float) -> APComplex {
        APComplex {
            re: Float::with_val(self.bits, &re),
            im: Float::new(self.bits),
        }
    }

    pub fn complex_from_parts(&self, re: Float, im: Float) -> APComplex {
        APComplex {
            re: Float::with_val(self.bits, &re),
            im: Float::with_val(self.bits, &im),
        }
    }

    /// Re-rounds a value (possibly from another context) to this precision.
    pub fn round(&self, v: &APComplex) -> APComplex {
        APComplex {
            re: Float::with_val(self.bits, &v.re),
            im: Float::with_val(self.bits, &v.im),
        }
    }

    /// 10^exp at working precision.
    pub fn pow10(&self, exp: i64) -> Float {
        Float::with_val(self.bits, 10).pow(exp)
    }

    /// Parses the decimal format used throughout the CLI and JSON payloads:
    /// `[sign]digits[.digits][e[sign]digits]` optionally followed by
    /// `(+|-)digits[.digits][e[sign]digits]i` for the imaginary component.
    pub fn parse_decimal(&self, text: &str) -> Result<APComplex> {
        let bytes = text.as_bytes();
        let mut pos = 0usize;

        let re_str = scan_real(bytes, &mut pos)?;
        let mut im_str: Option<(bool, String)> = None;
        if pos < bytes.len() {
            let sign = match bytes[pos] {
                b'+' => false,
                b'-' => true,
                c => {
                    return Err(Error::Parse {
                        position: pos,
                        message: format!("unexpected character '{}'", c as char),
                    })
                }
            };
            pos += 1;
            let mag = scan_real(bytes, &mut pos)?;
            if pos >= bytes.len() || bytes[pos] != b'i' {
                return Err(Error::Parse {
                    position: pos,
                    message: "expected 'i' after imaginary component".into(),
                });
            }
            pos += 1;
            if pos != bytes.len() {
                return Err(Error::Parse {
                    position: pos,
                    message: format!("unexpected character '{}'", bytes[pos] as char),
                });
            }
            im_str = Some((sign, mag));
        }

        let re = parse_float(&re_str, self.bits, 0)?;
        let im = match im_str {
            None => Float::new(self.bits),
            Some((neg, mag)) => {
                let v = parse_float(&mag, self.bits, 0)?;
                if neg {
                    -v
                } else {
                    v
                }
            }
        };
        Ok(APComplex { re, im })
    }
}

fn scan_real(bytes: &[u8], pos: &mut usize) -> Result<String> {
    let start = *pos;
    let err = |p: usize, m: &str| Error::Parse {
        position: p,
        message: m.into(),
    };
    if *pos < bytes.len() && (bytes[*pos] == b'+' || bytes[*pos] == b'-') {
        *pos += 1;
    }
    let digits_start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if *pos == digits_start {
        return Err(err(*pos, "expected a digit"));
    }
    if *pos < bytes.len() && bytes[*pos] == b'.' {
        *pos += 1;
        let frac_start = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if *pos == frac_start {
            return Err(err(*pos, "expected a digit after '.'"));
        }
    }
    if *pos < bytes.len() && (bytes[*pos] == b'e' || bytes[*pos] == b'E') {
        *pos += 1;
        if *pos < bytes.len() && (bytes[*pos] == b'+' || bytes[*pos] == b'-') {
            *pos += 1;
        }
        let exp_start = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if *pos == exp_start {
            return Err(err(*pos, "expected a digit in exponent"));
        }
    }
    Ok(std::str::from_utf8(&bytes[start..*pos]).unwrap().to_owned())
}

fn parse_float(text: &str, bits: u32, offset: usize) -> Result<Float> {
    match Float::parse(text) {
        Ok(incomplete) => Ok(incomplete.complete(bits)),
        Err(e) => Err(Error::Parse {
            position: offset,
            message: e.to_string(),
        }),
    }
}

/// A complex value at fixed precision.
#[derive(Clone, Debug)]
pub struct APComplex {
    re: Float,
    im: Float,
}

impl APComplex {
    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn into_parts(self) -> (Float, Float) {
        (self.re, self.im)
    }

    fn bits(&self) -> u32 {
        self.re.prec()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: (-&self.im).complete(self.bits()),
        }
    }

    /// Replaces the imaginary part with exact zero.
    pub fn real_projection(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: Float::new(self.bits()),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let p = self.bits();
        Self {
            re: (&self.re + &rhs.re).complete(p),
            im: (&self.im + &rhs.im).complete(p),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let p = self.bits();
        Self {
            re: (&self.re - &rhs.re).complete(p),
            im: (&self.im - &rhs.im).complete(p),
        }
    }

    pub fn neg(&self) -> Self {
        let p = self.bits();
        Self {
            re: (-&self.re).complete(p),
            im: (-&self.im).complete(p),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let p = self.bits();
        let re = (&self.re * &rhs.re).complete(p) - (&self.im * &rhs.im).complete(p);
        let im = (&self.re * &rhs.im).complete(p) + (&self.im * &rhs.re).complete(p);
        Self { re, im }
    }

    pub fn mul_real(&self, rhs: &Float) -> Self {
        let p = self.bits();
        Self {
            re: (&self.re * rhs).complete(p),
            im: (&self.im * rhs).complete(p),
        }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        let p = self.bits();
        let den = (&rhs.re * &rhs.re).complete(p) + (&rhs.im * &rhs.im).complete(p);
        let re = ((&self.re * &rhs.re).complete(p) + (&self.im * &rhs.im).complete(p)) / &den;
        let im = ((&self.im * &rhs.re).complete(p) - (&self.re * &rhs.im).complete(p)) / &den;
        Self { re, im }
    }

    pub fn div_real(&self, rhs: &Float) -> Self {
        let p = self.bits();
        Self {
            re: (&self.re / rhs).complete(p),
            im: (&self.im / rhs).complete(p),
        }
    }

    pub fn recip(&self) -> Self {
        let p = self.bits();
        let one = Self {
            re: Float::with_val(p, 1),
            im: Float::new(p),
        };
        one.div(self)
    }

    /// |z| = hypot(re, im).
    pub fn abs(&self) -> Float {
        self.re.clone().hypot(&self.im)
    }

    pub fn arg(&self) -> Float {
        self.im.clone().atan2(&self.re)
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        let p = self.bits();
        if self.is_zero() {
            return Self {
                re: Float::new(p),
                im: Float::new(p),
            };
        }
        let r = self.abs();
        // t = sqrt((|z| + |re|) / 2) is the larger output component
        let t = ((r + self.re.clone().abs()) / 2u32).sqrt();
        let two_t = Float::with_val(p, 2u32 * &t);
        if self.re.is_sign_positive() && !self.re.is_zero() {
            let im = Float::with_val(p, &self.im / &two_t);
            Self { re: t, im }
        } else {
            let re = self.im.clone().abs() / &two_t;
            let im = if self.im.is_sign_negative() && !self.im.is_zero() {
                -t
            } else {
                t
            };
            Self { re, im }
        }
    }

    /// exp(z) = e^re (cos im + i sin im).
    pub fn exp(&self) -> Self {
        let p = self.bits();
        let mag = self.re.clone().exp();
        let (sin, cos) = self.im.clone().sin_cos(Float::new(p));
        Self {
            re: (&mag * &cos).complete(p),
            im: (&mag * &sin).complete(p),
        }
    }

    /// Principal natural logarithm: ln|z| + i arg(z).
    pub fn ln(&self) -> Self {
        Self {
            re: self.abs().ln(),
            im: self.arg(),
        }
    }

    /// Renders to the decimal format accepted by `parse_decimal`, with
    /// `digits` significant digits per component.
    pub fn render_decimal(&self, digits: u32) -> String {
        if self.im.is_zero() {
            return render_float(&self.re, digits);
        }
        let re = render_float(&self.re, digits);
        let (sign, mag) = if self.im.is_sign_negative() {
            ("-", (-self.im.clone()).abs())
        } else {
            ("+", self.im.clone())
        };
        format!("{}{}{}i", re, sign, render_float(&mag, digits))
    }
}

impl fmt::Display for APComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (self.bits() as f64 / std::f64::consts::LOG2_10) as u32;
        write!(f, "{}", self.render_decimal(digits.max(1)))
    }
}

impl PartialEq for APComplex {
    fn eq(&self, other: &Self) -> bool {
        self.re == other.re && self.im == other.im
    }
}

/// Correctly rounded decimal rendering of a real value.
///
/// Positional form when the decimal exponent lies in `[-4, digits)`,
/// otherwise scientific `m.mmme<exp>`. Trailing zeros are trimmed, so the
/// output re-parses to exactly the same binary value.
pub fn render_float(v: &Float, digits: u32) -> String {
    let digits = digits.max(1) as usize;
    if v.is_zero() {
        return "0".into();
    }
    let neg = v.is_sign_negative();
    let raw = v
        .clone()
        .abs()
        .to_string_radix_round(10, Some(digits), Round::Nearest);
    // rug renders either "d.ddd...e<exp>" or positionally; normalize to
    // significant digits plus the decimal exponent of the leading digit
    let (body, printed_exp) = match raw.split_once('e') {
        Some((m, e)) => (m, e.parse::<i64>().unwrap()),
        None => (raw.as_str(), 0),
    };
    let point = body.find('.').unwrap_or(body.len());
    let all_digits: Vec<u8> = body.bytes().filter(|b| b.is_ascii_digit()).collect();
    let leading_zeros = all_digits.iter().take_while(|&&b| b == b'0').count();
    if leading_zeros == all_digits.len() {
        return "0".into();
    }
    let lead_exp = point as i64 - leading_zeros as i64 - 1 + printed_exp;
    let mut mantissa =
        String::from_utf8(all_digits[leading_zeros..].to_vec()).expect("digits are ascii");
    while mantissa.len() > 1 && mantissa.ends_with('0') {
        mantissa.pop();
    }
    let body = if (-4..digits as i64).contains(&lead_exp) {
        if lead_exp < 0 {
            let zeros = "0".repeat((-lead_exp - 1) as usize);
            format!("0.{}{}", zeros, mantissa)
        } else if (lead_exp as usize) + 1 >= mantissa.len() {
            let zeros = "0".repeat(lead_exp as usize + 1 - mantissa.len());
            format!("{}{}", mantissa, zeros)
        } else {
            let (int, frac) = mantissa.split_at(lead_exp as usize + 1);
            format!("{}.{}", int, frac)
        }
    } else if mantissa.len() == 1 {
        format!("{}e{}", mantissa, lead_exp)
    } else {
        let (int, frac) = mantissa.split_at(1);
        format!("{}.{}e{}", int, frac, lead_exp)
    };
    if neg {
        format!("-{}", body)
    } else {
        body
    }
}

/// Same as [`render_float`] but truncating toward zero instead of rounding,
/// the convention used when quoting a value to its last stable digit.
pub fn render_float_truncated(v: &Float, digits: u32) -> String {
    if v.is_zero() {
        return "0".into();
    }
    // render with guard digits, then chop
    let wide = render_float(v, digits + 6);
    truncate_decimal(&wide, digits)
}

fn truncate_decimal(s: &str, digits: u32) -> String {
    let digits = digits.max(1) as usize;
    let (body, exp) = match s.split_once('e') {
        Some((b, e)) => (b, Some(e)),
        None => (s, None),
    };
    let mut out = String::new();
    let mut kept = 0usize;
    let mut significant = false;
    for c in body.chars() {
        if c.is_ascii_digit() {
            if kept >= digits {
                // drop remaining fraction digits; pad integer digits with zeros
                if !out.contains('.') {
                    out.push('0');
                }
                continue;
            }
            if c != '0' {
                significant = true;
            }
            if significant {
                kept += 1;
            }
            out.push(c);
        } else {
            out.push(c);
        }
    }
    if out.contains('.') {
        while out.ends_with('0') {
            out.pop();
        }
        if out.ends_with('.') {
            out.pop();
        }
    }
    match exp {
        Some(e) => format!("{}e{}", out, e),
        None => out,
    }
}

/// Number of matching leading significant digits between two reals,
/// measured as floor(-log10(|a-b| / max(|a|, |b|))); `None` when equal.
pub fn agreement_digits(a: &Float, b: &Float) -> Option<u32> {
    if a == b {
        return None;
    }
    let p = a.prec().max(b.prec());
    let diff = (a - b).complete(p).abs();
    let scale = a.clone().abs().max(&b.clone().abs());
    if scale.is_zero() {
        return Some(0);
    }
    let lg = (-(diff / scale).log10()).to_f64();
    if lg <= 0.0 {
        Some(0)
    } else {
        Some(lg.floor() as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::with_digits(d).unwrap()
    }

    #[test]
    fn rejects_low_precision() {
        assert!(matches!(
            PrecisionContext::with_digits(19),
            Err(Error::PrecisionTooLow(19))
        ));
        assert!(PrecisionContext::with_digits(20).is_ok());
    }

    #[test]
    fn one_third_to_fifty_digits() {
        let c = ctx(50);
        let third = c.from_i64(1).div(&c.from_i64(3));
        let s = third.render_decimal(50);
        assert_eq!(s, format!("0.{}", "3".repeat(50)));
    }

    #[test]
    fn gaussian_integer_product_is_exact() {
        let c = ctx(120);
        let a = c.parse_decimal("1+2i").unwrap();
        let b = c.parse_decimal("1-2i").unwrap();
        let p = a.mul(&b);
        assert_eq!(p.re().to_f64(), 5.0);
        assert!(p.im().is_zero());
    }

    #[test]
    fn exp_matches_taylor_series() {
        // x = 1/(2*0.14^2) = 1250/49; independent check by summed Taylor series
        let c = ctx(60);
        let x = c.real_from_rational(&Rational::from((1250, 49)));
        let got = x.clone().exp();

        let hi = ctx(90);
        let xh = hi.real_from_rational(&Rational::from((1250, 49)));
        let mut sum = hi.real_from_f64(1.0);
        let mut term = hi.real_from_f64(1.0);
        for k in 1..400u32 {
            term = term * &xh / k;
            sum += &term;
            if term.clone() / &sum < hi.pow10(-85) {
                break;
            }
        }
        assert!(agreement_digits(&got, &sum).is_none_or(|d| d >= 60));
        let s = render_float(&got, 60);
        assert!(s.starts_with("119933598606.72110694848808447356"), "{}", s);
    }

    #[test]
    fn parse_table_values_roundtrip() {
        let c = ctx(20);
        for s in [
            "0.96912932002717525629",
            "3.3798095481216435223e-10",
            "0",
            "-1.5e-3",
            "2.5+3.125e-2i",
            "1-2i",
        ] {
            let v = c.parse_decimal(s).unwrap();
            let rendered = v.render_decimal(20);
            let back = c.parse_decimal(&rendered).unwrap();
            assert_eq!(v, back, "roundtrip of {}", s);
        }
        assert_eq!(
            c.parse_decimal("0.96912932002717525629")
                .unwrap()
                .render_decimal(20),
            "0.96912932002717525629"
        );
        assert_eq!(
            c.parse_decimal("3.3798095481216435223e-10")
                .unwrap()
                .render_decimal(20),
            "3.3798095481216435223e-10"
        );
    }

    #[test]
    fn parse_errors_name_position() {
        let c = ctx(20);
        match c.parse_decimal("1.2x3") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 3),
            other => panic!("expected parse error, got {:?}", other),
        }
        match c.parse_decimal("1+2j") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 3),
            other => panic!("expected parse error, got {:?}", other),
        }
        assert!(c.parse_decimal("").is_err());
        assert!(c.parse_decimal("1+i").is_err());
    }

    #[test]
    fn sqrt_and_ln_exp_consistency() {
        let c = ctx(40);
        let z = c.parse_decimal("-3.5+1.25i").unwrap();
        let r = z.sqrt();
        let back = r.mul(&r);
        assert!(agreement_digits(back.re(), z.re()).is_none_or(|d| d >= 38));
        assert!(agreement_digits(back.im(), z.im()).is_none_or(|d| d >= 38));

        let l = z.ln();
        let e = l.exp();
        assert!(agreement_digits(e.re(), z.re()).is_none_or(|d| d >= 38));
        assert!(agreement_digits(e.im(), z.im()).is_none_or(|d| d >= 38));
    }

    #[test]
    fn associativity_exact_for_small_integers() {
        let c = ctx(30);
        let a = c.from_i64(7);
        let b = c.from_i64(-13);
        let d = c.from_i64(29);
        assert_eq!(a.add(&b).add(&d), a.add(&b.add(&d)));
        assert_eq!(a.mul(&b).mul(&d), a.mul(&b.mul(&d)));
    }

    #[test]
    fn render_positional_vs_scientific() {
        let c = ctx(20);
        let v = c.parse_decimal("123.25").unwrap();
        assert_eq!(v.render_decimal(20), "123.25");
        let v = c.parse_decimal("-0.00125").unwrap();
        assert_eq!(v.render_decimal(20), "-0.00125");
        let v = c.parse_decimal("1e25").unwrap();
        assert_eq!(v.render_decimal(20), "1e25");
        let v = c.parse_decimal("0.00001").unwrap();
        assert_eq!(v.render_decimal(20), "1e-5");
    }

    #[test]
    fn truncated_rendering_chops_instead_of_rounding() {
        let c = ctx(30);
        let v = c.parse_decimal("0.123456789").unwrap();
        assert_eq!(render_float_truncated(v.re(), 5), "0.12345");
        let v = c.parse_decimal("9.87654321e-7").unwrap();
        assert_eq!(render_float_truncated(v.re(), 4), "9.876e-7");
        let v = c.parse_decimal("19999").unwrap();
        assert_eq!(render_float_truncated(v.re(), 3), "19900");
    }
}
