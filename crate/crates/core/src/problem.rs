//! The eigenproblem model: an even polynomial potential, the parity exponent
//! alpha, the series step beta (fixed at 2), and the centrifugal strength.

use std::collections::BTreeMap;
use std::fmt;

use rug::Rational;

use crate::error::{Error, Result};

/// Built-in potential families, parametrized by the coupling g.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// V(x) = x^2 - 2 g^2 x^4 + g^4 x^6
    TripleWell,
    /// V(x) = x^2 - 2 g^2 x^4
    DoubleWell,
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::TripleWell => "triple-well",
            Preset::DoubleWell => "double-well",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A validated eigenproblem.
///
/// Potential coefficients are stored exactly: the entry at index k is the
/// rational coefficient of x^(2k). Exactness keeps a single model usable by
/// both the floating pipeline (coefficients rounded once into the working
/// precision) and the exact-rational oracle paths.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    coeffs: BTreeMap<u32, Rational>,
    alpha: Rational,
    beta: u32,
    centrifugal: Rational,
    g: Option<Rational>,
    preset: Option<Preset>,
}

impl ProblemSpec {
    /// V(x) = x^2 - 2 g^2 x^4 + g^4 x^6, even states.
    pub fn triple_well(g: Rational) -> Result<Self> {
        if g < 0 {
            return Err(Error::Domain(format!("coupling g must be >= 0, got {}", g)));
        }
        let g2 = Rational::from(&g * &g);
        let mut coeffs = BTreeMap::new();
        coeffs.insert(1, Rational::from(1));
        let v2 = Rational::from(-2 * &g2);
        if v2 != 0 {
            coeffs.insert(2, v2);
            coeffs.insert(3, Rational::from(&g2 * &g2));
        }
        Ok(Self {
            coeffs,
            alpha: Rational::new(),
            beta: 2,
            centrifugal: Rational::new(),
            g: Some(g),
            preset: Some(Preset::TripleWell),
        })
    }

    /// V(x) = x^2 - 2 g^2 x^4, even states.
    pub fn double_well(g: Rational) -> Result<Self> {
        if g < 0 {
            return Err(Error::Domain(format!("coupling g must be >= 0, got {}", g)));
        }
        let g2 = Rational::from(&g * &g);
        let mut coeffs = BTreeMap::new();
        coeffs.insert(1, Rational::from(1));
        let v2 = Rational::from(-2 * &g2);
        if v2 != 0 {
            coeffs.insert(2, v2);
        }
        Ok(Self {
            coeffs,
            alpha: Rational::new(),
            beta: 2,
            centrifugal: Rational::new(),
            g: Some(g),
            preset: Some(Preset::DoubleWell),
        })
    }

    pub fn preset(kind: Preset, g: Rational) -> Result<Self> {
        match kind {
            Preset::TripleWell => Self::triple_well(g),
            Preset::DoubleWell => Self::double_well(g),
        }
    }

    /// A custom problem from a map of even powers (2k -> coefficient).
    ///
    /// Odd powers are rejected (the series step beta = 2 requires an even
    /// potential), and a nonzero centrifugal strength must satisfy
    /// alpha (alpha - 1) = V_{-2} exactly.
    pub fn custom(
        potential: &BTreeMap<u32, Rational>,
        alpha: Rational,
        centrifugal: Rational,
    ) -> Result<Self> {
        if alpha < 0 {
            return Err(Error::Domain("alpha must be >= 0".into()));
        }
        let mut coeffs = BTreeMap::new();
        for (power, value) in potential {
            if power % 2 != 0 {
                return Err(Error::Potential(format!(
                    "odd power x^{} not supported (beta = 2 requires an even potential)",
                    power
                )));
            }
            if *value != 0 {
                coeffs.insert(power / 2, value.clone());
            }
        }
        if !coeffs.keys().any(|&k| k >= 1) {
            return Err(Error::Potential(
                "potential needs at least one nonzero coefficient with power >= 2".into(),
            ));
        }
        if centrifugal != 0 {
            let lhs = Rational::from(&alpha * &alpha) - &alpha;
            if lhs != centrifugal {
                return Err(Error::Consistency(format!(
                    "alpha(alpha-1) = {} does not equal the centrifugal strength {}",
                    lhs, centrifugal
                )));
            }
        } else if alpha != 0 && alpha != 1 {
            return Err(Error::Consistency(
                "one-dimensional parity-invariant problems require alpha in {0, 1}".into(),
            ));
        }
        Ok(Self {
            coeffs,
            alpha,
            beta: 2,
            centrifugal,
            g: None,
            preset: None,
        })
    }

    /// Returns a copy with the parity exponent replaced (0 even, 1 odd).
    pub fn with_alpha(&self, alpha: u32) -> Result<Self> {
        if self.centrifugal != 0 {
            return Err(Error::Consistency(
                "cannot override alpha of a central-field problem".into(),
            ));
        }
        if alpha > 1 {
            return Err(Error::Consistency(
                "one-dimensional parity-invariant problems require alpha in {0, 1}".into(),
            ));
        }
        let mut out = self.clone();
        out.alpha = Rational::from(alpha);
        Ok(out)
    }

    /// Coefficient of x^(2k), or zero when absent.
    pub fn coefficient(&self, k: u32) -> Rational {
        self.coeffs.get(&k).cloned().unwrap_or_default()
    }

    /// Nonzero coefficients as (k, v_k) pairs in increasing k.
    pub fn coefficients(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.coeffs.iter().map(|(&k, v)| (k, v))
    }

    /// Largest k with a nonzero coefficient.
    pub fn max_k(&self) -> u32 {
        self.coeffs.keys().copied().max().unwrap_or(0)
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn beta(&self) -> u32 {
        self.beta
    }

    pub fn centrifugal(&self) -> &Rational {
        &self.centrifugal
    }

    pub fn coupling(&self) -> Option<&Rational> {
        self.g.as_ref()
    }

    pub fn preset_kind(&self) -> Option<Preset> {
        self.preset
    }

    /// Central-field problems are constructible but carry no validation data.
    pub fn is_central_field(&self) -> bool {
        self.centrifugal != 0
    }
}

/// Parses a coupling given as a decimal ("0.14") or a fraction ("7/50"),
/// exactly in both cases.
pub fn parse_coupling(text: &str) -> Result<Rational> {
    let make_err = |position: usize, message: String| Error::Parse { position, message };
    if let Some((num, den)) = text.split_once('/') {
        let n: Rational = num
            .trim()
            .parse()
            .map_err(|_| make_err(0, format!("invalid numerator '{}'", num)))?;
        let d: Rational = den
            .trim()
            .parse()
            .map_err(|_| make_err(num.len() + 1, format!("invalid denominator '{}'", den)))?;
        if d == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        return Ok(n / d);
    }
    decimal_to_rational(text)
}

/// Exact conversion of a plain decimal string (optional sign, fraction,
/// exponent) to a rational.
pub fn decimal_to_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let err = |message: String| Error::Parse {
        position: 0,
        message,
    };
    let (body, exp) = match s.split_once(['e', 'E']) {
        Some((b, e)) => (
            b,
            e.parse::<i64>()
                .map_err(|_| err(format!("invalid exponent in '{}'", s)))?,
        ),
        None => (s, 0),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    let digits = format!("{}{}", int_part, frac_part);
    if digits.is_empty()
        || !digits
            .chars()
            .enumerate()
            .all(|(i, c)| c.is_ascii_digit() || (i == 0 && (c == '+' || c == '-')))
        || frac_part.chars().any(|c| !c.is_ascii_digit())
    {
        return Err(err(format!("invalid decimal '{}'", s)));
    }
    let mantissa: Rational = digits
        .parse()
        .map_err(|_| err(format!("invalid decimal '{}'", s)))?;
    let shift = exp - frac_part.len() as i64;
    let base = Rational::from(10);
    let mut scale = Rational::from(1);
    for _ in 0..shift.unsigned_abs() {
        scale *= &base;
    }
    Ok(if shift >= 0 {
        mantissa * scale
    } else {
        mantissa / scale
    })
}
