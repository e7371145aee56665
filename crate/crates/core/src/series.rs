//! Coefficients of the regularized logarithmic derivative.
//!
//! Substituting f(x) = sum_j f_j x^(2j+1) into the Riccati form of the
//! eigenvalue equation gives the recursion
//!
//! ```text
//! (2 alpha + 1) f_0 = E - v_0
//! (2n + 2 alpha + 1) f_n = sum_{i+j=n-1} f_i f_j - v_n      (n >= 1)
//! ```
//!
//! where v_k is the coefficient of x^(2k) in the potential. The same
//! recursion differentiated in E yields the f_j' used by the Newton steps.
//! Both are cross-checked against the independent wavefunction-series route
//! in the oracle module.

use rug::{Float, Rational};

use crate::apnum::{APComplex, PrecisionContext};
use crate::error::Result;
use crate::problem::ProblemSpec;

/// The values f_0..f_jmax at a fixed complex energy, with optional
/// energy derivatives.
#[derive(Clone, Debug)]
pub struct CoefficientTable {
    energy: APComplex,
    f: Vec<APComplex>,
    df_de: Option<Vec<APComplex>>,
    ctx: PrecisionContext,
}

impl CoefficientTable {
    pub fn energy(&self) -> &APComplex {
        &self.energy
    }

    pub fn f(&self) -> &[APComplex] {
        &self.f
    }

    /// Energy derivatives, present when requested at construction.
    pub fn df_de(&self) -> Option<&[APComplex]> {
        self.df_de.as_deref()
    }

    pub fn jmax(&self) -> usize {
        self.f.len() - 1
    }

    pub fn context(&self) -> PrecisionContext {
        self.ctx
    }
}

struct Recursion {
    // denominators 2n + 2 alpha + 1 and potential coefficients at working precision
    denominators: Vec<Float>,
    potential: Vec<Float>,
}

impl Recursion {
    fn prepare(spec: &ProblemSpec, jmax: usize, ctx: PrecisionContext) -> Self {
        let two_alpha = uint_times(2, spec.alpha());
        let denominators = (0..=jmax)
            .map(|n| {
                let d = Rational::from(2 * n as i64 + 1) + &two_alpha;
                ctx.real_from_rational(&d)
            })
            .collect();
        let potential = (0..=jmax)
            .map(|k| ctx.real_from_rational(&spec.coefficient(k as u32)))
            .collect();
        Self {
            denominators,
            potential,
        }
    }
}

fn uint_times(n: u32, r: &Rational) -> Rational {
    Rational::from(n) * r
}

/// f_0..f_jmax at energy `e`.
pub fn riccati_coefficients(
    spec: &ProblemSpec,
    e: &APComplex,
    jmax: usize,
    ctx: PrecisionContext,
) -> CoefficientTable {
    let rec = Recursion::prepare(spec, jmax, ctx);
    let f = values(&rec, e, jmax, ctx);
    CoefficientTable {
        energy: ctx.round(e),
        f,
        df_de: None,
        ctx,
    }
}

/// f_0..f_jmax and their energy derivatives at energy `e`.
pub fn riccati_coefficients_with_derivative(
    spec: &ProblemSpec,
    e: &APComplex,
    jmax: usize,
    ctx: PrecisionContext,
) -> CoefficientTable {
    let rec = Recursion::prepare(spec, jmax, ctx);
    let f = values(&rec, e, jmax, ctx);

    // (2 alpha + 1) f_0' = 1 ; (2n + 2 alpha + 1) f_n' = sum (f_i' f_j + f_i f_j')
    let mut df: Vec<APComplex> = Vec::with_capacity(jmax + 1);
    df.push(ctx.from_i64(1).div_real(&rec.denominators[0]));
    for n in 1..=jmax {
        let mut acc = ctx.zero();
        for i in 0..n {
            acc = acc.add(&df[i].mul(&f[n - 1 - i]));
        }
        // the two cross sums coincide under i <-> j, hence the factor 2
        acc = acc.add(&acc.clone());
        df.push(acc.div_real(&rec.denominators[n]));
    }

    CoefficientTable {
        energy: ctx.round(e),
        f,
        df_de: Some(df),
        ctx,
    }
}

fn values(rec: &Recursion, e: &APComplex, jmax: usize, ctx: PrecisionContext) -> Vec<APComplex> {
    let e = ctx.round(e);
    let mut f: Vec<APComplex> = Vec::with_capacity(jmax + 1);
    let f0 = e
        .sub(&ctx.complex_from(rec.potential[0].clone()))
        .div_real(&rec.denominators[0]);
    f.push(f0);
    for n in 1..=jmax {
        let m = n - 1;
        let mut acc = ctx.zero();
        for i in 0..m.div_ceil(2) {
            acc = acc.add(&f[i].mul(&f[m - i]));
        }
        acc = acc.add(&acc.clone());
        if m % 2 == 0 {
            let mid = &f[m / 2];
            acc = acc.add(&mid.mul(mid));
        }
        acc = acc.sub(&ctx.complex_from(rec.potential[n].clone()));
        f.push(acc.div_real(&rec.denominators[n]));
    }
    f
}

/// Exact-rational f_0..f_jmax; ground truth for the floating mode.
///
/// Exactness is guaranteed by construction: the problem stores rational
/// coefficients and the energy is taken as a rational.
pub fn rational_coefficients(
    spec: &ProblemSpec,
    e: &Rational,
    jmax: usize,
) -> Result<Vec<Rational>> {
    let two_alpha = uint_times(2, spec.alpha());
    let mut f: Vec<Rational> = Vec::with_capacity(jmax + 1);
    let d0 = Rational::from(1) + &two_alpha;
    let v0 = spec.coefficient(0);
    f.push(Rational::from(e - &v0) / d0);
    for n in 1..=jmax {
        let m = n - 1;
        let mut acc = Rational::new();
        for i in 0..m.div_ceil(2) {
            acc += Rational::from(&f[i] * &f[m - i]);
        }
        acc *= 2;
        if m % 2 == 0 {
            let mid = &f[m / 2];
            acc += Rational::from(mid * mid);
        }
        acc -= spec.coefficient(n as u32);
        let den = Rational::from(2 * n as i64 + 1) + &two_alpha;
        f.push(acc / den);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apnum::agreement_digits;
    use crate::problem::parse_coupling;
    use rug::ops::CompleteRound;

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::with_digits(d).unwrap()
    }

    fn harmonic() -> ProblemSpec {
        ProblemSpec::triple_well(Rational::new()).unwrap()
    }

    fn rat(s: &str) -> Rational {
        parse_coupling(s).unwrap()
    }

    #[test]
    fn harmonic_ground_state_is_exact() {
        let c = ctx(40);
        let t = riccati_coefficients(&harmonic(), &c.from_i64(1), 12, c);
        assert_eq!(t.f()[0], c.from_i64(1));
        for j in 1..=12 {
            assert!(t.f()[j].is_zero(), "f_{} should vanish", j);
        }
    }

    #[test]
    fn harmonic_first_odd_state_is_exact() {
        let c = ctx(40);
        let spec = harmonic().with_alpha(1).unwrap();
        let t = riccati_coefficients(&spec, &c.from_i64(3), 12, c);
        assert_eq!(t.f()[0], c.from_i64(1));
        for j in 1..=12 {
            assert!(t.f()[j].is_zero(), "f_{} should vanish", j);
        }
    }

    #[test]
    fn rational_harmonic_values() {
        // At E = 0: f_0 = 0, f_1 = -1/3, f_2 = 0, f_3 = f_1^2/7 = 1/63
        let f = rational_coefficients(&harmonic(), &Rational::new(), 3).unwrap();
        assert_eq!(f[0], 0);
        assert_eq!(f[1], Rational::from((-1, 3)));
        assert_eq!(f[2], 0);
        assert_eq!(f[3], Rational::from((1, 63)));

        let f = rational_coefficients(&harmonic(), &Rational::from(1), 5).unwrap();
        assert_eq!(f[0], 1);
        for j in 1..=5 {
            assert_eq!(f[j], 0);
        }
    }

    #[test]
    fn derivative_of_first_coefficients() {
        // harmonic: f_1 = (E^2 - 1)/3 so f_1' = 2E/3; at E = 0, f_0 = 0 and f_0' = 1
        let c = ctx(40);
        for e_val in [0.0f64, 0.7, -1.3] {
            let e = c.from_f64(e_val);
            let t = riccati_coefficients_with_derivative(&harmonic(), &e, 4, c);
            let df = t.df_de().unwrap();
            assert_eq!(df[0], c.from_i64(1));
            let expect = c.from_f64(e_val).mul(&c.from_i64(2)).div(&c.from_i64(3));
            assert!(agreement_digits(df[1].re(), expect.re()).is_none_or(|d| d >= 38));
        }
        let t = riccati_coefficients_with_derivative(&harmonic(), &c.from_i64(0), 1, c);
        assert!(t.f()[0].is_zero());
        assert_eq!(t.df_de().unwrap()[0], c.from_i64(1));
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let c = ctx(60);
        let spec = ProblemSpec::triple_well(rat("0.14")).unwrap();
        let e = c.parse_decimal("0.97+0.001i").unwrap();
        let jmax = 40;
        let t = riccati_coefficients_with_derivative(&spec, &e, jmax, c);
        let h = c.pow10(-20);
        let hc = c.complex_from(h.clone());
        let plus = riccati_coefficients(&spec, &e.add(&hc), jmax, c);
        let minus = riccati_coefficients(&spec, &e.sub(&hc), jmax, c);
        let two_h = c.complex_from((2u32 * &h).complete(c.bits()));
        for j in 0..=jmax {
            let fd = plus.f()[j].sub(&minus.f()[j]).div(&two_h);
            let an = &t.df_de().unwrap()[j];
            let denom = an.abs().max(&c.real_from_f64(1e-30));
            let err = fd.sub(an).abs() / denom;
            assert!(
                err < c.pow10(-20),
                "fd mismatch at j={}, err={:.3e}",
                j,
                err.to_f64()
            );
        }
    }

    #[test]
    fn float_mode_tracks_rational_mode() {
        // >= 55 matching digits at 60-digit precision for j <= 40
        let c = ctx(60);
        for (spec, e) in [
            (ProblemSpec::triple_well(rat("7/50")).unwrap(), rat("1")),
            (ProblemSpec::double_well(rat("1/10")).unwrap(), rat("1")),
            (ProblemSpec::triple_well(rat("3/10")).unwrap(), rat("9/10")),
        ] {
            let exact = rational_coefficients(&spec, &e, 40).unwrap();
            let ec = c.complex_from(c.real_from_rational(&e));
            let t = riccati_coefficients(&spec, &ec, 40, c);
            for j in 0..=40 {
                let want = c.real_from_rational(&exact[j]);
                let d = agreement_digits(t.f()[j].re(), &want);
                assert!(d.is_none_or(|d| d >= 55), "j={} agree={:?}", j, d);
                assert!(t.f()[j].im().is_zero());
            }
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let c = ctx(40);
        let spec = ProblemSpec::triple_well(rat("0.14")).unwrap();
        let e = c.parse_decimal("0.93+0.17i").unwrap();
        let a = riccati_coefficients(&spec, &e, 25, c);
        let b = riccati_coefficients(&spec, &e.conj(), 25, c);
        for j in 0..=25 {
            assert_eq!(a.f()[j].conj(), b.f()[j], "j={}", j);
        }
    }

    #[test]
    fn degree_in_energy_by_interpolation() {
        // f_j is a polynomial in E of degree j+1: check with divided differences
        let spec = ProblemSpec::triple_well(rat("7/50")).unwrap();
        for j in 0..=5usize {
            let npts = j + 3;
            let es: Vec<Rational> = (0..npts as i64).map(Rational::from).collect();
            let mut table: Vec<Vec<Rational>> = vec![es
                .iter()
                .map(|e| rational_coefficients(&spec, e, j).unwrap()[j].clone())
                .collect()];
            for order in 1..npts {
                let prev = &table[order - 1];
                let mut row = Vec::new();
                for i in 0..prev.len() - 1 {
                    let num = Rational::from(&prev[i + 1] - &prev[i]);
                    let den = Rational::from(&es[i + order] - &es[i]);
                    row.push(num / den);
                }
                table.push(row);
            }
            // divided difference of order j+1 is the leading coefficient; j+2 vanishes
            assert_ne!(table[j + 1][0], 0, "degree of f_{} should be {}", j, j + 1);
            assert_eq!(table[j + 2][0], 0, "f_{} exceeds degree {}", j, j + 1);
        }
    }
}
