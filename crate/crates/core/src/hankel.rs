//! Hankel determinants of the series coefficients, in overflow-safe scaled
//! form, and the Newton increment -H/H' evaluated through the trace formula
//! -1/tr(M^-1 M') so the determinant itself never has to be materialized.

use rug::Float;

use crate::apnum::{APComplex, PrecisionContext};
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::series::{self, CoefficientTable};

/// Dimension and displacement of a Hankel determinant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HankelSpec {
    dim: usize,
    displacement: usize,
}

impl HankelSpec {
    pub fn new(dim: usize, displacement: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Config(format!(
                "Hankel dimension must be >= 2, got {}",
                dim
            )));
        }
        Ok(Self { dim, displacement })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn displacement(&self) -> usize {
        self.displacement
    }

    /// Largest coefficient index appearing in the matrix, 2(D-1) + d + 1.
    pub fn required_jmax(&self) -> usize {
        2 * (self.dim - 1) + self.displacement + 1
    }
}

/// A dense square complex matrix (dimensions stay tiny, D <= ~20).
#[derive(Clone, Debug)]
pub struct CMatrix {
    dim: usize,
    data: Vec<APComplex>,
}

impl CMatrix {
    pub fn from_rows(rows: Vec<Vec<APComplex>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Config("matrix must be square".into()));
        }
        Ok(Self {
            dim,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, i: usize, j: usize) -> &APComplex {
        &self.data[i * self.dim + j]
    }

    fn at_mut(&mut self, i: usize, j: usize) -> &mut APComplex {
        &mut self.data[i * self.dim + j]
    }
}

/// M[i][j] = f_{i+j+d+1}; complex symmetric by construction.
pub fn hankel_matrix(table: &CoefficientTable, h: HankelSpec) -> Result<CMatrix> {
    build_from(table.f(), h)
}

/// Same layout over the energy derivatives of the coefficients.
pub fn hankel_matrix_derivative(table: &CoefficientTable, h: HankelSpec) -> Result<CMatrix> {
    let df = table
        .df_de()
        .ok_or_else(|| Error::Config("coefficient table lacks derivatives".into()))?;
    build_from(df, h)
}

fn build_from(f: &[APComplex], h: HankelSpec) -> Result<CMatrix> {
    let needed = h.required_jmax();
    if f.len() <= needed {
        return Err(Error::TableTooShort {
            needed,
            have: f.len().saturating_sub(1),
        });
    }
    let d = h.displacement;
    let rows = (0..h.dim)
        .map(|i| (0..h.dim).map(|j| f[i + j + d + 1].clone()).collect())
        .collect();
    CMatrix::from_rows(rows)
}

/// A complex value as mantissa * 10^exp10 with 0.1 <= |mantissa| < 10,
/// or exact zero as (0, 0).
#[derive(Clone, Debug)]
pub struct ScaledValue {
    mantissa: APComplex,
    exp10: i64,
}

impl ScaledValue {
    pub fn zero(ctx: PrecisionContext) -> Self {
        Self {
            mantissa: ctx.zero(),
            exp10: 0,
        }
    }

    pub fn from_complex(z: &APComplex, ctx: PrecisionContext) -> Self {
        let mut v = Self {
            mantissa: z.clone(),
            exp10: 0,
        };
        v.normalize(ctx);
        v
    }

    pub fn mantissa(&self) -> &APComplex {
        &self.mantissa
    }

    pub fn exp10(&self) -> i64 {
        self.exp10
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    /// The represented value, materialized at working precision.
    pub fn to_complex(&self, ctx: PrecisionContext) -> APComplex {
        self.mantissa.mul_real(&ctx.pow10(self.exp10))
    }

    /// log10 of the magnitude, or None for zero. Accurate to f64, which is
    /// all the magnitude comparisons need.
    pub fn log10_abs(&self) -> Option<f64> {
        if self.is_zero() {
            return None;
        }
        Some(self.exp10 as f64 + self.mantissa.abs().log10().to_f64())
    }

    /// Magnitude comparison; zero compares below everything but zero.
    pub fn abs_lt(&self, other: &Self) -> bool {
        match (self.log10_abs(), other.log10_abs()) {
            (None, None) => false,
            (None, Some(_)) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => a < b,
        }
    }

    fn mul_assign_complex(&mut self, z: &APComplex, ctx: PrecisionContext) {
        self.mantissa = self.mantissa.mul(z);
        self.normalize(ctx);
    }

    fn negate(&mut self) {
        self.mantissa = self.mantissa.neg();
    }

    fn normalize(&mut self, ctx: PrecisionContext) {
        if self.mantissa.is_zero() {
            self.exp10 = 0;
            return;
        }
        let mag = self.mantissa.abs();
        // decimal shift that puts |mantissa| into [0.1, 10)
        let shift = mag.log10().to_f64().floor() as i64;
        if shift != 0 {
            self.mantissa = self.mantissa.mul_real(&ctx.pow10(-shift));
            self.exp10 += shift;
        }
        // a boundary case can leave the magnitude just outside the band
        let mag = self.mantissa.abs();
        if mag >= 10 {
            self.mantissa = self.mantissa.div_real(&Float::with_val(ctx.bits(), 10));
            self.exp10 += 1;
        } else if mag < Float::with_val(ctx.bits(), 0.1) {
            self.mantissa = self.mantissa.mul_real(&Float::with_val(ctx.bits(), 10));
            self.exp10 -= 1;
        }
    }
}

struct LuFactors {
    lu: CMatrix,
    permutation: Vec<usize>,
    sign_flips: usize,
    /// Set when a pivot was exactly zero; the determinant is exactly zero.
    exact_zero: bool,
    /// Set when a pivot fell below the near-singularity threshold relative
    /// to its row norm (10^-(digits-5)).
    near_singular: bool,
}

fn lu_factor(m: &CMatrix, ctx: PrecisionContext, singular_guard: bool) -> LuFactors {
    let n = m.dim();
    let mut lu = m.clone();
    let mut permutation: Vec<usize> = (0..n).collect();
    let mut sign_flips = 0usize;
    let mut exact_zero = false;
    let mut near_singular = false;

    // row norms of the original matrix anchor the relative pivot threshold
    let row_norms: Vec<Float> = (0..n)
        .map(|i| {
            let mut norm = ctx.real_zero();
            for j in 0..n {
                let a = m.at(i, j).abs();
                if a > norm {
                    norm = a;
                }
            }
            norm
        })
        .collect();
    let tol = ctx.pow10(-(ctx.digits() as i64) + 5);

    for k in 0..n {
        // partial pivoting by magnitude
        let mut best = k;
        let mut best_mag = lu.at(k, k).abs();
        for i in k + 1..n {
            let mag = lu.at(i, k).abs();
            if mag > best_mag {
                best = i;
                best_mag = mag;
            }
        }
        if best != k {
            for j in 0..n {
                let a = lu.at(k, j).clone();
                let b = lu.at(best, j).clone();
                *lu.at_mut(k, j) = b;
                *lu.at_mut(best, j) = a;
            }
            permutation.swap(k, best);
            sign_flips += 1;
        }
        let pivot = lu.at(k, k).clone();
        if pivot.is_zero() {
            exact_zero = true;
            break;
        }
        if singular_guard {
            let norm = &row_norms[permutation[k]];
            if !norm.is_zero() && best_mag < Float::with_val(ctx.bits(), norm * &tol) {
                near_singular = true;
            }
        }
        for i in k + 1..n {
            let factor = lu.at(i, k).div(&pivot);
            *lu.at_mut(i, k) = factor.clone();
            for j in k + 1..n {
                let delta = factor.mul(lu.at(k, j));
                *lu.at_mut(i, j) = lu.at(i, j).sub(&delta);
            }
        }
    }

    LuFactors {
        lu,
        permutation,
        sign_flips,
        exact_zero,
        near_singular,
    }
}

impl LuFactors {
    fn determinant(&self, ctx: PrecisionContext) -> ScaledValue {
        if self.exact_zero {
            return ScaledValue::zero(ctx);
        }
        let mut det = ScaledValue::from_complex(&ctx.from_i64(1), ctx);
        for k in 0..self.lu.dim() {
            det.mul_assign_complex(self.lu.at(k, k), ctx);
        }
        if self.sign_flips % 2 == 1 {
            det.negate();
        }
        det
    }

    /// Solves A x = b in place using the stored factors (b in original row order).
    fn solve(&self, b: &[APComplex], ctx: PrecisionContext) -> Vec<APComplex> {
        let n = self.lu.dim();
        let mut y: Vec<APComplex> = (0..n).map(|i| b[self.permutation[i]].clone()).collect();
        for i in 1..n {
            let mut acc = y[i].clone();
            for j in 0..i {
                acc = acc.sub(&self.lu.at(i, j).mul(&y[j]));
            }
            y[i] = acc;
        }
        let mut x = vec![ctx.zero(); n];
        for i in (0..n).rev() {
            let mut acc = y[i].clone();
            for j in i + 1..n {
                acc = acc.sub(&self.lu.at(i, j).mul(&x[j]));
            }
            x[i] = acc.div(self.lu.at(i, i));
        }
        x
    }
}

/// Determinant via LU with partial pivoting, pivots accumulated in
/// mantissa/exponent form. Singular input yields exact zero.
pub fn scaled_determinant(m: &CMatrix, ctx: PrecisionContext) -> ScaledValue {
    lu_factor(m, ctx, false).determinant(ctx)
}

/// One Newton step for the root condition H_D^d(E) = 0.
#[derive(Clone, Debug)]
pub struct NewtonStep {
    /// -H/H', zero when the matrix is singular to working precision.
    pub delta: APComplex,
    /// Set when E is a root to working precision (singular matrix).
    pub at_root: bool,
    /// H(E) in scaled form, reusable for damping decisions.
    pub determinant: ScaledValue,
}

/// Evaluates Delta E = -H/H' = -1/tr(M^-1 M') by solving D linear systems
/// against the columns of M' with the LU factors of M.
pub fn newton_increment(
    spec: &ProblemSpec,
    e: &APComplex,
    h: HankelSpec,
    ctx: PrecisionContext,
) -> Result<NewtonStep> {
    let table = series::riccati_coefficients_with_derivative(spec, e, h.required_jmax(), ctx);
    newton_increment_from_table(&table, h, ctx)
}

/// Same as [`newton_increment`] for an already computed table (which must
/// carry derivatives).
pub fn newton_increment_from_table(
    table: &CoefficientTable,
    h: HankelSpec,
    ctx: PrecisionContext,
) -> Result<NewtonStep> {
    let m = hankel_matrix(table, h)?;
    let mp = hankel_matrix_derivative(table, h)?;
    let factors = lu_factor(&m, ctx, true);
    if factors.exact_zero || factors.near_singular {
        return Ok(NewtonStep {
            delta: ctx.zero(),
            at_root: true,
            determinant: factors.determinant(ctx),
        });
    }
    let n = m.dim();
    let mut trace = ctx.zero();
    let mut col = vec![ctx.zero(); n];
    for c in 0..n {
        for (r, slot) in col.iter_mut().enumerate() {
            *slot = mp.at(r, c).clone();
        }
        let x = factors.solve(&col, ctx);
        trace = trace.add(&x[c]);
    }
    let determinant = factors.determinant(ctx);
    if trace.is_zero() {
        // stationary point of H: no usable Newton direction
        return Ok(NewtonStep {
            delta: ctx.zero(),
            at_root: false,
            determinant,
        });
    }
    Ok(NewtonStep {
        delta: trace.recip().neg(),
        at_root: false,
        determinant,
    })
}

/// |H_D^d(E)| in scaled form (no derivatives computed).
pub fn determinant_at(
    spec: &ProblemSpec,
    e: &APComplex,
    h: HankelSpec,
    ctx: PrecisionContext,
) -> Result<ScaledValue> {
    let table = series::riccati_coefficients(spec, e, h.required_jmax(), ctx);
    let m = hankel_matrix(&table, h)?;
    Ok(scaled_determinant(&m, ctx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::parse_coupling;
    use rug::Rational;

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::with_digits(d).unwrap()
    }

    fn identity(n: usize, c: PrecisionContext) -> CMatrix {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { c.from_i64(1) } else { c.zero() })
                    .collect()
            })
            .collect();
        CMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn hankel_layout() {
        let c = ctx(30);
        let spec = ProblemSpec::triple_well(parse_coupling("0.14").unwrap()).unwrap();
        let e = c.from_f64(0.97);
        let t = series::riccati_coefficients(&spec, &e, 8, c);
        let h = HankelSpec::new(2, 0).unwrap();
        let m = hankel_matrix(&t, h).unwrap();
        assert_eq!(m.at(0, 0), &t.f()[1]);
        assert_eq!(m.at(0, 1), &t.f()[2]);
        assert_eq!(m.at(1, 0), &t.f()[2]);
        assert_eq!(m.at(1, 1), &t.f()[3]);

        let h = HankelSpec::new(2, 1).unwrap();
        let m = hankel_matrix(&t, h).unwrap();
        assert_eq!(m.at(0, 0), &t.f()[2]);
        assert_eq!(m.at(1, 1), &t.f()[4]);

        let h = HankelSpec::new(3, 0).unwrap();
        let m = hankel_matrix(&t, h).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.at(i, j), &t.f()[i + j + 1]);
            }
        }

        let short = series::riccati_coefficients(&spec, &e, 2, c);
        assert!(matches!(
            hankel_matrix(&short, HankelSpec::new(3, 0).unwrap()),
            Err(Error::TableTooShort { needed: 5, .. })
        ));
    }

    #[test]
    fn determinant_of_identity() {
        let c = ctx(30);
        let det = scaled_determinant(&identity(3, c), c);
        assert_eq!(det.exp10(), 0);
        assert_eq!(det.mantissa().re().to_f64(), 1.0);
        assert!(det.mantissa().im().is_zero());
    }

    #[test]
    fn geometric_coefficients_give_zero() {
        // f_j = r^j makes every 2x2 Hankel block rank one
        let c = ctx(30);
        for r in [0.5f64, -2.0, 3.25] {
            let f: Vec<APComplex> = (0..6).map(|j| c.from_f64(r.powi(j))).collect();
            let rows = vec![
                vec![f[1].clone(), f[2].clone()],
                vec![f[2].clone(), f[3].clone()],
            ];
            let m = CMatrix::from_rows(rows).unwrap();
            let det = scaled_determinant(&m, c);
            assert!(det.is_zero(), "r={}", r);
        }
    }

    #[test]
    fn harmonic_root_determinant_is_zero() {
        let c = ctx(30);
        let spec = ProblemSpec::triple_well(Rational::new()).unwrap();
        for dim in 2..=5 {
            let h = HankelSpec::new(dim, 0).unwrap();
            let det = determinant_at(&spec, &c.from_i64(1), h, c).unwrap();
            assert!(det.is_zero(), "D={}", dim);
        }
    }

    #[test]
    fn permutation_parity_in_sign() {
        let c = ctx(30);
        // swap two rows of the identity: determinant -1
        let mut rows: Vec<Vec<APComplex>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| if i == j { c.from_i64(1) } else { c.zero() })
                    .collect()
            })
            .collect();
        rows.swap(0, 2);
        let m = CMatrix::from_rows(rows).unwrap();
        let det = scaled_determinant(&m, c);
        assert_eq!(det.mantissa().re().to_f64(), -1.0);
        assert_eq!(det.exp10(), 0);
    }

    #[test]
    fn scaled_value_normalization() {
        let c = ctx(30);
        let v = ScaledValue::from_complex(&c.from_f64(12345.0), c);
        assert_eq!(v.exp10(), 4);
        assert!((v.mantissa().re().to_f64() - 1.2345).abs() < 1e-12);
        let v = ScaledValue::from_complex(&c.from_f64(-0.00002), c);
        assert_eq!(v.exp10(), -5);
        assert!((v.mantissa().re().to_f64() + 2.0).abs() < 1e-12);
        let back = v.to_complex(c);
        assert!((back.re().to_f64() + 0.00002).abs() < 1e-18);
        let z = ScaledValue::from_complex(&c.zero(), c);
        assert!(z.is_zero());
        assert_eq!(z.exp10(), 0);
        assert!(z.abs_lt(&v));
        assert!(!v.abs_lt(&z));
    }

    #[test]
    fn conjugate_determinant() {
        let c = ctx(40);
        let spec = ProblemSpec::triple_well(parse_coupling("0.14").unwrap()).unwrap();
        let h = HankelSpec::new(4, 0).unwrap();
        let e = c.parse_decimal("0.95+0.03i").unwrap();
        let d1 = determinant_at(&spec, &e, h, c).unwrap();
        let d2 = determinant_at(&spec, &e.conj(), h, c).unwrap();
        assert_eq!(d1.exp10(), d2.exp10());
        assert_eq!(d1.mantissa().conj(), *d2.mantissa());
    }

    #[test]
    fn newton_at_exact_root_signals_convergence() {
        let c = ctx(30);
        let spec = ProblemSpec::triple_well(Rational::new()).unwrap();
        let h = HankelSpec::new(3, 0).unwrap();
        let step = newton_increment(&spec, &c.from_i64(1), h, c).unwrap();
        assert!(step.at_root);
        assert!(step.delta.is_zero());
    }

    #[test]
    fn newton_matches_finite_difference_ratio() {
        let c = ctx(60);
        let spec = ProblemSpec::triple_well(parse_coupling("0.14").unwrap()).unwrap();
        let h = HankelSpec::new(5, 0).unwrap();
        let e = c.parse_decimal("0.97").unwrap();
        let step = newton_increment(&spec, &e, h, c).unwrap();
        assert!(!step.at_root);

        let hstep = c.pow10(-20);
        let hc = c.complex_from(hstep.clone());
        let dp = determinant_at(&spec, &e.add(&hc), h, c).unwrap();
        let dm = determinant_at(&spec, &e.sub(&hc), h, c).unwrap();
        // -H/H' with H' ~ (H+ - H-)/(2h); align the scaled values explicitly
        let shift = dp.exp10().max(dm.exp10());
        let vp = dp.mantissa().mul_real(&c.pow10(dp.exp10() - shift));
        let vm = dm.mantissa().mul_real(&c.pow10(dm.exp10() - shift));
        let hprime = vp
            .sub(&vm)
            .div(&c.complex_from(Float::with_val(c.bits(), 2u32 * &hstep)));
        let h0 = determinant_at(&spec, &e, h, c).unwrap();
        let v0 = h0.mantissa().mul_real(&c.pow10(h0.exp10() - shift));
        let fd = v0.div(&hprime).neg();

        let err = fd.sub(&step.delta).abs() / step.delta.abs();
        assert!(err < c.pow10(-20), "relative error {:.3e}", err.to_f64());
    }

    #[test]
    fn one_newton_step_moves_toward_table_value() {
        let c = ctx(40);
        let spec = ProblemSpec::triple_well(parse_coupling("0.14").unwrap()).unwrap();
        let h = HankelSpec::new(5, 0).unwrap();
        let e0 = c.parse_decimal("0.9691").unwrap();
        let target = c.parse_decimal("0.96912932006642961226").unwrap();
        let step = newton_increment(&spec, &e0, h, c).unwrap();
        let e1 = e0.add(&step.delta);
        let before = e0.sub(&target).abs();
        let after = e1.sub(&target).abs();
        assert!(after < before);
    }
}
