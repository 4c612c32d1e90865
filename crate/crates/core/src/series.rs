//! Complex polynomials and truncated power series about an arbitrary center.
//!
//! Coefficients are stored densely: index `v` is the coefficient of
//! `(z - center)^v`. A truncated series never invents coefficients past its
//! truncation order; asking for one is an [`PadeError::InsufficientOrder`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PadeError, Result};

pub type Complex = Complex64;

pub(crate) fn is_finite(z: Complex) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub(crate) fn ensure_finite(z: Complex, what: &'static str) -> Result<()> {
    if is_finite(z) {
        Ok(())
    } else {
        Err(PadeError::NonFinite(what))
    }
}

/// Dense complex polynomial in powers of `(z - center)`.
///
/// The zero polynomial has an empty coefficient list; otherwise the last
/// coefficient is nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    center: Complex,
    coeffs: Vec<Complex>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl Polynomial {
    /// Builds a polynomial, trimming exact trailing zeros.
    pub fn new(center: Complex, coeffs: Vec<Complex>) -> Result<Self> {
        ensure_finite(center, "polynomial center")?;
        if coeffs.iter().any(|c| !is_finite(*c)) {
            return Err(PadeError::NonFinite("polynomial coefficients"));
        }
        Ok(Self::from_parts(center, coeffs))
    }

    /// Same as [`Polynomial::new`] for real coefficients about the origin.
    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(
            Complex::new(0.0, 0.0),
            coeffs.iter().map(|&c| Complex::new(c, 0.0)).collect(),
        )
    }

    pub(crate) fn from_parts(center: Complex, mut coeffs: Vec<Complex>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { center, coeffs }
    }

    pub fn zero(center: Complex) -> Self {
        Self { center, coeffs: Vec::new() }
    }

    pub fn constant(center: Complex, value: Complex) -> Self {
        Self::from_parts(center, vec![value])
    }

    /// `scale * (z - center)^power`, stored about `center`.
    pub fn monomial(center: Complex, power: usize, scale: Complex) -> Self {
        let mut coeffs = vec![Complex::new(0.0, 0.0); power + 1];
        coeffs[power] = scale;
        Self::from_parts(center, coeffs)
    }

    pub fn center(&self) -> Complex {
        self.center
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex> {
        self.coeffs
    }

    /// Exact degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `(z - center)^v`, zero past the degree.
    pub fn coeff(&self, v: usize) -> Complex {
        self.coeffs.get(v).copied().unwrap_or_default()
    }

    pub fn max_coeff_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation at `z`.
    pub fn eval(&self, z: Complex) -> Complex {
        let t = z - self.center;
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * t + c)
    }

    fn check_center(&self, other: &Self) -> Result<()> {
        if self.center != other.center {
            return Err(PadeError::CenterMismatch {
                left: format!("{}", self.center),
                right: format!("{}", other.center),
            });
        }
        Ok(())
    }

    /// Coefficient-level ring operation; both operands must share a center.
    pub fn arith(&self, other: &Self, op: ArithOp) -> Result<Self> {
        self.check_center(other)?;
        let coeffs = match op {
            ArithOp::Add | ArithOp::Sub => {
                let sign = if op == ArithOp::Add { 1.0 } else { -1.0 };
                let n = self.coeffs.len().max(other.coeffs.len());
                (0..n)
                    .map(|v| self.coeff(v) + other.coeff(v) * sign)
                    .collect()
            }
            ArithOp::Mul => convolve(&self.coeffs, &other.coeffs),
        };
        Ok(Self::from_parts(self.center, coeffs))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.arith(other, ArithOp::Add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.arith(other, ArithOp::Sub)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.arith(other, ArithOp::Mul)
    }

    pub fn scale(&self, factor: Complex) -> Self {
        Self::from_parts(self.center, self.coeffs.iter().map(|&c| c * factor).collect())
    }

    /// Re-expands about `new_center` by repeated synthetic division (Taylor
    /// shift). Evaluation is preserved; the exact degree is preserved.
    pub fn recenter(&self, new_center: Complex) -> Self {
        if new_center == self.center || self.coeffs.len() <= 1 {
            return Self { center: new_center, coeffs: self.coeffs.clone() };
        }
        let shift = new_center - self.center;
        let mut c = self.coeffs.clone();
        let n = c.len();
        // After pass i, c[i] holds the i-th coefficient about new_center.
        for i in 0..n - 1 {
            for j in (i..n - 1).rev() {
                let carry = c[j + 1] * shift;
                c[j] += carry;
            }
        }
        Self::from_parts(new_center, c)
    }

    /// Taylor coefficients `a_0 .. a_order` about `center`.
    ///
    /// Coefficients above the degree are genuine zeros of the polynomial.
    pub fn taylor_series(&self, center: Complex, order: usize) -> TruncatedSeries {
        let shifted = self.recenter(center);
        let coeffs = (0..=order).map(|v| shifted.coeff(v)).collect();
        TruncatedSeries { center, coeffs }
    }
}

pub(crate) fn convolve(a: &[Complex], b: &[Complex]) -> Vec<Complex> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Power series prefix `a_0 .. a_N` about `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    center: Complex,
    coeffs: Vec<Complex>,
}

impl TruncatedSeries {
    pub fn new(center: Complex, coeffs: Vec<Complex>) -> Result<Self> {
        ensure_finite(center, "series center")?;
        if coeffs.is_empty() {
            return Err(PadeError::InvalidInput(
                "a truncated series needs at least a_0".into(),
            ));
        }
        if coeffs.iter().any(|c| !is_finite(*c)) {
            return Err(PadeError::NonFinite("series coefficients"));
        }
        Ok(Self { center, coeffs })
    }

    pub fn from_real(center: Complex, coeffs: &[f64]) -> Result<Self> {
        Self::new(center, coeffs.iter().map(|&c| Complex::new(c, 0.0)).collect())
    }

    pub fn center(&self) -> Complex {
        self.center
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    /// The truncation order N (highest known index).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `a_v`, with `a_v = 0` for negative `v` and an error past the order.
    pub fn coeff(&self, v: isize) -> Result<Complex> {
        if v < 0 {
            return Ok(Complex::new(0.0, 0.0));
        }
        self.coeffs
            .get(v as usize)
            .copied()
            .ok_or(PadeError::InsufficientOrder { required: v as usize })
    }

    pub fn max_coeff_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Prefix `a_0 .. a_needed`, or an error naming the order required.
    pub fn truncate_or_demand(&self, needed_order: usize) -> Result<Self> {
        if needed_order > self.order() {
            return Err(PadeError::InsufficientOrder { required: needed_order });
        }
        Ok(Self {
            center: self.center,
            coeffs: self.coeffs[..=needed_order].to_vec(),
        })
    }

    /// Partial sum `S_k`; the zero polynomial for negative `k`.
    pub fn partial_sum(&self, k: isize) -> Result<Polynomial> {
        if k < 0 {
            return Ok(Polynomial::zero(self.center));
        }
        let k = k as usize;
        if k > self.order() {
            return Err(PadeError::InsufficientOrder { required: k });
        }
        Ok(Polynomial::from_parts(self.center, self.coeffs[..=k].to_vec()))
    }
}

/// Taylor coefficients `b_0 .. b_order` of `num / den` about `center`.
///
/// Solves `den * b = num` term by term. Fails with `NearPole` when
/// `|den(center)|` falls below `pole_tol` times the largest denominator
/// coefficient.
pub fn taylor_of_rational(
    num: &Polynomial,
    den: &Polynomial,
    center: Complex,
    order: usize,
    pole_tol: f64,
) -> Result<TruncatedSeries> {
    ensure_finite(center, "expansion center")?;
    let num = num.recenter(center);
    let den = den.recenter(center);
    let d0 = den.coeff(0);
    let den_scale = den.max_coeff_abs();
    if den.is_zero() || d0.norm() <= pole_tol * den_scale {
        return Err(PadeError::NearPole { modulus: d0.norm() });
    }
    let mut b: Vec<Complex> = Vec::with_capacity(order + 1);
    for v in 0..=order {
        let mut acc = num.coeff(v);
        let reach = v.min(den.coeffs().len().saturating_sub(1));
        for j in 1..=reach {
            acc -= den.coeff(j) * b[v - j];
        }
        b.push(acc / d0);
    }
    Ok(TruncatedSeries { center, coeffs: b })
}

/// Wire form shared by series and polynomials:
/// `{ "center": [re, im], "coeffs": [[re, im], ...] }`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CoeffsJson {
    pub center: [f64; 2],
    pub coeffs: Vec<[f64; 2]>,
}

pub(crate) fn c2(z: Complex) -> [f64; 2] {
    [z.re, z.im]
}

pub(crate) fn from_c2(v: [f64; 2]) -> Complex {
    Complex::new(v[0], v[1])
}

impl From<&Polynomial> for CoeffsJson {
    fn from(p: &Polynomial) -> Self {
        Self { center: c2(p.center), coeffs: p.coeffs.iter().map(|&c| c2(c)).collect() }
    }
}

impl From<&TruncatedSeries> for CoeffsJson {
    fn from(s: &TruncatedSeries) -> Self {
        Self { center: c2(s.center), coeffs: s.coeffs.iter().map(|&c| c2(c)).collect() }
    }
}

impl TryFrom<CoeffsJson> for Polynomial {
    type Error = PadeError;
    fn try_from(j: CoeffsJson) -> Result<Self> {
        Polynomial::new(from_c2(j.center), j.coeffs.into_iter().map(from_c2).collect())
    }
}

impl TryFrom<CoeffsJson> for TruncatedSeries {
    type Error = PadeError;
    fn try_from(j: CoeffsJson) -> Result<Self> {
        TruncatedSeries::new(from_c2(j.center), j.coeffs.into_iter().map(from_c2).collect())
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CoeffsJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        CoeffsJson::deserialize(d)?.try_into().map_err(serde::de::Error::custom)
    }
}

impl Serialize for TruncatedSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CoeffsJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for TruncatedSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        CoeffsJson::deserialize(d)?.try_into().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn origin() -> Complex {
        c(0.0, 0.0)
    }

    fn random_poly(rng: &mut ChaCha8Rng, degree: usize, center: Complex) -> Polynomial {
        let coeffs = (0..=degree)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        Polynomial::new(center, coeffs).unwrap()
    }

    // independent oracle: accumulate powers term by term
    fn naive_eval(p: &Polynomial, z: Complex) -> Complex {
        let t = z - p.center();
        let mut power = c(1.0, 0.0);
        let mut sum = c(0.0, 0.0);
        for &a in p.coeffs() {
            sum += a * power;
            power *= t;
        }
        sum
    }

    #[test]
    fn eval_small_cases() {
        let one = Polynomial::from_real(&[1.0, 0.0]).unwrap();
        assert_eq!(one.eval(c(5.0, 0.0)), c(1.0, 0.0));
        assert_eq!(one.degree(), Some(0));
        let sq = Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(sq.eval(c(1.0, 1.0)), c(0.0, 2.0));
    }

    #[test]
    fn eval_matches_naive_on_unit_circle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = random_poly(&mut rng, 10, origin());
        for k in 0..64 {
            let z = Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 64.0);
            let fast = p.eval(z);
            let slow = naive_eval(&p, z);
            assert!((fast - slow).norm() <= 1e-12 * slow.norm().max(1e-300), "{fast} vs {slow}");
        }
    }

    #[test]
    fn arithmetic_examples() {
        let a = Polynomial::from_real(&[1.0, 1.0]).unwrap();
        let b = Polynomial::from_real(&[1.0, -1.0]).unwrap();
        assert_eq!(a.add(&b).unwrap().coeffs(), &[c(2.0, 0.0)]);
        assert_eq!(
            a.mul(&b).unwrap().coeffs(),
            &[c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]
        );
        let sq = Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap();
        let z = sq.scale(c(0.0, 0.0));
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
        assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn arithmetic_rejects_center_mismatch() {
        let a = Polynomial::from_real(&[1.0, 1.0]).unwrap();
        let b = a.recenter(c(1.0, 0.0));
        assert!(matches!(a.add(&b), Err(PadeError::CenterMismatch { .. })));
    }

    #[test]
    fn non_finite_inputs_rejected() {
        assert!(Polynomial::new(origin(), vec![c(f64::NAN, 0.0)]).is_err());
        assert!(TruncatedSeries::new(c(f64::INFINITY, 0.0), vec![c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn recenter_binomial_example() {
        let sq = Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap();
        let shifted = sq.recenter(c(1.0, 0.0));
        assert_eq!(shifted.center(), c(1.0, 0.0));
        assert_eq!(shifted.coeffs(), &[c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        let same = sq.recenter(origin());
        assert_eq!(same.coeffs(), sq.coeffs());
    }

    #[test]
    fn recenter_preserves_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random_poly(&mut rng, 8, origin());
        let center = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let q = p.recenter(center);
        assert_eq!(q.degree(), Some(8));
        for _ in 0..20 {
            let z = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let (a, b) = (p.eval(z), q.eval(z));
            assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0));
        }
    }

    #[test]
    fn geometric_series_from_rational() {
        let num = Polynomial::from_real(&[1.0]).unwrap();
        let den = Polynomial::from_real(&[1.0, -1.0]).unwrap();
        let s = taylor_of_rational(&num, &den, origin(), 4, 1e-12).unwrap();
        assert_eq!(s.coeffs(), &[c(1.0, 0.0); 5]);
    }

    #[test]
    fn exp_one_one_pade_expands_back() {
        // (1 + z/2) / (1 - z/2) = 1 + z + z^2/2 + z^3/4 + ...
        let num = Polynomial::from_real(&[1.0, 0.5]).unwrap();
        let den = Polynomial::from_real(&[1.0, -0.5]).unwrap();
        let s = taylor_of_rational(&num, &den, origin(), 2, 1e-12).unwrap();
        assert_eq!(s.coeffs(), &[c(1.0, 0.0), c(1.0, 0.0), c(0.5, 0.0)]);
    }

    #[test]
    fn polynomial_over_one_is_itself() {
        let p = Polynomial::from_real(&[3.0, -1.0, 2.0]).unwrap();
        let one = Polynomial::from_real(&[1.0]).unwrap();
        let s = taylor_of_rational(&p, &one, origin(), 4, 1e-12).unwrap();
        assert_eq!(
            s.coeffs(),
            &[c(3.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        );
        let short = taylor_of_rational(&p, &one, origin(), 1, 1e-12).unwrap();
        assert_eq!(short.order(), 1);
    }

    #[test]
    fn taylor_of_rational_near_pole() {
        let num = Polynomial::from_real(&[1.0]).unwrap();
        let den = Polynomial::from_real(&[1.0, -1.0]).unwrap();
        let err = taylor_of_rational(&num, &den, c(1.0, 0.0), 3, 1e-12).unwrap_err();
        assert!(matches!(err, PadeError::NearPole { .. }));
    }

    #[test]
    fn truncate_or_demand_contract() {
        let s = TruncatedSeries::from_real(origin(), &[1.0; 11]).unwrap();
        assert_eq!(s.truncate_or_demand(5).unwrap().coeffs().len(), 6);
        assert_eq!(s.truncate_or_demand(10).unwrap().order(), 10);
        let short = TruncatedSeries::from_real(origin(), &[1.0; 4]).unwrap();
        match short.truncate_or_demand(7) {
            Err(PadeError::InsufficientOrder { required }) => assert_eq!(required, 7),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_index_is_zero_but_overflow_errors() {
        let s = TruncatedSeries::from_real(origin(), &[1.0, 2.0]).unwrap();
        assert_eq!(s.coeff(-3).unwrap(), origin());
        assert!(matches!(s.coeff(2), Err(PadeError::InsufficientOrder { required: 2 })));
        assert!(s.partial_sum(-1).unwrap().is_zero());
    }

    #[test]
    fn json_schema_round_trip() {
        let p = Polynomial::new(c(0.5, -1.0), vec![c(1.0, 2.0), c(0.0, -3.0)]).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"{"center":[0.5,-1.0],"coeffs":[[1.0,2.0],[0.0,-3.0]]}"#);
        let back: Polynomial = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
    }

    fn arb_poly(max_degree: usize) -> impl Strategy<Value = Polynomial> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=max_degree + 1).prop_map(|v| {
            Polynomial::new(c(0.0, 0.0), v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap()
        })
    }

    fn coeff_rel_err(a: &Polynomial, b: &Polynomial) -> f64 {
        let n = a.coeffs().len().max(b.coeffs().len());
        let scale = a.max_coeff_abs().max(b.max_coeff_abs()).max(1e-300);
        (0..n).map(|v| (a.coeff(v) - b.coeff(v)).norm()).fold(0.0, f64::max) / scale
    }

    proptest! {
        #[test]
        fn recenter_round_trip(p in arb_poly(32), r in 0.0f64..0.2, theta in 0.0f64..std::f64::consts::TAU) {
            // coefficient round trip is conditioned like (1 + |c|)^(2 deg); keep shifts short
            let back = p.recenter(Complex::from_polar(r, theta)).recenter(p.center());
            prop_assert!(coeff_rel_err(&p, &back) < 1e-10);
        }

        #[test]
        fn recenter_keeps_values_for_long_shifts(p in arb_poly(32), re in -1.0f64..1.0, im in -1.0f64..1.0,
                                     zr in -1.5f64..1.5, zi in -1.5f64..1.5) {
            let shifted = p.recenter(c(re, im));
            let z = c(zr, zi);
            let shift = c(re, im);
            let t = shift.norm() + (z - shift).norm();
            let mag: f64 = p.coeffs().iter().enumerate().map(|(k, a)| a.norm() * t.powi(k as i32)).sum();
            prop_assert!((shifted.eval(z) - p.eval(z)).norm() < 1e-10 * mag.max(1.0));
        }

        #[test]
        fn mul_commutes_and_distributes(a in arb_poly(16), b in arb_poly(16), d in arb_poly(16)) {
            let ab = a.mul(&b).unwrap();
            let ba = b.mul(&a).unwrap();
            prop_assert!(coeff_rel_err(&ab, &ba) < 1e-13);
            let lhs = a.mul(&b.add(&d).unwrap()).unwrap();
            let rhs = ab.add(&a.mul(&d).unwrap()).unwrap();
            // cancellation can make `lhs` small; measure against the summands
            let scale = ab.max_coeff_abs().max(a.mul(&d).unwrap().max_coeff_abs()).max(1e-300);
            let n = lhs.coeffs().len().max(rhs.coeffs().len());
            let diff = (0..n).map(|v| (lhs.coeff(v) - rhs.coeff(v)).norm()).fold(0.0, f64::max);
            prop_assert!(diff / scale < 1e-13);
        }

        #[test]
        fn taylor_remultiplies_to_numerator(num in arb_poly(6), tail in arb_poly(5), order in 0usize..20) {
            // den = 1 + (z * tail)/8 keeps its roots away from the center
            let mut dc = vec![c(1.0, 0.0)];
            dc.extend(tail.coeffs().iter().map(|&t| t * 0.125));
            let den = Polynomial::new(c(0.0, 0.0), dc).unwrap();
            let b = taylor_of_rational(&num, &den, c(0.0, 0.0), order, 1e-12).unwrap();
            let prod = convolve(den.coeffs(), b.coeffs());
            let scale = num.max_coeff_abs().max(1e-300);
            for (v, pv) in prod.iter().enumerate().take(order + 1) {
                prop_assert!((pv - num.coeff(v)).norm() < 1e-10 * scale);
            }
        }
    }
}
