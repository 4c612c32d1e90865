//! Evaluation, poles and sampled sup-norms of rational approximants.

use serde::Serialize;

use crate::error::{PadeError, Result};
use crate::linalg::{eigenvalues, SquareMatrix};
use crate::pade::RationalApproximant;
use crate::region::SampledCompact;
use crate::series::{c2, Complex, Polynomial};

/// `|den(z)| < NEAR_POLE_REL * max(1, |num(z)|)` counts as a pole hit.
pub const NEAR_POLE_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evaluation {
    Value(Complex),
    NearPole,
}

impl Evaluation {
    pub fn value(self) -> Option<Complex> {
        match self {
            Evaluation::Value(v) => Some(v),
            Evaluation::NearPole => None,
        }
    }
}

pub fn rat_eval(r: &RationalApproximant, z: Complex) -> Evaluation {
    let a = r.num().eval(z);
    let b = r.den().eval(z);
    if b.norm() < NEAR_POLE_REL * a.norm().max(1.0) {
        Evaluation::NearPole
    } else {
        Evaluation::Value(a / b)
    }
}

/// Roots of the denominator with their post-refinement residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSet {
    pub poles: Vec<Complex>,
    pub residual_norms: Vec<f64>,
}

impl PoleSet {
    pub fn count(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }
}

#[derive(Serialize)]
struct PoleSetJson {
    poles: Vec<[f64; 2]>,
    residuals: Vec<f64>,
}

impl Serialize for PoleSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PoleSetJson {
            poles: self.poles.iter().map(|&z| c2(z)).collect(),
            residuals: self.residual_norms.clone(),
        }
        .serialize(s)
    }
}

/// All roots of `poly`, counted with multiplicity: companion-matrix
/// eigenvalues followed by one Newton step each.
pub fn polynomial_roots(poly: &Polynomial) -> Result<Vec<Complex>> {
    let degree = match poly.degree() {
        Some(d) if d >= 1 => d,
        _ => return Ok(Vec::new()),
    };
    let coeffs = poly.coeffs();
    let lead = coeffs[degree];
    // Frobenius companion: ones on the subdiagonal, -c_k/c_n in the last column
    let companion = SquareMatrix::from_fn(degree, |r, c| {
        if c == degree - 1 {
            -coeffs[r] / lead
        } else if r == c + 1 {
            Complex::new(1.0, 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    let derivative = Polynomial::from_parts(
        Complex::new(0.0, 0.0),
        coeffs.iter().enumerate().skip(1).map(|(k, &a)| a * k as f64).collect(),
    );
    let local = Polynomial::from_parts(Complex::new(0.0, 0.0), coeffs.to_vec());
    let mut roots: Vec<Complex> = eigenvalues(&companion)?
        .into_iter()
        .map(|t| {
            let slope = derivative.eval(t);
            let step = local.eval(t) / slope;
            let refined = t - step;
            if slope.norm() > 0.0 && refined.re.is_finite() && refined.im.is_finite()
                && local.eval(refined).norm() <= local.eval(t).norm()
            {
                refined
            } else {
                t
            }
        })
        .map(|t| t + poly.center())
        .collect();
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

pub fn poles(r: &RationalApproximant) -> Result<PoleSet> {
    let den = r.den();
    let poles = polynomial_roots(den)?;
    let residual_norms = poles.iter().map(|&w| den.eval(w).norm()).collect();
    Ok(PoleSet { poles, residual_norms })
}

/// `min_{w pole} |num(w)| / max|num coeff|`. Large values certify that the
/// numerator and denominator share no zero at working precision. Infinite
/// when the denominator is constant.
pub fn near_common_zero(r: &RationalApproximant) -> Result<f64> {
    let scale = r.num().max_coeff_abs();
    let set = poles(r)?;
    if set.is_empty() {
        return Ok(f64::INFINITY);
    }
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(set
        .poles
        .iter()
        .map(|&w| r.num().eval(w).norm() / scale)
        .fold(f64::INFINITY, f64::min))
}

/// Pointwise `|r(z) - target(z)|` over the region, `+inf` at pole hits.
pub fn pointwise_distance(r: &RationalApproximant, target: &Polynomial, region: &SampledCompact) -> Vec<f64> {
    region
        .points()
        .iter()
        .map(|&z| match rat_eval(r, z) {
            Evaluation::Value(v) => (v - target.eval(z)).norm(),
            Evaluation::NearPole => f64::INFINITY,
        })
        .collect()
}

/// Sampled `sup |r - target|` over the region; `+inf` if any sample hits a
/// pole.
pub fn sup_distance(r: &RationalApproximant, target: &Polynomial, region: &SampledCompact) -> Result<f64> {
    if region.is_empty() {
        return Err(PadeError::EmptyRegion(region.label().to_string()));
    }
    Ok(pointwise_distance(r, target, region).into_iter().fold(0.0, f64::max))
}
