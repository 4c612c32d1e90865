//! Existence testing and construction of Padé approximants `[p/q]` at an
//! arbitrary center.
//!
//! Two independent constructions are provided:
//!
//! * [`pade_jacobi`] expands the Jacobi determinants for the numerator and
//!   denominator along their polynomial first row. Each cofactor is a
//!   `q x q` numeric determinant.
//! * [`pade_linear_solve`] solves the `q x q` system that makes orders
//!   `p+1 ..= p+q` of `den * f - num` vanish.
//!
//! Both normalize so that the denominator equals 1 at the center.
//! Existence is decided by the Hankel determinant under a relative
//! [`TolerancePolicy`].

use serde::{Deserialize, Serialize};

use crate::error::{PadeError, Result};
use crate::linalg::SquareMatrix;
use crate::region::SampledCompact;
use crate::series::{c2, taylor_of_rational, CoeffsJson, Complex, Polynomial, TruncatedSeries};

/// Largest `q` accepted by the cofactor-expansion route.
pub const JACOBI_MAX_Q: usize = 12;

/// Tolerance for the `den(center) = 1` normalization invariant.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct PadeIndex {
    pub p: usize,
    pub q: usize,
}

impl PadeIndex {
    pub fn new(p: usize, q: usize) -> Self {
        Self { p, q }
    }
}

impl From<[usize; 2]> for PadeIndex {
    fn from(v: [usize; 2]) -> Self {
        Self { p: v[0], q: v[1] }
    }
}

impl From<PadeIndex> for [usize; 2] {
    fn from(i: PadeIndex) -> Self {
        [i.p, i.q]
    }
}

impl std::fmt::Display for PadeIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}/{}]", self.p, self.q)
    }
}

/// Finite index family with a witness sequence of strictly increasing `p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PadeIndexFamily {
    members: Vec<PadeIndex>,
    witness: Vec<PadeIndex>,
}

#[derive(Debug, Clone, Deserialize)]
struct FamilyJson {
    members: Vec<PadeIndex>,
    #[serde(default)]
    witness: Option<Vec<PadeIndex>>,
}

impl PadeIndexFamily {
    pub fn new(members: Vec<PadeIndex>, witness: Vec<PadeIndex>) -> Result<Self> {
        if witness.is_empty() {
            return Err(PadeError::InvalidFamily("witness sequence is empty".into()));
        }
        if let Some(w) = witness.windows(2).find(|w| w[1].p <= w[0].p) {
            return Err(PadeError::InvalidFamily(format!(
                "witness p must increase strictly, found {} then {}",
                w[0], w[1]
            )));
        }
        if let Some(w) = witness.iter().find(|w| !members.contains(w)) {
            return Err(PadeError::InvalidFamily(format!("witness {w} is not a member")));
        }
        Ok(Self { members, witness })
    }

    /// Family whose witness is derived from the members: sorted by `p`,
    /// keeping the smallest `q` for each `p`.
    pub fn from_members(members: Vec<PadeIndex>) -> Result<Self> {
        let mut sorted = members.clone();
        sorted.sort();
        sorted.dedup_by_key(|i| i.p);
        Self::new(members, sorted)
    }

    pub fn members(&self) -> &[PadeIndex] {
        &self.members
    }

    pub fn witness(&self) -> &[PadeIndex] {
        &self.witness
    }
}

impl<'de> Deserialize<'de> for PadeIndexFamily {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = FamilyJson::deserialize(d)?;
        match j.witness {
            Some(w) => Self::new(j.members, w),
            None => Self::from_members(j.members),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Relative thresholds deciding when a determinant counts as nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// `member` iff `|det| > tol_rel * scale`.
    pub tol_rel: f64,
    /// Below `tol_rel` but above this, the report carries a near-degenerate
    /// warning.
    pub near_degenerate_rel: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self { tol_rel: 1e-9, near_degenerate_rel: 1e-12 }
    }
}

impl TolerancePolicy {
    pub fn with_tol_rel(tol_rel: f64) -> Result<Self> {
        if !(tol_rel.is_finite() && tol_rel > 0.0) {
            return Err(PadeError::InvalidInput(format!("tol_rel must be positive, got {tol_rel}")));
        }
        let base = Self::default();
        Ok(Self { tol_rel, near_degenerate_rel: base.near_degenerate_rel.min(tol_rel) })
    }

    fn classify(&self, det_abs: f64, scale: f64) -> (bool, Option<HankelWarning>) {
        let member = det_abs > self.tol_rel * scale;
        let warning = (!member && det_abs > self.near_degenerate_rel * scale)
            .then_some(HankelWarning::NearDegenerate);
        (member, warning)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HankelWarning {
    NearDegenerate,
}

/// Outcome of the Hankel existence test for one index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HankelReport {
    pub p: usize,
    pub q: usize,
    #[serde(serialize_with = "ser_c2")]
    pub det: Complex,
    /// Product of the Hankel matrix's row 2-norms (Hadamard bound), 1 for q = 0.
    pub scale: f64,
    pub member: bool,
    pub warning: Option<HankelWarning>,
    pub tol_rel: f64,
}

impl HankelReport {
    /// `|det| / scale`, in `[0, 1]` by Hadamard's inequality.
    pub fn relative_det(&self) -> f64 {
        if self.scale > 0.0 {
            self.det.norm() / self.scale
        } else {
            0.0
        }
    }
}

fn ser_c2<S: serde::Serializer>(z: &Complex, s: S) -> std::result::Result<S::Ok, S::Error> {
    c2(*z).serialize(s)
}

/// The `q x q` Hankel matrix with entry `(r, c) = a_{p-q+1+r+c}`, where
/// negative indices read as zero.
pub fn hankel_matrix(s: &TruncatedSeries, idx: PadeIndex) -> Result<SquareMatrix> {
    let PadeIndex { p, q } = idx;
    if q == 0 {
        return Err(PadeError::InvalidInput("the Hankel matrix needs q >= 1".into()));
    }
    let needed = p + q - 1;
    if s.order() < needed {
        return Err(PadeError::InsufficientOrder { required: needed });
    }
    let base = p as isize - q as isize + 1;
    // every index is <= p+q-1, checked above
    Ok(SquareMatrix::from_fn(q, |r, c| {
        s.coeff(base + (r + c) as isize).unwrap_or_default()
    }))
}

/// Decides membership of `s` in the existence class for `idx`.
pub fn membership(s: &TruncatedSeries, idx: PadeIndex, tol: &TolerancePolicy) -> Result<HankelReport> {
    if idx.q == 0 {
        return Ok(HankelReport {
            p: idx.p,
            q: 0,
            det: Complex::new(1.0, 0.0),
            scale: 1.0,
            member: true,
            warning: None,
            tol_rel: tol.tol_rel,
        });
    }
    let h = hankel_matrix(s, idx)?;
    let det = h.determinant();
    let scale = h.row_norm_product();
    let (member, warning) = tol.classify(det.norm(), scale);
    Ok(HankelReport { p: idx.p, q: idx.q, det, scale, member, warning, tol_rel: tol.tol_rel })
}

/// `[p/q] = num / den` about `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalApproximant {
    num: Polynomial,
    den: Polynomial,
    center: Complex,
    p: usize,
    q: usize,
    normalized: bool,
}

impl RationalApproximant {
    /// Wraps an arbitrary quotient. Both parts are re-expanded about
    /// `center`; `p`, `q` are the degrees (0 for a zero numerator).
    pub fn from_parts(num: &Polynomial, den: &Polynomial, center: Complex) -> Result<Self> {
        if den.is_zero() {
            return Err(PadeError::InvalidInput("zero denominator".into()));
        }
        let num = num.recenter(center);
        let den = den.recenter(center);
        let normalized = (den.coeff(0) - Complex::new(1.0, 0.0)).norm() < NORMALIZATION_TOL;
        Ok(Self {
            p: num.degree().unwrap_or(0),
            q: den.degree().unwrap_or(0),
            num,
            den,
            center,
            normalized,
        })
    }

    /// Divides both parts by `den(center)`.
    fn normalized_from(num: Polynomial, den: Polynomial, center: Complex, idx: PadeIndex) -> Result<Self> {
        let d0 = den.coeff(0);
        if d0 == Complex::new(0.0, 0.0) {
            return Err(PadeError::NotInExistenceClass { p: idx.p, q: idx.q, det_abs: 0.0, scale: 0.0 });
        }
        let inv = Complex::new(1.0, 0.0) / d0;
        let mut den_c = den.scale(inv).into_coeffs();
        den_c[0] = Complex::new(1.0, 0.0);
        Ok(Self {
            num: num.scale(inv),
            den: Polynomial::from_parts(center, den_c),
            center,
            p: idx.p,
            q: idx.q,
            normalized: true,
        })
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn center(&self) -> Complex {
        self.center
    }

    pub fn index(&self) -> PadeIndex {
        PadeIndex::new(self.p, self.q)
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Taylor coefficients of the quotient through `order`.
    pub fn taylor(&self, order: usize) -> Result<TruncatedSeries> {
        taylor_of_rational(&self.num, &self.den, self.center, order, NORMALIZATION_TOL)
    }
}

#[derive(Serialize)]
struct ApproximantJson {
    center: [f64; 2],
    p: usize,
    q: usize,
    normalized: bool,
    num: CoeffsJson,
    den: CoeffsJson,
}

impl Serialize for RationalApproximant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ApproximantJson {
            center: c2(self.center),
            p: self.p,
            q: self.q,
            normalized: self.normalized,
            num: (&self.num).into(),
            den: (&self.den).into(),
        }
        .serialize(s)
    }
}

fn require_member(s: &TruncatedSeries, idx: PadeIndex, tol: &TolerancePolicy) -> Result<HankelReport> {
    let report = membership(s, idx, tol)?;
    if !report.member {
        return Err(PadeError::NotInExistenceClass {
            p: idx.p,
            q: idx.q,
            det_abs: report.det.norm(),
            scale: report.scale,
        });
    }
    Ok(report)
}

/// Padé approximant from the Jacobi determinant formulas.
///
/// Both determinants share the rows `a_{p-q+i} .. a_{p+i}` for
/// `i = 1..=q`. Their first rows are `(z-c)^{q-j} S_{p-q+j}(z)` for the
/// numerator and `(z-c)^{q-j}` for the denominator, `j = 0..=q`. The raw
/// denominator takes the value `(-1)^q det(Hankel)` at the center and is
/// rescaled to 1.
pub fn pade_jacobi(s: &TruncatedSeries, idx: PadeIndex, tol: &TolerancePolicy) -> Result<RationalApproximant> {
    let PadeIndex { p, q } = idx;
    let center = s.center();
    if q == 0 {
        let num = s.partial_sum(p as isize)?;
        return Ok(RationalApproximant {
            num,
            den: Polynomial::constant(center, Complex::new(1.0, 0.0)),
            center,
            p,
            q,
            normalized: true,
        });
    }
    if q > JACOBI_MAX_Q {
        return Err(PadeError::JacobiOrderTooLarge { q, max_q: JACOBI_MAX_Q });
    }
    if s.order() < p + q {
        return Err(PadeError::InsufficientOrder { required: p + q });
    }
    require_member(s, idx, tol)?;

    let base = p as isize - q as isize;
    // lower block: q rows, q+1 columns, entry (i, j) = a_{p-q+1+i+j}
    let lower: Vec<Vec<Complex>> = (0..q)
        .map(|i| {
            (0..=q)
                .map(|j| s.coeff(base + 1 + (i + j) as isize))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut num = Polynomial::zero(center);
    let mut den = Polynomial::zero(center);
    for j in 0..=q {
        let minor = SquareMatrix::from_fn(q, |r, c| lower[r][if c < j { c } else { c + 1 }]);
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let cofactor = minor.determinant() * sign;
        let shift = Polynomial::monomial(center, q - j, cofactor);
        let partial = s.partial_sum(base + j as isize)?;
        num = num.add(&shift.mul(&partial)?)?;
        den = den.add(&shift)?;
    }
    RationalApproximant::normalized_from(num, den, center, idx)
}

/// Padé approximant by solving the denominator system directly.
///
/// With `b_0 = 1`, the unknowns `b_1 .. b_q` satisfy
/// `sum_{j=1..q} b_j a_{k-j} = -a_k` for `k = p+1 ..= p+q`. The numerator
/// is the degree-`p` truncation of `den * f`.
pub fn pade_linear_solve(s: &TruncatedSeries, idx: PadeIndex, tol: &TolerancePolicy) -> Result<RationalApproximant> {
    let PadeIndex { p, q } = idx;
    let center = s.center();
    if s.order() < p + q {
        return Err(PadeError::InsufficientOrder { required: p + q });
    }
    let mut den = vec![Complex::new(1.0, 0.0)];
    if q > 0 {
        let system = SquareMatrix::from_fn(q, |k, j| {
            s.coeff(p as isize + k as isize - j as isize).unwrap_or_default()
        });
        let rhs: Vec<Complex> = (0..q)
            .map(|k| -s.coeffs()[p + 1 + k])
            .collect();
        let lu = system.lu();
        let det_abs = lu.determinant().norm();
        let scale = system.row_norm_product();
        let (ok, _) = tol.classify(det_abs, scale);
        if !ok {
            return Err(PadeError::SingularSystem { p, q, det_abs, scale });
        }
        den.extend(lu.solve(&rhs)?);
    }
    let num: Vec<Complex> = (0..=p)
        .map(|i| {
            (0..=i.min(q))
                .map(|j| den[j] * s.coeffs()[i - j])
                .sum()
        })
        .collect();
    Ok(RationalApproximant {
        num: Polynomial::from_parts(center, num),
        den: Polynomial::from_parts(center, den),
        center,
        p,
        q,
        normalized: true,
    })
}

/// Largest coefficient difference between two approximants, relative to
/// the largest coefficient of either (numerator and denominator measured
/// separately, the worse one returned).
pub fn route_discrepancy(a: &RationalApproximant, b: &RationalApproximant) -> f64 {
    fn rel(x: &Polynomial, y: &Polynomial) -> f64 {
        let n = x.coeffs().len().max(y.coeffs().len());
        let scale = x.max_coeff_abs().max(y.max_coeff_abs());
        if scale == 0.0 {
            return 0.0;
        }
        (0..n).map(|v| (x.coeff(v) - y.coeff(v)).norm()).fold(0.0, f64::max) / scale
    }
    let (bn, bd) = (b.num.recenter(a.center), b.den.recenter(a.center));
    rel(&a.num, &bn).max(rel(&a.den, &bd))
}

/// `min_{z in region} |num(z)|^2 + |den(z)|^2`.
pub fn separation_bound(r: &RationalApproximant, region: &SampledCompact) -> Result<f64> {
    if !r.is_normalized() {
        return Err(PadeError::InvalidInput("separation bound needs a normalized approximant".into()));
    }
    if region.is_empty() {
        return Err(PadeError::EmptyRegion(region.label().to_string()));
    }
    Ok(region
        .points()
        .iter()
        .map(|&z| r.num.eval(z).norm_sqr() + r.den.eval(z).norm_sqr())
        .fold(f64::INFINITY, f64::min))
}
