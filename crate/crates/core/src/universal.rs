//! Constructive density step for universal Padé approximants.
//!
//! One stage takes a target polynomial `h` on a compact `K` outside the
//! domain and the previous stage function `prev` on a disc `L''` inside it:
//!
//! 1. glue `h` on `K` and `prev` on `L''` into one sample set,
//! 2. fit a polynomial `P` to the glued samples (least squares with degree
//!    escalation),
//! 3. pick `(p, q)` from the index family with `p > deg P`,
//! 4. perturb to `g = P + d z^p` with small `d != 0`, so `g` has exact degree
//!    `p`. A polynomial of exact degree `p` is its own `[p/q]` approximant at
//!    every center for every `q`.
//! 5. certify membership at every sampled center in `L`, closeness of the
//!    approximants to `h` on `K`, to `g` on `L'`, and closeness of `g` to
//!    `prev` on `L''`.
//!
//! [`run_schedule`] chains stages over a finite demand list. Each stage stays
//! close to its predecessor on a growing disc, so stage functions form a
//! Cauchy sequence there.

use serde::{Deserialize, Serialize};

use crate::error::{PadeError, Result};
use crate::linalg::least_squares;
use crate::pade::{membership, pade_linear_solve, HankelReport, HankelWarning, PadeIndex, PadeIndexFamily, TolerancePolicy};
use crate::region::{check_disjoint, make_region, RegionSpec, SampledCompact};
use crate::series::{c2, from_c2, Complex, Polynomial};

/// Maximum number of times `d` is halved on a near-degenerate membership.
pub const MAX_D_HALVINGS: usize = 40;

fn origin() -> Complex {
    Complex::new(0.0, 0.0)
}

fn ser_c2<S: serde::Serializer>(z: &Complex, s: S) -> std::result::Result<S::Ok, S::Error> {
    c2(*z).serialize(s)
}

/// One universality requirement: approximate `target_h` on `region_k` to
/// within `1 / tolerance_s`.
#[derive(Debug, Clone)]
pub struct Demand {
    pub target_h: Polynomial,
    pub region_k: SampledCompact,
    pub tolerance_s: u32,
}

impl Demand {
    pub fn new(target_h: Polynomial, region_k: SampledCompact, tolerance_s: u32) -> Result<Self> {
        if tolerance_s == 0 {
            return Err(PadeError::InvalidInput("tolerance s must be >= 1".into()));
        }
        if !region_k.asserted_outside_omega() {
            return Err(PadeError::InvalidRegion {
                label: region_k.label().into(),
                reason: "demand region must be asserted outside the domain".into(),
            });
        }
        Ok(Self { target_h, region_k, tolerance_s })
    }

    pub fn bound(&self) -> f64 {
        1.0 / self.tolerance_s as f64
    }
}

/// Sample of the glued target: `h` on `K`, `phi` on `L''`.
pub fn glue_target(
    h: &Polynomial,
    region_k: &SampledCompact,
    phi: &Polynomial,
    region_ldd: &SampledCompact,
    margin: f64,
) -> Result<Vec<(Complex, Complex)>> {
    if !check_disjoint(region_k, region_ldd, margin)? {
        return Err(PadeError::RegionsOverlap {
            a: region_k.label().into(),
            b: region_ldd.label().into(),
            distance: region_k.min_distance(region_ldd),
            margin,
        });
    }
    Ok(region_k
        .points()
        .iter()
        .map(|&z| (z, h.eval(z)))
        .chain(region_ldd.points().iter().map(|&z| (z, phi.eval(z))))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialFit {
    pub poly: Polynomial,
    pub degree: usize,
    pub sup_error: f64,
}

/// Least-squares fit in the basis `((z - c) / rho)^k`, with `c` the sample
/// centroid and `rho` the sample radius about it. The degree escalates from
/// 0 until the sampled sup error drops below `budget`.
pub fn fit_polynomial(samples: &[(Complex, Complex)], max_degree: usize, budget: f64) -> Result<PolynomialFit> {
    if samples.is_empty() {
        return Err(PadeError::InvalidInput("no samples to fit".into()));
    }
    if !(budget.is_finite() && budget > 0.0) {
        return Err(PadeError::InvalidInput(format!("fit budget must be positive, got {budget}")));
    }
    let n = samples.len();
    let center = samples.iter().map(|s| s.0).sum::<Complex>() / n as f64;
    let rho = samples.iter().map(|s| (s.0 - center).norm()).fold(0.0, f64::max);
    let rho = if rho > 0.0 { rho } else { 1.0 };
    let scaled: Vec<Complex> = samples.iter().map(|s| (s.0 - center) / rho).collect();
    let rhs: Vec<Complex> = samples.iter().map(|s| s.1).collect();

    let mut best: Option<(f64, usize)> = None;
    for degree in 0..=max_degree {
        let cols = degree + 1;
        let mut a = Vec::with_capacity(n * cols);
        for &t in &scaled {
            let mut power = Complex::new(1.0, 0.0);
            for _ in 0..cols {
                a.push(power);
                power *= t;
            }
        }
        let rcond = f64::EPSILON * n.max(cols) as f64;
        let x = least_squares(&a, cols, &rhs, rcond)?;
        let mut inv_rho_k = 1.0;
        let coeffs = x
            .iter()
            .map(|&xk| {
                let ck = xk * inv_rho_k;
                inv_rho_k /= rho;
                ck
            })
            .collect();
        let poly = Polynomial::new(center, coeffs)?;
        let sup_error = samples
            .iter()
            .map(|&(z, w)| (poly.eval(z) - w).norm())
            .fold(0.0, f64::max);
        if sup_error < budget {
            return Ok(PolynomialFit { poly, degree, sup_error });
        }
        if best.is_none_or(|(e, _)| sup_error < e) {
            best = Some((sup_error, degree));
        }
    }
    let (best_error, at_degree) = best.unwrap_or((f64::INFINITY, 0));
    Err(PadeError::BudgetUnreachable { best_error, at_degree, budget })
}

/// First witness index with `p > min_p_exclusive`.
pub fn choose_index(family: &PadeIndexFamily, min_p_exclusive: usize) -> Result<PadeIndex> {
    family
        .witness()
        .iter()
        .copied()
        .find(|i| i.p > min_p_exclusive)
        .ok_or(PadeError::FamilyExhausted { min_p: min_p_exclusive })
}

/// The sampled sets a stage is certified on.
#[derive(Debug, Clone, Copy)]
pub struct StageRegions<'a> {
    /// Expansion centers.
    pub l: &'a SampledCompact,
    /// Where the approximants must reproduce the stage function.
    pub l_prime: &'a SampledCompact,
    /// Where the approximants must hit the target.
    pub k: &'a SampledCompact,
    /// Where the stage function must stay close to its predecessor.
    pub l_double_prime: &'a SampledCompact,
}

impl StageRegions<'_> {
    fn all(&self) -> [&SampledCompact; 4] {
        [self.l, self.l_prime, self.k, self.l_double_prime]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StageTargets<'a> {
    pub h: &'a Polynomial,
    pub s: u32,
    pub eps_stage: f64,
    pub prev: &'a Polynomial,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CenterReport {
    #[serde(serialize_with = "ser_c2")]
    pub zeta: Complex,
    pub hankel: HankelReport,
}

/// Triangle-inequality decomposition of the error on `K`:
/// `|R - h| <= |R - g| + |g - P| + |P - h|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetAudit {
    pub fit_error_on_k: f64,
    /// `|d| * max_{z in K} |z|^p`.
    pub perturbation_bound_on_k: f64,
    /// Evaluated `max_{z in K} |g(z) - P(z)|`.
    pub perturbation_observed_on_k: f64,
    /// `max_{zeta in L, z in K} |[p/q]_{g,zeta}(z) - g(z)|`.
    pub approximant_discrepancy_on_k: f64,
    /// `fit + max(bound, observed) + discrepancy`.
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thresholds {
    pub s: u32,
    pub one_over_s: f64,
    pub eps_stage: f64,
    pub tol_rel: f64,
    pub near_degenerate_rel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionEcho {
    pub label: String,
    pub n_points: usize,
    pub asserted_connected_complement: bool,
    pub asserted_outside_omega: bool,
}

impl From<&SampledCompact> for RegionEcho {
    fn from(r: &SampledCompact) -> Self {
        Self {
            label: r.label().into(),
            n_points: r.len(),
            asserted_connected_complement: r.asserted_connected_complement(),
            asserted_outside_omega: r.asserted_outside_omega(),
        }
    }
}

/// Numeric evidence for one stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniversalityCertificate {
    pub stage: usize,
    pub p: usize,
    pub q: usize,
    #[serde(serialize_with = "ser_c2")]
    pub d_used: Complex,
    pub d_halvings: usize,
    pub fit_degree: usize,
    pub g_degree: Option<usize>,
    pub membership_ok: bool,
    pub membership: Vec<CenterReport>,
    /// `sup_{zeta in L, z in K} |[p/q]_{g,zeta}(z) - h(z)|`
    pub err_on_k: f64,
    /// `sup_{zeta in L, z in L'} |[p/q]_{g,zeta}(z) - g(z)|`
    pub err_on_lprime: f64,
    /// `sup_{z in L''} |g(z) - prev(z)|`
    pub err_vs_previous_on_ldoubleprime: f64,
    pub fit_error_on_ldoubleprime: f64,
    /// `sup` over every sampled center and region of `|[p/q]_{g,zeta} - g|`.
    pub approximant_vs_g_all_regions: f64,
    pub exact_degree: Vec<ExactDegreeCheck>,
    pub budget: BudgetAudit,
    pub thresholds: Thresholds,
    pub regions: Vec<RegionEcho>,
    /// How `L''` was chosen.
    pub ldoubleprime_policy: String,
    pub pass: bool,
}

impl UniversalityCertificate {
    fn evaluate_pass(&self) -> bool {
        self.membership_ok
            && self.err_on_k < self.thresholds.one_over_s
            && self.err_on_lprime < self.thresholds.one_over_s
            && self.err_vs_previous_on_ldoubleprime < self.thresholds.eps_stage
    }

    /// Human-readable list of the conditions that failed.
    pub fn failure_summary(&self) -> String {
        let mut out = Vec::new();
        if !self.membership_ok {
            let bad: Vec<String> = self
                .membership
                .iter()
                .filter(|r| !r.hankel.member)
                .map(|r| format!("{}", r.zeta))
                .collect();
            out.push(format!("membership failed at centers {} in region '{}'", bad.join(", "), self.regions[0].label));
        }
        if !(self.err_on_k < self.thresholds.one_over_s) {
            out.push(format!(
                "err_on_K {:e} >= 1/s = {:e} on region '{}'",
                self.err_on_k, self.thresholds.one_over_s, self.regions[2].label
            ));
        }
        if !(self.err_on_lprime < self.thresholds.one_over_s) {
            out.push(format!(
                "err_on_Lprime {:e} >= 1/s = {:e} on region '{}'",
                self.err_on_lprime, self.thresholds.one_over_s, self.regions[1].label
            ));
        }
        if !(self.err_vs_previous_on_ldoubleprime < self.thresholds.eps_stage) {
            out.push(format!(
                "err_vs_previous {:e} >= eps = {:e} on region '{}'",
                self.err_vs_previous_on_ldoubleprime, self.thresholds.eps_stage, self.regions[3].label
            ));
        }
        if out.is_empty() {
            "none".into()
        } else {
            out.join("; ")
        }
    }
}

/// Observed `sup |[p/q]_{g,zeta} - g|` on one region next to the a-priori
/// floating-point error of evaluating both sides there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactDegreeCheck {
    pub region: String,
    pub sup_discrepancy: f64,
    pub roundoff_bound: f64,
}

/// Horner bound `gamma_{4n+2} * sum |c_k| |z - c|^k`, summed over both
/// evaluations and maximized over centers and points.
fn roundoff_bound(
    g: &Polynomial,
    approximants: &[Option<crate::pade::RationalApproximant>],
    region: &SampledCompact,
) -> f64 {
    fn magnitude(p: &Polynomial, z: Complex) -> f64 {
        let t = (z - p.center()).norm();
        p.coeffs().iter().rev().fold(0.0, |acc, c| acc * t + c.norm())
    }
    let n = approximants
        .iter()
        .flatten()
        .map(|r| r.index().p + r.index().q)
        .max()
        .unwrap_or(0)
        .max(g.coeffs().len());
    let u = f64::EPSILON / 2.0;
    let k = (4 * n + 2) as f64 * u;
    let gamma = k / (1.0 - k);
    region
        .points()
        .iter()
        .map(|&z| {
            let mg = magnitude(g, z);
            approximants
                .iter()
                .flatten()
                .map(|r| {
                    let value = r.num().eval(z) / r.den().eval(z);
                    gamma * (mg + magnitude(r.num(), z) + value.norm() * magnitude(r.den(), z))
                })
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Per-sample-point errors, maximized over the expansion centers, for
/// external plotting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorField {
    pub region: String,
    pub points: Vec<[f64; 2]>,
    pub errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageResult {
    pub g: Polynomial,
    pub pq: PadeIndex,
    #[serde(serialize_with = "ser_c2")]
    pub d_used: Complex,
    pub fit_degree: usize,
    pub certificate: UniversalityCertificate,
    #[serde(skip)]
    pub fields: Vec<ErrorField>,
}

fn max_abs_diff(region: &SampledCompact, f: impl Fn(Complex) -> Complex, g: impl Fn(Complex) -> Complex) -> f64 {
    region.points().iter().map(|&z| (f(z) - g(z)).norm()).fold(0.0, f64::max)
}

/// Builds `g = P + d z^p` and checks the three stage conditions, with
/// `d` supplied by the caller. `d = 0` is rejected: `g` would keep the degree
/// of `P` and stop being its own `[p/q]` approximant.
#[allow(clippy::too_many_arguments)]
pub fn certify_stage(
    stage: usize,
    p_poly: &Polynomial,
    d: Complex,
    idx: PadeIndex,
    regions: StageRegions<'_>,
    targets: StageTargets<'_>,
    tol: &TolerancePolicy,
) -> Result<StageResult> {
    if d == origin() || !(d.re.is_finite() && d.im.is_finite()) {
        return Err(PadeError::InvalidInput(format!("perturbation d must be finite and nonzero, got {d}")));
    }
    let deg_p = p_poly.degree();
    if deg_p.is_some_and(|dp| dp >= idx.p) {
        return Err(PadeError::InvalidInput(format!(
            "index {idx} needs p > deg P = {}",
            deg_p.unwrap_or(0)
        )));
    }
    let g = p_poly.add(&Polynomial::monomial(origin(), idx.p, d).recenter(p_poly.center()))?;
    let g_degree = g.degree();
    if g_degree != Some(idx.p) {
        return Err(PadeError::Numerical(format!(
            "perturbed polynomial has degree {g_degree:?}, expected {}",
            idx.p
        )));
    }

    let mut reports = Vec::with_capacity(regions.l.len());
    let mut approximants = Vec::with_capacity(regions.l.len());
    for &zeta in regions.l.points() {
        let series = g.taylor_series(zeta, idx.p + idx.q);
        let hankel = membership(&series, idx, tol)?;
        let approx = if hankel.member { pade_linear_solve(&series, idx, tol).ok() } else { None };
        approximants.push(approx);
        reports.push(CenterReport { zeta, hankel });
    }
    let membership_ok = reports.iter().all(|r| r.hankel.member) && approximants.iter().all(Option::is_some);

    // max over centers of |R_zeta(z) - target(z)| at each point; +inf on pole hits or missing approximants
    let field = |region: &SampledCompact, target: &dyn Fn(Complex) -> Complex| -> Vec<f64> {
        region
            .points()
            .iter()
            .map(|&z| {
                approximants
                    .iter()
                    .map(|a| match a {
                        Some(r) => match crate::analysis::rat_eval(r, z).value() {
                            Some(v) => (v - target(z)).norm(),
                            None => f64::INFINITY,
                        },
                        None => f64::INFINITY,
                    })
                    .fold(0.0, f64::max)
            })
            .collect()
    };
    let sup = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);

    let h = targets.h;
    let k_vs_h = field(regions.k, &|z| h.eval(z));
    let k_vs_g = field(regions.k, &|z| g.eval(z));
    let lp_vs_g = field(regions.l_prime, &|z| g.eval(z));
    let exact_degree: Vec<ExactDegreeCheck> = regions
        .all()
        .iter()
        .map(|r| ExactDegreeCheck {
            region: r.label().into(),
            sup_discrepancy: sup(&field(r, &|z| g.eval(z))),
            roundoff_bound: roundoff_bound(&g, &approximants, r),
        })
        .collect();
    let exact_all = exact_degree.iter().map(|e| e.sup_discrepancy).fold(0.0, f64::max);

    let max_k_pow = regions.k.max_modulus().powi(idx.p as i32);
    let fit_error_on_k = max_abs_diff(regions.k, |z| p_poly.eval(z), |z| h.eval(z));
    let perturbation_bound_on_k = d.norm() * max_k_pow;
    let perturbation_observed_on_k = max_abs_diff(regions.k, |z| g.eval(z), |z| p_poly.eval(z));
    let approximant_discrepancy_on_k = sup(&k_vs_g);
    let budget = BudgetAudit {
        fit_error_on_k,
        perturbation_bound_on_k,
        perturbation_observed_on_k,
        approximant_discrepancy_on_k,
        total: fit_error_on_k
            + perturbation_bound_on_k.max(perturbation_observed_on_k)
            + approximant_discrepancy_on_k,
    };

    let prev = targets.prev;
    let mut certificate = UniversalityCertificate {
        stage,
        p: idx.p,
        q: idx.q,
        d_used: d,
        d_halvings: 0,
        fit_degree: deg_p.unwrap_or(0),
        g_degree,
        membership_ok,
        membership: reports,
        err_on_k: sup(&k_vs_h),
        err_on_lprime: sup(&lp_vs_g),
        err_vs_previous_on_ldoubleprime: max_abs_diff(regions.l_double_prime, |z| g.eval(z), |z| prev.eval(z)),
        fit_error_on_ldoubleprime: max_abs_diff(regions.l_double_prime, |z| p_poly.eval(z), |z| prev.eval(z)),
        approximant_vs_g_all_regions: exact_all,
        exact_degree,
        budget,
        thresholds: Thresholds {
            s: targets.s,
            one_over_s: 1.0 / targets.s as f64,
            eps_stage: targets.eps_stage,
            tol_rel: tol.tol_rel,
            near_degenerate_rel: tol.near_degenerate_rel,
        },
        regions: regions.all().iter().map(|r| RegionEcho::from(*r)).collect(),
        ldoubleprime_policy: "supplied by caller".into(),
        pass: false,
    };
    certificate.pass = certificate.evaluate_pass();

    let fields = vec![
        ErrorField {
            region: regions.k.label().into(),
            points: regions.k.points().iter().map(|&z| c2(z)).collect(),
            errors: k_vs_h,
        },
        ErrorField {
            region: regions.l_prime.label().into(),
            points: regions.l_prime.points().iter().map(|&z| c2(z)).collect(),
            errors: lp_vs_g,
        },
    ];
    Ok(StageResult { g, pq: idx, d_used: d, fit_degree: deg_p.unwrap_or(0), certificate, fields })
}

/// Chooses `d` and certifies the stage.
///
/// `|d| * max_{z in all regions} |z|^p` is set to a quarter of the error
/// budget left after the fit (half of the remaining half), direction real
/// positive. `d` is halved, at most [`MAX_D_HALVINGS`] times, while any
/// membership report carries a near-degenerate warning.
pub fn perturb_and_certify(
    stage: usize,
    p_poly: &Polynomial,
    idx: PadeIndex,
    regions: StageRegions<'_>,
    targets: StageTargets<'_>,
    tol: &TolerancePolicy,
) -> Result<StageResult> {
    let fit_k = max_abs_diff(regions.k, |z| p_poly.eval(z), |z| targets.h.eval(z));
    let fit_ldd = max_abs_diff(regions.l_double_prime, |z| p_poly.eval(z), |z| targets.prev.eval(z));
    let remaining = (1.0 / targets.s as f64 - fit_k).min(targets.eps_stage - fit_ldd);
    if !(remaining > 0.0) {
        return Err(PadeError::BudgetUnreachable {
            best_error: fit_k.max(fit_ldd),
            at_degree: p_poly.degree().unwrap_or(0),
            budget: (1.0 / targets.s as f64).min(targets.eps_stage),
        });
    }
    let radius = regions.all().iter().map(|r| r.max_modulus()).fold(0.0, f64::max);
    let growth = radius.powi(idx.p as i32).max(1.0);
    let mut d = Complex::new(0.25 * remaining / growth, 0.0);
    let mut halvings = 0;
    loop {
        let mut result = certify_stage(stage, p_poly, d, idx, regions, targets, tol)?;
        result.certificate.d_halvings = halvings;
        let warned = result
            .certificate
            .membership
            .iter()
            .any(|r| r.hankel.warning == Some(HankelWarning::NearDegenerate));
        if warned && halvings < MAX_D_HALVINGS {
            d *= 0.5;
            halvings += 1;
            continue;
        }
        if warned {
            // near-degenerate reports count as failures
            result.certificate.membership_ok = false;
            result.certificate.pass = false;
        }
        if result.certificate.pass {
            return Ok(result);
        }
        return Err(PadeError::CertificationFailed(Box::new(result.certificate)));
    }
}

/// The domain, represented by a disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscDomain {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Default for DiscDomain {
    fn default() -> Self {
        Self { center: [0.0, 0.0], radius: 1.0 }
    }
}

/// How the stage discs `L''_n` are chosen: closed discs about the centroid
/// of `L ∪ L'`, radius `max dist + interior_margin + (n-1) * growth`, kept
/// `boundary_margin` inside the domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InnerDiscPolicy {
    pub interior_margin: f64,
    pub growth: f64,
    pub boundary_margin: f64,
    pub grid_step: f64,
}

impl Default for InnerDiscPolicy {
    fn default() -> Self {
        Self { interior_margin: 0.05, growth: 0.05, boundary_margin: 0.02, grid_step: 0.02 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScheduleOptions {
    pub omega: DiscDomain,
    pub inner: InnerDiscPolicy,
    pub max_fit_degree: usize,
    /// Fit budget as a fraction of `min(1/s, eps_n)`.
    pub fit_fraction: f64,
    /// Required separation between `K` and `L''`.
    pub disjoint_margin: f64,
    pub tol: TolerancePolicy,
}

impl Default for ScheduleOptions {
    fn default() -> Self {
        Self {
            omega: DiscDomain::default(),
            inner: InnerDiscPolicy::default(),
            max_fit_degree: 60,
            fit_fraction: 0.5,
            disjoint_margin: 0.1,
            tol: TolerancePolicy::default(),
        }
    }
}

/// `eps_n = 2^{-n} eps_0`, `n = 1 ..= count`.
pub fn geometric_eps_schedule(eps0: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|n| eps0 * 0.5f64.powi(n as i32)).collect()
}

/// Stage disc `L''_n` (1-based `n`).
pub fn inner_disc(
    stage: usize,
    l: &SampledCompact,
    l_prime: &SampledCompact,
    opts: &ScheduleOptions,
) -> Result<(SampledCompact, f64)> {
    let both = l.union(l_prime, "L∪L'");
    let centroid = both.centroid();
    let reach = both.points().iter().map(|z| (z - centroid).norm()).fold(0.0, f64::max);
    let omega_center = from_c2(opts.omega.center);
    let cap = opts.omega.radius - (centroid - omega_center).norm() - opts.inner.boundary_margin;
    let wanted = reach + opts.inner.interior_margin + (stage.saturating_sub(1)) as f64 * opts.inner.growth;
    let radius = wanted.min(cap);
    let label = format!("L''_{stage}");
    if !(radius > reach) {
        return Err(PadeError::InvalidRegion {
            label,
            reason: format!("no disc of radius > {reach} about {centroid} fits inside the domain"),
        });
    }
    Ok((make_region(&RegionSpec::disc(&label, centroid, radius, opts.inner.grid_step))?, radius))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TelescopeCheck {
    pub earlier: usize,
    pub later: usize,
    pub sup_difference: f64,
    pub bound: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleSummary {
    pub stages: usize,
    pub all_pass: bool,
    pub eps_schedule: Vec<f64>,
    pub inner_disc_radii: Vec<f64>,
    pub attempts_per_stage: Vec<usize>,
    pub telescoping: Vec<TelescopeCheck>,
    pub inner_disc_policy: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleReport {
    pub stages: Vec<StageResult>,
    pub summary: ScheduleSummary,
}

/// `L` (expansion centers) and `L'` (where approximants must reproduce the
/// stage function).
#[derive(Debug, Clone)]
pub struct Geometry {
    pub l: SampledCompact,
    pub l_prime: SampledCompact,
}

/// Runs the demands in order. Stage `n` meets demand `n` and stays within
/// `eps_schedule[n-1]` of stage `n-1` on `L''_n`.
pub fn run_schedule(
    demands: &[Demand],
    family: &PadeIndexFamily,
    geometry: &Geometry,
    phi0: &Polynomial,
    eps_schedule: &[f64],
    opts: &ScheduleOptions,
) -> Result<ScheduleReport> {
    if demands.is_empty() {
        return Err(PadeError::InvalidInput("demand schedule is empty".into()));
    }
    if eps_schedule.len() < demands.len() {
        return Err(PadeError::InvalidInput(format!(
            "eps schedule has {} entries for {} demands",
            eps_schedule.len(),
            demands.len()
        )));
    }
    if let Some(e) = eps_schedule.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(PadeError::InvalidInput(format!("eps schedule entries must be positive, got {e}")));
    }
    let omega_center = from_c2(opts.omega.center);
    geometry.l.check_inside_disc(omega_center, opts.omega.radius)?;
    geometry.l_prime.check_inside_disc(omega_center, opts.omega.radius)?;

    let policy = format!(
        "closed disc about the centroid of L ∪ L', radius = reach + {} + (n-1)*{}, kept {} inside the domain",
        opts.inner.interior_margin, opts.inner.growth, opts.inner.boundary_margin
    );
    let mut stages: Vec<StageResult> = Vec::with_capacity(demands.len());
    let mut inner_discs: Vec<SampledCompact> = Vec::with_capacity(demands.len());
    let mut radii = Vec::new();
    let mut attempts_per_stage = Vec::new();

    for (i, demand) in demands.iter().enumerate() {
        let stage = i + 1;
        let wrap = |e: PadeError| PadeError::Stage { stage, source: Box::new(e) };
        demand.region_k.check_outside_disc(omega_center, opts.omega.radius).map_err(wrap)?;

        let (ldd, ldd_radius) = inner_disc(stage, &geometry.l, &geometry.l_prime, opts).map_err(wrap)?;
        let prev = stages.last().map(|s| s.g.clone()).unwrap_or_else(|| phi0.clone());
        let eps = eps_schedule[i];
        let samples = glue_target(&demand.target_h, &demand.region_k, &prev, &ldd, opts.disjoint_margin)
            .map_err(wrap)?;
        let fit_budget = opts.fit_fraction * demand.bound().min(eps);
        let fit = fit_polynomial(&samples, opts.max_fit_degree, fit_budget).map_err(wrap)?;

        let regions = StageRegions { l: &geometry.l, l_prime: &geometry.l_prime, k: &demand.region_k, l_double_prime: &ldd };
        let targets = StageTargets { h: &demand.target_h, s: demand.tolerance_s, eps_stage: eps, prev: &prev };
        let first = choose_index(family, fit.poly.degree().unwrap_or(0)).map_err(wrap)?;
        let start = family.witness().iter().position(|w| *w == first).unwrap_or(0);

        // any witness index past deg P is admissible; advance on failure
        let mut last_err = None;
        let mut accepted = None;
        let mut attempts = 0;
        for &idx in &family.witness()[start..] {
            attempts += 1;
            match perturb_and_certify(stage, &fit.poly, idx, regions, targets, &opts.tol) {
                Ok(result) => {
                    accepted = Some(result);
                    break;
                }
                Err(e @ PadeError::CertificationFailed(_)) => last_err = Some(e),
                Err(e) => return Err(wrap(e)),
            }
        }
        let mut result = accepted.ok_or_else(|| wrap(last_err.expect("at least one witness was tried")))?;
        result.certificate.ldoubleprime_policy = policy.clone();
        radii.push(ldd_radius);
        attempts_per_stage.push(attempts);
        stages.push(result);
        inner_discs.push(ldd);
    }

    let mut telescoping = Vec::new();
    for n in 1..stages.len() {
        for m in 0..n {
            let sup_difference = max_abs_diff(&inner_discs[m], |z| stages[n].g.eval(z), |z| stages[m].g.eval(z));
            let bound: f64 = eps_schedule[m + 1..=n].iter().sum();
            telescoping.push(TelescopeCheck {
                earlier: m + 1,
                later: n + 1,
                sup_difference,
                bound,
                ok: sup_difference <= bound,
            });
        }
    }
    let all_pass = stages.iter().all(|s| s.certificate.pass) && telescoping.iter().all(|t| t.ok);
    Ok(ScheduleReport {
        summary: ScheduleSummary {
            stages: stages.len(),
            all_pass,
            eps_schedule: eps_schedule[..demands.len()].to_vec(),
            inner_disc_radii: radii,
            attempts_per_stage,
            telescoping,
            inner_disc_policy: policy,
        },
        stages,
    })
}

/// JSON form of a demand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DemandSpec {
    pub target: Polynomial,
    pub region: RegionSpec,
    pub s: u32,
}

/// JSON schedule configuration consumed by the `universal` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleConfig {
    #[serde(rename = "L")]
    pub l: RegionSpec,
    #[serde(rename = "Lprime")]
    pub l_prime: RegionSpec,
    pub demands: Vec<DemandSpec>,
    pub family: PadeIndexFamily,
    #[serde(default)]
    pub phi0: Option<Polynomial>,
    #[serde(default = "default_eps0")]
    pub eps0: f64,
    #[serde(default)]
    pub eps_schedule: Option<Vec<f64>>,
    #[serde(default)]
    pub options: ScheduleOptions,
}

fn default_eps0() -> f64 {
    0.02
}

impl ScheduleConfig {
    pub fn run(&self) -> Result<ScheduleReport> {
        let demands = self
            .demands
            .iter()
            .map(|d| Demand::new(d.target.clone(), make_region(&d.region)?, d.s))
            .collect::<Result<Vec<_>>>()?;
        let geometry = Geometry { l: make_region(&self.l)?, l_prime: make_region(&self.l_prime)? };
        let phi0 = self.phi0.clone().unwrap_or_else(|| Polynomial::zero(origin()));
        let eps = self
            .eps_schedule
            .clone()
            .unwrap_or_else(|| geometric_eps_schedule(self.eps0, demands.len()));
        run_schedule(&demands, &self.family, &geometry, &phi0, &eps, &self.options)
    }
}
