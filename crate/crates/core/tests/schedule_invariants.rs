mod common;

use std::sync::OnceLock;

use common::c;
use pade_core::analysis::sup_distance;
use pade_core::universal::{geometric_eps_schedule, inner_disc, run_schedule, ScheduleOptions, ScheduleReport};
use pade_core::{pade_linear_solve, Polynomial, TolerancePolicy};

fn two_stage() -> &'static ScheduleReport {
    static REPORT: OnceLock<ScheduleReport> = OnceLock::new();
    REPORT.get_or_init(|| {
        run_schedule(
            &common::demands(),
            &common::witness_family(),
            &common::geometry(),
            &Polynomial::zero(c(0.0, 0.0)),
            &geometric_eps_schedule(0.02, 2),
            &ScheduleOptions::default(),
        )
        .expect("two-stage schedule certifies")
    })
}

#[test]
fn every_stage_has_exact_degree() {
    for s in &two_stage().stages {
        assert_eq!(s.g.degree(), Some(s.pq.p));
        assert!(s.d_used.norm() > 0.0);
        assert!(s.fit_degree < s.pq.p);
    }
}

#[test]
fn approximants_reproduce_stage_function_inside_domain() {
    let geometry = common::geometry();
    let tol = TolerancePolicy::default();
    let report = two_stage();
    for (n, s) in report.stages.iter().enumerate() {
        let (ldd, _) = inner_disc(n + 1, &geometry.l, &geometry.l_prime, &ScheduleOptions::default()).unwrap();
        for &zeta in geometry.l.points() {
            let series = s.g.taylor_series(zeta, s.pq.p + s.pq.q);
            let r = pade_linear_solve(&series, s.pq, &tol).unwrap();
            for region in [&geometry.l, &geometry.l_prime, &ldd] {
                let d = sup_distance(&r, &s.g, region).unwrap();
                assert!(d < 1e-8, "stage {} zeta {zeta} region {}: {d:e}", n + 1, region.label());
            }
        }
    }
}

#[test]
fn exact_degree_discrepancy_within_roundoff_on_every_region() {
    for s in &two_stage().stages {
        for check in &s.certificate.exact_degree {
            assert!(
                check.sup_discrepancy <= check.roundoff_bound,
                "{}: {:e} > {:e}",
                check.region,
                check.sup_discrepancy,
                check.roundoff_bound
            );
        }
    }
}

#[test]
fn budget_components_bound_error_on_k() {
    for s in &two_stage().stages {
        let b = &s.certificate.budget;
        assert!(b.fit_error_on_k + b.perturbation_bound_on_k + b.approximant_discrepancy_on_k >= s.certificate.err_on_k);
        assert!(b.total >= s.certificate.err_on_k);
        assert!(s.certificate.err_on_k < 0.01);
    }
}

#[test]
fn telescoping_audit_holds() {
    let report = two_stage();
    assert_eq!(report.summary.telescoping.len(), 1);
    let t = &report.summary.telescoping[0];
    assert!(t.ok && t.sup_difference <= t.bound);
    assert_eq!((t.earlier, t.later), (1, 2));
}

#[test]
fn stage_two_stays_close_on_first_disc() {
    let geometry = common::geometry();
    let report = two_stage();
    let (ldd1, _) = inner_disc(1, &geometry.l, &geometry.l_prime, &ScheduleOptions::default()).unwrap();
    let drift = ldd1
        .points()
        .iter()
        .map(|&z| (report.stages[1].g.eval(z) - report.stages[0].g.eval(z)).norm())
        .fold(0.0, f64::max);
    assert!(drift < 0.01);
}

#[test]
fn certificates_echo_thresholds_and_regions() {
    let report = two_stage();
    let json = serde_json::to_value(report).unwrap();
    let cert = &json["stages"][0]["certificate"];
    assert_eq!(cert["thresholds"]["s"], 100);
    assert_eq!(cert["thresholds"]["one_over_s"], 0.01);
    assert_eq!(cert["thresholds"]["eps_stage"], 0.01);
    let labels: Vec<&str> = cert["regions"].as_array().unwrap().iter().map(|r| r["label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["L", "L'", "K", "L''_1"]);
    assert_eq!(cert["regions"][2]["asserted_outside_omega"], true);
    assert!(cert["ldoubleprime_policy"].as_str().unwrap().contains("centroid"));
    assert_eq!(cert["membership"].as_array().unwrap().len(), 26);
}
