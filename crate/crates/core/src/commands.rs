//! The operations behind the `pade`, `table`, `poles` and `universal`
//! subcommands. Each returns a JSON document; the front ends only handle
//! files, flags and exit codes.

use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{near_common_zero, poles, PoleSet};
use crate::error::{PadeError, Result};
use crate::pade::{
    membership, pade_jacobi, pade_linear_solve, route_discrepancy, separation_bound, HankelReport, PadeIndex,
    PadeIndexFamily, TolerancePolicy, JACOBI_MAX_Q,
};
use crate::region::SampledCompact;
use crate::series::{c2, Complex, TruncatedSeries};
use crate::universal::{ScheduleConfig, ScheduleReport};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Poles of different indices closer than this are grouped together.
pub const POLE_CLUSTER_RADIUS: f64 = 0.05;

/// Seed and tolerance shared by every command.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunConfig {
    pub tol: TolerancePolicy,
    pub seed: u64,
}

impl RunConfig {
    fn header(&self, operation: &str) -> Value {
        json!({
            "operation": operation,
            "tool_version": TOOL_VERSION,
            "seed": self.seed,
            "tol_rel": self.tol.tol_rel,
            "near_degenerate_rel": self.tol.near_degenerate_rel,
        })
    }
}

fn merge(mut head: Value, body: Value) -> Value {
    if let (Value::Object(h), Value::Object(b)) = (&mut head, body) {
        h.extend(b);
    }
    head
}

fn require_order(s: &TruncatedSeries, needed: usize) -> Result<()> {
    if s.order() < needed {
        return Err(PadeError::InsufficientOrder { required: needed });
    }
    Ok(())
}

/// Approximant at a single index with both construction routes compared.
pub fn cmd_pade(s: &TruncatedSeries, idx: PadeIndex, region: Option<&SampledCompact>, cfg: &RunConfig) -> Result<Value> {
    let label = region.map(SampledCompact::label);
    let ctx = |e: PadeError| e.context("pade", Some(idx), label);
    require_order(s, idx.p + idx.q).map_err(ctx)?;
    let report = membership(s, idx, &cfg.tol).map_err(ctx)?;
    if !report.member {
        return Err(ctx(PadeError::NotInExistenceClass {
            p: idx.p,
            q: idx.q,
            det_abs: report.det.norm(),
            scale: report.scale,
        }));
    }
    let solved = pade_linear_solve(s, idx, &cfg.tol).map_err(ctx)?;
    let (jacobi, discrepancy, jacobi_note) = if idx.q <= JACOBI_MAX_Q {
        let j = pade_jacobi(s, idx, &cfg.tol).map_err(ctx)?;
        let d = route_discrepancy(&solved, &j);
        (Some(j), Some(d), None)
    } else {
        (None, None, Some(format!("jacobi route skipped for q > {JACOBI_MAX_Q}")))
    };
    let separation = match region {
        Some(r) => Some(json!({ "region": r.label(), "value": separation_bound(&solved, r).map_err(ctx)? })),
        None => None,
    };
    let body = json!({
        "index": idx,
        "center": c2(s.center()),
        "hankel": report,
        "approximant": solved,
        "jacobi": jacobi,
        "jacobi_note": jacobi_note,
        "route_discrepancy": discrepancy,
        "near_common_zero": near_common_zero(&solved).map_err(ctx)?,
        "poles": poles(&solved).map_err(ctx)?,
        "separation_bound": separation,
    });
    Ok(merge(cfg.header("pade"), body))
}

#[derive(Debug, Clone, Serialize)]
struct TableCell {
    p: usize,
    q: usize,
    report: HankelReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    poles: Option<PoleSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

/// Membership grid over `0..=p_max` by `0..=q_max`, row index `p`.
pub fn cmd_table(s: &TruncatedSeries, p_max: usize, q_max: usize, with_poles: bool, cfg: &RunConfig) -> Result<Value> {
    require_order(s, p_max + q_max).map_err(|e| e.context("table", Some(PadeIndex::new(p_max, q_max)), None))?;
    let mut grid = Vec::with_capacity(p_max + 1);
    for p in 0..=p_max {
        let mut row = Vec::with_capacity(q_max + 1);
        for q in 0..=q_max {
            let idx = PadeIndex::new(p, q);
            let report = membership(s, idx, &cfg.tol).map_err(|e| e.context("table", Some(idx), None))?;
            let (poles_out, error) = if with_poles && report.member {
                match pade_linear_solve(s, idx, &cfg.tol).and_then(|r| poles(&r)) {
                    Ok(ps) => (Some(ps), None),
                    Err(e) => (None, Some(e.to_string())),
                }
            } else {
                (None, None)
            };
            row.push(TableCell { p, q, report, poles: poles_out, error });
        }
        grid.push(row);
    }
    let body = json!({
        "center": c2(s.center()),
        "p_max": p_max,
        "q_max": q_max,
        "grid": grid,
    });
    Ok(merge(cfg.header("table"), body))
}

#[derive(Debug, Clone, Serialize)]
pub struct PoleCluster {
    #[serde(serialize_with = "ser_c2")]
    pub centroid: Complex,
    pub count: usize,
    pub indices: Vec<PadeIndex>,
    /// Seen at two or more distinct indices.
    pub recurring: bool,
}

fn ser_c2<S: serde::Serializer>(z: &Complex, s: S) -> std::result::Result<S::Ok, S::Error> {
    c2(*z).serialize(s)
}

/// Greedy single-link grouping of `(index, pole)` pairs in input order.
pub fn cluster_poles(tagged: &[(PadeIndex, Complex)], radius: f64) -> Vec<PoleCluster> {
    let mut groups: Vec<(Vec<Complex>, Vec<PadeIndex>)> = Vec::new();
    for &(idx, z) in tagged {
        match groups.iter_mut().find(|(pts, _)| pts.iter().any(|w| (w - z).norm() <= radius)) {
            Some((pts, ids)) => {
                pts.push(z);
                ids.push(idx);
            }
            None => groups.push((vec![z], vec![idx])),
        }
    }
    groups
        .into_iter()
        .map(|(pts, mut ids)| {
            let centroid = pts.iter().sum::<Complex>() / pts.len() as f64;
            ids.dedup();
            PoleCluster { centroid, count: pts.len(), recurring: ids.len() > 1, indices: ids }
        })
        .collect()
}

/// Pole sets along every family member; failures are recorded per index.
pub fn cmd_poles(s: &TruncatedSeries, family: &PadeIndexFamily, cfg: &RunConfig) -> Result<Value> {
    let mut entries = Vec::with_capacity(family.members().len());
    let mut tagged = Vec::new();
    for &idx in family.members() {
        let outcome = require_order(s, idx.p + idx.q)
            .and_then(|_| pade_linear_solve(s, idx, &cfg.tol))
            .and_then(|r| poles(&r));
        match outcome {
            Ok(ps) => {
                tagged.extend(ps.poles.iter().map(|&z| (idx, z)));
                entries.push(json!({ "index": idx, "poles": ps }));
            }
            Err(e) => {
                let e = e.context("poles", Some(idx), None);
                entries.push(json!({ "index": idx, "error": e.to_string(), "exit_code": e.exit_code() }));
            }
        }
    }
    let body = json!({
        "center": c2(s.center()),
        "trajectory": entries,
        "stability": {
            "radius": POLE_CLUSTER_RADIUS,
            "clusters": cluster_poles(&tagged, POLE_CLUSTER_RADIUS),
        },
    });
    Ok(merge(cfg.header("poles"), body))
}

/// Runs a schedule and packages certificates plus per-region error fields.
pub fn cmd_universal(config: &ScheduleConfig, cfg: &RunConfig) -> Result<Value> {
    let mut config = config.clone();
    config.options.tol = cfg.tol;
    let report: ScheduleReport = config.run().map_err(|e| e.context("universal", None, None))?;
    let plot: Vec<Value> = report
        .stages
        .iter()
        .enumerate()
        .map(|(i, s)| json!({ "stage": i + 1, "index": s.pq, "fields": s.fields }))
        .collect();
    let body = json!({
        "stages": report.stages,
        "summary": report.summary,
        "plot": plot,
    });
    Ok(merge(cfg.header("universal"), body))
}

/// JSON error document written when a command fails.
pub fn error_document(operation: &str, err: &PadeError, cfg: &RunConfig) -> Value {
    let body = json!({
        "error": err.to_string(),
        "exit_code": err.exit_code(),
        "certificate": err.certificate(),
    });
    merge(cfg.header(operation), body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::{make_region, RegionSpec};

    fn geometric(n: usize) -> TruncatedSeries {
        TruncatedSeries::from_real(Complex::new(0.0, 0.0), &vec![1.0; n + 1]).unwrap()
    }

    fn exp_prefix(n: usize) -> TruncatedSeries {
        let mut f = 1.0;
        let coeffs: Vec<f64> = (0..=n)
            .map(|v| {
                if v > 0 {
                    f /= v as f64;
                }
                f
            })
            .collect();
        TruncatedSeries::from_real(Complex::new(0.0, 0.0), &coeffs).unwrap()
    }

    #[test]
    fn pade_geometric_zero_one() {
        let out = cmd_pade(&geometric(8), PadeIndex::new(0, 1), None, &RunConfig::default()).unwrap();
        assert_eq!(out["approximant"]["num"]["coeffs"], json!([[1.0, 0.0]]));
        assert_eq!(out["approximant"]["den"]["coeffs"], json!([[1.0, 0.0], [-1.0, 0.0]]));
        assert!(out["route_discrepancy"].as_f64().unwrap() < 1e-12);
        assert_eq!(out["operation"], "pade");
    }

    #[test]
    fn pade_q_zero_is_partial_sum() {
        let s = exp_prefix(6);
        let out = cmd_pade(&s, PadeIndex::new(3, 0), None, &RunConfig::default()).unwrap();
        let coeffs = out["approximant"]["num"]["coeffs"].as_array().unwrap();
        assert_eq!(coeffs.len(), 4);
        for (v, c) in coeffs.iter().enumerate() {
            assert_eq!(c[0].as_f64().unwrap(), s.coeffs()[v].re);
        }
        assert!(out["poles"]["poles"].as_array().unwrap().is_empty());
    }

    #[test]
    fn pade_reports_required_order() {
        let s = TruncatedSeries::from_real(Complex::new(0.0, 0.0), &[1.0, 1.0, 1.0]).unwrap();
        let err = cmd_pade(&s, PadeIndex::new(2, 2), None, &RunConfig::default()).unwrap_err();
        assert!(matches!(
            err,
            PadeError::Context { ref source, .. } if matches!(**source, PadeError::InsufficientOrder { required: 4 })
        ));
        assert!(err.to_string().contains("[2/2]"));
        assert_eq!(err.exit_code(), crate::error::exit::INPUT);
    }

    #[test]
    fn pade_non_member_is_numerical_failure() {
        let err = cmd_pade(&geometric(8), PadeIndex::new(2, 2), None, &RunConfig::default()).unwrap_err();
        assert_eq!(err.exit_code(), crate::error::exit::NUMERICAL);
    }

    #[test]
    fn pade_separation_on_region() {
        let k = make_region(&RegionSpec::segment("K", Complex::new(2.0, 0.0), Complex::new(3.0, 0.0), 11)).unwrap();
        let out = cmd_pade(&geometric(8), PadeIndex::new(0, 1), Some(&k), &RunConfig::default()).unwrap();
        // min over [2,3] of 1 + (1-x)^2 is 2, at x = 2
        assert!((out["separation_bound"]["value"].as_f64().unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(out["separation_bound"]["region"], "K");
    }

    fn member_grid(out: &Value) -> Vec<Vec<bool>> {
        out["grid"]
            .as_array()
            .unwrap()
            .iter()
            .map(|row| row.as_array().unwrap().iter().map(|c| c["report"]["member"].as_bool().unwrap()).collect())
            .collect()
    }

    #[test]
    fn table_geometric_pattern() {
        let out = cmd_table(&geometric(6), 3, 3, false, &RunConfig::default()).unwrap();
        let grid = member_grid(&out);
        for (p, row) in grid.iter().enumerate() {
            for (q, &m) in row.iter().enumerate() {
                assert_eq!(m, !(p >= 1 && q >= 2), "cell ({p},{q})");
            }
        }
    }

    #[test]
    fn table_exp_all_members() {
        let out = cmd_table(&exp_prefix(6), 1, 1, true, &RunConfig::default()).unwrap();
        assert!(member_grid(&out).iter().flatten().all(|&m| m));
        assert_eq!(out["grid"][1][1]["poles"]["poles"].as_array().unwrap().len(), 1);
        let q0 = cmd_table(&exp_prefix(6), 4, 0, false, &RunConfig::default()).unwrap();
        assert!(member_grid(&q0).iter().flatten().all(|&m| m));
        assert!(cmd_table(&exp_prefix(3), 2, 2, false, &RunConfig::default()).is_err());
    }

    #[test]
    fn poles_of_geometric_family() {
        let family = PadeIndexFamily::from_members((0..=5).map(|p| PadeIndex::new(p, 1)).collect()).unwrap();
        let out = cmd_poles(&geometric(10), &family, &RunConfig::default()).unwrap();
        for entry in out["trajectory"].as_array().unwrap() {
            let ps = entry["poles"]["poles"].as_array().unwrap();
            assert_eq!(ps.len(), 1);
            assert!((ps[0][0].as_f64().unwrap() - 1.0).abs() < 1e-8 && ps[0][1].as_f64().unwrap().abs() < 1e-8);
        }
        let clusters = out["stability"]["clusters"].as_array().unwrap();
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0]["count"], 6);
        assert_eq!(clusters[0]["recurring"], true);
    }

    #[test]
    fn poles_records_errors_inline() {
        let family = PadeIndexFamily::from_members(vec![PadeIndex::new(0, 1), PadeIndex::new(3, 2), PadeIndex::new(40, 1)]).unwrap();
        let out = cmd_poles(&geometric(10), &family, &RunConfig::default()).unwrap();
        let t = out["trajectory"].as_array().unwrap();
        assert!(t[0].get("poles").is_some());
        assert!(t[1]["error"].as_str().unwrap().contains("[3/2]"));
        assert!(t[2]["error"].as_str().unwrap().contains("[40/1]"));
    }

    #[test]
    fn poles_entire_function_q_zero() {
        let family = PadeIndexFamily::from_members((0..=4).map(|p| PadeIndex::new(p, 0)).collect()).unwrap();
        let out = cmd_poles(&exp_prefix(8), &family, &RunConfig::default()).unwrap();
        assert!(out["stability"]["clusters"].as_array().unwrap().is_empty());
    }

    #[test]
    fn clustering_separates_far_poles() {
        let a = PadeIndex::new(1, 1);
        let b = PadeIndex::new(2, 1);
        let got = cluster_poles(
            &[(a, Complex::new(1.0, 0.0)), (b, Complex::new(1.01, 0.0)), (b, Complex::new(-1.0, 0.0))],
            0.05,
        );
        assert_eq!(got.len(), 2);
        assert!(got[0].recurring && !got[1].recurring);
    }

    #[test]
    fn output_is_reproducible() {
        let cfg = RunConfig { seed: 7, ..Default::default() };
        let a = serde_json::to_string(&cmd_table(&exp_prefix(8), 3, 3, true, &cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&cmd_table(&exp_prefix(8), 3, 3, true, &cfg).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"seed\":7"));
    }
}
