//! Padé approximants of truncated power series, rational analysis on
//! sampled regions, and a constructive builder for universal Padé
//! approximants on the unit disc.

// `!(x < y)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod commands;
pub mod error;
pub mod linalg;
pub mod pade;
pub mod region;
pub mod series;
pub mod universal;

pub use analysis::{near_common_zero, poles, rat_eval, sup_distance, Evaluation, PoleSet};
pub use error::{PadeError, Result};
pub use pade::{
    membership, pade_jacobi, pade_linear_solve, separation_bound, HankelReport, HankelWarning, PadeIndex,
    PadeIndexFamily, RationalApproximant, TolerancePolicy,
};
pub use region::{check_disjoint, make_region, RegionShape, RegionSpec, SampledCompact};
pub use series::{taylor_of_rational, Complex, Polynomial, TruncatedSeries};
pub use universal::{
    choose_index, fit_polynomial, glue_target, perturb_and_certify, run_schedule, Demand, ScheduleConfig,
    StageResult, UniversalityCertificate,
};
