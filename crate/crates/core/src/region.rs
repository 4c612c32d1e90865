//! Finite point clouds standing in for compact sets.
//!
//! Topological hypotheses (connected complement, lying outside the domain)
//! cannot be decided from samples; they travel with the region as
//! user assertions and are echoed into certificates.

use serde::{Deserialize, Serialize};

use crate::error::{PadeError, Result};
use crate::series::{c2, from_c2, is_finite, Complex};

/// Number of boundary samples added to every disc.
pub const DISC_BOUNDARY_SAMPLES: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RegionShape {
    Disc { center: [f64; 2], radius: f64, step: f64 },
    Segment { z0: [f64; 2], z1: [f64; 2], n_points: usize },
    Points { points: Vec<[f64; 2]> },
}

/// Region generator as it appears in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub label: String,
    #[serde(flatten)]
    pub shape: RegionShape,
    #[serde(default = "default_true")]
    pub asserted_connected_complement: bool,
    #[serde(default)]
    pub asserted_outside_omega: bool,
}

fn default_true() -> bool {
    true
}

impl RegionSpec {
    pub fn disc(label: &str, center: Complex, radius: f64, step: f64) -> Self {
        Self {
            label: label.into(),
            shape: RegionShape::Disc { center: c2(center), radius, step },
            asserted_connected_complement: true,
            asserted_outside_omega: false,
        }
    }

    pub fn segment(label: &str, z0: Complex, z1: Complex, n_points: usize) -> Self {
        Self {
            label: label.into(),
            shape: RegionShape::Segment { z0: c2(z0), z1: c2(z1), n_points },
            asserted_connected_complement: true,
            asserted_outside_omega: false,
        }
    }

    pub fn points(label: &str, points: &[Complex]) -> Self {
        Self {
            label: label.into(),
            shape: RegionShape::Points { points: points.iter().map(|&z| c2(z)).collect() },
            asserted_connected_complement: true,
            asserted_outside_omega: false,
        }
    }

    pub fn outside_omega(mut self, flag: bool) -> Self {
        self.asserted_outside_omega = flag;
        self
    }

    pub fn connected_complement(mut self, flag: bool) -> Self {
        self.asserted_connected_complement = flag;
        self
    }
}

/// A nonempty finite sample of a compact set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledCompact {
    label: String,
    points: Vec<Complex>,
    asserted_connected_complement: bool,
    asserted_outside_omega: bool,
}

impl SampledCompact {
    pub fn new(
        label: impl Into<String>,
        points: Vec<Complex>,
        asserted_connected_complement: bool,
        asserted_outside_omega: bool,
    ) -> Result<Self> {
        let label = label.into();
        if points.is_empty() {
            return Err(PadeError::EmptyRegion(label));
        }
        if points.iter().any(|z| !is_finite(*z)) {
            return Err(PadeError::InvalidRegion { label, reason: "non-finite sample point".into() });
        }
        Ok(Self { label, points, asserted_connected_complement, asserted_outside_omega })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn points(&self) -> &[Complex] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn asserted_connected_complement(&self) -> bool {
        self.asserted_connected_complement
    }

    pub fn asserted_outside_omega(&self) -> bool {
        self.asserted_outside_omega
    }

    pub fn centroid(&self) -> Complex {
        self.points.iter().sum::<Complex>() / self.points.len() as f64
    }

    /// Largest `|z|` over the sample.
    pub fn max_modulus(&self) -> f64 {
        self.points.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Union of two clouds under a new label; assertions are conjoined.
    pub fn union(&self, other: &Self, label: impl Into<String>) -> Self {
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        Self {
            label: label.into(),
            points,
            asserted_connected_complement: self.asserted_connected_complement
                && other.asserted_connected_complement,
            asserted_outside_omega: self.asserted_outside_omega && other.asserted_outside_omega,
        }
    }

    /// Smallest distance between a point of `self` and a point of `other`.
    pub fn min_distance(&self, other: &Self) -> f64 {
        self.points
            .iter()
            .flat_map(|a| other.points.iter().map(move |b| (a - b).norm()))
            .fold(f64::INFINITY, f64::min)
    }

    /// Every point must satisfy `|z - center| < radius` (a region meant to
    /// lie inside a disc-shaped domain).
    pub fn check_inside_disc(&self, center: Complex, radius: f64) -> Result<()> {
        match self.points.iter().find(|z| (*z - center).norm() >= radius) {
            Some(z) => Err(PadeError::InvalidRegion {
                label: self.label.clone(),
                reason: format!("point {z} is not inside the domain disc |z - {center}| < {radius}"),
            }),
            None => Ok(()),
        }
    }

    /// Every point must satisfy `|z - center| >= radius`.
    pub fn check_outside_disc(&self, center: Complex, radius: f64) -> Result<()> {
        match self.points.iter().find(|z| (*z - center).norm() < radius) {
            Some(z) => Err(PadeError::InvalidRegion {
                label: self.label.clone(),
                reason: format!("point {z} lies inside the domain disc |z - {center}| < {radius}"),
            }),
            None => Ok(()),
        }
    }
}

/// Deterministic point cloud for a generator description.
pub fn make_region(spec: &RegionSpec) -> Result<SampledCompact> {
    let invalid = |reason: String| PadeError::InvalidRegion { label: spec.label.clone(), reason };
    let points = match &spec.shape {
        RegionShape::Disc { center, radius, step } => {
            if !(radius.is_finite() && *radius > 0.0) {
                return Err(invalid(format!("radius must be positive, got {radius}")));
            }
            if !(step.is_finite() && *step > 0.0) {
                return Err(invalid(format!("grid step must be positive, got {step}")));
            }
            disc_points(from_c2(*center), *radius, *step)
        }
        RegionShape::Segment { z0, z1, n_points } => {
            if *n_points < 2 {
                return Err(invalid(format!("a segment needs at least 2 points, got {n_points}")));
            }
            let (a, b) = (from_c2(*z0), from_c2(*z1));
            let last = (*n_points - 1) as f64;
            (0..*n_points)
                .map(|k| if k + 1 == *n_points { b } else { a + (b - a) * (k as f64 / last) })
                .collect()
        }
        RegionShape::Points { points } => points.iter().map(|&p| from_c2(p)).collect(),
    };
    SampledCompact::new(
        spec.label.clone(),
        points,
        spec.asserted_connected_complement,
        spec.asserted_outside_omega,
    )
}

fn disc_points(center: Complex, radius: f64, step: f64) -> Vec<Complex> {
    let m = (radius / step + 1e-9).floor() as i64;
    let r2 = radius * radius * (1.0 + 1e-12);
    let mut pts = Vec::new();
    for i in -m..=m {
        for j in -m..=m {
            let (x, y) = (i as f64 * step, j as f64 * step);
            if x * x + y * y <= r2 {
                pts.push(center + Complex::new(x, y));
            }
        }
    }
    pts.extend((0..DISC_BOUNDARY_SAMPLES).map(|k| {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / DISC_BOUNDARY_SAMPLES as f64;
        center + Complex::from_polar(radius, theta)
    }));
    pts
}

/// True iff the clouds are farther apart than `margin`.
pub fn check_disjoint(a: &SampledCompact, b: &SampledCompact, margin: f64) -> Result<bool> {
    if !(margin.is_finite() && margin > 0.0) {
        return Err(PadeError::InvalidInput(format!("disjointness margin must be positive, got {margin}")));
    }
    Ok(a.min_distance(b) > margin)
}
