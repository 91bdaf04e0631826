//! Named constructions assembled from factors, profiles and curvature
//! checks. Each scenario returns a [`ScenarioVerdict`]: a list of named,
//! thresholded checks plus the metrics, reports and profiles behind them.
//!
//! Scenarios are pure functions of their arguments. Grids are fixed and every
//! reduction runs in grid order, so equal inputs give bit-identical verdicts.

mod collar;
mod docking;
mod gn;
mod limit;
mod neck;
mod sha_yang;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::curvature::{BoundaryData, RicciReport};
use crate::profiles::WarpProfile;
use crate::{Error, Result};

pub use collar::{collar_candidate, collar_closability, CollarOptions};
pub use docking::{docking_ambient, DockingOptions};
pub use gn::{gn_regions, GnOptions};
pub use limit::{boundary_gluing, hemisphere_doubling, limit_space_hypotheses, LimitOptions};
pub use neck::{neck_family_check, NeckOptions};
pub use sha_yang::{cone_asymptotics, sha_yang_space, ShaYangOptions};

/// How a measured value is compared with its threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = ">")]
    Above,
}

impl Relation {
    /// NaN never satisfies a relation.
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Relation::AtMost => value <= threshold,
            Relation::Below => value < threshold,
            Relation::AtLeast => value >= threshold,
            Relation::Above => value > threshold,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::AtMost => "<=",
            Relation::Below => "<",
            Relation::AtLeast => ">=",
            Relation::Above => ">",
        })
    }
}

/// One hypothesis check: `value relation threshold`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The mathematical statement being checked.
    pub anchor: String,
    pub value: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        anchor: impl Into<String>,
        value: f64,
        relation: Relation,
        threshold: f64,
    ) -> Self {
        Check {
            name: name.into(),
            anchor: anchor.into(),
            value,
            relation,
            threshold,
            pass: relation.holds(value, threshold),
        }
    }

    /// A yes/no check, recorded as `1 >= 1` or `0 >= 1`.
    pub fn flag(name: impl Into<String>, anchor: impl Into<String>, ok: bool) -> Self {
        Check::new(
            name,
            anchor,
            if ok { 1.0 } else { 0.0 },
            Relation::AtLeast,
            1.0,
        )
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: {:e} {} {:e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.relation,
            self.threshold
        )
    }
}

/// Outcome of one scenario run.
#[derive(Clone, Debug, Serialize)]
pub struct ScenarioVerdict {
    pub scenario: String,
    pub checks: Vec<Check>,
    /// Conjunction of all checks.
    pub overall_pass: bool,
    pub metrics: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, f64>,
    /// Bookkeeping that carries no geometry: symmetry tags, counts, notes.
    pub metadata: BTreeMap<String, String>,
    pub reports: BTreeMap<String, RicciReport>,
    #[serde(skip)]
    pub profiles: Vec<(String, WarpProfile)>,
}

impl ScenarioVerdict {
    pub fn new(scenario: impl Into<String>) -> Self {
        ScenarioVerdict {
            scenario: scenario.into(),
            checks: Vec::new(),
            overall_pass: true,
            metrics: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            metadata: BTreeMap::new(),
            reports: BTreeMap::new(),
            profiles: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.overall_pass &= check.pass;
        self.checks.push(check);
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.insert(name.into(), value);
    }

    pub fn tolerance(&mut self, name: impl Into<String>, value: f64) {
        self.tolerances.insert(name.into(), value);
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.metadata.insert(key.into(), value.into());
    }

    pub fn report(&mut self, name: impl Into<String>, report: RicciReport) {
        self.reports.insert(name.into(), report);
    }

    pub fn profile(&mut self, name: impl Into<String>, profile: WarpProfile) {
        self.profiles.push((name.into(), profile));
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Recomputes `overall_pass` from the checks.
    pub fn recompute(&mut self) -> bool {
        self.overall_pass = self.checks.iter().all(|c| c.pass);
        self.overall_pass
    }
}

/// A piece of a construction taken as given: boundary data and curvature
/// bounds certified by an external result rather than computed here.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedBlock {
    pub label: String,
    pub boundary: BoundaryData,
    pub interior_ricci_min: f64,
    pub volume: Option<f64>,
    /// Which external result the data rests on.
    pub note: String,
}

impl CertifiedBlock {
    pub fn new(
        label: impl Into<String>,
        boundary: BoundaryData,
        interior_ricci_min: f64,
        volume: Option<f64>,
        note: impl Into<String>,
    ) -> Result<Self> {
        if boundary.blocks.is_empty() {
            return Err(Error::input("certified block needs boundary data"));
        }
        if let Some(b) = boundary.blocks.iter().find(|b| !(b.radius > 0.0)) {
            return Err(Error::input(format!(
                "boundary radii must be positive, got {}",
                b.radius
            )));
        }
        if !interior_ricci_min.is_finite() {
            return Err(Error::input("interior Ricci minimum must be finite"));
        }
        if let Some(v) = volume {
            if !(v > 0.0) {
                return Err(Error::input(format!("volume must be positive, got {v}")));
            }
        }
        Ok(CertifiedBlock {
            label: label.into(),
            boundary,
            interior_ricci_min,
            volume,
            note: note.into(),
        })
    }

    /// A core with round boundary `S^dim` of the given radius and principal
    /// curvature `kappa`.
    pub fn round_core(
        label: impl Into<String>,
        dim: usize,
        radius: f64,
        kappa: f64,
        interior_ricci_min: f64,
    ) -> Result<Self> {
        CertifiedBlock::new(
            label,
            BoundaryData::round(dim, radius, kappa)?,
            interior_ricci_min,
            None,
            "core metric with round convex boundary, assumed",
        )
    }

    /// Single round boundary component of radius `radius`, if that is what
    /// this block has.
    pub(crate) fn round_boundary(&self, radius: f64) -> Option<&crate::curvature::BoundaryBlock> {
        match self.boundary.blocks.as_slice() {
            [b] if b.induced.round_radius.is_some_and(|r| {
                (r - radius).abs() <= 1e-12 && (b.radius - radius).abs() <= 1e-12
            }) =>
            {
                Some(b)
            }
            _ => None,
        }
    }
}

/// `max |x|` over a sample, NaN-propagating.
pub(crate) fn sup<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().fold(0.0, |m, v| {
        if v.is_nan() || m.is_nan() {
            f64::NAN
        } else {
            m.max(v.abs())
        }
    })
}

/// Smallest element, NaN-propagating.
pub(crate) fn min_of<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values
        .into_iter()
        .fold(f64::INFINITY, crate::curvature::nan_min)
}

/// Largest element, NaN-propagating.
pub(crate) fn max_of<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    -min_of(values.into_iter().map(|v| -v))
}
