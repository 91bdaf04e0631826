//! Closed factor manifolds, described only by the data the Ricci formulas of
//! a warped product consume.

use serde::{Deserialize, Serialize};

use crate::numerics::{unit_sphere_volume, Interval};
use crate::{Error, Result};

/// A closed Riemannian manifold `(F, g)` reduced to its dimension, the range
/// of `Ric^g(v, v)` over unit vectors `v`, and optionally its volume.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorManifold {
    pub name: String,
    pub dim: usize,
    pub ricci: Interval,
    pub volume: Option<f64>,
    /// Set only for round spheres; the radius of the sphere.
    pub round_radius: Option<f64>,
}

impl FactorManifold {
    /// The round sphere `S^dim` of the given radius.
    pub fn round_sphere(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::input("sphere dimension must be at least 1"));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::input(format!(
                "sphere radius must be positive, got {radius}"
            )));
        }
        let rho = (dim as f64 - 1.0) / (radius * radius);
        Ok(FactorManifold {
            name: format!("S^{dim}({radius})"),
            dim,
            ricci: Interval::point(rho),
            volume: Some(unit_sphere_volume(dim) * radius.powi(dim as i32)),
            round_radius: Some(radius),
        })
    }

    /// A factor known only through certified curvature (and volume) data.
    pub fn abstract_factor(
        name: impl Into<String>,
        dim: usize,
        ricci: Interval,
        volume: Option<f64>,
    ) -> Result<Self> {
        let f = FactorManifold {
            name: name.into(),
            dim,
            ricci,
            volume,
            round_radius: None,
        };
        f.validate()?;
        Ok(f)
    }

    /// Models `g ↦ c² g`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::input(format!("scale must be positive, got {c}")));
        }
        if c == 1.0 {
            return Ok(self.clone());
        }
        let c2 = c * c;
        let name = match self.round_radius {
            Some(r) if self.name == format!("S^{}({r})", self.dim) => {
                format!("S^{}({})", self.dim, r * c)
            }
            _ => self.name.clone(),
        };
        Ok(FactorManifold {
            name,
            dim: self.dim,
            ricci: Interval::new(self.ricci.lo / c2, self.ricci.hi / c2),
            volume: self.volume.map(|v| v * c.powi(self.dim as i32)),
            round_radius: self.round_radius.map(|r| r * c),
        })
    }

    /// Re-checks the type invariants.
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::input("factor dimension must be at least 1"));
        }
        let Interval { lo, hi } = self.ricci;
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::input("Ricci bounds must be finite"));
        }
        if lo > hi {
            return Err(Error::input(format!(
                "Ricci interval is not ordered: [{lo}, {hi}]"
            )));
        }
        if self.dim == 1 && (lo != 0.0 || hi != 0.0) {
            return Err(Error::input(
                "a 1-dimensional factor is Ricci-flat; its interval must be [0, 0]",
            ));
        }
        if let Some(v) = self.volume {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::input(format!("volume must be positive, got {v}")));
            }
        }
        if let Some(r) = self.round_radius {
            let rho = (self.dim as f64 - 1.0) / (r * r);
            let vol = unit_sphere_volume(self.dim) * r.powi(self.dim as i32);
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + b.abs());
            if !(close(lo, rho) && close(hi, rho)) {
                return Err(Error::input(format!(
                    "round sphere of radius {r} must have Ricci {rho}, got [{lo}, {hi}]"
                )));
            }
            if !self.volume.is_some_and(|v| close(v, vol)) {
                return Err(Error::input(format!(
                    "round sphere of radius {r} must have volume {vol}"
                )));
            }
        }
        Ok(())
    }

    pub fn is_einstein(&self) -> bool {
        self.ricci.is_point()
    }

    pub fn volume(&self) -> Result<f64> {
        self.volume
            .ok_or_else(|| Error::MissingData(format!("factor {} has no volume", self.name)))
    }
}
