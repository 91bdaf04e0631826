use serde::{Deserialize, Serialize};

use super::MultiWarpedMetric;
use crate::factors::FactorManifold;
use crate::{Error, Result};

/// One factor of a boundary slice: its radius `fᵢ(t*)`, principal curvature
/// `κᵢ = sign · fᵢ'/fᵢ` and induced metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryBlock {
    pub radius: f64,
    pub kappa: f64,
    pub induced: FactorManifold,
}

/// Boundary geometry at one end of a warped region. `orientation` is the sign
/// of the outward normal relative to `∂t`; second fundamental forms use
/// `II(u, v) = g(∇_u ν, v)` with `ν` the outward normal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryData {
    pub t: f64,
    pub orientation: f64,
    pub blocks: Vec<BoundaryBlock>,
}

impl BoundaryData {
    /// A boundary with one round `S^dim` block of the given radius and
    /// principal curvature.
    pub fn round(dim: usize, radius: f64, kappa: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::input("principal curvature must be finite"));
        }
        Ok(BoundaryData {
            t: 0.0,
            orientation: 1.0,
            blocks: vec![BoundaryBlock {
                radius,
                kappa,
                induced: FactorManifold::round_sphere(dim, radius)?,
            }],
        })
    }

    /// The boundary of the same region after `g ↦ c² g`: radii scale by `c`,
    /// principal curvatures by `1/c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::input(format!("scale must be positive, got {c}")));
        }
        Ok(BoundaryData {
            t: self.t,
            orientation: self.orientation,
            blocks: self
                .blocks
                .iter()
                .map(|b| {
                    Ok(BoundaryBlock {
                        radius: b.radius * c,
                        kappa: b.kappa / c,
                        induced: b.induced.scaled(c)?,
                    })
                })
                .collect::<Result<_>>()?,
        })
    }

    pub fn min_kappa(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.kappa)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Boundary data of the slice `{t}` with the given outward orientation.
pub fn second_fundamental_form(
    metric: &MultiWarpedMetric,
    t: f64,
    orientation: f64,
) -> Result<BoundaryData> {
    if orientation != 1.0 && orientation != -1.0 {
        return Err(Error::input(format!(
            "orientation must be +1 or -1, got {orientation}"
        )));
    }
    metric.check_point(t)?;
    let blocks = metric
        .blocks()
        .iter()
        .map(|b| {
            let j = b.profile.eval(t)?;
            Ok(BoundaryBlock {
                radius: j.f,
                kappa: orientation * j.fp / j.f,
                induced: b.factor.scaled(j.f)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(BoundaryData {
        t,
        orientation,
        blocks,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlueBlock {
    pub radius_residual: f64,
    pub ricci_residual: f64,
    pub isometric: bool,
    pub ii_sum: f64,
}

/// Result of checking the two gluing hypotheses: the boundaries are
/// isometric, and the sum of their second fundamental forms is non-negative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlueVerdict {
    pub blocks: Vec<GlueBlock>,
    pub isometry_ok: bool,
    pub ii_sum_min: f64,
    pub tol: f64,
    pub pass: bool,
    pub sides: [BoundaryData; 2],
}

impl GlueVerdict {
    /// The verdict with the sides swapped back out, for comparisons that
    /// should not depend on argument order.
    pub fn outcome(&self) -> (&[GlueBlock], bool, f64, bool) {
        (&self.blocks, self.isometry_ok, self.ii_sum_min, self.pass)
    }
}

/// Compares two boundaries block by block. Blocks of different dimension or a
/// different block count are an isometry failure, not an error.
pub fn glue_check(b1: &BoundaryData, b2: &BoundaryData, tol: f64) -> GlueVerdict {
    let same_shape = b1.blocks.len() == b2.blocks.len()
        && b1
            .blocks
            .iter()
            .zip(&b2.blocks)
            .all(|(x, y)| x.induced.dim == y.induced.dim);
    let blocks: Vec<GlueBlock> = b1
        .blocks
        .iter()
        .zip(&b2.blocks)
        .map(|(x, y)| {
            let radius_residual = (x.radius - y.radius).abs();
            let (rx, ry) = (x.induced.ricci, y.induced.ricci);
            let ricci_residual = (rx.lo - ry.lo).abs().max((rx.hi - ry.hi).abs());
            GlueBlock {
                radius_residual,
                ricci_residual,
                isometric: x.induced.dim == y.induced.dim
                    && radius_residual <= tol
                    && ricci_residual <= tol,
                ii_sum: x.kappa + y.kappa,
            }
        })
        .collect();
    let isometry_ok = same_shape && blocks.iter().all(|b| b.isometric);
    let ii_sum_min = blocks.iter().map(|b| b.ii_sum).fold(f64::INFINITY, |m, s| {
        if s.is_nan() {
            f64::NAN
        } else {
            m.min(s)
        }
    });
    let ii_sum_min = if blocks.is_empty() {
        f64::NEG_INFINITY
    } else {
        ii_sum_min
    };
    GlueVerdict {
        pass: isometry_ok && ii_sum_min >= -tol,
        blocks,
        isometry_ok,
        ii_sum_min,
        tol,
        sides: [b1.clone(), b2.clone()],
    }
}
