//! Warped-product Riemannian metrics and machine-checkable curvature reports.
//!
//! A metric here always has the shape `dt² + Σ fᵢ(t)² gᵢ` over an interval,
//! where each `gᵢ` is a closed factor manifold known only through its
//! dimension, the range of its Ricci curvature on unit vectors and
//! (optionally) its volume. The crate is layered bottom-up:
//!
//! - [`factors`]: the factor manifolds `gᵢ`.
//! - [`profiles`]: warping functions `fᵢ` (closed forms, ODE solutions,
//!   splices, mollifications) with first and second derivatives.
//! - [`curvature`]: Ricci components, slice second fundamental forms,
//!   volumes and gluing checks, with an independent finite-difference path.
//! - [`constructions`]: named scenarios (collapsed cones, necks, collars,
//!   doubled regions, ambient spheres) that turn the above into verdicts.
//!
//! Numerical helpers that the rest of the crate leans on (adaptive
//! quadrature, double-double arithmetic, truncated power series) live in
//! [`numerics`].

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constructions;
pub mod curvature;
pub mod error;
pub mod factors;
pub mod numerics;
pub mod profiles;

pub use error::{Error, Result};

/// Radius of the exclusion zone around smooth-closure points.
///
/// The Ricci formulas divide by the warping function, so they are not
/// evaluated closer than this to an endpoint where a block collapses;
/// smoothness there is certified by parity checks instead.
pub const T_MIN: f64 = 1e-3;
