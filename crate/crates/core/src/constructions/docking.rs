use std::f64::consts::FRAC_PI_2;

use super::{max_of, Check, Relation, ScenarioVerdict};
use crate::curvature::{ricci_report_with, Block, ClosureTag, MultiWarpedMetric, ReportOptions};
use crate::factors::FactorManifold;
use crate::numerics::{linspace, Interval};
use crate::profiles::{
    closed_form_profile, closure_check, docking_r_profile, parity_check, ClosedForm, Endpoint,
    Parity,
};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct DockingOptions {
    pub grid: usize,
    pub lambda: f64,
    /// Also require every component to equal `n` (the round sphere).
    pub check_round: bool,
    pub round_tol: f64,
}

impl Default for DockingOptions {
    fn default() -> Self {
        DockingOptions {
            grid: 2000,
            lambda: 0.0,
            check_round: true,
            round_tol: 1e-9,
        }
    }
}

/// The ambient metric `dt² + cos²t dx² + R(t)² g_{S^{n-1}}` on `[0, π/2]`
/// with `R = sin`, which is the round `S^{n+1}`.
pub fn docking_ambient(n: usize, opts: &DockingOptions) -> Result<ScenarioVerdict> {
    if n < 3 {
        return Err(Error::input(format!("need n >= 3, got {n}")));
    }
    let cos = closed_form_profile(
        ClosedForm::Cosine {
            amp: 1.0,
            freq: 1.0,
            phase: 0.0,
        },
        Interval::new(0.0, FRAC_PI_2),
    )?;
    let r = docking_r_profile()?;
    let metric = MultiWarpedMetric::new(
        Interval::new(0.0, FRAC_PI_2),
        vec![
            Block::new(FactorManifold::round_sphere(1, 1.0)?, cos.clone()),
            Block::new(FactorManifold::round_sphere(n - 1, 1.0)?, r.clone()),
        ],
        vec![
            ClosureTag {
                end: Endpoint::Left,
                block: 1,
            },
            ClosureTag {
                end: Endpoint::Right,
                block: 0,
            },
        ],
    )?;

    let mut v = ScenarioVerdict::new("docking");
    v.note("n", n.to_string());
    v.note("half_construction", "restriction to a hemisphere");
    v.note("symmetry", "Z/2 reflection");
    v.tolerance("round_tol", opts.round_tol);

    let r_start = closure_check(&r, Endpoint::Left, 1.0)?;
    let r_end = parity_check(&r, Endpoint::Right, Parity::Even, 3)?;
    v.push(Check::flag(
        "r_odd_at_0",
        "R is odd at t = 0 with R'(0) = 1",
        r_start.pass,
    ));
    v.push(Check::flag(
        "r_even_at_end",
        "R is even at t = pi/2",
        r_end.pass,
    ));
    let mut second = Vec::new();
    for t in linspace(0.0, FRAC_PI_2, 1001).into_iter().skip(1) {
        second.push(r.eval(t)?.fpp);
    }
    v.push(Check::new(
        "r_concave",
        "R'' < 0 on (0, pi/2]",
        max_of(second),
        Relation::Below,
        0.0,
    ));

    let mut ro = ReportOptions::new(opts.grid, Some(opts.lambda));
    ro.strict = true;
    let report = ricci_report_with(&metric, &ro)?;
    v.metric("global_min", report.global_min);
    v.metric("max_component_spread", report.spread());
    v.push(Check::new(
        "ricci_positive",
        "positive Ricci curvature on the ambient space",
        report.global_min,
        Relation::Above,
        opts.lambda,
    ));
    let expected = n as f64;
    let deviation = (report.global_min - expected)
        .abs()
        .max((report.global_max - expected).abs());
    v.metric("round_deviation", deviation);
    if opts.check_round {
        v.push(Check::new(
            "round_sphere",
            "dt^2 + cos^2 t dx^2 + sin^2 t ds^2 is the round sphere: Ric = n",
            deviation,
            Relation::AtMost,
            opts.round_tol,
        ));
        v.push(Check::new(
            "constant_curvature_spread",
            "Ricci components are constant over the grid",
            report.spread(),
            Relation::AtMost,
            opts.round_tol,
        ));
    }
    v.report("ricci", report);

    let certs = metric.closure_certificates()?;
    v.push(Check::flag(
        "closure_parity",
        "the sphere block closes at t = 0 and the circle block at t = pi/2",
        certs.iter().all(|c| c.pass),
    ));
    v.profile("R", r);
    v.profile("cos", cos);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_in_low_dimensions() {
        for n in [3, 4, 5] {
            let v = docking_ambient(n, &DockingOptions::default()).unwrap();
            for c in &v.checks {
                assert!(c.pass, "n = {n}: {c}");
            }
            assert!(v.metrics["max_component_spread"] <= 1e-9);
        }
    }

    #[test]
    fn impossible_target_fails() {
        let o = DockingOptions {
            lambda: 100.0,
            ..DockingOptions::default()
        };
        assert!(!docking_ambient(3, &o).unwrap().overall_pass);
        assert!(docking_ambient(2, &DockingOptions::default()).is_err());
    }
}
