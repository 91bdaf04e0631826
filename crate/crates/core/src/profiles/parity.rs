use serde::{Deserialize, Serialize};

use super::{Endpoint, Parity, ParityTag, WarpProfile};
use crate::numerics::fd_weights;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParityCondition {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParityReport {
    pub endpoint: Endpoint,
    pub parity: Parity,
    pub order: u8,
    pub t: f64,
    /// `f'(t*)`.
    pub slope: f64,
    /// `"series"` when derivatives came from a stored expansion, `"analytic"`
    /// for closed forms, otherwise `"profile"` (jet plus one-sided differences
    /// of `f''`).
    pub source: String,
    pub conditions: Vec<ParityCondition>,
    pub pass: bool,
}

const FD_POINTS: usize = 8;

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `f, f', …, f^(5)` at the endpoint and the tolerances that apply to each.
fn derivatives(p: &WarpProfile, end: Endpoint) -> ([f64; 6], [f64; 6], &'static str) {
    let t = p.endpoint(end);
    let base_tol = p
        .solver_meta()
        .map_or(1e-12, |m| (100.0 * m.tol).max(1e-12));
    if let Some(ParityTag {
        series: Some(c), ..
    }) = p.parity_tag(end)
    {
        let mut d = [0.0; 6];
        for (k, dk) in d.iter_mut().enumerate() {
            *dk = c.get(k).copied().unwrap_or(0.0) * factorial(k);
        }
        return (d, [base_tol; 6], "series");
    }
    if let Some(d) = p.exact_derivatives(t) {
        let scale = 1f64.max(d[0].abs()).max(d[1].abs()).max(d[2].abs());
        return (d, [1e-12 * scale; 6], "analytic");
    }
    let j = p.jet(t);
    let len = p.domain().len();
    let sigma = match end {
        Endpoint::Left => 1.0,
        Endpoint::Right => -1.0,
    };
    let delta = 5e-3 * len.min(1.0);
    let nodes: Vec<f64> = (0..FD_POINTS)
        .map(|i| t + sigma * delta * i as f64)
        .collect();
    let g: Vec<f64> = nodes.iter().map(|&x| p.jet(x).fpp).collect();
    let w = fd_weights(t, &nodes, 3);
    let dg = |k: usize| w[k].iter().zip(&g).map(|(a, b)| a * b).sum::<f64>();
    let scale = 1f64.max(j.fp.abs()).max(j.fpp.abs());
    let fd_tol = 1e-6 * scale / len.min(1.0).powi(3);
    (
        [j.f, j.fp, j.fpp, dg(1), dg(2), dg(3)],
        [base_tol, base_tol, base_tol, fd_tol, fd_tol, fd_tol],
        "profile",
    )
}

fn condition(name: &str, measured: f64, tolerance: f64) -> ParityCondition {
    ParityCondition {
        name: name.to_string(),
        measured,
        tolerance,
        pass: measured.abs() <= tolerance,
    }
}

/// Checks that the derivatives of the wrong parity vanish at an endpoint:
/// `f, f'', f''''` for odd and `f', f''', f^(5)` for even, up to `order`
/// conditions.
pub fn parity_check(
    p: &WarpProfile,
    end: Endpoint,
    parity: Parity,
    order: u8,
) -> Result<ParityReport> {
    if !(1..=3).contains(&order) {
        return Err(Error::input(format!(
            "order must be 1, 2 or 3, got {order}"
        )));
    }
    let (d, tol, source) = derivatives(p, end);
    let (names, first) = match parity {
        Parity::Odd => (["f", "f''", "f''''"], 0),
        Parity::Even => (["f'", "f'''", "f^(5)"], 1),
    };
    let conditions: Vec<ParityCondition> = (0..order as usize)
        .map(|i| {
            let k = first + 2 * i;
            condition(names[i], d[k], tol[k])
        })
        .collect();
    let pass = conditions.iter().all(|c| c.pass);
    Ok(ParityReport {
        endpoint: end,
        parity,
        order,
        t: p.endpoint(end),
        slope: d[1],
        source: source.to_string(),
        conditions,
        pass,
    })
}

/// Odd parity of order 2 plus `|f'(t*)| = slope`: the smooth-closure
/// condition for a collapsing round factor of radius `1/slope`.
pub fn closure_check(p: &WarpProfile, end: Endpoint, slope: f64) -> Result<ParityReport> {
    let mut report = parity_check(p, end, Parity::Odd, 2)?;
    let tol = report.conditions[0].tolerance;
    report
        .conditions
        .push(condition("|f'| - slope", report.slope.abs() - slope, tol));
    report.pass = report.conditions.iter().all(|c| c.pass);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Interval;
    use crate::profiles::{closed_form_profile, k_profile, sha_yang_profiles, ClosedForm};
    use std::f64::consts::PI;

    #[test]
    fn sine_is_odd_at_zero() {
        let p = closed_form_profile(
            ClosedForm::Sine {
                amp: 1.0,
                freq: 1.0,
                phase: 0.0,
            },
            Interval::new(0.0, PI),
        )
        .unwrap();
        let r = parity_check(&p, Endpoint::Left, Parity::Odd, 2).unwrap();
        assert!(r.pass);
        assert!(r.conditions.iter().all(|c| c.measured.abs() <= 1e-12));
        assert!(
            parity_check(&p, Endpoint::Left, Parity::Odd, 3)
                .unwrap()
                .pass
        );
        assert!(closure_check(&p, Endpoint::Right, 1.0).unwrap().pass);
    }

    #[test]
    fn linear_is_not_even() {
        let p = closed_form_profile(
            ClosedForm::Linear { a: 1.0, b: 1.0 },
            Interval::new(0.0, 1.0),
        )
        .unwrap();
        let r = parity_check(&p, Endpoint::Left, Parity::Even, 1).unwrap();
        assert!(!r.pass);
        assert_eq!(r.conditions[0].measured, 1.0);
    }

    #[test]
    fn sha_yang_parities() {
        let sy = sha_yang_profiles(2, 2, 10.0, 1e-10).unwrap();
        let h = parity_check(&sy.h, Endpoint::Left, Parity::Odd, 3).unwrap();
        assert!(h.pass);
        assert_eq!(h.slope, 1.0);
        assert!(
            parity_check(&sy.f, Endpoint::Left, Parity::Even, 3)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn k_parities() {
        let k = k_profile(0.2).unwrap();
        for r in [
            parity_check(&k, Endpoint::Left, Parity::Odd, 3).unwrap(),
            closure_check(&k, Endpoint::Left, 1.0).unwrap(),
            parity_check(&k, Endpoint::Right, Parity::Even, 3).unwrap(),
        ] {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn cosine_is_even_at_zero() {
        let p = closed_form_profile(
            ClosedForm::Cosine {
                amp: 1.0,
                freq: 1.0,
                phase: 0.0,
            },
            Interval::new(0.0, 1.0),
        )
        .unwrap();
        let r = parity_check(&p, Endpoint::Left, Parity::Even, 3).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(
            !parity_check(&p, Endpoint::Left, Parity::Odd, 1)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn bad_order() {
        let p = k_profile(0.2).unwrap();
        assert!(parity_check(&p, Endpoint::Left, Parity::Odd, 0).is_err());
        assert!(parity_check(&p, Endpoint::Left, Parity::Odd, 4).is_err());
    }
}
