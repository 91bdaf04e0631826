use std::f64::consts::{FRAC_PI_2, PI};

use super::*;
use crate::numerics::linspace;
use crate::profiles::{closed_form_profile, sha_yang_profiles, ClosedForm};

fn sine() -> WarpProfile {
    closed_form_profile(
        ClosedForm::Sine {
            amp: 1.0,
            freq: 1.0,
            phase: 0.0,
        },
        Interval::new(0.0, PI),
    )
    .unwrap()
}

fn poly(coeffs: &[f64], lo: f64, hi: f64) -> WarpProfile {
    closed_form_profile(
        ClosedForm::Polynomial {
            coeffs: coeffs.to_vec(),
        },
        Interval::new(lo, hi),
    )
    .unwrap()
}

fn hemisphere(n: usize) -> MultiWarpedMetric {
    MultiWarpedMetric::new(
        Interval::new(0.0, FRAC_PI_2),
        vec![Block::new(
            FactorManifold::round_sphere(n - 1, 1.0).unwrap(),
            sine(),
        )],
        vec![ClosureTag {
            end: Endpoint::Left,
            block: 0,
        }],
    )
    .unwrap()
}

fn two_block_metric() -> MultiWarpedMetric {
    MultiWarpedMetric::new(
        Interval::new(0.5, 1.5),
        vec![
            Block::new(
                FactorManifold::round_sphere(2, 1.0).unwrap(),
                poly(&[1.0, 0.3, -0.2, 0.05], 0.5, 1.5),
            ),
            Block::new(
                FactorManifold::abstract_factor("F", 3, Interval::new(-1.0, 2.0), None).unwrap(),
                poly(&[0.7, -0.1, 0.4], 0.5, 1.5),
            ),
        ],
        vec![],
    )
    .unwrap()
}

#[test]
fn round_four_sphere_at_the_equator() {
    let m = MultiWarpedMetric::round_sphere(4).unwrap();
    let c = ricci_components(&m, FRAC_PI_2).unwrap();
    assert!((c.radial - 3.0).abs() < 1e-15);
    assert!((c.blocks[0].lo - 3.0).abs() < 1e-15);
    assert!(c.blocks[0].is_point());
    assert!(c.mixed_zero);
    assert_eq!(m.total_dim(), 4);
}

#[test]
fn flat_cone_is_flat() {
    let m = MultiWarpedMetric::flat_cone(4, 5.0).unwrap();
    let c = ricci_components(&m, 1.0).unwrap();
    assert_eq!(c.radial, 0.0);
    assert_eq!(c.blocks[0], Interval::point(0.0));
}

#[test]
fn round_spheres_in_every_dimension() {
    for n in 2..=6 {
        let m = MultiWarpedMetric::round_sphere(n).unwrap();
        let r = ricci_report(&m, 2001, Some(n as f64 - 1.0)).unwrap();
        assert!((r.global_min - (n as f64 - 1.0)).abs() < 1e-9, "n = {n}");
        assert!(r.spread() < 1e-9);
        assert_eq!(r.verdict, Some(true));
    }
}

#[test]
fn singular_and_out_of_domain_points() {
    let m = MultiWarpedMetric::round_sphere(3).unwrap();
    assert!(matches!(
        ricci_components(&m, 5e-4),
        Err(Error::SingularPoint { .. })
    ));
    assert!(matches!(
        ricci_components(&m, PI - 1e-4),
        Err(Error::SingularPoint { .. })
    ));
    assert!(ricci_components(&m, T_MIN).is_ok());
    assert!(matches!(
        ricci_components(&m, 4.0),
        Err(Error::OutOfDomain { .. })
    ));
}

#[test]
fn metric_validation() {
    let s = sine();
    let f = FactorManifold::round_sphere(2, 1.0).unwrap();
    // sine vanishes at 0 without a tag
    assert!(MultiWarpedMetric::new(
        Interval::new(0.0, 1.0),
        vec![Block::new(f.clone(), s.clone())],
        vec![]
    )
    .is_err());
    // tag on a block that does not vanish
    assert!(MultiWarpedMetric::new(
        Interval::new(0.5, 1.0),
        vec![Block::new(f.clone(), s.clone())],
        vec![ClosureTag {
            end: Endpoint::Left,
            block: 0
        }]
    )
    .is_err());
    // interval outside the profile domain
    assert!(MultiWarpedMetric::new(
        Interval::new(0.5, 4.0),
        vec![Block::new(f.clone(), s)],
        vec![]
    )
    .is_err());
    assert!(MultiWarpedMetric::new(Interval::new(0.5, 1.0), vec![], vec![]).is_err());
}

#[test]
fn closure_certificates_of_the_sphere() {
    let m = MultiWarpedMetric::round_sphere(3).unwrap();
    let certs = m.closure_certificates().unwrap();
    assert_eq!(certs.len(), 2);
    assert!(certs.iter().all(|c| c.pass));
}

#[test]
fn generic_path_agrees_on_the_sphere() {
    let m = MultiWarpedMetric::round_sphere(4).unwrap();
    for t in [0.3, 1.0, 2.0] {
        let a = ricci_components(&m, t).unwrap();
        let b = ricci_generic(&m, t, 1e-5).unwrap();
        assert!(
            (a.radial - b.radial).abs() < 1e-8,
            "t = {t}: {a:?} vs {b:?}"
        );
        assert!((a.blocks[0].lo - b.blocks[0].lo).abs() < 1e-8);
    }
}

#[test]
fn generic_path_on_products() {
    let f = FactorManifold::abstract_factor("F", 3, Interval::new(1.0, 4.0), None).unwrap();
    let c = closed_form_profile(ClosedForm::Constant { a: 2.0 }, Interval::new(0.0, 1.0)).unwrap();
    let m =
        MultiWarpedMetric::new(Interval::new(0.0, 1.0), vec![Block::new(f, c)], vec![]).unwrap();
    for comps in [
        ricci_components(&m, 0.5).unwrap(),
        ricci_generic(&m, 0.5, 1e-3).unwrap(),
    ] {
        assert_eq!(comps.radial, 0.0);
        assert!((comps.blocks[0].lo - 0.25).abs() < 1e-15);
        assert!((comps.blocks[0].hi - 1.0).abs() < 1e-15);
    }
}

#[test]
fn generic_path_on_two_blocks() {
    let m = two_block_metric();
    for t in linspace(0.6, 1.4, 9) {
        let a = ricci_components(&m, t).unwrap();
        let b = ricci_generic(&m, t, 1e-4).unwrap();
        assert!((a.radial - b.radial).abs() < 1e-6);
        for (x, y) in a.blocks.iter().zip(&b.blocks) {
            assert!((x.lo - y.lo).abs() < 1e-6 && (x.hi - y.hi).abs() < 1e-6);
        }
    }
}

#[test]
fn generic_step_must_stay_inside() {
    let m = two_block_metric();
    assert!(ricci_generic(&m, 0.5, 1e-3).is_err());
    assert!(ricci_generic(&m, 1.0, 0.0).is_err());
}

#[test]
fn interval_propagation() {
    let m = two_block_metric();
    let c = ricci_components(&m, 1.0).unwrap();
    assert!(c.blocks[1].lo < c.blocks[1].hi);
    let f = m.blocks()[1].profile.eval(1.0).unwrap().f;
    assert!(((c.blocks[1].hi - c.blocks[1].lo) - 3.0 / (f * f)).abs() < 1e-12);
}

#[test]
fn slice_second_fundamental_forms() {
    let m = MultiWarpedMetric::round_sphere(4).unwrap();
    let b = second_fundamental_form(&m, FRAC_PI_2, 1.0).unwrap();
    assert!(b.blocks[0].kappa.abs() < 1e-16);
    assert_eq!(b.blocks[0].radius, 1.0);
    let cone = MultiWarpedMetric::flat_cone(3, 5.0).unwrap();
    let b = second_fundamental_form(&cone, 1.0, 1.0).unwrap();
    assert_eq!(b.blocks[0].kappa, 1.0);
    let b = second_fundamental_form(&cone, 2.0, -1.0).unwrap();
    assert_eq!(b.blocks[0].kappa, -0.5);
    assert_eq!(
        b.blocks[0].induced,
        FactorManifold::round_sphere(2, 2.0).unwrap()
    );
    assert!(second_fundamental_form(&cone, 0.0, 1.0).is_err());
    assert!(second_fundamental_form(&cone, 1.0, 0.5).is_err());
}

#[test]
fn hemisphere_doubles_along_its_equator() {
    let h = hemisphere(4);
    let a = second_fundamental_form(&h, FRAC_PI_2, 1.0).unwrap();
    let b = second_fundamental_form(&h, FRAC_PI_2, -1.0).unwrap();
    let v = glue_check(&a, &b, 1e-12);
    assert!(v.pass && v.isometry_ok);
    assert_eq!(v.ii_sum_min, 0.0);
}

#[test]
fn radius_mismatch_fails_isometry() {
    let a = BoundaryData::round(3, 1.0, 0.5).unwrap();
    let b = BoundaryData::round(3, 1.1, 0.5).unwrap();
    let v = glue_check(&a, &b, 1e-6);
    assert!(!v.isometry_ok && !v.pass);
    let c = BoundaryData::round(2, 1.0, 0.5).unwrap();
    assert!(!glue_check(&a, &c, 1e-6).isometry_ok);
}

#[test]
fn boundary_scaling() {
    let a = BoundaryData::round(3, 1.0, 2.0).unwrap();
    let s = a.scaled(0.5).unwrap();
    assert_eq!(s.blocks[0].radius, 0.5);
    assert_eq!(s.blocks[0].kappa, 4.0);
    assert_eq!(
        s.blocks[0].induced,
        FactorManifold::round_sphere(3, 0.5).unwrap()
    );
}

#[test]
fn report_verdicts() {
    let s4 = MultiWarpedMetric::round_sphere(4).unwrap();
    let r = ricci_report(&s4, 1000, Some(3.0)).unwrap();
    assert_eq!(r.verdict, Some(true));
    assert!((r.global_min - 3.0).abs() < 1e-9);
    assert_eq!(r.excluded.len(), 2);
    assert_eq!(r.range, Interval::new(T_MIN, PI - T_MIN));

    let cone = MultiWarpedMetric::flat_cone(3, 5.0).unwrap();
    let ok = ricci_report(&cone, 500, Some(0.0)).unwrap();
    assert_eq!(ok.verdict, Some(true));
    assert!(ok.global_min.abs() <= 1e-12);
    assert_eq!(
        ricci_report(&cone, 500, Some(0.1)).unwrap().verdict,
        Some(false)
    );
    assert_eq!(ricci_report(&cone, 500, None).unwrap().verdict, None);
    assert!(ricci_report(&cone, 1, None).is_err());

    let mut strict = ReportOptions::new(500, Some(0.0));
    strict.strict = true;
    assert_eq!(
        ricci_report_with(&cone, &strict).unwrap().verdict,
        Some(false)
    );
}

#[test]
fn parallel_reports_are_identical() {
    let sy = sha_yang_profiles(2, 3, 20.0, 1e-10).unwrap();
    let m = MultiWarpedMetric::new(
        Interval::new(0.0, 20.0),
        vec![
            Block::new(FactorManifold::round_sphere(2, 1.0).unwrap(), sy.h),
            Block::new(FactorManifold::round_sphere(2, 1.0).unwrap(), sy.f),
        ],
        vec![ClosureTag {
            end: Endpoint::Left,
            block: 0,
        }],
    )
    .unwrap();
    let mut opts = ReportOptions::new(3001, Some(0.0));
    let serial = ricci_report_with(&m, &opts).unwrap();
    opts.parallel = true;
    let parallel = ricci_report_with(&m, &opts).unwrap();
    assert_eq!(serial, parallel);
    assert_eq!(serial.samples, parallel.samples);
}

#[test]
fn volumes() {
    let s3 = MultiWarpedMetric::round_sphere(3).unwrap();
    assert!((volume(&s3).unwrap() - 2.0 * PI * PI).abs() < 1e-8);
    let f = FactorManifold::abstract_factor("F", 2, Interval::point(1.0), Some(3.0)).unwrap();
    let c = closed_form_profile(ClosedForm::Constant { a: 1.5 }, Interval::new(0.0, 2.0)).unwrap();
    let m =
        MultiWarpedMetric::new(Interval::new(0.0, 2.0), vec![Block::new(f, c)], vec![]).unwrap();
    assert!((volume(&m).unwrap() - 2.0 * 1.5 * 1.5 * 3.0).abs() < 1e-12);
    let g = FactorManifold::abstract_factor("G", 2, Interval::point(1.0), None).unwrap();
    let c = closed_form_profile(ClosedForm::Constant { a: 1.5 }, Interval::new(0.0, 2.0)).unwrap();
    let m =
        MultiWarpedMetric::new(Interval::new(0.0, 2.0), vec![Block::new(g, c)], vec![]).unwrap();
    assert!(matches!(volume(&m), Err(Error::MissingData(_))));
}

#[test]
fn rescaling_identity_and_cone_invariance() {
    let m = two_block_metric();
    let same = rescale_metric(&m, 1.0).unwrap();
    assert_eq!(
        ricci_components(&same, 1.0).unwrap(),
        ricci_components(&m, 1.0).unwrap()
    );
    let cone = MultiWarpedMetric::flat_cone(3, 5.0).unwrap();
    let big = rescale_metric(&cone, 0.5).unwrap();
    let j = big.blocks()[0].profile.eval(3.0).unwrap();
    assert_eq!((j.f, j.fp, j.fpp), (3.0, 1.0, 0.0));
}

#[test]
fn rescaling_law_on_sha_yang() {
    let sy = sha_yang_profiles(2, 2, 100.0, 1e-10).unwrap();
    let m = MultiWarpedMetric::new(
        Interval::new(0.0, 100.0),
        vec![
            Block::new(FactorManifold::round_sphere(1, 1.0).unwrap(), sy.h),
            Block::new(FactorManifold::round_sphere(2, 1.0).unwrap(), sy.f),
        ],
        vec![ClosureTag {
            end: Endpoint::Left,
            block: 0,
        }],
    )
    .unwrap();
    for (r, t) in [(0.1, 10.0), (10.0, 10.0), (0.5, 3.0)] {
        let scaled = rescale_metric(&m, r).unwrap();
        let a = ricci_components(&scaled, t).unwrap();
        let b = ricci_components(&m, r * t).unwrap();
        assert!((a.radial - r * r * b.radial).abs() <= 1e-9 * (1.0 + b.radial.abs()));
        let (x, y) = (a.blocks[1].lo, r * r * b.blocks[1].lo);
        assert!((x - y).abs() <= 1e-9 * (1.0 + y.abs()), "{x} vs {y}");
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    type Layout = Vec<(usize, f64, f64, [f64; 4])>;

    fn random_metric() -> impl Strategy<Value = (Layout, f64)> {
        let block = (
            1usize..=4,
            -2.0f64..2.0,
            0.0f64..2.0,
            [0.5f64..1.5, -0.5f64..0.5, -0.5f64..0.5, -0.3f64..0.3],
        );
        (prop::collection::vec(block, 1..=3), 0.7f64..1.3)
    }

    fn build(layout: &[(usize, f64, f64, [f64; 4])]) -> Option<MultiWarpedMetric> {
        let blocks = layout
            .iter()
            .map(|&(dim, lo, w, c)| {
                let ricci = if dim == 1 {
                    Interval::point(0.0)
                } else {
                    Interval::new(lo, lo + w)
                };
                let factor = FactorManifold::abstract_factor("F", dim, ricci, None).ok()?;
                let profile = closed_form_profile(
                    ClosedForm::Polynomial { coeffs: c.to_vec() },
                    Interval::new(0.5, 1.5),
                )
                .ok()?;
                Some(Block::new(factor, profile))
            })
            .collect::<Option<Vec<_>>>()?;
        MultiWarpedMetric::new(Interval::new(0.5, 1.5), blocks, vec![]).ok()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn oracle_paths_agree((layout, t) in random_metric()) {
            if let Some(m) = build(&layout) {
                let a = ricci_components(&m, t).unwrap();
                let b = ricci_generic(&m, t, 1e-4).unwrap();
                prop_assert!((a.radial - b.radial).abs() <= 1e-6);
                for (x, y) in a.blocks.iter().zip(&b.blocks) {
                    prop_assert!((x.lo - y.lo).abs() <= 1e-6);
                    prop_assert!((x.hi - y.hi).abs() <= 1e-6);
                }
            }
        }

        #[test]
        fn permuting_blocks_permutes_components((layout, t) in random_metric(), rot in 0usize..3) {
            let Some(m) = build(&layout) else { return Ok(()); };
            let k = rot % layout.len();
            let mut rotated = layout.clone();
            rotated.rotate_left(k);
            let p = build(&rotated).unwrap();
            let a = ricci_components(&m, t).unwrap();
            let b = ricci_components(&p, t).unwrap();
            prop_assert_eq!(a.radial, b.radial);
            let mut expect = a.blocks.clone();
            expect.rotate_left(k);
            prop_assert_eq!(&expect, &b.blocks);
            prop_assert_eq!(a.min(), b.min());
            let ra = ricci_report(&m, 50, None).unwrap();
            let rb = ricci_report(&p, 50, None).unwrap();
            prop_assert_eq!(ra.global_min, rb.global_min);
        }

        #[test]
        fn rescaling_scales_components((layout, t) in random_metric(), r in 0.2f64..5.0) {
            let Some(m) = build(&layout) else { return Ok(()); };
            let s = rescale_metric(&m, r).unwrap();
            let a = ricci_components(&s, t / r).unwrap();
            let b = ricci_components(&m, t).unwrap();
            let close = |x: f64, y: f64| (x - y * r * r).abs() <= 1e-9 * (1.0 + (y * r * r).abs());
            prop_assert!(close(a.radial, b.radial));
            for (x, y) in a.blocks.iter().zip(&b.blocks) {
                prop_assert!(close(x.lo, y.lo) && close(x.hi, y.hi));
            }
        }

        #[test]
        fn glue_check_is_symmetric(
            r1 in 0.5f64..2.0, r2 in 0.5f64..2.0,
            k1 in -2.0f64..2.0, k2 in -2.0f64..2.0,
            d1 in 1usize..4, d2 in 1usize..4,
            tol in 1e-9f64..0.5,
        ) {
            let a = BoundaryData::round(d1, r1, k1).unwrap();
            let b = BoundaryData::round(d2, r2, k2).unwrap();
            let (x, y) = (glue_check(&a, &b, tol), glue_check(&b, &a, tol));
            prop_assert_eq!(x.outcome(), y.outcome());
        }
    }
}
