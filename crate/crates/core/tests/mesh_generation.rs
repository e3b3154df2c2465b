use std::f64::consts::TAU;

use endlab::mesh::metric::hyperbolic_disk_area;
use endlab::mesh::{self, generate, generate_with_layout, refine, validate, GluedParams, Hole, ScenarioSpec, Sheet};

fn pants(res: usize) -> ScenarioSpec {
    ScenarioSpec::PairOfPants {
        radius: 1.0,
        holes: vec![
            Hole {
                center: [-0.4, 0.0],
                radius: 0.2,
            },
            Hole {
                center: [0.4, 0.0],
                radius: 0.2,
            },
        ],
        res,
    }
}

fn all_specs() -> Vec<ScenarioSpec> {
    vec![
        ScenarioSpec::Annulus {
            r_in: 1.0,
            r_out: 4.0,
            res: 64,
        },
        ScenarioSpec::Disk { r: 4.0, res: 32 },
        pants(48),
        ScenarioSpec::HyperbolicDisk { r_max: 3.0, res: 32 },
        ScenarioSpec::HyperbolicAnnulus {
            r_in: 1.0,
            r_max: 4.0,
            res: 32,
        },
        ScenarioSpec::HyperbolicCylinder {
            neck: 2.0,
            half_length: 3.0,
            res: 32,
        },
        ScenarioSpec::CollarAnnulus { r_out: 3.0, res: 32 },
        ScenarioSpec::Rectangle {
            w: 2.0,
            h: 1.0,
            res: 16,
        },
        ScenarioSpec::GluedPlane(GluedParams::with_defaults(16)),
    ]
}

#[test]
fn generators_produce_valid_meshes_with_documented_topology() {
    for spec in all_specs() {
        let m = generate(&spec).unwrap();
        let rep = validate(&m);
        assert!(rep.is_valid(), "{}: {:?}", spec.name(), &rep.violations[..rep.violations.len().min(5)]);
        assert_eq!(m.euler_characteristic(), spec.euler_characteristic(), "{}", spec.name());
        let (count, _) = m.components();
        assert_eq!(count, 1, "{}", spec.name());
        for (k, l) in m.loops().iter().enumerate() {
            assert_eq!(l.label, format!("L{k}"));
        }
    }
}

#[test]
fn annulus_and_pants_topology() {
    let m = generate(&ScenarioSpec::Annulus {
        r_in: 1.0,
        r_out: 4.0,
        res: 64,
    })
    .unwrap();
    assert_eq!(m.loops().len(), 2);
    assert_eq!(m.euler_characteristic(), 0);
    let p = generate(&pants(32)).unwrap();
    assert_eq!(p.loops().len(), 3);
    assert_eq!(p.first_betti(), 2);
}

#[test]
fn generation_is_byte_identical() {
    for spec in all_specs() {
        let a = mesh::io::to_json(&generate(&spec).unwrap());
        let b = mesh::io::to_json(&generate(&spec).unwrap());
        assert_eq!(a, b, "{}", spec.name());
    }
}

#[test]
fn hyperbolic_disk_area_matches_quadrature() {
    let m = generate(&ScenarioSpec::HyperbolicDisk { r_max: 3.0, res: 64 }).unwrap();
    let exact = hyperbolic_disk_area(3.0);
    assert!((exact - TAU * (3f64.cosh() - 1.0)).abs() < 1e-9);
    let a = m.total_area();
    assert!((a - exact).abs() / exact < 0.02, "{a} vs {exact}");
}

#[test]
fn hyperbolic_refinement_error_decreases() {
    let m = generate(&ScenarioSpec::HyperbolicDisk { r_max: 2.0, res: 16 }).unwrap();
    let fam = refine(&m, 2).unwrap();
    let exact = hyperbolic_disk_area(2.0);
    let errs: Vec<f64> = fam.meshes.iter().map(|m| (m.total_area() - exact).abs()).collect();
    assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
}

#[test]
fn refinement_multiplies_triangles_and_keeps_loops() {
    let m = generate(&ScenarioSpec::Annulus {
        r_in: 1.0,
        r_out: 4.0,
        res: 16,
    })
    .unwrap();
    let fam = refine(&m, 2).unwrap();
    assert_eq!(fam.finest().num_triangles(), 16 * m.num_triangles());
    for level in &fam.meshes {
        assert_eq!(level.loops().len(), 2);
        assert_eq!(level.euler_characteristic(), 0);
        assert!(validate(level).is_valid());
    }
    let cyl = generate(&ScenarioSpec::HyperbolicCylinder {
        neck: 2.0,
        half_length: 2.0,
        res: 16,
    })
    .unwrap();
    let fam = refine(&cyl, 1).unwrap();
    assert!(validate(fam.finest()).is_valid());
}

#[test]
fn forced_violations_are_reported() {
    let m = generate(&ScenarioSpec::Disk { r: 1.0, res: 16 }).unwrap();
    let bad = m.with_edge_length(3, 1e6);
    assert!(validate(&bad).has(mesh::Invariant::TriangleInequality));
    let flipped = m.with_flipped_triangle(5).unwrap();
    assert!(validate(&flipped).has(mesh::Invariant::Orientation));
}

#[test]
fn glued_plane_tube_radii_respect_bound() {
    let p = GluedParams::with_defaults(16);
    let c = p.constant();
    for (d, w) in p.resolved_tube_radii().iter().zip(p.resolved_weights()) {
        assert!(*d <= (-c / w).exp() * (1.0 + 1e-12));
    }
    let mut bad = p.clone();
    let mut radii = p.resolved_tube_radii();
    radii[1] *= 2.0;
    bad.tube_radii = Some(radii);
    let e = generate(&ScenarioSpec::GluedPlane(bad)).unwrap_err();
    assert!(e.to_string().contains("tube_radii[1]"), "{e}");
    let (m, layout) = generate_with_layout(&ScenarioSpec::GluedPlane(p)).unwrap();
    assert_eq!(layout.sheet.len(), m.num_vertices());
    assert!(layout.sheet.iter().any(|s| matches!(s, Sheet::Tube(3))));
}

mod properties {
    use proptest::prelude::*;

    use endlab::mesh::{generate, io, validate, GluedParams, ScenarioSpec};

    fn spec() -> impl Strategy<Value = ScenarioSpec> {
        prop_oneof![
            (1.2f64..8.0, 8usize..40).prop_map(|(r_out, res)| ScenarioSpec::Annulus { r_in: 1.0, r_out, res }),
            (0.5f64..6.0, 2usize..10).prop_map(|(r, q)| ScenarioSpec::Disk { r, res: 4 * q }),
            (1.0f64..5.0, 8usize..32).prop_map(|(r_max, res)| ScenarioSpec::HyperbolicDisk { r_max, res }),
            (2.0f64..5.0, 8usize..32).prop_map(|(r_max, res)| ScenarioSpec::HyperbolicAnnulus { r_in: 1.0, r_max, res }),
            (0.5f64..2.0, 1.0f64..4.0, 8usize..24)
                .prop_map(|(neck, half_length, res)| ScenarioSpec::HyperbolicCylinder { neck, half_length, res }),
            (2.5f64..6.0, 8usize..40).prop_map(|(r_out, res)| ScenarioSpec::CollarAnnulus { r_out, res }),
            (1usize..5, 2.5f64..90.0, 8usize..16).prop_map(|(handles, log_radius_plane, res)| {
                ScenarioSpec::GluedPlane(GluedParams {
                    handles,
                    weights: None,
                    tube_radii: None,
                    log_radius_plane,
                    radius_hyperbolic: 3.0,
                    res,
                })
            }),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn generated_meshes_are_valid_and_reproducible(spec in spec()) {
            let m = generate(&spec).unwrap();
            let rep = validate(&m);
            prop_assert!(rep.is_valid(), "{:?}", &rep.violations[..rep.violations.len().min(3)]);
            prop_assert_eq!(m.euler_characteristic(), spec.euler_characteristic());
            prop_assert_eq!(io::to_json(&generate(&spec).unwrap()), io::to_json(&m));
        }
    }
}
