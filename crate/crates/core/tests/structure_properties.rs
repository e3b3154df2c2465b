use std::f64::consts::PI;

use proptest::prelude::*;

use endlab::cohomology::{betti_lower_bound, boundary_harmonic, homology_basis, homology_basis_with_root, periods, DualCycle};
use endlab::dec::{conjugate_differential, laplace_operator, DualOneForm};
use endlab::ends::{
    barrier_domination_check, build_exhaustion, capacity, capacity_with_potentials, classify_end, exhaustion_harmonic,
    BarrierFamily, Thresholds, Verdict,
};
use endlab::kahler::{
    completeness_bound, pluriharmonic_residual, potential_metric, smooth_defining_function, DefiningFunctionSet,
    PotentialChoice,
};
use endlab::mesh::{generate, GluedParams, Hole, ScenarioSpec, SurfaceMesh};
use endlab::solver::SolverOptions;

fn annulus(r_in: f64, r_out: f64, res: usize) -> ScenarioSpec {
    ScenarioSpec::Annulus { r_in, r_out, res }
}

fn pants(offset: f64, radius: f64, res: usize) -> ScenarioSpec {
    ScenarioSpec::PairOfPants {
        radius: 4.0,
        holes: vec![
            Hole {
                center: [-offset, 0.3],
                radius,
            },
            Hole {
                center: [offset, -0.2],
                radius,
            },
        ],
        res,
    }
}

fn log_radius(mesh: &SurfaceMesh) -> Vec<f64> {
    (0..mesh.num_vertices())
        .map(|v| {
            let p = mesh.xy(v).unwrap();
            p[0].hypot(p[1]).ln().max(0.0)
        })
        .collect()
}

/// Closed strip of triangles between two consecutive rings of a flat annulus,
/// ordered counterclockwise.
fn ring_band(mesh: &SurfaceMesh, lo: f64, hi: f64) -> DualCycle {
    let radius = |v: usize| {
        let p = mesh.xy(v).unwrap();
        p[0].hypot(p[1])
    };
    let on = |r: f64, target: f64| (r - target).abs() < 1e-9 * target;
    let mut band: Vec<(f64, usize)> = (0..mesh.num_triangles())
        .filter(|&t| mesh.triangles()[t].iter().all(|&v| on(radius(v), lo) || on(radius(v), hi)))
        .map(|t| {
            let c = mesh.triangles()[t].iter().fold([0.0, 0.0], |acc, &v| {
                let p = mesh.xy(v).unwrap();
                [acc[0] + p[0], acc[1] + p[1]]
            });
            (c[1].atan2(c[0]).rem_euclid(2.0 * PI), t)
        })
        .collect();
    band.sort_by(|a, b| a.0.total_cmp(&b.0));
    DualCycle::from_triangles(mesh, band.into_iter().map(|(_, t)| t).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn capacity_energies_never_increase(res in 8usize..24, hyperbolic in any::<bool>()) {
        let spec = if hyperbolic {
            ScenarioSpec::HyperbolicAnnulus { r_in: 1.0, r_max: 4.0, res }
        } else {
            annulus(1.0, 4.0, res)
        };
        let ex = build_exhaustion(&spec, 4).unwrap();
        let est = capacity(&ex, "L0", &SolverOptions::default()).unwrap();
        prop_assert!(est.energies.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-8)));
    }

    #[test]
    fn shrinking_the_core_lowers_every_energy(r_in in 0.3f64..0.9, res in 8usize..20) {
        let opts = SolverOptions::default();
        let inner = capacity(&build_exhaustion(&annulus(r_in, 4.0, res), 4).unwrap(), "L0", &opts).unwrap();
        let outer = capacity(&build_exhaustion(&annulus(1.0, 4.0, res), 4).unwrap(), "L0", &opts).unwrap();
        for (a, b) in inner.energies.iter().zip(&outer.energies) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn model_ends_are_classified_at_every_resolution(res in 12usize..40) {
        let opts = SolverOptions::default();
        let th = Thresholds::default();
        let flat = capacity(&build_exhaustion(&annulus(1.0, 4.0, res), 4).unwrap(), "L0", &opts).unwrap();
        prop_assert_eq!(classify_end(&flat, &th).unwrap().verdict, Verdict::Parabolic);
        let spec = ScenarioSpec::HyperbolicAnnulus { r_in: 1.0, r_max: 4.0, res };
        let hyp = capacity(&build_exhaustion(&spec, 4).unwrap(), "L0", &opts).unwrap();
        prop_assert_eq!(classify_end(&hyp, &th).unwrap().verdict, Verdict::NonParabolic);
    }

    #[test]
    fn exhaustion_iterates_rise_and_stay_in_unit_range(res in 8usize..24, neck in 0.5f64..2.0) {
        let spec = ScenarioSpec::HyperbolicCylinder { neck, half_length: 3.0, res };
        let ex = build_exhaustion(&spec, 4).unwrap();
        let sep = exhaustion_harmonic(&ex, "L1", &SolverOptions::default()).unwrap();
        prop_assert!(sep.monotone(1e-8));
        prop_assert!(sep.in_unit_range(1e-8));
    }

    #[test]
    fn barriers_are_dominated_wherever_they_fit(offset in 0.03f64..3.0, res in 12usize..20) {
        let p = GluedParams {
            handles: 4,
            weights: None,
            tube_radii: None,
            log_radius_plane: 3.0,
            radius_hyperbolic: 3.0,
            res,
        };
        let ex = build_exhaustion(&ScenarioSpec::GluedPlane(p.clone()), 4).unwrap();
        let (_, pots) = capacity_with_potentials(&ex, "L0", &SolverOptions::default()).unwrap();
        let finest = ex.finest();
        let eta0 = BarrierFamily::for_glued(&p, 1.0).unwrap().eta0();
        let fam = BarrierFamily::for_glued(&p, eta0 + offset).unwrap();
        let rep = barrier_domination_check(&finest.mesh, &finest.layout, pots.last().unwrap(), &fam, "L1", 1e-8).unwrap();
        prop_assume!(rep.inside_mesh);
        prop_assert!(rep.violations.is_empty(), "{} violations at eta0 + {offset}", rep.violations.len());
    }

    #[test]
    fn concave_potentials_keep_the_factor_above_one(alpha in 0.25f64..3.0, res in 16usize..48) {
        let m = generate(&ScenarioSpec::CollarAnnulus { r_out: 4.0, res }).unwrap();
        let lap = laplace_operator(&m).unwrap();
        let f = log_radius(&m);
        for choice in [PotentialChoice::Power { alpha }, PotentialChoice::Log] {
            let metric = potential_metric(&m, &lap, &f, choice).unwrap();
            prop_assert!(metric.min_factor >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn completeness_bound_grows_as_s_shrinks(alpha in 0.1f64..4.0, big_s in 0.1f64..1.0, a in 0.01f64..0.99, b in 0.01f64..0.99) {
        let (s1, s2) = (a.min(b) * big_s, a.max(b) * big_s);
        prop_assume!(s1 < s2);
        prop_assert!(completeness_bound(s1, big_s, alpha) >= completeness_bound(s2, big_s, alpha));
    }

    #[test]
    fn smoothing_does_not_steepen_the_defining_function(depth in 0.3f64..1.2, delta in 0.2f64..1.5) {
        let m = generate(&annulus(1.0, 8.0, 16)).unwrap();
        let set = DefiningFunctionSet::from_loop_distance(&m, &["L0"], depth, delta).unwrap();
        let raw = set.infimum();
        let smooth = smooth_defining_function(&set);
        let lip = |g: &[f64]| {
            m.edges()
                .iter()
                .enumerate()
                .map(|(e, &[i, j])| (g[i] - g[j]).abs() / m.length(e))
                .fold(0.0, f64::max)
        };
        prop_assert!(lip(&smooth) <= lip(&raw).max(1.0) * (1.0 + 1e-12));
    }

    #[test]
    fn periods_are_linear(
        seed_a in prop::collection::vec(-1.0f64..1.0, 64),
        seed_b in prop::collection::vec(-1.0f64..1.0, 64),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let m = generate(&pants(1.5, 0.6, 16)).unwrap();
        let basis = homology_basis(&m).unwrap();
        let form = |seed: &[f64]| DualOneForm {
            values: (0..m.num_edges()).map(|e| seed[e % seed.len()] * (1.0 + e as f64).sqrt()).collect(),
        };
        let (f, g) = (form(&seed_a), form(&seed_b));
        let lhs = periods(&f.combine(a, &g, b), &basis).unwrap();
        let pf = periods(&f, &basis).unwrap();
        let pg = periods(&g, &basis).unwrap();
        for k in 0..lhs.len() {
            let rhs = a * pf[k] + b * pg[k];
            let scale = (a * pf[k]).abs() + (b * pg[k]).abs() + 1e-300;
            prop_assert!((lhs[k] - rhs).abs() <= 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn periods_do_not_depend_on_the_tree(root in 0usize..1000, res in 8usize..24) {
        let m = generate(&annulus(1.0, 4.0, res)).unwrap();
        let lap = laplace_operator(&m).unwrap();
        let (h, _) = boundary_harmonic(&m, &lap, "L0", &SolverOptions::default()).unwrap();
        let form = conjugate_differential(&m, &lap, &h);
        let p = periods(&form, &homology_basis(&m).unwrap()).unwrap();
        let q = periods(&form, &homology_basis_with_root(&m, root % m.num_triangles()).unwrap()).unwrap();
        prop_assert_eq!(p.len(), 1);
        prop_assert!((p[0].abs() - q[0].abs()).abs() <= 1e-8);
    }

    #[test]
    fn homologous_cycles_see_the_same_period(res in 8usize..24) {
        let m = generate(&annulus(1.0, 4.0, res)).unwrap();
        let lap = laplace_operator(&m).unwrap();
        let (h, _) = boundary_harmonic(&m, &lap, "L0", &SolverOptions::default()).unwrap();
        let form = conjugate_differential(&m, &lap, &h);
        let mut radii: Vec<f64> = (0..m.num_vertices())
            .map(|v| {
                let p = m.xy(v).unwrap();
                p[0].hypot(p[1])
            })
            .collect();
        radii.sort_by(f64::total_cmp);
        radii.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * *b);
        let bands: Vec<f64> = radii.windows(2).map(|w| ring_band(&m, w[0], w[1]).integrate(&form)).collect();
        for p in &bands {
            prop_assert!((p - bands[0]).abs() <= 1e-8);
        }
    }

    #[test]
    fn boundary_harmonics_sum_to_one(offset in 1.2f64..2.0, radius in 0.3f64..0.7, res in 16usize..32) {
        let m = generate(&pants(offset, radius, res)).unwrap();
        let b = betti_lower_bound(&m, &["L0", "L1", "L2"], &SolverOptions::default()).unwrap();
        prop_assert!(b.sum_deviation.unwrap() <= 1e-8);
        prop_assert!(b.relation_residual.unwrap() <= 1e-6);
        prop_assert_eq!(b.rank, 2);
    }

    #[test]
    fn betti_rank_ignores_loop_order(order in Just(vec!["L0", "L1", "L2"]).prop_shuffle(), res in 16usize..32) {
        let m = generate(&pants(1.5, 0.5, res)).unwrap();
        let opts = SolverOptions::default();
        let a = betti_lower_bound(&m, &["L0", "L1", "L2"], &opts).unwrap();
        let b = betti_lower_bound(&m, &order, &opts).unwrap();
        prop_assert_eq!(a.rank, b.rank);
    }

    #[test]
    fn pluriharmonic_divergence_is_the_laplacian(res in 8usize..32) {
        let m = generate(&pants(1.5, 0.5, res)).unwrap();
        let lap = laplace_operator(&m).unwrap();
        let (h, _) = boundary_harmonic(&m, &lap, "L1", &SolverOptions::default()).unwrap();
        let boundary = m.boundary_vertices();
        let direct = (0..m.num_vertices())
            .filter(|&v| !boundary[v])
            .map(|v| lap.apply_at(&h, v).abs())
            .fold(0.0, f64::max);
        let (div, _) = pluriharmonic_residual(&m, &lap, &h);
        prop_assert_eq!(div.to_bits(), direct.to_bits());
    }
}
