use std::sync::OnceLock;

use proptest::prelude::*;

use endlab::cohomology::DualCycle;
use endlab::dec::{conjugate_differential, dirichlet_energy, dual_divergence_at, laplace_operator, DualOneForm};
use endlab::exec::ExecPolicy;
use endlab::mesh::{generate, ScenarioSpec, SurfaceMesh};
use endlab::solver::{green_function, loop_flux, solve_laplace, BoundaryCondition, SolverOptions};

fn annulus() -> &'static SurfaceMesh {
    static M: OnceLock<SurfaceMesh> = OnceLock::new();
    M.get_or_init(|| {
        generate(&ScenarioSpec::Annulus {
            r_in: 1.0,
            r_out: 4.0,
            res: 12,
        })
        .unwrap()
    })
}

fn values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, n)
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

/// Triangles around an interior vertex, in rotational order.
fn vertex_star(mesh: &SurfaceMesh, v: usize) -> Vec<usize> {
    let star: Vec<usize> = (0..mesh.num_triangles())
        .filter(|&t| mesh.triangles()[t].contains(&v))
        .collect();
    let mut order = vec![star[0]];
    while order.len() < star.len() {
        let last = *order.last().unwrap();
        let next = star
            .iter()
            .copied()
            .find(|&t| {
                !order.contains(&t) && {
                    let shared = mesh.triangles()[t]
                        .iter()
                        .filter(|x| mesh.triangles()[last].contains(x))
                        .count();
                    shared == 2
                }
            })
            .expect("the star of an interior vertex is a closed fan");
        order.push(next);
    }
    order
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn energy_is_nonnegative_and_vanishes_on_constants(f in values(annulus().num_vertices()), c in -5.0f64..5.0) {
        let m = annulus();
        let lap = laplace_operator(m).unwrap();
        let e = dirichlet_energy(ExecPolicy::Sequential, m, &lap, &f);
        prop_assert!(e > 0.0);
        let constant = vec![c; m.num_vertices()];
        prop_assert_eq!(dirichlet_energy(ExecPolicy::Sequential, m, &lap, &constant), 0.0);
    }

    #[test]
    fn energy_is_policy_independent(f in values(annulus().num_vertices())) {
        let m = annulus();
        let lap = laplace_operator(m).unwrap();
        let a = dirichlet_energy(ExecPolicy::Sequential, m, &lap, &f);
        let b = dirichlet_energy(ExecPolicy::Parallel, m, &lap, &f);
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn conjugate_differential_is_linear(
        f in values(annulus().num_vertices()),
        g in values(annulus().num_vertices()),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let m = annulus();
        let lap = laplace_operator(m).unwrap();
        let combo: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
        let lhs = conjugate_differential(m, &lap, &combo);
        let rhs = conjugate_differential(m, &lap, &f).combine(a, &conjugate_differential(m, &lap, &g), b);
        let scale = rhs.values.iter().map(|x| x.abs()).fold(1.0, f64::max);
        for (x, y) in lhs.values.iter().zip(&rhs.values) {
            prop_assert!((x - y).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn flux_around_a_vertex_is_the_laplacian(f in values(annulus().num_vertices())) {
        let m = annulus();
        let lap = laplace_operator(m).unwrap();
        let form = conjugate_differential(m, &lap, &f);
        let boundary = m.boundary_vertices();
        for v in (0..m.num_vertices()).filter(|&v| !boundary[v]) {
            prop_assert_eq!(dual_divergence_at(&lap, &form, v).to_bits(), lap.apply_at(&f, v).to_bits());
        }
    }

    #[test]
    fn exact_dual_forms_vanish_on_contractible_cycles(g in values(annulus().num_triangles())) {
        let m = annulus();
        let form = DualOneForm {
            values: (0..m.num_edges())
                .map(|e| match (m.left_face(e), m.right_face(e)) {
                    (Some(l), Some(r)) if m.is_interior_edge(e) => g[l] - g[r],
                    _ => 0.0,
                })
                .collect(),
        };
        let boundary = m.boundary_vertices();
        for v in (0..m.num_vertices()).filter(|&v| !boundary[v]) {
            let cycle = DualCycle::from_triangles(m, vertex_star(m, v)).unwrap();
            prop_assert!(cycle.integrate(&form).abs() <= 1e-12);
        }
    }

    #[test]
    fn energy_is_invariant_under_relabeling(
        f in values(annulus().num_vertices()),
        perm in permutation(annulus().num_vertices()),
    ) {
        let m = annulus();
        let p = m.relabeled(&perm).unwrap();
        let mut g = vec![0.0; f.len()];
        for (old, &new) in perm.iter().enumerate() {
            g[new] = f[old];
        }
        let e = dirichlet_energy(ExecPolicy::Sequential, m, &laplace_operator(m).unwrap(), &f);
        let e2 = dirichlet_energy(ExecPolicy::Sequential, &p, &laplace_operator(&p).unwrap(), &g);
        prop_assert!((e - e2).abs() <= 1e-12 * e);
    }

    #[test]
    fn solutions_obey_the_maximum_principle(a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let m = annulus();
        let bc = BoundaryCondition::new().dirichlet("L0", a).dirichlet("L1", b);
        let (f, _) = solve_laplace(m, &bc, &SolverOptions::default()).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        let slack = 1e-9 * (1.0 + hi.abs().max(lo.abs()));
        prop_assert!(f.iter().all(|&x| x >= lo - slack && x <= hi + slack));
    }

    #[test]
    fn solutions_are_invariant_under_relabeling(perm in permutation(annulus().num_vertices()), a in -5.0f64..5.0) {
        let m = annulus();
        let p = m.relabeled(&perm).unwrap();
        let bc = BoundaryCondition::new().dirichlet("L0", a).neumann("L1");
        let bc2 = BoundaryCondition::new().dirichlet("L0", 1.0).dirichlet("L1", a);
        for bc in [bc, bc2] {
            let (f, _) = solve_laplace(m, &bc, &SolverOptions::default()).unwrap();
            let (g, _) = solve_laplace(&p, &bc, &SolverOptions::default()).unwrap();
            for (old, &new) in perm.iter().enumerate() {
                prop_assert!((f[old] - g[new]).abs() <= 1e-8);
            }
        }
    }
}

fn disk(r: f64, res: usize) -> SurfaceMesh {
    generate(&ScenarioSpec::Disk { r, res }).unwrap()
}

fn vertex_at(mesh: &SurfaceMesh, p: [f64; 2]) -> Option<usize> {
    (0..mesh.num_vertices()).find(|&v| {
        let q = mesh.xy(v).unwrap();
        (q[0] - p[0]).hypot(q[1] - p[1]) < 1e-9
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn green_grows_with_the_domain(quarter in 2usize..6) {
        let res = 4 * quarter;
        let small = disk(2.0, res);
        let big = disk(4.0, 2 * res);
        let opts = SolverOptions::default();
        let (gs, _) = green_function(&small, 0, "L0", &opts).unwrap();
        let (gb, _) = green_function(&big, 0, "L0", &opts).unwrap();
        for v in 0..small.num_vertices() {
            let w = vertex_at(&big, small.xy(v).unwrap()).expect("nested disks share vertices");
            prop_assert!(gb[w] >= gs[v] - 1e-10);
        }
    }

    #[test]
    fn green_carries_unit_flux(quarter in 2usize..8) {
        let m = disk(4.0, 4 * quarter);
        let lap = laplace_operator(&m).unwrap();
        let boundary = m.boundary_vertices();
        let interior: Vec<usize> = (0..m.num_vertices()).filter(|&v| !boundary[v]).collect();
        let source = interior[interior.len() / 3];
        let (g, _) = green_function(&m, source, "L0", &SolverOptions::default()).unwrap();
        let form = conjugate_differential(&m, &lap, &g);
        let around = DualCycle::from_triangles(&m, vertex_star(&m, source)).unwrap().integrate(&form);
        prop_assert!((around.abs() - 1.0).abs() <= 1e-6);
        let out = loop_flux(&m, &lap, &g, "L0").unwrap();
        prop_assert!((out.abs() - 1.0).abs() <= 1e-6);
    }
}
