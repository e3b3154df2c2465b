use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use endlab::dec::laplace_operator;
use endlab::ends::{build_exhaustion, capacity, capacitor};
use endlab::exec::ExecPolicy;
use endlab::mesh::{generate, refine, ScenarioSpec};
use endlab::solver::SolverOptions;

const POLICIES: [(&str, ExecPolicy); 2] = [("sequential", ExecPolicy::Sequential), ("parallel", ExecPolicy::Parallel)];

fn options(policy: ExecPolicy) -> SolverOptions {
    SolverOptions {
        policy,
        ..SolverOptions::default()
    }
}

fn matvec(c: &mut Criterion) {
    let spec = ScenarioSpec::Annulus {
        r_in: 1.0,
        r_out: 4.0,
        res: 64,
    };
    let mesh = refine(&generate(&spec).unwrap(), 3).unwrap().meshes.pop().unwrap();
    let lap = laplace_operator(&mesh).unwrap();
    let f: Vec<f64> = (0..mesh.num_vertices()).map(|v| (v as f64).sin()).collect();
    let mut group = c.benchmark_group("laplacian_apply");
    for (name, policy) in POLICIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &policy, |b, &p| {
            b.iter(|| black_box(lap.apply(p, &f)))
        });
    }
    group.finish();
}

fn capacitor_solve(c: &mut Criterion) {
    let spec = ScenarioSpec::Annulus {
        r_in: 1.0,
        r_out: 4.0,
        res: 32,
    };
    let mesh = refine(&generate(&spec).unwrap(), 3).unwrap().meshes.pop().unwrap();
    let mut group = c.benchmark_group("capacitor");
    group.sample_size(10);
    for (name, policy) in POLICIES {
        let opts = options(policy);
        group.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, o| {
            b.iter(|| black_box(capacitor(&mesh, "L0", o).unwrap().energy))
        });
    }
    group.finish();
}

fn exhaustion_levels(c: &mut Criterion) {
    let spec = ScenarioSpec::HyperbolicAnnulus {
        r_in: 1.0,
        r_max: 6.0,
        res: 64,
    };
    let ex = build_exhaustion(&spec, 4).unwrap();
    let mut group = c.benchmark_group("exhaustion_capacity");
    group.sample_size(10);
    for (name, policy) in POLICIES {
        let opts = options(policy);
        group.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, o| {
            b.iter(|| black_box(capacity(&ex, "L0", o).unwrap().limit))
        });
    }
    group.finish();
}

criterion_group!(benches, matvec, capacitor_solve, exhaustion_levels);
criterion_main!(benches);
