use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sfem_core::benchmarks::beam_divisions;
use sfem_core::mesh::Sc2Split;
use sfem_core::prelude::*;

fn quad() -> [Point; 4] {
    [point(0.0, 0.0), point(2.0, 0.0), point(1.5, 1.2), point(0.3, 0.8)]
}

fn shape_functions(c: &mut Criterion) {
    let q = quad();
    let p = point(0.9, 0.5);
    let mut group = c.benchmark_group("shape_functions");
    for scheme in [Scheme::Wachspress, Scheme::Lagrange] {
        group.bench_function(BenchmarkId::new("build", scheme), |b| {
            b.iter(|| ElementBasis::new(scheme, black_box(&q), Subdivision::Quarters).unwrap())
        });
        let basis = ElementBasis::new(scheme, &q, Subdivision::Quarters).unwrap();
        group.bench_function(BenchmarkId::new("eval", scheme), |b| {
            b.iter(|| basis.values(black_box(&p)).unwrap())
        });
    }
    let basis = ElementBasis::new(Scheme::Averaged, &q, Subdivision::Quarters).unwrap();
    let on_skeleton = point(0.9, 0.3);
    group.bench_function(BenchmarkId::new("eval", Scheme::Averaged), |b| {
        b.iter(|| basis.values(black_box(&on_skeleton)))
    });
    group.finish();
}

fn element_stiffness_bench(c: &mut Criterion) {
    let q = quad();
    let m = Material::plane_stress(3e7, 0.3, 1.0).unwrap();
    let mut group = c.benchmark_group("element_stiffness");
    for scheme in Scheme::ALL {
        for sub in [Subdivision::Halves(Sc2Split::Edge12To34), Subdivision::Quarters] {
            let disc = Discretization::new(scheme, sub);
            group.bench_function(BenchmarkId::new(scheme.as_str(), sub), |b| {
                b.iter(|| element_stiffness(black_box(&q), 0, &disc, &m).unwrap())
            });
        }
    }
    group.finish();
}

fn beam_solve(c: &mut Criterion) {
    let beam = TimoshenkoBeam::default();
    let disc = Discretization::new(Scheme::Wachspress, Subdivision::Quarters);
    let mut group = c.benchmark_group("beam_solve");
    group.sample_size(20);
    for mesh_index in [1.0, 4.0] {
        let (nx, ny) = beam_divisions(&beam, mesh_index).unwrap();
        let mesh = generate_structured_mesh(nx, ny, beam.length, beam.height).unwrap();
        for (name, solver) in [
            ("cholesky", LinearSolver::Cholesky),
            ("cg", LinearSolver::ConjugateGradient),
        ] {
            group.bench_function(BenchmarkId::new(name, mesh_index), |b| {
                b.iter(|| solve_beam(&beam, &mesh, nx, &disc, solver).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, shape_functions, element_stiffness_bench, beam_solve);
criterion_main!(benches);
