use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pairbound::certificate::{gn_terms, mass_function};
use pairbound::grid::{Bc, Grid1D, Grid2D, Symmetry};
use pairbound::linalg::lanczos::LanczosOptions;
use pairbound::oned::ground_state;
use pairbound::potentials::PotentialSpec;
use pairbound::twod::{assemble_q2d, lowest_eigs};

fn bench_ground_state(c: &mut Criterion) {
    let spec = PotentialSpec::harmonic(1.0);
    let mut group = c.benchmark_group("ground_state_1d");
    for n in [4_000usize, 16_000, 64_000] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let grid = Grid1D::neumann(12.0, n).unwrap();
            b.iter(|| ground_state(&spec, &grid).unwrap())
        });
    }
    group.finish();
}

fn bench_gn_terms(c: &mut Criterion) {
    let spec = PotentialSpec::harmonic(1.0);
    let grid = Grid1D::neumann(80.0, 80_000).unwrap();
    let psi = ground_state(&spec, &grid).unwrap();
    let mass = mass_function(&psi);
    c.bench_function("gn_terms_n32", |b| {
        b.iter(|| gn_terms(&mass, 0.75, 32).unwrap())
    });
}

fn bench_2d_solve(c: &mut Criterion) {
    let spec = PotentialSpec::harmonic(1.0);
    let mut group = c.benchmark_group("q_plus_lowest_eig");
    group.sample_size(10);
    for (x, h) in [(8.0, 0.1), (10.0, 0.05)] {
        let m = (x / h) as usize;
        group.bench_with_input(BenchmarkId::from_parameter(m), &(x, h), |b, &(x, h)| {
            let grid = Grid2D::new(x, h, Symmetry::Plus, Bc::Dirichlet).unwrap();
            b.iter(|| {
                let op = assemble_q2d(&spec, &grid).unwrap();
                lowest_eigs(&op, 1, &LanczosOptions::default()).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_ground_state, bench_gn_terms, bench_2d_solve);
criterion_main!(benches);
