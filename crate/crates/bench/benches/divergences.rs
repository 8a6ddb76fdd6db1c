use chandisc_bench::state_pair;
use chandisc_core::divergence::{fidelity, renyi, FidelityKind, RenyiKind};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn bench_fidelities(c: &mut Criterion) {
    let mut group = c.benchmark_group("fidelity");
    for dim in [2usize, 4, 8] {
        let (rho, sigma) = state_pair(dim, 1);
        for kind in FidelityKind::ALL {
            group.bench_with_input(
                BenchmarkId::new(kind.name(), dim),
                &(&rho, &sigma),
                |b, (r, s)| b.iter(|| fidelity(kind, black_box(r), black_box(s)).unwrap()),
            );
        }
    }
    group.finish();
}

fn bench_renyi(c: &mut Criterion) {
    let mut group = c.benchmark_group("renyi_alpha_1_5");
    for dim in [2usize, 4, 8] {
        let (rho, sigma) = state_pair(dim, 2);
        for kind in RenyiKind::ALL {
            group.bench_with_input(
                BenchmarkId::new(kind.name(), dim),
                &(&rho, &sigma),
                |b, (r, s)| b.iter(|| renyi(kind, 1.5, black_box(r), black_box(s)).unwrap()),
            );
        }
    }
    group.finish();
}

criterion_group!(benches, bench_fidelities, bench_renyi);
criterion_main!(benches);
