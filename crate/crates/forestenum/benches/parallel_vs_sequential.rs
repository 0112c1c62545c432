use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use forestenum::forest::Symbol;
use forestenum::gen;
use forestenum::oracle::{brute_select_with, Exec, OracleBudget};

fn subset_sweep(c: &mut Criterion) {
    let syms = [Symbol(0), Symbol(1)];
    let mut rng = gen::rng(11);
    let nsta = gen::random_nsta(&mut rng, 3, &syms, 0.5);
    let budget = OracleBudget::default();
    let mut group = c.benchmark_group("subset_oracle");
    group.sample_size(10);
    for n in [8usize, 11, 14] {
        let f = gen::random_forest(&mut rng, n, &syms);
        for (name, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, n), &f, |b, f| {
                b.iter(|| brute_select_with(&nsta, f, &budget, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, subset_sweep);
criterion_main!(benches);
