//! Benchmarks remove-all elimination on dense finite games, comparing the
//! data-parallel and sequential execution paths (select with
//! `--features`/`--no-default-features`).

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use domlab_core::engine::{run, Mode, Policy, RunConfig};
use domlab_core::enumerate::random_game;
use domlab_core::seq::standard_registry;
use std::sync::Arc;

fn bench_remove_all(c: &mut Criterion) {
    let reg = Arc::new(standard_registry());
    let mut group = c.benchmark_group(if cfg!(feature = "parallel") {
        "remove_all/parallel"
    } else {
        "remove_all/sequential"
    });
    for (rows, cols) in [(6, 6), (10, 10), (14, 14)] {
        let game = random_game(rows, cols, 977, Arc::clone(&reg)).expect("game builds");
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{rows}x{cols}")),
            &game,
            |b, game| {
                b.iter(|| {
                    run(game, &RunConfig::new(Mode::Nested, Policy::RemoveAll)).expect("runs")
                })
            },
        );
    }
    group.finish();
}

fn bench_enumeration(c: &mut Criterion) {
    let reg = Arc::new(standard_registry());
    let mut group = c.benchmark_group(if cfg!(feature = "parallel") {
        "enumerate/parallel"
    } else {
        "enumerate/sequential"
    });
    for (rows, cols) in [(3, 3), (4, 3)] {
        let game = random_game(rows, cols, 1259, Arc::clone(&reg)).expect("game builds");
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{rows}x{cols}")),
            &game,
            |b, game| {
                b.iter(|| {
                    domlab_core::enumerate::enumerate_sequences(
                        game,
                        Mode::Nested,
                        &domlab_core::caps::Caps::default(),
                    )
                    .expect("enumerates")
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, bench_remove_all, bench_enumeration);
criterion_main!(benches);
