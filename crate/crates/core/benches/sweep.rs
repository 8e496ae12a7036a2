use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use coexist::{run_sweep, Execution, SimOptions, Sweep, SystemConfig};

fn sweep_by_execution(c: &mut Criterion) {
    let cfg = SystemConfig::default();
    let grid = Sweep::D1(vec![0.1, 0.3, 0.5]);
    let mut group = c.benchmark_group("d1_sweep_3pts");
    group.sample_size(10);
    for trials in [1_000usize, 10_000] {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let opts = SimOptions {
                execution: exec,
                ..SimOptions::new(trials)
            };
            group.bench_with_input(
                BenchmarkId::new(format!("{exec:?}"), trials),
                &opts,
                |b, opts| b.iter(|| run_sweep(&cfg, &grid, opts).unwrap()),
            );
        }
    }
    group.finish();
}

fn blocks_by_execution(c: &mut Criterion) {
    let cfg = SystemConfig::default();
    let grid = Sweep::Blocks {
        d1: 0.4,
        blocks: vec![50, 200],
    };
    let mut group = c.benchmark_group("blocks_sweep");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        let opts = SimOptions {
            execution: exec,
            ..SimOptions::new(5_000)
        };
        group.bench_function(format!("{exec:?}"), |b| {
            b.iter(|| run_sweep(&cfg, &grid, &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweep_by_execution, blocks_by_execution);
criterion_main!(benches);
