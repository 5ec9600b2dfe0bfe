use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use wpcc_core::optimizer::optimal_tau_with;
use wpcc_core::scenario::{preset, run_all};
use wpcc_core::{Backend, ProtocolKind, RelayMode, Severities, Simulator, SystemParams, Topology};

fn backends() -> Vec<Backend> {
    let mut v = vec![Backend::Serial];
    #[cfg(feature = "parallel")]
    v.push(Backend::Parallel);
    v
}

fn params() -> SystemParams {
    let topo = Topology::new(10.0, 5.0, 2.0).unwrap();
    SystemParams::from_dbm(30.0, -80.0, 0.5, 0.5, 2.0, topo, Severities::uniform(3)).unwrap()
}

fn monte_carlo(c: &mut Criterion) {
    let p = params();
    let mut g = c.benchmark_group("outage_mc_100k");
    for b in backends() {
        let sim = Simulator::new(b);
        g.bench_with_input(BenchmarkId::from_parameter(b.name()), &sim, |bench, sim| {
            bench.iter(|| {
                sim.estimate_outages(&ProtocolKind::ALL, black_box(&p), 100_000, 1, RelayMode::Exact)
                    .unwrap()
            })
        });
    }
    g.finish();
}

fn tau_search(c: &mut Criterion) {
    let p = params();
    let mut g = c.benchmark_group("optimal_tau_1e-3");
    for b in backends() {
        g.bench_with_input(BenchmarkId::from_parameter(b.name()), &b, |bench, &b| {
            bench.iter(|| optimal_tau_with(b, ProtocolKind::At, black_box(&p), 1e-3).unwrap())
        });
    }
    g.finish();
}

fn relay_sweep(c: &mut Criterion) {
    let cfgs = preset("fig6").unwrap();
    let mut g = c.benchmark_group("fig6_sweep");
    g.sample_size(10);
    for b in backends() {
        g.bench_with_input(BenchmarkId::from_parameter(b.name()), &b, |bench, &b| {
            bench.iter(|| run_all(black_box(&cfgs), b).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, monte_carlo, tau_search, relay_sweep);
criterion_main!(benches);
