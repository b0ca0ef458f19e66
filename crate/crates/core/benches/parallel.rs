use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use lpcb::erasure::{erasure_bounds, MarkovErasure};
use lpcb::fading::{dt_fading_bounds, FadingScene, SpectralModel};
use lpcb::gaussian::{interference_upper, ChannelScene, ReferenceExponent};
use lpcb::grid::linspace;
use lpcb::verify::{mc_finite_n_lpcb, McConfig, McScene};
use lpcb::{AlphaGrid, DivergenceOrder, Execution};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn fading_scan(c: &mut Criterion) {
    let scene = FadingScene::from_snr(0.1, 2.0, SpectralModel::Ar { a: 0.2, b: 0.08 }).unwrap();
    let mut g = c.benchmark_group("ar_fading_scan");
    for (name, exec) in MODES {
        let grid = AlphaGrid::geometric(1.0 + 1e-4, 1e3, 4000).unwrap().with_execution(exec);
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| dt_fading_bounds(&scene, &grid).unwrap()));
    }
    g.finish();
}

fn erasure_scan(c: &mut Criterion) {
    let me = MarkovErasure::new(
        &[vec![0.7, 0.2, 0.1], vec![0.1, 0.8, 0.1], vec![0.3, 0.3, 0.4]],
        vec![1, 0, 1],
        0.05,
    )
    .unwrap();
    let mut g = c.benchmark_group("hmm_erasure_scan");
    for (name, exec) in MODES {
        let grid = AlphaGrid::default().with_execution(exec);
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| erasure_bounds(&me, 1.0, &grid).unwrap()));
    }
    g.finish();
}

fn interference_scan(c: &mut Criterion) {
    let scene = ChannelScene::new(0.05, 1.0, 1.0, 0.1, ReferenceExponent::VeryNoisy { c_q: 0.5 }).unwrap();
    let s_grid = linspace(0.02, 4.0, 200);
    let mut g = c.benchmark_group("interference_joint_scan");
    g.sample_size(20);
    for (name, exec) in MODES {
        let grid = AlphaGrid::default().with_execution(exec);
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| interference_upper(&scene, &grid, &s_grid)));
    }
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let scene = McScene::new(1.0, 1.0, 0.1).unwrap();
    let order = DivergenceOrder::new(2.0).unwrap();
    let mut g = c.benchmark_group("monte_carlo_n50");
    g.sample_size(10);
    for (name, exec) in MODES {
        let cfg = McConfig::new(50, 100_000, 1, 0.99).unwrap().with_execution(exec);
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| mc_finite_n_lpcb(&scene, &cfg, order).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, fading_scan, erasure_scan, interference_scan, monte_carlo);
criterion_main!(benches);
