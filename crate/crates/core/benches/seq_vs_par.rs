use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use krgraph::census::census_counts;
use krgraph::enumeration::{automorphisms, enumerate_unlabeled};
use krgraph::topology::{diameter, node_connectivity};
use krgraph::{Exec, Graph};

const MODES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_unlabeled");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, 6), &6usize, |b, &n| {
            b.iter(|| enumerate_unlabeled(black_box(n), exec).unwrap().codes.len())
        });
    }
    group.finish();
}

fn census_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("census_n24_k3");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, 64), |b| {
            b.iter(|| {
                exec.map_range(0..64, |s| {
                    let g = Graph::random(24, s).unwrap();
                    census_counts(&g, 3).unwrap()[7]
                })
            })
        });
    }
    group.finish();
}

fn topology_sweep(c: &mut Criterion) {
    let graphs: Vec<Graph> = (0..32).map(|s| Graph::random(64, s).unwrap()).collect();
    let mut group = c.benchmark_group("topology_n64");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, graphs.len()), |b| {
            b.iter(|| exec.map_slice(&graphs, |g| (diameter(g), node_connectivity(g).unwrap())))
        });
    }
    group.finish();
}

fn rigidity_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("automorphisms_n10");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, 1000), |b| {
            b.iter(|| {
                exec.map_range(0..1000, |s| {
                    automorphisms(&Graph::random(10, s).unwrap()).unwrap().rigid
                })
                .into_iter()
                .filter(|&r| r)
                .count()
            })
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    enumeration,
    census_sampling,
    topology_sweep,
    rigidity_sweep
);
criterion_main!(benches);
