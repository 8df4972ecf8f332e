use std::hint::black_box;
use std::path::Path;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pvoc::permanence::permanence_table;
use pvoc::replication::vertex_replication_with;
use pvoc::study::sample_subnetwork;
use pvoc::{louvain, onmi, Cover, Execution, Graph, LouvainConfig, Partition, ReplicationConfig};

struct Fixture {
    graph: Graph,
    truth: Cover,
    partition: Partition,
}

fn fixture() -> Fixture {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/lfr_mu01");
    let graph = pvoc::io::read_edge_list_file(dir.join("network.dat")).unwrap();
    let truth = pvoc::io::read_lfr_communities_file(dir.join("community.dat"), graph.labels()).unwrap();
    let partition = louvain(&graph, &LouvainConfig::default()).unwrap();
    Fixture {
        graph,
        truth,
        partition,
    }
}

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn bench_permanence(c: &mut Criterion) {
    let f = fixture();
    let mut group = c.benchmark_group("permanence_table");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| permanence_table(black_box(&f.graph), &f.partition, exec))
        });
    }
    group.finish();
}

fn bench_replication(c: &mut Criterion) {
    let f = fixture();
    let cfg = ReplicationConfig::default();
    let mut group = c.benchmark_group("vertex_replication");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| vertex_replication_with(black_box(&f.graph), &f.partition, &cfg, exec).unwrap())
        });
    }
    group.finish();
}

/// Twenty sampled subnetworks, each run through detection and scored, the
/// way the `bench` subcommand spreads samples over the pool.
fn bench_samples(c: &mut Criterion) {
    let f = fixture();
    let cfg = ReplicationConfig::default();
    let seeds: Vec<u64> = (0..20).collect();
    let run = |&seed: &u64| {
        let s = sample_subnetwork(&f.graph, &f.truth, seed).unwrap();
        let p = louvain(&s.graph, &LouvainConfig::default()).unwrap();
        let r = vertex_replication_with(&s.graph, &p, &cfg, Execution::Sequential).unwrap();
        onmi(&r.cover, &s.truth).unwrap()
    };
    let mut group = c.benchmark_group("bench_samples");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| exec.map(&seeds, run)));
    }
    group.finish();
}

criterion_group!(benches, bench_permanence, bench_replication, bench_samples);
criterion_main!(benches);
