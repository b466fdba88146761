use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use logmin_bench::synthetic_log;
use logmin_core::{
    frequency_report, kmeans, mine_store, partition, FeaturePoint, FrequencyMode, MiningConfig, PrefixTable,
};

fn bench_partition(c: &mut Criterion) {
    let log = synthetic_log(100_000, 1);
    c.bench_function("partition-100k", |b| b.iter(|| partition(&log).unwrap()));
}

fn bench_mine(c: &mut Criterion) {
    let table = PrefixTable::from_pairs([("98", "P1"), ("97", "P2"), ("70", "P3")])
        .unwrap()
        .with_self_provider("P1");
    let config = MiningConfig::default();
    let mut group = c.benchmark_group("mine_store");
    for n in [1_000, 10_000, 50_000] {
        let store = partition(&synthetic_log(n, 2)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &store, |b, store| {
            b.iter(|| mine_store(store, &config, &table).unwrap())
        });
    }
    group.finish();
}

fn bench_kmeans(c: &mut Criterion) {
    let points: Vec<FeaturePoint> = (0..2_000)
        .map(|i| FeaturePoint::new(format!("p{i}"), vec![(i % 97) as f64, ((i * 31) % 53) as f64]))
        .collect();
    c.bench_function("kmeans-2k-k8", |b| b.iter(|| kmeans(&points, 8, 42).unwrap()));
}

fn bench_frequency_cluster(c: &mut Criterion) {
    let store = partition(&synthetic_log(10_000, 3)).unwrap();
    let config = MiningConfig::default();
    c.bench_function("frequency-cluster-10k", |b| {
        b.iter(|| frequency_report(&store, &config, FrequencyMode::Cluster, 0).unwrap())
    });
}

criterion_group!(
    benches,
    bench_partition,
    bench_mine,
    bench_kmeans,
    bench_frequency_cluster
);
criterion_main!(benches);
