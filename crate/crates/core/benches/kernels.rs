//! Parallel vs sequential throughput of the data-parallel kernels: corpus
//! ingestion, feature tallies, generalized Jaccard, and bulk SHA-1 matching.
//! The `par` benchmarks exist only when the `parallel` feature is enabled
//! (it is by default); `seq` always benches the sequential reference path.

use std::io::Write;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use guessmetrics::corpus::{load_plaintext_seq, CorpusFormat, PasswordMultiset};
use guessmetrics::features::{feature_vector_seq, FeatureConfig, Weighting};
use guessmetrics::guessers::GuessList;
use guessmetrics::hashed::{
    crack_attribution_seq, hash_multiset, HashAlgorithm, HashScheme,
};
use guessmetrics::metrics::generalized_jaccard_seq;

#[cfg(feature = "parallel")]
use guessmetrics::corpus::load_plaintext;
#[cfg(feature = "parallel")]
use guessmetrics::features::feature_vector;
#[cfg(feature = "parallel")]
use guessmetrics::hashed::crack_attribution;
#[cfg(feature = "parallel")]
use guessmetrics::metrics::generalized_jaccard;

const CORPUS_LINES: u64 = 1_000_000;
const DISTINCT: u64 = 200_000;

fn synthetic_corpus(dir: &tempfile::TempDir, name: &str, offset: u64) -> std::path::PathBuf {
    let path = dir.path().join(name);
    let mut w = std::io::BufWriter::new(std::fs::File::create(&path).unwrap());
    for i in 0..CORPUS_LINES {
        writeln!(w, "pw{}", (i * 13 + offset) % DISTINCT).unwrap();
    }
    w.flush().unwrap();
    path
}

fn synthetic_multiset(label: &str, offset: u64) -> PasswordMultiset {
    PasswordMultiset::from_counts(
        label,
        (0..DISTINCT).map(|i| (format!("pw{}", (i * 13 + offset) % DISTINCT), i % 11 + 1)),
    )
}

fn bench_ingest(c: &mut Criterion) {
    let dir = tempfile::tempdir().unwrap();
    let path = synthetic_corpus(&dir, "bench.txt", 0);
    let mut group = c.benchmark_group("ingest");
    group.sample_size(10);
    group.throughput(Throughput::Elements(CORPUS_LINES));
    group.bench_with_input(BenchmarkId::new("seq", CORPUS_LINES), &path, |b, path| {
        b.iter(|| load_plaintext_seq(path, CorpusFormat::RawLines).unwrap())
    });
    #[cfg(feature = "parallel")]
    group.bench_with_input(BenchmarkId::new("par", CORPUS_LINES), &path, |b, path| {
        b.iter(|| load_plaintext(path, CorpusFormat::RawLines).unwrap())
    });
    group.finish();
}

fn bench_features(c: &mut Criterion) {
    let m = synthetic_multiset("bench", 0);
    let cfg = FeatureConfig::default();
    let mut group = c.benchmark_group("feature_vector");
    group.sample_size(10);
    group.throughput(Throughput::Elements(DISTINCT));
    group.bench_function(BenchmarkId::new("seq", DISTINCT), |b| {
        b.iter(|| feature_vector_seq(&m, Weighting::ByOccurrence, &cfg).unwrap())
    });
    #[cfg(feature = "parallel")]
    group.bench_function(BenchmarkId::new("par", DISTINCT), |b| {
        b.iter(|| feature_vector(&m, Weighting::ByOccurrence, &cfg).unwrap())
    });
    group.finish();
}

fn bench_generalized_jaccard(c: &mut Criterion) {
    let a = synthetic_multiset("a", 0);
    let b_set = synthetic_multiset("b", DISTINCT / 2);
    let mut group = c.benchmark_group("generalized_jaccard");
    group.sample_size(10);
    group.throughput(Throughput::Elements(DISTINCT));
    group.bench_function(BenchmarkId::new("seq", DISTINCT), |b| {
        b.iter(|| generalized_jaccard_seq(&a, &b_set).unwrap())
    });
    #[cfg(feature = "parallel")]
    group.bench_function(BenchmarkId::new("par", DISTINCT), |b| {
        b.iter(|| generalized_jaccard(&a, &b_set).unwrap())
    });
    group.finish();
}

fn bench_sha1_matching(c: &mut Criterion) {
    const GUESSES: u64 = 100_000;
    let scheme = HashScheme::unsalted(HashAlgorithm::Sha1);
    let target_set = PasswordMultiset::from_counts(
        "target",
        (0..GUESSES).map(|i| (format!("t{i}"), 1u64)),
    );
    let target = hash_multiset(&target_set, scheme, |_| Vec::new());
    let guesses = GuessList::from_unique(
        "bench",
        u64::MAX,
        (0..GUESSES).map(|i| if i % 2 == 0 { format!("t{}", i / 2) } else { format!("m{i}") }),
    )
    .unwrap();
    let mut group = c.benchmark_group("sha1_crack");
    group.sample_size(10);
    group.throughput(Throughput::Elements(GUESSES));
    group.bench_function(BenchmarkId::new("seq", GUESSES), |b| {
        b.iter(|| crack_attribution_seq(&guesses, &target).cracked_entries())
    });
    #[cfg(feature = "parallel")]
    group.bench_function(BenchmarkId::new("par", GUESSES), |b| {
        b.iter(|| crack_attribution(&guesses, &target).cracked_entries())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_ingest,
    bench_features,
    bench_generalized_jaccard,
    bench_sha1_matching
);
criterion_main!(benches);
