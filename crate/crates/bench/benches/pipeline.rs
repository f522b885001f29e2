use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use markerdrift::index::build_index_partitioned;
use markerdrift::{build_index, builtin_lexicon, parse_query, tokenize};
use markerdrift_bench::corpus;
use std::hint::black_box;

fn bench_tokenize(c: &mut Criterion) {
    let docs = corpus(200, 200);
    let bytes: usize = docs.iter().map(|d| d.text.len()).sum();
    let mut g = c.benchmark_group("tokenize");
    g.throughput(Throughput::Bytes(bytes as u64));
    g.bench_function("1000 docs", |b| {
        b.iter(|| {
            docs.iter()
                .map(|d| tokenize(black_box(&d.text)).len())
                .sum::<usize>()
        })
    });
    g.finish();
}

fn bench_build(c: &mut Criterion) {
    let lex = builtin_lexicon();
    let docs = corpus(2000, 200);
    let mut g = c.benchmark_group("build_index");
    g.sample_size(10);
    g.throughput(Throughput::Elements(docs.len() as u64));
    g.bench_function("sequential", |b| {
        b.iter(|| build_index(black_box(&docs), &lex).unwrap())
    });
    for parts in [4, 16] {
        g.bench_with_input(BenchmarkId::new("partitioned", parts), &parts, |b, &p| {
            b.iter(|| build_index_partitioned(black_box(&docs), &lex, p).unwrap())
        });
    }
    g.finish();
}

fn bench_eval(c: &mut Criterion) {
    let lex = builtin_lexicon();
    let docs = corpus(2000, 50);
    let idx = build_index(&docs, &lex).unwrap();
    let mut g = c.benchmark_group("eval_count");
    for text in [
        "intricate",
        "intricate AND meticulous",
        "atleast(2, strong)",
        "any(strong) AND any(disclosure) OR atleast(3, adjective)",
    ] {
        let q = parse_query(text, &idx).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(text), &q, |b, q| {
            b.iter(|| idx.eval_count(black_box(q), 2023).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_tokenize, bench_build, bench_eval);
criterion_main!(benches);
