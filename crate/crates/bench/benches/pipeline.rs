use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pingpong_bench::{cyclic_pair, free_ball, subgroup, surface_ball};
use pingpong_core::cayley::{estimate_delta, DeltaMode};
use pingpong_core::pingpong::{certify, oracle_free_product_check, CertifyOptions};
use pingpong_core::residual::{find_deep_quotient, shortest_kernel_element, FiniteQuotientSpec};
use pingpong_core::subgroup::{estimate_mu, MembershipOracle, RelativeBall};
use pingpong_core::Alphabet;

fn balls(c: &mut Criterion) {
    let mut g = c.benchmark_group("ball");
    for r in [4, 6, 8] {
        g.bench_with_input(BenchmarkId::new("free2", r), &r, |b, &r| b.iter(|| free_ball(r)));
    }
    for r in [2, 3] {
        g.bench_with_input(BenchmarkId::new("genus2", r), &r, |b, &r| b.iter(|| surface_ball(r)));
    }
    g.finish();
}

fn metric(c: &mut Criterion) {
    let f6 = free_ball(6);
    let s3 = surface_ball(3);
    c.bench_function("delta/free2-r6", |b| {
        b.iter(|| estimate_delta(&f6, DeltaMode::Exhaustive).unwrap())
    });
    c.bench_function("delta/genus2-r3", |b| {
        b.iter(|| estimate_delta(&s3, DeltaMode::Exhaustive).unwrap())
    });
    let m = MembershipOracle::build(&subgroup(&f6, "H", &["ab"]), &f6);
    c.bench_function("mu/free2-ab-r6", |b| b.iter(|| estimate_mu(&m, &f6).unwrap()));
    let h = MembershipOracle::build(&subgroup(&f6, "H", &["a"]), &f6);
    c.bench_function("relball/free2-a-r4", |b| b.iter(|| RelativeBall::build(&h, 4).unwrap()));
}

fn certification(c: &mut Criterion) {
    let f6 = free_ball(6);
    let mut g = c.benchmark_group("certify");
    g.sample_size(10);
    let quick = CertifyOptions {
        oracle_maxlen: Some(8),
        ..CertifyOptions::default()
    };
    let pair = cyclic_pair(&f6, "a", "b");
    g.bench_function("free2-a-b", |b| b.iter(|| certify(&pair, &quick)));
    let schottky = cyclic_pair(&f6, "ab", "aB");
    g.bench_function("free2-ab-aB", |b| b.iter(|| certify(&schottky, &quick)));
    for n in [6, 8, 10] {
        g.bench_with_input(BenchmarkId::new("oracle/free2-a-b", n), &n, |b, &n| {
            b.iter(|| oracle_free_product_check(&pair, n, usize::MAX).unwrap())
        });
    }
    g.finish();
}

fn quotients(c: &mut Criterion) {
    let spec = FiniteQuotientSpec::parse(
        "perm: a = (1 2 3 4 5 6 7)\nperm: b = (1 3 2 6)(4 5)",
        &Alphabet::standard(2),
    )
    .unwrap();
    c.bench_function("kernel/degree7", |b| {
        b.iter(|| shortest_kernel_element(black_box(&spec)))
    });
    c.bench_function("deep-quotient/depth4", |b| {
        b.iter(|| find_deep_quotient(2, 4, 2_000_000, black_box(0)).unwrap())
    });
}

criterion_group!(benches, balls, metric, certification, quotients);
criterion_main!(benches);
