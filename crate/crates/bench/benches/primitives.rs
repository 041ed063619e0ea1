use std::hint::black_box;

use byzcode_core::algebra::FieldSpec;
use byzcode_core::analytic::{overhead_generation, overhead_packet};
use byzcode_core::detect::{gen_hash_verify, sig_keygen, sig_verify, signing_field, HashParams};
use byzcode_core::rlnc::{decode, random_generation, GenerationParams};
use byzcode_core::sim::default_signing_group;
use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn field_mul(c: &mut Criterion) {
    let gf = FieldSpec::gf256();
    let fp = FieldSpec::prime(4_294_967_291).unwrap();
    c.bench_function("gf256 axpy 1024", |b| {
        let x: Vec<u64> = (0..1024).map(|i| i % 256).collect();
        let mut acc = vec![0u64; 1024];
        b.iter(|| gf.axpy(black_box(&mut acc), black_box(0x53), black_box(&x)))
    });
    c.bench_function("prime 2^32-5 mul", |b| {
        b.iter(|| fp.mul(black_box(123_456_789), black_box(987_654_321)))
    });
}

fn decoding(c: &mut Criterion) {
    let f = FieldSpec::gf256();
    let hash = HashParams::new(50, 1, f).unwrap();
    let params = GenerationParams::fit(f, 1000, 10, Some(hash.clone())).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (gen, _) = random_generation(0, params, &mut rng);
    let packets = gen.encode_innovative(&mut rng);
    c.bench_function("decode G=10 n=1000 gf256", |b| {
        b.iter(|| decode(black_box(&packets), 10).unwrap())
    });
    let decoded = decode(&packets, 10).unwrap();
    c.bench_function("hash verify G=10", |b| {
        b.iter(|| gen_hash_verify(black_box(&decoded), &hash).unwrap())
    });
}

fn signature(c: &mut Criterion) {
    let group = default_signing_group();
    let params = GenerationParams::fit(signing_field(group).unwrap(), 1000, 10, None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (gen, _) = random_generation(0, params, &mut rng);
    let key = sig_keygen(&gen, group, &mut rng).unwrap();
    let packet = gen.encode(1, &mut rng).remove(0);
    c.bench_function("signature verify 32-bit P", |b| {
        b.iter(|| sig_verify(black_box(&packet.vector), &key).unwrap())
    });
    c.bench_function("signature keygen 32-bit P", |b| {
        b.iter(|| sig_keygen(&gen, group, &mut rng).unwrap())
    });
}

fn analytic_sweep(c: &mut Criterion) {
    c.bench_function("analytic sweep 1001 points", |b| {
        b.iter(|| {
            (0..=1000)
                .map(|i| i as f64 / 1000.0)
                .map(|p| {
                    overhead_generation(p, 1000.0, 10, 200.0).unwrap()
                        + overhead_packet(p, 1000.0, 60.0).unwrap()
                })
                .sum::<f64>()
        })
    });
}

criterion_group!(benches, field_mul, decoding, signature, analytic_sweep);
criterion_main!(benches);
