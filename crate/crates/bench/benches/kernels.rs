use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use apqaoa_core::models::{generate, m_star, ModelKind, ModelSpec};
use apqaoa_core::simulator::{apply_mixer, apply_phase, expectation, init_plus, run_circuit};
use apqaoa_core::spectrum::{build_spectrum, normalize, NormalizationMode, SpectrumTable};
use apqaoa_core::strategies::qaa_init;

fn instance(n: usize, seed: u64) -> SpectrumTable {
    let spec = ModelSpec {
        kind: ModelKind::Fs,
        n,
        m: m_star(n),
        k: 3,
        seed,
    };
    build_spectrum(&generate(&spec).unwrap().formula).unwrap()
}

fn bench_layers(c: &mut Criterion) {
    let table = instance(16, 1);
    let norm = normalize(&table, NormalizationMode::default()).unwrap();

    c.bench_function("phase_layer_n16", |b| {
        b.iter_batched_ref(
            || init_plus(16).unwrap(),
            |state| apply_phase(state, &table, norm.phase_scale, black_box(0.37)),
            BatchSize::LargeInput,
        )
    });

    c.bench_function("mixer_layer_n16", |b| {
        b.iter_batched_ref(
            || init_plus(16).unwrap(),
            |state| apply_mixer(state, norm.mixer_scale, black_box(1.2)),
            BatchSize::LargeInput,
        )
    });

    c.bench_function("full_circuit_p16_n16", |b| {
        let params = qaa_init(16);
        b.iter(|| run_circuit(&table, &norm, black_box(&params)).unwrap())
    });

    c.bench_function("expectation_n16", |b| {
        let state = run_circuit(&table, &norm, &qaa_init(16)).unwrap();
        b.iter(|| expectation(&state, &table, norm.phase_scale, None))
    });
}

fn bench_generation(c: &mut Criterion) {
    c.bench_function("fs_generate_n12", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed += 1;
            let spec = ModelSpec {
                kind: ModelKind::Fs,
                n: 12,
                m: m_star(12),
                k: 3,
                seed,
            };
            generate(&spec).unwrap()
        })
    });

    c.bench_function("spectrum_build_n16", |b| {
        let spec = ModelSpec {
            kind: ModelKind::Fs,
            n: 16,
            m: m_star(16),
            k: 3,
            seed: 5,
        };
        let gen = generate(&spec).unwrap();
        b.iter(|| build_spectrum(&gen.formula).unwrap())
    });
}

criterion_group!(benches, bench_layers, bench_generation);
criterion_main!(benches);
