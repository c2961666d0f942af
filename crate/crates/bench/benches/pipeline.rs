use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use magloc_bench::{calibrated_rig, static_stream};
use magloc_core::{bin_amplitude, locate, FilterSpec, SolverState, SpectralAmplitudes, Tracker, Vec2};

fn tracker_step(c: &mut Criterion) {
    for n in [50usize, 20] {
        let rig = calibrated_rig(n);
        let spec = FilterSpec::for_rig(&rig).unwrap();
        let samples = static_stream(&rig, Vec2::new(3.0, 6.0), 200.0);
        let mut tr = Tracker::new(&rig, &spec, SolverState::new()).unwrap();
        let mut i = 0;
        c.bench_function(&format!("tracker_step_n{n}"), |b| {
            b.iter(|| {
                let s = samples[i % samples.len()];
                i += 1;
                // keep timestamps monotone across wrap-around
                let s = magloc_core::SensorSample::new(i as f64 / 100.0, s.field);
                black_box(tr.step(black_box(s)).unwrap())
            })
        });
    }
}

fn solver(c: &mut Criterion) {
    let rig = calibrated_rig(50);
    let h = SpectralAmplitudes { h20: 12.0, h30: 9.0 };
    c.bench_function("locate_cold", |b| {
        b.iter_batched(
            SolverState::new,
            |mut s| locate(black_box(h), &rig, &mut s).unwrap(),
            BatchSize::SmallInput,
        )
    });
    let mut warm = SolverState::new();
    locate(h, &rig, &mut warm).unwrap();
    c.bench_function("locate_warm", |b| {
        b.iter(|| locate(black_box(h), &rig, &mut warm).unwrap())
    });
}

fn tone(c: &mut Criterion) {
    let x: Vec<f64> = (0..50).map(|k| (0.4 * std::f64::consts::PI * k as f64).sin()).collect();
    c.bench_function("bin_amplitude_n50", |b| {
        b.iter(|| bin_amplitude(black_box(&x), 20.0, 100.0).unwrap())
    });
}

fn synth(c: &mut Criterion) {
    let rig = calibrated_rig(50);
    c.bench_function("synthesize_10s", |b| {
        b.iter(|| static_stream(&rig, Vec2::new(4.0, 5.0), 10.0))
    });
}

criterion_group!(benches, tracker_step, solver, tone, synth);
criterion_main!(benches);
