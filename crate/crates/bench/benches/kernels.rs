use criterion::{black_box, criterion_group, criterion_main, Criterion};
use memassoc::circuit::{metrics, pavlov2, pavlov3, run_chain, GainProfile};
use memassoc::device::{step, DEFAULT_DT};
use memassoc::fit::{objective, params_to_vec, simulate_current, to_search_space, IvTrace, SimulateOptions};
use memassoc::vision::synthetic::SyntheticSuite;
use memassoc::vision::{classify, train_all, ArrayState, InferConfig, TrainConfig};
use memassoc::{DeviceParams, DeviceState};

fn device(c: &mut Criterion) {
    let p = DeviceParams::default();
    c.bench_function("device/step_10k", |b| {
        b.iter(|| {
            let mut s = DeviceState::off(&p);
            for k in 0..10_000 {
                let v = if k % 2 == 0 { 0.35 } else { -0.2 };
                s = step(&p, s, black_box(v), DEFAULT_DT).unwrap();
            }
            s
        })
    });
}

fn fit(c: &mut Criterion) {
    let p = DeviceParams::default();
    let real = simulate_current(&p, &IvTrace::sinusoid(0.5, 10.0, 0.3, DEFAULT_DT).unwrap()).unwrap();
    let u = to_search_space(&params_to_vec(&p));
    let sim = SimulateOptions::default();
    c.bench_function("fit/objective_3001_samples", |b| b.iter(|| objective(black_box(&u), &real, &p, &sim)));
}

fn circuit(c: &mut Criterion) {
    let mut g = c.benchmark_group("circuit");
    g.sample_size(20);
    let two = pavlov2(GainProfile::HighGain);
    let three = pavlov3();
    g.bench_function("pavlov2_run_and_metrics", |b| b.iter(|| metrics(&run_chain(&two).unwrap()).unwrap()));
    g.bench_function("pavlov3_run", |b| b.iter(|| run_chain(&three).unwrap()));
    g.finish();
}

fn vision(c: &mut Criterion) {
    let suite = SyntheticSuite::generate(42, 0.1);
    let p = DeviceParams::default();
    let cfg = TrainConfig::default();
    let mut g = c.benchmark_group("vision");
    g.sample_size(20);
    g.bench_function("train_10_pairs", |b| {
        b.iter(|| train_all(ArrayState::standard(p), suite.train.iter().map(|(i, t)| (i, t)), &cfg).unwrap())
    });
    let array = train_all(ArrayState::standard(p), suite.train.iter().map(|(i, t)| (i, t)), &cfg).unwrap();
    let infer = InferConfig { similarity_threshold: 0.3, ..Default::default() };
    g.bench_function("classify", |b| b.iter(|| classify(&array, black_box(&suite.test[0].image), &infer).unwrap()));
    g.finish();
}

criterion_group!(benches, device, fit, circuit, vision);
criterion_main!(benches);
