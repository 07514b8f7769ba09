use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cre_gsa::baselines::sobol_indices;
use cre_gsa::estimators::{
    conditional_cre_1_with, conditional_cre_2_with, empirical_cre, GridParams,
};
use cre_gsa::importance::decompose_with;
use cre_gsa::models::{BenchmarkModel, Model};
use cre_gsa::{Execution, RngSeed, SampleMatrix};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn wave(model: BenchmarkModel, n: usize) -> SampleMatrix {
    SampleMatrix::generate(
        &model,
        &model.default_inputs(),
        n,
        RngSeed::default(),
        Execution::Parallel,
    )
    .unwrap()
}

fn empirical(c: &mut Criterion) {
    let mut g = c.benchmark_group("empirical_cre");
    for n in [1_000, 10_000, 20_000] {
        let x = wave(BenchmarkModel::AppendixB, n);
        g.bench_with_input(
            BenchmarkId::from_parameter(n),
            x.column(0).unwrap(),
            |b, x| b.iter(|| empirical_cre(black_box(x)).unwrap()),
        );
    }
    g.finish();
}

fn conditional(c: &mut Criterion) {
    let b_wave = wave(BenchmarkModel::AppendixB, 20_000);
    let c_wave = wave(BenchmarkModel::AppendixC, 20_000);
    let mut g = c.benchmark_group("conditional_cre");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new("one_variable", name), |b| {
            b.iter(|| {
                conditional_cre_1_with(b_wave.column(1).unwrap(), b_wave.output(), 500, exec)
                    .unwrap()
            })
        });
        g.bench_function(BenchmarkId::new("two_variables", name), |b| {
            b.iter(|| {
                conditional_cre_2_with(
                    c_wave.column(1).unwrap(),
                    c_wave.column(2).unwrap(),
                    c_wave.output(),
                    20,
                    20,
                    exec,
                )
                .unwrap()
            })
        });
    }
    g.finish();
}

fn decomposition(c: &mut Criterion) {
    let grid = GridParams::default();
    let risk = wave(BenchmarkModel::RiskFaultTree, 40_000);
    let mut g = c.benchmark_group("decompose_risk_40k");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| decompose_with(&risk, &grid, None, exec).unwrap())
        });
    }
    g.finish();
}

fn sampling_and_sobol(c: &mut Criterion) {
    let model = BenchmarkModel::BearingAIso;
    let specs = model.default_inputs();
    let mut g = c.benchmark_group("bearing_20k");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new("sample", name), |b| {
            b.iter(|| {
                SampleMatrix::generate(&model, &specs, 20_000, RngSeed::default(), exec).unwrap()
            })
        });
        g.bench_function(BenchmarkId::new("sobol", name), |b| {
            b.iter(|| {
                sobol_indices(
                    &model as &dyn Model,
                    &specs,
                    20_000,
                    RngSeed::default(),
                    exec,
                )
                .unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(
    benches,
    empirical,
    conditional,
    decomposition,
    sampling_and_sobol
);
criterion_main!(benches);
