use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use qfem_bench::{bench_config, bench_problem};
use qfem_core::circuit::BitString;
use qfem_core::fixedpoint::FixedPointFormat;
use qfem_core::mulpoly::build_mul;
use qfem_core::newton::{build_sqrt, NewtonConfig};
use qfem_core::oracle::build_oracle_theta;

fn synthesis(c: &mut Criterion) {
    let mut group = c.benchmark_group("synthesis");
    for r in [8u32, 12, 16] {
        group.bench_with_input(BenchmarkId::new("mul", r), &r, |b, &r| {
            let fmt = FixedPointFormat::signed(r, r / 2).unwrap();
            b.iter(|| black_box(build_mul(fmt)));
        });
        group.bench_with_input(BenchmarkId::new("sqrt", r), &r, |b, &r| {
            let fmt = FixedPointFormat::unsigned(r, r - 2).unwrap();
            let cfg = NewtonConfig::classical(3, 1.0, (0.25, 1.0));
            b.iter(|| black_box(build_sqrt(fmt, &cfg)));
        });
    }
    group.bench_function("oracle", |b| {
        let problem = bench_problem();
        let config = bench_config();
        b.iter(|| black_box(build_oracle_theta(&problem, &config).unwrap()));
    });
    group.finish();
}

fn simulation(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate");
    let fmt = FixedPointFormat::signed(12, 6).unwrap();
    let mul = build_mul(fmt);
    let mut input = BitString::zeros(mul.num_qubits() as usize);
    input.set_register_code(mul.register("a").unwrap(), 0b0110010101011);
    input.set_register_code(mul.register("b").unwrap(), 0b1010101010101);
    group.bench_function("mul r=12", |b| {
        b.iter(|| black_box(mul.simulate(&input).unwrap()))
    });
    let oracle = build_oracle_theta(&bench_problem(), &bench_config()).unwrap();
    let mut oin = BitString::zeros(oracle.circuit.num_qubits() as usize);
    oin.set_register_code(oracle.reg("i"), 3);
    oin.set_register_code(oracle.reg("j"), 4);
    group.bench_function("oracle access", |b| {
        b.iter(|| black_box(oracle.circuit.simulate(&oin).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, synthesis, simulation);
criterion_main!(benches);
