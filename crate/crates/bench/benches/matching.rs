use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use mcplab::sampler::threshold_p;
use mcplab::{
    achieve_profile, enumerate_mcp, max_matching, monochromatic_perfect_matching, recolor_step, sample_graph, ColorProfile, ColorSpec,
    ColoredBipartiteGraph, SampleParams,
};

fn graph(n: usize, colors: &ColorSpec, omega: f64, seed: u64) -> ColoredBipartiteGraph {
    let p = threshold_p(n, omega, colors.alpha_min()).unwrap();
    sample_graph(&SampleParams::new(n, p, colors.clone(), seed).unwrap())
}

fn benches(c: &mut Criterion) {
    let three = ColorSpec::new(vec![0.5, 0.25, 0.25]).unwrap();
    let two = ColorSpec::uniform(2).unwrap();

    c.bench_function("sample_graph n=1000 q=3", |b| {
        let p = threshold_p(1000, 6.0, 0.25).unwrap();
        b.iter(|| sample_graph(black_box(&SampleParams::new(1000, p, three.clone(), 1).unwrap())))
    });

    let g = graph(1000, &three, 6.0, 2);
    c.bench_function("max_matching n=1000 all colors", |b| {
        b.iter(|| max_matching(black_box(&g), &[1, 2, 3]).unwrap())
    });
    c.bench_function("monochromatic_perfect_matching n=1000", |b| {
        b.iter(|| monochromatic_perfect_matching(black_box(&g), 1))
    });

    let m = monochromatic_perfect_matching(&g, 1).unwrap();
    c.bench_function("recolor_step n=1000", |b| b.iter(|| recolor_step(black_box(&g), &m, 1, 2, 7)));

    let g2 = graph(200, &two, 4.0, 3);
    c.bench_function("achieve_profile n=200 to (100,100)", |b| {
        b.iter(|| achieve_profile(black_box(&g2), &ColorProfile(vec![100, 100]), 1).is_ok())
    });

    let small = sample_graph(&SampleParams::new(14, 0.4, three.clone(), 4).unwrap());
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    group.bench_function("enumerate_mcp n=14 q=3", |b| b.iter(|| enumerate_mcp(black_box(&small)).unwrap()));
    group.finish();
}

criterion_group!(matching, benches);
criterion_main!(matching);
