use std::hint::black_box;

use bandrec::kernels::{bessel_k, radial_inverse_ft, Kernel, RadialProfile};
use criterion::{criterion_group, criterion_main, Criterion};

fn spatial(c: &mut Criterion) {
    let radii: Vec<f64> = (0..256).map(|k| 0.05 * k as f64).collect();
    let kernels = [
        ("gaussian", Kernel::gaussian(4.0, 1).unwrap()),
        ("imq", Kernel::imq(1.5, 4.0, 1).unwrap()),
        ("pexp_table", Kernel::pexp(1.0, 4.0, 1).unwrap()),
    ];
    let mut g = c.benchmark_group("spatial_radial");
    for (name, k) in &kernels {
        g.bench_function(*name, |b| b.iter(|| radii.iter().map(|&r| k.spatial_radial(black_box(r)).unwrap()).sum::<f64>()));
    }
    g.finish();
}

fn spectral(c: &mut Criterion) {
    let imq = Kernel::imq(1.5, 4.0, 2).unwrap();
    c.bench_function("imq_spectrum_d2", |b| b.iter(|| imq.spectral_radial(black_box(0.7)).unwrap()));
    c.bench_function("bessel_k_1.5", |b| b.iter(|| bessel_k(1.5, black_box(2.3)).unwrap()));
}

fn transforms(c: &mut Criterion) {
    let mut g = c.benchmark_group("radial_inverse_ft");
    g.sample_size(20);
    let gauss = RadialProfile::StretchedExp { scale: 1.0, alpha: 0.25, p: 2.0 };
    let pexp = RadialProfile::StretchedExp { scale: 1.0, alpha: 1.0, p: 1.0 };
    for d in 1..=3 {
        g.bench_function(format!("gaussian_d{d}"), |b| b.iter(|| radial_inverse_ft(&gauss, d, black_box(1.3)).unwrap()));
        g.bench_function(format!("pexp_d{d}"), |b| b.iter(|| radial_inverse_ft(&pexp, d, black_box(1.3)).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, spatial, spectral, transforms);
criterion_main!(benches);
