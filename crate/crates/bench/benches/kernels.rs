use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use semilab_bench::{gaussian_field, gaussian_state};
use semilab_core::dynamics::{QuantumSolver, VlasovSolver};
use semilab_core::quantize::{weyl_quantize, wigner_transform, MidpointSource};
use semilab_core::schatten::singular_values;
use semilab_core::KernelSpec;

fn quantization(c: &mut Criterion) {
    let mut g = c.benchmark_group("quantization");
    g.sample_size(10);
    for n in [128usize, 256] {
        let f = gaussian_field(n, 128);
        let hbar = 8.0 * 4.0 / (n as f64 * 1.25);
        g.bench_with_input(BenchmarkId::new("weyl", n), &f, |b, f| {
            b.iter(|| weyl_quantize(f, hbar, MidpointSource::SpectralInterpolated).unwrap())
        });
        let rho = weyl_quantize(&f, hbar, MidpointSource::SpectralInterpolated).unwrap();
        g.bench_with_input(BenchmarkId::new("wigner", n), &rho, |b, r| b.iter(|| wigner_transform(r, f.grid.xi).unwrap()));
    }
    g.finish();
}

fn norms(c: &mut Criterion) {
    let mut g = c.benchmark_group("schatten");
    g.sample_size(10);
    for n in [128usize, 256] {
        let rho = gaussian_state(n, 8.0 * 4.0 / (n as f64 * 1.25));
        g.bench_with_input(BenchmarkId::new("singular_values", n), &rho, |b, r| b.iter(|| singular_values(&r.matrix).unwrap()));
    }
    g.finish();
}

fn steps(c: &mut Criterion) {
    let mut g = c.benchmark_group("steps");
    g.sample_size(10);
    let k = KernelSpec::power(1, 0.5, 1.0);
    let n = 128;
    let hbar = 0.2;
    let f0 = gaussian_field(n, 128);
    let rho0 = gaussian_state(n, hbar);
    g.bench_function("vlasov_128x128", |b| {
        let mut s = VlasovSolver::new(f0.grid, k).unwrap();
        let mut f = f0.clone();
        b.iter(|| s.step(&mut f, 0.005).unwrap())
    });
    g.bench_function("hartree_128", |b| {
        let mut s = QuantumSolver::hartree(rho0.grid_x, hbar, k).unwrap();
        let mut r = rho0.clone();
        b.iter(|| s.step(&mut r, 0.005).unwrap())
    });
    g.bench_function("hartree_fock_128", |b| {
        let mut s = QuantumSolver::hartree_fock(rho0.grid_x, hbar, k).unwrap();
        let mut r = rho0.clone();
        b.iter(|| s.step(&mut r, 0.005).unwrap())
    });
    g.finish();
}

criterion_group!(benches, quantization, norms, steps);
criterion_main!(benches);
