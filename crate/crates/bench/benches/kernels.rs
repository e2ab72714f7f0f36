use criterion::{black_box, criterion_group, criterion_main, Criterion};
use ladder_core::{
    lowest_eigenpairs, quadratic_coefficients, renormalize_g, setup, CouplingSet, Representation,
    SolverConfig,
};

fn couplings() -> CouplingSet {
    CouplingSet::new(15.0, 5.0, 3.0).unwrap()
}

fn matvec(c: &mut Criterion) {
    for rep in [Representation::Su2, Representation::So4] {
        let (_, ham) = setup(rep, 6, &couplings()).unwrap();
        let x: Vec<f64> = (0..ham.dim()).map(|i| (i as f64).sin()).collect();
        let mut y = vec![0.0; ham.dim()];
        c.bench_function(&format!("matvec_{rep:?}_L6"), |b| {
            b.iter(|| {
                y.iter_mut().for_each(|v| *v = 0.0);
                ham.apply(15.0, black_box(&x), &mut y);
            })
        });
    }
}

fn lanczos(c: &mut Criterion) {
    let (_, ham) = setup(Representation::Su2, 6, &couplings()).unwrap();
    let config = SolverConfig {
        dense_threshold: 0,
        ..SolverConfig::default()
    };
    let mut group = c.benchmark_group("lanczos");
    group.sample_size(10);
    group.bench_function("lowest4_su2_L6", |b| {
        b.iter(|| lowest_eigenpairs(&ham, 15.0, 4, &config).unwrap())
    });
    group.finish();
}

fn reduction_step(c: &mut Criterion) {
    let (_, ham) = setup(Representation::Su2, 6, &couplings()).unwrap();
    let full = lowest_eigenpairs(&ham, 15.0, 1, &SolverConfig::default()).unwrap();
    let amps = &full.eigenvectors[0];
    let lambda = full.eigenvalues[0];
    let last = ham.dim() - 1;
    c.bench_function("renormalize_su2_L6", |b| {
        b.iter(|| {
            let coeffs = quadratic_coefficients(&ham, black_box(amps), lambda, 0, last).unwrap();
            renormalize_g(&coeffs, 15.0).unwrap()
        })
    });
}

criterion_group!(benches, matvec, lanczos, reduction_step);
criterion_main!(benches);
