use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use fracpow_core::quadrature::{select_node_count, ProbeSpec};
use fracpow_core::spectral::SpectralBounds;
use fracpow_core::{
    fracpow_action, shifted_cg_solve, ErrorBudget, Family, HermitianSparseMatrix, ShiftedSolveRequest,
};

fn matvec(c: &mut Criterion) {
    let mut g = c.benchmark_group("matvec");
    for n in [32usize, 128] {
        let a = HermitianSparseMatrix::<f64>::laplacian_2d(n, n).unwrap();
        let x = vec![1.0; a.n()];
        let mut y = vec![0.0; a.n()];
        g.bench_with_input(BenchmarkId::new("lap2d", n), &n, |bch, _| {
            bch.iter(|| a.matvec_into(black_box(&x), &mut y).unwrap())
        });
    }
    g.finish();
}

fn shifted_cg(c: &mut Criterion) {
    let a = HermitianSparseMatrix::<f64>::laplacian_2d(32, 32).unwrap();
    let b = vec![1.0; a.n()];
    let mut g = c.benchmark_group("shifted_cg");
    g.sample_size(20);
    for m in [4usize, 16, 64] {
        let shifts: Vec<f64> = (0..m).map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / m as f64)).collect();
        let req = ShiftedSolveRequest::new(shifts, vec![1e-8; m]);
        g.bench_with_input(BenchmarkId::new("lap2d_32", m), &m, |bch, _| {
            bch.iter(|| shifted_cg_solve(&a, black_box(&b), &req).unwrap())
        });
    }
    g.finish();
}

fn rule_selection(c: &mut Criterion) {
    let bounds = SpectralBounds::new(1e-5, 4.0).unwrap();
    let mut g = c.benchmark_group("select_node_count");
    for family in [Family::Gj1, Family::Gj2, Family::De] {
        let probe = ProbeSpec::from_bounds(bounds, 1e-10).unwrap();
        g.bench_function(family.as_str(), |bch| {
            bch.iter(|| select_node_count(family, 0.5, bounds, &probe).unwrap())
        });
    }
    g.finish();
}

fn end_to_end(c: &mut Criterion) {
    let a = HermitianSparseMatrix::<f64>::laplacian_1d(1000).unwrap();
    let b = vec![1.0; a.n()];
    let mut g = c.benchmark_group("fracpow_action");
    g.sample_size(10);
    for family in [Family::Gj2, Family::De] {
        g.bench_function(format!("lap1d_1000_{}", family.as_str()), |bch| {
            bch.iter(|| fracpow_action(&a, black_box(&b), 0.5, ErrorBudget::new(1e-6).unwrap(), family).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, matvec, shifted_cg, rule_selection, end_to_end);
criterion_main!(benches);
