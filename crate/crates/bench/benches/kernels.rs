use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use eapm_core::linalg::{eigh, ComplexMatrix, DimList};
use eapm_core::optim::{sdp_solve, seesaw_w2, LinearForm, SdpProblem, SeesawConfig};
use eapm_core::quantum::random::random_density;
use eapm_core::quantum::{helstrom, EnergyBound};
use eapm_core::schemes::{closed_form_w2, optimize_r, SchemeKind, SchemeParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn linalg(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let dims = DimList::new(vec![3, 3]).unwrap();
    let a = random_density(dims.clone(), 9, &mut rng);
    let b = random_density(dims, 9, &mut rng);
    c.bench_function("eigh 9x9", |x| x.iter(|| eigh(black_box(a.matrix()))));
    c.bench_function("helstrom 9x9", |x| x.iter(|| helstrom(black_box(&a), black_box(&b)).unwrap()));
}

fn closed_forms(c: &mut Criterion) {
    let p = SchemeParams::new(0.3, 0.2).unwrap();
    c.bench_function("closed form qutrit", |x| {
        x.iter(|| closed_form_w2(SchemeKind::Qutrit, black_box(p)).unwrap())
    });
    let om = EnergyBound::new(0.2).unwrap();
    c.bench_function("optimize r qutrit", |x| x.iter(|| optimize_r(SchemeKind::Qutrit, black_box(om))));
}

fn solvers(c: &mut Criterion) {
    // largest eigenvalue of a random 9x9 state as a trace-one SDP
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a = random_density(DimList::new(vec![3, 3]).unwrap(), 9, &mut rng);
    let mut p = SdpProblem::new(vec![9]).unwrap();
    p.set_objective(LinearForm::single(0, a.matrix().clone())).unwrap();
    p.add_equality(LinearForm::single(0, ComplexMatrix::identity(9)), 1.0).unwrap();
    c.bench_function("sdp max eigenvalue 9x9", |x| x.iter(|| sdp_solve(black_box(&p)).unwrap()));

    let mut g = c.benchmark_group("seesaw");
    g.sample_size(10);
    let cfg = SeesawConfig {
        restarts: 1,
        max_iters: 10,
        ..SeesawConfig::default()
    };
    let om = EnergyBound::new(0.2).unwrap();
    g.bench_function("w2 qubit, one restart", |x| x.iter(|| seesaw_w2(om, 2, cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, linalg, closed_forms, solvers);
criterion_main!(benches);
