use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cubepsc_core::boxcat::enumerate_hom;
use cubepsc_core::cubset::{boundary_sphere, reduced_product};
use cubepsc_core::geomcurv::{curvature_check, MetricFamily};
use cubepsc_core::kan::{build_bg, is_kan};
use cubepsc_core::levelset::{property_scan, DiceConfig};
use cubepsc_core::specseq::{build_filtration_couple, random_filtered_complex, summarize_group_couple};
use cubepsc_core::zlinalg::{cubical_chain_complex, smith_normal_form, IntMatrix};

const SPHERE: &str = include_str!("../../../fixtures/sphere.met");

fn combinatorics(c: &mut Criterion) {
    c.bench_function("enumerate_hom 4->4", |b| b.iter(|| enumerate_hom(black_box(4), black_box(4)).len()));
    let s = boundary_sphere(2);
    let torus = reduced_product(&s, &s, None).unwrap();
    c.bench_function("torus homology", |b| {
        b.iter(|| cubical_chain_complex(black_box(&torus)).homology_invariants().unwrap())
    });
    let m = IntMatrix::from_rows(&(0..12).map(|r| (0..12).map(|c| ((r * 7 + c * 13) % 11) as i64 - 5).collect()).collect::<Vec<_>>());
    c.bench_function("smith normal form 12x12", |b| b.iter(|| smith_normal_form(black_box(&m)).rank));
    let bz2 = build_bg(&[vec![0, 1], vec![1, 0]], 3).unwrap();
    c.bench_function("kan B(Z/2) to 3", |b| b.iter(|| is_kan(black_box(&bz2), 3).unwrap().holds));
}

fn spectral(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let fc = random_filtered_complex(&mut rng, 3, 4, 6);
    c.bench_function("filtration couple pages 1..3", |b| {
        b.iter(|| {
            let gc = build_filtration_couple(&fc, 4).unwrap();
            summarize_group_couple(&gc, 3, Some(&fc)).unwrap().passed
        })
    });
}

fn numerics(c: &mut Criterion) {
    let sphere = MetricFamily::parse(SPHERE).unwrap();
    c.bench_function("curvature sphere x20", |b| b.iter(|| curvature_check(&sphere, 20, 0, 1e-5).unwrap().passed));
    let cfg = DiceConfig::new(2, 21.0).unwrap();
    c.bench_function("dice scan x1000", |b| b.iter(|| property_scan(&cfg, 1000, 0).passed));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = combinatorics, spectral, numerics
}
criterion_main!(benches);
