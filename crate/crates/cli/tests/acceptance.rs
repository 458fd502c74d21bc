//! The acceptance suite: one line per criterion, non-zero exit on any failure.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use cubepsc_core::boxcat::{compose, enumerate_hom, hom_count, BoxMorphism, Sign};
use cubepsc_core::cubset::{
    boundary_sphere, horn, reduced_product, standard_cube, standard_cube_vector, text, CubicalSet,
};
use cubepsc_core::geomcurv::{
    angle_chart_check, curvature_check, error_term_check, pre_gauge_check, rescaling_check, suspension_check, AngleChart,
    MetricFamily, SlownessMode, DECAY_WINDOW, SUSPENSION_RESIDUAL_TOL,
};
use cubepsc_core::kan::{
    build_bg, certify_kan, is_contractible, is_kan, pi_n, tables_isomorphic, verify_group_table, SearchOrder,
};
use cubepsc_core::levelset::{
    flow_decomposition_check, property_scan, DiceConfig, LEVEL_TOL, ORTHOGONALITY_TOL, TRANSLATION_TOL,
};
use cubepsc_core::specseq::{
    build_filtration_couple, random_filtered_complex, summarize, summarize_group_couple, CoupleFile,
};
use cubepsc_core::zlinalg::{cubical_chain_complex, AbelianInvariants, ChainComplex};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{}: {}", name, e))
}

fn set(name: &str) -> CubicalSet {
    text::parse_single(&fixture(name)).unwrap_or_else(|e| panic!("{}: {}", name, e))
}

fn family(name: &str) -> MetricFamily {
    MetricFamily::parse(&fixture(name)).unwrap_or_else(|e| panic!("{}: {}", name, e))
}

// 1. Box category and cubical identities.

/// Faithful test point: output coordinates are constants or copies of distinct inputs.
fn probe(n: usize) -> Vec<f64> {
    (0..n).map(|k| 0.1 + 0.13 * (k as f64 + 1.0).sqrt()).collect()
}

fn same_map(a: &BoxMorphism, b: &BoxMorphism) -> bool {
    a.apply_geometric(&probe(a.dom_dim)).ok() == b.apply_geometric(&probe(b.dom_dim)).ok()
}

fn cocubical_identities(max: usize) -> Result<usize, String> {
    let d = |m, i, s| BoxMorphism::face(m, i, s).unwrap();
    let p = |n, i| BoxMorphism::projection(n, i).unwrap();
    let c = |g: &BoxMorphism, f: &BoxMorphism| compose(g, f).unwrap();
    let mut checked = 0;
    let mut check = |lhs: BoxMorphism, rhs: BoxMorphism, what: &str| -> Result<(), String> {
        checked += 1;
        ensure(lhs == rhs && same_map(&lhs, &rhs), || format!("{}: {} vs {}", what, lhs, rhs))
    };
    for m in 2..=max {
        for j in 1..=m {
            for i in 1..j {
                for e in [Sign::Minus, Sign::Plus] {
                    for w in [Sign::Minus, Sign::Plus] {
                        check(c(&d(m, j, w), &d(m - 1, i, e)), c(&d(m, i, e), &d(m - 1, j - 1, w)), "δδ")?;
                    }
                }
            }
        }
    }
    for n in 2..=max {
        for j in 1..n {
            for i in 1..=j {
                check(c(&p(n - 1, j), &p(n, i)), c(&p(n - 1, i), &p(n, j + 1)), "σσ")?;
            }
        }
    }
    for m in 1..=max {
        for j in 1..=m {
            for i in 1..=m {
                for e in [Sign::Minus, Sign::Plus] {
                    let lhs = c(&p(m, j), &d(m, i, e));
                    let rhs = if i < j {
                        c(&d(m - 1, i, e), &p(m - 1, j - 1))
                    } else if i == j {
                        BoxMorphism::identity(m - 1)
                    } else {
                        c(&d(m - 1, i - 1, e), &p(m - 1, j))
                    };
                    check(lhs, rhs, "σδ")?;
                }
            }
        }
    }
    Ok(checked)
}

/// Distinct affine maps reachable from the identity by generators, with
/// every intermediate cube of dimension at most `max`.
fn hom_sizes_by_search(n: usize, max: usize) -> Vec<usize> {
    let mut seen: BTreeSet<(usize, Vec<u64>)> = BTreeSet::new();
    let mut frontier = vec![BoxMorphism::identity(n)];
    let mut counts = vec![0; max + 1];
    let key = |f: &BoxMorphism| {
        let image = f.apply_geometric(&probe(n)).unwrap();
        (f.cod_dim, image.iter().map(|v| v.to_bits()).collect::<Vec<_>>())
    };
    seen.insert(key(&frontier[0]));
    counts[n] += 1;
    while let Some(f) = frontier.pop() {
        let m = f.cod_dim;
        let mut next = Vec::new();
        if m < max {
            for i in 1..=m + 1 {
                for s in [Sign::Minus, Sign::Plus] {
                    next.push(compose(&BoxMorphism::face(m + 1, i, s).unwrap(), &f).unwrap());
                }
            }
        }
        for i in 1..=m {
            next.push(compose(&BoxMorphism::projection(m, i).unwrap(), &f).unwrap());
        }
        for g in next {
            if seen.insert(key(&g)) {
                counts[g.cod_dim] += 1;
                frontier.push(g);
            }
        }
    }
    counts
}

fn criterion_box() -> Check {
    let identities = cocubical_identities(4)?;
    let mut sets = 0;
    for n in 0..=4 {
        let mut xs = vec![(format!("□^{}", n), standard_cube(n))];
        if n >= 1 {
            xs.push((format!("∂□^{}", n), boundary_sphere(n)));
            for i in 1..=n {
                for s in [Sign::Minus, Sign::Plus] {
                    xs.push((format!("⊓^{}_({},{})", n, i, s.symbol()), horn(n, i, s).unwrap()));
                }
            }
        }
        for (name, x) in xs {
            let v = x.validate();
            ensure(v.is_empty(), || format!("{}: {:?}", name, v[0]))?;
            sets += 1;
        }
    }
    for n in 0..=4 {
        let searched = hom_sizes_by_search(n, 4);
        for m in 0..=4 {
            let listed = enumerate_hom(n, m);
            let distinct: BTreeSet<_> = listed.iter().collect();
            ensure(distinct.len() == listed.len(), || format!("duplicates in Hom({},{})", n, m))?;
            ensure(listed.len() as u64 == hom_count(n, m) && searched[m] as u64 == hom_count(n, m), || {
                format!("Hom({},{}): listed {}, searched {}, formula {}", n, m, listed.len(), searched[m], hom_count(n, m))
            })?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let homs: BTreeMap<(usize, usize), Vec<BoxMorphism>> =
        (0..=4).flat_map(|a| (0..=4).map(move |b| ((a, b), enumerate_hom(a, b)))).collect();
    let pick = |rng: &mut ChaCha8Rng, a: usize, b: usize| {
        let list = &homs[&(a, b)];
        list[rng.gen_range(0..list.len())].clone()
    };
    for _ in 0..1000 {
        let dims: Vec<usize> = (0..4).map(|_| rng.gen_range(0..=4)).collect();
        let f = pick(&mut rng, dims[0], dims[1]);
        let g = pick(&mut rng, dims[1], dims[2]);
        let h = pick(&mut rng, dims[2], dims[3]);
        let gf = compose(&g, &f).unwrap();
        let x: Vec<f64> = (0..dims[0]).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let direct = g.apply_geometric(&f.apply_geometric(&x).unwrap()).unwrap();
        ensure(gf.apply_geometric(&x).unwrap() == direct, || format!("geometric action of {} ∘ {}", g, f))?;
        ensure(compose(&h, &gf).unwrap() == compose(&compose(&h, &g).unwrap(), &f).unwrap(), || "associativity".into())?;
        ensure(compose(&BoxMorphism::identity(dims[1]), &f).unwrap() == f, || "left identity".into())?;
        ensure(compose(&f, &BoxMorphism::identity(dims[0])).unwrap() == f, || "right identity".into())?;
    }
    Ok(format!(
        "{} generator identities, {} sets validated, Hom counts n,m ≤ 4 match, 1000 random composites",
        identities, sets
    ))
}

// 2. Reduced product of standard cubes.

fn product_vector(name: &str) -> Vec<i8> {
    let inner = name.trim_start_matches('(').trim_end_matches(')');
    inner
        .split(',')
        .flat_map(|part| part.chars().skip(1))
        .map(|c| match c {
            '-' => -1,
            '+' => 1,
            _ => 0,
        })
        .collect()
}

fn criterion_product() -> Check {
    let mut pairs = 0;
    for total in 0..=4 {
        let target = standard_cube(total);
        let by_vector: BTreeMap<Vec<i8>, _> =
            target.all_generators().map(|g| (standard_cube_vector(&target, g), g)).collect();
        for m in 0..=total {
            let p = reduced_product(&standard_cube(m), &standard_cube(total - m), None).map_err(|e| e.to_string())?;
            for d in 0..=total {
                ensure(p.generator_count(d) == target.generator_count(d), || {
                    format!("□^{}⊗□^{} has {} cells in dim {}", m, total - m, p.generator_count(d), d)
                })?;
            }
            let phi = |g| by_vector[&product_vector(p.name(g))];
            let images: BTreeSet<_> = p.all_generators().map(phi).collect();
            ensure(images.len() == target.total_generators(), || "not a bijection".into())?;
            for g in p.all_generators() {
                ensure(phi(g).dim == g.dim, || format!("{} changes dimension", p.name(g)))?;
                for i in 1..=g.dim {
                    for s in [Sign::Minus, Sign::Plus] {
                        let f = p.generator_face(g, i, s);
                        let image = target.generator_face(phi(g), i, s);
                        ensure(!f.is_degenerate() && phi(f.gen) == image.gen && !image.is_degenerate(), || {
                            format!("face ({},{}) of {}", i, s.symbol(), p.name(g))
                        })?;
                    }
                }
            }
            pairs += 1;
        }
    }
    Ok(format!("{} products □^m⊗□^n ≅ □^(m+n), m+n ≤ 4, cell counts and face tables", pairs))
}

// 3. Homology.

const PRIME: i64 = 1_000_003;

fn rank_mod_p(rows: Vec<Vec<i64>>) -> usize {
    let mut a: Vec<Vec<i64>> = rows.into_iter().map(|r| r.into_iter().map(|v| v.rem_euclid(PRIME)).collect()).collect();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..a.len()).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, piv);
        let inv = pow_mod(a[rank][c], PRIME - 2);
        for r in 0..a.len() {
            if r != rank && a[r][c] != 0 {
                let factor = a[r][c] * inv % PRIME;
                for k in 0..cols {
                    a[r][k] = (a[r][k] - factor * a[rank][k]).rem_euclid(PRIME);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut b: i64, mut e: i64) -> i64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % PRIME;
        }
        b = b * b % PRIME;
        e >>= 1;
    }
    r
}

/// Betti numbers from ranks over a prime field.
fn betti_mod_p(c: &ChainComplex) -> Vec<usize> {
    let rank = |n: usize| if n == 0 || n > c.top() { 0 } else { rank_mod_p(c.boundary(n).to_i64_rows().unwrap()) };
    (0..=c.top()).map(|n| c.rank(n) - rank(n) - rank(n + 1)).collect()
}

fn homology_checked(name: &str, x: &CubicalSet, expected: &[AbelianInvariants]) -> Result<(), String> {
    let c = cubical_chain_complex(x);
    c.check_square_zero().map_err(|e| format!("{}: ∂² ≠ 0: {}", name, e))?;
    let h = c.homology_invariants().map_err(|e| e.to_string())?;
    let mut padded = expected.to_vec();
    padded.resize(h.len(), AbelianInvariants::trivial());
    ensure(h == padded, || format!("{}: {:?}", name, h.iter().map(ToString::to_string).collect::<Vec<_>>()))?;
    let betti: Vec<usize> = h.iter().map(|g| g.free_rank).collect();
    ensure(betti == betti_mod_p(&c), || format!("{}: prime-field Betti numbers differ", name))?;
    let chi: i64 = betti.iter().enumerate().map(|(n, &b)| if n % 2 == 0 { b as i64 } else { -(b as i64) }).sum();
    ensure(chi == x.euler_characteristic() && chi == c.euler_characteristic(), || {
        format!("{}: χ from homology {} vs cells {}", name, chi, x.euler_characteristic())
    })
}

fn criterion_homology() -> Check {
    let z = AbelianInvariants::free;
    let mut cases = 0;
    for n in 0..=4 {
        homology_checked(&format!("□^{}", n), &standard_cube(n), &[z(1)])?;
        cases += 1;
        if n >= 1 {
            let mut sphere = vec![AbelianInvariants::trivial(); n];
            if n == 1 {
                sphere[0] = z(2);
            } else {
                sphere[0] = z(1);
                sphere[n - 1] = z(1);
            }
            homology_checked(&format!("∂□^{}", n), &boundary_sphere(n), &sphere)?;
            for i in 1..=n {
                for s in [Sign::Minus, Sign::Plus] {
                    homology_checked(&format!("⊓^{}", n), &horn(n, i, s).unwrap(), &[z(1)])?;
                    cases += 1;
                }
            }
            cases += 1;
        }
    }
    let s = boundary_sphere(2);
    let torus = reduced_product(&s, &s, None).map_err(|e| e.to_string())?;
    homology_checked("∂□²⊗∂□²", &torus, &[z(1), z(2), z(1)])?;
    homology_checked("circle", &set("circle.cub"), &[z(1), z(1)])?;
    homology_checked("boundary_square.cub", &set("boundary_square.cub"), &[z(1), z(1)])?;
    Ok(format!("{} cubes, spheres and horns; torus (Z, Z^2, Z); ∂² = 0 and χ agree", cases + 3))
}

// 4. Kan engine.

fn criterion_kan() -> Check {
    let two = set("two_points.cub");
    let v = is_kan(&two, 3).map_err(|e| e.to_string())?;
    ensure(v.holds && v.bound == 3, || "two points are not Kan up to 3".into())?;

    let circle = set("circle.cub");
    let v = is_kan(&circle, 2).map_err(|e| e.to_string())?;
    let horn_report = v.counterexample.clone().ok_or("the circle is reported Kan")?;
    ensure(!v.holds && horn_report.n == 2 && horn_report.open.is_some(), || format!("{:?}", horn_report))?;
    // No 2-cube of the circle matches the reported horn on its assigned faces.
    let parse_slot = |label: &str| {
        let inner = label.trim_start_matches('(').trim_end_matches(')');
        let (i, s) = inner.split_once(',').unwrap();
        (i.parse::<usize>().unwrap(), Sign::from_symbol(s.chars().next().unwrap()).unwrap())
    };
    for c in circle.cubes(2).map_err(|e| e.to_string())? {
        let fits = horn_report.faces.iter().all(|(label, shown)| {
            let (i, s) = parse_slot(label);
            circle.display_cube(&circle.face(&c, i, s).unwrap()) == *shown
        });
        ensure(!fits, || format!("{} fills the reported horn", circle.display_cube(&c)))?;
    }

    let mut fixtures: Vec<(String, CubicalSet)> = ["point.cub", "two_points.cub", "circle.cub", "square.cub", "boundary_square.cub", "bz2.cub"]
        .iter()
        .map(|n| (n.to_string(), set(n)))
        .collect();
    for n in 0..=3 {
        fixtures.push((format!("□^{}", n), standard_cube(n)));
        fixtures.push((format!("∂□^{}", n + 1), boundary_sphere(n + 1)));
    }
    let mut contractible = 0;
    for (name, x) in &fixtures {
        let d = x.trunc_dim().clamp(1, 3);
        let c = is_contractible(x, d).map_err(|e| e.to_string())?;
        if c.holds {
            contractible += 1;
            let k = is_kan(x, d).map_err(|e| e.to_string())?;
            ensure(k.holds, || format!("{} is contractible but not Kan", name))?;
        }
    }
    ensure(contractible >= 2, || "fewer than two contractible fixtures".into())?;

    let z2 = vec![vec![0, 1], vec![1, 0]];
    let bz2 = build_bg(&z2, 2).map_err(|e| e.to_string())?;
    let cert = certify_kan(&bz2, 2).map_err(|e| e.to_string())?.map_err(|v| format!("B(Z/2) not Kan: {:?}", v))?;
    let base = bz2.generators(0).next().unwrap();
    let fwd = pi_n(&bz2, &cert, base, 1, SearchOrder::Forward).map_err(|e| e.to_string())?;
    let rev = pi_n(&bz2, &cert, base, 1, SearchOrder::Reverse).map_err(|e| e.to_string())?;
    ensure(fwd.order == 2 && rev.order == 2, || format!("|π₁| = {} / {}", fwd.order, rev.order))?;
    verify_group_table(&fwd.table)?;
    ensure(tables_isomorphic(&fwd.table, &z2) && tables_isomorphic(&rev.table, &z2), || "π₁ is not Z/2".into())?;
    let file = set("bz2.cub");
    ensure(file.total_generators() == bz2.total_generators(), || "bz2.cub differs from B(Z/2)".into())?;
    Ok(format!(
        "two points Kan to 3; circle refuted by a dim-2 horn; {} contractible fixtures Kan; |π₁(BZ/2)| = 2 in both orders",
        contractible
    ))
}

// 5. Spectral sequences.

fn criterion_specseq() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checks = 0;
    for k in 0..24 {
        let fc = random_filtered_complex(&mut rng, 3, 4, 8);
        let couple = build_filtration_couple(&fc, 4).map_err(|e| e.to_string())?;
        let summary = summarize_group_couple(&couple, 3, Some(&fc)).map_err(|e| format!("complex {}: {}", k, e))?;
        let failed: Vec<_> = summary.checks.iter().filter(|c| !c.report.passed()).collect();
        ensure(failed.is_empty(), || format!("complex {}: {:?}", k, failed[0]))?;
        ensure(summary.checks.iter().any(|c| c.name == "graded homology oracle"), || "oracle not run".into())?;
        checks += summary.checks.iter().map(|c| c.report.checks_run).sum::<usize>();
    }
    let file: CoupleFile = serde_json::from_str(&fixture("monoid.json")).map_err(|e| e.to_string())?;
    let monoid = summarize(&file, 1).map_err(|e| e.to_string())?;
    ensure(monoid.passed, || format!("monoid fixture: {:?}", monoid.monoid))?;
    Ok(format!("24 random filtered complexes, {} checks; monoid homomorphism theorem holds", checks))
}

// 6. Curvature.

fn criterion_curvature() -> Check {
    let mut worst: f64 = 0.0;
    for name in ["flat.met", "hyperbolic.met", "sphere.met", "generic.met"] {
        let fam = family(name);
        let r = curvature_check(&fam, 100, fam.seed, 1e-5).map_err(|e| format!("{}: {}", name, e))?;
        ensure(r.passed && r.samples.len() == 100, || format!("{}: relative error {}", name, r.max_rel_error))?;
        if name == "hyperbolic.met" {
            ensure(r.samples.iter().all(|s| (s.formula + 6.0).abs() < 1e-9), || "hyperbolic scal ≠ -6".into())?;
        }
        if name == "flat.met" {
            ensure(r.max_abs_error == 0.0, || "flat metric has curvature".into())?;
        }
        worst = worst.max(r.max_rel_error);
    }
    let mut exponents = Vec::new();
    for name in ["hyperbolic.met", "sphere.met", "generic.met"] {
        let r = rescaling_check(&family(name), &[1.0, 2.0, 4.0, 8.0], 20, 5, 1e-5).map_err(|e| e.to_string())?;
        let e = r.fitted_exponent.ok_or("no decay fitted")?;
        ensure(r.passed && (DECAY_WINDOW.0..=DECAY_WINDOW.1).contains(&e), || format!("{}: exponent {}", name, e))?;
        exponents.push(e);
    }
    for (name, modes) in [
        ("sphere.met", &[SlownessMode::Eighth, SlownessMode::Chapter7][..]),
        ("torus_family.met", &[SlownessMode::Eighth][..]),
        ("sphere_fast.met", &[SlownessMode::Eighth][..]),
    ] {
        let fam = family(name);
        for &mode in modes {
            let s = suspension_check(&fam, 100, fam.seed, mode).map_err(|e| e.to_string())?;
            ensure(s.max_residual < SUSPENSION_RESIDUAL_TOL, || format!("{}: residual {}", name, s.max_residual))?;
            let factor = if mode == SlownessMode::Eighth { 7.0 / 8.0 } else { s.bound_factor };
            for sample in s.samples.iter().filter(|x| x.predicate_holds == Some(true)) {
                ensure(sample.scal_susp > factor * sample.scal_slice, || format!("{}: bound fails at {:?}", name, sample.point))?;
                if mode == SlownessMode::Eighth {
                    ensure(sample.error_norm_sq < sample.scal_slice / 64.0, || format!("{}: ‖Err‖² too large", name))?;
                }
            }
        }
    }
    let sphere = family("sphere.met");
    let err = error_term_check(&sphere, 100, sphere.seed).map_err(|e| e.to_string())?;
    ensure(err.passed, || "error term bound fails".into())?;
    let pg = pre_gauge_check(200, 11, 6, 1e4, 1e-9).map_err(|e| e.to_string())?;
    ensure(pg.passed && pg.samples.len() == 200, || format!("pre-gauge residual {}", pg.max_residual))?;
    for name in ["line.ang", "circle.ang", "square.ang"] {
        let chart = AngleChart::parse(&fixture(name)).map_err(|e| e.to_string())?;
        let r = angle_chart_check(&chart, 100, chart.seed, 1e-5).map_err(|e| e.to_string())?;
        ensure(r.passed, || format!("{}: {}", name, r.max_error))?;
        ensure(r.polar_radius_error.is_some() == (name == "circle.ang"), || "polar case not checked".into())?;
    }
    Ok(format!(
        "oracle relative error ≤ {:.1e}; decay exponents {:?}; suspension, ⅞ and 1/64 bounds; pre-gauge residual {:.1e}; angle charts",
        worst,
        exponents.iter().map(|e| (e * 1000.0).round() / 1000.0).collect::<Vec<_>>(),
        pg.max_residual
    ))
}

// 7. Dice function and flow.

fn criterion_dice() -> Check {
    let mut points = 0;
    for n in [2, 3] {
        let cfg = DiceConfig::new(n, 21.0).map_err(|e| e.to_string())?;
        let scan = property_scan(&cfg, 10_000, 21);
        ensure(scan.passed && scan.violation_counts == [0; 4], || format!("n = {}: {:?}", n, scan.violation_counts))?;
        points += scan.level_points;
        let flow = flow_decomposition_check(&cfg, 50, 3 + n as u64, 1e-3).map_err(|e| e.to_string())?;
        let interior = flow.trajectories.iter().filter(|t| !t.far_field).count();
        ensure(interior >= 50, || format!("only {} trajectories", interior))?;
        ensure(flow.max_level_error < LEVEL_TOL && flow.max_orthogonality < ORTHOGONALITY_TOL, || {
            format!("n = {}: level {} orthogonality {}", n, flow.max_level_error, flow.max_orthogonality)
        })?;
        ensure(!flow.far_field.is_empty() && flow.max_translation_error < TRANSLATION_TOL, || {
            format!("n = {}: translation {}", n, flow.max_translation_error)
        })?;
        ensure(flow.passed, || format!("n = {}: flow report fails", n))?;
    }
    Ok(format!("scans n = 2, 3 at 10^4 samples with 0 violations ({} level points); flows of 50 trajectories", points))
}

// 8. Determinism of the command line.

struct Run {
    args: Vec<String>,
    exit: i32,
}

fn run(args: &[&str], exit: i32) -> Run {
    let args = args
        .iter()
        .map(|a| if a.contains('.') && !a.starts_with('-') && a.parse::<f64>().is_err() {
            fixture_path(a).display().to_string()
        } else {
            a.to_string()
        })
        .collect();
    Run { args, exit }
}

fn invoke(args: &[String], parallel: &str) -> Result<(i32, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cubepsc"))
        .args(args)
        .args(["--parallel", parallel])
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

fn criterion_cli() -> Check {
    let runs = vec![
        run(&["validate", "--input", "boundary_square.cub"], 0),
        run(&["validate", "--input", "bad_square.cub"], 1),
        run(&["validate", "--input", "malformed.cub"], 2),
        run(&["kan", "--input", "two_points.cub", "--max-dim", "3"], 0),
        run(&["kan", "--input", "circle.cub", "--max-dim", "2"], 1),
        run(&["contractible", "--input", "point.cub"], 0),
        run(&["contractible", "--input", "two_points.cub"], 1),
        run(&["fibration", "--input", "point_map.cub"], 0),
        run(&["fibration", "--input", "interval_to_circle.cub"], 1),
        run(&["pi0", "--input", "two_points.cub"], 0),
        run(&["pi", "--input", "bz2.cub", "--n", "1", "--base", "v"], 0),
        run(&["pi", "--input", "bz2.cub", "--base", "nowhere"], 2),
        run(&["homology", "--input", "boundary_square.cub"], 0),
        run(&["product", "--input", "torus_factors.cub"], 0),
        run(&["specseq", "--couple", "times_two.json", "--pages", "3"], 0),
        run(&["specseq", "--couple", "square_filtered.json"], 0),
        run(&["specseq", "--couple", "s3_couple.json", "--pages", "2"], 0),
        run(&["specseq", "--couple", "monoid.json"], 0),
        run(&["curvature", "--family", "flat.met", "--samples", "10"], 0),
        run(&["curvature", "--family", "hyperbolic.met", "--samples", "20", "--seed", "4"], 0),
        run(&["suspension", "--family", "sphere.met", "--samples", "30", "--mode", "eighth"], 0),
        run(&["suspension", "--family", "torus_family.met", "--samples", "20", "--mode", "chapter7"], 0),
        run(&["rescale", "--family", "sphere.met", "--samples", "10"], 0),
        run(&["pregauge", "--samples", "50", "--seed", "2", "--tol", "1e-9"], 0),
        run(&["angle", "--input", "circle.ang", "--samples", "50"], 0),
        run(&["dice", "--n", "3", "--samples", "2000", "--seed", "9", "--rho", "21"], 0),
        run(&["flow", "--n", "2", "--samples", "10", "--seed", "1"], 0),
    ];
    let mut commands = BTreeSet::new();
    for r in &runs {
        let (e1, a) = invoke(&r.args, "on")?;
        let (e2, b) = invoke(&r.args, "on")?;
        let (e3, c) = invoke(&r.args, "off")?;
        let line = r.args.join(" ");
        ensure(e1 == r.exit && e2 == r.exit && e3 == r.exit, || format!("`{}` exited {} (expected {})", line, e1, r.exit))?;
        ensure(a == b && a == c && !a.is_empty(), || format!("`{}` is not byte-reproducible", line))?;
        let json: Value = serde_json::from_slice(&a).map_err(|e| format!("`{}`: {}", line, e))?;
        if r.exit == 2 {
            ensure(json["error"]["kind"] == "input", || format!("`{}`: no error report", line))?;
        }
        commands.insert(r.args[0].clone());
        match (r.args[0].as_str(), r.args[2].rsplit('/').next().unwrap_or("")) {
            ("kan", "two_points.cub") => ensure(json["verdict"] == "kan up to 3", || json["verdict"].to_string())?,
            ("homology", _) => ensure(json["verdict"] == "H0=Z, H1=Z", || json["verdict"].to_string())?,
            ("curvature", "flat.met") => ensure(json["result"]["max_abs_error"] == 0.0, || "flat error".into())?,
            ("validate", "malformed.cub") => {
                ensure(json["error"]["line"] == 3 && json["error"]["column"] == 10, || json["error"].to_string())?
            }
            _ => {}
        }
    }
    ensure(commands.len() == 16, || format!("only {} subcommands exercised", commands.len()))?;
    Ok(format!("{} invocations of 16 subcommands identical across 3 runs each, parallel on and off", runs.len()))
}

fn main() {
    let criteria: Vec<(&str, u64, fn() -> Check)> = vec![
        ("box and cubical identities", 10, criterion_box),
        ("reduced product of cubes", 5, criterion_product),
        ("homology", 10, criterion_homology),
        ("kan engine", 60, criterion_kan),
        ("spectral sequences", 60, criterion_specseq),
        ("curvature", 120, criterion_curvature),
        ("dice and flow", 120, criterion_dice),
        ("cli determinism", 600, criterion_cli),
    ];
    let mut failures = 0;
    for (k, (name, limit, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(limit);
        let (status, detail) = match (&result, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("over the {} s budget; {}", limit, d)),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!("criterion {} [{}] {} ({:.2} s, limit {} s): {}", k + 1, status, name, elapsed.as_secs_f64(), limit, detail);
    }
    if failures > 0 {
        eprintln!("{} criteria failed", failures);
        std::process::exit(1);
    }
}
