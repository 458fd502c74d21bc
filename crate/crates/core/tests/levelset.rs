use cubepsc_core::exprparse::HyperDual;
use cubepsc_core::levelset::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RHO: f64 = 21.0;

#[test]
fn aux_is_convex_on_a_grid() {
    let mut prev = -1.0;
    for k in 0..=4000 {
        let s = RHO - 3.0 + k as f64 * 1e-3;
        let d = aux(RHO, HyperDual::variable(s, true, true));
        assert!(d.e1 >= prev && d.e12 >= 0.0, "{}", s);
        prev = d.e1;
    }
    assert_eq!(aux(RHO, RHO - 2.0), 0.0);
    assert!((aux(RHO, RHO) - 1.0).abs() < 1e-13);
}

#[test]
fn left_and_upper_branches_agree_on_overlap() {
    let c = DiceConfig::new(2, RHO).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let x1 = rng.gen_range(-c.epsilon * 0.999..c.epsilon * 0.999);
        let x2 = rng.gen_range(RHO..=RHO + 1.0);
        let left = dice(RHO, &[x1, x2]);
        let upper = 3.0 - dice(RHO, &[x1, x2 - (2.0 * RHO + 1.0)]);
        assert!((left - upper).abs() < 1e-12);
        let lower = 3.0 - dice(RHO, &[x1, -x2 + (2.0 * RHO + 1.0)]);
        assert!((dice(RHO, &[x1, -x2]) - lower).abs() < 1e-12);
        assert!((c.dfun(x1, x2).unwrap() - left).abs() < 1e-12);
    }
}

#[test]
fn upper_branch_meets_linear_piece() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1000 {
        let x1 = rng.gen_range(RHO..=RHO + 1.0);
        let x2 = rng.gen_range(RHO + 3.0..=RHO + 4.0);
        let upper = 3.0 - dice(RHO, &[x1, x2 - (2.0 * RHO + 1.0)]);
        assert!((upper - (2.0 - (x1 - RHO))).abs() < 1e-12);
    }
}

#[test]
fn extension_matches_shifted_dice_where_large() {
    for n in [2, 3, 4] {
        let c = DiceConfig::new(n, RHO).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let y: Vec<f64> = (1..n).map(|_| rng.gen_range(-(RHO + 3.0)..=RHO + 3.0)).collect();
            let phi = dice(RHO - 2.0, &y) + RHO - 3.0;
            let t = c.tilde_dice(&y);
            if phi >= RHO - 2.0 {
                assert!((t - phi).abs() < 1e-12);
            } else {
                assert!(t < RHO - 2.0 && t >= 0.0);
            }
        }
    }
}

#[test]
fn two_dimensional_case_is_the_merged_function() {
    let c = DiceConfig::new(2, RHO).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    for _ in 0..5000 {
        let x = [rng.gen_range(-(RHO + 2.0)..=RHO + 1.0), rng.gen_range(-(RHO + 6.0)..=RHO + 6.0)];
        if let (Ok(a), Ok(b)) = (c.frak_d::<f64>(&x), c.dfun(x[0], x[1].abs())) {
            if (1.0..=2.0).contains(&b) {
                assert!((a - b).abs() < 1e-12, "{:?}", x);
                checked += 1;
            }
        }
    }
    assert!(checked > 50);
}

#[test]
fn derivatives_match_finite_differences() {
    for n in [2, 3] {
        let c = DiceConfig::new(n, RHO).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut checked = 0;
        while checked < 200 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-(RHO + 2.0)..=RHO + 6.0)).collect();
            let h = 1e-4;
            let shifted = |a: usize, s: f64| {
                let mut y = x.clone();
                y[a] += s;
                c.frak_d::<f64>(&y)
            };
            let Ok((v, g)) = c.frak_gradient(&x) else { continue };
            if !(0.5..=2.5).contains(&v) {
                continue;
            }
            let mut ok = true;
            for a in 0..n {
                let (Ok(p), Ok(m)) = (shifted(a, h), shifted(a, -h)) else {
                    ok = false;
                    break;
                };
                let fd1 = (p - m) / (2.0 * h);
                let fd2 = (p - 2.0 * v + m) / (h * h);
                assert!((g[a] - fd1).abs() < 1e-6, "{:?} {} {}", x, g[a], fd1);
                assert!((c.frak_second(&x, a, a).unwrap() - fd2).abs() < 1e-3, "{:?}", x);
            }
            checked += ok as usize;
        }
    }
}

#[test]
fn half_cuboid_misses_the_band() {
    for n in [2, 3] {
        let c = DiceConfig::new(n, RHO).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..5000 {
            let mut x = vec![rng.gen_range(-(RHO - 4.0)..=3.0 * RHO)];
            x.extend((1..n).map(|_| rng.gen_range(-(RHO - 4.0)..=RHO - 4.0)));
            if let Ok(v) = c.frak_d::<f64>(&x) {
                assert!(!(1.0..=2.0).contains(&v), "{:?} {}", x, v);
            }
        }
    }
}

#[test]
fn dice_gradient_vanishes_on_the_zero_cube() {
    let (v, g) = value_and_gradient(&[5.0, -18.9, 0.0], |x| Ok::<_, ()>(dice(RHO, x))).unwrap();
    assert_eq!(v, 0.0);
    assert!(g.iter().all(|&d| d == 0.0));
}

#[test]
fn property_scans_pass() {
    for n in [2, 3] {
        let report = property_scan(&DiceConfig::new(n, RHO).unwrap(), 2000, 7);
        assert!(report.passed, "{:?}", report.violations);
        assert!(report.level_points > 1000 && report.dice_critical_points > 0);
    }
}

#[test]
fn flow_preserves_levels_and_is_orthogonal() {
    let report = flow_decomposition_check(&DiceConfig::new(2, RHO).unwrap(), 50, 8, 1e-3).unwrap();
    assert!(report.passed, "{} {} {} {}", report.max_level_error, report.max_orthogonality, report.max_speed_error, report.max_translation_error);
    assert_eq!(report.trajectories.len(), 50);
    assert!(report.far_field.iter().all(|f| f.max_translation_error < 1e-9));
}

#[test]
fn far_field_is_a_translation() {
    let report = flow_decomposition_check(&DiceConfig::new(3, RHO).unwrap(), 5, 9, 1e-2).unwrap();
    for f in &report.far_field {
        assert!(f.max_translation_error < 1e-9, "{:?}", f);
    }
}

#[test]
fn scan_is_reproducible() {
    let c = DiceConfig::new(3, 8.0).unwrap();
    assert_eq!(property_scan(&c, 300, 11), property_scan(&c, 300, 11));
}

proptest! {
    #[test]
    fn dice_is_symmetric(x in proptest::collection::vec(-30.0f64..30.0, 3), rho in 5.5f64..30.0) {
        let flipped: Vec<f64> = x.iter().map(|v| -v).collect();
        let rotated = vec![x[2], x[0], x[1]];
        let d = dice(rho, &x);
        prop_assert_eq!(d, dice(rho, &flipped));
        prop_assert!((d - dice(rho, &rotated)).abs() < 1e-12);
        prop_assert!(d >= 0.0);
    }

    #[test]
    fn aux_is_increasing_and_supported(a in -5.0f64..40.0, b in -5.0f64..40.0, rho in 5.5f64..30.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(aux(rho, lo) <= aux(rho, hi));
        // exp(−1/x) underflows for x < 1/745, so positivity is only visible a little past ρ − 2
        if lo <= rho - 2.0 {
            prop_assert_eq!(aux(rho, lo), 0.0);
        } else if lo >= rho - 2.0 + 1e-2 {
            prop_assert!(aux(rho, lo) > 0.0);
        }
        if lo >= rho {
            prop_assert_eq!(aux(rho, lo), lo - (rho - 1.0));
        }
    }
}
