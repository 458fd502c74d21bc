use proptest::prelude::*;

use cubepsc_core::boxcat::Sign;
use cubepsc_core::cubset::{
    boundary_sphere, disjoint_union, horn, reduced_product, standard_cube, text, CubicalMap, CubicalSet,
};

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn standard_cube_cells() {
    for n in 0..=5 {
        let x = standard_cube(n);
        for k in 0..=n {
            assert_eq!(x.generator_count(k), binom(n, k) << (n - k), "□^{} dim {}", n, k);
        }
        assert!(x.validate().is_empty());
        assert_eq!(x.euler_characteristic(), 1);
    }
}

#[test]
fn sphere_and_horn_are_subsets_of_the_cube() {
    for n in 1..=4 {
        let s = boundary_sphere(n);
        assert_eq!(s.generator_count(n), 0);
        assert_eq!(s.generator_count(n - 1), 2 * n);
        for i in 1..=n {
            for sign in [Sign::Minus, Sign::Plus] {
                let h = horn(n, i, sign).unwrap();
                assert_eq!(h.generator_count(n - 1), 2 * n - 1);
                assert!(h.validate().is_empty());
            }
        }
    }
    assert!(horn(2, 3, Sign::Plus).is_err());
}

#[test]
fn text_format_round_trips() {
    for x in [standard_cube(2), boundary_sphere(3), horn(3, 2, Sign::Minus).unwrap()] {
        let back = text::parse_single(&text::to_text(&x)).unwrap();
        assert_eq!(text::to_text(&back), text::to_text(&x));
        assert_eq!(back.total_generators(), x.total_generators());
    }
}

#[test]
fn parse_errors_carry_positions() {
    let err = text::parse_single("set X\ndim 0: v\nface v 1 + = v\n").unwrap_err().to_string();
    assert!(err.contains("line 3"), "{}", err);
}

#[test]
fn product_cell_counts_multiply() {
    let (a, b) = (boundary_sphere(2), standard_cube(1));
    let p = reduced_product(&a, &b, None).unwrap();
    assert!(p.validate().is_empty());
    // Nondegenerate cells of a product pair up nondegenerate cells of the factors.
    for d in 0..=2 {
        let expected: usize = (0..=d).map(|i| a.generator_count(i) * b.generator_count(d - i)).sum();
        assert_eq!(p.generator_count(d), expected);
    }
}

#[test]
fn identity_and_constant_maps_are_valid() {
    let x = standard_cube(2);
    assert!(CubicalMap::identity(&x).validate().is_empty());
    let pt = standard_cube(0);
    let v = pt.generators(0).next().unwrap();
    assert!(CubicalMap::constant(&x, &pt, v).validate().is_empty());
}

fn small_set() -> impl Strategy<Value = CubicalSet> {
    (0usize..4, 1usize..4, 0usize..2).prop_map(|(kind, n, sign)| {
        let sign = if sign == 0 { Sign::Minus } else { Sign::Plus };
        match kind {
            0 => standard_cube(n),
            1 => boundary_sphere(n),
            2 => horn(n, 1, sign).unwrap(),
            _ => disjoint_union(&standard_cube(n - 1), &boundary_sphere(n)).unwrap(),
        }
    })
}

proptest! {
    #[test]
    fn faces_of_faces_commute(x in small_set()) {
        for n in 2..=x.trunc_dim().min(3) {
            for c in x.cubes(n).unwrap() {
                for j in 2..=n {
                    for i in 1..j {
                        for e in [Sign::Minus, Sign::Plus] {
                            for w in [Sign::Minus, Sign::Plus] {
                                let lhs = x.face(&x.face(&c, j, w).unwrap(), i, e).unwrap();
                                let rhs = x.face(&x.face(&c, i, e).unwrap(), j - 1, w).unwrap();
                                prop_assert_eq!(lhs, rhs);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn euler_characteristic_is_additive(x in small_set(), y in small_set()) {
        let u = disjoint_union(&x, &y).unwrap();
        prop_assert_eq!(u.euler_characteristic(), x.euler_characteristic() + y.euler_characteristic());
    }
}
