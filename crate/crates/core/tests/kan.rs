use cubepsc_core::cubset::{boundary_sphere, disjoint_union, standard_cube, text};
use cubepsc_core::kan::{
    build_bg, certify_kan, is_contractible, is_kan, is_kan_fibration, pi0, pi_n, tables_isomorphic,
    verify_group_table, KanError, SearchOrder,
};
use cubepsc_core::cubset::CubicalMap;

fn cyclic(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()
}

#[test]
fn point_is_kan_and_contractible() {
    let pt = standard_cube(0).with_trunc_dim(3).unwrap();
    assert!(is_kan(&pt, 3).unwrap().holds);
    assert!(is_contractible(&pt, 3).unwrap().holds);
}

#[test]
fn circle_has_an_open_horn() {
    let circle = text::parse_single("set S\ntrunc 2\ndim 0: v\ndim 1: e\nface e 1 - = v\nface e 1 + = v\n").unwrap();
    let v = is_kan(&circle, 2).unwrap();
    assert!(!v.holds);
    assert_eq!(v.counterexample.unwrap().n, 2);
    assert!(is_kan(&circle, 1).unwrap().holds);
}

#[test]
fn components_are_counted() {
    let x = disjoint_union(&standard_cube(1), &disjoint_union(&standard_cube(0), &boundary_sphere(2)).unwrap()).unwrap();
    assert_eq!(pi0(&x).len(), 3);
}

#[test]
fn cyclic_groups_are_recovered() {
    for order in 1..=3 {
        let table = cyclic(order);
        let bg = build_bg(&table, 2).unwrap();
        let cert = certify_kan(&bg, 2).unwrap().expect("BG is Kan");
        let base = bg.generators(0).next().unwrap();
        for search in [SearchOrder::Forward, SearchOrder::Reverse] {
            let pi = pi_n(&bg, &cert, base, 1, search).unwrap();
            assert_eq!(pi.order, order);
            verify_group_table(&pi.table).unwrap();
            assert!(tables_isomorphic(&pi.table, &table));
        }
    }
}

#[test]
fn group_table_checks() {
    assert!(verify_group_table(&cyclic(4)).is_ok());
    // Not associative: a Latin square without an identity-compatible law.
    let bad = vec![vec![0, 1, 2], vec![1, 0, 2], vec![2, 2, 0]];
    assert!(verify_group_table(&bad).is_err());
    let klein: Vec<Vec<usize>> = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
    assert!(!tables_isomorphic(&klein, &cyclic(4)));
}

#[test]
fn pi_needs_a_certificate_of_the_right_height() {
    let bg = build_bg(&cyclic(2), 2).unwrap();
    let cert = certify_kan(&bg, 1).unwrap().unwrap();
    let base = bg.generators(0).next().unwrap();
    assert!(matches!(pi_n(&bg, &cert, base, 1, SearchOrder::Forward), Err(KanError::MissingCertificate { .. })));
}

#[test]
fn identity_maps_are_fibrations() {
    let x = boundary_sphere(2).with_trunc_dim(2).unwrap();
    assert!(is_kan_fibration(&CubicalMap::identity(&x), 2).unwrap().holds);
}
