use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use cubepsc_core::zlinalg::{bareiss_determinant, smith_normal_form, AbelianInvariants, ChainComplex, IntMatrix, PresentedGroup};

fn matrix_strategy(max: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-6i64..=6, c), r))
}

/// The product of the first k invariant factors is the gcd of the k×k minors.
fn gcd_of_minors(m: &[Vec<i64>], k: usize) -> BigInt {
    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        (k - 1..n).flat_map(|last| subsets(last, k - 1).into_iter().map(move |mut s| { s.push(last); s })).collect()
    }
    let mut g = BigInt::zero();
    for rows in subsets(m.len(), k) {
        for cols in subsets(m[0].len(), k) {
            let minor: Vec<Vec<i64>> = rows.iter().map(|&r| cols.iter().map(|&c| m[r][c]).collect()).collect();
            let d = bareiss_determinant(&IntMatrix::from_rows(&minor));
            g = num_integer::Integer::gcd(&g, &d);
        }
    }
    g
}

proptest! {
    #[test]
    fn smith_form_is_a_unimodular_diagonalization(rows in matrix_strategy(5)) {
        let m = IntMatrix::from_rows(&rows);
        let snf = smith_normal_form(&m);
        prop_assert_eq!(snf.u.mul(&m).unwrap().mul(&snf.v).unwrap(), snf.s.clone());
        prop_assert_eq!(snf.u.mul(&snf.u_inv).unwrap(), IntMatrix::identity(m.rows()));
        prop_assert_eq!(snf.v.mul(&snf.v_inv).unwrap(), IntMatrix::identity(m.cols()));
        let inv = snf.invariants();
        for w in inv.windows(2) {
            prop_assert!(w[0].is_positive() && (&w[1] % &w[0]).is_zero());
        }
        let mut product = BigInt::from(1);
        for (k, d) in inv.iter().enumerate() {
            product *= d;
            prop_assert_eq!(&product, &gcd_of_minors(&rows, k + 1));
        }
        prop_assert!(m.mul(&snf.kernel_basis()).unwrap().is_zero());
    }

    #[test]
    fn solve_finds_preimages_of_images(rows in matrix_strategy(4), x in prop::collection::vec(-5i64..=5, 4)) {
        let m = IntMatrix::from_rows(&rows);
        let x: Vec<BigInt> = x[..m.cols()].iter().map(|&v| BigInt::from(v)).collect();
        let y = m.mul_vec(&x).unwrap();
        let sol = smith_normal_form(&m).solve(&y).expect("image vectors are solvable");
        prop_assert_eq!(m.mul_vec(&sol).unwrap(), y);
    }

    #[test]
    fn quotient_order_is_the_index(orders in prop::collection::vec(1i64..6, 1..4)) {
        let g = PresentedGroup::from_cyclic_orders(&orders);
        let expected: i64 = orders.iter().product();
        prop_assert_eq!(g.invariants().order(), Some(BigInt::from(expected)));
        prop_assert_eq!(g.elements().unwrap().len() as i64, expected);
    }
}

#[test]
fn projective_plane_has_torsion() {
    // RP^2 with one cell per dimension: ∂_1 = 0, ∂_2 = 2.
    let c = ChainComplex::new(vec![1, 1, 1], vec![IntMatrix::from_rows(&[vec![0]]), IntMatrix::from_rows(&[vec![2]])]).unwrap();
    let h = c.homology_invariants().unwrap();
    assert_eq!(h[0], AbelianInvariants::free(1));
    assert_eq!(h[1].to_string(), "Z/2");
    assert!(h[2].is_trivial());
}

#[test]
fn non_complex_is_rejected() {
    let one = IntMatrix::from_rows(&[vec![1]]);
    let c = ChainComplex::new(vec![1, 1, 1], vec![one.clone(), one]);
    assert!(c.map_or(true, |c| c.check_square_zero().is_err()));
}
