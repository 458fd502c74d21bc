//! Finitely generated abelian groups `ℤ^n / colspan(R)` and their subgroups.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::{smith_normal_form, IntMatrix, ZError};

/// Free rank and torsion coefficients `d_1 | d_2 | …` (all `> 1`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbelianInvariants {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl AbelianInvariants {
    pub fn trivial() -> Self {
        AbelianInvariants { free_rank: 0, torsion: vec![] }
    }

    pub fn free(rank: usize) -> Self {
        AbelianInvariants { free_rank: rank, torsion: vec![] }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// The group order, when finite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{}", r)),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{}", d)));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

impl Serialize for AbelianInvariants {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `ℤ^gens / colspan(relations)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentedGroup {
    pub gens: usize,
    pub relations: IntMatrix,
}

/// A subgroup given by generators (columns) in the ambient coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    pub gens: IntMatrix,
}

fn zero_vec(n: usize) -> Vec<BigInt> {
    vec![BigInt::zero(); n]
}

impl PresentedGroup {
    pub fn zero() -> Self {
        PresentedGroup { gens: 0, relations: IntMatrix::zeros(0, 0) }
    }

    pub fn free(n: usize) -> Self {
        PresentedGroup { gens: n, relations: IntMatrix::zeros(n, 0) }
    }

    pub fn new(relations: IntMatrix) -> Self {
        PresentedGroup { gens: relations.rows(), relations }
    }

    /// `⊕ ℤ/d_i`, where `d_i = 0` gives a free summand.
    pub fn from_cyclic_orders(orders: &[i64]) -> Self {
        let n = orders.len();
        let mut r = IntMatrix::zeros(n, n);
        for (i, &d) in orders.iter().enumerate() {
            r[(i, i)] = BigInt::from(d);
        }
        PresentedGroup { gens: n, relations: r }
    }

    pub fn invariants(&self) -> AbelianInvariants {
        let snf = smith_normal_form(&self.relations);
        let torsion: Vec<BigInt> = snf.invariants().into_iter().filter(|d| !d.is_one()).collect();
        AbelianInvariants { free_rank: self.gens - snf.rank, torsion }
    }

    /// Whether `x` is zero in the group.
    pub fn is_zero(&self, x: &[BigInt]) -> bool {
        lattice_contains(&self.relations, x)
    }

    pub fn equal(&self, x: &[BigInt], y: &[BigInt]) -> bool {
        let d: Vec<BigInt> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.is_zero(&d)
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup { gens: IntMatrix::identity(self.gens) }
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup { gens: IntMatrix::zeros(self.gens, 0) }
    }

    /// A canonical representative of the class of `x` together with the
    /// coordinates used: `(U x)_i mod d_i` over the nontrivial cyclic factors.
    /// Requires a finite group.
    pub fn canonical_coordinates(&self, x: &[BigInt]) -> Result<Vec<BigInt>, ZError> {
        let snf = smith_normal_form(&self.relations);
        if snf.rank < self.gens {
            return Err(ZError::Infinite);
        }
        let z = snf.u.mul_vec(x)?;
        Ok((0..self.gens)
            .filter(|&i| !snf.s[(i, i)].is_one())
            .map(|i| z[i].mod_floor(&snf.s[(i, i)]))
            .collect())
    }

    /// Every element of a finite group, one representative per class, in the
    /// order of their canonical coordinates.
    pub fn elements(&self) -> Result<Vec<Vec<BigInt>>, ZError> {
        let snf = smith_normal_form(&self.relations);
        if snf.rank < self.gens {
            return Err(ZError::Infinite);
        }
        let factors: Vec<usize> = (0..self.gens).filter(|&i| !snf.s[(i, i)].is_one()).collect();
        let mut coords: Vec<Vec<BigInt>> = vec![vec![]];
        for &i in &factors {
            let d = &snf.s[(i, i)];
            let mut next = Vec::new();
            for c in &coords {
                let mut k = BigInt::zero();
                while &k < d {
                    let mut c2 = c.clone();
                    c2.push(k.clone());
                    next.push(c2);
                    k += 1;
                }
            }
            coords = next;
        }
        coords
            .into_iter()
            .map(|c| {
                let mut z = zero_vec(self.gens);
                for (&i, v) in factors.iter().zip(c) {
                    z[i] = v;
                }
                snf.u_inv.mul_vec(&z)
            })
            .collect()
    }

    /// Whether `f: self → target` respects relations.
    pub fn hom_well_defined(&self, f: &IntMatrix, target: &PresentedGroup) -> Result<bool, ZError> {
        check_hom_shape(f, self, target)?;
        let images = f.mul(&self.relations)?;
        Ok(images.columns().iter().all(|c| target.is_zero(c)))
    }

    /// Contains test for a subgroup (relations included implicitly).
    pub fn contains(&self, h: &Subgroup, x: &[BigInt]) -> bool {
        let m = h.gens.hstack(&self.relations).expect("same ambient");
        lattice_contains(&m, x)
    }

    pub fn is_subgroup_of(&self, a: &Subgroup, b: &Subgroup) -> bool {
        a.gens.columns().iter().all(|c| self.contains(b, c))
    }

    pub fn subgroups_equal(&self, a: &Subgroup, b: &Subgroup) -> bool {
        self.is_subgroup_of(a, b) && self.is_subgroup_of(b, a)
    }

    /// `a + b`.
    pub fn sum(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        Subgroup { gens: a.gens.hstack(&b.gens).expect("same ambient") }.reduced()
    }

    /// `big / small` as a presented group on the generators of `big`.
    pub fn quotient(&self, big: &Subgroup, small: &Subgroup) -> Result<PresentedGroup, ZError> {
        let s = big.gens.cols();
        let domain = PresentedGroup::free(s);
        let k = preimage(&big.gens, &domain, self, small)?;
        Ok(PresentedGroup { gens: s, relations: k.gens })
    }
}

fn check_hom_shape(f: &IntMatrix, src: &PresentedGroup, tgt: &PresentedGroup) -> Result<(), ZError> {
    if f.rows() != tgt.gens || f.cols() != src.gens {
        return Err(ZError::Shape(format!(
            "map is {}x{}, groups have {} -> {} generators",
            f.rows(),
            f.cols(),
            src.gens,
            tgt.gens
        )));
    }
    Ok(())
}

/// Whether `x` lies in the lattice spanned by the columns of `m`.
pub fn lattice_contains(m: &IntMatrix, x: &[BigInt]) -> bool {
    if x.iter().all(Zero::is_zero) {
        return true;
    }
    if m.cols() == 0 {
        return false;
    }
    smith_normal_form(m).solve(x).is_some()
}

impl Subgroup {
    pub fn new(gens: IntMatrix) -> Self {
        Subgroup { gens }
    }

    /// Replaces the generators by a lattice basis of their span.
    pub fn reduced(&self) -> Subgroup {
        if self.gens.cols() == 0 {
            return self.clone();
        }
        let snf = smith_normal_form(&self.gens);
        let mut basis = snf.image_basis();
        normalize_columns(&mut basis);
        Subgroup { gens: basis }
    }

    pub fn generator_count(&self) -> usize {
        self.gens.cols()
    }
}

fn normalize_columns(m: &mut IntMatrix) {
    for c in 0..m.cols() {
        let lead = (0..m.rows()).map(|r| m[(r, c)].clone()).find(|x| !x.is_zero());
        if lead.is_some_and(|x| x.is_negative()) {
            for r in 0..m.rows() {
                let v = -&m[(r, c)];
                m[(r, c)] = v;
            }
        }
    }
}

/// `f(h)` for `f: src → tgt`.
pub fn image(f: &IntMatrix, h: &Subgroup) -> Result<Subgroup, ZError> {
    Ok(Subgroup { gens: f.mul(&h.gens)? }.reduced())
}

/// `f⁻¹(h)` for `f: src → tgt` and `h ≤ tgt`, as a subgroup of `src`.
pub fn preimage(f: &IntMatrix, src: &PresentedGroup, tgt: &PresentedGroup, h: &Subgroup) -> Result<Subgroup, ZError> {
    check_hom_shape(f, src, tgt)?;
    let n = src.gens;
    if n == 0 {
        return Ok(Subgroup { gens: IntMatrix::zeros(0, 0) });
    }
    // Kernel of [F | -H | -R]; its first n coordinates span the preimage.
    let m = f.hstack(&h.gens.neg())?.hstack(&tgt.relations.neg())?;
    let k = smith_normal_form(&m).kernel_basis();
    let proj = k.select_rows(0..n);
    let gens = proj.hstack(&src.relations)?;
    Ok(Subgroup { gens }.reduced())
}

/// `ker f` for `f: src → tgt`.
pub fn kernel(f: &IntMatrix, src: &PresentedGroup, tgt: &PresentedGroup) -> Result<Subgroup, ZError> {
    preimage(f, src, tgt, &tgt.trivial_subgroup())
}

/// Some `x` with `f x ≡ y` modulo the target relations.
pub fn solve_modulo(f: &IntMatrix, tgt: &PresentedGroup, y: &[BigInt]) -> Option<Vec<BigInt>> {
    let n = f.cols();
    if y.iter().all(Zero::is_zero) {
        return Some(zero_vec(n));
    }
    let m = f.hstack(&tgt.relations).ok()?;
    if m.cols() == 0 {
        return None;
    }
    let sol = smith_normal_form(&m).solve(y)?;
    Some(sol[..n].to_vec())
}

/// Like [`solve_modulo`] but only over the span of `h`'s generators; returns
/// coefficients with respect to them.
pub fn solve_in_subgroup(h: &Subgroup, ambient: &PresentedGroup, y: &[BigInt]) -> Option<Vec<BigInt>> {
    solve_modulo(&h.gens, ambient, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn invariants_of_cyclic_sum() {
        let g = PresentedGroup::from_cyclic_orders(&[2, 3, 0]);
        let inv = g.invariants();
        assert_eq!(inv.free_rank, 1);
        assert_eq!(inv.torsion, v(&[6]));
        assert_eq!(inv.to_string(), "Z + Z/6");
    }

    #[test]
    fn finite_elements() {
        let g = PresentedGroup::from_cyclic_orders(&[2, 2]);
        let els = g.elements().unwrap();
        assert_eq!(els.len(), 4);
        for (a, x) in els.iter().enumerate() {
            for y in &els[a + 1..] {
                assert!(!g.equal(x, y));
            }
        }
        assert!(PresentedGroup::free(1).elements().is_err());
    }

    #[test]
    fn preimage_and_kernel() {
        // ×2: Z → Z/4
        let src = PresentedGroup::free(1);
        let tgt = PresentedGroup::from_cyclic_orders(&[4]);
        let f = IntMatrix::from_rows(&[vec![2]]);
        let k = kernel(&f, &src, &tgt).unwrap();
        assert!(src.subgroups_equal(&k, &Subgroup::new(IntMatrix::from_rows(&[vec![2]]))));
        let h = Subgroup::new(IntMatrix::from_rows(&[vec![2]]));
        let p = preimage(&f, &src, &tgt, &h).unwrap();
        assert!(src.subgroups_equal(&p, &src.whole()));
    }

    #[test]
    fn quotient_of_subgroups() {
        let g = PresentedGroup::free(2);
        let big = Subgroup::new(IntMatrix::from_rows(&[vec![1, 0], vec![0, 1]]));
        let small = Subgroup::new(IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]));
        let q = g.quotient(&big, &small).unwrap();
        assert_eq!(q.invariants().torsion, v(&[6]));
    }

    #[test]
    fn solve_modulo_relations() {
        let tgt = PresentedGroup::from_cyclic_orders(&[5]);
        let f = IntMatrix::from_rows(&[vec![2]]);
        let x = solve_modulo(&f, &tgt, &v(&[1])).unwrap();
        assert!(tgt.equal(&f.mul_vec(&x).unwrap(), &v(&[1])));
    }
}
