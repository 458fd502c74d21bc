//! Chain complexes of free abelian groups and their homology.

use num_bigint::BigInt;
use num_traits::One;

use super::{smith_normal_form, AbelianInvariants, IntMatrix, PresentedGroup, ZError};
use crate::boxcat::Sign;
use crate::cubset::CubicalSet;

/// `C_0 ← C_1 ← … ← C_top`, each `C_n = ℤ^{dims[n]}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplex {
    dims: Vec<usize>,
    /// `boundaries[n-1]` is `∂_n: C_n → C_{n-1}`.
    boundaries: Vec<IntMatrix>,
}

/// `H_n` together with a cycle basis and coordinates on cycles.
#[derive(Debug, Clone)]
pub struct Homology {
    pub group: PresentedGroup,
    /// Columns form a basis of `ker ∂_n`.
    pub cycles: IntMatrix,
    /// A left inverse of `cycles`: exact coordinates of any cycle.
    pub coordinates: IntMatrix,
}

impl Homology {
    /// Class of a cycle, in the generators of `group`.
    pub fn class_of(&self, z: &[BigInt]) -> Result<Vec<BigInt>, ZError> {
        self.coordinates.mul_vec(z)
    }
}

impl ChainComplex {
    pub fn new(dims: Vec<usize>, boundaries: Vec<IntMatrix>) -> Result<Self, ZError> {
        if dims.is_empty() {
            return Err(ZError::Shape("a chain complex needs at least one degree".into()));
        }
        if boundaries.len() + 1 != dims.len() {
            return Err(ZError::Shape(format!("{} degrees but {} boundary maps", dims.len(), boundaries.len())));
        }
        for (k, b) in boundaries.iter().enumerate() {
            let n = k + 1;
            if b.rows() != dims[n - 1] || b.cols() != dims[n] {
                return Err(ZError::Shape(format!(
                    "∂_{} is {}x{}, expected {}x{}",
                    n,
                    b.rows(),
                    b.cols(),
                    dims[n - 1],
                    dims[n]
                )));
            }
        }
        let c = ChainComplex { dims, boundaries };
        c.check_square_zero()?;
        Ok(c)
    }

    pub fn top(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn rank(&self, n: usize) -> usize {
        self.dims.get(n).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// `∂_n`, with zero maps outside the stored range.
    pub fn boundary(&self, n: usize) -> IntMatrix {
        if n == 0 || n > self.top() {
            return IntMatrix::zeros(if n == 0 { 0 } else { self.rank(n - 1) }, self.rank(n));
        }
        self.boundaries[n - 1].clone()
    }

    pub fn check_square_zero(&self) -> Result<(), ZError> {
        for n in 2..=self.top() {
            if !self.boundary(n - 1).mul(&self.boundary(n))?.is_zero() {
                return Err(ZError::NotComplex { degree: n - 1 });
            }
        }
        Ok(())
    }

    pub fn homology(&self, n: usize) -> Result<Homology, ZError> {
        let dn = self.boundary(n);
        let snf = smith_normal_form(&dn);
        let cycles = snf.kernel_basis();
        let coordinates = snf.kernel_coordinates();
        let relations = coordinates.mul(&self.boundary(n + 1))?;
        Ok(Homology { group: PresentedGroup::new(relations), cycles, coordinates })
    }

    pub fn homology_invariants(&self) -> Result<Vec<AbelianInvariants>, ZError> {
        (0..=self.top()).map(|n| Ok(self.homology(n)?.group.invariants())).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(n, &d)| if n % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }

    /// Conjugates every chain group by a unimodular change of basis.
    pub fn change_basis(&self, bases: &[IntMatrix], inverses: &[IntMatrix]) -> Result<ChainComplex, ZError> {
        let boundaries = (1..=self.top())
            .map(|n| inverses[n - 1].mul(&self.boundary(n))?.mul(&bases[n]))
            .collect::<Result<Vec<_>, _>>()?;
        ChainComplex::new(self.dims.clone(), boundaries)
    }
}

/// The normalized cubical chain complex: generators as basis,
/// `∂x = Σ_i (-1)^i (∂_i^+ x - ∂_i^- x)`, degenerate faces dropped.
pub fn cubical_chain_complex(x: &CubicalSet) -> ChainComplex {
    let top = x.max_generator_dim().min(x.trunc_dim());
    let dims: Vec<usize> = (0..=top).map(|d| x.generator_count(d)).collect();
    let mut boundaries = Vec::new();
    for n in 1..=top {
        let mut m = IntMatrix::zeros(dims[n - 1], dims[n]);
        for g in x.generators(n) {
            for i in 1..=n {
                let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                for (eps, s) in [(Sign::Plus, sign.clone()), (Sign::Minus, -sign.clone())] {
                    let f = x.generator_face(g, i, eps);
                    if !f.is_degenerate() {
                        m[(f.gen.idx, g.idx)] += s;
                    }
                }
            }
        }
        boundaries.push(m);
    }
    ChainComplex::new(dims, boundaries).expect("cubical boundary squares to zero")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubset::{boundary_sphere, standard_cube};

    #[test]
    fn times_two() {
        let c = ChainComplex::new(vec![1, 1], vec![IntMatrix::from_rows(&[vec![2]])]).unwrap();
        let h = c.homology_invariants().unwrap();
        assert_eq!(h[0].to_string(), "Z/2");
        assert!(h[1].is_trivial());
    }

    #[test]
    fn square_and_its_boundary() {
        let h = cubical_chain_complex(&standard_cube(2)).homology_invariants().unwrap();
        assert_eq!(h.iter().map(ToString::to_string).collect::<Vec<_>>(), vec!["Z", "0", "0"]);
        let h = cubical_chain_complex(&boundary_sphere(2)).homology_invariants().unwrap();
        assert_eq!(h.iter().map(ToString::to_string).collect::<Vec<_>>(), vec!["Z", "Z"]);
    }

    #[test]
    fn rejects_non_complex() {
        let r = ChainComplex::new(
            vec![1, 1, 1],
            vec![IntMatrix::from_rows(&[vec![1]]), IntMatrix::from_rows(&[vec![1]])],
        );
        assert_eq!(r.unwrap_err(), ZError::NotComplex { degree: 1 });
    }
}
