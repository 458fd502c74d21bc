//! The exact couple of a bounded filtration of a finite chain complex.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::Rng;

use super::{Coord, GroupCouple, SpecError, Window};
use crate::zlinalg::{image, AbelianInvariants, ChainComplex, Homology, IntMatrix, Subgroup};

/// A chain complex with a filtration level on every basis element.
/// Levels never exceed the degree, and `F_p` (levels `≤ p`) is a subcomplex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredComplex {
    complex: ChainComplex,
    levels: Vec<Vec<usize>>,
}

/// `m` restricted to the given rows and columns.
fn submatrix(m: &IntMatrix, rows: &[usize], cols: &[usize]) -> IntMatrix {
    let mut out = IntMatrix::zeros(rows.len(), cols.len());
    for (a, &r) in rows.iter().enumerate() {
        for (b, &c) in cols.iter().enumerate() {
            out[(a, b)] = m[(r, c)].clone();
        }
    }
    out
}

/// The map sending basis element `from[c]` to `to`'s matching position (or zero).
fn transfer(from: &[usize], to: &[usize]) -> IntMatrix {
    let mut out = IntMatrix::zeros(to.len(), from.len());
    for (c, cell) in from.iter().enumerate() {
        if let Ok(r) = to.binary_search(cell) {
            out[(r, c)] = BigInt::from(1);
        }
    }
    out
}

impl FilteredComplex {
    pub fn new(complex: ChainComplex, levels: Vec<Vec<usize>>) -> Result<Self, SpecError> {
        if levels.len() != complex.dims().len() {
            return Err(SpecError::Filtration(format!(
                "{} degrees but levels for {}",
                complex.dims().len(),
                levels.len()
            )));
        }
        for (n, ls) in levels.iter().enumerate() {
            if ls.len() != complex.rank(n) {
                return Err(SpecError::Filtration(format!("degree {} has {} cells but {} levels", n, complex.rank(n), ls.len())));
            }
            if let Some(b) = ls.iter().position(|&l| l > n) {
                return Err(SpecError::Filtration(format!("cell {} in degree {} has level {} above its degree", b, n, ls[b])));
            }
        }
        for n in 1..=complex.top() {
            let d = complex.boundary(n);
            for c in 0..d.cols() {
                for r in 0..d.rows() {
                    if d[(r, c)] != BigInt::from(0) && levels[n - 1][r] > levels[n][c] {
                        return Err(SpecError::Filtration(format!(
                            "boundary of cell {} in degree {} leaves its filtration level",
                            c, n
                        )));
                    }
                }
            }
        }
        Ok(FilteredComplex { complex, levels })
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn levels(&self) -> &[Vec<usize>] {
        &self.levels
    }

    pub fn max_level(&self) -> usize {
        self.levels.iter().flatten().copied().max().unwrap_or(0)
    }

    fn cells(&self, keep: impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
        self.levels
            .iter()
            .map(|ls| (0..ls.len()).filter(|&b| keep(ls[b])).collect())
            .collect()
    }

    fn restrict(&self, cells: &[Vec<usize>]) -> ChainComplex {
        let dims = cells.iter().map(Vec::len).collect();
        let boundaries = (1..cells.len())
            .map(|n| submatrix(&self.complex.boundary(n), &cells[n - 1], &cells[n]))
            .collect();
        ChainComplex::new(dims, boundaries).expect("restriction of a filtered complex")
    }

    /// `F_p` with the original indices of its cells per degree.
    pub fn subcomplex(&self, p: i64) -> (ChainComplex, Vec<Vec<usize>>) {
        let cells = self.cells(|l| (l as i64) <= p);
        (self.restrict(&cells), cells)
    }

    /// `F_p / F_{p-1}` with the original indices of its cells per degree.
    pub fn graded_piece(&self, p: i64) -> (ChainComplex, Vec<Vec<usize>>) {
        let cells = self.cells(|l| l as i64 == p);
        (self.restrict(&cells), cells)
    }

    /// `F_p H_n / F_{p-1} H_n`, computed directly in the homology of the
    /// whole complex (independent of the couple).
    pub fn graded_homology(&self, p: i64, n: usize) -> Result<AbelianInvariants, SpecError> {
        if n > self.complex.top() {
            return Ok(AbelianInvariants::trivial());
        }
        let total = self.complex.homology(n)?;
        let all: Vec<usize> = (0..self.complex.rank(n)).collect();
        let filtered = |p: i64| -> Result<Subgroup, SpecError> {
            if p < 0 {
                return Ok(total.group.trivial_subgroup());
            }
            let (sub, cells) = self.subcomplex(p);
            let h = sub.homology(n)?;
            let embedded = transfer(&cells[n], &all).mul(&h.cycles)?;
            Ok(image(&total.coordinates, &Subgroup::new(embedded))?)
        };
        let (high, low) = (filtered(p)?, filtered(p - 1)?);
        Ok(total.group.quotient(&high, &low)?.invariants())
    }
}

/// `D_{p,q} = H_{p+q}(F_p)`, `E_{p,q} = H_{p+q}(F_p/F_{p-1})`, with the maps
/// of the long exact sequences of the pairs. The window leaves room for
/// pages up to `r_max` and for the abutment row `q = -1`.
pub fn build_filtration_couple(fc: &FilteredComplex, r_max: usize) -> Result<GroupCouple, SpecError> {
    let top = fc.complex.top() as i64;
    let levels = fc.max_level() as i64;
    let r = r_max.max(1) as i64;
    let window = Window { p_max: levels + r + top + 1, q_min: -r - 1, q_max: top + r };
    let sub: Vec<(Vec<Homology>, Vec<Vec<usize>>)> = (0..=levels)
        .map(|p| {
            let (c, cells) = fc.subcomplex(p);
            let hs = (0..=c.top()).map(|n| c.homology(n)).collect::<Result<Vec<_>, _>>()?;
            Ok((hs, cells))
        })
        .collect::<Result<_, SpecError>>()?;
    let graded: Vec<(ChainComplex, Vec<Homology>, Vec<Vec<usize>>)> = (0..=levels)
        .map(|p| {
            let (c, cells) = fc.graded_piece(p);
            let hs = (0..=c.top()).map(|n| c.homology(n)).collect::<Result<Vec<_>, _>>()?;
            Ok((c, hs, cells))
        })
        .collect::<Result<_, SpecError>>()?;
    let at = |p: i64| &sub[p.min(levels) as usize];

    let mut d = BTreeMap::new();
    let mut e = BTreeMap::new();
    let mut i = BTreeMap::new();
    let mut j = BTreeMap::new();
    let mut k = BTreeMap::new();
    for p in 0..=window.p_max {
        for n in 0..=top {
            let q = n - p;
            if !window.contains(p, q) {
                continue;
            }
            let (hs, cells) = at(p);
            let h = &hs[n as usize];
            if h.group.gens == 0 {
                continue;
            }
            d.insert((p, q), h.group.clone());
            if window.contains(p + 1, q - 1) {
                let (hs1, cells1) = at(p + 1);
                let h1 = &hs1[n as usize];
                let m = h1.coordinates.mul(&transfer(&cells[n as usize], &cells1[n as usize]))?.mul(&h.cycles)?;
                i.insert((p, q), m);
            }
            if p <= levels {
                let (_, ghs, gcells) = &graded[p as usize];
                let gh = &ghs[n as usize];
                let m = gh.coordinates.mul(&transfer(&cells[n as usize], &gcells[n as usize]))?.mul(&h.cycles)?;
                j.insert((p, q), m);
            }
        }
    }
    for p in 0..=levels {
        let (_, ghs, gcells) = &graded[p as usize];
        for n in p..=top {
            let q = n - p;
            let gh = &ghs[n as usize];
            if gh.group.gens == 0 || !window.contains(p, q) {
                continue;
            }
            e.insert((p, q), gh.group.clone());
            if p >= 1 && n >= 1 {
                let (hs, cells) = at(p - 1);
                let lower = &hs[(n - 1) as usize];
                let boundary = submatrix(&fc.complex.boundary(n as usize), &cells[(n - 1) as usize], &gcells[n as usize]);
                k.insert((p, q), lower.coordinates.mul(&boundary)?.mul(&gh.cycles)?);
            }
        }
    }
    let drop_empty = |m: BTreeMap<Coord, IntMatrix>| -> BTreeMap<Coord, IntMatrix> {
        m.into_iter().filter(|(_, x)| x.rows() > 0 && x.cols() > 0).collect()
    };
    GroupCouple::new(window, d, e, drop_empty(i), drop_empty(j), drop_empty(k))
}

/// A random filtered complex in degrees `0..=max_degree`, with at most
/// `max_levels` levels and `max_basis` cells per degree.
///
/// Built from elementary pieces `∂x = m·y` and isolated cells, then
/// scrambled by filtration-preserving unimodular changes of basis.
pub fn random_filtered_complex<R: Rng>(rng: &mut R, max_degree: usize, max_levels: usize, max_basis: usize) -> FilteredComplex {
    let dims: Vec<usize> = (0..=max_degree).map(|_| rng.gen_range(1..=max_basis)).collect();
    let levels: Vec<Vec<usize>> = dims
        .iter()
        .enumerate()
        .map(|(n, &c)| (0..c).map(|_| rng.gen_range(0..=n.min(max_levels - 1))).collect())
        .collect();
    let mut boundaries: Vec<IntMatrix> = (1..=max_degree).map(|n| IntMatrix::zeros(dims[n - 1], dims[n])).collect();
    // Which cells already take part in an elementary piece.
    let mut used: Vec<Vec<bool>> = dims.iter().map(|&c| vec![false; c]).collect();
    for n in 1..=max_degree {
        for x in 0..dims[n] {
            if used[n][x] || rng.gen_bool(0.4) {
                continue;
            }
            let candidates: Vec<usize> = (0..dims[n - 1])
                .filter(|&y| !used[n - 1][y] && levels[n - 1][y] <= levels[n][x])
                .collect();
            if candidates.is_empty() {
                continue;
            }
            let y = candidates[rng.gen_range(0..candidates.len())];
            let mult = [1, 1, 2, 2, 3][rng.gen_range(0..5)];
            boundaries[n - 1][(y, x)] = BigInt::from(mult);
            used[n][x] = true;
            used[n - 1][y] = true;
        }
    }
    for _ in 0..4 * dims.iter().sum::<usize>() {
        let n = rng.gen_range(0..=max_degree);
        if dims[n] < 2 {
            continue;
        }
        let a = rng.gen_range(0..dims[n]);
        let b = rng.gen_range(0..dims[n]);
        if a == b || levels[n][b] > levels[n][a] {
            continue;
        }
        let kk = BigInt::from([-1, 1, 2][rng.gen_range(0..3)]);
        // New basis e_a + k e_b: columns of ∂_n and rows of ∂_{n+1} change.
        if n >= 1 {
            boundaries[n - 1].add_col(a, b, &kk);
        }
        if n < max_degree {
            boundaries[n].add_row(b, a, &(-kk));
        }
    }
    let complex = ChainComplex::new(dims, boundaries).expect("basis change preserves ∂² = 0");
    FilteredComplex::new(complex, levels).expect("basis change preserves the filtration")
}


#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn times_two() -> FilteredComplex {
        let c = ChainComplex::new(
            vec![1, 1, 1],
            vec![IntMatrix::from_rows(&[vec![0]]), IntMatrix::from_rows(&[vec![2]])],
        )
        .unwrap();
        FilteredComplex::new(c, vec![vec![0], vec![1], vec![1]]).unwrap()
    }

    #[test]
    fn two_step_filtration_converges() {
        let fc = times_two();
        let couple = build_filtration_couple(&fc, 4).unwrap();
        assert!(couple.validate().unwrap().passed());
        let (report, entries) = couple.convergence_check_from(0).unwrap();
        assert!(report.passed(), "{:?}", report.violations);
        for e in &entries {
            assert_eq!(e.graded, fc.graded_homology(e.p, (e.p + e.q) as usize).unwrap());
        }
        let e11 = entries.iter().find(|e| (e.p, e.q) == (1, 0)).unwrap();
        assert_eq!(e11.e_infinity.to_string(), "Z/2");
    }

    #[test]
    fn rejects_levels_above_degree() {
        let c = ChainComplex::new(vec![1], vec![]).unwrap();
        assert!(FilteredComplex::new(c, vec![vec![1]]).is_err());
    }

    #[test]
    fn random_complexes_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let fc = random_filtered_complex(&mut rng, 3, 4, 6);
            let couple = build_filtration_couple(&fc, 3).unwrap();
            let v = couple.validate().unwrap();
            assert!(v.passed(), "{:?}", v.violations);
            for r in 1..=3 {
                let rep = couple.differential_checks(r).unwrap();
                assert!(rep.passed(), "r={} {:?}", r, rep.violations);
                let rep = couple.homology_step_check(r, &Default::default()).unwrap();
                assert!(rep.passed(), "r={} {:?}", r, rep.violations);
            }
            let (rep, _) = couple.convergence_check().unwrap();
            assert!(rep.passed(), "{:?}", rep.violations);
        }
    }
}
