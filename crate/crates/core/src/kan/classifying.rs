//! The cubical classifying space of a finite group.

use super::{homotopy::verify_group_table, KanError};
use crate::boxcat::Sign;
use crate::cubset::{build_presentation, CubicalSet, PresentationModel};

struct BgModel<'a> {
    table: &'a [Vec<usize>],
    identity: usize,
    inverses: Vec<usize>,
}

/// Vertex `v` of `I^n` has bit `i-1` set iff its `i`-th coordinate is `+`.
fn insert_bit(v: usize, i: usize, bit: usize) -> usize {
    let low = v & ((1 << (i - 1)) - 1);
    let high = v >> (i - 1);
    low | (bit << (i - 1)) | (high << i)
}

impl BgModel<'_> {
    fn normalize(&self, f: Vec<usize>) -> Vec<usize> {
        let g = self.inverses[f[0]];
        f.into_iter().map(|x| self.table[g][x]).collect()
    }
}

impl PresentationModel for BgModel<'_> {
    /// Group labels on the vertices of a cube, with the first one the identity.
    type Elem = Vec<usize>;

    fn elements(&self, n: usize) -> Vec<Vec<usize>> {
        let m = self.table.len();
        let free = (1usize << n) - 1;
        let total = m.pow(free as u32);
        (0..total)
            .map(|mut code| {
                let mut f = vec![self.identity];
                for _ in 0..free {
                    f.push(code % m);
                    code /= m;
                }
                f
            })
            .collect()
    }

    fn face(&self, f: &Vec<usize>, i: usize, sign: Sign) -> Vec<usize> {
        let n = f.len().trailing_zeros() as usize;
        let bit = usize::from(sign == Sign::Plus);
        let g: Vec<usize> = (0..1usize << (n - 1)).map(|v| f[insert_bit(v, i, bit)]).collect();
        self.normalize(g)
    }

    fn split(&self, f: &Vec<usize>) -> (Vec<usize>, Vec<usize>) {
        let n = f.len().trailing_zeros() as usize;
        let degen: Vec<usize> =
            (1..=n).filter(|&i| (0..f.len()).all(|v| f[v] == f[v ^ (1 << (i - 1))])).collect();
        let base = degen.iter().rev().fold(f.clone(), |g, &i| self.face(&g, i, Sign::Minus));
        (degen, base)
    }

    fn name(&self, f: &Vec<usize>) -> String {
        let parts: Vec<String> = f.iter().map(ToString::to_string).collect();
        format!("[{}]", parts.join(","))
    }
}

/// `B(G)` truncated at `trunc`, from a multiplication table. The table is
/// checked to be a group first.
pub fn build_bg(table: &[Vec<usize>], trunc: usize) -> Result<CubicalSet, KanError> {
    let (identity, inverses) = verify_group_table(table).map_err(KanError::NotAGroup)?;
    Ok(build_presentation(&BgModel { table, identity, inverses }, trunc)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bz2_counts() {
        let z2 = vec![vec![0, 1], vec![1, 0]];
        let b = build_bg(&z2, 2).unwrap();
        assert_eq!(b.generator_count(0), 1);
        assert_eq!(b.generator_count(1), 1);
        assert!(b.validate().is_empty());
    }

    #[test]
    fn rejects_non_groups() {
        assert!(matches!(build_bg(&[vec![0, 0], vec![0, 0]], 1), Err(KanError::NotAGroup(_))));
    }
}
