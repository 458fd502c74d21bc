//! The homomorphism theorem for exact sequences `L → M → A` of finite
//! commutative monoids with `A` a group.

use serde::Serialize;

use super::{FiniteNode, SpecError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonoidTheoremReport {
    /// Congruence classes of `M` modulo `f(L)`.
    pub classes: Vec<Vec<usize>>,
    pub quotient_is_group: bool,
    pub induced_is_isomorphism: bool,
}

impl MonoidTheoremReport {
    pub fn passed(&self) -> bool {
        self.quotient_is_group && self.induced_is_isomorphism
    }
}

fn require(ok: bool, what: &str) -> Result<(), SpecError> {
    if ok {
        Ok(())
    } else {
        Err(SpecError::Precondition(what.to_string()))
    }
}

fn is_hom(src: &FiniteNode, tgt: &FiniteNode, f: &[usize]) -> bool {
    f.len() == src.size
        && f.iter().all(|&x| x < tgt.size)
        && f[src.base] == tgt.base
        && (0..src.size).all(|a| (0..src.size).all(|b| f[src.mul(a, b)] == tgt.mul(f[a], f[b])))
}

fn find(parent: &mut [usize], mut a: usize) -> usize {
    while parent[a] != a {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    a
}

fn union(parent: &mut [usize], a: usize, b: usize) -> bool {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra == rb {
        return false;
    }
    parent[ra.max(rb)] = ra.min(rb);
    true
}

/// Forms `M / f(L)` by the congruence generated by
/// `m₁ ~ m₂ ⇔ m₁ + f(l₁) = m₂ + f(l₂)`, and checks that it is a group
/// mapped isomorphically onto `A` by `g`.
pub fn monoid_hom_theorem_check(
    l: &FiniteNode,
    m: &FiniteNode,
    a: &FiniteNode,
    f: &[usize],
    g: &[usize],
) -> Result<MonoidTheoremReport, SpecError> {
    for (name, node) in [("L", l), ("M", m), ("A", a)] {
        require(node.is_monoid() && node.is_abelian(), &format!("{} is not a commutative monoid", name))?;
    }
    require(a.is_group(), "A is not a group")?;
    require(is_hom(l, m, f), "f is not a homomorphism")?;
    require(is_hom(m, a, g), "g is not a homomorphism")?;
    let mut seen = vec![false; m.size];
    for &x in f {
        require(!seen[x], "f is not injective")?;
        seen[x] = true;
    }
    require((0..a.size).all(|y| g.contains(&y)), "g is not surjective")?;
    let ker: Vec<usize> = (0..m.size).filter(|&x| g[x] == a.base).collect();
    let mut im: Vec<usize> = f.to_vec();
    im.sort_unstable();
    require(ker == im, "ker g ≠ im f")?;

    let mut parent: Vec<usize> = (0..m.size).collect();
    // m₁, m₂ with a common m + f(l) value are related.
    let mut reach: Vec<Option<usize>> = vec![None; m.size];
    for x in 0..m.size {
        for &fl in f {
            let y = m.mul(x, fl);
            match reach[y] {
                Some(first) => {
                    union(&mut parent, first, x);
                }
                None => reach[y] = Some(x),
            }
        }
    }
    // Close under translation.
    loop {
        let mut changed = false;
        for x in 0..m.size {
            let rx = find(&mut parent, x);
            for c in 0..m.size {
                let (u, v) = (m.mul(x, c), m.mul(rx, c));
                changed |= union(&mut parent, u, v);
            }
        }
        if !changed {
            break;
        }
    }
    let mut roots: Vec<usize> = (0..m.size).map(|x| find(&mut parent, x)).collect();
    let mut reps: Vec<usize> = roots.clone();
    reps.sort_unstable();
    reps.dedup();
    let classes: Vec<Vec<usize>> = reps.iter().map(|&r| (0..m.size).filter(|&x| roots[x] == r).collect()).collect();
    let class_of = |x: usize, roots: &mut Vec<usize>| reps.binary_search(&roots[x]).expect("root is a representative");
    let n = classes.len();
    let table: Vec<Vec<usize>> = (0..n)
        .map(|s| (0..n).map(|t| class_of(m.mul(classes[s][0], classes[t][0]), &mut roots)).collect())
        .collect();
    let zero = class_of(m.base, &mut roots);
    let quotient = FiniteNode::with_op(table, zero);
    let quotient_is_group = quotient.is_group();
    let constant = classes.iter().all(|c| c.iter().all(|&x| g[x] == g[c[0]]));
    let induced: Vec<usize> = classes.iter().map(|c| g[c[0]]).collect();
    let bijective = {
        let mut sorted = induced.clone();
        sorted.sort_unstable();
        sorted == (0..a.size).collect::<Vec<_>>()
    };
    let induced_is_isomorphism = constant && bijective && is_hom(&quotient, a, &induced);
    Ok(MonoidTheoremReport { classes, quotient_is_group, induced_is_isomorphism })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_kernel() {
        let l = FiniteNode::zero();
        let z2 = FiniteNode::cyclic(2);
        let rep = monoid_hom_theorem_check(&l, &z2, &z2, &[0], &[0, 1]).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.classes.len(), 2);
    }

    #[test]
    fn product_with_max_monoid() {
        // M = ℤ/2 × ({0,1}, max), element (a,b) ↦ 2a + b.
        let op = (0..4)
            .map(|x: usize| (0..4).map(|y: usize| 2 * ((x / 2 + y / 2) % 2) + (x % 2).max(y % 2)).collect())
            .collect();
        let m = FiniteNode::with_op(op, 0);
        let l = FiniteNode::with_op(vec![vec![0, 1], vec![1, 1]], 0);
        let a = FiniteNode::cyclic(2);
        let rep = monoid_hom_theorem_check(&l, &m, &a, &[0, 1], &[0, 0, 1, 1]).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.classes, vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn target_must_be_a_group() {
        let l = FiniteNode::zero();
        let max = FiniteNode::with_op(vec![vec![0, 1], vec![1, 1]], 0);
        let err = monoid_hom_theorem_check(&l, &max, &max, &[0], &[0, 1]).unwrap_err();
        assert_eq!(err, SpecError::Precondition("A is not a group".into()));
    }
}
