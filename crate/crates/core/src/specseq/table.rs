//! Exact couples of finite pointed sets, monoids and groups given by tables.
//!
//! Quotients `Z^r / B^r` are sets of left cosets, which is all the structure
//! available when `E` is a non-abelian group.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{CheckReport, Coord, GroupCouple, SpecError, Window};
use crate::zlinalg::PresentedGroup;

/// A finite pointed set, optionally with a binary operation whose neutral
/// element is the basepoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteNode {
    pub size: usize,
    pub base: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub op: Option<Vec<Vec<usize>>>,
}

impl FiniteNode {
    pub fn zero() -> Self {
        FiniteNode { size: 1, base: 0, op: Some(vec![vec![0]]) }
    }

    pub fn pointed(size: usize, base: usize) -> Self {
        FiniteNode { size, base, op: None }
    }

    pub fn with_op(op: Vec<Vec<usize>>, base: usize) -> Self {
        FiniteNode { size: op.len(), base, op: Some(op) }
    }

    /// `ℤ/n` under addition.
    pub fn cyclic(n: usize) -> Self {
        FiniteNode::with_op((0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect(), 0)
    }

    pub fn is_zero(&self) -> bool {
        self.size == 1
    }

    fn well_formed(&self) -> Result<(), String> {
        if self.size == 0 || self.base >= self.size {
            return Err(format!("basepoint {} outside a set of size {}", self.base, self.size));
        }
        if let Some(op) = &self.op {
            if op.len() != self.size || op.iter().any(|row| row.len() != self.size || row.iter().any(|&x| x >= self.size)) {
                return Err("operation table has the wrong shape".into());
            }
        }
        Ok(())
    }

    /// Associative with the basepoint as two-sided identity.
    pub fn is_monoid(&self) -> bool {
        let Some(op) = &self.op else { return false };
        let n = self.size;
        (0..n).all(|a| op[self.base][a] == a && op[a][self.base] == a)
            && (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| op[op[a][b]][c] == op[a][op[b][c]])))
    }

    pub fn is_group(&self) -> bool {
        self.is_monoid() && (0..self.size).all(|a| self.inverse(a).is_some())
    }

    pub fn is_abelian(&self) -> bool {
        let Some(op) = &self.op else { return false };
        (0..self.size).all(|a| (0..self.size).all(|b| op[a][b] == op[b][a]))
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.op.as_ref().expect("node has an operation")[a][b]
    }

    pub fn inverse(&self, a: usize) -> Option<usize> {
        let op = self.op.as_ref()?;
        (0..self.size).find(|&b| op[a][b] == self.base && op[b][a] == self.base)
    }

    /// Left cosets `zH` for `z` in `within`, each sorted, listed by first element.
    pub fn left_cosets(&self, within: &[usize], subgroup: &[usize]) -> Vec<Vec<usize>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &z in within {
            if seen.contains(&z) {
                continue;
            }
            let coset: BTreeSet<usize> = subgroup.iter().map(|&h| self.mul(z, h)).collect();
            seen.extend(coset.iter().copied());
            out.push(coset.into_iter().collect::<Vec<_>>());
        }
        out.sort();
        out
    }
}

/// `Z^r`, `B^r` and the cosets of `E^r` at one bidegree, as element lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableNodePage {
    pub p: i64,
    pub q: i64,
    pub r: usize,
    pub z: Vec<usize>,
    pub b: Vec<usize>,
    /// Left cosets of `B^r` in `Z^r`; absent on the row `q = 0` for `r ≥ 2`.
    pub cosets: Option<Vec<Vec<usize>>>,
}

impl TableNodePage {
    pub fn coset_of(&self, x: usize) -> Option<usize> {
        self.cosets.as_ref()?.iter().position(|c| c.contains(&x))
    }
}

/// `d^r` as a map from elements of `Z^r` to coset indices of the target page.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableDifferential {
    pub r: usize,
    pub source: Coord,
    pub target: Coord,
    pub values: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableCouple {
    pub window: Window,
    pub d: BTreeMap<Coord, FiniteNode>,
    pub e: BTreeMap<Coord, FiniteNode>,
    pub i: BTreeMap<Coord, Vec<usize>>,
    pub j: BTreeMap<Coord, Vec<usize>>,
    pub k: BTreeMap<Coord, Vec<usize>>,
}

impl TableCouple {
    pub fn new(
        window: Window,
        d: BTreeMap<Coord, FiniteNode>,
        e: BTreeMap<Coord, FiniteNode>,
        i: BTreeMap<Coord, Vec<usize>>,
        j: BTreeMap<Coord, Vec<usize>>,
        k: BTreeMap<Coord, Vec<usize>>,
    ) -> Result<Self, SpecError> {
        for (&(p, q), node) in d.iter().chain(e.iter()) {
            if p < 0 {
                return Err(SpecError::Malformed(format!("node at ({},{}) has p < 0", p, q)));
            }
            window.check(p, q)?;
            node.well_formed().map_err(|m| SpecError::Malformed(format!("({},{}): {}", p, q, m)))?;
        }
        let c = TableCouple { window, d, e, i, j, k };
        for (name, maps) in [("i", &c.i), ("j", &c.j), ("k", &c.k)] {
            for (&(p, q), map) in maps {
                let (src, tgt) = c.ends(name, p, q)?;
                if map.len() != src.size || map.iter().any(|&x| x >= tgt.size) {
                    return Err(SpecError::Malformed(format!("{} at ({},{}) has the wrong shape", name, p, q)));
                }
                if map[src.base] != tgt.base {
                    return Err(SpecError::Malformed(format!("{} at ({},{}) does not preserve basepoints", name, p, q)));
                }
            }
        }
        Ok(c)
    }

    fn ends(&self, name: &str, p: i64, q: i64) -> Result<(FiniteNode, FiniteNode), SpecError> {
        Ok(match name {
            "i" => (self.d(p, q)?, self.d(p + 1, q - 1)?),
            "j" => (self.d(p, q)?, self.e(p, q)?),
            _ => (self.e(p, q)?, self.d(p - 1, q)?),
        })
    }

    pub fn d(&self, p: i64, q: i64) -> Result<FiniteNode, SpecError> {
        self.window.check(p, q)?;
        Ok(if p < 0 { FiniteNode::zero() } else { self.d.get(&(p, q)).cloned().unwrap_or_else(FiniteNode::zero) })
    }

    pub fn e(&self, p: i64, q: i64) -> Result<FiniteNode, SpecError> {
        self.window.check(p, q)?;
        Ok(if p < 0 { FiniteNode::zero() } else { self.e.get(&(p, q)).cloned().unwrap_or_else(FiniteNode::zero) })
    }

    fn map(&self, name: &str, p: i64, q: i64) -> Result<Vec<usize>, SpecError> {
        let (src, tgt) = self.ends(name, p, q)?;
        let stored = match name {
            "i" => self.i.get(&(p, q)),
            "j" => self.j.get(&(p, q)),
            _ => self.k.get(&(p, q)),
        };
        Ok(stored.cloned().unwrap_or_else(|| vec![tgt.base; src.size]))
    }

    pub fn i_power(&self, p: i64, q: i64, s: usize) -> Result<Vec<usize>, SpecError> {
        let mut m: Vec<usize> = (0..self.d(p, q)?.size).collect();
        for t in 0..s as i64 {
            let step = self.map("i", p + t, q - t)?;
            m = m.into_iter().map(|x| step[x]).collect();
        }
        Ok(m)
    }

    pub fn e_support(&self) -> Vec<Coord> {
        self.e.iter().filter(|(_, n)| !n.is_zero()).map(|(&c, _)| c).collect()
    }

    pub fn max_page(&self, p: i64, q: i64) -> usize {
        let w = &self.window;
        (w.q_max - q + 1).min(w.p_max - p + 1).min(q - w.q_min + 1).max(0) as usize
    }

    /// Which structure each node must carry at its bidegree, checked along
    /// with homomorphism and pointed exactness conditions.
    pub fn validate(&self) -> Result<CheckReport, SpecError> {
        let mut report = CheckReport::default();
        for (&(p, q), node) in &self.d {
            let (monoid, group, abelian) = (q == 0 && p >= 1, q >= 1, (q == 0 && p >= 2) || (q >= 1 && p + q >= 2));
            check_kind(&mut report, "D", (p, q), node, monoid, group, abelian);
        }
        for (&(p, q), node) in &self.e {
            report.record(q >= 0 || node.is_zero(), "E vanishes below q = 0", None, (p, q), String::new);
            let (monoid, group, abelian) = (q == 0 && p >= 2, q >= 1, (q == 0 && p >= 3) || (q >= 1 && p + q >= 2));
            check_kind(&mut report, "E", (p, q), node, monoid, group, abelian);
        }
        for name in ["i", "j", "k"] {
            let keys: Vec<Coord> = match name {
                "i" => self.i.keys().copied().collect(),
                "j" => self.j.keys().copied().collect(),
                _ => self.k.keys().copied().collect(),
            };
            for (p, q) in keys {
                let (src, tgt) = self.ends(name, p, q)?;
                if src.is_monoid() && tgt.is_monoid() {
                    let f = self.map(name, p, q)?;
                    let ok = (0..src.size).all(|a| (0..src.size).all(|b| f[src.mul(a, b)] == tgt.mul(f[a], f[b])));
                    report.record(ok, &format!("{} is a homomorphism", name), None, (p, q), String::new);
                }
            }
        }
        let w = self.window;
        for p in 0..=w.p_max {
            for q in w.q_min..=w.q_max {
                if w.contains(p - 1, q + 1) {
                    let im = image_set(&self.map("i", p - 1, q + 1)?);
                    let ker = fibre_of_base(&self.map("j", p, q)?, self.e(p, q)?.base);
                    report.record(im == ker, "exact at D", None, (p, q), String::new);
                }
                let im = image_set(&self.map("j", p, q)?);
                let ker = fibre_of_base(&self.map("k", p, q)?, self.d(p - 1, q)?.base);
                report.record(im == ker, "exact at E", None, (p, q), String::new);
                if p >= 1 && w.contains(p, q - 1) {
                    let im = image_set(&self.map("k", p, q)?);
                    let ker = fibre_of_base(&self.map("i", p - 1, q)?, self.d(p, q - 1)?.base);
                    report.record(im == ker, "exact at D (via k)", None, (p - 1, q), String::new);
                }
            }
        }
        Ok(report)
    }

    pub fn z_r(&self, r: usize, p: i64, q: i64) -> Result<Vec<usize>, SpecError> {
        if r == 0 {
            return Err(SpecError::BadPage);
        }
        let s = r as i64 - 1;
        let reach: BTreeSet<usize> = image_set(&self.i_power(p - 1 - s, q + s, r - 1)?);
        let k = self.map("k", p, q)?;
        Ok((0..k.len()).filter(|&x| reach.contains(&k[x])).collect())
    }

    pub fn b_r(&self, r: usize, p: i64, q: i64) -> Result<Vec<usize>, SpecError> {
        if r == 0 {
            return Err(SpecError::BadPage);
        }
        let s = r as i64 - 1;
        let base = self.d(p + s, q - s)?.base;
        let ip = self.i_power(p, q, r - 1)?;
        let j = self.map("j", p, q)?;
        Ok(ip.iter().enumerate().filter(|&(_, &y)| y == base).map(|(x, _)| j[x]).collect::<BTreeSet<_>>().into_iter().collect())
    }

    pub fn page_node(&self, r: usize, p: i64, q: i64) -> Result<TableNodePage, SpecError> {
        let z = self.z_r(r, p, q)?;
        let b = self.b_r(r, p, q)?;
        let cosets = if r == 1 {
            Some(z.iter().map(|&x| vec![x]).collect())
        } else if q >= 1 {
            let e = self.e(p, q)?;
            if !e.is_group() {
                return Err(SpecError::Precondition(format!("E at ({},{}) must be a group", p, q)));
            }
            Some(e.left_cosets(&z, &b))
        } else {
            None
        };
        Ok(TableNodePage { p, q, r, z, b, cosets })
    }

    /// `d^r` with every choice of lift examined.
    pub fn differential(&self, r: usize, p: i64, q: i64) -> Result<TableDifferential, SpecError> {
        if q < 0 {
            return Err(SpecError::Precondition(format!("d^r needs q ≥ 0, got ({},{})", p, q)));
        }
        let source = self.page_node(r, p, q)?;
        let target = (p - r as i64, q + r as i64 - 1);
        let tpage = self.page_node(r, target.0, target.1)?;
        let k = self.map("k", p, q)?;
        let lift = self.i_power(target.0, target.1, r - 1)?;
        let j = self.map("j", target.0, target.1)?;
        let mut values = BTreeMap::new();
        for &z in &source.z {
            let candidates: BTreeSet<usize> = (0..lift.len())
                .filter(|&x| lift[x] == k[z])
                .map(|x| tpage.coset_of(j[x]).expect("j of a lift lies in Z^r"))
                .collect();
            match candidates.len() {
                0 => return Err(SpecError::NotInZ { p, q, power: r - 1 }),
                1 => {
                    values.insert(z, *candidates.iter().next().expect("one value"));
                }
                _ => {
                    return Err(SpecError::IllDefined(format!(
                        "d^{} at ({},{}) depends on the lift of element {}",
                        r, p, q, z
                    )))
                }
            }
        }
        if let Some(cosets) = &source.cosets {
            for c in cosets {
                if c.iter().map(|z| values[z]).collect::<BTreeSet<_>>().len() > 1 {
                    return Err(SpecError::IllDefined(format!("d^{} at ({},{}) depends on the coset representative", r, p, q)));
                }
            }
        }
        Ok(TableDifferential { r, source: (p, q), target, values })
    }

    /// `ker d^r = Z^{r+1}`, `im d^r` fills `B^{r+1}`, `d¹ = j∘k`, and the
    /// size of `E^{r+1}` against the homology of page `r` (for `q ≥ 1`).
    pub fn page_checks(&self, r: usize) -> Result<CheckReport, SpecError> {
        let mut report = CheckReport::default();
        for (p, q) in self.e_support() {
            if q < 0 || self.max_page(p, q) <= r || self.max_page(p - r as i64, q + r as i64 - 1) <= r {
                continue;
            }
            let at = (p, q);
            let d = self.differential(r, p, q)?;
            let (pt, qt) = d.target;
            let tpage = self.page_node(r, pt, qt)?;
            let base_coset = tpage.coset_of(self.e(pt, qt)?.base).expect("basepoint lies in Z^r");
            let ker: Vec<usize> = d.values.iter().filter(|&(_, &v)| v == base_coset).map(|(&z, _)| z).collect();
            report.record(ker == self.z_r(r + 1, p, q)?, "ker d^r = Z^{r+1}", Some(r), at, String::new);
            let cosets = tpage.cosets.as_ref().expect("target page has cosets");
            let hit: BTreeSet<usize> = d.values.values().flat_map(|&v| cosets[v].iter().copied()).collect();
            let b_next: BTreeSet<usize> = self.b_r(r + 1, pt, qt)?.into_iter().collect();
            report.record(hit == b_next, "im d^r = B^{r+1}/B^r", Some(r), (pt, qt), String::new);
            if r == 1 {
                let (k, j) = (self.map("k", p, q)?, self.map("j", pt, qt)?);
                let ok = d.values.iter().all(|(&z, &v)| cosets[v] == vec![j[k[z]]]);
                report.record(ok, "d^1 = j ∘ k", Some(r), at, String::new);
            }
            if q >= 1 {
                let spage = self.page_node(r, p, q)?;
                let scosets = spage.cosets.as_ref().expect("q ≥ 1 has cosets");
                let ker_cosets = scosets.iter().filter(|c| ker.contains(&c[0])).count();
                let (ps, qs) = (p + r as i64, q - r as i64 + 1);
                let im_cosets = if qs >= 0 && !self.e(ps, qs)?.is_zero() {
                    self.differential(r, ps, qs)?.values.values().collect::<BTreeSet<_>>().len()
                } else {
                    1
                };
                let next = self.page_node(r + 1, p, q)?;
                let next_count = next.cosets.as_ref().map_or(0, Vec::len);
                let ok = ker_cosets % im_cosets == 0 && ker_cosets / im_cosets == next_count;
                report.record(ok, "E^{r+1} = H(E^r, d^r)", Some(r), at, || {
                    format!("ker {} / im {} vs {}", ker_cosets, im_cosets, next_count)
                });
            }
        }
        Ok(report)
    }

    /// The same couple with every node enumerated; every node must be finite.
    pub fn from_group_couple(gc: &GroupCouple) -> Result<Self, SpecError> {
        let (gd, ge) = gc.parts();
        let tabulate = |g: &PresentedGroup| -> Result<(FiniteNode, Vec<Vec<BigInt>>, BTreeMap<Vec<BigInt>, usize>), SpecError> {
            let elems = g.elements()?;
            let index: BTreeMap<Vec<BigInt>, usize> = elems
                .iter()
                .enumerate()
                .map(|(n, x)| Ok((g.canonical_coordinates(x)?, n)))
                .collect::<Result<_, SpecError>>()?;
            let lookup = |x: &[BigInt]| -> Result<usize, SpecError> { Ok(index[&g.canonical_coordinates(x)?]) };
            let op = elems
                .iter()
                .map(|a| {
                    elems
                        .iter()
                        .map(|b| lookup(&a.iter().zip(b).map(|(u, v)| u + v).collect::<Vec<_>>()))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            let base = lookup(&vec![BigInt::from(0); g.gens])?;
            Ok((FiniteNode::with_op(op, base), elems, index))
        };
        let mut tables: BTreeMap<(bool, Coord), (Vec<Vec<BigInt>>, BTreeMap<Vec<BigInt>, usize>, PresentedGroup)> = BTreeMap::new();
        let (mut d, mut e) = (BTreeMap::new(), BTreeMap::new());
        for (is_d, nodes) in [(true, gd), (false, ge)] {
            for (&c, g) in nodes {
                let (node, elems, index) = tabulate(g)?;
                if is_d { d.insert(c, node) } else { e.insert(c, node) };
                tables.insert((is_d, c), (elems, index, g.clone()));
            }
        }
        let transfer = |m: &crate::zlinalg::IntMatrix, src: (bool, Coord), tgt: (bool, Coord)| -> Result<Option<Vec<usize>>, SpecError> {
            let (Some((elems, _, _)), Some((_, index, tg))) = (tables.get(&src), tables.get(&tgt)) else {
                return Ok(None);
            };
            let map = elems
                .iter()
                .map(|x| Ok(index[&tg.canonical_coordinates(&m.mul_vec(x)?)?]))
                .collect::<Result<Vec<_>, SpecError>>()?;
            Ok(Some(map))
        };
        let (mut i, mut j, mut k) = (BTreeMap::new(), BTreeMap::new(), BTreeMap::new());
        let w = gc.window;
        for p in 0..=w.p_max {
            for q in w.q_min..=w.q_max {
                if w.contains(p + 1, q - 1) {
                    if let Some(m) = transfer(&gc.i(p, q)?, (true, (p, q)), (true, (p + 1, q - 1)))? {
                        i.insert((p, q), m);
                    }
                }
                if let Some(m) = transfer(&gc.j(p, q)?, (true, (p, q)), (false, (p, q)))? {
                    j.insert((p, q), m);
                }
                if let Some(m) = transfer(&gc.k(p, q)?, (false, (p, q)), (true, (p - 1, q)))? {
                    k.insert((p, q), m);
                }
            }
        }
        TableCouple::new(w, d, e, i, j, k)
    }
}

fn check_kind(report: &mut CheckReport, which: &str, at: Coord, node: &FiniteNode, monoid: bool, group: bool, abelian: bool) {
    if node.is_zero() {
        return;
    }
    if monoid {
        report.record(node.is_monoid(), &format!("{} is a monoid", which), None, at, String::new);
    }
    if group {
        report.record(node.is_group(), &format!("{} is a group", which), None, at, String::new);
    }
    if abelian {
        report.record(node.is_abelian(), &format!("{} is abelian", which), None, at, String::new);
    }
}

fn image_set(f: &[usize]) -> BTreeSet<usize> {
    f.iter().copied().collect()
}

fn fibre_of_base(f: &[usize], base: usize) -> BTreeSet<usize> {
    (0..f.len()).filter(|&x| f[x] == base).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `S_3` as permutations of three points, indexed lexicographically.
    pub(crate) fn s3() -> FiniteNode {
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let idx = |p: [usize; 3]| perms.iter().position(|&x| x == p).unwrap();
        let op = perms
            .iter()
            .map(|a| perms.iter().map(|b| idx([a[b[0]], a[b[1]], a[b[2]]])).collect())
            .collect();
        FiniteNode::with_op(op, 0)
    }

    #[test]
    fn cosets_of_a_non_normal_subgroup() {
        let g = s3();
        assert!(g.is_group() && !g.is_abelian());
        let all: Vec<usize> = (0..6).collect();
        let h = vec![0, 1];
        let left = g.left_cosets(&all, &h);
        assert_eq!(left.len(), 3);
        // Right cosets differ from left cosets for a non-normal subgroup.
        let right: BTreeSet<Vec<usize>> = all
            .iter()
            .map(|&z| h.iter().map(|&x| g.mul(x, z)).collect::<BTreeSet<_>>().into_iter().collect())
            .collect();
        assert_ne!(left.into_iter().collect::<BTreeSet<_>>(), right);
    }

    /// `D_{0,1} = S_3 → E_{0,1}` the identity, `i_{0,1}` the sign map onto
    /// `D_{1,0} = ℤ/2 ≅ D_{2,-1}`, and `k_{1,1}: ℤ/3 ≅ A_3 ⊂ S_3`.
    pub(crate) fn s3_couple() -> TableCouple {
        let window = Window { p_max: 3, q_min: -1, q_max: 3 };
        let sign = vec![0, 1, 1, 0, 0, 1];
        let mut d = BTreeMap::new();
        d.insert((0, 1), s3());
        d.insert((1, 0), FiniteNode::cyclic(2));
        d.insert((2, -1), FiniteNode::cyclic(2));
        let mut e = BTreeMap::new();
        e.insert((0, 1), s3());
        e.insert((1, 1), FiniteNode::cyclic(3));
        let mut i = BTreeMap::new();
        i.insert((0, 1), sign);
        i.insert((1, 0), vec![0, 1]);
        let mut j = BTreeMap::new();
        j.insert((0, 1), (0..6).collect());
        let mut k = BTreeMap::new();
        // A_3 = {id, (0 1 2), (0 2 1)} = indices {0, 3, 4}.
        k.insert((1, 1), vec![0, 3, 4]);
        TableCouple::new(window, d, e, i, j, k).unwrap()
    }

    #[test]
    fn s3_couple_pages() {
        let c = s3_couple();
        let v = c.validate().unwrap();
        assert!(v.passed(), "{:?}", v.violations);
        let page2 = c.page_node(2, 0, 1).unwrap();
        assert_eq!(page2.cosets.as_ref().unwrap().len(), 2);
        let d1 = c.differential(1, 1, 1).unwrap();
        assert_eq!(d1.target, (0, 1));
        assert!(c.page_checks(1).unwrap().passed());
        assert!(c.page_checks(2).unwrap().passed());
    }

    #[test]
    fn nonzero_e_over_zero_d_is_flagged() {
        let window = Window { p_max: 2, q_min: 0, q_max: 2 };
        let mut e = BTreeMap::new();
        e.insert((1, 1), FiniteNode::cyclic(2));
        let c = TableCouple::new(window, BTreeMap::new(), e, BTreeMap::new(), BTreeMap::new(), BTreeMap::new()).unwrap();
        assert!(!c.validate().unwrap().passed());
    }
}
