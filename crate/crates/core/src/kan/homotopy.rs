//! Element homotopy, path components and combinatorial homotopy groups.

use serde::Serialize;

use super::{Engine, KanCertificate, KanError, SearchOrder};
use crate::boxcat::Sign;
use crate::cubset::{face_slot, slot_face, Cube, CubicalSet, GenId};

/// Slot assignment in dimension `n+1` for a homotopy from `x` to `y`
/// relative to the boundary: `(1,-) = x`, `(1,+) = y`, and
/// `(i,ε) = σ_1 ∂_{i-1}^ε x` for `i ≥ 2`.
fn homotopy_boundary(engine: &Engine<'_>, x: usize, y: usize, n: usize) -> Vec<u32> {
    let mut assign = vec![0u32; 2 * (n + 1)];
    assign[face_slot(1, Sign::Minus)] = x as u32;
    assign[face_slot(1, Sign::Plus)] = y as u32;
    let xc = &engine.cubes[n][x];
    for i in 2..=n + 1 {
        for s in Sign::BOTH {
            let f = engine.x.face(xc, i - 1, s).expect("in range");
            let c = f.degenerate(1).expect("in range");
            assign[face_slot(i, s)] = engine.index(&c).expect("enumerated") as u32;
        }
    }
    assign
}

fn witness_idx(engine: &Engine<'_>, x: usize, y: usize, n: usize) -> Option<usize> {
    if n >= 1 && engine.faces[n][x] != engine.faces[n][y] {
        return None;
    }
    let a = homotopy_boundary(engine, x, y, n);
    engine.filler(n + 1, None, &a, SearchOrder::Forward)
}

/// An `(n+1)`-cube exhibiting `x ~ y`, if one exists.
pub fn homotopy_witness(x: &CubicalSet, a: &Cube, b: &Cube) -> Result<Option<Cube>, KanError> {
    let n = a.dim();
    if b.dim() != n {
        return Ok(None);
    }
    let engine = Engine::new(x, n + 1)?;
    let (Some(ia), Some(ib)) = (engine.index(a), engine.index(b)) else {
        return Ok(None);
    };
    Ok(witness_idx(&engine, ia, ib, n).map(|h| engine.cubes[n + 1][h].clone()))
}

pub fn homotopic(x: &CubicalSet, a: &Cube, b: &Cube) -> Result<bool, KanError> {
    Ok(homotopy_witness(x, a, b)?.is_some())
}

/// Path components: vertex classes under the relation generated by edges.
/// Classes are listed by their first vertex.
pub fn pi0(x: &CubicalSet) -> Vec<Vec<String>> {
    let count = x.generator_count(0);
    let mut parent: Vec<usize> = (0..count).collect();
    fn find(p: &mut [usize], mut a: usize) -> usize {
        while p[a] != a {
            p[a] = p[p[a]];
            a = p[a];
        }
        a
    }
    if x.trunc_dim() >= 1 {
        for e in x.generators(1) {
            let a = x.generator_face(e, 1, Sign::Minus).gen.idx;
            let b = x.generator_face(e, 1, Sign::Plus).gen.idx;
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut classes: Vec<(usize, Vec<String>)> = Vec::new();
    for v in 0..count {
        let r = find(&mut parent, v);
        let name = x.name(GenId { dim: 0, idx: v }).to_string();
        match classes.iter_mut().find(|(root, _)| *root == r) {
            Some((_, c)) => c.push(name),
            None => classes.push((r, vec![name])),
        }
    }
    classes.into_iter().map(|(_, c)| c).collect()
}

/// `n`-cubes all of whose faces are the degenerate basepoint.
pub fn loops(x: &CubicalSet, basepoint: GenId, n: usize) -> Result<Vec<Cube>, KanError> {
    if basepoint.dim != 0 {
        return Err(KanError::BadBasepoint(format!("{:?}", basepoint)));
    }
    let cubes = x.cubes(n)?;
    if n == 0 {
        return Ok(vec![Cube::generator(basepoint)]);
    }
    let point = x.degenerate_vertex(basepoint, n - 1);
    let mut out = Vec::new();
    for c in cubes {
        let mut ok = true;
        for slot in 0..2 * n {
            let (i, s) = slot_face(slot);
            if x.face(&c, i, s)? != point {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(c);
        }
    }
    Ok(out)
}

/// A homotopy group computed from loops and horn fillers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PiGroup {
    pub n: usize,
    pub basepoint: String,
    pub order: usize,
    /// Loops in each class; class `k` is listed by its first loop.
    pub classes: Vec<Vec<String>>,
    pub identity: usize,
    /// `table[a][b]` is the class of the product `a · b`.
    pub table: Vec<Vec<usize>>,
    pub inverses: Vec<usize>,
    /// Number of (representative pair, filler) combinations checked.
    pub products_checked: usize,
}

/// Checks closure, associativity, a two-sided identity and inverses.
/// Returns the identity and the inverse of each element.
pub fn verify_group_table(table: &[Vec<usize>]) -> Result<(usize, Vec<usize>), String> {
    let m = table.len();
    if m == 0 {
        return Err("empty table".into());
    }
    for (a, row) in table.iter().enumerate() {
        if row.len() != m {
            return Err(format!("row {} has length {}", a, row.len()));
        }
        if let Some(&v) = row.iter().find(|&&v| v >= m) {
            return Err(format!("entry {} out of range", v));
        }
    }
    let e = (0..m)
        .find(|&e| (0..m).all(|g| table[e][g] == g && table[g][e] == g))
        .ok_or("no identity element")?;
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(format!("associativity fails at ({}, {}, {})", a, b, c));
                }
            }
        }
    }
    let inverses = (0..m)
        .map(|a| {
            (0..m)
                .find(|&b| table[a][b] == e && table[b][a] == e)
                .ok_or_else(|| format!("element {} has no inverse", a))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((e, inverses))
}

/// Whether two group tables are isomorphic, by search over bijections.
pub fn tables_isomorphic(a: &[Vec<usize>], b: &[Vec<usize>]) -> bool {
    let m = a.len();
    if b.len() != m {
        return false;
    }
    let mut map = vec![usize::MAX; m];
    let mut used = vec![false; m];
    fn rec(k: usize, a: &[Vec<usize>], b: &[Vec<usize>], map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let m = a.len();
        if k == m {
            return (0..m).all(|x| (0..m).all(|y| map[a[x][y]] == b[map[x]][map[y]]));
        }
        for t in 0..m {
            if used[t] {
                continue;
            }
            map[k] = t;
            used[t] = true;
            // Prune on products among already-mapped elements.
            let consistent = (0..=k).all(|x| {
                (0..=k).all(|y| {
                    let p = a[x][y];
                    p > k || map[p] == b[map[x]][map[y]]
                })
            });
            if consistent && rec(k + 1, a, b, map, used) {
                return true;
            }
            used[t] = false;
        }
        map[k] = usize::MAX;
        false
    }
    rec(0, a, b, &mut map, &mut used)
}

/// `π_n(X, k0)`. Requires verified horn filling up to `n + 1`.
///
/// The product of classes `[a]` and `[b]` is the `(1,+)` face of a filler
/// of the `(n+1)`-horn open at `(1,+)` with `a` at `(1,-)`, `b` at `(2,+)`
/// and the degenerate basepoint elsewhere. Every representative pair and
/// every filler is checked to give the same class.
pub fn pi_n(
    x: &CubicalSet,
    certificate: &KanCertificate,
    basepoint: GenId,
    n: usize,
    order: SearchOrder,
) -> Result<PiGroup, KanError> {
    if n == 0 {
        return Err(KanError::GroupAxiom("π_0 is not a group here; use pi0".into()));
    }
    if certificate.bound < n + 1 {
        return Err(KanError::MissingCertificate { needed: n + 1, have: Some(certificate.bound) });
    }
    let engine = Engine::new(x, n + 1)?;
    let loop_cubes = loops(x, basepoint, n)?;
    let loop_idx: Vec<usize> = loop_cubes.iter().map(|c| engine.index(c).expect("enumerated")).collect();
    let l = loop_idx.len();
    let rel: Vec<Vec<bool>> = (0..l)
        .map(|a| (0..l).map(|b| witness_idx(&engine, loop_idx[a], loop_idx[b], n).is_some()).collect())
        .collect();
    for a in 0..l {
        if !rel[a][a] {
            return Err(KanError::GroupAxiom(format!("homotopy is not reflexive at {}", x.display_cube(&loop_cubes[a]))));
        }
        for b in 0..l {
            if rel[a][b] != rel[b][a] {
                return Err(KanError::GroupAxiom("homotopy is not symmetric".into()));
            }
            if rel[a][b] {
                for c in 0..l {
                    if rel[b][c] && !rel[a][c] {
                        return Err(KanError::GroupAxiom("homotopy is not transitive".into()));
                    }
                }
            }
        }
    }
    let mut class_of = vec![usize::MAX; l];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for a in 0..l {
        if class_of[a] != usize::MAX {
            continue;
        }
        let k = members.len();
        let mem: Vec<usize> = (0..l).filter(|&b| rel[a][b]).collect();
        for &b in &mem {
            class_of[b] = k;
        }
        members.push(mem);
    }
    let class_of_cube = |c: usize| -> Option<usize> { loop_idx.iter().position(|&li| li == c).map(|p| class_of[p]) };
    let point = engine.index(&x.degenerate_vertex(basepoint, n)).expect("enumerated");
    let m = members.len();
    let open = face_slot(1, Sign::Plus);
    let mut table = vec![vec![usize::MAX; m]; m];
    let mut checked = 0;
    for ca in 0..m {
        for cb in 0..m {
            for &ra in &members[ca] {
                for &rb in &members[cb] {
                    let mut assign = vec![point as u32; 2 * (n + 1)];
                    assign[face_slot(1, Sign::Minus)] = loop_idx[ra] as u32;
                    assign[face_slot(2, Sign::Plus)] = loop_idx[rb] as u32;
                    assign[open] = u32::MAX;
                    let mut fillers = engine.all_fillers(n + 1, Some(open), &assign);
                    if order == SearchOrder::Reverse {
                        fillers.reverse();
                    }
                    if fillers.is_empty() {
                        return Err(KanError::GroupAxiom(format!(
                            "product horn for ({}, {}) has no filler",
                            x.display_cube(&loop_cubes[ra]),
                            x.display_cube(&loop_cubes[rb])
                        )));
                    }
                    for h in fillers {
                        checked += 1;
                        let face = engine.faces[n + 1][h][open] as usize;
                        let c = class_of_cube(face)
                            .ok_or_else(|| KanError::GroupAxiom("product face is not a loop".into()))?;
                        if table[ca][cb] == usize::MAX {
                            table[ca][cb] = c;
                        } else if table[ca][cb] != c {
                            return Err(KanError::GroupAxiom(format!(
                                "product of classes {} and {} depends on choices",
                                ca, cb
                            )));
                        }
                    }
                }
            }
        }
    }
    let (identity, inverses) = verify_group_table(&table).map_err(KanError::GroupAxiom)?;
    let expected_identity = class_of_cube(point).expect("the constant loop is a loop");
    if identity != expected_identity {
        return Err(KanError::GroupAxiom("the constant loop is not the identity".into()));
    }
    Ok(PiGroup {
        n,
        basepoint: x.name(basepoint).to_string(),
        order: m,
        classes: members
            .iter()
            .map(|mem| mem.iter().map(|&a| x.display_cube(&loop_cubes[a])).collect())
            .collect(),
        identity,
        table,
        inverses,
        products_checked: checked,
    })
}
