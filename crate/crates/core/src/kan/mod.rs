//! Horn filling: Kan, contractibility and fibration verdicts, element
//! homotopy, combinatorial homotopy groups, homotopy fibres, and a
//! classifying-space builder.

mod classifying;
mod fibre;
mod homotopy;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::boxcat::Sign;
use crate::cubset::{face_slot, slot_face, Cube, CubeError, CubicalMap, CubicalSet};

pub use classifying::build_bg;
pub use fibre::{homotopy_fiber, mapping_path_set};
pub use homotopy::{
    homotopic, homotopy_witness, loops, pi0, pi_n, tables_isomorphic, verify_group_table, PiGroup,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KanError {
    #[error("dimension {requested} exceeds the truncation bound {bound}")]
    BeyondBound { requested: usize, bound: usize },
    #[error("incompatible assignment: faces ({j},{omega}) and ({k},{eta}) disagree")]
    Incompatible { j: usize, omega: char, k: usize, eta: char },
    #[error("a Kan certificate up to dimension {needed} is required (have {have:?})")]
    MissingCertificate { needed: usize, have: Option<usize> },
    #[error("group axiom violated: {0}")]
    GroupAxiom(String),
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("basepoint `{0}` is not a vertex")]
    BadBasepoint(String),
    #[error(transparent)]
    Cube(#[from] CubeError),
}

/// Order in which candidate fillers are tried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchOrder {
    #[default]
    Forward,
    Reverse,
}

/// An assignment of `(n-1)`-cubes to all faces of `I^n` except `open`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct HornInstance {
    pub n: usize,
    pub open: (usize, Sign),
    /// Indexed by face slot; `None` exactly at the open face.
    pub faces: Vec<Option<Cube>>,
}

/// An assignment to every face of `I^n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SphereInstance {
    pub n: usize,
    pub faces: Vec<Cube>,
}

/// Printable form of a horn or sphere: `(i,±) = cube` per assigned face.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssignmentReport {
    pub n: usize,
    pub open: Option<String>,
    pub faces: Vec<(String, String)>,
}

fn slot_label(slot: usize) -> String {
    let (i, s) = slot_face(slot);
    format!("({},{})", i, s.symbol())
}

impl HornInstance {
    pub fn report(&self, x: &CubicalSet) -> AssignmentReport {
        AssignmentReport {
            n: self.n,
            open: Some(format!("({},{})", self.open.0, self.open.1.symbol())),
            faces: self
                .faces
                .iter()
                .enumerate()
                .filter_map(|(s, c)| c.as_ref().map(|c| (slot_label(s), x.display_cube(c))))
                .collect(),
        }
    }
}

impl SphereInstance {
    pub fn report(&self, x: &CubicalSet) -> AssignmentReport {
        AssignmentReport {
            n: self.n,
            open: None,
            faces: self.faces.iter().enumerate().map(|(s, c)| (slot_label(s), x.display_cube(c))).collect(),
        }
    }
}

/// Checks `∂_j^ω x_{(k,η)} = ∂_{k-1}^η x_{(j,ω)}` for all assigned pairs `j < k`.
pub fn check_compatible(x: &CubicalSet, n: usize, faces: &[Option<Cube>]) -> Result<(), KanError> {
    for a in 0..faces.len() {
        for b in 0..faces.len() {
            let ((j, omega), (k, eta)) = (slot_face(a), slot_face(b));
            if j >= k {
                continue;
            }
            if let (Some(xa), Some(xb)) = (&faces[a], &faces[b]) {
                if xa.dim() + 1 != n || xb.dim() + 1 != n {
                    return Err(KanError::Cube(CubeError::DimensionMismatch {
                        expected: n - 1,
                        found: if xa.dim() + 1 != n { xa.dim() } else { xb.dim() },
                    }));
                }
                if x.face(xb, j, omega)? != x.face(xa, k - 1, eta)? {
                    return Err(KanError::Incompatible { j, omega: omega.symbol(), k, eta: eta.symbol() });
                }
            }
        }
    }
    Ok(())
}

/// Cubes per dimension with face tables as indices, for fast search.
pub(crate) struct Engine<'a> {
    pub x: &'a CubicalSet,
    pub cubes: Vec<Vec<Cube>>,
    /// `faces[n][c][slot]` is the index in `cubes[n-1]` of the face.
    pub faces: Vec<Vec<Vec<u32>>>,
}

impl<'a> Engine<'a> {
    pub fn new(x: &'a CubicalSet, top: usize) -> Result<Self, KanError> {
        if top > x.bound() {
            return Err(KanError::BeyondBound { requested: top, bound: x.trunc_dim() });
        }
        let mut cubes = Vec::with_capacity(top + 1);
        let mut faces: Vec<Vec<Vec<u32>>> = Vec::with_capacity(top + 1);
        for n in 0..=top {
            let cs = x.cubes(n)?;
            let table = if n == 0 {
                vec![Vec::new(); cs.len()]
            } else {
                let lower: &Vec<Cube> = &cubes[n - 1];
                cs.par_iter()
                    .map(|c| {
                        (0..2 * n)
                            .map(|slot| {
                                let (i, s) = slot_face(slot);
                                let f = x.face(c, i, s).expect("index in range");
                                lower.binary_search(&f).expect("faces are enumerated") as u32
                            })
                            .collect()
                    })
                    .collect()
            };
            cubes.push(cs);
            faces.push(table);
        }
        Ok(Engine { x, cubes, faces })
    }

    pub fn index(&self, c: &Cube) -> Option<usize> {
        self.cubes.get(c.dim())?.binary_search(c).ok()
    }

    /// All compatible assignments to the slots of `I^n` other than `open`,
    /// in lexicographic order of cube indices.
    pub fn boundaries(&self, n: usize, open: Option<usize>) -> Vec<Vec<u32>> {
        let slots: Vec<usize> = (0..2 * n).filter(|&s| Some(s) != open).collect();
        // For each position, the earlier positions it must be checked against.
        let checks: Vec<Vec<(usize, usize, usize)>> = slots
            .iter()
            .enumerate()
            .map(|(p, &b)| {
                slots[..p]
                    .iter()
                    .filter_map(|&a| {
                        // Slots are ordered, so `ja <= jb`.
                        let ((ja, oa), (jb, ob)) = (slot_face(a), slot_face(b));
                        (ja < jb).then(|| (a, face_slot(ja, oa), face_slot(jb - 1, ob)))
                    })
                    .collect()
            })
            .collect();
        let count = self.cubes[n - 1].len() as u32;
        let lower = if n >= 2 { &self.faces[n - 1] } else { &self.faces[0] };
        let mut out = Vec::new();
        let mut assign = vec![u32::MAX; 2 * n];
        fn rec(
            p: usize,
            slots: &[usize],
            checks: &[Vec<(usize, usize, usize)>],
            count: u32,
            lower: &[Vec<u32>],
            n: usize,
            assign: &mut Vec<u32>,
            out: &mut Vec<Vec<u32>>,
        ) {
            if p == slots.len() {
                out.push(assign.clone());
                return;
            }
            let b = slots[p];
            'cand: for c in 0..count {
                if n >= 2 {
                    for &(a, on_b, on_a) in &checks[p] {
                        if lower[c as usize][on_b] != lower[assign[a] as usize][on_a] {
                            continue 'cand;
                        }
                    }
                }
                assign[b] = c;
                rec(p + 1, slots, checks, count, lower, n, assign, out);
            }
            assign[b] = u32::MAX;
        }
        rec(0, &slots, &checks, count, lower, n, &mut assign, &mut out);
        out
    }

    /// First `n`-cube (in the given order) whose faces match `assign` off `open`.
    pub fn filler(&self, n: usize, open: Option<usize>, assign: &[u32], order: SearchOrder) -> Option<usize> {
        let matches = |c: &usize| {
            self.faces[n][*c]
                .iter()
                .enumerate()
                .all(|(s, &f)| Some(s) == open || f == assign[s])
        };
        let len = self.cubes[n].len();
        match order {
            SearchOrder::Forward => (0..len).find(matches),
            SearchOrder::Reverse => (0..len).rev().find(matches),
        }
    }

    /// Every matching `n`-cube.
    pub fn all_fillers(&self, n: usize, open: Option<usize>, assign: &[u32]) -> Vec<usize> {
        (0..self.cubes[n].len())
            .filter(|&c| {
                self.faces[n][c]
                    .iter()
                    .enumerate()
                    .all(|(s, &f)| Some(s) == open || f == assign[s])
            })
            .collect()
    }

    pub fn horn_instance(&self, n: usize, open: usize, assign: &[u32]) -> HornInstance {
        HornInstance {
            n,
            open: slot_face(open),
            faces: (0..2 * n)
                .map(|s| (s != open).then(|| self.cubes[n - 1][assign[s] as usize].clone()))
                .collect(),
        }
    }

    pub fn assignment_of(&self, n: usize, faces: &[Option<Cube>]) -> Option<Vec<u32>> {
        (0..2 * n)
            .map(|s| match &faces[s] {
                Some(c) => self.index(c).map(|i| i as u32),
                None => Some(u32::MAX),
            })
            .collect()
    }
}

/// Outcome of a Kan, contractibility, or fibration check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    /// Dimensions checked: `1..=bound`.
    pub bound: usize,
    pub instances_checked: usize,
    pub counterexample: Option<AssignmentReport>,
    /// For fibrations: the base cube that could not be lifted.
    pub base_cube: Option<String>,
}

/// Verified horn-filling up to a dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KanCertificate {
    pub bound: usize,
    pub instances_checked: usize,
}

/// First `n`-cube filling the horn, in canonical order.
pub fn find_filler(x: &CubicalSet, horn: &HornInstance) -> Result<Option<Cube>, KanError> {
    find_filler_ordered(x, horn, SearchOrder::Forward)
}

pub fn find_filler_ordered(x: &CubicalSet, horn: &HornInstance, order: SearchOrder) -> Result<Option<Cube>, KanError> {
    let n = horn.n;
    check_compatible(x, n, &horn.faces)?;
    let engine = Engine::new(x, n)?;
    let open = face_slot(horn.open.0, horn.open.1);
    let Some(assign) = engine.assignment_of(n, &horn.faces) else {
        return Ok(None);
    };
    Ok(engine.filler(n, Some(open), &assign, order).map(|c| engine.cubes[n][c].clone()))
}

/// First `n`-cube with the given boundary.
pub fn find_sphere_filler(x: &CubicalSet, sphere: &SphereInstance) -> Result<Option<Cube>, KanError> {
    let n = sphere.n;
    let faces: Vec<Option<Cube>> = sphere.faces.iter().cloned().map(Some).collect();
    check_compatible(x, n, &faces)?;
    let engine = Engine::new(x, n)?;
    let Some(assign) = engine.assignment_of(n, &faces) else {
        return Ok(None);
    };
    Ok(engine.filler(n, None, &assign, SearchOrder::Forward).map(|c| engine.cubes[n][c].clone()))
}

fn check_fillers(engine: &Engine<'_>, up_to: usize, spheres: bool) -> Verdict {
    let mut checked = 0;
    for n in 1..=up_to {
        let opens: Vec<Option<usize>> = if spheres { vec![None] } else { (0..2 * n).map(Some).collect() };
        for open in opens {
            let instances = engine.boundaries(n, open);
            checked += instances.len();
            let failure = instances
                .par_iter()
                .position_first(|a| engine.filler(n, open, a, SearchOrder::Forward).is_none());
            if let Some(p) = failure {
                let a = &instances[p];
                let report = match open {
                    Some(o) => engine.horn_instance(n, o, a).report(engine.x),
                    None => SphereInstance {
                        n,
                        faces: (0..2 * n).map(|s| engine.cubes[n - 1][a[s] as usize].clone()).collect(),
                    }
                    .report(engine.x),
                };
                return Verdict {
                    holds: false,
                    bound: up_to,
                    instances_checked: checked,
                    counterexample: Some(report),
                    base_cube: None,
                };
            }
        }
    }
    Verdict { holds: true, bound: up_to, instances_checked: checked, counterexample: None, base_cube: None }
}

/// Every horn of dimension `1..=up_to` has a filler.
pub fn is_kan(x: &CubicalSet, up_to: usize) -> Result<Verdict, KanError> {
    let engine = Engine::new(x, up_to)?;
    Ok(check_fillers(&engine, up_to, false))
}

/// Like [`is_kan`], returning a certificate on success.
pub fn certify_kan(x: &CubicalSet, up_to: usize) -> Result<Result<KanCertificate, Verdict>, KanError> {
    let v = is_kan(x, up_to)?;
    Ok(if v.holds {
        Ok(KanCertificate { bound: up_to, instances_checked: v.instances_checked })
    } else {
        Err(v)
    })
}

/// `X` is nonempty and every sphere of dimension `1..=up_to` has a filler.
pub fn is_contractible(x: &CubicalSet, up_to: usize) -> Result<Verdict, KanError> {
    let engine = Engine::new(x, up_to)?;
    if engine.cubes[0].is_empty() {
        return Ok(Verdict {
            holds: false,
            bound: up_to,
            instances_checked: 1,
            counterexample: Some(AssignmentReport { n: 0, open: None, faces: vec![] }),
            base_cube: None,
        });
    }
    let mut v = check_fillers(&engine, up_to, true);
    v.instances_checked += 1;
    Ok(v)
}

/// Every horn in the source lifts against every compatible base cube.
pub fn is_kan_fibration(f: &CubicalMap, up_to: usize) -> Result<Verdict, KanError> {
    let e = Engine::new(&f.source, up_to)?;
    let b = Engine::new(&f.target, up_to)?;
    let mapped: Vec<Vec<u32>> = (0..=up_to)
        .map(|n| {
            e.cubes[n]
                .iter()
                .map(|c| b.index(&f.apply(c)).expect("image is enumerated") as u32)
                .collect()
        })
        .collect();
    let mut checked = 0;
    for n in 1..=up_to {
        for open in 0..2 * n {
            let horns = e.boundaries(n, Some(open));
            let lower = &mapped[n - 1];
            let failure = horns
                .par_iter()
                .map(|a| {
                    let image: Vec<u32> =
                        a.iter().map(|&c| if c == u32::MAX { u32::MAX } else { lower[c as usize] }).collect();
                    let mut count = 0usize;
                    for base in 0..b.cubes[n].len() {
                        let fits = b.faces[n][base]
                            .iter()
                            .enumerate()
                            .all(|(s, &fc)| s == open || fc == image[s]);
                        if !fits {
                            continue;
                        }
                        count += 1;
                        let lifted = (0..e.cubes[n].len()).any(|c| {
                            mapped[n][c] as usize == base
                                && e.faces[n][c].iter().enumerate().all(|(s, &fc)| s == open || fc == a[s])
                        });
                        if !lifted {
                            return (count, Some(base));
                        }
                    }
                    (count, None)
                })
                .collect::<Vec<_>>();
            for (p, (count, fail)) in failure.into_iter().enumerate() {
                checked += count;
                if let Some(base) = fail {
                    return Ok(Verdict {
                        holds: false,
                        bound: up_to,
                        instances_checked: checked,
                        counterexample: Some(e.horn_instance(n, open, &horns[p]).report(&f.source)),
                        base_cube: Some(f.target.display_cube(&b.cubes[n][base])),
                    });
                }
            }
        }
    }
    Ok(Verdict { holds: true, bound: up_to, instances_checked: checked, counterexample: None, base_cube: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubset::text::parse_single;

    pub(crate) const TWO_POINTS: &str = "dim 0: a b\n";
    pub(crate) const CIRCLE: &str = "dim 0: v\ndim 1: e\nface e 1 - = v\nface e 1 + = v\n";

    #[test]
    fn one_horn_in_two_points() {
        let x = parse_single(TWO_POINTS).unwrap();
        let a = x.find("a").unwrap();
        let horn = HornInstance { n: 1, open: (1, Sign::Plus), faces: vec![Some(Cube::generator(a)), None] };
        let f = find_filler(&x, &horn).unwrap().unwrap();
        assert_eq!(x.display_cube(&f), "a[s 1]");
    }

    #[test]
    fn circle_is_not_kan() {
        let x = parse_single(CIRCLE).unwrap();
        let v = is_kan(&x, 2).unwrap();
        assert!(!v.holds);
        assert_eq!(v.counterexample.unwrap().n, 2);
        assert!(is_kan(&x, 1).unwrap().holds);
    }

    #[test]
    fn incompatible_horn_is_rejected() {
        let x = parse_single(CIRCLE).unwrap();
        let v = Cube::generator(x.find("v").unwrap());
        let e = Cube::generator(x.find("e").unwrap());
        let sv = v.degenerate(1).unwrap();
        // Slots (1,-),(1,+),(2,-) open (2,+): (1,-)=e, (2,-)=e forces ∂_1^- e = ∂_1^- e; consistent.
        let ok = HornInstance { n: 2, open: (2, Sign::Plus), faces: vec![Some(e.clone()), Some(sv.clone()), Some(e.clone()), None] };
        assert!(check_compatible(&x, 2, &ok.faces).is_ok());
        let y = parse_single("dim 0: a b\ndim 1: e\nface e 1 - = a\nface e 1 + = b\n").unwrap();
        let a = Cube::generator(y.find("a").unwrap()).degenerate(1).unwrap();
        let ee = Cube::generator(y.find("e").unwrap());
        let bad = vec![Some(ee), None, None, Some(a)];
        assert!(matches!(check_compatible(&y, 2, &bad), Err(KanError::Incompatible { .. })));
    }

    #[test]
    fn two_points_kan_to_three() {
        let x = parse_single(TWO_POINTS).unwrap();
        assert!(is_kan(&x, 3).unwrap().holds);
        assert!(!is_contractible(&x, 1).unwrap().holds);
    }
}

#[cfg(test)]
mod group_tests {
    use super::*;

    #[test]
    fn fundamental_group_of_bz2() {
        let z2 = vec![vec![0, 1], vec![1, 0]];
        let b = build_bg(&z2, 3).unwrap();
        let cert = certify_kan(&b, 2).unwrap().unwrap();
        let v = b.generators(0).next().unwrap();
        let fwd = pi_n(&b, &cert, v, 1, SearchOrder::Forward).unwrap();
        let rev = pi_n(&b, &cert, v, 1, SearchOrder::Reverse).unwrap();
        assert_eq!(fwd.order, 2);
        assert!(tables_isomorphic(&fwd.table, &z2));
        assert_eq!(fwd.table, rev.table);
    }
}
