//! Finite, dimension-truncated cubical sets presented by nondegenerate
//! generators and face tables.
//!
//! A cube is a generator together with the set of coordinates in which it is
//! degenerate. This set is the normal form of the degeneracy word: the cube
//! `σ_{b_1} ∘ … ∘ σ_{b_m} g` with `b_1 ≤ … ≤ b_m` has degenerate coordinates
//! `b_j + (j - 1)`.

mod constructions;
pub mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boxcat::{combinations, Sign};

pub use constructions::{
    boundary_sphere, disjoint_union, horn, reduced_product, standard_cube, standard_cube_vector,
    PresentationModel,
};
pub use constructions::build_presentation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GenId {
    pub dim: usize,
    pub idx: usize,
}

/// A cube in normal form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cube {
    pub gen: GenId,
    /// Strictly increasing degenerate coordinates in `1..=dim`.
    pub degen: Vec<usize>,
}

impl Cube {
    pub fn generator(gen: GenId) -> Self {
        Cube { gen, degen: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.gen.dim + self.degen.len()
    }

    pub fn is_degenerate(&self) -> bool {
        !self.degen.is_empty()
    }

    /// The non-decreasing degeneracy word `b_1 ≤ … ≤ b_m`.
    pub fn word(&self) -> Vec<usize> {
        self.degen.iter().enumerate().map(|(j, s)| s - j).collect()
    }

    /// `σ_b` applied to this cube.
    pub fn degenerate(&self, b: usize) -> Result<Cube, CubeError> {
        let n = self.dim();
        if b == 0 || b > n + 1 {
            return Err(CubeError::IndexOutOfRange { index: b, dim: n + 1 });
        }
        let mut degen: Vec<usize> = self
            .degen
            .iter()
            .map(|&s| if s >= b { s + 1 } else { s })
            .collect();
        degen.push(b);
        degen.sort_unstable();
        Ok(Cube { gen: self.gen, degen })
    }

    /// `σ_{i_1} ∘ σ_{i_2} ∘ … ∘ σ_{i_m}` applied to this cube, rightmost first.
    pub fn degenerate_word(&self, word: &[usize]) -> Result<Cube, CubeError> {
        let mut c = self.clone();
        for &b in word.iter().rev() {
            c = c.degenerate(b)?;
        }
        Ok(c)
    }

    /// Adds degenerate coordinates: `set` lists positions in the result.
    pub fn degenerate_set(&self, set: &[usize]) -> Result<Cube, CubeError> {
        let mut c = self.clone();
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        // Inserting in increasing order keeps earlier positions fixed.
        for b in sorted {
            c = c.degenerate(b)?;
        }
        Ok(c)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CubeError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("generator `{name}` is missing face ({index},{sign})")]
    MissingFace { name: String, index: usize, sign: char },
    #[error("face ({index},{sign}) of `{name}` has dimension {found}, expected {expected}")]
    FaceDimension { name: String, index: usize, sign: char, expected: usize, found: usize },
    #[error("index {index} out of range for a cube of dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("dimension {dim} exceeds the truncation bound {bound}")]
    BeyondTruncation { dim: usize, bound: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subset is not closed under faces: `{0}` has a face outside it")]
    NotClosed(String),
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
}

/// One failed instance of `∂_i^ε ∂_j^ω = ∂_{j-1}^ω ∂_i^ε` (`i < j`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct IdentityViolation {
    pub generator: String,
    pub i: usize,
    pub eps: Sign,
    pub j: usize,
    pub omega: Sign,
    pub lhs: String,
    pub rhs: String,
}

/// Index of the face `(i, ε)` in a face table row.
pub fn face_slot(i: usize, sign: Sign) -> usize {
    2 * (i - 1) + usize::from(sign == Sign::Plus)
}

/// Inverse of [`face_slot`].
pub fn slot_face(slot: usize) -> (usize, Sign) {
    (slot / 2 + 1, if slot % 2 == 1 { Sign::Plus } else { Sign::Minus })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicalSet {
    trunc_dim: usize,
    finite: bool,
    names: Vec<Vec<String>>,
    faces: Vec<Vec<Vec<Cube>>>,
    lookup: BTreeMap<String, GenId>,
}

/// Incremental construction of a [`CubicalSet`].
#[derive(Debug, Default, Clone)]
pub struct CubicalSetBuilder {
    names: Vec<Vec<String>>,
    faces: Vec<Vec<Vec<Option<Cube>>>>,
    lookup: BTreeMap<String, GenId>,
}

impl CubicalSetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_generator(&mut self, dim: usize, name: &str) -> Result<GenId, CubeError> {
        if self.lookup.contains_key(name) {
            return Err(CubeError::DuplicateGenerator(name.to_string()));
        }
        while self.names.len() <= dim {
            self.names.push(Vec::new());
            self.faces.push(Vec::new());
        }
        let id = GenId { dim, idx: self.names[dim].len() };
        self.names[dim].push(name.to_string());
        self.faces[dim].push(vec![None; 2 * dim]);
        self.lookup.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn find(&self, name: &str) -> Option<GenId> {
        self.lookup.get(name).copied()
    }

    pub fn name(&self, g: GenId) -> &str {
        &self.names[g.dim][g.idx]
    }

    pub fn set_face(&mut self, g: GenId, i: usize, sign: Sign, face: Cube) -> Result<(), CubeError> {
        if i == 0 || i > g.dim {
            return Err(CubeError::IndexOutOfRange { index: i, dim: g.dim });
        }
        if face.dim() + 1 != g.dim {
            return Err(CubeError::FaceDimension {
                name: self.name(g).to_string(),
                index: i,
                sign: sign.symbol(),
                expected: g.dim - 1,
                found: face.dim(),
            });
        }
        self.faces[g.dim][g.idx][face_slot(i, sign)] = Some(face);
        Ok(())
    }

    /// Finishes the presentation. `trunc_dim` defaults to the top generator
    /// dimension; `finite` records that no generators exist above the listed ones.
    pub fn build(self, trunc_dim: Option<usize>, finite: bool) -> Result<CubicalSet, CubeError> {
        let top = self.names.iter().rposition(|v| !v.is_empty()).unwrap_or(0);
        let trunc_dim = trunc_dim.unwrap_or(top);
        if top > trunc_dim {
            return Err(CubeError::BeyondTruncation { dim: top, bound: trunc_dim });
        }
        let mut faces = Vec::with_capacity(self.faces.len());
        for (dim, rows) in self.faces.into_iter().enumerate() {
            let mut out_rows = Vec::with_capacity(rows.len());
            for (idx, row) in rows.into_iter().enumerate() {
                let mut out = Vec::with_capacity(row.len());
                for (slot, entry) in row.into_iter().enumerate() {
                    let (i, sign) = slot_face(slot);
                    let cube = entry.ok_or_else(|| CubeError::MissingFace {
                        name: self.names[dim][idx].clone(),
                        index: i,
                        sign: sign.symbol(),
                    })?;
                    if cube.gen.dim >= self.names.len() || cube.gen.idx >= self.names[cube.gen.dim].len() {
                        return Err(CubeError::UnknownGenerator(format!("{:?}", cube.gen)));
                    }
                    out.push(cube);
                }
                out_rows.push(out);
            }
            faces.push(out_rows);
        }
        Ok(CubicalSet { trunc_dim, finite, names: self.names, faces, lookup: self.lookup })
    }
}

impl CubicalSet {
    pub fn trunc_dim(&self) -> usize {
        self.trunc_dim
    }

    /// Whether the presentation lists every nondegenerate cell in all dimensions.
    pub fn is_finite(&self) -> bool {
        self.finite
    }

    /// Highest dimension in which cubes can be enumerated.
    pub fn bound(&self) -> usize {
        if self.finite {
            usize::MAX
        } else {
            self.trunc_dim
        }
    }

    pub fn with_trunc_dim(&self, trunc: usize) -> Result<CubicalSet, CubeError> {
        if !self.finite && trunc > self.trunc_dim {
            return Err(CubeError::BeyondTruncation { dim: trunc, bound: self.trunc_dim });
        }
        let mut out = self.clone();
        if trunc < self.max_generator_dim() {
            out.names.truncate(trunc + 1);
            out.faces.truncate(trunc + 1);
            out.lookup.retain(|_, g| g.dim <= trunc);
            out.finite = false;
        }
        out.trunc_dim = trunc;
        Ok(out)
    }

    pub fn max_generator_dim(&self) -> usize {
        self.names.iter().rposition(|v| !v.is_empty()).unwrap_or(0)
    }

    pub fn generator_count(&self, dim: usize) -> usize {
        self.names.get(dim).map_or(0, Vec::len)
    }

    pub fn generators(&self, dim: usize) -> impl Iterator<Item = GenId> + '_ {
        (0..self.generator_count(dim)).map(move |idx| GenId { dim, idx })
    }

    pub fn all_generators(&self) -> impl Iterator<Item = GenId> + '_ {
        (0..self.names.len()).flat_map(move |d| self.generators(d))
    }

    pub fn total_generators(&self) -> usize {
        self.names.iter().map(Vec::len).sum()
    }

    pub fn name(&self, g: GenId) -> &str {
        &self.names[g.dim][g.idx]
    }

    pub fn find(&self, name: &str) -> Option<GenId> {
        self.lookup.get(name).copied()
    }

    pub fn generator_face(&self, g: GenId, i: usize, sign: Sign) -> &Cube {
        &self.faces[g.dim][g.idx][face_slot(i, sign)]
    }

    /// `∂_i^ε c` in normal form.
    pub fn face(&self, c: &Cube, i: usize, sign: Sign) -> Result<Cube, CubeError> {
        let n = c.dim();
        if n == 0 || i == 0 || i > n {
            return Err(CubeError::IndexOutOfRange { index: i, dim: n });
        }
        let shifted: Vec<usize> = c
            .degen
            .iter()
            .filter(|&&s| s != i)
            .map(|&s| if s > i { s - 1 } else { s })
            .collect();
        if c.degen.binary_search(&i).is_ok() {
            return Ok(Cube { gen: c.gen, degen: shifted });
        }
        let before = c.degen.iter().filter(|&&s| s < i).count();
        let inner = self.generator_face(c.gen, i - before, sign);
        // Positions of the generator's surviving coordinates inside the face.
        let survivors: Vec<usize> = (1..n).filter(|p| shifted.binary_search(p).is_err()).collect();
        let mut degen = shifted;
        degen.extend(inner.degen.iter().map(|&t| survivors[t - 1]));
        degen.sort_unstable();
        Ok(Cube { gen: inner.gen, degen })
    }

    /// All cubes of dimension `n` in canonical order: generator dimension,
    /// declaration order, then degeneracy word lexicographically.
    pub fn cubes(&self, n: usize) -> Result<Vec<Cube>, CubeError> {
        if n > self.bound() {
            return Err(CubeError::BeyondTruncation { dim: n, bound: self.trunc_dim });
        }
        let mut out = Vec::new();
        for k in 0..=n.min(self.names.len().saturating_sub(1)) {
            let sets = combinations(n, n - k);
            for g in self.generators(k) {
                for s in &sets {
                    out.push(Cube { gen: g, degen: s.clone() });
                }
            }
        }
        Ok(out)
    }

    pub fn cube_count(&self, n: usize) -> usize {
        (0..=n.min(self.names.len().saturating_sub(1)))
            .map(|k| self.generator_count(k) * binomial(n, n - k))
            .sum()
    }

    /// Every failed instance of the face identity, over all generators.
    pub fn validate(&self) -> Vec<IdentityViolation> {
        let mut out = Vec::new();
        for g in self.all_generators() {
            let n = g.dim;
            if n < 2 {
                continue;
            }
            let c = Cube::generator(g);
            for j in 2..=n {
                for i in 1..j {
                    for eps in Sign::BOTH {
                        for omega in Sign::BOTH {
                            let lhs = self
                                .face(&c, j, omega)
                                .and_then(|x| self.face(&x, i, eps));
                            let rhs = self
                                .face(&c, i, eps)
                                .and_then(|x| self.face(&x, j - 1, omega));
                            if lhs != rhs {
                                out.push(IdentityViolation {
                                    generator: self.name(g).to_string(),
                                    i,
                                    eps,
                                    j,
                                    omega,
                                    lhs: lhs.map_or_else(|e| e.to_string(), |x| self.display_cube(&x)),
                                    rhs: rhs.map_or_else(|e| e.to_string(), |x| self.display_cube(&x)),
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Alternating count of generators.
    pub fn euler_characteristic(&self) -> i64 {
        (0..self.names.len())
            .map(|d| if d % 2 == 0 { self.generator_count(d) as i64 } else { -(self.generator_count(d) as i64) })
            .sum()
    }

    /// Cube syntax: `name` or `name[s b1 b2 ...]` with the non-decreasing word.
    pub fn display_cube(&self, c: &Cube) -> String {
        let name = self.name(c.gen);
        if c.degen.is_empty() {
            name.to_string()
        } else {
            let w: Vec<String> = c.word().iter().map(|b| b.to_string()).collect();
            format!("{}[s {}]", name, w.join(" "))
        }
    }

    /// The cubical subset generated by `keep`, which must be closed under faces.
    pub fn subset(&self, keep: &BTreeSet<GenId>) -> Result<CubicalSet, CubeError> {
        let mut builder = CubicalSetBuilder::new();
        let mut remap = BTreeMap::new();
        for &g in keep {
            let id = builder.add_generator(g.dim, self.name(g))?;
            remap.insert(g, id);
        }
        for &g in keep {
            for slot in 0..2 * g.dim {
                let (i, sign) = slot_face(slot);
                let f = self.generator_face(g, i, sign);
                let target = remap
                    .get(&f.gen)
                    .ok_or_else(|| CubeError::NotClosed(self.name(g).to_string()))?;
                builder.set_face(remap[&g], i, sign, Cube { gen: *target, degen: f.degen.clone() })?;
            }
        }
        builder.build(Some(self.trunc_dim), self.finite)
    }

    pub fn cube_from_name(&self, name: &str, degen_word: &[usize]) -> Result<Cube, CubeError> {
        let g = self.find(name).ok_or_else(|| CubeError::UnknownGenerator(name.to_string()))?;
        Cube::generator(g).degenerate_word(degen_word)
    }

    /// The fully degenerate `n`-cube on a vertex.
    pub fn degenerate_vertex(&self, v: GenId, n: usize) -> Cube {
        debug_assert_eq!(v.dim, 0);
        Cube { gen: v, degen: (1..=n).collect() }
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, t| acc * (n - t) / (t + 1))
}

/// One failed instance of `f(∂_i^ε g) = ∂_i^ε f(g)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MapViolation {
    pub generator: String,
    pub i: usize,
    pub eps: Sign,
    pub mapped_face: String,
    pub face_of_image: String,
}

/// A cubical map given on generators.
#[derive(Debug, Clone)]
pub struct CubicalMap {
    pub source: CubicalSet,
    pub target: CubicalSet,
    assignment: Vec<Vec<Cube>>,
}

impl CubicalMap {
    pub fn new(source: CubicalSet, target: CubicalSet, assignment: Vec<Vec<Cube>>) -> Result<Self, CubeError> {
        for g in source.all_generators() {
            let image = assignment
                .get(g.dim)
                .and_then(|row| row.get(g.idx))
                .ok_or_else(|| CubeError::UnknownGenerator(source.name(g).to_string()))?;
            if image.dim() != g.dim {
                return Err(CubeError::DimensionMismatch { expected: g.dim, found: image.dim() });
            }
        }
        Ok(CubicalMap { source, target, assignment })
    }

    /// The identity map of `x`.
    pub fn identity(x: &CubicalSet) -> Self {
        let assignment = (0..=x.max_generator_dim())
            .map(|d| x.generators(d).map(Cube::generator).collect())
            .collect();
        CubicalMap { source: x.clone(), target: x.clone(), assignment }
    }

    /// The constant map onto the vertex `v` of `target`.
    pub fn constant(source: &CubicalSet, target: &CubicalSet, v: GenId) -> Self {
        let assignment = (0..=source.max_generator_dim())
            .map(|d| source.generators(d).map(|_| target.degenerate_vertex(v, d)).collect())
            .collect();
        CubicalMap { source: source.clone(), target: target.clone(), assignment }
    }

    pub fn on_generator(&self, g: GenId) -> &Cube {
        &self.assignment[g.dim][g.idx]
    }

    pub fn apply(&self, c: &Cube) -> Cube {
        self.on_generator(c.gen)
            .degenerate_set(&c.degen)
            .expect("degenerate coordinates fit the cube dimension")
    }

    pub fn validate(&self) -> Vec<MapViolation> {
        let mut out = Vec::new();
        for g in self.source.all_generators() {
            let image = self.on_generator(g);
            for slot in 0..2 * g.dim {
                let (i, eps) = slot_face(slot);
                let lhs = self.apply(self.source.generator_face(g, i, eps));
                let rhs = self.target.face(image, i, eps).expect("index in range");
                if lhs != rhs {
                    out.push(MapViolation {
                        generator: self.source.name(g).to_string(),
                        i,
                        eps,
                        mapped_face: self.target.display_cube(&lhs),
                        face_of_image: self.target.display_cube(&rhs),
                    });
                }
            }
        }
        out
    }

    /// The image `f(A)` as a cubical subset of the target.
    pub fn image(&self) -> Result<CubicalSet, CubeError> {
        let keep: BTreeSet<GenId> = self.source.all_generators().map(|g| self.on_generator(g).gen).collect();
        self.target.subset(&keep)
    }

    /// The preimage `f⁻¹(B)` of the subset generated by `sub`.
    pub fn preimage(&self, sub: &BTreeSet<GenId>) -> Result<CubicalSet, CubeError> {
        let keep: BTreeSet<GenId> = self
            .source
            .all_generators()
            .filter(|&g| sub.contains(&self.on_generator(g).gen))
            .collect();
        self.source.subset(&keep)
    }
}

impl fmt::Display for CubicalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::to_text(self))
    }
}
