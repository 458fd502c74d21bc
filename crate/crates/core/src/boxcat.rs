//! The box category: objects `I^n`, face insertions `δ_i^ε`, projections `σ_i`,
//! and the canonical normal form of a morphism.
//!
//! Positions are 1-based throughout. A morphism is stored in normal form as
//! the composite `δ_{i_k} ∘ … ∘ δ_{i_1} ∘ σ_{j_1} ∘ … ∘ σ_{j_l}` with
//! `i_1 < … < i_k` and `j_1 ≥ … ≥ j_l`; two morphisms are equal iff their
//! normal forms are.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The sign of an endpoint of `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Minus, Sign::Plus];

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Minus => -1.0,
            Sign::Plus => 1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Plus => '+',
        }
    }

    pub fn from_symbol(c: char) -> Option<Sign> {
        match c {
            '-' => Some(Sign::Minus),
            '+' => Some(Sign::Plus),
            _ => None,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoxError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("position {pos} out of range 1..={max}")]
    PositionOutOfRange { pos: usize, max: usize },
}

/// A single generating morphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    /// `δ_pos^sign: I^{m-1} → I^m`.
    Insert { pos: usize, sign: Sign },
    /// `σ_pos: I^n → I^{n-1}`.
    Project { pos: usize },
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Insert { pos, sign } => write!(f, "d{}{}", pos, sign.symbol()),
            Generator::Project { pos } => write!(f, "s{}", pos),
        }
    }
}

/// A word of generators, leftmost applied last, with its domain dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    pub dom_dim: usize,
    pub letters: Vec<Generator>,
}

impl Word {
    /// Checks that every letter is applicable and returns the codomain dimension.
    pub fn cod_dim(&self) -> Result<usize, BoxError> {
        let mut dim = self.dom_dim;
        for g in self.letters.iter().rev() {
            match *g {
                Generator::Insert { pos, .. } => {
                    if pos == 0 || pos > dim + 1 {
                        return Err(BoxError::PositionOutOfRange { pos, max: dim + 1 });
                    }
                    dim += 1;
                }
                Generator::Project { pos } => {
                    if pos == 0 || pos > dim {
                        return Err(BoxError::PositionOutOfRange { pos, max: dim });
                    }
                    dim -= 1;
                }
            }
        }
        Ok(dim)
    }

    /// Rewrites to normal form with the co-cubical identities. Returns the
    /// normal word and the number of rewrite steps taken.
    pub fn normalize(&self) -> Result<(Word, usize), BoxError> {
        self.cod_dim()?;
        let mut letters = self.letters.clone();
        let mut steps = 0;
        loop {
            let mut changed = false;
            let mut k = 0;
            while k + 1 < letters.len() {
                let (a, b) = (letters[k], letters[k + 1]);
                match (a, b) {
                    (Generator::Project { pos: j }, Generator::Insert { pos: i, sign }) => {
                        if i < j {
                            letters[k] = Generator::Insert { pos: i, sign };
                            letters[k + 1] = Generator::Project { pos: j - 1 };
                        } else if i == j {
                            letters.drain(k..k + 2);
                        } else {
                            letters[k] = Generator::Insert { pos: i - 1, sign };
                            letters[k + 1] = Generator::Project { pos: j };
                        }
                        changed = true;
                        steps += 1;
                        break;
                    }
                    (Generator::Insert { pos: pa, sign: sa }, Generator::Insert { pos: pb, sign: sb })
                        if pa <= pb =>
                    {
                        letters[k] = Generator::Insert { pos: pb + 1, sign: sb };
                        letters[k + 1] = Generator::Insert { pos: pa, sign: sa };
                        changed = true;
                        steps += 1;
                        break;
                    }
                    (Generator::Project { pos: pa }, Generator::Project { pos: pb }) if pa < pb => {
                        letters[k] = Generator::Project { pos: pb - 1 };
                        letters[k + 1] = Generator::Project { pos: pa };
                        changed = true;
                        steps += 1;
                        break;
                    }
                    _ => k += 1,
                }
            }
            if !changed {
                break;
            }
        }
        Ok((Word { dom_dim: self.dom_dim, letters }, steps))
    }

    pub fn apply_geometric(&self, x: &[f64]) -> Result<Vec<f64>, BoxError> {
        if x.len() != self.dom_dim {
            return Err(BoxError::DimensionMismatch { expected: self.dom_dim, found: x.len() });
        }
        self.cod_dim()?;
        let mut v = x.to_vec();
        for g in self.letters.iter().rev() {
            match *g {
                Generator::Insert { pos, sign } => v.insert(pos - 1, sign.as_f64()),
                Generator::Project { pos } => {
                    v.remove(pos - 1);
                }
            }
        }
        Ok(v)
    }
}

/// A morphism `I^n → I^m` in normal form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BoxMorphism {
    pub dom_dim: usize,
    pub cod_dim: usize,
    /// Strictly increasing positions in `1..=cod_dim`.
    pub insertions: Vec<(usize, Sign)>,
    /// Non-increasing positions; the last entry is applied first.
    pub projections: Vec<usize>,
}

impl BoxMorphism {
    pub fn identity(n: usize) -> Self {
        BoxMorphism { dom_dim: n, cod_dim: n, insertions: vec![], projections: vec![] }
    }

    /// `δ_i^ε: I^{m-1} → I^m`.
    pub fn face(m: usize, i: usize, sign: Sign) -> Result<Self, BoxError> {
        if m == 0 || i == 0 || i > m {
            return Err(BoxError::PositionOutOfRange { pos: i, max: m });
        }
        Ok(BoxMorphism { dom_dim: m - 1, cod_dim: m, insertions: vec![(i, sign)], projections: vec![] })
    }

    /// `σ_i: I^n → I^{n-1}`.
    pub fn projection(n: usize, i: usize) -> Result<Self, BoxError> {
        if n == 0 || i == 0 || i > n {
            return Err(BoxError::PositionOutOfRange { pos: i, max: n });
        }
        Ok(BoxMorphism { dom_dim: n, cod_dim: n - 1, insertions: vec![], projections: vec![i] })
    }

    /// Builds the morphism that deletes the coordinates in `deleted` and then
    /// places constants at `inserted` (positions in the codomain).
    pub fn from_geometric(
        dom_dim: usize,
        deleted: &[usize],
        inserted: &[(usize, Sign)],
    ) -> Result<Self, BoxError> {
        let mut del = deleted.to_vec();
        del.sort_unstable();
        del.dedup();
        if let Some(&p) = del.iter().find(|&&p| p == 0 || p > dom_dim) {
            return Err(BoxError::PositionOutOfRange { pos: p, max: dom_dim });
        }
        let r = dom_dim - del.len();
        let cod_dim = r + inserted.len();
        let mut ins = inserted.to_vec();
        ins.sort_unstable();
        for w in ins.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(BoxError::PositionOutOfRange { pos: w[1].0, max: cod_dim });
            }
        }
        if let Some(&(p, _)) = ins.iter().find(|(p, _)| *p == 0 || *p > cod_dim) {
            return Err(BoxError::PositionOutOfRange { pos: p, max: cod_dim });
        }
        // Deleting d_1 < d_2 < … in increasing order shifts later positions down.
        let projections = del.iter().enumerate().map(|(t, d)| d - t).rev().collect();
        Ok(BoxMorphism { dom_dim, cod_dim, insertions: ins, projections })
    }

    /// Coordinates of the domain deleted by this morphism (ascending).
    pub fn deleted_coordinates(&self) -> Vec<usize> {
        self.projections.iter().rev().enumerate().map(|(t, j)| j + t).collect()
    }

    pub fn surviving_dim(&self) -> usize {
        self.dom_dim - self.projections.len()
    }

    pub fn is_insertion_only(&self) -> bool {
        self.projections.is_empty()
    }

    pub fn to_word(&self) -> Word {
        let mut letters: Vec<Generator> = self
            .insertions
            .iter()
            .rev()
            .map(|&(pos, sign)| Generator::Insert { pos, sign })
            .collect();
        letters.extend(self.projections.iter().map(|&pos| Generator::Project { pos }));
        Word { dom_dim: self.dom_dim, letters }
    }

    pub fn from_word(word: &Word) -> Result<Self, BoxError> {
        let cod_dim = word.cod_dim()?;
        let (normal, _) = word.normalize()?;
        Ok(Self::from_normal_word(&normal, cod_dim))
    }

    fn from_normal_word(word: &Word, cod_dim: usize) -> Self {
        let mut insertions = Vec::new();
        let mut projections = Vec::new();
        for g in &word.letters {
            match *g {
                Generator::Insert { pos, sign } => insertions.push((pos, sign)),
                Generator::Project { pos } => projections.push(pos),
            }
        }
        insertions.reverse();
        BoxMorphism { dom_dim: word.dom_dim, cod_dim, insertions, projections }
    }

    pub fn apply_geometric(&self, x: &[f64]) -> Result<Vec<f64>, BoxError> {
        self.to_word().apply_geometric(x)
    }
}

/// `g ∘ f`, normalized by rewriting.
pub fn compose(g: &BoxMorphism, f: &BoxMorphism) -> Result<BoxMorphism, BoxError> {
    compose_counting(g, f).map(|(m, _)| m)
}

/// Like [`compose`], also returning the number of rewrite steps.
pub fn compose_counting(g: &BoxMorphism, f: &BoxMorphism) -> Result<(BoxMorphism, usize), BoxError> {
    if f.cod_dim != g.dom_dim {
        return Err(BoxError::DimensionMismatch { expected: g.dom_dim, found: f.cod_dim });
    }
    let mut letters = g.to_word().letters;
    letters.extend(f.to_word().letters);
    let word = Word { dom_dim: f.dom_dim, letters };
    let (normal, steps) = word.normalize()?;
    Ok((BoxMorphism::from_normal_word(&normal, g.cod_dim), steps))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..=n {
            if n - v + 1 < k - cur.len() {
                break;
            }
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, k, &mut Vec::new(), &mut out);
    out
}

/// All `k`-element subsets of `1..=n`, in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return vec![];
    }
    subsets(n, k)
}

fn sign_vectors(len: usize) -> Vec<Vec<Sign>> {
    (0..1usize << len)
        .map(|bits| {
            (0..len)
                .map(|t| if bits >> t & 1 == 1 { Sign::Plus } else { Sign::Minus })
                .collect()
        })
        .collect()
}

/// Every morphism `I^n → I^m`, sorted.
pub fn enumerate_hom(n: usize, m: usize) -> Vec<BoxMorphism> {
    let mut out = Vec::new();
    for r in 0..=n.min(m) {
        for deleted in combinations(n, n - r) {
            for positions in combinations(m, m - r) {
                for signs in sign_vectors(m - r) {
                    let ins: Vec<(usize, Sign)> =
                        positions.iter().copied().zip(signs.iter().copied()).collect();
                    out.push(BoxMorphism::from_geometric(n, &deleted, &ins).expect("valid by construction"));
                }
            }
        }
    }
    out.sort();
    out
}

/// Closed-form size of `Hom(I^n, I^m)`.
pub fn hom_count(n: usize, m: usize) -> u64 {
    fn binom(n: usize, k: usize) -> u64 {
        (0..k).fold(1u64, |acc, t| acc * (n - t) as u64 / (t as u64 + 1))
    }
    (0..=n.min(m)).map(|r| binom(n, r) * binom(m, r) * (1u64 << (m - r))).sum()
}

impl fmt::Display for BoxMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word = self.to_word();
        if word.letters.is_empty() {
            return write!(f, "id{}", self.dom_dim);
        }
        let parts: Vec<String> = word.letters.iter().map(|g| g.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}
