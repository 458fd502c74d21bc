//! JSON formats for filtered complexes and couples.
//!
//! ```json
//! {"type": "filtered_complex", "dims": [1, 1], "boundaries": [[[2]]], "levels": [[0], [1]]}
//! ```
//!
//! Group couples list nodes as `{"p", "q", "gens", "relations"}` with each
//! relation a vector of length `gens`, and maps as `{"p", "q", "matrix"}`
//! (rows of integers) keyed by their source. Table couples list nodes as
//! `{"p", "q", "size", "base", "op"}` and maps as `{"p", "q", "map"}`.
//! A `monoid_sequence` holds nodes `l`, `m`, `a` and maps `f`, `g`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{FilteredComplex, FiniteNode, GroupCouple, SpecError, TableCouple, Window};
use crate::zlinalg::{ChainComplex, IntMatrix, PresentedGroup};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CoupleFile {
    FilteredComplex(FilteredComplexJson),
    GroupCouple(GroupCoupleJson),
    TableCouple(TableCoupleJson),
    MonoidSequence(MonoidSequenceJson),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilteredComplexJson {
    pub dims: Vec<usize>,
    /// `boundaries[n-1]` is `∂_n` as `dims[n-1]` rows of length `dims[n]`.
    pub boundaries: Vec<Vec<Vec<i64>>>,
    pub levels: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupNodeJson {
    pub p: i64,
    pub q: i64,
    pub gens: usize,
    #[serde(default)]
    pub relations: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub p: i64,
    pub q: i64,
    pub matrix: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupCoupleJson {
    pub window: Window,
    pub d: Vec<GroupNodeJson>,
    pub e: Vec<GroupNodeJson>,
    #[serde(default)]
    pub i: Vec<MatrixJson>,
    #[serde(default)]
    pub j: Vec<MatrixJson>,
    #[serde(default)]
    pub k: Vec<MatrixJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableNodeJson {
    pub p: i64,
    pub q: i64,
    #[serde(flatten)]
    pub node: FiniteNode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableMapJson {
    pub p: i64,
    pub q: i64,
    pub map: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableCoupleJson {
    pub window: Window,
    pub d: Vec<TableNodeJson>,
    pub e: Vec<TableNodeJson>,
    #[serde(default)]
    pub i: Vec<TableMapJson>,
    #[serde(default)]
    pub j: Vec<TableMapJson>,
    #[serde(default)]
    pub k: Vec<TableMapJson>,
}

/// `L -f-> M -g-> A` for the monoid homomorphism theorem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonoidSequenceJson {
    pub l: FiniteNode,
    pub m: FiniteNode,
    pub a: FiniteNode,
    pub f: Vec<usize>,
    pub g: Vec<usize>,
}

pub fn parse_couple_json(text: &str) -> Result<CoupleFile, SpecError> {
    serde_json::from_str(text)
        .map_err(|e| SpecError::Malformed(format!("line {}, column {}: {}", e.line(), e.column(), e)))
}

fn matrix(rows: &[Vec<i64>], nrows: usize, ncols: usize, what: &str) -> Result<IntMatrix, SpecError> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(SpecError::Malformed(format!("{} must be {}x{}", what, nrows, ncols)));
    }
    IntMatrix::from_rows_with_cols(rows, ncols).map_err(SpecError::from)
}

impl FilteredComplexJson {
    pub fn to_filtered(&self) -> Result<FilteredComplex, SpecError> {
        if self.boundaries.len() + 1 != self.dims.len() {
            return Err(SpecError::Malformed(format!(
                "{} degrees need {} boundary matrices",
                self.dims.len(),
                self.dims.len().saturating_sub(1)
            )));
        }
        let boundaries = self
            .boundaries
            .iter()
            .enumerate()
            .map(|(k, rows)| matrix(rows, self.dims[k], self.dims[k + 1], &format!("boundary {}", k + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        FilteredComplex::new(ChainComplex::new(self.dims.clone(), boundaries)?, self.levels.clone())
    }

    pub fn from_filtered(fc: &FilteredComplex) -> Self {
        let c = fc.complex();
        FilteredComplexJson {
            dims: c.dims().to_vec(),
            boundaries: (1..=c.top())
                .map(|n| c.boundary(n).to_i64_rows().expect("entries fit in i64"))
                .collect(),
            levels: fc.levels().to_vec(),
        }
    }
}

impl GroupCoupleJson {
    pub fn to_couple(&self) -> Result<GroupCouple, SpecError> {
        let node = |n: &GroupNodeJson| -> Result<PresentedGroup, SpecError> {
            let cols: Vec<Vec<BigInt>> = n
                .relations
                .iter()
                .map(|r| {
                    if r.len() != n.gens {
                        Err(SpecError::Malformed(format!("relation at ({},{}) has length {}", n.p, n.q, r.len())))
                    } else {
                        Ok(r.iter().map(|&x| BigInt::from(x)).collect())
                    }
                })
                .collect::<Result<_, _>>()?;
            Ok(PresentedGroup { gens: n.gens, relations: IntMatrix::from_columns(n.gens, &cols) })
        };
        let nodes = |list: &[GroupNodeJson]| -> Result<BTreeMap<(i64, i64), PresentedGroup>, SpecError> {
            let mut out = BTreeMap::new();
            for n in list {
                if out.insert((n.p, n.q), node(n)?).is_some() {
                    return Err(SpecError::Malformed(format!("duplicate node ({},{})", n.p, n.q)));
                }
            }
            Ok(out)
        };
        let (d, e) = (nodes(&self.d)?, nodes(&self.e)?);
        let gens = |m: &BTreeMap<(i64, i64), PresentedGroup>, p: i64, q: i64| m.get(&(p, q)).map_or(0, |g| g.gens);
        let maps = |list: &[MatrixJson], shape: &dyn Fn(i64, i64) -> (usize, usize), name: &str| {
            list.iter()
                .map(|m| {
                    let (r, c) = shape(m.p, m.q);
                    Ok(((m.p, m.q), matrix(&m.matrix, r, c, &format!("{} at ({},{})", name, m.p, m.q))?))
                })
                .collect::<Result<BTreeMap<_, _>, SpecError>>()
        };
        let i = maps(&self.i, &|p, q| (gens(&d, p + 1, q - 1), gens(&d, p, q)), "i")?;
        let j = maps(&self.j, &|p, q| (gens(&e, p, q), gens(&d, p, q)), "j")?;
        let k = maps(&self.k, &|p, q| (gens(&d, p - 1, q), gens(&e, p, q)), "k")?;
        GroupCouple::new(self.window, d, e, i, j, k)
    }
}

impl TableCoupleJson {
    pub fn to_couple(&self) -> Result<TableCouple, SpecError> {
        let nodes = |list: &[TableNodeJson]| list.iter().map(|n| ((n.p, n.q), n.node.clone())).collect();
        let maps = |list: &[TableMapJson]| list.iter().map(|m| ((m.p, m.q), m.map.clone())).collect();
        TableCouple::new(self.window, nodes(&self.d), nodes(&self.e), maps(&self.i), maps(&self.j), maps(&self.k))
    }
}
