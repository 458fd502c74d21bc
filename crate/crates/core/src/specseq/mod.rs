//! Spectral sequences of bigraded exact couples.
//!
//! `i: D_{p,q} → D_{p+1,q-1}`, `j: D_{p,q} → E_{p,q}`, `k: E_{p,q} → D_{p-1,q}`.
//! `Z^r = k⁻¹(im i^{r-1})`, `B^r = j(ker i^{r-1})`, `E^r = Z^r / B^r`, and
//! `d^r = j ∘ (i^{r-1})⁻¹ ∘ k: E^r_{p,q} → E^r_{p-r,q+r-1}`.
//!
//! Two engines: [`GroupCouple`] over finitely presented abelian groups, and
//! [`TableCouple`] over finite pointed sets, monoids and groups given by
//! tables.

mod filtration;
mod format;
mod group_couple;
mod monoid;
mod summary;
mod table;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::zlinalg::ZError;

pub use filtration::{build_filtration_couple, random_filtered_complex, FilteredComplex};
pub use format::{parse_couple_json, CoupleFile, FilteredComplexJson, GroupCoupleJson, MonoidSequenceJson, TableCoupleJson};
pub use group_couple::{ConvergenceEntry, Differential, GroupCouple, NodePage, SpectralPage};
pub use monoid::{monoid_hom_theorem_check, MonoidTheoremReport};
pub use summary::{summarize, summarize_group_couple, summarize_table_couple, CheckGroup, NodeSummary, PageSummary, SpectralSummary};
pub use table::{FiniteNode, TableCouple, TableDifferential, TableNodePage};

/// A bidegree `(p, q)`.
pub type Coord = (i64, i64);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("({0},{1}) lies outside the declared window")]
    OutsideWindow(i64, i64),
    #[error("page index must be at least 1")]
    BadPage,
    #[error("malformed couple: {0}")]
    Malformed(String),
    #[error("k-image at ({p},{q}) is not in the image of i^{power}")]
    NotInZ { p: i64, q: i64, power: usize },
    #[error("ill-defined: {0}")]
    IllDefined(String),
    #[error("filtration: {0}")]
    Filtration(String),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error(transparent)]
    Linear(#[from] ZError),
}

/// The rectangle of bidegrees where a couple is specified. Nodes with
/// `p < 0` are zero and always available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub p_max: i64,
    pub q_min: i64,
    pub q_max: i64,
}

impl Window {
    pub fn contains(&self, p: i64, q: i64) -> bool {
        p < 0 || (p <= self.p_max && q >= self.q_min && q <= self.q_max)
    }

    pub fn check(&self, p: i64, q: i64) -> Result<(), SpecError> {
        if self.contains(p, q) {
            Ok(())
        } else {
            Err(SpecError::OutsideWindow(p, q))
        }
    }
}

/// One failed check, with its coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub check: String,
    pub r: Option<usize>,
    pub p: i64,
    pub q: i64,
    pub detail: String,
}

/// Outcome of a batch of checks.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub checks_run: usize,
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn record(&mut self, ok: bool, check: &str, r: Option<usize>, (p, q): Coord, detail: impl FnOnce() -> String) {
        self.checks_run += 1;
        if !ok {
            self.violations.push(Violation { check: check.to_string(), r, p, q, detail: detail() });
        }
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checks_run += other.checks_run;
        self.violations.extend(other.violations);
    }
}
