//! Runs every applicable check on a couple file and collects the pages.

use serde::Serialize;

use super::{
    build_filtration_couple, monoid_hom_theorem_check, CheckReport, ConvergenceEntry, CoupleFile, FilteredComplex,
    GroupCouple, MonoidTheoremReport, SpecError, TableCouple,
};

/// `E^r` at one bidegree, as invariant factors or a coset count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeSummary {
    pub p: i64,
    pub q: i64,
    pub group: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PageSummary {
    pub r: usize,
    pub nodes: Vec<NodeSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckGroup {
    pub name: String,
    #[serde(flatten)]
    pub report: CheckReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectralSummary {
    pub kind: String,
    pub pages: Vec<PageSummary>,
    pub checks: Vec<CheckGroup>,
    pub convergence: Vec<ConvergenceEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monoid: Option<MonoidTheoremReport>,
    pub passed: bool,
}

impl SpectralSummary {
    fn new(kind: &str) -> Self {
        SpectralSummary { kind: kind.into(), pages: vec![], checks: vec![], convergence: vec![], monoid: None, passed: true }
    }

    fn push(&mut self, name: impl Into<String>, report: CheckReport) {
        self.passed &= report.passed();
        self.checks.push(CheckGroup { name: name.into(), report });
    }
}

/// Validation, pages `1..=pages`, differential and homology checks on each,
/// and convergence. With `oracle`, every `E^∞` is also compared with the
/// graded homology of the filtered complex computed directly.
pub fn summarize_group_couple(
    gc: &GroupCouple,
    pages: usize,
    oracle: Option<&FilteredComplex>,
) -> Result<SpectralSummary, SpecError> {
    let mut out = SpectralSummary::new(if oracle.is_some() { "filtered_complex" } else { "group_couple" });
    out.push("validate", gc.validate()?);
    out.push("inclusion chain", gc.inclusion_chain_check()?);
    for r in 1..=pages.max(1) {
        let page = gc.page(r)?;
        out.pages.push(PageSummary {
            r,
            nodes: page
                .nodes
                .values()
                .filter_map(|n| n.invariants().map(|g| NodeSummary { p: n.p, q: n.q, group: g.to_string() }))
                .collect(),
        });
        out.push(format!("differentials r={}", r), gc.differential_checks(r)?);
        out.push(format!("homology step r={}", r), gc.homology_step_check(r, &Default::default())?);
    }
    let (report, entries) = gc.convergence_check()?;
    out.push("convergence", report);
    if let Some(fc) = oracle {
        let mut agree = CheckReport::default();
        for e in &entries {
            let direct = fc.graded_homology(e.p, (e.p + e.q) as usize)?;
            agree.record(direct == e.e_infinity, "E^∞ matches graded homology", None, (e.p, e.q), || {
                format!("E^∞ = {}, direct = {}", e.e_infinity, direct)
            });
        }
        out.push("graded homology oracle", agree);
    }
    out.convergence = entries;
    Ok(out)
}

pub fn summarize_table_couple(tc: &TableCouple, pages: usize) -> Result<SpectralSummary, SpecError> {
    let mut out = SpectralSummary::new("table_couple");
    out.push("validate", tc.validate()?);
    for r in 1..=pages.max(1) {
        let mut nodes = Vec::new();
        for (p, q) in tc.e_support() {
            if q < 0 || tc.max_page(p, q) < r {
                continue;
            }
            if let Some(c) = tc.page_node(r, p, q)?.cosets {
                nodes.push(NodeSummary { p, q, group: format!("{} cosets", c.len()) });
            }
        }
        out.pages.push(PageSummary { r, nodes });
        out.push(format!("page r={}", r), tc.page_checks(r)?);
    }
    Ok(out)
}

/// Dispatches on the file type.
pub fn summarize(file: &CoupleFile, pages: usize) -> Result<SpectralSummary, SpecError> {
    match file {
        CoupleFile::FilteredComplex(j) => {
            let fc = j.to_filtered()?;
            summarize_group_couple(&build_filtration_couple(&fc, pages + 1)?, pages, Some(&fc))
        }
        CoupleFile::GroupCouple(j) => summarize_group_couple(&j.to_couple()?, pages, None),
        CoupleFile::TableCouple(j) => summarize_table_couple(&j.to_couple()?, pages),
        CoupleFile::MonoidSequence(j) => {
            let report = monoid_hom_theorem_check(&j.l, &j.m, &j.a, &j.f, &j.g)?;
            let mut out = SpectralSummary::new("monoid_sequence");
            out.passed = report.passed();
            out.monoid = Some(report);
            Ok(out)
        }
    }
}
