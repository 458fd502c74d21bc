//! Exact couples of finitely presented abelian groups.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use super::{CheckReport, Coord, SpecError, Window};
use crate::zlinalg::{image, kernel, preimage, solve_modulo, AbelianInvariants, IntMatrix, PresentedGroup, Subgroup};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupCouple {
    pub window: Window,
    d: BTreeMap<Coord, PresentedGroup>,
    e: BTreeMap<Coord, PresentedGroup>,
    i: BTreeMap<Coord, IntMatrix>,
    j: BTreeMap<Coord, IntMatrix>,
    k: BTreeMap<Coord, IntMatrix>,
}

/// `Z^r`, `B^r` and (where formed) `E^r` at one bidegree.
#[derive(Debug, Clone)]
pub struct NodePage {
    pub p: i64,
    pub q: i64,
    pub r: usize,
    pub z: Subgroup,
    pub b: Subgroup,
    /// `Z^r / B^r`; not formed on the row `q = 0` for `r ≥ 2`.
    pub e_r: Option<PresentedGroup>,
}

impl NodePage {
    pub fn invariants(&self) -> Option<AbelianInvariants> {
        self.e_r.as_ref().map(PresentedGroup::invariants)
    }
}

#[derive(Debug, Clone)]
pub struct SpectralPage {
    pub r: usize,
    pub nodes: BTreeMap<Coord, NodePage>,
}

/// `d^r` on the generators of `Z^r` at the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Differential {
    pub r: usize,
    pub source: Coord,
    pub target: Coord,
    /// `Z^r` at the source, in the coordinates of `E` there.
    pub z: Subgroup,
    /// Column `m` is `d^r` of the `m`-th generator of `z`, in target `E` coordinates.
    pub matrix: IntMatrix,
}

impl Differential {
    /// `d^r x` for `x ∈ Z^r`, or `None` if `x ∉ Z^r`.
    pub fn apply(&self, source_e: &PresentedGroup, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let c = solve_modulo(&self.z.gens, source_e, x)?;
        self.matrix.mul_vec(&c).ok()
    }
}

/// Comparison of `E^∞_{p,q}` with the graded piece of the abutment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvergenceEntry {
    pub p: i64,
    pub q: i64,
    pub e_infinity: AbelianInvariants,
    pub graded: AbelianInvariants,
    pub z_stable_at: usize,
    pub b_stable_at: usize,
}

fn shape_error(what: &str, (p, q): Coord, m: &IntMatrix, rows: usize, cols: usize) -> SpecError {
    SpecError::Malformed(format!(
        "{} at ({},{}) is {}x{}, expected {}x{}",
        what,
        p,
        q,
        m.rows(),
        m.cols(),
        rows,
        cols
    ))
}

impl GroupCouple {
    /// Nodes and maps absent from the maps are zero. `i` is keyed by its
    /// source, `j` and `k` by theirs.
    pub fn new(
        window: Window,
        d: BTreeMap<Coord, PresentedGroup>,
        e: BTreeMap<Coord, PresentedGroup>,
        i: BTreeMap<Coord, IntMatrix>,
        j: BTreeMap<Coord, IntMatrix>,
        k: BTreeMap<Coord, IntMatrix>,
    ) -> Result<Self, SpecError> {
        for &(p, q) in d.keys().chain(e.keys()) {
            if p < 0 {
                return Err(SpecError::Malformed(format!("node at ({},{}) has p < 0", p, q)));
            }
            window.check(p, q)?;
        }
        let c = GroupCouple { window, d, e, i, j, k };
        for (&(p, q), m) in &c.i {
            window.check(p, q)?;
            window.check(p + 1, q - 1)?;
            let (rows, cols) = (c.d(p + 1, q - 1)?.gens, c.d(p, q)?.gens);
            if m.rows() != rows || m.cols() != cols {
                return Err(shape_error("i", (p, q), m, rows, cols));
            }
        }
        for (&(p, q), m) in &c.j {
            window.check(p, q)?;
            let (rows, cols) = (c.e(p, q)?.gens, c.d(p, q)?.gens);
            if m.rows() != rows || m.cols() != cols {
                return Err(shape_error("j", (p, q), m, rows, cols));
            }
        }
        for (&(p, q), m) in &c.k {
            window.check(p, q)?;
            let (rows, cols) = (c.d(p - 1, q)?.gens, c.e(p, q)?.gens);
            if m.rows() != rows || m.cols() != cols {
                return Err(shape_error("k", (p, q), m, rows, cols));
            }
        }
        Ok(c)
    }

    pub fn d(&self, p: i64, q: i64) -> Result<PresentedGroup, SpecError> {
        self.window.check(p, q)?;
        Ok(if p < 0 { PresentedGroup::zero() } else { self.d.get(&(p, q)).cloned().unwrap_or_else(PresentedGroup::zero) })
    }

    pub fn e(&self, p: i64, q: i64) -> Result<PresentedGroup, SpecError> {
        self.window.check(p, q)?;
        Ok(if p < 0 { PresentedGroup::zero() } else { self.e.get(&(p, q)).cloned().unwrap_or_else(PresentedGroup::zero) })
    }

    pub fn i(&self, p: i64, q: i64) -> Result<IntMatrix, SpecError> {
        let (rows, cols) = (self.d(p + 1, q - 1)?.gens, self.d(p, q)?.gens);
        Ok(self.i.get(&(p, q)).cloned().unwrap_or_else(|| IntMatrix::zeros(rows, cols)))
    }

    pub fn j(&self, p: i64, q: i64) -> Result<IntMatrix, SpecError> {
        let (rows, cols) = (self.e(p, q)?.gens, self.d(p, q)?.gens);
        Ok(self.j.get(&(p, q)).cloned().unwrap_or_else(|| IntMatrix::zeros(rows, cols)))
    }

    pub fn k(&self, p: i64, q: i64) -> Result<IntMatrix, SpecError> {
        let (rows, cols) = (self.d(p - 1, q)?.gens, self.e(p, q)?.gens);
        Ok(self.k.get(&(p, q)).cloned().unwrap_or_else(|| IntMatrix::zeros(rows, cols)))
    }

    /// `i^s: D_{p,q} → D_{p+s,q-s}`.
    pub fn i_power(&self, p: i64, q: i64, s: usize) -> Result<IntMatrix, SpecError> {
        let mut m = IntMatrix::identity(self.d(p, q)?.gens);
        for t in 0..s as i64 {
            m = self.i(p + t, q - t)?.mul(&m)?;
        }
        Ok(m)
    }

    /// Bidegrees with a nonzero `E` node, in order.
    pub fn e_support(&self) -> Vec<Coord> {
        self.e.iter().filter(|(_, g)| g.gens > 0).map(|(&c, _)| c).collect()
    }

    /// Largest `r` for which `Z^r`, `B^r` and `d^r` at `(p,q)` stay inside the window.
    pub fn max_page(&self, p: i64, q: i64) -> usize {
        let w = &self.window;
        let bound = (w.q_max - q + 1).min(w.p_max - p + 1).min(q - w.q_min + 1);
        bound.max(0) as usize
    }

    /// `Z^r_{p,q} = k⁻¹(im i^{r-1})`.
    pub fn z_r(&self, r: usize, p: i64, q: i64) -> Result<Subgroup, SpecError> {
        if r == 0 {
            return Err(SpecError::BadPage);
        }
        let s = r as i64 - 1;
        let d_mid = self.d(p - 1, q)?;
        let src = self.d(p - 1 - s, q + s)?;
        let reach = image(&self.i_power(p - 1 - s, q + s, r - 1)?, &src.whole())?;
        Ok(preimage(&self.k(p, q)?, &self.e(p, q)?, &d_mid, &reach)?)
    }

    /// `B^r_{p,q} = j(ker i^{r-1})`.
    pub fn b_r(&self, r: usize, p: i64, q: i64) -> Result<Subgroup, SpecError> {
        if r == 0 {
            return Err(SpecError::BadPage);
        }
        let s = r as i64 - 1;
        let dpq = self.d(p, q)?;
        let ker = kernel(&self.i_power(p, q, r - 1)?, &dpq, &self.d(p + s, q - s)?)?;
        Ok(image(&self.j(p, q)?, &ker)?)
    }

    pub fn page_node(&self, r: usize, p: i64, q: i64) -> Result<NodePage, SpecError> {
        let z = self.z_r(r, p, q)?;
        let b = self.b_r(r, p, q)?;
        let e_r = if q >= 1 || r == 1 { Some(self.e(p, q)?.quotient(&z, &b)?) } else { None };
        Ok(NodePage { p, q, r, z, b, e_r })
    }

    /// The `r`-th page on the support of `E`.
    pub fn page(&self, r: usize) -> Result<SpectralPage, SpecError> {
        if r == 0 {
            return Err(SpecError::BadPage);
        }
        let nodes = self
            .e_support()
            .into_par_iter()
            .filter(|&(_, q)| q >= 0)
            .map(|(p, q)| Ok(((p, q), self.page_node(r, p, q)?)))
            .collect::<Result<BTreeMap<_, _>, SpecError>>()?;
        Ok(SpectralPage { r, nodes })
    }

    pub fn differential(&self, r: usize, p: i64, q: i64) -> Result<Differential, SpecError> {
        if r == 0 {
            return Err(SpecError::BadPage);
        }
        if q < 0 {
            return Err(SpecError::Precondition(format!("d^r needs q ≥ 0, got ({},{})", p, q)));
        }
        let s = r as i64 - 1;
        let target = (p - r as i64, q + s);
        let z = self.z_r(r, p, q)?;
        let e_t = self.e(target.0, target.1)?;
        let k = self.k(p, q)?;
        let d_mid = self.d(p - 1, q)?;
        let lift = self.i_power(target.0, target.1, r - 1)?;
        let j = self.j(target.0, target.1)?;
        let mut columns = Vec::with_capacity(z.gens.cols());
        for zc in z.gens.columns() {
            let y = k.mul_vec(&zc)?;
            let x = solve_modulo(&lift, &d_mid, &y).ok_or(SpecError::NotInZ { p, q, power: r - 1 })?;
            columns.push(j.mul_vec(&x)?);
        }
        let matrix = IntMatrix::from_columns(e_t.gens, &columns);
        Ok(Differential { r, source: (p, q), target, z, matrix })
    }

    /// `ker d^r` as a subgroup of `E` at the source.
    fn kernel_of(&self, d: &Differential, matrix: &IntMatrix) -> Result<Subgroup, SpecError> {
        let (pt, qt) = d.target;
        let e_t = self.e(pt, qt)?;
        let b_t = self.b_r(d.r, pt, qt)?;
        let m = d.z.gens.cols();
        let c = preimage(matrix, &PresentedGroup::free(m), &e_t, &b_t)?;
        Ok(Subgroup::new(d.z.gens.mul(&c.gens)?))
    }

    /// Exactness, map well-definedness and kind constraints over the window.
    pub fn validate(&self) -> Result<CheckReport, SpecError> {
        let mut report = CheckReport::default();
        for (&(p, q), g) in &self.e {
            report.record(q >= 0 || g.invariants().is_trivial(), "E vanishes below q = 0", None, (p, q), || {
                format!("E = {}", g.invariants())
            });
        }
        for (name, maps) in [("i", &self.i), ("j", &self.j), ("k", &self.k)] {
            for (&(p, q), m) in maps {
                let (src, tgt) = match name {
                    "i" => (self.d(p, q)?, self.d(p + 1, q - 1)?),
                    "j" => (self.d(p, q)?, self.e(p, q)?),
                    _ => (self.e(p, q)?, self.d(p - 1, q)?),
                };
                let ok = src.hom_well_defined(m, &tgt)?;
                report.record(ok, &format!("{} respects relations", name), None, (p, q), || "relation not preserved".into());
            }
        }
        let w = self.window;
        let coords: Vec<Coord> = (0..=w.p_max).flat_map(|p| (w.q_min..=w.q_max).map(move |q| (p, q))).collect();
        let parts = coords
            .par_iter()
            .map(|&(p, q)| self.exactness_at(p, q))
            .collect::<Result<Vec<_>, SpecError>>()?;
        for part in parts {
            report.merge(part);
        }
        Ok(report)
    }

    fn exactness_at(&self, p: i64, q: i64) -> Result<CheckReport, SpecError> {
        let w = self.window;
        let mut report = CheckReport::default();
        // At D_{p,q}: im i = ker j.
        if w.contains(p - 1, q + 1) {
            let mid = self.d(p, q)?;
            let im = image(&self.i(p - 1, q + 1)?, &self.d(p - 1, q + 1)?.whole())?;
            let ker = kernel(&self.j(p, q)?, &mid, &self.e(p, q)?)?;
            report.record(mid.subgroups_equal(&im, &ker), "exact at D", None, (p, q), || "im i ≠ ker j".into());
        }
        // At E_{p,q}: im j = ker k.
        {
            let mid = self.e(p, q)?;
            let im = image(&self.j(p, q)?, &self.d(p, q)?.whole())?;
            let ker = kernel(&self.k(p, q)?, &mid, &self.d(p - 1, q)?)?;
            report.record(mid.subgroups_equal(&im, &ker), "exact at E", None, (p, q), || "im j ≠ ker k".into());
        }
        // At D_{p-1,q}: im k = ker i.
        if p >= 1 && w.contains(p, q - 1) {
            let mid = self.d(p - 1, q)?;
            let im = image(&self.k(p, q)?, &self.e(p, q)?.whole())?;
            let ker = kernel(&self.i(p - 1, q)?, &mid, &self.d(p, q - 1)?)?;
            report.record(mid.subgroups_equal(&im, &ker), "exact at D (via k)", None, (p - 1, q), || {
                "im k ≠ ker i".into()
            });
        }
        Ok(report)
    }

    /// `0 = B^1 ⊆ B^2 ⊆ … ⊆ Z^2 ⊆ Z^1 = E` up to the largest page the window allows.
    pub fn inclusion_chain_check(&self) -> Result<CheckReport, SpecError> {
        let mut report = CheckReport::default();
        for (p, q) in self.e_support() {
            if q < 0 {
                continue;
            }
            let e = self.e(p, q)?;
            let top = self.max_page(p, q);
            if top == 0 {
                continue;
            }
            let zs = (1..=top).map(|r| self.z_r(r, p, q)).collect::<Result<Vec<_>, _>>()?;
            let bs = (1..=top).map(|r| self.b_r(r, p, q)).collect::<Result<Vec<_>, _>>()?;
            report.record(e.subgroups_equal(&zs[0], &e.whole()), "Z^1 = E", Some(1), (p, q), String::new);
            report.record(e.subgroups_equal(&bs[0], &e.trivial_subgroup()), "B^1 = 0", Some(1), (p, q), String::new);
            for r in 1..top {
                report.record(e.is_subgroup_of(&zs[r], &zs[r - 1]), "Z^{r+1} ⊆ Z^r", Some(r), (p, q), String::new);
                report.record(e.is_subgroup_of(&bs[r - 1], &bs[r]), "B^r ⊆ B^{r+1}", Some(r), (p, q), String::new);
            }
            report.record(e.is_subgroup_of(&bs[top - 1], &zs[top - 1]), "B ⊆ Z", Some(top), (p, q), String::new);
        }
        Ok(report)
    }

    /// For every source on the support: `d^r` lands in `Z^r`, kills `B^r`,
    /// `ker d^r = Z^{r+1}`, `im d^r + B^r = B^{r+1}` at the target,
    /// `d^r ∘ d^r = 0`, and `d¹ = j ∘ k`.
    pub fn differential_checks(&self, r: usize) -> Result<CheckReport, SpecError> {
        let sources: Vec<Coord> = self
            .e_support()
            .into_iter()
            .filter(|&(p, q)| q >= 0 && self.max_page(p, q) > r && self.max_page(p - r as i64, q + r as i64 - 1) > r)
            .collect();
        let parts = sources
            .par_iter()
            .map(|&(p, q)| self.differential_checks_at(r, p, q))
            .collect::<Result<Vec<_>, SpecError>>()?;
        let mut report = CheckReport::default();
        for part in parts {
            report.merge(part);
        }
        Ok(report)
    }

    fn differential_checks_at(&self, r: usize, p: i64, q: i64) -> Result<CheckReport, SpecError> {
        let mut report = CheckReport::default();
        let at = (p, q);
        let rr = Some(r);
        let d = self.differential(r, p, q)?;
        let (pt, qt) = d.target;
        let e_s = self.e(p, q)?;
        let e_t = self.e(pt, qt)?;
        let z_t = self.z_r(r, pt, qt)?;
        let b_t = self.b_r(r, pt, qt)?;
        let in_z = d.matrix.columns().iter().all(|c| e_t.contains(&z_t, c));
        report.record(in_z, "d^r lands in Z^r", rr, at, || format!("target ({},{})", pt, qt));
        let b_s = self.b_r(r, p, q)?;
        let kills_b = b_s
            .gens
            .columns()
            .iter()
            .all(|b| d.apply(&e_s, b).is_some_and(|v| e_t.contains(&b_t, &v)));
        report.record(kills_b, "d^r maps B^r into B^r", rr, at, String::new);
        let ker = self.kernel_of(&d, &d.matrix)?;
        let z_next = self.z_r(r + 1, p, q)?;
        report.record(e_s.subgroups_equal(&ker, &z_next), "ker d^r = Z^{r+1}", rr, at, || {
            format!("ker {} vs Z {}", e_s.quotient(&ker, &b_s).map(|g| g.invariants().to_string()).unwrap_or_default(),
                e_s.quotient(&z_next, &b_s).map(|g| g.invariants().to_string()).unwrap_or_default())
        });
        let im = e_t.sum(&Subgroup::new(d.matrix.clone()), &b_t);
        let b_next = self.b_r(r + 1, pt, qt)?;
        report.record(e_t.subgroups_equal(&im, &b_next), "im d^r + B^r = B^{r+1}", rr, (pt, qt), String::new);
        if pt - r as i64 >= 0 && qt >= 0 && self.max_page(pt - r as i64, qt + r as i64 - 1) >= r {
            let d2 = self.differential(r, pt, qt)?;
            let (p2, q2) = d2.target;
            let e_2 = self.e(p2, q2)?;
            let b_2 = self.b_r(r, p2, q2)?;
            let square_zero = d
                .matrix
                .columns()
                .iter()
                .all(|v| d2.apply(&e_t, v).is_some_and(|w| e_2.contains(&b_2, &w)));
            report.record(square_zero, "d^r ∘ d^r = 0", rr, at, String::new);
        }
        if r == 1 {
            let jk = self.j(pt, qt)?.mul(&self.k(p, q)?)?;
            let direct = jk.mul(&d.z.gens)?;
            let same = d
                .matrix
                .columns()
                .iter()
                .zip(direct.columns())
                .all(|(a, b)| e_t.equal(a, &b));
            report.record(same, "d^1 = j ∘ k", rr, at, String::new);
        }
        Ok(report)
    }

    /// Compares `E^{r+1}` with the homology of `(E^r, d^r)` at every `q ≥ 1`
    /// node. `overrides` replaces differential matrices by source bidegree.
    pub fn homology_step_check(&self, r: usize, overrides: &BTreeMap<Coord, IntMatrix>) -> Result<CheckReport, SpecError> {
        let nodes: Vec<Coord> = self
            .e_support()
            .into_iter()
            .filter(|&(p, q)| q >= 1 && self.max_page(p, q) > r)
            .collect();
        let parts = nodes
            .par_iter()
            .map(|&(p, q)| self.homology_step_at(r, p, q, overrides))
            .collect::<Result<Vec<_>, SpecError>>()?;
        let mut report = CheckReport::default();
        for part in parts {
            report.merge(part);
        }
        Ok(report)
    }

    fn differential_with(&self, r: usize, p: i64, q: i64, overrides: &BTreeMap<Coord, IntMatrix>) -> Result<(Differential, IntMatrix), SpecError> {
        let d = self.differential(r, p, q)?;
        let m = match overrides.get(&(p, q)) {
            Some(m) if m.rows() != d.matrix.rows() || m.cols() != d.matrix.cols() => {
                return Err(shape_error("override", (p, q), m, d.matrix.rows(), d.matrix.cols()))
            }
            Some(m) => m.clone(),
            None => d.matrix.clone(),
        };
        Ok((d, m))
    }

    fn homology_step_at(&self, r: usize, p: i64, q: i64, overrides: &BTreeMap<Coord, IntMatrix>) -> Result<CheckReport, SpecError> {
        let mut report = CheckReport::default();
        let e_s = self.e(p, q)?;
        let (out, out_m) = self.differential_with(r, p, q, overrides)?;
        let ker = self.kernel_of(&out, &out_m)?;
        let b_s = self.b_r(r, p, q)?;
        let (ps, qs) = (p + r as i64, q - r as i64 + 1);
        let incoming = if qs >= 0 && self.e(ps, qs)?.gens > 0 {
            Subgroup::new(self.differential_with(r, ps, qs, overrides)?.1)
        } else {
            e_s.trivial_subgroup()
        };
        let small = e_s.sum(&incoming, &b_s);
        report.record(e_s.is_subgroup_of(&small, &ker), "im d^r ⊆ ker d^r", Some(r), (p, q), String::new);
        let h = e_s.quotient(&ker, &small)?.invariants();
        let next = e_s.quotient(&self.z_r(r + 1, p, q)?, &self.b_r(r + 1, p, q)?)?.invariants();
        report.record(h == next, "E^{r+1} = H(E^r, d^r)", Some(r), (p, q), || format!("H = {}, E^{{r+1}} = {}", h, next));
        Ok(report)
    }

    /// `Z^∞/B^∞ ≅ F_{p,q}/F_{p-1,q+1}` through the comparison map, for
    /// `p, q ≥ 0` with `p + q ≥ 2` inside the support's bounding box.
    pub fn convergence_check(&self) -> Result<(CheckReport, Vec<ConvergenceEntry>), SpecError> {
        self.convergence_check_from(2)
    }

    /// As [`GroupCouple::convergence_check`], starting at total degree `min_total`.
    pub fn convergence_check_from(&self, min_total: i64) -> Result<(CheckReport, Vec<ConvergenceEntry>), SpecError> {
        let support: Vec<Coord> = self.e_support().into_iter().filter(|&(_, q)| q >= 0).collect();
        let Some(pe) = support.iter().map(|c| c.0).max() else {
            return Ok((CheckReport::default(), Vec::new()));
        };
        let qe = support.iter().map(|c| c.1).max().unwrap_or(0);
        let coords: Vec<Coord> = (0..=pe)
            .flat_map(|p| (0..=qe).map(move |q| (p, q)))
            .filter(|&(p, q)| p + q >= min_total && self.window.contains(p + q + 1, -1))
            .collect();
        let parts = coords
            .par_iter()
            .map(|&(p, q)| self.convergence_at(p, q))
            .collect::<Result<Vec<_>, SpecError>>()?;
        let mut report = CheckReport::default();
        let mut entries = Vec::new();
        for (part, entry) in parts {
            report.merge(part);
            entries.extend(entry);
        }
        Ok((report, entries))
    }

    fn convergence_at(&self, p: i64, q: i64) -> Result<(CheckReport, Option<ConvergenceEntry>), SpecError> {
        let mut report = CheckReport::default();
        let at = (p, q);
        let top = self.max_page(p, q);
        let e = self.e(p, q)?;
        if top < 2 {
            report.record(false, "window admits pages", None, at, || "window too small".into());
            return Ok((report, None));
        }
        let zs = (1..=top).map(|r| self.z_r(r, p, q)).collect::<Result<Vec<_>, _>>()?;
        let bs = (1..=top).map(|r| self.b_r(r, p, q)).collect::<Result<Vec<_>, _>>()?;
        let stable_from = |tower: &[Subgroup]| {
            let last = &tower[tower.len() - 1];
            let mut r0 = tower.len();
            while r0 > 1 && e.subgroups_equal(&tower[r0 - 2], last) {
                r0 -= 1;
            }
            r0
        };
        let (z_at, b_at) = (stable_from(&zs), stable_from(&bs));
        let stabilized = z_at < top && b_at < top;
        report.record(stabilized, "towers stabilize", None, at, || format!("Z from {}, B from {}, window {}", z_at, b_at, top));
        let (z_inf, b_inf) = (&zs[top - 1], &bs[top - 1]);

        let n = p + q;
        let d_top = self.d(n + 1, -1)?;
        let dpq = self.d(p, q)?;
        let f_high = image(&self.i_power(p, q, (q + 1) as usize)?, &dpq.whole())?;
        let f_low = image(&self.i_power(p - 1, q + 1, (q + 2) as usize)?, &self.d(p - 1, q + 1)?.whole())?;
        let push = self.i_power(p, q, (q + 1) as usize)?;
        let j = self.j(p, q)?;
        let mut columns = Vec::new();
        for zc in z_inf.gens.columns() {
            let Some(x) = solve_modulo(&j, &e, &zc) else {
                report.record(false, "Z^∞ ⊆ im j", None, at, String::new);
                return Ok((report, None));
            };
            columns.push(push.mul_vec(&x)?);
        }
        let phi = IntMatrix::from_columns(d_top.gens, &columns);
        let ambiguity = kernel(&j, &dpq, &e)?;
        let well_defined = ambiguity
            .gens
            .columns()
            .iter()
            .all(|x| push.mul_vec(x).is_ok_and(|y| d_top.contains(&f_low, &y)));
        report.record(well_defined, "comparison map well defined", None, at, String::new);
        let c = preimage(&phi, &PresentedGroup::free(z_inf.gens.cols()), &d_top, &f_low)?;
        let ker = Subgroup::new(z_inf.gens.mul(&c.gens)?);
        report.record(e.subgroups_equal(&ker, b_inf), "kernel is B^∞", None, at, String::new);
        let reached = d_top.sum(&Subgroup::new(phi), &f_low);
        report.record(d_top.subgroups_equal(&reached, &d_top.sum(&f_high, &f_low)), "onto F_{p,q}/F_{p-1,q+1}", None, at, String::new);
        report.record(d_top.is_subgroup_of(&f_low, &f_high), "F_{p-1,q+1} ⊆ F_{p,q}", None, at, String::new);
        let e_infinity = e.quotient(z_inf, b_inf)?.invariants();
        let graded = d_top.quotient(&f_high, &f_low)?.invariants();
        report.record(e_infinity == graded, "E^∞ ≅ graded piece", None, at, || format!("{} vs {}", e_infinity, graded));
        Ok((report, Some(ConvergenceEntry { p, q, e_infinity, graded, z_stable_at: z_at, b_stable_at: b_at })))
    }

    pub(crate) fn parts(&self) -> (&BTreeMap<Coord, PresentedGroup>, &BTreeMap<Coord, PresentedGroup>) {
        (&self.d, &self.e)
    }
}
