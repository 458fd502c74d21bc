//! Exact integer linear algebra: matrices over `ℤ`, Smith normal form,
//! presented abelian groups, and chain-complex homology.

mod group;
mod homology;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use group::{
    image, kernel, lattice_contains, preimage, solve_in_subgroup, solve_modulo, AbelianInvariants, PresentedGroup,
    Subgroup,
};
pub use homology::{cubical_chain_complex, ChainComplex, Homology};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZError {
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
    #[error("not a chain complex: ∂_{degree} ∘ ∂_{next} ≠ 0", next = .degree + 1)]
    NotComplex { degree: usize },
    #[error("element is not in the image")]
    NotInImage,
    #[error("group is infinite")]
    Infinite,
}

/// A dense matrix of arbitrary-precision integers, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{:?}", self.to_rows())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Copy>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        Self::from_rows_with_cols(rows, c).unwrap_or_else(|_| panic!("ragged rows ({} rows)", r))
    }

    /// Like [`IntMatrix::from_rows`] but with an explicit column count, so that
    /// matrices with zero rows keep their width.
    pub fn from_rows_with_cols<T: Into<BigInt> + Copy>(rows: &[Vec<T>], cols: usize) -> Result<Self, ZError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(ZError::Shape(format!("row of length {} in a {}-column matrix", row.len(), cols)));
            }
            data.extend(row.iter().map(|&x| x.into()));
        }
        Ok(IntMatrix { rows: rows.len(), cols, data })
    }

    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (r, x) in col.iter().enumerate() {
                m[(r, c)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.data[r * self.cols..(r + 1) * self.cols].to_vec()).collect()
    }

    /// Entries as `i64`, if they all fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        self.to_rows()
            .into_iter()
            .map(|row| row.iter().map(ToPrimitive::to_i64).collect())
            .collect()
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn select_columns(&self, range: std::ops::Range<usize>) -> Self {
        let cols: Vec<Vec<BigInt>> = range.map(|c| self.column(c)).collect();
        Self::from_columns(self.rows, &cols)
    }

    pub fn select_rows(&self, range: std::ops::Range<usize>) -> Self {
        let rows: Vec<Vec<BigInt>> = range.map(|r| self.data[r * self.cols..(r + 1) * self.cols].to_vec()).collect();
        let mut m = Self::zeros(rows.len(), self.cols);
        for (r, row) in rows.into_iter().enumerate() {
            for (c, x) in row.into_iter().enumerate() {
                m[(r, c)] = x;
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, ZError> {
        if self.cols != other.rows {
            return Err(ZError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other[(k, c)];
                    if !b.is_zero() {
                        out[(r, c)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Result<Vec<BigInt>, ZError> {
        if x.len() != self.cols {
            return Err(ZError::Shape(format!("{}x{} times vector of length {}", self.rows, self.cols, x.len())));
        }
        Ok((0..self.rows)
            .map(|r| (0..self.cols).map(|c| &self[(r, c)] * &x[c]).sum())
            .collect())
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &IntMatrix) -> Result<IntMatrix, ZError> {
        if self.rows != other.rows {
            return Err(ZError::Shape(format!("hstack of {} and {} rows", self.rows, other.rows)));
        }
        let mut cols = self.columns();
        cols.extend(other.columns());
        Ok(Self::from_columns(self.rows, &cols))
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }

    /// Determinant by fraction-free elimination (square matrices only).
    pub fn determinant(&self) -> Result<BigInt, ZError> {
        if self.rows != self.cols {
            return Err(ZError::Shape("determinant of a non-square matrix".into()));
        }
        let snf = smith_normal_form(self);
        if snf.rank < self.rows {
            return Ok(BigInt::zero());
        }
        let diag: BigInt = (0..self.rows).map(|i| snf.s[(i, i)].clone()).product();
        let du = det_unimodular(&snf.u);
        let dv = det_unimodular(&snf.v);
        // U M V = S with det U, det V = ±1.
        Ok(diag * du * dv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row_a += k · row_b
    pub(crate) fn add_row(&mut self, a: usize, b: usize, k: &BigInt) {
        for c in 0..self.cols {
            let t = &self[(b, c)] * k;
            self[(a, c)] += t;
        }
    }

    /// col_a += k · col_b
    pub(crate) fn add_col(&mut self, a: usize, b: usize, k: &BigInt) {
        for r in 0..self.rows {
            let t = &self[(r, b)] * k;
            self[(r, a)] += t;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for c in 0..self.cols {
            let v = -&self[(a, c)];
            self[(a, c)] = v;
        }
    }
}

/// Determinant of a matrix known to be unimodular, by exact Bareiss elimination.
fn det_unimodular(m: &IntMatrix) -> BigInt {
    bareiss_determinant(m)
}

/// Fraction-free Gaussian elimination.
pub fn bareiss_determinant(m: &IntMatrix) -> BigInt {
    let n = m.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&r| !a[(r, k)].is_zero()) {
                Some(r) => {
                    a.swap_rows(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                a[(i, j)] = v;
            }
        }
        prev = a[(k, k)].clone();
    }
    sign * a[(n - 1, n - 1)].clone()
}

/// `U · M · V = S` with `U`, `V` unimodular and `S` diagonal with `d_1 | d_2 | …`.
#[derive(Debug, Clone)]
pub struct Snf {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    pub rank: usize,
}

impl Snf {
    /// The nonzero diagonal entries.
    pub fn invariants(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.s[(i, i)].clone()).collect()
    }

    /// Some `y` with `M y = x`, if one exists.
    pub fn solve(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let z = self.u.mul_vec(x).ok()?;
        let mut y = vec![BigInt::zero(); self.v.rows()];
        for (i, zi) in z.iter().enumerate() {
            if i < self.rank {
                let (q, r) = zi.div_rem(&self.s[(i, i)]);
                if !r.is_zero() {
                    return None;
                }
                y[i] = q;
            } else if !zi.is_zero() {
                return None;
            }
        }
        self.v.mul_vec(&y).ok()
    }

    /// A basis of the kernel lattice (saturated).
    pub fn kernel_basis(&self) -> IntMatrix {
        self.v.select_columns(self.rank..self.v.cols())
    }

    /// A left inverse of [`Snf::kernel_basis`].
    pub fn kernel_coordinates(&self) -> IntMatrix {
        self.v_inv.select_rows(self.rank..self.v_inv.rows())
    }

    /// A basis of the column lattice.
    pub fn image_basis(&self) -> IntMatrix {
        let mut b = self.u_inv.select_columns(0..self.rank);
        for c in 0..self.rank {
            let d = self.s[(c, c)].clone();
            for r in 0..b.rows() {
                b[(r, c)] *= &d;
            }
        }
        b
    }
}

fn min_nonzero(
    a: &IntMatrix,
    rows: impl Iterator<Item = usize> + Clone,
    cols: impl Iterator<Item = usize> + Clone,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for r in rows {
        for c in cols.clone() {
            let x = &a[(r, c)];
            if x.is_zero() {
                continue;
            }
            if best.map_or(true, |(br, bc)| x.abs() < a[(br, bc)].abs()) {
                best = Some((r, c));
            }
        }
    }
    best
}

pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let (rows, cols) = (m.rows, m.cols);
    let mut s = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut u_inv = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut v_inv = IntMatrix::identity(cols);

    let swap_rows = |s: &mut IntMatrix, u: &mut IntMatrix, u_inv: &mut IntMatrix, a: usize, b: usize| {
        s.swap_rows(a, b);
        u.swap_rows(a, b);
        u_inv.swap_cols(a, b);
    };
    let swap_cols = |s: &mut IntMatrix, v: &mut IntMatrix, v_inv: &mut IntMatrix, a: usize, b: usize| {
        s.swap_cols(a, b);
        v.swap_cols(a, b);
        v_inv.swap_rows(a, b);
    };
    // row_a += k row_b
    let add_row = |s: &mut IntMatrix, u: &mut IntMatrix, u_inv: &mut IntMatrix, a: usize, b: usize, k: &BigInt| {
        s.add_row(a, b, k);
        u.add_row(a, b, k);
        u_inv.add_col(b, a, &-k);
    };
    // col_a += k col_b
    let add_col = |s: &mut IntMatrix, v: &mut IntMatrix, v_inv: &mut IntMatrix, a: usize, b: usize, k: &BigInt| {
        s.add_col(a, b, k);
        v.add_col(a, b, k);
        v_inv.add_row(b, a, &-k);
    };

    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pr, pc)) = min_nonzero(&s, t..rows, t..cols) else { break };
        swap_rows(&mut s, &mut u, &mut u_inv, t, pr);
        swap_cols(&mut s, &mut v, &mut v_inv, t, pc);
        loop {
            let pivot = s[(t, t)].clone();
            for r in t + 1..rows {
                if !s[(r, t)].is_zero() {
                    let q = -(s[(r, t)].div_floor(&pivot));
                    add_row(&mut s, &mut u, &mut u_inv, r, t, &q);
                }
            }
            for c in t + 1..cols {
                if !s[(t, c)].is_zero() {
                    let q = -(s[(t, c)].div_floor(&pivot));
                    add_col(&mut s, &mut v, &mut v_inv, c, t, &q);
                }
            }
            let col_rest = min_nonzero(&s, t + 1..rows, t..t + 1);
            let row_rest = min_nonzero(&s, t..t + 1, t + 1..cols);
            match (col_rest, row_rest) {
                (Some((r, _)), _) => {
                    swap_rows(&mut s, &mut u, &mut u_inv, t, r);
                    continue;
                }
                (None, Some((_, c))) => {
                    swap_cols(&mut s, &mut v, &mut v_inv, t, c);
                    continue;
                }
                (None, None) => {}
            }
            let pivot = s[(t, t)].clone();
            let bad = (t + 1..rows).find(|&r| (t + 1..cols).any(|c| !s[(r, c)].is_multiple_of(&pivot)));
            match bad {
                Some(r) => add_row(&mut s, &mut u, &mut u_inv, t, r, &BigInt::one()),
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
            // Negating row t of U negates column t of U⁻¹.
            for r in 0..rows {
                let x = -&u_inv[(r, t)];
                u_inv[(r, t)] = x;
            }
        }
        t += 1;
    }
    let rank = t;
    Snf { u, u_inv, s, v, v_inv, rank }
}
