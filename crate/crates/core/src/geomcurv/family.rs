//! Metric families `h(x,t)` with a warping function `f(x,t)`, their text
//! format, and the metrics built from them.
//!
//! ```text
//! d = 2
//! n = 1
//! h[1][1] = "exp(2*t1)"
//! h[2][2] = "exp(2*t1)"
//! f = "1"
//! domain x1 in [-1, 1]
//! domain x2 in [-1, 1]
//! domain t1 in [0, 1]
//! margin = 0.05
//! seed = 7
//! ```
//!
//! Unlisted off-diagonal entries are zero; `h[j][i]` defaults to `h[i][j]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tensor::MetricField;
use super::CurvError;
use crate::exprparse::{parse, Expr, Point, Scalar};

/// One line of a `key = value` fixture file.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Entry {
    Assign { key: String, value: Value, line: usize, col: usize },
    Domain { var: String, lo: f64, hi: f64, line: usize, col: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Value {
    Quoted(String, usize),
    Number(f64),
}

pub(crate) fn format_err(line: usize, col: usize, message: impl Into<String>) -> CurvError {
    CurvError::Format { line, col, message: message.into() }
}

/// Splits a fixture file into entries, with 1-based positions.
pub(crate) fn read_entries(text: &str) -> Result<Vec<Entry>, CurvError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(p) if !raw[..p].contains('"') => &raw[..p],
            _ => raw,
        };
        let lead = content.len() - content.trim_start().len();
        let body = content.trim();
        if body.is_empty() {
            continue;
        }
        let col = lead + 1;
        if let Some(rest) = body.strip_prefix("domain ") {
            let (var, range) =
                rest.split_once(" in ").ok_or_else(|| format_err(line, col, "expected 'domain VAR in [a, b]'"))?;
            let range_col = col + body.len() - range.trim_start().len();
            let inner = range
                .trim()
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| format_err(line, range_col, "expected '[a, b]'"))?;
            let (a, b) = inner.split_once(',').ok_or_else(|| format_err(line, range_col, "expected '[a, b]'"))?;
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format_err(line, range_col, format!("bad number '{}'", s.trim())));
            let (lo, hi) = (num(a)?, num(b)?);
            if !(lo < hi) {
                return Err(format_err(line, range_col, "empty interval"));
            }
            out.push(Entry::Domain { var: var.trim().to_string(), lo, hi, line, col });
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| format_err(line, col, "expected 'key = value'"))?;
        let vtext = value.trim();
        let vcol = col + key.len() + 1 + (value.len() - value.trim_start().len());
        let value = if let Some(q) = vtext.strip_prefix('"') {
            let s = q.strip_suffix('"').ok_or_else(|| format_err(line, vcol, "unterminated string"))?;
            Value::Quoted(s.to_string(), vcol + 1)
        } else {
            Value::Number(vtext.parse::<f64>().map_err(|_| format_err(line, vcol, format!("bad number '{}'", vtext)))?)
        };
        out.push(Entry::Assign { key: key.trim().to_string(), value, line, col });
    }
    Ok(out)
}

pub(crate) fn parse_quoted(s: &str, line: usize, col: usize) -> Result<Expr, CurvError> {
    parse(s).map_err(|e| format_err(line, col + e.offset, e.message))
}

pub(crate) fn as_count(value: &Value, line: usize, col: usize) -> Result<usize, CurvError> {
    match value {
        Value::Number(v) if v.fract() == 0.0 && *v >= 0.0 => Ok(*v as usize),
        _ => Err(format_err(line, col, "expected a nonnegative integer")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricFamily {
    pub d: usize,
    pub n: usize,
    /// Row-major `d × d`, symmetric.
    pub h: Vec<Expr>,
    pub f: Expr,
    pub x_domain: Vec<(f64, f64)>,
    pub t_domain: Vec<(f64, f64)>,
    pub margin: f64,
    pub seed: u64,
}

impl MetricFamily {
    pub fn parse(text: &str) -> Result<Self, CurvError> {
        let entries = read_entries(text)?;
        let mut d = None;
        let mut n = None;
        let mut margin = 0.05;
        let mut seed = 0u64;
        let mut f = None;
        let mut raw_h: Vec<((usize, usize), Expr, usize, usize)> = Vec::new();
        let mut domains: Vec<(String, f64, f64, usize, usize)> = Vec::new();
        for e in &entries {
            match e {
                Entry::Domain { var, lo, hi, line, col } => domains.push((var.clone(), *lo, *hi, *line, *col)),
                Entry::Assign { key, value, line, col } => {
                    let (line, col) = (*line, *col);
                    match (key.as_str(), value) {
                        ("d", v) => d = Some(as_count(v, line, col)?),
                        ("n", v) => n = Some(as_count(v, line, col)?),
                        ("seed", v) => seed = as_count(v, line, col)? as u64,
                        ("margin", Value::Number(m)) if *m >= 0.0 => margin = *m,
                        ("f", Value::Quoted(s, c)) => f = Some(parse_quoted(s, line, *c)?),
                        (k, Value::Quoted(s, c)) if k.starts_with("h[") => {
                            let idx = parse_index(k).ok_or_else(|| format_err(line, col, format!("bad entry name '{}'", k)))?;
                            raw_h.push((idx, parse_quoted(s, line, *c)?, line, col));
                        }
                        (k, _) => return Err(format_err(line, col, format!("unexpected key '{}'", k))),
                    }
                }
            }
        }
        let d = d.ok_or_else(|| format_err(1, 1, "missing 'd'"))?;
        let n = n.ok_or_else(|| format_err(1, 1, "missing 'n'"))?;
        if d == 0 {
            return Err(format_err(1, 1, "d must be positive"));
        }
        let mut h: Vec<Option<Expr>> = vec![None; d * d];
        let mut explicit = vec![false; d * d];
        for ((i, j), expr, line, col) in raw_h {
            if i == 0 || j == 0 || i > d || j > d {
                return Err(format_err(line, col, format!("index out of range for d = {}", d)));
            }
            let (a, b) = (i - 1, j - 1);
            if explicit[a * d + b] {
                return Err(format_err(line, col, "duplicate entry"));
            }
            if explicit[b * d + a] && h[b * d + a].as_ref() != Some(&expr) {
                return Err(format_err(line, col, "entry is not symmetric"));
            }
            explicit[a * d + b] = true;
            h[a * d + b] = Some(expr.clone());
            h[b * d + a] = Some(expr);
        }
        for i in 0..d {
            if h[i * d + i].is_none() {
                return Err(format_err(1, 1, format!("missing diagonal entry h[{}][{}]", i + 1, i + 1)));
            }
        }
        let h: Vec<Expr> = h.into_iter().map(|e| e.unwrap_or(Expr::Num(0.0))).collect();
        let f = f.unwrap_or(Expr::Num(1.0));
        let mut x_domain = vec![None; d];
        let mut t_domain = vec![None; n];
        for (var, lo, hi, line, col) in domains {
            let slot = match parse(&var) {
                Ok(Expr::Var(crate::exprparse::Var::X(k))) if k <= d => &mut x_domain[k - 1],
                Ok(Expr::Var(crate::exprparse::Var::T(k))) if k <= n => &mut t_domain[k - 1],
                _ => return Err(format_err(line, col, format!("unknown domain variable '{}'", var))),
            };
            if hi - lo <= 2.0 * margin {
                return Err(format_err(line, col, "interval shorter than twice the margin"));
            }
            *slot = Some((lo, hi));
        }
        let collect = |v: Vec<Option<(f64, f64)>>, name: &str| {
            v.into_iter()
                .enumerate()
                .map(|(k, r)| r.ok_or_else(|| format_err(1, 1, format!("missing domain for {}{}", name, k + 1))))
                .collect::<Result<Vec<_>, _>>()
        };
        let fam = MetricFamily {
            d,
            n,
            h,
            f,
            x_domain: collect(x_domain, "x")?,
            t_domain: collect(t_domain, "t")?,
            margin,
            seed,
        };
        for e in fam.h.iter().chain(std::iter::once(&fam.f)) {
            let (mx, mt) = e.max_indices();
            if mx > d || mt > n {
                return Err(format_err(1, 1, format!("expression '{}' uses variables beyond d = {}, n = {}", e, d, n)));
            }
        }
        Ok(fam)
    }

    pub fn h_entries<S: Scalar>(&self, x: &[S], t: &[S]) -> Result<Vec<S>, CurvError> {
        let at = Point::new(x, t);
        self.h.iter().map(|e| e.eval(at).map_err(CurvError::from)).collect()
    }

    pub fn warp<S: Scalar>(&self, x: &[S], t: &[S]) -> Result<S, CurvError> {
        Ok(self.f.eval(Point::new(x, t))?)
    }

    /// `k` points `(x, t)` drawn uniformly from the domain shrunk by the margin.
    pub fn samples(&self, k: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = self.margin;
        (0..k)
            .map(|_| self.x_domain.iter().chain(&self.t_domain).map(|&(lo, hi)| rng.gen_range(lo + m..=hi - m)).collect())
            .collect()
    }

    /// Whether `f` is identically one as an expression.
    pub fn unit_warp(&self) -> bool {
        self.f == Expr::Num(1.0)
    }

    /// Whether `f` depends on `t` only.
    pub fn warp_depends_on_t_only(&self) -> bool {
        self.f.max_indices().0 == 0
    }

    pub fn split<'a, S>(&self, y: &'a [S]) -> (&'a [S], &'a [S]) {
        y.split_at(self.d)
    }
}

fn parse_index(key: &str) -> Option<(usize, usize)> {
    let rest = key.strip_prefix("h[")?;
    let (i, rest) = rest.split_once("][")?;
    let j = rest.strip_suffix(']')?;
    Some((i.trim().parse().ok()?, j.trim().parse().ok()?))
}

/// `c·h(x, t/R) + f(x, t/R)² dt²` on `ℝ^{d+1}`, for families with `n = 1`.
#[derive(Debug, Clone, Copy)]
pub struct WarpedMetric<'a> {
    pub fam: &'a MetricFamily,
    pub t_scale: f64,
    pub slice_factor: f64,
}

impl<'a> WarpedMetric<'a> {
    pub fn new(fam: &'a MetricFamily) -> Self {
        WarpedMetric { fam, t_scale: 1.0, slice_factor: 1.0 }
    }
}

impl MetricField for WarpedMetric<'_> {
    fn dim(&self) -> usize {
        self.fam.d + 1
    }

    fn entries<S: Scalar>(&self, y: &[S]) -> Result<Vec<S>, CurvError> {
        let d = self.fam.d;
        let (x, t) = self.fam.split(y);
        let s: Vec<S> = t.iter().map(|&v| v.scale(1.0 / self.t_scale)).collect();
        let h = self.fam.h_entries(x, &s)?;
        let f = self.fam.warp(x, &s)?;
        let mut out = vec![S::constant(0.0); (d + 1) * (d + 1)];
        for i in 0..d {
            for j in 0..d {
                out[i * (d + 1) + j] = h[i * d + j].scale(self.slice_factor);
            }
        }
        out[(d + 1) * (d + 1) - 1] = f * f;
        Ok(out)
    }
}

/// `h(x,t) + Σ dt_j²` on `ℝ^{d+n}`.
#[derive(Debug, Clone, Copy)]
pub struct SuspensionMetric<'a> {
    pub fam: &'a MetricFamily,
}

impl MetricField for SuspensionMetric<'_> {
    fn dim(&self) -> usize {
        self.fam.d + self.fam.n
    }

    fn entries<S: Scalar>(&self, y: &[S]) -> Result<Vec<S>, CurvError> {
        let (d, n) = (self.fam.d, self.dim());
        let (x, t) = self.fam.split(y);
        let h = self.fam.h_entries(x, t)?;
        let mut out = vec![S::constant(0.0); n * n];
        for i in 0..d {
            for j in 0..d {
                out[i * n + j] = h[i * d + j];
            }
        }
        for k in d..n {
            out[k * n + k] = S::constant(1.0);
        }
        Ok(out)
    }
}

/// The slice `h(·, t)` on `ℝ^d`.
#[derive(Debug, Clone)]
pub struct SliceMetric<'a> {
    pub fam: &'a MetricFamily,
    pub t: Vec<f64>,
}

impl MetricField for SliceMetric<'_> {
    fn dim(&self) -> usize {
        self.fam.d
    }

    fn entries<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>, CurvError> {
        let t: Vec<S> = self.t.iter().map(|&v| S::constant(v)).collect();
        self.fam.h_entries(x, &t)
    }
}

/// A metric given entrywise by expressions in `x1..xN`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprMetric {
    pub n: usize,
    pub entries: Vec<Expr>,
}

impl ExprMetric {
    pub fn new(n: usize, entries: Vec<Expr>) -> Result<Self, CurvError> {
        if entries.len() != n * n {
            return Err(CurvError::Precondition(format!("expected {} entries, got {}", n * n, entries.len())));
        }
        for i in 0..n {
            for j in 0..i {
                if entries[i * n + j] != entries[j * n + i] {
                    return Err(CurvError::Precondition(format!("entries ({},{}) and ({},{}) differ", i + 1, j + 1, j + 1, i + 1)));
                }
            }
        }
        Ok(ExprMetric { n, entries })
    }

    /// Parses entries given as strings.
    pub fn from_strs(n: usize, entries: &[&str]) -> Result<Self, CurvError> {
        let parsed = entries
            .iter()
            .map(|s| parse(s).map_err(|e| CurvError::Precondition(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        ExprMetric::new(n, parsed)
    }
}

impl MetricField for ExprMetric {
    fn dim(&self) -> usize {
        self.n
    }

    fn entries<S: Scalar>(&self, y: &[S]) -> Result<Vec<S>, CurvError> {
        let at = Point::new(y, &[]);
        self.entries.iter().map(|e| e.eval(at).map_err(CurvError::from)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HYPERBOLIC: &str = "d = 2\nn = 1\nh[1][1] = \"exp(2*t1)\"\nh[2][2] = \"exp(2*t1)\"\nf = \"1\"\n\
        domain x1 in [-1, 1]\ndomain x2 in [-1, 1]\ndomain t1 in [0, 1]\nmargin = 0.05\nseed = 3\n";

    #[test]
    fn parses_family() {
        let fam = MetricFamily::parse(HYPERBOLIC).unwrap();
        assert_eq!((fam.d, fam.n, fam.seed), (2, 1, 3));
        assert_eq!(fam.h[1], Expr::Num(0.0));
        let s = fam.samples(5, 1);
        assert!(s.iter().all(|y| y.len() == 3 && y[2] >= 0.05 && y[2] <= 0.95));
    }

    #[test]
    fn reports_positions() {
        let bad = HYPERBOLIC.replace("exp(2*t1)\"\nh[2]", "exp(2*)\"\nh[2]");
        match MetricFamily::parse(&bad) {
            Err(CurvError::Format { line, col, .. }) => assert_eq!((line, col), (3, 18)),
            other => panic!("{:?}", other),
        }
        match MetricFamily::parse("d = 2\nn = 1\nh[1][1] = \"1\"\nh[2][2] = \"1\"\ndomain y1 in [0, 1]\n") {
            Err(CurvError::Format { line, .. }) => assert_eq!(line, 5),
            other => panic!("{:?}", other),
        }
    }
}
