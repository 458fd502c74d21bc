//! Line-based text format for cubical sets and maps.
//!
//! ```text
//! # the minimal circle
//! dim 0: v
//! dim 1: e
//! face e 1 - = v
//! face e 1 + = v
//! ```
//!
//! `face g i ± = h[s i1 i2 ...]` sets `∂_i^± g = σ_{i1} σ_{i2} … h`. A file may
//! hold several sets, each opened by `set NAME`; `map f: g -> h[s ...]` lines
//! assign generators of the first set to cubes of the second (or of the only
//! set). `trunc N` declares that the set is only known up to dimension `N`.

use std::collections::BTreeMap;

use super::{slot_face, Cube, CubeError, CubicalMap, CubicalSet, CubicalSetBuilder};
use crate::boxcat::Sign;

#[derive(Debug, Clone)]
pub struct CubicalFile {
    pub sets: Vec<(String, CubicalSet)>,
    pub maps: Vec<(String, CubicalMap)>,
}

#[derive(Default)]
struct PendingSet {
    name: String,
    trunc: Option<usize>,
    decls: Vec<(usize, String, usize, usize)>,
    faces: Vec<(String, usize, Sign, String, usize, usize)>,
}

struct PendingMap {
    name: String,
    entries: Vec<(String, String, usize, usize)>,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> CubeError {
    CubeError::Parse { line, column, message: message.into() }
}

/// Splits a line into tokens with their 1-based byte columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

/// Parses `name` or `name[s i1 i2 ...]` into a generator name and word.
pub fn parse_cube_syntax(text: &str) -> Result<(String, Vec<usize>), String> {
    let text = text.trim();
    let Some(open) = text.find('[') else {
        if text.is_empty() || text.contains(']') {
            return Err(format!("malformed cube `{}`", text));
        }
        return Ok((text.to_string(), Vec::new()));
    };
    let name = &text[..open];
    let rest = &text[open + 1..];
    let inner = rest
        .strip_suffix(']')
        .ok_or_else(|| format!("missing `]` in `{}`", text))?;
    let mut parts = inner.split_whitespace();
    if parts.next() != Some("s") {
        return Err(format!("degeneracy list must start with `s` in `{}`", text));
    }
    let word = parts
        .map(|p| p.parse::<usize>().map_err(|_| format!("bad degeneracy index `{}`", p)))
        .collect::<Result<Vec<_>, _>>()?;
    if name.is_empty() {
        return Err(format!("missing generator name in `{}`", text));
    }
    Ok((name.to_string(), word))
}

fn finish_set(p: PendingSet) -> Result<(String, CubicalSet), CubeError> {
    let mut b = CubicalSetBuilder::new();
    for (dim, name, line, col) in &p.decls {
        b.add_generator(*dim, name).map_err(|e| err(*line, *col, e.to_string()))?;
    }
    for (gname, i, sign, cube_text, line, col) in &p.faces {
        let g = b
            .find(gname)
            .ok_or_else(|| err(*line, *col, format!("unknown generator `{}`", gname)))?;
        let (hname, word) = parse_cube_syntax(cube_text).map_err(|m| err(*line, *col, m))?;
        let h = b
            .find(&hname)
            .ok_or_else(|| err(*line, *col, format!("unknown generator `{}`", hname)))?;
        let cube = Cube::generator(h)
            .degenerate_word(&word)
            .map_err(|e| err(*line, *col, e.to_string()))?;
        b.set_face(g, *i, *sign, cube).map_err(|e| err(*line, *col, e.to_string()))?;
    }
    let finite = p.trunc.is_none();
    let set = b.build(p.trunc, finite)?;
    Ok((p.name, set))
}

pub fn parse(text: &str) -> Result<CubicalFile, CubeError> {
    let mut sets = Vec::new();
    let mut current = PendingSet { name: "X".to_string(), ..Default::default() };
    let mut started = false;
    let mut maps: Vec<PendingMap> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("");
        let toks = tokens(line);
        let Some(&(col, head)) = toks.first() else { continue };
        match head {
            "set" => {
                let &(_, name) = toks.get(1).ok_or_else(|| err(line_no, col, "expected a set name"))?;
                if started || !current.decls.is_empty() {
                    sets.push(std::mem::take(&mut current));
                }
                current.name = name.to_string();
                started = true;
            }
            "trunc" => {
                let &(c, n) = toks.get(1).ok_or_else(|| err(line_no, col, "expected a dimension"))?;
                current.trunc = Some(n.parse().map_err(|_| err(line_no, c, "expected a dimension"))?);
            }
            "dim" => {
                let &(c, k) = toks.get(1).ok_or_else(|| err(line_no, col, "expected `dim k:`"))?;
                let k = k
                    .strip_suffix(':')
                    .ok_or_else(|| err(line_no, c, "expected `:` after the dimension"))?;
                let dim: usize = k.parse().map_err(|_| err(line_no, c, "expected a dimension"))?;
                for &(c, name) in &toks[2..] {
                    current.decls.push((dim, name.to_string(), line_no, c));
                }
            }
            "face" => {
                if toks.len() < 6 || toks[4].1 != "=" {
                    return Err(err(line_no, col, "expected `face g i +|- = cube`"));
                }
                let i: usize = toks[2].1.parse().map_err(|_| err(line_no, toks[2].0, "expected a face index"))?;
                let sign = match toks[3].1 {
                    "+" => Sign::Plus,
                    "-" => Sign::Minus,
                    _ => return Err(err(line_no, toks[3].0, "expected `+` or `-`")),
                };
                let start = toks[5].0 - 1;
                current.faces.push((
                    toks[1].1.to_string(),
                    i,
                    sign,
                    line[start..].trim().to_string(),
                    line_no,
                    toks[5].0,
                ));
            }
            "map" => {
                if toks.len() < 5 || toks[3].1 != "->" {
                    return Err(err(line_no, col, "expected `map f: g -> cube`"));
                }
                let name = toks[1]
                    .1
                    .strip_suffix(':')
                    .ok_or_else(|| err(line_no, toks[1].0, "expected `:` after the map name"))?;
                let start = toks[4].0 - 1;
                let entry = (toks[2].1.to_string(), line[start..].trim().to_string(), line_no, toks[4].0);
                match maps.iter_mut().find(|m| m.name == name) {
                    Some(m) => m.entries.push(entry),
                    None => maps.push(PendingMap { name: name.to_string(), entries: vec![entry] }),
                }
            }
            other => return Err(err(line_no, col, format!("unknown directive `{}`", other))),
        }
    }
    sets.push(current);
    let sets = sets.into_iter().map(finish_set).collect::<Result<Vec<_>, _>>()?;
    let mut out_maps = Vec::new();
    for m in maps {
        let (src, tgt) = match sets.len() {
            1 => (&sets[0].1, &sets[0].1),
            _ => (&sets[0].1, &sets[1].1),
        };
        let mut assigned: BTreeMap<(usize, usize), Cube> = BTreeMap::new();
        for (gname, cube_text, line, col) in &m.entries {
            let g = src
                .find(gname)
                .ok_or_else(|| err(*line, *col, format!("unknown source generator `{}`", gname)))?;
            let (hname, word) = parse_cube_syntax(cube_text).map_err(|msg| err(*line, *col, msg))?;
            let cube = tgt.cube_from_name(&hname, &word).map_err(|e| err(*line, *col, e.to_string()))?;
            assigned.insert((g.dim, g.idx), cube);
        }
        let mut assignment = Vec::new();
        for d in 0..=src.max_generator_dim() {
            let mut row = Vec::new();
            for g in src.generators(d) {
                row.push(
                    assigned
                        .remove(&(g.dim, g.idx))
                        .ok_or_else(|| CubeError::UnknownGenerator(format!("{} (unmapped)", src.name(g))))?,
                );
            }
            assignment.push(row);
        }
        out_maps.push((m.name, CubicalMap::new(src.clone(), tgt.clone(), assignment)?));
    }
    Ok(CubicalFile { sets, maps: out_maps })
}

/// Parses a file that must contain exactly one set.
pub fn parse_single(text: &str) -> Result<CubicalSet, CubeError> {
    let mut file = parse(text)?;
    if file.sets.len() != 1 {
        return Err(err(1, 1, format!("expected one set, found {}", file.sets.len())));
    }
    Ok(file.sets.remove(0).1)
}

pub fn to_text(x: &CubicalSet) -> String {
    let mut out = String::new();
    if !x.is_finite() {
        out.push_str(&format!("trunc {}\n", x.trunc_dim()));
    }
    for d in 0..=x.max_generator_dim() {
        if x.generator_count(d) == 0 {
            continue;
        }
        let names: Vec<&str> = x.generators(d).map(|g| x.name(g)).collect();
        out.push_str(&format!("dim {}: {}\n", d, names.join(" ")));
    }
    for g in x.all_generators() {
        for slot in 0..2 * g.dim {
            let (i, sign) = slot_face(slot);
            let f = x.generator_face(g, i, sign);
            out.push_str(&format!("face {} {} {} = {}\n", x.name(g), i, sign.symbol(), x.display_cube(f)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubset::standard_cube;

    const CIRCLE: &str = "# minimal circle\ndim 0: v\ndim 1: e\nface e 1 - = v\nface e 1 + = v\n";

    #[test]
    fn parses_circle() {
        let x = parse_single(CIRCLE).unwrap();
        assert_eq!(x.generator_count(1), 1);
        assert!(x.validate().is_empty());
    }

    #[test]
    fn round_trip() {
        let x = standard_cube(3);
        let y = parse_single(&to_text(&x)).unwrap();
        assert_eq!(to_text(&x), to_text(&y));
    }

    #[test]
    fn degenerate_face_syntax() {
        let text = "dim 0: v\ndim 1: e\ndim 2: q\nface e 1 - = v\nface e 1 + = v\n\
                    face q 1 - = v[s 1]\nface q 1 + = e\nface q 2 - = v[s 1]\nface q 2 + = v[s 1]\n";
        let x = parse_single(text).unwrap();
        let q = x.find("q").unwrap();
        assert!(x.generator_face(q, 1, Sign::Minus).is_degenerate());
    }

    #[test]
    fn positioned_errors() {
        let e = parse_single("dim 0: v\nface v 1 ? = v\n").unwrap_err();
        assert_eq!(e, CubeError::Parse { line: 2, column: 10, message: "expected `+` or `-`".into() });
        assert!(matches!(parse_single("dim 0: v\ndim 1: e\nface e 1 - = w\n"), Err(CubeError::Parse { line: 3, .. })));
        assert!(matches!(parse_single("bogus\n"), Err(CubeError::Parse { line: 1, column: 1, .. })));
    }

    #[test]
    fn maps_between_sets() {
        let text = "set E\ndim 0: a b\nset B\ndim 0: p\nmap f: a -> p\nmap f: b -> p\n";
        let file = parse(text).unwrap();
        assert_eq!(file.sets.len(), 2);
        let (_, f) = &file.maps[0];
        assert!(f.validate().is_empty());
    }
}
