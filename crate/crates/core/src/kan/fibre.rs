//! Homotopy fibres and mapping path sets, presented as cubical sets.

use super::KanError;
use crate::boxcat::Sign;
use crate::cubset::{build_presentation, Cube, CubicalMap, CubicalSet, GenId, PresentationModel};

/// Deletes degenerate coordinates (given descending) from a cube.
fn delete_coordinates(x: &CubicalSet, c: &Cube, descending: &[usize]) -> Cube {
    descending
        .iter()
        .fold(c.clone(), |c, &i| x.face(&c, i, Sign::Minus).expect("coordinate in range"))
}

struct FiberModel<'a> {
    f: &'a CubicalMap,
    basepoint: GenId,
}

impl PresentationModel for FiberModel<'_> {
    type Elem = (Cube, Cube);

    fn elements(&self, n: usize) -> Vec<(Cube, Cube)> {
        let (x, k) = (&self.f.source, &self.f.target);
        let start = k.degenerate_vertex(self.basepoint, n);
        let paths = k.cubes(n + 1).expect("within truncation");
        let paths: Vec<Cube> = paths
            .into_iter()
            .filter(|p| k.face(p, 1, Sign::Minus).expect("in range") == start)
            .collect();
        let mut out = Vec::new();
        for xc in x.cubes(n).expect("within truncation") {
            let end = self.f.apply(&xc);
            for p in &paths {
                if k.face(p, 1, Sign::Plus).expect("in range") == end {
                    out.push((xc.clone(), p.clone()));
                }
            }
        }
        out
    }

    fn face(&self, (x, k): &(Cube, Cube), i: usize, sign: Sign) -> (Cube, Cube) {
        (
            self.f.source.face(x, i, sign).expect("in range"),
            self.f.target.face(k, i + 1, sign).expect("in range"),
        )
    }

    fn split(&self, (x, k): &(Cube, Cube)) -> (Vec<usize>, (Cube, Cube)) {
        let degen: Vec<usize> = x.degen.iter().copied().filter(|i| k.degen.contains(&(i + 1))).collect();
        let rev_x: Vec<usize> = degen.iter().rev().copied().collect();
        let rev_k: Vec<usize> = degen.iter().rev().map(|i| i + 1).collect();
        let base = (
            delete_coordinates(&self.f.source, x, &rev_x),
            delete_coordinates(&self.f.target, k, &rev_k),
        );
        (degen, base)
    }

    fn name(&self, (x, k): &(Cube, Cube)) -> String {
        format!("({}|{})", self.f.source.display_cube(x), self.f.target.display_cube(k))
    }
}

/// Elements are pairs `(x, k)` with `k` a path in the target from the
/// basepoint to `f(x)`, read along the first coordinate.
pub fn homotopy_fiber(f: &CubicalMap, basepoint: GenId, trunc: usize) -> Result<CubicalSet, KanError> {
    let bound = f.source.bound().min(f.target.bound().saturating_sub(1));
    if trunc > bound {
        return Err(KanError::BeyondBound { requested: trunc, bound });
    }
    if basepoint.dim != 0 {
        return Err(KanError::BadBasepoint(f.target.name(basepoint).to_string()));
    }
    Ok(build_presentation(&FiberModel { f, basepoint }, trunc)?)
}

struct PathModel<'a> {
    x: &'a CubicalSet,
}

impl PresentationModel for PathModel<'_> {
    type Elem = Cube;

    fn elements(&self, n: usize) -> Vec<Cube> {
        self.x.cubes(n + 1).expect("within truncation")
    }

    fn face(&self, c: &Cube, i: usize, sign: Sign) -> Cube {
        self.x.face(c, i + 1, sign).expect("in range")
    }

    fn split(&self, c: &Cube) -> (Vec<usize>, Cube) {
        let degen: Vec<usize> = c.degen.iter().filter(|&&s| s >= 2).map(|s| s - 1).collect();
        let rev: Vec<usize> = degen.iter().rev().map(|i| i + 1).collect();
        (degen, delete_coordinates(self.x, c, &rev))
    }

    fn name(&self, c: &Cube) -> String {
        format!("<{}>", self.x.display_cube(c))
    }
}

/// `X^I`: the `n`-elements are the `(n+1)`-cubes of `X`, with the first
/// coordinate as the path direction.
pub fn mapping_path_set(x: &CubicalSet, trunc: usize) -> Result<CubicalSet, KanError> {
    let bound = x.bound().saturating_sub(1);
    if trunc > bound {
        return Err(KanError::BeyondBound { requested: trunc, bound });
    }
    Ok(build_presentation(&PathModel { x }, trunc)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubset::{standard_cube, text::parse_single};

    #[test]
    fn paths_in_an_interval() {
        let i = standard_cube(1);
        let p = mapping_path_set(&i, 1).unwrap();
        // Paths: the two constant paths and the edge itself.
        assert_eq!(p.generator_count(0), 3);
        assert!(p.validate().is_empty());
    }

    #[test]
    fn fibre_of_identity_on_a_point() {
        let pt = parse_single("dim 0: p\n").unwrap();
        let id = CubicalMap::identity(&pt);
        let fib = homotopy_fiber(&id, pt.find("p").unwrap(), 2).unwrap();
        assert_eq!(fib.total_generators(), 1);
        assert!(fib.validate().is_empty());
    }
}
