//! Standard cubes, spheres, horns, reduced products, and presentations built
//! from an element model.

use std::collections::{BTreeMap, BTreeSet};

use super::{slot_face, Cube, CubeError, CubicalSet, CubicalSetBuilder, GenId};
use crate::boxcat::{compose, enumerate_hom, BoxMorphism, Sign};

fn vector_name(v: &[i8]) -> String {
    let body: String = v
        .iter()
        .map(|&c| match c {
            -1 => '-',
            1 => '+',
            _ => '0',
        })
        .collect();
    format!("c{}", body)
}

/// The vertex-coordinate description of a generator of `□^n`: entries in
/// `{-1, 0, +1}` with one zero per free coordinate.
pub fn standard_cube_vector(x: &CubicalSet, g: GenId) -> Vec<i8> {
    x.name(g)[1..]
        .chars()
        .map(|c| match c {
            '-' => -1,
            '+' => 1,
            _ => 0,
        })
        .collect()
}

fn insertion_vector(m: &BoxMorphism) -> Vec<i8> {
    let mut v = vec![0i8; m.cod_dim];
    for &(p, s) in &m.insertions {
        v[p - 1] = s.as_i8();
    }
    v
}

/// `□^n`: generators are the insertion-only morphisms into `I^n`, faces are
/// computed by composing with `δ_i^ε`.
pub fn standard_cube(n: usize) -> CubicalSet {
    let mut builder = CubicalSetBuilder::new();
    let mut by_morphism: BTreeMap<BoxMorphism, GenId> = BTreeMap::new();
    let mut cells: Vec<(GenId, BoxMorphism)> = Vec::new();
    for m in 0..=n {
        for mor in enumerate_hom(m, n).into_iter().filter(BoxMorphism::is_insertion_only) {
            let id = builder
                .add_generator(m, &vector_name(&insertion_vector(&mor)))
                .expect("vector names are distinct");
            by_morphism.insert(mor.clone(), id);
            cells.push((id, mor));
        }
    }
    for (id, mor) in &cells {
        for slot in 0..2 * id.dim {
            let (i, sign) = slot_face(slot);
            let delta = BoxMorphism::face(id.dim, i, sign).expect("valid face");
            let face = compose(mor, &delta).expect("composable");
            builder
                .set_face(*id, i, sign, Cube::generator(by_morphism[&face]))
                .expect("face dimensions match");
        }
    }
    builder.build(Some(n), true).expect("standard cube is complete")
}

/// `∂□^n`: every generator of `□^n` except the top cell.
pub fn boundary_sphere(n: usize) -> CubicalSet {
    let cube = standard_cube(n);
    let keep: BTreeSet<GenId> = cube.all_generators().filter(|g| g.dim < n).collect();
    cube.subset(&keep).expect("faces of proper faces stay proper")
}

/// The horn `⊓^n_{(i,ε)}`: the boundary without the open face `(i, ε)`.
pub fn horn(n: usize, i: usize, sign: Sign) -> Result<CubicalSet, CubeError> {
    if n == 0 || i == 0 || i > n {
        return Err(CubeError::IndexOutOfRange { index: i, dim: n });
    }
    let cube = standard_cube(n);
    let top = GenId { dim: n, idx: 0 };
    let open = cube.generator_face(top, i, sign).gen;
    let keep: BTreeSet<GenId> = cube.all_generators().filter(|&g| g.dim < n && g != open).collect();
    cube.subset(&keep)
}

/// The reduced product `X ⊗ Y`. Generators of dimension `n` are pairs of
/// generators whose dimensions sum to `n`.
pub fn reduced_product(x: &CubicalSet, y: &CubicalSet, trunc: Option<usize>) -> Result<CubicalSet, CubeError> {
    let finite = x.is_finite() && y.is_finite();
    let natural = if finite {
        x.max_generator_dim() + y.max_generator_dim()
    } else {
        x.bound().min(y.bound())
    };
    let top = trunc.map_or(natural, |t| t.min(natural));
    let mut builder = CubicalSetBuilder::new();
    let mut ids: BTreeMap<(GenId, GenId), GenId> = BTreeMap::new();
    for n in 0..=top {
        for k in 0..=n {
            for a in x.generators(k) {
                for b in y.generators(n - k) {
                    let name = format!("({},{})", x.name(a), y.name(b));
                    ids.insert((a, b), builder.add_generator(n, &name)?);
                }
            }
        }
    }
    let pair = |ca: &Cube, cb: &Cube| -> Cube {
        let k = ca.dim();
        let mut degen = ca.degen.clone();
        degen.extend(cb.degen.iter().map(|t| t + k));
        Cube { gen: ids[&(ca.gen, cb.gen)], degen }
    };
    let mut faces = Vec::new();
    for (&(a, b), &id) in &ids {
        let (ca, cb) = (Cube::generator(a), Cube::generator(b));
        for slot in 0..2 * id.dim {
            let (i, sign) = slot_face(slot);
            let face = if i <= a.dim {
                pair(&x.face(&ca, i, sign)?, &cb)
            } else {
                pair(&ca, &y.face(&cb, i - a.dim, sign)?)
            };
            faces.push((id, i, sign, face));
        }
    }
    for (id, i, sign, face) in faces {
        builder.set_face(id, i, sign, face)?;
    }
    let out_finite = finite && trunc.map_or(true, |t| t >= natural);
    builder.build(Some(top), out_finite)
}

/// `X ⊔ Y`; generator names of `Y` that clash get a `'` suffix.
pub fn disjoint_union(x: &CubicalSet, y: &CubicalSet) -> Result<CubicalSet, CubeError> {
    let mut builder = CubicalSetBuilder::new();
    let mut left = BTreeMap::new();
    let mut right = BTreeMap::new();
    for g in x.all_generators() {
        left.insert(g, builder.add_generator(g.dim, x.name(g))?);
    }
    for g in y.all_generators() {
        let mut name = y.name(g).to_string();
        while builder.find(&name).is_some() {
            name.push('\'');
        }
        right.insert(g, builder.add_generator(g.dim, &name)?);
    }
    for (src, map) in [(x, &left), (y, &right)] {
        for (&g, &id) in map.iter() {
            for slot in 0..2 * g.dim {
                let (i, sign) = slot_face(slot);
                let f = src.generator_face(g, i, sign);
                builder.set_face(id, i, sign, Cube { gen: map[&f.gen], degen: f.degen.clone() })?;
            }
        }
    }
    let finite = x.is_finite() && y.is_finite();
    let trunc = if finite { x.trunc_dim().max(y.trunc_dim()) } else { x.bound().min(y.bound()) };
    builder.build(Some(trunc), finite)
}

/// A cubical set described elementwise: all elements per dimension, faces,
/// and a way to split off degenerate directions.
pub trait PresentationModel {
    type Elem: Clone + Ord;

    /// Every element of dimension `n`.
    fn elements(&self, n: usize) -> Vec<Self::Elem>;

    fn face(&self, e: &Self::Elem, i: usize, sign: Sign) -> Self::Elem;

    /// The degenerate coordinates of `e` (ascending) and the nondegenerate
    /// element obtained by deleting them.
    fn split(&self, e: &Self::Elem) -> (Vec<usize>, Self::Elem);

    fn name(&self, e: &Self::Elem) -> String;
}

/// Presents a model as a cubical set truncated at `trunc`.
pub fn build_presentation<M: PresentationModel>(model: &M, trunc: usize) -> Result<CubicalSet, CubeError> {
    let mut builder = CubicalSetBuilder::new();
    let mut ids: BTreeMap<M::Elem, GenId> = BTreeMap::new();
    let mut order = Vec::new();
    for n in 0..=trunc {
        for e in model.elements(n) {
            let (degen, _) = model.split(&e);
            if degen.is_empty() && !ids.contains_key(&e) {
                let id = builder.add_generator(n, &model.name(&e))?;
                ids.insert(e.clone(), id);
                order.push((e, id));
            }
        }
    }
    for (e, id) in &order {
        for slot in 0..2 * id.dim {
            let (i, sign) = slot_face(slot);
            let (degen, base) = model.split(&model.face(e, i, sign));
            let gen = *ids
                .get(&base)
                .ok_or_else(|| CubeError::UnknownGenerator(model.name(&base)))?;
            builder.set_face(*id, i, sign, Cube { gen, degen })?;
        }
    }
    builder.build(Some(trunc), false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_counts() {
        let sq = standard_cube(2);
        assert_eq!((sq.generator_count(0), sq.generator_count(1), sq.generator_count(2)), (4, 4, 1));
        let pt = standard_cube(0);
        assert_eq!(pt.total_generators(), 1);
        assert_eq!(standard_cube(1).cube_count(1), 3);
    }

    #[test]
    fn horn_and_sphere_counts() {
        let h = horn(2, 1, Sign::Plus).unwrap();
        assert_eq!((h.generator_count(0), h.generator_count(1)), (4, 3));
        let s1 = boundary_sphere(1);
        assert_eq!((s1.generator_count(0), s1.generator_count(1)), (2, 0));
        assert_eq!(boundary_sphere(3).euler_characteristic(), 2);
    }

    #[test]
    fn torus_cell_counts() {
        let s = boundary_sphere(2);
        let t = reduced_product(&s, &s, None).unwrap();
        assert_eq!((t.generator_count(0), t.generator_count(1), t.generator_count(2)), (16, 32, 16));
        assert!(t.validate().is_empty());
    }
}
