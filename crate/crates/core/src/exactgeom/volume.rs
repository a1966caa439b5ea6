//! Exact volumes by pulling triangulation over the face lattice.

use std::collections::BTreeSet;

use num_traits::Zero;

use super::linalg::determinant;
use super::polytope::{affine_rank, Polytope};
use super::rational::{factorial, format, int, sub, QMatrix, QVector, Rational};
use crate::error::{Error, Result};

/// Lebesgue volume of `p` inside the coordinate subspace spanned by `coords`.
/// Every other coordinate of `p` must vanish identically.
pub fn volume(p: &Polytope, coords: &[usize]) -> Result<Rational> {
    let n = p.ambient_dim();
    if let Some(&bad) = coords.iter().find(|&&c| c >= n) {
        return Err(Error::InvalidInput(format!(
            "coordinate {bad} out of range for dimension {n}"
        )));
    }
    if p.is_empty() {
        return Ok(Rational::zero());
    }
    for v in p.vertices() {
        if (0..n).any(|i| !coords.contains(&i) && !v[i].is_zero()) {
            let shown: Vec<String> = v.iter().map(format).collect();
            return Err(Error::NotCoordinateFlat(format!("({})", shown.join(", "))));
        }
    }
    let d = coords.len();
    if d == 0 {
        return Ok(int(1));
    }
    let projected: Vec<QVector> = p
        .vertices()
        .iter()
        .map(|v| coords.iter().map(|&c| v[c].clone()).collect())
        .collect();
    if affine_rank(&projected) < d {
        return Ok(Rational::zero());
    }
    let q = Polytope::hull_in(d, &projected);
    Ok(full_dimensional_volume(&q))
}

/// Volume in all ambient coordinates.
pub fn full_volume(p: &Polytope) -> Rational {
    if p.affine_dim() != Some(p.ambient_dim()) {
        return Rational::zero();
    }
    full_dimensional_volume(p)
}

fn full_dimensional_volume(p: &Polytope) -> Rational {
    let d = p.ambient_dim();
    let verts = p.vertices();
    let all: BTreeSet<usize> = (0..verts.len()).collect();
    let simplices = triangulate(p, &all, d);
    let total = simplices.iter().fold(Rational::zero(), |acc, s| {
        let base = &verts[s[0]];
        let m: QMatrix = s[1..].iter().map(|&i| sub(&verts[i], base)).collect();
        let det = determinant(&m);
        acc + if det < Rational::zero() { -det } else { det }
    });
    total / factorial(d)
}

/// Pulling triangulation of the face spanned by `face` (vertex indices) of
/// dimension `dim`. Facets of a face are its intersections with the facets
/// of `p` that drop the dimension by one.
pub fn triangulate(p: &Polytope, face: &BTreeSet<usize>, dim: usize) -> Vec<Vec<usize>> {
    let verts = p.vertices();
    let apex = *face.iter().next().expect("nonempty face");
    if dim == 0 {
        return vec![vec![apex]];
    }
    let mut facets: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    for h in p.halfspaces() {
        let sub_face: BTreeSet<usize> = face.iter().copied().filter(|&i| h.is_tight(&verts[i])).collect();
        if sub_face.is_empty() || sub_face.len() == face.len() {
            continue;
        }
        let pts: Vec<QVector> = sub_face.iter().map(|&i| verts[i].clone()).collect();
        if affine_rank(&pts) + 1 == dim {
            facets.insert(sub_face);
        }
    }
    let mut out = Vec::new();
    for f in facets.iter().filter(|f| !f.contains(&apex)) {
        for mut s in triangulate(p, f, dim - 1) {
            s.insert(0, apex);
            out.push(s);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::rational::{frac, qvec};

    #[test]
    fn volume_examples() {
        let square = Polytope::hull(&[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1]), qvec(&[1, 1])]);
        assert_eq!(volume(&square, &[0, 1]).unwrap(), int(1));
        let t = Polytope::hull(&[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 2])]);
        assert_eq!(volume(&t, &[0, 1]).unwrap(), int(1));
        let t = Polytope::hull(&[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[1, 1])]);
        assert_eq!(volume(&t, &[0, 1]).unwrap(), frac(1, 2));
    }

    #[test]
    fn coordinate_subspace_volumes() {
        let seg = Polytope::hull(&[qvec(&[0, 0]), qvec(&[0, 2])]);
        assert_eq!(volume(&seg, &[1]).unwrap(), int(2));
        assert_eq!(volume(&seg, &[0, 1]).unwrap(), int(0));
        assert!(matches!(volume(&seg, &[0]), Err(Error::NotCoordinateFlat(_))));
        let pt = Polytope::hull(&[qvec(&[0, 0])]);
        assert_eq!(volume(&pt, &[]).unwrap(), int(1));
    }

    #[test]
    fn cube_and_simplex_in_three_dimensions() {
        let mut cube = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    cube.push(qvec(&[2 * i, 2 * j, 2 * k]));
                }
            }
        }
        assert_eq!(full_volume(&Polytope::hull(&cube)), int(8));
        let s = Polytope::hull(&[qvec(&[0, 0, 0]), qvec(&[1, 0, 0]), qvec(&[0, 1, 0]), qvec(&[0, 0, 1])]);
        assert_eq!(full_volume(&s), frac(1, 6));
    }
}
