//! Double description method for polyhedral cones `{x : A x >= 0}`.
//!
//! Constraints are processed in input order. The lineality space is carried
//! explicitly so cones that are not pointed need no special casing.

use num_traits::{Signed, Zero};

use super::rational::{dot, is_zero_vec, primitive, scale, sub, QMatrix, QVector};

#[derive(Debug, Clone, Default)]
pub struct ConeGenerators {
    /// Extreme rays modulo the lineality space.
    pub rays: QMatrix,
    /// Basis of the lineality space.
    pub lineality: QMatrix,
}

struct Ray {
    dir: QVector,
    zeros: Vec<bool>,
}

pub fn cone_from_inequalities(constraints: &[QVector], dim: usize) -> ConeGenerators {
    let m = constraints.len();
    let mut lineality: QMatrix = (0..dim)
        .map(|i| {
            let mut e = vec![Zero::zero(); dim];
            e[i] = num_traits::One::one();
            e
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (k, a) in constraints.iter().enumerate() {
        if is_zero_vec(a) {
            for r in rays.iter_mut() {
                r.zeros[k] = true;
            }
            continue;
        }
        if let Some(li) = lineality.iter().position(|l| !dot(a, l).is_zero()) {
            let mut l = lineality.remove(li);
            if dot(a, &l).is_negative() {
                l = l.iter().map(|x| -x).collect();
            }
            let al = dot(a, &l);
            for other in lineality.iter_mut() {
                let f = dot(a, other) / &al;
                if !f.is_zero() {
                    *other = sub(other, &scale(&l, &f));
                }
            }
            for r in rays.iter_mut() {
                let f = dot(a, &r.dir) / &al;
                if !f.is_zero() {
                    r.dir = primitive(&sub(&r.dir, &scale(&l, &f)));
                }
                r.zeros[k] = true;
            }
            let mut zeros = vec![false; m];
            for z in zeros.iter_mut().take(k) {
                *z = true;
            }
            rays.push(Ray {
                dir: primitive(&l),
                zeros,
            });
            continue;
        }

        let values: Vec<_> = rays.iter().map(|r| dot(a, &r.dir)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
        let free_dim = dim - lineality.len();
        let mut fresh = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common: Vec<bool> = (0..m).map(|c| rays[p].zeros[c] && rays[n].zeros[c]).collect();
                let count = common.iter().filter(|&&z| z).count();
                if count + 2 < free_dim {
                    continue;
                }
                let adjacent =
                    (0..rays.len()).all(|r| r == p || r == n || !(0..m).all(|c| !common[c] || rays[r].zeros[c]));
                if !adjacent {
                    continue;
                }
                let dir = sub(&scale(&rays[n].dir, &values[p]), &scale(&rays[p].dir, &values[n]));
                let mut zeros = common;
                zeros[k] = true;
                fresh.push(Ray {
                    dir: primitive(&dir),
                    zeros,
                });
            }
        }
        let mut kept: Vec<Ray> = Vec::new();
        for (i, mut r) in rays.into_iter().enumerate() {
            if values[i].is_negative() {
                continue;
            }
            if values[i].is_zero() {
                r.zeros[k] = true;
            }
            kept.push(r);
        }
        kept.extend(fresh);
        rays = kept;
    }

    ConeGenerators {
        rays: rays.into_iter().map(|r| r.dir).collect(),
        lineality,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::rational::qvec;

    #[test]
    fn positive_orthant() {
        let g = cone_from_inequalities(&[qvec(&[1, 0]), qvec(&[0, 1])], 2);
        assert!(g.lineality.is_empty());
        let mut rays = g.rays.clone();
        rays.sort();
        assert_eq!(rays, vec![qvec(&[0, 1]), qvec(&[1, 0])]);
    }

    #[test]
    fn halfplane_keeps_a_lineality_line() {
        let g = cone_from_inequalities(&[qvec(&[1, 1])], 2);
        assert_eq!(g.lineality.len(), 1);
        assert_eq!(g.rays.len(), 1);
    }

    #[test]
    fn cone_over_square_has_four_rays() {
        // (x, y, s): 0 <= x <= s, 0 <= y <= s
        let rows = vec![qvec(&[1, 0, 0]), qvec(&[-1, 0, 1]), qvec(&[0, 1, 0]), qvec(&[0, -1, 1])];
        let g = cone_from_inequalities(&rows, 3);
        assert!(g.lineality.is_empty());
        assert_eq!(g.rays.len(), 4);
    }
}
