//! Dense exact linear algebra over the rationals.

use num_traits::{One, Signed, Zero};

use super::rational::{dot, int, QMatrix, QVector, Rational};

/// Reduced row echelon form. Returns the reduced matrix and its pivot columns.
pub fn rref(rows: &[QVector], ncols: usize) -> (QMatrix, Vec<usize>) {
    let mut m: QMatrix = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[QVector]) -> usize {
    let Some(first) = rows.first() else { return 0 };
    rref(rows, first.len()).1.len()
}

/// Basis of `{x : rows · x = 0}`.
pub fn nullspace(rows: &[QVector], ncols: usize) -> QMatrix {
    let (m, pivots) = rref(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (row, &p) in m.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Solves `a x = b` for square nonsingular `a`.
pub fn solve(a: &[QVector], b: &[Rational]) -> Option<QVector> {
    let n = a.len();
    let aug: QMatrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (m, pivots) = rref(&aug, n + 1);
    if pivots.len() != n || pivots.iter().any(|&p| p >= n) {
        return None;
    }
    Some(m.iter().map(|row| row[n].clone()).collect())
}

pub fn determinant(a: &[QVector]) -> Rational {
    let n = a.len();
    let mut m: QMatrix = a.to_vec();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        for i in c + 1..n {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[c][c];
                let pivot_row = m[c].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    det
}

pub fn transpose(a: &[QVector]) -> QMatrix {
    let Some(first) = a.first() else { return vec![] };
    (0..first.len())
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mat_vec(a: &[QVector], x: &[Rational]) -> QVector {
    a.iter().map(|row| dot(row, x)).collect()
}

/// `x^T q y`
pub fn bilinear(q: &[QVector], x: &[Rational], y: &[Rational]) -> Rational {
    dot(x, &mat_vec(q, y))
}

/// Inertia `(positive, negative, zero)` of a symmetric matrix, computed by
/// symmetric Gaussian elimination (a congruence, so Sylvester applies).
pub fn inertia(q: &[QVector]) -> (usize, usize, usize) {
    let mut m: QMatrix = q.to_vec();
    let n = m.len();
    let (mut pos, mut neg) = (0, 0);
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let pivot = active.iter().copied().find(|&i| !m[i][i].is_zero());
        let i = match pivot {
            Some(i) => i,
            None => {
                // all diagonal entries vanish: find an off-diagonal entry and
                // replace row/col i by row/col i + j to create a diagonal entry
                let found = active.iter().find_map(|&i| {
                    active
                        .iter()
                        .copied()
                        .find(|&j| j != i && !m[i][j].is_zero())
                        .map(|j| (i, j))
                });
                let Some((i, j)) = found else { break };
                let row = m[j].clone();
                for (a, b) in m[i].iter_mut().zip(&row) {
                    *a += b;
                }
                for row in m.iter_mut() {
                    let v = row[j].clone();
                    row[i] += v;
                }
                i
            }
        };
        let d = m[i][i].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        active.retain(|&k| k != i);
        for &r in &active {
            if m[r][i].is_zero() {
                continue;
            }
            let f = &m[r][i] / &d;
            let pivot = m[i].clone();
            for (a, b) in m[r].iter_mut().zip(&pivot) {
                *a -= &f * b;
            }
        }
        for &c in &active {
            m[i][c] = Rational::zero();
            m[c][i] = Rational::zero();
        }
    }
    (pos, neg, n - pos - neg)
}

pub fn identity(n: usize) -> QMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { int(1) } else { int(0) }).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::rational::{frac, qvec};

    #[test]
    fn rank_and_nullspace() {
        let rows = vec![qvec(&[1, 2, 3]), qvec(&[2, 4, 6])];
        assert_eq!(rank(&rows), 1);
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(mat_vec(&rows, &v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn solve_and_determinant() {
        let a = vec![qvec(&[2, 1]), qvec(&[1, 3])];
        assert_eq!(determinant(&a), int(5));
        let x = solve(&a, &qvec(&[1, 2])).unwrap();
        assert_eq!(x, vec![frac(1, 5), frac(3, 5)]);
        assert!(solve(&[qvec(&[1, 1]), qvec(&[2, 2])], &qvec(&[1, 2])).is_none());
    }

    #[test]
    fn inertia_of_hyperbolic_forms() {
        assert_eq!(inertia(&[qvec(&[0, 1]), qvec(&[1, 0])]), (1, 1, 0));
        assert_eq!(inertia(&[qvec(&[1, 0]), qvec(&[0, -1])]), (1, 1, 0));
        assert_eq!(inertia(&[qvec(&[0, 1]), qvec(&[1, -2])]), (1, 1, 0));
        assert_eq!(inertia(&[qvec(&[1, 0]), qvec(&[0, 1])]), (2, 0, 0));
        assert_eq!(inertia(&[qvec(&[0, 0]), qvec(&[0, 0])]), (0, 0, 2));
    }
}
