use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::polytope::Polytope;
use super::rational::{ceil, floor, QVector, Rational};
use crate::error::{Error, Result};

/// All integer points of a bounded polytope in lexicographic order.
pub fn lattice_points(p: &Polytope) -> Result<Vec<QVector>> {
    if p.ambient_dim() == 0 {
        return Ok(if p.is_empty() { Vec::new() } else { vec![Vec::new()] });
    }
    let mut out = Vec::new();
    scan(p, |prefix, lo, hi| {
        for t in lo..=hi {
            let mut u = prefix.to_vec();
            u.push(Rational::from_integer(BigInt::from(t)));
            out.push(u);
        }
    })?;
    Ok(out)
}

/// Number of integer points, without listing them.
pub fn count_lattice_points(p: &Polytope) -> Result<usize> {
    if p.ambient_dim() == 0 {
        return Ok(usize::from(!p.is_empty()));
    }
    let mut count = 0usize;
    scan(p, |_, lo, hi| count += (hi - lo + 1) as usize)?;
    Ok(count)
}

/// Runs over the integer prefixes in the bounding box of the first n-1
/// coordinates (odometer, last prefix coordinate fastest) and hands each
/// nonempty range of the last coordinate to `emit`.
fn scan(p: &Polytope, mut emit: impl FnMut(&[Rational], i64, i64)) -> Result<()> {
    if p.is_empty() {
        return Ok(());
    }
    let n = p.ambient_dim();
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for i in 0..n {
        let coords = p.vertices().iter().map(|v| &v[i]);
        let min = coords.clone().min().ok_or(Error::Unbounded)?;
        let max = coords.max().ok_or(Error::Unbounded)?;
        lo.push(to_i64(&ceil(min))?);
        hi.push(to_i64(&floor(max))?);
    }
    if lo.iter().zip(&hi).any(|(l, h)| l > h) {
        return Ok(());
    }
    let last = n - 1;
    let mut cur = lo[..last].to_vec();
    loop {
        let prefix: QVector = cur.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect();
        // each halfspace a·u ≥ b bounds the last coordinate on this line
        let (mut a, mut b) = (lo[last], hi[last]);
        let mut feasible = true;
        for h in p.halfspaces() {
            let rest: Rational = h.normal[..last].iter().zip(&prefix).map(|(x, y)| x * y).sum();
            let rhs = &h.offset - rest;
            let c = &h.normal[last];
            if c.is_zero() {
                if rhs.is_positive() {
                    feasible = false;
                    break;
                }
            } else if c.is_positive() {
                a = a.max(to_i64(&ceil(&(rhs / c)))?);
            } else {
                b = b.min(to_i64(&floor(&(rhs / c)))?);
            }
        }
        if feasible && a <= b {
            emit(&prefix, a, b);
        }
        let mut i = last;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if cur[i] < hi[i] {
                cur[i] += 1;
                cur[i + 1..last].copy_from_slice(&lo[i + 1..last]);
                break;
            }
        }
    }
}

fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| Error::InvalidInput("lattice scan bounds out of range".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::rational::qvec;

    #[test]
    fn lattice_point_examples() {
        let s = Polytope::hull(&[qvec(&[0, 0]), qvec(&[2, 0]), qvec(&[0, 2])]);
        let pts = lattice_points(&s).unwrap();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], qvec(&[0, 0]));
        assert_eq!(pts[1], qvec(&[0, 1]));
        assert!(lattice_points(&Polytope::empty(2)).unwrap().is_empty());
        let seg = Polytope::hull(&[qvec(&[0, 0]), qvec(&[3, 0])]);
        assert_eq!(lattice_points(&seg).unwrap().len(), 4);
        assert_eq!(count_lattice_points(&seg).unwrap(), 4);
        let thin = Polytope::hull(&[qvec(&[0, 0, 0]), qvec(&[1, 1, 1]), qvec(&[2, 1, 0])]);
        assert_eq!(count_lattice_points(&thin).unwrap(), 3);
    }
}
