//! Standard fans used throughout the tests and the instance library.

use super::fan::ToricVariety;

pub fn p1() -> ToricVariety {
    ToricVariety::new(vec![vec![1], vec![-1]], vec![vec![0], vec![1]])
}

/// Rays e₁, e₂, -e₁-e₂.
pub fn p2() -> ToricVariety {
    ToricVariety::new(
        vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
        vec![vec![0, 1], vec![1, 2], vec![0, 2]],
    )
}

/// Rays e₁, e₂, -e₁, -e₂.
pub fn p1xp1() -> ToricVariety {
    ToricVariety::new(
        vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
    )
}

/// Hirzebruch surface F_a with rays (1,0), (0,1), (-1,a), (0,-1). The ray
/// (0,1) carries the curve of self-intersection -a.
pub fn hirzebruch(a: i64) -> ToricVariety {
    ToricVariety::new(
        vec![vec![1, 0], vec![0, 1], vec![-1, a], vec![0, -1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
    )
}

pub fn p3() -> ToricVariety {
    ToricVariety::new(
        vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![-1, -1, -1]],
        vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
    )
}

/// P³ blown up at the fixed point of the cone {e₁, e₂, e₃}.
pub fn bl_p3() -> ToricVariety {
    p3().blowup_fixed_point(&[0, 1, 2]).expect("maximal cone").variety
}
