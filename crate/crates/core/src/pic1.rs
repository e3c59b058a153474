//! Picard rank one: which K3 surfaces with `NS = Zℓ` admit a rank-2
//! transform, and the integer matrix such a transform must induce.
//!
//! Coordinates are scalar: `(r, c, t)` stands for `(r, c·ℓ, t)`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{ratio, serde_rat, Rat};
use crate::error::{Error, Result};
use crate::lattice::NsLattice;
use crate::matrix::RatMatrix;
use crate::transform::CohTransform;

/// Largest `n` accepted; keeps every intermediate inside `i64`.
pub const MAX_N: i64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pic1Solution {
    pub n: i64,
    pub lsq: i64,
    pub z: i64,
    pub c: i64,
    pub x: i64,
    pub alpha: i64,
    pub y: i64,
    pub matrix: [[i64; 3]; 3],
    pub det: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub selected: Pic1Solution,
    pub excluded: Pic1Solution,
    /// `μ(Ô)/ℓ²` for the excluded solution.
    #[serde(with = "serde_rat")]
    pub excluded_slope_ratio: Rat,
    /// `μ(E_s)/ℓ²`, the bound the excluded slope exceeds.
    #[serde(with = "serde_rat")]
    pub stable_slope_ratio: Rat,
}

fn check_n(n: i64) -> Result<()> {
    if !(0..=MAX_N).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "n must lie in [0, {MAX_N}], got {n}"
        )));
    }
    Ok(())
}

/// `ℓ² = 4(2n+1)`.
pub fn lsq_of(n: i64) -> i64 {
    4 * (2 * n + 1)
}

/// `z = 2n + 3`.
pub fn z_of(n: i64) -> i64 {
    2 * n + 3
}

/// Returns `n` with `lsq = 4(2n+1)` when `lsq ≡ 4 (mod 8)`.
pub fn existence_test(lsq: i64) -> Result<Option<i64>> {
    if lsq <= 0 {
        return Err(Error::InvalidArgument(format!(
            "ℓ² must be positive for an ample generator, got {lsq}"
        )));
    }
    if lsq % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "ℓ² must be even on a K3 lattice, got {lsq}"
        )));
    }
    Ok((lsq % 8 == 4).then(|| (lsq - 4) / 8))
}

/// The matrix in scalar coordinates from the unknowns `(c, x, α, y)`.
pub fn matrix_of(n: i64, c: i64, x: i64, alpha: i64, y: i64) -> [[i64; 3]; 3] {
    let z = z_of(n);
    let lsq = lsq_of(n);
    [[z, -lsq, 2], [c, x, -1], [alpha, y * lsq, z - 4]]
}

fn det3(m: &[[i64; 3]; 3]) -> i64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn apply3(m: &[[i64; 3]; 3], v: [i64; 3]) -> [i64; 3] {
    let mut out = [0; 3];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

fn solution(n: i64, c: i64, x: i64, alpha: i64, y: i64) -> Pic1Solution {
    let matrix = matrix_of(n, c, x, alpha, y);
    Pic1Solution {
        n,
        lsq: lsq_of(n),
        z: z_of(n),
        c,
        x,
        alpha,
        y,
        det: det3(&matrix),
        matrix,
    }
}

impl Pic1Solution {
    /// `2zα − 4c²(z−2) + 2z²`, which must equal 2.
    pub fn structure_sheaf_lhs(&self) -> i64 {
        let (z, c) = (self.z, self.c);
        2 * z * self.alpha - 4 * c * c * (z - 2) + 2 * z * z
    }

    /// `2α + 4c(z−2) + z²`: the rank of `Φ⁻¹Φ(O)`, which must equal 1.
    pub fn rank_lhs(&self) -> i64 {
        2 * self.alpha + 4 * self.c * (self.z - 2) + self.z * self.z
    }

    /// `ch(Φ(O_x))` in scalar coordinates, `(2, 1, z−4)`.
    pub fn point_image(&self) -> [i64; 3] {
        [2, 1, self.z - 4]
    }

    /// Checks every invariant of the constraint system.
    pub fn satisfies_invariants(&self) -> bool {
        let (z, c) = (self.z, self.c);
        (z + 2 * c).pow(2) == 1
            && self.alpha == 2 * c * (2 + c)
            && self.y == c + 2
            && self.x == z - 4 - 2 * c
            && self.structure_sheaf_lhs() == 2
            && self.rank_lhs() == 1
            && apply3(&self.matrix, self.point_image()) == [0, 0, 1]
            && self.det.abs() == 1
    }

    /// The matrix as a transform of the rank-one lattice `⟨ℓ²⟩`.
    pub fn to_transform(&self) -> Result<CohTransform> {
        let lattice: Arc<NsLattice> = NsLattice::from_i64(&[&[self.lsq]])?;
        let m = RatMatrix::from_rows(
            self.matrix
                .iter()
                .map(|row| row.iter().map(|&v| crate::arith::rat(v)).collect())
                .collect(),
        )?;
        CohTransform::from_matrix(lattice.clone(), lattice, m)
    }
}

/// Both integer solutions of the constraint system, ordered `(det +1, det −1)`.
pub fn solve_constraints(n: i64) -> Result<(Pic1Solution, Pic1Solution)> {
    check_n(n)?;
    let z = z_of(n);
    let make = |c: i64| solution(n, c, z - 4 - 2 * c, 2 * c * (2 + c), c + 2);
    Ok((make(-n - 1), make(-n - 2)))
}

/// Keeps the determinant `+1` solution; the other would make `Ô` destabilize
/// `E_s` since its slope ratio `(n+2)/(2n+3)` exceeds `1/2`.
pub fn select_physical(pair: &(Pic1Solution, Pic1Solution)) -> Result<Selection> {
    let (a, b) = pair;
    let (selected, excluded) = match (a.det, b.det) {
        (1, -1) => (a.clone(), b.clone()),
        (-1, 1) => (b.clone(), a.clone()),
        _ => {
            return Err(Error::violation(format!(
                "expected determinants +1 and -1, got {} and {}",
                a.det, b.det
            )))
        }
    };
    let n = excluded.n;
    Ok(Selection {
        excluded_slope_ratio: ratio(n + 2, 2 * n + 3),
        stable_slope_ratio: ratio(1, 2),
        selected,
        excluded,
    })
}

/// Which raw equations the exhaustive scan imposes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RawSystem {
    /// Right-hand side of `2zα − 4c²(z−2) + 2z² = ·` (2 in the genuine system).
    pub structure_sheaf_rhs: i64,
    /// Right-hand side of `2α + 4c(z−2) + z² = ·` (1 in the genuine system).
    pub rank_rhs: i64,
}

impl Default for RawSystem {
    fn default() -> Self {
        RawSystem {
            structure_sheaf_rhs: 2,
            rank_rhs: 1,
        }
    }
}

/// Smallest bound for which the scan is conclusive.
pub fn minimum_bound(n: i64) -> i64 {
    4 * n + 8
}

/// Range admitted for `α`: the structure-sheaf equation with `|c|, |z| ≤ B` forces
/// `|α| ≤ 2B² + B + 1`, so a `bound`-sized box would truncate.
pub fn alpha_bound(bound: i64) -> i64 {
    2 * bound * bound + bound + 1
}

/// Exhaustive search over `|c|, |x|, |y| ≤ bound` and `α` in its forced range.
pub fn brute_force_oracle(n: i64, bound: i64) -> Result<Vec<Pic1Solution>> {
    brute_force_with(n, bound, RawSystem::default())
}

pub fn brute_force_with(n: i64, bound: i64, system: RawSystem) -> Result<Vec<Pic1Solution>> {
    check_n(n)?;
    let needed = minimum_bound(n);
    if bound < needed {
        return Err(Error::BoundTooSmall { bound, needed });
    }
    if bound > 1 << 16 {
        return Err(Error::InvalidArgument(format!("bound {bound} is too large to scan")));
    }
    let z = z_of(n);
    let lsq = lsq_of(n);
    let a_max = alpha_bound(bound);
    let mut found: Vec<Pic1Solution> = (-bound..=bound)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut out = Vec::new();
            // Linear in α with coefficient 2z ≠ 0: at most one α in range.
            let num = system.structure_sheaf_rhs + 4 * c * c * (z - 2) - 2 * z * z;
            let alpha = (num % (2 * z) == 0)
                .then_some(num / (2 * z))
                .filter(|a| a.abs() <= a_max)
                .filter(|a| 2 * a + 4 * c * (z - 2) + z * z == system.rank_rhs);
            if let Some(alpha) = alpha {
                for x in -bound..=bound {
                    // image of (2, 1, z−4), ℓ̂-coordinate
                    if 2 * c + x - (z - 4) != 0 {
                        continue;
                    }
                    for y in -bound..=bound {
                        let row0 = 2 * z - lsq + 2 * (z - 4);
                        let row2 = 2 * alpha + y * lsq + (z - 4) * (z - 4);
                        if row0 == 0 && row2 == 1 {
                            out.push(solution(n, c, x, alpha, y));
                        }
                    }
                }
            }
            out
        })
        .collect();
    found.sort_by_key(|s| std::cmp::Reverse(s.det));
    Ok(found)
}
