//! The Néron–Severi lattice of a K3 surface and divisor classes in it.
//!
//! A lattice is a free module with an even symmetric integer Gram matrix.
//! Classes carry a shared handle to their lattice so that pairing classes
//! from different lattices is caught instead of silently producing a number.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::arith::{half, int, Int};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NsLattice {
    gram: Vec<Vec<Int>>,
}

impl NsLattice {
    /// Validates squareness, symmetry and evenness of the diagonal.
    pub fn new(gram: Vec<Vec<Int>>) -> Result<Arc<Self>> {
        let n = gram.len();
        if n == 0 {
            return Err(Error::InvalidLattice("rank must be positive".into()));
        }
        for (i, row) in gram.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidLattice(format!(
                    "gram row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
        }
        for i in 0..n {
            if !(&gram[i][i] % int(2)).is_zero() {
                return Err(Error::InvalidLattice(format!(
                    "odd diagonal entry gram[{i}][{i}] = {}",
                    gram[i][i]
                )));
            }
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::InvalidLattice(format!(
                        "gram is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Arc::new(NsLattice { gram }))
    }

    pub fn from_i64(gram: &[&[i64]]) -> Result<Arc<Self>> {
        Self::new(
            gram.iter()
                .map(|r| r.iter().map(|&v| int(v)).collect())
                .collect(),
        )
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<Int>] {
        &self.gram
    }

    pub fn entry(&self, i: usize, j: usize) -> &Int {
        &self.gram[i][j]
    }

    fn pair(&self, x: &[Int], y: &[Int]) -> Int {
        let mut acc = Int::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() {
                    acc += xi * &self.gram[i][j] * yj;
                }
            }
        }
        acc
    }
}

impl fmt::Debug for NsLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NsLattice{:?}", self.gram)
    }
}

pub fn same_lattice(a: &Arc<NsLattice>, b: &Arc<NsLattice>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// An integer class in a fixed lattice basis.
#[derive(Clone)]
pub struct DivisorClass {
    lattice: Arc<NsLattice>,
    coords: Vec<Int>,
}

impl DivisorClass {
    pub fn new(lattice: &Arc<NsLattice>, coords: Vec<Int>) -> Result<Self> {
        if coords.len() != lattice.rank() {
            return Err(Error::Dimension {
                expected: lattice.rank(),
                got: coords.len(),
            });
        }
        Ok(DivisorClass {
            lattice: Arc::clone(lattice),
            coords,
        })
    }

    pub fn from_i64(lattice: &Arc<NsLattice>, coords: &[i64]) -> Result<Self> {
        Self::new(lattice, coords.iter().map(|&v| int(v)).collect())
    }

    pub fn zero(lattice: &Arc<NsLattice>) -> Self {
        DivisorClass {
            lattice: Arc::clone(lattice),
            coords: vec![Int::zero(); lattice.rank()],
        }
    }

    /// The `i`-th basis vector.
    pub fn basis(lattice: &Arc<NsLattice>, i: usize) -> Self {
        let mut c = Self::zero(lattice);
        c.coords[i] = int(1);
        c
    }

    pub fn lattice(&self) -> &Arc<NsLattice> {
        &self.lattice
    }

    pub fn coords(&self) -> &[Int] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn same_lattice(&self, other: &DivisorClass) -> bool {
        same_lattice(&self.lattice, &other.lattice)
    }

    pub fn check_same(&self, other: &DivisorClass) -> Result<()> {
        if self.same_lattice(other) {
            Ok(())
        } else {
            Err(Error::LatticeMismatch(format!(
                "{:?} vs {:?}",
                self.lattice, other.lattice
            )))
        }
    }

    /// Re-homes the coordinates in another lattice with the same Gram matrix.
    pub fn transport(&self, target: &Arc<NsLattice>) -> Result<Self> {
        if !same_lattice(&self.lattice, target) {
            return Err(Error::LatticeMismatch("transport between distinct forms".into()));
        }
        Self::new(target, self.coords.clone())
    }

    pub fn square(&self) -> Int {
        self.lattice.pair(&self.coords, &self.coords)
    }

    pub fn scaled(&self, k: &Int) -> DivisorClass {
        DivisorClass {
            lattice: Arc::clone(&self.lattice),
            coords: self.coords.iter().map(|c| c * k).collect(),
        }
    }

    fn zip_with(&self, other: &DivisorClass, f: impl Fn(&Int, &Int) -> Int) -> DivisorClass {
        assert!(
            self.same_lattice(other),
            "divisor arithmetic across different lattices"
        );
        DivisorClass {
            lattice: Arc::clone(&self.lattice),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }
}

impl PartialEq for DivisorClass {
    fn eq(&self, other: &Self) -> bool {
        self.same_lattice(other) && self.coords == other.coords
    }
}

impl Eq for DivisorClass {}

impl fmt::Debug for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl Add for &DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        self.scaled(&int(-1))
    }
}

impl Mul<&DivisorClass> for i64 {
    type Output = DivisorClass;
    fn mul(self, rhs: &DivisorClass) -> DivisorClass {
        rhs.scaled(&int(self))
    }
}

impl Mul<&DivisorClass> for &Int {
    type Output = DivisorClass;
    fn mul(self, rhs: &DivisorClass) -> DivisorClass {
        rhs.scaled(self)
    }
}

/// Sums a list of classes; an empty list is the zero class of `lattice`.
pub fn sum_classes<'a>(
    lattice: &Arc<NsLattice>,
    classes: impl IntoIterator<Item = &'a DivisorClass>,
) -> DivisorClass {
    classes
        .into_iter()
        .fold(DivisorClass::zero(lattice), |acc, c| &acc + c)
}

/// `xᵀ · gram · y`.
pub fn intersect(x: &DivisorClass, y: &DivisorClass) -> Result<Int> {
    x.check_same(y)?;
    Ok(x.lattice.pair(&x.coords, &y.coords))
}

/// Degree of `x` against the polarization `h`; this is the slope μ of the
/// corresponding line bundle.
pub fn degree(x: &DivisorClass, h: &DivisorClass) -> Result<Int> {
    intersect(x, h)
}

/// Riemann–Roch on a K3: `χ(O(x)) = 2 + x²/2`.
pub fn chi_line(x: &DivisorClass) -> Int {
    // x² is even because the lattice is even
    int(2) + half(&x.square()).expect("even lattice has even squares")
}

/// Exact proportionality test: whether `α·x = β·y` has a solution with
/// `(α, β) ≠ (0, 0)`. Equivalent to all 2×2 minors of `[x; y]` vanishing.
pub fn proportional(x: &DivisorClass, y: &DivisorClass) -> Result<bool> {
    x.check_same(y)?;
    let n = x.coords.len();
    for i in 0..n {
        for j in i + 1..n {
            let minor = &x.coords[i] * &y.coords[j] - &x.coords[j] * &y.coords[i];
            if !minor.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether `x` is a nonnegative integer combination of `generators`.
///
/// Every generator must have positive degree against `h`, which bounds the
/// number of summands by `deg(x)`; the search is exhaustive within that bound.
pub fn in_positive_cone(
    x: &DivisorClass,
    generators: &[DivisorClass],
    h: &DivisorClass,
) -> Result<bool> {
    let mut degs = Vec::with_capacity(generators.len());
    for g in generators {
        g.check_same(x)?;
        let d = degree(g, h)?;
        if !d.is_positive() {
            return Err(Error::InvalidArgument(format!(
                "effective generator {g:?} has non-positive degree {d}"
            )));
        }
        degs.push(d);
    }
    if x.is_zero() {
        return Ok(true);
    }
    let target = degree(x, h)?;
    if !target.is_positive() {
        return Ok(false);
    }
    fn search(
        rest: &DivisorClass,
        budget: &Int,
        idx: usize,
        gens: &[DivisorClass],
        degs: &[Int],
    ) -> bool {
        if rest.is_zero() {
            return true;
        }
        if idx == gens.len() || !budget.is_positive() {
            return false;
        }
        let mut k = Int::zero();
        let mut left = rest.clone();
        let mut spent = Int::zero();
        while &spent <= budget {
            if search(&left, &(budget - &spent), idx + 1, gens, degs) {
                return true;
            }
            k += 1;
            left = &left - &gens[idx];
            spent += &degs[idx];
        }
        false
    }
    Ok(search(x, &target, 0, generators, &degs))
}
