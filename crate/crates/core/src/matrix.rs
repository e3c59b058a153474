//! Small dense matrices over the rationals.

use std::fmt;

use num_traits::{One, Zero};

use crate::arith::{format_rat, Rat};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    elems: Vec<Rat>, // row-major
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            elems: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut elems = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Dimension {
                    expected: c,
                    got: row.len(),
                });
            }
            elems.extend(row);
        }
        Ok(RatMatrix {
            rows: r,
            cols: c,
            elems,
        })
    }

    pub fn from_columns(cols: Vec<Vec<Rat>>) -> Result<Self> {
        Ok(Self::from_rows(cols)?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.elems[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension {
                expected: self.cols,
                got: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    out[(r, c)] += a * &rhs[(k, c)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        if v.len() != self.cols {
            return Err(Error::Dimension {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(Rat::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn scale(&self, s: &Rat) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            elems: self.elems.iter().map(|e| e * s).collect(),
        }
    }

    /// Determinant by Gaussian elimination over the rationals.
    pub fn det(&self) -> Result<Rat> {
        if !self.is_square() {
            return Err(Error::Dimension {
                expected: self.rows,
                got: self.cols,
            });
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rat::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !m[(r, col)].is_zero()) else {
                return Ok(Rat::zero());
            };
            if pivot != col {
                m.swap_rows(pivot, col);
                det = -det;
            }
            let p = m[(col, col)].clone();
            det *= &p;
            for r in col + 1..n {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let factor = &m[(r, col)] / &p;
                for c in col..n {
                    let delta = &factor * &m[(col, c)];
                    m[(r, c)] -= delta;
                }
            }
        }
        Ok(det)
    }

    /// Exact inverse by Gauss-Jordan elimination; `None` when singular.
    pub fn inverse(&self) -> Result<Option<RatMatrix>> {
        if !self.is_square() {
            return Err(Error::Dimension {
                expected: self.rows,
                got: self.cols,
            });
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !m[(r, col)].is_zero()) else {
                return Ok(None);
            };
            m.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
            let p = m[(col, col)].clone();
            for c in 0..n {
                m[(col, c)] /= &p;
                inv[(col, c)] /= &p;
            }
            for r in 0..n {
                if r == col || m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone();
                for c in 0..n {
                    let dm = &factor * &m[(col, c)];
                    m[(r, c)] -= dm;
                    let di = &factor * &inv[(col, c)];
                    inv[(r, c)] -= di;
                }
            }
        }
        Ok(Some(inv))
    }

    /// Solves `self · x = b` when the solution exists and is unique.
    pub fn solve_unique(&self, b: &[Rat]) -> Result<Option<Vec<Rat>>> {
        if b.len() != self.rows {
            return Err(Error::Dimension {
                expected: self.rows,
                got: b.len(),
            });
        }
        let n = self.cols;
        // augmented row reduction
        let mut aug = Self::zeros(self.rows, n + 1);
        for r in 0..self.rows {
            for c in 0..n {
                aug[(r, c)] = self[(r, c)].clone();
            }
            aug[(r, n)] = b[r].clone();
        }
        let mut pivot_row = 0;
        let mut pivots = Vec::new();
        for col in 0..n {
            let Some(p) = (pivot_row..aug.rows).find(|&r| !aug[(r, col)].is_zero()) else {
                return Ok(None); // free variable
            };
            aug.swap_rows(p, pivot_row);
            let pv = aug[(pivot_row, col)].clone();
            for c in 0..=n {
                aug[(pivot_row, c)] /= &pv;
            }
            for r in 0..aug.rows {
                if r == pivot_row || aug[(r, col)].is_zero() {
                    continue;
                }
                let factor = aug[(r, col)].clone();
                for c in 0..=n {
                    let d = &factor * &aug[(pivot_row, c)];
                    aug[(r, c)] -= d;
                }
            }
            pivots.push(pivot_row);
            pivot_row += 1;
        }
        // inconsistent rows below the pivots
        if (pivot_row..aug.rows).any(|r| !aug[(r, n)].is_zero()) {
            return Ok(None);
        }
        Ok(Some(pivots.iter().map(|&r| aug[(r, n)].clone()).collect()))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.elems.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rat;

    fn index(&self, (r, c): (usize, usize)) -> &Rat {
        &self.elems[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rat {
        &mut self.elems[r * self.cols + c]
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self
            .to_rows()
            .iter()
            .map(|r| r.iter().map(format_rat).collect())
            .collect();
        write!(f, "RatMatrix{rows:?}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn det_and_inverse() {
        let a = m(&[&[5, -12, 2], &[-2, 5, -1], &[0, 0, 1]]);
        assert_eq!(a.det().unwrap(), rat(1));
        let inv = a.inverse().unwrap().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), RatMatrix::identity(3));
        assert_eq!(inv.mul(&a).unwrap(), RatMatrix::identity(3));
    }

    #[test]
    fn singular() {
        let a = m(&[&[1, 2], &[2, 4]]);
        assert_eq!(a.det().unwrap(), rat(0));
        assert!(a.inverse().unwrap().is_none());
    }

    #[test]
    fn det_needs_pivoting() {
        let a = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.det().unwrap(), rat(-1));
        let b = m(&[&[2, 1], &[1, 3]]);
        let inv = b.inverse().unwrap().unwrap();
        assert_eq!(inv[(0, 0)], ratio(3, 5));
    }

    #[test]
    fn solve() {
        // columns ĥ = (5,2), ℓ̂ = (12,5) in (h, ℓ) coordinates
        let basis = m(&[&[5, 12], &[2, 5]]);
        let x = basis.solve_unique(&[rat(-2), rat(-1)]).unwrap().unwrap();
        assert_eq!(x, vec![rat(2), rat(-1)]);
        let tall = m(&[&[1], &[1]]);
        assert!(tall.solve_unique(&[rat(1), rat(2)]).unwrap().is_none());
        assert_eq!(tall.solve_unique(&[rat(3), rat(3)]).unwrap(), Some(vec![rat(3)]));
    }
}
