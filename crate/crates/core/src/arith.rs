//! Exact rational linear algebra.
//!
//! Everything downstream (hom spaces, rank profiles, tangent-map ranks,
//! localization sums) runs on arbitrary-precision rationals; there is no
//! floating point anywhere in this crate.

use num::rational::BigRational;
use num::{BigInt, One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Dense matrix over exact rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut m = Mat::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Mat::from_fn(rows, cols, |i, j| rat(entries[i * cols + j]))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        let mut out = Mat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    if other[(k, j)].is_zero() {
                        continue;
                    }
                    let prod = &self[(i, k)] * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        Mat::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols);
        Mat::from_fn(self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self[(i, j)].clone()
            } else {
                other[(i - self.rows, j)].clone()
            }
        })
    }

    /// Block diagonal sum.
    pub fn block_diag(&self, other: &Mat) -> Mat {
        Mat::from_fn(self.rows + other.rows, self.cols + other.cols, |i, j| {
            if i < self.rows && j < self.cols {
                self[(i, j)].clone()
            } else if i >= self.rows && j >= self.cols {
                other[(i - self.rows, j - self.cols)].clone()
            } else {
                Rat::zero()
            }
        })
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Row echelon form in place; returns the pivot columns.
    fn echelonize(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            // largest-magnitude pivot keeps intermediate entries tame
            let pivot = (row..self.rows)
                .filter(|&r| !self[(r, col)].is_zero())
                .max_by(|&a, &b| self[(a, col)].abs().cmp(&self[(b, col)].abs()));
            let Some(p) = pivot else { continue };
            self.swap_rows(row, p);
            let inv = self[(row, col)].clone();
            for j in col..self.cols {
                let v = self[(row, j)].clone() / inv.clone();
                self[(row, j)] = v;
            }
            for r in 0..self.rows {
                if r != row && !self[(r, col)].is_zero() {
                    let factor = self[(r, col)].clone();
                    for j in col..self.cols {
                        let delta = &factor * &self[(row, j)];
                        self[(r, j)] -= delta;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.echelonize().len()
    }

    /// Columns form a basis of the kernel of `self`.
    pub fn kernel_basis(&self) -> Mat {
        let mut m = self.clone();
        let pivots = m.echelonize();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Mat::zero(self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            out[(fc, k)] = Rat::one();
            for (r, &pc) in pivots.iter().enumerate() {
                out[(pc, k)] = -m[(r, fc)].clone();
            }
        }
        out
    }

    /// Columns form a basis of the column space of `self`.
    pub fn image_basis(&self) -> Mat {
        let mut m = self.clone();
        let pivots = m.echelonize();
        let mut out = Mat::zero(self.rows, pivots.len());
        for (k, &c) in pivots.iter().enumerate() {
            for i in 0..self.rows {
                out[(i, k)] = self[(i, c)].clone();
            }
        }
        out
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    pub fn inverse(&self) -> Option<Mat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = self.hstack(&Mat::identity(n));
        let pivots = aug.echelonize();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        Some(Mat::from_fn(n, n, |i, j| aug[(i, n + j)].clone()))
    }

    pub fn column(&self, j: usize) -> Mat {
        Mat::from_fn(self.rows, 1, |i, _| self[(i, j)].clone())
    }
}

/// Coordinates of the column vector `v` in the column basis, if it lies
/// in the span.
pub fn express_in_basis(basis: &Mat, v: &Mat) -> Option<Vec<Rat>> {
    let mut aug = basis.hstack(v);
    let pivots = aug.echelonize();
    if pivots.contains(&basis.cols) {
        return None;
    }
    let mut coords = vec![Rat::zero(); basis.cols];
    for (r, &c) in pivots.iter().enumerate() {
        coords[c] = aug[(r, basis.cols)].clone();
    }
    Some(coords)
}

/// Extend the columns of `span` to a basis of the column space of
/// `within` (`within` must contain `span`).
pub fn complete_basis(span: &Mat, within: &Mat) -> Mat {
    let mut basis = span.clone();
    let target = within.rank();
    for j in 0..within.cols {
        if basis.cols == target {
            break;
        }
        let cand = within.column(j);
        if basis.hstack(&cand).rank() > basis.rank() {
            basis = basis.hstack(&cand);
        }
    }
    basis
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

/// Dimension of `span(a) + span(b)` where the columns span each subspace.
pub fn dim_sum(a: &Mat, b: &Mat) -> usize {
    a.hstack(b).rank()
}

/// Dimension of `span(a) ∩ span(b)`.
pub fn dim_intersection(a: &Mat, b: &Mat) -> usize {
    a.rank() + b.rank() - dim_sum(a, b)
}

/// Basis of `span(a) ∩ span(b)` (columns).
pub fn intersection_basis(a: &Mat, b: &Mat) -> Mat {
    // x in the intersection iff x = a·u = b·v; solve [a | -b]·(u,v) = 0.
    let mut neg_b = b.clone();
    for i in 0..neg_b.rows {
        for j in 0..neg_b.cols {
            let v = -neg_b[(i, j)].clone();
            neg_b[(i, j)] = v;
        }
    }
    let ker = a.hstack(&neg_b).kernel_basis();
    let u_part = Mat::from_fn(a.cols, ker.cols, |i, j| ker[(i, j)].clone());
    a.mul(&u_part).image_basis()
}

/// Basis of the preimage `f^{-1}(span(target))` for a linear map `f`.
pub fn preimage_basis(f: &Mat, target: &Mat) -> Mat {
    // f(x) ∈ span(target) iff (x, y) solves f·x - target·y = 0.
    let mut neg_t = target.clone();
    for i in 0..neg_t.rows {
        for j in 0..neg_t.cols {
            let v = -neg_t[(i, j)].clone();
            neg_t[(i, j)] = v;
        }
    }
    let ker = f.hstack(&neg_t).kernel_basis();
    let x_part = Mat::from_fn(f.cols, ker.cols, |i, j| ker[(i, j)].clone());
    x_part.image_basis()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_kernel() {
        let m = Mat::from_i64(2, 3, &[1, 2, 3, 2, 4, 6]);
        assert_eq!(m.rank(), 1);
        let k = m.kernel_basis();
        assert_eq!(k.cols, 2);
        assert!(m.mul(&k).is_zero());
    }

    #[test]
    fn image_and_intersection() {
        let a = Mat::from_i64(3, 2, &[1, 0, 0, 1, 0, 0]);
        let b = Mat::from_i64(3, 2, &[0, 0, 1, 0, 0, 1]);
        assert_eq!(dim_sum(&a, &b), 3);
        assert_eq!(dim_intersection(&a, &b), 1);
        let i = intersection_basis(&a, &b);
        assert_eq!(i.cols, 1);
        // the intersection is the e2 axis
        assert!(i[(0, 0)].is_zero() && i[(2, 0)].is_zero() && !i[(1, 0)].is_zero());
    }

    #[test]
    fn preimage() {
        // f: C^3 -> C^2 projection to first two coords; preimage of e1 axis
        let f = Mat::from_i64(2, 3, &[1, 0, 0, 0, 1, 0]);
        let t = Mat::from_i64(2, 1, &[1, 0]);
        let p = preimage_basis(&f, &t);
        assert_eq!(p.cols, 2);
        // preimage = span(e1, e3); check f(p) lands in span(t)
        assert_eq!(dim_sum(&f.mul(&p), &t), 1);
    }

    #[test]
    fn zero_sized() {
        let m = Mat::zero(0, 3);
        assert_eq!(m.rank(), 0);
        assert_eq!(m.kernel_basis().cols, 3);
        let n = Mat::zero(3, 0);
        assert_eq!(n.rank(), 0);
        assert_eq!(n.kernel_basis().cols, 0);
    }
}
