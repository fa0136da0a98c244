//! Exact linear algebra over rationals: just enough for nullspaces of
//! sampled determining systems and for expressing a vector in a basis.

use alloc::vec;
use alloc::vec::Vec;

use crate::numerics::rational::Rational;

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(row, p);
            let inv = self.get(row, col).recip("pivot").expect("nonzero pivot");
            for c in col..self.cols {
                let v = self.get(row, c) * &inv;
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r != row && !self.get(r, col).is_zero() {
                    let factor = self.get(r, col).clone();
                    for c in col..self.cols {
                        let v = self.get(r, c) - &(&factor * self.get(row, c));
                        self.set(r, c, v);
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
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Canonical basis of the right nullspace (free variables set to one,
    /// in column order), derived from the RREF. Two matrices with the
    /// same row space produce identical bases.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_row: alloc::collections::BTreeMap<usize, usize> =
            pivots.iter().copied().enumerate().map(|(r, c)| (c, r)).collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_row.contains_key(&free) {
                continue;
            }
            let mut v = vec![Rational::zero(); self.cols];
            v[free] = Rational::one();
            for (&pc, &pr) in &pivot_row {
                v[pc] = -m.get(pr, free);
            }
            basis.push(v);
        }
        basis
    }
}

/// Exact coordinates of `target` in the span of `basis`, or `None` when
/// it does not lie there.
pub fn express_in_basis(basis: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let dim = target.len();
    assert!(basis.iter().all(|b| b.len() == dim), "basis length mismatch");
    let k = basis.len();
    // Augmented system [B | target] with basis vectors as columns.
    let mut m = RatMatrix::zeros(dim, k + 1);
    for (j, b) in basis.iter().enumerate() {
        for (i, v) in b.iter().enumerate() {
            m.set(i, j, v.clone());
        }
    }
    for (i, v) in target.iter().enumerate() {
        m.set(i, k, v.clone());
    }
    let pivots = m.rref();
    if pivots.contains(&k) {
        return None; // inconsistent
    }
    let mut coords = vec![Rational::zero(); k];
    for (row, &col) in pivots.iter().enumerate() {
        coords[col] = m.get(row, k).clone();
    }
    Some(coords)
}
