use std::collections::HashMap;

use super::bits::BitVec;

/// Dense matrix over the two-element field stored as packed bit rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Z2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

impl Z2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BitVec::zeros(cols); rows] }
    }

    pub fn from_rows(cols: usize, data: Vec<BitVec>) -> Self {
        assert!(data.iter().all(|r| r.len() == cols), "row length mismatch");
        Self { rows: data.len(), cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.data[i]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    pub fn toggle(&mut self, i: usize, j: usize) {
        self.data[i].toggle(j);
    }

    pub fn transpose(&self) -> Z2Matrix {
        let mut t = Z2Matrix::zeros(self.cols, self.rows);
        for (i, row) in self.data.iter().enumerate() {
            for j in row.ones() {
                t.data[j].set(i, true);
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        let mut out = BitVec::zeros(self.rows);
        for (i, row) in self.data.iter().enumerate() {
            if row.dot(v) {
                out.set(i, true);
            }
        }
        out
    }

    pub fn mul(&self, other: &Z2Matrix) -> Z2Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Z2Matrix::zeros(self.rows, other.cols);
        for (i, row) in self.data.iter().enumerate() {
            for k in row.ones() {
                out.data[i].xor_assign(&other.data[k]);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVec::is_zero)
    }

    pub fn rank(&self) -> usize {
        let mut ech = Echelon::new(self.cols);
        self.data.iter().filter(|r| ech.insert(r)).count()
    }

    /// A basis of the null space `{x : Mx = 0}`.
    pub fn kernel(&self) -> Vec<BitVec> {
        // Reduced row echelon form, pivots in increasing column order.
        let mut rows: Vec<BitVec> = self.data.iter().filter(|r| !r.is_zero()).cloned().collect();
        let mut pivots: Vec<usize> = Vec::new();
        let mut r = 0;
        for col in 0..self.cols {
            let Some(p) = (r..rows.len()).find(|&i| rows[i].get(col)) else { continue };
            rows.swap(r, p);
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        rows.truncate(r);
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut x = BitVec::unit(self.cols, free);
                for (row, &p) in rows.iter().zip(&pivots) {
                    if row.get(free) {
                        x.set(p, true);
                    }
                }
                x
            })
            .collect()
    }
}

/// Incrementally built row echelon basis of a subspace, keyed by the lowest
/// set bit of each stored vector.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    len: usize,
    rows: Vec<BitVec>,
    by_pivot: HashMap<usize, usize>,
}

impl Echelon {
    pub fn new(len: usize) -> Self {
        Self { len, rows: Vec::new(), by_pivot: HashMap::new() }
    }

    pub fn from_vectors<'a>(len: usize, vs: impl IntoIterator<Item = &'a BitVec>) -> Self {
        let mut e = Self::new(len);
        for v in vs {
            e.insert(v);
        }
        e
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Residue of `v` after elimination against the stored basis; zero iff
    /// `v` lies in the span.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.len, "length mismatch");
        let mut v = v.clone();
        while let Some(p) = v.first_one() {
            match self.by_pivot.get(&p) {
                Some(&i) => v.xor_assign(&self.rows[i]),
                None => break,
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span; returns whether it was independent.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        let r = self.reduce(v);
        match r.first_one() {
            None => false,
            Some(p) => {
                self.by_pivot.insert(p, self.rows.len());
                self.rows.push(r);
                true
            }
        }
    }
}

/// Representatives of a basis of `span(space) / span(sub)`, chosen among
/// the given `space` vectors. `sub` must lie inside `span(space)`.
pub fn quotient_basis(len: usize, sub: &[BitVec], space: &[BitVec]) -> Vec<BitVec> {
    let mut ech = Echelon::from_vectors(len, sub);
    space.iter().filter(|v| ech.insert(v)).cloned().collect()
}
