//! Exact dense linear algebra over a finite field: reduced row echelon
//! form, rank, nullspace, and span membership. All elimination is exact
//! Gaussian elimination over field elements; nothing is approximated.

use std::sync::Arc;

use crate::field::{FieldElement, FieldSpec};

/// A dense matrix over one field, row major.
#[derive(Clone)]
pub struct FMatrix {
    spec: Arc<FieldSpec>,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl FMatrix {
    pub fn zeros(spec: &Arc<FieldSpec>, rows: usize, cols: usize) -> Self {
        let data = vec![FieldElement::zero(spec); rows * cols];
        FMatrix {
            spec: Arc::clone(spec),
            rows,
            cols,
            data,
        }
    }

    pub fn from_rows(spec: &Arc<FieldSpec>, rows: Vec<Vec<FieldElement>>) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * ncols);
        let nrows = rows.len();
        for row in rows {
            assert_eq!(row.len(), ncols, "ragged rows");
            data.extend(row);
        }
        FMatrix {
            spec: Arc::clone(spec),
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &FieldElement {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            let Some(pr) = (row..self.rows).find(|&r| !self.at(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(row, pr);
            let inv = self.at(row, col).inv().expect("pivot nonzero");
            for c in col..self.cols {
                let v = self.at(row, c).mul(&inv);
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r != row && !self.at(r, col).is_zero() {
                    let factor = self.at(r, col).clone();
                    for c in col..self.cols {
                        let v = self.at(r, c).sub(&factor.mul(self.at(row, c)));
                        self.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
            if row == self.rows {
                break;
            }
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// A basis of the right nullspace `{ v : M v = 0 }`.
    pub fn nullspace(&self) -> Vec<Vec<FieldElement>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_rows: Vec<(usize, usize)> = pivots
            .iter()
            .copied()
            .enumerate()
            .map(|(r, c)| (c, r))
            .collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![FieldElement::zero(&self.spec); self.cols];
            v[fc] = FieldElement::one(&self.spec);
            for &(pc, pr) in &pivot_rows {
                // pivot variable = -(row entry at the free column)
                v[pc] = m.at(pr, fc).neg();
            }
            basis.push(v);
        }
        basis
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

/// A row space kept in reduced echelon form, supporting incremental inserts
/// and membership queries. Used to test span containment and closure.
pub struct RowSpan {
    spec: Arc<FieldSpec>,
    cols: usize,
    /// Rows in echelon form, sorted by pivot column.
    rows: Vec<Vec<FieldElement>>,
    pivots: Vec<usize>,
}

impl RowSpan {
    pub fn new(spec: &Arc<FieldSpec>, cols: usize) -> Self {
        RowSpan {
            spec: Arc::clone(spec),
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the span; the remainder is zero iff `v` lies in it.
    pub fn reduce(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(v.len(), self.cols);
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let factor = v[p].clone();
                for c in p..self.cols {
                    v[c] = v[c].sub(&factor.mul(&row[c]));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[FieldElement]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Inserts a vector; returns false if it was already in the span.
    pub fn insert(&mut self, v: &[FieldElement]) -> bool {
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].inv().expect("nonzero");
        for entry in r.iter_mut().skip(p) {
            *entry = entry.mul(&inv);
        }
        // Back-substitute into existing rows to stay fully reduced.
        for (row, &rp) in self.rows.iter_mut().zip(&self.pivots) {
            debug_assert!(rp != p);
            if !row[p].is_zero() {
                let factor = row[p].clone();
                for c in p..self.cols {
                    row[c] = row[c].sub(&factor.mul(&r[c]));
                }
            }
        }
        let at = self
            .pivots
            .iter()
            .position(|&q| q > p)
            .unwrap_or(self.pivots.len());
        self.pivots.insert(at, p);
        self.rows.insert(at, r);
        true
    }

    /// A basis of `{ v : r . v = 0 for every row r in the span }`.
    ///
    /// Viewing the accumulated rows as constraints, this is the nullspace;
    /// inserting rows incrementally keeps the cost proportional to the rank
    /// even when the constraint list is much longer than the width.
    pub fn constraint_nullspace(&self) -> Vec<Vec<FieldElement>> {
        let pivot_set: Vec<usize> = self.pivots.clone();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![FieldElement::zero(&self.spec); self.cols];
            v[fc] = FieldElement::one(&self.spec);
            for (row, &pc) in self.rows.iter().zip(&self.pivots) {
                v[pc] = row[fc].neg();
            }
            basis.push(v);
        }
        basis
    }
}
