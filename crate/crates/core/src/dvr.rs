//! A truncated discrete valuation ring `R_N = F[[pi]]/(pi^N)` over a finite
//! residue field, with exact Smith normal form, lattices, and quotient
//! dimensions.
//!
//! Lattices are stored as (shift, basis) pairs: the lattice is
//! pi^shift * colspan(basis). Negative shifts make pi^(-1)-scaled lattices
//! representable without leaving the truncated ring. Every identity below
//! is an identity in R_N; a Smith diagonal entry of valuation >= N is
//! reported as insufficient truncation, never silently treated as zero.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::field::{element_from_coeffs, FieldElement, FieldError, FieldSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DvrError {
    /// A quantity of valuation >= N appeared where its exact valuation matters.
    InsufficientTruncation,
    DivisionNotExact,
    NotAUnit,
    /// A lattice basis that is singular at truncation level N.
    SingularMatrix,
    NotContained,
    Field(FieldError),
    Shape(String),
}

impl fmt::Display for DvrError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DvrError::InsufficientTruncation => write!(f, "insufficient truncation level"),
            DvrError::DivisionNotExact => write!(f, "division by a pi power is not exact"),
            DvrError::NotAUnit => write!(f, "element is not a unit"),
            DvrError::SingularMatrix => write!(f, "singular lattice matrix"),
            DvrError::NotContained => write!(f, "lattice is not contained in the target"),
            DvrError::Field(e) => write!(f, "{}", e),
            DvrError::Shape(msg) => write!(f, "shape mismatch: {}", msg),
        }
    }
}

impl std::error::Error for DvrError {}

impl From<FieldError> for DvrError {
    fn from(e: FieldError) -> Self {
        DvrError::Field(e)
    }
}

/// `R_N = residue[[pi]] / (pi^N)`.
#[derive(Debug)]
pub struct TruncatedDvr {
    residue: Arc<FieldSpec>,
    level: usize,
}

impl TruncatedDvr {
    pub fn new(residue: &Arc<FieldSpec>, level: usize) -> Arc<Self> {
        assert!(level >= 1, "truncation level must be at least 1");
        Arc::new(TruncatedDvr {
            residue: Arc::clone(residue),
            level,
        })
    }

    pub fn residue(&self) -> &Arc<FieldSpec> {
        &self.residue
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Number of elements, |residue|^N.
    pub fn size(&self) -> u128 {
        self.residue.size().pow(self.level as u32)
    }
}

impl PartialEq for TruncatedDvr {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level && *self.residue == *other.residue
    }
}

impl Eq for TruncatedDvr {}

/// An element of R_N: a polynomial in pi of degree < N over the residue
/// field, low degree first.
#[derive(Clone)]
pub struct DvrElement {
    ring: Arc<TruncatedDvr>,
    coeffs: Vec<FieldElement>,
}

impl DvrElement {
    pub fn zero(ring: &Arc<TruncatedDvr>) -> Self {
        let coeffs = vec![FieldElement::zero(ring.residue()); ring.level()];
        DvrElement {
            ring: Arc::clone(ring),
            coeffs,
        }
    }

    pub fn one(ring: &Arc<TruncatedDvr>) -> Self {
        let mut el = Self::zero(ring);
        el.coeffs[0] = FieldElement::one(ring.residue());
        el
    }

    pub fn from_field(ring: &Arc<TruncatedDvr>, value: FieldElement) -> Self {
        assert!(
            **value.spec() == **ring.residue(),
            "coefficient from the wrong field"
        );
        let mut el = Self::zero(ring);
        el.coeffs[0] = value;
        el
    }

    /// pi^k, or zero when k >= N.
    pub fn pi_pow(ring: &Arc<TruncatedDvr>, k: usize) -> Self {
        let mut el = Self::zero(ring);
        if k < ring.level() {
            el.coeffs[k] = FieldElement::one(ring.residue());
        }
        el
    }

    pub fn from_coeffs(ring: &Arc<TruncatedDvr>, coeffs: Vec<FieldElement>) -> Self {
        assert!(coeffs.len() <= ring.level());
        let mut c = coeffs;
        while c.len() < ring.level() {
            c.push(FieldElement::zero(ring.residue()));
        }
        DvrElement {
            ring: Arc::clone(ring),
            coeffs: c,
        }
    }

    pub fn ring(&self) -> &Arc<TruncatedDvr> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &FieldElement {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Valuation: index of the first nonzero pi digit, None for zero.
    pub fn val(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    fn assert_same_ring(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring,
            "mixed truncated rings"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_ring(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.add(b))
            .collect();
        DvrElement {
            ring: Arc::clone(&self.ring),
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_same_ring(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.sub(b))
            .collect();
        DvrElement {
            ring: Arc::clone(&self.ring),
            coeffs,
        }
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.neg()).collect();
        DvrElement {
            ring: Arc::clone(&self.ring),
            coeffs,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_ring(other);
        let n = self.ring.level();
        let spec = self.ring.residue();
        let mut coeffs = vec![FieldElement::zero(spec); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        DvrElement {
            ring: Arc::clone(&self.ring),
            coeffs,
        }
    }

    /// Multiplication by pi^k (digits shift up; the top k digits are lost).
    pub fn times_pi(&self, k: usize) -> Self {
        let n = self.ring.level();
        let spec = self.ring.residue();
        let mut coeffs = vec![FieldElement::zero(spec); n];
        if k < n {
            coeffs[k..].clone_from_slice(&self.coeffs[..n - k]);
        }
        DvrElement {
            ring: Arc::clone(&self.ring),
            coeffs,
        }
    }

    /// Exact division by pi^k; errors if any of the low k digits is nonzero.
    pub fn div_pi(&self, k: usize) -> Result<Self, DvrError> {
        if self.coeffs.iter().take(k).any(|c| !c.is_zero()) {
            return Err(DvrError::DivisionNotExact);
        }
        let n = self.ring.level();
        let spec = self.ring.residue();
        let mut coeffs = vec![FieldElement::zero(spec); n];
        coeffs[..n - k].clone_from_slice(&self.coeffs[k..]);
        Ok(DvrElement {
            ring: Arc::clone(&self.ring),
            coeffs,
        })
    }

    /// Inverse of a unit (valuation 0), digit by digit.
    pub fn unit_inverse(&self) -> Result<Self, DvrError> {
        if self.val() != Some(0) {
            return Err(DvrError::NotAUnit);
        }
        let n = self.ring.level();
        let spec = self.ring.residue();
        let lead_inv = self.coeffs[0].inv().expect("unit leading digit");
        let mut out = vec![FieldElement::zero(spec); n];
        out[0] = lead_inv.clone();
        for k in 1..n {
            let mut acc = FieldElement::zero(spec);
            for i in 1..=k {
                if !self.coeffs[i].is_zero() {
                    acc = acc.add(&self.coeffs[i].mul(&out[k - i]));
                }
            }
            out[k] = lead_inv.mul(&acc).neg();
        }
        Ok(DvrElement {
            ring: Arc::clone(&self.ring),
            coeffs: out,
        })
    }

    /// Entrywise Frobenius (q-power on every pi digit), iterated `twist` times.
    pub fn frobenius(&self, twist: u32) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c.frobenius_pow(twist)).collect();
        DvrElement {
            ring: Arc::clone(&self.ring),
            coeffs,
        }
    }
}

impl PartialEq for DvrElement {
    fn eq(&self, other: &Self) -> bool {
        *self.ring == *other.ring && self.coeffs == other.coeffs
    }
}

impl Eq for DvrElement {}

impl fmt::Debug for DvrElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{:?}*pi^{}", c, i)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Serialize for DvrElement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let digits: Vec<&[u64]> = self.coeffs.iter().map(|c| c.coeffs()).collect();
        digits.serialize(serializer)
    }
}

/// Enumerates all elements of R_N (residue size ^ N must be small).
pub fn enumerate_ring(ring: &Arc<TruncatedDvr>) -> Result<Vec<DvrElement>, DvrError> {
    if ring.size() > crate::field::ENUMERATION_CAP {
        return Err(DvrError::Field(FieldError::EnumerationCapExceeded(
            ring.size(),
        )));
    }
    let field_elems: Vec<FieldElement> = crate::field::enumerate(ring.residue())?.collect();
    let mut out: Vec<DvrElement> = vec![DvrElement::zero(ring)];
    for digit in 0..ring.level() {
        let mut next = Vec::with_capacity(out.len() * field_elems.len());
        for base in &out {
            for fe in &field_elems {
                let mut el = base.clone();
                el.coeffs[digit] = fe.clone();
                next.push(el);
            }
        }
        out = next;
    }
    Ok(out)
}

/// A dense matrix over R_N, row major.
#[derive(Clone, PartialEq, Eq)]
pub struct DvrMatrix {
    ring: Arc<TruncatedDvr>,
    rows: usize,
    cols: usize,
    data: Vec<DvrElement>,
}

impl DvrMatrix {
    pub fn zeros(ring: &Arc<TruncatedDvr>, rows: usize, cols: usize) -> Self {
        let data = vec![DvrElement::zero(ring); rows * cols];
        DvrMatrix {
            ring: Arc::clone(ring),
            rows,
            cols,
            data,
        }
    }

    pub fn identity(ring: &Arc<TruncatedDvr>, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, DvrElement::one(ring));
        }
        m
    }

    /// Scalar matrix pi^k * Id.
    pub fn pi_identity(ring: &Arc<TruncatedDvr>, n: usize, k: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, DvrElement::pi_pow(ring, k));
        }
        m
    }

    pub fn ring(&self) -> &Arc<TruncatedDvr> {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &DvrElement {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: DvrElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.add(b))
            .collect();
        DvrMatrix {
            ring: Arc::clone(&self.ring),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.sub(b))
            .collect();
        DvrMatrix {
            ring: Arc::clone(&self.ring),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must match");
        let mut out = Self::zeros(&self.ring, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.at(k, c);
                    if !b.is_zero() {
                        let v = out.at(r, c).add(&a.mul(b));
                        out.set(r, c, v);
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, s: &DvrElement) -> Self {
        let data = self.data.iter().map(|a| a.mul(s)).collect();
        DvrMatrix {
            ring: Arc::clone(&self.ring),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale_pi(&self, k: usize) -> Self {
        let data = self.data.iter().map(|a| a.times_pi(k)).collect();
        DvrMatrix {
            ring: Arc::clone(&self.ring),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn div_pi(&self, k: usize) -> Result<Self, DvrError> {
        let data: Result<Vec<_>, _> = self.data.iter().map(|a| a.div_pi(k)).collect();
        Ok(DvrMatrix {
            ring: Arc::clone(&self.ring),
            rows: self.rows,
            cols: self.cols,
            data: data?,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }

    /// Entrywise Frobenius, iterated `twist` times.
    pub fn frobenius(&self, twist: u32) -> Self {
        let data = self.data.iter().map(|a| a.frobenius(twist)).collect();
        DvrMatrix {
            ring: Arc::clone(&self.ring),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn column(&self, c: usize) -> Vec<DvrElement> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    /// Serialized form: row-major entries, each a list of pi digits, each
    /// digit a field-element coefficient list.
    pub fn to_repr(&self) -> Vec<Vec<Vec<u64>>> {
        self.data
            .iter()
            .map(|el| el.coeffs().iter().map(|c| c.coeffs().to_vec()).collect())
            .collect()
    }

    pub fn from_repr(
        ring: &Arc<TruncatedDvr>,
        rows: usize,
        cols: usize,
        data: &[Vec<Vec<u64>>],
    ) -> Result<Self, DvrError> {
        if data.len() != rows * cols {
            return Err(DvrError::Shape(format!(
                "expected {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        let mut entries = Vec::with_capacity(data.len());
        for digits in data {
            if digits.len() > ring.level() {
                return Err(DvrError::Shape("too many pi digits".into()));
            }
            let coeffs: Result<Vec<_>, _> = digits
                .iter()
                .map(|c| element_from_coeffs(ring.residue(), c))
                .collect();
            entries.push(DvrElement::from_coeffs(ring, coeffs?));
        }
        Ok(DvrMatrix {
            ring: Arc::clone(ring),
            rows,
            cols,
            data: entries,
        })
    }
}

impl fmt::Debug for DvrMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for r in 0..self.rows {
            write!(f, "  [")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:?}", self.at(r, c))?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Smith normal form data for a matrix M over R_N:
/// row_ops * M * col_ops = diag(pi^v) with invertible transforms.
pub struct SmithForm {
    /// Diagonal valuations, None when the diagonal entry is zero in R_N.
    pub diag_vals: Vec<Option<usize>>,
    pub row_ops: DvrMatrix,
    pub col_ops: DvrMatrix,
}

impl SmithForm {
    /// All diagonal valuations, erroring when any is unresolved at level N.
    pub fn finite_vals(&self) -> Result<Vec<usize>, DvrError> {
        self.diag_vals
            .iter()
            .map(|v| v.ok_or(DvrError::InsufficientTruncation))
            .collect()
    }
}

/// Smith normal form by exact elimination: repeatedly move a minimal
/// valuation entry to the pivot, normalize it to a pi power, and clear its
/// row and column.
pub fn smith(m: &DvrMatrix) -> SmithForm {
    let ring = m.ring();
    let (rows, cols) = (m.rows(), m.cols());
    let mut w = m.clone();
    let mut row_ops = DvrMatrix::identity(ring, rows);
    let mut col_ops = DvrMatrix::identity(ring, cols);
    let steps = rows.min(cols);
    let mut diag_vals = vec![None; steps];
    #[allow(clippy::needless_range_loop)]
    for t in 0..steps {
        // Minimal valuation entry in the remaining block.
        let mut best: Option<(usize, usize, usize)> = None;
        for r in t..rows {
            for c in t..cols {
                if let Some(v) = w.at(r, c).val() {
                    if best.is_none_or(|(_, _, bv)| v < bv) {
                        best = Some((r, c, v));
                    }
                }
            }
        }
        let Some((pr, pc, v)) = best else {
            break; // remaining block is zero; valuations stay None
        };
        swap_rows(&mut w, t, pr);
        swap_rows(&mut row_ops, t, pr);
        swap_cols(&mut w, t, pc);
        swap_cols(&mut col_ops, t, pc);
        // Normalize the pivot to pi^v.
        let unit = w.at(t, t).div_pi(v).expect("pivot valuation");
        let unit_inv = unit.unit_inverse().expect("pivot unit part");
        scale_row(&mut w, t, &unit_inv);
        scale_row(&mut row_ops, t, &unit_inv);
        // Clear the pivot column with row operations.
        for r in 0..rows {
            if r == t || w.at(r, t).is_zero() {
                continue;
            }
            let factor = w.at(r, t).div_pi(v).expect("minimal pivot divides");
            row_axpy(&mut w, r, t, &factor);
            row_axpy(&mut row_ops, r, t, &factor);
        }
        // Clear the pivot row with column operations.
        for c in 0..cols {
            if c == t || w.at(t, c).is_zero() {
                continue;
            }
            let factor = w.at(t, c).div_pi(v).expect("minimal pivot divides");
            col_axpy(&mut w, c, t, &factor);
            col_axpy(&mut col_ops, c, t, &factor);
        }
        diag_vals[t] = Some(v);
    }
    SmithForm {
        diag_vals,
        row_ops,
        col_ops,
    }
}

fn swap_rows(m: &mut DvrMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for c in 0..m.cols() {
        let va = m.at(a, c).clone();
        let vb = m.at(b, c).clone();
        m.set(a, c, vb);
        m.set(b, c, va);
    }
}

fn swap_cols(m: &mut DvrMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for r in 0..m.rows() {
        let va = m.at(r, a).clone();
        let vb = m.at(r, b).clone();
        m.set(r, a, vb);
        m.set(r, b, va);
    }
}

fn scale_row(m: &mut DvrMatrix, r: usize, s: &DvrElement) {
    for c in 0..m.cols() {
        let v = m.at(r, c).mul(s);
        m.set(r, c, v);
    }
}

/// row r -= factor * row t
fn row_axpy(m: &mut DvrMatrix, r: usize, t: usize, factor: &DvrElement) {
    for c in 0..m.cols() {
        let v = m.at(r, c).sub(&factor.mul(m.at(t, c)));
        m.set(r, c, v);
    }
}

/// col c -= factor * col t
fn col_axpy(m: &mut DvrMatrix, c: usize, t: usize, factor: &DvrElement) {
    for r in 0..m.rows() {
        let v = m.at(r, c).sub(&factor.mul(m.at(r, t)));
        m.set(r, c, v);
    }
}

/// Solves M X = Y over R_N for square M, when a solution exists.
pub fn solve_matrix(m: &DvrMatrix, y: &DvrMatrix, sf: &SmithForm) -> Result<DvrMatrix, DvrError> {
    assert_eq!(m.rows(), m.cols());
    assert_eq!(m.rows(), y.rows());
    let transformed = sf.row_ops.mul(y);
    let mut z = DvrMatrix::zeros(m.ring(), m.cols(), y.cols());
    for i in 0..m.rows() {
        match sf.diag_vals[i] {
            Some(v) => {
                for c in 0..y.cols() {
                    let entry = transformed
                        .at(i, c)
                        .div_pi(v)
                        .map_err(|_| DvrError::NotContained)?;
                    z.set(i, c, entry);
                }
            }
            None => {
                // Row of an exactly-zero diagonal: solvable only against zero.
                for c in 0..y.cols() {
                    if !transformed.at(i, c).is_zero() {
                        return Err(DvrError::NotContained);
                    }
                }
            }
        }
    }
    Ok(sf.col_ops.mul(&z))
}

/// A full lattice in the d-dimensional space: pi^shift * colspan(basis),
/// with the basis nonsingular at truncation level N.
#[derive(Clone)]
pub struct Lattice {
    shift: i64,
    basis: DvrMatrix,
    diag_vals: Vec<usize>,
    row_ops: DvrMatrix,
    col_ops: DvrMatrix,
}

impl Lattice {
    pub fn new(shift: i64, basis: DvrMatrix) -> Result<Self, DvrError> {
        assert_eq!(basis.rows(), basis.cols(), "lattice basis must be square");
        let sf = smith(&basis);
        let diag_vals = sf.finite_vals().map_err(|_| DvrError::SingularMatrix)?;
        Ok(Lattice {
            shift,
            basis,
            diag_vals,
            row_ops: sf.row_ops,
            col_ops: sf.col_ops,
        })
    }

    /// The standard lattice R^d.
    pub fn standard(ring: &Arc<TruncatedDvr>, d: usize) -> Self {
        Lattice::new(0, DvrMatrix::identity(ring, d)).expect("identity is nonsingular")
    }

    pub fn ring(&self) -> &Arc<TruncatedDvr> {
        self.basis.ring()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn basis(&self) -> &DvrMatrix {
        &self.basis
    }

    /// pi^k * self (k may be negative).
    pub fn scaled(&self, k: i64) -> Self {
        let mut out = self.clone();
        out.shift += k;
        out
    }

    fn smith_form(&self) -> SmithForm {
        SmithForm {
            diag_vals: self.diag_vals.iter().map(|&v| Some(v)).collect(),
            row_ops: self.row_ops.clone(),
            col_ops: self.col_ops.clone(),
        }
    }

    /// g * self for a matrix g acting on the ambient space.
    pub fn apply(&self, g: &DvrMatrix) -> Result<Self, DvrError> {
        Lattice::new(self.shift, g.mul(&self.basis))
    }

    /// Entrywise Frobenius image (pi is fixed by Frobenius).
    pub fn frobenius(&self, twist: u32) -> Self {
        Lattice::new(self.shift, self.basis.frobenius(twist)).expect("Frobenius preserves rank")
    }

    /// dim over the residue field of self / sub, erroring if sub is not
    /// contained in self or the truncation cannot resolve the quotient.
    pub fn quotient_dim(&self, sub: &Lattice) -> Result<usize, DvrError> {
        assert_eq!(self.dim(), sub.dim());
        let common = self.shift.min(sub.shift);
        let l1 = self.at_shift(common);
        let l2 = sub.at_shift(common);
        let sf1 = smith(&l1);
        let c = solve_matrix(&l1, &l2, &sf1)?;
        let vals = smith(&c)
            .finite_vals()
            .map_err(|_| DvrError::InsufficientTruncation)?;
        Ok(vals.iter().sum())
    }

    /// True iff sub is contained in self (at truncation level N).
    pub fn contains(&self, sub: &Lattice) -> bool {
        self.quotient_dim(sub).is_ok()
    }

    pub fn eq_lattice(&self, other: &Lattice) -> bool {
        matches!(self.quotient_dim(other), Ok(0))
    }

    /// Basis matrix renormalized to the given (lower) shift.
    fn at_shift(&self, target: i64) -> DvrMatrix {
        let k = self.shift - target;
        assert!(k >= 0);
        self.basis.scale_pi(k as usize)
    }

    /// Membership of an ambient column vector in colspan(basis), ignoring
    /// the shift.
    pub fn span_contains_vector(&self, v: &[DvrElement]) -> bool {
        let d = self.dim();
        assert_eq!(v.len(), d);
        let mut y = DvrMatrix::zeros(self.ring(), d, 1);
        for (r, el) in v.iter().enumerate() {
            y.set(r, 0, el.clone());
        }
        solve_matrix(&self.basis, &y, &self.smith_form()).is_ok()
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pi^{} * span{:?}", self.shift, self.basis)
    }
}
