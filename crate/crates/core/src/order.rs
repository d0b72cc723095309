//! The block order M_d(f, R_N) over a truncated discrete valuation ring,
//! standard lattice chains, chain stabilizers, and type bookkeeping.
//!
//! A type vector f = (f_0, .., f_{d-1}) of nonnegative integers summing to
//! d partitions the d coordinates into consecutive blocks (empty blocks
//! are skipped). The block order consists of the matrices whose entries in
//! strict-upper block positions are divisible by pi; a lattice chain is a
//! decreasing flag of lattices whose successive quotients have dimensions
//! f_i and which returns to pi times the first lattice after d steps. The
//! stabilizer of the standard chain recovers exactly the block order
//! membership set; this is verified by exact linear algebra, not assumed.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dvr::{smith, DvrElement, DvrError, DvrMatrix, Lattice, TruncatedDvr};
use crate::field::FieldElement;
use crate::linalg::{FMatrix, RowSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderError {
    /// Type entries must sum to d for an order type.
    TypeSum {
        sum: usize,
        d: usize,
    },
    DimensionMismatch {
        expected: usize,
        got: usize,
    },
    Dvr(DvrError),
}

impl fmt::Display for OrderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderError::TypeSum { sum, d } => {
                write!(f, "type entries sum to {}, expected d = {}", sum, d)
            }
            OrderError::DimensionMismatch { expected, got } => {
                write!(
                    f,
                    "matrix dimension {} does not match d = {}",
                    got, expected
                )
            }
            OrderError::Dvr(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for OrderError {}

impl From<DvrError> for OrderError {
    fn from(e: DvrError) -> Self {
        OrderError::Dvr(e)
    }
}

/// An ordered tuple of nonnegative integers. For order types the entries
/// sum to d; module types reuse the same container without the constraint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeVector(pub Vec<usize>);

impl TypeVector {
    pub fn new(entries: Vec<usize>) -> Self {
        TypeVector(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    /// Enforces the order-type constraint: length d, entries summing to d.
    pub fn check_order_type(&self, d: usize) -> Result<(), OrderError> {
        if d == 0 || self.len() != d || self.sum() != d {
            return Err(OrderError::TypeSum { sum: self.sum(), d });
        }
        Ok(())
    }

    /// One cyclic shift left: (f_1, .., f_{d-1}, f_0).
    pub fn cyclic_shift_left(&self) -> Self {
        let mut v = self.0.clone();
        if !v.is_empty() {
            v.rotate_left(1);
        }
        TypeVector(v)
    }

    /// Entries reversed: (f_{d-1}, .., f_0).
    pub fn reversed(&self) -> Self {
        let mut v = self.0.clone();
        v.reverse();
        TypeVector(v)
    }

    /// All compositions of d into exactly d nonnegative parts.
    pub fn all_order_types(d: usize) -> Vec<TypeVector> {
        let mut out = Vec::new();
        let mut current = vec![0usize; d];
        fn rec(pos: usize, remaining: usize, current: &mut Vec<usize>, out: &mut Vec<TypeVector>) {
            if pos + 1 == current.len() {
                current[pos] = remaining;
                out.push(TypeVector(current.clone()));
                return;
            }
            for v in 0..=remaining {
                current[pos] = v;
                rec(pos + 1, remaining - v, current, out);
            }
        }
        rec(0, d, &mut current, &mut out);
        out
    }
}

impl fmt::Display for TypeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v)?;
        }
        write!(f, ")")
    }
}

/// The block order M_d(f, R_N): matrices with strict-upper block entries in
/// pi R_N, everything else free.
pub struct BlockOrder {
    ring: Arc<TruncatedDvr>,
    d: usize,
    f: TypeVector,
    /// Block index owning each coordinate.
    block_of: Vec<usize>,
}

impl BlockOrder {
    pub fn new(ring: &Arc<TruncatedDvr>, f: TypeVector) -> Result<Self, OrderError> {
        let d = f.len();
        f.check_order_type(d)?;
        let mut block_of = Vec::with_capacity(d);
        for (idx, &size) in f.entries().iter().enumerate() {
            for _ in 0..size {
                block_of.push(idx);
            }
        }
        debug_assert_eq!(block_of.len(), d);
        Ok(BlockOrder {
            ring: Arc::clone(ring),
            d,
            f,
            block_of,
        })
    }

    pub fn ring(&self) -> &Arc<TruncatedDvr> {
        &self.ring
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn type_vector(&self) -> &TypeVector {
        &self.f
    }

    pub fn block_of(&self, coord: usize) -> usize {
        self.block_of[coord]
    }

    /// Minimal pi valuation required at matrix position (r, c).
    pub fn min_val(&self, r: usize, c: usize) -> usize {
        usize::from(self.block_of[r] < self.block_of[c])
    }

    /// Membership: every strict-upper block entry has valuation >= 1.
    pub fn contains(&self, m: &DvrMatrix) -> Result<bool, OrderError> {
        if m.rows() != self.d || m.cols() != self.d {
            return Err(OrderError::DimensionMismatch {
                expected: self.d,
                got: m.rows(),
            });
        }
        for r in 0..self.d {
            for c in 0..self.d {
                if self.min_val(r, c) == 1 {
                    if let Some(0) = m.at(r, c).val() {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// (r, s): number of free positions and of strict-upper block positions.
    pub fn position_counts(&self) -> (usize, usize) {
        let mut strict_upper = 0;
        for r in 0..self.d {
            for c in 0..self.d {
                strict_upper += self.min_val(r, c);
            }
        }
        (self.d * self.d - strict_upper, strict_upper)
    }

    /// Dimension over the residue field of the membership set in M_d(R_N):
    /// N*r + (N-1)*s.
    pub fn fq_dimension(&self) -> usize {
        let n = self.ring.level();
        let (r, s) = self.position_counts();
        n * r + (n - 1) * s
    }

    /// The standard basis over the residue field: pi^t E_{rc} for every
    /// position and every allowed digit t.
    pub fn basis(&self) -> Vec<DvrMatrix> {
        let n = self.ring.level();
        let mut out = Vec::with_capacity(self.fq_dimension());
        for r in 0..self.d {
            for c in 0..self.d {
                for t in self.min_val(r, c)..n {
                    let mut m = DvrMatrix::zeros(&self.ring, self.d, self.d);
                    m.set(r, c, DvrElement::pi_pow(&self.ring, t));
                    out.push(m);
                }
            }
        }
        out
    }
}

/// Membership test for the block order of type f.
pub fn block_membership(m: &DvrMatrix, f: &TypeVector) -> Result<bool, OrderError> {
    let order = BlockOrder::new(m.ring(), f.clone())?;
    order.contains(m)
}

/// A decreasing flag of full lattices L_0 .. L_{d-1}, cyclically closed by
/// pi L_0. Successive quotient dimensions recover the type; going once
/// around the flag multiplies by pi.
pub struct LatticeChain {
    lattices: Vec<Lattice>,
}

impl LatticeChain {
    /// Validates the decreasing containments, including the wrap-around
    /// pi L_0 inside L_{d-1}.
    pub fn new(lattices: Vec<Lattice>) -> Result<Self, OrderError> {
        assert!(!lattices.is_empty());
        let chain = LatticeChain { lattices };
        for i in 0..chain.len() {
            let (big, small) = chain.step(i);
            big.quotient_dim(&small)?;
        }
        Ok(chain)
    }

    pub fn len(&self) -> usize {
        self.lattices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattices.is_empty()
    }

    pub fn lattice(&self, i: usize) -> &Lattice {
        &self.lattices[i]
    }

    fn step(&self, i: usize) -> (&Lattice, Lattice) {
        let big = &self.lattices[i];
        let small = if i + 1 < self.lattices.len() {
            self.lattices[i + 1].clone()
        } else {
            self.lattices[0].scaled(1)
        };
        (big, small)
    }

    pub fn dimension(&self) -> usize {
        self.lattices[0].dim()
    }
}

/// The standard flag for a type vector: L_0 = R^d, and L_{i+1} scales the
/// next f_i coordinates of L_i by pi, ending at pi R^d for i = d.
pub fn standard_chain(
    f: &TypeVector,
    ring: &Arc<TruncatedDvr>,
) -> Result<LatticeChain, OrderError> {
    let d = f.len();
    f.check_order_type(d)?;
    let mut cut = 0usize;
    let mut lattices = Vec::with_capacity(d);
    for &size in f.entries() {
        let mut basis = DvrMatrix::identity(ring, d);
        for j in 0..cut {
            basis.set(j, j, DvrElement::pi_pow(ring, 1));
        }
        lattices.push(Lattice::new(0, basis).map_err(OrderError::from)?);
        cut += size;
    }
    LatticeChain::new(lattices)
}

/// Successive quotient dimensions of the chain, with pi L_0 closing the
/// cycle. For the standard chain of type f this returns f.
pub fn type_of_chain(chain: &LatticeChain) -> Result<TypeVector, OrderError> {
    let mut entries = Vec::with_capacity(chain.len());
    for i in 0..chain.len() {
        let (big, small) = chain.step(i);
        entries.push(big.quotient_dim(&small)?);
    }
    Ok(TypeVector::new(entries))
}

/// Flattens a matrix over R_N into residue-field coordinates, position
/// major then pi digit.
pub fn matrix_digit_coords(m: &DvrMatrix) -> Vec<FieldElement> {
    let n = m.ring().level();
    let mut out = Vec::with_capacity(m.rows() * m.cols() * n);
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            for t in 0..n {
                out.push(m.at(r, c).coeff(t).clone());
            }
        }
    }
    out
}

/// Inverse of `matrix_digit_coords` for square matrices.
pub fn matrix_from_digit_coords(
    ring: &Arc<TruncatedDvr>,
    d: usize,
    coords: &[FieldElement],
) -> DvrMatrix {
    let n = ring.level();
    assert_eq!(coords.len(), d * d * n);
    let mut m = DvrMatrix::zeros(ring, d, d);
    for r in 0..d {
        for c in 0..d {
            let base = (r * d + c) * n;
            let digits: Vec<FieldElement> = coords[base..base + n].to_vec();
            m.set(r, c, DvrElement::from_coeffs(ring, digits));
        }
    }
    m
}

/// Basis of the joint stabilizer {g : g L_i inside L_i for all i}, computed
/// by solving the flattened containment conditions over the residue field.
pub struct StabilizerBasis {
    pub basis: Vec<DvrMatrix>,
    pub dimension: usize,
}

pub fn chain_stabilizer(chain: &LatticeChain) -> Result<StabilizerBasis, OrderError> {
    let d = chain.dimension();
    let ring = chain.lattice(0).ring();
    let n = ring.level();
    let spec = ring.residue();
    let unknowns = d * d * n;

    // Per lattice: the Smith data of the basis matrix (shifts cancel in the
    // stabilizer condition g L = L  <=>  g span(basis) inside span(basis)).
    struct LatticeData {
        basis: DvrMatrix,
        row_ops: DvrMatrix,
        vals: Vec<usize>,
    }
    let mut lattice_data = Vec::with_capacity(chain.len());
    for i in 0..chain.len() {
        let basis = chain.lattice(i).basis().clone();
        let sf = smith(&basis);
        let vals = sf
            .finite_vals()
            .map_err(|_| OrderError::Dvr(DvrError::SingularMatrix))?;
        lattice_data.push(LatticeData {
            basis,
            row_ops: sf.row_ops,
            vals,
        });
    }

    // Scalar constraints: for each lattice, each basis column, each row k,
    // the digits below vals[k] of (row_ops * g * basis)_k must vanish.
    let total_rows: usize = lattice_data
        .iter()
        .map(|ld| d * ld.vals.iter().sum::<usize>())
        .sum();

    let mut constraints = FMatrix::zeros(spec, total_rows, unknowns);
    for (u_idx, unknown) in (0..unknowns).map(|i| {
        let mut coords = vec![FieldElement::zero(spec); unknowns];
        coords[i] = FieldElement::one(spec);
        (i, matrix_from_digit_coords(ring, d, &coords))
    }) {
        let mut row_cursor = 0;
        for ld in &lattice_data {
            let image = ld.row_ops.mul(&unknown.mul(&ld.basis));
            for j in 0..d {
                for (k, &v) in ld.vals.iter().enumerate() {
                    for t in 0..v {
                        constraints.set(row_cursor, u_idx, image.at(k, j).coeff(t).clone());
                        row_cursor += 1;
                    }
                }
            }
        }
        debug_assert_eq!(row_cursor, total_rows);
    }

    let nullspace = constraints.nullspace();
    let basis: Vec<DvrMatrix> = nullspace
        .iter()
        .map(|v| matrix_from_digit_coords(ring, d, v))
        .collect();
    let dimension = basis.len();
    Ok(StabilizerBasis { basis, dimension })
}

/// The span over the residue field of a set of matrices, as a row space of
/// digit coordinates.
pub fn matrix_span(basis: &[DvrMatrix]) -> RowSpan {
    assert!(!basis.is_empty());
    let ring = basis[0].ring();
    let cols = basis[0].rows() * basis[0].cols() * ring.level();
    let mut span = RowSpan::new(ring.residue(), cols);
    for m in basis {
        span.insert(&matrix_digit_coords(m));
    }
    span
}

/// True iff the span contains the identity and is closed under
/// multiplication (all pairwise products of basis elements stay inside).
pub fn span_is_unital_and_closed(basis: &[DvrMatrix]) -> bool {
    if basis.is_empty() {
        return false;
    }
    let ring = basis[0].ring();
    let d = basis[0].rows();
    let span = matrix_span(basis);
    if !span.contains(&matrix_digit_coords(&DvrMatrix::identity(ring, d))) {
        return false;
    }
    for a in basis {
        for b in basis {
            if !span.contains(&matrix_digit_coords(&a.mul(b))) {
                return false;
            }
        }
    }
    true
}

/// Certificate that conjugation by the monomial matrix u carries the block
/// order of type f onto the block order of the cyclically shifted type,
/// checked entrywise on basis elements in both directions.
#[derive(Debug, Clone, Serialize)]
pub struct ConjugationCertificate {
    pub source_type: TypeVector,
    pub target_type: TypeVector,
    /// Row index of the nonzero entry in each column of u.
    pub row_of_column: Vec<usize>,
    /// pi exponent of the nonzero entry in each column of u.
    pub pi_exponent_of_column: Vec<usize>,
    pub elements_checked: usize,
    pub valid: bool,
}

/// Builds the cyclic-shift conjugator for type f and verifies
/// u M_d(f) u^{-1} = M_d(shift_left f) entrywise at truncation level N
/// (the division by pi inherent in u^{-1} costs one digit of precision).
pub fn conjugate_type(
    f: &TypeVector,
    ring: &Arc<TruncatedDvr>,
) -> Result<ConjugationCertificate, OrderError> {
    let d = f.len();
    f.check_order_type(d)?;
    let f0 = f.entries()[0];
    let target = f.cyclic_shift_left();

    // u e_j = e_{(j - f0) mod d}, scaled by pi for j >= f0.
    let mut u = DvrMatrix::zeros(ring, d, d);
    let mut row_of_column = Vec::with_capacity(d);
    let mut pi_exponent_of_column = Vec::with_capacity(d);
    for j in 0..d {
        let row = (j + d - f0) % d;
        let exp = usize::from(j >= f0);
        u.set(row, j, DvrElement::pi_pow(ring, exp));
        row_of_column.push(row);
        pi_exponent_of_column.push(exp);
    }
    // w = pi u^{-1}: w e_j = e_{(j + f0) mod d} scaled by pi when the image
    // coordinate lies in the first block.
    let mut w = DvrMatrix::zeros(ring, d, d);
    for j in 0..d {
        let row = (j + f0) % d;
        let exp = usize::from(row < f0);
        w.set(row, j, DvrElement::pi_pow(ring, exp));
    }
    debug_assert_eq!(u.mul(&w), DvrMatrix::pi_identity(ring, d, 1));

    let source_order = BlockOrder::new(ring, f.clone())?;
    let target_order = BlockOrder::new(ring, target.clone())?;
    let mut checked = 0;
    let mut valid = true;
    for x in source_order.basis() {
        // u x u^{-1} = (u x w) / pi must land in the target order.
        let conj = u.mul(&x).mul(&w);
        match conj.div_pi(1) {
            Ok(q) => {
                if !target_order.contains(&q)? {
                    valid = false;
                }
            }
            Err(_) => valid = false,
        }
        checked += 1;
    }
    for y in target_order.basis() {
        // u^{-1} y u = (w y u) / pi must land back in the source order.
        let conj = w.mul(&y).mul(&u);
        match conj.div_pi(1) {
            Ok(q) => {
                if !source_order.contains(&q)? {
                    valid = false;
                }
            }
            Err(_) => valid = false,
        }
        checked += 1;
    }
    Ok(ConjugationCertificate {
        source_type: f.clone(),
        target_type: target,
        row_of_column,
        pi_exponent_of_column,
        elements_checked: checked,
        valid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn ring(q: u64, n: usize) -> Arc<TruncatedDvr> {
        TruncatedDvr::new(&make_field(q, 1, 1).unwrap(), n)
    }

    fn tv(entries: &[usize]) -> TypeVector {
        TypeVector::new(entries.to_vec())
    }

    #[test]
    fn membership_examples() {
        let r = ring(2, 3);
        // f = (d, 0, .., 0): everything is a member.
        let full = BlockOrder::new(&r, tv(&[3, 0, 0])).unwrap();
        let mut any = DvrMatrix::identity(&r, 3);
        any.set(0, 2, DvrElement::one(&r));
        any.set(2, 0, DvrElement::one(&r));
        assert!(full.contains(&any).unwrap());
        assert_eq!(full.position_counts(), (9, 0));

        let half = BlockOrder::new(&r, tv(&[1, 1])).unwrap();
        let mut ok = DvrMatrix::identity(&r, 2);
        ok.set(0, 1, DvrElement::pi_pow(&r, 1));
        ok.set(1, 0, DvrElement::one(&r));
        assert!(half.contains(&ok).unwrap());
        let mut bad = DvrMatrix::identity(&r, 2);
        bad.set(0, 1, DvrElement::one(&r));
        assert!(!half.contains(&bad).unwrap());
        assert_eq!(half.position_counts(), (3, 1));
    }

    #[test]
    fn membership_dimension_mismatch() {
        let r = ring(2, 2);
        let m = DvrMatrix::identity(&r, 3);
        assert!(matches!(
            block_membership(&m, &tv(&[1, 1])),
            Err(OrderError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn standard_chain_types() {
        let r = ring(2, 4);
        for f in [tv(&[2, 0]), tv(&[1, 1]), tv(&[2, 0, 1]), tv(&[1, 1, 1])] {
            let chain = standard_chain(&f, &r).unwrap();
            assert_eq!(type_of_chain(&chain).unwrap(), f);
        }
        // Maximal-order chain: all lattices homothetic (equal up to a pi
        // scaling), with coker dims (d, 0, .., 0).
        let chain = standard_chain(&tv(&[3, 0, 0]), &r).unwrap();
        assert!(chain.lattice(1).eq_lattice(&chain.lattice(0).scaled(1)));
        assert!(chain.lattice(2).eq_lattice(chain.lattice(1)));
        assert_eq!(type_of_chain(&chain).unwrap(), tv(&[3, 0, 0]));
    }

    #[test]
    fn custom_chain_type_via_smith_oracle() {
        // d = 2: L_0 = R^2, L_1 = span{pi e_1, e_2}: type (1, 1).
        let r = ring(2, 3);
        let l0 = Lattice::standard(&r, 2);
        let mut b = DvrMatrix::identity(&r, 2);
        b.set(0, 0, DvrElement::pi_pow(&r, 1));
        let l1 = Lattice::new(0, b).unwrap();
        let chain = LatticeChain::new(vec![l0, l1]).unwrap();
        assert_eq!(type_of_chain(&chain).unwrap(), tv(&[1, 1]));
    }

    #[test]
    fn type_sum_enforced() {
        let r = ring(2, 3);
        assert!(matches!(
            standard_chain(&tv(&[1, 2]), &r),
            Err(OrderError::TypeSum { sum: 3, d: 2 })
        ));
    }

    #[test]
    fn stabilizer_dimension_examples() {
        // f = (1,1), d = 2, N = 3, q = 2: dimension 11 = 3N + (N-1).
        let r = ring(2, 3);
        let chain = standard_chain(&tv(&[1, 1]), &r).unwrap();
        let stab = chain_stabilizer(&chain).unwrap();
        assert_eq!(stab.dimension, 11);

        // f = (d, 0, .., 0): the full matrix order, dimension d^2 N.
        let chain = standard_chain(&tv(&[2, 0]), &r).unwrap();
        assert_eq!(chain_stabilizer(&chain).unwrap().dimension, 12);

        // f = (2,0,1), d = 3, N = 2: 7 free positions, 2 pi positions: 16.
        let r2 = ring(2, 2);
        let chain = standard_chain(&tv(&[2, 0, 1]), &r2).unwrap();
        assert_eq!(chain_stabilizer(&chain).unwrap().dimension, 16);
    }

    #[test]
    fn stabilizer_equals_block_order() {
        // Dimension equality and two-way containment of bases.
        let r = ring(2, 3);
        for f in [
            tv(&[1, 1]),
            tv(&[2, 0]),
            tv(&[0, 2]),
            tv(&[1, 1, 1]),
            tv(&[2, 0, 1]),
        ] {
            let order = BlockOrder::new(&r, f.clone()).unwrap();
            let chain = standard_chain(&f, &r).unwrap();
            let stab = chain_stabilizer(&chain).unwrap();
            assert_eq!(stab.dimension, order.fq_dimension(), "type {}", f);
            let stab_span = matrix_span(&stab.basis);
            let order_span = matrix_span(&order.basis());
            for m in order.basis() {
                assert!(stab_span.contains(&matrix_digit_coords(&m)));
            }
            for m in &stab.basis {
                assert!(order_span.contains(&matrix_digit_coords(m)));
                assert!(order.contains(m).unwrap());
            }
        }
    }

    #[test]
    fn stabilizer_closed_and_unital() {
        let r = ring(2, 2);
        let chain = standard_chain(&tv(&[2, 0, 1]), &r).unwrap();
        let stab = chain_stabilizer(&chain).unwrap();
        assert!(span_is_unital_and_closed(&stab.basis));
    }

    #[test]
    fn pi_sandwich_inclusions() {
        // pi M_d(R_N) inside M_d(f, R_N) inside M_d(R_N) for all f.
        let r = ring(2, 3);
        for f in TypeVector::all_order_types(3) {
            let order = BlockOrder::new(&r, f).unwrap();
            let full = BlockOrder::new(&r, tv(&[3, 0, 0])).unwrap();
            for m in full.basis() {
                assert!(order.contains(&m.scale_pi(1)).unwrap());
                assert!(full.contains(&m).unwrap());
            }
            for m in order.basis() {
                assert!(full.contains(&m).unwrap());
            }
        }
    }

    #[test]
    fn member_count_matches_position_formula() {
        // #members = q^(N r + (N-1) s), verified by exhaustive enumeration
        // where the total matrix count stays within the cap.
        for (q, n, f) in [
            (2u64, 2usize, tv(&[1, 1])),
            (2, 3, tv(&[1, 1])),
            (3, 2, tv(&[2, 0])),
        ] {
            let r = ring(q, n);
            let order = BlockOrder::new(&r, f).unwrap();
            let d = order.d();
            let total_digits = d * d * n;
            let total = (q as u128).pow(total_digits as u32);
            assert!(total <= 1 << 20);
            let mut members = 0u128;
            for idx in 0..total {
                let mut coords = Vec::with_capacity(total_digits);
                let mut v = idx;
                for _ in 0..total_digits {
                    coords.push(crate::field::element_from_index(
                        r.residue(),
                        (v % q as u128) as u64,
                    ));
                    v /= q as u128;
                }
                let m = matrix_from_digit_coords(&r, d, &coords);
                if order.contains(&m).unwrap() {
                    members += 1;
                }
            }
            assert_eq!(members, (q as u128).pow(order.fq_dimension() as u32));
        }
    }

    #[test]
    fn membership_closed_under_ring_operations() {
        // Closed under addition and multiplication, contains the identity:
        // exhaustive where the matrix count stays within the cap, sampled
        // with at least 10^4 product trials otherwise (d up to 4, N up to 3).
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for (n, f) in [
            (2usize, tv(&[1, 1])),
            (3, tv(&[1, 1])),
            (2, tv(&[2, 0, 1])),
            (3, tv(&[1, 1, 1])),
            (3, tv(&[2, 1, 0, 1])),
            (3, tv(&[1, 1, 1, 1])),
        ] {
            let r = ring(2, n);
            let order = BlockOrder::new(&r, f.clone()).unwrap();
            let d = order.d();
            assert!(order.contains(&DvrMatrix::identity(&r, d)).unwrap());
            let total_digits = (d * d * n) as u32;
            let exhaustive = 2u128.pow(2 * total_digits) <= 1 << 20;
            let random_member = |rng: &mut rand_chacha::ChaCha8Rng| {
                let mut m = DvrMatrix::zeros(&r, d, d);
                for row in 0..d {
                    for col in 0..d {
                        let mut digits = Vec::with_capacity(n);
                        for t in 0..n {
                            let v = if t < order.min_val(row, col) {
                                0
                            } else {
                                rng.gen_range(0..2u64)
                            };
                            digits.push(crate::field::element_from_index(r.residue(), v));
                        }
                        m.set(row, col, DvrElement::from_coeffs(&r, digits));
                    }
                }
                m
            };
            let trials = if exhaustive { 2_000 } else { 10_000 };
            for _ in 0..trials {
                let a = random_member(&mut rng);
                let b = random_member(&mut rng);
                assert!(order.contains(&a).unwrap());
                assert!(
                    order.contains(&a.add(&b)).unwrap(),
                    "sum left {} for {}",
                    n,
                    f
                );
                assert!(
                    order.contains(&a.mul(&b)).unwrap(),
                    "product left {} for {}",
                    n,
                    f
                );
            }
        }
    }

    #[test]
    fn conjugation_certificates() {
        let r = ring(2, 3);
        // (1,1) shifts to itself.
        let cert = conjugate_type(&tv(&[1, 1]), &r).unwrap();
        assert!(cert.valid);
        assert_eq!(cert.target_type, tv(&[1, 1]));
        // (2,0,1) shifts to (0,1,2).
        let cert = conjugate_type(&tv(&[2, 0, 1]), &r).unwrap();
        assert!(cert.valid);
        assert_eq!(cert.target_type, tv(&[0, 1, 2]));
        // (d,0,..,0) shifts to (0,..,0,d).
        let cert = conjugate_type(&tv(&[3, 0, 0]), &r).unwrap();
        assert!(cert.valid);
        assert_eq!(cert.target_type, tv(&[0, 0, 3]));
    }
}
