//! The formal-module embedding into matrices over the truncated skew ring,
//! centralizer extraction, matching against the block order, and graded
//! modules with twisted maps.
//!
//! The embedding sends the uniformizer to tau * Id and the multiplicative
//! generator of the degree-d unramified extension to a diagonal matrix of
//! Frobenius twists prescribed by the type vector. The centralizer of the
//! image, at pi-depth N, is computed by flattening the commutation
//! constraints over all tau digits and subfield coordinates jointly into a
//! single linear system over F_q, solved by exact Gaussian elimination.
//! The result is anti-isomorphic to the truncated block order; the match
//! is produced as an explicit checked certificate, never assumed.
//!
//! Truncation bookkeeping: the skew truncation T and the pi-depth N are
//! tied by T = d*N through tau^d acting as the uniformizer. The pi-depth
//! of a tau^j coefficient at matrix position (r, c) is (j - w_r + w_c)/d,
//! where w is the diagonal twist exponent; digits at depth >= N are cut.
//! Commutation against tau is checked with one digit of padding, so the
//! top retained digit is still Frobenius-constrained.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::dvr::{DvrElement, DvrError, DvrMatrix, Lattice, TruncatedDvr};
use crate::field::{make_field, Embedding, FieldElement, FieldError, FieldSpec, SubfieldCoords};
use crate::linalg::RowSpan;
use crate::order::{BlockOrder, OrderError, TypeVector};
use crate::skew::{SkewContext, SkewMatrix, SkewSeries};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DieudonneError {
    TypeSum {
        sum: usize,
        d: usize,
    },
    /// The skew truncation must be d*N with N >= 2.
    TruncationMismatch {
        trunc: usize,
        d: usize,
    },
    InsufficientTruncation,
    /// A centralizer coefficient failed to lie in the base subfield.
    NotInSubfield,
    Field(FieldError),
    Dvr(DvrError),
    Order(String),
}

impl fmt::Display for DieudonneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DieudonneError::TypeSum { sum, d } => {
                write!(f, "type entries sum to {}, expected d = {}", sum, d)
            }
            DieudonneError::TruncationMismatch { trunc, d } => {
                write!(
                    f,
                    "skew truncation {} is not a multiple d*N of d = {} with N >= 2",
                    trunc, d
                )
            }
            DieudonneError::InsufficientTruncation => write!(f, "insufficient truncation"),
            DieudonneError::NotInSubfield => {
                write!(
                    f,
                    "centralizer coefficient does not descend to the base field"
                )
            }
            DieudonneError::Field(e) => write!(f, "{}", e),
            DieudonneError::Dvr(e) => write!(f, "{}", e),
            DieudonneError::Order(msg) => write!(f, "{}", msg),
        }
    }
}

impl std::error::Error for DieudonneError {}

impl From<FieldError> for DieudonneError {
    fn from(e: FieldError) -> Self {
        DieudonneError::Field(e)
    }
}

impl From<DvrError> for DieudonneError {
    fn from(e: DvrError) -> Self {
        match e {
            DvrError::InsufficientTruncation => DieudonneError::InsufficientTruncation,
            other => DieudonneError::Dvr(other),
        }
    }
}

impl From<OrderError> for DieudonneError {
    fn from(e: OrderError) -> Self {
        DieudonneError::Order(e.to_string())
    }
}

/// The embedding data: images of the uniformizer and of a generator of the
/// degree-d unramified extension inside d x d matrices over the truncated
/// skew ring, for a given type vector.
pub struct FormalEmbedding {
    d: usize,
    f: TypeVector,
    /// Base field F_q.
    base: Arc<FieldSpec>,
    /// Coefficient field k, large enough to contain the degree-d extension.
    k: Arc<FieldSpec>,
    ctx: Arc<SkewContext>,
    /// Coordinates of k over the embedded base field.
    coords: SubfieldCoords,
    /// Image of the extension generator in k.
    lambda: FieldElement,
    /// Diagonal twist exponent per coordinate: the block index, repeated
    /// block-size times.
    block_exp: Vec<usize>,
    image_uniformizer: SkewMatrix,
    image_generator: SkewMatrix,
}

impl FormalEmbedding {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn type_vector(&self) -> &TypeVector {
        &self.f
    }

    pub fn base(&self) -> &Arc<FieldSpec> {
        &self.base
    }

    pub fn coefficient_field(&self) -> &Arc<FieldSpec> {
        &self.k
    }

    pub fn ctx(&self) -> &Arc<SkewContext> {
        &self.ctx
    }

    pub fn block_exponents(&self) -> &[usize] {
        &self.block_exp
    }

    /// The image tau * Id of the uniformizer.
    pub fn image_uniformizer(&self) -> &SkewMatrix {
        &self.image_uniformizer
    }

    /// The diagonal image of the extension generator.
    pub fn image_generator(&self) -> &SkewMatrix {
        &self.image_generator
    }

    /// The image of the extension generator in the coefficient field.
    pub fn lambda(&self) -> &FieldElement {
        &self.lambda
    }

    /// pi-depth N = T / d.
    pub fn depth(&self) -> usize {
        self.ctx.trunc() / self.d
    }

    pub fn coords(&self) -> &SubfieldCoords {
        &self.coords
    }
}

/// Builds the embedding for (d, f) over F_q with skew truncation `trunc`.
/// Requires sum f_i = d and trunc = d*N with N >= 2. The coefficient field
/// is modeled as the degree-2d extension of F_q, which contains every
/// required image of the degree-d extension.
pub fn build_embedding(
    d: usize,
    f: &TypeVector,
    base: &Arc<FieldSpec>,
    trunc: usize,
) -> Result<FormalEmbedding, DieudonneError> {
    if d == 0 || f.len() != d || f.sum() != d {
        return Err(DieudonneError::TypeSum { sum: f.sum(), d });
    }
    if !trunc.is_multiple_of(d) || trunc / d < 2 {
        return Err(DieudonneError::TruncationMismatch { trunc, d });
    }
    assert_eq!(base.m(), 1, "the base field must be F_q itself");
    let k = make_field(base.p(), base.e(), 2 * d as u32)?;
    let mid = make_field(base.p(), base.e(), d as u32)?;
    let ctx = SkewContext::new(&k, trunc);
    let coords = SubfieldCoords::new(base, &k)?;
    let lambda = Embedding::new(&mid, &k)?.map(&FieldElement::generator(&mid));

    let mut block_exp = Vec::with_capacity(d);
    for (j, &size) in f.entries().iter().enumerate() {
        for _ in 0..size {
            block_exp.push(j);
        }
    }
    let gen_entries: Vec<SkewSeries> = block_exp
        .iter()
        .map(|&w| SkewSeries::from_field(&ctx, lambda.frobenius_pow(w as u32)))
        .collect();
    let image_generator = SkewMatrix::diagonal(&ctx, gen_entries);
    let image_uniformizer = SkewMatrix::tau_identity(&ctx, d);

    // The defining relation: uniformizer * a = Fr_q(a) * uniformizer.
    let twisted: Vec<SkewSeries> = block_exp
        .iter()
        .map(|&w| SkewSeries::from_field(&ctx, lambda.frobenius_pow(w as u32 + 1)))
        .collect();
    let lhs = image_uniformizer.mul(&image_generator);
    let rhs = SkewMatrix::diagonal(&ctx, twisted).mul(&image_uniformizer);
    assert!(lhs.sub(&rhs).is_zero(), "embedding relation check failed");

    Ok(FormalEmbedding {
        d,
        f: f.clone(),
        base: Arc::clone(base),
        k,
        ctx,
        coords,
        lambda,
        block_exp,
        image_uniformizer,
        image_generator,
    })
}

/// Basis of the pi-depth-N centralizer of the embedding image, over F_q.
pub struct CentralizerBasis {
    pub basis: Vec<SkewMatrix>,
    pub dimension: usize,
    pub depth: usize,
}

/// pi-depth of the tau^j digit at matrix position (r, c), given the
/// diagonal twist exponents. None when the residue of j mod d is
/// incompatible with the position (such digits never occur in the
/// centralizer) or the depth is negative.
fn digit_depth(j: usize, w_row: usize, w_col: usize, d: usize) -> Option<usize> {
    let shifted = j as i64 - w_row as i64 + w_col as i64;
    if shifted.rem_euclid(d as i64) != 0 {
        return None;
    }
    let depth = shifted.div_euclid(d as i64);
    if depth < 0 {
        None
    } else {
        Some(depth as usize)
    }
}

fn unknown_index(d: usize, t: usize, rel: usize, r: usize, c: usize, j: usize, s: usize) -> usize {
    ((r * d + c) * t + j) * rel + s
}

/// Solves for the centralizer {B : B commutes with both embedding images}
/// inside the truncated matrix ring, as one F_q-linear system over all tau
/// digits and subfield coordinates jointly, cut at pi-depth N. Commutation
/// against the uniformizer image is imposed on every digit (the comparison
/// at tau^T is exact for polynomial inputs), so no retained digit escapes
/// its Frobenius constraint.
pub fn centralizer_basis(embedding: &FormalEmbedding) -> Result<CentralizerBasis, DieudonneError> {
    let d = embedding.d;
    let ctx = &embedding.ctx;
    let t = ctx.trunc();
    let n = embedding.depth();
    let base = &embedding.base;
    let coords = &embedding.coords;
    let rel = coords.rel_degree();
    let unknowns = d * d * t * rel;

    // Unknown (r, c, j, s) is the F_q coefficient of y^s at tau^j in entry
    // (r, c), for y the generator of the coefficient field.
    let y_basis: Vec<FieldElement> = {
        let y = FieldElement::generator(&embedding.k);
        let mut powers = Vec::with_capacity(rel);
        let mut acc = FieldElement::one(&embedding.k);
        for _ in 0..rel {
            powers.push(acc.clone());
            acc = acc.mul(&y);
        }
        powers
    };

    let mut constraints = RowSpan::new(base, unknowns);
    let mut row_buf = vec![FieldElement::zero(base); unknowns];
    let lam = &embedding.lambda;

    // Commutation with the diagonal generator image: the digit-j
    // coefficient b at (r, c) satisfies b * (Fr^j(lambda_c) - lambda_r) = 0.
    // Multiplication by a fixed scalar of k is F_q-linear on coordinates.
    for r in 0..d {
        for c in 0..d {
            let lam_r = lam.frobenius_pow(embedding.block_exp[r] as u32);
            let lam_c = lam.frobenius_pow(embedding.block_exp[c] as u32);
            for j in 0..t {
                let scalar = lam_c.frobenius_pow(j as u32).sub(&lam_r);
                if scalar.is_zero() {
                    continue;
                }
                for out_coord in 0..rel {
                    for v in row_buf.iter_mut() {
                        *v = FieldElement::zero(base);
                    }
                    let mut nonzero = false;
                    for (s, ys) in y_basis.iter().enumerate() {
                        let cs = coords.coords(&ys.mul(&scalar));
                        if !cs[out_coord].is_zero() {
                            row_buf[unknown_index(d, t, rel, r, c, j, s)] = cs[out_coord].clone();
                            nonzero = true;
                        }
                    }
                    if nonzero {
                        constraints.insert(&row_buf);
                    }
                }
            }
        }
    }

    // Commutation with tau * Id: comparing coefficients of tau^(j+1) in
    // B*tau and tau*B gives b = Fr(b) for every digit b, including j = T-1
    // (the tau^T coefficient of a degree-<T polynomial product is exact).
    // Coordinate form: sum_s x_s (Fr(y^s) - y^s) = 0.
    {
        let mut frob_rows: Vec<Vec<FieldElement>> = Vec::with_capacity(rel);
        for out_coord in 0..rel {
            let mut row = Vec::with_capacity(rel);
            for ys in &y_basis {
                let diff = ys.frobenius().sub(ys);
                row.push(coords.coords(&diff)[out_coord].clone());
            }
            frob_rows.push(row);
        }
        for r in 0..d {
            for c in 0..d {
                for j in 0..t {
                    for frob_row in &frob_rows {
                        if frob_row.iter().all(|v| v.is_zero()) {
                            continue;
                        }
                        for v in row_buf.iter_mut() {
                            *v = FieldElement::zero(base);
                        }
                        for (s, value) in frob_row.iter().enumerate() {
                            if !value.is_zero() {
                                row_buf[unknown_index(d, t, rel, r, c, j, s)] = value.clone();
                            }
                        }
                        constraints.insert(&row_buf);
                    }
                }
            }
        }
    }

    // Depth cut: digits at pi-depth >= N vanish (digits of invalid residue
    // are already killed by the generator constraints).
    for r in 0..d {
        for c in 0..d {
            for j in 0..t {
                let keep = matches!(
                    digit_depth(j, embedding.block_exp[r], embedding.block_exp[c], d),
                    Some(depth) if depth < n
                );
                if keep {
                    continue;
                }
                for s in 0..rel {
                    for v in row_buf.iter_mut() {
                        *v = FieldElement::zero(base);
                    }
                    row_buf[unknown_index(d, t, rel, r, c, j, s)] = FieldElement::one(base);
                    constraints.insert(&row_buf);
                }
            }
        }
    }

    let nullspace = constraints.constraint_nullspace();
    let basis: Vec<SkewMatrix> = nullspace
        .iter()
        .map(|v| matrix_from_unknowns(embedding, &y_basis, v))
        .collect();

    // Solution check: every basis element genuinely commutes with both
    // images, with padded products so the boundary digit is included.
    for b in &basis {
        let gen_comm = b
            .mul_padded(&embedding.image_generator, 1)
            .sub(&embedding.image_generator.mul_padded(b, 1));
        assert!(
            gen_comm.is_zero(),
            "centralizer element fails generator commutation"
        );
        let uni_comm = b
            .mul_padded(&embedding.image_uniformizer, 1)
            .sub(&embedding.image_uniformizer.mul_padded(b, 1));
        assert!(
            uni_comm.is_zero(),
            "centralizer element fails uniformizer commutation"
        );
    }

    let dimension = basis.len();
    Ok(CentralizerBasis {
        basis,
        dimension,
        depth: n,
    })
}

fn matrix_from_unknowns(
    embedding: &FormalEmbedding,
    y_basis: &[FieldElement],
    v: &[FieldElement],
) -> SkewMatrix {
    let d = embedding.d;
    let ctx = &embedding.ctx;
    let t = ctx.trunc();
    let rel = y_basis.len();
    let embed = embedding.coords.embedding();
    let mut m = SkewMatrix::zeros(ctx, d);
    for r in 0..d {
        for c in 0..d {
            let mut series = SkewSeries::zero(ctx);
            for j in 0..t {
                let mut coeff = FieldElement::zero(&embedding.k);
                for (s, ys) in y_basis.iter().enumerate() {
                    let x = &v[unknown_index(d, t, rel, r, c, j, s)];
                    if !x.is_zero() {
                        coeff = coeff.add(&ys.mul(&embed.map(x)));
                    }
                }
                if !coeff.is_zero() {
                    series = series.add(&SkewSeries::monomial(ctx, coeff, j));
                }
            }
            m.set(r, c, series);
        }
    }
    m
}

/// Reduction of a skew matrix to pi-depth N: digits at depth >= N are
/// zeroed. Products of centralizer elements are reduced this way before
/// span membership tests; the cut digits form a two-sided ideal of the
/// centralizer.
pub fn depth_reduce(embedding: &FormalEmbedding, m: &SkewMatrix) -> SkewMatrix {
    let d = embedding.d;
    let ctx = &embedding.ctx;
    let t = ctx.trunc();
    let n = embedding.depth();
    let mut out = SkewMatrix::zeros(ctx, d);
    for r in 0..d {
        for c in 0..d {
            let mut series = SkewSeries::zero(ctx);
            for j in 0..t {
                let coeff = m.at(r, c).coeff(j);
                if coeff.is_zero() {
                    continue;
                }
                if matches!(
                    digit_depth(j, embedding.block_exp[r], embedding.block_exp[c], d),
                    Some(depth) if depth < n
                ) {
                    series = series.add(&SkewSeries::monomial(ctx, coeff.clone(), j));
                }
            }
            out.set(r, c, series);
        }
    }
    out
}

/// F_q coordinates of a skew matrix, via the subfield coordinate structure.
pub fn skew_matrix_coords(embedding: &FormalEmbedding, m: &SkewMatrix) -> Vec<FieldElement> {
    let d = embedding.d;
    let t = embedding.ctx.trunc();
    let rel = embedding.coords.rel_degree();
    let mut out = vec![FieldElement::zero(&embedding.base); d * d * t * rel];
    for r in 0..d {
        for c in 0..d {
            for j in 0..t {
                let coeff = m.at(r, c).coeff(j);
                if coeff.is_zero() {
                    continue;
                }
                let cs = embedding.coords.coords(coeff);
                for (s, v) in cs.into_iter().enumerate() {
                    out[unknown_index(d, t, rel, r, c, j, s)] = v;
                }
            }
        }
    }
    out
}

/// True iff the centralizer span contains the identity and is closed under
/// multiplication after depth reduction.
pub fn centralizer_is_unital_and_closed(
    embedding: &FormalEmbedding,
    cb: &CentralizerBasis,
) -> bool {
    if cb.basis.is_empty() {
        return false;
    }
    let cols = embedding.d * embedding.d * embedding.ctx.trunc() * embedding.coords.rel_degree();
    let mut span = RowSpan::new(&embedding.base, cols);
    for b in &cb.basis {
        span.insert(&skew_matrix_coords(embedding, b));
    }
    let ident = SkewMatrix::identity(&embedding.ctx, embedding.d);
    if !span.contains(&skew_matrix_coords(embedding, &ident)) {
        return false;
    }
    for a in &cb.basis {
        for b in &cb.basis {
            let prod = depth_reduce(embedding, &a.mul(b));
            if !span.contains(&skew_matrix_coords(embedding, &prod)) {
                return false;
            }
        }
    }
    true
}

/// Certificate of the explicit multiplication-reversing bijection between
/// the depth-N centralizer and the truncated block order.
///
/// The target type is the reversal of f (a permutation of f, hence the
/// same hereditary order class); the index map re-sorts coordinates by
/// descending twist exponent. The map sends the tau^j digit at position
/// (r, c) to the pi^((j - w_r + w_c)/d) digit at the transposed,
/// re-indexed position, and is verified to reverse all basis products.
#[derive(Debug, Clone, Serialize)]
pub struct MatchCertificate {
    pub source_type: TypeVector,
    pub target_type: TypeVector,
    /// New index of each original coordinate.
    pub index_map: Vec<usize>,
    pub dimension: usize,
    pub block_order_dimension: usize,
    pub pairs_checked: usize,
    pub valid: bool,
}

/// Builds and verifies the anti-isomorphism from the centralizer onto the
/// block order of the reversed type, at matching truncations.
pub fn match_block_order(
    embedding: &FormalEmbedding,
    cb: &CentralizerBasis,
) -> Result<MatchCertificate, DieudonneError> {
    let d = embedding.d;
    let n = embedding.depth();
    let target_type = embedding.f.reversed();
    let ring = TruncatedDvr::new(&embedding.base, n);
    let order = BlockOrder::new(&ring, target_type.clone()).map_err(DieudonneError::from)?;

    // index_map[i] = position of coordinate i after re-sorting by
    // descending twist exponent (stable within a block).
    let mut sorted: Vec<usize> = (0..d).collect();
    sorted.sort_by_key(|&i| (std::cmp::Reverse(embedding.block_exp[i]), i));
    let mut index_map = vec![0usize; d];
    for (new_idx, &old_idx) in sorted.iter().enumerate() {
        index_map[old_idx] = new_idx;
    }

    let map_one = |m: &SkewMatrix| -> Result<DvrMatrix, DieudonneError> {
        let mut out = DvrMatrix::zeros(&ring, d, d);
        for r in 0..d {
            for c in 0..d {
                let series = m.at(r, c);
                let mut digits = vec![FieldElement::zero(&embedding.base); n];
                for (j, coeff) in series.coeffs().iter().enumerate() {
                    if coeff.is_zero() {
                        continue;
                    }
                    let depth = digit_depth(j, embedding.block_exp[r], embedding.block_exp[c], d)
                        .ok_or(DieudonneError::NotInSubfield)?;
                    if depth >= n {
                        return Err(DieudonneError::InsufficientTruncation);
                    }
                    let value = embedding
                        .coords
                        .descend(coeff)
                        .ok_or(DieudonneError::NotInSubfield)?;
                    digits[depth] = digits[depth].add(&value);
                }
                out.set(
                    index_map[c],
                    index_map[r],
                    DvrElement::from_coeffs(&ring, digits),
                );
            }
        }
        Ok(out)
    };

    let images: Vec<DvrMatrix> = cb.basis.iter().map(&map_one).collect::<Result<_, _>>()?;

    let mut valid = true;

    // Images must land in the block order and span it exactly.
    let mut image_span = RowSpan::new(&embedding.base, d * d * n);
    for img in &images {
        if !order.contains(img).map_err(DieudonneError::from)? {
            valid = false;
        }
        image_span.insert(&crate::order::matrix_digit_coords(img));
    }
    let block_order_dimension = order.fq_dimension();
    if image_span.dim() != images.len() || images.len() != block_order_dimension {
        valid = false;
    }

    // Anti-multiplicativity on every basis pair: the image of x*y equals
    // image(y) * image(x), with the centralizer product reduced to depth N.
    let mut pairs_checked = 0;
    for (i, x) in cb.basis.iter().enumerate() {
        for (j, y) in cb.basis.iter().enumerate() {
            let prod = depth_reduce(embedding, &x.mul(y));
            let lhs = map_one(&prod)?;
            let rhs = images[j].mul(&images[i]);
            if lhs != rhs {
                valid = false;
            }
            pairs_checked += 1;
        }
    }

    Ok(MatchCertificate {
        source_type: embedding.f.clone(),
        target_type,
        index_map,
        dimension: cb.dimension,
        block_order_dimension,
        pairs_checked,
        valid,
    })
}

// ---------------------------------------------------------------------------
// Semilinear maps and graded modules
// ---------------------------------------------------------------------------

/// A Frobenius-semilinear map v -> pi^shift * matrix * Fr^twist(v) on the
/// ambient space. Twist 0 gives a plain linear map.
#[derive(Clone)]
pub struct SemilinearMap {
    pub shift: i64,
    pub matrix: DvrMatrix,
    pub twist: u32,
}

impl SemilinearMap {
    pub fn linear(matrix: DvrMatrix) -> Self {
        SemilinearMap {
            shift: 0,
            matrix,
            twist: 0,
        }
    }

    pub fn twisted(matrix: DvrMatrix, twist: u32) -> Self {
        SemilinearMap {
            shift: 0,
            matrix,
            twist,
        }
    }

    /// Image lattice of a lattice under this map.
    pub fn image(&self, l: &Lattice) -> Result<Lattice, DvrError> {
        Lattice::new(
            l.shift() + self.shift,
            self.matrix.mul(&l.basis().frobenius(self.twist)),
        )
    }

    /// self after other (apply `other` first).
    pub fn compose(&self, other: &SemilinearMap) -> SemilinearMap {
        SemilinearMap {
            shift: self.shift + other.shift,
            matrix: self.matrix.mul(&other.matrix.frobenius(self.twist)),
            twist: self.twist + other.twist,
        }
    }

    pub fn power(&self, e: u32) -> SemilinearMap {
        let d = self.matrix.rows();
        let mut acc = SemilinearMap::linear(DvrMatrix::identity(self.matrix.ring(), d));
        for _ in 0..e {
            acc = self.compose(&acc);
        }
        acc
    }

    /// Equality as maps, comparing shift-adjusted matrices.
    pub fn same_map(&self, other: &SemilinearMap) -> bool {
        if self.twist != other.twist {
            return false;
        }
        let delta = self.shift - other.shift;
        if delta >= 0 {
            self.matrix.scale_pi(delta as usize) == other.matrix
        } else {
            self.matrix == other.matrix.scale_pi((-delta) as usize)
        }
    }
}

impl fmt::Debug for SemilinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pi^{} * {:?} o Fr^{}",
            self.shift, self.matrix, self.twist
        )
    }
}

/// A graded module: component lattices M_0..M_{d-1} in a common ambient
/// space, with linear maps and twisted (Frobenius-semilinear) maps
/// M_i -> M_{i+1}, cyclically closed. Composing the linear maps once
/// around the cycle is multiplication by pi, and the twisted maps commute
/// with the linear ones.
pub struct GradedDieudonneModule {
    components: Vec<Lattice>,
    linear_maps: Vec<SemilinearMap>,
    twisted_maps: Vec<SemilinearMap>,
}

impl GradedDieudonneModule {
    pub fn new(
        components: Vec<Lattice>,
        linear_maps: Vec<SemilinearMap>,
        twisted_maps: Vec<SemilinearMap>,
    ) -> Result<Self, DieudonneError> {
        let d = components.len();
        assert!(d >= 1);
        assert_eq!(linear_maps.len(), d);
        assert_eq!(twisted_maps.len(), d);
        let module = GradedDieudonneModule {
            components,
            linear_maps,
            twisted_maps,
        };
        module.validate()?;
        Ok(module)
    }

    fn validate(&self) -> Result<(), DieudonneError> {
        let d = self.grading();
        for i in 0..d {
            let next = (i + 1) % d;
            // Injectivity is certified by the image lattices staying full
            // (a singular image is rejected by the lattice constructor);
            // the containments are the module conditions.
            let lin_image = self.linear_maps[i].image(&self.components[i])?;
            if !self.components[next].contains(&lin_image) {
                return Err(DieudonneError::Order(format!(
                    "linear map {} does not carry component {} into component {}",
                    i, i, next
                )));
            }
            let tw_image = self.twisted_maps[i].image(&self.components[i])?;
            if !self.components[next].contains(&tw_image) {
                return Err(DieudonneError::Order(format!(
                    "twisted map {} does not carry component {} into component {}",
                    i, i, next
                )));
            }
            // Compatibility around each corner of the grading.
            let lhs = self.twisted_maps[next].compose(&self.linear_maps[i]);
            let rhs = self.linear_maps[next].compose(&self.twisted_maps[i]);
            if !lhs.same_map(&rhs) {
                return Err(DieudonneError::Order(format!(
                    "maps out of component {} do not commute",
                    i
                )));
            }
        }
        // The cycle of linear maps is multiplication by pi.
        let mut cycle = self.linear_maps[d - 1].clone();
        for i in (0..d - 1).rev() {
            cycle = cycle.compose(&self.linear_maps[i]);
        }
        let ring = self.components[0].ring();
        let dim = self.components[0].dim();
        let pi_mult = SemilinearMap {
            shift: 1,
            matrix: DvrMatrix::identity(ring, dim),
            twist: 0,
        };
        if !cycle.same_map(&pi_mult) {
            return Err(DieudonneError::Order(
                "composing the linear maps around the cycle is not multiplication by pi".into(),
            ));
        }
        Ok(())
    }

    pub fn grading(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &Lattice {
        &self.components[i]
    }

    pub fn linear_map(&self, i: usize) -> &SemilinearMap {
        &self.linear_maps[i]
    }

    pub fn twisted_map(&self, i: usize) -> &SemilinearMap {
        &self.twisted_maps[i]
    }

    /// Cokernel dimensions of the twisted maps: the type of the module.
    pub fn type_of_module(&self) -> Result<TypeVector, DieudonneError> {
        let d = self.grading();
        let mut entries = Vec::with_capacity(d);
        for i in 0..d {
            let next = (i + 1) % d;
            let image = self.twisted_maps[i].image(&self.components[i])?;
            entries.push(self.components[next].quotient_dim(&image)?);
        }
        Ok(TypeVector::new(entries))
    }

    /// Image comparison per graded piece: the twisted and linear maps have
    /// the same image everywhere.
    pub fn is_exceptional(&self) -> Result<bool, DieudonneError> {
        let d = self.grading();
        for i in 0..d {
            let tw = self.twisted_maps[i].image(&self.components[i])?;
            let lin = self.linear_maps[i].image(&self.components[i])?;
            if !tw.eq_lattice(&lin) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Type all ones.
    pub fn is_special(&self) -> Result<bool, DieudonneError> {
        let t = self.type_of_module()?;
        Ok(t.entries().iter().all(|&v| v == 1))
    }

    pub fn is_superspecial(&self) -> Result<bool, DieudonneError> {
        Ok(self.is_special()? && self.is_exceptional()?)
    }

    /// The total space: the direct sum of the components with the twisted
    /// maps assembled into one block-cyclic semilinear operator.
    pub fn total_space(&self) -> Result<(Lattice, SemilinearMap), DieudonneError> {
        let d = self.grading();
        let dim = self.components[0].dim();
        let ring = self.components[0].ring();
        let total_dim = d * dim;
        let min_shift = self.components.iter().map(|l| l.shift()).min().unwrap();
        let mut basis = DvrMatrix::zeros(ring, total_dim, total_dim);
        for (i, comp) in self.components.iter().enumerate() {
            let scaled = comp.basis().scale_pi((comp.shift() - min_shift) as usize);
            for r in 0..dim {
                for c in 0..dim {
                    basis.set(i * dim + r, i * dim + c, scaled.at(r, c).clone());
                }
            }
        }
        let total_lattice = Lattice::new(min_shift, basis)?;
        let twist = self.twisted_maps[0].twist;
        for m in &self.twisted_maps {
            assert_eq!(m.twist, twist, "total space requires a uniform twist");
        }
        let min_map_shift = self.twisted_maps.iter().map(|m| m.shift).min().unwrap();
        let mut matrix = DvrMatrix::zeros(ring, total_dim, total_dim);
        for (i, m) in self.twisted_maps.iter().enumerate() {
            let next = (i + 1) % d;
            let scaled = m.matrix.scale_pi((m.shift - min_map_shift) as usize);
            for r in 0..dim {
                for c in 0..dim {
                    matrix.set(next * dim + r, i * dim + c, scaled.at(r, c).clone());
                }
            }
        }
        Ok((
            total_lattice,
            SemilinearMap {
                shift: min_map_shift,
                matrix,
                twist,
            },
        ))
    }
}

/// The standard exceptional module of a type vector: an increasing flag of
/// lattices with the linear maps given by inclusions (the last one scaled
/// by pi) and the twisted maps equal to the linear maps composed with one
/// Frobenius twist. Its type is f and it is exceptional by construction.
pub fn standard_module(
    f: &TypeVector,
    ring: &Arc<TruncatedDvr>,
) -> Result<GradedDieudonneModule, DieudonneError> {
    let d = f.len();
    if f.sum() != d {
        return Err(DieudonneError::TypeSum { sum: f.sum(), d });
    }
    let mut components = Vec::with_capacity(d);
    let mut cut = 0usize;
    for &size in f.entries() {
        // Component i has the coordinates below the cut scaled by pi^(-1):
        // shift -1 with pi left on the unscaled coordinates. A zero cut is
        // the standard lattice, kept in normalized form so no truncation
        // digit is wasted.
        if cut == 0 {
            components.push(Lattice::standard(ring, d));
        } else {
            let mut basis = DvrMatrix::zeros(ring, d, d);
            for j in 0..d {
                let exp = usize::from(j >= cut);
                basis.set(j, j, DvrElement::pi_pow(ring, exp));
            }
            components.push(Lattice::new(-1, basis).map_err(DieudonneError::from)?);
        }
        cut += size;
    }
    let mut linear_maps = Vec::with_capacity(d);
    let mut twisted_maps = Vec::with_capacity(d);
    for i in 0..d {
        let scale = usize::from(i == d - 1);
        let matrix = DvrMatrix::pi_identity(ring, d, scale);
        linear_maps.push(SemilinearMap::linear(matrix.clone()));
        twisted_maps.push(SemilinearMap::twisted(matrix, 1));
    }
    GradedDieudonneModule::new(components, linear_maps, twisted_maps)
}

/// Local lattice conditions for the three roles a place can play.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalRole {
    /// The twisted map is bijective on the lattice.
    Etale,
    /// pi M inside phi(M) inside M, with cokernel dimension d.
    Zero { d: usize },
    /// M inside phi(M) with d * dim(phi(M)/M) = rank, and the
    /// (d*degree)-th power of phi carries M onto pi^(-1) M.
    Pole { d: usize, degree: u32 },
}

/// Checks the displayed containments, cokernel lengths and power identity
/// for the given role.
pub fn classify_local_behavior(
    lattice: &Lattice,
    map: &SemilinearMap,
    role: LocalRole,
) -> Result<bool, DieudonneError> {
    let image = map.image(lattice)?;
    match role {
        LocalRole::Etale => Ok(lattice.eq_lattice(&image)),
        LocalRole::Zero { d } => {
            if !(lattice.contains(&image) && image.contains(&lattice.scaled(1))) {
                return Ok(false);
            }
            Ok(lattice.quotient_dim(&image)? == d)
        }
        LocalRole::Pole { d, degree } => {
            if !image.contains(lattice) {
                return Ok(false);
            }
            if d * image.quotient_dim(lattice)? != lattice.dim() {
                return Ok(false);
            }
            let power = map.power(d as u32 * degree);
            let final_image = power.image(lattice)?;
            Ok(final_image.eq_lattice(&lattice.scaled(-1)))
        }
    }
}

/// The rank-d pole-side model with basis 1, tau, .., tau^(d-1) and the
/// twisted map acting by tau, where tau^d is the inverse uniformizer.
pub fn pole_model(ring: &Arc<TruncatedDvr>, d: usize) -> (Lattice, SemilinearMap) {
    let lattice = Lattice::standard(ring, d);
    // tau . tau^j = tau^(j+1) for j < d-1, and tau . tau^(d-1) = pi^(-1) . 1,
    // written as pi^(-1) * (matrix with pi on the subdiagonal, 1 in the corner).
    let mut matrix = DvrMatrix::zeros(ring, d, d);
    for j in 0..d - 1 {
        matrix.set(j + 1, j, DvrElement::pi_pow(ring, 1));
    }
    matrix.set(0, d - 1, DvrElement::one(ring));
    (
        lattice,
        SemilinearMap {
            shift: -1,
            matrix,
            twist: 1,
        },
    )
}
