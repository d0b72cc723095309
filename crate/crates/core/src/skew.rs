//! Truncated skew power series over a finite field: the twist variable
//! satisfies tau * a = Fr_q(a) * tau, where Fr_q is the q-power Frobenius
//! of the coefficient field. Associativity and distributivity hold exactly
//! in the truncation.

use std::fmt;
use std::sync::Arc;

use crate::field::{FieldElement, FieldSpec};

/// Coefficient field and truncation length shared by a family of series.
#[derive(Debug)]
pub struct SkewContext {
    field: Arc<FieldSpec>,
    trunc: usize,
}

impl SkewContext {
    pub fn new(field: &Arc<FieldSpec>, trunc: usize) -> Arc<Self> {
        assert!(trunc >= 1);
        Arc::new(SkewContext {
            field: Arc::clone(field),
            trunc,
        })
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }
}

impl PartialEq for SkewContext {
    fn eq(&self, other: &Self) -> bool {
        self.trunc == other.trunc && *self.field == *other.field
    }
}

impl Eq for SkewContext {}

/// A polynomial c_0 + c_1 tau + .. + c_{T-1} tau^{T-1} in the truncated
/// skew ring.
#[derive(Clone, PartialEq, Eq)]
pub struct SkewSeries {
    ctx: Arc<SkewContext>,
    coeffs: Vec<FieldElement>,
}

impl SkewSeries {
    pub fn zero(ctx: &Arc<SkewContext>) -> Self {
        let coeffs = vec![FieldElement::zero(ctx.field()); ctx.trunc()];
        SkewSeries {
            ctx: Arc::clone(ctx),
            coeffs,
        }
    }

    pub fn one(ctx: &Arc<SkewContext>) -> Self {
        Self::monomial(ctx, FieldElement::one(ctx.field()), 0)
    }

    pub fn tau(ctx: &Arc<SkewContext>) -> Self {
        Self::monomial(ctx, FieldElement::one(ctx.field()), 1)
    }

    /// c * tau^k (zero when k exceeds the truncation).
    pub fn monomial(ctx: &Arc<SkewContext>, c: FieldElement, k: usize) -> Self {
        assert!(
            **c.spec() == **ctx.field(),
            "coefficient from the wrong field"
        );
        let mut s = Self::zero(ctx);
        if k < ctx.trunc() {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn from_field(ctx: &Arc<SkewContext>, c: FieldElement) -> Self {
        Self::monomial(ctx, c, 0)
    }

    pub fn ctx(&self) -> &Arc<SkewContext> {
        &self.ctx
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

    fn assert_same_ctx(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx,
            "mixed skew contexts"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_ctx(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.add(b))
            .collect();
        SkewSeries {
            ctx: Arc::clone(&self.ctx),
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_same_ctx(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.sub(b))
            .collect();
        SkewSeries {
            ctx: Arc::clone(&self.ctx),
            coeffs,
        }
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.neg()).collect();
        SkewSeries {
            ctx: Arc::clone(&self.ctx),
            coeffs,
        }
    }

    /// Product in the truncation: tau^i * b = Fr^i(b) * tau^i.
    pub fn mul(&self, other: &Self) -> Self {
        self.mul_padded(other, 0).truncate()
    }

    /// Product with `pad` extra coefficients kept beyond the truncation.
    /// Because the inputs are polynomials of degree < T, the coefficients
    /// of the product through degree T - 1 + pad are exact.
    pub fn mul_padded(&self, other: &Self, pad: usize) -> PaddedSeries {
        self.assert_same_ctx(other);
        let t = self.ctx.trunc();
        let out_len = t + pad;
        let spec = self.ctx.field();
        let mut coeffs = vec![FieldElement::zero(spec); out_len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= out_len {
                    break;
                }
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(&b.frobenius_pow(i as u32)));
                }
            }
        }
        PaddedSeries {
            ctx: Arc::clone(&self.ctx),
            coeffs,
        }
    }
}

/// Result of a padded product: possibly longer than the context truncation.
#[derive(Clone, PartialEq, Eq)]
pub struct PaddedSeries {
    ctx: Arc<SkewContext>,
    coeffs: Vec<FieldElement>,
}

impl PaddedSeries {
    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &FieldElement {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.coeffs.len(), other.coeffs.len());
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.add(b))
            .collect();
        PaddedSeries {
            ctx: Arc::clone(&self.ctx),
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.coeffs.len(), other.coeffs.len());
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.sub(b))
            .collect();
        PaddedSeries {
            ctx: Arc::clone(&self.ctx),
            coeffs,
        }
    }

    /// Truncates back to a plain series.
    pub fn truncate(&self) -> SkewSeries {
        let t = self.ctx.trunc();
        SkewSeries {
            ctx: Arc::clone(&self.ctx),
            coeffs: self.coeffs[..t].to_vec(),
        }
    }
}

impl From<SkewSeries> for PaddedSeries {
    fn from(s: SkewSeries) -> Self {
        PaddedSeries {
            ctx: s.ctx,
            coeffs: s.coeffs,
        }
    }
}

impl fmt::Debug for SkewSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{:?}*tau^{}", c, i)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A square matrix over the truncated skew ring.
#[derive(Clone, PartialEq, Eq)]
pub struct SkewMatrix {
    ctx: Arc<SkewContext>,
    d: usize,
    data: Vec<SkewSeries>,
}

impl SkewMatrix {
    pub fn zeros(ctx: &Arc<SkewContext>, d: usize) -> Self {
        let data = vec![SkewSeries::zero(ctx); d * d];
        SkewMatrix {
            ctx: Arc::clone(ctx),
            d,
            data,
        }
    }

    pub fn identity(ctx: &Arc<SkewContext>, d: usize) -> Self {
        let mut m = Self::zeros(ctx, d);
        for i in 0..d {
            m.set(i, i, SkewSeries::one(ctx));
        }
        m
    }

    /// tau * Id.
    pub fn tau_identity(ctx: &Arc<SkewContext>, d: usize) -> Self {
        let mut m = Self::zeros(ctx, d);
        for i in 0..d {
            m.set(i, i, SkewSeries::tau(ctx));
        }
        m
    }

    pub fn diagonal(ctx: &Arc<SkewContext>, entries: Vec<SkewSeries>) -> Self {
        let d = entries.len();
        let mut m = Self::zeros(ctx, d);
        for (i, e) in entries.into_iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }

    pub fn ctx(&self) -> &Arc<SkewContext> {
        &self.ctx
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn at(&self, r: usize, c: usize) -> &SkewSeries {
        &self.data[r * self.d + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: SkewSeries) {
        self.data[r * self.d + c] = v;
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.add(b))
            .collect();
        SkewMatrix {
            ctx: Arc::clone(&self.ctx),
            d: self.d,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.sub(b))
            .collect();
        SkewMatrix {
            ctx: Arc::clone(&self.ctx),
            d: self.d,
            data,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_padded(other, 0).truncate()
    }

    /// Entrywise padded product; see `SkewSeries::mul_padded`.
    pub fn mul_padded(&self, other: &Self, pad: usize) -> PaddedMatrix {
        assert_eq!(self.d, other.d);
        let t = self.ctx.trunc();
        let zero = PaddedSeries {
            ctx: Arc::clone(&self.ctx),
            coeffs: vec![FieldElement::zero(self.ctx.field()); t + pad],
        };
        let mut data = vec![zero; self.d * self.d];
        for r in 0..self.d {
            for k in 0..self.d {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..self.d {
                    let b = other.at(k, c);
                    if !b.is_zero() {
                        let prod = a.mul_padded(b, pad);
                        data[r * self.d + c] = data[r * self.d + c].add(&prod);
                    }
                }
            }
        }
        PaddedMatrix {
            ctx: Arc::clone(&self.ctx),
            d: self.d,
            data,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }
}

/// Matrix of padded entries.
pub struct PaddedMatrix {
    ctx: Arc<SkewContext>,
    d: usize,
    data: Vec<PaddedSeries>,
}

impl PaddedMatrix {
    pub fn at(&self, r: usize, c: usize) -> &PaddedSeries {
        &self.data[r * self.d + c]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.sub(b))
            .collect();
        PaddedMatrix {
            ctx: Arc::clone(&self.ctx),
            d: self.d,
            data,
        }
    }

    pub fn truncate(&self) -> SkewMatrix {
        let data = self.data.iter().map(|e| e.truncate()).collect();
        SkewMatrix {
            ctx: Arc::clone(&self.ctx),
            d: self.d,
            data,
        }
    }
}

impl fmt::Debug for SkewMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for r in 0..self.d {
            write!(f, "  [")?;
            for c in 0..self.d {
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
