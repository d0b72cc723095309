//! Exact arithmetic in F_q and its extensions F_{q^m}.
//!
//! A field is described by a [`FieldSpec`] with parameters `(p, e, m)`:
//! the field has q = p^e elements in its base layer and the spec models
//! `F_{q^m} = F_p[x]/(modulus)` with a monic irreducible modulus of degree
//! `e*m` over F_p. The modulus is always the lexicographically smallest
//! irreducible polynomial of its degree (smallest value of
//! `sum c_i p^i` over the non-leading coefficients), so serialized
//! elements are reproducible across runs and machines.
//!
//! Elements carry their spec; mixing elements of different specs in
//! arithmetic is a programming error and panics. Embeddings between
//! fields are explicit values ([`Embedding`]), computed deterministically
//! by root-finding in enumeration order.

use std::fmt;
use std::sync::Arc;

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};

/// Hard cap on `e*m`: all moduli have degree at most 16 over F_p.
pub const DEGREE_CAP: u32 = 16;
/// Hard cap on field size for full enumeration.
pub const ENUMERATION_CAP: u128 = 1 << 20;
/// Hard cap on the characteristic.
pub const CHAR_CAP: u64 = 1 << 20;

const MAX_COEFFS: usize = DEGREE_CAP as usize;

pub type Coeffs = ArrayVec<u64, MAX_COEFFS>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    NotPrime(u64),
    DegreeCapExceeded {
        p: u64,
        e: u32,
        m: u32,
    },
    EnumerationCapExceeded(u128),
    DivisionByZero,
    /// Embedding requested between fields with different characteristic or
    /// non-dividing degrees.
    IncompatibleEmbedding,
    BadElement(String),
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::NotPrime(p) => write!(f, "{} is not prime", p),
            FieldError::DegreeCapExceeded { p, e, m } => {
                write!(
                    f,
                    "field F_{{{}^{}}} exceeds the degree cap e*m <= {}",
                    p,
                    e * m,
                    DEGREE_CAP
                )
            }
            FieldError::EnumerationCapExceeded(n) => {
                write!(f, "field of size {} exceeds the enumeration cap 2^20", n)
            }
            FieldError::DivisionByZero => write!(f, "division by zero field element"),
            FieldError::IncompatibleEmbedding => {
                write!(
                    f,
                    "no embedding: characteristics differ or degrees do not divide"
                )
            }
            FieldError::BadElement(msg) => write!(f, "bad field element: {}", msg),
        }
    }
}

impl std::error::Error for FieldError {}

/// Description of F_{q^m} with q = p^e, as `F_p[x]/(modulus)`.
#[derive(Debug, Clone)]
pub struct FieldSpec {
    p: u64,
    e: u32,
    m: u32,
    /// Monic irreducible polynomial over F_p, low degree first, length `e*m + 1`.
    modulus: Vec<u64>,
    /// Matrix of the q-power Frobenius in the power basis: column `i` is
    /// the coefficient vector of `x^(i*q) mod modulus`.
    frob_columns: Vec<Coeffs>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

impl FieldSpec {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// q = p^e, the cardinality of the base layer.
    pub fn q(&self) -> u128 {
        (self.p as u128).pow(self.e)
    }

    /// Degree of the modulus over F_p, i.e. `e*m`.
    pub fn degree(&self) -> usize {
        (self.e * self.m) as usize
    }

    /// Total number of elements, p^(e*m).
    pub fn size(&self) -> u128 {
        (self.p as u128).pow(self.e * self.m)
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }
}

/// Serialized form of a `FieldSpec`: modulus coefficients low degree first.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct FieldSpecRepr {
    pub p: u64,
    pub e: u32,
    pub m: u32,
    pub modulus: Vec<u64>,
}

impl From<&FieldSpec> for FieldSpecRepr {
    fn from(s: &FieldSpec) -> Self {
        FieldSpecRepr {
            p: s.p,
            e: s.e,
            m: s.m,
            modulus: s.modulus.clone(),
        }
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        FieldSpecRepr::from(self).serialize(serializer)
    }
}

/// Constructs F_{q^m} with q = p^e. The modulus is chosen deterministically.
pub fn make_field(p: u64, e: u32, m: u32) -> Result<Arc<FieldSpec>, FieldError> {
    if p < 2 || !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if p > CHAR_CAP {
        return Err(FieldError::DegreeCapExceeded { p, e, m });
    }
    if e == 0 || m == 0 || e * m > DEGREE_CAP {
        return Err(FieldError::DegreeCapExceeded { p, e, m });
    }
    let deg = (e * m) as usize;
    let modulus = smallest_irreducible(p, deg);
    let frob_columns = frobenius_columns(p, e, &modulus);
    Ok(Arc::new(FieldSpec {
        p,
        e,
        m,
        modulus,
        frob_columns,
    }))
}

/// Reconstructs a spec from its serialized form, re-verifying the modulus.
pub fn field_from_repr(repr: &FieldSpecRepr) -> Result<Arc<FieldSpec>, FieldError> {
    let spec = make_field(repr.p, repr.e, repr.m)?;
    if spec.modulus != repr.modulus {
        return Err(FieldError::BadElement(format!(
            "modulus {:?} is not the canonical modulus for (p,e,m)=({},{},{})",
            repr.modulus, repr.p, repr.e, repr.m
        )));
    }
    Ok(spec)
}

/// An element of the field described by its spec, as a coefficient vector
/// over F_p of length `e*m` in the power basis of the modulus root.
#[derive(Clone)]
pub struct FieldElement {
    spec: Arc<FieldSpec>,
    coeffs: Coeffs,
}

impl FieldElement {
    pub fn new(spec: &Arc<FieldSpec>, coeffs: &[u64]) -> Result<Self, FieldError> {
        if coeffs.len() > spec.degree() {
            return Err(FieldError::BadElement(format!(
                "{} coefficients for a degree-{} field",
                coeffs.len(),
                spec.degree()
            )));
        }
        let mut c = Coeffs::new();
        for &v in coeffs {
            if v >= spec.p {
                return Err(FieldError::BadElement(format!(
                    "coefficient {} >= p = {}",
                    v, spec.p
                )));
            }
            c.push(v);
        }
        while c.len() < spec.degree() {
            c.push(0);
        }
        Ok(FieldElement {
            spec: Arc::clone(spec),
            coeffs: c,
        })
    }

    pub fn zero(spec: &Arc<FieldSpec>) -> Self {
        let mut c = Coeffs::new();
        for _ in 0..spec.degree() {
            c.push(0);
        }
        FieldElement {
            spec: Arc::clone(spec),
            coeffs: c,
        }
    }

    pub fn one(spec: &Arc<FieldSpec>) -> Self {
        let mut el = Self::zero(spec);
        el.coeffs[0] = 1;
        el
    }

    /// The image of the integer `n` under F_p -> field.
    pub fn from_int(spec: &Arc<FieldSpec>, n: u64) -> Self {
        let mut el = Self::zero(spec);
        el.coeffs[0] = n % spec.p;
        el
    }

    /// The class of `x`, the root of the modulus. Generates the field as an
    /// F_p-algebra whenever the degree is at least 2.
    pub fn generator(spec: &Arc<FieldSpec>) -> Self {
        if spec.degree() == 1 {
            // x = -c mod (x + c)
            let c = spec.modulus[0];
            return Self::from_int(spec, (spec.p - c) % spec.p);
        }
        let mut el = Self::zero(spec);
        el.coeffs[1] = 1;
        el
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    fn assert_same_spec(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.spec, &other.spec) || *self.spec == *other.spec,
            "cross-field arithmetic: {:?} vs {:?}",
            FieldSpecRepr::from(&*self.spec),
            FieldSpecRepr::from(&*other.spec)
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_spec(other);
        let p = self.spec.p;
        let mut c = Coeffs::new();
        for i in 0..self.coeffs.len() {
            c.push((self.coeffs[i] + other.coeffs[i]) % p);
        }
        FieldElement {
            spec: Arc::clone(&self.spec),
            coeffs: c,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_same_spec(other);
        let p = self.spec.p;
        let mut c = Coeffs::new();
        for i in 0..self.coeffs.len() {
            c.push((self.coeffs[i] + p - other.coeffs[i]) % p);
        }
        FieldElement {
            spec: Arc::clone(&self.spec),
            coeffs: c,
        }
    }

    pub fn neg(&self) -> Self {
        let p = self.spec.p;
        let mut c = Coeffs::new();
        for &v in &self.coeffs {
            c.push((p - v) % p);
        }
        FieldElement {
            spec: Arc::clone(&self.spec),
            coeffs: c,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_spec(other);
        let p = self.spec.p;
        let d = self.spec.degree();
        if d == 1 {
            let mut c = Coeffs::new();
            c.push(self.coeffs[0] * other.coeffs[0] % p);
            return FieldElement {
                spec: Arc::clone(&self.spec),
                coeffs: c,
            };
        }
        let mut prod = [0u64; 2 * MAX_COEFFS];
        for i in 0..d {
            let a = self.coeffs[i];
            if a == 0 {
                continue;
            }
            for j in 0..d {
                prod[i + j] += a * other.coeffs[j];
            }
        }
        for v in prod.iter_mut().take(2 * d - 1) {
            *v %= p;
        }
        // Reduce by the monic modulus.
        for k in (d..2 * d - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..d {
                let mc = self.spec.modulus[i];
                if mc != 0 {
                    prod[k - d + i] = (prod[k - d + i] + (p - mc) * c) % p;
                }
            }
        }
        let mut coeffs = Coeffs::new();
        for v in prod.iter().take(d) {
            coeffs.push(*v);
        }
        FieldElement {
            spec: Arc::clone(&self.spec),
            coeffs,
        }
    }

    /// Scales by an integer (image of `n` in F_p).
    pub fn scale_int(&self, n: u64) -> Self {
        let p = self.spec.p;
        let s = n % p;
        let mut c = Coeffs::new();
        for &v in &self.coeffs {
            c.push(v * s % p);
        }
        FieldElement {
            spec: Arc::clone(&self.spec),
            coeffs: c,
        }
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let p = self.spec.p;
        let inv = fp_poly_inverse_mod(&trim(&self.coeffs), &self.spec.modulus, p)
            .expect("nonzero element of a field is invertible");
        let mut c = Coeffs::new();
        for i in 0..self.spec.degree() {
            c.push(*inv.get(i).unwrap_or(&0));
        }
        Ok(FieldElement {
            spec: Arc::clone(&self.spec),
            coeffs: c,
        })
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.spec);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        acc
    }

    /// The q-power Frobenius a -> a^q with q = p^e.
    pub fn frobenius(&self) -> Self {
        let d = self.spec.degree();
        let p = self.spec.p;
        let mut out = Coeffs::new();
        for _ in 0..d {
            out.push(0);
        }
        for i in 0..d {
            let a = self.coeffs[i];
            if a == 0 {
                continue;
            }
            let col = &self.spec.frob_columns[i];
            for j in 0..d {
                out[j] = (out[j] + a * col[j]) % p;
            }
        }
        FieldElement {
            spec: Arc::clone(&self.spec),
            coeffs: out,
        }
    }

    /// Frobenius iterated `k` times, i.e. a -> a^(q^k).
    pub fn frobenius_pow(&self, k: u32) -> Self {
        let mut out = self.clone();
        for _ in 0..k {
            out = out.frobenius();
        }
        out
    }

    /// Index of this element in enumeration order.
    pub fn index(&self) -> u128 {
        let p = self.spec.p as u128;
        let mut n = 0u128;
        for &c in self.coeffs.iter().rev() {
            n = n * p + c as u128;
        }
        n
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        *self.spec == *other.spec && self.coeffs == other.coeffs
    }
}

impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.coeffs[..])
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.coeffs.as_slice().serialize(serializer)
    }
}

macro_rules! element_binop {
    ($trait:ident, $method:ident) => {
        impl std::ops::$trait for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                FieldElement::$method(self, rhs)
            }
        }
    };
}

element_binop!(Add, add);
element_binop!(Sub, sub);
element_binop!(Mul, mul);

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::neg(self)
    }
}

/// Yields every element exactly once, in increasing order of
/// `sum c_i p^i` (so F_2 enumerates as `[0, 1]`).
pub fn enumerate(spec: &Arc<FieldSpec>) -> Result<impl Iterator<Item = FieldElement>, FieldError> {
    let size = spec.size();
    if size > ENUMERATION_CAP {
        return Err(FieldError::EnumerationCapExceeded(size));
    }
    let spec = Arc::clone(spec);
    Ok((0..size as u64).map(move |n| element_from_index(&spec, n)))
}

/// Decodes an enumeration index into an element (base-p digits).
pub fn element_from_index(spec: &Arc<FieldSpec>, mut n: u64) -> FieldElement {
    let p = spec.p;
    let mut c = Coeffs::new();
    for _ in 0..spec.degree() {
        c.push(n % p);
        n /= p;
    }
    FieldElement {
        spec: Arc::clone(spec),
        coeffs: c,
    }
}

/// Parses an element from its serialized coefficient list.
pub fn element_from_coeffs(
    spec: &Arc<FieldSpec>,
    coeffs: &[u64],
) -> Result<FieldElement, FieldError> {
    FieldElement::new(spec, coeffs)
}

/// An embedding of one field into another, fixed once per pair by mapping
/// the small generator to the first root of the small modulus in the large
/// field (enumeration order).
#[derive(Clone)]
pub struct Embedding {
    small: Arc<FieldSpec>,
    big: Arc<FieldSpec>,
    /// powers[i] = r^i where r is the chosen root of the small modulus.
    powers: Vec<FieldElement>,
}

impl Embedding {
    pub fn new(small: &Arc<FieldSpec>, big: &Arc<FieldSpec>) -> Result<Self, FieldError> {
        if small.p != big.p || !big.degree().is_multiple_of(small.degree()) {
            return Err(FieldError::IncompatibleEmbedding);
        }
        let root = find_root_of_modulus(small, big)?;
        let mut powers = Vec::with_capacity(small.degree());
        let mut acc = FieldElement::one(big);
        for _ in 0..small.degree() {
            powers.push(acc.clone());
            acc = acc.mul(&root);
        }
        Ok(Embedding {
            small: Arc::clone(small),
            big: Arc::clone(big),
            powers,
        })
    }

    /// Identity embedding of a field into itself.
    pub fn identity(spec: &Arc<FieldSpec>) -> Self {
        let gen = FieldElement::generator(spec);
        let mut powers = Vec::with_capacity(spec.degree());
        let mut acc = FieldElement::one(spec);
        for _ in 0..spec.degree() {
            powers.push(acc.clone());
            acc = acc.mul(&gen);
        }
        Embedding {
            small: Arc::clone(spec),
            big: Arc::clone(spec),
            powers,
        }
    }

    pub fn small(&self) -> &Arc<FieldSpec> {
        &self.small
    }

    pub fn big(&self) -> &Arc<FieldSpec> {
        &self.big
    }

    pub fn map(&self, a: &FieldElement) -> FieldElement {
        assert!(
            *a.spec == *self.small,
            "embedding applied to an element of the wrong field"
        );
        let mut out = FieldElement::zero(&self.big);
        for (i, &c) in a.coeffs.iter().enumerate() {
            if c != 0 {
                out = out.add(&self.powers[i].scale_int(c));
            }
        }
        out
    }
}

fn find_root_of_modulus(
    small: &Arc<FieldSpec>,
    big: &Arc<FieldSpec>,
) -> Result<FieldElement, FieldError> {
    for z in enumerate(big)? {
        // Horner evaluation of the small modulus (F_p coefficients) at z.
        let mut acc = FieldElement::zero(big);
        for &c in small.modulus.iter().rev() {
            acc = acc.mul(&z);
            if c != 0 {
                acc = acc.add(&FieldElement::from_int(big, c));
            }
        }
        if acc.is_zero() {
            return Ok(z);
        }
    }
    // An irreducible polynomial of degree dividing the big degree always
    // splits there, so this is unreachable for valid inputs.
    Err(FieldError::IncompatibleEmbedding)
}

/// Coordinates of the big field as a vector space over an embedded subfield.
///
/// Fixes the basis `{ y^t : t < M }` of big over small (y the big generator,
/// M the relative degree) and converts elements to and from coordinate
/// vectors with entries in the small field. Used to flatten semilinear
/// conditions into linear systems over the small field.
pub struct SubfieldCoords {
    embed: Embedding,
    /// Relative degree M = [big : small].
    rel_degree: usize,
    /// Images eps(u^s) in big, for u the small generator, s < deg(small).
    small_basis_images: Vec<FieldElement>,
    /// Inverse of the F_p change-of-basis matrix, rows/cols indexed by the
    /// flattened basis eps(u^s) * y^t, column index t*deg(small)+s.
    inverse: Vec<Vec<u64>>,
}

impl SubfieldCoords {
    pub fn new(small: &Arc<FieldSpec>, big: &Arc<FieldSpec>) -> Result<Self, FieldError> {
        let embed = Embedding::new(small, big)?;
        Self::from_embedding(embed)
    }

    pub fn from_embedding(embed: Embedding) -> Result<Self, FieldError> {
        let small = Arc::clone(embed.small());
        let big = Arc::clone(embed.big());
        let ds = small.degree();
        let db = big.degree();
        let rel_degree = db / ds;
        let u = FieldElement::generator(&small);
        let mut small_basis_images = Vec::with_capacity(ds);
        let mut acc = FieldElement::one(&small);
        for _ in 0..ds {
            small_basis_images.push(embed.map(&acc));
            acc = acc.mul(&u);
        }
        let y = FieldElement::generator(&big);
        let mut matrix = vec![vec![0u64; db]; db];
        let mut ypow = FieldElement::one(&big);
        for t in 0..rel_degree {
            for (s, img) in small_basis_images.iter().enumerate() {
                let b = ypow.mul(img);
                for (row, m) in matrix.iter_mut().enumerate() {
                    m[t * ds + s] = b.coeffs[row];
                }
            }
            ypow = ypow.mul(&y);
        }
        let inverse =
            fp_matrix_inverse(&matrix, big.p()).ok_or(FieldError::IncompatibleEmbedding)?;
        Ok(SubfieldCoords {
            embed,
            rel_degree,
            small_basis_images,
            inverse,
        })
    }

    pub fn embedding(&self) -> &Embedding {
        &self.embed
    }

    pub fn rel_degree(&self) -> usize {
        self.rel_degree
    }

    /// Coordinates of `z` in the basis `{ y^t }`, as small-field elements.
    pub fn coords(&self, z: &FieldElement) -> Vec<FieldElement> {
        let small = self.embed.small();
        let ds = small.degree();
        let p = small.p();
        let db = self.embed.big().degree();
        let mut flat = vec![0u64; db];
        for (row, f) in flat.iter_mut().enumerate() {
            let mut acc = 0u64;
            for (col, &c) in z.coeffs.iter().enumerate() {
                acc = (acc + self.inverse[row][col] * c) % p;
            }
            *f = acc;
        }
        (0..self.rel_degree)
            .map(|t| {
                FieldElement::new(small, &flat[t * ds..(t + 1) * ds]).expect("coords in range")
            })
            .collect()
    }

    /// Reassembles an element from its coordinates.
    pub fn combine(&self, coords: &[FieldElement]) -> FieldElement {
        assert_eq!(coords.len(), self.rel_degree);
        let big = self.embed.big();
        let y = FieldElement::generator(big);
        let mut out = FieldElement::zero(big);
        let mut ypow = FieldElement::one(big);
        for c in coords {
            let mut term = FieldElement::zero(big);
            for (s, img) in self.small_basis_images.iter().enumerate() {
                if c.coeffs[s] != 0 {
                    term = term.add(&img.scale_int(c.coeffs[s]));
                }
            }
            out = out.add(&term.mul(&ypow));
            ypow = ypow.mul(&y);
        }
        out
    }

    /// If `z` lies in the embedded small field, returns its preimage.
    pub fn descend(&self, z: &FieldElement) -> Option<FieldElement> {
        let coords = self.coords(z);
        if coords[1..].iter().all(|c| c.is_zero()) {
            Some(coords[0].clone())
        } else {
            None
        }
    }
}

// ---------------------------------------------------------------------------
// F_p scalar and polynomial helpers (u64 arithmetic, coefficients < p)
// ---------------------------------------------------------------------------

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn fp_inv(a: u64, p: u64) -> u64 {
    // Extended Euclid on (a, p); a != 0 mod p.
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1);
    (((s0 % p as i128) + p as i128) % p as i128) as u64
}

fn trim(c: &[u64]) -> Vec<u64> {
    let mut v = c.to_vec();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn poly_deg(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

fn fp_poly_rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let fd = poly_deg(f).expect("nonzero modulus");
    let mut r = a.to_vec();
    let lead_inv = fp_inv(f[fd], p);
    while let Some(rd) = poly_deg(&r) {
        if rd < fd {
            break;
        }
        let c = r[rd] * lead_inv % p;
        for i in 0..=fd {
            let sub = c * f[i] % p;
            r[rd - fd + i] = (r[rd - fd + i] + p - sub) % p;
        }
    }
    r.truncate(fd);
    r.resize(fd, 0);
    r
}

fn fp_poly_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    fp_poly_rem(&prod, f, p)
}

fn fp_poly_powmod(base: &[u64], mut exp: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut b = fp_poly_rem(base, f, p);
    let mut acc = fp_poly_rem(&[1], f, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = fp_poly_mulmod(&acc, &b, f, p);
        }
        b = fp_poly_mulmod(&b, &b, f, p);
        exp >>= 1;
    }
    acc
}

fn fp_poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(a);
    let mut b = trim(b);
    while !b.is_empty() {
        let r = {
            let bd = poly_deg(&b).unwrap();
            let mut full = a.clone();
            full.resize(full.len().max(bd + 1), 0);
            // remainder of a by b
            let lead_inv = fp_inv(b[bd], p);
            while let Some(ad) = poly_deg(&full) {
                if ad < bd {
                    break;
                }
                let c = full[ad] * lead_inv % p;
                for i in 0..=bd {
                    let sub = c * b[i] % p;
                    full[ad - bd + i] = (full[ad - bd + i] + p - sub) % p;
                }
            }
            trim(&full)
        };
        a = b;
        b = r;
    }
    a
}

/// Inverse of `a` modulo `f` over F_p, when gcd(a, f) = 1.
fn fp_poly_inverse_mod(a: &[u64], f: &[u64], p: u64) -> Option<Vec<u64>> {
    // Extended Euclid over F_p[x].
    let mut r0 = trim(f);
    let mut r1 = fp_poly_rem(a, f, p);
    r1 = trim(&r1);
    let mut s0: Vec<u64> = vec![];
    let mut s1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        // Divide r0 by r1.
        let bd = poly_deg(&r1).unwrap();
        let lead_inv = fp_inv(r1[bd], p);
        let mut rem = r0.clone();
        let mut quot = vec![0u64; rem.len().saturating_sub(bd) + 1];
        while let Some(ad) = poly_deg(&rem) {
            if ad < bd {
                break;
            }
            let c = rem[ad] * lead_inv % p;
            quot[ad - bd] = c;
            for i in 0..=bd {
                let sub = c * r1[i] % p;
                rem[ad - bd + i] = (rem[ad - bd + i] + p - sub) % p;
            }
        }
        let rem = trim(&rem);
        // s_{k+1} = s0 - quot * s1
        let mut qs = vec![0u64; quot.len() + s1.len()];
        for (i, &qi) in quot.iter().enumerate() {
            if qi == 0 {
                continue;
            }
            for (j, &sj) in s1.iter().enumerate() {
                qs[i + j] = (qs[i + j] + qi * sj) % p;
            }
        }
        let mut snew = vec![0u64; s0.len().max(qs.len())];
        for (i, v) in snew.iter_mut().enumerate() {
            let lhs = *s0.get(i).unwrap_or(&0);
            let rhs = *qs.get(i).unwrap_or(&0);
            *v = (lhs + p - rhs % p) % p;
        }
        r0 = r1;
        r1 = rem;
        s0 = s1;
        s1 = trim(&snew);
    }
    let d = poly_deg(&r0)?;
    if d != 0 {
        return None;
    }
    let scale = fp_inv(r0[0], p);
    Some(fp_poly_rem(
        &s0.iter().map(|&c| c * scale % p).collect::<Vec<_>>(),
        f,
        p,
    ))
}

/// True iff the monic polynomial `f` of degree n is irreducible over F_p:
/// x^(p^n) = x mod f, and gcd(x^(p^(n/l)) - x, f) = 1 for every prime l | n.
fn fp_poly_is_irreducible(f: &[u64], p: u64) -> bool {
    let n = poly_deg(f).expect("nonzero polynomial");
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let x = vec![0, 1];
    // x^(p^k) mod f for k = 0..n by iterated p-th powers.
    let mut frob_iter = Vec::with_capacity(n + 1);
    frob_iter.push(fp_poly_rem(&x, f, p));
    for k in 0..n {
        let next = fp_poly_powmod(&frob_iter[k], p, f, p);
        frob_iter.push(next);
    }
    if trim(&frob_iter[n]) != trim(&fp_poly_rem(&x, f, p)) {
        return false;
    }
    let mut rem = n;
    let mut l = 2;
    let mut prime_divisors = Vec::new();
    while l * l <= rem {
        if rem.is_multiple_of(l) {
            prime_divisors.push(l);
            while rem.is_multiple_of(l) {
                rem /= l;
            }
        }
        l += 1;
    }
    if rem > 1 {
        prime_divisors.push(rem);
    }
    for l in prime_divisors {
        let k = n / l;
        let mut diff = frob_iter[k].clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        let g = fp_poly_gcd(&diff, f, p);
        if poly_deg(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// The monic irreducible polynomial of the given degree over F_p with the
/// lexicographically smallest non-leading coefficients (smallest value of
/// `sum c_i p^i`).
fn smallest_irreducible(p: u64, deg: usize) -> Vec<u64> {
    let total = (p as u128).pow(deg as u32);
    let mut n: u128 = 0;
    while n < total {
        let mut f = vec![0u64; deg + 1];
        let mut v = n;
        for c in f.iter_mut().take(deg) {
            *c = (v % p as u128) as u64;
            v /= p as u128;
        }
        f[deg] = 1;
        if fp_poly_is_irreducible(&f, p) {
            return f;
        }
        n += 1;
    }
    unreachable!("irreducible polynomials exist in every degree");
}

fn frobenius_columns(p: u64, e: u32, modulus: &[u64]) -> Vec<Coeffs> {
    let deg = poly_deg(modulus).unwrap();
    // y = x^(p^e) mod f via e iterated p-th powers.
    let mut y = fp_poly_rem(&[0, 1], modulus, p);
    for _ in 0..e {
        y = fp_poly_powmod(&y, p, modulus, p);
    }
    let mut cols = Vec::with_capacity(deg);
    let mut acc = fp_poly_rem(&[1], modulus, p);
    for _ in 0..deg {
        let mut c = Coeffs::new();
        for i in 0..deg {
            c.push(*acc.get(i).unwrap_or(&0));
        }
        cols.push(c);
        acc = fp_poly_mulmod(&acc, &y, modulus, p);
    }
    cols
}

/// Inverse of a square matrix over F_p, entries as u64 mod p.
fn fp_matrix_inverse(m: &[Vec<u64>], p: u64) -> Option<Vec<Vec<u64>>> {
    let n = m.len();
    let mut a: Vec<Vec<u64>> = m.to_vec();
    let mut inv: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r][col] != 0)?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let s = fp_inv(a[col][col], p);
        for j in 0..n {
            a[col][j] = a[col][j] * s % p;
            inv[col][j] = inv[col][j] * s % p;
        }
        for r in 0..n {
            if r != col && a[r][col] != 0 {
                let c = a[r][col];
                for j in 0..n {
                    let s1 = c * a[col][j] % p;
                    a[r][j] = (a[r][j] + p - s1) % p;
                    let s2 = c * inv[col][j] % p;
                    inv[r][j] = (inv[r][j] + p - s2) % p;
                }
            }
        }
    }
    Some(inv)
}
