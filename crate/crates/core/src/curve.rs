//! Curve models over F_q and exhaustive point counting over extensions.
//!
//! Three models are supported: the projective line, Weierstrass elliptic
//! curves, and hyperelliptic curves `y^2 + h(x) y = f(x)` with an explicit
//! rule for the points at infinity. These are the sources of the
//! `(q, g, h, zeta)` data consumed downstream; no general curve machinery.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::field::{
    element_from_coeffs, enumerate, make_field, Embedding, FieldElement, FieldError, FieldSpec,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveError {
    Field(FieldError),
    SingularModel(String),
    GenusMismatch { stated: usize, expected: usize },
    BadCoefficient(String),
}

impl fmt::Display for CurveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveError::Field(e) => write!(f, "{}", e),
            CurveError::SingularModel(msg) => write!(f, "singular model: {}", msg),
            CurveError::GenusMismatch { stated, expected } => {
                write!(
                    f,
                    "stated genus {} but the model has genus {}",
                    stated, expected
                )
            }
            CurveError::BadCoefficient(msg) => write!(f, "bad coefficient: {}", msg),
        }
    }
}

impl std::error::Error for CurveError {}

impl From<FieldError> for CurveError {
    fn from(e: FieldError) -> Self {
        CurveError::Field(e)
    }
}

/// Behaviour of a hyperelliptic model at infinity. For odd-degree `f` there
/// is always one rational point at infinity. For even degree the model
/// carries a user-selected rule, cross-validated downstream by the
/// functional equation of the zeta numerator:
///
/// * `One`: a single rational point in every extension;
/// * `Split`: two rational points in every extension;
/// * `Inert`: a conjugate pair, rational exactly over even-degree extensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfinityRule {
    One,
    Split,
    Inert,
}

impl InfinityRule {
    /// Number of points at infinity over F_{q^m}.
    pub fn count(&self, m: u32) -> u64 {
        match self {
            InfinityRule::One => 1,
            InfinityRule::Split => 2,
            InfinityRule::Inert => {
                if m.is_multiple_of(2) {
                    2
                } else {
                    0
                }
            }
        }
    }

    pub fn from_count(n: u64) -> Option<Self> {
        match n {
            0 => Some(InfinityRule::Inert),
            1 => Some(InfinityRule::One),
            2 => Some(InfinityRule::Split),
            _ => None,
        }
    }
}

#[derive(Clone)]
#[allow(clippy::large_enum_variant)]
pub enum CurveKind {
    ProjectiveLine,
    /// y^2 + a1 x y + a3 y = x^3 + a2 x^2 + a4 x + a6, nonzero discriminant.
    EllipticWeierstrass {
        a1: FieldElement,
        a2: FieldElement,
        a3: FieldElement,
        a4: FieldElement,
        a6: FieldElement,
    },
    /// y^2 + h(x) y = f(x); coefficients low degree first.
    Hyperelliptic {
        f: Vec<FieldElement>,
        h: Vec<FieldElement>,
        infinity: InfinityRule,
    },
}

/// A curve model over its base field F_q.
#[derive(Clone)]
pub struct CurveModel {
    base: Arc<FieldSpec>,
    kind: CurveKind,
    genus: usize,
}

impl CurveModel {
    pub fn projective_line(base: &Arc<FieldSpec>) -> Self {
        CurveModel {
            base: Arc::clone(base),
            kind: CurveKind::ProjectiveLine,
            genus: 0,
        }
    }

    pub fn elliptic(base: &Arc<FieldSpec>, a: [FieldElement; 5]) -> Result<Self, CurveError> {
        let [a1, a2, a3, a4, a6] = a;
        let disc = weierstrass_discriminant(base, &a1, &a2, &a3, &a4, &a6);
        if disc.is_zero() {
            return Err(CurveError::SingularModel(
                "Weierstrass discriminant is zero".into(),
            ));
        }
        Ok(CurveModel {
            base: Arc::clone(base),
            kind: CurveKind::EllipticWeierstrass { a1, a2, a3, a4, a6 },
            genus: 1,
        })
    }

    /// Hyperelliptic `y^2 + h(x) y = f(x)` of the stated genus. The genus
    /// must satisfy g = floor((deg f - 1)/2) under the smoothness
    /// convention; for odd deg f the infinity rule is forced to `One`.
    pub fn hyperelliptic(
        base: &Arc<FieldSpec>,
        f: Vec<FieldElement>,
        h: Vec<FieldElement>,
        genus: usize,
        infinity: InfinityRule,
    ) -> Result<Self, CurveError> {
        let deg_f = f
            .iter()
            .rposition(|c| !c.is_zero())
            .ok_or_else(|| CurveError::BadCoefficient("f(x) must be nonzero".into()))?;
        let expected = (deg_f.saturating_sub(1)) / 2;
        if genus != expected {
            return Err(CurveError::GenusMismatch {
                stated: genus,
                expected,
            });
        }
        let infinity = if deg_f % 2 == 1 {
            InfinityRule::One
        } else {
            infinity
        };
        Ok(CurveModel {
            base: Arc::clone(base),
            kind: CurveKind::Hyperelliptic { f, h, infinity },
            genus,
        })
    }

    pub fn base(&self) -> &Arc<FieldSpec> {
        &self.base
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// N_m = #X(F_{q^m}), by exhaustive evaluation over the extension field
    /// plus the model's points at infinity.
    pub fn count_points(&self, m: u32) -> Result<u64, CurveError> {
        let base = &self.base;
        let ext = make_field(base.p(), base.e(), base.m() * m)?;
        let size = ext.size();
        if size > crate::field::ENUMERATION_CAP {
            return Err(CurveError::Field(FieldError::EnumerationCapExceeded(size)));
        }
        match &self.kind {
            CurveKind::ProjectiveLine => Ok(size as u64 + 1),
            CurveKind::EllipticWeierstrass { a1, a2, a3, a4, a6 } => {
                let embed = Embedding::new(base, &ext)?;
                let (a1, a2, a3, a4, a6) = (
                    embed.map(a1),
                    embed.map(a2),
                    embed.map(a3),
                    embed.map(a4),
                    embed.map(a6),
                );
                let mut count = 1u64; // the point at infinity
                for x in enumerate(&ext)? {
                    let x2 = x.mul(&x);
                    let rhs = x2.mul(&x).add(&a2.mul(&x2)).add(&a4.mul(&x)).add(&a6);
                    let ycoef = a1.mul(&x).add(&a3);
                    for y in enumerate(&ext)? {
                        let lhs = y.mul(&y).add(&ycoef.mul(&y));
                        if lhs == rhs {
                            count += 1;
                        }
                    }
                }
                Ok(count)
            }
            CurveKind::Hyperelliptic { f, h, infinity } => {
                let embed = Embedding::new(base, &ext)?;
                let f: Vec<_> = f.iter().map(|c| embed.map(c)).collect();
                let h: Vec<_> = h.iter().map(|c| embed.map(c)).collect();
                let mut count = infinity.count(m);
                for x in enumerate(&ext)? {
                    let fx = horner(&f, &x, &ext);
                    let hx = horner(&h, &x, &ext);
                    for y in enumerate(&ext)? {
                        if y.mul(&y).add(&hx.mul(&y)) == fx {
                            count += 1;
                        }
                    }
                }
                Ok(count)
            }
        }
    }
}

fn horner(coeffs: &[FieldElement], x: &FieldElement, spec: &Arc<FieldSpec>) -> FieldElement {
    let mut acc = FieldElement::zero(spec);
    for c in coeffs.iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

/// Discriminant of a general Weierstrass equation; the integer formulas are
/// valid in every characteristic.
fn weierstrass_discriminant(
    spec: &Arc<FieldSpec>,
    a1: &FieldElement,
    a2: &FieldElement,
    a3: &FieldElement,
    a4: &FieldElement,
    a6: &FieldElement,
) -> FieldElement {
    let int = |n: u64| FieldElement::from_int(spec, n);
    let b2 = a1.mul(a1).add(&int(4).mul(a2));
    let b4 = int(2).mul(a4).add(&a1.mul(a3));
    let b6 = a3.mul(a3).add(&int(4).mul(a6));
    let b8 = a1
        .mul(a1)
        .mul(a6)
        .add(&int(4).mul(a2).mul(a6))
        .sub(&a1.mul(a3).mul(a4))
        .add(&a2.mul(a3).mul(a3))
        .sub(&a4.mul(a4));
    // delta = -b2^2 b8 - 8 b4^3 - 27 b6^2 + 9 b2 b4 b6
    b2.mul(&b2)
        .mul(&b8)
        .neg()
        .sub(&int(8).mul(&b4).mul(&b4).mul(&b4))
        .sub(&int(27).mul(&b6).mul(&b6))
        .add(&int(9).mul(&b2).mul(&b4).mul(&b6))
}

// ---------------------------------------------------------------------------
// Serialized curve descriptions (CLI input format)
// ---------------------------------------------------------------------------

/// JSON description of a curve: base field as (p, e), model coefficients as
/// F_q elements given by F_p coefficient lists, genus as stated.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct CurveRepr {
    pub q: BaseFieldRepr,
    #[serde(flatten)]
    pub model: CurveModelRepr,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct BaseFieldRepr {
    pub p: u64,
    pub e: u32,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum CurveModelRepr {
    ProjectiveLine,
    Elliptic {
        /// [a1, a2, a3, a4, a6], each an F_p coefficient list.
        a: [Vec<u64>; 5],
    },
    Hyperelliptic {
        f: Vec<Vec<u64>>,
        h: Vec<Vec<u64>>,
        genus: usize,
        /// 0, 1 or 2 points at infinity; ignored (forced to 1) when deg f is odd.
        points_at_infinity: u64,
    },
}

impl CurveRepr {
    pub fn build(&self) -> Result<CurveModel, CurveError> {
        let base = make_field(self.q.p, self.q.e, 1)?;
        match &self.model {
            CurveModelRepr::ProjectiveLine => Ok(CurveModel::projective_line(&base)),
            CurveModelRepr::Elliptic { a } => {
                let parse = |c: &Vec<u64>| element_from_coeffs(&base, c).map_err(CurveError::from);
                CurveModel::elliptic(
                    &base,
                    [
                        parse(&a[0])?,
                        parse(&a[1])?,
                        parse(&a[2])?,
                        parse(&a[3])?,
                        parse(&a[4])?,
                    ],
                )
            }
            CurveModelRepr::Hyperelliptic {
                f,
                h,
                genus,
                points_at_infinity,
            } => {
                let parse = |cs: &Vec<Vec<u64>>| -> Result<Vec<FieldElement>, CurveError> {
                    cs.iter()
                        .map(|c| element_from_coeffs(&base, c).map_err(CurveError::from))
                        .collect()
                };
                let rule = InfinityRule::from_count(*points_at_infinity).ok_or_else(|| {
                    CurveError::BadCoefficient("points_at_infinity must be 0, 1 or 2".into())
                })?;
                CurveModel::hyperelliptic(&base, parse(f)?, parse(h)?, *genus, rule)
            }
        }
    }
}
