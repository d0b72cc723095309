//! Central simple algebras over the function field, tracked by their local
//! invariants: reduced fractions in [0, 1) indexed by places, with integral
//! total sum (reciprocity). Places are symbolic labels with degrees; a
//! separate validation pass checks a configuration's place multiset against
//! the counts supplied by the zeta data.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::rational::Rational;

/// A place of the function field: a symbolic label plus its degree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PlaceRef {
    pub id: String,
    pub degree: u32,
}

impl PlaceRef {
    pub fn new(id: impl Into<String>, degree: u32) -> Self {
        PlaceRef {
            id: id.into(),
            degree,
        }
    }
}

impl fmt::Display for PlaceRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (deg {})", self.id, self.degree)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    /// An invariant whose reduced denominator does not divide d.
    BadDenominator {
        place: String,
    },
    /// The invariant sum is not an integer.
    ReciprocityFailed,
    /// A stated precondition on the input algebra fails.
    Precondition(String),
    ZeroDegreePlace(String),
    /// gcd(r, s) != 1 in a simple-module invariant.
    NotCoprime {
        r: i64,
        s: i64,
    },
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::BadDenominator { place } => {
                write!(f, "invariant at {} has denominator not dividing d", place)
            }
            AlgebraError::ReciprocityFailed => {
                write!(f, "local invariants do not sum to an integer")
            }
            AlgebraError::Precondition(msg) => write!(f, "precondition violated: {}", msg),
            AlgebraError::ZeroDegreePlace(id) => write!(f, "place {} has degree 0", id),
            AlgebraError::NotCoprime { r, s } => write!(f, "gcd({}, {}) != 1", r, s),
        }
    }
}

impl std::error::Error for AlgebraError {}

/// A central simple algebra of dimension d^2, by its local invariants.
/// Absent places carry invariant 0; stored invariants are canonical
/// representatives in [0, 1) with denominator dividing d, and the total sum
/// is an integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraSpec {
    d: u32,
    invariants: BTreeMap<PlaceRef, Rational>,
}

impl AlgebraSpec {
    pub fn new(d: u32, invariants: Vec<(PlaceRef, Rational)>) -> Result<Self, AlgebraError> {
        if d == 0 {
            return Err(AlgebraError::Precondition("d must be at least 1".into()));
        }
        let mut map = BTreeMap::new();
        for (place, inv) in invariants {
            if place.degree == 0 {
                return Err(AlgebraError::ZeroDegreePlace(place.id));
            }
            let inv = inv.mod_one();
            if inv.is_zero() {
                continue;
            }
            if !(BigInt::from(d) % inv.denom()).is_zero() {
                return Err(AlgebraError::BadDenominator { place: place.id });
            }
            map.insert(place, inv);
        }
        let spec = AlgebraSpec { d, invariants: map };
        if !spec.invariant_sum().is_integer() {
            return Err(AlgebraError::ReciprocityFailed);
        }
        Ok(spec)
    }

    /// The split algebra M_d(F).
    pub fn split(d: u32) -> Self {
        AlgebraSpec {
            d,
            invariants: BTreeMap::new(),
        }
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// inv_x, canonical representative in [0, 1).
    pub fn invariant(&self, place: &PlaceRef) -> Rational {
        self.invariants
            .get(place)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Places with nonzero invariant.
    pub fn ramified(&self) -> impl Iterator<Item = (&PlaceRef, &Rational)> {
        self.invariants.iter()
    }

    pub fn invariant_sum(&self) -> Rational {
        self.invariants
            .values()
            .fold(Rational::zero(), |acc, v| acc + v.clone())
    }

    /// Local index data at a place: e_x = denominator of inv_x, and
    /// kappa_x = d / e_x, so that D_x is kappa_x x kappa_x matrices over a
    /// division algebra of index e_x.
    pub fn local_index(&self, place: &PlaceRef) -> Result<(u32, u32), AlgebraError> {
        let inv = self.invariant(place);
        let e: u32 = inv
            .denom()
            .try_into()
            .map_err(|_| AlgebraError::BadDenominator {
                place: place.id.clone(),
            })?;
        if !self.d.is_multiple_of(e) {
            return Err(AlgebraError::BadDenominator {
                place: place.id.clone(),
            });
        }
        Ok((e, self.d / e))
    }

    pub fn to_repr(&self) -> AlgebraSpecRepr {
        AlgebraSpecRepr {
            d: self.d,
            invariants: self
                .invariants
                .iter()
                .map(|(p, v)| InvariantRepr {
                    place: p.id.clone(),
                    degree: p.degree,
                    num: v.numer().to_string(),
                    den: v.denom().to_string(),
                })
                .collect(),
        }
    }
}

/// Serialized algebra spec: `{d, invariants: [{place, degree, num, den}]}`.
#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpecRepr {
    pub d: u32,
    pub invariants: Vec<InvariantRepr>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct InvariantRepr {
    pub place: String,
    pub degree: u32,
    pub num: String,
    pub den: String,
}

impl AlgebraSpecRepr {
    pub fn build(&self) -> Result<AlgebraSpec, AlgebraError> {
        let mut invariants = Vec::new();
        for inv in &self.invariants {
            let num: BigInt = inv.num.parse().map_err(|_| {
                AlgebraError::Precondition(format!("bad numerator for {}", inv.place))
            })?;
            let den: BigInt = inv.den.parse().map_err(|_| {
                AlgebraError::Precondition(format!("bad denominator for {}", inv.place))
            })?;
            let r = Rational::new(num, den).ok_or_else(|| {
                AlgebraError::Precondition(format!("zero denominator for {}", inv.place))
            })?;
            invariants.push((PlaceRef::new(inv.place.clone(), inv.degree), r));
        }
        AlgebraSpec::new(self.d, invariants)
    }
}

impl Serialize for AlgebraSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_repr().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AlgebraSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = AlgebraSpecRepr::deserialize(deserializer)?;
        repr.build().map_err(serde::de::Error::custom)
    }
}

fn fraction(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den)).unwrap()
}

/// The endomorphism-side algebra in the ramified-at-o setting: invariants
/// 1/d at infinity, 0 at o, and inv_x(D) elsewhere. Requires inv_inf(D) = 0
/// and inv_o(D) = 1/d.
pub fn bar_algebra_exceptional(
    algebra: &AlgebraSpec,
    o: &PlaceRef,
    inf: &PlaceRef,
) -> Result<AlgebraSpec, AlgebraError> {
    let d = algebra.d() as i64;
    if !algebra.invariant(inf).is_zero() {
        return Err(AlgebraError::Precondition(
            "the algebra must be split at infinity".into(),
        ));
    }
    let expected_o = if d == 1 {
        Rational::zero()
    } else {
        fraction(1, d)
    };
    if algebra.invariant(o) != expected_o {
        return Err(AlgebraError::Precondition(format!(
            "the algebra must have invariant 1/{} at o",
            d
        )));
    }
    let mut invariants: Vec<(PlaceRef, Rational)> = algebra
        .ramified()
        .filter(|(p, _)| *p != o && *p != inf)
        .map(|(p, v)| (p.clone(), v.clone()))
        .collect();
    if d > 1 {
        invariants.push((inf.clone(), fraction(1, d)));
    }
    AlgebraSpec::new(algebra.d(), invariants)
}

/// The endomorphism-side algebra in the split-at-o setting: invariants 1/d
/// at infinity, -1/d at o (stored as (d-1)/d), and inv_x(D) elsewhere.
/// Requires inv_o(D) = 0.
pub fn bar_algebra_supersingular(
    algebra: &AlgebraSpec,
    o: &PlaceRef,
    inf: &PlaceRef,
) -> Result<AlgebraSpec, AlgebraError> {
    let d = algebra.d() as i64;
    if !algebra.invariant(o).is_zero() {
        return Err(AlgebraError::Precondition(
            "the algebra must be split at o".into(),
        ));
    }
    if !algebra.invariant(inf).is_zero() {
        return Err(AlgebraError::Precondition(
            "the algebra must be split at infinity".into(),
        ));
    }
    let mut invariants: Vec<(PlaceRef, Rational)> = algebra
        .ramified()
        .filter(|(p, _)| *p != o && *p != inf)
        .map(|(p, v)| (p.clone(), v.clone()))
        .collect();
    if d > 1 {
        invariants.push((inf.clone(), fraction(1, d)));
        invariants.push((o.clone(), fraction(-1, d).mod_one()));
    }
    AlgebraSpec::new(algebra.d(), invariants)
}

/// Pointwise sum of invariants mod 1: the invariants of the centralizer of
/// the algebra inside an ambient algebra with the given invariant map.
pub fn end_algebra_invariants(
    ambient: &[(PlaceRef, Rational)],
    algebra: &AlgebraSpec,
) -> Result<AlgebraSpec, AlgebraError> {
    let mut map: BTreeMap<PlaceRef, Rational> = BTreeMap::new();
    for (p, v) in ambient {
        let entry = map.entry(p.clone()).or_insert_with(Rational::zero);
        *entry = (entry.clone() + v.clone()).mod_one();
    }
    for (p, v) in algebra.ramified() {
        let entry = map.entry(p.clone()).or_insert_with(Rational::zero);
        *entry = (entry.clone() + v.clone()).mod_one();
    }
    AlgebraSpec::new(algebra.d(), map.into_iter().collect())
}

/// The ambient invariant map at the heart of the exceptional computation:
/// -1/d at o and 1/d at infinity, zero elsewhere.
pub fn standard_ambient_invariants(
    d: u32,
    o: &PlaceRef,
    inf: &PlaceRef,
) -> Vec<(PlaceRef, Rational)> {
    if d == 1 {
        return vec![];
    }
    vec![
        (o.clone(), fraction(-1, d as i64).mod_one()),
        (inf.clone(), fraction(1, d as i64)),
    ]
}

/// Invariant of the simple module with parameters (r, s): the class of
/// -s/r in [0, 1). Requires gcd(r, s) = 1.
pub fn simple_module_invariant(r: i64, s: i64) -> Result<Rational, AlgebraError> {
    if r < 1 || r.gcd(&s) != 1 {
        return Err(AlgebraError::NotCoprime { r, s });
    }
    Ok(fraction(-s, r).mod_one())
}
