//! Zeta data of a curve: the numerator P(T), class number, special values
//! at negative integers, and place counts by degree.
//!
//! From the point counts N_1..N_{2g} the numerator is recovered through the
//! exponential identity exp(sum N_m T^m / m) = P(T) / ((1-T)(1-qT)),
//! computed with exact rationals and validated for integrality and the
//! functional equation p_{2g-j} = q^{g-j} p_j. Counts beyond m = 2g are
//! recovered by exact integer power-sum recurrences on the coefficients of
//! P; no floating point appears anywhere.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::curve::{CurveError, CurveModel};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZetaError {
    WrongCountLength {
        expected: usize,
        got: usize,
    },
    /// A coefficient of P(T) came out non-integral: the counts are not the
    /// counts of a curve.
    NonIntegralCoefficient(usize),
    /// p_{2g-j} = q^{g-j} p_j failed: inconsistent counts or a wrong model
    /// (e.g. a bad infinity rule).
    FunctionalEquationFailed {
        index: usize,
    },
    NonIntegralPlaceCount {
        degree: u32,
    },
    Curve(String),
}

impl fmt::Display for ZetaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZetaError::WrongCountLength { expected, got } => {
                write!(f, "expected {} point counts, got {}", expected, got)
            }
            ZetaError::NonIntegralCoefficient(i) => {
                write!(
                    f,
                    "numerator coefficient p_{} is not an integer; counts are inconsistent",
                    i
                )
            }
            ZetaError::FunctionalEquationFailed { index } => {
                write!(
                    f,
                    "functional equation fails at coefficient {}; counts are inconsistent",
                    index
                )
            }
            ZetaError::NonIntegralPlaceCount { degree } => {
                write!(f, "place count in degree {} is not an integer", degree)
            }
            ZetaError::Curve(msg) => write!(f, "{}", msg),
        }
    }
}

impl std::error::Error for ZetaError {}

impl From<CurveError> for ZetaError {
    fn from(e: CurveError) -> Self {
        ZetaError::Curve(e.to_string())
    }
}

/// The zeta data of a curve over F_q: counts, numerator, class number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaData {
    q: u64,
    genus: usize,
    /// N_1..N_{2g}.
    counts: Vec<u64>,
    /// p_0..p_{2g}, p_0 = 1.
    numerator: Vec<BigInt>,
    class_number: BigInt,
}

impl ZetaData {
    /// Builds zeta data from exactly 2g point counts. Validates integrality
    /// of the numerator and the functional equation.
    pub fn from_counts(q: u64, genus: usize, counts: &[u64]) -> Result<Self, ZetaError> {
        if counts.len() != 2 * genus {
            return Err(ZetaError::WrongCountLength {
                expected: 2 * genus,
                got: counts.len(),
            });
        }
        let numerator = numerator_from_counts(q, genus, counts)?;
        check_functional_equation(q, genus, &numerator)?;
        let class_number: BigInt = numerator.iter().sum();
        assert!(
            class_number.is_positive(),
            "class number P(1) must be positive"
        );
        Ok(ZetaData {
            q,
            genus,
            counts: counts.to_vec(),
            numerator,
            class_number,
        })
    }

    /// Counts points on the model and assembles its zeta data.
    pub fn from_curve(curve: &CurveModel) -> Result<Self, ZetaError> {
        let q128 = curve.base().size();
        assert!(q128 <= u64::MAX as u128);
        let g = curve.genus();
        let mut counts = Vec::with_capacity(2 * g);
        for m in 1..=2 * g as u32 {
            counts.push(curve.count_points(m)?);
        }
        Self::from_counts(q128 as u64, g, &counts)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Coefficients p_0..p_{2g} of the numerator P(T).
    pub fn numerator(&self) -> &[BigInt] {
        &self.numerator
    }

    /// h = P(1).
    pub fn class_number(&self) -> &BigInt {
        &self.class_number
    }

    /// zeta_X(-i) = P(q^i) / ((1 - q^i)(1 - q^(1+i))) as an exact rational.
    pub fn special_value(&self, i: u32) -> Rational {
        assert!(i >= 1, "special values are taken at negative integers");
        let q = BigInt::from(self.q);
        let qi = q.pow(i);
        let qi1 = q.pow(i + 1);
        let mut num = BigInt::zero();
        let mut pow = BigInt::one();
        for c in &self.numerator {
            num += c * &pow;
            pow *= &qi;
        }
        let den = (BigInt::one() - qi) * (BigInt::one() - qi1);
        let val = Rational::new(num, den).expect("nonzero denominator");
        assert!(val.is_positive(), "zeta special values are positive");
        val
    }

    /// N_m for any m >= 1, using the exact power-sum recurrence on the
    /// reciprocal roots of P beyond the stored range.
    pub fn count_extended(&self, m: u32) -> BigInt {
        let m = m as usize;
        if m == 0 {
            return BigInt::zero();
        }
        if m <= self.counts.len() {
            return BigInt::from(self.counts[m - 1]);
        }
        let s = power_sums(&self.numerator, m);
        BigInt::from(self.q).pow(m as u32) + 1 - &s[m]
    }

    /// Number of closed points of degree exactly r, by Moebius inversion of
    /// N_r = sum over m | r of m * (#places of degree m).
    pub fn places_of_degree(&self, r: u32) -> Result<BigInt, ZetaError> {
        let mut total = BigInt::zero();
        for d in 1..=r {
            if r.is_multiple_of(d) {
                total += BigInt::from(moebius(r / d)) * self.count_extended(d);
            }
        }
        let (quot, rem) = num_integer::Integer::div_rem(&total, &BigInt::from(r));
        if !rem.is_zero() || quot.is_negative() {
            return Err(ZetaError::NonIntegralPlaceCount { degree: r });
        }
        Ok(quot)
    }

    /// Power series coefficients of Z(T) = exp(sum N_m T^m / m) through the
    /// given degree, as exact rationals.
    pub fn zeta_series(&self, upto: usize) -> Vec<Rational> {
        let counts: Vec<BigInt> = (1..=upto as u32).map(|m| self.count_extended(m)).collect();
        zeta_series_from_counts(&counts, upto)
    }

    /// Truncated Euler product over places of degree <= B, as a power series
    /// through degree B. Agrees with `zeta_series` for every valid curve.
    pub fn euler_product_series(&self, bound: u32) -> Result<Vec<Rational>, ZetaError> {
        let upto = bound as usize;
        let mut series = vec![Rational::zero(); upto + 1];
        series[0] = Rational::one();
        for deg in 1..=bound {
            let places = self.places_of_degree(deg)?;
            // Multiply by (1 - T^deg)^(-a) = (sum_k T^(k*deg))^a, done one
            // factor at a time.
            let mut remaining = places.clone();
            while remaining.is_positive() {
                let mut next = vec![Rational::zero(); upto + 1];
                for (n, coeff) in series.iter().enumerate() {
                    if coeff.is_zero() {
                        continue;
                    }
                    let mut k = 0;
                    while n + k * deg as usize <= upto {
                        next[n + k * deg as usize] = &next[n + k * deg as usize] + coeff;
                        k += 1;
                    }
                }
                series = next;
                remaining -= 1;
            }
        }
        Ok(series)
    }

    pub fn report(&self, specials_upto: u32) -> ZetaReport {
        let specials = (1..=specials_upto)
            .map(|i| (i, self.special_value(i)))
            .collect();
        ZetaReport {
            q: self.q,
            genus: self.genus,
            counts: self.counts.clone(),
            numerator: self.numerator.iter().map(|c| c.to_string()).collect(),
            class_number: self.class_number.to_string(),
            specials,
        }
    }
}

/// JSON-facing zeta report; big integers as decimal strings.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct ZetaReport {
    pub q: u64,
    pub genus: usize,
    pub counts: Vec<u64>,
    pub numerator: Vec<String>,
    pub class_number: String,
    pub specials: BTreeMap<u32, Rational>,
}

/// Z(T) coefficients from N_1..N_upto via n z_n = sum_{m<=n} N_m z_{n-m}.
fn zeta_series_from_counts(counts: &[BigInt], upto: usize) -> Vec<Rational> {
    let mut z = vec![Rational::zero(); upto + 1];
    z[0] = Rational::one();
    for n in 1..=upto {
        let mut acc = Rational::zero();
        for m in 1..=n {
            let term = Rational::from_int(counts[m - 1].clone()) * z[n - m].clone();
            acc = acc + term;
        }
        z[n] = acc / Rational::from_int(n as i64);
    }
    z
}

/// P(T) = Z(T) (1-T)(1-qT) truncated at degree 2g, with integrality checks.
fn numerator_from_counts(q: u64, genus: usize, counts: &[u64]) -> Result<Vec<BigInt>, ZetaError> {
    let deg = 2 * genus;
    let big_counts: Vec<BigInt> = counts.iter().map(|&n| BigInt::from(n)).collect();
    let z = zeta_series_from_counts(&big_counts, deg);
    let qr = Rational::from_int(q as i64);
    let one_plus_q = Rational::from_int(1 + q as i64);
    let mut numerator = Vec::with_capacity(deg + 1);
    for n in 0..=deg {
        let mut c = z[n].clone();
        if n >= 1 {
            c = c - (one_plus_q.clone() * z[n - 1].clone());
        }
        if n >= 2 {
            c = c + (qr.clone() * z[n - 2].clone());
        }
        let int = c.to_integer().ok_or(ZetaError::NonIntegralCoefficient(n))?;
        numerator.push(int);
    }
    debug_assert!(numerator[0].is_one());
    Ok(numerator)
}

fn check_functional_equation(q: u64, genus: usize, numerator: &[BigInt]) -> Result<(), ZetaError> {
    let q = BigInt::from(q);
    for j in 0..=genus {
        // p_{2g-j} = q^{g-j} p_j
        let lhs = &numerator[2 * genus - j];
        let rhs = q.pow((genus - j) as u32) * &numerator[j];
        if *lhs != rhs {
            return Err(ZetaError::FunctionalEquationFailed { index: j });
        }
    }
    Ok(())
}

/// Power sums S_0..S_n of the reciprocal roots of P(T) = prod (1 - a_j T),
/// by Newton's identities on the coefficients (S_0 = deg P by convention).
fn power_sums(numerator: &[BigInt], n: usize) -> Vec<BigInt> {
    let deg = numerator.len() - 1;
    let mut s = Vec::with_capacity(n + 1);
    s.push(BigInt::from(deg as i64));
    for k in 1..=n {
        let mut acc = BigInt::zero();
        if k <= deg {
            acc += BigInt::from(k as i64) * &numerator[k];
        }
        for i in 1..=k.min(deg) {
            if k - i >= 1 {
                acc += &numerator[i] * &s[k - i];
            }
        }
        s.push(-acc);
    }
    s
}

fn moebius(mut n: u32) -> i64 {
    let mut mu = 1i64;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}
