//! Value types shared across the evaluators.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{domain, Result};

/// Exact rational number, always kept in lowest terms with a positive denominator.
pub type ExactRational = BigRational;

/// A coefficient or value that is either exact or floating point.
#[derive(Clone, Debug, PartialEq)]
pub enum Number {
    Exact(ExactRational),
    Real(f64),
}

impl Number {
    pub fn is_exact(&self) -> bool {
        matches!(self, Number::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&ExactRational> {
        match self {
            Number::Exact(q) => Some(q),
            Number::Real(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Exact(q) => rational_to_f64(q),
            Number::Real(v) => *v,
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Exact(q) => write!(f, "{q}"),
            Number::Real(v) => write!(f, "{v}"),
        }
    }
}

/// Converts a rational to the nearest double without overflowing on huge
/// numerators and denominators.
pub fn rational_to_f64(q: &ExactRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Shift both parts down to 64 significant bits before dividing.
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let ns = (nb - 64).max(0);
    let ds = (db - 64).max(0);
    let n = (q.numer() >> ns as usize).to_f64().unwrap_or(0.0);
    let d = (q.denom() >> ds as usize).to_f64().unwrap_or(1.0);
    (n / d) * 2f64.powi((ns - ds) as i32)
}

/// Exact rational for a finite double (every finite double is a dyadic rational).
pub fn rational_from_f64(x: f64) -> Result<ExactRational> {
    BigRational::from_float(x).ok_or_else(|| crate::Error::Domain(format!("{x} is not finite")))
}

pub(crate) fn rint(n: i64) -> ExactRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Bessel orders attached to the factors of a product.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderSpec(pub Vec<f64>);

impl OrderSpec {
    pub fn new(orders: Vec<f64>) -> Self {
        OrderSpec(orders)
    }

    pub fn zeros(n: usize) -> Self {
        OrderSpec(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().copied()
    }

    /// The orders as nonnegative integers, if every one of them is.
    pub fn as_nonneg_integers(&self) -> Option<Vec<u32>> {
        self.0.iter().map(|&nu| as_nonneg_int(nu)).collect()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

pub(crate) fn as_nonneg_int(nu: f64) -> Option<u32> {
    if nu >= 0.0 && nu.fract() == 0.0 && nu <= u32::MAX as f64 {
        Some(nu as u32)
    } else {
        None
    }
}

/// A single scale `a` of a factor `J_ν(a x)`.
///
/// The expansion coefficients depend only on `a²`, so the square is kept
/// separately and exactly whenever possible (`a = √2` has the exact square 2).
#[derive(Clone, Debug, PartialEq)]
pub struct Scale {
    value: f64,
    squared: Number,
}

impl Scale {
    /// An exact rational scale.
    pub fn exact(a: ExactRational) -> Result<Self> {
        if a.is_zero() {
            return domain("scales must be nonzero");
        }
        let value = rational_to_f64(&a);
        Ok(Scale {
            value,
            squared: Number::Exact(&a * &a),
        })
    }

    /// A positive scale given through its exact square.
    pub fn from_square(a2: ExactRational) -> Result<Self> {
        if !a2.is_positive() {
            return domain("squared scale must be positive");
        }
        Ok(Scale {
            value: rational_to_f64(&a2).sqrt(),
            squared: Number::Exact(a2),
        })
    }

    /// A floating-point scale; its square is carried as a float.
    pub fn real(a: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return domain("scales must be finite and nonzero");
        }
        Ok(Scale {
            value: a,
            squared: Number::Real(a * a),
        })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn squared(&self) -> &Number {
        &self.squared
    }
}

/// Scales attached to the factors of a product, one per factor.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleSpec(pub Vec<Scale>);

impl ScaleSpec {
    pub fn new(scales: Vec<Scale>) -> Self {
        ScaleSpec(scales)
    }

    /// Convenience constructor from integer scales, all exact.
    pub fn from_ints(scales: &[i64]) -> Result<Self> {
        scales
            .iter()
            .map(|&a| Scale::exact(rint(a)))
            .collect::<Result<Vec<_>>>()
            .map(ScaleSpec)
    }

    /// Convenience constructor from floats. Each float is read as the exact
    /// dyadic rational it represents.
    pub fn from_f64(scales: &[f64]) -> Result<Self> {
        scales
            .iter()
            .map(|&a| rational_from_f64(a).and_then(Scale::exact))
            .collect::<Result<Vec<_>>>()
            .map(ScaleSpec)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Scale> {
        self.0.iter()
    }

    /// Squared scales, exact if every one of them is.
    pub fn exact_squares(&self) -> Option<Vec<ExactRational>> {
        self.0.iter().map(|s| s.squared.as_exact().cloned()).collect()
    }

    pub fn real_squares(&self) -> Vec<f64> {
        self.0.iter().map(|s| s.squared.to_f64()).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.0.iter().map(|s| s.value).collect()
    }
}

/// Outcome of a truncated series or iterative evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalReport {
    pub value: f64,
    pub terms_used: usize,
    /// Magnitude of the last retained term, used as the tail estimate.
    pub last_term: f64,
    pub converged: bool,
}

/// How an l-polynomial value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    ClosedForm,
    Recursion,
    FractionalSeries,
}

/// Index of an l-polynomial value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LIndex {
    Integer(u32),
    Real(f64),
}

/// Value of an l-polynomial together with how it was computed.
#[derive(Clone, Debug, PartialEq)]
pub struct LValue {
    pub value: Number,
    pub index: LIndex,
    pub provenance: Provenance,
}

impl LValue {
    pub fn exact(&self) -> Option<&ExactRational> {
        self.value.as_exact()
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn huge_rationals_convert() {
        let big = BigInt::from(10).pow(400);
        let q = BigRational::new(big.clone() * 3, big);
        assert_eq!(rational_to_f64(&q), 3.0);
        let tiny = BigRational::new(BigInt::from(1), BigInt::from(10).pow(320));
        let v = rational_to_f64(&tiny);
        assert!(v >= 0.0 && v < 1e-300);
    }

    #[test]
    fn scale_squares() {
        let s = Scale::from_square(rint(2)).unwrap();
        assert!((s.value() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.squared(), &Number::Exact(rint(2)));
        assert!(Scale::exact(rint(0)).is_err());
        assert!(Scale::real(0.0).is_err());
        let spec = ScaleSpec::from_f64(&[0.5, 3.0]).unwrap();
        assert_eq!(
            spec.exact_squares().unwrap(),
            vec![BigRational::new(1.into(), 4.into()), rint(9)]
        );
    }

    #[test]
    fn integer_orders() {
        assert_eq!(OrderSpec(vec![0.0, 2.0]).as_nonneg_integers(), Some(vec![0, 2]));
        assert_eq!(OrderSpec(vec![0.5]).as_nonneg_integers(), None);
        assert_eq!(OrderSpec(vec![-1.0]).as_nonneg_integers(), None);
    }
}
