//! Rational functions in jet variables.

use std::fmt;

use num_traits::One;

use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::Coef;

/// Error for a zero denominator, at construction or through division.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisionByZero;

impl fmt::Display for DivisionByZero {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "division by a zero polynomial")
    }
}

impl std::error::Error for DivisionByZero {}

/// A quotient of two polynomials.
///
/// The representation is normalized just enough to be canonical for the
/// inputs this crate produces: the shared monomial content of numerator and
/// denominator is cancelled, and the denominator is made primitive with a
/// positive integer leading coefficient (its rational content moves into the
/// numerator). No polynomial gcd is computed, so `u^2/u` simplifies to `u`
/// but `(u^2-1)/(u-1)` stays a genuine quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    /// Builds `num / den`, failing on a zero denominator.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, DivisionByZero> {
        if den.is_zero() {
            return Err(DivisionByZero);
        }
        let mut rf = RationalFunction { num, den };
        rf.normalize();
        Ok(rf)
    }

    /// A polynomial viewed as a rational function.
    pub fn from_poly(p: Polynomial) -> Self {
        RationalFunction { num: p, den: Polynomial::one() }
    }

    /// The constant zero.
    pub fn zero() -> Self {
        Self::from_poly(Polynomial::zero())
    }

    /// Numerator after normalization.
    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    /// Denominator after normalization.
    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    /// True when the denominator is the constant `1`.
    pub fn is_polynomial(&self) -> bool {
        self.den == Polynomial::one()
    }

    /// Returns the numerator when the denominator is `1`.
    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        if self.is_polynomial() {
            Some(&self.num)
        } else {
            None
        }
    }

    /// True for the zero function.
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = Polynomial::one();
            return;
        }
        let num_mon = monomial_content(&self.num);
        let den_mon = monomial_content(&self.den);
        let shared = gcd_mon(&num_mon, &den_mon);
        if !shared.is_one() {
            self.num = divide_monomial(&self.num, &shared);
            self.den = divide_monomial(&self.den, &shared);
        }
        let c = self.den.content();
        if !c.is_one() {
            self.den = self.den.scale(&c.recip());
            self.num = self.num.scale(&c.recip());
        }
    }

    /// Sum of two rational functions.
    pub fn add(&self, other: &Self) -> Self {
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        let den = &self.den * &other.den;
        RationalFunction::new(num, den).expect("product of nonzero denominators")
    }

    /// Difference.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Product.
    pub fn mul(&self, other: &Self) -> Self {
        RationalFunction::new(&self.num * &other.num, &self.den * &other.den)
            .expect("product of nonzero denominators")
    }

    /// Quotient; fails when `other` is zero.
    pub fn div(&self, other: &Self) -> Result<Self, DivisionByZero> {
        if other.is_zero() {
            return Err(DivisionByZero);
        }
        RationalFunction::new(&self.num * &other.den, &self.den * &other.num)
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Coef) -> Self {
        let mut rf = RationalFunction { num: self.num.scale(c), den: self.den.clone() };
        rf.normalize();
        rf
    }

    /// `self^e` for a nonnegative exponent.
    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::from_poly(Polynomial::one());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Total spatial derivative via the quotient rule.
    pub fn diff_x(&self) -> Self {
        let num = &(&self.num.diff_x() * &self.den) - &(&self.num * &self.den.diff_x());
        let den = &self.den * &self.den;
        RationalFunction::new(num, den).expect("square of nonzero denominator")
    }

    /// Evaluates at a point; `None` when the denominator vanishes there.
    pub fn eval<F>(&self, mut point: F) -> Option<Coef>
    where
        F: FnMut(crate::jet::JetVar) -> Coef,
    {
        use num_traits::Zero;
        let den = self.den.eval(&mut point);
        if den.is_zero() {
            return None;
        }
        Some(self.num.eval(point) / den)
    }
}

/// Per-variable minimum exponent across every term of `p`.
fn monomial_content(p: &Polynomial) -> Monomial {
    let mut terms = p.terms().map(|(m, _)| m.clone());
    let mut acc = match terms.next() {
        Some(m) => m,
        None => return Monomial::one(),
    };
    for m in terms {
        acc = gcd_mon(&acc, &m);
    }
    acc
}

fn gcd_mon(a: &Monomial, b: &Monomial) -> Monomial {
    Monomial::from_powers(a.factors().iter().map(|&(v, e)| (v, e.min(b.exponent_of(v)))))
}

fn divide_monomial(p: &Polynomial, m: &Monomial) -> Polynomial {
    Polynomial::from_terms(
        p.terms()
            .map(|(t, c)| (t.try_div(m).expect("monomial content divides every term"), c.clone())),
    )
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}
