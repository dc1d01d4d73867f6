//! Sparse multivariate polynomials over the rationals with jet-variable
//! symbols.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::jet::JetVar;
use crate::monomial::Monomial;
use crate::Coef;

/// A polynomial with exact rational coefficients, stored sparsely.
///
/// The term map never contains zero coefficients, so structural equality is
/// semantic equality. Iteration order follows the monomial order, which makes
/// every operation on polynomials deterministic.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Coef>,
}

impl Polynomial {
    /// The zero polynomial.
    pub fn zero() -> Self {
        Polynomial { terms: BTreeMap::new() }
    }

    /// The constant polynomial `1`.
    pub fn one() -> Self {
        Polynomial::constant(Coef::one())
    }

    /// A constant polynomial.
    pub fn constant(c: Coef) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Polynomial { terms }
    }

    /// The polynomial consisting of the single variable `v`.
    pub fn var(v: JetVar) -> Self {
        Polynomial::monomial(Monomial::var(v))
    }

    /// The polynomial consisting of one monomial with coefficient `1`.
    pub fn monomial(m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(m, Coef::one());
        Polynomial { terms }
    }

    /// Builds a polynomial from (monomial, coefficient) pairs, merging
    /// duplicates and dropping zeros.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Coef)>,
    {
        let mut p = Polynomial::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c * m` in place.
    pub fn add_term(&mut self, m: Monomial, c: Coef) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True when there are no terms.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterates over terms in increasing monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Coef)> {
        self.terms.iter()
    }

    /// Coefficient of `m`, zero when absent.
    pub fn coefficient(&self, m: &Monomial) -> Coef {
        self.terms.get(m).cloned().unwrap_or_else(Coef::zero)
    }

    /// The largest term in the monomial order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Coef)> {
        self.terms.iter().next_back()
    }

    /// Total degree, 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Highest derivative order of any variable occurring, 0 when none.
    pub fn max_deriv_order(&self) -> u32 {
        self.terms.keys().map(Monomial::max_deriv_order).max().unwrap_or(0)
    }

    /// True when every term has total degree at most two.
    pub fn is_quadratic(&self) -> bool {
        self.degree() <= 2
    }

    /// Iterates over the distinct variables of the polynomial.
    pub fn vars(&self) -> impl Iterator<Item = JetVar> + '_ {
        let mut seen = std::collections::BTreeSet::new();
        self.terms.keys().flat_map(Monomial::vars).filter(move |v| seen.insert(*v))
    }

    /// Multiplies by a scalar.
    pub fn scale(&self, c: &Coef) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    /// Multiplies by a monomial.
    pub fn mul_mon(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(t, c)| (t.mul(m), c.clone())).collect(),
        }
    }

    /// `self^e` by repeated multiplication.
    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Total spatial derivative: every jet symbol differentiates to its
    /// order-plus-one companion via the product rule.
    pub fn diff_x(&self) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let factors = m.factors();
            for (i, &(v, e)) in factors.iter().enumerate() {
                let mut powers: Vec<(JetVar, u32)> = factors.to_vec();
                powers[i].1 -= 1;
                powers.push((v.diff(), 1));
                out.add_term(Monomial::from_powers(powers), c * Coef::from(BigInt::from(e)));
            }
        }
        out
    }

    /// Formal partial derivative with respect to a single jet variable.
    pub fn partial(&self, v: JetVar) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent_of(v);
            if e == 0 {
                continue;
            }
            let reduced = m.try_div(&Monomial::var(v)).expect("exponent checked positive");
            out.add_term(reduced, c * Coef::from(BigInt::from(e)));
        }
        out
    }

    /// Replaces every occurrence of `v` by the polynomial `p`.
    pub fn substitute(&self, v: JetVar, p: &Polynomial) -> Polynomial {
        let mut powers: Vec<Polynomial> = vec![Polynomial::one()];
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent_of(v) as usize;
            if e == 0 {
                out.add_term(m.clone(), c.clone());
                continue;
            }
            while powers.len() <= e {
                let next = &powers[powers.len() - 1] * p;
                powers.push(next);
            }
            let rest = m.try_div(&Monomial::var(v).pow(e as u32)).expect("exponent checked");
            for (pm, pc) in powers[e].terms() {
                out.add_term(rest.mul(pm), pc * c);
            }
        }
        out
    }

    /// Evaluates the polynomial at the point described by `point`.
    pub fn eval<F>(&self, mut point: F) -> Coef
    where
        F: FnMut(JetVar) -> Coef,
    {
        let mut acc = Coef::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for &(v, e) in m.factors() {
                let x = point(v);
                for _ in 0..e {
                    term *= &x;
                }
            }
            acc += term;
        }
        acc
    }

    /// Rational content: the positive gcd of all coefficients, with the sign
    /// of the leading coefficient. Zero for the zero polynomial.
    pub fn content(&self) -> Coef {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Coef::zero();
        }
        let mut content = Coef::new(num, den);
        if let Some((_, lead)) = self.leading_term() {
            if lead.is_negative() {
                content = -content;
            }
        }
        content
    }

    /// `self / content()`; the leading coefficient of the result is a
    /// positive integer. Panics on the zero polynomial.
    pub fn primitive_part(&self) -> Polynomial {
        let c = self.content();
        assert!(!c.is_zero(), "primitive part of zero polynomial");
        self.scale(&c.recip())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{}", abs)?;
            } else if abs.is_one() {
                write!(f, "{}", m)?;
            } else {
                write!(f, "{}*{}", abs, m)?;
            }
        }
        Ok(())
    }
}
