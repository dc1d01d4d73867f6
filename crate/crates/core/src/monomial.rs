//! Power products of jet variables and the total order used throughout the
//! engine.

use std::cmp::Ordering;
use std::fmt;

use crate::jet::JetVar;

/// A monomial: a finite power product of jet variables.
///
/// Factors are kept sorted by `JetVar` with strictly positive exponents, so
/// structural equality is semantic equality. The empty product is `1`.
///
/// `Ord` implements a graded lexicographic order: monomials compare first by
/// total degree, then lexicographically with the *highest* variable most
/// significant, larger exponent winning at the first variable where the two
/// monomials differ. Derivative-heavy and auxiliary-heavy monomials therefore
/// sort above plain powers of undifferentiated states of the same degree.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    factors: Vec<(JetVar, u32)>,
}

impl Monomial {
    /// The monomial `1`.
    pub fn one() -> Self {
        Monomial { factors: Vec::new() }
    }

    /// A single variable to the first power.
    pub fn var(v: JetVar) -> Self {
        Monomial { factors: vec![(v, 1)] }
    }

    /// Builds a monomial from arbitrary (variable, exponent) pairs.
    ///
    /// Pairs are sorted, repeated variables merged, zero exponents dropped.
    pub fn from_powers<I>(powers: I) -> Self
    where
        I: IntoIterator<Item = (JetVar, u32)>,
    {
        let mut factors: Vec<(JetVar, u32)> = powers.into_iter().filter(|&(_, e)| e > 0).collect();
        factors.sort_by_key(|&(v, _)| v);
        let mut merged: Vec<(JetVar, u32)> = Vec::with_capacity(factors.len());
        for (v, e) in factors {
            match merged.last_mut() {
                Some((lv, le)) if *lv == v => *le += e,
                _ => merged.push((v, e)),
            }
        }
        Monomial { factors: merged }
    }

    /// The sorted (variable, exponent) pairs, exponents all positive.
    pub fn factors(&self) -> &[(JetVar, u32)] {
        &self.factors
    }

    /// True for the monomial `1`.
    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// True when this is a bare variable to the first power.
    pub fn is_single_var(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }

    /// Total degree.
    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    /// Highest derivative order among the variables, 0 for `1`.
    pub fn max_deriv_order(&self) -> u32 {
        self.factors.iter().map(|&(v, _)| v.order()).max().unwrap_or(0)
    }

    /// Exponent of `v`, 0 when absent.
    pub fn exponent_of(&self, v: JetVar) -> u32 {
        self.factors
            .binary_search_by_key(&v, |&(w, _)| w)
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    /// Iterates over the distinct variables.
    pub fn vars(&self) -> impl Iterator<Item = JetVar> + '_ {
        self.factors.iter().map(|&(v, _)| v)
    }

    /// Product of two monomials.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let mut a = self.factors.iter().peekable();
        let mut b = other.factors.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(va, ea)), Some(&&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Less => {
                        out.push((va, ea));
                        a.next();
                    }
                    Ordering::Greater => {
                        out.push((vb, eb));
                        b.next();
                    }
                    Ordering::Equal => {
                        out.push((va, ea + eb));
                        a.next();
                        b.next();
                    }
                },
                (Some(&&f), None) => {
                    out.push(f);
                    a.next();
                }
                (None, Some(&&f)) => {
                    out.push(f);
                    b.next();
                }
                (None, None) => break,
            }
        }
        Monomial { factors: out }
    }

    /// `self / other` when `other` divides `self`, else `None`.
    pub fn try_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.factors.len());
        let mut a = self.factors.iter().peekable();
        for &(vb, eb) in &other.factors {
            loop {
                let &&(va, ea) = a.peek()?;
                if va < vb {
                    out.push((va, ea));
                    a.next();
                } else if va == vb {
                    if ea < eb {
                        return None;
                    }
                    if ea > eb {
                        out.push((va, ea - eb));
                    }
                    a.next();
                    break;
                } else {
                    return None;
                }
            }
        }
        out.extend(a.copied());
        Some(Monomial { factors: out })
    }

    /// `self^e`.
    pub fn pow(&self, e: u32) -> Monomial {
        Monomial {
            factors: self.factors.iter().map(|&(v, x)| (v, x * e)).collect(),
        }
    }

    /// True when the two monomials share no variable.
    pub fn is_coprime_with(&self, other: &Monomial) -> bool {
        let mut a = self.factors.iter().peekable();
        let mut b = other.factors.iter().peekable();
        while let (Some(&&(va, _)), Some(&&(vb, _))) = (a.peek(), b.peek()) {
            match va.cmp(&vb) {
                Ordering::Less => {
                    a.next();
                }
                Ordering::Greater => {
                    b.next();
                }
                Ordering::Equal => return false,
            }
        }
        true
    }

    /// Least common multiple.
    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let mut a = self.factors.iter().peekable();
        let mut b = other.factors.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(va, ea)), Some(&&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Less => {
                        out.push((va, ea));
                        a.next();
                    }
                    Ordering::Greater => {
                        out.push((vb, eb));
                        b.next();
                    }
                    Ordering::Equal => {
                        out.push((va, ea.max(eb)));
                        a.next();
                        b.next();
                    }
                },
                (Some(&&f), None) => {
                    out.push(f);
                    a.next();
                }
                (None, Some(&&f)) => {
                    out.push(f);
                    b.next();
                }
                (None, None) => break,
            }
        }
        Monomial { factors: out }
    }

    /// All divisors of the monomial, `1` and the monomial itself included.
    pub fn divisors(&self) -> Vec<Monomial> {
        let mut out = vec![Monomial::one()];
        for &(v, e) in &self.factors {
            let prev = std::mem::take(&mut out);
            for d in prev {
                for k in 0..=e {
                    let mut factors = d.factors.clone();
                    if k > 0 {
                        factors.push((v, k));
                    }
                    out.push(Monomial { factors });
                }
            }
        }
        out
    }
}

/// Total order on monomials, exposed under the name the rest of the crate
/// uses for it. Equivalent to `a.cmp(b)`.
pub fn lex_compare(a: &Monomial, b: &Monomial) -> Ordering {
    a.cmp(b)
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let mut a = self.factors.iter().rev();
            let mut b = other.factors.iter().rev();
            loop {
                match (a.next(), b.next()) {
                    (None, None) => return Ordering::Equal,
                    (None, Some(_)) => return Ordering::Less,
                    (Some(_), None) => return Ordering::Greater,
                    (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb).then(ea.cmp(&eb)) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    },
                }
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for &(v, e) in &self.factors {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            match v {
                JetVar::Base { state, order } => {
                    write!(f, "x{}", state)?;
                    if order > 0 {
                        write!(f, "'{}", order)?;
                    }
                }
                JetVar::Aux { id, order } => {
                    write!(f, "w{}", id)?;
                    if order > 0 {
                        write!(f, "'{}", order)?;
                    }
                }
            }
            if e > 1 {
                write!(f, "^{}", e)?;
            }
        }
        Ok(())
    }
}
