//! Rational lift: rewrites rational systems as polynomial ones by adjoining
//! inverses of denominator factors.

use std::fmt;

use crate::ideal::{IdealBasis, TermOrder};
use crate::jet::JetVar;
use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::system::{AuxDefinition, AuxKind, ExtendedSystem, RationalSystem};
use crate::Coef;

/// Multiplicative factorization of a denominator.
///
/// `content * factor_1^mult_1 * ... * factor_m^mult_m`, where every factor
/// is a primitive polynomial with positive integer leading coefficient.
/// Factoring is deliberately shallow: rational content, per-variable
/// monomial powers, and perfect powers detectable by an exponent-gcd
/// candidate. Anything else stays a single factor of multiplicity one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredDenominator {
    /// Scalar pulled out of the denominator.
    pub content: Coef,
    /// Primitive factors with multiplicities, in discovery order.
    pub factors: Vec<(Polynomial, u32)>,
}

/// Splits a denominator into content and primitive factors.
pub fn factor_denominator(den: &Polynomial) -> FactoredDenominator {
    assert!(!den.is_zero(), "denominator is zero");
    let content = den.content();
    let mut rest = den.scale(&content.recip());
    let mut factors: Vec<(Polynomial, u32)> = Vec::new();

    // Per-variable monomial powers shared by every term.
    let shared = rest
        .terms()
        .map(|(m, _)| m.clone())
        .reduce(|a, b| {
            Monomial::from_powers(a.factors().iter().map(|&(v, e)| (v, e.min(b.exponent_of(v)))))
        })
        .unwrap_or_else(Monomial::one);
    if !shared.is_one() {
        rest = Polynomial::from_terms(
            rest.terms()
                .map(|(m, c)| (m.try_div(&shared).expect("shared monomial divides"), c.clone())),
        );
        for &(v, e) in shared.factors() {
            factors.push((Polynomial::var(v), e));
        }
    }

    if rest == Polynomial::one() {
        return FactoredDenominator { content, factors };
    }

    // Perfect-power candidate: divide every exponent by their common gcd
    // and check by multiplying back. Misses most powers, by design.
    let exp_gcd = rest
        .terms()
        .flat_map(|(m, _)| m.factors().iter().map(|&(_, e)| e))
        .fold(0u32, gcd);
    if exp_gcd > 1 {
        let root = Polynomial::from_terms(rest.terms().map(|(m, c)| {
            (
                Monomial::from_powers(m.factors().iter().map(|&(v, e)| (v, e / exp_gcd))),
                c.clone(),
            )
        }));
        if root.pow(exp_gcd) == rest {
            factors.push((root, exp_gcd));
            return FactoredDenominator { content, factors };
        }
    }

    factors.push((rest, 1));
    FactoredDenominator { content, factors }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Errors from the rational lift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiftError {
    /// A denominator is a nonzero constant times zero, i.e. the parsed
    /// input divided by the zero polynomial.
    ZeroDenominator { equation: usize },
}

impl fmt::Display for LiftError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiftError::ZeroDenominator { equation } => {
                write!(f, "equation {} divides by zero", equation)
            }
        }
    }
}

impl std::error::Error for LiftError {}

/// Rewrites a rational system as a polynomial extended system.
///
/// One inverse auxiliary `q_j = 1/f_j` is introduced per distinct
/// denominator factor across all equations, the relations `q_j f_j - 1`
/// generate the system ideal, and every right-hand side is reduced to
/// normal form over the enlarged variable set. Polynomial inputs pass
/// through with no auxiliaries and an empty ideal.
pub fn polynomialize(sys: &RationalSystem) -> Result<ExtendedSystem, LiftError> {
    // Distinct primitive factors in first-appearance order.
    let mut factors: Vec<Polynomial> = Vec::new();
    let mut per_eq: Vec<(Coef, Vec<(usize, u32)>)> = Vec::new();
    for (i, r) in sys.rhs().iter().enumerate() {
        if r.denominator().is_zero() {
            return Err(LiftError::ZeroDenominator { equation: i });
        }
        let f = factor_denominator(r.denominator());
        let mut refs = Vec::new();
        for (p, mult) in f.factors {
            let idx = match factors.iter().position(|g| *g == p) {
                Some(idx) => idx,
                None => {
                    factors.push(p);
                    factors.len() - 1
                }
            };
            refs.push((idx, mult));
        }
        per_eq.push((f.content, refs));
    }

    let auxes: Vec<AuxDefinition> = factors
        .iter()
        .enumerate()
        .map(|(id, f)| AuxDefinition {
            id: id as u32,
            kind: AuxKind::Inverse(f.clone()),
            deriv_cost: f.max_deriv_order(),
        })
        .collect();

    let ideal = if factors.is_empty() {
        IdealBasis::empty()
    } else {
        IdealBasis::new(
            factors
                .iter()
                .enumerate()
                .map(|(id, f)| {
                    let q = Polynomial::var(JetVar::aux(id as u32, 0));
                    &(&q * f) - &Polynomial::one()
                })
                .collect(),
            TermOrder::InverseBlock,
        )
    };

    let state_rhs: Vec<Polynomial> = sys
        .rhs()
        .iter()
        .zip(&per_eq)
        .map(|(r, (content, refs))| {
            let mut p = r.numerator().scale(&content.recip());
            if !refs.is_empty() {
                let q_pow = Monomial::from_powers(
                    refs.iter().map(|&(idx, mult)| (JetVar::aux(idx as u32, 0), mult)),
                );
                p = p.mul_mon(&q_pow);
            }
            ideal.nf(&p)
        })
        .collect();

    // Time derivatives of the inverses need the rewritten state equations.
    let n_aux = auxes.len();
    let staging = ExtendedSystem::from_parts(
        sys.state_names().to_vec(),
        state_rhs.clone(),
        auxes.clone(),
        vec![Polynomial::zero(); n_aux],
        ideal.clone(),
    );
    let aux_rhs: Vec<Polynomial> = (0..n_aux as u32)
        .map(|id| crate::system::time_derivative_inverse(&staging, id))
        .collect();

    Ok(ExtendedSystem::from_parts(
        sys.state_names().to_vec(),
        state_rhs,
        auxes,
        aux_rhs,
        ideal,
    ))
}
