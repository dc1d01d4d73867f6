//! Candidate generation: picking the monomial to eliminate and proposing
//! auxiliary definitions that cover it.

use std::cmp::Ordering;

use num_bigint::BigInt;

use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::Coef;

/// An unordered set of one or two auxiliary defining monomials proposed for
/// a single branch. Elements are stored in increasing monomial order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DecompositionTuple {
    elements: Vec<Monomial>,
}

impl DecompositionTuple {
    fn new(mut elements: Vec<Monomial>) -> Self {
        elements.sort();
        DecompositionTuple { elements }
    }

    /// The proposed defining monomials.
    pub fn elements(&self) -> &[Monomial] {
        &self.elements
    }

    /// Smallest element in the monomial order.
    pub fn min_monomial(&self) -> &Monomial {
        self.elements.first().expect("tuples are nonempty")
    }
}

/// Chooses the next monomial to eliminate from the verification remainders.
///
/// Scans the remainders in system order and returns the first monomial of
/// minimal total degree among those of degree at least three; later
/// equations only win by strictly lower degree. `None` means every
/// remaining term is already quadratic, so no monomial auxiliary can make
/// progress.
pub fn select_target(remainders: &[Polynomial]) -> Option<Monomial> {
    let mut best: Option<&Monomial> = None;
    for p in remainders {
        for (m, _) in p.terms() {
            if m.degree() >= 3 && best.map_or(true, |b| m.degree() < b.degree()) {
                best = Some(m);
            }
        }
    }
    best.cloned()
}

/// Enumerates decompositions of `target` into one or two nontrivial factors.
///
/// Every unordered divisor pair `(d, target/d)` yields a tuple after
/// dropping trivial factors: the constant `1`, bare single variables (those
/// are generators already), and monomials in `registered` (auxiliaries the
/// current branch already has). Pairs whose factors are both trivial vanish;
/// equal factors collapse to a singleton. Duplicates keep their first
/// occurrence, so the result order is the divisor enumeration order. For a
/// target of total degree `d` at most `2^(d-1)` tuples come back.
pub fn decompose(target: &Monomial, registered: &[Monomial]) -> Vec<DecompositionTuple> {
    let is_trivial = |m: &Monomial| m.is_one() || m.is_single_var() || registered.contains(m);
    let mut out: Vec<DecompositionTuple> = Vec::new();
    for d in target.divisors() {
        let complement = target.try_div(&d).expect("divisor divides");
        if d > complement {
            continue;
        }
        let mut elements = Vec::new();
        if !is_trivial(&d) {
            elements.push(d.clone());
        }
        if (complement != d) && !is_trivial(&complement) {
            elements.push(complement);
        }
        if elements.is_empty() {
            continue;
        }
        let tuple = DecompositionTuple::new(elements);
        if !out.contains(&tuple) {
            out.push(tuple);
        }
    }
    out
}

/// Ordering heuristic for decomposition tuples.
///
/// Each monomial gets a key from its total degree `d` and highest derivative
/// order `j`; a tuple's key is the componentwise maximum over its elements,
/// and tuples sort by ascending key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Heuristic {
    /// Key `(j, d)`: prefer low derivative order, then low degree.
    H1,
    /// Key `(d, j)`: prefer low degree, then low derivative order.
    H2,
    /// Scalar key `weight_d * d + weight_j * j`.
    H3 {
        /// Weight of the total degree.
        weight_d: Coef,
        /// Weight of the derivative order.
        weight_j: Coef,
    },
}

impl Heuristic {
    /// The default scoring: `d + 2 j`.
    pub fn h3_default() -> Self {
        Heuristic::H3 {
            weight_d: Coef::from(BigInt::from(1)),
            weight_j: Coef::from(BigInt::from(2)),
        }
    }

    /// Short name as used on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            Heuristic::H1 => "h1",
            Heuristic::H2 => "h2",
            Heuristic::H3 { .. } => "h3",
        }
    }

    fn tuple_cmp(&self, a: &DecompositionTuple, b: &DecompositionTuple) -> Ordering {
        let pair_key = |t: &DecompositionTuple, first_j: bool| -> (u32, u32) {
            let mut k = (0, 0);
            for m in t.elements() {
                let (d, j) = (m.degree(), m.max_deriv_order());
                let key = if first_j { (j, d) } else { (d, j) };
                k = (k.0.max(key.0), k.1.max(key.1));
            }
            k
        };
        match self {
            Heuristic::H1 => pair_key(a, true).cmp(&pair_key(b, true)),
            Heuristic::H2 => pair_key(a, false).cmp(&pair_key(b, false)),
            Heuristic::H3 { weight_d, weight_j } => {
                let score = |t: &DecompositionTuple| -> Coef {
                    t.elements()
                        .iter()
                        .map(|m| {
                            weight_d * Coef::from(BigInt::from(m.degree()))
                                + weight_j * Coef::from(BigInt::from(m.max_deriv_order()))
                        })
                        .max()
                        .expect("tuples are nonempty")
                };
                score(a).cmp(&score(b))
            }
        }
    }
}

impl Default for Heuristic {
    fn default() -> Self {
        Heuristic::h3_default()
    }
}

/// Stable-sorts tuples by ascending heuristic key.
///
/// Key ties break toward the tuple whose smallest monomial is smaller, then
/// by full element comparison, so the final order is total and independent
/// of the input order.
pub fn sort_candidates(tuples: &mut Vec<DecompositionTuple>, heuristic: &Heuristic) {
    tuples.sort_by(|a, b| {
        heuristic
            .tuple_cmp(a, b)
            .then_with(|| a.min_monomial().cmp(b.min_monomial()))
            .then_with(|| a.elements.cmp(&b.elements))
    });
}
