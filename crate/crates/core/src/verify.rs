//! Verification: does a candidate set of auxiliary monomials close the
//! system with degree-two right-hand sides?

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::rc::Rc;

use crate::jet::JetVar;
use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::system::{AuxKind, ExtendedSystem, Workspace};
use crate::Coef;

/// Identity of a generator, independent of any search position.
///
/// Pair products are cached under these keys, so a candidate monomial met on
/// two different branches reuses all of its products.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum GenKey {
    /// The constant generator `1`.
    One,
    /// `m`-th jet of a state: `(state, m)`.
    Base(u32, u32),
    /// `m`-th jet of a registered inverse auxiliary: `(id, m)`.
    InvJet(u32, u32),
    /// `m`-th jet of a monomial auxiliary, identified by its definition.
    MonJet(Monomial, u32),
}

/// One generator: its identity, the degree-one symbol it contributes to
/// quadratic forms, and its expansion over base and inverse variables.
#[derive(Clone, Debug)]
pub struct Generator {
    /// Cache identity.
    pub key: GenKey,
    /// Symbol as a monomial: `1` for the constant generator, a single
    /// variable otherwise.
    pub symbol: Monomial,
    /// Normal-form expansion of the symbol.
    pub expansion: Rc<Polynomial>,
}

/// The generator list for one verification, in canonical order: the
/// constant, all base jets state-major, then jets of every auxiliary in
/// registration order (candidates after registered ones).
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    /// Generators in canonical order.
    pub generators: Vec<Generator>,
    /// Differential order `k` the set was built for.
    pub diff_order: u32,
}

/// Error from generator construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyError {
    /// An auxiliary definition needs more derivatives than `k` allows:
    /// its jets up to `k - cost` would be an empty range.
    DerivativeBudget {
        /// Rendering of the offending definition.
        definition: String,
        /// Derivative cost of the definition.
        cost: u32,
        /// Differential order of the attempted verification.
        diff_order: u32,
    },
}

impl fmt::Display for VerifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyError::DerivativeBudget { definition, cost, diff_order } => write!(
                f,
                "derivative budget exceeded: {} costs {} derivatives but the order is {}",
                definition, cost, diff_order
            ),
        }
    }
}

impl std::error::Error for VerifyError {}

/// Outcome of verifying one candidate set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyOutcome {
    /// Every equation reduces to a combination of generator pairs. `forms`
    /// holds one quadratic polynomial in the generator symbols per target:
    /// states first, then auxiliaries in registration order, then the
    /// candidates in the order they were passed.
    Success {
        /// Quadratic right-hand sides over generator symbols.
        forms: Vec<Polynomial>,
    },
    /// At least one equation has terms outside the span of the pair
    /// products. `remainders` aligns with the target order; reducible
    /// targets contribute zero entries.
    Residual {
        /// Irreducible parts of each target.
        remainders: Vec<Polynomial>,
    },
}

impl VerifyOutcome {
    /// True for the success variant.
    pub fn is_success(&self) -> bool {
        matches!(self, VerifyOutcome::Success { .. })
    }
}

/// Verification context: the jet workspace plus the pair-product cache.
pub struct VerifyCtx<'a> {
    /// Shared jet calculus over the system.
    pub ws: Workspace<'a>,
    pair_cache: BTreeMap<(GenKey, GenKey), Rc<Polynomial>>,
}

impl<'a> VerifyCtx<'a> {
    /// Fresh context over a system.
    pub fn new(sys: &'a ExtendedSystem) -> Self {
        VerifyCtx {
            ws: Workspace::new(sys),
            pair_cache: BTreeMap::new(),
        }
    }

    /// Normal form of the product of two generator expansions, cached.
    fn pair_product(&mut self, a: &Generator, b: &Generator) -> Rc<Polynomial> {
        let key = if a.key <= b.key {
            (a.key.clone(), b.key.clone())
        } else {
            (b.key.clone(), a.key.clone())
        };
        if let Some(p) = self.pair_cache.get(&key) {
            return Rc::clone(p);
        }
        let prod = &*a.expansion * &*b.expansion;
        let p = Rc::new(self.ws.system().ideal().nf(&prod));
        self.pair_cache.insert(key, Rc::clone(&p));
        p
    }
}

/// Builds the generator set for the system's auxiliaries plus the candidate
/// monomials in `extra`, at differential order `k`.
///
/// Jets of an auxiliary with derivative cost `c` run from order `0` to
/// `k - c`; a cost above `k` is an error.
pub fn build_generators(
    ctx: &mut VerifyCtx<'_>,
    extra: &[Monomial],
    k: u32,
) -> Result<GeneratorSet, VerifyError> {
    let sys = ctx.ws.system();
    let mut generators = Vec::new();
    generators.push(Generator {
        key: GenKey::One,
        symbol: Monomial::one(),
        expansion: Rc::new(Polynomial::one()),
    });
    for s in 0..sys.num_states() as u32 {
        for m in 0..=k {
            let v = JetVar::base(s, m);
            generators.push(Generator {
                key: GenKey::Base(s, m),
                symbol: Monomial::var(v),
                expansion: Rc::new(Polynomial::var(v)),
            });
        }
    }
    for aux in sys.auxes() {
        if aux.deriv_cost > k {
            return Err(VerifyError::DerivativeBudget {
                definition: match &aux.kind {
                    AuxKind::Monomial(m) => format!("{}", m),
                    AuxKind::Inverse(f) => format!("1/({})", f),
                },
                cost: aux.deriv_cost,
                diff_order: k,
            });
        }
        for m in 0..=k - aux.deriv_cost {
            let (key, expansion) = match &aux.kind {
                AuxKind::Monomial(def) => {
                    (GenKey::MonJet(def.clone(), m), ctx.ws.monomial_jet(def, m))
                }
                AuxKind::Inverse(_) => (GenKey::InvJet(aux.id, m), ctx.ws.inverse_jet(aux.id, m)),
            };
            generators.push(Generator {
                key,
                symbol: Monomial::var(JetVar::aux(aux.id, m)),
                expansion,
            });
        }
    }
    let base_count = sys.auxes().len() as u32;
    for (pos, def) in extra.iter().enumerate() {
        let cost = sys.deriv_cost(def);
        if cost > k {
            return Err(VerifyError::DerivativeBudget {
                definition: format!("{}", def),
                cost,
                diff_order: k,
            });
        }
        let id = base_count + pos as u32;
        for m in 0..=k - cost {
            generators.push(Generator {
                key: GenKey::MonJet(def.clone(), m),
                symbol: Monomial::var(JetVar::aux(id, m)),
                expansion: ctx.ws.monomial_jet(def, m),
            });
        }
    }
    Ok(GeneratorSet { generators, diff_order: k })
}

struct PivotRow {
    poly: Polynomial,
    combo: Polynomial,
}

/// Row echelon form of the pair products of a generator set, with each row's
/// expression as a quadratic form in the generator symbols tracked along.
pub struct RowReduction {
    pivots: BTreeMap<Monomial, PivotRow>,
    /// Distinct pair products fed into the elimination.
    pub rows: usize,
    /// Number of pivots, i.e. the dimension of the spanned space.
    pub rank: usize,
}

impl RowReduction {
    fn insert(&mut self, mut poly: Polynomial, mut combo: Polynomial) {
        loop {
            let (lm, lc) = match poly.leading_term() {
                Some((m, c)) => (m.clone(), c.clone()),
                None => return,
            };
            match self.pivots.get(&lm) {
                Some(p) => {
                    poly = &poly - &p.poly.scale(&lc);
                    combo = &combo - &p.combo.scale(&lc);
                }
                None => {
                    self.pivots.insert(
                        lm,
                        PivotRow {
                            poly: poly.scale(&lc.recip()),
                            combo: combo.scale(&lc.recip()),
                        },
                    );
                    self.rank += 1;
                    return;
                }
            }
        }
    }

    /// Fully reduces `target`, returning the irreducible remainder and the
    /// quadratic combination accounting for the reducible part.
    pub fn reduce(&self, target: &Polynomial) -> (Polynomial, Polynomial) {
        let mut work = target.clone();
        let mut rem = Polynomial::zero();
        let mut combo = Polynomial::zero();
        while let Some((lm, lc)) = work.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
            match self.pivots.get(&lm) {
                Some(p) => {
                    work = &work - &p.poly.scale(&lc);
                    combo = &combo + &p.combo.scale(&lc);
                }
                None => {
                    rem.add_term(lm.clone(), lc.clone());
                    work.add_term(lm, -lc);
                }
            }
        }
        (rem, combo)
    }
}

/// Eliminates the pair products of `gens` into row echelon form.
///
/// Products are taken over unordered generator pairs in row-major order;
/// expansions equal to an earlier one are dropped before elimination, so
/// `rows` counts distinct products.
pub fn row_reduce(ctx: &mut VerifyCtx<'_>, gens: &GeneratorSet) -> RowReduction {
    let mut red = RowReduction { pivots: BTreeMap::new(), rows: 0, rank: 0 };
    let mut seen: BTreeSet<Vec<(Monomial, Coef)>> = BTreeSet::new();
    let n = gens.generators.len();
    for i in 0..n {
        for j in i..n {
            let (gi, gj) = (&gens.generators[i], &gens.generators[j]);
            let expansion = ctx.pair_product(gi, gj);
            let fingerprint: Vec<(Monomial, Coef)> =
                expansion.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
            if !seen.insert(fingerprint) {
                continue;
            }
            red.rows += 1;
            let combo = Polynomial::monomial(gi.symbol.mul(&gj.symbol));
            red.insert(expansion.as_ref().clone(), combo);
        }
    }
    red
}

/// Verifies whether the registered auxiliaries plus the candidate monomials
/// in `extra` quadratize the system at differential order `k`.
///
/// Targets are the state equations, the registered auxiliary equations, and
/// the time derivatives of the candidates, in that order.
pub fn verify(
    ctx: &mut VerifyCtx<'_>,
    extra: &[Monomial],
    k: u32,
) -> Result<VerifyOutcome, VerifyError> {
    let gens = build_generators(ctx, extra, k)?;
    let red = row_reduce(ctx, &gens);
    let sys = ctx.ws.system();
    let mut targets: Vec<Polynomial> = Vec::new();
    targets.extend(sys.state_rhs().iter().cloned());
    targets.extend(sys.aux_rhs().iter().cloned());
    for def in extra {
        targets.push(ctx.ws.time_derivative_monomial(def).as_ref().clone());
    }
    let mut forms = Vec::with_capacity(targets.len());
    let mut remainders = Vec::with_capacity(targets.len());
    let mut clean = true;
    for t in &targets {
        let (rem, combo) = red.reduce(t);
        clean &= rem.is_zero();
        remainders.push(rem);
        forms.push(combo);
    }
    Ok(if clean {
        VerifyOutcome::Success { forms }
    } else {
        VerifyOutcome::Residual { remainders }
    })
}

/// One-shot verification over a fresh context.
pub fn verify_once(
    sys: &ExtendedSystem,
    extra: &[Monomial],
    k: u32,
) -> Result<VerifyOutcome, VerifyError> {
    let mut ctx = VerifyCtx::new(sys);
    verify(&mut ctx, extra, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::RationalFunction;
    use crate::system::{PdeSystem, RationalSystem};
    use num_bigint::BigInt;

    const U: JetVar = JetVar::Base { state: 0, order: 0 };
    const UX: JetVar = JetVar::Base { state: 0, order: 1 };
    const UXX: JetVar = JetVar::Base { state: 0, order: 2 };
    const UXXX: JetVar = JetVar::Base { state: 0, order: 3 };
    const W: JetVar = JetVar::Aux { id: 0, order: 0 };
    const WX: JetVar = JetVar::Aux { id: 0, order: 1 };
    const Q: JetVar = JetVar::Aux { id: 0, order: 0 };
    const QX: JetVar = JetVar::Aux { id: 0, order: 1 };

    fn mono(powers: &[(JetVar, u32)]) -> Monomial {
        Monomial::from_powers(powers.iter().copied())
    }

    fn poly(terms: &[(i64, &[(JetVar, u32)])]) -> Polynomial {
        Polynomial::from_terms(terms.iter().map(|&(c, ps)| (mono(ps), Coef::from(BigInt::from(c)))))
    }

    fn half() -> Coef {
        Coef::new(BigInt::from(1), BigInt::from(2))
    }

    fn ext(rhs: Polynomial) -> ExtendedSystem {
        let sys = PdeSystem::new(vec!["u".into()], vec![rhs]).unwrap();
        ExtendedSystem::from_polynomial(&sys)
    }

    /// u_t = u_x u^2 with W = {u^2} at k = 1: five generators, fifteen
    /// pairs, one duplicate expansion, rank twelve, and both equations
    /// reduce with the forms (1/2) u w_x and w w_x.
    #[test]
    fn burgers_cube_reduction() {
        let sys = ext(poly(&[(1, &[(U, 2), (UX, 1)])]));
        let mut ctx = VerifyCtx::new(&sys);
        let w = [mono(&[(U, 2)])];
        let gens = build_generators(&mut ctx, &w, 1).unwrap();
        assert_eq!(gens.generators.len(), 5);
        let red = row_reduce(&mut ctx, &gens);
        assert_eq!(red.rows, 14);
        assert_eq!(red.rank, 12);
        let outcome = verify(&mut ctx, &w, 1).unwrap();
        match outcome {
            VerifyOutcome::Success { forms } => {
                assert_eq!(forms.len(), 2);
                let u_wx = Polynomial::monomial(mono(&[(U, 1), (WX, 1)])).scale(&half());
                assert_eq!(forms[0], u_wx);
                assert_eq!(forms[1], Polynomial::monomial(mono(&[(W, 1), (WX, 1)])));
            }
            other => panic!("expected success, got {:?}", other),
        }
    }

    /// u_t = u^2 u_xxx with W = {u^2} at k = 3: the state equation reduces
    /// but the auxiliary one leaves exactly 6 u_x^3 u unreachable.
    #[test]
    fn square_candidate_leaves_cubic_residual() {
        let sys = ext(poly(&[(1, &[(U, 2), (UXXX, 1)])]));
        let mut ctx = VerifyCtx::new(&sys);
        for k in [3, 9] {
            let outcome = verify(&mut ctx, &[mono(&[(U, 2)])], k).unwrap();
            match outcome {
                VerifyOutcome::Residual { remainders } => {
                    assert_eq!(remainders.len(), 2);
                    assert!(remainders[0].is_zero());
                    assert_eq!(remainders[1], poly(&[(6, &[(U, 1), (UX, 3)])]));
                }
                other => panic!("expected residual at k={}, got {:?}", k, other),
            }
        }
    }

    #[test]
    fn derivative_budget_error() {
        let sys = ext(poly(&[(1, &[(U, 1), (UX, 2)])]));
        let mut ctx = VerifyCtx::new(&sys);
        let err = build_generators(&mut ctx, &[mono(&[(U, 1), (UX, 1)])], 0).unwrap_err();
        assert!(matches!(err, VerifyError::DerivativeBudget { cost: 1, diff_order: 0, .. }));
    }

    #[test]
    fn quadratic_system_verifies_empty() {
        let sys = ext(poly(&[(1, &[(UXX, 1)]), (1, &[(U, 2)])]));
        let mut ctx = VerifyCtx::new(&sys);
        let outcome = verify(&mut ctx, &[], 2).unwrap();
        match outcome {
            VerifyOutcome::Success { forms } => {
                assert_eq!(forms, vec![poly(&[(1, &[(UXX, 1)]), (1, &[(U, 2)])])]);
            }
            other => panic!("expected success, got {:?}", other),
        }
    }

    /// Lifted u_t = 2 u_x / u closes over the inverse alone at k = 1.
    #[test]
    fn inverse_root_verifies() {
        let rhs = RationalFunction::new(poly(&[(2, &[(UX, 1)])]), Polynomial::var(U)).unwrap();
        let rat = RationalSystem::new(vec!["u".into()], vec![rhs]).unwrap();
        let sys = crate::lift::polynomialize(&rat).unwrap();
        let mut ctx = VerifyCtx::new(&sys);
        let outcome = verify(&mut ctx, &[], 1).unwrap();
        match outcome {
            VerifyOutcome::Success { forms } => {
                assert_eq!(forms.len(), 2);
                // q_t = -2 u_x q^3 is 2 q q_x once q_x = -u_x q^2 is a generator.
                assert_eq!(
                    forms[1],
                    Polynomial::monomial(mono(&[(Q, 1), (QX, 1)]))
                        .scale(&Coef::from(BigInt::from(2)))
                );
            }
            other => panic!("expected success, got {:?}", other),
        }
    }

    /// Candidate generators appear after registered ones and reuse the
    /// cached expansions keyed by definition.
    #[test]
    fn generator_order_is_canonical() {
        let sys = ext(poly(&[(1, &[(U, 2), (UXXX, 1)])]));
        let mut ctx = VerifyCtx::new(&sys);
        let w = [mono(&[(U, 2)]), mono(&[(U, 3)])];
        let gens = build_generators(&mut ctx, &w, 2).unwrap();
        let symbols: Vec<Monomial> = gens.generators.iter().map(|g| g.symbol.clone()).collect();
        let mut expected = vec![Monomial::one()];
        for m in 0..=2 {
            expected.push(Monomial::var(JetVar::base(0, m)));
        }
        for id in 0..2 {
            for m in 0..=2 {
                expected.push(Monomial::var(JetVar::aux(id, m)));
            }
        }
        assert_eq!(symbols, expected);
    }
}
