//! Polynomial ideals and normal forms for the inverse-variable relations
//! introduced by the rational lift.

use std::cmp::Ordering;

use crate::jet::JetVar;
use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::Coef;

/// Term order used for ideal computations.
///
/// `InverseBlock` eliminates auxiliary (inverse) variables: two monomials
/// compare first by their auxiliary part under graded lex, then by their base
/// part under graded lex. Any monomial containing an inverse symbol is
/// therefore larger than any purely base monomial, which drives normal forms
/// toward base variables and keeps inverse powers minimal.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TermOrder {
    /// Graded lexicographic order on the full variable set.
    Graded,
    /// Auxiliary block first, base block second, graded lex inside each.
    InverseBlock,
}

impl TermOrder {
    /// Compares two monomials under this order.
    pub fn cmp(self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            TermOrder::Graded => a.cmp(b),
            TermOrder::InverseBlock => {
                block_part_cmp(a, b, false).then_with(|| block_part_cmp(a, b, true))
            }
        }
    }

    /// Human-readable name, used in reports.
    pub fn name(self) -> &'static str {
        match self {
            TermOrder::Graded => "graded",
            TermOrder::InverseBlock => "inverse-block",
        }
    }
}

/// Compares the base (`base = true`) or auxiliary part of two monomials
/// under graded lex with the highest variable most significant.
fn block_part_cmp(a: &Monomial, b: &Monomial, base: bool) -> Ordering {
    let part = |m: &Monomial| -> Vec<(JetVar, u32)> {
        m.factors().iter().copied().filter(|(v, _)| v.is_base() == base).collect()
    };
    let pa = part(a);
    let pb = part(b);
    let da: u32 = pa.iter().map(|&(_, e)| e).sum();
    let db: u32 = pb.iter().map(|&(_, e)| e).sum();
    da.cmp(&db).then_with(|| {
        let mut ia = pa.iter().rev();
        let mut ib = pb.iter().rev();
        loop {
            match (ia.next(), ib.next()) {
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

/// Leading (monomial, coefficient) of `p` under `order`.
fn leading(p: &Polynomial, order: TermOrder) -> Option<(Monomial, Coef)> {
    p.terms()
        .max_by(|x, y| order.cmp(x.0, y.0))
        .map(|(m, c)| (m.clone(), c.clone()))
}

/// Fully reduces `p` modulo `basis` under `order`.
///
/// Every term of the result is divisible by no leading monomial of the
/// basis. When `basis` is a Groebner basis the result is the canonical
/// normal form.
pub fn reduce_nf(p: &Polynomial, basis: &[Polynomial], order: TermOrder) -> Polynomial {
    let lms: Vec<(Monomial, Coef)> = basis.iter().filter_map(|g| leading(g, order)).collect();
    let mut work = p.clone();
    let mut rem = Polynomial::zero();
    while let Some((t, c)) = leading(&work, order) {
        let hit = lms.iter().enumerate().find_map(|(i, (lm, _))| t.try_div(lm).map(|q| (i, q)));
        match hit {
            Some((i, quot)) => {
                let scale = -&c / &lms[i].1;
                work = &work + &basis[i].mul_mon(&quot).scale(&scale);
            }
            None => {
                rem.add_term(t.clone(), c.clone());
                work.add_term(t, -c);
            }
        }
    }
    rem
}

fn s_polynomial(f: &Polynomial, g: &Polynomial, order: TermOrder) -> Polynomial {
    let (lf, cf) = leading(f, order).expect("nonzero");
    let (lg, cg) = leading(g, order).expect("nonzero");
    let l = lf.lcm(&lg);
    let a = f.mul_mon(&l.try_div(&lf).expect("lcm divisible")).scale(&cf.recip());
    let b = g.mul_mon(&l.try_div(&lg).expect("lcm divisible")).scale(&cg.recip());
    &a - &b
}

/// Buchberger's algorithm with the coprime-leading-monomial criterion.
///
/// Returns the reduced Groebner basis: minimal, inter-reduced, monic,
/// sorted by leading monomial. The result is canonical for the ideal and
/// order, so equal ideals yield structurally equal bases.
pub fn buchberger(generators: &[Polynomial], order: TermOrder) -> Vec<Polynomial> {
    let mut basis: Vec<Polynomial> = generators.iter().filter(|g| !g.is_zero()).cloned().collect();
    let mut pairs: Vec<(usize, usize)> = (0..basis.len())
        .flat_map(|i| (i + 1..basis.len()).map(move |j| (i, j)))
        .collect();
    while let Some((i, j)) = pairs.pop() {
        let (li, _) = leading(&basis[i], order).expect("nonzero");
        let (lj, _) = leading(&basis[j], order).expect("nonzero");
        if li.is_coprime_with(&lj) {
            continue;
        }
        let s = s_polynomial(&basis[i], &basis[j], order);
        let r = reduce_nf(&s, &basis, order);
        if !r.is_zero() {
            let k = basis.len();
            basis.push(r);
            pairs.extend((0..k).map(|i| (i, k)));
        }
    }
    reduce_basis(basis, order)
}

fn reduce_basis(mut basis: Vec<Polynomial>, order: TermOrder) -> Vec<Polynomial> {
    // Drop generators whose leading monomial another one divides.
    let mut keep: Vec<Polynomial> = Vec::new();
    'outer: for i in 0..basis.len() {
        let (li, _) = leading(&basis[i], order).expect("nonzero");
        for j in 0..basis.len() {
            if i == j {
                continue;
            }
            let (lj, _) = leading(&basis[j], order).expect("nonzero");
            if li.try_div(&lj).is_some() && (li != lj || j < i) {
                continue 'outer;
            }
        }
        keep.push(basis[i].clone());
    }
    basis = keep;
    // Inter-reduce tails and normalize to monic.
    let mut out: Vec<Polynomial> = Vec::with_capacity(basis.len());
    for i in 0..basis.len() {
        let others: Vec<Polynomial> = basis
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let r = reduce_nf(&basis[i], &others, order);
        if r.is_zero() {
            continue;
        }
        let (_, c) = leading(&r, order).expect("nonzero");
        out.push(r.scale(&c.recip()));
    }
    out.sort_by(|a, b| {
        let (la, _) = leading(a, order).expect("nonzero");
        let (lb, _) = leading(b, order).expect("nonzero");
        order.cmp(&la, &lb)
    });
    out
}

/// An ideal together with its Groebner basis under a fixed term order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealBasis {
    /// Original generators as supplied.
    pub generators: Vec<Polynomial>,
    /// Reduced Groebner basis of the ideal.
    pub groebner: Vec<Polynomial>,
    /// Order the basis was computed under.
    pub term_order: TermOrder,
}

impl IdealBasis {
    /// Computes the Groebner basis of the ideal spanned by `generators`.
    pub fn new(generators: Vec<Polynomial>, term_order: TermOrder) -> Self {
        let groebner = buchberger(&generators, term_order);
        IdealBasis { generators, groebner, term_order }
    }

    /// The trivial ideal `(0)`; its normal form is the identity.
    pub fn empty() -> Self {
        IdealBasis {
            generators: Vec::new(),
            groebner: Vec::new(),
            term_order: TermOrder::InverseBlock,
        }
    }

    /// True when the ideal has no generators.
    pub fn is_empty(&self) -> bool {
        self.groebner.is_empty()
    }

    /// Canonical normal form of `p` modulo the ideal.
    pub fn nf(&self, p: &Polynomial) -> Polynomial {
        if self.groebner.is_empty() {
            return p.clone();
        }
        reduce_nf(p, &self.groebner, self.term_order)
    }
}
