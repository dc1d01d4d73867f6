//! Rendering with user-facing names.
//!
//! Internal display uses positional names (`x0'2`); everything shown to the
//! user goes through a [`Namer`], which knows the state names and labels
//! auxiliaries `q1..` (inverses) and `w1..` (monomials). Jets append one
//! `x` per derivative: `u_xx`, `w1_x`. Terms are written highest monomial
//! first, factors in ascending variable order, exact coefficients as `a/b`.

use std::collections::BTreeMap;

use num_traits::{One, Signed};

use crate::jet::JetVar;
use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::rational::RationalFunction;
use crate::system::{AuxDefinition, AuxKind};

/// Maps jet variables to display names.
#[derive(Clone, Debug)]
pub struct Namer {
    state_names: Vec<String>,
    aux_labels: BTreeMap<u32, String>,
}

impl Namer {
    /// Builds a namer for a system's states and auxiliary definitions.
    /// Inverse auxiliaries are labeled `q1, q2, ..` and monomial ones
    /// `w1, w2, ..`, each numbered in id order.
    pub fn new(state_names: &[String], auxes: &[AuxDefinition]) -> Self {
        let mut aux_labels = BTreeMap::new();
        let mut inverses = 0;
        let mut monomials = 0;
        for def in auxes {
            let label = match def.kind {
                AuxKind::Inverse(_) => {
                    inverses += 1;
                    format!("q{}", inverses)
                }
                AuxKind::Monomial(_) => {
                    monomials += 1;
                    format!("w{}", monomials)
                }
            };
            aux_labels.insert(def.id, label);
        }
        Namer { state_names: state_names.to_vec(), aux_labels }
    }

    /// Display name of one jet variable.
    pub fn var(&self, v: JetVar) -> String {
        let (stem, order) = match v {
            JetVar::Base { state, order } => (self.state_names[state as usize].as_str(), order),
            JetVar::Aux { id, order } => (self.aux_labels[&id].as_str(), order),
        };
        if order == 0 {
            stem.to_string()
        } else {
            format!("{}_{}", stem, "x".repeat(order as usize))
        }
    }

    /// `name_t` for a state equation's left side.
    pub fn state_lhs(&self, state: u32) -> String {
        format!("{}_t", self.state_names[state as usize])
    }

    /// `label_t` for an auxiliary equation's left side.
    pub fn aux_lhs(&self, id: u32) -> String {
        format!("{}_t", self.aux_labels[&id])
    }

    /// Factors ascending, `*`-separated, `^` powers; `1` when empty.
    pub fn monomial(&self, m: &Monomial) -> String {
        if m.is_one() {
            return "1".to_string();
        }
        m.factors()
            .iter()
            .map(|&(v, e)| {
                if e == 1 {
                    self.var(v)
                } else {
                    format!("{}^{}", self.var(v), e)
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Terms highest first, with signs between them.
    pub fn poly(&self, p: &Polynomial) -> String {
        if p.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in p.terms().rev().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if m.is_one() {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&self.monomial(m));
            } else {
                out.push_str(&format!("{}*{}", abs, self.monomial(m)));
            }
        }
        out
    }

    /// `num/den`, parenthesized only where reparsing would regroup.
    pub fn rational(&self, r: &RationalFunction) -> String {
        if let Some(p) = r.as_polynomial() {
            return self.poly(p);
        }
        let num = self.poly(r.numerator());
        let num = if r.numerator().len() > 1 {
            format!("({})", num)
        } else {
            num
        };
        format!("{}/{}", num, self.denominator(r.denominator()))
    }

    fn denominator(&self, den: &Polynomial) -> String {
        let bare = den.len() == 1
            && den.terms().next().map_or(false, |(m, c)| c.is_one() && m.factors().len() == 1);
        if bare {
            self.poly(den)
        } else {
            format!("({})", self.poly(den))
        }
    }

    /// `w1 = u^2` or `q1 = 1/u`.
    pub fn aux_definition(&self, def: &AuxDefinition) -> String {
        match &def.kind {
            AuxKind::Monomial(m) => format!("{} = {}", self.aux_labels[&def.id], self.monomial(m)),
            AuxKind::Inverse(f) => {
                format!("{} = 1/{}", self.aux_labels[&def.id], self.denominator(f))
            }
        }
    }
}
