//! PDE systems, auxiliary variables, and the jet calculus connecting them.

use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use num_bigint::BigInt;

use crate::ideal::IdealBasis;
use crate::jet::JetVar;
use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::Coef;

/// Errors from constructing a [`PdeSystem`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SystemError {
    /// No equations were given.
    Empty,
    /// Number of names and number of right-hand sides differ.
    LengthMismatch { names: usize, equations: usize },
    /// The same state name appears twice.
    DuplicateName(String),
    /// A right-hand side references a variable outside the system.
    ForeignVariable { equation: usize, var: JetVar },
}

impl fmt::Display for SystemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemError::Empty => write!(f, "system has no equations"),
            SystemError::LengthMismatch { names, equations } => {
                write!(f, "{} state names for {} equations", names, equations)
            }
            SystemError::DuplicateName(n) => write!(f, "duplicate state name '{}'", n),
            SystemError::ForeignVariable { equation, var } => {
                write!(f, "equation {} references unknown variable {:?}", equation, var)
            }
        }
    }
}

impl std::error::Error for SystemError {}

/// A system of evolution equations `u_i,t = p_i` with polynomial right-hand
/// sides over the states and their spatial derivatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdeSystem {
    state_names: Vec<String>,
    rhs: Vec<Polynomial>,
    order: u32,
}

impl PdeSystem {
    /// Validates and builds a system. Right-hand sides may reference only
    /// base jets of the declared states.
    pub fn new(state_names: Vec<String>, rhs: Vec<Polynomial>) -> Result<Self, SystemError> {
        if rhs.is_empty() {
            return Err(SystemError::Empty);
        }
        if state_names.len() != rhs.len() {
            return Err(SystemError::LengthMismatch {
                names: state_names.len(),
                equations: rhs.len(),
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        for n in &state_names {
            if !seen.insert(n.clone()) {
                return Err(SystemError::DuplicateName(n.clone()));
            }
        }
        let n = state_names.len() as u32;
        for (i, p) in rhs.iter().enumerate() {
            for v in p.vars() {
                match v {
                    JetVar::Base { state, .. } if state < n => {}
                    _ => return Err(SystemError::ForeignVariable { equation: i, var: v }),
                }
            }
        }
        let order = rhs.iter().map(Polynomial::max_deriv_order).max().unwrap_or(0);
        Ok(PdeSystem { state_names, rhs, order })
    }

    /// Number of states.
    pub fn num_states(&self) -> usize {
        self.rhs.len()
    }

    /// Declared state names, in equation order.
    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    /// Right-hand sides, one per state.
    pub fn rhs(&self) -> &[Polynomial] {
        &self.rhs
    }

    /// Differential order: the highest spatial derivative on any right-hand
    /// side.
    pub fn order(&self) -> u32 {
        self.order
    }
}

/// A system of evolution equations with rational right-hand sides, the
/// direct output of parsing. Systems whose denominators are all `1` convert
/// to [`PdeSystem`] directly; the rest go through the rational lift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalSystem {
    state_names: Vec<String>,
    rhs: Vec<crate::rational::RationalFunction>,
}

impl RationalSystem {
    /// Validates and builds a rational system.
    pub fn new(
        state_names: Vec<String>,
        rhs: Vec<crate::rational::RationalFunction>,
    ) -> Result<Self, SystemError> {
        if rhs.is_empty() {
            return Err(SystemError::Empty);
        }
        if state_names.len() != rhs.len() {
            return Err(SystemError::LengthMismatch {
                names: state_names.len(),
                equations: rhs.len(),
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        for n in &state_names {
            if !seen.insert(n.clone()) {
                return Err(SystemError::DuplicateName(n.clone()));
            }
        }
        let n = state_names.len() as u32;
        for (i, r) in rhs.iter().enumerate() {
            for p in [r.numerator(), r.denominator()] {
                for v in p.vars() {
                    match v {
                        JetVar::Base { state, .. } if state < n => {}
                        _ => return Err(SystemError::ForeignVariable { equation: i, var: v }),
                    }
                }
            }
        }
        Ok(RationalSystem { state_names, rhs })
    }

    /// State names in equation order.
    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    /// Right-hand sides.
    pub fn rhs(&self) -> &[crate::rational::RationalFunction] {
        &self.rhs
    }

    /// True when every right-hand side is a polynomial.
    pub fn is_polynomial(&self) -> bool {
        self.rhs.iter().all(|r| r.is_polynomial())
    }

    /// Converts to a polynomial system when no denominators remain.
    pub fn to_polynomial(&self) -> Option<PdeSystem> {
        let rhs: Option<Vec<Polynomial>> =
            self.rhs.iter().map(|r| r.as_polynomial().cloned()).collect();
        Some(PdeSystem::new(self.state_names.clone(), rhs?).expect("validated at construction"))
    }
}

/// What an auxiliary variable stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AuxKind {
    /// A monomial in base jets and previously introduced auxiliaries.
    Monomial(Monomial),
    /// The inverse `1/f` of a polynomial in base jets.
    Inverse(Polynomial),
}

/// A registered auxiliary variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxDefinition {
    /// Index of the `JetVar::Aux` symbol this definition owns.
    pub id: u32,
    /// Defining expression.
    pub kind: AuxKind,
    /// Highest derivative order of a base variable inside the definition,
    /// counted through auxiliary references. Jets of this variable only make
    /// sense up to `k - deriv_cost` when verifying at order `k`.
    pub deriv_cost: u32,
}

/// Errors from [`ExtendedSystem::extend`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtendError {
    /// The definition duplicates an already registered auxiliary.
    Duplicate(String),
    /// The definition is constant, a bare variable, or otherwise not a
    /// useful auxiliary.
    Invalid(String),
    /// The definition references a variable the system does not know.
    ForeignVariable(String),
}

impl fmt::Display for ExtendError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendError::Duplicate(s) => write!(f, "duplicate auxiliary: {}", s),
            ExtendError::Invalid(s) => write!(f, "invalid auxiliary: {}", s),
            ExtendError::ForeignVariable(s) => {
                write!(f, "auxiliary references unknown variable: {}", s)
            }
        }
    }
}

impl std::error::Error for ExtendError {}

/// A PDE system together with registered auxiliary variables and, for
/// lifted rational systems, the ideal of inverse relations.
///
/// Invariants: every stored polynomial is reduced to normal form modulo the
/// ideal, and inverse symbols occur only at derivative order zero (spatial
/// derivatives of inverses are always expanded on the spot).
#[derive(Clone, Debug)]
pub struct ExtendedSystem {
    state_names: Vec<String>,
    state_rhs: Vec<Polynomial>,
    auxes: Vec<AuxDefinition>,
    aux_rhs: Vec<Polynomial>,
    ideal: Rc<IdealBasis>,
}

impl ExtendedSystem {
    /// Wraps a polynomial system with no auxiliaries.
    pub fn from_polynomial(sys: &PdeSystem) -> Self {
        ExtendedSystem {
            state_names: sys.state_names().to_vec(),
            state_rhs: sys.rhs().to_vec(),
            auxes: Vec::new(),
            aux_rhs: Vec::new(),
            ideal: Rc::new(IdealBasis::empty()),
        }
    }

    /// Direct constructor for the rational lift.
    pub(crate) fn from_parts(
        state_names: Vec<String>,
        state_rhs: Vec<Polynomial>,
        auxes: Vec<AuxDefinition>,
        aux_rhs: Vec<Polynomial>,
        ideal: IdealBasis,
    ) -> Self {
        ExtendedSystem {
            state_names,
            state_rhs,
            auxes,
            aux_rhs,
            ideal: Rc::new(ideal),
        }
    }

    /// State names in equation order.
    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    /// Number of states.
    pub fn num_states(&self) -> usize {
        self.state_rhs.len()
    }

    /// State right-hand sides (normal forms, over base and inverse symbols).
    pub fn state_rhs(&self) -> &[Polynomial] {
        &self.state_rhs
    }

    /// Registered auxiliaries in registration order: inverses from the lift
    /// first, then monomial auxiliaries.
    pub fn auxes(&self) -> &[AuxDefinition] {
        &self.auxes
    }

    /// Time derivatives of the registered auxiliaries, aligned with
    /// [`Self::auxes`].
    pub fn aux_rhs(&self) -> &[Polynomial] {
        &self.aux_rhs
    }

    /// Ideal of inverse relations; empty for polynomial systems.
    pub fn ideal(&self) -> &IdealBasis {
        &self.ideal
    }

    /// Differential order: the highest base-jet derivative across all
    /// right-hand sides, state and auxiliary alike.
    pub fn order(&self) -> u32 {
        self.state_rhs
            .iter()
            .chain(self.aux_rhs.iter())
            .flat_map(Polynomial::vars)
            .filter_map(|v| match v {
                JetVar::Base { order, .. } => Some(order),
                JetVar::Aux { .. } => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Derivative cost `c` of a monomial: the highest base derivative order
    /// it contains, counting auxiliary references at their own cost plus the
    /// jet order applied to them.
    pub fn deriv_cost(&self, m: &Monomial) -> u32 {
        m.vars()
            .map(|v| match v {
                JetVar::Base { order, .. } => order,
                JetVar::Aux { id, order } => {
                    order + self.auxes.get(id as usize).map(|a| a.deriv_cost).unwrap_or(0)
                }
            })
            .max()
            .unwrap_or(0)
    }

    /// Derivative cost of an auxiliary definition.
    pub fn aux_cost(&self, kind: &AuxKind) -> u32 {
        match kind {
            AuxKind::Monomial(m) => self.deriv_cost(m),
            AuxKind::Inverse(f) => f.max_deriv_order(),
        }
    }

    fn validate_kind(&self, kind: &AuxKind) -> Result<(), ExtendError> {
        match kind {
            AuxKind::Monomial(m) => {
                if m.is_one() {
                    return Err(ExtendError::Invalid("constant monomial".into()));
                }
                if m.is_single_var() {
                    return Err(ExtendError::Invalid(format!(
                        "bare variable {:?} is already a generator",
                        m.factors()[0].0
                    )));
                }
                for v in m.vars() {
                    match v {
                        JetVar::Base { state, .. } => {
                            if state as usize >= self.num_states() {
                                return Err(ExtendError::ForeignVariable(format!("{:?}", v)));
                            }
                        }
                        JetVar::Aux { id, .. } => {
                            if id as usize >= self.auxes.len() {
                                return Err(ExtendError::ForeignVariable(format!("{:?}", v)));
                            }
                        }
                    }
                }
                if self.auxes.iter().any(|a| matches!(&a.kind, AuxKind::Monomial(d) if d == m)) {
                    return Err(ExtendError::Duplicate(format!("{}", m)));
                }
                Ok(())
            }
            AuxKind::Inverse(f) => {
                if f.is_zero() || f.degree() == 0 {
                    return Err(ExtendError::Invalid("inverse of a constant".into()));
                }
                if f.vars().any(|v| !v.is_base()) {
                    return Err(ExtendError::Invalid(
                        "inverse definition must use base variables only".into(),
                    ));
                }
                if f.vars().any(|v| matches!(v, JetVar::Base { state, .. } if state as usize >= self.num_states())) {
                    return Err(ExtendError::ForeignVariable(format!("{}", f)));
                }
                if self.auxes.iter().any(|a| matches!(&a.kind, AuxKind::Inverse(g) if g == f)) {
                    return Err(ExtendError::Duplicate(format!("1/({})", f)));
                }
                Ok(())
            }
        }
    }

    /// Registers monomial auxiliaries, computing their time derivatives.
    ///
    /// The result is a new system whose auxiliary list grows by one entry
    /// per definition; duplicates and degenerate definitions are rejected.
    pub fn extend(&self, kinds: &[AuxKind]) -> Result<ExtendedSystem, ExtendError> {
        let mut out = self.clone();
        for kind in kinds {
            out.validate_kind(kind)?;
            let id = out.auxes.len() as u32;
            let cost = out.aux_cost(kind);
            let rhs = match kind {
                AuxKind::Monomial(m) => {
                    let mut ws = Workspace::new(&out);
                    ws.time_derivative_monomial(m).as_ref().clone()
                }
                AuxKind::Inverse(f) => {
                    let msg = format!(
                        "inverse auxiliaries are introduced by the rational lift, not extend: 1/({})",
                        f
                    );
                    return Err(ExtendError::Invalid(msg));
                }
            };
            out.auxes.push(AuxDefinition { id, kind: kind.clone(), deriv_cost: cost });
            out.aux_rhs.push(rhs);
        }
        Ok(out)
    }
}

/// Time derivative of the defining monomial of a candidate auxiliary,
/// expanded over base and inverse symbols and reduced to normal form.
pub fn time_derivative_monomial(sys: &ExtendedSystem, m: &Monomial) -> Polynomial {
    let mut ws = Workspace::new(sys);
    ws.time_derivative_monomial(m).as_ref().clone()
}

/// Time derivative of a registered inverse auxiliary `q = 1/f`, namely the
/// normal form of `-q^2 f_t`.
pub fn time_derivative_inverse(sys: &ExtendedSystem, id: u32) -> Polynomial {
    let mut ws = Workspace::new(sys);
    ws.time_derivative_inverse(id).as_ref().clone()
}

/// Key of a time-derivative right-hand side inside the workspace cache.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum RhsKey {
    State(u32),
    Aux(u32),
}

/// Memoized jet calculus over one extended system.
///
/// All expansions are cached by defining monomial or index, never by search
/// position, so identical candidates met on different branches of a search
/// share every polynomial computed here.
pub struct Workspace<'a> {
    sys: &'a ExtendedSystem,
    /// Expansion of the first spatial derivative of each inverse symbol.
    dq: Vec<Polynomial>,
    rhs_dx: BTreeMap<(RhsKey, u32), Rc<Polynomial>>,
    mono_jets: BTreeMap<(Monomial, u32), Rc<Polynomial>>,
    inv_jets: BTreeMap<(u32, u32), Rc<Polynomial>>,
    mono_dt: BTreeMap<Monomial, Rc<Polynomial>>,
    inv_dt: BTreeMap<u32, Rc<Polynomial>>,
}

impl<'a> Workspace<'a> {
    /// Builds a workspace, expanding the inverse derivative rules up front.
    pub fn new(sys: &'a ExtendedSystem) -> Self {
        let mut dq = Vec::new();
        for aux in sys.auxes() {
            if let AuxKind::Inverse(f) = &aux.kind {
                let q2 = Polynomial::monomial(Monomial::var(JetVar::aux(aux.id, 0)).pow(2));
                let d = &(-&f.diff_x()) * &q2;
                dq.push(sys.ideal().nf(&d));
            } else {
                dq.push(Polynomial::zero());
            }
        }
        Workspace {
            sys,
            dq,
            rhs_dx: BTreeMap::new(),
            mono_jets: BTreeMap::new(),
            inv_jets: BTreeMap::new(),
            mono_dt: BTreeMap::new(),
            inv_dt: BTreeMap::new(),
        }
    }

    /// The system this workspace computes over.
    pub fn system(&self) -> &'a ExtendedSystem {
        self.sys
    }

    /// Spatial derivative that keeps the system invariants: first
    /// derivatives of inverse symbols are replaced by their expansions and
    /// the result is reduced to normal form.
    pub fn diff_reduced(&self, p: &Polynomial) -> Polynomial {
        let mut d = p.diff_x();
        for (id, dq) in self.dq.iter().enumerate() {
            if dq.is_zero() {
                continue;
            }
            let sym = JetVar::aux(id as u32, 1);
            if d.vars().any(|v| v == sym) {
                d = d.substitute(sym, dq);
            }
        }
        self.sys.ideal().nf(&d)
    }

    /// `m`-th spatial derivative of the time derivative of a state or
    /// registered auxiliary.
    fn rhs_dx(&mut self, key: RhsKey, m: u32) -> Rc<Polynomial> {
        if let Some(p) = self.rhs_dx.get(&(key, m)) {
            return Rc::clone(p);
        }
        let p = if m == 0 {
            match key {
                RhsKey::State(s) => Rc::new(self.sys.state_rhs()[s as usize].clone()),
                RhsKey::Aux(id) => Rc::new(self.sys.aux_rhs()[id as usize].clone()),
            }
        } else {
            let prev = self.rhs_dx(key, m - 1);
            Rc::new(self.diff_reduced(&prev))
        };
        self.rhs_dx.insert((key, m), Rc::clone(&p));
        p
    }

    /// Expansion of the `m`-th jet of a monomial auxiliary with the given
    /// defining monomial.
    pub fn monomial_jet(&mut self, def: &Monomial, m: u32) -> Rc<Polynomial> {
        if let Some(p) = self.mono_jets.get(&(def.clone(), m)) {
            return Rc::clone(p);
        }
        let p = if m == 0 {
            Rc::new(self.sys.ideal().nf(&Polynomial::monomial(def.clone())))
        } else {
            let prev = self.monomial_jet(def, m - 1);
            Rc::new(self.diff_reduced(&prev))
        };
        self.mono_jets.insert((def.clone(), m), Rc::clone(&p));
        p
    }

    /// Expansion of the `m`-th jet of a registered inverse auxiliary: the
    /// symbol itself at order zero, expanded derivatives above.
    pub fn inverse_jet(&mut self, id: u32, m: u32) -> Rc<Polynomial> {
        if let Some(p) = self.inv_jets.get(&(id, m)) {
            return Rc::clone(p);
        }
        let p = if m == 0 {
            Rc::new(Polynomial::var(JetVar::aux(id, 0)))
        } else {
            let prev = self.inverse_jet(id, m - 1);
            Rc::new(self.diff_reduced(&prev))
        };
        self.inv_jets.insert((id, m), Rc::clone(&p));
        p
    }

    /// Time derivative of a defining monomial via the chain rule.
    pub fn time_derivative_monomial(&mut self, def: &Monomial) -> Rc<Polynomial> {
        if let Some(p) = self.mono_dt.get(def) {
            return Rc::clone(p);
        }
        let mut acc = Polynomial::zero();
        for &(v, e) in def.factors() {
            let rest = def.try_div(&Monomial::var(v)).expect("factor divides its monomial");
            let dt = match v {
                JetVar::Base { state, order } => self.rhs_dx(RhsKey::State(state), order),
                JetVar::Aux { id, order } => self.rhs_dx(RhsKey::Aux(id), order),
            };
            let term = dt.mul_mon(&rest).scale(&Coef::from(BigInt::from(e)));
            acc = &acc + &term;
        }
        let p = Rc::new(self.sys.ideal().nf(&acc));
        self.mono_dt.insert(def.clone(), Rc::clone(&p));
        p
    }

    /// Time derivative of a registered inverse auxiliary: `-q^2 f_t`
    /// in normal form, with `f_t` obtained by the chain rule on `f`.
    pub fn time_derivative_inverse(&mut self, id: u32) -> Rc<Polynomial> {
        if let Some(p) = self.inv_dt.get(&id) {
            return Rc::clone(p);
        }
        let f = match &self.sys.auxes()[id as usize].kind {
            AuxKind::Inverse(f) => f.clone(),
            AuxKind::Monomial(_) => panic!("auxiliary {} is not an inverse", id),
        };
        let mut ft = Polynomial::zero();
        for v in f.vars().collect::<Vec<_>>() {
            let (state, order) = match v {
                JetVar::Base { state, order } => (state, order),
                JetVar::Aux { .. } => unreachable!("inverse definitions are base-only"),
            };
            let dfdv = f.partial(v);
            let dt = self.rhs_dx(RhsKey::State(state), order);
            ft = &ft + &(&dfdv * &dt);
        }
        let q2 = Polynomial::monomial(Monomial::var(JetVar::aux(id, 0)).pow(2));
        let p = Rc::new(self.sys.ideal().nf(&(&(-&q2) * &ft)));
        self.inv_dt.insert(id, Rc::clone(&p));
        p
    }
}
