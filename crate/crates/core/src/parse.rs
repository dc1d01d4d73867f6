//! Text format for systems.
//!
//! One equation per line, `name_t = expression`; `param name = value` lines
//! declare rational constants usable in later lines; `#` starts a comment.
//! Expressions use `+ - * / ^` with the usual precedence, parentheses, and
//! unary minus. Exponents are positive integer literals. Decimal literals
//! are exact (`0.1` is one tenth). A state's spatial derivatives are spelled
//! with an `_x..` suffix: `u_x`, `u_xx`, and so on.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::jet::JetVar;
use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::rational::RationalFunction;
use crate::system::RationalSystem;
use crate::Coef;

/// A syntax or resolution error, located in the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based line.
    pub line: usize,
    /// 1-based column.
    pub col: usize,
    /// What went wrong.
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

fn fail<T>(line: usize, col: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, col, message: message.into() })
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(Coef),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Equals,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("`{}`", name),
            Tok::Num(_) => "a number".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Equals => "`=`".into(),
        }
    }
}

struct Lexed {
    tok: Tok,
    col: usize,
}

fn lex_line(raw: &str, line: usize) -> Result<Vec<Lexed>, ParseError> {
    let mut out = Vec::new();
    let bytes = raw.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let col = i + 1;
        let c = bytes[i] as char;
        match c {
            '#' => break,
            ' ' | '\t' | '\r' => i += 1,
            '+' => {
                out.push(Lexed { tok: Tok::Plus, col });
                i += 1;
            }
            '-' => {
                out.push(Lexed { tok: Tok::Minus, col });
                i += 1;
            }
            '*' => {
                out.push(Lexed { tok: Tok::Star, col });
                i += 1;
            }
            '/' => {
                out.push(Lexed { tok: Tok::Slash, col });
                i += 1;
            }
            '^' => {
                out.push(Lexed { tok: Tok::Caret, col });
                i += 1;
            }
            '(' => {
                out.push(Lexed { tok: Tok::LParen, col });
                i += 1;
            }
            ')' => {
                out.push(Lexed { tok: Tok::RParen, col });
                i += 1;
            }
            '=' => {
                out.push(Lexed { tok: Tok::Equals, col });
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let int_part = &raw[start..i];
                let mut frac_part = "";
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    let fstart = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    frac_part = &raw[fstart..i];
                    if frac_part.is_empty() {
                        return fail(line, col, "expected digits after the decimal point");
                    }
                }
                let digits: BigInt = format!("{}{}", int_part, frac_part).parse().unwrap();
                let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
                out.push(Lexed { tok: Tok::Num(Coef::new(digits, scale)), col });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push(Lexed { tok: Tok::Ident(raw[start..i].to_string()), col });
            }
            other => return fail(line, col, format!("unexpected character `{}`", other)),
        }
    }
    Ok(out)
}

/// What identifiers may mean in the current context.
struct Scope<'a> {
    params: &'a BTreeMap<String, Coef>,
    states: Option<&'a BTreeMap<String, u32>>,
}

impl Scope<'_> {
    fn resolve(&self, name: &str) -> Option<RationalFunction> {
        if let Some(value) = self.params.get(name) {
            return Some(RationalFunction::from_poly(Polynomial::constant(value.clone())));
        }
        let states = self.states?;
        if let Some(&idx) = states.get(name) {
            let var = JetVar::base(idx, 0);
            return Some(RationalFunction::from_poly(Polynomial::var(var)));
        }
        let (base, suffix) = name.rsplit_once('_')?;
        if suffix.is_empty() || !suffix.bytes().all(|b| b == b'x') {
            return None;
        }
        let &idx = states.get(base)?;
        let var = JetVar::base(idx, suffix.len() as u32);
        Some(RationalFunction::from_poly(Polynomial::var(var)))
    }
}

struct Cursor<'a> {
    toks: &'a [Lexed],
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Lexed> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<&'a Lexed> {
        let t = self.toks.get(self.pos);
        self.pos += t.is_some() as usize;
        t
    }

    /// Column just past the last token, for end-of-line errors.
    fn end_col(&self) -> usize {
        self.toks.last().map_or(1, |t| t.col + 1)
    }

    fn expr(&mut self, scope: &Scope<'_>) -> Result<RationalFunction, ParseError> {
        let mut acc = self.term(scope)?;
        while let Some(t) = self.peek() {
            match t.tok {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.term(scope)?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(&self.term(scope)?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self, scope: &Scope<'_>) -> Result<RationalFunction, ParseError> {
        let mut acc = self.factor(scope)?;
        while let Some(t) = self.peek() {
            match t.tok {
                Tok::Star => {
                    self.bump();
                    acc = acc.mul(&self.factor(scope)?);
                }
                Tok::Slash => {
                    let col = t.col;
                    self.bump();
                    let rhs = self.factor(scope)?;
                    acc = match acc.div(&rhs) {
                        Ok(q) => q,
                        Err(_) => return fail(self.line, col, "division by zero"),
                    };
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self, scope: &Scope<'_>) -> Result<RationalFunction, ParseError> {
        if let Some(t) = self.peek() {
            if t.tok == Tok::Minus {
                self.bump();
                return Ok(self.factor(scope)?.neg());
            }
        }
        let base = self.atom(scope)?;
        if let Some(t) = self.peek() {
            if t.tok == Tok::Caret {
                self.bump();
                let (exp_col, exp) = match self.bump() {
                    Some(Lexed { tok: Tok::Num(c), col }) => (*col, c.clone()),
                    Some(other) => {
                        return fail(self.line, other.col, "exponent must be a positive integer")
                    }
                    None => {
                        return fail(
                            self.line,
                            self.end_col(),
                            "exponent must be a positive integer",
                        )
                    }
                };
                if !exp.is_integer() {
                    return fail(self.line, exp_col, "exponent must be a positive integer");
                }
                let Some(e) = exp.numer().to_u32().filter(|&e| e >= 1) else {
                    return fail(self.line, exp_col, "exponent must be a positive integer");
                };
                return Ok(base.pow(e));
            }
        }
        Ok(base)
    }

    fn atom(&mut self, scope: &Scope<'_>) -> Result<RationalFunction, ParseError> {
        match self.bump() {
            Some(Lexed { tok: Tok::Num(c), .. }) => {
                Ok(RationalFunction::from_poly(Polynomial::constant(c.clone())))
            }
            Some(Lexed { tok: Tok::Ident(name), col }) => match scope.resolve(name) {
                Some(value) => Ok(value),
                None => fail(self.line, *col, format!("unknown variable `{}`", name)),
            },
            Some(Lexed { tok: Tok::LParen, .. }) => {
                let inner = self.expr(scope)?;
                match self.bump() {
                    Some(Lexed { tok: Tok::RParen, .. }) => Ok(inner),
                    Some(other) => fail(self.line, other.col, "expected `)`"),
                    None => fail(self.line, self.end_col(), "expected `)`"),
                }
            }
            Some(other) => fail(
                self.line,
                other.col,
                format!("expected a value, found {}", other.tok.describe()),
            ),
            None => fail(self.line, self.end_col(), "expected a value"),
        }
    }

    fn finish(&mut self, value: RationalFunction) -> Result<RationalFunction, ParseError> {
        match self.peek() {
            None => Ok(value),
            Some(t) => fail(
                self.line,
                t.col,
                format!("unexpected {} after the expression", t.tok.describe()),
            ),
        }
    }
}

enum Statement<'a> {
    Param {
        name: &'a str,
        name_col: usize,
        rhs: &'a [Lexed],
    },
    Equation {
        state: String,
        rhs: &'a [Lexed],
    },
}

fn classify(toks: &[Lexed], line: usize) -> Result<Statement<'_>, ParseError> {
    let Lexed { tok: Tok::Ident(head), col: head_col } = &toks[0] else {
        return fail(line, toks[0].col, "expected an equation or a `param` line");
    };
    if head == "param" {
        if let Some(Lexed { tok: Tok::Ident(name), col: name_col }) = toks.get(1) {
            match toks.get(2) {
                Some(Lexed { tok: Tok::Equals, .. }) => {}
                Some(other) => return fail(line, other.col, "expected `=`"),
                None => return fail(line, name_col + name.len(), "expected `=`"),
            }
            return Ok(Statement::Param { name, name_col: *name_col, rhs: &toks[3..] });
        }
    }
    let Some(state) = head.strip_suffix("_t") else {
        return fail(
            line,
            *head_col,
            format!("expected a time derivative like `{}_t` on the left", head),
        );
    };
    if state.is_empty() {
        return fail(line, *head_col, "missing a state name before `_t`");
    }
    match toks.get(1) {
        Some(Lexed { tok: Tok::Equals, .. }) => {}
        Some(other) => return fail(line, other.col, "expected `=`"),
        None => return fail(line, head_col + head.len(), "expected `=`"),
    }
    Ok(Statement::Equation { state: state.to_string(), rhs: &toks[2..] })
}

/// Parses a system from its text form.
pub fn parse(input: &str) -> Result<RationalSystem, ParseError> {
    let mut lines = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let toks = lex_line(raw, i + 1)?;
        if !toks.is_empty() {
            lines.push((i + 1, toks));
        }
    }

    // First pass: collect state names so equations may reference states
    // defined further down.
    let mut state_names: Vec<String> = Vec::new();
    let mut state_index: BTreeMap<String, u32> = BTreeMap::new();
    for (line, toks) in &lines {
        if let Statement::Equation { state, .. } = classify(toks, *line)? {
            if state_index.contains_key(&state) {
                return fail(*line, toks[0].col, format!("duplicate equation for `{}`", state));
            }
            state_index.insert(state.clone(), state_names.len() as u32);
            state_names.push(state);
        }
    }
    if state_names.is_empty() {
        return fail(1, 1, "input contains no equations");
    }

    // Second pass: evaluate. Parameters only apply to later lines.
    let mut params: BTreeMap<String, Coef> = BTreeMap::new();
    let mut rhs: Vec<Option<RationalFunction>> = vec![None; state_names.len()];
    for (line, toks) in &lines {
        match classify(toks, *line)? {
            Statement::Param { name, name_col, rhs: value_toks } => {
                if params.contains_key(name) {
                    return fail(*line, name_col, format!("duplicate parameter `{}`", name));
                }
                if state_index.contains_key(name) {
                    return fail(
                        *line,
                        name_col,
                        format!("parameter `{}` collides with a state", name),
                    );
                }
                let scope = Scope { params: &params, states: None };
                let mut cur = Cursor { toks: value_toks, pos: 0, line: *line };
                let value = cur.expr(&scope)?;
                let value = cur.finish(value)?;
                let constant = match value.as_polynomial() {
                    Some(p) if p.degree() == 0 => p.coefficient(&Monomial::one()),
                    _ => return fail(*line, name_col, "parameter value must be constant"),
                };
                params.insert(name.to_string(), constant);
            }
            Statement::Equation { state, rhs: expr_toks } => {
                let scope = Scope { params: &params, states: Some(&state_index) };
                let mut cur = Cursor { toks: expr_toks, pos: 0, line: *line };
                let value = cur.expr(&scope)?;
                let value = cur.finish(value)?;
                rhs[state_index[&state] as usize] = Some(value);
            }
        }
    }

    let rhs: Vec<RationalFunction> = rhs.into_iter().map(Option::unwrap).collect();
    RationalSystem::new(state_names, rhs).map_err(|e| ParseError {
        line: 1,
        col: 1,
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const U: JetVar = JetVar::Base { state: 0, order: 0 };
    const UX: JetVar = JetVar::Base { state: 0, order: 1 };
    const UXX: JetVar = JetVar::Base { state: 0, order: 2 };
    const UXXX: JetVar = JetVar::Base { state: 0, order: 3 };

    fn mono(powers: &[(JetVar, u32)]) -> Monomial {
        Monomial::from_powers(powers.iter().copied())
    }

    fn poly(terms: &[(i64, &[(JetVar, u32)])]) -> Polynomial {
        Polynomial::from_terms(terms.iter().map(|&(c, ps)| (mono(ps), Coef::from(BigInt::from(c)))))
    }

    #[test]
    fn polynomial_equation() {
        let sys = parse("u_t = u*u_x + u_xx\n").unwrap();
        assert_eq!(sys.state_names(), ["u"]);
        assert!(sys.is_polynomial());
        assert_eq!(
            sys.rhs()[0].as_polynomial().unwrap(),
            &poly(&[(1, &[(U, 1), (UX, 1)]), (1, &[(UXX, 1)])])
        );
    }

    #[test]
    fn params_and_exact_decimals() {
        let sys = parse("param eps = 0.1\nparam half = eps*5\nu_t = half*u_xx").unwrap();
        let expected = Polynomial::from_terms(
            [(mono(&[(UXX, 1)]), Coef::new(BigInt::from(1), BigInt::from(2)))].into_iter(),
        );
        assert_eq!(sys.rhs()[0].as_polynomial().unwrap(), &expected);
    }

    #[test]
    fn rational_right_hand_side() {
        let sys = parse("u_t = u_xxx/u").unwrap();
        assert!(!sys.is_polynomial());
        assert_eq!(sys.rhs()[0].numerator(), &poly(&[(1, &[(UXXX, 1)])]));
        assert_eq!(sys.rhs()[0].denominator(), &poly(&[(1, &[(U, 1)])]));
    }

    #[test]
    fn states_in_order_of_appearance_with_forward_references() {
        let sys = parse("v_t = u - v\nu_t = -v_x^2").unwrap();
        assert_eq!(sys.state_names(), ["v", "u"]);
        let v = JetVar::base(0, 0);
        let u = JetVar::base(1, 0);
        let vx = JetVar::base(0, 1);
        let expected_v = &Polynomial::var(u) - &Polynomial::var(v);
        let expected_u = Polynomial::from_terms(
            [(Monomial::var(vx).pow(2), Coef::from(BigInt::from(-1)))].into_iter(),
        );
        assert_eq!(sys.rhs()[0].as_polynomial().unwrap(), &expected_v);
        assert_eq!(sys.rhs()[1].as_polynomial().unwrap(), &expected_u);
    }

    #[test]
    fn precedence_and_unary_minus() {
        let sys = parse("u_t = -u^2 + 2*u - 1/2").unwrap();
        let minus_half = Coef::new(BigInt::from(-1), BigInt::from(2));
        let expected = Polynomial::from_terms(
            [
                (mono(&[(U, 2)]), Coef::from(BigInt::from(-1))),
                (mono(&[(U, 1)]), Coef::from(BigInt::from(2))),
                (Monomial::one(), minus_half),
            ]
            .into_iter(),
        );
        assert_eq!(sys.rhs()[0].as_polynomial().unwrap(), &expected);
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let sys = parse("# heat\n\nu_t = u_xx  # diffusion\n").unwrap();
        assert_eq!(sys.rhs()[0].as_polynomial().unwrap(), &poly(&[(1, &[(UXX, 1)])]));
    }

    #[test]
    fn error_positions() {
        let e = parse("u_t = u + y").unwrap_err();
        assert_eq!((e.line, e.col), (1, 11));
        assert!(e.message.contains("unknown variable `y`"));

        let e = parse("u_t = u\nv_t = v ++ v").unwrap_err();
        assert_eq!((e.line, e.col), (2, 10));

        let e = parse("u_t = u^0").unwrap_err();
        assert_eq!((e.line, e.col), (1, 9));
        assert!(e.message.contains("positive integer"));

        let e = parse("u_t = u^(2)").unwrap_err();
        assert_eq!((e.line, e.col), (1, 9));

        let e = parse("u_t = u$").unwrap_err();
        assert_eq!((e.line, e.col), (1, 8));

        let e = parse("u_t = a*u\nparam a = 1").unwrap_err();
        assert_eq!((e.line, e.col), (1, 7));
        assert!(e.message.contains("unknown variable `a`"));
    }

    #[test]
    fn structural_errors() {
        assert!(parse("").unwrap_err().message.contains("no equations"));
        assert!(parse("# only a comment\n").unwrap_err().message.contains("no equations"));

        let e = parse("u = u_x").unwrap_err();
        assert!(e.message.contains("time derivative"));

        let e = parse("u_t = u\nu_t = 2*u").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("duplicate equation"));

        let e = parse("param a = 1\nparam a = 2\nu_t = a*u").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("duplicate parameter"));

        let e = parse("u_t u_x").unwrap_err();
        assert!(e.message.contains("expected `=`"));

        let e = parse("u_t = 1/(u - u)").unwrap_err();
        assert_eq!((e.line, e.col), (1, 8));
        assert!(e.message.contains("division by zero"));
    }

    #[test]
    fn multicharacter_states_and_jets() {
        let sys = parse("phi_t = phi_xx - phi").unwrap();
        assert_eq!(sys.state_names(), ["phi"]);
        let expected = &Polynomial::var(JetVar::base(0, 2)) - &Polynomial::var(JetVar::base(0, 0));
        assert_eq!(sys.rhs()[0].as_polynomial().unwrap(), &expected);
    }
}
