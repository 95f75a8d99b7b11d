//! Unimodal propositional formulas: syntax tree, parser and printer.
//!
//! Surface syntax, tightest first: `!`, `[]`, `<>` (prefix); conjunction by
//! juxtaposition or `&`; disjunction `+`; then `->` and `<->`, which share
//! the loosest level and associate to the right.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Const0,
    Const1,
    Var(u32),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Box(Box<Formula>),
    Diamond(Box<Formula>),
}

impl Formula {
    pub fn var(i: u32) -> Self {
        Formula::Var(i)
    }

    pub fn not(a: Formula) -> Self {
        Formula::Not(Box::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn boxed(a: Formula) -> Self {
        Formula::Box(Box::new(a))
    }

    pub fn diamond(a: Formula) -> Self {
        Formula::Diamond(Box::new(a))
    }

    /// Left-nested conjunction; the empty conjunction is `1`.
    pub fn and_all<I: IntoIterator<Item = Formula>>(it: I) -> Self {
        it.into_iter().reduce(Formula::and).unwrap_or(Formula::Const1)
    }

    /// Left-nested disjunction; the empty disjunction is `0`.
    pub fn or_all<I: IntoIterator<Item = Formula>>(it: I) -> Self {
        it.into_iter().reduce(Formula::or).unwrap_or(Formula::Const0)
    }

    /// One more than the largest variable index, or 0 for a closed formula.
    pub fn variables(&self) -> u32 {
        match self {
            Formula::Const0 | Formula::Const1 => 0,
            Formula::Var(i) => i + 1,
            Formula::Not(a) | Formula::Box(a) | Formula::Diamond(a) => a.variables(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.variables().max(b.variables())
            }
        }
    }

    pub fn modal_degree(&self) -> u32 {
        match self {
            Formula::Const0 | Formula::Const1 | Formula::Var(_) => 0,
            Formula::Not(a) => a.modal_degree(),
            Formula::Box(a) | Formula::Diamond(a) => 1 + a.modal_degree(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.modal_degree().max(b.modal_degree())
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Const0 | Formula::Const1 | Formula::Var(_) => 1,
            Formula::Not(a) | Formula::Box(a) | Formula::Diamond(a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Replaces every `Var(i)` by `f(i)`.
    pub fn map_vars(&self, f: &impl Fn(u32) -> Formula) -> Formula {
        let bin = |a: &Formula, b: &Formula, k: fn(Box<Formula>, Box<Formula>) -> Formula| {
            k(Box::new(a.map_vars(f)), Box::new(b.map_vars(f)))
        };
        match self {
            Formula::Const0 => Formula::Const0,
            Formula::Const1 => Formula::Const1,
            Formula::Var(i) => f(*i),
            Formula::Not(a) => Formula::not(a.map_vars(f)),
            Formula::Box(a) => Formula::boxed(a.map_vars(f)),
            Formula::Diamond(a) => Formula::diamond(a.map_vars(f)),
            Formula::And(a, b) => bin(a, b, Formula::And),
            Formula::Or(a, b) => bin(a, b, Formula::Or),
            Formula::Implies(a, b) => bin(a, b, Formula::Implies),
            Formula::Iff(a, b) => bin(a, b, Formula::Iff),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Implies(..) | Formula::Iff(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(_) | Formula::Box(_) | Formula::Diamond(_) => 4,
            Formula::Const0 | Formula::Const1 | Formula::Var(_) => 5,
        }
    }
}

/// Printable name of variable `i`: `p q r s`, then `p4`, `p5`, ...
pub fn var_name(i: u32) -> String {
    match i {
        0 => "p".into(),
        1 => "q".into(),
        2 => "r".into(),
        3 => "s".into(),
        _ => format!("p{i}"),
    }
}

/// Compact rendering with minimal parentheses; `parse(render(f)) == f`.
pub fn render(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, &mut out);
    out
}

fn write_child(f: &Formula, parens: bool, out: &mut String) {
    if parens {
        out.push('(');
        write_formula(f, out);
        out.push(')');
    } else {
        write_formula(f, out);
    }
}

fn write_formula(f: &Formula, out: &mut String) {
    let p = f.prec();
    match f {
        Formula::Const0 => out.push('0'),
        Formula::Const1 => out.push('1'),
        Formula::Var(i) => out.push_str(&var_name(*i)),
        Formula::Not(a) | Formula::Box(a) | Formula::Diamond(a) => {
            out.push_str(match f {
                Formula::Not(_) => "!",
                Formula::Box(_) => "[]",
                _ => "<>",
            });
            write_child(a, a.prec() < p, out);
        }
        Formula::And(a, b) => {
            write_child(a, a.prec() < p, out);
            let mut rhs = String::new();
            write_child(b, b.prec() <= p, &mut rhs);
            // "p" followed by "1" would lex as the variable p1
            if rhs.starts_with(|c: char| c.is_ascii_digit()) {
                out.push('&');
            }
            out.push_str(&rhs);
        }
        Formula::Or(a, b) => {
            write_child(a, a.prec() < p, out);
            out.push('+');
            write_child(b, b.prec() <= p, out);
        }
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            write_child(a, a.prec() <= p, out);
            out.push_str(if matches!(f, Formula::Implies(..)) { "->" } else { "<->" });
            write_child(b, b.prec() < p, out);
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const0 => write!(f, "Const0"),
            Formula::Const1 => write!(f, "Const1"),
            Formula::Var(i) => write!(f, "{}", var_name(*i)),
            Formula::Not(a) => write!(f, "Not({a:?})"),
            Formula::Box(a) => write!(f, "Box({a:?})"),
            Formula::Diamond(a) => write!(f, "Diamond({a:?})"),
            Formula::And(a, b) => write!(f, "And({a:?}, {b:?})"),
            Formula::Or(a, b) => write!(f, "Or({a:?}, {b:?})"),
            Formula::Implies(a, b) => write!(f, "Implies({a:?}, {b:?})"),
            Formula::Iff(a, b) => write!(f, "Iff({a:?}, {b:?})"),
        }
    }
}

impl std::str::FromStr for Formula {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok {
    Zero,
    One,
    Var(u32),
    Not,
    Box,
    Dia,
    And,
    Or,
    Imp,
    Iff,
    LParen,
    RParen,
    CycSum,
    CycProd,
    End,
}

fn lex(src: &str, macros: bool) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let rest = &src[i..];
        let c = rest.chars().next().unwrap_or('\0');
        let start = i;
        let (tok, width) = match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '0' => (Tok::Zero, 1),
            '1' => (Tok::One, 1),
            '!' => (Tok::Not, 1),
            '&' => (Tok::And, 1),
            '+' => (Tok::Or, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            'q' => (Tok::Var(1), 1),
            'r' => (Tok::Var(2), 1),
            's' => (Tok::Var(3), 1),
            'p' => {
                let digits = rest[1..].bytes().take_while(u8::is_ascii_digit).count();
                if digits == 0 {
                    (Tok::Var(0), 1)
                } else {
                    let n: u32 = rest[1..1 + digits].parse().map_err(|_| Error::Syntax {
                        offset: start,
                        message: "variable index too large".into(),
                    })?;
                    (Tok::Var(n), 1 + digits)
                }
            }
            _ if rest.starts_with("[]") => (Tok::Box, 2),
            _ if rest.starts_with("<>") => (Tok::Dia, 2),
            _ if rest.starts_with("->") => (Tok::Imp, 2),
            _ if rest.starts_with("<->") => (Tok::Iff, 3),
            _ if macros && rest.starts_with("Σ°") => (Tok::CycSum, "Σ°".len()),
            _ if macros && rest.starts_with("∏°") => (Tok::CycProd, "∏°".len()),
            '[' | '<' | '-' => {
                return Err(Error::Syntax { offset: start, message: format!("incomplete operator starting with {c:?}") })
            }
            _ => return Err(Error::UnknownToken { offset: start, found: c }),
        };
        toks.push((tok, start));
        i += width;
    }
    toks.push((Tok::End, src.len()));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Tok {
        self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.peek();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: &str) -> Result<T> {
        Err(Error::Syntax { offset: self.offset(), message: message.into() })
    }

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        match self.peek() {
            Tok::Imp => {
                self.bump();
                Ok(Formula::implies(lhs, self.formula()?))
            }
            Tok::Iff => {
                self.bump();
                Ok(Formula::iff(lhs, self.formula()?))
            }
            _ => Ok(lhs),
        }
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut acc = self.conjunction()?;
        while self.peek() == Tok::Or {
            self.bump();
            acc = Formula::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn starts_factor(t: Tok) -> bool {
        matches!(
            t,
            Tok::Zero | Tok::One | Tok::Var(_) | Tok::Not | Tok::Box | Tok::Dia | Tok::LParen | Tok::CycSum | Tok::CycProd
        )
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut acc: Option<Formula> = None;
        loop {
            let factor = match self.peek() {
                Tok::CycSum | Tok::CycProd => {
                    // a cyclic macro swallows the rest of the product
                    let sum = self.bump() == Tok::CycSum;
                    let body = self.conjunction()?;
                    let rots = [rotate(&body, 0), rotate(&body, 1), rotate(&body, 2)];
                    let f = if sum { Formula::or_all(rots) } else { Formula::and_all(rots) };
                    acc = Some(match acc {
                        Some(a) => Formula::and(a, f),
                        None => f,
                    });
                    return Ok(acc.unwrap_or(Formula::Const1));
                }
                _ => self.unary()?,
            };
            acc = Some(match acc {
                Some(a) => Formula::and(a, factor),
                None => factor,
            });
            match self.peek() {
                Tok::And => {
                    self.bump();
                    if !Self::starts_factor(self.peek()) {
                        return self.err("expected an operand after '&'");
                    }
                }
                t if Self::starts_factor(t) => {}
                _ => break,
            }
        }
        Ok(acc.unwrap_or(Formula::Const1))
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.bump() {
            Tok::Not => Ok(Formula::not(self.unary()?)),
            Tok::Box => Ok(Formula::boxed(self.unary()?)),
            Tok::Dia => Ok(Formula::diamond(self.unary()?)),
            Tok::Zero => Ok(Formula::Const0),
            Tok::One => Ok(Formula::Const1),
            Tok::Var(i) => Ok(Formula::Var(i)),
            Tok::LParen => {
                let inner = self.formula()?;
                if self.peek() != Tok::RParen {
                    return self.err("expected ')'");
                }
                self.bump();
                Ok(inner)
            }
            Tok::End => {
                self.pos = self.toks.len() - 1;
                self.err("unexpected end of input")
            }
            _ => {
                self.pos -= 1;
                self.err("expected an operand")
            }
        }
    }
}

/// Rotates the first three variables `k` steps: one step maps p→q, q→r, r→p.
fn rotate(f: &Formula, k: u32) -> Formula {
    f.map_vars(&|i| if i < 3 { Formula::Var((i + k) % 3) } else { Formula::Var(i) })
}

fn parse_with(src: &str, macros: bool) -> Result<Formula> {
    let mut p = Parser { toks: lex(src, macros)?, pos: 0 };
    let f = p.formula()?;
    if p.peek() != Tok::End {
        return p.err("unexpected token");
    }
    Ok(f)
}

/// Parses the public formula grammar.
pub fn parse(src: &str) -> Result<Formula> {
    parse_with(src, false)
}

/// Parses with the cyclic macros `Σ°` and `∏°` enabled. `Σ°e` stands for
/// `e(p,q,r) + e(q,r,p) + e(r,p,q)` and takes the remainder of the current
/// product as its body; `∏°` is the conjunctive counterpart.
pub(crate) fn parse_registry(src: &str) -> Result<Formula> {
    parse_with(src, true)
}

pub fn modal_degree(f: &Formula) -> u32 {
    f.modal_degree()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::Var(0)
    }
    fn q() -> Formula {
        Formula::Var(1)
    }
    fn r() -> Formula {
        Formula::Var(2)
    }

    #[test]
    fn parses_mixed_example() {
        let f = parse("p!q+qr->!qr").unwrap();
        let want = Formula::implies(
            Formula::or(Formula::and(p(), Formula::not(q())), Formula::and(q(), r())),
            Formula::and(Formula::not(q()), r()),
        );
        assert_eq!(f, want);
        assert_eq!(f.modal_degree(), 0);
    }

    #[test]
    fn precedence_of_negation() {
        assert_eq!(parse("!p+q").unwrap(), Formula::or(Formula::not(p()), q()));
        assert_eq!(parse("[]p->p").unwrap(), Formula::implies(Formula::boxed(p()), p()));
    }

    #[test]
    fn incomplete_input_reports_offset() {
        assert_eq!(
            parse("p+"),
            Err(Error::Syntax { offset: 2, message: "unexpected end of input".into() })
        );
        assert!(matches!(parse("p?"), Err(Error::UnknownToken { offset: 1, found: '?' })));
        assert!(matches!(parse("(p"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse("p)"), Err(Error::Syntax { offset: 1, .. })));
        assert!(matches!(parse("p<q"), Err(Error::Syntax { offset: 1, .. })));
    }

    #[test]
    fn degrees() {
        assert_eq!(parse("([]p<-><>([]p))-><>[]p").unwrap().modal_degree(), 2);
        assert_eq!(Formula::boxed(Formula::Const1).modal_degree(), 1);
    }

    #[test]
    fn rendering() {
        assert_eq!(render(&Formula::implies(Formula::boxed(p()), p())), "[]p->p");
        assert_eq!(render(&Formula::Const1), "1");
        assert_eq!(render(&Formula::diamond(Formula::and(p(), Formula::not(q())))), "<>(p!q)");
        assert_eq!(render(&Formula::and(p(), Formula::Const1)), "p&1");
        assert_eq!(render(&Formula::and(Formula::Var(0), Formula::Var(7))), "pp7");
    }

    #[test]
    fn indexed_variables() {
        assert_eq!(parse("p0p1p2p3").unwrap(), parse("pqrs").unwrap());
        assert_eq!(parse("p12").unwrap(), Formula::Var(12));
        assert_eq!(parse("p&1").unwrap(), Formula::and(p(), Formula::Const1));
    }

    #[test]
    fn arrows_associate_right() {
        assert_eq!(parse("p->q->r").unwrap(), Formula::implies(p(), Formula::implies(q(), r())));
        assert_eq!(render(&parse("(p->q)->r").unwrap()), "(p->q)->r");
    }

    #[test]
    fn cyclic_macros() {
        let f = parse_registry("Σ°[](p->q)+[](p+q+r)").unwrap();
        let g = parse("[](p->q)+[](q->r)+[](r->p)+[](p+q+r)").unwrap();
        assert_eq!(f, g);
        let f = parse_registry("∏°p<>p->1").unwrap();
        let g = parse("p<>p(q<>q)(r<>r)->1").unwrap();
        assert_eq!(f, g);
        let f = parse_registry("<>(pqr)Σ°[]p+s").unwrap();
        let g = parse("<>(pqr)([]p+[]q+[]r)+s").unwrap();
        assert_eq!(f, g);
        assert!(parse("Σ°p").is_err());
    }
}
