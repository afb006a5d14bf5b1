//! Surface syntax for complexes.
//!
//! ```text
//! wedge  := smash (('+' | 'v') smash)*
//! smash  := unary ('^' unary)*
//! unary  := S(n) | M(p^r,n) | M(p,n) | Ceta(k) | Ctop(k,s) | Cbot(r,k) | C(r,k,s)
//!         | susp(m, wedge) | D(wedge) | '(' wedge ')' | '*'
//! ```

use std::fmt;

use chang_core::model::{Elementary, WedgeComplex};
use chang_core::smash::smash_decompose;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ast {
    Point,
    Elem(ElemKind, Vec<u64>),
    Wedge(Vec<Ast>),
    Smash(Vec<Ast>),
    Susp(u64, Box<Ast>),
    Dual(Box<Ast>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElemKind {
    Sphere,
    Moore,
    Eta,
    Top,
    Bot,
    Full,
}

impl ElemKind {
    const ALL: [(ElemKind, &'static str); 6] = [
        (ElemKind::Sphere, "S"),
        (ElemKind::Moore, "M"),
        (ElemKind::Eta, "Ceta"),
        (ElemKind::Top, "Ctop"),
        (ElemKind::Bot, "Cbot"),
        (ElemKind::Full, "C"),
    ];

    fn name(self) -> &'static str {
        Self::ALL.iter().find(|(k, _)| *k == self).unwrap().1
    }

    fn arity(self) -> usize {
        match self {
            ElemKind::Sphere | ElemKind::Eta => 1,
            ElemKind::Moore | ElemKind::Top | ElemKind::Bot => 2,
            ElemKind::Full => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "byte {}: {}", self.offset, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected one of: {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn fail<T>(&self, message: impl Into<String>, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.pos,
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn found(&mut self) -> String {
        match self.peek() {
            Some(c) => format!("unexpected '{c}'"),
            None => "unexpected end of input".into(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            let msg = self.found();
            self.fail(msg, &[&format!("'{c}'")])
        }
    }

    fn ident(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let len = rest.find(|c: char| !c.is_ascii_alphabetic()).unwrap_or(rest.len());
        self.pos += len;
        &self.src[start..start + len]
    }

    fn number(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        if len == 0 {
            let msg = self.found();
            return self.fail(msg, &["number"]);
        }
        let n = rest[..len].parse().or_else(|_| self.fail("number too large", &[]))?;
        self.pos += len;
        Ok(n)
    }

    /// True when the next token is the wedge letter `v` standing alone.
    fn at_wedge_v(&mut self) -> bool {
        if self.peek() != Some('v') {
            return false;
        }
        let next = self.src[self.pos + 1..].chars().next();
        !next.is_some_and(|c| c.is_ascii_alphanumeric() || c == '(')
    }

    fn wedge(&mut self) -> Result<Ast, ParseError> {
        let mut parts = vec![self.smash()?];
        loop {
            if self.eat('+') {
            } else if self.at_wedge_v() {
                self.pos += 1;
            } else {
                break;
            }
            parts.push(self.smash()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Ast::Wedge(parts) })
    }

    fn smash(&mut self) -> Result<Ast, ParseError> {
        let mut parts = vec![self.unary()?];
        while self.eat('^') {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Ast::Smash(parts) })
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        const STARTS: [&str; 10] = ["S", "M", "Ceta", "Ctop", "Cbot", "C", "susp", "D", "(", "*"];
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.wedge()?;
                self.expect(')')?;
                return Ok(inner);
            }
            Some('*') => {
                self.pos += 1;
                return Ok(Ast::Point);
            }
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => {
                let msg = self.found();
                return self.fail(msg, &STARTS);
            }
        }
        let start = self.pos;
        let name = self.ident();
        match name {
            "susp" => {
                self.expect('(')?;
                let m = self.number()?;
                self.expect(',')?;
                let inner = self.wedge()?;
                self.expect(')')?;
                Ok(Ast::Susp(m, Box::new(inner)))
            }
            "D" => {
                self.expect('(')?;
                let inner = self.wedge()?;
                self.expect(')')?;
                Ok(Ast::Dual(Box::new(inner)))
            }
            _ => {
                let Some(&(kind, _)) = ElemKind::ALL.iter().find(|(_, n)| *n == name) else {
                    self.pos = start;
                    return self.fail(format!("unknown constructor '{name}'"), &STARTS);
                };
                self.expect('(')?;
                let mut args = Vec::new();
                if kind == ElemKind::Moore {
                    let p = self.number()?;
                    let r = if self.eat('^') { self.number()? } else { 1 };
                    args.extend([p, r]);
                } else {
                    args.push(self.number()?);
                }
                let want = kind.arity() + usize::from(kind == ElemKind::Moore);
                while args.len() < want {
                    self.expect(',')?;
                    args.push(self.number()?);
                }
                self.expect(')')?;
                Ok(Ast::Elem(kind, args))
            }
        }
    }
}

pub fn parse_expression(text: &str) -> Result<Ast, ParseError> {
    let mut p = Parser { src: text, pos: 0 };
    let ast = p.wedge()?;
    if p.peek().is_some() {
        let msg = p.found();
        return p.fail(msg, &["'+'", "'^'", "end of input"]);
    }
    Ok(ast)
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ast::Point => write!(f, "*"),
            Ast::Elem(ElemKind::Moore, a) if a[1] == 1 => write!(f, "M({},{})", a[0], a[2]),
            Ast::Elem(ElemKind::Moore, a) => write!(f, "M({}^{},{})", a[0], a[1], a[2]),
            Ast::Elem(k, a) => {
                let args: Vec<String> = a.iter().map(|x| x.to_string()).collect();
                write!(f, "{}({})", k.name(), args.join(","))
            }
            Ast::Wedge(parts) => {
                let s: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "{}", s.join(" + "))
            }
            Ast::Smash(parts) => {
                let s: Vec<String> = parts
                    .iter()
                    .map(|p| match p {
                        Ast::Wedge(_) | Ast::Smash(_) => format!("({p})"),
                        _ => p.to_string(),
                    })
                    .collect();
                write!(f, "{}", s.join("^"))
            }
            Ast::Susp(m, x) => write!(f, "susp({m},{x})"),
            Ast::Dual(x) => write!(f, "D({x})"),
        }
    }
}

fn small<T: TryFrom<u64>>(v: u64) -> Result<T, chang_core::Error> {
    T::try_from(v).map_err(|_| chang_core::Error::InvalidComplex(format!("parameter {v} out of range")))
}

fn elementary(kind: ElemKind, a: &[u64]) -> chang_core::Result<Elementary> {
    match kind {
        ElemKind::Sphere => Elementary::sphere(small(a[0])?),
        ElemKind::Moore => Elementary::moore(small(a[0])?, small(a[1])?, small(a[2])?),
        ElemKind::Eta => Elementary::chang_eta(small(a[0])?),
        ElemKind::Top => Elementary::chang_top(small(a[0])?, small(a[1])?),
        ElemKind::Bot => Elementary::chang_bot(small(a[0])?, small(a[1])?),
        ElemKind::Full => Elementary::chang_full(small(a[0])?, small(a[1])?, small(a[2])?),
    }
}

/// Evaluates an expression to a wedge. Smash products go through the
/// decision table, so indecomposable pairs come back as atoms.
pub fn lower(ast: &Ast) -> chang_core::Result<WedgeComplex> {
    match ast {
        Ast::Point => Ok(WedgeComplex::point()),
        Ast::Elem(kind, args) => elementary(*kind, args).map(WedgeComplex::from),
        Ast::Wedge(parts) => parts.iter().try_fold(WedgeComplex::point(), |acc, p| Ok(acc.wedge(&lower(p)?))),
        Ast::Smash(parts) => {
            let mut acc = lower(&parts[0])?;
            for p in &parts[1..] {
                acc = smash_decompose(&acc, &lower(p)?)?.output;
            }
            Ok(acc)
        }
        Ast::Susp(m, x) => Ok(lower(x)?.suspend(small(*m)?).canonicalize()),
        Ast::Dual(x) => lower(x)?.dual(),
    }
}
