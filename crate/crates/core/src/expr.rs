//! Integer parameter expressions and predicates used by the data files:
//! `2^min(r,t)`, `2n+1`, `r = t = 1`, `s < u and u <= r`, `otherwise`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

pub type Env = BTreeMap<String, i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(i64),
    Var(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
    /// Chained comparison `a op b op c`.
    Cmp(Vec<Expr>, Vec<CmpOp>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    True,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        let mut p = Parser { src: text, pos: 0 };
        let e = p.or()?;
        p.skip_ws();
        if p.pos < text.len() {
            return Err(Error::parse(p.pos, format!("unexpected input in expression {text:?}")));
        }
        Ok(e)
    }

    pub fn eval(&self, env: &Env) -> Result<i64> {
        use Expr::*;
        Ok(match self {
            Num(n) => *n,
            Var(v) => *env
                .get(v)
                .ok_or_else(|| Error::Data(format!("unbound parameter {v}")))?,
            Neg(e) => -e.eval(env)?,
            Bin(op, a, b) => {
                let (x, y) = (a.eval(env)?, b.eval(env)?);
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Pow => {
                        if y < 0 {
                            return Err(Error::Data(format!("negative exponent in {self}")));
                        }
                        x.pow(y as u32)
                    }
                }
            }
            Call(f, args) => {
                let vals = args.iter().map(|a| a.eval(env)).collect::<Result<Vec<_>>>()?;
                match (f.as_str(), vals.as_slice()) {
                    ("min", [_, ..]) => *vals.iter().min().unwrap(),
                    ("max", [_, ..]) => *vals.iter().max().unwrap(),
                    _ => return Err(Error::Data(format!("unknown function {f}/{}", vals.len()))),
                }
            }
            Cmp(items, ops) => {
                let vals = items.iter().map(|a| a.eval(env)).collect::<Result<Vec<_>>>()?;
                let ok = ops.iter().enumerate().all(|(i, op)| {
                    let (a, b) = (vals[i], vals[i + 1]);
                    match op {
                        CmpOp::Eq => a == b,
                        CmpOp::Ne => a != b,
                        CmpOp::Lt => a < b,
                        CmpOp::Le => a <= b,
                        CmpOp::Gt => a > b,
                        CmpOp::Ge => a >= b,
                    }
                });
                ok as i64
            }
            And(a, b) => (a.eval(env)? != 0 && b.eval(env)? != 0) as i64,
            Or(a, b) => (a.eval(env)? != 0 || b.eval(env)? != 0) as i64,
            Not(a) => (a.eval(env)? == 0) as i64,
            True => 1,
        })
    }

    pub fn holds(&self, env: &Env) -> Result<bool> {
        Ok(self.eval(env)? != 0)
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Expr::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn vars(&self, out: &mut Vec<String>) {
        use Expr::*;
        match self {
            Var(v) => out.push(v.clone()),
            Neg(e) | Not(e) => e.vars(out),
            Bin(_, a, b) | And(a, b) | Or(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            Call(_, xs) | Cmp(xs, _) => xs.iter().for_each(|x| x.vars(out)),
            Num(_) | True => {}
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Expr::*;
        match self {
            Num(n) => write!(f, "{n}"),
            Var(v) => write!(f, "{v}"),
            Neg(e) => write!(f, "-({e})"),
            Bin(op, a, b) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Pow => "^",
                };
                write!(f, "({a}{s}{b})")
            }
            Call(name, args) => {
                let a: Vec<String> = args.iter().map(|x| x.to_string()).collect();
                write!(f, "{name}({})", a.join(","))
            }
            Cmp(items, ops) => {
                write!(f, "{}", items[0])?;
                for (op, x) in ops.iter().zip(&items[1..]) {
                    let s = match op {
                        CmpOp::Eq => "=",
                        CmpOp::Ne => "!=",
                        CmpOp::Lt => "<",
                        CmpOp::Le => "<=",
                        CmpOp::Gt => ">",
                        CmpOp::Ge => ">=",
                    };
                    write!(f, " {s} {x}")?;
                }
                Ok(())
            }
            And(a, b) => write!(f, "({a} and {b})"),
            Or(a, b) => write!(f, "({a} or {b})"),
            Not(a) => write!(f, "not ({a})"),
            True => write!(f, "otherwise"),
        }
    }
}

pub fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn keyword(&mut self, word: &str) -> bool {
        self.skip_ws();
        let r = self.rest();
        if r.starts_with(word) && !r[word.len()..].chars().next().is_some_and(is_ident_char) {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    fn or(&mut self) -> Result<Expr> {
        let mut e = self.and()?;
        while self.keyword("or") {
            e = Expr::Or(Box::new(e), Box::new(self.and()?));
        }
        Ok(e)
    }

    fn and(&mut self) -> Result<Expr> {
        let mut e = self.not()?;
        while self.keyword("and") {
            e = Expr::And(Box::new(e), Box::new(self.not()?));
        }
        Ok(e)
    }

    fn not(&mut self) -> Result<Expr> {
        if self.keyword("not") {
            return Ok(Expr::Not(Box::new(self.not()?)));
        }
        if self.keyword("otherwise") {
            return Ok(Expr::True);
        }
        self.cmp()
    }

    fn cmp_op(&mut self) -> Option<CmpOp> {
        for (tok, op) in [
            ("==", CmpOp::Eq),
            ("!=", CmpOp::Ne),
            ("<=", CmpOp::Le),
            (">=", CmpOp::Ge),
            ("≤", CmpOp::Le),
            ("≥", CmpOp::Ge),
            ("=", CmpOp::Eq),
            ("<", CmpOp::Lt),
            (">", CmpOp::Gt),
        ] {
            if self.eat(tok) {
                return Some(op);
            }
        }
        None
    }

    fn cmp(&mut self) -> Result<Expr> {
        let first = self.sum()?;
        let mut items = vec![first];
        let mut ops = Vec::new();
        while let Some(op) = self.cmp_op() {
            ops.push(op);
            items.push(self.sum()?);
        }
        if ops.is_empty() {
            Ok(items.pop().unwrap())
        } else {
            Ok(Expr::Cmp(items, ops))
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut e = self.product()?;
        loop {
            if self.eat("+") {
                e = Expr::Bin(BinOp::Add, Box::new(e), Box::new(self.product()?));
            } else if self.peek() == Some('-') {
                self.pos += 1;
                e = Expr::Bin(BinOp::Sub, Box::new(e), Box::new(self.product()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        loop {
            if self.eat("*") || self.eat("·") {
                e = Expr::Bin(BinOp::Mul, Box::new(e), Box::new(self.unary()?));
            } else if matches!(e, Expr::Num(_))
                && self.peek().is_some_and(|c| is_ident_start(c) || c == '(' || c == '{')
                && !self.at_keyword()
            {
                // Implicit multiplication: 2n, 2(r+1).
                e = Expr::Bin(BinOp::Mul, Box::new(e), Box::new(self.unary()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn at_keyword(&mut self) -> bool {
        self.skip_ws();
        let r = self.rest();
        ["and", "or", "not", "otherwise"]
            .iter()
            .any(|k| r.starts_with(k) && !r[k.len()..].chars().next().is_some_and(is_ident_char))
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat("^") {
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let start = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let digits: String = self.rest().chars().take_while(|c| c.is_ascii_digit()).collect();
                self.pos += digits.len();
                digits
                    .parse()
                    .map(Expr::Num)
                    .map_err(|_| Error::parse(start, "number out of range"))
            }
            Some('(') => {
                self.pos += 1;
                let e = self.or()?;
                if !self.eat(")") {
                    return Err(Error::parse(self.pos, "expected ')'"));
                }
                Ok(e)
            }
            Some('{') => {
                self.pos += 1;
                let e = self.or()?;
                if !self.eat("}") {
                    return Err(Error::parse(self.pos, "expected '}'"));
                }
                Ok(e)
            }
            Some(c) if is_ident_start(c) => {
                let name: String = self.rest().chars().take_while(|&c| is_ident_char(c)).collect();
                self.pos += name.len();
                if self.peek() == Some('(') {
                    self.pos += 1;
                    let mut args = vec![self.or()?];
                    while self.eat(",") {
                        args.push(self.or()?);
                    }
                    if !self.eat(")") {
                        return Err(Error::parse(self.pos, "expected ')'"));
                    }
                    Ok(Expr::Call(name, args))
                } else {
                    Ok(Expr::Var(name))
                }
            }
            _ => Err(Error::parse(start, format!("expected a number or parameter in {:?}", self.src))),
        }
    }
}

/// Replaces `{expr}` occurrences in a template with their values.
pub fn fill_template(template: &str, env: &Env) -> Result<String> {
    let mut out = String::new();
    let mut rest = template;
    while let Some(i) = rest.find('{') {
        out.push_str(&rest[..i]);
        let j = rest[i..]
            .find('}')
            .ok_or_else(|| Error::Data(format!("unclosed brace in {template:?}")))?;
        let inner = &rest[i + 1..i + j];
        out.push_str(&Expr::parse(inner)?.eval(env)?.to_string());
        rest = &rest[i + j + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

pub fn env<const N: usize>(pairs: [(&str, i64); N]) -> Env {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, e: &Env) -> i64 {
        Expr::parse(s).unwrap().eval(e).unwrap()
    }

    #[test]
    fn arithmetic() {
        let e = env([("r", 2), ("t", 3), ("n", 4), ("r'", 5)]);
        assert_eq!(ev("2^min(r,t)", &e), 4);
        assert_eq!(ev("2n+1", &e), 9);
        assert_eq!(ev("2^{r'-r}", &e), 8);
        assert_eq!(ev("-2^r", &e), -4);
        assert_eq!(ev("2^(s+1)", &env([("s", 3)])), 16);
    }

    #[test]
    fn predicates() {
        let e = env([("r", 1), ("t", 1), ("u", 2)]);
        assert_eq!(ev("r = t = 1", &e), 1);
        assert_eq!(ev("r < u and u <= t", &e), 0);
        assert_eq!(ev("r < u or u <= t", &e), 1);
        assert_eq!(ev("otherwise", &e), 1);
        assert_eq!(ev("not r = 1", &e), 0);
    }

    #[test]
    fn templates() {
        assert_eq!(fill_template("ξ_{t}^{s+1}", &env([("t", 2), ("s", 1)])).unwrap(), "ξ_2^2");
        assert_eq!(fill_template("iηq", &Env::new()).unwrap(), "iηq");
    }

    #[test]
    fn errors_carry_offsets() {
        assert!(matches!(Expr::parse("2 + )"), Err(Error::Parse { offset: 4, .. })));
        assert!(Expr::parse("x").unwrap().eval(&Env::new()).is_err());
    }
}
