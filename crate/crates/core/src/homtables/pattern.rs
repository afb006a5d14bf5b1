//! Complex literals with parameter expressions, e.g. `M(2^r,n+1)`,
//! `C(r,k,s)` or the atom `M(2^r,3)^Ceta(5)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{Env, Expr};
use crate::model::{Elementary, Kind, SmashAtom, Summand};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComplexPattern {
    Point,
    /// Moore arguments are (prime, exponent, n); the others follow the
    /// surface syntax order.
    Elem(Kind, Vec<Expr>),
    Atom(Box<ComplexPattern>, Box<ComplexPattern>),
    Susp(Expr, Box<ComplexPattern>),
}

fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut depth = 0;
    let mut parts = Vec::new();
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

impl ComplexPattern {
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some(inner) = text.strip_prefix("susp(").and_then(|t| t.strip_suffix(')')) {
            let parts = split_top_level(inner, ',');
            if parts.len() != 2 {
                return Err(Error::parse(0, format!("susp takes 2 arguments in {text:?}")));
            }
            return Ok(ComplexPattern::Susp(Expr::parse(parts[0])?, Box::new(Self::parse(parts[1])?)));
        }
        let factors = split_top_level(text, '^');
        if factors.len() == 2 {
            return Ok(ComplexPattern::Atom(
                Box::new(Self::parse(factors[0])?),
                Box::new(Self::parse(factors[1])?),
            ));
        }
        if factors.len() > 2 {
            return Err(Error::parse(0, format!("at most two smash factors in {text:?}")));
        }
        if text == "*" {
            return Ok(ComplexPattern::Point);
        }
        let open = text
            .find('(')
            .ok_or_else(|| Error::parse(0, format!("expected NAME(...) in {text:?}")))?;
        if !text.ends_with(')') {
            return Err(Error::parse(text.len(), format!("expected ')' in {text:?}")));
        }
        let name = &text[..open];
        let inner = &text[open + 1..text.len() - 1];
        let args = split_top_level(inner, ',');
        let exprs = |want: usize| -> Result<Vec<Expr>> {
            if args.len() != want {
                return Err(Error::parse(open, format!("{name} takes {want} arguments in {text:?}")));
            }
            args.iter().map(|a| Expr::parse(a)).collect()
        };
        let (kind, exprs) = match name {
            "S" => (Kind::Sphere, exprs(1)?),
            "Ceta" => (Kind::ChangEta, exprs(1)?),
            "Ctop" => (Kind::ChangTop, exprs(2)?),
            "Cbot" => (Kind::ChangBot, exprs(2)?),
            "C" => (Kind::ChangFull, exprs(3)?),
            "M" => {
                if args.len() != 2 {
                    return Err(Error::parse(open, format!("M takes 2 arguments in {text:?}")));
                }
                let pe = split_top_level(args[0], '^');
                let (p, e) = match pe.as_slice() {
                    [p] => (Expr::parse(p)?, Expr::Num(1)),
                    [p, e] => (Expr::parse(p)?, Expr::parse(e)?),
                    _ => return Err(Error::parse(open, format!("bad Moore order in {text:?}"))),
                };
                (Kind::Moore, vec![p, e, Expr::parse(args[1])?])
            }
            _ => return Err(Error::parse(0, format!("unknown complex {name:?}"))),
        };
        Ok(ComplexPattern::Elem(kind, exprs))
    }

    /// Evaluates every parameter, producing a concrete summand.
    pub fn instantiate(&self, env: &Env) -> Result<Summand> {
        match self {
            ComplexPattern::Point => Ok(Summand::Elementary(Elementary::Point)),
            ComplexPattern::Susp(m, p) => Ok(p.instantiate(env)?.suspend(m.eval(env)? as i32)),
            ComplexPattern::Atom(a, b) => {
                let (Summand::Elementary(x), Summand::Elementary(y)) = (a.instantiate(env)?, b.instantiate(env)?) else {
                    return Err(Error::Data("nested smash in pattern".into()));
                };
                Summand::smash_literal(x, y)
            }
            ComplexPattern::Elem(kind, args) => {
                let v = args.iter().map(|a| a.eval(env)).collect::<Result<Vec<i64>>>()?;
                let u = |x: i64| -> Result<u32> {
                    u32::try_from(x).map_err(|_| Error::InvalidComplex(format!("negative parameter in {self}")))
                };
                let d = |x: i64| x as i32;
                let e = match kind {
                    Kind::Sphere => Elementary::sphere(d(v[0]))?,
                    Kind::Moore => Elementary::moore(u(v[0])?, u(v[1])?, d(v[2]))?,
                    Kind::ChangEta => Elementary::chang_eta(d(v[0]))?,
                    Kind::ChangTop => Elementary::chang_top(d(v[0]), u(v[1])?)?,
                    Kind::ChangBot => Elementary::chang_bot(u(v[0])?, d(v[1]))?,
                    Kind::ChangFull => Elementary::chang_full(u(v[0])?, d(v[1]), u(v[2])?)?,
                    Kind::Point => Elementary::Point,
                };
                Ok(Summand::Elementary(e))
            }
        }
    }

    /// Collects (pattern argument, actual value) pairs, or None on a shape mismatch.
    fn slots(&self, s: &Summand, out: &mut Vec<(Expr, i64)>) -> bool {
        match (self, s) {
            (ComplexPattern::Point, Summand::Elementary(Elementary::Point)) => true,
            (ComplexPattern::Atom(a, b), Summand::Atom(at)) if at.shift() == 0 => {
                a.slots(&Summand::Elementary(at.left()), out) && b.slots(&Summand::Elementary(at.right()), out)
            }
            (ComplexPattern::Elem(kind, args), Summand::Elementary(e)) if e.kind() == *kind => {
                let vals: Vec<i64> = match *e {
                    Elementary::Sphere { n } => vec![n as i64],
                    Elementary::Moore { p, r, n } => vec![p as i64, r as i64, n as i64],
                    Elementary::ChangEta { k } => vec![k as i64],
                    Elementary::ChangTop { k, s } => vec![k as i64, s as i64],
                    Elementary::ChangBot { r, k } => vec![r as i64, k as i64],
                    Elementary::ChangFull { r, k, s } => vec![r as i64, k as i64, s as i64],
                    Elementary::Point => vec![],
                };
                out.extend(args.iter().cloned().zip(vals));
                true
            }
            _ => false,
        }
    }

    /// Matches several patterns at once: bare variables bind first, then
    /// every other argument must evaluate to the actual value.
    pub fn match_all(pairs: &[(&ComplexPattern, &Summand)]) -> Option<Env> {
        let mut slots = Vec::new();
        for (p, s) in pairs {
            if !p.slots(s, &mut slots) {
                return None;
            }
        }
        let mut env = Env::new();
        for (e, v) in &slots {
            if let Some(name) = e.as_var() {
                match env.get(name) {
                    Some(old) if old != v => return None,
                    _ => {
                        env.insert(name.to_string(), *v);
                    }
                }
            }
        }
        for (e, v) in &slots {
            if e.as_var().is_none() && e.eval(&env).ok() != Some(*v) {
                return None;
            }
        }
        Some(env)
    }
}

impl fmt::Display for ComplexPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexPattern::Point => write!(f, "*"),
            ComplexPattern::Atom(a, b) => write!(f, "{a}^{b}"),
            ComplexPattern::Susp(m, p) => write!(f, "susp({m},{p})"),
            ComplexPattern::Elem(kind, a) => match kind {
                Kind::Sphere => write!(f, "S({})", a[0]),
                Kind::Moore => write!(f, "M({}^{},{})", a[0], a[1], a[2]),
                Kind::ChangEta => write!(f, "Ceta({})", a[0]),
                Kind::ChangTop => write!(f, "Ctop({},{})", a[0], a[1]),
                Kind::ChangBot => write!(f, "Cbot({},{})", a[0], a[1]),
                Kind::ChangFull => write!(f, "C({},{},{})", a[0], a[1], a[2]),
                Kind::Point => write!(f, "*"),
            },
        }
    }
}

/// Convenience: a concrete atom summand for pattern tests.
pub fn atom_summand(a: Elementary, b: Elementary) -> Result<Summand> {
    SmashAtom::new(a, b).map(Summand::Atom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::env;
    use crate::model::Elementary::*;

    #[test]
    fn instantiate_with_params() {
        let p = ComplexPattern::parse("M(2^r,n+1)").unwrap();
        let s = p.instantiate(&env([("r", 2), ("n", 6)])).unwrap();
        assert_eq!(s, Summand::Elementary(Moore { p: 2, r: 2, n: 7 }));
        let p = ComplexPattern::parse("M(3,4)").unwrap();
        assert_eq!(p.instantiate(&Env::new()).unwrap(), Summand::Elementary(Moore { p: 3, r: 1, n: 4 }));
    }

    #[test]
    fn match_binds_then_checks() {
        let src = ComplexPattern::parse("M(2^s,n+1)").unwrap();
        let tgt = ComplexPattern::parse("M(2^r,n)").unwrap();
        let a = Summand::Elementary(Moore { p: 2, r: 3, n: 5 });
        let b = Summand::Elementary(Moore { p: 2, r: 1, n: 4 });
        let e = ComplexPattern::match_all(&[(&src, &a), (&tgt, &b)]).unwrap();
        assert_eq!((e["s"], e["r"], e["n"]), (3, 1, 4));
        let c = Summand::Elementary(Moore { p: 2, r: 1, n: 3 });
        assert!(ComplexPattern::match_all(&[(&src, &a), (&tgt, &c)]).is_none());
    }

    #[test]
    fn atom_patterns() {
        let p = ComplexPattern::parse("Ceta(5)^C(r,5,s)").unwrap();
        let a = atom_summand(ChangEta { k: 5 }, ChangFull { r: 2, k: 5, s: 3 }).unwrap();
        let e = ComplexPattern::match_all(&[(&p, &a)]).unwrap();
        assert_eq!((e["r"], e["s"]), (2, 3));
    }
}
