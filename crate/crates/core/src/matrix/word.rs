//! Letters of formal morphism words, the objects they act on, and the
//! surface syntax `2^r`, `ηq`, `ξ_s^{s'} + κ iηηq`, `-B(χ) - (κ+κ')iηq`.

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{is_ident_char, Env, Expr};
use crate::model::Elementary;

use super::poly::Poly;

/// A sphere S^dim or a 2-primary Moore space M_{2^t}^dim.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Obj {
    pub moore: Option<u32>,
    pub dim: i32,
}

impl Obj {
    pub fn sphere(dim: i32) -> Self {
        Obj { moore: None, dim }
    }

    pub fn moore(t: u32, dim: i32) -> Self {
        Obj { moore: Some(t), dim }
    }

    pub fn from_elementary(e: &Elementary) -> Result<Self> {
        match *e {
            Elementary::Sphere { n } => Ok(Obj::sphere(n)),
            Elementary::Moore { p: 2, r, n } => Ok(Obj::moore(r, n)),
            _ => Err(Error::IllTyped(format!(
                "matrix summands must be spheres or 2-primary Moore spaces, got {e}"
            ))),
        }
    }

    pub fn to_elementary(self) -> Elementary {
        match self.moore {
            None => Elementary::Sphere { n: self.dim },
            Some(r) => Elementary::Moore { p: 2, r, n: self.dim },
        }
    }

    /// Cell dimensions, bottom first.
    pub fn cells(self) -> Vec<i32> {
        match self.moore {
            None => vec![self.dim],
            Some(_) => vec![self.dim, self.dim + 1],
        }
    }
}

impl fmt::Display for Obj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_elementary())
    }
}

/// Exponents are those of the Moore spaces the letter touches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    /// i: S^n -> M^n, bottom cell inclusion.
    I { t: u32 },
    /// q: M^n -> S^{n+1}, pinch to the top cell.
    Q { t: u32 },
    Eta,
    Rho,
    /// B(χ): M_{2^src}^n -> M_{2^tgt}^n.
    Chi { src: u32, tgt: u32 },
    EtaSmash { t: u32 },
    SmashEta { t: u32 },
    /// ξ_tgt^src: M_{2^src}^{n+1} -> M_{2^tgt}^n.
    XiSub { tgt: u32, src: u32 },
    /// η_tgt^src: M_{2^src}^{n+1} -> M_{2^tgt}^n.
    EtaSub { tgt: u32, src: u32 },
    /// η^t: M_{2^t}^{n+1} -> S^n.
    EtaUp { t: u32 },
    /// ξ_t: S^{n+2} -> M_{2^t}^n.
    XiDown { t: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LetterKind {
    I,
    Q,
    Eta,
    Rho,
    Chi,
    EtaSmash,
    SmashEta,
    XiSub,
    EtaSub,
    EtaUp,
    XiDown,
}

impl LetterKind {
    /// (source is Moore, target is Moore, stem).
    fn shape(self) -> (bool, bool, i32) {
        use LetterKind::*;
        match self {
            I => (false, true, 0),
            Q => (true, false, -1),
            Eta => (false, false, 1),
            Rho => (false, false, 3),
            Chi => (true, true, 0),
            EtaSmash | SmashEta | XiSub | EtaSub => (true, true, 1),
            EtaUp => (true, false, 1),
            XiDown => (false, true, 2),
        }
    }

    pub fn name(self) -> &'static str {
        use LetterKind::*;
        match self {
            I => "i",
            Q => "q",
            Eta => "η",
            Rho => "ϱ",
            Chi => "B(χ)",
            EtaSmash => "η∧1",
            SmashEta => "1∧η",
            XiSub => "ξ_a^b",
            EtaSub => "η_a^b",
            EtaUp => "η^t",
            XiDown => "ξ_t",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        use LetterKind::*;
        [I, Q, Eta, Rho, Chi, EtaSmash, SmashEta, XiSub, EtaSub, EtaUp, XiDown]
            .into_iter()
            .find(|k| k.name() == name)
    }
}

impl Letter {
    pub fn kind(self) -> LetterKind {
        match self {
            Letter::I { .. } => LetterKind::I,
            Letter::Q { .. } => LetterKind::Q,
            Letter::Eta => LetterKind::Eta,
            Letter::Rho => LetterKind::Rho,
            Letter::Chi { .. } => LetterKind::Chi,
            Letter::EtaSmash { .. } => LetterKind::EtaSmash,
            Letter::SmashEta { .. } => LetterKind::SmashEta,
            Letter::XiSub { .. } => LetterKind::XiSub,
            Letter::EtaSub { .. } => LetterKind::EtaSub,
            Letter::EtaUp { .. } => LetterKind::EtaUp,
            Letter::XiDown { .. } => LetterKind::XiDown,
        }
    }

    /// (source exponent, target exponent) where the side is a Moore space.
    pub fn exponents(self) -> (Option<u32>, Option<u32>) {
        use Letter::*;
        match self {
            I { t } => (None, Some(t)),
            Q { t } => (Some(t), None),
            Eta | Rho => (None, None),
            Chi { src, tgt } | XiSub { tgt, src } | EtaSub { tgt, src } => (Some(src), Some(tgt)),
            EtaSmash { t } | SmashEta { t } => (Some(t), Some(t)),
            EtaUp { t } => (Some(t), None),
            XiDown { t } => (None, Some(t)),
        }
    }

    /// Carries a positive-stem η or ϱ factor, so it induces zero on cells.
    pub fn has_positive_stem(self) -> bool {
        self.kind().shape().2 > 0
    }

    pub fn is_eta_type(self) -> bool {
        !matches!(self, Letter::I { .. } | Letter::Q { .. } | Letter::Chi { .. } | Letter::Rho)
    }

    /// The target object when applied to `src`.
    pub fn apply(self, src: Obj) -> Result<Obj> {
        let (sm, tm, stem) = self.kind().shape();
        let (se, te) = self.exponents();
        let ok = if sm { src.moore.is_some() && src.moore == se } else { src.moore.is_none() };
        if !ok {
            return Err(Error::IllTyped(format!("{self} cannot start at {src}")));
        }
        let dim = src.dim - stem;
        Ok(Obj { moore: if tm { te } else { None }, dim })
    }
}

fn sub_sup(f: &mut fmt::Formatter<'_>, base: &str, a: u32, b: Option<u32>) -> fmt::Result {
    let g = |x: u32| if x < 10 { x.to_string() } else { format!("{{{x}}}") };
    match b {
        Some(b) => write!(f, "{base}_{}^{}", g(a), g(b)),
        None => write!(f, "{base}_{}", g(a)),
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Letter::I { .. } => write!(f, "i"),
            Letter::Q { .. } => write!(f, "q"),
            Letter::Eta => write!(f, "η"),
            Letter::Rho => write!(f, "ϱ"),
            Letter::Chi { .. } => write!(f, "B(χ)"),
            Letter::EtaSmash { .. } => write!(f, "η∧1"),
            Letter::SmashEta { .. } => write!(f, "1∧η"),
            Letter::XiSub { tgt, src } => sub_sup(f, "ξ", tgt, Some(src)),
            Letter::EtaSub { tgt, src } => sub_sup(f, "η", tgt, Some(src)),
            Letter::EtaUp { t } if t < 10 => write!(f, "η^{t}"),
            Letter::EtaUp { t } => write!(f, "η^{{{t}}}"),
            Letter::XiDown { t } => sub_sup(f, "ξ", t, None),
        }
    }
}

pub type Word = Vec<Letter>;

pub fn fmt_word(w: &[Letter]) -> String {
    match w {
        [] => "1".into(),
        [l] => l.to_string(),
        _ => w
            .iter()
            .map(|l| match l {
                Letter::EtaSmash { .. } | Letter::SmashEta { .. } => format!("({l})"),
                _ => l.to_string(),
            })
            .collect(),
    }
}

/// Objects along a word: `out[p]` is the target of letter p, and the last
/// entry is the source.
pub fn junctions(word: &[Letter], source: Obj) -> Result<Vec<Obj>> {
    let mut out = vec![source];
    for l in word.iter().rev() {
        let next = l.apply(*out.last().unwrap())?;
        out.push(next);
    }
    out.reverse();
    Ok(out)
}

/// A letter as written, before its exponents are inferred from context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawLetter {
    pub kind: LetterKind,
    pub sub: Option<u32>,
    pub sup: Option<u32>,
}

/// Assigns exponents to `raw` so that it runs from `source` to `target`.
pub fn type_word(raw: &[RawLetter], source: Obj, target: Obj) -> Result<Word> {
    let n = raw.len();
    let show = || raw.iter().map(|r| r.kind.name()).collect::<Vec<_>>().join(" ");
    if n == 0 {
        if source != target {
            return Err(Error::IllTyped(format!("a multiple of the identity cannot map {source} to {target}")));
        }
        return Ok(Vec::new());
    }
    // j[p] is the target of letter p; j[n] is the source.
    let mut moore = vec![false; n + 1];
    for (p, r) in raw.iter().enumerate() {
        let (sm, tm, _) = r.kind.shape();
        moore[p] = tm;
        if p + 1 < n && raw[p + 1].kind.shape().1 != sm {
            return Err(Error::IllTyped(format!("{} cannot follow {} in {}", r.kind.name(), raw[p + 1].kind.name(), show())));
        }
        if p + 1 == n {
            moore[n] = sm;
        }
    }
    if moore[n] != source.moore.is_some() || moore[0] != target.moore.is_some() {
        return Err(Error::IllTyped(format!("{} does not map {source} to {target}", show())));
    }
    let mut exp: Vec<Option<u32>> = vec![None; n + 1];
    let set = |exp: &mut Vec<Option<u32>>, i: usize, v: u32| -> Result<bool> {
        match exp[i] {
            Some(old) if old != v => Err(Error::IllTyped(format!("conflicting Moore exponents {old} and {v} in {}", show()))),
            Some(_) => Ok(false),
            None => {
                exp[i] = Some(v);
                Ok(true)
            }
        }
    };
    if let Some(t) = source.moore {
        set(&mut exp, n, t)?;
    }
    if let Some(t) = target.moore {
        set(&mut exp, 0, t)?;
    }
    for (p, r) in raw.iter().enumerate() {
        use LetterKind::*;
        match r.kind {
            XiSub | EtaSub => {
                set(&mut exp, p, r.sub.unwrap())?;
                set(&mut exp, p + 1, r.sup.unwrap())?;
            }
            EtaUp => {
                set(&mut exp, p + 1, r.sup.unwrap())?;
            }
            XiDown => {
                set(&mut exp, p, r.sub.unwrap())?;
            }
            _ => {}
        }
    }
    loop {
        let mut changed = false;
        for (p, r) in raw.iter().enumerate() {
            if matches!(r.kind, LetterKind::EtaSmash | LetterKind::SmashEta) {
                if let Some(v) = exp[p] {
                    changed |= set(&mut exp, p + 1, v)?;
                }
                if let Some(v) = exp[p + 1] {
                    changed |= set(&mut exp, p, v)?;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let get = |i: usize| -> Result<u32> {
        exp[i].ok_or_else(|| Error::IllTyped(format!("cannot infer a Moore exponent in {}", show())))
    };
    let mut word = Vec::with_capacity(n);
    for (p, r) in raw.iter().enumerate() {
        use LetterKind::*;
        word.push(match r.kind {
            I => Letter::I { t: get(p)? },
            Q => Letter::Q { t: get(p + 1)? },
            Eta => Letter::Eta,
            Rho => Letter::Rho,
            Chi => Letter::Chi { src: get(p + 1)?, tgt: get(p)? },
            EtaSmash => Letter::EtaSmash { t: get(p)? },
            SmashEta => Letter::SmashEta { t: get(p)? },
            XiSub => Letter::XiSub { tgt: get(p)?, src: get(p + 1)? },
            EtaSub => Letter::EtaSub { tgt: get(p)?, src: get(p + 1)? },
            EtaUp => Letter::EtaUp { t: get(p + 1)? },
            XiDown => Letter::XiDown { t: get(p)? },
        });
    }
    let j = junctions(&word, source)?;
    if j[0] != target {
        return Err(Error::IllTyped(format!("{} maps {source} to {}, not {target}", fmt_word(&word), j[0])));
    }
    Ok(word)
}

/// One parsed summand: coefficient times a raw word.
pub type RawTerm = (Poly, Vec<RawLetter>);

fn is_bit_start(c: char) -> bool {
    matches!(c, 'κ' | 'ε' | 'δ')
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    env: &'a Env,
}

impl<'a> Lexer<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let t = self.rest().trim_start();
        self.pos = self.src.len() - t.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.pos, msg)
    }

    /// `{expr}`, `(expr)`, `name(args)`, a single identifier, or digits.
    fn group(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        let rest = self.rest();
        let len = match rest.chars().next() {
            Some(open @ ('{' | '(')) => {
                let close = if open == '{' { '}' } else { ')' };
                matching(rest, open, close).ok_or_else(|| self.err("unbalanced group"))?
            }
            Some(c) if c.is_ascii_digit() => rest.chars().take_while(|c| c.is_ascii_digit()).count(),
            Some(c) if c.is_alphabetic() => {
                let first = c.len_utf8();
                let primes = rest[first..].chars().take_while(|&c| c == '\'').count();
                let mut len = first + primes;
                if rest[len..].starts_with('(') {
                    len += matching(&rest[len..], '(', ')').ok_or_else(|| self.err("unbalanced call"))?;
                } else if rest[first..].starts_with(|c: char| is_ident_char(c) && c != '\'') {
                    // Multi-letter names: only function calls like min(...)
                    let name_len: usize = rest.chars().take_while(|&c| is_ident_char(c)).map(char::len_utf8).sum();
                    if rest[name_len..].starts_with('(') {
                        len = name_len + matching(&rest[name_len..], '(', ')').ok_or_else(|| self.err("unbalanced call"))?;
                    }
                }
                len
            }
            _ => return Err(self.err("expected an exponent or index")),
        };
        let text = &self.src[start..start + len];
        self.pos = start + len;
        Expr::parse(text)
            .and_then(|e| e.eval(self.env))
            .map_err(|e| Error::parse(start, format!("in {text:?}: {e}")))
    }

    fn small(&mut self) -> Result<u32> {
        let at = self.pos;
        let v = self.group()?;
        u32::try_from(v).ok().filter(|&v| v >= 1).ok_or_else(|| Error::parse(at, format!("Moore exponent must be >= 1, got {v}")))
    }

    fn letter(&mut self) -> Result<Option<RawLetter>> {
        let raw = |kind| Ok(Some(RawLetter { kind, sub: None, sup: None }));
        self.skip_ws();
        for (s, k) in [
            ("(η∧1)", LetterKind::EtaSmash),
            ("(1∧η)", LetterKind::SmashEta),
            ("η∧1", LetterKind::EtaSmash),
            ("1∧η", LetterKind::SmashEta),
            ("B(χ)", LetterKind::Chi),
        ] {
            if self.eat(s) {
                return raw(k);
            }
        }
        let rest = self.rest();
        if rest.starts_with('η') {
            self.pos += 'η'.len_utf8();
            if self.rest().starts_with('_') {
                self.pos += 1;
                let sub = self.small()?;
                if !self.rest().starts_with('^') {
                    return Err(self.err("η_a needs a superscript, as in η_a^b"));
                }
                self.pos += 1;
                let sup = self.small()?;
                return Ok(Some(RawLetter { kind: LetterKind::EtaSub, sub: Some(sub), sup: Some(sup) }));
            }
            if self.rest().starts_with('^') {
                self.pos += 1;
                let sup = self.small()?;
                return Ok(Some(RawLetter { kind: LetterKind::EtaUp, sub: None, sup: Some(sup) }));
            }
            return raw(LetterKind::Eta);
        }
        if rest.starts_with('ξ') {
            self.pos += 'ξ'.len_utf8();
            if !self.rest().starts_with('_') {
                return Err(self.err("ξ needs a subscript"));
            }
            self.pos += 1;
            let sub = self.small()?;
            if self.rest().starts_with('^') {
                self.pos += 1;
                let sup = self.small()?;
                return Ok(Some(RawLetter { kind: LetterKind::XiSub, sub: Some(sub), sup: Some(sup) }));
            }
            return Ok(Some(RawLetter { kind: LetterKind::XiDown, sub: Some(sub), sup: None }));
        }
        for (c, k) in [('ϱ', LetterKind::Rho), ('i', LetterKind::I), ('q', LetterKind::Q)] {
            if rest.starts_with(c) {
                self.pos += c.len_utf8();
                return raw(k);
            }
        }
        Ok(None)
    }

    fn bit(&mut self) -> Option<String> {
        self.skip_ws();
        let rest = self.rest();
        let c = rest.chars().next().filter(|&c| is_bit_start(c))?;
        let len = c.len_utf8() + rest[c.len_utf8()..].chars().take_while(|&c| c == '\'' || c.is_ascii_digit()).count();
        self.pos += len;
        Some(rest[..len].to_string())
    }

    fn term(&mut self) -> Result<RawTerm> {
        let mut coef = Poly::constant(1);
        let mut word = Vec::new();
        loop {
            let Some(c) = self.peek() else { break };
            if c == '+' || c == '-' || c == ')' {
                break;
            }
            if let Some(l) = self.letter()? {
                word.push(l);
                continue;
            }
            if !word.is_empty() {
                return Err(self.err("coefficients must precede the word"));
            }
            if let Some(b) = self.bit() {
                coef = coef.mul(&Poly::bit(&b));
            } else if c.is_ascii_digit() {
                let start = self.pos;
                let digits = self.rest().chars().take_while(|c| c.is_ascii_digit()).count();
                self.pos += digits;
                let base: i64 = self.src[start..self.pos].parse().map_err(|_| Error::parse(start, "number out of range"))?;
                let v = if self.rest().starts_with('^') {
                    self.pos += 1;
                    let e = self.group()?;
                    u32::try_from(e)
                        .ok()
                        .and_then(|e| base.checked_pow(e))
                        .ok_or_else(|| Error::parse(start, format!("bad power {base}^{e}")))?
                } else {
                    base
                };
                coef = coef.scale(v);
            } else if c == '(' {
                self.pos += 1;
                let inner = self.sum()?;
                if !self.eat(")") {
                    return Err(self.err("expected ')'"));
                }
                let mut p = Poly::zero();
                for (q, w) in inner {
                    if !w.is_empty() {
                        return Err(self.err("a parenthesised coefficient cannot contain letters"));
                    }
                    p = p.add(&q);
                }
                coef = coef.mul(&p);
            } else {
                return Err(self.err(format!("unexpected {c:?}")));
            }
        }
        Ok((coef, word))
    }

    fn sum(&mut self) -> Result<Vec<RawTerm>> {
        let mut out = Vec::new();
        let mut sign = if self.eat("-") {
            -1
        } else {
            self.eat("+");
            1
        };
        loop {
            let start = self.pos;
            let (c, w) = self.term()?;
            if self.pos == start {
                return Err(self.err("expected a term"));
            }
            out.push((c.scale(sign), w));
            if self.eat("+") {
                sign = 1;
            } else if self.eat("-") {
                sign = -1;
            } else {
                return Ok(out);
            }
        }
    }
}

fn matching(s: &str, open: char, close: char) -> Option<usize> {
    let mut depth = 0;
    for (i, c) in s.char_indices() {
        if c == open {
            depth += 1;
        } else if c == close {
            depth -= 1;
            if depth == 0 {
                return Some(i + c.len_utf8());
            }
        }
    }
    None
}

/// Parses a morphism literal into raw terms. Parameters in exponents and
/// indices are evaluated against `env`.
pub fn parse_terms(text: &str, env: &Env) -> Result<Vec<RawTerm>> {
    let mut lx = Lexer { src: text, pos: 0, env };
    let terms = lx.sum()?;
    lx.skip_ws();
    if lx.pos < text.len() {
        return Err(lx.err(format!("unexpected input in {text:?}")));
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::env;

    fn kinds(t: &RawTerm) -> Vec<&'static str> {
        t.1.iter().map(|l| l.kind.name()).collect()
    }

    #[test]
    fn lexes_printed_literals() {
        let e = env([("s", 3), ("s'", 2), ("r", 2), ("u", 1)]);
        let t = parse_terms("ξ_s^{s'} + κ iηηq", &e).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].1[0], RawLetter { kind: LetterKind::XiSub, sub: Some(3), sup: Some(2) });
        assert_eq!(t[1].0, Poly::bit("κ"));
        assert_eq!(kinds(&t[1]), ["i", "η", "η", "q"]);

        let t = parse_terms("-B(χ) - (κ+κ')iηq", &e).unwrap();
        assert_eq!(t[0].0, Poly::constant(-1));
        assert_eq!(t[1].0, Poly::bit("κ").add(&Poly::bit("κ'")).neg());

        let t = parse_terms("-2^{r+u}", &e).unwrap();
        assert_eq!(t, vec![(Poly::constant(-8), vec![])]);
        let t = parse_terms("2^max(r,u) q", &e).unwrap();
        assert_eq!(t[0].0, Poly::constant(4));
        let t = parse_terms("η∧1 + 1∧η + (η∧1)i", &e).unwrap();
        assert_eq!(kinds(&t[2]), ["η∧1", "i"]);
        let t = parse_terms("η_u^r", &e).unwrap();
        assert_eq!((t[0].1[0].sub, t[0].1[0].sup), (Some(1), Some(2)));
    }

    #[test]
    fn lexer_errors_carry_offsets() {
        let e = Env::new();
        match parse_terms("η + @", &e) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("{other:?}"),
        }
        assert!(parse_terms("iη 2", &e).is_err());
        assert!(parse_terms("2^z", &e).is_err());
    }

    #[test]
    fn typing_infers_exponents() {
        let raw = |s: &str| parse_terms(s, &Env::new()).unwrap().remove(0).1;
        let w = type_word(&raw("iηq"), Obj::moore(3, 7), Obj::moore(2, 7)).unwrap();
        assert_eq!(w, vec![Letter::I { t: 2 }, Letter::Eta, Letter::Q { t: 3 }]);
        let w = type_word(&raw("(η∧1)i"), Obj::sphere(7), Obj::moore(2, 6)).unwrap();
        assert_eq!(w, vec![Letter::EtaSmash { t: 2 }, Letter::I { t: 2 }]);
        // wrong dimension
        assert!(type_word(&raw("ηq"), Obj::moore(1, 7), Obj::sphere(8)).is_err());
        // kind mismatch: q cannot follow η
        assert!(type_word(&raw("qη"), Obj::sphere(8), Obj::sphere(8)).is_err());
        assert!(type_word(&[], Obj::sphere(7), Obj::moore(1, 7)).is_err());
        assert_eq!(fmt_word(&w), "(η∧1)i");
    }
}
