//! Decision procedure for smash products of classified complexes.
//!
//! Pairs are reduced to base factors (bottom cell in dimension 3) and looked
//! up in the decision table below; the answer lives in the doubled window
//! A_6^4 and is suspended back. Every call through [`smash_decompose`] is
//! checked against Künneth before it is returned.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Elementary, Elementary::*, SmashAtom, Summand, WedgeComplex, Window};
use crate::verifier::{check_decomposition, VerificationReport};

const MAX_DEPTH: usize = 3;

/// One table lookup: the base pair and the rule that fired.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Branch {
    pub left: Elementary,
    pub right: Elementary,
    pub rule: String,
    pub depth: usize,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{} ^ {}: {}", "  ".repeat(self.depth), self.left, self.right, self.rule)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionResult {
    pub input: (WedgeComplex, WedgeComplex),
    pub output: WedgeComplex,
    pub branches: Vec<Branch>,
    pub verification: VerificationReport,
}

/// How a pair was moved onto a table row.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Transform {
    pub swap: bool,
    pub dual: bool,
}

impl Transform {
    const ORDER: [Transform; 4] = [
        Transform { swap: false, dual: false },
        Transform { swap: true, dual: false },
        Transform { swap: false, dual: true },
        Transform { swap: true, dual: true },
    ];

    fn label(&self) -> &'static str {
        match (self.swap, self.dual) {
            (false, false) => "",
            (true, false) => "[swap]",
            (false, true) => "[dual]",
            (true, true) => "[dual,swap]",
        }
    }
}

fn atom(a: Elementary, b: Elementary) -> Summand {
    Summand::Atom(SmashAtom::from_factors(a, b))
}

fn el(e: Elementary) -> Summand {
    Summand::Elementary(e)
}

fn wedge<const N: usize>(items: [Summand; N]) -> WedgeComplex {
    WedgeComplex::new(items)
}

fn base_window() -> Window {
    Window::doubled(6)
}

struct Ctx {
    branches: Vec<Branch>,
}

impl Ctx {
    fn record(&mut self, a: Elementary, b: Elementary, rule: impl Into<String>, depth: usize) {
        self.branches.push(Branch { left: a, right: b, rule: rule.into(), depth });
    }
}

/// Decomposes a pair of base factors. The result has its bottom cell in
/// dimension 6 (or is the point).
fn base_pair(a: Elementary, b: Elementary, depth: usize, ctx: &mut Ctx) -> Result<WedgeComplex> {
    if depth > MAX_DEPTH {
        return Err(Error::UnclassifiedPair(a.to_string(), format!("{b} (recursion depth exceeded)")));
    }
    let (a, b) = if a.kind() <= b.kind() { (a, b) } else { (b, a) };
    let (out, rule) = match (a, b) {
        (Point, _) => (WedgeComplex::point(), "point".to_string()),
        (Sphere { .. }, x) => (x.suspend(3).into(), "sphere".into()),
        (Moore { p, r, .. }, Moore { p: q, r: s, .. }) => moore_moore(p, r, q, s),
        (Moore { p, r, .. }, x) if p != 2 => odd_moore_chang(p, r, x),
        (Moore { r: u, .. }, x) => moore2_chang(a, u, x),
        (ChangEta { .. }, x) => (atom(a, x).into(), format!("eta^{}", short(&x))),
        (ChangTop { .. }, ChangTop { .. }) => (atom(a, b).into(), "top^top".into()),
        (ChangTop { .. }, ChangBot { .. }) => (atom(a, b).into(), "top^bot".into()),
        (ChangBot { .. }, ChangBot { .. }) => (atom(a, b).into(), "bot^bot".into()),
        (ChangTop { s: u, .. }, ChangFull { r, s, .. }) => top_full(u, r, s),
        (ChangBot { r: u, .. }, ChangFull { r, s, .. }) => bot_full(u, r, s),
        (ChangFull { r, s, .. }, ChangFull { r: r2, s: s2, .. }) => {
            return full_full([r, s, r2, s2], a, b, depth, ctx);
        }
        _ => return Err(Error::UnclassifiedPair(a.to_string(), b.to_string())),
    };
    ctx.record(a, b, rule, depth);
    Ok(out)
}

fn short(e: &Elementary) -> &'static str {
    match e.kind() {
        crate::model::Kind::Point => "point",
        crate::model::Kind::Sphere => "sphere",
        crate::model::Kind::Moore => "moore",
        crate::model::Kind::ChangEta => "eta",
        crate::model::Kind::ChangTop => "top",
        crate::model::Kind::ChangBot => "bot",
        crate::model::Kind::ChangFull => "full",
    }
}

fn moore_moore(p: u32, r: u32, q: u32, s: u32) -> (WedgeComplex, String) {
    if p != q {
        return (WedgeComplex::point(), "moore^moore/coprime".into());
    }
    let m = r.min(s);
    let split = wedge([el(Moore { p, r: m, n: 6 }), el(Moore { p, r: m, n: 7 })]);
    if p != 2 {
        (split, "moore^moore/odd".into())
    } else if r == 1 && s == 1 {
        (wedge([el(ChangFull { r: 1, k: 8, s: 1 })]), "moore2^moore2/r=s=1".into())
    } else {
        (split, "moore2^moore2/otherwise".into())
    }
}

fn odd_moore_chang(p: u32, r: u32, x: Elementary) -> (WedgeComplex, String) {
    let m = |n| el(Moore { p, r, n });
    match x {
        ChangEta { .. } => (wedge([m(6), m(8)]), "moore_odd^eta".into()),
        ChangBot { .. } => (wedge([m(8)]), "moore_odd^bot".into()),
        ChangTop { .. } => (wedge([m(6)]), "moore_odd^top".into()),
        _ => (WedgeComplex::point(), "moore_odd^full".into()),
    }
}

fn moore2_chang(m: Elementary, u: u32, x: Elementary) -> (WedgeComplex, String) {
    let eta = ChangEta { k: 5 };
    let m7 = el(Moore { p: 2, r: u, n: 7 });
    match x {
        ChangEta { .. } => (atom(m, x).into(), "moore2^eta".into()),
        ChangBot { r, .. } if u > r => (atom(m, x).into(), "moore2^bot/u>r".into()),
        ChangBot { .. } => (wedge([atom(m, eta), m7]), "moore2^bot/r>=u".into()),
        ChangTop { s, .. } if u > s => (atom(m, x).into(), "moore2^top/u>s".into()),
        ChangTop { .. } => (wedge([atom(m, eta), m7]), "moore2^top/s>=u".into()),
        ChangFull { r, s, .. } => {
            if u > r && u > s {
                (
                    wedge([el(ChangFull { r, k: 8, s }), el(ChangFull { r, k: 9, s })]),
                    "moore2^full/u>r,s".into(),
                )
            } else if r < u && u <= s {
                (wedge([atom(m, ChangBot { r, k: 5 }), m7]), "moore2^full/r<u<=s".into())
            } else if s < u && u <= r {
                (wedge([atom(m, ChangTop { k: 5, s }), m7]), "moore2^full/s<u<=r".into())
            } else {
                (wedge([atom(m, eta), m7, m7]), "moore2^full/u<=r,s".into())
            }
        }
        _ => unreachable!("moore2_chang called with {x}"),
    }
}

/// C_u^5 ∧ C_r^{5,s}.
fn bot_full(u: u32, r: u32, s: u32) -> (WedgeComplex, String) {
    let eta = ChangEta { k: 5 };
    if u >= r && u >= s {
        (
            wedge([el(ChangFull { r, k: 9, s }), atom(eta, ChangFull { r, k: 5, s })]),
            "bot^full/u>=r,s".into(),
        )
    } else if u == s && s < r {
        (
            wedge([el(ChangFull { r: s, k: 9, s: r }), atom(eta, ChangFull { r: s, k: 5, s })]),
            "bot^full/u=s<r".into(),
        )
    } else {
        (
            atom(ChangBot { r: u, k: 5 }, ChangFull { r, k: 5, s }).into(),
            "bot^full/otherwise".into(),
        )
    }
}

/// C^{5,u} ∧ C_r^{5,s}.
fn top_full(u: u32, r: u32, s: u32) -> (WedgeComplex, String) {
    let eta = ChangEta { k: 5 };
    if u >= r && u >= s {
        (
            wedge([el(ChangFull { r, k: 9, s }), atom(eta, ChangFull { r, k: 5, s })]),
            "top^full/u>=r,s".into(),
        )
    } else if u == r && r < s {
        (
            wedge([el(ChangFull { r: s, k: 9, s: r }), atom(eta, ChangFull { r, k: 5, s: r })]),
            "top^full/u=r<s".into(),
        )
    } else {
        (
            atom(ChangTop { k: 5, s: u }, ChangFull { r, k: 5, s }).into(),
            "top^full/otherwise".into(),
        )
    }
}

fn transform_params(t: Transform, [r, s, r2, s2]: [u32; 4]) -> [u32; 4] {
    let [r, s, r2, s2] = if t.dual { [s, r, s2, r2] } else { [r, s, r2, s2] };
    if t.swap {
        [r2, s2, r, s]
    } else {
        [r, s, r2, s2]
    }
}

/// Which rows of the full-by-full table apply once s is maximal.
fn full_full_case([r, s, r2, s2]: [u32; 4]) -> Option<&'static str> {
    if s < r || s < r2 || s < s2 {
        return None;
    }
    if s > r2 && s > s2 {
        return Some("s>r',s'");
    }
    if s == r2 && s > s2 {
        return match s2.cmp(&r) {
            std::cmp::Ordering::Greater => Some("s=r'>s'>r"),
            std::cmp::Ordering::Equal => Some("s=r'>s'=r"),
            std::cmp::Ordering::Less => None,
        };
    }
    if s == r2 && s == s2 {
        return match r.cmp(&s) {
            std::cmp::Ordering::Less => Some("s=r'=s'>r"),
            _ => Some("r=s=r'=s'"),
        };
    }
    // s == s2 > r2
    match r2.cmp(&r) {
        std::cmp::Ordering::Greater => Some("s=s'>r'>r"),
        std::cmp::Ordering::Equal => Some("s=s'>r'=r"),
        std::cmp::Ordering::Less => None,
    }
}

/// Finds the first of identity, swap, dual, dual-then-swap that puts the
/// pair on a table row.
pub fn normalize_pair(a: &Elementary, b: &Elementary) -> Option<(Elementary, Elementary, Transform)> {
    let (ChangFull { r, s, .. }, ChangFull { r: r2, s: s2, .. }) = (*a, *b) else {
        return Some((*a, *b, Transform::default()));
    };
    Transform::ORDER.into_iter().find_map(|t| {
        let [r, s, r2, s2] = transform_params(t, [r, s, r2, s2]);
        full_full_case([r, s, r2, s2])
            .map(|_| (ChangFull { r, k: 5, s }, ChangFull { r: r2, k: 5, s: s2 }, t))
    })
}

fn full_full(params: [u32; 4], a: Elementary, b: Elementary, depth: usize, ctx: &mut Ctx) -> Result<WedgeComplex> {
    let (t, [r, s, r2, s2], case) = Transform::ORDER
        .into_iter()
        .find_map(|t| {
            let p = transform_params(t, params);
            full_full_case(p).map(|c| (t, p, c))
        })
        .ok_or_else(|| Error::UnclassifiedPair(a.to_string(), b.to_string()))?;
    let eta = ChangEta { k: 5 };
    let f9 = |r, s| el(ChangFull { r, k: 9, s });
    let f5 = |r, s| ChangFull { r, k: 5, s };
    ctx.record(a, b, format!("full^full{}/{case}", t.label()), depth);
    let out = match case {
        "s>r',s'" => {
            let tail = base_pair(ChangBot { r, k: 5 }, f5(r2, s2), depth + 1, ctx)?;
            WedgeComplex::from(f9(r2, s2)).wedge(&tail)
        }
        "s=r'>s'>r" => wedge([f9(r, s), atom(ChangTop { k: 5, s: s2 }, f5(r, s))]),
        "s=r'>s'=r" => wedge([f9(r2, s2), f9(s2, r2), atom(eta, f5(r, r))]),
        "s=r'=s'>r" => wedge([f9(r, s), f9(r, s), atom(eta, f5(r, s))]),
        "r=s=r'=s'" => wedge([f9(s, s), f9(s, s), atom(eta, f5(s, s))]),
        "s=s'>r'>r" => wedge([f9(r, s), atom(ChangBot { r: r2, k: 5 }, f5(r, s))]),
        "s=s'>r'=r" => wedge([f9(r, s), atom(ChangBot { r, k: 5 }, f5(r, s))]),
        _ => unreachable!(),
    };
    if t.dual {
        out.dual_in(base_window())
    } else {
        Ok(out)
    }
}

/// Decomposes a pair of elementary complexes at any dimensions.
pub fn decompose_pair(a: &Elementary, b: &Elementary) -> Result<(WedgeComplex, String)> {
    let mut ctx = Ctx { branches: Vec::new() };
    let out = pair_with_branches(a, b, &mut ctx)?;
    let rule = ctx.branches.first().map(|b| b.rule.clone()).unwrap_or_default();
    Ok((out, rule))
}

fn pair_with_branches(a: &Elementary, b: &Elementary, ctx: &mut Ctx) -> Result<WedgeComplex> {
    if let (Sphere { n }, x) | (x, Sphere { n }) = (*a, *b) {
        ctx.record(*a, *b, "sphere", 0);
        return Ok(x.suspend(n).into());
    }
    let (a0, ma) = a.to_base();
    let (b0, mb) = b.to_base();
    Ok(base_pair(a0, b0, 0, ctx)?.suspend(ma + mb))
}

/// True when the table answers `a ∧ b` with the single atom on that pair.
pub fn is_indecomposable_pair(a: &Elementary, b: &Elementary) -> bool {
    match decompose_pair(a, b) {
        Ok((w, _)) => matches!(w.summands(), [Summand::Atom(x)] if *x == SmashAtom::from_factors(*a, *b)),
        Err(_) => false,
    }
}

/// Decomposes X ∧ Y without the verification step.
pub fn decompose_wedges(x: &WedgeComplex, y: &WedgeComplex) -> Result<(WedgeComplex, Vec<Branch>)> {
    let mut ctx = Ctx { branches: Vec::new() };
    let mut out = WedgeComplex::point();
    for s in x.summands() {
        for t in y.summands() {
            let piece = match (s, t) {
                (Summand::Elementary(a), Summand::Elementary(b)) => pair_with_branches(a, b, &mut ctx)?,
                (Summand::Elementary(Sphere { n }), Summand::Atom(at))
                | (Summand::Atom(at), Summand::Elementary(Sphere { n })) => {
                    ctx.record(Sphere { n: *n }, at.left(), "sphere^atom", 0);
                    Summand::Atom(at.suspend(*n)).into()
                }
                _ => return Err(Error::UnclassifiedPair(s.to_string(), t.to_string())),
            };
            out = out.wedge(&piece);
        }
    }
    Ok((out, ctx.branches))
}

/// Decomposes X ∧ Y and verifies the answer against Künneth and the Cartan
/// tensor module. Fails if homology does not match.
pub fn smash_decompose(x: &WedgeComplex, y: &WedgeComplex) -> Result<DecompositionResult> {
    let (output, branches) = decompose_wedges(x, y)?;
    let verification = check_decomposition(x, y, &output);
    if !verification.homology_match {
        return Err(Error::VerificationFailed {
            input: format!("({x}) ^ ({y})"),
            detail: format!("homology of {output} differs from Künneth"),
        });
    }
    Ok(DecompositionResult {
        input: (x.clone(), y.clone()),
        output,
        branches,
        verification,
    })
}

/// Every rule id the table can emit, for coverage reports.
pub fn rule_ids() -> Vec<String> {
    let mut ids: Vec<String> = [
        "point",
        "sphere",
        "moore^moore/coprime",
        "moore^moore/odd",
        "moore2^moore2/r=s=1",
        "moore2^moore2/otherwise",
        "moore_odd^eta",
        "moore_odd^top",
        "moore_odd^bot",
        "moore_odd^full",
        "moore2^eta",
        "moore2^bot/u>r",
        "moore2^bot/r>=u",
        "moore2^top/u>s",
        "moore2^top/s>=u",
        "moore2^full/u>r,s",
        "moore2^full/r<u<=s",
        "moore2^full/s<u<=r",
        "moore2^full/u<=r,s",
        "eta^eta",
        "eta^top",
        "eta^bot",
        "eta^full",
        "top^top",
        "top^bot",
        "bot^bot",
        "bot^full/u>=r,s",
        "bot^full/u=s<r",
        "bot^full/otherwise",
        "top^full/u>=r,s",
        "top^full/u=r<s",
        "top^full/otherwise",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for case in [
        "s>r',s'",
        "s=r'>s'>r",
        "s=r'>s'=r",
        "s=r'=s'>r",
        "r=s=r'=s'",
        "s=s'>r'>r",
        "s=s'>r'=r",
    ] {
        ids.push(format!("full^full/{case}"));
    }
    ids
}

/// Strips the transform marker from a full-by-full rule id.
pub fn base_rule(rule: &str) -> String {
    match (rule.find('['), rule.find(']')) {
        (Some(i), Some(j)) => format!("{}{}", &rule[..i], &rule[j + 1..]),
        _ => rule.to_string(),
    }
}

/// The base factors used to enumerate the table: every kind with parameters
/// in {1,2,3} and Moore primes in {2,3,5}.
pub fn table_factors() -> Vec<Elementary> {
    let mut out = vec![Sphere { n: 3 }, ChangEta { k: 5 }];
    for p in [2, 3, 5] {
        for r in 1..=3 {
            out.push(Moore { p, r, n: 3 });
        }
    }
    for r in 1..=3 {
        out.push(ChangTop { k: 5, s: r });
        out.push(ChangBot { r, k: 5 });
        for s in 1..=3 {
            out.push(ChangFull { r, k: 5, s });
        }
    }
    out
}

/// Unordered pairs of table factors.
pub fn table_pairs() -> Vec<(Elementary, Elementary)> {
    let f = table_factors();
    let mut out = Vec::new();
    for i in 0..f.len() {
        for j in i..f.len() {
            out.push((f[i], f[j]));
        }
    }
    out
}
