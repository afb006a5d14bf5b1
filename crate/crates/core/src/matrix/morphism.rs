//! Formal morphisms: finite sums of words with bit-polynomial coefficients,
//! reduced by the relation table and the known orders of the words.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::expr::{Env, Expr};
use crate::homtables::TABLE_PATH_VAR;

use super::poly::{Poly, Valuation};
use super::word::{fmt_word, junctions, parse_terms, type_word, Letter, LetterKind, Obj, Word};

pub const DEFAULT_RELATIONS: &str = include_str!("../../data/relations.toml");

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRules {
    rule: Vec<RawRule>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    id: String,
    lhs: (String, String),
    when: Option<String>,
    rhs: String,
    cite: String,
}

#[derive(Clone, Debug)]
pub struct Rule {
    pub id: String,
    pub left: LetterKind,
    pub right: LetterKind,
    pub when: Expr,
    pub rhs: String,
    pub cite: String,
}

/// Composition rules for letter pairs that meet at a Moore space.
#[derive(Clone, Debug)]
pub struct RelationTable {
    rules: Vec<Rule>,
}

impl RelationTable {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawRules = toml::from_str(text).map_err(|e| Error::Data(format!("relation table: {e}")))?;
        let kind = |s: &str| LetterKind::from_name(s).ok_or_else(|| Error::Data(format!("unknown letter {s:?} in relation table")));
        let rules = raw
            .rule
            .into_iter()
            .map(|r| {
                Ok(Rule {
                    left: kind(&r.lhs.0)?,
                    right: kind(&r.lhs.1)?,
                    when: Expr::parse(r.when.as_deref().unwrap_or("otherwise"))?,
                    rhs: r.rhs,
                    cite: r.cite,
                    id: r.id,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RelationTable { rules })
    }

    pub fn builtin() -> Self {
        Self::parse(DEFAULT_RELATIONS).expect("built-in relation table parses")
    }

    /// Reads `dir/relations.toml`.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let path = dir.join("relations.toml");
        let text = std::fs::read_to_string(&path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The built-in table, or the one under `$CHANG_TABLE_PATH` when set.
    pub fn load_default() -> Result<Self> {
        match std::env::var_os(TABLE_PATH_VAR) {
            Some(dir) => Self::from_dir(Path::new(&dir)),
            None => Ok(Self::builtin()),
        }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Rewrites `left ∘ right` (running from `x` through `y` to `z`).
    fn rewrite(&self, left: Letter, right: Letter, x: Obj, y: Obj, z: Obj) -> Result<Vec<(Poly, Word)>> {
        let mut env = Env::new();
        for (name, o) in [("x", x), ("y", y), ("z", z)] {
            if let Some(t) = o.moore {
                env.insert(name.into(), t as i64);
            }
        }
        for rule in &self.rules {
            if rule.left != left.kind() || rule.right != right.kind() || !rule.when.holds(&env).unwrap_or(false) {
                continue;
            }
            let terms = parse_terms(&rule.rhs, &env).map_err(|e| Error::Data(format!("rule {}: {e}", rule.id)))?;
            return terms
                .into_iter()
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, raw)| Ok((c, type_word(&raw, x, z)?)))
                .collect();
        }
        Err(Error::UnknownComposition(left.to_string(), right.to_string()))
    }
}

/// `word` rewritten until no two letters meet at a Moore space.
fn reduce_word(word: Word, source: Obj, rel: &RelationTable, depth: usize) -> Result<Vec<(Poly, Word)>> {
    if depth > 64 {
        return Err(Error::Data(format!("relation rewriting does not terminate on {}", fmt_word(&word))));
    }
    let word: Word = word.into_iter().filter(|l| !matches!(l, Letter::Chi { src, tgt } if src == tgt)).collect();
    let j = junctions(&word, source)?;
    for p in 0..word.len().saturating_sub(1) {
        if j[p + 1].moore.is_none() {
            continue;
        }
        let rhs = rel.rewrite(word[p], word[p + 1], j[p + 2], j[p + 1], j[p])?;
        let mut out = Vec::new();
        for (c, mid) in rhs {
            let mut w = word[..p].to_vec();
            w.extend(mid);
            w.extend_from_slice(&word[p + 2..]);
            for (c2, w2) in reduce_word(w, source, rel, depth + 1)? {
                out.push((c.mul(&c2), w2));
            }
        }
        return Ok(out);
    }
    Ok(vec![(Poly::constant(1), word)])
}

/// The additive order of a normal-form word, with the word that twice a
/// generator equals when the group is Z/4 and its elements are written in
/// the basis {w, alias}.
fn order(word: &[Letter], source: Obj) -> Option<(i64, Option<Word>)> {
    let iηq = |s: u32, t: u32| vec![Letter::I { t }, Letter::Eta, Letter::Q { t: s }];
    let iηηq = |s: u32, t: u32| vec![Letter::I { t }, Letter::Eta, Letter::Eta, Letter::Q { t: s }];
    match word {
        [] => match source.moore {
            None => None,
            Some(1) => Some((4, Some(iηq(1, 1)))),
            Some(t) => Some((1 << t, None)),
        },
        [Letter::Rho] => Some((24, None)),
        w if w.contains(&Letter::Rho) => None,
        [Letter::XiSub { tgt: 1, src }] if *src > 1 => Some((4, Some(iηηq(*src, 1)))),
        [Letter::EtaSub { tgt, src: 1 }] if *tgt > 1 => Some((4, Some(iηηq(1, *tgt)))),
        [Letter::EtaUp { t: 1 }] => Some((4, Some(vec![Letter::Eta, Letter::Eta, Letter::Q { t: 1 }]))),
        [Letter::XiDown { t: 1 }] => Some((4, Some(vec![Letter::I { t: 1 }, Letter::Eta, Letter::Eta]))),
        w if w.iter().any(|l| l.is_eta_type()) => Some((2, None)),
        [Letter::I { t }] | [Letter::Q { t }] => Some((1 << t, None)),
        [Letter::Chi { src, tgt }] => Some((1 << (*src).min(*tgt), None)),
        _ => None,
    }
}

/// A sum of typed words from `source` to `target`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormalMorphism {
    pub source: Obj,
    pub target: Obj,
    terms: BTreeMap<Word, Poly>,
}

impl FormalMorphism {
    pub fn zero(source: Obj, target: Obj) -> Self {
        FormalMorphism { source, target, terms: BTreeMap::new() }
    }

    pub fn scalar(obj: Obj, k: i64) -> Self {
        let mut f = Self::zero(obj, obj);
        f.terms.insert(Vec::new(), Poly::constant(k));
        f.normalized()
    }

    pub fn identity(obj: Obj) -> Self {
        Self::scalar(obj, 1)
    }

    pub fn parse(text: &str, source: Obj, target: Obj, env: &Env) -> Result<Self> {
        let mut f = Self::zero(source, target);
        for (c, raw) in parse_terms(text, env)? {
            if c.is_zero() {
                continue;
            }
            let w = type_word(&raw, source, target)?;
            f.add_term(w, c);
        }
        Ok(f.normalized())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Poly)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The single (word, coefficient) pair, if there is exactly one.
    pub fn single(&self) -> Option<(&Word, &Poly)> {
        let mut it = self.terms.iter();
        let first = it.next()?;
        it.next().is_none().then_some(first)
    }

    /// Matches `c·w` for a constant c.
    pub fn as_multiple(&self) -> Option<(&Word, i64)> {
        let (w, c) = self.single()?;
        Some((w, c.as_constant()?))
    }

    pub fn bits(&self) -> BTreeSet<String> {
        self.terms.values().flat_map(Poly::bits).collect()
    }

    fn add_term(&mut self, w: Word, c: Poly) {
        let e = self.terms.entry(w).or_default();
        *e = e.add(&c);
    }

    fn check_same_type(&self, other: &Self) -> Result<()> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::IllTyped(format!(
                "cannot add {} -> {} to {} -> {}",
                other.source, other.target, self.source, self.target
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_type(other)?;
        let mut f = self.clone();
        for (w, c) in &other.terms {
            f.add_term(w.clone(), c.clone());
        }
        Ok(f.normalized())
    }

    pub fn neg(&self) -> Self {
        self.scale(&Poly::constant(-1))
    }

    pub fn scale(&self, k: &Poly) -> Self {
        let mut f = Self::zero(self.source, self.target);
        for (w, c) in &self.terms {
            f.add_term(w.clone(), c.mul(k));
        }
        f.normalized()
    }

    /// `self ∘ g`, where g runs into the source of self.
    pub fn compose(&self, g: &Self, rel: &RelationTable) -> Result<Self> {
        if g.target != self.source {
            return Err(Error::IllTyped(format!(
                "cannot compose {} -> {} after {} -> {}",
                self.source, self.target, g.source, g.target
            )));
        }
        let mut f = Self::zero(g.source, self.target);
        for (wf, cf) in &self.terms {
            for (wg, cg) in &g.terms {
                let mut w = wf.clone();
                w.extend_from_slice(wg);
                for (c, w) in reduce_word(w, g.source, rel, 0)? {
                    f.add_term(w, c.mul(cf).mul(cg));
                }
            }
        }
        Ok(f.normalized())
    }

    /// Reduces coefficients modulo word orders and drops zero terms.
    fn normalized(mut self) -> Self {
        let mut pending: Vec<Word> = self.terms.keys().cloned().collect();
        while let Some(w) = pending.pop() {
            let Some(c) = self.terms.get(&w).cloned() else { continue };
            if let Some((ord, alias)) = order(&w, self.source) {
                let (lo, _) = c.divmod(ord);
                match alias {
                    Some(a) => {
                        let (bit0, twice) = lo.divmod(2);
                        self.terms.insert(w, bit0);
                        if !twice.is_zero() {
                            self.add_term(a.clone(), twice);
                            pending.push(a);
                        }
                    }
                    None => {
                        self.terms.insert(w, lo);
                    }
                }
            }
        }
        self.terms.retain(|_, c| !c.is_zero());
        self
    }

    /// Substitutes bit values.
    pub fn eval(&self, v: &Valuation) -> Self {
        let mut f = Self::zero(self.source, self.target);
        for (w, c) in &self.terms {
            f.add_term(w.clone(), c.eval(v));
        }
        f.normalized()
    }

    /// Induced map on cellular chains, rows indexed by target cells and
    /// columns by source cells.
    pub fn chain_map(&self) -> Result<Vec<Vec<i64>>> {
        let mut total = zero_matrix(self.target.cells().len(), self.source.cells().len());
        for (w, c) in &self.terms {
            let m = word_chain_map(w, self.source)?;
            if m.iter().flatten().all(|&x| x == 0) {
                continue;
            }
            let k = c.as_constant().ok_or_else(|| {
                Error::Data(format!("symbolic coefficient {c} on {} has no cellular value", fmt_word(w)))
            })?;
            for (row, mrow) in total.iter_mut().zip(&m) {
                for (x, y) in row.iter_mut().zip(mrow) {
                    *x += k * y;
                }
            }
        }
        Ok(total)
    }
}

fn zero_matrix(r: usize, c: usize) -> Vec<Vec<i64>> {
    vec![vec![0; c]; r]
}

fn word_chain_map(w: &[Letter], source: Obj) -> Result<Vec<Vec<i64>>> {
    let j = junctions(w, source)?;
    let target = j[0];
    if w.iter().any(|l| l.has_positive_stem()) {
        return Ok(zero_matrix(target.cells().len(), source.cells().len()));
    }
    // Identity on the source cells, then letters right to left.
    let n = source.cells().len();
    let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|k| i64::from(i == k)).collect()).collect();
    for l in w.iter().rev() {
        let step: Vec<Vec<i64>> = match *l {
            Letter::I { .. } => vec![vec![1], vec![0]],
            Letter::Q { .. } => vec![vec![0, 1]],
            Letter::Chi { src, tgt } => {
                let b = 1i64 << tgt.saturating_sub(src);
                let t = 1i64 << src.saturating_sub(tgt);
                vec![vec![b, 0], vec![0, t]]
            }
            _ => unreachable!("positive-stem letters handled above"),
        };
        m = step
            .iter()
            .map(|row| (0..n).map(|c| row.iter().zip(&m).map(|(a, mr)| a * mr[c]).sum()).collect())
            .collect();
    }
    Ok(m)
}

impl fmt::Display for FormalMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let word = fmt_word(w);
            let (neg, body) = match c.as_constant() {
                Some(k) if w.is_empty() => (k < 0, k.abs().to_string()),
                Some(k) if k.abs() == 1 => (k < 0, word),
                Some(k) => (k < 0, format!("{}{word}", k.abs())),
                None => {
                    let single = c.terms().count() == 1 && c.terms().all(|(_, k)| k == 1);
                    if single {
                        (false, format!("{c} {word}"))
                    } else {
                        (false, format!("({c}){word}"))
                    }
                }
            };
            match (i, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::env;

    fn fm(s: &str, src: Obj, tgt: Obj) -> FormalMorphism {
        FormalMorphism::parse(s, src, tgt, &env([("r", 2), ("s", 3), ("u", 1)])).unwrap()
    }

    #[test]
    fn spec_compositions() {
        let rel = RelationTable::builtin();
        let s = Obj::sphere;
        let m2 = |d| Obj::moore(2, d);
        // (ηq)(iη) = 0 through q∘i
        let a = fm("ηq", m2(7), s(7));
        let b = fm("iη", s(8), m2(7));
        assert!(a.compose(&b, &rel).unwrap().is_zero());
        // 2∘η = 0
        let two = FormalMorphism::scalar(s(7), 2);
        assert!(two.compose(&fm("η", s(8), s(7)), &rel).unwrap().is_zero());
        // η^t ∘ i = η
        let e = fm("η^2", m2(8), s(7)).compose(&fm("i", s(8), m2(8)), &rel).unwrap();
        assert_eq!(e, fm("η", s(8), s(7)));
        // q(η∧1) = ηq
        let e = fm("q", m2(7), s(8)).compose(&fm("η∧1", m2(8), m2(7)), &rel).unwrap();
        assert_eq!(e, fm("ηq", m2(8), s(8)));
    }

    #[test]
    fn chi_rules_introduce_kappa_prime() {
        let rel = RelationTable::builtin();
        let (r, u) = (3, 1);
        let eta = fm("1∧η", Obj::moore(u, 7), Obj::moore(u, 6));
        let chi = fm("B(χ)", Obj::moore(r, 7), Obj::moore(u, 7));
        let got = eta.compose(&chi, &rel).unwrap();
        assert_eq!(got.to_string(), "κ' iηηq + η_1^3");
        // B(χ) i and q B(χ) pick up the cell degrees.
        let chi = fm("B(χ)", Obj::moore(1, 7), Obj::moore(3, 7));
        let bi = chi.compose(&fm("i", Obj::sphere(7), Obj::moore(1, 7)), &rel).unwrap();
        assert_eq!(bi.to_string(), "4i");
        let qb = fm("q", Obj::moore(3, 7), Obj::sphere(8)).compose(&chi, &rel).unwrap();
        assert_eq!(qb.to_string(), "q");
    }

    #[test]
    fn unknown_pairs_are_refused() {
        let rel = RelationTable::builtin();
        let e = fm("η∧1", Obj::moore(2, 7), Obj::moore(2, 6));
        let err = e.compose(&fm("η∧1", Obj::moore(2, 8), Obj::moore(2, 7)), &rel).unwrap_err();
        assert!(matches!(err, Error::UnknownComposition(..)));
    }

    #[test]
    fn orders_and_aliases() {
        // 2·1 on M_2 is iηq, and 4·1 = 0.
        let m = Obj::moore(1, 6);
        assert_eq!(FormalMorphism::scalar(m, 2), fm("iηq", m, m));
        assert!(FormalMorphism::scalar(m, 4).is_zero());
        assert_eq!(fm("-2 + iηq", m, m), FormalMorphism::zero(m, m));
        // identity on M_{2^3} has order 8; the sphere has none.
        assert!(FormalMorphism::scalar(Obj::moore(3, 6), 8).is_zero());
        assert_eq!(FormalMorphism::scalar(Obj::sphere(6), 8).to_string(), "8");
        // 2ξ_1^s = iηηq
        let x = fm("2ξ_1^3", Obj::moore(3, 8), Obj::moore(1, 7));
        assert_eq!(x, fm("iηηq", Obj::moore(3, 8), Obj::moore(1, 7)));
        // -η = η
        assert_eq!(fm("-η", Obj::sphere(8), Obj::sphere(7)).to_string(), "η");
        // 2^r i into M_{2^s} vanishes when r >= s
        assert!(fm("4i", Obj::sphere(7), Obj::moore(2, 7)).is_zero());
    }

    #[test]
    fn display_round_trips() {
        let m = |t| Obj::moore(t, 7);
        for (s, src, tgt) in [
            ("ξ_3^2 + κ iηηq", Obj::moore(2, 8), m(3)),
            ("-B(χ) - (κ + κ')iηq", m(3), m(1)),
            ("1 + κ iηq", m(2), m(2)),
            ("-4", Obj::sphere(7), Obj::sphere(7)),
        ] {
            let f = FormalMorphism::parse(s, src, tgt, &Env::new()).unwrap();
            let again = FormalMorphism::parse(&f.to_string(), src, tgt, &Env::new()).unwrap();
            assert_eq!(f, again, "{s} printed as {f}");
        }
    }

    #[test]
    fn chain_maps() {
        let f = fm("B(χ)", Obj::moore(1, 7), Obj::moore(3, 7));
        assert_eq!(f.chain_map().unwrap(), vec![vec![4, 0], vec![0, 1]]);
        let g = fm("3i", Obj::sphere(7), Obj::moore(3, 7));
        assert_eq!(g.chain_map().unwrap(), vec![vec![3], vec![0]]);
        assert_eq!(fm("κ iηq", Obj::moore(2, 7), Obj::moore(2, 7)).chain_map().unwrap(), vec![vec![0, 0]; 2]);
    }
}
