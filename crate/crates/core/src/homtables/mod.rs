//! Tabulated stable hom groups [X, Y] with named generators.
//!
//! The tables live in `data/hom_tables.toml`. Setting `CHANG_TABLE_PATH`
//! to a directory containing that file replaces the built-in copy.

pub mod pattern;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{fill_template, Expr};
use crate::invariants::{canonical_orders, format_cyclic};
use crate::model::{Elementary, SmashAtom, Summand, WedgeComplex};
pub use pattern::ComplexPattern;

pub const TABLE_PATH_VAR: &str = "CHANG_TABLE_PATH";
const DEFAULT_TABLE: &str = include_str!("../../data/hom_tables.toml");

#[derive(Deserialize)]
struct RawFile {
    entry: Vec<RawEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    source: String,
    target: String,
    #[serde(default)]
    when: Option<String>,
    #[serde(default)]
    stable_var: Option<String>,
    #[serde(default)]
    stable_from: Option<i64>,
    generators: Vec<(String, String)>,
    #[serde(default)]
    relations: Vec<String>,
    #[serde(default)]
    note: Option<String>,
    cite: String,
}

#[derive(Clone, Debug)]
struct Entry {
    source: ComplexPattern,
    target: ComplexPattern,
    when: Expr,
    stable: Option<(String, i64)>,
    generators: Vec<(Expr, String)>,
    relations: Vec<String>,
    note: Option<String>,
    cite: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub name: String,
    /// 0 for an infinite cyclic generator.
    pub order: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomGroupDescriptor {
    pub source: String,
    pub target: String,
    /// Canonical primary decomposition of the group.
    pub group: Vec<u64>,
    pub generators: Vec<Generator>,
    pub relations: Vec<String>,
    /// Smallest value of the entry's dimension parameter for which it holds.
    pub stable_from: Option<i64>,
    pub note: Option<String>,
    pub cite: String,
}

impl HomGroupDescriptor {
    fn zero(x: &Summand, y: &Summand, why: &str) -> Self {
        HomGroupDescriptor {
            source: x.to_string(),
            target: y.to_string(),
            group: vec![],
            generators: vec![],
            relations: vec![],
            stable_from: None,
            note: None,
            cite: why.to_string(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.group.is_empty()
    }
}

impl fmt::Display for HomGroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.generators.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.generators.iter().map(|g| format!("{}⟨{}⟩", format_cyclic(g.order), g.name)).collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

#[derive(Clone, Debug)]
pub struct HomTables {
    entries: Vec<Entry>,
}

impl HomTables {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawFile = toml::from_str(text).map_err(|e| Error::Data(format!("hom table: {e}")))?;
        let entries = raw
            .entry
            .into_iter()
            .map(|r| {
                let ctx = |e: Error| Error::Data(format!("hom table entry {} -> {}: {e}", r.source, r.target));
                let stable = match (r.stable_var.clone(), r.stable_from) {
                    (Some(v), Some(n)) => Some((v, n)),
                    (None, None) => None,
                    _ => return Err(ctx(Error::Data("stable_var and stable_from go together".into()))),
                };
                Ok(Entry {
                    source: ComplexPattern::parse(&r.source).map_err(ctx)?,
                    target: ComplexPattern::parse(&r.target).map_err(ctx)?,
                    when: match &r.when {
                        Some(w) => Expr::parse(w).map_err(ctx)?,
                        None => Expr::True,
                    },
                    stable,
                    generators: r
                        .generators
                        .iter()
                        .map(|(o, n)| Ok((Expr::parse(o)?, n.clone())))
                        .collect::<Result<_>>()
                        .map_err(ctx)?,
                    relations: r.relations,
                    note: r.note,
                    cite: r.cite,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(HomTables { entries })
    }

    pub fn builtin() -> Self {
        Self::parse(DEFAULT_TABLE).expect("built-in hom table parses")
    }

    pub fn from_dir(dir: &Path) -> Result<Self> {
        let path = dir.join("hom_tables.toml");
        let text = std::fs::read_to_string(&path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The built-in table, or the one under `CHANG_TABLE_PATH` when set.
    pub fn load_default() -> Result<Self> {
        match std::env::var_os(TABLE_PATH_VAR) {
            Some(dir) => Self::from_dir(Path::new(&dir)),
            None => Ok(Self::builtin()),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Concrete (source, target) examples of every entry, instantiated with
    /// parameters in `1..=3` and dimension `base`.
    pub fn sample_pairs(&self, base: i64) -> Vec<(Summand, Summand)> {
        let mut out = Vec::new();
        for e in &self.entries {
            let mut vars = Vec::new();
            for p in [&e.source, &e.target] {
                pattern_vars(p, &mut vars);
            }
            vars.sort();
            vars.dedup();
            let dims = ["n", "k"];
            let mut assignments = vec![crate::expr::Env::new()];
            for v in &vars {
                let range: Vec<i64> = if dims.contains(&v.as_str()) {
                    vec![base]
                } else if v == "p" {
                    vec![2, 3, 5]
                } else {
                    vec![1, 2, 3]
                };
                assignments = assignments
                    .into_iter()
                    .flat_map(|a| {
                        range.iter().map(move |x| {
                            let mut a = a.clone();
                            a.insert(v.clone(), *x);
                            a
                        })
                    })
                    .collect();
            }
            for a in assignments {
                if !e.when.holds(&a).unwrap_or(false) {
                    continue;
                }
                if let (Ok(s), Ok(t)) = (e.source.instantiate(&a), e.target.instantiate(&a)) {
                    out.push((s, t));
                }
            }
        }
        out
    }

    fn lookup(&self, x: &Summand, y: &Summand) -> Result<HomGroupDescriptor> {
        let mut below_stable = None;
        for e in &self.entries {
            let Some(env) = ComplexPattern::match_all(&[(&e.source, x), (&e.target, y)]) else {
                continue;
            };
            if !e.when.holds(&env)? {
                continue;
            }
            if let Some((var, from)) = &e.stable {
                let v = env.get(var).copied().ok_or_else(|| Error::Data(format!("unbound {var} in {}", e.cite)))?;
                if v < *from {
                    below_stable = Some(format!("table needs {var} >= {from}, got {var} = {v}"));
                    continue;
                }
            }
            let mut generators = Vec::new();
            for (order, name) in &e.generators {
                let order = order.eval(&env)?;
                let order = u64::try_from(order).map_err(|_| Error::Data(format!("negative order in {}", e.cite)))?;
                if order != 1 {
                    generators.push(Generator { name: fill_template(name, &env)?, order });
                }
            }
            return Ok(HomGroupDescriptor {
                source: x.to_string(),
                target: y.to_string(),
                group: canonical_orders(generators.iter().map(|g| g.order)),
                generators,
                relations: e.relations.clone(),
                stable_from: e.stable.as_ref().map(|s| s.1),
                note: e.note.clone(),
                cite: e.cite.clone(),
            });
        }
        Err(Error::UntabulatedHom {
            source_desc: x.to_string(),
            target: y.to_string(),
            reason: below_stable.unwrap_or_else(|| "no table entry for this pair and degree".into()),
        })
    }

    /// The stable group [x, y].
    pub fn hom_group(&self, x: &Summand, y: &Summand) -> Result<HomGroupDescriptor> {
        if x.is_point() || y.is_point() {
            return Ok(HomGroupDescriptor::zero(x, y, "trivial"));
        }
        if x.top() < y.bottom() {
            return Ok(HomGroupDescriptor::zero(x, y, "cellular dimensions"));
        }
        // Atoms are tabulated at shift 0; move the pair there.
        let shift = match (x, y) {
            (Summand::Atom(a), Summand::Elementary(_)) | (Summand::Elementary(_), Summand::Atom(a)) => a.shift(),
            _ => 0,
        };
        if shift != 0 {
            let mut d = self.lookup(&x.suspend(-shift), &y.suspend(-shift))?;
            d.source = x.to_string();
            d.target = y.to_string();
            return Ok(d);
        }
        self.lookup(x, y)
    }

    /// [Σ^deg x, y].
    pub fn hom_group_deg(&self, x: &Summand, y: &Summand, deg: i32) -> Result<HomGroupDescriptor> {
        self.hom_group(&x.suspend(deg), y)
    }

    /// π_degree of an atom.
    pub fn atom_homotopy(&self, x: &SmashAtom, degree: i32) -> Result<HomGroupDescriptor> {
        let s = Summand::Elementary(Elementary::Sphere { n: degree });
        self.hom_group(&s, &Summand::Atom(x.clone()))
    }

    /// Orders of [Σ^deg X, Y] as the direct sum over all summand pairs.
    pub fn wedge_hom_order(&self, x: &WedgeComplex, y: &WedgeComplex, deg: i32) -> Result<Vec<u64>> {
        let mut orders = Vec::new();
        for (col, a) in x.summands().iter().enumerate() {
            for (row, b) in y.summands().iter().enumerate() {
                let d = self
                    .hom_group_deg(a, b, deg)
                    .map_err(|e| Error::AtCell { row, col, source: Box::new(e) })?;
                orders.extend(d.group);
            }
        }
        Ok(canonical_orders(orders))
    }
}

fn pattern_vars(p: &ComplexPattern, out: &mut Vec<String>) {
    match p {
        ComplexPattern::Point => {}
        ComplexPattern::Atom(a, b) => {
            pattern_vars(a, out);
            pattern_vars(b, out);
        }
        ComplexPattern::Susp(m, p) => {
            m.vars(out);
            pattern_vars(p, out);
        }
        ComplexPattern::Elem(_, args) => {
            for a in args {
                a.vars(out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Elementary::*;
    use crate::snf::cokernel;

    fn el(e: Elementary) -> Summand {
        Summand::Elementary(e)
    }

    fn group(x: Elementary, y: Elementary) -> Vec<u64> {
        HomTables::builtin().hom_group(&el(x), &el(y)).unwrap().group
    }

    #[test]
    fn sphere_stems() {
        assert_eq!(group(Sphere { n: 5 }, Sphere { n: 5 }), vec![0]);
        assert_eq!(group(Sphere { n: 6 }, Sphere { n: 5 }), vec![2]);
        assert_eq!(group(Sphere { n: 8 }, Sphere { n: 5 }), vec![3, 8]);
        assert_eq!(group(Sphere { n: 4 }, Sphere { n: 5 }), Vec::<u64>::new());
    }

    #[test]
    fn moore_entries() {
        let t = HomTables::builtin();
        let d = t.hom_group(&el(Moore { p: 2, r: 2, n: 4 }), &el(Sphere { n: 4 })).unwrap();
        assert_eq!(d.to_string(), "Z/2⟨ηq⟩");
        let d = t.hom_group(&el(Sphere { n: 8 }), &el(Moore { p: 2, r: 2, n: 5 })).unwrap();
        assert_eq!(d.to_string(), "Z/4⟨iϱ⟩ ⊕ Z/2⟨ρ_2⟩");
        assert_eq!(group(Moore { p: 2, r: 1, n: 4 }, Moore { p: 2, r: 1, n: 4 }), vec![4]);
        assert_eq!(group(Moore { p: 2, r: 3, n: 4 }, Moore { p: 2, r: 2, n: 4 }), vec![2, 4]);
        assert_eq!(group(Moore { p: 2, r: 3, n: 5 }, Moore { p: 2, r: 1, n: 4 }), vec![2, 4]);
    }

    #[test]
    fn below_stable_range_is_untabulated() {
        let t = HomTables::builtin();
        let e = t.hom_group(&el(Sphere { n: 7 }), &el(Moore { p: 2, r: 2, n: 4 })).unwrap_err();
        assert!(matches!(e, Error::UntabulatedHom { ref reason, .. } if reason.contains("n >= 5")));
        let e = t.hom_group(&el(Moore { p: 3, r: 1, n: 4 }), &el(Sphere { n: 4 })).unwrap_err();
        assert!(matches!(e, Error::UntabulatedHom { .. }));
    }

    #[test]
    fn chang_entries() {
        assert_eq!(group(ChangFull { r: 2, k: 7, s: 3 }, Sphere { n: 7 }), vec![8]);
        let t = HomTables::builtin();
        let w = t
            .wedge_hom_order(
                &WedgeComplex::new([el(Sphere { n: 9 })]),
                &WedgeComplex::new([el(ChangBot { r: 3, k: 9 }), el(ChangFull { r: 2, k: 9, s: 3 })]),
                0,
            )
            .unwrap();
        assert_eq!(w, vec![0, 2, 2, 2]);
        assert!(t.wedge_hom_order(&WedgeComplex::new([el(Sphere { n: 9 })]), &WedgeComplex::point(), 0).unwrap().is_empty());
    }

    #[test]
    fn moore_atom_values() {
        let t = HomTables::builtin();
        for r in 1..=3u32 {
            let a = SmashAtom::new(Moore { p: 2, r, n: 3 }, ChangEta { k: 5 }).unwrap();
            let pi = |d| t.atom_homotopy(&a, d).unwrap().group;
            let co = |d| t.hom_group(&Summand::Atom(a.clone()), &el(Sphere { n: d })).unwrap().group;
            let ord = 1u64 << r;
            // π_{2n+3} = Z/24 / ⟨2^r, 12⟩
            let third = cokernel(1, &[vec![24], vec![ord as i128], vec![12]]);
            assert!(pi(7).is_empty());
            assert_eq!(pi(8), vec![ord]);
            assert_eq!(pi(9), third);
            assert!(co(8).is_empty());
            assert_eq!(co(7), vec![ord]);
            assert_eq!(co(6), third);
        }
    }

    #[test]
    fn eta_full_atom_pi9() {
        let t = HomTables::builtin();
        for r in 1..=3u32 {
            for s in 1..=3u32 {
                let a = SmashAtom::new(ChangEta { k: 5 }, ChangFull { r, k: 5, s }).unwrap();
                let got = t.atom_homotopy(&a, 9).unwrap().group;
                let first = if r > 1 { 4 } else { 2 };
                let want = cokernel(3, &[vec![first, 0, 0], vec![0, 2, 0], vec![1, 1, 1 << (s - 1)]]);
                assert_eq!(got, want, "r={r} s={s}");
                // the same atom suspended twice
                let b = a.suspend(2);
                assert_eq!(t.atom_homotopy(&b, 11).unwrap().group, want);
            }
        }
    }

    #[test]
    fn every_sample_is_served_and_duals_agree() {
        let t = HomTables::builtin();
        let pairs = t.sample_pairs(8);
        assert!(pairs.len() > 100);
        for (x, y) in &pairs {
            let d = t.hom_group(x, y).unwrap_or_else(|e| panic!("{x} -> {y}: {e}"));
            let c = 40;
            let (dx, dy) = (x.dual_about(c), y.dual_about(c));
            let dd = t.hom_group(&dy, &dx).unwrap_or_else(|e| panic!("dual of {x} -> {y}: {e}"));
            assert_eq!(d.group, dd.group, "{x} -> {y} vs {dy} -> {dx}");
        }
    }

    #[test]
    fn generator_orders_divide_exponent() {
        let t = HomTables::builtin();
        for (x, y) in t.sample_pairs(8) {
            let d = t.hom_group(&x, &y).unwrap();
            let exp = d.group.iter().fold(1u64, |a, &b| if a == 0 || b == 0 { 0 } else { a / crate::invariants::gcd(a, b) * b });
            for g in &d.generators {
                assert!(exp == 0 || exp % g.order == 0, "{} in {x} -> {y}", g.name);
            }
        }
    }
}
