use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::model::{Elementary, SmashAtom, Summand, WedgeComplex};

/// A Steenrod operation stored on a module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Sq {
    Sq1,
    Sq2,
    Sq4,
}

impl Sq {
    pub const ALL: [Sq; 3] = [Sq::Sq1, Sq::Sq2, Sq::Sq4];

    pub fn degree(self) -> i32 {
        match self {
            Sq::Sq1 => 1,
            Sq::Sq2 => 2,
            Sq::Sq4 => 4,
        }
    }
}

/// Vectors in one degree are bitmasks over that degree's basis.
pub type F2Vec = u64;

/// Mod-2 cohomology with Sq¹, Sq², Sq⁴ actions.
///
/// `ops[(op, d)][j]` is the image of the j-th basis element of degree d,
/// as a mask over the basis in degree d + |op|.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SqModule {
    basis: BTreeMap<i32, Vec<String>>,
    ops: BTreeMap<(Sq, i32), Vec<F2Vec>>,
}

pub fn f2_rank(vectors: &[F2Vec]) -> usize {
    let mut pivots: Vec<F2Vec> = Vec::new();
    for &v in vectors {
        let mut x = v;
        for &p in &pivots {
            x = x.min(x ^ p);
        }
        if x != 0 {
            pivots.push(x);
            pivots.sort_by(|a, b| b.cmp(a));
        }
    }
    pivots.len()
}

fn bits(mask: F2Vec) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

impl SqModule {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a basis element and returns its index within its degree.
    pub fn add_cell(&mut self, degree: i32, label: impl Into<String>) -> usize {
        let v = self.basis.entry(degree).or_default();
        v.push(label.into());
        assert!(v.len() <= 64, "degree {degree} exceeds 64 basis elements");
        v.len() - 1
    }

    /// Adds `target` (an index in degree d + |op|) to the image of `source`.
    pub fn add_action(&mut self, op: Sq, degree: i32, source: usize, target: usize) {
        let n = self.dim(degree);
        let col = self.ops.entry((op, degree)).or_insert_with(|| vec![0; n]);
        col.resize(n, 0);
        col[source] ^= 1 << target;
    }

    pub fn dim(&self, degree: i32) -> usize {
        self.basis.get(&degree).map_or(0, |v| v.len())
    }

    pub fn degrees(&self) -> Vec<i32> {
        self.basis.keys().copied().collect()
    }

    pub fn labels(&self, degree: i32) -> &[String] {
        self.basis.get(&degree).map_or(&[], |v| v.as_slice())
    }

    pub fn index_of(&self, degree: i32, label: &str) -> Option<usize> {
        self.labels(degree).iter().position(|l| l == label)
    }

    pub fn poincare(&self) -> BTreeMap<i32, usize> {
        self.basis.iter().filter(|(_, v)| !v.is_empty()).map(|(d, v)| (*d, v.len())).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.basis.values().map(|v| v.len()).sum()
    }

    /// Sq^op applied to a vector in degree d.
    pub fn apply(&self, op: Sq, degree: i32, v: F2Vec) -> F2Vec {
        let Some(col) = self.ops.get(&(op, degree)) else {
            return 0;
        };
        bits(v).fold(0, |acc, j| acc ^ col.get(j).copied().unwrap_or(0))
    }

    /// Sq^i for 0 ≤ i ≤ 4, with Sq³ = Sq¹Sq².
    pub fn apply_total(&self, i: u8, degree: i32, v: F2Vec) -> F2Vec {
        match i {
            0 => v,
            1 => self.apply(Sq::Sq1, degree, v),
            2 => self.apply(Sq::Sq2, degree, v),
            3 => self.apply(Sq::Sq1, degree + 2, self.apply(Sq::Sq2, degree, v)),
            4 => self.apply(Sq::Sq4, degree, v),
            _ => 0,
        }
    }

    /// Applies a composite, rightmost operation first.
    pub fn apply_word(&self, word: &[Sq], degree: i32, v: F2Vec) -> F2Vec {
        let mut d = degree;
        let mut x = v;
        for &op in word.iter().rev() {
            x = self.apply(op, d, x);
            d += op.degree();
        }
        x
    }

    pub fn word_rank(&self, word: &[Sq], degree: i32) -> usize {
        let images: Vec<F2Vec> = (0..self.dim(degree)).map(|j| self.apply_word(word, degree, 1 << j)).collect();
        f2_rank(&images)
    }

    /// Named image lookup: Sq^op(label) as a sorted list of labels.
    pub fn image_labels(&self, op: Sq, degree: i32, label: &str) -> Vec<String> {
        let Some(j) = self.index_of(degree, label) else {
            return vec![];
        };
        let target = self.labels(degree + op.degree());
        let mut out: Vec<String> = bits(self.apply(op, degree, 1 << j)).map(|t| target[t].clone()).collect();
        out.sort();
        out
    }

    pub fn shift(&self, m: i32) -> Self {
        SqModule {
            basis: self.basis.iter().map(|(d, v)| (d + m, v.clone())).collect(),
            ops: self.ops.iter().map(|((op, d), v)| ((*op, d + m), v.clone())).collect(),
        }
    }

    pub fn map_labels(&self, f: impl Fn(&str) -> String) -> Self {
        SqModule {
            basis: self.basis.iter().map(|(d, v)| (*d, v.iter().map(|l| f(l)).collect())).collect(),
            ops: self.ops.clone(),
        }
    }

    /// Marks labels of a second factor: u3 becomes u'3.
    pub fn primed(&self) -> Self {
        self.map_labels(|l| {
            let mut chars = l.chars();
            match chars.next() {
                Some(c) => format!("{c}'{}", chars.as_str()),
                None => String::new(),
            }
        })
    }

    pub fn direct_sum(&self, other: &SqModule) -> Self {
        let mut out = self.clone();
        let offsets: BTreeMap<i32, usize> = other.basis.keys().map(|d| (*d, out.dim(*d))).collect();
        for (d, labels) in &other.basis {
            for l in labels {
                out.add_cell(*d, l.clone());
            }
        }
        for ((op, d), cols) in &other.ops {
            let src = offsets[d];
            let tgt = offsets.get(&(d + op.degree())).copied().unwrap_or(0);
            for (j, &mask) in cols.iter().enumerate() {
                for t in bits(mask) {
                    out.add_action(*op, *d, src + j, tgt + t);
                }
            }
        }
        out
    }

    /// Permutes the basis of each degree; `perm[d][j]` is the new index of old j.
    pub fn permuted(&self, perm: &BTreeMap<i32, Vec<usize>>) -> Self {
        let mut out = SqModule::new();
        for (d, labels) in &self.basis {
            let p = &perm[d];
            let mut new = vec![String::new(); labels.len()];
            for (j, l) in labels.iter().enumerate() {
                new[p[j]] = l.clone();
            }
            out.basis.insert(*d, new);
        }
        for ((op, d), cols) in &self.ops {
            let p = &perm[d];
            let q = perm.get(&(d + op.degree()));
            let mut new = vec![0; cols.len()];
            for (j, &mask) in cols.iter().enumerate() {
                new[p[j]] = bits(mask).fold(0, |acc, t| acc | 1 << q.unwrap()[t]);
            }
            out.ops.insert((*op, *d), new);
        }
        out
    }

    /// Per degree: dimension and the ranks of Sq¹, Sq², Sq⁴, Sq¹Sq², Sq²Sq¹, Sq²Sq².
    pub fn invariant_vector(&self) -> Vec<(i32, [usize; 7])> {
        use Sq::*;
        self.degrees()
            .into_iter()
            .filter(|d| self.dim(*d) > 0)
            .map(|d| {
                (
                    d,
                    [
                        self.dim(d),
                        self.word_rank(&[Sq1], d),
                        self.word_rank(&[Sq2], d),
                        self.word_rank(&[Sq4], d),
                        self.word_rank(&[Sq1, Sq2], d),
                        self.word_rank(&[Sq2, Sq1], d),
                        self.word_rank(&[Sq2, Sq2], d),
                    ],
                )
            })
            .collect()
    }

    /// Degrees where Sq¹Sq¹ = 0 or the Adem relation Sq²Sq² = Sq¹Sq²Sq¹ fails.
    pub fn relation_failures(&self) -> Vec<String> {
        use Sq::*;
        let mut out = Vec::new();
        for d in self.degrees() {
            for j in 0..self.dim(d) {
                let v = 1 << j;
                if self.apply_word(&[Sq1, Sq1], d, v) != 0 {
                    out.push(format!("Sq1Sq1 nonzero on {}", self.labels(d)[j]));
                }
                if self.apply_word(&[Sq2, Sq2], d, v) != self.apply_word(&[Sq1, Sq2, Sq1], d, v) {
                    out.push(format!("Adem Sq2Sq2 fails on {}", self.labels(d)[j]));
                }
            }
        }
        out
    }
}

impl fmt::Display for SqModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (d, labels) in &self.basis {
            writeln!(f, "H^{d}: {}", if labels.is_empty() { "0".into() } else { labels.join(", ") })?;
        }
        for (d, labels) in &self.basis {
            for l in labels {
                for op in Sq::ALL {
                    let img = self.image_labels(op, *d, l);
                    if !img.is_empty() {
                        let name = match op {
                            Sq::Sq1 => "Sq1",
                            Sq::Sq2 => "Sq2",
                            Sq::Sq4 => "Sq4",
                        };
                        writeln!(f, "{name} {l} = {}", img.join(" + "))?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Tensor product module with the Cartan formula.
pub fn cartan_smash_sq(a: &SqModule, b: &SqModule) -> SqModule {
    let mut out = SqModule::new();
    // (degree of a, index, degree of b, index) -> (tensor degree, index)
    let mut index = BTreeMap::new();
    for da in a.degrees() {
        for db in b.degrees() {
            for (i, la) in a.labels(da).iter().enumerate() {
                for (j, lb) in b.labels(db).iter().enumerate() {
                    let k = out.add_cell(da + db, format!("{la}⊗{lb}"));
                    index.insert((da, i, db, j), (da + db, k));
                }
            }
        }
    }
    for (&(da, i, db, j), &(d, k)) in &index {
        for op in Sq::ALL {
            let n = op.degree() as u8;
            let mut image: F2Vec = 0;
            for p in 0..=n {
                let x = a.apply_total(p, da, 1 << i);
                let y = b.apply_total(n - p, db, 1 << j);
                for xi in bits(x) {
                    for yj in bits(y) {
                        let (_, t) = index[&(da + p as i32, xi, db + (n - p) as i32, yj)];
                        image ^= 1 << t;
                    }
                }
            }
            for t in bits(image) {
                out.add_action(op, d, k, t);
            }
        }
    }
    out
}

pub fn elementary_module(e: &Elementary) -> SqModule {
    use Elementary::*;
    let mut m = SqModule::new();
    let cell = |m: &mut SqModule, d: i32| m.add_cell(d, format!("u{d}"));
    match *e {
        Point => {}
        Moore { p, .. } if p != 2 => {}
        Sphere { n } => {
            cell(&mut m, n);
        }
        Moore { r, n, .. } => {
            cell(&mut m, n);
            cell(&mut m, n + 1);
            if r == 1 {
                m.add_action(Sq::Sq1, n, 0, 0);
            }
        }
        ChangEta { k } => {
            cell(&mut m, k - 2);
            cell(&mut m, k);
            m.add_action(Sq::Sq2, k - 2, 0, 0);
        }
        ChangTop { k, s } => {
            cell(&mut m, k - 2);
            cell(&mut m, k - 1);
            cell(&mut m, k);
            m.add_action(Sq::Sq2, k - 2, 0, 0);
            if s == 1 {
                m.add_action(Sq::Sq1, k - 1, 0, 0);
            }
        }
        ChangBot { r, k } => {
            cell(&mut m, k - 2);
            cell(&mut m, k - 1);
            cell(&mut m, k);
            m.add_action(Sq::Sq2, k - 2, 0, 0);
            if r == 1 {
                m.add_action(Sq::Sq1, k - 2, 0, 0);
            }
        }
        ChangFull { r, k, s } => {
            cell(&mut m, k - 2);
            cell(&mut m, k - 1);
            m.add_cell(k - 1, format!("ū{}", k - 1));
            cell(&mut m, k);
            m.add_action(Sq::Sq2, k - 2, 0, 0);
            if r == 1 {
                m.add_action(Sq::Sq1, k - 2, 0, 0);
            }
            if s == 1 {
                m.add_action(Sq::Sq1, k - 1, 1, 0);
            }
        }
    }
    m
}

pub fn atom_module(a: &SmashAtom) -> SqModule {
    cartan_smash_sq(&elementary_module(&a.left()), &elementary_module(&a.right()).primed()).shift(a.shift())
}

pub fn summand_module(s: &Summand) -> SqModule {
    match s {
        Summand::Elementary(e) => elementary_module(e),
        Summand::Atom(a) => atom_module(a),
    }
}

pub fn mod2_cohomology(x: &WedgeComplex) -> SqModule {
    let parts = x.summands();
    if parts.len() == 1 {
        return summand_module(&parts[0]);
    }
    parts.iter().enumerate().fold(SqModule::new(), |acc, (i, s)| {
        acc.direct_sum(&summand_module(s).map_labels(|l| format!("[{i}]{l}")))
    })
}

pub fn poincare_mod2(x: &WedgeComplex) -> BTreeMap<i32, usize> {
    mod2_cohomology(x).poincare()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Elementary::*;

    #[test]
    fn full_chang_sq1_by_exponent() {
        let m = elementary_module(&ChangFull { r: 1, k: 5, s: 2 });
        assert_eq!(m.image_labels(Sq::Sq1, 3, "u3"), vec!["u4"]);
        assert!(m.image_labels(Sq::Sq1, 4, "ū4").is_empty());
        let m = elementary_module(&ChangFull { r: 2, k: 5, s: 1 });
        assert!(m.image_labels(Sq::Sq1, 3, "u3").is_empty());
        assert_eq!(m.image_labels(Sq::Sq1, 4, "ū4"), vec!["u5"]);
        assert_eq!(m.image_labels(Sq::Sq2, 3, "u3"), vec!["u5"]);
    }

    #[test]
    fn odd_moore_is_zero() {
        assert_eq!(elementary_module(&Moore { p: 3, r: 1, n: 4 }).total_dim(), 0);
    }

    #[test]
    fn poincare_series() {
        let p = poincare_mod2(&ChangFull { r: 2, k: 5, s: 1 }.into());
        assert_eq!(p, BTreeMap::from([(3, 1), (4, 2), (5, 1)]));
    }

    #[test]
    fn cartan_sq4_on_bottom_class() {
        let a = elementary_module(&ChangBot { r: 1, k: 5 });
        let b = elementary_module(&ChangBot { r: 2, k: 5 }).primed();
        let t = cartan_smash_sq(&a, &b);
        assert_eq!(t.image_labels(Sq::Sq4, 6, "u3⊗u'3"), vec!["u5⊗u'5"]);
        assert!(t.relation_failures().is_empty());
    }

    #[test]
    fn rank_over_f2() {
        assert_eq!(f2_rank(&[0b011, 0b110, 0b101]), 2);
        assert_eq!(f2_rank(&[0, 0]), 0);
    }
}
