//! Integer polynomials in symbolic bits such as κ, κ', ε. A bit takes the
//! values 0 and 1, so b² = b and every monomial is a set of bit names.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub type Monomial = BTreeSet<String>;
pub type Valuation = BTreeMap<String, bool>;

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly(BTreeMap<Monomial, i64>);

impl Poly {
    pub fn zero() -> Self {
        Poly(BTreeMap::new())
    }

    pub fn constant(c: i64) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::new(), c);
        p
    }

    pub fn bit(name: &str) -> Self {
        let mut p = Poly::zero();
        p.add_term(std::iter::once(name.to_string()).collect(), 1);
        p
    }

    fn add_term(&mut self, m: Monomial, c: i64) {
        let e = self.0.entry(m).or_insert(0);
        *e += c;
        if *e == 0 {
            self.0.retain(|_, v| *v != 0);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// The value when no bits occur.
    pub fn as_constant(&self) -> Option<i64> {
        match self.0.len() {
            0 => Some(0),
            1 => self.0.get(&Monomial::new()).copied(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i64)> {
        self.0.iter().map(|(m, c)| (m, *c))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, i64)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn bits(&self) -> BTreeSet<String> {
        self.0.keys().flatten().cloned().collect()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut p = self.clone();
        for (m, c) in other.terms() {
            p.add_term(m.clone(), c);
        }
        p
    }

    pub fn neg(&self) -> Poly {
        self.scale(-1)
    }

    pub fn scale(&self, k: i64) -> Poly {
        Poly::from_terms(self.terms().map(|(m, c)| (m.clone(), c * k)))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut p = Poly::zero();
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                p.add_term(a.union(b).cloned().collect(), x * y);
            }
        }
        p
    }

    /// Substitutes every bit named in `v`; unnamed bits stay symbolic.
    pub fn eval(&self, v: &Valuation) -> Poly {
        let mut p = Poly::zero();
        for (m, c) in self.terms() {
            if m.iter().any(|b| v.get(b) == Some(&false)) {
                continue;
            }
            p.add_term(m.iter().filter(|b| !v.contains_key(*b)).cloned().collect(), c);
        }
        p
    }

    /// Splits each coefficient c = lo + m·hi with 0 <= lo < m and returns
    /// (lo part, hi part). Callers reduce hi further or drop it.
    pub fn divmod(&self, m: i64) -> (Poly, Poly) {
        let lo = Poly::from_terms(self.terms().map(|(k, c)| (k.clone(), c.rem_euclid(m))));
        let hi = Poly::from_terms(self.terms().map(|(k, c)| (k.clone(), c.div_euclid(m))));
        (lo, hi)
    }
}

fn fmt_monomial(m: &Monomial) -> String {
    m.iter().map(String::as_str).collect()
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms().enumerate() {
            let body = if m.is_empty() {
                c.abs().to_string()
            } else if c.abs() == 1 {
                fmt_monomial(m)
            } else {
                format!("{}{}", c.abs(), fmt_monomial(m))
            };
            match (i, c < 0) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

/// Every assignment of the given bits.
pub fn valuations(bits: &BTreeSet<String>) -> Vec<Valuation> {
    let names: Vec<&String> = bits.iter().collect();
    (0..1u32 << names.len())
        .map(|mask| names.iter().enumerate().map(|(i, b)| ((*b).clone(), mask >> i & 1 == 1)).collect())
        .collect()
}
