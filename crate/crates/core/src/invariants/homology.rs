use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::model::{Elementary, SmashAtom, Summand, WedgeComplex};

/// Degree-indexed cyclic orders. An order of 0 is an infinite cyclic factor;
/// finite orders are kept as prime powers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GradedAbelianGroup {
    components: BTreeMap<i32, Vec<u64>>,
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Splits a cyclic order into prime-power factors (0 stays 0, 1 vanishes).
pub fn primary_parts(order: u64) -> Vec<u64> {
    if order == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let mut n = order;
    let mut p = 2;
    while p * p <= n {
        let mut q = 1;
        while n % p == 0 {
            n /= p;
            q *= p;
        }
        if q > 1 {
            out.push(q);
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Canonical sort: Z first, then ascending orders.
pub fn canonical_orders(orders: impl IntoIterator<Item = u64>) -> Vec<u64> {
    let mut v: Vec<u64> = orders.into_iter().flat_map(primary_parts).collect();
    v.sort_by_key(|&o| if o == 0 { (0, 0) } else { (1, o) });
    v
}

pub fn format_cyclic(order: u64) -> String {
    if order == 0 {
        "Z".into()
    } else {
        format!("Z/{order}")
    }
}

pub fn format_group(orders: &[u64]) -> String {
    if orders.is_empty() {
        return "0".into();
    }
    orders.iter().map(|&o| format_cyclic(o)).collect::<Vec<_>>().join(" ⊕ ")
}

impl GradedAbelianGroup {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (i32, u64)>) -> Self {
        let mut g = Self::new();
        for (d, o) in pairs {
            g.add(d, o);
        }
        g
    }

    pub fn add(&mut self, degree: i32, order: u64) {
        let parts = primary_parts(order);
        if parts.is_empty() {
            return;
        }
        let entry = self.components.entry(degree).or_default();
        entry.extend(parts);
        *entry = canonical_orders(entry.drain(..));
    }

    pub fn get(&self, degree: i32) -> &[u64] {
        self.components.get(&degree).map_or(&[], |v| v.as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, &[u64])> {
        self.components.iter().map(|(d, v)| (*d, v.as_slice()))
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut g = self.clone();
        for (d, v) in other.iter() {
            for &o in v {
                g.add(d, o);
            }
        }
        g
    }

    pub fn shift(&self, m: i32) -> Self {
        GradedAbelianGroup {
            components: self.components.iter().map(|(d, v)| (d + m, v.clone())).collect(),
        }
    }

    /// Multiset of all orders, forgetting degrees.
    pub fn orders(&self) -> Vec<u64> {
        canonical_orders(self.components.values().flatten().copied())
    }
}

impl fmt::Display for GradedAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|(d, v)| format!("H_{d} = {}", format_group(v)))
            .collect();
        write!(f, "{}", parts.join("\n"))
    }
}

fn tensor(a: u64, b: u64) -> u64 {
    match (a, b) {
        (0, x) | (x, 0) => x,
        _ => gcd(a, b),
    }
}

fn tor(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        1
    } else {
        gcd(a, b)
    }
}

/// Reduced homology of a smash product from the factors' reduced homology.
pub fn kunneth(a: &GradedAbelianGroup, b: &GradedAbelianGroup) -> GradedAbelianGroup {
    let mut out = GradedAbelianGroup::new();
    for (i, xs) in a.iter() {
        for (j, ys) in b.iter() {
            for &x in xs {
                for &y in ys {
                    out.add(i + j, tensor(x, y));
                    out.add(i + j + 1, tor(x, y));
                }
            }
        }
    }
    out
}

pub fn elementary_homology(e: &Elementary) -> GradedAbelianGroup {
    use Elementary::*;
    let pow = |r: u32| 2u64.pow(r);
    match *e {
        Point => GradedAbelianGroup::new(),
        Sphere { n } => GradedAbelianGroup::from_pairs([(n, 0)]),
        Moore { p, r, n } => GradedAbelianGroup::from_pairs([(n, (p as u64).pow(r))]),
        ChangEta { k } => GradedAbelianGroup::from_pairs([(k - 2, 0), (k, 0)]),
        ChangTop { k, s } => GradedAbelianGroup::from_pairs([(k - 2, 0), (k - 1, pow(s))]),
        ChangBot { r, k } => GradedAbelianGroup::from_pairs([(k - 2, pow(r)), (k, 0)]),
        ChangFull { r, k, s } => GradedAbelianGroup::from_pairs([(k - 2, pow(r)), (k - 1, pow(s))]),
    }
}

pub fn atom_homology(a: &SmashAtom) -> GradedAbelianGroup {
    kunneth(&elementary_homology(&a.left()), &elementary_homology(&a.right())).shift(a.shift())
}

pub fn integral_homology(x: &WedgeComplex) -> GradedAbelianGroup {
    x.summands().iter().fold(GradedAbelianGroup::new(), |acc, s| {
        acc.direct_sum(&match s {
            Summand::Elementary(e) => elementary_homology(e),
            Summand::Atom(a) => atom_homology(a),
        })
    })
}
