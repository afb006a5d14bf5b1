//! Elementary A_n^2-complexes, smash atoms and wedges.
//!
//! Everything here is an immutable value. Wedges are kept in canonical
//! sorted form so that structural equality is homotopy-type equality
//! within the classified universe.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Kind tags, in the order used by the canonical total order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Kind {
    Point,
    Sphere,
    Moore,
    ChangEta,
    ChangTop,
    ChangBot,
    ChangFull,
}

/// An indecomposable A_n^2 homotopy type (or the point).
///
/// `ChangTop { k, s }` is C^{k,s}, `ChangBot { r, k }` is C_r^k and
/// `ChangFull { r, k, s }` is C_r^{k,s}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind")]
pub enum Elementary {
    Point,
    Sphere { n: i32 },
    Moore { p: u32, r: u32, n: i32 },
    ChangEta { k: i32 },
    ChangTop { k: i32, s: u32 },
    ChangBot { r: u32, k: i32 },
    ChangFull { r: u32, k: i32, s: u32 },
}

use Elementary::*;

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl Elementary {
    pub fn sphere(n: i32) -> Result<Self> {
        Sphere { n }.validated()
    }
    pub fn moore(p: u32, r: u32, n: i32) -> Result<Self> {
        Moore { p, r, n }.validated()
    }
    pub fn chang_eta(k: i32) -> Result<Self> {
        ChangEta { k }.validated()
    }
    pub fn chang_top(k: i32, s: u32) -> Result<Self> {
        ChangTop { k, s }.validated()
    }
    pub fn chang_bot(r: u32, k: i32) -> Result<Self> {
        ChangBot { r, k }.validated()
    }
    pub fn chang_full(r: u32, k: i32, s: u32) -> Result<Self> {
        ChangFull { r, k, s }.validated()
    }

    /// Checks the stable-range and parameter invariants.
    pub fn validated(self) -> Result<Self> {
        let bad = |why: &str| Err(Error::InvalidComplex(format!("{self}: {why}")));
        match self {
            Point => Ok(self),
            Sphere { n } | Moore { n, .. } if n < 3 => bad("bottom cell below the stable range (n >= 3)"),
            Moore { p, .. } if !is_prime(p) => bad("p must be prime"),
            Moore { r: 0, .. } => bad("exponent must be >= 1"),
            ChangEta { k } | ChangTop { k, .. } | ChangBot { k, .. } | ChangFull { k, .. } if k < 5 => {
                bad("bottom cell below the stable range (k >= 5)")
            }
            ChangTop { s: 0, .. } | ChangBot { r: 0, .. } => bad("exponent must be >= 1"),
            ChangFull { r, s, .. } if r == 0 || s == 0 => bad("exponent must be >= 1"),
            _ => Ok(self),
        }
    }

    pub fn kind(&self) -> Kind {
        match self {
            Point => Kind::Point,
            Sphere { .. } => Kind::Sphere,
            Moore { .. } => Kind::Moore,
            ChangEta { .. } => Kind::ChangEta,
            ChangTop { .. } => Kind::ChangTop,
            ChangBot { .. } => Kind::ChangBot,
            ChangFull { .. } => Kind::ChangFull,
        }
    }

    /// The dimension parameter (n for spheres and Moore spaces, k for Chang complexes).
    pub fn dim(&self) -> i32 {
        match *self {
            Point => 0,
            Sphere { n } | Moore { n, .. } => n,
            ChangEta { k } | ChangTop { k, .. } | ChangBot { k, .. } | ChangFull { k, .. } => k,
        }
    }

    fn order_key(&self) -> (Kind, i32, u32, u32, u32) {
        match *self {
            Point => (Kind::Point, 0, 0, 0, 0),
            Sphere { n } => (Kind::Sphere, n, 0, 0, 0),
            Moore { p, r, n } => (Kind::Moore, n, r, 0, p),
            ChangEta { k } => (Kind::ChangEta, k, 0, 0, 0),
            ChangTop { k, s } => (Kind::ChangTop, k, 0, s, 0),
            ChangBot { r, k } => (Kind::ChangBot, k, r, 0, 0),
            ChangFull { r, k, s } => (Kind::ChangFull, k, r, s, 0),
        }
    }

    /// Prime of the torsion carried by the complex, if any.
    pub fn prime(&self) -> Option<u32> {
        match *self {
            Point | Sphere { .. } | ChangEta { .. } => None,
            Moore { p, .. } => Some(p),
            _ => Some(2),
        }
    }

    /// Cell dimensions with multiplicity.
    pub fn cells(&self) -> Vec<i32> {
        match *self {
            Point => vec![],
            Sphere { n } => vec![n],
            Moore { n, .. } => vec![n, n + 1],
            ChangEta { k } => vec![k - 2, k],
            ChangTop { k, .. } | ChangBot { k, .. } => vec![k - 2, k - 1, k],
            ChangFull { k, .. } => vec![k - 2, k - 1, k - 1, k],
        }
    }

    pub fn bottom(&self) -> i32 {
        self.cells().first().copied().unwrap_or(0)
    }

    pub fn top(&self) -> i32 {
        self.cells().last().copied().unwrap_or(0)
    }

    pub fn suspend(&self, m: i32) -> Self {
        match *self {
            Point => Point,
            Sphere { n } => Sphere { n: n + m },
            Moore { p, r, n } => Moore { p, r, n: n + m },
            ChangEta { k } => ChangEta { k: k + m },
            ChangTop { k, s } => ChangTop { k: k + m, s },
            ChangBot { r, k } => ChangBot { r, k: k + m },
            ChangFull { r, k, s } => ChangFull { r, k: k + m, s },
        }
    }

    /// Splits off the suspension: returns the base form (bottom cell in
    /// dimension 3) and the shift that recovers `self`.
    pub fn to_base(&self) -> (Self, i32) {
        if *self == Point {
            return (Point, 0);
        }
        let m = self.bottom() - 3;
        (self.suspend(-m), m)
    }

    /// Spanier-Whitehead dual, reflecting cells about `center` (d -> center - d).
    ///
    /// For a window A_n^h the center is 2n + h.
    pub fn dual_about(&self, center: i32) -> Self {
        match *self {
            Point => Point,
            Sphere { n } => Sphere { n: center - n },
            Moore { p, r, n } => Moore { p, r, n: center - n - 1 },
            ChangEta { k } => ChangEta { k: center - k + 2 },
            ChangTop { k, s } => ChangBot { r: s, k: center - k + 2 },
            ChangBot { r, k } => ChangTop { k: center - k + 2, s: r },
            ChangFull { r, k, s } => ChangFull { r: s, k: center - k + 2, s: r },
        }
    }
}

impl PartialOrd for Elementary {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Elementary {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

fn fmt_moore(p: u32, r: u32) -> String {
    if r == 1 {
        format!("{p}")
    } else {
        format!("{p}^{r}")
    }
}

impl fmt::Display for Elementary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Point => write!(f, "*"),
            Sphere { n } => write!(f, "S({n})"),
            Moore { p, r, n } => write!(f, "M({},{n})", fmt_moore(p, r)),
            ChangEta { k } => write!(f, "Ceta({k})"),
            ChangTop { k, s } => write!(f, "Ctop({k},{s})"),
            ChangBot { r, k } => write!(f, "Cbot({r},{k})"),
            ChangFull { r, k, s } => write!(f, "C({r},{k},{s})"),
        }
    }
}

/// An indecomposable smash product Σ^shift (left ∧ right) of base factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SmashAtom {
    left: Elementary,
    right: Elementary,
    shift: i32,
}

impl SmashAtom {
    /// Certifies `a ∧ b` as an atom. Fails unless the decision table marks
    /// the pair indecomposable.
    pub fn new(a: Elementary, b: Elementary) -> Result<Self> {
        if crate::smash::is_indecomposable_pair(&a, &b) {
            Ok(Self::from_factors(a, b))
        } else {
            Err(Error::InvalidComplex(format!(
                "{a} ^ {b} is not an indecomposable pair"
            )))
        }
    }

    /// Normalizes factors to base dimension and orders them. Callers must
    /// have established indecomposability.
    pub(crate) fn from_factors(a: Elementary, b: Elementary) -> Self {
        let (a0, ma) = a.to_base();
        let (b0, mb) = b.to_base();
        let (left, right) = if a0 <= b0 { (a0, b0) } else { (b0, a0) };
        SmashAtom {
            left,
            right,
            shift: ma + mb,
        }
    }

    pub fn left(&self) -> Elementary {
        self.left
    }
    pub fn right(&self) -> Elementary {
        self.right
    }
    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn suspend(&self, m: i32) -> Self {
        SmashAtom {
            shift: self.shift + m,
            ..*self
        }
    }

    pub fn cells(&self) -> Vec<i32> {
        let mut out: Vec<i32> = self
            .left
            .cells()
            .iter()
            .flat_map(|a| self.right.cells().into_iter().map(move |b| a + b))
            .map(|d| d + self.shift)
            .collect();
        out.sort();
        out
    }

    pub fn dual_about(&self, center: i32) -> Self {
        // Factors live in the window A_3^2 (center 8); the product cell a+b+m
        // must land on center-(a+b+m).
        let l = self.left.dual_about(8);
        let r = self.right.dual_about(8);
        let mut atom = Self::from_factors(l, r);
        atom.shift += center - 16 - self.shift;
        atom
    }
}

impl fmt::Display for SmashAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shift == 0 {
            write!(f, "{}^{}", self.left, self.right)
        } else {
            write!(f, "susp({},{}^{})", self.shift, self.left, self.right)
        }
    }
}

/// A wedge summand. Atoms sort before elementary complexes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(untagged)]
pub enum Summand {
    Atom(SmashAtom),
    Elementary(Elementary),
}

impl Summand {
    /// Reads `a ∧ b` as a single stored summand, applying the identification
    /// M_2^a ∧ M_2^b = C_1^{a+b+2,1}.
    pub fn smash_literal(a: Elementary, b: Elementary) -> Result<Summand> {
        if let (Moore { p: 2, r: 1, n: na }, Moore { p: 2, r: 1, n: nb }) = (a, b) {
            return Ok(Summand::Elementary(ChangFull {
                r: 1,
                k: na + nb + 2,
                s: 1,
            }));
        }
        SmashAtom::new(a, b).map(Summand::Atom)
    }

    pub fn cells(&self) -> Vec<i32> {
        match self {
            Summand::Atom(a) => a.cells(),
            Summand::Elementary(e) => e.cells(),
        }
    }

    pub fn bottom(&self) -> i32 {
        self.cells().first().copied().unwrap_or(0)
    }

    pub fn top(&self) -> i32 {
        self.cells().last().copied().unwrap_or(0)
    }

    pub fn suspend(&self, m: i32) -> Self {
        match self {
            Summand::Atom(a) => Summand::Atom(a.suspend(m)),
            Summand::Elementary(e) => Summand::Elementary(e.suspend(m)),
        }
    }

    pub fn dual_about(&self, center: i32) -> Self {
        match self {
            Summand::Atom(a) => Summand::Atom(a.dual_about(center)),
            Summand::Elementary(e) => Summand::Elementary(e.dual_about(center)),
        }
    }

    pub fn is_point(&self) -> bool {
        matches!(self, Summand::Elementary(Point))
    }
}

impl From<Elementary> for Summand {
    fn from(e: Elementary) -> Self {
        Summand::Elementary(e)
    }
}

impl From<SmashAtom> for Summand {
    fn from(a: SmashAtom) -> Self {
        Summand::Atom(a)
    }
}

impl fmt::Display for Summand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Summand::Atom(a) => a.fmt(f),
            Summand::Elementary(e) => e.fmt(f),
        }
    }
}

/// A duality window A_n^h: complexes with cells in [n, n + h].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Window {
    pub n: i32,
    pub height: i32,
}

impl Window {
    pub fn elementary(n: i32) -> Self {
        Window { n, height: 2 }
    }

    /// The window holding smashes of two complexes from A_a^2 and A_b^2.
    pub fn doubled(n: i32) -> Self {
        Window { n, height: 4 }
    }

    pub fn center(&self) -> i32 {
        2 * self.n + self.height
    }

    pub fn contains(&self, s: &Summand) -> bool {
        s.is_point() || (s.bottom() >= self.n && s.top() <= self.n + self.height)
    }
}

/// A finite wedge of summands, always in canonical form.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct WedgeComplex {
    summands: Vec<Summand>,
}

impl WedgeComplex {
    pub fn point() -> Self {
        WedgeComplex::default()
    }

    pub fn new(summands: impl IntoIterator<Item = Summand>) -> Self {
        let mut summands: Vec<Summand> = summands.into_iter().filter(|s| !s.is_point()).collect();
        summands.sort();
        WedgeComplex { summands }
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    pub fn is_point(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn wedge(&self, other: &WedgeComplex) -> Self {
        WedgeComplex::new(self.summands.iter().chain(&other.summands).copied())
    }

    pub fn suspend(&self, m: i32) -> Self {
        WedgeComplex::new(self.summands.iter().map(|s| s.suspend(m)))
    }

    /// Re-sorts and rewrites any stored M_2 ∧ M_2 atom.
    pub fn canonicalize(&self) -> Self {
        WedgeComplex::new(self.summands.iter().map(|s| match s {
            Summand::Atom(a) => match (a.left, a.right) {
                (Moore { p: 2, r: 1, .. }, Moore { p: 2, r: 1, .. }) => {
                    Summand::Elementary(ChangFull { r: 1, k: 8 + a.shift, s: 1 })
                }
                _ => *s,
            },
            e => *e,
        }))
    }

    /// Per-dimension cell counts.
    pub fn cells_of(&self) -> Vec<(i32, usize)> {
        let mut census = BTreeMap::new();
        for d in self.summands.iter().flat_map(|s| s.cells()) {
            *census.entry(d).or_insert(0) += 1;
        }
        census.into_iter().collect()
    }

    pub fn bottom(&self) -> Option<i32> {
        self.summands.iter().map(|s| s.bottom()).min()
    }

    pub fn top(&self) -> Option<i32> {
        self.summands.iter().map(|s| s.top()).max()
    }

    /// Dual in an explicit window.
    pub fn dual_in(&self, w: Window) -> Result<Self> {
        if let Some(bad) = self.summands.iter().find(|s| !w.contains(s)) {
            return Err(Error::WindowConflict(format!(
                "{bad} does not fit in the window [{}, {}]",
                w.n,
                w.n + w.height
            )));
        }
        let out = WedgeComplex::new(self.summands.iter().map(|s| s.dual_about(w.center())));
        for s in &out.summands {
            match s {
                Summand::Elementary(e) => {
                    e.validated()?;
                }
                Summand::Atom(a) if a.shift < 0 => {
                    return Err(Error::WindowConflict(format!(
                        "window [{}, {}] is below the stable range for {s}",
                        w.n,
                        w.n + w.height
                    )))
                }
                _ => {}
            }
        }
        Ok(out)
    }

    /// Finds the unique window of the given height holding every summand.
    pub fn infer_window(&self, height: i32) -> Result<Window> {
        let lowest_n = if height == 2 { 3 } else { 6 };
        let (Some(bottom), Some(top)) = (self.bottom(), self.top()) else {
            return Err(Error::AmbiguousWindow(vec![]));
        };
        if top - bottom > height {
            let lo = self.summands.iter().min_by_key(|s| s.bottom()).unwrap();
            let hi = self.summands.iter().max_by_key(|s| s.top()).unwrap();
            return Err(Error::WindowConflict(format!(
                "{lo} and {hi} span more than {height} dimensions"
            )));
        }
        let candidates: Vec<i32> = ((top - height).max(lowest_n)..=bottom).collect();
        match candidates.as_slice() {
            [n] => Ok(Window { n: *n, height }),
            [] => Err(Error::WindowConflict(format!(
                "no window of height {height} with n >= {lowest_n} holds {self}"
            ))),
            _ => Err(Error::AmbiguousWindow(candidates)),
        }
    }

    /// Dual with the window inferred from the summands. Wedges containing an
    /// atom use the doubled window.
    pub fn dual(&self) -> Result<Self> {
        let height = if self.summands.iter().any(|s| matches!(s, Summand::Atom(_))) {
            4
        } else {
            2
        };
        self.dual_in(self.infer_window(height)?)
    }
}

impl From<Elementary> for WedgeComplex {
    fn from(e: Elementary) -> Self {
        WedgeComplex::new([Summand::Elementary(e)])
    }
}

impl From<Summand> for WedgeComplex {
    fn from(s: Summand) -> Self {
        WedgeComplex::new([s])
    }
}

impl fmt::Display for WedgeComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.summands.is_empty() {
            return write!(f, "*");
        }
        let parts: Vec<String> = self.summands.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join(" v "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(items: &[Elementary]) -> WedgeComplex {
        WedgeComplex::new(items.iter().map(|e| Summand::Elementary(*e)))
    }

    #[test]
    fn suspension_examples() {
        assert_eq!(Sphere { n: 3 }.suspend(2), Sphere { n: 5 });
        assert_eq!(ChangFull { r: 1, k: 5, s: 1 }.suspend(1), ChangFull { r: 1, k: 6, s: 1 });
        let x = w(&[Moore { p: 2, r: 1, n: 3 }, ChangEta { k: 5 }]);
        assert_eq!(x.suspend(3), w(&[Moore { p: 2, r: 1, n: 6 }, ChangEta { k: 8 }]));
    }

    #[test]
    fn duality_table_in_elementary_window() {
        let c = Window::elementary(3).center();
        assert_eq!(Sphere { n: 3 }.dual_about(c), Sphere { n: 5 });
        assert_eq!(Sphere { n: 4 }.dual_about(c), Sphere { n: 4 });
        assert_eq!(Moore { p: 3, r: 2, n: 3 }.dual_about(c), Moore { p: 3, r: 2, n: 4 });
        assert_eq!(ChangEta { k: 5 }.dual_about(c), ChangEta { k: 5 });
        assert_eq!(ChangBot { r: 2, k: 5 }.dual_about(c), ChangTop { k: 5, s: 2 });
        assert_eq!(ChangTop { k: 5, s: 3 }.dual_about(c), ChangBot { r: 3, k: 5 });
        assert_eq!(ChangFull { r: 1, k: 5, s: 3 }.dual_about(c), ChangFull { r: 3, k: 5, s: 1 });
    }

    #[test]
    fn atom_dual_swaps_full_exponents() {
        let a = SmashAtom::new(ChangEta { k: 5 }, ChangFull { r: 1, k: 5, s: 2 }).unwrap();
        let d = a.dual_about(Window::doubled(6).center());
        assert_eq!(d, SmashAtom::new(ChangEta { k: 5 }, ChangFull { r: 2, k: 5, s: 1 }).unwrap());
    }

    #[test]
    fn atom_dual_moves_moore_factor() {
        // D(M^3) = M^4, so the dual atom picks up one suspension.
        let a = SmashAtom::new(Moore { p: 2, r: 2, n: 3 }, ChangEta { k: 5 }).unwrap();
        let d = a.dual_about(Window::doubled(6).center());
        assert_eq!(d.shift(), 1);
        assert_eq!(d.dual_about(Window::doubled(6).center()), a);
    }

    #[test]
    fn canonical_order_and_point_absorption() {
        let a = w(&[ChangEta { k: 5 }, Sphere { n: 3 }]);
        let b = w(&[Sphere { n: 3 }, ChangEta { k: 5 }]);
        assert_eq!(a, b);
        assert_eq!(w(&[Sphere { n: 5 }, Point]), w(&[Sphere { n: 5 }]));
    }

    #[test]
    fn moore_two_smash_literal_is_chang() {
        let m = Moore { p: 2, r: 1, n: 3 };
        assert_eq!(
            Summand::smash_literal(m, m).unwrap(),
            Summand::Elementary(ChangFull { r: 1, k: 8, s: 1 })
        );
    }

    #[test]
    fn cell_census() {
        assert_eq!(WedgeComplex::from(ChangEta { k: 5 }).cells_of(), vec![(3, 1), (5, 1)]);
        assert_eq!(WedgeComplex::from(Moore { p: 2, r: 2, n: 3 }).cells_of(), vec![(3, 1), (4, 1)]);
        assert_eq!(
            WedgeComplex::from(ChangFull { r: 1, k: 5, s: 2 }).cells_of(),
            vec![(3, 1), (4, 2), (5, 1)]
        );
        let a = SmashAtom::new(Moore { p: 2, r: 2, n: 3 }, ChangEta { k: 5 }).unwrap();
        assert_eq!(WedgeComplex::from(Summand::Atom(a)).cells_of(), vec![(6, 1), (7, 1), (8, 1), (9, 1)]);
    }

    #[test]
    fn window_inference() {
        assert_eq!(WedgeComplex::from(ChangBot { r: 1, k: 5 }).infer_window(2).unwrap(), Window::elementary(3));
        assert!(matches!(
            WedgeComplex::from(Sphere { n: 4 }).infer_window(2),
            Err(Error::AmbiguousWindow(_))
        ));
        assert!(matches!(
            w(&[Sphere { n: 3 }, Sphere { n: 7 }]).infer_window(2),
            Err(Error::WindowConflict(_))
        ));
    }

    #[test]
    fn validation_rejects_unstable() {
        assert!(Elementary::sphere(2).is_err());
        assert!(Elementary::chang_full(1, 4, 1).is_err());
        assert!(Elementary::moore(4, 1, 3).is_err());
        assert!(Elementary::moore(3, 2, 4).is_ok());
    }
}
