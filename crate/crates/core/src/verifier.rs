//! Independent checks on a claimed decomposition.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::invariants::{
    cartan_smash_sq, f2_rank, integral_homology, kunneth, mod2_cohomology, F2Vec, GradedAbelianGroup, Sq, SqModule,
};
use crate::model::{Elementary, Summand, WedgeComplex};

/// Largest search space (log2 of the number of candidate maps) the
/// isomorphism search will enumerate.
pub const ISO_BUDGET_LOG2: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IsoOutcome {
    Found,
    NotFound,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub homology_match: bool,
    pub mod2_match: bool,
    pub sq_invariants_match: bool,
    pub sq_iso_found: IsoOutcome,
    /// No Moore summand of the output sits where the tensor module's Sq²
    /// forbids one.
    pub moore_obstruction_ok: bool,
    pub obstruction_notes: Vec<String>,
}

impl VerificationReport {
    pub fn all_ok(&self) -> bool {
        self.homology_match
            && self.mod2_match
            && self.sq_invariants_match
            && self.moore_obstruction_ok
            && self.sq_iso_found != IsoOutcome::NotFound
    }
}

pub fn graded_iso(a: &GradedAbelianGroup, b: &GradedAbelianGroup) -> bool {
    a == b
}

fn gl_candidates(n: usize) -> Vec<Vec<F2Vec>> {
    // All invertible n×n matrices over F2, as column lists.
    let mut out = Vec::new();
    let mut cols = Vec::with_capacity(n);
    fn rec(n: usize, cols: &mut Vec<F2Vec>, out: &mut Vec<Vec<F2Vec>>) {
        if cols.len() == n {
            out.push(cols.clone());
            return;
        }
        for c in 1..(1u64 << n) {
            cols.push(c);
            if f2_rank(cols) == cols.len() {
                rec(n, cols, out);
            }
            cols.pop();
        }
    }
    rec(n, &mut cols, &mut out);
    out
}

fn apply_matrix(cols: &[F2Vec], v: F2Vec) -> F2Vec {
    (0..cols.len()).filter(|j| v >> j & 1 == 1).fold(0, |acc, j| acc ^ cols[j])
}

/// Exhaustive search for a degree-wise invertible map commuting with Sq¹,
/// Sq² and Sq⁴.
pub fn find_sq_iso(m1: &SqModule, m2: &SqModule, budget_log2: u32) -> IsoOutcome {
    if m1.poincare() != m2.poincare() {
        return IsoOutcome::NotFound;
    }
    let degrees: Vec<i32> = m1.degrees().into_iter().filter(|d| m1.dim(*d) > 0).collect();
    let space: u64 = degrees.iter().map(|d| (m1.dim(*d) * m1.dim(*d)) as u64).sum();
    if space > budget_log2 as u64 {
        return IsoOutcome::Skipped;
    }
    let mut assigned: BTreeMap<i32, Vec<F2Vec>> = BTreeMap::new();
    fn consistent(m1: &SqModule, m2: &SqModule, d: i32, assigned: &BTreeMap<i32, Vec<F2Vec>>) -> bool {
        let phi_d = &assigned[&d];
        Sq::ALL.iter().all(|&op| {
            let src = d - op.degree();
            let Some(phi_s) = assigned.get(&src) else {
                return true;
            };
            (0..m1.dim(src)).all(|j| {
                let lhs = apply_matrix(phi_d, m1.apply(op, src, 1 << j));
                let rhs = m2.apply(op, src, phi_s[j]);
                lhs == rhs
            })
        })
    }
    fn search(
        m1: &SqModule,
        m2: &SqModule,
        degrees: &[i32],
        assigned: &mut BTreeMap<i32, Vec<F2Vec>>,
        cache: &mut BTreeMap<usize, Vec<Vec<F2Vec>>>,
    ) -> bool {
        let Some((&d, rest)) = degrees.split_first() else {
            return true;
        };
        let n = m1.dim(d);
        let cands = cache.entry(n).or_insert_with(|| gl_candidates(n)).clone();
        for phi in cands {
            assigned.insert(d, phi);
            if consistent(m1, m2, d, assigned) && search(m1, m2, rest, assigned, cache) {
                return true;
            }
        }
        assigned.remove(&d);
        false
    }
    let mut cache = BTreeMap::new();
    if search(m1, m2, &degrees, &mut assigned, &mut cache) {
        IsoOutcome::Found
    } else {
        IsoOutcome::NotFound
    }
}

/// Compares rank invariants, then searches for an explicit isomorphism when
/// the search space is small enough.
pub fn sq_module_compare(m1: &SqModule, m2: &SqModule) -> (bool, IsoOutcome) {
    if m1.invariant_vector() != m2.invariant_vector() {
        return (false, IsoOutcome::NotFound);
    }
    (true, find_sq_iso(m1, m2, ISO_BUDGET_LOG2))
}

/// A Moore-space summand seen through mod-2 cohomology: classes in `degree`
/// and `degree + 1`, joined by Sq¹ exactly when the exponent is 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct MooreShape {
    pub degree: i32,
    pub sq1_nonzero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SplitCriterion {
    /// Hypotheses (i)-(iii) of the bottom/top splitting criterion hold.
    Holds,
    NotApplicable(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    pub criterion: SplitCriterion,
    /// Sq²: H^{bottom+1} → H^{bottom+3} is an isomorphism.
    pub sq2_middle_iso: bool,
    /// Moore shapes whose splitting off is compatible with the Sq-module.
    pub admissible: Vec<MooreShape>,
    /// Moore shapes ruled out by the Sq-module.
    pub excluded: Vec<MooreShape>,
}

fn all_vectors(n: usize) -> impl Iterator<Item = F2Vec> {
    1..(1u64 << n)
}

fn functionals_vanishing_on(m: &SqModule, d: i32, images: &[F2Vec]) -> Vec<F2Vec> {
    let n = m.dim(d);
    (0..(1u64 << n))
        .filter(|f| images.iter().all(|v| (f & v).count_ones() % 2 == 0))
        .collect()
}

fn pair(f: F2Vec, v: F2Vec) -> bool {
    (f & v).count_ones() % 2 == 1
}

/// Images of Sq¹, Sq², Sq⁴ landing in degree d, except those listed in `skip`.
fn incoming_images(m: &SqModule, d: i32, skip: &[Sq]) -> Vec<F2Vec> {
    Sq::ALL
        .iter()
        .filter(|op| !skip.contains(op))
        .flat_map(|&op| {
            let src = d - op.degree();
            (0..m.dim(src)).map(move |j| m.apply(op, src, 1 << j))
        })
        .collect()
}

/// Can a Moore space of the given shape split off as a wedge summand, as far
/// as Sq¹, Sq², Sq⁴ can tell?
pub fn moore_shape_admissible(m: &SqModule, shape: MooreShape) -> bool {
    let d = shape.degree;
    let (nd, nu) = (m.dim(d), m.dim(d + 1));
    if nd == 0 || nu == 0 {
        return false;
    }
    let eps = shape.sq1_nonzero;
    // Inclusion: x, y generate a summand closed under the operations.
    let xs: Vec<(F2Vec, F2Vec)> = all_vectors(nd)
        .flat_map(|x| all_vectors(nu).map(move |y| (x, y)))
        .filter(|&(x, y)| {
            m.apply(Sq::Sq1, d, x) == if eps { y } else { 0 }
                && m.apply(Sq::Sq2, d, x) == 0
                && m.apply(Sq::Sq4, d, x) == 0
                && Sq::ALL.iter().all(|&op| m.apply(op, d + 1, y) == 0)
        })
        .collect();
    if xs.is_empty() {
        return false;
    }
    // Retraction: functionals killing everything the operations put into
    // d and d+1, except the Sq¹ coupling from d to d+1.
    let fd = functionals_vanishing_on(m, d, &incoming_images(m, d, &[]));
    let fu = functionals_vanishing_on(m, d + 1, &incoming_images(m, d + 1, &[Sq::Sq1]));
    let sq1_from_below: Vec<F2Vec> = (0..m.dim(d)).map(|j| m.apply(Sq::Sq1, d, 1 << j)).collect();
    for &f in &fd {
        for &g in &fu {
            let coupled = (0..nd).all(|j| pair(g, sq1_from_below[j]) == (eps && pair(f, 1 << j)));
            if !coupled {
                continue;
            }
            if xs.iter().any(|&(x, y)| pair(f, x) && pair(g, y)) {
                return true;
            }
        }
    }
    false
}

/// Checks the bottom/top splitting criterion and runs the Moore-summand census.
pub fn moore_split_obstruction(m: &SqModule, bottom: i32, top: i32) -> ObstructionReport {
    let criterion = split_criterion(m, bottom, top);
    let sq2_middle_iso = {
        let (a, b) = (bottom + 1, bottom + 3);
        m.dim(a) > 0 && m.dim(a) == m.dim(b) && m.word_rank(&[Sq::Sq2], a) == m.dim(a)
    };
    let mut admissible = Vec::new();
    let mut excluded = Vec::new();
    for d in bottom..top {
        for sq1_nonzero in [true, false] {
            let shape = MooreShape { degree: d, sq1_nonzero };
            if m.dim(d) == 0 || m.dim(d + 1) == 0 {
                continue;
            }
            if moore_shape_admissible(m, shape) {
                admissible.push(shape);
            } else {
                excluded.push(shape);
            }
        }
    }
    ObstructionReport { criterion, sq2_middle_iso, admissible, excluded }
}

fn split_criterion(m: &SqModule, bottom: i32, top: i32) -> SplitCriterion {
    use SplitCriterion::NotApplicable;
    if m.dim(bottom) != 1 || m.dim(top) != 1 {
        return NotApplicable("bottom or top class is not one-dimensional".into());
    }
    if m.apply(Sq::Sq4, bottom, 1) != 1 {
        return NotApplicable("Sq4 is zero on the bottom class".into());
    }
    let mid = top - 2;
    let hit: Vec<F2Vec> = all_vectors(m.dim(mid)).filter(|&v| m.apply(Sq::Sq2, mid, v) == 1).collect();
    let two_classes = hit.iter().any(|&a| hit.iter().any(|&b| a != b && a & b == 0));
    if !two_classes {
        return NotApplicable("fewer than two independent classes map onto the top class by Sq2".into());
    }
    // Sq² of the bottom class splits as a + a' + a'' with Sq²a'' = 0.
    let s = m.apply(Sq::Sq2, bottom, 1);
    let ok = hit.iter().any(|&a| {
        hit.iter().any(|&b| a != b && a & b == 0 && m.apply(Sq::Sq2, mid, s ^ a ^ b) == 0)
    });
    if ok {
        SplitCriterion::Holds
    } else {
        NotApplicable("Sq2 of the bottom class is not a sum of the two hitting classes plus a Sq2-null class".into())
    }
}

/// Moore summands of `w` sitting where the tensor module's Sq² forbids them.
fn moore_violations(tensor: &SqModule, w: &WedgeComplex) -> Vec<String> {
    let mut out = Vec::new();
    for s in w.summands() {
        let Summand::Elementary(Elementary::Moore { p: 2, n, .. }) = s else {
            continue;
        };
        let (b, t) = (*n, *n + 1);
        let injective = |d: i32| tensor.dim(d) > 0 && tensor.word_rank(&[Sq::Sq2], d) == tensor.dim(d);
        let onto = |d: i32| tensor.dim(d) > 0 && tensor.word_rank(&[Sq::Sq2], d - 2) == tensor.dim(d);
        if injective(b) || injective(t) || onto(b) || onto(t) {
            out.push(format!("{s}: Sq2 of the tensor module is an isomorphism through degree {b} or {t}"));
        }
    }
    out
}

/// Compares W against Künneth and the Cartan tensor module of X and Y.
pub fn check_decomposition(x: &WedgeComplex, y: &WedgeComplex, w: &WedgeComplex) -> VerificationReport {
    let expected = kunneth(&integral_homology(x), &integral_homology(y));
    let homology_match = graded_iso(&integral_homology(w), &expected);
    let tensor = cartan_smash_sq(&mod2_cohomology(x), &mod2_cohomology(y).primed());
    let module = mod2_cohomology(w);
    let mod2_match = module.poincare() == tensor.poincare();
    let (sq_invariants_match, sq_iso_found) = sq_module_compare(&module, &tensor);
    let violations = moore_violations(&tensor, w);
    let mut notes = violations.clone();
    if !homology_match {
        notes.push(format!("homology of {w} differs from Künneth"));
    }
    if homology_match && !mod2_match {
        notes.push("mod 2 Poincaré series differs from the tensor module".into());
    }
    VerificationReport {
        homology_match,
        mod2_match,
        sq_invariants_match,
        sq_iso_found,
        moore_obstruction_ok: violations.is_empty(),
        obstruction_notes: notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{elementary_module, mod2_cohomology};
    use crate::model::Elementary::*;

    fn wedge(items: &[Elementary]) -> WedgeComplex {
        WedgeComplex::new(items.iter().map(|e| Summand::Elementary(*e)))
    }

    #[test]
    fn graded_iso_examples() {
        let a = GradedAbelianGroup::from_pairs([(7, 2), (7, 4)]);
        let b = GradedAbelianGroup::from_pairs([(7, 4), (7, 2)]);
        assert!(graded_iso(&a, &b));
        let c = GradedAbelianGroup::from_pairs([(7, 4)]);
        let d = GradedAbelianGroup::from_pairs([(7, 2), (7, 2)]);
        assert!(!graded_iso(&c, &d));
    }

    #[test]
    fn eta_is_not_two_spheres() {
        let m1 = elementary_module(&ChangEta { k: 5 });
        let m2 = mod2_cohomology(&wedge(&[Sphere { n: 3 }, Sphere { n: 5 }]));
        assert_eq!(sq_module_compare(&m1, &m2).0, false);
        assert_eq!(sq_module_compare(&m1, &m1), (true, IsoOutcome::Found));
    }

    #[test]
    fn decomposition_examples() {
        let r = check_decomposition(
            &wedge(&[Moore { p: 2, r: 2, n: 3 }]),
            &wedge(&[ChangFull { r: 1, k: 5, s: 1 }]),
            &wedge(&[ChangFull { r: 1, k: 8, s: 1 }, ChangFull { r: 1, k: 9, s: 1 }]),
        );
        assert!(r.all_ok(), "{r:?}");
        let bad = check_decomposition(
            &wedge(&[ChangBot { r: 1, k: 5 }]),
            &wedge(&[ChangBot { r: 2, k: 5 }]),
            &wedge(&[Sphere { n: 6 }, Moore { p: 2, r: 1, n: 7 }]),
        );
        assert!(!bad.homology_match);
    }

    #[test]
    fn split_criterion_not_applicable_without_sq4() {
        let m = mod2_cohomology(&wedge(&[Sphere { n: 6 }, Sphere { n: 10 }]));
        assert!(matches!(moore_split_obstruction(&m, 6, 10).criterion, SplitCriterion::NotApplicable(_)));
    }
}
