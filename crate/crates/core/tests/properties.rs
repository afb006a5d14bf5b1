use chang_core::invariants::{
    cartan_smash_sq, elementary_module, integral_homology, kunneth, poincare_mod2, GradedAbelianGroup, Sq, SqModule,
};
use chang_core::matrix::{apply_step, cone_homology, FormalMorphism, MorphismMatrix, Obj, RelationTable, TransformStep};
use chang_core::model::{Elementary, Elementary::*, Summand, WedgeComplex, Window};
use chang_core::smash::{smash_decompose, table_pairs};
use proptest::prelude::*;

fn elementary_in_window(n: i32) -> impl Strategy<Value = Elementary> {
    let p = prop_oneof![Just(2u32), Just(3), Just(5)];
    prop_oneof![
        (0..=2i32).prop_map(move |d| Sphere { n: n + d }),
        (p, 1..=3u32, 0..=1i32).prop_map(move |(p, r, d)| Moore { p, r, n: n + d }),
        Just(ChangEta { k: n + 2 }),
        (1..=3u32).prop_map(move |s| ChangTop { k: n + 2, s }),
        (1..=3u32).prop_map(move |r| ChangBot { r, k: n + 2 }),
        (1..=3u32, 1..=3u32).prop_map(move |(r, s)| ChangFull { r, k: n + 2, s }),
    ]
}

fn wedge_in_window() -> impl Strategy<Value = (i32, WedgeComplex)> {
    (3..=7i32).prop_flat_map(|n| {
        prop::collection::vec(elementary_in_window(n), 0..6)
            .prop_map(move |v| (n, WedgeComplex::new(v.into_iter().map(Summand::Elementary))))
    })
}

fn graded_group() -> impl Strategy<Value = GradedAbelianGroup> {
    let order = prop_oneof![Just(0u64), Just(2), Just(3), Just(4), Just(8), Just(9), Just(5)];
    prop::collection::vec((0..5i32, order), 0..5).prop_map(GradedAbelianGroup::from_pairs)
}

/// Free rank and torsion orders of one degree.
fn split(h: &GradedAbelianGroup, d: i32) -> (usize, Vec<u64>) {
    let g = h.get(d);
    (g.iter().filter(|&&o| o == 0).count(), g.iter().copied().filter(|&o| o != 0).collect())
}

/// Spanier-Whitehead duality about `center`: free parts reflect to
/// center - d, torsion to center - d - 1.
fn reflects(x: &GradedAbelianGroup, dx: &GradedAbelianGroup, center: i32) -> bool {
    (center - 20..center + 20).all(|d| {
        let (free, tors) = split(dx, d);
        free == split(x, center - d).0 && tors == split(x, center - d - 1).1
    })
}

proptest! {
    #[test]
    fn dual_is_an_involution((n, x) in wedge_in_window()) {
        let w = Window::elementary(n);
        let dx = x.dual_in(w).unwrap();
        prop_assert_eq!(dx.dual_in(w).unwrap(), x.clone());
        prop_assert!(reflects(&integral_homology(&x), &integral_homology(&dx), w.center()));
    }

    #[test]
    fn suspension_composes((_, x) in wedge_in_window(), a in 0..6i32, b in 0..6i32) {
        prop_assert_eq!(x.suspend(a).suspend(b), x.suspend(a + b));
        prop_assert_eq!(integral_homology(&x.suspend(a)), integral_homology(&x).shift(a));
    }

    #[test]
    fn canonical_form_is_idempotent_and_order_free((_, x) in wedge_in_window(), seed in any::<u64>()) {
        let c = x.canonicalize();
        prop_assert_eq!(c.canonicalize(), c.clone());
        let mut parts = x.summands().to_vec();
        let len = parts.len().max(1);
        parts.rotate_left(seed as usize % len);
        prop_assert_eq!(WedgeComplex::new(parts.into_iter().chain([Summand::Elementary(Point)])), x);
    }

    #[test]
    fn mod2_series_follows_universal_coefficients((_, x) in wedge_in_window()) {
        let h = integral_homology(&x);
        let even = |d: i32| h.get(d).iter().filter(|&&o| o % 2 == 0 && o != 0).count();
        let free = |d: i32| h.get(d).iter().filter(|&&o| o == 0).count();
        let series = poincare_mod2(&x);
        for d in 0..20 {
            let want = free(d) + even(d) + even(d - 1);
            prop_assert_eq!(series.get(&d).copied().unwrap_or(0), want, "degree {}", d);
        }
    }

    #[test]
    fn kunneth_is_commutative_and_associative(a in graded_group(), b in graded_group(), c in graded_group()) {
        prop_assert_eq!(kunneth(&a, &b), kunneth(&b, &a));
        prop_assert_eq!(kunneth(&kunneth(&a, &b), &c), kunneth(&a, &kunneth(&b, &c)));
    }
}

#[test]
fn smash_is_commutative_and_duality_equivariant() {
    for (a, b) in table_pairs() {
        let (x, y) = (WedgeComplex::from(a), WedgeComplex::from(b));
        let xy = smash_decompose(&x, &y).unwrap().output;
        let yx = smash_decompose(&y, &x).unwrap().output;
        assert_eq!(xy.canonicalize(), yx.canonicalize(), "{a} ^ {b}");
        let (dx, dy) = (x.dual_in(Window::elementary(3)).unwrap(), y.dual_in(Window::elementary(3)).unwrap());
        let lhs = xy.dual_in(Window::doubled(6)).unwrap().canonicalize();
        let rhs = smash_decompose(&dx, &dy).unwrap().output.canonicalize();
        assert_eq!(lhs, rhs, "D({a} ^ {b})");
    }
}

// Steenrod action lists on smash products, written out symbolically per
// parameter case and compared with the Cartan tensor module.

fn tensor(a: &Elementary, b: &Elementary, right: char) -> SqModule {
    let rhs = elementary_module(b);
    let rhs = if right == 'u' {
        rhs.primed()
    } else {
        rhs.map_labels(|l| l.replace('u', &right.to_string()).replace('ū', &format!("{right}\u{304}")))
    };
    cartan_smash_sq(&elementary_module(a), &rhs)
}

fn image(m: &SqModule, op: Sq, label: &str) -> Vec<String> {
    let d: i32 = label.chars().filter_map(|c| c.to_digit(10)).sum::<u32>() as i32;
    assert!(m.index_of(d, label).is_some(), "{label} not in degree {d}");
    m.image_labels(op, d, label)
}

fn set(items: &[&str]) -> Vec<String> {
    let mut v: Vec<String> = items.iter().map(|s| s.to_string()).collect();
    v.sort();
    v
}

#[test]
fn cartan_lists_for_bottom_by_bottom() {
    for r in 1..=3 {
        for r2 in 1..=3 {
            let m = tensor(&ChangBot { r, k: 5 }, &ChangBot { r: r2, k: 5 }, 'u');
            assert_eq!(image(&m, Sq::Sq4, "u3⊗u'3"), set(&["u5⊗u'5"]));
            assert_eq!(image(&m, Sq::Sq2, "u3⊗u'5"), set(&["u5⊗u'5"]));
            assert_eq!(image(&m, Sq::Sq2, "u5⊗u'3"), set(&["u5⊗u'5"]));
            let want: &[&str] = if r == 1 && r2 == 1 {
                &["u3⊗u'5", "u4⊗u'4", "u5⊗u'3"]
            } else {
                &["u3⊗u'5", "u5⊗u'3"]
            };
            assert_eq!(image(&m, Sq::Sq2, "u3⊗u'3"), set(want), "r={r} r'={r2}");
            assert!(image(&m, Sq::Sq2, "u4⊗u'4").is_empty());
            assert_eq!(image(&m, Sq::Sq2, "u3⊗u'4"), set(&["u5⊗u'4"]));
            assert_eq!(image(&m, Sq::Sq2, "u4⊗u'3"), set(&["u4⊗u'5"]));
        }
    }
}

#[test]
fn cartan_lists_for_bottom_by_full() {
    for u in 1..=3 {
        for r in 1..=3 {
            for s in 1..=3 {
                let m = tensor(&ChangBot { r: u, k: 5 }, &ChangFull { r, k: 5, s }, 'v');
                assert_eq!(image(&m, Sq::Sq4, "u3⊗v3"), set(&["u5⊗v5"]));
                assert_eq!(image(&m, Sq::Sq2, "u3⊗v5"), set(&["u5⊗v5"]));
                assert_eq!(image(&m, Sq::Sq2, "u5⊗v3"), set(&["u5⊗v5"]));
                let want: &[&str] = if u == 1 && r == 1 {
                    &["u3⊗v5", "u4⊗v4", "u5⊗v3"]
                } else {
                    &["u3⊗v5", "u5⊗v3"]
                };
                assert_eq!(image(&m, Sq::Sq2, "u3⊗v3"), set(want), "u={u} r={r}");
                assert_eq!(image(&m, Sq::Sq2, "u3⊗v4"), set(&["u5⊗v4"]));
                assert_eq!(image(&m, Sq::Sq2, "u4⊗v3"), set(&["u4⊗v5"]));
                let want: &[&str] = if u == 1 && s == 1 {
                    &["u5⊗v̄4", "u4⊗v5"]
                } else {
                    &["u5⊗v̄4"]
                };
                assert_eq!(image(&m, Sq::Sq2, "u3⊗v̄4"), set(want), "u={u} s={s}");
            }
        }
    }
}

#[test]
fn cartan_lists_for_full_by_full() {
    for (r, s, r2, s2) in (1..=3).flat_map(|a| (1..=3).flat_map(move |b| (1..=3).flat_map(move |c| (1..=3).map(move |d| (a, b, c, d))))) {
        let m = tensor(&ChangFull { r, k: 5, s }, &ChangFull { r: r2, k: 5, s: s2 }, 'u');
        let case = format!("r={r} s={s} r'={r2} s'={s2}");
        assert_eq!(image(&m, Sq::Sq4, "u3⊗u'3"), set(&["u5⊗u'5"]));
        assert_eq!(image(&m, Sq::Sq2, "u3⊗u'5"), set(&["u5⊗u'5"]));
        assert_eq!(image(&m, Sq::Sq2, "u5⊗u'3"), set(&["u5⊗u'5"]));
        let want: &[&str] = if r == 1 && r2 == 1 {
            &["u3⊗u'5", "u4⊗u'4", "u5⊗u'3"]
        } else {
            &["u3⊗u'5", "u5⊗u'3"]
        };
        assert_eq!(image(&m, Sq::Sq2, "u3⊗u'3"), set(want), "{case}");
        assert_eq!(image(&m, Sq::Sq2, "u3⊗u'4"), set(&["u5⊗u'4"]));
        assert_eq!(image(&m, Sq::Sq2, "u4⊗u'3"), set(&["u4⊗u'5"]));
        let want: &[&str] = if r == 1 && s2 == 1 {
            &["u5⊗ū'4", "u4⊗u'5"]
        } else {
            &["u5⊗ū'4"]
        };
        assert_eq!(image(&m, Sq::Sq2, "u3⊗ū'4"), set(want), "{case}");
        let want: &[&str] = if r2 == 1 && s == 1 {
            &["u5⊗u'4", "ū4⊗u'5"]
        } else {
            &["ū4⊗u'5"]
        };
        assert_eq!(image(&m, Sq::Sq2, "ū4⊗u'3"), set(want), "{case}");
    }
}

// Elementary row and column moves on random matrices between spheres and
// 2-primary Moore spaces.

fn objects() -> [Obj; 5] {
    [Obj::sphere(7), Obj::sphere(8), Obj::moore(1, 7), Obj::moore(2, 7), Obj::moore(3, 7)]
}

/// A morphism src -> tgt built from a small menu of letters, scaled by k.
fn entry(src: Obj, tgt: Obj, k: i64) -> FormalMorphism {
    let word = match (src.cells().len(), tgt.cells().len(), src.cells()[0], tgt.cells()[0]) {
        _ if src == tgt => "1",
        (1, 1, a, b) if b == a - 1 => "η",
        (1, 2, a, b) if a == b => "i",
        (2, 1, a, b) if b == a + 1 => "q",
        (2, 2, a, b) if a == b => "B(χ)",
        (2, 1, a, b) if b == a => "ηq",
        _ => return FormalMorphism::zero(src, tgt),
    };
    FormalMorphism::parse(&format!("{k} {word}"), src, tgt, &Default::default()).unwrap()
}

fn random_matrix() -> impl Strategy<Value = MorphismMatrix> {
    let obj = (0..5usize).prop_map(|i| objects()[i]);
    (prop::collection::vec(obj.clone(), 1..4), prop::collection::vec(obj, 1..4)).prop_flat_map(|(rows, cols)| {
        let cells = rows.len() * cols.len();
        prop::collection::vec(-5..=5i64, cells).prop_map(move |ks| {
            let entries = rows
                .iter()
                .enumerate()
                .map(|(i, &t)| cols.iter().enumerate().map(|(j, &s)| entry(s, t, ks[i * cols.len() + j])).collect())
                .collect();
            MorphismMatrix::new(rows.clone(), cols.clone(), entries).unwrap()
        })
    })
}

/// Steps that are well typed on `a`: shears between equal objects and negations.
fn legal_steps(a: &MorphismMatrix, k: i64) -> Vec<TransformStep> {
    let mut out = Vec::new();
    for n in 1..=a.rows.len() {
        out.push(TransformStep::NegateRow { n });
        for m in 1..=a.rows.len() {
            if m != n && a.rows[m - 1] == a.rows[n - 1] {
                out.push(TransformStep::ScaleAddRow { k, m, n });
            }
        }
    }
    for n in 1..=a.cols.len() {
        out.push(TransformStep::NegateCol { n });
        for m in 1..=a.cols.len() {
            if m != n && a.cols[m - 1] == a.cols[n - 1] {
                out.push(TransformStep::ScaleAddCol { k, m, n });
            }
        }
    }
    out
}

proptest! {
    #[test]
    fn steps_invert_and_preserve_cone_homology(a in random_matrix(), k in -4..=4i64, picks in prop::collection::vec(any::<usize>(), 1..6)) {
        let rel = RelationTable::builtin();
        let h = cone_homology(&a).unwrap();
        let mut cur = a.clone();
        for p in picks {
            let steps = legal_steps(&cur, k);
            let step = &steps[p % steps.len()];
            let next = apply_step(&cur, step, &rel).unwrap();
            prop_assert_eq!(&apply_step(&next, &step.inverse(), &rel).unwrap(), &cur, "{}", step);
            prop_assert_eq!(cone_homology(&next).unwrap(), h.clone(), "{}", step);
            cur = next;
        }
    }

    #[test]
    fn negating_twice_is_the_identity(a in random_matrix(), n in 0..3usize) {
        let rel = RelationTable::builtin();
        let n = n % a.rows.len() + 1;
        let step = TransformStep::NegateRow { n };
        let twice = apply_step(&apply_step(&a, &step, &rel).unwrap(), &step, &rel).unwrap();
        prop_assert_eq!(twice, a);
    }
}
