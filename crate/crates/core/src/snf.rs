//! Smith normal form over the integers, used for presentations of
//! finitely generated abelian groups and for cellular homology.

/// Invariant factors (nonzero diagonal entries, each dividing the next) of
/// an integer matrix given as rows.
pub fn invariant_factors(rows: &[Vec<i128>]) -> Vec<i128> {
    let mut a: Vec<Vec<i128>> = rows.to_vec();
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // Pivot: smallest nonzero absolute value in the remaining block.
        let Some((pi, pj)) = (t..m)
            .flat_map(|i| (t..n).map(move |j| (i, j)))
            .filter(|&(i, j)| a[i][j] != 0)
            .min_by_key(|&(i, j)| a[i][j].abs())
        else {
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = a[t][t];
            let mut dirty = false;
            for i in t + 1..m {
                let q = a[i][t] / p;
                if q != 0 {
                    for j in t..n {
                        a[i][j] -= q * a[t][j];
                    }
                }
                if a[i][t] != 0 {
                    dirty = true;
                }
            }
            for j in t + 1..n {
                let q = a[t][j] / p;
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                if a[t][j] != 0 {
                    dirty = true;
                }
            }
            if !dirty {
                // Divisibility: fold any row whose entries p fails to divide.
                let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| a[i][j] % p != 0));
                match bad {
                    Some(i) => {
                        for j in t..n {
                            a[t][j] += a[i][j];
                        }
                    }
                    None => break,
                }
            }
            // Move the smallest entry of row/column t onto the diagonal.
            let (bi, bj) = (t..m)
                .map(|i| (i, t))
                .chain((t..n).map(|j| (t, j)))
                .filter(|&(i, j)| a[i][j] != 0)
                .min_by_key(|&(i, j)| a[i][j].abs())
                .unwrap();
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

/// Rank of an integer matrix.
pub fn rank(rows: &[Vec<i128>]) -> usize {
    invariant_factors(rows).len()
}

/// Cyclic decomposition of Z^gens modulo the row span of `relations`.
/// Returns the nontrivial orders, with 0 standing for Z.
pub fn cokernel(gens: usize, relations: &[Vec<i128>]) -> Vec<u64> {
    let d = invariant_factors(relations);
    let mut out: Vec<u64> = d.iter().filter(|&&x| x != 1).map(|&x| x as u64).collect();
    out.extend(std::iter::repeat(0).take(gens - d.len()));
    out
}
