//! Reading off the mapping cone of a reduced matrix: cancel units, split
//! off zero rows and columns, and name the connected blocks that match a
//! known elementary cofibre.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::invariants::GradedAbelianGroup;
use crate::model::{Elementary, SmashAtom, Summand, WedgeComplex};
use crate::snf;

use super::grid::MorphismMatrix;
use super::morphism::RelationTable;
use super::word::{fmt_word, Obj};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeReport {
    pub named: Vec<Summand>,
    /// Blocks that match no elementary cofibre.
    pub residual: Vec<MorphismMatrix>,
    pub cancelled_units: usize,
}

impl ConeReport {
    pub fn wedge(&self) -> WedgeComplex {
        WedgeComplex::new(self.named.iter().cloned())
    }

    pub fn is_complete(&self) -> bool {
        self.residual.is_empty()
    }
}

impl fmt::Display for ConeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.wedge())?;
        for r in &self.residual {
            let rows: Vec<String> = r.rows.iter().map(|o| o.to_string()).collect();
            let cols: Vec<String> = r.cols.iter().map(|o| o.to_string()).collect();
            write!(f, " v residual[{} <- {}]", rows.join(","), cols.join(","))?;
        }
        Ok(())
    }
}

fn two_power(k: i64) -> Option<u32> {
    let a = k.unsigned_abs();
    (a >= 2 && a.is_power_of_two()).then(|| a.trailing_zeros())
}

/// Entry (row y, col x) as (word, constant), "0" for zero, None if it has
/// several terms or a symbolic coefficient.
fn pure(a: &MorphismMatrix, i: usize, j: usize) -> Option<(String, i64)> {
    let e = a.get(i, j);
    if e.is_zero() {
        return Some(("0".into(), 0));
    }
    let (w, k) = e.as_multiple()?;
    Some((fmt_word(w), k))
}

fn elem(e: Result<Elementary>) -> Option<Summand> {
    e.ok().map(Summand::Elementary)
}

/// Names the cofibre of a connected block, if it is one of the elementary
/// attaching maps.
fn name_block(a: &MorphismMatrix) -> Option<Summand> {
    let (nr, nc) = (a.rows.len(), a.cols.len());
    let mut cells = BTreeMap::new();
    for i in 0..nr {
        for j in 0..nc {
            cells.insert((i, j), pure(a, i, j)?);
        }
    }
    let at = |i: usize, j: usize| -> (&str, i64) {
        let (w, k) = &cells[&(i, j)];
        (w.as_str(), *k)
    };
    let s = |o: Obj| o.moore.is_none();
    match (nr, nc) {
        (1, 1) => {
            let (y, x) = (a.rows[0], a.cols[0]);
            let (w, k) = at(0, 0);
            let d = y.dim;
            match w {
                "1" if s(x) && s(y) => elem(Elementary::moore(2, two_power(k)?, d)),
                "η" if s(x) && s(y) && x.dim == d + 1 => elem(Elementary::chang_eta(d + 2)),
                "η∧1" | "1∧η" if x.dim == d + 1 && d >= 6 => {
                    let t = y.moore?;
                    let base = SmashAtom::new(Elementary::moore(2, t, 3).ok()?, Elementary::chang_eta(5).ok()?).ok()?;
                    Some(Summand::Atom(base.suspend(d - 6)))
                }
                "iηq" if x.dim == d => elem(Elementary::chang_full(y.moore?, d + 2, x.moore?)),
                "iη" if s(x) && x.dim == d + 1 => elem(Elementary::chang_bot(y.moore?, d + 2)),
                "ηq" if s(y) && x.dim == d => elem(Elementary::chang_top(d + 2, x.moore?)),
                _ => None,
            }
        }
        (1, 2) => {
            let y = a.rows[0];
            if !s(y) {
                return None;
            }
            let d = y.dim;
            // Put the degree column first.
            let (deg, other) = if a.cols[0] == y { (0, 1) } else { (1, 0) };
            let (wd, kd) = at(0, deg);
            let (wo, _) = at(0, other);
            let x = a.cols[other];
            if a.cols[deg] != y || wd != "1" {
                return None;
            }
            let r = two_power(kd)?;
            match wo {
                "η" if s(x) && x.dim == d + 1 => elem(Elementary::chang_bot(r, d + 2)),
                "ηq" if x.dim == d => elem(Elementary::chang_full(r, d + 2, x.moore?)),
                _ => None,
            }
        }
        (2, 1) => {
            let x = a.cols[0];
            if !s(x) {
                return None;
            }
            let (deg, other) = if a.rows[0] == x { (0, 1) } else { (1, 0) };
            let (wd, kd) = at(deg, 0);
            let (wo, _) = at(other, 0);
            let y = a.rows[other];
            if a.rows[deg] != x || wd != "1" || y.dim + 1 != x.dim {
                return None;
            }
            let sv = two_power(kd)?;
            match wo {
                "η" if s(y) => elem(Elementary::chang_top(y.dim + 2, sv)),
                "iη" => elem(Elementary::chang_full(y.moore?, y.dim + 2, sv)),
                _ => None,
            }
        }
        (2, 2) => {
            if !a.rows.iter().chain(&a.cols).all(|&o| s(o)) {
                return None;
            }
            let lo = |v: &[Obj]| if v[0].dim <= v[1].dim { (0, 1) } else { (1, 0) };
            let (rl, rh) = lo(&a.rows);
            let (cl, ch) = lo(&a.cols);
            let d = a.rows[rl].dim;
            let dims_ok = a.rows[rh].dim == d + 1 && a.cols[cl].dim == d && a.cols[ch].dim == d + 1;
            let (w11, k11) = at(rl, cl);
            let (w12, _) = at(rl, ch);
            let (w22, k22) = at(rh, ch);
            let (w21, _) = at(rh, cl);
            if !dims_ok || w11 != "1" || w12 != "η" || w22 != "1" || w21 != "0" {
                return None;
            }
            elem(Elementary::chang_full(two_power(k11)?, d + 2, two_power(k22)?))
        }
        _ => None,
    }
}

/// Splits the mapping cone of `a` into named pieces and residual blocks.
pub fn split_cone(a: &MorphismMatrix, rel: &RelationTable) -> Result<ConeReport> {
    let mut a = a.clone();
    let mut cancelled = 0;
    // Cancel ±1 entries (2-locally, odd multiples of an identity on spheres
    // too when they are alone in their row and column).
    'outer: loop {
        for i in 0..a.rows.len() {
            for j in 0..a.cols.len() {
                let Some((w, k)) = a.get(i, j).as_multiple() else { continue };
                if !w.is_empty() || k % 2 == 0 {
                    continue;
                }
                let alone = (0..a.rows.len()).all(|i2| i2 == i || a.get(i2, j).is_zero())
                    && (0..a.cols.len()).all(|j2| j2 == j || a.get(i, j2).is_zero());
                if k.abs() != 1 && !alone {
                    continue;
                }
                let mut b = a.clone();
                for i2 in 0..a.rows.len() {
                    for j2 in 0..a.cols.len() {
                        if i2 == i || j2 == j {
                            continue;
                        }
                        let through = a.get(i2, j).compose(a.get(i, j2), rel)?;
                        b.set(i2, j2, a.get(i2, j2).add(&through.scale(&super::poly::Poly::constant(-k)))?);
                    }
                }
                let rows: Vec<usize> = (0..a.rows.len()).filter(|&x| x != i).collect();
                let cols: Vec<usize> = (0..a.cols.len()).filter(|&x| x != j).collect();
                a = b.submatrix(&rows, &cols);
                cancelled += 1;
                continue 'outer;
            }
        }
        break;
    }

    let mut named = Vec::new();
    let nr = a.rows.len();
    let nc = a.cols.len();
    // Union-find over rows 0..nr and columns nr..nr+nc.
    let mut parent: Vec<usize> = (0..nr + nc).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..nr {
        for j in 0..nc {
            if !a.get(i, j).is_zero() {
                let (x, y) = (find(&mut parent, i), find(&mut parent, nr + j));
                parent[x] = y;
            }
        }
    }
    let mut blocks: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for i in 0..nr {
        let root = find(&mut parent, i);
        blocks.entry(root).or_default().0.push(i);
    }
    for j in 0..nc {
        let root = find(&mut parent, nr + j);
        blocks.entry(root).or_default().1.push(j);
    }
    let mut residual = Vec::new();
    for (rows, cols) in blocks.into_values() {
        match (rows.as_slice(), cols.as_slice()) {
            ([i], []) => named.push(Summand::Elementary(a.rows[*i].to_elementary())),
            ([], [j]) => named.push(Summand::Elementary(a.cols[*j].to_elementary().suspend(1))),
            _ => {
                let block = a.submatrix(&rows, &cols);
                match name_block(&block) {
                    Some(s) => named.push(s),
                    None => residual.push(block),
                }
            }
        }
    }
    named.sort();
    Ok(ConeReport { named, residual, cancelled_units: cancelled })
}

/// Integral homology of the mapping cone, from cellular chains: cells of
/// the targets, plus the cells of the sources shifted up by one.
pub fn cone_homology(a: &MorphismMatrix) -> Result<GradedAbelianGroup> {
    // (dimension, owner) for every cell; owner records (is_source, index, cell index).
    let mut cells: Vec<i32> = Vec::new();
    let mut row_cells = Vec::new();
    for y in &a.rows {
        let start = cells.len();
        cells.extend(y.cells());
        row_cells.push(start);
    }
    let mut col_cells = Vec::new();
    for x in &a.cols {
        let start = cells.len();
        cells.extend(x.cells().iter().map(|d| d + 1));
        col_cells.push(start);
    }
    let n = cells.len();
    // boundary[target cell][source cell]
    let mut bd = vec![vec![0i128; n]; n];
    for (y, &s) in a.rows.iter().zip(&row_cells) {
        if let Some(t) = y.moore {
            bd[s][s + 1] = 1 << t;
        }
    }
    for (x, &s) in a.cols.iter().zip(&col_cells) {
        if let Some(t) = x.moore {
            bd[s][s + 1] = -(1 << t);
        }
    }
    for i in 0..a.rows.len() {
        for j in 0..a.cols.len() {
            let m = a.get(i, j).chain_map().map_err(|e| Error::AtCell { row: i + 1, col: j + 1, source: Box::new(e) })?;
            for (ti, row) in m.iter().enumerate() {
                for (si, &v) in row.iter().enumerate() {
                    bd[row_cells[i] + ti][col_cells[j] + si] += v as i128;
                }
            }
        }
    }
    let dims: std::collections::BTreeSet<i32> = cells.iter().copied().collect();
    let block = |d: i32| -> Vec<Vec<i128>> {
        // Rows: cells of dimension d-1; columns: cells of dimension d.
        let rs: Vec<usize> = (0..n).filter(|&c| cells[c] == d - 1).collect();
        let cs: Vec<usize> = (0..n).filter(|&c| cells[c] == d).collect();
        rs.iter().map(|&r| cs.iter().map(|&c| bd[r][c]).collect()).collect()
    };
    let mut h = GradedAbelianGroup::new();
    for &d in &dims {
        let count = cells.iter().filter(|&&c| c == d).count();
        let out_rank = snf::rank(&block(d));
        let inc = snf::invariant_factors(&block(d + 1));
        let free = count - out_rank - inc.len();
        for _ in 0..free {
            h.add(d, 0);
        }
        for f in inc {
            if f > 1 {
                h.add(d, f as u64);
            }
        }
    }
    Ok(h)
}
