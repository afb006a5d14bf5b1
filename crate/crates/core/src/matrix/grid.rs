//! Matrices of formal morphisms between wedges of spheres and Moore spaces,
//! the elementary row and column operations on them, and their file forms.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Env, Expr};
use crate::homtables::pattern::ComplexPattern;
use crate::model::Summand;

use super::morphism::{FormalMorphism, RelationTable};
use super::poly::{valuations, Valuation};
use super::word::Obj;

/// Entry (i, j) maps source column j to target row i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismMatrix {
    pub rows: Vec<Obj>,
    pub cols: Vec<Obj>,
    entries: Vec<Vec<FormalMorphism>>,
}

impl MorphismMatrix {
    pub fn zero(rows: Vec<Obj>, cols: Vec<Obj>) -> Self {
        let entries = rows.iter().map(|&y| cols.iter().map(|&x| FormalMorphism::zero(x, y)).collect()).collect();
        MorphismMatrix { rows, cols, entries }
    }

    pub fn new(rows: Vec<Obj>, cols: Vec<Obj>, entries: Vec<Vec<FormalMorphism>>) -> Result<Self> {
        if entries.len() != rows.len() || entries.iter().any(|r| r.len() != cols.len()) {
            return Err(Error::Data(format!("expected a {}x{} grid of entries", rows.len(), cols.len())));
        }
        for (i, row) in entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if e.source != cols[j] || e.target != rows[i] {
                    return Err(Error::AtCell {
                        row: i + 1,
                        col: j + 1,
                        source: Box::new(Error::IllTyped(format!("entry runs {} -> {}", e.source, e.target))),
                    });
                }
            }
        }
        Ok(MorphismMatrix { rows, cols, entries })
    }

    /// Parses every cell; errors name the 1-based cell.
    pub fn parse_grid(rows: Vec<Obj>, cols: Vec<Obj>, cells: &[Vec<String>], env: &Env) -> Result<Self> {
        if cells.len() != rows.len() || cells.iter().any(|r| r.len() != cols.len()) {
            return Err(Error::Data(format!("expected a {}x{} grid of entries", rows.len(), cols.len())));
        }
        let mut entries = Vec::with_capacity(rows.len());
        for (i, row) in cells.iter().enumerate() {
            let mut out = Vec::with_capacity(cols.len());
            for (j, text) in row.iter().enumerate() {
                let f = FormalMorphism::parse(text, cols[j], rows[i], env).map_err(|e| Error::AtCell {
                    row: i + 1,
                    col: j + 1,
                    source: Box::new(e),
                })?;
                out.push(f);
            }
            entries.push(out);
        }
        Ok(MorphismMatrix { rows, cols, entries })
    }

    pub fn get(&self, i: usize, j: usize) -> &FormalMorphism {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<FormalMorphism>] {
        &self.entries
    }

    pub fn cells(&self) -> Vec<Vec<String>> {
        self.entries.iter().map(|r| r.iter().map(|e| e.to_string()).collect()).collect()
    }

    pub fn bits(&self) -> std::collections::BTreeSet<String> {
        self.entries.iter().flatten().flat_map(|e| e.bits()).collect()
    }

    pub fn eval(&self, v: &Valuation) -> Self {
        MorphismMatrix {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            entries: self.entries.iter().map(|r| r.iter().map(|e| e.eval(v)).collect()).collect(),
        }
    }

    /// Keeps the listed rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        MorphismMatrix {
            rows: rows.iter().map(|&i| self.rows[i]).collect(),
            cols: cols.iter().map(|&j| self.cols[j]).collect(),
            entries: rows.iter().map(|&i| cols.iter().map(|&j| self.entries[i][j].clone()).collect()).collect(),
        }
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, f: FormalMorphism) {
        self.entries[i][j] = f;
    }
}

impl fmt::Display for MorphismMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells = self.cells();
        let mut header = vec![String::new()];
        header.extend(self.cols.iter().map(|c| c.to_string()));
        let mut table = vec![header];
        for (i, row) in cells.into_iter().enumerate() {
            let mut r = vec![self.rows[i].to_string()];
            r.extend(row);
            table.push(r);
        }
        let width = |j: usize| table.iter().map(|r| r[j].chars().count()).max().unwrap_or(0);
        let widths: Vec<usize> = (0..table[0].len()).map(width).collect();
        for (k, r) in table.iter().enumerate() {
            let line: Vec<String> = r
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                .collect();
            let sep = if k == 0 { "   " } else { " | " };
            writeln!(f, "{}{sep}{}", line[0], line[1..].join("  ").trim_end())?;
        }
        Ok(())
    }
}

/// Indices are 1-based, matching how reductions are written by hand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransformStep {
    /// row n += g ∘ row m, with g from the target of row m to that of row n.
    RowCompose { g: FormalMorphism, m: usize, n: usize },
    /// col n += col m ∘ f, with f from the source of col n to that of col m.
    ColCompose { m: usize, f: FormalMorphism, n: usize },
    NegateRow { n: usize },
    NegateCol { n: usize },
    /// row n += k · row m.
    ScaleAddRow { k: i64, m: usize, n: usize },
    /// col n += k · col m.
    ScaleAddCol { k: i64, m: usize, n: usize },
}

impl TransformStep {
    pub fn inverse(&self) -> Self {
        use TransformStep::*;
        match self {
            RowCompose { g, m, n } => RowCompose { g: g.neg(), m: *m, n: *n },
            ColCompose { m, f, n } => ColCompose { m: *m, f: f.neg(), n: *n },
            NegateRow { n } => NegateRow { n: *n },
            NegateCol { n } => NegateCol { n: *n },
            ScaleAddRow { k, m, n } => ScaleAddRow { k: -k, m: *m, n: *n },
            ScaleAddCol { k, m, n } => ScaleAddCol { k: -k, m: *m, n: *n },
        }
    }
}

impl fmt::Display for TransformStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TransformStep::*;
        match self {
            RowCompose { g, m, n } => write!(f, "r{n} += ({g})·r{m}"),
            ColCompose { m, f: h, n } => write!(f, "c{n} += c{m}·({h})"),
            NegateRow { n } => write!(f, "r{n} = -r{n}"),
            NegateCol { n } => write!(f, "c{n} = -c{n}"),
            ScaleAddRow { k, m, n } => write!(f, "r{n} += {k}·r{m}"),
            ScaleAddCol { k, m, n } => write!(f, "c{n} += {k}·c{m}"),
        }
    }
}

fn index(i: usize, len: usize, what: &str) -> Result<usize> {
    if i == 0 || i > len {
        return Err(Error::Data(format!("{what} {i} out of range 1..={len}")));
    }
    Ok(i - 1)
}

fn distinct(m: usize, n: usize) -> Result<()> {
    if m == n {
        return Err(Error::Data(format!("a step needs two different indices, got {m} twice")));
    }
    Ok(())
}

fn cell(i: usize, j: usize) -> impl Fn(Error) -> Error {
    move |e| Error::AtCell { row: i + 1, col: j + 1, source: Box::new(e) }
}

/// Applies one step, returning the new matrix.
pub fn apply_step(a: &MorphismMatrix, step: &TransformStep, rel: &RelationTable) -> Result<MorphismMatrix> {
    use TransformStep::*;
    let mut b = a.clone();
    let (nr, nc) = (a.rows.len(), a.cols.len());
    match step {
        RowCompose { g, m, n } => {
            distinct(*m, *n)?;
            let (m, n) = (index(*m, nr, "row")?, index(*n, nr, "row")?);
            if g.source != a.rows[m] || g.target != a.rows[n] {
                return Err(Error::IllTyped(format!(
                    "row map must run {} -> {}, got {} -> {}",
                    a.rows[m], a.rows[n], g.source, g.target
                )));
            }
            for j in 0..nc {
                let add = g.compose(a.get(m, j), rel).map_err(cell(m, j))?;
                b.set(n, j, a.get(n, j).add(&add).map_err(cell(n, j))?);
            }
        }
        ColCompose { m, f, n } => {
            distinct(*m, *n)?;
            let (m, n) = (index(*m, nc, "column")?, index(*n, nc, "column")?);
            if f.source != a.cols[n] || f.target != a.cols[m] {
                return Err(Error::IllTyped(format!(
                    "column map must run {} -> {}, got {} -> {}",
                    a.cols[n], a.cols[m], f.source, f.target
                )));
            }
            for i in 0..nr {
                let add = a.get(i, m).compose(f, rel).map_err(cell(i, m))?;
                b.set(i, n, a.get(i, n).add(&add).map_err(cell(i, n))?);
            }
        }
        NegateRow { n } => {
            let n = index(*n, nr, "row")?;
            for j in 0..nc {
                b.set(n, j, a.get(n, j).neg());
            }
        }
        NegateCol { n } => {
            let n = index(*n, nc, "column")?;
            for i in 0..nr {
                b.set(i, n, a.get(i, n).neg());
            }
        }
        ScaleAddRow { k, m, n } => {
            distinct(*m, *n)?;
            let (m, n) = (index(*m, nr, "row")?, index(*n, nr, "row")?);
            let g = FormalMorphism::scalar(a.rows[m], *k);
            if a.rows[m] != a.rows[n] {
                return Err(Error::IllTyped(format!("cannot add a multiple of row {} ({}) to row {} ({})", m + 1, a.rows[m], n + 1, a.rows[n])));
            }
            for j in 0..nc {
                let add = g.compose(a.get(m, j), rel).map_err(cell(m, j))?;
                b.set(n, j, a.get(n, j).add(&add).map_err(cell(n, j))?);
            }
        }
        ScaleAddCol { k, m, n } => {
            distinct(*m, *n)?;
            let (m, n) = (index(*m, nc, "column")?, index(*n, nc, "column")?);
            if a.cols[m] != a.cols[n] {
                return Err(Error::IllTyped(format!("cannot add a multiple of column {} ({}) to column {} ({})", m + 1, a.cols[m], n + 1, a.cols[n])));
            }
            let f = FormalMorphism::scalar(a.cols[n], *k);
            for i in 0..nr {
                let add = a.get(i, m).compose(&f, rel).map_err(cell(i, m))?;
                b.set(i, n, a.get(i, n).add(&add).map_err(cell(i, n))?);
            }
        }
    }
    Ok(b)
}

/// Every intermediate matrix, starting with `a`. Errors carry the 1-based
/// step number.
pub fn run_script_trace(a: &MorphismMatrix, steps: &[TransformStep], rel: &RelationTable) -> Result<Vec<MorphismMatrix>> {
    let mut out = vec![a.clone()];
    for (k, s) in steps.iter().enumerate() {
        let next = apply_step(out.last().unwrap(), s, rel).map_err(|e| Error::AtStep { index: k + 1, source: Box::new(e) })?;
        out.push(next);
    }
    Ok(out)
}

pub fn run_script(a: &MorphismMatrix, steps: &[TransformStep], rel: &RelationTable) -> Result<MorphismMatrix> {
    Ok(run_script_trace(a, steps, rel)?.pop().unwrap())
}

/// Runs the script with the symbolic bits left free, then checks that every
/// assignment of the bits gives the same answer as running the script on
/// the specialised input. Returns the symbolic result.
pub fn run_script_checked(a: &MorphismMatrix, steps: &[TransformStep], rel: &RelationTable) -> Result<MorphismMatrix> {
    let symbolic = run_script(a, steps, rel)?;
    let mut bits = a.bits();
    bits.extend(symbolic.bits());
    for v in valuations(&bits) {
        let direct = run_script(&a.eval(&v), steps, rel)?.eval(&v);
        if direct != symbolic.eval(&v) {
            return Err(Error::Data(format!("bit assignment {v:?} changes the result of the script")));
        }
    }
    Ok(symbolic)
}

/// One step as stored in a script file: morphisms are literals typed
/// against the matrix, and `when` skips the step unless it holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum StepSpec {
    RowCompose {
        g: String,
        m: usize,
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        when: Option<String>,
    },
    ColCompose {
        m: usize,
        f: String,
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        when: Option<String>,
    },
    NegateRow {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        when: Option<String>,
    },
    NegateCol {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        when: Option<String>,
    },
    ScaleAddRow {
        k: String,
        m: usize,
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        when: Option<String>,
    },
    ScaleAddCol {
        k: String,
        m: usize,
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        when: Option<String>,
    },
}

impl StepSpec {
    fn when(&self) -> Option<&str> {
        use StepSpec::*;
        match self {
            RowCompose { when, .. }
            | ColCompose { when, .. }
            | NegateRow { when, .. }
            | NegateCol { when, .. }
            | ScaleAddRow { when, .. }
            | ScaleAddCol { when, .. } => when.as_deref(),
        }
    }

    /// The concrete step for matrix `a`, or None when `when` fails.
    pub fn resolve(&self, a: &MorphismMatrix, env: &Env) -> Result<Option<TransformStep>> {
        use StepSpec::*;
        if let Some(w) = self.when() {
            if !Expr::parse(w)?.holds(env)? {
                return Ok(None);
            }
        }
        let obj = |v: &[Obj], i: usize, what: &str| -> Result<Obj> { Ok(v[index(i, v.len(), what)?]) };
        let int = |k: &str| Expr::parse(k)?.eval(env);
        Ok(Some(match self {
            RowCompose { g, m, n, .. } => TransformStep::RowCompose {
                g: FormalMorphism::parse(g, obj(&a.rows, *m, "row")?, obj(&a.rows, *n, "row")?, env)?,
                m: *m,
                n: *n,
            },
            ColCompose { m, f, n, .. } => TransformStep::ColCompose {
                m: *m,
                f: FormalMorphism::parse(f, obj(&a.cols, *n, "column")?, obj(&a.cols, *m, "column")?, env)?,
                n: *n,
            },
            NegateRow { n, .. } => TransformStep::NegateRow { n: *n },
            NegateCol { n, .. } => TransformStep::NegateCol { n: *n },
            ScaleAddRow { k, m, n, .. } => TransformStep::ScaleAddRow { k: int(k)?, m: *m, n: *n },
            ScaleAddCol { k, m, n, .. } => TransformStep::ScaleAddCol { k: int(k)?, m: *m, n: *n },
        }))
    }
}

pub fn parse_script(text: &str) -> Result<Vec<StepSpec>> {
    serde_json::from_str(text).map_err(|e| Error::Data(format!("script: {e}")))
}

pub fn load_script(path: &Path) -> Result<Vec<StepSpec>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    parse_script(&text).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
}

/// Resolves each step against `a`; errors carry the 1-based step number.
pub fn resolve_script(specs: &[StepSpec], a: &MorphismMatrix, env: &Env) -> Result<Vec<TransformStep>> {
    let mut out = Vec::new();
    for (k, s) in specs.iter().enumerate() {
        if let Some(step) = s.resolve(a, env).map_err(|e| Error::AtStep { index: k + 1, source: Box::new(e) })? {
            out.push(step);
        }
    }
    Ok(out)
}

/// A recorded reduction: script, the parameter range it covers, and the
/// grid and cone pieces it should produce.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Replay {
    pub script: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub when: Option<String>,
    pub expected: Vec<Vec<String>>,
    /// Named cone summands, as complex patterns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone: Option<Vec<String>>,
    /// Number of blocks the cone splitter is expected to leave unnamed.
    #[serde(default)]
    pub residual: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default)]
    pub params: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub when: Option<String>,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub entries: Vec<Vec<String>>,
    #[serde(default)]
    pub replays: Vec<Replay>,
}

fn objs(patterns: &[String], env: &Env) -> Result<Vec<Obj>> {
    patterns
        .iter()
        .map(|p| match ComplexPattern::parse(p)?.instantiate(env)? {
            Summand::Elementary(e) => Obj::from_elementary(&e),
            other => Err(Error::IllTyped(format!("matrix summand {other} is not elementary"))),
        })
        .collect()
}

impl MatrixFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Data(format!("matrix file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
    }

    pub fn applies(&self, env: &Env) -> Result<bool> {
        for p in &self.params {
            if !env.contains_key(p) {
                return Err(Error::Data(format!("matrix {} needs parameter {p}", self.name)));
            }
        }
        match &self.when {
            Some(w) => Expr::parse(w)?.holds(env),
            None => Ok(true),
        }
    }

    pub fn instantiate(&self, env: &Env) -> Result<MorphismMatrix> {
        if !self.applies(env)? {
            return Err(Error::Data(format!("parameters {env:?} violate {}", self.when.as_deref().unwrap_or(""))));
        }
        MorphismMatrix::parse_grid(objs(&self.rows, env)?, objs(&self.cols, env)?, &self.entries, env)
    }

    /// All parameter assignments with values in 1..=max satisfying `when`
    /// and the extra condition.
    pub fn param_grid(&self, max: i64, extra: Option<&str>) -> Result<Vec<Env>> {
        let extra = extra.map(Expr::parse).transpose()?;
        let mut out = vec![Env::new()];
        for p in &self.params {
            out = out
                .into_iter()
                .flat_map(|e| {
                    (1..=max).map(move |v| {
                        let mut e = e.clone();
                        e.insert(p.clone(), v);
                        e
                    })
                })
                .collect();
        }
        let mut kept = Vec::new();
        for e in out {
            if self.applies(&e)? && extra.as_ref().map_or(Ok(true), |x| x.holds(&e))? {
                kept.push(e);
            }
        }
        Ok(kept)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::env;

    fn sample() -> MorphismMatrix {
        // Rows S^8, S^7, M_{2^2}^7; columns S^8, M_{2^2}^8.
        let rows = vec![Obj::sphere(8), Obj::sphere(7), Obj::moore(2, 7)];
        let cols = vec![Obj::sphere(8), Obj::moore(2, 8)];
        let cells: Vec<Vec<String>> = [["8", "ηq"], ["η", "0"], ["0", "η∧1"]]
            .iter()
            .map(|r| r.iter().map(|s| s.to_string()).collect())
            .collect();
        MorphismMatrix::parse_grid(rows, cols, &cells, &Env::new()).unwrap()
    }

    #[test]
    fn row_compose_clears_entry() {
        let rel = RelationTable::builtin();
        let a = sample();
        let spec = StepSpec::RowCompose { g: "q".into(), m: 3, n: 1, when: None };
        let step = spec.resolve(&a, &Env::new()).unwrap().unwrap();
        let b = apply_step(&a, &step, &rel).unwrap();
        assert_eq!(b.cells()[0], ["8", "0"]);
        assert_eq!(apply_step(&b, &step.inverse(), &rel).unwrap(), a);
    }

    #[test]
    fn bad_steps_are_located() {
        let rel = RelationTable::builtin();
        let a = sample();
        let bad = TransformStep::ScaleAddRow { k: 1, m: 3, n: 1 };
        let err = run_script(&a, &[TransformStep::NegateRow { n: 2 }, bad], &rel).unwrap_err();
        assert!(matches!(err, Error::AtStep { index: 2, .. }), "{err}");
        let err = MorphismMatrix::parse_grid(a.rows.clone(), a.cols.clone(), &[vec!["1".into(), "0".into()], vec!["η".into(), "q".into()], vec!["0".into(), "0".into()]], &Env::new()).unwrap_err();
        assert!(matches!(err, Error::AtCell { row: 2, col: 2, .. }), "{err}");
    }

    #[test]
    fn script_json_and_when() {
        let specs = parse_script(r#"[{"kind":"NegateRow","n":2,"when":"u = 1"},{"kind":"ScaleAddRow","k":"2^(r-u)","m":2,"n":1}]"#).unwrap();
        let a = MorphismMatrix::zero(vec![Obj::sphere(7), Obj::sphere(7)], vec![Obj::sphere(7)]);
        let steps = resolve_script(&specs, &a, &env([("u", 2), ("r", 3)])).unwrap();
        assert_eq!(steps, vec![TransformStep::ScaleAddRow { k: 2, m: 2, n: 1 }]);
    }
}
