//! Running recorded reductions against their expected grids and cones.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::expr::{Env, Expr};
use crate::homtables::pattern::ComplexPattern;
use crate::invariants::{integral_homology, GradedAbelianGroup};
use crate::model::WedgeComplex;

use super::cone::{cone_homology, split_cone, ConeReport};
use super::grid::{load_script, resolve_script, run_script_checked, run_script_trace, MatrixFile, MorphismMatrix, Replay, TransformStep};
use super::morphism::RelationTable;

/// The shipped matrices and scripts.
pub const DATA_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data");

pub fn matrices_dir() -> PathBuf {
    Path::new(DATA_DIR).join("matrices")
}

pub fn scripts_dir() -> PathBuf {
    Path::new(DATA_DIR).join("scripts")
}

/// Every matrix file in `dir`, sorted by file name.
pub fn load_matrices(dir: &Path) -> Result<Vec<(PathBuf, MatrixFile)>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::Data(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths.into_iter().map(|p| MatrixFile::load(&p).map(|m| (p, m))).collect()
}

#[derive(Clone, Debug)]
pub struct ReplayOutcome {
    pub env: Env,
    pub input: MorphismMatrix,
    pub steps: Vec<TransformStep>,
    pub result: MorphismMatrix,
    pub expected: MorphismMatrix,
    pub cone: ConeReport,
    pub expected_cone: Option<WedgeComplex>,
    pub expected_residual: usize,
    /// Cone homology before and after every step.
    pub homology: Vec<GradedAbelianGroup>,
}

impl ReplayOutcome {
    /// Human-readable differences from the recorded expectations.
    pub fn mismatches(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, (got, want)) in self.result.cells().iter().zip(self.expected.cells()).enumerate() {
            for (j, (g, w)) in got.iter().zip(&want).enumerate() {
                if g != w {
                    out.push(format!("cell ({},{}): got {g}, expected {w}", i + 1, j + 1));
                }
            }
        }
        if let Some(c) = &self.expected_cone {
            if &self.cone.wedge() != c {
                out.push(format!("cone pieces: got {}, expected {c}", self.cone.wedge()));
            }
        }
        if self.cone.residual.len() != self.expected_residual {
            out.push(format!("residual blocks: got {}, expected {}", self.cone.residual.len(), self.expected_residual));
        }
        if self.homology.windows(2).any(|w| w[0] != w[1]) {
            out.push("a step changed the homology of the cone".into());
        }
        // Named pieces plus residual cones must account for all homology.
        let mut pieces = integral_homology(&self.cone.wedge());
        for r in &self.cone.residual {
            match cone_homology(r) {
                Ok(h) => pieces = pieces.direct_sum(&h),
                Err(e) => out.push(format!("residual homology: {e}")),
            }
        }
        if self.homology.last() != Some(&pieces) {
            out.push(format!("split pieces have homology {pieces}, cone has {}", self.homology.last().unwrap()));
        }
        out
    }

    pub fn matches(&self) -> bool {
        self.mismatches().is_empty()
    }
}

/// Whether `replay` covers the parameters `env`.
pub fn replay_applies(file: &MatrixFile, replay: &Replay, env: &Env) -> Result<bool> {
    Ok(file.applies(env)? && replay.when.as_deref().map_or(Ok(true), |w| Expr::parse(w)?.holds(env))?)
}

pub fn run_replay(file: &MatrixFile, replay: &Replay, scripts: &Path, env: &Env, rel: &RelationTable) -> Result<ReplayOutcome> {
    let input = file.instantiate(env)?;
    let specs = load_script(&scripts.join(&replay.script))?;
    let steps = resolve_script(&specs, &input, env)?;
    let result = run_script_checked(&input, &steps, rel)?;
    let expected = MorphismMatrix::parse_grid(input.rows.clone(), input.cols.clone(), &replay.expected, env)?;
    let homology = run_script_trace(&input, &steps, rel)?.iter().map(cone_homology).collect::<Result<Vec<_>>>()?;
    let cone = split_cone(&result, rel)?;
    let expected_cone = match &replay.cone {
        Some(pats) => Some(WedgeComplex::new(
            pats.iter().map(|p| ComplexPattern::parse(p)?.instantiate(env)).collect::<Result<Vec<_>>>()?,
        )),
        None => None,
    };
    Ok(ReplayOutcome {
        env: env.clone(),
        input,
        steps,
        result,
        expected,
        cone,
        expected_cone,
        expected_residual: replay.residual,
        homology,
    })
}

/// Runs every replay of every shipped matrix over parameters in 1..=max.
/// Returns (matrix name, script, parameters, outcome or error).
pub fn run_all(max: i64, rel: &RelationTable) -> Result<Vec<(String, String, Env, Result<ReplayOutcome>)>> {
    let mut out = Vec::new();
    for (_, file) in load_matrices(&matrices_dir())? {
        for replay in &file.replays {
            for env in file.param_grid(max, replay.when.as_deref())? {
                let r = run_replay(&file, replay, &scripts_dir(), &env, rel);
                out.push((file.name.clone(), replay.script.clone(), env, r));
            }
        }
    }
    Ok(out)
}
