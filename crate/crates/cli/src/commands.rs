//! Subcommand implementations. Each returns a text rendering, a JSON
//! document and an exit code; `main` picks the rendering.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chang_core::expr::Env;
use chang_core::homtables::HomTables;
use chang_core::invariants::{canonical_orders, format_group, integral_homology, mod2_cohomology, Sq, SqModule};
use chang_core::matrix::replay::{matrices_dir, scripts_dir};
use chang_core::matrix::{
    load_script, resolve_script, run_script_trace, split_cone, MatrixFile, MorphismMatrix, RelationTable,
};
use chang_core::model::{Elementary, Summand, WedgeComplex, Window};
use chang_core::smash::{base_rule, decompose_pair, rule_ids, smash_decompose, table_pairs};
use chang_core::verifier::check_decomposition;
use chang_core::Error;
use serde_json::{json, Value};

use crate::parse::{lower, parse_expression};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNTABULATED: i32 = 3;

pub struct Output {
    pub text: String,
    pub json: Value,
    pub code: i32,
}

impl Output {
    fn ok(text: String, json: Value) -> Self {
        Output { text, json, code: EXIT_OK }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UnclassifiedPair(..) | Error::UntabulatedHom { .. } | Error::UnknownComposition(..) => {
            EXIT_UNTABULATED
        }
        Error::VerificationFailed { .. } => EXIT_VERIFY,
        Error::AtCell { source, .. } | Error::AtStep { source, .. } => exit_code(source),
        _ => EXIT_USAGE,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(&e), message: e.to_string() }
    }
}

type Outcome = Result<Output, Failure>;

pub fn complex(text: &str) -> Result<WedgeComplex, Failure> {
    let ast = parse_expression(text).map_err(|e| Failure::usage(format!("{text:?}: {e}")))?;
    lower(&ast).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{text:?}: {}", f.message);
        f
    })
}

fn group_json(orders: &[u64]) -> Value {
    json!(orders.iter().map(|&o| if o == 0 { "Z".to_string() } else { format!("Z/{o}") }).collect::<Vec<_>>())
}

pub fn smash(x: &str, y: &str) -> Outcome {
    let (x, y) = (complex(x)?, complex(y)?);
    let r = smash_decompose(&x, &y)?;
    let mut text = format!("{}\n", r.output);
    for b in &r.branches {
        writeln!(text, "branch {b}").unwrap();
    }
    let v = &r.verification;
    writeln!(
        text,
        "homology {}, mod 2 {}, Sq invariants {}, Sq isomorphism {:?}",
        v.homology_match, v.mod2_match, v.sq_invariants_match, v.sq_iso_found
    )
    .unwrap();
    let json = json!({
        "input": [x.to_string(), y.to_string()],
        "output": r.output.to_string(),
        "summands": r.output.summands().iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "branches": r.branches.iter().map(|b| json!({
            "left": b.left.to_string(), "right": b.right.to_string(), "rule": b.rule, "depth": b.depth,
        })).collect::<Vec<_>>(),
        "verification": serde_json::to_value(v).unwrap(),
    });
    let code = if v.all_ok() { EXIT_OK } else { EXIT_VERIFY };
    Ok(Output { text, json, code })
}

pub fn homology(x: &str) -> Outcome {
    let w = complex(x)?;
    let h = integral_homology(&w);
    let degrees: Vec<Value> = h.iter().map(|(d, g)| json!({ "degree": d, "group": group_json(g) })).collect();
    Ok(Output::ok(format!("{h}\n"), json!({ "complex": w.to_string(), "homology": degrees })))
}

fn module_json(m: &SqModule) -> Value {
    let mut basis = Vec::new();
    let mut ops = Vec::new();
    for d in m.degrees() {
        basis.push(json!({ "degree": d, "basis": m.labels(d) }));
        for l in m.labels(d) {
            for (op, name) in [(Sq::Sq1, "Sq1"), (Sq::Sq2, "Sq2"), (Sq::Sq4, "Sq4")] {
                let img = m.image_labels(op, d, l);
                if !img.is_empty() {
                    ops.push(json!({ "op": name, "source": l, "image": img }));
                }
            }
        }
    }
    json!({ "cohomology": basis, "operations": ops })
}

pub fn cohomology(x: &str, sq: bool) -> Outcome {
    let w = complex(x)?;
    let m = mod2_cohomology(&w);
    let mut json = module_json(&m);
    json["complex"] = json!(w.to_string());
    let text = if sq {
        m.to_string()
    } else {
        json.as_object_mut().unwrap().remove("operations");
        m.to_string().lines().filter(|l| l.starts_with("H^")).map(|l| format!("{l}\n")).collect()
    };
    Ok(Output::ok(text, json))
}

pub fn dual(x: &str, window: Option<i32>) -> Outcome {
    let w = complex(x)?;
    let d = match window {
        Some(n) => {
            let atoms = w.summands().iter().any(|s| matches!(s, Summand::Atom(_)));
            w.dual_in(if atoms { Window::doubled(n) } else { Window::elementary(n) })?
        }
        None => w.dual()?,
    };
    Ok(Output::ok(format!("{d}\n"), json!({ "input": w.to_string(), "dual": d.to_string() })))
}

fn tables() -> Result<HomTables, Failure> {
    Ok(HomTables::load_default()?)
}

/// Every cell of [Σ^deg X, Y] with its descriptor, and the total group.
fn hom_cells(x: &WedgeComplex, y: &WedgeComplex, deg: i32) -> Outcome {
    let t = tables()?;
    let mut text = String::new();
    let mut cells = Vec::new();
    let mut total = Vec::new();
    let mut listed = Vec::new();
    for a in x.summands() {
        for b in y.summands() {
            let d = t.hom_group_deg(a, b, deg)?;
            total.extend(d.group.iter().copied());
            listed.extend(d.generators.iter().map(|g| g.order));
            cells.push(json!({
                "source": d.source, "target": d.target, "group": group_json(&d.group),
                "generators": d.generators.iter().map(|g| json!({ "name": g.name, "order": g.order })).collect::<Vec<_>>(),
                "relations": d.relations, "cite": d.cite,
            }));
            writeln!(text, "  [{}, {}] = {}", d.source, d.target, d).unwrap();
            for r in &d.relations {
                writeln!(text, "    {r}").unwrap();
            }
        }
    }
    let total = canonical_orders(total);
    // Headline in the table's generator order when it presents the group.
    let head = if canonical_orders(listed.clone()) == total { listed } else { total.clone() };
    let text = format!("{}\n{text}", format_group(&head));
    Ok(Output::ok(text, json!({ "group": group_json(&total), "cells": cells })))
}

pub fn pi(n: i32, x: &str) -> Outcome {
    let w = complex(x)?;
    let sphere = WedgeComplex::from(Elementary::sphere(n)?);
    let mut out = hom_cells(&sphere, &w, 0)?;
    out.json["degree"] = json!(n);
    out.json["complex"] = json!(w.to_string());
    Ok(out)
}

pub fn homgroup(x: &str, y: &str, deg: i32) -> Outcome {
    let (x, y) = (complex(x)?, complex(y)?);
    let mut out = hom_cells(&x, &y, deg)?;
    out.json["source"] = json!(x.to_string());
    out.json["target"] = json!(y.to_string());
    out.json["degree"] = json!(deg);
    Ok(out)
}

pub fn verify(x: &str, y: &str, w: &str) -> Outcome {
    let (x, y, w) = (complex(x)?, complex(y)?, complex(w)?);
    let r = check_decomposition(&x, &y, &w);
    let mut text = format!(
        "homology {}\nmod 2 {}\nSq invariants {}\nSq isomorphism {:?}\nMoore obstruction {}\n",
        r.homology_match, r.mod2_match, r.sq_invariants_match, r.sq_iso_found, r.moore_obstruction_ok
    );
    for n in &r.obstruction_notes {
        writeln!(text, "note: {n}").unwrap();
    }
    let code = if r.all_ok() { EXIT_OK } else { EXIT_VERIFY };
    Ok(Output { text, json: serde_json::to_value(&r).unwrap(), code })
}

pub fn branch_coverage() -> Outcome {
    let mut hits: std::collections::BTreeMap<String, usize> = rule_ids().into_iter().map(|r| (r, 0)).collect();
    let pairs = table_pairs();
    for (a, b) in &pairs {
        let (_, rule) = decompose_pair(a, b)?;
        *hits.entry(base_rule(&rule)).or_insert(0) += 1;
    }
    let uncovered: Vec<&String> = hits.iter().filter(|(_, &n)| n == 0).map(|(r, _)| r).collect();
    let mut text = format!("{} pairs, {} rules, {} uncovered\n", pairs.len(), hits.len(), uncovered.len());
    for (r, n) in &hits {
        writeln!(text, "{n:5}  {r}").unwrap();
    }
    let json = json!({ "pairs": pairs.len(), "rules": hits, "uncovered": uncovered });
    Ok(Output::ok(text, json))
}

fn locate(arg: &str, fallback: &Path) -> PathBuf {
    let p = PathBuf::from(arg);
    if p.exists() {
        p
    } else {
        fallback.join(arg)
    }
}

/// Fills parameters the caller left out with the first admissible values.
fn complete_params(file: &MatrixFile, given: &Env) -> Result<Env, Failure> {
    if let Some(p) = given.keys().find(|k| !file.params.contains(k)) {
        return Err(Failure::usage(format!("matrix {} has no parameter {p}", file.name)));
    }
    if file.params.iter().all(|p| given.contains_key(p)) {
        return Ok(given.clone());
    }
    file.param_grid(6, None)?
        .into_iter()
        .find(|e| given.iter().all(|(k, v)| e.get(k) == Some(v)))
        .ok_or_else(|| Failure::usage(format!("no admissible parameters for {} extend {given:?}", file.name)))
}

fn grid_text(m: &MorphismMatrix) -> String {
    m.to_string().lines().map(|l| format!("  {l}\n")).collect()
}

pub enum ScriptChoice {
    File(String),
    Auto,
    None,
}

pub fn reduce(matrix: &str, script: ScriptChoice, params: &Env) -> Outcome {
    let rel = RelationTable::load_default()?;
    let file = MatrixFile::load(&locate(matrix, &matrices_dir()))?;
    let env = complete_params(&file, params)?;
    let input = file.instantiate(&env)?;
    let script_path = match script {
        ScriptChoice::File(s) => Some(locate(&s, &scripts_dir())),
        ScriptChoice::Auto => file
            .replays
            .iter()
            .find(|r| r.when.as_deref().map_or(Ok(true), |w| chang_core::expr::Expr::parse(w)?.holds(&env)) == Ok(true))
            .map(|r| scripts_dir().join(&r.script)),
        ScriptChoice::None => None,
    };
    let steps = match &script_path {
        Some(p) => resolve_script(&load_script(p)?, &input, &env)?,
        None => vec![],
    };
    let trace = run_script_trace(&input, &steps, &rel)?;
    let result = trace.last().unwrap();
    let cone = split_cone(result, &rel)?;
    let params_text: Vec<String> = env.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let mut text = format!("matrix {} ({})\n", file.name, params_text.join(", "));
    if let Some(p) = &script_path {
        writeln!(text, "script {}", p.file_name().unwrap().to_string_lossy()).unwrap();
    }
    text.push_str("input:\n");
    text.push_str(&grid_text(&input));
    for (i, (step, m)) in steps.iter().zip(&trace[1..]).enumerate() {
        writeln!(text, "step {}: {step}", i + 1).unwrap();
        text.push_str(&grid_text(m));
    }
    text.push_str("result:\n");
    text.push_str(&grid_text(result));
    writeln!(text, "cone: {cone}").unwrap();
    let json = json!({
        "matrix": file.name,
        "params": env,
        "script": script_path.as_ref().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()),
        "rows": result.rows.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
        "cols": result.cols.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
        "input": input.cells(),
        "steps": steps.iter().zip(&trace[1..]).map(|(s, m)| json!({ "step": s.to_string(), "grid": m.cells() })).collect::<Vec<_>>(),
        "result": result.cells(),
        "cone": cone.wedge().to_string(),
        "residual_blocks": cone.residual.len(),
    });
    Ok(Output::ok(text, json))
}
