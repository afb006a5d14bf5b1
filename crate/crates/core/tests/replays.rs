use chang_core::matrix::{run_all, RelationTable};

#[test]
fn every_recorded_reduction_replays() {
    let rel = RelationTable::builtin();
    let runs = run_all(4, &rel).unwrap();
    let mut failures = Vec::new();
    let mut count = std::collections::BTreeMap::new();
    for (name, script, env, r) in &runs {
        *count.entry(script.clone()).or_insert(0) += 1;
        match r {
            Ok(o) if o.matches() => {}
            Ok(o) => failures.push(format!("{name}/{script} {env:?}: {:?}\n{}", o.mismatches(), o.result)),
            Err(e) => failures.push(format!("{name}/{script} {env:?}: {e}")),
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
    // Every script is exercised by at least one parameter choice.
    for s in ["eta_full_quotient.steps", "full_full_quotient.steps", "bot_full_quotient_least_u.steps", "moore_pair_equal.steps"] {
        assert!(count.get(s).copied().unwrap_or(0) > 0, "{s} never ran");
    }
}
