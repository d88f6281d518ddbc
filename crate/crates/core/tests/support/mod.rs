#![allow(dead_code)]

pub mod asm_oracle;
pub mod ltl_oracle;
pub mod seq_oracle;

use asm_check_core::gts::{StateVector, System, VarKind};
use asm_check_core::{compile, Compiled, TranslateOptions};
use std::collections::BTreeMap;
use std::path::PathBuf;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn compile_fixture(name: &str) -> Compiled {
    compile(&fixture_text(name), TranslateOptions::default()).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Controlled and monitored values of a checker state, keyed like the
/// oracle's locations.
pub fn project(sys: &System, s: &StateVector) -> BTreeMap<String, String> {
    sys.variables
        .iter()
        .enumerate()
        .filter(|(_, v)| matches!(v.kind, VarKind::Controlled | VarKind::Monitored))
        .map(|(i, v)| (v.name.clone(), s.vals[i].plain(sys)))
        .collect()
}

pub fn render_oracle(s: &asm_oracle::OState) -> BTreeMap<String, String> {
    s.iter().map(|(k, v)| (k.clone(), v.render())).collect()
}

pub fn load(model: &str) -> System {
    if model.ends_with(".bir") {
        asm_check_core::read_bir_text(&fixture_text(model)).unwrap_or_else(|e| panic!("{model}: {e}"))
    } else {
        compile_fixture(model).translation.system
    }
}

/// A par of `n` guarded children over disjoint flags.
pub fn par_model(n: usize) -> String {
    let mut s = String::from("asm Lattice\n\nimport StandardLibrary\n\nsignature:\n");
    for i in 1..=n {
        s += &format!("  dynamic controlled x{i}: Boolean\n");
    }
    s += "\ndefinitions:\n\nmain rule r_Main =\n  par\n";
    for i in 1..=n {
        s += &format!("    if x{i} then x{i} := false endif\n");
    }
    s += "  endpar\n\ndefault init s0:\n";
    for i in 1..=n {
        s += &format!("  function x{i} = true\n");
    }
    s
}

/// Compares the translated system of an `.asm` fixture with the direct
/// interpreter: visible states, initial states, edges and the verdicts of
/// invariance properties. Returns the number of states compared.
pub fn oracle_agreement(name: &str) -> Result<usize, String> {
    use asm_check_core::checker::{explore, Limits};
    use asm_check_core::{check, CheckOptions, Outcome};
    use std::collections::BTreeSet;
    type Projected = BTreeMap<String, String>;

    let src = fixture_text(name);
    let model = asm_check_core::parse_source(&src).map_err(|e| e.to_string())?;
    let oracle = asm_oracle::Oracle::new(&model);
    let reach = oracle.reachable(200_000)?;

    let sys = compile_fixture(name).translation.system;
    let g = explore(&sys, &Limits::default());
    if !g.errors.is_empty() {
        return Err(format!("runtime errors: {:?}", g.errors));
    }
    let ours: BTreeSet<Projected> = g.states.iter().map(|s| project(&sys, s)).collect();
    let theirs: BTreeSet<Projected> = reach.states.iter().map(render_oracle).collect();
    if ours != theirs {
        let only_ours = ours.difference(&theirs).count();
        let only_theirs = theirs.difference(&ours).count();
        return Err(format!("visible states differ: {only_ours} only in the checker, {only_theirs} only in the interpreter"));
    }
    if g.states.len() != reach.states.len() {
        return Err(format!("{} checker states for {} distinct valuations", g.states.len(), reach.states.len()));
    }
    let init_ours: BTreeSet<Projected> = g.initial.iter().map(|&i| project(&sys, &g.states[i])).collect();
    let init_theirs: BTreeSet<Projected> = reach.initial.iter().map(render_oracle).collect();
    if init_ours != init_theirs {
        return Err("initial states differ".into());
    }
    let by_value: BTreeMap<Projected, &asm_oracle::OState> = reach.states.iter().map(|s| (render_oracle(s), s)).collect();
    for (i, succ) in g.succ.iter().enumerate() {
        let from = project(&sys, &g.states[i]);
        let ours: BTreeSet<Projected> = succ.iter().map(|&j| project(&sys, &g.states[j])).collect();
        let theirs: BTreeSet<Projected> = reach.edges[by_value[&from]].iter().map(render_oracle).collect();
        if ours != theirs {
            return Err(format!("successors of {from:?} differ"));
        }
    }
    let report = check(&sys, &CheckOptions::default())?;
    for spec in &model.ltl_specs {
        let Some(expected) = oracle.invariance_verdict(&spec.formula, &reach) else { continue };
        let v = report.properties.iter().find(|v| v.name == spec.name).ok_or("missing property")?;
        let got = match &v.outcome {
            Outcome::Holds => true,
            Outcome::Violated => false,
            Outcome::Error(e) => return Err(format!("{}: {e}", spec.name)),
        };
        if got != expected {
            return Err(format!("{}: checker says {got}, interpreter says {expected}", spec.name));
        }
    }
    Ok(g.states.len())
}
