//! JSON reports for the bundled models, pinned under `tests/golden/`.
//! Run with `UPDATE_GOLDEN=1` to rewrite them.

use std::path::PathBuf;

use serde_json::Value;

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Floats compare to 1e-6 relative (or both below 1e-12), so platform libm
/// differences in the last bits of a residual do not matter.
fn same(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) if x.is_f64() || y.is_f64() => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            (x.abs() < 1e-12 && y.abs() < 1e-12) || (x - y).abs() <= 1e-6 * x.abs().max(y.abs())
        }
        (Value::Array(x), Value::Array(y)) => x.len() == y.len() && x.iter().zip(y).all(|(p, q)| same(p, q)),
        (Value::Object(x), Value::Object(y)) => x.len() == y.len() && x.iter().all(|(k, v)| y.get(k).is_some_and(|w| same(v, w))),
        _ => a == b,
    }
}

fn pin(name: &str, args: &[&str], code: i32) {
    let mut argv = vec!["crnss"];
    argv.extend_from_slice(args);
    argv.push("--json");
    let out = crnss_cli::execute(argv);
    assert_eq!(out.code, code, "{args:?}: {}", out.stderr);
    let got: Value = serde_json::from_str(&out.stdout).unwrap();
    let path = golden_dir().join(format!("{name}.json"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(golden_dir()).unwrap();
        std::fs::write(&path, out.stdout).unwrap();
        return;
    }
    let want: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))).unwrap();
    assert!(same(&got, &want), "{name} differs from {}:\n{}", path.display(), out.stdout);
}

#[test]
fn analyze_three_species() {
    pin("analyze_three_species", &["analyze", "examples/three_species.crn"], 0);
}

#[test]
fn decompose_insulin() {
    pin("decompose_insulin", &["decompose", "examples/insulin.crn"], 0);
}

#[test]
fn translate_enzyme() {
    pin("translate_enzyme", &["translate", "examples/enzyme.crn"], 0);
}

#[test]
fn parametrize_enzyme() {
    pin("parametrize_enzyme", &["parametrize", "examples/enzyme.crn"], 0);
}

#[test]
fn pipeline_three_species() {
    pin("pipeline_three_species", &["pipeline", "examples/three_species.crn"], 0);
}

#[test]
fn pipeline_enzyme() {
    pin("pipeline_enzyme", &["pipeline", "examples/enzyme.crn"], 0);
}

#[test]
fn pipeline_simple_translation() {
    pin("pipeline_simple_translation", &["pipeline", "examples/simple_translation.crn"], 0);
}

#[test]
fn pipeline_yu_craciun() {
    pin("pipeline_yu_craciun", &["pipeline", "examples/yu_craciun.crn", "--clear-denominators"], 0);
}

#[test]
fn pipeline_insulin() {
    pin("pipeline_insulin", &["pipeline", "examples/insulin.crn"], 0);
}

#[test]
fn transform_yu_craciun() {
    pin("transform_yu_craciun", &["transform", "examples/yu_craciun.crn"], 0);
}

#[test]
fn verify_published_insulin_list() {
    pin("verify_insulin_published", &["verify", "examples/insulin.crn", "examples/insulin_published.par"], 1);
}

#[test]
fn reports_are_reproducible() {
    let run = || crnss_cli::execute(["crnss", "pipeline", "examples/insulin.crn", "--json", "--seed", "99"]).stdout;
    assert_eq!(run(), run());
}
