//! Byte-exact output of every subcommand at fixed inputs and seeds.
//! Regenerate with `UPDATE_GOLDEN=1 cargo test -p meanrefine --test golden`.

use std::fs;
use std::path::PathBuf;

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("meanrefine").chain(args.iter().copied());
    let code = meanrefine::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap())
}

/// Drops the `"elapsed_ms":…,` member, the only run-dependent field.
fn strip_elapsed(text: &str) -> String {
    let key = "\"elapsed_ms\":";
    match text.find(key) {
        Some(start) => {
            let rest = &text[start + key.len()..];
            let end = rest.find(',').expect("elapsed_ms is never the last key");
            format!("{}{}", &text[..start], &rest[end + 1..])
        }
        None => text.to_string(),
    }
}

fn check(name: &str, args: &[&str], expected_code: i32) {
    let (code, out) = run(args);
    assert_eq!(code, expected_code, "{name}: {out}");
    let got = strip_elapsed(&out);
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.txt"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, &got).unwrap();
        return;
    }
    let want = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(got, want, "{name} differs from {}", path.display());
}

#[test]
fn means_eval() {
    check("means_eval", &["means", "eval", "--mean", "power:0", "--x", "4", "--y", "9"], 0);
}

#[test]
fn means_axioms() {
    check("means_axioms", &["means", "axioms", "--mean", "rado:-1", "--samples", "600", "--seed", "7"], 0);
}

#[test]
fn means_axioms_violation() {
    check("means_axioms_lehmer", &["means", "axioms", "--mean", "lehmer:1", "--samples", "300", "--seed", "42"], 2);
}

#[test]
fn mean_theory_envelope() {
    check("mean_theory_envelope", &["mean-theory", "envelope", "--alpha", "-0.75"], 0);
}

#[test]
fn mean_theory_verify() {
    check("mean_theory_verify", &["mean-theory", "verify", "--alpha", "2", "--samples", "700", "--seed", "3"], 0);
}

#[test]
fn refine_discrete() {
    let csv = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/pairs.csv");
    let (code, out) = run(&["refine", "discrete", "--mean", "power:1", "--input", csv]);
    assert_eq!(code, 0);
    // the echoed path depends on the checkout location
    let got = strip_elapsed(&out).replace(env!("CARGO_MANIFEST_DIR"), "<crate>");
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/refine_discrete.txt");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, &got).unwrap();
        return;
    }
    assert_eq!(got, fs::read_to_string(&path).unwrap());
}

#[test]
fn refine_integral() {
    check(
        "refine_integral",
        &["refine", "integral", "--mean", "min", "--f", "x", "--g", "1-x", "--a", "0", "--b", "1"],
        0,
    );
}

#[test]
fn refine_integral_identity() {
    check(
        "refine_integral_identity",
        &["refine", "integral", "--mean", "power:2", "--f", "x", "--g", "1-x", "--identity"],
        0,
    );
}

#[test]
fn refine_integral_q() {
    check(
        "refine_integral_q",
        &["refine", "integral", "--mean", "min", "--f", "x", "--g", "1-x", "--q", "0.9"],
        0,
    );
}

#[test]
fn refine_integral_signed() {
    check(
        "refine_integral_signed",
        &["refine", "integral", "--mean", "max", "--f", "sin(6*x)", "--g", "0.5+x", "--signed"],
        0,
    );
}

#[test]
fn iterate() {
    check(
        "iterate",
        &["iterate", "--f", "x", "--g", "1-x", "--a", "0", "--b", "1", "--alpha", "1", "--steps", "5"],
        0,
    );
}

#[test]
fn gamma_table() {
    check("gamma_table", &["gamma-table", "--a", "3,5,7,10,20"], 0);
}

#[test]
fn gamma_table_json() {
    check("gamma_table_json", &["gamma-table", "--a", "3", "--json"], 0);
}

#[test]
fn elliptic() {
    check("elliptic", &["elliptic", "--x", "0.5", "--level", "2"], 0);
}

#[test]
fn theta_bound() {
    check("theta_bound", &["theta-bound", "--q", "0.9"], 0);
}

#[test]
fn theta_bound_log() {
    check("theta_bound_log", &["theta-bound", "--q", "0.999", "--log"], 0);
}

#[test]
fn uncertainty() {
    check("uncertainty", &["uncertainty", "--vector", "1,0,1,0,1,0"], 0);
}

#[test]
fn complexify_curve() {
    check("complexify_curve", &["complexify", "curve", "--samples", "8"], 0);
}

#[test]
fn complexify_classify() {
    check("complexify_classify", &["complexify", "classify", "--re", "1", "--im", "2"], 0);
}

#[test]
fn aczel() {
    check("aczel", &["aczel", "--mean", "power:0", "--x", "5,1,2", "--y", "4,1,1"], 0);
}

#[test]
fn jackson() {
    check("jackson", &["jackson", "--mean", "min", "--f", "x", "--g", "1-x", "--q", "0.5"], 0);
}

#[test]
fn sweeps_do_not_depend_on_thread_count() {
    for args in [
        ["means", "axioms", "--mean", "power:0.5", "--samples", "2000"],
        ["mean-theory", "verify", "--alpha", "-3", "--samples", "2000"],
    ] {
        let one = run(&[&["--threads", "1"], &args[..]].concat());
        let four = run(&[&["--threads", "4"], &args[..]].concat());
        assert_eq!(one.0, four.0);
        assert_eq!(strip_elapsed(&one.1), strip_elapsed(&four.1));
    }
}
