use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

struct Sandbox {
    dir: TempDir,
}

impl Sandbox {
    fn new() -> Self {
        Sandbox { dir: tempfile::tempdir().unwrap() }
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    }
}

fn agl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agl")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn eval_delta_of_an_element_is_zero() {
    let s = Sandbox::new();
    let m = s.file("m.st", "backend rat\nuniverse a\npred P = 2\n");
    let o = agl(&["eval", "delta(P)", "--structure", path(&m)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "0\n");
}

#[test]
fn eval_with_assignment() {
    let s = Sandbox::new();
    let m = s.file("m.st", "backend rat\nuniverse a b\npred P a = 2\npred P b = 1/3\n");
    let o = agl(&["eval", "P(x) * P(x)", "--structure", path(&m), "--assign", "x=b"]);
    assert_eq!(stdout(&o), "1/9\n");
}

#[test]
fn failing_sentence_is_named() {
    let s = Sandbox::new();
    let m = s.file("m.st", "backend rat\nuniverse a\npred P = 2\n");
    let t = s.file("t.th", "P -> P\ndelta(P)\n");
    let o = agl(&["check-model", "--theory", path(&t), "--structure", path(&m)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL\tdelta(P)"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("delta(P)"));
}

#[test]
fn contradictory_theory_is_unsat() {
    let s = Sandbox::new();
    let t = s.file("t.th", "delta(P)\n~delta(P)\n");
    let o = agl(&["solve", "--theory", path(&t), "--max-domain", "2"]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.starts_with("UNSAT-up-to(2)\n"), "{out}");
    assert!(out.contains("# size 2:"));
}

#[test]
fn solved_structure_reloads_and_checks() {
    let s = Sandbox::new();
    let t = s.file("t.th", "P -> Q\none ==> Q\nforall x. R(x) -> Q\nexists x. R(x) * R(x) ==> Q\n");
    let o = agl(&["solve", "--theory", path(&t), "--max-domain", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m = s.file("m.st", &stdout(&o));
    let check = agl(&["check-model", "--theory", path(&t), "--structure", path(&m)]);
    assert_eq!(code(&check), 0, "{}", stdout(&check));
}

#[test]
fn lex_backend_solutions_reload() {
    let s = Sandbox::new();
    let t = s.file("t.th", "one ==> rho\nrho^3 ==> eps\n");
    let o = agl(&["solve", "--theory", path(&t), "--max-domain", "1", "--backend", "lex2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("backend lex2\n"));
    let m = s.file("m.st", &stdout(&o));
    assert_eq!(code(&agl(&["check-model", "--theory", path(&t), "--structure", path(&m)])), 0);
}

#[test]
fn same_seed_same_bytes() {
    let a = agl(&["check-translation", "--random", "30", "--seed", "9"]);
    let b = agl(&["check-translation", "--random", "30", "--seed", "9"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a), "30/30 agree\n");
    let s = Sandbox::new();
    let t = s.file("t.th", "P -> Q\none ==> Q\n");
    let x = agl(&["solve", "--theory", path(&t), "--seed", "4"]);
    let y = agl(&["solve", "--theory", path(&t), "--seed", "4"]);
    assert_eq!(x.stdout, y.stdout);
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let s = Sandbox::new();
    let m = s.file("m.st", "backend rat\nuniverse a\npred P = 2\n");
    assert_eq!(code(&agl(&["eval", "P ->", "--structure", path(&m)])), 2);
    assert_eq!(code(&agl(&["eval", "Q", "--structure", path(&m)])), 2);
    assert_eq!(code(&agl(&["eval", "P", "--structure", "/nonexistent/m.st"])), 2);
    assert_eq!(code(&agl(&["frobnicate"])), 2);
    let bad = s.file("bad.st", "backend rat\nuniverse a\npred P = 2\npred P = 3\n");
    assert_eq!(code(&agl(&["eval", "P", "--structure", path(&bad)])), 2);
}

#[test]
fn branch_budget_exits_three() {
    let s = Sandbox::new();
    let t = s.file("t.th", "P -> Q\n");
    let o = agl(&["solve", "--theory", path(&t), "--budget", "2"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("resource"));
}

#[test]
fn similarity_and_ultrametric() {
    let s = Sandbox::new();
    let good = s.file(
        "good.st",
        "backend rat\nuniverse a b\npred e a a = inf\npred e a b = 2\npred e b a = 2\npred e b b = inf\nequality e\n",
    );
    assert_eq!(code(&agl(&["similarity", "--structure", path(&good)])), 0);
    assert_eq!(code(&agl(&["ultrametric", "--structure", path(&good)])), 0);
    let collapsed = s.file(
        "collapsed.st",
        "backend rat\nuniverse a b\npred e a a = inf\npred e a b = inf\npred e b a = inf\npred e b b = inf\nequality e\n",
    );
    let o = agl(&["ultrametric", "--structure", path(&collapsed)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("indiscernible d(a, b)"));
    assert!(stdout(&o).contains("pseudo-ultrametric true"));
    let asym = s.file(
        "asym.st",
        "backend rat\nuniverse a b\npred e a a = inf\npred e a b = 2\npred e b a = 3\npred e b b = inf\nequality e\n",
    );
    assert_eq!(code(&agl(&["similarity", "--structure", path(&asym)])), 1);
}

#[test]
fn translation_commands() {
    let s = Sandbox::new();
    let m = s.file("m.st", "backend rat\nuniverse a b\npred P a = 2\npred P b = inf\n");
    let o = agl(&["translate", "forall x. P(x)", "--check", path(&m)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("(and (forall-obj x"));
    let o = agl(&["check-translation", "exists x. delta(P(x))", "--structure", path(&m)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("agree: source true, classical true"));
    let o = agl(&["translate", "P -> Q"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("(rel P g1)"));
}

#[test]
fn model_theory_commands() {
    let s = Sandbox::new();
    let two = s.file("two.st", "backend rat\nuniverse a\npred P = 2\n");
    let inf = s.file("inf.st", "backend rat\nuniverse a\npred P = inf\n");
    let four = s.file("four.st", "backend rat\nuniverse b\npred P = 4\n");
    let o = agl(&["equiv", "--left", path(&two), "--right", path(&inf), "--depth", "1"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("separated by: "));
    assert_eq!(code(&agl(&["equiv", "--left", path(&two), "--right", path(&four), "--depth", "2"])), 0);
    let o = agl(&["embed", "--from", path(&two), "--to", path(&four), "--depth", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&agl(&["embed", "--from", path(&two), "--to", path(&inf)])), 1);
    let o = agl(&["ediag", "--structure", path(&inf), "--depth", "0"]);
    assert!(stdout(&o).lines().any(|l| l == "P"));
    let o = agl(&["ediag", "--structure", path(&two), "--depth", "1"]);
    assert!(stdout(&o).lines().any(|l| l == "one -> P"), "{}", stdout(&o));
    assert_eq!(code(&agl(&["exhaustive", "--structure", path(&four), "--group", "4"])), 0);
    assert_eq!(code(&agl(&["exhaustive", "--structure", path(&four), "--group", "2"])), 1);
}

#[test]
fn pool_entailment() {
    let s = Sandbox::new();
    let t = s.file("t.th", "P ==> Q\n");
    let m = s.file("m.st", "backend rat\nuniverse a\npred P = 2\npred Q = 3\n");
    let n = s.file("n.st", "backend rat\nuniverse a\npred P = 3\npred Q = 2\n");
    let o = agl(&["entails", "P -> Q", "--theory", path(&t), "--pool", path(&m), path(&n)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = agl(&["entails", "Q -> P", "--theory", path(&t), "--pool", path(&m), path(&n)]);
    assert_eq!(code(&o), 1);
}

#[test]
fn remark_lab_and_version() {
    let o = agl(&["remark-lab", "--n", "5"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("lexicographic model valid true (7 axioms checked)"));
    let v = agl(&["--version"]);
    assert!(stdout(&v).contains("(format 1)"));
}
