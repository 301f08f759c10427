use std::path::PathBuf;
use std::process::{Command, Output};

fn mrsc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mrsc")).args(args).output().expect("runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

#[test]
fn stats_csv_rows() {
    let o = mrsc(&["stats", "double_append", "exp_growth", "eqbool_sym", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(
        rows[0],
        ["example", "first", "last", "min", "max", "min_skip_unfold", "max_skip_unfold", "count", "build_ms", "query_ms"]
    );
    assert_eq!(rows[1][..8], ["double_append", "12", "10", "10", "19", "9", "19", "3"]);
    assert_eq!(rows[2][..5], ["exp_growth", "15", "37", "15", "57"]);
    assert_eq!(rows[3][..5], ["eqbool_sym", "16", "17", "16", "30"]);
}

#[test]
fn stats_csv_is_stable_apart_from_timings() {
    let strip = |o: Output| -> Vec<String> {
        stdout(&o)
            .lines()
            .map(|l| l.rsplitn(3, ',').nth(2).unwrap().to_string())
            .collect()
    };
    let a = strip(mrsc(&["stats", "exp_growth", "eqbool_sym", "--format", "csv"]));
    let b = strip(mrsc(&["stats", "exp_growth", "eqbool_sym", "--format", "csv"]));
    assert_eq!(a, b);
}

#[test]
fn stats_sizes_are_ordered() {
    let o = mrsc(&["stats", "double_append", "exp_growth", "eqbool_sym", "--format", "csv"]);
    for line in stdout(&o).lines().skip(1) {
        let n: Vec<usize> = line.split(',').skip(1).take(4).map(|c| c.parse().unwrap()).collect();
        let (first, last, min, max) = (n[0], n[1], n[2], n[3]);
        assert!(min <= first && first <= max && min <= last && last <= max, "{line}");
    }
}

#[test]
fn residualize_prints_a_program() {
    let o = mrsc(&["residualize", "eqbool_sym", "last"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("expression: main_case0(x, y)"), "{text}");
    assert_eq!(text.matches("= True();").count(), 2, "{text}");
}

#[test]
fn check_passes_on_corpus_and_fails_on_broken_residual() {
    let o = mrsc(&["check", "double_append", "--trials", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("pass:").count(), 4);

    let o = mrsc(&["check", "double_append", "--residual", &fixture("broken_append.sc")]);
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    assert!(text.contains("FAIL") && text.contains("original: Cons("), "{text}");
}

#[test]
fn zero_trials_warn() {
    let o = mrsc(&["check", "eqbool_sym", "--selector", "last", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("warning: 0 trials"));
}

#[test]
fn enumerate_respects_limit() {
    let o = mrsc(&["enumerate", "double_append", "--limit", "10"]);
    let text = stdout(&o);
    assert_eq!(text.matches("== graph").count(), 3, "{text}");

    let o = mrsc(&["enumerate", "double_append", "--limit", "0"]);
    assert_eq!(stdout(&o).lines().count(), 2);

    let o = mrsc(&["enumerate", "eqbool_sym", "--limit", "5"]);
    let text = stdout(&o);
    assert!(text.contains("1233 configuration graphs") && !text.contains("== graph"), "{text}");

    let o = mrsc(&["enumerate", "eqbool_sym", "--limit", "5", "--force", "--format", "csv"]);
    assert_eq!(stdout(&o).lines().count(), 6);
}

#[test]
fn eval_with_bindings() {
    let o = mrsc(&["eval", "double_append", "--bind", "xs=Cons(A, Nil)", "--bind", "ys=Nil", "--bind", "zs=Cons(B, Nil)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("Cons(A, Cons(B, Nil))\n"));
}

#[test]
fn exit_codes() {
    assert_eq!(mrsc(&["stats", "no/such/file.sc"]).status.code(), Some(1));
    assert_eq!(mrsc(&["eval", &fixture("no_expression.sc")]).status.code(), Some(1));
    assert_eq!(mrsc(&["stats", "kmp", "--max-depth", "3"]).status.code(), Some(3));
    assert_eq!(mrsc(&["stats", "kmp", "--max-steps", "100"]).status.code(), Some(3));
    assert_eq!(mrsc(&["eval", "kmp", "--bind", "s=Nil", "--fuel", "2"]).status.code(), Some(3));
    assert_eq!(mrsc(&["eval", "double_append"]).status.code(), Some(1));
    assert_eq!(mrsc(&["residualize", "double_append", "middle"]).status.code(), Some(1));
    assert_eq!(mrsc(&["--help"]).status.code(), Some(0));
}
