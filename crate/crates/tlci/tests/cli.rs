use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use tlci::difftest::NAIVE_WORD;
use tlci::parser::{parse_automata, parse_formula, parse_formula_with};
use tlci::semantics::eval_all;
use tlci::word::{generate_word, GenConfig};

fn tlci(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tlci")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, text: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn eval_exit_codes() {
    let w = scratch("naive.tw", NAIVE_WORD);
    let yes = tlci(&["eval", "A{C3}[(2,3)](P, true)", "--word", &w]);
    assert_eq!(yes.status.code(), Some(0), "{}", stdout(&yes));
    assert!(stdout(&yes).starts_with("true"));
    let no = tlci(&["eval", "C{3}[(2,3)] P", "--word", &w]);
    assert_eq!(no.status.code(), Some(1));
    assert!(stdout(&no).starts_with("false"));
}

#[test]
fn usage_errors_exit_two() {
    let w = scratch("usage.tw", NAIVE_WORD);
    assert_eq!(tlci(&["eval", "F[(0,", "--word", &w]).status.code(), Some(2));
    assert_eq!(tlci(&["eval", "P", "--word", "/nonexistent/word"]).status.code(), Some(2));
    assert_eq!(tlci(&["rewrite", "--pass", "mod-k", "--k", "2", "--interval", "[0,2)"]).status.code(), Some(2));
    assert_eq!(tlci(&["rewrite", "--pass", "no-such-pass"]).status.code(), Some(2));
    assert_eq!(tlci(&["bounds", "--lemma", "L9"]).status.code(), Some(2));
}

#[test]
fn emitted_formula_round_trips() {
    let cases: &[&[&str]] = &[
        &["--pass", "mod-k", "--k", "2", "--interval", "(1,2)"],
        &["--pass", "rational", "--k", "3", "--interval", "(0,1)"],
        &["--pass", "pnueli2", "--a", "1"],
        &["--pass", "elim-unbounded", "--k", "2", "--interval", "(1,inf)"],
    ];
    let cfg = GenConfig::new(&["P", "Q"], 10, 4, 6);
    for (n, extra) in cases.iter().enumerate() {
        let side = scratch(&format!("emitted{n}.aut"), "");
        let mut args = vec!["rewrite", "--emit", "formula", "--automata-out", &side];
        args.extend_from_slice(extra);
        let o = tlci(&args);
        assert_eq!(o.status.code(), Some(0), "{extra:?}");
        let text = stdout(&o);
        let table = parse_automata(&fs::read_to_string(&side).unwrap()).unwrap();
        let f = parse_formula_with(text.trim(), &table).unwrap_or_else(|e| panic!("{extra:?}: {e}"));
        assert_eq!(f.to_string(), text.trim());
        let path = scratch(&format!("emitted{n}.tl"), &text);
        let again = tlci(&["render", "--formula-file", &path, "--automata", &side]);
        assert_eq!(stdout(&again).lines().next().unwrap(), text.trim());
        for seed in 0..5 {
            let w = generate_word(&cfg, seed);
            assert_eq!(eval_all(&w, &f).len(), w.len());
        }
    }
}

#[test]
fn report_lists_side_conditions() {
    let o = tlci(&["rewrite", "--pass", "elim-C", "--k", "2", "--a", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(parse_formula(text.lines().next().unwrap()).is_ok());
    assert!(text.contains("C1"), "{text}");
    assert!(text.contains("C2"), "{text}");
}

#[test]
fn difftest_is_byte_identical() {
    let args = ["difftest", "--pass", "mod-k", "--k", "3", "--interval", "[1,3)", "--trials", "80", "--seed", "4"];
    let a = tlci(&args);
    let mut serial = args.to_vec();
    serial.push("--serial");
    let b = tlci(&serial);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(stdout(&a), stdout(&b));
    let mutated = tlci(&["difftest", "--pass", "mod-k", "--k", "2", "--interval", "(1,2)", "--trials", "300", "--mutate"]);
    assert_eq!(mutated.status.code(), Some(1));
}

#[test]
fn repro_prints_three_lines() {
    let o = tlci(&["repro"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 3, "{text}");
    assert_eq!(tlci(&["repro", "--mutate"]).status.code(), Some(1));
}

#[test]
fn bounds_writes_report() {
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli").join("bounds.txt");
    fs::create_dir_all(out.parent().unwrap()).unwrap();
    let o = tlci(&["bounds", "--lemma", "L1", "--a", "2", "--trials", "300", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let saved = fs::read_to_string(&out).unwrap();
    assert!(saved.contains("PASS"), "{saved}");
}
