//! Command-line front end. Exit codes: 0 success or `true`, 1 `false` or a
//! failed check, 2 usage, parse or validation errors.

use std::fs;
use std::io::{self, Read, Write};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::difftest::*;
use crate::error::{Error, Result};
use crate::formula::*;
use crate::interval::{rat, Interval};
use crate::parser::{parse_automata, parse_formula_with, parse_interval, render_automata, AutomataTable};
use crate::rewrite::*;
use crate::semantics::{ConditionSpec, Evaluator, Exemption};
use crate::word::{parse_timed_word, repair_conditions, TimedWord, DEFAULT_REPAIR_ROUNDS};

#[derive(Parser, Debug)]
#[command(name = "tlci", version, about = "Timed logic with counting: evaluation, rewriting and differential testing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a formula on a timed word.
    Eval(EvalArgs),
    /// Apply a rewrite pass.
    Rewrite(RewriteArgs),
    /// Compare a pass against the evaluator on random words.
    Difftest(DifftestArgs),
    /// Audit a marker-count bound on random words.
    Bounds(BoundsArgs),
    /// Check (and optionally repair) anchor conditions on a word.
    CheckConditions(CheckArgs),
    /// Re-check the golden counterexamples.
    Repro(ReproArgs),
    /// Print a formula or word in canonical form.
    Render(RenderArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct FormulaInput {
    /// Formula text.
    pub formula: Option<String>,
    /// Read the formula from a file ("-" for stdin).
    #[arg(long)]
    pub formula_file: Option<String>,
    /// Automata sidecar file for A{name} modalities.
    #[arg(long)]
    pub automata: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum Policy {
    Strict,
    FutureOnly,
    Permissive,
}

impl Policy {
    fn policy(self) -> ValidationPolicy {
        match self {
            Policy::Strict => ValidationPolicy::strict(),
            Policy::FutureOnly => ValidationPolicy::future_only(),
            Policy::Permissive => ValidationPolicy::permissive(),
        }
    }
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub input: FormulaInput,
    /// Timed word file, one "<time> <props|->" line per event ("-" for stdin).
    #[arg(long)]
    pub word: String,
    /// 1-based position.
    #[arg(long, default_value_t = 1)]
    pub pos: usize,
    /// Print the truth value at every position instead.
    #[arg(long)]
    pub all: bool,
    #[arg(long, value_enum, default_value_t = Policy::Strict)]
    pub policy: Policy,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum Emit {
    Formula,
    Report,
}

#[derive(Args, Debug)]
pub struct PassArgs {
    /// Pass identifier: mod-k, rational, pnueli2, witness, elim-F, elim-C, unilateral, elim-unbounded.
    #[arg(long)]
    pub pass: String,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub a: Option<usize>,
    /// Interval as written in formulas, e.g. "(1,2]".
    #[arg(long)]
    pub interval: Option<String>,
    /// Witness automaton for the witness pass: pq, consec<k>, single.
    #[arg(long, default_value = "pq")]
    pub witness: String,
}

#[derive(Args, Debug)]
pub struct RewriteArgs {
    #[command(flatten)]
    pub pass: PassArgs,
    #[command(flatten)]
    pub input: FormulaInput,
    /// Argument formula when the input is given by flags.
    #[arg(long, default_value = "P")]
    pub arg: String,
    /// Second argument of pnueli2.
    #[arg(long, default_value = "Q")]
    pub arg2: String,
    #[arg(long, value_enum, default_value_t = Emit::Report)]
    pub emit: Emit,
    /// Write the automata sidecar of the output here.
    #[arg(long)]
    pub automata_out: Option<String>,
    /// Maximum number of distinct output nodes.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub budget: usize,
}

#[derive(Args, Debug)]
pub struct DifftestArgs {
    #[command(flatten)]
    pub pass: PassArgs,
    /// Input formula of the unilateral pass.
    #[arg(long)]
    pub formula: Option<String>,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run the pass's documented mutation instead.
    #[arg(long)]
    pub mutate: bool,
    /// Run trials on one thread.
    #[arg(long)]
    pub serial: bool,
    /// Maximum labeled events per word.
    #[arg(long)]
    pub events: Option<usize>,
    /// Probability of each proposition per event.
    #[arg(long)]
    pub density: Option<f64>,
    /// Labeled events lie in [0, window].
    #[arg(long)]
    pub window: Option<i64>,
    /// Write the report here as well.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    /// L1, L2, L4 or L5.
    #[arg(long)]
    pub lemma: String,
    #[arg(long, default_value_t = 1)]
    pub a: usize,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value = "pq")]
    pub witness: String,
    /// Number of (word, position) samples.
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum ExemptionArg {
    First,
    Zero,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long)]
    pub word: String,
    /// C1 argument formula (with --k).
    #[arg(long)]
    pub c1: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// C2 family member (repeatable).
    #[arg(long)]
    pub c2: Vec<String>,
    /// Exemption window measured from the first event or from time 0.
    #[arg(long, value_enum, default_value_t = ExemptionArg::First)]
    pub exemption: ExemptionArg,
    /// Print the repaired word.
    #[arg(long)]
    pub repair: bool,
}

#[derive(Args, Debug)]
pub struct ReproArgs {
    /// Flip interval brackets (sensitivity check; expected to fail).
    #[arg(long)]
    pub mutate: bool,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    #[command(flatten)]
    pub input: FormulaInput,
    /// Render a timed word instead.
    #[arg(long)]
    pub word: Option<String>,
}

fn read(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| Error::Usage(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Error::Usage(format!("{path}: {e}")))
}

fn write_file(path: &str, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Usage(format!("{path}: {e}")))
}

impl FormulaInput {
    fn table(&self) -> Result<AutomataTable> {
        match &self.automata {
            Some(p) => parse_automata(&read(p)?),
            None => Ok(AutomataTable::new()),
        }
    }

    fn get(&self) -> Result<Option<F>> {
        let text = match (&self.formula, &self.formula_file) {
            (Some(_), Some(_)) => return Err(Error::Usage("give a formula or --formula-file, not both".into())),
            (Some(s), None) => s.clone(),
            (None, Some(p)) => read(p)?,
            (None, None) => return Ok(None),
        };
        Ok(Some(parse_formula_with(text.trim(), &self.table()?)?))
    }

    fn require(&self) -> Result<F> {
        self.get()?.ok_or_else(|| Error::Usage("missing formula".into()))
    }
}

fn word_file(path: &str) -> Result<TimedWord> {
    parse_timed_word(&read(path)?)
}

fn validated(f: &F, p: ValidationPolicy) -> Result<()> {
    validate_formula(f, p).map_err(|vs| {
        let lines: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
        Error::Usage(format!("formula rejected by validation:\n{}", lines.join("\n")))
    })
}

/// Output text and exit code of one invocation.
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

fn ok(stdout: String, success: bool) -> Outcome {
    Outcome { stdout, code: if success { 0 } else { 1 } }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Rewrite(a) => cmd_rewrite(a),
        Command::Difftest(a) => cmd_difftest(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::CheckConditions(a) => cmd_check(a),
        Command::Repro(a) => {
            let r = repro_counterexamples_with(a.mutate);
            Ok(ok(r.render(), r.passed()))
        }
        Command::Render(a) => cmd_render(a),
    }
}

fn cmd_eval(a: EvalArgs) -> Result<Outcome> {
    let f = a.input.require()?;
    validated(&f, a.policy.policy())?;
    let w = word_file(&a.word)?;
    let mut ev = Evaluator::new(&w);
    if a.all {
        let vals = ev.values(&f).to_vec();
        let text: String = vals.iter().enumerate().map(|(i, v)| format!("{} {v}\n", i + 1)).collect();
        return Ok(ok(text, vals.first().copied().unwrap_or(false)));
    }
    let v = ev.at(&f, a.pos)?;
    Ok(ok(format!("{v}\n"), v))
}

fn interval_flag(p: &PassArgs) -> Result<Option<Interval>> {
    p.interval.as_deref().map(parse_interval).transpose()
}

fn need<T>(x: Option<T>, what: &str, pass: PassId) -> Result<T> {
    x.ok_or_else(|| Error::Usage(format!("pass {pass} needs {what}")))
}

/// The pass output and report for a rewrite invocation.
pub fn rewrite_invocation(a: &RewriteArgs) -> Result<PassReport> {
    let pass: PassId = a.pass.pass.parse()?;
    let input = a.input.get()?;
    if let Some(f) = &input {
        validated(f, ValidationPolicy::strict())?;
    }
    let table = a.input.table()?;
    let arg = parse_formula_with(&a.arg, &table)?;
    let iv = interval_flag(&a.pass)?;
    let as_count = |f: &Option<F>| -> Result<(usize, Interval, F)> {
        match f.as_deref() {
            Some(Formula::Count(k, i, x)) => Ok((*k, i.clone(), x.clone())),
            Some(other) => Err(Error::Usage(format!("pass {pass} expects a counting formula, got {}", truncated(&Arc::new(other.clone()), 60)))),
            None => Ok((need(a.pass.k, "--k", pass)?, need(iv.clone(), "--interval", pass)?, arg.clone())),
        }
    };
    let unit_a = |i: &Interval| -> Result<usize> {
        if i.lo().is_integer() && i.len() == Some(rat(1)) && !i.lo_closed() && !i.hi_closed() {
            Ok(i.lo().to_integer() as usize)
        } else {
            Err(Error::Usage(format!("pass {pass} needs an interval (a,a+1), got {i}")))
        }
    };
    let mut conds = Vec::new();
    let mut notes = Vec::new();
    let (src, output) = match pass {
        PassId::ModK => {
            let (k, i, x) = as_count(&input)?;
            (count(k, i.clone(), x.clone()), modulo_counter_rewrite(k, &i, &x)?)
        }
        PassId::Rational => {
            let (k, i, x) = as_count(&input)?;
            if k == 2 && !i.lo_closed() && !i.hi_closed() {
                notes.push("half-split form: exact on strictly increasing timestamps".into());
            }
            (count(k, i.clone(), x.clone()), rational_rewrite(k, &i, &x)?)
        }
        PassId::ElimUnbounded => {
            let f = match input {
                Some(f) => f,
                None => count(
                    need(a.pass.k, "--k", pass)?,
                    iv.clone().unwrap_or_else(|| Interval::mk(rat(a.pass.a.unwrap_or(0) as i64), false, None, false)),
                    arg.clone(),
                ),
            };
            let out = eliminate_unbounded_counting(&f);
            (f, out)
        }
        PassId::Pnueli2 => {
            let (ai, p, q) = match input.as_deref() {
                Some(Formula::Pnueli(2, i, xs)) => (unit_a(i)?, xs[0].clone(), xs[1].clone()),
                Some(_) => return Err(Error::Usage("pnueli2 expects Pn{2}[(a,a+1)](P, Q)".into())),
                None => (need(a.pass.a, "--a", pass)?, arg.clone(), parse_formula_with(&a.arg2, &table)?),
            };
            let src = pnueli(2, Interval::open(ai as i64, ai as i64 + 1), vec![p.clone(), q.clone()]);
            (src, pnueli2_rewrite(ai, &p, &q)?)
        }
        PassId::Witness => {
            let w = WitnessChoice::parse(&a.pass.witness)?.build();
            let ai = need(a.pass.a, "--a", pass)?;
            let out = witness_rewrite(&w, ai)?;
            notes.push(format!("witness automaton {} with m={}", w.name(), w.m()));
            let mut r = PassReport::new(pass, None, format!("witness {} over ({ai},{})", w.name(), ai + 1), out);
            r.notes = notes;
            return Ok(r);
        }
        PassId::ElimF => {
            let (i, x) = match input.as_deref() {
                Some(Formula::Eventually(i, x)) => (i.clone(), x.clone()),
                Some(_) => return Err(Error::Usage("elim-F expects F[I] phi".into())),
                None => (need(iv.clone(), "--interval", pass)?, arg.clone()),
            };
            let (out, fam) = eliminate_eventually(&i, &x)?;
            conds.push(SideCondition::C2 { family: fam });
            (eventually(i, x), out)
        }
        PassId::ElimC => {
            let (k, ai, x) = match input.as_deref() {
                Some(Formula::Count(k, i, x)) => (*k, unit_a(i)?, x.clone()),
                Some(_) => return Err(Error::Usage("elim-C expects C{k}[(a,a+1)] psi".into())),
                None => (need(a.pass.k, "--k", pass)?, need(a.pass.a, "--a", pass)?, arg.clone()),
            };
            let (out, c) = eliminate_counting(k, ai, &x)?;
            conds = c;
            (count(k, Interval::open(ai as i64, ai as i64 + 1), x), out)
        }
        PassId::Unilateral => {
            let f = need(input, "a formula", pass)?;
            let r = rewrite_to_unilateral(&f)?;
            conds = r.side_conditions;
            notes = r.notes;
            (f, r.output)
        }
    };
    check_budget(&output, a.budget)?;
    let mut r = PassReport::new(pass, Some(&src), src.to_string(), output);
    r.side_conditions = conds;
    r.notes = notes;
    Ok(r)
}

fn render_report(r: &PassReport) -> String {
    let mut s = format!("{}\n# pass {}\n# input {}\n", r.output, r.pass, r.input);
    for c in &r.side_conditions {
        s.push_str(&format!("# {c}\n"));
    }
    if let Some(b) = &r.size_before {
        s.push_str(&format!("# size before dag={} tree={}\n", b.dag_nodes, b.tree_nodes));
    }
    s.push_str(&format!("# size after dag={} tree={}\n", r.size_after.dag_nodes, r.size_after.tree_nodes));
    for n in &r.notes {
        s.push_str(&format!("# note {n}\n"));
    }
    s
}

fn cmd_rewrite(a: RewriteArgs) -> Result<Outcome> {
    let r = rewrite_invocation(&a)?;
    let sidecar = render_automata(&r.output);
    let mut text = match a.emit {
        Emit::Formula => format!("{}\n", r.output),
        Emit::Report => render_report(&r),
    };
    match (&a.automata_out, sidecar.is_empty()) {
        (Some(p), _) => write_file(p, &sidecar)?,
        (None, false) if a.emit == Emit::Report => {
            text.push_str("# automata (save with --automata-out to re-parse)\n");
            for l in sidecar.lines() {
                text.push_str(&format!("# {l}\n"));
            }
        }
        _ => {}
    }
    Ok(ok(text, true))
}

fn pass_spec(p: &PassArgs, formula: Option<&str>, mutate: bool) -> Result<PassSpec> {
    let pass: PassId = p.pass.parse()?;
    let mut spec = PassSpec::new(pass).witness(WitnessChoice::parse(&p.witness)?);
    if let Some(k) = p.k {
        spec = spec.k(k);
    }
    if let Some(a) = p.a {
        spec = spec.a(a);
    }
    if let Some(i) = interval_flag(p)? {
        spec = spec.interval(i);
    }
    if let Some(f) = formula {
        spec = spec.formula(crate::parser::parse_formula(f)?);
    }
    if mutate {
        if Mutation::for_pass(pass).is_none() {
            return Err(Error::Usage(format!("pass {pass} has no documented mutation")));
        }
        spec = spec.mutated();
    }
    Ok(spec)
}

fn cmd_difftest(a: DifftestArgs) -> Result<Outcome> {
    let spec = pass_spec(&a.pass, a.formula.as_deref(), a.mutate)?;
    let case = build_case(&spec)?;
    let mut cfg = case.default_config();
    if let Some(n) = a.events {
        cfg.event_count = n;
    }
    if let Some(d) = a.density {
        cfg = cfg.with_density(d);
    }
    if let Some(w) = a.window {
        cfg.pad_to = cfg.pad_to - cfg.active_window + rat(w);
        cfg.active_window = rat(w);
    }
    cfg.validate()?;
    let r = equivalence_trial(&case, &cfg, a.trials, a.seed, !a.serial);
    let text = format!("{}{}\n", r.render(), r.summary());
    if let Some(p) = &a.out {
        write_file(p, &text)?;
    }
    eprintln!("wall_time {:.3}s", r.wall_time.as_secs_f64());
    Ok(ok(text, r.passed()))
}

fn cmd_bounds(a: BoundsArgs) -> Result<Outcome> {
    let lemma: LemmaId = a.lemma.parse()?;
    let p = BoundParams { a: a.a, k: a.k, witness: WitnessChoice::parse(&a.witness)? };
    let r = bound_trial(lemma, &p, &default_bound_config(lemma, &p), a.trials, a.seed);
    let text = r.render();
    if let Some(path) = &a.out {
        write_file(path, &text)?;
    }
    Ok(ok(text, r.passed()))
}

fn cmd_check(a: CheckArgs) -> Result<Outcome> {
    let w = word_file(&a.word)?;
    let mut spec = ConditionSpec::default();
    if let Some(c) = &a.c1 {
        spec.c1.push((crate::parser::parse_formula(c)?, a.k));
    }
    for c in &a.c2 {
        spec.c2.push(crate::parser::parse_formula(c)?);
    }
    if spec.is_empty() {
        return Err(Error::Usage("give --c1 and/or --c2".into()));
    }
    let ex = match a.exemption {
        ExemptionArg::First => Exemption::FromFirst,
        ExemptionArg::Zero => Exemption::FromZero,
    };
    let vs = spec.check_with(&w, ex);
    let mut text: String = vs.iter().map(|v| format!("{v}\n")).collect();
    if vs.is_empty() {
        text.push_str("ok\n");
    }
    if a.repair {
        let fixed = repair_conditions(&w, &spec, DEFAULT_REPAIR_ROUNDS)?;
        text.push_str("# repaired\n");
        text.push_str(&fixed.to_string());
    }
    Ok(ok(text, vs.is_empty()))
}

fn cmd_render(a: RenderArgs) -> Result<Outcome> {
    if let Some(p) = &a.word {
        return Ok(ok(word_file(p)?.to_string(), true));
    }
    let f = a.input.require()?;
    let s = size_stats(&f);
    let valid = validate_formula(&f, ValidationPolicy::strict()).is_ok();
    let text = format!(
        "{f}\n# dag={} tree={} modal_depth={} unilateral={} valid_strict={valid}\n",
        s.dag_nodes,
        s.tree_nodes,
        modal_depth(&f),
        all_unilateral(&f)
    );
    Ok(ok(text, true))
}

/// Parses arguments, runs, prints, and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(o) => {
            let _ = io::stdout().write_all(o.stdout.as_bytes());
            o.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
