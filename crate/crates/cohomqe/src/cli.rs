//! Command-line frontend: argument parsing, dispatch and deterministic
//! report serialization for the `cohomqe` binary.
//!
//! Subcommands: `join`, `qe`, `decide`, `qpoly`, `count`, `class`, `bounds`,
//! `compare`, `verify`. Exit codes: 0 success, 1 for a false sentence or a
//! failed verification, 2 for usage errors, 3 for computation errors; errors
//! are reported as JSON objects on stderr. Output is byte-deterministic:
//! JSON objects have sorted keys and big integers are decimal strings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::bounds::{self, BoundMethod};
use crate::compare;
use crate::formula::{format_formula, parse_formula, ProperFormula};
use crate::join::{build_join_formula, join_params, join_size_stats};
use crate::motivic::{
    self, class_from_counts, count_points, pieces_class, BettiBudget, DEFAULT_COUNT_BUDGET,
    DEFAULT_PIECE_CAP,
};
use crate::operators::{build_f_omega, decide_sentence, OperatorSpec, QuantifierWord};
use crate::polyring::IntPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputMode {
    Text,
    Json,
    Csv,
}

/// Options shared across subcommands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub output: OutputMode,
    pub piece_cap: usize,
    pub count_budget: u64,
    pub threads: usize,
    pub trace: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            output: OutputMode::Text,
            piece_cap: DEFAULT_PIECE_CAP,
            count_budget: DEFAULT_COUNT_BUDGET,
            threads: 1,
            trace: false,
        }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Computation { kind: &'static str, message: String },
}

impl CliError {
    fn computation(kind: &'static str, e: impl std::fmt::Display) -> Self {
        CliError::Computation {
            kind,
            message: e.to_string(),
        }
    }
}

type CliResult = Result<i32, CliError>;

/// Routes a full argument vector (program name first) to the requested
/// operation and returns the process exit code.
pub fn dispatch(argv: &[String]) -> i32 {
    match run(argv) {
        Ok(code) => code,
        Err(CliError::Usage(message)) => {
            eprintln!(
                "{}",
                json!({"error": {"kind": "usage", "message": message}})
            );
            2
        }
        Err(CliError::Computation { kind, message }) => {
            eprintln!("{}", json!({"error": {"kind": kind, "message": message}}));
            3
        }
    }
}

struct Args {
    positional: Vec<String>,
    flags: BTreeMap<String, Vec<String>>,
    bare: Vec<String>,
}

const VALUE_FLAGS: &[&str] = &[
    "formula",
    "out",
    "stats",
    "omega",
    "q-join",
    "prime",
    "from-counts",
    "kind",
    "method",
    "args",
    "sweep",
    "n-max",
    "n",
    "r",
    "ambient-n",
    "p",
    "piece-cap",
    "budget",
    "threads",
];
const BARE_FLAGS: &[&str] = &["json", "csv", "trace", "sentence", "compute-q", "poincare"];

fn parse_args(raw: &[String]) -> Result<Args, CliError> {
    let mut positional = Vec::new();
    let mut flags: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut bare = Vec::new();
    let mut i = 0;
    while i < raw.len() {
        let arg = &raw[i];
        if let Some(name) = arg.strip_prefix("--") {
            if !VALUE_FLAGS.contains(&name) && !BARE_FLAGS.contains(&name) {
                return Err(CliError::Usage(format!("unknown flag --{name}")));
            }
            let takes_value = !BARE_FLAGS.contains(&name);
            if takes_value {
                let value = raw
                    .get(i + 1)
                    .ok_or_else(|| CliError::Usage(format!("flag --{name} expects a value")))?;
                flags
                    .entry(name.to_string())
                    .or_default()
                    .push(value.clone());
                i += 2;
            } else {
                bare.push(name.to_string());
                i += 1;
            }
        } else {
            positional.push(arg.clone());
            i += 1;
        }
    }
    Ok(Args {
        positional,
        flags,
        bare,
    })
}

impl Args {
    fn flag(&self, name: &str) -> Option<&str> {
        self.flags
            .get(name)
            .and_then(|v| v.last())
            .map(|s| s.as_str())
    }

    fn has(&self, name: &str) -> bool {
        self.bare.iter().any(|b| b == name)
    }

    fn require(&self, name: &str) -> Result<&str, CliError> {
        self.flag(name)
            .ok_or_else(|| CliError::Usage(format!("missing required flag --{name}")))
    }

    fn parse_usize(&self, name: &str) -> Result<Option<usize>, CliError> {
        match self.flag(name) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| {
                CliError::Usage(format!("flag --{name} expects an integer, got {v:?}"))
            }),
        }
    }
}

fn run(argv: &[String]) -> CliResult {
    let rest = &argv[1..];
    let Some(sub) = rest.first() else {
        return Err(CliError::Usage(
            "expected a subcommand: join qe decide qpoly count class bounds compare verify".into(),
        ));
    };
    let args = parse_args(&rest[1..])?;
    let mut config = RunConfig::default();
    if args.has("json") {
        config.output = OutputMode::Json;
    }
    if args.has("csv") {
        config.output = OutputMode::Csv;
    }
    config.trace = args.has("trace");
    if let Some(cap) = args.parse_usize("piece-cap")? {
        config.piece_cap = cap;
    }
    if let Some(budget) = args.parse_usize("budget")? {
        config.count_budget = budget as u64;
    }
    if let Some(threads) = args.parse_usize("threads")? {
        config.threads = threads.max(1);
    }
    if let Ok(env_threads) = std::env::var("COHOMQE_THREADS") {
        if let Ok(t) = env_threads.parse::<usize>() {
            config.threads = t.max(1);
        }
    }
    match sub.as_str() {
        "join" => cmd_join(&args, &config),
        "qe" => cmd_qe(&args, &config),
        "decide" => cmd_decide(&args, &config),
        "qpoly" => cmd_qpoly(&args, &config),
        "count" => cmd_count(&args, &config),
        "class" => cmd_class(&args, &config),
        "bounds" => cmd_bounds(&args, &config),
        "compare" => cmd_compare(&args, &config),
        "verify" => cmd_verify(&args, &config),
        other => Err(CliError::Usage(format!("unknown subcommand {other:?}"))),
    }
}

fn load_formula(args: &Args) -> Result<ProperFormula, CliError> {
    let path = args.require("formula")?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::computation("io", format!("cannot read {path}: {e}")))?;
    parse_formula(&text).map_err(|e| CliError::computation("formula", e))
}

fn load_quantifier_free(args: &Args) -> Result<ProperFormula, CliError> {
    let formula = load_formula(args)?;
    if !formula.is_quantifier_free() {
        return Err(CliError::computation(
            "motivic",
            "the formula has a quantifier prefix; this operation works on \
             quantifier-free realizations (use qe or decide for quantified formulas)",
        ));
    }
    Ok(formula)
}

fn write_out(path: Option<&str>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| CliError::computation("io", format!("cannot write {p}: {e}"))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Serializes a report deterministically (sorted keys, decimal strings).
pub fn emit_report(value: &Value, mode: OutputMode) -> String {
    match mode {
        OutputMode::Json | OutputMode::Csv => format!("{value}\n"),
        OutputMode::Text => {
            let mut out = String::new();
            render_text(value, 0, &mut out);
            out
        }
    }
}

fn render_text(value: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                match v {
                    Value::Object(_) | Value::Array(_) => {
                        let _ = writeln!(out, "{pad}{k}:");
                        render_text(v, indent + 1, out);
                    }
                    _ => {
                        let _ = writeln!(out, "{pad}{k}: {}", scalar_text(v));
                    }
                }
            }
        }
        Value::Array(items) => {
            if items
                .iter()
                .all(|v| !matches!(v, Value::Object(_) | Value::Array(_)))
            {
                let joined: Vec<String> = items.iter().map(scalar_text).collect();
                let _ = writeln!(out, "{pad}[{}]", joined.join(", "));
            } else {
                for v in items {
                    render_text(v, indent, out);
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar_text(other));
        }
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn params_for(psi: &ProperFormula) -> Result<crate::join::JoinParams, CliError> {
    if psi.bound_count() == 0 {
        return Err(CliError::Usage(
            "the formula has no bound blocks to join".into(),
        ));
    }
    Ok(join_params(psi.free_dims(), psi.bound_dims()))
}

fn cmd_join(args: &Args, config: &RunConfig) -> CliResult {
    let parsed = load_formula(args)?;
    if args.has("sentence") && parsed.free_count() != 0 {
        return Err(CliError::Usage(
            "--sentence requires a formula without free blocks".into(),
        ));
    }
    let psi = parsed.strip_prefix();
    let params = params_for(&psi)?;
    let joined = build_join_formula(&psi, &params).map_err(|e| CliError::computation("join", e))?;
    let stats = join_size_stats(&psi, &params).map_err(|e| CliError::computation("join", e))?;
    write_out(args.flag("out"), &format_formula(&joined))?;
    if let Some(stats_path) = args.flag("stats") {
        let report = json!({
            "params": params.to_json(),
            "stats": stats.to_json(),
        });
        write_out(Some(stats_path), &format!("{report}\n"))?;
    } else if config.trace {
        println!(
            "{}",
            emit_report(&json!({"stats": stats.to_json()}), config.output)
        );
    }
    Ok(0)
}

struct QePipeline {
    params: crate::join::JoinParams,
    word: QuantifierWord,
    spec: OperatorSpec,
    q_join: IntPoly,
}

fn qe_pipeline(args: &Args, config: &RunConfig) -> Result<QePipeline, CliError> {
    let parsed = load_formula(args)?;
    let word = match args.flag("omega") {
        Some(w) => QuantifierWord::parse(w)
            .ok_or_else(|| CliError::Usage(format!("--omega must be over E/A, got {w:?}")))?,
        None => match parsed.prefix() {
            Some(prefix) => QuantifierWord(prefix.to_vec()),
            None => {
                return Err(CliError::Usage(
                    "need --omega WORD or a (prefix ...) in the formula file".into(),
                ))
            }
        },
    };
    let psi = parsed.strip_prefix();
    let params = params_for(&psi)?;
    let q_join = if args.has("compute-q") {
        let joined =
            build_join_formula(&psi, &params).map_err(|e| CliError::computation("join", e))?;
        let pieces = motivic::formula_to_pieces(&joined, config.piece_cap)
            .map_err(|e| CliError::computation("motivic", e))?;
        motivic::pseudo_poincare_via_betti(&pieces, &BettiBudget::default())
            .map_err(|e| CliError::computation("motivic", e))?
    } else if let Some(path) = args.flag("q-join") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::computation("io", format!("cannot read {path}: {e}")))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::computation("io", format!("invalid polynomial JSON: {e}")))?
    } else {
        return Err(CliError::Usage(
            "need either --compute-q or --q-join FILE".into(),
        ));
    };
    let spec = build_f_omega(&params, &word).map_err(|e| CliError::computation("operators", e))?;
    Ok(QePipeline {
        params,
        word,
        spec,
        q_join,
    })
}

fn cmd_qe(args: &Args, config: &RunConfig) -> CliResult {
    let pipeline = qe_pipeline(args, config)?;
    let mut stages: Vec<Value> = Vec::new();
    let result = pipeline
        .spec
        .apply_traced(&pipeline.q_join, &mut |idx, poly| {
            stages.push(json!({
                "stage": idx,
                "operator": pipeline.spec.stages()[idx].to_string(),
                "value": serde_json::to_value(poly).unwrap(),
            }));
        })
        .map_err(|e| CliError::computation("operators", e))?;
    let mut report = json!({
        "omega": pipeline.word.to_string(),
        "operator": pipeline.spec.to_string(),
        "q_join": serde_json::to_value(&pipeline.q_join).unwrap(),
        "q": serde_json::to_value(&result).unwrap(),
        "params": pipeline.params.to_json(),
    });
    if config.trace {
        report["stages"] = Value::Array(stages);
    }
    match config.output {
        OutputMode::Json | OutputMode::Csv => print!("{}", emit_report(&report, OutputMode::Json)),
        OutputMode::Text => println!("{}", result.display_expr()),
    }
    Ok(0)
}

fn cmd_decide(args: &Args, config: &RunConfig) -> CliResult {
    let pipeline = qe_pipeline(args, config)?;
    if pipeline.params.free_count() != 0 {
        return Err(CliError::Usage(
            "decide requires a sentence (no free blocks)".into(),
        ));
    }
    let truth = decide_sentence(&pipeline.q_join, &pipeline.params, &pipeline.word)
        .map_err(|e| CliError::computation("operators", e))?;
    println!("{}", if truth { "true" } else { "false" });
    Ok(if truth { 0 } else { 1 })
}

fn cmd_qpoly(args: &Args, config: &RunConfig) -> CliResult {
    let formula = load_quantifier_free(args)?;
    let pieces = motivic::formula_to_pieces(&formula, config.piece_cap)
        .map_err(|e| CliError::computation("motivic", e))?;
    let class = pieces_class(&pieces).map_err(|e| CliError::computation("motivic", e))?;
    let poly = if args.has("poincare") {
        motivic::class_to_p(&class).map_err(|e| CliError::computation("motivic", e))?
    } else {
        motivic::class_to_q(&class).map_err(|e| CliError::computation("motivic", e))?
    };
    let report = json!({"poly": serde_json::to_value(&poly).unwrap()});
    print!("{}", emit_report(&report, OutputMode::Json));
    Ok(0)
}

fn cmd_count(args: &Args, config: &RunConfig) -> CliResult {
    let formula = load_quantifier_free(args)?;
    let prime: u64 = args
        .require("prime")?
        .parse()
        .map_err(|_| CliError::Usage("--prime expects an integer".into()))?;
    let count = count_points(&formula, prime, config.count_budget, config.threads)
        .map_err(|e| CliError::computation("motivic", e))?;
    match config.output {
        OutputMode::Json | OutputMode::Csv => {
            print!(
                "{}",
                emit_report(
                    &json!({"count": count.to_string(), "prime": prime}),
                    OutputMode::Json
                )
            );
        }
        OutputMode::Text => println!("{count}"),
    }
    Ok(0)
}

fn cmd_class(args: &Args, config: &RunConfig) -> CliResult {
    let formula = load_quantifier_free(args)?;
    let class = match args.flag("from-counts") {
        Some(list) => {
            let primes: Vec<u64> = list
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| CliError::Usage(format!("invalid prime {s:?}")))
                })
                .collect::<Result<_, _>>()?;
            class_from_counts(&formula, &primes, config.count_budget, config.threads)
                .map_err(|e| CliError::computation("motivic", e))?
        }
        None => {
            let pieces = motivic::formula_to_pieces(&formula, config.piece_cap)
                .map_err(|e| CliError::computation("motivic", e))?;
            pieces_class(&pieces).map_err(|e| CliError::computation("motivic", e))?
        }
    };
    let report = json!({"class": serde_json::to_value(&class.poly_in_l).unwrap()});
    print!("{}", emit_report(&report, OutputMode::Json));
    Ok(0)
}

fn bound_args(args: &Args, expect: usize) -> Result<Vec<usize>, CliError> {
    let raw = args.require("args")?;
    let values: Vec<usize> = raw
        .split([',', ' '])
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| CliError::Usage(format!("invalid bound argument {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    if values.len() != expect {
        return Err(CliError::Usage(format!(
            "--args expects {expect} integers, got {}",
            values.len()
        )));
    }
    Ok(values)
}

fn cmd_bounds(args: &Args, config: &RunConfig) -> CliResult {
    let kind = args.require("kind")?.to_string();
    let method = BoundMethod::parse(args.require("method")?)
        .ok_or_else(|| CliError::Usage("--method must be bombieri, as or char0".into()))?;

    if let Some(sweep) = args.flag("sweep") {
        return cmd_bounds_sweep(args, &kind, method, sweep);
    }

    let report = match kind.as_str() {
        "euler" => {
            let v = bound_args(args, 3)?;
            bounds::euler_bound_result(v[0], v[1], v[2], method)
                .map_err(|e| CliError::computation("bounds", e))?
                .to_json()
        }
        "A" | "a" => {
            let v = bound_args(args, 3)?;
            let value = bounds::katz_a(v[0], v[1], v[2], method)
                .map_err(|e| CliError::computation("bounds", e))?;
            json!({"value": value.to_string(), "method": method.to_string()})
        }
        "B" | "b" => {
            let v = bound_args(args, 3)?;
            bounds::katz_b_result(v[0], v[1], v[2], method)
                .map_err(|e| CliError::computation("bounds", e))?
                .to_json()
        }
        "affine" => {
            let v = bound_args(args, 3)?;
            let value = bounds::affine_betti_bound(v[0], v[1], v[2], method)
                .map_err(|e| CliError::computation("bounds", e))?;
            json!({"value": value.to_string(), "method": method.to_string()})
        }
        "projective" => {
            let v = bound_args(args, 3)?;
            let value = bounds::projective_betti_bound(v[0], v[1], v[2], method)
                .map_err(|e| CliError::computation("bounds", e))?;
            json!({"value": value.to_string(), "method": method.to_string()})
        }
        "biproj" => {
            let v = bound_args(args, 5)?;
            let value = bounds::biprojective_bound(v[0], v[1], v[2], v[3], v[4], method)
                .map_err(|e| CliError::computation("bounds", e))?;
            json!({"value": value.to_string(), "method": method.to_string()})
        }
        "image" => {
            let v = bound_args(args, 6)?;
            let (exact, ceiling) =
                bounds::image_betti_bound(v[0], v[1], v[2], v[3], v[4], v[5], method)
                    .map_err(|e| CliError::computation("bounds", e))?;
            json!({
                "exact": exact.to_string(),
                "ceiling": ceiling.to_string(),
                "method": method.to_string(),
            })
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown bound kind {other:?}; expected euler, A, B, affine, projective, biproj or image"
            )))
        }
    };
    print!("{}", emit_report(&report, config.output));
    Ok(0)
}

fn cmd_bounds_sweep(args: &Args, kind: &str, method: BoundMethod, sweep: &str) -> CliResult {
    // --sweep N=1..10 sweeps the first argument; the rest come from --args
    let (var, range) = sweep
        .split_once('=')
        .ok_or_else(|| CliError::Usage("--sweep expects VAR=LO..HI".into()))?;
    if var != "N" {
        return Err(CliError::Usage("only N sweeps are supported".into()));
    }
    let (lo, hi) = range
        .split_once("..")
        .ok_or_else(|| CliError::Usage("--sweep expects VAR=LO..HI".into()))?;
    let lo: usize = lo
        .parse()
        .map_err(|_| CliError::Usage("invalid sweep lower bound".into()))?;
    let hi: usize = hi
        .parse()
        .map_err(|_| CliError::Usage("invalid sweep upper bound".into()))?;
    let tail = bound_args(args, 2)?;
    let (r, d) = (tail[0], tail[1]);
    let mut out = String::from("N,r,d,method,value\n");
    for n in lo..=hi {
        let value = match kind {
            "euler" => bounds::euler_bound(n, r, d, method),
            "A" | "a" => bounds::katz_a(n, r, d, method),
            "B" | "b" => bounds::katz_b(n, r, d, method),
            "affine" => bounds::affine_betti_bound(n, r, d, method),
            "projective" => bounds::projective_betti_bound(n, r, d, method),
            other => {
                return Err(CliError::Usage(format!(
                    "sweep supports euler, A, B, affine and projective, not {other:?}"
                )))
            }
        }
        .map_err(|e| CliError::computation("bounds", e))?;
        let _ = writeln!(out, "{n},{r},{d},{method},{value}");
    }
    print!("{out}");
    Ok(0)
}

fn cmd_compare(args: &Args, config: &RunConfig) -> CliResult {
    let Some(mode) = args.positional.first() else {
        return Err(CliError::Usage("compare expects: gap | defect".into()));
    };
    match mode.as_str() {
        "gap" => {
            let n_max = args
                .parse_usize("n-max")?
                .ok_or_else(|| CliError::Usage("missing required flag --n-max".into()))?;
            if config.output == OutputMode::Csv {
                let mut out = String::from("n,hypercover,join,ratio\n");
                for n in 1..=n_max {
                    let r = compare::gap_report(n);
                    let _ = writeln!(
                        out,
                        "{},{},{},{}",
                        r.n, r.hypercover_value, r.join_value, r.ratio
                    );
                }
                print!("{out}");
            } else {
                let rows: Vec<Value> = (1..=n_max)
                    .map(|n| compare::gap_report(n).to_json())
                    .collect();
                print!("{}", emit_report(&json!({"gap": rows}), config.output));
            }
            Ok(0)
        }
        "defect" => {
            let n = args
                .parse_usize("n")?
                .ok_or_else(|| CliError::Usage("missing required flag --n".into()))?;
            let r = args
                .parse_usize("r")?
                .ok_or_else(|| CliError::Usage("missing required flag --r".into()))?;
            let ambient = args.parse_usize("ambient-n")?.unwrap_or(n);
            let report = compare::join_defect_betti(ambient, n, r)
                .map_err(|e| CliError::computation("compare", e))?;
            print!("{}", emit_report(&report.to_json(), config.output));
            Ok(0)
        }
        other => Err(CliError::Usage(format!(
            "unknown compare mode {other:?}; expected gap or defect"
        ))),
    }
}

fn cmd_verify(args: &Args, config: &RunConfig) -> CliResult {
    let Some(mode) = args.positional.first() else {
        return Err(CliError::Usage(
            "verify expects: poincare | connectivity".into(),
        ));
    };
    let formula = load_quantifier_free(args)?;
    let p = args
        .parse_usize("p")?
        .ok_or_else(|| CliError::Usage("missing required flag --p".into()))?;
    let budget = BettiBudget::default();
    let report = match mode.as_str() {
        "poincare" => compare::verify_poincare_congruence(&formula, p, config.piece_cap, &budget)
            .map_err(|e| CliError::computation("compare", e))?,
        "connectivity" => compare::verify_join_connectivity(&formula, p, config.piece_cap, &budget)
            .map_err(|e| CliError::computation("compare", e))?,
        other => {
            return Err(CliError::Usage(format!(
                "unknown verify mode {other:?}; expected poincare or connectivity"
            )))
        }
    };
    let holds = report.holds;
    print!("{}", emit_report(&report.to_json(), config.output));
    Ok(if holds { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(parts: &[&str]) -> Vec<String> {
        std::iter::once("cohomqe")
            .chain(parts.iter().copied())
            .map(String::from)
            .collect()
    }

    #[test]
    fn unknown_flag_and_subcommand_are_usage_errors() {
        assert_eq!(dispatch(&argv(&["nonsense"])), 2);
        assert_eq!(dispatch(&argv(&[])), 2);
        assert_eq!(dispatch(&argv(&["bounds", "--kind"])), 2);
    }

    #[test]
    fn emit_report_is_deterministic() {
        let v = json!({"b": "2", "a": ["1", "2"]});
        let once = emit_report(&v, OutputMode::Json);
        let twice = emit_report(&v, OutputMode::Json);
        assert_eq!(once, twice);
        // keys are sorted by the underlying map
        assert!(once.find("\"a\"").unwrap() < once.find("\"b\"").unwrap());
    }

    #[test]
    fn poly_report_shape() {
        let poly = IntPoly::from_i64(&[1, 2]);
        let report = json!({"poly": serde_json::to_value(&poly).unwrap()});
        assert_eq!(report.to_string(), r#"{"poly":["1","2"]}"#);
    }

    #[test]
    fn bound_args_parsing() {
        let args = parse_args(&["--args".into(), "1,2,3".into()]).unwrap();
        assert_eq!(bound_args(&args, 3).unwrap(), vec![1, 2, 3]);
        assert!(bound_args(&args, 2).is_err());
    }
}
