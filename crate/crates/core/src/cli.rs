//! `pebblecover` command-line front end.
//!
//! Exit codes: 0 success or holds, 1 negative result (not coverable,
//! counterexample, failed check), 2 budget exceeded, 3 malformed input,
//! 4 internal failure.

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cube_strategist::{cover_strategy_with, random_good_configuration, StrategyOptions, StrategyTrace};
use crate::decider::{self, SearchBudget, Verdict};
use crate::error::Error;
use crate::graphs::{parse_graph_spec, Graph, DEFAULT_VERTEX_BUDGET};
use crate::numbers::{
    check_product_conjecture, check_simple_conjecture, check_two_pebbling, closed_form, cover_ratio,
    cube_ratio, cube_ratio_formula, gamma_bruteforce, pi_bruteforce, ConjectureReport, Invariant,
    InvariantReport, Method, Outcome, SweepOptions,
};
use crate::pebbling::{pow3, simple_bound, verify_cover_sequence, Configuration};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "pebblecover", version, about = "Exact cover pebbling toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Node ceiling for each decider call.
    #[arg(long, global = true, value_name = "K")]
    budget_nodes: Option<u64>,
    /// Worker threads for enumeration sweeps (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[arg(long, global = true, value_name = "S", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Random samples to draw (gamma: coverability spot checks; verify-cube:
    /// strategist runs, default 1000).
    #[arg(long, global = true, value_name = "M")]
    samples: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Re-verify emitted move sequences.
    #[arg(long, global = true)]
    verify: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum QuestionArg {
    Q1,
    Q4,
    TwoPebbling,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether a configuration can be turned into a cover.
    Coverable { graph: String, config: String },
    /// Build a cover strategy on a hypercube.
    Strategy { graph: String, config: String },
    /// Cover pebbling number.
    Gamma { graph: String },
    /// Pebbling number.
    Pi { graph: String },
    /// Cover ratio gamma / pi.
    Ratio { graph: String },
    /// Run the cover pebbling checks for one cube dimension.
    VerifyCube { dimension: u32 },
    /// Check a conjecture: q1 <graph>, q4 <graph> <graph>, two-pebbling <graph>.
    Check {
        #[arg(value_enum)]
        question: QuestionArg,
        #[arg(required = true, num_args = 1..=2)]
        graphs: Vec<String>,
    },
    /// Simple-configuration lower bound and the n * pi upper bound.
    Bound { graph: String },
}

struct Output {
    /// Machine-readable report.
    json: Value,
    /// Human-readable report.
    text: String,
    code: i32,
}

impl Output {
    fn new<T: Serialize>(report: &T, text: String, code: i32) -> Result<Output, Error> {
        let json = serde_json::to_value(report).map_err(|e| Error::Internal(e.to_string()))?;
        Ok(Output { json, text, code })
    }
}

/// Parses `argv` (including the program name), runs the command and
/// returns the exit code. Reports go to stdout, diagnostics to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{rendered}") } else { write!(out, "{rendered}") };
            return code;
        }
    };
    match execute(&cli) {
        Ok(o) => {
            let written = match cli.format {
                Format::Json => serde_json::to_writer_pretty(&mut *out, &o.json)
                    .map_err(std::io::Error::other)
                    .and_then(|_| writeln!(out)),
                Format::Text => write!(out, "{}", o.text),
            };
            if written.is_err() {
                return EXIT_INTERNAL;
            }
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotCoverable => EXIT_NEGATIVE,
        Error::BudgetExceeded => EXIT_BUDGET,
        Error::InvalidParameter(_)
        | Error::ResourceLimit(_)
        | Error::Disconnected
        | Error::InvalidConfiguration(_)
        | Error::IllegalMove { .. }
        | Error::UnsupportedDimension(_)
        | Error::Unsupported(_)
        | Error::Parse(_) => EXIT_INPUT,
        Error::VerificationFailure { .. } | Error::InvariantViolation(_) | Error::Internal(_) => EXIT_INTERNAL,
    }
}

fn search_budget(cli: &Cli, default: SearchBudget) -> SearchBudget {
    match cli.budget_nodes {
        Some(k) => SearchBudget { max_nodes: k, ..default },
        None => default,
    }
}

fn sweep_options(cli: &Cli) -> SweepOptions {
    let base = SweepOptions::default();
    SweepOptions { budget: search_budget(cli, base.budget), threads: cli.threads, ..base }
}

fn graph(spec: &str) -> Result<Graph, Error> {
    parse_graph_spec(spec, DEFAULT_VERTEX_BUDGET)
}

fn execute(cli: &Cli) -> Result<Output, Error> {
    match &cli.command {
        Command::Coverable { graph: gs, config } => coverable(cli, &graph(gs)?, config),
        Command::Strategy { graph: gs, config } => strategy(cli, &graph(gs)?, config),
        Command::Gamma { graph: gs } => invariant(cli, &graph(gs)?, Invariant::Gamma),
        Command::Pi { graph: gs } => invariant(cli, &graph(gs)?, Invariant::Pi),
        Command::Ratio { graph: gs } => ratio(cli, &graph(gs)?),
        Command::VerifyCube { dimension } => verify_cube(cli, *dimension),
        Command::Check { question, graphs } => check(cli, *question, graphs),
        Command::Bound { graph: gs } => bound(cli, &graph(gs)?),
    }
}

fn coverable(cli: &Cli, g: &Graph, config: &str) -> Result<Output, Error> {
    let c = Configuration::parse(config, g.vertex_count())?;
    let r = decider::is_coverable(g, &c, search_budget(cli, SearchBudget::default()))?;
    let mut report = json!({
        "graph": g.label(),
        "configuration": c,
        "verdict": r.verdict,
        "stats": r.stats,
    });
    let mut text = format!("{}: {} on {}\n", verdict_name(r.verdict), c, g.label());
    if cli.verify {
        if let Some(w) = &r.witness {
            let v = verify_cover_sequence(g, &c, w)?;
            report["witness"] = json!(w);
            report["verified"] = json!(v.is_cover);
            text.push_str(&format!("witness ({} moves, verified: {}):\n{}\n", w.len(), v.is_cover, w));
        }
    }
    let code = match r.verdict {
        Verdict::Coverable => EXIT_OK,
        Verdict::NotCoverable => EXIT_NEGATIVE,
        Verdict::BudgetExceeded => EXIT_BUDGET,
    };
    Ok(Output { json: report, text, code })
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Coverable => "Coverable",
        Verdict::NotCoverable => "NotCoverable",
        Verdict::BudgetExceeded => "BudgetExceeded",
    }
}

fn strategy(cli: &Cli, g: &Graph, config: &str) -> Result<Output, Error> {
    let d = g
        .cube_dimension()
        .ok_or_else(|| Error::Unsupported(format!("strategy needs a hypercube, got {}", g.label())))?;
    let c = Configuration::parse(config, g.vertex_count())?;
    let base = StrategyOptions::default();
    let options = StrategyOptions {
        base_budget: search_budget(cli, base.base_budget),
        fallback_budget: search_budget(cli, base.fallback_budget),
        ..base
    };
    let trace = cover_strategy_with(d, &c, options)?;
    if cli.verify {
        verify_cover_sequence(g, &c, &trace.moves)?;
    }
    let text = strategy_text(g, &trace);
    Output::new(&trace, text, EXIT_OK)
}

fn strategy_text(g: &Graph, t: &StrategyTrace) -> String {
    let mut s = format!(
        "{}: {} moves, {} branches, fallbacks {}, verified {}\n",
        g.label(),
        t.moves.len(),
        t.branches.len(),
        t.fallback_count,
        t.verified
    );
    for b in &t.branches {
        s.push_str(&format!("  {:>width$}{:?} d={} size={} moves={}\n", "", b.kind, b.dimension, b.size, b.moves, width = 2 * b.depth as usize));
    }
    s.push_str(&format!("{}\n", t.moves));
    s
}

fn invariant(cli: &Cli, g: &Graph, which: Invariant) -> Result<Output, Error> {
    let opts = sweep_options(cli);
    let mut report = match which {
        Invariant::Pi => pi_bruteforce(g, &opts)?,
        _ => gamma_bruteforce(g, &opts)?,
    };
    if report.method == Method::BoundOnly {
        if let Ok(formula) = closed_form(g.family(), which) {
            if formula.method == Method::Formula {
                report = formula;
            }
        }
    }
    let mut code = if report.method == Method::BoundOnly { EXIT_BUDGET } else { EXIT_OK };
    let mut json = serde_json::to_value(&report).map_err(|e| Error::Internal(e.to_string()))?;
    let mut text = invariant_text(&report);

    if let (Some(m), Invariant::Gamma, Some(value)) = (cli.samples, which, report.integer()) {
        let (checked, failed) = sample_gamma(cli, g, value, m)?;
        json["samples"] = json!({ "seed": cli.seed, "checked": checked, "not_coverable": failed });
        text.push_str(&format!("samples: {checked} random configurations of size {value}, {} not coverable\n", failed.len()));
        if !failed.is_empty() {
            code = EXIT_NEGATIVE;
        }
    }
    Ok(Output { json, text, code })
}

/// Draws `m` configurations of `size` pebbles, each pebble placed uniformly,
/// and returns the ones the decider refutes.
fn sample_gamma(cli: &Cli, g: &Graph, size: u64, m: u64) -> Result<(u64, Vec<Configuration>), Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let budget = search_budget(cli, SearchBudget::default());
    let n = g.vertex_count();
    let mut failed = Vec::new();
    for _ in 0..m {
        let mut counts = vec![0u32; n];
        for _ in 0..size {
            counts[rng.gen_range(0..n)] += 1;
        }
        let c = Configuration::new(counts);
        match decider::is_coverable(g, &c, budget)?.verdict {
            Verdict::Coverable => {}
            Verdict::NotCoverable => failed.push(c),
            Verdict::BudgetExceeded => return Err(Error::BudgetExceeded),
        }
    }
    Ok((m, failed))
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Formula => "formula",
        Method::Bruteforce => "bruteforce",
        Method::BoundOnly => "bound-only",
    }
}

fn invariant_text(r: &InvariantReport) -> String {
    let name = match r.invariant {
        Invariant::Gamma => "gamma",
        Invariant::Pi => "pi",
        Invariant::Rho => "rho",
    };
    let mut s = match (r.integer(), r.bounds) {
        (Some(v), _) if r.method != Method::BoundOnly => format!("{name}({}) = {v} [{}]\n", r.graph, method_name(r.method)),
        (_, Some(b)) => {
            let upper = b.upper.map_or("?".to_string(), |u| u.to_string());
            let note = if r.conjectured { ", conjectured value is the lower bound" } else { "" };
            format!("{name}({}) in [{}, {upper}] [bound-only{note}]\n", r.graph, b.lower)
        }
        _ => format!("{name}({}) unknown\n", r.graph),
    };
    if let Some(w) = &r.witness {
        match w.target {
            Some(t) => s.push_str(&format!("witness: {} (target {t})\n", w.configuration)),
            None => s.push_str(&format!("witness: {}\n", w.configuration)),
        }
    }
    s
}

fn ratio(cli: &Cli, g: &Graph) -> Result<Output, Error> {
    let r = cover_ratio(g, &sweep_options(cli))?;
    let (num, den) = match r.value {
        crate::numbers::InvariantValue::Rational { numerator, denominator } => (numerator, denominator),
        crate::numbers::InvariantValue::Integer(v) => (v, 1),
    };
    let mut text = format!("rho({}) = {num}/{den} = {}\n", r.graph, r.approx);
    if let Some(f) = r.cube_formula {
        text.push_str(&format!("n^(lg 3 - 1) = {f}\n"));
    }
    Output::new(&r, text, EXIT_OK)
}

#[derive(Serialize)]
struct CheckLine {
    name: String,
    passed: bool,
    detail: String,
}

fn verify_cube(cli: &Cli, d: u32) -> Result<Output, Error> {
    let q = graph(&format!("cube:{d}"))?;
    let opts = sweep_options(cli);
    let mut lines = Vec::new();
    let gamma = pow3(d)?;

    let simple = Configuration::simple(q.vertex_count(), 0, (gamma - 1) as u32);
    let r = decider::is_coverable(&q, &simple, search_budget(cli, SearchBudget::default()))?;
    lines.push(CheckLine {
        name: format!("simple configuration of size {} is not coverable", gamma - 1),
        passed: r.verdict == Verdict::NotCoverable,
        detail: format!("{} after {} nodes", verdict_name(r.verdict), r.stats.nodes_expanded),
    });

    if d <= 3 {
        let r = gamma_bruteforce(&q, &opts)?;
        lines.push(CheckLine {
            name: format!("gamma by enumeration equals {gamma}"),
            passed: r.method == Method::Bruteforce && r.integer() == Some(gamma),
            detail: format!("{:?} via {}", r.integer(), method_name(r.method)),
        });
    }

    let rho = cube_ratio(d)?;
    let formula = cube_ratio_formula(d);
    let exact = *rho.numer() as f64 / *rho.denom() as f64;
    lines.push(CheckLine {
        name: "rho equals (3/2)^d and n^(lg 3 - 1)".into(),
        passed: *rho.numer() == gamma && (exact - formula).abs() < 1e-9,
        detail: format!("{}/{} vs {formula}", rho.numer(), rho.denom()),
    });

    let samples = cli.samples.unwrap_or(1000);
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut bad = 0u64;
    let mut first_bad = None;
    for _ in 0..samples {
        let c = random_good_configuration(d, &mut rng)?;
        let ok = cover_strategy_with(d, &c, StrategyOptions::default())
            .and_then(|t| Ok(t.fallback_count == 0 && verify_cover_sequence(&q, &c, &t.moves)?.is_cover))
            .unwrap_or(false);
        if !ok {
            bad += 1;
            first_bad.get_or_insert(c);
        }
    }
    lines.push(CheckLine {
        name: format!("strategist covers {samples} random good configurations without fallback"),
        passed: bad == 0,
        detail: match first_bad {
            Some(c) => format!("{bad} failures, first {c}"),
            None => format!("seed {}", cli.seed),
        },
    });

    let all = lines.iter().all(|l| l.passed);
    let mut text = String::new();
    for l in &lines {
        text.push_str(&format!("{} {} ({})\n", if l.passed { "PASS" } else { "FAIL" }, l.name, l.detail));
    }
    let report = json!({ "dimension": d, "checks": lines, "passed": all });
    Ok(Output { json: report, text, code: if all { EXIT_OK } else { EXIT_NEGATIVE } })
}

fn check(cli: &Cli, q: QuestionArg, specs: &[String]) -> Result<Output, Error> {
    let opts = sweep_options(cli);
    let want = if q == QuestionArg::Q4 { 2 } else { 1 };
    if specs.len() != want {
        return Err(Error::InvalidParameter(format!("{q:?} takes {want} graph(s), got {}", specs.len())));
    }
    let report = match q {
        QuestionArg::Q1 => check_simple_conjecture(&graph(&specs[0])?, &opts)?,
        QuestionArg::Q4 => check_product_conjecture(&graph(&specs[0])?, &graph(&specs[1])?, &opts)?,
        QuestionArg::TwoPebbling => check_two_pebbling(&graph(&specs[0])?, &opts)?,
    };
    let code = match report.outcome {
        Outcome::Holds => EXIT_OK,
        Outcome::Counterexample => EXIT_NEGATIVE,
        Outcome::BudgetExceeded => EXIT_BUDGET,
    };
    let text = conjecture_text(&report);
    Output::new(&report, text, code)
}

fn conjecture_text(r: &ConjectureReport) -> String {
    let outcome = match r.outcome {
        Outcome::Holds => "holds",
        Outcome::Counterexample => "counterexample",
        Outcome::BudgetExceeded => "budget exceeded",
    };
    let mut s = format!("{:?} on {}: {outcome}\n", r.question, r.graphs.join(", "));
    for v in &r.certificate.values {
        let value = v.value.map_or("?".to_string(), |x| x.to_string());
        s.push_str(&format!("  {} = {value} [{}]\n", v.name, method_name(v.method)));
    }
    if let Some(w) = &r.certificate.counterexample {
        s.push_str(&format!("  counterexample: {}\n", w.configuration));
    }
    if let Some(c) = &r.certificate.non_simple_extremal {
        s.push_str(&format!("  non-simple extremal configuration: {c}\n"));
    }
    s
}

fn bound(cli: &Cli, g: &Graph) -> Result<Output, Error> {
    let sb = simple_bound(g)?;
    let pi = match closed_form(g.family(), Invariant::Pi) {
        Ok(r) => r,
        Err(Error::Unsupported(_)) => pi_bruteforce(g, &sweep_options(cli))?,
        Err(e) => return Err(e),
    };
    let n = g.vertex_count() as u64;
    let pi_value = pi.integer().filter(|_| pi.method != Method::BoundOnly);
    let upper = pi_value.map(|p| n.saturating_mul(p));
    let report = json!({
        "graph": g.label(),
        "simple_bound": sb.value,
        "argmax": sb.argmax,
        "pi": pi_value,
        "pi_method": pi.method,
        "n_pi": upper,
    });
    let upper_text = upper.map_or("?".to_string(), |u| u.to_string());
    let text = format!("{}: {} <= gamma <= {upper_text} (simple bound at vertex {})\n", g.label(), sb.value, sb.argmax);
    let code = if upper.is_some() { EXIT_OK } else { EXIT_BUDGET };
    Ok(Output { json: report, text, code })
}
