//! Command-line front end for the `pmzs` library.
//!
//! [`run`] parses an argument vector, executes one subcommand and returns the
//! rendered output with the process exit code: 0 for success, 1 when a
//! verification exceeded its tolerance, 2 for invalid input.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;
use serde_json::{json, Map, Value};

use pmzs::connector::{
    transport, verify_connector_grid, verify_connector_relations, verify_trace, verify_trace_series, Flavor,
    RelationReport, SeriesTraceReport, TraceReport, TransportTrace,
};
use pmzs::index::{dual, run_decompose};
use pmzs::literal::{format_complex, parse_complex};
use pmzs::zeta::{
    gf_coefficients, ohno_sum, pmzs_eval, pmzs_tilde_eval, verify_duality, verify_ohno, Comparison,
};
use pmzs::{EvalConfig, Index, SeriesWithTail, ValueWithTail};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "pmzs", version, about = "Parametrized multiple zeta series: evaluation, duality and connector traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug)]
struct Opts {
    /// Parameter α, e.g. 1, 1.5, 0.7+0.2i
    #[arg(long, global = true, default_value = "1", allow_hyphen_values = true)]
    alpha: String,
    /// Numeric value of the formal variable x (repeatable)
    #[arg(long = "x", global = true, allow_hyphen_values = true)]
    x: Vec<String>,
    /// Ohno shift m
    #[arg(long, global = true, default_value_t = 0)]
    shift: u32,
    /// Outer cutoff of one-sided series
    #[arg(long, global = true, default_value_t = 100_000)]
    trunc: usize,
    /// Cutoff of connected sums
    #[arg(long, global = true, default_value_t = 100_000)]
    conn: usize,
    /// Degree of series in x
    #[arg(long, global = true)]
    degree: Option<usize>,
    /// Use the Γ-weighted family ζ̃ / Z̃
    #[arg(long, global = true)]
    tilde: bool,
    /// Evaluate every state of a transport trace
    #[arg(long, global = true)]
    verify: bool,
    /// Emit a JSON report instead of a table
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dual index
    Dual { index: String },
    /// Run decomposition ({1}^{a−1}, b+1) of an admissible index
    Decompose { index: String },
    /// ζ(k; α)
    Eval { index: String },
    /// ζ̃(k; α)
    EvalTilde { index: String },
    /// Σ over weak compositions e of size --shift of ζ(k + e; α)
    Ohno { index: String },
    /// Coefficients of the Ohno generating function in x
    GfCoeffs { index: String },
    /// Compare ζ(k; α) with ζ(k′; α)
    VerifyDuality { index: String },
    /// Compare Ohno sums of k and k′, directly and through the generating function
    VerifyOhno { index: String },
    /// Check the connector relations at (M, N), or on the standard grid
    VerifyConnectors {
        #[arg(allow_negative_numbers = true)]
        m: Option<i64>,
        #[arg(allow_negative_numbers = true, requires = "m")]
        n: Option<i64>,
    },
    /// Connector transport (k; ∅) → (∅; k′)
    Transport { index: String },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Dual { .. } => "dual",
            Command::Decompose { .. } => "decompose",
            Command::Eval { .. } => "eval",
            Command::EvalTilde { .. } => "eval-tilde",
            Command::Ohno { .. } => "ohno",
            Command::GfCoeffs { .. } => "gf-coeffs",
            Command::VerifyDuality { .. } => "verify-duality",
            Command::VerifyOhno { .. } => "verify-ohno",
            Command::VerifyConnectors { .. } => "verify-connectors",
            Command::Transport { .. } => "transport",
        }
    }
}

/// Rendered output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok,
    Violation,
}

/// What a command produced before rendering.
struct Done {
    result: Value,
    tails: Vec<f64>,
    status: Status,
    table: String,
}

#[derive(Debug)]
struct Failure(String);

impl From<pmzs::Error> for Failure {
    fn from(e: pmzs::Error) -> Self {
        Failure(e.to_string())
    }
}

type Res<T> = std::result::Result<T, Failure>;

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let start = Instant::now();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { stdout: String::new(), stderr: text, code }
            } else {
                Outcome { stdout: text, stderr: String::new(), code }
            };
        }
    };
    let cfg = EvalConfig {
        trunc_n: cli.opts.trunc,
        conn_m: cli.opts.conn,
        degree: cli.opts.degree.unwrap_or(pmzs::series::DEFAULT_DEGREE),
    };
    let input = echo_input(&cli);
    let outcome = execute(&cli, &cfg);
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let (result, tails, status, table, code, error) = match outcome {
        Ok(done) => {
            let code = if done.status == Status::Ok { EXIT_OK } else { EXIT_VIOLATION };
            (done.result, done.tails, done.status, done.table, code, None)
        }
        Err(Failure(msg)) => (json!({ "error": msg }), Vec::new(), Status::Ok, String::new(), EXIT_INVALID, Some(msg)),
    };
    let status_name = match (&error, status) {
        (Some(_), _) => "error",
        (None, Status::Ok) => "ok",
        (None, Status::Violation) => "violation",
    };
    let stderr = error.map(|m| format!("error: {m}\n")).unwrap_or_default();
    let stdout = if cli.opts.json {
        let report = json!({
            "command": cli.command.name(),
            "input": input,
            "result": result,
            "diagnostics": {
                "trunc_N": cfg.trunc_n,
                "conn_M": cfg.conn_m,
                "degree_D": cfg.degree,
                "tail_estimates": tails,
                "elapsed_ms": elapsed_ms,
            },
            "status": status_name,
        });
        let mut s = serde_json::to_string_pretty(&report).expect("reports serialize");
        s.push('\n');
        s
    } else {
        table
    };
    Outcome { stdout, stderr, code }
}

fn echo_input(cli: &Cli) -> Value {
    let mut m = Map::new();
    match &cli.command {
        Command::VerifyConnectors { m: mm, n } => {
            m.insert("m".into(), json!(mm));
            m.insert("n".into(), json!(n));
        }
        Command::Dual { index }
        | Command::Decompose { index }
        | Command::Eval { index }
        | Command::EvalTilde { index }
        | Command::Ohno { index }
        | Command::GfCoeffs { index }
        | Command::VerifyDuality { index }
        | Command::VerifyOhno { index }
        | Command::Transport { index } => {
            m.insert("index".into(), json!(index));
        }
    }
    let o = &cli.opts;
    m.insert("alpha".into(), json!(o.alpha));
    m.insert("x".into(), json!(o.x));
    m.insert("shift".into(), json!(o.shift));
    m.insert("tilde".into(), json!(o.tilde));
    m.insert("verify".into(), json!(o.verify));
    Value::Object(m)
}

fn parse_index(s: &str) -> Res<Index> {
    s.parse::<Index>().map_err(Failure::from)
}

fn parse_admissible(s: &str) -> Res<Index> {
    let k = parse_index(s)?;
    k.require_admissible()?;
    Ok(k)
}

fn parse_c(s: &str) -> Res<C64> {
    parse_complex(s).map_err(Failure::from)
}

fn flavor(opts: &Opts) -> Flavor {
    if opts.tilde {
        Flavor::Tilde
    } else {
        Flavor::Ohno
    }
}

fn cplx(z: C64) -> Value {
    json!([z.re, z.im])
}

fn fmt_c(z: C64) -> String {
    if z.im == 0.0 {
        format!("{:.15}", z.re)
    } else {
        format!("{:.15}{:+.15}i", z.re, z.im)
    }
}

fn value_json(v: &ValueWithTail) -> Value {
    json!({
        "value": cplx(v.value),
        "tail_estimate": v.tail_estimate,
        "extrapolated": cplx(v.extrapolated()),
        "terms_used": v.terms_used,
        "slow_convergence": v.slow_convergence,
    })
}

fn series_json(s: &SeriesWithTail) -> Value {
    json!({
        "coefficients": s.value.coeffs().iter().map(|&c| cplx(c)).collect::<Vec<_>>(),
        "tail_estimates": s.tail_estimates,
        "extrapolated": s.extrapolated().coeffs().iter().map(|&c| cplx(c)).collect::<Vec<_>>(),
        "terms_used": s.terms_used,
        "slow_convergence": s.slow_convergence,
    })
}

fn comparison_json(c: &Comparison) -> Value {
    json!({
        "left": value_json(&c.left),
        "right": value_json(&c.right),
        "residual": c.residual,
        "raw_residual": c.raw_residual(),
        "tolerance": c.tolerance,
        "passed": c.passed(),
    })
}

fn flavor_name(f: Flavor) -> &'static str {
    match f {
        Flavor::Ohno => "ohno",
        Flavor::Tilde => "tilde",
    }
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn status(passed: bool) -> Status {
    if passed {
        Status::Ok
    } else {
        Status::Violation
    }
}

fn value_line(label: &str, v: &ValueWithTail) -> String {
    let mut s = format!(
        "{label}\n  value        {}\n  tail est.    {:.3e}\n  extrapolated {}\n  terms        {}\n",
        fmt_c(v.value),
        v.tail_estimate,
        fmt_c(v.extrapolated()),
        v.terms_used
    );
    if v.slow_convergence {
        s.push_str("  note         slow convergence (decay exponent < 1.5)\n");
    }
    s
}

fn comparison_lines(out: &mut String, label: &str, c: &Comparison) {
    let _ = writeln!(
        out,
        "{label:<12} {}  vs  {}\n{:<12} residual {:.3e}  tolerance {:.3e}  {}",
        fmt_c(c.left.extrapolated()),
        fmt_c(c.right.extrapolated()),
        "",
        c.residual,
        c.tolerance,
        verdict(c.passed())
    );
}

fn execute(cli: &Cli, cfg: &EvalConfig) -> Res<Done> {
    let o = &cli.opts;
    match &cli.command {
        Command::Dual { index } => {
            let k = parse_index(index)?;
            let d = dual(&k)?;
            Ok(Done {
                result: json!({ "index": k.to_string(), "dual": d.to_string() }),
                tails: vec![],
                status: Status::Ok,
                table: format!("{d}\n"),
            })
        }
        Command::Decompose { index } => {
            let k = parse_index(index)?;
            let runs = run_decompose(&k)?;
            let pairs: Vec<Value> = runs.runs().iter().map(|r| json!({ "a": r.a, "b": r.b })).collect();
            let table = runs
                .runs()
                .iter()
                .map(|r| format!("(a={}, b={})", r.a, r.b))
                .collect::<Vec<_>>()
                .join(" ");
            Ok(Done {
                result: json!({ "index": k.to_string(), "runs": pairs }),
                tails: vec![],
                status: Status::Ok,
                table: table + "\n",
            })
        }
        Command::Eval { index } | Command::EvalTilde { index } => {
            let tilde = matches!(cli.command, Command::EvalTilde { .. });
            let k = parse_admissible(index)?;
            let alpha = parse_c(&o.alpha)?;
            let v = if tilde {
                pmzs_tilde_eval(&k, alpha, cfg)?
            } else {
                pmzs_eval(&k, alpha, cfg)?
            };
            let name = if tilde { "ζ̃" } else { "ζ" };
            let mut result = value_json(&v);
            result["index"] = json!(k.to_string());
            Ok(Done {
                result,
                tails: vec![v.tail_estimate],
                status: Status::Ok,
                table: value_line(&format!("{name}({k}; α={})", format_complex(alpha)), &v),
            })
        }
        Command::Ohno { index } => {
            let k = parse_admissible(index)?;
            let alpha = parse_c(&o.alpha)?;
            let v = ohno_sum(&k, o.shift, alpha, cfg)?;
            let mut result = value_json(&v);
            result["index"] = json!(k.to_string());
            result["shift"] = json!(o.shift);
            Ok(Done {
                result,
                tails: vec![v.tail_estimate],
                status: Status::Ok,
                table: value_line(
                    &format!("Ohno sum of ({k}) with shift {} at α={}", o.shift, format_complex(alpha)),
                    &v,
                ),
            })
        }
        Command::GfCoeffs { index } => {
            let k = parse_admissible(index)?;
            let alpha = parse_c(&o.alpha)?;
            let s = gf_coefficients(&k, alpha, cfg)?;
            let mut table = format!("generating function of ({k}) at α={}\n", format_complex(alpha));
            let _ = writeln!(table, "{:>3}  {:<40} {:>10}", "e", "coefficient", "tail est.");
            for (e, (c, t)) in s.value.coeffs().iter().zip(&s.tail_estimates).enumerate() {
                let _ = writeln!(table, "{e:>3}  {:<40} {t:>10.3e}", fmt_c(*c));
            }
            let mut result = series_json(&s);
            result["index"] = json!(k.to_string());
            Ok(Done {
                result,
                tails: s.tail_estimates.clone(),
                status: Status::Ok,
                table,
            })
        }
        Command::VerifyDuality { index } => {
            let k = parse_admissible(index)?;
            let alpha = parse_c(&o.alpha)?;
            let chk = verify_duality(&k, alpha, flavor(o), cfg)?;
            let c = &chk.comparison;
            let mut table = format!(
                "duality ({}) vs ({}) [{}] at α={}\n",
                chk.index,
                chk.dual,
                flavor_name(chk.flavor),
                format_complex(alpha)
            );
            comparison_lines(&mut table, "values", c);
            Ok(Done {
                result: json!({
                    "index": chk.index.to_string(),
                    "dual": chk.dual.to_string(),
                    "flavor": flavor_name(chk.flavor),
                    "comparison": comparison_json(c),
                    "passed": c.passed(),
                }),
                tails: vec![c.left.tail_estimate, c.right.tail_estimate],
                status: status(c.passed()),
                table,
            })
        }
        Command::VerifyOhno { index } => {
            let k = parse_admissible(index)?;
            let alpha = parse_c(&o.alpha)?;
            let chk = verify_ohno(&k, o.shift, alpha, cfg)?;
            let mut table = format!(
                "Ohno relation ({}) vs ({}) with shift {} at α={}\n",
                chk.index,
                chk.dual,
                chk.shift,
                format_complex(alpha)
            );
            comparison_lines(&mut table, "direct", &chk.direct);
            comparison_lines(&mut table, "gen. func.", &chk.generating);
            comparison_lines(&mut table, "consistency", &chk.consistency);
            Ok(Done {
                result: json!({
                    "index": chk.index.to_string(),
                    "dual": chk.dual.to_string(),
                    "shift": chk.shift,
                    "direct": comparison_json(&chk.direct),
                    "generating_function": comparison_json(&chk.generating),
                    "consistency": comparison_json(&chk.consistency),
                    "passed": chk.passed(),
                }),
                tails: vec![chk.direct.left.tail_estimate, chk.direct.right.tail_estimate],
                status: status(chk.passed()),
                table,
            })
        }
        Command::VerifyConnectors { m, n } => {
            let reports = match (m, n) {
                (Some(m), Some(n)) => {
                    let alpha = parse_c(&o.alpha)?;
                    let xs = x_values(&o.x, &["0"])?;
                    xs.into_iter()
                        .map(|x| verify_connector_relations(*m, *n, alpha, x, cfg))
                        .collect::<pmzs::Result<Vec<_>>>()?
                }
                (None, None) => verify_connector_grid(cfg)?,
                _ => return Err(Failure("verify-connectors takes both M and N, or neither".into())),
            };
            Ok(connectors_done(&reports))
        }
        Command::Transport { index } => {
            let k = parse_admissible(index)?;
            let tr = transport(&k, flavor(o))?;
            if !o.verify {
                return Ok(transport_done(&tr, Vec::new(), Vec::new()));
            }
            let alpha = parse_c(&o.alpha)?;
            if o.degree.is_some() {
                let rep = verify_trace_series(&tr, alpha, cfg)?;
                return Ok(transport_done(&tr, Vec::new(), vec![rep]));
            }
            let explicit = !o.x.is_empty();
            let mut reports = Vec::new();
            for x in x_values(&o.x, &["0", "0.2"])? {
                if !explicit && (alpha - x).re <= 0.0 {
                    continue;
                }
                reports.push(verify_trace(&tr, alpha, x, cfg)?);
            }
            Ok(transport_done(&tr, reports, Vec::new()))
        }
    }
}

fn x_values(given: &[String], default: &[&str]) -> Res<Vec<C64>> {
    if given.is_empty() {
        default.iter().map(|s| parse_c(s)).collect()
    } else {
        given.iter().map(|s| parse_c(s)).collect()
    }
}

fn connectors_done(reports: &[RelationReport]) -> Done {
    let passed = reports.iter().all(RelationReport::passed);
    let max = reports.iter().map(RelationReport::max_residual).fold(0.0, f64::max);
    let mut table = String::new();
    let _ = writeln!(
        table,
        "{:>3} {:>3} {:<10} {:<10} {:<32} {:>10} {:>10}  ",
        "m", "n", "alpha", "x", "relation", "residual", "tolerance"
    );
    let mut json_reports = Vec::new();
    for r in reports {
        let mut checks = Vec::new();
        for c in &r.checks {
            let _ = writeln!(
                table,
                "{:>3} {:>3} {:<10} {:<10} {:<32} {:>10.3e} {:>10.1e}  {}",
                r.m,
                r.n,
                format_complex(r.alpha),
                format_complex(r.x),
                c.name,
                c.residual,
                c.tolerance,
                verdict(c.passed())
            );
            checks.push(json!({
                "name": c.name,
                "lhs": cplx(c.lhs),
                "rhs": cplx(c.rhs),
                "residual": c.residual,
                "tolerance": c.tolerance,
                "passed": c.passed(),
            }));
        }
        json_reports.push(json!({
            "m": r.m,
            "n": r.n,
            "alpha": cplx(r.alpha),
            "x": cplx(r.x),
            "checks": checks,
            "passed": r.passed(),
        }));
    }
    let _ = writeln!(table, "max residual {max:.3e}: {}", verdict(passed));
    Done {
        result: json!({ "reports": json_reports, "max_residual": max, "passed": passed }),
        tails: vec![],
        status: status(passed),
        table,
    }
}

fn side(idx: &Index) -> String {
    if idx.is_empty() {
        "∅".into()
    } else {
        idx.to_string()
    }
}

/// One row per state; `move` is the move leaving the state.
fn trace_rows(tr: &TransportTrace, rep: Option<&TraceReport>) -> Vec<Value> {
    tr.states
        .iter()
        .enumerate()
        .map(|(i, st)| {
            let mv = tr.moves.get(i);
            let step = rep.map(|r| &r.steps[i]);
            json!({
                "move": mv.map(|m| m.kind.name()),
                "eq_label": mv.map(|m| m.label()),
                "left": st.left().to_string(),
                "right": st.right().to_string(),
                "value_re": step.map(|s| s.value.value.re),
                "value_im": step.map(|s| s.value.value.im),
                "tail": step.map(|s| s.value.tail_estimate),
                "residual_to_next": step.and_then(|s| s.residual_to_next),
                "tolerance_to_next": step.and_then(|s| s.tolerance_to_next),
            })
        })
        .collect()
}

fn series_rows(tr: &TransportTrace, rep: &SeriesTraceReport) -> Vec<Value> {
    tr.states
        .iter()
        .zip(&rep.steps)
        .enumerate()
        .map(|(i, (st, step))| {
            let mv = tr.moves.get(i);
            json!({
                "move": mv.map(|m| m.kind.name()),
                "eq_label": mv.map(|m| m.label()),
                "left": st.left().to_string(),
                "right": st.right().to_string(),
                "value": step.value.value.coeffs().iter().map(|&c| cplx(c)).collect::<Vec<_>>(),
                "tail": step.value.tail_estimates,
                "residual_to_next": step.residual_to_next,
                "tolerance_to_next": step.tolerance_to_next,
            })
        })
        .collect()
}

fn transport_done(tr: &TransportTrace, points: Vec<TraceReport>, series: Vec<SeriesTraceReport>) -> Done {
    let end = tr.end().right().clone();
    let mut table = format!(
        "transport ({}; ∅) → (∅; {}) [{}], {} moves\n",
        tr.start,
        end,
        flavor_name(tr.flavor),
        tr.moves.len()
    );
    for (i, st) in tr.states.iter().enumerate() {
        let mv = tr.moves.get(i).map(|m| format!("{} {}", m.kind, m.label())).unwrap_or_default();
        let _ = writeln!(table, "  {:>2}  ({}; {})  {}", i, side(st.left()), side(st.right()), mv);
    }
    let mut passed = true;
    let mut tails = Vec::new();
    let mut verifications = Vec::new();
    for rep in &points {
        passed &= rep.passed();
        tails.extend(rep.steps.iter().map(|s| s.value.tail_estimate));
        let _ = writeln!(
            table,
            "verification at α={}, x={}:",
            format_complex(rep.alpha),
            format_complex(rep.x)
        );
        for (i, s) in rep.steps.iter().enumerate() {
            let res = match (s.residual_to_next, s.tolerance_to_next) {
                (Some(r), Some(t)) => format!("Δ {r:.3e} (tol {t:.1e}) {}", verdict(r <= t)),
                _ => String::new(),
            };
            let _ = writeln!(
                table,
                "  {:>2}  {:<22} {}  tail {:.2e}  {}",
                i,
                s.state.to_string(),
                fmt_c(s.value.value),
                s.value.tail_estimate,
                res
            );
        }
        let mut endpoints = Vec::new();
        for e in &rep.endpoints {
            let _ = writeln!(
                table,
                "  {} vs one-sided ({}): residual {:.3e} (tol {:.1e}) {}",
                e.which,
                e.index,
                e.comparison.residual,
                e.comparison.tolerance,
                verdict(e.comparison.passed())
            );
            endpoints.push(json!({
                "which": e.which,
                "index": e.index.to_string(),
                "comparison": comparison_json(&e.comparison),
            }));
        }
        verifications.push(json!({
            "alpha": cplx(rep.alpha),
            "x": cplx(rep.x),
            "trace": trace_rows(tr, Some(rep)),
            "endpoints": endpoints,
            "max_residual": rep.max_residual(),
            "passed": rep.passed(),
        }));
    }
    for rep in &series {
        passed &= rep.passed();
        for s in &rep.steps {
            tails.extend(s.value.tail_estimates.iter().copied());
        }
        let _ = writeln!(
            table,
            "series verification at α={}, degree {}: max coefficient residual {:.3e} {}",
            format_complex(rep.alpha),
            rep.degree,
            rep.max_residual(),
            verdict(rep.passed())
        );
        verifications.push(json!({
            "alpha": cplx(rep.alpha),
            "degree": rep.degree,
            "trace": series_rows(tr, rep),
            "max_residual": rep.max_residual(),
            "passed": rep.passed(),
        }));
    }
    Done {
        result: json!({
            "index": tr.start.to_string(),
            "flavor": flavor_name(tr.flavor),
            "dual": end.to_string(),
            "moves": tr.moves.len(),
            "trace": trace_rows(tr, None),
            "verifications": verifications,
            "passed": passed,
        }),
        tails,
        status: status(passed),
        table,
    }
}
