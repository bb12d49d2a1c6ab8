use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use relim_core::bounds::{
    amplified_error, base_threshold, compose_amplified, failure_vs_n, id_count_bound, intermediate_inequality,
    iterated_error, multi_round_threshold, ErrorBound,
};
use relim_core::certificate::{build_certificate, verify_certificate, CertificateError};
use relim_core::engine::{iterate_speedup, merge_labels, strength_order, EngineError, MergePolicy, PosetReport, SpeedupOptions};
use relim_core::family::{certify_lemma, make_pi, FamilyParams};
use relim_core::problem::{format_problem, zero_round_solvable, ParseError, ProblemJson};
use relim_core::sim::{
    ceil_sqrt, check_solution, gen_instance, k_matching_check, k_matching_labeling, mm_labeling, run_proposal,
    split_nodes, uniform_parts, PortGraph, PortGraphJson, SimError, SolutionReport,
};
use relim_core::{parse_problem, LabelMap, Problem, ProblemError, Side};
use serde_json::{json, Value};
use thiserror::Error;

use crate::args::{Cli, Command, Format, Instance, SimCommand};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments or unreadable input.
    #[error("{0}")]
    Usage(String),
    /// The engine gave up (caps, budgets).
    #[error("{0}")]
    Engine(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Engine(_) => 1,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Engine(_) => "engine",
        }
    }
}

impl From<ProblemError> for CliError {
    fn from(e: ProblemError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Problem(p) => p.into(),
            EngineError::Script(msg) => CliError::Usage(msg),
            other => CliError::Engine(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// What a command produced. `passed == false` means a check or
/// verification failed, which exits with status 1.
pub struct Report {
    pub json: Value,
    pub human: String,
    pub passed: bool,
}

impl Report {
    fn ok(json: Value, human: String) -> Self {
        Report { json, human, passed: true }
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Usage(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn read_problem(path: &Path) -> Result<Problem, CliError> {
    Ok(parse_problem(&read_input(path)?)?)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read_input(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn problem_json(p: &Problem) -> Value {
    json!({ "problem": ProblemJson::from(p), "text": format_problem(p), "hash": p.digest() })
}

fn params(delta: u32, x: u32, y: u32) -> Result<FamilyParams, CliError> {
    FamilyParams::new(delta, x, y).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let opts = SpeedupOptions { alphabet_cap: cli.alphabet_cap, cancel: None };
    match &cli.command {
        Command::Parse { input, poset } => {
            let p = read_problem(input)?;
            let mut json = problem_json(&p);
            let mut human = format_problem(&p);
            if let Some(side) = poset {
                let side = Side::from(*side);
                let report = PosetReport::new(&p, &strength_order(&p, side));
                human.push_str(&render_poset(&report, side));
                json["poset"] = json!(report);
            }
            Ok(Report::ok(json, human))
        }
        Command::Speedup { input, steps, merge } => {
            let p = read_problem(input)?;
            let policy: MergePolicy = merge.parse().map_err(CliError::Usage)?;
            let out = iterate_speedup(&p, *steps, &policy, &opts)?;
            let mut human = String::new();
            for (record, problem) in out.records.iter().zip(&out.problems) {
                let _ = writeln!(human, "# step {}: {} labels", record.step, problem.alphabet().len());
                for (name, members) in &record.dictionary {
                    let _ = writeln!(human, "#   {name} = {{{}}}", members.join(" "));
                }
                for m in record.merges.iter().filter(|m| m.kept) {
                    let _ = writeln!(human, "#   merged {} into {}", m.labels.join(" "), m.into);
                }
                human.push_str(&format_problem(problem));
            }
            let json = json!({
                "steps": out.records,
                "result": out.last().map(problem_json),
                "notes": out.policy_notes,
            });
            Ok(Report::ok(json, human))
        }
        Command::Merge { input, map } => {
            let p = read_problem(input)?;
            let map: LabelMap = map.iter().cloned().collect();
            let merged = merge_labels(&p, &map)?;
            Ok(Report::ok(problem_json(&merged), format_problem(&merged)))
        }
        Command::ZeroRound { input, side } => {
            let p = read_problem(input)?;
            let side = Side::from(*side);
            let report = zero_round_solvable(&p, side).to_json(&p, side);
            let mut human = String::new();
            match (&report.witness, report.solvable) {
                (Some(w), true) => {
                    let _ = writeln!(human, "solvable in 0 rounds: every node outputs {}", w.join(" "));
                }
                _ => {
                    let _ = writeln!(human, "not solvable in 0 rounds; {} refutations:", report.refutations.len());
                    for r in &report.refutations {
                        let _ = writeln!(human, "  support {{{}}}: {}", r.support.join(" "), r.bad.join(" "));
                    }
                }
            }
            Ok(Report::ok(json!(report), human))
        }
        Command::Family { delta, x, y, certify } => {
            let params = params(*delta, *x, *y)?;
            let p = make_pi(params);
            let mut json = problem_json(&p);
            let mut human = format!("# {params}\n{}", format_problem(&p));
            if *certify {
                let report = certify_lemma(params, &opts)?;
                let _ = writeln!(human, "# speedup has {} labels; target {}", report.speedup_labels, report.next);
                match &report.mapping {
                    Some(m) => {
                        for (from, to) in m {
                            let _ = writeln!(human, "#   {from} -> {to}");
                        }
                    }
                    None => {
                        let _ = writeln!(human, "# no relaxation found: {}", report.message);
                    }
                }
                json["lemma"] = json!({
                    "next": report.next,
                    "hypothesis_holds": report.hypothesis_holds,
                    "speedup_labels": report.speedup_labels,
                    "dictionary": report.dictionary,
                    "mapping": report.mapping,
                    "message": report.message,
                });
                return Ok(Report { json, human, passed: report.success() });
            }
            Ok(Report::ok(json, human))
        }
        Command::Certify { delta, max_t, out } => {
            let cert = build_certificate(*delta, *max_t, &opts).map_err(|e| match e {
                CertificateError::Engine(e) => CliError::from(e),
                other => CliError::Usage(other.to_string()),
            })?;
            let text = cert.to_json();
            let summary = match cert.rounds_exceeded() {
                Some(t) => format!("delta {delta}: white algorithms need more than {t} rounds"),
                None => format!("delta {delta}: no lower bound"),
            };
            match out {
                Some(path) => {
                    std::fs::write(path, &text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                    let json = json!({ "file": path, "digest": cert.digest, "rounds_exceeded": cert.rounds_exceeded() });
                    Ok(Report::ok(json, format!("{summary}\nwrote {}\n", path.display())))
                }
                None => {
                    tracing::info!("{summary}");
                    let json: Value = serde_json::from_str(&text).expect("certificate is JSON");
                    Ok(Report::ok(json, text + "\n"))
                }
            }
        }
        Command::VerifyCert { file } => {
            let text = read_input(file)?;
            match verify_certificate(&text) {
                Ok(claim) => {
                    let human = format!("ok: {}\n", claim.statement);
                    Ok(Report::ok(json!({ "valid": true, "claim": claim }), human))
                }
                Err(e) => Ok(Report {
                    json: json!({ "valid": false, "error": e.to_string() }),
                    human: format!("rejected: {e}\n"),
                    passed: false,
                }),
            }
        }
        Command::Sim(sim) => run_sim(sim),
        Command::Bounds { delta, t, p, n } => Ok(bounds(*delta, *t, *p, *n)),
    }
}

fn render_poset(report: &PosetReport, side: Side) -> String {
    let name = if side == Side::Active { "active" } else { "passive" };
    let mut s = format!("# strength order ({name} side), y above x when y may replace x\n");
    let _ = writeln!(
        s,
        "#   classes: {}",
        report.classes.iter().map(|c| format!("{{{}}}", c.join(" "))).collect::<Vec<_>>().join(" ")
    );
    for (lo, hi) in &report.hasse {
        let _ = writeln!(s, "#     {lo} < {hi}");
    }
    s
}

fn instance(i: &Instance) -> Result<PortGraph, CliError> {
    Ok(gen_instance(i.kind, i.delta, i.n, i.seed)?)
}

fn check_human(report: &SolutionReport) -> String {
    format!(
        "check: {} (white {} checked, {} failed; black {} checked, {} failed)\n",
        if report.passed { "passed" } else { "FAILED" },
        report.white.checked,
        report.white.failed.len(),
        report.black.checked,
        report.black.failed.len(),
    )
}

fn run_sim(cmd: &SimCommand) -> Result<Report, CliError> {
    match cmd {
        SimCommand::Gen(i) => {
            let g = instance(i)?;
            let json = json!(g.to_json());
            Ok(Report::ok(json.clone(), format!("{json}\n")))
        }
        SimCommand::RunProposal { instance: i, labels_out } => {
            let g = instance(i)?;
            let run = run_proposal(&g);
            let labels = mm_labeling(&g, &run.matching)?;
            let p = make_pi(params(i.delta as u32, 0, 0)?);
            let report = check_solution(&p, &g, &labels)?;
            if let Some(path) = labels_out {
                std::fs::write(path, json!(labels).to_string())
                    .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            }
            let matched = run.matching.white.iter().filter(|m| m.is_some()).count();
            let passed = report.passed && run.iterations <= i.delta;
            let human = format!(
                "graph {} ({})\nmatched {matched} white nodes in {} iterations ({} rounds)\n{}",
                &g.digest()[..16],
                g.meta().unwrap_or(""),
                run.iterations,
                run.rounds_two_phase,
                check_human(&report),
            );
            let json = json!({
                "graph": g.digest(),
                "meta": g.meta(),
                "iterations": run.iterations,
                "rounds_two_phase": run.rounds_two_phase,
                "matched": matched,
                "check": report,
                "passed": passed,
            });
            Ok(Report { json, human, passed })
        }
        SimCommand::SplitMatch { instance: i, k } => {
            let g = instance(i)?;
            let k = k.unwrap_or_else(|| ceil_sqrt(i.delta));
            if k == 0 || k > i.delta {
                return Err(CliError::Usage(format!("k must be in 1..={}", i.delta)));
            }
            let (split, _) = split_nodes(&g, &uniform_parts(&g, Side::Active, k), &uniform_parts(&g, Side::Passive, k))?;
            let run = run_proposal(&split);
            let edges = run.matching.edges(&split)?;
            let km = k_matching_check(&g, &edges, k)?;
            let labels = k_matching_labeling(&g, &edges, k)?;
            let p = make_pi(params(i.delta as u32, k as u32 - 1, 0)?);
            let report = check_solution(&p, &g, &labels)?;
            let passed = km.passed && report.passed;
            let human = format!(
                "graph {} split into parts of {k}; {} edges selected in {} iterations\n{k}-matching: {} ({} over k, {} uncovered)\n{}",
                &g.digest()[..16],
                edges.len(),
                run.iterations,
                if km.passed { "passed" } else { "FAILED" },
                km.over_k.len(),
                km.uncovered.len(),
                check_human(&report),
            );
            let json = json!({
                "graph": g.digest(),
                "k": k,
                "iterations": run.iterations,
                "edges": edges.len(),
                "k_matching": km,
                "check": report,
                "passed": passed,
            });
            Ok(Report { json, human, passed })
        }
        SimCommand::Check { problem, graph, labels } => {
            let p = read_problem(problem)?;
            let g = PortGraph::from_json(&read_json::<PortGraphJson>(graph)?)?;
            let labels: Vec<String> = read_json(labels)?;
            let report = check_solution(&p, &g, &labels)?;
            let passed = report.passed;
            Ok(Report { human: check_human(&report), json: json!(report), passed })
        }
    }
}

fn bound_line(out: &mut String, name: &str, b: &ErrorBound<f64>) {
    let flags = if b.flags.is_empty() { String::new() } else { format!("  {:?}", b.flags) };
    let _ = writeln!(out, "{name:<12} 2^{:<14.6} {:<40}{flags}", b.log2, b.formula);
}

fn bounds(delta: u32, t: u32, p: Option<f64>, n: Option<u64>) -> Report {
    let mut human = String::new();
    let mut json = json!({ "delta": delta, "t": t });
    if let Some(p) = p {
        let p = ErrorBound::<f64>::from_value(p);
        let amplified = amplified_error(&p, delta);
        let iterated = iterated_error(&p, delta, t);
        let composed = compose_amplified(&p, delta, t);
        bound_line(&mut human, "p", &p);
        bound_line(&mut human, "amplified", &amplified);
        bound_line(&mut human, "composed", &composed);
        bound_line(&mut human, "closed form", &iterated);
        json["p"] = json!(p);
        json["amplified"] = json!(amplified);
        json["composed"] = json!(composed);
        json["iterated"] = json!(iterated);
    }
    let base = base_threshold::<f64>(delta);
    let multi = multi_round_threshold::<f64>(delta, t);
    let inter = intermediate_inequality::<f64>(delta, t);
    let ids = id_count_bound::<f64>(delta, t);
    bound_line(&mut human, "base", &base);
    bound_line(&mut human, "threshold", &multi.threshold);
    let _ = writeln!(human, "chain        2^{:<14.6} holds: {}", multi.chain_log2, multi.chain_holds);
    let _ = writeln!(
        human,
        "intermediate 2^{:<14.6} vs 2^{:.6}  holds: {}",
        inter.threshold_log2, inter.bound_log2, inter.holds
    );
    let _ = writeln!(
        human,
        "ids          delta^T = 2^{:.6} vs delta^delta = 2^{:.6}  smaller: {}",
        ids.neighborhood_log2, ids.n_estimate_log2, ids.neighborhood_smaller
    );
    json["base"] = json!(base);
    json["multi_round"] = json!(multi);
    json["intermediate"] = json!(inter);
    json["ids"] = json!(ids);
    if let Some(n) = n {
        let f = failure_vs_n::<f64>(delta, t, n);
        let _ = writeln!(human, "failure      2^{:<14.6} vs 1/n = 2^{:.6}  above: {}", f.threshold_log2, f.inverse_n_log2, f.holds);
        json["failure_vs_n"] = json!(f);
    }
    Report::ok(json, human)
}

/// Error text for stderr.
pub fn render_error(e: &CliError, format: Format) -> String {
    match format {
        Format::Human => format!("error: {e}"),
        Format::Json => json!({ "error": { "code": e.code(), "message": e.to_string() } }).to_string(),
    }
}
