//! Subcommand implementations. Each returns the process exit code:
//! 0 for a terminal maximal result, 1 for completed-but-not-maximal,
//! errors map through `Error::exit_code` (2 config, 3 budget, 4 oracle).

use std::sync::Arc;

use domlab_core::analyze;
use domlab_core::caps::Caps;
use domlab_core::catalog;
use domlab_core::engine::{
    self, EliminationTrace, LimitRule, Mode, Outcome, Policy, RunConfig,
};
use domlab_core::enumerate;
use domlab_core::error::{Error, Result};
use domlab_core::seq::standard_registry;
use serde_json::{json, Value as Json};

use crate::render::{table, Sink};
use crate::source;
use crate::{
    AnalyzeArgs, CatalogArgs, CatalogCmd, CheckTheoremsArgs, EnumerateArgs, InterpolateArgs,
    RunArgs, ValidateArgs,
};

pub fn run(args: &RunArgs, sink: &Sink) -> Result<u8> {
    let game = args.source.load()?;
    let mode: Mode = args.mode.parse()?;
    let policy = match args.policy.as_str() {
        "remove-all" => Policy::RemoveAll,
        "remove-one" => Policy::RemoveOne,
        "random" => Policy::RandomSubset { seed: args.seed },
        "scripted" => {
            let path = args.script.as_ref().ok_or_else(|| {
                Error::InvalidConfig("--policy scripted needs --script".into())
            })?;
            source::load_script(&game, path)?
        }
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown policy `{other}` (expected remove-all, remove-one, random, or scripted)"
            )))
        }
    };
    if args.script.is_some() && args.policy != "scripted" {
        return Err(Error::InvalidConfig("--script requires --policy scripted".into()));
    }
    let mut cfg = RunConfig::new(mode, policy);
    if let Some(n) = args.max_steps {
        cfg.budget.max_successor_steps = n;
    }
    if let Some(n) = args.max_limits {
        cfg.budget.max_limits = n;
    }
    if let Some(n) = args.window {
        cfg.budget.window = n;
    }
    if args.allow_window_certificates {
        cfg.limit_rule = LimitRule::AllowHeuristic;
    }
    match engine::run(&game, &cfg) {
        Ok(trace) => {
            deliver_trace(args, sink, &trace)?;
            let code = match trace.outcome {
                Outcome::Maximal | Outcome::ScriptEnded { maximal: true } => 0,
                _ => 1,
            };
            Ok(code)
        }
        Err(Error::BudgetExhausted { detail, partial }) => {
            if let Some(path) = &args.out {
                source::write_text(path, &jsonl_text(&partial))?;
            }
            eprintln!("budget exhausted: {detail}");
            Ok(3)
        }
        Err(e) => Err(e),
    }
}

fn jsonl_text(trace: &EliminationTrace) -> String {
    let mut text = trace.to_jsonl();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    text
}

fn outcome_tag(o: &Outcome) -> (&'static str, bool) {
    match o {
        Outcome::Maximal => ("maximal", true),
        Outcome::ScriptEnded { maximal } => ("script_ended", *maximal),
        Outcome::Truncated { .. } => ("truncated", false),
    }
}

fn deliver_trace(args: &RunArgs, sink: &Sink, trace: &EliminationTrace) -> Result<()> {
    let text = jsonl_text(trace);
    if let Some(path) = &args.out {
        source::write_text(path, &text)?;
        sink.emit(summary_json(trace), summary_lines(trace));
        return Ok(());
    }
    if sink.is_json() {
        print!("{text}");
    } else {
        for line in summary_lines(trace) {
            println!("{line}");
        }
    }
    Ok(())
}

fn summary_json(trace: &EliminationTrace) -> Json {
    let (tag, maximal) = outcome_tag(&trace.outcome);
    let last = trace.stages.last().expect("trace has stages");
    json!({
        "game": trace.game,
        "mode": trace.mode.to_string(),
        "policy": trace.policy,
        "stages": trace.stages.len() - 1,
        "final": trace.final_reduction().to_string(),
        "stage": last.stage.to_string(),
        "outcome": tag,
        "maximal": maximal,
    })
}

fn summary_lines(trace: &EliminationTrace) -> Vec<String> {
    let mut rows = vec![vec!["stage".to_string(), "removed".to_string(), "reduction".to_string()]];
    for st in &trace.stages {
        let removed: Vec<String> = trace
            .players
            .iter()
            .zip(&st.removed)
            .filter(|(_, part)| !part.is_empty())
            .map(|(p, part)| format!("{p}: {part}"))
            .collect();
        let removed = if removed.is_empty() { "-".to_string() } else { removed.join("; ") };
        rows.push(vec![st.stage.to_string(), removed, st.reduction.to_string()]);
    }
    let mut lines = table(&rows);
    let last = trace.stages.last().expect("trace has stages");
    match &trace.outcome {
        Outcome::Maximal => {
            lines.push(format!("maximal: {} at {}", trace.final_reduction(), last.stage));
        }
        Outcome::ScriptEnded { maximal } => {
            lines.push(format!(
                "script ended: {} at {} (maximal: {maximal})",
                trace.final_reduction(),
                last.stage
            ));
        }
        Outcome::Truncated { reason } => {
            lines.push(format!("truncated: {reason}"));
        }
    }
    lines
}

pub fn validate(args: &ValidateArgs, sink: &Sink) -> Result<u8> {
    let game = args.source.load()?;
    let text = source::read_text(&args.trace)?;
    let trace = EliminationTrace::from_jsonl(&text, game.registry())?;
    engine::validate_sequence(&game, &trace, !args.lenient)?;
    let (tag, maximal) = outcome_tag(&trace.outcome);
    sink.emit(
        json!({
            "valid": true,
            "game": trace.game,
            "mode": trace.mode.to_string(),
            "stages": trace.stages.len() - 1,
            "final": trace.final_reduction().to_string(),
            "outcome": tag,
            "maximal": maximal,
            "strict": !args.lenient,
        }),
        vec![format!(
            "trace valid: {} stages, final {} ({})",
            trace.stages.len() - 1,
            trace.final_reduction(),
            tag
        )],
    );
    Ok(0)
}

pub fn analyze(args: &AnalyzeArgs, sink: &Sink) -> Result<u8> {
    let game = args.source.load()?;
    let caps = Caps::from_env()?;
    if args.check == "all" && args.reduction.is_empty() {
        let doc = analyze::full_report(&game, &caps)?;
        let mut lines = Vec::new();
        if let Some(map) = doc.as_object() {
            for (name, value) in map {
                if let Some(holds) = value.get("holds").and_then(Json::as_bool) {
                    lines.push(verdict_line(name, holds, value));
                }
            }
        }
        sink.emit(doc, lines);
        return Ok(0);
    }
    let r = source::parse_reduction(&game, &args.reduction)?;
    let mut verdicts: Vec<(&str, analyze::Verdict)> = Vec::new();
    match args.check.as_str() {
        "complete" => verdicts.push(("completely_bounded", analyze::is_completely_bounded(&game, &r)?)),
        "local" => verdicts.push(("locally_bounded", analyze::is_locally_bounded(&game, &r)?)),
        "cover" => verdicts.push(("undominated_cover", analyze::property_c_at(&game, &r)?)),
        "closure-star" => {
            if args.target.is_empty() {
                return Err(Error::InvalidConfig(
                    "closure-star needs --target (one set expression per player)".into(),
                ));
            }
            let s = source::parse_reduction(&game, &args.target)?;
            verdicts.push(("closure_star", analyze::closure_star_at(&game, &r, &s)?));
        }
        "forgetful" => {
            if args.removed.is_empty() {
                return Err(Error::InvalidConfig(
                    "forgetful needs --removed (one set expression per player)".into(),
                ));
            }
            let removed = source::parse_parts(&game, &args.removed)?;
            verdicts.push(("forgetful", analyze::forgetfulness_check(&game, &r, &removed)?));
        }
        "all" => {
            verdicts.push(("completely_bounded", analyze::is_completely_bounded(&game, &r)?));
            verdicts.push(("locally_bounded", analyze::is_locally_bounded(&game, &r)?));
            verdicts.push(("undominated_cover", analyze::property_c_at(&game, &r)?));
        }
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown check `{other}` (expected complete, local, cover, closure-star, \
                 forgetful, or all)"
            )))
        }
    }
    let mut checks = serde_json::Map::new();
    let mut lines = vec![format!("reduction: {r}")];
    for (name, verdict) in &verdicts {
        let doc = verdict.to_json(&game);
        lines.push(verdict_line(name, verdict.holds, &doc));
        checks.insert((*name).to_string(), doc);
    }
    sink.emit(
        json!({
            "game": game.name(),
            "reduction": r.to_string(),
            "checks": Json::Object(checks),
        }),
        lines,
    );
    Ok(0)
}

fn verdict_line(name: &str, holds: bool, doc: &Json) -> String {
    if holds {
        return format!("{name}: holds");
    }
    let note = doc.get("scope_note").and_then(Json::as_str).unwrap_or("");
    let witness = doc
        .get("witness")
        .and_then(|w| {
            let player = w.get("player")?.as_str()?;
            let strategy = w.get("strategy")?.as_str()?;
            Some(format!(" [witness {player} = {strategy}]"))
        })
        .unwrap_or_default();
    format!("{name}: FAILS — {note}{witness}")
}

pub fn enumerate(args: &EnumerateArgs, sink: &Sink) -> Result<u8> {
    let game = args.source.load()?;
    let mode: Mode = args.mode.parse()?;
    let caps = Caps::from_env()?;
    let class = enumerate::enumerate_sequences(&game, mode, &caps)?;
    if let Some(path) = &args.out {
        source::write_text(path, &(class.to_json(&game).to_string() + "\n"))?;
    }
    let maximal: Vec<String> =
        class.maximal_reductions().iter().map(|r| r.to_string()).collect();
    let mut lines = vec![
        format!("sequences: {}", class.sequences.len()),
        format!("reachable reductions: {}", class.nodes.len()),
    ];
    for m in &maximal {
        lines.push(format!("maximal: {m}"));
    }
    sink.emit(
        json!({
            "game": game.name(),
            "mode": mode.to_string(),
            "sequences": class.sequences.len(),
            "reductions": class.nodes.len(),
            "maximal": maximal,
        }),
        lines,
    );
    Ok(0)
}

pub fn check_theorems(args: &CheckTheoremsArgs, sink: &Sink) -> Result<u8> {
    let caps = Caps::from_env()?;
    if let Some(count) = args.seeds {
        let reg = Arc::new(standard_registry());
        let mut failures = Vec::new();
        let mut assertions = 0usize;
        for seed in args.seed_start..args.seed_start + count {
            let game = enumerate::random_small_game(seed, Arc::clone(&reg))?;
            let report = enumerate::check_theorems(&game, &caps)?;
            assertions += report.assertions.len();
            if !report.all_pass() {
                failures.push((seed, report));
            }
        }
        let pass = failures.is_empty();
        let mut lines = vec![format!(
            "checked {count} random games ({assertions} assertions): {}",
            if pass { "all hold" } else { "FAILURES" }
        )];
        let docs: Vec<Json> = failures
            .iter()
            .map(|(seed, report)| {
                lines.push(format!("seed {seed}: {}", failed_ids(report).join(", ")));
                json!({"seed": seed, "report": report.to_json()})
            })
            .collect();
        sink.emit(
            json!({
                "games": count,
                "seed_start": args.seed_start,
                "assertions": assertions,
                "all_pass": pass,
                "failures": docs,
            }),
            lines,
        );
        return Ok(if pass { 0 } else { 1 });
    }
    let game = args.source.load()?;
    let report = enumerate::check_theorems(&game, &caps)?;
    let mut rows = vec![vec!["assertion".to_string(), "status".to_string()]];
    for a in &report.assertions {
        rows.push(vec![a.id.clone(), if a.pass { "ok".into() } else { format!("FAIL: {}", a.detail) }]);
    }
    sink.emit(report.to_json(), table(&rows));
    Ok(if report.all_pass() { 0 } else { 1 })
}

fn failed_ids(report: &enumerate::TheoremReport) -> Vec<String> {
    report.assertions.iter().filter(|a| !a.pass).map(|a| a.id.clone()).collect()
}

pub fn catalog(args: &CatalogArgs, sink: &Sink) -> Result<u8> {
    match &args.cmd {
        CatalogCmd::List => {
            let entries = catalog::list();
            let rows: Vec<Vec<String>> = std::iter::once(vec!["id".to_string(), "summary".to_string()])
                .chain(entries.iter().map(|(id, s)| vec![(*id).to_string(), (*s).to_string()]))
                .collect();
            let docs: Vec<Json> =
                entries.iter().map(|(id, s)| json!({"id": id, "summary": s})).collect();
            sink.emit(json!({ "entries": docs }), table(&rows));
            Ok(0)
        }
        CatalogCmd::Verify { id } => {
            let caps = Caps::from_env()?;
            let ids: Vec<&str> = if id == "all" {
                catalog::IDS.to_vec()
            } else {
                vec![id.as_str()]
            };
            let mut pass = true;
            let mut docs = Vec::new();
            let mut lines = Vec::new();
            for id in ids {
                let report = catalog::verify(id, &caps)?;
                pass &= report.all_pass();
                lines.push(format!(
                    "{id}: {}",
                    if report.all_pass() { "ok" } else { "FAIL" }
                ));
                for c in &report.checks {
                    lines.push(format!(
                        "  {} {} — {}",
                        if c.pass { "ok  " } else { "FAIL" },
                        c.name,
                        c.detail
                    ));
                }
                docs.push(report.to_json());
            }
            let doc = if docs.len() == 1 {
                docs.into_iter().next().expect("one report")
            } else {
                json!({ "reports": docs })
            };
            sink.emit(doc, lines);
            Ok(if pass { 0 } else { 1 })
        }
    }
}

pub fn interpolate_gkz(args: &InterpolateArgs, sink: &Sink) -> Result<u8> {
    let game = args.source.load()?;
    let r = source::parse_reduction(&game, &args.from)?;
    let s = source::parse_reduction(&game, &args.to)?;
    let chain = engine::gkz_interpolate(&game, &r, &s)?;
    let steps: Vec<String> = chain.iter().map(|t| t.to_string()).collect();
    let lines: Vec<String> =
        steps.iter().enumerate().map(|(k, t)| format!("{k}: {t}")).collect();
    sink.emit(
        json!({
            "game": game.name(),
            "steps": steps.len().saturating_sub(1),
            "chain": steps,
        }),
        lines,
    );
    Ok(0)
}
