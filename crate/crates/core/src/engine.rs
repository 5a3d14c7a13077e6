//! Iterated elimination engine.
//!
//! A run produces a strictly decreasing chain of reductions indexed by
//! ordinal stages `ω·k + n`: finitely many successor steps per block, then
//! an intersection (limit) stage certified by an affine chain pattern, then
//! the next block. Finite games terminate inside block zero; infinite games
//! reach limits through pattern detection plus, where available, an
//! inductive certificate from the game's closed-form oracle.
//!
//! Three dominator scopes are supported for a step that removes `X_i` from
//! `R_i`: the current component `R_i` (nested), the full space `A_i`
//! (universal), or the survivors `R_i \ X_i` (survivor-scoped). Validation
//! is set-level: the removed set must be contained in the dominated portion
//! of itself under the step's scope. Per-strategy witnesses are recorded
//! where enumerable, as documentation rather than as the proof.

use std::fmt;
use std::str::FromStr;

use rand_chacha::rand_core::RngCore;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value as Json};

use crate::error::{Error, Result};
use crate::game::{Game, Reduction};
use crate::pattern::{chain_limit, detect_affine_pattern, Certificate, ChainPattern};
use crate::seq::SeqRegistry;
use crate::set::{SetExpr, SymbolicSet, Value};

/// Dominator scope of an elimination step.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Dominator drawn from the current component `R_i`.
    Nested,
    /// Dominator drawn from the full space `A_i`.
    Universal,
    /// Dominator drawn from the survivors `R_i \ X_i`.
    Gkz,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Nested => "nested",
            Mode::Universal => "universal",
            Mode::Gkz => "gkz",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "nested" => Ok(Mode::Nested),
            "universal" => Ok(Mode::Universal),
            "gkz" => Ok(Mode::Gkz),
            other => Err(Error::InvalidConfig(format!(
                "unknown mode `{other}` (expected nested, universal, or gkz)"
            ))),
        }
    }
}

/// Ordinal stage index `ω·block + step`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Stage {
    pub block: u64,
    pub step: u64,
}

impl Stage {
    pub const ZERO: Stage = Stage { block: 0, step: 0 };

    pub fn successor(self) -> Stage {
        Stage { block: self.block, step: self.step + 1 }
    }

    pub fn limit(self) -> Stage {
        Stage { block: self.block + 1, step: 0 }
    }

    pub fn is_limit(self) -> bool {
        self.block > 0 && self.step == 0
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.block, self.step) {
            (0, n) => write!(f, "{n}"),
            (1, 0) => f.write_str("ω"),
            (1, n) => write!(f, "ω+{n}"),
            (k, 0) => write!(f, "ω·{k}"),
            (k, n) => write!(f, "ω·{k}+{n}"),
        }
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Stage> {
        let bad = || Error::InvalidConfig(format!("unparsable stage label `{s}`"));
        let rest = s.strip_prefix("ω").or_else(|| s.strip_prefix('w'));
        let Some(rest) = rest else {
            let step: u64 = s.parse().map_err(|_| bad())?;
            return Ok(Stage { block: 0, step });
        };
        let (block, tail) = if let Some(r) = rest.strip_prefix('·').or_else(|| rest.strip_prefix('*')) {
            let end = r.find('+').unwrap_or(r.len());
            let block: u64 = r[..end].parse().map_err(|_| bad())?;
            (block, &r[end..])
        } else {
            (1, rest)
        };
        if block == 0 {
            return Err(bad());
        }
        let step = match tail.strip_prefix('+') {
            None if tail.is_empty() => 0,
            None => return Err(bad()),
            Some(n) => n.parse().map_err(|_| bad())?,
        };
        Ok(Stage { block, step })
    }
}

/// How a run chooses what to remove at each successor stage.
#[derive(Clone, Debug)]
pub enum Policy {
    /// Remove every removable strategy of every player at once.
    RemoveAll,
    /// Remove one strategy per stage: the first removable one of the first
    /// player that has any, in declared strategy order.
    RemoveOne,
    /// Follow an explicit list of per-player removal sets.
    Scripted { stages: Vec<Vec<SymbolicSet>> },
    /// Remove a random nonempty subset of the removable strategies.
    /// Deterministic per seed. Finite games only.
    RandomSubset { seed: u64 },
}

impl Policy {
    pub fn describe(&self) -> String {
        match self {
            Policy::RemoveAll => "remove-all".into(),
            Policy::RemoveOne => "remove-one".into(),
            Policy::Scripted { stages } => format!("scripted({} stages)", stages.len()),
            Policy::RandomSubset { seed } => format!("random(seed={seed})"),
        }
    }
}

/// Hard limits on a run.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Budget {
    /// Successor steps allowed inside one block before a limit is forced.
    pub max_successor_steps: u64,
    /// Limit stages allowed in total.
    pub max_limits: u64,
    /// Trailing stages inspected by pattern detection.
    pub window: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_successor_steps: 64, max_limits: 4, window: 6 }
    }
}

/// Whether a limit may rest on a pattern that is only verified on the
/// observed window, without an inductive certificate from the game.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitRule {
    Strict,
    AllowHeuristic,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub mode: Mode,
    pub policy: Policy,
    pub budget: Budget,
    pub limit_rule: LimitRule,
}

impl RunConfig {
    pub fn new(mode: Mode, policy: Policy) -> Self {
        RunConfig { mode, policy, budget: Budget::default(), limit_rule: LimitRule::Strict }
    }
}

/// Supplementary per-removal evidence recorded in traces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A single removed strategy and one concrete dominator for it.
    Strategy { player: String, removed: Value, dominator: Value },
    /// A removed set described by a dominator rule instead of element
    /// witnesses (infinite removals).
    Rule { player: String, removed: String, rule: String },
}

#[derive(Clone, Debug)]
pub struct TraceStage {
    pub stage: Stage,
    /// Reduction after this stage.
    pub reduction: Reduction,
    /// What this stage removed from the previous reduction, per player.
    pub removed: Vec<SymbolicSet>,
    pub witnesses: Vec<Witness>,
    /// Present exactly on limit stages.
    pub certificate: Option<ChainPattern>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    /// No legal nonempty step exists at the final reduction.
    Maximal,
    /// The scripted stages ran out.
    ScriptEnded { maximal: bool },
    /// The run stopped early; only appears inside a budget error.
    Truncated { reason: String },
}

#[derive(Clone, Debug)]
pub struct EliminationTrace {
    pub game: String,
    pub mode: Mode,
    pub policy: String,
    pub players: Vec<String>,
    pub stages: Vec<TraceStage>,
    pub outcome: Outcome,
}

impl EliminationTrace {
    pub fn final_reduction(&self) -> &Reduction {
        &self.stages.last().expect("trace has at least the initial stage").reduction
    }

    /// One JSON object per line: a header, each stage, then the outcome.
    pub fn to_jsonl(&self) -> String {
        let mut lines = Vec::with_capacity(self.stages.len() + 2);
        lines.push(
            json!({
                "type": "header",
                "game": self.game,
                "mode": self.mode,
                "policy": self.policy,
                "players": self.players,
            })
            .to_string(),
        );
        for st in &self.stages {
            let mut obj = Map::new();
            obj.insert("type".into(), json!("stage"));
            obj.insert("stage".into(), json!(st.stage.to_string()));
            obj.insert("block".into(), json!(st.stage.block));
            obj.insert("step".into(), json!(st.stage.step));
            obj.insert("removed".into(), self.part_map(&st.removed));
            obj.insert("reduction".into(), self.part_map(st.reduction.parts()));
            obj.insert(
                "witnesses".into(),
                serde_json::to_value(&st.witnesses).expect("witnesses serialize"),
            );
            if let Some(cert) = &st.certificate {
                obj.insert(
                    "certificate".into(),
                    serde_json::to_value(cert).expect("pattern serializes"),
                );
            }
            lines.push(Json::Object(obj).to_string());
        }
        let mut outcome =
            serde_json::to_value(&self.outcome).expect("outcome serializes");
        let obj = outcome.as_object_mut().expect("outcome is an object");
        let mut line = Map::new();
        line.insert("type".into(), json!("outcome"));
        line.append(obj);
        lines.push(Json::Object(line).to_string());
        lines.join("\n") + "\n"
    }

    fn part_map(&self, parts: &[SymbolicSet]) -> Json {
        let mut map = Map::new();
        for (p, s) in self.players.iter().zip(parts) {
            map.insert(p.clone(), serde_json::to_value(s).expect("set serializes"));
        }
        Json::Object(map)
    }

    pub fn from_jsonl(input: &str, reg: &SeqRegistry) -> Result<EliminationTrace> {
        let mut header: Option<(String, Mode, String, Vec<String>)> = None;
        let mut stages: Vec<TraceStage> = Vec::new();
        let mut outcome: Option<Outcome> = None;
        for (lineno, line) in input.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let doc: Json = serde_json::from_str(line)?;
            let kind = doc
                .get("type")
                .and_then(|t| t.as_str())
                .ok_or_else(|| bad_line(lineno, "missing `type`"))?;
            match kind {
                "header" => {
                    let game = str_field(&doc, "game", lineno)?;
                    let mode: Mode = str_field(&doc, "mode", lineno)?.parse()?;
                    let policy = str_field(&doc, "policy", lineno)?;
                    let players: Vec<String> =
                        serde_json::from_value(field(&doc, "players", lineno)?.clone())?;
                    header = Some((game, mode, policy, players));
                }
                "stage" => {
                    let (_, _, _, players) = header
                        .as_ref()
                        .ok_or_else(|| bad_line(lineno, "stage before header"))?;
                    let block = field(&doc, "block", lineno)?
                        .as_u64()
                        .ok_or_else(|| bad_line(lineno, "`block` must be an integer"))?;
                    let step = field(&doc, "step", lineno)?
                        .as_u64()
                        .ok_or_else(|| bad_line(lineno, "`step` must be an integer"))?;
                    let removed =
                        parts_from_map(field(&doc, "removed", lineno)?, players, reg, lineno)?;
                    let reduction =
                        parts_from_map(field(&doc, "reduction", lineno)?, players, reg, lineno)?;
                    let witnesses: Vec<Witness> =
                        serde_json::from_value(field(&doc, "witnesses", lineno)?.clone())?;
                    let certificate: Option<ChainPattern> = match doc.get("certificate") {
                        None | Some(Json::Null) => None,
                        Some(v) => Some(serde_json::from_value(v.clone())?),
                    };
                    stages.push(TraceStage {
                        stage: Stage { block, step },
                        reduction: Reduction::new(reduction),
                        removed,
                        witnesses,
                        certificate,
                    });
                }
                "outcome" => {
                    outcome = Some(serde_json::from_value(doc)?);
                }
                other => return Err(bad_line(lineno, &format!("unknown line type `{other}`"))),
            }
        }
        let (game, mode, policy, players) =
            header.ok_or_else(|| Error::InvalidConfig("trace has no header line".into()))?;
        if stages.is_empty() {
            return Err(Error::InvalidConfig("trace has no stages".into()));
        }
        Ok(EliminationTrace {
            game,
            mode,
            policy,
            players,
            stages,
            outcome: outcome
                .ok_or_else(|| Error::InvalidConfig("trace has no outcome line".into()))?,
        })
    }
}

fn bad_line(lineno: usize, detail: &str) -> Error {
    Error::InvalidConfig(format!("trace line {}: {detail}", lineno + 1))
}

fn field<'a>(doc: &'a Json, name: &str, lineno: usize) -> Result<&'a Json> {
    doc.get(name).ok_or_else(|| bad_line(lineno, &format!("missing `{name}`")))
}

fn str_field(doc: &Json, name: &str, lineno: usize) -> Result<String> {
    field(doc, name, lineno)?
        .as_str()
        .map(String::from)
        .ok_or_else(|| bad_line(lineno, &format!("`{name}` must be a string")))
}

fn parts_from_map(
    doc: &Json,
    players: &[String],
    reg: &SeqRegistry,
    lineno: usize,
) -> Result<Vec<SymbolicSet>> {
    let obj = doc
        .as_object()
        .ok_or_else(|| bad_line(lineno, "expected a player-keyed object"))?;
    let mut parts = Vec::with_capacity(players.len());
    for p in players {
        match obj.get(p) {
            None => parts.push(SymbolicSet::empty()),
            Some(node) => {
                let expr: SetExpr = serde_json::from_value(node.clone())?;
                parts.push(expr.resolve(reg)?);
            }
        }
    }
    Ok(parts)
}

// ---------------------------------------------------------------------------
// Steps

fn scope_for(
    game: &Game,
    mode: Mode,
    r: &Reduction,
    player: usize,
    removed: &SymbolicSet,
) -> Result<SymbolicSet> {
    match mode {
        Mode::Nested => Ok(r.part(player).clone()),
        Mode::Universal => Ok(game.space(player).clone()),
        Mode::Gkz => r.part(player).difference(removed, game.registry()),
    }
}

fn illegal(player: &str, strategy: impl fmt::Display, mode: Mode, detail: &str) -> Error {
    Error::IllegalStep {
        player: player.into(),
        strategy: strategy.to_string(),
        mode: mode.to_string(),
        detail: detail.into(),
    }
}

/// Checks that removing `removed[i]` from each `r_i` is one legal stage in
/// `mode`, and collects witnesses. Does not apply the removal.
pub fn validate_step(
    game: &Game,
    mode: Mode,
    r: &Reduction,
    removed: &[SymbolicSet],
) -> Result<Vec<Witness>> {
    let reg = game.registry();
    if removed.len() != game.num_players() {
        return Err(Error::InvalidConfig(format!(
            "step specifies {} players, game has {}",
            removed.len(),
            game.num_players()
        )));
    }
    if removed.iter().all(|x| x.is_empty()) {
        return Err(illegal("-", "-", mode, "a stage must remove at least one strategy"));
    }
    let mut witnesses = Vec::new();
    for (i, x) in removed.iter().enumerate() {
        if x.is_empty() {
            continue;
        }
        let player = &game.players()[i];
        let stray = x.difference(r.part(i), reg)?;
        if let Some(w) = stray.witness_value(reg)? {
            return Err(illegal(player, &w, mode, "not in the current reduction"));
        }
        let scope = scope_for(game, mode, r, i, x)?;
        let dominated = game.dominated_elements(i, x, &scope, r)?;
        let bad = x.difference(&dominated, reg)?;
        if let Some(w) = bad.witness_value(reg)? {
            return Err(illegal(
                player,
                &w,
                mode,
                "no dominator in the step's scope",
            ));
        }
        collect_witnesses(game, i, x, &scope, r, &mut witnesses)?;
    }
    Ok(witnesses)
}

fn collect_witnesses(
    game: &Game,
    player: usize,
    removed: &SymbolicSet,
    scope: &SymbolicSet,
    r: &Reduction,
    out: &mut Vec<Witness>,
) -> Result<()> {
    let name = game.players()[player].clone();
    if let Some(values) = removed.enumerate_values() {
        for a in values {
            match game.dominator_witness(player, &a, scope, r) {
                Ok(dominator) => {
                    out.push(Witness::Strategy { player: name.clone(), removed: a, dominator })
                }
                // Validation already proved set-level domination.
                Err(_) => out.push(Witness::Rule {
                    player: name.clone(),
                    removed: a.to_string(),
                    rule: "dominated within scope (set-level check)".into(),
                }),
            }
        }
        return Ok(());
    }
    for prim in removed.prims() {
        let rule = game
            .analytic_oracle()
            .and_then(|o| o.removal_rule(player, &prim, r))
            .unwrap_or_else(|| "dominated within scope (set-level check)".into());
        out.push(Witness::Rule { player: name.clone(), removed: prim.to_string(), rule });
    }
    Ok(())
}

/// Validates and applies one stage, returning the shrunk reduction.
pub fn step(
    game: &Game,
    mode: Mode,
    r: &Reduction,
    removed: &[SymbolicSet],
) -> Result<(Reduction, Vec<Witness>)> {
    let witnesses = validate_step(game, mode, r, removed)?;
    let reg = game.registry();
    let parts = r
        .parts()
        .iter()
        .zip(removed)
        .map(|(part, x)| part.difference(x, reg))
        .collect::<Result<Vec<_>>>()?;
    Ok((Reduction::new(parts), witnesses))
}

/// Whether no legal nonempty stage exists at `r`. The empty reduction is
/// maximal in every mode. Survivor-scoped singleton steps legalize exactly
/// the nested removals, so survivor-scope maximality coincides with nested.
pub fn is_maximal(game: &Game, mode: Mode, r: &Reduction) -> Result<bool> {
    if r.is_empty() {
        return Ok(true);
    }
    for i in 0..game.num_players() {
        let scope = match mode {
            Mode::Universal => game.space(i),
            Mode::Nested | Mode::Gkz => r.part(i),
        };
        let removable = game.dominated_elements(i, r.part(i), scope, r)?;
        if !removable.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Per-player removable sets at `r`: everything with a dominator in the
/// mode's scope (survivor scope is probed with the nested scope, which is
/// what singleton legalization makes removable).
fn removable_sets(game: &Game, mode: Mode, r: &Reduction) -> Result<Vec<SymbolicSet>> {
    (0..game.num_players())
        .map(|i| {
            let scope = match mode {
                Mode::Universal => game.space(i),
                Mode::Nested | Mode::Gkz => r.part(i),
            };
            game.dominated_elements(i, r.part(i), scope, r)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Runs

struct Runner<'g> {
    game: &'g Game,
    cfg: RunConfig,
    rng: Option<rand_chacha::ChaCha20Rng>,
    script_cursor: usize,
}

impl<'g> Runner<'g> {
    fn new(game: &'g Game, cfg: RunConfig) -> Result<Self> {
        if cfg.budget.window < 3 {
            return Err(Error::InvalidConfig("pattern window must be at least 3".into()));
        }
        // Finite games never reach a limit, so the window constraint only
        // binds when pattern detection can actually run.
        if !game.is_finite() && (cfg.budget.max_successor_steps as usize) < cfg.budget.window {
            return Err(Error::InvalidConfig(
                "successor budget must cover the pattern window".into(),
            ));
        }
        let rng = match cfg.policy {
            Policy::RandomSubset { seed } => {
                use rand_chacha::rand_core::SeedableRng;
                Some(rand_chacha::ChaCha20Rng::seed_from_u64(seed))
            }
            _ => None,
        };
        Ok(Runner { game, cfg, rng, script_cursor: 0 })
    }

    /// Next stage's removal sets, or `None` when the policy is done.
    fn next_removals(&mut self, r: &Reduction) -> Result<Option<Vec<SymbolicSet>>> {
        let game = self.game;
        let mode = self.cfg.mode;
        let reg = game.registry();
        match &self.cfg.policy {
            Policy::Scripted { stages } => {
                if self.script_cursor >= stages.len() {
                    return Ok(None);
                }
                let stage = stages[self.script_cursor].clone();
                self.script_cursor += 1;
                if stage.len() != game.num_players() {
                    return Err(Error::InvalidConfig(format!(
                        "scripted stage {} specifies {} players, game has {}",
                        self.script_cursor,
                        stage.len(),
                        game.num_players()
                    )));
                }
                Ok(Some(stage))
            }
            Policy::RemoveAll => {
                let removable = removable_sets(game, mode, r)?;
                if removable.iter().all(|d| d.is_empty()) {
                    return Ok(None);
                }
                if mode == Mode::Gkz {
                    // The full removable set is only legal if survivors
                    // still dominate all of it.
                    for (i, d) in removable.iter().enumerate() {
                        if d.is_empty() {
                            continue;
                        }
                        let survivors = r.part(i).difference(d, reg)?;
                        let covered = game.dominated_elements(i, d, &survivors, r)?;
                        if !d.difference(&covered, reg)?.is_empty() {
                            return Err(Error::UnsupportedCombination(format!(
                                "remove-all has no canonical survivor-scoped step for player {}",
                                game.players()[i]
                            )));
                        }
                    }
                }
                Ok(Some(removable))
            }
            Policy::RemoveOne => {
                let removable = removable_sets(game, mode, r)?;
                for (i, d) in removable.iter().enumerate() {
                    if d.is_empty() {
                        continue;
                    }
                    if !d.is_finite() {
                        return Err(Error::UnsupportedCombination(
                            "remove-one requires a finite removable set".into(),
                        ));
                    }
                    let first = self.game.ordered_members(i, d)?.remove(0);
                    let mut removed = vec![SymbolicSet::empty(); game.num_players()];
                    removed[i] = SymbolicSet::singleton(&first);
                    return Ok(Some(removed));
                }
                Ok(None)
            }
            Policy::RandomSubset { .. } => {
                // Needs enumerable removable sets; works for finite games
                // and for infinite games whose removable sets are finite.
                let removable = removable_sets(game, mode, r)?;
                let mut pool: Vec<(usize, Value)> = Vec::new();
                for (i, d) in removable.iter().enumerate() {
                    if d.is_empty() {
                        continue;
                    }
                    for v in game.ordered_members(i, d)? {
                        pool.push((i, v));
                    }
                }
                if pool.is_empty() {
                    return Ok(None);
                }
                let rng = self.rng.as_mut().expect("rng initialized for random policy");
                let mut chosen: Vec<bool> = vec![false; pool.len()];
                for _ in 0..64 {
                    for slot in chosen.iter_mut() {
                        *slot = rng.next_u64() & 1 == 1;
                    }
                    if chosen.iter().any(|&c| c) {
                        break;
                    }
                }
                if !chosen.iter().any(|&c| c) {
                    chosen[0] = true;
                }
                let mut per_player: Vec<Vec<Value>> = vec![Vec::new(); game.num_players()];
                for (keep, (i, v)) in chosen.iter().zip(pool) {
                    if *keep {
                        per_player[i].push(v);
                    }
                }
                let removed = per_player
                    .iter()
                    .map(|vs| SymbolicSet::from_values(vs, reg))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Some(removed))
            }
        }
    }
}

/// Runs iterated elimination from the full strategy space.
pub fn run(game: &Game, cfg: &RunConfig) -> Result<EliminationTrace> {
    let mut runner = Runner::new(game, cfg.clone())?;
    let reg = game.registry();
    let n = game.num_players();
    let mut r = game.full_reduction();
    let mut stage = Stage::ZERO;
    let mut stages = vec![TraceStage {
        stage,
        reduction: r.clone(),
        removed: vec![SymbolicSet::empty(); n],
        witnesses: Vec::new(),
        certificate: None,
    }];
    let mut history: Vec<Vec<SymbolicSet>> = vec![r.parts().to_vec()];

    let truncate = |stages: Vec<TraceStage>, reason: String| -> Error {
        let partial = EliminationTrace {
            game: game.name().into(),
            mode: cfg.mode,
            policy: cfg.policy.describe(),
            players: game.players().to_vec(),
            stages,
            outcome: Outcome::Truncated { reason: reason.clone() },
        };
        Error::BudgetExhausted { detail: reason, partial: Box::new(partial) }
    };

    let outcome = loop {
        if r.is_empty() {
            break Outcome::Maximal;
        }
        match runner.next_removals(&r)? {
            None => match &cfg.policy {
                Policy::Scripted { .. } => {
                    break Outcome::ScriptEnded { maximal: is_maximal(game, cfg.mode, &r)? }
                }
                _ => break Outcome::Maximal,
            },
            Some(removed) => {
                let witnesses = validate_step(game, cfg.mode, &r, &removed)?;
                let parts = r
                    .parts()
                    .iter()
                    .zip(&removed)
                    .map(|(part, x)| part.difference(x, reg))
                    .collect::<Result<Vec<_>>>()?;
                r = Reduction::new(parts);
                stage = stage.successor();
                stages.push(TraceStage {
                    stage,
                    reduction: r.clone(),
                    removed,
                    witnesses,
                    certificate: None,
                });
                history.push(r.parts().to_vec());
            }
        }
        if stage.step < cfg.budget.max_successor_steps {
            continue;
        }
        // Block is full: either the chain is about to end anyway, or a
        // limit stage is required.
        if is_maximal(game, cfg.mode, &r)? {
            break Outcome::Maximal;
        }
        if game.is_finite() {
            return Err(truncate(
                stages,
                "successor budget exhausted on a finite game".into(),
            ));
        }
        if stage.block >= cfg.budget.max_limits {
            return Err(truncate(stages, "limit budget exhausted".into()));
        }
        let Some(mut pattern) = detect_affine_pattern(&history, cfg.budget.window, reg)? else {
            return Err(truncate(
                stages,
                "no affine pattern in the trailing window".into(),
            ));
        };
        let inductive =
            game.analytic_oracle().map(|o| o.certify_pattern(&pattern)).unwrap_or(false);
        if inductive {
            pattern.certificate = Certificate::Inductive;
        } else if cfg.limit_rule == LimitRule::Strict {
            return Err(truncate(
                stages,
                "chain pattern lacks an inductive certificate".into(),
            ));
        }
        let limit_parts = chain_limit(&pattern, reg)?;
        let limit_r = Reduction::new(limit_parts);
        if !limit_r.is_subset(&r, reg)? {
            return Err(truncate(stages, "pattern limit escapes the chain".into()));
        }
        if limit_r == r {
            return Err(truncate(stages, "pattern limit reproduces the current reduction".into()));
        }
        let removed: Vec<SymbolicSet> = r
            .parts()
            .iter()
            .zip(limit_r.parts())
            .map(|(prev, lim)| {
                prev.difference(lim, reg).unwrap_or_else(|_| SymbolicSet::empty())
            })
            .collect();
        stage = stage.limit();
        r = limit_r;
        stages.push(TraceStage {
            stage,
            reduction: r.clone(),
            removed,
            witnesses: Vec::new(),
            certificate: Some(pattern),
        });
        history = vec![r.parts().to_vec()];
    };

    Ok(EliminationTrace {
        game: game.name().into(),
        mode: cfg.mode,
        policy: cfg.policy.describe(),
        players: game.players().to_vec(),
        stages,
        outcome,
    })
}

// ---------------------------------------------------------------------------
// Sequence validation

/// Replays a trace against the game, checking every successor stage's
/// dominance, every limit stage's certificate, and the claimed outcome.
/// `strict` rejects window-only limit certificates.
pub fn validate_sequence(game: &Game, trace: &EliminationTrace, strict: bool) -> Result<()> {
    let reg = game.registry();
    let invalid = |stage: Stage, detail: String| Error::InvalidSequence {
        id: stage.to_string(),
        detail,
    };
    if trace.players != game.players() {
        return Err(Error::InvalidSequence {
            id: "header".into(),
            detail: "player list does not match the game".into(),
        });
    }
    let first = &trace.stages[0];
    if first.stage != Stage::ZERO {
        return Err(invalid(first.stage, "the chain must start at stage 0".into()));
    }
    if first.reduction != game.full_reduction() {
        return Err(invalid(
            first.stage,
            "stage 0 must be the full strategy space".into(),
        ));
    }

    for w in 1..trace.stages.len() {
        let prev = &trace.stages[w - 1];
        let cur = &trace.stages[w];
        if cur.stage == prev.stage.successor() {
            validate_step(game, trace.mode, &prev.reduction, &cur.removed).map_err(|e| {
                match e {
                    Error::IllegalStep { .. } => invalid(cur.stage, e.to_string()),
                    other => other,
                }
            })?;
            let parts = prev
                .reduction
                .parts()
                .iter()
                .zip(&cur.removed)
                .map(|(part, x)| part.difference(x, reg))
                .collect::<Result<Vec<_>>>()?;
            if Reduction::new(parts) != cur.reduction {
                return Err(invalid(
                    cur.stage,
                    "declared reduction does not match the removal".into(),
                ));
            }
        } else if cur.stage == prev.stage.limit() {
            let Some(pattern) = &cur.certificate else {
                return Err(invalid(cur.stage, "limit stage without a pattern certificate".into()));
            };
            match pattern.certificate {
                Certificate::Inductive => {
                    let confirmed = game
                        .analytic_oracle()
                        .map(|o| o.certify_pattern(pattern))
                        .unwrap_or(false);
                    if !confirmed {
                        return Err(invalid(
                            cur.stage,
                            "inductive certificate rejected by the game".into(),
                        ));
                    }
                }
                Certificate::WindowOnly => {
                    if strict {
                        return Err(invalid(
                            cur.stage,
                            "window-only certificate in strict validation".into(),
                        ));
                    }
                }
            }
            // Replay the pattern against the listed block, aligned to its
            // end like the detector.
            let block: Vec<&TraceStage> = trace.stages[..w]
                .iter()
                .filter(|s| s.stage.block == prev.stage.block)
                .collect();
            let span = pattern
                .stride
                .checked_mul(pattern.verified_window - 1)
                .and_then(|s| s.checked_add(1))
                .ok_or_else(|| invalid(cur.stage, "degenerate pattern geometry".into()))?;
            if pattern.verified_window < 3 || block.len() < span {
                return Err(invalid(
                    cur.stage,
                    "certificate window exceeds the listed block".into(),
                ));
            }
            for t in 0..pattern.verified_window {
                let idx = block.len() - 1 - pattern.stride * (pattern.verified_window - 1 - t);
                let expect = pattern.instantiate(t as i64, reg)?;
                if expect != block[idx].reduction.parts() {
                    return Err(invalid(
                        cur.stage,
                        format!(
                            "certificate does not reproduce stage {}",
                            block[idx].stage
                        ),
                    ));
                }
            }
            let limit = Reduction::new(chain_limit(pattern, reg)?);
            if limit != cur.reduction {
                return Err(invalid(
                    cur.stage,
                    "declared limit does not match the certified pattern".into(),
                ));
            }
            if !cur.reduction.is_subset(&prev.reduction, reg)? {
                return Err(invalid(cur.stage, "limit is not a subset of the chain".into()));
            }
        } else {
            return Err(invalid(
                cur.stage,
                format!("stage does not follow {} by successor or limit", prev.stage),
            ));
        }
    }

    let last = trace.stages.last().expect("nonempty");
    match &trace.outcome {
        Outcome::Maximal => {
            if !is_maximal(game, trace.mode, &last.reduction)? {
                return Err(invalid(last.stage, "final reduction is not maximal".into()));
            }
        }
        Outcome::ScriptEnded { maximal } => {
            if is_maximal(game, trace.mode, &last.reduction)? != *maximal {
                return Err(invalid(
                    last.stage,
                    "maximality claim does not match the final reduction".into(),
                ));
            }
        }
        Outcome::Truncated { .. } => {}
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Survivor-scope interpolation

/// Expands one universal elimination step `r -> s` into a chain of
/// survivor-scoped (gkz) steps from `r` to `s`.
///
/// Each intermediate step removes the part of the remaining excess that is
/// dominated by elements that survive it; the loop fails if no such step
/// can advance, which happens exactly when the universal step used
/// dominators that survivor scoping can never recover.
pub fn gkz_interpolate(game: &Game, r: &Reduction, s: &Reduction) -> Result<Vec<Reduction>> {
    let reg = game.registry();
    if s.parts().len() != r.parts().len() || r.parts().len() != game.num_players() {
        return Err(Error::InvalidConfig("reduction arity does not match the game".into()));
    }
    if !s.is_subset(r, reg)? {
        return Err(Error::InvalidConfig("target is not a subset of the source".into()));
    }
    if r == s || r.is_empty() {
        return Ok(vec![r.clone()]);
    }
    // The pair must be one legal universal stage. An empty target is one
    // step away as soon as some player's entire part is dominated in space
    // scope: removing that part empties the whole product by normalization.
    if s.is_empty() {
        let mut blocked = None;
        for i in 0..game.num_players() {
            let dominated = game.dominated_elements(i, r.part(i), game.space(i), r)?;
            match r.part(i).difference(&dominated, reg)?.witness_value(reg)? {
                None => {
                    blocked = None;
                    break;
                }
                Some(w) if blocked.is_none() => blocked = Some((i, w)),
                Some(_) => {}
            }
        }
        if let Some((i, w)) = blocked {
            return Err(illegal(
                &game.players()[i],
                &w,
                Mode::Universal,
                "source and target are not one universal step apart",
            ));
        }
    } else {
        for i in 0..game.num_players() {
            let x = r.part(i).difference(s.part(i), reg)?;
            if x.is_empty() {
                continue;
            }
            let dominated = game.dominated_elements(i, &x, game.space(i), r)?;
            if let Some(w) = x.difference(&dominated, reg)?.witness_value(reg)? {
                return Err(illegal(
                    &game.players()[i],
                    &w,
                    Mode::Universal,
                    "source and target are not one universal step apart",
                ));
            }
        }
    }

    let mut chain = vec![r.clone()];
    let mut t = r.clone();
    const STEP_CAP: usize = 64;
    while t != *s {
        if chain.len() > STEP_CAP {
            return Err(Error::UnsupportedCombination(
                "survivor-scoped interpolation did not converge".into(),
            ));
        }
        let mut removed = Vec::with_capacity(game.num_players());
        for i in 0..game.num_players() {
            let excess = if s.is_empty() {
                t.part(i).clone()
            } else {
                t.part(i).difference(s.part(i), reg)?
            };
            if excess.is_empty() {
                removed.push(SymbolicSet::empty());
                continue;
            }
            // Start from everything dominated inside the component, then
            // shrink until survivors cover the removal.
            let mut x = game.dominated_elements(i, &excess, t.part(i), &t)?;
            for _ in 0..8 {
                if x.is_empty() {
                    break;
                }
                let survivors = t.part(i).difference(&x, reg)?;
                let covered = game.dominated_elements(i, &x, &survivors, &t)?;
                if covered == x {
                    break;
                }
                x = covered;
            }
            removed.push(x);
        }
        if removed.iter().all(|x| x.is_empty()) {
            return Err(Error::UnsupportedCombination(
                "no survivor-scoped step can advance toward the target".into(),
            ));
        }
        let (next, _) = step(game, Mode::Gkz, &t, &removed)?;
        t = next;
        chain.push(t.clone());
    }
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::load_finite_game;
    use crate::rational::Q;
    use crate::seq::standard_registry;
    use std::sync::Arc;

    fn pd_like() -> Game {
        // Both players: second strategy strictly dominates the first.
        let input = r#"{
            "name": "pd",
            "players": ["p1", "p2"],
            "strategies": {"p1": ["c", "d"], "p2": ["c", "d"]},
            "payoffs": {
                "p1": [[2, 0], [3, 1]],
                "p2": [[2, 3], [0, 1]]
            }
        }"#;
        load_finite_game(input, Arc::new(standard_registry())).unwrap()
    }

    /// 3x2 game solved in three rounds: b falls to m, then r to l, then m
    /// to t.
    fn two_round() -> Game {
        let input = r#"{
            "name": "two-round",
            "players": ["row", "col"],
            "strategies": {"row": ["t", "m", "b"], "col": ["l", "r"]},
            "payoffs": {
                "row": [[3, 0], [2, 2], [0, 0]],
                "col": [[1, 0], [1, 0], [0, 2]]
            }
        }"#;
        load_finite_game(input, Arc::new(standard_registry())).unwrap()
    }

    #[test]
    fn stage_display_and_parse() {
        for (stage, text) in [
            (Stage { block: 0, step: 0 }, "0"),
            (Stage { block: 0, step: 7 }, "7"),
            (Stage { block: 1, step: 0 }, "ω"),
            (Stage { block: 1, step: 3 }, "ω+3"),
            (Stage { block: 2, step: 0 }, "ω·2"),
            (Stage { block: 2, step: 5 }, "ω·2+5"),
        ] {
            assert_eq!(stage.to_string(), text);
            assert_eq!(text.parse::<Stage>().unwrap(), stage);
        }
        assert_eq!("w*2+5".parse::<Stage>().unwrap(), Stage { block: 2, step: 5 });
        assert!("ω·0".parse::<Stage>().is_err());
        assert!("x3".parse::<Stage>().is_err());
    }

    #[test]
    fn remove_all_solves_dominance_solvable_game() {
        let g = pd_like();
        let trace = run(&g, &RunConfig::new(Mode::Nested, Policy::RemoveAll)).unwrap();
        assert_eq!(trace.outcome, Outcome::Maximal);
        assert_eq!(trace.stages.len(), 2);
        let last = trace.final_reduction();
        assert_eq!(last.part(0).to_string(), "{d}");
        assert_eq!(last.part(1).to_string(), "{d}");
        // Witnesses name the dominator.
        let w = &trace.stages[1].witnesses[0];
        match w {
            Witness::Strategy { player, removed, dominator } => {
                assert_eq!(player, "p1");
                assert_eq!(removed.to_string(), "c");
                assert_eq!(dominator.to_string(), "d");
            }
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn two_round_elimination_orders() {
        let g = two_round();
        for mode in [Mode::Nested, Mode::Universal, Mode::Gkz] {
            let trace = run(&g, &RunConfig::new(mode, Policy::RemoveAll)).unwrap();
            assert_eq!(trace.outcome, Outcome::Maximal, "mode {mode}");
            let last = trace.final_reduction();
            assert_eq!(last.part(0).to_string(), "{t}", "mode {mode}");
            assert_eq!(last.part(1).to_string(), "{l}", "mode {mode}");
        }
        // Remove-one takes more, smaller stages but lands in the same place.
        let trace = run(&g, &RunConfig::new(Mode::Nested, Policy::RemoveOne)).unwrap();
        assert!(trace.stages.len() > 3);
        assert_eq!(trace.final_reduction().part(0).to_string(), "{t}");
        for st in &trace.stages[1..] {
            let total: usize =
                st.removed.iter().map(|x| x.finite_len().unwrap_or(0)).sum();
            assert_eq!(total, 1, "remove-one removes exactly one strategy per stage");
        }
    }

    #[test]
    fn random_policy_is_deterministic_and_converges() {
        let g = two_round();
        let cfg = |seed| RunConfig::new(Mode::Nested, Policy::RandomSubset { seed });
        let a = run(&g, &cfg(11)).unwrap();
        let b = run(&g, &cfg(11)).unwrap();
        assert_eq!(a.to_jsonl(), b.to_jsonl());
        assert_eq!(a.final_reduction().part(0).to_string(), "{t}");
        assert_eq!(a.final_reduction().part(1).to_string(), "{l}");
    }

    #[test]
    fn scripted_steps_are_validated() {
        let g = two_round();
        let reg = g.registry();
        let b = crate::set::parse_set("{b}", reg).unwrap();
        let l = crate::set::parse_set("{l}", reg).unwrap();
        let empty = SymbolicSet::empty;
        // l is not dominated while m is still present.
        let bad = RunConfig::new(
            Mode::Nested,
            Policy::Scripted { stages: vec![vec![empty(), l.clone()]] },
        );
        match run(&g, &bad) {
            Err(Error::IllegalStep { player, strategy, .. }) => {
                assert_eq!(player, "col");
                assert_eq!(strategy, "l");
            }
            other => panic!("expected illegal step, got {other:?}"),
        }
        // Removing b alone is legal but leaves a non-maximal reduction.
        let ok = RunConfig::new(
            Mode::Nested,
            Policy::Scripted { stages: vec![vec![b, empty()]] },
        );
        let trace = run(&g, &ok).unwrap();
        assert_eq!(trace.outcome, Outcome::ScriptEnded { maximal: false });
    }

    #[test]
    fn survivor_scope_rejects_stages_whose_dominator_is_removed() {
        // Chain game: u(row) ranks a < b < c against every column.
        let input = r#"{
            "name": "chain",
            "players": ["row", "col"],
            "strategies": {"row": ["a", "b", "c"], "col": ["x"]},
            "payoffs": {
                "row": [[0], [1], [2]],
                "col": [[0], [0], [0]]
            }
        }"#;
        let g = load_finite_game(input, Arc::new(standard_registry())).unwrap();
        let reg = g.registry();
        let ab = crate::set::parse_set("{a, b}", reg).unwrap();
        let empty = SymbolicSet::empty();
        // c survives the removal of {a, b} and dominates both, so this is a
        // legal survivor-scoped stage.
        let r = g.full_reduction();
        assert!(validate_step(&g, Mode::Gkz, &r, &[ab.clone(), empty.clone()]).is_ok());
        // Removing b with only-dominator c in the removal is illegal under
        // survivor scope.
        let bc = crate::set::parse_set("{b, c}", reg).unwrap();
        let err = validate_step(&g, Mode::Gkz, &r, &[bc, empty]).unwrap_err();
        match err {
            Error::IllegalStep { player, mode, .. } => {
                assert_eq!(player, "row");
                assert_eq!(mode, "gkz");
            }
            other => panic!("expected illegal step, got {other:?}"),
        }
    }

    #[test]
    fn trace_round_trips_and_validates() {
        let g = two_round();
        let trace = run(&g, &RunConfig::new(Mode::Nested, Policy::RemoveOne)).unwrap();
        let text = trace.to_jsonl();
        let back = EliminationTrace::from_jsonl(&text, g.registry()).unwrap();
        assert_eq!(back.to_jsonl(), text);
        validate_sequence(&g, &back, true).unwrap();
    }

    #[test]
    fn validation_rejects_tampered_traces() {
        let g = two_round();
        let mut trace = run(&g, &RunConfig::new(Mode::Nested, Policy::RemoveOne)).unwrap();
        // Claim an extra removal that never happened.
        let reg = g.registry();
        let t = crate::set::parse_set("{t}", reg).unwrap();
        let last = trace.stages.len() - 1;
        trace.stages[last].removed[0] =
            trace.stages[last].removed[0].union(&t, reg).unwrap();
        let err = validate_sequence(&g, &trace, true).unwrap_err();
        assert!(matches!(err, Error::InvalidSequence { .. }), "got {err:?}");
    }

    #[test]
    fn empty_reduction_is_maximal_in_every_mode() {
        let g = pd_like();
        let empty = Reduction::new(vec![SymbolicSet::empty(), SymbolicSet::empty()]);
        for mode in [Mode::Nested, Mode::Universal, Mode::Gkz] {
            assert!(is_maximal(&g, mode, &empty).unwrap());
        }
        assert!(!is_maximal(&g, Mode::Nested, &g.full_reduction()).unwrap());
    }

    #[test]
    fn interpolation_expands_a_universal_step() {
        let g = two_round();
        let reg = g.registry();
        // At the full game only b is dominated, so removing it is one
        // universal step; its dominator m survives, so one survivor-scoped
        // stage reproduces it.
        let r = g.full_reduction();
        let s = Reduction::new(vec![
            crate::set::parse_set("{t, m}", reg).unwrap(),
            r.part(1).clone(),
        ]);
        let chain = gkz_interpolate(&g, &r, &s).unwrap();
        assert_eq!(chain.len(), 2);
        assert_eq!(chain[0], r);
        assert_eq!(chain[1], s);
        // Identity interpolation.
        assert_eq!(gkz_interpolate(&g, &r, &r).unwrap().len(), 1);
    }

    #[test]
    fn interpolation_rejects_non_universal_pairs() {
        let g = two_round();
        let reg = g.registry();
        let r = g.full_reduction();
        // t is undominated; removing it is not a universal step.
        let s = Reduction::new(vec![
            crate::set::parse_set("{m, b}", reg).unwrap(),
            r.part(1).clone(),
        ]);
        let err = gkz_interpolate(&g, &r, &s).unwrap_err();
        match err {
            Error::IllegalStep { player, strategy, .. } => {
                assert_eq!(player, "row");
                assert_eq!(strategy, "t");
            }
            other => panic!("expected illegal step, got {other:?}"),
        }
    }

    #[test]
    fn budget_exhaustion_carries_the_partial_trace() {
        let g = two_round();
        let mut cfg = RunConfig::new(Mode::Nested, Policy::RemoveOne);
        // Remove-one needs three steps here; allow only two.
        cfg.budget = Budget { max_successor_steps: 2, max_limits: 1, window: 3 };
        match run(&g, &cfg) {
            Err(Error::BudgetExhausted { partial, .. }) => {
                assert_eq!(partial.stages.len(), 3);
                assert!(matches!(partial.outcome, Outcome::Truncated { .. }));
            }
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn payoff_decimal_check() {
        let g = pd_like();
        assert_eq!(
            g.payoff(0, &[Value::label("d"), Value::label("c")]).unwrap(),
            Q::from_int(3)
        );
    }
}
