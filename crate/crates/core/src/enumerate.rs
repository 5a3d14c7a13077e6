//! Exhaustive enumeration of elimination sequences on finite games.
//!
//! The state space is the DAG of reachable reductions, keyed by per-player
//! strategy bitmasks. Nodes are discovered breadth-first from the full
//! space; each node's legal joint removals (one nonempty choice over the
//! players, per the mode's dominator scope) define its successor edges.
//! Shared suffixes collapse on the DAG, sequence counts come from a path
//! count recursion, and full sequences are materialized only under the
//! configured caps.
//!
//! A sequence is a path from the full space to a maximal reduction.
//! Stages that remove nothing are excluded; a chain that stops before
//! maximality is a prefix, not a sequence.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use serde_json::{json, Map, Value as Json};

use crate::analyze;
use crate::caps::Caps;
use crate::engine::{self, EliminationTrace, Mode, Outcome, Stage, TraceStage};
use crate::error::{Error, Result};
use crate::exec;
use crate::game::{reduction_to_json, FiniteTable, Game, Reduction};
use crate::rational::Q;
use crate::seq::SeqRegistry;
use crate::set::Value;

pub type Mask = u64;

#[derive(Clone, Debug)]
pub struct NodeInfo {
    /// Surviving strategies per player; all-zero is the canonical empty
    /// reduction.
    pub masks: Vec<Mask>,
    pub reduction: Reduction,
    /// Successor node ids, sorted by successor mask vector.
    pub successors: Vec<usize>,
    pub is_maximal: bool,
    /// Number of sequences from this node to any maximal reduction.
    pub path_count: u64,
}

#[derive(Clone, Debug)]
pub struct SequenceClass {
    pub game: String,
    pub mode: Mode,
    /// Node 0 is the full space; order is deterministic (breadth-first,
    /// successors sorted).
    pub nodes: Vec<NodeInfo>,
    /// All sequences as node-id paths, in depth-first successor order.
    pub sequences: Vec<Vec<usize>>,
    /// Ids of reachable maximal reductions.
    pub maximal: Vec<usize>,
}

impl SequenceClass {
    pub fn sequence_count(&self) -> u64 {
        self.nodes[0].path_count
    }

    /// Every reachable reduction (each lies on at least one sequence).
    pub fn range(&self) -> impl Iterator<Item = &Reduction> {
        self.nodes.iter().map(|n| &n.reduction)
    }

    pub fn maximal_reductions(&self) -> Vec<&Reduction> {
        self.maximal.iter().map(|&id| &self.nodes[id].reduction).collect()
    }

    /// Edges keyed by mask vectors, comparable across modes.
    pub fn edge_keys(&self) -> BTreeSet<(Vec<Mask>, Vec<Mask>)> {
        let mut out = BTreeSet::new();
        for n in &self.nodes {
            for &s in &n.successors {
                out.insert((n.masks.clone(), self.nodes[s].masks.clone()));
            }
        }
        out
    }

    pub fn maximal_keys(&self) -> BTreeSet<Vec<Mask>> {
        self.maximal.iter().map(|&id| self.nodes[id].masks.clone()).collect()
    }

    /// Sequence-set inclusion. Paths use only edges, and must end at a
    /// reduction that is also maximal for the other class, so inclusion
    /// reduces to edge-set and terminal-set inclusion.
    pub fn is_subclass_of(&self, other: &SequenceClass) -> bool {
        self.edge_keys().is_subset(&other.edge_keys())
            && self.maximal_keys().is_subset(&other.maximal_keys())
    }

    pub fn same_sequences(&self, other: &SequenceClass) -> bool {
        self.edge_keys() == other.edge_keys() && self.maximal_keys() == other.maximal_keys()
    }

    /// Materializes sequence `idx` as a validated-format trace.
    pub fn trace(&self, game: &Game, idx: usize) -> Result<EliminationTrace> {
        let path = self
            .sequences
            .get(idx)
            .ok_or_else(|| Error::InvalidConfig(format!("no sequence {idx}")))?;
        let reg = game.registry();
        let mut stages = Vec::with_capacity(path.len());
        stages.push(TraceStage {
            stage: Stage::ZERO,
            reduction: self.nodes[path[0]].reduction.clone(),
            removed: vec![crate::set::SymbolicSet::empty(); game.num_players()],
            witnesses: Vec::new(),
            certificate: None,
        });
        for (k, pair) in path.windows(2).enumerate() {
            let prev = &self.nodes[pair[0]].reduction;
            let cur = &self.nodes[pair[1]].reduction;
            let removed = prev
                .parts()
                .iter()
                .zip(cur.parts())
                .map(|(p, c)| p.difference(c, reg))
                .collect::<Result<Vec<_>>>()?;
            let witnesses = engine::validate_step(game, self.mode, prev, &removed)?;
            stages.push(TraceStage {
                stage: Stage { block: 0, step: (k + 1) as u64 },
                reduction: cur.clone(),
                removed,
                witnesses,
                certificate: None,
            });
        }
        Ok(EliminationTrace {
            game: self.game.clone(),
            mode: self.mode,
            policy: format!("enumerated(sequence {idx})"),
            players: game.players().to_vec(),
            stages,
            outcome: Outcome::Maximal,
        })
    }

    /// Deterministic JSON rendering: nodes, edges, sequences, maximal set.
    pub fn to_json(&self, game: &Game) -> Json {
        let nodes: Vec<Json> = self
            .nodes
            .iter()
            .map(|n| {
                json!({
                    "reduction": reduction_to_json(game, &n.reduction),
                    "maximal": n.is_maximal,
                    "successors": n.successors,
                })
            })
            .collect();
        json!({
            "game": self.game,
            "mode": self.mode,
            "sequence_count": self.sequence_count(),
            "nodes": nodes,
            "maximal": self.maximal,
            "sequences": self.sequences,
        })
    }
}

/// Nonempty submasks of `d`, ascending.
fn submasks(d: Mask) -> Vec<Mask> {
    let mut out = Vec::new();
    let mut s = d;
    while s != 0 {
        out.push(s);
        s = (s - 1) & d;
    }
    out.reverse();
    out
}

fn full_masks(table: &FiniteTable, players: usize) -> Vec<Mask> {
    (0..players).map(|i| (1u64 << table.strategies(i).len()) - 1).collect()
}

fn normalize_masks(mut masks: Vec<Mask>) -> Vec<Mask> {
    if masks.iter().any(|&m| m == 0) {
        masks.iter_mut().for_each(|m| *m = 0);
    }
    masks
}

/// Legal removal choices of one player at the node, per mode.
fn player_removals(
    table: &FiniteTable,
    mode: Mode,
    full: &[Mask],
    masks: &[Mask],
    i: usize,
) -> Vec<Mask> {
    let scope = match mode {
        Mode::Nested | Mode::Gkz => masks[i],
        Mode::Universal => full[i],
    };
    let removable = table.dominated_mask(i, masks[i], scope, masks);
    let candidates = submasks(removable);
    match mode {
        Mode::Nested | Mode::Universal => candidates,
        Mode::Gkz => candidates
            .into_iter()
            .filter(|&x| {
                let survivors = masks[i] & !x;
                table.dominated_mask(i, x, survivors, masks) == x
            })
            .collect(),
    }
}

/// Successor mask vectors of a node, sorted and deduplicated.
fn successor_masks(
    table: &FiniteTable,
    mode: Mode,
    full: &[Mask],
    masks: &[Mask],
) -> Vec<Vec<Mask>> {
    let n = masks.len();
    if masks.iter().all(|&m| m == 0) {
        return Vec::new();
    }
    let mut options: Vec<Vec<Mask>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut opts = vec![0];
        opts.extend(player_removals(table, mode, full, masks, i));
        options.push(opts);
    }
    let mut out = BTreeSet::new();
    let mut cursor = vec![0usize; n];
    loop {
        let removal: Vec<Mask> = (0..n).map(|i| options[i][cursor[i]]).collect();
        if removal.iter().any(|&x| x != 0) {
            let next: Vec<Mask> =
                (0..n).map(|i| masks[i] & !removal[i]).collect();
            out.insert(normalize_masks(next));
        }
        let mut j = n;
        loop {
            if j == 0 {
                return out.into_iter().collect();
            }
            j -= 1;
            cursor[j] += 1;
            if cursor[j] < options[j].len() {
                break;
            }
            cursor[j] = 0;
        }
    }
}

fn reduction_of_masks(game: &Game, table: &FiniteTable, masks: &[Mask]) -> Result<Reduction> {
    let parts = masks
        .iter()
        .enumerate()
        .map(|(i, &m)| table.set_of_mask(i, m, game.registry()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Reduction::new(parts))
}

/// Enumerates the full sequence class of `mode` on a finite game.
pub fn enumerate_sequences(game: &Game, mode: Mode, caps: &Caps) -> Result<SequenceClass> {
    let table = game.table().ok_or_else(|| Error::UnsupportedQuery {
        entry: game.name().into(),
        detail: "enumeration requires a finite game".into(),
    })?;
    let total: usize = (0..game.num_players()).map(|i| table.strategies(i).len()).sum();
    if total > caps.max_strategies_total {
        return Err(Error::EnumerationTooLarge(format!(
            "{total} strategies exceed the cap of {}",
            caps.max_strategies_total
        )));
    }
    let full = full_masks(table, game.num_players());

    // Breadth-first discovery; frontier successor computation fans out in
    // parallel, merged in deterministic order.
    let mut index: BTreeMap<Vec<Mask>, usize> = BTreeMap::new();
    let mut nodes: Vec<(Vec<Mask>, Vec<Vec<Mask>>)> = Vec::new();
    index.insert(full.clone(), 0);
    let mut frontier = vec![full.clone()];
    while !frontier.is_empty() {
        let batch: Vec<Vec<Vec<Mask>>> =
            exec::map_vec(&frontier, |m| successor_masks(table, mode, &full, m));
        let mut next_frontier = Vec::new();
        for (masks, succs) in frontier.into_iter().zip(batch) {
            for s in &succs {
                if !index.contains_key(s) {
                    let id = index.len();
                    index.insert(s.clone(), id);
                    next_frontier.push(s.clone());
                }
            }
            nodes.push((masks, succs));
        }
        if index.len() as u64 > caps.max_nodes {
            return Err(Error::EnumerationTooLarge(format!(
                "more than {} reachable reductions",
                caps.max_nodes
            )));
        }
        frontier = next_frontier;
    }
    // `nodes` was pushed in frontier order, which matches id order.
    nodes.sort_by_key(|(m, _)| index[m]);

    let mut infos: Vec<NodeInfo> = Vec::with_capacity(nodes.len());
    for (masks, succs) in &nodes {
        let reduction = reduction_of_masks(game, table, masks)?;
        let successors: Vec<usize> = succs.iter().map(|s| index[s]).collect();
        infos.push(NodeInfo {
            masks: masks.clone(),
            reduction,
            is_maximal: successors.is_empty(),
            successors,
            path_count: 0,
        });
    }

    // Path counts, computed bottom-up: reductions strictly shrink along
    // edges, so processing by descending total mask size is topological.
    let mut order: Vec<usize> = (0..infos.len()).collect();
    order.sort_by_key(|&id| {
        let bits: u32 = infos[id].masks.iter().map(|m| m.count_ones()).sum();
        bits
    });
    for &id in &order {
        let count = if infos[id].is_maximal {
            1u64
        } else {
            let mut acc: u64 = 0;
            for &s in &infos[id].successors {
                acc = acc.checked_add(infos[s].path_count).ok_or_else(|| {
                    Error::EnumerationTooLarge("sequence count overflows u64".into())
                })?;
            }
            acc
        };
        infos[id].path_count = count;
    }
    if infos[0].path_count > caps.max_sequences {
        return Err(Error::EnumerationTooLarge(format!(
            "{} sequences exceed the cap of {} (counted before materializing)",
            infos[0].path_count, caps.max_sequences
        )));
    }

    // Materialize all root-to-maximal paths depth-first.
    let mut sequences = Vec::with_capacity(infos[0].path_count as usize);
    let mut stack = vec![0usize];
    collect_paths(&infos, &mut stack, &mut sequences);

    let maximal: Vec<usize> =
        (0..infos.len()).filter(|&id| infos[id].is_maximal).collect();
    Ok(SequenceClass {
        game: game.name().into(),
        mode,
        nodes: infos,
        sequences,
        maximal,
    })
}

fn collect_paths(infos: &[NodeInfo], stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let id = *stack.last().expect("stack nonempty");
    if infos[id].is_maximal {
        out.push(stack.clone());
        return;
    }
    for &s in &infos[id].successors {
        stack.push(s);
        collect_paths(infos, stack, out);
        stack.pop();
    }
}

/// Maximal reductions of the mode's class, by enumeration.
pub fn maximal_reduction_set(game: &Game, mode: Mode, caps: &Caps) -> Result<Vec<Reduction>> {
    let class = enumerate_sequences(game, mode, caps)?;
    Ok(class.maximal_reductions().into_iter().cloned().collect())
}

/// Every product subset of the strategy space (the canonical empty product
/// included once).
pub fn all_product_reductions(game: &Game) -> Result<Vec<Reduction>> {
    let table = game.table().ok_or_else(|| Error::UnsupportedQuery {
        entry: game.name().into(),
        detail: "product sweep requires a finite game".into(),
    })?;
    let n = game.num_players();
    let counts: Vec<u64> = (0..n).map(|i| 1u64 << table.strategies(i).len()).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut cursor = vec![0u64; n];
    loop {
        let masks: Vec<Mask> = normalize_masks(cursor.clone());
        if seen.insert(masks.clone()) {
            out.push(reduction_of_masks(game, table, &masks)?);
        }
        let mut j = n;
        loop {
            if j == 0 {
                return Ok(out);
            }
            j -= 1;
            cursor[j] += 1;
            if cursor[j] < counts[j] {
                break;
            }
            cursor[j] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// Random finite games

/// Seeded random two-player game with the given shape; payoffs uniform
/// over 0..=4, ties included.
pub fn random_game(
    rows: usize,
    cols: usize,
    seed: u64,
    reg: Arc<SeqRegistry>,
) -> Result<Game> {
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    build_random(rows, cols, seed, &mut rng, reg)
}

/// Seeded random two-player game with 1 to 3 strategies per player, shape
/// drawn from the seed as well.
pub fn random_small_game(seed: u64, reg: Arc<SeqRegistry>) -> Result<Game> {
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let rows = 1 + (rng.next_u64() % 3) as usize;
    let cols = 1 + (rng.next_u64() % 3) as usize;
    build_random(rows, cols, seed, &mut rng, reg)
}

fn build_random(
    rows: usize,
    cols: usize,
    seed: u64,
    rng: &mut rand_chacha::ChaCha20Rng,
    reg: Arc<SeqRegistry>,
) -> Result<Game> {
    let players = vec!["p1".to_string(), "p2".to_string()];
    let strategies = vec![
        (0..rows).map(|k| Value::label(format!("r{k}"))).collect::<Vec<_>>(),
        (0..cols).map(|k| Value::label(format!("c{k}"))).collect::<Vec<_>>(),
    ];
    let cells = rows * cols;
    let payoffs: Vec<Vec<Q>> = (0..2)
        .map(|_| (0..cells).map(|_| Q::from_int((rng.next_u64() % 5) as i64)).collect())
        .collect();
    Game::finite(
        format!("random-{rows}x{cols}-seed{seed}"),
        players,
        strategies,
        payoffs,
        reg,
    )
}

// ---------------------------------------------------------------------------
// Theorem suite

#[derive(Clone, Debug)]
pub struct AssertionResult {
    pub id: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub game: String,
    pub assertions: Vec<AssertionResult>,
    pub counts: BTreeMap<String, u64>,
}

impl TheoremReport {
    pub fn all_pass(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn to_json(&self) -> Json {
        let assertions: Vec<Json> = self
            .assertions
            .iter()
            .map(|a| json!({"id": a.id, "pass": a.pass, "detail": a.detail}))
            .collect();
        let mut counts = Map::new();
        for (k, v) in &self.counts {
            counts.insert(k.clone(), json!(v));
        }
        json!({
            "game": self.game,
            "all_pass": self.all_pass(),
            "assertions": assertions,
            "counts": counts,
        })
    }
}

fn iff3(a: bool, b: bool, c: bool) -> bool {
    a == b && b == c
}

/// Runs every structural assertion the enumeration oracle can decide on a
/// finite game. All of them are proven facts, so any failure is a bug
/// signal, not a property of the game.
pub fn check_theorems(game: &Game, caps: &Caps) -> Result<TheoremReport> {
    let nested = enumerate_sequences(game, Mode::Nested, caps)?;
    let universal = enumerate_sequences(game, Mode::Universal, caps)?;
    let gkz = enumerate_sequences(game, Mode::Gkz, caps)?;
    let products = all_product_reductions(game)?;

    let mut assertions: Vec<AssertionResult> = Vec::new();
    let mut push = |id: &str, pass: bool, detail: String| {
        assertions.push(AssertionResult { id: id.into(), pass, detail });
    };

    // Universal order independence: one maximal reduction, contained in
    // every nested-maximal one.
    let u_max = universal.maximal_keys();
    push(
        "universal_order_independence",
        u_max.len() == 1,
        format!("|universal maximal set| = {}", u_max.len()),
    );
    let u_hat = u_max.iter().next().cloned().unwrap_or_default();
    let subset_ok = nested.maximal_keys().iter().all(|m| {
        m.iter().zip(&u_hat).all(|(&big, &small)| small & !big == 0)
    });
    push(
        "universal_hat_subset_of_nested_maximals",
        subset_ok,
        format!("checked against {} nested maximal reductions", nested.maximal.len()),
    );

    // Identity-step convention: the three classes coincide on finite games.
    push(
        "classes_equal",
        gkz.same_sequences(&nested) && nested.same_sequences(&universal),
        format!(
            "|gkz| = {}, |nested| = {}, |universal| = {}",
            gkz.sequence_count(),
            nested.sequence_count(),
            universal.sequence_count()
        ),
    );

    // Biconditional: same maximal sets <=> nested maximals all completely
    // bounded <=> nested sequences form a subclass of universal.
    let hats_equal = nested.maximal_keys() == universal.maximal_keys();
    let nested_max_cb = {
        let mut ok = true;
        for r in nested.maximal_reductions() {
            ok &= analyze::is_completely_bounded(game, r)?.holds;
        }
        ok
    };
    let nested_in_universal = nested.is_subclass_of(&universal);
    push(
        "t1_maximal_sets",
        iff3(hats_equal, nested_max_cb, nested_in_universal),
        format!(
            "hats_equal={hats_equal}, nested_maximals_completely_bounded={nested_max_cb}, nested_subclass={nested_in_universal}"
        ),
    );

    // Biconditional: nested range completely bounded <=> universal range
    // completely bounded <=> identical sequence classes.
    let nested_range_cb = range_all_completely_bounded(game, &nested)?;
    let universal_range_cb = range_all_completely_bounded(game, &universal)?;
    let classes_eq = nested.same_sequences(&universal);
    push(
        "t2_class_boundedness",
        iff3(nested_range_cb, universal_range_cb, classes_eq),
        format!(
            "nested_range_cb={nested_range_cb}, universal_range_cb={universal_range_cb}, equal={classes_eq}"
        ),
    );

    // Survivor-scoped class: subclass of nested, same maximal reductions,
    // and the local-boundedness biconditional.
    let gkz_sub = gkz.is_subclass_of(&nested);
    let gkz_hats = gkz.maximal_keys() == nested.maximal_keys();
    let gkz_range_lb = range_all_locally_bounded(game, &gkz)?;
    let nested_range_lb = range_all_locally_bounded(game, &nested)?;
    let gkz_eq_nested = gkz.same_sequences(&nested);
    push("t3_subclass", gkz_sub, "survivor-scoped sequences are nested sequences".into());
    push(
        "t3_maximal_sets",
        gkz_hats,
        "survivor-scoped and nested maximal reductions coincide".into(),
    );
    push(
        "t3_local_boundedness",
        iff3(gkz_range_lb, nested_range_lb, gkz_eq_nested),
        format!(
            "gkz_range_lb={gkz_range_lb}, nested_range_lb={nested_range_lb}, equal={gkz_eq_nested}"
        ),
    );

    // All product subsets completely bounded implies equal classes; on
    // finite games the premise always holds (asserted separately below).
    let all_products_cb = {
        let flags = exec::try_map_vec(&products, |r| {
            Ok(analyze::is_completely_bounded(game, r)?.holds)
        })?;
        flags.into_iter().all(|b| b)
    };
    push(
        "c1_bounded_implies_equal",
        !all_products_cb || classes_eq,
        format!("all_products_completely_bounded={all_products_cb}, classes_equal={classes_eq}"),
    );
    push(
        "prop_1_1_finite_products_bounded",
        all_products_cb,
        format!("checked {} product subsets", products.len()),
    );

    // At a nested-maximal reduction, no surviving strategy's dominating
    // set contains an undominated element.
    let mut lemma1_ok = true;
    let mut lemma1_detail = String::from("vacuous (no dominated survivor)");
    'outer: for r in nested.maximal_reductions() {
        if r.is_empty() {
            continue;
        }
        for i in 0..game.num_players() {
            let Some(values) = r.part(i).enumerate_values() else {
                continue;
            };
            for a in values {
                let d = game.dominating_set(i, &a, r)?;
                if d.is_empty() {
                    continue;
                }
                let undom = game.undominated_elements(i, &d, game.space(i), r)?;
                lemma1_detail = format!(
                    "player {}, strategy {a}: dominating set {d}, undominated part {undom}",
                    game.players()[i]
                );
                if !undom.is_empty() {
                    lemma1_ok = false;
                    break 'outer;
                }
            }
        }
    }
    push("lemma1_maximal_unbounded_contours", lemma1_ok, lemma1_detail);

    // Every nested edge expands into a survivor-scoped chain.
    let mut lemma2_ok = true;
    let mut lemma2_detail = format!("{} edges interpolated", nested.edge_keys().len());
    'edges: for n in &nested.nodes {
        for &s in &n.successors {
            let chain =
                engine::gkz_interpolate(game, &n.reduction, &nested.nodes[s].reduction);
            match chain {
                Ok(chain) => {
                    if chain.last() != Some(&nested.nodes[s].reduction) {
                        lemma2_ok = false;
                        lemma2_detail = "chain does not end at the target".into();
                        break 'edges;
                    }
                }
                Err(e) => {
                    lemma2_ok = false;
                    lemma2_detail = format!("interpolation failed: {e}");
                    break 'edges;
                }
            }
        }
    }
    push("lemma2_gkz_interpolation", lemma2_ok, lemma2_detail);

    // Maximality agrees between nested and survivor scope on every product
    // subset, checked through the independent legality paths.
    let table = game.table().expect("finite by construction");
    let full = full_masks(table, game.num_players());
    let mut modes_agree = true;
    for r in &products {
        let masks: Vec<Mask> = (0..game.num_players())
            .map(|i| table.mask_of_set(i, r.part(i), game.registry()))
            .collect::<Result<_>>()?;
        let masks = normalize_masks(masks);
        if masks.iter().all(|&m| m == 0) {
            continue;
        }
        let nested_movable = (0..game.num_players())
            .any(|i| !player_removals(table, Mode::Nested, &full, &masks, i).is_empty());
        let gkz_movable = (0..game.num_players())
            .any(|i| !player_removals(table, Mode::Gkz, &full, &masks, i).is_empty());
        if nested_movable != gkz_movable {
            modes_agree = false;
            break;
        }
    }
    push(
        "maximality_nested_iff_gkz",
        modes_agree,
        format!("checked {} product subsets", products.len()),
    );

    let mut counts = BTreeMap::new();
    counts.insert("sequences_nested".into(), nested.sequence_count());
    counts.insert("sequences_universal".into(), universal.sequence_count());
    counts.insert("sequences_gkz".into(), gkz.sequence_count());
    counts.insert("range_nested".into(), nested.nodes.len() as u64);
    counts.insert("maximal_nested".into(), nested.maximal.len() as u64);
    counts.insert("maximal_universal".into(), universal.maximal.len() as u64);
    counts.insert("product_subsets".into(), products.len() as u64);

    Ok(TheoremReport { game: game.name().into(), assertions, counts })
}

fn range_all_completely_bounded(game: &Game, class: &SequenceClass) -> Result<bool> {
    let reductions: Vec<&Reduction> = class.range().collect();
    let flags = exec::try_map_vec(&reductions, |r| {
        Ok(analyze::is_completely_bounded(game, r)?.holds)
    })?;
    Ok(flags.into_iter().all(|b| b))
}

fn range_all_locally_bounded(game: &Game, class: &SequenceClass) -> Result<bool> {
    let reductions: Vec<&Reduction> = class.range().collect();
    let flags = exec::try_map_vec(&reductions, |r| {
        Ok(analyze::is_locally_bounded(game, r)?.holds)
    })?;
    Ok(flags.into_iter().all(|b| b))
}

/// Reachable ordered pairs `(R, S)` with `S` weakly after `R` on some
/// sequence: pairs of DAG nodes with `S` reachable from `R` (including
/// `R = S`).
pub fn cooccurring_pairs(class: &SequenceClass) -> Vec<(usize, usize)> {
    let n = class.nodes.len();
    let mut reach: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    // Process in ascending surviving-strategy order: successors shrink, so
    // their closures are already complete.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&id| {
        let bits: u32 = class.nodes[id].masks.iter().map(|m| m.count_ones()).sum();
        bits
    });
    for &id in &order {
        let mut set = BTreeSet::new();
        set.insert(id);
        for &s in &class.nodes[id].successors {
            set.insert(s);
            set.extend(reach[s].iter().copied());
        }
        reach[id] = set;
    }
    let mut out = Vec::new();
    for id in 0..n {
        for &s in &reach[id] {
            out.push((id, s));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::load_finite_game;
    use crate::seq::standard_registry;

    fn reg() -> Arc<SeqRegistry> {
        Arc::new(standard_registry())
    }

    fn dominance_2x2() -> Game {
        let input = r#"{
            "name": "2x2",
            "players": ["p1", "p2"],
            "strategies": {"p1": ["c", "d"], "p2": ["c", "d"]},
            "payoffs": {
                "p1": [[2, 0], [3, 1]],
                "p2": [[2, 3], [0, 1]]
            }
        }"#;
        load_finite_game(input, reg()).unwrap()
    }

    fn no_dominance() -> Game {
        let input = r#"{
            "name": "matching",
            "players": ["p1", "p2"],
            "strategies": {"p1": ["h", "t"], "p2": ["h", "t"]},
            "payoffs": {
                "p1": [[1, 0], [0, 1]],
                "p2": [[0, 1], [1, 0]]
            }
        }"#;
        load_finite_game(input, reg()).unwrap()
    }

    #[test]
    fn no_dominance_game_has_one_sequence() {
        let g = no_dominance();
        let class = enumerate_sequences(&g, Mode::Nested, &Caps::default()).unwrap();
        assert_eq!(class.sequence_count(), 1);
        assert_eq!(class.sequences, vec![vec![0]]);
        assert!(class.nodes[0].is_maximal);
        assert_eq!(class.maximal_reductions()[0], &g.full_reduction());
    }

    #[test]
    fn dominance_2x2_sequences_share_one_terminal() {
        let g = dominance_2x2();
        let class = enumerate_sequences(&g, Mode::Nested, &Caps::default()).unwrap();
        // Removals available at the root: {c} for either or both players.
        assert!(class.sequence_count() >= 3);
        let maxes = class.maximal_keys();
        assert_eq!(maxes.len(), 1, "unique maximal reduction");
        let m = class.maximal_reductions()[0];
        assert_eq!(m.part(0).to_string(), "{d}");
        assert_eq!(m.part(1).to_string(), "{d}");
        // Every sequence is a valid trace.
        for idx in 0..class.sequences.len() {
            let trace = class.trace(&g, idx).unwrap();
            engine::validate_sequence(&g, &trace, true).unwrap();
        }
    }

    #[test]
    fn caps_are_enforced() {
        let g = dominance_2x2();
        let tight = Caps { max_strategies_total: 3, ..Caps::default() };
        assert!(matches!(
            enumerate_sequences(&g, Mode::Nested, &tight),
            Err(Error::EnumerationTooLarge(_))
        ));
        let tiny = Caps { max_sequences: 1, ..Caps::default() };
        assert!(matches!(
            enumerate_sequences(&g, Mode::Nested, &tiny),
            Err(Error::EnumerationTooLarge(_))
        ));
    }

    #[test]
    fn theorem_suite_passes_on_fixed_games() {
        for g in [dominance_2x2(), no_dominance()] {
            let report = check_theorems(&g, &Caps::default()).unwrap();
            assert!(
                report.all_pass(),
                "failures on {}: {:?}",
                g.name(),
                report
                    .assertions
                    .iter()
                    .filter(|a| !a.pass)
                    .collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn theorem_suite_passes_on_random_games() {
        // A quick slice here; the full 200-seed run lives in the
        // integration suite.
        for seed in 0..25 {
            let g = random_small_game(seed, reg()).unwrap();
            let report = check_theorems(&g, &Caps::default()).unwrap();
            assert!(
                report.all_pass(),
                "failures on {} (seed {seed}): {:?}",
                g.name(),
                report
                    .assertions
                    .iter()
                    .filter(|a| !a.pass)
                    .collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn deterministic_serialization() {
        let g = dominance_2x2();
        let a = enumerate_sequences(&g, Mode::Universal, &Caps::default()).unwrap();
        let b = enumerate_sequences(&g, Mode::Universal, &Caps::default()).unwrap();
        assert_eq!(
            serde_json::to_string(&a.to_json(&g)).unwrap(),
            serde_json::to_string(&b.to_json(&g)).unwrap()
        );
    }

    #[test]
    fn cooccurrence_includes_reflexive_pairs() {
        let g = dominance_2x2();
        let class = enumerate_sequences(&g, Mode::Nested, &Caps::default()).unwrap();
        let pairs = cooccurring_pairs(&class);
        for id in 0..class.nodes.len() {
            assert!(pairs.contains(&(id, id)));
        }
        // The root reaches every node.
        let from_root: Vec<usize> =
            pairs.iter().filter(|(a, _)| *a == 0).map(|(_, b)| *b).collect();
        assert_eq!(from_root.len(), class.nodes.len());
    }
}
