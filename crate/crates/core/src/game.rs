//! Normal-form games and reductions.
//!
//! A [`Game`] couples player strategy spaces (symbolic sets) with a payoff
//! backend: either an explicit finite [`FiniteTable`] queried by brute
//! force, or a hand-written [`AnalyticGame`] oracle that answers dominance
//! queries in closed form for an infinite game. All dominance operations go
//! through the same [`Game`] methods, so the engine, analyzers, and
//! enumeration never care which backend answers.
//!
//! Strict dominance: `a` is dominated by `b` relative to `R` iff `b` yields
//! a strictly higher payoff against every opponent profile in `R_{-i}`. The
//! relation is undefined when `R_{-i}` is empty; since a reduction with any
//! empty component is normalized to the empty product, this surfaces as an
//! error on queries at the empty reduction.

use std::fmt;
use std::sync::Arc;

use serde_json::{json, Map, Value as Json};

use crate::error::{Error, Result};
use crate::pattern::ChainPattern;
use crate::rational::Q;
use crate::seq::SeqRegistry;
use crate::set::{value_cmp, SetExpr, SetPrimitive, SymbolicSet, Value};

/// Product reduction `R = R_1 x ... x R_n`. Canonical form: if any
/// component is empty the whole product is empty and every component is
/// stored empty, so structural equality matches set equality.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Reduction {
    parts: Vec<SymbolicSet>,
}

impl Reduction {
    pub fn new(parts: Vec<SymbolicSet>) -> Self {
        if parts.iter().any(|p| p.is_empty()) {
            let n = parts.len();
            return Reduction { parts: vec![SymbolicSet::empty(); n] };
        }
        Reduction { parts }
    }

    pub fn parts(&self) -> &[SymbolicSet] {
        &self.parts
    }

    pub fn part(&self, i: usize) -> &SymbolicSet {
        &self.parts[i]
    }

    pub fn num_players(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.iter().any(|p| p.is_empty())
    }

    /// Replaces component `i`, renormalizing the empty product.
    pub fn with_part(&self, i: usize, set: SymbolicSet) -> Reduction {
        let mut parts = self.parts.clone();
        parts[i] = set;
        Reduction::new(parts)
    }

    pub fn is_subset(&self, other: &Reduction, reg: &SeqRegistry) -> Result<bool> {
        if self.is_empty() {
            return Ok(true);
        }
        for (a, b) in self.parts.iter().zip(other.parts.iter()) {
            if !a.is_subset(b, reg)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("∅");
        }
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        f.write_str(&parts.join(" × "))
    }
}

/// Finite payoff table. Strategies keep their declared order, which fixes
/// the tie-breaking order of deterministic policies.
#[derive(Clone, Debug)]
pub struct FiniteTable {
    strategies: Vec<Vec<Value>>,
    /// Per player, payoffs flattened row-major over strategy indices in
    /// player order.
    payoffs: Vec<Vec<Q>>,
    strides: Vec<usize>,
}

impl FiniteTable {
    pub fn new(strategies: Vec<Vec<Value>>, payoffs: Vec<Vec<Q>>) -> Result<Self> {
        let counts: Vec<usize> = strategies.iter().map(|s| s.len()).collect();
        let total: usize = counts.iter().product();
        for (i, p) in payoffs.iter().enumerate() {
            if p.len() != total {
                return Err(Error::GameFormat {
                    location: format!("payoffs[{i}]"),
                    detail: format!("expected {total} entries, got {}", p.len()),
                });
            }
        }
        let mut strides = vec![1usize; counts.len()];
        for j in (0..counts.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * counts[j + 1];
        }
        Ok(FiniteTable { strategies, payoffs, strides })
    }

    pub fn strategies(&self, i: usize) -> &[Value] {
        &self.strategies[i]
    }

    pub fn strategy_index(&self, i: usize, v: &Value) -> Option<usize> {
        self.strategies[i].iter().position(|s| s == v)
    }

    fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(k, s)| k * s).sum()
    }

    pub fn payoff_at(&self, player: usize, idx: &[usize]) -> &Q {
        &self.payoffs[player][self.flat(idx)]
    }

    /// Bitmask of the strategies of player `i` that belong to `set`.
    pub(crate) fn mask_of_set(&self, i: usize, set: &SymbolicSet, reg: &SeqRegistry) -> Result<u64> {
        let mut mask = 0u64;
        for (k, v) in self.strategies[i].iter().enumerate() {
            if set.contains_value(v, reg)? {
                mask |= 1 << k;
            }
        }
        // The set must not contain anything outside the strategy list.
        if let Some(values) = set.enumerate_values() {
            for v in &values {
                if self.strategy_index(i, v).is_none() {
                    return Err(Error::InvalidConfig(format!(
                        "`{v}` is not a strategy of player {i}"
                    )));
                }
            }
        } else {
            return Err(Error::InvalidConfig(
                "infinite strategy set used with a finite game".into(),
            ));
        }
        Ok(mask)
    }

    pub(crate) fn set_of_mask(&self, i: usize, mask: u64, reg: &SeqRegistry) -> Result<SymbolicSet> {
        let values: Vec<Value> = self.strategies[i]
            .iter()
            .enumerate()
            .filter(|(k, _)| mask & (1 << k) != 0)
            .map(|(_, v)| v.clone())
            .collect();
        SymbolicSet::from_values(&values, reg)
    }

    /// Whether strategy `b` strictly dominates `a` for player `i` against
    /// every opponent profile drawn from `other_masks` (bit `i` ignored).
    pub(crate) fn dominates_idx(&self, i: usize, a: usize, b: usize, masks: &[u64]) -> bool {
        if a == b {
            return false;
        }
        let mut ok = true;
        self.for_each_profile(i, masks, |idx| {
            let mut ia = idx.to_vec();
            ia[i] = a;
            let mut ib = idx.to_vec();
            ib[i] = b;
            if self.payoff_at(i, &ib) <= self.payoff_at(i, &ia) {
                ok = false;
                false
            } else {
                true
            }
        });
        ok
    }

    /// Mask of strategies in `target` dominated by some strategy in
    /// `scope_mask`, all relative to the opponent masks.
    pub(crate) fn dominated_mask(
        &self,
        i: usize,
        target: u64,
        scope: u64,
        masks: &[u64],
    ) -> u64 {
        let n = self.strategies[i].len();
        let mut out = 0u64;
        for a in 0..n {
            if target & (1 << a) == 0 {
                continue;
            }
            for b in 0..n {
                if scope & (1 << b) == 0 {
                    continue;
                }
                if self.dominates_idx(i, a, b, masks) {
                    out |= 1 << a;
                    break;
                }
            }
        }
        out
    }

    /// Visits opponent profiles (full index vectors with slot `i`
    /// unspecified, set to 0). The callback returns false to stop early.
    /// Does not visit anything if some opponent mask is empty.
    fn for_each_profile(&self, i: usize, masks: &[u64], mut f: impl FnMut(&[usize]) -> bool) {
        let n = self.strategies.len();
        let mut choices: Vec<Vec<usize>> = Vec::with_capacity(n);
        for j in 0..n {
            if j == i {
                choices.push(vec![0]);
            } else {
                let bits: Vec<usize> =
                    (0..self.strategies[j].len()).filter(|k| masks[j] & (1 << k) != 0).collect();
                if bits.is_empty() {
                    return;
                }
                choices.push(bits);
            }
        }
        let mut cursor = vec![0usize; n];
        let mut idx = vec![0usize; n];
        loop {
            for j in 0..n {
                idx[j] = choices[j][cursor[j]];
            }
            if !f(&idx) {
                return;
            }
            // Odometer increment over the last-varying player.
            let mut j = n;
            loop {
                if j == 0 {
                    return;
                }
                j -= 1;
                cursor[j] += 1;
                if cursor[j] < choices[j].len() {
                    break;
                }
                cursor[j] = 0;
            }
        }
    }
}

/// Closed-form dominance oracle for an infinite game. Implementations
/// answer only over the set shapes their game actually produces and fail
/// loudly otherwise.
pub trait AnalyticGame: Send + Sync {
    fn id(&self) -> &str;

    fn payoff(&self, player: usize, profile: &[Value]) -> Result<Q>;

    fn dominates(&self, player: usize, a: &Value, b: &Value, r: &Reduction) -> Result<bool>;

    /// `{a in target : exists b in scope with a dominated by b rel R}`.
    fn dominated_elements(
        &self,
        player: usize,
        target: &SymbolicSet,
        scope: &SymbolicSet,
        r: &Reduction,
    ) -> Result<SymbolicSet>;

    /// `{b in A_i : a dominated by b rel R}`.
    fn dominating_set(&self, player: usize, a: &Value, r: &Reduction) -> Result<SymbolicSet>;

    /// `{b in A_i : b dominated by a rel R}`.
    fn lower_contour_set(&self, player: usize, a: &Value, r: &Reduction) -> Result<SymbolicSet>;

    /// A concrete member of `scope` dominating `a` rel `R`.
    fn dominator_witness(
        &self,
        player: usize,
        a: &Value,
        scope: &SymbolicSet,
        r: &Reduction,
    ) -> Result<Value>;

    /// Whether the detected chain template provably continues for every
    /// stage index in this game.
    fn certify_pattern(&self, pattern: &ChainPattern) -> bool;

    /// Human-readable dominator rule for a removed non-singleton primitive,
    /// recorded as a trace witness.
    fn removal_rule(&self, _player: usize, _removed: &SetPrimitive, _r: &Reduction) -> Option<String> {
        None
    }
}

#[derive(Clone)]
pub enum Backend {
    Table(Arc<FiniteTable>),
    Analytic(Arc<dyn AnalyticGame>),
}

impl fmt::Debug for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Table(_) => f.write_str("Table"),
            Backend::Analytic(a) => write!(f, "Analytic({})", a.id()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Game {
    name: String,
    players: Vec<String>,
    registry: Arc<SeqRegistry>,
    spaces: Vec<SymbolicSet>,
    backend: Backend,
}

impl Game {
    pub fn finite(
        name: impl Into<String>,
        players: Vec<String>,
        strategies: Vec<Vec<Value>>,
        payoffs: Vec<Vec<Q>>,
        registry: Arc<SeqRegistry>,
    ) -> Result<Self> {
        if players.len() < 2 {
            return Err(Error::GameFormat {
                location: "players".into(),
                detail: "at least two players required".into(),
            });
        }
        if strategies.iter().any(|s| s.is_empty()) {
            return Err(Error::GameFormat {
                location: "strategies".into(),
                detail: "every player needs at least one strategy".into(),
            });
        }
        let spaces = strategies
            .iter()
            .map(|vals| SymbolicSet::from_values(vals, &registry))
            .collect::<Result<Vec<_>>>()?;
        for (i, (vals, space)) in strategies.iter().zip(&spaces).enumerate() {
            if space.finite_len() != Some(vals.len()) {
                return Err(Error::GameFormat {
                    location: format!("strategies[{i}]"),
                    detail: "duplicate strategy".into(),
                });
            }
        }
        let table = FiniteTable::new(strategies, payoffs)?;
        Ok(Game {
            name: name.into(),
            players,
            registry,
            spaces,
            backend: Backend::Table(Arc::new(table)),
        })
    }

    pub fn analytic(
        name: impl Into<String>,
        players: Vec<String>,
        spaces: Vec<SymbolicSet>,
        registry: Arc<SeqRegistry>,
        oracle: Arc<dyn AnalyticGame>,
    ) -> Self {
        Game { name: name.into(), players, registry, spaces, backend: Backend::Analytic(oracle) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn registry(&self) -> &SeqRegistry {
        &self.registry
    }

    pub fn registry_arc(&self) -> Arc<SeqRegistry> {
        Arc::clone(&self.registry)
    }

    pub fn space(&self, i: usize) -> &SymbolicSet {
        &self.spaces[i]
    }

    pub fn full_reduction(&self) -> Reduction {
        Reduction::new(self.spaces.clone())
    }

    pub fn table(&self) -> Option<&FiniteTable> {
        match &self.backend {
            Backend::Table(t) => Some(t),
            Backend::Analytic(_) => None,
        }
    }

    pub fn analytic_oracle(&self) -> Option<&dyn AnalyticGame> {
        match &self.backend {
            Backend::Analytic(a) => Some(a.as_ref()),
            Backend::Table(_) => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.backend, Backend::Table(_))
    }

    fn check_nonempty(&self, r: &Reduction, player: usize) -> Result<()> {
        if r.is_empty() {
            return Err(Error::UndefinedRelation {
                player: self.players.get(player).cloned().unwrap_or_else(|| player.to_string()),
            });
        }
        Ok(())
    }

    pub fn payoff(&self, player: usize, profile: &[Value]) -> Result<Q> {
        match &self.backend {
            Backend::Table(t) => {
                let mut idx = Vec::with_capacity(profile.len());
                for (j, v) in profile.iter().enumerate() {
                    let k = t.strategy_index(j, v).ok_or_else(|| {
                        Error::InvalidConfig(format!("`{v}` is not a strategy of player {j}"))
                    })?;
                    idx.push(k);
                }
                Ok(t.payoff_at(player, &idx).clone())
            }
            Backend::Analytic(a) => a.payoff(player, profile),
        }
    }

    /// Strict dominance of `a` by `b` for `player`, relative to `r`.
    pub fn dominates(&self, player: usize, a: &Value, b: &Value, r: &Reduction) -> Result<bool> {
        self.check_nonempty(r, player)?;
        if a == b {
            return Ok(false);
        }
        for (v, which) in [(a, "a"), (b, "b")] {
            if !self.spaces[player].contains_value(v, &self.registry)? {
                return Err(Error::InvalidConfig(format!(
                    "{which} = `{v}` is not a strategy of player {}",
                    self.players[player]
                )));
            }
        }
        match &self.backend {
            Backend::Table(t) => {
                let ia = t.strategy_index(player, a).unwrap();
                let ib = t.strategy_index(player, b).unwrap();
                let masks = self.masks_of(r)?;
                Ok(t.dominates_idx(player, ia, ib, &masks))
            }
            Backend::Analytic(orc) => orc.dominates(player, a, b, r),
        }
    }

    /// `{a in target : some b in scope dominates a rel r}`.
    pub fn dominated_elements(
        &self,
        player: usize,
        target: &SymbolicSet,
        scope: &SymbolicSet,
        r: &Reduction,
    ) -> Result<SymbolicSet> {
        self.check_nonempty(r, player)?;
        match &self.backend {
            Backend::Table(t) => {
                let masks = self.masks_of(r)?;
                let tmask = t.mask_of_set(player, target, &self.registry)?;
                let smask = t.mask_of_set(player, scope, &self.registry)?;
                let out = t.dominated_mask(player, tmask, smask, &masks);
                t.set_of_mask(player, out, &self.registry)
            }
            Backend::Analytic(orc) => orc.dominated_elements(player, target, scope, r),
        }
    }

    /// `{a in x : no b in scope dominates a rel r}`.
    pub fn undominated_elements(
        &self,
        player: usize,
        x: &SymbolicSet,
        scope: &SymbolicSet,
        r: &Reduction,
    ) -> Result<SymbolicSet> {
        let dominated = self.dominated_elements(player, x, scope, r)?;
        x.difference(&dominated, &self.registry)
    }

    /// Full dominating set of `a` within the whole space `A_i`.
    pub fn dominating_set(&self, player: usize, a: &Value, r: &Reduction) -> Result<SymbolicSet> {
        self.check_nonempty(r, player)?;
        match &self.backend {
            Backend::Table(t) => {
                let ia = t.strategy_index(player, a).ok_or_else(|| {
                    Error::InvalidConfig(format!("`{a}` is not a strategy of player {player}"))
                })?;
                let masks = self.masks_of(r)?;
                let n = t.strategies[player].len();
                let mut out = 0u64;
                for b in 0..n {
                    if t.dominates_idx(player, ia, b, &masks) {
                        out |= 1 << b;
                    }
                }
                t.set_of_mask(player, out, &self.registry)
            }
            Backend::Analytic(orc) => orc.dominating_set(player, a, r),
        }
    }

    /// `{b in A_i : b dominated by a rel r}` (the lower contour of `a`).
    pub fn lower_contour_set(&self, player: usize, a: &Value, r: &Reduction) -> Result<SymbolicSet> {
        self.check_nonempty(r, player)?;
        match &self.backend {
            Backend::Table(t) => {
                let ia = t.strategy_index(player, a).ok_or_else(|| {
                    Error::InvalidConfig(format!("`{a}` is not a strategy of player {player}"))
                })?;
                let masks = self.masks_of(r)?;
                let n = t.strategies[player].len();
                let mut out = 0u64;
                for b in 0..n {
                    if t.dominates_idx(player, b, ia, &masks) {
                        out |= 1 << b;
                    }
                }
                t.set_of_mask(player, out, &self.registry)
            }
            Backend::Analytic(orc) => orc.lower_contour_set(player, a, r),
        }
    }

    /// Concrete dominator of `a` within `scope`, in declared strategy order
    /// for finite games.
    pub fn dominator_witness(
        &self,
        player: usize,
        a: &Value,
        scope: &SymbolicSet,
        r: &Reduction,
    ) -> Result<Value> {
        self.check_nonempty(r, player)?;
        match &self.backend {
            Backend::Table(t) => {
                let ia = t.strategy_index(player, a).ok_or_else(|| {
                    Error::InvalidConfig(format!("`{a}` is not a strategy of player {player}"))
                })?;
                let masks = self.masks_of(r)?;
                let smask = t.mask_of_set(player, scope, &self.registry)?;
                for (b, v) in t.strategies[player].iter().enumerate() {
                    if smask & (1 << b) != 0 && t.dominates_idx(player, ia, b, &masks) {
                        return Ok(v.clone());
                    }
                }
                Err(Error::InvalidConfig(format!(
                    "no dominator of `{a}` in the given scope"
                )))
            }
            Backend::Analytic(orc) => orc.dominator_witness(player, a, scope, r),
        }
    }

    /// Members of a finite set in declared strategy order (finite games) or
    /// canonical value order (analytic games).
    pub fn ordered_members(&self, player: usize, set: &SymbolicSet) -> Result<Vec<Value>> {
        let mut values = set.enumerate_values().ok_or_else(|| {
            Error::UnsupportedQuery {
                entry: self.name.clone(),
                detail: "cannot enumerate an infinite strategy set".into(),
            }
        })?;
        match &self.backend {
            Backend::Table(t) => {
                values.sort_by_key(|v| t.strategy_index(player, v).unwrap_or(usize::MAX));
            }
            Backend::Analytic(_) => values.sort_by(value_cmp),
        }
        Ok(values)
    }

    pub(crate) fn masks_of(&self, r: &Reduction) -> Result<Vec<u64>> {
        let t = self.table().expect("masks_of on a finite game");
        r.parts()
            .iter()
            .enumerate()
            .map(|(i, s)| t.mask_of_set(i, s, &self.registry))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Finite game file format

/// Loads the finite-game JSON format:
///
/// ```json
/// {
///   "players": ["alice", "bob"],
///   "strategies": {"alice": ["a1", "a2"], "bob": ["b1", "b2"]},
///   "payoffs": {"alice": [[1, 1], [0, 0]], "bob": [[2, {"num":"1","den":"2"}], [0, 1]]}
/// }
/// ```
///
/// Payoff arrays are nested by strategy indices in player declaration
/// order. Entries are integers or `{"num", "den"}` objects.
pub fn load_finite_game(input: &str, registry: Arc<SeqRegistry>) -> Result<Game> {
    let doc: Json = serde_json::from_str(input)?;
    let obj = doc
        .as_object()
        .ok_or_else(|| fmt_err("$", "expected a JSON object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "players" | "strategies" | "payoffs" | "name") {
            return Err(fmt_err(key, "unknown field"));
        }
    }
    let players: Vec<String> = obj
        .get("players")
        .ok_or_else(|| fmt_err("players", "missing"))?
        .as_array()
        .ok_or_else(|| fmt_err("players", "expected an array"))?
        .iter()
        .map(|v| {
            v.as_str()
                .map(String::from)
                .ok_or_else(|| fmt_err("players", "player names must be strings"))
        })
        .collect::<Result<_>>()?;
    if players.len() < 2 {
        return Err(fmt_err("players", "at least two players required"));
    }
    for (i, p) in players.iter().enumerate() {
        if players[..i].contains(p) {
            return Err(fmt_err("players", &format!("duplicate player `{p}`")));
        }
    }

    let strat_map = obj
        .get("strategies")
        .ok_or_else(|| fmt_err("strategies", "missing"))?
        .as_object()
        .ok_or_else(|| fmt_err("strategies", "expected an object"))?;
    for key in strat_map.keys() {
        if !players.contains(key) {
            return Err(fmt_err(&format!("strategies.{key}"), "unknown player"));
        }
    }
    let mut strategies: Vec<Vec<Value>> = Vec::new();
    for p in &players {
        let loc = format!("strategies.{p}");
        let arr = strat_map
            .get(p)
            .ok_or_else(|| fmt_err(&loc, "missing"))?
            .as_array()
            .ok_or_else(|| fmt_err(&loc, "expected an array"))?;
        if arr.is_empty() {
            return Err(fmt_err(&loc, "empty strategy list"));
        }
        let mut labels = Vec::new();
        for (k, v) in arr.iter().enumerate() {
            let s = v
                .as_str()
                .ok_or_else(|| fmt_err(&format!("{loc}[{k}]"), "strategy labels must be strings"))?;
            let val = Value::label(s);
            if labels.contains(&val) {
                return Err(fmt_err(&format!("{loc}[{k}]"), &format!("duplicate label `{s}`")));
            }
            labels.push(val);
        }
        strategies.push(labels);
    }

    let counts: Vec<usize> = strategies.iter().map(|s| s.len()).collect();
    let pay_map = obj
        .get("payoffs")
        .ok_or_else(|| fmt_err("payoffs", "missing"))?
        .as_object()
        .ok_or_else(|| fmt_err("payoffs", "expected an object"))?;
    for key in pay_map.keys() {
        if !players.contains(key) {
            return Err(fmt_err(&format!("payoffs.{key}"), "unknown player"));
        }
    }
    let mut payoffs: Vec<Vec<Q>> = Vec::new();
    for p in &players {
        let loc = format!("payoffs.{p}");
        let node = pay_map.get(p).ok_or_else(|| fmt_err(&loc, "missing"))?;
        let mut flat = Vec::with_capacity(counts.iter().product());
        read_payoff_level(node, &counts, 0, &loc, &mut flat)?;
        payoffs.push(flat);
    }

    let name = obj
        .get("name")
        .and_then(|v| v.as_str())
        .map(String::from)
        .unwrap_or_else(|| "game".into());
    Game::finite(name, players, strategies, payoffs, registry)
}

fn read_payoff_level(
    node: &Json,
    counts: &[usize],
    depth: usize,
    loc: &str,
    out: &mut Vec<Q>,
) -> Result<()> {
    if depth == counts.len() {
        let q: Q = serde_json::from_value(node.clone())
            .map_err(|e| fmt_err(loc, &format!("bad payoff: {e}")))?;
        out.push(q);
        return Ok(());
    }
    let arr = node
        .as_array()
        .ok_or_else(|| fmt_err(loc, &format!("expected an array of length {}", counts[depth])))?;
    if arr.len() != counts[depth] {
        return Err(fmt_err(
            loc,
            &format!("expected length {}, got {}", counts[depth], arr.len()),
        ));
    }
    for (k, sub) in arr.iter().enumerate() {
        read_payoff_level(sub, counts, depth + 1, &format!("{loc}[{k}]"), out)?;
    }
    Ok(())
}

fn fmt_err(location: &str, detail: &str) -> Error {
    Error::GameFormat { location: location.into(), detail: detail.into() }
}

/// Serializes a finite game back to the file format.
pub fn finite_game_to_json(game: &Game) -> Result<Json> {
    let table = game.table().ok_or_else(|| Error::UnsupportedQuery {
        entry: game.name().into(),
        detail: "only finite games serialize to the table format".into(),
    })?;
    let mut strategies = Map::new();
    for (i, p) in game.players().iter().enumerate() {
        strategies.insert(
            p.clone(),
            Json::Array(table.strategies(i).iter().map(|v| json!(v.to_string())).collect()),
        );
    }
    let counts: Vec<usize> = (0..game.num_players()).map(|i| table.strategies(i).len()).collect();
    let mut payoffs = Map::new();
    for (i, p) in game.players().iter().enumerate() {
        let mut idx = vec![0usize; counts.len()];
        payoffs.insert(p.clone(), build_payoff_level(table, i, &counts, 0, &mut idx));
    }
    let mut doc = Map::new();
    doc.insert("name".into(), json!(game.name()));
    doc.insert("players".into(), Json::Array(game.players().iter().map(|p| json!(p)).collect()));
    doc.insert("strategies".into(), Json::Object(strategies));
    doc.insert("payoffs".into(), Json::Object(payoffs));
    Ok(Json::Object(doc))
}

fn build_payoff_level(
    table: &FiniteTable,
    player: usize,
    counts: &[usize],
    depth: usize,
    idx: &mut Vec<usize>,
) -> Json {
    if depth == counts.len() {
        return serde_json::to_value(table.payoff_at(player, idx)).expect("payoff serializes");
    }
    let mut arr = Vec::with_capacity(counts[depth]);
    for k in 0..counts[depth] {
        idx[depth] = k;
        arr.push(build_payoff_level(table, player, counts, depth + 1, idx));
    }
    Json::Array(arr)
}

/// Serializes a reduction as `{player: set}` in player order.
pub fn reduction_to_json(game: &Game, r: &Reduction) -> Json {
    let mut map = Map::new();
    for (i, p) in game.players().iter().enumerate() {
        map.insert(p.clone(), serde_json::to_value(r.part(i)).expect("set serializes"));
    }
    Json::Object(map)
}

/// Parses a reduction from `{player: set}`; missing players default to the
/// full space.
pub fn reduction_from_json(game: &Game, doc: &Json) -> Result<Reduction> {
    let obj = doc
        .as_object()
        .ok_or_else(|| fmt_err("reduction", "expected an object"))?;
    for key in obj.keys() {
        if !game.players().contains(key) {
            return Err(fmt_err(&format!("reduction.{key}"), "unknown player"));
        }
    }
    let mut parts = Vec::with_capacity(game.num_players());
    for (i, p) in game.players().iter().enumerate() {
        match obj.get(p) {
            None => parts.push(game.space(i).clone()),
            Some(node) => {
                let expr: SetExpr = serde_json::from_value(node.clone())?;
                parts.push(expr.resolve(game.registry())?);
            }
        }
    }
    Ok(Reduction::new(parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::standard_registry;

    fn reg() -> Arc<SeqRegistry> {
        Arc::new(standard_registry())
    }

    /// 2x2 game: row player's first strategy strictly dominates the second;
    /// column player has no dominance.
    fn dominance_2x2() -> Game {
        let players = vec!["row".to_string(), "col".to_string()];
        let strategies = vec![
            vec![Value::label("t"), Value::label("b")],
            vec![Value::label("l"), Value::label("r")],
        ];
        let payoffs = vec![
            vec![Q::from_int(1), Q::from_int(1), Q::from_int(0), Q::from_int(0)],
            vec![Q::from_int(0), Q::from_int(0), Q::from_int(0), Q::from_int(0)],
        ];
        Game::finite("2x2", players, strategies, payoffs, reg()).unwrap()
    }

    #[test]
    fn finite_dominance_queries() {
        let g = dominance_2x2();
        let r = g.full_reduction();
        let t = Value::label("t");
        let b = Value::label("b");
        assert!(g.dominates(0, &b, &t, &r).unwrap());
        assert!(!g.dominates(0, &t, &b, &r).unwrap());
        assert!(!g.dominates(1, &Value::label("l"), &Value::label("r"), &r).unwrap());

        let d = g.dominating_set(0, &b, &r).unwrap();
        assert_eq!(d.enumerate_values().unwrap(), vec![t.clone()]);
        let l = g.lower_contour_set(0, &t, &r).unwrap();
        assert_eq!(l.enumerate_values().unwrap(), vec![b.clone()]);

        let removable = g
            .dominated_elements(0, r.part(0), r.part(0), &r)
            .unwrap();
        assert_eq!(removable.enumerate_values().unwrap(), vec![b.clone()]);
        let undom = g.undominated_elements(0, r.part(0), r.part(0), &r).unwrap();
        assert_eq!(undom.enumerate_values().unwrap(), vec![t.clone()]);
    }

    #[test]
    fn empty_reduction_is_undefined() {
        let g = dominance_2x2();
        let empty = Reduction::new(vec![SymbolicSet::empty(), SymbolicSet::empty()]);
        assert!(matches!(
            g.dominates(0, &Value::label("t"), &Value::label("b"), &empty),
            Err(Error::UndefinedRelation { .. })
        ));
    }

    #[test]
    fn reduction_normalizes_empty_product() {
        let a = Reduction::new(vec![SymbolicSet::empty(), SymbolicSet::from_atoms(["x"])]);
        let b = Reduction::new(vec![SymbolicSet::from_atoms(["y"]), SymbolicSet::empty()]);
        assert_eq!(a, b);
        assert!(a.is_empty());
        assert_eq!(a.to_string(), "∅");
    }

    #[test]
    fn load_and_reserialize() {
        let input = r#"{
            "players": ["row", "col"],
            "strategies": {"row": ["t", "b"], "col": ["l", "r"]},
            "payoffs": {
                "row": [[1, 1], [0, 0]],
                "col": [[2, {"num": "1", "den": "2"}], [0, 1]]
            }
        }"#;
        let g = load_finite_game(input, reg()).unwrap();
        assert_eq!(g.num_players(), 2);
        assert_eq!(
            g.payoff(1, &[Value::label("t"), Value::label("r")]).unwrap(),
            Q::ratio(1, 2)
        );
        let js = finite_game_to_json(&g).unwrap();
        let text = serde_json::to_string(&js).unwrap();
        let g2 = load_finite_game(&text, reg()).unwrap();
        assert_eq!(
            g2.payoff(0, &[Value::label("b"), Value::label("l")]).unwrap(),
            Q::zero()
        );
    }

    #[test]
    fn load_rejects_malformed_files() {
        let r = reg();
        let ragged = r#"{
            "players": ["a", "b"],
            "strategies": {"a": ["x", "y"], "b": ["u"]},
            "payoffs": {"a": [[1], [2], [3]], "b": [[1], [2]]}
        }"#;
        match load_finite_game(ragged, Arc::clone(&r)) {
            Err(Error::GameFormat { location, .. }) => assert!(location.starts_with("payoffs.a")),
            other => panic!("expected format error, got {other:?}"),
        }

        let dup = r#"{
            "players": ["a", "b"],
            "strategies": {"a": ["x", "x"], "b": ["u"]},
            "payoffs": {"a": [[1], [2]], "b": [[1], [2]]}
        }"#;
        assert!(matches!(load_finite_game(dup, Arc::clone(&r)), Err(Error::GameFormat { .. })));

        let one_player = r#"{
            "players": ["a"],
            "strategies": {"a": ["x"]},
            "payoffs": {"a": [1]}
        }"#;
        assert!(matches!(load_finite_game(one_player, r), Err(Error::GameFormat { .. })));
    }

    #[test]
    fn reduction_json_round_trip() {
        let g = dominance_2x2();
        let r = g.full_reduction().with_part(1, SymbolicSet::from_atoms(["l"]));
        let js = reduction_to_json(&g, &r);
        let back = reduction_from_json(&g, &js).unwrap();
        assert_eq!(back, r);
    }
}
