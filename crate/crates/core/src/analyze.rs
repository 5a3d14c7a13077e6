//! Boundedness and robustness analyzers.
//!
//! Each per-reduction check asks the same shaped question: take a target
//! set of potentially dominated strategies, and verify that every one of
//! them has a dominator that is itself undominated in the relevant scope.
//! The class-level checks quantify those questions over every reduction
//! (or reduction pair) reachable by the chosen elimination mode, which
//! requires a finite game; infinite games are served by curated
//! per-reduction calls instead.
//!
//! Empty reductions make the dominance relation undefined, so every check
//! treats them as vacuously passing rather than erroring.

use serde_json::{json, Value as Json};

use crate::caps::Caps;
use crate::engine::Mode;
use crate::enumerate::{cooccurring_pairs, enumerate_sequences};
use crate::error::{Error, Result};
use crate::exec;
use crate::game::{reduction_to_json, Game, Reduction};
use crate::set::{SymbolicSet, Value};

/// A failed check, pinned to a concrete strategy.
#[derive(Clone, Debug)]
pub struct FailureWitness {
    pub player: String,
    pub strategy: Value,
    /// Which requirement broke, in plain words.
    pub clause: String,
    /// The strategy's dominating set, when it is what carries the failure
    /// (nonempty, yet containing no undominated element).
    pub dominating_set: Option<SymbolicSet>,
    /// For removal-sensitive checks, the set whose removal exposed the
    /// failure.
    pub removed: Option<SymbolicSet>,
    pub reduction: Reduction,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub holds: bool,
    /// What was quantified over, for context in reports.
    pub scope_note: String,
    pub witness: Option<FailureWitness>,
}

impl Verdict {
    fn pass(scope_note: impl Into<String>) -> Self {
        Verdict { holds: true, scope_note: scope_note.into(), witness: None }
    }

    fn fail(scope_note: impl Into<String>, witness: FailureWitness) -> Self {
        Verdict { holds: false, scope_note: scope_note.into(), witness: Some(witness) }
    }

    pub fn to_json(&self, game: &Game) -> Json {
        let witness = self.witness.as_ref().map(|w| {
            json!({
                "player": w.player,
                "strategy": w.strategy.to_string(),
                "clause": w.clause,
                "dominating_set": w.dominating_set.as_ref().map(|s| s.to_string()),
                "removed": w.removed.as_ref().map(|s| s.to_string()),
                "reduction": reduction_to_json(game, &w.reduction),
            })
        });
        json!({
            "holds": self.holds,
            "scope_note": self.scope_note,
            "witness": witness,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundednessKind {
    Completely,
    Locally,
}

impl std::fmt::Display for BoundednessKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundednessKind::Completely => write!(f, "completely"),
            BoundednessKind::Locally => write!(f, "locally"),
        }
    }
}

impl std::str::FromStr for BoundednessKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "completely" | "complete" => Ok(BoundednessKind::Completely),
            "locally" | "local" => Ok(BoundednessKind::Locally),
            other => Err(Error::InvalidConfig(format!(
                "unknown boundedness kind `{other}` (expected `completely` or `locally`)"
            ))),
        }
    }
}

/// First element of a set, preferring exact enumeration over sampling.
fn representative(game: &Game, set: &SymbolicSet) -> Result<Value> {
    if let Some(values) = set.enumerate_values() {
        if let Some(v) = values.into_iter().next() {
            return Ok(v);
        }
    }
    set.witness_value(game.registry())?
        .ok_or_else(|| Error::MalformedSet("no representative of an empty set".into()))
}

/// Core check: every element of `target` dominated by `scope` must be
/// dominated by an element of `scope` undominated within `scope`.
fn bounded_target(
    game: &Game,
    r: &Reduction,
    player: usize,
    target: &SymbolicSet,
    scope: &SymbolicSet,
    clause: &str,
) -> Result<Option<FailureWitness>> {
    let reg = game.registry();
    let dominated = game.dominated_elements(player, target, scope, r)?;
    if dominated.is_empty() {
        return Ok(None);
    }
    let undominated = game.undominated_elements(player, scope, scope, r)?;
    let covered = if undominated.is_empty() {
        SymbolicSet::empty()
    } else {
        game.dominated_elements(player, &dominated, &undominated, r)?
    };
    let bad = dominated.difference(&covered, reg)?;
    if bad.is_empty() {
        return Ok(None);
    }
    let strategy = representative(game, &bad)?;
    let dominating_set = game.dominating_set(player, &strategy, r)?;
    Ok(Some(FailureWitness {
        player: game.players()[player].clone(),
        strategy,
        clause: clause.into(),
        dominating_set: Some(dominating_set),
        removed: None,
        reduction: r.clone(),
    }))
}

/// Every strategy of `r` dominated relative to `r` (dominators anywhere in
/// the full space) has an undominated dominator in the full space.
pub fn is_completely_bounded(game: &Game, r: &Reduction) -> Result<Verdict> {
    let note = "dominators drawn from the full strategy space";
    if r.is_empty() {
        return Ok(Verdict::pass("empty reduction; holds vacuously"));
    }
    for i in 0..game.num_players() {
        if let Some(w) = bounded_target(
            game,
            r,
            i,
            r.part(i),
            game.space(i),
            "dominated, but by no undominated strategy of the full space",
        )? {
            return Ok(Verdict::fail(note, w));
        }
    }
    Ok(Verdict::pass(note))
}

/// Every strategy of `r` dominated by a survivor has an undominated
/// dominator among the survivors.
pub fn is_locally_bounded(game: &Game, r: &Reduction) -> Result<Verdict> {
    let note = "dominators drawn from the surviving strategies";
    if r.is_empty() {
        return Ok(Verdict::pass("empty reduction; holds vacuously"));
    }
    for i in 0..game.num_players() {
        if let Some(w) = bounded_target(
            game,
            r,
            i,
            r.part(i),
            r.part(i),
            "dominated by a survivor, but by no undominated survivor",
        )? {
            return Ok(Verdict::fail(note, w));
        }
    }
    Ok(Verdict::pass(note))
}

/// Boundedness of the whole space seen from `r`: every dominated strategy
/// of the full space, removed or not, has an undominated dominator.
pub fn property_c_at(game: &Game, r: &Reduction) -> Result<Verdict> {
    let note = "all strategies of the full space checked, removed ones included";
    if r.is_empty() {
        return Ok(Verdict::pass("empty reduction; holds vacuously"));
    }
    for i in 0..game.num_players() {
        if let Some(w) = bounded_target(
            game,
            r,
            i,
            game.space(i),
            game.space(i),
            "dominated, but by no undominated strategy",
        )? {
            return Ok(Verdict::fail(note, w));
        }
    }
    Ok(Verdict::pass(note))
}

/// One removal sub-step: after deleting `removed[i]` from each `r_i`, every
/// survivor that was dominated under the old scope must still be dominated
/// by a survivor. `removed` uses empty sets for players who keep
/// everything.
pub fn forgetfulness_check(game: &Game, r: &Reduction, removed: &[SymbolicSet]) -> Result<Verdict> {
    let reg = game.registry();
    if removed.len() != game.num_players() {
        return Err(Error::InvalidConfig(format!(
            "removal lists {} players, the game has {}",
            removed.len(),
            game.num_players()
        )));
    }
    let note = "dominance rechecked against the post-removal survivors";
    if r.is_empty() {
        return Ok(Verdict::pass("empty reduction; holds vacuously"));
    }
    for i in 0..game.num_players() {
        let survivors = r.part(i).difference(&removed[i], reg)?;
        if survivors.is_empty() {
            // The step empties this side; the successor reduction is the
            // canonical empty product and nothing survives to re-check.
            continue;
        }
        let previously = game.dominated_elements(i, &survivors, r.part(i), r)?;
        if previously.is_empty() {
            continue;
        }
        let still = game.dominated_elements(i, &previously, &survivors, r)?;
        let bad = previously.difference(&still, reg)?;
        if !bad.is_empty() {
            let strategy = representative(game, &bad)?;
            let dominating_set = game.dominating_set(i, &strategy, r)?;
            return Ok(Verdict::fail(
                note,
                FailureWitness {
                    player: game.players()[i].clone(),
                    strategy,
                    clause: "dominance lost once its dominators were removed".into(),
                    dominating_set: Some(dominating_set),
                    removed: Some(removed[i].clone()),
                    reduction: r.clone(),
                },
            ));
        }
    }
    Ok(Verdict::pass(note))
}

/// One reduction pair `r ⊇ s`: strategies of `s` dominated at `r` must
/// stay dominated at `s` by a survivor undominated at `s`.
pub fn closure_star_at(game: &Game, r: &Reduction, s: &Reduction) -> Result<Verdict> {
    let reg = game.registry();
    let note = "dominance at the earlier reduction rechecked at the later one";
    if s.is_empty() {
        return Ok(Verdict::pass("empty later reduction; holds vacuously"));
    }
    if !s.is_subset(r, reg)? {
        return Err(Error::InvalidConfig(
            "the later reduction is not a subset of the earlier one".into(),
        ));
    }
    for i in 0..game.num_players() {
        let previously = game.dominated_elements(i, s.part(i), r.part(i), r)?;
        if previously.is_empty() {
            continue;
        }
        let undominated = game.undominated_elements(i, s.part(i), s.part(i), s)?;
        let covered = if undominated.is_empty() {
            SymbolicSet::empty()
        } else {
            game.dominated_elements(i, &previously, &undominated, s)?
        };
        let bad = previously.difference(&covered, reg)?;
        if !bad.is_empty() {
            let strategy = representative(game, &bad)?;
            let dominating_set = game.dominating_set(i, &strategy, s)?;
            return Ok(Verdict::fail(
                note,
                FailureWitness {
                    player: game.players()[i].clone(),
                    strategy,
                    clause: "dominated earlier, but no undominated survivor dominates it now"
                        .into(),
                    dominating_set: Some(dominating_set),
                    removed: None,
                    reduction: s.clone(),
                },
            ));
        }
    }
    Ok(Verdict::pass(note))
}

fn require_finite(game: &Game, what: &str) -> Result<()> {
    if game.is_finite() {
        Ok(())
    } else {
        Err(Error::UnsupportedQuery {
            entry: game.name().into(),
            detail: format!("{what} quantifies over an enumerated class and needs a finite game"),
        })
    }
}

fn first_failure(verdicts: Vec<Verdict>, pass_note: String) -> Verdict {
    for v in verdicts {
        if !v.holds {
            return v;
        }
    }
    Verdict::pass(pass_note)
}

/// Boundedness across every reduction reachable by `mode`.
pub fn class_boundedness(
    game: &Game,
    mode: Mode,
    kind: BoundednessKind,
    caps: &Caps,
) -> Result<Verdict> {
    require_finite(game, "class boundedness")?;
    let class = enumerate_sequences(game, mode, caps)?;
    let reductions: Vec<&Reduction> = class.range().collect();
    let verdicts = exec::try_map_vec(&reductions, |r| match kind {
        BoundednessKind::Completely => is_completely_bounded(game, r),
        BoundednessKind::Locally => is_locally_bounded(game, r),
    })?;
    Ok(first_failure(
        verdicts,
        format!("{kind} bounded at all {} reachable reductions ({mode})", reductions.len()),
    ))
}

/// The whole-space boundedness question at every reachable reduction.
pub fn satisfies_property_c(game: &Game, caps: &Caps) -> Result<Verdict> {
    require_finite(game, "the dominated-by-undominated property")?;
    let class = enumerate_sequences(game, Mode::Nested, caps)?;
    let reductions: Vec<&Reduction> = class.range().collect();
    let verdicts = exec::try_map_vec(&reductions, |r| property_c_at(game, r))?;
    Ok(first_failure(
        verdicts,
        format!("holds at all {} reachable reductions", reductions.len()),
    ))
}

/// Every legal removal at every reachable reduction keeps previously
/// dominated survivors dominated.
pub fn is_forgetfulness_proof(game: &Game, caps: &Caps) -> Result<Verdict> {
    require_finite(game, "forgetfulness proofness")?;
    let reg = game.registry();
    let class = enumerate_sequences(game, Mode::Nested, caps)?;
    let mut checked = 0u64;
    for node in &class.nodes {
        let r = &node.reduction;
        if r.is_empty() {
            continue;
        }
        for i in 0..game.num_players() {
            let removable = game.dominated_elements(i, r.part(i), r.part(i), r)?;
            let Some(values) = removable.enumerate_values() else {
                continue;
            };
            if values.is_empty() {
                continue;
            }
            // Single-player sub-steps suffice: the recheck is relative to
            // the pre-removal reduction, so other players' removals do not
            // interact.
            for mask in 1u64..(1 << values.len()) {
                let chosen: Vec<Value> = values
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, v)| v.clone())
                    .collect();
                let mut removed = vec![SymbolicSet::empty(); game.num_players()];
                removed[i] = SymbolicSet::from_values(&chosen, reg)?;
                let verdict = forgetfulness_check(game, r, &removed)?;
                checked += 1;
                if !verdict.holds {
                    return Ok(verdict);
                }
            }
        }
    }
    Ok(Verdict::pass(format!(
        "{checked} removal sub-steps checked over {} reachable reductions",
        class.nodes.len()
    )))
}

/// Dominance established anywhere along a sequence persists to every later
/// reduction of that sequence.
pub fn closed_under_dominance_star(game: &Game, caps: &Caps) -> Result<Verdict> {
    require_finite(game, "closure under dominance across stages")?;
    let class = enumerate_sequences(game, Mode::Nested, caps)?;
    let pairs = cooccurring_pairs(&class);
    let verdicts = exec::try_map_vec(&pairs, |&(a, b)| {
        closure_star_at(game, &class.nodes[a].reduction, &class.nodes[b].reduction)
    })?;
    Ok(first_failure(
        verdicts,
        format!("{} reachable reduction pairs checked", pairs.len()),
    ))
}

/// Convenience for reports: all class-level verdicts at once.
pub fn full_report(game: &Game, caps: &Caps) -> Result<Json> {
    let full = game.full_reduction();
    let mut doc = serde_json::Map::new();
    doc.insert("game".into(), json!(game.name()));
    doc.insert(
        "completely_bounded_at_full".into(),
        is_completely_bounded(game, &full)?.to_json(game),
    );
    doc.insert(
        "locally_bounded_at_full".into(),
        is_locally_bounded(game, &full)?.to_json(game),
    );
    if game.is_finite() {
        doc.insert(
            "class_completely_bounded".into(),
            class_boundedness(game, Mode::Nested, BoundednessKind::Completely, caps)?
                .to_json(game),
        );
        doc.insert(
            "class_locally_bounded".into(),
            class_boundedness(game, Mode::Nested, BoundednessKind::Locally, caps)?.to_json(game),
        );
        doc.insert(
            "dominated_by_undominated".into(),
            satisfies_property_c(game, caps)?.to_json(game),
        );
        doc.insert(
            "forgetfulness_proof".into(),
            is_forgetfulness_proof(game, caps)?.to_json(game),
        );
        doc.insert(
            "closed_under_dominance_star".into(),
            closed_under_dominance_star(game, caps)?.to_json(game),
        );
    }
    Ok(Json::Object(doc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::load_finite_game;
    use crate::seq::standard_registry;
    use std::sync::Arc;

    fn game_3x2() -> Game {
        // Row strategy `b` is dominated only by `m`, and `m` only by `t`.
        let input = r#"{
            "name": "chain",
            "players": ["row", "col"],
            "strategies": {"row": ["t", "m", "b"], "col": ["l", "r"]},
            "payoffs": {
                "row": [[5, 5], [3, 3], [1, 1]],
                "col": [[1, 0], [1, 0], [1, 0]]
            }
        }"#;
        load_finite_game(input, Arc::new(standard_registry())).unwrap()
    }

    #[test]
    fn finite_games_are_bounded_everywhere() {
        let g = game_3x2();
        let caps = Caps::default();
        assert!(class_boundedness(&g, Mode::Nested, BoundednessKind::Completely, &caps)
            .unwrap()
            .holds);
        assert!(class_boundedness(&g, Mode::Universal, BoundednessKind::Locally, &caps)
            .unwrap()
            .holds);
        assert!(satisfies_property_c(&g, &caps).unwrap().holds);
        assert!(is_forgetfulness_proof(&g, &caps).unwrap().holds);
        assert!(closed_under_dominance_star(&g, &caps).unwrap().holds);
    }

    #[test]
    fn empty_reduction_is_vacuous() {
        let g = game_3x2();
        let empty = Reduction::new(vec![SymbolicSet::empty(), SymbolicSet::empty()]);
        for verdict in [
            is_completely_bounded(&g, &empty).unwrap(),
            is_locally_bounded(&g, &empty).unwrap(),
            property_c_at(&g, &empty).unwrap(),
        ] {
            assert!(verdict.holds);
            assert!(verdict.scope_note.contains("vacuously"));
        }
    }

    #[test]
    fn forgetfulness_check_flags_a_bad_cut() {
        // Removing `t` and `m` from scope while keeping `b` would be an
        // illegal elimination step; the direct sub-step check still
        // answers the counterfactual: `b` was dominated via `m`, and
        // stays dominated via nobody once only `b` survives.
        let g = game_3x2();
        let reg = g.registry();
        let full = g.full_reduction();
        let removed = vec![
            crate::set::parse_set("{t, m}", reg).unwrap(),
            SymbolicSet::empty(),
        ];
        let verdict = forgetfulness_check(&g, &full, &removed).unwrap();
        assert!(!verdict.holds);
        let w = verdict.witness.unwrap();
        assert_eq!(w.player, "row");
        assert_eq!(w.strategy.to_string(), "b");
    }

    #[test]
    fn closure_check_requires_nested_pairs() {
        let g = game_3x2();
        let full = g.full_reduction();
        let smaller = full.with_part(0, crate::set::parse_set("{t}", g.registry()).unwrap());
        // Valid pair.
        assert!(closure_star_at(&g, &full, &smaller).unwrap().holds);
        // Reversed pair is rejected.
        assert!(closure_star_at(&g, &smaller, &full).is_err());
    }

    #[test]
    fn class_checks_reject_infinite_games() {
        use crate::game::AnalyticGame;
        use crate::pattern::ChainPattern;
        use crate::rational::Q;

        #[derive(Debug)]
        struct Stub;
        impl AnalyticGame for Stub {
            fn id(&self) -> &str {
                "stub"
            }
            fn payoff(&self, _: usize, _: &[Value]) -> Result<Q> {
                Ok(Q::from_int(0))
            }
            fn dominates(&self, _: usize, _: &Value, _: &Value, _: &Reduction) -> Result<bool> {
                Ok(false)
            }
            fn dominated_elements(
                &self,
                _: usize,
                _: &SymbolicSet,
                _: &SymbolicSet,
                _: &Reduction,
            ) -> Result<SymbolicSet> {
                Ok(SymbolicSet::empty())
            }
            fn dominating_set(&self, _: usize, _: &Value, _: &Reduction) -> Result<SymbolicSet> {
                Ok(SymbolicSet::empty())
            }
            fn lower_contour_set(
                &self,
                _: usize,
                _: &Value,
                _: &Reduction,
            ) -> Result<SymbolicSet> {
                Ok(SymbolicSet::empty())
            }
            fn dominator_witness(
                &self,
                _: usize,
                _: &Value,
                _: &SymbolicSet,
                _: &Reduction,
            ) -> Result<Value> {
                Err(Error::UnsupportedQuery {
                    entry: "stub".into(),
                    detail: "no dominance".into(),
                })
            }
            fn certify_pattern(&self, _: &ChainPattern) -> bool {
                false
            }
        }

        let reg = Arc::new(standard_registry());
        let space = crate::set::parse_set("[0, 1]", &reg).unwrap();
        let g = Game::analytic(
            "stub",
            vec!["p1".into(), "p2".into()],
            vec![space.clone(), space],
            reg,
            Arc::new(Stub),
        );
        assert!(matches!(
            satisfies_property_c(&g, &Caps::default()),
            Err(Error::UnsupportedQuery { .. })
        ));
    }
}
