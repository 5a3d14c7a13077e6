//! Built-in infinite games with closed-form dominance oracles.
//!
//! Each entry couples a two-player game over symbolic strategy sets with a
//! hand-written [`AnalyticGame`] oracle that answers every dominance query
//! the engine raises during elimination, exactly and in closed form. The
//! entries are chosen so that together they exercise every interesting
//! behavior of the machinery: one-stage collapses, ω-limit cascades with
//! inductive certificates, order-dependent maximal reductions, chains whose
//! middle reductions fail boundedness, and a survivor-scoped chain that
//! needs ω+1 stages.
//!
//! [`verify`] replays the expected outcome of every entry through the public
//! engine and analyzer APIs and reports one pass/fail line per fixture.
//! [`truncation`] builds a finite probe of an entry (payoffs tabulated from
//! the oracle) so brute force can cross-check the closed forms.

use std::sync::Arc;

use serde_json::{json, Value as Json};

use crate::analyze;
use crate::caps::Caps;
use crate::engine::{
    self, EliminationTrace, Mode, Outcome, Policy, RunConfig, Stage, TraceStage,
};
use crate::enumerate;
use crate::error::{Error, Result};
use crate::game::{AnalyticGame, Game, Reduction};
use crate::pattern::{chain_limit, Certificate, ChainPattern, EndpointPattern, PrimPattern};
use crate::rational::Q;
use crate::seq::{standard_registry, LimitValue, Monotonicity, SeqRegistry};
use crate::set::{parse_set, SetPrimitive, SymbolicSet, Value};

/// Catalog ids in presentation order.
pub const IDS: [&str; 8] = [
    "intro_open_interval",
    "ex1_unbounded_at_limit",
    "ex2_order_indep_not_equal",
    "ex3_not_all_bounded",
    "ex4_apt_property_C",
    "ex5_closure_star",
    "gkz_omega_plus_one",
    "closed_interval_identity",
];

/// One catalog entry: a named analytic game plus a one-line description of
/// what it demonstrates. Expected fixtures live in [`verify`]; finite
/// cross-check probes in [`truncation`].
pub struct CatalogEntry {
    pub id: &'static str,
    pub summary: &'static str,
    pub game: Game,
}

/// `(id, summary)` pairs for every entry, in catalog order.
pub fn list() -> Vec<(&'static str, &'static str)> {
    IDS.iter().map(|id| (*id, summary_of(id).expect("known id"))).collect()
}

fn summary_of(id: &str) -> Option<&'static str> {
    Some(match id {
        "intro_open_interval" => {
            "open unit interval, payoff = own point: one stage can remove everything, \
             and the maximal reductions form the family {∅} ∪ {single points}"
        }
        "ex1_unbounded_at_limit" => {
            "a three-stage shortcut chain whose middle reduction is not completely \
             bounded; its last step needs dominators from outside the current reduction"
        }
        "ex2_order_indep_not_equal" => {
            "alternating cascade with the order-independent reduction-scoped limit \
             {1}×{1}, which space-scoped elimination still shrinks to ∅"
        }
        "ex3_not_all_bounded" => {
            "no strategy is ever removable, yet the left-column product reduction \
             fails complete boundedness"
        }
        "ex4_apt_property_C" => {
            "two labels survive an ω cascade of rationals; the limit violates the \
             undominated-cover property that every finite truncation satisfies"
        }
        "ex5_closure_star" => {
            "keeping or discarding the sink strategy -1 drives the same cascade to \
             two different maximal reductions; closure under undominated dominators fails"
        }
        "gkz_omega_plus_one" => {
            "survivor-scoped elimination needs ω+1 stages to empty the open interval \
             that reduction-scoped elimination empties in one"
        }
        "closed_interval_identity" => {
            "closed unit interval: [0, 1) is completely bounded but not locally \
             bounded, and no elimination sequence ever visits it"
        }
        _ => return None,
    })
}

/// Builds the entry for `id`. Unknown ids are an input error.
pub fn instantiate(id: &str) -> Result<CatalogEntry> {
    let reg = Arc::new(standard_registry());
    let Some(summary) = summary_of(id) else {
        return Err(Error::InvalidConfig(format!(
            "unknown catalog id `{id}`; run `catalog list` for the available entries"
        )));
    };
    let canonical = IDS.iter().find(|k| **k == id).expect("known id");
    let game = match id {
        "intro_open_interval" | "gkz_omega_plus_one" => identity_game(canonical, "(0, 1)", &reg)?,
        "closed_interval_identity" => identity_game(canonical, "[0, 1]", &reg)?,
        "ex1_unbounded_at_limit" => {
            let spaces =
                vec![parse_set("[0, 1]", &reg)?, parse_set("{Left, Center, Right}", &reg)?];
            let oracle = Arc::new(UnboundedAtLimitOracle {
                id: canonical.to_string(),
                spaces: spaces.clone(),
                reg: Arc::clone(&reg),
            });
            Game::analytic(
                *canonical,
                vec!["row".into(), "col".into()],
                spaces,
                Arc::clone(&reg),
                oracle,
            )
        }
        "ex2_order_indep_not_equal" => {
            let spaces =
                vec![parse_set("tail(even, 0) ∪ {1}", &reg)?, parse_set("tail(odd, 0) ∪ {1}", &reg)?];
            let oracle = Arc::new(OrderIndepOracle {
                id: canonical.to_string(),
                spaces: spaces.clone(),
                reg: Arc::clone(&reg),
            });
            Game::analytic(
                *canonical,
                vec!["p1".into(), "p2".into()],
                spaces,
                Arc::clone(&reg),
                oracle,
            )
        }
        "ex3_not_all_bounded" => {
            let spaces = vec![parse_set("[0, 1]", &reg)?, parse_set("{Left, Right}", &reg)?];
            let oracle = Arc::new(NotAllBoundedOracle {
                id: canonical.to_string(),
                spaces: spaces.clone(),
                reg: Arc::clone(&reg),
            });
            Game::analytic(
                *canonical,
                vec!["row".into(), "col".into()],
                spaces,
                Arc::clone(&reg),
                oracle,
            )
        }
        "ex4_apt_property_C" => {
            let spaces = vec![
                parse_set("{Left, Right} ∪ tail(even, 0)", &reg)?,
                parse_set("{Left, Right} ∪ tail(odd, 0)", &reg)?,
            ];
            let oracle = Arc::new(LabelCascadeOracle {
                id: canonical.to_string(),
                spaces: spaces.clone(),
                reg: Arc::clone(&reg),
            });
            Game::analytic(
                *canonical,
                vec!["p1".into(), "p2".into()],
                spaces,
                Arc::clone(&reg),
                oracle,
            )
        }
        "ex5_closure_star" => {
            let spaces =
                vec![parse_set("{-1} ∪ tail(even, 0)", &reg)?, parse_set("tail(odd, 0) ∪ {1}", &reg)?];
            let oracle = Arc::new(SinkCascadeOracle {
                id: canonical.to_string(),
                spaces: spaces.clone(),
                reg: Arc::clone(&reg),
            });
            Game::analytic(
                *canonical,
                vec!["p1".into(), "p2".into()],
                spaces,
                Arc::clone(&reg),
                oracle,
            )
        }
        _ => unreachable!("id validated above"),
    };
    Ok(CatalogEntry { id: canonical, summary, game })
}

fn identity_game(id: &'static str, space: &str, reg: &Arc<SeqRegistry>) -> Result<Game> {
    let spaces = vec![parse_set(space, reg)?, parse_set("{*}", reg)?];
    let oracle = Arc::new(IdentityOracle {
        id: id.to_string(),
        spaces: spaces.clone(),
        reg: Arc::clone(reg),
    });
    Ok(Game::analytic(
        id,
        vec!["picker".into(), "bystander".into()],
        spaces,
        Arc::clone(reg),
        oracle,
    ))
}

// ---------------------------------------------------------------------------
// Shared oracle helpers

fn sup_q(set: &SymbolicSet, reg: &SeqRegistry) -> Result<Option<Q>> {
    Ok(set.numeric_sup(reg)?.map(|(v, _)| v))
}

fn inf_q(set: &SymbolicSet, reg: &SeqRegistry) -> Result<Option<Q>> {
    Ok(set.numeric_inf(reg)?.map(|(v, _)| v))
}

/// `{x in target : x < sup and x < cap}`; empty when `sup` is `None`.
///
/// Correct whether or not the supremum is attained: if some member equals
/// the supremum it dominates everything strictly below it, and if none does,
/// members approach it from below with the same effect.
fn below_capped_sup(
    target: &SymbolicSet,
    cap: Option<&Q>,
    sup: Option<&Q>,
    reg: &SeqRegistry,
) -> Result<SymbolicSet> {
    let Some(s) = sup else { return Ok(SymbolicSet::empty()) };
    let bound = match cap {
        Some(m) if m < s => m,
        _ => s,
    };
    target.numeric_below(bound, true, reg)
}

/// First member of `candidates ∩ scope`, as a concrete dominator witness.
fn pick_witness(
    entry: &str,
    candidates: &SymbolicSet,
    scope: &SymbolicSet,
    reg: &SeqRegistry,
) -> Result<Value> {
    let in_scope = candidates.intersect(scope, reg)?;
    in_scope.witness_value(reg)?.ok_or_else(|| Error::UnsupportedQuery {
        entry: entry.to_string(),
        detail: "no dominator inside the requested scope".into(),
    })
}

fn num_of<'v>(entry: &str, v: &'v Value) -> Result<&'v Q> {
    match v {
        Value::Num(q) => Ok(q),
        Value::Label(l) => Err(Error::UnsupportedQuery {
            entry: entry.to_string(),
            detail: format!("`{l}` is not a numeric strategy"),
        }),
    }
}

fn opp(r: &Reduction, player: usize) -> &SymbolicSet {
    r.part(1 - player)
}

fn one_point(reg: &SeqRegistry) -> SymbolicSet {
    let _ = reg;
    SymbolicSet::singleton(&Value::Num(Q::one()))
}

/// Matches `[MovingTail{seq_id, base, step: 1}]` optionally preceded and/or
/// followed by the given constant primitives, returning the tail base.
fn moving_tail_base(prims: &[PrimPattern], seq_id: &str) -> Option<i64> {
    match prims {
        [PrimPattern::MovingTail { seq, base, step: 1 }] if seq == seq_id => Some(*base),
        _ => None,
    }
}

/// Alternating-cascade alignment: both tails advance one index per pattern
/// step, and the opponent's tail is at the same index or one behind. Every
/// instance pair is then bridged by two legal single-point removals.
fn cascade_aligned(b1: i64, b2: i64) -> bool {
    b1 >= 0 && b2 >= 0 && (b1 == b2 || b1 == b2 + 1)
}

// ---------------------------------------------------------------------------
// Identity payoff on an interval, with a one-strategy bystander

/// Payoff of the picker is the chosen point itself; the bystander is paid 0
/// and owns a single strategy `*`. Dominance is the order on the interval:
/// `b` dominates `a` iff `b > a`, so exactly the points below the supremum
/// of the dominator scope are dominated.
struct IdentityOracle {
    id: String,
    spaces: Vec<SymbolicSet>,
    reg: Arc<SeqRegistry>,
}

impl AnalyticGame for IdentityOracle {
    fn id(&self) -> &str {
        &self.id
    }

    fn payoff(&self, player: usize, profile: &[Value]) -> Result<Q> {
        match player {
            0 => num_of(&self.id, &profile[0]).cloned(),
            _ => Ok(Q::zero()),
        }
    }

    fn dominates(&self, player: usize, a: &Value, b: &Value, _r: &Reduction) -> Result<bool> {
        if player != 0 {
            return Ok(false);
        }
        Ok(num_of(&self.id, a)? < num_of(&self.id, b)?)
    }

    fn dominated_elements(
        &self,
        player: usize,
        target: &SymbolicSet,
        scope: &SymbolicSet,
        _r: &Reduction,
    ) -> Result<SymbolicSet> {
        if player != 0 {
            return Ok(SymbolicSet::empty());
        }
        let s = sup_q(scope, &self.reg)?;
        below_capped_sup(target, None, s.as_ref(), &self.reg)
    }

    fn dominating_set(&self, player: usize, a: &Value, _r: &Reduction) -> Result<SymbolicSet> {
        if player != 0 {
            return Ok(SymbolicSet::empty());
        }
        self.spaces[0].numeric_above(num_of(&self.id, a)?, true, &self.reg)
    }

    fn lower_contour_set(&self, player: usize, a: &Value, _r: &Reduction) -> Result<SymbolicSet> {
        if player != 0 {
            return Ok(SymbolicSet::empty());
        }
        self.spaces[0].numeric_below(num_of(&self.id, a)?, true, &self.reg)
    }

    fn dominator_witness(
        &self,
        player: usize,
        a: &Value,
        scope: &SymbolicSet,
        r: &Reduction,
    ) -> Result<Value> {
        pick_witness(&self.id, &self.dominating_set(player, a, r)?, scope, &self.reg)
    }

    fn certify_pattern(&self, pattern: &ChainPattern) -> bool {
        // A chain of intervals (l_t, c) with l_t strictly climbing a
        // registered sequence toward a limit L <= c: each instance removes a
        // block that lies strictly below the survivors' supremum, which is a
        // legal step in every scope, for every t.
        if pattern.players.len() != 2 {
            return false;
        }
        let bystander_ok = matches!(
            pattern.players[1].as_slice(),
            [PrimPattern::ConstAtom { label }] if self.spaces[1].has_label(label)
        );
        if !bystander_ok {
            return false;
        }
        let [PrimPattern::MovingInterval {
            lo: EndpointPattern::Moving { seq, base, step },
            hi: EndpointPattern::Const { value: hi },
            lo_closed: false,
            hi_closed: _,
        }] = pattern.players[0].as_slice()
        else {
            return false;
        };
        if *step < 1 {
            return false;
        }
        let Ok(s) = self.reg.get(seq) else { return false };
        if *base < s.domain_start() || !matches!(s.monotonicity(), Monotonicity::Increasing) {
            return false;
        }
        let LimitValue::Finite(limit) = s.limit() else { return false };
        if limit > hi {
            return false;
        }
        match pattern.instantiate(0, &self.reg) {
            Ok(parts) => parts[0].is_subset(&self.spaces[0], &self.reg).unwrap_or(false),
            Err(_) => false,
        }
    }

    fn removal_rule(
        &self,
        _player: usize,
        _removed: &SetPrimitive,
        _r: &Reduction,
    ) -> Option<String> {
        Some("payoff equals the chosen point, so any surviving larger point dominates".into())
    }
}

// ---------------------------------------------------------------------------
// Interval versus a three-item menu

/// The row player picks a point of [0, 1] and is paid the point when the
/// column plays Left, the point when it is below 1 and the column plays
/// Right, and 0 otherwise. The column player's payoff depends only on its
/// own choice: Left 1, Center 0, Right -1.
///
/// Against a scope containing Center no row strategy dominates any other
/// (everything ties at 0 in the Center column). Against {Left} dominance is
/// the plain order; against {Right} it is the order of `f(a) = a` truncated
/// to 0 at `a = 1`; against {Left, Right} a dominator must win both
/// comparisons, which isolates the point 1.
struct UnboundedAtLimitOracle {
    id: String,
    spaces: Vec<SymbolicSet>,
    reg: Arc<SeqRegistry>,
}

impl UnboundedAtLimitOracle {
    fn col_pay(&self, label: &str) -> Result<Q> {
        match label {
            "Left" => Ok(Q::one()),
            "Center" => Ok(Q::zero()),
            "Right" => Ok(Q::from_int(-1)),
            other => Err(Error::UnsupportedQuery {
                entry: self.id.clone(),
                detail: format!("unknown column strategy `{other}`"),
            }),
        }
    }

    /// Row payoff against the Right column.
    fn truncated(&self, a: &Q) -> Q {
        if *a < Q::one() {
            a.clone()
        } else {
            Q::zero()
        }
    }

    /// `{b in given set : f(b) > f(a)}` is nonempty iff `f(a) < sup f`;
    /// `sup f` over a scope is the supremum of the members below 1.
    fn truncated_sup(&self, scope: &SymbolicSet) -> Result<Option<Q>> {
        sup_q(&scope.numeric_below(&Q::one(), true, &self.reg)?, &self.reg)
    }
}

impl AnalyticGame for UnboundedAtLimitOracle {
    fn id(&self) -> &str {
        &self.id
    }

    fn payoff(&self, player: usize, profile: &[Value]) -> Result<Q> {
        let col = match &profile[1] {
            Value::Label(l) => l.as_str(),
            Value::Num(_) => {
                return Err(Error::UnsupportedQuery {
                    entry: self.id.clone(),
                    detail: "column strategies are labels".into(),
                })
            }
        };
        match player {
            0 => {
                let a = num_of(&self.id, &profile[0])?;
                Ok(match col {
                    "Left" => a.clone(),
                    "Right" => self.truncated(a),
                    _ => Q::zero(),
                })
            }
            _ => self.col_pay(col),
        }
    }

    fn dominates(&self, player: usize, a: &Value, b: &Value, r: &Reduction) -> Result<bool> {
        let t = opp(r, player);
        if player == 1 {
            let (pa, pb) = match (a, b) {
                (Value::Label(la), Value::Label(lb)) => (self.col_pay(la)?, self.col_pay(lb)?),
                _ => return Ok(false),
            };
            return Ok(pb > pa);
        }
        if t.has_label("Center") {
            return Ok(false);
        }
        let (x, y) = (num_of(&self.id, a)?, num_of(&self.id, b)?);
        let mut ok = true;
        if t.has_label("Left") {
            ok &= y > x;
        }
        if t.has_label("Right") {
            ok &= self.truncated(y) > self.truncated(x);
        }
        Ok(ok)
    }

    fn dominated_elements(
        &self,
        player: usize,
        target: &SymbolicSet,
        scope: &SymbolicSet,
        r: &Reduction,
    ) -> Result<SymbolicSet> {
        let reg = &*self.reg;
        let t = opp(r, player);
        if player == 1 {
            let best = scope
                .atoms()
                .iter()
                .map(|l| self.col_pay(l))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .max();
            let Some(best) = best else { return Ok(SymbolicSet::empty()) };
            let mut dominated = Vec::new();
            for l in target.atoms() {
                if self.col_pay(l)? < best {
                    dominated.push(l.clone());
                }
            }
            return Ok(SymbolicSet::from_atoms(dominated));
        }
        if t.has_label("Center") {
            return Ok(SymbolicSet::empty());
        }
        match (t.has_label("Left"), t.has_label("Right")) {
            (true, false) => {
                let s = sup_q(scope, reg)?;
                below_capped_sup(target, None, s.as_ref(), reg)
            }
            (true, true) => {
                // A dominator must beat `a` in both columns, so it must lie
                // in (a, 1); the point 1 is isolated and undominated.
                let s = self.truncated_sup(scope)?;
                below_capped_sup(target, None, s.as_ref(), reg)
            }
            (false, true) => {
                let s = self.truncated_sup(scope)?;
                let mut out = below_capped_sup(target, None, s.as_ref(), reg)?;
                // f(1) = 0, so 1 is dominated as soon as anything in the
                // scope has a positive truncated payoff.
                if let Some(s) = s {
                    if s > Q::zero() && target.contains_num(&Q::one(), reg)? {
                        out = out.union(&one_point(reg), reg)?;
                    }
                }
                Ok(out)
            }
            (false, false) => Ok(SymbolicSet::empty()),
        }
    }

    fn dominating_set(&self, player: usize, a: &Value, r: &Reduction) -> Result<SymbolicSet> {
        let reg = &*self.reg;
        let t = opp(r, player);
        if player == 1 {
            let pa = match a {
                Value::Label(l) => self.col_pay(l)?,
                _ => return Ok(SymbolicSet::empty()),
            };
            let mut out = Vec::new();
            for l in self.spaces[1].atoms() {
                if self.col_pay(l)? > pa {
                    out.push(l.clone());
                }
            }
            return Ok(SymbolicSet::from_atoms(out));
        }
        if t.has_label("Center") {
            return Ok(SymbolicSet::empty());
        }
        let x = num_of(&self.id, a)?;
        match (t.has_label("Left"), t.has_label("Right")) {
            (true, false) => self.spaces[0].numeric_above(x, true, reg),
            (true, true) => {
                if *x >= Q::one() {
                    Ok(SymbolicSet::empty())
                } else {
                    self.spaces[0]
                        .numeric_above(x, true, reg)?
                        .numeric_below(&Q::one(), true, reg)
                }
            }
            (false, true) => {
                let fx = self.truncated(x);
                self.spaces[0]
                    .numeric_above(&fx, true, reg)?
                    .numeric_below(&Q::one(), true, reg)
            }
            (false, false) => Ok(SymbolicSet::empty()),
        }
    }

    fn lower_contour_set(&self, player: usize, a: &Value, r: &Reduction) -> Result<SymbolicSet> {
        let reg = &*self.reg;
        let t = opp(r, player);
        if player == 1 {
            let pa = match a {
                Value::Label(l) => self.col_pay(l)?,
                _ => return Ok(SymbolicSet::empty()),
            };
            let mut out = Vec::new();
            for l in self.spaces[1].atoms() {
                if self.col_pay(l)? < pa {
                    out.push(l.clone());
                }
            }
            return Ok(SymbolicSet::from_atoms(out));
        }
        if t.has_label("Center") {
            return Ok(SymbolicSet::empty());
        }
        let x = num_of(&self.id, a)?;
        match (t.has_label("Left"), t.has_label("Right")) {
            (true, false) => self.spaces[0].numeric_below(x, true, reg),
            (true, true) => {
                if *x >= Q::one() {
                    Ok(SymbolicSet::empty())
                } else {
                    self.spaces[0].numeric_below(x, true, reg)
                }
            }
            (false, true) => {
                let fx = self.truncated(x);
                let mut out = self.spaces[0]
                    .numeric_below(&fx, true, reg)?
                    .numeric_below(&Q::one(), true, reg)?;
                if fx > Q::zero() {
                    out = out.union(&one_point(reg), reg)?;
                }
                Ok(out)
            }
            (false, false) => Ok(SymbolicSet::empty()),
        }
    }

    fn dominator_witness(
        &self,
        player: usize,
        a: &Value,
        scope: &SymbolicSet,
        r: &Reduction,
    ) -> Result<Value> {
        pick_witness(&self.id, &self.dominating_set(player, a, r)?, scope, &self.reg)
    }

    fn certify_pattern(&self, _pattern: &ChainPattern) -> bool {
        // Every run of this game terminates in finitely many stages; no
        // limit template is ever certified.
        false
    }

    fn removal_rule(
        &self,
        player: usize,
        _removed: &SetPrimitive,
        _r: &Reduction,
    ) -> Option<String> {
        match player {
            0 => Some("dominated by a surviving point closer to 1 in every surviving column".into()),
            _ => Some("a higher-ranked column strategy survives".into()),
        }
    }
}

// ---------------------------------------------------------------------------
// Min-of-both cascade with a shared top point

/// Both players pick from an increasing rational sequence capped by 1, and
/// each is paid the minimum of the two choices, except that the profile
/// (1, 1) pays 0 to both. Dominance relative to an opponent part `T` with
/// minimum `m`: for points below 1, `b` dominates `a` iff `a < m` and
/// `b > a`; the dominator 1 only works when `1 ∉ T`, and 1 itself is
/// dominated exactly when `T = {1}` and some positive point below 1 is in
/// scope.
struct OrderIndepOracle {
    id: String,
    spaces: Vec<SymbolicSet>,
    reg: Arc<SeqRegistry>,
}

impl OrderIndepOracle {
    fn opponent_min(&self, t: &SymbolicSet) -> Result<Q> {
        inf_q(t, &self.reg)?.ok_or_else(|| Error::UnsupportedQuery {
            entry: self.id.clone(),
            detail: "opponent part has no numeric members".into(),
        })
    }
}

impl AnalyticGame for OrderIndepOracle {
    fn id(&self) -> &str {
        &self.id
    }

    fn payoff(&self, player: usize, profile: &[Value]) -> Result<Q> {
        let own = num_of(&self.id, &profile[player])?;
        let other = num_of(&self.id, &profile[1 - player])?;
        if *own == Q::one() && *other == Q::one() {
            return Ok(Q::zero());
        }
        Ok(own.clone().min(other.clone()))
    }

    fn dominates(&self, player: usize, a: &Value, b: &Value, r: &Reduction) -> Result<bool> {
        let reg = &*self.reg;
        let t = opp(r, player);
        let (x, y) = (num_of(&self.id, a)?, num_of(&self.id, b)?);
        let one = Q::one();
        let t_has_one = t.contains_num(&one, reg)?;
        let t_only_one = t_has_one && t.numeric_below(&one, true, reg)?.is_empty();
        if *x == one {
            return Ok(t_only_one && *y > Q::zero() && *y < one);
        }
        if *y == one {
            return Ok(!t_has_one && *x < self.opponent_min(t)?);
        }
        Ok(*y > *x && *x < self.opponent_min(t)?)
    }

    fn dominated_elements(
        &self,
        player: usize,
        target: &SymbolicSet,
        scope: &SymbolicSet,
        r: &Reduction,
    ) -> Result<SymbolicSet> {
        let reg = &*self.reg;
        let t = opp(r, player);
        let one = Q::one();
        let m = self.opponent_min(t)?;
        let t_has_one = t.contains_num(&one, reg)?;
        let t_only_one = t_has_one && t.numeric_below(&one, true, reg)?.is_empty();
        // The dominator 1 loses against an opponent 1, so with 1 in the
        // opponent part only sub-1 scope members can dominate.
        let scope_eff =
            if t_has_one { scope.numeric_below(&one, true, reg)? } else { scope.clone() };
        let s = sup_q(&scope_eff, reg)?;
        let mut out = below_capped_sup(target, Some(&m), s.as_ref(), reg)?;
        if t_only_one && target.contains_num(&one, reg)? {
            if let Some(s) = &s {
                if *s > Q::zero() {
                    out = out.union(&one_point(reg), reg)?;
                }
            }
        }
        Ok(out)
    }

    fn dominating_set(&self, player: usize, a: &Value, r: &Reduction) -> Result<SymbolicSet> {
        let reg = &*self.reg;
        let t = opp(r, player);
        let x = num_of(&self.id, a)?;
        let one = Q::one();
        let t_has_one = t.contains_num(&one, reg)?;
        let t_only_one = t_has_one && t.numeric_below(&one, true, reg)?.is_empty();
        if *x == one {
            if !t_only_one {
                return Ok(SymbolicSet::empty());
            }
            return self.spaces[player]
                .numeric_above(&Q::zero(), true, reg)?
                .numeric_below(&one, true, reg);
        }
        if *x >= self.opponent_min(t)? {
            return Ok(SymbolicSet::empty());
        }
        let mut out = self.spaces[player]
            .numeric_above(x, true, reg)?
            .numeric_below(&one, true, reg)?;
        if !t_has_one {
            out = out.union(&one_point(reg), reg)?;
        }
        Ok(out)
    }

    fn lower_contour_set(&self, player: usize, a: &Value, r: &Reduction) -> Result<SymbolicSet> {
        let reg = &*self.reg;
        let t = opp(r, player);
        let x = num_of(&self.id, a)?;
        let one = Q::one();
        let t_has_one = t.contains_num(&one, reg)?;
        let t_only_one = t_has_one && t.numeric_below(&one, true, reg)?.is_empty();
        let m = self.opponent_min(t)?;
        if *x == one {
            if t_has_one {
                return Ok(SymbolicSet::empty());
            }
            return self.spaces[player].numeric_below(&m, true, reg);
        }
        let bound = if m < *x { m } else { x.clone() };
        let mut out = self.spaces[player].numeric_below(&bound, true, reg)?;
        if t_only_one && *x > Q::zero() {
            out = out.union(&one_point(reg), reg)?;
        }
        Ok(out)
    }

    fn dominator_witness(
        &self,
        player: usize,
        a: &Value,
        scope: &SymbolicSet,
        r: &Reduction,
    ) -> Result<Value> {
        pick_witness(&self.id, &self.dominating_set(player, a, r)?, scope, &self.reg)
    }

    fn certify_pattern(&self, pattern: &ChainPattern) -> bool {
        if pattern.players.len() != 2 {
            return false;
        }
        let with_one = |prims: &[PrimPattern], seq_id: &str| match prims {
            [PrimPattern::MovingTail { seq, base, step: 1 }, PrimPattern::ConstPoint { value }]
                if seq == seq_id && *value == Q::one() =>
            {
                Some(*base)
            }
            _ => None,
        };
        match (with_one(&pattern.players[0], "even"), with_one(&pattern.players[1], "odd")) {
            (Some(b1), Some(b2)) => cascade_aligned(b1, b2),
            _ => false,
        }
    }

    fn removal_rule(
        &self,
        _player: usize,
        _removed: &SetPrimitive,
        _r: &Reduction,
    ) -> Option<String> {
        Some("below the opponent's minimum, any larger surviving point dominates".into())
    }
}

// ---------------------------------------------------------------------------
// Interval against a constant-payoff menu

/// The row player is paid its point when it is below 1 and the column plays
/// Left, 0 otherwise; column payoffs are constant. The Right column ties
/// every pair of row strategies at 0, so nothing is ever strictly dominated
/// while Right survives, and the column player never has dominated
/// strategies at all.
struct NotAllBoundedOracle {
    id: String,
    spaces: Vec<SymbolicSet>,
    reg: Arc<SeqRegistry>,
}

impl NotAllBoundedOracle {
    fn truncated(&self, a: &Q) -> Q {
        if *a < Q::one() {
            a.clone()
        } else {
            Q::zero()
        }
    }

    fn truncated_sup(&self, scope: &SymbolicSet) -> Result<Option<Q>> {
        sup_q(&scope.numeric_below(&Q::one(), true, &self.reg)?, &self.reg)
    }
}

impl AnalyticGame for NotAllBoundedOracle {
    fn id(&self) -> &str {
        &self.id
    }

    fn payoff(&self, player: usize, profile: &[Value]) -> Result<Q> {
        if player == 1 {
            return Ok(Q::zero());
        }
        let a = num_of(&self.id, &profile[0])?;
        match &profile[1] {
            Value::Label(l) if l == "Left" => Ok(self.truncated(a)),
            Value::Label(_) => Ok(Q::zero()),
            Value::Num(_) => Err(Error::UnsupportedQuery {
                entry: self.id.clone(),
                detail: "column strategies are labels".into(),
            }),
        }
    }

    fn dominates(&self, player: usize, a: &Value, b: &Value, r: &Reduction) -> Result<bool> {
        if player == 1 {
            return Ok(false);
        }
        let t = opp(r, player);
        if t.has_label("Right") {
            return Ok(false);
        }
        Ok(self.truncated(num_of(&self.id, b)?) > self.truncated(num_of(&self.id, a)?))
    }

    fn dominated_elements(
        &self,
        player: usize,
        target: &SymbolicSet,
        scope: &SymbolicSet,
        r: &Reduction,
    ) -> Result<SymbolicSet> {
        let reg = &*self.reg;
        if player == 1 || opp(r, player).has_label("Right") {
            return Ok(SymbolicSet::empty());
        }
        let s = self.truncated_sup(scope)?;
        let mut out = below_capped_sup(target, None, s.as_ref(), reg)?;
        if let Some(s) = s {
            if s > Q::zero() && target.contains_num(&Q::one(), reg)? {
                out = out.union(&one_point(reg), reg)?;
            }
        }
        Ok(out)
    }

    fn dominating_set(&self, player: usize, a: &Value, r: &Reduction) -> Result<SymbolicSet> {
        let reg = &*self.reg;
        if player == 1 || opp(r, player).has_label("Right") {
            return Ok(SymbolicSet::empty());
        }
        let fx = self.truncated(num_of(&self.id, a)?);
        self.spaces[0].numeric_above(&fx, true, reg)?.numeric_below(&Q::one(), true, reg)
    }

    fn lower_contour_set(&self, player: usize, a: &Value, r: &Reduction) -> Result<SymbolicSet> {
        let reg = &*self.reg;
        if player == 1 || opp(r, player).has_label("Right") {
            return Ok(SymbolicSet::empty());
        }
        let fx = self.truncated(num_of(&self.id, a)?);
        let mut out = self.spaces[0].numeric_below(&fx, true, reg)?;
        if fx > Q::zero() {
            out = out.union(&one_point(reg), reg)?;
        }
        Ok(out)
    }

    fn dominator_witness(
        &self,
        player: usize,
        a: &Value,
        scope: &SymbolicSet,
        r: &Reduction,
    ) -> Result<Value> {
        pick_witness(&self.id, &self.dominating_set(player, a, r)?, scope, &self.reg)
    }

    fn certify_pattern(&self, _pattern: &ChainPattern) -> bool {
        false
    }

    fn removal_rule(
        &self,
        _player: usize,
        _removed: &SetPrimitive,
        _r: &Reduction,
    ) -> Option<String> {
        Some("a surviving point with a larger Left-column payoff dominates".into())
    }
}

// ---------------------------------------------------------------------------
// Min cascade with two self-matching labels

/// Both players own the labels Left and Right plus an increasing rational
/// sequence. Rational against rational pays the minimum; rational against a
/// label pays the rational itself; a label pays 1 against the same label
/// and 0 otherwise. Labels block each other (a label is dominated only when
/// the opponent part is exactly the other label or label-free), so the
/// rationals cascade away at ω while both labels survive.
struct LabelCascadeOracle {
    id: String,
    spaces: Vec<SymbolicSet>,
    reg: Arc<SeqRegistry>,
}

impl LabelCascadeOracle {
    /// Exactly the single given label, nothing else.
    fn only_label(&self, t: &SymbolicSet, label: &str) -> bool {
        t.has_label(label) && t.atoms().len() == 1 && t.numeric_prims().is_empty()
    }

    fn other(label: &str) -> &'static str {
        if label == "Left" {
            "Right"
        } else {
            "Left"
        }
    }

    /// Whether a numeric dominator can beat the label `lab`: the label must
    /// be absent from the opponent part and every opponent rational must be
    /// positive (a 0 opponent ties the comparison at 0).
    fn label_beatable_by_numeric(&self, t: &SymbolicSet, lab: &str) -> Result<bool> {
        if t.has_label(lab) {
            return Ok(false);
        }
        Ok(match inf_q(t, &self.reg)? {
            Some(m) => m > Q::zero(),
            None => true,
        })
    }
}

impl AnalyticGame for LabelCascadeOracle {
    fn id(&self) -> &str {
        &self.id
    }

    fn payoff(&self, player: usize, profile: &[Value]) -> Result<Q> {
        let own = &profile[player];
        let other = &profile[1 - player];
        Ok(match (own, other) {
            (Value::Num(x), Value::Num(t)) => x.clone().min(t.clone()),
            (Value::Num(x), Value::Label(_)) => x.clone(),
            (Value::Label(a), Value::Label(b)) if a == b => Q::one(),
            (Value::Label(_), _) => Q::zero(),
        })
    }

    fn dominates(&self, player: usize, a: &Value, b: &Value, r: &Reduction) -> Result<bool> {
        let t = opp(r, player);
        let m = inf_q(t, &self.reg)?;
        Ok(match (a, b) {
            (Value::Num(x), Value::Num(y)) => y > x && m.map_or(true, |m| *x < m),
            (Value::Label(lab), Value::Num(y)) => {
                *y > Q::zero() && self.label_beatable_by_numeric(t, lab)?
            }
            (Value::Num(_), Value::Label(lab)) | (Value::Label(_), Value::Label(lab)) => {
                self.only_label(t, lab)
            }
        })
    }

    fn dominated_elements(
        &self,
        player: usize,
        target: &SymbolicSet,
        scope: &SymbolicSet,
        r: &Reduction,
    ) -> Result<SymbolicSet> {
        let reg = &*self.reg;
        let t = opp(r, player);
        let m = inf_q(t, reg)?;
        let s = sup_q(scope, reg)?;
        let mut out = below_capped_sup(target, m.as_ref(), s.as_ref(), reg)?;
        // A lone opponent label makes the matching scope label dominate
        // every rational (1 beats them all, 0 ties are impossible).
        for lab in ["Left", "Right"] {
            if self.only_label(t, lab) && scope.has_label(lab) {
                out = out.union(&target.numerics_only(), reg)?;
            }
        }
        let mut dominated_labels = Vec::new();
        for lab in ["Left", "Right"] {
            if !target.has_label(lab) {
                continue;
            }
            let numeric_dom = self.label_beatable_by_numeric(t, lab)?
                && s.as_ref().map_or(false, |s| *s > Q::zero());
            let label_dom =
                self.only_label(t, Self::other(lab)) && scope.has_label(Self::other(lab));
            if numeric_dom || label_dom {
                dominated_labels.push(lab.to_string());
            }
        }
        if !dominated_labels.is_empty() {
            out = out.union(&SymbolicSet::from_atoms(dominated_labels), reg)?;
        }
        Ok(out)
    }

    fn dominating_set(&self, player: usize, a: &Value, r: &Reduction) -> Result<SymbolicSet> {
        let reg = &*self.reg;
        let t = opp(r, player);
        let m = inf_q(t, reg)?;
        let space = &self.spaces[player];
        match a {
            Value::Num(x) => {
                let mut out = if m.map_or(true, |m| *x < m) {
                    space.numeric_above(x, true, reg)?
                } else {
                    SymbolicSet::empty()
                };
                for lab in ["Left", "Right"] {
                    if self.only_label(t, lab) && space.has_label(lab) {
                        out = out.union(&SymbolicSet::from_atoms([lab]), reg)?;
                    }
                }
                Ok(out)
            }
            Value::Label(lab) => {
                let mut out = if self.label_beatable_by_numeric(t, lab)? {
                    space.numeric_above(&Q::zero(), true, reg)?
                } else {
                    SymbolicSet::empty()
                };
                let other = Self::other(lab);
                if self.only_label(t, other) && space.has_label(other) {
                    out = out.union(&SymbolicSet::from_atoms([other]), reg)?;
                }
                Ok(out)
            }
        }
    }

    fn lower_contour_set(&self, player: usize, a: &Value, r: &Reduction) -> Result<SymbolicSet> {
        let reg = &*self.reg;
        let t = opp(r, player);
        let m = inf_q(t, reg)?;
        let space = &self.spaces[player];
        match a {
            Value::Num(y) => {
                let bound = match &m {
                    Some(m) if m < y => m.clone(),
                    _ => y.clone(),
                };
                let mut out = space.numeric_below(&bound, true, reg)?;
                if *y > Q::zero() {
                    for lab in ["Left", "Right"] {
                        if space.has_label(lab) && self.label_beatable_by_numeric(t, lab)? {
                            out = out.union(&SymbolicSet::from_atoms([lab]), reg)?;
                        }
                    }
                }
                Ok(out)
            }
            Value::Label(lab) => {
                if self.only_label(t, lab) {
                    space.difference(&SymbolicSet::from_atoms([lab.as_str()]), reg)
                } else {
                    Ok(SymbolicSet::empty())
                }
            }
        }
    }

    fn dominator_witness(
        &self,
        player: usize,
        a: &Value,
        scope: &SymbolicSet,
        r: &Reduction,
    ) -> Result<Value> {
        pick_witness(&self.id, &self.dominating_set(player, a, r)?, scope, &self.reg)
    }

    fn certify_pattern(&self, pattern: &ChainPattern) -> bool {
        if pattern.players.len() != 2 {
            return false;
        }
        let labelled_tail = |prims: &[PrimPattern], seq_id: &str| match prims {
            [PrimPattern::ConstAtom { label: l }, PrimPattern::ConstAtom { label: r }, PrimPattern::MovingTail { seq, base, step: 1 }]
                if l == "Left" && r == "Right" && seq == seq_id =>
            {
                Some(*base)
            }
            _ => None,
        };
        match (
            labelled_tail(&pattern.players[0], "even"),
            labelled_tail(&pattern.players[1], "odd"),
        ) {
            (Some(b1), Some(b2)) => cascade_aligned(b1, b2),
            _ => false,
        }
    }

    fn removal_rule(
        &self,
        _player: usize,
        _removed: &SetPrimitive,
        _r: &Reduction,
    ) -> Option<String> {
        Some("below the opponent's smallest rational, any larger surviving rational dominates".into())
    }
}

// ---------------------------------------------------------------------------
// Min cascade with a sink strategy

/// Player 1 owns the sink -1 plus an increasing rational sequence, player 2
/// the complementary sequence plus 1. The sink pays its owner -1 always and
/// hands player 2 its own choice as payoff; all other profiles pay the
/// minimum. Every non-sink strategy dominates the sink, and while the sink
/// survives, player 2's point 1 is never dominated.
struct SinkCascadeOracle {
    id: String,
    spaces: Vec<SymbolicSet>,
    reg: Arc<SeqRegistry>,
}

impl SinkCascadeOracle {
    fn sink(&self) -> Q {
        Q::from_int(-1)
    }

    /// Minimum of the opponent part with the sink ignored; `None` when the
    /// part is exactly the sink (player 2's payoff is then its own choice).
    fn active_min(&self, t: &SymbolicSet) -> Result<Option<Q>> {
        inf_q(&t.numeric_above(&self.sink(), true, &self.reg)?, &self.reg)
    }
}

impl AnalyticGame for SinkCascadeOracle {
    fn id(&self) -> &str {
        &self.id
    }

    fn payoff(&self, player: usize, profile: &[Value]) -> Result<Q> {
        let a = num_of(&self.id, &profile[0])?;
        let b = num_of(&self.id, &profile[1])?;
        if *a == self.sink() {
            return Ok(if player == 0 { self.sink() } else { b.clone() });
        }
        Ok(a.clone().min(b.clone()))
    }

    fn dominates(&self, player: usize, a: &Value, b: &Value, r: &Reduction) -> Result<bool> {
        let t = opp(r, player);
        let (x, y) = (num_of(&self.id, a)?, num_of(&self.id, b)?);
        if player == 0 {
            if *y == self.sink() {
                return Ok(false);
            }
            if *x == self.sink() {
                return Ok(true);
            }
            return Ok(*y > *x && *x < self.active_min(t)?.unwrap_or_else(Q::one));
        }
        Ok(*y > *x && self.active_min(t)?.map_or(true, |m| *x < m))
    }

    fn dominated_elements(
        &self,
        player: usize,
        target: &SymbolicSet,
        scope: &SymbolicSet,
        r: &Reduction,
    ) -> Result<SymbolicSet> {
        let reg = &*self.reg;
        let t = opp(r, player);
        if player == 0 {
            let m = inf_q(t, reg)?;
            let nonneg_scope = scope.numeric_above(&self.sink(), true, reg)?;
            let s = sup_q(&nonneg_scope, reg)?;
            let nonneg_target = target.numeric_above(&self.sink(), true, reg)?;
            let mut out = below_capped_sup(&nonneg_target, m.as_ref(), s.as_ref(), reg)?;
            if target.contains_num(&self.sink(), reg)? && !nonneg_scope.is_empty() {
                out = out.union(&SymbolicSet::singleton(&Value::Num(self.sink())), reg)?;
            }
            return Ok(out);
        }
        let m = self.active_min(t)?;
        let s = sup_q(scope, reg)?;
        below_capped_sup(target, m.as_ref(), s.as_ref(), reg)
    }

    fn dominating_set(&self, player: usize, a: &Value, r: &Reduction) -> Result<SymbolicSet> {
        let reg = &*self.reg;
        let t = opp(r, player);
        let x = num_of(&self.id, a)?;
        let space = &self.spaces[player];
        if player == 0 {
            if *x == self.sink() {
                return space.numeric_above(&self.sink(), true, reg);
            }
            if *x >= self.active_min(t)?.unwrap_or_else(Q::one) {
                return Ok(SymbolicSet::empty());
            }
            return space.numeric_above(x, true, reg);
        }
        if self.active_min(t)?.map_or(false, |m| *x >= m) {
            return Ok(SymbolicSet::empty());
        }
        space.numeric_above(x, true, reg)
    }

    fn lower_contour_set(&self, player: usize, a: &Value, r: &Reduction) -> Result<SymbolicSet> {
        let reg = &*self.reg;
        let t = opp(r, player);
        let x = num_of(&self.id, a)?;
        let space = &self.spaces[player];
        if player == 0 {
            if *x == self.sink() {
                return Ok(SymbolicSet::empty());
            }
            let m = self.active_min(t)?.unwrap_or_else(Q::one);
            let bound = if m < *x { m } else { x.clone() };
            let mut out = space
                .numeric_above(&self.sink(), true, reg)?
                .numeric_below(&bound, true, reg)?;
            out = out.union(&SymbolicSet::singleton(&Value::Num(self.sink())), reg)?;
            return Ok(out);
        }
        let bound = match self.active_min(t)? {
            Some(m) if m < *x => m,
            _ => x.clone(),
        };
        space.numeric_below(&bound, true, reg)
    }

    fn dominator_witness(
        &self,
        player: usize,
        a: &Value,
        scope: &SymbolicSet,
        r: &Reduction,
    ) -> Result<Value> {
        pick_witness(&self.id, &self.dominating_set(player, a, r)?, scope, &self.reg)
    }

    fn certify_pattern(&self, pattern: &ChainPattern) -> bool {
        if pattern.players.len() != 2 {
            return false;
        }
        // Player 1's template may carry the sink as a constant point (the
        // chain that never removes it) or consist of the bare tail.
        let b1 = match pattern.players[0].as_slice() {
            [PrimPattern::ConstPoint { value }, rest @ ..] if *value == self.sink() => {
                moving_tail_base(rest, "even")
            }
            prims => moving_tail_base(prims, "even"),
        };
        let b2 = match pattern.players[1].as_slice() {
            [PrimPattern::MovingTail { seq, base, step: 1 }, PrimPattern::ConstPoint { value }]
                if seq == "odd" && *value == Q::one() =>
            {
                Some(*base)
            }
            _ => None,
        };
        match (b1, b2) {
            (Some(b1), Some(b2)) => cascade_aligned(b1, b2),
            _ => false,
        }
    }

    fn removal_rule(
        &self,
        _player: usize,
        _removed: &SetPrimitive,
        _r: &Reduction,
    ) -> Option<String> {
        Some("the sink loses to every survivor; small rationals lose to any larger one".into())
    }
}

// ---------------------------------------------------------------------------
// Finite truncations

/// Finite probe of an entry: a tabulated game over a small grid of the
/// entry's strategy space, with payoffs computed by the analytic oracle.
/// `n` controls the grid resolution (sequence prefix length or interval
/// subdivision count).
pub fn truncation(id: &str, n: usize) -> Result<Game> {
    if n == 0 {
        return Err(Error::InvalidConfig("truncation size must be at least 1".into()));
    }
    let entry = instantiate(id)?;
    let reg = entry.game.registry_arc();
    let seq = |name: &str, count: usize| -> Result<Vec<Value>> {
        let s = reg.get(name)?;
        Ok((0..count as i64).map(|k| Value::Num(s.eval(k))).collect())
    };
    let labels = |ls: &[&str]| ls.iter().map(|l| Value::Label((*l).into())).collect::<Vec<_>>();
    let grid = |lo_num: i64, hi_num: i64, den: i64| -> Vec<Value> {
        (lo_num..=hi_num).map(|k| Value::Num(Q::ratio(k, den))).collect()
    };
    let ni = n as i64;
    let (p1, p2): (Vec<Value>, Vec<Value>) = match id {
        "intro_open_interval" | "gkz_omega_plus_one" => {
            (grid(1, ni, ni + 1), labels(&["*"]))
        }
        "closed_interval_identity" => (grid(0, ni, ni), labels(&["*"])),
        "ex1_unbounded_at_limit" => (grid(0, ni, ni), labels(&["Left", "Center", "Right"])),
        "ex3_not_all_bounded" => (grid(0, ni, ni), labels(&["Left", "Right"])),
        "ex2_order_indep_not_equal" => {
            let mut a = seq("even", n)?;
            a.push(Value::Num(Q::one()));
            let mut b = seq("odd", n)?;
            b.push(Value::Num(Q::one()));
            (a, b)
        }
        "ex4_apt_property_C" => {
            let mut a = labels(&["Left", "Right"]);
            a.extend(seq("even", n)?);
            let mut b = labels(&["Left", "Right"]);
            b.extend(seq("odd", n)?);
            (a, b)
        }
        "ex5_closure_star" => {
            let mut a = vec![Value::Num(Q::from_int(-1))];
            a.extend(seq("even", n)?);
            let mut b = seq("odd", n)?;
            b.push(Value::Num(Q::one()));
            (a, b)
        }
        _ => unreachable!("id validated by instantiate"),
    };
    let oracle = entry.game.analytic_oracle().expect("catalog entries are analytic");
    let mut payoffs = vec![Vec::new(), Vec::new()];
    for a in &p1 {
        for b in &p2 {
            let profile = [a.clone(), b.clone()];
            for (player, column) in payoffs.iter_mut().enumerate() {
                column.push(oracle.payoff(player, &profile)?);
            }
        }
    }
    Game::finite(
        format!("{id}@{n}"),
        entry.game.players().to_vec(),
        vec![p1, p2],
        payoffs,
        reg,
    )
}

// ---------------------------------------------------------------------------
// Constructed reference chains

/// Membership test for the family of reduction-scoped maximal reductions of
/// the open-interval entries: the empty product together with every single
/// point of the open interval.
pub fn open_interval_maximal_family(game: &Game, r: &Reduction) -> Result<bool> {
    if r.is_empty() {
        return Ok(true);
    }
    if r.num_players() != 2 || r.part(1) != game.space(1) {
        return Ok(false);
    }
    let Some(values) = r.part(0).enumerate_values() else { return Ok(false) };
    if values.len() != 1 {
        return Ok(false);
    }
    match &values[0] {
        Value::Num(q) => Ok(q > &Q::zero() && q < &Q::one()),
        Value::Label(_) => Ok(false),
    }
}

/// The survivor-scoped chain that empties the open interval: ω successor
/// stages each removing the block `(k/(k+1), (k+1)/(k+2)]` (always
/// dominated by the surviving points above), recorded as four explicit
/// stages plus an inductively certified limit stage with the empty
/// reduction. Order type ω+1.
pub fn survivor_scope_limit_trace() -> Result<EliminationTrace> {
    let entry = instantiate("gkz_omega_plus_one")?;
    let game = &entry.game;
    let reg = game.registry();
    let frac = reg.get("frac")?;
    let mut r = game.full_reduction();
    let mut stage = Stage::ZERO;
    let mut stages = vec![TraceStage {
        stage,
        reduction: r.clone(),
        removed: vec![SymbolicSet::empty(); 2],
        witnesses: Vec::new(),
        certificate: None,
    }];
    for k in 0..4 {
        let block = SymbolicSet::from_prims(
            vec![SetPrimitive::interval(frac.eval(k), frac.eval(k + 1), false, true)?],
            reg,
        )?;
        let removed = vec![block, SymbolicSet::empty()];
        let (next, witnesses) = engine::step(game, Mode::Gkz, &r, &removed)?;
        stage = stage.successor();
        r = next;
        stages.push(TraceStage {
            stage,
            reduction: r.clone(),
            removed,
            witnesses,
            certificate: None,
        });
    }
    let pattern = ChainPattern {
        players: vec![
            vec![PrimPattern::MovingInterval {
                lo: EndpointPattern::Moving { seq: "frac".into(), base: 0, step: 1 },
                hi: EndpointPattern::Const { value: Q::one() },
                lo_closed: false,
                hi_closed: false,
            }],
            vec![PrimPattern::ConstAtom { label: "*".into() }],
        ],
        stride: 1,
        verified_window: 5,
        certificate: Certificate::Inductive,
    };
    let limit = Reduction::new(chain_limit(&pattern, reg)?);
    let removed = r
        .parts()
        .iter()
        .zip(limit.parts())
        .map(|(prev, lim)| prev.difference(lim, reg))
        .collect::<Result<Vec<_>>>()?;
    stages.push(TraceStage {
        stage: stage.limit(),
        reduction: limit,
        removed,
        witnesses: Vec::new(),
        certificate: Some(pattern),
    });
    Ok(EliminationTrace {
        game: game.name().into(),
        mode: Mode::Gkz,
        policy: "constructed(limit chain)".into(),
        players: game.players().to_vec(),
        stages,
        outcome: Outcome::Maximal,
    })
}

/// The cascade of `ex5_closure_star` that never removes the sink: the
/// rationals drain alternately, and the limit keeps `{-1} × {1}`, which is
/// maximal. Eight explicit stages plus an inductively certified limit.
pub fn sink_preserving_chain() -> Result<EliminationTrace> {
    let entry = instantiate("ex5_closure_star")?;
    let game = &entry.game;
    let reg = game.registry();
    let even = reg.get("even")?;
    let odd = reg.get("odd")?;
    let mut r = game.full_reduction();
    let mut stage = Stage::ZERO;
    let mut stages = vec![TraceStage {
        stage,
        reduction: r.clone(),
        removed: vec![SymbolicSet::empty(); 2],
        witnesses: Vec::new(),
        certificate: None,
    }];
    for k in 0..4 {
        for (player, value) in [(0usize, even.eval(k)), (1, odd.eval(k))] {
            let mut removed = vec![SymbolicSet::empty(); 2];
            removed[player] = SymbolicSet::singleton(&Value::Num(value));
            let (next, witnesses) = engine::step(game, Mode::Nested, &r, &removed)?;
            stage = stage.successor();
            r = next;
            stages.push(TraceStage {
                stage,
                reduction: r.clone(),
                removed,
                witnesses,
                certificate: None,
            });
        }
    }
    let pattern = ChainPattern {
        players: vec![
            vec![
                PrimPattern::ConstPoint { value: Q::from_int(-1) },
                PrimPattern::MovingTail { seq: "even".into(), base: 2, step: 1 },
            ],
            vec![
                PrimPattern::MovingTail { seq: "odd".into(), base: 2, step: 1 },
                PrimPattern::ConstPoint { value: Q::one() },
            ],
        ],
        stride: 2,
        verified_window: 3,
        certificate: Certificate::Inductive,
    };
    let limit = Reduction::new(chain_limit(&pattern, reg)?);
    let removed = r
        .parts()
        .iter()
        .zip(limit.parts())
        .map(|(prev, lim)| prev.difference(lim, reg))
        .collect::<Result<Vec<_>>>()?;
    stages.push(TraceStage {
        stage: stage.limit(),
        reduction: limit,
        removed,
        witnesses: Vec::new(),
        certificate: Some(pattern),
    });
    Ok(EliminationTrace {
        game: game.name().into(),
        mode: Mode::Nested,
        policy: "constructed(limit chain)".into(),
        players: game.players().to_vec(),
        stages,
        outcome: Outcome::Maximal,
    })
}

// ---------------------------------------------------------------------------
// Fixture verification

#[derive(Clone, Debug)]
pub struct FixtureCheck {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub id: String,
    pub checks: Vec<FixtureCheck>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Json {
        json!({
            "id": self.id,
            "pass": self.all_pass(),
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "pass": c.pass,
                "detail": c.detail,
            })).collect::<Vec<_>>(),
        })
    }
}

type CheckOutcome = std::result::Result<String, String>;

fn text(e: Error) -> String {
    e.to_string()
}

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn record(checks: &mut Vec<FixtureCheck>, name: &'static str, outcome: CheckOutcome) {
    match outcome {
        Ok(detail) => checks.push(FixtureCheck { name, pass: true, detail }),
        Err(detail) => checks.push(FixtureCheck { name, pass: false, detail }),
    }
}

fn pset(game: &Game, expr: &str) -> std::result::Result<SymbolicSet, String> {
    parse_set(expr, game.registry()).map_err(text)
}

fn pred(game: &Game, exprs: &[&str]) -> std::result::Result<Reduction, String> {
    let parts = exprs.iter().map(|e| pset(game, e)).collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(Reduction::new(parts))
}

fn run_mode(game: &Game, mode: Mode, policy: Policy) -> std::result::Result<EliminationTrace, String> {
    engine::run(game, &RunConfig::new(mode, policy)).map_err(text)
}

/// Caps wide enough for the finite truncation probes, never narrower than
/// the caller's.
fn widen(caps: &Caps) -> Caps {
    let mut wide = caps.clone();
    wide.max_strategies_total = wide.max_strategies_total.max(24);
    wide
}

/// Replays every expected fixture of entry `id` through the public engine,
/// analyzer, and enumeration APIs, one pass/fail record per fixture.
pub fn verify(id: &str, caps: &Caps) -> Result<VerifyReport> {
    let entry = instantiate(id)?;
    let game = &entry.game;
    let mut checks = Vec::new();
    match id {
        "intro_open_interval" => verify_intro(game, &mut checks),
        "ex1_unbounded_at_limit" => verify_shortcut(game, &mut checks),
        "ex2_order_indep_not_equal" => verify_order_indep(game, caps, &mut checks),
        "ex3_not_all_bounded" => verify_inert(game, caps, &mut checks),
        "ex4_apt_property_C" => verify_label_cascade(game, caps, &mut checks),
        "ex5_closure_star" => verify_sink_cascade(game, caps, &mut checks),
        "gkz_omega_plus_one" => verify_survivor_scope(game, &mut checks),
        "closed_interval_identity" => verify_closed_identity(game, &mut checks),
        _ => unreachable!("id validated by instantiate"),
    }
    Ok(VerifyReport { id: entry.id.to_string(), checks })
}

fn verify_intro(game: &Game, checks: &mut Vec<FixtureCheck>) {
    for (name, mode) in [
        ("universal-remove-all-empties", Mode::Universal),
        ("nested-remove-all-empties", Mode::Nested),
    ] {
        record(checks, name, (|| {
            let tr = run_mode(game, mode, Policy::RemoveAll)?;
            ensure(tr.outcome == Outcome::Maximal, "run did not end maximal")?;
            ensure(tr.final_reduction().is_empty(), "final reduction is not empty")?;
            ensure(tr.stages.len() == 2, "expected exactly one removal stage")?;
            Ok(format!("{} at stage {}", tr.final_reduction(), tr.stages.last().unwrap().stage))
        })());
    }
    record(checks, "scripted-midpoint-chain", (|| {
        let stages = vec![
            vec![pset(game, "(1/2, 1)")?, SymbolicSet::empty()],
            vec![pset(game, "(0, 1/2)")?, SymbolicSet::empty()],
        ];
        let tr = run_mode(game, Mode::Nested, Policy::Scripted { stages })?;
        ensure(
            tr.outcome == Outcome::ScriptEnded { maximal: true },
            "script should end at a maximal reduction",
        )?;
        let expected = pred(game, &["{1/2}", "{*}"])?;
        ensure(tr.final_reduction() == &expected, "final reduction is not {1/2} × {*}")?;
        engine::validate_sequence(game, &tr, true).map_err(text)?;
        Ok(format!("reached {} in 2 stages", tr.final_reduction()))
    })());
    record(checks, "maximal-family-membership", (|| {
        let empty = Reduction::new(vec![SymbolicSet::empty(); 2]);
        ensure(
            open_interval_maximal_family(game, &empty).map_err(text)?,
            "empty product must belong to the family",
        )?;
        ensure(
            !open_interval_maximal_family(game, &game.full_reduction()).map_err(text)?,
            "the full space must not belong to the family",
        )?;
        for k in 1..=20 {
            let point = SymbolicSet::singleton(&Value::Num(Q::ratio(k, 21)));
            let r = Reduction::new(vec![point, game.space(1).clone()]);
            ensure(
                open_interval_maximal_family(game, &r).map_err(text)?,
                "sampled singleton must belong to the family",
            )?;
            ensure(
                engine::is_maximal(game, Mode::Nested, &r).map_err(text)?,
                "sampled singleton must be maximal",
            )?;
        }
        ensure(
            !engine::is_maximal(game, Mode::Nested, &game.full_reduction()).map_err(text)?,
            "the full space must not be maximal",
        )?;
        Ok("empty product and 20 sampled singletons confirmed".into())
    })());
}

fn verify_shortcut(game: &Game, checks: &mut Vec<FixtureCheck>) {
    record(checks, "remove-all-unique-maximal", (|| {
        let expected = pred(game, &["{1}", "{Left}"])?;
        for mode in [Mode::Nested, Mode::Universal] {
            let tr = run_mode(game, mode, Policy::RemoveAll)?;
            ensure(tr.outcome == Outcome::Maximal, "run did not end maximal")?;
            ensure(tr.final_reduction() == &expected, "final reduction is not {1} × {Left}")?;
            ensure(tr.stages.len() == 3, "expected exactly two removal stages")?;
        }
        Ok(format!("{expected} in 2 stages under both scopes"))
    })());
    let shortcut = |game: &Game| -> std::result::Result<Vec<Vec<SymbolicSet>>, String> {
        Ok(vec![
            vec![SymbolicSet::empty(), pset(game, "{Center}")?],
            vec![pset(game, "(1/2, 1)")?, SymbolicSet::empty()],
            vec![pset(game, "[0, 1/2]")?, pset(game, "{Right}")?],
        ])
    };
    record(checks, "universal-shortcut-validates", (|| {
        let tr = run_mode(game, Mode::Universal, Policy::Scripted { stages: shortcut(game)? })?;
        ensure(
            tr.outcome == Outcome::ScriptEnded { maximal: true },
            "script should end at a maximal reduction",
        )?;
        let expected = pred(game, &["{1}", "{Left}"])?;
        ensure(tr.final_reduction() == &expected, "final reduction is not {1} × {Left}")?;
        engine::validate_sequence(game, &tr, true).map_err(text)?;
        Ok("three-stage space-scoped chain accepted".into())
    })());
    record(checks, "nested-shortcut-rejected-at-midpoint", (|| {
        let mid = pred(game, &["[0, 1/2] ∪ {1}", "{Left, Right}"])?;
        let last = vec![pset(game, "[0, 1/2]")?, pset(game, "{Right}")?];
        match engine::validate_step(game, Mode::Nested, &mid, &last) {
            Ok(_) => Err("the reduction-scoped check accepted the final shortcut step".into()),
            Err(Error::IllegalStep { strategy, .. }) => {
                ensure(strategy == "1/2", format!("wrong blocking strategy `{strategy}`"))?;
                Ok("rejected exactly at 1/2: its dominators were all removed earlier".into())
            }
            Err(e) => Err(format!("unexpected error: {e}")),
        }
    })());
    record(checks, "midchain-not-completely-bounded", (|| {
        let mid = pred(game, &["[0, 1/2] ∪ {1}", "{Left, Right}"])?;
        let verdict = analyze::is_completely_bounded(game, &mid).map_err(text)?;
        ensure(!verdict.holds, "the middle reduction must fail complete boundedness")?;
        let w = verdict.witness.ok_or("missing witness")?;
        ensure(w.player == "row", format!("wrong witness player `{}`", w.player))?;
        Ok(format!("fails with witness {} = {}", w.player, w.strategy))
    })());
    record(checks, "terminal-completely-bounded", (|| {
        let top = pred(game, &["{1}", "{Left}"])?;
        let verdict = analyze::is_completely_bounded(game, &top).map_err(text)?;
        ensure(verdict.holds, "the terminal reduction must be completely bounded")?;
        Ok("terminal reduction passes".into())
    })());
}

fn verify_order_indep(game: &Game, caps: &Caps, checks: &mut Vec<FixtureCheck>) {
    let limit = pred(game, &["{1}", "{1}"]);
    record(checks, "nested-limit-inductive", (|| {
        let tr = run_mode(game, Mode::Nested, Policy::RemoveAll)?;
        ensure(tr.outcome == Outcome::Maximal, "run did not end maximal")?;
        ensure(tr.final_reduction() == &limit.clone()?, "final reduction is not {1} × {1}")?;
        let last = tr.stages.last().unwrap();
        ensure(last.stage == Stage { block: 1, step: 0 }, "final stage is not ω")?;
        let cert = last.certificate.as_ref().ok_or("missing limit certificate")?;
        ensure(cert.certificate == Certificate::Inductive, "certificate is not inductive")?;
        engine::validate_sequence(game, &tr, true).map_err(text)?;
        Ok(format!("{} at {}", tr.final_reduction(), last.stage))
    })());
    record(checks, "universal-continues-to-empty", (|| {
        let tr = run_mode(game, Mode::Universal, Policy::RemoveAll)?;
        ensure(tr.outcome == Outcome::Maximal, "run did not end maximal")?;
        ensure(tr.final_reduction().is_empty(), "final reduction is not empty")?;
        let last = tr.stages.last().unwrap();
        ensure(last.stage == Stage { block: 1, step: 1 }, "final stage is not ω+1")?;
        Ok(format!("∅ at {}", last.stage))
    })());
    record(checks, "limit-locally-not-completely-bounded", (|| {
        let r = limit.clone()?;
        let local = analyze::is_locally_bounded(game, &r).map_err(text)?;
        ensure(local.holds, "{1} × {1} must be locally bounded")?;
        let complete = analyze::is_completely_bounded(game, &r).map_err(text)?;
        ensure(!complete.holds, "{1} × {1} must fail complete boundedness")?;
        let w = complete.witness.ok_or("missing witness")?;
        ensure(w.strategy == Value::Num(Q::one()), "witness strategy should be 1")?;
        Ok("locally bounded, completely unbounded at the limit".into())
    })());
    record(checks, "random-policies-agree", (|| {
        let expected = limit.clone()?;
        for seed in 0..100 {
            let tr = run_mode(game, Mode::Nested, Policy::RandomSubset { seed })?;
            ensure(
                tr.final_reduction() == &expected,
                format!("seed {seed} reached {}", tr.final_reduction()),
            )?;
        }
        Ok("100 seeded runs all reach {1} × {1}".into())
    })());
    let cascade = ["0", "1/2", "2/3", "3/4"];
    verify_truncations(game.name(), caps, checks, &TruncationSpec {
        sizes: &[3, 5, 7],
        prefix: &cascade,
        maximal: |game, n| {
            let reg = game.registry();
            let even = reg.get("even").map_err(text)?.eval(n - 1);
            let odd = reg.get("odd").map_err(text)?.eval(n - 1);
            Ok(Reduction::new(vec![
                SymbolicSet::from_values(&[Value::Num(even), Value::Num(Q::one())], reg)
                    .map_err(text)?,
                SymbolicSet::from_values(&[Value::Num(odd), Value::Num(Q::one())], reg)
                    .map_err(text)?,
            ]))
        },
        theorems_at: Some(3),
        cover_holds: true,
    });
}

fn verify_inert(game: &Game, caps: &Caps, checks: &mut Vec<FixtureCheck>) {
    record(checks, "no-stage-removes-anything", (|| {
        for mode in [Mode::Nested, Mode::Universal] {
            let tr = run_mode(game, mode, Policy::RemoveAll)?;
            ensure(tr.outcome == Outcome::Maximal, "run did not end maximal")?;
            ensure(tr.stages.len() == 1, "no removal stage should exist")?;
            ensure(
                tr.final_reduction() == &game.full_reduction(),
                "the full space must survive",
            )?;
        }
        Ok("the full space is maximal under both scopes".into())
    })());
    record(checks, "left-column-not-completely-bounded", (|| {
        let r = pred(game, &["[0, 1]", "{Left}"])?;
        let verdict = analyze::is_completely_bounded(game, &r).map_err(text)?;
        ensure(!verdict.holds, "the Left-column reduction must fail complete boundedness")?;
        let w = verdict.witness.ok_or("missing witness")?;
        ensure(w.player == "row", format!("wrong witness player `{}`", w.player))?;
        Ok("every row point is dominated there, none by an undominated one".into())
    })());
    record(checks, "full-space-completely-bounded", (|| {
        let verdict =
            analyze::is_completely_bounded(game, &game.full_reduction()).map_err(text)?;
        ensure(verdict.holds, "the full space must be completely bounded")?;
        Ok("vacuously bounded: nothing is dominated".into())
    })());
    record(checks, "enumeration-rejected", (|| {
        match enumerate::enumerate_sequences(game, Mode::Nested, caps) {
            Err(Error::UnsupportedQuery { .. }) => Ok("infinite spaces are refused".into()),
            Err(e) => Err(format!("unexpected error: {e}")),
            Ok(_) => Err("enumeration must refuse an infinite game".into()),
        }
    })());
}

fn verify_label_cascade(game: &Game, caps: &Caps, checks: &mut Vec<FixtureCheck>) {
    let limit = pred(game, &["{Left, Right}", "{Left, Right}"]);
    record(checks, "nested-limit-two-labels", (|| {
        let tr = run_mode(game, Mode::Nested, Policy::RemoveAll)?;
        ensure(tr.outcome == Outcome::Maximal, "run did not end maximal")?;
        ensure(
            tr.final_reduction() == &limit.clone()?,
            "final reduction is not {Left, Right} × {Left, Right}",
        )?;
        let last = tr.stages.last().unwrap();
        ensure(last.stage == Stage { block: 1, step: 0 }, "final stage is not ω")?;
        let cert = last.certificate.as_ref().ok_or("missing limit certificate")?;
        ensure(cert.certificate == Certificate::Inductive, "certificate is not inductive")?;
        engine::validate_sequence(game, &tr, true).map_err(text)?;
        Ok(format!("{} at {}", tr.final_reduction(), last.stage))
    })());
    record(checks, "universal-limit-matches", (|| {
        let tr = run_mode(game, Mode::Universal, Policy::RemoveAll)?;
        ensure(tr.outcome == Outcome::Maximal, "run did not end maximal")?;
        ensure(
            tr.final_reduction() == &limit.clone()?,
            "space-scoped elimination must stop at the same limit",
        )?;
        Ok("both scopes stop at {Left, Right} × {Left, Right}".into())
    })());
    record(checks, "undominated-cover-fails-at-limit", (|| {
        let verdict = analyze::property_c_at(game, &limit.clone()?).map_err(text)?;
        ensure(!verdict.holds, "the cover property must fail at the limit")?;
        let w = verdict.witness.ok_or("missing witness")?;
        ensure(w.strategy == Value::Num(Q::zero()), "witness strategy should be 0")?;
        Ok(format!("witness {} = {}: dominated, but no undominated dominator", w.player, w.strategy))
    })());
    record(checks, "undominated-cover-holds-at-full", (|| {
        let verdict = analyze::property_c_at(game, &game.full_reduction()).map_err(text)?;
        ensure(verdict.holds, "the cover property must hold at the full space")?;
        Ok("holds at the full space".into())
    })());
    let cascade = ["0", "1/2", "2/3", "3/4"];
    verify_truncations(game.name(), caps, checks, &TruncationSpec {
        sizes: &[3, 5, 7],
        prefix: &cascade,
        maximal: |game, n| {
            let reg = game.registry();
            let even = reg.get("even").map_err(text)?.eval(n - 1);
            let odd = reg.get("odd").map_err(text)?.eval(n - 1);
            let labels = SymbolicSet::from_atoms(["Left", "Right"]);
            Ok(Reduction::new(vec![
                labels.union(&SymbolicSet::singleton(&Value::Num(even)), reg).map_err(text)?,
                labels.union(&SymbolicSet::singleton(&Value::Num(odd)), reg).map_err(text)?,
            ]))
        },
        theorems_at: Some(3),
        cover_holds: true,
    });
}

fn verify_sink_cascade(game: &Game, caps: &Caps, checks: &mut Vec<FixtureCheck>) {
    let sink_limit = pred(game, &["{-1}", "{1}"]);
    record(checks, "remove-all-empties-at-limit", (|| {
        let tr = run_mode(game, Mode::Nested, Policy::RemoveAll)?;
        ensure(tr.outcome == Outcome::Maximal, "run did not end maximal")?;
        ensure(tr.final_reduction().is_empty(), "final reduction is not empty")?;
        let last = tr.stages.last().unwrap();
        ensure(last.stage == Stage { block: 1, step: 0 }, "final stage is not ω")?;
        let first = &tr.stages[1];
        ensure(
            first.removed[0] == pset(game, "{-1, 0}")?,
            "the first stage should drop the sink together with 0",
        )?;
        engine::validate_sequence(game, &tr, true).map_err(text)?;
        Ok("∅ at ω after removing {-1, 0} first".into())
    })());
    record(checks, "sink-preserving-chain-validates", (|| {
        let tr = sink_preserving_chain().map_err(text)?;
        engine::validate_sequence(game, &tr, true).map_err(text)?;
        ensure(tr.final_reduction() == &sink_limit.clone()?, "chain must end at {-1} × {1}")?;
        Ok(format!("{} at ω, maximal", tr.final_reduction()))
    })());
    record(checks, "order-dependent-maximals", (|| {
        let a = sink_preserving_chain().map_err(text)?;
        let b = run_mode(game, Mode::Nested, Policy::RemoveAll)?;
        ensure(
            a.final_reduction() != b.final_reduction(),
            "the two chains must reach different maximal reductions",
        )?;
        Ok(format!("{} versus {}", a.final_reduction(), b.final_reduction()))
    })());
    record(checks, "closure-star-witness", (|| {
        let verdict =
            analyze::closure_star_at(game, &game.full_reduction(), &sink_limit.clone()?)
                .map_err(text)?;
        ensure(!verdict.holds, "the pair (full, {-1} × {1}) must fail the closure check")?;
        let w = verdict.witness.ok_or("missing witness")?;
        ensure(w.strategy == Value::Num(Q::from_int(-1)), "witness strategy should be -1")?;
        Ok(format!("witness {} = {}", w.player, w.strategy))
    })());
    record(checks, "stages-locally-bounded", (|| {
        let mut reductions = Vec::new();
        for tr in [sink_preserving_chain().map_err(text)?,
            run_mode(game, Mode::Nested, Policy::RemoveAll)?]
        {
            for st in &tr.stages {
                if !reductions.contains(&st.reduction) {
                    reductions.push(st.reduction.clone());
                }
            }
        }
        for r in &reductions {
            let verdict = analyze::is_locally_bounded(game, r).map_err(text)?;
            ensure(verdict.holds, format!("{r} is not locally bounded"))?;
        }
        Ok(format!("{} distinct stage reductions all locally bounded", reductions.len()))
    })());
    let cascade = ["-1", "0", "1/2", "2/3"];
    verify_truncations(game.name(), caps, checks, &TruncationSpec {
        sizes: &[3, 5, 7],
        prefix: &cascade,
        maximal: |game, n| {
            let reg = game.registry();
            let even = reg.get("even").map_err(text)?.eval(n - 1);
            let odd = reg.get("odd").map_err(text)?.eval(n - 1);
            Ok(Reduction::new(vec![
                SymbolicSet::singleton(&Value::Num(even)),
                SymbolicSet::from_values(&[Value::Num(odd), Value::Num(Q::one())], reg)
                    .map_err(text)?,
            ]))
        },
        theorems_at: Some(3),
        cover_holds: true,
    });
}

fn verify_survivor_scope(game: &Game, checks: &mut Vec<FixtureCheck>) {
    record(checks, "nested-empties-in-one-stage", (|| {
        let tr = run_mode(game, Mode::Nested, Policy::RemoveAll)?;
        ensure(tr.outcome == Outcome::Maximal, "run did not end maximal")?;
        ensure(tr.final_reduction().is_empty(), "final reduction is not empty")?;
        ensure(tr.stages.len() == 2, "expected exactly one removal stage")?;
        Ok("∅ at stage 1".into())
    })());
    record(checks, "limit-chain-validates", (|| {
        let tr = survivor_scope_limit_trace().map_err(text)?;
        engine::validate_sequence(game, &tr, true).map_err(text)?;
        ensure(tr.final_reduction().is_empty(), "the limit must be empty")?;
        let last = tr.stages.last().unwrap();
        ensure(last.stage == Stage { block: 1, step: 0 }, "final stage is not ω")?;
        ensure(
            tr.stages[..tr.stages.len() - 1].iter().all(|s| s.stage.block == 0),
            "all earlier stages must be successors",
        )?;
        Ok(format!("order type ω+1, ∅ at {}", last.stage))
    })());
    record(checks, "interpolation-cannot-reach-empty", (|| {
        let empty = Reduction::new(vec![SymbolicSet::empty(); 2]);
        match engine::gkz_interpolate(game, &game.full_reduction(), &empty) {
            Err(Error::UnsupportedCombination(_)) => {
                Ok("no finite survivor-scoped chain reaches ∅".into())
            }
            Err(e) => Err(format!("unexpected error: {e}")),
            Ok(_) => Err("interpolation must fail toward the empty reduction".into()),
        }
    })());
    record(checks, "survivor-remove-all-rejected", (|| {
        match engine::run(game, &RunConfig::new(Mode::Gkz, Policy::RemoveAll)) {
            Err(Error::UnsupportedCombination(_)) => {
                Ok("one-shot deletion leaves no surviving dominators".into())
            }
            Err(e) => Err(format!("unexpected error: {e}")),
            Ok(_) => Err("survivor-scoped remove-all must be rejected".into()),
        }
    })());
}

fn verify_closed_identity(game: &Game, checks: &mut Vec<FixtureCheck>) {
    record(checks, "remove-all-keeps-top", (|| {
        let expected = pred(game, &["{1}", "{*}"])?;
        for mode in [Mode::Nested, Mode::Universal] {
            let tr = run_mode(game, mode, Policy::RemoveAll)?;
            ensure(tr.outcome == Outcome::Maximal, "run did not end maximal")?;
            ensure(tr.final_reduction() == &expected, "final reduction is not {1} × {*}")?;
            ensure(tr.stages.len() == 2, "expected exactly one removal stage")?;
        }
        Ok("{1} × {*} in one stage under both scopes".into())
    })());
    record(checks, "half-open-completely-bounded", (|| {
        let r = pred(game, &["[0, 1)", "{*}"])?;
        let verdict = analyze::is_completely_bounded(game, &r).map_err(text)?;
        ensure(verdict.holds, "[0, 1) must be completely bounded")?;
        Ok("1 covers everything it dominates".into())
    })());
    record(checks, "half-open-not-locally-bounded", (|| {
        let r = pred(game, &["[0, 1)", "{*}"])?;
        let verdict = analyze::is_locally_bounded(game, &r).map_err(text)?;
        ensure(!verdict.holds, "[0, 1) must fail local boundedness")?;
        ensure(verdict.witness.is_some(), "missing witness")?;
        Ok("no undominated member exists inside [0, 1)".into())
    })());
}

/// Shared finite-truncation fixtures: the cascade prefix, the unique
/// maximal reduction, sequence-class agreement across scopes, and (for the
/// smallest size) the full theorem battery plus the undominated-cover
/// status.
struct TruncationSpec<'a> {
    sizes: &'a [usize],
    /// Expected first removed values, in stage order.
    prefix: &'a [&'a str],
    maximal: fn(&Game, i64) -> std::result::Result<Reduction, String>,
    theorems_at: Option<usize>,
    cover_holds: bool,
}

fn verify_truncations(
    id: &str,
    caps: &Caps,
    checks: &mut Vec<FixtureCheck>,
    spec: &TruncationSpec<'_>,
) {
    let wide = widen(caps);
    record(checks, "truncation-cascade-prefix", (|| {
        for &n in spec.sizes {
            let trunc = truncation(id, n).map_err(text)?;
            let tr = run_mode(&trunc, Mode::Nested, Policy::RemoveAll)?;
            let mut removed = Vec::new();
            for st in &tr.stages[1..] {
                for part in &st.removed {
                    if let Some(values) = part.enumerate_values() {
                        removed.extend(values.iter().map(|v| v.to_string()));
                    }
                }
            }
            ensure(
                removed.len() >= spec.prefix.len()
                    && removed[..spec.prefix.len()]
                        == *spec.prefix.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                format!("n = {n}: removal prefix {removed:?}"),
            )?;
        }
        Ok(format!("first removals are {:?} at every size", spec.prefix))
    })());
    record(checks, "truncation-unique-maximal", (|| {
        for &n in spec.sizes {
            let trunc = truncation(id, n).map_err(text)?;
            let expected = (spec.maximal)(&trunc, n as i64)?;
            let found =
                enumerate::maximal_reduction_set(&trunc, Mode::Nested, &wide).map_err(text)?;
            ensure(
                found.len() == 1 && found[0] == expected,
                format!("n = {n}: expected {{{expected}}}, found {} reductions", found.len()),
            )?;
        }
        Ok("one maximal reduction per size, as predicted".into())
    })());
    record(checks, "truncation-classes-equal", (|| {
        for &n in spec.sizes {
            let trunc = truncation(id, n).map_err(text)?;
            let nested =
                enumerate::enumerate_sequences(&trunc, Mode::Nested, &wide).map_err(text)?;
            let universal =
                enumerate::enumerate_sequences(&trunc, Mode::Universal, &wide).map_err(text)?;
            let gkz = enumerate::enumerate_sequences(&trunc, Mode::Gkz, &wide).map_err(text)?;
            ensure(
                nested.same_sequences(&universal) && nested.same_sequences(&gkz),
                format!("n = {n}: scope choice changed the sequence class"),
            )?;
        }
        Ok("reduction-, space-, and survivor-scoped classes coincide".into())
    })());
    if let Some(n) = spec.theorems_at {
        record(checks, "truncation-theorems", (|| {
            let trunc = truncation(id, n).map_err(text)?;
            let report = enumerate::check_theorems(&trunc, &wide).map_err(text)?;
            let failed: Vec<&str> = report
                .assertions
                .iter()
                .filter(|a| !a.pass)
                .map(|a| a.id.as_str())
                .collect();
            ensure(failed.is_empty(), format!("n = {n}: failing assertions {failed:?}"))?;
            Ok(format!("all {} assertions hold at n = {n}", report.assertions.len()))
        })());
        record(checks, "truncation-cover-status", (|| {
            let trunc = truncation(id, n).map_err(text)?;
            let verdict = analyze::satisfies_property_c(&trunc, &wide).map_err(text)?;
            ensure(
                verdict.holds == spec.cover_holds,
                format!("n = {n}: cover property holds = {}", verdict.holds),
            )?;
            Ok(format!("cover property holds = {} on the finite probe", verdict.holds))
        })());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_id_instantiates() {
        for id in IDS {
            let entry = instantiate(id).unwrap();
            assert_eq!(entry.game.name(), id);
            assert_eq!(entry.game.num_players(), 2);
            assert!(!entry.game.is_finite());
        }
        assert_eq!(list().len(), IDS.len());
    }

    #[test]
    fn unknown_id_is_rejected() {
        assert!(matches!(instantiate("nonesuch"), Err(Error::InvalidConfig(_))));
        assert!(matches!(truncation("nonesuch", 3), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn truncation_tabulates_oracle_payoffs() {
        let entry = instantiate("ex2_order_indep_not_equal").unwrap();
        let trunc = truncation("ex2_order_indep_not_equal", 3).unwrap();
        let table = trunc.table().unwrap();
        let oracle = entry.game.analytic_oracle().unwrap();
        for (i, a) in table.strategies(0).iter().enumerate() {
            for (j, b) in table.strategies(1).iter().enumerate() {
                for player in 0..2 {
                    let expected = oracle.payoff(player, &[a.clone(), b.clone()]).unwrap();
                    assert_eq!(table.payoff_at(player, &[i, j]), &expected);
                }
            }
        }
    }

    #[test]
    fn survivor_limit_trace_is_strictly_valid() {
        let entry = instantiate("gkz_omega_plus_one").unwrap();
        let tr = survivor_scope_limit_trace().unwrap();
        engine::validate_sequence(&entry.game, &tr, true).unwrap();
        assert!(tr.final_reduction().is_empty());
        assert!(tr.stages.last().unwrap().stage.is_limit());
    }

    #[test]
    fn sink_chain_is_strictly_valid() {
        let entry = instantiate("ex5_closure_star").unwrap();
        let tr = sink_preserving_chain().unwrap();
        engine::validate_sequence(&entry.game, &tr, true).unwrap();
        let expected = Reduction::new(vec![
            parse_set("{-1}", entry.game.registry()).unwrap(),
            parse_set("{1}", entry.game.registry()).unwrap(),
        ]);
        assert_eq!(tr.final_reduction(), &expected);
    }

    #[test]
    fn cascade_run_reaches_inductive_limit() {
        let entry = instantiate("ex2_order_indep_not_equal").unwrap();
        let tr =
            engine::run(&entry.game, &RunConfig::new(Mode::Nested, Policy::RemoveAll)).unwrap();
        assert_eq!(tr.outcome, Outcome::Maximal);
        let last = tr.stages.last().unwrap();
        assert!(last.stage.is_limit());
        assert_eq!(
            last.certificate.as_ref().unwrap().certificate,
            Certificate::Inductive
        );
    }

    #[test]
    fn shortcut_is_rejected_under_reduction_scope() {
        let entry = instantiate("ex1_unbounded_at_limit").unwrap();
        let game = &entry.game;
        let reg = game.registry();
        let mid = Reduction::new(vec![
            parse_set("[0, 1/2] ∪ {1}", reg).unwrap(),
            parse_set("{Left, Right}", reg).unwrap(),
        ]);
        let removed =
            vec![parse_set("[0, 1/2]", reg).unwrap(), parse_set("{Right}", reg).unwrap()];
        let err = engine::validate_step(game, Mode::Nested, &mid, &removed).unwrap_err();
        match err {
            Error::IllegalStep { strategy, .. } => assert_eq!(strategy, "1/2"),
            other => panic!("unexpected error: {other}"),
        }
        engine::validate_step(game, Mode::Universal, &mid, &removed).unwrap();
    }

    #[test]
    fn fast_entries_verify_clean() {
        let caps = Caps::default();
        for id in ["intro_open_interval", "ex3_not_all_bounded", "gkz_omega_plus_one",
            "closed_interval_identity"]
        {
            let report = verify(id, &caps).unwrap();
            let failed: Vec<_> = report.checks.iter().filter(|c| !c.pass).collect();
            assert!(failed.is_empty(), "{id}: {failed:?}");
        }
    }

    #[test]
    fn family_predicate_rejects_non_members() {
        let entry = instantiate("intro_open_interval").unwrap();
        let game = &entry.game;
        let reg = game.registry();
        let interval = Reduction::new(vec![
            parse_set("(0, 1/2)", reg).unwrap(),
            parse_set("{*}", reg).unwrap(),
        ]);
        assert!(!open_interval_maximal_family(game, &interval).unwrap());
        let endpoint = Reduction::new(vec![
            SymbolicSet::singleton(&Value::Num(Q::one())),
            parse_set("{*}", reg).unwrap(),
        ]);
        assert!(!open_interval_maximal_family(game, &endpoint).unwrap());
    }
}
