//! Affine chain patterns over stage histories.
//!
//! A run that keeps shrinking without reaching a fixpoint is summarized by a
//! [`ChainPattern`]: per player, a list of primitive templates whose
//! parameters (tail starts, interval endpoints) move affinely with a step
//! counter `t`. A pattern that reproduces the observed window exactly earns
//! a `WindowOnly` certificate; a game oracle can upgrade it to `Inductive`,
//! which certifies the template for every `t` and justifies taking the
//! intersection of the whole chain as a limit stage.
//!
//! Limit rule: a fixed member survives the intersection iff it belongs to
//! every instance. For a moving tail with a positive step no member
//! survives. For a moving interval endpoint converging to `L`, the limit
//! interval closes at `L`: a strictly moving open endpoint never attains its
//! limit, so `L` itself belongs to every instance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Q;
use crate::seq::{LimitValue, Monotonicity, SeqRegistry};
use crate::set::{Interval, SetPrimitive, SymbolicSet};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// The template matches the observed window; nothing is claimed beyond it.
    WindowOnly,
    /// A game oracle certified the template for every stage index.
    Inductive,
}

/// Interval endpoint as a function of the pattern step `t`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EndpointPattern {
    Const { value: Q },
    /// Endpoint is `seq(base + step * t)`.
    Moving { seq: String, base: i64, step: i64 },
}

impl EndpointPattern {
    fn at(&self, t: i64, reg: &SeqRegistry) -> Result<Q> {
        match self {
            EndpointPattern::Const { value } => Ok(value.clone()),
            EndpointPattern::Moving { seq, base, step } => {
                Ok(reg.get(seq)?.eval(base + step * t))
            }
        }
    }
}

/// One primitive template of a player's stage set.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrimPattern {
    ConstAtom { label: String },
    ConstPoint { value: Q },
    ConstInterval { lo: Q, hi: Q, lo_closed: bool, hi_closed: bool },
    ConstTail { seq: String, start: i64 },
    /// Tail start moves as `base + step * t`, `step >= 1`.
    MovingTail { seq: String, base: i64, step: i64 },
    MovingInterval {
        lo: EndpointPattern,
        hi: EndpointPattern,
        lo_closed: bool,
        hi_closed: bool,
    },
}

impl PrimPattern {
    fn at(&self, t: i64, reg: &SeqRegistry) -> Result<Vec<SetPrimitive>> {
        Ok(match self {
            PrimPattern::ConstAtom { label } => vec![SetPrimitive::atom(label.clone())],
            PrimPattern::ConstPoint { value } => vec![SetPrimitive::point(value.clone())],
            PrimPattern::ConstInterval { lo, hi, lo_closed, hi_closed } => {
                vec![SetPrimitive::interval(lo.clone(), hi.clone(), *lo_closed, *hi_closed)?]
            }
            PrimPattern::ConstTail { seq, start } => vec![SetPrimitive::tail(seq.clone(), *start)],
            PrimPattern::MovingTail { seq, base, step } => {
                vec![SetPrimitive::tail(seq.clone(), base + step * t)]
            }
            PrimPattern::MovingInterval { lo, hi, lo_closed, hi_closed } => {
                let l = lo.at(t, reg)?;
                let h = hi.at(t, reg)?;
                match Interval::new(l, h, *lo_closed, *hi_closed) {
                    Ok(iv) => vec![SetPrimitive::Interval(iv)],
                    // A template may degenerate to empty at some t.
                    Err(_) => vec![],
                }
            }
        })
    }
}

/// Affine description of the tail of an elimination chain.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ChainPattern {
    /// Per-player primitive templates.
    pub players: Vec<Vec<PrimPattern>>,
    /// History stages consumed per pattern step (alternating-player chains
    /// repeat with stride > 1).
    pub stride: usize,
    /// Number of consecutive instances verified against the history.
    pub verified_window: usize,
    pub certificate: Certificate,
}

impl ChainPattern {
    /// Stage sets of instance `t`.
    pub fn instantiate(&self, t: i64, reg: &SeqRegistry) -> Result<Vec<SymbolicSet>> {
        self.players
            .iter()
            .map(|prims| {
                let mut out = Vec::new();
                for p in prims {
                    out.extend(p.at(t, reg)?);
                }
                SymbolicSet::from_prims(out, reg)
            })
            .collect()
    }
}

/// Searches the tail of `history` for an affine pattern. Tries strides 1..=3
/// and requires `window >= 3` verified instances. Returns a `WindowOnly`
/// pattern; inductive upgrades are the caller's responsibility.
pub fn detect_affine_pattern(
    history: &[Vec<SymbolicSet>],
    window: usize,
    reg: &SeqRegistry,
) -> Result<Option<ChainPattern>> {
    if window < 3 {
        return Err(Error::InvalidConfig(format!(
            "pattern window must be at least 3, got {window}"
        )));
    }
    if history.len() < window {
        return Ok(None);
    }
    for stride in 1..=3usize {
        // Aligned sample ending at the last stage: indices
        // len-1 - stride*(window-1-t) for t = 0..window.
        let span = stride * (window - 1);
        if history.len() <= span {
            continue;
        }
        let first = history.len() - 1 - span;
        let sample: Vec<&Vec<SymbolicSet>> =
            (0..window).map(|t| &history[first + stride * t]).collect();
        if let Some(pattern) = try_fit(&sample, stride, reg)? {
            return Ok(Some(pattern));
        }
    }
    Ok(None)
}

fn try_fit(
    sample: &[&Vec<SymbolicSet>],
    stride: usize,
    reg: &SeqRegistry,
) -> Result<Option<ChainPattern>> {
    let players = sample[0].len();
    if sample.iter().any(|s| s.len() != players) {
        return Ok(None);
    }
    // Candidate templates per player from the first two instances; ambiguity
    // in endpoint matching yields multiple candidates, resolved by
    // verification against the full window.
    let mut per_player: Vec<Vec<Vec<PrimPattern>>> = Vec::new();
    for i in 0..players {
        let p0: Vec<SetPrimitive> = sample[0][i].prims().collect();
        let p1: Vec<SetPrimitive> = sample[1][i].prims().collect();
        if p0.len() != p1.len() {
            return Ok(None);
        }
        let mut candidates: Vec<Vec<PrimPattern>> = vec![Vec::new()];
        for (a, b) in p0.iter().zip(p1.iter()) {
            let options = fit_prim(a, b, reg)?;
            if options.is_empty() {
                return Ok(None);
            }
            let mut next = Vec::new();
            for c in &candidates {
                for o in &options {
                    let mut c2 = c.clone();
                    c2.push(o.clone());
                    next.push(c2);
                }
            }
            candidates = next;
            if candidates.len() > 64 {
                // Ambiguity explosion; bail out rather than search blindly.
                return Ok(None);
            }
        }
        per_player.push(candidates);
    }

    // Verify candidate combinations player by player (instances factorize
    // over players, so each player's template verifies independently).
    let mut chosen: Vec<Vec<PrimPattern>> = Vec::new();
    for i in 0..players {
        let mut found: Option<Vec<PrimPattern>> = None;
        'cands: for cand in &per_player[i] {
            for (t, inst) in sample.iter().enumerate() {
                let mut prims = Vec::new();
                for p in cand {
                    prims.extend(p.at(t as i64, reg)?);
                }
                let set = SymbolicSet::from_prims(prims, reg)?;
                if &set != &inst[i] {
                    continue 'cands;
                }
            }
            found = Some(cand.clone());
            break;
        }
        match found {
            Some(c) => chosen.push(c),
            None => return Ok(None),
        }
    }

    Ok(Some(ChainPattern {
        players: chosen,
        stride,
        verified_window: sample.len(),
        certificate: Certificate::WindowOnly,
    }))
}

fn fit_prim(a: &SetPrimitive, b: &SetPrimitive, reg: &SeqRegistry) -> Result<Vec<PrimPattern>> {
    use SetPrimitive as P;
    Ok(match (a, b) {
        (P::Atom(x), P::Atom(y)) if x == y => vec![PrimPattern::ConstAtom { label: x.clone() }],
        (P::Point(x), P::Point(y)) if x == y => vec![PrimPattern::ConstPoint { value: x.clone() }],
        (P::Tail { seq: sa, start: ka }, P::Tail { seq: sb, start: kb }) if sa == sb => {
            if ka == kb {
                vec![PrimPattern::ConstTail { seq: sa.clone(), start: *ka }]
            } else if kb > ka {
                vec![PrimPattern::MovingTail { seq: sa.clone(), base: *ka, step: kb - ka }]
            } else {
                vec![]
            }
        }
        (P::Interval(x), P::Interval(y)) => {
            if x.lo_closed != y.lo_closed || x.hi_closed != y.hi_closed {
                return Ok(vec![]);
            }
            let lo_opts = fit_endpoint(&x.lo, &y.lo, reg)?;
            let hi_opts = fit_endpoint(&x.hi, &y.hi, reg)?;
            let mut out = Vec::new();
            for lo in &lo_opts {
                for hi in &hi_opts {
                    out.push(PrimPattern::MovingInterval {
                        lo: lo.clone(),
                        hi: hi.clone(),
                        lo_closed: x.lo_closed,
                        hi_closed: x.hi_closed,
                    });
                }
            }
            // Collapse the all-const case to a ConstInterval.
            if x == y {
                out.insert(
                    0,
                    PrimPattern::ConstInterval {
                        lo: x.lo.clone(),
                        hi: x.hi.clone(),
                        lo_closed: x.lo_closed,
                        hi_closed: x.hi_closed,
                    },
                );
            }
            out
        }
        _ => vec![],
    })
}

fn fit_endpoint(e0: &Q, e1: &Q, reg: &SeqRegistry) -> Result<Vec<EndpointPattern>> {
    if e0 == e1 {
        return Ok(vec![EndpointPattern::Const { value: e0.clone() }]);
    }
    let mut out = Vec::new();
    for seq in reg.iter() {
        let (Some(k0), Some(k1)) = (
            seq.index_of(e0, seq.domain_start()),
            seq.index_of(e1, seq.domain_start()),
        ) else {
            continue;
        };
        if k1 > k0 {
            out.push(EndpointPattern::Moving { seq: seq.id().to_string(), base: k0, step: k1 - k0 });
        }
    }
    Ok(out)
}

/// Exact intersection of all instances of the pattern.
///
/// Sound for non-increasing chains: a `Const` primitive survives unchanged;
/// a `MovingTail` with positive step contributes nothing (each member is
/// eventually excluded); a moving interval endpoint converges to its
/// sequence limit and the limit interval closes there.
pub fn chain_limit(pattern: &ChainPattern, reg: &SeqRegistry) -> Result<Vec<SymbolicSet>> {
    pattern
        .players
        .iter()
        .map(|prims| {
            let mut out: Vec<SetPrimitive> = Vec::new();
            for p in prims {
                match p {
                    PrimPattern::ConstAtom { label } => out.push(SetPrimitive::atom(label.clone())),
                    PrimPattern::ConstPoint { value } => out.push(SetPrimitive::point(value.clone())),
                    PrimPattern::ConstInterval { lo, hi, lo_closed, hi_closed } => {
                        out.push(SetPrimitive::interval(lo.clone(), hi.clone(), *lo_closed, *hi_closed)?)
                    }
                    PrimPattern::ConstTail { seq, start } => {
                        out.push(SetPrimitive::tail(seq.clone(), *start))
                    }
                    PrimPattern::MovingTail { seq, base: _, step } => {
                        if *step < 1 {
                            return Err(Error::InvalidConfig(format!(
                                "moving tail of `{seq}` must advance; step {step}"
                            )));
                        }
                        // No fixed member survives every instance.
                    }
                    PrimPattern::MovingInterval { lo, hi, lo_closed, hi_closed } => {
                        let (l, lc) = limit_endpoint(lo, *lo_closed, true, reg)?;
                        let (h, hc) = limit_endpoint(hi, *hi_closed, false, reg)?;
                        // Degenerate limits vanish.
                        if let Ok(iv) = Interval::new(l, h, lc, hc) {
                            out.push(SetPrimitive::Interval(iv));
                        }
                    }
                }
            }
            SymbolicSet::from_prims(out, reg)
        })
        .collect()
}

/// Limit value and closedness of one interval endpoint.
///
/// `is_lower` selects which direction the endpoint must move for the chain
/// to shrink: lower endpoints must increase, upper endpoints decrease.
fn limit_endpoint(
    e: &EndpointPattern,
    closed: bool,
    is_lower: bool,
    reg: &SeqRegistry,
) -> Result<(Q, bool)> {
    match e {
        EndpointPattern::Const { value } => Ok((value.clone(), closed)),
        EndpointPattern::Moving { seq, base: _, step } => {
            let s = reg.get(seq)?;
            if *step < 1 {
                return Err(Error::InvalidConfig(format!(
                    "moving endpoint of `{seq}` must advance; step {step}"
                )));
            }
            let shrinking = match (s.monotonicity(), is_lower) {
                (Monotonicity::Increasing, true) | (Monotonicity::Decreasing, false) => true,
                _ => false,
            };
            if !shrinking {
                return Err(Error::UnsupportedCombination(
                    "moving endpoint grows the chain; no well-defined limit".into(),
                ));
            }
            match s.limit() {
                // A strictly moving endpoint never attains its limit, so the
                // limit value itself survives every instance: closed.
                LimitValue::Finite(l) => Ok((l.clone(), true)),
                _ => Err(Error::UnsupportedCombination(
                    "moving endpoint diverges; no finite limit".into(),
                )),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::standard_registry;
    use crate::set::parse_set;

    fn reg() -> SeqRegistry {
        standard_registry()
    }

    fn stage(r: &SeqRegistry, specs: &[&str]) -> Vec<SymbolicSet> {
        specs.iter().map(|s| parse_set(s, r).unwrap()).collect()
    }

    #[test]
    fn detects_moving_interval() {
        let r = reg();
        // (frac(t), 1) for t = 0..5.
        let history: Vec<Vec<SymbolicSet>> = (0..5)
            .map(|t| {
                let lo = r.get("frac").unwrap().eval(t);
                stage(&r, &[&format!("({lo}, 1)"), "{*}"])
            })
            .collect();
        let p = detect_affine_pattern(&history, 4, &r).unwrap().expect("pattern");
        assert_eq!(p.stride, 1);
        assert_eq!(p.certificate, Certificate::WindowOnly);
        // Limit: lo -> 1 closed, hi = 1 open: empty; dummy atom survives.
        let lim = chain_limit(&p, &r).unwrap();
        assert!(lim[0].is_empty());
        assert_eq!(lim[1], parse_set("{*}", &r).unwrap());
    }

    #[test]
    fn detects_stride_two_tails() {
        let r = reg();
        // Alternating removals: player 0 advances on even history indices.
        let mut history = Vec::new();
        for m in 0..4 {
            history.push(stage(&r, &[&format!("tail(even, {m}) ∪ {{1}}"), &format!("tail(odd, {m}) ∪ {{1}}")]));
            history.push(stage(&r, &[&format!("tail(even, {}) ∪ {{1}}", m + 1), &format!("tail(odd, {m}) ∪ {{1}}")]));
        }
        // history length 8, last stages: (tail(even,4),tail(odd,3)).
        let p = detect_affine_pattern(&history, 3, &r).unwrap().expect("pattern");
        assert_eq!(p.stride, 2);
        let lim = chain_limit(&p, &r).unwrap();
        assert_eq!(lim[0], parse_set("{1}", &r).unwrap());
        assert_eq!(lim[1], parse_set("{1}", &r).unwrap());
    }

    #[test]
    fn constant_history_is_constant_pattern() {
        let r = reg();
        let history: Vec<Vec<SymbolicSet>> =
            (0..4).map(|_| stage(&r, &["[0, 1]", "{Left, Right}"])).collect();
        let p = detect_affine_pattern(&history, 3, &r).unwrap().expect("pattern");
        let lim = chain_limit(&p, &r).unwrap();
        assert_eq!(lim[0], parse_set("[0, 1]", &r).unwrap());
        assert_eq!(lim[1], parse_set("{Left, Right}", &r).unwrap());
    }

    #[test]
    fn no_pattern_on_irregular_history() {
        let r = reg();
        let history = vec![
            stage(&r, &["(0, 1)"]),
            stage(&r, &["(1/3, 1)"]),
            stage(&r, &["(5/7, 1)"]),
            stage(&r, &["(9/11, 1)"]),
        ];
        assert!(detect_affine_pattern(&history, 3, &r).unwrap().is_none());
    }

    #[test]
    fn window_too_small_is_rejected() {
        let r = reg();
        let history = vec![stage(&r, &["(0, 1)"]), stage(&r, &["(1/2, 1)"])];
        assert!(detect_affine_pattern(&history, 2, &r).is_err());
    }

    #[test]
    fn moving_lower_endpoint_closes_at_limit() {
        let r = reg();
        // (frac(t), 2]: limit [1, 2].
        let pattern = ChainPattern {
            players: vec![vec![PrimPattern::MovingInterval {
                lo: EndpointPattern::Moving { seq: "frac".into(), base: 0, step: 1 },
                hi: EndpointPattern::Const { value: Q::from_int(2) },
                lo_closed: false,
                hi_closed: true,
            }]],
            stride: 1,
            verified_window: 3,
            certificate: Certificate::WindowOnly,
        };
        let lim = chain_limit(&pattern, &reg()).unwrap();
        assert_eq!(lim[0], parse_set("[1, 2]", &r_ref()).unwrap());
    }

    fn r_ref() -> SeqRegistry {
        standard_registry()
    }

    #[test]
    fn serialization_round_trip() {
        let p = ChainPattern {
            players: vec![vec![
                PrimPattern::ConstAtom { label: "L".into() },
                PrimPattern::MovingTail { seq: "even".into(), base: 1, step: 2 },
            ]],
            stride: 2,
            verified_window: 4,
            certificate: Certificate::Inductive,
        };
        let js = serde_json::to_string(&p).unwrap();
        let back: ChainPattern = serde_json::from_str(&js).unwrap();
        assert_eq!(back, p);
    }
}
