//! Symbolic strategy sets.
//!
//! A [`SymbolicSet`] is a finite union of primitives: named atoms, rational
//! points, bounded rational intervals with open/closed endpoints, and tails
//! of registered monotone sequences (`{seq(k) : k >= start}`). Sets are kept
//! in a canonical normal form, which makes structural equality coincide with
//! extensional equality:
//!
//! - atoms are sorted and deduplicated,
//! - numeric primitives are pairwise disjoint and sorted by position,
//! - intervals are maximal (merged with neighbours and absorbed points),
//! - a point equal to a tail member is absorbed by the tail, and a point
//!   equal to the value just before a tail's start extends the tail,
//! - tails over the same value stream are merged; the portion of a tail
//!   inside an interval is absorbed by the interval,
//! - tails are compared by the canonical key of their value stream, so two
//!   differently parameterized descriptions of the same tail are equal.
//!
//! Operations are exact: combinations whose result is not expressible with
//! these primitives (for example removing a tail's infinitely many points
//! from an interval) fail with an explicit error instead of approximating.

use std::cmp::Ordering;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Q;
use crate::seq::{family_overlap, FamilyOverlap, Monotonicity, RationalSequence, SeqRegistry};

/// Number of explicit points an operation may materialize from a tail or
/// interval split before giving up. Guards against representable but
/// enormous exact results.
const MATERIALIZE_CAP: i64 = 65_536;

/// A concrete strategy: either a named label or an exact rational.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Num(Q),
    Label(String),
}

impl Value {
    pub fn label(s: impl Into<String>) -> Self {
        Value::Label(s.into())
    }

    pub fn num(q: Q) -> Self {
        Value::Num(q)
    }

    pub fn as_num(&self) -> Option<&Q> {
        match self {
            Value::Num(q) => Some(q),
            Value::Label(_) => None,
        }
    }

    pub fn as_label(&self) -> Option<&str> {
        match self {
            Value::Label(s) => Some(s),
            Value::Num(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Label(s) => f.write_str(s),
            Value::Num(q) => write!(f, "{q}"),
        }
    }
}

/// Canonical ordering used everywhere a list of strategies is enumerated:
/// labels first (lexicographic), then numerics ascending.
pub fn value_cmp(a: &Value, b: &Value) -> Ordering {
    match (a, b) {
        (Value::Label(x), Value::Label(y)) => x.cmp(y),
        (Value::Label(_), Value::Num(_)) => Ordering::Less,
        (Value::Num(_), Value::Label(_)) => Ordering::Greater,
        (Value::Num(x), Value::Num(y)) => x.cmp(y),
    }
}

/// A membership probe: a label, a rational, or a (sequence, index) reference
/// resolved through the registry.
#[derive(Clone, Debug)]
pub enum ValueRef {
    Label(String),
    Num(Q),
    SeqIndex(String, i64),
}

impl ValueRef {
    pub fn resolve(&self, reg: &SeqRegistry) -> Result<Value> {
        match self {
            ValueRef::Label(s) => Ok(Value::Label(s.clone())),
            ValueRef::Num(q) => Ok(Value::Num(q.clone())),
            ValueRef::SeqIndex(id, k) => {
                let seq = reg.get(id)?;
                if *k < seq.domain_start() {
                    return Err(Error::MalformedSet(format!(
                        "index {k} before domain of sequence `{id}`"
                    )));
                }
                Ok(Value::Num(seq.eval(*k)))
            }
        }
    }
}

/// Non-empty rational interval with open/closed endpoints.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: Q, hi: Q, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        match lo.cmp(&hi) {
            Ordering::Greater => Err(Error::MalformedSet(format!(
                "interval with lo {lo} > hi {hi}"
            ))),
            Ordering::Equal if !(lo_closed && hi_closed) => Err(Error::MalformedSet(format!(
                "degenerate interval at {lo} with an open endpoint denotes the empty set"
            ))),
            _ => Ok(Interval { lo, hi, lo_closed, hi_closed }),
        }
    }

    pub fn closed(lo: Q, hi: Q) -> Self {
        Interval::new(lo, hi, true, true).unwrap()
    }

    pub fn open(lo: Q, hi: Q) -> Result<Self> {
        Interval::new(lo, hi, false, false)
    }

    pub fn contains(&self, q: &Q) -> bool {
        let lo_ok = q > &self.lo || (self.lo_closed && q == &self.lo);
        let hi_ok = q < &self.hi || (self.hi_closed && q == &self.hi);
        lo_ok && hi_ok
    }

    fn is_degenerate_point(&self) -> bool {
        self.lo == self.hi
    }

    /// A value inside the interval, used for witnesses and probes.
    pub fn sample(&self) -> Q {
        if self.lo_closed {
            self.lo.clone()
        } else if self.hi_closed {
            self.hi.clone()
        } else {
            self.lo.midpoint(&self.hi)
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SetPrimitive {
    Atom(String),
    Point(Q),
    Interval(Interval),
    /// `{seq(k) : k >= start}` for a registered sequence.
    Tail { seq: String, start: i64 },
}

impl SetPrimitive {
    pub fn atom(s: impl Into<String>) -> Self {
        SetPrimitive::Atom(s.into())
    }

    pub fn point(q: Q) -> Self {
        SetPrimitive::Point(q)
    }

    pub fn interval(lo: Q, hi: Q, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        Ok(SetPrimitive::Interval(Interval::new(lo, hi, lo_closed, hi_closed)?))
    }

    pub fn tail(seq: impl Into<String>, start: i64) -> Self {
        SetPrimitive::Tail { seq: seq.into(), start }
    }
}

/// Contiguous window of tail indices selected by numeric bounds.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum IndexWindow {
    Empty,
    Range(i64, i64),
    From(i64),
}

/// Lower/upper value bound: `(value, strict)`. For a lower bound, strict
/// means `member > value`; for an upper bound, `member < value`.
type Bound<'a> = Option<(&'a Q, bool)>;

fn tail_window(seq: &RationalSequence, start: i64, lo: Bound, hi: Bound) -> IndexWindow {
    let start = start.max(seq.domain_start());
    match seq.monotonicity() {
        Monotonicity::Increasing => {
            let k_lo = match lo {
                None => start,
                Some((q, strict)) => match seq.first_index_above(q, strict, start) {
                    Some(k) => k,
                    None => return IndexWindow::Empty,
                },
            };
            match hi {
                None => IndexWindow::From(k_lo),
                Some((q, strict)) => {
                    if seq.eventually_below(q, strict) {
                        IndexWindow::From(k_lo)
                    } else {
                        match seq.last_index_below(q, strict, start) {
                            Some(k_hi) if k_hi >= k_lo => IndexWindow::Range(k_lo, k_hi),
                            _ => IndexWindow::Empty,
                        }
                    }
                }
            }
        }
        Monotonicity::Decreasing => {
            // Large values first: the upper bound selects a suffix, the
            // lower bound a prefix.
            let k_from = match hi {
                None => start,
                Some((q, strict)) => match seq.first_index_below(q, strict, start) {
                    Some(k) => k,
                    None => return IndexWindow::Empty,
                },
            };
            match lo {
                None => IndexWindow::From(k_from),
                Some((q, strict)) => {
                    if seq.eventually_above(q, strict) {
                        IndexWindow::From(k_from)
                    } else {
                        match seq.last_index_above(q, strict, start) {
                            Some(k_last) if k_last >= k_from => IndexWindow::Range(k_from, k_last),
                            _ => IndexWindow::Empty,
                        }
                    }
                }
            }
        }
    }
}

fn interval_bounds(iv: &Interval) -> (Bound<'_>, Bound<'_>) {
    // Membership in [lo, hi] as lower/upper bounds on the value.
    (Some((&iv.lo, !iv.lo_closed)), Some((&iv.hi, !iv.hi_closed)))
}

/// Symbolic strategy set in canonical normal form.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SymbolicSet {
    /// Sorted unique atom labels.
    atoms: Vec<String>,
    /// Disjoint numeric primitives (Point / Interval / Tail) sorted by
    /// position; never contains Atom.
    numeric: Vec<SetPrimitive>,
}

impl SymbolicSet {
    pub fn empty() -> Self {
        SymbolicSet::default()
    }

    /// Builds and normalizes a set from arbitrary primitives.
    pub fn from_prims(prims: Vec<SetPrimitive>, reg: &SeqRegistry) -> Result<Self> {
        normalize(prims, reg)
    }

    pub fn from_atoms<I: IntoIterator<Item = S>, S: Into<String>>(labels: I) -> Self {
        let mut atoms: Vec<String> = labels.into_iter().map(Into::into).collect();
        atoms.sort();
        atoms.dedup();
        SymbolicSet { atoms, numeric: Vec::new() }
    }

    pub fn from_values(values: &[Value], reg: &SeqRegistry) -> Result<Self> {
        let prims = values
            .iter()
            .map(|v| match v {
                Value::Label(s) => SetPrimitive::atom(s.clone()),
                Value::Num(q) => SetPrimitive::point(q.clone()),
            })
            .collect();
        SymbolicSet::from_prims(prims, reg)
    }

    pub fn singleton(v: &Value) -> Self {
        match v {
            Value::Label(s) => SymbolicSet { atoms: vec![s.clone()], numeric: Vec::new() },
            Value::Num(q) => SymbolicSet { atoms: Vec::new(), numeric: vec![SetPrimitive::point(q.clone())] },
        }
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.numeric.is_empty()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn numeric_prims(&self) -> &[SetPrimitive] {
        &self.numeric
    }

    pub fn prims(&self) -> impl Iterator<Item = SetPrimitive> + '_ {
        self.atoms
            .iter()
            .map(|a| SetPrimitive::Atom(a.clone()))
            .chain(self.numeric.iter().cloned())
    }

    pub fn has_label(&self, label: &str) -> bool {
        self.atoms.binary_search_by(|a| a.as_str().cmp(label)).is_ok()
    }

    pub fn contains_num(&self, q: &Q, reg: &SeqRegistry) -> Result<bool> {
        for p in &self.numeric {
            match p {
                SetPrimitive::Point(v) if v == q => return Ok(true),
                SetPrimitive::Interval(iv) if iv.contains(q) => return Ok(true),
                SetPrimitive::Tail { seq, start } => {
                    if reg.get(seq)?.index_of(q, *start).is_some() {
                        return Ok(true);
                    }
                }
                _ => {}
            }
        }
        Ok(false)
    }

    pub fn contains_value(&self, v: &Value, reg: &SeqRegistry) -> Result<bool> {
        match v {
            Value::Label(s) => Ok(self.has_label(s)),
            Value::Num(q) => self.contains_num(q, reg),
        }
    }

    pub fn contains(&self, x: &ValueRef, reg: &SeqRegistry) -> Result<bool> {
        let v = x.resolve(reg)?;
        self.contains_value(&v, reg)
    }

    /// Whether the set has no interval or tail primitives.
    pub fn is_finite(&self) -> bool {
        self.numeric.iter().all(|p| matches!(p, SetPrimitive::Point(_)))
    }

    /// All members in canonical order, when the set is finite.
    pub fn enumerate_values(&self) -> Option<Vec<Value>> {
        let mut out: Vec<Value> = self.atoms.iter().map(|a| Value::Label(a.clone())).collect();
        for p in &self.numeric {
            match p {
                SetPrimitive::Point(q) => out.push(Value::Num(q.clone())),
                _ => return None,
            }
        }
        Some(out)
    }

    /// Number of members, when finite.
    pub fn finite_len(&self) -> Option<usize> {
        self.is_finite().then(|| self.atoms.len() + self.numeric.len())
    }

    /// A representative member, used for witnesses in diagnostics.
    pub fn witness_value(&self, reg: &SeqRegistry) -> Result<Option<Value>> {
        if let Some(a) = self.atoms.first() {
            return Ok(Some(Value::Label(a.clone())));
        }
        match self.numeric.first() {
            None => Ok(None),
            Some(SetPrimitive::Point(q)) => Ok(Some(Value::Num(q.clone()))),
            Some(SetPrimitive::Interval(iv)) => Ok(Some(Value::Num(iv.sample()))),
            Some(SetPrimitive::Tail { seq, start }) => {
                Ok(Some(Value::Num(reg.get(seq)?.eval(*start))))
            }
            Some(SetPrimitive::Atom(_)) => unreachable!("atom in numeric list"),
        }
    }

    /// Numeric infimum with attainment flag, ignoring atoms.
    pub fn numeric_inf(&self, reg: &SeqRegistry) -> Result<Option<(Q, bool)>> {
        let mut best: Option<(Q, bool)> = None;
        for p in &self.numeric {
            let (v, attained) = match p {
                SetPrimitive::Point(q) => (q.clone(), true),
                SetPrimitive::Interval(iv) => (iv.lo.clone(), iv.lo_closed),
                SetPrimitive::Tail { seq, start } => {
                    let s = reg.get(seq)?;
                    match s.monotonicity() {
                        Monotonicity::Increasing => (s.eval(*start), true),
                        Monotonicity::Decreasing => match s.limit() {
                            crate::seq::LimitValue::Finite(l) => (l.clone(), false),
                            _ => {
                                return Err(Error::UnsupportedCombination(
                                    "numeric_inf of a tail unbounded below".into(),
                                ))
                            }
                        },
                    }
                }
                SetPrimitive::Atom(_) => unreachable!(),
            };
            best = Some(match best {
                None => (v, attained),
                Some((bv, ba)) => match v.cmp(&bv) {
                    Ordering::Less => (v, attained),
                    Ordering::Equal => (bv, ba || attained),
                    Ordering::Greater => (bv, ba),
                },
            });
        }
        Ok(best)
    }

    /// Numeric supremum with attainment flag, ignoring atoms.
    pub fn numeric_sup(&self, reg: &SeqRegistry) -> Result<Option<(Q, bool)>> {
        let mut best: Option<(Q, bool)> = None;
        for p in &self.numeric {
            let (v, attained) = match p {
                SetPrimitive::Point(q) => (q.clone(), true),
                SetPrimitive::Interval(iv) => (iv.hi.clone(), iv.hi_closed),
                SetPrimitive::Tail { seq, start } => {
                    let s = reg.get(seq)?;
                    match s.monotonicity() {
                        Monotonicity::Decreasing => (s.eval(*start), true),
                        Monotonicity::Increasing => match s.limit() {
                            crate::seq::LimitValue::Finite(l) => (l.clone(), false),
                            _ => {
                                return Err(Error::UnsupportedCombination(
                                    "numeric_sup of a tail unbounded above".into(),
                                ))
                            }
                        },
                    }
                }
                SetPrimitive::Atom(_) => unreachable!(),
            };
            best = Some(match best {
                None => (v, attained),
                Some((bv, ba)) => match v.cmp(&bv) {
                    Ordering::Greater => (v, attained),
                    Ordering::Equal => (bv, ba || attained),
                    Ordering::Less => (bv, ba),
                },
            });
        }
        Ok(best)
    }

    /// Whether every numeric member is strictly greater than `q`.
    /// Vacuously true when there are no numeric members.
    pub fn all_numeric_gt(&self, q: &Q, reg: &SeqRegistry) -> Result<bool> {
        match self.numeric_inf(reg)? {
            None => Ok(true),
            Some((inf, attained)) => Ok(inf > *q || (!attained && inf == *q)),
        }
    }

    /// Whether some numeric member is strictly greater than `q`.
    pub fn exists_numeric_gt(&self, q: &Q, reg: &SeqRegistry) -> Result<bool> {
        match self.numeric_sup(reg)? {
            None => Ok(false),
            Some((sup, _)) => Ok(sup > *q),
        }
    }

    /// Numeric members above `q` (strictly if `strict`). Atoms are dropped.
    pub fn numeric_above(&self, q: &Q, strict: bool, reg: &SeqRegistry) -> Result<SymbolicSet> {
        self.numeric_bounded(Some((q, strict)), None, reg)
    }

    /// Numeric members below `q` (strictly if `strict`). Atoms are dropped.
    pub fn numeric_below(&self, q: &Q, strict: bool, reg: &SeqRegistry) -> Result<SymbolicSet> {
        self.numeric_bounded(None, Some((q, strict)), reg)
    }

    /// Numeric members within the given bounds. Atoms are dropped.
    pub fn numeric_bounded(&self, lo: Bound, hi: Bound, reg: &SeqRegistry) -> Result<SymbolicSet> {
        let mut out: Vec<SetPrimitive> = Vec::new();
        for p in &self.numeric {
            match p {
                SetPrimitive::Point(q) => {
                    if bound_ok_lo(q, lo) && bound_ok_hi(q, hi) {
                        out.push(p.clone());
                    }
                }
                SetPrimitive::Interval(iv) => {
                    if let Some(clipped) = clip_interval(iv, lo, hi) {
                        out.push(SetPrimitive::Interval(clipped));
                    }
                }
                SetPrimitive::Tail { seq, start } => {
                    let s = reg.get(seq)?;
                    match tail_window(s, *start, lo, hi) {
                        IndexWindow::Empty => {}
                        IndexWindow::From(k) => out.push(SetPrimitive::tail(seq.clone(), k)),
                        IndexWindow::Range(k1, k2) => {
                            push_tail_points(&mut out, s, k1, k2)?;
                        }
                    }
                }
                SetPrimitive::Atom(_) => unreachable!(),
            }
        }
        normalize(out, reg)
    }

    /// Set of atom members only.
    pub fn atoms_only(&self) -> SymbolicSet {
        SymbolicSet { atoms: self.atoms.clone(), numeric: Vec::new() }
    }

    /// Set of numeric members only.
    pub fn numerics_only(&self) -> SymbolicSet {
        SymbolicSet { atoms: Vec::new(), numeric: self.numeric.clone() }
    }

    pub fn union(&self, other: &SymbolicSet, reg: &SeqRegistry) -> Result<SymbolicSet> {
        let prims = self.prims().chain(other.prims()).collect();
        normalize(prims, reg)
    }

    pub fn intersect(&self, other: &SymbolicSet, reg: &SeqRegistry) -> Result<SymbolicSet> {
        let mut out: Vec<SetPrimitive> = Vec::new();
        for a in &self.atoms {
            if other.has_label(a) {
                out.push(SetPrimitive::Atom(a.clone()));
            }
        }
        for p in &self.numeric {
            for q in &other.numeric {
                out.extend(intersect_numeric(p, q, reg)?);
            }
        }
        normalize(out, reg)
    }

    pub fn difference(&self, other: &SymbolicSet, reg: &SeqRegistry) -> Result<SymbolicSet> {
        let mut out: Vec<SetPrimitive> = Vec::new();
        for a in &self.atoms {
            if !other.has_label(a) {
                out.push(SetPrimitive::Atom(a.clone()));
            }
        }
        for p in &self.numeric {
            // Subtract every primitive of `other` from the running pieces.
            let mut pieces = vec![p.clone()];
            for q in &other.numeric {
                let mut next = Vec::new();
                for piece in &pieces {
                    next.extend(subtract_numeric(piece, q, reg)?);
                }
                pieces = next;
                if pieces.is_empty() {
                    break;
                }
            }
            out.extend(pieces);
        }
        normalize(out, reg)
    }

    /// Exact subset test. Errors only in the same undecidable cross-family
    /// cases as the combination operations.
    pub fn is_subset(&self, other: &SymbolicSet, reg: &SeqRegistry) -> Result<bool> {
        for a in &self.atoms {
            if !other.has_label(a) {
                return Ok(false);
            }
        }
        for p in &self.numeric {
            match p {
                SetPrimitive::Point(q) => {
                    if !other.contains_num(q, reg)? {
                        return Ok(false);
                    }
                }
                SetPrimitive::Interval(iv) => {
                    // Countable primitives cannot cover an interval: the
                    // interval must fit inside a single interval of `other`.
                    let covered = other.numeric.iter().any(|o| match o {
                        SetPrimitive::Interval(oiv) => interval_covers(oiv, iv),
                        _ => false,
                    });
                    if !covered {
                        return Ok(false);
                    }
                }
                SetPrimitive::Tail { seq, start } => {
                    if !tail_subset(seq, *start, other, reg)? {
                        return Ok(false);
                    }
                }
                SetPrimitive::Atom(_) => unreachable!(),
            }
        }
        Ok(true)
    }

    pub fn compare(&self, other: &SymbolicSet, reg: &SeqRegistry) -> Result<Comparison> {
        let relation = if self == other {
            SetRelation::Equal
        } else {
            match (self.is_subset(other, reg)?, other.is_subset(self, reg)?) {
                (true, true) => SetRelation::Equal,
                (true, false) => SetRelation::Subset,
                (false, true) => SetRelation::Superset,
                (false, false) => SetRelation::Incomparable,
            }
        };
        Ok(Comparison {
            relation,
            left_empty: self.is_empty(),
            right_empty: other.is_empty(),
        })
    }

    /// Serializable description of the primitives.
    pub fn to_expr(&self) -> SetExpr {
        SetExpr { prims: self.prims().map(PrimExpr::from_prim).collect() }
    }
}

fn bound_ok_lo(q: &Q, lo: Bound) -> bool {
    match lo {
        None => true,
        Some((v, strict)) => {
            if strict {
                q > v
            } else {
                q >= v
            }
        }
    }
}

fn bound_ok_hi(q: &Q, hi: Bound) -> bool {
    match hi {
        None => true,
        Some((v, strict)) => {
            if strict {
                q < v
            } else {
                q <= v
            }
        }
    }
}

fn clip_interval(iv: &Interval, lo: Bound, hi: Bound) -> Option<Interval> {
    let (mut l, mut lc) = (iv.lo.clone(), iv.lo_closed);
    let (mut h, mut hc) = (iv.hi.clone(), iv.hi_closed);
    if let Some((v, strict)) = lo {
        match v.cmp(&l) {
            Ordering::Greater => {
                l = v.clone();
                lc = !strict;
            }
            Ordering::Equal => lc = lc && !strict,
            Ordering::Less => {}
        }
    }
    if let Some((v, strict)) = hi {
        match v.cmp(&h) {
            Ordering::Less => {
                h = v.clone();
                hc = !strict;
            }
            Ordering::Equal => hc = hc && !strict,
            Ordering::Greater => {}
        }
    }
    Interval::new(l, h, lc, hc).ok()
}

fn interval_covers(outer: &Interval, inner: &Interval) -> bool {
    let lo_ok = match outer.lo.cmp(&inner.lo) {
        Ordering::Less => true,
        Ordering::Equal => outer.lo_closed || !inner.lo_closed,
        Ordering::Greater => false,
    };
    let hi_ok = match outer.hi.cmp(&inner.hi) {
        Ordering::Greater => true,
        Ordering::Equal => outer.hi_closed || !inner.hi_closed,
        Ordering::Less => false,
    };
    lo_ok && hi_ok
}

fn push_tail_points(
    out: &mut Vec<SetPrimitive>,
    seq: &RationalSequence,
    k1: i64,
    k2: i64,
) -> Result<()> {
    if k2 - k1 >= MATERIALIZE_CAP {
        return Err(Error::UnsupportedCombination(format!(
            "operation would materialize {} explicit points from `{}`",
            k2 - k1 + 1,
            seq.id()
        )));
    }
    for k in k1..=k2 {
        out.push(SetPrimitive::point(seq.eval(k)));
    }
    Ok(())
}

/// Relationship between two tails: same value stream (with the earlier /
/// later start identified), or distinct families.
enum TailRelation {
    /// `offset_in_a`: position of b's start within a's stream coordinates.
    SameStream { b_start_in_a: i64 },
    Distinct,
}

fn relate_tails(
    sa: &RationalSequence,
    _start_a: i64,
    sb: &RationalSequence,
    start_b: i64,
) -> TailRelation {
    if sa.id() == sb.id() {
        return TailRelation::SameStream { b_start_in_a: start_b };
    }
    // b's first value must appear in a's family at some (possibly
    // out-of-domain) index with matching continuation.
    let qb = sb.eval(start_b);
    let (n, m) = qb.as_ratio();
    let (a, b, c, d) = sa.coeffs();
    let coeff = a * m - n * c;
    let rhs = n * d - b * m;
    if coeff.is_zero() {
        return TailRelation::Distinct;
    }
    let (quot, rem) = num_integer::Integer::div_rem(&rhs, &coeff);
    if !rem.is_zero() {
        return TailRelation::Distinct;
    }
    let Ok(x) = i64::try_from(quot) else {
        return TailRelation::Distinct;
    };
    // The candidate alignment must hold for the whole streams, which the
    // canonical keys decide. Only compare within a's domain.
    if x >= sa.domain_start() && sa.canonical_key(x) == sb.canonical_key(start_b) {
        TailRelation::SameStream { b_start_in_a: x }
    } else {
        TailRelation::Distinct
    }
}

fn intersect_numeric(
    p: &SetPrimitive,
    q: &SetPrimitive,
    reg: &SeqRegistry,
) -> Result<Vec<SetPrimitive>> {
    use SetPrimitive as P;
    Ok(match (p, q) {
        (P::Point(a), _) => {
            if singleton_member(a, q, reg)? {
                vec![p.clone()]
            } else {
                vec![]
            }
        }
        (_, P::Point(b)) => {
            if singleton_member(b, p, reg)? {
                vec![q.clone()]
            } else {
                vec![]
            }
        }
        (P::Interval(a), P::Interval(b)) => {
            let (lo, hi) = interval_bounds(b);
            clip_interval(a, lo, hi).map(P::Interval).into_iter().collect()
        }
        (P::Interval(iv), P::Tail { seq, start }) | (P::Tail { seq, start }, P::Interval(iv)) => {
            let s = reg.get(seq)?;
            let (lo, hi) = interval_bounds(iv);
            match tail_window(s, *start, lo, hi) {
                IndexWindow::Empty => vec![],
                IndexWindow::From(k) => vec![P::tail(seq.clone(), k)],
                IndexWindow::Range(k1, k2) => {
                    let mut out = Vec::new();
                    push_tail_points(&mut out, s, k1, k2)?;
                    out
                }
            }
        }
        (P::Tail { seq: qa, start: ka }, P::Tail { seq: qb, start: kb }) => {
            let sa = reg.get(qa)?;
            let sb = reg.get(qb)?;
            match relate_tails(sa, *ka, sb, *kb) {
                TailRelation::SameStream { b_start_in_a } => {
                    let k = (*ka).max(b_start_in_a);
                    vec![P::tail(qa.clone(), k)]
                }
                TailRelation::Distinct => match family_overlap(sa, *ka, sb, *kb)? {
                    FamilyOverlap::Empty => vec![],
                    FamilyOverlap::Finite(hits) => {
                        hits.into_iter().map(|(k, _)| P::point(sa.eval(k))).collect()
                    }
                    FamilyOverlap::Unsupported => {
                        return Err(Error::UnsupportedCombination(format!(
                            "tails of `{qa}` and `{qb}` share an infinite subfamily \
                             not expressible as a primitive"
                        )))
                    }
                },
            }
        }
        (P::Atom(_), _) | (_, P::Atom(_)) => unreachable!("atoms are handled separately"),
    })
}

fn singleton_member(v: &Q, p: &SetPrimitive, reg: &SeqRegistry) -> Result<bool> {
    Ok(match p {
        SetPrimitive::Point(q) => v == q,
        SetPrimitive::Interval(iv) => iv.contains(v),
        SetPrimitive::Tail { seq, start } => reg.get(seq)?.index_of(v, *start).is_some(),
        SetPrimitive::Atom(_) => false,
    })
}

fn subtract_numeric(
    p: &SetPrimitive,
    q: &SetPrimitive,
    reg: &SeqRegistry,
) -> Result<Vec<SetPrimitive>> {
    use SetPrimitive as P;
    Ok(match (p, q) {
        (P::Point(a), _) => {
            if singleton_member(a, q, reg)? {
                vec![]
            } else {
                vec![p.clone()]
            }
        }
        (P::Interval(a), P::Point(b)) => {
            if !a.contains(b) {
                vec![p.clone()]
            } else {
                let mut out = Vec::new();
                if let Ok(left) = Interval::new(a.lo.clone(), b.clone(), a.lo_closed, false) {
                    if !left.is_degenerate_point() || left.lo_closed {
                        out.push(P::Interval(left));
                    }
                }
                if let Ok(right) = Interval::new(b.clone(), a.hi.clone(), false, a.hi_closed) {
                    out.push(P::Interval(right));
                }
                // Degenerate leftovers [x,x] survive only when valid; the
                // Interval constructor already rejects empty halves.
                out.retain(|piece| match piece {
                    P::Interval(iv) => !(iv.is_degenerate_point() && !(iv.lo_closed && iv.hi_closed)),
                    _ => true,
                });
                out
            }
        }
        (P::Interval(a), P::Interval(b)) => {
            let mut out = Vec::new();
            // Left piece: values of a strictly below b's lower end.
            if let Some(left) = clip_interval(a, None, Some((&b.lo, b.lo_closed))) {
                out.push(P::Interval(left));
            }
            // Right piece: values of a strictly above b's upper end.
            if let Some(right) = clip_interval(a, Some((&b.hi, b.hi_closed)), None) {
                out.push(P::Interval(right));
            }
            // Disjoint case produces a itself in one piece.
            if out.len() == 1 {
                if let P::Interval(only) = &out[0] {
                    if only == a {
                        return Ok(vec![p.clone()]);
                    }
                }
            }
            out
        }
        (P::Interval(iv), P::Tail { seq, start }) => {
            let s = reg.get(seq)?;
            let (lo, hi) = interval_bounds(iv);
            match tail_window(s, *start, lo, hi) {
                IndexWindow::Empty => vec![p.clone()],
                IndexWindow::From(_) => {
                    return Err(Error::UnsupportedCombination(format!(
                        "removing infinitely many points of `{seq}` from an interval \
                         is not expressible with the available primitives"
                    )))
                }
                IndexWindow::Range(k1, k2) => {
                    if k2 - k1 >= MATERIALIZE_CAP {
                        return Err(Error::UnsupportedCombination(format!(
                            "interval split at {} tail points exceeds the materialization cap",
                            k2 - k1 + 1
                        )));
                    }
                    let mut pieces = vec![p.clone()];
                    for k in k1..=k2 {
                        let cut = P::point(s.eval(k));
                        let mut next = Vec::new();
                        for piece in &pieces {
                            next.extend(subtract_numeric(piece, &cut, reg)?);
                        }
                        pieces = next;
                    }
                    pieces
                }
            }
        }
        (P::Tail { seq, start }, P::Interval(iv)) => {
            let s = reg.get(seq)?;
            let (lo, hi) = interval_bounds(iv);
            match tail_window(s, *start, lo, hi) {
                IndexWindow::Empty => vec![p.clone()],
                IndexWindow::From(k0) => {
                    let mut out = Vec::new();
                    push_tail_points(&mut out, s, *start, k0 - 1)?;
                    out
                }
                IndexWindow::Range(k1, k2) => {
                    let mut out = Vec::new();
                    push_tail_points(&mut out, s, *start, k1 - 1)?;
                    out.push(P::tail(seq.clone(), k2 + 1));
                    out
                }
            }
        }
        (P::Tail { seq, start }, P::Point(b)) => {
            let s = reg.get(seq)?;
            match s.index_of(b, *start) {
                None => vec![p.clone()],
                Some(k) => {
                    let mut out = Vec::new();
                    push_tail_points(&mut out, s, *start, k - 1)?;
                    out.push(P::tail(seq.clone(), k + 1));
                    out
                }
            }
        }
        (P::Tail { seq: qa, start: ka }, P::Tail { seq: qb, start: kb }) => {
            let sa = reg.get(qa)?;
            let sb = reg.get(qb)?;
            match relate_tails(sa, *ka, sb, *kb) {
                TailRelation::SameStream { b_start_in_a } => {
                    if b_start_in_a <= *ka {
                        vec![]
                    } else {
                        let mut out = Vec::new();
                        push_tail_points(&mut out, sa, *ka, b_start_in_a - 1)?;
                        out
                    }
                }
                TailRelation::Distinct => match family_overlap(sa, *ka, sb, *kb)? {
                    FamilyOverlap::Empty => vec![p.clone()],
                    FamilyOverlap::Finite(hits) => {
                        let mut pieces = vec![p.clone()];
                        for (k, _) in hits {
                            let cut = P::point(sa.eval(k));
                            let mut next = Vec::new();
                            for piece in &pieces {
                                next.extend(subtract_numeric(piece, &cut, reg)?);
                            }
                            pieces = next;
                        }
                        pieces
                    }
                    FamilyOverlap::Unsupported => {
                        return Err(Error::UnsupportedCombination(format!(
                            "tails of `{qa}` and `{qb}` share an infinite subfamily \
                             not expressible as a primitive"
                        )))
                    }
                },
            }
        }
        (P::Atom(_), _) | (_, P::Atom(_)) => unreachable!("atoms are handled separately"),
    })
}

fn tail_subset(seq: &str, start: i64, other: &SymbolicSet, reg: &SeqRegistry) -> Result<bool> {
    let s = reg.get(seq)?;
    // Index coverage of [start, inf) by other's primitives.
    let mut from_base: Option<i64> = None;
    let mut finite_cover: Vec<(i64, i64)> = Vec::new();
    for o in &other.numeric {
        match o {
            SetPrimitive::Point(q) => {
                if let Some(k) = s.index_of(q, start) {
                    finite_cover.push((k, k));
                }
            }
            SetPrimitive::Interval(iv) => {
                let (lo, hi) = interval_bounds(iv);
                match tail_window(s, start, lo, hi) {
                    IndexWindow::Empty => {}
                    IndexWindow::Range(k1, k2) => finite_cover.push((k1, k2)),
                    IndexWindow::From(k) => {
                        from_base = Some(from_base.map_or(k, |b: i64| b.min(k)));
                    }
                }
            }
            SetPrimitive::Tail { seq: oseq, start: ostart } => {
                let so = reg.get(oseq)?;
                match relate_tails(s, start, so, *ostart) {
                    TailRelation::SameStream { b_start_in_a } => {
                        let k = b_start_in_a.max(s.domain_start());
                        from_base = Some(from_base.map_or(k, |b: i64| b.min(k)));
                    }
                    TailRelation::Distinct => match family_overlap(s, start, so, *ostart)? {
                        FamilyOverlap::Empty => {}
                        FamilyOverlap::Finite(hits) => {
                            finite_cover.extend(hits.into_iter().map(|(k, _)| (k, k)));
                        }
                        FamilyOverlap::Unsupported => {
                            return Err(Error::UnsupportedCombination(format!(
                                "subset test between tails of `{seq}` and `{oseq}` is not decidable here"
                            )))
                        }
                    },
                }
            }
            SetPrimitive::Atom(_) => unreachable!(),
        }
    }
    let Some(base) = from_base else {
        // Finite cover can never cover an infinite tail.
        return Ok(false);
    };
    if base <= start {
        return Ok(true);
    }
    // Check [start, base) against the finite windows.
    finite_cover.sort_unstable();
    let mut k = start;
    for (w1, w2) in finite_cover {
        if k < w1 {
            return Ok(false);
        }
        if k <= w2 {
            k = w2 + 1;
        }
        if k >= base {
            return Ok(true);
        }
    }
    Ok(k >= base)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SetRelation {
    Equal,
    Subset,
    Superset,
    Incomparable,
}

#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub relation: SetRelation,
    pub left_empty: bool,
    pub right_empty: bool,
}

// ---------------------------------------------------------------------------
// Normalization

fn normalize(prims: Vec<SetPrimitive>, reg: &SeqRegistry) -> Result<SymbolicSet> {
    let mut atoms: Vec<String> = Vec::new();
    let mut points: Vec<Q> = Vec::new();
    let mut intervals: Vec<Interval> = Vec::new();
    let mut tails: Vec<(String, i64)> = Vec::new();

    for p in prims {
        match p {
            SetPrimitive::Atom(a) => atoms.push(a),
            SetPrimitive::Point(q) => points.push(q),
            SetPrimitive::Interval(iv) => {
                if iv.is_degenerate_point() {
                    points.push(iv.lo);
                } else {
                    intervals.push(iv);
                }
            }
            SetPrimitive::Tail { seq, start } => {
                let s = reg.get(&seq)?;
                if start < s.domain_start() {
                    return Err(Error::MalformedSet(format!(
                        "tail start {start} before domain of sequence `{seq}`"
                    )));
                }
                tails.push((seq, start));
            }
        }
    }

    atoms.sort();
    atoms.dedup();

    // Fixpoint over the interacting rewrite passes. Each effective rewrite
    // strictly reduces (#points + #tails) or a tail start, so this
    // terminates; the counter is a defensive bound.
    let mut rounds = 0;
    loop {
        rounds += 1;
        if rounds > 10_000 {
            return Err(Error::UnsupportedCombination(
                "set normalization did not converge".into(),
            ));
        }
        let mut changed = false;

        // Merge same-stream tails; deduplicate cross-family tail overlaps.
        'tail_pairs: for i in 0..tails.len() {
            for j in (i + 1)..tails.len() {
                let (sa, ka) = (reg.get(&tails[i].0)?, tails[i].1);
                let (sb, kb) = (reg.get(&tails[j].0)?, tails[j].1);
                match relate_tails(sa, ka, sb, kb) {
                    TailRelation::SameStream { b_start_in_a } => {
                        // Keep the tail that starts earlier in the stream.
                        if b_start_in_a <= ka {
                            tails.swap_remove(i);
                        } else {
                            tails.swap_remove(j);
                        }
                        changed = true;
                        break 'tail_pairs;
                    }
                    TailRelation::Distinct => match family_overlap(sa, ka, sb, kb)? {
                        FamilyOverlap::Empty => {}
                        FamilyOverlap::Finite(hits) => {
                            // Remove the shared indices from the tail whose
                            // (seq, start) sorts later; keep values once.
                            let (victim, keep_vals): (usize, Vec<i64>) =
                                if tails[i] <= tails[j] {
                                    (j, hits.iter().map(|&(_, jj)| jj).collect())
                                } else {
                                    (i, hits.iter().map(|&(kk, _)| kk).collect())
                                };
                            let (vseq, vstart) = tails[victim].clone();
                            let vs = reg.get(&vseq)?;
                            let mut cut = keep_vals;
                            cut.sort_unstable();
                            cut.dedup();
                            cut.retain(|&k| k >= vstart);
                            if cut.is_empty() {
                                continue;
                            }
                            let last = *cut.last().unwrap();
                            if last - vstart >= MATERIALIZE_CAP {
                                return Err(Error::UnsupportedCombination(format!(
                                    "normalizing overlap of `{}` and `{}` would materialize too many points",
                                    tails[i].0, tails[j].0
                                )));
                            }
                            for k in vstart..=last {
                                if !cut.contains(&k) {
                                    points.push(vs.eval(k));
                                }
                            }
                            tails[victim] = (vseq, last + 1);
                            changed = true;
                            break 'tail_pairs;
                        }
                        FamilyOverlap::Unsupported => {
                            return Err(Error::UnsupportedCombination(format!(
                                "tails of `{}` and `{}` overlap in an infinite subfamily",
                                tails[i].0, tails[j].0
                            )))
                        }
                    },
                }
            }
        }
        if changed {
            continue;
        }

        // Absorb points into tails; extend tails downward over adjacent
        // points.
        'points: for pi in 0..points.len() {
            for t in tails.iter_mut() {
                let s = reg.get(&t.0)?;
                if s.index_of(&points[pi], t.1).is_some() {
                    points.remove(pi);
                    changed = true;
                    break 'points;
                }
                if t.1 > s.domain_start() && s.eval(t.1 - 1) == points[pi] {
                    t.1 -= 1;
                    points.remove(pi);
                    changed = true;
                    break 'points;
                }
            }
        }
        if changed {
            continue;
        }

        // Interval sweep: merge intervals and points (points as degenerate
        // closed intervals).
        let mut sweep: Vec<Interval> = intervals.clone();
        sweep.extend(points.iter().map(|q| Interval::closed(q.clone(), q.clone())));
        sweep.sort_by(|x, y| {
            x.lo.cmp(&y.lo).then_with(|| y.lo_closed.cmp(&x.lo_closed))
        });
        let mut merged: Vec<Interval> = Vec::new();
        for iv in sweep {
            match merged.last_mut() {
                None => merged.push(iv),
                Some(cur) => {
                    let touches = match iv.lo.cmp(&cur.hi) {
                        Ordering::Less => true,
                        Ordering::Equal => cur.hi_closed || iv.lo_closed,
                        Ordering::Greater => false,
                    };
                    if touches {
                        // Extend the end if iv reaches further.
                        match iv.hi.cmp(&cur.hi) {
                            Ordering::Greater => {
                                cur.hi = iv.hi;
                                cur.hi_closed = iv.hi_closed;
                            }
                            Ordering::Equal => cur.hi_closed |= iv.hi_closed,
                            Ordering::Less => {}
                        }
                    } else {
                        merged.push(iv);
                    }
                }
            }
        }
        let new_points: Vec<Q> = merged
            .iter()
            .filter(|iv| iv.is_degenerate_point())
            .map(|iv| iv.lo.clone())
            .collect();
        let new_intervals: Vec<Interval> =
            merged.into_iter().filter(|iv| !iv.is_degenerate_point()).collect();
        if new_points != points || new_intervals != intervals {
            // Re-run earlier passes only if the merge changed something
            // beyond ordering.
            let points_changed = {
                let mut a = new_points.clone();
                let mut b = points.clone();
                a.sort();
                b.sort();
                a != b
            };
            points = new_points;
            intervals = new_intervals;
            if points_changed {
                continue;
            }
        }

        // Absorb tail portions covered by intervals.
        let mut rewrote_tail = false;
        'tails: for ti in 0..tails.len() {
            let (seq_id, start) = tails[ti].clone();
            let s = reg.get(&seq_id)?;
            for iv in &intervals {
                let (lo, hi) = interval_bounds(iv);
                match tail_window(s, start, lo, hi) {
                    IndexWindow::Empty => {}
                    IndexWindow::From(k0) => {
                        // Everything from k0 is inside the interval.
                        if k0 - start >= MATERIALIZE_CAP {
                            return Err(Error::UnsupportedCombination(
                                "tail/interval normalization exceeds the materialization cap".into(),
                            ));
                        }
                        for k in start..k0 {
                            points.push(s.eval(k));
                        }
                        tails.swap_remove(ti);
                        rewrote_tail = true;
                        break 'tails;
                    }
                    IndexWindow::Range(k1, k2) => {
                        if k2 - start >= MATERIALIZE_CAP {
                            return Err(Error::UnsupportedCombination(
                                "tail/interval normalization exceeds the materialization cap".into(),
                            ));
                        }
                        for k in start..k1 {
                            points.push(s.eval(k));
                        }
                        tails[ti] = (seq_id.clone(), k2 + 1);
                        rewrote_tail = true;
                        break 'tails;
                    }
                }
            }
        }
        if rewrote_tail {
            continue;
        }

        break;
    }

    // Assemble in canonical order.
    let mut numeric: Vec<(PositionKey, SetPrimitive)> = Vec::new();
    for q in points {
        numeric.push((PositionKey { value: q.clone(), attained: true, rank: 0 }, SetPrimitive::Point(q)));
    }
    for iv in intervals {
        numeric.push((
            PositionKey { value: iv.lo.clone(), attained: iv.lo_closed, rank: 1 },
            SetPrimitive::Interval(iv),
        ));
    }
    for (seq_id, start) in tails {
        let s = reg.get(&seq_id)?;
        let key = match s.monotonicity() {
            Monotonicity::Increasing => {
                PositionKey { value: s.eval(start), attained: true, rank: 2 }
            }
            Monotonicity::Decreasing => match s.limit() {
                crate::seq::LimitValue::Finite(l) => {
                    PositionKey { value: l.clone(), attained: false, rank: 2 }
                }
                _ => {
                    return Err(Error::UnsupportedCombination(
                        "tail unbounded below cannot be ordered".into(),
                    ))
                }
            },
        };
        numeric.push((key, SetPrimitive::Tail { seq: seq_id, start }));
    }
    numeric.sort_by(|(ka, _), (kb, _)| ka.cmp(kb));

    Ok(SymbolicSet {
        atoms,
        numeric: numeric.into_iter().map(|(_, p)| p).collect(),
    })
}

#[derive(Clone, PartialEq, Eq, Debug)]
struct PositionKey {
    value: Q,
    attained: bool,
    rank: u8,
}

impl PartialOrd for PositionKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PositionKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value
            .cmp(&other.value)
            .then_with(|| other.attained.cmp(&self.attained))
            .then_with(|| self.rank.cmp(&other.rank))
    }
}

// ---------------------------------------------------------------------------
// Serialization and parsing

/// Raw, unvalidated set description used for (de)serialization. Resolve
/// against a registry to obtain a normalized [`SymbolicSet`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SetExpr {
    pub prims: Vec<PrimExpr>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PrimExpr {
    Atom { label: String },
    Point { value: Q },
    Interval { lo: Q, hi: Q, lo_closed: bool, hi_closed: bool },
    Tail { seq: String, start: i64 },
}

impl PrimExpr {
    fn from_prim(p: SetPrimitive) -> Self {
        match p {
            SetPrimitive::Atom(label) => PrimExpr::Atom { label },
            SetPrimitive::Point(value) => PrimExpr::Point { value },
            SetPrimitive::Interval(iv) => PrimExpr::Interval {
                lo: iv.lo,
                hi: iv.hi,
                lo_closed: iv.lo_closed,
                hi_closed: iv.hi_closed,
            },
            SetPrimitive::Tail { seq, start } => PrimExpr::Tail { seq, start },
        }
    }

    fn into_prim(self) -> Result<SetPrimitive> {
        Ok(match self {
            PrimExpr::Atom { label } => SetPrimitive::Atom(label),
            PrimExpr::Point { value } => SetPrimitive::Point(value),
            PrimExpr::Interval { lo, hi, lo_closed, hi_closed } => {
                SetPrimitive::Interval(Interval::new(lo, hi, lo_closed, hi_closed)?)
            }
            PrimExpr::Tail { seq, start } => SetPrimitive::Tail { seq, start },
        })
    }
}

impl SetExpr {
    pub fn resolve(self, reg: &SeqRegistry) -> Result<SymbolicSet> {
        let prims = self
            .prims
            .into_iter()
            .map(PrimExpr::into_prim)
            .collect::<Result<Vec<_>>>()?;
        SymbolicSet::from_prims(prims, reg)
    }
}

impl Serialize for SymbolicSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_expr().serialize(serializer)
    }
}

impl fmt::Display for SetPrimitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetPrimitive::Atom(s) => f.write_str(s),
            SetPrimitive::Point(q) => write!(f, "{q}"),
            SetPrimitive::Interval(iv) => write!(
                f,
                "{}{}, {}{}",
                if iv.lo_closed { "[" } else { "(" },
                iv.lo,
                iv.hi,
                if iv.hi_closed { "]" } else { ")" },
            ),
            SetPrimitive::Tail { seq, start } => write!(f, "tail({seq}, {start})"),
        }
    }
}

impl fmt::Display for SymbolicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("∅");
        }
        let mut parts: Vec<String> = Vec::new();
        // Atoms and points render together as one brace list; intervals and
        // tails as their own pieces, in canonical order.
        let mut braced: Vec<String> = self.atoms.clone();
        let mut rest: Vec<String> = Vec::new();
        for p in &self.numeric {
            match p {
                SetPrimitive::Point(q) => braced.push(q.to_string()),
                SetPrimitive::Interval(_) | SetPrimitive::Tail { .. } => rest.push(p.to_string()),
                SetPrimitive::Atom(_) => unreachable!(),
            }
        }
        if !braced.is_empty() {
            parts.push(format!("{{{}}}", braced.join(", ")));
        }
        parts.extend(rest);
        f.write_str(&parts.join(" ∪ "))
    }
}

/// Parses the textual set syntax used on the command line and in display
/// output: `∅`, `{Left, 1/2}`, `(0, 1]`, `tail(even, 3)`, joined by `∪`
/// (or `+`). Example: `{Left} ∪ (0, 1/2] ∪ tail(even, 1)`.
pub fn parse_set(input: &str, reg: &SeqRegistry) -> Result<SymbolicSet> {
    let input = input.trim();
    if input.is_empty() || input == "∅" || input == "{}" || input.eq_ignore_ascii_case("empty") {
        return Ok(SymbolicSet::empty());
    }
    let mut prims = Vec::new();
    for piece in split_union(input) {
        let piece = piece.trim();
        if piece.is_empty() {
            return Err(Error::MalformedSet(format!("empty term in `{input}`")));
        }
        if piece == "∅" {
            continue;
        }
        if let Some(rest) = piece.strip_prefix("tail") {
            let inner = rest
                .trim()
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| Error::MalformedSet(format!("bad tail syntax `{piece}`")))?;
            let (seq, start) = inner
                .split_once(',')
                .ok_or_else(|| Error::MalformedSet(format!("bad tail syntax `{piece}`")))?;
            let start: i64 = start
                .trim()
                .parse()
                .map_err(|_| Error::MalformedSet(format!("bad tail index in `{piece}`")))?;
            prims.push(SetPrimitive::tail(seq.trim(), start));
            continue;
        }
        if let Some(inner) = piece.strip_prefix('{').and_then(|s| s.strip_suffix('}')) {
            for item in inner.split(',') {
                let item = item.trim();
                if item.is_empty() {
                    return Err(Error::MalformedSet(format!("empty element in `{piece}`")));
                }
                match item.parse::<Q>() {
                    Ok(q) => prims.push(SetPrimitive::point(q)),
                    Err(_) => prims.push(SetPrimitive::atom(item)),
                }
            }
            continue;
        }
        let lo_closed = match piece.chars().next() {
            Some('[') => true,
            Some('(') => false,
            _ => {
                return Err(Error::MalformedSet(format!("cannot parse set term `{piece}`")));
            }
        };
        let hi_closed = match piece.chars().last() {
            Some(']') => true,
            Some(')') => false,
            _ => {
                return Err(Error::MalformedSet(format!("cannot parse set term `{piece}`")));
            }
        };
        let inner = &piece[1..piece.len() - 1];
        let (lo, hi) = inner
            .split_once(',')
            .ok_or_else(|| Error::MalformedSet(format!("bad interval `{piece}`")))?;
        prims.push(SetPrimitive::interval(lo.trim().parse()?, hi.trim().parse()?, lo_closed, hi_closed)?);
    }
    SymbolicSet::from_prims(prims, reg)
}

/// Splits on top-level `∪` or `+` (not inside brackets or braces).
fn split_union(input: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in input.chars() {
        match ch {
            '{' | '(' | '[' => {
                depth += 1;
                cur.push(ch);
            }
            '}' | ')' | ']' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
            }
            '∪' | '+' if depth == 0 => {
                parts.push(std::mem::take(&mut cur));
            }
            _ => cur.push(ch),
        }
    }
    parts.push(cur);
    parts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::standard_registry;

    fn reg() -> SeqRegistry {
        standard_registry()
    }

    fn set(s: &str) -> SymbolicSet {
        parse_set(s, &reg()).unwrap()
    }

    #[test]
    fn tail_membership() {
        let r = reg();
        let t = set("tail(even, 0)");
        assert!(t.contains(&ValueRef::Num(Q::ratio(4, 5)), &r).unwrap());
        assert!(!t.contains(&ValueRef::Num(Q::ratio(1, 2)), &r).unwrap());
        assert!(!t.contains(&ValueRef::Num(Q::one()), &r).unwrap());
        assert!(t.contains(&ValueRef::SeqIndex("even".into(), 7), &r).unwrap());
    }

    #[test]
    fn point_absorbed_by_tail() {
        let a = set("tail(even, 1) ∪ {4/5}");
        assert_eq!(a, set("tail(even, 1)"));
    }

    #[test]
    fn point_extends_tail_downward() {
        // 0 = even(0), so {0} ∪ tail(even, 1) is extensionally tail(even, 0).
        let a = set("{0} ∪ tail(even, 1)");
        assert_eq!(a, set("tail(even, 0)"));
    }

    #[test]
    fn interval_point_merge() {
        let a = set("[0, 1) ∪ {1}");
        assert_eq!(a, set("[0, 1]"));
        let b = set("(0, 1) ∪ (1, 2)");
        assert_eq!(b.numeric_prims().len(), 2);
        let c = set("(0, 1) ∪ {1} ∪ (1, 2)");
        assert_eq!(c, set("(0, 2)"));
    }

    #[test]
    fn tail_inside_interval_absorbed() {
        let a = set("[0, 1] ∪ tail(even, 0)");
        assert_eq!(a, set("[0, 1]"));
        // Partial coverage: members below the interval survive as points.
        let b = set("[3/4, 1] ∪ tail(even, 0)");
        // even values: 0, 2/3 outside; 4/5, 6/7, ... inside.
        assert_eq!(b, set("{0, 2/3} ∪ [3/4, 1]"));
    }

    #[test]
    fn difference_open_interval() {
        let r = reg();
        let full = set("(0, 1)");
        let upper = set("(1/2, 1)");
        let rest = full.difference(&upper, &r).unwrap();
        assert_eq!(rest, set("(0, 1/2]"));
    }

    #[test]
    fn intersect_interval_tail() {
        let r = reg();
        let unit = set("[0, 1]");
        let t = set("tail(even, 0)");
        assert_eq!(unit.intersect(&t, &r).unwrap(), t);
        let upper = set("(2/3, 1)");
        let inter = upper.intersect(&t, &r).unwrap();
        assert_eq!(inter, set("tail(even, 2)"));
    }

    #[test]
    fn subtract_point_splits_interval() {
        let r = reg();
        let unit = set("[0, 1]");
        let cut = unit.difference(&set("{1/2}"), &r).unwrap();
        assert_eq!(cut, set("[0, 1/2) ∪ (1/2, 1]"));
    }

    #[test]
    fn subtract_tail_from_interval_is_unsupported() {
        let r = reg();
        let unit = set("[0, 1]");
        let t = set("tail(even, 0)");
        match unit.difference(&t, &r) {
            Err(Error::UnsupportedCombination(_)) => {}
            other => panic!("expected unsupported, got {other:?}"),
        }
    }

    #[test]
    fn tail_difference_same_family() {
        let r = reg();
        let t0 = set("tail(even, 0)");
        let t2 = set("tail(even, 2)");
        let d = t0.difference(&t2, &r).unwrap();
        assert_eq!(d, set("{0, 2/3}"));
        assert!(t2.difference(&t0, &r).unwrap().is_empty());
    }

    #[test]
    fn compare_examples() {
        let r = reg();
        let one = set("{1}");
        let t = set("tail(even, 0)");
        let cmp = one.compare(&t, &r).unwrap();
        assert_eq!(cmp.relation, SetRelation::Incomparable);
        assert!(!cmp.left_empty && !cmp.right_empty);

        let sub = set("tail(even, 3)").compare(&t, &r).unwrap();
        assert_eq!(sub.relation, SetRelation::Subset);

        let eq = set("{0} ∪ tail(even, 1)").compare(&set("tail(even, 0)"), &r).unwrap();
        assert_eq!(eq.relation, SetRelation::Equal);

        let within = set("(1/4, 1/2)").compare(&set("(0, 1)"), &r).unwrap();
        assert_eq!(within.relation, SetRelation::Subset);
    }

    #[test]
    fn union_with_one_point() {
        let r = reg();
        let t = set("tail(odd, 0) ∪ {1}");
        assert!(t.contains(&ValueRef::Num(Q::one()), &r).unwrap());
        assert!(t.contains(&ValueRef::Num(Q::ratio(1, 2)), &r).unwrap());
        assert!(!t.contains(&ValueRef::Num(Q::ratio(2, 3)), &r).unwrap());
        assert_eq!(t.numeric_prims().len(), 2);
    }

    #[test]
    fn numeric_bounds() {
        let r = reg();
        let t = set("tail(even, 0) ∪ {1}");
        let (inf, inf_att) = t.numeric_inf(&r).unwrap().unwrap();
        assert_eq!(inf, Q::zero());
        assert!(inf_att);
        let (sup, sup_att) = t.numeric_sup(&r).unwrap().unwrap();
        assert_eq!(sup, Q::one());
        assert!(sup_att);

        let open = set("(0, 1)");
        let (olo, olo_att) = open.numeric_inf(&r).unwrap().unwrap();
        assert_eq!(olo, Q::zero());
        assert!(!olo_att);
        assert!(open.all_numeric_gt(&Q::zero(), &r).unwrap());
        assert!(!t.all_numeric_gt(&Q::zero(), &r).unwrap());
    }

    #[test]
    fn numeric_above_filters() {
        let r = reg();
        let t = set("tail(even, 0) ∪ {1}");
        let above = t.numeric_above(&Q::ratio(2, 3), true, &r).unwrap();
        assert_eq!(above, set("tail(even, 2) ∪ {1}"));
        let above_half = t.numeric_above(&Q::ratio(1, 2), false, &r).unwrap();
        assert_eq!(above_half, set("tail(even, 1) ∪ {1}"));
    }

    #[test]
    fn decreasing_tail_operations() {
        let mut r = reg();
        r.register(
            RationalSequence::new(
                "down",
                (1, 2, 1, 1),
                0,
                Monotonicity::Decreasing,
                crate::seq::LimitValue::Finite(Q::one()),
            )
            .unwrap(),
        )
        .unwrap();
        // Values 2, 3/2, 4/3, 5/4, ... -> 1.
        let t = SymbolicSet::from_prims(vec![SetPrimitive::tail("down", 0)], &r).unwrap();
        assert!(t.contains(&ValueRef::Num(Q::ratio(3, 2)), &r).unwrap());
        let below = t.numeric_below(&Q::ratio(4, 3), false, &r).unwrap();
        assert_eq!(below, SymbolicSet::from_prims(vec![SetPrimitive::tail("down", 2)], &r).unwrap());
        let above = t.numeric_above(&Q::ratio(4, 3), true, &r).unwrap();
        assert_eq!(
            above,
            SymbolicSet::from_prims(
                vec![SetPrimitive::point(Q::from_int(2)), SetPrimitive::point(Q::ratio(3, 2))],
                &r
            )
            .unwrap()
        );
        let (inf, att) = t.numeric_inf(&r).unwrap().unwrap();
        assert_eq!(inf, Q::one());
        assert!(!att);
    }

    #[test]
    fn serialization_round_trip() {
        let r = reg();
        let s = set("{Left, Right} ∪ (0, 1/2] ∪ tail(even, 1) ∪ {1}");
        let js = serde_json::to_string(&s).unwrap();
        let expr: SetExpr = serde_json::from_str(&js).unwrap();
        let back = expr.resolve(&r).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn display_round_trip() {
        let s = set("{Left} ∪ (0, 1/2] ∪ tail(even, 1)");
        let shown = s.to_string();
        let back = parse_set(&shown, &reg()).unwrap();
        assert_eq!(back, s);
        assert_eq!(set("∅").to_string(), "∅");
    }

    #[test]
    fn enumerate_finite_sets() {
        let s = set("{Right, Left, 1/2, 0}");
        let vals = s.enumerate_values().unwrap();
        assert_eq!(
            vals,
            vec![
                Value::label("Left"),
                Value::label("Right"),
                Value::Num(Q::zero()),
                Value::Num(Q::ratio(1, 2)),
            ]
        );
        assert!(set("tail(even, 0)").enumerate_values().is_none());
        assert!(set("(0, 1)").enumerate_values().is_none());
    }

    #[test]
    fn shifted_tail_descriptions_are_equal() {
        let mut r = reg();
        r.register(
            RationalSequence::new(
                "even5",
                (2, 10, 2, 11),
                0,
                Monotonicity::Increasing,
                crate::seq::LimitValue::Finite(Q::one()),
            )
            .unwrap(),
        )
        .unwrap();
        let a = SymbolicSet::from_prims(vec![SetPrimitive::tail("even", 5)], &r).unwrap();
        let b = SymbolicSet::from_prims(vec![SetPrimitive::tail("even5", 0)], &r).unwrap();
        assert_eq!(a.compare(&b, &r).unwrap().relation, SetRelation::Equal);
        // Union merges them into one primitive.
        let u = a.union(&b, &r).unwrap();
        assert_eq!(u.numeric_prims().len(), 1);
    }

    #[test]
    fn malformed_inputs_error() {
        let r = reg();
        assert!(parse_set("tail(unknown, 0)", &r).is_err());
        assert!(parse_set("(1, 0)", &r).is_err());
        assert!(parse_set("(1/2, 1/2)", &r).is_err());
        assert!(SymbolicSet::from_prims(vec![SetPrimitive::tail("even", -1)], &r).is_err());
    }
}
