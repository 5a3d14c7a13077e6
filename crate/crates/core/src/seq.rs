//! Affine-rational strategy sequences.
//!
//! A [`RationalSequence`] maps an integer index `k` to `(a*k + b) / (c*k + d)`.
//! Registered sequences must be strictly monotone on their domain and carry a
//! declared limit, both of which are checked symbolically from the
//! coefficients at registration time. Symbolic sets refer to sequences by id
//! through a [`SeqRegistry`], so every set operation can decide membership
//! and overlap questions exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Q;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

/// Limit of a sequence as the index grows without bound.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LimitValue {
    Finite(Q),
    PosInfinity,
    NegInfinity,
}

impl fmt::Display for LimitValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitValue::Finite(q) => write!(f, "{q}"),
            LimitValue::PosInfinity => f.write_str("+inf"),
            LimitValue::NegInfinity => f.write_str("-inf"),
        }
    }
}

/// `k -> (a*k + b) / (c*k + d)` for integer `k >= domain_start`.
///
/// Invariants enforced by [`RationalSequence::new`]:
/// - the denominator is positive for every `k >= domain_start` (coefficients
///   are sign-normalized so `c >= 0`),
/// - `a*d - b*c != 0`, hence the sequence is strictly monotone, with the
///   direction matching the declared monotonicity,
/// - the declared limit equals `a/c` (or a signed infinity when `c = 0`).
#[derive(Clone, Debug)]
pub struct RationalSequence {
    id: String,
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
    domain_start: i64,
    monotonicity: Monotonicity,
    limit: LimitValue,
}

impl RationalSequence {
    pub fn new(
        id: impl Into<String>,
        coeffs: (i64, i64, i64, i64),
        domain_start: i64,
        monotonicity: Monotonicity,
        limit: LimitValue,
    ) -> Result<Self> {
        let (a, b, c, d) = coeffs;
        Self::from_bigints(
            id,
            (BigInt::from(a), BigInt::from(b), BigInt::from(c), BigInt::from(d)),
            domain_start,
            monotonicity,
            limit,
        )
    }

    pub fn from_bigints(
        id: impl Into<String>,
        coeffs: (BigInt, BigInt, BigInt, BigInt),
        domain_start: i64,
        monotonicity: Monotonicity,
        limit: LimitValue,
    ) -> Result<Self> {
        let id = id.into();
        let (mut a, mut b, mut c, mut d) = coeffs;
        let err = |detail: &str| Error::InvalidSequence { id: id.clone(), detail: detail.into() };

        // Sign-normalize so the denominator coefficient side is canonical:
        // negating all four coefficients does not change any value.
        if c.is_negative() || (c.is_zero() && d.is_negative()) {
            a = -a;
            b = -b;
            c = -c;
            d = -d;
        }
        if c.is_zero() && d.is_zero() {
            return Err(err("zero denominator"));
        }
        // Positive denominator on the whole domain; with c >= 0 it suffices
        // to check the first index.
        let den0 = &c * BigInt::from(domain_start) + &d;
        if !den0.is_positive() {
            return Err(err("denominator must be positive for all k >= domain_start"));
        }

        let det = &a * &d - &b * &c;
        if det.is_zero() {
            return Err(err("constant sequence (a*d - b*c = 0) is not allowed"));
        }
        let actual_mono = if det.is_positive() {
            Monotonicity::Increasing
        } else {
            Monotonicity::Decreasing
        };
        if actual_mono != monotonicity {
            return Err(err("declared monotonicity does not match coefficients"));
        }

        let actual_limit = if c.is_zero() {
            if a.is_positive() {
                LimitValue::PosInfinity
            } else {
                LimitValue::NegInfinity
            }
        } else {
            LimitValue::Finite(Q::new(a.clone(), c.clone())?)
        };
        if actual_limit != limit {
            return Err(err("declared limit does not match coefficients"));
        }

        Ok(RationalSequence { id, a, b, c, d, domain_start, monotonicity, limit })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn domain_start(&self) -> i64 {
        self.domain_start
    }

    pub fn monotonicity(&self) -> Monotonicity {
        self.monotonicity
    }

    pub fn limit(&self) -> &LimitValue {
        &self.limit
    }

    pub fn coeffs(&self) -> (&BigInt, &BigInt, &BigInt, &BigInt) {
        (&self.a, &self.b, &self.c, &self.d)
    }

    pub fn eval(&self, k: i64) -> Q {
        debug_assert!(k >= self.domain_start, "index {k} before domain of `{}`", self.id);
        let kk = BigInt::from(k);
        let num = &self.a * &kk + &self.b;
        let den = &self.c * &kk + &self.d;
        Q::new(num, den).expect("positive denominator on domain")
    }

    /// The unique integer `k` (unconstrained by the domain) with
    /// `eval(k) = q`, if any. Strict monotonicity makes it unique.
    fn solve_value(&self, q: &Q) -> Option<i64> {
        // (a*k + b) / (c*k + d) = n/m  =>  k * (a*m - n*c) = n*d - b*m.
        let (n, m) = q.as_ratio();
        let coeff = &self.a * m - n * &self.c;
        let rhs = n * &self.d - &self.b * m;
        if coeff.is_zero() {
            // Would require the sequence to be constant at q; excluded.
            return None;
        }
        let (quot, rem) = rhs.div_rem(&coeff);
        if !rem.is_zero() {
            return None;
        }
        i64::try_from(quot).ok()
    }

    /// Index `k >= lo` with `eval(k) = q`, if any.
    pub fn index_of(&self, q: &Q, lo: i64) -> Option<i64> {
        let k = self.solve_value(q)?;
        (k >= lo.max(self.domain_start)).then_some(k)
    }

    /// Canonical description of the value stream starting at `start`:
    /// shifted coefficients reduced by their gcd. Two tails denote the same
    /// value set iff their keys are equal, regardless of which registered
    /// sequence they were built from.
    pub fn canonical_key(&self, start: i64) -> (BigInt, BigInt, BigInt, BigInt) {
        let s = BigInt::from(start);
        let a = self.a.clone();
        let b = &self.a * &s + &self.b;
        let c = self.c.clone();
        let d = &self.c * &s + &self.d;
        let mut g = a.gcd(&b).gcd(&c).gcd(&d);
        if g.is_zero() {
            g = BigInt::from(1);
        }
        (a / &g, b / &g, c / &g, d / &g)
    }

    /// Smallest in-domain index `k >= lo` whose value satisfies the bound
    /// predicate "eval(k) > v" (strict) or "eval(k) >= v". `None` when no
    /// index qualifies. Only meaningful questions produce finite answers
    /// because the sequence is strictly monotone.
    pub fn first_index_above(&self, v: &Q, strict: bool, lo: i64) -> Option<i64> {
        let lo = lo.max(self.domain_start);
        match self.monotonicity {
            Monotonicity::Increasing => {
                // Values climb toward the limit; find the threshold index.
                if !above_limit_possible(&self.limit, v, strict) {
                    return None;
                }
                let k = self.threshold_index(v, lo);
                let mut k = k.max(lo);
                // Local fixup: land on the first qualifying index.
                while !cmp_ok(&self.eval(k), v, strict) {
                    k += 1;
                }
                while k > lo && cmp_ok(&self.eval(k - 1), v, strict) {
                    k -= 1;
                }
                Some(k)
            }
            Monotonicity::Decreasing => {
                // Values descend; qualifying indices form a prefix, so the
                // first qualifying index is `lo` itself if any.
                cmp_ok(&self.eval(lo), v, strict).then_some(lo)
            }
        }
    }

    /// Largest index `k >= lo` with eval(k) < v (strict) or <= v, given the
    /// qualifying indices form a prefix (increasing sequences). `None` when
    /// no index qualifies; `Some(None)` cannot occur here because increasing
    /// sequences below their limit qualify only finitely often unless the
    /// bound clears the limit, which callers must handle via
    /// [`eventually_below`].
    pub fn last_index_below(&self, v: &Q, strict: bool, lo: i64) -> Option<i64> {
        debug_assert_eq!(self.monotonicity, Monotonicity::Increasing);
        let lo = lo.max(self.domain_start);
        if !cmp_ok_below(&self.eval(lo), v, strict) {
            return None;
        }
        debug_assert!(
            !self.eventually_below(v, strict),
            "no last index: all indices qualify"
        );
        let mut k = self.threshold_index(v, lo).max(lo);
        while cmp_ok_below(&self.eval(k + 1), v, strict) {
            k += 1;
        }
        while k > lo && !cmp_ok_below(&self.eval(k), v, strict) {
            k -= 1;
        }
        Some(k)
    }

    /// First index `k >= lo` with eval(k) < v (strict) or <= v, for
    /// decreasing sequences, where qualifying indices form a suffix.
    pub fn first_index_below(&self, v: &Q, strict: bool, lo: i64) -> Option<i64> {
        debug_assert_eq!(self.monotonicity, Monotonicity::Decreasing);
        let lo = lo.max(self.domain_start);
        if !self.eventually_below(v, strict) {
            return None;
        }
        let mut k = self.threshold_index(v, lo).max(lo);
        while !cmp_ok_below(&self.eval(k), v, strict) {
            k += 1;
        }
        while k > lo && cmp_ok_below(&self.eval(k - 1), v, strict) {
            k -= 1;
        }
        Some(k)
    }

    /// Last index `k >= lo` with eval(k) > v (strict) or >= v, for decreasing
    /// sequences, where qualifying indices form a prefix. Callers must first
    /// rule out the all-indices case via [`eventually_above`].
    ///
    /// [`eventually_above`]: RationalSequence::eventually_above
    pub fn last_index_above(&self, v: &Q, strict: bool, lo: i64) -> Option<i64> {
        debug_assert_eq!(self.monotonicity, Monotonicity::Decreasing);
        let lo = lo.max(self.domain_start);
        if !cmp_ok(&self.eval(lo), v, strict) {
            return None;
        }
        debug_assert!(!self.eventually_above(v, strict), "no last index: all indices qualify");
        let mut k = self.threshold_index(v, lo).max(lo);
        while cmp_ok(&self.eval(k + 1), v, strict) {
            k += 1;
        }
        while k > lo && !cmp_ok(&self.eval(k), v, strict) {
            k -= 1;
        }
        Some(k)
    }

    /// Whether eval(k) < v (strict) or <= v holds for all sufficiently large k.
    pub fn eventually_below(&self, v: &Q, strict: bool) -> bool {
        match (&self.limit, self.monotonicity) {
            // Values stay strictly below the limit, so l <= v suffices
            // for either bound.
            (LimitValue::Finite(l), Monotonicity::Increasing) => l <= v,
            // Values stay strictly above the limit.
            (LimitValue::Finite(l), Monotonicity::Decreasing) => l < v || (!strict && l == v),
            (LimitValue::PosInfinity, _) => false,
            (LimitValue::NegInfinity, _) => true,
        }
    }

    /// Whether eval(k) > v (strict) or >= v holds for all sufficiently large k.
    pub fn eventually_above(&self, v: &Q, strict: bool) -> bool {
        match (&self.limit, self.monotonicity) {
            (LimitValue::Finite(l), Monotonicity::Increasing) => l > v || (!strict && l == v),
            (LimitValue::Finite(l), Monotonicity::Decreasing) => l >= v,
            (LimitValue::PosInfinity, _) => true,
            (LimitValue::NegInfinity, _) => false,
        }
    }

    /// Rational solution index of eval(k) = v rounded toward an integer
    /// starting point for the fixup loops above. Falls back to `lo` when the
    /// boundary is not crossed.
    fn threshold_index(&self, v: &Q, lo: i64) -> i64 {
        let (n, m) = v.as_ratio();
        let coeff = &self.a * m - n * &self.c;
        let rhs = n * &self.d - &self.b * m;
        if coeff.is_zero() {
            return lo;
        }
        let (quot, _) = rhs.div_rem(&coeff);
        i64::try_from(quot).unwrap_or(lo)
    }
}

fn cmp_ok(x: &Q, v: &Q, strict: bool) -> bool {
    if strict {
        x > v
    } else {
        x >= v
    }
}

fn cmp_ok_below(x: &Q, v: &Q, strict: bool) -> bool {
    if strict {
        x < v
    } else {
        x <= v
    }
}

fn above_limit_possible(limit: &LimitValue, v: &Q, _strict: bool) -> bool {
    match limit {
        // Increasing toward l, never attaining it: some value exceeds v iff
        // v < l (strict or not, since values get arbitrarily close to l).
        LimitValue::Finite(l) => v < l,
        LimitValue::PosInfinity => true,
        // Increasing sequences cannot have limit -inf.
        LimitValue::NegInfinity => unreachable!("increasing sequence with limit -inf"),
    }
}

/// Result of intersecting the value sets of two tails over distinct
/// sequence families.
#[derive(Debug)]
pub enum FamilyOverlap {
    Empty,
    /// Index pairs `(k, j)` with `s1.eval(k) = s2.eval(j)`, both in range.
    Finite(Vec<(i64, i64)>),
    /// Infinitely many shared values (an arithmetic-progression subfamily):
    /// not representable with the available primitives.
    Unsupported,
}

/// Exact solver for `s1(k) = s2(j)`, `k >= m1`, `j >= m2`.
///
/// Cross-multiplying gives the bilinear Diophantine equation
/// `A*k*j + B*k + C*j + D = 0`. When `A != 0` it factors as
/// `(A*k + C)(A*j + B) = C*B - A*D`, solved by divisor enumeration; when
/// `A = 0` it is linear and solved by gcd reasoning.
pub fn family_overlap(
    s1: &RationalSequence,
    m1: i64,
    s2: &RationalSequence,
    m2: i64,
) -> Result<FamilyOverlap> {
    let m1 = m1.max(s1.domain_start);
    let m2 = m2.max(s2.domain_start);
    let (a1, b1, c1, d1) = s1.coeffs();
    let (a2, b2, c2, d2) = s2.coeffs();
    let coef_a = a1 * c2 - a2 * c1;
    let coef_b = a1 * d2 - b2 * c1;
    let coef_c = b1 * c2 - a2 * d1;
    let coef_d = b1 * d2 - b2 * d1;

    let mut hits: Vec<(i64, i64)> = Vec::new();
    let mut push_verified = |k: i64, j: i64| {
        if k >= m1 && j >= m2 && s1.eval(k) == s2.eval(j) {
            hits.push((k, j));
        }
    };

    if !coef_a.is_zero() {
        let n = &coef_c * &coef_b - &coef_a * &coef_d;
        if n.is_zero() {
            // (A*k + C)(A*j + B) = 0: an in-range integer root on either
            // line would force one sequence to be constant, which the
            // registry rejects; hence no shared values.
            return Ok(FamilyOverlap::Empty);
        }
        // Finitely many factorizations p*q = n with A*k = p - C, A*j = q - B.
        let mut divisors = Vec::new();
        let n_abs = n.abs();
        let mut i = BigInt::from(1);
        let limit = 2_000_000i64;
        let mut count = 0i64;
        while &i * &i <= n_abs {
            count += 1;
            if count > limit {
                return Ok(FamilyOverlap::Unsupported);
            }
            if n_abs.is_multiple_of(&i) {
                divisors.push(i.clone());
                divisors.push(&n_abs / &i);
            }
            i += 1;
        }
        for p_abs in divisors {
            let q_abs = &n_abs / &p_abs;
            for (p, q) in [
                (p_abs.clone(), q_abs.clone()),
                (-p_abs.clone(), -q_abs.clone()),
            ] {
                if &p * &q != n {
                    continue;
                }
                let (kq, kr) = (&p - &coef_c).div_rem(&coef_a);
                let (jq, jr) = (&q - &coef_b).div_rem(&coef_a);
                if kr.is_zero() && jr.is_zero() {
                    if let (Ok(k), Ok(j)) = (i64::try_from(kq), i64::try_from(jq)) {
                        push_verified(k, j);
                    }
                }
            }
        }
        hits.sort_unstable();
        hits.dedup();
        return Ok(if hits.is_empty() { FamilyOverlap::Empty } else { FamilyOverlap::Finite(hits) });
    }

    // Linear: B*k + C*j + D = 0.
    match (coef_b.is_zero(), coef_c.is_zero()) {
        (true, true) => Ok(FamilyOverlap::Empty),
        (true, false) => {
            let (jq, jr) = (-&coef_d).div_rem(&coef_c);
            if jr.is_zero() {
                if let Ok(j) = i64::try_from(jq) {
                    if j >= m2 {
                        if let Some(k) = s1.index_of(&s2.eval(j), m1) {
                            push_verified(k, j);
                        }
                    }
                }
            }
            Ok(if hits.is_empty() { FamilyOverlap::Empty } else { FamilyOverlap::Finite(hits) })
        }
        (false, true) => {
            let (kq, kr) = (-&coef_d).div_rem(&coef_b);
            if kr.is_zero() {
                if let Ok(k) = i64::try_from(kq) {
                    if k >= m1 {
                        if let Some(j) = s2.index_of(&s1.eval(k), m2) {
                            push_verified(k, j);
                        }
                    }
                }
            }
            Ok(if hits.is_empty() { FamilyOverlap::Empty } else { FamilyOverlap::Finite(hits) })
        }
        (false, false) => {
            let g = coef_b.gcd(&coef_c);
            if !coef_d.is_multiple_of(&g) {
                return Ok(FamilyOverlap::Empty);
            }
            if (&coef_b * &coef_c).is_negative() {
                // k and j grow together along the solution line: infinitely
                // many shared values.
                return Ok(FamilyOverlap::Unsupported);
            }
            // k and j move in opposite directions: finitely many in-range
            // solutions. Walk k over the feasible window.
            // B*k + C*j = -D with sign(B) = sign(C): j decreases as k grows.
            let step_k = (&coef_c / &g).abs();
            let step = i64::try_from(step_k).map_err(|_| {
                Error::UnsupportedCombination("overlap solver: stride too large".into())
            })?;
            let step = step.max(1);
            // Find the smallest k >= m1 with an integer j, then walk down in j.
            let mut found_any = false;
            let mut k = m1;
            let cap = 4_000_000i64;
            let mut scanned = 0i64;
            loop {
                scanned += 1;
                if scanned > cap {
                    return Ok(FamilyOverlap::Unsupported);
                }
                let num = -&coef_d - &coef_b * BigInt::from(k);
                let (jq, jr) = num.div_rem(&coef_c);
                if jr.is_zero() {
                    found_any = true;
                    match i64::try_from(jq) {
                        Ok(j) if j >= m2 => push_verified(k, j),
                        Ok(_) => break, // j below range and only decreasing
                        Err(_) => break,
                    }
                    k += step;
                } else {
                    if found_any {
                        break;
                    }
                    k += 1;
                    if k - m1 > step * 2 {
                        // No residue class hits an integer j.
                        return Ok(FamilyOverlap::Empty);
                    }
                }
            }
            Ok(if hits.is_empty() { FamilyOverlap::Empty } else { FamilyOverlap::Finite(hits) })
        }
    }
}

/// Named collection of sequences referenced by symbolic sets.
#[derive(Clone, Debug, Default)]
pub struct SeqRegistry {
    seqs: BTreeMap<String, RationalSequence>,
}

impl SeqRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, seq: RationalSequence) -> Result<()> {
        if self.seqs.contains_key(seq.id()) {
            return Err(Error::InvalidSequence {
                id: seq.id().into(),
                detail: "duplicate sequence id".into(),
            });
        }
        self.seqs.insert(seq.id().to_string(), seq);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Result<&RationalSequence> {
        self.seqs
            .get(id)
            .ok_or_else(|| Error::MalformedSet(format!("unknown sequence id `{id}`")))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.seqs.keys().map(|s| s.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = &RationalSequence> {
        self.seqs.values()
    }
}

/// Serialized form: `{"id": {"a": "...", "b": "...", "c": "...", "d": "...",
/// "domain_start": n, "monotonicity": "...", "limit": ...}}`.
#[derive(Serialize, Deserialize)]
struct SeqDoc {
    a: String,
    b: String,
    c: String,
    d: String,
    domain_start: i64,
    monotonicity: Monotonicity,
    limit: LimitDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LimitDoc {
    Finite(Q),
    Named(String),
}

impl Serialize for SeqRegistry {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.seqs.len()))?;
        for (id, s) in &self.seqs {
            let limit = match &s.limit {
                LimitValue::Finite(q) => LimitDoc::Finite(q.clone()),
                LimitValue::PosInfinity => LimitDoc::Named("+inf".into()),
                LimitValue::NegInfinity => LimitDoc::Named("-inf".into()),
            };
            let doc = SeqDoc {
                a: s.a.to_string(),
                b: s.b.to_string(),
                c: s.c.to_string(),
                d: s.d.to_string(),
                domain_start: s.domain_start,
                monotonicity: s.monotonicity,
                limit,
            };
            map.serialize_entry(id, &doc)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for SeqRegistry {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let raw: BTreeMap<String, SeqDoc> = BTreeMap::deserialize(deserializer)?;
        let mut reg = SeqRegistry::new();
        for (id, doc) in raw {
            let parse = |s: &str| BigInt::from_str(s).map_err(|_| DeError::custom(format!("bad coefficient `{s}`")));
            let limit = match doc.limit {
                LimitDoc::Finite(q) => LimitValue::Finite(q),
                LimitDoc::Named(s) => match s.as_str() {
                    "+inf" | "inf" => LimitValue::PosInfinity,
                    "-inf" => LimitValue::NegInfinity,
                    other => return Err(DeError::custom(format!("bad limit `{other}`"))),
                },
            };
            let seq = RationalSequence::from_bigints(
                id,
                (parse(&doc.a)?, parse(&doc.b)?, parse(&doc.c)?, parse(&doc.d)?),
                doc.domain_start,
                doc.monotonicity,
                limit,
            )
            .map_err(|e| DeError::custom(e.to_string()))?;
            reg.register(seq).map_err(|e| DeError::custom(e.to_string()))?;
        }
        Ok(reg)
    }
}

/// Registry with the sequences used throughout the built-in games and tests:
/// `even(k) = 2k/(2k+1)`, `odd(k) = (2k+1)/(2k+2)`, `frac(k) = k/(k+1)`.
pub fn standard_registry() -> SeqRegistry {
    let mut reg = SeqRegistry::new();
    for seq in [
        RationalSequence::new("even", (2, 0, 2, 1), 0, Monotonicity::Increasing, LimitValue::Finite(Q::one())).unwrap(),
        RationalSequence::new("odd", (2, 1, 2, 2), 0, Monotonicity::Increasing, LimitValue::Finite(Q::one())).unwrap(),
        RationalSequence::new("frac", (1, 0, 1, 1), 0, Monotonicity::Increasing, LimitValue::Finite(Q::one())).unwrap(),
    ] {
        reg.register(seq).unwrap();
    }
    reg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn even() -> RationalSequence {
        standard_registry().get("even").unwrap().clone()
    }

    fn odd() -> RationalSequence {
        standard_registry().get("odd").unwrap().clone()
    }

    #[test]
    fn eval_matches_closed_form() {
        let e = even();
        assert_eq!(e.eval(0), Q::zero());
        assert_eq!(e.eval(1), Q::ratio(2, 3));
        assert_eq!(e.eval(2), Q::ratio(4, 5));
        let o = odd();
        assert_eq!(o.eval(0), Q::ratio(1, 2));
        assert_eq!(o.eval(1), Q::ratio(3, 4));
    }

    #[test]
    fn validation_rejects_bad_declarations() {
        // Constant sequence.
        assert!(RationalSequence::new("c", (1, 1, 1, 1), 0, Monotonicity::Increasing, LimitValue::Finite(Q::one())).is_err());
        // Wrong monotonicity.
        assert!(RationalSequence::new("m", (2, 0, 2, 1), 0, Monotonicity::Decreasing, LimitValue::Finite(Q::one())).is_err());
        // Wrong limit.
        assert!(RationalSequence::new("l", (2, 0, 2, 1), 0, Monotonicity::Increasing, LimitValue::Finite(Q::zero())).is_err());
        // Denominator hits zero inside the domain: k = 1 for (k - 1).
        assert!(RationalSequence::new("z", (1, 0, 1, -1), 0, Monotonicity::Increasing, LimitValue::Finite(Q::one())).is_err());
        // Same coefficients, domain shifted past the pole: fine.
        assert!(RationalSequence::new("z2", (1, 0, 1, -1), 2, Monotonicity::Decreasing, LimitValue::Finite(Q::one())).is_ok());
    }

    #[test]
    fn decreasing_sequences_are_supported() {
        // (k+2)/(k+1): decreasing toward 1.
        let s = RationalSequence::new("down", (1, 2, 1, 1), 0, Monotonicity::Decreasing, LimitValue::Finite(Q::one())).unwrap();
        assert_eq!(s.eval(0), Q::from_int(2));
        assert_eq!(s.eval(1), Q::ratio(3, 2));
        assert!(s.eval(5) > Q::one());
    }

    #[test]
    fn index_of_solves_membership() {
        let e = even();
        assert_eq!(e.index_of(&Q::ratio(4, 5), 0), Some(2));
        assert_eq!(e.index_of(&Q::ratio(4, 5), 3), None);
        assert_eq!(e.index_of(&Q::ratio(1, 2), 0), None);
        assert_eq!(e.index_of(&Q::one(), 0), None);
    }

    #[test]
    fn first_index_above_thresholds() {
        let e = even();
        // Values: 0, 2/3, 4/5, 6/7, ...
        assert_eq!(e.first_index_above(&Q::ratio(1, 2), true, 0), Some(1));
        assert_eq!(e.first_index_above(&Q::ratio(2, 3), true, 0), Some(2));
        assert_eq!(e.first_index_above(&Q::ratio(2, 3), false, 0), Some(1));
        assert_eq!(e.first_index_above(&Q::one(), false, 0), None);
        assert_eq!(e.first_index_above(&Q::ratio(1, 2), true, 4), Some(4));
    }

    #[test]
    fn last_index_below_thresholds() {
        let e = even();
        assert_eq!(e.last_index_below(&Q::ratio(3, 4), true, 0), Some(1));
        assert_eq!(e.last_index_below(&Q::ratio(2, 3), false, 0), Some(1));
        assert_eq!(e.last_index_below(&Q::ratio(2, 3), true, 0), Some(0));
        assert_eq!(e.last_index_below(&Q::ratio(-1, 2), true, 0), None);
    }

    #[test]
    fn even_and_odd_never_meet() {
        // 2k/(2k+1) = (2j+1)/(2j+2) has no integer solutions.
        match family_overlap(&even(), 0, &odd(), 0).unwrap() {
            FamilyOverlap::Empty => {}
            other => panic!("expected empty overlap, got {other:?}"),
        }
    }

    #[test]
    fn planted_overlap_is_found() {
        // s1(k) = k/(k+1), s2(j) = (j+3)/(j+4) = s1(j+3): all of s2 lies in
        // s1; the solver reports the infinite overlap as unsupported.
        let s1 = RationalSequence::new("f1", (1, 0, 1, 1), 0, Monotonicity::Increasing, LimitValue::Finite(Q::one())).unwrap();
        let s2 = RationalSequence::new("f2", (1, 3, 1, 4), 0, Monotonicity::Increasing, LimitValue::Finite(Q::one())).unwrap();
        match family_overlap(&s1, 0, &s2, 0).unwrap() {
            FamilyOverlap::Unsupported => {}
            other => panic!("expected unsupported, got {other:?}"),
        }
    }

    #[test]
    fn bilinear_case_finds_single_crossing() {
        // s1(k) = k/(k+1) increasing to 1; s2(j) = 1/(j+1) decreasing to 0.
        // Shared values: 1/(j+1) = k/(k+1) => k*(j+1) = k+1... try small:
        // k=1: 1/2 = s2(1) -> hit.
        let s1 = RationalSequence::new("u", (1, 0, 1, 1), 0, Monotonicity::Increasing, LimitValue::Finite(Q::one())).unwrap();
        let s2 = RationalSequence::new("v", (0, 1, 1, 1), 0, Monotonicity::Decreasing, LimitValue::Finite(Q::zero())).unwrap();
        match family_overlap(&s1, 0, &s2, 0).unwrap() {
            FamilyOverlap::Finite(hits) => {
                assert!(hits.contains(&(1, 1)), "hits: {hits:?}");
                for (k, j) in hits {
                    assert_eq!(s1.eval(k), s2.eval(j));
                }
            }
            other => panic!("expected finite overlap, got {other:?}"),
        }
    }

    #[test]
    fn canonical_key_identifies_shifted_tails() {
        // even shifted by 5 embeds in even: tail(even,5) == tail(shifted,0).
        let shifted = RationalSequence::new("even5", (2, 10, 2, 11), 0, Monotonicity::Increasing, LimitValue::Finite(Q::one())).unwrap();
        assert_eq!(even().canonical_key(5), shifted.canonical_key(0));
        assert_ne!(even().canonical_key(4), shifted.canonical_key(0));
    }

    #[test]
    fn registry_serialization_round_trips() {
        let reg = standard_registry();
        let js = serde_json::to_string(&reg).unwrap();
        let back: SeqRegistry = serde_json::from_str(&js).unwrap();
        assert_eq!(back.get("even").unwrap().eval(3), Q::ratio(6, 7));
        assert_eq!(back.get("odd").unwrap().limit(), &LimitValue::Finite(Q::one()));
    }
}
