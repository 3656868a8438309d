//! Desk-scale models of the non-computable inputs.
//!
//! Nothing here is actually non-computable: limits come from declared finite
//! schedules, "non-recursive" sets from explicit enumeration schedules, and
//! oracle schemes from a host-coded catalog with explicit step accounting.
//! The harness guarantees the schedules outpace the catalog's budgets within
//! the horizon; the verification report states which diagonalizations were
//! actually witnessed.



use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("scheme `{scheme}` exceeded its step budget {budget} on input {input}")]
    BudgetExceeded { scheme: String, budget: u64, input: u64 },
    #[error("oracle undefined at {0}")]
    OracleUndefined(u64),
    #[error("malformed schedule: {0}")]
    Malformed(String),
}

// ---------------------------------------------------------------------------
// Clocked total functions (Δ₁ with a convergence schedule)
// ---------------------------------------------------------------------------

/// A total function together with the stage at which each value "converges".
/// Entries beyond the scripted range default to (0, 0).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClockedFn {
    pub values: Vec<u64>,
    pub convergence: Vec<u64>,
}

impl ClockedFn {
    pub fn constant(value: u64, len: usize) -> Self {
        Self { values: vec![value; len], convergence: vec![0; len] }
    }

    pub fn value(&self, x: u64) -> u64 {
        self.values.get(x as usize).copied().unwrap_or(0)
    }

    pub fn convergence_stage(&self, x: u64) -> u64 {
        self.convergence.get(x as usize).copied().unwrap_or(0)
    }
}

/// The value iff the stage has reached the convergence stage, else "not yet".
pub fn eval_clocked(f: &ClockedFn, x: u64, stage: u64) -> Option<u64> {
    (stage >= f.convergence_stage(x)).then(|| f.value(x))
}

// ---------------------------------------------------------------------------
// Δ₂ approximations with scripted mind changes
// ---------------------------------------------------------------------------

/// g*(x, s): per x an initial value plus finitely many scripted mind changes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Approx2 {
    pub rows: Vec<ApproxRow>,
}

/// One x-row: value at s=0 and the stages where it changes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxRow {
    pub initial: u64,
    /// (stage, new value), stages strictly increasing and ≥ 1, each value
    /// different from its predecessor.
    pub changes: Vec<(u64, u64)>,
}

impl ApproxRow {
    pub fn constant(v: u64) -> Self {
        Self { initial: v, changes: Vec::new() }
    }

    pub fn at(&self, s: u64) -> u64 {
        let mut v = self.initial;
        for &(stage, value) in &self.changes {
            if stage <= s {
                v = value;
            } else {
                break;
            }
        }
        v
    }

    pub fn limit(&self) -> u64 {
        self.changes.last().map(|&(_, v)| v).unwrap_or(self.initial)
    }

    pub fn last_change(&self) -> Option<u64> {
        self.changes.last().map(|&(s, _)| s)
    }

    fn validate(&self) -> Result<(), OracleError> {
        let mut prev_stage = 0u64;
        let mut prev_value = self.initial;
        for &(stage, value) in &self.changes {
            if stage <= prev_stage {
                return Err(OracleError::Malformed(
                    "change stages must be strictly increasing and ≥ 1".into(),
                ));
            }
            if value == prev_value {
                return Err(OracleError::Malformed("a mind change must change the value".into()));
            }
            prev_stage = stage;
            prev_value = value;
        }
        Ok(())
    }
}

impl Approx2 {
    pub fn new(rows: Vec<ApproxRow>) -> Result<Self, OracleError> {
        for row in &rows {
            row.validate()?;
        }
        Ok(Self { rows })
    }

    fn row(&self, x: u64) -> ApproxRow {
        self.rows.get(x as usize).cloned().unwrap_or(ApproxRow::constant(0))
    }

    pub fn eval(&self, x: u64, s: u64) -> u64 {
        self.row(x).at(s)
    }

    pub fn changed_at(&self, x: u64, s: u64) -> bool {
        s > 0 && self.eval(x, s) != self.eval(x, s - 1)
    }

    pub fn limit(&self, x: u64) -> u64 {
        self.row(x).limit()
    }

    /// Last scheduled mind-change stage over all x < bound (0 if none).
    pub fn last_change_below(&self, bound: u64) -> u64 {
        (0..bound.min(self.rows.len() as u64))
            .filter_map(|x| self.rows[x as usize].last_change())
            .max()
            .unwrap_or(0)
    }

    pub fn mind_change_stages(&self, x: u64) -> Vec<u64> {
        self.row(x).changes.iter().map(|&(s, _)| s).collect()
    }
}

// ---------------------------------------------------------------------------
// Δ₃ approximations: g*(x, s, t)
// ---------------------------------------------------------------------------

/// g*(x, s, t) with, per x, the distinguished s_x where the inner limit
/// equals the outer limit. Rows are clamped beyond the scripted grid, so the
/// evaluator is total.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Approx3 {
    /// inner[x][s] = the t-approximation of lim_t g*(x,s,t).
    pub inner: Vec<Vec<ApproxRow>>,
    /// s_x per x: least s ≥ x with the inner limit stable from s on;
    /// strictly increasing in x.
    pub stable_s: Vec<u64>,
}

impl Approx3 {
    /// Validates the normalization: s_x ≥ x, least such on the grid, strictly
    /// increasing, and every inner row well formed.
    pub fn new(inner: Vec<Vec<ApproxRow>>, stable_s: Vec<u64>) -> Result<Self, OracleError> {
        if inner.len() != stable_s.len() {
            return Err(OracleError::Malformed("inner and stable_s lengths differ".into()));
        }
        let a = Self { inner, stable_s };
        for (x, rows) in a.inner.iter().enumerate() {
            for row in rows {
                row.validate()?;
            }
            let x = x as u64;
            let s_x = a.stable_s[x as usize];
            let s_max = a.grid_smax(x);
            if s_x < x {
                return Err(OracleError::Malformed(format!("s_{x} = {s_x} violates s_x ≥ x")));
            }
            if s_x > s_max {
                return Err(OracleError::Malformed(format!("s_{x} = {s_x} beyond the grid")));
            }
            let stable_from = |s0: u64| (s0..=s_max).all(|s| a.inner_limit(x, s) == a.inner_limit(x, s0));
            if !stable_from(s_x) {
                return Err(OracleError::Malformed(format!(
                    "inner limits not stable from s_{x} = {s_x}"
                )));
            }
            if let Some(earlier) = (x..s_x).find(|&s0| stable_from(s0)) {
                return Err(OracleError::Malformed(format!(
                    "s_{x} = {s_x} is not least: already stable from {earlier}"
                )));
            }
            if x > 0 && a.stable_s[x as usize - 1] >= s_x {
                return Err(OracleError::Malformed("s_x must be strictly increasing".into()));
            }
        }
        Ok(a)
    }

    /// Largest scripted s for this x; rows clamp beyond it.
    pub fn grid_smax(&self, x: u64) -> u64 {
        self.inner
            .get(x as usize)
            .map(|rows| rows.len().saturating_sub(1) as u64)
            .unwrap_or(0)
    }

    /// Largest scripted s over the whole grid.
    pub fn max_grid_smax(&self) -> u64 {
        (0..self.inner.len() as u64).map(|x| self.grid_smax(x)).max().unwrap_or(0)
    }

    fn row(&self, x: u64, s: u64) -> ApproxRow {
        match self.inner.get(x as usize) {
            Some(rows) if !rows.is_empty() => {
                let s = (s as usize).min(rows.len() - 1);
                rows[s].clone()
            }
            _ => ApproxRow::constant(0),
        }
    }

    pub fn eval(&self, x: u64, s: u64, t: u64) -> u64 {
        self.row(x, s).at(t)
    }

    pub fn inner_limit(&self, x: u64, s: u64) -> u64 {
        self.row(x, s).limit()
    }

    /// The declared double limit lim_s lim_t g*(x,s,t).
    pub fn double_limit(&self, x: u64) -> u64 {
        self.inner_limit(x, self.stable_s(x))
    }

    pub fn stable_s(&self, x: u64) -> u64 {
        self.stable_s.get(x as usize).copied().unwrap_or(x)
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    pub fn inner_change_at(&self, x: u64, s: u64, t: u64) -> bool {
        t > 0 && self.eval(x, s, t) != self.eval(x, s, t - 1)
    }

    /// Last inner mind-change stage over the whole grid.
    pub fn last_inner_change(&self) -> u64 {
        self.inner
            .iter()
            .flatten()
            .filter_map(|row| row.last_change())
            .max()
            .unwrap_or(0)
    }
}

// ---------------------------------------------------------------------------
// C.e. enumeration schedules
// ---------------------------------------------------------------------------

/// Explicit enumeration schedule of a c.e. set: (element, stage) pairs with
/// strictly increasing stages and distinct elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CeSchedule {
    pub entries: Vec<(u64, u64)>,
}

impl CeSchedule {
    pub fn new(entries: Vec<(u64, u64)>) -> Result<Self, OracleError> {
        let mut prev: Option<u64> = None;
        for (i, &(elem, stage)) in entries.iter().enumerate() {
            if prev.map_or(false, |p| stage <= p) {
                return Err(OracleError::Malformed("stages must be strictly increasing".into()));
            }
            if entries[..i].iter().any(|&(e, _)| e == elem) {
                return Err(OracleError::Malformed(format!("element {elem} enumerated twice")));
            }
            prev = Some(stage);
        }
        Ok(Self { entries })
    }

    /// Element entering exactly at `stage`, if any.
    pub fn entering_at(&self, stage: u64) -> Option<u64> {
        self.entries.iter().find(|&&(_, s)| s == stage).map(|&(e, _)| e)
    }

    /// Membership of `x` in W[stage].
    pub fn member_by(&self, x: u64, stage: u64) -> bool {
        self.entries.iter().any(|&(e, s)| e == x && s <= stage)
    }

    pub fn entry_stage(&self, x: u64) -> Option<u64> {
        self.entries.iter().find(|&&(e, _)| e == x).map(|&(_, s)| s)
    }

    pub fn last_stage(&self) -> u64 {
        self.entries.last().map(|&(_, s)| s).unwrap_or(0)
    }
}

// ---------------------------------------------------------------------------
// Tuple codec
// ---------------------------------------------------------------------------

/// Cantor pairing, strictly monotone in each argument.
pub fn cantor_pair(x: u64, y: u64) -> u64 {
    let s = x + y;
    s * (s + 1) / 2 + y
}

pub fn cantor_unpair(z: u64) -> (u64, u64) {
    // Largest s with s(s+1)/2 <= z.
    let mut s = (((8.0 * z as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    while (s + 1) * (s + 2) / 2 <= z {
        s += 1;
    }
    while s * (s + 1) / 2 > z {
        s -= 1;
    }
    let y = z - s * (s + 1) / 2;
    (s - y, y)
}

/// A finite list of naturals with a bijective code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleValue(pub Vec<u64>);

/// Length-prefixed Cantor code: [] ↔ 0, and a nonempty tuple of length n
/// codes as 1 + pair(n-1, right-fold of the entries). Bijective, and strictly
/// monotone in every entry on equal-length tuples (larger entries ⇒ larger
/// code). Nested pairing grows doubly exponentially in the length, so codes
/// are meaningful for short tuples of moderate entries; tuple-valued oracles
/// at construction scale are consumed entry-wise instead of through codes.
pub fn encode_tuple(t: &TupleValue) -> u64 {
    match t.0.split_last() {
        None => 0,
        Some((&last, init)) => {
            let payload = init.iter().rev().fold(last, |acc, &x| cantor_pair(x, acc));
            1 + cantor_pair(t.0.len() as u64 - 1, payload)
        }
    }
}

pub fn decode_tuple(code: u64) -> TupleValue {
    if code == 0 {
        return TupleValue(Vec::new());
    }
    let (len_minus_1, mut payload) = cantor_unpair(code - 1);
    let len = len_minus_1 as usize + 1;
    let mut out = Vec::with_capacity(len);
    for _ in 0..len - 1 {
        let (head, rest) = cantor_unpair(payload);
        out.push(head);
        payload = rest;
    }
    out.push(payload);
    TupleValue(out)
}

// ---------------------------------------------------------------------------
// Step-bounded oracle schemes
// ---------------------------------------------------------------------------

/// Names of the host-coded catalog of primitive-recursive-like schemes.
/// Each scheme performs bounded work; evaluation counts every arithmetic step
/// and every oracle query against the declared budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeName {
    /// Ψ(x) = x, no queries.
    Identity,
    /// Ψ(x) = oracle(x).
    ApplyOracle,
    /// Ψ(x) = c.
    Const(u64),
    /// Ψ(x) = oracle(x) mod m.
    OracleMod(u64),
    /// Ψ(x) = first entry of the tuple decoded from oracle(x), or 0.
    FirstEntry,
    /// Ψ(x) = oracle(x) + c.
    OraclePlus(u64),
    /// Ψ(x) = x if oracle(x) = 0, else x + 1. Sensitive to the oracle tail.
    ShiftIfOracleNonzero,
    /// Ψ(x) = x with the lowest bit flipped (swaps 2k and 2k+1).
    SwapAdjacent,
    /// Ψ(x) = oracle(x) issued twice (stress for the budget accounting).
    DoubleQuery,
}

/// A host-coded total procedure with oracle access and a declared monotone
/// step budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleScheme {
    pub name: SchemeName,
    /// budget(x) = base + slope * x.
    pub budget_base: u64,
    pub budget_slope: u64,
}

impl OracleScheme {
    pub fn new(name: SchemeName) -> Self {
        // Generous default: every catalog scheme runs in a handful of steps.
        Self { name, budget_base: 16, budget_slope: 1 }
    }

    pub fn with_budget(name: SchemeName, base: u64, slope: u64) -> Self {
        Self { name, budget_base: base, budget_slope: slope }
    }

    pub fn budget(&self, x: u64) -> u64 {
        self.budget_base + self.budget_slope * x
    }

    pub fn label(&self) -> String {
        format!("{:?}", self.name)
    }
}

struct Meter {
    steps: u64,
    budget: u64,
}

impl Meter {
    fn tick(&mut self, cost: u64) -> Result<(), ()> {
        self.steps += cost;
        if self.steps > self.budget {
            Err(())
        } else {
            Ok(())
        }
    }
}

/// Runs a scheme against a total oracle. Aborts with `BudgetExceeded` if the
/// declared step budget is crossed — the catalog forbids runaways, so hitting
/// the budget signals a configuration error, not a recoverable state.
pub fn run_scheme(
    scheme: &OracleScheme,
    oracle: &dyn Fn(u64) -> u64,
    x: u64,
) -> Result<u64, OracleError> {
    let mut meter = Meter { steps: 0, budget: scheme.budget(x) };
    let over = |_| OracleError::BudgetExceeded {
        scheme: scheme.label(),
        budget: scheme.budget(x),
        input: x,
    };
    let query = |meter: &mut Meter, q: u64| -> Result<u64, OracleError> {
        meter.tick(1).map_err(over)?;
        Ok(oracle(q))
    };
    match scheme.name {
        SchemeName::Identity => {
            meter.tick(1).map_err(over)?;
            Ok(x)
        }
        SchemeName::ApplyOracle => query(&mut meter, x),
        SchemeName::Const(c) => {
            meter.tick(1).map_err(over)?;
            Ok(c)
        }
        SchemeName::OracleMod(m) => {
            let v = query(&mut meter, x)?;
            meter.tick(1).map_err(over)?;
            Ok(if m == 0 { v } else { v % m })
        }
        SchemeName::FirstEntry => {
            let v = query(&mut meter, x)?;
            meter.tick(2).map_err(over)?;
            Ok(decode_tuple(v).0.first().copied().unwrap_or(0))
        }
        SchemeName::OraclePlus(c) => {
            let v = query(&mut meter, x)?;
            meter.tick(1).map_err(over)?;
            Ok(v + c)
        }
        SchemeName::ShiftIfOracleNonzero => {
            let v = query(&mut meter, x)?;
            meter.tick(1).map_err(over)?;
            Ok(if v == 0 { x } else { x + 1 })
        }
        SchemeName::SwapAdjacent => {
            meter.tick(1).map_err(over)?;
            Ok(x ^ 1)
        }
        SchemeName::DoubleQuery => {
            let _ = query(&mut meter, x)?;
            let v = query(&mut meter, x)?;
            Ok(v)
        }
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn clocked_eval() {
        let f = ClockedFn { values: vec![9], convergence: vec![4] };
        assert_eq!(eval_clocked(&f, 0, 3), None);
        assert_eq!(eval_clocked(&f, 0, 4), Some(9));
        let instant = ClockedFn::constant(2, 3);
        assert_eq!(eval_clocked(&instant, 1, 0), Some(2));
    }

    #[test]
    fn approx2_changes_and_limit() {
        let g = Approx2::new(vec![
            ApproxRow { initial: 3, changes: vec![(5, 1), (9, 4)] },
            ApproxRow::constant(7),
        ])
        .unwrap();
        assert_eq!(g.eval(0, 0), 3);
        assert_eq!(g.eval(0, 5), 1);
        assert_eq!(g.eval(0, 8), 1);
        assert_eq!(g.eval(0, 9), 4);
        assert_eq!(g.limit(0), 4);
        assert!(g.changed_at(0, 5));
        assert!(!g.changed_at(0, 6));
        assert_eq!(g.eval(1, 100), 7);
        // Beyond the last change the value is the declared limit.
        for s in 9..40 {
            assert_eq!(g.eval(0, s), g.limit(0));
        }
    }

    #[test]
    fn approx2_rejects_fake_change() {
        let bad = Approx2::new(vec![ApproxRow { initial: 3, changes: vec![(5, 3)] }]);
        assert!(bad.is_err());
    }

    fn small_approx3() -> Approx3 {
        // x=0: s_0 = 0 — inner limits all 5.
        // x=1: s_1 = 2 — inner limit differs at s=1.
        Approx3::new(
            vec![
                vec![
                    ApproxRow { initial: 0, changes: vec![(3, 5)] },
                    ApproxRow::constant(5),
                    ApproxRow::constant(5),
                ],
                vec![
                    ApproxRow::constant(8),
                    ApproxRow { initial: 8, changes: vec![(2, 9)] },
                    ApproxRow::constant(8),
                    ApproxRow::constant(8),
                ],
            ],
            vec![0, 2],
        )
        .unwrap()
    }

    #[test]
    fn approx3_limits() {
        let g = small_approx3();
        assert_eq!(g.inner_limit(0, 0), 5);
        assert_eq!(g.double_limit(0), 5);
        assert_eq!(g.inner_limit(1, 1), 9);
        assert_eq!(g.double_limit(1), 8);
        // Stability of the inner limit from s_x on.
        for s in g.stable_s(1)..=3 {
            assert_eq!(g.inner_limit(1, s), g.double_limit(1));
        }
    }

    #[test]
    fn approx3_normalization_enforced() {
        // s_1 = 3 is not least (stable already from 2).
        let bad = Approx3::new(
            vec![
                vec![ApproxRow::constant(5)],
                vec![
                    ApproxRow::constant(8),
                    ApproxRow { initial: 8, changes: vec![(2, 9)] },
                    ApproxRow::constant(8),
                    ApproxRow::constant(8),
                ],
            ],
            vec![0, 3],
        );
        assert!(bad.is_err());
        // s_x must increase strictly.
        let bad2 = Approx3::new(
            vec![vec![ApproxRow::constant(5)], vec![ApproxRow::constant(1), ApproxRow::constant(1)]],
            vec![0, 0],
        );
        assert!(bad2.is_err());
    }

    #[test]
    fn ce_schedule_queries() {
        let w = CeSchedule::new(vec![(0, 5), (3, 9)]).unwrap();
        assert_eq!(w.entering_at(5), Some(0));
        assert_eq!(w.entering_at(6), None);
        assert!(w.member_by(3, 9));
        assert!(!w.member_by(3, 8));
        assert_eq!(w.entry_stage(1), None);
        assert!(CeSchedule::new(vec![(0, 5), (1, 5)]).is_err());
        assert!(CeSchedule::new(vec![(0, 5), (0, 7)]).is_err());
    }

    #[test]
    fn tuple_codec_basics() {
        assert_eq!(encode_tuple(&TupleValue(vec![])), 0);
        let t = TupleValue(vec![3, 1, 4]);
        assert_eq!(decode_tuple(encode_tuple(&t)), t);
    }

    #[test]
    fn tuple_codec_injective_small() {
        // All tuples with entries < 10, length < 4.
        let mut seen = std::collections::BTreeMap::new();
        let mut tuples = vec![vec![]];
        for len in 1..4 {
            let mut level: Vec<Vec<u64>> = Vec::new();
            fn gen(prefix: &mut Vec<u64>, len: usize, out: &mut Vec<Vec<u64>>) {
                if prefix.len() == len {
                    out.push(prefix.clone());
                    return;
                }
                for e in 0..10 {
                    prefix.push(e);
                    gen(prefix, len, out);
                    prefix.pop();
                }
            }
            gen(&mut Vec::new(), len, &mut level);
            tuples.extend(level);
        }
        for t in tuples {
            let code = encode_tuple(&TupleValue(t.clone()));
            if let Some(prev) = seen.insert(code, t.clone()) {
                panic!("collision: {prev:?} and {t:?} both code to {code}");
            }
        }
    }

    proptest! {
        #[test]
        fn tuple_codec_round_trips(entries in proptest::collection::vec(0u64..200, 0..4)) {
            let t = TupleValue(entries);
            prop_assert_eq!(decode_tuple(encode_tuple(&t)), t);
        }

        #[test]
        fn tuple_codec_monotone_per_coordinate(
            entries in proptest::collection::vec(0u64..100, 1..4),
            ix in 0usize..4,
            bump in 1u64..50,
        ) {
            let ix = ix % entries.len();
            let mut bigger = entries.clone();
            bigger[ix] += bump;
            prop_assert!(
                encode_tuple(&TupleValue(bigger)) > encode_tuple(&TupleValue(entries))
            );
        }

        #[test]
        fn cantor_pair_round_trips(x in 0u64..100_000, y in 0u64..100_000) {
            prop_assert_eq!(cantor_unpair(cantor_pair(x, y)), (x, y));
        }
    }

    #[test]
    fn cantor_pair_monotone_each_argument() {
        for x in 0..50u64 {
            for y in 0..50u64 {
                assert!(cantor_pair(x + 1, y) > cantor_pair(x, y));
                assert!(cantor_pair(x, y + 1) > cantor_pair(x, y));
            }
        }
    }

    #[test]
    fn run_scheme_identity_and_apply() {
        let id = OracleScheme::new(SchemeName::Identity);
        assert_eq!(run_scheme(&id, &|_| 0, 7).unwrap(), 7);
        let apply = OracleScheme::new(SchemeName::ApplyOracle);
        assert_eq!(run_scheme(&apply, &|q| q + 1, 3).unwrap(), 4);
    }

    #[test]
    fn run_scheme_budget_exceeded() {
        // Budget n ↦ n gives 0 steps on input 0; even one query overruns.
        let s = OracleScheme::with_budget(SchemeName::DoubleQuery, 0, 1);
        assert!(matches!(
            run_scheme(&s, &|_| 0, 0),
            Err(OracleError::BudgetExceeded { .. })
        ));
        // With budget 1 on input 0 the second query overruns.
        let s = OracleScheme::with_budget(SchemeName::DoubleQuery, 1, 0);
        assert!(matches!(run_scheme(&s, &|_| 0, 0), Err(OracleError::BudgetExceeded { .. })));
    }

    #[test]
    fn run_scheme_depends_only_on_queried_points() {
        // Two oracles agreeing at the queried point give identical runs.
        let apply = OracleScheme::new(SchemeName::ApplyOracle);
        let a = run_scheme(&apply, &|q| if q == 5 { 42 } else { 0 }, 5).unwrap();
        let b = run_scheme(&apply, &|q| if q == 5 { 42 } else { 999 }, 5).unwrap();
        assert_eq!(a, b);
    }
}
