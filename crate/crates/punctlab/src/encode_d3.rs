//! Double-limit encoding over four element families.
//!
//! A carries standard ω-chains a_{i,·} (one per pair code ⟨x,s⟩) and
//! conditional chains d_{s,·} that grow leftward exactly at stages where some
//! P(x,s), x ≤ s, fires — so d_{s,·} becomes a ζ-chain iff s is a true
//! stabilization point. B carries non-standard ω-chains b_{i,·} whose heads
//! are re-based leftward at every inner mind change of any pair ≤ i, and
//! standard ζ-chains c_{i,·}. An isomorphism pair (h, h⁻¹) then recovers, for
//! any x, first a stage s* ≥ s_x from the d-labels of h⁻¹ on c-anchors, then
//! a stage t* from the b-labels of h on a-anchors, and g*(x,s*,t*) equals the
//! declared double limit.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::core::{
    EngineError, LogSink, PunctualityReport, Signature, StageRecorder, StructureLog, SymbolId,
};
use crate::oracles::{cantor_pair, cantor_unpair, Approx3};

const F: SymbolId = SymbolId(0);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum D3Error {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("oracle undefined on anchor {0}")]
    OracleUndefined(u64),
    #[error("image {element} lies in the {found} family, expected {expected}")]
    WrongFamily { element: u64, found: &'static str, expected: &'static str },
    #[error("horizon must be ≥ 1")]
    HorizonTooSmall,
}

/// Which of the four element families an element belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    /// Standard ω-chains of A.
    A,
    /// Non-standard ω-chains of B.
    B,
    /// Standard ζ-chains of B.
    C,
    /// Conditional ζ-chains of A.
    D,
}

/// (family, chain index, member index within the family's labelling).
pub type Label = (Family, u64, u64);

/// π₂ firing state: historical maximum of the agreement length per (x, s).
#[derive(Debug, Clone, Default)]
pub struct FiringState {
    max_len: BTreeMap<(u64, u64), u64>,
}

/// Agreement length ℓ: the largest n ≤ stage with g*(x,s,stage) = g*(x,s',stage)
/// for all s' ∈ [s, n]. Rows clamp beyond the scripted grid, so the scan only
/// has to visit scripted s-values.
fn agreement_len(g3: &Approx3, x: u64, s: u64, stage: u64) -> u64 {
    let base = g3.eval(x, s, stage);
    let smax = g3.grid_smax(x);
    let mut n = s;
    while n < stage.min(smax) && g3.eval(x, n + 1, stage) == base {
        n += 1;
    }
    if n >= smax && stage > smax {
        // Everything beyond smax evaluates like smax.
        return stage;
    }
    n
}

/// One firing approximation step for P(x,s) ≡ "for all s' ≥ s the inner
/// limits at s and s' agree", normalized so that only the least such s ≥ x
/// fires infinitely often: the stage fires iff the agreement length ℓ
/// strictly exceeds its historical maximum *and* strictly exceeds ℓ(x,s'')
/// for every x ≤ s'' < s. True pairs (x, s_x) fire at every late stage;
/// everything else fires finitely often.
pub fn fires(g3: &Approx3, x: u64, s: u64, stage: u64, st: &mut FiringState) -> bool {
    let len = agreement_len(g3, x, s, stage);
    let entry = st.max_len.entry((x, s)).or_insert(0);
    let expanded = len > *entry;
    if expanded {
        *entry = len;
    }
    expanded && (x..s).all(|s2| agreement_len(g3, x, s2, stage) < len)
}

/// Build result. Logs are present unless the builder ran in streaming mode.
pub struct BuildOutputD3 {
    pub log_a: Option<StructureLog>,
    pub log_b: Option<StructureLog>,
    pub report_a: PunctualityReport,
    pub report_b: PunctualityReport,
    /// a_{i,0} per chain i.
    pub a_anchors: Vec<u64>,
    /// c_{i,0} per chain i.
    pub c_anchors: Vec<u64>,
    /// Current head (leftmost element) of b-chain i.
    pub b_heads: Vec<u64>,
    /// Current left end of d-chain s.
    pub d_lefts: Vec<u64>,
    /// Base element d_{s,0} per chain s.
    pub d_bases: Vec<u64>,
    /// Element labels for both structures (indexed by element id; None for
    /// finite-orbit members).
    pub labels_a: Vec<Option<Label>>,
    pub labels_b: Vec<Option<Label>>,
    /// Stages at which d-chain s grew leftward (recorded for chains within
    /// the scripted grid; chains beyond it grow every stage).
    pub d_growth_stages: Vec<Vec<u64>>,
    /// Stages at which b-chain i was re-based leftward.
    pub b_rebase_stages: Vec<Vec<u64>>,
    /// Firing records: (x, s, stage).
    pub firings: Vec<(u64, u64, u64)>,
}

impl BuildOutputD3 {
    pub fn label_a(&self, e: u64) -> Option<Label> {
        self.labels_a.get(e as usize).copied().flatten()
    }

    pub fn label_b(&self, e: u64) -> Option<Label> {
        self.labels_b.get(e as usize).copied().flatten()
    }

    /// Canonical isomorphism restricted to the decode anchors: a_{i,0} to the
    /// current head of b-chain i, and (inverse direction) c_{i,0} to the base
    /// of the i-th truly-ζ d-chain, i.e. d_{s_i,0}.
    pub fn canonical_oracles<'a>(
        &'a self,
        g3: &'a Approx3,
    ) -> (impl Fn(u64) -> Option<u64> + 'a, impl Fn(u64) -> Option<u64> + 'a) {
        let h = move |a: u64| -> Option<u64> {
            let (Family::A, i, j) = self.label_a(a)? else { return None };
            if j != 0 {
                return None;
            }
            self.b_heads.get(i as usize).copied()
        };
        let h_inv = move |c: u64| -> Option<u64> {
            let (Family::C, i, j) = self.label_b(c)? else { return None };
            if j != 0 {
                return None;
            }
            let s_i = g3.stable_s(i);
            self.d_bases.get(s_i as usize).copied()
        };
        (h, h_inv)
    }
}

// ---------------------------------------------------------------------------
// Builder
// ---------------------------------------------------------------------------

struct LabelSide {
    rec: StageRecorder,
    sink: LogSink,
    labels: Vec<Option<Label>>,
    keep_labels: bool,
}

impl LabelSide {
    fn new(keep_log: bool) -> Self {
        let sig = Signature::injection();
        Self {
            rec: StageRecorder::new(),
            sink: if keep_log { LogSink::full(sig, 1) } else { LogSink::check(sig, 1) },
            labels: Vec::new(),
            keep_labels: keep_log,
        }
    }

    fn fresh(&mut self, label: Option<Label>) -> u64 {
        let e = self.rec.fresh();
        if self.keep_labels {
            self.labels.push(label);
            debug_assert_eq!(self.labels.len() as u64 - 1, e);
        }
        e
    }

    fn flush(&mut self) -> Result<(), EngineError> {
        let ev = self.rec.take_event();
        self.sink.push(ev)
    }
}

struct Endpoints {
    left: u64,
    right: u64,
    next_j: u64,
}

/// Runs the construction. With `keep_logs` false only the punctuality reports
/// and bookkeeping survive (used at large horizons).
pub fn build_d3(
    g3: &Approx3,
    finite_orbits: &[(usize, u64)],
    horizon: u64,
    keep_logs: bool,
) -> Result<BuildOutputD3, D3Error> {
    if horizon == 0 {
        return Err(D3Error::HorizonTooSmall);
    }
    let mut a = LabelSide::new(keep_logs);
    let mut b = LabelSide::new(keep_logs);

    let mut a_chains: Vec<Vec<u64>> = Vec::new(); // members by j
    let mut a_anchors: Vec<u64> = Vec::new();
    let mut c_anchors: Vec<u64> = Vec::new();
    // c-chain endpoints: (left head element, right tail element).
    let mut c_ends: Vec<(u64, u64)> = Vec::new();
    let mut b_chains: Vec<Endpoints> = Vec::new();
    let mut d_chains: Vec<Endpoints> = Vec::new();
    let mut d_bases: Vec<u64> = Vec::new();
    let mut d_growth: Vec<Vec<u64>> = Vec::new();
    let mut b_rebases: Vec<Vec<u64>> = Vec::new();
    let mut firings: Vec<(u64, u64, u64)> = Vec::new();
    let mut firing_state = FiringState::default();
    let mut next_orbit = 0usize;

    for s in 0..horizon {
        // Step 1 — A's standard ω-chains.
        if s == 0 {
            let e = a.fresh(Some((Family::A, 0, 0)));
            a_chains.push(vec![e]);
            a_anchors.push(e);
        } else {
            for i in 0..a_chains.len() {
                let e = a.fresh(Some((Family::A, i as u64, s)));
                let prev = *a_chains[i].last().expect("nonempty chain");
                a.rec.assign(F, prev, e);
                a_chains[i].push(e);
            }
            let mut fresh_chain = Vec::with_capacity(s as usize + 1);
            for j in 0..=s {
                let e = a.fresh(Some((Family::A, s, j)));
                if let Some(&prev) = fresh_chain.last() {
                    a.rec.assign(F, prev, e);
                }
                fresh_chain.push(e);
            }
            a_anchors.push(fresh_chain[0]);
            a_chains.push(fresh_chain);
        }

        // Step 2 — B's b-family. No pair changes after the schedules run out.
        let least_changed: Option<u64> = if s > g3.last_inner_change() {
            None
        } else {
            (0..s).find(|&i| {
                let (x, n) = cantor_unpair(i);
                g3.inner_change_at(x, n, s)
            })
        };
        for k in 0..b_chains.len() {
            let k64 = k as u64;
            let rebase = least_changed.is_some_and(|i| k64 >= i);
            let j = b_chains[k].next_j;
            if rebase {
                let right = b.fresh(Some((Family::B, k64, j + 1)));
                let left = b.fresh(Some((Family::B, k64, j)));
                b.rec.assign(F, b_chains[k].right, right);
                b.rec.assign(F, left, b_chains[k].left);
                b_chains[k] = Endpoints { left, right, next_j: j + 2 };
                b_rebases[k].push(s);
            } else {
                let right = b.fresh(Some((Family::B, k64, j)));
                b.rec.assign(F, b_chains[k].right, right);
                b_chains[k].right = right;
                b_chains[k].next_j = j + 1;
            }
        }
        let base = b.fresh(Some((Family::B, s, s)));
        b_chains.push(Endpoints { left: base, right: base, next_j: s + 1 });
        b_rebases.push(Vec::new());

        // Step 3 — B's standard ζ-chains c_{i,j}, wired
        // c_{i,2s+1} → c_{i,2s-1} → … → c_{i,1} → c_{i,0} → c_{i,2} → … → c_{i,2s}.
        for i in 0..c_ends.len() {
            let i64 = i as u64;
            let right = b.fresh(Some((Family::C, i64, 2 * s)));
            let left = b.fresh(Some((Family::C, i64, 2 * s + 1)));
            let (old_left, old_right) = c_ends[i];
            b.rec.assign(F, old_right, right);
            b.rec.assign(F, left, old_left);
            c_ends[i] = (left, right);
        }
        {
            // Chain s enters with members j < 2(s+1).
            let members: Vec<u64> =
                (0..2 * (s + 1)).map(|j| b.fresh(Some((Family::C, s, j)))).collect();
            c_anchors.push(members[0]);
            // Odd side descending into 0.
            let mut q = 2 * s + 1;
            while q >= 3 {
                b.rec.assign(F, members[q as usize], members[q as usize - 2]);
                q -= 2;
            }
            b.rec.assign(F, members[1], members[0]);
            // Even side ascending; the last even is the pending tail.
            let mut p = 0;
            while p + 2 <= 2 * s {
                b.rec.assign(F, members[p as usize], members[p as usize + 2]);
                p += 2;
            }
            c_ends.push((members[2 * s as usize + 1], members[2 * s as usize]));
        }

        // Step 4 — A's conditional chains d_{i,j}. Chains beyond the scripted
        // grid fire through their own pair (i,i) at every stage (their rows
        // clamp to constants, so the agreement length is the stage itself and
        // the least-s guard is vacuous), while every pair (x < i, i) out
        // there fails the guard; only grid-sized chains need the real scan.
        let grid_bound = g3.max_grid_smax();
        for i in 0..d_chains.len() {
            let i64 = i as u64;
            let fired = if i64 > grid_bound {
                true
            } else {
                let mut fired = false;
                // Every pair (x ≤ i, i) gets its firing state advanced.
                for x in 0..=i64 {
                    if fires(g3, x, i64, s, &mut firing_state) {
                        fired = true;
                        firings.push((x, i64, s));
                    }
                }
                fired
            };
            let j = d_chains[i].next_j;
            if fired {
                let right = a.fresh(Some((Family::D, i64, j + 1)));
                let left = a.fresh(Some((Family::D, i64, j)));
                a.rec.assign(F, d_chains[i].right, right);
                a.rec.assign(F, left, d_chains[i].left);
                d_chains[i] = Endpoints { left, right, next_j: j + 2 };
                if i64 <= grid_bound {
                    d_growth[i].push(s);
                }
            } else {
                let right = a.fresh(Some((Family::D, i64, j)));
                a.rec.assign(F, d_chains[i].right, right);
                d_chains[i].right = right;
                d_chains[i].next_j = j + 1;
            }
        }
        {
            let base = a.fresh(Some((Family::D, s, 0)));
            d_chains.push(Endpoints { left: base, right: base, next_j: 1 });
            d_bases.push(base);
            d_growth.push(Vec::new());
        }

        // Finite orbits copied from the reveal schedule into both structures.
        while let Some(&(size, reveal)) = finite_orbits.get(next_orbit) {
            if reveal != s {
                break;
            }
            for side in [&mut a, &mut b] {
                let members: Vec<u64> = (0..size).map(|_| side.fresh(None)).collect();
                for (ix, &m) in members.iter().enumerate() {
                    side.rec.assign(F, m, members[(ix + 1) % size]);
                }
            }
            next_orbit += 1;
        }

        a.flush()?;
        b.flush()?;
    }

    let report_a;
    let report_b;
    let (log_a, log_b);
    match (a.sink, b.sink) {
        (LogSink::Full(la), LogSink::Full(lb)) => {
            report_a = crate::core::check_punctuality(&la);
            report_b = crate::core::check_punctuality(&lb);
            log_a = Some(la);
            log_b = Some(lb);
        }
        (sa, sb) => {
            report_a = sa.into_report();
            report_b = sb.into_report();
            log_a = None;
            log_b = None;
        }
    }

    Ok(BuildOutputD3 {
        log_a,
        log_b,
        report_a,
        report_b,
        a_anchors,
        c_anchors,
        b_heads: b_chains.iter().map(|c| c.left).collect(),
        d_lefts: d_chains.iter().map(|c| c.left).collect(),
        d_bases,
        labels_a: a.labels,
        labels_b: b.labels,
        d_growth_stages: d_growth,
        b_rebase_stages: b_rebases,
        firings,
    })
}

// ---------------------------------------------------------------------------
// Decoder
// ---------------------------------------------------------------------------

/// Two-phase decode: s* from the d-labels of h⁻¹ on c-anchors 0..=x, then t*
/// from the b-labels of h on a-anchors 0..=⟨x,s*⟩, finally g*(x, s*, t*).
pub fn decode_d3(
    h: &dyn Fn(u64) -> Option<u64>,
    h_inv: &dyn Fn(u64) -> Option<u64>,
    g3: &Approx3,
    out: &BuildOutputD3,
    x: u64,
) -> Result<u64, D3Error> {
    // Phase 1: recover s* ≥ s_x.
    let mut s_star = 0u64;
    for i in 0..=x {
        let anchor = out.c_anchors[i as usize];
        let img = h_inv(anchor).ok_or(D3Error::OracleUndefined(anchor))?;
        match out.label_a(img) {
            Some((Family::D, s, _)) => s_star = s_star.max(s),
            Some((Family::A, _, _)) => {
                return Err(D3Error::WrongFamily { element: img, found: "a", expected: "d" })
            }
            _ => return Err(D3Error::WrongFamily { element: img, found: "finite", expected: "d" }),
        }
    }
    // Phase 2: recover t* from the image in the maximal b-family chain.
    let bound = cantor_pair(x, s_star);
    let mut best: Option<(u64, u64)> = None; // (chain, j)
    for i in 0..=bound {
        let anchor = out.a_anchors[i as usize];
        let img = h(anchor).ok_or(D3Error::OracleUndefined(anchor))?;
        match out.label_b(img) {
            Some((Family::B, chain, j)) => {
                // Maximum chain; maximum j among images landing in it.
                if best.map_or(true, |(bc, bj)| (chain, j) > (bc, bj)) {
                    best = Some((chain, j));
                }
            }
            Some((Family::C, _, _)) => {
                return Err(D3Error::WrongFamily { element: img, found: "c", expected: "b" })
            }
            _ => return Err(D3Error::WrongFamily { element: img, found: "finite", expected: "b" }),
        }
    }
    let (_, t_star) = best.expect("at least one anchor");
    Ok(g3.eval(x, s_star, t_star))
}

/// Injective assignments of the first x+1 c-anchors to distinct truly-ζ
/// d-chains of A (ζ-to-ζ consistency), enumerated up to `cap`. Images are the
/// chain bases.
pub fn phase1_assignments(
    out: &BuildOutputD3,
    g3: &Approx3,
    x: u64,
    cap: usize,
) -> Vec<BTreeMap<u64, u64>> {
    let zeta_chains: Vec<u64> =
        (0..g3.len() as u64).map(|y| g3.stable_s(y)).filter(|&s| (s as usize) < out.d_bases.len()).collect();
    let anchors: Vec<u64> = out.c_anchors[..=(x as usize)].to_vec();
    let mut result = Vec::new();
    let mut picked = Vec::new();
    fn rec(
        anchors: &[u64],
        pool: &[u64],
        bases: &[u64],
        picked: &mut Vec<u64>,
        out: &mut Vec<BTreeMap<u64, u64>>,
        cap: usize,
    ) {
        if out.len() >= cap {
            return;
        }
        if picked.len() == anchors.len() {
            let m = anchors
                .iter()
                .zip(picked.iter())
                .map(|(&a, &s)| (a, bases[s as usize]))
                .collect();
            out.push(m);
            return;
        }
        for &s in pool {
            if picked.contains(&s) {
                continue;
            }
            picked.push(s);
            rec(anchors, pool, bases, picked, out, cap);
            picked.pop();
            if out.len() >= cap {
                return;
            }
        }
    }
    rec(&anchors, &zeta_chains, &out.d_bases, &mut picked, &mut result, cap);
    result
}

/// Injective head-to-head assignments of the first k+1 a-anchors to distinct
/// b-chain heads, enumerated up to `cap`.
pub fn phase2_assignments(out: &BuildOutputD3, k: u64, cap: usize) -> Vec<BTreeMap<u64, u64>> {
    let anchors: Vec<u64> = out.a_anchors[..=(k as usize)].to_vec();
    let heads = &out.b_heads;
    let mut result = Vec::new();
    let mut picked: Vec<usize> = Vec::new();
    fn rec(
        anchors: &[u64],
        heads: &[u64],
        picked: &mut Vec<usize>,
        out: &mut Vec<BTreeMap<u64, u64>>,
        cap: usize,
    ) {
        if out.len() >= cap {
            return;
        }
        if picked.len() == anchors.len() {
            let m =
                anchors.iter().zip(picked.iter()).map(|(&a, &h)| (a, heads[h])).collect();
            out.push(m);
            return;
        }
        for h in 0..heads.len() {
            if picked.contains(&h) {
                continue;
            }
            picked.push(h);
            rec(anchors, heads, picked, out, cap);
            picked.pop();
            if out.len() >= cap {
                return;
            }
        }
    }
    rec(&anchors, heads, &mut picked, &mut result, cap);
    result
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::ApproxRow;

    /// Schedule with explicit per-(x,s) inner rows.
    fn g3_simple() -> Approx3 {
        // x=0: s_0 = 1; inner limit 5 from s=1 on, 4 at s=0.
        // x=1: s_1 = 2; inner limit 7 from s=2 on.
        Approx3::new(
            vec![
                vec![
                    ApproxRow::constant(4),
                    ApproxRow { initial: 4, changes: vec![(3, 5)] },
                    ApproxRow::constant(5),
                    ApproxRow::constant(5),
                    ApproxRow::constant(5),
                ],
                vec![
                    ApproxRow::constant(7),
                    ApproxRow { initial: 7, changes: vec![(2, 6)] },
                    ApproxRow { initial: 6, changes: vec![(5, 7)] },
                    ApproxRow::constant(7),
                    ApproxRow::constant(7),
                ],
            ],
            vec![1, 2],
        )
        .unwrap()
    }

    #[test]
    fn fires_constant_in_s_fires_every_growth() {
        // g* independent of s: ℓ = stage, guard trivially true at s = x.
        let g3 = Approx3::new(
            vec![vec![ApproxRow::constant(3); 6]],
            vec![0],
        )
        .unwrap();
        let mut st = FiringState::default();
        let fired: Vec<bool> = (0..8).map(|stage| fires(&g3, 0, 0, stage, &mut st)).collect();
        assert!(fired.iter().skip(1).all(|&f| f), "fires whenever ℓ grows: {fired:?}");
    }

    #[test]
    fn fires_permanent_disagreement_caps() {
        // s=0 and s=1 disagree forever at x=0 (limits 4 vs 5): P(0,0) false,
        // so fires(0,0,·) happens at most finitely often.
        let g3 = g3_simple();
        let mut st = FiringState::default();
        let fired: Vec<u64> =
            (0..60).filter(|&stage| fires(&g3, 0, 0, stage, &mut st)).collect();
        assert!(fired.len() <= 1, "{fired:?}");
    }

    #[test]
    fn fires_matches_scripted_truth() {
        let g3 = g3_simple();
        let horizon = 80u64;
        // Past all inner mind changes plus the grid, the truth is decided.
        let bound = g3.last_inner_change() + 6;
        let mut st = FiringState::default();
        for (x, s) in [(0u64, 0u64), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3)] {
            if s < x {
                continue;
            }
            let late_fires: Vec<u64> = (0..horizon)
                .filter(|&stage| fires(&g3, x, s, stage, &mut st) && stage > bound)
                .collect();
            let truth = s == g3.stable_s(x);
            assert_eq!(
                !late_fires.is_empty(),
                truth,
                "P({x},{s}) scripted truth {truth}, late fires {late_fires:?}"
            );
        }
    }

    #[test]
    fn builder_is_punctual_and_c_wiring_exact() {
        let g3 = g3_simple();
        let out = build_d3(&g3, &[(3, 2)], 12, true).unwrap();
        assert!(out.report_a.passes());
        assert!(out.report_b.passes());
        let log_b = out.log_b.as_ref().unwrap();
        // f_B(c_{i,1}) = c_{i,0}, f_B(c_{i,2j}) = c_{i,2(j+1)}, and
        // f_B(c_{i,2j+3}) = c_{i,2j+1} for members within the horizon.
        let mut members: BTreeMap<(u64, u64), u64> = BTreeMap::new();
        for (e, lbl) in out.labels_b.iter().enumerate() {
            if let Some((Family::C, i, j)) = lbl {
                members.insert((*i, *j), e as u64);
            }
        }
        for (&(i, j), &e) in &members {
            if j == 1 {
                assert_eq!(log_b.apply(F, e), Some(members[&(i, 0)]));
            } else if j % 2 == 0 {
                if let Some(&next) = members.get(&(i, j + 2)) {
                    let img = log_b.apply(F, e);
                    if img.is_some() {
                        assert_eq!(img, Some(next), "even side of c-chain {i} at {j}");
                    }
                }
            } else if j >= 3 {
                assert_eq!(log_b.apply(F, e), Some(members[&(i, j - 2)]), "odd side {i},{j}");
            }
        }
    }

    #[test]
    fn no_inner_changes_no_rebase() {
        let g3 = Approx3::new(
            vec![vec![ApproxRow::constant(3); 4], vec![ApproxRow::constant(8); 4]],
            vec![0, 1],
        )
        .unwrap();
        let out = build_d3(&g3, &[], 15, true).unwrap();
        assert!(out.b_rebase_stages.iter().all(|r| r.is_empty()));
    }

    #[test]
    fn b_head_labels_bound_inner_changes() {
        let g3 = g3_simple();
        let out = build_d3(&g3, &[], 40, true).unwrap();
        // Stabilized head of b-chain i has label index ≥ every inner
        // mind-change stage of all pairs ≤ i.
        for (i, &head) in out.b_heads.iter().enumerate() {
            let (Family::B, chain, j) = out.label_b(head).unwrap() else { unreachable!() };
            assert_eq!(chain, i as u64);
            let mut needed = 0u64;
            for pair in 0..=i as u64 {
                let (x, n) = cantor_unpair(pair);
                for t in 1..40u64 {
                    if g3.inner_change_at(x, n, t) {
                        needed = needed.max(t);
                    }
                }
            }
            assert!(j >= needed, "chain {i}: head label {j} < needed {needed}");
            assert!(head >= needed, "chain {i}: head index {head} < needed {needed}");
        }
    }

    #[test]
    fn d_growth_iff_firing() {
        let g3 = g3_simple();
        let out = build_d3(&g3, &[], 50, true).unwrap();
        for (i, growth) in out.d_growth_stages.iter().enumerate() {
            let fired: Vec<u64> = out
                .firings
                .iter()
                .filter(|&&(_, s, _)| s == i as u64)
                .map(|&(_, _, stage)| stage)
                .collect();
            let dedup: Vec<u64> = {
                let mut v = fired.clone();
                v.dedup();
                v
            };
            assert_eq!(growth, &dedup, "chain {i}");
        }
    }

    #[test]
    fn decode_constant_everywhere() {
        let g3 = Approx3::new(
            vec![vec![ApproxRow::constant(9); 3]],
            vec![0],
        )
        .unwrap();
        let out = build_d3(&g3, &[], 20, true).unwrap();
        let (h, h_inv) = out.canonical_oracles(&g3);
        assert_eq!(decode_d3(&h, &h_inv, &g3, &out, 0).unwrap(), 9);
    }

    #[test]
    fn decode_with_canonical_iso() {
        let g3 = g3_simple();
        let out = build_d3(&g3, &[], 120, true).unwrap();
        let (h, h_inv) = out.canonical_oracles(&g3);
        for x in 0..2u64 {
            assert_eq!(
                decode_d3(&h, &h_inv, &g3, &out, x).unwrap(),
                g3.double_limit(x),
                "x={x}"
            );
        }
    }

    #[test]
    fn decode_for_every_consistent_assignment() {
        let g3 = g3_simple();
        let out = build_d3(&g3, &[], 60, true).unwrap();
        for x in 0..2u64 {
            for p1 in phase1_assignments(&out, &g3, x, 50) {
                let h_inv = |c: u64| p1.get(&c).copied();
                // The phase-1 result fixes the a-anchor budget; enumerate
                // phase-2 maps for the worst case ⟨x, max s⟩.
                let s_star = p1
                    .values()
                    .map(|&d| match out.label_a(d) {
                        Some((Family::D, s, _)) => s,
                        _ => unreachable!(),
                    })
                    .max()
                    .unwrap();
                let k = cantor_pair(x, s_star);
                for p2 in phase2_assignments(&out, k, 40) {
                    let h = |a: u64| p2.get(&a).copied();
                    assert_eq!(
                        decode_d3(&h, &h_inv, &g3, &out, x).unwrap(),
                        g3.double_limit(x),
                        "x={x}"
                    );
                }
            }
        }
    }

    #[test]
    fn decode_rejects_wrong_family() {
        let g3 = g3_simple();
        let out = build_d3(&g3, &[], 20, true).unwrap();
        let (h, _) = out.canonical_oracles(&g3);
        // h_inv sending a c-anchor into the a-family is not an isomorphism.
        let bad_inv = |_: u64| Some(out.a_anchors[0]);
        assert!(matches!(
            decode_d3(&h, &bad_inv, &g3, &out, 0),
            Err(D3Error::WrongFamily { .. })
        ));
    }
}
