//! Delayed finite orbits: a pair of punctual structures whose isomorphisms
//! encode a clocked total function.
//!
//! Structure A carries one ω-chain and reveals finite orbits of strictly
//! increasing sizes promptly, orbit x at stage G(x) = x+1. Structure B is
//! isomorphic but enumerates its x-th finite orbit only once g(x) has
//! converged *and* A has revealed orbit x+1; the ω-chain absorbs all waiting,
//! so both logs stay punctual at lag 1. Computing any orbit-respecting
//! isomorphism on the first x+1 orbits of A then yields an index large enough
//! to read off both g(x) and G(x+1).

use std::collections::BTreeMap;

use thiserror::Error;

use crate::core::{
    run_to_horizon, EngineError, EnumEvent, Signature, StageMachine, StageRecorder, StructureLog,
};
use crate::injection::{decompose, emit_cycle, match_candidates_capped, InjectionError};
use crate::oracles::{eval_clocked, ClockedFn};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum D1Error {
    #[error("horizon {0} too small to reveal orbit 0 (need ≥ 2)")]
    HorizonTooSmall(u64),
    #[error("sizes must be strictly increasing and ≥ 2")]
    BadSizes,
    #[error("oracle undefined on element {0}")]
    OracleUndefined(u64),
    #[error("oracle image bound {bound} too small: {missing} not recovered (h does not restrict an isomorphism)")]
    BoundTooSmall { bound: u64, missing: &'static str },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Injection(#[from] InjectionError),
}

/// Finite-orbit sizes: either the default x ↦ x+2 or an explicit list.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SizeSeq {
    Default,
    Explicit(Vec<usize>),
}

impl SizeSeq {
    pub fn size(&self, x: u64) -> Option<usize> {
        match self {
            SizeSeq::Default => Some(x as usize + 2),
            SizeSeq::Explicit(v) => v.get(x as usize).copied(),
        }
    }

    fn validate(&self, horizon: u64) -> Result<(), D1Error> {
        if let SizeSeq::Explicit(v) = self {
            if (v.len() as u64) < horizon {
                return Err(D1Error::BadSizes);
            }
            for w in v.windows(2) {
                if w[1] <= w[0] {
                    return Err(D1Error::BadSizes);
                }
            }
            if v.first().is_some_and(|&s| s < 2) {
                return Err(D1Error::BadSizes);
            }
        }
        Ok(())
    }
}

/// Pair of logs plus the construction metadata the decoders and tests read.
#[derive(Debug, Clone)]
pub struct BuildOutputD1 {
    pub log_a: StructureLog,
    pub log_b: StructureLog,
    /// G(x): stage at which A enumerates the x-th finite orbit.
    pub g_stages: Vec<u64>,
    /// Stage at which B enumerated its x-th finite orbit (for revealed x).
    pub b_stages: Vec<u64>,
    /// Members of A's x-th finite orbit, in cycle order.
    pub orbits_a: Vec<Vec<u64>>,
    /// Members of B's x-th finite orbit, in cycle order.
    pub orbits_b: Vec<Vec<u64>>,
    /// A's ω-chain in order (head first), and B's.
    pub chain_a: Vec<u64>,
    pub chain_b: Vec<u64>,
}

impl BuildOutputD1 {
    /// The canonical chain/orbit correspondence A → B, defined wherever B has
    /// already revealed the matching orbit.
    pub fn canonical_iso(&self) -> impl Fn(u64) -> Option<u64> + '_ {
        let mut map = BTreeMap::new();
        for (pos, &a) in self.chain_a.iter().enumerate() {
            if let Some(&b) = self.chain_b.get(pos) {
                map.insert(a, b);
            }
        }
        for (x, orbit_a) in self.orbits_a.iter().enumerate() {
            if let Some(orbit_b) = self.orbits_b.get(x) {
                for (i, &a) in orbit_a.iter().enumerate() {
                    map.insert(a, orbit_b[i]);
                }
            }
        }
        move |a| map.get(&a).copied()
    }
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

struct MachineA {
    sizes: SizeSeq,
    horizon: u64,
    rec: StageRecorder,
    tail: Option<u64>,
    chain: Vec<u64>,
    orbits: Vec<Vec<u64>>,
    g_stages: Vec<u64>,
}

impl StageMachine for MachineA {
    fn signature(&self) -> Signature {
        Signature::injection()
    }
    fn stage(&self) -> u64 {
        self.rec.stage()
    }
    fn horizon(&self) -> u64 {
        self.horizon
    }
    fn emit(&mut self) -> Result<EnumEvent, EngineError> {
        let s = self.rec.stage();
        let e = self.rec.fresh();
        if let Some(t) = self.tail {
            self.rec.assign(crate::core::SymbolId(0), t, e);
        }
        self.tail = Some(e);
        self.chain.push(e);
        if s >= 1 {
            // Reveal orbit x = s-1: prompt, G strictly increasing.
            let x = s - 1;
            let size = self.sizes.size(x).expect("validated");
            self.orbits.push(emit_cycle(&mut self.rec, size));
            self.g_stages.push(s);
        }
        Ok(self.rec.take_event())
    }
}

struct MachineB {
    g: ClockedFn,
    sizes: SizeSeq,
    horizon: u64,
    rec: StageRecorder,
    tail: Option<u64>,
    chain: Vec<u64>,
    orbits: Vec<Vec<u64>>,
    b_stages: Vec<u64>,
}

impl MachineB {
    /// G(x+1) = x+2 under A's prompt schedule.
    fn ready(&self, x: u64, stage: u64) -> bool {
        stage >= x + 2 && eval_clocked(&self.g, x, stage).is_some()
    }
}

impl StageMachine for MachineB {
    fn signature(&self) -> Signature {
        Signature::injection()
    }
    fn stage(&self) -> u64 {
        self.rec.stage()
    }
    fn horizon(&self) -> u64 {
        self.horizon
    }
    fn emit(&mut self) -> Result<EnumEvent, EngineError> {
        let s = self.rec.stage();
        let e = self.rec.fresh();
        if let Some(t) = self.tail {
            self.rec.assign(crate::core::SymbolId(0), t, e);
        }
        self.tail = Some(e);
        self.chain.push(e);
        // One orbit per stage, in order, delayed past convergence and past
        // A's reveal of the next orbit.
        let x = self.orbits.len() as u64;
        if s >= 1 && self.ready(x, s) && self.b_stages.last().map_or(true, |&p| p < s) {
            let size = self.sizes.size(x).expect("validated");
            self.orbits.push(emit_cycle(&mut self.rec, size));
            self.b_stages.push(s);
        }
        Ok(self.rec.take_event())
    }
}

/// Builds the pair (A, B) to the horizon.
pub fn build_d1(g: &ClockedFn, sizes: &SizeSeq, horizon: u64) -> Result<BuildOutputD1, D1Error> {
    if horizon < 2 {
        return Err(D1Error::HorizonTooSmall(horizon));
    }
    sizes.validate(horizon)?;
    let mut a = MachineA {
        sizes: sizes.clone(),
        horizon,
        rec: StageRecorder::new(),
        tail: None,
        chain: Vec::new(),
        orbits: Vec::new(),
        g_stages: Vec::new(),
    };
    let log_a = run_to_horizon(&mut a, 1)?;
    let mut b = MachineB {
        g: g.clone(),
        sizes: sizes.clone(),
        horizon,
        rec: StageRecorder::new(),
        tail: None,
        chain: Vec::new(),
        orbits: Vec::new(),
        b_stages: Vec::new(),
    };
    let log_b = run_to_horizon(&mut b, 1)?;
    Ok(BuildOutputD1 {
        log_a,
        log_b,
        g_stages: a.g_stages,
        b_stages: b.b_stages,
        orbits_a: a.orbits,
        orbits_b: b.orbits,
        chain_a: a.chain,
        chain_b: b.chain,
    })
}

// ---------------------------------------------------------------------------
// Decoder
// ---------------------------------------------------------------------------

/// Recovers the members of A's finite orbits 0..=x by scanning the log: a
/// finite orbit is any event-local closed cycle.
fn orbits_of_a(log_a: &StructureLog, upto_stage: u64) -> Vec<(u64, Vec<u64>)> {
    let mut out = Vec::new();
    for ev in log_a.events() {
        if ev.stage > upto_stage {
            break;
        }
        // Members of a cycle revealed in this event: new elements whose
        // f-assignment lands inside the event and closes.
        let new: Vec<u64> = ev.new_elements.clone();
        if new.is_empty() {
            continue;
        }
        let targets: BTreeMap<u64, u64> =
            ev.assignments.iter().map(|a| (a.source, a.target)).collect();
        let mut seen = std::collections::BTreeSet::new();
        for &start in &new {
            if seen.contains(&start) || !targets.contains_key(&start) {
                continue;
            }
            let mut cyc = vec![start];
            let mut cur = start;
            let closed = loop {
                match targets.get(&cur) {
                    Some(&next) if next == start => break true,
                    Some(&next) if new.contains(&next) && !cyc.contains(&next) => {
                        cyc.push(next);
                        cur = next;
                    }
                    _ => break false,
                }
            };
            if closed {
                for &m in &cyc {
                    seen.insert(m);
                }
                out.push((ev.stage, cyc));
            }
        }
    }
    out
}

/// Ψ^h: returns (g(x), G(x+1)).
///
/// From G(0) (the non-uniform base) the orbit members of A are recovered
/// stage by stage; applying `h` to every member of orbits 0..=x yields a
/// maximal image index which — because B delays orbit x past both deadlines —
/// bounds a stage at which g(x) has converged and A has revealed orbit x+1.
pub fn decode_d1(
    log_a: &StructureLog,
    h: &dyn Fn(u64) -> Option<u64>,
    g: &ClockedFn,
    x: u64,
    g0: u64,
) -> Result<(u64, u64), D1Error> {
    let mut bound = g0;
    let mut value = None;
    for j in 0..=x {
        // Orbits revealed by A up to the current bound.
        let known = orbits_of_a(log_a, bound);
        if (known.len() as u64) <= j {
            return Err(D1Error::BoundTooSmall { bound, missing: "next orbit of A" });
        }
        let mut max_img = 0u64;
        for (_, members) in known.iter().take(j as usize + 1) {
            for &m in members {
                let img = h(m).ok_or(D1Error::OracleUndefined(m))?;
                max_img = max_img.max(img);
            }
        }
        bound = max_img;
        if j == x {
            // The image bound must cover both the convergence of g(x) and
            // A's reveal of orbit x+1.
            value = eval_clocked(g, x, bound);
        }
    }
    let known = orbits_of_a(log_a, bound);
    if (known.len() as u64) <= x + 1 {
        return Err(D1Error::BoundTooSmall { bound, missing: "orbit x+1 of A" });
    }
    let g_stage = known[x as usize + 1].0;
    let value = value.ok_or(D1Error::BoundTooSmall { bound, missing: "convergence of g(x)" })?;
    Ok((value, g_stage))
}

/// Anchor maps for the brute-force soundness check: every character-
/// respecting assignment of the members of A's orbits 0..=x, enumerated in a
/// fixed order up to `cap`.
pub fn anchor_assignments(
    out: &BuildOutputD1,
    x: u64,
    cap: usize,
) -> Result<Vec<BTreeMap<u64, u64>>, D1Error> {
    let ta = out.log_a.full_truncation();
    let tb = out.log_b.full_truncation();
    let anchors: Vec<u64> =
        out.orbits_a.iter().take(x as usize + 1).flatten().copied().collect();
    decompose(&tb)?; // surface non-injective corruption early
    Ok(match_candidates_capped(&ta, &tb, &anchors, cap)?)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::check_punctuality;
    use crate::injection::character;

    fn instant_g(len: usize) -> ClockedFn {
        ClockedFn { values: (0..len as u64).map(|x| x * x + 1).collect(), convergence: vec![0; len] }
    }

    #[test]
    fn horizon_too_small_rejected() {
        assert_eq!(
            build_d1(&instant_g(4), &SizeSeq::Default, 1).unwrap_err(),
            D1Error::HorizonTooSmall(1)
        );
    }

    #[test]
    fn instant_convergence_keeps_b_on_a_heels() {
        let out = build_d1(&instant_g(40), &SizeSeq::Default, 40).unwrap();
        assert!(check_punctuality(&out.log_a).passes());
        assert!(check_punctuality(&out.log_b).passes());
        // B's orbit x appears within lag of A's orbit x+1.
        for (x, &bs) in out.b_stages.iter().enumerate() {
            let ga_next = out.g_stages[x + 1];
            assert!(bs >= ga_next, "delay invariant at {x}");
            assert!(bs <= ga_next + 1, "no g-delay, so B follows within lag");
        }
    }

    #[test]
    fn delay_respects_convergence_schedule() {
        // g(0) = 9 with convergence stage 4.
        let g = ClockedFn { values: vec![9, 2, 2, 2], convergence: vec![4, 0, 0, 0] };
        let out = build_d1(&g, &SizeSeq::Default, 20).unwrap();
        assert!(out.b_stages[0] >= 4.max(out.g_stages[1]));
        // Delay invariant for every revealed orbit.
        for (x, &bs) in out.b_stages.iter().enumerate() {
            assert!(bs >= g.convergence_stage(x as u64).max(out.g_stages[x + 1]));
        }
    }

    #[test]
    fn characters_differ_only_in_open_segment_and_pending_orbits() {
        let g = ClockedFn { values: vec![1; 20], convergence: vec![3; 20] };
        let out = build_d1(&g, &SizeSeq::Default, 25).unwrap();
        let ca = character(&decompose(&out.log_a.full_truncation()).unwrap());
        let cb = character(&decompose(&out.log_b.full_truncation()).unwrap());
        assert_eq!(ca.segment_lengths.len(), 1);
        assert_eq!(cb.segment_lengths.len(), 1);
        // B's cycles are a prefix of A's (delayed reveals), same sizes.
        let a_sizes: Vec<usize> = ca.cycle_sizes.keys().copied().collect();
        let b_sizes: Vec<usize> = cb.cycle_sizes.keys().copied().collect();
        assert_eq!(&a_sizes[..b_sizes.len()], &b_sizes[..]);
        assert!(a_sizes.len() - b_sizes.len() <= 3);
    }

    #[test]
    fn monotone_g_table() {
        let out = build_d1(&instant_g(30), &SizeSeq::Default, 30).unwrap();
        for w in out.g_stages.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn decode_with_canonical_iso() {
        let g = ClockedFn {
            values: vec![5, 0, 7, 3, 9, 1, 1, 2, 8, 4],
            convergence: vec![0, 6, 2, 11, 0, 3, 9, 0, 1, 7],
        };
        let out = build_d1(&g, &SizeSeq::Default, 40).unwrap();
        let h = out.canonical_iso();
        for x in 0..10u64 {
            let (gx, g_next) = decode_d1(&out.log_a, &h, &g, x, out.g_stages[0]).unwrap();
            assert_eq!(gx, g.value(x), "g({x})");
            assert_eq!(g_next, out.g_stages[x as usize + 1], "G({})", x + 1);
        }
    }

    #[test]
    fn decode_for_every_anchor_assignment() {
        let g = ClockedFn { values: vec![5, 0, 7, 3], convergence: vec![2, 5, 1, 4] };
        let out = build_d1(&g, &SizeSeq::Default, 16).unwrap();
        for x in 0..3u64 {
            let assignments = anchor_assignments(&out, x, 10_000).unwrap();
            assert!(!assignments.is_empty());
            for m in &assignments {
                let h = |a: u64| m.get(&a).copied();
                let (gx, g_next) = decode_d1(&out.log_a, &h, &g, x, out.g_stages[0]).unwrap();
                assert_eq!(gx, g.value(x));
                assert_eq!(g_next, out.g_stages[x as usize + 1]);
            }
        }
    }

    #[test]
    fn decoder_soundness_bound() {
        // For every candidate on the first x+2 orbit anchor sets, the max
        // image index covers both deadlines.
        let g = ClockedFn { values: vec![1, 2, 3], convergence: vec![4, 7, 0] };
        let out = build_d1(&g, &SizeSeq::Default, 18).unwrap();
        for x in 0..2u64 {
            let assignments = anchor_assignments(&out, x + 1, 10_000).unwrap();
            for m in &assignments {
                let max_img = m.values().copied().max().unwrap();
                assert!(max_img >= g.convergence_stage(x).max(out.g_stages[x as usize + 1]));
            }
        }
    }

    #[test]
    fn decode_detects_bad_oracle() {
        let g = instant_g(6);
        let out = build_d1(&g, &SizeSeq::Default, 12).unwrap();
        // An "isomorphism" squashing everything to element 0 cannot reveal
        // the next orbit.
        let bad = |_: u64| Some(0);
        assert!(matches!(
            decode_d1(&out.log_a, &bad, &g, 1, out.g_stages[0]),
            Err(D1Error::BoundTooSmall { .. })
        ));
    }
}
