//! Chain gluing: a pair of punctual structures whose isomorphisms encode the
//! limit of a scripted two-place approximation.
//!
//! A enumerates standard chains — chain i opens at stage i with base a_{i,0}
//! and extends rightward every stage (leftward too in the ζ variant). B opens
//! a new chain every stage, and whenever g*(x,s) ≠ g*(x,s−1) for the least
//! such x it glues chains x+1..s−1 onto chain x and re-bases chains x+1..s at
//! fresh elements, so every surviving chain beyond x owns only elements with
//! index ≥ s. The finitely many orbits of the opposite infinite type are
//! enumerated standardly from stage 0 in both structures.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::core::{EngineError, StructureLog, SymbolId};
use crate::injection::{decompose, match_candidates_capped, InjectionError};
use crate::oracles::Approx2;

const F: SymbolId = SymbolId(0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Type (i): infinitely many ω-chains carry the encoding; finitely many
    /// ζ-chains are fixed.
    Omega,
    /// Type (ii): infinitely many ζ-chains carry the encoding; finitely many
    /// ω-chains are fixed.
    Zeta,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum D2Error {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Injection(#[from] InjectionError),
    #[error("oracle undefined on anchor {0}")]
    OracleUndefined(u64),
    #[error("horizon must be ≥ 1")]
    HorizonTooSmall,
}

/// One gluing action: at `stage`, the least changed x.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GlueEvent {
    pub stage: u64,
    pub least_x: u64,
}

/// Build result: both logs plus the marker bookkeeping the verification
/// reads.
#[derive(Debug, Clone)]
pub struct BuildOutputD2 {
    pub variant: Variant,
    pub log_a: StructureLog,
    pub log_b: StructureLog,
    /// a_{i,0}: heads (ω variant) or designated base points (ζ variant) of
    /// A's encoding chains.
    pub a_anchors: Vec<u64>,
    /// Per encoding chain of B, its base history: (stage, base element) at
    /// creation and at every re-base.
    pub chain_bases: Vec<Vec<(u64, u64)>>,
    /// Left/right endpoint of every live chain of B at the horizon.
    pub final_markers: Vec<(u64, u64)>,
    pub glue_events: Vec<GlueEvent>,
    pub fixed_count: u64,
}

impl BuildOutputD2 {
    /// Current base element of B's chain i (fresh since the last re-base).
    pub fn chain_base(&self, i: u64) -> u64 {
        self.chain_bases[i as usize].last().expect("chains have a creation record").1
    }

    /// Stage of the last re-base (or creation) of B's chain i.
    pub fn last_rebase(&self, i: u64) -> u64 {
        self.chain_bases[i as usize].last().expect("nonempty").0
    }

    /// Canonical correspondence on the decode anchors: A's chain i to B's
    /// chain i. In the ω variant anchors map head-to-head; in the ζ variant
    /// they map onto the chain's current base.
    pub fn canonical_anchor_map(&self) -> BTreeMap<u64, u64> {
        let mut m = BTreeMap::new();
        for (i, &a) in self.a_anchors.iter().enumerate() {
            if i < self.final_markers.len() {
                let img = match self.variant {
                    Variant::Omega => self.final_markers[i].0,
                    Variant::Zeta => self.chain_base(i as u64),
                };
                m.insert(a, img);
            }
        }
        m
    }
}

// ---------------------------------------------------------------------------
// Builder
// ---------------------------------------------------------------------------

struct Side {
    rec: crate::core::StageRecorder,
    log: StructureLog,
}

impl Side {
    fn new() -> Self {
        Self { rec: crate::core::StageRecorder::new(), log: StructureLog::new(crate::core::Signature::injection(), 1) }
    }

    fn flush(&mut self) -> Result<(), EngineError> {
        let ev = self.rec.take_event();
        self.log.push(ev)
    }
}

#[derive(Debug, Clone, Copy)]
struct Chain {
    /// Current left end.
    left: u64,
    /// Current right end (f undefined there).
    tail: u64,
}

/// Fixed opposite-type chain: ω grows right; ζ grows on both ends.
#[derive(Debug, Clone, Copy)]
struct FixedChain {
    left: u64,
    tail: u64,
}

fn extend_fixed(side: &mut Side, chains: &mut [FixedChain], opposite_is_zeta: bool) {
    for c in chains.iter_mut() {
        let r = side.rec.fresh();
        side.rec.assign(F, c.tail, r);
        c.tail = r;
        if opposite_is_zeta {
            let l = side.rec.fresh();
            side.rec.assign(F, l, c.left);
            c.left = l;
        }
    }
}

/// Runs the Theorem-2.3 construction to the horizon.
pub fn build_d2(
    g2: &Approx2,
    variant: Variant,
    fixed_count: u64,
    horizon: u64,
) -> Result<BuildOutputD2, D2Error> {
    if horizon == 0 {
        return Err(D2Error::HorizonTooSmall);
    }
    let enc_is_zeta = matches!(variant, Variant::Zeta);

    // --- Structure A: standard chains. ---
    let mut a = Side::new();
    let mut a_chains: Vec<Chain> = Vec::new();
    let mut a_fixed: Vec<FixedChain> = Vec::new();
    let mut a_anchors: Vec<u64> = Vec::new();
    for s in 0..horizon {
        // Extend every existing encoding chain (right; plus left in ζ).
        for c in a_chains.iter_mut() {
            let r = a.rec.fresh();
            a.rec.assign(F, c.tail, r);
            c.tail = r;
            if enc_is_zeta {
                let l = a.rec.fresh();
                a.rec.assign(F, l, c.left);
                c.left = l;
            }
        }
        // Open chain s.
        let base = a.rec.fresh();
        a_chains.push(Chain { left: base, tail: base });
        a_anchors.push(base);
        // Fixed opposite-type chains, all opened at stage 0.
        if s == 0 {
            for _ in 0..fixed_count {
                let e = a.rec.fresh();
                a_fixed.push(FixedChain { left: e, tail: e });
            }
        } else {
            extend_fixed(&mut a, &mut a_fixed, !enc_is_zeta);
        }
        a.flush()?;
    }

    // --- Structure B: gluing. ---
    let mut b = Side::new();
    let mut b_chains: Vec<Chain> = Vec::new();
    let mut chain_bases: Vec<Vec<(u64, u64)>> = Vec::new();
    let mut b_fixed: Vec<FixedChain> = Vec::new();
    let mut glue_events: Vec<GlueEvent> = Vec::new();

    for s in 0..horizon {
        if s == 0 {
            let e = b.rec.fresh();
            b_chains.push(Chain { left: e, tail: e });
            chain_bases.push(vec![(0, e)]);
            for _ in 0..fixed_count {
                let e = b.rec.fresh();
                b_fixed.push(FixedChain { left: e, tail: e });
            }
            b.flush()?;
            continue;
        }

        let least_x = (0..s).find(|&x| g2.changed_at(x, s));
        // Tails that acquire f by gluing are excluded from the extension step.
        let mut glued_tails: Vec<u64> = Vec::new();

        if let Some(x) = least_x {
            glue_events.push(GlueEvent { stage: s, least_x: x });
            // Join chain j onto chain j-1 for x < j < s.
            for j in (x + 1)..s {
                let prev_tail = b_chains[j as usize - 1].tail;
                let left_j = b_chains[j as usize].left;
                b.rec.assign(F, prev_tail, left_j);
                glued_tails.push(prev_tail);
            }
            // Chain x inherits the merged content's right end.
            b_chains[x as usize].tail = b_chains[s as usize - 1].tail;
            // Fresh bases for chains x+1 ..= s.
            for j in (x + 1)..=s {
                let e = b.rec.fresh();
                let fresh = Chain { left: e, tail: e };
                if (j as usize) < b_chains.len() {
                    b_chains[j as usize] = fresh;
                    chain_bases[j as usize].push((s, e));
                } else {
                    b_chains.push(fresh);
                    chain_bases.push(vec![(s, e)]);
                }
            }
        } else {
            let e = b.rec.fresh();
            b_chains.push(Chain { left: e, tail: e });
            chain_bases.push(vec![(s, e)]);
        }

        // Right extension: every tail from stage s-1 that was not glued gets
        // its f-value now. Fresh bases created this stage wait one stage.
        for c in b_chains.iter_mut() {
            let tail = c.tail;
            if glued_tails.contains(&tail) {
                continue;
            }
            if b.log.apply(F, tail).is_some() {
                continue;
            }
            // Bases created this very stage are extended next stage.
            if chain_bases.iter().any(|h| h.last().map(|&(st, e)| st == s && e == tail).unwrap_or(false)) {
                continue;
            }
            let r = b.rec.fresh();
            b.rec.assign(F, tail, r);
            c.tail = r;
        }

        // ζ variant: every live chain also grows leftward each stage.
        if enc_is_zeta {
            for c in b_chains.iter_mut() {
                let l = b.rec.fresh();
                b.rec.assign(F, l, c.left);
                c.left = l;
            }
        }

        extend_fixed(&mut b, &mut b_fixed, !enc_is_zeta);
        b.flush()?;
    }

    Ok(BuildOutputD2 {
        variant,
        log_a: a.log,
        log_b: b.log,
        a_anchors,
        chain_bases,
        final_markers: b_chains.iter().map(|c| (c.left, c.tail)).collect(),
        glue_events,
        fixed_count,
    })
}

// ---------------------------------------------------------------------------
// Decoder
// ---------------------------------------------------------------------------

/// Ψ^h: g*(x, max{h(a_{i,0}) | i ≤ x+1}), which equals the declared limit for
/// any orbit-respecting h once the schedule has run out.
pub fn decode_d2(
    h: &dyn Fn(u64) -> Option<u64>,
    g2: &Approx2,
    out: &BuildOutputD2,
    x: u64,
) -> Result<u64, D2Error> {
    let mut bound = 0u64;
    for i in 0..=(x + 1) {
        let anchor = out.a_anchors[i as usize];
        let img = h(anchor).ok_or(D2Error::OracleUndefined(anchor))?;
        bound = bound.max(img);
    }
    Ok(g2.eval(x, bound))
}

/// Character-respecting anchor assignments for the brute-force soundness
/// check, enumerated deterministically up to `cap`.
pub fn anchor_assignments(
    out: &BuildOutputD2,
    x: u64,
    cap: usize,
) -> Result<Vec<BTreeMap<u64, u64>>, D2Error> {
    let ta = out.log_a.full_truncation();
    let tb = out.log_b.full_truncation();
    let anchors: Vec<u64> = out.a_anchors[..=(x as usize + 1)].to_vec();
    Ok(match_candidates_capped(&ta, &tb, &anchors, cap)?)
}

// ---------------------------------------------------------------------------
// Invariant checks (used by verify and the acceptance suite)
// ---------------------------------------------------------------------------

/// Endpoint stabilization, verified against the schedule exactly: chain i of
/// B is never re-based after the last scheduled mind change of any x < i.
/// In the ω variant this pins the left marker; in the ζ variant the base.
pub fn endpoint_stabilization_holds(out: &BuildOutputD2, g2: &Approx2) -> bool {
    out.chain_bases.iter().enumerate().all(|(i, history)| {
        let last_change = g2.last_change_below(i as u64);
        history.iter().skip(1).all(|&(stage, _)| stage <= last_change)
    })
}

/// Head-index encoding: the stabilized base of chain i has element index at
/// least the last mind-change stage of every x < i.
pub fn head_index_encoding_holds(out: &BuildOutputD2, g2: &Approx2, upto_chain: u64) -> bool {
    (0..upto_chain.min(out.chain_bases.len() as u64)).all(|i| {
        out.chain_base(i) >= g2.last_change_below(i)
    })
}

/// Chain count: at the end of stage s the truncation has exactly
/// s+1 + fixed_count open segments (every glued-away chain is replaced by a
/// fresh base within the same stage).
pub fn chain_count_holds(out: &BuildOutputD2, sample_stages: &[u64]) -> Result<bool, D2Error> {
    for &s in sample_stages {
        let d = decompose(&out.log_b.truncation(s + 1))?;
        if d.segments.len() as u64 != s + 1 + out.fixed_count {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Live bases of B's encoding chains at the end of stage `s`.
fn bases_at(out: &BuildOutputD2, s: u64) -> Vec<u64> {
    out.chain_bases
        .iter()
        .filter_map(|history| {
            history.iter().rev().find(|&&(stage, _)| stage <= s).map(|&(_, e)| e)
        })
        .collect()
}

/// ζ variant: between consecutive stages every persisting open segment of the
/// encoding family grows on both ends (no element of the family stays a head
/// permanently). The fixed opposite-type chains grow rightward only and are
/// exempt.
pub fn both_ends_growth_holds(out: &BuildOutputD2, sample_stages: &[u64]) -> Result<bool, D2Error> {
    for &s in sample_stages {
        let before = decompose(&out.log_b.truncation(s + 1))?;
        let after = decompose(&out.log_b.truncation(s + 2))?;
        let bases = bases_at(out, s);
        for seg in &before.segments {
            if !seg.iter().any(|m| bases.contains(m)) {
                continue; // a fixed opposite-type chain
            }
            let head = seg[0];
            let tail = *seg.last().expect("nonempty segment");
            // Find the segment containing this head afterwards (it may have
            // been merged; both cases must demote head and tail).
            let Some(seg_after) = after.segments.iter().find(|sa| sa.contains(&head)) else {
                return Ok(false); // heads never enter cycles here
            };
            if seg_after[0] == head || *seg_after.last().unwrap() == tail {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
