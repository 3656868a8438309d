//! Injection-structure algebra.
//!
//! An injection structure has one unary injective function; every orbit of a
//! finite truncation is either a closed cycle or an open segment (a maximal
//! f-path). This module decomposes truncations, forgets them into characters,
//! punctualizes computable injection structures, and provides the brute-force
//! partial-isomorphism oracle used as the independent test oracle behind every
//! pigeonhole step in the decoders.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::core::{
    EngineError, EnumEvent, Signature, StageMachine, StageRecorder, StructureLog, SymbolId,
    Truncation,
};

// ---------------------------------------------------------------------------
// Orbit decomposition
// ---------------------------------------------------------------------------

/// Cycles and segments of a truncation. Together they partition the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitDecomp {
    /// (size, members in f-order starting from the least member).
    pub cycles: Vec<(usize, Vec<u64>)>,
    /// Maximal open f-paths, head (no preimage) to tail (no image).
    pub segments: Vec<Vec<u64>>,
}

/// Size multisets of a decomposition, identities forgotten.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Character {
    pub cycle_sizes: BTreeMap<usize, usize>,
    pub segment_lengths: BTreeMap<usize, usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InjectionError {
    #[error("not injective: {a} and {b} share the target {target}")]
    NotInjective { a: u64, b: u64, target: u64 },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("at least one infinite orbit is required (N0=N1=0)")]
    NoInfiniteOrbit,
    #[error("reveal stages must be strictly increasing and sizes positive")]
    BadSchedule,
}

/// Decomposes a single-map truncation into cycles and open segments.
/// Injectivity is checked first.
pub fn decompose(t: &Truncation) -> Result<OrbitDecomp, InjectionError> {
    let map = t.sole_map()?;
    let n = map.len();

    let mut preimage: Vec<Option<u64>> = vec![None; n];
    for (src, tgt) in map.iter().enumerate() {
        if let Some(tgt) = tgt {
            if let Some(prev) = preimage[*tgt as usize] {
                return Err(InjectionError::NotInjective {
                    a: prev,
                    b: src as u64,
                    target: *tgt,
                });
            }
            preimage[*tgt as usize] = Some(src as u64);
        }
    }

    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    let mut segments = Vec::new();

    // Cycles: walk forward from each unseen element; if the walk returns to
    // its origin the orbit is closed.
    for start in 0..n as u64 {
        if seen[start as usize] {
            continue;
        }
        let mut cur = start;
        let mut path = vec![start];
        let closed = loop {
            match map[cur as usize] {
                Some(next) if next == start => break true,
                Some(next) => {
                    if next < start && seen[next as usize] {
                        // Joins an already-classified orbit; not a new cycle.
                        break false;
                    }
                    if path.contains(&next) {
                        // Closed, but not through `start`: impossible under
                        // injectivity, so `start` feeds into a cycle.
                        break false;
                    }
                    path.push(next);
                    cur = next;
                }
                None => break false,
            }
        };
        if closed {
            for &m in &path {
                seen[m as usize] = true;
            }
            cycles.push((path.len(), path));
        }
    }

    // Segments: start from each head (no preimage, not in a cycle) and walk
    // to the tail.
    for head in 0..n as u64 {
        if seen[head as usize] || preimage[head as usize].is_some() {
            continue;
        }
        let mut seg = vec![head];
        seen[head as usize] = true;
        let mut cur = head;
        while let Some(next) = map[cur as usize] {
            seg.push(next);
            seen[next as usize] = true;
            cur = next;
        }
        segments.push(seg);
    }

    debug_assert!(seen.iter().all(|&s| s), "cycles and segments partition the domain");
    cycles.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    segments.sort();
    Ok(OrbitDecomp { cycles, segments })
}

/// Forgets member identities, keeping the size multisets.
pub fn character(d: &OrbitDecomp) -> Character {
    let mut c = Character::default();
    for (size, _) in &d.cycles {
        *c.cycle_sizes.entry(*size).or_insert(0) += 1;
    }
    for seg in &d.segments {
        *c.segment_lengths.entry(seg.len()).or_insert(0) += 1;
    }
    c
}

// ---------------------------------------------------------------------------
// Punctualization (one infinite orbit suffices)
// ---------------------------------------------------------------------------

/// Orbit content of a computable injection structure: number of ω-chains,
/// number of ζ-chains, and the stages at which finite orbit sizes are
/// revealed.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct InjSpec {
    pub omega_chains: Count,
    pub zeta_chains: Count,
    /// (cycle size, reveal stage), reveal stages strictly increasing.
    pub finite_orbits: Vec<(usize, u64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(untagged)]
pub enum Count {
    Finite(u64),
    #[serde(rename = "infinite")]
    Infinite(Infinite),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Infinite {
    #[serde(rename = "infinite")]
    Infinite,
}

impl Count {
    pub fn infinite() -> Self {
        Count::Infinite(Infinite::Infinite)
    }

    /// min(bound, count).
    pub fn min_with(&self, bound: u64) -> u64 {
        match self {
            Count::Finite(n) => bound.min(*n),
            Count::Infinite(_) => bound,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Count::Finite(0))
    }
}

impl InjSpec {
    pub fn validate(&self) -> Result<(), InjectionError> {
        if self.omega_chains.is_zero() && self.zeta_chains.is_zero() {
            return Err(InjectionError::NoInfiniteOrbit);
        }
        let mut prev = None;
        for &(size, stage) in &self.finite_orbits {
            if size == 0 || prev.map_or(false, |p| stage <= p) {
                return Err(InjectionError::BadSchedule);
            }
            prev = Some(stage);
        }
        Ok(())
    }
}

/// Stage machine realizing the punctual presentation: at stage s it extends
/// min(s+1, N0) ω-chains and min(s+1, N1) ζ-chains (the paper counts stages
/// from 1) and enumerates each scheduled finite cycle at its reveal stage.
pub struct Punctualizer {
    spec: InjSpec,
    horizon: u64,
    rec: StageRecorder,
    /// Tail of each live ω-chain (f still unassigned there).
    omega_tails: Vec<u64>,
    /// (left end, tail, extension count) of each live ζ-chain.
    zeta_chains: Vec<(u64, u64, u64)>,
    next_orbit: usize,
}

const F: SymbolId = SymbolId(0);

impl Punctualizer {
    pub fn new(spec: InjSpec, horizon: u64) -> Result<Self, InjectionError> {
        spec.validate()?;
        Ok(Self {
            spec,
            horizon,
            rec: StageRecorder::new(),
            omega_tails: Vec::new(),
            zeta_chains: Vec::new(),
            next_orbit: 0,
        })
    }
}

impl StageMachine for Punctualizer {
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
        let n0 = self.spec.omega_chains.min_with(s + 1);
        let n1 = self.spec.zeta_chains.min_with(s + 1);

        // ω-chains: extend every live chain by one, then open new ones.
        for i in 0..self.omega_tails.len() {
            let e = self.rec.fresh();
            self.rec.assign(F, self.omega_tails[i], e);
            self.omega_tails[i] = e;
        }
        while (self.omega_tails.len() as u64) < n0 {
            self.omega_tails.push(self.rec.fresh());
        }

        // ζ-chains: the right end extends every stage (keeping lag 1) and the
        // left end every second extension, so both ends grow unboundedly.
        for i in 0..self.zeta_chains.len() {
            let (left, tail, extensions) = self.zeta_chains[i];
            let right = self.rec.fresh();
            self.rec.assign(F, tail, right);
            let new_left = if extensions % 2 == 1 {
                let e = self.rec.fresh();
                self.rec.assign(F, e, left);
                e
            } else {
                left
            };
            self.zeta_chains[i] = (new_left, right, extensions + 1);
        }
        while (self.zeta_chains.len() as u64) < n1 {
            let e = self.rec.fresh();
            self.zeta_chains.push((e, e, 0));
        }

        // Scheduled finite orbits close within their own event.
        while let Some(&(size, reveal)) = self.spec.finite_orbits.get(self.next_orbit) {
            if reveal != s {
                break;
            }
            emit_cycle(&mut self.rec, size);
            self.next_orbit += 1;
        }

        Ok(self.rec.take_event())
    }
}

/// Enumerates a closed k-cycle into the current stage; returns its members.
pub(crate) fn emit_cycle(rec: &mut StageRecorder, size: usize) -> Vec<u64> {
    let members: Vec<u64> = (0..size).map(|_| rec.fresh()).collect();
    for i in 0..size {
        rec.assign(F, members[i], members[(i + 1) % size]);
    }
    members
}

/// Builds the punctual presentation up to the horizon.
pub fn punctualize(spec: &InjSpec, horizon: u64) -> Result<StructureLog, InjectionError> {
    let mut machine = Punctualizer::new(spec.clone(), horizon)?;
    Ok(crate::core::run_to_horizon(&mut machine, 1)?)
}

// ---------------------------------------------------------------------------
// Brute-force partial-isomorphism oracle
// ---------------------------------------------------------------------------

/// Where an element sits inside its decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Position {
    /// (cycle index, offset within the stored member order).
    Cycle(usize, usize),
    /// (segment index, distance from the head).
    Segment(usize, usize),
}

fn locate(d: &OrbitDecomp) -> BTreeMap<u64, Position> {
    let mut at = BTreeMap::new();
    for (ci, (_, members)) in d.cycles.iter().enumerate() {
        for (off, &m) in members.iter().enumerate() {
            at.insert(m, Position::Cycle(ci, off));
        }
    }
    for (si, seg) in d.segments.iter().enumerate() {
        for (off, &m) in seg.iter().enumerate() {
            at.insert(m, Position::Segment(si, off));
        }
    }
    at
}

/// Every injective map on `anchors` that extends to a character-respecting
/// correspondence: anchor orbits go to distinct orbits of the other side,
/// cycles to cycles of equal size (with a rotation choice), segment members to
/// segment members at the same distance from the head.
///
/// This is a test oracle, not a production matcher: anchors should stay small
/// (≤ 12) and domains modest (≤ 20 000).
pub fn match_candidates(
    a: &Truncation,
    b: &Truncation,
    anchors: &[u64],
) -> Result<Vec<BTreeMap<u64, u64>>, InjectionError> {
    match_candidates_capped(a, b, anchors, usize::MAX)
}

/// As [`match_candidates`], enumerating at most `cap` mappings in a fixed
/// deterministic order.
pub fn match_candidates_capped(
    a: &Truncation,
    b: &Truncation,
    anchors: &[u64],
    cap: usize,
) -> Result<Vec<BTreeMap<u64, u64>>, InjectionError> {
    let da = decompose(a)?;
    let db = decompose(b)?;
    let pos_a = locate(&da);

    // Group anchors by source orbit; each group is assigned one target orbit
    // (and one rotation, for cycles).
    let mut cycle_groups: BTreeMap<usize, Vec<(u64, usize)>> = BTreeMap::new();
    let mut segment_groups: BTreeMap<usize, Vec<(u64, usize)>> = BTreeMap::new();
    for &anchor in anchors {
        match pos_a.get(&anchor) {
            Some(Position::Cycle(ci, off)) => {
                cycle_groups.entry(*ci).or_default().push((anchor, *off));
            }
            Some(Position::Segment(si, off)) => {
                segment_groups.entry(*si).or_default().push((anchor, *off));
            }
            None => return Ok(Vec::new()), // anchor outside the truncation
        }
    }

    // Candidate target orbits per group: (target orbit id, rotation), with
    // rotation fixed at 0 for segments.
    struct Group {
        anchors: Vec<(u64, usize)>,
        options: Vec<(usize, usize)>,
        is_cycle: bool,
    }

    let mut groups: Vec<Group> = Vec::new();
    for (ci, anchors_in) in cycle_groups {
        let size = da.cycles[ci].0;
        let mut options = Vec::new();
        for (ti, (tsize, _)) in db.cycles.iter().enumerate() {
            if *tsize == size {
                for rot in 0..size {
                    options.push((ti, rot));
                }
            }
        }
        groups.push(Group { anchors: anchors_in, options, is_cycle: true });
    }
    for anchors_in in segment_groups.into_values() {
        let max_off = anchors_in.iter().map(|&(_, off)| off).max().unwrap_or(0);
        let mut options = Vec::new();
        for (ti, seg) in db.segments.iter().enumerate() {
            if seg.len() > max_off {
                options.push((ti, 0));
            }
        }
        groups.push(Group { anchors: anchors_in, options, is_cycle: false });
    }

    // Depth-first product over group options; target orbits of the same kind
    // stay distinct so the mapping extends to an orbit correspondence.
    fn search(
        groups: &[Group],
        db: &OrbitDecomp,
        depth: usize,
        picked: &mut Vec<(bool, usize, usize)>,
        out: &mut Vec<BTreeMap<u64, u64>>,
        cap: usize,
    ) {
        if out.len() >= cap {
            return;
        }
        if depth == groups.len() {
            let mut m = BTreeMap::new();
            for (g, &(_, ti, rot)) in groups.iter().zip(picked.iter()) {
                for &(anchor, off) in &g.anchors {
                    let img = if g.is_cycle {
                        let members = &db.cycles[ti].1;
                        members[(off + rot) % members.len()]
                    } else {
                        db.segments[ti][off]
                    };
                    m.insert(anchor, img);
                }
            }
            out.push(m);
            return;
        }
        let g = &groups[depth];
        for &(ti, rot) in &g.options {
            if picked.iter().any(|&(kind, tj, _)| kind == g.is_cycle && tj == ti) {
                continue;
            }
            picked.push((g.is_cycle, ti, rot));
            search(groups, db, depth + 1, picked, out, cap);
            picked.pop();
            if out.len() >= cap {
                return;
            }
        }
    }

    let mut out = Vec::new();
    let mut picked = Vec::new();
    search(&groups, &db, 0, &mut picked, &mut out, cap);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::check_punctuality;

    fn trunc(domain: u64, edges: &[(u64, u64)]) -> Truncation {
        let mut map = vec![None; domain as usize];
        for &(a, b) in edges {
            map[a as usize] = Some(b);
        }
        Truncation::from_parts(Signature::injection(), domain, vec![map]).unwrap()
    }

    #[test]
    fn decompose_cycle_and_segment() {
        let t = trunc(5, &[(0, 1), (1, 2), (2, 0), (3, 4)]);
        let d = decompose(&t).unwrap();
        assert_eq!(d.cycles, vec![(3, vec![0, 1, 2])]);
        assert_eq!(d.segments, vec![vec![3, 4]]);
    }

    #[test]
    fn decompose_fixed_point_and_isolated() {
        let d = decompose(&trunc(1, &[(0, 0)])).unwrap();
        assert_eq!(d.cycles, vec![(1, vec![0])]);
        assert!(d.segments.is_empty());

        let d = decompose(&trunc(1, &[])).unwrap();
        assert!(d.cycles.is_empty());
        assert_eq!(d.segments, vec![vec![0]]);
    }

    #[test]
    fn decompose_detects_non_injective() {
        let t = trunc(3, &[(0, 2), (1, 2)]);
        assert_eq!(
            decompose(&t).unwrap_err(),
            InjectionError::NotInjective { a: 0, b: 1, target: 2 }
        );
    }

    #[test]
    fn character_counts_sizes() {
        let t = trunc(8, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (6, 7)]);
        let c = character(&decompose(&t).unwrap());
        assert_eq!(c.cycle_sizes.get(&3), Some(&2));
        assert_eq!(c.segment_lengths.get(&2), Some(&1));
        let total: usize = c.cycle_sizes.iter().map(|(size, n)| size * n).sum::<usize>()
            + c.segment_lengths.iter().map(|(len, n)| len * n).sum::<usize>();
        assert_eq!(total as u64, t.domain_size());
    }

    #[test]
    fn empty_character() {
        let c = character(&decompose(&trunc(0, &[])).unwrap());
        assert_eq!(c, Character::default());
    }

    #[test]
    fn reassemble_reproduces_map() {
        let t = trunc(7, &[(0, 1), (1, 0), (2, 3), (3, 4), (5, 6), (6, 5)]);
        let d = decompose(&t).unwrap();
        let mut rebuilt = vec![None; 7];
        for (size, members) in &d.cycles {
            for i in 0..*size {
                rebuilt[members[i] as usize] = Some(members[(i + 1) % size]);
            }
        }
        for seg in &d.segments {
            for w in seg.windows(2) {
                rebuilt[w[0] as usize] = Some(w[1]);
            }
        }
        for x in 0..7u64 {
            assert_eq!(rebuilt[x as usize], t.apply(SymbolId(0), x));
        }
    }

    fn spec(n0: Count, n1: Count, orbits: Vec<(usize, u64)>) -> InjSpec {
        InjSpec { omega_chains: n0, zeta_chains: n1, finite_orbits: orbits }
    }

    #[test]
    fn punctualize_rejects_no_infinite_orbit() {
        let s = spec(Count::Finite(0), Count::Finite(0), vec![]);
        assert_eq!(punctualize(&s, 5).unwrap_err(), InjectionError::NoInfiniteOrbit);
    }

    #[test]
    fn punctualize_single_omega_chain() {
        let s = spec(Count::Finite(1), Count::Finite(0), vec![]);
        let log = punctualize(&s, 5).unwrap();
        assert!(check_punctuality(&log).passes());
        // One open segment growing rightward each stage.
        for stage in 1..=5 {
            let d = decompose(&log.truncation(stage)).unwrap();
            assert_eq!(d.segments.len(), 1);
            assert_eq!(d.segments[0].len() as u64, stage);
            assert!(d.cycles.is_empty());
        }
    }

    #[test]
    fn punctualize_stage3_enumerates_three_chain_elements() {
        // N0=2, N1=1: the stage-3 event extends min(4,2) ω-chains and
        // min(4,1) ζ-chains — three chain elements, no finite orbits due.
        let s = spec(Count::Finite(2), Count::Finite(1), vec![]);
        let log = punctualize(&s, 5).unwrap();
        assert_eq!(log.events()[3].new_elements.len(), 3);
    }

    #[test]
    fn punctualize_reveals_scheduled_cycle() {
        let s = spec(Count::Finite(1), Count::Finite(0), vec![(2, 4)]);
        let log = punctualize(&s, 6).unwrap();
        let c = character(&decompose(&log.full_truncation()).unwrap());
        assert_eq!(c.cycle_sizes.get(&2), Some(&1));
        assert_eq!(c.cycle_sizes.len(), 1);
        // Not revealed before stage 4.
        let early = character(&decompose(&log.truncation(4)).unwrap());
        assert!(early.cycle_sizes.is_empty());
    }

    #[test]
    fn punctualize_open_segment_count() {
        let s = spec(Count::infinite(), Count::Finite(2), vec![(3, 2)]);
        let log = punctualize(&s, 8).unwrap();
        assert!(check_punctuality(&log).passes());
        for stage in 1..=8u64 {
            let d = decompose(&log.truncation(stage)).unwrap();
            let expected = stage + stage.min(2);
            assert_eq!(d.segments.len() as u64, expected, "stage {stage}");
        }
    }

    #[test]
    fn match_two_cycle_symmetry() {
        let t = trunc(2, &[(0, 1), (1, 0)]);
        let maps = match_candidates(&t, &t, &[0]).unwrap();
        let images: Vec<u64> = maps.iter().map(|m| m[&0]).collect();
        assert_eq!(images, vec![0, 1]);
    }

    #[test]
    fn match_size_mismatch_is_empty() {
        let a = trunc(2, &[(0, 1), (1, 0)]);
        let b = trunc(3, &[(0, 1), (1, 2), (2, 0)]);
        assert!(match_candidates(&a, &b, &[0]).unwrap().is_empty());
    }

    #[test]
    fn match_heads_go_to_heads() {
        // Three equal segments; the head of one maps exactly onto the three
        // heads of the other side.
        let a = trunc(9, &[(0, 1), (1, 2), (3, 4), (4, 5), (6, 7), (7, 8)]);
        let maps = match_candidates(&a, &a, &[0]).unwrap();
        let mut images: Vec<u64> = maps.iter().map(|m| m[&0]).collect();
        images.sort_unstable();
        assert_eq!(images, vec![0, 3, 6]);
    }

    #[test]
    fn match_contains_identity_and_is_symmetric() {
        let t = trunc(7, &[(0, 1), (1, 0), (2, 3), (3, 4), (5, 6)]);
        let anchors = [0, 2, 5];
        let maps = match_candidates(&t, &t, &anchors).unwrap();
        assert!(maps.iter().any(|m| anchors.iter().all(|a| m[a] == *a)));
        // Symmetry: each map's inverse appears in the reverse direction on
        // the image anchors.
        for m in &maps {
            let image_anchors: Vec<u64> = m.values().copied().collect();
            let back = match_candidates(&t, &t, &image_anchors).unwrap();
            assert!(back
                .iter()
                .any(|bm| m.iter().all(|(k, v)| bm.get(v) == Some(k))));
        }
    }

    #[test]
    fn match_cap_limits_enumeration() {
        let t = trunc(4, &[(0, 1), (1, 0), (2, 3), (3, 2)]);
        let all = match_candidates(&t, &t, &[0]).unwrap();
        assert_eq!(all.len(), 4); // two 2-cycles × two rotations
        let capped = match_candidates_capped(&t, &t, &[0], 2).unwrap();
        assert_eq!(capped.len(), 2);
        assert_eq!(&all[..2], &capped[..]);
    }
}
