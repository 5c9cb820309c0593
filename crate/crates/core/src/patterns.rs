//! 1-patterns and the can-follow relation.
//!
//! A 1-pattern is a 1-block together with the pairing of its left half-edges
//! induced by the part of the polygon to its left. Joining that pairing with
//! the block's internal paths yields the pairing of its right half-edges, and
//! one pattern can follow another exactly when the second one's left side is
//! the first one's right side with the same pairing. We call a vertex set
//! together with such a pairing a [`BoundaryState`]; patterns are edges
//! between boundary states.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    enumerate_one_blocks, CrossSection, EdgeSet, End, OneBlock, TubeSpec, VertexSet,
};

/// Default upper bound on the number of patterns in one system.
pub const DEFAULT_PATTERN_CAP: usize = 50_000_000;

/// A perfect matching on the labels `0..r` (shown 1-based).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairPartition {
    mate: Vec<u8>,
}

impl PairPartition {
    pub fn empty() -> Self {
        PairPartition { mate: Vec::new() }
    }

    /// Builds a partition from 0-based label pairs.
    pub fn from_pairs(r: usize, pairs: &[(usize, usize)]) -> Option<Self> {
        let mut mate = vec![u8::MAX; r];
        for &(a, b) in pairs {
            if a == b || a >= r || b >= r || mate[a] != u8::MAX || mate[b] != u8::MAX {
                return None;
            }
            mate[a] = b as u8;
            mate[b] = a as u8;
        }
        mate.iter().all(|&m| m != u8::MAX).then_some(PairPartition { mate })
    }

    pub fn len(&self) -> usize {
        self.mate.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mate.is_empty()
    }

    pub fn mate(&self, label: usize) -> usize {
        self.mate[label] as usize
    }

    /// Pairs `(a, b)` with `a < b`, in increasing order of `a`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .filter(|&a| self.mate(a) > a)
            .map(|a| (a, self.mate(a)))
            .collect()
    }

    /// All perfect matchings on `r` labels.
    pub fn all(r: usize) -> Vec<PairPartition> {
        fn go(mate: &mut Vec<u8>, out: &mut Vec<PairPartition>) {
            let Some(a) = mate.iter().position(|&m| m == u8::MAX) else {
                out.push(PairPartition { mate: mate.clone() });
                return;
            };
            for b in a + 1..mate.len() {
                if mate[b] == u8::MAX {
                    mate[a] = b as u8;
                    mate[b] = a as u8;
                    go(mate, out);
                    mate[a] = u8::MAX;
                    mate[b] = u8::MAX;
                }
            }
        }
        let mut out = Vec::new();
        if r % 2 == 0 {
            go(&mut vec![u8::MAX; r], &mut out);
        }
        out
    }
}

impl fmt::Display for PairPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (a, b)) in self.pairs().into_iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{{},{}}}", a + 1, b + 1)?;
        }
        write!(f, "}}")
    }
}

/// The crossing points of a half-integer plane and how the polygon on the
/// left pairs them up. Labels are ranks within `set`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BoundaryState {
    pub set: VertexSet,
    pub pairing: PairPartition,
}

impl BoundaryState {
    /// Partner vertex of each vertex in `set`; other entries are unspecified.
    fn partner_vertices(&self) -> [u8; 64] {
        let verts = bits(self.set);
        let mut out = [u8::MAX; 64];
        for (label, &v) in verts.iter().enumerate() {
            out[v] = verts[self.pairing.mate(label)] as u8;
        }
        out
    }
}

fn bits(set: VertexSet) -> Vec<usize> {
    (0..64).filter(|&v| (set >> v) & 1 == 1).collect()
}

/// Returned when a connectivity and a block cannot be joined into an open
/// slice of a single polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClosureFailure {
    pub cycles: usize,
}

/// Result of joining a left pairing with a block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Composition {
    /// No cycle closed; the pairing induced on the right side.
    Open(PairPartition),
    /// The right side is empty and this many cycles closed.
    Closed(usize),
    /// A cycle closed while the right side is nonempty.
    Failed,
}

/// A block's internal paths indexed by end, for fast composition.
#[derive(Clone, Debug)]
struct BlockPaths {
    left_partner: [End; 64],
    right_partner: [End; 64],
}

impl BlockPaths {
    fn new(cs: &CrossSection, block: &OneBlock) -> Self {
        let mut left_partner = [End::Left(u8::MAX); 64];
        let mut right_partner = [End::Left(u8::MAX); 64];
        let (paths, _) = block.trace(cs);
        let mut set = |a: End, b: End| match a {
            End::Left(v) => left_partner[v as usize] = b,
            End::Right(v) => right_partner[v as usize] = b,
        };
        for (a, b) in paths {
            set(a, b);
            set(b, a);
        }
        BlockPaths {
            left_partner,
            right_partner,
        }
    }

    fn partner(&self, end: End) -> End {
        match end {
            End::Left(v) => self.left_partner[v as usize],
            End::Right(v) => self.right_partner[v as usize],
        }
    }
}

fn compose_paths(
    block: &OneBlock,
    paths: &BlockPaths,
    conn: &[u8; 64],
) -> Composition {
    let mut seen_left: VertexSet = 0;
    let mut right_mate = [u8::MAX; 64];
    for r in bits(block.right) {
        if right_mate[r] != u8::MAX {
            continue;
        }
        let mut cur = End::Right(r as u8);
        loop {
            match paths.partner(cur) {
                End::Right(u) => {
                    right_mate[r] = u;
                    right_mate[u as usize] = r as u8;
                    break;
                }
                End::Left(v) => {
                    let w = conn[v as usize];
                    seen_left |= (1 << v) | (1 << w);
                    cur = End::Left(w);
                }
            }
        }
    }
    let mut cycles = 0;
    for v in bits(block.left) {
        if (seen_left >> v) & 1 == 1 {
            continue;
        }
        cycles += 1;
        let mut cur = v as u8;
        loop {
            let End::Left(u) = paths.partner(End::Left(cur)) else {
                unreachable!("right ends are all consumed above");
            };
            let w = conn[u as usize];
            seen_left |= (1 << u) | (1 << w);
            if w as usize == v {
                break;
            }
            cur = w;
        }
    }
    if block.right == 0 {
        return Composition::Closed(cycles);
    }
    if cycles > 0 {
        return Composition::Failed;
    }
    let verts = bits(block.right);
    let rank: HashMap<u8, usize> = verts.iter().enumerate().map(|(i, &v)| (v as u8, i)).collect();
    let mate = verts.iter().map(|&v| rank[&right_mate[v]] as u8).collect();
    Composition::Open(PairPartition { mate })
}

/// Joins a left boundary state with a block whose left side is `state.set`.
pub fn compose(cs: &CrossSection, state: &BoundaryState, block: &OneBlock) -> Composition {
    assert_eq!(state.set, block.left, "block does not start at this boundary");
    compose_paths(block, &BlockPaths::new(cs, block), &state.partner_vertices())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PatternKind {
    /// A span-0 polygon.
    Closed,
    Leftmost,
    Proper,
    Rightmost,
}

/// A block decorated with its left connectivity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OnePattern {
    pub kind: PatternKind,
    pub connectivity: PairPartition,
    pub block: OneBlock,
}

impl OnePattern {
    fn left_state(&self) -> BoundaryState {
        BoundaryState {
            set: self.block.left,
            pairing: self.connectivity.clone(),
        }
    }

    /// Pairing induced on the right side, or the cycles closed on the way.
    pub fn induce_right_matching(
        &self,
        cs: &CrossSection,
    ) -> std::result::Result<PairPartition, ClosureFailure> {
        if self.connectivity.len() != self.block.left.count_ones() as usize {
            return Err(ClosureFailure { cycles: 0 });
        }
        match compose(cs, &self.left_state(), &self.block) {
            Composition::Open(p) => Ok(p),
            Composition::Closed(cycles) => Err(ClosureFailure { cycles }),
            Composition::Failed => Err(ClosureFailure { cycles: 1 }),
        }
    }
}

/// Whether `next` can follow `prev`: the planes agree and the pairing induced
/// by `prev` is the connectivity declared by `next`.
pub fn can_follow(cs: &CrossSection, prev: &OnePattern, next: &OnePattern) -> bool {
    if matches!(prev.kind, PatternKind::Rightmost | PatternKind::Closed)
        || matches!(next.kind, PatternKind::Leftmost | PatternKind::Closed)
    {
        return false;
    }
    prev.block.right == next.block.left
        && prev.induce_right_matching(cs).as_ref() == Ok(&next.connectivity)
}

/// Which boundary states a pattern system may use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StateSpace {
    /// States that some polygon produces when cut.
    #[default]
    Realizable,
    /// Every pair partition of every even vertex subset, whether or not a
    /// polygon can produce it. Differs from `Realizable` only for `M = 0`,
    /// where crossing pairings cannot occur.
    AllMatchings,
}

impl StateSpace {
    /// Number of states `AllMatchings` seeds for width `w`.
    pub fn all_matchings_count(w: usize) -> u128 {
        let mut binom = 1u128;
        let mut matchings = 1u128;
        let mut total = 0u128;
        for r in 1..=w {
            binom = binom * (w - r + 1) as u128 / r as u128;
            if r % 2 == 0 {
                matchings *= (r - 1) as u128;
                total += binom * matchings;
            }
        }
        total
    }
}

/// Boundary states reachable from leftmost blocks, with the transitions
/// between them and which of them can be closed off into a polygon.
#[derive(Clone, Debug)]
pub struct StateGraph {
    pub states: Vec<BoundaryState>,
    pub index: HashMap<BoundaryState, u32>,
    /// State `s` can reach a rightmost closure.
    pub coreachable: Vec<bool>,
    /// Deduplicated state-to-state transitions.
    pub transitions: Vec<(u32, u32)>,
}

impl StateGraph {
    /// Explores the boundary states of the unrestricted polygon system.
    pub fn build(cs: &CrossSection, blocks: &[OneBlock]) -> Self {
        Self::explore(cs, blocks, StateSpace::Realizable)
    }

    fn explore(cs: &CrossSection, blocks: &[OneBlock], space: StateSpace) -> Self {
        let paths: Vec<BlockPaths> = blocks.iter().map(|b| BlockPaths::new(cs, b)).collect();
        let mut by_left: HashMap<VertexSet, Vec<usize>> = HashMap::new();
        for (i, b) in blocks.iter().enumerate() {
            by_left.entry(b.left).or_default().push(i);
        }
        let mut states = Vec::new();
        let mut index: HashMap<BoundaryState, u32> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut intern = |s: BoundaryState, states: &mut Vec<BoundaryState>, queue: &mut VecDeque<u32>| {
            *index.entry(s.clone()).or_insert_with(|| {
                states.push(s);
                queue.push_back(states.len() as u32 - 1);
                states.len() as u32 - 1
            })
        };
        let empty = [u8::MAX; 64];
        for (i, b) in blocks.iter().enumerate() {
            if b.left == 0 && b.right != 0 {
                if let Composition::Open(p) = compose_paths(b, &paths[i], &empty) {
                    intern(BoundaryState { set: b.right, pairing: p }, &mut states, &mut queue);
                }
            }
        }
        if space == StateSpace::AllMatchings {
            for set in 1..=cs.full_set() {
                let r = set.count_ones() as usize;
                if r % 2 == 0 {
                    for pairing in PairPartition::all(r) {
                        intern(BoundaryState { set, pairing }, &mut states, &mut queue);
                    }
                }
            }
        }
        let mut terminal = Vec::new();
        let mut transitions = std::collections::HashSet::new();
        while let Some(s) = queue.pop_front() {
            let state = states[s as usize].clone();
            let conn = state.partner_vertices();
            let mut closes = false;
            for &i in by_left.get(&state.set).map(Vec::as_slice).unwrap_or(&[]) {
                let b = &blocks[i];
                match compose_paths(b, &paths[i], &conn) {
                    Composition::Closed(1) => closes = true,
                    Composition::Open(p) => {
                        let t = intern(BoundaryState { set: b.right, pairing: p }, &mut states, &mut queue);
                        transitions.insert((s, t));
                    }
                    _ => {}
                }
            }
            if terminal.len() <= s as usize {
                terminal.resize(s as usize + 1, false);
            }
            terminal[s as usize] = closes;
        }
        let index: HashMap<_, _> = states.iter().cloned().zip(0u32..).collect();
        let mut rev = vec![Vec::new(); states.len()];
        for &(s, t) in &transitions {
            rev[t as usize].push(s);
        }
        let mut coreachable = terminal.clone();
        let mut stack: Vec<u32> = (0..states.len() as u32).filter(|&s| terminal[s as usize]).collect();
        while let Some(t) = stack.pop() {
            for &s in &rev[t as usize] {
                if !coreachable[s as usize] {
                    coreachable[s as usize] = true;
                    stack.push(s);
                }
            }
        }
        let mut transitions: Vec<_> = transitions.into_iter().collect();
        transitions.sort_unstable();
        StateGraph {
            states,
            index,
            coreachable,
            transitions,
        }
    }
}

/// One pattern of a system, stored by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternEntry {
    pub kind: PatternKind,
    pub block: u32,
    /// Left boundary state; `None` for leftmost and closed patterns.
    pub input: Option<u32>,
    /// Right boundary state; `None` for rightmost and closed patterns.
    pub output: Option<u32>,
}

/// Realizable 1-patterns of a tube with their can-follow structure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternSystem {
    pub spec: TubeSpec,
    pub full_only: bool,
    pub state_space: StateSpace,
    pub blocks: Vec<OneBlock>,
    pub states: Vec<BoundaryState>,
    pub patterns: Vec<PatternEntry>,
    /// Index ranges of the classes A0, A1, A2, A3.
    pub class_bounds: [u32; 5],
    /// Patterns grouped by input state (CSR offsets into `by_input`).
    pub input_offsets: Vec<u32>,
    pub by_input: Vec<u32>,
}

impl PatternSystem {
    pub fn build(spec: TubeSpec, full_only: bool) -> Result<Self> {
        Self::build_with_cap(spec, full_only, DEFAULT_PATTERN_CAP)
    }

    /// Realizability of boundary states always comes from the unrestricted
    /// system, so a full-only system keeps exactly the full patterns that
    /// occur in some polygon.
    pub fn build_with_cap(spec: TubeSpec, full_only: bool, cap: usize) -> Result<Self> {
        Self::build_with(spec, full_only, StateSpace::Realizable, cap)
    }

    pub fn build_with(
        spec: TubeSpec,
        full_only: bool,
        state_space: StateSpace,
        cap: usize,
    ) -> Result<Self> {
        if state_space == StateSpace::AllMatchings
            && StateSpace::all_matchings_count(spec.width()) > cap as u128
        {
            return Err(Error::StateExplosion { cap });
        }
        let cs = CrossSection::new(spec);
        let all_blocks = enumerate_one_blocks(spec, false);
        let graph = StateGraph::explore(&cs, &all_blocks, state_space);
        let blocks: Vec<OneBlock> = if full_only {
            all_blocks.into_iter().filter(|b| b.is_full(&cs)).collect()
        } else {
            all_blocks
        };
        let paths: Vec<BlockPaths> = blocks.iter().map(|b| BlockPaths::new(&cs, b)).collect();
        let mut by_left: HashMap<VertexSet, Vec<usize>> = HashMap::new();
        for (i, b) in blocks.iter().enumerate() {
            by_left.entry(b.left).or_default().push(i);
        }

        // (kind, block, input, output) with graph state ids.
        let mut raw: Vec<(PatternKind, u32, Option<u32>, Option<u32>)> = Vec::new();
        let check_cap = |n: usize| if n > cap { Err(Error::StateExplosion { cap }) } else { Ok(()) };
        let empty = [u8::MAX; 64];
        for (i, b) in blocks.iter().enumerate() {
            if b.left != 0 {
                continue;
            }
            if b.right == 0 {
                raw.push((PatternKind::Closed, i as u32, None, None));
            } else if let Composition::Open(p) = compose_paths(b, &paths[i], &empty) {
                let t = graph.index[&BoundaryState { set: b.right, pairing: p }];
                if graph.coreachable[t as usize] {
                    raw.push((PatternKind::Leftmost, i as u32, None, Some(t)));
                }
            }
        }
        for (s, state) in graph.states.iter().enumerate() {
            if !graph.coreachable[s] {
                continue;
            }
            let conn = state.partner_vertices();
            for &i in by_left.get(&state.set).map(Vec::as_slice).unwrap_or(&[]) {
                let b = &blocks[i];
                match compose_paths(b, &paths[i], &conn) {
                    Composition::Closed(1) => {
                        raw.push((PatternKind::Rightmost, i as u32, Some(s as u32), None))
                    }
                    Composition::Open(p) => {
                        let t = graph.index[&BoundaryState { set: b.right, pairing: p }];
                        if graph.coreachable[t as usize] {
                            raw.push((PatternKind::Proper, i as u32, Some(s as u32), Some(t)));
                        }
                    }
                    _ => {}
                }
            }
            check_cap(raw.len())?;
        }
        check_cap(raw.len())?;

        // Keep only states that patterns touch, in canonical order.
        let mut used: Vec<u32> = raw
            .iter()
            .flat_map(|&(_, _, i, o)| i.into_iter().chain(o))
            .collect();
        used.sort_unstable_by(|&a, &b| graph.states[a as usize].cmp(&graph.states[b as usize]));
        used.dedup();
        let remap: HashMap<u32, u32> = used.iter().enumerate().map(|(k, &s)| (s, k as u32)).collect();
        let states: Vec<BoundaryState> = used.iter().map(|&s| graph.states[s as usize].clone()).collect();

        let mut patterns: Vec<PatternEntry> = raw
            .into_iter()
            .map(|(kind, block, input, output)| PatternEntry {
                kind,
                block,
                input: input.map(|s| remap[&s]),
                output: output.map(|s| remap[&s]),
            })
            .collect();
        patterns.sort_unstable_by_key(|p| (p.kind, p.block, p.input, p.output));
        let mut class_bounds = [0u32; 5];
        for (k, kind) in [
            PatternKind::Closed,
            PatternKind::Leftmost,
            PatternKind::Proper,
            PatternKind::Rightmost,
        ]
        .into_iter()
        .enumerate()
        {
            class_bounds[k + 1] =
                class_bounds[k] + patterns.iter().filter(|p| p.kind == kind).count() as u32;
        }
        let mut system = PatternSystem {
            spec,
            full_only,
            state_space,
            blocks,
            states,
            patterns,
            class_bounds,
            input_offsets: Vec::new(),
            by_input: Vec::new(),
        };
        system.index_inputs();
        Ok(system)
    }

    fn index_inputs(&mut self) {
        let mut counts = vec![0u32; self.states.len() + 1];
        for p in &self.patterns {
            if let Some(s) = p.input {
                counts[s as usize + 1] += 1;
            }
        }
        for s in 0..self.states.len() {
            counts[s + 1] += counts[s];
        }
        let mut fill = counts.clone();
        let mut by_input = vec![0u32; *counts.last().unwrap() as usize];
        for (j, p) in self.patterns.iter().enumerate() {
            if let Some(s) = p.input {
                by_input[fill[s as usize] as usize] = j as u32;
                fill[s as usize] += 1;
            }
        }
        self.input_offsets = counts;
        self.by_input = by_input;
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn cross_section(&self) -> CrossSection {
        CrossSection::new(self.spec)
    }

    pub fn class(&self, k: usize) -> std::ops::Range<u32> {
        self.class_bounds[k]..self.class_bounds[k + 1]
    }

    /// Patterns whose left boundary state is `s`.
    pub fn with_input(&self, s: u32) -> &[u32] {
        let (a, b) = (self.input_offsets[s as usize], self.input_offsets[s as usize + 1]);
        &self.by_input[a as usize..b as usize]
    }

    /// Patterns that can follow pattern `i`.
    pub fn followers(&self, i: u32) -> &[u32] {
        match self.patterns[i as usize].output {
            Some(s) => self.with_input(s),
            None => &[],
        }
    }

    pub fn length(&self, i: u32) -> u32 {
        self.blocks[self.patterns[i as usize].block as usize].length()
    }

    pub fn pattern(&self, i: u32) -> OnePattern {
        let p = self.patterns[i as usize];
        OnePattern {
            kind: p.kind,
            connectivity: p
                .input
                .map(|s| self.states[s as usize].pairing.clone())
                .unwrap_or_default(),
            block: self.blocks[p.block as usize],
        }
    }

    /// Number of distinct connectivities attached to each block.
    pub fn connectivities_per_block(&self) -> HashMap<u32, usize> {
        let mut out = HashMap::new();
        for p in &self.patterns {
            *out.entry(p.block).or_insert(0) += 1;
        }
        out
    }
}

/// Which of the two zig-zag hinges to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZigZag {
    /// Full bottom row plus a zig-zag from `(0, 1)`.
    A,
    /// Bottom row from `(1, 0)` plus a zig-zag from `(0, 0)`.
    B,
}

/// The two vertex-disjoint paths of a zig-zag hinge, as `(y, z)` sequences.
/// The first is the bottom row, the second the zig-zag walk; for kind `A`
/// with `M = 0` the second is empty.
pub fn zigzag_paths(spec: TubeSpec, kind: ZigZag) -> (Vec<(u32, u32)>, Vec<(u32, u32)>) {
    let (l, m) = (spec.l(), spec.m());
    let row_start = match kind {
        ZigZag::A => 0,
        ZigZag::B => 1,
    };
    let row: Vec<_> = (row_start..=l).map(|y| (y, 0)).collect();
    let start = match kind {
        ZigZag::A => (0, 1),
        ZigZag::B => (0, 0),
    };
    let mut occupied = vec![vec![false; m as usize + 1]; l as usize + 1];
    for &(y, z) in &row {
        occupied[y as usize][z as usize] = true;
    }
    if start.1 > m {
        return (row, Vec::new());
    }
    let mut walk = vec![start];
    occupied[start.0 as usize][start.1 as usize] = true;
    let (mut y, mut z) = start;
    loop {
        while z < m && !occupied[y as usize][z as usize + 1] {
            z += 1;
            occupied[y as usize][z as usize] = true;
            walk.push((y, z));
        }
        while z > 0 && !occupied[y as usize][z as usize - 1] {
            z -= 1;
            occupied[y as usize][z as usize] = true;
            walk.push((y, z));
        }
        if y < l && !occupied[y as usize + 1][z as usize] {
            y += 1;
            occupied[y as usize][z as usize] = true;
            walk.push((y, z));
        } else {
            break;
        }
    }
    (row, walk)
}

/// Edge set of the zig-zag hinge `H^A` or `H^B` over the cross-section.
pub fn build_zigzag_hinge(spec: TubeSpec, kind: ZigZag) -> EdgeSet {
    let cs = CrossSection::new(spec);
    let (row, walk) = zigzag_paths(spec, kind);
    let mut hinge: EdgeSet = 0;
    for path in [row, walk] {
        for pair in path.windows(2) {
            let a = spec.vertex_index(pair[0].0, pair[0].1);
            let b = spec.vertex_index(pair[1].0, pair[1].1);
            hinge |= 1 << cs.edge_index(a, b).expect("zig-zag steps are unit steps");
        }
    }
    hinge
}

pub fn enumerate_patterns(spec: TubeSpec, full_only: bool) -> Result<PatternSystem> {
    PatternSystem::build(spec, full_only)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tube(l: u32, m: u32) -> TubeSpec {
        TubeSpec::new(l, m).unwrap()
    }

    fn pat(kind: PatternKind, pairs: &[(usize, usize)], left: u64, hinge: u128, right: u64) -> OnePattern {
        let r = left.count_ones() as usize;
        OnePattern {
            kind,
            connectivity: PairPartition::from_pairs(r, pairs).unwrap(),
            block: OneBlock { left, hinge, right },
        }
    }

    #[test]
    fn all_matchings_state_counts() {
        assert_eq!(StateSpace::all_matchings_count(4), 9);
        assert_eq!(StateSpace::all_matchings_count(5), 25);
        assert_eq!(StateSpace::all_matchings_count(7), 231);
        // Realizable states of a strip are the non-crossing pairings.
        let spec = TubeSpec::new(6, 0).unwrap();
        let real = PatternSystem::build(spec, false).unwrap();
        assert_eq!(real.states.len(), 126);
        let all = PatternSystem::build_with(spec, false, StateSpace::AllMatchings, DEFAULT_PATTERN_CAP).unwrap();
        assert_eq!(all.states.len(), 231);
    }

    #[test]
    fn pair_partition_counts() {
        assert_eq!(PairPartition::all(0).len(), 1);
        assert_eq!(PairPartition::all(4).len(), 3);
        assert_eq!(PairPartition::all(6).len(), 15);
        assert!(PairPartition::all(3).is_empty());
        assert!(PairPartition::from_pairs(4, &[(0, 1)]).is_none());
        assert_eq!(PairPartition::from_pairs(4, &[(0, 3), (1, 2)]).unwrap().to_string(), "{{1,4},{2,3}}");
    }

    #[test]
    fn induce_in_smallest_tube() {
        let cs = CrossSection::new(tube(1, 0));
        let cap = pat(PatternKind::Leftmost, &[], 0, 1, 3);
        let one_pair = PairPartition::from_pairs(2, &[(0, 1)]).unwrap();
        assert_eq!(cap.induce_right_matching(&cs), Ok(one_pair.clone()));
        let straight = pat(PatternKind::Proper, &[(0, 1)], 3, 0, 3);
        assert_eq!(straight.induce_right_matching(&cs), Ok(one_pair));
        let end = pat(PatternKind::Proper, &[(0, 1)], 3, 1, 0);
        assert_eq!(end.induce_right_matching(&cs), Err(ClosureFailure { cycles: 1 }));
        assert!(can_follow(&cs, &cap, &straight));
        assert!(can_follow(&cs, &straight, &straight));
        assert!(can_follow(&cs, &straight, &pat(PatternKind::Rightmost, &[(0, 1)], 3, 1, 0)));
        assert!(!can_follow(&cs, &cap, &pat(PatternKind::Proper, &[], 0, 1, 3)));
    }

    #[test]
    fn smallest_tube_full_system() {
        let sys = PatternSystem::build(tube(1, 0), true).unwrap();
        assert_eq!(sys.class(0).len(), 0);
        assert_eq!(sys.class(1).len(), 1);
        assert_eq!(sys.class(2).len(), 1);
        assert_eq!(sys.class(3).len(), 1);
        let proper = sys.class(2).start;
        assert_eq!(sys.followers(proper).len(), 2);
        assert!(sys.followers(proper).contains(&proper));
    }

    /// Adjacency must agree with the pairwise predicate on every pair.
    #[test]
    fn adjacency_matches_can_follow() {
        for (l, m, full) in [(2, 1, true), (1, 1, false), (3, 0, false), (2, 0, true)] {
            let sys = PatternSystem::build(tube(l, m), full).unwrap();
            let cs = sys.cross_section();
            let pats: Vec<_> = (0..sys.len() as u32).map(|i| sys.pattern(i)).collect();
            for i in 0..sys.len() as u32 {
                let mut expect: Vec<u32> = (0..sys.len() as u32)
                    .filter(|&j| can_follow(&cs, &pats[i as usize], &pats[j as usize]))
                    .collect();
                let mut got = sys.followers(i).to_vec();
                expect.sort_unstable();
                got.sort_unstable();
                assert_eq!(got, expect, "{l}x{m} pattern {i}");
            }
        }
    }

    #[test]
    fn proper_and_rightmost_invariants() {
        let sys = PatternSystem::build(tube(2, 1), false).unwrap();
        let cs = sys.cross_section();
        for i in 0..sys.len() as u32 {
            let p = sys.pattern(i);
            match p.kind {
                PatternKind::Proper | PatternKind::Leftmost => {
                    assert!(p.induce_right_matching(&cs).is_ok())
                }
                PatternKind::Rightmost => {
                    assert_eq!(p.induce_right_matching(&cs), Err(ClosureFailure { cycles: 1 }))
                }
                PatternKind::Closed => assert!(p.block.is_closed_cycle(&cs)),
            }
        }
    }

    fn double_factorial(n: usize) -> usize {
        (1..=n).rev().step_by(2).product::<usize>().max(1)
    }

    #[test]
    fn connectivities_per_block_bounded() {
        for (l, m) in [(2, 0), (3, 0), (1, 1), (2, 1), (5, 0)] {
            let spec = tube(l, m);
            let w = spec.width();
            let bound = if w % 2 == 0 { double_factorial(w - 1) } else { double_factorial(w - 2) };
            for full in [true, false] {
                let sys = PatternSystem::build(spec, full).unwrap();
                for (_, n) in sys.connectivities_per_block() {
                    assert!(n <= bound, "{spec}: {n} > {bound}");
                }
            }
        }
    }

    #[test]
    fn zigzag_examples() {
        let spec = tube(7, 4);
        let (row, walk) = zigzag_paths(spec, ZigZag::A);
        assert_eq!(row.len(), 8);
        assert_eq!(walk.first(), Some(&(0, 1)));
        assert_eq!(walk.last(), Some(&(7, 1)));
        assert_eq!(row.len() + walk.len(), spec.width());
        assert_eq!(walk[..5], [(0, 1), (0, 2), (0, 3), (0, 4), (1, 4)]);
        let (_, walk_b) = zigzag_paths(spec, ZigZag::B);
        assert_eq!(walk_b.first(), Some(&(0, 0)));
        assert_eq!(walk_b.last(), walk.last());
        let (_, walk_even) = zigzag_paths(tube(6, 4), ZigZag::A);
        assert_eq!(walk_even.last(), Some(&(6, 4)));

        let line = tube(5, 0);
        assert_eq!(build_zigzag_hinge(line, ZigZag::A), 0b11111);
        let (row_b, walk_b) = zigzag_paths(line, ZigZag::B);
        assert_eq!(walk_b, vec![(0, 0)]);
        assert_eq!(row_b.first(), Some(&(1, 0)));
        assert_eq!(build_zigzag_hinge(line, ZigZag::B), 0b11110);
    }

    #[test]
    fn zigzag_hinges_span_cross_section() {
        for (l, m) in [(1, 0), (4, 0), (1, 1), (2, 1), (3, 2), (7, 4), (6, 4), (3, 3)] {
            let spec = tube(l, m);
            let cs = CrossSection::new(spec);
            for kind in [ZigZag::A, ZigZag::B] {
                let hinge = build_zigzag_hinge(spec, kind);
                let block = OneBlock { left: 0, hinge, right: 0 };
                let (row, walk) = zigzag_paths(spec, kind);
                assert_eq!(row.len() + walk.len(), spec.width(), "{spec} {kind:?}");
                let starts = [row.first(), walk.first()].into_iter().flatten();
                let occupied = starts.fold(block.occupied(&cs), |acc, &(y, z)| acc | 1 << spec.vertex_index(y, z));
                assert_eq!(occupied, cs.full_set(), "{spec} {kind:?}");
            }
        }
    }
}
