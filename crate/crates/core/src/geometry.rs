//! Tube cross-sections and 1-blocks.
//!
//! A cross-section is the `(L+1) x (M+1)` rectangle of lattice points in a
//! plane `x = const`. Vertices are labelled lexicographically by `(y, z)`, so
//! vertex `y * (M + 1) + z` is the point `(y, z)`. Vertex and hinge-edge
//! subsets are stored as bit-sets over those labels.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported cross-section, so vertex sets fit in a `u64`.
pub const MAX_WIDTH: usize = 64;
/// Largest supported number of grid edges in a cross-section.
pub const MAX_GRID_EDGES: usize = 128;

/// Bit-set over cross-section vertex labels.
pub type VertexSet = u64;
/// Bit-set over cross-section grid-edge indices.
pub type EdgeSet = u128;

/// Dimensions of an `L x M` tube, normalized so that `L >= M` and `L >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TubeSpec {
    l: u32,
    m: u32,
}

impl TubeSpec {
    /// Builds a tube, swapping the extents if `m > l`.
    pub fn new(l: u32, m: u32) -> Result<Self> {
        Self::normalized(l, m).map(|(spec, _)| spec)
    }

    /// Like [`TubeSpec::new`] but also reports whether the extents were swapped.
    pub fn normalized(l: u32, m: u32) -> Result<(Self, bool)> {
        let swapped = m > l;
        let (l, m) = if swapped { (m, l) } else { (l, m) };
        if l == 0 {
            return Err(Error::InvalidTube("the 0x0 tube holds no polygons".into()));
        }
        let width = (l as usize + 1) * (m as usize + 1);
        let edges = l as usize * (m as usize + 1) + m as usize * (l as usize + 1);
        if width > MAX_WIDTH || edges > MAX_GRID_EDGES {
            return Err(Error::InvalidTube(format!(
                "{l}x{m} exceeds the supported cross-section ({width} vertices, {edges} edges)"
            )));
        }
        Ok((TubeSpec { l, m }, swapped))
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Number of vertices in one cross-section, `W = (L+1)(M+1)`.
    pub fn width(&self) -> usize {
        (self.l as usize + 1) * (self.m as usize + 1)
    }

    /// Label of the cross-section point `(y, z)`.
    pub fn vertex_index(&self, y: u32, z: u32) -> usize {
        debug_assert!(y <= self.l && z <= self.m);
        (y * (self.m + 1) + z) as usize
    }

    pub fn vertex_coords(&self, v: usize) -> (u32, u32) {
        let h = self.m as usize + 1;
        ((v / h) as u32, (v % h) as u32)
    }
}

impl fmt::Display for TubeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.l, self.m)
    }
}

impl std::str::FromStr for TubeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (l, m) = parse_tube(s)?;
        TubeSpec::new(l, m)
    }
}

/// Parses an `LxM` tube string without normalizing it.
pub fn parse_tube(s: &str) -> Result<(u32, u32)> {
    let bad = || Error::InvalidTube(format!("expected LxM, got {s:?}"));
    let (l, m) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((l.parse().map_err(|_| bad())?, m.parse().map_err(|_| bad())?))
}

/// Vertices and unit edges of one cross-section plane.
#[derive(Clone, Debug)]
pub struct CrossSection {
    spec: TubeSpec,
    vertices: Vec<(u32, u32)>,
    edges: Vec<(usize, usize)>,
    /// For each vertex, the incident `(edge index, other endpoint)` pairs.
    incident: Vec<Vec<(usize, usize)>>,
}

impl CrossSection {
    pub fn new(spec: TubeSpec) -> Self {
        let w = spec.width();
        let vertices: Vec<_> = (0..w).map(|v| spec.vertex_coords(v)).collect();
        let mut edges = Vec::new();
        for (v, &(y, z)) in vertices.iter().enumerate() {
            // Edges are listed by lower endpoint, then by upper endpoint.
            if z < spec.m() {
                edges.push((v, spec.vertex_index(y, z + 1)));
            }
            if y < spec.l() {
                edges.push((v, spec.vertex_index(y + 1, z)));
            }
        }
        let mut incident = vec![Vec::new(); w];
        for (e, &(a, b)) in edges.iter().enumerate() {
            incident[a].push((e, b));
            incident[b].push((e, a));
        }
        CrossSection {
            spec,
            vertices,
            edges,
            incident,
        }
    }

    pub fn spec(&self) -> TubeSpec {
        self.spec
    }

    pub fn width(&self) -> usize {
        self.vertices.len()
    }

    /// `(y, z)` coordinates in label order.
    pub fn vertices(&self) -> &[(u32, u32)] {
        &self.vertices
    }

    /// Grid edges as `(lower label, higher label)`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.incident[v]
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.incident[a]
            .iter()
            .find(|&&(_, other)| other == b)
            .map(|&(e, _)| e)
    }

    pub fn full_set(&self) -> VertexSet {
        if self.width() == 64 {
            u64::MAX
        } else {
            (1u64 << self.width()) - 1
        }
    }

    /// Degree of every vertex in a candidate block.
    pub fn degrees(&self, left: VertexSet, hinge: EdgeSet, right: VertexSet) -> Vec<u32> {
        let mut deg: Vec<u32> = (0..self.width())
            .map(|v| ((left >> v) & 1) as u32 + ((right >> v) & 1) as u32)
            .collect();
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if (hinge >> e) & 1 == 1 {
                deg[a] += 1;
                deg[b] += 1;
            }
        }
        deg
    }
}

/// One end of a path through a block: a half-edge crossing the left or the
/// right bounding plane at the given vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    Left(u8),
    Right(u8),
}

/// A hinge together with the half-edges crossing its two bounding planes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OneBlock {
    pub left: VertexSet,
    pub hinge: EdgeSet,
    pub right: VertexSet,
}

impl OneBlock {
    /// Number of occupied vertices, which equals hinge edges plus half the
    /// half-edges.
    pub fn length(&self) -> u32 {
        let half_edges = self.left.count_ones() + self.right.count_ones();
        debug_assert_eq!(half_edges % 2, 0);
        self.hinge.count_ones() + half_edges / 2
    }

    pub fn occupied(&self, cs: &CrossSection) -> VertexSet {
        let mut occ = self.left | self.right;
        for (e, &(a, b)) in cs.edges().iter().enumerate() {
            if (self.hinge >> e) & 1 == 1 {
                occ |= (1 << a) | (1 << b);
            }
        }
        occ
    }

    pub fn is_full(&self, cs: &CrossSection) -> bool {
        self.occupied(cs) == cs.full_set()
    }

    /// Traces the block's components. Returns the paths as pairs of ends and
    /// the number of closed cycles made of hinge edges alone.
    pub fn trace(&self, cs: &CrossSection) -> (Vec<(End, End)>, usize) {
        let w = cs.width();
        let mut seen_edge: EdgeSet = 0;
        let mut paths = Vec::new();
        let hinge_nbrs = |v: usize| {
            cs.incident(v)
                .iter()
                .filter(move |&&(e, _)| (self.hinge >> e) & 1 == 1)
                .copied()
        };
        let follow = |start: usize, seen_edge: &mut EdgeSet| -> usize {
            let mut v = start;
            loop {
                let next = hinge_nbrs(v).find(|&(e, _)| (*seen_edge >> e) & 1 == 0);
                match next {
                    Some((e, u)) => {
                        *seen_edge |= 1 << e;
                        v = u;
                    }
                    None => return v,
                }
            }
        };
        let mut used_end = [0u64; 2];
        for v in 0..w {
            for side in 0..2 {
                let set = if side == 0 { self.left } else { self.right };
                if (set >> v) & 1 == 0 || (used_end[side] >> v) & 1 == 1 {
                    continue;
                }
                used_end[side] |= 1 << v;
                let start = if side == 0 {
                    End::Left(v as u8)
                } else {
                    End::Right(v as u8)
                };
                // A vertex carrying both half-edges is a straight-through path.
                let other_side = 1 - side;
                let other_set = if other_side == 0 { self.left } else { self.right };
                let end = if (other_set >> v) & 1 == 1 && hinge_nbrs(v).next().is_none() {
                    used_end[other_side] |= 1 << v;
                    if other_side == 0 {
                        End::Left(v as u8)
                    } else {
                        End::Right(v as u8)
                    }
                } else {
                    let u = follow(v, &mut seen_edge);
                    let u_side = if (self.left >> u) & 1 == 1 && (used_end[0] >> u) & 1 == 0 {
                        0
                    } else {
                        1
                    };
                    used_end[u_side] |= 1 << u;
                    if u_side == 0 {
                        End::Left(u as u8)
                    } else {
                        End::Right(u as u8)
                    }
                };
                paths.push((start, end));
            }
        }
        let mut cycles = 0;
        for (e, &(a, _)) in cs.edges().iter().enumerate() {
            if (self.hinge >> e) & 1 == 1 && (seen_edge >> e) & 1 == 0 {
                cycles += 1;
                seen_edge |= 1 << e;
                follow(a, &mut seen_edge);
            }
        }
        (paths, cycles)
    }

    /// True when the block consists of exactly one closed cycle and no
    /// half-edges, i.e. it is a polygon of span zero on its own.
    pub fn is_closed_cycle(&self, cs: &CrossSection) -> bool {
        self.left == 0 && self.right == 0 && self.hinge != 0 && self.trace(cs).1 == 1
    }
}

/// Checks every per-block condition except the component rule.
fn degree_ok(cs: &CrossSection, block: &OneBlock) -> bool {
    cs.degrees(block.left, block.hinge, block.right)
        .iter()
        .all(|&d| d == 0 || d == 2)
}

/// Whether a candidate block can occur as a slice of some polygon: nonempty,
/// every vertex of degree 0 or 2, an even number of half-edges on each side,
/// and either every component reaches a half-edge or the block is one closed
/// cycle.
pub fn is_valid_block(cs: &CrossSection, block: &OneBlock) -> bool {
    if block.left == 0 && block.right == 0 && block.hinge == 0 {
        return false;
    }
    if block.left.count_ones() % 2 == 1 || block.right.count_ones() % 2 == 1 {
        return false;
    }
    if !degree_ok(cs, block) {
        return false;
    }
    let (_, cycles) = block.trace(cs);
    if block.left == 0 && block.right == 0 {
        cycles == 1
    } else {
        cycles == 0
    }
}

pub fn build_cross_section(spec: TubeSpec) -> CrossSection {
    CrossSection::new(spec)
}

/// All valid 1-blocks of the tube, sorted by `(hinge, left, right)`.
///
/// Vertices are visited in label order; at each vertex we choose its left and
/// right half-edges and its hinge edges to higher-labelled neighbours, and
/// prune as soon as a vertex is finished with a degree other than 0 or 2.
pub fn enumerate_one_blocks(spec: TubeSpec, full_only: bool) -> Vec<OneBlock> {
    let cs = CrossSection::new(spec);
    let w = cs.width();
    // Hinge edges from v to higher-labelled neighbours.
    let forward: Vec<Vec<(usize, usize)>> = (0..w)
        .map(|v| {
            cs.incident(v)
                .iter()
                .filter(|&&(_, u)| u > v)
                .copied()
                .collect()
        })
        .collect();

    struct Search<'a> {
        cs: &'a CrossSection,
        forward: &'a [Vec<(usize, usize)>],
        full_only: bool,
        deg: Vec<u32>,
        out: Vec<OneBlock>,
    }

    impl Search<'_> {
        fn visit(&mut self, v: usize, block: OneBlock) {
            let w = self.cs.width();
            if v == w {
                if is_valid_block(self.cs, &block) {
                    self.out.push(block);
                }
                return;
            }
            let fwd = &self.forward[v];
            for mask in 0u32..(1 << fwd.len()) {
                let extra = mask.count_ones();
                // Upper neighbours may not exceed degree 2.
                if fwd
                    .iter()
                    .enumerate()
                    .any(|(i, &(_, u))| (mask >> i) & 1 == 1 && self.deg[u] >= 2)
                {
                    continue;
                }
                for half in 0u32..4 {
                    let (l, r) = (half & 1, half >> 1);
                    let d = self.deg[v] + extra + l + r;
                    if d != 2 && (d != 0 || self.full_only) {
                        continue;
                    }
                    let mut next = block;
                    if l == 1 {
                        next.left |= 1 << v;
                    }
                    if r == 1 {
                        next.right |= 1 << v;
                    }
                    for (i, &(e, u)) in fwd.iter().enumerate() {
                        if (mask >> i) & 1 == 1 {
                            next.hinge |= 1 << e;
                            self.deg[u] += 1;
                        }
                    }
                    self.visit(v + 1, next);
                    for (i, &(_, u)) in fwd.iter().enumerate() {
                        if (mask >> i) & 1 == 1 {
                            self.deg[u] -= 1;
                        }
                    }
                }
            }
        }
    }

    let mut search = Search {
        cs: &cs,
        forward: &forward,
        full_only,
        deg: vec![0; w],
        out: Vec::new(),
    };
    search.visit(
        0,
        OneBlock {
            left: 0,
            hinge: 0,
            right: 0,
        },
    );
    let mut blocks = search.out;
    blocks.sort_unstable();
    blocks
}

/// Occupied-vertex count of a block.
pub fn block_length(block: &OneBlock) -> u32 {
    block.length()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tube(l: u32, m: u32) -> TubeSpec {
        TubeSpec::new(l, m).unwrap()
    }

    /// Raw subset brute force with the same per-block filter.
    fn brute_force_blocks(spec: TubeSpec, full_only: bool) -> Vec<OneBlock> {
        let cs = CrossSection::new(spec);
        let w = cs.width();
        let e = cs.edges().len();
        let mut out = Vec::new();
        for hinge in 0u128..(1 << e) {
            for left in 0u64..(1 << w) {
                for right in 0u64..(1 << w) {
                    let b = OneBlock { left, hinge, right };
                    if is_valid_block(&cs, &b) && (!full_only || b.is_full(&cs)) {
                        out.push(b);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn cross_section_sizes() {
        for (l, m, v, e) in [(1, 0, 2, 1), (2, 1, 6, 7), (2, 2, 9, 12)] {
            let cs = build_cross_section(tube(l, m));
            assert_eq!(cs.vertices().len(), v);
            assert_eq!(cs.edges().len(), e);
        }
        let cs = build_cross_section(tube(2, 1));
        assert_eq!(cs.vertices()[..3], [(0, 0), (0, 1), (1, 0)]);
    }

    #[test]
    fn normalization_swaps_and_rejects_empty() {
        assert_eq!(TubeSpec::normalized(1, 3).unwrap(), (tube(3, 1), true));
        assert!(TubeSpec::new(0, 0).is_err());
        assert_eq!("2x1".parse::<TubeSpec>().unwrap(), tube(2, 1));
        assert!("2by1".parse::<TubeSpec>().is_err());
    }

    #[test]
    fn smallest_tube_full_blocks() {
        let blocks = enumerate_one_blocks(tube(1, 0), true);
        // straight through; cap on the left; cap on the right; one vertex
        // through-and-turn is impossible (odd sides), so exactly three.
        assert_eq!(
            blocks,
            vec![
                OneBlock { left: 0, hinge: 1, right: 3 },
                OneBlock { left: 3, hinge: 0, right: 3 },
                OneBlock { left: 3, hinge: 1, right: 0 },
            ]
        );
        assert!(blocks.iter().all(|b| b.length() == 2));
    }

    #[test]
    fn matches_raw_subset_brute_force() {
        for (l, m) in [(1, 0), (2, 0), (3, 0), (1, 1), (2, 1), (5, 0)] {
            let spec = tube(l, m);
            for full in [true, false] {
                assert_eq!(
                    enumerate_one_blocks(spec, full),
                    brute_force_blocks(spec, full),
                    "{spec} full_only={full}"
                );
            }
        }
    }

    #[test]
    fn frozen_block_counts() {
        // Frozen from the raw subset enumeration.
        assert_eq!(enumerate_one_blocks(tube(1, 1), true).len(), 42);
        assert_eq!(enumerate_one_blocks(tube(2, 1), false).len(), 1410);
    }

    #[test]
    fn length_identity_and_full_subset() {
        for (l, m) in [(2, 1), (3, 1), (2, 2), (4, 0)] {
            let spec = tube(l, m);
            let cs = CrossSection::new(spec);
            let all = enumerate_one_blocks(spec, false);
            for b in &all {
                let occ = b.occupied(&cs).count_ones();
                assert_eq!(b.length(), occ, "{b:?}");
            }
            let full: Vec<_> = all.iter().copied().filter(|b| b.length() as usize == cs.width()).collect();
            assert_eq!(full, enumerate_one_blocks(spec, true));
        }
    }

    #[test]
    fn single_hinge_edge_is_rejected() {
        let cs = CrossSection::new(tube(1, 0));
        let b = OneBlock { left: 0, hinge: 1, right: 0 };
        assert!(!is_valid_block(&cs, &b));
    }

    #[test]
    fn trace_reports_paths() {
        let spec = tube(1, 0);
        let cs = CrossSection::new(spec);
        let cap = OneBlock { left: 0, hinge: 1, right: 3 };
        let (paths, cycles) = cap.trace(&cs);
        assert_eq!(cycles, 0);
        assert_eq!(paths, vec![(End::Right(0), End::Right(1))]);
        let straight = OneBlock { left: 3, hinge: 0, right: 3 };
        assert_eq!(
            straight.trace(&cs).0,
            vec![(End::Left(0), End::Right(0)), (End::Left(1), End::Right(1))]
        );
    }
}
