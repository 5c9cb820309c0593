//! Brute-force ground truth.
//!
//! Polygons are enumerated as closed self-avoiding walks on the finite box
//! `0 <= x <= X` of the tube, with no reference to blocks or patterns. Each
//! polygon is rooted at its lexicographically smallest vertex (which lies in
//! the plane `x = 0`) and found once in each direction.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::geometry::{enumerate_one_blocks, CrossSection, OneBlock, TubeSpec};
use crate::patterns::{zigzag_paths, PatternSystem, ZigZag};
use crate::transfer::build_transfer_matrix;

/// Default cap on search nodes.
pub const DEFAULT_NODE_CAP: u64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

impl Site {
    pub const fn new(x: i32, y: i32, z: i32) -> Self {
        Site { x, y, z }
    }

    fn shifted(self, dx: i32) -> Site {
        Site::new(self.x + dx, self.y, self.z)
    }
}

fn edge(a: Site, b: Site) -> (Site, Site) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// A polygon as an edge set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polygon {
    edges: BTreeSet<(Site, Site)>,
}

impl Polygon {
    pub fn from_edges(edges: impl IntoIterator<Item = (Site, Site)>) -> Self {
        Polygon {
            edges: edges.into_iter().map(|(a, b)| edge(a, b)).collect(),
        }
    }

    /// Polygon through `sites` in order, closing back to the first.
    pub fn from_cycle(sites: &[Site]) -> Self {
        Self::from_edges((0..sites.len()).map(|i| (sites[i], sites[(i + 1) % sites.len()])))
    }

    pub fn edges(&self) -> &BTreeSet<(Site, Site)> {
        &self.edges
    }

    pub fn contains(&self, a: Site, b: Site) -> bool {
        self.edges.contains(&edge(a, b))
    }

    pub fn length(&self) -> usize {
        self.edges.len()
    }

    pub fn span(&self) -> i32 {
        self.edges.iter().map(|(_, b)| b.x).max().unwrap_or(0)
    }

    pub fn sites(&self) -> BTreeSet<Site> {
        self.edges.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    fn translated(&self, dx: i32) -> Polygon {
        Self::from_edges(self.edges.iter().map(|&(a, b)| (a.shifted(dx), b.shifted(dx))))
    }

    /// Checks that this is a single self-avoiding cycle of unit edges inside
    /// the tube that touches the plane `x = 0`.
    pub fn validate(&self, spec: TubeSpec) -> std::result::Result<(), String> {
        let (l, m) = (spec.l() as i32, spec.m() as i32);
        if self.edges.len() < 4 {
            return Err("fewer than four edges".into());
        }
        let mut degree = std::collections::BTreeMap::new();
        for &(a, b) in &self.edges {
            let d = (a.x - b.x).abs() + (a.y - b.y).abs() + (a.z - b.z).abs();
            if d != 1 {
                return Err(format!("{a:?}-{b:?} is not a unit edge"));
            }
            for s in [a, b] {
                if s.x < 0 || s.y < 0 || s.y > l || s.z < 0 || s.z > m {
                    return Err(format!("{s:?} lies outside the tube"));
                }
                *degree.entry(s).or_insert(0) += 1;
            }
        }
        if let Some((s, d)) = degree.iter().find(|(_, &d)| d != 2) {
            return Err(format!("{s:?} has degree {d}"));
        }
        if !degree.keys().any(|s| s.x == 0) {
            return Err("no vertex in the plane x = 0".into());
        }
        // Walk the cycle from one edge; it must use every edge.
        let adj = |s: Site| self.edges.iter().filter_map(move |&(a, b)| {
            if a == s {
                Some(b)
            } else if b == s {
                Some(a)
            } else {
                None
            }
        });
        let start = self.edges.iter().next().unwrap().0;
        let (mut prev, mut cur) = (start, adj(start).next().unwrap());
        let mut steps = 1;
        while cur != start {
            let next = adj(cur).find(|&s| s != prev).unwrap();
            prev = cur;
            cur = next;
            steps += 1;
        }
        if steps != self.edges.len() {
            return Err(format!("{} edges but the cycle has {steps}", self.edges.len()));
        }
        Ok(())
    }

    /// Valid and occupying every vertex of the subtube `0 <= x <= span`.
    pub fn is_hamiltonian(&self, spec: TubeSpec) -> bool {
        self.validate(spec).is_ok()
            && self.sites().len() == (self.span() as usize + 1) * spec.width()
    }
}

/// The box `0 <= x <= x_max` of the tube as a graph. Vertex ids are ordered
/// lexicographically by `(x, y, z)`.
struct BoxGraph {
    spec: TubeSpec,
    width: usize,
    neighbours: Vec<Vec<u32>>,
}

impl BoxGraph {
    fn new(spec: TubeSpec, x_max: usize) -> Self {
        let width = spec.width();
        let n = (x_max + 1) * width;
        let mut neighbours = vec![Vec::new(); n];
        let (l, m) = (spec.l(), spec.m());
        for id in 0..n {
            let (x, v) = (id / width, id % width);
            let (y, z) = spec.vertex_coords(v);
            let mut push = |other: usize| neighbours[id].push(other as u32);
            if x > 0 {
                push(id - width);
            }
            if y > 0 {
                push(x * width + spec.vertex_index(y - 1, z));
            }
            if z > 0 {
                push(x * width + spec.vertex_index(y, z - 1));
            }
            if z < m {
                push(x * width + spec.vertex_index(y, z + 1));
            }
            if y < l {
                push(x * width + spec.vertex_index(y + 1, z));
            }
            if x < x_max {
                push(id + width);
            }
        }
        BoxGraph {
            spec,
            width,
            neighbours,
        }
    }

    fn len(&self) -> usize {
        self.neighbours.len()
    }

    fn site(&self, id: u32) -> Site {
        let (x, v) = (id as usize / self.width, id as usize % self.width);
        let (y, z) = self.spec.vertex_coords(v);
        Site::new(x as i32, y as i32, z as i32)
    }

    fn id(&self, s: Site) -> u32 {
        (s.x as usize * self.width + self.spec.vertex_index(s.y as u32, s.z as u32)) as u32
    }

    fn x(&self, id: u32) -> usize {
        id as usize / self.width
    }

    fn distance(&self, a: u32, b: u32) -> usize {
        let (sa, sb) = (self.site(a), self.site(b));
        ((sa.x - sb.x).abs() + (sa.y - sb.y).abs() + (sa.z - sb.z).abs()) as usize
    }

    fn polygon(&self, path: &[u32]) -> Polygon {
        let sites: Vec<Site> = path.iter().map(|&id| self.site(id)).collect();
        Polygon::from_cycle(&sites)
    }
}

/// Polygon counts `p_{T,n}(s)` for `n <= n_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationTable {
    pub spec: TubeSpec,
    pub n_max: usize,
    /// `counts[n][s]`.
    pub counts: Vec<Vec<u64>>,
}

impl EnumerationTable {
    pub fn s_max(&self) -> usize {
        self.n_max.saturating_sub(2) / 2
    }

    pub fn count(&self, n: usize, s: usize) -> u64 {
        self.counts.get(n).and_then(|row| row.get(s)).copied().unwrap_or(0)
    }

    pub fn total(&self, n: usize) -> u64 {
        self.counts[n].iter().sum()
    }

    /// Smallest span of an `n`-edge polygon.
    pub fn min_span(&self, n: usize) -> Option<usize> {
        self.counts[n].iter().position(|&c| c > 0)
    }

    /// Smallest and largest length of a polygon of span `s`.
    pub fn extremal_lengths(&self, s: usize) -> Option<(usize, usize)> {
        let ns: Vec<usize> = (0..=self.n_max).filter(|&n| self.count(n, s) > 0).collect();
        Some((*ns.first()?, *ns.last()?))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct OracleOptions {
    pub node_cap: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            node_cap: DEFAULT_NODE_CAP,
        }
    }
}

struct CycleSearch<'a, F: FnMut(&[u32], usize)> {
    graph: &'a BoxGraph,
    root: u32,
    n_max: usize,
    dist: Vec<usize>,
    visited: Vec<bool>,
    path: Vec<u32>,
    nodes: u64,
    cap: u64,
    found: F,
}

impl<F: FnMut(&[u32], usize)> CycleSearch<'_, F> {
    fn run(&mut self, v: u32, max_x: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::ResourceCap { cap: self.cap });
        }
        let len = self.path.len();
        for k in 0..self.graph.neighbours[v as usize].len() {
            let u = self.graph.neighbours[v as usize][k];
            if u == self.root {
                if len >= 4 && len <= self.n_max {
                    (self.found)(&self.path, max_x);
                }
                continue;
            }
            if u < self.root || self.visited[u as usize] || len + self.dist[u as usize] > self.n_max {
                continue;
            }
            self.visited[u as usize] = true;
            self.path.push(u);
            self.run(u, max_x.max(self.graph.x(u)))?;
            self.path.pop();
            self.visited[u as usize] = false;
        }
        Ok(())
    }
}

/// Calls `visit(polygon_path, span)` once per polygon with `n <= n_max`
/// edges (twice before deduplication: once per direction, and only the
/// direction whose second vertex is smaller than its last is reported).
fn for_each_polygon(
    spec: TubeSpec,
    n_max: usize,
    options: OracleOptions,
    mut visit: impl FnMut(&[u32], usize),
) -> Result<()> {
    let x_max = n_max.saturating_sub(2) / 2;
    let graph = BoxGraph::new(spec, x_max);
    let mut nodes = 0;
    for root in 0..spec.width() as u32 {
        let dist = (0..graph.len() as u32).map(|v| graph.distance(v, root)).collect();
        let mut visited = vec![false; graph.len()];
        visited[root as usize] = true;
        let mut search = CycleSearch {
            graph: &graph,
            root,
            n_max,
            dist,
            visited,
            path: vec![root],
            nodes,
            cap: options.node_cap,
            found: |path: &[u32], span: usize| {
                if path[1] < *path.last().unwrap() {
                    visit(path, span);
                }
            },
        };
        search.run(root, 0)?;
        nodes = search.nodes;
    }
    Ok(())
}

/// Exhaustive polygon counts by length and span.
pub fn enumerate_polygons(spec: TubeSpec, n_max: usize) -> Result<EnumerationTable> {
    enumerate_polygons_with(spec, n_max, OracleOptions::default())
}

pub fn enumerate_polygons_with(
    spec: TubeSpec,
    n_max: usize,
    options: OracleOptions,
) -> Result<EnumerationTable> {
    let s_max = n_max.saturating_sub(2) / 2;
    let mut counts = vec![vec![0u64; s_max + 1]; n_max + 1];
    for_each_polygon(spec, n_max, options, |path, span| {
        counts[path.len()][span] += 1;
    })?;
    Ok(EnumerationTable {
        spec,
        n_max,
        counts,
    })
}

/// Every polygon with at most `n_max` edges, as edge sets.
pub fn collect_polygons(spec: TubeSpec, n_max: usize) -> Result<Vec<Polygon>> {
    let graph = BoxGraph::new(spec, n_max.saturating_sub(2) / 2);
    let mut out = Vec::new();
    for_each_polygon(spec, n_max, OracleOptions::default(), |path, _| {
        out.push(graph.polygon(path));
    })?;
    Ok(out)
}

struct HamiltonSearch<'a, F: FnMut(&[u32])> {
    graph: &'a BoxGraph,
    visited: Vec<bool>,
    path: Vec<u32>,
    nodes: u64,
    cap: u64,
    found: F,
}

impl<F: FnMut(&[u32])> HamiltonSearch<'_, F> {
    /// Free neighbours of `w`: unvisited ones, the walk's head and the root.
    fn free_degree(&self, w: u32, head: u32) -> usize {
        self.graph.neighbours[w as usize]
            .iter()
            .filter(|&&x| !self.visited[x as usize] || x == head || x == 0)
            .count()
    }

    fn run(&mut self, v: u32) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::ResourceCap { cap: self.cap });
        }
        let n = self.graph.len();
        if self.path.len() == n {
            if self.graph.neighbours[v as usize].contains(&0) {
                (self.found)(&self.path);
            }
            return Ok(());
        }
        // An unvisited neighbour left with exactly two free neighbours must
        // be entered from the head right now.
        let mut forced = None;
        for &w in &self.graph.neighbours[v as usize] {
            if self.visited[w as usize] || v == 0 {
                continue;
            }
            match self.free_degree(w, v) {
                0 | 1 => return Ok(()),
                2 if forced.is_some() => return Ok(()),
                2 => forced = Some(w),
                _ => {}
            }
        }
        let candidates: Vec<u32> = match forced {
            Some(w) => vec![w],
            None => self.graph.neighbours[v as usize]
                .iter()
                .copied()
                .filter(|&u| !self.visited[u as usize])
                .collect(),
        };
        for u in candidates {
            self.visited[u as usize] = true;
            self.path.push(u);
            // v is now interior: its unvisited neighbours must keep two exits.
            let stuck = self.graph.neighbours[v as usize]
                .iter()
                .any(|&w| !self.visited[w as usize] && self.free_degree(w, u) < 2);
            if !stuck {
                self.run(u)?;
            }
            self.path.pop();
            self.visited[u as usize] = false;
        }
        Ok(())
    }
}

fn for_each_hamiltonian(
    spec: TubeSpec,
    s: usize,
    options: OracleOptions,
    mut visit: impl FnMut(&BoxGraph, &[u32]),
) -> Result<()> {
    let graph = BoxGraph::new(spec, s);
    let n = graph.len();
    if n % 2 == 1 || n < 4 {
        return Ok(());
    }
    let mut visited = vec![false; n];
    visited[0] = true;
    let mut found = Vec::new();
    let mut search = HamiltonSearch {
        graph: &graph,
        visited,
        path: vec![0],
        nodes: 0,
        cap: options.node_cap,
        found: |path: &[u32]| {
            // Keep one direction of each cycle.
            if path[1] < *path.last().unwrap() {
                found.push(path.to_vec());
            }
        },
    };
    search.run(0)?;
    for path in found {
        visit(&graph, &path);
    }
    Ok(())
}

/// Number of Hamiltonian polygons of each span `0..=s_max`, by plane-by-plane
/// backtracking over full 1-blocks.
pub fn hamiltonian_census(spec: TubeSpec, s_max: usize) -> Result<Vec<u64>> {
    hamiltonian_census_with(spec, s_max, OracleOptions::default())
}

pub fn hamiltonian_census_with(
    spec: TubeSpec,
    s_max: usize,
    options: OracleOptions,
) -> Result<Vec<u64>> {
    let cs = CrossSection::new(spec);
    let blocks: Vec<FullBlock> = enumerate_one_blocks(spec, true)
        .iter()
        .map(|b| FullBlock::new(&cs, b))
        .collect();
    let mut by_left: HashMap<u64, Vec<FullBlock>> = HashMap::new();
    for b in blocks {
        by_left.entry(b.left).or_default().push(b);
    }
    let mut nodes = 0u64;
    (0..=s_max)
        .map(|s| {
            let mut search = ColumnSearch {
                by_left: &by_left,
                width: cs.width(),
                last: s,
                dsu: RollbackDsu::new((s + 1) * cs.width()),
                count: 0,
                nodes,
                cap: options.node_cap,
            };
            search.run(0, 0)?;
            nodes = search.nodes;
            Ok(search.count)
        })
        .collect()
}

/// A full 1-block as raw edges: vertices entered from the left and hinge
/// edges within the plane.
struct FullBlock {
    left: u64,
    right: u64,
    left_vertices: Vec<usize>,
    hinge: Vec<(usize, usize)>,
}

impl FullBlock {
    fn new(cs: &CrossSection, b: &OneBlock) -> Self {
        FullBlock {
            left: b.left,
            right: b.right,
            left_vertices: (0..cs.width()).filter(|v| (b.left >> v) & 1 == 1).collect(),
            hinge: cs
                .edges()
                .iter()
                .enumerate()
                .filter(|(e, _)| (b.hinge >> e) & 1 == 1)
                .map(|(_, &(a, c))| (a, c))
                .collect(),
        }
    }
}

/// Union-find with undo, counting the cycles closed by unions.
struct RollbackDsu {
    parent: Vec<usize>,
    size: Vec<usize>,
    history: Vec<Option<(usize, usize)>>,
    cycles: usize,
}

impl RollbackDsu {
    fn new(n: usize) -> Self {
        RollbackDsu {
            parent: (0..n).collect(),
            size: vec![1; n],
            history: Vec::new(),
            cycles: 0,
        }
    }

    fn find(&self, mut a: usize) -> usize {
        while self.parent[a] != a {
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            self.cycles += 1;
            self.history.push(None);
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.history.push(Some((ra, rb)));
    }

    fn undo_to(&mut self, mark: usize) {
        while self.history.len() > mark {
            match self.history.pop().unwrap() {
                None => self.cycles -= 1,
                Some((ra, rb)) => {
                    self.parent[rb] = rb;
                    self.size[ra] -= self.size[rb];
                }
            }
        }
    }
}

struct ColumnSearch<'a> {
    by_left: &'a HashMap<u64, Vec<FullBlock>>,
    width: usize,
    last: usize,
    dsu: RollbackDsu,
    count: u64,
    nodes: u64,
    cap: u64,
}

impl ColumnSearch<'_> {
    /// Places a block at plane `x` whose left side is `left`.
    fn run(&mut self, x: usize, left: u64) -> Result<()> {
        let Some(blocks) = self.by_left.get(&left) else {
            return Ok(());
        };
        for b in blocks {
            if (x == self.last) != (b.right == 0) || (x == 0) != (b.left == 0) {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.cap {
                return Err(Error::ResourceCap { cap: self.cap });
            }
            let mark = self.dsu.history.len();
            let base = x * self.width;
            for &v in &b.left_vertices {
                self.dsu.union(base - self.width + v, base + v);
            }
            for &(a, c) in &b.hinge {
                self.dsu.union(base + a, base + c);
            }
            if x == self.last {
                if self.dsu.cycles == 1 {
                    self.count += 1;
                }
            } else if self.dsu.cycles == 0 {
                self.run(x + 1, b.right)?;
            }
            self.dsu.undo_to(mark);
        }
        Ok(())
    }
}

/// Hamiltonian census by exhaustive vertex DFS; much slower, used to guard
/// the block-based census at small sizes.
pub fn hamiltonian_census_dfs(
    spec: TubeSpec,
    s_max: usize,
) -> Result<Vec<u64>> {
    hamiltonian_census_dfs_with(spec, s_max, OracleOptions::default())
}

fn hamiltonian_census_dfs_with(
    spec: TubeSpec,
    s_max: usize,
    options: OracleOptions,
) -> Result<Vec<u64>> {
    (0..=s_max)
        .map(|s| {
            let graph = BoxGraph::new(spec, s);
            let n = graph.len();
            if n % 2 == 1 || n < 4 {
                return Ok(0);
            }
            let mut count = 0u64;
            let mut visited = vec![false; n];
            visited[0] = true;
            let mut search = HamiltonSearch {
                graph: &graph,
                visited,
                path: vec![0],
                nodes: 0,
                cap: options.node_cap,
                found: |path: &[u32]| {
                    if path[1] < *path.last().unwrap() {
                        count += 1;
                    }
                },
            };
            search.run(0)?;
            Ok(count)
        })
        .collect()
}

/// All Hamiltonian polygons of span `s`.
pub fn hamiltonian_polygons(spec: TubeSpec, s: usize) -> Result<Vec<Polygon>> {
    let mut out = Vec::new();
    for_each_hamiltonian(spec, s, OracleOptions::default(), |graph, path| {
        out.push(graph.polygon(path))
    })?;
    Ok(out)
}

/// Number of distinct full `r`-blocks for `r = 1..=r_max`: sequences of `r`
/// full 1-blocks that occur consecutively in some polygon. Sequences are read
/// off the realizable full patterns and deduplicated by their blocks.
pub fn full_block_census(spec: TubeSpec, r_max: usize) -> Result<Vec<u64>> {
    let system = PatternSystem::build(spec, true)?;
    let matrix = build_transfer_matrix(&system);
    let block = |i: u32| system.patterns[i as usize].block;
    let mut out = Vec::new();
    let mut walks: Vec<Vec<u32>> = (0..matrix.dim() as u32).map(|i| vec![i]).collect();
    for r in 1..=r_max {
        let distinct: HashSet<Vec<u32>> = walks
            .iter()
            .map(|w| w.iter().map(|&i| block(i)).collect())
            .collect();
        out.push(distinct.len() as u64);
        if r == r_max {
            break;
        }
        walks = walks
            .iter()
            .flat_map(|w| {
                let last = *w.last().unwrap();
                matrix.successors(last).iter().map(move |&j| {
                    let mut next = w.clone();
                    next.push(j);
                    next
                })
            })
            .collect();
    }
    Ok(out)
}

/// `Z_n(f) = sum_s p_n(s) e^{f s}`.
pub fn partition_function(table: &EnumerationTable, n: usize, f: f64) -> f64 {
    assert!(n <= table.n_max, "n exceeds the enumerated range");
    table.counts[n]
        .iter()
        .enumerate()
        .map(|(s, &c)| c as f64 * (f * s as f64).exp())
        .sum()
}

/// Shortest and longest polygon of span `s` in the restricted class used
/// for concatenation (`s >= 2`; the only edge in the plane `x = 0` is
/// `(0,0,0)-(0,1,0)`, the only edge in `x = s` is `(s,0,0)-(s,1,0)`, and no
/// edge lies in `x = s - 1`).
pub fn star_extremal_lengths(spec: TubeSpec, s: usize, n_max: usize) -> Result<Option<(usize, usize)>> {
    assert!(s >= 2);
    let graph = BoxGraph::new(spec, s);
    let hinge_allowed = |a: u32, b: u32| -> bool {
        let (sa, sb) = (graph.site(a), graph.site(b));
        if sa.x != sb.x {
            return true;
        }
        let x = sa.x as usize;
        let is_base = {
            let (lo, hi) = if sa < sb { (sa, sb) } else { (sb, sa) };
            lo.y == 0 && lo.z == 0 && hi.y == 1 && hi.z == 0
        };
        if x == 0 || x == s {
            is_base
        } else {
            x != s - 1
        }
    };
    let root = graph.id(Site::new(0, 0, 0));
    let first = graph.id(Site::new(0, 1, 0));
    let dist: Vec<usize> = (0..graph.len() as u32).map(|v| graph.distance(v, root)).collect();
    let mut lengths = BTreeSet::new();
    let mut visited = vec![false; graph.len()];
    visited[root as usize] = true;
    visited[first as usize] = true;
    let mut nodes = 0u64;

    #[allow(clippy::too_many_arguments)]
    fn go(
        graph: &BoxGraph,
        hinge_allowed: &dyn Fn(u32, u32) -> bool,
        dist: &[usize],
        visited: &mut Vec<bool>,
        v: u32,
        len: usize,
        max_x: usize,
        s: usize,
        n_max: usize,
        root: u32,
        lengths: &mut BTreeSet<usize>,
        nodes: &mut u64,
    ) -> Result<()> {
        *nodes += 1;
        if *nodes > DEFAULT_NODE_CAP {
            return Err(Error::ResourceCap { cap: DEFAULT_NODE_CAP });
        }
        for &u in &graph.neighbours[v as usize] {
            if !hinge_allowed(v, u) {
                continue;
            }
            if u == root {
                if max_x == s && len >= 3 {
                    lengths.insert(len + 1);
                }
                continue;
            }
            if visited[u as usize] || len + 1 + dist[u as usize] > n_max {
                continue;
            }
            visited[u as usize] = true;
            go(graph, hinge_allowed, dist, visited, u, len + 1, max_x.max(graph.x(u)), s, n_max, root, lengths, nodes)?;
            visited[u as usize] = false;
        }
        Ok(())
    }

    go(
        &graph,
        &hinge_allowed,
        &dist,
        &mut visited,
        first,
        1,
        0,
        s,
        n_max,
        root,
        &mut lengths,
        &mut nodes,
    )?;
    Ok(lengths.first().copied().zip(lengths.last().copied()))
}

/// Extremal lengths predicted for the restricted class: `A_s = 2(s+1)` and
/// `B_s`, which depends on the parities of `W` and `s`.
pub fn predicted_star_extremes(spec: TubeSpec, s: usize) -> (usize, usize) {
    let w = spec.width();
    let a = 2 * (s + 1);
    let b = if s <= 3 {
        a
    } else if w % 2 == 0 || s % 2 == 0 {
        w * (s - 2) + 6
    } else {
        w * (s - 2) + 5
    };
    (a, b)
}

/// Endpoint types of a Hamiltonian polygon: whether the edge from
/// `(0,0,0)` (start) or `(s,0,0)` (finish) runs in the `y` direction.
fn endpoint_types(p: &Polygon) -> (bool, bool) {
    let s = p.span();
    let start_y = p.contains(Site::new(0, 0, 0), Site::new(0, 1, 0));
    let finish_y = p.contains(Site::new(s, 0, 0), Site::new(s, 1, 0));
    (start_y, finish_y)
}

/// Joins two Hamiltonian polygons through a pair of zig-zag hinges into a
/// Hamiltonian polygon of length `n1 + n2 + 2W` and span `s1 + s2 + 3`.
pub fn concatenate_hamiltonian(spec: TubeSpec, first: &Polygon, second: &Polygon) -> Result<Polygon> {
    for (name, p) in [("first", first), ("second", second)] {
        if !p.is_hamiltonian(spec) {
            return Err(Error::TypeUndefined(format!("{name} polygon is not Hamiltonian")));
        }
    }
    let s1 = first.span();
    let (_, finish_y) = endpoint_types(first);
    let (start_y, _) = endpoint_types(second);
    let kind_of = |y_type: bool| if y_type { ZigZag::B } else { ZigZag::A };
    // Neighbour of (0,0) across the deleted edge.
    let partner = |y_type: bool| if y_type { (1, 0) } else { (0, 1) };

    let mut edges: BTreeSet<(Site, Site)> = first.edges().clone();
    let shifted = second.translated(s1 + 3);
    edges.extend(shifted.edges().iter().copied());
    let (fy, fz) = partner(finish_y);
    let (sy, sz) = partner(start_y);
    edges.remove(&edge(Site::new(s1, 0, 0), Site::new(s1, fy, fz)));
    edges.remove(&edge(Site::new(s1 + 3, 0, 0), Site::new(s1 + 3, sy, sz)));

    let mut far_ends = Vec::new();
    for (x, kind) in [(s1 + 1, kind_of(finish_y)), (s1 + 2, kind_of(start_y))] {
        let (row, walk) = zigzag_paths(spec, kind);
        for path in [&row, &walk] {
            for pair in path.windows(2) {
                edges.insert(edge(
                    Site::new(x, pair[0].0 as i32, pair[0].1 as i32),
                    Site::new(x, pair[1].0 as i32, pair[1].1 as i32),
                ));
            }
        }
        let ends: BTreeSet<(u32, u32)> = [row.last(), walk.last()].into_iter().flatten().copied().collect();
        far_ends.push(ends);
    }
    if far_ends[0] != far_ends[1] {
        return Err(Error::TypeUndefined("zig-zag hinges end at different vertices".into()));
    }
    let join = |edges: &mut BTreeSet<_>, x: i32, (y, z): (u32, u32)| {
        edges.insert(edge(Site::new(x, y as i32, z as i32), Site::new(x + 1, y as i32, z as i32)));
    };
    for v in [(0, 0), (fy as u32, fz as u32)] {
        join(&mut edges, s1, v);
    }
    for &v in &far_ends[0] {
        join(&mut edges, s1 + 1, v);
    }
    for v in [(0, 0), (sy as u32, sz as u32)] {
        join(&mut edges, s1 + 2, v);
    }
    let result = Polygon { edges };
    if !result.is_hamiltonian(spec) {
        return Err(Error::TypeUndefined("concatenation did not close into one Hamiltonian cycle".into()));
    }
    Ok(result)
}
