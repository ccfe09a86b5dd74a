//! Weighted syndrome graphs and exact minimum-weight perfect matching.
//!
//! Parity flips become numbered graph vertices (a lookup table keeps the
//! vertex ↔ cell association), every pair is connected with its Manhattan
//! cell distance, and the blossom solver pairs them up at minimum total
//! weight. Under Open boundaries each flip additionally gets a private
//! boundary pseudo-vertex so a perfect matching always exists.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use crate::blossom::{max_weight_matching, UNMATCHED};
use crate::lattice::{
    boundary_distance, CellClass, CellCoord, LatticeDims, LatticeError, Axis, AXES,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchError {
    /// A periodic-mode graph arrived with an odd number of real vertices;
    /// the syndrome invariant upstream was violated.
    OddVertexCount(usize),
    /// Brute-force enumeration is capped at 12 real vertices.
    TooManyVertices(usize),
    Lattice(LatticeError),
}

impl fmt::Display for MatchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatchError::OddVertexCount(n) => {
                write!(f, "cannot perfectly match {n} vertices without boundary vertices")
            }
            MatchError::TooManyVertices(n) => {
                write!(f, "brute-force matching limited to 12 vertices, got {n}")
            }
            MatchError::Lattice(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for MatchError {}

impl From<LatticeError> for MatchError {
    fn from(e: LatticeError) -> Self {
        MatchError::Lattice(e)
    }
}

/// Per-axis weight multipliers. The default 1:1:1 treats time like space,
/// which is how all shipped configurations run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxisWeights {
    pub x: u64,
    pub y: u64,
    pub t: u64,
}

impl Default for AxisWeights {
    fn default() -> Self {
        AxisWeights { x: 1, y: 1, t: 1 }
    }
}

impl AxisWeights {
    fn along(&self, axis: Axis) -> u64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::T => self.t,
        }
    }
}

/// Complete weighted graph over the parity flips of one class.
///
/// Real vertices are `0..cells.len()` in flip emission order ((t, y, x)
/// lexicographic); under Open boundaries, vertex `n + i` is the boundary
/// pseudo-vertex owned by real vertex `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyndromeGraph {
    pub class: CellClass,
    pub dims: LatticeDims,
    /// Lookup table: vertex id → cell coordinate, ids dense from 0.
    pub cells: Vec<CellCoord>,
    /// Edges (u, v, weight) with u < v, deduplicated, in construction order.
    pub edges: Vec<(usize, usize, u64)>,
    /// Whether boundary pseudo-vertices are present.
    pub has_boundary: bool,
}

impl SyndromeGraph {
    pub fn real_count(&self) -> usize {
        self.cells.len()
    }

    pub fn vertex_count(&self) -> usize {
        if self.has_boundary { 2 * self.cells.len() } else { self.cells.len() }
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        v >= self.cells.len()
    }

    /// The cell behind a real vertex id; None for boundary pseudo-vertices.
    pub fn cell_of(&self, v: usize) -> Option<CellCoord> {
        self.cells.get(v).copied()
    }

    /// Plain-text dump: one "u v w" line per edge, then the lookup table.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# {} graph, {} real vertices, {} edges",
            self.class,
            self.real_count(),
            self.edges.len()
        );
        for &(u, v, w) in &self.edges {
            let _ = writeln!(out, "{u} {v} {w}");
        }
        let _ = writeln!(out, "# lookup");
        for (id, c) in self.cells.iter().enumerate() {
            let _ = writeln!(out, "{id} {} {} {}", c.x, c.y, c.t);
        }
        if self.has_boundary {
            let n = self.real_count();
            for id in 0..n {
                let _ = writeln!(out, "{} boundary-of {id}", n + id);
            }
        }
        out
    }
}

/// A perfect matching over the real vertices of a [`SyndromeGraph`].
/// Pairs are (u, v) with u < v; a pair with a boundary pseudo-vertex means
/// that flip was routed to the nearest open surface. Pseudo-pseudo pairs
/// carry no correction and are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    pub total_weight: u64,
}

impl Matching {
    pub fn empty() -> Self {
        Matching { pairs: Vec::new(), total_weight: 0 }
    }
}

fn weighted_distance(
    a: CellCoord,
    b: CellCoord,
    dims: LatticeDims,
    weights: AxisWeights,
) -> u64 {
    let periodic = dims.is_periodic();
    AXES.iter()
        .map(|&ax| {
            let d = (a.axis(ax) - b.axis(ax)).unsigned_abs() / 2;
            let steps = if periodic {
                let len = dims.len(ax) as u64;
                let d = d % len;
                d.min(len - d)
            } else {
                d
            };
            steps * weights.along(ax)
        })
        .sum()
}

/// Build the complete graph over `flips` with Manhattan cell-step weights.
/// Under Open boundaries every real vertex i gets pseudo-vertex n+i at its
/// boundary distance, plus zero-weight edges among all pseudo-vertices.
pub fn build_graph(
    flips: impl IntoIterator<Item = CellCoord>,
    class: CellClass,
    dims: LatticeDims,
) -> SyndromeGraph {
    build_graph_weighted(flips, class, dims, AxisWeights::default())
}

pub fn build_graph_weighted(
    flips: impl IntoIterator<Item = CellCoord>,
    class: CellClass,
    dims: LatticeDims,
    weights: AxisWeights,
) -> SyndromeGraph {
    let cells: Vec<CellCoord> = flips.into_iter().collect();
    debug_assert!(cells.iter().all(|c| c.class == class));
    let n = cells.len();
    let has_boundary = !dims.is_periodic();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v, weighted_distance(cells[u], cells[v], dims, weights)));
        }
    }
    if has_boundary {
        for (u, &c) in cells.iter().enumerate() {
            // Weighted distance to the cheapest surface; the final step
            // through the surface counts, hence the +1.
            let lo = match class {
                CellClass::Primal => 0,
                CellClass::Dual => 1,
            };
            let d = AXES
                .iter()
                .map(|&a| {
                    let v = c.axis(a);
                    let down = ((v - lo) / 2) as u64 + 1;
                    let up = ((dims.extent(a) - 2 + lo - v) / 2) as u64 + 1;
                    down.min(up) * weights.along(a)
                })
                .min()
                .expect("three axes");
            debug_assert!(
                weights != AxisWeights::default() || Some(d) == boundary_distance(c, dims)
            );
            edges.push((u, n + u, d));
        }
        for u in 0..n {
            for v in u + 1..n {
                edges.push((n + u, n + v, 0));
            }
        }
    }
    SyndromeGraph { class, dims, cells, edges, has_boundary }
}

/// Minimum-weight perfect matching over an explicit edge list.
///
/// Runs the blossom solver on reflected weights (w' = w_max + 1 − w) with
/// maximum cardinality, which on a feasible instance yields a perfect
/// matching of minimum original weight. Returns the mate array and the
/// original total weight, or None if no perfect matching exists.
pub fn min_weight_perfect(
    nvertex: usize,
    edges: &[(usize, usize, u64)],
) -> Option<(Vec<usize>, u64)> {
    if nvertex == 0 {
        return Some((Vec::new(), 0));
    }
    if nvertex % 2 != 0 {
        return None;
    }
    let wmax = edges.iter().map(|&(_, _, w)| w).max().unwrap_or(0);
    let reflected: Vec<(usize, usize, i64)> = edges
        .iter()
        .map(|&(u, v, w)| (u, v, (wmax + 1 - w) as i64))
        .collect();
    let mate = max_weight_matching(nvertex, reflected, true);
    if mate.iter().any(|&m| m == UNMATCHED) {
        return None;
    }
    let mut wlookup: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for &(u, v, w) in edges {
        let key = (u.min(v), u.max(v));
        let slot = wlookup.entry(key).or_insert(w);
        if w < *slot {
            *slot = w;
        }
    }
    let mut total = 0;
    for v in 0..nvertex {
        let m = mate[v];
        if v < m {
            total += wlookup[&(v, m)];
        }
    }
    Some((mate, total))
}

fn pairs_from_mate(graph: &SyndromeGraph, mate: &[usize]) -> Vec<(usize, usize)> {
    let n = graph.real_count();
    let mut pairs = Vec::new();
    for v in 0..mate.len() {
        let m = mate[v];
        if v < m && (v < n || m < n) {
            pairs.push((v, m));
        }
    }
    pairs.sort_unstable();
    pairs
}

/// Exact minimum-weight perfect matching of a syndrome graph.
/// Deterministic: same graph (including edge order) → same matching.
pub fn mwpm(graph: &SyndromeGraph) -> Result<Matching, MatchError> {
    let n = graph.real_count();
    if n == 0 {
        return Ok(Matching::empty());
    }
    if !graph.has_boundary && n % 2 != 0 {
        return Err(MatchError::OddVertexCount(n));
    }
    let (mate, _) =
        min_weight_perfect(graph.vertex_count(), &graph.edges).ok_or(MatchError::OddVertexCount(n))?;
    let pairs = pairs_from_mate(graph, &mate);
    let wlookup: BTreeMap<(usize, usize), u64> =
        graph.edges.iter().map(|&(u, v, w)| ((u.min(v), u.max(v)), w)).collect();
    let total_weight = pairs.iter().map(|p| wlookup[p]).sum();
    Ok(Matching { pairs, total_weight })
}

/// Exhaustive oracle: enumerates every perfect matching and keeps the
/// minimum (total weight, then lexicographic pair list). Real-vertex count
/// capped at 12. Leftover boundary pseudo-vertices pair among themselves at
/// zero weight and are dropped from the result.
pub fn brute_force_matching(graph: &SyndromeGraph) -> Result<Matching, MatchError> {
    let n = graph.real_count();
    if n > 12 {
        return Err(MatchError::TooManyVertices(n));
    }
    if n == 0 {
        return Ok(Matching::empty());
    }
    if !graph.has_boundary && n % 2 != 0 {
        return Err(MatchError::OddVertexCount(n));
    }
    let wlookup: BTreeMap<(usize, usize), u64> =
        graph.edges.iter().map(|&(u, v, w)| ((u.min(v), u.max(v)), w)).collect();

    // Recurse over real vertices only: the lowest unmatched real vertex
    // pairs with another real vertex or (Open mode) its own pseudo-vertex.
    fn recurse(
        n: usize,
        has_boundary: bool,
        wlookup: &BTreeMap<(usize, usize), u64>,
        used: &mut Vec<bool>,
        current: &mut Vec<(usize, usize)>,
        weight: u64,
        best: &mut Option<(u64, Vec<(usize, usize)>)>,
    ) {
        let Some(u) = (0..n).find(|&v| !used[v]) else {
            let candidate = (weight, current.clone());
            if best.as_ref().map(|b| candidate < *b).unwrap_or(true) {
                *best = Some(candidate);
            }
            return;
        };
        used[u] = true;
        for v in u + 1..n {
            if used[v] {
                continue;
            }
            used[v] = true;
            current.push((u, v));
            recurse(n, has_boundary, wlookup, used, current, weight + wlookup[&(u, v)], best);
            current.pop();
            used[v] = false;
        }
        if has_boundary {
            current.push((u, n + u));
            recurse(n, has_boundary, wlookup, used, current, weight + wlookup[&(u, n + u)], best);
            current.pop();
        }
        used[u] = false;
    }

    let mut best = None;
    let mut used = alloc::vec![false; n];
    let mut current = Vec::new();
    recurse(n, graph.has_boundary, &wlookup, &mut used, &mut current, 0, &mut best);
    let (total_weight, pairs) = best.ok_or(MatchError::OddVertexCount(n))?;
    Ok(Matching { pairs, total_weight })
}

/// Split real vertices into connected components under a distance cutoff:
/// two flips land in the same component when some chain of flips connects
/// them with every hop ≤ `cutoff`. Components can be matched independently
/// and in parallel; with `cutoff` at least the lattice diameter there is a
/// single component and the result equals whole-graph matching.
pub fn split_components(graph: &SyndromeGraph, cutoff: u64) -> Vec<SyndromeGraph> {
    let n = graph.real_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for &(u, v, w) in &graph.edges {
        if u < n && v < n && w <= cutoff {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru.max(rv)] = ru.min(rv);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<CellCoord>> = BTreeMap::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(graph.cells[v]);
    }
    groups
        .into_values()
        .map(|cells| build_graph(cells, graph.class, graph.dims))
        .collect()
}
