//! Directed graphs and vertex elimination.
//!
//! Eliminating a vertex `v` removes it and inserts a fill-in arc from
//! every in-neighbor to every out-neighbor of `v`, so any path through
//! `v` survives as a direct arc. Running this over all but the last
//! vertex of an ordering yields the elimination graph: the original arcs
//! plus all fill-ins. Its key property, exercised by the encoders and
//! checked in the tests: the original graph has a directed cycle exactly
//! when the elimination graph has a cycle of length two, regardless of
//! the ordering used.

use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("vertex {vertex} out of range for a graph on {size} vertices")]
pub struct UnknownVertex {
    pub vertex: usize,
    pub size: usize,
}

/// A directed graph on vertices `0..n` with set-based adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    out: Vec<BTreeSet<usize>>,
    inn: Vec<BTreeSet<usize>>,
}

impl Digraph {
    pub fn new(vertices: usize) -> Self {
        Digraph { out: vec![BTreeSet::new(); vertices], inn: vec![BTreeSet::new(); vertices] }
    }

    pub fn from_arcs(vertices: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Digraph::new(vertices);
        for (x, y) in arcs {
            g.add_arc(x, y);
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(BTreeSet::len).sum()
    }

    pub fn add_arc(&mut self, x: usize, y: usize) {
        assert!(x < self.out.len() && y < self.out.len(), "arc endpoint out of range");
        self.out[x].insert(y);
        self.inn[y].insert(x);
    }

    pub fn has_arc(&self, x: usize, y: usize) -> bool {
        self.out.get(x).is_some_and(|s| s.contains(&y))
    }

    pub fn out_neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.out[v]
    }

    pub fn in_neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.inn[v]
    }

    /// In-degree plus out-degree; a 2-cycle through `v` counts twice.
    pub fn total_degree(&self, v: usize) -> usize {
        self.inn[v].len() + self.out[v].len()
    }

    pub fn arcs(&self) -> BTreeSet<(usize, usize)> {
        let mut arcs = BTreeSet::new();
        for (x, outs) in self.out.iter().enumerate() {
            for &y in outs {
                arcs.insert((x, y));
            }
        }
        arcs
    }

    fn remove_vertex(&mut self, v: usize) {
        for y in std::mem::take(&mut self.out[v]) {
            self.inn[y].remove(&v);
        }
        for x in std::mem::take(&mut self.inn[v]) {
            self.out[x].remove(&v);
        }
    }
}

/// True when the graph has a directed cycle (a self-loop counts).
pub fn has_cycle(g: &Digraph) -> bool {
    let n = g.vertex_count();
    let mut indegree: Vec<usize> = (0..n).map(|v| g.in_neighbors(v).len()).collect();
    let mut queue: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop() {
        seen += 1;
        for &y in g.out_neighbors(v) {
            indegree[y] -= 1;
            if indegree[y] == 0 {
                queue.push(y);
            }
        }
    }
    seen < n
}

/// The arcs created by eliminating `v`: one from each in-neighbor to
/// each distinct out-neighbor. Arcs already present are included.
pub fn fill_in_of(g: &Digraph, v: usize) -> Result<BTreeSet<(usize, usize)>, UnknownVertex> {
    if v >= g.vertex_count() {
        return Err(UnknownVertex { vertex: v, size: g.vertex_count() });
    }
    let mut fill = BTreeSet::new();
    for &x in g.in_neighbors(v) {
        for &y in g.out_neighbors(v) {
            if x != y {
                fill.insert((x, y));
            }
        }
    }
    Ok(fill)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderingStrategy {
    /// Greedy minimum total degree over the residual graph.
    MinDegree,
    /// Vertices in index order.
    InputOrder,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationOrdering {
    pub order: Vec<usize>,
    pub strategy: OrderingStrategy,
}

impl EliminationOrdering {
    pub fn input_order(vertices: usize) -> Self {
        EliminationOrdering { order: (0..vertices).collect(), strategy: OrderingStrategy::InputOrder }
    }

    fn assert_permutation_of(&self, vertices: usize) {
        assert_eq!(self.order.len(), vertices, "ordering must cover every vertex");
        let mut seen = vec![false; vertices];
        for &v in &self.order {
            assert!(v < vertices && !seen[v], "ordering must be a permutation");
            seen[v] = true;
        }
    }
}

/// One elimination step: the vertex removed and the fill-in arcs its
/// removal produced in the residual graph of that moment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationStep {
    pub vertex: usize,
    pub fill_in: BTreeSet<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct EliminationResult {
    pub ordering: EliminationOrdering,
    /// One step per eliminated vertex; the final vertex of the ordering
    /// never gets eliminated.
    pub steps: Vec<EliminationStep>,
    /// Union of the per-step fill-ins.
    pub fill_in: BTreeSet<(usize, usize)>,
    /// Original arcs plus `fill_in`, on the full vertex set.
    pub elimination_graph: Digraph,
    /// Unordered vertex pairs `(p, q)` with `p < q` joined by arcs in
    /// both directions in the elimination graph.
    pub two_cycle_pairs: BTreeSet<(usize, usize)>,
    /// Largest residual total degree seen at elimination time.
    pub width: usize,
}

/// Runs the elimination process over `ordering`, recording per-step
/// fill-ins and the final elimination graph.
///
/// Panics if the ordering is not a permutation of the vertices or if the
/// graph contains a self-loop; the planning pipeline never builds either.
pub fn eliminate(g: &Digraph, ordering: &EliminationOrdering) -> EliminationResult {
    let n = g.vertex_count();
    ordering.assert_permutation_of(n);
    assert!((0..n).all(|v| !g.has_arc(v, v)), "input graph must not contain self-loops");

    let mut work = g.clone();
    let mut steps = Vec::new();
    let mut width = 0;
    for &v in ordering.order.iter().take(n.saturating_sub(1)) {
        width = width.max(work.total_degree(v));
        let fill = fill_in_of(&work, v).expect("ordering vertex in range");
        work.remove_vertex(v);
        for &(x, y) in &fill {
            work.add_arc(x, y);
        }
        steps.push(EliminationStep { vertex: v, fill_in: fill });
    }

    let fill_in: BTreeSet<(usize, usize)> =
        steps.iter().flat_map(|s| s.fill_in.iter().copied()).collect();
    let mut elimination_graph = g.clone();
    for &(x, y) in &fill_in {
        elimination_graph.add_arc(x, y);
    }
    let mut two_cycle_pairs = BTreeSet::new();
    for (x, y) in elimination_graph.arcs() {
        if x < y && elimination_graph.has_arc(y, x) {
            two_cycle_pairs.insert((x, y));
        }
    }

    EliminationResult {
        ordering: ordering.clone(),
        steps,
        fill_in,
        elimination_graph,
        two_cycle_pairs,
        width,
    }
}

/// Greedy elimination ordering: repeatedly eliminate the vertex with the
/// smallest total degree in the residual graph (which includes fill-ins
/// from earlier steps), breaking ties toward the smallest index.
pub fn min_degree_ordering(g: &Digraph) -> EliminationOrdering {
    let n = g.vertex_count();
    let mut work = g.clone();
    let mut alive: BTreeSet<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(&v) = alive.iter().min_by_key(|&&v| (work.total_degree(v), v)) {
        alive.remove(&v);
        order.push(v);
        if !alive.is_empty() {
            let fill = fill_in_of(&work, v).expect("alive vertex in range");
            work.remove_vertex(v);
            for &(x, y) in &fill {
                work.add_arc(x, y);
            }
        }
    }
    EliminationOrdering { order, strategy: OrderingStrategy::MinDegree }
}
