//! α-robust grouping structure.
//!
//! Relaxing connectivity to a window of width α lets split vertices move
//! forward in time by up to α/2 and merge vertices backward by the same
//! amount. When a split runs into a merge directly after it, the two
//! vertices either cancel (the branches that split off merge right back) or
//! pass each other (the merge is rewired to happen first). Encounters are
//! processed in order of the time `γ` at which they happen.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::model::EntitySet;
use crate::reeb::{ReebGraph, VertexKind};
use crate::scalar::{two, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RobustError {
    #[error("alpha must be finite and non-negative, got {0}")]
    InvalidAlpha(f64),
    #[error("robust Reeb graph invariant violated: {0}")]
    Invariant(String),
}

/// A split vertex meeting the merge vertex at the end of its out-edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Encounter<T> {
    /// Half the duration of the edge in original times.
    pub gamma: T,
    pub split_vertex: usize,
    pub merge_vertex: usize,
    /// Edge joining the two vertices. Edge ids are never reused, so an entry
    /// whose edge is gone is stale.
    pub edge: usize,
}

impl<T: Scalar> Encounter<T> {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.gamma
            .total_order(other.gamma)
            .then(self.split_vertex.cmp(&other.split_vertex))
            .then(self.merge_vertex.cmp(&other.merge_vertex))
            .then(self.edge.cmp(&other.edge))
    }
}

#[derive(Debug, Clone, Copy)]
struct Keyed<T>(Encounter<T>);

impl<T: Scalar> PartialEq for Keyed<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Keyed<T> {}

impl<T: Scalar> PartialOrd for Keyed<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Keyed<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.key_cmp(&other.0)
    }
}

/// Min-queue of encounters ordered by `(γ, split id, merge id)`.
#[derive(Debug, Clone, Default)]
pub struct EncounterQueue<T: Scalar> {
    heap: BinaryHeap<Reverse<Keyed<T>>>,
}

impl<T: Scalar> EncounterQueue<T> {
    pub fn new() -> Self {
        Self { heap: BinaryHeap::new() }
    }

    pub fn push(&mut self, e: Encounter<T>) {
        self.heap.push(Reverse(Keyed(e)));
    }

    fn extend_from(&mut self, e: Option<Encounter<T>>) {
        if let Some(e) = e {
            self.push(e);
        }
    }

    pub fn pop(&mut self) -> Option<Encounter<T>> {
        self.heap.pop().map(|Reverse(Keyed(e))| e)
    }

    pub fn peek(&self) -> Option<&Encounter<T>> {
        self.heap.peek().map(|Reverse(Keyed(e))| e)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// Entries in pop order.
    pub fn into_sorted_vec(mut self) -> Vec<Encounter<T>> {
        let mut out = Vec::with_capacity(self.len());
        while let Some(e) = self.pop() {
            out.push(e);
        }
        out
    }
}

/// Counts of the rewiring steps done by [`robustify_with_stats`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RobustStats {
    pub passings: usize,
    pub collapses: usize,
}

impl RobustStats {
    pub fn encounters(&self) -> usize {
        self.passings + self.collapses
    }
}

fn check_alpha<T: Scalar>(alpha: T) -> Result<(), RobustError> {
    if alpha.is_finite() && alpha >= T::zero() {
        Ok(())
    } else {
        Err(RobustError::InvalidAlpha(alpha.as_f64()))
    }
}

/// Every split→merge edge lasting at most `alpha`, keyed by half its length.
pub fn find_initial_encounters<T: Scalar>(reeb: &ReebGraph<T>, alpha: T) -> EncounterQueue<T> {
    let mut queue = EncounterQueue::new();
    let limit = alpha / two();
    for (id, e) in reeb.edges().iter().enumerate() {
        let (u, v) = (reeb.vertex(e.from), reeb.vertex(e.to));
        if u.kind == VertexKind::Split && v.kind == VertexKind::Merge {
            let gamma = (v.time - u.time) / two();
            if gamma <= limit {
                queue.push(Encounter { gamma, split_vertex: e.from, merge_vertex: e.to, edge: id });
            }
        }
    }
    queue
}

#[derive(Debug, Clone)]
struct WorkEdge {
    from: usize,
    to: usize,
    component: EntitySet,
    alive: bool,
}

#[derive(Debug, Clone)]
struct WorkVertex<T> {
    time: T,
    kind: VertexKind,
    incoming: Vec<usize>,
    outgoing: Vec<usize>,
    alive: bool,
}

/// Mutable copy of a Reeb graph that keeps original vertex times.
struct Work<T> {
    vertices: Vec<WorkVertex<T>>,
    edges: Vec<WorkEdge>,
}

impl<T: Scalar> Work<T> {
    fn from_graph(reeb: &ReebGraph<T>) -> Self {
        Self {
            vertices: reeb
                .vertices()
                .iter()
                .map(|v| WorkVertex {
                    time: v.time,
                    kind: v.kind,
                    incoming: v.incoming.clone(),
                    outgoing: v.outgoing.clone(),
                    alive: true,
                })
                .collect(),
            edges: reeb
                .edges()
                .iter()
                .map(|e| WorkEdge { from: e.from, to: e.to, component: e.component.clone(), alive: true })
                .collect(),
        }
    }

    fn new_edge(&mut self, from: usize, to: usize, component: EntitySet) -> usize {
        self.edges.push(WorkEdge { from, to, component, alive: true });
        self.edges.len() - 1
    }

    fn kill_edge(&mut self, e: usize) {
        self.edges[e].alive = false;
    }

    fn replace(list: &mut [usize], old: usize, new: usize) {
        let slot = list.iter_mut().find(|x| **x == old).expect("edge listed at its endpoint");
        *slot = new;
    }

    fn other(list: &[usize], e: usize) -> usize {
        if list[0] == e {
            list[1]
        } else {
            list[0]
        }
    }

    fn candidate(&self, e: usize, limit: T) -> Option<Encounter<T>> {
        let edge = &self.edges[e];
        let (u, v) = (&self.vertices[edge.from], &self.vertices[edge.to]);
        if u.kind != VertexKind::Split || v.kind != VertexKind::Merge {
            return None;
        }
        let gamma = (v.time - u.time) / two();
        (gamma <= limit).then_some(Encounter { gamma, split_vertex: edge.from, merge_vertex: edge.to, edge: e })
    }

    fn is_current(&self, enc: &Encounter<T>) -> bool {
        let e = &self.edges[enc.edge];
        e.alive && e.from == enc.split_vertex && e.to == enc.merge_vertex
    }

    /// Both out-edges of `u` end at `v`: the vertices cancel and the four
    /// edges around them fuse into one.
    fn collapse(&mut self, u: usize, v: usize) -> usize {
        let a = self.vertices[u].incoming[0];
        let h = self.vertices[v].outgoing[0];
        let (p, z) = (self.edges[a].from, self.edges[h].to);
        let component = self.edges[a].component.clone();
        for e in [a, h, self.vertices[u].outgoing[0], self.vertices[u].outgoing[1]] {
            self.kill_edge(e);
        }
        let fused = self.new_edge(p, z, component);
        Self::replace(&mut self.vertices[p].outgoing, a, fused);
        Self::replace(&mut self.vertices[z].incoming, h, fused);
        for x in [u, v] {
            let vx = &mut self.vertices[x];
            vx.alive = false;
            vx.incoming.clear();
            vx.outgoing.clear();
        }
        fused
    }

    /// Rewires `p → u → {v, w}`, `{u, q} → v → z` into
    /// `{p, q} → v → u → {w, z}`. Returns the new edges `p → v` and `u → z`.
    fn pass(&mut self, u: usize, v: usize, e: usize) -> (usize, usize) {
        let a = self.vertices[u].incoming[0];
        let g = Self::other(&self.vertices[v].incoming, e);
        let h = self.vertices[v].outgoing[0];
        let (p, z) = (self.edges[a].from, self.edges[h].to);
        let ca = self.edges[a].component.clone();
        let middle = ca.union(&self.edges[g].component);
        let ch = self.edges[h].component.clone();
        for x in [a, e, h] {
            self.kill_edge(x);
        }
        let a2 = self.new_edge(p, v, ca);
        let e2 = self.new_edge(v, u, middle);
        let h2 = self.new_edge(u, z, ch);
        Self::replace(&mut self.vertices[p].outgoing, a, a2);
        Self::replace(&mut self.vertices[v].incoming, e, a2);
        self.vertices[v].outgoing = vec![e2];
        self.vertices[u].incoming = vec![e2];
        Self::replace(&mut self.vertices[u].outgoing, e, h2);
        Self::replace(&mut self.vertices[z].incoming, h, h2);
        (a2, h2)
    }

    /// Compacts the live part into a Reeb graph with shifted vertex times.
    fn finish(self, template: &ReebGraph<T>, shift: T) -> Result<ReebGraph<T>, RobustError> {
        let (t0, t1) = (template.start_time(), template.end_time());
        let mut vmap = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        for (i, v) in self.vertices.iter().enumerate().filter(|(_, v)| v.alive) {
            let time = match v.kind {
                VertexKind::Split => (v.time + shift).min(t1),
                VertexKind::Merge => (v.time - shift).max(t0),
                _ => v.time,
            };
            vmap[i] = vertices.len();
            vertices.push((time, v.kind));
        }
        let mut edges = Vec::new();
        for e in self.edges.iter().filter(|e| e.alive) {
            let (from, to) = (vmap[e.from], vmap[e.to]);
            if vertices[from].0 > vertices[to].0 {
                return Err(RobustError::Invariant(format!(
                    "edge from {} at {} to {} at {} runs backwards after shifting",
                    vertices[from].1.name(),
                    vertices[from].0,
                    vertices[to].1.name(),
                    vertices[to].0
                )));
            }
            edges.push((from, to, e.component.clone()));
        }
        ReebGraph::from_parts(template.num_entities(), t0, t1, vertices, edges)
            .map_err(|err| RobustError::Invariant(err.to_string()))
    }
}

/// The Reeb graph of the α-robust components: every split/merge encounter
/// with `γ ≤ α/2` is resolved, then splits are moved to `t + α/2` and merges
/// to `t − α/2`, clamped to the observation window.
pub fn robustify<T: Scalar>(reeb: &ReebGraph<T>, alpha: T) -> Result<ReebGraph<T>, RobustError> {
    robustify_with_stats(reeb, alpha).map(|(g, _)| g)
}

/// [`robustify`] that also reports how many passings and collapses it made.
pub fn robustify_with_stats<T: Scalar>(
    reeb: &ReebGraph<T>,
    alpha: T,
) -> Result<(ReebGraph<T>, RobustStats), RobustError> {
    check_alpha(alpha)?;
    let mut stats = RobustStats::default();
    if alpha == T::zero() {
        return Ok((reeb.clone(), stats));
    }
    let limit = alpha / two();
    let mut queue = find_initial_encounters(reeb, alpha);
    let mut work = Work::from_graph(reeb);

    while let Some(enc) = queue.pop() {
        if !work.is_current(&enc) {
            continue;
        }
        let (u, v) = (enc.split_vertex, enc.merge_vertex);
        let outs = &work.vertices[u].outgoing;
        if work.edges[outs[0]].to == v && work.edges[outs[1]].to == v {
            let fused = work.collapse(u, v);
            stats.collapses += 1;
            queue.extend_from(work.candidate(fused, limit));
        } else {
            let (a2, h2) = work.pass(u, v, enc.edge);
            stats.passings += 1;
            queue.extend_from(work.candidate(a2, limit));
            queue.extend_from(work.candidate(h2, limit));
        }
    }
    let out = work.finish(reeb, limit)?;
    Ok((out, stats))
}
