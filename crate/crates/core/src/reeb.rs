//! Reeb graph of the ε-connected components over time.
//!
//! Vertices mark the times at which components start, end, merge or split;
//! each edge carries the component that exists between its endpoints. Every
//! entity follows a directed path from a start vertex to an end vertex.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use thiserror::Error;

use crate::connectivity::{ConnectivityError, DeleteOutcome, InsertOutcome, SpanningForest};
use crate::events::{all_events, initial_adjacency, EventKind};
use crate::groups::MaximalGroup;
use crate::model::{Dataset, EntitySet, ModelError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReebError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("connectivity failure during sweep: {0}")]
    Connectivity(#[from] ConnectivityError),
    #[error("Reeb graph invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexKind {
    Start,
    End,
    Merge,
    Split,
}

impl VertexKind {
    /// Expected `(in, out)` degree.
    pub fn degree(self) -> (usize, usize) {
        match self {
            VertexKind::Start => (0, 1),
            VertexKind::End => (1, 0),
            VertexKind::Merge => (2, 1),
            VertexKind::Split => (1, 2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VertexKind::Start => "start",
            VertexKind::End => "end",
            VertexKind::Merge => "merge",
            VertexKind::Split => "split",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "start" => Some(VertexKind::Start),
            "end" => Some(VertexKind::End),
            "merge" => Some(VertexKind::Merge),
            "split" => Some(VertexKind::Split),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReebVertex<T> {
    pub time: T,
    pub kind: VertexKind,
    pub incoming: Vec<usize>,
    pub outgoing: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReebEdge {
    pub from: usize,
    pub to: usize,
    pub component: EntitySet,
}

/// Directed acyclic graph of components. Vertex and edge ids are indices
/// into [`ReebGraph::vertices`] and [`ReebGraph::edges`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReebGraph<T> {
    num_entities: usize,
    start_time: T,
    end_time: T,
    vertices: Vec<ReebVertex<T>>,
    edges: Vec<ReebEdge>,
}

impl<T: Scalar> ReebGraph<T> {
    pub fn empty(num_entities: usize, start_time: T, end_time: T) -> Self {
        Self { num_entities, start_time, end_time, vertices: Vec::new(), edges: Vec::new() }
    }

    /// Assembles a graph from vertex `(time, kind)` pairs and edges
    /// `(from, to, component)`. No invariants are checked.
    pub fn from_parts(
        num_entities: usize,
        start_time: T,
        end_time: T,
        vertices: Vec<(T, VertexKind)>,
        edges: Vec<(usize, usize, EntitySet)>,
    ) -> Result<Self, ReebError> {
        let mut g = Self::empty(num_entities, start_time, end_time);
        for (time, kind) in vertices {
            g.add_vertex(time, kind);
        }
        for (from, to, component) in edges {
            if from >= g.vertices.len() || to >= g.vertices.len() {
                return Err(ReebError::Invariant(format!("edge ({from}, {to}) references a missing vertex")));
            }
            if component.capacity() != num_entities {
                return Err(ReebError::Invariant("edge component has the wrong capacity".into()));
            }
            g.add_edge(from, to, component);
        }
        Ok(g)
    }

    pub(crate) fn add_vertex(&mut self, time: T, kind: VertexKind) -> usize {
        self.vertices.push(ReebVertex { time, kind, incoming: Vec::new(), outgoing: Vec::new() });
        self.vertices.len() - 1
    }

    pub(crate) fn add_edge(&mut self, from: usize, to: usize, component: EntitySet) -> usize {
        let id = self.edges.len();
        self.edges.push(ReebEdge { from, to, component });
        self.vertices[from].outgoing.push(id);
        self.vertices[to].incoming.push(id);
        id
    }

    pub fn num_entities(&self) -> usize {
        self.num_entities
    }

    pub fn start_time(&self) -> T {
        self.start_time
    }

    pub fn end_time(&self) -> T {
        self.end_time
    }

    pub fn vertices(&self) -> &[ReebVertex<T>] {
        &self.vertices
    }

    pub fn edges(&self) -> &[ReebEdge] {
        &self.edges
    }

    pub fn vertex(&self, id: usize) -> &ReebVertex<T> {
        &self.vertices[id]
    }

    pub fn edge(&self, id: usize) -> &ReebEdge {
        &self.edges[id]
    }

    pub fn edge_interval(&self, id: usize) -> (T, T) {
        let e = &self.edges[id];
        (self.vertices[e.from].time, self.vertices[e.to].time)
    }

    pub fn count_kind(&self, kind: VertexKind) -> usize {
        self.vertices.iter().filter(|v| v.kind == kind).count()
    }

    /// Vertices ordered so that every edge points forward; ties between
    /// available vertices are broken by `(time, id)`.
    pub fn topological_order(&self) -> Result<Vec<usize>, ReebError> {
        struct Key<T>(T, usize);
        impl<T: Scalar> PartialEq for Key<T> {
            fn eq(&self, other: &Self) -> bool {
                self.cmp(other).is_eq()
            }
        }
        impl<T: Scalar> Eq for Key<T> {}
        impl<T: Scalar> Ord for Key<T> {
            fn cmp(&self, other: &Self) -> std::cmp::Ordering {
                self.0.total_order(other.0).then(self.1.cmp(&other.1))
            }
        }
        impl<T: Scalar> PartialOrd for Key<T> {
            fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
                Some(self.cmp(other))
            }
        }

        let mut indeg: Vec<usize> = self.vertices.iter().map(|v| v.incoming.len()).collect();
        let mut heap: BinaryHeap<Reverse<Key<T>>> = self
            .vertices
            .iter()
            .enumerate()
            .filter(|(i, _)| indeg[*i] == 0)
            .map(|(i, v)| Reverse(Key(v.time, i)))
            .collect();
        let mut order = Vec::with_capacity(self.vertices.len());
        while let Some(Reverse(Key(_, v))) = heap.pop() {
            order.push(v);
            for &e in &self.vertices[v].outgoing {
                let w = self.edges[e].to;
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    heap.push(Reverse(Key(self.vertices[w].time, w)));
                }
            }
        }
        if order.len() != self.vertices.len() {
            return Err(ReebError::Invariant("graph has a directed cycle".into()));
        }
        Ok(order)
    }

    /// Components of the edges alive just after time `t` (at the end time:
    /// the components entering end vertices).
    pub fn partition_at(&self, t: T) -> Vec<EntitySet> {
        let mut blocks: Vec<EntitySet> = self
            .edges
            .iter()
            .filter(|e| {
                let (a, b) = (self.vertices[e.from].time, self.vertices[e.to].time);
                if t >= self.end_time {
                    self.vertices[e.to].kind == VertexKind::End
                } else {
                    a <= t && t < b
                }
            })
            .map(|e| e.component.clone())
            .collect();
        blocks.sort();
        blocks
    }

    /// Edge ids along each entity's path, in path order.
    pub fn entity_paths(&self) -> Vec<Vec<usize>> {
        let mut paths = vec![Vec::new(); self.num_entities];
        for v in self.vertices.iter().filter(|v| v.kind == VertexKind::Start) {
            for &first in &v.outgoing {
                for x in self.edges[first].component.iter() {
                    let path = &mut paths[x];
                    let mut e = first;
                    loop {
                        path.push(e);
                        let to = &self.vertices[self.edges[e].to];
                        match to.outgoing.iter().find(|&&o| self.edges[o].component.contains(x)) {
                            Some(&next) => e = next,
                            None => break,
                        }
                    }
                }
            }
        }
        paths
    }

    /// Audits the degree table, component algebra at every vertex, time
    /// order along edges, acyclicity and the start/end partitions.
    pub fn check_invariants(&self) -> Result<(), ReebError> {
        self.audit(false)
    }

    /// The audit for edge subgraphs such as the output of [`reduce`]:
    /// vertices may have lost edges, so degrees only have upper bounds, the
    /// union rule applies where a vertex kept all its edges, and start and
    /// end components need only be disjoint.
    pub fn check_subgraph_invariants(&self) -> Result<(), ReebError> {
        self.audit(true)
    }

    fn audit(&self, subgraph: bool) -> Result<(), ReebError> {
        let fail = |msg: String| Err(ReebError::Invariant(msg));
        for (i, v) in self.vertices.iter().enumerate() {
            let deg = (v.incoming.len(), v.outgoing.len());
            let full = v.kind.degree();
            if deg != full && !(subgraph && deg.0 <= full.0 && deg.1 <= full.1) {
                return fail(format!("vertex {i} ({}) has degree {deg:?}", v.kind.name()));
            }
            if !(v.time >= self.start_time && v.time <= self.end_time) {
                return fail(format!("vertex {i} time {} outside the observation window", v.time));
            }
            match v.kind {
                VertexKind::Start if v.time != self.start_time => {
                    return fail(format!("start vertex {i} not at the start time"));
                }
                VertexKind::End if v.time != self.end_time => {
                    return fail(format!("end vertex {i} not at the end time"));
                }
                _ => {}
            }
            if deg != full {
                continue;
            }
            let comp = |e: usize| &self.edges[e].component;
            let (whole, parts) = match v.kind {
                VertexKind::Merge => (comp(v.outgoing[0]), [comp(v.incoming[0]), comp(v.incoming[1])]),
                VertexKind::Split => (comp(v.incoming[0]), [comp(v.outgoing[0]), comp(v.outgoing[1])]),
                _ => continue,
            };
            if !parts[0].is_disjoint(parts[1]) || &parts[0].union(parts[1]) != whole {
                return fail(format!("vertex {i} ({}) breaks the disjoint union rule", v.kind.name()));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.component.is_empty() {
                return fail(format!("edge {i} has an empty component"));
            }
            if self.vertices[e.from].time > self.vertices[e.to].time {
                return fail(format!("edge {i} runs backwards in time"));
            }
        }
        self.topological_order()?;
        for kind in [VertexKind::Start, VertexKind::End] {
            let mut seen = EntitySet::empty(self.num_entities);
            for v in self.vertices.iter().filter(|v| v.kind == kind) {
                let Some(&e) = (if kind == VertexKind::Start { v.outgoing.first() } else { v.incoming.first() }) else {
                    continue;
                };
                let c = &self.edges[e].component;
                if !seen.is_disjoint(c) {
                    return fail(format!("{} components overlap", kind.name()));
                }
                seen.union_with(c);
            }
            if !subgraph && seen.len() != self.num_entities {
                return fail(format!("{} components do not cover every entity", kind.name()));
            }
        }
        Ok(())
    }

    /// Subgraph induced by the edges of `keep`, renumbered densely in id order.
    fn edge_subgraph(&self, keep: &[bool]) -> Self {
        let kept = || self.edges.iter().zip(keep).filter(|(_, &k)| k).map(|(e, _)| e);
        let mut used = vec![false; self.vertices.len()];
        for e in kept() {
            used[e.from] = true;
            used[e.to] = true;
        }
        let mut out = Self::empty(self.num_entities, self.start_time, self.end_time);
        let mut vmap = vec![usize::MAX; self.vertices.len()];
        for (v, _) in used.iter().enumerate().filter(|(_, &u)| u) {
            vmap[v] = out.add_vertex(self.vertices[v].time, self.vertices[v].kind);
        }
        for e in kept() {
            out.add_edge(vmap[e.from], vmap[e.to], e.component.clone());
        }
        out
    }
}

/// Sweeps all events in order, maintaining the components and the latest
/// Reeb vertex of each component.
pub fn build_reeb<T: Scalar>(ds: &Dataset<T>, eps: T) -> Result<ReebGraph<T>, ReebError> {
    ds.validate()?;
    if !(eps.is_finite() && eps >= T::zero()) {
        return Err(ModelError::InvalidParams("eps must be finite and non-negative".into()).into());
    }
    let n = ds.num_entities();
    let events = all_events(ds, eps);

    // Weight of a live edge = sweep rank of its disconnect event, so deletions
    // happen in strictly increasing weight order.
    let mut next_event: HashMap<(usize, usize), usize> = HashMap::new();
    let mut weight = vec![usize::MAX; events.len()];
    for (i, ev) in events.iter().enumerate().rev() {
        if ev.kind == EventKind::Connect {
            weight[i] = next_event.get(&(ev.a, ev.b)).copied().unwrap_or(usize::MAX);
        }
        next_event.insert((ev.a, ev.b), i);
    }

    let mut forest = SpanningForest::new(n);
    for (a, b) in initial_adjacency(ds, eps) {
        let w = next_event.get(&(a, b)).copied().unwrap_or(usize::MAX);
        forest.insert(a, b, w)?;
    }

    let mut graph = ReebGraph::empty(n, ds.start_time(), ds.end_time());
    // component label (smallest member) -> (latest vertex, component set)
    let mut active: HashMap<usize, (usize, EntitySet)> = HashMap::new();
    for x in 0..n {
        if forest.component_of(x) == x {
            let v = graph.add_vertex(ds.start_time(), VertexKind::Start);
            active.insert(x, (v, EntitySet::from_indices(n, forest.component_members(x))));
        }
    }

    for (i, ev) in events.iter().enumerate() {
        match ev.kind {
            EventKind::Connect => {
                let (la, lb) = (forest.component_of(ev.a), forest.component_of(ev.b));
                if forest.insert(ev.a, ev.b, weight[i])? == InsertOutcome::Merged {
                    let (va, ca) = active.remove(&la).expect("active component");
                    let (vb, cb) = active.remove(&lb).expect("active component");
                    let v = graph.add_vertex(ev.time, VertexKind::Merge);
                    let merged = ca.union(&cb);
                    graph.add_edge(va, v, ca);
                    graph.add_edge(vb, v, cb);
                    active.insert(forest.component_of(ev.a), (v, merged));
                }
            }
            EventKind::Disconnect => {
                let label = forest.component_of(ev.a);
                if forest.delete(ev.a, ev.b)? == DeleteOutcome::Split {
                    let (u, whole) = active.remove(&label).expect("active component");
                    let v = graph.add_vertex(ev.time, VertexKind::Split);
                    graph.add_edge(u, v, whole.clone());
                    let (small, large) = if forest.component_size(ev.a) <= forest.component_size(ev.b) {
                        (ev.a, ev.b)
                    } else {
                        (ev.b, ev.a)
                    };
                    let cs = EntitySet::from_indices(n, forest.component_members(small));
                    let cl = whole.difference(&cs);
                    active.insert(forest.component_of(small), (v, cs));
                    active.insert(forest.component_of(large), (v, cl));
                }
            }
        }
    }

    let mut rest: Vec<_> = active.into_iter().collect();
    rest.sort_by_key(|(label, _)| *label);
    for (_, (u, c)) in rest {
        let v = graph.add_vertex(ds.end_time(), VertexKind::End);
        graph.add_edge(u, v, c);
    }
    Ok(graph)
}

/// Keeps the edges that support at least one of `groups`: the group's
/// entities lie in the edge's component and the two time intervals meet.
pub fn reduce<T: Scalar>(reeb: &ReebGraph<T>, groups: &[MaximalGroup<T>]) -> ReebGraph<T> {
    let paths = reeb.entity_paths();
    let mut keep = vec![false; reeb.edges().len()];
    for g in groups {
        let Some(x) = g.entities.first() else { continue };
        let path = &paths[x];
        let first = path.partition_point(|&e| reeb.edge_interval(e).1 < g.interval.start);
        for &e in &path[first..] {
            let (from, to) = reeb.edge_interval(e);
            if from > g.interval.end {
                break;
            }
            if to >= g.interval.start && g.entities.is_subset(&reeb.edge(e).component) {
                keep[e] = true;
            }
        }
    }
    reeb.edge_subgraph(&keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::compute_maximal_groups;
    use crate::model::Point;

    fn line(times: Vec<f64>, xs: Vec<Vec<f64>>) -> Dataset<f64> {
        let positions = xs.into_iter().map(|row| row.into_iter().map(|x| Point::new(x, 0.0)).collect()).collect();
        Dataset::with_index_ids(times, positions).unwrap()
    }

    #[test]
    fn single_entity_is_one_edge() {
        let ds = line(vec![0.0, 1.0, 2.0], vec![vec![0.0, 1.0, 5.0]]);
        let reeb = build_reeb(&ds, 0.5).unwrap();
        assert_eq!(reeb.vertices().len(), 2);
        assert_eq!(reeb.edges().len(), 1);
        assert_eq!(reeb.edge(0).component, EntitySet::full(1));
        reeb.check_invariants().unwrap();
    }

    #[test]
    fn third_entity_joins_a_pair() {
        // a and b stay together, c arrives at t = 1
        let ds = line(vec![0.0, 2.0], vec![vec![0.0, 0.0], vec![0.5, 0.5], vec![2.5, 0.5]]);
        let reeb = build_reeb(&ds, 0.5).unwrap();
        assert_eq!(reeb.vertices().len(), 4);
        assert_eq!(reeb.edges().len(), 3);
        assert_eq!(reeb.count_kind(VertexKind::Merge), 1);
        let merge = reeb.vertices().iter().find(|v| v.kind == VertexKind::Merge).unwrap();
        assert!((merge.time - 1.0).abs() < 1e-9);
        assert_eq!(reeb.partition_at(0.5).len(), 2);
        assert_eq!(reeb.partition_at(1.5), vec![EntitySet::full(3)]);
        reeb.check_invariants().unwrap();
    }

    #[test]
    fn one_time_step_needs_no_interior_vertices() {
        let ds = line(vec![0.0, 1.0], vec![vec![0.0, 0.0], vec![5.0, 5.0]]);
        let reeb = build_reeb(&ds, 1.0).unwrap();
        assert_eq!(reeb.vertices().len(), 4);
        assert_eq!(reeb.count_kind(VertexKind::Start), 2);
        assert_eq!(reeb.count_kind(VertexKind::End), 2);
    }

    #[test]
    fn entity_paths_follow_membership() {
        let ds = line(vec![0.0, 2.0], vec![vec![0.0, 0.0], vec![0.5, 0.5], vec![3.5, 0.5]]);
        let reeb = build_reeb(&ds, 0.5).unwrap();
        for (x, path) in reeb.entity_paths().iter().enumerate() {
            assert!(path.iter().all(|&e| reeb.edge(e).component.contains(x)));
            let (s, _) = reeb.edge_interval(path[0]);
            let (_, t) = reeb.edge_interval(*path.last().unwrap());
            assert_eq!((s, t), (0.0, 2.0));
        }
    }

    #[test]
    fn reduce_with_unit_group_size_keeps_everything() {
        let ds = line(vec![0.0, 1.0, 2.0], vec![vec![0.0, 2.0, 0.0], vec![0.5, 0.5, 0.5], vec![3.0, 0.0, 3.0]]);
        let reeb = build_reeb(&ds, 0.5).unwrap();
        let groups = compute_maximal_groups(&reeb, 1, 0.0).unwrap();
        let reduced = reduce(&reeb, &groups);
        assert_eq!(reduced.edges().len(), reeb.edges().len());
        reduced.check_invariants().unwrap();
        let pairs = compute_maximal_groups(&reeb, 2, 0.0).unwrap();
        let partial = reduce(&reeb, &pairs);
        assert!(partial.edges().len() < reeb.edges().len());
        partial.check_subgraph_invariants().unwrap();
    }

    #[test]
    fn reduce_without_groups_is_empty() {
        let ds = line(vec![0.0, 1.0], vec![vec![0.0, 0.0], vec![0.5, 0.5]]);
        let reeb = build_reeb(&ds, 0.5).unwrap();
        let groups = compute_maximal_groups(&reeb, 3, 0.0).unwrap();
        assert!(groups.is_empty());
        let reduced = reduce(&reeb, &groups);
        assert!(reduced.vertices().is_empty());
        assert!(reduced.edges().is_empty());
    }

    #[test]
    fn invariants_catch_a_broken_partition() {
        let reeb = build_reeb(&line(vec![0.0, 1.0], vec![vec![0.0, 0.0], vec![5.0, 5.0]]), 0.5).unwrap();
        let vertices = reeb.vertices().iter().map(|v| (v.time, v.kind)).collect();
        let mut edges: Vec<_> = reeb.edges().iter().map(|e| (e.from, e.to, e.component.clone())).collect();
        edges[1].2 = EntitySet::full(2);
        let broken = ReebGraph::from_parts(2, 0.0, 1.0, vertices, edges);
        assert!(broken.map(|g| g.check_invariants()).map_or(true, |r| r.is_err()));
    }
}
