//! Dynamic connectivity for graphs whose edge deletion times are known when
//! the edges are inserted.
//!
//! Each edge carries a weight equal to its deletion time (or any value ordered
//! the same way). The structure keeps a maximum-weight spanning forest in a
//! link-cut tree with path-minimum queries: an inserted edge that closes a
//! cycle replaces the lightest edge on the cycle when it outlives it. Because
//! edges are deleted in weight order, deleting a forest edge never leaves a
//! replacement behind, so a forest deletion is exactly a component split.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConnectivityError {
    #[error("edge ({0}, {1}) already present")]
    DuplicateEdge(usize, usize),
    #[error("edge ({0}, {1}) not present")]
    MissingEdge(usize, usize),
    #[error("self loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {0} out of range")]
    InvalidVertex(usize),
}

const NIL: usize = usize::MAX;

#[derive(Debug, Clone)]
struct LctNode<W> {
    ch: [usize; 2],
    parent: usize,
    flip: bool,
    /// `None` stands for +∞ (vertex nodes).
    weight: Option<W>,
    /// Node with the minimum weight in this splay subtree.
    min: usize,
}

/// Link-cut tree over vertex nodes and edge nodes, aggregating path minima.
#[derive(Debug, Clone)]
struct LinkCut<W> {
    nodes: Vec<LctNode<W>>,
    free: Vec<usize>,
}

impl<W: Ord + Copy> LinkCut<W> {
    fn new(vertices: usize) -> Self {
        let nodes = (0..vertices)
            .map(|i| LctNode { ch: [NIL, NIL], parent: NIL, flip: false, weight: None, min: i })
            .collect();
        Self { nodes, free: Vec::new() }
    }

    fn alloc(&mut self, weight: W) -> usize {
        let node = LctNode { ch: [NIL, NIL], parent: NIL, flip: false, weight: Some(weight), min: 0 };
        let id = match self.free.pop() {
            Some(id) => {
                self.nodes[id] = node;
                id
            }
            None => {
                self.nodes.push(node);
                self.nodes.len() - 1
            }
        };
        self.nodes[id].min = id;
        id
    }

    fn release(&mut self, id: usize) {
        self.free.push(id);
    }

    fn lighter(&self, a: usize, b: usize) -> usize {
        match (self.nodes[a].weight, self.nodes[b].weight) {
            (Some(wa), Some(wb)) if wb < wa => b,
            (None, Some(_)) => b,
            _ => a,
        }
    }

    fn is_root(&self, x: usize) -> bool {
        let p = self.nodes[x].parent;
        p == NIL || (self.nodes[p].ch[0] != x && self.nodes[p].ch[1] != x)
    }

    fn pull(&mut self, x: usize) {
        let mut m = x;
        for c in self.nodes[x].ch {
            if c != NIL {
                m = self.lighter(m, self.nodes[c].min);
            }
        }
        self.nodes[x].min = m;
    }

    fn push(&mut self, x: usize) {
        if self.nodes[x].flip {
            self.nodes[x].flip = false;
            self.nodes[x].ch.swap(0, 1);
            for c in self.nodes[x].ch {
                if c != NIL {
                    self.nodes[c].flip ^= true;
                }
            }
        }
    }

    fn rotate(&mut self, x: usize) {
        let p = self.nodes[x].parent;
        let g = self.nodes[p].parent;
        let dir = usize::from(self.nodes[p].ch[1] == x);
        let b = self.nodes[x].ch[dir ^ 1];
        if !self.is_root(p) {
            let gd = usize::from(self.nodes[g].ch[1] == p);
            self.nodes[g].ch[gd] = x;
        }
        self.nodes[x].parent = g;
        self.nodes[x].ch[dir ^ 1] = p;
        self.nodes[p].parent = x;
        self.nodes[p].ch[dir] = b;
        if b != NIL {
            self.nodes[b].parent = p;
        }
        self.pull(p);
        self.pull(x);
    }

    fn splay(&mut self, x: usize) {
        let mut stack = vec![x];
        let mut y = x;
        while !self.is_root(y) {
            y = self.nodes[y].parent;
            stack.push(y);
        }
        while let Some(z) = stack.pop() {
            self.push(z);
        }
        while !self.is_root(x) {
            let p = self.nodes[x].parent;
            if !self.is_root(p) {
                let g = self.nodes[p].parent;
                let zigzig = (self.nodes[g].ch[1] == p) == (self.nodes[p].ch[1] == x);
                self.rotate(if zigzig { p } else { x });
            }
            self.rotate(x);
        }
    }

    fn access(&mut self, x: usize) {
        let mut last = NIL;
        let mut y = x;
        while y != NIL {
            self.splay(y);
            self.nodes[y].ch[1] = last;
            self.pull(y);
            last = y;
            y = self.nodes[y].parent;
        }
        self.splay(x);
    }

    fn make_root(&mut self, x: usize) {
        self.access(x);
        self.nodes[x].flip ^= true;
        self.push(x);
    }

    fn find_root(&mut self, x: usize) -> usize {
        self.access(x);
        let mut y = x;
        loop {
            self.push(y);
            let l = self.nodes[y].ch[0];
            if l == NIL {
                break;
            }
            y = l;
        }
        self.splay(y);
        y
    }

    fn link(&mut self, x: usize, y: usize) {
        self.make_root(x);
        self.nodes[x].parent = y;
    }

    fn cut(&mut self, x: usize, y: usize) {
        self.make_root(x);
        self.access(y);
        // x is now the left child of y and has no right child
        debug_assert_eq!(self.nodes[y].ch[0], x);
        self.nodes[y].ch[0] = NIL;
        self.nodes[x].parent = NIL;
        self.pull(y);
    }

    /// Lightest node on the tree path `x .. y` (both must be connected).
    fn path_min(&mut self, x: usize, y: usize) -> usize {
        self.make_root(x);
        self.access(y);
        self.nodes[y].min
    }
}

#[derive(Debug, Clone)]
struct EdgeEntry<W> {
    weight: W,
    /// Link-cut node when the edge belongs to the spanning forest.
    forest_node: Option<usize>,
}

/// What an insertion did to the component structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    /// The endpoints were in different components, which are now one.
    Merged,
    /// Same component before and after.
    Unchanged,
}

/// What a deletion did to the component structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeleteOutcome {
    /// The endpoints are now in different components.
    Split,
    /// Same component before and after.
    Unchanged,
}

/// Maximum-weight spanning forest of a dynamic graph on vertices `0..n`.
#[derive(Debug, Clone)]
pub struct SpanningForest<W> {
    lct: LinkCut<W>,
    edges: HashMap<(usize, usize), EdgeEntry<W>>,
    /// Non-forest edges ordered by weight.
    spare: BTreeSet<(W, usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    comp_of: Vec<usize>,
    members: Vec<BTreeSet<usize>>,
    free_comps: Vec<usize>,
    /// Endpoints of each link-cut edge node, indexed by node id.
    node_owner: Vec<(usize, usize)>,
}

impl<W: Ord + Copy> SpanningForest<W> {
    pub fn new(n: usize) -> Self {
        Self {
            lct: LinkCut::new(n),
            edges: HashMap::new(),
            spare: BTreeSet::new(),
            adjacency: vec![Vec::new(); n],
            comp_of: (0..n).collect(),
            members: (0..n).map(|i| BTreeSet::from([i])).collect(),
            free_comps: Vec::new(),
            node_owner: vec![(NIL, NIL); n],
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.comp_of.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    fn key(&self, a: usize, b: usize) -> Result<(usize, usize), ConnectivityError> {
        let n = self.num_vertices();
        for v in [a, b] {
            if v >= n {
                return Err(ConnectivityError::InvalidVertex(v));
            }
        }
        if a == b {
            return Err(ConnectivityError::SelfLoop(a));
        }
        Ok(if a < b { (a, b) } else { (b, a) })
    }

    pub fn contains_edge(&self, a: usize, b: usize) -> bool {
        self.key(a, b).is_ok_and(|k| self.edges.contains_key(&k))
    }

    /// Whether edge `(a, b)` is currently a forest edge.
    pub fn is_forest_edge(&self, a: usize, b: usize) -> bool {
        self.key(a, b)
            .ok()
            .and_then(|k| self.edges.get(&k))
            .is_some_and(|e| e.forest_node.is_some())
    }

    pub fn insert(&mut self, a: usize, b: usize, weight: W) -> Result<InsertOutcome, ConnectivityError> {
        let (a, b) = self.key(a, b)?;
        if self.edges.contains_key(&(a, b)) {
            return Err(ConnectivityError::DuplicateEdge(a, b));
        }
        if self.comp_of[a] != self.comp_of[b] {
            self.link_forest(a, b, weight);
            self.join_components(a, b);
            return Ok(InsertOutcome::Merged);
        }
        let lightest = self.lct.path_min(a, b);
        let lightest_weight = self.lct.nodes[lightest].weight.expect("path between distinct vertices has an edge");
        if weight > lightest_weight {
            let (x, y) = self.endpoints_of(lightest);
            self.unlink_forest(x, y);
            self.spare.insert((lightest_weight, x, y));
            self.link_forest(a, b, weight);
        } else {
            self.edges.insert((a, b), EdgeEntry { weight, forest_node: None });
            self.spare.insert((weight, a, b));
        }
        Ok(InsertOutcome::Unchanged)
    }

    pub fn delete(&mut self, a: usize, b: usize) -> Result<DeleteOutcome, ConnectivityError> {
        let (a, b) = self.key(a, b)?;
        let entry = self.edges.get(&(a, b)).ok_or(ConnectivityError::MissingEdge(a, b))?;
        let weight = entry.weight;
        if entry.forest_node.is_none() {
            self.edges.remove(&(a, b));
            self.spare.remove(&(weight, a, b));
            return Ok(DeleteOutcome::Unchanged);
        }
        self.unlink_forest(a, b);
        self.edges.remove(&(a, b));
        let side = self.smaller_side(a, b);

        // Any replacement must weigh at most `weight`; under the deletion
        // discipline there is none and this range is empty.
        let mut replacement = None;
        for &(w, x, y) in self.spare.range(..=(weight, usize::MAX, usize::MAX)) {
            if side.contains(&x) != side.contains(&y) {
                replacement = Some((w, x, y));
            }
        }
        if let Some((w, x, y)) = replacement {
            self.spare.remove(&(w, x, y));
            self.edges.remove(&(x, y));
            self.link_forest(x, y, w);
            return Ok(DeleteOutcome::Unchanged);
        }
        self.split_component(side);
        Ok(DeleteOutcome::Split)
    }

    pub fn same_component(&self, a: usize, b: usize) -> bool {
        self.comp_of[a] == self.comp_of[b]
    }

    /// Smallest vertex index in the component of `a`.
    pub fn component_of(&self, a: usize) -> usize {
        *self.members[self.comp_of[a]].first().expect("components are nonempty")
    }

    /// Vertices of the component of `a`, ascending.
    pub fn component_members(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.members[self.comp_of[a]].iter().copied()
    }

    pub fn component_size(&self, a: usize) -> usize {
        self.members[self.comp_of[a]].len()
    }

    /// Forest edges as `(a, b, weight)` with `a < b`, sorted.
    pub fn forest_edges(&self) -> Vec<(usize, usize, W)> {
        let mut v: Vec<_> = self
            .edges
            .iter()
            .filter(|(_, e)| e.forest_node.is_some())
            .map(|(&(a, b), e)| (a, b, e.weight))
            .collect();
        v.sort_unstable();
        v
    }

    /// Non-forest edges as `(a, b, weight)` with `a < b`, sorted.
    pub fn spare_edges(&self) -> Vec<(usize, usize, W)> {
        let mut v: Vec<_> = self.spare.iter().map(|&(w, a, b)| (a, b, w)).collect();
        v.sort_unstable();
        v
    }

    /// Whether `a` and `b` are connected in the link-cut forest. Agrees with
    /// [`SpanningForest::same_component`] whenever the structure is sound.
    pub fn forest_connected(&mut self, a: usize, b: usize) -> bool {
        a == b || self.lct.find_root(a) == self.lct.find_root(b)
    }

    /// Lightest forest edge weight on the path between `a` and `b`.
    pub fn path_min_weight(&mut self, a: usize, b: usize) -> Option<W> {
        if a == b || !self.forest_connected(a, b) {
            return None;
        }
        let node = self.lct.path_min(a, b);
        self.lct.nodes[node].weight
    }

    fn endpoints_of(&self, node: usize) -> (usize, usize) {
        let owner = self.node_owner[node];
        debug_assert_ne!(owner.0, NIL, "edge node without owner");
        owner
    }

    fn link_forest(&mut self, a: usize, b: usize, weight: W) {
        let node = self.lct.alloc(weight);
        self.lct.link(a, node);
        self.lct.link(node, b);
        self.edges.insert((a, b), EdgeEntry { weight, forest_node: Some(node) });
        if node >= self.node_owner.len() {
            self.node_owner.resize(node + 1, (NIL, NIL));
        }
        self.node_owner[node] = (a, b);
        self.adjacency[a].push(b);
        self.adjacency[b].push(a);
    }

    /// Removes forest edge `(a, b)` from the link-cut forest and adjacency,
    /// leaving its table entry to the caller.
    fn unlink_forest(&mut self, a: usize, b: usize) {
        let node = self.edges[&(a, b)].forest_node.expect("forest edge");
        self.lct.cut(a, node);
        self.lct.cut(node, b);
        self.lct.release(node);
        self.node_owner[node] = (NIL, NIL);
        let weight = self.edges[&(a, b)].weight;
        self.edges.insert((a, b), EdgeEntry { weight, forest_node: None });
        for (x, y) in [(a, b), (b, a)] {
            let adj = &mut self.adjacency[x];
            let pos = adj.iter().position(|&v| v == y).expect("forest adjacency");
            adj.swap_remove(pos);
        }
    }

    /// Vertices reachable from `a` or from `b` through forest edges,
    /// whichever side is smaller. Searches both sides in lockstep.
    fn smaller_side(&self, a: usize, b: usize) -> BTreeSet<usize> {
        let mut seen = [BTreeSet::from([a]), BTreeSet::from([b])];
        let mut stacks = [vec![a], vec![b]];
        loop {
            for s in 0..2 {
                match stacks[s].pop() {
                    None => return std::mem::take(&mut seen[s]),
                    Some(v) => {
                        for &w in &self.adjacency[v] {
                            if seen[s].insert(w) {
                                stacks[s].push(w);
                            }
                        }
                    }
                }
            }
        }
    }

    fn join_components(&mut self, a: usize, b: usize) {
        let (ca, cb) = (self.comp_of[a], self.comp_of[b]);
        let (big, small) = if self.members[ca].len() >= self.members[cb].len() { (ca, cb) } else { (cb, ca) };
        let moved = std::mem::take(&mut self.members[small]);
        for &v in &moved {
            self.comp_of[v] = big;
        }
        self.members[big].extend(moved);
        self.free_comps.push(small);
    }

    fn split_component(&mut self, side: BTreeSet<usize>) {
        let old = self.comp_of[*side.first().expect("nonempty side")];
        let new = self.free_comps.pop().unwrap_or_else(|| {
            self.members.push(BTreeSet::new());
            self.members.len() - 1
        });
        for &v in &side {
            self.members[old].remove(&v);
            self.comp_of[v] = new;
        }
        self.members[new] = side;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn uf_components(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for &(a, b) in edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra.max(rb)] = ra.min(rb);
        }
        // label = minimum vertex of the component
        let roots: Vec<usize> = (0..n).map(|v| find(&mut parent, v)).collect();
        (0..n).map(|v| (0..n).find(|&u| roots[u] == roots[v]).unwrap()).collect()
    }

    /// Kruskal on descending weights: the maximum spanning forest.
    fn kruskal_max(n: usize, edges: &[(usize, usize, u32)]) -> Vec<(usize, usize, u32)> {
        let mut sorted = edges.to_vec();
        sorted.sort_by_key(|x| std::cmp::Reverse(x.2));
        let mut chosen = Vec::new();
        let mut acc = Vec::new();
        for (a, b, w) in sorted {
            let before = uf_components(n, &acc);
            if before[a] != before[b] {
                acc.push((a, b));
                chosen.push((a, b, w));
            }
        }
        chosen.sort_unstable();
        chosen
    }

    #[test]
    fn fresh_structure_is_discrete() {
        let f = SpanningForest::<u32>::new(4);
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(f.same_component(a, b), a == b);
            }
            assert_eq!(f.component_of(a), a);
        }
    }

    #[test]
    fn insert_connects() {
        let mut f = SpanningForest::new(3);
        assert_eq!(f.insert(0, 1, 3).unwrap(), InsertOutcome::Merged);
        assert!(f.same_component(0, 1));
        f.insert(1, 2, 4).unwrap();
        assert!(f.same_component(0, 2));
        assert_eq!(f.component_of(2), 0);
    }

    #[test]
    fn triangle_keeps_heaviest_edges() {
        let mut f = SpanningForest::new(3);
        f.insert(0, 1, 5).unwrap();
        f.insert(1, 2, 9).unwrap();
        assert_eq!(f.insert(0, 2, 7).unwrap(), InsertOutcome::Unchanged);
        let expected = kruskal_max(3, &[(0, 1, 5), (1, 2, 9), (0, 2, 7)]);
        assert_eq!(f.forest_edges(), expected);
        assert_eq!(f.forest_edges(), vec![(0, 2, 7), (1, 2, 9)]);
        assert_eq!(f.spare_edges(), vec![(0, 1, 5)]);

        // (0,1) is scheduled first and is not a forest edge
        assert_eq!(f.delete(0, 1).unwrap(), DeleteOutcome::Unchanged);
        assert!(f.same_component(0, 1) && f.same_component(1, 2));
        // (0,2) at time 7 separates 0 from {1, 2}
        assert_eq!(f.delete(0, 2).unwrap(), DeleteOutcome::Split);
        assert!(!f.same_component(0, 1));
        assert!(f.same_component(1, 2));
        assert_eq!(f.component_of(2), 1);
    }

    #[test]
    fn heavier_parallel_path_replaces_lighter_edges() {
        let mut f = SpanningForest::new(4);
        let edges = [(0, 1, 1), (1, 2, 2), (2, 3, 3), (0, 3, 10), (0, 2, 11)];
        for &(a, b, w) in &edges {
            f.insert(a, b, w).unwrap();
        }
        assert_eq!(f.forest_edges(), kruskal_max(4, &edges));
    }

    #[test]
    fn deleting_only_edge_splits() {
        let mut f = SpanningForest::new(2);
        f.insert(0, 1, 1).unwrap();
        assert_eq!(f.delete(0, 1).unwrap(), DeleteOutcome::Split);
        assert!(!f.same_component(0, 1));
    }

    #[test]
    fn errors() {
        let mut f = SpanningForest::new(3);
        f.insert(0, 1, 1).unwrap();
        assert_eq!(f.insert(1, 0, 2), Err(ConnectivityError::DuplicateEdge(0, 1)));
        assert_eq!(f.delete(1, 2), Err(ConnectivityError::MissingEdge(1, 2)));
        assert_eq!(f.insert(2, 2, 1), Err(ConnectivityError::SelfLoop(2)));
        assert_eq!(f.insert(0, 7, 1), Err(ConnectivityError::InvalidVertex(7)));
    }

    #[test]
    fn out_of_order_deletion_finds_replacement() {
        // violates the weight discipline: the heavy forest edge goes first
        let mut f = SpanningForest::new(3);
        f.insert(0, 1, 10).unwrap();
        f.insert(1, 2, 10).unwrap();
        f.insert(0, 2, 1).unwrap();
        assert_eq!(f.delete(0, 1).unwrap(), DeleteOutcome::Unchanged);
        assert!(f.same_component(0, 1));
        assert_eq!(f.forest_edges(), vec![(0, 2, 1), (1, 2, 10)]);
    }

    /// A schedule of timed edge lifetimes on `n` vertices: each op is
    /// `(time, insert?, a, b, deletion_time)`, processed in time order.
    fn schedule(n: usize, raw: Vec<(usize, usize, u32, u32)>) -> Vec<(u32, bool, usize, usize, u32)> {
        let mut busy: Vec<(usize, usize, u32, u32)> = Vec::new();
        let mut ops = Vec::new();
        for (a, b, start, len) in raw {
            let (a, b) = (a % n, b % n);
            if a == b {
                continue;
            }
            let (a, b) = (a.min(b), a.max(b));
            let (s, e) = (start * 2, start * 2 + 2 * len + 1);
            if busy.iter().any(|&(x, y, s2, e2)| (x, y) == (a, b) && s <= e2 && s2 <= e) {
                continue;
            }
            busy.push((a, b, s, e));
            ops.push((s, true, a, b, e));
            ops.push((e, false, a, b, e));
        }
        // distinct deletion times keep the discipline strict
        ops.sort_by_key(|&(t, ins, a, b, _)| (t, ins, a, b));
        ops
    }

    proptest! {
        #[test]
        fn random_schedule_matches_union_find(
            raw in proptest::collection::vec((0usize..10, 0usize..10, 0u32..25, 0u32..12), 1..50)
        ) {
            let n = 10;
            let ops = schedule(n, raw);
            let mut f = SpanningForest::new(n);
            let mut live: Vec<(usize, usize, u32)> = Vec::new();
            for (_, ins, a, b, w) in ops {
                if ins {
                    f.insert(a, b, w).unwrap();
                    live.push((a, b, w));
                } else {
                    f.delete(a, b).unwrap();
                    live.retain(|&(x, y, _)| (x, y) != (a, b));
                }
                let pairs: Vec<(usize, usize)> = live.iter().map(|&(a, b, _)| (a, b)).collect();
                let labels = uf_components(n, &pairs);
                for v in 0..n {
                    prop_assert_eq!(f.component_of(v), labels[v]);
                }
                for u in 0..n {
                    for v in 0..n {
                        prop_assert_eq!(f.forest_connected(u, v), labels[u] == labels[v]);
                    }
                }
                // max-weight audit: spare edges weigh at most their path minimum
                for (a, b, w) in f.spare_edges() {
                    let m = f.path_min_weight(a, b).unwrap();
                    prop_assert!(w <= m);
                }
                let forest_total: u64 = f.forest_edges().iter().map(|e| e.2 as u64).sum();
                let kruskal_total: u64 = kruskal_max(n, &live).iter().map(|e| e.2 as u64).sum();
                prop_assert_eq!(forest_total, kruskal_total);
            }
        }
    }
}
