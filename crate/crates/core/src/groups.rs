//! Maximal groups via grouping trees.
//!
//! Every Reeb edge `e` carries a grouping tree: a laminar family of candidate
//! groups inside `C_e`, each with the time it started. Children of a node are
//! its largest subgroups and start no later than the node itself. Vertices
//! are visited in topological order; merges add a new root, splits cut the
//! tree in two and report the nodes whose entities separate, and end
//! vertices report what is left.

use thiserror::Error;

use crate::model::{EntitySet, Interval};
use crate::reeb::{ReebError, ReebGraph, VertexKind};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupError {
    #[error("split sides do not partition the tree's entities")]
    PartitionMismatch,
    #[error("merged trees share entities")]
    OverlappingLeaves,
    #[error("malformed Reeb graph: {0}")]
    MalformedGraph(String),
    #[error(transparent)]
    Reeb(#[from] ReebError),
}

/// A set of entities together (in one component) throughout an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximalGroup<T> {
    pub entities: EntitySet,
    pub interval: Interval<T>,
}

impl<T: Scalar> MaximalGroup<T> {
    pub fn new(entities: EntitySet, start: T, end: T) -> Self {
        Self { entities, interval: Interval::new(start, end) }
    }

    pub fn size(&self) -> usize {
        self.entities.len()
    }

    pub fn duration(&self) -> T {
        self.interval.duration()
    }

    /// `self` covers `other`: superset on a superinterval.
    pub fn covers(&self, other: &Self) -> bool {
        other.entities.is_subset(&self.entities) && self.interval.covers(&other.interval)
    }

    /// Canonical output order: start, end, then entity set.
    pub fn canonical_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.interval
            .start
            .total_order(other.interval.start)
            .then(self.interval.end.total_order(other.interval.end))
            .then_with(|| self.entities.cmp(&other.entities))
    }
}

/// Root handle of a grouping tree stored in a [`GroupingForest`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TreeId(usize);

#[derive(Debug, Clone)]
struct TreeNode<T> {
    start: T,
    children: Vec<usize>,
    leaf: Option<usize>,
}

/// Read-only snapshot of a grouping tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeView<T> {
    pub start: T,
    pub entities: EntitySet,
    pub children: Vec<TreeView<T>>,
}

/// Arena holding the grouping trees of all live Reeb edges, so that merging
/// two trees is a constant-time root insertion.
#[derive(Debug, Clone)]
pub struct GroupingForest<T> {
    nodes: Vec<TreeNode<T>>,
    free: Vec<usize>,
    num_entities: usize,
}

impl<T: Scalar> GroupingForest<T> {
    pub fn new(num_entities: usize) -> Self {
        Self { nodes: Vec::new(), free: Vec::new(), num_entities }
    }

    fn alloc(&mut self, start: T, children: Vec<usize>, leaf: Option<usize>) -> usize {
        let node = TreeNode { start, children, leaf };
        match self.free.pop() {
            Some(id) => {
                self.nodes[id] = node;
                id
            }
            None => {
                self.nodes.push(node);
                self.nodes.len() - 1
            }
        }
    }

    /// Number of nodes currently allocated to trees.
    pub fn live_nodes(&self) -> usize {
        self.nodes.len() - self.free.len()
    }

    /// Tree of a component that starts at `start`: a root over one leaf per
    /// entity (a lone leaf for a singleton).
    pub fn start_tree(&mut self, component: &EntitySet, start: T) -> TreeId {
        let leaves: Vec<usize> = component.iter().map(|x| self.alloc(start, Vec::new(), Some(x))).collect();
        if leaves.len() == 1 {
            return TreeId(leaves[0]);
        }
        TreeId(self.alloc(start, leaves, None))
    }

    /// Joins two trees under a new root that starts at `time`.
    pub fn merge_trees(&mut self, a: TreeId, b: TreeId, time: T) -> Result<TreeId, GroupError> {
        if !self.leaf_set(a).is_disjoint(&self.leaf_set(b)) {
            return Err(GroupError::OverlappingLeaves);
        }
        Ok(self.merge_unchecked(a, b, time))
    }

    fn merge_unchecked(&mut self, a: TreeId, b: TreeId, time: T) -> TreeId {
        TreeId(self.alloc(time, vec![a.0, b.0], None))
    }

    /// Entities at the leaves of `tree`.
    pub fn leaf_set(&self, tree: TreeId) -> EntitySet {
        let mut set = EntitySet::empty(self.num_entities);
        let mut leaves = Vec::new();
        self.collect_leaves(tree.0, &mut leaves);
        for x in leaves {
            set.insert(x);
        }
        set
    }

    fn collect_leaves(&self, node: usize, out: &mut Vec<usize>) {
        let n = &self.nodes[node];
        if let Some(x) = n.leaf {
            out.push(x);
        }
        for &c in &n.children {
            self.collect_leaves(c, out);
        }
    }

    pub fn view(&self, tree: TreeId) -> TreeView<T> {
        let node = &self.nodes[tree.0];
        TreeView {
            start: node.start,
            entities: self.leaf_set(tree),
            children: node.children.iter().map(|&c| self.view(TreeId(c))).collect(),
        }
    }

    /// Splits `tree` into the parts inside `left` and inside `right` at time
    /// `time`, returning both trees and the groups that end there.
    pub fn split_tree(
        &mut self,
        tree: TreeId,
        left: &EntitySet,
        right: &EntitySet,
        time: T,
    ) -> Result<(TreeId, TreeId, Vec<MaximalGroup<T>>), GroupError> {
        let all = self.leaf_set(tree);
        if !left.is_disjoint(right) || left.union(right) != all || left.is_empty() || right.is_empty() {
            return Err(GroupError::PartitionMismatch);
        }
        let mut ended = Vec::new();
        let cap = self.num_entities;
        let mut leaves = Vec::new();
        let (l, r) = self.split_node(tree.0, None, left, &mut leaves, &mut |range: &[usize], start| {
            ended.push(MaximalGroup::new(EntitySet::from_indices(cap, range.iter().copied()), start, time));
        });
        Ok((TreeId(l.expect("left side is nonempty")), TreeId(r.expect("right side is nonempty")), ended))
    }

    /// Post-order split. Returns the node's images on the left and right
    /// side; nodes entirely on one side are moved unchanged.
    fn split_node(
        &mut self,
        node: usize,
        parent_start: Option<T>,
        left: &EntitySet,
        leaves: &mut Vec<usize>,
        report: &mut dyn FnMut(&[usize], T),
    ) -> (Option<usize>, Option<usize>) {
        if let Some(x) = self.nodes[node].leaf {
            leaves.push(x);
            return if left.contains(x) { (Some(node), None) } else { (None, Some(node)) };
        }
        let first_leaf = leaves.len();
        let start = self.nodes[node].start;
        let children = std::mem::take(&mut self.nodes[node].children);
        let mut lefts = Vec::new();
        let mut rights = Vec::new();
        for &c in &children {
            let (l, r) = self.split_node(c, Some(start), left, leaves, report);
            lefts.extend(l);
            rights.extend(r);
        }
        if rights.is_empty() || lefts.is_empty() {
            self.nodes[node].children = children;
            return if rights.is_empty() { (Some(node), None) } else { (None, Some(node)) };
        }
        // the node's entities separate here
        if parent_start.is_none_or(|p| start < p) {
            report(&leaves[first_leaf..], start);
        }
        self.free.push(node);
        let mut image = |parts: Vec<usize>| {
            if parts.len() == 1 {
                parts[0]
            } else {
                self.alloc(start, parts, None)
            }
        };
        (Some(image(lefts)), Some(image(rights)))
    }

    /// Reports every group still represented by `tree` as ending at `time`
    /// and releases the tree.
    pub fn finish_tree(&mut self, tree: TreeId, time: T) -> Vec<MaximalGroup<T>> {
        let mut out = Vec::new();
        let cap = self.num_entities;
        self.finish_with(tree, &mut |range, start| {
            out.push(MaximalGroup::new(EntitySet::from_indices(cap, range.iter().copied()), start, time));
        });
        out
    }

    fn finish_with(&mut self, tree: TreeId, report: &mut dyn FnMut(&[usize], T)) {
        let mut leaves = Vec::new();
        self.finish_node(tree.0, None, &mut leaves, report);
    }

    fn finish_node(
        &mut self,
        node: usize,
        parent_start: Option<T>,
        leaves: &mut Vec<usize>,
        report: &mut dyn FnMut(&[usize], T),
    ) {
        let first_leaf = leaves.len();
        let start = self.nodes[node].start;
        if let Some(x) = self.nodes[node].leaf {
            leaves.push(x);
        }
        let children = std::mem::take(&mut self.nodes[node].children);
        for &c in &children {
            self.finish_node(c, Some(start), leaves, report);
        }
        if parent_start.is_none_or(|p| start < p) {
            report(&leaves[first_leaf..], start);
        }
        self.free.push(node);
    }
}

/// All maximal groups of at least `m` entities lasting at least `delta`.
///
/// Internally every group is tracked (`m = 1`, `δ = 0`); the filters only
/// apply when a group is reported. Output is deduplicated and sorted by
/// start, end and entity set.
pub fn compute_maximal_groups<T: Scalar>(
    reeb: &ReebGraph<T>,
    m: usize,
    delta: T,
) -> Result<Vec<MaximalGroup<T>>, GroupError> {
    let n = reeb.num_entities();
    let order = reeb.topological_order()?;
    let mut forest = GroupingForest::new(n);
    let mut trees: Vec<Option<TreeId>> = vec![None; reeb.edges().len()];
    let mut out: Vec<MaximalGroup<T>> = Vec::new();

    let malformed = |v: usize| GroupError::MalformedGraph(format!("vertex {v} has the wrong degree for its kind"));
    let take = |trees: &mut Vec<Option<TreeId>>, e: usize| {
        trees[e].take().ok_or_else(|| GroupError::MalformedGraph(format!("edge {e} reached before its source")))
    };

    for v in order {
        let vx = reeb.vertex(v);
        if (vx.incoming.len(), vx.outgoing.len()) != vx.kind.degree() {
            return Err(malformed(v));
        }
        let t = vx.time;
        let mut report = |range: &[usize], start: T| {
            if range.len() >= m && t - start >= delta {
                out.push(MaximalGroup::new(EntitySet::from_indices(n, range.iter().copied()), start, t));
            }
        };
        match vx.kind {
            VertexKind::Start => {
                let e = vx.outgoing[0];
                trees[e] = Some(forest.start_tree(&reeb.edge(e).component, t));
            }
            VertexKind::Merge => {
                let a = take(&mut trees, vx.incoming[0])?;
                let b = take(&mut trees, vx.incoming[1])?;
                trees[vx.outgoing[0]] = Some(forest.merge_unchecked(a, b, t));
            }
            VertexKind::Split => {
                let tree = take(&mut trees, vx.incoming[0])?;
                let (e1, e2) = (vx.outgoing[0], vx.outgoing[1]);
                let left = &reeb.edge(e1).component;
                let mut leaves = Vec::new();
                let (l, r) = forest.split_node(tree.0, None, left, &mut leaves, &mut report);
                match (l, r) {
                    (Some(l), Some(r)) => {
                        trees[e1] = Some(TreeId(l));
                        trees[e2] = Some(TreeId(r));
                    }
                    _ => return Err(GroupError::PartitionMismatch),
                }
            }
            VertexKind::End => {
                let tree = take(&mut trees, vx.incoming[0])?;
                forest.finish_with(tree, &mut report);
            }
        }
    }

    out.sort_by(|a, b| a.canonical_cmp(b));
    out.dedup();
    Ok(out)
}
