//! Ordered depth-first encoding of a component as a tree plus surplus points.
//!
//! The ordered depth-first search keeps a stack of vertices that have been
//! seen but not yet explored. At each time `m` the top vertex is explored and
//! its children are pushed smallest-label-last, so traversal is preorder with
//! children in label order. The depth-first walk is the stack size minus one;
//! its running sum counts the lattice slots `(m, j)` where a non-tree edge can
//! sit without disturbing the traversal. A slot `(m, j)` pairs the vertex
//! explored at time `m` with the `j`-th pending stack entry counted from the
//! bottom of the stack.
//!
//! Decomposing a component records one slot per non-tree edge; assembling a
//! tree with a slot set re-adds those edges. The two maps are mutually
//! inverse, which the round-trip tests pin down.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rand::Rng;

use crate::graphgen::Component;
use crate::rng::rng_from_seed;

#[derive(Debug, Error, PartialEq)]
pub enum DfsError {
    #[error("tree is malformed: {0}")]
    MalformedTree(&'static str),
    #[error("surplus point ({0}, {1}) outside the permitted region")]
    PointOutsideRegion(usize, usize),
    #[error("surplus point ({0}, {1}) duplicates an existing edge")]
    DuplicateEdge(usize, usize),
    #[error("dfs time {0} out of range")]
    TimeOutOfRange(usize),
    #[error("input component is disconnected")]
    Disconnected,
}

/// Rooted tree with children kept in label order.
///
/// Vertices are local indices into the owning component; the root is 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderedTree {
    pub parent: Vec<Option<u32>>,
    pub children: Vec<Vec<u32>>,
    /// Vertex explored at each depth-first time.
    pub dfs_order: Vec<u32>,
}

impl OrderedTree {
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Builds the tree from a parent array (root has no parent) and re-derives
    /// child lists and the depth-first order.
    pub fn from_parents(parent: Vec<Option<u32>>) -> Result<Self, DfsError> {
        let n = parent.len();
        let mut children = vec![Vec::new(); n];
        let mut roots = 0usize;
        for (v, p) in parent.iter().enumerate() {
            match p {
                None => roots += 1,
                Some(p) => {
                    if *p as usize >= n {
                        return Err(DfsError::MalformedTree("parent out of range"));
                    }
                    children[*p as usize].push(v as u32);
                }
            }
        }
        if roots != 1 || parent[0].is_some() {
            return Err(DfsError::MalformedTree("expected exactly one root at index 0"));
        }
        for list in &mut children {
            list.sort_unstable();
        }
        let mut tree = OrderedTree {
            parent,
            children,
            dfs_order: Vec::new(),
        };
        tree.dfs_order = tree.preorder()?;
        Ok(tree)
    }

    fn preorder(&self) -> Result<Vec<u32>, DfsError> {
        let n = self.len();
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![0u32];
        let mut seen = vec![false; n];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &c in self.children[v as usize].iter().rev() {
                if seen[c as usize] {
                    return Err(DfsError::MalformedTree("cycle detected"));
                }
                seen[c as usize] = true;
                stack.push(c);
            }
        }
        if order.len() != n {
            return Err(DfsError::MalformedTree("not connected"));
        }
        Ok(order)
    }

    pub fn depth(&self, v: u32) -> u32 {
        let mut d = 0;
        let mut cur = v;
        while let Some(p) = self.parent[cur as usize] {
            d += 1;
            cur = p;
        }
        d
    }

    /// Vertices on the path from the root to `v`, inclusive.
    pub fn root_path(&self, v: u32) -> Vec<u32> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent[cur as usize] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }
}

/// Scan record of the ordered depth-first search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DfsRecord {
    /// Stack size at each time `m = 0..len`.
    pub stack_sizes: Vec<usize>,
    /// Depth-first walk: stack size minus one.
    pub depth_walk: Vec<usize>,
    /// Distance from the root of the vertex explored at time `m`.
    pub height: Vec<u32>,
    /// Contour process of the tree: `2(len-1) + 1` entries.
    pub contour: Vec<u32>,
    /// Vertex visited at each contour step.
    pub contour_vertex: Vec<u32>,
    /// Total number of permitted surplus slots.
    pub slot_count: usize,
}

/// Lattice points `(m, j)` marking surplus edges, sorted by `m` then `j`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SurplusPointSet {
    pub points: Vec<(usize, usize)>,
}

impl SurplusPointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Runs the stack scan, producing walk, height and contour processes.
pub fn dfs_scan(tree: &OrderedTree) -> Result<DfsRecord, DfsError> {
    let n = tree.len();
    if n == 0 {
        return Err(DfsError::MalformedTree("empty tree"));
    }
    // Validate structure (also recomputes preorder).
    let order = tree.preorder()?;
    if order != tree.dfs_order {
        return Err(DfsError::MalformedTree("dfs_order inconsistent with children"));
    }

    let mut stack: Vec<u32> = vec![0];
    let mut stack_sizes = Vec::with_capacity(n);
    let mut depth_walk = Vec::with_capacity(n);
    let mut height = Vec::with_capacity(n);
    let mut slot_count = 0usize;
    for m in 0..n {
        let v = *stack.last().expect("stack non-empty while unexplored vertices remain");
        debug_assert_eq!(v, tree.dfs_order[m]);
        stack_sizes.push(stack.len());
        if m > 0 {
            slot_count += stack.len() - 1;
        }
        depth_walk.push(stack.len() - 1);
        height.push(tree.depth(v));
        stack.pop();
        for &c in tree.children[v as usize].iter().rev() {
            stack.push(c);
        }
    }

    // Contour: trace the boundary clockwise, one unit edge per step.
    let mut contour = Vec::with_capacity(2 * n - 1);
    let mut contour_vertex = Vec::with_capacity(2 * n - 1);
    let mut next_child = vec![0usize; n];
    let mut cur = 0u32;
    let mut h = 0u32;
    contour.push(h);
    contour_vertex.push(cur);
    loop {
        let slot = next_child[cur as usize];
        if slot < tree.children[cur as usize].len() {
            next_child[cur as usize] += 1;
            cur = tree.children[cur as usize][slot];
            h += 1;
        } else if let Some(p) = tree.parent[cur as usize] {
            cur = p;
            h -= 1;
        } else {
            break;
        }
        contour.push(h);
        contour_vertex.push(cur);
    }
    debug_assert_eq!(contour.len(), 2 * n - 1);

    Ok(DfsRecord {
        stack_sizes,
        depth_walk,
        height,
        contour,
        contour_vertex,
        slot_count,
    })
}

/// Contour index visiting the same vertex as depth-first time `m`.
pub fn dfs_to_contour_time(record: &DfsRecord, m: usize) -> Result<usize, DfsError> {
    if m >= record.height.len() {
        return Err(DfsError::TimeOutOfRange(m));
    }
    Ok(2 * m - record.height[m] as usize)
}

/// Includes each permitted slot independently with probability `p`.
pub fn sample_surplus(record: &DfsRecord, p: f64, seed: u64) -> SurplusPointSet {
    let mut points = Vec::new();
    if p <= 0.0 || record.slot_count == 0 {
        return SurplusPointSet { points };
    }
    // Flatten the slots in (m asc, j asc) order and skip geometrically.
    let mut prefix = Vec::with_capacity(record.depth_walk.len() + 1);
    prefix.push(0usize);
    for &d in &record.depth_walk {
        prefix.push(prefix.last().unwrap() + d);
    }
    let total = *prefix.last().unwrap();
    debug_assert_eq!(total, record.slot_count);
    let mut rng = rng_from_seed(seed);
    let emit = |idx: usize, points: &mut Vec<(usize, usize)>| {
        let m = match prefix.binary_search(&idx) {
            // idx == prefix[i]: slot belongs to the first m with prefix[m] > idx,
            // i.e. partition point; binary_search returns some i with equal value,
            // advance past duplicates (zero-depth times).
            Ok(mut i) => {
                while prefix[i + 1] == prefix[i] {
                    i += 1;
                }
                i
            }
            Err(i) => i - 1,
        };
        let j = idx - prefix[m] + 1;
        points.push((m, j));
    };
    if p >= 1.0 {
        for idx in 0..total {
            emit(idx, &mut points);
        }
        return SurplusPointSet { points };
    }
    let log_q = (-p).ln_1p();
    let mut cursor: i128 = -1;
    loop {
        let u: f64 = 1.0 - rng.random::<f64>();
        let gap = 1 + (u.ln() / log_q).floor() as i128;
        cursor += gap.max(1);
        if cursor >= total as i128 {
            break;
        }
        emit(cursor as usize, &mut points);
    }
    SurplusPointSet { points }
}

/// Pair of tree vertices joined by the surplus edge of slot `(m, j)`.
///
/// Replays the stack; for each queried time the partner is the `j`-th pending
/// entry from the bottom of the stack.
pub fn surplus_edges(
    tree: &OrderedTree,
    points: &SurplusPointSet,
) -> Result<Vec<(u32, u32)>, DfsError> {
    let n = tree.len();
    let mut by_time: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(m, j) in &points.points {
        if m >= n {
            return Err(DfsError::PointOutsideRegion(m, j));
        }
        by_time[m].push(j);
    }
    let mut out = Vec::with_capacity(points.len());
    let mut stack: Vec<u32> = vec![0];
    for m in 0..n {
        let v = *stack.last().unwrap();
        if !by_time[m].is_empty() {
            let pending = stack.len() - 1;
            for &j in &by_time[m] {
                if j == 0 || j > pending {
                    return Err(DfsError::PointOutsideRegion(m, j));
                }
                out.push((v, stack[j - 1]));
            }
        }
        stack.pop();
        for &c in tree.children[v as usize].iter().rev() {
            stack.push(c);
        }
    }
    Ok(out)
}

/// Rebuilds the component carrying tree edges plus the surplus edges.
pub fn assemble_component(
    tree: &OrderedTree,
    points: &SurplusPointSet,
    labels: Vec<u32>,
) -> Result<Component, DfsError> {
    let extra = surplus_edges(tree, points)?;
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(tree.len() - 1 + extra.len());
    for (v, p) in tree.parent.iter().enumerate() {
        if let Some(p) = p {
            let v = v as u32;
            edges.push((v.min(*p), v.max(*p)));
        }
    }
    for (a, b) in extra {
        let e = (a.min(b), a.max(b));
        edges.push(e);
    }
    let before = edges.len();
    edges.sort_unstable();
    edges.dedup();
    if edges.len() != before {
        let &(m, j) = points
            .points
            .first()
            .expect("duplicates require at least one point");
        return Err(DfsError::DuplicateEdge(m, j));
    }
    Ok(Component::from_local_edges(tree.len(), labels, &edges))
}

/// Encoded form of a component: spanning tree and surplus slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedComponent {
    pub tree: OrderedTree,
    pub points: SurplusPointSet,
}

/// Compact on-disk form: parent array, depth-first order and slot list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EncodedComponentRecord {
    pub parent: Vec<Option<u32>>,
    pub dfs_order: Vec<u32>,
    pub points: Vec<(usize, usize)>,
}

impl From<&EncodedComponent> for EncodedComponentRecord {
    fn from(enc: &EncodedComponent) -> Self {
        EncodedComponentRecord {
            parent: enc.tree.parent.clone(),
            dfs_order: enc.tree.dfs_order.clone(),
            points: enc.points.points.clone(),
        }
    }
}

impl EncodedComponentRecord {
    pub fn decode(&self) -> Result<EncodedComponent, DfsError> {
        let tree = OrderedTree::from_parents(self.parent.clone())?;
        if tree.dfs_order != self.dfs_order {
            return Err(DfsError::MalformedTree("stored dfs order mismatch"));
        }
        Ok(EncodedComponent {
            tree,
            points: SurplusPointSet {
                points: self.points.clone(),
            },
        })
    }
}

/// Ordered depth-first decomposition of a connected component.
///
/// First-discovery edges form the spanning tree; every other edge is reported
/// as the slot `(m, j)` at which the scan ran into it.
pub fn decompose_component(component: &Component) -> Result<EncodedComponent, DfsError> {
    let n = component.len();
    if n == 0 {
        return Err(DfsError::Disconnected);
    }
    let mut parent: Vec<Option<u32>> = vec![None; n];
    let mut children: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut dfs_order = Vec::with_capacity(n);
    let mut points = Vec::new();

    // seen[v]: pushed on the stack at some point; position_on_stack[v]:
    // current 0-based index from the bottom, usize::MAX when not on it.
    let mut seen = vec![false; n];
    let mut on_stack = vec![usize::MAX; n];
    let mut explored = vec![false; n];
    let mut stack: Vec<u32> = vec![0];
    seen[0] = true;
    on_stack[0] = 0;

    for m in 0..n {
        let v = match stack.last() {
            Some(&v) => v,
            None => return Err(DfsError::Disconnected),
        };
        stack.pop();
        on_stack[v as usize] = usize::MAX;
        explored[v as usize] = true;
        dfs_order.push(v);

        // Pending entries now occupy stack positions 0..stack.len().
        let mut new_children = Vec::new();
        for &w in &component.adjacency[v as usize] {
            if !seen[w as usize] {
                new_children.push(w);
            } else if on_stack[w as usize] != usize::MAX {
                // Non-tree edge to a pending vertex: slot height is its
                // 1-based position from the bottom of the stack.
                points.push((m, on_stack[w as usize] + 1));
            }
            // Edges to explored vertices were recorded when their other
            // endpoint was explored.
        }
        // Adjacency is label-sorted, so children are in label order; push in
        // reverse so the smallest label is explored next.
        for &c in new_children.iter().rev() {
            seen[c as usize] = true;
            parent[c as usize] = Some(v);
            on_stack[c as usize] = stack.len();
            stack.push(c);
        }
        children[v as usize] = new_children;
    }

    points.sort_unstable();
    let tree = OrderedTree {
        parent,
        children,
        dfs_order,
    };
    Ok(EncodedComponent {
        tree,
        points: SurplusPointSet { points },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphgen::{sample_largest_component, GnpParams};
    use crate::rng::replica_seed;

    fn path3() -> OrderedTree {
        // 0 - 1 - 2 rooted at 0
        OrderedTree::from_parents(vec![None, Some(0), Some(1)]).unwrap()
    }

    fn cherry() -> OrderedTree {
        // root 0 with children 1, 2
        OrderedTree::from_parents(vec![None, Some(0), Some(0)]).unwrap()
    }

    #[test]
    fn scan_of_single_vertex() {
        let t = OrderedTree::from_parents(vec![None]).unwrap();
        let r = dfs_scan(&t).unwrap();
        assert_eq!(r.depth_walk, vec![0]);
        assert_eq!(r.height, vec![0]);
        assert_eq!(r.contour, vec![0]);
        assert_eq!(r.slot_count, 0);
    }

    #[test]
    fn scan_of_path() {
        let r = dfs_scan(&path3()).unwrap();
        assert_eq!(r.depth_walk, vec![0, 0, 0]);
        assert_eq!(r.slot_count, 0);
        assert_eq!(r.height, vec![0, 1, 2]);
        assert_eq!(r.contour, vec![0, 1, 2, 1, 0]);
    }

    #[test]
    fn scan_of_cherry() {
        let r = dfs_scan(&cherry()).unwrap();
        assert_eq!(r.depth_walk, vec![0, 1, 0]);
        assert_eq!(r.slot_count, 1);
        assert_eq!(r.height, vec![0, 1, 1]);
        assert_eq!(r.contour, vec![0, 1, 0, 1, 0]);
    }

    #[test]
    fn contour_length_and_steps() {
        let t = random_tree(37, 0xBEEF);
        let r = dfs_scan(&t).unwrap();
        assert_eq!(r.contour.len(), 2 * (t.len() - 1) + 1);
        assert_eq!(*r.contour.first().unwrap(), 0);
        assert_eq!(*r.contour.last().unwrap(), 0);
        for w in r.contour.windows(2) {
            assert_eq!(w[0].abs_diff(w[1]), 1);
        }
    }

    #[test]
    fn slot_count_equals_lattice_point_count() {
        let t = random_tree(64, 1);
        let r = dfs_scan(&t).unwrap();
        let direct: usize = r.depth_walk[1..].iter().sum();
        assert_eq!(direct, r.slot_count);
        let all = sample_surplus(&r, 1.0, 0);
        assert_eq!(all.len(), r.slot_count);
        for &(m, j) in &all.points {
            assert!(1 <= j && j <= r.depth_walk[m]);
        }
    }

    #[test]
    fn surplus_sampling_edge_cases() {
        let r = dfs_scan(&cherry()).unwrap();
        assert!(sample_surplus(&r, 0.0, 9).is_empty());
        assert_eq!(sample_surplus(&r, 1.0, 9).points, vec![(1, 1)]);
        let path = dfs_scan(&path3()).unwrap();
        assert!(sample_surplus(&path, 0.7, 9).is_empty());
    }

    #[test]
    fn cherry_surplus_edge_joins_the_siblings() {
        let t = cherry();
        let pts = SurplusPointSet { points: vec![(1, 1)] };
        let edges = surplus_edges(&t, &pts).unwrap();
        assert_eq!(edges, vec![(1, 2)]);
        let comp = assemble_component(&t, &pts, vec![1, 2, 3]).unwrap();
        assert_eq!(comp.edge_count, 3);
    }

    #[test]
    fn triangle_decomposes_to_one_point() {
        let comp = Component::from_local_edges(3, vec![1, 2, 3], &[(0, 1), (0, 2), (1, 2)]);
        let enc = decompose_component(&comp).unwrap();
        assert_eq!(enc.points.points, vec![(1, 1)]);
        assert_eq!(enc.tree.children[0], vec![1, 2]);
        let back = assemble_component(&enc.tree, &enc.points, comp.labels.clone()).unwrap();
        assert_eq!(back, comp);
    }

    #[test]
    fn tree_decomposes_to_itself() {
        let comp = Component::from_local_edges(3, vec![1, 2, 3], &[(0, 1), (1, 2)]);
        let enc = decompose_component(&comp).unwrap();
        assert!(enc.points.is_empty());
        let back = assemble_component(&enc.tree, &enc.points, comp.labels.clone()).unwrap();
        assert_eq!(back, comp);
    }

    #[test]
    fn point_outside_region_rejected() {
        let t = path3();
        let pts = SurplusPointSet { points: vec![(1, 1)] };
        assert!(matches!(
            surplus_edges(&t, &pts),
            Err(DfsError::PointOutsideRegion(1, 1))
        ));
    }

    #[test]
    fn contour_time_identity() {
        let r = dfs_scan(&path3()).unwrap();
        assert_eq!(dfs_to_contour_time(&r, 0).unwrap(), 0);
        assert_eq!(dfs_to_contour_time(&r, 2).unwrap(), 2);
        assert!(dfs_to_contour_time(&r, 3).is_err());
    }

    /// Uniform-attachment random tree with label-ordered children.
    fn random_tree(n: usize, seed: u64) -> OrderedTree {
        let mut rng = rng_from_seed(seed);
        let mut parent = vec![None];
        for v in 1..n {
            parent.push(Some(rng.random_range(0..v as u32)));
        }
        OrderedTree::from_parents(parent).unwrap()
    }

    #[test]
    fn contour_vertex_matches_dfs_vertex_at_mapped_time() {
        for seed in 0..30u64 {
            let t = random_tree(2 + (seed as usize * 7) % 99, replica_seed(0xC0DE, seed));
            let r = dfs_scan(&t).unwrap();
            for m in 0..t.len() {
                let k = dfs_to_contour_time(&r, m).unwrap();
                assert_eq!(r.contour_vertex[k], t.dfs_order[m]);
                assert_eq!(r.contour[k], r.height[m]);
            }
        }
    }

    #[test]
    fn round_trip_from_random_encodings() {
        // assemble -> decompose is the identity on (tree, points).
        let mut rng = rng_from_seed(0x0DD5);
        for _ in 0..500 {
            let n = rng.random_range(2..40usize);
            let t = random_tree(n, rng.random());
            let r = dfs_scan(&t).unwrap();
            let pts = sample_surplus(&r, 0.15, rng.random());
            let labels: Vec<u32> = (1..=n as u32).collect();
            let comp = match assemble_component(&t, &pts, labels) {
                Ok(c) => c,
                Err(DfsError::DuplicateEdge(..)) => continue,
                Err(e) => panic!("unexpected: {e}"),
            };
            let enc = decompose_component(&comp).unwrap();
            assert_eq!(enc.tree.parent, t.parent, "tree mismatch");
            assert_eq!(enc.points, pts, "points mismatch");
        }
    }

    #[test]
    fn round_trip_from_sampled_components() {
        for rep in 0..200u64 {
            let params = GnpParams::new(400, 1.0, replica_seed(0x61AF, rep)).unwrap();
            let comp = sample_largest_component(&params).unwrap();
            let enc = decompose_component(&comp).unwrap();
            let back =
                assemble_component(&enc.tree, &enc.points, comp.labels.clone()).unwrap();
            assert_eq!(back, comp);
            assert_eq!(
                comp.edge_count,
                comp.len() - 1 + enc.points.len(),
                "edge count bookkeeping"
            );
        }
    }

    #[test]
    fn record_round_trips() {
        let comp = Component::from_local_edges(3, vec![1, 2, 3], &[(0, 1), (0, 2), (1, 2)]);
        let enc = decompose_component(&comp).unwrap();
        let rec = EncodedComponentRecord::from(&enc);
        let text = serde_json::to_string(&rec).unwrap();
        let back: EncodedComponentRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back.decode().unwrap(), enc);
    }
}
