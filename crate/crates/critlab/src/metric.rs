//! Glued metric graphs: weighted segment trees with identified vertex pairs.
//!
//! A space is a finite tree of positively-weighted segments plus a list of
//! glue pairs; the quotient metric is the shortest-path distance once each
//! pair is linked by a zero-length hop. Points are graph nodes or interior
//! positions of segments. Skeletons of discrete components mirror the same
//! picture with unit edge lengths.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use thiserror::Error;

use crate::dfs::{dfs_scan, surplus_edges, EncodedComponent};
use crate::graphgen::Component;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("segment complex before gluing is not a tree")]
    NotATree,
    #[error("node {0} out of range")]
    NodeOutOfRange(u32),
    #[error("point lies outside the segment complex")]
    PointOutsideComplex,
    #[error("need k >= glue-point count + 1, got k = {k}, count = {glue_points}")]
    SkeletonTooSmall { k: usize, glue_points: usize },
    #[error("not enough leaf variates: need {need}, got {got}")]
    NotEnoughVariates { need: usize, got: usize },
    #[error("mesh step {eps} too coarse for shortest segment {shortest}")]
    MeshTooCoarse { eps: f64, shortest: f64 },
    #[error("mesh step {eps} does not divide segment of length {length} within 1%")]
    MeshMisfit { eps: f64, length: f64 },
}

/// Weighted segment between two nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: u32,
    pub b: u32,
    pub length: f64,
}

/// A point of the space: a node or an interior position along a segment,
/// measured from endpoint `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpacePoint {
    Node(u32),
    Interior { segment: usize, offset: f64 },
}

/// Finite tree of weighted segments with glued node pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct GluedMetricGraph {
    pub node_count: usize,
    pub segments: Vec<Segment>,
    pub glue_pairs: Vec<(u32, u32)>,
    pub root: u32,
    adjacency: Vec<Vec<(u32, f64)>>,
}

/// On-disk form of a glued metric graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GluedMetricGraphRecord {
    pub segments: Vec<Segment>,
    pub glue_pairs: Vec<(u32, u32)>,
    pub root: u32,
}

impl From<&GluedMetricGraph> for GluedMetricGraphRecord {
    fn from(g: &GluedMetricGraph) -> Self {
        GluedMetricGraphRecord {
            segments: g.segments.clone(),
            glue_pairs: g.glue_pairs.clone(),
            root: g.root,
        }
    }
}

impl GluedMetricGraphRecord {
    pub fn decode(&self) -> GluedMetricGraph {
        let node_count = self
            .segments
            .iter()
            .flat_map(|s| [s.a, s.b])
            .chain(self.glue_pairs.iter().flat_map(|&(a, b)| [a, b]))
            .chain([self.root])
            .max()
            .map(|m| m as usize + 1)
            .unwrap_or(1);
        GluedMetricGraph::new(
            node_count,
            self.segments.clone(),
            self.glue_pairs.clone(),
            self.root,
        )
    }
}

impl GluedMetricGraph {
    pub fn new(
        node_count: usize,
        segments: Vec<Segment>,
        glue_pairs: Vec<(u32, u32)>,
        root: u32,
    ) -> Self {
        let mut adjacency = vec![Vec::new(); node_count];
        for s in &segments {
            adjacency[s.a as usize].push((s.b, s.length));
            adjacency[s.b as usize].push((s.a, s.length));
        }
        for &(a, b) in &glue_pairs {
            adjacency[a as usize].push((b, 0.0));
            adjacency[b as usize].push((a, 0.0));
        }
        GluedMetricGraph {
            node_count,
            segments,
            glue_pairs,
            root,
            adjacency,
        }
    }

    /// Checks that the pre-glue complex is a tree with positive lengths.
    pub fn validate(&self) -> Result<(), MetricError> {
        if self.segments.len() + 1 != self.node_count
            || self.segments.iter().any(|s| !(s.length > 0.0))
        {
            return Err(MetricError::NotATree);
        }
        let d = self.without_glue().node_distances(self.root);
        if d.iter().any(|x| !x.is_finite()) {
            return Err(MetricError::NotATree);
        }
        Ok(())
    }

    /// The same complex with identifications dropped.
    pub fn without_glue(&self) -> GluedMetricGraph {
        GluedMetricGraph::new(self.node_count, self.segments.clone(), Vec::new(), self.root)
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }

    pub fn shortest_segment(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| s.length)
            .fold(f64::INFINITY, f64::min)
    }

    fn check_point(&self, p: &SpacePoint) -> Result<(), MetricError> {
        match *p {
            SpacePoint::Node(v) => {
                if (v as usize) < self.node_count {
                    Ok(())
                } else {
                    Err(MetricError::NodeOutOfRange(v))
                }
            }
            SpacePoint::Interior { segment, offset } => {
                let s = self
                    .segments
                    .get(segment)
                    .ok_or(MetricError::PointOutsideComplex)?;
                if (0.0..=s.length).contains(&offset) {
                    Ok(())
                } else {
                    Err(MetricError::PointOutsideComplex)
                }
            }
        }
    }

    /// Dijkstra distances from `start` over nodes, glue hops included.
    pub fn node_distances(&self, start: u32) -> Vec<f64> {
        self.node_distances_from(&[(start, 0.0)])
    }

    fn node_distances_from(&self, anchors: &[(u32, f64)]) -> Vec<f64> {
        #[derive(PartialEq)]
        struct Entry(f64, u32);
        impl Eq for Entry {}
        impl Ord for Entry {
            fn cmp(&self, other: &Self) -> Ordering {
                other.0.partial_cmp(&self.0).unwrap_or(Ordering::Equal)
            }
        }
        impl PartialOrd for Entry {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }
        let mut dist = vec![f64::INFINITY; self.node_count];
        let mut heap = BinaryHeap::new();
        for &(v, d) in anchors {
            if d < dist[v as usize] {
                dist[v as usize] = d;
                heap.push(Entry(d, v));
            }
        }
        while let Some(Entry(d, v)) = heap.pop() {
            if d > dist[v as usize] {
                continue;
            }
            for &(w, len) in &self.adjacency[v as usize] {
                let nd = d + len;
                if nd < dist[w as usize] {
                    dist[w as usize] = nd;
                    heap.push(Entry(nd, w));
                }
            }
        }
        dist
    }

    pub fn node_distance(&self, a: u32, b: u32) -> Result<f64, MetricError> {
        self.check_point(&SpacePoint::Node(a))?;
        self.check_point(&SpacePoint::Node(b))?;
        Ok(self.node_distances(a)[b as usize])
    }

    fn anchors(&self, p: &SpacePoint) -> Vec<(u32, f64)> {
        match *p {
            SpacePoint::Node(v) => vec![(v, 0.0)],
            SpacePoint::Interior { segment, offset } => {
                let s = self.segments[segment];
                vec![(s.a, offset), (s.b, s.length - offset)]
            }
        }
    }

    /// Quotient distance between two points of the space.
    pub fn distance(&self, x: &SpacePoint, y: &SpacePoint) -> Result<f64, MetricError> {
        self.check_point(x)?;
        self.check_point(y)?;
        let dist = self.node_distances_from(&self.anchors(x));
        let mut best = match *y {
            SpacePoint::Node(v) => dist[v as usize],
            SpacePoint::Interior { segment, offset } => {
                let s = self.segments[segment];
                (dist[s.a as usize] + offset).min(dist[s.b as usize] + s.length - offset)
            }
        };
        // Two interior points of one segment can also connect inside it.
        if let (
            SpacePoint::Interior { segment: sx, offset: ox },
            SpacePoint::Interior { segment: sy, offset: oy },
        ) = (x, y)
        {
            if sx == sy {
                best = best.min((ox - oy).abs());
            }
        }
        Ok(best)
    }

    /// Splits segments so that the given points become nodes; returns the new
    /// space and the node id of each input point.
    pub fn with_materialized_points(
        &self,
        points: &[SpacePoint],
    ) -> Result<(GluedMetricGraph, Vec<u32>), MetricError> {
        for p in points {
            self.check_point(p)?;
        }
        // Per-segment interior offsets to realise as nodes.
        let mut cuts: Vec<Vec<(f64, usize)>> = vec![Vec::new(); self.segments.len()];
        let mut ids = vec![u32::MAX; points.len()];
        for (i, p) in points.iter().enumerate() {
            match *p {
                SpacePoint::Node(v) => ids[i] = v,
                SpacePoint::Interior { segment, offset } => {
                    let s = self.segments[segment];
                    if offset == 0.0 {
                        ids[i] = s.a;
                    } else if offset == s.length {
                        ids[i] = s.b;
                    } else {
                        cuts[segment].push((offset, i));
                    }
                }
            }
        }
        let mut segments = Vec::with_capacity(self.segments.len());
        let mut next = self.node_count as u32;
        for (si, s) in self.segments.iter().enumerate() {
            if cuts[si].is_empty() {
                segments.push(*s);
                continue;
            }
            cuts[si].sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
            let mut prev_node = s.a;
            let mut prev_off = 0.0;
            let mut iter = cuts[si].iter().peekable();
            while let Some(&(off, idx)) = iter.next() {
                let node = next;
                next += 1;
                ids[idx] = node;
                segments.push(Segment {
                    a: prev_node,
                    b: node,
                    length: off - prev_off,
                });
                // Coincident offsets share one node.
                while let Some(&&(off2, idx2)) = iter.peek() {
                    if (off2 - off).abs() < 1e-12 {
                        ids[idx2] = node;
                        iter.next();
                    } else {
                        break;
                    }
                }
                prev_node = node;
                prev_off = off;
            }
            segments.push(Segment {
                a: prev_node,
                b: s.b,
                length: s.length - prev_off,
            });
        }
        let graph = GluedMetricGraph::new(
            next as usize,
            segments,
            self.glue_pairs.clone(),
            self.root,
        );
        Ok((graph, ids))
    }

    /// Median of three points of the pre-glue tree.
    pub fn branch_point(
        &self,
        x: &SpacePoint,
        y: &SpacePoint,
        z: &SpacePoint,
    ) -> Result<SpacePoint, MetricError> {
        let (tree, ids) = self.without_glue().with_materialized_points(&[*x, *y, *z])?;
        let (a, b, c) = (ids[0], ids[1], ids[2]);
        let da = tree.node_distances(a);
        let db = tree.node_distances(b);
        let span = (da[b as usize] + da[c as usize] - db[c as usize]) / 2.0;
        // Walk from a towards b until the accumulated length reaches `span`;
        // the median lies on the a-b path.
        let path = tree.node_path(a, b);
        let mut acc = 0.0;
        for w in path.windows(2) {
            let step = tree.edge_length(w[0], w[1]);
            if acc + step >= span - 1e-12 {
                let rem = span - acc;
                if rem <= 1e-12 {
                    return Ok(self.normalize_point(&tree, w[0]));
                }
                if (step - rem).abs() <= 1e-12 {
                    return Ok(self.normalize_point(&tree, w[1]));
                }
                // Interior of segment (w0, w1) in the *materialized* tree; map
                // back to the original complex by distance from the anchors.
                let seg_idx = tree
                    .segments
                    .iter()
                    .position(|s| (s.a == w[0] && s.b == w[1]) || (s.a == w[1] && s.b == w[0]))
                    .expect("path edge exists");
                let s = tree.segments[seg_idx];
                let off = if s.a == w[0] { rem } else { s.length - rem };
                return Ok(self.locate(&tree, seg_idx, off));
            }
            acc += step;
        }
        Ok(self.normalize_point(&tree, *path.last().unwrap()))
    }

    /// Expresses node `v` of a materialized copy as a point of `self`.
    fn normalize_point(&self, tree: &GluedMetricGraph, v: u32) -> SpacePoint {
        if (v as usize) < self.node_count {
            return SpacePoint::Node(v);
        }
        // A materialized interior node: recover its host segment by distance.
        let d = tree.node_distances(v);
        for (si, s) in self.segments.iter().enumerate() {
            let off = d[s.a as usize];
            if (off + d[s.b as usize] - s.length).abs() < 1e-9 && off > 0.0 && off < s.length {
                return SpacePoint::Interior { segment: si, offset: off };
            }
        }
        SpacePoint::Node(v)
    }

    fn locate(&self, tree: &GluedMetricGraph, seg_idx: usize, off: f64) -> SpacePoint {
        let s = tree.segments[seg_idx];
        let pa = self.normalize_point(tree, s.a);
        match pa {
            SpacePoint::Node(a0) if (a0 as usize) < self.node_count => {
                // Find the original segment containing this stretch.
                let d = tree.node_distances(s.a);
                for (si, orig) in self.segments.iter().enumerate() {
                    let da = d[orig.a as usize];
                    let db = d[orig.b as usize];
                    if (da + db - orig.length).abs() < 1e-9 || da == 0.0 || db == 0.0 {
                        let offset = if orig.a == a0 {
                            off
                        } else if orig.b == a0 {
                            orig.length - off
                        } else {
                            continue;
                        };
                        if offset >= 0.0 && offset <= orig.length {
                            return SpacePoint::Interior { segment: si, offset };
                        }
                    }
                }
                SpacePoint::Node(a0)
            }
            SpacePoint::Interior { segment, offset } => {
                let orig = self.segments[segment];
                let d_to_a = tree.node_distances(s.a)[orig.a as usize];
                let towards_b = (d_to_a - offset).abs() < 1e-9;
                let new_off = if towards_b { offset + off } else { offset - off };
                SpacePoint::Interior {
                    segment,
                    offset: new_off.clamp(0.0, orig.length),
                }
            }
            _ => pa,
        }
    }

    fn node_path(&self, a: u32, b: u32) -> Vec<u32> {
        // Predecessor walk on Dijkstra from a.
        let mut dist = vec![f64::INFINITY; self.node_count];
        let mut prev = vec![u32::MAX; self.node_count];
        let mut heap = BinaryHeap::new();
        #[derive(PartialEq)]
        struct Entry(f64, u32);
        impl Eq for Entry {}
        impl Ord for Entry {
            fn cmp(&self, other: &Self) -> Ordering {
                other.0.partial_cmp(&self.0).unwrap_or(Ordering::Equal)
            }
        }
        impl PartialOrd for Entry {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }
        dist[a as usize] = 0.0;
        heap.push(Entry(0.0, a));
        while let Some(Entry(d, v)) = heap.pop() {
            if d > dist[v as usize] {
                continue;
            }
            for &(w, len) in &self.adjacency[v as usize] {
                let nd = d + len;
                if nd < dist[w as usize] {
                    dist[w as usize] = nd;
                    prev[w as usize] = v;
                    heap.push(Entry(nd, w));
                }
            }
        }
        let mut path = vec![b];
        let mut cur = b;
        while cur != a {
            cur = prev[cur as usize];
            path.push(cur);
        }
        path.reverse();
        path
    }

    fn edge_length(&self, a: u32, b: u32) -> f64 {
        self.adjacency[a as usize]
            .iter()
            .filter(|&&(w, _)| w == b)
            .map(|&(_, l)| l)
            .fold(f64::INFINITY, f64::min)
    }

    /// `count + 1` evenly spaced points along a geodesic between two nodes in
    /// the quotient metric.
    pub fn geodesic_points(
        &self,
        a: u32,
        b: u32,
        count: usize,
    ) -> Result<Vec<SpacePoint>, MetricError> {
        self.check_point(&SpacePoint::Node(a))?;
        self.check_point(&SpacePoint::Node(b))?;
        let path = self.node_path(a, b);
        let mut hops = Vec::new(); // (node_from, node_to, length, seg index or None)
        for w in path.windows(2) {
            let len = self.edge_length(w[0], w[1]);
            let seg = self.segments.iter().position(|s| {
                ((s.a == w[0] && s.b == w[1]) || (s.a == w[1] && s.b == w[0]))
                    && (s.length - len).abs() < 1e-12
            });
            hops.push((w[0], w[1], len, seg));
        }
        let total: f64 = hops.iter().map(|h| h.2).sum();
        let mut out = Vec::with_capacity(count + 1);
        for i in 0..=count {
            let target = total * i as f64 / count.max(1) as f64;
            let mut acc = 0.0;
            let mut point = SpacePoint::Node(a);
            for &(from, to, len, seg) in &hops {
                if acc + len >= target - 1e-12 {
                    let rem = (target - acc).clamp(0.0, len);
                    point = if rem <= 1e-12 {
                        SpacePoint::Node(from)
                    } else if (len - rem).abs() <= 1e-12 {
                        SpacePoint::Node(to)
                    } else if let Some(si) = seg {
                        let s = self.segments[si];
                        let off = if s.a == from { rem } else { s.length - rem };
                        SpacePoint::Interior { segment: si, offset: off }
                    } else {
                        SpacePoint::Node(to)
                    };
                    break;
                }
                acc += len;
                point = SpacePoint::Node(to);
            }
            out.push(point);
        }
        Ok(out)
    }
}

/// Uniform mesh of a glued metric graph with identified nodes fused.
#[derive(Debug, Clone)]
pub struct MeshedSpace {
    pub eps: f64,
    pub node_count: usize,
    /// Mesh edges with their exact lengths.
    pub edges: Vec<(u32, u32, f64)>,
    /// Fused mesh node of each original graph node.
    pub node_of: Vec<u32>,
    pub root: u32,
    /// Largest relative deviation of a mesh step from `eps`.
    pub worst_misfit: f64,
}

/// Subdivides every segment into steps of roughly `eps` and fuses glue pairs.
///
/// Segment lengths are preserved exactly (steps are `length / round(length/eps)`);
/// `worst_misfit` reports how far the steps stray from `eps`.
pub fn mesh(space: &GluedMetricGraph, eps: f64) -> Result<MeshedSpace, MetricError> {
    let shortest = space.shortest_segment();
    if !(eps > 0.0) || eps > shortest * 1.5 {
        return Err(MetricError::MeshTooCoarse { eps, shortest });
    }
    // Fuse glue pairs with a union-find over original nodes.
    let mut parent: Vec<u32> = (0..space.node_count as u32).collect();
    fn find(parent: &mut Vec<u32>, mut x: u32) -> u32 {
        while parent[x as usize] != x {
            let g = parent[parent[x as usize] as usize];
            parent[x as usize] = g;
            x = g;
        }
        x
    }
    for &(a, b) in &space.glue_pairs {
        let ra = find(&mut parent, a);
        let rb = find(&mut parent, b);
        if ra != rb {
            parent[rb as usize] = ra;
        }
    }
    let mut node_of = vec![u32::MAX; space.node_count];
    let mut next = 0u32;
    for v in 0..space.node_count as u32 {
        let r = find(&mut parent, v);
        if node_of[r as usize] == u32::MAX {
            node_of[r as usize] = next;
            next += 1;
        }
        node_of[v as usize] = node_of[r as usize];
    }
    let mut edges = Vec::new();
    let mut worst_misfit: f64 = 0.0;
    for s in &space.segments {
        let sub = (s.length / eps).round().max(1.0) as usize;
        let step = s.length / sub as f64;
        worst_misfit = worst_misfit.max((step - eps).abs() / eps);
        let mut prev = node_of[s.a as usize];
        for i in 1..=sub {
            let node = if i == sub {
                node_of[s.b as usize]
            } else {
                let id = next;
                next += 1;
                id
            };
            edges.push((prev, node, step));
            prev = node;
        }
    }
    Ok(MeshedSpace {
        eps,
        node_count: next as usize,
        edges,
        node_of: node_of
            .iter()
            .map(|&r| r)
            .collect(),
        root: node_of[space.root as usize],
        worst_misfit,
    })
}

/// Skeleton of a discrete component: union of root paths to `k` targets plus
/// the surplus-edge endpoints, with the surplus edges attached.
#[derive(Debug, Clone)]
pub struct DiscreteSkeleton {
    /// Sorted component-local vertices of the skeleton.
    pub vertices: Vec<u32>,
    pub in_skeleton: Vec<bool>,
    /// Leaf targets `u_1..u_k`; the first `glue_count` are surplus-edge tips.
    pub leaf_targets: Vec<u32>,
    /// Surplus edges `(u_i, v_i)` for the glue points, in point order.
    pub glue_edges: Vec<(u32, u32)>,
    /// Variates that selected the non-glue leaves (recorded for dumps).
    pub xi: Vec<f64>,
    /// Edges of the skeleton graph: in-skeleton tree edges plus surplus edges.
    pub edges: Vec<(u32, u32)>,
    /// Degree within the skeleton graph, indexed by component vertex.
    pub degrees: Vec<u32>,
}

impl DiscreteSkeleton {
    pub fn glue_count(&self) -> usize {
        self.glue_edges.len()
    }

    /// Number of skeleton edges (the total-length scale of the skeleton).
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// Builds the skeleton from `k` leaf targets: the surplus tips first, then
/// contour-sampled vertices at times `floor(2 (len-1) xi_i)`.
pub fn build_skeleton(
    component: &Component,
    encoded: &EncodedComponent,
    k: usize,
    xi: &[f64],
) -> Result<DiscreteSkeleton, MetricError> {
    let glue = surplus_edges(&encoded.tree, &encoded.points).expect("encoding is consistent");
    let glue_count = glue.len();
    if k < glue_count + 1 {
        return Err(MetricError::SkeletonTooSmall {
            k,
            glue_points: glue_count,
        });
    }
    let extra = k - glue_count;
    if xi.len() < extra {
        return Err(MetricError::NotEnoughVariates {
            need: extra,
            got: xi.len(),
        });
    }
    let record = dfs_scan(&encoded.tree).expect("encoding is consistent");
    let len = component.len();
    let mut leaf_targets: Vec<u32> = glue.iter().map(|&(u, _)| u).collect();
    for &x in xi.iter().take(extra) {
        let idx = (2.0 * (len as f64 - 1.0) * x).floor() as usize;
        leaf_targets.push(record.contour_vertex[idx.min(record.contour_vertex.len() - 1)]);
    }
    let mut in_skeleton = vec![false; len];
    let mark_path = |v: u32, flags: &mut Vec<bool>| {
        let mut cur = v;
        loop {
            if flags[cur as usize] {
                break;
            }
            flags[cur as usize] = true;
            match encoded.tree.parent[cur as usize] {
                Some(p) => cur = p,
                None => break,
            }
        }
    };
    for &u in &leaf_targets {
        mark_path(u, &mut in_skeleton);
    }
    for &(_, v) in &glue {
        mark_path(v, &mut in_skeleton);
    }
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for v in 0..len as u32 {
        if in_skeleton[v as usize] {
            if let Some(p) = encoded.tree.parent[v as usize] {
                edges.push((p.min(v), p.max(v)));
            }
        }
    }
    for &(u, v) in &glue {
        edges.push((u.min(v), u.max(v)));
    }
    let mut degrees = vec![0u32; len];
    for &(a, b) in &edges {
        degrees[a as usize] += 1;
        degrees[b as usize] += 1;
    }
    let vertices: Vec<u32> = (0..len as u32)
        .filter(|&v| in_skeleton[v as usize])
        .collect();
    Ok(DiscreteSkeleton {
        vertices,
        in_skeleton,
        leaf_targets,
        glue_edges: glue,
        xi: xi[..extra].to_vec(),
        edges,
        degrees,
    })
}

/// Projection of every component vertex onto the skeleton: the first skeleton
/// vertex on its root path. Identity on skeleton vertices.
pub fn project_all(encoded: &EncodedComponent, skeleton: &DiscreteSkeleton) -> Vec<u32> {
    let len = encoded.tree.len();
    let mut proj = vec![u32::MAX; len];
    for &v in &encoded.tree.dfs_order {
        proj[v as usize] = if skeleton.in_skeleton[v as usize] {
            v
        } else {
            let p = encoded.tree.parent[v as usize].expect("root is always in the skeleton");
            proj[p as usize]
        };
    }
    proj
}

/// Measures carried by a skeleton: total length and projected vertex masses.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurePack {
    /// Total length of the skeleton (edge count for unit-length edges).
    pub hausdorff_total: f64,
    /// Pushforward of the parent measure, indexed by vertex.
    pub projected_mass: Vec<f64>,
}

/// Counting measure of the component pushed onto the skeleton.
pub fn discrete_measures(
    component: &Component,
    skeleton: &DiscreteSkeleton,
    projection: &[u32],
) -> MeasurePack {
    let mut projected_mass = vec![0.0; component.len()];
    for &target in projection {
        projected_mass[target as usize] += 1.0;
    }
    MeasurePack {
        hausdorff_total: skeleton.edge_count() as f64,
        projected_mass,
    }
}

/// Largest distance from a vertex to its skeleton projection.
///
/// Inside a component the preimage classes are trees hanging off their
/// skeleton vertex, so the component distance to the projection equals the
/// depth difference in the spanning tree.
pub fn projection_radius(encoded: &EncodedComponent, projection: &[u32]) -> u32 {
    let mut depth = vec![0u32; encoded.tree.len()];
    for &v in &encoded.tree.dfs_order {
        if let Some(p) = encoded.tree.parent[v as usize] {
            depth[v as usize] = depth[p as usize] + 1;
        }
    }
    projection
        .iter()
        .enumerate()
        .map(|(v, &t)| depth[v] - depth[t as usize])
        .max()
        .unwrap_or(0)
}

/// Tree with pendant length-2 paths whose fusion reproduces the skeleton
/// graph: each surplus tip `u_i` gains the path `u_i - v_i - w~_i`, and
/// `w~_i` is fused with `w_i`, the tree neighbour of `v_i` on the root path.
#[derive(Debug, Clone)]
pub struct HatTree {
    pub node_count: usize,
    pub edges: Vec<(u32, u32)>,
    /// Pairs `(w_i, w~_i)` to fuse; `w~_i` are fresh ids past the component.
    pub fuse_pairs: Vec<(u32, u32)>,
    /// Conditions under which the pendant picture degenerates on this sample.
    pub degenerate: Vec<String>,
}

impl HatTree {
    /// Edge set after fusing, with `w~_i` renamed to `w_i`.
    pub fn fused_edges(&self) -> Vec<(u32, u32)> {
        let mut rename: Vec<u32> = (0..self.node_count as u32).collect();
        for &(w, tilde) in &self.fuse_pairs {
            rename[tilde as usize] = w;
        }
        let mut out: Vec<(u32, u32)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (rename[a as usize], rename[b as usize]);
                (a.min(b), a.max(b))
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn lca(encoded: &EncodedComponent, a: u32, b: u32) -> u32 {
    let pa = encoded.tree.root_path(a);
    let pb = encoded.tree.root_path(b);
    let mut last = 0;
    for (x, y) in pa.iter().zip(pb.iter()) {
        if x == y {
            last = *x;
        } else {
            break;
        }
    }
    last
}

fn branch_vertex(encoded: &EncodedComponent, x: u32, y: u32, z: u32) -> u32 {
    let depth = |v: u32| encoded.tree.depth(v);
    let cands = [lca(encoded, x, y), lca(encoded, y, z), lca(encoded, x, z)];
    *cands
        .iter()
        .max_by_key(|&&v| depth(v))
        .expect("three candidates")
}

/// Builds the hat tree for a skeleton. The fused graph is compared against
/// the skeleton edge set by the caller; degeneracies are reported, not fixed.
pub fn hat_tree(
    encoded: &EncodedComponent,
    skeleton: &DiscreteSkeleton,
) -> HatTree {
    let len = encoded.tree.len();
    let glue_count = skeleton.glue_count();
    // The tilde tree spans root paths to the leaf targets only.
    let mut in_tilde = vec![false; len];
    for &u in &skeleton.leaf_targets {
        let mut cur = u;
        loop {
            if in_tilde[cur as usize] {
                break;
            }
            in_tilde[cur as usize] = true;
            match encoded.tree.parent[cur as usize] {
                Some(p) => cur = p,
                None => break,
            }
        }
    }
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for v in 0..len as u32 {
        if in_tilde[v as usize] {
            if let Some(p) = encoded.tree.parent[v as usize] {
                edges.push((p.min(v), p.max(v)));
            }
        }
    }
    let mut degenerate = Vec::new();
    let mut fuse_pairs = Vec::new();
    let node_count = len + glue_count;
    // Branch points of root/leaf-target triples; the pendant picture needs
    // every w_i to avoid them.
    let mut branch_set = std::collections::HashSet::new();
    let anchors: Vec<u32> = std::iter::once(0)
        .chain(skeleton.glue_edges.iter().map(|&(u, _)| u))
        .collect();
    for i in 0..anchors.len() {
        for j in (i + 1)..anchors.len() {
            for l in (j + 1)..anchors.len() {
                branch_set.insert(branch_vertex(encoded, anchors[i], anchors[j], anchors[l]));
            }
        }
    }
    let mut seen_w = std::collections::HashSet::new();
    for (i, &(u, v)) in skeleton.glue_edges.iter().enumerate() {
        let tilde = (len + i) as u32;
        if in_tilde[v as usize] {
            degenerate.push(format!("glue target {v} already lies in the tilde tree"));
        }
        let w = encoded.tree.parent[v as usize].expect("glue target is never the root");
        if !in_tilde[w as usize] {
            degenerate.push(format!("tree neighbour {w} of glue target {v} off the tilde tree"));
        }
        if branch_set.contains(&w) {
            degenerate.push(format!("fuse vertex {w} is a branch point of the leaf spans"));
        }
        if !seen_w.insert(w) {
            degenerate.push(format!("fuse vertex {w} repeats across glue points"));
        }
        edges.push((u.min(v), u.max(v)));
        edges.push((v, tilde));
        fuse_pairs.push((w, tilde));
    }
    edges.sort_unstable();
    edges.dedup();
    HatTree {
        node_count,
        edges,
        fuse_pairs,
        degenerate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfs::decompose_component;
    use crate::graphgen::{sample_largest_component, GnpParams};
    use crate::rng::{replica_seed, rng_from_seed};
    use rand::Rng;

    fn segment_space(length: f64, glue_ends: bool) -> GluedMetricGraph {
        let glue = if glue_ends { vec![(0, 1)] } else { vec![] };
        GluedMetricGraph::new(
            2,
            vec![Segment { a: 0, b: 1, length }],
            glue,
            0,
        )
    }

    #[test]
    fn unglued_distance_is_tree_distance() {
        let g = segment_space(1.0, false);
        g.validate().unwrap();
        let x = SpacePoint::Interior { segment: 0, offset: 0.1 };
        let y = SpacePoint::Interior { segment: 0, offset: 0.9 };
        assert!((g.distance(&x, &y).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn glued_segment_behaves_like_a_circle() {
        let g = segment_space(1.0, true);
        let x = SpacePoint::Interior { segment: 0, offset: 0.1 };
        let y = SpacePoint::Interior { segment: 0, offset: 0.9 };
        assert!((g.distance(&x, &y).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn out_of_complex_points_are_rejected() {
        let g = segment_space(1.0, false);
        let bad = SpacePoint::Interior { segment: 0, offset: 1.5 };
        assert!(matches!(
            g.distance(&bad, &SpacePoint::Node(0)),
            Err(MetricError::PointOutsideComplex)
        ));
        assert!(matches!(
            g.node_distance(0, 9),
            Err(MetricError::NodeOutOfRange(9))
        ));
    }

    /// Oracle: the quotient-metric infimum over explicit identification
    /// chains, enumerating subsets and orders of glue jumps.
    fn chain_oracle(g: &GluedMetricGraph, x: &SpacePoint, y: &SpacePoint) -> f64 {
        let tree = g.without_glue();
        let mut pts = vec![*x, *y];
        for &(a, b) in &g.glue_pairs {
            pts.push(SpacePoint::Node(a));
            pts.push(SpacePoint::Node(b));
        }
        let (mat, ids) = tree.with_materialized_points(&pts).unwrap();
        let d = |a: u32, b: u32| mat.node_distances(a)[b as usize];
        let xs = ids[0];
        let ys = ids[1];
        let jumps: Vec<(u32, u32)> = (0..g.glue_pairs.len())
            .map(|i| (ids[2 + 2 * i], ids[3 + 2 * i]))
            .collect();
        let mut best = d(xs, ys);
        // Depth-first over jump orders, both orientations, each pair at most
        // once.
        fn explore(
            cur: u32,
            ys: u32,
            used: &mut Vec<bool>,
            acc: f64,
            jumps: &[(u32, u32)],
            d: &dyn Fn(u32, u32) -> f64,
            best: &mut f64,
        ) {
            if acc >= *best {
                return;
            }
            let direct = acc + d(cur, ys);
            if direct < *best {
                *best = direct;
            }
            for (i, &(a, b)) in jumps.iter().enumerate() {
                if used[i] {
                    continue;
                }
                used[i] = true;
                explore(b, ys, used, acc + d(cur, a), jumps, d, best);
                explore(a, ys, used, acc + d(cur, b), jumps, d, best);
                used[i] = false;
            }
        }
        let mut used = vec![false; jumps.len()];
        explore(xs, ys, &mut used, 0.0, &jumps, &d, &mut best);
        best
    }

    fn random_glued_tree(seed: u64, nodes: usize, glue_count: usize) -> GluedMetricGraph {
        let mut rng = rng_from_seed(seed);
        let mut segments = Vec::new();
        for v in 1..nodes as u32 {
            let parent = rng.random_range(0..v);
            segments.push(Segment {
                a: parent,
                b: v,
                length: 0.2 + rng.random::<f64>(),
            });
        }
        let mut glue = Vec::new();
        for _ in 0..glue_count {
            let a = rng.random_range(0..nodes as u32);
            let b = rng.random_range(0..nodes as u32);
            if a != b {
                glue.push((a, b));
            }
        }
        GluedMetricGraph::new(nodes, segments, glue, 0)
    }

    #[test]
    fn quotient_distance_matches_chain_oracle() {
        let mut rng = rng_from_seed(0xD155);
        for rep in 0..40 {
            let g = random_glued_tree(replica_seed(0xD155, rep), 4 + (rep as usize % 27), rep as usize % 4);
            for _ in 0..20 {
                let a = rng.random_range(0..g.node_count as u32);
                let b = rng.random_range(0..g.node_count as u32);
                let x = SpacePoint::Node(a);
                let y = SpacePoint::Node(b);
                let fast = g.distance(&x, &y).unwrap();
                let slow = chain_oracle(&g, &x, &y);
                assert!(
                    (fast - slow).abs() < 1e-9,
                    "rep {rep}: {fast} vs {slow} between {a} and {b}"
                );
            }
        }
    }

    #[test]
    fn quotient_distance_never_exceeds_tree_distance() {
        let mut rng = rng_from_seed(0xEE);
        for rep in 0..20 {
            let g = random_glued_tree(replica_seed(0xEE, rep), 20, 3);
            let tree = g.without_glue();
            for _ in 0..40 {
                let a = rng.random_range(0..20u32);
                let b = rng.random_range(0..20u32);
                let dq = g.node_distance(a, b).unwrap();
                let dt = tree.node_distance(a, b).unwrap();
                assert!(dq <= dt + 1e-12);
            }
        }
    }

    #[test]
    fn branch_point_basics() {
        // Star: center 0 with three unit rays to 1, 2, 3.
        let g = GluedMetricGraph::new(
            4,
            vec![
                Segment { a: 0, b: 1, length: 1.0 },
                Segment { a: 0, b: 2, length: 1.0 },
                Segment { a: 0, b: 3, length: 1.0 },
            ],
            vec![],
            0,
        );
        let b = g
            .branch_point(
                &SpacePoint::Node(1),
                &SpacePoint::Node(2),
                &SpacePoint::Node(0),
            )
            .unwrap();
        assert_eq!(b, SpacePoint::Node(0));
        let same = g
            .branch_point(
                &SpacePoint::Node(1),
                &SpacePoint::Node(1),
                &SpacePoint::Node(2),
            )
            .unwrap();
        assert_eq!(same, SpacePoint::Node(1));
    }

    #[test]
    fn branch_point_matches_path_intersection_oracle() {
        let mut rng = rng_from_seed(0xB0);
        for rep in 0..20 {
            let g = random_glued_tree(replica_seed(0xB0, rep), 15, 0);
            for _ in 0..10 {
                let x = rng.random_range(0..15u32);
                let y = rng.random_range(0..15u32);
                let z = rng.random_range(0..15u32);
                let b = g
                    .branch_point(
                        &SpacePoint::Node(x),
                        &SpacePoint::Node(y),
                        &SpacePoint::Node(z),
                    )
                    .unwrap();
                // Oracle: the median node minimises the sum of distances.
                let dx = g.without_glue().node_distances(x);
                let dy = g.without_glue().node_distances(y);
                let dz = g.without_glue().node_distances(z);
                let best = (0..15u32)
                    .min_by(|&u, &v| {
                        let su = dx[u as usize] + dy[u as usize] + dz[u as usize];
                        let sv = dx[v as usize] + dy[v as usize] + dz[v as usize];
                        su.partial_cmp(&sv).unwrap()
                    })
                    .unwrap();
                match b {
                    SpacePoint::Node(v) => assert_eq!(v, best),
                    SpacePoint::Interior { .. } => {
                        // Median can sit inside a segment; check it beats the
                        // best node.
                        let db = g.without_glue().distance(&b, &SpacePoint::Node(x)).unwrap()
                            + g.without_glue().distance(&b, &SpacePoint::Node(y)).unwrap()
                            + g.without_glue().distance(&b, &SpacePoint::Node(z)).unwrap();
                        let bn = dx[best as usize] + dy[best as usize] + dz[best as usize];
                        assert!(db <= bn + 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn geodesic_chain_steps_are_short() {
        for rep in 0..10 {
            let g = random_glued_tree(replica_seed(0x6E0, rep), 25, 3);
            let d = g.node_distance(3, 17).unwrap();
            if d == 0.0 {
                continue;
            }
            for n in [2usize, 5, 16] {
                let pts = g.geodesic_points(3, 17, n).unwrap();
                assert_eq!(pts.len(), n + 1);
                for w in pts.windows(2) {
                    let step = g.distance(&w[0], &w[1]).unwrap();
                    assert!(
                        step <= 2.0 * d / n as f64 + 1e-9,
                        "step {step} exceeds bound for n={n}, d={d}"
                    );
                }
            }
        }
    }

    fn sampled_encoded(seed: u64) -> (crate::graphgen::Component, EncodedComponent) {
        let params = GnpParams::new(3000, 0.0, seed).unwrap();
        let comp = sample_largest_component(&params).unwrap();
        let enc = decompose_component(&comp).unwrap();
        (comp, enc)
    }

    #[test]
    fn skeleton_contains_targets_and_root() {
        let mut rng = rng_from_seed(21);
        for rep in 0..10u64 {
            let (comp, enc) = sampled_encoded(replica_seed(0x5E1, rep));
            let glue_count = enc.points.len();
            let k = glue_count + 3;
            let xi: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
            let skel = build_skeleton(&comp, &enc, k, &xi).unwrap();
            assert!(skel.in_skeleton[0]);
            for &u in &skel.leaf_targets {
                assert!(skel.in_skeleton[u as usize]);
            }
            for &(u, v) in &skel.glue_edges {
                assert!(skel.in_skeleton[u as usize]);
                assert!(skel.in_skeleton[v as usize]);
            }
            assert_eq!(
                skel.edge_count(),
                skel.vertices.len() - 1 + glue_count,
                "skeleton is a tree plus the surplus edges"
            );
        }
    }

    #[test]
    fn skeleton_k_too_small_is_rejected() {
        let (comp, enc) = sampled_encoded(0xA11CE);
        let glue_count = enc.points.len();
        assert!(matches!(
            build_skeleton(&comp, &enc, glue_count, &[]),
            Err(MetricError::SkeletonTooSmall { .. })
        ));
    }

    #[test]
    fn projection_is_identity_on_skeleton_and_nearest_overall() {
        let mut rng = rng_from_seed(3);
        for rep in 0..8u64 {
            let params = GnpParams::new(160, 0.0, replica_seed(0x9A0, rep)).unwrap();
            let comp = sample_largest_component(&params).unwrap();
            if comp.len() < 4 {
                continue;
            }
            let enc = decompose_component(&comp).unwrap();
            let k = enc.points.len() + 2;
            let xi: Vec<f64> = (0..2).map(|_| rng.random::<f64>()).collect();
            let skel = build_skeleton(&comp, &enc, k, &xi).unwrap();
            let proj = project_all(&enc, &skel);
            for &v in &skel.vertices {
                assert_eq!(proj[v as usize], v);
            }
            // Exhaustive argmin oracle in the tree metric.
            let tree_comp = Component::from_local_edges(
                comp.len(),
                comp.labels.clone(),
                &enc.tree
                    .parent
                    .iter()
                    .enumerate()
                    .filter_map(|(v, p)| p.map(|p| (p.min(v as u32), p.max(v as u32))))
                    .collect::<Vec<_>>(),
            );
            for v in 0..comp.len() as u32 {
                let d = tree_comp.distances_from(v);
                let best = skel
                    .vertices
                    .iter()
                    .map(|&s| d[s as usize])
                    .min()
                    .unwrap();
                assert_eq!(
                    d[proj[v as usize] as usize], best,
                    "vertex {v} projects to a non-nearest skeleton vertex"
                );
            }
        }
    }

    #[test]
    fn projection_radius_matches_component_metric() {
        let mut rng = rng_from_seed(8);
        for rep in 0..8u64 {
            let params = GnpParams::new(200, 0.5, replica_seed(0x44D, rep)).unwrap();
            let comp = sample_largest_component(&params).unwrap();
            if comp.len() < 4 {
                continue;
            }
            let enc = decompose_component(&comp).unwrap();
            let k = enc.points.len() + 2;
            let xi: Vec<f64> = (0..2).map(|_| rng.random::<f64>()).collect();
            let skel = build_skeleton(&comp, &enc, k, &xi).unwrap();
            let proj = project_all(&enc, &skel);
            let fast = projection_radius(&enc, &proj);
            // Oracle: BFS in the full component graph.
            let slow = (0..comp.len() as u32)
                .map(|v| comp.distances_from(v)[proj[v as usize] as usize])
                .max()
                .unwrap();
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn full_skeleton_has_radius_zero() {
        let (comp, enc) = sampled_encoded(0xF11);
        // k large enough that every vertex is a target is impractical, but a
        // skeleton from every leaf vertex covers the tree: emulate by feeding
        // all vertices as glue-free contour picks via xi on a path; instead
        // check directly that radius vanishes when the projection is the
        // identity.
        let proj: Vec<u32> = (0..comp.len() as u32).collect();
        assert_eq!(projection_radius(&enc, &proj), 0);
    }

    #[test]
    fn measure_conservation() {
        let mut rng = rng_from_seed(17);
        let (comp, enc) = sampled_encoded(0xAB);
        let k = enc.points.len() + 4;
        let xi: Vec<f64> = (0..4).map(|_| rng.random::<f64>()).collect();
        let skel = build_skeleton(&comp, &enc, k, &xi).unwrap();
        let proj = project_all(&enc, &skel);
        let pack = discrete_measures(&comp, &skel, &proj);
        let total: f64 = pack.projected_mass.iter().sum();
        assert_eq!(total as usize, comp.len());
        for (v, &m) in pack.projected_mass.iter().enumerate() {
            if m > 0.0 {
                assert!(skel.in_skeleton[v]);
            }
        }
    }

    #[test]
    fn preimages_are_hanging_trees_meeting_skeleton_once() {
        let mut rng = rng_from_seed(29);
        for rep in 0..6u64 {
            let params = GnpParams::new(200, 0.0, replica_seed(0x77A, rep)).unwrap();
            let comp = sample_largest_component(&params).unwrap();
            if comp.len() < 5 {
                continue;
            }
            let enc = decompose_component(&comp).unwrap();
            let k = enc.points.len() + 2;
            let xi: Vec<f64> = (0..2).map(|_| rng.random::<f64>()).collect();
            let skel = build_skeleton(&comp, &enc, k, &xi).unwrap();
            let proj = project_all(&enc, &skel);
            for &x in &skel.vertices {
                let class: Vec<u32> = (0..comp.len() as u32)
                    .filter(|&v| proj[v as usize] == x)
                    .collect();
                // Exactly one skeleton vertex inside the class.
                assert_eq!(
                    class
                        .iter()
                        .filter(|&&v| skel.in_skeleton[v as usize])
                        .count(),
                    1
                );
                // The class induces a connected subgraph of the component
                // once the skeleton edges at x are removed: BFS restricted to
                // the class from x must reach every member.
                let in_class: Vec<bool> = (0..comp.len() as u32)
                    .map(|v| proj[v as usize] == x)
                    .collect();
                let mut seen = vec![false; comp.len()];
                let mut queue = std::collections::VecDeque::new();
                seen[x as usize] = true;
                queue.push_back(x);
                let mut count = 0;
                while let Some(v) = queue.pop_front() {
                    count += 1;
                    for &w in &comp.adjacency[v as usize] {
                        if in_class[w as usize] && !seen[w as usize] {
                            seen[w as usize] = true;
                            queue.push_back(w);
                        }
                    }
                }
                assert_eq!(count, class.len());
            }
        }
    }

    #[test]
    fn hat_tree_fuses_to_the_skeleton_graph() {
        let mut rng = rng_from_seed(31);
        let mut checked = 0;
        for rep in 0..60u64 {
            let params = GnpParams::new(4000, 0.0, replica_seed(0x8A7, rep)).unwrap();
            let comp = sample_largest_component(&params).unwrap();
            let enc = decompose_component(&comp).unwrap();
            if enc.points.is_empty() {
                continue;
            }
            let k = enc.points.len() + 3;
            let xi: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
            let skel = build_skeleton(&comp, &enc, k, &xi).unwrap();
            let hat = hat_tree(&enc, &skel);
            if !hat.degenerate.is_empty() {
                continue;
            }
            checked += 1;
            // A tree: connected with node_count-1 edges over its support.
            let support: std::collections::HashSet<u32> = hat
                .edges
                .iter()
                .flat_map(|&(a, b)| [a, b])
                .collect();
            assert_eq!(hat.edges.len(), support.len() - 1, "hat graph is a tree");
            assert_eq!(
                hat.edges.len(),
                skel.edge_count(),
                "hat tree edge count equals the skeleton's"
            );
            let mut fused = hat.fused_edges();
            fused.sort_unstable();
            let mut skel_edges = skel.edges.clone();
            skel_edges.sort_unstable();
            assert_eq!(fused, skel_edges, "fused hat tree = skeleton graph");
            if checked > 10 {
                break;
            }
        }
        assert!(checked >= 3, "too few non-degenerate samples: {checked}");
    }

    #[test]
    fn hat_tree_without_glue_is_the_leaf_span() {
        let (comp, enc) = sampled_encoded(0x40);
        if !enc.points.is_empty() {
            return;
        }
        let k = 2;
        let skel = build_skeleton(&comp, &enc, k, &[0.3, 0.7]).unwrap();
        let hat = hat_tree(&enc, &skel);
        assert!(hat.fuse_pairs.is_empty());
        assert_eq!(hat.edges.len(), skel.edge_count());
    }

    #[test]
    fn record_round_trips() {
        let g = random_glued_tree(0x11, 10, 2);
        let rec = GluedMetricGraphRecord::from(&g);
        let text = serde_json::to_string(&rec).unwrap();
        let back: GluedMetricGraphRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back.decode(), g);
    }

    #[test]
    fn mesh_preserves_lengths_and_fuses() {
        let g = segment_space(1.0, true);
        let m = mesh(&g, 0.1).unwrap();
        assert_eq!(m.node_of[0], m.node_of[1], "glued ends fuse to one node");
        let total: f64 = m.edges.iter().map(|e| e.2).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(m.worst_misfit < 1e-12);
        assert!(matches!(
            mesh(&g, 5.0),
            Err(MetricError::MeshTooCoarse { .. })
        ));
    }
}
