//! Critical-window Erdős–Rényi sampling and component extraction.
//!
//! Edge probability is parameterised as `p = 1/n + lambda * n^(-4/3)`; the
//! sampler walks the lexicographic sequence of the `n(n-1)/2` vertex pairs
//! with geometric gaps, so a draw costs time proportional to the number of
//! edges rather than the number of pairs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rand::Rng;

use crate::rng::rng_from_seed;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("vertex count must be at least 1")]
    EmptyGraph,
    #[error("edge probability {0} outside [0,1]; lambda too extreme for n")]
    ProbabilityOutOfRange(f64),
    #[error("vertex label {0} not in component")]
    UnknownVertex(u32),
}

/// Parameters of one `G(n,p)` draw in the critical window.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GnpParams {
    pub n: usize,
    pub lambda: f64,
    pub seed: u64,
}

impl GnpParams {
    pub fn new(n: usize, lambda: f64, seed: u64) -> Result<Self, GraphError> {
        let params = GnpParams { n, lambda, seed };
        params.edge_probability()?;
        Ok(params)
    }

    /// `p = 1/n + lambda * n^(-4/3)`, validated to lie in `[0,1]`.
    pub fn edge_probability(&self) -> Result<f64, GraphError> {
        if self.n == 0 {
            return Err(GraphError::EmptyGraph);
        }
        let n = self.n as f64;
        let p = 1.0 / n + self.lambda * n.powf(-4.0 / 3.0);
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(GraphError::ProbabilityOutOfRange(p));
        }
        Ok(p)
    }
}

/// Unordered edge on 1-based vertex labels, stored as `(min, max)`.
pub type Edge = (u32, u32);

/// Maps a pair index `k` in `0..n(n-1)/2` to the `k`-th pair `(u, v)`,
/// `1 <= u < v <= n`, in lexicographic order.
fn pair_from_index(n: u64, k: u64) -> Edge {
    // Pairs with first coordinate u (1-based) occupy indices
    // [s(u), s(u) + n - u) where s(u) = (u-1)n - u(u-1)/2.
    let s = |u: u64| (u - 1) * n - u * (u - 1) / 2;
    // Float initial guess, then exact fix-up (at most a couple of steps).
    let nf = n as f64;
    let kf = k as f64;
    let disc = (2.0 * nf - 1.0) * (2.0 * nf - 1.0) - 8.0 * kf;
    let mut u = ((2.0 * nf - 1.0 - disc.max(0.0).sqrt()) / 2.0).floor() as u64 + 1;
    u = u.clamp(1, n - 1);
    while u > 1 && s(u) > k {
        u -= 1;
    }
    while u < n - 1 && s(u + 1) <= k {
        u += 1;
    }
    let v = u + 1 + (k - s(u));
    (u as u32, v as u32)
}

/// Draws the edge list of `G(n,p)`. Deterministic for a given seed.
pub fn sample_gnp(params: &GnpParams) -> Result<Vec<Edge>, GraphError> {
    let p = params.edge_probability()?;
    let n = params.n as u64;
    let total_pairs = n * (n - 1) / 2;
    let mut edges = Vec::new();
    if p == 0.0 || total_pairs == 0 {
        return Ok(edges);
    }
    let mut rng = rng_from_seed(params.seed);
    if p == 1.0 {
        for k in 0..total_pairs {
            edges.push(pair_from_index(n, k));
        }
        return Ok(edges);
    }
    // Geometric gaps: the next present pair is `gap` positions ahead, where
    // gap = 1 + floor(ln U / ln(1-p)), U uniform on (0,1].
    let log_q = (-p).ln_1p();
    let mut cursor: i128 = -1;
    loop {
        let u: f64 = 1.0 - rng.random::<f64>();
        let gap = 1 + (u.ln() / log_q).floor() as i128;
        cursor += gap.max(1);
        if cursor >= total_pairs as i128 {
            break;
        }
        edges.push(pair_from_index(n, cursor as u64));
    }
    Ok(edges)
}

/// A connected component with its original labels.
///
/// Local vertex indices follow increasing original label; the root is local
/// index 0, the first ordered vertex. Adjacency lists are sorted, so ordered
/// traversals visit neighbours in label order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub labels: Vec<u32>,
    pub adjacency: Vec<Vec<u32>>,
    pub edge_count: usize,
}

impl Component {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Root of the component: its first ordered (smallest-label) vertex.
    pub fn root(&self) -> u32 {
        0
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adjacency[v as usize].len()
    }

    pub fn local_index(&self, label: u32) -> Result<u32, GraphError> {
        self.labels
            .binary_search(&label)
            .map(|i| i as u32)
            .map_err(|_| GraphError::UnknownVertex(label))
    }

    /// Builds a component from edges over local indices `0..len`.
    pub fn from_local_edges(len: usize, labels: Vec<u32>, edges: &[(u32, u32)]) -> Self {
        let mut adjacency = vec![Vec::new(); len];
        for &(a, b) in edges {
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Component {
            labels,
            adjacency,
            edge_count: edges.len(),
        }
    }

    /// BFS distances (in edges) from `start` to every vertex, local indices.
    pub fn distances_from(&self, start: u32) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.len()];
        let mut queue = std::collections::VecDeque::new();
        dist[start as usize] = 0;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            let d = dist[v as usize];
            for &w in &self.adjacency[v as usize] {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = d + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Edges as sorted pairs of original labels.
    pub fn labeled_edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (a, list) in self.adjacency.iter().enumerate() {
            for &b in list {
                if (a as u32) < b {
                    out.push((self.labels[a], self.labels[b as usize]));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Shortest-path distance between two original labels.
pub fn graph_distance(component: &Component, u: u32, v: u32) -> Result<u32, GraphError> {
    let a = component.local_index(u)?;
    let b = component.local_index(v)?;
    if a == b {
        return Ok(0);
    }
    Ok(component.distances_from(a)[b as usize])
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let mut ra = self.find(a);
        let mut rb = self.find(b);
        if ra == rb {
            return;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
    }
}

/// Extracts the largest component; ties go to the smallest minimum label.
pub fn largest_component(edges: &[Edge], n: usize) -> Result<Component, GraphError> {
    if n == 0 {
        return Err(GraphError::EmptyGraph);
    }
    let mut uf = UnionFind::new(n);
    for &(a, b) in edges {
        uf.union(a - 1, b - 1);
    }
    // Scanning labels in ascending order, the first member of each class is
    // its minimum label; ties on size are broken by that minimum.
    let mut min_label = vec![u32::MAX; n];
    for v in 0..n as u32 {
        let r = uf.find(v);
        if min_label[r as usize] == u32::MAX {
            min_label[r as usize] = v;
        }
    }
    let mut target = 0u32;
    let mut best = (0u32, u32::MAX);
    for r in 0..n as u32 {
        if uf.find(r) == r {
            let key = (uf.size[r as usize], min_label[r as usize]);
            if key.0 > best.0 || (key.0 == best.0 && key.1 < best.1) {
                best = key;
                target = r;
            }
        }
    }
    let best_size = best.0;
    let mut labels = Vec::with_capacity(best_size as usize);
    let mut local = vec![u32::MAX; n];
    for v in 0..n as u32 {
        if uf.find(v) == target {
            local[v as usize] = labels.len() as u32;
            labels.push(v + 1);
        }
    }
    let mut local_edges = Vec::new();
    for &(a, b) in edges {
        let la = local[(a - 1) as usize];
        let lb = local[(b - 1) as usize];
        if la != u32::MAX && lb != u32::MAX {
            local_edges.push((la.min(lb), la.max(lb)));
        }
    }
    local_edges.sort_unstable();
    local_edges.dedup();
    Ok(Component::from_local_edges(
        best_size as usize,
        labels,
        &local_edges,
    ))
}

/// On-disk form of a sampled component: provenance plus labelled edges.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub n: usize,
    pub lambda: f64,
    pub seed: u64,
    pub vertices: Vec<u32>,
    pub edges: Vec<Edge>,
}

impl ComponentRecord {
    pub fn new(params: &GnpParams, component: &Component) -> Self {
        ComponentRecord {
            n: params.n,
            lambda: params.lambda,
            seed: params.seed,
            vertices: component.labels.clone(),
            edges: component.labeled_edges(),
        }
    }

    pub fn to_component(&self) -> Result<Component, GraphError> {
        let labels = self.vertices.clone();
        let index_of = |label: u32| -> Result<u32, GraphError> {
            labels
                .binary_search(&label)
                .map(|i| i as u32)
                .map_err(|_| GraphError::UnknownVertex(label))
        };
        let mut local_edges = Vec::with_capacity(self.edges.len());
        for &(a, b) in &self.edges {
            local_edges.push((index_of(a)?, index_of(b)?));
        }
        Ok(Component::from_local_edges(
            labels.len(),
            labels,
            &local_edges,
        ))
    }
}

/// Convenience wrapper: sample, then keep only the largest component.
pub fn sample_largest_component(params: &GnpParams) -> Result<Component, GraphError> {
    let edges = sample_gnp(params)?;
    largest_component(&edges, params.n)
}
