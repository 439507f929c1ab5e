//! Effective resistance on finite electrical networks.
//!
//! Networks are node sets with positive edge resistances; parallel edges are
//! combined by conductance addition at load time and loops are dropped. Two
//! solver paths sit behind one interface: a dense Cholesky factorisation of
//! the grounded Laplacian for small networks (factor once, answer many
//! pairs), and Jacobi-preconditioned conjugate gradients for large ones. All
//! solves target a 1e-10 relative residual, which every inequality check in
//! the crate inherits.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{GluedMetricGraph, MeshedSpace, MetricError};

/// Relative residual required of linear solves.
pub const SOLVE_TOL: f64 = 1e-10;

/// Node count up to which the dense factorisation is used.
const DENSE_LIMIT: usize = 1200;

#[derive(Debug, Error)]
pub enum ResistanceError {
    #[error("nodes {0} and {1} are not connected")]
    Disconnected(u32, u32),
    #[error("node {0} out of range")]
    NodeOutOfRange(u32),
    #[error("identical nodes requested")]
    CoincidentNodes,
    #[error("target set is empty or contains the source")]
    BadTargetSet,
    #[error("trace subset must contain at least two nodes")]
    TraceTooSmall,
    #[error("edge resistance must be positive, got {0}")]
    BadResistance(f64),
    #[error("linear solve stalled above tolerance (residual {0:.3e})")]
    SolveFailed(f64),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Electrical network with combined conductances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub node_count: usize,
    /// Edges `(a, b, resistance)` with `a < b`, at most one per pair.
    pub edges: Vec<(u32, u32, f64)>,
}

impl Network {
    /// Builds a network from raw edges: parallel edges combine by adding
    /// conductances, loops carry no current and are dropped.
    pub fn from_edges(
        node_count: usize,
        raw: &[(u32, u32, f64)],
    ) -> Result<Network, ResistanceError> {
        let mut conductance: std::collections::HashMap<(u32, u32), f64> =
            std::collections::HashMap::new();
        for &(a, b, r) in raw {
            if !(r > 0.0) || !r.is_finite() {
                return Err(ResistanceError::BadResistance(r));
            }
            if a as usize >= node_count {
                return Err(ResistanceError::NodeOutOfRange(a));
            }
            if b as usize >= node_count {
                return Err(ResistanceError::NodeOutOfRange(b));
            }
            if a == b {
                continue;
            }
            *conductance.entry((a.min(b), a.max(b))).or_insert(0.0) += 1.0 / r;
        }
        let mut edges: Vec<(u32, u32, f64)> = conductance
            .into_iter()
            .map(|((a, b), c)| (a, b, 1.0 / c))
            .collect();
        edges.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        Ok(Network { node_count, edges })
    }

    /// Unit-resistance network of a graph given by its adjacency.
    pub fn from_unit_graph(adjacency: &[Vec<u32>]) -> Network {
        let mut edges = Vec::new();
        for (a, list) in adjacency.iter().enumerate() {
            for &b in list {
                if (a as u32) < b {
                    edges.push((a as u32, b, 1.0));
                }
            }
        }
        Network {
            node_count: adjacency.len(),
            edges,
        }
    }

    /// Fused mesh of a glued space as a network: resistance = mesh length.
    pub fn from_mesh(mesh: &MeshedSpace) -> Result<Network, ResistanceError> {
        Network::from_edges(mesh.node_count, &mesh.edges)
    }

    pub fn degree(&self, v: u32) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b, _)| a == v || b == v)
            .count()
    }

    /// Weighted shortest-path distance with edge weights the resistances.
    pub fn shortest_path_distances(&self, start: u32) -> Vec<f64> {
        let mut adj = vec![Vec::new(); self.node_count];
        for &(a, b, r) in &self.edges {
            adj[a as usize].push((b, r));
            adj[b as usize].push((a, r));
        }
        let mut dist = vec![f64::INFINITY; self.node_count];
        let mut heap = std::collections::BinaryHeap::new();
        #[derive(PartialEq)]
        struct E(f64, u32);
        impl Eq for E {}
        impl Ord for E {
            fn cmp(&self, o: &Self) -> std::cmp::Ordering {
                o.0.partial_cmp(&self.0).unwrap_or(std::cmp::Ordering::Equal)
            }
        }
        impl PartialOrd for E {
            fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
                Some(self.cmp(o))
            }
        }
        dist[start as usize] = 0.0;
        heap.push(E(0.0, start));
        while let Some(E(d, v)) = heap.pop() {
            if d > dist[v as usize] {
                continue;
            }
            for &(w, r) in &adj[v as usize] {
                let nd = d + r;
                if nd < dist[w as usize] {
                    dist[w as usize] = nd;
                    heap.push(E(nd, w));
                }
            }
        }
        dist
    }

    /// Collapses the node set `targets` into a single node (the returned id).
    pub fn collapse(&self, targets: &[u32]) -> Result<(Network, u32, Vec<u32>), ResistanceError> {
        if targets.is_empty() {
            return Err(ResistanceError::BadTargetSet);
        }
        let mut keep: Vec<u32> = vec![u32::MAX; self.node_count];
        let in_set: std::collections::HashSet<u32> = targets.iter().cloned().collect();
        let mut next = 0u32;
        for v in 0..self.node_count as u32 {
            if !in_set.contains(&v) {
                keep[v as usize] = next;
                next += 1;
            }
        }
        let merged = next;
        for v in 0..self.node_count as u32 {
            if in_set.contains(&v) {
                keep[v as usize] = merged;
            }
        }
        let raw: Vec<(u32, u32, f64)> = self
            .edges
            .iter()
            .map(|&(a, b, r)| (keep[a as usize], keep[b as usize], r))
            .collect();
        let network = Network::from_edges(merged as usize + 1, &raw)?;
        Ok((network, merged, keep))
    }
}

enum Factorization {
    /// Lower-triangular Cholesky factor of the Laplacian with `ground`
    /// removed; row-major over the `node_count - 1` retained nodes.
    Dense {
        factor: Vec<f64>,
        map: Vec<usize>,
        ground: u32,
    },
    /// Conjugate gradients against the grounded Laplacian.
    Iterative { ground: u32 },
}

/// Factored network ready to answer resistance queries.
pub struct ResistanceSolver {
    network: Network,
    adjacency: Vec<Vec<(u32, f64)>>, // conductances
    diag: Vec<f64>,
    factorization: Factorization,
}

impl ResistanceSolver {
    pub fn new(network: &Network) -> Result<Self, ResistanceError> {
        let n = network.node_count;
        let mut adjacency = vec![Vec::new(); n];
        let mut diag = vec![0.0; n];
        for &(a, b, r) in &network.edges {
            let c = 1.0 / r;
            adjacency[a as usize].push((b, c));
            adjacency[b as usize].push((a, c));
            diag[a as usize] += c;
            diag[b as usize] += c;
        }
        let ground = 0u32;
        let factorization = if n <= DENSE_LIMIT {
            let map: Vec<usize> = (0..n).filter(|&v| v != ground as usize).collect();
            let m = map.len();
            let mut a = vec![0.0; m * m];
            for (i, &v) in map.iter().enumerate() {
                a[i * m + i] = diag[v];
                for &(w, c) in &adjacency[v] {
                    if w as usize != ground as usize {
                        let j = if (w as usize) > ground as usize {
                            w as usize - 1
                        } else {
                            w as usize
                        };
                        a[i * m + j] -= c;
                    }
                }
            }
            // In-place Cholesky; fails only if the network is disconnected,
            // which queries will report per-pair instead.
            for k in 0..m {
                let mut d = a[k * m + k];
                for p in 0..k {
                    d -= a[k * m + p] * a[k * m + p];
                }
                if d <= 0.0 {
                    // Disconnected piece: mark by a zero pivot; solves will
                    // detect infinite resistance via reachability first.
                    d = f64::MIN_POSITIVE;
                }
                let d = d.sqrt();
                a[k * m + k] = d;
                for i in (k + 1)..m {
                    let mut s = a[i * m + k];
                    for p in 0..k {
                        s -= a[i * m + p] * a[k * m + p];
                    }
                    a[i * m + k] = s / d;
                }
                for i in 0..k {
                    a[i * m + k] = 0.0;
                }
            }
            Factorization::Dense {
                factor: a,
                map,
                ground,
            }
        } else {
            Factorization::Iterative { ground }
        };
        Ok(ResistanceSolver {
            network: network.clone(),
            adjacency,
            diag,
            factorization,
        })
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    fn check_node(&self, v: u32) -> Result<(), ResistanceError> {
        if (v as usize) < self.network.node_count {
            Ok(())
        } else {
            Err(ResistanceError::NodeOutOfRange(v))
        }
    }

    fn connected(&self, a: u32, b: u32) -> bool {
        let mut seen = vec![false; self.network.node_count];
        let mut queue = std::collections::VecDeque::new();
        seen[a as usize] = true;
        queue.push_back(a);
        while let Some(v) = queue.pop_front() {
            if v == b {
                return true;
            }
            for &(w, _) in &self.adjacency[v as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    queue.push_back(w);
                }
            }
        }
        false
    }

    /// Potentials with unit current injected at `a` and extracted at `b`,
    /// grounded at the factorization's ground node.
    fn solve_pair(&self, a: u32, b: u32) -> Result<Vec<f64>, ResistanceError> {
        let n = self.network.node_count;
        let mut rhs = vec![0.0; n];
        rhs[a as usize] += 1.0;
        rhs[b as usize] -= 1.0;
        match &self.factorization {
            Factorization::Dense { factor, map, ground } => {
                let m = map.len();
                let mut y = vec![0.0; m];
                for (i, &v) in map.iter().enumerate() {
                    y[i] = rhs[v];
                }
                // forward then backward substitution
                for i in 0..m {
                    let mut s = y[i];
                    for p in 0..i {
                        s -= factor[i * m + p] * y[p];
                    }
                    y[i] = s / factor[i * m + i];
                }
                for i in (0..m).rev() {
                    let mut s = y[i];
                    for p in (i + 1)..m {
                        s -= factor[p * m + i] * y[p];
                    }
                    y[i] = s / factor[i * m + i];
                }
                let mut x = vec![0.0; n];
                for (i, &v) in map.iter().enumerate() {
                    x[v] = y[i];
                }
                x[*ground as usize] = 0.0;
                Ok(x)
            }
            Factorization::Iterative { ground } => {
                let g = *ground as usize;
                let apply = |x: &[f64], out: &mut [f64]| {
                    for v in 0..n {
                        if v == g {
                            out[v] = 0.0;
                            continue;
                        }
                        let mut s = self.diag[v] * x[v];
                        for &(w, c) in &self.adjacency[v] {
                            if w as usize != g {
                                s -= c * x[w as usize];
                            }
                        }
                        out[v] = s;
                    }
                };
                let mut x = vec![0.0; n];
                let mut r = rhs.clone();
                r[g] = 0.0;
                let norm_b = r.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm_b == 0.0 {
                    return Ok(x);
                }
                // Jacobi preconditioner.
                let mut z: Vec<f64> = (0..n)
                    .map(|v| if v == g { 0.0 } else { r[v] / self.diag[v] })
                    .collect();
                let mut p = z.clone();
                let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
                let mut ap = vec![0.0; n];
                let max_iter = 40 * n + 200;
                let mut residual = norm_b;
                for _ in 0..max_iter {
                    apply(&p, &mut ap);
                    let p_ap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
                    if p_ap <= 0.0 {
                        break;
                    }
                    let alpha = rz / p_ap;
                    for v in 0..n {
                        x[v] += alpha * p[v];
                        r[v] -= alpha * ap[v];
                    }
                    residual = r.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if residual <= SOLVE_TOL * norm_b {
                        return Ok(x);
                    }
                    for v in 0..n {
                        z[v] = if v == g { 0.0 } else { r[v] / self.diag[v] };
                    }
                    let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
                    let beta = rz_new / rz;
                    rz = rz_new;
                    for v in 0..n {
                        p[v] = z[v] + beta * p[v];
                    }
                }
                Err(ResistanceError::SolveFailed(residual / norm_b))
            }
        }
    }

    /// Two-point effective resistance.
    pub fn pair_resistance(&self, a: u32, b: u32) -> Result<f64, ResistanceError> {
        self.check_node(a)?;
        self.check_node(b)?;
        if a == b {
            return Err(ResistanceError::CoincidentNodes);
        }
        if !self.connected(a, b) {
            return Err(ResistanceError::Disconnected(a, b));
        }
        let x = self.solve_pair(a, b)?;
        Ok(x[a as usize] - x[b as usize])
    }
}

/// Effective resistance between two nodes of a network.
pub fn effective_resistance(network: &Network, a: u32, b: u32) -> Result<f64, ResistanceError> {
    ResistanceSolver::new(network)?.pair_resistance(a, b)
}

/// Effective resistance from `a` to a node set `targets`, by collapsing the
/// set to a single node.
pub fn effective_resistance_to_set(
    network: &Network,
    a: u32,
    targets: &[u32],
) -> Result<f64, ResistanceError> {
    if targets.is_empty() || targets.contains(&a) {
        return Err(ResistanceError::BadTargetSet);
    }
    let (collapsed, merged, keep) = network.collapse(targets)?;
    effective_resistance(&collapsed, keep[a as usize], merged)
}

/// Schur complement of the Laplacian onto `subset`, returned as an
/// equivalent network on `subset.len()` nodes (in the order given).
///
/// Preserves all pairwise effective resistances within the subset.
pub fn trace_network(network: &Network, subset: &[u32]) -> Result<Network, ResistanceError> {
    if subset.len() < 2 {
        return Err(ResistanceError::TraceTooSmall);
    }
    for &v in subset {
        if v as usize >= network.node_count {
            return Err(ResistanceError::NodeOutOfRange(v));
        }
    }
    let n = network.node_count;
    let in_subset: std::collections::HashSet<u32> = subset.iter().cloned().collect();
    let interior: Vec<u32> = (0..n as u32).filter(|v| !in_subset.contains(v)).collect();
    if interior.is_empty() {
        return Ok(network.clone());
    }
    let mut adjacency = vec![Vec::new(); n];
    let mut diag = vec![0.0; n];
    for &(a, b, r) in &network.edges {
        let c = 1.0 / r;
        adjacency[a as usize].push((b, c));
        adjacency[b as usize].push((a, c));
        diag[a as usize] += c;
        diag[b as usize] += c;
    }
    // Dense Cholesky of the interior block (interior components of a
    // connected positive network are nonsingular).
    let m = interior.len();
    let mut index_of = vec![usize::MAX; n];
    for (i, &v) in interior.iter().enumerate() {
        index_of[v as usize] = i;
    }
    let mut block = vec![0.0; m * m];
    for (i, &v) in interior.iter().enumerate() {
        block[i * m + i] = diag[v as usize];
        for &(w, c) in &adjacency[v as usize] {
            let j = index_of[w as usize];
            if j != usize::MAX {
                block[i * m + j] -= c;
            }
        }
    }
    for k in 0..m {
        let mut d = block[k * m + k];
        for p in 0..k {
            d -= block[k * m + p] * block[k * m + p];
        }
        if d <= 0.0 {
            return Err(ResistanceError::SolveFailed(d));
        }
        let d = d.sqrt();
        block[k * m + k] = d;
        for i in (k + 1)..m {
            let mut s = block[i * m + k];
            for p in 0..k {
                s -= block[i * m + p] * block[k * m + p];
            }
            block[i * m + k] = s / d;
        }
    }
    let solve = |rhs: &mut Vec<f64>| {
        for i in 0..m {
            let mut s = rhs[i];
            for p in 0..i {
                s -= block[i * m + p] * rhs[p];
            }
            rhs[i] = s / block[i * m + i];
        }
        for i in (0..m).rev() {
            let mut s = rhs[i];
            for p in (i + 1)..m {
                s -= block[p * m + i] * rhs[p];
            }
            rhs[i] = s / block[i * m + i];
        }
    };
    // Schur complement column by column over the subset.
    let s_count = subset.len();
    let mut schur = vec![0.0; s_count * s_count];
    for (cj, &v) in subset.iter().enumerate() {
        // L_IV column for v.
        let mut col = vec![0.0; m];
        for &(w, c) in &adjacency[v as usize] {
            let j = index_of[w as usize];
            if j != usize::MAX {
                col[j] = -c;
            }
        }
        let mut y = col.clone();
        solve(&mut y);
        for (ci, &u) in subset.iter().enumerate() {
            // L_VV entry minus L_VI * y.
            let mut val = if u == v {
                diag[u as usize]
            } else {
                -adjacency[u as usize]
                    .iter()
                    .filter(|&&(w, _)| w == v)
                    .map(|&(_, c)| c)
                    .sum::<f64>()
            };
            for &(w, c) in &adjacency[u as usize] {
                let j = index_of[w as usize];
                if j != usize::MAX {
                    val -= (-c) * y[j];
                }
            }
            schur[ci * s_count + cj] = val;
        }
    }
    let mut edges = Vec::new();
    let scale = schur
        .iter()
        .map(|v| v.abs())
        .fold(0.0f64, f64::max)
        .max(1.0);
    for i in 0..s_count {
        for j in (i + 1)..s_count {
            let c = -schur[i * s_count + j];
            if c > 1e-12 * scale {
                edges.push((i as u32, j as u32, 1.0 / c));
            }
        }
    }
    Network::from_edges(s_count, &edges)
}

/// One row of an inequality report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairCheck {
    pub a: u32,
    pub b: u32,
    pub distance: f64,
    pub resistance: f64,
    pub lower_bound: f64,
    pub pass: bool,
}

/// Outcome of a resistance-inequality sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InequalityReport {
    pub checks: Vec<PairCheck>,
    pub violations: usize,
}

impl InequalityReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// CSV rows `a,b,distance,resistance,lower_bound,pass`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("a,b,distance,resistance,lower_bound,pass\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                c.a, c.b, c.distance, c.resistance, c.lower_bound, c.pass
            ));
        }
        out
    }
}

fn factorial_f64(k: usize) -> f64 {
    if k > 170 {
        return f64::INFINITY;
    }
    (1..=k).map(|i| i as f64).product::<f64>().max(1.0)
}

/// Checks `d/(#edges)! <= R <= d` for all node pairs of the network.
pub fn verify_resistance_lower_bound(
    network: &Network,
) -> Result<InequalityReport, ResistanceError> {
    let solver = ResistanceSolver::new(network)?;
    let denom = factorial_f64(network.edges.len());
    let mut checks = Vec::new();
    let mut violations = 0;
    for a in 0..network.node_count as u32 {
        let dist = network.shortest_path_distances(a);
        for b in (a + 1)..network.node_count as u32 {
            if !dist[b as usize].is_finite() {
                continue;
            }
            let r = solver.pair_resistance(a, b)?;
            let d = dist[b as usize];
            let lower = d / denom;
            // Slack of a few solver tolerances on both ends.
            let pass = r >= lower - 1e-9 * d.max(1.0) && r <= d + 1e-9 * d.max(1.0);
            if !pass {
                violations += 1;
            }
            checks.push(PairCheck {
                a,
                b,
                distance: d,
                resistance: r,
                lower_bound: lower,
                pass,
            });
        }
    }
    Ok(InequalityReport { checks, violations })
}

/// Checks the glued-space comparison `d/(4J+1)! <= R <= d` on a mesh of the
/// space, for `pair_count` sampled node pairs.
pub fn verify_glued_comparison(
    space: &GluedMetricGraph,
    mesh_step: f64,
    pair_count: usize,
    seed: u64,
) -> Result<InequalityReport, ResistanceError> {
    use rand::Rng;
    let meshed = crate::metric::mesh(space, mesh_step)?;
    let network = Network::from_mesh(&meshed)?;
    let solver = ResistanceSolver::new(&network)?;
    let glue_count = space.glue_pairs.len();
    let denom = factorial_f64(4 * glue_count + 1);
    let mut rng = crate::rng::rng_from_seed(seed);
    let mut checks = Vec::new();
    let mut violations = 0;
    let dist_cache: std::collections::HashMap<u32, Vec<f64>> = std::collections::HashMap::new();
    let mut dist_cache = dist_cache;
    for _ in 0..pair_count {
        let a = rng.random_range(0..network.node_count as u32);
        let b = rng.random_range(0..network.node_count as u32);
        if a == b {
            continue;
        }
        let d = {
            let entry = dist_cache
                .entry(a)
                .or_insert_with(|| network.shortest_path_distances(a));
            entry[b as usize]
        };
        let r = solver.pair_resistance(a, b)?;
        let lower = d / denom;
        let pass = r >= lower - 1e-8 * d.max(1.0) && r <= d + 1e-8 * d.max(1.0);
        if !pass {
            violations += 1;
        }
        checks.push(PairCheck {
            a,
            b,
            distance: d,
            resistance: r,
            lower_bound: lower,
            pass,
        });
    }
    Ok(InequalityReport { checks, violations })
}

/// Closed-form resistance on a circle of perimeter `r` between points at arc
/// distance `d`: the two arcs in parallel.
pub fn circle_resistance(r: f64, d: f64) -> Result<f64, ResistanceError> {
    if !(d > 0.0) || d >= r {
        return Err(ResistanceError::CoincidentNodes);
    }
    Ok(1.0 / (1.0 / d + 1.0 / (r - d)))
}
