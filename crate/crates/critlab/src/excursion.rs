//! Continuum ingredients: parabolic-drift Brownian motion, reflected
//! excursions, the excursion-to-real-tree metric, and Poisson gluing.
//!
//! Everything lives on a uniform grid of mesh `dt`; excursion lengths and all
//! derived quantities carry the corresponding `±dt` resolution. Tilted
//! excursions are never reweighted explicitly: conditioned on its length, an
//! excursion of the reflected drifted motion already has the tilted law, so
//! slicing the reflected path is a rejection-free sampler.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::metric::{GluedMetricGraph, Segment};
use crate::rng::rng_from_seed;

/// Grid values below this are treated as zero when cutting excursions;
/// float noise otherwise fragments them.
pub const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum ExcursionError {
    #[error("dt and horizon must be positive")]
    BadGrid,
    #[error("argument {0} outside [0, sigma]")]
    OutOfDomain(f64),
    #[error("excursion has zero area")]
    ZeroArea,
    #[error("need k >= glue-point count + 1, got k = {k}, count = {glue_points}")]
    SkeletonTooSmall { k: usize, glue_points: usize },
    #[error("not enough leaf variates: need {need}, got {got}")]
    NotEnoughVariates { need: usize, got: usize },
}

/// Sampled nonnegative path on a uniform grid, zero at both ends and positive
/// strictly inside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcursionPath {
    pub dt: f64,
    pub values: Vec<f64>,
}

impl ExcursionPath {
    /// Length of the excursion: position of its final grid point.
    pub fn sigma(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.dt
    }

    /// Trapezoidal integral of the path.
    pub fn area(&self) -> f64 {
        let mut acc = 0.0;
        for w in self.values.windows(2) {
            acc += 0.5 * (w[0] + w[1]) * self.dt;
        }
        acc
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// Linear interpolation at `t`.
    pub fn eval(&self, t: f64) -> Result<f64, ExcursionError> {
        if t < 0.0 || t > self.sigma() + self.dt * 1e-9 {
            return Err(ExcursionError::OutOfDomain(t));
        }
        let pos = (t / self.dt).min((self.values.len() - 1) as f64);
        let i = pos.floor() as usize;
        if i + 1 >= self.values.len() {
            return Ok(self.values[self.values.len() - 1]);
        }
        let frac = pos - i as f64;
        Ok(self.values[i] * (1.0 - frac) + self.values[i + 1] * frac)
    }

    /// Infimum of the path over `[s, t]` (order-free), with interpolated
    /// endpoints.
    pub fn min_on(&self, s: f64, t: f64) -> Result<f64, ExcursionError> {
        let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
        let mut m = self.eval(lo)?.min(self.eval(hi)?);
        let first = (lo / self.dt).ceil() as usize;
        let last = ((hi / self.dt).floor() as usize).min(self.values.len() - 1);
        for i in first..=last.min(self.values.len() - 1) {
            if self.values[i] < m {
                m = self.values[i];
            }
        }
        Ok(m)
    }

    /// Pseudo-distance on `[0, sigma]` whose quotient is the real tree of the
    /// excursion: `f(s) + f(t) - 2 inf f on [s, t]`.
    pub fn tree_distance(&self, s: f64, t: f64) -> Result<f64, ExcursionError> {
        Ok(self.eval(s)? + self.eval(t)? - 2.0 * self.min_on(s, t)?)
    }

    /// Latest time `r <= t` with `f(r) <= x`: the point on the root path of
    /// the class of `t` at height `x`.
    pub fn ancestor_time(&self, t: f64, x: f64) -> Result<f64, ExcursionError> {
        let ft = self.eval(t)?;
        if x < 0.0 || x > ft + ZERO_TOL {
            return Err(ExcursionError::OutOfDomain(x));
        }
        let mut i = (t / self.dt).floor() as usize;
        i = i.min(self.values.len() - 1);
        // Interpolated value between grid i and t itself already >= x or not.
        if self.eval(t)? <= x {
            return Ok(t);
        }
        while self.values[i] > x {
            i -= 1; // values[0] = 0 <= x, so this terminates.
        }
        let lo = self.values[i];
        let hi = self.values[i + 1];
        if hi <= lo {
            return Ok(i as f64 * self.dt);
        }
        let frac = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
        Ok((i as f64 + frac) * self.dt)
    }
}

/// Euler scheme for Brownian motion with drift `lambda - t`.
///
/// Grid has `floor(horizon/dt) + 1` points starting at 0.
pub fn simulate_parabolic_bm(
    lambda: f64,
    horizon: f64,
    dt: f64,
    seed: u64,
) -> Result<Vec<f64>, ExcursionError> {
    if !(dt > 0.0) || !(horizon > 0.0) {
        return Err(ExcursionError::BadGrid);
    }
    let steps = (horizon / dt).floor() as usize;
    let sqrt_dt = dt.sqrt();
    let mut rng = rng_from_seed(seed);
    let mut path = Vec::with_capacity(steps + 1);
    let mut x = 0.0;
    path.push(x);
    for i in 0..steps {
        let t = i as f64 * dt;
        let noise: f64 = rng.sample(StandardNormal);
        x += sqrt_dt * noise + (lambda - t) * dt;
        path.push(x);
    }
    Ok(path)
}

/// The reflected path with its excursions in descending length order.
#[derive(Debug, Clone)]
pub struct ReflectedPathDecomposition {
    pub dt: f64,
    /// Path minus its running minimum.
    pub reflected: Vec<f64>,
    /// Excursion lengths, descending.
    pub lengths: Vec<f64>,
    /// Grid index ranges `[start, end]` (inclusive, both at height zero)
    /// matching `lengths`.
    pub slices: Vec<(usize, usize)>,
    /// The longest excursion runs into the right boundary of the horizon.
    pub truncated: bool,
}

impl ReflectedPathDecomposition {
    /// Excursion `rank` (0 = longest) shifted to start at zero.
    pub fn excursion(&self, rank: usize) -> Option<ExcursionPath> {
        let &(start, end) = self.slices.get(rank)?;
        let mut values: Vec<f64> = self.reflected[start..=end].to_vec();
        values[0] = 0.0;
        let last = values.len() - 1;
        if values[last] <= ZERO_TOL {
            values[last] = 0.0;
        }
        Some(ExcursionPath { dt: self.dt, values })
    }

    pub fn longest(&self) -> Option<ExcursionPath> {
        self.excursion(0)
    }
}

/// Subtracts the running minimum and cuts the zero set.
pub fn reflect_and_decompose(path: &[f64], dt: f64) -> ReflectedPathDecomposition {
    let mut reflected = Vec::with_capacity(path.len());
    let mut run_min = f64::INFINITY;
    for &x in path {
        run_min = run_min.min(x);
        reflected.push(x - run_min);
    }
    let mut raw: Vec<(usize, usize)> = Vec::new();
    let mut start: Option<usize> = None;
    for (i, &v) in reflected.iter().enumerate() {
        if v > ZERO_TOL {
            if start.is_none() {
                start = Some(i.saturating_sub(1));
            }
        } else if let Some(s) = start.take() {
            raw.push((s, i));
        }
    }
    let mut truncated_slice = None;
    if let Some(s) = start {
        // Positive run hits the end of the horizon.
        truncated_slice = Some((s, reflected.len() - 1));
        raw.push((s, reflected.len() - 1));
    }
    raw.sort_by(|a, b| {
        let la = a.1 - a.0;
        let lb = b.1 - b.0;
        lb.cmp(&la).then(a.0.cmp(&b.0))
    });
    let lengths: Vec<f64> = raw.iter().map(|&(s, e)| (e - s) as f64 * dt).collect();
    let truncated = !raw.is_empty() && Some(raw[0]) == truncated_slice;
    ReflectedPathDecomposition {
        dt,
        reflected,
        lengths,
        slices: raw,
        truncated,
    }
}

/// Glue points of a Poisson rain under the graph of the excursion.
///
/// Heights are in the excursion's own units, before the factor-2 metric
/// scaling of the glued space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluePointList {
    pub pairs: Vec<(f64, f64)>,
}

impl GluePointList {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Unit-rate Poisson points under the excursion: draw a Poisson(area) count,
/// then place points by rejection from the bounding box.
pub fn poisson_glue(f: &ExcursionPath, seed: u64) -> Result<GluePointList, ExcursionError> {
    let area = f.area();
    if area <= 0.0 {
        return Err(ExcursionError::ZeroArea);
    }
    let mut rng = rng_from_seed(seed);
    let count = Poisson::new(area)
        .expect("area is positive")
        .sample(&mut rng) as usize;
    let sigma = f.sigma();
    let top = f.max_value();
    let mut pairs = Vec::with_capacity(count);
    while pairs.len() < count {
        let t = rng.random::<f64>() * sigma;
        let x = rng.random::<f64>() * top;
        if x > 0.0 && x <= f.eval(t)? {
            pairs.push((t, x));
        }
    }
    pairs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(GluePointList { pairs })
}

/// Expected number of glue points given the excursion: its area.
pub fn expected_glue_count(f: &ExcursionPath) -> f64 {
    f.area()
}

/// Finite skeleton of the real tree of an excursion, with glue pairs.
#[derive(Debug, Clone)]
pub struct ExcursionSkeleton {
    /// Segment lengths carry the doubled metric of the glued space.
    pub graph: GluedMetricGraph,
    /// Node of the leaf `u_i` for each glue point, then for each extra leaf.
    pub leaf_nodes: Vec<u32>,
    /// Node of `v_i` (root-path point at the glue height) per glue point.
    pub glue_base_nodes: Vec<u32>,
    /// Leaf times in `[0, sigma]`, aligned with `leaf_nodes`.
    pub leaf_times: Vec<f64>,
    /// The uniform variates that selected the non-glue leaves.
    pub xi: Vec<f64>,
    /// Mass projected from Lebesgue measure on `[0, sigma]` onto each node.
    pub node_mass: Vec<f64>,
}

struct SkeletonNode {
    parent: Option<u32>,
    /// Height above the root in excursion units.
    height: f64,
}

fn split_root_path(
    nodes: &mut Vec<SkeletonNode>,
    mut at: u32,
    height: f64,
) -> u32 {
    // Walk up from `at` until the edge spanning `height` is found, splitting
    // it with a degree-2 node (or reusing a node at that height).
    loop {
        let h = nodes[at as usize].height;
        if (h - height).abs() <= 1e-12 {
            return at;
        }
        let parent = nodes[at as usize]
            .parent
            .expect("height below the root cannot be requested");
        let ph = nodes[parent as usize].height;
        if ph < height && height < h {
            let mid = nodes.len() as u32;
            nodes.push(SkeletonNode {
                parent: Some(parent),
                height,
            });
            nodes[at as usize].parent = Some(mid);
            return mid;
        }
        if (ph - height).abs() <= 1e-12 {
            return parent;
        }
        at = parent;
    }
}

/// Builds the subtree spanned by the root, the glue-point leaves and `k - J`
/// further leaves at times `sigma * xi_i`, then records the glue pairs.
///
/// Segment lengths are doubled height differences, matching the glued-space
/// metric convention.
pub fn skeleton_from_excursion(
    f: &ExcursionPath,
    glue: &GluePointList,
    xi: &[f64],
    k: usize,
) -> Result<ExcursionSkeleton, ExcursionError> {
    let glue_count = glue.len();
    if k < glue_count + 1 {
        return Err(ExcursionError::SkeletonTooSmall {
            k,
            glue_points: glue_count,
        });
    }
    let extra = k - glue_count;
    if xi.len() < extra {
        return Err(ExcursionError::NotEnoughVariates {
            need: extra,
            got: xi.len(),
        });
    }
    let sigma = f.sigma();
    // Leaf times: glue bases first (their order defines glue indices), then
    // the xi-selected ones.
    let mut leaves: Vec<(f64, usize)> = Vec::with_capacity(k);
    for (i, &(t, _)) in glue.pairs.iter().enumerate() {
        leaves.push((t, i));
    }
    for (j, &x) in xi.iter().take(extra).enumerate() {
        leaves.push((x * sigma, glue_count + j));
    }
    let mut by_time = leaves.clone();
    by_time.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let mut nodes = vec![SkeletonNode {
        parent: None,
        height: 0.0,
    }];
    let mut leaf_nodes = vec![u32::MAX; k];
    let mut leaf_times = vec![0.0; k];
    // Right spine of the growing tree: node ids with increasing heights.
    let mut spine: Vec<u32> = vec![0];
    let mut prev_time = 0.0;
    for &(t, slot) in &by_time {
        let branch_height = f.min_on(prev_time, t)?;
        // Pop spine entries strictly above the branch height.
        while nodes[*spine.last().unwrap() as usize].height > branch_height + 1e-12 {
            spine.pop();
        }
        let anchor = *spine.last().unwrap();
        let branch = if (nodes[anchor as usize].height - branch_height).abs() <= 1e-12 {
            anchor
        } else {
            // The previous leaf hangs over the new branch height; splice a
            // node into the edge from `anchor` to its popped child.
            let child = nodes
                .iter()
                .enumerate()
                .rev()
                .find(|(_, n)| n.parent == Some(anchor) && n.height > branch_height)
                .map(|(i, _)| i as u32);
            let mid = nodes.len() as u32;
            nodes.push(SkeletonNode {
                parent: Some(anchor),
                height: branch_height,
            });
            if let Some(c) = child {
                nodes[c as usize].parent = Some(mid);
            }
            spine.push(mid);
            mid
        };
        let leaf_height = f.eval(t)?;
        let leaf = if leaf_height - branch_height <= 1e-12 {
            branch
        } else {
            let id = nodes.len() as u32;
            nodes.push(SkeletonNode {
                parent: Some(branch),
                height: leaf_height,
            });
            spine.push(id);
            id
        };
        leaf_nodes[slot] = leaf;
        leaf_times[slot] = t;
        prev_time = t;
    }

    // Glue bases: the root-path point of leaf i at the glue height.
    let mut glue_base_nodes = Vec::with_capacity(glue_count);
    for (i, &(_, x)) in glue.pairs.iter().enumerate() {
        glue_base_nodes.push(split_root_path(&mut nodes, leaf_nodes[i], x));
    }

    // Project Lebesgue measure on the grid onto the skeleton: each grid cell
    // maps to the root-path point of its nearest spanned leaf at the meet
    // height, bucketed to the closer endpoint node of the covering edge.
    let mut node_mass = vec![0.0; nodes.len()];
    let grid = f.values.len();
    let mut meet_height = vec![f64::NEG_INFINITY; grid];
    let mut meet_leaf = vec![0usize; grid];
    for (pos, &(t, _)) in leaves.iter().enumerate() {
        let leaf_idx = ((t / f.dt).round() as usize).min(grid - 1);
        let mut running = f64::INFINITY;
        for g in (0..=leaf_idx).rev() {
            running = running.min(f.values[g]);
            if running > meet_height[g] {
                meet_height[g] = running;
                meet_leaf[g] = pos;
            }
        }
        running = f64::INFINITY;
        for g in leaf_idx..grid {
            running = running.min(f.values[g]);
            if running > meet_height[g] {
                meet_height[g] = running;
                meet_leaf[g] = pos;
            }
        }
    }
    for g in 0..grid {
        let h = meet_height[g].max(0.0);
        let slot = leaves[meet_leaf[g]].1;
        // Locate the covering edge on the leaf's root path and take the
        // closer endpoint.
        let mut at = leaf_nodes[slot];
        let node = loop {
            let nh = nodes[at as usize].height;
            if nh <= h + 1e-12 {
                break at;
            }
            match nodes[at as usize].parent {
                Some(p) => {
                    let ph = nodes[p as usize].height;
                    if ph <= h {
                        break if h - ph < nh - h { p } else { at };
                    }
                    at = p;
                }
                None => break at,
            }
        };
        node_mass[node as usize] += f.dt;
    }

    let segments: Vec<Segment> = nodes
        .iter()
        .enumerate()
        .filter_map(|(i, n)| {
            n.parent.map(|p| Segment {
                a: p,
                b: i as u32,
                length: 2.0 * (n.height - nodes[p as usize].height).max(1e-12),
            })
        })
        .collect();
    let glue_pairs: Vec<(u32, u32)> = (0..glue_count)
        .map(|i| (leaf_nodes[i], glue_base_nodes[i]))
        .collect();
    let graph = GluedMetricGraph::new(nodes.len(), segments, glue_pairs, 0);
    Ok(ExcursionSkeleton {
        graph,
        leaf_nodes,
        glue_base_nodes,
        leaf_times,
        xi: xi[..extra].to_vec(),
        node_mass,
    })
}
