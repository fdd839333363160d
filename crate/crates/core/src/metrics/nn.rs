//! Nearest-neighbor assignment under the composite ray distance.
//!
//! The composite distance is a weighted sum of two absolute differences and
//! two half squared chords between unit vectors. Every term is monotone in
//! its coordinate gaps, so the distance evaluated on the gaps between a query
//! and an axis-aligned box is a lower bound of the distance to anything inside
//! it, with the same floating-point expression. The kd-tree below prunes only
//! when that bound is strictly greater than the best distance found so far,
//! which keeps exact ties reachable and reproduces the exhaustive scan,
//! including the lowest-index tie-break.

use crate::model::{FeatureDistances, MetricConfig, Weights};

use super::distance::{cosine_from_gaps, feature_distances};
use super::{MetricError, StandardizedTuple};

const DIMS: usize = 8;
const LEAF_SIZE: usize = 8;

/// Targets at or above this size are searched with the kd-tree under
/// [`NnStrategy::Auto`].
pub const KD_TREE_MIN_TARGETS: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    XToY,
    YToX,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssignedPair {
    pub source: usize,
    pub target: usize,
    pub components: FeatureDistances,
    /// Assignment distance: the weighted composite in joint mode, the
    /// selected component in single-feature modes.
    pub d_r: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NnAssignment {
    pub direction: Direction,
    pub pairs: Vec<AssignedPair>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NnStrategy {
    Exhaustive,
    KdTree,
    #[default]
    Auto,
}

/// Maps every source tuple to its nearest target.
pub fn nearest_neighbor_assign(
    source: &[StandardizedTuple],
    target: &[StandardizedTuple],
    cfg: &MetricConfig,
    direction: Direction,
) -> Result<NnAssignment, MetricError> {
    nearest_neighbor_assign_with(source, target, cfg, direction, NnStrategy::Auto)
}

pub fn nearest_neighbor_assign_with(
    source: &[StandardizedTuple],
    target: &[StandardizedTuple],
    cfg: &MetricConfig,
    direction: Direction,
    strategy: NnStrategy,
) -> Result<NnAssignment, MetricError> {
    if target.is_empty() {
        return Err(MetricError::EmptyTarget);
    }
    let weights = cfg.assignment_weights();
    let use_tree = match strategy {
        NnStrategy::Exhaustive => false,
        NnStrategy::KdTree => true,
        NnStrategy::Auto => target.len() >= KD_TREE_MIN_TARGETS,
    };
    let pairs = if use_tree {
        let tree = KdTree::build(target, weights);
        source
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let (j, d_r) = tree.nearest(v);
                AssignedPair {
                    source: i,
                    target: j,
                    components: feature_distances(v, &target[j]),
                    d_r,
                }
            })
            .collect()
    } else {
        source
            .iter()
            .enumerate()
            .map(|(i, v)| scan(i, v, target, &weights))
            .collect()
    };
    Ok(NnAssignment { direction, pairs })
}

fn scan(i: usize, v: &StandardizedTuple, target: &[StandardizedTuple], w: &Weights) -> AssignedPair {
    let mut best = AssignedPair {
        source: i,
        target: 0,
        components: feature_distances(v, &target[0]),
        d_r: 0.0,
    };
    best.d_r = w.dot(&best.components);
    for (j, t) in target.iter().enumerate().skip(1) {
        let fd = feature_distances(v, t);
        let d = w.dot(&fd);
        if d < best.d_r {
            best = AssignedPair {
                source: i,
                target: j,
                components: fd,
                d_r: d,
            };
        }
    }
    best
}

#[inline]
fn coords(t: &StandardizedTuple) -> [f64; DIMS] {
    [
        t.tau_bar,
        t.p_bar,
        t.dod_unit[0],
        t.dod_unit[1],
        t.dod_unit[2],
        t.doa_unit[0],
        t.doa_unit[1],
        t.doa_unit[2],
    ]
}

/// Composite distance from per-coordinate gaps. Matches
/// `weights.dot(feature_distances(..))` exactly when the gaps are the
/// coordinate differences.
#[inline]
fn distance_from_gaps(g: &[f64; DIMS], w: &Weights) -> f64 {
    let fd = FeatureDistances {
        d_tau: g[0].abs(),
        d_p: g[1].abs(),
        d_dod: cosine_from_gaps(g[2], g[3], g[4]),
        d_doa: cosine_from_gaps(g[5], g[6], g[7]),
    };
    w.dot(&fd)
}

#[derive(Debug, Clone)]
struct Node {
    lo: [f64; DIMS],
    hi: [f64; DIMS],
    kind: NodeKind,
}

#[derive(Debug, Clone)]
enum NodeKind {
    Leaf { start: usize, end: usize },
    Split { left: usize, right: usize },
}

/// Static kd-tree over standardized tuples with bounding-box pruning.
#[derive(Debug, Clone)]
pub struct KdTree<'a> {
    targets: &'a [StandardizedTuple],
    points: Vec<[f64; DIMS]>,
    order: Vec<usize>,
    nodes: Vec<Node>,
    weights: Weights,
}

impl<'a> KdTree<'a> {
    pub fn build(targets: &'a [StandardizedTuple], weights: Weights) -> Self {
        let points: Vec<[f64; DIMS]> = targets.iter().map(coords).collect();
        let mut tree = KdTree {
            targets,
            order: (0..points.len()).collect(),
            points,
            nodes: Vec::new(),
            weights,
        };
        if !tree.points.is_empty() {
            tree.build_node(0, tree.points.len());
        }
        tree
    }

    fn axis_scale(&self, axis: usize) -> f64 {
        match axis {
            0 => self.weights.tau,
            1 => self.weights.p,
            2..=4 => self.weights.dod,
            _ => self.weights.doa,
        }
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let mut lo = [f64::INFINITY; DIMS];
        let mut hi = [f64::NEG_INFINITY; DIMS];
        for &i in &self.order[start..end] {
            for d in 0..DIMS {
                lo[d] = lo[d].min(self.points[i][d]);
                hi[d] = hi[d].max(self.points[i][d]);
            }
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            lo,
            hi,
            kind: NodeKind::Leaf { start, end },
        });
        if end - start <= LEAF_SIZE {
            return id;
        }
        let (axis, spread) = (0..DIMS)
            .map(|d| (d, (hi[d] - lo[d]) * self.axis_scale(d)))
            .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
        if spread <= 0.0 {
            return id;
        }
        let mid = start + (end - start) / 2;
        let points = &self.points;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            points[a][axis].total_cmp(&points[b][axis]).then(a.cmp(&b))
        });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id].kind = NodeKind::Split { left, right };
        id
    }

    fn lower_bound(&self, q: &[f64; DIMS], node: &Node) -> f64 {
        let mut g = [0.0; DIMS];
        for d in 0..DIMS {
            g[d] = if q[d] < node.lo[d] {
                node.lo[d] - q[d]
            } else if q[d] > node.hi[d] {
                q[d] - node.hi[d]
            } else {
                0.0
            };
        }
        distance_from_gaps(&g, &self.weights)
    }

    /// Index of the nearest target (lowest index among ties) and its distance.
    pub fn nearest(&self, query: &StandardizedTuple) -> (usize, f64) {
        let q = coords(query);
        let mut best_idx = usize::MAX;
        let mut best_d = f64::INFINITY;
        let mut stack: Vec<(usize, f64)> = vec![(0, self.lower_bound(&q, &self.nodes[0]))];
        while let Some((id, lb)) = stack.pop() {
            if lb > best_d {
                continue;
            }
            match self.nodes[id].kind {
                NodeKind::Leaf { start, end } => {
                    for &j in &self.order[start..end] {
                        let p = &self.points[j];
                        let mut g = [0.0; DIMS];
                        for d in 0..DIMS {
                            g[d] = q[d] - p[d];
                        }
                        let dist = distance_from_gaps(&g, &self.weights);
                        if dist < best_d || (dist == best_d && j < best_idx) {
                            best_d = dist;
                            best_idx = j;
                        }
                    }
                }
                NodeKind::Split { left, right } => {
                    let lb_l = self.lower_bound(&q, &self.nodes[left]);
                    let lb_r = self.lower_bound(&q, &self.nodes[right]);
                    // nearer child is popped first
                    if lb_l <= lb_r {
                        stack.push((right, lb_r));
                        stack.push((left, lb_l));
                    } else {
                        stack.push((left, lb_l));
                        stack.push((right, lb_r));
                    }
                }
            }
        }
        debug_assert_eq!(
            best_d,
            self.weights.dot(&feature_distances(query, &self.targets[best_idx]))
        );
        (best_idx, best_d)
    }
}
