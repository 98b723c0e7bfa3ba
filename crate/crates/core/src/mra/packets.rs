use ndarray::Array2;

use super::dwt::{analysis_step, log2_exact};
use super::dwt2::{cols_forward, rows_forward};
use crate::error::{Error, Result};
use crate::wavelet::FilterPair;

/// Additive Shannon cost `−Σ v ln v` with `v = c² / total`; zero blocks cost 0.
pub fn shannon_cost(block: &[f64], total_energy: f64) -> f64 {
    if total_energy <= 0.0 {
        return 0.0;
    }
    block
        .iter()
        .map(|c| {
            let v = c * c / total_energy;
            if v > 0.0 {
                -v * v.ln()
            } else {
                0.0
            }
        })
        .sum()
}

/// Node address: depth and position within that depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId {
    pub depth: usize,
    pub index: usize,
}

/// Complete packet tree to `max_depth` with its chosen tiling.
#[derive(Debug, Clone)]
pub struct PacketTree {
    /// `nodes[d][i]` holds the coefficients of node `(d, i)`.
    pub nodes: Vec<Vec<Vec<f64>>>,
    pub costs: Vec<Vec<f64>>,
    pub chosen_basis: Vec<NodeId>,
    pub entropy: f64,
    pub total_energy: f64,
}

impl PacketTree {
    pub fn max_depth(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Cost of a tiling summed in tree order, the same association the optimiser uses.
    pub fn tiling_cost(&self, tiling: &[NodeId]) -> f64 {
        fn rec(t: &PacketTree, node: NodeId, tiling: &[NodeId]) -> f64 {
            if tiling.contains(&node) {
                t.costs[node.depth][node.index]
            } else {
                let l = NodeId { depth: node.depth + 1, index: 2 * node.index };
                let r = NodeId { depth: node.depth + 1, index: 2 * node.index + 1 };
                rec(t, l, tiling) + rec(t, r, tiling)
            }
        }
        rec(self, NodeId { depth: 0, index: 0 }, tiling)
    }

    /// True when the nodes are disjoint and cover the signal.
    pub fn is_tiling(&self, tiling: &[NodeId]) -> bool {
        let n = self.nodes[0][0].len();
        let mut covered = vec![false; n];
        for node in tiling {
            if node.depth > self.max_depth() || node.index >= (1 << node.depth) {
                return false;
            }
            let width = n >> node.depth;
            for c in &mut covered[node.index * width..(node.index + 1) * width] {
                if *c {
                    return false;
                }
                *c = true;
            }
        }
        covered.iter().all(|&c| c)
    }
}

/// Coifman–Wickerhauser best basis: bottom-up, a parent wins ties against its children.
pub fn packet_best_basis(signal: &[f64], f: &FilterPair, max_depth: usize) -> Result<PacketTree> {
    let n = signal.len();
    let m = log2_exact(n).ok_or(Error::NonDyadicLength(n))?;
    if max_depth > m {
        return Err(Error::TooManyLevels { levels: max_depth, max: m });
    }
    let total_energy: f64 = signal.iter().map(|v| v * v).sum();
    let mut nodes = vec![vec![signal.to_vec()]];
    for d in 0..max_depth {
        let mut next = Vec::with_capacity(2 << d);
        for block in &nodes[d] {
            let half = block.len() / 2;
            let mut a = vec![0.0; half];
            let mut g = vec![0.0; half];
            analysis_step(block, f, &mut a, &mut g);
            next.push(a);
            next.push(g);
        }
        nodes.push(next);
    }
    let costs: Vec<Vec<f64>> = nodes
        .iter()
        .map(|level| level.iter().map(|b| shannon_cost(b, total_energy)).collect())
        .collect();
    let (entropy, chosen_basis) = choose(&costs, max_depth);
    Ok(PacketTree { nodes, costs, chosen_basis, entropy, total_energy })
}

fn choose(costs: &[Vec<f64>], max_depth: usize) -> (f64, Vec<NodeId>) {
    let mut best: Vec<f64> = costs[max_depth].clone();
    let mut split: Vec<Vec<bool>> = vec![vec![false; costs[max_depth].len()]];
    for d in (0..max_depth).rev() {
        let mut b = Vec::with_capacity(costs[d].len());
        let mut s = Vec::with_capacity(costs[d].len());
        for i in 0..costs[d].len() {
            let children = best[2 * i] + best[2 * i + 1];
            if children < costs[d][i] {
                b.push(children);
                s.push(true);
            } else {
                b.push(costs[d][i]);
                s.push(false);
            }
        }
        best = b;
        split.push(s);
    }
    split.reverse();
    let mut chosen = Vec::new();
    let mut stack = vec![NodeId { depth: 0, index: 0 }];
    while let Some(node) = stack.pop() {
        if node.depth < max_depth && split[node.depth][node.index] {
            stack.push(NodeId { depth: node.depth + 1, index: 2 * node.index + 1 });
            stack.push(NodeId { depth: node.depth + 1, index: 2 * node.index });
        } else {
            chosen.push(node);
        }
    }
    (best[0], chosen)
}

/// Best-basis Shannon entropy over the 2-D quadtree packet library of `field`.
pub fn quadtree_best_entropy(field: &Array2<f64>, f: &FilterPair, max_depth: usize) -> Result<f64> {
    let (nr, nc) = field.dim();
    let (Some(mr), Some(mc)) = (log2_exact(nr), log2_exact(nc)) else {
        return Err(Error::NonDyadicShape(nr, nc));
    };
    if max_depth > mr.min(mc) {
        return Err(Error::TooManyLevels { levels: max_depth, max: mr.min(mc) });
    }
    let total: f64 = field.iter().map(|v| v * v).sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    let root: Vec<f64> = field.iter().copied().collect();
    Ok(quad_best(&root, nr, nc, f, max_depth, total))
}

fn quad_best(block: &[f64], nr: usize, nc: usize, f: &FilterPair, depth: usize, total: f64) -> f64 {
    let own = shannon_cost(block, total);
    if depth == 0 {
        return own;
    }
    let mut buf = block.to_vec();
    rows_forward(&mut buf, nc, nr, nc, f);
    cols_forward(&mut buf, nc, nr, nc, f);
    let (hr, hc) = (nr / 2, nc / 2);
    let mut children = 0.0;
    for (r0, c0) in [(0, 0), (0, hc), (hr, 0), (hr, hc)] {
        let mut child = Vec::with_capacity(hr * hc);
        for i in 0..hr {
            child.extend_from_slice(&buf[(r0 + i) * nc + c0..(r0 + i) * nc + c0 + hc]);
        }
        children += quad_best(&child, hr, hc, f, depth - 1, total);
    }
    if children < own {
        children
    } else {
        own
    }
}
