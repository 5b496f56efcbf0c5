use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of the sink in every topology.
pub const SINK: usize = 0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyParams {
    /// Nodes placed, sink included.
    pub n: usize,
    /// Radio range as a fraction of the square side, in (0, 1].
    pub radius: f64,
    /// Depth of the deepest node allowed (sink at depth 0).
    pub th_max: u32,
    /// Children per node that may have children of their own.
    pub in_max: usize,
    /// Children per node.
    pub n_max: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("n must be at least 1")]
    NoNodes,
    #[error("radius {0} is outside (0, 1]")]
    Radius(f64),
    #[error("in_max ({in_max}) exceeds n_max ({n_max})")]
    InMax { in_max: usize, n_max: usize },
}

impl TopologyParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if self.n == 0 {
            return Err(ParamError::NoNodes);
        }
        if !(self.radius > 0.0 && self.radius <= 1.0) {
            return Err(ParamError::Radius(self.radius));
        }
        if self.in_max > self.n_max {
            return Err(ParamError::InMax {
                in_max: self.in_max,
                n_max: self.n_max,
            });
        }
        Ok(())
    }
}

/// A rooted tree over placed nodes. Node 0 is the sink; nodes that could
/// not join have no parent and no depth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeTopology {
    positions: Vec<(f64, f64)>,
    parent: Vec<Option<usize>>,
    depth: Vec<Option<u32>>,
    /// Attached nodes in joining order, sink first.
    attached: Vec<usize>,
}

impl TreeTopology {
    /// Builds a tree from a parent array (`None` for the sink at index 0
    /// and for detached nodes). Nodes are laid out on a synthetic grid.
    ///
    /// Panics if index 0 has a parent or the array contains a cycle.
    pub fn from_parents(parents: &[Option<usize>]) -> TreeTopology {
        assert!(
            !parents.is_empty() && parents[SINK].is_none(),
            "node 0 must be the sink"
        );
        let n = parents.len();
        let mut depth = vec![None; n];
        depth[SINK] = Some(0);
        // resolve depths in as many passes as the tree is deep
        for _ in 0..n {
            let mut changed = false;
            for v in 1..n {
                if let (None, Some(p)) = (depth[v], parents[v]) {
                    if let Some(d) = depth[p] {
                        depth[v] = Some(d + 1);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        for v in 1..n {
            assert!(
                parents[v].is_none() || depth[v].is_some(),
                "node {v} is not connected to the sink"
            );
        }
        let mut attached: Vec<usize> = (0..n).filter(|&v| depth[v].is_some()).collect();
        attached.sort_by_key(|&v| (depth[v], v));
        let positions = (0..n)
            .map(|v| (v as f64 / n as f64, depth[v].map_or(1.0, |d| d as f64 / n as f64)))
            .collect();
        TreeTopology {
            positions,
            parent: parents.to_vec(),
            depth,
            attached,
        }
    }

    /// Sink plus a line of `n` nodes: node i hangs below node i-1.
    pub fn chain(n: usize) -> TreeTopology {
        let parents: Vec<_> = (0..=n).map(|i| i.checked_sub(1)).collect();
        TreeTopology::from_parents(&parents)
    }

    /// Sink plus `n` nodes directly below it.
    pub fn star(n: usize) -> TreeTopology {
        let parents: Vec<_> = (0..=n).map(|i| (i > 0).then_some(SINK)).collect();
        TreeTopology::from_parents(&parents)
    }

    /// Placed nodes, attached or not.
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn positions(&self) -> &[(f64, f64)] {
        &self.positions
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn depth(&self, v: usize) -> Option<u32> {
        self.depth[v]
    }

    pub fn is_attached(&self, v: usize) -> bool {
        v < self.len() && self.depth[v].is_some()
    }

    /// Attached nodes, sink first.
    pub fn attached(&self) -> &[usize] {
        &self.attached
    }

    /// Attached nodes other than the sink.
    pub fn endpoints(&self) -> impl Iterator<Item = usize> + '_ {
        self.attached.iter().copied().filter(|&v| v != SINK)
    }

    pub fn children(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&c| self.parent[c] == Some(v))
    }

    pub fn height(&self) -> u32 {
        self.depth.iter().flatten().copied().max().unwrap_or(0)
    }

    pub fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let depth = |v: usize| self.depth[v].expect("attached node");
        while depth(a) > depth(b) {
            a = self.parent[a].expect("non-sink");
        }
        while depth(b) > depth(a) {
            b = self.parent[b].expect("non-sink");
        }
        while a != b {
            a = self.parent[a].expect("non-sink");
            b = self.parent[b].expect("non-sink");
        }
        a
    }

    /// One line per attached non-sink node: `child parent depth x y`.
    pub fn edge_list(&self) -> String {
        let mut out = String::new();
        for v in self.endpoints() {
            let (x, y) = self.positions[v];
            let _ = writeln!(
                out,
                "{v} {} {} {x:.6} {y:.6}",
                self.parent[v].expect("attached"),
                self.depth[v].expect("attached")
            );
        }
        out
    }

    /// Checks the structural limits of `params`. Returns the first
    /// violation found.
    pub fn check(&self, params: &TopologyParams) -> Result<(), String> {
        if self.depth[SINK] != Some(0) {
            return Err("sink is not at depth 0".into());
        }
        for v in self.endpoints() {
            let p = self.parent[v].ok_or(format!("attached node {v} has no parent"))?;
            let (d, dp) = (self.depth[v].unwrap(), self.depth[p].unwrap_or(u32::MAX));
            if d != dp.wrapping_add(1) {
                return Err(format!("depth of {v} is not its parent's plus one"));
            }
            if d > params.th_max {
                return Err(format!("node {v} at depth {d} exceeds th_max"));
            }
            let (a, b) = (self.positions[v], self.positions[p]);
            if (a.0 - b.0).hypot(a.1 - b.1) > params.radius {
                return Err(format!("node {v} is out of range of its parent"));
            }
        }
        for &v in &self.attached {
            let kids: Vec<usize> = self.children(v).collect();
            if kids.len() > params.n_max {
                return Err(format!("node {v} has {} children", kids.len()));
            }
            let routers = kids
                .iter()
                .filter(|&&c| self.children(c).next().is_some())
                .count();
            if routers > params.in_max {
                return Err(format!("node {v} has {routers} children with children"));
            }
        }
        Ok(())
    }
}

/// Places the sink at the centre of the unit square and `n - 1` nodes
/// uniformly at random, then grows the tree depth first from the sink.
///
/// A visited node adopts its nearest unattached neighbours within
/// `radius`, at most `n_max` of them, and then visits each new child in
/// that order before moving on. Only the `in_max` nearest of a node's
/// children may adopt in turn. Nodes at depth `th_max` adopt nothing.
/// Nodes never reached stay detached.
pub fn build_tree(params: &TopologyParams) -> Result<TreeTopology, ParamError> {
    params.validate()?;
    let n = params.n;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut positions = Vec::with_capacity(n);
    positions.push((0.5, 0.5));
    for _ in 1..n {
        positions.push((rng.random::<f64>(), rng.random::<f64>()));
    }

    let mut parent = vec![None; n];
    let mut depth = vec![None; n];
    depth[SINK] = Some(0);
    let mut attached = vec![SINK];
    let mut unattached: Vec<usize> = (1..n).collect();
    let r2 = params.radius * params.radius;

    // (node, may adopt)
    let mut stack = vec![(SINK, true)];
    while let Some((u, may_adopt)) = stack.pop() {
        let du = depth[u].expect("visited nodes are attached");
        if !may_adopt || du >= params.th_max {
            continue;
        }
        let (ux, uy) = positions[u];
        let mut near: Vec<(f64, usize)> = unattached
            .iter()
            .map(|&v| {
                let (vx, vy) = positions[v];
                ((vx - ux).powi(2) + (vy - uy).powi(2), v)
            })
            .filter(|&(d2, _)| d2 <= r2)
            .collect();
        near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        near.truncate(params.n_max);

        for &(_, v) in &near {
            parent[v] = Some(u);
            depth[v] = Some(du + 1);
            attached.push(v);
        }
        unattached.retain(|v| parent[*v].is_none());
        // push in reverse so the nearest child is visited first
        for (rank, &(_, v)) in near.iter().enumerate().rev() {
            stack.push((v, rank < params.in_max));
        }
    }

    Ok(TreeTopology {
        positions,
        parent,
        depth,
        attached,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, th_max: u32, in_max: usize, n_max: usize, radius: f64) -> TopologyParams {
        TopologyParams {
            n,
            radius,
            th_max,
            in_max,
            n_max,
            seed: 7,
        }
    }

    #[test]
    fn single_node() {
        let t = build_tree(&params(1, 3, 1, 1, 0.3)).unwrap();
        assert_eq!(t.attached(), [SINK]);
        assert_eq!(t.edge_list(), "");
    }

    #[test]
    fn zero_height_keeps_only_sink() {
        let t = build_tree(&params(50, 0, 5, 10, 1.0)).unwrap();
        assert_eq!(t.attached(), [SINK]);
    }

    #[test]
    fn star_from_generator() {
        let t = build_tree(&params(100, 1, 1, 99, 1.0)).unwrap();
        assert_eq!(t.attached().len(), 100);
        assert!(t.endpoints().all(|v| t.depth(v) == Some(1)));
    }

    #[test]
    fn rejects_bad_params() {
        assert_eq!(build_tree(&params(0, 1, 1, 1, 0.5)), Err(ParamError::NoNodes));
        assert_eq!(build_tree(&params(5, 1, 1, 1, 0.0)), Err(ParamError::Radius(0.0)));
        assert!(matches!(
            build_tree(&params(5, 1, 3, 2, 0.5)),
            Err(ParamError::InMax { .. })
        ));
    }

    #[test]
    fn chain_and_star_shapes() {
        let c = TreeTopology::chain(4);
        assert_eq!(c.depth(4), Some(4));
        assert_eq!(c.lca(2, 4), 2);
        let s = TreeTopology::star(3);
        assert_eq!(s.children(SINK).collect::<Vec<_>>(), [1, 2, 3]);
        assert_eq!(s.lca(1, 3), SINK);
    }

    #[test]
    fn edge_list_format() {
        let t = TreeTopology::chain(2);
        let lines: Vec<_> = t.edge_list().lines().map(str::to_string).collect();
        assert_eq!(lines.len(), 2);
        let fields: Vec<_> = lines[1].split(' ').collect();
        assert_eq!(&fields[..3], ["2", "1", "2"]);
        assert_eq!(fields.len(), 5);
    }
}
