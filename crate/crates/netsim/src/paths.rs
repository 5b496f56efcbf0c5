use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::{TreeTopology, SINK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Design {
    /// Every message goes up to the sink and back down.
    Orchestration,
    /// Messages take the tree path through the lowest common ancestor.
    Choreography,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("node {0} is not attached")]
    NotAttached(usize),
    #[error("need at least two attached endpoints, found {0}")]
    TooFewNodes(usize),
}

pub fn path_length(t: &TreeTopology, i: usize, j: usize, design: Design) -> Result<u32, PathError> {
    let di = t.depth(i).ok_or(PathError::NotAttached(i))?;
    let dj = t.depth(j).ok_or(PathError::NotAttached(j))?;
    Ok(match design {
        Design::Orchestration => di + dj,
        Design::Choreography => {
            let l = t.depth(t.lca(i, j)).expect("ancestor of attached node");
            di + dj - 2 * l
        }
    })
}

/// Nodes visited from `i` to `j`, both included.
pub fn route(t: &TreeTopology, i: usize, j: usize, design: Design) -> Result<Vec<usize>, PathError> {
    if !t.is_attached(i) {
        return Err(PathError::NotAttached(i));
    }
    if !t.is_attached(j) {
        return Err(PathError::NotAttached(j));
    }
    let turn = match design {
        Design::Orchestration => SINK,
        Design::Choreography => t.lca(i, j),
    };
    let climb = |mut v: usize| {
        let mut path = vec![v];
        while v != turn {
            v = t.parent(v).expect("below the turning point");
            path.push(v);
        }
        path
    };
    let mut up = climb(i);
    let mut down = climb(j);
    down.pop();
    down.reverse();
    up.append(&mut down);
    Ok(up)
}

/// Hop-count distribution over all unordered pairs of attached non-sink
/// nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathStats {
    pub design: Design,
    pub histogram: BTreeMap<u32, u64>,
}

impl PathStats {
    pub fn pairs(&self) -> u64 {
        self.histogram.values().sum()
    }

    pub fn total_hops(&self) -> u64 {
        self.histogram.iter().map(|(&len, &c)| u64::from(len) * c).sum()
    }

    pub fn mean_exact(&self) -> Ratio<u64> {
        Ratio::new(self.total_hops(), self.pairs().max(1))
    }

    pub fn mean(&self) -> f64 {
        self.total_hops() as f64 / self.pairs().max(1) as f64
    }

    /// Adds the counts of `other`, which must be for the same design.
    pub fn merge(&mut self, other: &PathStats) {
        debug_assert_eq!(self.design, other.design);
        for (&len, &c) in &other.histogram {
            *self.histogram.entry(len).or_default() += c;
        }
    }

    pub fn empty(design: Design) -> PathStats {
        PathStats {
            design,
            histogram: BTreeMap::new(),
        }
    }
}

pub fn all_pairs_stats(t: &TreeTopology, design: Design) -> Result<PathStats, PathError> {
    let nodes: Vec<usize> = t.endpoints().collect();
    if nodes.len() < 2 {
        return Err(PathError::TooFewNodes(nodes.len()));
    }
    let mut stats = PathStats::empty(design);
    for (a, &i) in nodes.iter().enumerate() {
        for &j in &nodes[a + 1..] {
            let len = path_length(t, i, j, design)?;
            *stats.histogram.entry(len).or_default() += 1;
        }
    }
    Ok(stats)
}

/// Pairs where choreography is longer than orchestration, or where the
/// two are equal although the pair's common ancestor is not the sink
/// (or differ although it is).
pub fn dominance_violations(t: &TreeTopology) -> usize {
    let nodes: Vec<usize> = t.endpoints().collect();
    let mut violations = 0;
    for (a, &i) in nodes.iter().enumerate() {
        for &j in &nodes[a + 1..] {
            let o = path_length(t, i, j, Design::Orchestration).expect("attached");
            let c = path_length(t, i, j, Design::Choreography).expect("attached");
            if c > o || (c == o) != (t.lca(i, j) == SINK) {
                violations += 1;
            }
        }
    }
    violations
}
