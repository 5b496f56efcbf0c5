//! Reference models used by the acceptance suite. They share no code with
//! the crates under test: trees are plain parent arrays walked by
//! breadth-first search, and the counting program is an integer counter.

use std::collections::VecDeque;

use num_rational::Ratio;

/// Undirected adjacency lists of the tree described by `parents`.
pub fn adjacency(parents: &[Option<usize>]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); parents.len()];
    for (v, p) in parents.iter().enumerate() {
        if let Some(p) = *p {
            adj[v].push(p);
            adj[p].push(v);
        }
    }
    adj
}

/// Hop counts from `src` to every reachable vertex.
pub fn bfs(adj: &[Vec<usize>], src: usize) -> Vec<Option<u32>> {
    let mut dist = vec![None; adj.len()];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap();
        for &w in &adj[v] {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Hop counts for every unordered pair of vertices reachable from the
/// sink (vertex 0), sink excluded: `(i, j, via sink, direct)`.
pub fn pair_hops(parents: &[Option<usize>]) -> Vec<(usize, usize, u32, u32)> {
    let adj = adjacency(parents);
    let from_sink = bfs(&adj, 0);
    let nodes: Vec<usize> = (1..parents.len()).filter(|&v| from_sink[v].is_some()).collect();
    let mut out = Vec::new();
    for (a, &i) in nodes.iter().enumerate() {
        let from_i = bfs(&adj, i);
        for &j in &nodes[a + 1..] {
            let via_sink = from_sink[i].unwrap() + from_sink[j].unwrap();
            out.push((i, j, via_sink, from_i[j].unwrap()));
        }
    }
    out
}

/// Exact mean hop counts `(via sink, direct)` over all pairs.
pub fn mean_hops(parents: &[Option<usize>]) -> (Ratio<u64>, Ratio<u64>) {
    let pairs = pair_hops(parents);
    let total = |f: fn(&(usize, usize, u32, u32)) -> u32| pairs.iter().map(|p| u64::from(f(p))).sum::<u64>();
    let n = pairs.len() as u64;
    (Ratio::new(total(|p| p.2), n), Ratio::new(total(|p| p.3), n))
}

/// Sink followed by a line of `n` nodes.
pub fn chain_parents(n: usize) -> Vec<Option<usize>> {
    (0..=n).map(|v| v.checked_sub(1)).collect()
}

/// For each of `pushes` stimuli, whether a program counting `k` pushes
/// reports on that one. It reports once, on push `k`, then stays silent.
pub fn counting_replay(k: u32, pushes: u32) -> Vec<bool> {
    let mut seen = 0;
    (0..pushes)
        .map(|_| {
            seen += 1;
            seen == k
        })
        .collect()
}
