use std::collections::VecDeque;
use std::num::NonZeroU32;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::paths::{route, Design};
use crate::topology::TreeTopology;

/// Packets a node may transmit per round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Capacity {
    Unlimited,
    PerRound(NonZeroU32),
}

impl Capacity {
    /// `None` for zero.
    pub fn per_round(n: u32) -> Option<Capacity> {
        NonZeroU32::new(n).map(Capacity::PerRound)
    }

    fn limit(self) -> usize {
        match self {
            Capacity::Unlimited => usize::MAX,
            Capacity::PerRound(n) => n.get() as usize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadReport {
    pub design: Design,
    /// Packets relayed by nodes at each depth. Transmissions by the
    /// message source are not forwards.
    pub forwards_per_depth: Vec<u64>,
    pub sent: u64,
    pub delivered: u64,
    pub dropped: u64,
    /// delivered / sent, 1 when nothing was sent.
    pub pdr: f64,
    /// Forwards at depth 1.
    pub top_level_activity: u64,
    pub rounds: u64,
}

/// Who talks to whom, and when.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Traffic {
    /// Sender/recipient pairs.
    pub pairs: usize,
    pub messages_per_pair: u32,
    /// Rounds between two messages of the same pair, at least 1. Each pair
    /// starts at a random phase within the first interval.
    pub interval: u32,
}

struct Packet {
    pair: usize,
    hop: usize,
}

/// Sends traffic between random pairs of attached non-sink nodes.
///
/// Sources are taken in turn from the attached nodes (wrapping around when
/// there are more pairs than nodes) and each picks a random destination.
/// Every pair injects one message each `interval` rounds. In each
/// round a node transmits the oldest packets it holds, up to `capacity`,
/// and drops the rest. A packet advances one hop per round along the
/// route of `design`.
///
/// Pairs and phases depend only on the topology, `traffic` and `seed`, so
/// both designs can be compared on identical traffic.
pub fn run_load_experiment(
    t: &TreeTopology,
    design: Design,
    traffic: &Traffic,
    capacity: Capacity,
    seed: u64,
) -> LoadReport {
    let interval = traffic.interval.max(1);
    let nodes: Vec<usize> = t.endpoints().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut phases = Vec::new();
    let routes: Vec<Vec<usize>> = if nodes.len() < 2 {
        Vec::new()
    } else {
        (0..traffic.pairs)
            .map(|k| {
                let src = nodes[k % nodes.len()];
                let mut dst = nodes[rng.random_range(0..nodes.len() - 1)];
                if dst == src {
                    dst = nodes[nodes.len() - 1];
                }
                phases.push(rng.random_range(0..interval));
                route(t, src, dst, design).expect("endpoints are attached")
            })
            .collect()
    };

    let height = t.height() as usize;
    let mut forwards = vec![0u64; height + 1];
    let (mut sent, mut delivered, mut dropped, mut rounds) = (0u64, 0u64, 0u64, 0u64);
    let limit = capacity.limit();
    let mut queues: Vec<VecDeque<Packet>> = (0..t.len()).map(|_| VecDeque::new()).collect();
    let mut in_flight = 0usize;

    let last = traffic.messages_per_pair.saturating_mul(interval);
    let mut round = 0u32;
    while round < last || in_flight > 0 {
        if round < last {
            for (pair, r) in routes.iter().enumerate() {
                if round % interval != phases[pair] {
                    continue;
                }
                queues[r[0]].push_back(Packet { pair, hop: 0 });
                sent += 1;
                in_flight += 1;
            }
        }
        let mut arrivals: Vec<(usize, Packet)> = Vec::new();
        for (node, queue) in queues.iter_mut().enumerate() {
            let mut transmitted = 0;
            while let Some(p) = queue.pop_front() {
                if transmitted == limit {
                    dropped += 1;
                    in_flight -= 1;
                    continue;
                }
                transmitted += 1;
                if p.hop > 0 {
                    forwards[t.depth(node).expect("attached") as usize] += 1;
                }
                let r = &routes[p.pair];
                let next = Packet {
                    pair: p.pair,
                    hop: p.hop + 1,
                };
                if next.hop == r.len() - 1 {
                    delivered += 1;
                    in_flight -= 1;
                } else {
                    arrivals.push((r[next.hop], next));
                }
            }
        }
        for (node, p) in arrivals {
            queues[node].push_back(p);
        }
        round += 1;
        rounds += 1;
    }

    LoadReport {
        design,
        top_level_activity: forwards.get(1).copied().unwrap_or(0),
        forwards_per_depth: forwards,
        sent,
        delivered,
        dropped,
        pdr: if sent == 0 {
            1.0
        } else {
            delivered as f64 / sent as f64
        },
        rounds,
    }
}
