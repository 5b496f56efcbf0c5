use netsim::{build_tree, run_load_experiment, Capacity, Design, LoadReport, TopologyParams, Traffic};
use rayon::prelude::*;
use serde::Serialize;

use crate::study::{run_seed, DEFAULT_RADIUS};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadStudyConfig {
    pub n: usize,
    pub radius: f64,
    pub th_max: u32,
    pub in_max: usize,
    pub n_max: usize,
    /// Random topologies to compare on.
    pub topologies: u64,
    /// Messages each node sends to its chosen recipient.
    pub messages: u32,
    /// Rounds between two messages of one sender.
    pub interval: u32,
    pub capacity: Capacity,
    pub seed: u64,
}

impl Default for LoadStudyConfig {
    fn default() -> Self {
        LoadStudyConfig {
            n: 100,
            radius: DEFAULT_RADIUS,
            th_max: 4,
            in_max: 6,
            n_max: 20,
            topologies: 50,
            messages: 30,
            interval: 10,
            capacity: Capacity::per_round(10).expect("non-zero"),
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadRun {
    pub seed: u64,
    pub orchestration: LoadReport,
    pub choreography: LoadReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadStudyReport {
    pub runs: Vec<LoadRun>,
}

impl LoadStudyReport {
    /// Fraction of runs where orchestration relays at least as much at
    /// depth 1 as choreography.
    pub fn top_level_fraction(&self) -> f64 {
        self.fraction(|r| r.orchestration.top_level_activity >= r.choreography.top_level_activity)
    }

    /// Fraction of runs where choreography delivers at least as well.
    pub fn pdr_fraction(&self) -> f64 {
        self.fraction(|r| r.choreography.pdr >= r.orchestration.pdr)
    }

    fn fraction(&self, pred: impl Fn(&LoadRun) -> bool) -> f64 {
        if self.runs.is_empty() {
            return 1.0;
        }
        self.runs.iter().filter(|r| pred(r)).count() as f64 / self.runs.len() as f64
    }
}

/// Runs both designs on the same topology and traffic for each seed.
/// Every attached node sends to one random recipient.
pub fn run_load_study(config: &LoadStudyConfig) -> LoadStudyReport {
    let runs = (0..config.topologies)
        .into_par_iter()
        .map(|k| {
            let seed = run_seed(config.seed, k);
            let t = build_tree(&TopologyParams {
                n: config.n,
                radius: config.radius,
                th_max: config.th_max,
                in_max: config.in_max,
                n_max: config.n_max,
                seed,
            })
            .expect("valid load parameters");
            let traffic = Traffic {
                pairs: t.endpoints().count(),
                messages_per_pair: config.messages,
                interval: config.interval,
            };
            let run = |design| run_load_experiment(&t, design, &traffic, config.capacity, seed);
            LoadRun {
                seed,
                orchestration: run(Design::Orchestration),
                choreography: run(Design::Choreography),
            }
        })
        .collect();
    LoadStudyReport { runs }
}
