use netsim::{
    all_pairs_stats, build_tree, dominance_violations, Design, ParamError, PathStats, TopologyParams,
    TreeTopology,
};
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Radio range used when none is given, from [`calibrate_radius`] on the
/// reference scenarios with 100 nodes.
pub const DEFAULT_RADIUS: f64 = 0.30;

/// Allowed distance, in percentage points, between a simulated ratio and
/// its published target.
pub const TOLERANCE_PCT: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Shape {
    /// Every node one hop from the sink.
    Star,
    /// Every node one hop below the previous one.
    Chain,
    Random {
        th_max: u32,
        in_max: usize,
        n_max: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub shape: Shape,
    /// Published C/O ratio in percent, if any.
    pub target_pct: Option<u64>,
}

impl Scenario {
    pub fn random(name: &str, th_max: u32, in_max: usize, n_max: usize, target_pct: Option<u64>) -> Scenario {
        Scenario {
            name: name.to_string(),
            shape: Shape::Random {
                th_max,
                in_max,
                n_max,
            },
            target_pct,
        }
    }

    /// The six rows of the published comparison. The random rows name
    /// their router levels; leaves sit one level deeper, so the tree
    /// height limit is one more than the row's label.
    pub fn reference() -> Vec<Scenario> {
        vec![
            Scenario {
                name: "worst".into(),
                shape: Shape::Star,
                target_pct: Some(100),
            },
            Scenario::random("th3-in3-n10", 4, 3, 10, Some(81)),
            Scenario::random("th3-in6-n20", 4, 6, 20, Some(72)),
            Scenario::random("th3-in10-n20", 4, 10, 20, Some(71)),
            Scenario::random("th10-in3-n5", 11, 3, 5, Some(52)),
            Scenario {
                name: "best".into(),
                shape: Shape::Chain,
                target_pct: Some(33),
            },
        ]
    }

    pub fn topology(&self, n: usize, radius: f64, seed: u64) -> Result<TreeTopology, ParamError> {
        let params = match self.shape {
            Shape::Chain => return Ok(TreeTopology::chain(n.saturating_sub(1))),
            Shape::Star => TopologyParams {
                n,
                radius: 1.0,
                th_max: 1,
                in_max: 0,
                n_max: n.saturating_sub(1),
                seed,
            },
            Shape::Random {
                th_max,
                in_max,
                n_max,
            } => TopologyParams {
                n,
                radius,
                th_max,
                in_max,
                n_max,
                seed,
            },
        };
        build_tree(&params)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StudyError {
    #[error("runs must be at least 1")]
    NoRuns,
    #[error("scenario `{0}`: {1}")]
    Params(String, ParamError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyConfig {
    /// Nodes per topology, sink included.
    pub n: usize,
    pub radius: f64,
    pub runs: u64,
    pub seed: u64,
    pub scenarios: Vec<Scenario>,
}

impl StudyConfig {
    pub fn reference(runs: u64, seed: u64) -> StudyConfig {
        StudyConfig {
            n: 100,
            radius: DEFAULT_RADIUS,
            runs,
            seed,
            scenarios: Scenario::reference(),
        }
    }

    pub fn validate(&self) -> Result<(), StudyError> {
        if self.runs == 0 {
            return Err(StudyError::NoRuns);
        }
        for s in &self.scenarios {
            s.topology(self.n, self.radius, 0)
                .map_err(|e| StudyError::Params(s.name.clone(), e))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub n: usize,
    /// Runs whose tree had at least two endpoints.
    pub runs: u64,
    /// Runs skipped because fewer than two nodes attached.
    pub skipped: u64,
    pub orchestration: PathStats,
    pub choreography: PathStats,
    /// Mean fraction of placed nodes that joined the tree.
    pub attached_fraction: f64,
    /// Pairs breaking choreography <= orchestration, over all runs.
    pub dominance_violations: u64,
}

impl ScenarioReport {
    pub fn orch_mean(&self) -> f64 {
        self.orchestration.mean()
    }

    pub fn chor_mean(&self) -> f64 {
        self.choreography.mean()
    }

    /// Ratio of pooled means. Both designs cover the same pairs, so this
    /// is the ratio of total hops.
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(
            self.choreography.total_hops(),
            self.orchestration.total_hops().max(1),
        )
    }

    /// `100 * ratio`, rounded half up.
    pub fn ratio_pct(&self) -> u64 {
        let (c, o) = (
            self.choreography.total_hops(),
            self.orchestration.total_hops().max(1),
        );
        (200 * c + o) / (2 * o)
    }

    /// `None` when the scenario has no target.
    pub fn within_tolerance(&self) -> Option<bool> {
        self.scenario
            .target_pct
            .map(|t| self.ratio_pct().abs_diff(t) <= TOLERANCE_PCT)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyReport {
    pub n: usize,
    pub radius: f64,
    pub seed: u64,
    pub scenarios: Vec<ScenarioReport>,
}

/// Seed of run `run` under `master`: one splitmix64 step, so runs are
/// independent of thread scheduling and of each other.
pub fn run_seed(master: u64, run: u64) -> u64 {
    let mut z = master.wrapping_add(run.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct RunResult {
    stats: Option<(PathStats, PathStats)>,
    attached: usize,
    violations: u64,
}

fn one_run(scenario: &Scenario, n: usize, radius: f64, seed: u64) -> RunResult {
    let t = scenario.topology(n, radius, seed).expect("validated parameters");
    let attached = t.attached().len();
    let stats = all_pairs_stats(&t, Design::Orchestration).ok().map(|o| {
        (
            o,
            all_pairs_stats(&t, Design::Choreography).expect("same endpoints"),
        )
    });
    RunResult {
        stats,
        attached,
        violations: dominance_violations(&t) as u64,
    }
}

fn run_scenario(config: &StudyConfig, scenario: &Scenario) -> ScenarioReport {
    let results: Vec<RunResult> = (0..config.runs)
        .into_par_iter()
        .map(|run| one_run(scenario, config.n, config.radius, run_seed(config.seed, run)))
        .collect();

    let mut report = ScenarioReport {
        scenario: scenario.clone(),
        n: config.n,
        runs: 0,
        skipped: 0,
        orchestration: PathStats::empty(Design::Orchestration),
        choreography: PathStats::empty(Design::Choreography),
        attached_fraction: 0.0,
        dominance_violations: 0,
    };
    let mut attached = 0usize;
    for r in &results {
        attached += r.attached;
        report.dominance_violations += r.violations;
        match &r.stats {
            Some((o, c)) => {
                report.runs += 1;
                report.orchestration.merge(o);
                report.choreography.merge(c);
            }
            None => report.skipped += 1,
        }
    }
    report.attached_fraction = attached as f64 / (results.len().max(1) * config.n.max(1)) as f64;
    report
}

/// Builds `runs` topologies per scenario and pools their pair statistics.
/// Run `k` of every scenario uses [`run_seed`]`(seed, k)`, so scenarios
/// share node placements.
pub fn run_study(config: &StudyConfig) -> Result<StudyReport, StudyError> {
    config.validate()?;
    Ok(StudyReport {
        n: config.n,
        radius: config.radius,
        seed: config.seed,
        scenarios: config.scenarios.iter().map(|s| run_scenario(config, s)).collect(),
    })
}

/// Smallest radius, in steps of 0.05, at which the random scenarios attach
/// at least 95% of the placed nodes on average. Scenarios whose
/// parameters are invalid count as attaching nothing.
pub fn calibrate_radius(n: usize, runs: u64, seed: u64, scenarios: &[Scenario]) -> Option<f64> {
    let random: Vec<Scenario> = scenarios
        .iter()
        .filter(|s| matches!(s.shape, Shape::Random { .. }))
        .cloned()
        .collect();
    if random.is_empty() {
        return None;
    }
    (1..=20).map(|k| k as f64 / 20.0).find(|&radius| {
        let fractions: f64 = random
            .iter()
            .map(|s| {
                let attached: usize = (0..runs)
                    .into_par_iter()
                    .map(|run| {
                        s.topology(n, radius, run_seed(seed, run))
                            .map_or(0, |t| t.attached().len())
                    })
                    .sum();
                attached as f64 / (runs as usize * n) as f64
            })
            .sum();
        fractions / random.len() as f64 >= 0.95
    })
}
