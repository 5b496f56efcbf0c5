use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use analysis::{
    calibrate_radius, emit_csv, mu_choreography, mu_orchestration, run_load_study, run_study, write_csv,
    LoadStudyConfig, Scenario, StudyConfig, DEFAULT_RADIUS,
};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use netsim::{all_pairs_stats, build_tree, Capacity, Design, TopologyParams, TreeTopology};

/// Orchestration vs choreography on sensor-network trees.
#[derive(Parser)]
#[command(name = "choreo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo path-length study (the six reference scenarios, or one
    /// custom scenario when --th-max is given).
    Study(StudyArgs),
    /// Exact chain means, checked against pair enumeration.
    ClosedForm {
        #[arg(long, default_value_t = 100)]
        n: u64,
    },
    /// Per-level load and delivery ratio under both designs.
    Load(LoadArgs),
    /// Prints one generated tree as `child parent depth x y` lines.
    Topology(TreeArgs),
    /// Smallest radius attaching 95% of the nodes in the random scenarios.
    Calibrate {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        runs: u64,
        #[arg(long, env = "CHOREO_SEED", default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct StudyArgs {
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    runs: u64,
    #[arg(long, env = "CHOREO_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_RADIUS)]
    radius: f64,
    #[arg(long)]
    th_max: Option<u32>,
    #[arg(long, default_value_t = 6, requires = "th_max")]
    in_max: usize,
    #[arg(long, default_value_t = 20, requires = "th_max")]
    n_max: usize,
    /// Summary CSV; histograms are written next to it. Stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TreeArgs {
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_RADIUS)]
    radius: f64,
    #[arg(long, default_value_t = 4)]
    th_max: u32,
    #[arg(long, default_value_t = 6)]
    in_max: usize,
    #[arg(long, default_value_t = 20)]
    n_max: usize,
    #[arg(long, env = "CHOREO_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LoadArgs {
    #[command(flatten)]
    tree: TreeArgs,
    /// Random topologies to compare on.
    #[arg(long, default_value_t = 50)]
    runs: u64,
    /// Messages per sender.
    #[arg(long, default_value_t = 30)]
    messages: u32,
    /// Rounds between two messages of one sender.
    #[arg(long, default_value_t = 10)]
    interval: u32,
    /// Packets a node may transmit per round; 0 for unlimited.
    #[arg(long, default_value_t = 10)]
    capacity: u32,
}

fn output(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => Ok(io::stdout().write_all(text.as_bytes())?),
    }
}

fn study(args: StudyArgs) -> Result<bool> {
    let scenarios = match args.th_max {
        Some(th) => vec![Scenario::random(
            &format!("custom-h{th}-in{}-n{}", args.in_max, args.n_max),
            th,
            args.in_max,
            args.n_max,
            None,
        )],
        None => Scenario::reference(),
    };
    let config = StudyConfig {
        n: args.n,
        radius: args.radius,
        runs: args.runs,
        seed: args.seed,
        scenarios,
    };
    let report = run_study(&config)?;
    match &args.out {
        Some(path) => emit_csv(&report, path).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{}", write_csv(&report)),
    }
    let mut ok = true;
    for s in &report.scenarios {
        let target = s.scenario.target_pct.map_or("-".to_string(), |t| format!("{t}%"));
        let verdict = match (s.within_tolerance(), s.dominance_violations) {
            (_, v) if v > 0 => "FAIL (dominance)",
            (Some(false), _) => "FAIL",
            (None, _) if s.runs == 0 => "FAIL (no runs)",
            _ => "ok",
        };
        ok &= verdict == "ok";
        eprintln!(
            "{:<14} ratio {:>3}% target {:>4}  attached {:.1}%  {verdict}",
            s.scenario.name,
            s.ratio_pct(),
            target,
            100.0 * s.attached_fraction
        );
    }
    Ok(ok)
}

fn closed_form(n: u64) -> Result<bool> {
    let (o, c) = (mu_orchestration(n)?, mu_choreography(n)?);
    let t = TreeTopology::chain(n as usize);
    let bo = all_pairs_stats(&t, Design::Orchestration)?.mean_exact();
    let bc = all_pairs_stats(&t, Design::Choreography)?.mean_exact();
    println!("n,mu_orchestration,mu_choreography,enumerated_orchestration,enumerated_choreography");
    println!("{n},{o},{c},{bo},{bc}");
    Ok(o == bo && c == bc)
}

fn tree_params(a: &TreeArgs) -> TopologyParams {
    TopologyParams {
        n: a.n,
        radius: a.radius,
        th_max: a.th_max,
        in_max: a.in_max,
        n_max: a.n_max,
        seed: a.seed,
    }
}

fn load(args: LoadArgs) -> Result<bool> {
    let p = tree_params(&args.tree);
    p.validate()?;
    let config = LoadStudyConfig {
        n: p.n,
        radius: p.radius,
        th_max: p.th_max,
        in_max: p.in_max,
        n_max: p.n_max,
        topologies: args.runs,
        messages: args.messages,
        interval: args.interval,
        capacity: Capacity::per_round(args.capacity).unwrap_or(Capacity::Unlimited),
        seed: p.seed,
    };
    let report = run_load_study(&config);
    let mut text = String::from("seed,design,sent,delivered,dropped,pdr,top_level,forwards_per_depth\n");
    for run in &report.runs {
        for r in [&run.orchestration, &run.choreography] {
            let forwards: Vec<String> = r.forwards_per_depth.iter().map(u64::to_string).collect();
            text.push_str(&format!(
                "{},{},{},{},{},{:.4},{},{}\n",
                run.seed,
                serde_json::to_value(r.design)?.as_str().unwrap_or_default(),
                r.sent,
                r.delivered,
                r.dropped,
                r.pdr,
                r.top_level_activity,
                forwards.join(" ")
            ));
        }
    }
    output(&args.tree.out, &text)?;
    let (top, pdr) = (report.top_level_fraction(), report.pdr_fraction());
    eprintln!(
        "depth-1 orchestration >= choreography: {:.1}% of runs",
        100.0 * top
    );
    eprintln!(
        "pdr choreography >= orchestration:     {:.1}% of runs",
        100.0 * pdr
    );
    Ok(top >= 0.95 && pdr >= 0.95)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Study(args) => study(args),
        Command::ClosedForm { n } => closed_form(n),
        Command::Load(args) => load(args),
        Command::Topology(args) => {
            let t = build_tree(&tree_params(&args))?;
            output(&args.out, &t.edge_list())?;
            Ok(true)
        }
        Command::Calibrate { n, runs, seed } => match calibrate_radius(n, runs, seed, &Scenario::reference())
        {
            Some(r) => {
                println!("{r:.2}");
                Ok(true)
            }
            None => bail!("no radius up to 1.0 attaches 95% of the nodes"),
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
