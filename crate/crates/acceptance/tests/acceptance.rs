//! Runs every primary acceptance criterion and prints one line each.
//! Exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use acceptance::{chain_parents, counting_replay, mean_hops, pair_hops};
use analysis::{mu_choreography, mu_orchestration, run_load_study, run_study, LoadStudyConfig, StudyConfig};
use dlite::{Node, NodeKind, Rejection};
use netsim::{all_pairs_stats, path_length, Design, TreeTopology};
use num_rational::Ratio;
use salt::{parse_transducer, Message};
use salt_vm::Vm;
use serde_json::{json, Value};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

const STUDY_RUNS: u64 = 1000;
const STUDY_SEED: u64 = 1;

fn closed_forms() -> Outcome {
    let start = Instant::now();
    for n in 2..=200u64 {
        let (o, c) = mean_hops(&chain_parents(n as usize));
        ensure!(o == mu_orchestration(n).unwrap(), "n={n}: orchestration {o}");
        ensure!(c == mu_choreography(n).unwrap(), "n={n}: choreography {c}");
        let t = TreeTopology::chain(n as usize);
        let so = all_pairs_stats(&t, Design::Orchestration).unwrap().mean_exact();
        let sc = all_pairs_stats(&t, Design::Choreography).unwrap().mean_exact();
        ensure!(so == o && sc == c, "n={n}: simulator gives {so} and {sc}");
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    Ok(format!("n=2..200 exact, {elapsed:.2?}"))
}

fn star() -> Outcome {
    let report = run_study(&StudyConfig {
        scenarios: vec![analysis::Scenario::reference().remove(0)],
        ..StudyConfig::reference(10, STUDY_SEED)
    })
    .map_err(|e| e.to_string())?;
    let row = &report.scenarios[0];
    ensure!(row.scenario.name == "worst", "first row is {}", row.scenario.name);
    ensure!(row.ratio() == Ratio::from_integer(1), "ratio {}", row.ratio());
    let (o, c) = mean_hops(&[None, Some(0), Some(0), Some(0), Some(0)]);
    ensure!(o == c, "oracle star differs: {o} vs {c}");
    Ok(format!("ratio {}%, mean {}", row.ratio_pct(), row.orch_mean()))
}

fn reference_ratios() -> Outcome {
    let start = Instant::now();
    let config = StudyConfig::reference(STUDY_RUNS, STUDY_SEED);
    let report = run_study(&config).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for row in &report.scenarios {
        let target = row.scenario.target_pct.unwrap_or(0);
        rows.push(format!("{} {}%/{}%", row.scenario.name, row.ratio_pct(), target));
        if row.within_tolerance() == Some(false) {
            failures.push(format!(
                "{} at {}% vs {}%",
                row.scenario.name,
                row.ratio_pct(),
                target
            ));
        }
        if row.dominance_violations > 0 {
            failures.push(format!(
                "{}: {} dominance violations",
                row.scenario.name, row.dominance_violations
            ));
        }
    }

    // cross-check the simulator's path lengths against the oracle on a few
    // generated trees
    for scenario in &config.scenarios {
        for run in 0..5 {
            let t = scenario
                .topology(config.n, config.radius, analysis::run_seed(STUDY_SEED, run))
                .map_err(|e| e.to_string())?;
            let parents: Vec<Option<usize>> = (0..t.len()).map(|v| t.parent(v)).collect();
            for (i, j, o, c) in pair_hops(&parents) {
                let so = path_length(&t, i, j, Design::Orchestration).unwrap();
                let sc = path_length(&t, i, j, Design::Choreography).unwrap();
                ensure!(
                    (so, sc) == (o, c),
                    "{}: pair {i},{j} gives {so},{sc}, oracle {o},{c}",
                    scenario.name
                );
                ensure!(
                    c <= o,
                    "{}: pair {i},{j} direct {c} > via sink {o}",
                    scenario.name
                );
            }
        }
    }

    ensure!(failures.is_empty(), "{}", failures.join("; "));
    ensure!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    Ok(format!("{} ({STUDY_RUNS} runs, {elapsed:.1?})", rows.join(", ")))
}

fn example_tree() -> Outcome {
    let parents = [
        None,
        Some(0),
        Some(0),
        Some(0),
        Some(1),
        Some(1),
        Some(3),
        Some(2),
        Some(2),
        Some(2),
        Some(3),
        Some(6),
        Some(7),
        Some(7),
        Some(6),
        Some(3),
    ];
    let t = TreeTopology::from_parents(&parents);
    let c = path_length(&t, 9, 13, Design::Choreography).unwrap();
    let o = path_length(&t, 9, 13, Design::Orchestration).unwrap();
    let oracle = pair_hops(&parents)
        .into_iter()
        .find(|p| (p.0, p.1) == (9, 13))
        .unwrap();
    ensure!((c, o) == (3, 5), "choreography {c}, orchestration {o}");
    ensure!(
        (oracle.3, oracle.2) == (3, 5),
        "oracle gives {} and {}",
        oracle.3,
        oracle.2
    );
    Ok("9<->13: choreography 3 hops, orchestration 5 hops".into())
}

fn load() -> Outcome {
    let config = LoadStudyConfig::default();
    let report = run_load_study(&config);
    ensure!(
        report.runs.len() as u64 == config.topologies,
        "{} runs",
        report.runs.len()
    );
    for r in &report.runs {
        for rep in [&r.orchestration, &r.choreography] {
            ensure!(
                rep.delivered + rep.dropped == rep.sent,
                "seed {}: lost packets",
                r.seed
            );
        }
    }
    let top = report.top_level_fraction();
    let pdr = report.pdr_fraction();
    let mean =
        |f: fn(&analysis::LoadRun) -> f64| report.runs.iter().map(f).sum::<f64>() / report.runs.len() as f64;
    let detail = format!(
        "top-level {:.0}%, pdr {:.0}% of {} runs (mean pdr {:.2} vs {:.2})",
        100.0 * top,
        100.0 * pdr,
        report.runs.len(),
        mean(|r| r.orchestration.pdr),
        mean(|r| r.choreography.pdr)
    );
    ensure!(top >= 0.95 && pdr >= 0.95, "{detail}");
    Ok(detail)
}

fn counting_program(k: u32) -> String {
    format!(
        "x ?e/push !l/=(count,{}) counting\n\
         counting ?e/push !l/-=(count,1) counting\n\
         counting ?l/==(count,0) !e/reached !h/notify,OK etc",
        k - 1
    )
}

fn salt_conformance() -> Outcome {
    let push = Message::external("push").unwrap();
    let mut vm = Vm::new(parse_transducer(&counting_program(4)).unwrap())
        .unwrap()
        .0;
    for i in 1..=4 {
        let out = vm.step(&push).unwrap();
        let seen: Vec<String> = out.visible().map(|m| m.to_string()).collect();
        let expected: &[&str] = if i == 4 {
            &["e/reached", "h/notify,OK"]
        } else {
            &[]
        };
        ensure!(seen == expected, "push {i} emitted {seen:?}");
    }
    for k in 1..=20 {
        let mut vm = Vm::new(parse_transducer(&counting_program(k)).unwrap())
            .unwrap()
            .0;
        let actual: Vec<bool> = (0..30)
            .map(|_| vm.step(&push).unwrap().visible().any(|m| m.word == "reached"))
            .collect();
        ensure!(actual == counting_replay(k, 30), "k={k}: {actual:?}");
    }
    Ok("4 pushes emit reached + notify(OK) on the 4th; k=1..20 match replay".into())
}

fn lifecycle() -> Outcome {
    let rules = |n: usize| {
        (0..n)
            .map(|i| format!("s{i} ?e/push s{}", i + 1))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let subs = |n: usize| (0..n).map(|i| format!("n{i}")).collect::<Vec<String>>();
    let mut node = Node::new("c1", NodeKind::Notification.features()).unwrap();

    ensure!(node.put(&rules(50), vec![]).is_ok(), "50 rules rejected");
    ensure!(node.put(&rules(51), vec![]).is_err(), "51 rules accepted");
    ensure!(node.put(&rules(1), subs(20)).is_ok(), "20 subscribers rejected");
    ensure!(
        matches!(
            node.put(&rules(1), subs(21)),
            Err(Rejection::TooManySubscribers(21))
        ),
        "21 subscribers accepted"
    );

    node.put(&counting_program(4), subs(2)).unwrap();
    node.post(&Message::external("push").unwrap()).unwrap();
    let before = node.status();
    ensure!(node.put("a ?e/x", vec![]).is_err(), "bad program accepted");
    ensure!(node.status() == before, "rejected PUT changed the node");
    let (ack, _) = node
        .put(&counting_program(2), vec![])
        .map_err(|e| e.to_string())?;
    ensure!(ack.state.as_deref() == Some("x"), "re-PUT state {:?}", ack.state);
    ensure!(node.vm().unwrap().vars().is_empty(), "re-PUT kept variables");

    let described = node.describe();
    let first = node.delete();
    let second = node.delete();
    ensure!(first == second, "DELETE is not idempotent");
    ensure!(!node.is_programmed(), "DELETE left a behaviour");
    ensure!(node.describe() == described, "DELETE changed the descriptor");
    ensure!(
        node.post(&Message::external("push").unwrap()).is_err(),
        "POST after DELETE accepted"
    );
    Ok("50/51 rules, 20/21 subscribers, atomic re-PUT, idempotent DELETE".into())
}

const BUTTON: &str = "idle ?h/push !e/push idle";
const LAMP: &str = "off ?e/push !h/led,on on\non ?e/push !h/led,off off";
const COUNTER: &str = "x ?e/push !l/=(count,2) counting\n\
                       counting ?e/push !l/-=(count,1) counting\n\
                       counting ?l/==(count,0) !h/led,on lit";

async fn end_to_end_session() -> Outcome {
    let config = gateway::Config {
        listen: "127.0.0.1:0".parse().unwrap(),
        paused: true,
        ..Default::default()
    };
    let gw = gateway::spawn(&config).await.map_err(|e| e.to_string())?;
    let http = reqwest::Client::new();
    let call = |method: reqwest::Method, path: String, body: Value| {
        let req = http.request(method, gw.url(&path)).json(&body);
        async move {
            let resp = req.send().await.map_err(|e| e.to_string())?;
            let status = resp.status().as_u16();
            let body: Value = resp.json().await.map_err(|e| e.to_string())?;
            Ok::<_, String>((status, body))
        }
    };
    use reqwest::Method;

    for (kind, id) in [("button", "button"), ("led", "lamp"), ("led", "counter")] {
        let (status, _) = call(Method::POST, "/nodes".into(), json!({"kind": kind, "id": id})).await?;
        ensure!(status == 201, "creating {id}: {status}");
    }
    for (id, program, subs) in [
        ("button", BUTTON, vec!["lamp", "counter"]),
        ("lamp", LAMP, vec![]),
        ("counter", COUNTER, vec![]),
    ] {
        let (status, body) = call(
            Method::PUT,
            format!("/nodes/{id}"),
            json!({"program": program, "subscribers": subs}),
        )
        .await?;
        ensure!(status == 200, "PUT {id}: {status} {body}");
    }

    let mut lamp = Vec::new();
    let mut counter = Vec::new();
    for i in 1..=3 {
        let (status, body) = call(Method::POST, "/nodes/button/sensors/push".into(), json!({})).await?;
        ensure!(status == 200, "push {i}: {status} {body}");
        let state = |id: &'static str| call(Method::GET, format!("/nodes/{id}/state"), Value::Null);
        lamp.push(state("lamp").await?.1["state"].as_str().unwrap_or("").to_string());
        counter.push(
            state("counter").await?.1["state"]
                .as_str()
                .unwrap_or("")
                .to_string(),
        );
    }
    ensure!(lamp == ["on", "off", "on"], "lamp states {lamp:?}");
    ensure!(
        counter == ["counting", "counting", "lit"],
        "counter states {counter:?}"
    );
    let (_, status) = call(Method::GET, "/nodes/counter/state".into(), Value::Null).await?;
    ensure!(
        status["hardware_log"] == json!([{"kind": "h", "word": "led", "args": ["on"]}]),
        "counter log {}",
        status["hardware_log"]
    );
    gw.shutdown().await.map_err(|e| e.to_string())?;
    Ok("button -> lamp + counter over HTTP: lamp on/off/on, counter lit on 3rd push".into())
}

fn end_to_end() -> Outcome {
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .unwrap();
    rt.block_on(end_to_end_session())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("closed-form chain means", closed_forms),
        ("star topology ratio", star),
        ("path-length ratio table", reference_ratios),
        ("example tree path", example_tree),
        ("load properties", load),
        ("SALT counting conformance", salt_conformance),
        ("node lifecycle", lifecycle),
        ("three-node chain over HTTP", end_to_end),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
