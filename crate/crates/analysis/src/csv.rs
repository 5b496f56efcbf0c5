use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::study::{ScenarioReport, StudyReport};

const HEADER: &str = "name,n,orch_mean,chor_mean,ratio_pct,runs";

/// Rounded to four decimals; always shows a decimal point.
fn mean(x: f64) -> String {
    format!("{:?}", (x * 1e4).round() / 1e4)
}

/// Summary table: one header row and one row per scenario.
pub fn write_csv(report: &StudyReport) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for s in &report.scenarios {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.scenario.name,
            s.n,
            mean(s.orch_mean()),
            mean(s.chor_mean()),
            s.ratio_pct(),
            s.runs
        );
    }
    out
}

fn histogram_csv(s: &ScenarioReport) -> String {
    let lengths: std::collections::BTreeSet<u32> = s
        .orchestration
        .histogram
        .keys()
        .chain(s.choreography.histogram.keys())
        .copied()
        .collect();
    let mut out = String::from("length,orchestration,choreography\n");
    for len in lengths {
        let count = |h: &std::collections::BTreeMap<u32, u64>| h.get(&len).copied().unwrap_or(0);
        let _ = writeln!(
            out,
            "{len},{},{}",
            count(&s.orchestration.histogram),
            count(&s.choreography.histogram)
        );
    }
    out
}

/// `dir/stem.csv` becomes `dir/stem.<scenario>.hist.csv`.
pub fn histogram_path(path: &Path, scenario: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("study");
    path.with_file_name(format!("{stem}.{scenario}.hist.csv"))
}

/// Writes the summary to `path` and one histogram file per scenario next
/// to it.
pub fn emit_csv(report: &StudyReport, path: &Path) -> io::Result<()> {
    fs::write(path, write_csv(report))?;
    for s in &report.scenarios {
        fs::write(histogram_path(path, &s.scenario.name), histogram_csv(s))?;
    }
    Ok(())
}
