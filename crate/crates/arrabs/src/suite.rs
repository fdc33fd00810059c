//! Suite runner: transforms and verifies a directory of programs,
//! classifies each verdict against an expectation, and aggregates the
//! five result categories.

use crate::bmc::{
    classify_tool_run, prepare_input, run_tool, BmcConfig, BmcStatus, ToolRun, VerifyMode,
};
use crate::interp::{run_original, RunStatus};
use crate::parser::parse;
use crate::precision::classify_precision;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Expected {
    Safe,
    Unsafe,
}

impl std::fmt::Display for Expected {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expected::Safe => write!(f, "safe"),
            Expected::Unsafe => write!(f, "unsafe"),
        }
    }
}

/// The five result categories.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Category {
    CorrectTrue,
    CorrectFalse,
    IncorrectTrue,
    IncorrectFalse,
    NoResult,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteRow {
    pub name: String,
    pub expected: Option<Expected>,
    pub verdict: Option<BmcStatus>,
    pub seconds: f64,
    pub precise: bool,
    pub category: Category,
    pub note: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteCounts {
    pub programs: usize,
    pub correct_true: usize,
    pub correct_false: usize,
    pub incorrect_true: usize,
    pub incorrect_false: usize,
    pub no_result: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteReport {
    pub rows: Vec<SuiteRow>,
    pub counts: SuiteCounts,
}

impl SuiteReport {
    pub fn csv(&self) -> String {
        let mut out = String::from("name,expected,verdict,seconds,precise\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:.3},{}\n",
                r.name,
                r.expected.map(|e| e.to_string()).unwrap_or_default(),
                r.verdict.map(|v| v.to_string()).unwrap_or_default(),
                r.seconds,
                r.precise
            ));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub bmc: BmcConfig,
    pub jobs: usize,
    /// Interpreter budget for deriving expectations when the manifest has
    /// no entry; 0 disables the oracle fallback.
    pub oracle_fuel: u64,
    /// Read recorded tool runs instead of executing the tool.
    pub replay_dir: Option<PathBuf>,
    /// Record tool runs for later replay.
    pub record_dir: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            bmc: BmcConfig::default(),
            jobs: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            oracle_fuel: 1_000_000,
            replay_dir: None,
            record_dir: None,
        }
    }
}

/// Parses a two-column expectation manifest: `<program-name> safe|unsafe`
/// per line, `#` comments allowed.
pub fn parse_manifest(text: &str) -> BTreeMap<String, Expected> {
    let mut map = BTreeMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        if let (Some(name), Some(kind)) = (parts.next(), parts.next()) {
            let expected = match kind {
                "safe" | "true" => Some(Expected::Safe),
                "unsafe" | "false" => Some(Expected::Unsafe),
                _ => None,
            };
            if let Some(e) = expected {
                map.insert(name.to_string(), e);
            }
        }
    }
    map
}

/// Transforms and verifies every program in the directory, classifying
/// each verdict against the manifest (or, failing that, a concrete run of
/// the original). Per-program errors become no-result rows; the suite
/// continues.
pub fn run_suite(
    dir: &Path,
    config: &SuiteConfig,
    expectations: &BTreeMap<String, Expected>,
) -> std::io::Result<SuiteReport> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .map(|n| !n.starts_with('.'))
                .unwrap_or(false)
        })
        .collect();
    files.sort();

    let next = Mutex::new(0usize);
    let rows: Mutex<Vec<Option<SuiteRow>>> = Mutex::new(vec![None; files.len()]);
    let workers = config.jobs.clamp(1, files.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = {
                    let mut n = next.lock().unwrap();
                    if *n >= files.len() {
                        return;
                    }
                    let i = *n;
                    *n += 1;
                    i
                };
                let row = process_one(&files[idx], config, expectations);
                rows.lock().unwrap()[idx] = Some(row);
            });
        }
    });

    let rows: Vec<SuiteRow> = rows
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every file produces a row"))
        .collect();

    let mut counts = SuiteCounts {
        programs: rows.len(),
        ..SuiteCounts::default()
    };
    for r in &rows {
        match r.category {
            Category::CorrectTrue => counts.correct_true += 1,
            Category::CorrectFalse => counts.correct_false += 1,
            Category::IncorrectTrue => counts.incorrect_true += 1,
            Category::IncorrectFalse => counts.incorrect_false += 1,
            Category::NoResult => counts.no_result += 1,
        }
    }
    Ok(SuiteReport { rows, counts })
}

fn process_one(
    path: &Path,
    config: &SuiteConfig,
    expectations: &BTreeMap<String, Expected>,
) -> SuiteRow {
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("<unnamed>")
        .to_string();

    let no_result = |expected: Option<Expected>, note: String| SuiteRow {
        name: name.clone(),
        expected,
        verdict: None,
        seconds: 0.0,
        precise: false,
        category: Category::NoResult,
        note,
    };

    let source = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => return no_result(expectations.get(&name).copied(), format!("read error: {e}")),
    };
    let program = match parse(&source) {
        Ok(p) => p,
        Err(diags) => {
            return no_result(
                expectations.get(&name).copied(),
                format!("parse error: {}", diags[0]),
            )
        }
    };

    let expected = expectations.get(&name).copied().or_else(|| {
        if config.oracle_fuel == 0 {
            return None;
        }
        match run_original(&program, config.oracle_fuel).status {
            RunStatus::AllPass => Some(Expected::Safe),
            RunStatus::AssertFailed { .. } => Some(Expected::Unsafe),
            RunStatus::Inconclusive { .. } => None,
        }
    });

    let precise = classify_precision(&program).all_qualify();
    let text = match prepare_input(&program, &config.bmc, VerifyMode::Transformed) {
        Ok(t) => t,
        Err(e) => return no_result(expected, format!("transform error: {e}")),
    };

    let run: ToolRun = if let Some(replay) = &config.replay_dir {
        match read_recorded(replay, &name) {
            Ok(r) => r,
            Err(e) => return no_result(expected, format!("replay error: {e}")),
        }
    } else {
        let run = run_tool(&text, &config.bmc);
        if let Some(record) = &config.record_dir {
            let _ = write_recorded(record, &name, &run);
        }
        run
    };

    let verdict = classify_tool_run(&run, &config.bmc, precise);
    let category = match (expected, verdict.status) {
        (Some(Expected::Safe), BmcStatus::Safe) => Category::CorrectTrue,
        (Some(Expected::Unsafe), BmcStatus::Unsafe) => Category::CorrectFalse,
        (Some(Expected::Unsafe), BmcStatus::Safe) => Category::IncorrectTrue,
        (Some(Expected::Safe), BmcStatus::Unsafe) => Category::IncorrectFalse,
        _ => Category::NoResult,
    };
    SuiteRow {
        name,
        expected,
        verdict: Some(verdict.status),
        seconds: verdict.seconds,
        precise,
        category,
        note: String::new(),
    }
}

fn recorded_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("{name}.run.json"))
}

fn write_recorded(dir: &Path, name: &str, run: &ToolRun) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(run).expect("tool run serializes");
    std::fs::write(recorded_path(dir, name), json)
}

fn read_recorded(dir: &Path, name: &str) -> Result<ToolRun, String> {
    let path = recorded_path(dir, name);
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn echo_suite_config(message: &str) -> SuiteConfig {
        SuiteConfig {
            bmc: BmcConfig {
                command: vec![
                    "sh".to_string(),
                    "-c".to_string(),
                    format!("cat {{file}} > /dev/null; echo {message}"),
                ],
                timeout_secs: 10,
                ..BmcConfig::default()
            },
            jobs: 2,
            ..SuiteConfig::default()
        }
    }

    fn toy_corpus(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("arrabs-suite-{}-{tag}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        std::fs::create_dir_all(&dir).unwrap();
        for k in 0..5 {
            std::fs::write(
                dir.join(format!("safe{k}.c")),
                format!("int a[{n}]; int i;\nmain() {{ for (i = 0; i < {n}; i++) {{ a[i] = i; assert(a[i] == i); }} }}\n", n = k + 2),
            )
            .unwrap();
        }
        for k in 0..4 {
            std::fs::write(
                dir.join(format!("unsafe{k}.c")),
                format!("int a[{n}]; int i;\nmain() {{ for (i = 0; i < {n}; i++) {{ a[i] = i; }} for (i = 0; i < {n}; i++) {{ assert(a[i] == 0); }} }}\n", n = k + 2),
            )
            .unwrap();
        }
        std::fs::write(dir.join("broken.c"), "int while while").unwrap();
        dir
    }

    #[test]
    fn counts_sum_to_program_total() {
        let dir = toy_corpus("sum");
        let report = run_suite(&dir, &echo_suite_config("VERIFICATION SUCCESSFUL"), &BTreeMap::new())
            .expect("runs");
        let c = &report.counts;
        assert_eq!(c.programs, 10);
        assert_eq!(
            c.correct_true + c.correct_false + c.incorrect_true + c.incorrect_false + c.no_result,
            c.programs
        );
        // The unparseable file is exactly one no-result row.
        assert_eq!(
            report
                .rows
                .iter()
                .filter(|r| r.category == Category::NoResult)
                .count(),
            1
        );
        let _ = std::fs::remove_dir_all(dir);
    }

    #[test]
    fn manifest_expectations_drive_categories() {
        let dir = toy_corpus("manifest");
        let mut manifest = BTreeMap::new();
        for k in 0..5 {
            manifest.insert(format!("safe{k}.c"), Expected::Safe);
        }
        for k in 0..4 {
            manifest.insert(format!("unsafe{k}.c"), Expected::Unsafe);
        }
        // Tool says everything fails: safe programs become incorrect-false
        // (false alarms), unsafe ones correct-false.
        let report = run_suite(&dir, &echo_suite_config("VERIFICATION FAILED"), &manifest)
            .expect("runs");
        assert_eq!(report.counts.incorrect_false, 5);
        assert_eq!(report.counts.correct_false, 4);
        let _ = std::fs::remove_dir_all(dir);
    }

    #[test]
    fn oracle_fallback_supplies_expectations() {
        let dir = toy_corpus("oracle");
        let report = run_suite(&dir, &echo_suite_config("VERIFICATION SUCCESSFUL"), &BTreeMap::new())
            .expect("runs");
        // Tool says safe everywhere; oracle marks unsafe programs, so
        // those become incorrect-true.
        assert_eq!(report.counts.correct_true, 5);
        assert_eq!(report.counts.incorrect_true, 4);
        let _ = std::fs::remove_dir_all(dir);
    }

    #[test]
    fn replay_reproduces_reports_byte_for_byte() {
        let dir = toy_corpus("replay");
        let record = dir.join("recordings");
        let mut config = echo_suite_config("VERIFICATION SUCCESSFUL");
        config.record_dir = Some(record.clone());
        let live = run_suite(&dir, &config, &BTreeMap::new()).expect("runs");

        let mut config = echo_suite_config("VERIFICATION SUCCESSFUL");
        config.replay_dir = Some(record.clone());
        let replayed = run_suite(&dir, &config, &BTreeMap::new()).expect("replays");
        // The recordings directory itself must not be picked up as input.
        assert_eq!(live.csv(), replayed.csv());
        let _ = std::fs::remove_dir_all(dir);
    }

    #[test]
    fn csv_has_the_documented_header() {
        let report = SuiteReport::default();
        assert!(report.csv().starts_with("name,expected,verdict,seconds,precise\n"));
    }
}
