//! Driving an external bounded model checker on a program.
//!
//! The tool is configured as a command template with a `{file}`
//! placeholder, a timeout, and output markers mapping tool output to a
//! verdict. For transformed programs a prelude defining the nondet
//! helpers is prepended; the nd call names used in emission are part of
//! the configuration so the emitted text and the prelude always agree.

use crate::parser::parse;
use crate::precision::classify_precision;
use crate::printer::{emit_with, EmitConfig};
use crate::transform::{transform_program, TransformConfig};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::Mutex;
use std::time::{Duration, Instant};
use thiserror::Error;

/// Prelude for CBMC-compatible checkers: an undefined function is a
/// nondeterministic value; ranges are enforced with `__CPROVER_assume`.
pub const CBMC_PRELUDE: &str = "\
#include <assert.h>
int nd_any();
void __CPROVER_assume(int cond);
int nd_in(int lo, int hi) { int x = nd_any(); __CPROVER_assume(lo <= x && x <= hi); return x; }
";

/// Prelude for plain compilation and smoke runs; pseudo-random, never
/// used to derive verdicts.
pub const STUB_PRELUDE: &str = "\
#include <assert.h>
#include <stdlib.h>
static int nd_any() { return rand(); }
static int nd_in(int lo, int hi) { return lo + rand() % (hi - lo + 1); }
";

#[derive(Clone, Debug)]
pub struct BmcConfig {
    /// Command and arguments; exactly one argument contains `{file}`.
    pub command: Vec<String>,
    pub timeout_secs: u64,
    /// Extra time a process may take to die after the timeout fires.
    pub grace_secs: u64,
    pub success_markers: Vec<String>,
    pub failure_markers: Vec<String>,
    pub prelude: String,
    /// Names for `nd()` / `nd(l,u)` in tool-facing output; must match the
    /// prelude.
    pub nd_names: (String, String),
}

impl Default for BmcConfig {
    fn default() -> Self {
        BmcConfig {
            command: vec!["cbmc".to_string(), "{file}".to_string()],
            timeout_secs: 30,
            grace_secs: 2,
            success_markers: vec!["VERIFICATION SUCCESSFUL".to_string()],
            failure_markers: vec!["VERIFICATION FAILED".to_string()],
            prelude: CBMC_PRELUDE.to_string(),
            nd_names: ("nd_any".to_string(), "nd_in".to_string()),
        }
    }
}

impl BmcConfig {
    /// Builds a config from a shell-ish command string containing a
    /// `{file}` placeholder (appended when missing). Single and double
    /// quotes group words.
    pub fn from_command(command: &str, timeout_secs: u64) -> BmcConfig {
        let mut parts = split_command(command);
        if !parts.iter().any(|p| p.contains("{file}")) {
            parts.push("{file}".to_string());
        }
        BmcConfig {
            command: parts,
            timeout_secs,
            ..BmcConfig::default()
        }
    }

    /// Reads the `ARRABS_BMC` environment variable as a command override.
    pub fn from_env() -> Option<BmcConfig> {
        std::env::var("ARRABS_BMC")
            .ok()
            .filter(|s| !s.trim().is_empty())
            .map(|cmd| BmcConfig::from_command(&cmd, 30))
    }

    pub fn emit_config(&self) -> EmitConfig {
        EmitConfig::with_names(&self.nd_names.0, &self.nd_names.1)
    }
}

/// Splits a command line on whitespace, honoring single and double
/// quotes.
fn split_command(command: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut current = String::new();
    let mut quote: Option<char> = None;
    let mut pending = false;
    for c in command.chars() {
        match quote {
            Some(q) if c == q => quote = None,
            Some(_) => current.push(c),
            None => match c {
                '\'' | '"' => {
                    quote = Some(c);
                    pending = true;
                }
                c if c.is_whitespace() => {
                    if pending || !current.is_empty() {
                        parts.push(std::mem::take(&mut current));
                        pending = false;
                    }
                }
                c => current.push(c),
            },
        }
    }
    if pending || !current.is_empty() {
        parts.push(current);
    }
    parts
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum BmcStatus {
    Safe,
    Unsafe,
    Timeout,
    ToolError,
}

impl std::fmt::Display for BmcStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            BmcStatus::Safe => "safe",
            BmcStatus::Unsafe => "unsafe",
            BmcStatus::Timeout => "timeout",
            BmcStatus::ToolError => "tool-error",
        };
        write!(f, "{s}")
    }
}

/// Outcome of one tool run on one program.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub status: BmcStatus,
    pub seconds: f64,
    /// Every assertion qualifies under the precision rules: a safe
    /// verdict is sound for the original either way, but an unsafe
    /// verdict is a confirmed alarm only when this is set.
    pub precise: bool,
    pub output_excerpt: String,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VerifyMode {
    Transformed,
    Original,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot read `{0}`: {1}")]
    Io(PathBuf, String),
    #[error("`{0}` does not parse: {1}")]
    Parse(PathBuf, String),
    #[error("transformation failed: {0}")]
    Transform(String),
}

/// Raw result of executing the external tool once.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ToolRun {
    pub output: String,
    pub seconds: f64,
    pub timed_out: bool,
    pub spawn_error: Option<String>,
}

/// Prepares the tool-facing text for a program: transformed and
/// prelude-prefixed, or the original as-is.
pub fn prepare_input(
    program: &crate::ast::Program,
    cfg: &BmcConfig,
    mode: VerifyMode,
) -> Result<String, HarnessError> {
    match mode {
        VerifyMode::Original => {
            // The original contains no nd calls; only assert needs a
            // declaration.
            Ok(format!(
                "#include <assert.h>\n{}",
                emit_with(program, &EmitConfig::default())
            ))
        }
        VerifyMode::Transformed => {
            let (transformed, _) = transform_program(program, &TransformConfig::default())
                .map_err(|e| HarnessError::Transform(e.to_string()))?;
            Ok(format!(
                "{}{}",
                cfg.prelude,
                emit_with(&transformed, &cfg.emit_config())
            ))
        }
    }
}

/// Runs the external checker on a program file and maps its output to a
/// verdict. In transformed mode the program is rewritten first and the
/// nd prelude prepended.
pub fn verify_with_bmc(file: &Path, cfg: &BmcConfig, mode: VerifyMode) -> Result<Verdict, HarnessError> {
    let source = std::fs::read_to_string(file)
        .map_err(|e| HarnessError::Io(file.to_path_buf(), e.to_string()))?;
    let program =
        parse(&source).map_err(|e| HarnessError::Parse(file.to_path_buf(), e[0].to_string()))?;
    let precise = classify_precision(&program).all_qualify();
    let text = prepare_input(&program, cfg, mode)?;
    let run = run_tool(&text, cfg);
    Ok(classify_tool_run(&run, cfg, precise))
}

/// Maps a tool run to a verdict using the configured markers.
pub fn classify_tool_run(run: &ToolRun, cfg: &BmcConfig, precise: bool) -> Verdict {
    let status = if run.spawn_error.is_some() {
        BmcStatus::ToolError
    } else if run.timed_out {
        BmcStatus::Timeout
    } else if cfg.success_markers.iter().any(|m| run.output.contains(m)) {
        BmcStatus::Safe
    } else if cfg.failure_markers.iter().any(|m| run.output.contains(m)) {
        BmcStatus::Unsafe
    } else {
        BmcStatus::ToolError
    };
    let excerpt: String = run
        .spawn_error
        .clone()
        .unwrap_or_else(|| run.output.chars().rev().take(400).collect::<Vec<_>>().iter().rev().collect());
    Verdict {
        status,
        seconds: run.seconds,
        precise,
        output_excerpt: excerpt,
    }
}

/// Writes the text to a scratch file and runs the configured command on
/// it, killing the process when the timeout fires.
pub fn run_tool(text: &str, cfg: &BmcConfig) -> ToolRun {
    let path = scratch_path();
    if let Err(e) = std::fs::File::create(&path).and_then(|mut f| f.write_all(text.as_bytes())) {
        return ToolRun {
            output: String::new(),
            seconds: 0.0,
            timed_out: false,
            spawn_error: Some(format!("cannot write scratch file: {e}")),
        };
    }
    let run = run_tool_on_file(&path, cfg);
    let _ = std::fs::remove_file(&path);
    run
}

fn scratch_path() -> PathBuf {
    use std::sync::atomic::{AtomicU64, Ordering};
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    let n = COUNTER.fetch_add(1, Ordering::Relaxed);
    std::env::temp_dir().join(format!(
        "arrabs-{}-{}.c",
        std::process::id(),
        n
    ))
}

pub fn run_tool_on_file(path: &Path, cfg: &BmcConfig) -> ToolRun {
    let args: Vec<String> = cfg
        .command
        .iter()
        .map(|a| a.replace("{file}", &path.display().to_string()))
        .collect();
    let (exe, rest) = match args.split_first() {
        Some(x) => x,
        None => {
            return ToolRun {
                output: String::new(),
                seconds: 0.0,
                timed_out: false,
                spawn_error: Some("empty command".to_string()),
            }
        }
    };

    let start = Instant::now();
    let child = Command::new(exe)
        .args(rest)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn();
    let mut child = match child {
        Ok(c) => c,
        Err(e) => {
            return ToolRun {
                output: String::new(),
                seconds: 0.0,
                timed_out: false,
                spawn_error: Some(format!("cannot run `{exe}`: {e}")),
            }
        }
    };

    // Drain the pipes on detached threads: a tool that fills the pipe
    // buffer must not stall try_wait, and a killed tool's orphaned
    // children may keep the pipe open past the timeout.
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;
    let buffer: Arc<Mutex<String>> = Arc::new(Mutex::new(String::new()));
    let finished = Arc::new(AtomicUsize::new(0));
    let mut readers = 0usize;
    for pipe in [
        child.stdout.take().map(|p| Box::new(p) as Box<dyn std::io::Read + Send>),
        child.stderr.take().map(|p| Box::new(p) as Box<dyn std::io::Read + Send>),
    ]
    .into_iter()
    .flatten()
    {
        readers += 1;
        let buffer = Arc::clone(&buffer);
        let finished = Arc::clone(&finished);
        std::thread::spawn(move || {
            let mut pipe = pipe;
            let mut s = String::new();
            let _ = pipe.read_to_string(&mut s);
            buffer.lock().unwrap().push_str(&s);
            finished.fetch_add(1, Ordering::SeqCst);
        });
    }

    let deadline = Duration::from_secs(cfg.timeout_secs);
    let mut timed_out = false;
    loop {
        match child.try_wait() {
            Ok(Some(_)) => break,
            Ok(None) => {
                if start.elapsed() >= deadline {
                    timed_out = true;
                    let _ = child.kill();
                    let _ = child.wait();
                    break;
                }
                std::thread::sleep(Duration::from_millis(20));
            }
            Err(e) => {
                return ToolRun {
                    output: String::new(),
                    seconds: start.elapsed().as_secs_f64(),
                    timed_out: false,
                    spawn_error: Some(format!("wait failed: {e}")),
                }
            }
        }
    }
    let seconds = start.elapsed().as_secs_f64();

    // Give the readers a moment to reach EOF; leave them detached if
    // something downstream still holds the pipe.
    let reader_deadline = Instant::now() + Duration::from_millis(500.max(cfg.grace_secs * 200));
    while finished.load(Ordering::SeqCst) < readers && Instant::now() < reader_deadline {
        std::thread::sleep(Duration::from_millis(10));
    }
    let output = buffer.lock().unwrap().clone();
    ToolRun {
        output,
        seconds,
        timed_out,
        spawn_error: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn echo_config(message: &str) -> BmcConfig {
        BmcConfig {
            command: vec![
                "sh".to_string(),
                "-c".to_string(),
                format!("cat {{file}} > /dev/null; echo {message}"),
            ],
            timeout_secs: 10,
            ..BmcConfig::default()
        }
    }

    fn write_temp(name: &str, text: &str) -> PathBuf {
        let path = std::env::temp_dir().join(format!("arrabs-test-{}-{name}", std::process::id()));
        std::fs::write(&path, text).unwrap();
        path
    }

    #[test]
    fn command_splitting_honors_quotes() {
        let cfg = BmcConfig::from_command(
            "sh -c 'cat {file} > /dev/null; echo OK'",
            10,
        );
        assert_eq!(cfg.command.len(), 3);
        assert_eq!(cfg.command[1], "-c");
        assert_eq!(cfg.command[2], "cat {file} > /dev/null; echo OK");

        let cfg = BmcConfig::from_command("cbmc --unwind 2", 10);
        assert_eq!(cfg.command.last().unwrap(), "{file}");
    }

    #[test]
    fn success_marker_maps_to_safe() {
        let file = write_temp("safe.c", "int x; main() { x = 1; assert(x == 1); }");
        let v = verify_with_bmc(&file, &echo_config("VERIFICATION SUCCESSFUL"), VerifyMode::Transformed)
            .expect("runs");
        assert_eq!(v.status, BmcStatus::Safe);
        let _ = std::fs::remove_file(file);
    }

    #[test]
    fn failure_marker_maps_to_unsafe_with_precision_flag() {
        // Non-qualifying program (assertion outside any loop): an unsafe
        // verdict is possibly a false alarm.
        let file = write_temp("unsafe.c", "int x; main() { assert(x == 1); }");
        let v = verify_with_bmc(&file, &echo_config("VERIFICATION FAILED"), VerifyMode::Transformed)
            .expect("runs");
        assert_eq!(v.status, BmcStatus::Unsafe);
        assert!(!v.precise);
        let _ = std::fs::remove_file(file);
    }

    #[test]
    fn missing_tool_is_a_tool_error() {
        let file = write_temp("t.c", "int x; main() { assert(1); }");
        let cfg = BmcConfig {
            command: vec!["arrabs-no-such-tool".to_string(), "{file}".to_string()],
            ..BmcConfig::default()
        };
        let v = verify_with_bmc(&file, &cfg, VerifyMode::Transformed).expect("runs");
        assert_eq!(v.status, BmcStatus::ToolError);
        let _ = std::fs::remove_file(file);
    }

    #[test]
    fn timeout_is_contained() {
        let file = write_temp("slow.c", "int x; main() { assert(1); }");
        let cfg = BmcConfig {
            command: vec!["sh".to_string(), "-c".to_string(), "sleep 30 # {file}".to_string()],
            timeout_secs: 1,
            grace_secs: 2,
            ..BmcConfig::default()
        };
        let start = Instant::now();
        let v = verify_with_bmc(&file, &cfg, VerifyMode::Transformed).expect("runs");
        assert_eq!(v.status, BmcStatus::Timeout);
        assert!(start.elapsed() < Duration::from_secs(cfg.timeout_secs + cfg.grace_secs));
        let _ = std::fs::remove_file(file);
    }

    #[test]
    fn prepared_transformed_input_carries_prelude_and_renamed_nd() {
        let program = crate::parser::parse(
            "int a[4]; int i; main() { for (i = 0; i < 4; i++) { a[i] = i; assert(a[i] == i); } }",
        )
        .unwrap();
        let cfg = BmcConfig::default();
        let text = prepare_input(&program, &cfg, VerifyMode::Transformed).unwrap();
        assert!(text.starts_with("#include <assert.h>"));
        assert!(text.contains("__CPROVER_assume"));
        assert!(text.contains("nd_in(0, 3)"));
        assert!(!text.contains(" nd("));
    }
}
