//! Differential checks between a program and its transform, run concretely
//! on small instances.
//!
//! Soundness: when the original's unique execution violates an assertion,
//! some resolution of the transformed program's nondeterminism violates
//! the same assertion. Precision: when every assertion qualifies and the
//! original passes, every resolution passes. Represents: every original
//! state at an assert point, paired with every index choice, is covered by
//! some transformed state whose witness pair mirrors the chosen cell.

use crate::analysis::{array_inventory, lastof, loopdefs};
use crate::ast::*;
use crate::enumerate::{enumerate_with, enumeration_size, NdPolicy};
use crate::interp::{InterpConfig, Interpreter, MemLayout, NdSites, RunStatus};
use crate::precision::classify_precision;
use crate::printer::{emit, emit_with, EmitConfig};
use crate::transform::{transform_program, TransformConfig, WitnessPair};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Property {
    Soundness,
    Precision,
    Represents,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum VerdictStatus {
    Holds,
    Violated,
    /// The check could not run to completion (unbounded original run,
    /// enumeration cap, oversized state).
    Inconclusive,
    /// The program is outside the class the property speaks about.
    OutOfClass,
}

/// A replayable witness that a differential property failed.
#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub original_source: String,
    pub transformed_source: String,
    /// One value per nd site, in site order; absent when the
    /// counterexample is the absence of any failing resolution.
    pub nd_assignment: Option<Vec<i64>>,
    pub original_status: RunStatus,
    pub transformed_status: Option<RunStatus>,
    /// Initial value of array cells and witness variables for the runs.
    pub array_default: i64,
    pub witness_value_vars: Vec<String>,
    pub detail: String,
}

impl Counterexample {
    /// Re-executes both sides and returns the observed statuses; they must
    /// match the recorded ones.
    pub fn replay(&self, opts: &OracleOpts) -> Result<(RunStatus, Option<RunStatus>), String> {
        let original = crate::parser::parse(&self.original_source)
            .map_err(|e| format!("original does not parse: {}", e[0]))?;
        let orig_status =
            crate::interp::run_original_with(&original, opts.fuel, self.array_default).status;

        let trans_status = match &self.nd_assignment {
            None => None,
            Some(values) => {
                let transformed = crate::parser::parse_transformed(&self.transformed_source)
                    .map_err(|e| format!("transformed does not parse: {}", e[0]))?;
                let config = InterpConfig {
                    fuel: opts.fuel,
                    uninit_array: self.array_default,
                    array_default_vars: self.witness_value_vars.iter().cloned().collect(),
                    int_width: opts.int_width,
                    ..InterpConfig::default()
                };
                let interp = Interpreter::new(&transformed, config)?;
                if interp.sites.len() != values.len() {
                    return Err("nd assignment does not match the program's sites".to_string());
                }
                Some(interp.run(values).status)
            }
        };
        Ok((orig_status, trans_status))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DiffVerdict {
    pub property: Property,
    pub status: VerdictStatus,
    pub detail: String,
    /// Transformed executions performed across all enumerations.
    pub executions: u64,
    pub counterexample: Option<Counterexample>,
}

impl DiffVerdict {
    pub fn holds(&self) -> bool {
        self.status == VerdictStatus::Holds
    }

    fn simple(property: Property, status: VerdictStatus, detail: impl Into<String>) -> Self {
        DiffVerdict {
            property,
            status,
            detail: detail.into(),
            executions: 0,
            counterexample: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OracleOpts {
    pub fuel: u64,
    pub exec_cap: u64,
    pub range_cap: usize,
    pub int_width: u32,
}

impl Default for OracleOpts {
    fn default() -> Self {
        OracleOpts {
            fuel: 200_000,
            exec_cap: 100_000,
            range_cap: 64,
            int_width: 32,
        }
    }
}

fn program_constants(program: &Program) -> BTreeSet<i64> {
    let mut consts = BTreeSet::new();
    visit_exprs(&program.body, &mut |e| {
        if let Expr::Const { value, .. } = e {
            consts.insert(*value);
        }
    });
    consts
}

/// Base value set: observed values first (they make replaying the original
/// run reachable early in enumeration order), then small probes, program
/// constants and the type maximum.
fn policy_base(program: &Program, observed: &BTreeSet<i64>, opts: &OracleOpts) -> Vec<i64> {
    let mut base = Vec::new();
    let mut seen = BTreeSet::new();
    let mut push = |v: i64, base: &mut Vec<i64>| {
        if seen.insert(v) {
            base.push(v);
        }
    };
    for &v in observed {
        push(v, &mut base);
    }
    push(0, &mut base);
    push(1, &mut base);
    for v in program_constants(program) {
        push(v, &mut base);
    }
    push((1i64 << (opts.int_width - 1)) - 1, &mut base);
    base
}

/// Site indices of the witness-index initializations in a transformed
/// program; these always enumerate their full index range.
fn witness_site_overrides(
    transformed: &Program,
    pairs: &[WitnessPair],
    policy: &mut NdPolicy,
) {
    let sites = NdSites::collect(transformed);
    let index_vars: BTreeSet<&str> = pairs.iter().map(|p| p.index_var.as_str()).collect();
    visit_stmts(&transformed.body, &mut |s| {
        if let Stmt::Assign {
            target: Lval::Var { name, .. },
            value: value @ Expr::NdRange { lo, hi, .. },
            ..
        } = s
        {
            if index_vars.contains(name.as_str()) {
                if let Some(id) = sites.id_of(value) {
                    policy.overrides.insert(id, (*lo..=*hi).collect());
                }
            }
        }
    });
}

fn transformed_interp_config(pairs: &[WitnessPair], array_default: i64, opts: &OracleOpts) -> InterpConfig {
    InterpConfig {
        int_width: opts.int_width,
        uninit_array: array_default,
        fuel: opts.fuel,
        array_default_vars: pairs.iter().map(|p| p.value_var.clone()).collect(),
        ..InterpConfig::default()
    }
}

/// Violation preservation: an original assertion failure must be
/// reproducible by some resolution of the transformed program's
/// nondeterminism at the same assertion.
pub fn check_soundness(program: &Program, opts: &OracleOpts) -> DiffVerdict {
    let (transformed, report) = match transform_program(program, &TransformConfig { int_width: opts.int_width }) {
        Ok(t) => t,
        Err(e) => {
            return DiffVerdict::simple(
                Property::Soundness,
                VerdictStatus::OutOfClass,
                format!("not a transformable input: {e}"),
            )
        }
    };

    let mut executions = 0u64;
    // Probe the default initial state and a second array-cell default; a
    // failure under either must be reproducible under the same pairing.
    for array_default in [0, 1] {
        let run = crate::interp::run_original_with(program, opts.fuel, array_default);
        match run.status {
            RunStatus::Inconclusive { reason } => {
                return DiffVerdict::simple(
                    Property::Soundness,
                    VerdictStatus::Inconclusive,
                    format!("original run is inconclusive: {reason}"),
                )
            }
            RunStatus::AllPass => continue,
            RunStatus::AssertFailed { ordinal, span } => {
                let mut policy = NdPolicy {
                    base: policy_base(program, &run.observed, opts),
                    range_cap: opts.range_cap,
                    exec_cap: opts.exec_cap,
                    overrides: BTreeMap::new(),
                };
                witness_site_overrides(&transformed, &report.fresh, &mut policy);
                let config = transformed_interp_config(&report.fresh, array_default, opts);

                let mut found = false;
                let result = enumerate_with(&transformed, &policy, config, |_, result| {
                    if matches!(result.status, RunStatus::AssertFailed { ordinal: o, .. } if o == ordinal)
                    {
                        found = true;
                        return ControlFlow::Break(());
                    }
                    ControlFlow::Continue(())
                });
                let (execs, capped) = match result {
                    Ok(v) => v,
                    Err(e) => {
                        return DiffVerdict::simple(
                            Property::Soundness,
                            VerdictStatus::Inconclusive,
                            format!("enumeration failed: {e}"),
                        )
                    }
                };
                executions += execs;
                if found {
                    return DiffVerdict {
                        property: Property::Soundness,
                        status: VerdictStatus::Holds,
                        detail: format!(
                            "original failure at assert #{ordinal} ({span}) reproduced"
                        ),
                        executions,
                        counterexample: None,
                    };
                }
                if capped {
                    return DiffVerdict {
                        property: Property::Soundness,
                        status: VerdictStatus::Inconclusive,
                        detail: format!(
                            "enumeration cap of {} executions reached before reproducing",
                            opts.exec_cap
                        ),
                        executions,
                        counterexample: None,
                    };
                }
                return DiffVerdict {
                    property: Property::Soundness,
                    status: VerdictStatus::Violated,
                    detail: format!(
                        "original fails at assert #{ordinal} ({span}); no transformed resolution fails there"
                    ),
                    executions,
                    counterexample: Some(Counterexample {
                        original_source: emit(program),
                        transformed_source: emit(&transformed),
                        nd_assignment: None,
                        original_status: RunStatus::AssertFailed { ordinal, span },
                        transformed_status: None,
                        array_default,
                        witness_value_vars: report
                            .fresh
                            .iter()
                            .map(|p| p.value_var.clone())
                            .collect(),
                        detail: "violation lost by the transformation".to_string(),
                    }),
                };
            }
        }
    }

    DiffVerdict {
        property: Property::Soundness,
        status: VerdictStatus::Holds,
        detail: "original passes under both initial-state defaults".to_string(),
        executions,
        counterexample: None,
    }
}

/// Searches the transformed program for any failing resolution; used by
/// the precision check and directly testable.
pub fn find_transformed_failure(
    program: &Program,
    opts: &OracleOpts,
    widen_with: &BTreeSet<i64>,
) -> Result<(Option<Counterexample>, u64, bool), String> {
    let (transformed, report) =
        transform_program(program, &TransformConfig { int_width: opts.int_width })
            .map_err(|e| e.to_string())?;
    let mut policy = NdPolicy {
        base: policy_base(program, widen_with, opts),
        range_cap: opts.range_cap,
        exec_cap: opts.exec_cap,
        overrides: BTreeMap::new(),
    };
    witness_site_overrides(&transformed, &report.fresh, &mut policy);
    let config = transformed_interp_config(&report.fresh, 0, opts);

    let mut failure: Option<Counterexample> = None;
    let (executions, capped) = enumerate_with(&transformed, &policy, config, |assignment, result| {
        match result.status {
            RunStatus::AssertFailed { ordinal, span } => {
                failure = Some(Counterexample {
                    original_source: emit(program),
                    transformed_source: emit(&transformed),
                    nd_assignment: Some(assignment.to_vec()),
                    original_status: RunStatus::AllPass,
                    transformed_status: Some(RunStatus::AssertFailed { ordinal, span }),
                    array_default: 0,
                    witness_value_vars: report
                        .fresh
                        .iter()
                        .map(|p| p.value_var.clone())
                        .collect(),
                    detail: format!("transformed run fails at assert #{ordinal} ({span})"),
                });
                ControlFlow::Break(())
            }
            _ => ControlFlow::Continue(()),
        }
    })
    .map_err(|e| e.to_string())?;
    Ok((failure, executions, capped))
}

/// No-false-alarm check: for a safe original whose assertions all
/// qualify, no resolution of the transformed program may fail.
pub fn check_precision_empirical(program: &Program, opts: &OracleOpts) -> DiffVerdict {
    if !classify_precision(program).all_qualify() {
        return DiffVerdict::simple(
            Property::Precision,
            VerdictStatus::OutOfClass,
            "some assertion does not qualify under the precision rules",
        );
    }
    let run = crate::interp::run_original(program, opts.fuel);
    match run.status {
        RunStatus::Inconclusive { reason } => {
            return DiffVerdict::simple(
                Property::Precision,
                VerdictStatus::Inconclusive,
                format!("original run is inconclusive: {reason}"),
            )
        }
        RunStatus::AssertFailed { .. } => {
            return DiffVerdict::simple(
                Property::Precision,
                VerdictStatus::OutOfClass,
                "original violates an assertion; the precision claim is about safe originals",
            )
        }
        RunStatus::AllPass => {}
    }

    match find_transformed_failure(program, opts, &BTreeSet::new()) {
        Err(e) => DiffVerdict::simple(Property::Precision, VerdictStatus::Inconclusive, e),
        Ok((Some(cex), executions, _)) => DiffVerdict {
            property: Property::Precision,
            status: VerdictStatus::Violated,
            detail: format!("false alarm: {}", cex.detail),
            executions,
            counterexample: Some(cex),
        },
        Ok((None, executions, capped)) => {
            if capped {
                DiffVerdict {
                    property: Property::Precision,
                    status: VerdictStatus::Inconclusive,
                    detail: format!("enumeration cap of {} executions reached", opts.exec_cap),
                    executions,
                    counterexample: None,
                }
            } else {
                DiffVerdict {
                    property: Property::Precision,
                    status: VerdictStatus::Holds,
                    detail: format!("{executions} transformed executions all pass"),
                    executions,
                    counterexample: None,
                }
            }
        }
    }
}

/// How scalar agreement is checked by [`check_represents`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RepresentsMode {
    /// Locations havocked by the transformation (loop-modified variables
    /// and rebound iterators) are exempt from agreement.
    Exempting,
    /// Agreement on every non-array location; feasible because the policy
    /// is widened with the original run's values.
    Strict,
}

/// State-representation check on tiny instances: every original
/// assert-point state, paired with every index choice, must be matched by
/// a transformed state carrying the chosen cell in its witness pair.
pub fn check_represents(
    program: &Program,
    opts: &OracleOpts,
    mode: RepresentsMode,
) -> DiffVerdict {
    let orig_config = InterpConfig {
        int_width: opts.int_width,
        fuel: opts.fuel,
        capture_assert_states: true,
        ..InterpConfig::default()
    };
    let orig_interp = match Interpreter::new(program, orig_config) {
        Ok(i) => i,
        Err(e) => return DiffVerdict::simple(Property::Represents, VerdictStatus::Inconclusive, e),
    };
    if !orig_interp.sites.is_empty() {
        return DiffVerdict::simple(
            Property::Represents,
            VerdictStatus::OutOfClass,
            "input already contains nondeterministic choices",
        );
    }
    let orig_run = orig_interp.run(&[]);
    if let RunStatus::Inconclusive { reason } = &orig_run.status {
        return DiffVerdict::simple(
            Property::Represents,
            VerdictStatus::Inconclusive,
            format!("original run is inconclusive: {reason}"),
        );
    }

    let (transformed, report) =
        match transform_program(program, &TransformConfig { int_width: opts.int_width }) {
            Ok(t) => t,
            Err(e) => {
                return DiffVerdict::simple(
                    Property::Represents,
                    VerdictStatus::OutOfClass,
                    e.to_string(),
                )
            }
        };
    let trans_layout = match MemLayout::build(&transformed) {
        Ok(l) => l,
        Err(e) => return DiffVerdict::simple(Property::Represents, VerdictStatus::Inconclusive, e),
    };

    let mut policy = NdPolicy {
        base: policy_base(program, &orig_run.observed, opts),
        range_cap: opts.range_cap,
        exec_cap: opts.exec_cap,
        overrides: BTreeMap::new(),
    };
    witness_site_overrides(&transformed, &report.fresh, &mut policy);
    let mut config = transformed_interp_config(&report.fresh, 0, opts);
    config.capture_assert_states = true;

    // All transformed assert-point states, grouped by assert ordinal.
    let mut by_ordinal: BTreeMap<usize, Vec<Vec<i64>>> = BTreeMap::new();
    let enum_result = enumerate_with(&transformed, &policy, config, |_, result| {
        for snap in result.assert_states {
            by_ordinal.entry(snap.ordinal).or_default().push(snap.state);
        }
        ControlFlow::Continue(())
    });
    let (executions, capped) = match enum_result {
        Ok(v) => v,
        Err(e) => {
            return DiffVerdict::simple(
                Property::Represents,
                VerdictStatus::Inconclusive,
                format!("enumeration failed: {e}"),
            )
        }
    };
    if capped {
        return DiffVerdict {
            property: Property::Represents,
            status: VerdictStatus::Inconclusive,
            detail: format!("enumeration cap of {} executions reached", opts.exec_cap),
            executions,
            counterexample: None,
        };
    }

    // Agreement pairs: original scalar locations matched by name in the
    // transformed layout.
    let trans_slots: BTreeMap<String, usize> =
        trans_layout.scalar_locations().into_iter().collect();
    let pairs: Vec<(String, usize, usize)> = orig_interp
        .layout
        .scalar_locations()
        .into_iter()
        .filter_map(|(name, orig_slot)| {
            trans_slots
                .get(&name)
                .map(|&trans_slot| (name, orig_slot, trans_slot))
        })
        .collect();

    let exemptions = match mode {
        RepresentsMode::Exempting => havocked_before_assert(program),
        RepresentsMode::Strict => vec![BTreeSet::new(); orig_interp.assert_count()],
    };
    let exempt = |ordinal: usize, name: &str| -> bool {
        exemptions
            .get(ordinal)
            .map(|set| {
                set.contains(name)
                    || name
                        .split_once('.')
                        .is_some_and(|(var, _)| set.contains(var))
            })
            .unwrap_or(false)
    };

    let arrays = array_inventory(program);
    let witness_by_array: BTreeMap<&str, &WitnessPair> = report
        .fresh
        .iter()
        .map(|p| (p.array.as_str(), p))
        .collect();

    for orig_snap in &orig_run.assert_states {
        let ordinal = orig_snap.ordinal;
        let empty = Vec::new();
        let candidates = by_ordinal.get(&ordinal).unwrap_or(&empty);

        let agree = |cand: &Vec<i64>| -> bool {
            pairs.iter().all(|(name, os, ts)| {
                exempt(ordinal, name) || orig_snap.state[*os] == cand[*ts]
            })
        };

        if arrays.is_empty() {
            if !candidates.iter().any(agree) {
                return represent_violation(
                    program,
                    &transformed,
                    &report.fresh,
                    executions,
                    format!(
                        "no transformed state at assert #{ordinal} agrees on the scalar state"
                    ),
                );
            }
            continue;
        }

        for info in &arrays {
            let pair = witness_by_array[info.name.as_str()];
            let index_slot = trans_layout
                .scalar_slot(&pair.index_var, None)
                .expect("witness index is a scalar");
            // (witness value slot, original cell slot builder) per field.
            let field_names: Vec<Option<String>> = match &info.elem {
                ElemType::Scalar(_) => vec![None],
                ElemType::Record(tag) => program
                    .record(tag)
                    .map(|r| r.fields.iter().map(|f| Some(f.name.clone())).collect())
                    .unwrap_or_default(),
            };
            for c in 0..=lastof(info.size) {
                let covered = candidates.iter().any(|cand| {
                    if cand[index_slot] != c {
                        return false;
                    }
                    let witness_matches = field_names.iter().all(|f| {
                        let fname = f.as_deref();
                        let value_slot = trans_layout
                            .scalar_slot(&pair.value_var, fname)
                            .expect("witness value location");
                        let cell_slot = orig_interp
                            .layout
                            .array_cell_slot(&info.name, c, fname)
                            .expect("array cell location");
                        cand[value_slot] == orig_snap.state[cell_slot]
                    });
                    witness_matches && agree(cand)
                });
                if !covered {
                    return represent_violation(
                        program,
                        &transformed,
                        &report.fresh,
                        executions,
                        format!(
                            "assert #{ordinal}: no transformed state represents cell {}[{c}]",
                            info.name
                        ),
                    );
                }
            }
        }
    }

    DiffVerdict {
        property: Property::Represents,
        status: VerdictStatus::Holds,
        detail: format!(
            "{} original assert states covered across {executions} transformed executions",
            orig_run.assert_states.len()
        ),
        executions,
        counterexample: None,
    }
}

fn represent_violation(
    program: &Program,
    transformed: &Program,
    pairs: &[WitnessPair],
    executions: u64,
    detail: String,
) -> DiffVerdict {
    DiffVerdict {
        property: Property::Represents,
        status: VerdictStatus::Violated,
        detail: detail.clone(),
        executions,
        counterexample: Some(Counterexample {
            original_source: emit(program),
            transformed_source: emit_with(transformed, &EmitConfig::default()),
            nd_assignment: None,
            original_status: RunStatus::AllPass,
            transformed_status: None,
            array_default: 0,
            witness_value_vars: pairs.iter().map(|p| p.value_var.clone()).collect(),
            detail,
        }),
    }
}

/// Per assert ordinal, the variables the transformation havocks or
/// rebinds on paths reaching that assertion: modified sets of loops that
/// start before the assert in syntax order, plus those loops' iterators
/// (which the rewrite pins to the witness index or a bound choice).
fn havocked_before_assert(program: &Program) -> Vec<BTreeSet<String>> {
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut out = Vec::new();
    visit_stmts(&program.body, &mut |s| match s {
        Stmt::For { iter, .. } => {
            let defs = loopdefs(s);
            seen.extend(defs.scalars.iter().cloned());
            seen.extend(defs.arrays.iter().cloned());
            seen.insert(iter.clone());
        }
        Stmt::Assert { .. } => out.push(seen.clone()),
        _ => {}
    });
    out
}

/// Sanity guard for the enumeration bound before running a check.
pub fn soundness_enumeration_size(program: &Program, opts: &OracleOpts) -> Option<u128> {
    let run = crate::interp::run_original(program, opts.fuel);
    let (transformed, report) =
        transform_program(program, &TransformConfig { int_width: opts.int_width }).ok()?;
    let mut policy = NdPolicy {
        base: policy_base(program, &run.observed, opts),
        range_cap: opts.range_cap,
        exec_cap: opts.exec_cap,
        overrides: BTreeMap::new(),
    };
    witness_site_overrides(&transformed, &report.fresh, &mut policy);
    let sites = NdSites::collect(&transformed);
    Some(enumeration_size(&sites, &policy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{gen_program, GenLimits};
    use crate::parser::parse;

    fn opts() -> OracleOpts {
        OracleOpts::default()
    }

    #[test]
    fn safe_program_holds_vacuously() {
        let src = "struct S { unsigned int p; unsigned int q; } a[3]; int i, k;\nmain() { for (i = 0; i < 3; i++) { k = i; a[i].p = k; a[i].q = k * k; } for (i = 0; i < 3; i++) { assert(a[i].q == a[i].p * a[i].p); } }";
        let program = parse(src).expect("parses");
        let verdict = check_soundness(&program, &opts());
        assert_eq!(verdict.status, VerdictStatus::Holds, "{}", verdict.detail);
    }

    #[test]
    fn lost_violation_would_be_found_for_failing_original() {
        let src = "int a[2]; int i;\nmain() { for (i = 0; i < 2; i++) { a[i] = i; } for (i = 0; i < 2; i++) { assert(a[i] == 0); } }";
        let program = parse(src).expect("parses");
        let verdict = check_soundness(&program, &opts());
        assert_eq!(verdict.status, VerdictStatus::Holds, "{}", verdict.detail);
        assert!(verdict.detail.contains("reproduced"));
    }

    #[test]
    fn soundness_holds_on_a_generated_sample() {
        let mut checked = 0;
        for seed in 0..120 {
            let program = gen_program(&GenLimits::with_seed(seed));
            let verdict = check_soundness(&program, &opts());
            assert_ne!(
                verdict.status,
                VerdictStatus::Violated,
                "seed {seed}: {}\n{}",
                verdict.detail,
                crate::printer::emit(&program)
            );
            if verdict.status == VerdictStatus::Holds {
                checked += 1;
            }
        }
        assert!(checked >= 90, "only {checked}/120 conclusive");
    }

    #[test]
    fn precision_holds_for_the_motivating_shape() {
        let src = "struct S { unsigned int p; unsigned int q; } a[3]; int i, k;\nmain() { for (i = 0; i < 3; i++) { k = i; a[i].p = k; a[i].q = k * k; } for (i = 0; i < 3; i++) { assert(a[i].q == a[i].p * a[i].p); } }";
        let program = parse(src).expect("parses");
        let verdict = check_precision_empirical(&program, &opts());
        assert_eq!(verdict.status, VerdictStatus::Holds, "{}", verdict.detail);
    }

    #[test]
    fn precision_skips_non_qualifying_programs() {
        let src = "int a[3]; int i, s;\nmain() { for (i = 0; i < 3; i++) { s = s + 1; a[i] = s; } for (i = 0; i < 3; i++) { assert(a[i] >= 0); } }";
        let program = parse(src).expect("parses");
        let verdict = check_precision_empirical(&program, &opts());
        assert_eq!(verdict.status, VerdictStatus::OutOfClass);
    }

    #[test]
    fn precision_skips_unsafe_originals() {
        let src = "int a[3]; int i;\nmain() { for (i = 0; i < 3; i++) { a[i] = i; } for (i = 0; i < 3; i++) { assert(a[i] == 0); } }";
        let program = parse(src).expect("parses");
        let verdict = check_precision_empirical(&program, &opts());
        assert_eq!(verdict.status, VerdictStatus::OutOfClass);
    }

    #[test]
    fn precision_holds_on_generated_qualifying_sample() {
        let mut held = 0;
        for seed in 0..40 {
            let program = gen_program(&GenLimits::safe_invariants(seed));
            let verdict = check_precision_empirical(&program, &opts());
            assert_ne!(
                verdict.status,
                VerdictStatus::Violated,
                "seed {seed}: {}\n{}",
                verdict.detail,
                crate::printer::emit(&program)
            );
            if verdict.holds() {
                held += 1;
            }
        }
        assert!(held >= 30, "only {held}/40 held");
    }

    #[test]
    fn represents_covers_straight_line_writes() {
        let src = "int a[2];\nmain() { a[0] = 7; a[1] = 9; assert(1); }";
        let program = parse(src).expect("parses");
        let verdict = check_represents(&program, &opts(), RepresentsMode::Exempting);
        assert_eq!(verdict.status, VerdictStatus::Holds, "{}", verdict.detail);
    }

    #[test]
    fn represents_holds_for_untouched_array() {
        let src = "int a[3]; int x;\nmain() { x = 2; assert(1); }";
        let program = parse(src).expect("parses");
        let verdict = check_represents(&program, &opts(), RepresentsMode::Exempting);
        assert_eq!(verdict.status, VerdictStatus::Holds, "{}", verdict.detail);
    }

    #[test]
    fn represents_reduces_to_scalar_equality_without_arrays() {
        let src = "int x; int y;\nmain() { x = 3; y = x + 1; assert(y == 4); }";
        let program = parse(src).expect("parses");
        let verdict = check_represents(&program, &opts(), RepresentsMode::Exempting);
        assert_eq!(verdict.status, VerdictStatus::Holds, "{}", verdict.detail);
        let strict = check_represents(&program, &opts(), RepresentsMode::Strict);
        assert_eq!(strict.status, VerdictStatus::Holds, "{}", strict.detail);
    }

    #[test]
    fn represents_strict_holds_on_straight_line_array_code() {
        let src = "int a[2]; int x;\nmain() { x = 5; a[0] = x; a[1] = x + 1; assert(x == 5); }";
        let program = parse(src).expect("parses");
        let verdict = check_represents(&program, &opts(), RepresentsMode::Strict);
        assert_eq!(verdict.status, VerdictStatus::Holds, "{}", verdict.detail);
    }

    #[test]
    fn represents_covers_full_access_loop_states() {
        let src = "int a[3]; int i;\nmain() { for (i = 0; i < 3; i++) { a[i] = i * 2; } assert(1); }";
        let program = parse(src).expect("parses");
        let verdict = check_represents(&program, &opts(), RepresentsMode::Exempting);
        assert_eq!(verdict.status, VerdictStatus::Holds, "{}", verdict.detail);
    }

    #[test]
    fn counterexamples_replay_to_recorded_outcomes() {
        // A failing original gives the transformed side failing
        // resolutions; find one and replay it.
        let src = "int a[2]; int i;\nmain() { for (i = 0; i < 2; i++) { a[i] = i; } for (i = 0; i < 2; i++) { assert(a[i] == 0); } }";
        let program = parse(src).expect("parses");
        let run = crate::interp::run_original(&program, 10_000);
        let (cex, _, _) =
            find_transformed_failure(&program, &opts(), &run.observed).expect("enumerates");
        let cex = cex.expect("a failing resolution exists");
        let (orig, trans) = cex.replay(&opts()).expect("replays");
        assert!(orig.same_outcome(&run.status));
        assert!(trans
            .unwrap()
            .same_outcome(cex.transformed_status.as_ref().unwrap()));
    }
}
