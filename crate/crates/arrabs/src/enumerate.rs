//! Finite enumeration of nondeterminism in transformed programs.
//!
//! A transformed program is loop-free, so each nd site is evaluated at
//! most once per run. Enumeration executes the program once per total
//! assignment of values to sites, drawing each site's values from an
//! [`NdPolicy`].

use crate::ast::Program;
use crate::interp::{InterpConfig, Interpreter, NdSites, RunResult, SiteKind};
use crate::validate::validate_transformed;
use std::collections::BTreeMap;
use std::ops::ControlFlow;
use thiserror::Error;

/// Finite value domains for nd sites.
///
/// A ranged site `nd(l,u)` enumerates its full range when it has at most
/// `range_cap` values, and otherwise falls back to `{l, u}` plus whatever
/// base values fall inside the range. A plain `nd()` site enumerates the
/// base set. Per-site overrides win over both.
#[derive(Clone, Debug)]
pub struct NdPolicy {
    pub base: Vec<i64>,
    pub range_cap: usize,
    pub exec_cap: u64,
    pub overrides: BTreeMap<usize, Vec<i64>>,
}

impl Default for NdPolicy {
    fn default() -> Self {
        NdPolicy {
            base: vec![0, 1],
            range_cap: 64,
            exec_cap: 100_000,
            overrides: BTreeMap::new(),
        }
    }
}

impl NdPolicy {
    pub fn with_base(values: impl IntoIterator<Item = i64>) -> Self {
        let mut base: Vec<i64> = values.into_iter().collect();
        base.sort_unstable();
        base.dedup();
        NdPolicy {
            base,
            ..NdPolicy::default()
        }
    }

    /// The ordered value domain of one site. Every value of a ranged site
    /// lies within its range.
    pub fn domain(&self, site: usize, kind: SiteKind) -> Vec<i64> {
        if let Some(v) = self.overrides.get(&site) {
            return v.clone();
        }
        match kind {
            SiteKind::Plain => self.base.clone(),
            SiteKind::Range(lo, hi) => {
                let width = (hi - lo + 1) as u128;
                if width <= self.range_cap as u128 {
                    (lo..=hi).collect()
                } else {
                    let mut vals: Vec<i64> = self
                        .base
                        .iter()
                        .copied()
                        .filter(|v| *v >= lo && *v <= hi)
                        .chain([lo, hi])
                        .collect();
                    vals.sort_unstable();
                    vals.dedup();
                    vals
                }
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum EnumerateError {
    #[error("program is not in transformed form: {0} violations")]
    NotTransformed(usize),
    #[error("interpreter setup failed: {0}")]
    Setup(String),
    #[error("nd policy yields an empty domain for site {0}")]
    EmptyDomain(usize),
}

/// Outcome set of an exhaustive enumeration.
#[derive(Debug)]
pub struct Enumeration {
    pub outcomes: Vec<RunResult>,
    pub executions: u64,
    /// True when `exec_cap` stopped the enumeration early; `outcomes` is
    /// then a partial set.
    pub capped: bool,
}

/// Executes the program once per total assignment of nd values and
/// collects every outcome.
pub fn enumerate_transformed(
    program: &Program,
    policy: &NdPolicy,
    config: InterpConfig,
) -> Result<Enumeration, EnumerateError> {
    let mut outcomes = Vec::new();
    let (executions, capped) = enumerate_with(program, policy, config, |_, result| {
        outcomes.push(result);
        ControlFlow::Continue(())
    })?;
    Ok(Enumeration {
        outcomes,
        executions,
        capped,
    })
}

/// Total number of executions a full enumeration would take, without
/// running anything.
pub fn enumeration_size(sites: &NdSites, policy: &NdPolicy) -> u128 {
    sites
        .sites
        .iter()
        .enumerate()
        .map(|(i, s)| policy.domain(i, s.kind).len() as u128)
        .product()
}

/// Core enumeration loop. The visitor receives each total assignment and
/// its run result and may stop early. Returns `(executions, capped)`.
pub fn enumerate_with(
    program: &Program,
    policy: &NdPolicy,
    config: InterpConfig,
    mut visit: impl FnMut(&[i64], RunResult) -> ControlFlow<()>,
) -> Result<(u64, bool), EnumerateError> {
    let report = validate_transformed(program);
    if !report.is_conformant() {
        return Err(EnumerateError::NotTransformed(report.violations.len()));
    }
    let interp = Interpreter::new(program, config).map_err(EnumerateError::Setup)?;

    let domains: Vec<Vec<i64>> = interp
        .sites
        .sites
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let d = policy.domain(i, s.kind);
            if d.is_empty() {
                Err(EnumerateError::EmptyDomain(i))
            } else {
                Ok(d)
            }
        })
        .collect::<Result<_, _>>()?;

    let mut assignment: Vec<i64> = domains.iter().map(|d| d[0]).collect();
    let mut cursor = vec![0usize; domains.len()];
    let mut executions: u64 = 0;

    loop {
        if executions >= policy.exec_cap {
            return Ok((executions, true));
        }
        let result = interp.run(&assignment);
        executions += 1;
        if visit(&assignment, result).is_break() {
            return Ok((executions, false));
        }

        // Odometer step over the site domains.
        let mut i = domains.len();
        loop {
            if i == 0 {
                return Ok((executions, false));
            }
            i -= 1;
            cursor[i] += 1;
            if cursor[i] < domains[i].len() {
                assignment[i] = domains[i][cursor[i]];
                break;
            }
            cursor[i] = 0;
            assignment[i] = domains[i][0];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::RunStatus;
    use crate::parser::parse_transformed;

    #[test]
    fn visits_exactly_the_product_of_domain_sizes() {
        let src = "int x; int y; main() { x = nd(0, 2); y = nd(); assert(1); }";
        let program = parse_transformed(src).expect("parses");
        let policy = NdPolicy::with_base([5, 6, 7]);
        let e = enumerate_transformed(&program, &policy, InterpConfig::default()).unwrap();
        assert_eq!(e.executions, 9);
        assert_eq!(e.outcomes.len(), 9);
        assert!(!e.capped);
    }

    #[test]
    fn ranged_domains_stay_in_range() {
        let policy = NdPolicy::with_base([-10, 0, 3, 99]);
        let d = policy.domain(0, SiteKind::Range(0, 5));
        assert_eq!(d, vec![0, 1, 2, 3, 4, 5]);
        let policy = NdPolicy {
            range_cap: 4,
            ..NdPolicy::with_base([-10, 0, 3, 99])
        };
        let d = policy.domain(0, SiteKind::Range(0, 9));
        assert!(d.iter().all(|v| (0..=9).contains(v)));
        assert!(d.contains(&0) && d.contains(&9) && d.contains(&3));
    }

    #[test]
    fn failed_assert_on_some_branch_shows_both_outcomes() {
        let src = "int x; main() { x = nd(0, 1); assert(x == 0); }";
        let program = parse_transformed(src).expect("parses");
        let e = enumerate_transformed(&program, &NdPolicy::default(), InterpConfig::default())
            .unwrap();
        let failures = e
            .outcomes
            .iter()
            .filter(|o| matches!(o.status, RunStatus::AssertFailed { .. }))
            .count();
        assert_eq!(e.executions, 2);
        assert_eq!(failures, 1);
    }

    #[test]
    fn single_failing_outcome_for_assert_zero() {
        let program = parse_transformed("int x; main() { assert(0); }").expect("parses");
        let e = enumerate_transformed(&program, &NdPolicy::default(), InterpConfig::default())
            .unwrap();
        assert_eq!(e.executions, 1);
        assert!(matches!(
            e.outcomes[0].status,
            RunStatus::AssertFailed { .. }
        ));
    }

    #[test]
    fn cap_reports_partial_enumeration() {
        let src = "int x; int y; main() { x = nd(); y = nd(); assert(1); }";
        let program = parse_transformed(src).expect("parses");
        let policy = NdPolicy {
            exec_cap: 3,
            ..NdPolicy::with_base([0, 1, 2, 3])
        };
        let e = enumerate_transformed(&program, &policy, InterpConfig::default()).unwrap();
        assert!(e.capped);
        assert_eq!(e.outcomes.len(), 3);
    }

    #[test]
    fn loops_are_rejected() {
        let src = "int a; int i; main() { for (i = 0; i < 3; i++) { a = i; } }";
        let program = crate::parser::parse(src).expect("parses");
        assert!(matches!(
            enumerate_transformed(&program, &NdPolicy::default(), InterpConfig::default()),
            Err(EnumerateError::NotTransformed(_))
        ));
    }
}
