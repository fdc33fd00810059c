//! Conformance checking of transformer output: a transformed program must
//! contain no loops, no array subscripts, and only well-formed nd ranges.

use crate::ast::*;
use serde::Serialize;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum ViolationKind {
    LoopPresent,
    ArrayAccessPresent,
    EmptyNdRange,
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub span: Span,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.detail)
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ConformanceReport {
    pub violations: Vec<Violation>,
}

impl ConformanceReport {
    pub fn is_conformant(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count_of(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

/// Lists every violation of the transformed-program grammar.
pub fn validate_transformed(program: &Program) -> ConformanceReport {
    let mut report = ConformanceReport::default();

    visit_stmts(&program.body, &mut |s| {
        if let Stmt::For { iter, span, .. } = s {
            report.violations.push(Violation {
                kind: ViolationKind::LoopPresent,
                span: *span,
                detail: format!("residual for-loop over `{iter}`"),
            });
        }
    });

    visit_exprs(&program.body, &mut |e| match e {
        Expr::Read(lval) => check_lval(lval, &mut report),
        Expr::NdRange { lo, hi, span } if lo > hi => report.violations.push(Violation {
            kind: ViolationKind::EmptyNdRange,
            span: *span,
            detail: format!("empty nd range [{lo}, {hi}]"),
        }),
        _ => {}
    });

    // Assignment targets are lvalues, not expressions; walk them as well.
    visit_stmts(&program.body, &mut |s| match s {
        Stmt::Assign { target, .. } | Stmt::GuardedAssign { target, .. } => {
            check_lval(target, &mut report)
        }
        _ => {}
    });

    report
}

fn check_lval(lval: &Lval, report: &mut ConformanceReport) {
    if let Some((array, _)) = lval.subscripted_array() {
        report.violations.push(Violation {
            kind: ViolationKind::ArrayAccessPresent,
            span: lval.span(),
            detail: format!("residual subscript of array `{array}`"),
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    #[test]
    fn untransformed_program_reports_loops_and_subscripts() {
        let src = "struct S { unsigned int p; unsigned int q; } a[4]; int i, k;\nmain() { for (i = 0; i < 4; i++) { k = i; a[i].p = k; a[i].q = k * k; } for (i = 0; i < 4; i++) { assert(a[i].q == a[i].p * a[i].p); } }";
        let program = parse(src).expect("parses");
        let report = validate_transformed(&program);
        assert_eq!(report.count_of(ViolationKind::LoopPresent), 2);
        assert_eq!(report.count_of(ViolationKind::ArrayAccessPresent), 5);
    }

    #[test]
    fn single_residual_subscript_is_pinpointed() {
        let src = "int a[2]; int x;\nmain() { x = 1; a[0] = x; }";
        let program = parse(src).expect("parses");
        let report = validate_transformed(&program);
        assert_eq!(report.violations.len(), 1);
        let v = &report.violations[0];
        assert_eq!(v.kind, ViolationKind::ArrayAccessPresent);
        assert_eq!(v.span.line, 2);
    }

    #[test]
    fn loop_free_array_free_program_is_conformant() {
        let src = "int x; main() { x = 3; assert(x == 3); }";
        let program = parse(src).expect("parses");
        assert!(validate_transformed(&program).is_conformant());
    }
}
