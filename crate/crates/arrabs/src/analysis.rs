//! Static facts consumed by the transformation: which variables a loop may
//! modify, whether a loop walks an entire array through its iterator, and
//! the static bounds of loop iterators.

use crate::ast::*;
use serde::Serialize;
use std::collections::BTreeSet;

/// Metadata for one declared array.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArrayInfo {
    pub name: String,
    pub size: i64,
    pub elem: ElemType,
    pub span: Span,
}

impl ArrayInfo {
    /// Highest valid index, `size - 1`.
    pub fn lastof(&self) -> i64 {
        lastof(self.size)
    }
}

/// Highest index value for an array of the given size.
pub fn lastof(size: i64) -> i64 {
    debug_assert!(size >= 1);
    size - 1
}

/// One entry per declared array, in declaration order.
pub fn array_inventory(program: &Program) -> Vec<ArrayInfo> {
    program
        .decls
        .iter()
        .filter_map(|d| match &d.ty {
            VarType::Array { elem, size } => Some(ArrayInfo {
                name: d.name.clone(),
                size: *size,
                elem: elem.clone(),
                span: d.span,
            }),
            _ => None,
        })
        .collect()
}

/// The set of variables a loop body may modify. Never contains the loop's
/// own iterator.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ModSet {
    pub scalars: BTreeSet<String>,
    pub arrays: BTreeSet<String>,
}

impl ModSet {
    pub fn is_empty(&self) -> bool {
        self.scalars.is_empty() && self.arrays.is_empty()
    }

    pub fn contains_scalar(&self, name: &str) -> bool {
        self.scalars.contains(name)
    }

    pub fn contains_array(&self, name: &str) -> bool {
        self.arrays.contains(name)
    }
}

/// Static facts for one `for` loop.
#[derive(Clone, Debug, Serialize)]
pub struct LoopFacts {
    pub span: Span,
    pub iterator: String,
    /// Inclusive iterator range when statically constant.
    pub bounds: Option<(i64, i64)>,
    /// Arrays fully accessed by this loop, in declaration order.
    pub full_access: Vec<String>,
    pub defs: ModSet,
}

/// Computes [`LoopFacts`] for every loop in the program, outermost first
/// in statement order.
pub fn loop_facts(program: &Program) -> Vec<LoopFacts> {
    let arrays = array_inventory(program);
    let mut facts = Vec::new();
    visit_stmts(&program.body, &mut |s| {
        if let Stmt::For {
            iter, span, body, ..
        } = s
        {
            let full_access: Vec<String> = arrays
                .iter()
                .filter(|a| fullarrayaccess(s, a))
                .map(|a| a.name.clone())
                .collect();
            facts.push(LoopFacts {
                span: *span,
                iterator: iter.clone(),
                bounds: static_bounds(s),
                full_access,
                defs: loopdefs_of_body(body, iter),
            });
        }
    });
    facts
}

/// The over-approximated set of variables modified in the loop.
///
/// Scalars assigned anywhere in the body are included, except when every
/// assignment to the scalar has a bare literal right-hand side and the
/// body's first touch of the scalar is such an assignment at the top
/// level — only then is the scalar's value at every read position
/// iteration-independent. The loop's own iterator is excluded. An array
/// is included when some assignment targets it with an index expression
/// that is not syntactically the iterator.
pub fn loopdefs(loop_stmt: &Stmt) -> ModSet {
    match loop_stmt {
        Stmt::For { iter, body, .. } => loopdefs_of_body(body, iter),
        _ => ModSet::default(),
    }
}

fn loopdefs_of_body(body: &Stmt, iterator: &str) -> ModSet {
    let mut assigned: BTreeSet<String> = BTreeSet::new();
    let mut non_literal: BTreeSet<String> = BTreeSet::new();
    let mut arrays: BTreeSet<String> = BTreeSet::new();

    visit_stmts(body, &mut |s| match s {
        Stmt::Assign { target, value, .. } => match target.subscripted_array() {
            Some((array, index)) => {
                if !index.is_read_of(iterator) {
                    arrays.insert(array.to_string());
                }
            }
            None => {
                let name = target.root().to_string();
                assigned.insert(name.clone());
                if !value.is_literal() {
                    non_literal.insert(name);
                }
            }
        },
        // Nested loop headers assign their own iterator, which varies
        // within one iteration of this loop.
        Stmt::For { iter: inner, .. } => {
            assigned.insert(inner.clone());
            non_literal.insert(inner.clone());
        }
        _ => {}
    });

    let scalars = assigned
        .into_iter()
        .filter(|name| {
            name != iterator && (non_literal.contains(name) || !literal_def_dominates(body, name))
        })
        .collect();
    ModSet { scalars, arrays }
}

/// The constant-assignment exemption holds only when the first statement
/// of the body touching the scalar is an unconditional top-level literal
/// assignment to it. A conditional constant assignment, or a read before
/// the assignment, still observes values from other iterations.
fn literal_def_dominates(body: &Stmt, x: &str) -> bool {
    let top: Vec<&Stmt> = match body {
        Stmt::Seq(stmts) => stmts.iter().collect(),
        other => vec![other],
    };
    for s in top {
        if let Stmt::Assign { target, value, .. } = s {
            if target.subscripted_array().is_none() && target.root() == x {
                return value.is_literal();
            }
        }
        if stmt_mentions(s, x) {
            return false;
        }
    }
    false
}

fn stmt_mentions(stmt: &Stmt, x: &str) -> bool {
    let mut mentioned = false;
    visit_stmts(stmt, &mut |s| match s {
        Stmt::Assign { target, .. } | Stmt::GuardedAssign { target, .. } => {
            if target.subscripted_array().is_none() && target.root() == x {
                mentioned = true;
            }
        }
        Stmt::For { iter, .. } if iter == x => mentioned = true,
        _ => {}
    });
    visit_exprs(stmt, &mut |e| {
        if let Expr::Read(lval) = e {
            if lval.subscripted_array().is_none() && lval.root() == x {
                mentioned = true;
            }
        }
    });
    mentioned
}

/// True only when the loop provably touches every index of `array` exactly
/// through its iterator: `i = 0` start, a constant test covering the whole
/// array, unit increment, no write to the iterator in the body, and every
/// subscript of `array` in the body syntactically equal to the iterator.
/// Anything else — including "don't know" — is false.
pub fn fullarrayaccess(loop_stmt: &Stmt, array: &ArrayInfo) -> bool {
    let Stmt::For {
        iter,
        init,
        test,
        step,
        body,
        ..
    } = loop_stmt
    else {
        return false;
    };

    if !matches!(init, Expr::Const { value: 0, .. }) {
        return false;
    }
    if !test_covers_size(test, iter, array.size) {
        return false;
    }
    if !step_is_unit_increment(step, iter) {
        return false;
    }
    if iterator_written(body, iter) {
        return false;
    }

    let mut accesses = 0usize;
    let mut all_through_iterator = true;
    let mut on_access = |arr: &str, index: &Expr| {
        if arr == array.name {
            accesses += 1;
            if !index.is_read_of(iter) {
                all_through_iterator = false;
            }
        }
    };
    visit_exprs(body, &mut |e| {
        if let Expr::Read(lval) = e {
            if let Some((arr, index)) = lval.subscripted_array() {
                on_access(arr, index);
            }
        }
    });
    visit_stmts(body, &mut |s| {
        if let Stmt::Assign { target, .. } | Stmt::GuardedAssign { target, .. } = s {
            if let Some((arr, index)) = target.subscripted_array() {
                on_access(arr, index);
            }
        }
    });

    accesses > 0 && all_through_iterator
}

fn test_covers_size(test: &Expr, iter: &str, size: i64) -> bool {
    match test {
        Expr::BinOp {
            op: BinOp::Lt,
            lhs,
            rhs,
            ..
        } => lhs.is_read_of(iter) && matches!(**rhs, Expr::Const { value, .. } if value == size),
        Expr::BinOp {
            op: BinOp::Le,
            lhs,
            rhs,
            ..
        } => {
            lhs.is_read_of(iter) && matches!(**rhs, Expr::Const { value, .. } if value == size - 1)
        }
        _ => false,
    }
}

fn step_is_unit_increment(step: &Step, iter: &str) -> bool {
    match step {
        Step::IncOne => true,
        Step::DecOne => false,
        Step::Assign(Expr::BinOp {
            op: BinOp::Add,
            lhs,
            rhs,
            ..
        }) => {
            (lhs.is_read_of(iter) && matches!(**rhs, Expr::Const { value: 1, .. }))
                || (rhs.is_read_of(iter) && matches!(**lhs, Expr::Const { value: 1, .. }))
        }
        Step::Assign(_) => false,
    }
}

/// Whether the body (including nested loop headers) writes the iterator.
pub fn iterator_written(body: &Stmt, iter: &str) -> bool {
    let mut written = false;
    visit_stmts(body, &mut |s| match s {
        Stmt::Assign { target, .. } | Stmt::GuardedAssign { target, .. } => {
            if target.subscripted_array().is_none() && target.root() == iter {
                written = true;
            }
        }
        Stmt::For { iter: inner, .. } if inner == iter => written = true,
        _ => {}
    });
    written
}

/// Inclusive range of values the iterator takes, when the header bounds
/// are compile-time constants and the step is a unit increment or
/// decrement. `None` when the range cannot be determined or is empty.
pub fn static_bounds(loop_stmt: &Stmt) -> Option<(i64, i64)> {
    let Stmt::For {
        iter,
        init,
        test,
        step,
        ..
    } = loop_stmt
    else {
        return None;
    };
    let Expr::Const { value: start, .. } = init else {
        return None;
    };

    let (op, bound) = match test {
        Expr::BinOp { op, lhs, rhs, .. } if lhs.is_read_of(iter) => match **rhs {
            Expr::Const { value, .. } => (*op, value),
            _ => return None,
        },
        _ => return None,
    };

    let range = match (step, op) {
        (s, BinOp::Lt) if step_is_unit_increment(s, iter) => (*start, bound - 1),
        (s, BinOp::Le) if step_is_unit_increment(s, iter) => (*start, bound),
        (Step::DecOne, BinOp::Gt) => (bound + 1, *start),
        (Step::DecOne, BinOp::Ge) => (bound, *start),
        _ => return None,
    };
    if range.0 > range.1 {
        None
    } else {
        Some(range)
    }
}
