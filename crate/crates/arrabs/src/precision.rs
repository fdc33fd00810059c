//! Classifies assertions by whether the transformation can produce a
//! false alarm for them.
//!
//! An assertion inside a loop qualifies when, over the loop it sits in and
//! every loop whose definitions reach it, the rewrite introduces no
//! nondeterministic value into the assertion's dependence cone: all those
//! loops walk a single array completely, the cone's array reads use the
//! loop iterator as index, no relevant array or scalar is havocked, and
//! array writes feeding the assertion copy only iterator-derived values.
//! A scalar havocked in the assertion's own loop is tolerated when it is
//! re-defined from a constant or the iterator before the assertion (the
//! havoc is dead by then); the same argument applies to scalars feeding an
//! array write in a defining loop.

use crate::analysis::{array_inventory, fullarrayaccess, loopdefs, ArrayInfo, ModSet};
use crate::ast::*;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// The precision rules; an assertion qualifies when none is violated.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize)]
pub enum Rule {
    /// Every involved loop fully walks exactly one array.
    L1,
    /// Cone array reads are indexed by the assertion loop's iterator.
    A2,
    /// No relevant array is modified at a non-iterator index.
    A3,
    /// No cone scalar is havocked (modulo the relaxation).
    S4,
    /// Array reads feeding array writes use the defining loop's iterator.
    D5,
    /// Scalars feeding array writes are not havocked (modulo the
    /// relaxation).
    D6,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::L1 => "l1",
            Rule::A2 => "a2",
            Rule::A3 => "a3",
            Rule::S4 => "s4",
            Rule::D5 => "d5",
            Rule::D6 => "d6",
        };
        write!(f, "{s}")
    }
}

/// Classification of one assertion.
#[derive(Clone, Debug, Serialize)]
pub struct AssertClassification {
    pub ordinal: usize,
    pub span: Span,
    /// Assertions outside loops are non-qualifying without rule
    /// evaluation; no precision claim is made for them.
    pub in_loop: bool,
    pub qualifies: bool,
    pub violated: BTreeSet<Rule>,
    pub relaxation_applied: bool,
    /// Spans of the loops whose definitions reach the assertion.
    pub contributing_loops: Vec<Span>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PrecisionReport {
    pub asserts: Vec<AssertClassification>,
}

impl PrecisionReport {
    /// True when the program has at least one assertion and every
    /// assertion qualifies.
    pub fn all_qualify(&self) -> bool {
        !self.asserts.is_empty() && self.asserts.iter().all(|a| a.qualifies)
    }
}

/// One loop of the program with the facts rule checking needs.
struct LoopEntry<'p> {
    stmt: &'p Stmt,
    iterator: String,
    span: Span,
    /// Pre-order position of the loop statement.
    start: usize,
    /// Pre-order position just past the loop's subtree.
    end: usize,
    defs: ModSet,
    /// Scalars assigned anywhere in the body (regardless of RHS shape).
    assigned: BTreeSet<String>,
    /// Arrays written anywhere in the body.
    written_arrays: BTreeSet<String>,
    /// Scalars read in the body, excluding the loop's own iterator.
    reads: BTreeSet<String>,
    /// Arrays read in the body.
    read_arrays: BTreeSet<String>,
    /// Set when the loop accesses exactly one array and walks it fully.
    full_over: Option<String>,
}

struct AssertEntry<'p> {
    stmt: &'p Stmt,
    span: Span,
    position: usize,
    /// Indices into the loop table, innermost last.
    enclosing: Vec<usize>,
}

/// Evaluates the precision rules for every assertion in the program.
pub fn classify_precision(program: &Program) -> PrecisionReport {
    let arrays = array_inventory(program);
    let ctx = Cataloger::catalog(program, &arrays);

    let mut report = PrecisionReport::default();
    for (ordinal, assert) in ctx.asserts.iter().enumerate() {
        report
            .asserts
            .push(ctx.classify_assert(program, ordinal, assert));
    }
    report
}

struct Cataloger<'p> {
    loops: Vec<LoopEntry<'p>>,
    asserts: Vec<AssertEntry<'p>>,
    positions: BTreeMap<usize, usize>,
    array_names: BTreeSet<String>,
}

impl<'p> Cataloger<'p> {
    fn catalog(program: &'p Program, arrays: &[ArrayInfo]) -> Cataloger<'p> {
        let mut positions = BTreeMap::new();
        let mut counter = 0usize;
        visit_stmts(&program.body, &mut |s| {
            positions.insert(s as *const Stmt as usize, counter);
            counter += 1;
        });
        let total = counter;

        let mut ctx = Cataloger {
            loops: Vec::new(),
            asserts: Vec::new(),
            positions,
            array_names: arrays.iter().map(|a| a.name.clone()).collect(),
        };
        ctx.walk(&program.body, arrays, &mut Vec::new(), total);
        ctx
    }

    fn position(&self, stmt: &Stmt) -> usize {
        self.positions
            .get(&(stmt as *const Stmt as usize))
            .copied()
            .unwrap_or(usize::MAX)
    }

    fn walk(
        &mut self,
        stmt: &'p Stmt,
        arrays: &[ArrayInfo],
        loop_stack: &mut Vec<usize>,
        total: usize,
    ) {
        match stmt {
            Stmt::Seq(stmts) => {
                for s in stmts {
                    self.walk(s, arrays, loop_stack, total);
                }
            }
            Stmt::If {
                then_branch,
                else_branch,
                ..
            } => {
                self.walk(then_branch, arrays, loop_stack, total);
                if let Some(e) = else_branch {
                    self.walk(e, arrays, loop_stack, total);
                }
            }
            Stmt::For {
                iter, body, span, ..
            } => {
                let idx = self.loops.len();
                let start = self.position(stmt);
                let entry = self.loop_entry(stmt, iter, body, *span, start, arrays);
                self.loops.push(entry);
                loop_stack.push(idx);
                self.walk(body, arrays, loop_stack, total);
                loop_stack.pop();
                self.loops[idx].end = self.subtree_end(body, total);
            }
            Stmt::Assert { span, .. } => {
                self.asserts.push(AssertEntry {
                    stmt,
                    span: *span,
                    position: self.position(stmt),
                    enclosing: loop_stack.clone(),
                });
            }
            _ => {}
        }
    }

    fn subtree_end(&self, body: &Stmt, total: usize) -> usize {
        let mut max = 0usize;
        visit_stmts(body, &mut |s| {
            max = max.max(self.position(s));
        });
        max.min(total)
    }

    fn loop_entry(
        &self,
        stmt: &'p Stmt,
        iterator: &str,
        body: &'p Stmt,
        span: Span,
        start: usize,
        arrays: &[ArrayInfo],
    ) -> LoopEntry<'p> {
        let mut assigned = BTreeSet::new();
        let mut written_arrays = BTreeSet::new();
        visit_stmts(body, &mut |s| match s {
            Stmt::Assign { target, .. } => match target.subscripted_array() {
                Some((a, _)) => {
                    written_arrays.insert(a.to_string());
                }
                None => {
                    assigned.insert(target.root().to_string());
                }
            },
            Stmt::For { iter: inner, .. } => {
                assigned.insert(inner.clone());
            }
            _ => {}
        });

        let mut reads = BTreeSet::new();
        let mut read_arrays = BTreeSet::new();
        visit_exprs(body, &mut |e| {
            if let Expr::Read(lval) = e {
                match lval.subscripted_array() {
                    Some((a, _)) => {
                        read_arrays.insert(a.to_string());
                    }
                    None => {
                        if lval.root() != iterator {
                            reads.insert(lval.root().to_string());
                        }
                    }
                }
            }
        });

        let accessed_arrays: BTreeSet<String> =
            written_arrays.union(&read_arrays).cloned().collect();
        let full_over = if accessed_arrays.len() == 1 {
            let name = accessed_arrays.iter().next().unwrap().clone();
            arrays
                .iter()
                .find(|a| a.name == name)
                .filter(|a| fullarrayaccess(stmt, a))
                .map(|a| a.name.clone())
        } else {
            None
        };

        LoopEntry {
            stmt,
            iterator: iterator.to_string(),
            span,
            start,
            end: usize::MAX,
            defs: loopdefs(stmt),
            assigned,
            written_arrays,
            reads,
            read_arrays,
            full_over,
        }
    }

    fn classify_assert(
        &self,
        program: &Program,
        ordinal: usize,
        assert: &AssertEntry<'p>,
    ) -> AssertClassification {
        let Some(&innermost) = assert.enclosing.last() else {
            return AssertClassification {
                ordinal,
                span: assert.span,
                in_loop: false,
                qualifies: false,
                violated: BTreeSet::new(),
                relaxation_applied: false,
                contributing_loops: Vec::new(),
            };
        };
        let home = &self.loops[innermost];

        let cone = self.dependence_cone(assert, home);
        let relevant_arrays: BTreeSet<String> = cone
            .array_reads
            .iter()
            .map(|(a, _)| a.clone())
            .collect();

        // Loops from which definitions of cone names reach the assertion,
        // closed transitively over the names those loops read.
        let mut deps_scalars: BTreeSet<String> = cone.scalars.clone();
        let mut deps_arrays: BTreeSet<String> = relevant_arrays.clone();
        let mut s_def: BTreeSet<usize> = BTreeSet::new();
        loop {
            let mut changed = false;
            for (idx, l) in self.loops.iter().enumerate() {
                if s_def.contains(&idx) || l.start >= assert.position {
                    continue;
                }
                let defines = l.assigned.iter().any(|n| deps_scalars.contains(n))
                    || l.written_arrays.iter().any(|n| deps_arrays.contains(n));
                if defines {
                    s_def.insert(idx);
                    for r in &l.reads {
                        if self.array_names.contains(r) {
                            deps_arrays.insert(r.clone());
                        } else {
                            deps_scalars.insert(r.clone());
                        }
                    }
                    for r in &l.read_arrays {
                        deps_arrays.insert(r.clone());
                    }
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        let mut violated = BTreeSet::new();
        let mut relaxation_applied = false;
        let involved: Vec<usize> = std::iter::once(innermost)
            .chain(s_def.iter().copied().filter(|&i| i != innermost))
            .collect();

        // l1: every involved loop fully walks exactly one array.
        for &idx in &involved {
            if self.loops[idx].full_over.is_none() {
                violated.insert(Rule::L1);
            }
        }

        // a2: cone array reads are indexed by the home loop's iterator.
        for (_, index_is_iter) in &cone.array_reads {
            if !index_is_iter {
                violated.insert(Rule::A2);
            }
        }

        // a3: no relevant array is havocked by any involved loop.
        for &idx in &involved {
            for a in &deps_arrays {
                if self.loops[idx].defs.contains_array(a) {
                    violated.insert(Rule::A3);
                }
            }
        }

        // s4: cone scalars are not havocked, except when re-defined from a
        // constant or the iterator before the assertion in its own loop.
        for x in &cone.scalars {
            for &idx in &involved {
                if !self.loops[idx].defs.contains_scalar(x) {
                    continue;
                }
                if idx == innermost
                    && self.defined_cleanly_before(home, x, assert.position)
                {
                    relaxation_applied = true;
                } else {
                    violated.insert(Rule::S4);
                }
            }
        }

        // d5/d6 over array writes in defining loops that feed the cone.
        for &idx in s_def.iter() {
            let l = &self.loops[idx];
            let mut check = |target: &Lval, value: &Expr, pos: usize| {
                let Some((array, _)) = target.subscripted_array() else {
                    return;
                };
                if !deps_arrays.contains(array) {
                    return;
                }
                let mut reads = ReadSet::default();
                collect_expr_reads(value, &mut reads);
                for (_, index_is_iter) in read_array_indices(value, &l.iterator) {
                    if !index_is_iter {
                        violated.insert(Rule::D5);
                    }
                }
                for x in reads.scalars.iter().filter(|x| **x != l.iterator) {
                    let havocked_somewhere = involved
                        .iter()
                        .any(|&j| self.loops[j].defs.contains_scalar(x));
                    if !havocked_somewhere {
                        continue;
                    }
                    if self.defined_cleanly_before(l, x, pos) {
                        relaxation_applied = true;
                    } else {
                        violated.insert(Rule::D6);
                    }
                }
            };
            let Stmt::For { body, .. } = l.stmt else {
                continue;
            };
            visit_stmts(body, &mut |s| {
                if let Stmt::Assign { target, value, .. } = s {
                    check(target, value, self.position(s));
                }
            });
        }

        let _ = program;
        AssertClassification {
            ordinal,
            span: assert.span,
            in_loop: true,
            qualifies: violated.is_empty(),
            violated,
            relaxation_applied,
            contributing_loops: s_def.iter().map(|&i| self.loops[i].span).collect(),
        }
    }

    /// Scans the top-level statements of the loop body up to `use_pos`:
    /// the scalar must be assigned from constants and/or the iterator, at
    /// the top level, with no other touch of it in between.
    fn defined_cleanly_before(&self, l: &LoopEntry<'p>, x: &str, use_pos: usize) -> bool {
        let Stmt::For { body, .. } = l.stmt else {
            return false;
        };
        let top: Vec<&Stmt> = match &**body {
            Stmt::Seq(stmts) => stmts.iter().collect(),
            other => vec![other],
        };
        let mut clean = false;
        for s in top {
            let pos = self.position(s);
            let end = self.subtree_end(s, usize::MAX);
            if pos <= use_pos && use_pos <= end {
                // The statement containing the use point; a clean
                // definition must already be in force.
                return clean;
            }
            if pos > use_pos {
                break;
            }
            match s {
                Stmt::Assign { target, value, .. }
                    if target.subscripted_array().is_none() && target.root() == x =>
                {
                    let mut reads = ReadSet::default();
                    collect_expr_reads(value, &mut reads);
                    let from_iter_and_consts = reads.arrays.is_empty()
                        && reads.scalars.iter().all(|r| r == &l.iterator);
                    clean = from_iter_and_consts;
                }
                other => {
                    // Reads of x keep the definition in force; any nested
                    // or conditional re-assignment does not.
                    if stmt_assigns(other, x) {
                        clean = false;
                    }
                }
            }
        }
        clean
    }

    /// The set of scalars and array-read expressions the assertion depends
    /// on, data- or control-wise, within its own loop.
    fn dependence_cone(&self, assert: &AssertEntry<'p>, home: &LoopEntry<'p>) -> Cone {
        let Stmt::For { body, .. } = home.stmt else {
            return Cone::default();
        };

        let mut cone = Cone::default();
        let Stmt::Assert { cond, .. } = assert.stmt else {
            return cone;
        };
        let mut reads = ReadSet::default();
        collect_expr_reads(cond, &mut reads);
        for cond in self.enclosing_if_conditions(body, assert.stmt) {
            collect_expr_reads(cond, &mut reads);
        }
        cone.scalars = reads.scalars;
        cone.array_reads = read_array_indices(cond, &home.iterator);

        // Close over assignments within the loop body.
        loop {
            let mut grew = false;
            visit_stmts(body, &mut |s| {
                if let Stmt::Assign { target, value, .. } = s {
                    if target.subscripted_array().is_none()
                        && cone.scalars.contains(target.root())
                    {
                        let mut r = ReadSet::default();
                        collect_expr_reads(value, &mut r);
                        for c in self.enclosing_if_conditions(body, s) {
                            collect_expr_reads(c, &mut r);
                        }
                        for x in r.scalars {
                            grew |= cone.scalars.insert(x);
                        }
                        for ar in read_array_indices(value, &home.iterator) {
                            if !cone.array_reads.contains(&ar) {
                                cone.array_reads.push(ar);
                                grew = true;
                            }
                        }
                    }
                }
            });
            if !grew {
                break;
            }
        }
        cone
    }

    /// Conditions of `if` statements between the loop body root and the
    /// target statement.
    fn enclosing_if_conditions(&self, body: &'p Stmt, target: &Stmt) -> Vec<&'p Expr> {
        fn search<'p>(
            stmt: &'p Stmt,
            target: usize,
            stack: &mut Vec<&'p Expr>,
            out: &mut Vec<&'p Expr>,
        ) -> bool {
            if stmt as *const Stmt as usize == target {
                out.extend(stack.iter().copied());
                return true;
            }
            match stmt {
                Stmt::Seq(stmts) => stmts.iter().any(|s| search(s, target, stack, out)),
                Stmt::If {
                    cond,
                    then_branch,
                    else_branch,
                    ..
                } => {
                    stack.push(cond);
                    let mut found = search(then_branch, target, stack, out);
                    if !found {
                        if let Some(e) = else_branch {
                            found = search(e, target, stack, out);
                        }
                    }
                    stack.pop();
                    found
                }
                Stmt::For { body, .. } => search(body, target, stack, out),
                _ => false,
            }
        }
        let mut out = Vec::new();
        search(
            body,
            target as *const Stmt as usize,
            &mut Vec::new(),
            &mut out,
        );
        out
    }
}

#[derive(Default)]
struct Cone {
    scalars: BTreeSet<String>,
    /// `(array name, index is exactly the home iterator)` per array read.
    array_reads: Vec<(String, bool)>,
}

#[derive(Default)]
struct ReadSet {
    scalars: BTreeSet<String>,
    arrays: BTreeSet<String>,
}

fn collect_expr_reads(expr: &Expr, out: &mut ReadSet) {
    match expr {
        Expr::BinOp { lhs, rhs, .. } => {
            collect_expr_reads(lhs, out);
            collect_expr_reads(rhs, out);
        }
        Expr::Cond {
            cond,
            then_val,
            else_val,
            ..
        } => {
            collect_expr_reads(cond, out);
            collect_expr_reads(then_val, out);
            collect_expr_reads(else_val, out);
        }
        Expr::Read(lval) => match lval.subscripted_array() {
            Some((a, index)) => {
                out.arrays.insert(a.to_string());
                collect_expr_reads(index, out);
            }
            None => {
                out.scalars.insert(lval.root().to_string());
            }
        },
        Expr::Const { .. } | Expr::Nd { .. } | Expr::NdRange { .. } => {}
    }
}

/// Every array read inside the expression, flagged with whether its index
/// is exactly a read of `iterator`.
fn read_array_indices(expr: &Expr, iterator: &str) -> Vec<(String, bool)> {
    let mut out = Vec::new();
    fn walk(expr: &Expr, iterator: &str, out: &mut Vec<(String, bool)>) {
        match expr {
            Expr::BinOp { lhs, rhs, .. } => {
                walk(lhs, iterator, out);
                walk(rhs, iterator, out);
            }
            Expr::Cond {
                cond,
                then_val,
                else_val,
                ..
            } => {
                walk(cond, iterator, out);
                walk(then_val, iterator, out);
                walk(else_val, iterator, out);
            }
            Expr::Read(lval) => {
                if let Some((a, index)) = lval.subscripted_array() {
                    out.push((a.to_string(), index.is_read_of(iterator)));
                    walk(index, iterator, out);
                }
            }
            _ => {}
        }
    }
    walk(expr, iterator, &mut out);
    out
}

fn stmt_assigns(stmt: &Stmt, x: &str) -> bool {
    let mut assigned = false;
    visit_stmts(stmt, &mut |s| match s {
        Stmt::Assign { target, .. } => {
            if target.subscripted_array().is_none() && target.root() == x {
                assigned = true;
            }
        }
        Stmt::For { iter, .. } if iter == x => assigned = true,
        _ => {}
    });
    assigned
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn fig1(size: i64, first_bound: i64) -> String {
        format!(
            "struct S {{ unsigned int p; unsigned int q; }} a[{size}]; int i, k;\nmain() {{\n for (i = 0; i < {first_bound}; i++) {{ k = i; a[i].p = k; a[i].q = k * k; }}\n for (i = 0; i < {size}; i++) {{ assert(a[i].q == a[i].p * a[i].p); }}\n}}"
        )
    }

    #[test]
    fn motivating_assertion_qualifies_via_relaxation() {
        let program = parse(&fig1(100000, 100000)).expect("parses");
        let report = classify_precision(&program);
        assert_eq!(report.asserts.len(), 1);
        let a = &report.asserts[0];
        assert!(a.in_loop);
        assert!(a.qualifies, "violated: {:?}", a.violated);
        assert!(a.violated.is_empty());
        assert!(a.relaxation_applied);
        assert_eq!(a.contributing_loops.len(), 1);
        assert!(report.all_qualify());
    }

    #[test]
    fn shrunk_first_loop_violates_l1() {
        let program = parse(&fig1(100000, 50000)).expect("parses");
        let report = classify_precision(&program);
        let a = &report.asserts[0];
        assert!(!a.qualifies);
        assert!(a.violated.contains(&Rule::L1));
    }

    #[test]
    fn partial_defining_loop_violates_l1() {
        let src = "int a[4]; int i;\nmain() { for (i = 1; i < 4; i++) { a[i] = i; } for (i = 0; i < 4; i++) { assert(a[i] >= 0); } }";
        let program = parse(src).expect("parses");
        let a = &classify_precision(&program).asserts[0];
        assert!(a.violated.contains(&Rule::L1));
    }

    #[test]
    fn non_iterator_read_violates_a2() {
        let src = "int a[4]; int i;\nmain() { for (i = 0; i < 4; i++) { a[i] = 1; } for (i = 0; i < 4; i++) { if (i < 3) { assert(a[i + 1] == 1); } } }";
        let program = parse(src).expect("parses");
        let a = &classify_precision(&program).asserts[0];
        assert!(a.violated.contains(&Rule::A2), "violated: {:?}", a.violated);
    }

    #[test]
    fn havocked_array_violates_a3() {
        let src = "int a[4]; int i;\nmain() { for (i = 0; i < 4; i++) { a[i] = 1; a[0] = 2; } for (i = 0; i < 4; i++) { assert(a[i] >= 0); } }";
        let program = parse(src).expect("parses");
        let a = &classify_precision(&program).asserts[0];
        assert!(a.violated.contains(&Rule::A3));
    }

    #[test]
    fn havocked_cone_scalar_violates_s4_without_relaxation() {
        // s feeds the assertion but is defined in a previous loop, so the
        // relaxation does not apply.
        let src = "int a[4]; int b[4]; int i, s;\nmain() { for (i = 0; i < 4; i++) { s = s + 1; a[i] = 1; } for (i = 0; i < 4; i++) { b[i] = 1; assert(b[i] == s); } }";
        let program = parse(src).expect("parses");
        let a = &classify_precision(&program).asserts[0];
        assert!(a.violated.contains(&Rule::S4), "violated: {:?}", a.violated);
    }

    #[test]
    fn relaxation_tolerates_iterator_derived_scalar_in_home_loop() {
        let src = "int a[4]; int i, t;\nmain() { for (i = 0; i < 4; i++) { a[i] = i * 2; } for (i = 0; i < 4; i++) { t = i * 2; assert(a[i] == t); } }";
        let program = parse(src).expect("parses");
        let a = &classify_precision(&program).asserts[0];
        assert!(a.qualifies, "violated: {:?}", a.violated);
        assert!(a.relaxation_applied);
    }

    #[test]
    fn conditional_redefinition_defeats_the_relaxation() {
        let src = "int a[4]; int i, t, s;\nmain() { for (i = 0; i < 4; i++) { a[i] = i; } for (i = 0; i < 4; i++) { t = i; if (s < 2) { t = s; } assert(a[i] == t); } }";
        let program = parse(src).expect("parses");
        let a = &classify_precision(&program).asserts[0];
        assert!(a.violated.contains(&Rule::S4), "violated: {:?}", a.violated);
    }

    #[test]
    fn compound_write_of_havocked_scalar_violates_d6() {
        let src = "int a[4]; int i, s;\nmain() { for (i = 0; i < 4; i++) { s = s + 1; a[i] = s * 2; } for (i = 0; i < 4; i++) { assert(a[i] >= 0); } }";
        let program = parse(src).expect("parses");
        let a = &classify_precision(&program).asserts[0];
        assert!(a.violated.contains(&Rule::D6), "violated: {:?}", a.violated);
    }

    #[test]
    fn iterator_derived_write_scalar_is_relaxed_like_fig1() {
        let src = "int a[4]; int i, k;\nmain() { for (i = 0; i < 4; i++) { k = i; a[i] = k * k; } for (i = 0; i < 4; i++) { assert(a[i] == i * i); } }";
        let program = parse(src).expect("parses");
        let a = &classify_precision(&program).asserts[0];
        assert!(a.qualifies, "violated: {:?}", a.violated);
        assert!(a.relaxation_applied);
    }

    #[test]
    fn out_of_loop_assertion_is_non_qualifying_without_rules() {
        let src = "int a[2]; main() { a[0] = 1; assert(a[0] == 1); }";
        let program = parse(src).expect("parses");
        let a = &classify_precision(&program).asserts[0];
        assert!(!a.in_loop);
        assert!(!a.qualifies);
        assert!(a.violated.is_empty());
    }

    #[test]
    fn no_assertions_yield_empty_report() {
        let program = parse("int x; x = 1;").expect("parses");
        let report = classify_precision(&program);
        assert!(report.asserts.is_empty());
        assert!(!report.all_qualify());
    }

    #[test]
    fn defining_loops_close_transitively() {
        let src = "int a[3]; int b[3]; int i, s, t;\nmain() { for (i = 0; i < 3; i++) { s = i; b[i] = s; } for (i = 0; i < 3; i++) { t = b[i]; a[i] = t; } for (i = 0; i < 3; i++) { assert(a[i] >= 0); } }";
        let program = parse(src).expect("parses");
        let a = &classify_precision(&program).asserts[0];
        // Both feeding loops contribute: the second defines a, the first
        // defines b which the second reads.
        assert_eq!(a.contributing_loops.len(), 2);
    }

    #[test]
    fn adding_a_havocked_dependency_flips_s4() {
        let qualifying = "int a[4]; int i, t; int u;\nmain() { for (i = 0; i < 4; i++) { a[i] = i; } for (i = 0; i < 4; i++) { t = i; assert(a[i] == t); } }";
        let program = parse(qualifying).expect("parses");
        assert!(classify_precision(&program).all_qualify());

        // Same program with the assertion's scalar modified in the
        // defining loop.
        let mutated = "int a[4]; int i, t; int u;\nmain() { for (i = 0; i < 4; i++) { a[i] = i; t = u + 1; } for (i = 0; i < 4; i++) { t = i; assert(a[i] == t); } }";
        let program = parse(mutated).expect("parses");
        let a = &classify_precision(&program).asserts[0];
        assert!(a.violated.contains(&Rule::S4), "violated: {:?}", a.violated);
    }
}
