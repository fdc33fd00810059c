//! The source-to-source rewrite that removes arrays and loops.
//!
//! Each array `a` gets a witness index `i_a`, initialized at program start
//! to a nondeterministic value in `[0, lastof(a)]`, and a witness variable
//! `x_a` of the element type standing in for `a[i_a]`. Array accesses are
//! rewritten to conditional reads/writes of the witness variable, guarded
//! by the index expression matching the witness index. Loop headers are
//! removed: a loop that walks an entire array runs its body once with the
//! iterator pinned to the witness index; any other loop runs its body at
//! most once behind a nondeterministic guard with the iterator set to a
//! nondeterministic value from the loop's bounds. Variables the loop may
//! modify are havocked before and after the body.

use crate::analysis::{
    array_inventory, fullarrayaccess, lastof, loopdefs, static_bounds, ArrayInfo, ModSet,
};
use crate::ast::*;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

/// Witness index / witness variable pair for one array.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessPair {
    pub array: String,
    pub index_var: String,
    pub value_var: String,
    pub size: i64,
    pub elem: ElemType,
}

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("{span}: input already contains a nondeterministic choice")]
    InputContainsNd { span: Span },
}

/// Integer width and signedness used when a loop bound cannot be
/// determined statically.
#[derive(Clone, Copy, Debug)]
pub struct TransformConfig {
    pub int_width: u32,
}

impl Default for TransformConfig {
    fn default() -> Self {
        TransformConfig { int_width: 32 }
    }
}

impl TransformConfig {
    /// Value range of a scalar type at the configured width.
    pub fn type_range(&self, ty: ScalarType) -> (i64, i64) {
        let w = self.int_width;
        match ty {
            ScalarType::Int => (-(1i64 << (w - 1)), (1i64 << (w - 1)) - 1),
            ScalarType::Uint => (0, (1i64 << w) - 1),
        }
    }
}

/// Per-rule application counts plus the fresh names introduced.
#[derive(Clone, Debug, Default, Serialize)]
pub struct TransformReport {
    pub e1: usize,
    pub e2: usize,
    pub e3: usize,
    pub s1: usize,
    pub s2: usize,
    pub s3: usize,
    pub s4: usize,
    pub s5: usize,
    pub s6: usize,
    pub s7: usize,
    pub s8: usize,
    pub s9: usize,
    pub p: usize,
    pub fresh: Vec<WitnessPair>,
}

impl TransformReport {
    /// Loops eliminated in total; equals the number of `for` nodes in the
    /// input.
    pub fn loops_eliminated(&self) -> usize {
        self.s3 + self.s4
    }
}

/// Iterator range used when a loop body runs behind a nondeterministic
/// guard: the static bounds when known, otherwise the full range of the
/// iterator's integer type.
pub fn loopbound(
    loop_stmt: &Stmt,
    iter_type: ScalarType,
    config: &TransformConfig,
) -> (i64, i64) {
    static_bounds(loop_stmt).unwrap_or_else(|| config.type_range(iter_type))
}

struct Rewriter<'a> {
    program: &'a Program,
    arrays: Vec<ArrayInfo>,
    pairs: BTreeMap<String, WitnessPair>,
    decl_order: BTreeMap<String, usize>,
    report: TransformReport,
}

/// Applies the rewrite to a whole program.
pub fn transform_program(
    program: &Program,
    config: &TransformConfig,
) -> Result<(Program, TransformReport), TransformError> {
    let mut nd_span = None;
    visit_exprs(&program.body, &mut |e| {
        if nd_span.is_none() && matches!(e, Expr::Nd { .. } | Expr::NdRange { .. }) {
            nd_span = Some(e.span());
        }
    });
    if let Some(span) = nd_span {
        return Err(TransformError::InputContainsNd { span });
    }

    let arrays = array_inventory(program);
    let pairs = witness_pairs(program, &arrays);

    let mut decls = Vec::new();
    for d in &program.decls {
        match &d.ty {
            VarType::Array { elem, .. } => {
                let pair = &pairs[&d.name];
                decls.push(VarDecl {
                    name: pair.value_var.clone(),
                    ty: match elem {
                        ElemType::Scalar(t) => VarType::Scalar(*t),
                        ElemType::Record(tag) => VarType::Record(tag.clone()),
                    },
                    span: d.span,
                });
                decls.push(VarDecl {
                    name: pair.index_var.clone(),
                    ty: VarType::Scalar(ScalarType::Int),
                    span: d.span,
                });
            }
            _ => decls.push(d.clone()),
        }
    }

    let decl_order = program
        .decls
        .iter()
        .enumerate()
        .map(|(i, d)| (d.name.clone(), i))
        .collect();

    let mut rewriter = Rewriter {
        program,
        arrays: arrays.clone(),
        pairs,
        decl_order,
        report: TransformReport::default(),
    };

    let mut stmts = Vec::new();
    for info in &arrays {
        let pair = &rewriter.pairs[&info.name];
        stmts.push(Stmt::Assign {
            target: Lval::Var {
                name: pair.index_var.clone(),
                span: info.span,
            },
            value: Expr::NdRange {
                lo: 0,
                hi: lastof(info.size),
                span: info.span,
            },
            span: info.span,
        });
    }
    stmts.push(rewriter.stmt(&program.body, config));
    rewriter.report.p = 1;
    rewriter.report.fresh = rewriter.pairs.values().cloned().collect();

    let transformed = Program {
        records: program.records.clone(),
        decls,
        body: Stmt::seq(stmts),
    };
    Ok((transformed, rewriter.report))
}

/// Chooses collision-free `i_<array>` / `x_<array>` names for every array,
/// in declaration order.
fn witness_pairs(program: &Program, arrays: &[ArrayInfo]) -> BTreeMap<String, WitnessPair> {
    let mut used: std::collections::BTreeSet<String> = program
        .decls
        .iter()
        .map(|d| d.name.clone())
        .chain(program.records.iter().map(|r| r.tag.clone()))
        .chain(
            program
                .records
                .iter()
                .flat_map(|r| r.fields.iter().map(|f| f.name.clone())),
        )
        .collect();
    let mut fresh = |base: String| -> String {
        if used.insert(base.clone()) {
            return base;
        }
        let mut n = 1;
        loop {
            let candidate = format!("{base}{n}");
            if used.insert(candidate.clone()) {
                return candidate;
            }
            n += 1;
        }
    };

    let mut pairs = BTreeMap::new();
    for info in arrays {
        let index_var = fresh(format!("i_{}", info.name));
        let value_var = fresh(format!("x_{}", info.name));
        pairs.insert(
            info.name.clone(),
            WitnessPair {
                array: info.name.clone(),
                index_var,
                value_var,
                size: info.size,
                elem: info.elem.clone(),
            },
        );
    }
    pairs
}

impl<'a> Rewriter<'a> {
    fn stmt(&mut self, stmt: &Stmt, config: &TransformConfig) -> Stmt {
        match stmt {
            Stmt::Assign {
                target,
                value,
                span,
            } => match target.subscripted_array() {
                Some(_) => self.array_write(target, value, *span, config),
                None => {
                    self.report.s2 += 1;
                    Stmt::Assign {
                        target: target.clone(),
                        value: self.expr(value, config),
                        span: *span,
                    }
                }
            },
            Stmt::For { .. } => self.lower_loop(stmt, config),
            Stmt::If {
                cond,
                then_branch,
                else_branch,
                span,
            } => {
                match else_branch {
                    Some(_) => self.report.s5 += 1,
                    None => self.report.s6 += 1,
                }
                Stmt::If {
                    cond: self.expr(cond, config),
                    then_branch: Box::new(self.stmt(then_branch, config)),
                    else_branch: else_branch
                        .as_ref()
                        .map(|e| Box::new(self.stmt(e, config))),
                    span: *span,
                }
            }
            Stmt::Seq(stmts) => {
                self.report.s7 += stmts.len().saturating_sub(1);
                Stmt::Seq(stmts.iter().map(|s| self.stmt(s, config)).collect())
            }
            Stmt::Assert { cond, span } => {
                self.report.s8 += 1;
                Stmt::Assert {
                    cond: self.expr(cond, config),
                    span: *span,
                }
            }
            other => {
                self.report.s9 += 1;
                other.clone()
            }
        }
    }

    /// `a[E1] = E2` / `a[E1].f = E2` becomes a guarded assignment to the
    /// witness variable; on the mismatch path the right-hand side is still
    /// evaluated for effect.
    fn array_write(
        &mut self,
        target: &Lval,
        value: &Expr,
        span: Span,
        config: &TransformConfig,
    ) -> Stmt {
        self.report.s1 += 1;
        let (array, index) = target.subscripted_array().expect("array write");
        let array = array.to_string();
        let index = index.clone();
        let pair = self.pairs[&array].clone();

        let witness_target = match target {
            Lval::ArrayAccess { span, .. } => Lval::Var {
                name: pair.value_var.clone(),
                span: *span,
            },
            Lval::Field {
                base, field, span, ..
            } => Lval::Field {
                base: Box::new(Lval::Var {
                    name: pair.value_var.clone(),
                    span: base.span(),
                }),
                field: field.clone(),
                span: *span,
            },
            Lval::Var { .. } => unreachable!("subscripted_array returned Some"),
        };

        let rhs = self.expr(value, config);
        Stmt::GuardedAssign {
            cond: self.witness_match(&index, &pair, config),
            target: witness_target,
            else_value: rhs.clone(),
            value: rhs,
            span,
        }
    }

    /// `(transform(E1) == i_a)`
    fn witness_match(
        &mut self,
        index: &Expr,
        pair: &WitnessPair,
        config: &TransformConfig,
    ) -> Expr {
        let span = index.span();
        Expr::BinOp {
            op: BinOp::Eq,
            lhs: Box::new(self.expr(index, config)),
            rhs: Box::new(Expr::Read(Lval::Var {
                name: pair.index_var.clone(),
                span,
            })),
            span,
        }
    }

    fn lower_loop(&mut self, loop_stmt: &Stmt, config: &TransformConfig) -> Stmt {
        let Stmt::For {
            iter, body, span, ..
        } = loop_stmt
        else {
            unreachable!("lower_loop called on a non-loop");
        };

        let defs = loopdefs(loop_stmt);
        let full_access: Vec<String> = self
            .arrays
            .iter()
            .filter(|a| fullarrayaccess(loop_stmt, a))
            .map(|a| a.name.clone())
            .collect();
        let havocs = self.havoc_stmts(&defs, *span);

        if let Some(bound_array) = full_access.first() {
            // The loop walks `bound_array` completely: run the body once
            // with the iterator pinned to the witness index.
            self.report.s3 += 1;
            let pair = self.pairs[bound_array].clone();
            let body = self.stmt(body, config);
            let mut stmts = havocs.clone();
            stmts.push(Stmt::Assign {
                target: Lval::Var {
                    name: iter.clone(),
                    span: *span,
                },
                value: Expr::Read(Lval::Var {
                    name: pair.index_var,
                    span: *span,
                }),
                span: *span,
            });
            stmts.push(body);
            stmts.extend(havocs);
            Stmt::seq(stmts)
        } else {
            // Partial or unknown access: the body runs at most once behind
            // a nondeterministic guard, with the iterator drawn from the
            // loop's bounds.
            self.report.s4 += 1;
            let iter_type = match self.program.decl(iter).map(|d| &d.ty) {
                Some(VarType::Scalar(t)) => *t,
                _ => ScalarType::Int,
            };
            let iter_value = match static_bounds(loop_stmt) {
                Some((lo, hi)) => Expr::NdRange {
                    lo,
                    hi,
                    span: *span,
                },
                None => {
                    let _ = loopbound(loop_stmt, iter_type, config);
                    Expr::Nd { span: *span }
                }
            };
            let body = self.stmt(body, config);
            let mut guarded = havocs.clone();
            guarded.push(Stmt::Assign {
                target: Lval::Var {
                    name: iter.clone(),
                    span: *span,
                },
                value: iter_value,
                span: *span,
            });
            guarded.push(body);

            let mut stmts = vec![Stmt::If {
                cond: Expr::NdRange {
                    lo: 0,
                    hi: 1,
                    span: *span,
                },
                then_branch: Box::new(Stmt::seq(guarded)),
                else_branch: None,
                span: *span,
            }];
            stmts.extend(havocs);
            Stmt::seq(stmts)
        }
    }

    /// `u = nd();` for every modified variable, in declaration order.
    /// Record variables are havocked field by field; an array stands in
    /// for its witness variable.
    fn havoc_stmts(&self, defs: &ModSet, span: Span) -> Vec<Stmt> {
        let mut names: Vec<&String> = defs.scalars.iter().chain(defs.arrays.iter()).collect();
        names.sort_by_key(|n| self.decl_order.get(*n).copied().unwrap_or(usize::MAX));

        let mut stmts = Vec::new();
        for name in names {
            let decl = match self.program.decl(name) {
                Some(d) => d,
                None => continue,
            };
            let (target_name, ty) = match &decl.ty {
                VarType::Array { elem, .. } => {
                    let pair = &self.pairs[name];
                    (
                        pair.value_var.clone(),
                        match elem {
                            ElemType::Scalar(t) => VarType::Scalar(*t),
                            ElemType::Record(tag) => VarType::Record(tag.clone()),
                        },
                    )
                }
                other => (name.clone(), other.clone()),
            };
            match &ty {
                VarType::Record(tag) => {
                    let fields: Vec<String> = self
                        .program
                        .record(tag)
                        .map(|r| r.fields.iter().map(|f| f.name.clone()).collect())
                        .unwrap_or_default();
                    for f in fields {
                        stmts.push(Stmt::Assign {
                            target: Lval::Field {
                                base: Box::new(Lval::Var {
                                    name: target_name.clone(),
                                    span,
                                }),
                                field: f,
                                span,
                            },
                            value: Expr::Nd { span },
                            span,
                        });
                    }
                }
                _ => stmts.push(Stmt::Assign {
                    target: Lval::Var {
                        name: target_name.clone(),
                        span,
                    },
                    value: Expr::Nd { span },
                    span,
                }),
            }
        }
        stmts
    }

    fn expr(&mut self, expr: &Expr, config: &TransformConfig) -> Expr {
        match expr {
            Expr::BinOp { op, lhs, rhs, span } => {
                self.report.e1 += 1;
                Expr::BinOp {
                    op: *op,
                    lhs: Box::new(self.expr(lhs, config)),
                    rhs: Box::new(self.expr(rhs, config)),
                    span: *span,
                }
            }
            Expr::Read(lval) => match lval.subscripted_array() {
                Some((array, index)) => {
                    self.report.e2 += 1;
                    let array = array.to_string();
                    let index = index.clone();
                    let pair = self.pairs[&array].clone();
                    let witness_read = match lval {
                        Lval::ArrayAccess { span, .. } => Expr::Read(Lval::Var {
                            name: pair.value_var.clone(),
                            span: *span,
                        }),
                        Lval::Field { field, span, .. } => Expr::Read(Lval::Field {
                            base: Box::new(Lval::Var {
                                name: pair.value_var.clone(),
                                span: *span,
                            }),
                            field: field.clone(),
                            span: *span,
                        }),
                        Lval::Var { .. } => unreachable!("subscripted_array returned Some"),
                    };
                    let span = lval.span();
                    Expr::Cond {
                        cond: Box::new(self.witness_match(&index, &pair, config)),
                        then_val: Box::new(witness_read),
                        else_val: Box::new(Expr::Nd { span }),
                        span,
                    }
                }
                None => {
                    self.report.e3 += 1;
                    expr.clone()
                }
            },
            Expr::Const { .. } => {
                self.report.e3 += 1;
                expr.clone()
            }
            // Transformed-only forms cannot occur in checked input; keep
            // them unchanged if they do.
            other => other.clone(),
        }
    }
}
