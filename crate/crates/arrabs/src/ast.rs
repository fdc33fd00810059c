//! Abstract syntax for the C subset accepted by the frontend and for the
//! loop-free, array-free programs produced by the transformation.
//!
//! Input programs use declarations, `if`/`for`/sequence/assignment/`assert`
//! statements and effect-free expressions over scalars, one-dimensional
//! arrays and flat structs. Transformed programs additionally contain
//! `nd()` / `nd(l,u)` nondeterministic choices, conditional expressions and
//! guarded assignments, and contain no loops and no array subscripts.

use serde::Serialize;
use std::fmt;

/// Line/column position of a node in the source text (1-based).
/// Synthesized nodes carry [`Span::DUMMY`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Default, Serialize)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub const DUMMY: Span = Span { line: 0, col: 0 };

    pub fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }

    pub fn is_dummy(&self) -> bool {
        *self == Span::DUMMY
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Scalar base types. Booleans are represented as 0/1 integers.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum ScalarType {
    Int,
    Uint,
}

impl fmt::Display for ScalarType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarType::Int => write!(f, "int"),
            ScalarType::Uint => write!(f, "unsigned int"),
        }
    }
}

/// One field of a struct definition.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct FieldDecl {
    pub name: String,
    pub ty: ScalarType,
}

/// A named struct definition (`struct S { ... };`).
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct RecordDef {
    pub tag: String,
    pub fields: Vec<FieldDecl>,
    pub span: Span,
}

/// Element type of an array declaration.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub enum ElemType {
    Scalar(ScalarType),
    /// Struct tag; fields are looked up in [`Program::records`].
    Record(String),
}

/// The declared type of a variable.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub enum VarType {
    Scalar(ScalarType),
    /// Struct tag.
    Record(String),
    Array { elem: ElemType, size: i64 },
}

impl VarType {
    pub fn is_array(&self) -> bool {
        matches!(self, VarType::Array { .. })
    }
}

/// A single variable declaration.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct VarDecl {
    pub name: String,
    pub ty: VarType,
    pub span: Span,
}

/// Binary operators. Relational and logical operators yield 0/1.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(&self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    pub fn is_comparison(&self) -> bool {
        matches!(
            self,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq | BinOp::Ne
        )
    }
}

/// Lvalues: plain variables, array subscripts and struct field accesses.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub enum Lval {
    Var {
        name: String,
        span: Span,
    },
    ArrayAccess {
        array: String,
        index: Box<Expr>,
        span: Span,
    },
    Field {
        base: Box<Lval>,
        field: String,
        span: Span,
    },
}

impl Lval {
    pub fn span(&self) -> Span {
        match self {
            Lval::Var { span, .. } | Lval::ArrayAccess { span, .. } | Lval::Field { span, .. } => {
                *span
            }
        }
    }

    /// The array subscripted by this lvalue, if any (`a[e]` or `a[e].f`).
    pub fn subscripted_array(&self) -> Option<(&str, &Expr)> {
        match self {
            Lval::ArrayAccess { array, index, .. } => Some((array, index)),
            Lval::Field { base, .. } => base.subscripted_array(),
            Lval::Var { .. } => None,
        }
    }

    /// The root variable name (`a` for `a[e].f`, `x` for `x.f`).
    pub fn root(&self) -> &str {
        match self {
            Lval::Var { name, .. } => name,
            Lval::ArrayAccess { array, .. } => array,
            Lval::Field { base, .. } => base.root(),
        }
    }
}

/// Expressions. `Cond`, `Nd` and `NdRange` occur only in transformed
/// programs; the strict input parser rejects them.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub enum Expr {
    BinOp {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
        span: Span,
    },
    Read(Lval),
    Const {
        value: i64,
        span: Span,
    },
    /// C conditional expression `(cond) ? then_val : else_val`.
    Cond {
        cond: Box<Expr>,
        then_val: Box<Expr>,
        else_val: Box<Expr>,
        span: Span,
    },
    /// `nd()` — a nondeterministic value of the expression's type.
    Nd {
        span: Span,
    },
    /// `nd(lo, hi)` — a nondeterministic value in `[lo, hi]`.
    NdRange {
        lo: i64,
        hi: i64,
        span: Span,
    },
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::BinOp { span, .. }
            | Expr::Const { span, .. }
            | Expr::Cond { span, .. }
            | Expr::Nd { span }
            | Expr::NdRange { span, .. } => *span,
            Expr::Read(lval) => lval.span(),
        }
    }

    pub fn constant(value: i64) -> Expr {
        Expr::Const {
            value,
            span: Span::DUMMY,
        }
    }

    pub fn read_var(name: &str) -> Expr {
        Expr::Read(Lval::Var {
            name: name.to_string(),
            span: Span::DUMMY,
        })
    }

    /// True when the expression is a bare integer literal.
    pub fn is_literal(&self) -> bool {
        matches!(self, Expr::Const { .. })
    }

    /// True when the expression is exactly a read of the named variable.
    pub fn is_read_of(&self, name: &str) -> bool {
        matches!(self, Expr::Read(Lval::Var { name: n, .. }) if n == name)
    }
}

/// The third component of a `for` header.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub enum Step {
    /// `i++` / `++i`
    IncOne,
    /// `i--` / `--i`
    DecOne,
    /// `i = <expr>`
    Assign(Expr),
}

/// Statements. `GuardedAssign` occurs only in transformed programs.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub enum Stmt {
    /// A braced sequence of statements.
    Seq(Vec<Stmt>),
    If {
        cond: Expr,
        then_branch: Box<Stmt>,
        else_branch: Option<Box<Stmt>>,
        span: Span,
    },
    For {
        iter: String,
        init: Expr,
        test: Expr,
        step: Step,
        body: Box<Stmt>,
        span: Span,
    },
    Assign {
        target: Lval,
        value: Expr,
        span: Span,
    },
    /// `(cond) ? target = value : else_value;` — the conditional
    /// assignment emitted for array writes.
    GuardedAssign {
        cond: Expr,
        target: Lval,
        value: Expr,
        else_value: Expr,
        span: Span,
    },
    Assert {
        cond: Expr,
        span: Span,
    },
    /// An empty statement (`;`).
    Empty {
        span: Span,
    },
}

impl Stmt {
    pub fn span(&self) -> Span {
        match self {
            Stmt::Seq(stmts) => stmts.first().map(Stmt::span).unwrap_or(Span::DUMMY),
            Stmt::If { span, .. }
            | Stmt::For { span, .. }
            | Stmt::Assign { span, .. }
            | Stmt::GuardedAssign { span, .. }
            | Stmt::Assert { span, .. }
            | Stmt::Empty { span } => *span,
        }
    }

    /// Wraps a list of statements as a single statement without
    /// introducing single-element or empty sequences.
    pub fn seq(mut stmts: Vec<Stmt>) -> Stmt {
        stmts.retain(|s| !matches!(s, Stmt::Empty { .. }));
        match stmts.len() {
            0 => Stmt::Empty { span: Span::DUMMY },
            1 => stmts.pop().unwrap(),
            _ => Stmt::Seq(stmts),
        }
    }
}

/// A complete program: struct definitions, variable declarations and a body.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Program {
    pub records: Vec<RecordDef>,
    pub decls: Vec<VarDecl>,
    pub body: Stmt,
}

impl Program {
    pub fn decl(&self, name: &str) -> Option<&VarDecl> {
        self.decls.iter().find(|d| d.name == name)
    }

    pub fn record(&self, tag: &str) -> Option<&RecordDef> {
        self.records.iter().find(|r| r.tag == tag)
    }

    /// Fields of a variable's record type, if it has one.
    pub fn fields_of(&self, ty: &VarType) -> Option<&[FieldDecl]> {
        let tag = match ty {
            VarType::Record(tag) => tag,
            VarType::Array {
                elem: ElemType::Record(tag),
                ..
            } => tag,
            _ => return None,
        };
        self.record(tag).map(|r| r.fields.as_slice())
    }

    /// A copy with all spans dropped and sequences flattened, suitable for
    /// structural comparison.
    pub fn normalized(&self) -> Program {
        Program {
            records: self
                .records
                .iter()
                .map(|r| RecordDef {
                    tag: r.tag.clone(),
                    fields: r.fields.clone(),
                    span: Span::DUMMY,
                })
                .collect(),
            decls: self
                .decls
                .iter()
                .map(|d| VarDecl {
                    name: d.name.clone(),
                    ty: d.ty.clone(),
                    span: Span::DUMMY,
                })
                .collect(),
            body: normalize_stmt(&self.body),
        }
    }

    /// Structural equality modulo spans and sequence nesting.
    pub fn structurally_eq(&self, other: &Program) -> bool {
        self.normalized() == other.normalized()
    }
}

fn normalize_stmt(stmt: &Stmt) -> Stmt {
    match stmt {
        Stmt::Seq(stmts) => {
            let mut flat = Vec::new();
            flatten_into(stmts, &mut flat);
            Stmt::seq(flat)
        }
        Stmt::If {
            cond,
            then_branch,
            else_branch,
            ..
        } => Stmt::If {
            cond: normalize_expr(cond),
            then_branch: Box::new(normalize_stmt(then_branch)),
            else_branch: else_branch.as_ref().map(|s| Box::new(normalize_stmt(s))),
            span: Span::DUMMY,
        },
        Stmt::For {
            iter,
            init,
            test,
            step,
            body,
            ..
        } => Stmt::For {
            iter: iter.clone(),
            init: normalize_expr(init),
            test: normalize_expr(test),
            step: match step {
                Step::IncOne => Step::IncOne,
                Step::DecOne => Step::DecOne,
                Step::Assign(e) => Step::Assign(normalize_expr(e)),
            },
            body: Box::new(normalize_stmt(body)),
            span: Span::DUMMY,
        },
        Stmt::Assign { target, value, .. } => Stmt::Assign {
            target: normalize_lval(target),
            value: normalize_expr(value),
            span: Span::DUMMY,
        },
        Stmt::GuardedAssign {
            cond,
            target,
            value,
            else_value,
            ..
        } => Stmt::GuardedAssign {
            cond: normalize_expr(cond),
            target: normalize_lval(target),
            value: normalize_expr(value),
            else_value: normalize_expr(else_value),
            span: Span::DUMMY,
        },
        Stmt::Assert { cond, .. } => Stmt::Assert {
            cond: normalize_expr(cond),
            span: Span::DUMMY,
        },
        Stmt::Empty { .. } => Stmt::Empty { span: Span::DUMMY },
    }
}

fn flatten_into(stmts: &[Stmt], out: &mut Vec<Stmt>) {
    for s in stmts {
        match s {
            Stmt::Seq(inner) => flatten_into(inner, out),
            Stmt::Empty { .. } => {}
            other => out.push(normalize_stmt(other)),
        }
    }
}

fn normalize_lval(lval: &Lval) -> Lval {
    match lval {
        Lval::Var { name, .. } => Lval::Var {
            name: name.clone(),
            span: Span::DUMMY,
        },
        Lval::ArrayAccess { array, index, .. } => Lval::ArrayAccess {
            array: array.clone(),
            index: Box::new(normalize_expr(index)),
            span: Span::DUMMY,
        },
        Lval::Field { base, field, .. } => Lval::Field {
            base: Box::new(normalize_lval(base)),
            field: field.clone(),
            span: Span::DUMMY,
        },
    }
}

fn normalize_expr(expr: &Expr) -> Expr {
    match expr {
        Expr::BinOp { op, lhs, rhs, .. } => Expr::BinOp {
            op: *op,
            lhs: Box::new(normalize_expr(lhs)),
            rhs: Box::new(normalize_expr(rhs)),
            span: Span::DUMMY,
        },
        Expr::Read(lval) => Expr::Read(normalize_lval(lval)),
        Expr::Const { value, .. } => Expr::Const {
            value: *value,
            span: Span::DUMMY,
        },
        Expr::Cond {
            cond,
            then_val,
            else_val,
            ..
        } => Expr::Cond {
            cond: Box::new(normalize_expr(cond)),
            then_val: Box::new(normalize_expr(then_val)),
            else_val: Box::new(normalize_expr(else_val)),
            span: Span::DUMMY,
        },
        Expr::Nd { .. } => Expr::Nd { span: Span::DUMMY },
        Expr::NdRange { lo, hi, .. } => Expr::NdRange {
            lo: *lo,
            hi: *hi,
            span: Span::DUMMY,
        },
    }
}

/// Walks every statement in evaluation order, visiting nested bodies.
pub fn visit_stmts<'a>(stmt: &'a Stmt, f: &mut impl FnMut(&'a Stmt)) {
    f(stmt);
    match stmt {
        Stmt::Seq(stmts) => {
            for s in stmts {
                visit_stmts(s, f);
            }
        }
        Stmt::If {
            then_branch,
            else_branch,
            ..
        } => {
            visit_stmts(then_branch, f);
            if let Some(e) = else_branch {
                visit_stmts(e, f);
            }
        }
        Stmt::For { body, .. } => visit_stmts(body, f),
        _ => {}
    }
}

/// Walks every expression in a statement, including index expressions and
/// loop-header expressions.
pub fn visit_exprs<'a>(stmt: &'a Stmt, f: &mut impl FnMut(&'a Expr)) {
    fn expr<'a>(e: &'a Expr, f: &mut impl FnMut(&'a Expr)) {
        f(e);
        match e {
            Expr::BinOp { lhs, rhs, .. } => {
                expr(lhs, f);
                expr(rhs, f);
            }
            Expr::Read(lval) => lval_exprs(lval, f),
            Expr::Cond {
                cond,
                then_val,
                else_val,
                ..
            } => {
                expr(cond, f);
                expr(then_val, f);
                expr(else_val, f);
            }
            Expr::Const { .. } | Expr::Nd { .. } | Expr::NdRange { .. } => {}
        }
    }
    fn lval_exprs<'a>(l: &'a Lval, f: &mut impl FnMut(&'a Expr)) {
        match l {
            Lval::ArrayAccess { index, .. } => expr(index, f),
            Lval::Field { base, .. } => lval_exprs(base, f),
            Lval::Var { .. } => {}
        }
    }

    visit_stmts(stmt, &mut |s| match s {
        Stmt::If { cond, .. } => expr(cond, f),
        Stmt::For {
            init, test, step, ..
        } => {
            expr(init, f);
            expr(test, f);
            if let Step::Assign(e) = step {
                expr(e, f);
            }
        }
        Stmt::Assign { target, value, .. } => {
            lval_exprs(target, f);
            expr(value, f);
        }
        Stmt::GuardedAssign {
            cond,
            target,
            value,
            else_value,
            ..
        } => {
            expr(cond, f);
            lval_exprs(target, f);
            expr(value, f);
            expr(else_value, f);
        }
        Stmt::Assert { cond, .. } => expr(cond, f),
        Stmt::Seq(_) | Stmt::Empty { .. } => {}
    });
}
