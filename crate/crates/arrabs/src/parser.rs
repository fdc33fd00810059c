//! Recursive descent parser and type checker for the C subset.
//!
//! Two dialects are accepted. [`Dialect::Input`] is the strict source
//! language: declarations followed by an optional `main()` wrapper around
//! statements built from `if`, `for`, assignment, `assert` and sequencing.
//! [`Dialect::Transformed`] additionally accepts the constructs the
//! transformation emits — `nd()` / `nd(l,u)` calls, conditional
//! expressions and guarded assignment statements — so that emitted output
//! can be re-parsed.

use crate::ast::*;
use crate::lexer::{self, Token, TokenKind};
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Dialect {
    Input,
    Transformed,
}

#[derive(Clone, Debug)]
pub struct ParseOptions {
    pub dialect: Dialect,
    /// Accepted spellings of the zero-argument and ranged nondet calls.
    pub nd_names: (String, String),
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            dialect: Dialect::Input,
            nd_names: ("nd".to_string(), "nd".to_string()),
        }
    }
}

impl ParseOptions {
    pub fn transformed() -> Self {
        ParseOptions {
            dialect: Dialect::Transformed,
            ..ParseOptions::default()
        }
    }
}

/// What went wrong, attached to a source position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    Syntax,
    Type,
    Unsupported,
}

#[derive(Clone, Debug)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub span: Span,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            DiagnosticKind::Syntax => "syntax error",
            DiagnosticKind::Type => "type error",
            DiagnosticKind::Unsupported => "unsupported construct",
        };
        write!(f, "{}: {}: {}", self.span, kind, self.message)
    }
}

pub type ParseResult<T> = Result<T, Vec<Diagnostic>>;

/// Parses and type-checks a program in the strict input dialect.
pub fn parse(source: &str) -> ParseResult<Program> {
    parse_with(source, &ParseOptions::default())
}

/// Parses and type-checks a transformed program (nd calls allowed).
pub fn parse_transformed(source: &str) -> ParseResult<Program> {
    parse_with(source, &ParseOptions::transformed())
}

pub fn parse_with(source: &str, options: &ParseOptions) -> ParseResult<Program> {
    let tokens = lexer::tokenize(source).map_err(|e| {
        vec![Diagnostic {
            kind: DiagnosticKind::Syntax,
            span: e.span,
            message: e.message,
        }]
    })?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        options: options.clone(),
    };
    let program = parser.program().map_err(|d| vec![d])?;
    let diagnostics = check(&program, options.dialect);
    if diagnostics.is_empty() {
        Ok(program)
    } else {
        Err(diagnostics)
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    options: ParseOptions,
}

impl Parser {
    fn peek(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    fn peek_at(&self, n: usize) -> &TokenKind {
        let idx = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[idx].kind
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == kind {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Token, Diagnostic> {
        if self.peek() == &kind {
            Ok(self.bump())
        } else {
            Err(self.err_syntax(format!("expected {}, found {}", kind, self.peek())))
        }
    }

    fn err_syntax(&self, message: String) -> Diagnostic {
        Diagnostic {
            kind: DiagnosticKind::Syntax,
            span: self.span(),
            message,
        }
    }

    fn err_unsupported(&self, message: String) -> Diagnostic {
        Diagnostic {
            kind: DiagnosticKind::Unsupported,
            span: self.span(),
            message,
        }
    }

    fn program(&mut self) -> Result<Program, Diagnostic> {
        let mut records = Vec::new();
        let mut decls = Vec::new();
        loop {
            match self.peek() {
                TokenKind::KwStruct => self.struct_decl(&mut records, &mut decls)?,
                TokenKind::KwInt | TokenKind::KwUnsigned => {
                    // `int main()` is the start of the body, not a declaration.
                    if matches!(self.peek_at(1), TokenKind::KwMain) {
                        break;
                    }
                    let ty = self.scalar_type()?;
                    self.declarators(VarBase::Scalar(ty), &mut decls)?;
                }
                _ => break,
            }
        }

        let body = if matches!(self.peek(), TokenKind::KwInt | TokenKind::KwVoid)
            && matches!(self.peek_at(1), TokenKind::KwMain)
            || matches!(self.peek(), TokenKind::KwMain)
        {
            if matches!(self.peek(), TokenKind::KwInt | TokenKind::KwVoid) {
                self.bump();
            }
            self.expect(TokenKind::KwMain)?;
            self.expect(TokenKind::LParen)?;
            self.eat(&TokenKind::KwVoid);
            self.expect(TokenKind::RParen)?;
            self.expect(TokenKind::LBrace)?;
            let body = self.stmt_list(&TokenKind::RBrace)?;
            self.expect(TokenKind::RBrace)?;
            body
        } else {
            self.stmt_list(&TokenKind::Eof)?
        };
        self.expect(TokenKind::Eof)?;

        Ok(Program {
            records,
            decls,
            body,
        })
    }

    fn scalar_type(&mut self) -> Result<ScalarType, Diagnostic> {
        match self.peek() {
            TokenKind::KwInt => {
                self.bump();
                Ok(ScalarType::Int)
            }
            TokenKind::KwUnsigned => {
                self.bump();
                self.eat(&TokenKind::KwInt);
                Ok(ScalarType::Uint)
            }
            other => Err(self.err_syntax(format!("expected a type, found {other}"))),
        }
    }

    fn struct_decl(
        &mut self,
        records: &mut Vec<RecordDef>,
        decls: &mut Vec<VarDecl>,
    ) -> Result<(), Diagnostic> {
        let span = self.span();
        self.expect(TokenKind::KwStruct)?;
        let tag = self.ident()?;
        if self.eat(&TokenKind::LBrace) {
            let mut fields = Vec::new();
            while !self.eat(&TokenKind::RBrace) {
                let ty = self.scalar_type()?;
                let name = self.ident()?;
                self.expect(TokenKind::Semi)?;
                fields.push(FieldDecl { name, ty });
            }
            records.push(RecordDef { tag: tag.clone(), fields, span });
        }
        if self.eat(&TokenKind::Semi) {
            return Ok(());
        }
        self.declarators(VarBase::Record(tag), decls)
    }

    fn declarators(&mut self, base: VarBase, decls: &mut Vec<VarDecl>) -> Result<(), Diagnostic> {
        loop {
            let span = self.span();
            let name = self.ident()?;
            let ty = if self.eat(&TokenKind::LBracket) {
                let size = self.int_literal()?;
                self.expect(TokenKind::RBracket)?;
                if self.peek() == &TokenKind::LBracket {
                    return Err(self
                        .err_unsupported("multi-dimensional arrays are not supported".to_string()));
                }
                VarType::Array {
                    elem: match &base {
                        VarBase::Scalar(t) => ElemType::Scalar(*t),
                        VarBase::Record(tag) => ElemType::Record(tag.clone()),
                    },
                    size,
                }
            } else {
                match &base {
                    VarBase::Scalar(t) => VarType::Scalar(*t),
                    VarBase::Record(tag) => VarType::Record(tag.clone()),
                }
            };
            decls.push(VarDecl { name, ty, span });
            if self.eat(&TokenKind::Comma) {
                continue;
            }
            self.expect(TokenKind::Semi)?;
            return Ok(());
        }
    }

    fn ident(&mut self) -> Result<String, Diagnostic> {
        match self.peek().clone() {
            TokenKind::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.err_syntax(format!("expected identifier, found {other}"))),
        }
    }

    fn int_literal(&mut self) -> Result<i64, Diagnostic> {
        let neg = self.eat(&TokenKind::Minus);
        match self.peek().clone() {
            TokenKind::Int(v) => {
                self.bump();
                Ok(if neg { -v } else { v })
            }
            other => Err(self.err_syntax(format!("expected integer literal, found {other}"))),
        }
    }

    fn stmt_list(&mut self, terminator: &TokenKind) -> Result<Stmt, Diagnostic> {
        let mut stmts = Vec::new();
        while self.peek() != terminator {
            if self.peek() == &TokenKind::Eof {
                return Err(self.err_syntax(format!("expected {terminator}, found end of input")));
            }
            // Stray declarations inside the body are a common mistake;
            // report them specifically.
            if matches!(
                self.peek(),
                TokenKind::KwStruct | TokenKind::KwInt | TokenKind::KwUnsigned
            ) {
                return Err(self.err_syntax(
                    "declarations must appear before the program body".to_string(),
                ));
            }
            stmts.push(self.stmt()?);
        }
        Ok(Stmt::seq(stmts))
    }

    fn stmt(&mut self) -> Result<Stmt, Diagnostic> {
        let span = self.span();
        match self.peek() {
            TokenKind::Semi => {
                self.bump();
                Ok(Stmt::Empty { span })
            }
            TokenKind::LBrace => {
                self.bump();
                let body = self.stmt_list(&TokenKind::RBrace)?;
                self.expect(TokenKind::RBrace)?;
                Ok(body)
            }
            TokenKind::KwIf => {
                self.bump();
                self.expect(TokenKind::LParen)?;
                let cond = self.expr()?;
                self.expect(TokenKind::RParen)?;
                let then_branch = Box::new(self.stmt()?);
                let else_branch = if self.eat(&TokenKind::KwElse) {
                    Some(Box::new(self.stmt()?))
                } else {
                    None
                };
                Ok(Stmt::If {
                    cond,
                    then_branch,
                    else_branch,
                    span,
                })
            }
            TokenKind::KwFor => self.for_stmt(span),
            TokenKind::KwAssert => {
                self.bump();
                self.expect(TokenKind::LParen)?;
                let cond = self.expr()?;
                self.expect(TokenKind::RParen)?;
                self.expect(TokenKind::Semi)?;
                Ok(Stmt::Assert { cond, span })
            }
            TokenKind::KwElse => Err(self.err_syntax("`else` without matching `if`".to_string())),
            TokenKind::LParen if self.options.dialect == Dialect::Transformed => {
                self.guarded_or_expr_stmt(span)
            }
            TokenKind::Ident(_) => {
                let target = self.lval()?;
                self.expect(TokenKind::Assign)?;
                let value = self.expr()?;
                self.expect(TokenKind::Semi)?;
                Ok(Stmt::Assign {
                    target,
                    value,
                    span,
                })
            }
            other => Err(self.err_syntax(format!("expected a statement, found {other}"))),
        }
    }

    /// `(cond) ? lval = expr : expr ;` — the guarded-assignment statement
    /// emitted for array writes (transformed dialect only).
    fn guarded_or_expr_stmt(&mut self, span: Span) -> Result<Stmt, Diagnostic> {
        self.expect(TokenKind::LParen)?;
        let cond = self.expr()?;
        self.expect(TokenKind::RParen)?;
        self.expect(TokenKind::Question)?;
        let target = self.lval()?;
        self.expect(TokenKind::Assign)?;
        let value = self.expr()?;
        self.expect(TokenKind::Colon)?;
        let else_value = self.expr()?;
        self.expect(TokenKind::Semi)?;
        Ok(Stmt::GuardedAssign {
            cond,
            target,
            value,
            else_value,
            span,
        })
    }

    fn for_stmt(&mut self, span: Span) -> Result<Stmt, Diagnostic> {
        self.expect(TokenKind::KwFor)?;
        self.expect(TokenKind::LParen)?;
        let iter = self.ident()?;
        self.expect(TokenKind::Assign)?;
        let init = self.expr()?;
        self.expect(TokenKind::Semi)?;
        let test = self.expr()?;
        self.expect(TokenKind::Semi)?;
        let step = self.for_step(&iter)?;
        self.expect(TokenKind::RParen)?;
        let body = Box::new(self.stmt()?);
        Ok(Stmt::For {
            iter,
            init,
            test,
            step,
            body,
            span,
        })
    }

    fn for_step(&mut self, iter: &str) -> Result<Step, Diagnostic> {
        // Accepted shapes: i++, ++i, i--, --i, i = E, i += c.
        let prefix_inc = self.eat(&TokenKind::PlusPlus);
        let prefix_dec = !prefix_inc && self.eat(&TokenKind::MinusMinus);
        let name = self.ident()?;
        if name != iter {
            return Err(self.err_syntax(format!(
                "for-step must update the loop iterator `{iter}`, found `{name}`"
            )));
        }
        if prefix_inc {
            return Ok(Step::IncOne);
        }
        if prefix_dec {
            return Ok(Step::DecOne);
        }
        match self.peek() {
            TokenKind::PlusPlus => {
                self.bump();
                Ok(Step::IncOne)
            }
            TokenKind::MinusMinus => {
                self.bump();
                Ok(Step::DecOne)
            }
            TokenKind::Assign => {
                self.bump();
                Ok(Step::Assign(self.expr()?))
            }
            TokenKind::PlusAssign => {
                self.bump();
                let span = self.span();
                let amount = self.int_literal()?;
                Ok(Step::Assign(Expr::BinOp {
                    op: BinOp::Add,
                    lhs: Box::new(Expr::read_var(iter)),
                    rhs: Box::new(Expr::Const {
                        value: amount,
                        span,
                    }),
                    span,
                }))
            }
            other => Err(self.err_syntax(format!("expected a for-step, found {other}"))),
        }
    }

    fn lval(&mut self) -> Result<Lval, Diagnostic> {
        let span = self.span();
        let name = self.ident()?;
        let mut lval = if self.eat(&TokenKind::LBracket) {
            let index = self.expr()?;
            self.expect(TokenKind::RBracket)?;
            if self.peek() == &TokenKind::LBracket {
                return Err(
                    self.err_unsupported("multi-dimensional arrays are not supported".to_string())
                );
            }
            Lval::ArrayAccess {
                array: name,
                index: Box::new(index),
                span,
            }
        } else {
            Lval::Var { name, span }
        };
        if self.eat(&TokenKind::Dot) {
            let field_span = self.span();
            let field = self.ident()?;
            if self.peek() == &TokenKind::Dot {
                return Err(self.err_unsupported("nested field access is not supported".to_string()));
            }
            lval = Lval::Field {
                base: Box::new(lval),
                field,
                span: field_span,
            };
        }
        Ok(lval)
    }

    fn expr(&mut self) -> Result<Expr, Diagnostic> {
        let lhs = self.or_expr()?;
        if self.peek() == &TokenKind::Question {
            if self.options.dialect != Dialect::Transformed {
                return Err(self.err_unsupported(
                    "conditional expressions appear only in transformed programs".to_string(),
                ));
            }
            let span = self.span();
            self.bump();
            let then_val = self.expr()?;
            self.expect(TokenKind::Colon)?;
            let else_val = self.expr()?;
            return Ok(Expr::Cond {
                cond: Box::new(lhs),
                then_val: Box::new(then_val),
                else_val: Box::new(else_val),
                span,
            });
        }
        Ok(lhs)
    }

    fn or_expr(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.and_expr()?;
        while self.peek() == &TokenKind::OrOr {
            let span = self.span();
            self.bump();
            let rhs = self.and_expr()?;
            lhs = Expr::BinOp {
                op: BinOp::Or,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                span,
            };
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.cmp_expr()?;
        while self.peek() == &TokenKind::AndAnd {
            let span = self.span();
            self.bump();
            let rhs = self.cmp_expr()?;
            lhs = Expr::BinOp {
                op: BinOp::And,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                span,
            };
        }
        Ok(lhs)
    }

    fn cmp_expr(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.add_expr()?;
        loop {
            let op = match self.peek() {
                TokenKind::EqEq => BinOp::Eq,
                TokenKind::NotEq => BinOp::Ne,
                TokenKind::Lt => BinOp::Lt,
                TokenKind::Le => BinOp::Le,
                TokenKind::Gt => BinOp::Gt,
                TokenKind::Ge => BinOp::Ge,
                _ => return Ok(lhs),
            };
            let span = self.span();
            self.bump();
            let rhs = self.add_expr()?;
            lhs = Expr::BinOp {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                span,
            };
        }
    }

    fn add_expr(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                TokenKind::Plus => BinOp::Add,
                TokenKind::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let span = self.span();
            self.bump();
            let rhs = self.mul_expr()?;
            lhs = Expr::BinOp {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                span,
            };
        }
    }

    fn mul_expr(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.primary()?;
        loop {
            let op = match self.peek() {
                TokenKind::Star => BinOp::Mul,
                TokenKind::Slash => BinOp::Div,
                TokenKind::Percent => BinOp::Mod,
                _ => return Ok(lhs),
            };
            let span = self.span();
            self.bump();
            let rhs = self.primary()?;
            lhs = Expr::BinOp {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                span,
            };
        }
    }

    fn primary(&mut self) -> Result<Expr, Diagnostic> {
        let span = self.span();
        match self.peek().clone() {
            TokenKind::Int(value) => {
                self.bump();
                Ok(Expr::Const { value, span })
            }
            TokenKind::Minus => {
                self.bump();
                match self.peek().clone() {
                    TokenKind::Int(value) => {
                        self.bump();
                        Ok(Expr::Const {
                            value: -value,
                            span,
                        })
                    }
                    _ => Err(self.err_unsupported(
                        "unary minus is supported on integer literals only".to_string(),
                    )),
                }
            }
            TokenKind::Bang => {
                Err(self.err_unsupported("unary `!` is not supported".to_string()))
            }
            TokenKind::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(e)
            }
            TokenKind::Ident(name) => {
                if self.peek_at(1) == &TokenKind::LParen {
                    return self.nd_call(&name, span);
                }
                let lval = self.lval()?;
                Ok(Expr::Read(lval))
            }
            other => Err(self.err_syntax(format!("expected an expression, found {other}"))),
        }
    }

    fn nd_call(&mut self, name: &str, span: Span) -> Result<Expr, Diagnostic> {
        let (plain, range) = (
            self.options.nd_names.0.clone(),
            self.options.nd_names.1.clone(),
        );
        if name != plain && name != range {
            return Err(self.err_unsupported(format!("function calls are not supported: `{name}`")));
        }
        if self.options.dialect != Dialect::Transformed {
            return Err(self.err_unsupported(
                "nondeterministic choices appear only in transformed programs".to_string(),
            ));
        }
        self.bump(); // name
        self.expect(TokenKind::LParen)?;
        if self.eat(&TokenKind::RParen) {
            return Ok(Expr::Nd { span });
        }
        let lo = self.int_literal()?;
        self.expect(TokenKind::Comma)?;
        let hi = self.int_literal()?;
        self.expect(TokenKind::RParen)?;
        Ok(Expr::NdRange { lo, hi, span })
    }
}

enum VarBase {
    Scalar(ScalarType),
    Record(String),
}

/// The static type of an expression; records appear only behind lvalues.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum ExprType {
    Scalar(ScalarType),
    Record,
}

/// Name and type checking. Returns all diagnostics found.
pub fn check(program: &Program, dialect: Dialect) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut seen = std::collections::HashSet::new();

    for rec in &program.records {
        if rec.fields.is_empty() {
            diags.push(Diagnostic {
                kind: DiagnosticKind::Type,
                span: rec.span,
                message: format!("struct `{}` has no fields", rec.tag),
            });
        }
        if !seen.insert(format!("struct {}", rec.tag)) {
            diags.push(Diagnostic {
                kind: DiagnosticKind::Type,
                span: rec.span,
                message: format!("struct `{}` defined more than once", rec.tag),
            });
        }
    }
    for decl in &program.decls {
        if !seen.insert(decl.name.clone()) {
            diags.push(Diagnostic {
                kind: DiagnosticKind::Type,
                span: decl.span,
                message: format!("`{}` declared more than once", decl.name),
            });
        }
        match &decl.ty {
            VarType::Array { size, .. } if *size < 1 => diags.push(Diagnostic {
                kind: DiagnosticKind::Type,
                span: decl.span,
                message: format!("array `{}` must have size >= 1", decl.name),
            }),
            VarType::Record(tag)
            | VarType::Array {
                elem: ElemType::Record(tag),
                ..
            } if program.record(tag).is_none() => diags.push(Diagnostic {
                kind: DiagnosticKind::Type,
                span: decl.span,
                message: format!("unknown struct tag `{tag}`"),
            }),
            _ => {}
        }
    }

    let mut checker = Checker {
        program,
        dialect,
        diags,
    };
    checker.stmt(&program.body);
    checker.diags
}

struct Checker<'a> {
    program: &'a Program,
    dialect: Dialect,
    diags: Vec<Diagnostic>,
}

impl<'a> Checker<'a> {
    fn error(&mut self, span: Span, message: String) {
        self.diags.push(Diagnostic {
            kind: DiagnosticKind::Type,
            span,
            message,
        });
    }

    fn stmt(&mut self, stmt: &Stmt) {
        match stmt {
            Stmt::Seq(stmts) => {
                for s in stmts {
                    self.stmt(s);
                }
            }
            Stmt::If {
                cond,
                then_branch,
                else_branch,
                ..
            } => {
                self.scalar_expr(cond);
                self.stmt(then_branch);
                if let Some(e) = else_branch {
                    self.stmt(e);
                }
            }
            Stmt::For {
                iter,
                init,
                test,
                step,
                body,
                span,
            } => {
                match self.program.decl(iter).map(|d| &d.ty) {
                    Some(VarType::Scalar(_)) => {}
                    Some(_) => {
                        self.error(*span, format!("loop iterator `{iter}` must be a scalar"))
                    }
                    None => self.error(*span, format!("loop iterator `{iter}` is not declared")),
                }
                self.scalar_expr(init);
                self.scalar_expr(test);
                if let Step::Assign(e) = step {
                    self.scalar_expr(e);
                }
                self.stmt(body);
            }
            Stmt::Assign { target, value, .. } => {
                if let Some(ty) = self.lval_type(target) {
                    if ty == ExprType::Record {
                        self.error(
                            target.span(),
                            "whole-struct assignment is not supported".to_string(),
                        );
                    }
                }
                self.scalar_expr(value);
            }
            Stmt::GuardedAssign {
                cond,
                target,
                value,
                else_value,
                span,
            } => {
                if self.dialect != Dialect::Transformed {
                    self.diags.push(Diagnostic {
                        kind: DiagnosticKind::Unsupported,
                        span: *span,
                        message: "guarded assignments appear only in transformed programs"
                            .to_string(),
                    });
                }
                self.scalar_expr(cond);
                if let Some(ExprType::Record) = self.lval_type(target) {
                    self.error(
                        target.span(),
                        "whole-struct assignment is not supported".to_string(),
                    );
                }
                self.scalar_expr(value);
                self.scalar_expr(else_value);
            }
            Stmt::Assert { cond, .. } => self.scalar_expr(cond),
            Stmt::Empty { .. } => {}
        }
    }

    /// Checks that an expression is scalar-typed and flags misuse.
    fn scalar_expr(&mut self, expr: &Expr) {
        if let Some(ExprType::Record) = self.expr_type(expr) {
            self.error(
                expr.span(),
                "struct value used where a scalar is required".to_string(),
            );
        }
    }

    fn expr_type(&mut self, expr: &Expr) -> Option<ExprType> {
        match expr {
            Expr::BinOp { lhs, rhs, .. } => {
                let lt = self.expr_type(lhs);
                let rt = self.expr_type(rhs);
                for (side, t) in [(lhs, lt), (rhs, rt)] {
                    if t == Some(ExprType::Record) {
                        self.error(
                            side.span(),
                            "struct value used where a scalar is required".to_string(),
                        );
                    }
                }
                match (lt, rt) {
                    (Some(ExprType::Scalar(ScalarType::Uint)), _)
                    | (_, Some(ExprType::Scalar(ScalarType::Uint))) => {
                        Some(ExprType::Scalar(ScalarType::Uint))
                    }
                    _ => Some(ExprType::Scalar(ScalarType::Int)),
                }
            }
            Expr::Read(lval) => self.lval_type(lval),
            Expr::Const { .. } => Some(ExprType::Scalar(ScalarType::Int)),
            Expr::Cond {
                cond,
                then_val,
                else_val,
                span,
            } => {
                if self.dialect != Dialect::Transformed {
                    self.diags.push(Diagnostic {
                        kind: DiagnosticKind::Unsupported,
                        span: *span,
                        message: "conditional expressions appear only in transformed programs"
                            .to_string(),
                    });
                }
                self.scalar_expr(cond);
                let t = self.expr_type(then_val);
                self.scalar_expr(else_val);
                t
            }
            Expr::Nd { span } | Expr::NdRange { span, .. } => {
                if self.dialect != Dialect::Transformed {
                    self.diags.push(Diagnostic {
                        kind: DiagnosticKind::Unsupported,
                        span: *span,
                        message: "nondeterministic choices appear only in transformed programs"
                            .to_string(),
                    });
                }
                if let Expr::NdRange { lo, hi, span } = expr {
                    if lo > hi {
                        self.error(*span, format!("empty nd range [{lo}, {hi}]"));
                    }
                }
                Some(ExprType::Scalar(ScalarType::Int))
            }
        }
    }

    fn lval_type(&mut self, lval: &Lval) -> Option<ExprType> {
        match lval {
            Lval::Var { name, span } => match self.program.decl(name).map(|d| d.ty.clone()) {
                Some(VarType::Scalar(t)) => Some(ExprType::Scalar(t)),
                Some(VarType::Record(_)) => Some(ExprType::Record),
                Some(VarType::Array { .. }) => {
                    self.error(*span, format!("array `{name}` used without a subscript"));
                    None
                }
                None => {
                    self.error(*span, format!("`{name}` is not declared"));
                    None
                }
            },
            Lval::ArrayAccess { array, index, span } => {
                self.scalar_expr(index);
                match self.program.decl(array).map(|d| d.ty.clone()) {
                    Some(VarType::Array { elem, .. }) => match elem {
                        ElemType::Scalar(t) => Some(ExprType::Scalar(t)),
                        ElemType::Record(_) => Some(ExprType::Record),
                    },
                    Some(_) => {
                        self.error(*span, format!("`{array}` is not an array"));
                        None
                    }
                    None => {
                        self.error(*span, format!("`{array}` is not declared"));
                        None
                    }
                }
            }
            Lval::Field { base, field, span } => {
                let base_ty = match &**base {
                    Lval::Var { name, .. } => self.program.decl(name).map(|d| d.ty.clone()),
                    Lval::ArrayAccess { array, index, .. } => {
                        self.scalar_expr(index);
                        self.program.decl(array).map(|d| d.ty.clone())
                    }
                    Lval::Field { .. } => {
                        self.diags.push(Diagnostic {
                            kind: DiagnosticKind::Unsupported,
                            span: *span,
                            message: "nested field access is not supported".to_string(),
                        });
                        return None;
                    }
                };
                let tag = match base_ty {
                    Some(VarType::Record(tag)) => tag,
                    Some(VarType::Array {
                        elem: ElemType::Record(tag),
                        ..
                    }) if matches!(**base, Lval::ArrayAccess { .. }) => tag,
                    Some(_) => {
                        self.error(
                            base.span(),
                            format!("`{}` has no struct type", base.root()),
                        );
                        return None;
                    }
                    None => {
                        self.error(base.span(), format!("`{}` is not declared", base.root()));
                        return None;
                    }
                };
                match self
                    .program
                    .record(&tag)
                    .and_then(|r| r.fields.iter().find(|f| f.name == *field))
                {
                    Some(f) => Some(ExprType::Scalar(f.ty)),
                    None => {
                        self.error(
                            *span,
                            format!("struct `{tag}` has no field named `{field}`"),
                        );
                        None
                    }
                }
            }
        }
    }
}
