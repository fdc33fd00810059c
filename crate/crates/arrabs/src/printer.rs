//! Deterministic pretty-printer. Re-parsing the output of [`emit`] yields a
//! structurally identical program.

use crate::ast::*;

/// Controls how nondeterministic choices are spelled in the output.
#[derive(Clone, Debug)]
pub struct EmitConfig {
    /// Name used for the zero-argument form, `nd()`.
    pub nd_plain: String,
    /// Name used for the ranged form, `nd(l,u)`.
    pub nd_range: String,
}

impl Default for EmitConfig {
    fn default() -> Self {
        EmitConfig {
            nd_plain: "nd".to_string(),
            nd_range: "nd".to_string(),
        }
    }
}

impl EmitConfig {
    pub fn with_names(plain: &str, range: &str) -> Self {
        EmitConfig {
            nd_plain: plain.to_string(),
            nd_range: range.to_string(),
        }
    }
}

/// Pretty-prints a program with default nd naming.
pub fn emit(program: &Program) -> String {
    emit_with(program, &EmitConfig::default())
}

pub fn emit_with(program: &Program, config: &EmitConfig) -> String {
    let mut out = String::new();
    for rec in &program.records {
        out.push_str(&format!("struct {} {{\n", rec.tag));
        for f in &rec.fields {
            out.push_str(&format!("    {} {};\n", f.ty, f.name));
        }
        out.push_str("};\n");
    }
    for decl in &program.decls {
        match &decl.ty {
            VarType::Scalar(t) => out.push_str(&format!("{} {};\n", t, decl.name)),
            VarType::Record(tag) => out.push_str(&format!("struct {} {};\n", tag, decl.name)),
            VarType::Array { elem, size } => {
                let elem_str = match elem {
                    ElemType::Scalar(t) => t.to_string(),
                    ElemType::Record(tag) => format!("struct {tag}"),
                };
                out.push_str(&format!("{} {}[{}];\n", elem_str, decl.name, size));
            }
        }
    }
    out.push_str("\nmain()\n{\n");
    emit_stmt(&program.body, config, 1, &mut out);
    out.push_str("}\n");
    out
}

fn indent(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str("    ");
    }
}

fn emit_stmt(stmt: &Stmt, cfg: &EmitConfig, level: usize, out: &mut String) {
    match stmt {
        Stmt::Seq(stmts) => {
            for s in stmts {
                emit_stmt(s, cfg, level, out);
            }
        }
        Stmt::If {
            cond,
            then_branch,
            else_branch,
            ..
        } => {
            indent(level, out);
            out.push_str(&format!("if ({}) {{\n", expr_str(cond, cfg)));
            emit_stmt(then_branch, cfg, level + 1, out);
            indent(level, out);
            out.push('}');
            if let Some(e) = else_branch {
                out.push_str(" else {\n");
                emit_stmt(e, cfg, level + 1, out);
                indent(level, out);
                out.push('}');
            }
            out.push('\n');
        }
        Stmt::For {
            iter,
            init,
            test,
            step,
            body,
            ..
        } => {
            indent(level, out);
            let step_str = match step {
                Step::IncOne => format!("{iter}++"),
                Step::DecOne => format!("{iter}--"),
                Step::Assign(e) => format!("{iter} = {}", expr_str(e, cfg)),
            };
            out.push_str(&format!(
                "for ({iter} = {}; {}; {step_str}) {{\n",
                expr_str(init, cfg),
                expr_str(test, cfg)
            ));
            emit_stmt(body, cfg, level + 1, out);
            indent(level, out);
            out.push_str("}\n");
        }
        Stmt::Assign { target, value, .. } => {
            indent(level, out);
            out.push_str(&format!(
                "{} = {};\n",
                lval_str(target, cfg),
                expr_str(value, cfg)
            ));
        }
        Stmt::GuardedAssign {
            cond,
            target,
            value,
            else_value,
            ..
        } => {
            indent(level, out);
            out.push_str(&format!(
                "({}) ? {} = {} : {};\n",
                expr_str(cond, cfg),
                lval_str(target, cfg),
                expr_str(value, cfg),
                expr_str(else_value, cfg)
            ));
        }
        Stmt::Assert { cond, .. } => {
            indent(level, out);
            out.push_str(&format!("assert({});\n", expr_str(cond, cfg)));
        }
        Stmt::Empty { .. } => {
            indent(level, out);
            out.push_str(";\n");
        }
    }
}

fn lval_str(lval: &Lval, cfg: &EmitConfig) -> String {
    match lval {
        Lval::Var { name, .. } => name.clone(),
        Lval::ArrayAccess { array, index, .. } => {
            format!("{array}[{}]", expr_str(index, cfg))
        }
        Lval::Field { base, field, .. } => format!("{}.{field}", lval_str(base, cfg)),
    }
}

/// Binding strength; larger binds tighter. The conditional expression is
/// the weakest and is always parenthesized when nested.
fn precedence(op: BinOp) -> u8 {
    match op {
        BinOp::Or => 1,
        BinOp::And => 2,
        BinOp::Eq | BinOp::Ne => 3,
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
        BinOp::Add | BinOp::Sub => 5,
        BinOp::Mul | BinOp::Div | BinOp::Mod => 6,
    }
}

fn expr_str(expr: &Expr, cfg: &EmitConfig) -> String {
    expr_prec(expr, cfg, 0)
}

fn expr_prec(expr: &Expr, cfg: &EmitConfig, parent: u8) -> String {
    match expr {
        Expr::BinOp { op, lhs, rhs, .. } => {
            let p = precedence(*op);
            // Left-associative: the right operand needs one more level.
            let s = format!(
                "{} {} {}",
                expr_prec(lhs, cfg, p),
                op.symbol(),
                expr_prec(rhs, cfg, p + 1)
            );
            if p < parent {
                format!("({s})")
            } else {
                s
            }
        }
        Expr::Read(lval) => lval_str(lval, cfg),
        Expr::Const { value, .. } => {
            if *value < 0 {
                format!("({value})")
            } else {
                value.to_string()
            }
        }
        Expr::Cond {
            cond,
            then_val,
            else_val,
            ..
        } => {
            let s = format!(
                "({}) ? {} : {}",
                expr_str(cond, cfg),
                expr_prec(then_val, cfg, 1),
                expr_prec(else_val, cfg, 1)
            );
            if parent > 0 {
                format!("({s})")
            } else {
                s
            }
        }
        Expr::Nd { .. } => format!("{}()", cfg.nd_plain),
        Expr::NdRange { lo, hi, .. } => format!("{}({lo}, {hi})", cfg.nd_range),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse, parse_transformed};

    #[test]
    fn assert_prints_on_one_line() {
        let program = parse("int x; assert(x == 0);").expect("parses");
        let text = emit(&program);
        assert!(text.contains("assert(x == 0);\n"));
    }

    #[test]
    fn roundtrip_is_structural_identity() {
        let src = "struct S { int p; int q; } a[10]; int i, k;\nmain() { for (i = 0; i < 10; i++) { k = i; a[i].p = k + 2 * k; } if (k < 3) { assert(a[0].p == 0); } else { k = 0; } }";
        let p1 = parse(src).expect("parses");
        let text = emit(&p1);
        let p2 = parse(&text).expect("re-parses");
        assert!(p1.structurally_eq(&p2), "roundtrip mismatch:\n{text}");
    }

    #[test]
    fn ternary_operands_get_parenthesized_in_binops() {
        let src = "int i_a; int x_a; int i; main() { assert(((i == i_a) ? x_a : nd()) == ((i == i_a) ? x_a : nd()) * ((i == i_a) ? x_a : nd())); }";
        let p1 = parse_transformed(src).expect("parses");
        let text = emit(&p1);
        let p2 = parse_transformed(&text).expect("re-parses");
        assert!(p1.structurally_eq(&p2), "roundtrip mismatch:\n{text}");
    }

    #[test]
    fn precedence_parens_preserve_structure() {
        let src = "int x; int y; main() { x = (x + y) * 2; y = x + y * 2; assert(x < (y + 1) * 2); }";
        let p1 = parse(src).expect("parses");
        let p2 = parse(&emit(&p1)).expect("re-parses");
        assert!(p1.structurally_eq(&p2));
    }

    #[test]
    fn custom_nd_names_are_used() {
        let src = "int x; main() { x = nd(); x = nd(0, 3); }";
        let p = parse_transformed(src).expect("parses");
        let cfg = EmitConfig::with_names("nd_any", "nd_in");
        let text = emit_with(&p, &cfg);
        assert!(text.contains("x = nd_any();"));
        assert!(text.contains("x = nd_in(0, 3);"));
    }
}
