//! Concrete big-step interpreter over slot-addressed memory.
//!
//! Every atomic location — scalar, struct field, array cell, array-cell
//! field — is resolved to one slot of an `i64` vector. Arithmetic follows
//! fixed-width C semantics at a configurable bit width: results wrap, a
//! binary operation is unsigned if either operand is, and comparisons of
//! mixed signedness compare the unsigned representations.

use crate::ast::*;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Clone, Debug)]
pub struct InterpConfig {
    pub int_width: u32,
    /// Initial value of scalar and struct locations.
    pub uninit_scalar: i64,
    /// Initial value of array cells (and of witness variables standing in
    /// for them).
    pub uninit_array: i64,
    /// Statement budget; loops consume one unit per iteration.
    pub fuel: u64,
    /// Snapshot the full state at every executed assertion.
    pub capture_assert_states: bool,
    /// Variables initialized like array cells rather than scalars.
    pub array_default_vars: BTreeSet<String>,
}

impl Default for InterpConfig {
    fn default() -> Self {
        InterpConfig {
            int_width: 32,
            uninit_scalar: 0,
            uninit_array: 0,
            fuel: 1_000_000,
            capture_assert_states: false,
            array_default_vars: BTreeSet::new(),
        }
    }
}

/// Result of one concrete run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RunStatus {
    AllPass,
    /// First violated assertion in execution order.
    AssertFailed { ordinal: usize, span: Span },
    Inconclusive { reason: String },
}

impl RunStatus {
    pub fn is_conclusive(&self) -> bool {
        !matches!(self, RunStatus::Inconclusive { .. })
    }

    /// Outcome equality modulo source positions: re-emitted and re-parsed
    /// programs shift spans but keep assertion ordinals.
    pub fn same_outcome(&self, other: &RunStatus) -> bool {
        match (self, other) {
            (RunStatus::AllPass, RunStatus::AllPass) => true,
            (
                RunStatus::AssertFailed { ordinal: a, .. },
                RunStatus::AssertFailed { ordinal: b, .. },
            ) => a == b,
            (RunStatus::Inconclusive { .. }, RunStatus::Inconclusive { .. }) => true,
            _ => false,
        }
    }
}

/// State snapshot at one executed assertion.
#[derive(Clone, Debug)]
pub struct AssertState {
    pub ordinal: usize,
    pub state: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub status: RunStatus,
    pub assert_states: Vec<AssertState>,
    /// Every value stored into any location during the run.
    pub observed: BTreeSet<i64>,
}

/// Where a declared variable's slots live.
#[derive(Clone, Debug)]
enum VarSlots {
    Scalar {
        slot: usize,
        ty: ScalarType,
    },
    Record {
        base: usize,
        fields: Vec<(String, ScalarType)>,
    },
    Array {
        base: usize,
        len: i64,
        /// Slots per element; 1 for scalar elements.
        elem_width: usize,
        /// Field layout for record elements.
        fields: Option<Vec<(String, ScalarType)>>,
        elem_ty: ScalarType,
    },
}

/// Slot assignment for every atomic location of a program.
#[derive(Clone, Debug)]
pub struct MemLayout {
    vars: BTreeMap<String, VarSlots>,
    slots: usize,
}

const MAX_SLOTS: usize = 1 << 24;

impl MemLayout {
    pub fn build(program: &Program) -> Result<MemLayout, String> {
        let mut vars = BTreeMap::new();
        let mut next = 0usize;
        for d in &program.decls {
            let entry = match &d.ty {
                VarType::Scalar(t) => {
                    let slot = next;
                    next += 1;
                    VarSlots::Scalar { slot, ty: *t }
                }
                VarType::Record(tag) => {
                    let fields: Vec<(String, ScalarType)> = program
                        .record(tag)
                        .map(|r| r.fields.iter().map(|f| (f.name.clone(), f.ty)).collect())
                        .unwrap_or_default();
                    let base = next;
                    next += fields.len();
                    VarSlots::Record { base, fields }
                }
                VarType::Array { elem, size } => {
                    let (fields, elem_width, elem_ty) = match elem {
                        ElemType::Scalar(t) => (None, 1usize, *t),
                        ElemType::Record(tag) => {
                            let fields: Vec<(String, ScalarType)> = program
                                .record(tag)
                                .map(|r| {
                                    r.fields.iter().map(|f| (f.name.clone(), f.ty)).collect()
                                })
                                .unwrap_or_default();
                            let w = fields.len();
                            (Some(fields), w, ScalarType::Int)
                        }
                    };
                    let base = next;
                    next += (*size as usize) * elem_width;
                    VarSlots::Array {
                        base,
                        len: *size,
                        elem_width,
                        fields,
                        elem_ty,
                    }
                }
            };
            if next > MAX_SLOTS {
                return Err(format!(
                    "program state needs more than {MAX_SLOTS} locations"
                ));
            }
            vars.insert(d.name.clone(), entry);
        }
        Ok(MemLayout { vars, slots: next })
    }

    pub fn slot_count(&self) -> usize {
        self.slots
    }

    /// Slot of a scalar variable or `var.field` location.
    pub fn scalar_slot(&self, var: &str, field: Option<&str>) -> Option<usize> {
        match (self.vars.get(var)?, field) {
            (VarSlots::Scalar { slot, .. }, None) => Some(*slot),
            (VarSlots::Record { base, fields }, Some(f)) => fields
                .iter()
                .position(|(name, _)| name == f)
                .map(|i| base + i),
            _ => None,
        }
    }

    /// Slot of an array cell (or cell field for record elements).
    pub fn array_cell_slot(&self, array: &str, idx: i64, field: Option<&str>) -> Option<usize> {
        match self.vars.get(array)? {
            VarSlots::Array {
                base,
                len,
                elem_width,
                fields,
                ..
            } => {
                if idx < 0 || idx >= *len {
                    return None;
                }
                let cell = base + (idx as usize) * elem_width;
                match (fields, field) {
                    (None, None) => Some(cell),
                    (Some(fs), Some(f)) => {
                        fs.iter().position(|(name, _)| name == f).map(|i| cell + i)
                    }
                    _ => None,
                }
            }
            _ => None,
        }
    }

    /// All non-array atomic locations as `(printable name, slot)` pairs.
    pub fn scalar_locations(&self) -> Vec<(String, usize)> {
        let mut out = Vec::new();
        for (name, slots) in &self.vars {
            match slots {
                VarSlots::Scalar { slot, .. } => out.push((name.clone(), *slot)),
                VarSlots::Record { base, fields } => {
                    for (i, (f, _)) in fields.iter().enumerate() {
                        out.push((format!("{name}.{f}"), base + i));
                    }
                }
                VarSlots::Array { .. } => {}
            }
        }
        out
    }

    fn initial_state(&self, config: &InterpConfig) -> Vec<i64> {
        let mut state = vec![config.uninit_scalar; self.slots];
        for (name, slots) in &self.vars {
            let array_like = matches!(slots, VarSlots::Array { .. })
                || config.array_default_vars.contains(name);
            if array_like {
                match slots {
                    VarSlots::Scalar { slot, .. } => state[*slot] = config.uninit_array,
                    VarSlots::Record { base, fields } => {
                        for i in 0..fields.len() {
                            state[base + i] = config.uninit_array;
                        }
                    }
                    VarSlots::Array {
                        base,
                        len,
                        elem_width,
                        ..
                    } => {
                        for s in state
                            .iter_mut()
                            .skip(*base)
                            .take((*len as usize) * elem_width)
                        {
                            *s = config.uninit_array;
                        }
                    }
                }
            }
        }
        state
    }
}

/// Kind of one nondeterministic choice site.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SiteKind {
    Plain,
    Range(i64, i64),
}

#[derive(Clone, Debug)]
pub struct SiteInfo {
    pub kind: SiteKind,
    pub span: Span,
}

/// The nd sites of a program, numbered in syntax order. Sites are keyed by
/// node address, so the map is only valid for the exact `Program` value it
/// was built from.
#[derive(Debug, Default)]
pub struct NdSites {
    ids: HashMap<usize, usize>,
    pub sites: Vec<SiteInfo>,
}

impl NdSites {
    pub fn collect(program: &Program) -> NdSites {
        let mut sites = NdSites::default();
        visit_exprs(&program.body, &mut |e| match e {
            Expr::Nd { span } => sites.add(e, SiteKind::Plain, *span),
            Expr::NdRange { lo, hi, span } => sites.add(e, SiteKind::Range(*lo, *hi), *span),
            _ => {}
        });
        sites
    }

    fn add(&mut self, node: &Expr, kind: SiteKind, span: Span) {
        let id = self.sites.len();
        self.ids.insert(node as *const Expr as usize, id);
        self.sites.push(SiteInfo { kind, span });
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn id_of(&self, node: &Expr) -> Option<usize> {
        self.ids.get(&(node as *const Expr as usize)).copied()
    }
}

/// A prepared program: memory layout, nd sites and assertion numbering.
pub struct Interpreter<'p> {
    program: &'p Program,
    pub layout: MemLayout,
    pub sites: NdSites,
    assert_ids: HashMap<usize, usize>,
    pub assert_spans: Vec<Span>,
    config: InterpConfig,
}

enum Stop {
    Failed { ordinal: usize, span: Span },
    Fuel,
    Runtime(String),
}

impl<'p> Interpreter<'p> {
    pub fn new(program: &'p Program, config: InterpConfig) -> Result<Interpreter<'p>, String> {
        let layout = MemLayout::build(program)?;
        let sites = NdSites::collect(program);
        let mut assert_ids = HashMap::new();
        let mut assert_spans = Vec::new();
        visit_stmts(&program.body, &mut |s| {
            if let Stmt::Assert { span, .. } = s {
                assert_ids.insert(s as *const Stmt as usize, assert_spans.len());
                assert_spans.push(*span);
            }
        });
        Ok(Interpreter {
            program,
            layout,
            sites,
            assert_ids,
            assert_spans,
            config,
        })
    }

    pub fn assert_count(&self) -> usize {
        self.assert_spans.len()
    }

    /// Executes the program under one total assignment of nd values
    /// (`nd_values[i]` is the value of site `i`).
    pub fn run(&self, nd_values: &[i64]) -> RunResult {
        debug_assert_eq!(nd_values.len(), self.sites.len());
        let mut exec = Exec {
            interp: self,
            state: self.layout.initial_state(&self.config),
            nd_values,
            fuel: self.config.fuel,
            observed: BTreeSet::new(),
            captures: Vec::new(),
        };
        let status = match exec.stmt(&self.program.body) {
            Ok(()) => RunStatus::AllPass,
            Err(Stop::Failed { ordinal, span }) => RunStatus::AssertFailed { ordinal, span },
            Err(Stop::Fuel) => RunStatus::Inconclusive {
                reason: "step budget exhausted".to_string(),
            },
            Err(Stop::Runtime(reason)) => RunStatus::Inconclusive { reason },
        };
        RunResult {
            status,
            assert_states: exec.captures,
            observed: exec.observed,
        }
    }
}

/// Deterministic execution of a closed program (no nd sites): the default
/// scalar/array contents are 0, arithmetic is 32-bit.
pub fn run_original(program: &Program, fuel: u64) -> RunResult {
    run_original_with(program, fuel, 0)
}

/// As [`run_original`], with array cells started at a chosen default to
/// probe initial-state sensitivity.
pub fn run_original_with(program: &Program, fuel: u64, array_default: i64) -> RunResult {
    let config = InterpConfig {
        fuel,
        uninit_array: array_default,
        capture_assert_states: false,
        ..InterpConfig::default()
    };
    match Interpreter::new(program, config) {
        Ok(interp) => {
            if !interp.sites.is_empty() {
                return RunResult {
                    status: RunStatus::Inconclusive {
                        reason: "program contains nondeterministic choices".to_string(),
                    },
                    assert_states: Vec::new(),
                    observed: BTreeSet::new(),
                };
            }
            interp.run(&[])
        }
        Err(reason) => RunResult {
            status: RunStatus::Inconclusive { reason },
            assert_states: Vec::new(),
            observed: BTreeSet::new(),
        },
    }
}

struct Exec<'p, 'i> {
    interp: &'i Interpreter<'p>,
    state: Vec<i64>,
    nd_values: &'i [i64],
    fuel: u64,
    observed: BTreeSet<i64>,
    captures: Vec<AssertState>,
}

impl<'p, 'i> Exec<'p, 'i> {
    fn width_mask(&self) -> i128 {
        1i128 << self.interp.config.int_width
    }

    fn wrap(&self, v: i128, ty: ScalarType) -> i64 {
        let m = self.width_mask();
        let r = v.rem_euclid(m);
        match ty {
            ScalarType::Uint => r as i64,
            ScalarType::Int => {
                if r >= m / 2 {
                    (r - m) as i64
                } else {
                    r as i64
                }
            }
        }
    }

    fn to_unsigned(&self, v: i64) -> i128 {
        (v as i128).rem_euclid(self.width_mask())
    }

    fn burn(&mut self) -> Result<(), Stop> {
        if self.fuel == 0 {
            return Err(Stop::Fuel);
        }
        self.fuel -= 1;
        Ok(())
    }

    fn stmt(&mut self, stmt: &Stmt) -> Result<(), Stop> {
        self.burn()?;
        match stmt {
            Stmt::Seq(stmts) => {
                for s in stmts {
                    self.stmt(s)?;
                }
                Ok(())
            }
            Stmt::If {
                cond,
                then_branch,
                else_branch,
                ..
            } => {
                let (c, _) = self.expr(cond)?;
                if c != 0 {
                    self.stmt(then_branch)
                } else if let Some(e) = else_branch {
                    self.stmt(e)
                } else {
                    Ok(())
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
                let iter_lval = Lval::Var {
                    name: iter.clone(),
                    span: *span,
                };
                let (v, _) = self.expr(init)?;
                self.store(&iter_lval, v)?;
                loop {
                    self.burn()?;
                    let (t, _) = self.expr(test)?;
                    if t == 0 {
                        return Ok(());
                    }
                    self.stmt(body)?;
                    match step {
                        Step::IncOne => {
                            let cur = self.load(&iter_lval)?;
                            self.store(&iter_lval, self.wrap(cur.0 as i128 + 1, cur.1))?;
                        }
                        Step::DecOne => {
                            let cur = self.load(&iter_lval)?;
                            self.store(&iter_lval, self.wrap(cur.0 as i128 - 1, cur.1))?;
                        }
                        Step::Assign(e) => {
                            let (v, _) = self.expr(e)?;
                            self.store(&iter_lval, v)?;
                        }
                    }
                }
            }
            Stmt::Assign { target, value, .. } => {
                let (v, _) = self.expr(value)?;
                self.store(target, v)
            }
            Stmt::GuardedAssign {
                cond,
                target,
                value,
                else_value,
                ..
            } => {
                let (c, _) = self.expr(cond)?;
                if c != 0 {
                    let (v, _) = self.expr(value)?;
                    self.store(target, v)
                } else {
                    // Evaluated for effect only; the subset's expressions
                    // are effect-free, so the value is discarded.
                    self.expr(else_value).map(|_| ())
                }
            }
            Stmt::Assert { cond, span } => {
                let (c, _) = self.expr(cond)?;
                let ordinal = self
                    .interp
                    .assert_ids
                    .get(&(stmt as *const Stmt as usize))
                    .copied()
                    .unwrap_or(usize::MAX);
                if self.interp.config.capture_assert_states {
                    self.captures.push(AssertState {
                        ordinal,
                        state: self.state.clone(),
                    });
                }
                if c == 0 {
                    Err(Stop::Failed {
                        ordinal,
                        span: *span,
                    })
                } else {
                    Ok(())
                }
            }
            Stmt::Empty { .. } => Ok(()),
        }
    }

    fn expr(&mut self, expr: &Expr) -> Result<(i64, ScalarType), Stop> {
        match expr {
            Expr::Const { value, .. } => Ok((*value, ScalarType::Int)),
            Expr::Read(lval) => self.load(lval),
            Expr::Nd { .. } | Expr::NdRange { .. } => {
                let id = self.interp.sites.id_of(expr).ok_or_else(|| {
                    Stop::Runtime("nd site outside the prepared program".to_string())
                })?;
                Ok((self.nd_values[id], ScalarType::Int))
            }
            Expr::Cond {
                cond,
                then_val,
                else_val,
                ..
            } => {
                let (c, _) = self.expr(cond)?;
                if c != 0 {
                    self.expr(then_val)
                } else {
                    self.expr(else_val)
                }
            }
            Expr::BinOp { op, lhs, rhs, span } => {
                let (a, at) = self.expr(lhs)?;
                match op {
                    BinOp::And => {
                        if a == 0 {
                            return Ok((0, ScalarType::Int));
                        }
                        let (b, _) = self.expr(rhs)?;
                        return Ok(((b != 0) as i64, ScalarType::Int));
                    }
                    BinOp::Or => {
                        if a != 0 {
                            return Ok((1, ScalarType::Int));
                        }
                        let (b, _) = self.expr(rhs)?;
                        return Ok(((b != 0) as i64, ScalarType::Int));
                    }
                    _ => {}
                }
                let (b, bt) = self.expr(rhs)?;
                let unsigned = at == ScalarType::Uint || bt == ScalarType::Uint;
                let result_ty = if unsigned {
                    ScalarType::Uint
                } else {
                    ScalarType::Int
                };
                let value = match op {
                    BinOp::Add => self.wrap(a as i128 + b as i128, result_ty),
                    BinOp::Sub => self.wrap(a as i128 - b as i128, result_ty),
                    BinOp::Mul => self.wrap(a as i128 * b as i128, result_ty),
                    BinOp::Div | BinOp::Mod => {
                        if b == 0 {
                            return Err(Stop::Runtime(format!("{span}: division by zero")));
                        }
                        let (x, y) = if unsigned {
                            (self.to_unsigned(a), self.to_unsigned(b))
                        } else {
                            (a as i128, b as i128)
                        };
                        let r = if matches!(op, BinOp::Div) { x / y } else { x % y };
                        self.wrap(r, result_ty)
                    }
                    BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq | BinOp::Ne => {
                        let (x, y) = if unsigned {
                            (self.to_unsigned(a), self.to_unsigned(b))
                        } else {
                            (a as i128, b as i128)
                        };
                        let r = match op {
                            BinOp::Lt => x < y,
                            BinOp::Le => x <= y,
                            BinOp::Gt => x > y,
                            BinOp::Ge => x >= y,
                            BinOp::Eq => x == y,
                            BinOp::Ne => x != y,
                            _ => unreachable!(),
                        };
                        return Ok((r as i64, ScalarType::Int));
                    }
                    BinOp::And | BinOp::Or => unreachable!("handled above"),
                };
                Ok((value, result_ty))
            }
        }
    }

    fn resolve(&mut self, lval: &Lval) -> Result<(usize, ScalarType), Stop> {
        match lval {
            Lval::Var { name, span } => {
                match self.interp.layout.vars.get(name) {
                    Some(VarSlots::Scalar { slot, ty }) => Ok((*slot, *ty)),
                    _ => Err(Stop::Runtime(format!(
                        "{span}: `{name}` is not a scalar location"
                    ))),
                }
            }
            Lval::ArrayAccess { array, index, span } => {
                let (idx, _) = self.expr(index)?;
                match self.interp.layout.vars.get(array) {
                    Some(VarSlots::Array {
                        base,
                        len,
                        elem_width,
                        fields: None,
                        elem_ty,
                    }) => {
                        if idx < 0 || idx >= *len {
                            return Err(Stop::Runtime(format!(
                                "{span}: index {idx} out of bounds for `{array}[{len}]`"
                            )));
                        }
                        Ok((base + (idx as usize) * elem_width, *elem_ty))
                    }
                    _ => Err(Stop::Runtime(format!(
                        "{span}: `{array}` is not a scalar-element array"
                    ))),
                }
            }
            Lval::Field {
                base: lbase,
                field,
                span,
            } => match &**lbase {
                Lval::Var { name, .. } => match self.interp.layout.vars.get(name) {
                    Some(VarSlots::Record { base, fields }) => fields
                        .iter()
                        .position(|(f, _)| f == field)
                        .map(|i| (base + i, fields[i].1))
                        .ok_or_else(|| {
                            Stop::Runtime(format!("{span}: no field `{field}` on `{name}`"))
                        }),
                    _ => Err(Stop::Runtime(format!("{span}: `{name}` is not a struct"))),
                },
                Lval::ArrayAccess { array, index, .. } => {
                    let (idx, _) = self.expr(index)?;
                    match self.interp.layout.vars.get(array) {
                        Some(VarSlots::Array {
                            base,
                            len,
                            elem_width,
                            fields: Some(fields),
                            ..
                        }) => {
                            if idx < 0 || idx >= *len {
                                return Err(Stop::Runtime(format!(
                                    "{span}: index {idx} out of bounds for `{array}[{len}]`"
                                )));
                            }
                            fields
                                .iter()
                                .position(|(f, _)| f == field)
                                .map(|i| (base + (idx as usize) * elem_width + i, fields[i].1))
                                .ok_or_else(|| {
                                    Stop::Runtime(format!(
                                        "{span}: no field `{field}` on `{array}[]`"
                                    ))
                                })
                        }
                        _ => Err(Stop::Runtime(format!(
                            "{span}: `{array}` is not a struct-element array"
                        ))),
                    }
                }
                Lval::Field { span, .. } => Err(Stop::Runtime(format!(
                    "{span}: nested field access is not supported"
                ))),
            },
        }
    }

    fn load(&mut self, lval: &Lval) -> Result<(i64, ScalarType), Stop> {
        let (slot, ty) = self.resolve(lval)?;
        Ok((self.state[slot], ty))
    }

    fn store(&mut self, lval: &Lval, value: i64) -> Result<(), Stop> {
        let (slot, ty) = self.resolve(lval)?;
        let wrapped = self.wrap(value as i128, ty);
        self.state[slot] = wrapped;
        self.observed.insert(wrapped);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse, parse_transformed};

    #[test]
    fn motivating_example_scaled_down_passes() {
        let src = "struct S { unsigned int p; unsigned int q; } a[16]; int i, k;\nmain() { for (i = 0; i < 16; i++) { k = i; a[i].p = k; a[i].q = k * k; } for (i = 0; i < 16; i++) { assert(a[i].q == a[i].p * a[i].p); } }";
        let program = parse(src).expect("parses");
        let result = run_original(&program, 10_000);
        assert_eq!(result.status, RunStatus::AllPass);
    }

    #[test]
    fn default_initialized_cell_fails_equality_assert() {
        let src = "int a[2]; int i;\nmain() { a[0] = 1; for (i = 0; i < 2; i++) { assert(a[i] == 1); } }";
        let program = parse(src).expect("parses");
        let result = run_original(&program, 10_000);
        match result.status {
            RunStatus::AssertFailed { ordinal, .. } => assert_eq!(ordinal, 0),
            other => panic!("expected a failure, got {other:?}"),
        }
    }

    #[test]
    fn trivial_assert_passes() {
        let program = parse("int x; assert(1);").expect("parses");
        assert_eq!(run_original(&program, 100).status, RunStatus::AllPass);
    }

    #[test]
    fn fuel_exhaustion_is_inconclusive() {
        let src = "int i; int n;\nmain() { n = 1; for (i = 0; i < n; i = i + 0) { n = 1; } }";
        let program = parse(src).expect("parses");
        let result = run_original(&program, 1_000);
        assert!(matches!(result.status, RunStatus::Inconclusive { .. }));
    }

    #[test]
    fn division_by_zero_is_inconclusive() {
        let program = parse("int x; int y; main() { y = x / x; }").expect("parses");
        let result = run_original(&program, 100);
        assert!(matches!(result.status, RunStatus::Inconclusive { .. }));
    }

    #[test]
    fn out_of_bounds_write_is_inconclusive() {
        let program = parse("int a[2]; main() { a[2] = 1; }").expect("parses");
        let result = run_original(&program, 100);
        assert!(matches!(result.status, RunStatus::Inconclusive { .. }));
    }

    #[test]
    fn unsigned_arithmetic_wraps_at_width() {
        let src = "unsigned int x; main() { x = 0 - 1; assert(x > 0); }";
        let program = parse(src).expect("parses");
        assert_eq!(run_original(&program, 100).status, RunStatus::AllPass);
    }

    #[test]
    fn observed_values_cover_stores() {
        let program = parse("int x; int y; main() { x = 7; y = x + 1; }").expect("parses");
        let result = run_original(&program, 100);
        assert!(result.observed.contains(&7));
        assert!(result.observed.contains(&8));
    }

    #[test]
    fn nd_sites_receive_assigned_values() {
        let src = "int x; main() { x = nd(); assert(x == 3); }";
        let program = parse_transformed(src).expect("parses");
        let interp = Interpreter::new(&program, InterpConfig::default()).unwrap();
        assert_eq!(interp.sites.len(), 1);
        assert_eq!(interp.run(&[3]).status, RunStatus::AllPass);
        assert!(matches!(
            interp.run(&[4]).status,
            RunStatus::AssertFailed { .. }
        ));
    }

    #[test]
    fn first_failing_assert_wins() {
        let src = "int x; main() { assert(x == 0); assert(x == 1); assert(x == 2); }";
        let program = parse(src).expect("parses");
        match run_original(&program, 100).status {
            RunStatus::AssertFailed { ordinal, .. } => assert_eq!(ordinal, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn array_default_probe_changes_uninitialized_reads() {
        let src = "int a[2]; main() { assert(a[1] == 0); }";
        let program = parse(src).expect("parses");
        assert_eq!(run_original(&program, 100).status, RunStatus::AllPass);
        assert!(matches!(
            run_original_with(&program, 100, 1).status,
            RunStatus::AssertFailed { .. }
        ));
    }

    #[test]
    fn capture_collects_states_at_assert_points() {
        let src = "int x; main() { x = 4; assert(x == 4); x = 5; assert(x == 5); }";
        let program = parse(src).expect("parses");
        let config = InterpConfig {
            capture_assert_states: true,
            ..InterpConfig::default()
        };
        let interp = Interpreter::new(&program, config).unwrap();
        let result = interp.run(&[]);
        assert_eq!(result.assert_states.len(), 2);
        let slot = interp.layout.scalar_slot("x", None).unwrap();
        assert_eq!(result.assert_states[0].state[slot], 4);
        assert_eq!(result.assert_states[1].state[slot], 5);
    }
}
