//! Seeded random program generator.
//!
//! Programs are closed (no inputs), terminating by construction (loop
//! iterators are never written in bodies, bounds are small constants or a
//! small constant-valued scalar), and all array accesses are in bounds.
//! Iterator variables come from a pool disjoint from data scalars and are
//! read only inside their own loop, so generated programs never observe a
//! loop iterator's exit value.

use crate::ast::*;
use serde::Serialize;

/// SplitMix64: tiny, stable, deterministic across platforms and releases.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish value in `[0, n)`.
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n.max(1)
    }

    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    pub fn chance(&mut self, percent: u64) -> bool {
        self.below(100) < percent
    }

    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.below(xs.len() as u64) as usize]
    }
}

/// Relative frequencies of generated statement kinds. A zero weight
/// disables the kind entirely.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StmtWeights {
    pub assign: u32,
    pub array_write: u32,
    pub branch: u32,
    pub full_loop: u32,
    pub partial_loop: u32,
    pub assertion: u32,
}

impl Default for StmtWeights {
    fn default() -> Self {
        StmtWeights {
            assign: 4,
            array_write: 4,
            branch: 2,
            full_loop: 3,
            partial_loop: 2,
            assertion: 2,
        }
    }
}

/// What kind of corpus to produce.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum GenProfile {
    /// Arbitrary programs: safe and unsafe, full and partial loops.
    Mixed,
    /// Single-array programs whose assertions hold by construction and
    /// qualify under the precision rules.
    SafeInvariants,
}

/// Generation limits; generation is a pure function of this value.
#[derive(Clone, Debug, Serialize)]
pub struct GenLimits {
    pub max_array_size: i64,
    pub max_loop_bound: i64,
    pub max_const: i64,
    pub max_stmts: usize,
    pub weights: StmtWeights,
    pub seed: u64,
    pub profile: GenProfile,
}

impl Default for GenLimits {
    fn default() -> Self {
        GenLimits {
            max_array_size: 4,
            max_loop_bound: 4,
            max_const: 3,
            max_stmts: 12,
            weights: StmtWeights::default(),
            seed: 0,
            profile: GenProfile::Mixed,
        }
    }
}

impl GenLimits {
    pub fn with_seed(seed: u64) -> Self {
        GenLimits {
            seed,
            ..GenLimits::default()
        }
    }

    pub fn safe_invariants(seed: u64) -> Self {
        GenLimits {
            seed,
            profile: GenProfile::SafeInvariants,
            ..GenLimits::default()
        }
    }
}

/// Generates one program from the limits (which include the seed).
pub fn gen_program(limits: &GenLimits) -> Program {
    let mut rng = SplitMix64::new(limits.seed);
    match limits.profile {
        GenProfile::Mixed => Generator::new(limits, &mut rng).mixed(),
        GenProfile::SafeInvariants => Generator::new(limits, &mut rng).safe_invariants(),
    }
}

struct ArraySpec {
    name: &'static str,
    size: i64,
    record: bool,
}

/// Index forms that are certainly in bounds in the current context.
#[derive(Clone)]
struct LoopScope {
    iter: &'static str,
    lo: i64,
    hi: i64,
}

struct Generator<'a, 'r> {
    limits: &'a GenLimits,
    rng: &'r mut SplitMix64,
    arrays: Vec<ArraySpec>,
    data_scalars: Vec<&'static str>,
    asserts: usize,
}

const ITERATORS: [&str; 2] = ["i", "j"];
const DATA: [&str; 3] = ["k", "s", "t"];

impl<'a, 'r> Generator<'a, 'r> {
    fn new(limits: &'a GenLimits, rng: &'r mut SplitMix64) -> Self {
        Generator {
            limits,
            rng,
            arrays: Vec::new(),
            data_scalars: DATA.to_vec(),
            asserts: 0,
        }
    }

    fn constant(&mut self) -> i64 {
        self.rng.range(0, self.limits.max_const.max(0))
    }

    fn mixed(mut self) -> Program {
        let w = self.limits.weights;
        let wants_arrays = w.array_write + w.full_loop + w.partial_loop > 0;
        if wants_arrays {
            let n = if self.rng.chance(25) { 2 } else { 1 };
            for name in ["a", "b"].iter().take(n) {
                self.arrays.push(ArraySpec {
                    name,
                    size: self.rng.range(1, self.limits.max_array_size.max(1)),
                    record: self.rng.chance(20),
                });
            }
        }

        let mut stmts = Vec::new();
        let mut budget = self.limits.max_stmts;
        let mut loops_allowed = 3;
        while budget > 0 {
            let s = self.gen_stmt(&mut budget, &mut loops_allowed, None, 0);
            stmts.push(s);
        }
        if self.asserts == 0 {
            let cond = self.gen_cmp(None);
            stmts.push(Stmt::Assert {
                cond,
                span: Span::DUMMY,
            });
            self.asserts += 1;
        }

        self.finish(stmts)
    }

    fn finish(self, stmts: Vec<Stmt>) -> Program {
        let mut records = Vec::new();
        let mut decls = Vec::new();
        for (idx, spec) in self.arrays.iter().enumerate() {
            let elem = if spec.record {
                let tag = format!("S{idx}");
                records.push(RecordDef {
                    tag: tag.clone(),
                    fields: vec![
                        FieldDecl {
                            name: "p".to_string(),
                            ty: ScalarType::Uint,
                        },
                        FieldDecl {
                            name: "q".to_string(),
                            ty: ScalarType::Uint,
                        },
                    ],
                    span: Span::DUMMY,
                });
                ElemType::Record(tag)
            } else {
                ElemType::Scalar(ScalarType::Int)
            };
            decls.push(VarDecl {
                name: spec.name.to_string(),
                ty: VarType::Array {
                    elem,
                    size: spec.size,
                },
                span: Span::DUMMY,
            });
        }
        for it in ITERATORS {
            decls.push(VarDecl {
                name: it.to_string(),
                ty: VarType::Scalar(ScalarType::Int),
                span: Span::DUMMY,
            });
        }
        for (n, d) in self.data_scalars.iter().enumerate() {
            let ty = if n == 2 {
                ScalarType::Uint
            } else {
                ScalarType::Int
            };
            decls.push(VarDecl {
                name: d.to_string(),
                ty: VarType::Scalar(ty),
                span: Span::DUMMY,
            });
        }
        decls.push(VarDecl {
            name: "n".to_string(),
            ty: VarType::Scalar(ScalarType::Int),
            span: Span::DUMMY,
        });

        Program {
            records,
            decls,
            body: Stmt::seq(stmts),
        }
    }

    fn gen_stmt(
        &mut self,
        budget: &mut usize,
        loops_allowed: &mut i32,
        scope: Option<&LoopScope>,
        depth: u32,
    ) -> Stmt {
        *budget = budget.saturating_sub(1);
        let w = self.limits.weights;
        let can_loop = *loops_allowed > 0 && depth == 0 && *budget >= 2;
        let mut choices: Vec<(u32, u8)> = vec![
            (w.assign, 0),
            (if self.arrays.is_empty() { 0 } else { w.array_write }, 1),
            (if *budget >= 1 { w.branch } else { 0 }, 2),
            (
                if can_loop && !self.arrays.is_empty() {
                    w.full_loop
                } else {
                    0
                },
                3,
            ),
            (if can_loop { w.partial_loop } else { 0 }, 4),
            (w.assertion, 5),
        ];
        choices.retain(|(weight, _)| *weight > 0);
        if choices.is_empty() {
            let cond = self.gen_cmp(scope);
            self.asserts += 1;
            return Stmt::Assert {
                cond,
                span: Span::DUMMY,
            };
        }

        let total: u32 = choices.iter().map(|(w, _)| w).sum();
        let mut roll = self.rng.below(total as u64) as u32;
        let mut kind = choices[0].1;
        for (weight, k) in &choices {
            if roll < *weight {
                kind = *k;
                break;
            }
            roll -= weight;
        }

        match kind {
            0 => {
                let target = *self.rng.pick(&self.data_scalars);
                let value = self.gen_expr(scope, 0);
                Stmt::Assign {
                    target: Lval::Var {
                        name: target.to_string(),
                        span: Span::DUMMY,
                    },
                    value,
                    span: Span::DUMMY,
                }
            }
            1 => self.gen_array_write(scope),
            2 => {
                let cond = self.gen_cmp(scope);
                let then_branch = self.gen_stmt(budget, loops_allowed, scope, depth + 1);
                let else_branch = if self.rng.chance(40) && *budget > 0 {
                    Some(Box::new(self.gen_stmt(budget, loops_allowed, scope, depth + 1)))
                } else {
                    None
                };
                Stmt::If {
                    cond,
                    then_branch: Box::new(then_branch),
                    else_branch,
                    span: Span::DUMMY,
                }
            }
            3 => {
                *loops_allowed -= 1;
                self.gen_full_loop(budget, loops_allowed)
            }
            4 => {
                *loops_allowed -= 1;
                self.gen_partial_loop(budget, loops_allowed)
            }
            _ => {
                self.asserts += 1;
                let cond = self.gen_cmp(scope);
                Stmt::Assert {
                    cond,
                    span: Span::DUMMY,
                }
            }
        }
    }

    /// An in-bounds index expression for the array in the current scope.
    fn gen_index(&mut self, size: i64, scope: Option<&LoopScope>) -> Expr {
        if let Some(s) = scope {
            let iter_safe = s.lo >= 0 && s.hi < size;
            let shifted_safe = s.lo >= 0 && s.hi < size - 1;
            let roll = self.rng.below(10);
            if iter_safe && roll < 6 {
                return Expr::read_var(s.iter);
            }
            if shifted_safe && roll < 8 {
                return Expr::BinOp {
                    op: BinOp::Add,
                    lhs: Box::new(Expr::read_var(s.iter)),
                    rhs: Box::new(Expr::constant(1)),
                    span: Span::DUMMY,
                };
            }
        }
        Expr::constant(self.rng.range(0, size - 1))
    }

    fn array_lval(&mut self, which: usize, index: Expr) -> Lval {
        let spec = &self.arrays[which];
        let access = Lval::ArrayAccess {
            array: spec.name.to_string(),
            index: Box::new(index),
            span: Span::DUMMY,
        };
        if spec.record {
            let field = if self.rng.chance(50) { "p" } else { "q" };
            Lval::Field {
                base: Box::new(access),
                field: field.to_string(),
                span: Span::DUMMY,
            }
        } else {
            access
        }
    }

    fn gen_array_write(&mut self, scope: Option<&LoopScope>) -> Stmt {
        let which = self.rng.below(self.arrays.len() as u64) as usize;
        let size = self.arrays[which].size;
        let index = self.gen_index(size, scope);
        let target = self.array_lval(which, index);
        let value = self.gen_expr(scope, 0);
        Stmt::Assign {
            target,
            value,
            span: Span::DUMMY,
        }
    }

    fn gen_loop_body(
        &mut self,
        budget: &mut usize,
        loops_allowed: &mut i32,
        scope: &LoopScope,
        min_stmts: usize,
    ) -> Vec<Stmt> {
        let mut stmts = Vec::new();
        let n = min_stmts.max(1) + self.rng.below(3) as usize;
        for _ in 0..n {
            if *budget == 0 {
                break;
            }
            stmts.push(self.gen_stmt(budget, loops_allowed, Some(scope), 1));
        }
        stmts
    }

    /// A loop that walks one array completely through its iterator. Other
    /// statements in the body are unrestricted except that accesses to the
    /// walked array always use the iterator.
    fn gen_full_loop(&mut self, budget: &mut usize, loops_allowed: &mut i32) -> Stmt {
        let which = self.rng.below(self.arrays.len() as u64) as usize;
        let size = self.arrays[which].size;
        let iter = ITERATORS[0];
        let scope = LoopScope {
            iter,
            lo: 0,
            hi: size - 1,
        };

        let first_write = {
            let target = self.array_lval(which, Expr::read_var(iter));
            let value = self.gen_expr(Some(&scope), 0);
            Stmt::Assign {
                target,
                value,
                span: Span::DUMMY,
            }
        };
        // Constrain every further access to this array to the iterator by
        // narrowing the scope bounds to exactly the array range.
        let mut body = vec![first_write];
        body.extend(self.gen_loop_body(budget, loops_allowed, &scope, 0));
        let body = sanitize_array_indices(body, self.arrays[which].name, iter);

        Stmt::For {
            iter: iter.to_string(),
            init: Expr::constant(0),
            test: Expr::BinOp {
                op: BinOp::Lt,
                lhs: Box::new(Expr::read_var(iter)),
                rhs: Box::new(Expr::constant(size)),
                span: Span::DUMMY,
            },
            step: Step::IncOne,
            body: Box::new(Stmt::seq(body)),
            span: Span::DUMMY,
        }
    }

    fn gen_partial_loop(&mut self, budget: &mut usize, loops_allowed: &mut i32) -> Stmt {
        let iter = ITERATORS[1];
        let max_bound = self.limits.max_loop_bound.max(1);
        let touch_array = !self.arrays.is_empty() && self.rng.chance(70);
        let (lo, hi) = if touch_array {
            let size = self.arrays.iter().map(|a| a.size).min().unwrap_or(1);
            let hi = self.rng.range(0, (size - 1).min(max_bound - 1));
            let lo = self.rng.range(0, hi);
            (lo, hi)
        } else {
            (self.rng.range(0, 1), self.rng.range(1, max_bound))
        };
        let scope = LoopScope { iter, lo, hi };

        let body = self.gen_loop_body(budget, loops_allowed, &scope, 1);

        // Occasionally bound the loop by a constant-valued scalar instead
        // of a literal, exercising the unknown-bounds path.
        let use_var_bound = !touch_array && self.rng.chance(25);
        let test_rhs = if use_var_bound {
            Expr::read_var("n")
        } else {
            Expr::constant(hi + 1)
        };
        let test_op = if self.rng.chance(75) || use_var_bound {
            BinOp::Lt
        } else {
            BinOp::Le
        };
        let test_bound = match test_op {
            BinOp::Le if !use_var_bound => Expr::constant(hi),
            _ => test_rhs,
        };

        let for_stmt = Stmt::For {
            iter: iter.to_string(),
            init: Expr::constant(lo),
            test: Expr::BinOp {
                op: test_op,
                lhs: Box::new(Expr::read_var(iter)),
                rhs: Box::new(test_bound),
                span: Span::DUMMY,
            },
            step: Step::IncOne,
            body: Box::new(Stmt::seq(body)),
            span: Span::DUMMY,
        };

        if use_var_bound {
            let limit = self.rng.range(0, hi + 1);
            Stmt::seq(vec![
                Stmt::Assign {
                    target: Lval::Var {
                        name: "n".to_string(),
                        span: Span::DUMMY,
                    },
                    value: Expr::constant(limit),
                    span: Span::DUMMY,
                },
                for_stmt,
            ])
        } else {
            for_stmt
        }
    }

    fn gen_expr(&mut self, scope: Option<&LoopScope>, depth: u32) -> Expr {
        let roll = self.rng.below(10);
        match roll {
            0..=3 => Expr::constant(self.constant()),
            4..=5 => Expr::read_var(self.rng.pick(&self.data_scalars)),
            6 if scope.is_some() => Expr::read_var(scope.unwrap().iter),
            7 if !self.arrays.is_empty() => {
                let which = self.rng.below(self.arrays.len() as u64) as usize;
                let size = self.arrays[which].size;
                let index = self.gen_index(size, scope);
                Expr::Read(self.array_lval(which, index))
            }
            _ if depth < 2 => {
                let op = *self.rng.pick(&[BinOp::Add, BinOp::Sub, BinOp::Mul]);
                Expr::BinOp {
                    op,
                    lhs: Box::new(self.gen_expr(scope, depth + 1)),
                    rhs: Box::new(self.gen_expr(scope, depth + 1)),
                    span: Span::DUMMY,
                }
            }
            _ => Expr::constant(self.constant()),
        }
    }

    fn gen_cmp(&mut self, scope: Option<&LoopScope>) -> Expr {
        let op = *self.rng.pick(&[
            BinOp::Eq,
            BinOp::Ne,
            BinOp::Lt,
            BinOp::Le,
            BinOp::Gt,
            BinOp::Ge,
        ]);
        let cmp = Expr::BinOp {
            op,
            lhs: Box::new(self.gen_expr(scope, 1)),
            rhs: Box::new(self.gen_expr(scope, 1)),
            span: Span::DUMMY,
        };
        if self.rng.chance(15) {
            let other = Expr::BinOp {
                op: *self.rng.pick(&[BinOp::Lt, BinOp::Ne]),
                lhs: Box::new(self.gen_expr(scope, 1)),
                rhs: Box::new(self.gen_expr(scope, 1)),
                span: Span::DUMMY,
            };
            Expr::BinOp {
                op: *self.rng.pick(&[BinOp::And, BinOp::Or]),
                lhs: Box::new(cmp),
                rhs: Box::new(other),
                span: Span::DUMMY,
            }
        } else {
            cmp
        }
    }

    /// Programs whose assertions restate the array contents written by
    /// full-access loops: safe by construction and inside the precise
    /// class.
    fn safe_invariants(mut self) -> Program {
        let size = self.rng.range(1, self.limits.max_array_size.max(1));
        let record = self.rng.chance(30);
        self.arrays.push(ArraySpec {
            name: "a",
            size,
            record,
        });
        let iter = "i";
        let c1 = self.constant();
        let c0 = self.constant();

        let content = |with_temp: Option<&str>| -> Expr {
            // c1 * base + c0 where base is the iterator or a temp copy.
            let base = Expr::read_var(with_temp.unwrap_or(iter));
            Expr::BinOp {
                op: BinOp::Add,
                lhs: Box::new(Expr::BinOp {
                    op: BinOp::Mul,
                    lhs: Box::new(base),
                    rhs: Box::new(Expr::constant(c1)),
                    span: Span::DUMMY,
                }),
                rhs: Box::new(Expr::constant(c0)),
                span: Span::DUMMY,
            }
        };
        let full_header = |body: Vec<Stmt>| Stmt::For {
            iter: iter.to_string(),
            init: Expr::constant(0),
            test: Expr::BinOp {
                op: BinOp::Lt,
                lhs: Box::new(Expr::read_var(iter)),
                rhs: Box::new(Expr::constant(size)),
                span: Span::DUMMY,
            },
            step: Step::IncOne,
            body: Box::new(Stmt::seq(body)),
            span: Span::DUMMY,
        };
        let cell = |field: &str| -> Lval {
            let access = Lval::ArrayAccess {
                array: "a".to_string(),
                index: Box::new(Expr::read_var(iter)),
                span: Span::DUMMY,
            };
            if record {
                Lval::Field {
                    base: Box::new(access),
                    field: field.to_string(),
                    span: Span::DUMMY,
                }
            } else {
                access
            }
        };
        let assign = |target: Lval, value: Expr| Stmt::Assign {
            target,
            value,
            span: Span::DUMMY,
        };

        let mut stmts: Vec<Stmt> = Vec::new();
        let write_temp = self.rng.chance(50);
        let temp_src = if write_temp { Some("t") } else { None };

        if record {
            // a[i].p = f(i); a[i].q = f(i) * f(i); assert q == p * p.
            let mut body = Vec::new();
            if write_temp {
                body.push(assign(
                    Lval::Var {
                        name: "t".to_string(),
                        span: Span::DUMMY,
                    },
                    Expr::read_var(iter),
                ));
            }
            body.push(assign(cell("p"), content(temp_src)));
            body.push(assign(
                cell("q"),
                Expr::BinOp {
                    op: BinOp::Mul,
                    lhs: Box::new(content(temp_src)),
                    rhs: Box::new(content(temp_src)),
                    span: Span::DUMMY,
                },
            ));
            stmts.push(full_header(body));

            let read = |f: &str| Expr::Read(cell(f));
            stmts.push(full_header(vec![Stmt::Assert {
                cond: Expr::BinOp {
                    op: BinOp::Eq,
                    lhs: Box::new(read("q")),
                    rhs: Box::new(Expr::BinOp {
                        op: BinOp::Mul,
                        lhs: Box::new(read("p")),
                        rhs: Box::new(read("p")),
                        span: Span::DUMMY,
                    }),
                    span: Span::DUMMY,
                },
                span: Span::DUMMY,
            }]));
        } else {
            let mut body = Vec::new();
            if write_temp {
                body.push(assign(
                    Lval::Var {
                        name: "t".to_string(),
                        span: Span::DUMMY,
                    },
                    Expr::read_var(iter),
                ));
            }
            body.push(assign(cell(""), content(temp_src)));
            stmts.push(full_header(body));

            // Optionally a second pass shifting every element.
            let shift = if self.rng.chance(40) {
                let c2 = self.constant();
                stmts.push(full_header(vec![assign(
                    cell(""),
                    Expr::BinOp {
                        op: BinOp::Add,
                        lhs: Box::new(Expr::Read(cell(""))),
                        rhs: Box::new(Expr::constant(c2)),
                        span: Span::DUMMY,
                    },
                )]));
                c2
            } else {
                0
            };

            // Unrelated constant bookkeeping between the loops.
            if self.rng.chance(40) {
                let c = self.constant();
                stmts.push(assign(
                    Lval::Var {
                        name: "k".to_string(),
                        span: Span::DUMMY,
                    },
                    Expr::constant(c),
                ));
            }

            let assert_temp = self.rng.chance(50);
            let expected = |base: Option<&str>| -> Expr {
                let mut e = content(base);
                if shift != 0 {
                    e = Expr::BinOp {
                        op: BinOp::Add,
                        lhs: Box::new(e),
                        rhs: Box::new(Expr::constant(shift)),
                        span: Span::DUMMY,
                    };
                }
                e
            };
            let mut check_body = Vec::new();
            let base = if assert_temp {
                check_body.push(assign(
                    Lval::Var {
                        name: "s".to_string(),
                        span: Span::DUMMY,
                    },
                    Expr::read_var(iter),
                ));
                Some("s")
            } else {
                None
            };
            check_body.push(Stmt::Assert {
                cond: Expr::BinOp {
                    op: BinOp::Eq,
                    lhs: Box::new(Expr::Read(cell(""))),
                    rhs: Box::new(expected(base)),
                    span: Span::DUMMY,
                },
                span: Span::DUMMY,
            });
            stmts.push(full_header(check_body));
        }

        self.asserts += 1;
        self.finish(stmts)
    }
}

/// Rewrites every subscript of `array` in the statements to use exactly
/// the iterator, preserving the full-access property the loop was built
/// for.
fn sanitize_array_indices(stmts: Vec<Stmt>, array: &str, iter: &str) -> Vec<Stmt> {
    stmts
        .into_iter()
        .map(|s| sanitize_stmt(s, array, iter))
        .collect()
}

fn sanitize_stmt(stmt: Stmt, array: &str, iter: &str) -> Stmt {
    match stmt {
        Stmt::Seq(stmts) => Stmt::Seq(sanitize_array_indices(stmts, array, iter)),
        Stmt::If {
            cond,
            then_branch,
            else_branch,
            span,
        } => Stmt::If {
            cond: sanitize_expr(cond, array, iter),
            then_branch: Box::new(sanitize_stmt(*then_branch, array, iter)),
            else_branch: else_branch.map(|e| Box::new(sanitize_stmt(*e, array, iter))),
            span,
        },
        Stmt::For {
            iter: it,
            init,
            test,
            step,
            body,
            span,
        } => Stmt::For {
            iter: it,
            init: sanitize_expr(init, array, iter),
            test: sanitize_expr(test, array, iter),
            step,
            body: Box::new(sanitize_stmt(*body, array, iter)),
            span,
        },
        Stmt::Assign {
            target,
            value,
            span,
        } => Stmt::Assign {
            target: sanitize_lval(target, array, iter),
            value: sanitize_expr(value, array, iter),
            span,
        },
        Stmt::GuardedAssign {
            cond,
            target,
            value,
            else_value,
            span,
        } => Stmt::GuardedAssign {
            cond: sanitize_expr(cond, array, iter),
            target: sanitize_lval(target, array, iter),
            value: sanitize_expr(value, array, iter),
            else_value: sanitize_expr(else_value, array, iter),
            span,
        },
        Stmt::Assert { cond, span } => Stmt::Assert {
            cond: sanitize_expr(cond, array, iter),
            span,
        },
        s @ Stmt::Empty { .. } => s,
    }
}

fn sanitize_expr(expr: Expr, array: &str, iter: &str) -> Expr {
    match expr {
        Expr::BinOp { op, lhs, rhs, span } => Expr::BinOp {
            op,
            lhs: Box::new(sanitize_expr(*lhs, array, iter)),
            rhs: Box::new(sanitize_expr(*rhs, array, iter)),
            span,
        },
        Expr::Read(lval) => Expr::Read(sanitize_lval(lval, array, iter)),
        Expr::Cond {
            cond,
            then_val,
            else_val,
            span,
        } => Expr::Cond {
            cond: Box::new(sanitize_expr(*cond, array, iter)),
            then_val: Box::new(sanitize_expr(*then_val, array, iter)),
            else_val: Box::new(sanitize_expr(*else_val, array, iter)),
            span,
        },
        other => other,
    }
}

fn sanitize_lval(lval: Lval, array: &str, iter: &str) -> Lval {
    match lval {
        Lval::ArrayAccess {
            array: a,
            index,
            span,
        } => {
            let index = if a == array {
                Box::new(Expr::read_var(iter))
            } else {
                Box::new(sanitize_expr(*index, array, iter))
            };
            Lval::ArrayAccess {
                array: a,
                index,
                span,
            }
        }
        Lval::Field { base, field, span } => Lval::Field {
            base: Box::new(sanitize_lval(*base, array, iter)),
            field,
            span,
        },
        v @ Lval::Var { .. } => v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{run_original, RunStatus};
    use crate::parser::parse;
    use crate::printer::emit;

    #[test]
    fn same_seed_gives_identical_programs() {
        let limits = GenLimits::with_seed(42);
        let a = gen_program(&limits);
        let b = gen_program(&limits);
        assert_eq!(emit(&a), emit(&b));
    }

    #[test]
    fn different_seeds_differ_somewhere() {
        let texts: std::collections::BTreeSet<String> = (0..20)
            .map(|s| emit(&gen_program(&GenLimits::with_seed(s))))
            .collect();
        assert!(texts.len() > 10);
    }

    #[test]
    fn zero_loop_weights_give_loop_free_programs() {
        for seed in 0..50 {
            let limits = GenLimits {
                weights: StmtWeights {
                    full_loop: 0,
                    partial_loop: 0,
                    ..StmtWeights::default()
                },
                ..GenLimits::with_seed(seed)
            };
            let p = gen_program(&limits);
            let mut loops = 0;
            visit_stmts(&p.body, &mut |s| {
                if matches!(s, Stmt::For { .. }) {
                    loops += 1;
                }
            });
            assert_eq!(loops, 0, "seed {seed} produced a loop");
        }
    }

    #[test]
    fn generated_programs_parse_and_run_conclusively() {
        for seed in 0..200 {
            let p = gen_program(&GenLimits::with_seed(seed));
            let text = emit(&p);
            let reparsed = parse(&text)
                .unwrap_or_else(|e| panic!("seed {seed} does not re-parse: {:?}\n{text}", e[0]));
            assert!(p.structurally_eq(&reparsed), "seed {seed} roundtrip\n{text}");
            let run = run_original(&p, 100_000);
            assert!(
                run.status.is_conclusive(),
                "seed {seed} inconclusive: {:?}\n{text}",
                run.status
            );
        }
    }

    #[test]
    fn every_generated_program_has_an_assertion() {
        for seed in 0..100 {
            let p = gen_program(&GenLimits::with_seed(seed));
            let mut asserts = 0;
            visit_stmts(&p.body, &mut |s| {
                if matches!(s, Stmt::Assert { .. }) {
                    asserts += 1;
                }
            });
            assert!(asserts >= 1, "seed {seed} has no assertion");
        }
    }

    #[test]
    fn safe_profile_generates_passing_qualifying_programs() {
        use crate::precision::classify_precision;
        let mut qualifying = 0;
        for seed in 0..60 {
            let p = gen_program(&GenLimits::safe_invariants(seed));
            let run = run_original(&p, 100_000);
            assert_eq!(
                run.status,
                RunStatus::AllPass,
                "seed {seed} not safe:\n{}",
                emit(&p)
            );
            if classify_precision(&p).all_qualify() {
                qualifying += 1;
            }
        }
        assert!(qualifying >= 55, "only {qualifying}/60 qualify");
    }
}
