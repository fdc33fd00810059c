//! Acceptance suite. One test per criterion; each prints a PASS line with
//! its metrics (visible under `--nocapture`).

use arrabs::analysis::{array_inventory, fullarrayaccess};
use arrabs::ast::{visit_stmts, Stmt};
use arrabs::bmc::{verify_with_bmc, BmcConfig, BmcStatus, VerifyMode};
use arrabs::generator::{gen_program, GenLimits};
use arrabs::interp::{run_original, RunStatus};
use arrabs::oracle::{
    check_precision_empirical, check_represents, check_soundness, OracleOpts, RepresentsMode,
    VerdictStatus,
};
use arrabs::parser::{parse, parse_transformed};
use arrabs::precision::{classify_precision, Rule};
use arrabs::printer::emit;
use arrabs::transform::{transform_program, TransformConfig};
use arrabs::validate::validate_transformed;
use std::time::{Duration, Instant};

fn square_pairs(size: i64, first_bound: i64) -> String {
    format!(
        "struct S {{\n   unsigned int p;\n   unsigned int q;\n}} a[{size}];\nint i,k;\n\nmain()\n{{\n for(i=0; i<{first_bound}; i++)\n {{\n  k = i;\n  a[i].p = k;\n  a[i].q = k * k ;\n }}\n\n for (i=0; i<{size}; i++)\n {{\n  assert(a[i].q ==\n          a[i].p * a[i].p);\n }}\n}}\n"
    )
}

/// Expected transform of the motivating example, with the documented
/// deviations: havocs are type-wide `nd()` and the trailing havoc of the
/// first loop body is emitted.
const SQUARE_PAIRS_TRANSFORMED: &str = "\
struct S { unsigned int p; unsigned int q; };
struct S x_a;
int i_a;
int i; int k;
main() {
  i_a = nd(0, 99999);
  k = nd();
  i = i_a;
  k = i;
  (i == i_a) ? x_a.p = k : k;
  (i == i_a) ? x_a.q = k * k : k * k;
  k = nd();
  i = i_a;
  assert(((i == i_a) ? x_a.q : nd()) == ((i == i_a) ? x_a.p : nd()) * ((i == i_a) ? x_a.p : nd()));
}
";

#[test]
fn criterion_1_golden_transform() {
    let start = Instant::now();
    let program = parse(&square_pairs(100000, 100000)).expect("motivating example parses");
    let (transformed, report) =
        transform_program(&program, &TransformConfig::default()).expect("transforms");
    let expected = parse_transformed(SQUARE_PAIRS_TRANSFORMED).expect("expected text parses");
    assert!(
        transformed.structurally_eq(&expected),
        "transform differs from the expected program:\n{}",
        emit(&transformed)
    );
    assert!(validate_transformed(&transformed).is_conformant());
    assert_eq!(report.s3, 2);
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!("criterion 1 (golden transform): PASS — structural match in {elapsed:?}");
}

#[test]
fn criterion_2_grammar_conformance() {
    let start = Instant::now();
    let mut violations = 0usize;
    for seed in 0..1000u64 {
        let program = gen_program(&GenLimits::with_seed(seed));
        let (transformed, _) =
            transform_program(&program, &TransformConfig::default()).expect("transforms");
        let report = validate_transformed(&transformed);
        if !report.is_conformant() {
            violations += 1;
            eprintln!("seed {seed}: {} violations", report.violations.len());
        }
    }
    let elapsed = start.elapsed();
    assert_eq!(violations, 0, "{violations} non-conformant transforms");
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!(
        "criterion 2 (grammar conformance): PASS — 1000 transforms conformant in {elapsed:?}"
    );
}

#[test]
fn criterion_3_soundness_property() {
    let start = Instant::now();
    let opts = OracleOpts {
        exec_cap: 100_000,
        ..OracleOpts::default()
    };
    let mut checked = 0usize;
    let mut capped = 0usize;
    let mut violated = 0usize;
    let mut seed = 0u64;
    while checked < 500 {
        assert!(
            seed < 50_000,
            "generator did not supply 500 checkable unsafe programs (got {checked})"
        );
        let program = gen_program(&GenLimits::with_seed(seed));
        seed += 1;
        if !matches!(
            run_original(&program, opts.fuel).status,
            RunStatus::AssertFailed { .. }
        ) {
            continue;
        }
        let verdict = check_soundness(&program, &opts);
        match verdict.status {
            VerdictStatus::Holds => checked += 1,
            VerdictStatus::Violated => {
                violated += 1;
                checked += 1;
                eprintln!(
                    "seed {}: {}\n{}",
                    seed - 1,
                    verdict.detail,
                    emit(&program)
                );
            }
            // Enumeration larger than the per-program execution budget:
            // outside the checked population.
            VerdictStatus::Inconclusive => capped += 1,
            VerdictStatus::OutOfClass => {}
        }
    }
    let elapsed = start.elapsed();
    assert_eq!(violated, 0, "{violated} soundness violations");
    assert!(elapsed < Duration::from_secs(600), "took {elapsed:?}");
    println!(
        "criterion 3 (soundness property): PASS — 500/500 hold ({} over budget, skipped) in {elapsed:?}",
        capped
    );
}

#[test]
fn criterion_4_precision_property() {
    let start = Instant::now();
    let opts = OracleOpts {
        exec_cap: 100_000,
        ..OracleOpts::default()
    };
    let mut checked = 0usize;
    let mut capped = 0usize;
    let mut violated = 0usize;
    let mut seed = 0u64;
    while checked < 200 {
        assert!(
            seed < 10_000,
            "generator did not supply 200 qualifying safe programs (got {checked})"
        );
        let program = gen_program(&GenLimits::safe_invariants(seed));
        seed += 1;
        let verdict = check_precision_empirical(&program, &opts);
        match verdict.status {
            VerdictStatus::Holds => checked += 1,
            VerdictStatus::Violated => {
                violated += 1;
                checked += 1;
                eprintln!(
                    "seed {}: {}\n{}",
                    seed - 1,
                    verdict.detail,
                    emit(&program)
                );
            }
            VerdictStatus::Inconclusive => capped += 1,
            VerdictStatus::OutOfClass => {}
        }
    }
    let elapsed = start.elapsed();
    assert_eq!(violated, 0, "{violated} false alarms on qualifying programs");
    assert!(elapsed < Duration::from_secs(600), "took {elapsed:?}");
    println!(
        "criterion 4 (precision property): PASS — 200/200 hold ({} over budget, skipped) in {elapsed:?}",
        capped
    );
}

/// Twenty tiny straight-line / full-access programs (array size <= 3).
/// Assertions sit outside writing loops or read iteration-independent
/// state, the shapes the representation check speaks about.
const REPRESENTS_PROGRAMS: [&str; 20] = [
    "int a[2];\nmain() { a[0] = 7; a[1] = 9; assert(1); }",
    "int a[3];\nmain() { assert(1); }",
    "int x; int y;\nmain() { x = 3; y = x + 1; assert(y == 4); }",
    "int a[1];\nmain() { a[0] = 5; assert(a[0] == 5); }",
    "int a[2]; int x;\nmain() { x = 1; a[0] = x; assert(x == 1); a[1] = x + 1; assert(1); }",
    "int a[3]; int i;\nmain() { for (i = 0; i < 3; i++) { a[i] = i; } assert(1); }",
    "int a[3]; int i;\nmain() { for (i = 0; i < 3; i++) { a[i] = i * 2; } assert(1); }",
    "int a[2]; int i;\nmain() { for (i = 0; i < 2; i++) { a[i] = 5; } assert(1); }",
    "struct S { unsigned int p; unsigned int q; } a[2]; int i, k;\nmain() { for (i = 0; i < 2; i++) { k = i; a[i].p = k; a[i].q = k * k; } assert(1); }",
    "int a[2]; int i; int u;\nmain() { for (i = 0; i < 2; i++) { u = i; a[i] = u * 3; } assert(1); }",
    "int a[2]; int i; int t;\nmain() { for (i = 0; i < 2; i++) { t = i; a[i] = t; } assert(1); }",
    "int a[2]; int b[2];\nmain() { a[0] = 1; b[1] = 2; a[1] = 3; b[0] = 4; assert(1); }",
    "int a[2]; int i;\nmain() { for (i = 0; i < 2; i++) { a[i] = i + 1; } for (i = 0; i < 2; i++) { a[i] = a[i] + 1; } assert(1); }",
    "int a[3]; int x;\nmain() { a[0] = 1; x = a[0]; assert(x == 1); }",
    "int a[1]; int i;\nmain() { for (i = 0; i < 1; i++) { a[i] = 9; } assert(a[0] == 9); }",
    "struct S { unsigned int p; unsigned int q; } a[3];\nmain() { a[0].p = 1; a[2].q = 5; assert(1); }",
    "int a[2]; int x;\nmain() { x = 0; a[x] = 3; a[x + 1] = 4; assert(1); }",
    "int a[3]; int i; int s;\nmain() { s = 2; for (i = 0; i < 3; i++) { a[i] = s; } assert(s == 2); }",
    "int a[2]; int i;\nmain() { for (i = 0; i < 2; i++) { a[i] = i; } for (i = 0; i < 2; i++) { assert(a[i] == i); } }",
    "int a[2];\nmain() { a[1] = 8; a[1] = 9; assert(1); }",
];

#[test]
fn criterion_5_represents_relation() {
    let start = Instant::now();
    let opts = OracleOpts::default();
    for (k, src) in REPRESENTS_PROGRAMS.iter().enumerate() {
        let program = parse(src).unwrap_or_else(|e| panic!("program {k} parses: {}", e[0]));
        let verdict = check_represents(&program, &opts, RepresentsMode::Exempting);
        assert_eq!(
            verdict.status,
            VerdictStatus::Holds,
            "program {k}: {}\n{src}",
            verdict.detail
        );
    }
    let elapsed = start.elapsed();
    println!(
        "criterion 5 (represents relation): PASS — 20/20 hold in exempting mode in {elapsed:?}"
    );
}

#[test]
fn criterion_6_roundtrip() {
    let start = Instant::now();
    let mut mismatches = 0usize;
    for seed in 0..1000u64 {
        let program = gen_program(&GenLimits::with_seed(seed));
        let text = emit(&program);
        let reparsed = match parse(&text) {
            Ok(p) => p,
            Err(e) => {
                eprintln!("seed {seed} does not re-parse: {}", e[0]);
                mismatches += 1;
                continue;
            }
        };
        if !program.structurally_eq(&reparsed) || emit(&reparsed) != text {
            eprintln!("seed {seed}: roundtrip mismatch");
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    assert_eq!(mismatches, 0);
    println!("criterion 6 (roundtrip): PASS — 1000 programs stable in {elapsed:?}");
}

#[test]
fn criterion_7_precision_classifier_sanity() {
    let program = parse(&square_pairs(100000, 100000)).expect("parses");
    let report = classify_precision(&program);
    assert_eq!(report.asserts.len(), 1);
    let a = &report.asserts[0];
    assert!(a.qualifies, "motivating assertion must qualify: {:?}", a.violated);
    assert!(a.violated.is_empty());

    let mutated = parse(&square_pairs(100000, 50000)).expect("parses");
    let report = classify_precision(&mutated);
    let a = &report.asserts[0];
    assert!(!a.qualifies);
    assert!(
        a.violated.contains(&Rule::L1),
        "shrunk loop bound must violate l1: {:?}",
        a.violated
    );
    println!("criterion 7 (precision classifier sanity): PASS — qualifies, and l1 flips on mutation");
}

#[test]
fn criterion_8_bmc_smoke() {
    let config = match resolve_bmc() {
        Some(c) => c,
        None => {
            println!("criterion 8 (bmc smoke): SKIPPED — no BMC configured (set ARRABS_BMC or install cbmc)");
            return;
        }
    };

    let dir = std::env::temp_dir().join(format!("arrabs-smoke-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let file = dir.join("square_pairs.c");
    std::fs::write(&file, square_pairs(100000, 100000)).expect("writes");

    let mut transformed_cfg = config.clone();
    transformed_cfg.timeout_secs = 30;
    let start = Instant::now();
    let verdict = verify_with_bmc(&file, &transformed_cfg, VerifyMode::Transformed)
        .expect("harness runs");
    assert_eq!(
        verdict.status,
        BmcStatus::Safe,
        "transformed motivating example must verify: {}",
        verdict.output_excerpt
    );
    let transformed_time = start.elapsed();
    assert!(transformed_time < Duration::from_secs(30));

    let mut original_cfg = config.clone();
    original_cfg.timeout_secs = 60;
    let verdict = verify_with_bmc(&file, &original_cfg, VerifyMode::Original).expect("harness runs");
    assert!(
        !matches!(verdict.status, BmcStatus::Safe | BmcStatus::Unsafe),
        "original must exhaust the budget, got {:?}",
        verdict.status
    );
    let _ = std::fs::remove_dir_all(&dir);
    println!(
        "criterion 8 (bmc smoke): PASS — transformed safe in {transformed_time:?}, original exhausts 60 s"
    );
}

fn resolve_bmc() -> Option<BmcConfig> {
    if let Some(cfg) = BmcConfig::from_env() {
        return Some(cfg);
    }
    let have_cbmc = std::process::Command::new("cbmc")
        .arg("--version")
        .stdout(std::process::Stdio::null())
        .stderr(std::process::Stdio::null())
        .status()
        .map(|s| s.success())
        .unwrap_or(false);
    have_cbmc.then(BmcConfig::default)
}

/// The soundness suite exercises both loop-lowering paths; make sure the
/// generated corpus actually contains full-access and partial loops.
#[test]
fn generated_corpus_covers_both_loop_shapes() {
    let mut full = 0usize;
    let mut partial = 0usize;
    for seed in 0..300u64 {
        let program = gen_program(&GenLimits::with_seed(seed));
        let arrays = array_inventory(&program);
        visit_stmts(&program.body, &mut |s| {
            if matches!(s, Stmt::For { .. }) {
                if arrays.iter().any(|a| fullarrayaccess(s, a)) {
                    full += 1;
                } else {
                    partial += 1;
                }
            }
        });
    }
    assert!(full > 50, "only {full} full-access loops in 300 programs");
    assert!(partial > 50, "only {partial} partial loops in 300 programs");
}
