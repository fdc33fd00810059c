//! Long-running differential sweeps, beyond the acceptance budgets.
//! Ignored by default; run with `cargo test --test stress -- --ignored`.

use arrabs::generator::{gen_program, GenLimits, StmtWeights};
use arrabs::interp::{run_original, RunStatus};
use arrabs::oracle::{check_precision_empirical, check_soundness, OracleOpts, VerdictStatus};
use arrabs::printer::emit;

fn weight_variants() -> Vec<StmtWeights> {
    vec![
        StmtWeights::default(),
        StmtWeights {
            branch: 6,
            ..StmtWeights::default()
        },
        StmtWeights {
            partial_loop: 6,
            full_loop: 1,
            ..StmtWeights::default()
        },
        StmtWeights {
            assign: 1,
            array_write: 8,
            ..StmtWeights::default()
        },
        StmtWeights {
            assertion: 6,
            ..StmtWeights::default()
        },
    ]
}

#[test]
#[ignore]
fn soundness_sweep_across_weight_variants() {
    let opts = OracleOpts::default();
    let mut checked = 0usize;
    let mut violations = Vec::new();
    for (v, weights) in weight_variants().into_iter().enumerate() {
        for seed in 0..1500u64 {
            let limits = GenLimits {
                weights,
                ..GenLimits::with_seed(seed)
            };
            let program = gen_program(&limits);
            if !matches!(
                run_original(&program, opts.fuel).status,
                RunStatus::AssertFailed { .. }
            ) {
                continue;
            }
            let verdict = check_soundness(&program, &opts);
            if verdict.status == VerdictStatus::Violated {
                violations.push((v, seed, verdict.detail.clone(), emit(&program)));
            }
            if verdict.status != VerdictStatus::Inconclusive {
                checked += 1;
            }
        }
    }
    for (v, seed, detail, text) in &violations {
        eprintln!("variant {v} seed {seed}: {detail}\n{text}");
    }
    eprintln!("checked {checked} unsafe programs across weight variants");
    assert!(violations.is_empty());
    assert!(checked > 2000);
}

#[test]
#[ignore]
fn precision_sweep() {
    let opts = OracleOpts::default();
    let mut checked = 0usize;
    let mut violations = Vec::new();
    for seed in 0..1000u64 {
        let program = gen_program(&GenLimits::safe_invariants(seed));
        let verdict = check_precision_empirical(&program, &opts);
        match verdict.status {
            VerdictStatus::Violated => {
                violations.push((seed, verdict.detail.clone(), emit(&program)))
            }
            VerdictStatus::Holds => checked += 1,
            _ => {}
        }
    }
    for (seed, detail, text) in &violations {
        eprintln!("seed {seed}: {detail}\n{text}");
    }
    eprintln!("checked {checked} qualifying programs");
    assert!(violations.is_empty());
    assert!(checked > 800);
}
