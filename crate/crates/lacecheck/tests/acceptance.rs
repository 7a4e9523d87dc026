//! Acceptance suite: one test (and one printed pass/fail line) per shipped
//! criterion. Run with `cargo test --test acceptance -- --nocapture` to see
//! the lines; each criterion also fails the normal way on violation.

use std::sync::OnceLock;

use lacecheck::diagrams::DiagramSet;
use lacecheck::kernels::{
    pi_chain_bound, pi_chain_bound_legs, pi_chain_bound_split, PairIngredients,
};
use lacecheck::model::{ModelSpec, StepKernel, DEFAULT_BOND_BUDGET, DEFAULT_STATE_BUDGET};
use lacecheck::oracle::{
    pi_oracle, two_point_enumeration, two_point_mc, two_point_transfer, TwoPointTable,
};
use lacecheck::verify::{
    check_coefficient_bounds, check_inclusions, check_intermediates, check_sum_bounds,
    VerificationReport, VerifyContext, IDENT_TOL,
};

const M_LIST: [f64; 3] = [0.8, 1.0, 1.25];
const ELL_LIST: [usize; 3] = [0, 1, 2];
const MC_SEED: u64 = 0x1ace_c0de;

fn nn_spec(width: usize, horizon: usize, p: f64) -> ModelSpec {
    ModelSpec::new(StepKernel::nearest_neighbor(1, width).unwrap(), horizon, p, 1.0).unwrap()
}

fn m0() -> ModelSpec {
    nn_spec(4, 3, 0.5)
}

/// The six reference models every per-coefficient criterion runs over.
fn reference_specs() -> Vec<ModelSpec> {
    vec![
        nn_spec(3, 2, 0.2),
        nn_spec(3, 2, 0.5),
        nn_spec(3, 2, 0.8),
        nn_spec(4, 2, 0.5),
        nn_spec(3, 3, 0.5),
        nn_spec(4, 2, 0.8),
    ]
}

/// Oracle tables for the reference models, computed once per test binary.
fn reference_contexts() -> &'static [VerifyContext] {
    static CTXS: OnceLock<Vec<VerifyContext>> = OnceLock::new();
    CTXS.get_or_init(|| {
        reference_specs()
            .iter()
            .map(|spec| VerifyContext::new(spec, 2, DEFAULT_BOND_BUDGET).unwrap())
            .collect()
    })
}

fn m0_phi() -> &'static TwoPointTable {
    static PHI: OnceLock<TwoPointTable> = OnceLock::new();
    PHI.get_or_init(|| two_point_transfer(&m0(), DEFAULT_STATE_BUDGET).unwrap())
}

fn criterion(number: usize, name: &str, ok: bool, detail: &str) {
    println!(
        "acceptance {number:02} {name}: {}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "acceptance {number:02} {name} failed: {detail}");
}

fn assert_report(number: usize, name: &str, report: &VerificationReport) {
    let failures: Vec<String> = report
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} {:?}: lhs {} rhs {}", c.id, c.params, c.lhs, c.rhs))
        .collect();
    criterion(number, name, report.all_pass() && !report.checks.is_empty(), &failures.join("; "));
}

#[test]
fn acceptance_01_oracle_equivalence() {
    let mut worst = 0.0f64;
    for width in [3usize, 4] {
        for horizon in [2usize, 3] {
            for p in [0.2, 0.5, 0.8] {
                let spec = nn_spec(width, horizon, p);
                let a = two_point_transfer(&spec, DEFAULT_STATE_BUDGET).unwrap();
                let b = two_point_enumeration(&spec, DEFAULT_BOND_BUDGET).unwrap();
                for (x, y) in a.values.iter().zip(&b.values) {
                    worst = worst.max((x - y).abs());
                }
            }
        }
    }
    criterion(1, "oracle-equivalence", worst <= 1e-12, &format!("max diff {worst:e}"));
}

#[test]
fn acceptance_02_reference_values() {
    let spec = m0();
    let phi = m0_phi();
    let mut ok = (phi.get(&spec, 1, 1) - 0.25).abs() <= 1e-12;
    ok &= (phi.get(&spec, 0, 2) - 31.0 / 256.0).abs() <= 1e-12;
    let pi0 = pi_oracle(&spec, 0, DEFAULT_BOND_BUDGET).unwrap();
    let x = spec.vertex_id(lacecheck::model::Vertex { site: 0, t: 2 });
    ok &= (pi0.values[x] - 1.0 / 256.0).abs() <= 1e-12;
    for site in 0..spec.sites() {
        let v = spec.vertex_id(lacecheck::model::Vertex { site, t: 1 });
        ok &= pi0.values[v] == 0.0;
    }
    criterion(2, "reference-values", ok, "an exact reference value did not reproduce");
}

#[test]
fn acceptance_03_coefficient_upper_bounds() {
    let mut report = VerificationReport::new(&reference_specs()[0]);
    for ctx in reference_contexts() {
        let checks = check_coefficient_bounds(ctx);
        for c in checks.checks {
            if c.id == "pi-upper-bound" {
                report.push(c);
            }
        }
    }
    assert_report(3, "coefficient-upper-bounds", &report);
}

#[test]
fn acceptance_04_pivotal_bounds_and_split_identity() {
    let mut report = VerificationReport::new(&reference_specs()[0]);
    for ctx in reference_contexts() {
        let checks = check_coefficient_bounds(ctx);
        for c in checks.checks {
            if c.id == "pivotal-upper-bound" || c.id == "pivotal-split-identity" {
                report.push(c);
            }
        }
    }
    assert_report(4, "pivotal-bounds-and-split-identity", &report);
}

#[test]
fn acceptance_05_weighted_and_cosine_sum_bounds() {
    let mut report = VerificationReport::new(&reference_specs()[0]);
    for ctx in reference_contexts() {
        let checks = check_sum_bounds(ctx, &M_LIST, &ELL_LIST);
        for c in checks.checks {
            if c.id.starts_with("pi-weighted-sum-bound") || c.id.starts_with("pi-cos-sum-bound") {
                report.push(c);
            }
        }
    }
    assert_report(5, "weighted-and-cosine-sum-bounds", &report);
}

#[test]
fn acceptance_06_pivotal_sum_bounds() {
    let mut report = VerificationReport::new(&reference_specs()[0]);
    for ctx in reference_contexts() {
        let checks = check_sum_bounds(ctx, &M_LIST, &ELL_LIST);
        for c in checks.checks {
            if c.id == "pivotal-sum-bound" {
                report.push(c);
            }
        }
    }
    assert_report(6, "pivotal-sum-bounds", &report);
}

#[test]
fn acceptance_07_intermediate_inequalities() {
    // Coefficient oracles are not needed here, so the context is built with
    // n_max = 0 to keep the width-4 horizon-3 model cheap.
    let ctx = VerifyContext::new(&m0(), 0, DEFAULT_BOND_BUDGET).unwrap();
    let report = check_intermediates(&ctx, &M_LIST);
    assert_report(7, "intermediate-inequalities", &report);
}

#[test]
fn acceptance_08_event_inclusions() {
    let spec = nn_spec(3, 2, 0.5);
    assert_eq!(spec.bond_count(), 12, "inclusion model must have 2^12 configurations");
    let report = check_inclusions(&spec, lacecheck::connectivity::DEFAULT_PATH_BUDGET).unwrap();
    assert_report(8, "event-inclusions", &report);
}

#[test]
fn acceptance_09_chain_rewrite_identities() {
    let spec = m0();
    let phi = m0_phi().to_function(&spec);
    let ing = PairIngredients::new(&spec, &phi);
    let mut worst = 0.0f64;
    for n in 1..=3usize {
        let base = pi_chain_bound(&ing, n);
        let legs = pi_chain_bound_legs(&ing, n);
        for (a, b) in base.iter().zip(&legs) {
            worst = worst.max((a - b).abs());
        }
        for j in 1..=n {
            let split = pi_chain_bound_split(&ing, n, j);
            for (a, b) in base.iter().zip(&split) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    criterion(9, "chain-rewrite-identities", worst <= IDENT_TOL, &format!("max diff {worst:e}"));
}

#[test]
fn acceptance_10_determinism_and_monte_carlo() {
    // Byte-identical reports across two full recomputations.
    let spec = nn_spec(3, 2, 0.5);
    let render = || {
        let ctx = VerifyContext::new(&spec, 2, DEFAULT_BOND_BUDGET).unwrap();
        let mut report = check_coefficient_bounds(&ctx);
        report.merge(check_sum_bounds(&ctx, &M_LIST, &ELL_LIST));
        report.merge(check_intermediates(&ctx, &M_LIST));
        report
            .merge(check_inclusions(&spec, lacecheck::connectivity::DEFAULT_PATH_BUDGET).unwrap());
        serde_json::to_string_pretty(&report).unwrap()
    };
    let deterministic = render() == render();

    // Seeded Monte Carlo estimate within four standard errors everywhere.
    let spec = m0();
    let exact = m0_phi();
    let mc = two_point_mc(&spec, 100_000, MC_SEED);
    let stderr = mc.stderr.as_ref().unwrap();
    let mut worst_sigma = 0.0f64;
    for (i, (est, tru)) in mc.values.iter().zip(&exact.values).enumerate() {
        let spread = stderr[i].max(1e-12);
        worst_sigma = worst_sigma.max((est - tru).abs() / spread);
    }
    // Diagram values are deterministic too (same m, same table).
    let phi = exact.to_function(&spec);
    let diagrams_stable = serde_json::to_string(&DiagramSet::compute(&spec, &phi, 1.0)).unwrap()
        == serde_json::to_string(&DiagramSet::compute(&spec, &phi, 1.0)).unwrap();

    criterion(
        10,
        "determinism-and-monte-carlo",
        deterministic && diagrams_stable && worst_sigma <= 4.0,
        &format!("deterministic={deterministic} worst sigma {worst_sigma:.2}"),
    );
}
