//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fail.

mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};
use std::time::Instant;

use bell_core::analysis::{
    canonical_gghz_settings, gghz_violation_closed, max_violation, optimize_settings, quantum_value,
    threshold_visibility, visibility_crossing, OptimizerConfig,
};
use bell_core::bell::{
    build_operator_matrix, extended_mabk_terms, extended_terms, mabk_coefficients, mabk_sign_table, term_count,
    wwzb_terms,
};
use bell_core::lhv::lhv_max;
use bell_core::linalg::{kron, ComplexMatrix};
use bell_core::states::{cluster4, generalized_ghz, ghz, w_state, QuantumState};
use common::{random_settings, random_sign_table};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ghz_maximal_violation() -> Outcome {
    let mut worst = 0.0f64;
    for n in 3..=10 {
        let t = extended_mabk_terms(n).map_err(|e| e.to_string())?;
        let s = canonical_gghz_settings(n, FRAC_PI_4).map_err(|e| e.to_string())?;
        let got = max_violation(&t, &s).map_err(|e| e.to_string())?;
        worst = worst.max((got - 2f64.powf((n as f64 - 2.0) / 2.0)).abs());
    }
    check(worst <= 1e-8, format!("N=3..10, max |max_eig - 2^((N-2)/2)| = {worst:.2e} (tol 1e-8)"))
}

fn generalized_ghz_curve() -> Outcome {
    let mut worst = 0.0f64;
    let mut min_interior = f64::INFINITY;
    for n in [3, 4, 5, 7] {
        let t = extended_mabk_terms(n).map_err(|e| e.to_string())?;
        for i in 0..50 {
            let alpha = FRAC_PI_2 * i as f64 / 49.0;
            let s = canonical_gghz_settings(n, alpha).map_err(|e| e.to_string())?;
            let state: QuantumState = generalized_ghz(n, alpha).map_err(|e| e.to_string())?.into();
            let v = quantum_value(&state, &t, &s).map_err(|e| e.to_string())?;
            worst = worst.max((v - gghz_violation_closed(n, alpha)).abs());
            if i != 0 && i != 49 {
                min_interior = min_interior.min(v);
            }
        }
    }
    check(
        worst <= 1e-8 && min_interior > 1.0,
        format!("max |closed - matrix| = {worst:.2e} (tol 1e-8); min interior value = {min_interior:.6} (> 1)"),
    )
}

fn escape_region_detection() -> Outcome {
    let n = 5;
    let alpha = 0.5 * 0.25f64.asin();
    let boundary = 1.0 / 2f64.powi(n as i32 - 1).sqrt();
    let t = extended_mabk_terms(n).map_err(|e| e.to_string())?;
    let s = canonical_gghz_settings(n, alpha).map_err(|e| e.to_string())?;
    let state: QuantumState = generalized_ghz(n, alpha).map_err(|e| e.to_string())?.into();
    let v = quantum_value(&state, &t, &s).map_err(|e| e.to_string())?;
    check(
        ((2.0 * alpha).sin() - boundary).abs() <= 1e-15 && (v - 1.19896).abs() <= 1e-5,
        format!("N=5, sin 2a = 1/4: value = {v:.8} (target 1.19896, tol 1e-5)"),
    )
}

fn lhv_bound() -> Outcome {
    let mut worst = 0.0f64;
    for n in 3..=6 {
        let t = extended_mabk_terms(n).map_err(|e| e.to_string())?;
        worst = worst.max((lhv_max(&t).map_err(|e| e.to_string())? - 1.0).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..20 {
        let t = extended_terms(&wwzb_terms(&random_sign_table(3, &mut rng))).map_err(|e| e.to_string())?;
        worst = worst.max((lhv_max(&t).map_err(|e| e.to_string())? - 1.0).abs());
    }
    check(worst <= 1e-12, format!("MABK N=3..6 and 20 random tables at N=4: max |lhv_max - 1| = {worst:.2e} (tol 1e-12)"))
}

fn optimized(state: QuantumState, n: usize) -> Result<f64, String> {
    let t = extended_mabk_terms(n).map_err(|e| e.to_string())?;
    optimize_settings(&state, &t, &OptimizerConfig::default())
        .map(|r| r.value)
        .map_err(|e| e.to_string())
}

fn w_state_factors() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (n, target) in [(3, 1.202), (4, 1.316), (5, 1.382)] {
        let v = optimized(w_state(n).map_err(|e| e.to_string())?.into(), n)?;
        ok &= (v - target).abs() <= 5e-3;
        parts.push(format!("N={n}: {v:.5} (target {target})"));
    }
    check(ok, format!("{} (tol 5e-3, seed 0)", parts.join(", ")))
}

fn cluster_states() -> Outcome {
    let c4 = optimized(cluster4().into(), 4)?;
    let g3 = optimized(ghz(3).map_err(|e| e.to_string())?.into(), 3)?;
    check(
        (c4 - SQRT_2).abs() <= 5e-3 && (g3 - SQRT_2).abs() <= 5e-3,
        format!("psi_4: {c4:.6}, GHZ_3: {g3:.6} (target sqrt 2, tol 5e-3)"),
    )
}

fn visibility_thresholds() -> Outcome {
    let (mut worst_formula, mut worst_cross) = (0.0f64, 0.0f64);
    for n in 3..=10 {
        let t = extended_mabk_terms(n).map_err(|e| e.to_string())?;
        let s = canonical_gghz_settings(n, FRAC_PI_4).map_err(|e| e.to_string())?;
        let vthr = threshold_visibility(n);
        worst_formula = worst_formula.max((vthr - 1.0 / max_violation(&t, &s).map_err(|e| e.to_string())?).abs());
        let crossing = visibility_crossing(n, &t, &s, 1e-9).map_err(|e| e.to_string())?;
        worst_cross = worst_cross.max((crossing - vthr).abs());
    }
    check(
        worst_formula <= 1e-9 && worst_cross <= 1e-6,
        format!("N=3..10: |V_thr - 1/max_eig| <= {worst_formula:.2e} (tol 1e-9), |bisection - V_thr| <= {worst_cross:.2e} (tol 1e-6)"),
    )
}

fn term_counts() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for n in [4, 6, 8] {
        let count = term_count(&extended_mabk_terms(n).map_err(|e| e.to_string())?);
        ok &= count == (1 << (n - 1)) + 2;
        parts.push(format!("N={n}: {count}"));
    }
    check(ok, format!("{} (expected 2^(N-1)+2)", parts.join(", ")))
}

fn operator_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut worst_reduce, mut worst_square) = (0.0f64, 0.0f64);
    let one = Complex64::new(1.0, 0.0);
    for _ in 0..50 {
        let m = rng.gen_range(2..=4);
        let inner = wwzb_terms(&random_sign_table(m, &mut rng));
        let ext = extended_terms(&inner).map_err(|e| e.to_string())?;
        let mut s = random_settings(m + 1, &mut rng);
        let inner_b = build_operator_matrix(&inner, &s[..m]).map_err(|e| e.to_string())?;

        let b = build_operator_matrix(&ext, &s).map_err(|e| e.to_string())?;
        let b2 = b.matrix().matmul(b.matrix()).map_err(|e| e.to_string())?;
        let inner_sq = inner_b.matrix().matmul(inner_b.matrix()).map_err(|e| e.to_string())?;
        let dot = s[m].setting_1.dot(&s[m].setting_2);
        let mut expect = kron(&inner_sq, &ComplexMatrix::identity(2).scale(one * (0.5 * (1.0 + dot)))).map_err(|e| e.to_string())?;
        expect
            .add_scaled(one * (0.5 * (1.0 - dot)), &ComplexMatrix::identity(1 << (m + 1)))
            .map_err(|e| e.to_string())?;
        worst_square = worst_square.max(b2.max_abs_diff(&expect));

        s[m].setting_2 = s[m].setting_1;
        let reduced_b = build_operator_matrix(&ext, &s).map_err(|e| e.to_string())?;
        let expect = kron(inner_b.matrix(), &s[m].setting_1.matrix()).map_err(|e| e.to_string())?;
        worst_reduce = worst_reduce.max(reduced_b.matrix().max_abs_diff(&expect));
    }
    check(
        worst_reduce <= 1e-8 && worst_square <= 1e-8,
        format!("50 draws, N<=5: reduction dev {worst_reduce:.2e}, square dev {worst_square:.2e} (tol 1e-8)"),
    )
}

fn mabk_cross_check() -> Outcome {
    let mut worst = 0.0f64;
    for m in 2..=8 {
        let terms = wwzb_terms(&mabk_sign_table(m).map_err(|e| e.to_string())?);
        let closed = mabk_coefficients(m).map_err(|e| e.to_string())?;
        for mask in 0..1usize << m {
            let key: Vec<u8> = (0..m).map(|j| 1 + ((mask >> j) & 1) as u8).collect();
            let got = terms.get(&key).unwrap_or(0.0);
            worst = worst.max((got - closed.for_primed_count(mask.count_ones() as usize)).abs());
        }
    }
    check(worst <= 1e-12, format!("M=2..8: max coefficient deviation {worst:.2e} (tol 1e-12)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("GHZ maximal violation", ghz_maximal_violation),
        ("generalized-GHZ curve", generalized_ghz_curve),
        ("escape-region detection", escape_region_detection),
        ("LHV bound", lhv_bound),
        ("W-state factors", w_state_factors),
        ("cluster states", cluster_states),
        ("visibility thresholds", visibility_thresholds),
        ("term count", term_counts),
        ("operator identities", operator_identities),
        ("MABK coefficient cross-check", mabk_cross_check),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = run();
        let elapsed = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{elapsed:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{elapsed:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
