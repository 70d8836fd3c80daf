mod common;

use bell_core::bell::{
    build_operator_matrix, extended_terms, mabk_coefficients, mabk_sign_table, wwzb_terms, TermMap,
};
use bell_core::linalg::{kron, ComplexMatrix};
use bell_core::observables::ObserverSettings;
use common::{random_settings, random_sign_table};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[test]
fn equal_last_settings_reduce_to_inner_operator() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..30 {
        let m = rng.gen_range(2..=4);
        let inner = wwzb_terms(&random_sign_table(m, &mut rng));
        let ext = extended_terms(&inner).unwrap();
        let mut s = random_settings(m + 1, &mut rng);
        s[m].setting_2 = s[m].setting_1;
        let full = build_operator_matrix(&ext, &s).unwrap();
        let reduced = kron(
            build_operator_matrix(&inner, &s[..m]).unwrap().matrix(),
            &s[m].setting_1.matrix(),
        )
        .unwrap();
        assert!(full.matrix().max_abs_diff(&reduced) <= 1e-9);
    }
}

// B² = B_{N−1}² ⊗ ½(1 + a·a')I + I ⊗ ½(1 − a·a')I
#[test]
fn square_splits_into_inner_square_and_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..30 {
        let m = rng.gen_range(2..=4);
        let inner = wwzb_terms(&random_sign_table(m, &mut rng));
        let ext = extended_terms(&inner).unwrap();
        let s = random_settings(m + 1, &mut rng);
        let b = build_operator_matrix(&ext, &s).unwrap();
        let b2 = b.matrix().matmul(b.matrix()).unwrap();

        let inner_b = build_operator_matrix(&inner, &s[..m]).unwrap();
        let inner_sq = inner_b.matrix().matmul(inner_b.matrix()).unwrap();
        let dot = s[m].setting_1.dot(&s[m].setting_2);
        let mut expect = kron(&inner_sq, &ComplexMatrix::identity(2).scale(real(0.5 * (1.0 + dot)))).unwrap();
        let rest = ComplexMatrix::identity(1 << (m + 1)).scale(real(0.5 * (1.0 - dot)));
        expect.add_scaled(real(1.0), &rest).unwrap();
        assert!(b2.max_abs_diff(&expect) <= 1e-8);
    }
}

#[test]
fn mabk_coefficients_depend_only_on_primed_count() {
    for m in 1..=8 {
        let terms = wwzb_terms(&mabk_sign_table(m).unwrap());
        let closed = mabk_coefficients(m).unwrap();
        for mask in 0..1usize << m {
            let key: Vec<u8> = (0..m).map(|j| 1 + ((mask >> j) & 1) as u8).collect();
            let primed = mask.count_ones() as usize;
            let got = terms.get(&key).unwrap_or(0.0);
            assert!((got - closed.for_primed_count(primed)).abs() <= 1e-12, "m={m} key={key:?}");
        }
    }
}

#[test]
fn operators_are_traceless() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let m = rng.gen_range(2..=5);
        let ext = extended_terms(&wwzb_terms(&random_sign_table(m, &mut rng))).unwrap();
        let b = build_operator_matrix(&ext, &random_settings(m + 1, &mut rng)).unwrap();
        assert!(b.matrix().trace().norm() <= 1e-9);
    }
}

#[test]
fn wwzb_spectral_radius_is_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..40 {
        let m = rng.gen_range(1..=6);
        let t = wwzb_terms(&random_sign_table(m, &mut rng));
        let b = build_operator_matrix(&t, &random_settings(m, &mut rng)).unwrap();
        let bound = 2f64.powf((m as f64 - 1.0) / 2.0);
        assert!(b.max_abs_eigenvalue() <= bound + 1e-8);
    }
}

// Direct Σ_k c_k ⊗_j M_j(k_j), one full Kronecker chain per term.
fn build_naive(t: &TermMap, s: &[ObserverSettings]) -> ComplexMatrix {
    let n = t.num_parties();
    let mut acc = ComplexMatrix::zeros(1 << n, 1 << n);
    for (k, c) in t.iter() {
        let mut m = ComplexMatrix::identity(1);
        for (j, &choice) in k.choices().iter().enumerate() {
            let local = match choice {
                0 => ComplexMatrix::identity(2),
                1 => s[j].setting_1.matrix(),
                _ => s[j].setting_2.matrix(),
            };
            m = kron(&m, &local).unwrap();
        }
        acc.add_scaled(real(c), &m).unwrap();
    }
    acc
}

#[test]
fn grouped_build_matches_naive_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 3..=6 {
        let ext = extended_terms(&wwzb_terms(&random_sign_table(n - 1, &mut rng))).unwrap();
        let s = random_settings(n, &mut rng);
        let fast = build_operator_matrix(&ext, &s).unwrap();
        assert!(fast.matrix().max_abs_diff(&build_naive(&ext, &s)) <= 1e-12);
    }
}
