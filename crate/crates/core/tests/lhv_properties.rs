mod common;

use bell_core::bell::{extended_mabk_terms, extended_terms, wwzb_terms, TermMap};
use bell_core::lhv::{lhv_max, lhv_value, verify_bound, verify_bound_sharded, DeterministicStrategy};
use common::random_sign_table;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn mixtures_never_beat_deterministic_strategies() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let terms = [
        extended_mabk_terms(3).unwrap(),
        extended_mabk_terms(4).unwrap(),
        extended_terms(&wwzb_terms(&random_sign_table(3, &mut rng))).unwrap(),
    ];
    for t in &terms {
        let n = t.num_parties();
        let max = lhv_max(t).unwrap();
        for _ in 0..1000 {
            let points = rng.gen_range(1..=8);
            let weights: Vec<f64> = (0..points).map(|_| rng.gen::<f64>()).collect();
            let total: f64 = weights.iter().sum();
            let value: f64 = weights
                .iter()
                .map(|w| {
                    let s = DeterministicStrategy::from_index(rng.gen_range(0..1u64 << (2 * n)), n);
                    w / total * lhv_value(t, &s).unwrap()
                })
                .sum();
            assert!(value.abs() <= max + 1e-12);
        }
    }
}

#[test]
fn global_flip_multiplies_terms_by_their_parity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let t = extended_terms(&wwzb_terms(&random_sign_table(3, &mut rng))).unwrap();
    let parity_flipped = TermMap::new(
        4,
        t.iter().map(|(k, c)| {
            let weight = k.choices().iter().filter(|&&x| x != 0).count();
            (k.clone(), if weight % 2 == 0 { c } else { -c })
        }),
    )
    .unwrap();
    for idx in 0..256u64 {
        let s = DeterministicStrategy::from_index(idx, 4);
        let flipped = lhv_value(&t, &s.flipped()).unwrap();
        assert!((flipped - lhv_value(&parity_flipped, &s).unwrap()).abs() <= 1e-12);
    }
    assert_eq!(lhv_max(&t).unwrap(), lhv_max(&parity_flipped).unwrap());
}

#[test]
fn extension_preserves_the_local_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for m in 2..=4 {
        for _ in 0..10 {
            let inner = wwzb_terms(&random_sign_table(m, &mut rng));
            let ext = extended_terms(&inner).unwrap();
            let (a, b) = (lhv_max(&inner).unwrap(), lhv_max(&ext).unwrap());
            assert!((a - b).abs() <= 1e-12, "inner {a} extended {b}");
            assert!((b - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn random_tables_at_four_parties_are_tight() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let ext = extended_terms(&wwzb_terms(&random_sign_table(3, &mut rng))).unwrap();
        let r = verify_bound(&ext).unwrap();
        assert!(r.holds);
        assert!((r.max_value - 1.0).abs() <= 1e-12);
        assert!((lhv_value(&ext, &r.witness).unwrap().abs() - r.max_value).abs() <= 1e-12);
    }
}

#[test]
fn sharded_mode_covers_nine_parties() {
    let r = verify_bound_sharded(&extended_mabk_terms(9).unwrap()).unwrap();
    assert_eq!(r.shards, 4);
    assert!(r.holds);
    assert!((r.max_value - 1.0).abs() <= 1e-12);
}
