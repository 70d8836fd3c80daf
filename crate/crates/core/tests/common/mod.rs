#![allow(dead_code)]

use bell_core::bell::{SignTable, MAX_PARTIES};
use bell_core::observables::ObserverSettings;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_sign_table(m: usize, rng: &mut ChaCha8Rng) -> SignTable {
    assert!(m <= MAX_PARTIES);
    let values = (0..1usize << m).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
    SignTable::new(m, values).unwrap()
}

pub fn random_settings(n: usize, rng: &mut ChaCha8Rng) -> Vec<ObserverSettings> {
    (0..n)
        .map(|_| {
            ObserverSettings::from_angles([
                rng.gen_range(0.0..std::f64::consts::PI),
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(0.0..std::f64::consts::PI),
                rng.gen_range(0.0..std::f64::consts::TAU),
            ])
        })
        .collect()
}
