//! Local-realism bounds by exhaustive enumeration of deterministic strategies.
//!
//! A local hidden-variable value is affine in the distribution over hidden
//! variables, so its extremes over all models sit at deterministic
//! assignments of `±1` to every `A_j` and `A'_j`. There are `4^N` of them.
//!
//! Enumeration walks the strategies depth-first, contracting one party at a
//! time out of a dense `3^N` coefficient tensor. Strategy indices are
//! base-4 numbers with party 1 as the most significant digit, so the walk
//! visits them in increasing index order. Ties are broken toward the lowest
//! index.

use rayon::prelude::*;
use serde::Serialize;

use crate::bell::TermMap;
use crate::error::{BellError, Result};

/// Party count up to which a single enumeration is run.
pub const EXHAUSTIVE_MAX_PARTIES: usize = 8;

/// Party count up to which sharded enumeration is supported.
pub const SHARDED_MAX_PARTIES: usize = 12;

/// Slack allowed above 1 when deciding whether the bound holds.
pub const BOUND_TOL: f64 = 1e-9;

/// Predetermined outcomes `(A_j, A'_j)` for every party.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeterministicStrategy {
    assignments: Vec<(i8, i8)>,
}

impl DeterministicStrategy {
    pub fn new(assignments: Vec<(i8, i8)>) -> Result<Self> {
        if assignments.iter().any(|&(a, b)| a.abs() != 1 || b.abs() != 1) {
            return Err(BellError::validation("strategy values must be +1 or -1"));
        }
        Ok(Self { assignments })
    }

    /// Strategy number `index` over `n` parties (party 1 is the most significant base-4 digit;
    /// within a digit, bit 0 flips `A` and bit 1 flips `A'`).
    pub fn from_index(index: u64, n: usize) -> Self {
        let assignments = (0..n)
            .map(|j| {
                let digit = (index >> (2 * (n - 1 - j))) & 3;
                (1 - 2 * (digit & 1) as i8, 1 - 2 * ((digit >> 1) & 1) as i8)
            })
            .collect();
        Self { assignments }
    }

    pub fn index(&self) -> u64 {
        self.assignments.iter().fold(0, |acc, &(a, b)| {
            (acc << 2) | u64::from(a < 0) | (u64::from(b < 0) << 1)
        })
    }

    pub fn assignments(&self) -> &[(i8, i8)] {
        &self.assignments
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Every value negated.
    pub fn flipped(&self) -> Self {
        Self {
            assignments: self.assignments.iter().map(|&(a, b)| (-a, -b)).collect(),
        }
    }

    fn value(&self, party: usize, choice: u8) -> f64 {
        let (a, b) = self.assignments[party];
        match choice {
            0 => 1.0,
            1 => f64::from(a),
            _ => f64::from(b),
        }
    }
}

/// `Σ_k c_k Π_j v_j(k_j)` for one deterministic strategy.
pub fn lhv_value(terms: &TermMap, strategy: &DeterministicStrategy) -> Result<f64> {
    if strategy.len() != terms.num_parties() {
        return Err(BellError::validation(format!(
            "strategy covers {} parties, operator has {}",
            strategy.len(),
            terms.num_parties()
        )));
    }
    Ok(terms
        .iter()
        .map(|(k, c)| {
            k.choices()
                .iter()
                .enumerate()
                .fold(c, |acc, (j, &choice)| acc * strategy.value(j, choice))
        })
        .sum())
}

/// Outcome of an exhaustive bound check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    /// `max |⟨B⟩_LHV|` over deterministic strategies.
    pub max_value: f64,
    /// Lowest-index strategy attaining `max_value`.
    pub witness: DeterministicStrategy,
    /// `max_value ≤ 1 + 1e−9`.
    pub holds: bool,
    /// Number of independently evaluated shards.
    pub shards: usize,
}

/// `max |⟨B⟩_LHV|` over all `4^N` deterministic strategies, `N ≤ 8`.
pub fn lhv_max(terms: &TermMap) -> Result<f64> {
    Ok(verify_bound(terms)?.max_value)
}

/// Exhaustive check of `|⟨B⟩_LHV| ≤ 1` for `N ≤ 8`.
pub fn verify_bound(terms: &TermMap) -> Result<BoundReport> {
    let n = terms.num_parties();
    if n > EXHAUSTIVE_MAX_PARTIES {
        return Err(BellError::Capacity {
            what: "party count for single-shard enumeration",
            requested: n,
            limit: EXHAUSTIVE_MAX_PARTIES,
            hint: "; use the sharded enumeration (verify_bound_sharded, or `lhv-bound --sharded`) for up to 12 parties",
        });
    }
    Ok(run_shards(terms, 0))
}

/// Exhaustive check for `N ≤ 12`, splitting the strategy space into
/// `4^{max(N−8, 0)}` shards that run in parallel.
///
/// The result is bit-identical to [`verify_bound`] whenever both apply.
pub fn verify_bound_sharded(terms: &TermMap) -> Result<BoundReport> {
    let n = terms.num_parties();
    if n > SHARDED_MAX_PARTIES {
        return Err(BellError::capacity(
            "party count for sharded enumeration",
            n,
            SHARDED_MAX_PARTIES,
        ));
    }
    Ok(run_shards(terms, n.saturating_sub(EXHAUSTIVE_MAX_PARTIES)))
}

/// Like [`verify_bound_sharded`] with an explicit number of leading parties
/// fixed per shard (`4^fixed` shards).
pub fn verify_bound_with_shards(terms: &TermMap, fixed_parties: usize) -> Result<BoundReport> {
    let n = terms.num_parties();
    if n > SHARDED_MAX_PARTIES {
        return Err(BellError::capacity(
            "party count for sharded enumeration",
            n,
            SHARDED_MAX_PARTIES,
        ));
    }
    if fixed_parties > n {
        return Err(BellError::validation(format!(
            "cannot fix {fixed_parties} of {n} parties per shard"
        )));
    }
    Ok(run_shards(terms, fixed_parties))
}

#[derive(Clone, Copy, Debug)]
struct Best {
    abs: f64,
    index: u64,
}

impl Best {
    const NONE: Best = Best {
        abs: -1.0,
        index: u64::MAX,
    };

    fn better(self, other: Best) -> Best {
        if other.abs > self.abs || (other.abs == self.abs && other.index < self.index) {
            other
        } else {
            self
        }
    }
}

fn run_shards(terms: &TermMap, fixed: usize) -> BoundReport {
    let n = terms.num_parties();
    let root = dense_coefficients(terms);
    let shards = 1usize << (2 * fixed);
    let best = (0..shards as u64)
        .into_par_iter()
        .map(|shard| {
            // Contract the fixed parties in the same order as the plain walk.
            let mut tensor = root.clone();
            for depth in 0..fixed {
                let digit = (shard >> (2 * (fixed - 1 - depth))) & 3;
                tensor = contract_front(&tensor, digit);
            }
            let mut walker = Walker::new(n - fixed);
            walker.walk(&tensor, 0, shard);
            walker.best
        })
        .reduce(|| Best::NONE, Best::better);
    BoundReport {
        max_value: best.abs,
        witness: DeterministicStrategy::from_index(best.index, n),
        holds: best.abs <= 1.0 + BOUND_TOL,
        shards,
    }
}

// Coefficients laid out with party 1 as the most significant base-3 digit.
fn dense_coefficients(terms: &TermMap) -> Vec<f64> {
    let n = terms.num_parties();
    let mut dense = vec![0.0; 3usize.pow(n as u32)];
    for (k, c) in terms.iter() {
        let idx = k.choices().iter().fold(0usize, |acc, &x| acc * 3 + x as usize);
        dense[idx] += c;
    }
    dense
}

fn digit_values(digit: u64) -> (f64, f64) {
    (
        if digit & 1 == 0 { 1.0 } else { -1.0 },
        if digit & 2 == 0 { 1.0 } else { -1.0 },
    )
}

fn contract_front(tensor: &[f64], digit: u64) -> Vec<f64> {
    let stride = tensor.len() / 3;
    let mut out = vec![0.0; stride];
    contract_into(tensor, digit, &mut out);
    out
}

#[inline]
fn contract_into(tensor: &[f64], digit: u64, out: &mut [f64]) {
    let stride = out.len();
    let (a, b) = digit_values(digit);
    let (id, rest) = tensor.split_at(stride);
    let (ta, tb) = rest.split_at(stride);
    for (((o, &x), &y), &z) in out.iter_mut().zip(id).zip(ta).zip(tb) {
        *o = x + a * y + b * z;
    }
}

struct Walker {
    buffers: Vec<Vec<f64>>,
    best: Best,
}

impl Walker {
    fn new(levels: usize) -> Self {
        let buffers = (0..levels)
            .map(|d| vec![0.0; 3usize.pow((levels - 1 - d) as u32)])
            .collect();
        Self {
            buffers,
            best: Best::NONE,
        }
    }

    fn walk(&mut self, tensor: &[f64], depth: usize, prefix: u64) {
        if depth == self.buffers.len() {
            let value = tensor[0];
            self.best = self.best.better(Best {
                abs: value.abs(),
                index: prefix,
            });
            return;
        }
        for digit in 0..4u64 {
            let mut buf = std::mem::take(&mut self.buffers[depth]);
            contract_into(tensor, digit, &mut buf);
            self.walk(&buf, depth + 1, (prefix << 2) | digit);
            self.buffers[depth] = buf;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::{extended_mabk_terms, extended_terms, mabk_sign_table, wwzb_terms, SignTable, TermKey};
    use approx::assert_abs_diff_eq;

    fn chsh() -> TermMap {
        wwzb_terms(&mabk_sign_table(2).unwrap())
    }

    fn strategy(v: &[(i8, i8)]) -> DeterministicStrategy {
        DeterministicStrategy::new(v.to_vec()).unwrap()
    }

    #[test]
    fn value_examples() {
        let t = chsh();
        assert_abs_diff_eq!(lhv_value(&t, &strategy(&[(1, 1), (1, 1)])).unwrap(), 1.0);
        assert_abs_diff_eq!(lhv_value(&t, &strategy(&[(1, 1), (1, -1)])).unwrap(), 1.0);
        assert_abs_diff_eq!(lhv_value(&t, &strategy(&[(-1, -1), (-1, -1)])).unwrap(), 1.0);
        assert!(lhv_value(&t, &strategy(&[(1, 1)])).is_err());
        assert!(DeterministicStrategy::new(vec![(0, 1)]).is_err());
    }

    #[test]
    fn index_round_trip() {
        for n in 1..=4 {
            for idx in 0..1u64 << (2 * n) {
                assert_eq!(DeterministicStrategy::from_index(idx, n).index(), idx);
            }
        }
    }

    // Plain loop over every strategy with direct term evaluation.
    fn brute_max(t: &TermMap) -> f64 {
        let n = t.num_parties();
        (0..1u64 << (2 * n))
            .map(|i| lhv_value(t, &DeterministicStrategy::from_index(i, n)).unwrap().abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn bound_examples() {
        assert_eq!(lhv_max(&chsh()).unwrap(), 1.0);
        let r3 = verify_bound(&extended_mabk_terms(3).unwrap()).unwrap();
        assert!(r3.holds);
        assert_abs_diff_eq!(r3.max_value, 1.0, epsilon = 1e-12);
        let r5 = verify_bound(&extended_mabk_terms(5).unwrap()).unwrap();
        assert!(r5.holds);
        assert_abs_diff_eq!(r5.max_value, 1.0, epsilon = 1e-12);

        let doubled = extended_mabk_terms(3).unwrap().scaled(2.0).unwrap();
        let r = verify_bound(&doubled).unwrap();
        assert!(!r.holds);
        assert_abs_diff_eq!(r.max_value, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn walk_agrees_with_brute_force() {
        let single = TermMap::new(3, [(TermKey::new(vec![2, 0, 1]).unwrap(), 0.7)]).unwrap();
        for t in [chsh(), extended_mabk_terms(3).unwrap(), extended_mabk_terms(4).unwrap(), single] {
            let r = verify_bound(&t).unwrap();
            assert_abs_diff_eq!(r.max_value, brute_max(&t), epsilon = 1e-12);
            assert_abs_diff_eq!(lhv_value(&t, &r.witness).unwrap().abs(), r.max_value, epsilon = 1e-12);
        }
    }

    #[test]
    fn witness_is_lowest_index() {
        let t = chsh();
        let r = verify_bound(&t).unwrap();
        let first = (0..16u64)
            .find(|&i| (lhv_value(&t, &DeterministicStrategy::from_index(i, 2)).unwrap().abs() - r.max_value).abs() < 1e-12)
            .unwrap();
        assert_eq!(r.witness.index(), first);
    }

    #[test]
    fn sharding_is_bit_identical() {
        let t = extended_terms(&wwzb_terms(&SignTable::new(4, vec![1, -1, -1, 1, 1, 1, -1, 1, -1, 1, 1, 1, 1, -1, 1, -1]).unwrap())).unwrap();
        let plain = verify_bound(&t).unwrap();
        for fixed in 0..=5 {
            let sharded = verify_bound_with_shards(&t, fixed).unwrap();
            assert_eq!(sharded.max_value.to_bits(), plain.max_value.to_bits());
            assert_eq!(sharded.witness, plain.witness);
            assert_eq!(sharded.shards, 1 << (2 * fixed));
        }
    }

    #[test]
    fn capacity_limits() {
        let t9 = extended_mabk_terms(9).unwrap();
        let err = verify_bound(&t9).unwrap_err();
        assert!(err.is_capacity());
        assert!(err.to_string().contains("sharded"));
        assert!(verify_bound_with_shards(&extended_mabk_terms(3).unwrap(), 4).is_err());
    }
}
