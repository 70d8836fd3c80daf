//! Sign functions, correlation-term expansions, and dense Bell operators.
//!
//! Indexing conventions, fixed crate-wide:
//!
//! * A [`SignTable`] over `M` parties is indexed by an `M`-bit integer whose
//!   bit `j` (least significant first) encodes `s_{j+1} = 1 − 2·bit`.
//! * A [`TermKey`] entry is `0` (identity, party not measured), `1` (`A_j`)
//!   or `2` (`A'_j`).

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, SQRT_2};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{BellError, Result};
use crate::linalg::{kron, ComplexMatrix, HermitianMatrix, MAX_DIM};
use crate::observables::ObserverSettings;

/// Largest party count for sign tables and term maps (`2^12 = 4096`).
pub const MAX_PARTIES: usize = 12;

/// Coefficients at or below this magnitude are dropped from a [`TermMap`].
pub const PRUNE_TOL: f64 = 1e-12;

fn check_parties(what: &'static str, m: usize) -> Result<()> {
    if m == 0 {
        return Err(BellError::validation(format!("{what} must be at least 1")));
    }
    if m > MAX_PARTIES {
        return Err(BellError::capacity(what, m, MAX_PARTIES));
    }
    Ok(())
}

/// A function `S(s_1, …, s_M) ∈ {±1}` tabulated over all `2^M` sign vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignTable {
    num_parties: usize,
    values: Vec<i8>,
}

impl SignTable {
    pub fn new(num_parties: usize, values: Vec<i8>) -> Result<Self> {
        check_parties("sign-table party count", num_parties)?;
        if values.len() != 1 << num_parties {
            return Err(BellError::validation(format!(
                "sign table over {num_parties} parties needs {} entries, got {}",
                1usize << num_parties,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| v.abs() != 1) {
            return Err(BellError::validation(format!(
                "sign table entries must be +1 or -1, found {bad}"
            )));
        }
        Ok(Self {
            num_parties,
            values,
        })
    }

    /// Parses `2^M` whitespace-separated `±1` entries; `M` is inferred from the count.
    pub fn parse(text: &str) -> Result<Self> {
        let values = text
            .split_whitespace()
            .map(|tok| match tok {
                "1" | "+1" => Ok(1),
                "-1" => Ok(-1),
                other => Err(BellError::validation(format!(
                    "sign table entry {other:?} is not +1 or -1"
                ))),
            })
            .collect::<Result<Vec<i8>>>()?;
        let len = values.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(BellError::validation(format!(
                "sign table must have 2^M entries with M >= 1, got {len}"
            )));
        }
        Self::new(len.trailing_zeros() as usize, values)
    }

    pub fn num_parties(&self) -> usize {
        self.num_parties
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    /// `S` at a sign vector given as an index.
    pub fn at_index(&self, index: usize) -> i8 {
        self.values[index]
    }

    /// `S(s)` for an explicit sign vector.
    pub fn at(&self, signs: &[i8]) -> i8 {
        assert_eq!(signs.len(), self.num_parties);
        self.values[sign_index(signs)]
    }
}

/// Index of a sign vector: bit `j` is set when `s_{j+1} = −1`.
pub fn sign_index(signs: &[i8]) -> usize {
    signs
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &s)| acc | (usize::from(s < 0) << j))
}

/// Sign vector encoded by `index` over `m` parties.
pub fn signs_of_index(index: usize, m: usize) -> Vec<i8> {
    (0..m).map(|j| 1 - 2 * ((index >> j) & 1) as i8).collect()
}

/// The MABK sign function `S(s) = √2 cos[(Σs − m + 1)π/4]`.
pub fn mabk_sign_table(m: usize) -> Result<SignTable> {
    check_parties("MABK party count", m)?;
    let values = (0..1usize << m)
        .map(|idx| {
            let sum: i64 = signs_of_index(idx, m).iter().map(|&s| i64::from(s)).sum();
            let raw = SQRT_2 * ((sum - m as i64 + 1) as f64 * FRAC_PI_4).cos();
            let rounded: i8 = if raw >= 0.0 { 1 } else { -1 };
            assert!(
                (raw - f64::from(rounded)).abs() <= 1e-9,
                "MABK sign function not ±1 at index {idx}: {raw}"
            );
            rounded
        })
        .collect();
    SignTable::new(m, values)
}

/// Closed-form MABK correlation coefficients `c_0 … c_M`.
#[derive(Clone, Debug, PartialEq)]
pub struct MabkCoefficients {
    pub num_parties: usize,
    pub c: Vec<f64>,
}

impl MabkCoefficients {
    /// Coefficient of a correlation term with `primed` primed observables.
    pub fn for_primed_count(&self, primed: usize) -> f64 {
        self.c[primed]
    }
}

/// `c_m = 2^{(1−M)/2} cos[(2m − M + 1)π/4]` for `m = 0 … M`.
pub fn mabk_coefficients(num_parties: usize) -> Result<MabkCoefficients> {
    check_parties("MABK party count", num_parties)?;
    let big_m = num_parties as f64;
    let norm = 2f64.powf((1.0 - big_m) / 2.0);
    let c = (0..=num_parties)
        .map(|m| norm * ((2.0 * m as f64 - big_m + 1.0) * FRAC_PI_4).cos())
        .collect();
    Ok(MabkCoefficients { num_parties, c })
}

/// Measurement choices of every party for one correlation term.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermKey(Vec<u8>);

impl TermKey {
    pub fn new(choices: Vec<u8>) -> Result<Self> {
        if let Some(bad) = choices.iter().find(|&&c| c > 2) {
            return Err(BellError::validation(format!(
                "term key entries must be 0, 1 or 2, found {bad}"
            )));
        }
        Ok(Self(choices))
    }

    pub fn choices(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of parties measuring `A'`.
    pub fn primed_count(&self) -> usize {
        self.0.iter().filter(|&&c| c == 2).count()
    }
}

impl fmt::Debug for TermKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A Bell operator as a sparse real combination of correlation terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "TermMapJson", try_from = "TermMapJson")]
pub struct TermMap {
    num_parties: usize,
    terms: BTreeMap<TermKey, f64>,
}

impl TermMap {
    /// Builds a term map, merging duplicate keys and pruning near-zero coefficients.
    pub fn new(num_parties: usize, terms: impl IntoIterator<Item = (TermKey, f64)>) -> Result<Self> {
        check_parties("term-map party count", num_parties)?;
        let mut map = BTreeMap::new();
        for (key, c) in terms {
            if key.len() != num_parties {
                return Err(BellError::validation(format!(
                    "term key {key:?} has length {}, expected {num_parties}",
                    key.len()
                )));
            }
            if !c.is_finite() {
                return Err(BellError::validation(format!(
                    "coefficient of {key:?} is not finite"
                )));
            }
            *map.entry(key).or_insert(0.0) += c;
        }
        map.retain(|_, c: &mut f64| c.abs() > PRUNE_TOL);
        Ok(Self {
            num_parties,
            terms: map,
        })
    }

    pub fn num_parties(&self) -> usize {
        self.num_parties
    }

    pub fn get(&self, key: &[u8]) -> Option<f64> {
        self.terms.get(&TermKey(key.to_vec())).copied()
    }

    /// Terms in lexicographic key order.
    pub fn iter(&self) -> impl Iterator<Item = (&TermKey, f64)> + '_ {
        self.terms.iter().map(|(k, &c)| (k, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Multiplies every coefficient by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.num_parties,
            self.terms.iter().map(|(k, &c)| (k.clone(), c * factor)),
        )
    }
}

/// Number of stored terms.
pub fn term_count(terms: &TermMap) -> usize {
    terms.len()
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    key: Vec<u8>,
    coeff: f64,
}

#[derive(Serialize, Deserialize)]
struct TermMapJson {
    n: usize,
    terms: Vec<TermJson>,
}

impl From<TermMap> for TermMapJson {
    fn from(t: TermMap) -> Self {
        TermMapJson {
            n: t.num_parties,
            terms: t
                .terms
                .into_iter()
                .map(|(k, coeff)| TermJson { key: k.0, coeff })
                .collect(),
        }
    }
}

impl TryFrom<TermMapJson> for TermMap {
    type Error = BellError;

    fn try_from(j: TermMapJson) -> Result<Self> {
        let terms = j
            .terms
            .into_iter()
            .map(|t| Ok((TermKey::new(t.key)?, t.coeff)))
            .collect::<Result<Vec<_>>>()?;
        TermMap::new(j.n, terms)
    }
}

/// Expands the WWZB operator of a sign table into full-correlation terms.
///
/// The coefficient of the key whose primed parties form the set `P` is
/// `2^{−M} Σ_s S(s) Π_{j∈P} s_j`, i.e. a normalized Walsh–Hadamard transform
/// of the table. The transform runs in exact integer arithmetic, so every
/// coefficient is an exact dyadic rational.
pub fn wwzb_terms(sign_table: &SignTable) -> TermMap {
    let m = sign_table.num_parties;
    let mut spectrum: Vec<i64> = sign_table.values.iter().map(|&v| i64::from(v)).collect();
    let mut half = 1;
    while half < spectrum.len() {
        for block in spectrum.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half *= 2;
    }
    let norm = (1u64 << m) as f64;
    let terms = spectrum.iter().enumerate().filter(|(_, &h)| h != 0).map(|(mask, &h)| {
        let key = (0..m).map(|j| if (mask >> j) & 1 == 1 { 2 } else { 1 }).collect();
        (TermKey(key), h as f64 / norm)
    });
    TermMap::new(m, terms).expect("valid sign table yields a valid term map")
}

/// Appends an `N`-th party: `B_{N−1} ⊗ ½(A_N + A'_N) + 1 ⊗ ½(A_N − A'_N)`.
pub fn extended_terms(inner: &TermMap) -> Result<TermMap> {
    let m = inner.num_parties;
    if m < 2 {
        return Err(BellError::validation(format!(
            "extension needs an inner operator on at least 2 parties, got {m}"
        )));
    }
    check_parties("extended party count", m + 1)?;
    let mut terms = Vec::with_capacity(2 * inner.len() + 2);
    for (key, c) in inner.iter() {
        for last in [1u8, 2] {
            let mut k = key.0.clone();
            k.push(last);
            terms.push((TermKey(k), c / 2.0));
        }
    }
    let mut local = vec![0u8; m + 1];
    local[m] = 1;
    terms.push((TermKey(local.clone()), 0.5));
    local[m] = 2;
    terms.push((TermKey(local), -0.5));
    TermMap::new(m + 1, terms)
}

/// The extended operator built on the MABK polynomial of `n − 1` parties.
pub fn extended_mabk_terms(n: usize) -> Result<TermMap> {
    if n < 3 {
        return Err(BellError::validation(format!(
            "extended MABK operator needs n >= 3, got {n}"
        )));
    }
    check_parties("qubit count", n)?;
    extended_terms(&wwzb_terms(&mabk_sign_table(n - 1)?))
}

/// Dense matrix `Σ_k c_k ⊗_j M_j(k_j)` with `M_j(0) = I`, `M_j(1) = A_j`, `M_j(2) = A'_j`.
///
/// Party 1 is the leftmost tensor factor (most significant basis bit).
pub fn build_operator_matrix(terms: &TermMap, settings: &[ObserverSettings]) -> Result<HermitianMatrix> {
    let n = terms.num_parties;
    if settings.len() != n {
        return Err(BellError::validation(format!(
            "operator on {n} parties needs {n} observer settings, got {}",
            settings.len()
        )));
    }
    let dim = 1usize.checked_shl(n as u32).unwrap_or(usize::MAX);
    if dim > MAX_DIM {
        return Err(BellError::capacity("operator dimension", dim, MAX_DIM));
    }
    let locals: Vec<[ComplexMatrix; 3]> = settings
        .iter()
        .map(|s| {
            [
                ComplexMatrix::identity(2),
                s.setting_1.matrix(),
                s.setting_2.matrix(),
            ]
        })
        .collect();
    let entries: Vec<(&[u8], f64)> = terms.iter().map(|(k, c)| (k.choices(), c)).collect();
    let m = build_recursive(&entries, 0, &locals)?.unwrap_or_else(|| ComplexMatrix::zeros(dim, dim));
    HermitianMatrix::new(m)
}

// Groups terms by the choice of party `depth` and recurses on the rest:
// B = Σ_x M_depth(x) ⊗ B_x.
fn build_recursive(
    entries: &[(&[u8], f64)],
    depth: usize,
    locals: &[[ComplexMatrix; 3]],
) -> Result<Option<ComplexMatrix>> {
    if entries.is_empty() {
        return Ok(None);
    }
    if depth == locals.len() {
        let total: f64 = entries.iter().map(|(_, c)| c).sum();
        return Ok(Some(ComplexMatrix::from_real_diagonal(&[total])));
    }
    let mut acc: Option<ComplexMatrix> = None;
    for choice in 0..3u8 {
        let group: Vec<(&[u8], f64)> = entries
            .iter()
            .filter(|(k, _)| k[depth] == choice)
            .copied()
            .collect();
        if let Some(rest) = build_recursive(&group, depth + 1, locals)? {
            let block = kron(&locals[depth][choice as usize], &rest)?;
            match acc.as_mut() {
                Some(a) => a.add_scaled(Complex64::new(1.0, 0.0), &block)?,
                None => acc = Some(block),
            }
        }
    }
    Ok(acc)
}
