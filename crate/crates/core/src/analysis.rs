//! Quantum values, maximal violations, closed forms for generalized GHZ
//! states, visibility thresholds, and measurement-setting optimization.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bell::{build_operator_matrix, TermMap};
use crate::error::{BellError, Result};
use crate::linalg::trace_product;
use crate::observables::{Observable, ObserverSettings};
use crate::optimize::nelder_mead;
use crate::states::{QuantumState, StateVector};

/// `Tr(ρ B)` for the operator built from `terms` at `settings`.
pub fn quantum_value(state: &QuantumState, terms: &TermMap, settings: &[ObserverSettings]) -> Result<f64> {
    check_qubits(state.num_qubits(), terms)?;
    let b = build_operator_matrix(terms, settings)?;
    match state {
        QuantumState::Pure(psi) => Ok(b.expectation(psi.amplitudes())),
        QuantumState::Mixed(rho) => trace_product(rho.matrix(), &b),
    }
}

fn check_qubits(n: usize, terms: &TermMap) -> Result<()> {
    if n != terms.num_parties() {
        return Err(BellError::validation(format!(
            "state has {n} qubits, operator acts on {} parties",
            terms.num_parties()
        )));
    }
    Ok(())
}

/// `⟨ψ|B|ψ⟩` evaluated term by term on the state vector, without forming `B`.
///
/// Terms sharing a key prefix share the partially transformed vector.
pub fn pure_expectation(psi: &StateVector, terms: &TermMap, settings: &[ObserverSettings]) -> Result<f64> {
    let n = terms.num_parties();
    check_qubits(psi.num_qubits(), terms)?;
    if settings.len() != n {
        return Err(BellError::validation(format!(
            "operator on {n} parties needs {n} observer settings, got {}",
            settings.len()
        )));
    }
    let locals: Vec<[[Complex64; 4]; 2]> = settings
        .iter()
        .map(|s| [entries_2x2(&s.setting_1), entries_2x2(&s.setting_2)])
        .collect();
    let entries: Vec<(&[u8], f64)> = terms.iter().map(|(k, c)| (k.choices(), c)).collect();
    Ok(accumulate(&entries, 0, psi.amplitudes(), psi.amplitudes(), &locals))
}

fn entries_2x2(o: &Observable) -> [Complex64; 4] {
    let m = o.matrix();
    [m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1)]
}

fn accumulate(
    entries: &[(&[u8], f64)],
    depth: usize,
    vec: &[Complex64],
    psi: &[Complex64],
    locals: &[[[Complex64; 4]; 2]],
) -> f64 {
    let n = locals.len();
    if depth == n {
        let c: f64 = entries.iter().map(|(_, c)| c).sum();
        let overlap: f64 = psi.iter().zip(vec).map(|(a, b)| (a.conj() * b).re).sum();
        return c * overlap;
    }
    let mut total = 0.0;
    for choice in 0..3u8 {
        let group: Vec<(&[u8], f64)> = entries.iter().filter(|(k, _)| k[depth] == choice).copied().collect();
        if group.is_empty() {
            continue;
        }
        total += if choice == 0 {
            accumulate(&group, depth + 1, vec, psi, locals)
        } else {
            let applied = apply_single_qubit(vec, n - 1 - depth, &locals[depth][choice as usize - 1]);
            accumulate(&group, depth + 1, &applied, psi, locals)
        };
    }
    total
}

fn apply_single_qubit(vec: &[Complex64], bit: usize, m: &[Complex64; 4]) -> Vec<Complex64> {
    let mut out = vec.to_vec();
    let mask = 1usize << bit;
    for i0 in 0..vec.len() {
        if i0 & mask != 0 {
            continue;
        }
        let i1 = i0 | mask;
        let (a, b) = (vec[i0], vec[i1]);
        out[i0] = m[0] * a + m[1] * b;
        out[i1] = m[2] * a + m[3] * b;
    }
    out
}

/// `max |λ|` of the operator built from `terms` at `settings`.
pub fn max_violation(terms: &TermMap, settings: &[ObserverSettings]) -> Result<f64> {
    Ok(build_operator_matrix(terms, settings)?.max_abs_eigenvalue())
}

/// Full correlation `⟨⊗_j a_j·σ⟩` on `cos α|0…0⟩ + sin α|1…1⟩`:
///
/// `[cos²α + (−1)^n sin²α] Π cosθ_i + sin 2α Π sinθ_i cos(Σ φ_j)`.
pub fn ghz_correlation_closed(n: usize, alpha: f64, observables: &[Observable]) -> Result<f64> {
    if n < 2 || observables.len() != n {
        return Err(BellError::validation(format!(
            "need n >= 2 and one observable per qubit (n = {n}, got {})",
            observables.len()
        )));
    }
    let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
    let z_part: f64 = observables.iter().map(|o| o.theta.cos()).product();
    let xy_part: f64 = observables.iter().map(|o| o.theta.sin()).product();
    let phase: f64 = observables.iter().map(|o| o.phi).sum();
    let (s, c) = alpha.sin_cos();
    Ok((c * c + parity * s * s) * z_part + (2.0 * alpha).sin() * xy_part * phase.cos())
}

/// Polar angle of the last party that maximizes the generalized-GHZ value:
/// `atan(2^{(n−2)/2} tan 2α)`, plus `π` when `α > π/4`; `π/2` at `α = π/4`.
pub fn optimal_theta_n(n: usize, alpha: f64) -> Result<f64> {
    if n < 3 {
        return Err(BellError::validation(format!("need n >= 3, got {n}")));
    }
    if !(0.0..=FRAC_PI_2).contains(&alpha) {
        return Err(BellError::validation(format!(
            "alpha must lie in [0, pi/2], got {alpha}"
        )));
    }
    if alpha == FRAC_PI_4 {
        return Ok(FRAC_PI_2);
    }
    let base = (2f64.powf((n as f64 - 2.0) / 2.0) * (2.0 * alpha).tan()).atan();
    Ok(if alpha < FRAC_PI_4 { base } else { base + PI })
}

/// Settings under which generalized GHZ states reach the closed-form value:
/// parties `1 … n−1` measure `σ_x` and `σ_y`; party `n` measures at azimuth
/// `(2 − n)π/4` with polar angles `θ_n` and `π − θ_n`.
pub fn canonical_gghz_settings(n: usize, alpha: f64) -> Result<Vec<ObserverSettings>> {
    let theta = optimal_theta_n(n, alpha)?;
    Ok(settings_with_theta_n(n, theta))
}

/// Canonical settings with a free polar angle for the last party.
pub fn settings_with_theta_n(n: usize, theta_n: f64) -> Vec<ObserverSettings> {
    let phi_n = (2.0 - n as f64) * FRAC_PI_4;
    let mut s = vec![ObserverSettings::new(Observable::x(), Observable::y()); n - 1];
    s.push(ObserverSettings::new(
        Observable::new(theta_n, phi_n),
        Observable::new(PI - theta_n, phi_n),
    ));
    s
}

/// `⟨B⟩ = 2^{(n−2)/2} sin 2α sin θ_n + cos 2α cos θ_n` at canonical settings.
pub fn gghz_value_at_theta(n: usize, alpha: f64, theta_n: f64) -> f64 {
    2f64.powf((n as f64 - 2.0) / 2.0) * (2.0 * alpha).sin() * theta_n.sin() + (2.0 * alpha).cos() * theta_n.cos()
}

/// `(2^{n−2} sin² 2α + cos² 2α)^{1/2}`.
pub fn gghz_violation_closed(n: usize, alpha: f64) -> f64 {
    let (s, c) = (2.0 * alpha).sin_cos();
    (2f64.powi(n as i32 - 2) * s * s + c * c).sqrt()
}

/// White-noise visibility above which GHZ states violate the extended inequality: `2^{(2−n)/2}`.
pub fn threshold_visibility(n: usize) -> f64 {
    2f64.powf((2.0 - n as f64) / 2.0)
}

/// The corresponding threshold for the MABK inequality itself: `2^{(1−n)/2}`.
pub fn mabk_threshold_visibility(n: usize) -> f64 {
    2f64.powf((1.0 - n as f64) / 2.0)
}

/// Finds the visibility `v` at which `Tr(ρ_v B) = 1` for `ρ_v` the noisy GHZ
/// state, by bisection on `[0, 1]` to width `tol`.
pub fn visibility_crossing(n: usize, terms: &TermMap, settings: &[ObserverSettings], tol: f64) -> Result<f64> {
    check_qubits(n, terms)?;
    let b = build_operator_matrix(terms, settings)?;
    let value = |v: f64| -> Result<f64> { trace_product(crate::states::noisy_ghz(n, v)?.matrix(), &b) };
    if value(1.0)? <= 1.0 {
        return Err(BellError::validation("GHZ state does not violate at these settings"));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if value(mid)? > 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Multi-start search parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizerConfig {
    pub starts: usize,
    /// Simplex iterations allowed per start, shared across its restarts.
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            starts: 32,
            max_iterations: 2000,
            tolerance: 1e-8,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 || self.max_iterations == 0 {
            return Err(BellError::validation("starts and max_iterations must be positive"));
        }
        if !(self.tolerance > 0.0) {
            return Err(BellError::validation(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// Best settings found by [`optimize_settings`].
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizedSettings {
    pub settings: Vec<ObserverSettings>,
    /// `quantum_value` at `settings`.
    pub value: f64,
    /// Index of the start that produced `settings`.
    pub start: usize,
}

/// Edge of the first simplex around each random start, in radians.
const INITIAL_STEP: f64 = 0.6;

/// Maximizes `⟨B⟩` over all `4n` Bloch angles with seeded multi-start
/// Nelder–Mead.
///
/// Start `i` draws its initial point from a ChaCha stream `i` keyed by
/// `config.seed`. When a simplex collapses, it is rebuilt around its best
/// vertex with a smaller edge until the gain falls below the tolerance or
/// the per-start iteration budget runs out. Starts run in parallel; the
/// result is the best value, lowest start index first on ties, and does not
/// depend on scheduling.
pub fn optimize_settings(state: &QuantumState, terms: &TermMap, config: &OptimizerConfig) -> Result<OptimizedSettings> {
    config.validate()?;
    let n = terms.num_parties();
    check_qubits(state.num_qubits(), terms)?;

    let objective = |x: &[f64]| -> f64 {
        let settings = settings_from_flat(x);
        let v = match state {
            QuantumState::Pure(psi) => pure_expectation(psi, terms, &settings),
            QuantumState::Mixed(_) => quantum_value(state, terms, &settings),
        };
        -v.expect("dimensions checked up front")
    };

    let runs: Vec<(f64, Vec<f64>)> = (0..config.starts)
        .into_par_iter()
        .map(|start| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(start as u64);
            let x0: Vec<f64> = (0..4 * n)
                .map(|i| {
                    if i % 2 == 0 {
                        rng.gen_range(0.0..PI)
                    } else {
                        rng.gen_range(0.0..2.0 * PI)
                    }
                })
                .collect();
            local_search(&objective, x0, config)
        })
        .collect();

    let (start, (_, x)) = runs
        .into_iter()
        .enumerate()
        .reduce(|best, cand| if cand.1 .0 < best.1 .0 { cand } else { best })
        .expect("at least one start");
    let settings = settings_from_flat(&x);
    let value = quantum_value(state, terms, &settings)?;
    Ok(OptimizedSettings { settings, value, start })
}

fn local_search(objective: &impl Fn(&[f64]) -> f64, x0: Vec<f64>, config: &OptimizerConfig) -> (f64, Vec<f64>) {
    let mut budget = config.max_iterations;
    let mut step = INITIAL_STEP;
    let mut x = x0;
    let mut best = f64::INFINITY;
    while budget > 0 {
        let m = nelder_mead(objective, &x, step, budget, config.tolerance * 1e-3);
        budget = budget.saturating_sub(m.iterations.max(1));
        let gain = best - m.value;
        if m.value < best {
            best = m.value;
            x = m.x;
        }
        if gain.is_finite() && gain <= config.tolerance {
            break;
        }
        step = (step * 0.5).max(1e-3);
    }
    (best, x)
}

/// Settings from angles laid out as `[θ₁, φ₁, θ'₁, φ'₁, θ₂, …]`.
pub fn settings_from_flat(x: &[f64]) -> Vec<ObserverSettings> {
    x.chunks_exact(4)
        .map(|c| ObserverSettings::from_angles([c[0], c[1], c[2], c[3]]))
        .collect()
}

/// How the settings of a report were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Eigen,
    Optimized,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::Eigen => "eigen",
            Method::Optimized => "optimized",
        }
    }
}

/// A quantum value against the local-realism bound.
#[derive(Clone, Debug, PartialEq)]
pub struct ViolationReport {
    pub state_name: String,
    pub n: usize,
    pub alpha: Option<f64>,
    pub quantum_value: f64,
    pub lhv_bound: f64,
    pub violation_factor: f64,
    pub settings: Vec<ObserverSettings>,
    pub method: Method,
    pub seed: Option<u64>,
}

impl ViolationReport {
    /// Builds a report; `violation_factor` is `quantum_value / lhv_bound`.
    pub fn new(
        state_name: impl Into<String>,
        n: usize,
        quantum_value: f64,
        lhv_bound: f64,
        settings: Vec<ObserverSettings>,
        method: Method,
    ) -> Self {
        Self {
            state_name: state_name.into(),
            n,
            alpha: None,
            quantum_value,
            lhv_bound,
            violation_factor: quantum_value / lhv_bound,
            settings,
            method,
            seed: None,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}
