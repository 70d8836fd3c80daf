//! Named multi-qubit states.
//!
//! Basis ordering: `|q_1 … q_N⟩` with qubit 1 as the most significant bit,
//! matching the tensor-factor order used by the operator builder.

use num_complex::Complex64;

use crate::bell::MAX_PARTIES;
use crate::error::{BellError, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn check_qubits(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(BellError::validation(format!(
            "state needs at least {min} qubits, got {n}"
        )));
    }
    if n > MAX_PARTIES {
        return Err(BellError::capacity("qubit count", n, MAX_PARTIES));
    }
    Ok(())
}

/// A normalized pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(num_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_qubits(num_qubits, 1)?;
        if amplitudes.len() != 1 << num_qubits {
            return Err(BellError::validation(format!(
                "{num_qubits}-qubit state needs {} amplitudes, got {}",
                1usize << num_qubits,
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(BellError::validation(format!(
                "state vector norm is {norm}, expected 1"
            )));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> DensityMatrix {
        let a = &self.amplitudes;
        let m = ComplexMatrix::from_fn(a.len(), a.len(), |i, j| a[i] * a[j].conj());
        DensityMatrix {
            num_qubits: self.num_qubits,
            matrix: HermitianMatrix::new(m).expect("projector is Hermitian"),
        }
    }
}

/// A mixed state.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: HermitianMatrix,
}

impl DensityMatrix {
    /// Checks unit trace and (numerical) positivity.
    pub fn new(num_qubits: usize, matrix: HermitianMatrix) -> Result<Self> {
        check_qubits(num_qubits, 1)?;
        if matrix.dim() != 1 << num_qubits {
            return Err(BellError::validation(format!(
                "{num_qubits}-qubit density matrix must be {0}x{0}",
                1usize << num_qubits
            )));
        }
        let tr = matrix.matrix().trace().re;
        if (tr - 1.0).abs() > 1e-12 {
            return Err(BellError::validation(format!("density matrix trace is {tr}")));
        }
        let min = matrix.extremal_eigenpairs().min.value;
        if min < -1e-10 {
            return Err(BellError::validation(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(Self { num_qubits, matrix })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_qubits(n, 1)?;
        let dim = 1usize << n;
        let m = ComplexMatrix::from_real_diagonal(&vec![1.0 / dim as f64; dim]);
        Ok(Self {
            num_qubits: n,
            matrix: HermitianMatrix::new(m)?,
        })
    }
}

/// Either kind of state, as accepted by the analysis routines.
#[derive(Clone, Debug, PartialEq)]
pub enum QuantumState {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl QuantumState {
    pub fn num_qubits(&self) -> usize {
        match self {
            QuantumState::Pure(s) => s.num_qubits,
            QuantumState::Mixed(d) => d.num_qubits,
        }
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        match self {
            QuantumState::Pure(s) => s.projector(),
            QuantumState::Mixed(d) => d.clone(),
        }
    }
}

impl From<StateVector> for QuantumState {
    fn from(s: StateVector) -> Self {
        QuantumState::Pure(s)
    }
}

impl From<DensityMatrix> for QuantumState {
    fn from(d: DensityMatrix) -> Self {
        QuantumState::Mixed(d)
    }
}

/// `cos α |0…0⟩ + sin α |1…1⟩`.
pub fn generalized_ghz(n: usize, alpha: f64) -> Result<StateVector> {
    check_qubits(n, 2)?;
    let dim = 1usize << n;
    let mut amps = vec![ZERO; dim];
    amps[0] = Complex64::new(alpha.cos(), 0.0);
    amps[dim - 1] = Complex64::new(alpha.sin(), 0.0);
    StateVector::new(n, amps)
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz(n: usize) -> Result<StateVector> {
    generalized_ghz(n, std::f64::consts::FRAC_PI_4)
}

/// Equal superposition of the `n` weight-one basis states.
pub fn w_state(n: usize) -> Result<StateVector> {
    check_qubits(n, 2)?;
    let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    let mut amps = vec![ZERO; 1 << n];
    for j in 0..n {
        amps[1 << j] = amp;
    }
    StateVector::new(n, amps)
}

/// `½(|0000⟩ + |0011⟩ + |1100⟩ − |1111⟩)`.
pub fn cluster4() -> StateVector {
    let mut amps = vec![ZERO; 16];
    amps[0b0000] = Complex64::new(0.5, 0.0);
    amps[0b0011] = Complex64::new(0.5, 0.0);
    amps[0b1100] = Complex64::new(0.5, 0.0);
    amps[0b1111] = Complex64::new(-0.5, 0.0);
    StateVector::new(4, amps).expect("normalized")
}

/// `(1 − v) I/2^n + v |GHZ⟩⟨GHZ|`.
pub fn noisy_ghz(n: usize, v: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&v) {
        return Err(BellError::validation(format!(
            "visibility must lie in [0, 1], got {v}"
        )));
    }
    let pure = ghz(n)?.projector();
    let dim = 1usize << n;
    let noise = (1.0 - v) / dim as f64;
    let mut m = pure.matrix.into_matrix().scale(Complex64::new(v, 0.0));
    for i in 0..dim {
        let d = m.get(i, i);
        m.set(i, i, d + noise);
    }
    DensityMatrix::new(n, HermitianMatrix::new(m)?)
}
