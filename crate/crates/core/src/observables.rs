//! Single-qubit ±1 observables parametrized by Bloch angles.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{ComplexMatrix, HermitianMatrix};

/// Pauli matrices in the basis where `σ_z = diag(1, −1)` and `|0⟩ = (1, 0)`.
pub mod pauli {
    use super::*;

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_fn(2, 2, |i, j| Complex64::new(if i != j { 1.0 } else { 0.0 }, 0.0))
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => Complex64::new(0.0, -1.0),
            (1, 0) => Complex64::new(0.0, 1.0),
            _ => Complex64::new(0.0, 0.0),
        })
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }
}

/// A dichotomic measurement `a·σ` along the unit vector with polar angle
/// `theta` and azimuth `phi` (radians, taken as given).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    pub theta: f64,
    pub phi: f64,
}

impl Observable {
    pub const fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    /// `σ_x`.
    pub const fn x() -> Self {
        Self::new(std::f64::consts::FRAC_PI_2, 0.0)
    }

    /// `σ_y`.
    pub const fn y() -> Self {
        Self::new(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2)
    }

    /// `σ_z`.
    pub const fn z() -> Self {
        Self::new(0.0, 0.0)
    }

    /// `(sinθ cosφ, sinθ sinφ, cosθ)`.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// The 2×2 matrix of this observable.
    pub fn matrix(&self) -> ComplexMatrix {
        let [x, y, z] = self.bloch_vector();
        ComplexMatrix::from_row_major(
            2,
            2,
            vec![
                Complex64::new(z, 0.0),
                Complex64::new(x, -y),
                Complex64::new(x, y),
                Complex64::new(-z, 0.0),
            ],
        )
        .expect("2x2 shape")
    }

    pub fn dot(&self, other: &Observable) -> f64 {
        bloch_dot(self, other)
    }
}

/// `sinθ cosφ σ_x + sinθ sinφ σ_y + cosθ σ_z`.
pub fn bloch_observable(theta: f64, phi: f64) -> HermitianMatrix {
    HermitianMatrix::new(Observable::new(theta, phi).matrix()).expect("a.σ is Hermitian")
}

/// Euclidean dot product of two Bloch vectors.
pub fn bloch_dot(a: &Observable, b: &Observable) -> f64 {
    let (u, v) = (a.bloch_vector(), b.bloch_vector());
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

/// The two measurement choices of one party: `A_j` (`setting_1`) and `A'_j` (`setting_2`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObserverSettings {
    pub setting_1: Observable,
    pub setting_2: Observable,
}

impl ObserverSettings {
    pub const fn new(setting_1: Observable, setting_2: Observable) -> Self {
        Self {
            setting_1,
            setting_2,
        }
    }

    /// The observable for measurement choice `1` or `2`.
    pub fn choice(&self, k: u8) -> Option<&Observable> {
        match k {
            1 => Some(&self.setting_1),
            2 => Some(&self.setting_2),
            _ => None,
        }
    }

    /// Angles flattened as `[θ₁, φ₁, θ₂, φ₂]`.
    pub fn to_angles(&self) -> [f64; 4] {
        [
            self.setting_1.theta,
            self.setting_1.phi,
            self.setting_2.theta,
            self.setting_2.phi,
        ]
    }

    pub fn from_angles(a: [f64; 4]) -> Self {
        Self::new(Observable::new(a[0], a[1]), Observable::new(a[2], a[3]))
    }
}
