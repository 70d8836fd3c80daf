//! Dense complex matrices sized for a dozen qubits.
//!
//! Everything here is row-major and dense. The largest operator the crate
//! ever builds is `4096 × 4096` (twelve qubits), so there is no sparse path.
//! Extremal eigenvalues come from a Lanczos iteration with full
//! reorthogonalization, which only ever needs matrix-vector products and a
//! small real tridiagonal eigenproblem.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{BellError, Result};

/// Largest row or column count any matrix may have.
pub const MAX_DIM: usize = 4096;

/// Maximum entry-wise deviation `|H − H†|` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A dense complex matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(BellError::validation("matrix dimensions must be positive"));
        }
        if rows > MAX_DIM || cols > MAX_DIM {
            return Err(BellError::capacity("matrix dimension", rows.max(cols), MAX_DIM));
        }
        if data.len() != rows * cols {
            return Err(BellError::validation(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Diagonal matrix with real entries.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    /// `self += factor · other`.
    pub fn add_scaled(&mut self, factor: Complex64, other: &ComplexMatrix) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += factor * b;
        }
        Ok(())
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(BellError::validation(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let other_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        self.data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Largest entry-wise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry-wise modulus of `self − self†`; infinite when not square.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    fn check_same_shape(&self, other: &ComplexMatrix) -> Result<()> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(BellError::validation(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

/// Kronecker product: `out[(i·p + k), (j·q + l)] = a[i, j] · b[k, l]` for `b` of shape `p × q`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    if rows > MAX_DIM || cols > MAX_DIM {
        return Err(BellError::capacity("Kronecker product dimension", rows.max(cols), MAX_DIM));
    }
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a.get(i, j);
            if aij == ZERO {
                continue;
            }
            for k in 0..b.rows {
                let dst = (i * b.rows + k) * cols + j * b.cols;
                let src = &b.data[k * b.cols..(k + 1) * b.cols];
                for (o, &bkl) in out.data[dst..dst + b.cols].iter_mut().zip(src) {
                    *o = aij * bkl;
                }
            }
        }
    }
    Ok(out)
}

/// A square matrix that passed the Hermiticity check.
///
/// Construction replaces the matrix by `(H + H†)/2`, so downstream code can
/// rely on exact self-adjointness.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(BellError::validation(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.rows, m.cols
            )));
        }
        let dev = m.hermitian_deviation();
        if !(dev <= HERMITIAN_TOL) {
            return Err(BellError::validation(format!(
                "matrix is not Hermitian: max |H - H^dagger| = {dev:e}"
            )));
        }
        let n = m.rows;
        let mut m = m;
        for i in 0..n {
            let d = m.get(i, i);
            m.set(i, i, Complex64::new(d.re, 0.0));
            for j in i + 1..n {
                let avg = 0.5 * (m.get(i, j) + m.get(j, i).conj());
                m.set(i, j, avg);
                m.set(j, i, avg.conj());
            }
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.0.mul_vec(v)
    }

    /// `⟨v|H|v⟩`, real for Hermitian `H`.
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        let hv = self.mul_vec(v);
        v.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Smallest and largest eigenpairs.
    pub fn extremal_eigenpairs(&self) -> SpectralBounds {
        lanczos_extremes(self)
    }

    /// `max |λ|` over the spectrum.
    pub fn max_abs_eigenvalue(&self) -> f64 {
        let b = self.extremal_eigenpairs();
        b.min.value.abs().max(b.max.value.abs())
    }
}

/// `max |λ|` over the eigenvalues of `h`, to about `1e−10` relative accuracy.
pub fn hermitian_max_abs_eigenvalue(h: &HermitianMatrix) -> f64 {
    h.max_abs_eigenvalue()
}

/// `Re Tr(ρ·B)`.
pub fn trace_product(rho: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    if rho.dim() != b.dim() {
        return Err(BellError::validation(format!(
            "trace product dimension mismatch: {} vs {}",
            rho.dim(),
            b.dim()
        )));
    }
    let n = rho.dim();
    let (r, m) = (rho.0.as_slice(), b.0.as_slice());
    let mut tr = ZERO;
    for i in 0..n {
        for j in 0..n {
            tr += r[i * n + j] * m[j * n + i];
        }
    }
    assert!(
        tr.im.abs() <= HERMITIAN_TOL,
        "Tr(rho B) has imaginary part {:e}",
        tr.im
    );
    Ok(tr.re)
}

#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub value: f64,
    /// Unit-norm eigenvector.
    pub vector: Vec<Complex64>,
}

/// The two ends of a Hermitian spectrum.
#[derive(Clone, Debug)]
pub struct SpectralBounds {
    pub min: Eigenpair,
    pub max: Eigenpair,
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

// Lanczos with full reorthogonalization. The Krylov space of a generic start
// vector contains every eigenvalue with nonzero overlap, so an early breakdown
// (tiny beta) means the tridiagonal spectrum is already exact.
fn lanczos_extremes(h: &HermitianMatrix) -> SpectralBounds {
    let n = h.dim();
    if n == 1 {
        let v = h.0.get(0, 0).re;
        let pair = Eigenpair {
            value: v,
            vector: vec![ONE],
        };
        return SpectralBounds {
            min: pair.clone(),
            max: pair,
        };
    }

    let scale = h.0.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1a2c);
    let mut q: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let q_norm = norm(&q);
    q.iter_mut().for_each(|z| *z /= q_norm);

    let mut basis: Vec<Vec<Complex64>> = vec![q];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    loop {
        let j = basis.len() - 1;
        let mut w = h.mul_vec(&basis[j]);
        let a = inner(&basis[j], &w).re;
        for (wi, qi) in w.iter_mut().zip(&basis[j]) {
            *wi -= a * qi;
        }
        if j > 0 {
            let b_prev = betas[j - 1];
            for (wi, qi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= b_prev * qi;
            }
        }
        // Two Gram-Schmidt passes keep the basis orthonormal to working precision.
        for _ in 0..2 {
            for qk in &basis {
                let c = inner(qk, &w);
                for (wi, qi) in w.iter_mut().zip(qk) {
                    *wi -= c * qi;
                }
            }
        }
        alphas.push(a);
        let b = norm(&w);
        let m = alphas.len();

        let breakdown = b <= 1e-13 * scale * (n as f64).sqrt();
        let should_check = breakdown || m == n || m < 24 || m % 6 == 0;
        if should_check {
            let (values, vectors) = tridiagonal_eigen(&alphas, &betas);
            let (imin, imax) = extreme_indices(&values);
            let spread = values[imin].abs().max(values[imax].abs()).max(scale * 1e-3);
            let resid = |i: usize| b * vectors[(m - 1, i)].abs();
            let converged = resid(imin) <= 1e-11 * spread && resid(imax) <= 1e-11 * spread;
            if breakdown || m == n || converged {
                let ritz = |i: usize| {
                    let mut y = vec![ZERO; n];
                    for (k, qk) in basis.iter().enumerate() {
                        let s = vectors[(k, i)];
                        for (yi, qi) in y.iter_mut().zip(qk) {
                            *yi += s * qi;
                        }
                    }
                    let ny = norm(&y);
                    y.iter_mut().for_each(|z| *z /= ny);
                    Eigenpair {
                        value: values[i],
                        vector: y,
                    }
                };
                return SpectralBounds {
                    min: ritz(imin),
                    max: ritz(imax),
                };
            }
        }

        w.iter_mut().for_each(|z| *z /= b);
        betas.push(b);
        basis.push(w);
    }
}

fn tridiagonal_eigen(alphas: &[f64], betas: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alphas.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

fn extreme_indices(values: &[f64]) -> (usize, usize) {
    let mut imin = 0;
    let mut imax = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[imin] {
            imin = i;
        }
        if v > values[imax] {
            imax = i;
        }
    }
    (imin, imax)
}
