//! Dense complex Hermitian matrix utilities: eigendecomposition, partial
//! traces, von Neumann entropy, purity, Hilbert-Schmidt distance.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-8;
/// Eigenvalues above -NEGATIVITY_TOL are treated as truncation noise and
/// clipped to zero; anything below is a genuine positivity violation.
pub const NEGATIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsystemLabel {
    TwoQubit,
    Qubit,
    Oscillator,
    QubitOscillator,
}

/// Hermitian, unit-trace matrix with a subsystem tag.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    label: SubsystemLabel,
    mat: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace; positivity is checked lazily by
    /// the spectral operations (truncation noise makes a strict eigenvalue
    /// check on every construction too expensive to justify).
    pub fn new(label: SubsystemLabel, mat: DMatrix<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch {
                expected: mat.nrows(),
                got: mat.ncols(),
            });
        }
        let asym = max_asymmetry(&mat);
        if asym > HERMITICITY_TOL {
            return Err(Error::NotHermitian {
                max_asymmetry: asym,
                tolerance: HERMITICITY_TOL,
            });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::TraceDeviation {
                trace: tr.re,
                tolerance: TRACE_TOL,
            });
        }
        Ok(DensityMatrix { label, mat })
    }

    pub fn from_pure(label: SubsystemLabel, psi: &DVector<Complex64>) -> Result<Self> {
        let mat = psi * psi.adjoint();
        DensityMatrix::new(label, mat)
    }

    pub fn maximally_mixed(label: SubsystemLabel, dim: usize) -> Self {
        let mat = DMatrix::from_diagonal_element(
            dim,
            dim,
            Complex64::new(1.0 / dim as f64, 0.0),
        );
        DensityMatrix { label, mat }
    }

    pub fn label(&self) -> SubsystemLabel {
        self.label
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.mat
    }

    /// Smallest eigenvalue; useful as a positivity diagnostic.
    pub fn min_eigenvalue(&self) -> f64 {
        self.mat
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b))
    }
}

pub(crate) fn max_asymmetry(m: &DMatrix<Complex64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..=i {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending
/// with matching orthonormal eigenvector columns.
///
/// Rejects inputs whose max asymmetry exceeds 1e-8; the input is symmetrized
/// before the solve so roundoff asymmetry cannot leak into the spectrum.
pub fn hermitian_eigensystem(m: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let asym = max_asymmetry(m);
    if asym > 1e-8 {
        return Err(Error::NotHermitian {
            max_asymmetry: asym,
            tolerance: 1e-8,
        });
    }
    let n = m.nrows();
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    Ok((values, vectors))
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let asym = max_asymmetry(m);
    if asym > 1e-8 {
        return Err(Error::NotHermitian {
            max_asymmetry: asym,
            tolerance: 1e-8,
        });
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let mut vals: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(vals)
}

/// Von Neumann entropy -Tr(ρ log₂ ρ) in bits.
///
/// Eigenvalues in [-NEGATIVITY_TOL, 0) are clipped to zero (0·log 0 := 0);
/// anything more negative is reported as a positivity violation.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    entropy_of_spectrum(&hermitian_eigenvalues(rho.matrix())?)
}

pub(crate) fn entropy_of_spectrum(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &p in eigenvalues {
        if p < -NEGATIVITY_TOL {
            return Err(Error::PositivityViolation {
                eigenvalue: p,
                tolerance: NEGATIVITY_TOL,
            });
        }
        if p > 0.0 {
            s -= p * p.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Partial trace over a tensor-product structure.
///
/// `dims` are the factor dimensions in tensor order (first factor slowest
/// index), `keep` lists the factor indices to retain, in their original
/// order. The factors not listed are traced out.
pub fn partial_trace(
    rho: &DensityMatrix,
    keep: &[usize],
    dims: &[usize],
) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: total,
        });
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::InvalidParameter(format!(
            "keep index out of range for {} factors",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let kept_dim: usize = keep.iter().map(|&i| dims[i]).product();
    let traced_dim: usize = traced.iter().map(|&i| dims[i]).product();

    // strides of each factor in the flattened index
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let flat = |combo: usize, factors: &[usize]| -> usize {
        let mut rest = combo;
        let mut idx = 0;
        for &f in factors.iter().rev() {
            idx += (rest % dims[f]) * strides[f];
            rest /= dims[f];
        }
        idx
    };

    let m = rho.matrix();
    let mut out = DMatrix::<Complex64>::zeros(kept_dim, kept_dim);
    for i in 0..kept_dim {
        let base_i = flat(i, &keep);
        for j in 0..kept_dim {
            let base_j = flat(j, &keep);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..traced_dim {
                let off = flat(t, &traced);
                acc += m[(base_i + off, base_j + off)];
            }
            out[(i, j)] = acc;
        }
    }
    let label = match kept_dim {
        2 => SubsystemLabel::Qubit,
        4 => SubsystemLabel::TwoQubit,
        _ => SubsystemLabel::Oscillator,
    };
    DensityMatrix::new(label, out)
}

/// Tr ρ², computed without an eigensolve.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().iter().map(|z| z.norm_sqr()).sum()
}

/// Hilbert-Schmidt distance √Tr((ρ-σ)²).
pub fn hs_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let mut acc = 0.0;
    for (a, b) in rho.matrix().iter().zip(sigma.matrix().iter()) {
        acc += (a - b).norm_sqr();
    }
    Ok(acc.sqrt())
}
