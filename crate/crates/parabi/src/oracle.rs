//! Exact numerical reference: dense diagonalization of the full Hamiltonian on
//! a truncated Fock space, spectral time evolution, and brute-force operator
//! exponentials.
//!
//! Basis: |s₁,s₂⟩ ⊗ |n⟩ with the σ^x eigenbasis for the qubits, qubit-major
//! ordering {(1,1), (-1,1), (1,-1), (-1,-1)}. In this basis σ^x is diagonal
//! and σ^z flips the corresponding label.

use crate::error::{Error, Result};
use crate::model::{ModelParams, QUBIT_SIGNS};
use crate::qmat;
use crate::specfun::log_factorial;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Displacement,
    Squeeze,
}

/// Dense matrix exponential of the truncated displacement or squeeze
/// generator, via the Hermitian eigendecomposition of -i·(generator).
pub fn brute_force_operator(
    kind: OperatorKind,
    parameter: Complex64,
    n_fock: usize,
) -> DMatrix<Complex64> {
    let mut gen = DMatrix::<Complex64>::zeros(n_fock, n_fock);
    match kind {
        OperatorKind::Displacement => {
            // α a† - α* a
            for n in 0..n_fock - 1 {
                let s = ((n + 1) as f64).sqrt();
                gen[(n + 1, n)] += parameter * s;
                gen[(n, n + 1)] -= parameter.conj() * s;
            }
        }
        OperatorKind::Squeeze => {
            // (ξ a†² - ξ* a²)/2
            for n in 0..n_fock.saturating_sub(2) {
                let s = (((n + 1) * (n + 2)) as f64).sqrt() / 2.0;
                gen[(n + 2, n)] += parameter * s;
                gen[(n, n + 2)] -= parameter.conj() * s;
            }
        }
    }
    // gen is anti-Hermitian: exp(gen) = V e^{iΛ} V† with K = -i·gen Hermitian
    let k = gen.map(|z| -Complex64::i() * z);
    let eig = k.symmetric_eigen();
    let phases: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .map(|&l| Complex64::from_polar(1.0, l))
        .collect();
    let mut scaled = eig.eigenvectors.clone();
    for (c, phase) in phases.iter().enumerate() {
        let mut col = scaled.column_mut(c);
        col *= *phase;
    }
    scaled * eig.eigenvectors.adjoint()
}

/// Truncated coherent-state vector, normalized on the cutoff.
pub fn coherent_vector(alpha: Complex64, n_fock: usize) -> DVector<Complex64> {
    let mut v = DVector::from_fn(n_fock, |n, _| {
        let log_mag = if alpha.norm_sqr() == 0.0 {
            if n == 0 {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        } else {
            -alpha.norm_sqr() / 2.0 + n as f64 * alpha.norm().ln() - 0.5 * log_factorial(n as u64)
        };
        Complex64::from_polar(log_mag.exp(), n as f64 * alpha.arg())
    });
    let norm = v.norm();
    v /= Complex64::new(norm, 0.0);
    v
}

/// The full Hamiltonian on the truncated product space, dimension 4(n_fock).
#[derive(Debug, Clone)]
pub struct FullHamiltonian {
    pub params: ModelParams,
    pub n_fock: usize,
    pub matrix: DMatrix<Complex64>,
}

/// Assembles H = ω a†a + Σ_j (Δ_j/2 σ_j^z + λ_j σ_j^x (a†+a)) + g(a†²+a²)
/// in the σ^x product basis. `n_fock` counts Fock states (indices 0..n_fock).
pub fn build_full_hamiltonian(params: &ModelParams, n_fock: usize) -> Result<FullHamiltonian> {
    params.validate()?;
    let nf = n_fock;
    let dim = 4 * nf;
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    let idx = |q: usize, n: usize| q * nf + n;
    for (q, &(s1, s2)) in QUBIT_SIGNS.iter().enumerate() {
        let lam = params.lambda_branch(s1, s2);
        for n in 0..nf {
            h[(idx(q, n), idx(q, n))] += Complex64::new(params.omega * n as f64, 0.0);
            if n + 1 < nf {
                // λ_{s₁,s₂} (a† + a), diagonal in the σ^x basis
                let v = Complex64::new(lam * ((n + 1) as f64).sqrt(), 0.0);
                h[(idx(q, n + 1), idx(q, n))] += v;
                h[(idx(q, n), idx(q, n + 1))] += v;
            }
            if n + 2 < nf {
                let v = Complex64::new(params.g * (((n + 1) * (n + 2)) as f64).sqrt(), 0.0);
                h[(idx(q, n + 2), idx(q, n))] += v;
                h[(idx(q, n), idx(q, n + 2))] += v;
            }
        }
    }
    // σ^z flips the corresponding σ^x label
    let flips: [(usize, usize, f64); 4] = [
        (0, 1, params.delta1 / 2.0),
        (2, 3, params.delta1 / 2.0),
        (0, 2, params.delta2 / 2.0),
        (1, 3, params.delta2 / 2.0),
    ];
    for (qa, qb, v) in flips {
        for n in 0..nf {
            h[(idx(qa, n), idx(qb, n))] += Complex64::new(v, 0.0);
            h[(idx(qb, n), idx(qa, n))] += Complex64::new(v, 0.0);
        }
    }
    Ok(FullHamiltonian {
        params: *params,
        n_fock: nf,
        matrix: h,
    })
}

/// Lowest k eigenvalues, ascending. Cutoff convergence is the caller's
/// responsibility; see [`exact_spectrum_converged`].
pub fn exact_spectrum(h: &FullHamiltonian, k: usize) -> Result<Vec<f64>> {
    let mut vals: Vec<f64> = h
        .matrix
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals.truncate(k);
    Ok(vals)
}

/// Lowest k eigenvalues with a cutoff-doubling convergence check: the levels
/// must move by less than `drift_tol` when n_fock is doubled.
pub fn exact_spectrum_converged(
    params: &ModelParams,
    n_fock: usize,
    k: usize,
    drift_tol: f64,
) -> Result<Vec<f64>> {
    let coarse = exact_spectrum(&build_full_hamiltonian(params, n_fock)?, k)?;
    let fine = exact_spectrum(&build_full_hamiltonian(params, 2 * n_fock)?, k)?;
    let drift = coarse
        .iter()
        .zip(fine.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if drift > drift_tol {
        return Err(Error::OracleNonConvergence { drift });
    }
    Ok(fine)
}

/// Cached spectral decomposition for repeated exact evolution.
pub struct SpectralEvolver {
    values: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl SpectralEvolver {
    pub fn new(h: &FullHamiltonian) -> Result<Self> {
        let (values, vectors) = qmat::hermitian_eigensystem(&h.matrix)?;
        Ok(SpectralEvolver { values, vectors })
    }

    /// e^{-iHt} ψ₀ by spectral decomposition; no time stepping, no
    /// accumulation error.
    pub fn evolve(&self, psi0: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        let mut coeffs = self.vectors.adjoint() * psi0;
        for (c, &e) in coeffs.iter_mut().zip(self.values.iter()) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        &self.vectors * coeffs
    }
}

/// One-shot exact evolution; decomposes H on every call.
pub fn exact_evolve(
    h: &FullHamiltonian,
    psi0: &DVector<Complex64>,
    t: f64,
) -> Result<DVector<Complex64>> {
    Ok(SpectralEvolver::new(h)?.evolve(psi0, t))
}

/// (cosθ|1,1⟩ + e^{iφ} sinθ|-1,-1⟩) ⊗ |α⟩ in the product basis.
pub fn initial_state_vector(
    theta: f64,
    phi: f64,
    alpha: Complex64,
    n_fock: usize,
) -> DVector<Complex64> {
    let coh = coherent_vector(alpha, n_fock);
    let mut psi = DVector::zeros(4 * n_fock);
    let c = Complex64::new(theta.cos(), 0.0);
    let s = Complex64::from_polar(theta.sin(), phi);
    for n in 0..n_fock {
        psi[n] = c * coh[n];
        psi[3 * n_fock + n] = s * coh[n];
    }
    psi
}

/// Two-qubit reduced density matrix of a product-basis state vector.
pub fn two_qubit_rdm_from_vector(psi: &DVector<Complex64>, n_fock: usize) -> DMatrix<Complex64> {
    let mut rho = DMatrix::zeros(4, 4);
    for q in 0..4 {
        for qp in 0..4 {
            let mut acc = Complex64::new(0.0, 0.0);
            for n in 0..n_fock {
                acc += psi[q * n_fock + n] * psi[qp * n_fock + n].conj();
            }
            rho[(q, qp)] = acc;
        }
    }
    rho
}

/// Oscillator reduced density matrix of a product-basis state vector.
pub fn oscillator_rdm_from_vector(psi: &DVector<Complex64>, n_fock: usize) -> DMatrix<Complex64> {
    let mut rho = DMatrix::zeros(n_fock, n_fock);
    for n in 0..n_fock {
        for m in 0..n_fock {
            let mut acc = Complex64::new(0.0, 0.0);
            for q in 0..4 {
                acc += psi[q * n_fock + n] * psi[q * n_fock + m].conj();
            }
            rho[(n, m)] = acc;
        }
    }
    rho
}

/// Joint parity σ₁^z σ₂^z e^{iπ a†a}, which commutes with the Hamiltonian.
pub fn parity_expectation(psi: &DVector<Complex64>, n_fock: usize) -> f64 {
    // σ₁^z σ₂^z swaps (1,1)↔(-1,-1) and (-1,1)↔(1,-1)
    let swap = [3usize, 2, 1, 0];
    let mut acc = Complex64::new(0.0, 0.0);
    for q in 0..4 {
        for n in 0..n_fock {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            acc += psi[swap[q] * n_fock + n].conj() * psi[q * n_fock + n] * sign;
        }
    }
    acc.re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{adiabatic_level, build_frame};
    use approx::assert_relative_eq;

    fn params(d1: f64, d2: f64, l1: f64, l2: f64, g: f64) -> ModelParams {
        ModelParams {
            omega: 1.0,
            delta1: d1,
            delta2: d2,
            lambda1: l1,
            lambda2: l2,
            g,
            n_max: None,
        }
    }

    #[test]
    fn operators_at_zero_are_identity() {
        for kind in [OperatorKind::Displacement, OperatorKind::Squeeze] {
            let u = brute_force_operator(kind, Complex64::new(0.0, 0.0), 16);
            let dev = (&u - DMatrix::<Complex64>::identity(16, 16))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(dev < 1e-12);
        }
    }

    #[test]
    fn operators_are_unitary_in_the_interior() {
        let n = 64;
        for (kind, p) in [
            (OperatorKind::Displacement, Complex64::new(0.8, 0.3)),
            (OperatorKind::Squeeze, Complex64::new(0.4, 0.1)),
        ] {
            let u = brute_force_operator(kind, p, n);
            let g = u.adjoint() * &u;
            for i in 0..n - 15 {
                for j in 0..n - 15 {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (g[(i, j)] - Complex64::new(expect, 0.0)).norm() < 1e-9,
                        "{kind:?} ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn decoupled_spectrum_is_the_shifted_ladder() {
        // λ = g = 0: spectrum = { ω n ± Δ₁/2 ± Δ₂/2 }
        let p = params(0.12, 0.07, 0.0, 0.0, 0.0);
        let h = build_full_hamiltonian(&p, 24).unwrap();
        let got = exact_spectrum(&h, 8).unwrap();
        let mut expect = vec![];
        for n in 0..3 {
            for s1 in [-1.0, 1.0] {
                for s2 in [-1.0, 1.0] {
                    expect.push(n as f64 + s1 * 0.06 + s2 * 0.035);
                }
            }
        }
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (g, e) in got.iter().zip(expect.iter()) {
            assert_relative_eq!(g, e, epsilon = 1e-10);
        }
    }

    #[test]
    fn displaced_oscillator_spectrum() {
        // Δ = 0, g = 0: E_n = ω(n - λ²_{s₁,s₂}/ω²), each branch separately
        let p = params(0.0, 0.0, 0.2, 0.1, 0.0);
        let h = build_full_hamiltonian(&p, 64).unwrap();
        let got = exact_spectrum(&h, 4).unwrap();
        // ground energies of the four displaced branches: -(λ₁s₁+λ₂s₂)²
        let mut expect: Vec<f64> = QUBIT_SIGNS
            .iter()
            .map(|&(s1, s2)| -p.lambda_branch(s1, s2).powi(2))
            .collect();
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (g, e) in got.iter().zip(expect.iter()) {
            assert_relative_eq!(g, e, epsilon = 1e-9);
        }
    }

    #[test]
    fn pure_parametric_spectrum_is_the_dressed_ladder() {
        // Δ = λ = 0, g > 0: E_n = (n + 1/2)Ω - ω/2, fourfold degenerate
        let p = params(0.0, 0.0, 0.0, 0.0, 0.3);
        let h = build_full_hamiltonian(&p, 96).unwrap();
        let got = exact_spectrum(&h, 12).unwrap();
        let dressed = (1.0f64 - 4.0 * 0.09).sqrt();
        for (i, v) in got.iter().enumerate() {
            let n = i / 4;
            let expect = (n as f64 + 0.5) * dressed - 0.5;
            assert!((v - expect).abs() < 1e-8, "level {i}: {v} vs {expect}");
        }
    }

    #[test]
    fn spectrum_collapses_toward_g_half_omega() {
        let gap = |g: f64| {
            let p = params(0.0, 0.0, 0.02, 0.02, g);
            let h = build_full_hamiltonian(&p, 128).unwrap();
            let s = exact_spectrum(&h, 8).unwrap();
            s[4] - s[0]
        };
        let g_small = gap(0.1);
        let g_large = gap(0.45);
        assert!(g_large < 0.6 * g_small, "{g_large} vs {g_small}");
    }

    #[test]
    fn convergence_check_passes_in_adiabatic_regime() {
        let p = params(0.1, 0.08, 0.03, 0.05, 0.2);
        let vals = exact_spectrum_converged(&p, 80, 12, 1e-8).unwrap();
        assert_eq!(vals.len(), 12);
    }

    #[test]
    fn evolution_preserves_norm_and_fixes_eigenvectors() {
        let p = params(0.1, 0.08, 0.02, 0.04, 0.1);
        let h = build_full_hamiltonian(&p, 32).unwrap();
        let ev = SpectralEvolver::new(&h).unwrap();
        let psi0 = initial_state_vector(0.3, 0.7, Complex64::new(1.0, 0.0), 32);
        let psit = ev.evolve(&psi0, 37.5);
        assert_relative_eq!(psit.norm(), 1.0, epsilon = 1e-10);
        let back = ev.evolve(&psi0, 0.0);
        assert!((&back - &psi0).norm() < 1e-12);
        // an eigenvector only picks up a phase
        let (vals, vecs) = qmat::hermitian_eigensystem(&h.matrix).unwrap();
        let v0 = DVector::from_column_slice(vecs.column(0).as_slice());
        let moved = ev.evolve(&v0, 11.0);
        let phase = Complex64::from_polar(1.0, -vals[0] * 11.0);
        assert!((moved - v0.map(|z| z * phase)).norm() < 1e-9);
    }

    #[test]
    fn eigenvectors_have_definite_parity() {
        let p = params(0.13, 0.077, 0.04, 0.03, 0.1);
        let h = build_full_hamiltonian(&p, 48).unwrap();
        let (vals, vecs) = qmat::hermitian_eigensystem(&h.matrix).unwrap();
        // skip near-degenerate pairs, where the eigensolver may mix sectors
        for i in 0..20 {
            let isolated = (i == 0 || (vals[i - 1] - vals[i]).abs() > 1e-8)
                && (vals[i + 1] - vals[i]).abs() > 1e-8;
            if !isolated {
                continue;
            }
            let v = DVector::from_column_slice(vecs.column(vecs.ncols() - 1 - i).as_slice());
            let pexp = parity_expectation(&v, 48).abs();
            assert!(pexp > 1.0 - 1e-8, "level {i}: |<P>| = {pexp}");
        }
    }

    #[test]
    fn adiabatic_error_grows_with_detuning() {
        let max_err = |delta: f64| -> f64 {
            let p = params(delta, delta, 0.04, 0.04, 0.1);
            let f = build_frame(&p).unwrap();
            let mut approx: Vec<f64> = (0..8)
                .flat_map(|n| adiabatic_level(&p, &f, n).energies())
                .collect();
            approx.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let h = build_full_hamiltonian(&p, 120).unwrap();
            let exact = exact_spectrum(&h, 12).unwrap();
            approx
                .iter()
                .zip(exact.iter())
                .map(|(a, e)| (a - e).abs())
                .fold(0.0, f64::max)
        };
        let e_small = max_err(0.05);
        let e_large = max_err(0.2);
        assert!(
            e_large > e_small,
            "expected monotone degradation: {e_small} vs {e_large}"
        );
    }
}
