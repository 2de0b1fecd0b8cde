//! Physical quantities computed from the reduced density matrices: population
//! inversion, relative entropy of coherence, Bloch decomposition, geometric
//! discord, concurrence, Bell-state reconstruction, quadrature variance, the
//! Husimi Q distribution, and revival-peak detection.

use crate::dynamics::EvolutionState;
use crate::error::{Error, Result};
use crate::qmat::{
    self, entropy_of_spectrum, hermitian_eigensystem, hermitian_eigenvalues, DensityMatrix,
};
use nalgebra::{DMatrix, DVector, Matrix3, Vector3, Vector4};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

fn require_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    Ok(())
}

/// ⟨S₊^z⟩ = ϱ_{1,1;1,1} - ϱ_{-1,-1;-1,-1}.
pub fn population_inversion(rho4: &DensityMatrix) -> Result<f64> {
    require_two_qubit(rho4)?;
    Ok(rho4.matrix()[(0, 0)].re - rho4.matrix()[(3, 3)].re)
}

/// Relative entropy of coherence C_RE = S(ρ_diag) - S(ρ), in the fixed matrix
/// basis of ρ.
pub fn relative_entropy_coherence(rho: &DensityMatrix) -> Result<f64> {
    let diag: Vec<f64> = (0..rho.dim()).map(|i| rho.matrix()[(i, i)].re).collect();
    let s_diag = entropy_of_spectrum(&diag)?;
    let s = qmat::von_neumann_entropy(rho)?;
    Ok((s_diag - s).max(0.0))
}

/// Local Bloch vectors and correlation tensor of a two-qubit state.
#[derive(Debug, Clone, Serialize)]
pub struct BlochDecomposition {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub t: [[f64; 3]; 3],
}

/// Component formulas in the fixed 4x4 ordering; `a` belongs to the qubit
/// whose flip connects the upper and lower 2x2 blocks.
pub fn bloch_decomposition(rho4: &DensityMatrix) -> Result<BlochDecomposition> {
    require_two_qubit(rho4)?;
    let m = rho4.matrix();
    let a1 = m[(0, 2)] + m[(1, 3)];
    let b1 = m[(0, 1)] + m[(2, 3)];
    let a = [
        2.0 * a1.re,
        -2.0 * a1.im,
        m[(0, 0)].re + m[(1, 1)].re - m[(2, 2)].re - m[(3, 3)].re,
    ];
    let b = [
        2.0 * b1.re,
        -2.0 * b1.im,
        m[(0, 0)].re - m[(1, 1)].re + m[(2, 2)].re - m[(3, 3)].re,
    ];
    let sum03_12 = m[(0, 3)] + m[(1, 2)];
    let dif03_12 = m[(0, 3)] - m[(1, 2)];
    let dif02_13 = m[(0, 2)] - m[(1, 3)];
    let dif01_23 = m[(0, 1)] - m[(2, 3)];
    // off-diagonal pattern fixed by Tr(ρ σ_i⊗σ_j); the (1,2) entry carries
    // the difference, not the sum, or the expansion fails to reconstruct ρ
    let t = [
        [2.0 * sum03_12.re, -2.0 * dif03_12.im, 2.0 * dif02_13.re],
        [-2.0 * sum03_12.im, -2.0 * dif03_12.re, -2.0 * dif02_13.im],
        [2.0 * dif01_23.re, -2.0 * dif01_23.im,
         m[(0, 0)].re - m[(1, 1)].re - m[(2, 2)].re + m[(3, 3)].re],
    ];
    Ok(BlochDecomposition { a, b, t })
}

impl BlochDecomposition {
    /// Rebuilds ρ = ¼(I⊗I + a·σ⊗I + b·I⊗σ + Σ T_ij σ_i⊗σ_j); inverse of
    /// [`bloch_decomposition`] up to numerical noise.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let paulis = pauli_matrices();
        let id = DMatrix::<Complex64>::identity(2, 2);
        let mut rho = DMatrix::<Complex64>::identity(4, 4);
        for i in 0..3 {
            rho += (paulis[i].kronecker(&id)).scale(self.a[i]);
            rho += (id.kronecker(&paulis[i])).scale(self.b[i]);
            for j in 0..3 {
                rho += (paulis[i].kronecker(&paulis[j])).scale(self.t[i][j]);
            }
        }
        rho.scale(0.25)
    }
}

fn pauli_matrices() -> [DMatrix<Complex64>; 3] {
    let z = |re: f64, im: f64| Complex64::new(re, im);
    [
        DMatrix::from_row_slice(2, 2, &[z(0.0, 0.0), z(1.0, 0.0), z(1.0, 0.0), z(0.0, 0.0)]),
        DMatrix::from_row_slice(2, 2, &[z(0.0, 0.0), z(0.0, -1.0), z(0.0, 1.0), z(0.0, 0.0)]),
        DMatrix::from_row_slice(2, 2, &[z(1.0, 0.0), z(0.0, 0.0), z(0.0, 0.0), z(-1.0, 0.0)]),
    ]
}

/// Geometric discord D_G = ¼(‖a‖² + ‖T‖² - E_max) with E_max the largest
/// eigenvalue of aaᵀ + TTᵀ. Ranges over [0, 1/2]; report 2·D_G to compare
/// with concurrence.
pub fn geometric_discord(rho4: &DensityMatrix) -> Result<f64> {
    let bloch = bloch_decomposition(rho4)?;
    let a = Vector3::from_row_slice(&bloch.a);
    let t = Matrix3::from_fn(|i, j| bloch.t[i][j]);
    let k = a * a.transpose() + t * t.transpose();
    let e_max = k
        .symmetric_eigenvalues()
        .iter()
        .fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    Ok((0.25 * (a.norm_squared() + (t.transpose() * t).trace() - e_max)).max(0.0))
}

/// Wootters concurrence from the spin-flipped matrix R = ρ ρ̃.
///
/// Evaluated through the Hermitian form √ρ ρ̃ √ρ, whose eigenvalues coincide
/// with those of R; eigenvalue dust below zero is clipped before the square
/// roots.
pub fn concurrence(rho4: &DensityMatrix) -> Result<f64> {
    require_two_qubit(rho4)?;
    let m = rho4.matrix();
    // σ^y ⊗ σ^y has a single anti-diagonal: (0,3) -1, (1,2) +1, (2,1) +1, (3,0) -1
    let syy = {
        let mut s = DMatrix::<Complex64>::zeros(4, 4);
        s[(0, 3)] = Complex64::new(-1.0, 0.0);
        s[(1, 2)] = Complex64::new(1.0, 0.0);
        s[(2, 1)] = Complex64::new(1.0, 0.0);
        s[(3, 0)] = Complex64::new(-1.0, 0.0);
        s
    };
    let flipped = &syy * m.map(|z| z.conj()) * &syy;
    let (vals, vecs) = hermitian_eigensystem(m)?;
    let sqrt_rho = {
        let mut d = DMatrix::<Complex64>::zeros(4, 4);
        for (i, &v) in vals.iter().enumerate() {
            if v < -1e-8 {
                return Err(Error::PositivityViolation {
                    eigenvalue: v,
                    tolerance: 1e-8,
                });
            }
            d[(i, i)] = Complex64::new(v.max(0.0).sqrt(), 0.0);
        }
        &vecs * d * vecs.adjoint()
    };
    let herm = &sqrt_rho * flipped * &sqrt_rho;
    let mut lams = hermitian_eigenvalues(&herm)?;
    for l in lams.iter_mut() {
        if *l < -1e-8 {
            return Err(Error::PositivityViolation {
                eigenvalue: *l,
                tolerance: 1e-8,
            });
        }
        // eigensolve dust below 1e-10 would survive the square root as ~1e-5
        if l.abs() < 1e-10 {
            *l = 0.0;
        }
    }
    let c = lams[0].sqrt() - lams[1].sqrt() - lams[2].sqrt() - lams[3].sqrt();
    Ok(c.clamp(0.0, 1.0))
}

/// Amplitudes over the generalized Bell basis
/// Φ± = (|1,1⟩ ± i|-1,-1⟩)/√2, Ψ± = (|1,-1⟩ ± i|-1,1⟩)/√2.
#[derive(Debug, Clone, Serialize)]
pub struct BellCoefficients {
    pub phi_plus: Complex64,
    pub phi_minus: Complex64,
    pub psi_plus: Complex64,
    pub psi_minus: Complex64,
}

impl BellCoefficients {
    pub fn norm_sqr(&self) -> f64 {
        self.phi_plus.norm_sqr()
            + self.phi_minus.norm_sqr()
            + self.psi_plus.norm_sqr()
            + self.psi_minus.norm_sqr()
    }

    pub fn amplitudes(&self) -> [Complex64; 4] {
        [self.phi_plus, self.phi_minus, self.psi_plus, self.psi_minus]
    }

    pub fn dominant(&self) -> (&'static str, f64) {
        let labels = ["Phi+", "Phi-", "Psi+", "Psi-"];
        let mags = self.amplitudes().map(|a| a.norm());
        let mut best = 0;
        for i in 1..4 {
            if mags[i] > mags[best] {
                best = i;
            }
        }
        (labels[best], mags[best])
    }
}

fn bell_basis() -> [Vector4<Complex64>; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    let re = |x: f64| Complex64::new(x, 0.0);
    let im = |x: f64| Complex64::new(0.0, x);
    [
        Vector4::new(re(s), z, z, im(s)),   // Φ+
        Vector4::new(re(s), z, z, im(-s)),  // Φ-
        Vector4::new(z, im(s), re(s), z),   // Ψ+
        Vector4::new(z, im(-s), re(s), z),  // Ψ-
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct BellReconstruction {
    pub coefficients: BellCoefficients,
    /// Distance reached by the numeric search.
    pub d_min: f64,
    /// √(Tr ρ² + 1 - 2 λ_max), the analytic optimum over pure states.
    pub d_min_closed_form: f64,
    /// Set when the top eigenvalue is degenerate and the minimizer is not
    /// unique (any of them is accepted).
    pub degenerate: bool,
}

/// Finds the pure Bell-basis superposition closest to ρ in Hilbert-Schmidt
/// distance.
///
/// The search starts from the top eigenvector, adds seeded random restarts,
/// and refines with a derivative-free compass search on the unit sphere; the
/// closed form is computed alongside as the correctness reference. The global
/// phase is fixed by making the largest-magnitude coefficient real positive.
pub fn bell_reconstruct(rho4: &DensityMatrix, seed: u64) -> Result<BellReconstruction> {
    require_two_qubit(rho4)?;
    let m = rho4.matrix();
    let (vals, vecs) = hermitian_eigensystem(m)?;
    let purity = qmat::purity(rho4);
    let d_closed = (purity + 1.0 - 2.0 * vals[0]).max(0.0).sqrt();
    let degenerate = vals[0] - vals[1] < 1e-10;

    let overlap = |v: &Vector4<Complex64>| -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                acc += v[i].conj() * m[(i, j)] * v[j];
            }
        }
        acc.re
    };

    let mut best = Vector4::from_fn(|i, _| vecs[(i, 0)]);
    let mut best_overlap = overlap(&best);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts = vec![best];
    for _ in 0..4 {
        let mut v = Vector4::from_fn(|_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        v /= Complex64::new(v.norm(), 0.0);
        starts.push(v);
    }
    for start in starts {
        let (v, f) = compass_search(start, &overlap);
        if f > best_overlap {
            best_overlap = f;
            best = v;
        }
    }
    let d_min = (purity + 1.0 - 2.0 * best_overlap).max(0.0).sqrt();

    let basis = bell_basis();
    let mut amps: Vec<Complex64> = basis.iter().map(|b| b.dotc(&best)).collect();
    // gauge: dominant amplitude real positive
    let lead = amps
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let phase = Complex64::from_polar(1.0, -amps[lead].arg());
    for a in amps.iter_mut() {
        *a *= phase;
    }
    Ok(BellReconstruction {
        coefficients: BellCoefficients {
            phi_plus: amps[0],
            phi_minus: amps[1],
            psi_plus: amps[2],
            psi_minus: amps[3],
        },
        d_min,
        d_min_closed_form: d_closed,
        degenerate,
    })
}

/// Derivative-free maximization of f over the complex unit sphere in C⁴:
/// coordinate steps on the 8 real components with projection back to the
/// sphere and halving step sizes.
fn compass_search(
    start: Vector4<Complex64>,
    f: &dyn Fn(&Vector4<Complex64>) -> f64,
) -> (Vector4<Complex64>, f64) {
    let mut v = start;
    let norm = v.norm();
    if norm > 0.0 {
        v /= Complex64::new(norm, 0.0);
    }
    let mut fv = f(&v);
    let mut step = 0.25;
    while step > 1e-9 {
        let mut improved = false;
        for idx in 0..8 {
            for sign in [1.0f64, -1.0] {
                let mut cand = v;
                let delta = step * sign;
                if idx % 2 == 0 {
                    cand[idx / 2] += Complex64::new(delta, 0.0);
                } else {
                    cand[idx / 2] += Complex64::new(0.0, delta);
                }
                let norm = cand.norm();
                if norm < 1e-12 {
                    continue;
                }
                cand /= Complex64::new(norm, 0.0);
                let fc = f(&cand);
                if fc > fv + 1e-16 {
                    v = cand;
                    fv = fc;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (v, fv)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuadratureVariance {
    pub v_min: f64,
    pub a_mean: Complex64,
    pub a2_mean: Complex64,
    pub n_mean: f64,
    /// V_min < 0.5 signals squeezing below the vacuum/coherent limit.
    pub squeezed: bool,
}

fn variance_from_moments(a: Complex64, a2: Complex64, n: f64) -> QuadratureVariance {
    let v_min = 0.5 + n - a.norm_sqr() - (a2 - a * a).norm();
    QuadratureVariance {
        v_min,
        a_mean: a,
        a2_mean: a2,
        n_mean: n,
        squeezed: v_min < 0.5,
    }
}

/// Principal quadrature variance V_min = ½ + ⟨a†a⟩ - |⟨a⟩|² - |⟨a²⟩ - ⟨a⟩²|
/// from the Fock-basis moments of ρ_O.
pub fn quadrature_variance(rho_osc: &DensityMatrix) -> Result<QuadratureVariance> {
    let m = rho_osc.matrix();
    let dim = rho_osc.dim();
    let mut a = Complex64::new(0.0, 0.0);
    let mut a2 = Complex64::new(0.0, 0.0);
    let mut n_mean = 0.0;
    for p in 0..dim {
        n_mean += p as f64 * m[(p, p)].re;
        if p >= 1 {
            a += (p as f64).sqrt() * m[(p, p - 1)];
        }
        if p >= 2 {
            a2 += ((p * (p - 1)) as f64).sqrt() * m[(p, p - 2)];
        }
    }
    // cutoff diagnostic: the top of the grid must carry no weight
    let tail: f64 = (dim.saturating_sub(3)..dim)
        .map(|p| p as f64 * m[(p, p)].re.abs())
        .sum();
    if tail > 1e-8 * (1.0 + n_mean.abs()) {
        return Err(Error::MomentNonConvergence { tail });
    }
    Ok(variance_from_moments(a, a2, n_mean))
}

/// The same moments assembled from the frame-resolved sums: for each of the
/// four displaced-squeezed frames, ⟨a^k⟩ adds Σ F_{n,m} H^{(k)}_{n,m} with
/// H^{(k)}_{n,m} = Σ_ℓ √(ℓ!/(ℓ-k)!) ⟨ℓ|S†D†|n⟩⟨m|DS|ℓ-k⟩, and ⟨a†a⟩ the
/// matching ℓ-weighted sum. An independent route to [`quadrature_variance`].
pub fn quadrature_variance_frame_path(state: &EvolutionState) -> Result<QuadratureVariance> {
    let psi = state.frame_vectors();
    let conv = state.conversion_matrices();
    let n_levels = state.n_levels();
    let n_out = state.n_fock_out();
    let mut a = Complex64::new(0.0, 0.0);
    let mut a2 = Complex64::new(0.0, 0.0);
    let mut n_mean = 0.0;
    for q in 0..4 {
        let u = &conv[q];
        let v = &psi[q];
        for k in 1..=2usize {
            let mut acc = Complex64::new(0.0, 0.0);
            for n in 0..n_levels {
                for m in 0..n_levels {
                    let f = v[n] * v[m].conj();
                    let mut h = Complex64::new(0.0, 0.0);
                    for l in k..n_out {
                        let c = (0..k).map(|j| (l - j) as f64).product::<f64>().sqrt();
                        h += c * u[(l, n)] * u[(l - k, m)].conj();
                    }
                    acc += f * h;
                }
            }
            if k == 1 {
                a += acc;
            } else {
                a2 += acc;
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 0..n_levels {
            for m in 0..n_levels {
                let f = v[n] * v[m].conj();
                let mut j_sum = Complex64::new(0.0, 0.0);
                for l in 1..n_out {
                    j_sum += l as f64 * u[(l, n)] * u[(l, m)].conj();
                }
                acc += f * j_sum;
            }
        }
        n_mean += acc.re;
    }
    Ok(variance_from_moments(a, a2, n_mean))
}

/// Phase-space grid request for the Husimi distribution.
#[derive(Debug, Clone, Copy)]
pub struct HusimiGrid {
    pub size: usize,
    /// Grid center; defaults to ⟨a⟩ of the state.
    pub center: Option<Complex64>,
    /// Half-width of the square window; defaults to 4 + 2|⟨a⟩|.
    pub half_width: Option<f64>,
}

impl Default for HusimiGrid {
    fn default() -> Self {
        HusimiGrid {
            size: 201,
            center: None,
            half_width: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HusimiField {
    pub re_axis: Vec<f64>,
    pub im_axis: Vec<f64>,
    /// Row-major over (im, re).
    pub values: Vec<f64>,
    pub norm_riemann: f64,
    pub peak_location: Complex64,
    pub peak_value: f64,
}

/// Husimi Q(β) = ⟨β|ρ|β⟩/π on a square grid.
///
/// ρ is factored through its positive spectral part, so Q is evaluated as a
/// sum of |⟨β|v_k⟩|² — nonnegative by construction and O(rank·N) per point.
/// Fails when the Riemann sum over the grid misses unit normalization by more
/// than 1e-3, which signals a window that does not cover the support.
pub fn husimi_q(rho_osc: &DensityMatrix, grid: &HusimiGrid) -> Result<HusimiField> {
    let dim = rho_osc.dim();
    let moments = quadrature_variance(rho_osc)?;
    let center = grid.center.unwrap_or(moments.a_mean);
    let half_width = grid.half_width.unwrap_or(4.0 + 2.0 * moments.a_mean.norm());
    let size = grid.size.max(2);

    let (vals, vecs) = hermitian_eigensystem(rho_osc.matrix())?;
    let mut factors: Vec<(f64, DVector<Complex64>)> = Vec::new();
    for (i, &v) in vals.iter().enumerate() {
        if v > 1e-14 {
            factors.push((v, DVector::from_column_slice(vecs.column(i).as_slice())));
        }
    }

    let axis = |c: f64| -> Vec<f64> {
        (0..size)
            .map(|i| c - half_width + 2.0 * half_width * i as f64 / (size - 1) as f64)
            .collect()
    };
    let re_axis = axis(center.re);
    let im_axis = axis(center.im);

    let rows: Vec<Vec<f64>> = im_axis
        .par_iter()
        .map(|&y| {
            let mut row = Vec::with_capacity(size);
            let mut coh = vec![Complex64::new(0.0, 0.0); dim];
            for &x in &re_axis {
                let beta = Complex64::new(x, y);
                // coherent vector via the stable forward recurrence
                let mut c = Complex64::new((-beta.norm_sqr() / 2.0).exp(), 0.0);
                for (p, slot) in coh.iter_mut().enumerate() {
                    *slot = c;
                    c *= beta / ((p + 1) as f64).sqrt();
                }
                let mut q = 0.0;
                for (lam, v) in &factors {
                    let mut dot = Complex64::new(0.0, 0.0);
                    for p in 0..dim {
                        dot += v[p].conj() * coh[p];
                    }
                    q += lam * dot.norm_sqr();
                }
                row.push(q / std::f64::consts::PI);
            }
            row
        })
        .collect();

    let mut values = Vec::with_capacity(size * size);
    let mut peak_value = f64::NEG_INFINITY;
    let mut peak_location = center;
    for (iy, row) in rows.iter().enumerate() {
        for (ix, &q) in row.iter().enumerate() {
            if q > peak_value {
                peak_value = q;
                peak_location = Complex64::new(re_axis[ix], im_axis[iy]);
            }
            values.push(q);
        }
    }
    let cell = (2.0 * half_width / (size - 1) as f64).powi(2);
    let norm_riemann: f64 = values.iter().sum::<f64>() * cell;
    if (norm_riemann - 1.0).abs() > 1e-3 {
        return Err(Error::GridTooSmall {
            norm: norm_riemann,
            tolerance: 1e-3,
        });
    }
    Ok(HusimiField {
        re_axis,
        im_axis,
        values,
        norm_riemann,
        peak_location,
        peak_value,
    })
}

/// Revival peaks of a uniformly sampled series: local maxima that rise above
/// half of the global range and sit at least 10% of the span apart. The
/// separation rule suppresses the echo structure between major revivals.
pub fn detect_revivals(times: &[f64], values: &[f64]) -> Vec<f64> {
    assert_eq!(times.len(), values.len());
    if times.len() < 3 {
        return Vec::new();
    }
    let vmax = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let vmin = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let range = vmax - vmin;
    if range <= 1e-12 {
        return Vec::new();
    }
    let threshold = vmin + 0.5 * range;
    let min_separation = 0.1 * (times[times.len() - 1] - times[0]);
    let n = values.len();
    let mut candidates: Vec<(f64, f64)> = Vec::new();
    for i in 0..n {
        let left = if i == 0 { f64::NEG_INFINITY } else { values[i - 1] };
        let right = if i + 1 == n { f64::NEG_INFINITY } else { values[i + 1] };
        if values[i] >= left && values[i] > right && values[i] >= threshold {
            candidates.push((times[i], values[i]));
        }
    }
    candidates.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    let mut accepted: Vec<f64> = Vec::new();
    for (t, _) in candidates {
        if accepted.iter().all(|&ta| (t - ta).abs() >= min_separation) {
            accepted.push(t);
        }
    }
    accepted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    accepted
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::SubsystemLabel;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn dm4(entries: DMatrix<Complex64>) -> DensityMatrix {
        DensityMatrix::new(SubsystemLabel::TwoQubit, entries).unwrap()
    }

    fn projector(v: &Vector4<Complex64>) -> DensityMatrix {
        let m = DMatrix::from_fn(4, 4, |i, j| v[i] * v[j].conj());
        dm4(m)
    }

    fn basis_state(i: usize) -> Vector4<Complex64> {
        let mut v = Vector4::from_element(Complex64::new(0.0, 0.0));
        v[i] = Complex64::new(1.0, 0.0);
        v
    }

    fn random_density4(rng: &mut impl Rng) -> DensityMatrix {
        let a = DMatrix::from_fn(4, 4, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let m = &a * a.adjoint();
        let tr = m.trace().re;
        dm4(m.map(|z| z / tr))
    }

    #[test]
    fn inversion_basics() {
        assert_relative_eq!(population_inversion(&projector(&basis_state(0))).unwrap(), 1.0);
        let mixed = DensityMatrix::maximally_mixed(SubsystemLabel::TwoQubit, 4);
        assert_relative_eq!(population_inversion(&mixed).unwrap(), 0.0);
    }

    #[test]
    fn coherence_reference_values() {
        assert_relative_eq!(
            relative_entropy_coherence(&projector(&basis_state(0))).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = Vector4::new(
            Complex64::new(s, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(s, 0.0),
        );
        assert_relative_eq!(
            relative_entropy_coherence(&projector(&bell)).unwrap(),
            1.0,
            epsilon = 1e-10
        );
        let uniform = Vector4::from_element(Complex64::new(0.5, 0.0));
        assert_relative_eq!(
            relative_entropy_coherence(&projector(&uniform)).unwrap(),
            2.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn coherence_invariant_under_incoherent_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let rho = random_density4(&mut rng);
            let c0 = relative_entropy_coherence(&rho).unwrap();
            // C_RE <= S(rho_diag) <= log2 d
            let s_diag: f64 = {
                let d: Vec<f64> = (0..4).map(|i| rho.matrix()[(i, i)].re).collect();
                crate::qmat::entropy_of_spectrum(&d).unwrap()
            };
            assert!(c0 <= s_diag + 1e-12 && s_diag <= 2.0 + 1e-12);
            let phases: Vec<Complex64> = (0..4)
                .map(|_| Complex64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU))
                .collect();
            let rotated = DMatrix::from_fn(4, 4, |i, j| {
                phases[i] * rho.matrix()[(i, j)] * phases[j].conj()
            });
            let c1 = relative_entropy_coherence(&dm4(rotated)).unwrap();
            assert!((c0 - c1).abs() < 1e-10);
        }
    }

    #[test]
    fn bloch_reference_points() {
        let mixed = DensityMatrix::maximally_mixed(SubsystemLabel::TwoQubit, 4);
        let b = bloch_decomposition(&mixed).unwrap();
        assert!(b.a.iter().chain(b.b.iter()).all(|&x| x.abs() < 1e-14));
        assert!(b.t.iter().flatten().all(|&x| x.abs() < 1e-14));

        let b = bloch_decomposition(&projector(&basis_state(0))).unwrap();
        assert_relative_eq!(b.a[2], 1.0);
        assert_relative_eq!(b.b[2], 1.0);
        assert_relative_eq!(b.t[2][2], 1.0);
        assert!(b.t[0][0].abs() < 1e-14 && b.t[1][1].abs() < 1e-14);
    }

    #[test]
    fn bloch_reconstruction_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..25 {
            let rho = random_density4(&mut rng);
            let rec = bloch_decomposition(&rho).unwrap().reconstruct();
            let dev = (rho.matrix() - rec)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(dev < 1e-10, "roundtrip deviation {dev}");
        }
    }

    #[test]
    fn discord_and_concurrence_on_reference_states() {
        // product state: both vanish
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..5 {
            let a = Vector4::new(
                Complex64::new(rng.gen::<f64>(), 0.0),
                Complex64::new(rng.gen::<f64>(), 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            );
            // |χ⟩⊗|ξ⟩ in the (slow, fast) ordering
            let (c0, c1) = (a[0], a[1]);
            let (d0, d1) = (
                Complex64::new(rng.gen::<f64>(), rng.gen::<f64>()),
                Complex64::new(rng.gen::<f64>(), rng.gen::<f64>()),
            );
            let mut v = Vector4::new(c0 * d0, c0 * d1, c1 * d0, c1 * d1);
            v /= Complex64::new(v.norm(), 0.0);
            let rho = projector(&v);
            assert!(2.0 * geometric_discord(&rho).unwrap() < 1e-10);
            assert!(concurrence(&rho).unwrap() < 1e-10);
        }
        // Bell state: discord 1/2 (so 2D_G = 1), concurrence 1
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = Vector4::new(
            Complex64::new(s, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(s, 0.0),
        );
        let rho = projector(&bell);
        assert_relative_eq!(2.0 * geometric_discord(&rho).unwrap(), 1.0, epsilon = 1e-10);
        assert_relative_eq!(concurrence(&rho).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn discord_werner_mixture() {
        // p·Φ₊ + (1-p)/4·I at p = 1/2: a = 0, T = p·diag pattern, closed form
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = Vector4::new(
            Complex64::new(s, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(s, 0.0),
        );
        let p = 0.5;
        let m = projector(&bell).matrix() * Complex64::new(p, 0.0)
            + DMatrix::<Complex64>::identity(4, 4) * Complex64::new((1.0 - p) / 4.0, 0.0);
        let rho = dm4(m);
        // T = diag(p, -p, p) for this state; E_max = p², ‖T‖² = 3p²
        let expect = 0.25 * (3.0 * p * p - p * p);
        assert_relative_eq!(geometric_discord(&rho).unwrap(), expect, epsilon = 1e-12);
    }

    #[test]
    fn concurrence_of_bell_minus_projector() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phim = Vector4::new(
            Complex64::new(s, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -s),
        );
        assert_relative_eq!(concurrence(&projector(&phim)).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn bell_reconstruct_exact_bell_input() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phim = Vector4::new(
            Complex64::new(s, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -s),
        );
        let rec = bell_reconstruct(&projector(&phim), 0).unwrap();
        assert!(rec.d_min < 1e-6);
        assert!(rec.d_min_closed_form < 1e-7);
        assert_relative_eq!(rec.coefficients.phi_minus.re, 1.0, epsilon = 1e-6);
        assert!(rec.coefficients.phi_minus.im.abs() < 1e-6);
        assert!((rec.coefficients.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bell_reconstruct_product_state() {
        // the generalized Bell states span the space, so a pure product state
        // is itself a superposition: |1,1⟩ = (Φ₊ + Φ₋)/√2 and d_min = 0
        let rho = projector(&basis_state(0));
        let rec = bell_reconstruct(&rho, 0).unwrap();
        assert!(rec.d_min < 1e-6);
        assert!(rec.d_min_closed_form < 1e-7);
        assert!((rec.d_min - rec.d_min_closed_form).abs() < 1e-6);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((rec.coefficients.phi_plus.norm() - s).abs() < 1e-6);
        assert!((rec.coefficients.phi_minus.norm() - s).abs() < 1e-6);
    }

    #[test]
    fn bell_search_agrees_with_closed_form_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for i in 0..100 {
            let rho = random_density4(&mut rng);
            let rec = bell_reconstruct(&rho, i).unwrap();
            assert!(
                (rec.d_min - rec.d_min_closed_form).abs() < 1e-6,
                "state {i}: search {} vs closed {}",
                rec.d_min,
                rec.d_min_closed_form
            );
        }
    }

    #[test]
    fn quadrature_variance_vacuum_and_coherent() {
        let dim = 40;
        let mut vac = DMatrix::<Complex64>::zeros(dim, dim);
        vac[(0, 0)] = Complex64::new(1.0, 0.0);
        let v = quadrature_variance(
            &DensityMatrix::new(SubsystemLabel::Oscillator, vac).unwrap(),
        )
        .unwrap();
        assert_relative_eq!(v.v_min, 0.5, epsilon = 1e-12);
        assert!(!v.squeezed);

        let alpha = Complex64::new(0.9, -0.4);
        let coh = crate::oracle::coherent_vector(alpha, dim);
        let rho = DensityMatrix::new(SubsystemLabel::Oscillator, &coh * coh.adjoint()).unwrap();
        let v = quadrature_variance(&rho).unwrap();
        assert_relative_eq!(v.v_min, 0.5, epsilon = 1e-10);
        assert!((v.a_mean - alpha).norm() < 1e-10);
    }

    #[test]
    fn husimi_vacuum_gaussian() {
        let dim = 24;
        let mut vac = DMatrix::<Complex64>::zeros(dim, dim);
        vac[(0, 0)] = Complex64::new(1.0, 0.0);
        let rho = DensityMatrix::new(SubsystemLabel::Oscillator, vac).unwrap();
        let field = husimi_q(&rho, &HusimiGrid::default()).unwrap();
        let inv_pi = 1.0 / std::f64::consts::PI;
        assert!((field.peak_value - inv_pi).abs() < 1e-4);
        assert!(field.peak_location.norm() < 0.05);
        assert!((field.norm_riemann - 1.0).abs() < 1e-3);
        // pointwise bounds and the analytic Gaussian
        for (iy, &y) in field.im_axis.iter().enumerate().step_by(40) {
            for (ix, &x) in field.re_axis.iter().enumerate().step_by(40) {
                let q = field.values[iy * field.re_axis.len() + ix];
                assert!(q >= -1e-12 && q <= inv_pi + 1e-12);
                let expect = inv_pi * (-(x * x + y * y)).exp();
                assert!((q - expect).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn husimi_coherent_peak_displaced() {
        let dim = 48;
        let alpha = Complex64::new(1.4, 0.8);
        let coh = crate::oracle::coherent_vector(alpha, dim);
        let rho = DensityMatrix::new(SubsystemLabel::Oscillator, &coh * coh.adjoint()).unwrap();
        let field = husimi_q(&rho, &HusimiGrid::default()).unwrap();
        assert!((field.peak_location - alpha).norm() < 0.1);
        assert!((field.norm_riemann - 1.0).abs() < 1e-3);
    }

    #[test]
    fn revival_detection_on_cosine_and_flat_series() {
        let period = 50.0;
        let times: Vec<f64> = (0..2000).map(|i| i as f64 * 0.5).collect();
        let values: Vec<f64> = times
            .iter()
            .map(|t| (2.0 * std::f64::consts::PI * t / period).cos())
            .collect();
        let peaks = detect_revivals(&times, &values);
        // the 10%-separation rule thins the comb; survivors sit on multiples
        // of the period to grid resolution
        assert!(peaks.len() >= 3);
        for &t in &peaks {
            let nearest = (t / period).round() * period;
            assert!((t - nearest).abs() <= 0.5 + 1e-9, "peak at {t}");
        }
        let flat = vec![0.3; times.len()];
        assert!(detect_revivals(&times, &flat).is_empty());
    }
}
