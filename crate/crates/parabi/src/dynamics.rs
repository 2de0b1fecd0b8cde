//! Closed-form time evolution of the tripartite initial state in the
//! adiabatic eigenbasis, and assembly of every reduced density matrix.
//!
//! The state (cosθ|1,1⟩ + e^{iφ} sinθ|-1,-1⟩) ⊗ |α⟩ is expanded once over the
//! adiabatic eigenstates; evolution is exact phase rotation of the expansion
//! coefficients, never an ODE step. Collecting the coefficients per product
//! frame gives four oscillator-space vectors ψ_{s₁,s₂}, one per two-qubit
//! label, from which every reduced matrix follows:
//!
//!   ϱ_{s;s'}  = ψ_{s'}† 𝓜(η_{s'} - η_s) ψ_s        (two-qubit RDM)
//!   ρ_O       = Σ_s (U_s ψ_s)(U_s ψ_s)†            (oscillator RDM, Fock basis)
//!
//! with 𝓜 the displaced-number overlap kernel and U_s the frame-to-Fock
//! conversion built from ⟨n|D(η_s)S(r)|p⟩.

use crate::error::{Error, Result};
use crate::model::{
    adiabatic_level, build_frame, AdiabaticLevel, BogoliubovFrame, ModelParams,
};
use crate::qmat::{DensityMatrix, SubsystemLabel};
use crate::specfun::{
    displaced_overlap_matrix, squeezed_coherent_overlap_table, DispSqueezeTables,
};
use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::AddAssign;
use std::sync::{Arc, OnceLock};

/// Default truncation tolerance on 1 - Σ|C|².
pub const EPS_TRUNC_DEFAULT: f64 = 1e-8;
/// Positivity slack allowed on assembled reduced density matrices.
pub const POSITIVITY_TOL: f64 = 1e-6;
const FOCK_CAP: usize = 1024;

/// (cosθ|1,1⟩ + e^{iφ} sinθ|-1,-1⟩) ⊗ |α⟩.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct InitialState {
    pub theta: f64,
    pub phi: f64,
    pub alpha: Complex64,
}

#[derive(Debug, Clone, Copy)]
pub struct EvolverOptions {
    pub eps_trunc: f64,
}

impl Default for EvolverOptions {
    fn default() -> Self {
        EvolverOptions {
            eps_trunc: EPS_TRUNC_DEFAULT,
        }
    }
}

/// Everything that is fixed once the model and initial state are chosen:
/// levels, initial coefficients, and the kernel matrices for RDM assembly.
/// Built sequentially, then shared read-only across workers.
struct EvolverCore {
    params: ModelParams,
    frame: BogoliubovFrame,
    levels: Vec<AdiabaticLevel>,
    /// C¹⁺, C¹⁻, C²⁺, C²⁻ at t = 0.
    c0: [Vec<Complex64>; 4],
    residual: f64,
    /// 𝓜 kernels for the six independent off-diagonal pairs.
    k_zeta_plus: DMatrix<f64>,
    k_zeta_minus: DMatrix<f64>,
    k_two_eta11: DMatrix<f64>,
    k_two_eta1m1: DMatrix<f64>,
    n_levels: usize,
    eps_trunc: f64,
    /// Frame-to-Fock conversion U_q per qubit label plus the Fock-grid size
    /// that passed the leak bound; built on first use.
    conversion: OnceLock<([DMatrix<Complex64>; 4], usize)>,
}

#[derive(Clone)]
pub struct Evolver {
    core: Arc<EvolverCore>,
}

/// Fock count heuristic: coherent support plus squeezing-induced spreading,
/// then grown until the truncation residual passes.
fn initial_fock_count(alpha: Complex64, r: f64) -> usize {
    let a = alpha.norm();
    let base = (a * a + 10.0 * a + 25.0).ceil() as usize;
    base.max(48) + (25.0 * r).ceil() as usize + 1
}

fn build_coefficients(
    params: &ModelParams,
    frame: &BogoliubovFrame,
    init: &InitialState,
    n_levels: usize,
) -> (Vec<AdiabaticLevel>, [Vec<Complex64>; 4], f64) {
    let eta11 = frame.eta(1, 1);
    let over_p =
        squeezed_coherent_overlap_table(n_levels, frame.r, 0.0, eta11, init.alpha);
    let over_m =
        squeezed_coherent_overlap_table(n_levels, frame.r, 0.0, -eta11, init.alpha);
    let cos_t = Complex64::new(init.theta.cos(), 0.0);
    let sin_t = Complex64::from_polar(init.theta.sin(), init.phi);
    let mut levels = Vec::with_capacity(n_levels);
    let mut c = [
        Vec::with_capacity(n_levels),
        Vec::with_capacity(n_levels),
        Vec::with_capacity(n_levels),
        Vec::with_capacity(n_levels),
    ];
    let mut norm = 0.0;
    for n in 0..n_levels {
        let lv = adiabatic_level(params, frame, n);
        let x = cos_t * over_p[n] + sin_t * over_m[n];
        let y = cos_t * over_p[n] - sin_t * over_m[n];
        let c1p = x * lv.eps_minus;
        let c1m = x * lv.eps_plus;
        let c2p = y * lv.kap_minus;
        let c2m = y * lv.kap_plus;
        norm += c1p.norm_sqr() + c1m.norm_sqr() + c2p.norm_sqr() + c2m.norm_sqr();
        c[0].push(c1p);
        c[1].push(c1m);
        c[2].push(c2p);
        c[3].push(c2m);
        levels.push(lv);
    }
    (levels, c, 1.0 - norm)
}

impl Evolver {
    /// Expands the initial state over the adiabatic basis. The Fock cutoff is
    /// `params.n_max` when given (failing if the truncation residual exceeds
    /// the tolerance), otherwise grown automatically until it passes.
    pub fn new(params: &ModelParams, init: &InitialState, opts: EvolverOptions) -> Result<Self> {
        params.validate()?;
        let frame = build_frame(params)?;
        let auto = params.n_max.is_none();
        let mut n_levels = params
            .n_max
            .map(|m| m + 1)
            .unwrap_or_else(|| initial_fock_count(init.alpha, frame.r));
        let (levels, c0, residual) = loop {
            let built = build_coefficients(params, &frame, init, n_levels);
            if built.2 <= opts.eps_trunc {
                break built;
            }
            if !auto || n_levels >= FOCK_CAP {
                let suggested = (2 * n_levels).min(FOCK_CAP);
                return Err(Error::CutoffTooSmall {
                    residual: built.2,
                    tolerance: opts.eps_trunc,
                    suggested,
                });
            }
            n_levels += (n_levels / 4).max(16);
        };
        let zp = frame.zeta_plus();
        let zm = frame.zeta_minus();
        let eta11 = frame.eta(1, 1);
        let eta1m1 = frame.eta(1, -1);
        let core = EvolverCore {
            params: *params,
            frame,
            levels,
            c0,
            residual,
            k_zeta_plus: displaced_overlap_matrix(n_levels, n_levels, -zp),
            k_zeta_minus: displaced_overlap_matrix(n_levels, n_levels, -zm),
            k_two_eta11: displaced_overlap_matrix(n_levels, n_levels, -2.0 * eta11),
            k_two_eta1m1: displaced_overlap_matrix(n_levels, n_levels, 2.0 * eta1m1),
            n_levels,
            eps_trunc: opts.eps_trunc,
            conversion: OnceLock::new(),
        };
        Ok(Evolver {
            core: Arc::new(core),
        })
    }

    pub fn initial_state(&self) -> EvolutionState {
        EvolutionState {
            core: Arc::clone(&self.core),
            t: 0.0,
            coeffs: self.core.c0.clone(),
        }
    }

    pub fn state_at(&self, t: f64) -> EvolutionState {
        self.initial_state().evolve(t)
    }

    pub fn frame(&self) -> &BogoliubovFrame {
        &self.core.frame
    }

    pub fn params(&self) -> &ModelParams {
        &self.core.params
    }

    pub fn levels(&self) -> &[AdiabaticLevel] {
        &self.core.levels
    }

    /// Number of retained Fock levels (cutoff index + 1).
    pub fn n_levels(&self) -> usize {
        self.core.n_levels
    }

    /// 1 - Σ|C|² of the expansion; time independent.
    pub fn truncation_residual(&self) -> f64 {
        self.core.residual
    }
}

impl EvolverCore {
    /// Builds the frame-to-Fock conversions, growing the output grid until
    /// the coefficient-weighted unitarity leak of the truncated columns is
    /// negligible against the truncation tolerance. Squeezed frames spread
    /// their Fock support like cosh(2r)·n, so the window is r-dependent.
    fn conversion_matrices(&self) -> &([DMatrix<Complex64>; 4], usize) {
        self.conversion.get_or_init(|| {
            // |ψ_q[n]|² <= 4 Σ_j |C_{j,n}|² for each of the four frames
            let weights: Vec<f64> = (0..self.n_levels)
                .map(|n| 4.0 * self.c0.iter().map(|c| c[n].norm_sqr()).sum::<f64>())
                .collect();
            let r2 = 2.0 * self.frame.r;
            let mut n_out =
                (self.n_levels as f64 * r2.cosh()).ceil() as usize + 32;
            let target = 0.25 * self.eps_trunc.min(1e-8);
            loop {
                let build = |s1: i8, s2: i8| -> DMatrix<Complex64> {
                    let eta = self.frame.eta(s1, s2);
                    let tables = DispSqueezeTables::new(
                        Complex64::new(eta, 0.0),
                        Complex64::new(self.frame.r, 0.0),
                        n_out.max(self.n_levels),
                    );
                    // U[p, n] = ⟨p|S†(r)D†(η)|n⟩ = conj(⟨n|D(η)S(r)|p⟩)
                    DMatrix::from_fn(n_out, self.n_levels, |p, n| {
                        tables.element(n, p).conj()
                    })
                };
                let mats = [build(1, 1), build(-1, 1), build(1, -1), build(-1, -1)];
                let mut leak_bound = 0.0;
                for u in &mats {
                    for (n, &w) in weights.iter().enumerate() {
                        let col = u.column(n).norm_squared();
                        leak_bound += w * (1.0 - col).max(0.0);
                    }
                }
                if leak_bound <= target || n_out >= 4 * FOCK_CAP {
                    return (mats, n_out);
                }
                n_out += (n_out / 4).max(32);
            }
        })
    }
}

/// The time-dependent coefficient table C^±_{j,n}(t) defining |ψ(t)⟩.
#[derive(Clone)]
pub struct EvolutionState {
    core: Arc<EvolverCore>,
    t: f64,
    coeffs: [Vec<Complex64>; 4],
}

impl EvolutionState {
    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn truncation_residual(&self) -> f64 {
        self.core.residual
    }

    pub fn n_levels(&self) -> usize {
        self.core.n_levels
    }

    /// Coefficient table in the order C¹⁺, C¹⁻, C²⁺, C²⁻.
    pub fn coefficients(&self) -> &[Vec<Complex64>; 4] {
        &self.coeffs
    }

    /// Σ|C|² over the whole table.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|v| v.iter())
            .map(|c| c.norm_sqr())
            .sum()
    }

    /// Advances by Δt: pure phase rotation with the adiabatic energies.
    pub fn evolve(&self, dt: f64) -> EvolutionState {
        let mut coeffs = self.coeffs.clone();
        for (n, lv) in self.core.levels.iter().enumerate() {
            let energies = [lv.e1_plus, lv.e1_minus, lv.e2_plus, lv.e2_minus];
            for (table, e) in coeffs.iter_mut().zip(energies) {
                table[n] *= Complex64::from_polar(1.0, -e * dt);
            }
        }
        EvolutionState {
            core: Arc::clone(&self.core),
            t: self.t + dt,
            coeffs,
        }
    }

    /// Oscillator-space amplitude vectors ψ_{s₁,s₂}, ordered like
    /// [`crate::model::QUBIT_SIGNS`]. ψ collects the product-basis weight of each two-qubit
    /// label across the adiabatic families:
    ///   ψ_{±1,±1}  = C̃¹⁺ ± C̃²⁺,
    ///   ψ_{∓1,±1}  = sgn(Γ₊) C̃¹⁻ ± sgn(Γ₋) C̃²⁻.
    pub fn frame_vectors(&self) -> [DVector<Complex64>; 4] {
        let n = self.core.n_levels;
        let mut psi = [
            DVector::zeros(n),
            DVector::zeros(n),
            DVector::zeros(n),
            DVector::zeros(n),
        ];
        for (i, lv) in self.core.levels.iter().enumerate() {
            let c1p = self.coeffs[0][i];
            let c1m = self.coeffs[1][i];
            let c2p = self.coeffs[2][i];
            let c2m = self.coeffs[3][i];
            let t1p = lv.eps_minus * c1p + lv.eps_plus * c1m;
            let t1m = lv.eps_plus * c1p - lv.eps_minus * c1m;
            let t2p = lv.kap_minus * c2p + lv.kap_plus * c2m;
            let t2m = lv.kap_plus * c2p - lv.kap_minus * c2m;
            let g1 = lv.sign_gamma_plus;
            let g2 = lv.sign_gamma_minus;
            psi[0][i] = t1p + t2p; // |1,1⟩
            psi[1][i] = g1 * t1m + g2 * t2m; // |-1,1⟩
            psi[2][i] = g1 * t1m - g2 * t2m; // |1,-1⟩
            psi[3][i] = t1p - t2p; // |-1,-1⟩
        }
        psi
    }

    /// Two-qubit reduced density matrix in the basis of [`crate::model::QUBIT_SIGNS`].
    /// Hermitian by construction (conjugate pairs filled, not recomputed).
    pub fn two_qubit_rdm(&self) -> Result<DensityMatrix> {
        let psi = self.frame_vectors();
        let core = &*self.core;
        let mut rho = DMatrix::<Complex64>::zeros(4, 4);
        for q in 0..4 {
            rho[(q, q)] = Complex64::new(psi[q].norm_squared(), 0.0);
        }
        // ϱ_{s;s'} = ψ_{s'}† 𝓜(η_{s'} - η_s) ψ_s
        let pairs: [(usize, usize, &DMatrix<f64>); 6] = [
            (0, 1, &core.k_zeta_plus),
            (0, 2, &core.k_zeta_minus),
            (0, 3, &core.k_two_eta11),
            (1, 2, &core.k_two_eta1m1),
            (1, 3, &core.k_zeta_minus),
            (2, 3, &core.k_zeta_plus),
        ];
        for (s, sp, kernel) in pairs {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..core.n_levels {
                let mut row = Complex64::new(0.0, 0.0);
                for n in 0..core.n_levels {
                    row += kernel[(m, n)] * psi[s][n];
                }
                acc += psi[sp][m].conj() * row;
            }
            rho[(s, sp)] = acc;
            rho[(sp, s)] = acc.conj();
        }
        let dm = DensityMatrix::new(SubsystemLabel::TwoQubit, rho)?;
        let min_eig = dm.min_eigenvalue();
        if min_eig < -POSITIVITY_TOL {
            return Err(Error::PositivityViolation {
                eigenvalue: min_eig,
                tolerance: POSITIVITY_TOL,
            });
        }
        Ok(dm)
    }

    /// Frame amplitudes converted to the bare Fock grid: w_q = U_q ψ_q.
    pub(crate) fn fock_frame_vectors(&self) -> [DVector<Complex64>; 4] {
        let psi = self.frame_vectors();
        let (conv, _) = self.core.conversion_matrices();
        [
            &conv[0] * &psi[0],
            &conv[1] * &psi[1],
            &conv[2] * &psi[2],
            &conv[3] * &psi[3],
        ]
    }

    pub(crate) fn conversion_matrices(&self) -> &[DMatrix<Complex64>; 4] {
        &self.core.conversion_matrices().0
    }

    /// |ψ(t)⟩ in the product basis |s₁,s₂⟩⊗|p⟩, qubit-major, with the
    /// oscillator expressed on the extended Fock grid.
    pub fn product_basis_state_vector(&self) -> DVector<Complex64> {
        let w = self.fock_frame_vectors();
        let n_out = self.n_fock_out();
        let mut psi = DVector::zeros(4 * n_out);
        for q in 0..4 {
            for p in 0..n_out {
                psi[q * n_out + p] = w[q][p];
            }
        }
        psi
    }

    /// Extended Fock grid size used for oscillator-side outputs.
    pub fn n_fock_out(&self) -> usize {
        self.core.conversion_matrices().1
    }

    /// Oscillator reduced density matrix ρ_O(t) in the bare Fock basis.
    pub fn oscillator_rdm(&self) -> Result<DensityMatrix> {
        let w = self.fock_frame_vectors();
        let n_out = self.n_fock_out();
        let mut rho = DMatrix::<Complex64>::zeros(n_out, n_out);
        for wq in &w {
            rho += wq * wq.adjoint();
        }
        DensityMatrix::new(SubsystemLabel::Oscillator, rho)
    }

    /// Qubit-oscillator reduced density matrix ϖ(t) = Tr_{Q₂} |ψ⟩⟨ψ| on the
    /// grid |s₁⟩⊗|p⟩, qubit-major.
    pub fn qubit_osc_rdm(&self) -> Result<DensityMatrix> {
        let w = self.fock_frame_vectors();
        let n_out = self.n_fock_out();
        let dim = 2 * n_out;
        let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
        // s₁ = +1 carries frames (1,1) and (1,-1); s₁ = -1 the other two
        let plus = [0usize, 2];
        let minus = [1usize, 3];
        // same-s₂ cross terms survive the trace over qubit 2:
        // (1,1)↔(-1,1) and (1,-1)↔(-1,-1)
        let cross: [(usize, usize); 2] = [(0, 1), (2, 3)];
        for q in plus {
            let block = &w[q] * w[q].adjoint();
            rho.view_mut((0, 0), (n_out, n_out)).add_assign(&block);
        }
        for q in minus {
            let block = &w[q] * w[q].adjoint();
            rho.view_mut((n_out, n_out), (n_out, n_out)).add_assign(&block);
        }
        for (qp, qm) in cross {
            let block = &w[qp] * w[qm].adjoint();
            rho.view_mut((0, n_out), (n_out, n_out)).add_assign(&block);
        }
        for p in 0..n_out {
            for pp in 0..n_out {
                rho[(n_out + p, pp)] = rho[(pp, n_out + p)].conj();
            }
        }
        DensityMatrix::new(SubsystemLabel::QubitOscillator, rho)
    }
}

/// The two single-qubit reduced matrices, as element sums of the two-qubit
/// RDM (first and second return value match the ϱ_{Q₁}, ϱ_{Q₂} convention of
/// the 4x4 ordering).
pub fn single_qubit_rdms(rho4: &DensityMatrix) -> Result<(DensityMatrix, DensityMatrix)> {
    if rho4.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho4.dim(),
        });
    }
    let m = rho4.matrix();
    let q1 = Matrix2::new(
        m[(0, 0)] + m[(1, 1)],
        m[(0, 2)] + m[(1, 3)],
        (m[(0, 2)] + m[(1, 3)]).conj(),
        m[(2, 2)] + m[(3, 3)],
    );
    let q2 = Matrix2::new(
        m[(0, 0)] + m[(2, 2)],
        m[(0, 1)] + m[(2, 3)],
        (m[(0, 1)] + m[(2, 3)]).conj(),
        m[(1, 1)] + m[(3, 3)],
    );
    let to_dm = |m2: Matrix2<Complex64>| {
        DensityMatrix::new(
            SubsystemLabel::Qubit,
            DMatrix::from_fn(2, 2, |i, j| m2[(i, j)]),
        )
    };
    Ok((to_dm(q1)?, to_dm(q2)?))
}
