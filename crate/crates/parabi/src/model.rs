//! Hamiltonian parameters, the Bogoliubov oscillator frame, and the
//! block-diagonal adiabatic spectrum with its eigenbasis coefficients.
//!
//! The model is H = ω a†a + Σ_j (Δ_j/2 σ_j^z + λ_j σ_j^x (a†+a)) + g(a†²+a²),
//! in the σ^x product basis ordered {|1,1⟩, |-1,1⟩, |1,-1⟩, |-1,-1⟩}. With the
//! qubit splittings frozen, the oscillator sector is diagonalized exactly by a
//! displacement and a squeeze; the residual Δ terms are kept block-diagonal in
//! the dressed number index n.

use crate::error::{Error, Result};
use crate::specfun;
use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

/// Qubit splittings at or above this fraction of ω degrade the adiabatic
/// treatment; the flag is advisory, not an error.
pub const ADIABATIC_WARNING_RATIO: f64 = 0.25;

/// Two-qubit basis order {|1,1⟩, |-1,1⟩, |1,-1⟩, |-1,-1⟩} used everywhere a
/// 4x4 matrix or a four-way frame split appears.
pub const QUBIT_SIGNS: [(i8, i8); 4] = [(1, 1), (-1, 1), (1, -1), (-1, -1)];

/// All Hamiltonian constants, in units of the oscillator frequency.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ModelParams {
    /// Oscillator frequency; sets the unit (default 1).
    #[serde(default = "default_omega")]
    pub omega: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub g: f64,
    /// Fock cutoff; chosen adaptively when absent.
    #[serde(default)]
    pub n_max: Option<usize>,
}

fn default_omega() -> f64 {
    1.0
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if !self.omega.is_finite() || self.omega <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "omega must be positive, got {}",
                self.omega
            )));
        }
        if self.g >= self.omega / 2.0 {
            return Err(Error::SpectralCollapse {
                g: self.g,
                limit: self.omega / 2.0,
            });
        }
        for (name, v) in [
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("g", self.g),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    pub fn delta_sum(&self) -> f64 {
        self.delta1 + self.delta2
    }

    pub fn delta_diff(&self) -> f64 {
        self.delta1 - self.delta2
    }

    pub fn lambda_sum(&self) -> f64 {
        self.lambda1 + self.lambda2
    }

    pub fn lambda_diff(&self) -> f64 {
        self.lambda1 - self.lambda2
    }

    /// λ_{s₁,s₂} = λ₁ s₁ + λ₂ s₂.
    pub fn lambda_branch(&self, s1: i8, s2: i8) -> f64 {
        self.lambda1 * s1 as f64 + self.lambda2 * s2 as f64
    }

    /// True when either qubit splitting is large enough that the adiabatic
    /// approximation visibly degrades.
    pub fn adiabatic_warning(&self) -> bool {
        self.delta1.abs() >= ADIABATIC_WARNING_RATIO * self.omega
            || self.delta2.abs() >= ADIABATIC_WARNING_RATIO * self.omega
    }

    pub fn is_symmetric(&self) -> bool {
        self.delta1 == self.delta2 && self.lambda1 == self.lambda2
    }
}

/// Oscillator-frame quantities derived from the parametric term.
#[derive(Debug, Clone, Copy)]
pub struct BogoliubovFrame {
    /// Dressed frequency Ω = √(ω² - 4g²).
    pub omega_dressed: f64,
    /// Squeeze magnitude r = arccosh √((ω+Ω)/2Ω).
    pub r: f64,
    pub mu: f64,
    pub nu: f64,
    /// Λ = 2λ₁λ₂/(ω + 2g), the cross-coupling energy of the dressed blocks.
    pub lambda_cross: f64,
    /// Displacement per unit coupling: η_{s₁,s₂} = disp_scale · λ_{s₁,s₂}.
    pub disp_scale: f64,
    lambda1: f64,
    lambda2: f64,
    omega: f64,
}

impl BogoliubovFrame {
    /// η_{s₁,s₂}; odd under (s₁,s₂) → (-s₁,-s₂).
    pub fn eta(&self, s1: i8, s2: i8) -> f64 {
        self.disp_scale * (self.lambda1 * s1 as f64 + self.lambda2 * s2 as f64)
    }

    /// Frame displacement for a single coupling λ (the η_{1,0} of the
    /// equal-coupling revival analysis).
    pub fn eta_single(&self, lambda: f64) -> f64 {
        self.disp_scale * lambda
    }

    /// ζ₊ = η_{1,1} - η_{-1,1} = 2 disp_scale λ₁.
    pub fn zeta_plus(&self) -> f64 {
        2.0 * self.disp_scale * self.lambda1
    }

    /// ζ₋ = η_{1,1} - η_{1,-1} = 2 disp_scale λ₂.
    pub fn zeta_minus(&self) -> f64 {
        2.0 * self.disp_scale * self.lambda2
    }

    /// Ω/ω; approaches zero at the spectral collapse.
    pub fn collapse_proximity(&self) -> f64 {
        self.omega_dressed / self.omega
    }

    /// True when the dressed frequency has dropped below 15% of ω; results
    /// are still finite but squeezing is strong and cutoffs grow quickly.
    pub fn near_collapse(&self) -> bool {
        self.collapse_proximity() < 0.15
    }
}

/// Builds the dressed oscillator frame. Fails for g ≥ ω/2, where the
/// oscillator spectrum collapses and the discrete treatment no longer applies.
pub fn build_frame(params: &ModelParams) -> Result<BogoliubovFrame> {
    params.validate()?;
    let (omega, g) = (params.omega, params.g);
    let dressed = (omega * omega - 4.0 * g * g).sqrt();
    let ratio = ((omega + dressed) / (2.0 * dressed)).sqrt();
    let r = (ratio + (ratio * ratio - 1.0).max(0.0).sqrt()).ln();
    // (ω - Ω)/(2g) rewritten as 2g/(ω + Ω): exact, and finite at g = 0
    let disp_scale = ratio * (1.0 + 2.0 * g / (omega + dressed)) / (omega + 2.0 * g);
    Ok(BogoliubovFrame {
        omega_dressed: dressed,
        r,
        mu: r.cosh(),
        nu: r.sinh(),
        lambda_cross: 2.0 * params.lambda1 * params.lambda2 / (omega + 2.0 * g),
        disp_scale,
        lambda1: params.lambda1,
        lambda2: params.lambda2,
        omega,
    })
}

/// Dressed oscillator energy E_n^{s₁,s₂} = (n+1/2)Ω - ω/2 - λ²_{s₁,s₂}/(ω+2g).
pub fn oscillator_energy(params: &ModelParams, frame: &BogoliubovFrame, n: usize, s1: i8, s2: i8) -> f64 {
    let lam = params.lambda_branch(s1, s2);
    (n as f64 + 0.5) * frame.omega_dressed - params.omega / 2.0
        - lam * lam / (params.omega + 2.0 * params.g)
}

/// Per-block energies and eigenbasis coefficients.
#[derive(Debug, Clone, Copy)]
pub struct AdiabaticLevel {
    pub n: usize,
    /// E_n^{1,1} (equal to E_n^{-1,-1}).
    pub e11: f64,
    /// Δ_{1,n} = (Δ₁/2) e^{-ζ₊²/2} L_n(ζ₊²).
    pub delta1n: f64,
    /// Δ_{2,n} = (Δ₂/2) e^{-ζ₋²/2} L_n(ζ₋²).
    pub delta2n: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub chi_plus: f64,
    pub chi_minus: f64,
    /// {𝓔₁ₙ⁺, 𝓔₁ₙ⁻, 𝓔₂ₙ⁺, 𝓔₂ₙ⁻}.
    pub e1_plus: f64,
    pub e1_minus: f64,
    pub e2_plus: f64,
    pub e2_minus: f64,
    pub eps_plus: f64,
    pub eps_minus: f64,
    pub kap_plus: f64,
    pub kap_minus: f64,
    /// sign(Γ±,n) with sign(0) := +1.
    pub sign_gamma_plus: f64,
    pub sign_gamma_minus: f64,
}

fn sign_pos(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Mixing coefficients ½√((χ ± Λ)/χ); both ½ in the degenerate χ → 0 limit.
fn mixing_pair(chi: f64, lambda_cross: f64) -> (f64, f64) {
    if chi <= 0.0 {
        return (0.5, 0.5);
    }
    (
        0.5 * ((chi + lambda_cross) / chi).sqrt(),
        0.5 * (((chi - lambda_cross) / chi).max(0.0)).sqrt(),
    )
}

/// Adiabatic energies and basis coefficients of block n.
pub fn adiabatic_level(params: &ModelParams, frame: &BogoliubovFrame, n: usize) -> AdiabaticLevel {
    let zp = frame.zeta_plus();
    let zm = frame.zeta_minus();
    let delta1n = params.delta1 / 2.0
        * specfun::displaced_overlap(specfun::OverlapKernelArgs { m: n, n, x: -zp });
    let delta2n = params.delta2 / 2.0
        * specfun::displaced_overlap(specfun::OverlapKernelArgs { m: n, n, x: -zm });
    let gamma_plus = delta1n + delta2n;
    let gamma_minus = delta1n - delta2n;
    let lc = frame.lambda_cross;
    let chi_plus = (gamma_plus * gamma_plus + lc * lc).sqrt();
    let chi_minus = (gamma_minus * gamma_minus + lc * lc).sqrt();
    let e11 = oscillator_energy(params, frame, n, 1, 1);
    let (eps_plus, eps_minus) = mixing_pair(chi_plus, lc);
    let (kap_plus, kap_minus) = mixing_pair(chi_minus, lc);
    AdiabaticLevel {
        n,
        e11,
        delta1n,
        delta2n,
        gamma_plus,
        gamma_minus,
        chi_plus,
        chi_minus,
        e1_plus: e11 + lc + chi_plus,
        e1_minus: e11 + lc - chi_plus,
        e2_plus: e11 + lc + chi_minus,
        e2_minus: e11 + lc - chi_minus,
        eps_plus,
        eps_minus,
        kap_plus,
        kap_minus,
        sign_gamma_plus: sign_pos(gamma_plus),
        sign_gamma_minus: sign_pos(gamma_minus),
    }
}

impl AdiabaticLevel {
    pub fn energies(&self) -> [f64; 4] {
        [self.e1_plus, self.e1_minus, self.e2_plus, self.e2_minus]
    }

    /// The four eigenvectors as columns of a 4x4 orthogonal matrix in the
    /// block basis {|1,1⟩, |-1,1⟩, |1,-1⟩, |-1,-1⟩}, column order matching
    /// [`AdiabaticLevel::energies`].
    pub fn basis_columns(&self) -> Matrix4<f64> {
        let (ep, em) = (self.eps_plus, self.eps_minus);
        let (kp, km) = (self.kap_plus, self.kap_minus);
        let (sp, sm) = (self.sign_gamma_plus, self.sign_gamma_minus);
        Matrix4::from_columns(&[
            // |𝓔₁ₙ⁺⟩ = ε₋(e1+e4) + sgn(Γ₊) ε₊(e2+e3)
            nalgebra::Vector4::new(em, sp * ep, sp * ep, em),
            // |𝓔₁ₙ⁻⟩ = ε₊(e1+e4) - sgn(Γ₊) ε₋(e2+e3)
            nalgebra::Vector4::new(ep, -sp * em, -sp * em, ep),
            // |𝓔₂ₙ⁺⟩ = κ₋(e1-e4) + sgn(Γ₋) κ₊(e2-e3)
            nalgebra::Vector4::new(km, sm * kp, -sm * kp, -km),
            // |𝓔₂ₙ⁻⟩ = κ₊(e1-e4) - sgn(Γ₋) κ₋(e2-e3)
            nalgebra::Vector4::new(kp, -sm * km, sm * km, -kp),
        ])
    }
}

/// The 4x4 Hamiltonian block of Fock index n in the dressed basis.
pub fn adiabatic_block(params: &ModelParams, frame: &BogoliubovFrame, n: usize) -> Matrix4<f64> {
    let lv = adiabatic_level(params, frame, n);
    let shifted = lv.e11 + 2.0 * frame.lambda_cross;
    Matrix4::new(
        lv.e11, lv.delta1n, lv.delta2n, 0.0, //
        lv.delta1n, shifted, 0.0, lv.delta2n, //
        lv.delta2n, 0.0, shifted, lv.delta1n, //
        0.0, lv.delta2n, lv.delta1n, lv.e11,
    )
}

/// Linear-in-n approximate energies, valid for ζ±² ≪ 1: the Laguerre factors
/// are expanded to first order and χ is expanded around its n = 0 value.
/// Returns the energies in the order of [`AdiabaticLevel::energies`] plus a
/// flag set when ζ² > 0.2 and the expansion should not be trusted.
pub fn approx_levels_small_zeta(
    params: &ModelParams,
    frame: &BogoliubovFrame,
    n: usize,
) -> ([f64; 4], bool) {
    let zp2 = frame.zeta_plus().powi(2);
    let zm2 = frame.zeta_minus().powi(2);
    let warn = zp2 > 0.2 || zm2 > 0.2;
    let d10 = params.delta1 / 2.0 * (-zp2 / 2.0).exp();
    let d20 = params.delta2 / 2.0 * (-zm2 / 2.0).exp();
    let lc = frame.lambda_cross;
    let e11 = oscillator_energy(params, frame, n, 1, 1);
    let nf = n as f64;
    let chi_approx = |gamma0: f64, slope: f64| -> f64 {
        if gamma0 == 0.0 && lc == 0.0 {
            return 0.0;
        }
        gamma0 + lc - gamma0 / (gamma0 + lc) * (lc + slope * nf)
    };
    let chi_p = chi_approx(d10 + d20, zp2 * d10 + zm2 * d20);
    let chi_m = chi_approx(d10 - d20, zp2 * d10 - zm2 * d20);
    (
        [
            e11 + lc + chi_p,
            e11 + lc - chi_p,
            e11 + lc + chi_m,
            e11 + lc - chi_m,
        ],
        warn,
    )
}

/// k-th revival time of the population inversion, ωt_R = 2πk/((2η₁₀)² Δ̃) with
/// Δ̃ = Δ e^{-2η₁₀²}. Only derived for the symmetric configuration.
pub fn revival_time_estimate(
    params: &ModelParams,
    frame: &BogoliubovFrame,
    k: u32,
) -> Result<f64> {
    if !params.is_symmetric() {
        return Err(Error::UnsupportedConfiguration);
    }
    if k == 0 {
        return Ok(0.0);
    }
    let eta10 = frame.eta_single(params.lambda1);
    let dtilde = params.delta1 * (-2.0 * eta10 * eta10).exp();
    Ok(2.0 * std::f64::consts::PI * k as f64 / ((2.0 * eta10).powi(2) * dtilde))
}

#[cfg(test)]
mod tests {
    use super::*;
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
    fn frame_reduces_at_zero_parametric_strength() {
        let p = params(0.1, 0.1, 0.015, 0.015, 0.0);
        let f = build_frame(&p).unwrap();
        assert_relative_eq!(f.omega_dressed, 1.0, epsilon = 1e-14);
        assert_relative_eq!(f.r, 0.0, epsilon = 1e-14);
        assert_relative_eq!(f.mu, 1.0, epsilon = 1e-14);
        assert_relative_eq!(f.nu, 0.0, epsilon = 1e-14);
        assert_relative_eq!(f.eta(1, 1), 0.03, epsilon = 1e-14);
        assert_relative_eq!(f.eta(-1, -1), -0.03, epsilon = 1e-14);
        assert_relative_eq!(f.lambda_cross, 2.0 * 0.015 * 0.015, epsilon = 1e-16);
    }

    #[test]
    fn frame_dressed_frequency() {
        let p = params(0.1, 0.1, 0.02, 0.02, 0.3);
        let f = build_frame(&p).unwrap();
        assert_relative_eq!(f.omega_dressed, 0.8, epsilon = 1e-14);
        // r = arccosh sqrt((1 + 0.8) / 1.6)
        let expect = ((1.8f64 / 1.6).sqrt()).acosh();
        assert_relative_eq!(f.r, expect, epsilon = 1e-12);
    }

    #[test]
    fn frame_near_collapse_is_finite_and_monotone() {
        let p = params(0.05, 0.05, 0.01, 0.01, 0.4999);
        let f = build_frame(&p).unwrap();
        assert!(f.r > 2.0, "strong squeezing expected, r = {}", f.r);
        assert!(f.eta(1, 1).is_finite());
        assert!(f.near_collapse());
        assert!(!p.adiabatic_warning());
        // Ω decreases monotonically as g rises toward ω/2
        let mut last = f64::INFINITY;
        for i in 0..50 {
            let g = 0.5 * i as f64 / 50.0;
            let f = build_frame(&params(0.1, 0.1, 0.01, 0.01, g)).unwrap();
            assert!(f.omega_dressed < last);
            last = f.omega_dressed;
        }
    }

    #[test]
    fn collapse_regime_rejected() {
        assert!(matches!(
            build_frame(&params(0.1, 0.1, 0.01, 0.01, 0.5)),
            Err(Error::SpectralCollapse { .. })
        ));
    }

    #[test]
    fn eta_antisymmetry_and_g0_reduction() {
        let p = params(0.1, 0.08, 0.03, 0.05, 0.2);
        let f = build_frame(&p).unwrap();
        for (s1, s2) in [(1i8, 1i8), (1, -1), (-1, 1), (-1, -1)] {
            assert_relative_eq!(f.eta(s1, s2), -f.eta(-s1, -s2), epsilon = 1e-15);
        }
        let f0 = build_frame(&params(0.1, 0.08, 0.03, 0.05, 0.0)).unwrap();
        assert_relative_eq!(f0.eta(1, -1), (0.03 - 0.05) / 1.0, epsilon = 1e-14);
        assert_relative_eq!(f0.mu, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn block_reduces_when_couplings_vanish() {
        let p = params(0.12, 0.07, 0.0, 0.0, 0.0);
        let f = build_frame(&p).unwrap();
        let b = adiabatic_block(&p, &f, 3);
        assert_relative_eq!(b[(0, 1)], 0.06, epsilon = 1e-14);
        assert_relative_eq!(b[(0, 2)], 0.035, epsilon = 1e-14);
        assert_relative_eq!(b[(1, 1)], b[(0, 0)], epsilon = 1e-14);
    }

    #[test]
    fn block_n0_offdiagonals_use_laguerre_unity() {
        let p = params(0.1, 0.08, 0.03, 0.02, 0.1);
        let f = build_frame(&p).unwrap();
        let lv = adiabatic_level(&p, &f, 0);
        let zp2 = f.zeta_plus().powi(2);
        let zm2 = f.zeta_minus().powi(2);
        assert_relative_eq!(lv.delta1n, 0.05 * (-zp2 / 2.0).exp(), epsilon = 1e-13);
        assert_relative_eq!(lv.delta2n, 0.04 * (-zm2 / 2.0).exp(), epsilon = 1e-13);
    }

    #[test]
    fn closed_form_energies_match_block_eigenvalues() {
        for (p, nmax) in [
            (params(0.1, 0.08, 0.02, 0.04, 0.0), 12),
            (params(0.2, 0.15, 0.32, 0.17, 0.0), 12),
            (params(0.08, 0.08, 0.06, 0.06, 0.1), 12),
            (params(0.1, 0.1, 0.05, 0.05, 0.3), 12),
        ] {
            let f = build_frame(&p).unwrap();
            for n in 0..=nmax {
                let lv = adiabatic_level(&p, &f, n);
                let mut closed = lv.energies().to_vec();
                closed.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let mut eig: Vec<f64> = adiabatic_block(&p, &f, n)
                    .symmetric_eigenvalues()
                    .iter()
                    .copied()
                    .collect();
                eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
                for (c, e) in closed.iter().zip(eig.iter()) {
                    assert!((c - e).abs() < 1e-10, "n={n}: {c} vs {e}");
                }
            }
        }
    }

    #[test]
    fn equal_coupling_second_family_splits_by_lambda_cross() {
        // 𝓔₂ₙ± = E_n^{1,1} + Λ ± Λ in the symmetric configuration
        let p = params(0.1, 0.1, 0.015, 0.015, 0.0);
        let f = build_frame(&p).unwrap();
        for n in 0..6 {
            let lv = adiabatic_level(&p, &f, n);
            assert_relative_eq!(lv.e2_plus, lv.e11 + 2.0 * f.lambda_cross, epsilon = 1e-13);
            assert_relative_eq!(lv.e2_minus, lv.e11, epsilon = 1e-13);
        }
    }

    #[test]
    fn coefficient_normalization() {
        let p = params(0.1, 0.08, 0.03, 0.05, 0.25);
        let f = build_frame(&p).unwrap();
        for n in 0..20 {
            let lv = adiabatic_level(&p, &f, n);
            assert_relative_eq!(
                lv.eps_plus.powi(2) + lv.eps_minus.powi(2),
                0.5,
                epsilon = 1e-12
            );
            assert_relative_eq!(
                lv.kap_plus.powi(2) + lv.kap_minus.powi(2),
                0.5,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn adiabatic_basis_is_orthonormal_and_diagonalizes_block() {
        for p in [
            params(0.1, 0.08, 0.02, 0.04, 0.0),
            params(0.2, 0.15, 0.32, 0.17, 0.0),
            params(0.1, 0.1, 0.015, 0.015, 0.0), // Γ₋ = 0: sign(0) = +1 path
            params(0.08, 0.06, 0.03, 0.05, 0.2),
        ] {
            let f = build_frame(&p).unwrap();
            for n in 0..8 {
                let lv = adiabatic_level(&p, &f, n);
                let v = lv.basis_columns();
                let gram = v.transpose() * v;
                let dev = (gram - Matrix4::identity()).abs().max();
                assert!(dev < 1e-12, "orthonormality dev {dev}");
                // eigenvector property: B v_i = E_i v_i
                let b = adiabatic_block(&p, &f, n);
                for (i, &e) in lv.energies().iter().enumerate() {
                    let resid = (b * v.column(i) - e * v.column(i)).abs().max();
                    assert!(resid < 1e-12, "n={n} col {i} residual {resid}");
                }
            }
        }
    }

    #[test]
    fn approx_levels_reduce_and_converge_at_fourth_order() {
        // Λ = 0 configuration: at n = 0 the expansion equals the closed form
        let p = params(0.1, 0.0, 0.03, 0.0, 0.0);
        let f = build_frame(&p).unwrap();
        let (approx, warn) = approx_levels_small_zeta(&p, &f, 0);
        assert!(!warn);
        let lv = adiabatic_level(&p, &f, 0);
        for (a, e) in approx.iter().zip(lv.energies().iter()) {
            assert_relative_eq!(a, e, epsilon = 1e-12);
        }
        // n = 3: error scales like ζ⁴ (ratio ≈ 16 when ζ is halved)
        let err = |l1: f64| -> f64 {
            let p = params(0.1, 0.0, l1, 0.0, 0.0);
            let f = build_frame(&p).unwrap();
            let lv = adiabatic_level(&p, &f, 3);
            let (a, _) = approx_levels_small_zeta(&p, &f, 3);
            (a[0] - lv.e1_plus).abs()
        };
        let e1 = err(0.04);
        let e2 = err(0.02);
        let ratio = e1 / e2;
        assert!(
            (8.0..40.0).contains(&ratio),
            "expected ~16x error reduction, got {ratio}"
        );
    }

    #[test]
    fn approx_levels_equal_coupling_matches_reduced_form() {
        // symmetric case: 𝓔₁ₙ± = E + Λ ± (Δ̃ + Λ - Δ̃/(Δ̃+Λ)(Λ + 4η₁₀²Δ̃ n))
        let p = params(0.1, 0.1, 0.015, 0.015, 0.0);
        let f = build_frame(&p).unwrap();
        let eta10 = f.eta_single(p.lambda1);
        let dt = p.delta1 * (-2.0 * eta10 * eta10).exp();
        let lc = f.lambda_cross;
        for n in 0..5 {
            let (a, _) = approx_levels_small_zeta(&p, &f, n);
            let e11 = oscillator_energy(&p, &f, n, 1, 1);
            let chi = dt + lc - dt / (dt + lc) * (lc + 4.0 * eta10 * eta10 * dt * n as f64);
            assert_relative_eq!(a[0], e11 + lc + chi, epsilon = 1e-12);
            // second family collapses to E + Λ ± Λ
            assert_relative_eq!(a[2], e11 + 2.0 * lc, epsilon = 1e-12);
            assert_relative_eq!(a[3], e11, epsilon = 1e-12);
        }
    }

    #[test]
    fn revival_times_match_reported_values() {
        let p = params(0.1, 0.1, 0.015, 0.015, 0.0);
        let f = build_frame(&p).unwrap();
        assert_eq!(revival_time_estimate(&p, &f, 0).unwrap(), 0.0);
        let t1 = revival_time_estimate(&p, &f, 1).unwrap();
        let t2 = revival_time_estimate(&p, &f, 2).unwrap();
        assert!((t1 - 6.975e4).abs() / 6.975e4 < 0.01, "t1 = {t1}");
        assert!((t2 - 13.980e4).abs() / 13.980e4 < 0.01, "t2 = {t2}");
    }

    #[test]
    fn revival_estimate_rejects_asymmetric_configs() {
        let p = params(0.1, 0.1, 0.015, 0.03, 0.0);
        let f = build_frame(&p).unwrap();
        assert!(matches!(
            revival_time_estimate(&p, &f, 1),
            Err(Error::UnsupportedConfiguration)
        ));
    }
}
