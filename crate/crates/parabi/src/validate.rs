//! The validation suite: every acceptance criterion as a machine-checkable
//! report, shared by the `validate` CLI command and the acceptance tests.
//!
//! Each criterion pins its configuration and tolerances here; nothing is
//! deferred to runtime calibration.

use crate::config::{RunConfig, Tolerances, SCHEMA_VERSION};
use crate::dynamics::{Evolver, EvolverOptions, InitialState};
use crate::error::Result;
use crate::model::{adiabatic_level, build_frame, revival_time_estimate, ModelParams};
use crate::observables::{
    bell_reconstruct, concurrence, detect_revivals, geometric_discord, husimi_q,
    population_inversion, quadrature_variance, quadrature_variance_frame_path,
    relative_entropy_coherence, HusimiGrid,
};
use crate::oracle;
use crate::qmat::{self, max_asymmetry, DensityMatrix, SubsystemLabel};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::time::Instant;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub skipped: bool,
    pub measured: Option<f64>,
    pub detail: String,
}

impl CheckResult {
    fn band(name: &str, measured: f64, center: f64, slack: f64) -> Self {
        let passed = (measured - center).abs() <= slack;
        CheckResult {
            name: name.into(),
            passed,
            skipped: false,
            measured: Some(measured),
            detail: format!("{measured:.6} vs {center} ± {slack} (margin {:+.2e})",
                slack - (measured - center).abs()),
        }
    }

    fn at_most(name: &str, measured: f64, bound: f64) -> Self {
        CheckResult {
            name: name.into(),
            passed: measured <= bound,
            skipped: false,
            measured: Some(measured),
            detail: format!("{measured:.3e} <= {bound:.3e}"),
        }
    }

    fn at_least(name: &str, measured: f64, bound: f64) -> Self {
        CheckResult {
            name: name.into(),
            passed: measured >= bound,
            skipped: false,
            measured: Some(measured),
            detail: format!("{measured:.6} >= {bound}"),
        }
    }

    fn is_true(name: &str, condition: bool, detail: String) -> Self {
        CheckResult {
            name: name.into(),
            passed: condition,
            skipped: false,
            measured: None,
            detail,
        }
    }

    fn skipped(name: &str, why: &str) -> Self {
        CheckResult {
            name: name.into(),
            passed: false,
            skipped: true,
            measured: None,
            detail: why.into(),
        }
    }

    /// Wall-clock budget check; the measured duration stays out of the
    /// serialized report so identical configs produce byte-identical output.
    fn budget(name: &str, seconds: f64, bound: f64) -> Self {
        CheckResult {
            name: name.into(),
            passed: seconds <= bound,
            skipped: false,
            measured: None,
            detail: format!("budget {bound} s"),
        }
    }

    fn error(name: &str, err: &crate::Error) -> Self {
        CheckResult {
            name: name.into(),
            passed: false,
            skipped: false,
            measured: None,
            detail: format!("error: {err}"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: String,
    pub checks: Vec<CheckResult>,
    #[serde(skip)]
    pub runtime_s: f64,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || c.skipped)
    }

    pub fn summary_lines(&self) -> Vec<String> {
        let mut out = vec![format!(
            "criterion {}: {} — {} [{:.1}s]",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.runtime_s
        )];
        for c in &self.checks {
            let state = if c.skipped {
                "SKIP"
            } else if c.passed {
                "pass"
            } else {
                "FAIL"
            };
            out.push(format!("  [{state}] {}: {}", c.name, c.detail));
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub schema_version: u32,
    pub tolerances: Tolerances,
    pub criteria: Vec<CriterionReport>,
    pub passed: bool,
}

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

fn real_init(theta: f64, phi: f64, alpha: f64) -> InitialState {
    InitialState {
        theta,
        phi,
        alpha: Complex64::new(alpha, 0.0),
    }
}

/// Criterion 1: Bell-state reconstruction values at ωt = 303 and 501 for the
/// strongly coupled vacuum configuration.
pub fn criterion_table1(seed: u64) -> CriterionReport {
    let start = Instant::now();
    let mut checks = Vec::new();
    let p = params(0.2, 0.15, 0.32, 0.17, 0.0);
    let run = || -> Result<Vec<CheckResult>> {
        let ev = Evolver::new(&p, &real_init(0.0, 0.0, 0.0), EvolverOptions::default())?;
        let mut out = Vec::new();
        let cases: [(f64, f64, f64, f64, usize, &str, f64); 2] = [
            (303.0, 0.96, 0.97, 0.04, 1, "Phi-", 0.99),
            (501.0, 0.92, 0.93, 0.07, 0, "Phi+", 0.96),
        ];
        for (t, c_ref, pur_ref, d_ref, amp_idx, amp_name, amp_min) in cases {
            let rho = ev.state_at(t).two_qubit_rdm()?;
            let c = concurrence(&rho)?;
            let pur = qmat::purity(&rho);
            let rec = bell_reconstruct(&rho, seed)?;
            out.push(CheckResult::band(
                &format!("concurrence at t={t}"),
                c,
                c_ref,
                0.02,
            ));
            out.push(CheckResult::band(
                &format!("purity at t={t}"),
                pur,
                pur_ref,
                0.02,
            ));
            out.push(CheckResult::band(
                &format!("d_min at t={t}"),
                rec.d_min,
                d_ref,
                0.02,
            ));
            let amp = rec.coefficients.amplitudes()[amp_idx].norm();
            out.push(CheckResult::at_least(
                &format!("|alpha({amp_name})| at t={t}"),
                amp,
                amp_min,
            ));
        }
        Ok(out)
    };
    match run() {
        Ok(mut list) => checks.append(&mut list),
        Err(e) => checks.push(CheckResult::error("table1 pipeline", &e)),
    }
    let runtime = start.elapsed().as_secs_f64();
    checks.push(CheckResult::budget("runtime", runtime, 120.0));
    CriterionReport {
        id: 1,
        name: "Bell reconstruction values (vacuum, strong coupling)".into(),
        checks,
        runtime_s: runtime,
    }
}

/// Criterion 2: squeezed-coherent generation; entropy minimum near ωt = 6600,
/// quadrature variance there, and a displaced Husimi peak.
pub fn criterion_squeezed_state(grid_size: usize) -> CriterionReport {
    let start = Instant::now();
    let mut checks = Vec::new();
    let p = params(0.08, 0.08, 0.06, 0.06, 0.1);
    let run = || -> Result<Vec<CheckResult>> {
        let ev = Evolver::new(&p, &real_init(0.0, 0.0, 0.5), EvolverOptions::default())?;
        let ts: Vec<f64> = (0..=200).map(|i| 6400.0 + 2.0 * i as f64).collect();
        let entropies: Vec<(f64, f64)> = ts
            .par_iter()
            .map(|&t| {
                let rho = ev.state_at(t).two_qubit_rdm().unwrap();
                (t, qmat::von_neumann_entropy(&rho).unwrap())
            })
            .collect();
        let (t_min, s_min) = entropies
            .iter()
            .cloned()
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        let mut out = vec![
            CheckResult::band("min S near t=6600", s_min, 0.0125, 0.002),
        ];
        let st = ev.state_at(t_min);
        let rho_o = st.oscillator_rdm()?;
        let v = quadrature_variance(&rho_o)?;
        out.push(CheckResult::band("V_min at entropy minimum", v.v_min, 0.3411, 0.005));
        let field = husimi_q(
            &rho_o,
            &HusimiGrid {
                size: grid_size,
                center: None,
                half_width: None,
            },
        )?;
        let cell = (field.re_axis[1] - field.re_axis[0]).abs();
        out.push(CheckResult::at_least(
            "Husimi peak displacement in grid cells",
            field.peak_location.norm() / cell,
            3.0,
        ));
        Ok(out)
    };
    match run() {
        Ok(mut list) => checks.append(&mut list),
        Err(e) => checks.push(CheckResult::error("squeezed-state pipeline", &e)),
    }
    let runtime = start.elapsed().as_secs_f64();
    CriterionReport {
        id: 2,
        name: "Squeezed-coherent generation (entropy minimum regime)".into(),
        checks,
        runtime_s: runtime,
    }
}

/// Criterion 3: revival-time estimates against the reported scaled times and
/// peak detection on a simulated inversion series (α = 3).
pub fn criterion_revivals(tol: &Tolerances) -> CriterionReport {
    let start = Instant::now();
    let mut checks = Vec::new();
    let p = params(0.1, 0.1, 0.015, 0.015, 0.0);
    let run = || -> Result<Vec<CheckResult>> {
        let frame = build_frame(&p)?;
        let t1 = revival_time_estimate(&p, &frame, 1)?;
        let t2 = revival_time_estimate(&p, &frame, 2)?;
        let mut out = vec![
            CheckResult::at_most(
                "revival estimate k=1 vs 6.975e4 (relative)",
                (t1 - 6.975e4).abs() / 6.975e4,
                tol.revival_estimate_rel,
            ),
            CheckResult::at_most(
                "revival estimate k=2 vs 13.980e4 (relative)",
                (t2 - 13.980e4).abs() / 13.980e4,
                tol.revival_estimate_rel,
            ),
        ];
        let ev = Evolver::new(&p, &real_init(0.0, 0.0, 3.0), EvolverOptions::default())?;
        let n_samples = 26000usize;
        let t_end = 1.55e5;
        let times: Vec<f64> = (0..n_samples)
            .map(|i| t_end * i as f64 / (n_samples - 1) as f64)
            .collect();
        let values: Vec<f64> = times
            .par_iter()
            .map(|&t| {
                let rho = ev.state_at(t).two_qubit_rdm().unwrap();
                population_inversion(&rho).unwrap()
            })
            .collect();
        let peaks = detect_revivals(&times, &values);
        let mut first_peak = f64::NAN;
        for (k, expect) in [(1u32, t1), (2, t2)] {
            let nearest = peaks
                .iter()
                .cloned()
                .min_by(|a, b| {
                    (a - expect).abs().partial_cmp(&(b - expect).abs()).unwrap()
                })
                .unwrap_or(f64::NAN);
            if k == 1 {
                first_peak = nearest;
            }
            out.push(CheckResult::at_most(
                &format!("detected revival k={k} vs estimate (relative)"),
                (nearest - expect).abs() / expect,
                tol.revival_detect_rel,
            ));
        }
        // at a revival the two-qubit state is near-pure (smoke level only:
        // the entropy there depends on the unspecified coherent amplitude)
        if first_peak.is_finite() {
            let rho = ev.state_at(first_peak).two_qubit_rdm()?;
            let s = qmat::von_neumann_entropy(&rho)?;
            out.push(CheckResult::at_most(
                "entropy at first revival (near-pure smoke bound)",
                s,
                0.05,
            ));
        }
        Ok(out)
    };
    match run() {
        Ok(mut list) => checks.append(&mut list),
        Err(e) => checks.push(CheckResult::error("revival pipeline", &e)),
    }
    let runtime = start.elapsed().as_secs_f64();
    CriterionReport {
        id: 3,
        name: "Revival times (symmetric weak coupling)".into(),
        checks,
        runtime_s: runtime,
    }
}

/// Criterion 4: adiabatic spectrum against the dense oracle across the
/// adiabatic regime, plus the validity-direction check and the oracle
/// self-consistency and RDM cross-checks.
pub fn criterion_spectrum(tol: &Tolerances, skip_oracle: bool) -> CriterionReport {
    let start = Instant::now();
    let mut checks = Vec::new();
    if skip_oracle {
        for name in [
            "spectrum error (regime configs)",
            "validity direction",
            "oracle cutoff convergence",
            "adiabatic vs exact RDM",
        ] {
            checks.push(CheckResult::skipped(name, "oracle disabled"));
        }
        return CriterionReport {
            id: 4,
            name: "Spectrum validation against the exact oracle".into(),
            checks,
            runtime_s: start.elapsed().as_secs_f64(),
        };
    }

    let lowest12 = |p: &ModelParams, n_fock: usize| -> Result<f64> {
        let frame = build_frame(p)?;
        let mut approx: Vec<f64> = (0..8)
            .flat_map(|n| adiabatic_level(p, &frame, n).energies())
            .collect();
        approx.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let h = oracle::build_full_hamiltonian(p, n_fock)?;
        let exact = oracle::exact_spectrum(&h, 12)?;
        Ok(approx
            .iter()
            .zip(exact.iter())
            .map(|(a, e)| (a - e).abs())
            .fold(0.0, f64::max))
    };

    let regime = [
        params(0.1, 0.08, 0.02, 0.04, 0.0),
        params(0.1, 0.1, 0.05, 0.05, 0.3),
        params(0.06, 0.09, 0.05, 0.03, 0.15),
        params(0.1, 0.07, 0.01, 0.05, 0.25),
    ];
    let worst = regime
        .par_iter()
        .map(|p| lowest12(p, 160).unwrap_or(f64::INFINITY))
        .reduce(|| 0.0, f64::max);
    checks.push(CheckResult::at_most(
        "spectrum error (regime configs)",
        worst,
        tol.spectrum_abs,
    ));

    let e_small = lowest12(&params(0.05, 0.05, 0.04, 0.04, 0.1), 120);
    let e_large = lowest12(&params(0.2, 0.2, 0.04, 0.04, 0.1), 120);
    match (e_small, e_large) {
        (Ok(a), Ok(b)) => checks.push(CheckResult::is_true(
            "validity direction",
            b > a,
            format!("error at Delta=0.2 ({b:.3e}) > error at Delta=0.05 ({a:.3e})"),
        )),
        (Err(e), _) | (_, Err(e)) => checks.push(CheckResult::error("validity direction", &e)),
    }

    match oracle::exact_spectrum_converged(&regime[0], 160, 12, tol.oracle_drift) {
        Ok(_) => checks.push(CheckResult::is_true(
            "oracle cutoff convergence",
            true,
            format!("lowest 12 levels drift < {:.1e} under doubling", tol.oracle_drift),
        )),
        Err(e) => checks.push(CheckResult::error("oracle cutoff convergence", &e)),
    }

    let rdm_check = || -> Result<f64> {
        let p = params(0.1, 0.08, 0.02, 0.03, 0.1);
        let init = real_init(0.0, 0.0, 1.0);
        let ev = Evolver::new(&p, &init, EvolverOptions::default())?;
        let n_fock = 2 * ev.n_levels();
        let h = oracle::build_full_hamiltonian(&p, n_fock)?;
        let spectral = oracle::SpectralEvolver::new(&h)?;
        let psi0 = oracle::initial_state_vector(0.0, 0.0, init.alpha, n_fock);
        let mut worst: f64 = 0.0;
        for t in [100.0, 300.0, 500.0] {
            let exact = oracle::two_qubit_rdm_from_vector(&spectral.evolve(&psi0, t), n_fock);
            let approx = ev.state_at(t).two_qubit_rdm()?;
            let dev = (approx.matrix() - &exact)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            worst = worst.max(dev);
        }
        Ok(worst)
    };
    match rdm_check() {
        Ok(dev) => checks.push(CheckResult::at_most(
            "adiabatic vs exact RDM",
            dev,
            tol.oracle_rdm_max_norm,
        )),
        Err(e) => checks.push(CheckResult::error("adiabatic vs exact RDM", &e)),
    }

    let runtime = start.elapsed().as_secs_f64();
    checks.push(CheckResult::budget("runtime", runtime, 60.0));
    CriterionReport {
        id: 4,
        name: "Spectrum validation against the exact oracle".into(),
        checks,
        runtime_s: runtime,
    }
}

/// Criterion 5: the invariant suite on a dynamics run: trace, Hermiticity,
/// positivity, entropy equality, norm conservation, Husimi bounds and
/// normalization, dual-path quadrature variance, and search-vs-closed-form
/// Bell distances on random states.
pub fn criterion_invariants(cfg: &RunConfig) -> CriterionReport {
    let start = Instant::now();
    let tol = &cfg.tolerances;
    let mut checks = Vec::new();
    let run = || -> Result<Vec<CheckResult>> {
        let ev = Evolver::new(
            &cfg.model,
            &cfg.initial,
            EvolverOptions {
                eps_trunc: tol.eps_trunc,
            },
        )?;
        let all = cfg.time_grid.times();
        let stride = (all.len() / 50).max(1);
        let times: Vec<f64> = all.iter().copied().step_by(stride).collect();
        let mut worst_trace: f64 = 0.0;
        let mut worst_asym: f64 = 0.0;
        let mut worst_negativity: f64 = 0.0;
        let mut worst_entropy_gap: f64 = 0.0;
        let mut worst_norm: f64 = 0.0;
        for &t in &times {
            let st = ev.state_at(t);
            worst_norm = worst_norm.max((st.norm_sqr() - 1.0).abs());
            let rho = st.two_qubit_rdm()?;
            worst_trace = worst_trace.max((rho.matrix().trace().re - 1.0).abs());
            worst_asym = worst_asym.max(max_asymmetry(rho.matrix()));
            worst_negativity = worst_negativity.max((-rho.min_eigenvalue()).max(0.0));
            let rho_o = st.oscillator_rdm()?;
            let gap = (qmat::von_neumann_entropy(&rho)? - qmat::von_neumann_entropy(&rho_o)?)
                .abs();
            worst_entropy_gap = worst_entropy_gap.max(gap);
        }
        let mut out = vec![
            CheckResult::at_most("trace deviation", worst_trace, tol.trace),
            CheckResult::at_most("hermiticity asymmetry", worst_asym, tol.hermiticity),
            CheckResult::at_most("eigenvalue negativity", worst_negativity, tol.positivity),
            CheckResult::at_most("entropy equality gap", worst_entropy_gap, tol.entropy_equality),
            CheckResult::at_most("norm residual", worst_norm, tol.eps_trunc),
        ];

        // single representative time for the heavier oscillator checks
        let t_mid = all[all.len() / 2];
        let st = ev.state_at(t_mid);
        let rho_o = st.oscillator_rdm()?;
        let field = husimi_q(
            &rho_o,
            &HusimiGrid {
                size: cfg.husimi_grid.size,
                center: cfg.husimi_grid.center,
                half_width: cfg.husimi_grid.half_width,
            },
        )?;
        let inv_pi = 1.0 / std::f64::consts::PI;
        let (mut qmin, mut qmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for &q in &field.values {
            qmin = qmin.min(q);
            qmax = qmax.max(q);
        }
        out.push(CheckResult::is_true(
            "Husimi pointwise bounds",
            qmin >= -1e-12 && qmax <= inv_pi + 1e-9,
            format!("Q in [{qmin:.3e}, {qmax:.6}], 1/pi = {inv_pi:.6}"),
        ));
        out.push(CheckResult::at_most(
            "Husimi normalization error",
            (field.norm_riemann - 1.0).abs(),
            tol.husimi_norm,
        ));
        let v_fock = quadrature_variance(&rho_o)?;
        let v_frame = quadrature_variance_frame_path(&st)?;
        out.push(CheckResult::at_most(
            "dual-path V_min agreement",
            (v_fock.v_min - v_frame.v_min).abs(),
            tol.vmin_dual_path,
        ));

        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut worst_gap: f64 = 0.0;
        for _ in 0..100 {
            let a = DMatrix::from_fn(4, 4, |_, _| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let m = &a * a.adjoint();
            let tr = m.trace().re;
            let rho = DensityMatrix::new(SubsystemLabel::TwoQubit, m.map(|z| z / tr))?;
            let rec = bell_reconstruct(&rho, cfg.seed)?;
            worst_gap = worst_gap.max((rec.d_min - rec.d_min_closed_form).abs());
        }
        out.push(CheckResult::at_most(
            "d_min search vs closed form (100 random states)",
            worst_gap,
            tol.dmin_closed_form,
        ));
        Ok(out)
    };
    match run() {
        Ok(mut list) => checks.append(&mut list),
        Err(e) => checks.push(CheckResult::error("invariant pipeline", &e)),
    }
    CriterionReport {
        id: 5,
        name: "Invariant suite on the configured dynamics run".into(),
        checks,
        runtime_s: start.elapsed().as_secs_f64(),
    }
}

/// Criterion 6: nonvanishing geometric discord inside the entanglement
/// sudden-death windows of the Fig.-4-style configuration, plus bounds-only
/// smoke checks of the coherence trends.
pub fn criterion_discord_esd(tol: &Tolerances) -> CriterionReport {
    let start = Instant::now();
    let mut checks = Vec::new();
    let p = params(0.1, 0.08, 0.02, 0.04, 0.0);
    let run = || -> Result<Vec<CheckResult>> {
        let ev = Evolver::new(
            &p,
            &real_init(0.0, 0.0, 2.0),
            EvolverOptions {
                eps_trunc: tol.eps_trunc,
            },
        )?;
        let times: Vec<f64> = (0..=400).map(|i| i as f64 * 10.0).collect();
        let pairs: Vec<(f64, f64)> = times
            .par_iter()
            .map(|&t| {
                let rho = ev.state_at(t).two_qubit_rdm().unwrap();
                (
                    concurrence(&rho).unwrap(),
                    2.0 * geometric_discord(&rho).unwrap(),
                )
            })
            .collect();
        let esd_hits = pairs
            .iter()
            .filter(|(c, d)| *c == 0.0 && *d > 1e-3)
            .count();
        let mut out = vec![CheckResult::is_true(
            "discord beyond entanglement exists",
            esd_hits > 0,
            format!(
                "{esd_hits} of {} samples have C = 0 and 2D_G > 1e-3",
                pairs.len()
            ),
        )];
        // bounds-only smoke check of the coherence pipeline at finite g
        let pg = params(0.1, 0.1, 0.015, 0.015, 0.3);
        let evg = Evolver::new(&pg, &real_init(0.0, 0.0, 2.0), EvolverOptions::default())?;
        let mut cmax: f64 = 0.0;
        for i in 0..40 {
            let rho = evg.state_at(50.0 * i as f64).two_qubit_rdm()?;
            cmax = cmax.max(relative_entropy_coherence(&rho)?);
        }
        out.push(CheckResult::is_true(
            "coherence stays within [0, 2] and is excited",
            cmax > 1e-4 && cmax <= 2.0 + 1e-9,
            format!("max C_RE = {cmax:.4}"),
        ));
        Ok(out)
    };
    match run() {
        Ok(mut list) => checks.append(&mut list),
        Err(e) => checks.push(CheckResult::error("discord pipeline", &e)),
    }
    CriterionReport {
        id: 6,
        name: "Discord beyond entanglement (sudden-death windows)".into(),
        checks,
        runtime_s: start.elapsed().as_secs_f64(),
    }
}

/// Runs every criterion; oracle-backed checks are marked skipped (not passed)
/// when `skip_oracle` is set.
pub fn run_all(cfg: &RunConfig, skip_oracle: bool) -> ValidationReport {
    let criteria = vec![
        criterion_table1(cfg.seed),
        criterion_squeezed_state(cfg.husimi_grid.size),
        criterion_revivals(&cfg.tolerances),
        criterion_spectrum(&cfg.tolerances, skip_oracle),
        criterion_invariants(cfg),
        criterion_discord_esd(&cfg.tolerances),
    ];
    let passed = criteria.iter().all(|c| c.passed());
    ValidationReport {
        schema_version: SCHEMA_VERSION,
        tolerances: cfg.tolerances,
        criteria,
        passed,
    }
}
