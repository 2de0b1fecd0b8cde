//! C ABI over the core library: opaque evolver handles, status codes, and
//! flat structs for the common observables. The generated header lives in
//! `include/parabi.h` and is regenerated by the build script.
//!
//! Conventions: every function returns a [`ParabiStatus`]; outputs go through
//! pointers supplied by the caller; handles are created and released with the
//! matching `_new`/`_free` pair and are never touched after `_free`.

use num_complex::Complex64;
use parabi::dynamics::{Evolver, EvolverOptions, InitialState};
use parabi::model::{build_frame, revival_time_estimate, ModelParams};
use parabi::observables;
use parabi::qmat;
use parabi::Error;
use std::ffi::{c_char, c_double, c_uint};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParabiStatus {
    Ok = 0,
    /// A pointer argument was null or a scalar argument out of range.
    InvalidArgument = 1,
    /// g >= omega/2: the oscillator spectrum collapses.
    SpectralCollapse = 2,
    /// The requested Fock cutoff cannot reach the truncation tolerance.
    CutoffTooSmall = 3,
    /// Configuration rejected (see the model parameter contracts).
    InvalidParameter = 4,
    /// Requested estimate outside its derivation scope.
    UnsupportedConfiguration = 5,
    /// Internal numerical failure (positivity, convergence, ...).
    NumericalError = 6,
}

fn status_of(err: &Error) -> ParabiStatus {
    match err {
        Error::SpectralCollapse { .. } => ParabiStatus::SpectralCollapse,
        Error::CutoffTooSmall { .. } => ParabiStatus::CutoffTooSmall,
        Error::InvalidParameter(_) | Error::Config(_) => ParabiStatus::InvalidParameter,
        Error::UnsupportedConfiguration => ParabiStatus::UnsupportedConfiguration,
        _ => ParabiStatus::NumericalError,
    }
}

/// Opaque handle owning a prepared evolution (model, frame, expansion
/// coefficients, kernel tables).
pub struct ParabiEvolver {
    inner: Evolver,
}

/// Two-qubit observables at one scaled time.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ParabiObservables {
    pub inversion: c_double,
    pub entropy_bits: c_double,
    pub coherence_bits: c_double,
    pub discord2: c_double,
    pub concurrence: c_double,
    pub purity: c_double,
}

/// Oscillator-side quantities at one scaled time.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ParabiOscillator {
    pub v_min: c_double,
    pub n_mean: c_double,
    pub a_mean_re: c_double,
    pub a_mean_im: c_double,
    /// 1 when v_min < 0.5.
    pub squeezed: u8,
}

/// Builds an evolver for the model
/// H = ω a†a + Σ_j (Δ_j/2 σ_j^z + λ_j σ_j^x (a†+a)) + g(a†²+a²)
/// and the initial state (cosθ|1,1⟩ + e^{iφ} sinθ|-1,-1⟩) ⊗ |α⟩.
///
/// `n_max` = 0 selects the cutoff automatically; `eps_trunc` <= 0 uses the
/// default truncation tolerance. On success `*out` owns the handle.
///
/// # Safety
/// `out` must be a valid pointer; the handle must be released with
/// [`parabi_evolver_free`].
#[no_mangle]
pub unsafe extern "C" fn parabi_evolver_new(
    omega: c_double,
    delta1: c_double,
    delta2: c_double,
    lambda1: c_double,
    lambda2: c_double,
    g: c_double,
    n_max: c_uint,
    theta: c_double,
    phi: c_double,
    alpha_re: c_double,
    alpha_im: c_double,
    eps_trunc: c_double,
    out: *mut *mut ParabiEvolver,
) -> ParabiStatus {
    if out.is_null() {
        return ParabiStatus::InvalidArgument;
    }
    let params = ModelParams {
        omega,
        delta1,
        delta2,
        lambda1,
        lambda2,
        g,
        n_max: if n_max == 0 { None } else { Some(n_max as usize) },
    };
    let init = InitialState {
        theta,
        phi,
        alpha: Complex64::new(alpha_re, alpha_im),
    };
    let opts = if eps_trunc > 0.0 {
        EvolverOptions { eps_trunc }
    } else {
        EvolverOptions::default()
    };
    let result = catch_unwind(|| Evolver::new(&params, &init, opts));
    match result {
        Ok(Ok(ev)) => {
            *out = Box::into_raw(Box::new(ParabiEvolver { inner: ev }));
            ParabiStatus::Ok
        }
        Ok(Err(e)) => status_of(&e),
        Err(_) => ParabiStatus::NumericalError,
    }
}

/// Releases a handle created by [`parabi_evolver_new`]. Null is ignored.
///
/// # Safety
/// `handle` must come from [`parabi_evolver_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn parabi_evolver_free(handle: *mut ParabiEvolver) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of Fock levels retained by the expansion.
///
/// # Safety
/// `handle` must be a live evolver handle.
#[no_mangle]
pub unsafe extern "C" fn parabi_evolver_n_levels(handle: *const ParabiEvolver) -> c_uint {
    if handle.is_null() {
        return 0;
    }
    (*handle).inner.n_levels() as c_uint
}

/// Truncation residual 1 - Σ|C|² of the expansion.
///
/// # Safety
/// `handle` must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn parabi_evolver_residual(
    handle: *const ParabiEvolver,
    out: *mut c_double,
) -> ParabiStatus {
    if handle.is_null() || out.is_null() {
        return ParabiStatus::InvalidArgument;
    }
    *out = (*handle).inner.truncation_residual();
    ParabiStatus::Ok
}

/// Two-qubit reduced density matrix at scaled time t, written row-major into
/// `re[16]`/`im[16]` in the basis {|1,1⟩, |-1,1⟩, |1,-1⟩, |-1,-1⟩}.
///
/// # Safety
/// `handle` must be live; `re` and `im` must each point at 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn parabi_two_qubit_rdm(
    handle: *const ParabiEvolver,
    t: c_double,
    re: *mut c_double,
    im: *mut c_double,
) -> ParabiStatus {
    if handle.is_null() || re.is_null() || im.is_null() {
        return ParabiStatus::InvalidArgument;
    }
    let ev = &(*handle).inner;
    let rho = match catch_unwind(AssertUnwindSafe(|| ev.state_at(t).two_qubit_rdm())) {
        Ok(Ok(r)) => r,
        Ok(Err(e)) => return status_of(&e),
        Err(_) => return ParabiStatus::NumericalError,
    };
    for i in 0..4 {
        for j in 0..4 {
            let z = rho.matrix()[(i, j)];
            *re.add(i * 4 + j) = z.re;
            *im.add(i * 4 + j) = z.im;
        }
    }
    ParabiStatus::Ok
}

/// The standard two-qubit observables at scaled time t.
///
/// # Safety
/// `handle` must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn parabi_observables_at(
    handle: *const ParabiEvolver,
    t: c_double,
    out: *mut ParabiObservables,
) -> ParabiStatus {
    if handle.is_null() || out.is_null() {
        return ParabiStatus::InvalidArgument;
    }
    let ev = &(*handle).inner;
    let run = || -> parabi::Result<ParabiObservables> {
        let rho = ev.state_at(t).two_qubit_rdm()?;
        Ok(ParabiObservables {
            inversion: observables::population_inversion(&rho)?,
            entropy_bits: qmat::von_neumann_entropy(&rho)?,
            coherence_bits: observables::relative_entropy_coherence(&rho)?,
            discord2: 2.0 * observables::geometric_discord(&rho)?,
            concurrence: observables::concurrence(&rho)?,
            purity: qmat::purity(&rho),
        })
    };
    match catch_unwind(AssertUnwindSafe(run)) {
        Ok(Ok(v)) => {
            *out = v;
            ParabiStatus::Ok
        }
        Ok(Err(e)) => status_of(&e),
        Err(_) => ParabiStatus::NumericalError,
    }
}

/// Oscillator moments and principal quadrature variance at scaled time t.
///
/// # Safety
/// `handle` must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn parabi_oscillator_at(
    handle: *const ParabiEvolver,
    t: c_double,
    out: *mut ParabiOscillator,
) -> ParabiStatus {
    if handle.is_null() || out.is_null() {
        return ParabiStatus::InvalidArgument;
    }
    let ev = &(*handle).inner;
    let run = || -> parabi::Result<ParabiOscillator> {
        let rho = ev.state_at(t).oscillator_rdm()?;
        let v = observables::quadrature_variance(&rho)?;
        Ok(ParabiOscillator {
            v_min: v.v_min,
            n_mean: v.n_mean,
            a_mean_re: v.a_mean.re,
            a_mean_im: v.a_mean.im,
            squeezed: v.squeezed as u8,
        })
    };
    match catch_unwind(AssertUnwindSafe(run)) {
        Ok(Ok(v)) => {
            *out = v;
            ParabiStatus::Ok
        }
        Ok(Err(e)) => status_of(&e),
        Err(_) => ParabiStatus::NumericalError,
    }
}

/// Closest generalized-Bell superposition of the two-qubit state.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ParabiBell {
    /// Hilbert-Schmidt distance reached by the search.
    pub d_min: c_double,
    /// Spectral closed form √(Trρ² + 1 - 2λ_max).
    pub d_min_closed_form: c_double,
    /// Amplitudes over {Φ+, Φ-, Ψ+, Ψ-}, gauge-fixed.
    pub amp_re: [c_double; 4],
    pub amp_im: [c_double; 4],
    /// 1 when the top eigenvalue is degenerate and the minimizer not unique.
    pub degenerate: u8,
}

/// Reconstructs the closest Bell superposition at scaled time t. `seed`
/// feeds the search restarts.
///
/// # Safety
/// `handle` must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn parabi_bell_at(
    handle: *const ParabiEvolver,
    t: c_double,
    seed: u64,
    out: *mut ParabiBell,
) -> ParabiStatus {
    if handle.is_null() || out.is_null() {
        return ParabiStatus::InvalidArgument;
    }
    let ev = &(*handle).inner;
    let run = || -> parabi::Result<ParabiBell> {
        let rho = ev.state_at(t).two_qubit_rdm()?;
        let rec = observables::bell_reconstruct(&rho, seed)?;
        let amps = rec.coefficients.amplitudes();
        Ok(ParabiBell {
            d_min: rec.d_min,
            d_min_closed_form: rec.d_min_closed_form,
            amp_re: [amps[0].re, amps[1].re, amps[2].re, amps[3].re],
            amp_im: [amps[0].im, amps[1].im, amps[2].im, amps[3].im],
            degenerate: rec.degenerate as u8,
        })
    };
    match catch_unwind(AssertUnwindSafe(run)) {
        Ok(Ok(v)) => {
            *out = v;
            ParabiStatus::Ok
        }
        Ok(Err(e)) => status_of(&e),
        Err(_) => ParabiStatus::NumericalError,
    }
}

/// k-th revival-time estimate 2πk/((2η)²Δ̃) for the symmetric configuration
/// (equal splittings `delta`, equal couplings `lambda`).
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn parabi_revival_time(
    omega: c_double,
    delta: c_double,
    lambda: c_double,
    g: c_double,
    k: c_uint,
    out: *mut c_double,
) -> ParabiStatus {
    if out.is_null() {
        return ParabiStatus::InvalidArgument;
    }
    let params = ModelParams {
        omega,
        delta1: delta,
        delta2: delta,
        lambda1: lambda,
        lambda2: lambda,
        g,
        n_max: None,
    };
    let run = || -> parabi::Result<f64> {
        let frame = build_frame(&params)?;
        revival_time_estimate(&params, &frame, k)
    };
    match run() {
        Ok(v) => {
            *out = v;
            ParabiStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn parabi_status_message(status: ParabiStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        ParabiStatus::Ok => b"ok\0",
        ParabiStatus::InvalidArgument => b"invalid argument (null pointer or out-of-range value)\0",
        ParabiStatus::SpectralCollapse => b"g >= omega/2: spectral collapse regime\0",
        ParabiStatus::CutoffTooSmall => b"Fock cutoff too small for the truncation tolerance\0",
        ParabiStatus::InvalidParameter => b"invalid model parameter or configuration\0",
        ParabiStatus::UnsupportedConfiguration => {
            b"estimate requires equal couplings and equal splittings\0"
        }
        ParabiStatus::NumericalError => b"internal numerical failure\0",
    };
    msg.as_ptr() as *const c_char
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn parabi_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    unsafe fn make(g: f64, alpha: f64) -> *mut ParabiEvolver {
        let mut handle: *mut ParabiEvolver = ptr::null_mut();
        let status = parabi_evolver_new(
            1.0, 0.1, 0.08, 0.02, 0.04, g, 0, 0.0, 0.0, alpha, 0.0, -1.0, &mut handle,
        );
        assert_eq!(status, ParabiStatus::Ok);
        handle
    }

    #[test]
    fn lifecycle_and_observables() {
        unsafe {
            let h = make(0.1, 1.0);
            assert!(parabi_evolver_n_levels(h) >= 48);
            let mut resid = 1.0;
            assert_eq!(parabi_evolver_residual(h, &mut resid), ParabiStatus::Ok);
            assert!(resid.abs() < 1e-8);

            let mut obs = ParabiObservables {
                inversion: 0.0,
                entropy_bits: 0.0,
                coherence_bits: 0.0,
                discord2: 0.0,
                concurrence: 0.0,
                purity: 0.0,
            };
            assert_eq!(parabi_observables_at(h, 0.0, &mut obs), ParabiStatus::Ok);
            assert!((obs.inversion - 1.0).abs() < 1e-8);
            assert!(obs.entropy_bits.abs() < 1e-6);
            assert!((obs.purity - 1.0).abs() < 1e-6);

            let mut re = [0.0; 16];
            let mut im = [0.0; 16];
            assert_eq!(
                parabi_two_qubit_rdm(h, 0.0, re.as_mut_ptr(), im.as_mut_ptr()),
                ParabiStatus::Ok
            );
            assert!((re[0] - 1.0).abs() < 1e-8);

            let mut osc = ParabiOscillator {
                v_min: 0.0,
                n_mean: 0.0,
                a_mean_re: 0.0,
                a_mean_im: 0.0,
                squeezed: 0,
            };
            assert_eq!(parabi_oscillator_at(h, 0.0, &mut osc), ParabiStatus::Ok);
            assert!((osc.v_min - 0.5).abs() < 1e-6);
            assert!((osc.a_mean_re - 1.0).abs() < 1e-6);

            let mut bell = ParabiBell {
                d_min: 0.0,
                d_min_closed_form: 0.0,
                amp_re: [0.0; 4],
                amp_im: [0.0; 4],
                degenerate: 0,
            };
            assert_eq!(parabi_bell_at(h, 0.0, 0, &mut bell), ParabiStatus::Ok);
            // pure product start: within the Bell span, d_min = 0
            assert!(bell.d_min < 1e-6);
            assert!((bell.d_min - bell.d_min_closed_form).abs() < 1e-6);

            parabi_evolver_free(h);
        }
    }

    #[test]
    fn error_paths_map_to_statuses() {
        unsafe {
            let mut handle: *mut ParabiEvolver = ptr::null_mut();
            let status = parabi_evolver_new(
                1.0, 0.1, 0.1, 0.01, 0.01, 0.6, 0, 0.0, 0.0, 0.0, 0.0, -1.0, &mut handle,
            );
            assert_eq!(status, ParabiStatus::SpectralCollapse);

            let status = parabi_evolver_new(
                1.0, 0.1, 0.1, 0.015, 0.015, 0.0, 4, 0.0, 0.0, 3.0, 0.0, -1.0, &mut handle,
            );
            assert_eq!(status, ParabiStatus::CutoffTooSmall);

            let mut t = 0.0;
            let status = parabi_revival_time(1.0, 0.1, 0.015, 0.0, 1, &mut t);
            assert_eq!(status, ParabiStatus::Ok);
            assert!((t - 6.975e4).abs() / 6.975e4 < 0.01);

            assert_eq!(
                parabi_observables_at(ptr::null(), 0.0, ptr::null_mut()),
                ParabiStatus::InvalidArgument
            );
            assert!(!parabi_status_message(ParabiStatus::SpectralCollapse).is_null());
            assert!(!parabi_version().is_null());
        }
    }
}
