//! Polynomial and overlap kernels: factorial logs, Laguerre and Hermite
//! polynomials, displaced-number overlaps, squeezed-coherent overlaps, and
//! displacement-squeeze matrix elements.
//!
//! Everything here is a pure function of its arguments. Large Fock indices are
//! handled by evaluating magnitudes in the log domain and by a scaled
//! (mantissa, base-2 exponent) Hermite representation, so the kernels stay
//! finite well past the point where the naive closed forms overflow.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, LN_2};
use std::sync::OnceLock;

/// Below this squeeze magnitude the closed forms of the squeezed overlaps are
/// evaluated through their expanded polynomial form: the Hermite argument
/// grows like ν^{-1/2} there and the direct product of a huge polynomial value
/// with a vanishing prefactor loses all precision.
pub const R_MIN: f64 = 1e-6;

const LOG_FACTORIAL_TABLE_LEN: usize = 4096;

fn log_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LOG_FACTORIAL_TABLE_LEN);
        t.push(0.0);
        for n in 1..LOG_FACTORIAL_TABLE_LEN {
            t.push(t[n - 1] + (n as f64).ln());
        }
        t
    })
}

/// ln(n!) with relative error below 1e-13.
pub fn log_factorial(n: u64) -> f64 {
    if (n as usize) < LOG_FACTORIAL_TABLE_LEN {
        log_factorial_table()[n as usize]
    } else {
        // Stirling series; far more accurate than needed at this size.
        let x = n as f64;
        x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3))
            + 1.0 / (1260.0 * x.powi(5))
    }
}

/// Associated Laguerre polynomial L_n^{(j)}(x) by the three-term recurrence.
///
/// The order may be any integer (the polynomial family satisfies the same
/// recurrence for negative orders); the finite binomial sum serves as the test
/// oracle for moderate degrees.
pub fn laguerre_assoc(n: u32, j: i32, x: f64) -> f64 {
    let jf = j as f64;
    if n == 0 {
        return 1.0;
    }
    let mut lkm1 = 1.0;
    let mut lk = 1.0 + jf - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + jf - x) * lk - (kf + jf) * lkm1) / (kf + 1.0);
        lkm1 = lk;
        lk = next;
    }
    lk
}

/// Complex value in scaled form `mantissa * 2^exp2`, used to carry Hermite
/// values whose magnitude exceeds the f64 range.
#[derive(Debug, Clone, Copy)]
pub struct ScaledComplex {
    pub mantissa: Complex64,
    pub exp2: i64,
}

impl ScaledComplex {
    pub fn zero() -> Self {
        ScaledComplex {
            mantissa: Complex64::new(0.0, 0.0),
            exp2: 0,
        }
    }

    pub fn value(&self) -> Complex64 {
        self.mantissa * (self.exp2 as f64).exp2()
    }

    /// (ln |z|, arg z); the log-magnitude is -inf for zero.
    pub fn log_polar(&self) -> (f64, f64) {
        (
            self.mantissa.norm().ln() + self.exp2 as f64 * LN_2,
            self.mantissa.arg(),
        )
    }
}

// rescale when |H|² crosses 1e250, well inside the f64 range
const RESCALE_NORM_SQR: f64 = 1e250;
const RESCALE_EXP: i64 = 416; // 2^416 ≈ 1.7e125

/// Table of H_0(z) ... H_n(z) in scaled form via the recurrence
/// H_{k+1} = 2 z H_k - 2 k H_{k-1}, rescaling both running values together.
pub fn hermite_table_scaled(n: u32, z: Complex64) -> Vec<ScaledComplex> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut exp2: i64 = 0;
    let mut hkm1 = Complex64::new(1.0, 0.0);
    out.push(ScaledComplex {
        mantissa: hkm1,
        exp2,
    });
    if n == 0 {
        return out;
    }
    let mut hk = 2.0 * z;
    out.push(ScaledComplex { mantissa: hk, exp2 });
    for k in 1..n {
        let next = 2.0 * z * hk - 2.0 * (k as f64) * hkm1;
        hkm1 = hk;
        hk = next;
        if hk.norm_sqr() > RESCALE_NORM_SQR {
            let scale = (-(RESCALE_EXP as f64)).exp2();
            hk *= scale;
            hkm1 *= scale;
            exp2 += RESCALE_EXP;
        }
        out.push(ScaledComplex { mantissa: hk, exp2 });
    }
    out
}

/// H_n(z) in scaled (mantissa, exponent) form.
pub fn hermite_scaled(n: u32, z: Complex64) -> ScaledComplex {
    hermite_table_scaled(n, z).pop().expect("nonempty table")
}

/// H_n(z). Overflows to ±inf for degrees/arguments past the f64 range; use
/// [`hermite_scaled`] there.
pub fn hermite(n: u32, z: Complex64) -> Complex64 {
    hermite_scaled(n, z).value()
}

/// Arguments of the displaced-number overlap kernel 𝓜_{m,n}(x) = ⟨m|D(x)|n⟩.
#[derive(Debug, Clone, Copy)]
pub struct OverlapKernelArgs {
    pub m: usize,
    pub n: usize,
    pub x: f64,
}

/// ⟨m|D(x)|n⟩ for real displacement x.
///
/// Magnitude is assembled in the log domain so that large index differences
/// neither overflow nor flush to zero prematurely.
pub fn displaced_overlap(args: OverlapKernelArgs) -> f64 {
    let OverlapKernelArgs { m, n, x } = args;
    if m < n {
        let sign = if (m + n) % 2 == 0 { 1.0 } else { -1.0 };
        return sign * displaced_overlap(OverlapKernelArgs { m: n, n: m, x });
    }
    if x == 0.0 {
        return if m == n { 1.0 } else { 0.0 };
    }
    let d = (m - n) as i32;
    let lag = laguerre_assoc(n as u32, d, x * x);
    if lag == 0.0 {
        return 0.0;
    }
    let log_mag = d as f64 * x.abs().ln() - x * x / 2.0
        + 0.5 * (log_factorial(n as u64) - log_factorial(m as u64))
        + lag.abs().ln();
    let mut sign = lag.signum();
    if x < 0.0 && d % 2 != 0 {
        sign = -sign;
    }
    sign * log_mag.exp()
}

/// ⟨m|D(α)|n⟩ for complex α (the zero-squeeze limit of the matrix elements
/// below).
pub(crate) fn displaced_element(m: usize, n: usize, alpha: Complex64) -> Complex64 {
    if alpha.norm_sqr() == 0.0 {
        return if m == n {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let a2 = alpha.norm_sqr();
    if m >= n {
        let d = (m - n) as i32;
        let lag = laguerre_assoc(n as u32, d, a2);
        let log_mag = 0.5 * (log_factorial(n as u64) - log_factorial(m as u64)) - a2 / 2.0
            + d as f64 * alpha.norm().ln();
        let phase = Complex64::from_polar(1.0, d as f64 * alpha.arg());
        phase * lag * log_mag.exp()
    } else {
        let d = (n - m) as i32;
        let lag = laguerre_assoc(m as u32, d, a2);
        let neg_conj = -alpha.conj();
        let log_mag = 0.5 * (log_factorial(m as u64) - log_factorial(n as u64)) - a2 / 2.0
            + d as f64 * alpha.norm().ln();
        let phase = Complex64::from_polar(1.0, d as f64 * neg_conj.arg());
        phase * lag * log_mag.exp()
    }
}

/// Kernel matrix 𝓜_{m,n}(x) for m < rows, n < cols.
pub fn displaced_overlap_matrix(rows: usize, cols: usize, x: f64) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_fn(rows, cols, |m, n| displaced_overlap(OverlapKernelArgs { m, n, x }))
}

/// Arguments of the squeezed-displaced frame overlap ⟨r,n_η|α⟩ with
/// |r,n_η⟩ = S†(ξ) D†(η) |n⟩ and ξ = r e^{iϑ}.
#[derive(Debug, Clone, Copy)]
pub struct SqueezeDisplaceArgs {
    pub r: f64,
    pub vartheta: f64,
    pub alpha: Complex64,
    pub n: usize,
    pub eta: f64,
}

impl SqueezeDisplaceArgs {
    pub fn mu(&self) -> f64 {
        self.r.cosh()
    }

    pub fn nu(&self) -> Complex64 {
        Complex64::from_polar(self.r.sinh(), self.vartheta)
    }
}

/// ⟨r,n_η|α⟩ = ⟨n|D(η)S(ξ)|α⟩, the closed-form squeezed-coherent overlap.
///
/// For squeeze magnitudes below [`R_MIN`] the expanded polynomial branch is
/// used; it reduces term-by-term to the displaced-coherent overlap at r = 0.
pub fn squeezed_coherent_overlap(args: SqueezeDisplaceArgs) -> Complex64 {
    if args.r < R_MIN {
        overlap_small_squeeze_branch(args)
    } else {
        overlap_general_branch(args)
    }
}

/// General branch of the overlap: Hermite closed form, assembled in the log
/// domain. Valid for any r > 0.
pub(crate) fn overlap_general_branch(args: SqueezeDisplaceArgs) -> Complex64 {
    let SqueezeDisplaceArgs {
        alpha, n, eta: e, ..
    } = args;
    let mu = args.mu();
    let nu = args.nu();
    let w = (nu / (2.0 * mu)).sqrt();
    let herm = hermite_scaled(
        n as u32,
        -Complex64::i() * ((mu - nu) * e + alpha) / (2.0 * mu * w),
    );
    let (h_logmag, h_arg) = herm.log_polar();
    if h_logmag.is_infinite() {
        return Complex64::new(0.0, 0.0);
    }
    // exponent of the closed form
    let expo = -e * e / 2.0 + e * e * nu / (2.0 * mu) - alpha.norm_sqr() / 2.0
        - alpha * alpha * nu.conj() / (2.0 * mu)
        - e * alpha / mu;
    // i^n w^n paired with the Hermite argument above; the product is
    // independent of the square-root branch because H_n has parity n.
    let nf = n as f64;
    let log_mag =
        -0.5 * mu.ln() - 0.5 * log_factorial(n as u64) + nf * w.norm().ln() + expo.re + h_logmag;
    let arg = nf * (FRAC_PI_2 + w.arg()) + expo.im + h_arg;
    Complex64::from_polar(log_mag.exp(), arg)
}

/// Small-squeeze branch: the Hermite polynomial expanded against the
/// prefactor, leaving a finite sum that stays stable as ν → 0.
///
/// value = √(n!)/√μ · e^expo · Σ_k (ν/2μ)^k (B/μ)^{n-2k} / (k! (n-2k)!)
/// with B = (μ-ν)η + α.
pub(crate) fn overlap_small_squeeze_branch(args: SqueezeDisplaceArgs) -> Complex64 {
    let SqueezeDisplaceArgs {
        alpha, n, eta: e, ..
    } = args;
    let mu = args.mu();
    let nu = args.nu();
    let expo = -e * e / 2.0 + e * e * nu / (2.0 * mu) - alpha.norm_sqr() / 2.0
        - alpha * alpha * nu.conj() / (2.0 * mu)
        - e * alpha / mu;
    let b = (mu - nu) * e + alpha;
    let half_nu = nu / (2.0 * mu);
    let b_mu = b / mu;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..=(n / 2) {
        let p = n - 2 * k;
        let mut log_mag = -log_factorial(k as u64) - log_factorial(p as u64);
        let mut arg = 0.0;
        if k > 0 {
            if half_nu.norm_sqr() == 0.0 {
                continue;
            }
            log_mag += k as f64 * half_nu.norm().ln();
            arg += k as f64 * half_nu.arg();
        }
        if p > 0 {
            if b_mu.norm_sqr() == 0.0 {
                continue;
            }
            log_mag += p as f64 * b_mu.norm().ln();
            arg += p as f64 * b_mu.arg();
        }
        sum += Complex64::from_polar(log_mag.exp(), arg);
    }
    let pref_log = 0.5 * log_factorial(n as u64) - 0.5 * mu.ln() + expo.re;
    Complex64::from_polar(pref_log.exp(), expo.im) * sum
}

/// Table of ⟨r,n_η|α⟩ for n = 0..len; the Hermite argument is the same for
/// every n, so the scaled table is built once.
pub fn squeezed_coherent_overlap_table(
    len: usize,
    r: f64,
    vartheta: f64,
    eta: f64,
    alpha: Complex64,
) -> Vec<Complex64> {
    if len == 0 {
        return Vec::new();
    }
    if r < R_MIN {
        return (0..len)
            .map(|n| {
                overlap_small_squeeze_branch(SqueezeDisplaceArgs {
                    r,
                    vartheta,
                    alpha,
                    n,
                    eta,
                })
            })
            .collect();
    }
    let mu = r.cosh();
    let nu = Complex64::from_polar(r.sinh(), vartheta);
    let w = (nu / (2.0 * mu)).sqrt();
    let herms = hermite_table_scaled(
        len as u32 - 1,
        -Complex64::i() * ((mu - nu) * eta + alpha) / (2.0 * mu * w),
    );
    let expo = -eta * eta / 2.0 + eta * eta * nu / (2.0 * mu) - alpha.norm_sqr() / 2.0
        - alpha * alpha * nu.conj() / (2.0 * mu)
        - eta * alpha / mu;
    let w_ln = w.norm().ln();
    let w_arg = w.arg();
    (0..len)
        .map(|n| {
            let (h_logmag, h_arg) = herms[n].log_polar();
            if h_logmag.is_infinite() {
                return Complex64::new(0.0, 0.0);
            }
            let nf = n as f64;
            let log_mag = -0.5 * mu.ln() - 0.5 * log_factorial(n as u64) + nf * w_ln + expo.re
                + h_logmag;
            let arg = nf * (FRAC_PI_2 + w_arg) + expo.im + h_arg;
            Complex64::from_polar(log_mag.exp(), arg)
        })
        .collect()
}

/// ⟨m|D(α)S(ξ)|n⟩, the displacement-squeeze matrix element.
pub fn disp_squeeze_matrix_element(
    m: usize,
    alpha: Complex64,
    xi: Complex64,
    n: usize,
) -> Complex64 {
    DispSqueezeTables::new(alpha, xi, m.max(n)).element(m, n)
}

/// Precomputed Hermite tables for ⟨m|D(α)S(ξ)|n⟩ over a whole index block;
/// the two Hermite arguments are index-independent, so one pair of scaled
/// tables serves every element.
pub struct DispSqueezeTables {
    alpha: Complex64,
    mu: f64,
    w_ln: f64,
    w_arg: f64,
    expo: Complex64,
    h1: Vec<(f64, f64)>, // log-polar of H_j(-conj(α)/√(2μν*))
    h2: Vec<(f64, f64)>, // log-polar of H_j(-i(μα - ν conj(α))/√(2μν))
    zero_squeeze: bool,
}

impl DispSqueezeTables {
    pub fn new(alpha: Complex64, xi: Complex64, max_index: usize) -> Self {
        let r = xi.norm();
        let mu = r.cosh();
        let nu = if r == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(r.sinh(), xi.arg())
        };
        if r < 1e-12 {
            return DispSqueezeTables {
                alpha,
                mu,
                w_ln: 0.0,
                w_arg: 0.0,
                expo: Complex64::new(0.0, 0.0),
                h1: Vec::new(),
                h2: Vec::new(),
                zero_squeeze: true,
            };
        }
        let w = (nu / (2.0 * mu)).sqrt();
        let wb = w.conj();
        let z1 = -alpha.conj() / (2.0 * mu * wb);
        let z2 = -Complex64::i() * (mu * alpha - nu * alpha.conj()) / (2.0 * mu * w);
        let h1 = hermite_table_scaled(max_index as u32, z1)
            .iter()
            .map(|h| h.log_polar())
            .collect();
        let h2 = hermite_table_scaled(max_index as u32, z2)
            .iter()
            .map(|h| h.log_polar())
            .collect();
        let expo = -alpha.norm_sqr() / 2.0 + alpha.conj() * alpha.conj() * nu / (2.0 * mu);
        DispSqueezeTables {
            alpha,
            mu,
            w_ln: w.norm().ln(),
            w_arg: w.arg(),
            expo,
            h1,
            h2,
            zero_squeeze: false,
        }
    }

    pub fn element(&self, m: usize, n: usize) -> Complex64 {
        if self.zero_squeeze {
            // S(ξ) ≈ identity at this scale; relative error O(max_index² ν).
            return displaced_element(m, n, self.alpha);
        }
        let lf = log_factorial;
        // shared prefactor √(m!/(n! μ)) i^m e^expo, with w^m split across terms
        let pref_log = 0.5 * (lf(m as u64) - lf(n as u64)) - 0.5 * self.mu.ln() + self.expo.re;
        let pref_arg = m as f64 * FRAC_PI_2 + self.expo.im;
        // term_k = binom(n,k) (-i)^k μ^{-k} / (m-k)!
        //          · wb^{n-k} H_{n-k}(z1) · w^{m-k} H_{m-k}(z2)
        let kmax = m.min(n);
        let mut logs = Vec::with_capacity(kmax + 1);
        let mut max_log = f64::NEG_INFINITY;
        for k in 0..=kmax {
            let (h1_mag, h1_arg) = self.h1[n - k];
            let (h2_mag, h2_arg) = self.h2[m - k];
            if h1_mag.is_infinite() || h2_mag.is_infinite() {
                logs.push(None);
                continue;
            }
            let binom_log = lf(n as u64) - lf(k as u64) - lf((n - k) as u64);
            let log_mag = pref_log + binom_log - lf((m - k) as u64) - (k as f64) * self.mu.ln()
                + ((n - k) as f64 + (m - k) as f64) * self.w_ln
                + h1_mag
                + h2_mag;
            let arg = pref_arg - k as f64 * FRAC_PI_2
                + (n - k) as f64 * (-self.w_arg)
                + (m - k) as f64 * self.w_arg
                + h1_arg
                + h2_arg;
            max_log = max_log.max(log_mag);
            logs.push(Some((log_mag, arg)));
        }
        if max_log.is_infinite() {
            return Complex64::new(0.0, 0.0);
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for entry in logs.into_iter().flatten() {
            let (log_mag, arg) = entry;
            sum += Complex64::from_polar((log_mag - max_log).exp(), arg);
        }
        sum * max_log.exp()
    }

    /// Matrix of elements ⟨m|D(α)S(ξ)|n⟩ for m < rows, n < cols.
    pub fn matrix(&self, rows: usize, cols: usize) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_fn(rows, cols, |m, n| self.element(m, n))
    }
}
