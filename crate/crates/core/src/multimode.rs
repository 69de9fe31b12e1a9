//! Symmetric and bisymmetric multimode Gaussian states: constructors
//! (N-splitters, GHZ-type states), block-pattern detection, spectral
//! degeneracy, and unitary localization of block entanglement onto a single
//! mode pair.
//!
//! A bisymmetric (M+N)-mode state is invariant under mode permutations
//! inside the first M and inside the last N modes. Its CM is determined by
//! up to five 2×2 blocks:
//!
//! ```text
//! σ = ( σ_α^M   Γ    )      σ_α^M: diagonal blocks α, off-diagonal ε_α
//!     ( Γ^T    σ_β^N )      σ_β^N: diagonal blocks β, off-diagonal ε_β
//!                           Γ:     every 2×2 block equal to γ
//! ```
//!
//! For such states the M|N block entanglement concentrates losslessly onto
//! one mode of each block under local (per-block) passive transforms.

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phasespace::{
    make_squeezer, mode_mixer, Bipartition, CovarianceMatrix, SqueezeAxis, SymplecticTransform,
};

/// Per-entry tolerance when detecting the bisymmetric block pattern.
pub const BISYMMETRY_TOL: f64 = 1e-8;

/// Block description (M, N, α, ε_α, β, ε_β, γ) of a bisymmetric CM.
/// The off-diagonal blocks are absent for single-mode sides.
#[derive(Debug, Clone, PartialEq)]
pub struct BisymmetricSpec {
    pub m: usize,
    pub n: usize,
    pub alpha: Matrix2<f64>,
    pub eps_alpha: Option<Matrix2<f64>>,
    pub beta: Matrix2<f64>,
    pub eps_beta: Option<Matrix2<f64>>,
    pub gamma: Matrix2<f64>,
}

/// Recipe for a (noisy) GHZ-type fully symmetric state with equal
/// squeezing on every input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GhzTypeSpec {
    pub n_modes: usize,
    pub squeezing: f64,
    pub thermal_noise: f64,
}

impl GhzTypeSpec {
    pub fn new(n_modes: usize, squeezing: f64, thermal_noise: f64) -> Result<Self> {
        if n_modes < 2 {
            return Err(Error::DimensionMismatch {
                context: "GHZ-type states need at least two modes".to_owned(),
            });
        }
        if !(squeezing.is_finite() && squeezing >= 0.0) || !(thermal_noise.is_finite() && thermal_noise >= 1.0) {
            return Err(Error::DomainError {
                context: "GHZ-type spec needs squeezing >= 0 and thermal_noise >= 1".to_owned(),
            });
        }
        Ok(GhzTypeSpec { n_modes, squeezing, thermal_noise })
    }
}

/// Fully symmetric k-mode CM with every diagonal 2×2 block equal to `diag`
/// and every off-diagonal block equal to `offdiag`.
pub fn fully_symmetric_cm(k: usize, diag: &Matrix2<f64>, offdiag: &Matrix2<f64>) -> Result<CovarianceMatrix> {
    let mut m = DMatrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        for j in 0..k {
            let block = if i == j { diag } else { offdiag };
            m.view_mut((2 * i, 2 * j), (2, 2)).copy_from(block);
        }
    }
    let cm = CovarianceMatrix::new(m)?;
    cm.assert_physical("fully_symmetric_cm")?;
    Ok(cm)
}

/// Balanced N-splitter: the passive mode-mixer of the symmetric orthogonal
/// reflection exchanging e₁ with the balanced vector (1, …, 1)/√n. Both the
/// first row and the first column carry weight 1/√n on every mode, so the
/// same transform distributes one squeezed input over all modes and, being
/// an involution, extracts the symmetric combination back onto mode 0.
pub fn n_splitter(n: usize) -> Result<SymplecticTransform> {
    if n < 2 {
        return Err(Error::DimensionMismatch {
            context: "n_splitter needs at least two modes".to_owned(),
        });
    }
    mode_mixer(&balanced_reflection(n))
}

fn balanced_reflection(n: usize) -> DMatrix<f64> {
    if n == 1 {
        return DMatrix::identity(1, 1);
    }
    let root = (n as f64).sqrt();
    let mut w = DMatrix::zeros(n, 1);
    w[(0, 0)] = 1.0 - 1.0 / root;
    for i in 1..n {
        w[(i, 0)] = -1.0 / root;
    }
    let norm = w.norm();
    w.unscale_mut(norm);
    DMatrix::identity(n, n) - (&w * w.transpose()).scale(2.0)
}

/// GHZ-type state: one p-squeezed and N−1 x-squeezed vacua (each scaled by
/// the thermal factor) through the balanced N-splitter. Fully symmetric;
/// pure iff `thermal_noise` = 1.
pub fn ghz_type_state(spec: &GhzTypeSpec) -> Result<CovarianceMatrix> {
    let mut inputs = CovarianceMatrix::vacuum(1)
        .apply_symplectic(&make_squeezer(spec.squeezing, SqueezeAxis::P))?;
    for _ in 1..spec.n_modes {
        let x = CovarianceMatrix::vacuum(1).apply_symplectic(&make_squeezer(spec.squeezing, SqueezeAxis::X))?;
        inputs = inputs.direct_sum(&x);
    }
    let scaled = CovarianceMatrix::new(inputs.matrix().scale(spec.thermal_noise))?;
    scaled.apply_symplectic(&n_splitter(spec.n_modes)?)
}

/// Local mixedness b = 1/μ of each single-mode reduction of a pure
/// GHZ-type state at squeezing `r`.
pub fn ghz_local_mixedness(n: usize, r: f64) -> f64 {
    let nf = n as f64;
    let x = (-2.0 * r).exp() + ((2.0 * r).exp() - (-2.0 * r).exp()) / nf;
    let p = (2.0 * r).exp() + ((-2.0 * r).exp() - (2.0 * r).exp()) / nf;
    (x * p).sqrt()
}

/// Inverse of [`ghz_local_mixedness`] in `r`, by bisection. The map is
/// strictly increasing from b(0) = 1.
pub fn squeezing_for_local_mixedness(n: usize, b: f64) -> Result<f64> {
    if b < 1.0 {
        return Err(Error::DomainError {
            context: format!("local mixedness must be >= 1, got {b}"),
        });
    }
    if b == 1.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while ghz_local_mixedness(n, hi) < b {
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::DomainError {
                context: format!("local mixedness {b} unreachable"),
            });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ghz_local_mixedness(n, mid) < b {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Assemble the CM of a bisymmetric block description.
pub fn assemble_bisymmetric(spec: &BisymmetricSpec) -> Result<CovarianceMatrix> {
    if spec.m >= 2 && spec.eps_alpha.is_none() || spec.n >= 2 && spec.eps_beta.is_none() {
        return Err(Error::NotBisymmetric {
            context: "off-diagonal block missing for a multi-mode side".to_owned(),
        });
    }
    let total = spec.m + spec.n;
    let mut m = DMatrix::zeros(2 * total, 2 * total);
    let zero = Matrix2::zeros();
    let gamma_t = spec.gamma.transpose();
    for i in 0..total {
        for j in 0..total {
            let block = match (i < spec.m, j < spec.m) {
                (true, true) => {
                    if i == j {
                        &spec.alpha
                    } else {
                        spec.eps_alpha.as_ref().unwrap_or(&zero)
                    }
                }
                (false, false) => {
                    if i == j {
                        &spec.beta
                    } else {
                        spec.eps_beta.as_ref().unwrap_or(&zero)
                    }
                }
                (true, false) => &spec.gamma,
                (false, true) => &gamma_t,
            };
            m.view_mut((2 * i, 2 * j), (2, 2)).copy_from(block);
        }
    }
    let cm = CovarianceMatrix::new(m)?;
    cm.assert_physical("assemble_bisymmetric")?;
    Ok(cm)
}

/// Detect the bisymmetric block pattern of `cm` for the m|(rest) split.
/// Errors with the first violating block pair.
pub fn detect_bisymmetric(cm: &CovarianceMatrix, m: usize) -> Result<BisymmetricSpec> {
    let total = cm.n_modes();
    if m == 0 || m >= total {
        return Err(Error::InvalidBipartition {
            context: format!("cannot split {total} modes at {m}"),
        });
    }
    let n = total - m;
    let close = |x: &Matrix2<f64>, y: &Matrix2<f64>| (x - y).abs().max() <= BISYMMETRY_TOL;
    let check_group = |lo: usize, hi: usize, what: &str| -> Result<(Matrix2<f64>, Option<Matrix2<f64>>)> {
        let diag = cm.mode_block(lo, lo);
        let mut off: Option<Matrix2<f64>> = None;
        for i in lo..hi {
            for j in lo..hi {
                let blk = cm.mode_block(i, j);
                if i == j {
                    if !close(&blk, &diag) {
                        return Err(Error::NotBisymmetric {
                            context: format!("{what} diagonal block ({i},{j}) differs from ({lo},{lo})"),
                        });
                    }
                } else {
                    match &off {
                        None => off = Some(blk),
                        Some(o) => {
                            if !close(&blk, o) {
                                return Err(Error::NotBisymmetric {
                                    context: format!("{what} off-diagonal block ({i},{j}) breaks the pattern"),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok((diag, off))
    };
    let (alpha, eps_alpha) = check_group(0, m, "first-side")?;
    let (beta, eps_beta) = check_group(m, total, "second-side")?;
    let gamma = cm.mode_block(0, m);
    for i in 0..m {
        for j in m..total {
            if !close(&cm.mode_block(i, j), &gamma) {
                return Err(Error::NotBisymmetric {
                    context: format!("cross block ({i},{j}) differs from (0,{m})"),
                });
            }
        }
    }
    Ok(BisymmetricSpec { m, n, alpha, eps_alpha, beta, eps_beta, gamma })
}

/// Degenerate part of a bisymmetric symplectic spectrum: the eigenvalue of
/// each reduced block that recurs in the global spectrum with multiplicity
/// (side size − 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub nu_alpha_minus: Option<f64>,
    pub mult_alpha: usize,
    pub nu_beta_minus: Option<f64>,
    pub mult_beta: usize,
}

/// Verify the spectral-degeneracy structure of a bisymmetric CM: the global
/// spectrum contains the degenerate block eigenvalues √det(α − ε_α) and
/// √det(β − ε_β) with multiplicities at least M−1 and N−1.
pub fn spectral_degeneracy(cm: &CovarianceMatrix, m: usize) -> Result<DegeneracyReport> {
    let spec = detect_bisymmetric(cm, m)?;
    let global = cm.symplectic_spectrum()?;
    let count = |nu: f64| global.values().iter().filter(|&&v| (v - nu).abs() <= 1e-7 * nu.max(1.0)).count();
    let mut report = DegeneracyReport {
        nu_alpha_minus: None,
        mult_alpha: 0,
        nu_beta_minus: None,
        mult_beta: 0,
    };
    if spec.m >= 2 {
        let nu = (spec.alpha - spec.eps_alpha.expect("m >= 2")).determinant().sqrt();
        let mult = count(nu);
        if mult + 1 < spec.m {
            return Err(Error::DegenerateNumerics {
                context: format!(
                    "degenerate eigenvalue {nu} appears {mult} times, expected at least {}",
                    spec.m - 1
                ),
            });
        }
        report.nu_alpha_minus = Some(nu);
        report.mult_alpha = mult;
    }
    if spec.n >= 2 {
        let nu = (spec.beta - spec.eps_beta.expect("n >= 2")).determinant().sqrt();
        let mult = count(nu);
        if mult + 1 < spec.n {
            return Err(Error::DegenerateNumerics {
                context: format!(
                    "degenerate eigenvalue {nu} appears {mult} times, expected at least {}",
                    spec.n - 1
                ),
            });
        }
        report.nu_beta_minus = Some(nu);
        report.mult_beta = mult;
    }
    Ok(report)
}

/// Result of unitarily localizing the M|N block entanglement.
#[derive(Debug, Clone)]
pub struct LocalizationResult {
    /// Two-mode CM carrying the full M|N entanglement (first mode of each block).
    pub eq_two_mode: CovarianceMatrix,
    /// The uncorrelated leftover single-mode CMs, in mode order.
    pub residual_modes: Vec<CovarianceMatrix>,
    /// The block-local transform (S_M ⊕ S_N) that was applied.
    pub s_local: SymplecticTransform,
}

/// Concentrate all M|N correlations of a bisymmetric CM onto the pair
/// (mode 0, mode m) by per-block balanced-splitter conjugation. The
/// transform is passive and local with respect to the M|N split.
pub fn unitary_localization(cm: &CovarianceMatrix, m: usize) -> Result<LocalizationResult> {
    detect_bisymmetric(cm, m)?;
    let n = cm.n_modes() - m;
    let s_m = mode_mixer(&balanced_reflection(m))?;
    let s_n = mode_mixer(&balanced_reflection(n))?;
    let s_local = s_m.direct_sum(&s_n);
    let rotated = cm.apply_symplectic(&s_local)?;

    let eq_two_mode = rotated.partial_trace(&[0, m])?;
    let mut residual_modes = Vec::with_capacity(m + n - 2);
    for mode in (1..m).chain((m + 1)..(m + n)) {
        residual_modes.push(rotated.partial_trace(&[mode])?);
    }
    Ok(LocalizationResult { eq_two_mode, residual_modes, s_local })
}

fn cm_block(m: &DMatrix<f64>, i: usize, j: usize) -> Matrix2<f64> {
    Matrix2::new(
        m[(2 * i, 2 * j)],
        m[(2 * i, 2 * j + 1)],
        m[(2 * i + 1, 2 * j)],
        m[(2 * i + 1, 2 * j + 1)],
    )
}

/// Max |entry| of all cross blocks between the localized pair and the
/// residual modes, and among residual modes. Zero for an exact localization.
pub fn localization_cross_residual(cm: &CovarianceMatrix, m: usize) -> Result<f64> {
    detect_bisymmetric(cm, m)?;
    let n = cm.n_modes() - m;
    let s_m = mode_mixer(&balanced_reflection(m))?;
    let s_n = mode_mixer(&balanced_reflection(n))?;
    let rotated = cm.apply_symplectic(&s_m.direct_sum(&s_n))?;
    let rm = rotated.matrix();
    let mut worst: f64 = 0.0;
    for i in 0..(m + n) {
        for j in (i + 1)..(m + n) {
            if i == 0 && j == m {
                continue; // the localized pair
            }
            worst = worst.max(cm_block(rm, i, j).abs().max());
        }
    }
    Ok(worst)
}

/// Log-negativity of the k|(rest) bipartition of a fully symmetric CM,
/// computed through the localized equivalent two-mode state.
pub fn block_log_negativity(cm: &CovarianceMatrix, k: usize) -> Result<f64> {
    let loc = unitary_localization(cm, k)?;
    loc.eq_two_mode.log_negativity(&Bipartition::first_k(1, 2)?)
}
