//! Two-mode Gaussian states: standard form, the (μ1, μ2, μ, Δ) invariant
//! parametrization, PPT eigenvalues, purity-based entanglement
//! classification, extremal (GMEMS/GLEMS) states and the average
//! log-negativity estimator.
//!
//! The four invariants determine a state up to local unitaries:
//! μ1, μ2 are the marginal purities, μ the global purity and
//! Δ = Det α + Det β + 2 Det γ. Physicality constrains them to
//!
//! ```text
//! μ1 μ2 ≤ μ ≤ μ1 μ2 / (μ1 μ2 + |μ1 − μ2|)
//! 2/μ + (μ1 − μ2)²/(μ1² μ2²) ≤ Δ ≤ 1 + 1/μ²
//! ```
//!
//! together with the existence of the radicals ε∓ of the inverse
//! parametrization (the upper Δ bound is not always attainable; see
//! [`standard_form_from_invariants`]).

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phasespace::{
    make_phase_rotation, CovarianceMatrix, SymplecticTransform,
};

/// Radicand roundoff clamp: values in [−1e−10, 0) are treated as 0.
const RADICAND_CLAMP: f64 = 1e-10;
/// Slack on the closed constraint comparisons of Eqs. (9)–(10).
const CONSTRAINT_TOL: f64 = 1e-9;

/// Standard form (a, a | b, b | c₊, c₋) of a two-mode CM.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoModeStandardForm {
    pub a: f64,
    pub b: f64,
    pub c_plus: f64,
    pub c_minus: f64,
}

impl TwoModeStandardForm {
    pub fn new(a: f64, b: f64, c_plus: f64, c_minus: f64) -> Result<Self> {
        if a < 1.0 - CONSTRAINT_TOL || b < 1.0 - CONSTRAINT_TOL {
            return Err(Error::ConstraintViolation {
                constraint: "standard form needs a >= 1 and b >= 1".to_owned(),
                amount: (1.0 - a).max(1.0 - b),
            });
        }
        if c_plus < -CONSTRAINT_TOL || c_plus < c_minus.abs() - CONSTRAINT_TOL {
            return Err(Error::ConstraintViolation {
                constraint: "ordering convention c+ >= |c-|, c+ >= 0".to_owned(),
                amount: (c_minus.abs() - c_plus).max(-c_plus),
            });
        }
        Ok(TwoModeStandardForm { a, b, c_plus, c_minus })
    }

    /// True when the marginals coincide (a = b within 1e−9).
    pub fn is_symmetric(&self) -> bool {
        (self.a - self.b).abs() <= 1e-9 * self.a.max(1.0)
    }
}

/// The symplectic-invariant quadruple (μ1, μ2, μ, Δ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoModeInvariants {
    pub mu1: f64,
    pub mu2: f64,
    pub mu: f64,
    pub delta: f64,
}

/// The radicals ε∓ of the inverse parametrization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantIntermediates {
    pub eps_minus: f64,
    pub eps_plus: f64,
}

/// Entanglement classification at fixed purities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntanglementClass {
    Separable,
    Coexistence,
    Entangled,
}

impl std::fmt::Display for EntanglementClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EntanglementClass::Separable => write!(f, "Separable"),
            EntanglementClass::Coexistence => write!(f, "Coexistence"),
            EntanglementClass::Entangled => write!(f, "Entangled"),
        }
    }
}

/// Symplectic eigenvalues of the partially transposed two-mode CM.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PptPair {
    pub nu_tilde_minus: f64,
    pub nu_tilde_plus: f64,
    pub delta_tilde: f64,
}

/// Extremal log-negativities at fixed purities, their average and the
/// relative error of the average as an estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalEntanglement {
    pub e_max: f64,
    pub e_min: f64,
    pub e_avg: f64,
    pub rel_error: f64,
}

/// Check the purity constraint μ1 μ2 ≤ μ ≤ μ1 μ2/(μ1 μ2 + |μ1 − μ2|).
pub fn check_purities(mu1: f64, mu2: f64, mu: f64) -> Result<()> {
    let ok_range = |x: f64| x > 0.0 && x <= 1.0 + CONSTRAINT_TOL;
    if !(ok_range(mu1) && ok_range(mu2) && ok_range(mu)) {
        return Err(Error::UnphysicalPurities { mu1, mu2, mu });
    }
    let lo = mu1 * mu2;
    let hi = mu1 * mu2 / (mu1 * mu2 + (mu1 - mu2).abs());
    if mu < lo - CONSTRAINT_TOL || mu > hi + CONSTRAINT_TOL {
        return Err(Error::UnphysicalPurities { mu1, mu2, mu });
    }
    Ok(())
}

/// The a-priori bounds on Δ at fixed purities:
/// 2/μ + (μ1 − μ2)²/(μ1² μ2²) ≤ Δ ≤ 1 + 1/μ².
pub fn delta_bounds(mu1: f64, mu2: f64, mu: f64) -> (f64, f64) {
    let lo = 2.0 / mu + (mu1 - mu2).powi(2) / (mu1 * mu1 * mu2 * mu2);
    let hi = 1.0 + 1.0 / (mu * mu);
    (lo, hi)
}

impl TwoModeInvariants {
    /// Validate against the purity and Δ constraints.
    pub fn new(mu1: f64, mu2: f64, mu: f64, delta: f64) -> Result<Self> {
        check_purities(mu1, mu2, mu)?;
        let (lo, hi) = delta_bounds(mu1, mu2, mu);
        if delta < lo - CONSTRAINT_TOL * lo.abs().max(1.0) || delta > hi + CONSTRAINT_TOL * hi.abs().max(1.0) {
            return Err(Error::ConstraintViolation {
                constraint: format!("Delta must lie in [{lo}, {hi}]"),
                amount: (lo - delta).max(delta - hi),
            });
        }
        Ok(TwoModeInvariants { mu1, mu2, mu, delta })
    }

    /// The radicals ε∓. Errors if a radicand is negative beyond roundoff,
    /// which happens for invariant quadruples that satisfy the Δ bounds but
    /// are still not realized by any state.
    pub fn intermediates(&self) -> Result<InvariantIntermediates> {
        let (mu1, mu2, mu, delta) = (self.mu1, self.mu2, self.mu, self.delta);
        let sq = |x: f64| x * x;
        let rad = |sign: f64| -> Result<f64> {
            let base = delta - sq(mu1 - sign * mu2) / sq(mu1 * mu2);
            let r = base * base - 4.0 / sq(mu);
            if r < -RADICAND_CLAMP {
                return Err(Error::NegativeRadicand {
                    context: format!(
                        "epsilon_{} radicand; the quadruple is not realized by any state",
                        if sign > 0.0 { "minus" } else { "plus" }
                    ),
                    radicand: r,
                });
            }
            Ok(r.max(0.0).sqrt())
        };
        Ok(InvariantIntermediates { eps_minus: rad(1.0)?, eps_plus: rad(-1.0)? })
    }
}

/// Extract (μ1, μ2, μ, Δ) from a physical two-mode CM.
pub fn invariants_from_cm(cm: &CovarianceMatrix) -> Result<TwoModeInvariants> {
    if cm.n_modes() != 2 {
        return Err(Error::DimensionMismatch {
            context: format!("two-mode analysis on a {}-mode state", cm.n_modes()),
        });
    }
    cm.assert_physical("invariants_from_cm")?;
    let det_a = cm.mode_block(0, 0).determinant();
    let det_b = cm.mode_block(1, 1).determinant();
    let det_g = cm.mode_block(0, 1).determinant();
    let det = cm.matrix().determinant();
    let inv = TwoModeInvariants {
        mu1: 1.0 / det_a.sqrt(),
        mu2: 1.0 / det_b.sqrt(),
        mu: 1.0 / det.sqrt(),
        delta: det_a + det_b + 2.0 * det_g,
    };
    // physical input: the constraints must come out satisfied
    TwoModeInvariants::new(inv.mu1, inv.mu2, inv.mu, inv.delta)
}

/// Invert the parametrization: standard form from the invariants,
/// a = 1/μ1, b = 1/μ2, c± = √(μ1 μ2)/4 (ε₋ ± ε₊).
///
/// Satisfying the Δ bounds is not enough for a quadruple to be realized by
/// a state: the radicals ε∓ must exist and the resulting matrix must be
/// positive (ab ≥ c₊²). Both are checked here; quadruples violating either
/// are unreachable from [`invariants_from_cm`].
pub fn standard_form_from_invariants(inv: &TwoModeInvariants) -> Result<TwoModeStandardForm> {
    let eps = inv.intermediates()?;
    let scale = (inv.mu1 * inv.mu2).sqrt() / 4.0;
    let c_plus = scale * (eps.eps_minus + eps.eps_plus);
    let c_minus = scale * (eps.eps_minus - eps.eps_plus);
    let (a, b) = (1.0 / inv.mu1, 1.0 / inv.mu2);
    let pos = a * b - c_plus * c_plus;
    if pos < -RADICAND_CLAMP * (a * b).max(1.0) {
        return Err(Error::ConstraintViolation {
            constraint: "positivity a·b >= c+^2; the quadruple is not realized by any state".to_owned(),
            amount: -pos,
        });
    }
    TwoModeStandardForm::new(a, b, c_plus, c_minus)
}

/// Assemble the 4×4 CM with diagonal 2×2 blocks from a standard form.
pub fn cm_from_standard_form(sf: &TwoModeStandardForm) -> Result<CovarianceMatrix> {
    let m = DMatrix::from_row_slice(
        4,
        4,
        &[
            sf.a, 0.0, sf.c_plus, 0.0, //
            0.0, sf.a, 0.0, sf.c_minus, //
            sf.c_plus, 0.0, sf.b, 0.0, //
            0.0, sf.c_minus, 0.0, sf.b,
        ],
    );
    let cm = CovarianceMatrix::new(m)?;
    cm.assert_physical("cm_from_standard_form")?;
    Ok(cm)
}

/// Standard form of an arbitrary physical two-mode CM, computed through the
/// invariants. The signs come out right on their own: the product c₊ c₋
/// reproduces Det γ of the input.
pub fn standard_form_from_cm(cm: &CovarianceMatrix) -> Result<TwoModeStandardForm> {
    let inv = invariants_from_cm(cm)?;
    standard_form_from_invariants(&inv)
}

fn sqrt2x2(m: &Matrix2<f64>) -> Matrix2<f64> {
    // symmetric PD 2x2 square root
    let eig = nalgebra::SymmetricEigen::new(*m);
    let d = Matrix2::from_diagonal(&eig.eigenvalues.map(|v| v.max(0.0).sqrt()));
    eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// Explicit local symplectic S = S1 ⊕ S2 that takes `cm` to its standard
/// form, returned together with the transformed CM. This is the
/// constructive counterpart of [`standard_form_from_cm`]; the two agree on
/// physical inputs and cross-validate each other.
pub fn standard_form_transform(cm: &CovarianceMatrix) -> Result<(SymplecticTransform, CovarianceMatrix)> {
    if cm.n_modes() != 2 {
        return Err(Error::DimensionMismatch {
            context: format!("standard form of a {}-mode state", cm.n_modes()),
        });
    }
    let alpha = cm.mode_block(0, 0);
    let beta = cm.mode_block(1, 1);
    let a = alpha.determinant().sqrt();
    let b = beta.determinant().sqrt();
    if a <= 0.0 || b <= 0.0 {
        return Err(Error::NotPositiveDefinite { min_eig: a.min(b) });
    }
    // L_i α L_i^T = a I; det L_i = 1 so each factor is symplectic.
    let l1 = sqrt2x2(&alpha).try_inverse().ok_or(Error::NotPositiveDefinite { min_eig: 0.0 })? * a.sqrt();
    let l2 = sqrt2x2(&beta).try_inverse().ok_or(Error::NotPositiveDefinite { min_eig: 0.0 })? * b.sqrt();
    let mut s = DMatrix::identity(4, 4);
    s.view_mut((0, 0), (2, 2)).copy_from(&l1);
    s.view_mut((2, 2), (2, 2)).copy_from(&l2);
    let stage1 = SymplecticTransform::new(s)?;
    let cm1 = cm.apply_symplectic(&stage1)?;
    // rotate both modes to diagonalize the cross block: γ = U Σ V^T with
    // proper rotations U, V (signs pushed into Σ).
    let gamma = cm1.mode_block(0, 1);
    let svd = gamma.svd(true, true);
    let mut u = svd.u.expect("2x2 svd");
    let mut v_t = svd.v_t.expect("2x2 svd");
    let s1 = svd.singular_values[0];
    let mut s2 = svd.singular_values[1];
    if u.determinant() < 0.0 {
        u.column_mut(1).neg_mut();
        s2 = -s2;
    }
    if v_t.determinant() < 0.0 {
        v_t.row_mut(1).neg_mut();
        s2 = -s2;
    }
    let mut rot = DMatrix::identity(4, 4);
    rot.view_mut((0, 0), (2, 2)).copy_from(&u.transpose());
    rot.view_mut((2, 2), (2, 2)).copy_from(&v_t);
    let stage2 = SymplecticTransform::new(rot)?;
    let mut total = stage1.then(&stage2)?;
    let mut out = cm.apply_symplectic(&total)?;
    let _ = (s1, s2);
    // enforce the ordering convention c+ >= |c-|, c+ >= 0
    let g = out.mode_block(0, 1);
    if g[(1, 1)].abs() > g[(0, 0)].abs() {
        let swap = make_phase_rotation(std::f64::consts::FRAC_PI_2);
        let both = crate::phasespace::embed_single_mode(&swap, 0, 2)?
            .then(&crate::phasespace::embed_single_mode(&swap, 1, 2)?)?;
        total = total.then(&both)?;
        out = cm.apply_symplectic(&total)?;
    }
    let g = out.mode_block(0, 1);
    if g[(0, 0)] < 0.0 {
        let flip = make_phase_rotation(std::f64::consts::PI);
        let on_second = crate::phasespace::embed_single_mode(&flip, 1, 2)?;
        total = total.then(&on_second)?;
        out = cm.apply_symplectic(&total)?;
    }
    Ok((total, out))
}

/// Δ̃ and the PPT eigenvalue pair 2ν̃∓² = Δ̃ ∓ √(Δ̃² − 4/μ²).
pub fn ppt_eigenvalues(inv: &TwoModeInvariants) -> Result<PptPair> {
    let delta_tilde = -inv.delta + 2.0 / (inv.mu1 * inv.mu1) + 2.0 / (inv.mu2 * inv.mu2);
    let rad = delta_tilde * delta_tilde - 4.0 / (inv.mu * inv.mu);
    if rad < -RADICAND_CLAMP * delta_tilde.abs().max(1.0) {
        return Err(Error::NegativeRadicand {
            context: "PPT eigenvalue radicand".to_owned(),
            radicand: rad,
        });
    }
    let root = rad.max(0.0).sqrt();
    let minus_sq = 0.5 * (delta_tilde - root);
    let plus_sq = 0.5 * (delta_tilde + root);
    if minus_sq < -RADICAND_CLAMP {
        return Err(Error::NegativeRadicand {
            context: "negative squared PPT eigenvalue".to_owned(),
            radicand: minus_sq,
        });
    }
    Ok(PptPair {
        nu_tilde_minus: minus_sq.max(0.0).sqrt(),
        nu_tilde_plus: plus_sq.max(0.0).sqrt(),
        delta_tilde,
    })
}

/// E_N = max{0, −ln ν̃₋} from the invariants.
pub fn log_negativity_two_mode(inv: &TwoModeInvariants) -> Result<f64> {
    let ppt = ppt_eigenvalues(inv)?;
    Ok((-ppt.nu_tilde_minus.ln()).max(0.0))
}

/// Separability classification in the purity manifold:
///
/// ```text
/// μ ≤ μ1μ2/(μ1 + μ2 − μ1μ2)            separable
///   ≤ μ1μ2/√(μ1² + μ2² − μ1²μ2²)       coexistence
///   beyond                              entangled
/// ```
///
/// Boundary points go to the lower band (closed lower intervals).
pub fn classify_by_purities(mu1: f64, mu2: f64, mu: f64) -> Result<EntanglementClass> {
    check_purities(mu1, mu2, mu)?;
    let sep = mu1 * mu2 / (mu1 + mu2 - mu1 * mu2);
    let coex = mu1 * mu2 / (mu1 * mu1 + mu2 * mu2 - mu1 * mu1 * mu2 * mu2).sqrt();
    if mu <= sep {
        Ok(EntanglementClass::Separable)
    } else if mu <= coex {
        Ok(EntanglementClass::Coexistence)
    } else {
        Ok(EntanglementClass::Entangled)
    }
}

/// Maximally entangled mixed state at fixed purities: Δ at its lower bound
/// (a two-mode squeezed thermal state; for μ1 = μ2 its symplectic spectrum
/// is fully degenerate).
pub fn gmems(mu1: f64, mu2: f64, mu: f64) -> Result<TwoModeStandardForm> {
    check_purities(mu1, mu2, mu)?;
    let (lo, _) = delta_bounds(mu1, mu2, mu);
    standard_form_from_invariants(&TwoModeInvariants::new(mu1, mu2, mu, lo)?)
}

/// Least entangled mixed state at fixed purities: Δ at its upper bound
/// (a state of partial minimum uncertainty, ν₋ = 1). Errors with
/// `ConstraintViolation` for purity triples where no such state exists;
/// those lie strictly inside the separable band.
pub fn glems(mu1: f64, mu2: f64, mu: f64) -> Result<TwoModeStandardForm> {
    check_purities(mu1, mu2, mu)?;
    let (_, hi) = delta_bounds(mu1, mu2, mu);
    standard_form_from_invariants(&TwoModeInvariants::new(mu1, mu2, mu, hi)?).map_err(|e| match e {
        Error::NegativeRadicand { radicand, .. } => Error::ConstraintViolation {
            constraint: "no partial-minimum-uncertainty state at these purities".to_owned(),
            amount: -radicand,
        },
        other => other,
    })
}

/// Extremal log-negativities at fixed purities. `e_max` comes from the
/// GMEMS, `e_min` from the GLEMS; where the GLEMS does not exist the
/// purities are necessarily in the separable band and `e_min = 0`.
///
/// `rel_error` is (e_max − e_min)/(e_max + e_min); by convention it is 1
/// when e_min = 0 < e_max, and 0 when both bounds vanish or coincide.
pub fn extremal_entanglement(mu1: f64, mu2: f64, mu: f64) -> Result<ExtremalEntanglement> {
    let e_max = log_negativity_two_mode(&invariants_of(&gmems(mu1, mu2, mu)?))?;
    let e_min = match glems(mu1, mu2, mu) {
        Ok(sf) => log_negativity_two_mode(&invariants_of(&sf))?,
        Err(Error::ConstraintViolation { .. }) => 0.0,
        Err(e) => return Err(e),
    };
    let e_avg = 0.5 * (e_max + e_min);
    let rel_error = if e_max + e_min <= 0.0 {
        0.0
    } else if e_min == 0.0 {
        1.0
    } else {
        (e_max - e_min) / (e_max + e_min)
    };
    Ok(ExtremalEntanglement { e_max, e_min, e_avg, rel_error })
}

fn invariants_of(sf: &TwoModeStandardForm) -> TwoModeInvariants {
    let det = (sf.a * sf.b - sf.c_plus * sf.c_plus) * (sf.a * sf.b - sf.c_minus * sf.c_minus);
    TwoModeInvariants {
        mu1: 1.0 / sf.a,
        mu2: 1.0 / sf.b,
        mu: 1.0 / det.sqrt(),
        delta: sf.a * sf.a + sf.b * sf.b + 2.0 * sf.c_plus * sf.c_minus,
    }
}

/// The entropy-like function
/// f(x) = (1+x)²/(4x) ln((1+x)²/(4x)) − (1−x)²/(4x) ln((1−x)²/(4x))
/// with the z ln z → 0 convention at the removable point x = 1.
pub fn eof_log_function(x: f64) -> f64 {
    fn zlogz(z: f64) -> f64 {
        if z <= 0.0 {
            0.0
        } else {
            z * z.ln()
        }
    }
    zlogz((1.0 + x) * (1.0 + x) / (4.0 * x)) - zlogz((1.0 - x) * (1.0 - x) / (4.0 * x))
}

/// Entanglement of formation of a *symmetric* two-mode state: f(ν̃₋) for
/// ν̃₋ < 1, else 0. For asymmetric marginals no closed form is available
/// and the call is refused.
pub fn eof_symmetric(inv: &TwoModeInvariants) -> Result<f64> {
    let a = 1.0 / inv.mu1;
    let b = 1.0 / inv.mu2;
    if (a - b).abs() > 1e-6 * a.max(1.0) {
        return Err(Error::NotSymmetric { deviation: (a - b).abs() });
    }
    let ppt = ppt_eigenvalues(inv)?;
    if ppt.nu_tilde_minus >= 1.0 {
        return Ok(0.0);
    }
    Ok(eof_log_function(ppt.nu_tilde_minus))
}
