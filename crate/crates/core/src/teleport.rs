//! Continuous-variable teleportation networks: N-party shared resources
//! from squeezed inputs and an N-splitter, homodyne conditioning of the
//! assisting modes, the coherent-state output map, fidelity, optimization
//! over the squeezing bias, and the Entanglement of Teleportation with its
//! closed-form links to the localizable EoF and the tripartite contangle.
//!
//! Conventions: unit-gain protocol, displacement feedforward absorbed. The
//! teleported output CM for a two-mode resource (α, β, γ) and a coherent
//! input is σ_out = 1 + ZαZ + β − Zγ − γ^T Z with Z = diag(1, −1) — the
//! added noise is the variance of (x_B − x_A, p_B + p_A). Fidelity for
//! coherent inputs is F = 2/√Det(1 + σ_out), which meets the classical
//! benchmark F = 1/2 exactly for resources with no entanglement.

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multimode::n_splitter;
use crate::phasespace::{make_squeezer, CovarianceMatrix, SqueezeAxis};
use crate::twomode::eof_log_function;

/// Recipe for the N-party shared resource: one momentum-squeezed input at
/// `r1`, N−1 position-squeezed inputs at `r2`, a common thermal factor.
/// Negative squeezing values mean squeezing of the conjugate quadrature;
/// the optimizer explores that region when unbalancing the resource.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeleportResourceSpec {
    pub n_parties: usize,
    pub r1: f64,
    pub r2: f64,
    pub noise: f64,
}

impl TeleportResourceSpec {
    pub fn new(n_parties: usize, r1: f64, r2: f64, noise: f64) -> Result<Self> {
        if n_parties < 2 {
            return Err(Error::DimensionMismatch {
                context: "a teleportation network needs at least two parties".to_owned(),
            });
        }
        if !r1.is_finite() || !r2.is_finite() || !(noise.is_finite() && noise >= 1.0) {
            return Err(Error::DomainError {
                context: "resource spec needs finite squeezings and noise >= 1".to_owned(),
            });
        }
        Ok(TeleportResourceSpec { n_parties, r1, r2, noise })
    }

    /// Average squeezing r̄ = (r1 + r2)/2, the local-unitary invariant of
    /// the family.
    pub fn r_bar(&self) -> f64 {
        0.5 * (self.r1 + self.r2)
    }
}

/// Optimal-fidelity result: the fidelity itself, the entanglement of
/// teleportation E_T = max{0, 2F − 1}, and the bias d = r1 − r2 attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityResult {
    pub fidelity: f64,
    pub e_t: f64,
    pub optimal_bias: f64,
}

/// Quadrature selected by a homodyne detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quadrature {
    X,
    P,
}

/// Build the shared resource: (p-squeezer(r1) ⊕ x-squeezer(r2)^{⊕N−1})
/// vacua, each scaled by the thermal factor, through the N-splitter.
/// Fully symmetric; pure iff noise = 1.
pub fn build_resource(spec: &TeleportResourceSpec) -> Result<CovarianceMatrix> {
    let mut inputs = CovarianceMatrix::vacuum(1).apply_symplectic(&make_squeezer(spec.r1, SqueezeAxis::P))?;
    for _ in 1..spec.n_parties {
        let x = CovarianceMatrix::vacuum(1).apply_symplectic(&make_squeezer(spec.r2, SqueezeAxis::X))?;
        inputs = inputs.direct_sum(&x);
    }
    let scaled = CovarianceMatrix::new(inputs.matrix().scale(spec.noise))?;
    scaled.apply_symplectic(&n_splitter(spec.n_parties)?)
}

/// Homodyne detection of one quadrature of `mode`: conditions the remaining
/// modes through the Schur complement A − c c^T / B_qq and drops the
/// measured mode. Gaussian CMs are independent of the measurement outcome.
pub fn homodyne_condition(cm: &CovarianceMatrix, mode: usize, quad: Quadrature) -> Result<CovarianceMatrix> {
    let n = cm.n_modes();
    if mode >= n {
        return Err(Error::IndexOutOfRange { index: mode, n_modes: n });
    }
    if n < 2 {
        return Err(Error::DimensionMismatch {
            context: "homodyne conditioning needs at least two modes".to_owned(),
        });
    }
    cm.assert_physical("homodyne_condition")?;
    let keep: Vec<usize> = (0..n).filter(|&m| m != mode).collect();
    let rows: Vec<usize> = keep.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
    let q = match quad {
        Quadrature::X => 2 * mode,
        Quadrature::P => 2 * mode + 1,
    };
    let m = cm.matrix();
    let b_qq = m[(q, q)];
    let mut out = DMatrix::zeros(rows.len(), rows.len());
    for (i, &ri) in rows.iter().enumerate() {
        for (j, &rj) in rows.iter().enumerate() {
            out[(i, j)] = m[(ri, rj)] - m[(ri, q)] * m[(rj, q)] / b_qq;
        }
    }
    CovarianceMatrix::new(out)
}

/// Output CM of unit-gain coherent-state teleportation over a two-mode
/// resource (sender = mode 0, receiver = mode 1).
pub fn bk_output_cm(resource: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    if resource.n_modes() != 2 {
        return Err(Error::DimensionMismatch {
            context: "teleportation output map needs a two-mode resource".to_owned(),
        });
    }
    let alpha = resource.mode_block(0, 0);
    let beta = resource.mode_block(1, 1);
    let gamma = resource.mode_block(0, 1);
    let z = Matrix2::new(1.0, 0.0, 0.0, -1.0);
    let out = Matrix2::identity() + z * alpha * z + beta - z * gamma - gamma.transpose() * z;
    CovarianceMatrix::new(DMatrix::from_row_slice(
        2,
        2,
        &[out[(0, 0)], out[(0, 1)], out[(1, 0)], out[(1, 1)]],
    ))
}

/// Fidelity of teleporting a coherent state, F = 2/√Det(1 + σ_out).
pub fn fidelity_coherent(sigma_out: &CovarianceMatrix) -> Result<f64> {
    if sigma_out.n_modes() != 1 {
        return Err(Error::DimensionMismatch {
            context: "coherent-state fidelity takes a single-mode output CM".to_owned(),
        });
    }
    sigma_out.assert_physical("fidelity_coherent")?;
    let m = sigma_out.matrix() + DMatrix::identity(2, 2);
    Ok(2.0 / m.determinant().sqrt())
}

/// End-to-end network fidelity: p-homodyne every assisting mode, then
/// teleport over the surviving (sender, receiver) pair. On fully symmetric
/// resources the result does not depend on which pair is chosen.
pub fn network_fidelity(resource: &CovarianceMatrix, sender: usize, receiver: usize) -> Result<f64> {
    let n = resource.n_modes();
    if sender >= n || receiver >= n {
        return Err(Error::IndexOutOfRange { index: sender.max(receiver), n_modes: n });
    }
    if sender == receiver {
        return Err(Error::InvalidBipartition {
            context: "sender and receiver must differ".to_owned(),
        });
    }
    let mut cur = resource.clone();
    let mut modes: Vec<usize> = (0..n).collect();
    while modes.len() > 2 {
        let assist_pos = modes
            .iter()
            .rposition(|&m| m != sender && m != receiver)
            .expect("more than two modes left");
        cur = homodyne_condition(&cur, assist_pos, Quadrature::P)?;
        modes.remove(assist_pos);
    }
    let pair = if modes[0] == sender {
        cur
    } else {
        // swap so the sender comes first
        let perm = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        cur.apply_symplectic(&crate::phasespace::mode_mixer(&perm)?)?
    };
    fidelity_coherent(&bk_output_cm(&pair)?)
}

/// F_cl for coherent-state alphabets.
pub const CLASSICAL_FIDELITY: f64 = 0.5;

/// Maximize the network fidelity over the squeezing bias d = r1 − r2 at
/// fixed r̄ = (r1 + r2)/2: a bracketing scan over d ∈ [−4r̄−2, 4r̄+2]
/// (restricted to r1 ≥ 0) followed by golden-section refinement.
pub fn optimal_fidelity(n: usize, r_bar: f64, noise: f64) -> Result<FidelityResult> {
    if n < 2 || !(r_bar.is_finite() && r_bar >= 0.0) {
        return Err(Error::DomainError {
            context: "optimal_fidelity needs n >= 2 and r_bar >= 0".to_owned(),
        });
    }
    let f_of = |d: f64| -> Result<f64> {
        let r1 = r_bar + 0.5 * d;
        if r1 < 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        let spec = TeleportResourceSpec::new(n, r1, r_bar - 0.5 * d, noise)?;
        network_fidelity(&build_resource(&spec)?, 0, 1)
    };
    let (d_lo, d_hi) = (-2.0 * r_bar, 4.0 * r_bar + 2.0);
    let scan = 64usize;
    let mut best_k = 0usize;
    let mut best_f = f64::NEG_INFINITY;
    for k in 0..=scan {
        let d = d_lo + (d_hi - d_lo) * k as f64 / scan as f64;
        let f = f_of(d)?;
        if f > best_f {
            best_f = f;
            best_k = k;
        }
    }
    if !best_f.is_finite() {
        return Err(Error::OptimizerFailure {
            context: "fidelity bracketing scan found no admissible bias".to_owned(),
            best: f64::NAN,
            spread: f64::NAN,
        });
    }
    let step = (d_hi - d_lo) / scan as f64;
    let mut lo = d_lo + step * (best_k.saturating_sub(1)) as f64;
    let mut hi = (d_lo + step * (best_k + 1) as f64).min(d_hi);
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut c, mut d) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
    let (mut fc, mut fd) = (f_of(c)?, f_of(d)?);
    while hi - lo > 1e-8 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - phi * (hi - lo);
            fc = f_of(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + phi * (hi - lo);
            fd = f_of(d)?;
        }
    }
    let d_opt = 0.5 * (lo + hi);
    let fidelity = f_of(d_opt)?.max(best_f);
    Ok(FidelityResult {
        fidelity,
        e_t: entanglement_of_teleportation(fidelity),
        optimal_bias: d_opt,
    })
}

/// E_T = max{0, (F − F_cl)/(1 − F_cl)} = max{0, 2F − 1}.
pub fn entanglement_of_teleportation(f_opt: f64) -> f64 {
    ((f_opt - CLASSICAL_FIDELITY) / (1.0 - CLASSICAL_FIDELITY)).max(0.0)
}

/// Localizable entanglement of formation as a function of E_T:
/// E_F^loc = f[(1 − E_T)/(1 + E_T)].
pub fn localizable_eof_from_et(e_t: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&e_t) {
        return Err(Error::DomainError {
            context: format!("E_T must lie in [0, 1), got {e_t}"),
        });
    }
    Ok(eof_log_function((1.0 - e_t) / (1.0 + e_t)))
}

/// Residual contangle of the pure three-mode resource as a function of E_T.
/// Monotonically increasing, 0 at E_T = 0; the E_T = 1 endpoint is singular
/// (infinite squeezing) and the domain is capped at 1 − 1e−9.
pub fn tripartite_contangle_from_et(e_t: f64) -> Result<f64> {
    if !(0.0..=(1.0 - 1e-9)).contains(&e_t) {
        return Err(Error::DomainError {
            context: format!("E_T must lie in [0, 1 - 1e-9], got {e_t}"),
        });
    }
    if e_t == 0.0 {
        return Ok(0.0);
    }
    let num = 2.0 * 2.0f64.sqrt() * e_t - (e_t + 1.0) * (e_t * e_t + 1.0).sqrt();
    let den = (e_t - 1.0) * (e_t * (e_t + 4.0) + 1.0).sqrt();
    let first = (num / den).ln().powi(2);
    let second = 0.5 * ((e_t * e_t + 1.0) / (e_t * (e_t + 4.0) + 1.0)).ln().powi(2);
    Ok(first - second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multimode::{ghz_type_state, GhzTypeSpec};
    use crate::phasespace::two_mode_squeezed_vacuum;
    use approx::assert_relative_eq;

    #[test]
    fn resource_examples() {
        // (N=2, r, r, 1) is the TMSV
        let spec = TeleportResourceSpec::new(2, 0.9, 0.9, 1.0).unwrap();
        let got = build_resource(&spec).unwrap();
        assert_relative_eq!(
            (got.matrix() - two_mode_squeezed_vacuum(0.9).matrix()).abs().max(),
            0.0,
            epsilon = 1e-12
        );

        // (N, 0, 0, 1) is the vacuum
        let spec = TeleportResourceSpec::new(4, 0.0, 0.0, 1.0).unwrap();
        let got = build_resource(&spec).unwrap();
        assert_relative_eq!(
            (got.matrix() - CovarianceMatrix::vacuum(4).matrix()).abs().max(),
            0.0,
            epsilon = 1e-12
        );

        // (N=3, r, r, 1) matches the GHZ-type constructor entrywise
        let spec = TeleportResourceSpec::new(3, 0.6, 0.6, 1.0).unwrap();
        let got = build_resource(&spec).unwrap();
        let want = ghz_type_state(&GhzTypeSpec::new(3, 0.6, 1.0).unwrap()).unwrap();
        assert_relative_eq!((got.matrix() - want.matrix()).abs().max(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn homodyne_examples() {
        // product state: conditioning does nothing to the reduced state
        let prod = CovarianceMatrix::vacuum(1).direct_sum(&two_mode_squeezed_vacuum(0.4));
        let out = homodyne_condition(&prod, 0, Quadrature::X).unwrap();
        assert_relative_eq!(
            (out.matrix() - two_mode_squeezed_vacuum(0.4).matrix()).abs().max(),
            0.0,
            epsilon = 1e-12
        );

        // TMSV, measure p on mode 1: explicit 2x2 algebra oracle
        // conditional CM = diag(cosh 2r, cosh 2r − sinh² 2r / cosh 2r)
        let r = 0.8f64;
        let c = (2.0 * r).cosh();
        let s = (2.0 * r).sinh();
        let out = homodyne_condition(&two_mode_squeezed_vacuum(r), 1, Quadrature::P).unwrap();
        assert_relative_eq!(out.matrix()[(0, 0)], c, max_relative = 1e-12);
        assert_relative_eq!(out.matrix()[(1, 1)], c - s * s / c, max_relative = 1e-12);
        assert!(out.matrix()[(1, 1)] < 1.0); // conditional squeezing below vacuum
        assert!(out.validate().physical);

        // conditioning a mode then ignoring the result equals tracing it out
        // as far as the remaining-mode marginals are concerned only when
        // uncorrelated; structural check: measuring x of an already-measured
        // (removed) mode is just a partial trace on the block-diagonal state
        let two = CovarianceMatrix::vacuum(2);
        let a = homodyne_condition(&two, 1, Quadrature::X).unwrap();
        let b = two.partial_trace(&[0]).unwrap();
        assert_relative_eq!((a.matrix() - b.matrix()).abs().max(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn bk_output_examples() {
        // two-mode vacuum resource: I + I + I = 3 I
        let out = bk_output_cm(&CovarianceMatrix::vacuum(2)).unwrap();
        assert_relative_eq!(
            (out.matrix() - DMatrix::<f64>::identity(2, 2).scale(3.0)).abs().max(),
            0.0,
            epsilon = 1e-12
        );

        // TMSV resource: diag entries 1 + 2 e^{−2r}
        for r in [0.3, 1.0, 2.5] {
            let out = bk_output_cm(&two_mode_squeezed_vacuum(r)).unwrap();
            let want = 1.0 + 2.0 * (-2.0 * r).exp();
            assert_relative_eq!(out.matrix()[(0, 0)], want, max_relative = 1e-12);
            assert_relative_eq!(out.matrix()[(1, 1)], want, max_relative = 1e-12);
            assert_relative_eq!(out.matrix()[(0, 1)], 0.0, epsilon = 1e-12);
        }
        // r → ∞: perfect transfer (already within 1e-4 at r = 5)
        let out = bk_output_cm(&two_mode_squeezed_vacuum(5.0)).unwrap();
        assert_relative_eq!(out.matrix()[(0, 0)], 1.0, max_relative = 1e-4);
    }

    #[test]
    fn fidelity_examples() {
        assert_relative_eq!(fidelity_coherent(&CovarianceMatrix::vacuum(1)).unwrap(), 1.0);
        let three = CovarianceMatrix::new(DMatrix::identity(2, 2).scale(3.0)).unwrap();
        assert_relative_eq!(fidelity_coherent(&three).unwrap(), 0.5, max_relative = 1e-15);

        // chained oracle: TMSV resource gives 1/(1 + e^{−2r})
        for r in [0.3, 1.0, 2.0] {
            let f = network_fidelity(&two_mode_squeezed_vacuum(r), 0, 1).unwrap();
            assert_relative_eq!(f, 1.0 / (1.0 + (-2.0 * r).exp()), max_relative = 1e-12);
        }

        // vacuum resource of any size: the classical bound, exactly
        for n in [2usize, 3, 5] {
            let f = network_fidelity(&CovarianceMatrix::vacuum(n), 0, 1).unwrap();
            assert_relative_eq!(f, 0.5, max_relative = 1e-15);
        }
    }

    #[test]
    fn network_fidelity_pair_independent() {
        let spec = TeleportResourceSpec::new(4, 0.7, 0.5, 1.1).unwrap();
        let resource = build_resource(&spec).unwrap();
        let f01 = network_fidelity(&resource, 0, 1).unwrap();
        for (s, r) in [(1usize, 2usize), (2, 3), (3, 0), (1, 0)] {
            let f = network_fidelity(&resource, s, r).unwrap();
            assert_relative_eq!(f, f01, epsilon = 1e-9);
        }
    }

    #[test]
    fn equal_squeezing_not_optimal_for_three_parties() {
        let r = 1.0;
        let equal = network_fidelity(
            &build_resource(&TeleportResourceSpec::new(3, r, r, 1.0).unwrap()).unwrap(),
            0,
            1,
        )
        .unwrap();
        let opt = optimal_fidelity(3, r, 1.0).unwrap();
        assert!(opt.fidelity > equal + 1e-4, "optimum {} vs equal {equal}", opt.fidelity);
        assert!(opt.optimal_bias.abs() > 1e-3);
    }

    #[test]
    fn optimal_fidelity_examples() {
        // zero squeezing: classical bound, E_T = 0
        let res = optimal_fidelity(4, 0.0, 1.0).unwrap();
        assert_relative_eq!(res.fidelity, 0.5, max_relative = 1e-12);
        assert_relative_eq!(res.e_t, 0.0);

        // N = 2: the optimum is the balanced TMSV, F = 1/(1 + e^{−2r̄})
        for rb in [0.3, 1.0, 2.0] {
            let res = optimal_fidelity(2, rb, 1.0).unwrap();
            assert_relative_eq!(res.fidelity, 1.0 / (1.0 + (-2.0 * rb).exp()), max_relative = 1e-9);
            assert!(res.optimal_bias.abs() < 1e-3);
            assert_relative_eq!(res.e_t, rb.tanh(), max_relative = 1e-8);
        }
    }

    #[test]
    fn et_arithmetic() {
        assert_relative_eq!(entanglement_of_teleportation(0.5), 0.0);
        assert_relative_eq!(entanglement_of_teleportation(0.75), 0.5);
        assert_relative_eq!(entanglement_of_teleportation(1.0), 1.0);
    }

    #[test]
    fn localizable_eof_examples() {
        assert_relative_eq!(localizable_eof_from_et(0.0).unwrap(), 0.0, epsilon = 1e-12);
        // E_T = tanh r reproduces the TMSV entanglement of formation
        for r in [0.3f64, 1.0, 2.0] {
            let want = r.cosh().powi(2) * r.cosh().powi(2).ln() - r.sinh().powi(2) * r.sinh().powi(2).ln();
            assert_relative_eq!(localizable_eof_from_et(r.tanh()).unwrap(), want, max_relative = 1e-9);
        }
        // direct arithmetic at E_T = 0.5
        assert_relative_eq!(
            localizable_eof_from_et(0.5).unwrap(),
            eof_log_function(1.0 / 3.0),
            max_relative = 1e-12
        );
        // monotonically increasing
        let mut last = -1.0;
        for k in 0..9 {
            let v = localizable_eof_from_et(0.1 * k as f64).unwrap();
            assert!(v > last || k == 0);
            last = v;
        }
        assert!(localizable_eof_from_et(1.0).is_err());
    }

    #[test]
    fn tripartite_contangle_curve() {
        assert_relative_eq!(tripartite_contangle_from_et(0.0).unwrap(), 0.0);
        let mut last = 0.0;
        for k in 1..=9 {
            let v = tripartite_contangle_from_et(0.1 * k as f64).unwrap();
            assert!(v > last, "not strictly increasing at E_T = {}", 0.1 * k as f64);
            last = v;
        }
        assert!(tripartite_contangle_from_et(1.0).is_err());
    }

    #[test]
    fn consistency_triangle_two_parties() {
        // localizable EoF from E_T equals the resource's symmetric EoF
        for rb in [0.4, 1.1] {
            let res = optimal_fidelity(2, rb, 1.0).unwrap();
            let resource = build_resource(&TeleportResourceSpec::new(2, rb, rb, 1.0).unwrap()).unwrap();
            let inv = crate::twomode::invariants_from_cm(&resource).unwrap();
            let direct = crate::twomode::eof_symmetric(&inv).unwrap();
            assert_relative_eq!(localizable_eof_from_et(res.e_t).unwrap(), direct, max_relative = 1e-7);
        }
    }
}
