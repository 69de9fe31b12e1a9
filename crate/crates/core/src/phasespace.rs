//! Covariance-matrix algebra for Gaussian states of bosonic modes.
//!
//! States are represented by their 2N×2N real covariance matrix (CM) of
//! quadrature second moments, in mode-major ordering (x1, p1, x2, p2, ...)
//! and vacuum normalization (vacuum CM = identity). First moments are not
//! stored: every quantity computed here is invariant under displacements.
//!
//! Conventions:
//! - the symplectic form is `Ω = ⊕ ω` with `ω = [[0, 1], [-1, 0]]`;
//! - a CM is physical iff its smallest symplectic eigenvalue is ≥ 1;
//! - all logarithms are natural, so the log-negativity of a two-mode
//!   squeezed vacuum at squeezing `r` is exactly `2r`;
//! - the Williamson factorization returned here is `σ = S ν S^T`.

use nalgebra::{Complex, DMatrix, DVector, Matrix2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entry-wise symmetry tolerance: |σ_ij − σ_ji| ≤ tol · max(1, |σ_ij|).
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Physicality tolerance on the smallest symplectic eigenvalue: ν_min ≥ 1 − tol.
pub const PHYSICALITY_TOL: f64 = 1e-9;
/// Max-norm tolerance on S^T Ω S − Ω for symplectic transforms.
pub const SYMPLECTIC_TOL: f64 = 1e-8;
/// Physicality slack used as operation precondition. Pure states sit on the
/// ν_min = 1 boundary exactly, and matrices built by long chains of
/// congruences or through the invariant parametrization land within
/// O(sqrt(eps)) of it, so preconditions are checked at 1e−7 while
/// [`CovarianceMatrix::validate`] reports at the strict 1e−9.
pub const OP_PHYSICALITY_TOL: f64 = 1e-7;
/// Relative max-norm tolerance on the Williamson reconstruction S ν S^T − σ.
pub const WILLIAMSON_RESIDUAL_TOL: f64 = 1e-7;

fn is_symmetric(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL * m[(i, j)].abs().max(1.0) {
                return false;
            }
        }
    }
    true
}

fn check_finite(m: &DMatrix<f64>) -> Result<()> {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if !m[(i, j)].is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// The symplectic form `Ω = ⊕ ω` on `n` modes.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Covariance matrix of an N-mode Gaussian state (or of a partial transpose
/// of one, which may be unphysical: construction only enforces shape,
/// finiteness and symmetry).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CmJson", into = "CmJson")]
pub struct CovarianceMatrix {
    n_modes: usize,
    entries: DMatrix<f64>,
}

/// On-disk JSON form of a CM. This is the only state representation the
/// command-line tools read and write.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CmJson {
    pub n_modes: usize,
    pub ordering: String,
    pub matrix: Vec<Vec<f64>>,
}

impl TryFrom<CmJson> for CovarianceMatrix {
    type Error = Error;

    fn try_from(j: CmJson) -> Result<Self> {
        if j.ordering != "xpxp" {
            return Err(Error::DimensionMismatch {
                context: format!("unsupported quadrature ordering {:?}", j.ordering),
            });
        }
        let dim = 2 * j.n_modes;
        if j.matrix.len() != dim || j.matrix.iter().any(|row| row.len() != dim) {
            return Err(Error::DimensionMismatch {
                context: format!("matrix is not {dim}x{dim}"),
            });
        }
        let m = DMatrix::from_fn(dim, dim, |i, k| j.matrix[i][k]);
        CovarianceMatrix::new(m)
    }
}

impl From<CovarianceMatrix> for CmJson {
    fn from(cm: CovarianceMatrix) -> Self {
        CmJson {
            n_modes: cm.n_modes,
            ordering: "xpxp".to_owned(),
            matrix: (0..2 * cm.n_modes)
                .map(|i| (0..2 * cm.n_modes).map(|j| cm.entries[(i, j)]).collect())
                .collect(),
        }
    }
}

/// Report produced by [`CovarianceMatrix::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub symmetric: bool,
    pub physical: bool,
    pub nu_min: f64,
}

impl CovarianceMatrix {
    /// Wrap a 2N×2N matrix. Checks shape, finiteness and symmetry, then
    /// symmetrizes exactly; physicality is *not* enforced here.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        check_finite(&entries)?;
        let dim = entries.nrows();
        if entries.ncols() != dim || dim == 0 || dim % 2 != 0 {
            return Err(Error::DimensionMismatch {
                context: format!("covariance matrix must be 2Nx2N, got {}x{}", dim, entries.ncols()),
            });
        }
        if !is_symmetric(&entries) {
            return Err(Error::DimensionMismatch {
                context: "covariance matrix is not symmetric".to_owned(),
            });
        }
        let sym = (&entries + entries.transpose()).scale(0.5);
        Ok(CovarianceMatrix { n_modes: dim / 2, entries: sym })
    }

    /// Vacuum state on `n` modes (identity CM).
    pub fn vacuum(n_modes: usize) -> Self {
        CovarianceMatrix {
            n_modes,
            entries: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// The 2×2 block coupling modes `i` and `j`.
    pub fn mode_block(&self, i: usize, j: usize) -> Matrix2<f64> {
        Matrix2::new(
            self.entries[(2 * i, 2 * j)],
            self.entries[(2 * i, 2 * j + 1)],
            self.entries[(2 * i + 1, 2 * j)],
            self.entries[(2 * i + 1, 2 * j + 1)],
        )
    }

    /// Symmetry and physicality report. `physical` is true iff the smallest
    /// symplectic eigenvalue satisfies ν_min ≥ 1 − 1e−9 (and the matrix is
    /// positive semidefinite, which rules out spectra of indefinite inputs).
    pub fn validate(&self) -> ValidationReport {
        self.validate_with(PHYSICALITY_TOL)
    }

    fn validate_with(&self, nu_tol: f64) -> ValidationReport {
        let symmetric = is_symmetric(&self.entries);
        let nu_min = match self.symplectic_spectrum() {
            Ok(spec) => spec.min(),
            Err(_) => f64::NAN,
        };
        let min_eig = self
            .entries
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let scale = self.entries.abs().max().max(1.0);
        let physical = symmetric
            && min_eig > -nu_tol * scale
            && nu_min.is_finite()
            && nu_min >= 1.0 - nu_tol;
        ValidationReport { symmetric, physical, nu_min }
    }

    /// Errors with [`Error::Unphysical`] unless the CM is physical within
    /// the operation-level slack [`OP_PHYSICALITY_TOL`].
    pub fn assert_physical(&self, context: &str) -> Result<()> {
        self.assert_physical_with(context, OP_PHYSICALITY_TOL)
    }

    /// Physicality check at a caller-chosen ν_min tolerance. Constructions
    /// that pass through the invariant parametrization sit on the boundary
    /// with O(sqrt(eps)) noise and use a looser 1e−7 here.
    pub(crate) fn assert_physical_with(&self, context: &str, nu_tol: f64) -> Result<()> {
        let report = self.validate_with(nu_tol);
        if !report.physical {
            return Err(Error::Unphysical {
                context: context.to_owned(),
                nu_min: report.nu_min,
            });
        }
        Ok(())
    }

    /// Symplectic spectrum: the N moduli of the eigenvalues of iΩσ, sorted
    /// ascending. Positive definite matrices take the stable route through
    /// the singular values of σ^{1/2} Ω σ^{1/2}; anything else falls back to
    /// a dense complex eigensolve of Ωσ.
    pub fn symplectic_spectrum(&self) -> Result<SymplecticSpectrum> {
        let eig = self.entries.clone().symmetric_eigen();
        let min_eig = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let doubled = if min_eig > 1e-14 {
            let sqrt = symmetric_power(&eig, 0.5);
            let k = &sqrt * symplectic_form(self.n_modes) * &sqrt;
            let m = &k * k.transpose();
            let mut vals: Vec<f64> = m
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .map(|&v| v.max(0.0).sqrt())
                .collect();
            vals.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            vals
        } else {
            let prod = symplectic_form(self.n_modes) * &self.entries;
            let ev: DVector<Complex<f64>> = prod.complex_eigenvalues();
            let mut vals: Vec<f64> = ev.iter().map(|z| z.norm()).collect();
            vals.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            vals
        };
        SymplecticSpectrum::from_doubled(&doubled, false)
    }

    /// Purity μ = (Det σ)^{−1/2} ∈ (0, 1].
    pub fn purity(&self) -> Result<f64> {
        self.assert_physical("purity")?;
        Ok(1.0 / self.entries.determinant().sqrt())
    }

    /// The global invariant Δ = Σ_i ν_i². For two modes it is computed from
    /// the block determinants Det α + Det β + 2 Det γ and cross-checked
    /// against the spectrum; for any other mode number the spectrum route is
    /// used directly.
    pub fn invariant_delta(&self) -> Result<f64> {
        self.assert_physical("invariant_delta")?;
        let from_spectrum: f64 = self.symplectic_spectrum()?.values().iter().map(|v| v * v).sum();
        if self.n_modes == 2 {
            let a = self.mode_block(0, 0).determinant();
            let b = self.mode_block(1, 1).determinant();
            let g = self.mode_block(0, 1).determinant();
            let from_blocks = a + b + 2.0 * g;
            if (from_blocks - from_spectrum).abs() > 1e-8 * from_blocks.abs().max(1.0) {
                return Err(Error::DegenerateNumerics {
                    context: format!(
                        "two-mode Delta routes disagree: blocks {from_blocks} vs spectrum {from_spectrum}"
                    ),
                });
            }
            return Ok(from_blocks);
        }
        Ok(from_spectrum)
    }

    /// Williamson factorization σ = S ν S^T with S symplectic and
    /// ν = diag(ν_1, ν_1, ..., ν_N, ν_N) sorted ascending.
    ///
    /// S is built from the canonical form of the antisymmetric matrix
    /// σ^{1/2} Ω σ^{1/2}. When symplectic eigenvalues are degenerate S is
    /// not unique; any S within the reconstruction tolerance is valid.
    pub fn williamson(&self) -> Result<(SymplecticTransform, SymplecticSpectrum)> {
        self.assert_physical("williamson")?;
        let n = self.n_modes;
        let eig = self.entries.clone().symmetric_eigen();
        let min_eig = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min_eig <= 0.0 {
            return Err(Error::NotPositiveDefinite { min_eig });
        }
        let sqrt = symmetric_power(&eig, 0.5);
        let k = &sqrt * symplectic_form(n) * &sqrt;
        let m = &k * k.transpose();
        let meig = m.symmetric_eigen();

        // Canonical basis of the antisymmetric K: per symplectic eigenvalue a
        // column pair (v, u) with K u = ν v, K v = −ν u. Degenerate subspaces
        // are handled by projecting candidates against the basis built so far.
        let dim = 2 * n;
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(dim);
        let mut pairs: Vec<(f64, DVector<f64>, DVector<f64>)> = Vec::with_capacity(n);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| {
            meig.eigenvalues[a]
                .partial_cmp(&meig.eigenvalues[b])
                .expect("finite")
        });
        for &j in &order {
            if pairs.len() == n {
                break;
            }
            let mut u: DVector<f64> = meig.eigenvectors.column(j).into_owned();
            for b in &basis {
                let coeff = b.dot(&u);
                u.axpy(-coeff, b, 1.0);
            }
            let norm = u.norm();
            if norm < 1e-7 {
                continue;
            }
            u.unscale_mut(norm);
            let nu = meig.eigenvalues[j].max(0.0).sqrt();
            if nu < 1e-12 {
                return Err(Error::DegenerateNumerics {
                    context: "vanishing symplectic eigenvalue in Williamson form".to_owned(),
                });
            }
            let mut v = (&k * &u).unscale(nu);
            for b in &basis {
                let coeff = b.dot(&v);
                v.axpy(-coeff, b, 1.0);
            }
            let vnorm = v.norm();
            if vnorm < 0.5 {
                return Err(Error::DegenerateNumerics {
                    context: "failed to build canonical pair in Williamson form".to_owned(),
                });
            }
            v.unscale_mut(vnorm);
            basis.push(v.clone());
            basis.push(u.clone());
            pairs.push((nu, v, u));
        }
        if pairs.len() != n {
            return Err(Error::DegenerateNumerics {
                context: format!("Williamson pairing found {} of {} mode pairs", pairs.len(), n),
            });
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));

        let mut q = DMatrix::zeros(dim, dim);
        let mut nu_diag = DVector::zeros(dim);
        for (kk, (nu, v, u)) in pairs.iter().enumerate() {
            q.set_column(2 * kk, v);
            q.set_column(2 * kk + 1, u);
            nu_diag[2 * kk] = *nu;
            nu_diag[2 * kk + 1] = *nu;
        }
        let inv_sqrt_nu = DMatrix::from_diagonal(&nu_diag.map(|v| 1.0 / v.sqrt()));
        let s_mat = &sqrt * q * inv_sqrt_nu;
        let s = SymplecticTransform::new(s_mat)?;

        let rec = s.matrix() * DMatrix::from_diagonal(&nu_diag) * s.matrix().transpose();
        let resid = (&rec - &self.entries).abs().max();
        let scale = self.entries.abs().max().max(1.0);
        if resid > WILLIAMSON_RESIDUAL_TOL * scale {
            return Err(Error::DegenerateNumerics {
                context: format!("Williamson reconstruction residual {resid:.3e} exceeds tolerance"),
            });
        }
        let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        Ok((s, SymplecticSpectrum { values, of_partial_transpose: false }))
    }

    /// Congruence action σ ↦ S σ S^T of a Gaussian unitary.
    pub fn apply_symplectic(&self, s: &SymplecticTransform) -> Result<CovarianceMatrix> {
        if s.n_modes != self.n_modes {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "transform acts on {} modes but state has {}",
                    s.n_modes, self.n_modes
                ),
            });
        }
        CovarianceMatrix::new(s.matrix() * &self.entries * s.matrix().transpose())
    }

    /// Block-diagonal composition of two states.
    pub fn direct_sum(&self, other: &CovarianceMatrix) -> CovarianceMatrix {
        let n = self.n_modes + other.n_modes;
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (2 * self.n_modes, 2 * self.n_modes))
            .copy_from(&self.entries);
        m.view_mut(
            (2 * self.n_modes, 2 * self.n_modes),
            (2 * other.n_modes, 2 * other.n_modes),
        )
        .copy_from(&other.entries);
        CovarianceMatrix { n_modes: n, entries: m }
    }

    /// Reduced state on the modes in `keep` (ascending order of the given
    /// indices): the principal submatrix on their quadrature rows/columns.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<CovarianceMatrix> {
        if keep.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        let mut modes: Vec<usize> = keep.to_vec();
        modes.sort_unstable();
        modes.dedup();
        for &m in &modes {
            if m >= self.n_modes {
                return Err(Error::IndexOutOfRange { index: m, n_modes: self.n_modes });
            }
        }
        let rows: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let sub = DMatrix::from_fn(rows.len(), rows.len(), |i, j| self.entries[(rows[i], rows[j])]);
        Ok(CovarianceMatrix { n_modes: modes.len(), entries: sub })
    }

    /// Partial transposition: mirror reflection p ↦ −p of every mode in
    /// `side`. The result is a valid matrix but not necessarily a physical
    /// state; its spectrum decides the PPT criterion.
    pub fn partial_transpose(&self, side: &[usize]) -> Result<CovarianceMatrix> {
        let mut modes: Vec<usize> = side.to_vec();
        modes.sort_unstable();
        modes.dedup();
        for &m in &modes {
            if m >= self.n_modes {
                return Err(Error::IndexOutOfRange { index: m, n_modes: self.n_modes });
            }
        }
        let mut m = self.entries.clone();
        for &mode in &modes {
            let p = 2 * mode + 1;
            for j in 0..2 * self.n_modes {
                m[(p, j)] = -m[(p, j)];
            }
            for i in 0..2 * self.n_modes {
                m[(i, p)] = -m[(i, p)];
            }
        }
        Ok(CovarianceMatrix { n_modes: self.n_modes, entries: m })
    }

    /// Spectrum of the partial transpose with respect to `side`; values may
    /// drop below 1 for entangled states.
    pub fn ppt_spectrum(&self, side: &[usize]) -> Result<SymplecticSpectrum> {
        let mut spec = self.partial_transpose(side)?.symplectic_spectrum()?;
        spec.of_partial_transpose = true;
        Ok(spec)
    }

    /// Logarithmic negativity across a bipartition:
    /// E_N = max{0, −Σ_{ν̃_i < 1} ln ν̃_i}.
    pub fn log_negativity(&self, bp: &Bipartition) -> Result<f64> {
        bp.check_covers(self.n_modes)?;
        self.assert_physical("log_negativity")?;
        let spec = self.ppt_spectrum(bp.side_b())?;
        Ok(log_negativity_from_spectrum(&spec))
    }
}

/// E_N from an already-computed partial-transpose spectrum.
pub fn log_negativity_from_spectrum(spec: &SymplecticSpectrum) -> f64 {
    let sum: f64 = spec.values().iter().filter(|&&v| v < 1.0).map(|v| -v.ln()).sum();
    sum.max(0.0)
}

/// V f(D) V^T for the symmetric eigendecomposition (here only powers).
fn symmetric_power(
    eig: &nalgebra::SymmetricEigen<f64, nalgebra::Dyn>,
    exponent: f64,
) -> DMatrix<f64> {
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| v.max(0.0).powf(exponent)));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// Symplectic spectrum, sorted ascending. `of_partial_transpose`
/// distinguishes ν̃ spectra (allowed below 1) from spectra of physical CMs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymplecticSpectrum {
    values: Vec<f64>,
    of_partial_transpose: bool,
}

impl SymplecticSpectrum {
    fn from_doubled(doubled: &[f64], of_partial_transpose: bool) -> Result<Self> {
        let n = doubled.len() / 2;
        let mut values = Vec::with_capacity(n);
        for k in 0..n {
            let (a, b) = (doubled[2 * k], doubled[2 * k + 1]);
            if (a - b).abs() > 1e-6 * a.abs().max(1.0) {
                return Err(Error::DegenerateNumerics {
                    context: format!("symplectic eigenvalue pair ({a}, {b}) failed to coincide"),
                });
            }
            values.push(0.5 * (a + b));
        }
        Ok(SymplecticSpectrum { values, of_partial_transpose })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }

    pub fn is_partial_transpose(&self) -> bool {
        self.of_partial_transpose
    }

    /// True when every ν_i = 1 within `tol` (pure state check).
    pub fn is_pure(&self, tol: f64) -> bool {
        self.values.iter().all(|v| (v - 1.0).abs() <= tol)
    }
}

/// A real symplectic matrix S with S^T Ω S = Ω, modelling a Gaussian unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    n_modes: usize,
    entries: DMatrix<f64>,
}

impl SymplecticTransform {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        check_finite(&entries)?;
        let dim = entries.nrows();
        if entries.ncols() != dim || dim == 0 || dim % 2 != 0 {
            return Err(Error::DimensionMismatch {
                context: format!("symplectic matrix must be 2Nx2N, got {}x{}", dim, entries.ncols()),
            });
        }
        let n = dim / 2;
        let omega = symplectic_form(n);
        let resid = (entries.transpose() * &omega * &entries - &omega).abs().max();
        if resid > SYMPLECTIC_TOL {
            return Err(Error::ConstraintViolation {
                constraint: "S^T Omega S = Omega".to_owned(),
                amount: resid,
            });
        }
        Ok(SymplecticTransform { n_modes: n, entries })
    }

    pub fn identity(n_modes: usize) -> Self {
        SymplecticTransform {
            n_modes,
            entries: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Composition: `self.then(&t)` acts as `t * self` on phase space.
    pub fn then(&self, t: &SymplecticTransform) -> Result<SymplecticTransform> {
        if t.n_modes != self.n_modes {
            return Err(Error::DimensionMismatch {
                context: "composed transforms act on different mode numbers".to_owned(),
            });
        }
        Ok(SymplecticTransform {
            n_modes: self.n_modes,
            entries: &t.entries * &self.entries,
        })
    }

    pub fn direct_sum(&self, other: &SymplecticTransform) -> SymplecticTransform {
        let n = self.n_modes + other.n_modes;
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (2 * self.n_modes, 2 * self.n_modes))
            .copy_from(&self.entries);
        m.view_mut(
            (2 * self.n_modes, 2 * self.n_modes),
            (2 * other.n_modes, 2 * other.n_modes),
        )
        .copy_from(&other.entries);
        SymplecticTransform { n_modes: n, entries: m }
    }

    pub fn inverse(&self) -> SymplecticTransform {
        // S^{-1} = Ω^{-1} S^T Ω = −Ω S^T Ω
        let omega = symplectic_form(self.n_modes);
        let inv = -(&omega * self.entries.transpose() * &omega);
        SymplecticTransform { n_modes: self.n_modes, entries: inv }
    }
}

/// Split of the modes {0..N−1} into two disjoint non-empty sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bipartition {
    side_a: Vec<usize>,
    side_b: Vec<usize>,
}

impl Bipartition {
    pub fn new(side_a: &[usize], side_b: &[usize]) -> Result<Self> {
        let mut a: Vec<usize> = side_a.to_vec();
        let mut b: Vec<usize> = side_b.to_vec();
        a.sort_unstable();
        a.dedup();
        b.sort_unstable();
        b.dedup();
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidBipartition {
                context: "both sides must be non-empty".to_owned(),
            });
        }
        if a.iter().any(|m| b.binary_search(m).is_ok()) {
            return Err(Error::InvalidBipartition {
                context: "sides must be disjoint".to_owned(),
            });
        }
        Ok(Bipartition { side_a: a, side_b: b })
    }

    /// The split {0..k−1} | {k..n−1}.
    pub fn first_k(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(Error::InvalidBipartition {
                context: format!("cannot split {n} modes at {k}"),
            });
        }
        Bipartition::new(&(0..k).collect::<Vec<_>>(), &(k..n).collect::<Vec<_>>())
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[usize] {
        &self.side_b
    }

    fn check_covers(&self, n_modes: usize) -> Result<()> {
        if self.side_a.len() + self.side_b.len() != n_modes
            || self.side_a.iter().chain(&self.side_b).any(|&m| m >= n_modes)
        {
            return Err(Error::InvalidBipartition {
                context: format!("bipartition does not cover exactly the {n_modes} modes"),
            });
        }
        Ok(())
    }
}

/// Axis singled out by a squeezing operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SqueezeAxis {
    /// Reduces the x variance: S = diag(e^{−r}, e^{r}).
    X,
    /// Reduces the p variance: S = diag(e^{r}, e^{−r}).
    P,
}

/// Single-mode squeezer.
pub fn make_squeezer(r: f64, axis: SqueezeAxis) -> SymplecticTransform {
    let (xx, pp) = match axis {
        SqueezeAxis::X => ((-r).exp(), r.exp()),
        SqueezeAxis::P => (r.exp(), (-r).exp()),
    };
    SymplecticTransform {
        n_modes: 1,
        entries: DMatrix::from_diagonal(&DVector::from_vec(vec![xx, pp])),
    }
}

/// Single-mode phase rotation by `theta`.
pub fn make_phase_rotation(theta: f64) -> SymplecticTransform {
    let (s, c) = theta.sin_cos();
    SymplecticTransform {
        n_modes: 1,
        entries: DMatrix::from_row_slice(2, 2, &[c, s, -s, c]),
    }
}

/// Beam splitter mixing modes `i` and `j` of an `n`-mode register: the
/// rotation by `theta` acting identically on the x and p planes.
pub fn make_beam_splitter(theta: f64, i: usize, j: usize, n: usize) -> Result<SymplecticTransform> {
    if i >= n || j >= n {
        return Err(Error::IndexOutOfRange { index: i.max(j), n_modes: n });
    }
    if i == j {
        return Err(Error::InvalidBipartition {
            context: "beam splitter needs two distinct modes".to_owned(),
        });
    }
    let (s, c) = theta.sin_cos();
    let mut m = DMatrix::identity(2 * n, 2 * n);
    for q in 0..2 {
        let (qi, qj) = (2 * i + q, 2 * j + q);
        m[(qi, qi)] = c;
        m[(qi, qj)] = s;
        m[(qj, qi)] = -s;
        m[(qj, qj)] = c;
    }
    Ok(SymplecticTransform { n_modes: n, entries: m })
}

/// Embed a single-mode transform on mode `mode` of an `n`-mode register.
pub fn embed_single_mode(s: &SymplecticTransform, mode: usize, n: usize) -> Result<SymplecticTransform> {
    if s.n_modes != 1 {
        return Err(Error::DimensionMismatch {
            context: "embed_single_mode takes a single-mode transform".to_owned(),
        });
    }
    if mode >= n {
        return Err(Error::IndexOutOfRange { index: mode, n_modes: n });
    }
    let mut m = DMatrix::identity(2 * n, 2 * n);
    m.view_mut((2 * mode, 2 * mode), (2, 2)).copy_from(&s.entries);
    Ok(SymplecticTransform { n_modes: n, entries: m })
}

/// Mode-mixing transform acting as the orthogonal matrix `o` identically on
/// the x and p planes. Valid for any orthogonal `o`.
pub fn mode_mixer(o: &DMatrix<f64>) -> Result<SymplecticTransform> {
    let n = o.nrows();
    if o.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "mode mixer needs a square orthogonal matrix".to_owned(),
        });
    }
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            m[(2 * i, 2 * j)] = o[(i, j)];
            m[(2 * i + 1, 2 * j + 1)] = o[(i, j)];
        }
    }
    SymplecticTransform::new(m)
}

/// Random symplectic transform drawn by composing layers of random
/// single-mode rotations/squeezers with beam splitters on every mode pair.
/// Useful for sampling pure states as S S^T.
pub fn random_symplectic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SymplecticTransform {
    let mut total = SymplecticTransform::identity(n);
    for _ in 0..2 {
        for i in 0..n {
            let local = make_phase_rotation(rng.random_range(0.0..std::f64::consts::TAU))
                .then(&make_squeezer(rng.random_range(-0.8..0.8), SqueezeAxis::X))
                .expect("single-mode composition")
                .then(&make_phase_rotation(rng.random_range(0.0..std::f64::consts::TAU)))
                .expect("single-mode composition");
            total = total
                .then(&embed_single_mode(&local, i, n).expect("valid mode"))
                .expect("same size");
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let bs = make_beam_splitter(rng.random_range(0.0..std::f64::consts::TAU), i, j, n)
                    .expect("valid modes");
                total = total.then(&bs).expect("same size");
            }
        }
    }
    total
}

/// Two-mode squeezed vacuum at squeezing `r`, in standard form.
pub fn two_mode_squeezed_vacuum(r: f64) -> CovarianceMatrix {
    let c = (2.0 * r).cosh();
    let s = (2.0 * r).sinh();
    let m = DMatrix::from_row_slice(
        4,
        4,
        &[
            c, 0.0, s, 0.0, //
            0.0, c, 0.0, -s, //
            s, 0.0, c, 0.0, //
            0.0, -s, 0.0, c,
        ],
    );
    CovarianceMatrix { n_modes: 2, entries: m }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Oracle for symplectic spectra: moduli of the eigenvalues of Ωσ from
    /// the generic dense (Schur-based) complex eigensolver, independent of
    /// the σ^{1/2} route used by the implementation.
    fn spectrum_oracle(cm: &CovarianceMatrix) -> Vec<f64> {
        let prod = symplectic_form(cm.n_modes()) * cm.matrix();
        let mut mods: Vec<f64> = prod.complex_eigenvalues().iter().map(|z| z.norm()).collect();
        mods.sort_by(|a, b| a.partial_cmp(b).unwrap());
        mods.into_iter().step_by(2).collect()
    }

    #[test]
    fn validate_vacuum() {
        let cm = CovarianceMatrix::vacuum(1);
        let rep = cm.validate();
        assert!(rep.symmetric);
        assert!(rep.physical);
        assert_relative_eq!(rep.nu_min, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn validate_sub_vacuum_fails() {
        let cm = CovarianceMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 0.5]))).unwrap();
        let rep = cm.validate();
        assert!(!rep.physical);
        assert_relative_eq!(rep.nu_min, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn validate_indefinite_fails() {
        let cm = CovarianceMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![-3.0, -3.0]))).unwrap();
        assert!(!cm.validate().physical);
    }

    #[test]
    fn validate_rejects_nonfinite() {
        let mut m = DMatrix::identity(2, 2);
        m[(0, 1)] = f64::NAN;
        assert!(matches!(CovarianceMatrix::new(m), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn tmsv_is_physical_and_pure() {
        let cm = two_mode_squeezed_vacuum(1.0);
        let rep = cm.validate();
        assert!(rep.physical);
        assert_relative_eq!(rep.nu_min, 1.0, epsilon = 1e-10);
        let oracle = spectrum_oracle(&cm);
        for v in oracle {
            assert_relative_eq!(v, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn spectrum_thermal() {
        let cm = CovarianceMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 3.0]))).unwrap();
        let spec = cm.symplectic_spectrum().unwrap();
        assert_eq!(spec.values().len(), 1);
        assert_relative_eq!(spec.values()[0], 3.0, max_relative = 1e-12);
    }

    #[test]
    fn spectrum_matches_two_mode_invariants() {
        // Random physical two-mode CM: Det σ = ∏ν², Δ from blocks = Σν².
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let s = random_symplectic(2, &mut rng);
            let nu1 = 1.0 + rng.random_range(0.0..2.0);
            let nu2 = 1.0 + rng.random_range(0.0..2.0);
            let w = CovarianceMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![
                nu1, nu1, nu2, nu2,
            ])))
            .unwrap();
            let cm = w.apply_symplectic(&s).unwrap();
            let spec = cm.symplectic_spectrum().unwrap();
            let det: f64 = cm.matrix().determinant();
            let prod: f64 = spec.values().iter().map(|v| v * v).product();
            assert_relative_eq!(det, prod, max_relative = 1e-8);
            let delta = cm.invariant_delta().unwrap();
            let sum: f64 = spec.values().iter().map(|v| v * v).sum();
            assert_relative_eq!(delta, sum, max_relative = 1e-8);
            let oracle = spectrum_oracle(&cm);
            for (a, b) in spec.values().iter().zip(&oracle) {
                assert_relative_eq!(a, b, max_relative = 1e-8, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn purity_basics() {
        assert_relative_eq!(CovarianceMatrix::vacuum(3).purity().unwrap(), 1.0);
        let cm = CovarianceMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 2.0]))).unwrap();
        assert_relative_eq!(cm.purity().unwrap(), 0.5, max_relative = 1e-12);
    }

    #[test]
    fn purity_times_spectrum_product_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=4usize {
            let s = random_symplectic(n, &mut rng);
            let nus: Vec<f64> = (0..n).map(|_| 1.0 + rng.random_range(0.0..1.5)).collect();
            let diag: Vec<f64> = nus.iter().flat_map(|&v| [v, v]).collect();
            let w = CovarianceMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(diag))).unwrap();
            let cm = w.apply_symplectic(&s).unwrap();
            let mu = cm.purity().unwrap();
            let prod: f64 = cm.symplectic_spectrum().unwrap().values().iter().product();
            assert_relative_eq!(mu * prod, 1.0, max_relative = 1e-8);
        }
    }

    #[test]
    fn invariant_delta_examples() {
        assert_relative_eq!(CovarianceMatrix::vacuum(2).invariant_delta().unwrap(), 2.0);
        assert_relative_eq!(
            two_mode_squeezed_vacuum(0.8).invariant_delta().unwrap(),
            2.0,
            epsilon = 1e-9
        );
        // standard form (a=2, b=2, c± = ±1): Δ = a² + b² + 2c₊c₋ = 4 + 4 − 2 = 6
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[
                2.0, 0.0, 1.0, 0.0, //
                0.0, 2.0, 0.0, -1.0, //
                1.0, 0.0, 2.0, 0.0, //
                0.0, -1.0, 0.0, 2.0,
            ],
        );
        let cm = CovarianceMatrix::new(m).unwrap();
        assert_relative_eq!(cm.invariant_delta().unwrap(), 6.0, max_relative = 1e-10);
    }

    #[test]
    fn williamson_diagonal_cases() {
        let cm = CovarianceMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 3.0]))).unwrap();
        let (s, nu) = cm.williamson().unwrap();
        assert_relative_eq!(nu.values()[0], 3.0, max_relative = 1e-12);
        // S is only determined up to the stabilizer here; check the factorization.
        let rec = s.matrix() * DMatrix::from_diagonal(&DVector::from_element(2, 3.0)) * s.matrix().transpose();
        assert_relative_eq!((rec - cm.matrix()).abs().max(), 0.0, epsilon = 1e-9);

        // pure squeezed vacuum: nu = 1, S a squeezer
        let e2 = (2.0f64).exp();
        let cm = CovarianceMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![e2, 1.0 / e2]))).unwrap();
        let (s, nu) = cm.williamson().unwrap();
        assert_relative_eq!(nu.values()[0], 1.0, epsilon = 1e-10);
        let rec = s.matrix() * s.matrix().transpose();
        assert_relative_eq!((rec - cm.matrix()).abs().max(), 0.0, epsilon = 1e-8);
    }

    #[test]
    fn williamson_random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [1usize, 2, 3, 5, 8] {
            let s = random_symplectic(n, &mut rng);
            let nus: Vec<f64> = (0..n).map(|_| 1.0 + rng.random_range(0.0..2.0)).collect();
            let diag: Vec<f64> = nus.iter().flat_map(|&v| [v, v]).collect();
            let w = CovarianceMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(diag))).unwrap();
            let cm = w.apply_symplectic(&s).unwrap();
            let (sw, nu) = cm.williamson().unwrap();
            let nu_mat = DMatrix::from_diagonal(&DVector::from_vec(
                nu.values().iter().flat_map(|&v| [v, v]).collect(),
            ));
            let rec = sw.matrix() * nu_mat * sw.matrix().transpose();
            let resid = (rec - cm.matrix()).abs().max() / cm.matrix().abs().max();
            assert!(resid <= 1e-7, "residual {resid} at n={n}");
            let mut want = nus.clone();
            want.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (a, b) in nu.values().iter().zip(&want) {
                assert_relative_eq!(a, b, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn williamson_degenerate_spectrum() {
        // fully degenerate thermal state on 3 modes
        let cm = CovarianceMatrix::new(DMatrix::from_diagonal(&DVector::from_element(6, 2.5))).unwrap();
        let (s, nu) = cm.williamson().unwrap();
        for v in nu.values() {
            assert_relative_eq!(*v, 2.5, epsilon = 1e-10);
        }
        let nu_mat = DMatrix::from_diagonal(&DVector::from_element(6, 2.5));
        let rec = s.matrix() * nu_mat * s.matrix().transpose();
        assert_relative_eq!((rec - cm.matrix()).abs().max(), 0.0, epsilon = 1e-8);
    }

    #[test]
    fn apply_symplectic_preserves_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cm = two_mode_squeezed_vacuum(0.7);
        let s = random_symplectic(2, &mut rng);
        let moved = cm.apply_symplectic(&s).unwrap();
        let a = cm.symplectic_spectrum().unwrap();
        let b = moved.symplectic_spectrum().unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_relative_eq!(x, y, epsilon = 1e-9);
        }
    }

    #[test]
    fn beam_splitter_on_two_mode_vacuum_is_identity_cm() {
        let bs = make_beam_splitter(std::f64::consts::FRAC_PI_4, 0, 1, 2).unwrap();
        let out = CovarianceMatrix::vacuum(2).apply_symplectic(&bs).unwrap();
        assert_relative_eq!((out.matrix() - DMatrix::<f64>::identity(4, 4)).abs().max(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn direct_sum_purity_multiplies() {
        let a = CovarianceMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 2.0]))).unwrap();
        let b = CovarianceMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 3.0]))).unwrap();
        let ab = a.direct_sum(&b);
        assert_relative_eq!(ab.purity().unwrap(), 1.0 / 6.0, max_relative = 1e-12);
        let spec = two_mode_squeezed_vacuum(1.0)
            .direct_sum(&CovarianceMatrix::vacuum(1))
            .symplectic_spectrum()
            .unwrap();
        for v in spec.values() {
            assert_relative_eq!(*v, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn partial_trace_tmsv_marginal() {
        let r = 0.9f64;
        let cm = two_mode_squeezed_vacuum(r);
        let red = cm.partial_trace(&[0]).unwrap();
        let c = (2.0 * r).cosh();
        assert_relative_eq!(red.matrix()[(0, 0)], c, max_relative = 1e-12);
        assert_relative_eq!(red.matrix()[(1, 1)], c, max_relative = 1e-12);
        assert_relative_eq!(red.purity().unwrap(), 1.0 / c, max_relative = 1e-10);
        // keep-all is the identity operation
        let all = cm.partial_trace(&[0, 1]).unwrap();
        assert_eq!(all.matrix(), cm.matrix());
    }

    #[test]
    fn partial_trace_errors() {
        let cm = CovarianceMatrix::vacuum(2);
        assert!(matches!(cm.partial_trace(&[]), Err(Error::EmptyKeepSet)));
        assert!(matches!(cm.partial_trace(&[5]), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn partial_transpose_involution_and_spectrum() {
        let cm = two_mode_squeezed_vacuum(1.0);
        let pt = cm.partial_transpose(&[1]).unwrap();
        let back = pt.partial_transpose(&[1]).unwrap();
        assert_eq!(back.matrix(), cm.matrix());

        let spec = cm.ppt_spectrum(&[1]).unwrap();
        assert!(spec.is_partial_transpose());
        assert_relative_eq!(spec.values()[0], (-2.0f64).exp(), max_relative = 1e-9);
        assert_relative_eq!(spec.values()[1], (2.0f64).exp(), max_relative = 1e-9);

        // transposing either side gives the same spectrum
        let other = cm.ppt_spectrum(&[0]).unwrap();
        for (a, b) in spec.values().iter().zip(other.values()) {
            assert_relative_eq!(a, b, max_relative = 1e-9);
        }
    }

    #[test]
    fn log_negativity_tmsv() {
        for r in [0.3, 1.0, 2.0] {
            let cm = two_mode_squeezed_vacuum(r);
            let bp = Bipartition::first_k(1, 2).unwrap();
            assert_relative_eq!(cm.log_negativity(&bp).unwrap(), 2.0 * r, max_relative = 1e-9);
        }
        let vac = CovarianceMatrix::vacuum(2);
        let bp = Bipartition::first_k(1, 2).unwrap();
        assert_relative_eq!(vac.log_negativity(&bp).unwrap(), 0.0);
    }

    #[test]
    fn log_negativity_invariant_under_local_symplectics() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let cm = two_mode_squeezed_vacuum(0.8);
        let bp = Bipartition::first_k(1, 2).unwrap();
        let base = cm.log_negativity(&bp).unwrap();
        for _ in 0..10 {
            let l = random_symplectic(1, &mut rng).direct_sum(&random_symplectic(1, &mut rng));
            let moved = cm.apply_symplectic(&l).unwrap();
            assert_relative_eq!(moved.log_negativity(&bp).unwrap(), base, max_relative = 1e-8);
        }
    }

    #[test]
    fn squeezer_zero_is_identity() {
        let s = make_squeezer(0.0, SqueezeAxis::X);
        assert_relative_eq!((s.matrix() - DMatrix::<f64>::identity(2, 2)).abs().max(), 0.0);
    }

    #[test]
    fn beam_splitter_synthesizes_tmsv() {
        // x-squeezed ⊕ p-squeezed vacuum through a balanced beam splitter
        // equals the two-mode squeezed vacuum; oracle is the explicit 4×4
        // congruence computed here.
        let r = 0.65;
        let sx = make_squeezer(r, SqueezeAxis::X);
        let sp = make_squeezer(r, SqueezeAxis::P);
        let inputs = CovarianceMatrix::vacuum(1)
            .apply_symplectic(&sx)
            .unwrap()
            .direct_sum(&CovarianceMatrix::vacuum(1).apply_symplectic(&sp).unwrap());
        let bs = make_beam_splitter(std::f64::consts::FRAC_PI_4, 0, 1, 2).unwrap();
        let got = inputs.apply_symplectic(&bs).unwrap();
        let oracle = {
            let m = bs.matrix() * inputs.matrix() * bs.matrix().transpose();
            m
        };
        assert_relative_eq!((got.matrix() - &oracle).abs().max(), 0.0);
        let want = two_mode_squeezed_vacuum(r);
        assert_relative_eq!((got.matrix() - want.matrix()).abs().max(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn phase_rotation_composition() {
        let e2 = (2.0f64).exp();
        let cm = CovarianceMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 / e2, e2]))).unwrap();
        let r = make_phase_rotation(std::f64::consts::FRAC_PI_2);
        let once = cm.apply_symplectic(&r).unwrap();
        // x and p swapped
        assert_relative_eq!(once.matrix()[(0, 0)], e2, max_relative = 1e-12);
        let twice = once.apply_symplectic(&r).unwrap();
        assert_relative_eq!((twice.matrix() - cm.matrix()).abs().max(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn pure_states_saturate_uncertainty() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=5usize {
            let s = random_symplectic(n, &mut rng);
            let pure = CovarianceMatrix::vacuum(n).apply_symplectic(&s).unwrap();
            assert!(pure.symplectic_spectrum().unwrap().is_pure(1e-8));
        }
    }

    #[test]
    fn json_round_trip() {
        let cm = two_mode_squeezed_vacuum(1.3);
        let text = serde_json::to_string(&cm).unwrap();
        assert!(text.contains("\"ordering\":\"xpxp\""));
        let back: CovarianceMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back.matrix(), cm.matrix());
    }

    #[test]
    fn symplectic_transform_rejects_non_symplectic() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 2.0]));
        assert!(SymplecticTransform::new(m).is_err());
    }

    #[test]
    fn inverse_is_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random_symplectic(3, &mut rng);
        let id = s.then(&s.inverse()).unwrap();
        assert_relative_eq!(
            (id.matrix() - DMatrix::<f64>::identity(6, 6)).abs().max(),
            0.0,
            epsilon = 1e-10
        );
    }
}
