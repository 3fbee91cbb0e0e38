//! Quasi-Hermitian operators: `<A xi, G eta> = <G xi, A eta>`.
//!
//! Three equivalent faces of the same condition are computed side by side:
//! the defining pairwise identity, symmetry of the product `GA`, and
//! Hermiticity of the conjugate `K = G^{1/2} A G^{-1/2}`. The first two test
//! one matrix identity by two computational routes; the third transports `A`
//! into the flat space where self-adjointness is literal, and is the bridge
//! to the physical-Hamiltonian construction `h = W H W^{-1}` with
//! `W = G^{1/2}`.
//!
//! Condition numbers of the metric amplify every residual; `kappa(G)` is
//! logged with each symmetrization rather than silently absorbed.

use ndarray::prelude::*;
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::io::Write;

use crate::error::{Error, Result};
use crate::metric::MetricOperator;
use crate::opcore::{
    adjoint, eigh, ensure_same_dim, inner, max_abs, op_norm, CMatrix,
};
use crate::similarity::check_intertwining;

/// Residual bundle for one quasi-Hermiticity check.
#[derive(Debug, Clone, Serialize)]
pub struct QuasiHermReport {
    /// Pairwise route: `max_ij |<A e_i, G e_j> - <G e_i, A e_j>|`, relative.
    pub qh_residual: f64,
    /// Product route: `max |GA - (GA)*|`, relative. Same identity as
    /// `qh_residual`, computed through the matrix product.
    pub ga_symmetry_residual: f64,
    /// `||K - K*|| / ||K||` for `K = G^{1/2} A G^{-1/2}`.
    pub k_hermiticity: f64,
    /// In the everywhere-defined model the strict variant coincides with the
    /// plain one; recorded explicitly.
    pub strict: bool,
    /// Residual of `G` as an intertwiner between `A` and `A*`.
    pub adjoint_intertwining_residual: f64,
    pub verdict: bool,
}

/// Checks the defining identity of quasi-Hermiticity for `(A, G)`.
pub fn is_quasi_hermitian(
    a: &CMatrix,
    g: &MetricOperator,
    tol: f64,
) -> Result<QuasiHermReport> {
    ensure_same_dim(g.dim(), a.nrows())?;
    ensure_same_dim(a.nrows(), a.ncols())?;
    let n = a.nrows();
    let gm = g.matrix();
    let ga = gm.dot(a);
    let scale = max_abs(&ga).max(1e-300);

    // route 1: pairwise inner products over the standard basis
    let mut qh_dev: f64 = 0.0;
    for i in 0..n {
        let a_i = a.column(i);
        let g_i = gm.column(i);
        for j in 0..n {
            let a_j = a.column(j);
            let g_j = gm.column(j);
            let lhs = inner(&a_i, &g_j);
            let rhs = inner(&g_i, &a_j);
            qh_dev = qh_dev.max((lhs - rhs).norm());
        }
    }
    let qh_residual = qh_dev / scale;

    // route 2: symmetry of the assembled product
    let ga_dev = max_abs(&(&ga - &adjoint(&ga)));
    let ga_symmetry_residual = ga_dev / scale;

    // route 3: Hermiticity of the conjugate
    let k = symmetrize(a, g)?;
    let k_hermiticity = k.herm_residual;

    let adjoint_intertwining_residual =
        check_intertwining(a, &adjoint(a), &gm, tol)?.residual;

    let verdict = qh_residual <= tol;
    Ok(QuasiHermReport {
        qh_residual,
        ga_symmetry_residual,
        k_hermiticity,
        strict: verdict,
        adjoint_intertwining_residual,
        verdict,
    })
}

/// Adjoint in `H(G)`: `S^# = G^{-1} S* G`, for metrics bounded with bounded
/// inverse (enforced through the condition threshold).
pub fn g_adjoint(s: &CMatrix, g: &MetricOperator, kappa_max: f64) -> Result<CMatrix> {
    ensure_same_dim(g.dim(), s.nrows())?;
    let (lo, hi) = g.eigen_range()?;
    let kappa = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if kappa > kappa_max {
        return Err(Error::IllConditionedMetric { kappa, kappa_max });
    }
    let gm = g.matrix();
    let ginv = g.inverse()?.matrix();
    Ok(ginv.dot(&adjoint(s)).dot(&gm))
}

/// Result of transporting `A` to the flat space.
#[derive(Debug, Clone)]
pub struct Symmetrized {
    /// `K = G^{1/2} A G^{-1/2}`.
    pub k: CMatrix,
    /// Condition number of the metric, the residual amplification factor.
    pub kappa_g: f64,
    /// `||K - K*|| / ||K||`.
    pub herm_residual: f64,
}

/// `K = G^{1/2} A G^{-1/2}`; Hermitian exactly when `A` is quasi-Hermitian
/// for `G`. Dense metrics pay a single eigendecomposition for both half
/// powers.
pub fn symmetrize(a: &CMatrix, g: &MetricOperator) -> Result<Symmetrized> {
    ensure_same_dim(g.dim(), a.nrows())?;
    let (gh, gmh, lo, hi) = match g.kind() {
        crate::metric::MetricKind::Diagonal(_) => {
            let (lo, hi) = g.eigen_range()?;
            (
                g.power(0.5)?.matrix(),
                g.power(-0.5)?.matrix(),
                lo,
                hi,
            )
        }
        crate::metric::MetricKind::Dense(m) => {
            let eig = eigh(m)?;
            (
                eig.apply(f64::sqrt),
                eig.apply(|x| 1.0 / x.sqrt()),
                eig.min_eigenvalue(),
                eig.max_eigenvalue(),
            )
        }
    };
    let k = gh.dot(a).dot(&gmh);
    let kappa_g = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    let nk = op_norm(&k).max(1e-300);
    let herm_residual = op_norm(&(&k - &adjoint(&k))) / nk;
    Ok(Symmetrized {
        k,
        kappa_g,
        herm_residual,
    })
}

/// The three finite-dimensional faces of quasi-self-adjointness.
#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    /// `||A* G - G A||`, relative: the operator form of the identity.
    pub dieudonne_residual: f64,
    /// `||K - K*|| / ||K||`.
    pub k_hermiticity: f64,
    /// `||A - A^#|| / ||A||`: self-adjointness under the metric adjoint.
    pub sharp_residual: f64,
    pub verdicts: [bool; 3],
    pub agree: bool,
}

/// Evaluates all three faces and reports whether their verdicts agree.
pub fn quasi_selfadjoint_chain(a: &CMatrix, g: &MetricOperator, tol: f64) -> Result<ChainReport> {
    let gm = g.matrix();
    let ga = gm.dot(a);
    let ag = adjoint(a).dot(&gm);
    let dieudonne_residual = op_norm(&(&ag - &ga)) / op_norm(&ga).max(1e-300);
    let k_hermiticity = symmetrize(a, g)?.herm_residual;
    let sharp = g_adjoint(a, g, f64::INFINITY)?;
    let sharp_residual = op_norm(&(a - &sharp)) / op_norm(a).max(1e-300);
    let verdicts = [
        dieudonne_residual <= tol,
        k_hermiticity <= tol,
        sharp_residual <= tol,
    ];
    Ok(ChainReport {
        dieudonne_residual,
        k_hermiticity,
        sharp_residual,
        agree: verdicts.iter().all(|&v| v == verdicts[0]),
        verdicts,
    })
}

/// Generalized spectral family `X(lambda) = G^{-1/2} E(lambda) G^{1/2}`.
#[derive(Debug, Clone)]
pub struct SpectralFamily {
    pub grid: Vec<f64>,
    /// `X(lambda)` at each grid point: idempotent, generally non-Hermitian.
    pub x: Vec<CMatrix>,
    /// Eigenvalues of the Hermitian conjugate `K`.
    pub k_eigenvalues: Vec<f64>,
    /// `||sum lambda_j dX_j - A|| / ||A||` for the grid-point Stieltjes sum;
    /// zero (to roundoff) when the grid contains the spectrum of `K`.
    pub reconstruction_residual: f64,
}

/// Builds the spectral family of a quasi-self-adjoint `A` over an ascending
/// grid. Eigenvalues of `K` within `1e-12` of a grid point count as lying at
/// that point (right continuity).
pub fn spectral_family(
    a: &CMatrix,
    g: &MetricOperator,
    grid: &[f64],
    tol: f64,
) -> Result<SpectralFamily> {
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::ParameterDomain(
            "spectral grid must be strictly increasing".into(),
        ));
    }
    if grid.is_empty() {
        return Err(Error::ParameterDomain("empty spectral grid".into()));
    }
    let sym = symmetrize(a, g)?;
    if sym.herm_residual > tol {
        return Err(Error::NotQuasiSelfAdjoint {
            residual: sym.herm_residual,
            tolerance: tol,
        });
    }
    let eig = eigh(&crate::opcore::hermitian_part(&sym.k))?;
    let n = a.nrows();
    let gh = g.power(0.5)?.matrix();
    let gmh = g.power(-0.5)?.matrix();

    let scale = eig
        .eigenvalues
        .iter()
        .fold(1.0f64, |m, &x| m.max(x.abs()));
    let snap = 1e-12 * scale;

    let mut x_mats = Vec::with_capacity(grid.len());
    for &lam in grid {
        let mut e = Array2::<C64>::zeros((n, n));
        for (k, &mu) in eig.eigenvalues.iter().enumerate() {
            if mu <= lam + snap {
                let v = eig.vectors.column(k);
                for i in 0..n {
                    for j in 0..n {
                        e[[i, j]] += v[i] * v[j].conj();
                    }
                }
            }
        }
        x_mats.push(gmh.dot(&e).dot(&gh));
    }

    // right-endpoint Stieltjes sum against the grid representatives
    let mut recon = Array2::<C64>::zeros((n, n));
    let mut prev = Array2::<C64>::zeros((n, n));
    for (j, &lam) in grid.iter().enumerate() {
        let dx = &x_mats[j] - &prev;
        recon = recon + dx.mapv(|z| z * C64::new(lam, 0.0));
        prev = x_mats[j].clone();
    }
    let reconstruction_residual = op_norm(&(&recon - a)) / op_norm(a).max(1e-300);

    Ok(SpectralFamily {
        grid: grid.to_vec(),
        x: x_mats,
        k_eigenvalues: eig.eigenvalues,
        reconstruction_residual,
    })
}

impl SpectralFamily {
    /// CSV export: `lambda, ||X(lambda)||, trace X(lambda)`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "lambda,norm,trace_re,trace_im")?;
        for (lam, x) in self.grid.iter().zip(&self.x) {
            let tr: C64 = (0..x.nrows()).map(|i| x[[i, i]]).sum();
            writeln!(w, "{lam},{},{},{}", op_norm(x), tr.re, tr.im)?;
        }
        Ok(())
    }
}

/// The physical pair `(h, W)`: `W = G^{1/2}` is unitary from `H(G)` onto the
/// flat space and `h = W H W^{-1}` is the Hermitian image of `H`.
#[derive(Debug, Clone)]
pub struct PhysicalHamiltonian {
    pub h: CMatrix,
    pub w: CMatrix,
}

/// Builds the physical Hamiltonian of a quasi-Hermitian `H`.
pub fn physical_hamiltonian(
    h: &CMatrix,
    g: &MetricOperator,
    tol: f64,
) -> Result<PhysicalHamiltonian> {
    let rep = is_quasi_hermitian(h, g, tol)?;
    if !rep.verdict {
        return Err(Error::NotQuasiHermitian {
            residual: rep.qh_residual,
            tolerance: tol,
        });
    }
    let w = g.power(0.5)?.matrix();
    let winv = g.power(-0.5)?.matrix();
    Ok(PhysicalHamiltonian {
        h: w.dot(h).dot(&winv),
        w,
    })
}
