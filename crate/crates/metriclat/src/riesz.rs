//! Riesz systems and the operators they diagonalize.
//!
//! An invertible `T` with controlled condition number turns the standard
//! basis into a Riesz basis `phi_n = T e_n` with biorthogonal partner
//! `psi_n = (T^{-1})* e_n`. The frame sums `S_phi = sum phi_n (x) phi_n`
//! and `S_psi` are metric operators, inverse to each other, with
//! `S_phi = T T*`. For a coefficient sequence `alpha` the pair
//!
//! `A^alpha_{phi,psi} = sum alpha_n phi_n (x) psi_n`,
//! `A^alpha_{psi,phi} = sum alpha_n psi_n (x) phi_n`
//!
//! is diagonalized by the bases (`A^alpha_{phi,psi} phi_k = alpha_k phi_k`),
//! intertwined by the metric pair, and symmetrized by
//! `a = S_psi^{1/2} A^alpha_{phi,psi} S_phi^{1/2}`, which is Hermitian
//! exactly when `alpha` is real.

use ndarray::prelude::*;
use ndarray_linalg::Inverse;
use num_complex::Complex64 as C64;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::metric::MetricOperator;
use crate::opcore::{adjoint, condition_number, max_abs, op_norm, psd_power, CMatrix};
use crate::symbol::DiagSymbol;

/// A Riesz basis pair with its metric operators.
#[derive(Debug, Clone)]
pub struct RieszSystem {
    pub t: CMatrix,
    /// Columns `phi_n = T e_n`.
    pub phi: CMatrix,
    /// Columns `psi_n = (T^{-1})* e_n`.
    pub psi: CMatrix,
    /// Frame operator `S_phi = sum phi_n (x) phi_n = T T*`.
    pub s_phi: MetricOperator,
    /// Dual frame operator `S_psi = S_phi^{-1}`.
    pub s_psi: MetricOperator,
    /// `max |<phi_n, psi_m> - delta_nm|`.
    pub biorthogonality_deviation: f64,
    /// `max |S_phi(frame sum) - T T*|`, relative: two assembly routes.
    pub frame_product_deviation: f64,
}

fn outer_accumulate(cols: &CMatrix, weights: Option<&[C64]>) -> CMatrix {
    let n = cols.nrows();
    let mut acc = Array2::<C64>::zeros((n, n));
    for k in 0..cols.ncols() {
        let v = cols.column(k);
        let w = weights.map_or(C64::new(1.0, 0.0), |ws| ws[k]);
        for i in 0..n {
            for j in 0..n {
                acc[[i, j]] += w * v[i] * v[j].conj();
            }
        }
    }
    acc
}

/// Builds the Riesz system of `T`, rejecting condition numbers above
/// `kappa_max`.
pub fn riesz_from(t: &CMatrix, kappa_max: f64) -> Result<RieszSystem> {
    let n = t.nrows();
    if n != t.ncols() {
        return Err(Error::NotSquare {
            rows: n,
            cols: t.ncols(),
        });
    }
    let kappa = condition_number(t);
    if !(kappa <= kappa_max) {
        return Err(Error::SingularT { kappa, kappa_max });
    }
    let tinv = t.inv()?;
    let phi = t.clone();
    let psi = adjoint(&tinv);

    let biorth = psi.t().mapv(|z| z.conj()).dot(&phi); // psi* phi = T^{-1} T
    let mut biorth_dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { C64::new(1.0, 0.0) } else { C64::ZERO };
            biorth_dev = biorth_dev.max((biorth[[i, j]] - expect).norm());
        }
    }

    // frame-sum route vs product route
    let s_phi_frame = outer_accumulate(&phi, None);
    let tt = t.dot(&adjoint(t));
    let frame_product_deviation =
        max_abs(&(&s_phi_frame - &tt)) / max_abs(&tt).max(1e-300);

    let s_psi_frame = outer_accumulate(&psi, None);
    let s_phi = MetricOperator::dense(s_phi_frame)?;
    let s_psi = MetricOperator::dense(s_psi_frame)?;

    Ok(RieszSystem {
        t: t.clone(),
        phi,
        psi,
        s_phi,
        s_psi,
        biorthogonality_deviation: biorth_dev,
        frame_product_deviation,
    })
}

impl RieszSystem {
    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    /// Expansion `xi = sum <xi, psi_n> phi_n`, the resolution of identity.
    pub fn resolve(&self, xi: &ArrayView1<C64>) -> crate::opcore::CVector {
        let coeffs = self.psi.t().mapv(|z| z.conj()).dot(xi);
        self.phi.dot(&coeffs)
    }
}

/// The diagonalizable pair built on a Riesz system.
#[derive(Debug, Clone)]
pub struct AlphaOperator {
    pub system: RieszSystem,
    pub alpha: Vec<C64>,
    /// `A^alpha_{phi,psi} = Phi diag(alpha) Psi*`.
    pub a_phi_psi: CMatrix,
    /// `A^alpha_{psi,phi} = Psi diag(alpha) Phi*`.
    pub a_psi_phi: CMatrix,
}

/// Assembles `A^alpha` in both basis orders.
pub fn alpha_operator(system: &RieszSystem, alpha: &[C64]) -> Result<AlphaOperator> {
    let n = system.dim();
    if alpha.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: alpha.len(),
        });
    }
    let psi_h = system.psi.t().mapv(|z| z.conj());
    let phi_h = system.phi.t().mapv(|z| z.conj());
    let mut phid = system.phi.clone();
    for (k, mut col) in phid.columns_mut().into_iter().enumerate() {
        col.mapv_inplace(|z| z * alpha[k]);
    }
    let a_phi_psi = phid.dot(&psi_h);
    let mut psid = system.psi.clone();
    for (k, mut col) in psid.columns_mut().into_iter().enumerate() {
        col.mapv_inplace(|z| z * alpha[k]);
    }
    let a_psi_phi = psid.dot(&phi_h);
    Ok(AlphaOperator {
        system: system.clone(),
        alpha: alpha.to_vec(),
        a_phi_psi,
        a_psi_phi,
    })
}

/// Which basis family weights a middle operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Phi,
    Psi,
}

/// Weighted frame sum `sum beta_n phi_n (x) phi_n` (or psi): the named
/// middle operator of the intertwining identities, for an independent
/// coefficient sequence `beta`.
pub fn middle_operator(system: &RieszSystem, beta: &[C64], side: Side) -> Result<CMatrix> {
    if beta.len() != system.dim() {
        return Err(Error::LengthMismatch {
            expected: system.dim(),
            got: beta.len(),
        });
    }
    let cols = match side {
        Side::Phi => &system.phi,
        Side::Psi => &system.psi,
    };
    Ok(outer_accumulate(cols, Some(beta)))
}

/// Residuals of the metric intertwining identities.
#[derive(Debug, Clone)]
pub struct IntertwiningResiduals {
    /// `||S_psi A_{phi,psi} - A_{psi,phi} S_psi||`, relative.
    pub psi_side: f64,
    /// `||S_phi A_{psi,phi} - A_{phi,psi} S_phi||`, relative.
    pub phi_side: f64,
    /// Deviation of `S_psi A_{phi,psi}` from the psi-weighted middle sum.
    pub middle_psi: f64,
    /// Deviation of `S_phi A_{psi,phi}` from the phi-weighted middle sum.
    pub middle_phi: f64,
}

/// Verifies `S_psi A_{phi,psi} = A_{psi,phi} S_psi` (and the phi-side
/// mirror), including agreement with the directly assembled middle sums
/// `sum alpha_n psi_n (x) psi_n` and `sum alpha_n phi_n (x) phi_n`.
pub fn verify_intertwining(op: &AlphaOperator) -> Result<IntertwiningResiduals> {
    let sys = &op.system;
    let s_psi = sys.s_psi.matrix();
    let s_phi = sys.s_phi.matrix();

    let lhs_psi = s_psi.dot(&op.a_phi_psi);
    let rhs_psi = op.a_psi_phi.dot(&s_psi);
    let scale_psi = op_norm(&lhs_psi).max(op_norm(&rhs_psi)).max(1e-300);
    let psi_side = op_norm(&(&lhs_psi - &rhs_psi)) / scale_psi;

    let lhs_phi = s_phi.dot(&op.a_psi_phi);
    let rhs_phi = op.a_phi_psi.dot(&s_phi);
    let scale_phi = op_norm(&lhs_phi).max(op_norm(&rhs_phi)).max(1e-300);
    let phi_side = op_norm(&(&lhs_phi - &rhs_phi)) / scale_phi;

    let mid_psi = middle_operator(sys, &op.alpha, Side::Psi)?;
    let middle_psi = op_norm(&(&lhs_psi - &mid_psi)) / scale_psi;
    let mid_phi = middle_operator(sys, &op.alpha, Side::Phi)?;
    let middle_phi = op_norm(&(&lhs_phi - &mid_phi)) / scale_phi;

    Ok(IntertwiningResiduals {
        psi_side,
        phi_side,
        middle_psi,
        middle_phi,
    })
}

/// `a = S_psi^{1/2} A_{phi,psi} S_phi^{1/2}`: Hermitian for real `alpha`,
/// isospectral to `diag(alpha)` always.
pub fn symmetrized_alpha(op: &AlphaOperator) -> Result<CMatrix> {
    let s_psi_h = psd_power(&op.system.s_psi.matrix(), 0.5)?;
    let s_phi_h = psd_power(&op.system.s_phi.matrix(), 0.5)?;
    Ok(s_psi_h.dot(&op.a_phi_psi).dot(&s_phi_h))
}

/// The mirror symmetrization `a_{psi,phi} = S_phi^{1/2} A_{psi,phi} S_psi^{1/2}`.
pub fn symmetrized_alpha_mirror(op: &AlphaOperator) -> Result<CMatrix> {
    let s_psi_h = psd_power(&op.system.s_psi.matrix(), 0.5)?;
    let s_phi_h = psd_power(&op.system.s_phi.matrix(), 0.5)?;
    Ok(s_phi_h.dot(&op.a_psi_phi).dot(&s_psi_h))
}

/// Operator norms of `A^alpha` across a truncation family with `alpha_n`
/// sampled from a growth symbol; unbounded symbols make the ladder grow.
pub fn alpha_norm_ladder<F>(
    mut make_system: F,
    alpha: &DiagSymbol,
    dims: &[usize],
) -> Result<Vec<(usize, f64)>>
where
    F: FnMut(usize) -> Result<RieszSystem>,
{
    let mut out = Vec::with_capacity(dims.len());
    for &n in dims {
        let sys = make_system(n)?;
        let coeffs: Vec<C64> = (0..n as u64)
            .map(|k| C64::new(alpha.eval(k), 0.0))
            .collect();
        let op = alpha_operator(&sys, &coeffs)?;
        out.push((n, op_norm(&op.a_phi_psi)));
    }
    Ok(out)
}

/// Parses a one-line CSV of complex entries (`1+2i, 3, -4i`).
pub fn parse_alpha_csv(line: &str) -> Result<Vec<C64>> {
    line.split(',')
        .map(|tok| {
            let tok = tok.trim();
            C64::from_str(tok).map_err(|e| Error::Parse(format!("bad entry {tok:?}: {e:?}")))
        })
        .collect()
}
