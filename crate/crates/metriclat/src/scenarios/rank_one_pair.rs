//! Rank-one intertwining pair on a grid.
//!
//! On `[-L, L]` with `Q = diag(x_i)` and a unit vector `phi`, the projector
//! `P_phi = phi (x) phi` and the rank-one operator
//! `A_phi f = <(I+Q^2) f, phi> (I+Q^2)^{-1} phi` are intertwined by the
//! bounded `T = (I+Q^2)^{-1}`: `A_phi T = T P_phi` holds exactly. Both
//! operators have spectrum `{0 (mult N-1), 1}`, the eigenvalue-1 eigenvector
//! of `A_phi` being a multiple of `T phi`. `T` is invertible at every finite
//! extent but `||T^{-1}|| = 1 + L^2` grows with the half-extent: the
//! continuum pair is quasi-similar, not similar.

use ndarray::prelude::*;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::opcore::{eig_general, eig_residuals, inner, op_norm, vec_norm, CMatrix, CVector};
use crate::report::CheckResult;
use crate::similarity::{
    check_intertwining, classify_with_ladder, ladder_flags_unbounded, spectra_compare,
    SimilarityClass,
};

use super::{Grid1D, ScenarioResult};

fn build_operators(grid: &Grid1D, phi: &CVector) -> (CMatrix, CMatrix, CMatrix) {
    let n = grid.len();
    let t = grid.diag_fn(|x| 1.0 / (1.0 + x * x));
    let p_phi = Array2::from_shape_fn((n, n), |(i, j)| phi[i] * phi[j].conj());
    // A_phi = (T phi) ((I+Q^2) phi)^*
    let t_phi = t.dot(phi);
    let w_phi: CVector = phi
        .iter()
        .zip(&grid.points)
        .map(|(&v, &x)| v * (1.0 + x * x))
        .collect();
    let a_phi = Array2::from_shape_fn((n, n), |(i, j)| t_phi[i] * w_phi[j].conj());
    (p_phi, a_phi, t)
}

/// Runs the scenario at `n` grid points on `[-l, l]`; `phi = None` uses a
/// normalized Gaussian.
pub fn rank_one_pair(n: usize, l: f64, phi: Option<CVector>) -> Result<ScenarioResult> {
    if n < 50 {
        return Err(Error::GridTooCoarse { needed: 50, got: n });
    }
    let grid = Grid1D::uniform(-l, l, n)?;
    let mut phi = match phi {
        Some(v) => {
            if v.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: v.len(),
                });
            }
            v
        }
        None => grid.sample(|x| (-0.5 * x * x).exp()),
    };
    let nrm = vec_norm(&phi.view());
    if nrm == 0.0 {
        return Err(Error::ParameterDomain("phi must be nonzero".into()));
    }
    phi.mapv_inplace(|z| z / nrm);

    let (p_phi, a_phi, t) = build_operators(&grid, &phi);
    let mut out = ScenarioResult::new("rank-one-pair");
    out.param("n", n);
    out.param("l", l);

    // T intertwines P_phi and A_phi
    let rep = check_intertwining(&p_phi, &a_phi, &t, 1e-10)?;
    out.push(CheckResult::residual_check(
        "intertwining",
        "A_phi T = T P_phi",
        rep.residual,
        1e-10,
    ));

    // both spectra are {0 (mult n-1), 1 (mult 1)}
    let scale = op_norm(&a_phi).max(1.0);
    let mut expected = Array2::<C64>::zeros((n, n));
    expected[[n - 1, n - 1]] = C64::new(1.0, 0.0);
    for (label, m) in [("sigma(P_phi)", &p_phi), ("sigma(A_phi)", &a_phi)] {
        let cmp = spectra_compare(m, &expected, 1e-8 * scale)?;
        out.push(CheckResult::residual_check(
            label,
            "spectrum is {0 (mult n-1), 1 (mult 1)}",
            cmp.max_distance / scale,
            1e-8,
        ));
    }

    // the eigenvalue-1 eigenvector of A_phi is a multiple of T phi
    let (vals, vecs) = eig_general(&a_phi)?;
    let residuals = eig_residuals(&a_phi, &vals, &vecs);
    out.record_spectrum(&vals, &residuals);
    let k_one = vals
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1 - C64::new(1.0, 0.0))
                .norm()
                .total_cmp(&(b.1 - C64::new(1.0, 0.0)).norm())
        })
        .map(|(k, _)| k)
        .expect("nonempty spectrum");
    let v_one = vecs.column(k_one).to_owned();
    let mut t_phi = t.dot(&phi);
    let tn = vec_norm(&t_phi.view());
    t_phi.mapv_inplace(|z| z / tn);
    // collinearity: 1 - |<v, t_phi>| vanishes when parallel
    let overlap = inner(&v_one.view(), &t_phi.view()).norm();
    out.push(CheckResult::residual_check(
        "eigenvector",
        "eigenvalue-1 eigenvector of A_phi is a multiple of (I+Q^2)^{-1} phi",
        (1.0 - overlap).abs(),
        1e-8,
    ));

    // ||T^{-1}|| = 1 + L^2 grows with the half-extent: quasi-similar, not
    // similar, in the continuum limit
    let extents = [l / 2.0, l, 2.0 * l];
    let mut ladder = Vec::new();
    for &ext in &extents {
        let g = Grid1D::uniform(-ext, ext, n)?;
        let t_ext = g.diag_fn(|x| 1.0 / (1.0 + x * x));
        let (_, smin) = crate::opcore::singular_extremes(&t_ext);
        ladder.push((ext.round() as usize, 1.0 / smin));
    }
    let exact_dev = ladder
        .iter()
        .zip(&extents)
        .map(|(&(_, norm), &ext)| (norm - (1.0 + ext * ext)).abs() / (1.0 + ext * ext))
        .fold(0.0f64, f64::max);
    out.push(CheckResult::residual_check(
        "t-inverse-norm",
        "||T^{-1}|| equals 1 + L^2 on each extent",
        exact_dev,
        1e-12,
    ));
    let flagged = ladder_flags_unbounded(&ladder);
    let classified = classify_with_ladder(rep, ladder);
    out.push(CheckResult::residual_check(
        "t-classification",
        "inverse norm grows with extent: quasi-similar, unbounded inverse flagged",
        if flagged && classified.classification == SimilarityClass::QuasiSimilar {
            0.0
        } else {
            1.0
        },
        0.5,
    ));

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_phi_all_checks_pass() {
        let mut res = rank_one_pair(201, 10.0, None).unwrap();
        assert!(res.passed(), "failed checks: {:?}", res.checks);
        assert!(!res.spectra_rows.is_empty());
        let dir = tempfile::tempdir().unwrap();
        let written = res.write_artifacts(dir.path()).unwrap();
        assert_eq!(written.len(), 2);
    }

    #[test]
    fn grid_delta_phi_same_spectra() {
        // a grid delta is as good as a smooth phi at finite N
        let n = 101;
        let mut phi = Array1::zeros(n);
        phi[n / 2] = C64::new(1.0, 0.0);
        let res = rank_one_pair(n, 5.0, Some(phi)).unwrap();
        assert!(res.passed(), "failed checks: {:?}", res.checks);
    }

    #[test]
    fn coarse_grid_rejected() {
        assert!(matches!(
            rank_one_pair(10, 5.0, None),
            Err(Error::GridTooCoarse { .. })
        ));
    }
}
