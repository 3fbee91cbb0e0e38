//! Shifted harmonic oscillator on a Hermite spectral grid.
//!
//! `H = (p - i alpha)^2 / 2 + omega^2 x^2 / 2` is not Hermitian, yet
//! conjugation by `e^{alpha x}` carries it onto the plain oscillator
//! `p^2/2 + omega^2 x^2/2` with spectrum `omega (k + 1/2)`. The metric is
//! `G = e^{2 alpha x}`, unbounded on the line; on Gauss-Hermite nodes its
//! diagonal stays representable because the nodes only reach `O(sqrt(2n))`.
//!
//! Operators are assembled in the omega-scaled Hermite basis (where the
//! ladder matrices are exact) and transported to the nodes by the unitary
//! quadrature transform; multiplication operators are nodal diagonals.

use ndarray::prelude::*;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::metric::MetricOperator;
use crate::opcore::{adjoint, eig_general, eig_residuals, op_norm, rel_residual, CMatrix};
use crate::quasiherm::symmetrize;
use crate::report::CheckResult;
use crate::symbol::GrowthSymbol;

use super::{hermite_functions, Grid1D, ScenarioResult};

/// Nodal operators for the omega-scaled Hermite discretization.
struct HermiteFrame {
    /// Unitary transform: spectral coefficients = `u . nodal values`.
    u: CMatrix,
    /// Physical nodes `x_i = t_i / sqrt(omega)`.
    nodes: Vec<f64>,
    omega: f64,
}

fn hermite_frame(n: usize, omega: f64) -> Result<HermiteFrame> {
    let grid = Grid1D::gauss_hermite(n)?;
    let mut u = Array2::<C64>::zeros((n, n));
    for (i, (&t, &w)) in grid.points.iter().zip(&grid.weights).enumerate() {
        let h = hermite_functions(n, t);
        for k in 0..n {
            u[[k, i]] = C64::new(w.sqrt() * h[k], 0.0);
        }
    }
    let nodes = grid.points.iter().map(|&t| t / omega.sqrt()).collect();
    Ok(HermiteFrame { u, nodes, omega })
}

impl HermiteFrame {
    fn n(&self) -> usize {
        self.nodes.len()
    }

    /// Momentum matrix in the scaled basis: `p = i sqrt(omega/2) (a+ - a)`.
    fn momentum_spectral(&self) -> CMatrix {
        let n = self.n();
        let c = (self.omega / 2.0).sqrt();
        let mut p = Array2::<C64>::zeros((n, n));
        for k in 0..n - 1 {
            let v = c * ((k + 1) as f64).sqrt();
            p[[k, k + 1]] = C64::new(0.0, -v);
            p[[k + 1, k]] = C64::new(0.0, v);
        }
        p
    }

    /// Oscillator Hamiltonian, exact in the scaled basis.
    fn oscillator_spectral(&self) -> CMatrix {
        let n = self.n();
        Array2::from_shape_fn((n, n), |(i, j)| {
            if i == j {
                C64::new(self.omega * (i as f64 + 0.5), 0.0)
            } else {
                C64::ZERO
            }
        })
    }

    fn to_nodal(&self, spectral: &CMatrix) -> CMatrix {
        let uh = self.u.t().mapv(|z| z.conj());
        uh.dot(spectral).dot(&self.u)
    }

    fn nodal_diag(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.n();
        Array2::from_shape_fn((n, n), |(i, j)| {
            if i == j {
                C64::new(f(self.nodes[i]), 0.0)
            } else {
                C64::ZERO
            }
        })
    }
}

/// Runs the scenario with `n` Hermite modes.
pub fn shifted_oscillator(n: usize, alpha: f64, omega: f64) -> Result<ScenarioResult> {
    if n < 32 {
        return Err(Error::GridTooCoarse { needed: 32, got: n });
    }
    if !(omega > 0.0) {
        return Err(Error::ParameterDomain("omega must be positive".into()));
    }
    if alpha.abs() > 1.0 {
        return Err(Error::ParameterDomain(
            "the nodal metric e^{2 alpha x} is kept representable for |alpha| <= 1".into(),
        ));
    }

    let frame = hermite_frame(n, omega)?;
    let p = frame.momentum_spectral();
    let h_osc = frame.oscillator_spectral();
    // H = H_osc - i alpha p - alpha^2 / 2
    let mut h_spec = &h_osc - &p.mapv(|z| z * C64::new(0.0, alpha));
    for i in 0..n {
        h_spec[[i, i]] -= C64::new(alpha * alpha / 2.0, 0.0);
    }
    let h = frame.to_nodal(&h_spec);

    let mut out = ScenarioResult::new("shifted-oscillator");
    out.param("n", n);
    out.param("alpha", alpha);
    out.param("omega", omega);

    let (vals, vecs) = eig_general(&h)?;
    let residuals = eig_residuals(&h, &vals, &vecs);
    out.record_spectrum(&vals, &residuals);

    // (a) the low third of the spectrum is real
    let keep = n / 3;
    let max_im = vals[..keep]
        .iter()
        .map(|z| z.im.abs())
        .fold(0.0f64, f64::max);
    out.push(CheckResult::residual_check(
        "low-spectrum-real",
        "imaginary parts of the low third of the spectrum vanish",
        max_im,
        1e-8,
    ));

    // (b) first five eigenvalues are omega (k + 1/2)
    let mut worst = 0.0f64;
    for (k, v) in vals.iter().take(5).enumerate() {
        let expect = omega * (k as f64 + 0.5);
        worst = worst.max((v - C64::new(expect, 0.0)).norm());
    }
    out.push(CheckResult::residual_check(
        "gauge-spectrum",
        "first five eigenvalues match omega (k + 1/2) from the e^{alpha x} gauge",
        worst,
        1e-6,
    ));

    // (c) the symmetrized operator is the plain oscillator. The unbounded
    // gauge leaves an O(1) truncation artifact in the top corner of the
    // mode expansion (the image of a near-cutoff mode under e^{-alpha x}
    // spills past the cutoff), so the identity is checked on the low third
    // of the modes, like the reality check above.
    let g = MetricOperator::dense(frame.nodal_diag(|x| (2.0 * alpha * x).exp()))?;
    let sym = symmetrize(&h, &g)?;
    let k_spec = frame.u.dot(&sym.k).dot(&frame.u.t().mapv(|z| z.conj()));
    let low = keep;
    let k_low = k_spec.slice(ndarray::s![..low, ..low]).to_owned();
    let osc_low = h_osc.slice(ndarray::s![..low, ..low]).to_owned();
    out.push(CheckResult::residual_check(
        "gauge-conjugate",
        "e^{alpha x} H e^{-alpha x} equals the discrete harmonic oscillator on the low modes",
        rel_residual(&k_low, &osc_low, op_norm(&osc_low)),
        1e-8,
    ));
    out.param("kappa_g", sym.kappa_g);

    // the operator form of the identity, A* G = G A, on the same low block
    // (products of the tridiagonal spectral H cannot carry the truncation
    // corner into the low modes)
    let gm = g.matrix();
    let defect = adjoint(&h).dot(&gm) - gm.dot(&h);
    let uh = frame.u.t().mapv(|z| z.conj());
    let defect_spec = frame.u.dot(&defect).dot(&uh);
    let ga_spec = frame.u.dot(&gm.dot(&h)).dot(&uh);
    let defect_low = defect_spec.slice(ndarray::s![..low, ..low]).to_owned();
    let ga_low = ga_spec.slice(ndarray::s![..low, ..low]).to_owned();
    out.push(CheckResult::residual_check(
        "dieudonne-low-modes",
        "A* G = G A holds on the low modes",
        op_norm(&defect_low) / op_norm(&ga_low).max(1e-300),
        1e-8,
    ));

    // the metric's symbol is genuinely unbounded for alpha > 0: recorded as
    // an exact statement about the symbol, not the truncation
    if alpha != 0.0 {
        let symbol = GrowthSymbol::new(1.0, 0.0, 2.0 * alpha.abs())?;
        out.push(CheckResult::residual_check(
            "metric-unbounded-flag",
            "the metric symbol e^{2 alpha x} is unbounded",
            if symbol.is_unbounded() { 0.0 } else { 1.0 },
            0.5,
        ));
    }

    // first twenty modes stay real as well
    let deep = vals
        .iter()
        .take(20.min(n))
        .map(|z| z.im.abs())
        .fold(0.0f64, f64::max);
    out.push(CheckResult::residual_check(
        "first-twenty-real",
        "imaginary parts of the first twenty eigenvalues vanish",
        deep,
        1e-8,
    ));

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_oscillator_alpha_zero() {
        let res = shifted_oscillator(64, 0.0, 1.0).unwrap();
        assert!(res.passed(), "failed: {:?}", res.checks);
        // spectrum rows carry omega (k + 1/2)
        for (k, row) in res.spectra_rows.iter().take(10).enumerate() {
            assert!((row.1 - (k as f64 + 0.5)).abs() <= 1e-8);
        }
    }

    #[test]
    fn shifted_case_matches_gauge_oracle() {
        let res = shifted_oscillator(64, 0.5, 1.0).unwrap();
        assert!(res.passed(), "failed: {:?}", res.checks);
    }

    #[test]
    fn other_frequency() {
        let res = shifted_oscillator(48, 0.25, 2.0).unwrap();
        assert!(res.passed(), "failed: {:?}", res.checks);
        for (k, row) in res.spectra_rows.iter().take(5).enumerate() {
            assert!((row.1 - 2.0 * (k as f64 + 0.5)).abs() <= 1e-6);
        }
    }

    #[test]
    fn parameter_checks() {
        assert!(shifted_oscillator(8, 0.5, 1.0).is_err());
        assert!(shifted_oscillator(64, 2.0, 1.0).is_err());
        assert!(shifted_oscillator(64, 0.5, -1.0).is_err());
    }
}
