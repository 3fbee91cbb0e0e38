//! First-derivative pair with a non-dense range.
//!
//! `A f = f' - (2x/(1+x^2)) f` and `B f = f'` are intertwined in the
//! continuum by `T = (I+Q^2)^{-1}`, since `T A f = (T f)'`. Discretely the
//! identity holds up to the consistency error of the difference stencil,
//! which must shrink under refinement. The function `h(x) = (1+x^2)^{-1}`
//! annihilates the range of `A` (`<A f, h| = 0` for decaying `f`), the
//! discrete echo of `A` having non-dense range; and the periodic first
//! derivative is antisymmetric, so its spectrum sits on the imaginary axis.

use ndarray::prelude::*;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::opcore::{eigvals_general, op_norm, CMatrix};
use crate::report::CheckResult;

use super::{Grid1D, ScenarioResult};

/// Centered differences with one-sided closures at the ends.
fn derivative_matrix(grid: &Grid1D) -> CMatrix {
    let n = grid.len();
    let h = grid.step().expect("uniform grid");
    let mut d = Array2::<C64>::zeros((n, n));
    let inv2h = C64::new(1.0 / (2.0 * h), 0.0);
    let invh = C64::new(1.0 / h, 0.0);
    for i in 1..n - 1 {
        d[[i, i + 1]] = inv2h;
        d[[i, i - 1]] = -inv2h;
    }
    d[[0, 0]] = -invh;
    d[[0, 1]] = invh;
    d[[n - 1, n - 1]] = invh;
    d[[n - 1, n - 2]] = -invh;
    d
}

/// Periodic centered differences: a real antisymmetric matrix.
fn periodic_derivative(grid: &Grid1D) -> CMatrix {
    let n = grid.len();
    let h = grid.step().expect("uniform grid");
    let mut d = Array2::<C64>::zeros((n, n));
    let inv2h = C64::new(1.0 / (2.0 * h), 0.0);
    for i in 0..n {
        d[[i, (i + 1) % n]] = inv2h;
        d[[i, (i + n - 1) % n]] = -inv2h;
    }
    d
}

fn intertwining_residual(grid: &Grid1D) -> f64 {
    let d = derivative_matrix(grid);
    let v = grid.diag_fn(|x| 2.0 * x / (1.0 + x * x));
    let a = &d - &v;
    let t = grid.diag_fn(|x| 1.0 / (1.0 + x * x));
    let f = grid.sample(|x| (-0.5 * x * x).exp());
    let lhs = t.dot(&a.dot(&f));
    let rhs = d.dot(&t.dot(&f));
    let diff = &lhs - &rhs;
    grid.norm(&diff.view()) / grid.norm(&f.view())
}

fn range_pairing(grid: &Grid1D, probe: impl Fn(f64) -> f64) -> f64 {
    let d = derivative_matrix(grid);
    let v = grid.diag_fn(|x| 2.0 * x / (1.0 + x * x));
    let a = &d - &v;
    let f = grid.sample(|x| (-0.5 * x * x).exp());
    let g = grid.sample(probe);
    let af = a.dot(&f);
    grid.inner(&af.view(), &g.view()).norm() / (grid.norm(&af.view()) * grid.norm(&g.view()))
}

/// Runs the scenario at `n` and `2n` points on `[-l, l]`.
pub fn derivative_pair(n: usize, l: f64) -> Result<ScenarioResult> {
    if n < 100 {
        return Err(Error::GridTooCoarse { needed: 100, got: n });
    }
    let coarse = Grid1D::uniform(-l, l, n)?;
    let fine = Grid1D::uniform(-l, l, 2 * n)?;

    let mut out = ScenarioResult::new("derivative-pair");
    out.param("n", n);
    out.param("l", l);

    // intertwining defect shrinks at least 1.8x per grid doubling
    let r_coarse = intertwining_residual(&coarse);
    let r_fine = intertwining_residual(&fine);
    let ratio = r_coarse / r_fine.max(1e-300);
    out.push(CheckResult::lower_bound_check(
        "intertwining-convergence",
        "||(TA - BT) f|| shrinks at least 1.8x per grid doubling on a smooth f",
        ratio,
        1.8,
    ));
    out.param("residual_coarse", r_coarse);
    out.param("residual_fine", r_fine);

    // h(x) = (1+x^2)^{-1} annihilates the range of A. On a symmetric grid
    // the discrete pairing already sits at roundoff, so the check asserts
    // smallness at both resolutions against an O(1) control pairing.
    let h_fn = |x: f64| 1.0 / (1.0 + x * x);
    let p_coarse = range_pairing(&coarse, h_fn);
    let p_fine = range_pairing(&fine, h_fn);
    let control = range_pairing(&fine, |x: f64| (-(x - 1.0) * (x - 1.0)).exp());
    out.push(CheckResult::residual_check(
        "range-orthogonality",
        "normalized <A f, (1+x^2)^{-1}> vanishes at both resolutions",
        p_coarse.max(p_fine),
        1e-10,
    ));
    out.push(CheckResult::lower_bound_check(
        "range-orthogonality-contrast",
        "a generic probe function pairs with A f at order one",
        control / p_fine.max(1e-300),
        1e6,
    ));
    out.param("control_pairing", control);

    // periodic derivative spectrum lies on the imaginary axis
    let dp = periodic_derivative(&coarse);
    let vals = eigvals_general(&dp)?;
    let max_re = vals.iter().map(|z| z.re.abs()).fold(0.0f64, f64::max);
    let scale = op_norm(&dp).max(1.0);
    out.push(CheckResult::residual_check(
        "periodic-spectrum",
        "eigenvalues of the periodic derivative lie on the imaginary axis",
        max_re / scale,
        1e-10,
    ));
    let residuals = vec![0.0; vals.len()];
    out.record_spectrum(&vals, &residuals);

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass_at_n_400() {
        let res = derivative_pair(400, 10.0).unwrap();
        assert!(res.passed(), "failed checks: {:?}", res.checks);
    }

    #[test]
    fn antisymmetry_of_periodic_stencil() {
        let grid = Grid1D::uniform(-1.0, 1.0, 64).unwrap();
        let d = periodic_derivative(&grid);
        let dt = crate::opcore::adjoint(&d);
        let sum = &d + &dt;
        assert!(op_norm(&sum) <= 1e-14 * op_norm(&d));
    }

    #[test]
    fn rejects_coarse_grid() {
        assert!(derivative_pair(50, 10.0).is_err());
    }
}
