//! Second derivative on the half line with a complex Robin condition.
//!
//! `H = -d^2/dx^2` on `x >= 0` with `xi'(0) + (d + ib) xi(0) = 0` is not
//! self-adjoint for `b != 0`, but the differential operator
//! `G = -d^2/dx^2 - 2ib d/dx + d^2 + b^2` on the same domain is a metric
//! operator: completing the square in the form gives
//! `q_G(xi) = int |xi' + ib xi|^2 + d^2 int |xi|^2 - d |xi(0)|^2 >= d^2 ||xi||^2`
//! for `d < 0`, so its spectrum sits above `d^2`.
//!
//! The domain is truncated to `[0, L]` with a Dirichlet cutoff (the relevant
//! profiles decay like `e^{dx}`), and both operators are assembled as P1
//! form pairs. Integration by parts of `<-xi'', eta>` leaves the boundary
//! term `xi'(0) conj(eta(0))`, and substituting the Robin condition turns it
//! into `-(d+ib) xi(0) conj(eta(0))`; the same substitution feeds `G`, whose
//! convection term contributes through `int xi' conj(eta)`. Everything
//! downstream works in the mass inner product.

use ndarray::prelude::*;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::metric::{make_metric, MetricOperator};
use crate::opcore::{adjoint, hermitian_deviation, max_abs, op_norm, psd_power, CMatrix};
use crate::pipengine::{klmn_restrict, FormPair};
use crate::quasiherm::symmetrize;
use crate::report::CheckResult;

use super::ScenarioResult;

/// P1 form matrices on `[0, l]` with `n_el` elements: Robin node at `x = 0`,
/// Dirichlet cutoff at `x = l`. Returns `(Q_H, Q_G, M)` over the `n_el`
/// retained nodes.
fn assemble(n_el: usize, l: f64, d: f64, b: f64) -> (CMatrix, CMatrix, CMatrix) {
    let n = n_el; // nodes 0 .. n_el-1 (node n_el is clamped)
    let h = l / n_el as f64;
    let mut stiff = Array2::<C64>::zeros((n, n));
    let mut mass = Array2::<C64>::zeros((n, n));
    let mut conv = Array2::<C64>::zeros((n, n)); // conv[i, j] = int phi_j' phi_i

    for i in 0..n {
        let boundary = i == 0;
        stiff[[i, i]] = C64::new(if boundary { 1.0 / h } else { 2.0 / h }, 0.0);
        mass[[i, i]] = C64::new(if boundary { h / 3.0 } else { 2.0 * h / 3.0 }, 0.0);
        if boundary {
            conv[[i, i]] = C64::new(-0.5, 0.0);
        }
        if i + 1 < n {
            stiff[[i, i + 1]] = C64::new(-1.0 / h, 0.0);
            stiff[[i + 1, i]] = C64::new(-1.0 / h, 0.0);
            mass[[i, i + 1]] = C64::new(h / 6.0, 0.0);
            mass[[i + 1, i]] = C64::new(h / 6.0, 0.0);
            conv[[i, i + 1]] = C64::new(0.5, 0.0);
            conv[[i + 1, i]] = C64::new(-0.5, 0.0);
        }
    }

    let rho = C64::new(d, b);
    let mut e00 = Array2::<C64>::zeros((n, n));
    e00[[0, 0]] = C64::new(1.0, 0.0);

    let q_h = &stiff - &e00.mapv(|z| z * rho);
    let two_ib = C64::new(0.0, 2.0 * b);
    let c = C64::new(d * d + b * b, 0.0);
    let q_g = &q_h - &conv.mapv(|z| z * two_ib) + mass.mapv(|z| z * c);
    (q_h, q_g, mass)
}

struct LevelDiagnostics {
    n: usize,
    qg_herm: f64,
    min_eigenvalue: f64,
    dieudonne: f64,
    k_deviation: f64,
}

fn run_level(n_el: usize, l: f64, d: f64, b: f64) -> Result<LevelDiagnostics> {
    let (q_h, q_g, mass) = assemble(n_el, l, d, b);
    let qg_herm = hermitian_deviation(&q_g) / max_abs(&q_g).max(1e-300);

    let fp = FormPair {
        q: q_g.clone(),
        m: mass.clone(),
        mesh: format!("P1, {n_el} elements on [0, {l}], Robin({d}+{b}i) / Dirichlet"),
    };
    let restriction = klmn_restrict(&fp, None)?;
    let min_eigenvalue = restriction.eigenvalues[0];

    // Dieudonne identity in form representation: Q_G M^{-1} Q_H = Q_H* M^{-1} Q_G,
    // tracked in the Frobenius norm (only the refinement ratio matters)
    use ndarray_linalg::Inverse;
    let fro = |m: &CMatrix| m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let minv = mass.inv()?;
    let lhs = q_g.dot(&minv).dot(&q_h);
    let rhs = adjoint(&q_h).dot(&minv).dot(&q_g);
    let dieudonne = fro(&(&lhs - &rhs)) / fro(&lhs).max(1e-300);

    // transport to the mass-orthonormal frame and symmetrize there; the
    // generalized eigenvalue bound above certifies the frame metric
    let m_mh = &restriction.mass_root_inverse;
    let h_tilde = m_mh.dot(&q_h).dot(m_mh);
    let g_tilde = m_mh.dot(&q_g).dot(m_mh);
    let metric = MetricOperator::dense_unchecked(g_tilde);
    let sym = symmetrize(&h_tilde, &metric)?;

    Ok(LevelDiagnostics {
        n: n_el,
        qg_herm,
        min_eigenvalue,
        dieudonne,
        k_deviation: sym.herm_residual,
    })
}

/// Runs the half-line scenario across the mesh ladder `{n/4, n/2, n}`.
pub fn robin_halfline(n: usize, l: f64, d: f64, b: f64) -> Result<ScenarioResult> {
    if d >= 0.0 {
        return Err(Error::ParameterDomain(format!(
            "the decaying regime needs d < 0, got d = {d}"
        )));
    }
    if n < 100 || !n.is_multiple_of(4) {
        return Err(Error::ParameterDomain(format!(
            "mesh ladder needs n >= 100 divisible by 4, got {n}"
        )));
    }
    if (d * l).exp() >= 1e-6 {
        return Err(Error::ParameterDomain(format!(
            "truncation error e^(d L) = {:.3e} too large; increase L",
            (d * l).exp()
        )));
    }

    let mut out = ScenarioResult::new("robin-halfline");
    out.param("n", n);
    out.param("l", l);
    out.param("d", d);
    out.param("b", b);

    let ladder: [usize; 3] = [n / 4, n / 2, n];
    let mut levels = Vec::new();
    for &n_el in &ladder {
        levels.push(run_level(n_el, l, d, b)?);
    }

    let bound = d * d - 0.05;
    for lev in &levels {
        out.push(CheckResult::residual_check(
            format!("qg-hermitian-{}", lev.n),
            "the metric form assembles Hermitian to machine precision",
            lev.qg_herm,
            1e-12,
        ));
        out.push(CheckResult::lower_bound_check(
            format!("metric-lower-bound-{}", lev.n),
            "smallest generalized eigenvalue of the metric form stays above d^2 - 0.05",
            lev.min_eigenvalue,
            bound,
        ));
        out.param(&format!("dieudonne_{}", lev.n), lev.dieudonne);
        out.param(&format!("k_deviation_{}", lev.n), lev.k_deviation);
    }

    if b == 0.0 {
        // real Robin condition: H is already Hermitian in the mass inner
        // product and the symmetrized operator is H itself
        let (q_h, _, mass) = assemble(n, l, d, b);
        out.push(CheckResult::residual_check(
            "b0-form-hermitian",
            "with b = 0 the Hamiltonian form is Hermitian",
            hermitian_deviation(&q_h) / max_abs(&q_h).max(1e-300),
            1e-12,
        ));
        let m_mh = psd_power(&mass, -0.5)?;
        let h_tilde = m_mh.dot(&q_h).dot(&m_mh);
        let (_, q_g, _) = assemble(n, l, d, b);
        let g_tilde = m_mh.dot(&q_g).dot(&m_mh);
        let metric = make_metric(g_tilde)?;
        let sym = symmetrize(&h_tilde, &metric)?;
        let k_minus_h = op_norm(&(&sym.k - &h_tilde)) / op_norm(&h_tilde).max(1e-300);
        out.push(CheckResult::residual_check(
            "b0-k-identity",
            "with b = 0 the symmetrized operator equals H in the mass frame",
            k_minus_h,
            1e-10,
        ));
    } else {
        for w in levels.windows(2) {
            out.push(CheckResult::residual_check(
                format!("dieudonne-decrease-{}-{}", w[0].n, w[1].n),
                "the Dieudonne defect G H - H* G decreases under mesh refinement",
                w[1].dieudonne / w[0].dieudonne.max(1e-300),
                1.0,
            ));
            out.push(CheckResult::lower_bound_check(
                format!("k-hermiticity-rate-{}-{}", w[0].n, w[1].n),
                "Hermiticity deviation of K shrinks at least 1.5x per mesh doubling",
                w[0].k_deviation / w[1].k_deviation.max(1e-300),
                1.5,
            ));
        }
    }

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn form_assembly_is_consistent() {
        let (q_h, q_g, mass) = assemble(50, 40.0, -1.0, 1.0);
        // Q_G Hermitian to machine precision despite the complex Robin term
        assert!(hermitian_deviation(&q_g) <= 1e-13 * max_abs(&q_g));
        // Q_H is NOT Hermitian for b != 0
        assert!(hermitian_deviation(&q_h) > 1e-3 * max_abs(&q_h));
        // mass positive
        let eig = crate::opcore::eigh(&mass).unwrap();
        assert!(eig.min_eigenvalue() > 0.0);
    }

    #[test]
    fn small_ladder_passes() {
        let res = robin_halfline(200, 40.0, -1.0, 1.0).unwrap();
        assert!(res.passed(), "failed: {:?}", res.checks);
    }

    #[test]
    fn b_zero_reduces_to_hermitian() {
        let res = robin_halfline(200, 40.0, -1.0, 0.0).unwrap();
        assert!(res.passed(), "failed: {:?}", res.checks);
        assert!(res.checks.iter().any(|c| c.name == "b0-k-identity"));
    }

    #[test]
    fn parameter_domain_is_enforced() {
        assert!(robin_halfline(200, 40.0, 1.0, 1.0).is_err()); // d > 0
        assert!(robin_halfline(50, 40.0, -1.0, 1.0).is_err()); // too coarse
        assert!(robin_halfline(200, 5.0, -1.0, 1.0).is_err()); // truncation too short
    }
}
