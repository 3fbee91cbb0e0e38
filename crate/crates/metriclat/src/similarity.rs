//! Intertwining relations and the similarity hierarchy.
//!
//! `T` intertwines `A` and `B` when `BT = TA`. The strength of the relation
//! is graded by what `T` admits: a bounded inverse that also intertwines
//! (similar), a mere inverse (quasi-similar), or only the bilinear identity
//! `<T xi, B* eta> = <T A xi, eta>` (weakly quasi-similar; at finite
//! dimension this coincides with the strong identity entry by entry, and the
//! report records both residuals).
//!
//! "Bounded inverse" is meaningless at a fixed truncation, so verdicts use a
//! condition-number threshold [`KAPPA_MAX`] and, for operator families, a
//! truncation ladder of `||T_N^{-1}||`: growth beyond 2x per doubling flags
//! an unbounded inverse.

use ndarray::prelude::*;
use ndarray_linalg::Inverse;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::opcore::{
    adjoint, eig_general, eigvals_general, ensure_same_dim, hermitian_deviation, max_abs, op_norm,
    psd_power, singular_extremes, CMatrix, CVector,
};
use crate::symbol::DiagSymbol;

/// Condition threshold standing in for "bounded inverse" at one truncation.
pub const KAPPA_MAX: f64 = 1e8;

/// Ladder growth of `||T_N^{-1}||` beyond this factor per dimension doubling
/// flags an unbounded inverse.
pub const LADDER_GROWTH_FLAG: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityClass {
    Similar,
    QuasiSimilar,
    WeaklyQuasiSimilar,
    MutuallyQuasiSimilar,
    None,
}

/// Outcome of an intertwining check on a triple `(A, B, T)`.
#[derive(Debug, Clone, Serialize)]
pub struct IntertwiningReport {
    /// `||BT - TA|| / (||B|| ||T|| + ||T|| ||A||)`.
    pub residual: f64,
    /// Entrywise residual of the bilinear identity; coincides with the strong
    /// identity at finite dimension up to the choice of norm.
    pub weak_residual: f64,
    pub t_invertible: bool,
    /// `1/sigma_min(T)`; `None` is the unbounded flag (numerically singular).
    pub t_inverse_norm: Option<f64>,
    pub t_condition: f64,
    pub inverse_intertwines: bool,
    pub classification: SimilarityClass,
    /// `(N, ||T_N^{-1}||)` diagnostics when a truncation family was supplied.
    pub ladder_growth: Option<Vec<(usize, f64)>>,
}

fn conformable(a: &CMatrix, b: &CMatrix, t: &CMatrix) -> Result<()> {
    ensure_same_dim(a.nrows(), a.ncols())?;
    ensure_same_dim(b.nrows(), b.ncols())?;
    ensure_same_dim(t.ncols(), a.nrows())?;
    ensure_same_dim(t.nrows(), b.nrows())?;
    Ok(())
}

/// Checks `BT = TA` and classifies the triple.
pub fn check_intertwining(
    a: &CMatrix,
    b: &CMatrix,
    t: &CMatrix,
    tol: f64,
) -> Result<IntertwiningReport> {
    conformable(a, b, t)?;
    let bt = b.dot(t);
    let ta = t.dot(a);
    let defect = &bt - &ta;
    let scale = op_norm(b) * op_norm(t) + op_norm(t) * op_norm(a);
    let residual = op_norm(&defect) / scale.max(1e-300);
    let weak_scale = max_abs(&bt).max(max_abs(&ta)).max(1e-300);
    let weak_residual = max_abs(&defect) / weak_scale;

    let (smax, smin) = singular_extremes(t);
    let square = t.nrows() == t.ncols();
    let floor = f64::EPSILON * smax * t.nrows().max(1) as f64;
    let numerically_invertible = square && smin > floor;
    let kappa = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let t_invertible = numerically_invertible && kappa <= KAPPA_MAX;
    let t_inverse_norm = if numerically_invertible {
        Some(1.0 / smin)
    } else {
        None
    };

    let inverse_intertwines = if t_invertible {
        let tinv = t.inv()?;
        let lhs = a.dot(&tinv);
        let rhs = tinv.dot(b);
        op_norm(&(&lhs - &rhs)) / scale.max(1e-300) <= tol
    } else {
        false
    };

    let strong_ok = residual <= tol;
    let weak_ok = weak_residual <= tol;
    let classification = if strong_ok && t_invertible && inverse_intertwines {
        SimilarityClass::Similar
    } else if strong_ok && numerically_invertible {
        SimilarityClass::QuasiSimilar
    } else if weak_ok && numerically_invertible {
        SimilarityClass::WeaklyQuasiSimilar
    } else {
        SimilarityClass::None
    };

    Ok(IntertwiningReport {
        residual,
        weak_residual,
        t_invertible,
        t_inverse_norm,
        t_condition: kappa,
        inverse_intertwines,
        classification,
        ladder_growth: None,
    })
}

/// Mutual check: `T_ab` intertwines `(A, B)` and `T_ba` intertwines `(B, A)`.
pub fn check_mutual(
    a: &CMatrix,
    b: &CMatrix,
    t_ab: &CMatrix,
    t_ba: &CMatrix,
    tol: f64,
) -> Result<IntertwiningReport> {
    let fwd = check_intertwining(a, b, t_ab, tol)?;
    let bwd = check_intertwining(b, a, t_ba, tol)?;
    let both_quasi = matches!(
        fwd.classification,
        SimilarityClass::Similar | SimilarityClass::QuasiSimilar
    ) && matches!(
        bwd.classification,
        SimilarityClass::Similar | SimilarityClass::QuasiSimilar
    );
    let mut report = fwd;
    if both_quasi {
        report.classification = SimilarityClass::MutuallyQuasiSimilar;
    }
    Ok(report)
}

/// `||T_N^{-1}||` across a truncation family; the operational meaning of
/// "unbounded inverse" for a discretized operator.
pub fn inverse_norm_ladder(family: &[(usize, CMatrix)]) -> Vec<(usize, f64)> {
    family
        .iter()
        .map(|(n, t)| {
            let (_, smin) = singular_extremes(t);
            (*n, if smin > 0.0 { 1.0 / smin } else { f64::INFINITY })
        })
        .collect()
}

/// True when the ladder grows faster than [`LADDER_GROWTH_FLAG`] per
/// doubling of the truncation parameter.
pub fn ladder_flags_unbounded(ladder: &[(usize, f64)]) -> bool {
    ladder.windows(2).any(|w| {
        let (n0, v0) = w[0];
        let (n1, v1) = w[1];
        if n1 <= n0 || v0 <= 0.0 {
            return false;
        }
        let doublings = (n1 as f64 / n0 as f64).log2();
        v1 / v0 > LADDER_GROWTH_FLAG.powf(doublings)
    })
}

/// Attaches a `||T_N^{-1}||` truncation ladder to a report. A growing ladder
/// is the operational "unbounded inverse": a pair that classified as similar
/// at one truncation is downgraded to quasi-similar.
pub fn classify_with_ladder(
    mut report: IntertwiningReport,
    ladder: Vec<(usize, f64)>,
) -> IntertwiningReport {
    if ladder_flags_unbounded(&ladder) && report.classification == SimilarityClass::Similar {
        report.classification = SimilarityClass::QuasiSimilar;
    }
    report.ladder_growth = Some(ladder);
    report
}

/// Point spectrum with multiplicities and per-eigenpair residuals.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    /// `(eigenvalue cluster representative, algebraic multiplicity)`.
    pub eigenvalues: Vec<(C64, usize)>,
    /// `||A v - lambda v||` for each raw eigenpair, in spectrum order.
    pub residuals: Vec<f64>,
}

/// Clusters the sorted eigenvalue list at radius `cluster_tol`.
pub fn spectrum(a: &CMatrix, cluster_tol: f64) -> Result<SpectrumReport> {
    let (vals, vecs) = eig_general(a)?;
    let residuals = crate::opcore::eig_residuals(a, &vals, &vecs);
    let mut clusters: Vec<(C64, usize)> = Vec::new();
    for &v in &vals {
        match clusters.last_mut() {
            Some((rep, count)) if (v - *rep).norm() <= cluster_tol => {
                // running mean keeps the representative centered
                let c = *count as f64;
                *rep = (*rep * c + v) / (c + 1.0);
                *count += 1;
            }
            _ => clusters.push((v, 1)),
        }
    }
    Ok(SpectrumReport {
        eigenvalues: clusters,
        residuals,
    })
}

impl SpectrumReport {
    pub fn total_multiplicity(&self) -> usize {
        self.eigenvalues.iter().map(|(_, m)| m).sum()
    }
}

/// Minimum-cost assignment (Jonker-Volgenant style shortest augmenting
/// paths). Returns for each row the matched column. Deterministic; ties are
/// broken by index order.
pub fn min_cost_assignment(cost: &Array2<f64>) -> Vec<usize> {
    let n = cost.nrows();
    let m = cost.ncols();
    assert!(n <= m, "assignment needs rows <= cols");
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost[[i0 - 1, j - 1]] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![usize::MAX; n];
    for j in 1..=m {
        if p[j] != 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    assign
}

/// Result of comparing two point spectra under an optimal pairing.
#[derive(Debug, Clone, Serialize)]
pub struct SpectraMatch {
    pub matched: bool,
    /// `(lambda of A, paired mu of B, |lambda - mu|)`.
    pub pairing: Vec<(C64, C64, f64)>,
    /// Largest pair distance: the bottleneck of the optimal assignment.
    pub max_distance: f64,
}

/// Pairs the spectra of `A` and `B` by optimal assignment on
/// `|lambda_i - mu_j|`; matched when the worst pair is within `tol` (which
/// also forces the cluster multiplicities to agree at that resolution).
pub fn spectra_compare(a: &CMatrix, b: &CMatrix, tol: f64) -> Result<SpectraMatch> {
    ensure_same_dim(a.nrows(), b.nrows())?;
    let la = eigvals_general(a)?;
    let lb = eigvals_general(b)?;
    let n = la.len();
    let cost = Array2::from_shape_fn((n, n), |(i, j)| (la[i] - lb[j]).norm());
    let assign = min_cost_assignment(&cost);
    let mut pairing = Vec::with_capacity(n);
    let mut worst: f64 = 0.0;
    for (i, &j) in assign.iter().enumerate() {
        let d = cost[[i, j]];
        worst = worst.max(d);
        pairing.push((la[i], lb[j], d));
    }
    Ok(SpectraMatch {
        matched: worst <= tol,
        pairing,
        max_distance: worst,
    })
}

/// One eigenpair of `A` pushed through the intertwiner.
#[derive(Debug, Clone)]
pub struct MappedEigenpair {
    pub lambda: C64,
    pub xi: CVector,
    pub t_xi: CVector,
    /// `||B (T xi) - lambda (T xi)||`.
    pub residual: f64,
}

/// Pushes every eigenpair of `A` through `T`; each image is an eigenvector of
/// `B` for the same eigenvalue whenever `T` intertwines within `tol`.
pub fn map_eigenvectors(
    a: &CMatrix,
    b: &CMatrix,
    t: &CMatrix,
    tol: f64,
) -> Result<Vec<MappedEigenpair>> {
    let pre = check_intertwining(a, b, t, tol)?;
    if pre.residual > tol {
        return Err(Error::IntertwiningFailed {
            residual: pre.residual,
            tolerance: tol,
        });
    }
    let (vals, vecs) = eig_general(a)?;
    let mut out = Vec::with_capacity(vals.len());
    for (k, &lambda) in vals.iter().enumerate() {
        let xi = vecs.column(k).to_owned();
        let t_xi = t.dot(&xi);
        let bt_xi = b.dot(&t_xi);
        let defect = &bt_xi - &t_xi.mapv(|z| z * lambda);
        out.push(MappedEigenpair {
            lambda,
            xi,
            t_xi,
            residual: crate::opcore::vec_norm(&defect.view()),
        });
    }
    Ok(out)
}

/// Resolvent conjugation `X_lambda = T (A - lambda)^{-1} T^{-1}` with its
/// one-sided inverse residuals against `B - lambda`.
#[derive(Debug, Clone)]
pub struct ResolventIntertwine {
    pub x_lambda: CMatrix,
    /// `||(B - lambda) X_lambda - I||`: the left-inverse defect.
    pub left_residual: f64,
    /// `||X_lambda (B - lambda) - I||`: the right-inverse defect.
    pub right_residual: f64,
}

/// Builds `X_lambda` for `lambda` outside the point spectrum of `A` (within
/// `margin`, absolute distance in the complex plane).
pub fn resolvent_intertwine(
    a: &CMatrix,
    b: &CMatrix,
    t: &CMatrix,
    lambda: C64,
    margin: f64,
) -> Result<ResolventIntertwine> {
    conformable(a, b, t)?;
    let spec = eigvals_general(a)?;
    let dist = spec
        .iter()
        .map(|&z| (z - lambda).norm())
        .fold(f64::INFINITY, f64::min);
    if dist <= margin {
        return Err(Error::LambdaInSpectrum {
            lambda,
            distance: dist,
            margin,
        });
    }
    let n = a.nrows();
    let eye = crate::opcore::identity(n);
    let shifted_a = a - &eye.mapv(|z| z * lambda);
    let res_a = shifted_a.inv()?;
    let tinv = t.inv()?;
    let x = t.dot(&res_a).dot(&tinv);
    let shifted_b = b - &eye.mapv(|z| z * lambda);
    let left = shifted_b.dot(&x) - &eye;
    let right = x.dot(&shifted_b) - &eye;
    Ok(ResolventIntertwine {
        x_lambda: x,
        left_residual: op_norm(&left),
        right_residual: op_norm(&right),
    })
}

/// Outcome of the positivity-criterion test for `A = T^{-1} A* T`.
#[derive(Debug, Clone)]
pub struct WilliamsReport {
    /// Whether `0` stays outside the numerical range of `T` with margin.
    pub applicable: bool,
    /// The separating rotation angle.
    pub theta: f64,
    /// `max_theta lambda_min(Re(e^{i theta} T))`, relative to `||T||`.
    pub margin: f64,
    /// Hermitian conjugate `L = B^{1/2} A B^{-1/2}` with
    /// `B = Re(e^{i theta} T)`, present when applicable.
    pub l: Option<CMatrix>,
    /// `||L - L*|| / ||L||` when `L` was formed.
    pub l_hermitian_residual: Option<f64>,
}

/// Williams-type test: a quasi-Hermitian relation `TA = A*T` with `0`
/// outside the closed numerical range of `T` produces a Hermitian conjugate
/// of `A`, hence a real spectrum.
pub fn williams_test(a: &CMatrix, t: &CMatrix, tol: f64, nr_margin: f64) -> Result<WilliamsReport> {
    ensure_same_dim(a.nrows(), t.nrows())?;
    let ta = t.dot(a);
    let at = adjoint(a).dot(t);
    let scale = 2.0 * op_norm(t) * op_norm(a);
    let rel = op_norm(&(&ta - &at)) / scale.max(1e-300);
    if rel > tol {
        return Err(Error::PreconditionFailed(format!(
            "TA = A*T fails: relative residual {rel:.3e} > {tol:.3e}"
        )));
    }

    let t_norm = op_norm(t).max(1e-300);
    let n_angles = 360;
    let mut best_margin = f64::NEG_INFINITY;
    let mut best_theta = 0.0;
    for j in 0..n_angles {
        let theta = 2.0 * std::f64::consts::PI * (j as f64) / (n_angles as f64);
        let rot = C64::from_polar(1.0, theta);
        let h = crate::opcore::hermitian_part(&t.mapv(|z| z * rot));
        let eig = crate::opcore::eigh_with(&h, 1.0)?;
        if eig.min_eigenvalue() > best_margin {
            best_margin = eig.min_eigenvalue();
            best_theta = theta;
        }
    }
    let margin = best_margin / t_norm;
    if margin < nr_margin {
        return Ok(WilliamsReport {
            applicable: false,
            theta: best_theta,
            margin,
            l: None,
            l_hermitian_residual: None,
        });
    }

    let rot = C64::from_polar(1.0, best_theta);
    let b = crate::opcore::hermitian_part(&t.mapv(|z| z * rot));
    // B A = A* B, so the Hermitian conjugate is B^{1/2} A B^{-1/2}.
    let b_half = psd_power(&b, 0.5)?;
    let b_mhalf = psd_power(&b, -0.5)?;
    let l = b_half.dot(a).dot(&b_mhalf);
    let herm = hermitian_deviation(&l) / max_abs(&l).max(1e-300);
    Ok(WilliamsReport {
        applicable: true,
        theta: best_theta,
        margin,
        l: Some(l),
        l_hermitian_residual: Some(herm),
    })
}

/// Mutual quasi-similarity of two normal operators forces unitary
/// equivalence; at finite dimension the criterion is spectral equality with
/// multiplicities.
pub fn mutual_quasi_normal_test(
    a: &CMatrix,
    b: &CMatrix,
    t_ab: &CMatrix,
    t_ba: &CMatrix,
    tol: f64,
) -> Result<SpectraMatch> {
    for (name, m) in [("A", a), ("B", b)] {
        let mh = adjoint(m);
        let comm = m.dot(&mh) - mh.dot(m);
        let scale = op_norm(m).powi(2).max(1e-300);
        let res = op_norm(&comm) / scale;
        if res > tol {
            let _ = name;
            return Err(Error::NotNormal {
                residual: res,
                tolerance: tol,
            });
        }
    }
    for (x, y, t) in [(a, b, t_ab), (b, a, t_ba)] {
        let rep = check_intertwining(x, y, t, tol)?;
        if rep.residual > tol {
            return Err(Error::IntertwiningFailed {
                residual: rep.residual,
                tolerance: tol,
            });
        }
    }
    let scale = op_norm(a).max(op_norm(b)).max(1.0);
    spectra_compare(a, b, tol * scale)
}

/// Admissibility of a diagonal symbolic intertwiner: a bounded diagonal
/// operator has nonempty resolvent set, which forces every intertwiner for it
/// to be bounded; an unbounded symbol is therefore rejected.
pub fn check_symbolic_intertwiner(a: &DiagSymbol, t: &DiagSymbol) -> Result<()> {
    if a.is_bounded() && t.is_unbounded() {
        return Err(Error::PreconditionFailed(
            "bounded diagonal operator admits only bounded intertwiners; \
             the supplied symbol grows without bound"
                .into(),
        ));
    }
    Ok(())
}
