//! Dense complex linear-algebra substrate.
//!
//! Everything downstream (metrics, lattices, similarity diagnostics) is built
//! on four primitives: Hermitian eigendecomposition, positive functional
//! calculus, operator norms and the numerical range. Factorizations are
//! delegated to LAPACK; validation, ordering conventions and the residual
//! contracts live here.

use ndarray::prelude::*;
use ndarray_linalg::{Eig, Eigh, SVD, UPLO};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Dense complex matrix, the working representation of every operator.
pub type CMatrix = Array2<C64>;
/// Dense complex vector.
pub type CVector = Array1<C64>;

/// Relative Hermiticity tolerance: max |H - H*| entry against the largest
/// entry of H. Loose enough for discretization noise, tight enough to catch
/// modeling errors.
pub const HERM_TOL: f64 = 1e-10;

/// Relative positive-definiteness floor for metric validation.
pub const PD_TOL: f64 = 1e-12;

/// Inner product, linear in the first argument: `sum_k x_k * conj(y_k)`.
pub fn inner(x: &ArrayView1<C64>, y: &ArrayView1<C64>) -> C64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b.conj()).sum()
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(x: &ArrayView1<C64>) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entry modulus; zero matrix gives 0.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Identity matrix of size `n`.
pub fn identity(n: usize) -> CMatrix {
    Array2::eye(n)
}

/// Conjugate transpose.
pub fn adjoint(a: &CMatrix) -> CMatrix {
    a.t().mapv(|z| z.conj())
}

/// Hermitian part `(A + A*)/2`.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    let at = adjoint(a);
    (a + &at).mapv(|z| z * 0.5)
}

pub(crate) fn ensure_square(a: &CMatrix) -> Result<usize> {
    let (r, c) = a.dim();
    if r != c {
        return Err(Error::NotSquare { rows: r, cols: c });
    }
    Ok(r)
}

pub(crate) fn ensure_finite(a: &CMatrix) -> Result<()> {
    for ((i, j), z) in a.indexed_iter() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFiniteEntry { row: i, col: j });
        }
    }
    Ok(())
}

pub(crate) fn ensure_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            got: b,
        });
    }
    Ok(())
}

/// Entrywise Hermiticity deviation `max |H - H*|`.
pub fn hermitian_deviation(h: &CMatrix) -> f64 {
    let n = h.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            dev = dev.max((h[[i, j]] - h[[j, i]].conj()).norm());
        }
    }
    dev
}

fn ensure_hermitian(h: &CMatrix, herm_tol: f64) -> Result<()> {
    let scale = max_abs(h).max(1e-300);
    let dev = hermitian_deviation(h);
    if dev > herm_tol * scale {
        return Err(Error::NotHermitian {
            deviation: dev / scale,
            tolerance: herm_tol,
        });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are ascending; `vectors` holds the corresponding orthonormal
/// eigenvectors as columns, so `vectors * diag(eigenvalues) * vectors^*`
/// reconstructs the input.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEig {
    /// `V diag(f(lambda)) V*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (k, col) in scaled.columns_mut().into_iter().enumerate() {
            let fk = C64::new(f(self.eigenvalues[k]), 0.0);
            let mut col = col;
            col.mapv_inplace(|z| z * fk);
        }
        let vh = adjoint(&self.vectors);
        scaled.dot(&vh)
    }

    /// Reassemble the original matrix.
    pub fn reconstruct(&self) -> CMatrix {
        self.apply(|x| x)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

/// Hermitian eigendecomposition with the default Hermiticity tolerance.
pub fn eigh(h: &CMatrix) -> Result<HermitianEig> {
    eigh_with(h, HERM_TOL)
}

/// Hermitian eigendecomposition; `herm_tol` is relative to the largest entry.
///
/// The input is validated, symmetrized exactly (`(H + H*)/2`) and passed to
/// LAPACK. Eigenvalues come back ascending.
pub fn eigh_with(h: &CMatrix, herm_tol: f64) -> Result<HermitianEig> {
    ensure_square(h)?;
    ensure_finite(h)?;
    ensure_hermitian(h, herm_tol)?;
    // The LAPACK binding reads the buffer column-major; a row-major complex
    // matrix would be diagonalized as its transpose, conjugating the
    // eigenvectors. Hand it a Fortran-order copy.
    let n = h.nrows();
    let mut sym = Array2::zeros((n, n).f());
    sym.assign(&hermitian_part(h));
    let (vals, vecs) = sym.eigh(UPLO::Lower)?;
    Ok(HermitianEig {
        eigenvalues: vals.to_vec(),
        vectors: vecs,
    })
}

/// `G^alpha` for a strictly positive Hermitian `G` via functional calculus.
pub fn psd_power(g: &CMatrix, alpha: f64) -> Result<CMatrix> {
    psd_power_with(g, alpha, PD_TOL)
}

/// `G^alpha` with an explicit relative positivity floor.
pub fn psd_power_with(g: &CMatrix, alpha: f64, pd_tol: f64) -> Result<CMatrix> {
    let eig = eigh(g)?;
    let scale = eig.max_eigenvalue().abs().max(1e-300);
    let floor = pd_tol * scale;
    let min = eig.min_eigenvalue();
    if min <= floor {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: min,
            threshold: floor,
        });
    }
    Ok(eig.apply(|x| x.powf(alpha)))
}

/// Largest singular value.
pub fn op_norm(a: &CMatrix) -> f64 {
    singular_extremes(a).0
}

/// Smallest singular value.
pub fn sigma_min(a: &CMatrix) -> f64 {
    singular_extremes(a).1
}

/// `(sigma_max, sigma_min)`.
pub fn singular_extremes(a: &CMatrix) -> (f64, f64) {
    if a.is_empty() {
        return (0.0, 0.0);
    }
    match a.svd(false, false) {
        Ok((_, s, _)) => {
            let smax = s.iter().copied().fold(0.0, f64::max);
            let smin = s.iter().copied().fold(f64::INFINITY, f64::min);
            (smax, smin)
        }
        // SVD failure on a finite matrix is pathological; report a norm that
        // no downstream threshold will accept.
        Err(_) => (f64::INFINITY, 0.0),
    }
}

/// Two-sided condition number `sigma_max / sigma_min`; infinite when singular.
pub fn condition_number(a: &CMatrix) -> f64 {
    let (smax, smin) = singular_extremes(a);
    if smin == 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

/// Relative operator-norm residual `||A - B|| / max(scale, tiny)`.
pub fn rel_residual(a: &CMatrix, b: &CMatrix, scale: f64) -> f64 {
    op_norm(&(a - b)) / scale.max(1e-300)
}

/// Sorted eigenvalues and eigenvectors of a general complex matrix.
///
/// Eigenvalues ascend by real part, ties broken by imaginary part; columns of
/// `vectors` follow the same order, unit norm, phase fixed so the
/// largest-modulus component is real nonnegative. No backward-stability claim
/// is made beyond the per-pair residuals available via `eig_residuals`.
pub fn eig_general(a: &CMatrix) -> Result<(Vec<C64>, CMatrix)> {
    ensure_square(a)?;
    ensure_finite(a)?;
    let (vals, vecs) = a.eig()?;
    let n = vals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        vals[i]
            .re
            .total_cmp(&vals[j].re)
            .then(vals[i].im.total_cmp(&vals[j].im))
    });
    let sorted_vals: Vec<C64> = order.iter().map(|&i| vals[i]).collect();
    let mut sorted_vecs = Array2::zeros((n, n));
    for (k, &i) in order.iter().enumerate() {
        let mut col = vecs.column(i).to_owned();
        let nrm = vec_norm(&col.view());
        if nrm > 0.0 {
            col.mapv_inplace(|z| z / nrm);
        }
        // Deterministic phase: rotate the largest component onto the
        // positive real axis.
        if let Some(piv) = col
            .iter()
            .cloned()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        {
            if piv.norm() > 0.0 {
                let phase = piv / piv.norm();
                col.mapv_inplace(|z| z / phase);
            }
        }
        sorted_vecs.column_mut(k).assign(&col);
    }
    Ok((sorted_vals, sorted_vecs))
}

/// Sorted eigenvalues of a general complex matrix.
pub fn eigvals_general(a: &CMatrix) -> Result<Vec<C64>> {
    Ok(eig_general(a)?.0)
}

/// Per-eigenpair residuals `||A v - lambda v||` for unit `v`.
pub fn eig_residuals(a: &CMatrix, vals: &[C64], vecs: &CMatrix) -> Vec<f64> {
    vals.iter()
        .enumerate()
        .map(|(k, &lam)| {
            let v = vecs.column(k);
            let av = a.dot(&v);
            let diff = &av - &v.mapv(|z| z * lam);
            vec_norm(&diff.view())
        })
        .collect()
}

/// Rayleigh quotient `<Tx, x> / <x, x>`.
pub fn rayleigh(t: &CMatrix, x: &ArrayView1<C64>) -> C64 {
    let tx = t.dot(x);
    inner(&tx.view(), x) / inner(x, x)
}

/// Boundary support points of the numerical range `W(T)`.
///
/// For each direction `theta` the returned point is `<Tv, v>` at the top
/// eigenvector `v` of the Hermitian part of `e^{i theta} T`; the polygon they
/// span contains every Rayleigh quotient of `T`.
pub fn numerical_range(t: &CMatrix, n_angles: usize) -> Result<Vec<C64>> {
    if n_angles < 8 {
        return Err(Error::PreconditionFailed(format!(
            "numerical_range needs n_angles >= 8, got {n_angles}"
        )));
    }
    ensure_square(t)?;
    ensure_finite(t)?;
    let mut pts = Vec::with_capacity(n_angles);
    for j in 0..n_angles {
        let theta = 2.0 * std::f64::consts::PI * (j as f64) / (n_angles as f64);
        let rot = C64::from_polar(1.0, theta);
        let rotated = t.mapv(|z| z * rot);
        let h = hermitian_part(&rotated);
        let eig = eigh_with(&h, 1.0)?;
        let v = eig.vectors.column(eig.eigenvalues.len() - 1);
        let tv = t.dot(&v);
        pts.push(inner(&tv.view(), &v));
    }
    Ok(pts)
}

/// Signed distance of `0` from the numerical range along its support
/// directions: `min_theta Re(e^{-i theta} p_theta)`. Positive means `0` lies
/// strictly outside `W(T)`.
pub fn numerical_range_margin(t: &CMatrix, n_angles: usize) -> Result<f64> {
    if n_angles < 8 {
        return Err(Error::PreconditionFailed(format!(
            "numerical_range needs n_angles >= 8, got {n_angles}"
        )));
    }
    ensure_square(t)?;
    let mut best = f64::NEG_INFINITY;
    for j in 0..n_angles {
        let theta = 2.0 * std::f64::consts::PI * (j as f64) / (n_angles as f64);
        let rot = C64::from_polar(1.0, theta);
        let rotated = t.mapv(|z| z * rot);
        let h = hermitian_part(&rotated);
        let eig = eigh_with(&h, 1.0)?;
        // min over W(e^{i theta} T) of the real part = lambda_min of the
        // Hermitian part; 0 outside W(T) iff some direction pushes it positive.
        best = best.max(eig.min_eigenvalue());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cdiag(vals: &[C64]) -> CMatrix {
        let n = vals.len();
        Array2::from_shape_fn((n, n), |(i, j)| if i == j { vals[i] } else { C64::ZERO })
    }

    fn rdiag(vals: &[f64]) -> CMatrix {
        cdiag(&vals.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    #[test]
    fn eigh_diagonal_sorts_ascending() {
        let h = rdiag(&[3.0, 1.0, 2.0]);
        let eig = eigh(&h).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 2.0, 3.0]);
        // permutation eigenvectors: each column is a standard basis vector
        for col in eig.vectors.columns() {
            let ones = col.iter().filter(|z| (z.norm() - 1.0).abs() < 1e-12).count();
            let zeros = col.iter().filter(|z| z.norm() < 1e-12).count();
            assert_eq!((ones, zeros), (1, 2));
        }
    }

    #[test]
    fn eigh_identity() {
        let eig = eigh(&identity(4)).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0; 4]);
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [4usize, 16, 33, 64] {
            let h = sampling::random_hermitian(n, &mut rng);
            let eig = eigh(&h).unwrap();
            let scale = eig
                .eigenvalues
                .iter()
                .fold(0.0f64, |m, &x| m.max(x.abs()));
            assert!(rel_residual(&eig.reconstruct(), &h, scale) <= 1e-12, "n={n}");
            // V*V = I
            let vhv = adjoint(&eig.vectors).dot(&eig.vectors);
            assert!(rel_residual(&vhv, &identity(n), 1.0) <= 1e-12, "n={n}");
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let a = array![
            [C64::new(1.0, 0.0), C64::new(2.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]
        ];
        assert!(matches!(eigh(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eigh_rejects_rectangular_and_nonfinite() {
        let rect: CMatrix = Array2::zeros((2, 3));
        assert!(matches!(eigh(&rect), Err(Error::NotSquare { .. })));
        let mut bad = identity(2);
        bad[[0, 1]] = C64::new(f64::NAN, 0.0);
        bad[[1, 0]] = C64::new(f64::NAN, 0.0);
        assert!(matches!(eigh(&bad), Err(Error::NonFiniteEntry { .. })));
    }

    #[test]
    fn psd_power_diagonal_sqrt() {
        let g = rdiag(&[4.0, 9.0]);
        let r = psd_power(&g, 0.5).unwrap();
        assert!(rel_residual(&r, &rdiag(&[2.0, 3.0]), 3.0) <= 1e-14);
    }

    #[test]
    fn psd_power_zero_gives_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = sampling::random_spd(6, &mut rng);
        let r = psd_power(&g, 0.0).unwrap();
        assert!(rel_residual(&r, &identity(6), 1.0) <= 1e-12);
    }

    #[test]
    fn psd_power_cube_root_cubes_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = sampling::random_spd(8, &mut rng);
        let r = psd_power(&g, 1.0 / 3.0).unwrap();
        let cubed = r.dot(&r).dot(&r);
        assert!(rel_residual(&cubed, &g, op_norm(&g)) <= 1e-10);
    }

    #[test]
    fn psd_power_group_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = sampling::random_spd(6, &mut rng);
        let exponents = [-1.0, -0.5, 1.0 / 3.0, 0.5, 1.0];
        for &a in &exponents {
            for &b in &exponents {
                let ga = psd_power(&g, a).unwrap();
                let gb = psd_power(&g, b).unwrap();
                let gab = psd_power(&g, a + b).unwrap();
                let prod = ga.dot(&gb);
                let scale = op_norm(&prod).max(op_norm(&gab));
                assert!(
                    rel_residual(&prod, &gab, scale) <= 1e-10,
                    "group law failed for alpha={a}, beta={b}"
                );
            }
        }
    }

    #[test]
    fn psd_power_rejects_indefinite() {
        let g = rdiag(&[1.0, 0.0]);
        assert!(matches!(
            psd_power(&g, 0.5),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn op_norm_basics() {
        assert_eq!(op_norm(&Array2::zeros((3, 3))), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = sampling::random_unitary(5, &mut rng);
        assert_abs_diff_eq!(op_norm(&u), 1.0, epsilon = 1e-12);
        let d = cdiag(&[C64::new(1.0, 0.0), C64::new(-5.0, 0.0), C64::new(0.0, 2.0)]);
        assert_abs_diff_eq!(op_norm(&d), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn op_norm_dominates_vectors_and_is_attained() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let a = sampling::random_complex(7, &mut rng);
        let nrm = op_norm(&a);
        for _ in 0..50 {
            let x = sampling::random_vector(7, &mut rng);
            let ax = a.dot(&x);
            assert!(vec_norm(&ax.view()) <= nrm * vec_norm(&x.view()) * (1.0 + 1e-12));
        }
        // equality at the top right-singular vector
        let (_, _, vt) = a.svd(false, true).unwrap();
        let v0 = adjoint(&vt.unwrap()).column(0).to_owned();
        let av = a.dot(&v0);
        assert_abs_diff_eq!(vec_norm(&av.view()), nrm, epsilon = 1e-10 * nrm.max(1.0));
    }

    #[test]
    fn numerical_range_identity_and_segment() {
        let pts = numerical_range(&identity(3), 16).unwrap();
        for p in pts {
            assert_abs_diff_eq!(p.re, 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(p.im, 0.0, epsilon = 1e-10);
        }
        // normal diag(1,3): range is the real segment [1,3]
        let d = rdiag(&[1.0, 3.0]);
        let pts = numerical_range(&d, 64).unwrap();
        for p in &pts {
            assert!(p.im.abs() <= 1e-10);
            assert!(p.re >= 1.0 - 1e-10 && p.re <= 3.0 + 1e-10);
        }
        let re_min = pts.iter().map(|p| p.re).fold(f64::INFINITY, f64::min);
        let re_max = pts.iter().map(|p| p.re).fold(f64::NEG_INFINITY, f64::max);
        assert_abs_diff_eq!(re_min, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(re_max, 3.0, epsilon = 1e-10);
    }

    #[test]
    fn numerical_range_jordan_block_disk() {
        // 2x2 nilpotent Jordan block: W is the closed disk of radius 1/2.
        let j = array![
            [C64::ZERO, C64::new(1.0, 0.0)],
            [C64::ZERO, C64::ZERO]
        ];
        let pts = numerical_range(&j, 64).unwrap();
        for p in &pts {
            assert_abs_diff_eq!(p.norm(), 0.5, epsilon = 1e-8);
        }
        // dense Rayleigh sampling stays inside the support polygon
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let x = sampling::random_vector(2, &mut rng);
            let q = rayleigh(&j, &x.view());
            assert!(q.norm() <= 0.5 + 1e-8);
        }
    }

    #[test]
    fn numerical_range_needs_enough_angles() {
        assert!(numerical_range(&identity(2), 4).is_err());
    }

    #[test]
    fn numerical_range_supports_dominate_rayleigh_quotients() {
        // support-function containment: for every direction, the support
        // point maximizes Re(e^{i theta} z) over the range
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let t = sampling::random_complex(6, &mut rng);
        let n_angles = 32;
        let pts = numerical_range(&t, n_angles).unwrap();
        for _ in 0..100 {
            let x = sampling::random_vector(6, &mut rng);
            let q = rayleigh(&t, &x.view());
            for (j, p) in pts.iter().enumerate() {
                let theta = 2.0 * std::f64::consts::PI * (j as f64) / (n_angles as f64);
                let rot = C64::from_polar(1.0, theta);
                assert!(
                    (rot * q).re <= (rot * p).re + 1e-10 * op_norm(&t),
                    "direction {j}: Rayleigh point escapes the support polygon"
                );
            }
        }
    }

    #[test]
    fn numerical_range_of_normal_matrix_is_hull_of_spectrum() {
        // normal matrix with complex spectrum: unitary conjugate of a diagonal
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let u = sampling::random_unitary(4, &mut rng);
        let lam = [
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(1.0, 1.0),
        ];
        let t = u.dot(&cdiag(&lam)).dot(&adjoint(&u));
        let pts = numerical_range(&t, 128).unwrap();
        // Hausdorff distance between the support polygon and the hull of the
        // eigenvalues (the unit square here): every support point lies on the
        // square, and every vertex of the square is approached.
        for p in &pts {
            assert!(p.re >= -1e-8 && p.re <= 1.0 + 1e-8);
            assert!(p.im >= -1e-8 && p.im <= 1.0 + 1e-8);
        }
        for v in &lam {
            let d = pts.iter().map(|p| (p - v).norm()).fold(f64::INFINITY, f64::min);
            assert!(d <= 1e-8, "vertex {v} missed by {d:.3e}");
        }
    }

    #[test]
    fn eig_general_sorted_and_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = sampling::random_complex(12, &mut rng);
        let (vals, vecs) = eig_general(&a).unwrap();
        for w in vals.windows(2) {
            assert!(
                w[0].re < w[1].re || (w[0].re == w[1].re && w[0].im <= w[1].im)
            );
        }
        let res = eig_residuals(&a, &vals, &vecs);
        let scale = op_norm(&a);
        for r in res {
            assert!(r <= 1e-10 * scale.max(1.0));
        }
    }
}
