//! Seeded random matrices for trials and the CLI.
//!
//! All randomness in the crate flows through a caller-supplied ChaCha8
//! generator, so a run is reproducible from its 64-bit seed alone and
//! identical across platforms.

use ndarray::prelude::*;
use ndarray_linalg::QR;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::opcore::{adjoint, CMatrix, CVector};

/// The crate-wide deterministic generator.
pub type Seeded = rand_chacha::ChaCha8Rng;

fn gauss(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Complex Ginibre matrix: i.i.d. standard complex Gaussian entries.
pub fn random_complex(n: usize, rng: &mut impl Rng) -> CMatrix {
    Array2::from_shape_fn((n, n), |_| gauss(rng))
}

/// Random complex vector with i.i.d. Gaussian entries.
pub fn random_vector(n: usize, rng: &mut impl Rng) -> CVector {
    Array1::from_shape_fn(n, |_| gauss(rng))
}

/// Haar-ish random unitary via QR of a Ginibre matrix, with the R diagonal
/// phase fixed so the distribution does not depend on the QR convention.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    let a = random_complex(n, rng);
    let (q, r) = a.qr().expect("QR of a Gaussian matrix");
    let mut q = q;
    for (k, mut col) in q.columns_mut().into_iter().enumerate() {
        let d = r[[k, k]];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            col.mapv_inplace(|z| z * phase);
        }
    }
    q
}

/// Random Hermitian matrix `(A + A*)/2` with Ginibre `A`.
pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
    let a = random_complex(n, rng);
    let at = adjoint(&a);
    (&a + &at).mapv(|z| z * 0.5)
}

/// Random Hermitian strictly positive matrix `T T* + eps I`.
pub fn random_spd(n: usize, rng: &mut impl Rng) -> CMatrix {
    let t = random_complex(n, rng);
    let tt = t.dot(&adjoint(&t));
    let eye = Array2::<C64>::eye(n).mapv(|z| z * C64::new(0.1, 0.0));
    tt + eye
}

/// Random matrix with prescribed condition number: `U diag(s) V*` with
/// singular values log-spaced in `[1/sqrt(kappa), sqrt(kappa)]`.
pub fn random_conditioned(n: usize, kappa: f64, rng: &mut impl Rng) -> CMatrix {
    assert!(kappa >= 1.0, "condition number must be >= 1");
    let u = random_unitary(n, rng);
    let v = random_unitary(n, rng);
    let lo = kappa.sqrt().recip();
    let hi = kappa.sqrt();
    let mut s = vec![0.0; n];
    if n == 1 {
        s[0] = 1.0;
    } else {
        for (k, sv) in s.iter_mut().enumerate() {
            let t = k as f64 / (n - 1) as f64;
            *sv = lo * (hi / lo).powf(t);
        }
    }
    let mut us = u;
    for (k, mut col) in us.columns_mut().into_iter().enumerate() {
        let sk = C64::new(s[k], 0.0);
        col.mapv_inplace(|z| z * sk);
    }
    us.dot(&adjoint(&v))
}

/// Random Hermitian positive matrix with eigenvalues log-spaced in
/// `[1/sqrt(kappa), sqrt(kappa)]`.
pub fn random_spd_conditioned(n: usize, kappa: f64, rng: &mut impl Rng) -> CMatrix {
    assert!(kappa >= 1.0, "condition number must be >= 1");
    let u = random_unitary(n, rng);
    let lo = kappa.sqrt().recip();
    let hi = kappa.sqrt();
    let mut us = u.clone();
    for (k, mut col) in us.columns_mut().into_iter().enumerate() {
        let t = if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 };
        let lam = C64::new(lo * (hi / lo).powf(t), 0.0);
        col.mapv_inplace(|z| z * lam);
    }
    us.dot(&adjoint(&u))
}
