//! Reproducible discretizations of concrete models.
//!
//! Each scenario builds its operators from a handful of numeric parameters,
//! runs a fixed list of named checks against stated tolerances, and can emit
//! `result.json` / `spectra.csv` / `lattice.json` artifacts. Convergence
//! claims are always ratios across a declared refinement ladder, never
//! absolute mesh-dependent constants; scenario checks delegate to the
//! library operations rather than re-deriving them.

use ndarray::prelude::*;
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::opcore::{eigh, CMatrix};
use crate::report::{atomic_write, atomic_write_json, CheckResult, SCHEMA};
use crate::similarity::SpectrumReport;

mod rank_one_pair;
mod derivative_pair;
mod oscillator;
mod robin_halfline;
mod weighted;

pub use rank_one_pair::rank_one_pair;
pub use derivative_pair::derivative_pair;
pub use oscillator::shifted_oscillator;
pub use robin_halfline::robin_halfline;
pub use weighted::{weighted_lattice_demo, WeightModel};

/// Discretization carrier: quadrature nodes and positive weights.
#[derive(Debug, Clone)]
pub struct Grid1D {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: GridKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridKind {
    Uniform { a: f64, b: f64 },
    Hermite,
}

impl Grid1D {
    /// Uniform nodes on `[a, b]` inclusive, trapezoid weights.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::GridTooCoarse { needed: 2, got: n });
        }
        if !(b > a) {
            return Err(Error::ParameterDomain(format!(
                "interval [{a}, {b}] is empty"
            )));
        }
        let h = (b - a) / (n - 1) as f64;
        let points: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
        let mut weights = vec![h; n];
        weights[0] = h / 2.0;
        weights[n - 1] = h / 2.0;
        Ok(Grid1D {
            points,
            weights,
            kind: GridKind::Uniform { a, b },
        })
    }

    /// Gauss-Hermite nodes of order `n` (for the weight `e^{-x^2}`), via the
    /// symmetric tridiagonal Jacobi matrix. The stored weights are the
    /// *total* weights `w_i e^{x_i^2}` suitable for plain `dx` integration of
    /// functions carrying their own Gaussian decay, computed stably as
    /// `1 / sum_k h_k(x_i)^2` over the first `n` Hermite functions.
    pub fn gauss_hermite(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::GridTooCoarse { needed: 2, got: n });
        }
        let mut j = Array2::<C64>::zeros((n, n));
        for k in 1..n {
            let beta = (k as f64 / 2.0).sqrt();
            j[[k - 1, k]] = C64::new(beta, 0.0);
            j[[k, k - 1]] = C64::new(beta, 0.0);
        }
        let eig = eigh(&j)?;
        let points = eig.eigenvalues.clone();
        let weights: Vec<f64> = points
            .iter()
            .map(|&x| {
                let h = hermite_functions(n, x);
                1.0 / h.iter().map(|v| v * v).sum::<f64>()
            })
            .collect();
        Ok(Grid1D {
            points,
            weights,
            kind: GridKind::Hermite,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Grid step of a uniform grid.
    pub fn step(&self) -> Option<f64> {
        match self.kind {
            GridKind::Uniform { a, b } => Some((b - a) / (self.len() - 1) as f64),
            GridKind::Hermite => None,
        }
    }

    /// Weighted inner product `sum_i w_i f_i conj(g_i)`.
    pub fn inner(&self, f: &ArrayView1<C64>, g: &ArrayView1<C64>) -> C64 {
        f.iter()
            .zip(g.iter())
            .zip(&self.weights)
            .map(|((a, b), &w)| a * b.conj() * w)
            .sum()
    }

    pub fn norm(&self, f: &ArrayView1<C64>) -> f64 {
        self.inner(f, f).re.max(0.0).sqrt()
    }

    /// Samples a real function on the nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Array1<C64> {
        Array1::from_iter(self.points.iter().map(|&x| C64::new(f(x), 0.0)))
    }

    /// Diagonal multiplication operator for a real function of `x`.
    pub fn diag_fn(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.len();
        Array2::from_shape_fn((n, n), |(i, j)| {
            if i == j {
                C64::new(f(self.points[i]), 0.0)
            } else {
                C64::ZERO
            }
        })
    }
}

/// Values of the first `n` orthonormal Hermite functions at `x`.
pub(crate) fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(n);
    let h0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    h.push(h0);
    if n > 1 {
        h.push(std::f64::consts::SQRT_2 * x * h0);
    }
    for k in 1..n.saturating_sub(1) {
        let next = x * (2.0 / (k as f64 + 1.0)).sqrt() * h[k]
            - (k as f64 / (k as f64 + 1.0)).sqrt() * h[k - 1];
        h.push(next);
    }
    h
}

/// Outcome of one scenario run.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioResult {
    pub name: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub checks: Vec<CheckResult>,
    pub spectra: Option<SpectrumReport>,
    /// Optional lattice export produced by the scenario.
    #[serde(skip)]
    pub lattice: Option<crate::lattice::LatticeGraph>,
    /// Rows `(index, re, im, residual)` for `spectra.csv`.
    #[serde(skip)]
    pub spectra_rows: Vec<(usize, f64, f64, f64)>,
    /// Paths written by `write_artifacts`.
    pub artifacts: Vec<PathBuf>,
}

impl ScenarioResult {
    pub fn new(name: impl Into<String>) -> Self {
        ScenarioResult {
            name: name.into(),
            params: BTreeMap::new(),
            checks: Vec::new(),
            spectra: None,
            lattice: None,
            spectra_rows: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.params.insert(key.to_string(), value.into());
    }

    pub fn push(&mut self, check: CheckResult) {
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Records spectrum rows for the CSV artifact.
    pub fn record_spectrum(&mut self, values: &[C64], residuals: &[f64]) {
        self.spectra_rows = values
            .iter()
            .enumerate()
            .map(|(i, z)| (i, z.re, z.im, residuals.get(i).copied().unwrap_or(0.0)))
            .collect();
    }

    /// Emits `result.json`, `spectra.csv` when present and `lattice.json`
    /// when present, into `dir`. Returns the written paths.
    pub fn write_artifacts(&mut self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut written = Vec::new();

        if !self.spectra_rows.is_empty() {
            let path = dir.join("spectra.csv");
            let mut text = String::from("index,re,im,residual\n");
            for (i, re, im, res) in &self.spectra_rows {
                text.push_str(&format!("{i},{re},{im},{res}\n"));
            }
            atomic_write(&path, text.as_bytes())?;
            written.push(path);
        }

        if let Some(graph) = &self.lattice {
            let path = dir.join("lattice.json");
            atomic_write_json(&path, &graph.to_json())?;
            written.push(path);
        }

        let path = dir.join("result.json");
        self.artifacts = written.clone();
        self.artifacts.push(path.clone());
        let doc = serde_json::json!({
            "schema": SCHEMA,
            "scenario": self.name,
            "params": self.params,
            "checks": self.checks,
            "passed": self.passed(),
            "spectra": self.spectra,
            "artifacts": self.artifacts,
        });
        atomic_write_json(&path, &doc)?;
        written.push(path);
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn uniform_grid_weights_integrate_constants() {
        let g = Grid1D::uniform(-1.0, 1.0, 101).unwrap();
        let total: f64 = g.weights.iter().sum();
        assert_relative_eq!(total, 2.0, max_relative = 1e-12);
        assert!(g.points.windows(2).all(|w| w[1] > w[0]));
        assert!(g.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn gauss_hermite_integrates_moments() {
        // total weights integrate f(x) directly when f decays like a
        // Gaussian: check on x^2 e^{-x^2} and e^{-x^2}
        let g = Grid1D::gauss_hermite(32).unwrap();
        let m0: f64 = g
            .points
            .iter()
            .zip(&g.weights)
            .map(|(&x, &w)| w * (-x * x).exp())
            .sum();
        assert_relative_eq!(m0, std::f64::consts::PI.sqrt(), max_relative = 1e-12);
        let m2: f64 = g
            .points
            .iter()
            .zip(&g.weights)
            .map(|(&x, &w)| w * x * x * (-x * x).exp())
            .sum();
        assert_relative_eq!(m2, std::f64::consts::PI.sqrt() / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn hermite_transform_is_unitary() {
        let n = 48;
        let g = Grid1D::gauss_hermite(n).unwrap();
        let mut u = Array2::<C64>::zeros((n, n));
        for (i, (&x, &w)) in g.points.iter().zip(&g.weights).enumerate() {
            let h = hermite_functions(n, x);
            for k in 0..n {
                u[[k, i]] = C64::new(w.sqrt() * h[k], 0.0);
            }
        }
        let uhu = crate::opcore::adjoint(&u).dot(&u);
        assert!(
            crate::opcore::rel_residual(&uhu, &crate::opcore::identity(n), 1.0) <= 1e-12
        );
    }

    #[test]
    fn grids_reject_bad_parameters() {
        assert!(Grid1D::uniform(0.0, 1.0, 1).is_err());
        assert!(Grid1D::uniform(1.0, 0.0, 10).is_err());
        assert!(Grid1D::gauss_hermite(1).is_err());
    }

    #[test]
    fn scenario_artifacts_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = ScenarioResult::new("demo");
        s.param("n", 4);
        s.push(CheckResult::residual_check("c", "claim", 0.0, 1.0));
        s.record_spectrum(&[C64::new(1.0, 0.0)], &[0.0]);
        let written = s.write_artifacts(dir.path()).unwrap();
        assert_eq!(written.len(), 2);
        let json = std::fs::read_to_string(dir.path().join("result.json")).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(doc["scenario"], "demo");
        assert_eq!(doc["passed"], true);
        let csv = std::fs::read_to_string(dir.path().join("spectra.csv")).unwrap();
        assert!(csv.starts_with("index,re,im,residual"));
    }
}
