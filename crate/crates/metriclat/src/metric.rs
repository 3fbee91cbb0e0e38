//! Metric operators and the weighted spaces they induce.
//!
//! A metric operator is a strictly positive Hermitian operator `G`. Dense
//! instances are validated matrices; diagonal-symbolic instances carry a
//! [`DiagSymbol`] together with an explicit truncation dimension, so that
//! "unbounded" remains a property of the symbol and never of a finite slice.
//!
//! `H(G)` denotes the space normed by `||G^{1/2} .||`; [`WeightedSpace`]
//! caches the half power. The regularization `R_G = I + G` always has an
//! inverse of norm at most one, which is what makes it the safe canonical
//! norm carrier on `D(G^{1/2})`.

use ndarray::prelude::*;
use num_complex::Complex64 as C64;
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::opcore::{
    self, eigh, ensure_same_dim, inner, psd_power, CMatrix, CVector, PD_TOL,
};
use crate::symbol::{DiagSymbol, GrowthSymbol};

/// Dense or diagonal-symbolic representation of a metric operator.
#[derive(Debug, Clone)]
pub enum MetricKind {
    Dense(CMatrix),
    Diagonal(DiagSymbol),
}

/// A validated strictly positive Hermitian operator.
#[derive(Debug, Clone)]
pub struct MetricOperator {
    kind: MetricKind,
    dim: usize,
}

impl MetricOperator {
    /// Validates a dense matrix as a metric operator.
    ///
    /// Rejects non-Hermitian input and anything whose smallest eigenvalue
    /// does not clear the strict-positivity floor `PD_TOL * ||G||`.
    pub fn dense(m: CMatrix) -> Result<Self> {
        let eig = eigh(&m)?;
        let scale = eig.max_eigenvalue().abs().max(1e-300);
        let floor = PD_TOL * scale;
        if eig.min_eigenvalue() <= floor {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: eig.min_eigenvalue(),
                threshold: floor,
            });
        }
        let dim = m.nrows();
        Ok(Self {
            kind: MetricKind::Dense(m),
            dim,
        })
    }

    /// Wraps a diagonal symbol at a fixed truncation dimension.
    pub fn diagonal(symbol: DiagSymbol, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ParameterDomain(
                "truncation dimension must be positive".into(),
            ));
        }
        // positivity is structural: every term has c > 0
        Ok(Self {
            kind: MetricKind::Diagonal(symbol),
            dim,
        })
    }

    /// Diagonal metric from a single growth term.
    pub fn from_growth(symbol: GrowthSymbol, dim: usize) -> Result<Self> {
        Self::diagonal(DiagSymbol::from_term(symbol), dim)
    }

    /// Wraps a matrix whose Hermiticity and strict positivity the caller has
    /// already certified (e.g. through a generalized eigenvalue bound),
    /// skipping the validating eigendecomposition.
    pub(crate) fn dense_unchecked(m: CMatrix) -> Self {
        let dim = m.nrows();
        Self {
            kind: MetricKind::Dense(m),
            dim,
        }
    }

    /// Identity metric on `dim` coordinates, kept symbolic.
    pub fn identity_symbolic(dim: usize) -> Self {
        Self {
            kind: MetricKind::Diagonal(DiagSymbol::one()),
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &MetricKind {
        &self.kind
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.kind, MetricKind::Diagonal(_))
    }

    pub fn symbol(&self) -> Option<&DiagSymbol> {
        match &self.kind {
            MetricKind::Diagonal(s) => Some(s),
            MetricKind::Dense(_) => None,
        }
    }

    /// Dense matrix of this operator (diagonal symbols are materialized at
    /// their truncation dimension).
    pub fn matrix(&self) -> CMatrix {
        match &self.kind {
            MetricKind::Dense(m) => m.clone(),
            MetricKind::Diagonal(s) => {
                let vals = s.truncate(self.dim);
                Array2::from_shape_fn((self.dim, self.dim), |(i, j)| {
                    if i == j {
                        C64::new(vals[i], 0.0)
                    } else {
                        C64::ZERO
                    }
                })
            }
        }
    }

    /// Apply the operator to a vector.
    pub fn apply(&self, x: &ArrayView1<C64>) -> Result<CVector> {
        ensure_same_dim(self.dim, x.len())?;
        match &self.kind {
            MetricKind::Dense(m) => Ok(m.dot(x)),
            MetricKind::Diagonal(s) => {
                let mut out = x.to_owned();
                for (n, v) in out.iter_mut().enumerate() {
                    *v *= C64::new(s.eval(n as u64), 0.0);
                }
                Ok(out)
            }
        }
    }

    /// `G^alpha`: functional calculus densely, exponent arithmetic
    /// symbolically.
    pub fn power(&self, alpha: f64) -> Result<Self> {
        match &self.kind {
            MetricKind::Dense(m) => {
                let p = psd_power(m, alpha)?;
                Ok(Self {
                    kind: MetricKind::Dense(p),
                    dim: self.dim,
                })
            }
            MetricKind::Diagonal(s) => Ok(Self {
                kind: MetricKind::Diagonal(s.pow(alpha)?),
                dim: self.dim,
            }),
        }
    }

    /// `G^{-1}`, itself a metric operator.
    pub fn inverse(&self) -> Result<Self> {
        match &self.kind {
            MetricKind::Dense(_) => self.power(-1.0),
            MetricKind::Diagonal(s) => Ok(Self {
                kind: MetricKind::Diagonal(s.inv()),
                dim: self.dim,
            }),
        }
    }

    /// Dense half power `G^{1/2}`.
    pub fn half_matrix(&self) -> Result<CMatrix> {
        match &self.kind {
            MetricKind::Dense(m) => psd_power(m, 0.5),
            MetricKind::Diagonal(_) => Ok(self.power(0.5)?.matrix()),
        }
    }

    /// Smallest and largest eigenvalues over the (truncated) operator.
    pub fn eigen_range(&self) -> Result<(f64, f64)> {
        match &self.kind {
            MetricKind::Dense(m) => {
                let e = eigh(m)?;
                Ok((e.min_eigenvalue(), e.max_eigenvalue()))
            }
            MetricKind::Diagonal(s) => {
                let vals = s.truncate(self.dim);
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for v in vals {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                Ok((lo, hi))
            }
        }
    }

    /// Whether the symbol (not the truncation) is unbounded; dense operators
    /// are always bounded.
    pub fn is_symbolically_unbounded(&self) -> bool {
        match &self.kind {
            MetricKind::Dense(_) => false,
            MetricKind::Diagonal(s) => s.is_unbounded(),
        }
    }
}

impl fmt::Display for MetricOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MetricKind::Dense(_) => write!(f, "dense[{}]", self.dim),
            MetricKind::Diagonal(s) => write!(f, "diag[{}]({})", self.dim, s),
        }
    }
}

/// Validates a dense matrix as a metric operator (reported min eigenvalue on
/// failure).
pub fn make_metric(m: CMatrix) -> Result<MetricOperator> {
    MetricOperator::dense(m)
}

/// Weighted inner product `<G xi, eta>`.
///
/// With `G = I` this is bit-for-bit the ambient inner product; in general it
/// agrees with `<G^{1/2} xi, G^{1/2} eta>` to roundoff.
pub fn g_inner(g: &MetricOperator, xi: &ArrayView1<C64>, eta: &ArrayView1<C64>) -> Result<C64> {
    ensure_same_dim(g.dim(), xi.len())?;
    ensure_same_dim(g.dim(), eta.len())?;
    let gxi = g.apply(xi)?;
    Ok(inner(&gxi.view(), eta))
}

/// Weighted norm `||G^{1/2} xi|| = sqrt(<G xi, xi>)`.
pub fn g_norm(g: &MetricOperator, xi: &ArrayView1<C64>) -> Result<f64> {
    let v = g_inner(g, xi, xi)?;
    Ok(v.re.max(0.0).sqrt())
}

/// The regularization `R_G = I + G`; its inverse has norm at most one.
pub fn r_g(g: &MetricOperator) -> Result<MetricOperator> {
    match g.kind() {
        MetricKind::Dense(m) => {
            let rg = m + &opcore::identity(g.dim());
            MetricOperator::dense(rg)
        }
        MetricKind::Diagonal(s) => {
            MetricOperator::diagonal(DiagSymbol::one().add(s), g.dim())
        }
    }
}

/// `G^alpha` as a standalone operation.
pub fn metric_power(g: &MetricOperator, alpha: f64) -> Result<MetricOperator> {
    g.power(alpha)
}

/// A metric together with its cached half power: the Hilbert space `H(G)`.
#[derive(Debug, Clone)]
pub struct WeightedSpace {
    metric: MetricOperator,
    half: CMatrix,
}

impl WeightedSpace {
    pub fn new(metric: MetricOperator) -> Result<Self> {
        let half = metric.half_matrix()?;
        Ok(Self { metric, half })
    }

    pub fn metric(&self) -> &MetricOperator {
        &self.metric
    }

    pub fn half(&self) -> &CMatrix {
        &self.half
    }

    /// `<xi, eta>_G` computed through the half power route
    /// `<G^{1/2} xi, G^{1/2} eta>`.
    pub fn inner(&self, xi: &ArrayView1<C64>, eta: &ArrayView1<C64>) -> Result<C64> {
        ensure_same_dim(self.metric.dim(), xi.len())?;
        ensure_same_dim(self.metric.dim(), eta.len())?;
        let hx = self.half.dot(xi);
        let he = self.half.dot(eta);
        Ok(inner(&hx.view(), &he.view()))
    }

    pub fn norm(&self, xi: &ArrayView1<C64>) -> Result<f64> {
        let v = self.inner(xi, xi)?;
        Ok(v.re.max(0.0).sqrt())
    }
}

// ---------------------------------------------------------------------------
// Matrix text format: one header line "n", then n rows of n complex entries
// "a+bi" separated by whitespace.
// ---------------------------------------------------------------------------

fn format_complex(z: C64) -> String {
    if z.im >= 0.0 || z.im.is_nan() {
        format!("{:?}+{:?}i", z.re, z.im)
    } else {
        format!("{:?}-{:?}i", z.re, -z.im)
    }
}

/// Writes a matrix in the plain-text interchange format.
pub fn write_matrix<W: Write>(w: &mut W, m: &CMatrix) -> Result<()> {
    let n = opcore::ensure_square(m)?;
    writeln!(w, "{n}")?;
    for row in m.rows() {
        let line: Vec<String> = row.iter().map(|&z| format_complex(z)).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Reads a matrix from the plain-text interchange format.
pub fn read_matrix<R: Read>(r: R) -> Result<CMatrix> {
    let mut lines = BufReader::new(r).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix file".into()))??;
    let n: usize = header
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("bad dimension header {header:?}: {e}")))?;
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing row {i}")))??;
        let entries: Vec<&str> = line.split_whitespace().collect();
        if entries.len() != n {
            return Err(Error::Parse(format!(
                "row {i} has {} entries, expected {n}",
                entries.len()
            )));
        }
        for (j, tok) in entries.iter().enumerate() {
            let z = C64::from_str(tok)
                .map_err(|e| Error::Parse(format!("bad entry {tok:?} at ({i},{j}): {e:?}")))?;
            m[[i, j]] = z;
        }
    }
    Ok(m)
}

/// Convenience wrapper reading from a path.
pub fn read_matrix_file(path: &Path) -> Result<CMatrix> {
    read_matrix(std::fs::File::open(path)?)
}

/// Convenience wrapper writing to a path.
pub fn write_matrix_file(path: &Path, m: &CMatrix) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    write_matrix(&mut f, m)
}

/// Extends `write_matrix` to adjointness-preserving storage of operators
/// produced elsewhere in the crate.
pub fn matrix_is_hermitian(m: &CMatrix, tol: f64) -> bool {
    let scale = opcore::max_abs(m).max(1e-300);
    opcore::hermitian_deviation(m) <= tol * scale
}

#[allow(unused_imports)]
pub(crate) use opcore::identity;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcore::adjoint;
    use crate::sampling;
    use approx::assert_relative_eq;
    use rand::SeedableRng;

    fn rdiag(vals: &[f64]) -> CMatrix {
        let n = vals.len();
        Array2::from_shape_fn((n, n), |(i, j)| {
            if i == j {
                C64::new(vals[i], 0.0)
            } else {
                C64::ZERO
            }
        })
    }

    #[test]
    fn make_metric_accepts_identity_rejects_degenerate() {
        assert!(make_metric(opcore::identity(3)).is_ok());
        match make_metric(rdiag(&[1.0, 0.0])) {
            Err(Error::NotPositiveDefinite { min_eigenvalue, .. }) => {
                assert!(min_eigenvalue.abs() < 1e-12);
            }
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn make_metric_accepts_tt_star() {
        let mut rng = sampling::Seeded::seed_from_u64(4);
        let t = sampling::random_conditioned(6, 30.0, &mut rng);
        let g = t.dot(&adjoint(&t));
        assert!(make_metric(g).is_ok());
    }

    #[test]
    fn g_inner_with_identity_is_ambient_bitwise() {
        let mut rng = sampling::Seeded::seed_from_u64(9);
        let g = make_metric(opcore::identity(5)).unwrap();
        for _ in 0..10 {
            let x = sampling::random_vector(5, &mut rng);
            let y = sampling::random_vector(5, &mut rng);
            let lhs = g_inner(&g, &x.view(), &y.view()).unwrap();
            let rhs = inner(&x.view(), &y.view());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn g_inner_arithmetic_and_symmetry() {
        let g = make_metric(rdiag(&[2.0, 3.0])).unwrap();
        let ones = Array1::from_vec(vec![C64::new(1.0, 0.0); 2]);
        let v = g_inner(&g, &ones.view(), &ones.view()).unwrap();
        assert_relative_eq!(v.re, 5.0, max_relative = 1e-14);
        assert_relative_eq!(v.im, 0.0, epsilon = 1e-14);

        let mut rng = sampling::Seeded::seed_from_u64(12);
        let gm = make_metric(sampling::random_spd(4, &mut rng)).unwrap();
        let x = sampling::random_vector(4, &mut rng);
        let y = sampling::random_vector(4, &mut rng);
        let xy = g_inner(&gm, &x.view(), &y.view()).unwrap();
        let yx = g_inner(&gm, &y.view(), &x.view()).unwrap();
        assert_relative_eq!(xy.re, yx.conj().re, max_relative = 1e-11);
        assert_relative_eq!(xy.im, yx.conj().im, epsilon = 1e-11);
    }

    #[test]
    fn g_inner_two_route_agreement() {
        let mut rng = sampling::Seeded::seed_from_u64(21);
        let gm = make_metric(sampling::random_spd(6, &mut rng)).unwrap();
        let ws = WeightedSpace::new(gm.clone()).unwrap();
        for _ in 0..20 {
            let x = sampling::random_vector(6, &mut rng);
            let y = sampling::random_vector(6, &mut rng);
            let direct = g_inner(&gm, &x.view(), &y.view()).unwrap();
            let half = ws.inner(&x.view(), &y.view()).unwrap();
            let scale = direct.norm().max(1.0);
            assert!((direct - half).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn r_g_dense_and_symbolic() {
        let g = make_metric(rdiag(&[3.0])).unwrap();
        let rg = r_g(&g).unwrap();
        assert_relative_eq!(rg.matrix()[[0, 0]].re, 4.0);

        let sym = MetricOperator::from_growth(GrowthSymbol::new(2.0, 1.0, 0.5).unwrap(), 8).unwrap();
        let rg = r_g(&sym).unwrap();
        let s = rg.symbol().unwrap();
        for n in 0..8u64 {
            let expect = 1.0 + 2.0 * ((1 + n) as f64) * (0.5 * n as f64).exp();
            assert_relative_eq!(s.eval(n), expect, max_relative = 1e-12);
        }

        // min eig(R_G) = 1 + min eig(G)
        let mut rng = sampling::Seeded::seed_from_u64(31);
        let gd = make_metric(sampling::random_spd(7, &mut rng)).unwrap();
        let (lo_g, _) = gd.eigen_range().unwrap();
        let (lo_rg, _) = r_g(&gd).unwrap().eigen_range().unwrap();
        assert_relative_eq!(lo_rg, 1.0 + lo_g, max_relative = 1e-12);
        // hence the inverse of R_G is a contraction
        let inv = r_g(&gd).unwrap().inverse().unwrap();
        assert!(opcore::op_norm(&inv.matrix()) <= 1.0 + 1e-12);
    }

    #[test]
    fn metric_power_dense_and_symbolic() {
        let g = make_metric(rdiag(&[2.0, 4.0])).unwrap();
        let gm1 = metric_power(&g, -1.0).unwrap();
        assert_relative_eq!(gm1.matrix()[[0, 0]].re, 0.5, max_relative = 1e-13);
        assert_relative_eq!(gm1.matrix()[[1, 1]].re, 0.25, max_relative = 1e-13);

        let sym = MetricOperator::from_growth(GrowthSymbol::new(1.0, 2.0, 0.0).unwrap(), 4).unwrap();
        let half = metric_power(&sym, 0.5).unwrap();
        assert_eq!(
            half.symbol().unwrap().as_single_term().unwrap(),
            GrowthSymbol::new(1.0, 1.0, 0.0).unwrap()
        );

        // G^{-1/2} squared times G is the identity
        let mut rng = sampling::Seeded::seed_from_u64(44);
        let gd = make_metric(sampling::random_spd(6, &mut rng)).unwrap();
        let gmh = metric_power(&gd, -0.5).unwrap().matrix();
        let prod = gmh.dot(&gmh).dot(&gd.matrix());
        assert!(opcore::rel_residual(&prod, &opcore::identity(6), 1.0) <= 1e-10);
    }

    #[test]
    fn diagonal_and_dense_routes_agree() {
        let sym = MetricOperator::from_growth(GrowthSymbol::new(1.5, 1.0, -0.2).unwrap(), 16).unwrap();
        let dense = make_metric(sym.matrix()).unwrap();
        let mut rng = sampling::Seeded::seed_from_u64(5);
        let x = sampling::random_vector(16, &mut rng);
        let y = sampling::random_vector(16, &mut rng);
        let a = g_inner(&sym, &x.view(), &y.view()).unwrap();
        let b = g_inner(&dense, &x.view(), &y.view()).unwrap();
        assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
        // powers agree as well
        let ps = sym.power(0.5).unwrap().matrix();
        let pd = dense.power(0.5).unwrap().matrix();
        assert!(opcore::rel_residual(&ps, &pd, opcore::op_norm(&pd)) <= 1e-12);
    }

    #[test]
    fn matrix_io_roundtrip() {
        let mut rng = sampling::Seeded::seed_from_u64(77);
        let m = sampling::random_complex(5, &mut rng);
        let mut buf = Vec::new();
        write_matrix(&mut buf, &m).unwrap();
        let back = read_matrix(buf.as_slice()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn matrix_io_rejects_garbage() {
        assert!(read_matrix("".as_bytes()).is_err());
        assert!(read_matrix("2\n1+0i 2+0i\n".as_bytes()).is_err());
        assert!(read_matrix("1\nnot-a-number\n".as_bytes()).is_err());
    }
}
