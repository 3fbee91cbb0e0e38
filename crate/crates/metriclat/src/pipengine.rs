//! Operator bookkeeping over a lattice of weighted spaces.
//!
//! An operator `A` acting between weighted spaces `H(X) -> H(Y)` is bounded
//! exactly when `Y^{1/2} A X^{-1/2}` is bounded on the flat space; the
//! collection of admissible pairs is the operator's profile. Diagonal
//! symbolic data makes the verdicts exact; dense data at one truncation only
//! ever reports the finite norm, never a claim of unboundedness.
//!
//! A symmetric form pair `(Q, M)` over the small space supports the
//! restriction construction: solve `Q v = lambda M v`, certify bounded
//! invertibility of `Q - lambda_probe M`, and obtain the unique self-adjoint
//! operator the form induces on the central space. All discrete adjoints
//! here are taken in the mass inner product (`H^t = M^{-1} H* M`), the
//! faithful finite-element avatar of the central-space adjoint.

use ndarray::prelude::*;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::LatticeGraph;
use crate::metric::{MetricKind, MetricOperator};
use crate::opcore::{
    eigh, ensure_same_dim, max_abs, op_norm, psd_power, sigma_min, CMatrix,
};
use crate::symbol::DiagSymbol;

/// Operator data for profiling: dense matrix or positive diagonal symbol
/// (the symbol stands for the moduli `|a_n|`).
#[derive(Debug, Clone)]
pub enum PipOperator {
    Dense(CMatrix),
    Diagonal(DiagSymbol),
}

/// A representative norm: finite value or exact unbounded flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(into = "BoundNormJson")]
pub enum BoundNorm {
    Bounded(f64),
    Unbounded,
}

#[derive(Serialize)]
struct BoundNormJson {
    bounded: bool,
    norm: Option<f64>,
}

impl From<BoundNorm> for BoundNormJson {
    fn from(b: BoundNorm) -> Self {
        match b {
            BoundNorm::Bounded(v) => BoundNormJson {
                bounded: true,
                norm: Some(v),
            },
            BoundNorm::Unbounded => BoundNormJson {
                bounded: false,
                norm: None,
            },
        }
    }
}

impl BoundNorm {
    pub fn is_bounded(&self) -> bool {
        matches!(self, BoundNorm::Bounded(_))
    }
}

/// Norm of the representative `H(X) -> H(Y)` of `A`, i.e.
/// `||Y^{1/2} A X^{-1/2}||`. Exact supremum for all-diagonal data; dense
/// data always yields the finite truncated norm.
pub fn representative_norm(
    a: &PipOperator,
    x: &MetricOperator,
    y: &MetricOperator,
) -> Result<BoundNorm> {
    ensure_same_dim(x.dim(), y.dim())?;
    match (a, x.kind(), y.kind()) {
        (PipOperator::Diagonal(sa), MetricKind::Diagonal(sx), MetricKind::Diagonal(sy)) => {
            // sup_n sqrt(y_n) |a_n| / sqrt(x_n), decided from the exponents
            let ratio = sy.mul(&sa.mul(sa)).div(sx);
            if ratio.is_unbounded() {
                Ok(BoundNorm::Unbounded)
            } else {
                Ok(BoundNorm::Bounded(
                    ratio.sup().unwrap_or(f64::INFINITY).sqrt(),
                ))
            }
        }
        _ => {
            let dim = x.dim();
            let am = match a {
                PipOperator::Dense(m) => {
                    ensure_same_dim(m.nrows(), dim)?;
                    m.clone()
                }
                PipOperator::Diagonal(s) => {
                    let vals = s.truncate(dim);
                    Array2::from_shape_fn((dim, dim), |(i, j)| {
                        if i == j {
                            C64::new(vals[i], 0.0)
                        } else {
                            C64::ZERO
                        }
                    })
                }
            };
            let yh = psd_power(&y.matrix(), 0.5)?;
            let xmh = psd_power(&x.matrix(), -0.5)?;
            Ok(BoundNorm::Bounded(op_norm(&yh.dot(&am).dot(&xmh))))
        }
    }
}

/// One admissibility verdict of a profile.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileEntry {
    pub x: usize,
    pub y: usize,
    pub x_label: String,
    pub y_label: String,
    pub bound: BoundNorm,
}

/// The admissible-pair bookkeeping of an operator over a lattice graph.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorProfile {
    pub entries: Vec<ProfileEntry>,
    /// Nodes with `(X, X)` admissible.
    pub s_set: Vec<usize>,
    /// Initial nodes: `X` admissible into some `Y`.
    pub d_set: Vec<usize>,
    /// Final nodes: some `X` admissible into `Y`.
    pub i_set: Vec<usize>,
}

fn reachability(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    // leq[i][j]: H(i) c H(j)
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(lo, hi) in edges {
        leq[lo][hi] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if leq[i][k] {
                for j in 0..n {
                    if leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
    }
    leq
}

/// Profiles `A` over every ordered node pair of the graph and verifies the
/// structural invariants (initial `d`-set, final `i`-set) before returning.
pub fn profile(a: &PipOperator, graph: &LatticeGraph) -> Result<OperatorProfile> {
    let n = graph.nodes.len();
    let mut entries = Vec::with_capacity(n * n);
    let mut bounded = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            let b = representative_norm(a, &graph.nodes[i].op, &graph.nodes[j].op)?;
            bounded[i][j] = b.is_bounded();
            entries.push(ProfileEntry {
                x: i,
                y: j,
                x_label: graph.nodes[i].label.to_string(),
                y_label: graph.nodes[j].label.to_string(),
                bound: b,
            });
        }
    }
    let s_set: Vec<usize> = (0..n).filter(|&i| bounded[i][i]).collect();
    let d_set: Vec<usize> = (0..n).filter(|&i| (0..n).any(|j| bounded[i][j])).collect();
    let i_set: Vec<usize> = (0..n).filter(|&j| (0..n).any(|i| bounded[i][j])).collect();

    // d is initial (downward closed in the space order), i is final
    let edge_pairs: Vec<(usize, usize)> = graph.edges.iter().map(|e| (e.lo, e.hi)).collect();
    let leq = reachability(n, &edge_pairs);
    for &r in &d_set {
        for rp in 0..n {
            if leq[rp][r] && !d_set.contains(&rp) {
                return Err(Error::PreconditionFailed(format!(
                    "d-set not initial: {} admissible but smaller {} is not",
                    graph.nodes[r].label, graph.nodes[rp].label
                )));
            }
        }
    }
    for &u in &i_set {
        for up in 0..n {
            if leq[u][up] && !i_set.contains(&up) {
                return Err(Error::PreconditionFailed(format!(
                    "i-set not final: {} reachable from admissible {} but missing",
                    graph.nodes[up].label, graph.nodes[u].label
                )));
            }
        }
    }
    Ok(OperatorProfile {
        entries,
        s_set,
        d_set,
        i_set,
    })
}

impl OperatorProfile {
    /// JSON map from `"X_label|Y_label"` to `{bounded, norm}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for e in &self.entries {
            let key = format!("{}|{}", e.x_label, e.y_label);
            map.insert(key, serde_json::to_value(e.bound).unwrap_or_default());
        }
        serde_json::Value::Object(map)
    }
}

/// Discretized sesquilinear form over the small space: form matrix `Q` and
/// positive mass matrix `M`.
#[derive(Debug, Clone)]
pub struct FormPair {
    pub q: CMatrix,
    pub m: CMatrix,
    /// Human-readable discretization provenance.
    pub mesh: String,
}

/// Bounded-invertibility certificate at the probe point.
#[derive(Debug, Clone, Serialize)]
pub struct InvertibilityCertificate {
    pub lambda_probe: f64,
    pub min_singular: f64,
    pub threshold: f64,
    pub holds: bool,
}

/// Self-adjoint restriction extracted from a symmetric form pair.
#[derive(Debug, Clone)]
pub struct KlmnRestriction {
    /// Ascending real generalized eigenvalues of `Q v = lambda M v`.
    pub eigenvalues: Vec<f64>,
    /// M-orthonormal eigenvectors as columns.
    pub vectors: CMatrix,
    /// `M^{-1/2}`: the congruence into the mass-orthonormal frame, shared
    /// with callers that transport further operators into that frame.
    pub mass_root_inverse: CMatrix,
    pub certificate: InvertibilityCertificate,
}

/// Solves the generalized problem `Q v = lambda M v` for a Hermitian form
/// and positive mass, and certifies invertibility of `Q - lambda_probe M`.
/// `lambda_probe = None` defaults to one below the smallest eigenvalue.
pub fn klmn_restrict(fp: &FormPair, lambda_probe: Option<f64>) -> Result<KlmnRestriction> {
    ensure_same_dim(fp.q.nrows(), fp.m.nrows())?;
    let scale = max_abs(&fp.q).max(1e-300);
    let dev = crate::opcore::hermitian_deviation(&fp.q) / scale;
    if dev > crate::opcore::HERM_TOL {
        return Err(Error::NotSymmetricForm {
            residual: dev,
            tolerance: crate::opcore::HERM_TOL,
        });
    }
    let m_mh = psd_power(&fp.m, -0.5)?;
    let k = m_mh.dot(&fp.q).dot(&m_mh);
    let eig = eigh(&k)?;
    let vectors = m_mh.dot(&eig.vectors);
    let eigenvalues = eig.eigenvalues;

    let probe = lambda_probe.unwrap_or_else(|| eigenvalues.first().copied().unwrap_or(0.0) - 1.0);
    let shifted = &fp.q - &fp.m.mapv(|z| z * C64::new(probe, 0.0));
    let min_singular = sigma_min(&shifted);
    let threshold = 1e-8 * op_norm(&fp.q);
    let holds = min_singular > threshold;
    if !holds {
        return Err(Error::ProbeInSpectrum {
            probe,
            min_singular,
            threshold,
        });
    }
    Ok(KlmnRestriction {
        eigenvalues,
        vectors,
        mass_root_inverse: m_mh,
        certificate: InvertibilityCertificate {
            lambda_probe: probe,
            min_singular,
            threshold,
            holds,
        },
    })
}

/// P1 finite-element form pair for the Dirichlet Laplacian on
/// `[0, length]`: `n_elements` elements, unknowns at the interior nodes.
/// On `[0, pi]` the continuum eigenvalues are `1, 4, 9, ...`.
pub fn dirichlet_laplacian_form(n_elements: usize, length: f64) -> Result<FormPair> {
    if n_elements < 2 {
        return Err(Error::GridTooCoarse {
            needed: 2,
            got: n_elements,
        });
    }
    let h = length / n_elements as f64;
    let n = n_elements - 1;
    let mut q = Array2::<C64>::zeros((n, n));
    let mut m = Array2::<C64>::zeros((n, n));
    for i in 0..n {
        q[[i, i]] = C64::new(2.0 / h, 0.0);
        m[[i, i]] = C64::new(4.0 * h / 6.0, 0.0);
        if i + 1 < n {
            q[[i, i + 1]] = C64::new(-1.0 / h, 0.0);
            q[[i + 1, i]] = C64::new(-1.0 / h, 0.0);
            m[[i, i + 1]] = C64::new(h / 6.0, 0.0);
            m[[i + 1, i]] = C64::new(h / 6.0, 0.0);
        }
    }
    Ok(FormPair {
        q,
        m,
        mesh: format!("P1 uniform, {n_elements} elements on [0, {length}], Dirichlet"),
    })
}

/// Semi-similarity data: the bounded conjugate across two metrics.
#[derive(Debug, Clone)]
pub struct SemiSimilarity {
    /// `B = G2^{1/2} A G1^{-1/2}`.
    pub b: CMatrix,
    /// `||B G1^{1/2} - G2^{1/2} A||`, relative: the defining identity of the
    /// intertwining couple `(T, S) = (G1^{1/2}, G2^{1/2})`.
    pub residual: f64,
}

/// Builds the semi-similar conjugate of `A : H(G1) -> H(G2)`.
pub fn semi_similarity_check(
    a: &CMatrix,
    g1: &MetricOperator,
    g2: &MetricOperator,
) -> Result<SemiSimilarity> {
    ensure_same_dim(g1.dim(), a.nrows())?;
    ensure_same_dim(g2.dim(), a.nrows())?;
    let g1h = g1.power(0.5)?.matrix();
    let g1mh = g1.power(-0.5)?.matrix();
    let g2h = g2.power(0.5)?.matrix();
    let b = g2h.dot(a).dot(&g1mh);
    let lhs = b.dot(&g1h);
    let rhs = g2h.dot(a);
    let scale = op_norm(&rhs).max(1e-300);
    Ok(SemiSimilarity {
        b,
        residual: op_norm(&(&lhs - &rhs)) / scale,
    })
}
