//! The lattice of Hilbert spaces generated by metric operators.
//!
//! Wedge is the form sum, `X ^ Y = X + Y`, carrying the projective norm
//! `||xi||_X^2 + ||xi||_Y^2`; vee is the parallel sum,
//! `X v Y = (X^{-1} + Y^{-1})^{-1}`, carrying the inductive norm
//! `inf_{xi = eta + zeta} (||eta||_X^2 + ||zeta||_Y^2)`. The order
//! `X <= Y` means `H(X) c H(Y)`, decided exactly for diagonal symbols and
//! quantified by the embedding constant `gamma = sup` of the quadratic-form
//! ratio otherwise.
//!
//! In finite dimension every two spaces coincide as sets, so strict inclusion
//! is reported operationally: embedding constants along the Hasse edges stay
//! stable across a truncation ladder while the constants between
//! noncomparable nodes blow up.

use ndarray::prelude::*;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{g_norm, MetricKind, MetricOperator};
use crate::opcore::{self, eigh, ensure_same_dim, psd_power, CMatrix, CVector};
use crate::symbol::{ratio_sup, DiagSymbol};

/// Expression labels over the atoms `I`, `G`, `G^-1` (and powers) with the
/// connectives wedge and vee. Normal form: connectives flattened, operands
/// sorted `I < G < G^-1 < G^alpha < composites`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum LabelExpr {
    I,
    G,
    GInv,
    GPow(f64),
    Wedge(Vec<LabelExpr>),
    Vee(Vec<LabelExpr>),
}

impl LabelExpr {
    fn rank(&self) -> u8 {
        match self {
            LabelExpr::I => 0,
            LabelExpr::G => 1,
            LabelExpr::GInv => 2,
            LabelExpr::GPow(_) => 3,
            LabelExpr::Wedge(_) => 4,
            LabelExpr::Vee(_) => 5,
        }
    }

    fn sort_key(&self) -> (u8, String) {
        (self.rank(), self.to_string())
    }

    /// Flattens nested connectives and sorts operands.
    pub fn normalize(self) -> LabelExpr {
        match self {
            LabelExpr::Wedge(xs) => {
                let mut flat = Vec::new();
                for x in xs {
                    match x.normalize() {
                        LabelExpr::Wedge(nested) => flat.extend(nested),
                        other => flat.push(other),
                    }
                }
                flat.sort_by_key(|a| a.sort_key());
                LabelExpr::Wedge(flat)
            }
            LabelExpr::Vee(xs) => {
                let mut flat = Vec::new();
                for x in xs {
                    match x.normalize() {
                        LabelExpr::Vee(nested) => flat.extend(nested),
                        other => flat.push(other),
                    }
                }
                flat.sort_by_key(|a| a.sort_key());
                LabelExpr::Vee(flat)
            }
            atom => atom,
        }
    }

    /// Dual label: atoms inverted, wedge and vee swapped.
    pub fn dual(&self) -> LabelExpr {
        match self {
            LabelExpr::I => LabelExpr::I,
            LabelExpr::G => LabelExpr::GInv,
            LabelExpr::GInv => LabelExpr::G,
            LabelExpr::GPow(a) => LabelExpr::GPow(-a),
            LabelExpr::Wedge(xs) => LabelExpr::Vee(xs.iter().map(|x| x.dual()).collect()),
            LabelExpr::Vee(xs) => LabelExpr::Wedge(xs.iter().map(|x| x.dual()).collect()),
        }
        .normalize()
    }
}

impl std::fmt::Display for LabelExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fn atom(x: &LabelExpr) -> String {
            match x {
                LabelExpr::I => "I".into(),
                LabelExpr::G => "G".into(),
                LabelExpr::GInv => "G^-1".into(),
                LabelExpr::GPow(a) => format!("G^{a}"),
                composite => format!("({composite})"),
            }
        }
        match self {
            LabelExpr::Wedge(xs) => {
                let parts: Vec<String> = xs.iter().map(atom).collect();
                write!(f, "{}", parts.join("∧"))
            }
            LabelExpr::Vee(xs) => {
                let parts: Vec<String> = xs.iter().map(atom).collect();
                write!(f, "{}", parts.join("∨"))
            }
            other => {
                let s = atom(other);
                write!(f, "{}", s.trim_matches(|c| c == '(' || c == ')'))
            }
        }
    }
}

/// A labeled space in the lattice together with its concrete metric.
#[derive(Debug, Clone)]
pub struct LatticeNode {
    pub label: LabelExpr,
    pub op: MetricOperator,
}

/// Hasse edge `H(lo) c H(hi)` with its embedding constant.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeEdge {
    pub lo: usize,
    pub hi: usize,
    pub gamma: f64,
}

/// Hasse diagram of lattice nodes.
#[derive(Debug, Clone)]
pub struct LatticeGraph {
    pub nodes: Vec<LatticeNode>,
    pub edges: Vec<LatticeEdge>,
}

/// Form sum `X ^ Y = X + Y`.
pub fn wedge(x: &MetricOperator, y: &MetricOperator) -> Result<MetricOperator> {
    ensure_same_dim(x.dim(), y.dim())?;
    match (x.kind(), y.kind()) {
        (MetricKind::Diagonal(a), MetricKind::Diagonal(b)) => {
            MetricOperator::diagonal(a.add(b), x.dim())
        }
        _ => MetricOperator::dense(x.matrix() + y.matrix()),
    }
}

/// Parallel sum `X v Y = (X^{-1} + Y^{-1})^{-1}`.
pub fn vee(x: &MetricOperator, y: &MetricOperator) -> Result<MetricOperator> {
    ensure_same_dim(x.dim(), y.dim())?;
    match (x.kind(), y.kind()) {
        (MetricKind::Diagonal(a), MetricKind::Diagonal(b)) => {
            MetricOperator::diagonal(a.inv().add(&b.inv()).inv(), x.dim())
        }
        _ => {
            let xinv = psd_power(&x.matrix(), -1.0)?;
            let yinv = psd_power(&y.matrix(), -1.0)?;
            let sum = xinv + yinv;
            MetricOperator::dense(psd_power(&sum, -1.0)?)
        }
    }
}

/// Projective norm `sqrt(||xi||_X^2 + ||xi||_Y^2)`; coincides with the
/// `X ^ Y` norm.
pub fn projective_norm(
    x: &MetricOperator,
    y: &MetricOperator,
    xi: &ArrayView1<C64>,
) -> Result<f64> {
    ensure_same_dim(x.dim(), y.dim())?;
    let nx = g_norm(x, xi)?;
    let ny = g_norm(y, xi)?;
    Ok((nx * nx + ny * ny).sqrt())
}

/// Inductive norm with its attaining decomposition.
#[derive(Debug, Clone)]
pub struct InductiveSplit {
    pub norm: f64,
    /// The `X`-component of the minimizing split `xi = eta + zeta`.
    pub eta: CVector,
    /// The `Y`-component.
    pub zeta: CVector,
}

/// Inductive norm `inf_{xi = eta + zeta} sqrt(||eta||_X^2 + ||zeta||_Y^2)`.
///
/// The infimum is attained at `eta = (X+Y)^{-1} Y xi` and its value is the
/// `X v Y` quadratic form of `xi`.
pub fn inductive_norm(
    x: &MetricOperator,
    y: &MetricOperator,
    xi: &ArrayView1<C64>,
) -> Result<InductiveSplit> {
    ensure_same_dim(x.dim(), y.dim())?;
    ensure_same_dim(x.dim(), xi.len())?;
    let v = vee(x, y)?;
    let quad = crate::metric::g_inner(&v, xi, xi)?;
    let norm = quad.re.max(0.0).sqrt();
    // minimizing split via (X + Y) eta = Y xi
    let w = wedge(x, y)?;
    let yxi = y.apply(xi)?;
    let eta = solve_hermitian(&w.matrix(), &yxi)?;
    let zeta = xi.to_owned() - &eta;
    Ok(InductiveSplit { norm, eta, zeta })
}

fn solve_hermitian(a: &CMatrix, b: &CVector) -> Result<CVector> {
    use ndarray_linalg::Solve;
    Ok(a.solve(b)?)
}

/// Outcome of an order decision `X <= Y`, i.e. `H(X) c H(Y)`.
#[derive(Debug, Clone, Serialize)]
pub struct OrderReport {
    pub holds: bool,
    /// Embedding constant: supremum of the quadratic-form ratio `Y/X`.
    /// `None` encodes the unbounded flag.
    pub gamma: Option<f64>,
}

/// Decides `H(X) c H(Y)`.
///
/// Diagonal symbols are decided exactly from their exponents (regardless of
/// truncation); dense operators always embed at finite dimension and get the
/// quantitative constant `gamma = lambda_max(X^{-1/2} Y X^{-1/2})`.
pub fn order_leq(x: &MetricOperator, y: &MetricOperator) -> Result<OrderReport> {
    match (x.kind(), y.kind()) {
        (MetricKind::Diagonal(a), MetricKind::Diagonal(b)) => {
            let (bounded, sup) = ratio_sup(b, a);
            Ok(OrderReport {
                holds: bounded,
                gamma: sup,
            })
        }
        _ => {
            ensure_same_dim(x.dim(), y.dim())?;
            let xmh = psd_power(&x.matrix(), -0.5)?;
            let m = xmh.dot(&y.matrix()).dot(&xmh);
            let eig = eigh(&m)?;
            Ok(OrderReport {
                holds: true,
                gamma: Some(eig.max_eigenvalue()),
            })
        }
    }
}

/// Node of the continuous scale `H(G^alpha)`.
pub fn scale_node(g: &MetricOperator, alpha: f64) -> Result<LatticeNode> {
    let label = if alpha == 0.0 {
        LabelExpr::I
    } else if alpha == 1.0 {
        LabelExpr::G
    } else if alpha == -1.0 {
        LabelExpr::GInv
    } else {
        LabelExpr::GPow(alpha)
    };
    let op = g.power(alpha)?;
    Ok(LatticeNode { label, op })
}

fn identity_like(g: &MetricOperator) -> MetricOperator {
    if g.is_diagonal() {
        MetricOperator::identity_symbolic(g.dim())
    } else {
        MetricOperator::dense(opcore::identity(g.dim())).expect("identity is a metric")
    }
}

/// Indices of the nine canonical nodes produced by [`generate_single_g`].
pub mod single_g {
    pub const G_WEDGE_GINV: usize = 0;
    pub const I_WEDGE_G: usize = 1;
    pub const I_WEDGE_GINV: usize = 2;
    pub const G: usize = 3;
    pub const I: usize = 4;
    pub const GINV: usize = 5;
    pub const I_VEE_G: usize = 6;
    pub const I_VEE_GINV: usize = 7;
    pub const G_VEE_GINV: usize = 8;
}

/// The nine-node lattice generated by a single metric operator, with the
/// twelve Hasse edges and their embedding constants.
pub fn generate_single_g(g: &MetricOperator) -> Result<LatticeGraph> {
    let eye = identity_like(g);
    let ginv = g.inverse()?;

    let mk = |l: LabelExpr, op: MetricOperator| LatticeNode {
        label: l.normalize(),
        op,
    };
    use LabelExpr::{Vee as V, Wedge as W, G as Ga, GInv as Gi, I as Id};
    let nodes = vec![
        mk(W(vec![Ga, Gi]), wedge(g, &ginv)?),
        mk(W(vec![Id, Ga]), wedge(&eye, g)?),
        mk(W(vec![Id, Gi]), wedge(&eye, &ginv)?),
        mk(Ga, g.clone()),
        mk(Id, eye.clone()),
        mk(Gi, ginv.clone()),
        mk(V(vec![Id, Ga]), vee(&eye, g)?),
        mk(V(vec![Id, Gi]), vee(&eye, &ginv)?),
        mk(V(vec![Ga, Gi]), vee(g, &ginv)?),
    ];

    let hasse: [(usize, usize); 12] = [
        (single_g::G_WEDGE_GINV, single_g::I_WEDGE_G),
        (single_g::G_WEDGE_GINV, single_g::I_WEDGE_GINV),
        (single_g::I_WEDGE_G, single_g::G),
        (single_g::I_WEDGE_G, single_g::I),
        (single_g::I_WEDGE_GINV, single_g::I),
        (single_g::I_WEDGE_GINV, single_g::GINV),
        (single_g::G, single_g::I_VEE_G),
        (single_g::I, single_g::I_VEE_G),
        (single_g::I, single_g::I_VEE_GINV),
        (single_g::GINV, single_g::I_VEE_GINV),
        (single_g::I_VEE_G, single_g::G_VEE_GINV),
        (single_g::I_VEE_GINV, single_g::G_VEE_GINV),
    ];

    let mut edges = Vec::with_capacity(12);
    for (lo, hi) in hasse {
        let rep = order_leq(&nodes[lo].op, &nodes[hi].op)?;
        if !rep.holds {
            return Err(Error::PreconditionFailed(format!(
                "Hasse edge {} -> {} failed its order decision",
                nodes[lo].label, nodes[hi].label
            )));
        }
        edges.push(LatticeEdge {
            lo,
            hi,
            gamma: rep.gamma.unwrap_or(f64::INFINITY),
        });
    }
    Ok(LatticeGraph { nodes, edges })
}

/// Chain graph of scale nodes `H(G^alpha)`, edges oriented by the decided
/// order between neighbours.
pub fn power_scale_graph(g: &MetricOperator, alphas: &[f64]) -> Result<LatticeGraph> {
    let mut nodes = Vec::with_capacity(alphas.len());
    for &a in alphas {
        nodes.push(scale_node(g, a)?);
    }
    let mut edges = Vec::new();
    for w in (0..nodes.len()).collect::<Vec<_>>().windows(2) {
        let (i, j) = (w[1], w[0]);
        let rep = order_leq(&nodes[i].op, &nodes[j].op)?;
        if rep.holds {
            edges.push(LatticeEdge {
                lo: i,
                hi: j,
                gamma: rep.gamma.unwrap_or(f64::INFINITY),
            });
        } else {
            let rev = order_leq(&nodes[j].op, &nodes[i].op)?;
            edges.push(LatticeEdge {
                lo: j,
                hi: i,
                gamma: rev.gamma.unwrap_or(f64::INFINITY),
            });
        }
    }
    Ok(LatticeGraph { nodes, edges })
}

impl LatticeGraph {
    /// Line-oriented text export: `node <id> <label>` then
    /// `edge <lo> <hi> gamma=<value>`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            out.push_str(&format!("node {i} {}\n", n.label));
        }
        for e in &self.edges {
            out.push_str(&format!("edge {} {} gamma={:.12e}\n", e.lo, e.hi, e.gamma));
        }
        out
    }

    /// Machine-readable export with the same content as the text format.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "nodes": self.nodes.iter().enumerate().map(|(i, n)| {
                serde_json::json!({ "id": i, "label": n.label.to_string() })
            }).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|e| {
                serde_json::json!({ "lo": e.lo, "hi": e.hi, "gamma": e.gamma })
            }).collect::<Vec<_>>(),
        })
    }
}

/// Embedding-constant ladder across truncations.
#[derive(Debug, Clone, Serialize)]
pub struct GammaLadder {
    pub from: String,
    pub to: String,
    /// Whether `H(from) c H(to)` holds symbolically.
    pub comparable: bool,
    /// `(truncation, gamma at that truncation)`.
    pub gammas: Vec<(usize, f64)>,
    /// Exact supremum when the symbolic ratio is bounded.
    pub symbolic_sup: Option<f64>,
}

/// Per-truncation embedding constants for all twelve Hasse edges plus the
/// ordered middle-row pairs (`G`, `I`, `G^-1`) whose symbolic order fails.
pub fn single_g_ladder(symbol: &DiagSymbol, truncations: &[usize]) -> Result<Vec<GammaLadder>> {
    if truncations.is_empty() {
        return Err(Error::ParameterDomain("empty truncation list".into()));
    }
    let dim = *truncations.iter().max().unwrap();
    let g = MetricOperator::diagonal(symbol.clone(), dim)?;
    let graph = generate_single_g(&g)?;

    let node_symbol = |idx: usize| -> &DiagSymbol {
        graph.nodes[idx]
            .op
            .symbol()
            .expect("symbolic lattice nodes stay symbolic")
    };

    let mut out = Vec::new();
    for e in &graph.edges {
        let ratio = node_symbol(e.hi).div(node_symbol(e.lo));
        let gammas = truncations
            .iter()
            .map(|&n| (n, ratio.sup_truncated(n)))
            .collect();
        out.push(GammaLadder {
            from: graph.nodes[e.lo].label.to_string(),
            to: graph.nodes[e.hi].label.to_string(),
            comparable: true,
            gammas,
            symbolic_sup: ratio.sup(),
        });
    }

    let middle = [single_g::G, single_g::I, single_g::GINV];
    for &i in &middle {
        for &j in &middle {
            if i == j {
                continue;
            }
            let ratio = node_symbol(j).div(node_symbol(i));
            if ratio.is_bounded() {
                continue;
            }
            let gammas = truncations
                .iter()
                .map(|&n| (n, ratio.sup_truncated(n)))
                .collect();
            out.push(GammaLadder {
                from: graph.nodes[i].label.to_string(),
                to: graph.nodes[j].label.to_string(),
                comparable: false,
                gammas,
                symbolic_sup: None,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{g_inner, make_metric};
    use crate::sampling;
    use crate::symbol::GrowthSymbol;
    use approx::assert_relative_eq;
    use rand::SeedableRng;

    fn rdiag(vals: &[f64]) -> MetricOperator {
        let n = vals.len();
        make_metric(Array2::from_shape_fn((n, n), |(i, j)| {
            if i == j {
                C64::new(vals[i], 0.0)
            } else {
                C64::ZERO
            }
        }))
        .unwrap()
    }

    fn gsym(c: f64, p: f64, q: f64, dim: usize) -> MetricOperator {
        MetricOperator::from_growth(GrowthSymbol::new(c, p, q).unwrap(), dim).unwrap()
    }

    #[test]
    fn wedge_identity_plus_g_is_r_g() {
        let g = rdiag(&[1.0, 2.0]);
        let eye = make_metric(opcore::identity(2)).unwrap();
        let w = wedge(&eye, &g).unwrap();
        let rg = crate::metric::r_g(&g).unwrap();
        assert!(opcore::rel_residual(&w.matrix(), &rg.matrix(), 3.0) <= 1e-14);

        let w2 = wedge(&rdiag(&[1.0, 2.0]), &rdiag(&[2.0, 2.0])).unwrap();
        assert_relative_eq!(w2.matrix()[[0, 0]].re, 3.0);
        assert_relative_eq!(w2.matrix()[[1, 1]].re, 4.0);
    }

    #[test]
    fn wedge_quadratic_form_additivity() {
        let mut rng = sampling::Seeded::seed_from_u64(8);
        let x = make_metric(sampling::random_spd(5, &mut rng)).unwrap();
        let y = make_metric(sampling::random_spd(5, &mut rng)).unwrap();
        let w = wedge(&x, &y).unwrap();
        for _ in 0..100 {
            let xi = sampling::random_vector(5, &mut rng);
            let lhs = g_inner(&w, &xi.view(), &xi.view()).unwrap();
            let rhs = g_inner(&x, &xi.view(), &xi.view()).unwrap()
                + g_inner(&y, &xi.view(), &xi.view()).unwrap();
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn vee_scalar_cases() {
        let v = vee(&rdiag(&[1.0, 2.0]), &rdiag(&[2.0, 2.0])).unwrap();
        assert_relative_eq!(v.matrix()[[0, 0]].re, 2.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(v.matrix()[[1, 1]].re, 1.0, max_relative = 1e-12);

        let mut rng = sampling::Seeded::seed_from_u64(3);
        let g = make_metric(sampling::random_spd(4, &mut rng)).unwrap();
        let vg = vee(&g, &g).unwrap();
        let half = g.matrix().mapv(|z| z * 0.5);
        assert!(opcore::rel_residual(&vg.matrix(), &half, opcore::op_norm(&half)) <= 1e-11);
    }

    #[test]
    fn vee_is_inverse_wedge_of_inverses() {
        let mut rng = sampling::Seeded::seed_from_u64(17);
        let x = make_metric(sampling::random_spd(6, &mut rng)).unwrap();
        let y = make_metric(sampling::random_spd(6, &mut rng)).unwrap();
        let lhs = vee(&x, &y).unwrap().matrix();
        let rhs = wedge(&x.inverse().unwrap(), &y.inverse().unwrap())
            .unwrap()
            .inverse()
            .unwrap()
            .matrix();
        assert!(opcore::rel_residual(&lhs, &rhs, opcore::op_norm(&rhs)) <= 1e-11);
    }

    #[test]
    fn projective_norm_two_routes() {
        let mut rng = sampling::Seeded::seed_from_u64(29);
        let x = make_metric(sampling::random_spd(4, &mut rng)).unwrap();
        let y = make_metric(sampling::random_spd(4, &mut rng)).unwrap();
        let w = wedge(&x, &y).unwrap();
        for _ in 0..50 {
            let xi = sampling::random_vector(4, &mut rng);
            let a = projective_norm(&x, &y, &xi.view()).unwrap();
            let b = g_norm(&w, &xi.view()).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
        // unit vector under X = Y = I
        let eye = make_metric(opcore::identity(4)).unwrap();
        let mut unit = Array1::zeros(4);
        unit[0] = C64::new(1.0, 0.0);
        let n = projective_norm(&eye, &eye, &unit.view()).unwrap();
        assert_relative_eq!(n, std::f64::consts::SQRT_2, max_relative = 1e-14);
    }

    #[test]
    fn inductive_norm_symmetric_split() {
        let mut rng = sampling::Seeded::seed_from_u64(41);
        let x = make_metric(sampling::random_spd(5, &mut rng)).unwrap();
        let xi = sampling::random_vector(5, &mut rng);
        let split = inductive_norm(&x, &x, &xi.view()).unwrap();
        let nx = g_norm(&x, &xi.view()).unwrap();
        assert_relative_eq!(
            split.norm,
            nx / std::f64::consts::SQRT_2,
            max_relative = 1e-11
        );
        // the split is xi/2 + xi/2
        for (e, z) in split.eta.iter().zip(xi.iter()) {
            assert!((e - z * 0.5).norm() <= 1e-10);
        }
    }

    #[test]
    fn inductive_norm_matches_per_coordinate_grid_search() {
        // Diagonal operators separate by coordinate, so a dense 1-d grid per
        // coordinate is an independent minimizer.
        let x = rdiag(&[1.0, 1e6]);
        let y = rdiag(&[1e6, 1.0]);
        let xi = Array1::from_vec(vec![C64::new(1.0, 0.0); 2]);
        let split = inductive_norm(&x, &y, &xi.view()).unwrap();

        let xv = [1.0, 1e6];
        let yv = [1e6, 1.0];
        let mut total = 0.0;
        for k in 0..2 {
            let mut best = f64::INFINITY;
            for i in 0..=10_000 {
                let s = i as f64 / 10_000.0;
                let val = xv[k] * s * s + yv[k] * (1.0 - s) * (1.0 - s);
                best = best.min(val);
            }
            total += best;
        }
        assert_relative_eq!(split.norm, total.sqrt(), max_relative = 1e-6);
    }

    #[test]
    fn inductive_split_attains_the_norm() {
        // the returned split evaluates to the closed-form value: the
        // infimum is attained
        let mut rng = sampling::Seeded::seed_from_u64(47);
        for _ in 0..20 {
            let x = make_metric(sampling::random_spd(5, &mut rng)).unwrap();
            let y = make_metric(sampling::random_spd(5, &mut rng)).unwrap();
            let xi = sampling::random_vector(5, &mut rng);
            let split = inductive_norm(&x, &y, &xi.view()).unwrap();
            let at_split = (g_norm(&x, &split.eta.view()).unwrap().powi(2)
                + g_norm(&y, &split.zeta.view()).unwrap().powi(2))
            .sqrt();
            assert_relative_eq!(split.norm, at_split, max_relative = 1e-10);
        }
    }

    #[test]
    fn inductive_norm_below_both_component_norms() {
        let mut rng = sampling::Seeded::seed_from_u64(53);
        for _ in 0..20 {
            let x = make_metric(sampling::random_spd(4, &mut rng)).unwrap();
            let y = make_metric(sampling::random_spd(4, &mut rng)).unwrap();
            let xi = sampling::random_vector(4, &mut rng);
            let ind = inductive_norm(&x, &y, &xi.view()).unwrap().norm;
            assert!(ind <= g_norm(&x, &xi.view()).unwrap() + 1e-10);
            assert!(ind <= g_norm(&y, &xi.view()).unwrap() + 1e-10);
        }
    }

    #[test]
    fn order_symbolic_examples() {
        // H(G) c H for G = (1+n)^2
        let g = gsym(1.0, 2.0, 0.0, 32);
        let eye = MetricOperator::identity_symbolic(32);
        let rep = order_leq(&g, &eye).unwrap();
        assert!(rep.holds);
        assert_relative_eq!(rep.gamma.unwrap(), 1.0, max_relative = 1e-10);
        // but H is not inside H(G)
        let rep = order_leq(&eye, &g).unwrap();
        assert!(!rep.holds);
        assert!(rep.gamma.is_none());
    }

    #[test]
    fn order_dense_gamma() {
        let rep = order_leq(&rdiag(&[1.0, 2.0]), &rdiag(&[2.0, 2.0])).unwrap();
        assert!(rep.holds);
        assert_relative_eq!(rep.gamma.unwrap(), 2.0, max_relative = 1e-11);
    }

    #[test]
    fn order_duality_on_symbols() {
        let catalog: Vec<MetricOperator> = vec![
            gsym(1.0, 0.0, 0.0, 16),
            gsym(2.0, 1.0, 0.0, 16),
            gsym(1.0, 2.0, 0.0, 16),
            gsym(0.5, -1.0, 0.0, 16),
            gsym(1.0, 0.0, 0.5, 16),
            gsym(3.0, 1.0, -0.25, 16),
        ];
        for x in &catalog {
            for y in &catalog {
                let direct = order_leq(x, y).unwrap().holds;
                let dual = order_leq(&y.inverse().unwrap(), &x.inverse().unwrap())
                    .unwrap()
                    .holds;
                assert_eq!(direct, dual);
            }
        }
    }

    #[test]
    fn order_is_a_preorder_on_symbol_catalog() {
        let mut catalog = Vec::new();
        for &p in &[-2.0, -1.0, 0.0, 0.5, 1.0, 2.0] {
            for &q in &[-0.5, 0.0, 0.5] {
                catalog.push(gsym(1.0, p, q, 16));
            }
        }
        catalog.push(gsym(2.0, 0.0, 0.0, 16));
        catalog.push(gsym(0.5, 1.0, 0.0, 16));
        assert!(catalog.len() >= 20);
        for x in &catalog {
            assert!(order_leq(x, x).unwrap().holds);
        }
        for x in &catalog {
            for y in &catalog {
                for z in &catalog {
                    let xy = order_leq(x, y).unwrap().holds;
                    let yz = order_leq(y, z).unwrap().holds;
                    if xy && yz {
                        assert!(order_leq(x, z).unwrap().holds);
                    }
                }
            }
        }
    }

    #[test]
    fn single_g_collapses_for_identity() {
        let eye = make_metric(opcore::identity(4)).unwrap();
        let graph = generate_single_g(&eye).unwrap();
        assert_eq!(graph.nodes.len(), 9);
        assert_eq!(graph.edges.len(), 12);
        for e in &graph.edges {
            assert!(e.gamma <= 2.0 + 1e-12, "gamma {} too large", e.gamma);
        }
        // every node op is a positive multiple of I
        for n in &graph.nodes {
            let m = n.op.matrix();
            let c = m[[0, 0]];
            assert!(
                opcore::rel_residual(&m, &opcore::identity(4).mapv(|z| z * c), 2.0) <= 1e-12
            );
        }
    }

    #[test]
    fn single_g_dual_symmetry_of_labels() {
        let g = gsym(1.0, 2.0, 0.0, 8);
        let graph = generate_single_g(&g).unwrap();
        let labels: Vec<String> = graph.nodes.iter().map(|n| n.label.to_string()).collect();
        for n in &graph.nodes {
            let dual = n.label.dual().to_string();
            assert!(labels.contains(&dual), "dual {dual} missing");
        }
        // and the dual map reverses edges
        let index_of = |l: &str| labels.iter().position(|x| x == l).unwrap();
        for e in &graph.edges {
            let dlo = index_of(&graph.nodes[e.hi].label.dual().to_string());
            let dhi = index_of(&graph.nodes[e.lo].label.dual().to_string());
            assert!(
                graph.edges.iter().any(|f| f.lo == dlo && f.hi == dhi),
                "dual edge {dlo} -> {dhi} missing"
            );
        }
    }

    #[test]
    fn single_g_ladder_cross_growth() {
        let symbol = DiagSymbol::from_term(GrowthSymbol::new(1.0, 2.0, 0.0).unwrap());
        let ladders = single_g_ladder(&symbol, &[32, 64, 128]).unwrap();
        let edges: Vec<_> = ladders.iter().filter(|l| l.comparable).collect();
        let cross: Vec<_> = ladders.iter().filter(|l| !l.comparable).collect();
        assert_eq!(edges.len(), 12);
        assert_eq!(cross.len(), 3);
        for e in edges {
            for w in e.gammas.windows(2) {
                assert!(w[1].1 / w[0].1 <= 1.1, "edge {} -> {} unstable", e.from, e.to);
            }
            assert!(e.symbolic_sup.is_some());
        }
        for c in cross {
            for w in c.gammas.windows(2) {
                assert!(
                    w[1].1 / w[0].1 >= 3.0,
                    "{} -> {} grew only {}",
                    c.from,
                    c.to,
                    w[1].1 / w[0].1
                );
            }
        }
    }

    #[test]
    fn scale_nodes_reproduce_central_triplet() {
        let g = gsym(1.0, 2.0, 0.0, 16);
        let n0 = scale_node(&g, 0.0).unwrap();
        assert_eq!(n0.label, LabelExpr::I);
        assert!(order_leq(&scale_node(&g, 1.0).unwrap().op, &n0.op)
            .unwrap()
            .holds);
        assert!(order_leq(&n0.op, &scale_node(&g, -1.0).unwrap().op)
            .unwrap()
            .holds);
        // exponent arithmetic
        let half = scale_node(&g, 0.5).unwrap();
        assert_eq!(
            half.op.symbol().unwrap().as_single_term().unwrap(),
            GrowthSymbol::new(1.0, 1.0, 0.0).unwrap()
        );
    }

    #[test]
    fn graph_export_formats() {
        let g = gsym(1.0, 1.0, 0.0, 8);
        let graph = generate_single_g(&g).unwrap();
        let text = graph.to_text();
        assert_eq!(text.lines().filter(|l| l.starts_with("node ")).count(), 9);
        assert_eq!(text.lines().filter(|l| l.starts_with("edge ")).count(), 12);
        let json = graph.to_json();
        assert_eq!(json["nodes"].as_array().unwrap().len(), 9);
        assert_eq!(json["edges"].as_array().unwrap().len(), 12);
    }
}
