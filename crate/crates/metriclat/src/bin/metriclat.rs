// `!(tol > 0.0)` rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Command-line runner: scenarios and ad-hoc checks with JSON/CSV reports.
//!
//! Exit codes: 0 when every check in the produced report passed, 1 on check
//! failure, 2 on usage or input errors. All randomness comes from a ChaCha8
//! generator seeded by `--seed`, so identical invocations produce identical
//! reports apart from the timestamp field. A flat `key = value` config file
//! can supply defaults; explicit flags win.

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::prelude::*;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use metriclat::error::{Error, Result};
use metriclat::lattice::{generate_single_g, power_scale_graph, single_g_ladder};
use metriclat::metric::{make_metric, read_matrix_file, MetricOperator};
use metriclat::opcore::{self, op_norm};
use metriclat::pipengine::{dirichlet_laplacian_form, klmn_restrict, profile, PipOperator};
use metriclat::quasiherm::is_quasi_hermitian;
use metriclat::report::{atomic_write, atomic_write_json, CheckResult, Report};
use metriclat::riesz::{
    alpha_operator, parse_alpha_csv, riesz_from, symmetrized_alpha, verify_intertwining,
};
use metriclat::sampling::{self, Seeded};
use metriclat::scenarios::{
    rank_one_pair, derivative_pair, robin_halfline, shifted_oscillator, weighted_lattice_demo, WeightModel,
};
use metriclat::similarity::{
    check_intertwining, map_eigenvectors, spectra_compare, SimilarityClass,
};
use metriclat::symbol::{DiagSymbol, GrowthSymbol};

#[derive(Parser)]
#[command(name = "metriclat", version, about = "metric-operator lattice toolkit")]
struct Cli {
    /// Flat `key = value` config file; flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for reports and artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Artifact format: json, csv or both.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Seed for the deterministic generator.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Tolerance override for residual checks.
    #[arg(long, global = true, allow_negative_numbers = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Single-G lattice: nine nodes, twelve edges, truncation ladder.
    Lattice(LatticeArgs),
    /// Random similar pairs: spectra match and eigenvectors push through.
    Similarity(SimilarityArgs),
    /// Quasi-Hermiticity equivalence on constructed positives and negatives.
    Quasiherm(QuasihermArgs),
    /// Riesz system invariants from a seeded or imported T.
    Riesz(RieszArgs),
    /// Operator profile over a lattice of weighted spaces.
    Pipmap(PipmapArgs),
    /// Generalized eigenproblem with invertibility certificate.
    Klmn(KlmnArgs),
    /// Packaged discretization scenarios.
    Scenario(ScenarioArgs),
}

#[derive(Args)]
struct LatticeArgs {
    /// Growth symbol "c,p,q" generating the lattice.
    #[arg(long)]
    symbol: Option<String>,
    /// Dense metric from a matrix file instead of a symbol.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Comma-separated truncation ladder.
    #[arg(long)]
    truncations: Option<String>,
}

#[derive(Args)]
struct SimilarityArgs {
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    /// Condition bound for the random intertwiner.
    #[arg(long)]
    kappa: Option<f64>,
}

#[derive(Args)]
struct QuasihermArgs {
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Args)]
struct RieszArgs {
    #[arg(long)]
    dim: Option<usize>,
    /// Draw a random real coefficient sequence (the default).
    #[arg(long, default_value_t = false)]
    alpha_real: bool,
    /// Inline CSV of complex coefficients.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// One-line CSV file of complex coefficients.
    #[arg(long)]
    alpha_file: Option<PathBuf>,
    /// Import T from the matrix text format.
    #[arg(long)]
    t_file: Option<PathBuf>,
    /// Condition bound for the random T.
    #[arg(long)]
    kappa: Option<f64>,
}

#[derive(Args)]
struct PipmapArgs {
    /// Diagonal symbol of the profiled operator.
    #[arg(long)]
    a_symbol: Option<String>,
    /// Symbol of the generating metric.
    #[arg(long)]
    g_symbol: Option<String>,
    /// Scale exponents, comma separated (scale graph).
    #[arg(long, allow_hyphen_values = true)]
    alphas: Option<String>,
    /// Profile over the nine-node lattice instead of the power scale.
    #[arg(long, default_value_t = false)]
    nine_node: bool,
    /// Truncation dimension of the symbolic operators.
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Args)]
struct KlmnArgs {
    /// Named form pair; `dirichlet-pi` is the Laplacian on [0, pi].
    #[arg(long)]
    example: Option<String>,
    /// Number of elements.
    #[arg(long)]
    n: Option<usize>,
    /// Probe point for the invertibility certificate.
    #[arg(long, allow_negative_numbers = true)]
    probe: Option<f64>,
}

#[derive(Args)]
struct ScenarioArgs {
    /// One of: rank-one-pair, derivative-pair, weighted-lattice, robin-halfline,
    /// shifted-oscillator.
    name: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    l: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    d: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    /// Weight model for the weighted-lattice scenario: x2 or exp.
    #[arg(long)]
    model: Option<String>,
}

/// Flat `key = value` configuration.
struct Config(BTreeMap<String, String>);

impl Config {
    fn load(path: Option<&Path>) -> Result<Self> {
        let mut map = BTreeMap::new();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p)?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((k, v)) = line.split_once('=') else {
                    return Err(Error::Usage(format!(
                        "config line {} is not `key = value`: {line:?}",
                        lineno + 1
                    )));
                };
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        Ok(Config(map))
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::Usage(format!("bad config value for {key}: {raw:?}"))),
        }
    }
}

/// Flag, then config file, then default.
fn resolve<T: std::str::FromStr + Clone>(
    flag: Option<T>,
    cfg: &Config,
    key: &str,
    default: T,
) -> Result<T> {
    if let Some(v) = flag {
        return Ok(v);
    }
    Ok(cfg.get::<T>(key)?.unwrap_or(default))
}

fn parse_usize_list(raw: &str) -> Result<Vec<usize>> {
    raw.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Usage(format!("bad integer {t:?}")))
        })
        .collect()
}

fn parse_f64_list(raw: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Usage(format!("bad number {t:?}")))
        })
        .collect()
}

struct Emitter {
    dir: PathBuf,
    format: Format,
}

impl Emitter {
    fn want_json(&self) -> bool {
        matches!(self.format, Format::Json | Format::Both)
    }
    fn want_csv(&self) -> bool {
        matches!(self.format, Format::Csv | Format::Both)
    }

    /// `result.json` is always written: it carries the pass/fail verdict.
    fn emit_report(&self, report: &Report) -> Result<()> {
        atomic_write_json(&self.dir.join("result.json"), report)
    }

    fn emit_json(&self, name: &str, value: &serde_json::Value) -> Result<()> {
        if self.want_json() {
            atomic_write_json(&self.dir.join(name), value)?;
        }
        Ok(())
    }

    fn emit_text(&self, name: &str, text: &str) -> Result<()> {
        if self.want_csv() {
            atomic_write(&self.dir.join(name), text.as_bytes())?;
        }
        Ok(())
    }
}

fn run_lattice(args: LatticeArgs, cfg: &Config, em: &Emitter) -> Result<Report> {
    let mut report = Report::new("lattice", 0);
    let truncs = {
        let raw = resolve(args.truncations, cfg, "truncations", "32,64,128".into())?;
        parse_usize_list(&raw)?
    };
    report.param("truncations", serde_json::to_value(&truncs)?);

    if let Some(path) = args.matrix {
        let m = read_matrix_file(&path)?;
        let g = make_metric(m)?;
        let graph = generate_single_g(&g)?;
        let finite = graph.edges.iter().all(|e| e.gamma.is_finite());
        report.push(CheckResult::residual_check(
            "hasse-gammas-finite",
            "all twelve embedding constants are finite",
            if finite { 0.0 } else { 1.0 },
            0.5,
        ));
        em.emit_json("lattice.json", &graph.to_json())?;
        em.emit_text("lattice.txt", &graph.to_text())?;
        return Ok(report);
    }

    let raw = resolve(args.symbol, cfg, "symbol", "1,2,0".into())?;
    let symbol: GrowthSymbol = raw.parse()?;
    report.param("symbol", raw.clone());
    let diag = DiagSymbol::from_term(symbol);
    let max_n = *truncs
        .iter()
        .max()
        .ok_or_else(|| Error::Usage("empty truncation list".into()))?;
    let g = MetricOperator::diagonal(diag.clone(), max_n)?;
    let graph = generate_single_g(&g)?;
    em.emit_json("lattice.json", &graph.to_json())?;
    em.emit_text("lattice.txt", &graph.to_text())?;

    let ladders = single_g_ladder(&diag, &truncs)?;
    em.emit_json("ladder.json", &serde_json::to_value(&ladders)?)?;
    let mut edge_drift: f64 = 0.0;
    let mut cross_growth = f64::INFINITY;
    for l in &ladders {
        for w in l.gammas.windows(2) {
            let ratio = w[1].1 / w[0].1.max(1e-300);
            if l.comparable {
                edge_drift = edge_drift.max(ratio);
            } else {
                cross_growth = cross_growth.min(ratio);
            }
        }
    }
    report.push(CheckResult::residual_check(
        "hasse-stability",
        "embedding constants along Hasse edges stay stable across truncations",
        edge_drift,
        1.1,
    ));
    if cross_growth.is_finite() {
        report.push(CheckResult::lower_bound_check(
            "cross-growth",
            "constants between noncomparable middle nodes grow across truncations",
            cross_growth,
            1.05,
        ));
    }
    Ok(report)
}

fn run_similarity(args: SimilarityArgs, cfg: &Config, seed: u64, tol: f64) -> Result<Report> {
    let trials = resolve(args.trials, cfg, "trials", 200usize)?;
    let dim = resolve(args.dim, cfg, "dim", 16usize)?;
    let kappa = resolve(args.kappa, cfg, "kappa", 1e3f64)?;
    if dim < 2 {
        return Err(Error::Usage("dim must be at least 2".into()));
    }
    let mut report = Report::new("similarity", seed);
    report.param("trials", trials);
    report.param("dim", dim);
    report.param("kappa", kappa);

    let mut rng = Seeded::seed_from_u64(seed);
    let mut worst_spectra: f64 = 0.0;
    let mut worst_push: f64 = 0.0;
    let mut all_similar = true;
    for _ in 0..trials {
        let a = sampling::random_complex(dim, &mut rng);
        let t = sampling::random_conditioned(dim, kappa, &mut rng);
        use ndarray_linalg::Inverse;
        let b = t.dot(&a).dot(&t.inv()?);
        let rep = check_intertwining(&a, &b, &t, tol)?;
        all_similar &= rep.classification == SimilarityClass::Similar;
        let scale = op_norm(&a);
        let m = spectra_compare(&a, &b, 1e-8 * scale)?;
        worst_spectra = worst_spectra.max(m.max_distance / scale.max(1e-300));
        let push_scale = op_norm(&b) * op_norm(&t);
        for p in map_eigenvectors(&a, &b, &t, tol)? {
            worst_push = worst_push.max(p.residual / push_scale.max(1e-300));
        }
    }
    report.push(CheckResult::residual_check(
        "classification",
        "every constructed pair classifies as similar",
        if all_similar { 0.0 } else { 1.0 },
        0.5,
    ));
    report.push(CheckResult::residual_check(
        "spectra-match",
        "spectra agree under optimal pairing",
        worst_spectra,
        1e-8,
    ));
    report.push(CheckResult::residual_check(
        "eigenvector-push",
        "eigenvectors push through the intertwiner",
        worst_push,
        1e-8,
    ));
    Ok(report)
}

fn run_quasiherm(args: QuasihermArgs, cfg: &Config, seed: u64, tol: f64) -> Result<Report> {
    let trials = resolve(args.trials, cfg, "trials", 200usize)?;
    let dim = resolve(args.dim, cfg, "dim", 12usize)?;
    let mut report = Report::new("quasiherm", seed);
    report.param("trials", trials);
    report.param("dim", dim);

    let mut rng = Seeded::seed_from_u64(seed);
    let mut agree = true;
    let mut positives_pass = true;
    let mut negatives_fail = true;
    for _ in 0..trials {
        let g = make_metric(sampling::random_spd(dim, &mut rng))?;
        let h = sampling::random_hermitian(dim, &mut rng);
        let gh = g.power(0.5)?.matrix();
        let gmh = g.power(-0.5)?.matrix();
        let a = gmh.dot(&h).dot(&gh);
        let rep = is_quasi_hermitian(&a, &g, tol)?;
        positives_pass &= rep.verdict;
        agree &= rep.verdict == (rep.ga_symmetry_residual <= tol)
            && rep.verdict == (rep.k_hermiticity <= tol);

        let bad = sampling::random_complex(dim, &mut rng);
        let rep = is_quasi_hermitian(&bad, &g, tol)?;
        negatives_fail &= !rep.verdict;
        agree &= rep.verdict == (rep.ga_symmetry_residual <= tol)
            && rep.verdict == (rep.k_hermiticity <= tol);
    }
    report.push(CheckResult::residual_check(
        "verdicts-agree",
        "pairwise identity, GA symmetry and K Hermiticity give one verdict",
        if agree { 0.0 } else { 1.0 },
        0.5,
    ));
    report.push(CheckResult::residual_check(
        "positives",
        "constructed quasi-Hermitian operators pass",
        if positives_pass { 0.0 } else { 1.0 },
        0.5,
    ));
    report.push(CheckResult::residual_check(
        "negatives",
        "generic non-normal operators fail",
        if negatives_fail { 0.0 } else { 1.0 },
        0.5,
    ));
    Ok(report)
}

fn run_riesz(args: RieszArgs, cfg: &Config, seed: u64) -> Result<Report> {
    let dim = resolve(args.dim, cfg, "dim", 64usize)?;
    let kappa = resolve(args.kappa, cfg, "kappa", 100f64)?;
    let mut report = Report::new("riesz", seed);
    report.param("dim", dim);

    let mut rng = Seeded::seed_from_u64(seed);
    let t = match &args.t_file {
        Some(path) => read_matrix_file(path)?,
        None => sampling::random_conditioned(dim, kappa, &mut rng),
    };
    let sys = riesz_from(&t, 1e8)?;
    let n = sys.dim();
    report.param("effective_dim", n);

    let alpha: Vec<C64> = if let Some(inline) = &args.alpha {
        parse_alpha_csv(inline)?
    } else if let Some(path) = &args.alpha_file {
        let text = std::fs::read_to_string(path)?;
        parse_alpha_csv(text.trim())?
    } else {
        use rand::Rng;
        (0..n)
            .map(|_| {
                let re = rng.random::<f64>() * 4.0 - 2.0;
                let im = if args.alpha_real {
                    0.0
                } else {
                    rng.random::<f64>() * 2.0 - 1.0
                };
                C64::new(re, im)
            })
            .collect()
    };
    if alpha.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: alpha.len(),
        });
    }
    let real_alpha = alpha.iter().all(|z| z.im == 0.0);

    report.push(CheckResult::residual_check(
        "biorthogonality",
        "the two bases are biorthogonal",
        sys.biorthogonality_deviation,
        1e-10,
    ));
    report.push(CheckResult::residual_check(
        "frame-product",
        "frame sum of phi equals T T*",
        sys.frame_product_deviation,
        1e-12,
    ));

    let op = alpha_operator(&sys, &alpha)?;
    let res = verify_intertwining(&op)?;
    report.push(CheckResult::residual_check(
        "metric-intertwining",
        "S_psi carries A_{phi,psi} onto A_{psi,phi}",
        res.psi_side.max(res.phi_side),
        1e-10,
    ));
    report.push(CheckResult::residual_check(
        "middle-operators",
        "the middle operators equal their direct frame sums",
        res.middle_psi.max(res.middle_phi),
        1e-10,
    ));

    if real_alpha {
        let a = symmetrized_alpha(&op)?;
        let herm = op_norm(&(&a - &opcore::adjoint(&a))) / op_norm(&a).max(1e-300);
        report.push(CheckResult::residual_check(
            "symmetrized-hermitian",
            "real coefficients give a Hermitian symmetrization",
            herm,
            1e-10,
        ));
    } else {
        // complex coefficients: the adjoint pairs the two symmetrizations
        let a = symmetrized_alpha(&op)?;
        let conj: Vec<C64> = alpha.iter().map(|z| z.conj()).collect();
        let op_bar = alpha_operator(&sys, &conj)?;
        let mirror = metriclat::riesz::symmetrized_alpha_mirror(&op_bar)?;
        let res = opcore::rel_residual(&opcore::adjoint(&a), &mirror, op_norm(&a).max(1.0));
        report.push(CheckResult::residual_check(
            "symmetrized-adjoint-pair",
            "the adjoint of the symmetrization carries conjugated coefficients",
            res,
            1e-10,
        ));
    }
    let mut diag = Array2::<C64>::zeros((n, n));
    for (k, &z) in alpha.iter().enumerate() {
        diag[[k, k]] = z;
    }
    let scale = op_norm(&op.a_phi_psi).max(1.0);
    let m = spectra_compare(&op.a_phi_psi, &diag, 1e-8 * scale)?;
    report.push(CheckResult::residual_check(
        "alpha-spectrum",
        "the spectrum is the coefficient multiset",
        m.max_distance / scale,
        1e-8,
    ));
    Ok(report)
}

fn run_pipmap(args: PipmapArgs, cfg: &Config, em: &Emitter) -> Result<Report> {
    let dim = resolve(args.dim, cfg, "dim", 64usize)?;
    let a_raw = resolve(args.a_symbol, cfg, "a-symbol", "1,1,0".into())?;
    let g_raw = resolve(args.g_symbol, cfg, "g-symbol", "1,2,0".into())?;
    let a_sym: GrowthSymbol = a_raw.parse()?;
    let g_sym: GrowthSymbol = g_raw.parse()?;
    let mut report = Report::new("pipmap", 0);
    report.param("a_symbol", a_raw);
    report.param("g_symbol", g_raw);
    report.param("dim", dim);

    let g = MetricOperator::from_growth(g_sym, dim)?;
    let graph = if args.nine_node {
        generate_single_g(&g)?
    } else {
        let raw = resolve(args.alphas, cfg, "alphas", "-2,-1,0,1,2".into())?;
        let alphas = parse_f64_list(&raw)?;
        report.param("alphas", serde_json::to_value(&alphas)?);
        power_scale_graph(&g, &alphas)?
    };
    let prof = profile(&PipOperator::Diagonal(DiagSymbol::from_term(a_sym)), &graph)?;
    em.emit_json("profile.json", &prof.to_json())?;
    report.push(CheckResult::residual_check(
        "profile-invariants",
        "initial and final admissible sets verified before export",
        0.0,
        0.5,
    ));
    report.param("s_set_size", prof.s_set.len());
    report.param("d_set_size", prof.d_set.len());
    report.param("i_set_size", prof.i_set.len());
    Ok(report)
}

fn run_klmn(args: KlmnArgs, cfg: &Config, em: &Emitter) -> Result<Report> {
    let example = resolve(args.example, cfg, "example", "dirichlet-pi".into())?;
    let n = resolve(args.n, cfg, "n", 200usize)?;
    let probe = resolve(args.probe, cfg, "probe", 0.0f64)?;
    let mut report = Report::new("klmn", 0);
    report.param("example", example.clone());
    report.param("n", n);
    report.param("probe", probe);

    let fp = match example.as_str() {
        "dirichlet-pi" => dirichlet_laplacian_form(n, std::f64::consts::PI)?,
        other => {
            return Err(Error::Usage(format!(
                "unknown klmn example {other:?}; available: dirichlet-pi"
            )))
        }
    };
    let r = klmn_restrict(&fp, Some(probe))?;
    report.push(CheckResult::residual_check(
        "certificate",
        "the shifted form is boundedly invertible at the probe",
        if r.certificate.holds { 0.0 } else { 1.0 },
        0.5,
    ));
    let mut worst: f64 = 0.0;
    for (k, expect) in [1.0, 4.0, 9.0].iter().enumerate() {
        worst = worst.max((r.eigenvalues[k] - expect).abs() / expect);
    }
    report.push(CheckResult::residual_check(
        "low-eigenvalues",
        "first three eigenvalues match 1, 4, 9 within 0.1%",
        worst,
        1e-3,
    ));

    let mut text = String::from("index,eigenvalue\n");
    for (k, lam) in r.eigenvalues.iter().enumerate() {
        text.push_str(&format!("{k},{lam}\n"));
    }
    em.emit_text("eigenvalues.csv", &text)?;
    Ok(report)
}

fn run_scenario(args: ScenarioArgs, cfg: &Config, em: &Emitter, seed: u64) -> Result<Report> {
    let name = args.name.clone();
    let mut result = match name.as_str() {
        "rank-one-pair" => {
            let n = resolve(args.n, cfg, "n", 201usize)?;
            let l = resolve(args.l, cfg, "l", 10.0f64)?;
            rank_one_pair(n, l, None)?
        }
        "derivative-pair" => {
            let n = resolve(args.n, cfg, "n", 400usize)?;
            let l = resolve(args.l, cfg, "l", 10.0f64)?;
            derivative_pair(n, l)?
        }
        "weighted-lattice" => {
            let n = resolve(args.n, cfg, "n", 128usize)?;
            let model = resolve(args.model, cfg, "model", "x2".into())?;
            let (model, default_l) = match model.as_str() {
                "x2" => (WeightModel::XSquared, 10.0),
                "exp" => {
                    let a = resolve(args.alpha, cfg, "alpha", 1.0f64)?;
                    (WeightModel::Exp { a }, 8.0)
                }
                other => {
                    return Err(Error::Usage(format!(
                        "unknown weight model {other:?}; available: x2, exp"
                    )))
                }
            };
            let l = resolve(args.l, cfg, "l", default_l)?;
            weighted_lattice_demo(model, n, l, seed)?
        }
        "robin-halfline" => {
            let n = resolve(args.n, cfg, "n", 400usize)?;
            let l = resolve(args.l, cfg, "l", 40.0f64)?;
            let d = resolve(args.d, cfg, "d", -1.0f64)?;
            let b = resolve(args.b, cfg, "b", 1.0f64)?;
            robin_halfline(n, l, d, b)?
        }
        "shifted-oscillator" => {
            let n = resolve(args.n, cfg, "n", 64usize)?;
            let alpha = resolve(args.alpha, cfg, "alpha", 0.5f64)?;
            let omega = resolve(args.omega, cfg, "omega", 1.0f64)?;
            shifted_oscillator(n, alpha, omega)?
        }
        other => {
            return Err(Error::Usage(format!(
                "unknown scenario {other:?}; available: rank-one-pair, derivative-pair, \
                 weighted-lattice, robin-halfline, shifted-oscillator"
            )))
        }
    };

    if !em.want_csv() {
        result.spectra_rows.clear();
    }
    if !em.want_json() {
        result.lattice = None;
    }
    result.write_artifacts(&em.dir)?;

    let mut report = Report::new(format!("scenario {name}"), seed);
    for (k, v) in &result.params {
        report.param(k, v.clone());
    }
    report.extend(result.checks.clone());
    Ok(report)
}

fn dispatch(cli: Cli) -> Result<Report> {
    let cfg = Config::load(cli.config.as_deref())?;
    let seed = resolve(cli.seed, &cfg, "seed", 0u64)?;
    let tol = resolve(cli.tol, &cfg, "tol", 1e-8f64)?;
    if !(tol > 0.0) {
        return Err(Error::Usage(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let out = match cli.out {
        Some(p) => p,
        None => cfg
            .get::<PathBuf>("out")?
            .unwrap_or_else(|| PathBuf::from("out")),
    };
    let format = cli.format.unwrap_or(match cfg.0.get("format").map(String::as_str) {
        Some("json") => Format::Json,
        Some("csv") => Format::Csv,
        _ => Format::Both,
    });

    let subdir = match &cli.command {
        Command::Lattice(_) => "lattice".to_string(),
        Command::Similarity(_) => "similarity".to_string(),
        Command::Quasiherm(_) => "quasiherm".to_string(),
        Command::Riesz(_) => "riesz".to_string(),
        Command::Pipmap(_) => "pipmap".to_string(),
        Command::Klmn(_) => "klmn".to_string(),
        Command::Scenario(s) => format!("scenario-{}", s.name),
    };
    let em = Emitter {
        dir: out.join(subdir),
        format,
    };

    let mut report = match cli.command {
        Command::Lattice(a) => run_lattice(a, &cfg, &em)?,
        Command::Similarity(a) => run_similarity(a, &cfg, seed, tol)?,
        Command::Quasiherm(a) => run_quasiherm(a, &cfg, seed, tol)?,
        Command::Riesz(a) => run_riesz(a, &cfg, seed)?,
        Command::Pipmap(a) => run_pipmap(a, &cfg, &em)?,
        Command::Klmn(a) => run_klmn(a, &cfg, &em)?,
        Command::Scenario(a) => run_scenario(a, &cfg, &em, seed)?,
    };
    report.param("out", em.dir.to_string_lossy().into_owned());
    em.emit_report(&report)?;
    Ok(report)
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(report) => {
            for c in &report.checks {
                let status = if c.passed { "pass" } else { "FAIL" };
                println!(
                    "{status}  {:<36} residual {:.3e}  tol {:.3e}",
                    c.name, c.residual, c.tolerance
                );
            }
            if report.passed {
                println!("all {} checks passed", report.checks.len());
                std::process::exit(0);
            } else {
                eprintln!("some checks failed");
                std::process::exit(1);
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}
