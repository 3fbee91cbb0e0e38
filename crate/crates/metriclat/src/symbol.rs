//! Exact growth-symbol calculus for diagonal operators.
//!
//! A [`GrowthSymbol`] is the closed-form sequence `n -> c (1+n)^p e^{qn}`.
//! Diagonal operators `G = diag(g_n)` with such symbols model unbounded
//! metric operators: boundedness of `sup_n y_n / x_n` is decided *exactly*
//! by comparing `(q, p)` lexicographically, never inferred from a single
//! truncation.
//!
//! Sums of terms arise from `I + G`; reciprocals arise from the lattice
//! operation `X v Y = (X^{-1} + Y^{-1})^{-1}`. [`DiagSymbol`] is the closure
//! of the single-term grammar under `+`, `*` and inversion: a ratio of two
//! term sums. Every quantity a lattice node needs (evaluation, boundedness,
//! suprema of ratios) stays exact or log-domain stable in this form.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// One term `c (1+n)^p e^{qn}` with `c > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthSymbol {
    pub c: f64,
    pub p: f64,
    pub q: f64,
}

impl GrowthSymbol {
    pub fn new(c: f64, p: f64, q: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() || !p.is_finite() || !q.is_finite() {
            return Err(Error::ParameterDomain(format!(
                "growth symbol needs finite parameters with c > 0, got c={c}, p={p}, q={q}"
            )));
        }
        Ok(Self { c, p, q })
    }

    /// The constant symbol `c`.
    pub fn constant(c: f64) -> Result<Self> {
        Self::new(c, 0.0, 0.0)
    }

    pub fn log_eval(&self, n: u64) -> f64 {
        self.c.ln() + self.p * ((1 + n) as f64).ln() + self.q * n as f64
    }

    pub fn eval(&self, n: u64) -> f64 {
        self.log_eval(n).exp()
    }

    /// `(c (1+n)^p e^{qn})^alpha = c^alpha (1+n)^{alpha p} e^{alpha q n}`.
    pub fn pow(&self, alpha: f64) -> Self {
        Self {
            c: self.c.powf(alpha),
            p: alpha * self.p,
            q: alpha * self.q,
        }
    }

    /// True when `g_n` is unbounded, i.e. `(q, p) > (0, 0)` lexicographically.
    pub fn is_unbounded(&self) -> bool {
        self.q > 0.0 || (self.q == 0.0 && self.p > 0.0)
    }
}

impl fmt::Display for GrowthSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.c, self.p, self.q)
    }
}

impl FromStr for GrowthSymbol {
    type Err = Error;

    /// Parses the `"c,p,q"` triple used in config files.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "expected \"c,p,q\" symbol triple, got {s:?}"
            )));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad symbol component {t:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        Self::new(nums[0], nums[1], nums[2])
    }
}

/// Exponent pair ordered lexicographically by `(q, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Lead {
    q: f64,
    p: f64,
    c: f64,
}

fn leading(terms: &[GrowthSymbol]) -> Lead {
    let mut best = Lead {
        q: f64::NEG_INFINITY,
        p: f64::NEG_INFINITY,
        c: 0.0,
    };
    for t in terms {
        if t.q > best.q || (t.q == best.q && t.p > best.p) {
            best = Lead {
                q: t.q,
                p: t.p,
                c: t.c,
            };
        } else if t.q == best.q && t.p == best.p {
            best.c += t.c;
        }
    }
    best
}

fn log_sum(terms: &[GrowthSymbol], n: u64) -> f64 {
    debug_assert!(!terms.is_empty());
    let logs: Vec<f64> = terms.iter().map(|t| t.log_eval(n)).collect();
    let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + logs.iter().map(|l| (l - m).exp()).sum::<f64>().ln()
}

fn merge(terms: Vec<GrowthSymbol>) -> Vec<GrowthSymbol> {
    let mut out: Vec<GrowthSymbol> = Vec::with_capacity(terms.len());
    for t in terms {
        if let Some(existing) = out.iter_mut().find(|e| e.p == t.p && e.q == t.q) {
            existing.c += t.c;
        } else {
            out.push(t);
        }
    }
    out.sort_by(|a, b| b.q.total_cmp(&a.q).then(b.p.total_cmp(&a.p)));
    out
}

/// A strictly positive diagonal symbol: ratio of two sums of growth terms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagSymbol {
    num: Vec<GrowthSymbol>,
    den: Vec<GrowthSymbol>,
}

impl DiagSymbol {
    pub fn from_term(t: GrowthSymbol) -> Self {
        Self {
            num: vec![t],
            den: vec![GrowthSymbol {
                c: 1.0,
                p: 0.0,
                q: 0.0,
            }],
        }
    }

    pub fn one() -> Self {
        Self::from_term(GrowthSymbol {
            c: 1.0,
            p: 0.0,
            q: 0.0,
        })
    }

    pub fn constant(c: f64) -> Result<Self> {
        Ok(Self::from_term(GrowthSymbol::constant(c)?))
    }

    /// The single term, if this symbol is one (denominator trivial).
    pub fn as_single_term(&self) -> Option<GrowthSymbol> {
        if self.num.len() == 1 && self.den.len() == 1 {
            let d = self.den[0];
            let t = self.num[0];
            Some(GrowthSymbol {
                c: t.c / d.c,
                p: t.p - d.p,
                q: t.q - d.q,
            })
        } else {
            None
        }
    }

    pub fn log_eval(&self, n: u64) -> f64 {
        log_sum(&self.num, n) - log_sum(&self.den, n)
    }

    /// Value `g_n`; may overflow to `inf` for huge exponents, callers that
    /// care use [`DiagSymbol::log_eval`].
    pub fn eval(&self, n: u64) -> f64 {
        self.log_eval(n).exp()
    }

    pub fn add(&self, other: &Self) -> Self {
        // a/b + c/d = (a d + c b) / (b d)
        let mut num = cross(&self.num, &other.den);
        num.extend(cross(&other.num, &self.den));
        Self {
            num: merge(num),
            den: merge(cross(&self.den, &other.den)),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            num: merge(cross(&self.num, &other.num)),
            den: merge(cross(&self.den, &other.den)),
        }
    }

    pub fn inv(&self) -> Self {
        Self {
            num: self.den.clone(),
            den: self.num.clone(),
        }
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        let factor = Self::constant(c)?;
        Ok(self.mul(&factor))
    }

    /// `g^alpha`. Exact for pure terms; integer powers of general ratios are
    /// expanded by repeated multiplication; fractional powers of genuine sums
    /// are outside the grammar.
    pub fn pow(&self, alpha: f64) -> Result<Self> {
        if let Some(t) = self.as_single_term() {
            return Ok(Self::from_term(t.pow(alpha)));
        }
        if alpha == 0.0 {
            return Ok(Self::one());
        }
        if alpha.fract() == 0.0 && alpha.abs() <= 16.0 {
            let k = alpha.abs() as u32;
            let mut acc = Self::one();
            for _ in 0..k {
                acc = acc.mul(self);
            }
            return Ok(if alpha < 0.0 { acc.inv() } else { acc });
        }
        Err(Error::SymbolUnsupported(format!(
            "fractional power {alpha} of a non-atomic symbol"
        )))
    }

    /// Leading `(q, p)` exponents of numerator minus denominator.
    fn lead_gap(&self) -> (f64, f64, f64) {
        let ln = leading(&self.num);
        let ld = leading(&self.den);
        (ln.q - ld.q, ln.p - ld.p, ln.c / ld.c)
    }

    /// `sup_n g_n < inf`? Exact: compares leading exponents lexicographically.
    pub fn is_bounded(&self) -> bool {
        let (dq, dp, _) = self.lead_gap();
        dq < 0.0 || (dq == 0.0 && dp <= 0.0)
    }

    /// True when `g_n` grows without bound.
    pub fn is_unbounded(&self) -> bool {
        !self.is_bounded()
    }

    /// Limit of `g_n` as `n -> inf`, when it exists (bounded symbols only).
    pub fn limit(&self) -> Option<f64> {
        let (dq, dp, c) = self.lead_gap();
        if dq < 0.0 || (dq == 0.0 && dp < 0.0) {
            Some(0.0)
        } else if dq == 0.0 && dp == 0.0 {
            Some(c)
        } else {
            None
        }
    }

    /// `sup_{n >= 0} g_n`, or `None` when unbounded.
    ///
    /// Symbols are eventually monotone, so the supremum is either the limit
    /// at infinity or an interior maximum. Pure terms expose the critical
    /// point in closed form (`n* = -p/q - 1`); general ratios get a dense
    /// scan of small indices plus a geometric scan outward.
    pub fn sup(&self) -> Option<f64> {
        if self.is_unbounded() {
            return None;
        }
        let mut best = self.limit().unwrap_or(0.0).ln();
        best = best.max(self.log_eval(0));
        if let Some(t) = self.as_single_term() {
            // d/dn [p ln(1+n) + q n] = 0 at n = -p/q - 1
            if t.q < 0.0 && t.p > 0.0 {
                let star = -t.p / t.q - 1.0;
                for cand in [star.floor(), star.ceil()] {
                    if cand >= 0.0 && cand.is_finite() {
                        best = best.max(self.log_eval(cand as u64));
                    }
                }
            }
            return Some(best.exp());
        }
        for n in 0..=1024u64 {
            best = best.max(self.log_eval(n));
        }
        let mut n = 1024u64;
        while n < 1 << 40 {
            n = (n as f64 * 1.25) as u64 + 1;
            best = best.max(self.log_eval(n));
        }
        Some(best.exp())
    }

    /// Supremum restricted to the truncation window `n < dim`.
    pub fn sup_truncated(&self, dim: usize) -> f64 {
        (0..dim as u64)
            .map(|n| self.log_eval(n))
            .fold(f64::NEG_INFINITY, f64::max)
            .exp()
    }

    /// Materialize the first `dim` diagonal values.
    pub fn truncate(&self, dim: usize) -> Vec<f64> {
        (0..dim as u64).map(|n| self.eval(n)).collect()
    }
}

fn cross(a: &[GrowthSymbol], b: &[GrowthSymbol]) -> Vec<GrowthSymbol> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(GrowthSymbol {
                c: x.c * y.c,
                p: x.p + y.p,
                q: x.q + y.q,
            });
        }
    }
    out
}

impl From<GrowthSymbol> for DiagSymbol {
    fn from(t: GrowthSymbol) -> Self {
        Self::from_term(t)
    }
}

impl fmt::Display for DiagSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |t: &GrowthSymbol| format!("{}*(1+n)^{}*e^({}n)", t.c, t.p, t.q);
        let num: Vec<String> = self.num.iter().map(term).collect();
        let den: Vec<String> = self.den.iter().map(term).collect();
        if self.den.len() == 1 && self.den[0] == (GrowthSymbol { c: 1.0, p: 0.0, q: 0.0 }) {
            write!(f, "{}", num.join(" + "))
        } else {
            write!(f, "({}) / ({})", num.join(" + "), den.join(" + "))
        }
    }
}

/// Decides `sup_n y_n / x_n`: `(bounded, sup when finite)`.
pub fn ratio_sup(y: &DiagSymbol, x: &DiagSymbol) -> (bool, Option<f64>) {
    let r = y.div(x);
    if r.is_unbounded() {
        (false, None)
    } else {
        let s = r.sup();
        (true, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sym(c: f64, p: f64, q: f64) -> DiagSymbol {
        DiagSymbol::from_term(GrowthSymbol::new(c, p, q).unwrap())
    }

    #[test]
    fn parse_and_display_roundtrip() {
        let g: GrowthSymbol = "2.5, 1, -0.5".parse().unwrap();
        assert_eq!(g, GrowthSymbol::new(2.5, 1.0, -0.5).unwrap());
        let again: GrowthSymbol = g.to_string().parse().unwrap();
        assert_eq!(g, again);
        assert!("1,2".parse::<GrowthSymbol>().is_err());
        assert!("0,0,0".parse::<GrowthSymbol>().is_err());
    }

    #[test]
    fn eval_matches_closed_form() {
        let g = sym(2.0, 3.0, -0.25);
        for n in [0u64, 1, 5, 40] {
            let direct = 2.0 * ((1 + n) as f64).powi(3) * (-0.25 * n as f64).exp();
            assert_relative_eq!(g.eval(n), direct, max_relative = 1e-13);
        }
    }

    #[test]
    fn sum_and_ratio_evaluate() {
        // (1 + (1+n)^2) / (1+n)
        let s = DiagSymbol::one().add(&sym(1.0, 2.0, 0.0)).div(&sym(1.0, 1.0, 0.0));
        let n = 7u64;
        let expect = (1.0 + 64.0) / 8.0;
        assert_relative_eq!(s.eval(n), expect, max_relative = 1e-13);
    }

    #[test]
    fn power_arithmetic_on_terms() {
        let g = sym(1.0, 2.0, 0.0);
        let h = g.pow(0.5).unwrap();
        assert_eq!(h.as_single_term().unwrap(), GrowthSymbol::new(1.0, 1.0, 0.0).unwrap());
        let inv = sym(2.0, 0.0, 0.0).pow(-1.0).unwrap();
        assert_relative_eq!(inv.eval(3), 0.5);
    }

    #[test]
    fn boundedness_is_lexicographic_in_q_then_p() {
        assert!(sym(5.0, -1.0, 0.0).is_bounded());
        assert!(sym(5.0, 3.0, -0.1).is_bounded()); // decaying exponential wins
        assert!(sym(0.1, -5.0, 0.1).is_unbounded()); // growing exponential wins
        assert!(sym(1.0, 0.5, 0.0).is_unbounded());
        assert!(sym(7.0, 0.0, 0.0).is_bounded());
    }

    #[test]
    fn ratio_sup_examples() {
        // sup 1/(1+n)^2 = 1 at n=0
        let (bounded, sup) = ratio_sup(&DiagSymbol::one(), &sym(1.0, 2.0, 0.0));
        assert!(bounded);
        assert_relative_eq!(sup.unwrap(), 1.0, max_relative = 1e-12);
        // sup (1+n)^2 unbounded
        let (bounded, sup) = ratio_sup(&sym(1.0, 2.0, 0.0), &DiagSymbol::one());
        assert!(!bounded);
        assert!(sup.is_none());
        // interior maximum: (1+n)^2 e^{-n} peaks at n=1
        let g = sym(1.0, 2.0, -1.0);
        let s = g.sup().unwrap();
        let expect = 4.0 * (-1.0f64).exp();
        assert_relative_eq!(s, expect, max_relative = 1e-12);
    }

    #[test]
    fn r_g_style_sum_keeps_exactness() {
        // 1 + (1+n)^2: bounded ratio against (1+n)^2 with sup 2 at n=0
        let rg = DiagSymbol::one().add(&sym(1.0, 2.0, 0.0));
        let (bounded, sup) = ratio_sup(&rg, &sym(1.0, 2.0, 0.0));
        assert!(bounded);
        assert_relative_eq!(sup.unwrap(), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn lattice_closure_under_inversion() {
        // I v G = (I + G^{-1})^{-1} stays representable and evaluates
        let g = sym(1.0, 2.0, 0.0);
        let vee = DiagSymbol::one().add(&g.inv()).inv();
        let n = 3u64;
        let gn = 16.0;
        assert_relative_eq!(vee.eval(n), 1.0 / (1.0 + 1.0 / gn), max_relative = 1e-13);
        assert!(vee.is_bounded());
        assert_relative_eq!(vee.sup().unwrap(), 1.0, max_relative = 1e-9);
    }
}
