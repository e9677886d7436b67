//! Tree substrates, cone percolation analytics and disk percolation bounds.
//!
//! Degrees are given as numbers of children. `Homogeneous(d)` is `T_d` (every vertex has
//! `d + 1` neighbours, so the root has `d + 1` children); `RootedPlus(d)` is `T_d⁺`, where
//! the root has `d` children as well.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dist::{Extended, Law, SequenceLaw};
use crate::error::{parse_err, Error, Result};
use crate::line::reverse_final_law;
use crate::report::{Classification, SurvivalReport};
use crate::rootfind::{smallest_fixed_point, FixedPointProblem};

/// Substrate on which a tree process runs.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeSpec {
    Homogeneous(u64),
    RootedPlus(u64),
    /// Children per level; the last entry repeats forever.
    SphericallySymmetric(Vec<u64>),
    /// Level `ℓ ≥ 1` has `d[ℓ mod k]` children per vertex; the root has `d[0] + 1`.
    Periodic(Vec<u64>),
    /// Offspring law `D`, sampled lazily per vertex.
    GaltonWatson(Law),
}

impl TreeSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |why: String| Err(Error::InvalidTree(why));
        match self {
            TreeSpec::Homogeneous(d) | TreeSpec::RootedPlus(d) if *d < 2 => bad(format!("degree {d} < 2")),
            TreeSpec::Periodic(ds) if ds.is_empty() || ds.iter().any(|&d| d < 2) => {
                bad("periodic degrees must be non-empty and ≥ 2".into())
            }
            TreeSpec::SphericallySymmetric(ds) if ds.is_empty() || ds.contains(&0) => {
                bad("spherically symmetric degrees must be non-empty and ≥ 1".into())
            }
            TreeSpec::GaltonWatson(law) => {
                if law.pmf(1) >= 1.0 {
                    return bad("offspring law must have P(D = 1) < 1".into());
                }
                match law.mean() {
                    Ok(m) if m.value() > 1.0 => Ok(()),
                    Ok(m) => bad(format!("offspring mean {} ≤ 1 is not supercritical", m.value())),
                    Err(e) => bad(format!("offspring mean unavailable: {e}")),
                }
            }
            _ => Ok(()),
        }
    }

    /// Children of every vertex at `depth`; `None` for Galton-Watson trees.
    pub fn children(&self, depth: u64) -> Option<u64> {
        Some(match self {
            TreeSpec::Homogeneous(d) => d + u64::from(depth == 0),
            TreeSpec::RootedPlus(d) => *d,
            TreeSpec::SphericallySymmetric(ds) => ds[(depth as usize).min(ds.len() - 1)],
            TreeSpec::Periodic(ds) => {
                let k = ds.len() as u64;
                ds[(depth % k) as usize] + u64::from(depth == 0)
            }
            TreeSpec::GaltonWatson(_) => return None,
        })
    }

    /// Largest vertex degree (neighbours), when finite.
    pub fn max_degree(&self) -> Option<u64> {
        match self {
            TreeSpec::Homogeneous(d) => Some(d + 1),
            TreeSpec::RootedPlus(d) => Some(d + 1),
            TreeSpec::SphericallySymmetric(ds) | TreeSpec::Periodic(ds) => ds.iter().max().map(|d| d + 1),
            TreeSpec::GaltonWatson(law) => law.max_support().map(|d| d + 1),
        }
    }
}

impl fmt::Display for TreeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |ds: &[u64]| ds.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        match self {
            TreeSpec::Homogeneous(d) => write!(f, "homog:{d}"),
            TreeSpec::RootedPlus(d) => write!(f, "plus:{d}"),
            TreeSpec::SphericallySymmetric(ds) => write!(f, "sphsym:{}", join(ds)),
            TreeSpec::Periodic(ds) => write!(f, "periodic:{}", join(ds)),
            TreeSpec::GaltonWatson(law) => write!(f, "gw:offspring={law}"),
        }
    }
}

fn parse_list(literal: &str, body: &str) -> Result<Vec<u64>> {
    body.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| parse_err(literal, format!("`{s}` is not a non-negative integer"))))
        .collect()
}

impl FromStr for TreeSpec {
    type Err = Error;

    /// `homog:d`, `plus:d`, `periodic:d1,d2,…`, `sphsym:d1,d2,…`, `sphsym:file=PATH`
    /// (whitespace- or comma-separated), `gw:offspring=LAW`.
    fn from_str(literal: &str) -> Result<Self> {
        let s = literal.trim();
        let (tag, body) = s.split_once(':').ok_or_else(|| parse_err(literal, "expected kind:parameters"))?;
        let one = |b: &str| b.trim().parse::<u64>().map_err(|_| parse_err(literal, "expected an integer degree"));
        let spec = match tag {
            "homog" => TreeSpec::Homogeneous(one(body)?),
            "plus" => TreeSpec::RootedPlus(one(body)?),
            "periodic" => TreeSpec::Periodic(parse_list(literal, body)?),
            "sphsym" => {
                if let Some(path) = body.strip_prefix("file=") {
                    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
                    TreeSpec::SphericallySymmetric(parse_list(literal, &text)?)
                } else {
                    TreeSpec::SphericallySymmetric(parse_list(literal, body)?)
                }
            }
            "gw" => {
                let law = body
                    .strip_prefix("offspring=")
                    .ok_or_else(|| parse_err(literal, "expected gw:offspring=LAW"))?;
                TreeSpec::GaltonWatson(law.parse()?)
            }
            other => return Err(parse_err(literal, format!("unknown tree kind `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// `lim_n min_v (1/n) ln M_n(v)`: exact for homogeneous and periodic trees, the depth-`n`
/// minimum for spherically symmetric ones.
pub fn growth_dim(spec: &TreeSpec, n: u64) -> Result<f64> {
    let n = n.max(1);
    match spec {
        TreeSpec::Homogeneous(d) | TreeSpec::RootedPlus(d) => Ok((*d as f64).ln()),
        TreeSpec::Periodic(ds) => Ok(ds.iter().map(|&d| (d as f64).ln()).sum::<f64>() / ds.len() as f64),
        TreeSpec::SphericallySymmetric(ds) => {
            // Windows starting at or beyond the last listed level all coincide.
            let level = |i: u64| (ds[(i as usize).min(ds.len() - 1)] as f64).ln();
            let mut best = f64::INFINITY;
            for start in 1..=ds.len() as u64 {
                let s: f64 = (start..start + n).map(level).sum();
                best = best.min(s / n as f64);
            }
            Ok(best)
        }
        TreeSpec::GaltonWatson(_) => Err(Error::Precondition(
            "growth dimension of a Galton-Watson tree is random; use the offspring mean".into(),
        )),
    }
}

/// `E(x^{e(R)})` for a non-decreasing integer exponent `e`, with the tail beyond the cut-off
/// bounded by `P(R > K) x^{e(K+1)}`.
fn power_expectation(law: &Law, x: f64, exponent: impl Fn(u64) -> f64, tol: f64) -> f64 {
    if x >= 1.0 {
        return 1.0;
    }
    let max = law.max_support();
    let mut s = crate::dist::Kahan::default();
    let mut k = 0u64;
    loop {
        let e = exponent(k);
        let w = if e == 0.0 { 1.0 } else { x.powf(e) };
        s.add(law.pmf(k) * w);
        if max.is_some_and(|m| k >= m) {
            break;
        }
        let rem = law.tail(k + 1) * x.powf(exponent(k + 1));
        if rem < tol * 0.1 || k > 50_000_000 {
            break;
        }
        k += 1;
    }
    s.value()
}

fn check_d(d: u64) -> Result<()> {
    if d < 2 {
        return Err(Error::Precondition(format!("tree degree d = {d} must be ≥ 2")));
    }
    Ok(())
}

/// `k ↦ d^k`.
fn d_pow(d: u64) -> impl Fn(u64) -> f64 {
    move |k| (d as f64).powf(k as f64)
}

/// `k ↦ (d/(d−1))(d^k − 1) = d + d² + … + d^k`.
fn d_geom(d: u64, scale_num: f64) -> impl Fn(u64) -> f64 {
    move |k| {
        let df = d as f64;
        scale_num * (df.powf(k as f64) - 1.0) / (df - 1.0)
    }
}

/// Survival verdict on `T_d⁺` from `p₀ = P(R = 0)` and `E(d^R)`.
pub fn cone_regime(d: u64, law: &Law) -> Result<Classification> {
    check_d(d)?;
    let p0 = law.pmf(0);
    let df = d as f64;
    if (1.0 - p0) * df > 1.0 {
        return Ok(Classification::SurvivesPosProb);
    }
    let e = law.power_mean(d)?;
    if e.value() > 1.0 + p0 {
        return Ok(Classification::SurvivesPosProb);
    }
    if e.upper() <= 2.0 - 1.0 / df + 1e-12 {
        return Ok(Classification::DiesAs);
    }
    Ok(Classification::Inconclusive)
}

/// Smallest roots `ρ` of `E(ρ^{d^R}) + (1 − ρ)p₀ = ρ` and `ψ` of
/// `E(ψ^{(d/(d−1))(d^R − 1)}) = ψ`.
pub fn cone_fixed_points(d: u64, law: &Law, tol: f64) -> Result<(f64, f64)> {
    check_d(d)?;
    let p0 = law.pmf(0);
    let inner = tol * 1e-2;
    let g = |x: f64| (power_expectation(law, x, d_pow(d), inner) + (1.0 - x) * p0).min(1.0);
    let h = |x: f64| power_expectation(law, x, d_geom(d, d as f64), inner).min(1.0);
    let rho = smallest_fixed_point(&FixedPointProblem::new(g).tol(tol).convex())?;
    let psi = smallest_fixed_point(&FixedPointProblem::new(h).tol(tol).convex())?;
    Ok((rho.value, psi.value))
}

/// Which cone substrate the survival bounds refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeWhere {
    Plus,
    Full,
}

impl FromStr for ConeWhere {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" => Ok(ConeWhere::Plus),
            "full" => Ok(ConeWhere::Full),
            _ => Err(parse_err(s, "expected plus or full")),
        }
    }
}

/// Bounds on `P(V)` for cone percolation on `T_d⁺` (plus) or `T_d` (full).
pub fn cone_survival_bounds(d: u64, law: &Law, at: ConeWhere, tol: f64) -> Result<(f64, f64)> {
    let (rho, psi) = cone_fixed_points(d, law, tol)?;
    Ok(survival_from_roots(d, law, at, rho, psi, tol))
}

fn survival_from_roots(d: u64, law: &Law, at: ConeWhere, rho: f64, psi: f64, tol: f64) -> (f64, f64) {
    match at {
        ConeWhere::Plus => (1.0 - rho, 1.0 - psi),
        ConeWhere::Full => {
            let df = d as f64;
            let p0 = law.pmf(0);
            let a = (df + 1.0) / df;
            let low = 1.0 - (1.0 - rho.powf(a)) * p0 - power_expectation(law, rho, move |k| a * df.powf(k as f64), tol * 1e-2);
            let high = 1.0 - power_expectation(law, psi, d_geom(d, df + 1.0), tol * 1e-2);
            (low.clamp(0.0, 1.0), high.clamp(0.0, 1.0))
        }
    }
}

/// Bounds on the expected size `E|I|` of the informed set on `T_d`, valid when
/// `E(d^R) < 2 − 1/d`.
pub fn cone_size_bounds(d: u64, law: &Law) -> Result<(f64, f64)> {
    check_d(d)?;
    let df = d as f64;
    let e = law.power_mean(d)?;
    if e.upper() >= 2.0 - 1.0 / df {
        return Err(Error::Regime(format!(
            "E({d}^R) = {} is not below 2 − 1/d = {}",
            e.value(),
            2.0 - 1.0 / df
        )));
    }
    let (e_lo, e_hi) = (e.value(), e.upper());
    let p0 = law.pmf(0);
    // Both bounds increase with E(d^R).
    let low = (df + e_lo - p0) / (df * (1.0 - e_lo + p0));
    let high = (e_hi + df - 2.0) / (2.0 * df - 1.0 - df * e_hi);
    Ok((low, high))
}

/// Everything the cone analytics compute for one `(d, R)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeAnalysis {
    pub p0: f64,
    pub e_d_r: Extended,
    pub rho: f64,
    pub psi: f64,
    pub surv_low: f64,
    pub surv_high: f64,
    /// `None` outside the regime `E(d^R) < 2 − 1/d`.
    pub size_low: Option<f64>,
    pub size_high: Option<f64>,
    pub regime: Classification,
}

pub fn cone_analysis(d: u64, law: &Law, at: ConeWhere, tol: f64) -> Result<ConeAnalysis> {
    check_d(d)?;
    let (rho, psi) = cone_fixed_points(d, law, tol)?;
    let (surv_low, surv_high) = survival_from_roots(d, law, at, rho, psi, tol);
    let size = cone_size_bounds(d, law).ok();
    Ok(ConeAnalysis {
        p0: law.pmf(0),
        e_d_r: law.power_mean(d)?,
        rho,
        psi,
        surv_low,
        surv_high,
        size_low: size.map(|s| s.0),
        size_high: size.map(|s| s.1),
        regime: cone_regime(d, law)?,
    })
}

/// Reverse process on `T_d`: `P(S) = 1` iff `Σ dⁿ P(R ≥ n) = ∞`, and `P(S) = 0` iff
/// `Σ dⁿ P(R ≥ n) ∏_{j<n} (1 − P(R ≥ j)) ≤ 1`.
pub fn reverse_cone_class(d: u64, law: &Law, tol: f64) -> Result<SurvivalReport> {
    check_d(d)?;
    let df = d as f64;
    let first = law.weighted_tail_sum(df)?;
    if first.is_infinite() {
        return Ok(SurvivalReport::exact(1.0, "tree-reverse-series"));
    }
    let (lo, rem) = reverse_product_series(law, df, tol);
    let hi = lo + rem;
    let report = if hi <= 1.0 {
        SurvivalReport::exact(0.0, "tree-reverse-product-series")
    } else if lo > 1.0 {
        SurvivalReport::new(Classification::SurvivesPosProb, "tree-reverse-product-series")
    } else {
        SurvivalReport::inconclusive("tree-reverse-product-series")
    };
    Ok(SurvivalReport { remainder_bound: rem, ..report }
        .detail("series", first.value())
        .detail("product_series", lo))
}

/// `Σ_{n≥1} tⁿ P(R ≥ n) ∏_{1≤j<n} (1 − P(R ≥ j))` with a bound on the neglected tail.
///
/// Terms are at most `tⁿ P(R ≥ n)`, so the majorant's remainder for that series applies.
pub(crate) fn reverse_product_series(law: &Law, t: f64, tol: f64) -> (f64, f64) {
    let maj = law.majorant();
    let max = law.max_support();
    let mut s = crate::dist::Kahan::default();
    let mut prod = 1.0;
    let mut w = 1.0;
    let mut rem = f64::INFINITY;
    let mut n = 1u64;
    loop {
        if max.is_some_and(|m| n > m) {
            rem = 0.0;
            break;
        }
        if n >= 2 {
            prod *= 1.0 - law.tail(n - 1);
        }
        w *= t;
        s.add(w * law.tail(n) * prod);
        if n.is_multiple_of(8) {
            if let Some(r) = maj.as_ref().and_then(|m| m.remainder(t, n)) {
                rem = r;
                if r < tol {
                    break;
                }
            }
        }
        if n > 1 << 22 {
            break;
        }
        n += 1;
    }
    (s.value(), rem)
}

/// `d^n ∏_{k<n} [1 − ∏_{i≤k} P(R_{jn+i} < k+1−i)]` for block `j`.
fn block_expression(d: u64, n: u64, below: &dyn Fn(u64, u64) -> f64, j: u64) -> f64 {
    let mut prod = 1.0;
    for k in 0..n {
        let mut inner = 1.0;
        for i in 0..=k {
            inner *= below(j * n + i, k + 1 - i);
        }
        prod *= 1.0 - inner;
    }
    (d as f64).powf(n as f64) * prod
}

/// Giant-component criterion for heterogeneous cone percolation on `T_d⁺`.
pub fn hetero_cone_check(seq: &SequenceLaw, d: u64, n: u64, j_probe: u64) -> Result<SurvivalReport> {
    check_d(d)?;
    if n == 0 {
        return Err(Error::Precondition("block length n must be ≥ 1".into()));
    }
    let below = |m: u64, x: u64| seq.below(m, x);
    let probe_min = (0..=j_probe)
        .map(|j| block_expression(d, n, &below, j))
        .fold(f64::INFINITY, f64::min);
    // The liminf is exact when the block values are eventually periodic or monotone.
    let liminf = match seq {
        SequenceLaw::Constant(_) | SequenceLaw::Periodic(_) => {
            let p = seq.period();
            let blocks = p / gcd(p, n);
            Some((0..blocks).map(|j| block_expression(d, n, &below, j)).fold(f64::INFINITY, f64::min))
        }
        SequenceLaw::DefectiveRelay(_) => {
            // P(R_m < 1) = b_m decreases, so block values increase to the point-mass limit.
            let limit = Law::point(1);
            Some(block_expression(d, n, &|_, x| 1.0 - limit.tail(x), 0))
        }
        _ => None,
    };
    let report = match liminf {
        Some(l) if l > 1.0 => SurvivalReport::new(Classification::SurvivesPosProb, "block-product"),
        _ => SurvivalReport::inconclusive("block-product"),
    };
    let mut report = report.detail("probe_min", probe_min);
    if let Some(l) = liminf {
        report = report.detail("liminf", l);
    }
    Ok(report)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `ρ_n = ∏_{k<n} [1 − ∏_{i≤k} P(R < i+1)]` compared with `e^{−dim}` on spherically
/// symmetric trees.
///
/// `ρ_n^{1/n} → 1 − ∏_{k≥0} P(R ≤ k)`, which is 1 when `E(R) = ∞` and is computed as an
/// Euler product with a certified bracket otherwise.
pub fn spherical_survival_check(spec: &TreeSpec, law: &Law, depth: u64) -> Result<SurvivalReport> {
    if matches!(spec, TreeSpec::GaltonWatson(_)) {
        return Err(Error::Precondition("spherical check needs a deterministic tree".into()));
    }
    let depth = depth.max(2);
    let dim = growth_dim(spec, depth)?;
    let dim_half = growth_dim(spec, depth / 2)?;
    let dim_err = match spec {
        TreeSpec::SphericallySymmetric(_) => (dim - dim_half).abs(),
        _ => 0.0,
    };
    let mut a = 1.0;
    let mut ln_rho = 0.0;
    for k in 0..depth {
        a *= law.le(k);
        ln_rho += (-a).ln_1p();
    }
    let root_trend = (ln_rho / depth as f64).exp();
    // Bracket on 1 − ∏_k P(R ≤ k).
    let (lim_lo, lim_hi) = if law.tail(1) >= 1.0 {
        (1.0, 1.0)
    } else if let Some(max) = law.max_support() {
        let p: f64 = (0..max).map(|k| law.le(k)).product();
        (1.0 - p, 1.0 - p)
    } else {
        match law.class().mean_finite() {
            Some(false) => (1.0, 1.0),
            Some(true) => {
                let g = reverse_final_law(law, 1e-12)?;
                (1.0 - g.high, 1.0 - g.low)
            }
            None => return Err(Error::Unclassifiable(format!("cannot decide whether E(R) < ∞ for {law}"))),
        }
    };
    let threshold = (-(dim - dim_err)).exp();
    let mut report = if lim_lo > threshold && dim - dim_err > 0.0 {
        SurvivalReport::new(Classification::SurvivesPosProb, "spherical-root-test")
    } else {
        SurvivalReport::inconclusive("spherical-root-test")
    };
    if let Some(max) = law.max_support() {
        // Bounded radii: dim > ln[1 / (1 − ∏_{j=1}^{k} P(R < j))].
        let p: f64 = (1..=max).map(|j| law.le(j - 1)).product();
        let t = (1.0 / (1.0 - p)).ln();
        report = report.detail("bounded_threshold", t);
        if report.classification == Classification::SurvivesPosProb {
            report.criterion = "bounded-radius-dimension";
        }
    }
    Ok(report
        .detail("dim", dim)
        .detail("dim_error", dim_err)
        .detail("rho_root", root_trend)
        .detail("root_limit_low", lim_lo)
        .detail("root_limit_high", lim_hi)
        .detail("exp_minus_dim", threshold))
}

/// What is known about the substrate of a disk percolation question.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiskInput {
    /// Any graph with maximum degree `Δ`.
    MaxDegree { delta: u64 },
    /// The homogeneous tree `T_d`.
    Homogeneous { d: u64 },
    /// A spherically symmetric tree with the given growth dimension.
    Spherical { dim: f64, max_degree: Option<u64> },
    /// A graph with known site-percolation threshold.
    SiteThreshold { pc_site: f64, max_degree: Option<u64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiskSource {
    BoundedDegree,
    HomogeneousTree,
    SphericalTree,
    SiteComparison,
}

/// Bounds on the critical parameter `p_c` of disk percolation with `Geom(1 − p)` radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiskBounds {
    pub lower: f64,
    pub upper: f64,
    pub source: DiskSource,
    /// The lower bound printed for homogeneous trees, `−1 + (1 − 1/d)^{1/2}`. It is
    /// negative, so `lower` uses the bounded-degree form with `Δ = d + 1` instead.
    pub printed_lower: Option<f64>,
}

fn bounded_degree_lower(delta: u64) -> f64 {
    if delta < 2 {
        return 1.0;
    }
    -1.0 + (1.0 + 1.0 / (delta as f64 - 1.0)).sqrt()
}

pub fn disk_bounds(input: &DiskInput) -> Result<DiskBounds> {
    let lower_for = |delta: Option<u64>| delta.map_or(0.0, bounded_degree_lower);
    Ok(match *input {
        DiskInput::MaxDegree { delta } => {
            if delta < 2 {
                return Err(Error::Precondition(format!("maximum degree {delta} < 2")));
            }
            DiskBounds {
                lower: bounded_degree_lower(delta),
                upper: 1.0,
                source: DiskSource::BoundedDegree,
                printed_lower: None,
            }
        }
        DiskInput::Homogeneous { d } => {
            check_d(d)?;
            let s = (1.0 - 1.0 / d as f64).sqrt();
            DiskBounds {
                lower: bounded_degree_lower(d + 1),
                upper: 1.0 - s,
                source: DiskSource::HomogeneousTree,
                printed_lower: Some(-1.0 + s),
            }
        }
        DiskInput::Spherical { dim, max_degree } => {
            if !(dim >= 0.0) {
                return Err(Error::Precondition(format!("growth dimension {dim} < 0")));
            }
            DiskBounds {
                lower: lower_for(max_degree),
                upper: 1.0 - (1.0 - (-dim).exp()).sqrt(),
                source: DiskSource::SphericalTree,
                printed_lower: None,
            }
        }
        DiskInput::SiteThreshold { pc_site, max_degree } => {
            if !(0.0..=1.0).contains(&pc_site) {
                return Err(Error::Precondition(format!("site threshold {pc_site} outside [0, 1]")));
            }
            DiskBounds {
                lower: lower_for(max_degree),
                upper: pc_site,
                source: DiskSource::SiteComparison,
                printed_lower: None,
            }
        }
    })
}

/// Bracket on `P(some vertex at depth H is informed)` for cone percolation: the
/// survived-to-horizon probability that a simulation with horizon `H` estimates.
///
/// With `c(v) = max(c(parent) − 1, R_v)`, a vertex with carry `c ≥ 1` at depth `t` informs all
/// its children, so `F_t(c) = 1 − φ_t(1 − E F_{t+1}(max(c − 1, R)))` with `φ_t` the pgf of the
/// number of children at depth `t`. Carries above a cut where `P(R > cut) < tol` are lumped
/// and given the values 0 and 1 for the two ends of the bracket.
pub fn cone_reach_probability(spec: &TreeSpec, law: &Law, horizon: u64, tol: f64) -> Result<(f64, f64)> {
    spec.validate()?;
    let cut = match law.max_support() {
        Some(m) if m <= 4096 => m as usize,
        _ => (1..=4096u64).find(|&k| law.tail(k + 1) < tol).unwrap_or(4096) as usize,
    };
    let pmf: Vec<f64> = (0..=cut as u64).map(|k| law.pmf(k)).collect();
    let lump = law.tail(cut as u64 + 1);
    let children = |depth: u64, x: f64| -> f64 {
        match spec {
            TreeSpec::GaltonWatson(d) => 1.0 - d.pgf_unit(1.0 - x),
            s => 1.0 - (1.0 - x).powi(s.children(depth).expect("deterministic tree") as i32),
        }
    };
    let run = |big: f64| {
        // f[c] for c = 0..=cut; the lumped carries are worth `big`.
        let mut f = vec![1.0; cut + 1];
        for t in (0..horizon).rev() {
            // E F(max(c − 1, R)) = P(R ≤ c−1)·F(c−1) + Σ_{r ≥ c} pmf(r)·F(r).
            let mut above = lump * big;
            let mut next = vec![0.0; cut + 1];
            let mut below = pmf.iter().sum::<f64>();
            for c in (1..=cut).rev() {
                above += pmf[c] * f[c];
                below -= pmf[c];
                next[c] = children(t, below * f[c - 1] + above);
            }
            f = next;
        }
        let root: f64 = pmf.iter().zip(&f).map(|(p, v)| p * v).sum();
        root + lump * big
    };
    Ok((run(0.0), run(1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{Decay, TailForm};
    use crate::rootfind::first_root_by_bisection;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    fn binom() -> Law {
        Law::binomial(4, 0.5).unwrap()
    }

    #[test]
    fn printed_fixed_points() {
        let (rho, psi) = cone_fixed_points(2, &binom(), TOL).unwrap();
        assert!((rho - 0.0635146).abs() < 5e-7, "{rho}");
        assert!((psi - 0.06350850).abs() < 5e-7, "{psi}");
        // The printed polynomials, independent of the expectation code.
        let prho = |x: f64| x.powi(16) + 4.0 * x.powi(8) + 6.0 * x.powi(4) + 4.0 * x.powi(2) - 16.0 * x + 1.0;
        let ppsi = |x: f64| x.powi(30) + 4.0 * x.powi(14) + 6.0 * x.powi(6) + 4.0 * x.powi(2) - 16.0 * x + 1.0;
        assert!(prho(rho).abs() < 1e-10);
        assert!(ppsi(psi).abs() < 1e-10);
    }

    #[test]
    fn roots_are_minimal() {
        for law in [binom(), Law::geometric(0.3).unwrap(), Law::bernoulli(0.8).unwrap()] {
            for d in [2u64, 3] {
                let (rho, _) = cone_fixed_points(d, &law, TOL).unwrap();
                let p0 = law.pmf(0);
                let g = |x: f64| power_expectation(&law, x, d_pow(d), 1e-15) + (1.0 - x) * p0;
                assert!((g(rho) - rho).abs() < 1e-11);
                let first = first_root_by_bisection(g, rho + 1e-12, 20_000).unwrap();
                assert!(first >= rho - 1e-10, "{law} d={d}: {first} < {rho}");
            }
        }
    }

    #[test]
    fn printed_full_tree_bounds() {
        let (lo, hi) = cone_survival_bounds(2, &binom(), ConeWhere::Full, TOL).unwrap();
        assert!((lo - 0.937435919).abs() < 1e-8, "{lo}");
        assert!((hi - 0.937435962).abs() < 1e-8, "{hi}");
    }

    #[test]
    fn degenerate_radius() {
        let z = Law::point(0);
        assert_eq!(cone_fixed_points(2, &z, TOL).unwrap(), (1.0, 1.0));
        assert_eq!(cone_survival_bounds(2, &z, ConeWhere::Plus, TOL).unwrap(), (0.0, 0.0));
        assert_eq!(cone_size_bounds(3, &z).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn tangent_root_at_one() {
        let (rho, _) = cone_fixed_points(2, &Law::bernoulli(0.5).unwrap(), TOL).unwrap();
        assert!((rho - 1.0).abs() < 5e-8, "{rho}");
    }

    #[test]
    fn regimes() {
        assert_eq!(cone_regime(2, &binom()).unwrap(), Classification::SurvivesPosProb);
        assert_eq!(cone_regime(2, &Law::bernoulli(0.5).unwrap()).unwrap(), Classification::DiesAs);
        assert_eq!(cone_regime(3, &Law::bernoulli(0.5).unwrap()).unwrap(), Classification::SurvivesPosProb);
    }

    #[test]
    fn printed_size_bounds() {
        let p = 1e-6;
        let (lo, hi) = cone_size_bounds(499_000, &Law::geometric(p).unwrap()).unwrap();
        assert!((lo - 250.438).abs() < 1e-3, "{lo}");
        assert!((hi - 250.501).abs() < 1e-3, "{hi}");
        let (lo, hi) = cone_size_bounds(4, &Law::geometric(0.1).unwrap()).unwrap();
        assert!((lo - 2.875).abs() < 1e-12 && (hi - 3.5).abs() < 1e-12);
        assert!(cone_size_bounds(2, &binom()).is_err());
    }

    #[test]
    fn reverse_cone() {
        let r = reverse_cone_class(2, &Law::geometric(0.5).unwrap(), TOL).unwrap();
        assert_eq!(r.classification, Classification::SurvivesAs);
        assert_eq!(reverse_cone_class(2, &Law::point(0), TOL).unwrap().classification, Classification::DiesAs);
        let quarter = Law::tail_defined(TailForm::geometric(0.5, 0.25)).unwrap();
        let r = reverse_cone_class(2, &quarter, TOL).unwrap();
        assert_eq!(r.classification, Classification::DiesAs);
        assert!(r.get("product_series").unwrap() <= 0.5);
    }

    #[test]
    fn growth_dimensions() {
        for n in [1, 5, 50] {
            assert_eq!(growth_dim(&TreeSpec::Homogeneous(3), n).unwrap(), 3f64.ln());
        }
        let p = growth_dim(&TreeSpec::Periodic(vec![2, 3]), 10).unwrap();
        assert!((p - (2f64.ln() + 3f64.ln()) / 2.0).abs() < 1e-15);
        assert_eq!(growth_dim(&TreeSpec::SphericallySymmetric(vec![1]), 10).unwrap(), 0.0);
        // A wide prefix does not lift the minimum above the repeated tail.
        let s = TreeSpec::SphericallySymmetric(vec![5, 5, 2]);
        assert!((growth_dim(&s, 100).unwrap() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn disk() {
        let b = disk_bounds(&DiskInput::MaxDegree { delta: 3 }).unwrap();
        assert!((b.lower - 0.224745).abs() < 1e-6);
        let b = disk_bounds(&DiskInput::Homogeneous { d: 2 }).unwrap();
        assert!((b.upper - 0.292893).abs() < 1e-6);
        assert!(b.printed_lower.unwrap() < 0.0);
        assert!((b.lower - 0.224745).abs() < 1e-6);
        let b = disk_bounds(&DiskInput::Spherical { dim: 2f64.ln(), max_degree: None }).unwrap();
        assert!((b.upper - 0.292893).abs() < 1e-6);
        assert_eq!(disk_bounds(&DiskInput::SiteThreshold { pc_site: 0.5, max_degree: Some(3) }).unwrap().upper, 0.5);
    }

    #[test]
    fn disk_upper_tracks_one_over_two_d() {
        let gap = |d: u64| disk_bounds(&DiskInput::Homogeneous { d }).unwrap().upper - 1.0 / (2.0 * d as f64);
        let c = gap(10).abs() * 100.0;
        for d in [100u64, 1000] {
            assert!(gap(d).abs() <= c / (d * d) as f64 * (1.0 + 1e-9), "d={d}");
        }
    }

    #[test]
    fn spherical_bernoulli_periodic() {
        let law = Law::bernoulli(0.6).unwrap();
        // (2·3)^{1/2} ≈ 2.449 > 1/0.6.
        let r = spherical_survival_check(&TreeSpec::Periodic(vec![2, 3]), &law, 200).unwrap();
        assert_eq!(r.classification, Classification::SurvivesPosProb);
        let t = r.get("bounded_threshold").unwrap();
        assert!((t - (1.0f64 / 0.6).ln()).abs() < 1e-12);
        // A path never satisfies the strict inequality.
        let r = spherical_survival_check(&TreeSpec::SphericallySymmetric(vec![1]), &law, 200).unwrap();
        assert_eq!(r.classification, Classification::Inconclusive);
        let r = spherical_survival_check(&TreeSpec::Periodic(vec![2, 3]), &Law::point(1), 50).unwrap();
        assert_eq!(r.classification, Classification::SurvivesPosProb);
    }

    #[test]
    fn hetero_cone() {
        let q = 0.7;
        let seq = SequenceLaw::Constant(Law::bernoulli(q).unwrap());
        let r = hetero_cone_check(&seq, 2, 1, 10).unwrap();
        assert!((r.get("liminf").unwrap() - 2.0 * q).abs() < 1e-15);
        assert_eq!(r.classification, Classification::SurvivesPosProb);
        let r = hetero_cone_check(&SequenceLaw::Constant(Law::point(3)), 2, 3, 10).unwrap();
        assert_eq!(r.get("liminf"), Some(8.0));
        let alt = SequenceLaw::Periodic(vec![Law::bernoulli(0.3).unwrap(), Law::bernoulli(0.9).unwrap()]);
        let r = hetero_cone_check(&alt, 2, 2, 1000).unwrap();
        assert!(r.get("probe_min").unwrap() > 0.0);
        assert!((r.get("probe_min").unwrap() - r.get("liminf").unwrap()).abs() < 1e-15);
        let relay = SequenceLaw::relay(Decay::Geometric { scale: 0.5, ratio: 0.5 }).unwrap();
        assert_eq!(hetero_cone_check(&relay, 2, 1, 10).unwrap().classification, Classification::SurvivesPosProb);
    }

    #[test]
    fn tree_literals() {
        for s in ["homog:2", "plus:3", "periodic:2,3", "sphsym:1,2,3", "gw:offspring=binom:3:0.5"] {
            let t: TreeSpec = s.parse().unwrap();
            assert_eq!(t.to_string(), s);
        }
        assert!("homog:1".parse::<TreeSpec>().is_err());
        assert!("periodic:2,1".parse::<TreeSpec>().is_err());
        assert!("gw:offspring=point:1".parse::<TreeSpec>().is_err());
        assert!("gw:offspring=bernoulli:0.5".parse::<TreeSpec>().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn bounds_are_ordered(p in 0.01f64..0.6, d in 2u64..5) {
            let law = Law::geometric(p).unwrap();
            for at in [ConeWhere::Plus, ConeWhere::Full] {
                let (lo, hi) = cone_survival_bounds(d, &law, at, 1e-12).unwrap();
                prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
                prop_assert!(lo <= hi + 1e-9, "{lo} > {hi}");
            }
        }

        #[test]
        fn size_bounds_at_least_one(p in 0.001f64..0.2, d in 2u64..6) {
            let law = Law::geometric(p).unwrap();
            if let Ok((lo, hi)) = cone_size_bounds(d, &law) {
                prop_assert!(lo >= 1.0 - 1e-12 && lo <= hi + 1e-12);
            }
        }

        #[test]
        fn periodic_growth_equals_mean_log(ds in proptest::collection::vec(2u64..9, 1..6), n in 1u64..40) {
            let g = growth_dim(&TreeSpec::Periodic(ds.clone()), n).unwrap();
            let want = ds.iter().map(|&d| (d as f64).ln()).sum::<f64>() / ds.len() as f64;
            prop_assert!((g - want).abs() < 1e-12);
        }
    }

    #[test]
    fn cone_reach_brackets_survival() {
        let law = Law::binomial(4, 0.5).unwrap();
        let (lo, hi) = cone_survival_bounds(2, &law, ConeWhere::Full, 1e-13).unwrap();
        let spec = TreeSpec::Homogeneous(2);
        let mut last = 1.0;
        for h in [1u64, 5, 20, 60, 200] {
            let (a, b) = cone_reach_probability(&spec, &law, h, 1e-15).unwrap();
            assert_eq!(a, b);
            assert!(a <= last + 1e-15 && a >= lo - 1e-12, "{h}: {a}");
            last = a;
        }
        assert!(last <= hi + 1e-9, "{last} vs {hi}");
        // Depth 1: the root informs its children iff R_root ≥ 1.
        let (a, _) = cone_reach_probability(&spec, &law, 1, 0.0).unwrap();
        assert!((a - law.tail(1)).abs() < 1e-15);
    }

    #[test]
    fn cone_reach_on_gw_matches_fixed_degree() {
        let law = Law::geometric(0.4).unwrap();
        let gw = TreeSpec::GaltonWatson(Law::point(3));
        let plus = TreeSpec::RootedPlus(3);
        let (a, b) = cone_reach_probability(&gw, &law, 30, 1e-14).unwrap();
        let (c, d) = cone_reach_probability(&plus, &law, 30, 1e-14).unwrap();
        assert!((a - c).abs() < 1e-12 && (b - d).abs() < 1e-12);
        assert!(b - a < 1e-11);
    }
}
