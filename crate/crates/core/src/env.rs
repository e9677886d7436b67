//! Random numbers of stations per vertex, on the half-line and on Galton-Watson trees.
//!
//! With `N` stations of radii `R_i` at a vertex, the vertex behaves like a single station
//! with the annealed radius `R̃ = 1{N ≥ 1} max_i R_i`, whose law satisfies
//! `P(R̃ < n) = φ_N(P(R < n))`. Every criterion below is evaluated on that law, and the
//! native series are kept next to it as a cross-check.

use std::sync::Arc;

use serde::Serialize;

use crate::dist::{
    annealed_radius, Asymptote, Extended, Kahan, Law, Limit, SequenceLaw, TailClass, TailModel,
};
use crate::error::{Error, Result};
use crate::line::{fireworks_survival, fireworks_tail_class, hetero_fireworks_bound, hetero_reverse_class, reverse_survival_class};
use crate::report::{Classification, SurvivalReport};
use crate::rootfind::{smallest_fixed_point, FixedPointProblem};
use crate::tree::{reverse_product_series, TreeSpec};

/// Where the random environment lives.
#[derive(Debug, Clone, PartialEq)]
pub enum Substrate {
    Line,
    GaltonWatson(Law),
}

/// How many stations sit at the root of a Galton-Watson tree in the reverse process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootStations {
    Sampled,
    /// `min{n > 0 : P(N = n) > 0}`.
    #[default]
    MinSupport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvSpec {
    pub stations: Law,
    pub radius: Law,
    pub substrate: Substrate,
    pub root_stations: RootStations,
}

impl EnvSpec {
    pub fn line(stations: Law, radius: Law) -> Self {
        Self { stations, radius, substrate: Substrate::Line, root_stations: RootStations::default() }
    }

    pub fn gw(offspring: Law, stations: Law, radius: Law) -> Result<Self> {
        TreeSpec::GaltonWatson(offspring.clone()).validate()?;
        Ok(Self {
            stations,
            radius,
            substrate: Substrate::GaltonWatson(offspring),
            root_stations: RootStations::default(),
        })
    }

    pub fn annealed(&self) -> Law {
        annealed_radius(&self.stations, &self.radius)
    }
}

/// Smallest `n > 0` with `P(N = n) > 0`.
pub fn min_positive_support(stations: &Law) -> Result<u64> {
    let mut n = 1u64;
    loop {
        if stations.pmf(n) > 0.0 {
            return Ok(n);
        }
        if stations.tail(n + 1) == 0.0 || n > 1 << 20 {
            return Err(Error::Precondition(format!("{stations} puts no mass on positive integers")));
        }
        n += 1;
    }
}

/// `f_{R,N}(n) = n {1 − φ_N(P(R < n))}`.
pub fn f_rn(stations: &Law, radius: &Law, n: u64) -> f64 {
    n as f64 * stations.defect(radius.tail(n))
}

/// Survival criteria for homogeneous fireworks with random station counts on the half-line.
pub fn env_line_criteria(stations: &Law, radius: &Law) -> Result<SurvivalReport> {
    let annealed = annealed_radius(stations, radius);
    let mean_n = stations.mean()?;
    let l_r = radius.class().scaled_limit();
    let probe = f_rn(stations, radius, 1 << 16);

    // Limit of f_{R,N}: the scaled tail of the annealed radius.
    let mut report = match fireworks_tail_class(&annealed) {
        Ok(r) if r.classification != Classification::Inconclusive => r,
        _ => SurvivalReport::inconclusive("scaled-tail-limit"),
    };
    if report.classification == Classification::Inconclusive && !mean_n.is_infinite() {
        let m = mean_n.value();
        let r_mean = radius.class().mean_finite();
        if m == 0.0 {
            report = SurvivalReport::exact(0.0, "no-stations");
        } else if r_mean == Some(true) || radius.max_support().is_some() {
            report = SurvivalReport::exact(0.0, "finite-means");
        } else if let Limit::Finite(l) = l_r {
            if l < 1.0 / m {
                report = SurvivalReport::exact(0.0, "station-mean-scaled-tail");
            } else if l * m > 1.0 {
                // φ'_N(P(R < n)) → E(N), so the derivative criterion has limit L·E(N).
                report = SurvivalReport::new(Classification::SurvivesPosProb, "station-derivative");
            }
        } else if let Limit::Infinite = l_r {
            report = SurvivalReport::new(Classification::SurvivesPosProb, "station-derivative");
        }
    }
    Ok(report
        .detail("E_N", mean_n.value())
        .detail("f_probe", probe))
}

/// `P(V) = [1 + Σ_{j≥1} ∏_{i<j} φ_N(P(R ≤ i))]^{-1}`, evaluated on the annealed radius.
///
/// The native product is recomputed over the same number of terms and its partial sum
/// recorded as `native_partial_sum`.
pub fn env_fireworks_survival(stations: &Law, radius: &Law, tol: f64) -> SurvivalReport {
    let annealed = annealed_radius(stations, radius);
    let report = fireworks_survival(&annealed, tol);
    let Some(terms) = report.get("terms") else {
        return report;
    };
    let mut s = Kahan::default();
    let mut a = 1.0;
    for i in 0..terms as u64 {
        a *= stations.pgf_unit(radius.le(i));
        s.add(a);
    }
    report.detail("native_partial_sum", s.value())
}

/// Reverse process: `P(S) = 1` iff `W = Σ_n [1 − φ_N(P(R < n))] = ∞`, else `P(S) = 0`.
pub fn env_reverse_w(stations: &Law, radius: &Law) -> Result<SurvivalReport> {
    let annealed = annealed_radius(stations, radius);
    let report = reverse_survival_class(&annealed)?;
    let w = annealed.mean()?;
    // The n = 0 summand is 1 − P(N = 0).
    let w0 = 1.0 - stations.pmf(0);
    Ok(report.detail("W", if w.is_infinite() { f64::INFINITY } else { w0 + w.value() }))
}

/// Heterogeneous fireworks and reverse fireworks with per-vertex station laws.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvHeteroReport {
    pub fireworks: SurvivalReport,
    pub reverse: SurvivalReport,
}

/// Annealed radius sequence, when it has a finite description.
fn annealed_sequence(seq_n: &SequenceLaw, seq_r: &SequenceLaw) -> Result<SequenceLaw> {
    if let SequenceLaw::Constant(n) = seq_n {
        if *n == Law::point(1) {
            return Ok(seq_r.clone());
        }
    }
    let periodic = |s: &SequenceLaw| match s {
        SequenceLaw::Constant(l) => Some(vec![l.clone()]),
        SequenceLaw::Periodic(ls) => Some(ls.clone()),
        _ => None,
    };
    match (periodic(seq_n), periodic(seq_r)) {
        (Some(ns), Some(rs)) => {
            let p = lcm(ns.len(), rs.len());
            let laws: Vec<Law> = (0..p).map(|i| annealed_radius(&ns[i % ns.len()], &rs[i % rs.len()])).collect();
            Ok(if p == 1 {
                SequenceLaw::Constant(laws.into_iter().next().expect("one law"))
            } else {
                SequenceLaw::Periodic(laws)
            })
        }
        _ => Err(Error::Precondition(
            "annealed sequence needs N ≡ 1 or eventually periodic station and radius sequences".into(),
        )),
    }
}

fn lcm(a: usize, b: usize) -> usize {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

/// Fireworks survival is read as "P(V) > 0 whenever Σ_n ∏_{i≤n} φ_{N_i}(P(R_i < n−i+1)) < ∞";
/// the reverse process uses the divergence and product criteria on the annealed sequence.
pub fn env_hetero_criteria(seq_n: &SequenceLaw, seq_r: &SequenceLaw, tol: f64, probe_n: u64) -> Result<EnvHeteroReport> {
    let annealed = annealed_sequence(seq_n, seq_r)?;
    let fireworks = hetero_fireworks_bound(&annealed, 1, 1, tol)?
        .note("survival read from convergence of the product series");
    let reverse = hetero_reverse_class(&annealed, tol, probe_n)?;
    Ok(EnvHeteroReport { fireworks, reverse })
}

/// Which law `design_counterpart` constructs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Stations `N` making a given unbounded `R` survive.
    StationsForRadius,
    /// A radius `R` making a given `N` (with `P(N = 0) < 1`) survive.
    RadiusForStations,
}

/// `P(N ≥ m) = min(1, (1+ε)/(n*(m) δ))`, `n*(m) = min{n : ⌈x_n⌉ ≥ m}`,
/// `x_n = ln(1−δ) / ln P(R < n)`.
#[derive(Debug)]
struct DesignedStations {
    radius: Law,
    eps: f64,
    delta: f64,
    class: TailClass,
}

impl DesignedStations {
    fn x(&self, n: u64) -> f64 {
        let t = self.radius.tail(n);
        if t >= 1.0 {
            return 0.0;
        }
        (1.0 - self.delta).ln() / (-t).ln_1p()
    }

    fn n_star(&self, m: u64) -> Option<u64> {
        let mf = m as f64;
        let mut hi = 1u64;
        while self.x(hi).ceil() < mf {
            if hi > 1 << 40 || self.radius.tail(hi) == 0.0 {
                return None;
            }
            hi *= 2;
        }
        let mut lo = hi / 2;
        // x(lo) < m ≤ x(hi), with lo = 0 standing for "none below".
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.x(mid).ceil() >= mf {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }
}

impl TailModel for DesignedStations {
    fn tail(&self, m: u64) -> f64 {
        if m == 0 {
            return 1.0;
        }
        match self.n_star(m) {
            Some(n) => ((1.0 + self.eps) / (n as f64 * self.delta)).min(1.0),
            None => 0.0,
        }
    }

    fn class(&self) -> TailClass {
        self.class
    }

    fn label(&self) -> String {
        format!("stations-for({}):eps={},delta={}", self.radius, self.eps, self.delta)
    }
}

/// `P(R ≥ n) = p_n = inf{t ≥ 0 : φ_N(1 − t) ≤ 1 − 2/n}`, capped at 1.
#[derive(Debug)]
struct DesignedRadius {
    stations: Law,
    class: TailClass,
}

impl TailModel for DesignedRadius {
    fn tail(&self, n: u64) -> f64 {
        if n <= 2 {
            return 1.0;
        }
        let target = 2.0 / n as f64;
        // 1 − φ_N(1 − t) is non-decreasing in t; find where it reaches 2/n.
        if self.stations.defect(1.0) < target {
            return 1.0;
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.stations.defect(mid) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= hi * 1e-15 {
                break;
            }
        }
        hi
    }

    fn class(&self) -> TailClass {
        self.class
    }

    fn label(&self) -> String {
        format!("radius-for({})", self.stations)
    }
}

/// Builds the counterpart law from the construction that makes `P(V) > 0` and `P(S) = 1`.
///
/// With stations designed for `R`, `1 − φ_N(P(R < n)) ≥ δ P(N ≥ x_n) ≥ (1+ε)/n`, so
/// `f_{R,N}(n) ≥ 1 + ε`. With a radius designed for `N`, `f_{R,N}(n) = 2` for `n ≥ 3`.
pub fn design_counterpart(direction: Direction, given: &Law, eps: f64, delta: f64) -> Result<Law> {
    match direction {
        Direction::StationsForRadius => {
            if given.max_support().is_some() {
                return Err(Error::Precondition(format!("{given} is bounded; an unbounded radius is needed")));
            }
            if !(eps > 0.0) || !(delta > 0.0 && delta < 1.0) {
                return Err(Error::Precondition(format!("need ε > 0 and δ ∈ (0,1), got {eps}, {delta}")));
            }
            let c = (1.0 / (1.0 - delta)).ln();
            let k = (1.0 + eps) / delta;
            let class = match given.class() {
                // ln x_n ~ n ln(1/r), so n*(m) ~ ln m / ln(1/r).
                TailClass::Regular(a) if a.ratio < 1.0 => {
                    TailClass::Regular(Asymptote::new(k * (1.0 / a.ratio).ln(), 1.0, 0.0).logs(-1.0, 0.0))
                }
                // x_n ~ (c/C) n^α, so n*(m) ~ (mC/c)^{1/α}.
                TailClass::Regular(a) if a.power > 0.0 && a.log_power == 0.0 && a.loglog_power == 0.0 => {
                    TailClass::Regular(Asymptote::new(k * (c / a.coef).powf(1.0 / a.power), 1.0, 1.0 / a.power))
                }
                _ => TailClass::Unknown,
            };
            Ok(Law::custom(Arc::new(DesignedStations { radius: given.clone(), eps, delta, class })))
        }
        Direction::RadiusForStations => {
            if given.pmf(0) >= 1.0 {
                return Err(Error::Precondition("P(N = 0) = 1 leaves no stations".into()));
            }
            let mean = given.mean().ok();
            let class = match mean {
                Some(Extended::Finite { value, .. }) => TailClass::Regular(Asymptote::new(2.0 / value, 1.0, 1.0)),
                _ => match crate::dist::Defect::from_station_class(&given.class(), None) {
                    crate::dist::Defect::Regular { coef, alpha, log_power, loglog_power }
                        if alpha > 0.0 && log_power == 0.0 && loglog_power == 0.0 =>
                    {
                        TailClass::Regular(Asymptote::new((2.0 / coef).powf(1.0 / alpha), 1.0, 1.0 / alpha))
                    }
                    _ => TailClass::Unknown,
                },
            };
            Ok(Law::custom(Arc::new(DesignedRadius { stations: given.clone(), class })))
        }
    }
}

/// `Φ(t) = φ_N(P(R < 1)) + Σ_{n≥1} [φ_N(P(R < n+1)) − φ_N(P(R < n))] tⁿ`, the generating
/// function of the annealed radius.
pub fn gw_phi(stations: &Law, radius: &Law, t: f64) -> Result<Extended> {
    annealed_radius(stations, radius).pgf(t)
}

fn offspring_mean(offspring: &Law) -> Result<f64> {
    TreeSpec::GaltonWatson(offspring.clone()).validate()?;
    Ok(offspring.mean()?.value())
}

/// Fireworks on a supercritical Galton-Watson tree.
pub fn gw_fireworks_class(offspring: &Law, stations: &Law, radius: &Law) -> Result<SurvivalReport> {
    let mu = offspring_mean(offspring)?;
    let phi0 = gw_phi(stations, radius, 0.0)?.value();
    let phi_mu = gw_phi(stations, radius, mu)?;
    let mut report = if phi_mu.is_infinite() || phi_mu.value() - 1.0 > phi0 {
        let r = SurvivalReport::new(Classification::SurvivesPosProb, "gw-phi-growth");
        if stations.pmf(0) > 0.0 {
            r.note("conditional on an infinite tree and at least one station at the root")
        } else {
            r.note("on almost every infinite tree")
        }
    } else {
        SurvivalReport::inconclusive("gw-phi-growth")
    };
    if let Some(k) = offspring.max_support() {
        let phi_k = gw_phi(stations, radius, k as f64)?;
        report = report.detail("Phi_k", phi_k.value());
        if report.classification == Classification::Inconclusive && phi_k.upper() <= 2.0 - 1.0 / k as f64 + 1e-12 {
            report = SurvivalReport { criterion: "gw-bounded-degree", ..SurvivalReport::exact(0.0, "") }
                .detail("Phi_k", phi_k.value());
        }
    }
    Ok(report
        .detail("mu_D", mu)
        .detail("Phi_0", phi0)
        .detail("Phi_mu", if phi_mu.is_infinite() { f64::INFINITY } else { phi_mu.value() }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GwAnalysis {
    pub mu_d: f64,
    /// `Φ` at 0, 1 and `μ_D`.
    pub phi_at: Vec<(f64, Extended)>,
    pub phi1: Extended,
    /// Lower end of the bracket on `φ₂(μ_D)`, and the width of the bracket.
    pub phi2: f64,
    pub phi2_remainder: f64,
    /// `[limsup (1 − φ_N(P(R < n)))^{1/n}]^{-1}`; `None` when the root test is undecided.
    pub m_c: Option<f64>,
    /// Extinction probability of the tree.
    pub pi: f64,
}

/// Reverse fireworks on a supercritical Galton-Watson tree.
pub fn gw_reverse_class(offspring: &Law, stations: &Law, radius: &Law, tol: f64) -> Result<(SurvivalReport, GwAnalysis)> {
    let mu = offspring_mean(offspring)?;
    let annealed = annealed_radius(stations, radius);
    let phi1 = annealed.weighted_tail_sum(mu)?;
    let (phi2, phi2_rem) = if phi1.is_infinite() { (f64::INFINITY, 0.0) } else { reverse_product_series(&annealed, mu, tol) };
    let m_c = match annealed.class().root_limit() {
        Limit::Finite(x) if x > 0.0 => Some(1.0 / x),
        Limit::Finite(_) => Some(f64::INFINITY),
        _ => None,
    };
    let g = |s: f64| offspring.pgf_unit(s);
    let pi = smallest_fixed_point(&FixedPointProblem::new(g).tol(tol).convex())?.value;
    let phi_at = [0.0, 1.0, mu]
        .into_iter()
        .map(|t| annealed.pgf(t).map(|v| (t, v)))
        .collect::<Result<Vec<_>>>()?;

    let report = if phi1.is_infinite() {
        SurvivalReport::exact(1.0, "gw-reverse-phi1")
    } else if phi2 > 1.0 {
        let r = SurvivalReport::new(Classification::SurvivesPosProb, "gw-reverse-phi2");
        if stations.pmf(0) > 0.0 {
            r.note("P(S | tree) ∈ (0,1) for almost every infinite tree")
        } else {
            r.note("survival probability strictly below 1")
        }
    } else if phi2 + phi2_rem <= 1.0 {
        SurvivalReport::exact(0.0, "gw-reverse-phi2")
    } else {
        SurvivalReport::inconclusive("gw-reverse-phi2")
    };
    let mut report = report
        .detail("mu_D", mu)
        .detail("phi1", phi1.value())
        .detail("phi2", phi2)
        .detail("pi", pi);
    if let Some(m) = m_c {
        report = report.detail("M_c", m);
        if mu > m && report.classification != Classification::SurvivesAs {
            report = report.note(format!("μ_D = {mu} exceeds M_c = {m} but φ₁ was not shown infinite"));
        }
    }
    let analysis = GwAnalysis { mu_d: mu, phi_at, phi1, phi2, phi2_remainder: phi2_rem, m_c, pi };
    Ok((report, analysis))
}
