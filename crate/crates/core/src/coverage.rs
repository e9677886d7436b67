//! Coverage processes: Markov-chain-driven intervals on ℕ and the Poisson Boolean model on
//! the positive orthant.

use rand::Rng;
use serde::Serialize;

use crate::dist::{Asymptote, Law, Limit, TailClass, TailForm};
use crate::error::{Error, Result};

/// Verdict on eventual coverage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageClass {
    CoversAs,
    NeverCovers,
    Inconclusive,
}

impl CoverageClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            CoverageClass::CoversAs => "covers_as",
            CoverageClass::NeverCovers => "never_covers",
            CoverageClass::Inconclusive => "inconclusive",
        }
    }
}

impl std::fmt::Display for CoverageClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `X` is a `{0,1}` Markov chain with `P(0→1) = p01`, `P(1→0) = p10`; site `i` with
/// `X_i = 1` covers `[i, i + ρ_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovCoverageConfig {
    pub p01: f64,
    pub p10: f64,
    pub rho: Law,
    pub horizon: u64,
}

impl MarkovCoverageConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p01", self.p01), ("p10", self.p10)] {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::Precondition(format!("{name} = {p} must lie in (0, 1)")));
            }
        }
        Ok(())
    }

    /// Stationary probability of state 1.
    pub fn pi1(&self) -> f64 {
        self.p01 / (self.p10 + self.p01)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageCriteria {
    pub class: CoverageClass,
    pub criterion: &'static str,
    /// `liminf x P(ρ > x)` and `limsup x P(ρ > x)`; `+∞` when infinite.
    pub l: f64,
    pub big_l: f64,
    /// Stationary frequency of covering sites (Markov model only).
    pub pi1: Option<f64>,
    /// Bracket on the critical intensity (Boolean model, `d = 1`).
    pub lambda_bracket: Option<(f64, f64)>,
    /// `E(ρ^d) = ∞`, which gives full coverage of the whole space.
    pub full_space_coverage: Option<bool>,
    /// The verdict contradicts the printed statement for tails with `x P(ρ > x) → 0`.
    pub printed_item_unreliable: bool,
}

fn scaled_limits(class: &TailClass) -> Result<(f64, f64)> {
    match class.scaled_limit() {
        Limit::Finite(l) => Ok((l, l)),
        Limit::Infinite => Ok((f64::INFINITY, f64::INFINITY)),
        Limit::Unknown => Err(Error::Unclassifiable("x·P(ρ > x) has no computable limit".into())),
    }
}

pub fn markov_coverage_criteria(cfg: &MarkovCoverageConfig) -> Result<CoverageCriteria> {
    cfg.validate()?;
    // j P(ρ > j) and j P(ρ ≥ j) share their limits.
    let (l, big_l) = scaled_limits(&cfg.rho.class())?;
    let pi1 = cfg.pi1();
    let (class, criterion) = if l > 1.0 && pi1 > 1.0 / l {
        (CoverageClass::CoversAs, "markov-liminf")
    } else if big_l.is_finite() && pi1 < 1.0 / big_l {
        (CoverageClass::NeverCovers, "markov-limsup")
    } else {
        (CoverageClass::Inconclusive, "markov-threshold")
    };
    Ok(CoverageCriteria {
        class,
        criterion,
        l,
        big_l,
        pi1: Some(pi1),
        lambda_bracket: None,
        full_space_coverage: None,
        printed_item_unreliable: false,
    })
}

/// Poisson Boolean model on `ℝ^d_+` with intensity `λ` and cubes `ξ + [0, ρ]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct BooleanConfig {
    pub lambda: f64,
    /// `P(ρ > x)`.
    pub tail: TailForm,
    pub d: u32,
    pub horizon: f64,
}

impl BooleanConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) {
            return Err(Error::Precondition(format!("intensity λ = {} must be positive", self.lambda)));
        }
        if self.d == 0 {
            return Err(Error::Precondition("dimension must be ≥ 1".into()));
        }
        if !self.tail.vanishes() {
            return Err(Error::Precondition(format!("tail {} does not vanish", self.tail)));
        }
        Ok(())
    }

    fn class(&self) -> TailClass {
        let f = &self.tail;
        if f.scale == 0.0 {
            return TailClass::Bounded { max: 0 };
        }
        TailClass::Regular(Asymptote::new(f.scale, f.ratio, f.power).logs(f.log_power, f.loglog_power))
    }

    /// Whether `E(ρ^d) = ∫ d x^{d−1} P(ρ > x) dx` diverges.
    pub fn moment_infinite(&self) -> bool {
        let f = &self.tail;
        if f.scale == 0.0 || f.ratio < 1.0 {
            return false;
        }
        let d = self.d as f64;
        if f.power != d {
            return f.power < d;
        }
        if f.log_power != -1.0 {
            return f.log_power > -1.0;
        }
        f.loglog_power >= -1.0
    }
}

pub fn boolean_criteria(cfg: &BooleanConfig) -> Result<CoverageCriteria> {
    cfg.validate()?;
    let (l, big_l) = scaled_limits(&cfg.class())?;
    let mut out = CoverageCriteria {
        class: CoverageClass::Inconclusive,
        criterion: "",
        l,
        big_l,
        pi1: None,
        lambda_bracket: None,
        full_space_coverage: Some(cfg.moment_infinite()),
        printed_item_unreliable: false,
    };
    if cfg.d >= 2 {
        (out.class, out.criterion) = if l > 0.0 {
            (CoverageClass::CoversAs, "orthant-liminf")
        } else {
            (CoverageClass::NeverCovers, "orthant-limit-zero")
        };
        return Ok(out);
    }
    if big_l.is_infinite() {
        (out.class, out.criterion) = (CoverageClass::CoversAs, "line-limit-infinite");
    } else if big_l == 0.0 {
        // Dominated by ε/x tails for every ε, each of which leaves λ < 1/ε uncovered.
        (out.class, out.criterion) = (CoverageClass::NeverCovers, "line-domination");
        out.printed_item_unreliable = true;
    } else {
        // λ₀ ≤ 1/l and λ₁ ≥ 1/L are thresholds of the same 0-1 law, so l = L pins both.
        out.lambda_bracket = Some((1.0 / l, 1.0 / big_l));
        let crit = 1.0 / l;
        (out.class, out.criterion) = if l == big_l && cfg.lambda > crit {
            (CoverageClass::CoversAs, "line-critical-intensity")
        } else if l == big_l && cfg.lambda < crit {
            (CoverageClass::NeverCovers, "line-critical-intensity")
        } else {
            (CoverageClass::Inconclusive, "line-critical-intensity")
        };
    }
    Ok(out)
}

/// Sorted disjoint union of closed intervals.
pub fn interval_union(mut intervals: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
    for (a, b) in intervals {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// Summary of one Markov coverage run on sites `1..=T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarkovTrial {
    /// Largest uncovered site `≤ T`.
    pub last_uncovered: Option<u64>,
    pub longest_gap: u64,
    /// Covered fraction of the sites in `[T/2, T]`.
    pub covered_fraction: f64,
    /// Fraction of sites in state 1.
    pub ones_fraction: f64,
}

pub fn sim_markov_coverage<R: Rng + ?Sized>(cfg: &MarkovCoverageConfig, rng: &mut R) -> Result<MarkovTrial> {
    cfg.validate()?;
    if cfg.horizon == 0 {
        return Err(Error::Precondition("horizon must be ≥ 1".into()));
    }
    let t = cfg.horizon;
    let half = t / 2;
    let mut x = rng.random::<f64>() < cfg.pi1();
    let mut reach: Option<u64> = None;
    let (mut ones, mut gap, mut longest, mut covered_half) = (0u64, 0u64, 0u64, 0u64);
    let mut last_uncovered = None;
    for i in 1..=t {
        if i > 1 {
            let u = rng.random::<f64>();
            x = if x { u >= cfg.p10 } else { u < cfg.p01 };
        }
        if x {
            ones += 1;
            let r = cfg.rho.sample(rng);
            let end = i.saturating_add(r);
            reach = Some(reach.map_or(end, |e| e.max(end)));
        }
        if reach.is_some_and(|e| e >= i) {
            gap = 0;
            if i >= half {
                covered_half += 1;
            }
        } else {
            gap += 1;
            longest = longest.max(gap);
            last_uncovered = Some(i);
        }
    }
    Ok(MarkovTrial {
        last_uncovered,
        longest_gap: longest,
        covered_fraction: covered_half as f64 / (t - half + 1) as f64,
        ones_fraction: ones as f64 / t as f64,
    })
}

/// Draws `ρ` with `P(ρ > x) = tail(x)` by inverting at `u ∈ (0, 1]`.
pub fn continuous_quantile(tail: &TailForm, u: f64) -> f64 {
    if tail.eval(0.0) < u {
        return 0.0;
    }
    if tail.shift == 0.0 && tail.ratio == 1.0 && tail.log_power == 0.0 && tail.loglog_power == 0.0 && tail.power > 0.0 {
        return (tail.scale / u).powf(1.0 / tail.power);
    }
    let mut hi = 1.0;
    while tail.eval(hi) >= u {
        hi *= 2.0;
        if !hi.is_finite() {
            return f64::MAX;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if tail.eval(mid) >= u {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    hi
}

/// Summary of one Boolean-model run on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BooleanTrial {
    /// Supremum of uncovered points in `[0, T]`.
    pub uncovered_sup: f64,
    pub longest_gap: f64,
    /// Covered length fraction of `[T/2, T]`.
    pub covered_fraction: f64,
    pub points: u64,
}

/// Poisson points on `[0, T]` with their intervals `[ξ, ξ + ρ]`.
pub fn boolean_intervals<R: Rng + ?Sized>(cfg: &BooleanConfig, rng: &mut R) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut x = 0.0;
    loop {
        // 1 − U ∈ (0, 1] keeps the logarithm finite.
        x += -(1.0 - rng.random::<f64>()).ln() / cfg.lambda;
        if x > cfg.horizon {
            return out;
        }
        let rho = continuous_quantile(&cfg.tail, 1.0 - rng.random::<f64>());
        out.push((x, x + rho));
    }
}

/// Statistics of the uncovered part of `[0, T]` given the union of intervals.
pub fn uncovered_stats(union: &[(f64, f64)], horizon: f64) -> BooleanTrial {
    let half = horizon / 2.0;
    let (mut cursor, mut longest, mut covered_half) = (0.0f64, 0.0f64, 0.0f64);
    let mut sup = horizon;
    for &(a, b) in union {
        if a > horizon {
            break;
        }
        longest = longest.max(a - cursor);
        covered_half += (b.min(horizon) - a.max(half)).max(0.0);
        if b >= horizon {
            sup = a;
            cursor = horizon;
            break;
        }
        cursor = b;
    }
    if cursor < horizon {
        longest = longest.max(horizon - cursor);
    }
    BooleanTrial {
        uncovered_sup: sup,
        longest_gap: longest,
        covered_fraction: covered_half / (horizon - half),
        points: 0,
    }
}

pub fn sim_boolean_1d<R: Rng + ?Sized>(cfg: &BooleanConfig, rng: &mut R) -> Result<BooleanTrial> {
    cfg.validate()?;
    if cfg.d != 1 {
        return Err(Error::Precondition(format!("continuum simulation is one-dimensional, got d = {}", cfg.d)));
    }
    let intervals = boolean_intervals(cfg, rng);
    let points = intervals.len() as u64;
    let union = interval_union(intervals);
    Ok(BooleanTrial { points, ..uncovered_stats(&union, cfg.horizon) })
}
