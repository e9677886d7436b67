//! Fireworks and reverse fireworks on the half-line.
//!
//! In the fireworks process vertex `u`, once informed, informs `(u, u + R_u]`. In the
//! reverse process vertex `u` becomes informed when some informed vertex lies in
//! `[u − R_u, u)`. Both are driven by
//! `a_j = ∏_{i=0}^{j} P(R ≤ i)`, the probability that no radius among vertices `0..=j`
//! reaches past `j`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dist::{
    Asymptote, BelowAsymptotics, Extended, Kahan, Law, Limit, Majorant, SequenceLaw, TailClass,
    TailForm, TailModel,
};
use crate::error::{parse_err, Error, Result};
use crate::report::{Classification, SurvivalReport};

/// Longest prefix summed before giving up on a tolerance.
const MAX_TERMS: u64 = 1 << 24;
/// Prefix on which hypotheses that hold "for all k" are verified numerically.
const CHECK_PREFIX: u64 = 4096;

/// Partial sums of `Σ a_j` and `Σ (2j+3) a_j` together with remainder brackets.
#[derive(Debug, Clone, Copy)]
struct ProductSeries {
    terms: u64,
    /// `Σ_{j<terms} a_j`.
    sum: f64,
    /// `Σ_{j<terms} (2j+3) a_j`.
    weighted: f64,
    sum_rem: (f64, f64),
    /// `None` when the weighted remainder is infinite or uncontrolled.
    weighted_rem: Option<(f64, f64)>,
    last: f64,
}

/// Sums of `Σ_{n≥1} P_n` and `Σ_{n≥1} n P_n` for `P_n = (A−c)_n / (A)_n`.
///
/// Closed forms from `Σ_{n≥0} (α)_n/(β)_n = (β−1)/(β−α−1)` for `β − α > 1`.
fn pochhammer_sums(big_a: f64, c: f64) -> (f64, f64) {
    let s0 = if c > 1.0 { (big_a - c) / (c - 1.0) } else { f64::INFINITY };
    let s1 = if c > 2.0 {
        (big_a - c) * (big_a - 1.0) / ((c - 1.0) * (c - 2.0))
    } else {
        f64::INFINITY
    };
    (s0, s1)
}

/// Remainder of both series past index `j` when `(k + s) P(R ≥ k) ∈ [c_lo, c_hi]` for
/// every `k ≥ j + 2`. Returns `((lo0, hi0), (lo1, hi1))`.
fn hypergeometric_remainders(a_j: f64, j: u64, s: f64, c_lo: f64, c_hi: f64) -> ((f64, f64), (f64, f64)) {
    let big_a = j as f64 + 2.0 + s;
    let jf = j as f64;
    let weigh = |(s0, s1): (f64, f64)| (2.0 * jf + 3.0) * s0 + 2.0 * s1;
    let upper = pochhammer_sums(big_a, c_lo);
    let hi0 = a_j * upper.0;
    let hi1 = a_j * weigh(upper);
    let (lo0, lo1) = if c_hi.is_finite() && big_a - c_hi > 0.0 {
        let lower = pochhammer_sums(big_a, c_hi);
        (a_j * lower.0, a_j * weigh(lower))
    } else {
        (0.0, 0.0)
    };
    // Guard the closed forms against rounding in the last place.
    let widen = |lo: f64, hi: f64| (lo * (1.0 - 1e-12), hi * (1.0 + 1e-12));
    (widen(lo0, hi0), widen(lo1, hi1))
}

/// Sums the product series until both brackets are narrower than `tol`, or the prefix
/// limit is reached. Needs an envelope; without one only the partial sums are returned.
fn sum_product_series(law: &Law, tol: f64, want_weighted: bool) -> ProductSeries {
    let env = law.envelope();
    let mut sum = Kahan::default();
    let mut weighted = Kahan::default();
    let mut a = 1.0f64;
    let mut next_check = env.map_or(64, |e| e.from.max(16));
    let mut out = ProductSeries {
        terms: 0,
        sum: 0.0,
        weighted: 0.0,
        sum_rem: (0.0, f64::INFINITY),
        weighted_rem: None,
        last: 1.0,
    };
    for j in 0..MAX_TERMS {
        a *= law.le(j);
        sum.add(a);
        weighted.add((2.0 * j as f64 + 3.0) * a);
        out.terms = j + 1;
        out.sum = sum.value();
        out.weighted = weighted.value();
        out.last = a;
        if a == 0.0 {
            out.sum_rem = (0.0, 0.0);
            out.weighted_rem = Some((0.0, 0.0));
            return out;
        }
        if j + 1 < next_check {
            continue;
        }
        next_check = j + 2 + j / 4;
        let Some(e) = env else { continue };
        if j + 2 < e.from {
            continue;
        }
        let k = j + 2;
        let c_lo = (k as f64 + e.shift) * law.tail(k);
        if c_lo <= 1.0 {
            continue;
        }
        let (r0, r1) = hypergeometric_remainders(a, j, e.shift, c_lo, e.limit);
        out.sum_rem = r0;
        out.weighted_rem = r1.1.is_finite().then_some(r1);
        let narrow0 = r0.1 - r0.0 < tol;
        let narrow1 = !want_weighted || out.weighted_rem.is_none_or(|r| r.1 - r.0 < tol);
        if narrow0 && narrow1 {
            return out;
        }
    }
    out
}

/// `P(V)` for the homogeneous fireworks process,
/// `[1 + Σ_{j≥1} ∏_{i<j} P(R ≤ i)]^{-1}`.
///
/// Divergence of the series is decided from the tail class only. When it converges the
/// remainder is bracketed by comparing `P(R ≥ k)` with `c/(k + s)` on both sides, which
/// gives hypergeometric tails with closed-form sums.
pub fn fireworks_survival(law: &Law, tol: f64) -> SurvivalReport {
    if law.tail(1) >= 1.0 {
        return SurvivalReport::exact(1.0, "no-silent-vertex")
            .note("P(R = 0) = 0: every informed vertex informs its neighbour");
    }
    let class = law.class();
    match class.product_series_finite() {
        Some(false) => {
            return SurvivalReport::exact(0.0, "survival-series")
                .note(format!("Σ a_n diverges for tail class {}", describe(&class)));
        }
        None => {
            let s = sum_product_series(law, tol, false);
            return SurvivalReport {
                bound_low: Some(0.0),
                bound_high: Some(1.0 / (1.0 + s.sum)),
                ..SurvivalReport::inconclusive("survival-series")
            }
            .detail("partial_sum", s.sum)
            .note("tail class does not decide convergence of Σ a_n");
        }
        Some(true) => {}
    }
    let s = sum_product_series(law, tol, false);
    let hi = 1.0 / (1.0 + s.sum + s.sum_rem.0);
    let lo = if s.sum_rem.1.is_finite() {
        1.0 / (1.0 + s.sum + s.sum_rem.1)
    } else {
        0.0
    };
    let mut r = SurvivalReport::bracket(lo, hi, "survival-series")
        .detail("terms", s.terms as f64)
        .detail("partial_sum", s.sum);
    r.classification = Classification::SurvivesPosProb;
    if !s.sum_rem.1.is_finite() {
        r = r.note("no envelope for the tail: only the upper bound is certified");
    }
    r
}

fn describe(class: &TailClass) -> String {
    match class {
        TailClass::Bounded { max } => format!("bounded by {max}"),
        TailClass::Regular(a) => format!(
            "{}·{}^k·k^-{}·(ln k)^{}·(ln ln k)^{}",
            a.coef, a.ratio, a.power, a.log_power, a.loglog_power
        ),
        TailClass::Unknown => "unknown".into(),
    }
}

/// Whether `P(R ≥ n) ≤ 1/(n − 1)` holds for all large `n`, read off the tail description.
fn eventually_below_harmonic(law: &Law) -> bool {
    match law {
        Law::TailDefined(f) => {
            f.ratio == 1.0
                && f.power == 1.0
                && f.scale <= 1.0
                && (f.log_power < 0.0
                    || (f.log_power == 0.0
                        && (f.loglog_power < 0.0 || (f.loglog_power == 0.0 && (f.scale < 1.0 || f.shift >= -1.0)))))
        }
        Law::Tabulated(t) => match t.bound() {
            crate::dist::TailBound::Power { scale, exponent } => exponent > 1.0 || (exponent == 1.0 && scale <= 1.0),
            _ => true,
        },
        Law::Annealed(_) | Law::Custom(_) => false,
        _ => true,
    }
}

/// Verdict from `L = lim n·P(R ≥ n)`.
pub fn fireworks_tail_class(law: &Law) -> Result<SurvivalReport> {
    if law.tail(1) >= 1.0 {
        return Ok(SurvivalReport::exact(1.0, "no-silent-vertex"));
    }
    let limit = law.class().scaled_limit();
    let report = match limit {
        Limit::Unknown => {
            return Err(Error::Unclassifiable(format!("no tail description for {law}")));
        }
        Limit::Infinite => SurvivalReport::new(Classification::SurvivesPosProb, "scaled-tail-limit")
            .detail("L", f64::INFINITY),
        Limit::Finite(l) if l > 1.0 => {
            SurvivalReport::new(Classification::SurvivesPosProb, "scaled-tail-limit").detail("L", l)
        }
        Limit::Finite(l) if l < 1.0 => {
            SurvivalReport::new(Classification::DiesAs, "scaled-tail-limit").detail("L", l)
        }
        Limit::Finite(l) => {
            if eventually_below_harmonic(law) {
                SurvivalReport::new(Classification::DiesAs, "harmonic-domination").detail("L", l)
            } else {
                SurvivalReport::inconclusive("scaled-tail-limit")
                    .detail("L", l)
                    .note("L = 1 and P(R ≥ n) ≤ 1/(n−1) could not be established")
            }
        }
    };
    Ok(report)
}

/// Law with `P(R ≤ k) = ((k+1)/(k+2))^α`, the critical regime of the spreader bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerCdf {
    pub alpha: f64,
}

impl PowerCdf {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidLaw(format!("power-cdf exponent {alpha} must be positive")));
        }
        Ok(Self { alpha })
    }

    pub fn law(self) -> Law {
        Law::custom(std::sync::Arc::new(self))
    }
}

impl TailModel for PowerCdf {
    fn tail(&self, k: u64) -> f64 {
        if k == 0 {
            return 1.0;
        }
        let k = k as f64;
        // 1 − (k/(k+1))^α without cancellation.
        -(self.alpha * (-1.0 / (k + 1.0)).ln_1p()).exp_m1()
    }

    fn class(&self) -> TailClass {
        TailClass::Regular(Asymptote::new(self.alpha, 1.0, 1.0).regular(true))
    }

    fn label(&self) -> String {
        format!("powcdf:{}", self.alpha)
    }

    fn majorant(&self) -> Option<Majorant> {
        // Bernoulli's inequality for α ≤ 1; (1 − x)^α ≥ 1 − αx fails above 1.
        (self.alpha <= 1.0).then(|| Majorant {
            scale: 1.0,
            form: TailForm::power_law(self.alpha, 1.0).with_shift(1.0),
            from: 1,
        })
    }
}

/// Hypotheses under which the tail of the final number of spreaders `M` is bounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum SpreaderRegime {
    /// `P(R > k) ≤ c_r r^k` with `c_r ∈ (0, ln(1/r))`: bound `(e^{c_r} r)^k / c_r`.
    Geometric { r: f64, c_r: f64 },
    /// `P(R > k) ~ (ln k)^β k^-α`, `α > 1`: bound `C (ln k)^β k^-α`.
    RegularlyVarying { alpha: f64, beta: f64, c: f64 },
    /// `P(R > k) = r/k`, `r ∈ (0, 1)`: bound `C (ln k)^{3+r} / k^{2−(1+r)²}`.
    Harmonic { r: f64, c: f64 },
    /// `P(R ≤ k) = ((k+1)/(k+2))^α`, `α ∈ (1/2, 1)`: bound `C / k^{1−α}`.
    CriticalCdf { alpha: f64, c: f64 },
}

impl SpreaderRegime {
    pub fn tag(&self) -> &'static str {
        match self {
            SpreaderRegime::Geometric { .. } => "i",
            SpreaderRegime::RegularlyVarying { .. } => "ii",
            SpreaderRegime::Harmonic { .. } => "iii",
            SpreaderRegime::CriticalCdf { .. } => "iv",
        }
    }

    /// The same regime with its free constant replaced.
    pub fn with_constant(self, c: f64) -> Self {
        match self {
            SpreaderRegime::Geometric { .. } => self,
            SpreaderRegime::RegularlyVarying { alpha, beta, .. } => SpreaderRegime::RegularlyVarying { alpha, beta, c },
            SpreaderRegime::Harmonic { r, .. } => SpreaderRegime::Harmonic { r, c },
            SpreaderRegime::CriticalCdf { alpha, .. } => SpreaderRegime::CriticalCdf { alpha, c },
        }
    }

    fn constant(&self) -> f64 {
        match *self {
            SpreaderRegime::Geometric { c_r, .. } => 1.0 / c_r,
            SpreaderRegime::RegularlyVarying { c, .. }
            | SpreaderRegime::Harmonic { c, .. }
            | SpreaderRegime::CriticalCdf { c, .. } => c,
        }
    }

    /// Bound divided by its constant; `None` below the range where the shape is meaningful.
    fn shape(&self, k: u64) -> Option<f64> {
        let kf = k as f64;
        match *self {
            SpreaderRegime::Geometric { r, c_r } => Some(((c_r + r.ln()) * kf).exp()),
            SpreaderRegime::RegularlyVarying { alpha, beta, .. } => {
                (k >= 3).then(|| kf.ln().powf(beta) * kf.powf(-alpha))
            }
            SpreaderRegime::Harmonic { r, .. } => {
                (k >= 3).then(|| kf.ln().powf(3.0 + r) * kf.powf((1.0 + r).powi(2) - 2.0))
            }
            SpreaderRegime::CriticalCdf { alpha, .. } => (k >= 1).then(|| kf.powf(alpha - 1.0)),
        }
    }

    fn check_parameters(&self) -> Result<()> {
        let ok = match *self {
            SpreaderRegime::Geometric { r, c_r } => r > 0.0 && r < 1.0 && c_r > 0.0 && c_r < (1.0 / r).ln(),
            SpreaderRegime::RegularlyVarying { alpha, beta, c } => alpha > 1.0 && beta.is_finite() && c > 0.0,
            SpreaderRegime::Harmonic { r, c } => r > 0.0 && r < 1.0 && c > 0.0,
            SpreaderRegime::CriticalCdf { alpha, c } => alpha > 0.5 && alpha < 1.0 && c > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Precondition(format!("parameters of regime {} out of range: {self:?}", self.tag())))
        }
    }

    /// Verifies that `law` satisfies the regime's hypothesis: numerically on a prefix and
    /// symbolically beyond it.
    pub fn check_law(&self, law: &Law) -> Result<()> {
        self.check_parameters()?;
        let fail = |why: String| Err(Error::Precondition(format!("regime {}: {why}", self.tag())));
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * y.abs().max(1e-300);
        let class = law.class();
        match *self {
            SpreaderRegime::Geometric { r, c_r } => {
                for k in 1..=CHECK_PREFIX {
                    let bound = c_r * r.powf(k as f64);
                    if law.tail(k + 1) > bound * (1.0 + 1e-12) {
                        return fail(format!("P(R > {k}) = {} exceeds {bound}", law.tail(k + 1)));
                    }
                }
                match class {
                    TailClass::Bounded { .. } => Ok(()),
                    TailClass::Regular(a) if a.coef == 0.0 || a.ratio < r => Ok(()),
                    TailClass::Regular(a)
                        if close(a.ratio, r)
                            && a.power >= 0.0
                            && a.log_power <= 0.0
                            && a.loglog_power <= 0.0
                            && a.coef * r <= c_r * (1.0 + 1e-12) =>
                    {
                        Ok(())
                    }
                    _ => fail("tail is not eventually below c_r·r^k".into()),
                }
            }
            SpreaderRegime::RegularlyVarying { alpha, beta, .. } => match class {
                TailClass::Regular(a)
                    if a.ratio == 1.0 && close(a.power, alpha) && (a.log_power - beta).abs() < 1e-12 && a.loglog_power == 0.0 =>
                {
                    Ok(())
                }
                _ => fail(format!("tail is not asymptotic to (ln k)^{beta} k^-{alpha}")),
            },
            SpreaderRegime::Harmonic { r, .. } => {
                for k in 1..=CHECK_PREFIX {
                    if !close(law.tail(k + 1), r / k as f64) {
                        return fail(format!("P(R > {k}) = {} differs from r/k", law.tail(k + 1)));
                    }
                }
                match class {
                    TailClass::Regular(a) if a.ratio == 1.0 && close(a.power, 1.0) && close(a.coef, r) => Ok(()),
                    _ => fail("tail class is not r/k".into()),
                }
            }
            SpreaderRegime::CriticalCdf { alpha, .. } => {
                for k in 0..=CHECK_PREFIX {
                    let want = ((k as f64 + 1.0) / (k as f64 + 2.0)).powf(alpha);
                    if !close(law.le(k), want) {
                        return fail(format!("P(R ≤ {k}) = {} differs from {want}", law.le(k)));
                    }
                }
                match class {
                    TailClass::Regular(a) if a.ratio == 1.0 && close(a.power, 1.0) && close(a.coef, alpha) => Ok(()),
                    _ => fail("tail class is not α/k".into()),
                }
            }
        }
    }
}

impl fmt::Display for SpreaderRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpreaderRegime::Geometric { r, c_r } => write!(f, "i:r={r},c_r={c_r}"),
            SpreaderRegime::RegularlyVarying { alpha, beta, c } => write!(f, "ii:alpha={alpha},beta={beta},c={c}"),
            SpreaderRegime::Harmonic { r, c } => write!(f, "iii:r={r},c={c}"),
            SpreaderRegime::CriticalCdf { alpha, c } => write!(f, "iv:alpha={alpha},c={c}"),
        }
    }
}

impl FromStr for SpreaderRegime {
    type Err = Error;

    /// `i:r=…,c_r=…`, `ii:alpha=…,beta=…[,c=…]`, `iii:r=…[,c=…]`, `iv:alpha=…[,c=…]`;
    /// an omitted constant defaults to 1.
    fn from_str(s: &str) -> Result<Self> {
        let (tag, body) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = std::collections::BTreeMap::new();
        for item in body.split(',').filter(|x| !x.trim().is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| parse_err(s, format!("`{item}` is not key=value")))?;
            let v: f64 = v.trim().parse().map_err(|_| parse_err(s, format!("`{v}` is not a number")))?;
            kv.insert(k.trim().to_string(), v);
        }
        let mut take = |key: &str, default: Option<f64>| {
            kv.remove(key)
                .or(default)
                .ok_or_else(|| parse_err(s, format!("missing `{key}`")))
        };
        let regime = match tag.trim() {
            "i" => SpreaderRegime::Geometric { r: take("r", None)?, c_r: take("c_r", None)? },
            "ii" => SpreaderRegime::RegularlyVarying {
                alpha: take("alpha", None)?,
                beta: take("beta", Some(0.0))?,
                c: take("c", Some(1.0))?,
            },
            "iii" => SpreaderRegime::Harmonic { r: take("r", None)?, c: take("c", Some(1.0))? },
            "iv" => SpreaderRegime::CriticalCdf { alpha: take("alpha", None)?, c: take("c", Some(1.0))? },
            other => return Err(parse_err(s, format!("unknown regime `{other}`"))),
        };
        if let Some(extra) = kv.keys().next() {
            return Err(parse_err(s, format!("unknown key `{extra}`")));
        }
        Ok(regime)
    }
}

/// Bound on `P(M ≥ k)`, `M` the final number of spreaders, capped at 1.
pub fn spreader_tail_bound(law: &Law, regime: &SpreaderRegime, k: u64) -> Result<f64> {
    regime.check_law(law)?;
    Ok(match regime.shape(k) {
        Some(s) => (regime.constant() * s).min(1.0),
        None => 1.0,
    })
}

/// `P(M ≥ k)` for `k = 0..=k_max` to absolute accuracy ~1e-15, where `M` counts the spreaders other than the
/// origin (the final reach).
///
/// Position `j` is a cut when no vertex `u ≤ j` reaches past `j`; `P(cut at j) = a_j` and
/// cuts at `j < l` occur jointly with probability `a_j a_{l−j−1}`. The process stops at the
/// first cut, so its law `f` solves the renewal equation `a_j = Σ_{i≤j} f_i a_{j−i−1}`
/// (with `a_{−1} = 1`), and `M` equals the first cut.
pub fn spreader_tail_exact(law: &Law, k_max: u64) -> Vec<f64> {
    let n = k_max as usize;
    let mut a = Vec::with_capacity(n);
    let mut acc = 1.0;
    for j in 0..n {
        acc *= law.le(j as u64);
        a.push(acc);
    }
    let at = |i: isize| if i < 0 { 1.0 } else { a[i as usize] };
    let mut f: Vec<f64> = Vec::with_capacity(n);
    for j in 0..n {
        let mut s = Kahan::default();
        for (i, fi) in f.iter().enumerate() {
            s.add(fi * at(j as isize - i as isize - 1));
        }
        f.push((a[j] - s.value()).max(0.0));
    }
    let mut out = vec![1.0; n + 1];
    let mut cum = Kahan::default();
    for k in 1..=n {
        cum.add(f[k - 1]);
        out[k] = (1.0 - cum.value()).max(0.0);
    }
    out
}

/// Smallest constant making the regime's bound dominate the exact tail on `[k_lo, k_hi]`.
pub fn calibrate_spreader_constant(law: &Law, regime: &SpreaderRegime, k_lo: u64, k_hi: u64) -> Result<f64> {
    regime.check_law(law)?;
    if k_lo > k_hi {
        return Err(Error::Precondition(format!("empty calibration range [{k_lo}, {k_hi}]")));
    }
    let exact = spreader_tail_exact(law, k_hi);
    let mut c = 0.0f64;
    for k in k_lo..=k_hi {
        if let Some(s) = regime.shape(k) {
            if s > 0.0 {
                c = c.max(exact[k as usize] / s);
            }
        }
    }
    Ok(c)
}

/// `P(S)` for the homogeneous reverse process: 1 when `E(R) = ∞`, 0 otherwise.
pub fn reverse_survival_class(law: &Law) -> Result<SurvivalReport> {
    if law.tail(1) >= 1.0 {
        return Ok(SurvivalReport::exact(1.0, "no-silent-vertex")
            .note("P(R = 0) = 0: every vertex hears from its left neighbour"));
    }
    match law.class().mean_finite() {
        Some(true) => Ok(SurvivalReport::exact(0.0, "mean-radius")),
        Some(false) => Ok(SurvivalReport::exact(1.0, "mean-radius")),
        None => Err(Error::Unclassifiable(format!("cannot decide whether E(R) is finite for {law}"))),
    }
}

/// Parameter of the geometric law of the final number of reverse spreaders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometricLaw {
    /// `∏_{k≥0} P(R ≤ k)`, the midpoint of `[low, high]`.
    pub p: f64,
    pub low: f64,
    pub high: f64,
    pub terms: u64,
}

impl GeometricLaw {
    /// `P(Z = k) = p (1 − p)^k`.
    pub fn pmf(&self, k: u64) -> f64 {
        self.p * (1.0 - self.p).powf(k as f64)
    }
}

/// `p = ∏_{k≥0} P(R ≤ k)` with `Z ~ Geom(p)` on `{0, 1, …}`.
///
/// Past `K` the factors are `1 − x_k` with `x_k ≤ x_K < 1`, so
/// `∏_{k>K} (1 − x_k) ≥ exp(−Σ_{k>K} x_k / (1 − x_K))`; the sum is the mean remainder.
pub fn reverse_final_law(law: &Law, tol: f64) -> Result<GeometricLaw> {
    let mean = law.mean()?;
    if mean.is_infinite() {
        return Err(Error::Precondition(format!(
            "E(R) = ∞ for {law}: the product is 0 and the reverse process survives"
        )));
    }
    if law.tail(1) >= 1.0 {
        return Err(Error::Precondition(
            "P(R = 0) = 0: the product vanishes and the reverse process never stops".into(),
        ));
    }
    if let Some(max) = law.max_support() {
        let mut p = 1.0;
        for k in 0..max {
            p *= law.le(k);
        }
        return Ok(GeometricLaw { p, low: p, high: p, terms: max });
    }
    let maj = law
        .majorant()
        .ok_or_else(|| Error::Unclassifiable(format!("no tail majorant for {law}")))?;
    let mut ln_p = Kahan::default();
    let mut next_check = maj.from.max(16);
    for k in 0..MAX_TERMS {
        let x = law.tail(k + 1);
        ln_p.add((-x).ln_1p());
        let k = k + 1;
        if k < next_check {
            continue;
        }
        next_check = k + 1 + k / 4;
        // Factors k' ≥ k have x_{k'} = tail(k'+1) ≤ tail(k+1).
        let x_next = law.tail(k + 1);
        if x_next >= 1.0 {
            continue;
        }
        let Some(rem) = maj.remainder(1.0, k) else { continue };
        let high = ln_p.value().exp();
        let low = high * (-rem / (1.0 - x_next)).exp();
        if high - low < tol {
            return Ok(GeometricLaw {
                p: 0.5 * (low + high),
                low,
                high,
                terms: k,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_TERMS,
        last_step: f64::NAN,
    })
}

/// Renewal constants of the reverse process: spacing mean `μ`, variance `σ²` and the
/// limiting proportion of spreaders `1/μ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityConstants {
    pub mu: Extended,
    /// `None` when the tail class does not decide whether `σ² < ∞`.
    pub sigma2: Option<Extended>,
    pub density: f64,
}

/// Whether `E(T²) < ∞` for the spacing `T` with `P(T ≥ k) = a_{k−2}`, given `μ < ∞`.
fn second_moment_finite(class: &TailClass) -> Option<bool> {
    use std::cmp::Ordering::*;
    let TailClass::Regular(a) = class else { return None };
    let heavier = |x: &Asymptote| {
        // Compare with 1/k in the same order used for the first moment.
        let probe = TailClass::Regular(Asymptote { coef: 1.0, ..*x });
        match probe.scaled_limit() {
            Limit::Infinite => Less,
            Limit::Finite(0.0) => Greater,
            _ => Equal,
        }
    };
    match heavier(a) {
        Less => Some(true),
        Greater => Some(false),
        Equal => {
            if a.coef > 2.0 + 1e-12 {
                Some(true)
            } else if a.coef < 2.0 - 1e-12 || a.regular {
                Some(false)
            } else {
                None
            }
        }
    }
}

/// `μ = 1 + Σ_{j≥1} ∏_{i<j} P(R ≤ i)` and `σ² = Σ_k k² P(R > k−1) ∏_{i≤k−2} P(R ≤ i) − μ²`.
pub fn spreader_density(law: &Law, tol: f64) -> Result<DensityConstants> {
    if law.tail(1) >= 1.0 {
        return Ok(DensityConstants {
            mu: Extended::exact(1.0),
            sigma2: Some(Extended::exact(0.0)),
            density: 1.0,
        });
    }
    let class = law.class();
    match class.product_series_finite() {
        Some(false) => {
            return Ok(DensityConstants {
                mu: Extended::Infinite,
                sigma2: Some(Extended::Infinite),
                density: 0.0,
            })
        }
        None => return Err(Error::Unclassifiable(format!("cannot decide whether μ < ∞ for {law}"))),
        Some(true) => {}
    }
    let sigma_finite = second_moment_finite(&class);
    let s = sum_product_series(law, tol, sigma_finite == Some(true));
    if !s.sum_rem.1.is_finite() {
        return Err(Error::Unclassifiable(format!("no tail envelope to bound the μ series for {law}")));
    }
    let mu_lo = 1.0 + s.sum + s.sum_rem.0;
    let mu_hi = 1.0 + s.sum + s.sum_rem.1;
    let sigma2 = match sigma_finite {
        Some(false) => Some(Extended::Infinite),
        None => None,
        Some(true) => s.weighted_rem.map(|(lo, hi)| {
            let lo = (1.0 + s.weighted + lo - mu_hi * mu_hi).max(0.0);
            let hi = 1.0 + s.weighted + hi - mu_lo * mu_lo;
            Extended::Finite {
                value: lo,
                remainder: (hi - lo).max(0.0),
            }
        }),
    };
    Ok(DensityConstants {
        mu: Extended::Finite {
            value: mu_lo,
            remainder: mu_hi - mu_lo,
        },
        sigma2,
        density: 2.0 / (mu_lo + mu_hi),
    })
}

/// `P(V) > 0` criteria for a fireworks process whose actionable vertices have gaps at most
/// `m`: the power-sum test `Σ_n P(R_n < tm)^t < ∞` and the product lower bound
/// `∏_j [1 − ∏_{i≤j} P(R_{j−i} < (i+1)m)]`. Falls back on the union bound
/// `Σ_{k<n} P(R_k ≥ n−k) → 0` to certify extinction.
pub fn hetero_fireworks_bound(seq: &SequenceLaw, m: u64, t: u64, tol: f64) -> Result<SurvivalReport> {
    if m == 0 || t == 0 {
        return Err(Error::Precondition("gap bound m and exponent t must be ≥ 1".into()));
    }
    if let SequenceLaw::Constant(law) = seq {
        if m == 1 {
            let mut r = fireworks_survival(law, tol);
            r.notes.push("constant sequence: reduced to the homogeneous process".into());
            return Ok(r);
        }
    }
    if seq.tail(0, 1) == 0.0 {
        return Ok(SurvivalReport::exact(0.0, "silent-origin"));
    }
    for n in 0..CHECK_PREFIX {
        if seq.below(n, m) >= 1.0 {
            return Err(Error::Precondition(format!("P(R_{n} < {m}) = 1")));
        }
    }
    // Power-sum criterion.
    let power_sum = match seq.below_asymptotics(t * m) {
        BelowAsymptotics::Limit(q) => Some(q == 0.0),
        BelowAsymptotics::Decay(b) => Some(b.powered_sum_finite(t as f64)),
    };
    // Product lower bound; the i = 0 factor bounds each inner product by P(R_j < m).
    let remainder_from = |j: u64| -> Option<f64> {
        match seq.below_asymptotics(m) {
            BelowAsymptotics::Limit(0.0) => Some(0.0),
            BelowAsymptotics::Limit(_) => None,
            BelowAsymptotics::Decay(b) => b.powered_sum_from(1.0, j),
        }
    };
    let mut ln_prod = Kahan::default();
    let mut bound: Option<(f64, f64)> = None;
    let mut j = 0u64;
    while j < CHECK_PREFIX {
        let mut inner = 1.0;
        for i in 0..=j {
            inner *= seq.below(j - i, (i + 1) * m);
            if inner == 0.0 {
                break;
            }
        }
        ln_prod.add((-inner).ln_1p());
        j += 1;
        if let Some(rem) = remainder_from(j) {
            let high = ln_prod.value().exp();
            let low = if rem < 1.0 { high * (1.0 - rem) } else { 0.0 };
            bound = Some((low, high));
            if high - low < tol || high == 0.0 {
                break;
            }
        }
    }
    let product_low = bound.map_or(0.0, |b| b.0);
    let mut report = if power_sum == Some(true) || product_low > 0.0 {
        let criterion = if power_sum == Some(true) { "power-sum" } else { "product-bound" };
        SurvivalReport {
            bound_low: Some(product_low),
            bound_high: Some(1.0),
            remainder_bound: bound.map_or(0.0, |b| b.1 - b.0),
            ..SurvivalReport::new(
                if product_low >= 1.0 {
                    Classification::SurvivesAs
                } else {
                    Classification::SurvivesPosProb
                },
                criterion,
            )
        }
    } else if seq.union_bound_limit() == Limit::Finite(0.0) && m == 1 {
        SurvivalReport::exact(0.0, "union-bound").detail("U_1000", seq.union_bound(1000))
    } else {
        SurvivalReport {
            bound_low: Some(product_low),
            bound_high: Some(1.0),
            ..SurvivalReport::inconclusive("product-bound")
        }
    };
    if let Some((lo, hi)) = bound {
        report = report.detail("product_low", lo).detail("product_prefix", hi);
    }
    report = report.detail("power_sum_finite", f64::from(u8::from(power_sum == Some(true))));
    Ok(report)
}

/// `sup_n P(R_n ≥ 1)`.
fn dominating_tail_one(seq: &SequenceLaw) -> f64 {
    match seq {
        SequenceLaw::Constant(law) => law.tail(1),
        SequenceLaw::Periodic(laws) => laws.iter().map(|l| l.tail(1)).fold(0.0, f64::max),
        SequenceLaw::DefectiveRelay(_) => 1.0,
        SequenceLaw::ShiftedTail(b) => b.at(0),
        SequenceLaw::JumpToIndex(b) => b.at(1),
    }
}

/// Whether `Σ_n ∏_{k≥1} P(R_{n+k} < k)` converges.
fn reverse_product_series_finite(seq: &SequenceLaw) -> Option<bool> {
    match seq {
        // Only the k = 1 factor, b_{n+1}, differs from 1.
        SequenceLaw::DefectiveRelay(b) => Some(b.powered_sum_finite(1.0)),
        SequenceLaw::Constant(_) | SequenceLaw::Periodic(_) => match seq.dominating_class().mean_finite() {
            Some(true) => Some(false),
            _ => None,
        },
        // With Σ b_n < ∞ the products tend to 1.
        SequenceLaw::ShiftedTail(b) | SequenceLaw::JumpToIndex(b) => {
            b.powered_sum_finite(1.0).then_some(false)
        }
    }
}

/// Survival of the heterogeneous reverse process.
pub fn hetero_reverse_class(seq: &SequenceLaw, tol: f64, probe_n: u64) -> Result<SurvivalReport> {
    let _ = tol;
    if let SequenceLaw::Constant(law) = seq {
        let mut r = reverse_survival_class(law)?;
        r.notes.push("constant sequence: reduced to the homogeneous process".into());
        return Ok(r);
    }
    // Smallest partial sum Σ_{k≤K} P(R_{n+k} ≥ k) over the probed starting points.
    let probe_min = (0..=probe_n)
        .map(|n| {
            let mut s = Kahan::default();
            for k in 1..=CHECK_PREFIX {
                s.add(seq.tail(n + k, k));
            }
            s.value()
        })
        .fold(f64::INFINITY, f64::min);
    let report = match seq.reverse_series_diverges() {
        Some(true) => SurvivalReport::exact(1.0, "reverse-series"),
        _ if reverse_product_series_finite(seq) == Some(true) => {
            SurvivalReport::new(Classification::SurvivesPosProb, "reverse-product-series")
        }
        _ if dominating_tail_one(seq) < 1.0 && seq.dominating_class().mean_finite() == Some(true) => {
            SurvivalReport::exact(0.0, "dominating-mean")
        }
        _ => SurvivalReport::inconclusive("reverse-series"),
    };
    Ok(report.detail("probe_min_partial_sum", probe_min))
}

/// `P(vertex H is informed)` for the homogeneous fireworks process: the survived-to-horizon
/// probability that a simulation with horizon `H` estimates.
///
/// The lead `L_n = reach − n` of the informed vertex `n` moves by `L_{n+1} = max(L_n − 1, R)`
/// and the process stops at `L = 0`, so `G_n(ℓ) = P(alive at n, L_n ≤ ℓ)` satisfies
/// `G_{n+1}(ℓ) = (G_n(ℓ+1) − G_n(0))·P(R ≤ ℓ)`. Only `ℓ ≤ H − n` matters.
pub fn fireworks_reach_probability(law: &Law, horizon: u64) -> f64 {
    let h = horizon as usize;
    let le: Vec<f64> = (0..=horizon).map(|k| law.le(k)).collect();
    let mut g = le.clone();
    let mut alive = 1.0;
    for n in 0..h {
        let g0 = g[0];
        alive -= g0;
        for l in 0..h - n {
            g[l] = (g[l + 1] - g0) * le[l];
        }
        g.truncate(h - n);
    }
    alive.max(0.0)
}
