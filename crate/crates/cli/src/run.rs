//! Dispatch of analytic evaluations, simulations and cross-validations.

use serde::Serialize;

use rumor_core::coverage::{
    boolean_criteria, markov_coverage_criteria, sim_boolean_1d, sim_markov_coverage, BooleanConfig, CoverageCriteria,
    MarkovCoverageConfig,
};
use rumor_core::dist::{parse_continuous_tail, Extended, Law, SequenceLaw};
use rumor_core::env::{
    env_fireworks_survival, env_hetero_criteria, env_line_criteria, env_reverse_w, gw_fireworks_class, gw_reverse_class,
};
use rumor_core::line::{
    fireworks_reach_probability, fireworks_survival, fireworks_tail_class, hetero_fireworks_bound, hetero_reverse_class,
    reverse_final_law, reverse_survival_class, spreader_density,
};
use rumor_core::report::SurvivalReport;
use rumor_core::sim::{keyed_stream, run_trials, wilson, Estimate, Experiment, Radii, TreeModel, TreeTrial};
use rumor_core::tree::{
    cone_analysis, cone_reach_probability, cone_survival_bounds, disk_bounds, growth_dim, reverse_cone_class,
    spherical_survival_check, ConeWhere, DiskInput, TreeSpec,
};
use rumor_core::{Error, Result};

use crate::config::{Command, ExperimentConfig, Model};

/// Largest horizon for which the quadratic reach recursion is used as a bias bound.
const REACH_RECURSION_MAX: u64 = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyzeRow {
    pub model: String,
    pub substrate: String,
    pub params: String,
    pub quantity: String,
    pub value: Option<f64>,
    pub remainder_bound: Option<f64>,
    pub criterion: String,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimRow {
    pub model: String,
    pub substrate: String,
    pub params: String,
    pub horizon: u64,
    pub trials: u64,
    pub seed: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub bias_bound: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XvalRow {
    pub model: String,
    pub substrate: String,
    pub params: String,
    pub quantity: String,
    pub horizon: u64,
    pub trials: u64,
    pub seed: u64,
    pub analytic_low: Option<f64>,
    pub analytic_high: Option<f64>,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub bias_bound: Option<f64>,
    pub budget: Option<f64>,
    pub discrepancy: Option<f64>,
    /// `pass`, `fail` or `inconclusive`.
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Rows {
    Analyze(Vec<AnalyzeRow>),
    Simulate(Vec<SimRow>),
    Xval(Vec<XvalRow>),
}

impl Rows {
    fn extend(&mut self, other: Rows) -> Result<()> {
        match (self, other) {
            (Rows::Analyze(a), Rows::Analyze(b)) => a.extend(b),
            (Rows::Simulate(a), Rows::Simulate(b)) => a.extend(b),
            (Rows::Xval(a), Rows::Xval(b)) => a.extend(b),
            _ => return Err(Error::Precondition("mixed row kinds in one report".into())),
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        match self {
            Rows::Analyze(r) => r.len(),
            Rows::Simulate(r) => r.len(),
            Rows::Xval(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: Command,
    pub config: ExperimentConfig,
    pub rows: Rows,
}

impl Report {
    /// 0 on success, 2 when a cross-validation row failed.
    pub fn exit_code(&self) -> i32 {
        match &self.rows {
            Rows::Xval(rows) if rows.iter().any(|r| r.verdict == "fail") => 2,
            _ => 0,
        }
    }
}

pub fn run_experiment(cfg: &ExperimentConfig, workers: usize) -> Result<Report> {
    let rows = match cfg.command {
        Command::Analyze => Rows::Analyze(analyze(cfg)?),
        Command::Simulate => Rows::Simulate(simulate(cfg, workers)?),
        Command::Xval => Rows::Xval(xval(cfg, workers)?),
        Command::Sweep => {
            let n = cfg.sweep.as_ref().map_or(0, |s| s.grid.len());
            let mut all: Option<Rows> = None;
            for i in 0..n {
                let point = cfg.at_grid_point(i).map_err(Error::Precondition)?;
                let rows = run_experiment(&point, workers)?.rows;
                match &mut all {
                    None => all = Some(rows),
                    Some(a) => a.extend(rows)?,
                }
            }
            all.ok_or_else(|| Error::Precondition("empty sweep grid".into()))?
        }
    };
    Ok(Report { schema: crate::config::SCHEMA, command: cfg.command, config: cfg.clone(), rows })
}

struct RowSink<'a> {
    cfg: &'a ExperimentConfig,
    rows: Vec<AnalyzeRow>,
}

impl RowSink<'_> {
    fn push(&mut self, quantity: &str, value: Option<f64>, remainder: Option<f64>, criterion: &str, status: &str) {
        self.rows.push(AnalyzeRow {
            model: self.cfg.model.as_str().into(),
            substrate: self.cfg.substrate.clone(),
            params: self.cfg.params(),
            quantity: quantity.into(),
            value,
            remainder_bound: remainder,
            criterion: criterion.into(),
            status: status.into(),
        });
    }

    fn value(&mut self, quantity: &str, value: f64, remainder: f64, criterion: &str) {
        self.push(quantity, Some(value), Some(remainder), criterion, "ok");
    }

    fn extended(&mut self, quantity: &str, e: Extended, criterion: &str) {
        self.push(quantity, Some(e.value()), Some(e.remainder()), criterion, "ok");
    }

    /// A survival report as a classification row followed by its bounds and details.
    fn report(&mut self, prefix: &str, r: &SurvivalReport) {
        let status = r.classification.as_str();
        let width = match (r.bound_low, r.bound_high) {
            (Some(a), Some(b)) => Some(b - a),
            _ => None,
        };
        let name = |s: &str| if prefix.is_empty() { s.to_string() } else { format!("{prefix}.{s}") };
        self.push(&name("classification"), r.probability, width.or(Some(r.remainder_bound)), r.criterion, status);
        if r.probability.is_none() {
            if let Some(lo) = r.bound_low {
                self.push(&name("survival_low"), Some(lo), width, r.criterion, status);
            }
            if let Some(hi) = r.bound_high {
                self.push(&name("survival_high"), Some(hi), width, r.criterion, status);
            }
        }
        for (k, v) in &r.details {
            self.push(&name(k), Some(*v), None, r.criterion, status);
        }
    }

    fn coverage(&mut self, c: &CoverageCriteria) {
        let status = c.class.as_str();
        self.push("classification", None, None, c.criterion, status);
        self.push("liminf_x_tail", Some(c.l), None, c.criterion, status);
        self.push("limsup_x_tail", Some(c.big_l), None, c.criterion, status);
        if let Some(p) = c.pi1 {
            self.push("pi1", Some(p), None, c.criterion, status);
        }
        if let Some((a, b)) = c.lambda_bracket {
            self.push("critical_intensity_low", Some(a), Some(b - a), c.criterion, status);
            self.push("critical_intensity_high", Some(b), Some(b - a), c.criterion, status);
        }
        if let Some(full) = c.full_space_coverage {
            self.push("full_space_coverage", Some(f64::from(u8::from(full))), None, "moment-test", status);
        }
        if c.printed_item_unreliable {
            self.push("printed_item_unreliable", Some(1.0), None, c.criterion, status);
        }
    }
}

fn tree_degree(spec: &TreeSpec) -> Option<(u64, ConeWhere)> {
    match spec {
        TreeSpec::Homogeneous(d) => Some((*d, ConeWhere::Full)),
        TreeSpec::RootedPlus(d) => Some((*d, ConeWhere::Plus)),
        _ => None,
    }
}

fn markov_config(cfg: &ExperimentConfig) -> MarkovCoverageConfig {
    let m = cfg.markov.as_ref().expect("validated");
    MarkovCoverageConfig { p01: m.p01, p10: m.p10, rho: m.rho.parse().expect("validated"), horizon: cfg.horizon }
}

fn boolean_config(cfg: &ExperimentConfig) -> BooleanConfig {
    let b = cfg.boolean.as_ref().expect("validated");
    BooleanConfig {
        lambda: b.lambda,
        tail: parse_continuous_tail(&b.tail).expect("validated"),
        d: b.d,
        horizon: cfg.horizon as f64,
    }
}

fn laws(cfg: &ExperimentConfig) -> Result<(Law, Option<Law>)> {
    let r = cfg
        .radius_law()
        .ok_or_else(|| Error::Precondition(format!("model {} needs a radius law here", cfg.model.as_str())))?;
    Ok((r, cfg.stations_law()))
}

/// The single-station law acting at each vertex: the radius law, or its annealed counterpart.
fn effective_law(cfg: &ExperimentConfig) -> Result<Law> {
    let (r, n) = laws(cfg)?;
    Ok(match n {
        Some(n) => Law::annealed(n, r),
        None => r,
    })
}

pub fn analyze(cfg: &ExperimentConfig) -> Result<Vec<AnalyzeRow>> {
    let tol = cfg.tolerance;
    let mut out = RowSink { cfg, rows: Vec::new() };
    match cfg.model {
        Model::Fireworks => match cfg.radius_seq() {
            Some(seq) => out.report("", &hetero_fireworks_bound(&seq, 1, 1, tol)?),
            None => {
                let law = effective_law(cfg)?;
                if let Ok(r) = fireworks_tail_class(&law) {
                    out.report("tail_class", &r);
                }
                out.report("", &fireworks_survival(&law, tol));
                if cfg.horizon <= REACH_RECURSION_MAX {
                    out.value("reach_probability_at_horizon", fireworks_reach_probability(&law, cfg.horizon), 0.0, "reach-recursion");
                }
            }
        },
        Model::Reverse => match cfg.radius_seq() {
            Some(seq) => out.report("", &hetero_reverse_class(&seq, tol, cfg.horizon)?),
            None => reverse_rows(&mut out, &effective_law(cfg)?, tol)?,
        },
        Model::Cone | Model::EnvCone => {
            let spec = cfg.tree().expect("validated");
            let (r, n) = laws(cfg)?;
            match (&spec, tree_degree(&spec)) {
                (TreeSpec::GaltonWatson(d), _) => {
                    out.report("", &gw_fireworks_class(d, &n.unwrap_or(Law::point(1)), &r)?);
                }
                (_, Some((d, at))) => {
                    let law = effective_law(cfg)?;
                    let a = cone_analysis(d, &law, at, tol)?;
                    let crit = "cone-fixed-points";
                    out.value("rho", a.rho, tol, crit);
                    out.value("psi", a.psi, tol, crit);
                    let w = a.surv_high - a.surv_low;
                    out.push("survival_low", Some(a.surv_low), Some(w), crit, a.regime.as_str());
                    out.push("survival_high", Some(a.surv_high), Some(w), crit, a.regime.as_str());
                    out.extended("mean_d_pow_r", a.e_d_r, crit);
                    match (a.size_low, a.size_high) {
                        (Some(lo), Some(hi)) => {
                            out.value("expected_size_low", lo, hi - lo, "cone-size");
                            out.value("expected_size_high", hi, hi - lo, "cone-size");
                        }
                        _ => out.push("expected_size", None, None, "cone-size", "outside_regime"),
                    }
                    let (lo, hi) = cone_reach_probability(&spec, &law, cfg.horizon, tol)?;
                    out.value("reach_probability_at_horizon", lo, hi - lo, "depth-recursion");
                }
                _ => {
                    let law = effective_law(cfg)?;
                    out.report("", &spherical_survival_check(&spec, &law, cfg.horizon)?);
                    let (lo, hi) = cone_reach_probability(&spec, &law, cfg.horizon, tol)?;
                    out.value("reach_probability_at_horizon", lo, hi - lo, "depth-recursion");
                }
            }
        }
        Model::Disk => {
            let spec = cfg.tree().expect("validated");
            let input = match &spec {
                TreeSpec::Homogeneous(d) => DiskInput::Homogeneous { d: *d },
                TreeSpec::RootedPlus(d) => DiskInput::MaxDegree { delta: d + 1 },
                TreeSpec::GaltonWatson(_) => DiskInput::MaxDegree {
                    delta: spec
                        .max_degree()
                        .ok_or_else(|| Error::Precondition("disk bounds need a bounded offspring law".into()))?,
                },
                _ => DiskInput::Spherical { dim: growth_dim(&spec, cfg.horizon)?, max_degree: spec.max_degree() },
            };
            let b = disk_bounds(&input)?;
            let crit = match b.source {
                rumor_core::tree::DiskSource::BoundedDegree => "bounded-degree",
                rumor_core::tree::DiskSource::HomogeneousTree => "homogeneous-tree",
                rumor_core::tree::DiskSource::SphericalTree => "spherical-tree",
                rumor_core::tree::DiskSource::SiteComparison => "site-comparison",
            };
            out.value("p_c_lower", b.lower, 0.0, crit);
            out.value("p_c_upper", b.upper, 0.0, crit);
            if let Some(p) = b.printed_lower {
                out.push("p_c_printed_lower", Some(p), None, crit, "not_a_bound");
            }
            if let Some(Law::Geometric(p)) = cfg.radius_law() {
                let status = if p > b.upper {
                    "survives_pos_prob"
                } else if p < b.lower {
                    "dies_as"
                } else {
                    "inconclusive"
                };
                out.push("classification", Some(p), None, crit, status);
            }
        }
        Model::ReverseCone => {
            let spec = cfg.tree().expect("validated");
            let law = effective_law(cfg)?;
            match (&spec, tree_degree(&spec)) {
                (TreeSpec::GaltonWatson(d), _) => {
                    let (r, a) = gw_reverse_class(d, &Law::point(1), &law, tol)?;
                    out.report("", &r);
                    out.extended("phi1", a.phi1, "gw-reverse");
                    out.value("phi2", a.phi2, a.phi2_remainder, "gw-reverse");
                }
                (_, Some((d, _))) => out.report("", &reverse_cone_class(d, &law, tol)?),
                _ => return Err(Error::Precondition("reverse cone analytics need homog, plus or gw".into())),
            }
        }
        Model::EnvFireworks => match (cfg.stations_seq(), cfg.radius_seq()) {
            (Some(n), Some(r)) => {
                let rep = env_hetero_criteria(&n, &r, tol, cfg.horizon)?;
                out.report("fireworks", &rep.fireworks);
                out.report("reverse", &rep.reverse);
            }
            _ => {
                let (r, n) = laws(cfg)?;
                let n = n.expect("validated");
                out.report("criteria", &env_line_criteria(&n, &r)?);
                out.report("", &env_fireworks_survival(&n, &r, tol));
            }
        },
        Model::EnvReverse => {
            let (r, n) = laws(cfg)?;
            out.report("", &env_reverse_w(&n.expect("validated"), &r)?);
        }
        Model::MarkovCoverage => out.coverage(&markov_coverage_criteria(&markov_config(cfg))?),
        Model::BooleanCoverage => out.coverage(&boolean_criteria(&boolean_config(cfg))?),
    }
    Ok(out.rows)
}

fn reverse_rows(out: &mut RowSink, law: &Law, tol: f64) -> Result<()> {
    out.report("", &reverse_survival_class(law)?);
    if let Ok(g) = reverse_final_law(law, tol) {
        let crit = "final-spreader-law";
        out.value("final_spreaders_p", g.p, g.high - g.low, crit);
        let mean = |p: f64| (1.0 - p) / p;
        out.value("final_spreaders_mean", mean(g.p), mean(g.low) - mean(g.high), crit);
    }
    if let Ok(c) = spreader_density(law, tol) {
        let crit = "spreader-density";
        out.extended("mu", c.mu, crit);
        if let Some(s) = c.sigma2 {
            out.extended("sigma2", s, crit);
        }
        out.value("density", c.density, 0.0, crit);
    }
    Ok(())
}

/// The simulation a line or tree configuration describes.
pub fn experiment(cfg: &ExperimentConfig) -> Result<Experiment> {
    let radii = || -> Result<Radii> {
        Ok(match (cfg.radius_seq(), cfg.radius_law(), cfg.stations_law()) {
            (Some(seq), ..) => {
                if cfg.stations_seq().is_some() {
                    return Err(Error::Precondition("sequence stations are analysed, not simulated".into()));
                }
                Radii::Sequence(seq)
            }
            (None, Some(r), Some(n)) => Radii::env(n, r),
            (None, Some(r), None) => Radii::law(r),
            (None, None, _) => return Err(Error::Precondition("no radius law".into())),
        })
    };
    let tree = |model: TreeModel| -> Result<Experiment> {
        let spec = cfg.tree().expect("validated");
        Ok(Experiment::Tree(TreeTrial::new(model, spec, radii()?, cfg.horizon, cfg.max_vertices, cfg.eps_residual)?))
    };
    match cfg.model {
        Model::Fireworks | Model::EnvFireworks => Experiment::fireworks_line(radii()?, 1, cfg.horizon),
        Model::Reverse | Model::EnvReverse => {
            let r = match radii()? {
                Radii::Sequence(SequenceLaw::Constant(l)) => Radii::law(l),
                r => r,
            };
            Experiment::reverse_line(r, cfg.horizon, cfg.eps_residual)
        }
        Model::Cone => tree(TreeModel::Cone),
        Model::Disk => tree(TreeModel::Disk),
        Model::ReverseCone => tree(TreeModel::ReverseCone),
        Model::EnvCone => tree(TreeModel::EnvCone),
        Model::MarkovCoverage | Model::BooleanCoverage => {
            Err(Error::Precondition("coverage models are simulated by their own samplers".into()))
        }
    }
}

/// Upper bound on the censoring bias `E(estimate) − P(V)` from the finite-horizon recursions.
fn censoring_bias(cfg: &ExperimentConfig, survival_low: f64) -> Option<f64> {
    if cfg.radius_sequence.is_some() {
        return None;
    }
    let law = effective_law(cfg).ok()?;
    let reach = match cfg.model {
        Model::Fireworks | Model::EnvFireworks if cfg.horizon <= REACH_RECURSION_MAX => {
            fireworks_reach_probability(&law, cfg.horizon)
        }
        Model::Cone | Model::EnvCone => cone_reach_probability(&cfg.tree()?, &law, cfg.horizon, cfg.tolerance).ok()?.1,
        _ => return None,
    };
    Some((reach - survival_low).max(0.0))
}

/// Analytic survival bracket, when the model has one.
fn survival_bracket(cfg: &ExperimentConfig) -> Result<Option<(f64, f64)>> {
    if cfg.radius_sequence.is_some() {
        return Ok(None);
    }
    let law = effective_law(cfg)?;
    Ok(match cfg.model {
        Model::Fireworks | Model::EnvFireworks => {
            let r = fireworks_survival(&law, cfg.tolerance);
            r.bound_low.zip(r.bound_high)
        }
        Model::Cone | Model::EnvCone => match tree_degree(&cfg.tree().expect("validated")) {
            Some((d, at)) => Some(cone_survival_bounds(d, &law, at, cfg.tolerance)?),
            None => None,
        },
        _ => None,
    })
}

fn status_of(e: &Estimate) -> String {
    if e.truncated > 0 {
        format!("truncated={}", e.truncated)
    } else {
        "ok".into()
    }
}

fn sim_row(cfg: &ExperimentConfig, e: &Estimate, status: String) -> SimRow {
    SimRow {
        model: cfg.model.as_str().into(),
        substrate: cfg.substrate.clone(),
        params: cfg.params(),
        horizon: cfg.horizon,
        trials: e.trials,
        seed: e.master_seed,
        estimate: e.mean,
        ci_low: e.ci_low,
        ci_high: e.ci_high,
        bias_bound: e.bias_bound,
        status,
    }
}

pub fn simulate(cfg: &ExperimentConfig, workers: usize) -> Result<Vec<SimRow>> {
    if let Some(row) = simulate_coverage(cfg, workers)? {
        return Ok(vec![row]);
    }
    let e = estimate(cfg, workers)?;
    Ok(vec![sim_row(cfg, &e, status_of(&e))])
}

/// Monte Carlo estimate with the best available bias bound attached.
pub fn estimate(cfg: &ExperimentConfig, workers: usize) -> Result<Estimate> {
    let exp = experiment(cfg)?;
    let mut e = exp.estimate(cfg.trials, cfg.master_seed, workers)?;
    if e.bias_bound.is_none() {
        if let Some((lo, _)) = survival_bracket(cfg)? {
            e.bias_bound = censoring_bias(cfg, lo);
        }
    }
    Ok(e)
}

/// Coverage simulations report the frequency of runs whose second half `[T/2, T]` is covered
/// completely, next to the criteria verdict.
fn simulate_coverage(cfg: &ExperimentConfig, workers: usize) -> Result<Option<SimRow>> {
    let half = cfg.horizon as f64 / 2.0;
    let (hits, class) = match cfg.model {
        Model::MarkovCoverage => {
            let mc = markov_config(cfg);
            let class = markov_coverage_criteria(&mc)?.class;
            let runs = run_trials(cfg.trials, cfg.master_seed, workers, |k| sim_markov_coverage(&mc, &mut keyed_stream(k)))?;
            let mut hits = 0u64;
            for r in runs {
                hits += u64::from(r?.last_uncovered.is_none_or(|u| (u as f64) < half));
            }
            (hits, class)
        }
        Model::BooleanCoverage => {
            let bc = boolean_config(cfg);
            if bc.d != 1 {
                return Err(Error::Precondition("Boolean coverage is simulated for d = 1 only".into()));
            }
            let class = boolean_criteria(&bc)?.class;
            let runs = run_trials(cfg.trials, cfg.master_seed, workers, |k| sim_boolean_1d(&bc, &mut keyed_stream(k)))?;
            let mut hits = 0u64;
            for r in runs {
                hits += u64::from(r?.uncovered_sup < half);
            }
            (hits, class)
        }
        _ => return Ok(None),
    };
    let (ci_low, ci_high) = wilson(hits, cfg.trials);
    Ok(Some(SimRow {
        model: cfg.model.as_str().into(),
        substrate: cfg.substrate.clone(),
        params: cfg.params(),
        horizon: cfg.horizon,
        trials: cfg.trials,
        seed: cfg.master_seed,
        estimate: hits as f64 / cfg.trials as f64,
        ci_low,
        ci_high,
        bias_bound: None,
        status: class.as_str().into(),
    }))
}

fn distance(x: f64, lo: f64, hi: f64) -> f64 {
    if x < lo {
        lo - x
    } else if x > hi {
        x - hi
    } else {
        0.0
    }
}

/// Standard error with a floor at the Wilson half-width, so that frequencies of 0 or 1 still
/// carry noise.
fn sigma(e: &Estimate) -> f64 {
    e.std_error().max((e.ci_high - e.ci_low) / (2.0 * 1.959_963_984_540_054))
}

pub fn xval(cfg: &ExperimentConfig, workers: usize) -> Result<Vec<XvalRow>> {
    let row = |quantity: &str, e: &Estimate, analytic: Option<(f64, f64)>, estimate: f64, sd: f64, bias: Option<f64>, ci: (f64, f64)| {
        let (budget, discrepancy, verdict) = match analytic {
            Some((lo, hi)) => {
                let budget = bias.unwrap_or(0.0) + 3.0 * sd;
                let d = distance(estimate, lo, hi);
                (Some(budget), Some(d), if d <= budget { "pass" } else { "fail" })
            }
            None => (None, None, "inconclusive"),
        };
        XvalRow {
            model: cfg.model.as_str().into(),
            substrate: cfg.substrate.clone(),
            params: cfg.params(),
            quantity: quantity.into(),
            horizon: cfg.horizon,
            trials: e.trials,
            seed: e.master_seed,
            analytic_low: analytic.map(|a| a.0),
            analytic_high: analytic.map(|a| a.1),
            estimate,
            ci_low: ci.0,
            ci_high: ci.1,
            bias_bound: bias,
            budget,
            discrepancy,
            verdict: verdict.into(),
        }
    };
    if let Some(sim) = simulate_coverage(cfg, workers)? {
        // Eventual coverage has no finite-horizon analytic counterpart.
        return Ok(vec![XvalRow {
            model: sim.model,
            substrate: sim.substrate,
            params: sim.params,
            quantity: "second_half_covered".into(),
            horizon: sim.horizon,
            trials: sim.trials,
            seed: sim.seed,
            analytic_low: None,
            analytic_high: None,
            estimate: sim.estimate,
            ci_low: sim.ci_low,
            ci_high: sim.ci_high,
            bias_bound: None,
            budget: None,
            discrepancy: None,
            verdict: "inconclusive".into(),
        }]);
    }
    let e = estimate(cfg, workers)?;
    let ci = (e.ci_low, e.ci_high);
    if matches!(cfg.model, Model::Reverse | Model::EnvReverse) && cfg.radius_sequence.is_none() {
        let law = effective_law(cfg)?;
        if let Ok(g) = reverse_final_law(&law, cfg.tolerance) {
            // Mean final spreaders: geometric law with variance (1 − p)/p².
            let mean = |p: f64| (1.0 - p) / p;
            let sd = ((1.0 - g.p) / (g.p * g.p) / e.counted as f64).sqrt();
            let h = cfg.horizon as f64;
            let bias = cfg.eps_residual * h + e.survived as f64 / e.counted as f64 * h;
            let z = 1.959_963_984_540_054 * sd;
            let ci = (e.mean_spreaders - z, e.mean_spreaders + z);
            return Ok(vec![row("final_spreaders_mean", &e, Some((mean(g.high), mean(g.low))), e.mean_spreaders, sd, Some(bias), ci)]);
        }
        let r = reverse_survival_class(&law)?;
        let analytic = r.probability.map(|p| (p, p));
        return Ok(vec![row("survival", &e, analytic, e.mean, sigma(&e), e.bias_bound, ci)]);
    }
    let bracket = survival_bracket(cfg)?;
    Ok(vec![row("survival", &e, bracket, e.mean, sigma(&e), e.bias_bound, ci)])
}
