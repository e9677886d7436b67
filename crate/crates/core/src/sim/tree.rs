use std::str::FromStr;

use serde::Serialize;

use crate::dist::Law;
use crate::error::{parse_err, Error, Result};
use crate::tree::TreeSpec;

use super::radii::{Radii, Sampler};
use super::rng::{child_id, unit, SALT_CHILDREN};
use super::{Status, TrialOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeModel {
    /// An informed vertex informs its descendants within its radius.
    Cone,
    /// An informed vertex informs every vertex within its radius.
    Disk,
    /// A vertex hears when an informed ancestor lies within its radius.
    ReverseCone,
    /// Cone with a random number of stations per vertex.
    EnvCone,
}

impl FromStr for TreeModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "cone" => TreeModel::Cone,
            "disk" => TreeModel::Disk,
            "reverse_cone" => TreeModel::ReverseCone,
            "env_cone" => TreeModel::EnvCone,
            _ => return Err(parse_err(s, "expected cone, disk, reverse_cone or env_cone")),
        })
    }
}

/// Children counts, deterministic or sampled per vertex for Galton-Watson trees.
#[derive(Debug, Clone)]
pub struct Substrate {
    spec: TreeSpec,
    offspring: Option<Sampler>,
}

impl Substrate {
    pub fn new(spec: TreeSpec) -> Result<Self> {
        spec.validate()?;
        let offspring = match &spec {
            TreeSpec::GaltonWatson(law) => Some(Sampler::new(law.clone())),
            _ => None,
        };
        Ok(Self { spec, offspring })
    }

    pub fn spec(&self) -> &TreeSpec {
        &self.spec
    }

    fn children(&self, key: u64, id: u64, depth: u64) -> u64 {
        match &self.offspring {
            Some(s) => s.quantile(unit(key, id, SALT_CHILDREN)),
            None => self.spec.children(depth).expect("deterministic tree"),
        }
    }

    /// Expected number of children per vertex, maximised over levels.
    fn branching(&self) -> f64 {
        match &self.spec {
            TreeSpec::GaltonWatson(law) => law.mean().map_or(f64::INFINITY, |m| m.value()),
            s => s.max_degree().map_or(f64::INFINITY, |d| d as f64),
        }
    }
}

/// Pruning bound for the reverse cone: below an uninformed vertex at gap `g`, the expected
/// number of descendants that hear directly from above is at most `Σ_{j≥1} b^j P(R ≥ g+j)`.
#[derive(Debug, Clone)]
pub struct PruneTable {
    bound: Vec<f64>,
}

impl PruneTable {
    pub fn new(law: &Law, branching: f64, horizon: u64) -> Self {
        let finite = law.max_support().is_some() || law.class().weighted_sum_finite(branching) == Some(true);
        if !finite {
            return Self { bound: Vec::new() };
        }
        let maj = law.majorant();
        let bound = (0..=horizon).map(|g| Self::series(law, maj.as_ref(), branching, g)).collect();
        Self { bound }
    }

    fn series(law: &Law, maj: Option<&crate::dist::Majorant>, b: f64, g: u64) -> f64 {
        let mut s = 0.0;
        let mut w = b;
        for j in 1..=1_000_000u64 {
            let t = law.tail(g + j);
            if t == 0.0 {
                return s;
            }
            s += w * t;
            if j >= 16 && w * t < 1e-18 * s.max(1e-300) {
                // Σ_{n>k} b^{n−g} tail(n) from the majorant.
                let k = g + j;
                return match maj.and_then(|m| m.remainder(b, k)) {
                    Some(r) => s + (r.ln() - g as f64 * b.ln()).exp(),
                    None => f64::INFINITY,
                };
            }
            w *= b;
        }
        f64::INFINITY
    }

    /// `Some(exact)` when the subtree below a vertex at gap `g` may be dropped; `exact` means
    /// no descendant can ever join.
    fn prunable(&self, g: u64, eps: f64) -> Option<bool> {
        let b = *self.bound.get(g as usize)?;
        (b == 0.0 || b < eps).then_some(b == 0.0)
    }
}

/// Fixed inputs of a tree trial.
#[derive(Debug, Clone)]
pub struct TreeTrial {
    pub model: TreeModel,
    pub substrate: Substrate,
    pub radii: Radii,
    pub horizon: u64,
    pub max_vertices: u64,
    /// Reverse cone only: uninformed subtrees whose pruning bound is below this are dropped.
    pub eps: f64,
    prune: Option<PruneTable>,
}

impl TreeTrial {
    pub fn new(model: TreeModel, spec: TreeSpec, radii: Radii, horizon: u64, max_vertices: u64, eps: f64) -> Result<Self> {
        let substrate = Substrate::new(spec)?;
        if matches!(model, TreeModel::EnvCone) != matches!(radii, Radii::Env { .. }) {
            return Err(Error::Precondition("env_cone needs station and radius laws, other models one radius law".into()));
        }
        if matches!(radii, Radii::Sequence(_)) {
            return Err(Error::Precondition("tree trials take a single radius law".into()));
        }
        let prune = match model {
            TreeModel::ReverseCone => {
                let law = radii.effective_law().expect("single law");
                Some(PruneTable::new(&law, substrate.branching(), horizon))
            }
            _ => None,
        };
        Ok(Self { model, substrate, radii, horizon, max_vertices, eps, prune })
    }

    pub fn run(&self, key: u64) -> TrialOutcome {
        match self.model {
            TreeModel::Cone | TreeModel::EnvCone => self.cone(key),
            TreeModel::Disk => self.disk(key),
            TreeModel::ReverseCone => self.reverse_cone(key),
        }
    }

    /// Depth-first search over informed vertices, carrying the largest remaining reach
    /// `c(v) = max(c(parent) − 1, R_v)`.
    fn cone(&self, key: u64) -> TrialOutcome {
        let mut stack = vec![(1u64, 0u64, self.radii.draw(key, 1, 0))];
        let (mut informed, mut deepest) = (1u64, 0u64);
        while let Some((id, depth, c)) = stack.pop() {
            deepest = deepest.max(depth);
            if depth >= self.horizon {
                return TrialOutcome::new(Status::SurvivedToHorizon, informed, informed, depth);
            }
            if c == 0 {
                continue;
            }
            for i in 0..self.substrate.children(key, id, depth) {
                let child = child_id(id, i);
                let r = self.radii.draw(key, child, depth + 1);
                stack.push((child, depth + 1, (c - 1).max(r)));
                informed += 1;
            }
            if informed > self.max_vertices {
                return TrialOutcome::new(Status::Truncated, informed, informed, deepest);
            }
        }
        TrialOutcome::new(Status::Died, informed, informed, deepest)
    }

    /// Budget relaxation over an explicit arena: `b(v) = max_u (R_u − d(u, v))` over informed
    /// `u`; `v` is informed once `b(v) ≥ 0`.
    fn disk(&self, key: u64) -> TrialOutcome {
        struct Node {
            id: u64,
            parent: u32,
            depth: u64,
            budget: i64,
            children: Option<(u32, u32)>,
        }
        const NONE: u32 = u32::MAX;
        let mut nodes = vec![Node { id: 1, parent: NONE, depth: 0, budget: self.radii.draw(key, 1, 0) as i64, children: None }];
        let mut work = vec![0u32];
        let (mut informed, mut deepest) = (1u64, 0u64);
        while let Some(v) = work.pop() {
            let b = nodes[v as usize].budget;
            if b < 1 {
                continue;
            }
            if nodes[v as usize].children.is_none() {
                let (id, depth) = (nodes[v as usize].id, nodes[v as usize].depth);
                let k = self.substrate.children(key, id, depth);
                if nodes.len() as u64 + k > self.max_vertices {
                    return TrialOutcome::new(Status::Truncated, informed, informed, deepest);
                }
                let first = nodes.len() as u32;
                for i in 0..k {
                    nodes.push(Node { id: child_id(id, i), parent: v, depth: depth + 1, budget: -1, children: None });
                }
                nodes[v as usize].children = Some((first, nodes.len() as u32));
            }
            let (lo, hi) = nodes[v as usize].children.expect("expanded");
            let parent = nodes[v as usize].parent;
            let neighbours = (lo..hi).chain((parent != NONE).then_some(parent));
            for w in neighbours {
                let cand = b - 1;
                let node = &mut nodes[w as usize];
                if cand <= node.budget {
                    continue;
                }
                if node.budget < 0 {
                    informed += 1;
                    deepest = deepest.max(node.depth);
                    if node.depth >= self.horizon {
                        return TrialOutcome::new(Status::SurvivedToHorizon, informed, informed, node.depth);
                    }
                    let r = self.radii.draw(key, node.id, node.depth) as i64;
                    node.budget = cand.max(r);
                } else {
                    node.budget = cand;
                }
                work.push(w);
            }
        }
        TrialOutcome::new(Status::Died, informed, informed, deepest)
    }

    /// Depth-first search carrying the gap to the nearest informed ancestor.
    fn reverse_cone(&self, key: u64) -> TrialOutcome {
        let prune = self.prune.as_ref().expect("reverse cone table");
        let mut stack = vec![(1u64, 0u64, 0u64)];
        let (mut informed, mut visited, mut deepest) = (1u64, 1u64, 0u64);
        let mut pruned = false;
        while let Some((id, depth, gap)) = stack.pop() {
            if gap == 0 {
                deepest = deepest.max(depth);
                if depth >= self.horizon {
                    return TrialOutcome::new(Status::SurvivedToHorizon, informed, informed, depth);
                }
            } else if let Some(exact) = prune.prunable(gap, self.eps) {
                pruned |= !exact;
                continue;
            }
            if depth >= self.horizon {
                continue;
            }
            for i in 0..self.substrate.children(key, id, depth) {
                let child = child_id(id, i);
                let g = gap + 1;
                let joins = self.radii.draw(key, child, depth + 1) >= g;
                if joins {
                    informed += 1;
                }
                visited += 1;
                stack.push((child, depth + 1, if joins { 0 } else { g }));
            }
            if visited > self.max_vertices {
                return TrialOutcome::new(Status::Truncated, informed, informed, deepest);
            }
        }
        let status = if pruned { Status::DeadByResidual } else { Status::Died };
        TrialOutcome::new(status, informed, informed, deepest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::rng::trial_key;

    fn trial(model: TreeModel, spec: &str, law: Law, horizon: u64) -> TreeTrial {
        TreeTrial::new(model, spec.parse().unwrap(), Radii::law(law), horizon, 1 << 20, 1e-9).unwrap()
    }

    #[test]
    fn zero_radius_informs_only_the_root() {
        for model in [TreeModel::Cone, TreeModel::Disk, TreeModel::ReverseCone] {
            let t = trial(model, "homog:2", Law::point(0), 10).run(5);
            assert_eq!((t.status, t.informed), (Status::Died, 1), "{model:?}");
        }
    }

    #[test]
    fn unit_radius_reaches_the_horizon() {
        for model in [TreeModel::Cone, TreeModel::Disk, TreeModel::ReverseCone] {
            let t = trial(model, "periodic:2,3", Law::point(1), 12).run(5);
            assert_eq!(t.status, Status::SurvivedToHorizon, "{model:?}");
        }
    }

    #[test]
    fn cone_radius_two_counts() {
        // R ≡ 2 on T_2⁺ to depth 3: the DFS stops at the first depth-3 vertex.
        let t = trial(TreeModel::Cone, "plus:2", Law::point(2), 3).run(1);
        assert_eq!(t.status, Status::SurvivedToHorizon);
        assert_eq!(t.reach, 3);
    }

    #[test]
    fn disk_spreads_upwards() {
        // Root radius 0 informs nobody; with radius 1 everywhere the whole tree is reached.
        let law = Law::bernoulli(1.0).unwrap();
        let t = trial(TreeModel::Disk, "homog:2", law, 4).run(3);
        assert_eq!(t.status, Status::SurvivedToHorizon);
    }

    #[test]
    fn gw_extinct_tree_dies() {
        let spec: TreeSpec = "gw:offspring=binom:2:0.6".parse().unwrap();
        let t = TreeTrial::new(TreeModel::Cone, spec, Radii::law(Law::point(5)), 200, 1 << 22, 0.0).unwrap();
        let mut died = 0;
        for i in 0..2000 {
            if t.run(trial_key(1, i)).status == Status::Died {
                died += 1;
            }
        }
        // Extinction probability of Binomial(2, 0.6): (0.4/0.6)² = 4/9.
        let f = died as f64 / 2000.0;
        assert!((f - 4.0 / 9.0).abs() < 0.04, "{f}");
    }

    #[test]
    fn order_free_realisation() {
        let t = trial(TreeModel::Disk, "homog:2", Law::geometric(0.4).unwrap(), 15);
        for i in 0..50 {
            let k = trial_key(8, i);
            assert_eq!(t.run(k), t.run(k));
        }
    }
}
