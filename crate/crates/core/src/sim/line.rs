use crate::dist::Law;
use crate::error::{Error, Result};

use super::radii::Radii;
use super::{Status, TrialOutcome};

/// Fireworks on the half-line with vertices at `0, m, 2m, …`.
///
/// `informed` counts vertices that heard the rumour and fired; all of them are spreaders.
/// The reach is reported capped at `horizon`.
pub fn run_fireworks_line(radii: &Radii, gap: u64, horizon: u64, key: u64) -> TrialOutcome {
    let gap = gap.max(1);
    let mut reach = radii.draw(key, 0, 0);
    let mut fired = 1u64;
    let mut n = 1u64;
    loop {
        if reach >= horizon {
            return TrialOutcome::new(Status::SurvivedToHorizon, fired, fired, horizon);
        }
        let pos = n * gap;
        if pos > reach {
            return TrialOutcome::new(Status::Died, fired, fired, reach);
        }
        reach = reach.max(pos.saturating_add(radii.draw(key, n, n)));
        fired += 1;
        n += 1;
    }
}

/// `1 − ∏_{k≥g} P(R ≤ k)`: the chance that some vertex past a stall of length `g` still
/// connects, bounded from above.
#[derive(Debug, Clone)]
pub struct ResidualTable {
    /// `suffix[g] ≥ Σ_{k≥g} −ln P(R ≤ k)` for `g ≤ len`; empty when the sum diverges.
    suffix: Vec<f64>,
    /// Beyond `suffix`: residual 0 past the support, or 1 when unknown.
    beyond: f64,
    infinite: bool,
}

impl ResidualTable {
    pub fn new(law: &Law, horizon: u64) -> Result<Self> {
        if let Some(m) = law.max_support() {
            let suffix = (0..=m).rev().scan(0.0, |s, k| {
                *s += -(-law.tail(k + 1)).ln_1p();
                Some(*s)
            });
            let mut suffix: Vec<f64> = suffix.collect();
            suffix.reverse();
            return Ok(Self { suffix, beyond: 0.0, infinite: false });
        }
        match law.class().mean_finite() {
            Some(false) => return Ok(Self { suffix: Vec::new(), beyond: 1.0, infinite: true }),
            None => return Err(Error::Unclassifiable(format!("cannot decide E(R) < ∞ for {law}"))),
            Some(true) => {}
        }
        let maj = law
            .majorant()
            .ok_or_else(|| Error::Unclassifiable(format!("no tail majorant for {law}")))?;
        let mut k_max = horizon.max(maj.from).max(64);
        let rem = loop {
            if let Some(r) = maj.remainder(1.0, k_max + 1) {
                let t = law.tail(k_max + 2);
                break r / (1.0 - t);
            }
            k_max = k_max
                .checked_mul(2)
                .ok_or_else(|| Error::Unclassifiable(format!("no usable tail remainder for {law}")))?;
        };
        let mut suffix = vec![0.0; k_max as usize + 1];
        let mut s = rem;
        for k in (0..=k_max).rev() {
            s += -(-law.tail(k + 1)).ln_1p();
            suffix[k as usize] = s;
        }
        Ok(Self { suffix, beyond: 1.0, infinite: false })
    }

    /// The sum diverges: every stall is followed by another join almost surely.
    pub fn is_infinite(&self) -> bool {
        self.infinite
    }

    pub fn residual(&self, g: u64) -> f64 {
        if self.infinite {
            return 1.0;
        }
        match self.suffix.get(g as usize) {
            Some(&s) => -(-s).exp_m1(),
            None if self.beyond == 0.0 => 0.0,
            // Past the table the first entry still bounds the tail.
            None => -(-self.suffix.last().copied().unwrap_or(0.0)).exp_m1(),
        }
    }
}

/// Reverse fireworks: vertex `u` joins when `u − r ≤ R_u`, `r` the rightmost informed vertex.
///
/// After each failure the residual bound is consulted; the trial is `dead_by_residual` once it
/// drops below `eps`, and `died` when it is exactly 0.
pub fn run_reverse_line(radii: &Radii, residual: &ResidualTable, horizon: u64, eps: f64, key: u64) -> TrialOutcome {
    let mut r = 0u64;
    let mut z = 0u64;
    let mut last = 1.0;
    for u in 1..=horizon {
        if radii.draw(key, u, u) >= u - r {
            r = u;
            z += 1;
            continue;
        }
        last = residual.residual(u - r);
        if last == 0.0 {
            return TrialOutcome { residual_mass: Some(0.0), ..TrialOutcome::new(Status::Died, z, z + 1, r) };
        }
        if last < eps {
            return TrialOutcome { residual_mass: Some(last), ..TrialOutcome::new(Status::DeadByResidual, z, z + 1, r) };
        }
    }
    let last = if r == horizon { residual.residual(0) } else { last };
    TrialOutcome { residual_mass: Some(last), ..TrialOutcome::new(Status::SurvivedToHorizon, z, z + 1, r) }
}
