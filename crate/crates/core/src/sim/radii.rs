use crate::dist::{search_quantile, Law, SequenceLaw};

use super::rng::{child_id, unit, SALT_RADIUS, SALT_STATIONS, SALT_STATION_RADIUS};

/// Station counts up to this are sampled one radius at a time.
const EXPLICIT_STATIONS: u64 = 64;

/// Inverse-transform sampler with the head of the tail tabulated.
#[derive(Debug, Clone)]
pub struct Sampler {
    law: Law,
    /// `tail(k)` for `k = 1..=table.len()`.
    table: Vec<f64>,
    /// The table reaches the end of the support.
    complete: bool,
}

impl Sampler {
    pub fn new(law: Law) -> Self {
        let (len, complete) = match law.max_support() {
            Some(m) if m <= 4096 => (m as usize, true),
            _ => (64, false),
        };
        let table = (1..=len as u64).map(|k| law.tail(k)).collect();
        Self { law, table, complete }
    }

    pub fn law(&self) -> &Law {
        &self.law
    }

    /// `max{k : P(R ≥ k) ≥ u}`.
    pub fn quantile(&self, u: f64) -> u64 {
        match self.table.last() {
            None => return 0,
            Some(&last) if last >= u => {
                return if self.complete { self.table.len() as u64 } else { self.law.quantile(u) };
            }
            _ => {}
        }
        // Number of leading entries with tail ≥ u.
        self.table.partition_point(|&t| t >= u) as u64
    }
}

/// Source of per-vertex radii.
#[derive(Debug, Clone)]
pub enum Radii {
    Law(Sampler),
    /// Radius of the vertex at position `n` follows the `n`-th law.
    Sequence(SequenceLaw),
    /// `N` stations with i.i.d. radii; the vertex acts with the largest.
    Env { stations: Sampler, radius: Sampler },
}

impl Radii {
    pub fn law(law: Law) -> Self {
        Radii::Law(Sampler::new(law))
    }

    pub fn env(stations: Law, radius: Law) -> Self {
        Radii::Env { stations: Sampler::new(stations), radius: Sampler::new(radius) }
    }

    /// Radius of vertex `id` at position (or depth) `n` in the trial with key `key`.
    pub fn draw(&self, key: u64, id: u64, n: u64) -> u64 {
        let u = unit(key, id, SALT_RADIUS);
        match self {
            Radii::Law(s) => s.quantile(u),
            Radii::Sequence(seq) => seq.quantile(n, u),
            Radii::Env { stations, radius } => {
                let count = stations.quantile(unit(key, id, SALT_STATIONS));
                if count <= EXPLICIT_STATIONS {
                    // Each station draws its own radius.
                    return (0..count)
                        .map(|j| radius.quantile(unit(key, child_id(id, j), SALT_STATION_RADIUS)))
                        .max()
                        .unwrap_or(0);
                }
                // The maximum of many radii, inverted with one uniform.
                let cf = count as f64;
                let law = radius.law();
                search_quantile(|k| -(cf * (-law.tail(k)).ln_1p()).exp_m1(), u, law.max_support())
            }
        }
    }

    /// Single-station law with the same per-vertex distribution, when one exists.
    pub fn effective_law(&self) -> Option<Law> {
        match self {
            Radii::Law(s) => Some(s.law().clone()),
            Radii::Sequence(SequenceLaw::Constant(l)) => Some(l.clone()),
            Radii::Sequence(_) => None,
            Radii::Env { stations, radius } => Some(Law::annealed(stations.law().clone(), radius.law().clone())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn table_matches_law_quantile() {
        for law in [Law::binomial(4, 0.5).unwrap(), Law::geometric(0.7).unwrap(), Law::PowerLawExample, Law::point(3)] {
            let s = Sampler::new(law.clone());
            for i in 1..=2000u64 {
                let u = i as f64 / 2000.0;
                assert_eq!(s.quantile(u), law.quantile(u), "{law} u={u}");
            }
            assert_eq!(s.quantile(1e-12), law.quantile(1e-12));
        }
    }

    #[test]
    fn station_maximum_has_annealed_law() {
        let radii = Radii::env(Law::binomial(3, 0.5).unwrap(), Law::geometric(0.5).unwrap());
        let annealed = radii.effective_law().unwrap();
        let n = 100_000u64;
        let mut counts = [0u64; 4];
        for id in 0..n {
            let r = radii.draw(9, id, 0) as usize;
            if r < 4 {
                counts[r] += 1;
            }
        }
        for (k, &c) in counts.iter().enumerate() {
            let p = annealed.pmf(k as u64);
            let sd = (p * (1.0 - p) / n as f64).sqrt();
            assert!((c as f64 / n as f64 - p).abs() < 5.0 * sd, "k={k}");
        }
    }

    proptest! {
        #[test]
        fn quantile_is_monotone(a in 0.0001f64..1.0, b in 0.0001f64..1.0) {
            let s = Sampler::new(Law::geometric(0.6).unwrap());
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(s.quantile(lo) >= s.quantile(hi));
        }
    }
}
