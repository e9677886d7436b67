use serde::Serialize;

/// Verdict on survival of a process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    DiesAs,
    SurvivesPosProb,
    SurvivesAs,
    Inconclusive,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::DiesAs => "dies_as",
            Classification::SurvivesPosProb => "survives_pos_prob",
            Classification::SurvivesAs => "survives_as",
            Classification::Inconclusive => "inconclusive",
        }
    }

    pub fn survives(&self) -> bool {
        matches!(self, Classification::SurvivesAs | Classification::SurvivesPosProb)
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of an analytic survival evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalReport {
    pub classification: Classification,
    pub probability: Option<f64>,
    pub bound_low: Option<f64>,
    pub bound_high: Option<f64>,
    /// Width of the interval that provably contains the reported quantity.
    pub remainder_bound: f64,
    /// Tag naming the criterion that settled the verdict.
    pub criterion: &'static str,
    /// Intermediate quantities worth reporting (limits, probe minima, series values).
    pub details: Vec<(&'static str, f64)>,
    pub notes: Vec<String>,
}

impl SurvivalReport {
    pub fn new(classification: Classification, criterion: &'static str) -> Self {
        Self {
            classification,
            probability: None,
            bound_low: None,
            bound_high: None,
            remainder_bound: 0.0,
            criterion,
            details: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn inconclusive(criterion: &'static str) -> Self {
        Self::new(Classification::Inconclusive, criterion)
    }

    /// Exact probability; the classification follows from it.
    pub fn exact(probability: f64, criterion: &'static str) -> Self {
        let classification = if probability == 0.0 {
            Classification::DiesAs
        } else if probability == 1.0 {
            Classification::SurvivesAs
        } else {
            Classification::SurvivesPosProb
        };
        Self {
            probability: Some(probability),
            bound_low: Some(probability),
            bound_high: Some(probability),
            ..Self::new(classification, criterion)
        }
    }

    /// Probability known to lie in `[low, high]`.
    pub fn bracket(low: f64, high: f64, criterion: &'static str) -> Self {
        let classification = if low > 0.0 {
            if low >= 1.0 {
                Classification::SurvivesAs
            } else {
                Classification::SurvivesPosProb
            }
        } else if high == 0.0 {
            Classification::DiesAs
        } else {
            Classification::Inconclusive
        };
        Self {
            probability: Some(0.5 * (low + high)),
            bound_low: Some(low),
            bound_high: Some(high),
            remainder_bound: high - low,
            ..Self::new(classification, criterion)
        }
    }

    pub fn detail(mut self, name: &'static str, value: f64) -> Self {
        self.details.push((name, value));
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.details.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }
}
