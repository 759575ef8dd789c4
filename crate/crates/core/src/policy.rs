//! Visit orderings for the three mission policies.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::scenario::{Patient, PatientId, Scenario};
use crate::stream::Stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyId {
    /// Teleoperation on GPS, operator-discretion ordering.
    Pi1Teleop,
    /// Autonomous navigation, nearest-neighbor ordering.
    Pi2Auto,
    /// Twin-fused localization, triage-score ordering.
    Pi3Geodt,
}

impl PolicyId {
    pub const ALL: [PolicyId; 3] = [PolicyId::Pi1Teleop, PolicyId::Pi2Auto, PolicyId::Pi3Geodt];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyId::Pi1Teleop => "pi1_teleop",
            PolicyId::Pi2Auto => "pi2_auto",
            PolicyId::Pi3Geodt => "pi3_geodt",
        }
    }

    /// Stable index used for stream derivation.
    pub fn index(self) -> u16 {
        match self {
            PolicyId::Pi1Teleop => 0,
            PolicyId::Pi2Auto => 1,
            PolicyId::Pi3Geodt => 2,
        }
    }
}

impl fmt::Display for PolicyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pi1_teleop" | "pi1" => Ok(PolicyId::Pi1Teleop),
            "pi2_auto" | "pi2" => Ok(PolicyId::Pi2Auto),
            "pi3_geodt" | "pi3" => Ok(PolicyId::Pi3Geodt),
            other => Err(Error::config("policies", format!("unknown policy `{other}`"))),
        }
    }
}

/// A visit sequence; a permutation of the scenario's patient ids.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct VisitPlan {
    pub order: Vec<PatientId>,
}

impl VisitPlan {
    pub fn is_permutation_of(&self, scenario: &Scenario) -> bool {
        let mut a = self.order.clone();
        let mut b: Vec<PatientId> = scenario.patients.iter().map(|p| p.id).collect();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }
}

/// Weights of the triage priority score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TriageWeights {
    pub w_s: f64,
    pub w_u: f64,
    pub w_a: f64,
    /// Urgency time constant, minutes.
    pub delta0: f64,
}

impl Default for TriageWeights {
    fn default() -> Self {
        TriageWeights {
            w_s: 1.0,
            w_u: 1.0,
            w_a: 0.5,
            delta0: 60.0,
        }
    }
}

impl TriageWeights {
    pub fn validate(&self) -> Result<()> {
        for (k, v) in [("w_s", self.w_s), ("w_u", self.w_u), ("w_a", self.w_a)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(format!("triage.{k}"), "must be nonnegative"));
            }
        }
        if !(self.w_s + self.w_u + self.w_a > 0.0) {
            return Err(Error::config("triage.w_s", "weights must not all be zero"));
        }
        if !(self.delta0 > 0.0 && self.delta0.is_finite()) {
            return Err(Error::config("triage.delta0", "must be positive"));
        }
        Ok(())
    }

    pub fn scaled(&self, c: f64) -> Self {
        TriageWeights {
            w_s: self.w_s * c,
            w_u: self.w_u * c,
            w_a: self.w_a * c,
            delta0: self.delta0,
        }
    }
}

/// v = w_s·s + w_u·exp(−Δ/Δ₀) + w_a·a
pub fn triage_score(patient: &Patient, weights: &TriageWeights) -> f64 {
    weights.w_s * patient.severity
        + weights.w_u * (-patient.time_to_criticality / weights.delta0).exp()
        + weights.w_a * patient.accessibility
}

/// Argsort by score, highest first; ties go to the lower id.
pub fn order_triage(scenario: &Scenario, weights: &TriageWeights) -> VisitPlan {
    let mut scored: Vec<(f64, PatientId)> = scenario
        .patients
        .iter()
        .map(|p| (triage_score(p, weights), p.id))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    VisitPlan {
        order: scored.into_iter().map(|(_, id)| id).collect(),
    }
}

/// Index into `remaining` of the patient nearest `from`; ties to lower id.
fn nearest(from: Point, remaining: &[&Patient]) -> usize {
    let mut best = 0;
    for (i, p) in remaining.iter().enumerate().skip(1) {
        let d = from.distance(p.position);
        let b = remaining[best];
        match d.total_cmp(&from.distance(b.position)) {
            Ordering::Less => best = i,
            Ordering::Equal if p.id < b.id => best = i,
            _ => {}
        }
    }
    best
}

/// Greedy nearest-neighbor tour starting at the base.
pub fn order_heuristic(scenario: &Scenario) -> VisitPlan {
    nearest_neighbor(scenario, |_| None)
}

/// Nearest-neighbor, except that at each step the simulated operator picks
/// a uniformly random unvisited patient with probability `error_prob`.
pub fn order_teleop(scenario: &Scenario, error_prob: f64, stream: &mut Stream) -> VisitPlan {
    nearest_neighbor(scenario, |n| {
        if stream.random::<f64>() < error_prob {
            Some(stream.random_range(0..n))
        } else {
            None
        }
    })
}

fn nearest_neighbor(scenario: &Scenario, mut detour: impl FnMut(usize) -> Option<usize>) -> VisitPlan {
    let mut remaining: Vec<&Patient> = scenario.patients.iter().collect();
    remaining.sort_by_key(|p| p.id);
    let mut here = scenario.base_position;
    let mut order = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let pick = detour(remaining.len()).unwrap_or_else(|| nearest(here, &remaining));
        let p = remaining.remove(pick);
        here = p.position;
        order.push(p.id);
    }
    VisitPlan { order }
}
