//! Experimental conditions and stochastic patient fields.

use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::stream::Stream;

/// One experimental cell: a degradation level and a patient count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub condition_id: u32,
    pub delta: f64,
    pub patient_load: u32,
}

impl Condition {
    pub fn new(condition_id: u32, delta: f64, patient_load: u32) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::config("condition.delta", format!("{delta} is outside [0, 1]")));
        }
        if patient_load == 0 {
            return Err(Error::config("condition.patient_load", "must be at least 1"));
        }
        Ok(Condition {
            condition_id,
            delta,
            patient_load,
        })
    }
}

pub type PatientId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Patient {
    pub id: PatientId,
    pub position: Point,
    /// Severity in [0, 1].
    pub severity: f64,
    /// Minutes from mission start.
    pub detect_time: f64,
    /// Minutes until the patient becomes critical.
    pub time_to_criticality: f64,
    /// Terrain accessibility in (0, 1]; divides travel speed.
    pub accessibility: f64,
    pub high_severity: bool,
}

/// Distribution parameters of the patient field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioParams {
    /// Side length of the square operating area, meters.
    pub area_extent: f64,
    pub base_position: Point,
    pub severity_alpha: f64,
    pub severity_beta: f64,
    /// Severity at or above this is high severity.
    pub high_severity_threshold: f64,
    /// Time-to-criticality is `criticality_span * (1 - s) + criticality_floor`.
    pub criticality_span: f64,
    pub criticality_floor: f64,
    pub accessibility_min: f64,
    pub accessibility_max: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            area_extent: 10_000.0,
            base_position: Point::ORIGIN,
            severity_alpha: 2.0,
            severity_beta: 2.0,
            high_severity_threshold: 0.7,
            criticality_span: 240.0,
            criticality_floor: 10.0,
            accessibility_min: 0.2,
            accessibility_max: 1.0,
        }
    }
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<()> {
        let key = |k: &str| format!("scenario.{k}");
        if !(self.area_extent > 0.0 && self.area_extent.is_finite()) {
            return Err(Error::config(key("area_extent"), "must be positive"));
        }
        let b = self.base_position;
        if !(0.0..=self.area_extent).contains(&b.x) || !(0.0..=self.area_extent).contains(&b.y) {
            return Err(Error::config(key("base_position"), "must lie inside the area"));
        }
        if !(self.severity_alpha > 0.0) {
            return Err(Error::config(key("severity_alpha"), "must be positive"));
        }
        if !(self.severity_beta > 0.0) {
            return Err(Error::config(key("severity_beta"), "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.high_severity_threshold) {
            return Err(Error::config(key("high_severity_threshold"), "must be in [0, 1]"));
        }
        if !(self.criticality_span >= 0.0) {
            return Err(Error::config(key("criticality_span"), "must be nonnegative"));
        }
        if !(self.criticality_floor > 0.0) {
            return Err(Error::config(key("criticality_floor"), "must be positive"));
        }
        if !(self.accessibility_min > 0.0 && self.accessibility_min <= self.accessibility_max) {
            return Err(Error::config(key("accessibility_min"), "must be in (0, accessibility_max]"));
        }
        if !(self.accessibility_max <= 1.0) {
            return Err(Error::config(key("accessibility_max"), "must be at most 1"));
        }
        Ok(())
    }

    /// Closed-form mean of the severity distribution.
    pub fn severity_mean(&self) -> f64 {
        self.severity_alpha / (self.severity_alpha + self.severity_beta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub condition: Condition,
    pub patients: Vec<Patient>,
    pub base_position: Point,
    pub area_extent: f64,
}

impl Scenario {
    pub fn patient(&self, id: PatientId) -> Option<&Patient> {
        // ids are assigned densely by the generator, but hand-built
        // scenarios need not follow that
        self.patients
            .get(id as usize)
            .filter(|p| p.id == id)
            .or_else(|| self.patients.iter().find(|p| p.id == id))
    }
}

pub fn classify_high_severity(patient: &Patient, threshold: f64) -> bool {
    patient.severity >= threshold
}

pub fn generate_scenario(condition: Condition, params: &ScenarioParams, stream: &mut Stream) -> Scenario {
    let severity = Beta::new(params.severity_alpha, params.severity_beta)
        .expect("validated beta parameters");
    let extent = params.area_extent;
    let patients = (0..condition.patient_load)
        .map(|id| {
            let position = Point::new(stream.random::<f64>() * extent, stream.random::<f64>() * extent);
            let s: f64 = severity.sample(stream);
            let accessibility = if params.accessibility_min < params.accessibility_max {
                stream.random_range(params.accessibility_min..=params.accessibility_max)
            } else {
                params.accessibility_min
            };
            let mut patient = Patient {
                id,
                position,
                severity: s,
                detect_time: 0.0,
                time_to_criticality: params.criticality_span * (1.0 - s) + params.criticality_floor,
                accessibility,
                high_severity: false,
            };
            patient.high_severity = classify_high_severity(&patient, params.high_severity_threshold);
            patient
        })
        .collect();
    Scenario {
        condition,
        patients,
        base_position: params.base_position,
        area_extent: extent,
    }
}
