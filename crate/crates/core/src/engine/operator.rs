//! Operator task and intervention events.
//!
//! Under teleoperation the operator's task follows the mission phase and
//! every leg is flown by hand. Under the autonomous policies the operator
//! only supervises and acts on alerts; the twin resolves a fraction of those
//! alerts itself.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{EventKind, MissionEvent};
use crate::localization::PoseEstimate;
use crate::policy::PolicyId;
use crate::scenario::PatientId;
use crate::stream::Stream;

/// Task alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskLabel {
    Navigate,
    Assess,
    Intervene,
    Supervise,
    ResolveAlert,
}

impl TaskLabel {
    pub const ALL: [TaskLabel; 5] = [
        TaskLabel::Navigate,
        TaskLabel::Assess,
        TaskLabel::Intervene,
        TaskLabel::Supervise,
        TaskLabel::ResolveAlert,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskLabel::Navigate => "navigate",
            TaskLabel::Assess => "assess",
            TaskLabel::Intervene => "intervene",
            TaskLabel::Supervise => "supervise",
            TaskLabel::ResolveAlert => "resolve_alert",
        }
    }

    pub fn initial(policy: PolicyId) -> TaskLabel {
        match policy {
            PolicyId::Pi1Teleop => TaskLabel::Navigate,
            PolicyId::Pi2Auto | PolicyId::Pi3Geodt => TaskLabel::Supervise,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alert {
    OutageOnset,
    ThresholdCrossing,
    AbortWarning,
}

/// What the operator can see.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorView {
    pub pose: Option<PoseEstimate>,
    pub task: TaskLabel,
    pub pending_alerts: u32,
}

/// Mission phase transitions and disturbances the operator reacts to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cue {
    Depart(PatientId),
    Arrive(PatientId),
    Intervene(PatientId),
    LinkRestored,
    Alert(Alert),
}

pub struct OperatorModel {
    policy: PolicyId,
    suppression: f64,
    pub view: OperatorView,
}

impl OperatorModel {
    pub fn new(policy: PolicyId, alert_suppression: f64) -> Self {
        OperatorModel {
            policy,
            suppression: alert_suppression,
            view: OperatorView {
                pose: None,
                task: TaskLabel::initial(policy),
                pending_alerts: 0,
            },
        }
    }

    fn switch(&mut self, time: f64, label: TaskLabel, out: &mut Vec<MissionEvent>) {
        if self.view.task != label {
            self.view.task = label;
            out.push(MissionEvent::task_switch(time, label));
        }
    }

    fn intervene(&self, time: f64, patient_id: Option<PatientId>, out: &mut Vec<MissionEvent>) {
        out.push(MissionEvent {
            time,
            kind: EventKind::OperatorIntervention,
            patient_id,
            task_label: None,
        });
    }

    /// Appends the operator events triggered by `cue` at `time`.
    pub fn react(&mut self, cue: Cue, time: f64, stream: &mut Stream, out: &mut Vec<MissionEvent>) {
        match (self.policy, cue) {
            (PolicyId::Pi1Teleop, Cue::Depart(id)) => {
                self.switch(time, TaskLabel::Navigate, out);
                self.intervene(time, Some(id), out);
            }
            (PolicyId::Pi1Teleop, Cue::Arrive(_)) => self.switch(time, TaskLabel::Assess, out),
            (PolicyId::Pi1Teleop, Cue::Intervene(_)) => self.switch(time, TaskLabel::Intervene, out),
            (PolicyId::Pi1Teleop, Cue::LinkRestored) => self.intervene(time, None, out),
            (PolicyId::Pi1Teleop, Cue::Alert(_)) => {}
            (_, Cue::Alert(_)) => {
                if self.policy == PolicyId::Pi3Geodt && stream.random::<f64>() < self.suppression {
                    return;
                }
                self.view.pending_alerts += 1;
                self.switch(time, TaskLabel::ResolveAlert, out);
                self.intervene(time, None, out);
                self.switch(time, TaskLabel::Supervise, out);
                self.view.pending_alerts -= 1;
            }
            (_, Cue::Depart(_) | Cue::Arrive(_) | Cue::Intervene(_) | Cue::LinkRestored) => {}
        }
    }
}
