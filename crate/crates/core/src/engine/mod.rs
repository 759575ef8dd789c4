//! Single-mission execution.
//!
//! A mission walks the policy's visit plan leg by leg. Time advances in
//! steps of at most one tick, also breaking at outage boundaries, so every
//! disturbance is observed at its exact onset. Each step samples the
//! policy's pose estimate, moves the platform at the speed implied by that
//! estimate's variance, updates the link and uncertainty monitors and asks
//! [`check_abort`] whether to give up.

mod operator;

use serde::{Deserialize, Serialize};

pub use operator::{Alert, Cue, OperatorModel, OperatorView, TaskLabel};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::localization::{
    auto_estimate, dt_fused_estimate, gps_estimate, propagate_unrefreshed, Covariance, DegradationProfile,
    LocalizationParams, PoseEstimate,
};
use crate::policy::{order_heuristic, order_teleop, order_triage, PolicyId, TriageWeights, VisitPlan};
use crate::scenario::{Condition, PatientId, Scenario};
use crate::stream::Stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Depart,
    Arrive,
    Intervene,
    TaskSwitch,
    OperatorIntervention,
    Abort,
    Complete,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MissionEvent {
    pub time: f64,
    pub kind: EventKind,
    pub patient_id: Option<PatientId>,
    pub task_label: Option<TaskLabel>,
}

impl MissionEvent {
    pub fn new(time: f64, kind: EventKind, patient_id: Option<PatientId>) -> Self {
        MissionEvent {
            time,
            kind,
            patient_id,
            task_label: None,
        }
    }

    pub fn task_switch(time: f64, label: TaskLabel) -> Self {
        MissionEvent {
            time,
            kind: EventKind::TaskSwitch,
            patient_id: None,
            task_label: Some(label),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbortReason {
    LinkLoss,
    Uncertainty,
    PlatformFault,
    Horizon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionTrace {
    pub policy: PolicyId,
    pub condition: Condition,
    pub trial_index: u32,
    pub events: Vec<MissionEvent>,
    /// T, minutes: time of the terminal event.
    pub duration: f64,
    pub aborted: bool,
    pub abort_reason: Option<AbortReason>,
}

impl MissionTrace {
    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    /// First intervention time per patient.
    pub fn intervention_time(&self, id: PatientId) -> Option<f64> {
        self.events
            .iter()
            .find(|e| e.kind == EventKind::Intervene && e.patient_id == Some(id))
            .map(|e| e.time)
    }

    /// Checks time ordering, arrive-before-intervene, and a single terminal
    /// event in last position whose time equals the duration.
    pub fn is_well_formed(&self) -> bool {
        if self.events.windows(2).any(|w| w[1].time < w[0].time) {
            return false;
        }
        let terminal = |k: EventKind| matches!(k, EventKind::Abort | EventKind::Complete);
        let Some(last) = self.events.last() else {
            return false;
        };
        if !terminal(last.kind) || self.events.iter().filter(|e| terminal(e.kind)).count() != 1 {
            return false;
        }
        if last.time != self.duration || self.aborted != (last.kind == EventKind::Abort) {
            return false;
        }
        let mut arrived = Vec::new();
        for e in &self.events {
            match e.kind {
                EventKind::Arrive => arrived.extend(e.patient_id),
                EventKind::Intervene => match e.patient_id {
                    Some(id) if arrived.contains(&id) => {}
                    _ => return false,
                },
                EventKind::TaskSwitch if e.task_label.is_none() => return false,
                _ => {}
            }
        }
        true
    }
}

/// Kinematic and mission-rule parameters of the platform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlatformParams {
    /// m/min
    pub cruise_speed: f64,
    /// Minutes on scene per patient.
    pub service_time: f64,
    /// Fraction of cruise speed achieved under teleoperation, in (0, 1].
    pub teleop_speed_factor: f64,
    /// Covariance trace, m², above which the autonomous policies count
    /// time toward an abort.
    pub uncertainty_threshold: f64,
    pub abort_grace: f64,
    /// Longest tolerated continuous link outage under teleoperation.
    pub comm_timeout: f64,
    pub uncertainty_gamma: f64,
    pub distance_ref: f64,
    /// Mission time cap; reaching it aborts.
    pub horizon: f64,
    /// Fraction of alerts the twin resolves without the operator.
    pub alert_suppression: f64,
    /// Probability that the teleoperator picks a random next patient.
    pub operator_error_prob: f64,
    /// Longest simulation step, minutes.
    pub tick: f64,
}

impl Default for PlatformParams {
    fn default() -> Self {
        PlatformParams {
            cruise_speed: 500.0,
            service_time: 5.0,
            teleop_speed_factor: 0.3,
            uncertainty_threshold: 400.0,
            abort_grace: 2.0,
            comm_timeout: 8.0,
            uncertainty_gamma: 0.5,
            distance_ref: 100.0,
            horizon: 1440.0,
            alert_suppression: 0.5,
            operator_error_prob: 0.15,
            tick: 1.0,
        }
    }
}

impl PlatformParams {
    pub fn validate(&self) -> Result<()> {
        let key = |k: &str| format!("platform.{k}");
        let positive = [
            ("cruise_speed", self.cruise_speed),
            ("service_time", self.service_time),
            ("teleop_speed_factor", self.teleop_speed_factor),
            ("uncertainty_threshold", self.uncertainty_threshold),
            ("abort_grace", self.abort_grace),
            ("comm_timeout", self.comm_timeout),
            ("uncertainty_gamma", self.uncertainty_gamma),
            ("distance_ref", self.distance_ref),
            ("horizon", self.horizon),
            ("tick", self.tick),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(key(name), "must be positive"));
            }
        }
        if self.teleop_speed_factor > 1.0 {
            return Err(Error::config(key("teleop_speed_factor"), "must be at most 1"));
        }
        for (name, v) in [
            ("alert_suppression", self.alert_suppression),
            ("operator_error_prob", self.operator_error_prob),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(key(name), "must be a probability"));
            }
        }
        Ok(())
    }
}

/// Everything a mission needs besides the scenario and its random draws.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MissionSetup {
    pub platform: PlatformParams,
    pub localization: LocalizationParams,
    pub triage: TriageWeights,
}

/// The twin's view of the mission.
#[derive(Debug, Clone, PartialEq)]
pub struct TwinState {
    /// Pose track as held by the supervising side: the live estimate while
    /// the link is up, the last received one (propagated) during an outage.
    pub pose: PoseEstimate,
    pub remaining: Vec<PatientId>,
    pub snapshot: Vec<(PatientId, f64, Point)>,
    pub platform_healthy: bool,
}

impl TwinState {
    fn new(scenario: &Scenario, plan: &VisitPlan, pose: PoseEstimate) -> Self {
        TwinState {
            pose,
            remaining: plan.order.clone(),
            snapshot: scenario.patients.iter().map(|p| (p.id, p.severity, p.position)).collect(),
            platform_healthy: true,
        }
    }
}

/// Leg duration in minutes:
/// `(d / v) · (1 + γ·√σ² / d_ref) / a`.
pub fn travel_time(from: Point, to: Point, pose_variance: f64, accessibility: f64, params: &PlatformParams) -> Result<f64> {
    if !(accessibility > 0.0) {
        return Err(Error::Unreachable(accessibility));
    }
    let d = from.distance(to);
    let penalty = 1.0 + params.uncertainty_gamma * pose_variance.max(0.0).sqrt() / params.distance_ref;
    Ok(d / params.cruise_speed * penalty / accessibility)
}

pub fn check_abort(
    twin: &TwinState,
    elapsed_outage: f64,
    elapsed_over_threshold: f64,
    policy: PolicyId,
    params: &PlatformParams,
) -> Option<AbortReason> {
    if !twin.platform_healthy {
        return Some(AbortReason::PlatformFault);
    }
    match policy {
        PolicyId::Pi1Teleop if elapsed_outage > params.comm_timeout => Some(AbortReason::LinkLoss),
        PolicyId::Pi2Auto | PolicyId::Pi3Geodt if elapsed_over_threshold > params.abort_grace => {
            Some(AbortReason::Uncertainty)
        }
        _ => None,
    }
}

pub fn plan_for(policy: PolicyId, scenario: &Scenario, setup: &MissionSetup, operator: &mut Stream) -> VisitPlan {
    match policy {
        PolicyId::Pi1Teleop => order_teleop(scenario, setup.platform.operator_error_prob, operator),
        PolicyId::Pi2Auto => order_heuristic(scenario),
        PolicyId::Pi3Geodt => order_triage(scenario, &setup.triage),
    }
}

/// Random streams consumed by one mission.
pub struct MissionStreams {
    /// Pose noise.
    pub sensing: Stream,
    /// Teleoperator ordering errors and alert suppression.
    pub operator: Stream,
}

enum Activity {
    Travel { from: Point, to: Point, accessibility: f64 },
    Service { remaining: f64 },
}

struct Mission<'a> {
    policy: PolicyId,
    setup: &'a MissionSetup,
    profile: &'a DegradationProfile,
    streams: &'a mut MissionStreams,
    operator: OperatorModel,
    twin: TwinState,
    events: Vec<MissionEvent>,
    now: f64,
    position: Point,
    was_in_outage: bool,
    outage_start: f64,
    /// Supervisory covariance at the last moment the link was up.
    last_linked: Covariance,
    over_since: Option<f64>,
}

enum Step {
    Continue,
    Done,
    Abort(AbortReason),
}

impl Mission<'_> {
    fn emit(&mut self, kind: EventKind, patient_id: Option<PatientId>) {
        self.events.push(MissionEvent::new(self.now, kind, patient_id));
    }

    fn cue(&mut self, cue: Cue) {
        self.operator.react(cue, self.now, &mut self.streams.operator, &mut self.events);
    }

    /// Live estimate of the policy's own estimator; `None` while teleoperation
    /// has no GNSS.
    fn estimate(&mut self) -> Option<PoseEstimate> {
        let loc = &self.setup.localization;
        let rng = &mut self.streams.sensing;
        match self.policy {
            PolicyId::Pi1Teleop => Some(gps_estimate(self.position, self.profile, self.now, loc, rng)).filter(|e| e.valid),
            PolicyId::Pi2Auto => Some(auto_estimate(self.position, loc, rng)),
            PolicyId::Pi3Geodt => {
                let gps = gps_estimate(self.position, self.profile, self.now, loc, rng);
                let auto = auto_estimate(self.position, loc, rng);
                dt_fused_estimate(&gps, &auto).ok()
            }
        }
    }

    fn growth(&self) -> f64 {
        let loc = &self.setup.localization;
        match self.policy {
            PolicyId::Pi3Geodt => loc.link_loss_growth * loc.twin_growth_factor,
            _ => loc.link_loss_growth,
        }
    }

    /// Advances one step of `activity`.
    fn step(&mut self, activity: &mut Activity, progress: &mut f64) -> Result<Step> {
        let params = self.setup.platform;
        let in_outage = self.profile.in_outage(self.now);
        if in_outage && !self.was_in_outage {
            self.outage_start = self.now;
            self.cue(Cue::Alert(Alert::OutageOnset));
        } else if !in_outage && self.was_in_outage {
            self.cue(Cue::LinkRestored);
        }
        self.was_in_outage = in_outage;

        let estimate = self.estimate();
        if let Some(e) = estimate {
            self.operator.view.pose = Some(e);
        }
        let mut step_end = (self.now + params.tick).min(params.horizon);
        if let Some(b) = self.profile.next_boundary(self.now) {
            step_end = step_end.min(b);
        }
        let available = step_end - self.now;

        let dt = match activity {
            Activity::Travel { from, to, accessibility } => {
                let frozen = self.policy == PolicyId::Pi1Teleop && estimate.is_none();
                let var = estimate.map_or(0.0, |e| 0.5 * e.covariance.trace());
                let mut leg = travel_time(*from, *to, var, *accessibility, &params)?;
                if self.policy == PolicyId::Pi1Teleop {
                    leg /= params.teleop_speed_factor;
                }
                if frozen {
                    available
                } else if leg <= 0.0 {
                    *progress = 1.0;
                    0.0
                } else {
                    let dt = ((1.0 - *progress) * leg).min(available);
                    *progress = if dt == available { *progress + dt / leg } else { 1.0 };
                    self.position = from.lerp(*to, progress.min(1.0));
                    dt
                }
            }
            Activity::Service { remaining } => {
                let dt = remaining.min(available);
                *remaining -= dt;
                if *remaining <= 0.0 {
                    *progress = 1.0;
                }
                dt
            }
        };
        self.now += dt;

        // monitors
        let elapsed_outage = if in_outage { self.now - self.outage_start } else { 0.0 };
        let supervisory = if in_outage {
            propagate_unrefreshed(self.last_linked, elapsed_outage, self.growth())
        } else {
            let cov = estimate.map_or(self.last_linked, |e| e.covariance);
            self.last_linked = cov;
            cov
        };
        self.twin.pose = PoseEstimate {
            position: estimate.map_or(self.twin.pose.position, |e| e.position),
            covariance: supervisory,
            source: self.twin.pose.source,
            valid: estimate.is_some(),
        };
        let elapsed_over = if supervisory.trace() > params.uncertainty_threshold {
            if self.over_since.is_none() {
                self.over_since = Some(self.now);
                if self.policy != PolicyId::Pi1Teleop {
                    self.cue(Cue::Alert(Alert::ThresholdCrossing));
                }
            }
            self.now - self.over_since.unwrap_or(self.now)
        } else {
            self.over_since = None;
            0.0
        };

        if let Some(reason) = check_abort(&self.twin, elapsed_outage, elapsed_over, self.policy, &params) {
            return Ok(Step::Abort(reason));
        }
        if *progress >= 1.0 {
            return Ok(Step::Done);
        }
        if self.now >= params.horizon {
            return Ok(Step::Abort(AbortReason::Horizon));
        }
        Ok(Step::Continue)
    }

    fn run(&mut self, mut activity: Activity) -> Result<Option<AbortReason>> {
        let mut progress = 0.0;
        loop {
            match self.step(&mut activity, &mut progress)? {
                Step::Continue => {}
                Step::Done => return Ok(None),
                Step::Abort(r) => return Ok(Some(r)),
            }
        }
    }

    fn abort(&mut self, reason: AbortReason) {
        if reason != AbortReason::Horizon {
            self.cue(Cue::Alert(Alert::AbortWarning));
        }
        self.emit(EventKind::Abort, None);
    }
}

/// Executes one mission. `profile` is the outage pattern of the mission's
/// environment; `streams` supply pose noise and operator behavior.
pub fn run_mission(
    scenario: &Scenario,
    profile: &DegradationProfile,
    policy: PolicyId,
    setup: &MissionSetup,
    trial_index: u32,
    streams: &mut MissionStreams,
) -> Result<MissionTrace> {
    let plan = plan_for(policy, scenario, setup, &mut streams.operator);
    let start_pose = PoseEstimate {
        position: scenario.base_position,
        covariance: Covariance::isotropic(0.0),
        source: match policy {
            PolicyId::Pi1Teleop => crate::localization::PoseSource::Gps,
            PolicyId::Pi2Auto => crate::localization::PoseSource::Auto,
            PolicyId::Pi3Geodt => crate::localization::PoseSource::DtFused,
        },
        valid: true,
    };
    let mut m = Mission {
        policy,
        setup,
        profile,
        streams,
        operator: OperatorModel::new(policy, setup.platform.alert_suppression),
        twin: TwinState::new(scenario, &plan, start_pose),
        events: Vec::new(),
        now: 0.0,
        position: scenario.base_position,
        was_in_outage: false,
        outage_start: 0.0,
        last_linked: Covariance::isotropic(0.0),
        over_since: None,
    };

    let mut aborted = None;
    for &id in &plan.order {
        let patient = scenario
            .patient(id)
            .ok_or_else(|| Error::config("scenario.patients", format!("plan references unknown patient {id}")))?;
        m.emit(EventKind::Depart, Some(id));
        m.cue(Cue::Depart(id));
        let leg = Activity::Travel {
            from: m.position,
            to: patient.position,
            accessibility: patient.accessibility,
        };
        if let Some(r) = m.run(leg)? {
            aborted = Some(r);
            break;
        }
        m.position = patient.position;
        m.emit(EventKind::Arrive, Some(id));
        m.cue(Cue::Arrive(id));
        m.emit(EventKind::Intervene, Some(id));
        m.cue(Cue::Intervene(id));
        m.twin.remaining.retain(|&r| r != id);
        let service = Activity::Service {
            remaining: setup.platform.service_time,
        };
        if let Some(r) = m.run(service)? {
            aborted = Some(r);
            break;
        }
    }
    match aborted {
        Some(r) => m.abort(r),
        None => m.emit(EventKind::Complete, None),
    }
    Ok(MissionTrace {
        policy,
        condition: scenario.condition,
        trial_index,
        duration: m.now,
        aborted: aborted.is_some(),
        abort_reason: aborted,
        events: m.events,
    })
}
