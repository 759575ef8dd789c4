//! Pose estimation quality under degradation.
//!
//! Three estimators are modeled at the level of "noisy position plus an
//! honest covariance": GNSS (degrades with δ and drops out during outages),
//! a self-contained autonomous estimator (constant accuracy), and the
//! digital-twin fusion of the two.

use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::stream::Stream;

/// Symmetric 2×2 covariance, m².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Covariance {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Covariance {
    pub fn isotropic(variance: f64) -> Self {
        Covariance {
            xx: variance,
            xy: 0.0,
            yy: variance,
        }
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.xx + self.yy);
        let half_diff = 0.5 * (self.xx - self.yy);
        let r = half_diff.hypot(self.xy);
        (mean - r, mean + r)
    }

    /// Adds `variance` to both axes.
    pub fn inflate(&self, variance: f64) -> Self {
        Covariance {
            xx: self.xx + variance,
            xy: self.xy,
            yy: self.yy + variance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoseSource {
    Gps,
    Auto,
    DtFused,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseEstimate {
    /// Meaningless when `valid` is false.
    pub position: Point,
    pub covariance: Covariance,
    pub source: PoseSource,
    pub valid: bool,
}

impl PoseEstimate {
    fn invalid(source: PoseSource) -> Self {
        PoseEstimate {
            position: Point::ORIGIN,
            covariance: Covariance::isotropic(f64::INFINITY),
            source,
            valid: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    /// Half-open: `start <= t < end`.
    pub fn contains(&self, t: f64) -> bool {
        self.start <= t && t < self.end
    }
}

/// Outage pattern of one mission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegradationProfile {
    pub delta: f64,
    /// Disjoint, sorted by start, within `[0, horizon]`.
    pub outages: Vec<Interval>,
}

impl DegradationProfile {
    pub fn clear(delta: f64) -> Self {
        DegradationProfile {
            delta,
            outages: Vec::new(),
        }
    }

    pub fn outage_at(&self, t: f64) -> Option<Interval> {
        let idx = self.outages.partition_point(|iv| iv.end <= t);
        self.outages.get(idx).copied().filter(|iv| iv.contains(t))
    }

    pub fn in_outage(&self, t: f64) -> bool {
        self.outage_at(t).is_some()
    }

    /// First outage boundary strictly after `t`, if any.
    pub fn next_boundary(&self, t: f64) -> Option<f64> {
        let idx = self.outages.partition_point(|iv| iv.end <= t);
        let iv = self.outages.get(idx)?;
        Some(if iv.start > t { iv.start } else { iv.end })
    }

    pub fn total_outage(&self) -> f64 {
        self.outages.iter().map(Interval::duration).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalizationParams {
    /// Nominal per-axis GNSS standard deviation, m.
    pub gps_sigma: f64,
    /// Variance inflation at δ = 1: σ²(δ) = σ₀²(1 + κ δ).
    pub gps_inflation: f64,
    /// Per-axis standard deviation of the autonomous estimator, m.
    pub auto_sigma: f64,
    /// Outage arrival rate at δ = 1, per minute; scales linearly with δ.
    pub outage_rate: f64,
    pub outage_mean_duration: f64,
    /// Per-axis variance growth, m²/min, of a pose track that receives no
    /// link updates.
    pub link_loss_growth: f64,
    /// Multiplier on `link_loss_growth` when the twin propagates the track.
    pub twin_growth_factor: f64,
}

impl Default for LocalizationParams {
    fn default() -> Self {
        LocalizationParams {
            gps_sigma: 3.0,
            gps_inflation: 50.0,
            auto_sigma: 8.0,
            outage_rate: 0.05,
            outage_mean_duration: 2.0,
            link_loss_growth: 20.0,
            twin_growth_factor: 0.5,
        }
    }
}

impl LocalizationParams {
    pub fn validate(&self) -> Result<()> {
        let key = |k: &str| format!("localization.{k}");
        let positive = [
            ("gps_sigma", self.gps_sigma),
            ("auto_sigma", self.auto_sigma),
            ("outage_mean_duration", self.outage_mean_duration),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(key(name), "must be positive"));
            }
        }
        let nonneg = [
            ("gps_inflation", self.gps_inflation),
            ("outage_rate", self.outage_rate),
            ("link_loss_growth", self.link_loss_growth),
            ("twin_growth_factor", self.twin_growth_factor),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(key(name), "must be nonnegative"));
            }
        }
        Ok(())
    }

    pub fn gps_variance(&self, delta: f64) -> f64 {
        self.gps_sigma * self.gps_sigma * (1.0 + self.gps_inflation * delta)
    }

    pub fn auto_variance(&self) -> f64 {
        self.auto_sigma * self.auto_sigma
    }

    /// Inverse-variance combination of the two healthy estimators.
    pub fn fused_variance(&self, delta: f64) -> f64 {
        fuse_variance(self.gps_variance(delta), self.auto_variance())
    }

    pub fn expected_outage_fraction(&self, delta: f64) -> f64 {
        // M/G/∞ occupancy: P(covered) = 1 - exp(-rate * mean)
        1.0 - (-self.outage_rate * delta * self.outage_mean_duration).exp()
    }
}

/// Poisson outage arrivals at `rate * delta` per minute with exponential
/// durations; overlapping intervals are merged and the result is clipped to
/// `[0, horizon]`.
pub fn outage_schedule(delta: f64, horizon: f64, params: &LocalizationParams, stream: &mut Stream) -> DegradationProfile {
    let rate = params.outage_rate * delta;
    if rate <= 0.0 || horizon <= 0.0 {
        return DegradationProfile::clear(delta);
    }
    let gap = Exp::new(rate).expect("positive rate");
    let length = Exp::new(1.0 / params.outage_mean_duration).expect("positive mean");
    let mut outages: Vec<Interval> = Vec::new();
    let mut t = 0.0;
    loop {
        t += gap.sample(stream);
        if t >= horizon {
            break;
        }
        let end = (t + length.sample(stream)).min(horizon);
        match outages.last_mut() {
            Some(last) if t <= last.end => last.end = last.end.max(end),
            _ => outages.push(Interval { start: t, end }),
        }
    }
    DegradationProfile { delta, outages }
}

fn noisy(position: Point, variance: f64, stream: &mut Stream) -> Point {
    if variance <= 0.0 {
        return position;
    }
    let n = Normal::new(0.0, variance.sqrt()).expect("finite variance");
    Point::new(position.x + n.sample(stream), position.y + n.sample(stream))
}

pub fn gps_estimate(
    true_position: Point,
    profile: &DegradationProfile,
    time: f64,
    params: &LocalizationParams,
    stream: &mut Stream,
) -> PoseEstimate {
    if profile.in_outage(time) {
        return PoseEstimate::invalid(PoseSource::Gps);
    }
    let v = params.gps_variance(profile.delta);
    PoseEstimate {
        position: noisy(true_position, v, stream),
        covariance: Covariance::isotropic(v),
        source: PoseSource::Gps,
        valid: true,
    }
}

/// Self-contained estimate; GNSS-independent, so neither δ nor outages
/// affect it.
pub fn auto_estimate(true_position: Point, params: &LocalizationParams, stream: &mut Stream) -> PoseEstimate {
    let v = params.auto_variance();
    PoseEstimate {
        position: noisy(true_position, v, stream),
        covariance: Covariance::isotropic(v),
        source: PoseSource::Auto,
        valid: true,
    }
}

fn fuse_variance(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        1.0 / (1.0 / a + 1.0 / b)
    }
}

fn fuse_axis(xa: f64, va: f64, xb: f64, vb: f64) -> (f64, f64) {
    if va == 0.0 {
        return (xa, 0.0);
    }
    if vb == 0.0 {
        return (xb, 0.0);
    }
    let (wa, wb) = (1.0 / va, 1.0 / vb);
    ((wa * xa + wb * xb) / (wa + wb), 1.0 / (wa + wb))
}

/// Per-axis inverse-variance fusion. Cross-covariance terms are dropped.
pub fn dt_fused_estimate(gps: &PoseEstimate, auto: &PoseEstimate) -> Result<PoseEstimate> {
    let (position, covariance) = match (gps.valid, auto.valid) {
        (false, false) => return Err(Error::LocalizationLost),
        (true, false) => (gps.position, gps.covariance),
        (false, true) => (auto.position, auto.covariance),
        (true, true) => {
            let (x, vx) = fuse_axis(gps.position.x, gps.covariance.xx, auto.position.x, auto.covariance.xx);
            let (y, vy) = fuse_axis(gps.position.y, gps.covariance.yy, auto.position.y, auto.covariance.yy);
            (Point::new(x, y), Covariance { xx: vx, xy: 0.0, yy: vy })
        }
    };
    Ok(PoseEstimate {
        position,
        covariance,
        source: PoseSource::DtFused,
        valid: true,
    })
}

/// Covariance of a pose track after `elapsed` minutes without link updates.
pub fn propagate_unrefreshed(covariance: Covariance, elapsed: f64, growth_per_min: f64) -> Covariance {
    covariance.inflate(growth_per_min * elapsed.max(0.0))
}
