//! Delay/failure trade-off points and their non-dominated subset.

use serde::{Deserialize, Serialize};

use crate::policy::PolicyId;

/// Identifies where a point came from. `delta` and `load` are `None` for
/// points pooled over that dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellKey {
    pub policy: PolicyId,
    pub delta: Option<f64>,
    pub load: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub key: CellKey,
    /// Mean high-severity delay, minutes.
    pub x: f64,
    /// Failure rate.
    pub y: f64,
    /// Effective success ρ·(1 − R_fail).
    pub size: f64,
}

pub fn effective_success(rho: f64, r_fail: f64) -> f64 {
    rho * (1.0 - r_fail)
}

/// `q` dominates `p` in the (x, y) plane, both minimized.
pub fn dominates_xy(q: &ParetoPoint, p: &ParetoPoint) -> bool {
    q.x <= p.x && q.y <= p.y && (q.x < p.x || q.y < p.y)
}

/// Non-dominated points, in input order.
pub fn pareto_front(points: &[ParetoPoint]) -> Vec<ParetoPoint> {
    front_mask(points)
        .into_iter()
        .zip(points)
        .filter_map(|(keep, p)| keep.then_some(*p))
        .collect()
}

/// `true` at index i iff `points[i]` is non-dominated.
pub fn front_mask(points: &[ParetoPoint]) -> Vec<bool> {
    // sweep in x-then-y order keeping the running minimum y; a point is
    // dominated iff some earlier point in that order has y ≤ its y and
    // differs from it
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| points[a].x.total_cmp(&points[b].x).then(points[a].y.total_cmp(&points[b].y)));
    let mut keep = vec![false; points.len()];
    let mut best: Option<(f64, f64)> = None;
    for &i in &idx {
        let p = &points[i];
        let dominated = match best {
            Some((bx, by)) => by < p.y || (by == p.y && bx < p.x),
            None => false,
        };
        keep[i] = !dominated;
        match best {
            Some((_, by)) if by <= p.y => {}
            _ => best = Some((p.x, p.y)),
        }
    }
    keep
}
