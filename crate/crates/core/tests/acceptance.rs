//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p medsim-core --test acceptance -- --nocapture`.

use std::fs;
use std::path::Path;
use std::time::Instant;

use medsim_core::engine::{EventKind, MissionEvent, MissionTrace, TaskLabel};
use medsim_core::metrics::{
    aggregate_workload, failure_rate, intervention_delays, intervention_frequency, metric_vector, served_within_window,
    task_switch_rate, trial_metrics, workload, HighSeverityDelay,
};
use medsim_core::pareto::{front_mask, pareto_front, CellKey};
use medsim_core::policy::{order_heuristic, order_triage, triage_score};
use medsim_core::report::{emit_reports, read_manifest, Format};
use medsim_core::scenario::generate_scenario;
use medsim_core::stats::{boxplot_stats, confidence_interval, quantiles};
use medsim_core::{
    derive_stream, dominates, run_sweep, Condition, MetricParams, MetricVector, ParetoPoint, Patient, Point, PolicyId,
    Purpose, Scenario, ScenarioParams, SweepConfig, SweepResult, TrialMetrics, TriageWeights,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const PI1: PolicyId = PolicyId::Pi1Teleop;
const PI2: PolicyId = PolicyId::Pi2Auto;
const PI3: PolicyId = PolicyId::Pi3Geodt;

struct Report {
    failed: Vec<String>,
}

impl Report {
    fn check(&mut self, name: &str, ok: bool, detail: impl AsRef<str>) {
        println!("{} {name}: {}", if ok { "PASS" } else { "FAIL" }, detail.as_ref());
        if !ok {
            self.failed.push(name.to_string());
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- protocol

fn output_files(dir: &Path) -> Vec<(String, String)> {
    let mut files: Vec<(String, String)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            let text = if name == "manifest.json" {
                let mut m = read_manifest(&path).unwrap();
                m.wall_time_s = 0.0;
                serde_json::to_string(&m).unwrap()
            } else {
                fs::read_to_string(&path).unwrap()
            };
            (name, text)
        })
        .collect();
    files.sort();
    files
}

fn protocol(report: &mut Report) -> SweepResult {
    let config = SweepConfig::default();
    let dir = tempfile::tempdir().unwrap();

    let start = Instant::now();
    let serial = run_sweep(&config, Some(1)).unwrap();
    let secs = start.elapsed().as_secs_f64();
    emit_reports(&serial, &config, Format::Csv, &dir.path().join("serial"), secs).unwrap();
    report.check(
        "protocol.mission_count",
        serial.records.len() == 15_000 && config.total_missions() == 15_000,
        format!("{} missions (5 deltas x 4 loads x 3 policies x 250 trials)", serial.records.len()),
    );
    report.check("protocol.single_worker_time", secs < 120.0, format!("{secs:.2}s on 1 worker (limit 120s)"));

    let again = run_sweep(&config, Some(1)).unwrap();
    emit_reports(&again, &config, Format::Csv, &dir.path().join("again"), 0.0).unwrap();
    let workers = rayon::current_num_threads().max(4);
    let parallel = run_sweep(&config, Some(workers)).unwrap();
    emit_reports(&parallel, &config, Format::Csv, &dir.path().join("parallel"), 0.0).unwrap();

    let base = output_files(&dir.path().join("serial"));
    report.check(
        "protocol.rerun_identical",
        base == output_files(&dir.path().join("again")),
        format!("{} output files byte-identical across two runs", base.len()),
    );
    report.check(
        "protocol.workers_identical",
        base == output_files(&dir.path().join("parallel")),
        format!("1 worker vs {workers} workers"),
    );
    serial
}

// ---------------------------------------------------------------- table

fn table_orderings(report: &mut Report, result: &SweepResult) {
    let r = |p| result.rollup_for(p).unwrap();
    let t = |p| r(p).t_int_mean.unwrap();
    let (t1, t2, t3) = (t(PI1), t(PI2), t(PI3));
    report.check("table.t_int", t3 < t2 && t2 < t1, format!("pi3 {t3:.2} < pi2 {t2:.2} < pi1 {t1:.2}"));
    let f = |p| r(p).r_fail;
    report.check(
        "table.r_fail",
        f(PI3) < f(PI2) && f(PI2) < f(PI1),
        format!("pi3 {:.4} < pi2 {:.4} < pi1 {:.4}", f(PI3), f(PI2), f(PI1)),
    );
    let w = |p| r(p).w_mean;
    report.check(
        "table.workload",
        w(PI3) < w(PI1).min(w(PI2)),
        format!("pi3 {:.4} < min(pi1 {:.4}, pi2 {:.4})", w(PI3), w(PI1), w(PI2)),
    );
    let rho = |p| r(p).rho;
    report.check(
        "table.rho",
        rho(PI2) > rho(PI3) && rho(PI3) > rho(PI1),
        format!("pi2 {:.4} > pi3 {:.4} > pi1 {:.4}", rho(PI2), rho(PI3), rho(PI1)),
    );
    let m = |p| r(p).mission_time;
    report.check(
        "table.mission_time",
        m(PI2) < m(PI3) && m(PI3) < m(PI1),
        format!("pi2 {:.2} < pi3 {:.2} < pi1 {:.2}", m(PI2), m(PI3), m(PI1)),
    );
    report.check("table.degradation_ratio", t1 / t2 >= 2.0, format!("T_int(pi1)/T_int(pi2) = {:.2} >= 2", t1 / t2));
}

fn tails(report: &mut Report, result: &SweepResult) {
    let q = |p| result.rollup_for(p).unwrap().delay_quantiles.unwrap();
    let (q1, q2, q3) = (q(PI1), q(PI2), q(PI3));
    report.check(
        "tails.pi3_below_pi2",
        q3.p90 < q2.p90 && q3.p95 < q2.p95,
        format!("P90 {:.1} < {:.1}, P95 {:.1} < {:.1}", q3.p90, q2.p90, q3.p95, q2.p95),
    );
    report.check(
        "tails.pi1_p95_vs_pi2",
        q1.p95 >= 2.0 * q2.p95,
        format!("P95 pi1 {:.1} >= 2 x pi2 {:.1}", q1.p95, q2.p95),
    );
}

// ---------------------------------------------------------------- dominance

fn vector(t: f64, rho: f64, r_fail: f64, w: f64) -> MetricVector {
    MetricVector {
        t_int_mean: Some(t),
        rho,
        r_fail,
        w_mean: w,
    }
}

fn published_dominance(report: &mut Report) {
    let pi1 = vector(182.584, 0.0247, 0.1810, 0.0381);
    let pi2 = vector(50.947, 0.2209, 0.1224, 0.0440);
    let pi3 = vector(29.546, 0.1295, 0.0664, 0.0200);
    report.check(
        "dominance.pi3_over_pi1",
        dominates(&pi3, &pi1) && !dominates(&pi1, &pi3),
        "pi3 dominates pi1",
    );
    report.check(
        "dominance.pi3_vs_pi2",
        !dominates(&pi3, &pi2) && !dominates(&pi2, &pi3),
        "pi3 and pi2 incomparable (pi2 serves more, pi3 better elsewhere)",
    );
    // pi2 has the higher workload, so it cannot dominate on all four axes;
    // report what the published numbers actually give
    let d21 = dominates(&pi2, &pi1);
    let d21_no_w = dominates(&MetricVector { w_mean: 0.0, ..pi2 }, &MetricVector { w_mean: 0.0, ..pi1 });
    report.check(
        "dominance.pi2_vs_pi1",
        !dominates(&pi1, &pi2) && d21_no_w,
        format!(
            "pi2 dominates pi1 on (T, 1-rho, R_fail): {d21_no_w}; on the full vector: {d21} \
             (W 0.0440 > 0.0381); pi1 never dominates pi2"
        ),
    );
}

// ---------------------------------------------------------------- metric oracles

fn patient(id: u32, detect: f64, high: bool) -> Patient {
    Patient {
        id,
        position: Point::new(f64::from(id) * 100.0, 0.0),
        severity: if high { 0.9 } else { 0.3 },
        detect_time: detect,
        time_to_criticality: 60.0,
        accessibility: 1.0,
        high_severity: high,
    }
}

fn scenario(patients: Vec<Patient>) -> Scenario {
    Scenario {
        condition: Condition::new(0, 0.0, patients.len().max(1) as u32).unwrap(),
        patients,
        base_position: Point::ORIGIN,
        area_extent: 10_000.0,
    }
}

/// Trace from `(time, kind, patient)` triples; a terminal event is appended.
fn trace(policy: PolicyId, events: &[(f64, EventKind, Option<u32>)], duration: f64, aborted: bool) -> MissionTrace {
    let mut ev: Vec<MissionEvent> = events.iter().map(|&(t, k, p)| MissionEvent::new(t, k, p)).collect();
    ev.push(MissionEvent::new(duration, if aborted { EventKind::Abort } else { EventKind::Complete }, None));
    MissionTrace {
        policy,
        condition: Condition::new(0, 0.0, 1).unwrap(),
        trial_index: 0,
        events: ev,
        duration,
        aborted,
        abort_reason: None,
    }
}

fn with_switches(mut t: MissionTrace, switches: &[(f64, TaskLabel)]) -> MissionTrace {
    for &(time, label) in switches {
        t.events.push(MissionEvent::task_switch(time, label));
    }
    t.events.sort_by(|a, b| a.time.total_cmp(&b.time));
    let end = t.events.iter().position(|e| matches!(e.kind, EventKind::Abort | EventKind::Complete)).unwrap();
    let terminal = t.events.remove(end);
    t.events.push(terminal);
    t
}

fn visit(t: f64, id: u32) -> [(f64, EventKind, Option<u32>); 2] {
    [(t, EventKind::Arrive, Some(id)), (t, EventKind::Intervene, Some(id))]
}

fn trial(delays: &[f64], served: u32, total: u32, aborted: bool, w: f64) -> TrialMetrics {
    TrialMetrics {
        high_severity_delays: delays
            .iter()
            .enumerate()
            .map(|(i, &d)| HighSeverityDelay {
                patient_id: i as u32,
                delay: d,
                censored: false,
            })
            .collect(),
        served_count: served,
        total_patients: total,
        aborted,
        lambda_sw: 0.0,
        lambda_int: 0.0,
        workload: w,
        duration: 100.0,
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12
}

fn metric_oracles(report: &mut Report) {
    let mut cases: Vec<(&str, bool)> = Vec::new();
    let nav = |t| (t, EventKind::OperatorIntervention, None);

    // high-severity delays
    let s = scenario(vec![patient(0, 10.0, true)]);
    let t = trace(PI2, &visit(30.0, 0), 40.0, false);
    cases.push(("delay.served", intervention_delays(&t, &s) == vec![HighSeverityDelay { patient_id: 0, delay: 20.0, censored: false }]));

    let s = scenario(vec![patient(0, 5.0, true)]);
    let t = trace(PI2, &[], 100.0, false);
    cases.push(("delay.censored_complete", intervention_delays(&t, &s) == vec![HighSeverityDelay { patient_id: 0, delay: 95.0, censored: true }]));

    let s = scenario(vec![patient(0, 20.0, true)]);
    let t = trace(PI1, &[], 50.0, true);
    cases.push(("delay.censored_abort", intervention_delays(&t, &s)[0].delay == 30.0));

    let s = scenario(vec![patient(0, 0.0, false), patient(1, 0.0, true)]);
    let t = trace(PI2, &[visit(5.0, 0), visit(9.0, 1)].concat(), 12.0, false);
    let d = intervention_delays(&t, &s);
    cases.push(("delay.low_severity_excluded", d.len() == 1 && d[0].patient_id == 1 && d[0].delay == 9.0));

    let s = scenario(vec![patient(0, 2.0, true)]);
    let t = trace(PI2, &[visit(7.0, 0), visit(30.0, 0)].concat(), 31.0, false);
    cases.push(("delay.first_intervention_counts", intervention_delays(&t, &s)[0].delay == 5.0));

    // windowed service rate
    let s = scenario(vec![patient(0, 0.0, false), patient(1, 0.0, false), patient(2, 0.0, false), patient(3, 0.0, false)]);
    let t = trace(PI2, &[visit(10.0, 0), visit(60.0, 1), visit(61.0, 2)].concat(), 70.0, false);
    cases.push(("rho.window_inclusive", served_within_window(&t, &s, 60.0) == (2, 0.5)));
    cases.push(("rho.wider_window", served_within_window(&t, &s, 100.0) == (3, 0.75)));
    cases.push(("rho.narrow_window", served_within_window(&t, &s, 5.0) == (0, 0.0)));
    cases.push(("rho.empty_scenario", served_within_window(&trace(PI2, &[], 0.0, false), &scenario(vec![]), 60.0) == (0, 0.0)));

    let s = scenario(vec![patient(0, 30.0, false)]);
    let t = trace(PI2, &visit(80.0, 0), 81.0, false);
    cases.push(("rho.measured_from_detection", served_within_window(&t, &s, 50.0) == (1, 1.0)));

    // failure rate
    cases.push(("r_fail.half", failure_rate(&[true, false, false, true]).unwrap() == 0.5));
    cases.push(("r_fail.empty_is_error", failure_rate(&[]).is_err()));

    // task switching
    let t = with_switches(
        trace(PI1, &[], 12.0, false),
        &[(1.0, TaskLabel::Assess), (2.0, TaskLabel::Intervene), (3.0, TaskLabel::Navigate)],
    );
    cases.push(("lambda_sw.teleop_cycle", task_switch_rate(&t) == 0.25));
    let t = with_switches(trace(PI2, &[], 10.0, false), &[(1.0, TaskLabel::Supervise)]);
    cases.push(("lambda_sw.repeat_label_not_counted", task_switch_rate(&t) == 0.0));
    let t = with_switches(
        trace(PI3, &[], 8.0, false),
        &[(1.0, TaskLabel::ResolveAlert), (1.0, TaskLabel::Supervise)],
    );
    cases.push(("lambda_sw.alert_round_trip", task_switch_rate(&t) == 0.25));

    // interventions
    let t = trace(PI1, &[nav(0.0), nav(10.0), nav(20.0)], 60.0, false);
    cases.push(("lambda_int.three_per_hour", close(intervention_frequency(&t), 0.05)));
    let t = trace(PI1, &[nav(0.0)], 0.0, false);
    cases.push(("rates.zero_duration", intervention_frequency(&t) == 0.0 && task_switch_rate(&t) == 0.0));

    // workload
    cases.push(("workload.weighted_sum", close(workload(0.25, 0.1, 2.0, 0.5), 0.55)));
    cases.push(("workload.mean", close(aggregate_workload(&[0.1, 0.2, 0.3]).unwrap(), 0.2)));
    cases.push(("workload.empty_is_error", aggregate_workload(&[]).is_err()));

    // end-to-end reduction of one trace
    let s = scenario(vec![patient(0, 0.0, true), patient(1, 4.0, false), patient(2, 10.0, true)]);
    let t = with_switches(
        trace(PI1, &[[nav(0.0)].as_slice(), &visit(20.0, 0), &[nav(21.0)], &visit(90.0, 1)].concat(), 100.0, true),
        &[(18.0, TaskLabel::Assess), (20.0, TaskLabel::Intervene), (21.0, TaskLabel::Navigate)],
    );
    let m = trial_metrics(&t, &s, &MetricParams { tau_c: 60.0, alpha: 1.0, beta: 2.0 });
    cases.push((
        "trial.end_to_end",
        m.high_severity_delays
            == vec![
                HighSeverityDelay { patient_id: 0, delay: 20.0, censored: false },
                HighSeverityDelay { patient_id: 2, delay: 90.0, censored: true },
            ]
            && m.served_count == 1
            && m.total_patients == 3
            && m.aborted
            && m.lambda_sw == 0.03
            && m.lambda_int == 0.02
            && close(m.workload, 0.07)
            && m.t_int_mean() == Some(55.0)
            && close(m.rho(), 1.0 / 3.0),
    ));

    // cell aggregation
    let a = trial(&[10.0, 20.0], 1, 2, false, 0.1);
    let b = trial(&[60.0], 1, 4, true, 0.3);
    let c = trial(&[], 0, 3, false, 0.2);
    let v = metric_vector([&a, &b]).unwrap();
    cases.push(("vector.pooled_delay", v.t_int_mean == Some(30.0)));
    cases.push(("vector.rho_per_trial_mean", v.rho == 0.375));
    cases.push(("vector.r_fail", metric_vector([&a, &b, &c]).unwrap().r_fail == 1.0 / 3.0));
    cases.push(("vector.workload", close(metric_vector([&a, &b, &c]).unwrap().w_mean, 0.2)));
    cases.push(("vector.no_high_severity", metric_vector([&c]).unwrap().t_int_mean.is_none()));
    cases.push(("vector.empty_is_error", metric_vector(std::iter::empty::<&TrialMetrics>()).is_err()));

    // dominance
    let x = vector(10.0, 0.5, 0.1, 0.02);
    cases.push(("dominance.irreflexive", !dominates(&x, &x)));
    cases.push(("dominance.canonical_rho", x.canonical() == Some([10.0, 0.5, 0.1, 0.02])));
    cases.push(("dominance.higher_rho_wins", dominates(&vector(10.0, 0.6, 0.1, 0.02), &x)));
    cases.push(("dominance.missing_delay", {
        let none = MetricVector { t_int_mean: None, ..x };
        !dominates(&none, &vector(99.0, 0.0, 1.0, 1.0)) && !dominates(&x, &none)
    }));

    let failed: Vec<&str> = cases.iter().filter(|c| !c.1).map(|c| c.0).collect();
    report.check(
        "metric_oracles",
        failed.is_empty() && cases.len() >= 20,
        if failed.is_empty() { format!("{} hand-built cases", cases.len()) } else { format!("failing: {failed:?}") },
    );
}

// ---------------------------------------------------------------- monotonicity

fn monotonicity(report: &mut Report, result: &SweepResult) {
    for policy in PolicyId::ALL {
        let grid = result.failure_by_delta(policy);
        let drops: Vec<f64> = grid.windows(2).map(|w| w[0].1 - w[1].1).filter(|&d| d > 0.0).collect();
        let ok = drops.is_empty() || (drops.len() == 1 && drops[0] <= 0.01);
        let shown: Vec<String> = grid.iter().map(|(d, r)| format!("{d}:{r:.3}")).collect();
        report.check(&format!("monotonicity.{policy}"), ok, format!("R_fail by delta [{}]", shown.join(" ")));
    }
}

// ---------------------------------------------------------------- statistics

fn ci_coverage(report: &mut Report) {
    let mut r = rng(1);
    let normal = Normal::new(3.0, 2.0).unwrap();
    let reps = 10_000;
    let covered = (0..reps)
        .filter(|_| {
            let n = r.random_range(5..60);
            let xs: Vec<f64> = (0..n).map(|_| normal.sample(&mut r)).collect();
            let (lo, hi) = confidence_interval(&xs, 0.95).unwrap();
            lo <= 3.0 && 3.0 <= hi
        })
        .count();
    let rate = covered as f64 / f64::from(reps);
    report.check("stats.ci_coverage", (0.93..=0.97).contains(&rate), format!("{rate:.4} of {reps} intervals cover the mean"));
}

fn oracle_quantile(xs: &[f64], q: f64) -> f64 {
    let mut s = xs.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let h = (s.len() - 1) as f64 * q + 1.0;
    let k = h.floor() as usize;
    if k >= s.len() {
        return s[s.len() - 1];
    }
    s[k - 1] + (h - k as f64) * (s[k] - s[k - 1])
}

fn random_set(r: &mut ChaCha8Rng) -> Vec<f64> {
    let n = r.random_range(1..200);
    // coarse values force ties
    if r.random_bool(0.3) {
        (0..n).map(|_| f64::from(r.random_range(0..10))).collect()
    } else {
        (0..n).map(|_| r.random_range(-500.0..1500.0)).collect()
    }
}

fn quantile_oracles(report: &mut Report) {
    let mut r = rng(2);
    let qs = [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99, 1.0];
    let mut bad_q = 0;
    let mut bad_box = 0;
    for _ in 0..1000 {
        let xs = random_set(&mut r);
        let got = quantiles(&xs, &qs).unwrap();
        let tol = 1e-9 * xs.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        if got.iter().zip(qs).any(|(g, q)| (g - oracle_quantile(&xs, q)).abs() > tol) {
            bad_q += 1;
        }
        let b = boxplot_stats(&xs).unwrap();
        let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let ok = b.min == min
            && b.max == max
            && (b.q1 - oracle_quantile(&xs, 0.25)).abs() <= tol
            && (b.median - oracle_quantile(&xs, 0.5)).abs() <= tol
            && (b.q3 - oracle_quantile(&xs, 0.75)).abs() <= tol;
        if !ok {
            bad_box += 1;
        }
    }
    report.check("stats.quantiles", bad_q == 0, format!("{bad_q}/1000 sets disagree with the sort-based oracle"));
    report.check("stats.boxplot", bad_box == 0, format!("{bad_box}/1000 sets disagree with the sort-based oracle"));
}

fn pareto_oracle(report: &mut Report) {
    let mut r = rng(3);
    let key = CellKey {
        policy: PI1,
        delta: None,
        load: None,
    };
    let mut bad = 0;
    for _ in 0..1000 {
        let n = r.random_range(1..80);
        let coarse = r.random_bool(0.5);
        let pts: Vec<ParetoPoint> = (0..n)
            .map(|_| {
                let (x, y) = if coarse {
                    (f64::from(r.random_range(0..8)), f64::from(r.random_range(0..8)))
                } else {
                    (r.random_range(0.0..500.0), r.random::<f64>())
                };
                ParetoPoint { key, x, y, size: 0.5 }
            })
            .collect();
        let oracle: Vec<bool> = pts
            .iter()
            .map(|p| !pts.iter().any(|q| q.x <= p.x && q.y <= p.y && (q.x < p.x || q.y < p.y)))
            .collect();
        let front: Vec<ParetoPoint> = pts.iter().zip(&oracle).filter(|(_, &k)| k).map(|(p, _)| *p).collect();
        if front_mask(&pts) != oracle || pareto_front(&pts) != front {
            bad += 1;
        }
    }
    report.check("stats.pareto_front", bad == 0, format!("{bad}/1000 point sets disagree with the O(n^2) oracle"));
}

// ---------------------------------------------------------------- orderings

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Every permutation in which each step goes to a nearest remaining patient
/// (ties to the lower id); there must be exactly one.
fn brute_nearest(s: &Scenario) -> Option<Vec<u32>> {
    let ps = &s.patients;
    let greedy = |perm: &[usize]| {
        let mut at = s.base_position;
        let mut left: Vec<usize> = (0..ps.len()).collect();
        for &i in perm {
            let d = at.distance(ps[i].position);
            if left.iter().any(|&j| {
                let e = at.distance(ps[j].position);
                e < d || (e == d && ps[j].id < ps[i].id)
            }) {
                return false;
            }
            left.retain(|&j| j != i);
            at = ps[i].position;
        }
        true
    };
    let hits: Vec<Vec<u32>> = permutations(ps.len())
        .into_iter()
        .filter(|p| greedy(p))
        .map(|p| p.iter().map(|&i| ps[i].id).collect())
        .collect();
    (hits.len() == 1).then(|| hits[0].clone())
}

/// The unique permutation with nonincreasing scores and ascending ids among
/// equal scores.
fn brute_triage(s: &Scenario, w: &TriageWeights) -> Option<Vec<u32>> {
    let ps = &s.patients;
    let hits: Vec<Vec<u32>> = permutations(ps.len())
        .into_iter()
        .filter(|p| {
            p.windows(2).all(|w2| {
                let (a, b) = (&ps[w2[0]], &ps[w2[1]]);
                let (sa, sb) = (triage_score(a, w), triage_score(b, w));
                sa > sb || (sa == sb && a.id < b.id)
            })
        })
        .map(|p| p.iter().map(|&i| ps[i].id).collect())
        .collect();
    (hits.len() == 1).then(|| hits[0].clone())
}

fn ordering_suite() -> Vec<Scenario> {
    let params = ScenarioParams::default();
    let mut suite: Vec<Scenario> = (0..190u32)
        .map(|i| {
            let cond = Condition::new(i, 0.0, 1 + i % 7).unwrap();
            generate_scenario(cond, &params, &mut derive_stream(99, i, 0, 0, Purpose::Scenario))
        })
        .collect();
    // degenerate layouts: collinear, coincident and equidistant patients
    let mut hand = |pts: &[(f64, f64)], sev: &[f64]| {
        let mut s = scenario(vec![]);
        s.patients = pts
            .iter()
            .zip(sev)
            .enumerate()
            .map(|(i, (&(x, y), &sv))| Patient {
                id: i as u32,
                position: Point::new(x, y),
                severity: sv,
                detect_time: 0.0,
                time_to_criticality: 30.0,
                accessibility: 0.5,
                high_severity: sv >= 0.7,
            })
            .collect();
        suite.push(s);
    };
    hand(&[(300.0, 0.0), (100.0, 0.0), (200.0, 0.0)], &[0.1, 0.5, 0.9]);
    hand(&[(100.0, 0.0), (-100.0, 0.0), (0.0, 100.0), (0.0, -100.0)], &[0.5; 4]);
    hand(&[(50.0, 50.0), (50.0, 50.0), (50.0, 50.0)], &[0.2, 0.2, 0.8]);
    hand(&[(10.0, 0.0)], &[0.3]);
    hand(&[], &[]);
    hand(&[(0.0, 0.0), (5.0, 0.0), (-5.0, 0.0), (10.0, 0.0), (-10.0, 0.0)], &[0.9, 0.1, 0.9, 0.1, 0.5]);
    hand(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0), (4.0, 4.0), (5.0, 5.0), (6.0, 6.0), (7.0, 7.0)], &[0.7; 7]);
    hand(&[(3.0, 4.0), (4.0, 3.0), (0.0, 5.0), (5.0, 0.0)], &[0.4, 0.6, 0.4, 0.6]);
    hand(&[(1000.0, 0.0), (0.0, 1000.0), (-1000.0, 0.0), (0.0, -1000.0), (1.0, 1.0), (2.0, 2.0)], &[0.3, 0.3, 0.3, 0.3, 0.95, 0.05]);
    hand(&[(7.0, 7.0), (7.0, 7.0)], &[0.5, 0.5]);
    suite
}

fn ordering_oracles(report: &mut Report) {
    let suite = ordering_suite();
    let w = TriageWeights::default();
    let bad_nn = suite.iter().filter(|s| brute_nearest(s) != Some(order_heuristic(s).order)).count();
    let bad_tr = suite.iter().filter(|s| brute_triage(s, &w) != Some(order_triage(s, &w).order)).count();
    report.check(
        "ordering.nearest_neighbor",
        bad_nn == 0 && suite.len() == 200,
        format!("{bad_nn}/{} scenarios disagree with brute force", suite.len()),
    );
    report.check("ordering.triage", bad_tr == 0, format!("{bad_tr}/{} scenarios disagree with brute force", suite.len()));

    let mut r = rng(4);
    let mut bad = 0;
    for i in 0..1000u32 {
        let s = &suite[(i as usize) % 190];
        let base = TriageWeights {
            w_s: r.random_range(0.0..3.0),
            w_u: r.random_range(0.0..3.0),
            w_a: r.random_range(0.0..3.0),
            delta0: r.random_range(10.0..200.0),
        };
        let c = 10f64.powf(r.random_range(-3.0..3.0));
        if order_triage(s, &base) != order_triage(s, &base.scaled(c)) {
            bad += 1;
        }
    }
    report.check("ordering.scale_invariance", bad == 0, format!("{bad}/1000 positive rescalings change the order"));
}

#[test]
fn acceptance() {
    let mut report = Report { failed: Vec::new() };
    let result = protocol(&mut report);
    table_orderings(&mut report, &result);
    tails(&mut report, &result);
    published_dominance(&mut report);
    metric_oracles(&mut report);
    monotonicity(&mut report, &result);
    ci_coverage(&mut report);
    quantile_oracles(&mut report);
    pareto_oracle(&mut report);
    ordering_oracles(&mut report);
    assert!(report.failed.is_empty(), "failed criteria: {:?}", report.failed);
}
