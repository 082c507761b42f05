//! Trajectory audits.
//!
//! The Lie derivative of `V` along a trajectory is an upper Dini limit; on a
//! recorded series it is replaced by the forward difference between
//! consecutive records.

use std::fmt::Write as _;

use serde::Serialize;

use crate::comparison::GklEnvelope;
use crate::error::{Error, Result};
use crate::pde::TrajectoryRecord;

pub const DEFAULT_AUDIT_SLACK: f64 = 1e-3;

/// Forward difference `(v[i+1] − v[i]) / (t[i+1] − t[i])`.
pub fn dini_forward(values: &[f64], times: &[f64], i: usize) -> Result<f64> {
    let len = values.len().min(times.len());
    if i + 1 >= len {
        return Err(Error::Index { index: i, len });
    }
    Ok((values[i + 1] - values[i]) / (times[i + 1] - times[i]))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub total_steps: usize,
    /// Steps with `‖w‖ ≥ χ(‖u‖)` above the extinction threshold.
    pub applicable_steps: usize,
    pub violations: usize,
    /// Smallest `(−M V^σ₀ + slack·max(1, V)) − D⁺V` over applicable steps;
    /// `+∞` (serialised as `null`) when nothing was applicable.
    pub worst_margin: f64,
    pub pass_fraction: f64,
    pub slack: f64,
}

impl AuditReport {
    /// `key = value` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "total_steps = {}", self.total_steps);
        let _ = writeln!(s, "applicable_steps = {}", self.applicable_steps);
        let _ = writeln!(s, "violations = {}", self.violations);
        let _ = writeln!(s, "worst_margin = {}", crate::fmt_f64(self.worst_margin));
        let _ = writeln!(s, "pass_fraction = {}", crate::fmt_f64(self.pass_fraction));
        let _ = writeln!(s, "slack = {}", crate::fmt_f64(self.slack));
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report is plain data")
    }
}

/// Checks `‖w‖ ≥ χ(‖u‖) ⇒ D⁺V ≤ −M V^σ₀` step by step, with `slack·max(1, V)`
/// of tolerance for the forward-difference surrogate.
pub fn dissipation_audit(traj: &TrajectoryRecord, env: &GklEnvelope, slack: f64) -> Result<AuditReport> {
    if !(slack >= 0.0) {
        return Err(Error::param("slack", format!("must be nonnegative, got {slack}")));
    }
    let gate = env.chi.eval(traj.dist_sup_norm)?;
    let total_steps = traj.len().saturating_sub(1);
    let mut applicable = 0;
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    for i in 0..total_steps {
        let norm = traj.l2_norms[i];
        if norm < gate || norm <= traj.extinction_threshold {
            continue;
        }
        applicable += 1;
        let v = traj.v_values[i];
        let rate = dini_forward(&traj.v_values, &traj.times, i)?;
        let margin = -env.m * v.powf(env.sigma0) + slack * v.max(1.0) - rate;
        worst = worst.min(margin);
        if margin < 0.0 {
            violations += 1;
        }
    }
    let pass_fraction = if applicable == 0 { 1.0 } else { 1.0 - violations as f64 / applicable as f64 };
    Ok(AuditReport { total_steps, applicable_steps: applicable, violations, worst_margin: worst, pass_fraction, slack })
}

/// Largest `‖w(t)‖ / (β(‖w(0)‖, t) + ρ(sup ‖f‖))` over the record; a value
/// `≤ 1` means the envelope bounds the whole run.
pub fn envelope_audit(traj: &TrajectoryRecord, env: &GklEnvelope) -> Result<f64> {
    let Some(&s0) = traj.l2_norms.first() else {
        return Ok(0.0);
    };
    let gain = env.rho(traj.dist_sup_norm)?;
    let mut worst = 0.0_f64;
    for (&t, &norm) in traj.times.iter().zip(&traj.l2_norms) {
        if norm == 0.0 {
            continue;
        }
        let bound = env.beta(s0, t - traj.times[0])? + gain;
        let ratio = if bound == 0.0 { f64::INFINITY } else { norm / bound };
        worst = worst.max(ratio);
    }
    Ok(worst)
}

/// First recorded time after which `‖w‖ ≤ threshold` for the rest of the record.
pub fn extinction_time(traj: &TrajectoryRecord, threshold: f64) -> Option<f64> {
    let last_above = traj.l2_norms.iter().rposition(|&n| n > threshold);
    match last_above {
        None => traj.times.first().copied(),
        Some(i) => traj.times.get(i + 1).copied(),
    }
}
