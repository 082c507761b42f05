//! Numerical oracles for two interpolation inequalities on
//! `W^{1,p}_{[0]}(0,1) = {v ∈ W^{1,p} : v(0) = 0}`:
//!
//! ```text
//! ‖v‖_∞ ≤ δ^{−δ} ‖v_y‖_p^δ ‖v‖_q^{1−δ},          δ(1/q + 1 − 1/p) = 1/q,
//! ‖v‖_2^{(3+r)/2} ≤ ((3+r)ε/2)‖v_y‖_2² + ((3+r)/(8ε))‖v‖_{1+r}^{1+r}.
//! ```
//!
//! Sobolev norms are replaced by trapezoid norms of node samples and finite
//! differences, so the harness allows a relative slack.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, Grid1D};
use crate::fmt_f64;

pub const DEFAULT_SLACK: f64 = 1e-3;
pub const MAX_MODES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterpParams {
    pub p: f64,
    pub q: f64,
    pub delta: f64,
}

impl InterpParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        Ok(Self { p, q, delta: delta_from_pq(p, q)? })
    }
}

/// The exponent fixed by `δ(1/q + 1 − 1/p) = 1/q`, i.e. `δ = p/(p + pq − q)`.
pub fn delta_from_pq(p: f64, q: f64) -> Result<f64> {
    for (name, v) in [("p", p), ("q", q)] {
        if !(v > 1.0 && v.is_finite()) {
            return Err(Error::param(name, format!("must lie in (1, inf), got {v}")));
        }
    }
    let delta = p / (p + p * q - q);
    debug_assert!(delta > 0.0 && delta < 1.0);
    Ok(delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gap {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`; negative means the sampled field violates the inequality.
    pub margin: f64,
}

impl Gap {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, margin: rhs - lhs }
    }

    /// `margin ≥ −slack·rhs`.
    pub fn holds_within(&self, slack: f64) -> bool {
        self.margin >= -slack * self.rhs
    }
}

fn require_anchored(v: &Field) -> Result<()> {
    let v0 = v.values()[0];
    if v0 != 0.0 {
        return Err(Error::Precondition(format!("field must vanish at y = 0, found v(0) = {v0}")));
    }
    Ok(())
}

/// Both sides of `‖v‖_∞ ≤ δ^{−δ}‖v_y‖_p^δ‖v‖_q^{1−δ}`.
pub fn interpolation_gap(v: &Field, p: f64, q: f64) -> Result<Gap> {
    require_anchored(v)?;
    let delta = delta_from_pq(p, q)?;
    let lhs = v.linf_norm();
    let dv = v.derivative()?.lp_norm(p)?;
    let rhs = delta.powf(-delta) * dv.powf(delta) * v.lp_norm(q)?.powf(1.0 - delta);
    Ok(Gap::new(lhs, rhs))
}

/// Both sides of the `L²` corollary at Young parameter `eps`.
pub fn corollary_gap(v: &Field, r: f64, eps: f64) -> Result<Gap> {
    require_anchored(v)?;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::param("r", format!("must lie in (0, 1), got {r}")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::param("eps", format!("must be positive, got {eps}")));
    }
    let lhs = v.lp_norm(2.0)?.powf((3.0 + r) / 2.0);
    let dv = v.derivative()?.lp_norm(2.0)?;
    let rhs = (3.0 + r) * eps / 2.0 * dv * dv + (3.0 + r) / (8.0 * eps) * v.lp_norm(1.0 + r)?.powf(1.0 + r);
    Ok(Gap::new(lhs, rhs))
}

/// Angular frequency of mode `m` (1-based).
fn mode_frequency(m: usize) -> f64 {
    0.5 * std::f64::consts::PI * m as f64
}

/// `v(y) = Σ a_m sin(ω_m y) + b_m (cos(ω_m y) − 1)` with `ω_m = mπ/2` and
/// `(a_m, b_m)` drawn uniformly from the unit disc, so `|v| ≤ 2·n_modes` and
/// `v(0) = 0` exactly.
pub fn random_test_field(seed: u64, n_modes: usize, grid: Grid1D) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<(f64, f64, f64)> = (1..=n_modes)
        .map(|m| {
            let radius = rng.random::<f64>().sqrt();
            let angle = rng.random_range(0.0..std::f64::consts::TAU);
            (mode_frequency(m), radius * angle.cos(), radius * angle.sin())
        })
        .collect();
    Field::from_fn(grid, |y| {
        coeffs.iter().map(|&(w, a, b)| a * (w * y).sin() + b * ((w * y).cos() - 1.0)).sum()
    })
}

#[derive(Debug, Clone)]
pub struct HarnessConfig {
    pub seeds: u64,
    pub n_cells: usize,
    pub pq: Vec<(f64, f64)>,
    pub r_values: Vec<f64>,
    pub eps_values: Vec<f64>,
    pub slack: f64,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        let ps = [1.5, 2.0, 3.0];
        Self {
            seeds: 1000,
            n_cells: crate::field::DEFAULT_ORACLE_CELLS,
            pq: ps.iter().flat_map(|&p| ps.iter().map(move |&q| (p, q))).collect(),
            r_values: vec![0.2, 0.6, 0.9],
            eps_values: vec![0.1, 1.0, 10.0],
            slack: DEFAULT_SLACK,
        }
    }
}

/// Number of modes used for a given harness seed (1..=16).
pub fn harness_modes(seed: u64) -> usize {
    1 + (seed as usize % MAX_MODES)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaRow {
    pub seed: u64,
    pub p: f64,
    pub q: f64,
    pub gap: Gap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorollaryRow {
    pub seed: u64,
    pub r: f64,
    pub eps: f64,
    pub gap: Gap,
}

#[derive(Debug, Clone, Default)]
pub struct HarnessSummary {
    pub lemma: Vec<LemmaRow>,
    pub corollary: Vec<CorollaryRow>,
    pub slack: f64,
}

fn relative(g: &Gap) -> f64 {
    if g.rhs == 0.0 {
        0.0
    } else {
        g.margin / g.rhs
    }
}

impl HarnessSummary {
    pub fn lemma_violations(&self) -> usize {
        self.lemma.iter().filter(|r| !r.gap.holds_within(self.slack)).count()
    }

    pub fn corollary_violations(&self) -> usize {
        self.corollary.iter().filter(|r| !r.gap.holds_within(self.slack)).count()
    }

    /// Smallest `margin/rhs` seen for the `L^∞` inequality: how tight the
    /// constant `δ^{−δ}` is on the harness.
    pub fn lemma_sharpness(&self) -> f64 {
        self.lemma.iter().map(|r| relative(&r.gap)).fold(f64::INFINITY, f64::min)
    }

    pub fn corollary_sharpness(&self) -> f64 {
        self.corollary.iter().map(|r| relative(&r.gap)).fold(f64::INFINITY, f64::min)
    }

    /// The `count` lemma rows with the smallest relative margin.
    pub fn worst_lemma(&self, count: usize) -> Vec<LemmaRow> {
        let mut rows = self.lemma.clone();
        rows.sort_by(|a, b| relative(&a.gap).total_cmp(&relative(&b.gap)));
        rows.truncate(count);
        rows
    }

    /// `seed,p,q,lhs,rhs,margin`.
    pub fn write_lemma_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "seed,p,q,lhs,rhs,margin")?;
        for r in &self.lemma {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.seed,
                fmt_f64(r.p),
                fmt_f64(r.q),
                fmt_f64(r.gap.lhs),
                fmt_f64(r.gap.rhs),
                fmt_f64(r.gap.margin)
            )?;
        }
        Ok(())
    }

    /// `seed,r,eps,lhs,rhs,margin`.
    pub fn write_corollary_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "seed,r,eps,lhs,rhs,margin")?;
        for r in &self.corollary {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.seed,
                fmt_f64(r.r),
                fmt_f64(r.eps),
                fmt_f64(r.gap.lhs),
                fmt_f64(r.gap.rhs),
                fmt_f64(r.gap.margin)
            )?;
        }
        Ok(())
    }
}

/// Runs both oracles on seeds `0..config.seeds`.
pub fn run_harness(config: &HarnessConfig) -> Result<HarnessSummary> {
    let grid = Grid1D::new(config.n_cells)?;
    let mut summary = HarnessSummary { slack: config.slack, ..Default::default() };
    for seed in 0..config.seeds {
        let v = random_test_field(seed, harness_modes(seed), grid);
        for &(p, q) in &config.pq {
            summary.lemma.push(LemmaRow { seed, p, q, gap: interpolation_gap(&v, p, q)? });
        }
        for &r in &config.r_values {
            for &eps in &config.eps_values {
                summary.corollary.push(CorollaryRow { seed, r, eps, gap: corollary_gap(&v, r, eps)? });
            }
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(n: usize) -> Grid1D {
        Grid1D::new(n).unwrap()
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_from_pq(2.0, 2.0).unwrap(), 0.5);
        assert!((delta_from_pq(2.0, 1.6).unwrap() - 2.0 / 3.6).abs() < 1e-15);
        assert!(delta_from_pq(1.0, 2.0).is_err());
        assert!(delta_from_pq(2.0, f64::INFINITY).is_err());
    }

    #[test]
    fn zero_field_gaps() {
        let z = Field::zeros(grid(100));
        assert_eq!(interpolation_gap(&z, 2.0, 2.0).unwrap(), Gap { lhs: 0.0, rhs: 0.0, margin: 0.0 });
        assert_eq!(corollary_gap(&z, 0.6, 1.0).unwrap(), Gap { lhs: 0.0, rhs: 0.0, margin: 0.0 });
    }

    #[test]
    fn linear_field_gaps() {
        let v = Field::from_fn(grid(2000), |y| y);
        let g = interpolation_gap(&v, 2.0, 2.0).unwrap();
        assert_eq!(g.lhs, 1.0);
        assert!((g.rhs - 1.074569931823542).abs() < 1e-6, "{g:?}");
        let c = corollary_gap(&v, 0.6, 1.0).unwrap();
        assert!((c.lhs - 0.37204105801130144).abs() < 1e-6, "{c:?}");
        assert!((c.rhs - 1.9730769230744525).abs() < 1e-6, "{c:?}");
        for eps in [0.1, 1.0, 10.0] {
            assert!(corollary_gap(&v, 0.6, eps).unwrap().margin >= 0.0);
        }
    }

    #[test]
    fn unanchored_field_is_rejected() {
        let v = Field::from_fn(grid(10), |y| y + 1.0);
        assert!(matches!(interpolation_gap(&v, 2.0, 2.0), Err(Error::Precondition(_))));
        assert!(matches!(corollary_gap(&v, 0.5, 1.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn random_fields_are_anchored_and_reproducible() {
        let g = grid(500);
        for seed in 0..20 {
            let a = random_test_field(seed, 5, g);
            assert_eq!(a.values()[0], 0.0);
            assert_eq!(a, random_test_field(seed, 5, g));
            assert!(a.linf_norm() <= 10.0);
        }
        assert_ne!(random_test_field(1, 5, g), random_test_field(2, 5, g));
    }

    #[test]
    fn csv_headers() {
        let cfg = HarnessConfig { seeds: 2, n_cells: 100, ..Default::default() };
        let s = run_harness(&cfg).unwrap();
        let mut buf = Vec::new();
        s.write_lemma_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("seed,p,q,lhs,rhs,margin\n"));
        assert_eq!(text.lines().count(), 1 + 2 * 9);
    }

    proptest! {
        #[test]
        fn delta_satisfies_exponent_relation(p in 1.0001..50.0f64, q in 1.0001..50.0f64) {
            let d = delta_from_pq(p, q).unwrap();
            prop_assert!(d > 0.0 && d < 1.0);
            prop_assert!((d * (1.0 / q + 1.0 - 1.0 / p) - 1.0 / q).abs() <= 1e-12);
        }

        #[test]
        fn both_sides_scale_linearly(seed in 0u64..500, alpha in -8.0..8.0f64) {
            let g = grid(400);
            let v = random_test_field(seed, 4, g);
            let base = interpolation_gap(&v, 2.0, 1.5).unwrap();
            let scaled = interpolation_gap(&v.scaled(alpha), 2.0, 1.5).unwrap();
            let a = alpha.abs();
            prop_assert!((scaled.lhs - a * base.lhs).abs() <= 1e-12 * (1.0 + scaled.lhs));
            prop_assert!((scaled.rhs - a * base.rhs).abs() <= 1e-12 * (1.0 + scaled.rhs));
        }
    }
}
