//! Integrator for the sublinear reaction-diffusion system
//!
//! ```text
//! w_t = w_yy − k|w|^{r−1}w + f(y, t),   y ∈ (0, 1),
//! w(0, t) = 0,   w_y(1, t) = 0,   w(·, 0) = w₀.
//! ```
//!
//! Each step is a Strang composition: half a step of Crank–Nicolson
//! diffusion, a full reaction/forcing substep, and another half diffusion.
//! The reaction `ẇ = −k|w|^{r−1}w` is integrated in closed form, which maps
//! small values to exactly zero and so reproduces finite-time extinction.
//!
//! The Neumann end uses the ghost node `w_{N+1} = w_{N−1}`. The resulting
//! diffusion matrix is self-adjoint in the trapezoid inner product, so the
//! diffusion substeps never increase `V = ‖w‖²` as measured by
//! [`Field::lyapunov_v`].

use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::certificate::PdeParams;
use crate::error::{Error, FieldIssue, Result};
use crate::field::{Field, Grid1D, DEFAULT_SIM_CELLS};
use crate::fmt_f64;
use crate::tridiag::Tridiagonal;

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_RECORD_EVERY: usize = 10;
pub const DEFAULT_EXTINCTION_THRESHOLD: f64 = 1e-8;

/// Below this magnitude (or where the forcing vanishes) the reaction substep
/// uses the exact decay formula; above it a midpoint step with forcing.
pub const REACTION_EXACT_THRESHOLD: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitSpec {
    /// `w₀(y) = A₁ √(y + 1/2) sin(3πy + π/2)`.
    SqrtCosine { a1: f64 },
    /// Node values on the simulation grid.
    Custom { values: Vec<f64> },
}

/// Space-time forcing `f(y, t)` supplied by the caller.
#[derive(Clone)]
pub struct CustomDisturbance(pub Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>);

impl fmt::Debug for CustomDisturbance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomDisturbance(..)")
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DisturbanceSpec {
    #[default]
    Zero,
    /// `f(y, t) = A₂ sin(y + 12t + 6)`.
    TravelingSine { a2: f64 },
    #[serde(skip)]
    Custom(CustomDisturbance),
}

impl DisturbanceSpec {
    pub fn eval(&self, y: f64, t: f64) -> f64 {
        match self {
            DisturbanceSpec::Zero => 0.0,
            DisturbanceSpec::TravelingSine { a2 } => a2 * (y + 12.0 * t + 6.0).sin(),
            DisturbanceSpec::Custom(f) => (f.0)(y, t),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            DisturbanceSpec::Zero => true,
            DisturbanceSpec::TravelingSine { a2 } => *a2 == 0.0,
            DisturbanceSpec::Custom(_) => false,
        }
    }

    /// A bound on `sup_t ‖f[t]‖_{L²}` known in closed form, when there is one.
    pub fn analytic_sup_bound(&self) -> Option<f64> {
        match self {
            DisturbanceSpec::Zero => Some(0.0),
            DisturbanceSpec::TravelingSine { a2 } => Some(a2.abs()),
            DisturbanceSpec::Custom(_) => None,
        }
    }
}

fn default_n_cells() -> usize {
    DEFAULT_SIM_CELLS
}
fn default_dt() -> f64 {
    DEFAULT_DT
}
fn default_record_every() -> usize {
    DEFAULT_RECORD_EVERY
}
fn default_extinction_threshold() -> f64 {
    DEFAULT_EXTINCTION_THRESHOLD
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// `k = 0` is accepted here and disables the reaction.
    pub params: PdeParams,
    pub init: InitSpec,
    #[serde(default)]
    pub dist: DisturbanceSpec,
    #[serde(default = "default_n_cells")]
    pub n_cells: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    #[serde(default = "default_extinction_threshold")]
    pub extinction_threshold: f64,
    /// Stop once the state is identically zero and the forcing vanishes.
    #[serde(default)]
    pub early_stop: bool,
}

impl SimConfig {
    pub fn new(params: PdeParams, init: InitSpec, dist: DisturbanceSpec, t_end: f64) -> Self {
        Self {
            params,
            init,
            dist,
            n_cells: DEFAULT_SIM_CELLS,
            dt: DEFAULT_DT,
            t_end,
            record_every: DEFAULT_RECORD_EVERY,
            extinction_threshold: DEFAULT_EXTINCTION_THRESHOLD,
            early_stop: false,
        }
    }

    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::new(self.n_cells)
    }

    /// Collects every violated invariant instead of stopping at the first.
    pub fn issues(&self) -> Vec<FieldIssue> {
        let mut out = Vec::new();
        let mut bad = |field: &str, reason: String| out.push(FieldIssue { field: field.to_string(), reason });
        let PdeParams { k, r } = self.params;
        if !(k >= 0.0 && k.is_finite()) {
            bad("params.k", format!("must be finite and >= 0, got {k}"));
        }
        if !(r > 0.0 && r < 1.0) {
            bad("params.r", format!("must lie in (0, 1), got {r}"));
        }
        match &self.init {
            InitSpec::SqrtCosine { a1 } if !a1.is_finite() => bad("init.a1", format!("must be finite, got {a1}")),
            InitSpec::Custom { values } => {
                if values.len() != self.n_cells + 1 {
                    bad("init.values", format!("expected n_cells + 1 = {} values, got {}", self.n_cells + 1, values.len()));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    bad("init.values", "all values must be finite".to_string());
                }
            }
            _ => {}
        }
        if let DisturbanceSpec::TravelingSine { a2 } = self.dist {
            if !a2.is_finite() {
                bad("dist.a2", format!("must be finite, got {a2}"));
            }
        }
        if self.n_cells < 2 {
            bad("n_cells", format!("must be at least 2, got {}", self.n_cells));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            bad("dt", format!("must be positive, got {}", self.dt));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            bad("t_end", format!("must be finite and >= 0, got {}", self.t_end));
        } else if self.t_end > 0.0 && self.dt > self.t_end {
            bad("dt", format!("must not exceed t_end = {}, got {}", self.t_end, self.dt));
        }
        if self.record_every == 0 {
            bad("record_every", "must be positive".to_string());
        }
        if !(self.extinction_threshold > 0.0 && self.extinction_threshold.is_finite()) {
            bad("extinction_threshold", format!("must be positive, got {}", self.extinction_threshold));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let issues = self.issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(issues))
        }
    }
}

pub fn init_field(spec: &InitSpec, grid: Grid1D) -> Result<Field> {
    match spec {
        InitSpec::SqrtCosine { a1 } => {
            let a1 = *a1;
            // sin(3πy + π/2) = cos(3πy)
            Ok(Field::from_fn(grid, |y| a1 * (y + 0.5).sqrt() * (3.0 * std::f64::consts::PI * y).cos()))
        }
        InitSpec::Custom { values } => Field::new(grid, values.clone()),
    }
}

pub fn disturbance_field(spec: &DisturbanceSpec, grid: Grid1D, t: f64) -> Field {
    Field::from_fn(grid, |y| spec.eval(y, t))
}

/// Exact flow of `ẇ = −k|w|^{r−1}w` over `dt`:
/// `sign(w)·max(|w|^{1−r} − k(1−r)dt, 0)^{1/(1−r)}`.
pub fn sublinear_exact(w: f64, dt: f64, params: PdeParams) -> f64 {
    if w == 0.0 || params.k == 0.0 {
        return w;
    }
    let e = 1.0 - params.r;
    let base = w.abs().powf(e) - params.k * e * dt;
    if base <= 0.0 {
        return 0.0;
    }
    // Rounding in the power round trip must never grow |w|.
    base.powf(e.recip()).min(w.abs()).copysign(w)
}

fn reaction_rate(w: f64, params: PdeParams) -> f64 {
    if w == 0.0 {
        0.0
    } else {
        -params.k * w.abs().powf(params.r).copysign(w)
    }
}

/// Crank–Nicolson half-step operator `(I − (Δ/2)L)⁻¹(I + (Δ/2)L)` with
/// `Δ = dt/2` on the unknowns `w_1..w_N`.
#[derive(Debug, Clone)]
struct HalfDiffusion {
    dt: f64,
    a: f64,
    lhs: Tridiagonal,
    scratch: Vec<f64>,
}

impl HalfDiffusion {
    fn new(grid: Grid1D, dt: f64) -> Self {
        let n = grid.n_cells();
        let h = grid.h();
        let a = dt / (4.0 * h * h);
        let mut sub = vec![-a; n];
        let diag = vec![1.0 + 2.0 * a; n];
        let sup = vec![-a; n];
        sub[n - 1] = -2.0 * a;
        Self { dt, a, lhs: Tridiagonal::factor(&sub, &diag, &sup), scratch: vec![0.0; n] }
    }

    fn apply(&mut self, w: &mut [f64]) {
        let n = w.len() - 1;
        let a = self.a;
        // Dirichlet value is zero for t > 0 whatever the initial datum holds.
        for i in 1..=n {
            let left = if i == 1 { 0.0 } else { w[i - 1] };
            self.scratch[i - 1] = if i < n {
                a * left + (1.0 - 2.0 * a) * w[i] + a * w[i + 1]
            } else {
                2.0 * a * left + (1.0 - 2.0 * a) * w[i]
            };
        }
        self.lhs.solve_in_place(&mut self.scratch);
        w[0] = 0.0;
        w[1..].copy_from_slice(&self.scratch);
    }
}

/// Reusable stepper: caches the diffusion factorisation for the current `dt`.
pub struct Integrator<'a> {
    config: &'a SimConfig,
    grid: Grid1D,
    diffusion: Option<HalfDiffusion>,
}

impl<'a> Integrator<'a> {
    pub fn new(config: &'a SimConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { config, grid: config.grid()?, diffusion: None })
    }

    /// Advances `state` from `t` to `t + dt`. Returns `false` if any node
    /// became non-finite.
    pub fn advance(&mut self, state: &mut Field, t: f64, dt: f64) -> bool {
        debug_assert_eq!(state.grid(), self.grid);
        if self.diffusion.as_ref().is_none_or(|d| d.dt != dt) {
            self.diffusion = Some(HalfDiffusion::new(self.grid, dt));
        }
        let diffusion = self.diffusion.as_mut().expect("factorised above");
        let params = self.config.params;
        let dist = &self.config.dist;
        let grid = self.grid;
        let w = state.values_mut();

        diffusion.apply(w);
        let t_mid = t + 0.5 * dt;
        for (i, wi) in w.iter_mut().enumerate().skip(1) {
            let f = dist.eval(grid.node(i), t_mid);
            let v = *wi;
            *wi = if v.abs() <= REACTION_EXACT_THRESHOLD || f == 0.0 {
                sublinear_exact(v, dt, params) + dt * f
            } else {
                let half = v + 0.5 * dt * (reaction_rate(v, params) + f);
                v + dt * (reaction_rate(half, params) + f)
            };
        }
        diffusion.apply(w);
        w[0] = 0.0;
        w.iter().all(|v| v.is_finite())
    }
}

/// One Strang step of the configured system.
pub fn step(state: &Field, t: f64, dt: f64, config: &SimConfig) -> Result<Field> {
    if state.grid() != config.grid()? {
        return Err(Error::Precondition("state is not on the configured grid".into()));
    }
    if !(dt > 0.0) {
        return Err(Error::param("dt", format!("must be positive, got {dt}")));
    }
    let mut next = state.clone();
    if !Integrator::new(config)?.advance(&mut next, t, dt) {
        return Err(Error::Divergence { step: 0, t: t + dt });
    }
    Ok(next)
}

/// Recorded trajectory of a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub fields: Vec<Field>,
    pub l2_norms: Vec<f64>,
    pub v_values: Vec<f64>,
    /// `‖f[t]‖_{L²}` at each recorded time.
    pub dist_l2_norms: Vec<f64>,
    /// Largest recorded `‖f[t]‖_{L²}`, standing in for `sup_t ‖f[t]‖`.
    pub dist_sup_norm: f64,
    /// Closed-form bound on `sup_t ‖f[t]‖`, reported next to the sampled one.
    pub dist_analytic_bound: Option<f64>,
    pub extinction_threshold: f64,
}

impl TrajectoryRecord {
    pub fn new(extinction_threshold: f64, dist_analytic_bound: Option<f64>) -> Self {
        Self {
            times: Vec::new(),
            fields: Vec::new(),
            l2_norms: Vec::new(),
            v_values: Vec::new(),
            dist_l2_norms: Vec::new(),
            dist_sup_norm: 0.0,
            dist_analytic_bound,
            extinction_threshold,
        }
    }

    pub fn push(&mut self, t: f64, field: Field, dist_l2: f64) {
        let v = field.lyapunov_v();
        self.times.push(t);
        self.l2_norms.push(v.sqrt());
        self.v_values.push(v);
        self.dist_l2_norms.push(dist_l2);
        self.dist_sup_norm = self.dist_sup_norm.max(dist_l2);
        self.fields.push(field);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_field(&self) -> Option<&Field> {
        self.fields.last()
    }

    /// Every field multiplied by `alpha` (disturbance data kept).
    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = Self::new(self.extinction_threshold, self.dist_analytic_bound);
        for ((t, f), d) in self.times.iter().zip(&self.fields).zip(&self.dist_l2_norms) {
            out.push(*t, f.scaled(alpha), *d);
        }
        out
    }

    /// `t,l2_norm,v,dist_l2`.
    pub fn write_trajectory_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,l2_norm,v,dist_l2")?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{},{},{},{}",
                fmt_f64(self.times[i]),
                fmt_f64(self.l2_norms[i]),
                fmt_f64(self.v_values[i]),
                fmt_f64(self.dist_l2_norms[i])
            )?;
        }
        Ok(())
    }

    /// `t,y,w`, one row per recorded time and node.
    pub fn write_snapshots_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,y,w")?;
        for (t, field) in self.times.iter().zip(&self.fields) {
            let ts = fmt_f64(*t);
            for (y, w) in field.grid().nodes().zip(field.values()) {
                writeln!(out, "{ts},{},{}", fmt_f64(y), fmt_f64(*w))?;
            }
        }
        Ok(())
    }
}

pub fn simulate(config: &SimConfig) -> Result<TrajectoryRecord> {
    config.validate()?;
    let state = init_field(&config.init, config.grid()?)?;
    simulate_from(config, state, 0.0)
}

/// Integrates from `state` at time `t0` up to `config.t_end`.
///
/// The disturbance is always sampled at absolute time, so restarting from a
/// recorded state reproduces the uninterrupted run.
pub fn simulate_from(config: &SimConfig, mut state: Field, t0: f64) -> Result<TrajectoryRecord> {
    let mut integrator = Integrator::new(config)?;
    let grid = integrator.grid;
    if state.grid() != grid {
        return Err(Error::Precondition("initial state is not on the configured grid".into()));
    }
    let dist = &config.dist;
    let dist_norm = |t: f64| {
        if dist.is_zero() {
            0.0
        } else {
            disturbance_field(dist, grid, t).l2_norm()
        }
    };
    let mut record = TrajectoryRecord::new(config.extinction_threshold, dist.analytic_sup_bound());
    record.push(t0, state.clone(), dist_norm(t0));

    let span = config.t_end - t0;
    if span <= 0.0 {
        return Ok(record);
    }
    let n_steps = (span / config.dt - 1e-9).ceil().max(1.0) as usize;
    let stop_when_dead = config.early_stop && dist.is_zero();
    for i in 0..n_steps {
        let t = t0 + i as f64 * config.dt;
        let t_next = if i + 1 == n_steps { config.t_end } else { t0 + (i + 1) as f64 * config.dt };
        if !integrator.advance(&mut state, t, t_next - t) {
            return Err(Error::Divergence { step: i + 1, t: t_next });
        }
        let last = i + 1 == n_steps;
        let dead = stop_when_dead && state.values().iter().all(|v| *v == 0.0);
        if last || dead || (i + 1) % config.record_every == 0 {
            record.push(t_next, state.clone(), dist_norm(t_next));
        }
        if dead {
            break;
        }
    }
    Ok(record)
}
