//! Comparison functions and the finite-time decay envelope.
//!
//! A [`KFun`] is a class-K function `γ: ℝ≥0 → ℝ≥0` (continuous, strictly
//! increasing, `γ(0) = 0`). The only primitive is a power law; compositions
//! and inverses are built on top of it, which is enough to express the gains
//! `ζ`, `χ`, `ρ = α₁⁻¹∘α₂∘χ` that appear in FTISS estimates.
//!
//! [`GklEnvelope`] packages the decay bound that follows from a Lyapunov
//! inequality `V̇ ≤ −M V^σ₀` together with the quadratic sandwich
//! `μ₁‖x‖² ≤ V(x) ≤ μ₂‖x‖²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative tolerance used by [`KFun::inverse`] when no other is given.
pub const DEFAULT_INVERSE_TOL: f64 = 1e-10;

/// A class-K function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KFun {
    /// `s ↦ coefficient · s^exponent`.
    PowerLaw { coefficient: f64, exponent: f64 },
    /// `s ↦ outer(inner(s))`.
    Composition { outer: Box<KFun>, inner: Box<KFun> },
    /// `s ↦ f⁻¹(s)`, evaluated by bisection.
    InverseOf { of: Box<KFun> },
}

impl KFun {
    pub fn identity() -> Self {
        KFun::PowerLaw { coefficient: 1.0, exponent: 1.0 }
    }

    pub fn power_law(coefficient: f64, exponent: f64) -> Result<Self> {
        if !(coefficient.is_finite() && coefficient > 0.0) {
            return Err(Error::param("coefficient", format!("must be positive and finite, got {coefficient}")));
        }
        if !(exponent.is_finite() && exponent > 0.0) {
            return Err(Error::param("exponent", format!("must be positive and finite, got {exponent}")));
        }
        Ok(KFun::PowerLaw { coefficient, exponent })
    }

    /// `self ∘ inner`.
    pub fn compose(self, inner: KFun) -> Self {
        KFun::Composition { outer: Box::new(self), inner: Box::new(inner) }
    }

    pub fn inverted(self) -> Self {
        KFun::InverseOf { of: Box::new(self) }
    }

    /// Every constructible spec is built from power laws with positive
    /// exponent, so it is unbounded; the check is kept explicit so that new
    /// primitives have to decide.
    pub fn is_unbounded(&self) -> bool {
        match self {
            KFun::PowerLaw { exponent, .. } => *exponent > 0.0,
            KFun::Composition { outer, inner } => outer.is_unbounded() && inner.is_unbounded(),
            KFun::InverseOf { of } => of.is_unbounded(),
        }
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("class-K function evaluated at s = {s}")));
        }
        match self {
            KFun::PowerLaw { coefficient, exponent } => Ok(coefficient * s.powf(*exponent)),
            KFun::Composition { outer, inner } => outer.eval(inner.eval(s)?),
            KFun::InverseOf { of } => of.inverse(s, DEFAULT_INVERSE_TOL),
        }
    }

    /// Solves `self(s) = v` for `s ≥ 0`.
    ///
    /// Power laws are inverted in closed form. Everything else goes through
    /// bisection on an upper bracket that doubles until it straddles `v`; the
    /// returned `s` satisfies `|self(s) − v| ≤ tol·max(1, v)` unless the bracket
    /// collapses to adjacent floats first.
    pub fn inverse(&self, v: f64, tol: f64) -> Result<f64> {
        if !(v >= 0.0) {
            return Err(Error::Domain(format!("inverse requested at v = {v}")));
        }
        if !(tol > 0.0) {
            return Err(Error::param("tol", format!("must be positive, got {tol}")));
        }
        if v == 0.0 {
            return Ok(0.0);
        }
        match self {
            KFun::PowerLaw { coefficient, exponent } => Ok((v / coefficient).powf(exponent.recip())),
            KFun::InverseOf { of } => of.eval(v),
            KFun::Composition { .. } => self.bisect(v, tol),
        }
    }

    fn bisect(&self, v: f64, tol: f64) -> Result<f64> {
        let target = tol * v.max(1.0);
        let mut lo = 0.0_f64;
        let mut hi = 1.0_f64;
        loop {
            let fh = self.eval(hi)?;
            if fh >= v {
                break;
            }
            if !fh.is_finite() || !hi.is_finite() || !self.is_unbounded() {
                return Err(Error::Range { value: v });
            }
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = self.eval(mid)?;
            if (fm - v).abs() <= target {
                return Ok(mid);
            }
            if fm < v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (flo, fhi) = (self.eval(lo)?, self.eval(hi)?);
        Ok(if (flo - v).abs() <= (fhi - v).abs() { lo } else { hi })
    }
}

fn check_decay_params(m: f64, sigma0: f64) -> Result<()> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::param("M", format!("decay modulus must be positive, got {m}")));
    }
    if !(sigma0 > 0.0 && sigma0 < 1.0) {
        return Err(Error::param("sigma0", format!("must lie in (0, 1), got {sigma0}")));
    }
    Ok(())
}

/// Time `T(s) = s^{1−σ₀} / (M(1−σ₀))` at which the solution of
/// `V̇ = −M V^σ₀`, `V(0) = s`, reaches zero.
pub fn settling_time(s: f64, m: f64, sigma0: f64) -> Result<f64> {
    check_decay_params(m, sigma0)?;
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("settling time requested for s = {s}")));
    }
    let e = 1.0 - sigma0;
    Ok(s.powf(e) / (m * e))
}

/// The GKL bound `β₁(s, t)` on `V(t)` given `V(0) = s`.
///
/// Exactly `s` at `t = 0` and exactly `0` for `t ≥ T(s)`.
pub fn beta1(s: f64, t: f64, m: f64, sigma0: f64) -> Result<f64> {
    let settle = settling_time(s, m, sigma0)?;
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("beta1 evaluated at t = {t}")));
    }
    if t == 0.0 {
        return Ok(s);
    }
    if t >= settle {
        return Ok(0.0);
    }
    let e = 1.0 - sigma0;
    let base = (s.powf(e) - m * e * t).max(0.0);
    Ok(base.powf(e.recip()))
}

/// Decay-plus-gain envelope `β(‖x₀‖, t) + ρ(‖u‖)` for a quadratic Lyapunov
/// sandwich `μ₁‖x‖² ≤ V ≤ μ₂‖x‖²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GklEnvelope {
    /// Decay modulus `M` in `V̇ ≤ −M V^σ₀`.
    pub m: f64,
    pub sigma0: f64,
    pub mu1: f64,
    pub mu2: f64,
    /// Gain `χ`: the dissipation inequality applies once `‖x‖ ≥ χ(‖u‖)`.
    pub chi: KFun,
}

impl GklEnvelope {
    pub fn new(m: f64, sigma0: f64, mu1: f64, mu2: f64, chi: KFun) -> Result<Self> {
        check_decay_params(m, sigma0)?;
        if !(mu1 > 0.0 && mu1.is_finite()) {
            return Err(Error::param("mu1", format!("must be positive, got {mu1}")));
        }
        if !(mu2 >= mu1 && mu2.is_finite()) {
            return Err(Error::param("mu2", format!("must satisfy mu2 >= mu1 = {mu1}, got {mu2}")));
        }
        Ok(Self { m, sigma0, mu1, mu2, chi })
    }

    /// Settling time of the state bound started from `‖x₀‖ = s`, i.e. `T(α₂(s))`.
    pub fn settling(&self, s: f64) -> Result<f64> {
        settling_time(self.mu2 * s * s, self.m, self.sigma0)
    }

    /// `β(s, t) = α₁⁻¹(β₁(α₂(s), t))`.
    pub fn beta(&self, s: f64, t: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("beta evaluated at s = {s}")));
        }
        let v = beta1(self.mu2 * s * s, t, self.m, self.sigma0)?;
        Ok((v / self.mu1).sqrt())
    }

    /// `ρ = α₁⁻¹∘α₂∘χ`, which collapses to `√(μ₂/μ₁)·χ` for quadratic `αᵢ`.
    pub fn rho(&self, u: f64) -> Result<f64> {
        Ok((self.mu2 / self.mu1).sqrt() * self.chi.eval(u)?)
    }

    /// The same gain assembled as a literal composition of comparison functions.
    pub fn rho_composed(&self) -> KFun {
        let alpha1 = KFun::PowerLaw { coefficient: self.mu1, exponent: 2.0 };
        let alpha2 = KFun::PowerLaw { coefficient: self.mu2, exponent: 2.0 };
        alpha1.inverted().compose(alpha2.compose(self.chi.clone()))
    }

    /// `β(s0, t) + ρ(u_norm)`.
    pub fn eval(&self, s0: f64, t: f64, u_norm: f64) -> Result<f64> {
        Ok(self.beta(s0, t)? + self.rho(u_norm)?)
    }
}
