//! Dissipation certificates and the gains they imply.
//!
//! A certificate `(b, c, τ, ζ, μ₁, μ₂)` asserts that along trajectories
//!
//! ```text
//! V̇ ≤ −b‖x‖^τ + c‖x‖ζ(‖u‖),   μ₁‖x‖² ≤ V(x) ≤ μ₂‖x‖²,   τ ∈ (1, 2).
//! ```
//!
//! Absorbing the input term with a fraction `ε₀ ∈ (0, b)` of the decay gives
//! `V̇ ≤ −M V^{τ/2}` whenever `‖x‖ ≥ χ(‖u‖)`.

use serde::{Deserialize, Serialize};

use crate::comparison::{GklEnvelope, KFun};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissipationCert {
    pub b: f64,
    pub c: f64,
    pub tau: f64,
    pub zeta: KFun,
    pub mu1: f64,
    pub mu2: f64,
}

impl DissipationCert {
    pub fn new(b: f64, c: f64, tau: f64, zeta: KFun, mu1: f64, mu2: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::param("b", format!("must be positive, got {b}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::param("c", format!("must be positive, got {c}")));
        }
        if !(tau > 1.0 && tau < 2.0) {
            return Err(Error::param("tau", format!("must lie in (1, 2), got {tau}")));
        }
        if !(mu1 > 0.0 && mu1.is_finite()) {
            return Err(Error::param("mu1", format!("must be positive, got {mu1}")));
        }
        if !(mu2 >= mu1 && mu2.is_finite()) {
            return Err(Error::param("mu2", format!("must satisfy mu2 >= mu1 = {mu1}, got {mu2}")));
        }
        Ok(Self { b, c, tau, zeta, mu1, mu2 })
    }

    /// Envelope with `σ₀ = τ/2`, `M = (b − ε₀)μ₂^{−τ/2}` and
    /// `χ(s) = (c ζ(s)/ε₀)^{1/(τ−1)}`.
    pub fn derive_gains(&self, eps0: f64) -> Result<GklEnvelope> {
        if !(eps0 > 0.0 && eps0 < self.b) {
            return Err(Error::param("eps0", format!("must lie in (0, b) = (0, {}), got {eps0}", self.b)));
        }
        let sigma0 = self.tau / 2.0;
        let m = (self.b - eps0) * self.mu2.powf(-self.tau / 2.0);
        let root = (self.tau - 1.0).recip();
        let outer = KFun::PowerLaw { coefficient: (self.c / eps0).powf(root), exponent: root };
        let chi = match &self.zeta {
            // Keep the common case a single power law so evaluation stays closed-form.
            KFun::PowerLaw { coefficient, exponent } => KFun::PowerLaw {
                coefficient: (self.c * coefficient / eps0).powf(root),
                exponent: exponent * root,
            },
            zeta => outer.compose(zeta.clone()),
        };
        GklEnvelope::new(m, sigma0, self.mu1, self.mu2, chi)
    }

    /// Envelope with the default split `ε₀ = b/2`.
    pub fn default_gains(&self) -> Result<GklEnvelope> {
        self.derive_gains(self.b / 2.0)
    }

    /// Limit `ε₀ → 0⁺` of the disturbance-free settling time:
    /// `2μ₂^{τ/2} / ((2−τ)b) · V₀^{1−τ/2}`.
    pub fn settling_bound(&self, v0: f64) -> Result<f64> {
        if !(v0 >= 0.0) {
            return Err(Error::Domain(format!("initial Lyapunov value must be nonnegative, got {v0}")));
        }
        Ok(2.0 * self.mu2.powf(self.tau / 2.0) / ((2.0 - self.tau) * self.b) * v0.powf(1.0 - self.tau / 2.0))
    }
}

/// Parameters of `w_t = w_yy − k|w|^{r−1}w + f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeParams {
    /// Reaction gain.
    pub k: f64,
    /// Sublinearity exponent.
    pub r: f64,
}

impl PdeParams {
    pub fn new(k: f64, r: f64) -> Result<Self> {
        let p = Self { k, r };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::param("k", format!("must be positive, got {}", self.k)));
        }
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(Error::param("r", format!("must lie in (0, 1), got {}", self.r)));
        }
        Ok(())
    }

    /// Supremum of the admissible Young parameter, `1/(2√k)`.
    pub fn eps_sup(&self) -> f64 {
        0.5 / self.k.sqrt()
    }

    /// 90% of [`Self::eps_sup`].
    pub fn default_eps(&self) -> f64 {
        0.9 * self.eps_sup()
    }
}

/// Certificate of the sublinear parabolic PDE with `P = I`:
/// `b = 16kε/(3+r)`, `τ = (3+r)/2`, `c = 2`, `ζ = id`, `μ₁ = μ₂ = 1`,
/// valid for `0 < ε < 1/(2√k)`.
pub fn pde_certificate(params: PdeParams, eps: f64) -> Result<DissipationCert> {
    params.validate()?;
    let sup = params.eps_sup();
    if !(eps > 0.0 && eps < sup) {
        return Err(Error::param("eps", format!("must lie in (0, 1/(2*sqrt(k))) = (0, {sup}), got {eps}")));
    }
    let PdeParams { k, r } = params;
    DissipationCert::new(16.0 * k * eps / (3.0 + r), 2.0, (3.0 + r) / 2.0, KFun::identity(), 1.0, 1.0)
}

/// Envelope used throughout the workbench: certificate at the default `ε`,
/// gains at `ε₀ = b/2`.
pub fn pde_default_envelope(params: PdeParams) -> Result<GklEnvelope> {
    pde_certificate(params, params.default_eps())?.default_gains()
}

/// Settling-time ceiling `(3+r)/(2√k(1−r)) · ‖w₀‖^{(1−r)/2}`.
pub fn pde_settling_bound(params: PdeParams, w0_norm: f64) -> Result<f64> {
    params.validate()?;
    if !(w0_norm >= 0.0) {
        return Err(Error::Domain(format!("initial norm must be nonnegative, got {w0_norm}")));
    }
    let PdeParams { k, r } = params;
    Ok((3.0 + r) / (2.0 * k.sqrt() * (1.0 - r)) * w0_norm.powf((1.0 - r) / 2.0))
}
