//! Green's function of the two-point problem
//!
//! ```text
//! λ²u − u″ = g on (0, 1),   u(0) = 0,   u′(1) = 0,
//! ```
//!
//! for `λ = ρe^{iθ}` with `|θ| < π/2`, and an empirical scan of the bound
//! `|λ²|·‖u‖ ≤ M·‖g‖` over a sector of such `λ`.
//!
//! The scan measures the solution operator `g ↦ u = (λ² − A)⁻¹g` with
//! `A = d²/dy²`; the reported ratio is therefore `|λ²|·‖R(λ²:A)g‖/‖g‖`, the
//! resolvent evaluated at `λ²`, not at `λ`.

use std::f64::consts::FRAC_PI_2;
use std::f64::consts::FRAC_PI_4;
use std::io::{self, Write};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, Grid1D};
use crate::fmt_f64;

/// Above this modulus `sinh/cosh` quotients switch to the rescaled form.
const RESCALE_RHO: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexSpectral {
    pub rho: f64,
    pub theta: f64,
}

impl ComplexSpectral {
    pub fn new(rho: f64, theta: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::param("rho", format!("must be positive, got {rho}")));
        }
        if !(theta.abs() < FRAC_PI_2) {
            return Err(Error::param("theta", format!("must lie in (-pi/2, pi/2), got {theta}")));
        }
        Ok(Self { rho, theta })
    }

    pub fn real(rho: f64) -> Result<Self> {
        Self::new(rho, 0.0)
    }

    pub fn lambda(&self) -> Complex64 {
        Complex64::from_polar(self.rho, self.theta)
    }
}

/// `sinh(λa)/cosh(λ)` for `a ∈ [−1, 1]`, `Re λ > 0`.
///
/// For large `|λ|` both are rescaled by `e^{−λ}`, leaving only exponentials
/// with nonpositive real part: `(e^{λ(a−1)} − e^{−λ(a+1)}) / (1 + e^{−2λ})`.
fn sinh_over_cosh(lam: Complex64, a: f64) -> Complex64 {
    if lam.norm() > RESCALE_RHO {
        ((lam * (a - 1.0)).exp() - (-lam * (a + 1.0)).exp()) / (1.0 + (-2.0 * lam).exp())
    } else {
        (lam * a).sinh() / lam.cosh()
    }
}

/// `G(x, y) = [sinh(λ(x+y−1)) + sinh(λ(1−|x−y|))] / (2λ cosh λ)`.
pub fn greens_eval(lam: ComplexSpectral, x: f64, y: f64) -> Complex64 {
    let l = lam.lambda();
    (sinh_over_cosh(l, x + y - 1.0) + sinh_over_cosh(l, 1.0 - (x - y).abs())) / (2.0 * l)
}

/// Complex node samples on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub grid: Grid1D,
    pub values: Vec<Complex64>,
}

impl ComplexField {
    pub fn l2_norm(&self) -> f64 {
        self.grid.integrate(self.values.iter().map(|v| v.norm_sqr())).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

/// `u(x_i) = ∫₀¹ G(x_i, y) g(y) dy` by the trapezoid rule.
///
/// The kernel has a kink at `y = x_i`; because `x_i` is itself a node, the
/// rule applied on `[0, x_i]` and `[x_i, 1]` separately sums to the plain
/// composite rule, which is what is computed. Kernel values only depend on
/// `x + y − 1` and `1 − |x − y|`, both multiples of `h` in `[−1, 1]`, so they
/// are tabulated once.
pub fn bvp_solve(lam: ComplexSpectral, g: &Field) -> Result<ComplexField> {
    let grid = g.grid();
    let n = grid.n_cells();
    if n < 100 {
        return Err(Error::Precondition(format!("bvp_solve needs at least 100 cells, grid has {n}")));
    }
    let l = lam.lambda();
    let h = grid.h();
    let scale = (2.0 * l).inv();
    // table[j] = sinh(λ(−1 + jh))/cosh(λ) / (2λ), j = 0..=2n
    let table: Vec<Complex64> = (0..=2 * n).map(|j| sinh_over_cosh(l, -1.0 + j as f64 * h) * scale).collect();
    let wg: Vec<f64> = g.values().iter().enumerate().map(|(j, v)| grid.trapezoid_weight(j) * v).collect();
    let values = (0..=n)
        .map(|i| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &w) in wg.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                // x+y−1 = −1 + (i+j)h;  1 − |x−y| = −1 + (2n − |i−j|)h
                let k = table[i + j] + table[2 * n - i.abs_diff(j)];
                acc += k * w;
            }
            acc
        })
        .collect();
    Ok(ComplexField { grid, values })
}

/// Relative `L²` residual of `λ²u − u″ = g` over interior nodes, with `u″`
/// by second differences.
pub fn bvp_residual(lam: ComplexSpectral, u: &ComplexField, g: &Field) -> f64 {
    let n = u.grid.n_cells();
    let h2 = u.grid.h().powi(2);
    let l2 = lam.lambda().powi(2);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 1..n {
        let upp = (u.values[i + 1] - 2.0 * u.values[i] + u.values[i - 1]) / h2;
        let r = l2 * u.values[i] - upp - g.values()[i];
        num += r.norm_sqr();
        den += g.values()[i].powi(2);
    }
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub rho: f64,
    pub theta: f64,
    pub g_id: usize,
    /// `|λ²|·‖u‖/‖g‖` (0 for `g ≡ 0`).
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub theta0: f64,
    pub m_hat: f64,
    pub rows: Vec<ScanRow>,
}

impl ScanResult {
    /// Largest ratio among rows with `ρ ≤ rho_max`.
    pub fn m_hat_up_to(&self, rho_max: f64) -> f64 {
        self.rows.iter().filter(|r| r.rho <= rho_max).map(|r| r.ratio).fold(0.0, f64::max)
    }

    /// Largest ratio among rows with exactly this `ρ`.
    pub fn m_hat_at(&self, rho: f64) -> f64 {
        self.rows.iter().filter(|r| r.rho == rho).map(|r| r.ratio).fold(0.0, f64::max)
    }

    /// `rho,theta,g_id,ratio`, preceded by a comment line naming the measured
    /// quantity.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(
            out,
            "# ratio = |lambda^2| * ||u||_L2 / ||g||_L2 with lambda^2 u - u'' = g, lambda = rho*exp(i*theta); \
             resolvent argument is lambda^2; sampled |theta| < pi/2 only, wider sector |arg| < 2*theta0 unverified"
        )?;
        writeln!(out, "rho,theta,g_id,ratio")?;
        for r in &self.rows {
            writeln!(out, "{},{},{},{}", fmt_f64(r.rho), fmt_f64(r.theta), r.g_id, fmt_f64(r.ratio))?;
        }
        Ok(())
    }
}

/// `n` angles evenly spread over `[−0.9θ₀, 0.9θ₀]` (just `0` when `n = 1`).
pub fn theta_samples(theta0: f64, n: usize) -> Vec<f64> {
    let top = 0.9 * theta0;
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|j| -top + 2.0 * top * j as f64 / (n - 1) as f64).collect(),
    }
}

/// Estimates `M` in `|λ²|·‖(λ² − A)⁻¹g‖ ≤ M‖g‖` over `ρ ∈ rho_grid` and
/// `theta_samples` angles inside `|θ| < θ₀`.
pub fn sector_bound_scan(theta0: f64, rho_grid: &[f64], n_theta: usize, g_suite: &[Field]) -> Result<ScanResult> {
    if !(theta0 > FRAC_PI_4 && theta0 < FRAC_PI_2) {
        return Err(Error::param("theta0", format!("must lie in (pi/4, pi/2), got {theta0}")));
    }
    if g_suite.is_empty() {
        return Err(Error::param("g_suite", "must contain at least one field"));
    }
    if rho_grid.is_empty() || n_theta == 0 {
        return Err(Error::param("rho_grid", "scan needs at least one rho and one theta"));
    }
    let g_norms: Vec<f64> = g_suite.iter().map(Field::l2_norm).collect();
    let mut rows = Vec::new();
    for &rho in rho_grid {
        for theta in theta_samples(theta0, n_theta) {
            let lam = ComplexSpectral::new(rho, theta)?;
            for (g_id, (g, &gn)) in g_suite.iter().zip(&g_norms).enumerate() {
                let ratio = if gn == 0.0 { 0.0 } else { rho * rho * bvp_solve(lam, g)?.l2_norm() / gn };
                rows.push(ScanRow { rho, theta, g_id, ratio });
            }
        }
    }
    let m_hat = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(ScanResult { theta0, m_hat, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_examples() {
        let lam = ComplexSpectral::real(1.0).unwrap();
        assert!((greens_eval(lam, 0.5, 0.5).re - 0.3807970779778824).abs() < 1e-15);
        let lam = ComplexSpectral::new(3.0, 0.7).unwrap();
        for y in [0.0, 0.2, 0.77, 1.0] {
            assert!(greens_eval(lam, 0.0, y).norm() <= 1e-14);
            let (a, b) = (greens_eval(lam, 0.3, y), greens_eval(lam, y, 0.3));
            assert!((a - b).norm() <= 1e-14);
        }
    }

    #[test]
    fn rescaled_quotient_agrees_with_direct_form() {
        let lam = Complex64::from_polar(29.0, 0.4);
        for a in [-1.0, -0.3, 0.0, 0.5, 1.0] {
            let direct = (lam * a).sinh() / lam.cosh();
            let scaled = ((lam * (a - 1.0)).exp() - (-lam * (a + 1.0)).exp()) / (1.0 + (-2.0 * lam).exp());
            assert!((direct - scaled).norm() <= 1e-12 * (1.0 + direct.norm()));
        }
        // Beyond the overflow point of cosh.
        let big = ComplexSpectral::new(800.0, 0.2).unwrap();
        assert!(greens_eval(big, 0.5, 0.5).is_finite());
    }

    #[test]
    fn zero_source_gives_zero_solution() {
        let g = Field::zeros(Grid1D::new(100).unwrap());
        let u = bvp_solve(ComplexSpectral::real(2.0).unwrap(), &g).unwrap();
        assert!(u.values.iter().all(|v| *v == Complex64::new(0.0, 0.0)));
        assert!(bvp_solve(ComplexSpectral::real(2.0).unwrap(), &Field::zeros(Grid1D::new(50).unwrap())).is_err());
    }

    #[test]
    fn scan_rejects_bad_inputs() {
        let g = vec![Field::zeros(Grid1D::new(100).unwrap())];
        assert!(sector_bound_scan(1.0, &[1.0], 3, &[]).is_err());
        assert!(sector_bound_scan(0.5, &[1.0], 3, &g).is_err());
        let res = sector_bound_scan(1.0, &[1.0], 3, &g).unwrap();
        assert!(res.rows.iter().all(|r| r.ratio == 0.0));
    }

    #[test]
    fn theta_grid_matches_requested_layout() {
        let th = theta_samples(std::f64::consts::FRAC_PI_3, 3);
        assert!((th[0] + 0.9 * std::f64::consts::FRAC_PI_3).abs() < 1e-15);
        assert_eq!(th[1], 0.0);
        assert_eq!(theta_samples(1.0, 1), vec![0.0]);
    }
}
