//! End-to-end acceptance run. Prints one `[PASS]`/`[FAIL]` line per criterion
//! and exits nonzero if any failed.

use std::f64::consts::{E, FRAC_PI_2, FRAC_PI_3};
use std::process::ExitCode;
use std::time::Instant;

use ftiss_core::certificate::{pde_certificate, pde_default_envelope, pde_settling_bound, PdeParams};
use ftiss_core::field::{Field, Grid1D, DEFAULT_ORACLE_CELLS};
use ftiss_core::greens::{bvp_residual, bvp_solve, greens_eval, sector_bound_scan, ComplexSpectral};
use ftiss_core::inequality::{harness_modes, interpolation_gap, random_test_field, run_harness, HarnessConfig};
use ftiss_core::pde::{init_field, simulate, simulate_from, sublinear_exact, DisturbanceSpec, InitSpec, SimConfig};
use ftiss_core::presets::{preset_config, preset_params};
use ftiss_core::{dissipation_audit, envelope_audit, extinction_time, TrajectoryRecord};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn run(cfg: &SimConfig) -> Result<TrajectoryRecord, String> {
    simulate(cfg).map_err(|e| e.to_string())
}

fn settling_ceiling() -> Outcome {
    let oracle = init_field(&InitSpec::SqrtCosine { a1: 5.0 }, Grid1D::new(DEFAULT_ORACLE_CELLS).unwrap()).unwrap();
    let sq = oracle.l2_norm().powi(2);
    check((sq - 12.5).abs() <= 1e-6, format!("||w0||^2 = {sq}, expected 12.5"))?;
    let mut parts = Vec::new();
    for (a1, ceiling) in [(5.0, 4.0962), (50.0, 6.493)] {
        let start = Instant::now();
        let rec = run(&preset_config(a1, 0.0))?;
        let secs = start.elapsed().as_secs_f64();
        let hit = rec.times.iter().zip(&rec.l2_norms).find(|(_, &n)| n <= 1e-6).map(|(&t, _)| t);
        let bound = pde_settling_bound(preset_params(), rec.l2_norms[0]).map_err(|e| e.to_string())?;
        match hit {
            Some(t) if t <= ceiling && secs <= 60.0 => {
                parts.push(format!("A1={a1}: t={t:.3} <= {ceiling} (bound {bound:.4}, {secs:.2}s)"))
            }
            _ => return Err(format!("A1={a1}: hit {hit:?}, ceiling {ceiling}, runtime {secs:.2}s")),
        }
    }
    Ok(parts.join("; "))
}

fn monotone_decay() -> Outcome {
    let mut parts = Vec::new();
    for a1 in [5.0, 50.0] {
        let mut cfg = preset_config(a1, 0.0);
        cfg.record_every = 1;
        let rec = run(&cfg)?;
        let steps = rec.v_values.len() - 1;
        let rises = rec.v_values.windows(2).filter(|w| w[1] > w[0]).count();
        check(rises == 0, format!("A1={a1}: {rises} of {steps} steps increase V"))?;
        parts.push(format!("A1={a1}: {steps} steps nonincreasing"));
    }
    Ok(parts.join("; "))
}

fn dissipation() -> Outcome {
    let env = pde_default_envelope(preset_params()).map_err(|e| e.to_string())?;
    let rec = run(&preset_config(5.0, 0.0))?;
    let rep = dissipation_audit(&rec, &env, 1e-3).map_err(|e| e.to_string())?;
    check(rep.applicable_steps > 0, "no applicable steps".into())?;
    check(rep.pass_fraction >= 0.99, format!("pass_fraction {}", rep.pass_fraction))?;
    Ok(format!("pass_fraction {} over {} steps", rep.pass_fraction, rep.applicable_steps))
}

fn envelope() -> Outcome {
    let env = pde_default_envelope(preset_params()).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for a2 in [0.0, 20.0, 40.0] {
        let rec = run(&preset_config(5.0, a2))?;
        let ratio = envelope_audit(&rec, &env).map_err(|e| e.to_string())?;
        check(ratio <= 1.0, format!("A2={a2}: ratio {ratio}"))?;
        parts.push(format!("A2={a2}: {ratio:.4}"));
    }
    Ok(parts.join("; "))
}

fn figure_shapes() -> Outcome {
    let ext = |a1: f64| -> Result<f64, String> {
        let rec = run(&preset_config(a1, 0.0))?;
        extinction_time(&rec, 1e-6).ok_or(format!("A1={a1} never settles"))
    };
    let (t5, t50) = (ext(5.0)?, ext(50.0)?);
    check(t5 < t50, format!("extinction A1=5 at {t5}, A1=50 at {t50}"))?;
    let late_sup = |a2: f64| -> Result<(f64, f64), String> {
        let rec = run(&preset_config(5.0, a2))?;
        let peak = rec.l2_norms.iter().copied().fold(0.0, f64::max);
        let late = rec
            .times
            .iter()
            .zip(&rec.fields)
            .filter(|(&t, _)| t >= 5.0)
            .map(|(_, f)| f.linf_norm())
            .fold(0.0, f64::max);
        Ok((late, peak))
    };
    let (late20, peak20) = late_sup(20.0)?;
    let (late40, peak40) = late_sup(40.0)?;
    check(late40 > late20, format!("late sup A2=40 {late40} vs A2=20 {late20}"))?;
    check(peak20.is_finite() && peak40.is_finite() && peak20 < 1e3 && peak40 < 1e3, "A2 runs unbounded".into())?;
    Ok(format!("extinction {t5:.3} < {t50:.3}; late sup {late40:.3} > {late20:.3}; peaks {peak20:.3}, {peak40:.3}"))
}

fn interpolation() -> Outcome {
    let cfg = HarnessConfig::default();
    check(cfg.seeds == 1000 && cfg.n_cells == 2000, "harness defaults drifted".into())?;
    let s = run_harness(&cfg).map_err(|e| e.to_string())?;
    let (lv, cv) = (s.lemma_violations(), s.corollary_violations());
    check(lv == 0 && cv == 0, format!("{lv} lemma and {cv} corollary violations"))?;
    for row in s.worst_lemma(10) {
        let rel = |n: usize| -> Result<f64, String> {
            let v = random_test_field(row.seed, harness_modes(row.seed), Grid1D::new(n).unwrap());
            let g = interpolation_gap(&v, row.p, row.q).map_err(|e| e.to_string())?;
            Ok(g.margin / g.rhs)
        };
        let (a, b, c) = (rel(1000)?, rel(2000)?, rel(4000)?);
        let viol = |m: f64| (-m).max(0.0);
        check(
            viol(c) <= viol(b) + 1e-12 && (c - b).abs() <= (b - a).abs() + 1e-12,
            format!("seed {} p={} q={}: relative margins {a}, {b}, {c}", row.seed, row.p, row.q),
        )?;
    }
    Ok(format!(
        "{} lemma + {} corollary rows, 0 violations; sharpness {:.3e} / {:.3e}",
        s.lemma.len(),
        s.corollary.len(),
        s.lemma_sharpness(),
        s.corollary_sharpness()
    ))
}

fn greens() -> Outcome {
    let grid = Grid1D::new(2000).unwrap();
    let one = ComplexSpectral::real(1.0).unwrap();
    let g = Field::from_fn(grid, |_| 1.0);
    let u = bvp_solve(one, &g).map_err(|e| e.to_string())?;
    let err = grid
        .nodes()
        .zip(&u.values)
        .map(|(x, v)| (v - Complex64::new(1.0 - (x.exp() + (2.0 - x).exp()) / (1.0 + E * E), 0.0)).norm())
        .fold(0.0, f64::max);
    check(err <= 1e-4, format!("closed-form error {err}"))?;
    let res = bvp_residual(one, &u, &g);
    check(res <= 1e-3, format!("residual {res}"))?;

    let pts: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    for (rho, theta) in [(0.5, 0.0), (2.0, 0.9), (15.0, -1.1), (60.0, 0.3)] {
        let lam = ComplexSpectral::new(rho, theta).unwrap();
        for &y in &pts {
            check(greens_eval(lam, 0.0, y).norm() <= 1e-14, format!("G(0,{y}) nonzero at {lam:?}"))?;
            for &x in &pts {
                let d = (greens_eval(lam, x, y) - greens_eval(lam, y, x)).norm();
                check(d <= 1e-14, format!("asymmetry {d} at {lam:?}"))?;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let (a, b): (f64, f64) = (rng.random_range(-5.0..5.0), rng.random_range(-1.5..1.5));
        let z = Complex64::new(a, b);
        check(z.sinh().norm() <= (2.0 * a).cosh().sqrt(), format!("sinh estimate fails at {z}"))?;
        check(z.cosh().norm() >= a.cosh() * b.cos(), format!("cosh estimate fails at {z}"))?;
    }

    let scan = |n: usize| -> Result<f64, String> {
        let grid = Grid1D::new(n).unwrap();
        let suite: Vec<Field> = (0..8).map(|s| random_test_field(s, 1 + s as usize, grid)).collect();
        Ok(sector_bound_scan(FRAC_PI_3, &[0.1, 1.0, 10.0, 100.0], 5, &suite).map_err(|e| e.to_string())?.m_hat)
    };
    let (m1, m2) = (scan(1000)?, scan(2000)?);
    let drift = (m2 - m1).abs() / m2;
    check(drift <= 0.01, format!("m_hat {m1} -> {m2}"))?;
    Ok(format!("node error {err:.2e}, residual {res:.2e}, m_hat {m2:.5} (drift {drift:.1e})"))
}

fn structure() -> Outcome {
    let params = PdeParams { k: 1.0, r: 0.5 };
    let mut worst = 0.0_f64;
    for w0 in [1.0_f64, -0.5, 3.0] {
        let dt = 0.5 * w0.abs().sqrt() / 0.5;
        let h = dt / 20_000.0;
        let mut w = w0;
        for _ in 0..20_000 {
            let f = |w: f64| if w == 0.0 { 0.0 } else { -w.abs().sqrt().copysign(w) };
            let (k1, k2) = (f(w), f(w + 0.5 * h * f(w)));
            let k3 = f(w + 0.5 * h * k2);
            let k4 = f(w + h * k3);
            w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        worst = worst.max((sublinear_exact(w0, dt, params) - w).abs());
    }
    check(worst <= 1e-6, format!("reaction substep error {worst}"))?;

    let mut full = preset_config(5.0, 20.0);
    full.t_end = 1.7;
    let straight = run(&full)?;
    let mut first = full.clone();
    first.t_end = 1.0;
    let head = run(&first)?;
    let tail = simulate_from(&full, head.last_field().unwrap().clone(), *head.times.last().unwrap())
        .map_err(|e| e.to_string())?;
    let cocycle = straight
        .last_field()
        .unwrap()
        .values()
        .iter()
        .zip(tail.last_field().unwrap().values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    check(cocycle <= 1e-10, format!("cocycle mismatch {cocycle}"))?;

    let grid = Grid1D::new(200).unwrap();
    let mode = Field::from_fn(grid, |y| (FRAC_PI_2 * y).sin());
    let heat = SimConfig::new(
        PdeParams { k: 0.0, r: 0.6 },
        InitSpec::Custom { values: mode.into_values() },
        DisturbanceSpec::Zero,
        0.5,
    );
    let rec = run(&heat)?;
    let expected = (-FRAC_PI_2.powi(2) * 0.5).exp();
    let decay = rec.l2_norms.last().unwrap() / rec.l2_norms[0];
    let decay_err = (decay - expected).abs() / expected;
    check(decay_err <= 0.01, format!("eigen-decay {decay} vs {expected}"))?;

    let ext = |n: usize, dt: f64| -> Result<f64, String> {
        let mut cfg = preset_config(5.0, 0.0);
        cfg.n_cells = n;
        cfg.dt = dt;
        cfg.record_every = 1;
        extinction_time(&run(&cfg)?, 1e-6).ok_or("no extinction".to_string())
    };
    let (coarse, fine) = (ext(200, 1e-3)?, ext(400, 5e-4)?);
    let refine = (coarse - fine).abs() / fine;
    check(refine <= 0.02, format!("extinction {coarse} vs {fine}"))?;
    Ok(format!(
        "substep {worst:.1e}, cocycle {cocycle:.1e}, eigen-decay {decay_err:.1e}, refinement {refine:.1e}"
    ))
}

/// `(k, r, ε, b, τ, σ₀, M, [χ(0.5), χ(1), χ(7.25)])` evaluated by an external
/// script with `ε₀ = b/2`.
const FROZEN: [(f64, f64, f64, f64, f64, f64, f64, [f64; 3]); 4] = [
    (2.0, 0.6, 0.31819805153394637, 2.8284271247461903, 1.8, 0.9, 1.4142135623730951, [0.6484197773255048, 1.5422108254079407, 18.34705046416463]),
    (1.0, 0.3, 0.2, 0.9696969696969697, 1.65, 0.825, 0.48484848484848486, [3.045671161372337, 8.847204813970885, 186.38159095244774]),
    (5.0, 0.9, 0.1, 2.051282051282051, 1.95, 0.975, 1.0256410256410255, [0.9737016619159251, 2.0197591808834847, 16.252439019033474]),
    (0.5, 0.1, 0.5, 1.2903225806451613, 1.55, 0.775, 0.6451612903225806, [2.218490805025905, 7.823208371999684, 286.8374275259943]),
];

fn certificate() -> Outcome {
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let mut worst = 0.0_f64;
    for (k, r, eps, b, tau, sigma0, m, chi) in FROZEN {
        let params = PdeParams::new(k, r).map_err(|e| e.to_string())?;
        let cert = pde_certificate(params, eps).map_err(|e| e.to_string())?;
        let env = cert.derive_gains(cert.b / 2.0).map_err(|e| e.to_string())?;
        let mut errs = vec![rel(cert.b, b), rel(cert.tau, tau), rel(env.sigma0, sigma0), rel(env.m, m)];
        for (s, want) in [0.5, 1.0, 7.25].into_iter().zip(chi) {
            errs.push(rel(env.chi.eval(s).map_err(|e| e.to_string())?, want));
        }
        let e = errs.into_iter().fold(0.0, f64::max);
        check(e <= 1e-12, format!("k={k} r={r}: relative error {e}"))?;
        worst = worst.max(e);
    }
    let params = preset_params();
    let w0 = 12.5_f64.sqrt();
    let limit = pde_settling_bound(params, w0).map_err(|e| e.to_string())?;
    for delta in [1e-2, 1e-3, 1e-4] {
        let cert = pde_certificate(params, (1.0 - delta) * params.eps_sup()).map_err(|e| e.to_string())?;
        let bound = cert.settling_bound(w0 * w0).map_err(|e| e.to_string())?;
        check(rel(bound, limit) <= 10.0 * delta, format!("delta={delta}: {bound} vs {limit}"))?;
    }
    Ok(format!("max relative error {worst:.1e}; settling limit {limit:.6}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 settling-bound ceiling", settling_ceiling),
        ("2 monotone decay", monotone_decay),
        ("3 dissipation audit", dissipation),
        ("4 FTISS envelope", envelope),
        ("5 figure shapes", figure_shapes),
        ("6 interpolation oracles", interpolation),
        ("7 Green's function", greens),
        ("8 structure oracles", structure),
        ("9 certificate formulas", certificate),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
