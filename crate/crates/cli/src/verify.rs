use std::f64::consts::{E, FRAC_PI_3};
use std::path::PathBuf;

use clap::Args;
use ftiss_core::certificate::{pde_certificate, pde_settling_bound, PdeParams};
use ftiss_core::field::{Field, Grid1D, DEFAULT_ORACLE_CELLS};
use ftiss_core::fmt_f64;
use ftiss_core::greens::{bvp_residual, bvp_solve, sector_bound_scan, ComplexSpectral};
use ftiss_core::inequality::{random_test_field, run_harness, HarnessConfig, DEFAULT_SLACK};

use crate::{out_dir, write_file, Failure, VerifyKind};

#[derive(Args)]
pub struct VerifyArgs {
    kind: VerifyKind,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of random fields (inequality).
    #[arg(long, default_value_t = 1000)]
    seeds: u64,
    /// Grid size for quadrature (inequality, greens).
    #[arg(long, default_value_t = DEFAULT_ORACLE_CELLS)]
    n_cells: usize,
    /// Relative slack on the inequality right-hand side.
    #[arg(long, default_value_t = DEFAULT_SLACK)]
    slack: f64,
    /// Moduli |λ| scanned (greens).
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 1.0, 10.0, 100.0])]
    rho: Vec<f64>,
    /// Sector half-angle (greens).
    #[arg(long, default_value_t = FRAC_PI_3)]
    theta0: f64,
    /// Angles per modulus (greens).
    #[arg(long, default_value_t = 5)]
    n_theta: usize,
    /// Right-hand sides per (ρ, θ) (greens).
    #[arg(long, default_value_t = 8)]
    n_sources: u64,
    /// Reaction gain (certificate).
    #[arg(long, default_value_t = 2.0)]
    k: f64,
    /// Sublinearity exponent (certificate).
    #[arg(long, default_value_t = 0.6)]
    r: f64,
    /// Young parameter; defaults to 0.9/(2√k) (certificate).
    #[arg(long)]
    eps: Option<f64>,
    /// Initial norms for the settling table (certificate).
    #[arg(long, value_delimiter = ',', default_values_t = vec![12.5_f64.sqrt(), 1250_f64.sqrt()])]
    w0: Vec<f64>,
}

pub fn run(args: &VerifyArgs) -> Result<(), Failure> {
    match args.kind {
        VerifyKind::Inequality => inequality(args),
        VerifyKind::Greens => greens(args),
        VerifyKind::Certificate => certificate(args),
    }
}

fn inequality(args: &VerifyArgs) -> Result<(), Failure> {
    let cfg = HarnessConfig { seeds: args.seeds, n_cells: args.n_cells, slack: args.slack, ..Default::default() };
    let summary = run_harness(&cfg)?;
    let dir = out_dir(args.out.clone());
    let mut lemma = Vec::new();
    summary.write_lemma_csv(&mut lemma).expect("in-memory write");
    write_file(&dir.join("lemma_margins.csv"), &lemma)?;
    let mut coro = Vec::new();
    summary.write_corollary_csv(&mut coro).expect("in-memory write");
    write_file(&dir.join("corollary_margins.csv"), &coro)?;
    let (lv, cv) = (summary.lemma_violations(), summary.corollary_violations());
    println!("lemma_rows = {}", summary.lemma.len());
    println!("lemma_violations = {lv}");
    println!("lemma_sharpness = {}", fmt_f64(summary.lemma_sharpness()));
    println!("corollary_rows = {}", summary.corollary.len());
    println!("corollary_violations = {cv}");
    println!("corollary_sharpness = {}", fmt_f64(summary.corollary_sharpness()));
    println!("wrote {}", dir.display());
    if lv + cv > 0 {
        return Err(Failure::Property(format!("{lv} lemma and {cv} corollary violations beyond slack {}", args.slack)));
    }
    Ok(())
}

fn greens(args: &VerifyArgs) -> Result<(), Failure> {
    let grid = Grid1D::new(args.n_cells)?;
    let one = ComplexSpectral::real(1.0)?;
    let g = Field::from_fn(grid, |_| 1.0);
    let u = bvp_solve(one, &g)?;
    let node_error = grid
        .nodes()
        .zip(&u.values)
        .map(|(x, v)| (v.re - (1.0 - (x.exp() + (2.0 - x).exp()) / (1.0 + E * E))).hypot(v.im))
        .fold(0.0, f64::max);
    let residual = bvp_residual(one, &u, &g);

    let suite: Vec<Field> = (0..args.n_sources).map(|s| random_test_field(s, 1 + s as usize % 16, grid)).collect();
    let scan = sector_bound_scan(args.theta0, &args.rho, args.n_theta, &suite)?;
    let dir = out_dir(args.out.clone());
    let mut csv = Vec::new();
    scan.write_csv(&mut csv).expect("in-memory write");
    write_file(&dir.join("greens_scan.csv"), &csv)?;

    println!("closed_form_node_error = {}", fmt_f64(node_error));
    println!("closed_form_residual = {}", fmt_f64(residual));
    for &rho in &args.rho {
        println!("m_hat[rho={rho}] = {}", fmt_f64(scan.m_hat_at(rho)));
    }
    println!("m_hat = {}", fmt_f64(scan.m_hat));
    println!("wrote {}", dir.display());
    let mut failed = Vec::new();
    if !(node_error <= 1e-4) {
        failed.push(format!("closed-form node error {node_error}"));
    }
    if !(residual <= 1e-3) {
        failed.push(format!("residual {residual}"));
    }
    if !scan.m_hat.is_finite() {
        failed.push("m_hat is not finite".to_string());
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Property(failed.join("; ")))
    }
}

fn certificate(args: &VerifyArgs) -> Result<(), Failure> {
    let params = PdeParams::new(args.k, args.r)?;
    let eps = args.eps.unwrap_or(params.default_eps());
    let cert = pde_certificate(params, eps)?;
    let env = cert.default_gains()?;
    println!("k = {}", fmt_f64(params.k));
    println!("r = {}", fmt_f64(params.r));
    println!("eps = {}", fmt_f64(eps));
    println!("eps0 = {}", fmt_f64(cert.b / 2.0));
    println!("b = {}", fmt_f64(cert.b));
    println!("c = {}", fmt_f64(cert.c));
    println!("tau = {}", fmt_f64(cert.tau));
    println!("sigma0 = {}", fmt_f64(env.sigma0));
    println!("M = {}", fmt_f64(env.m));
    for s in [0.5, 1.0, 10.0] {
        println!("chi({s}) = {}", fmt_f64(env.chi.eval(s)?));
    }
    println!("w0_norm,settling_certificate,settling_limit");
    let mut failed = Vec::new();
    for &w0 in &args.w0 {
        let abstract_bound = cert.settling_bound(w0 * w0)?;
        let limit = pde_settling_bound(params, w0)?;
        println!("{},{},{}", fmt_f64(w0), fmt_f64(abstract_bound), fmt_f64(limit));
        if abstract_bound < limit * (1.0 - 1e-12) {
            failed.push(format!("certificate bound {abstract_bound} below limit {limit} at ||w0|| = {w0}"));
        }
    }
    if !(env.sigma0 > 0.0 && env.sigma0 < 1.0) {
        failed.push(format!("sigma0 = {} outside (0, 1)", env.sigma0));
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Property(failed.join("; ")))
    }
}
