use std::fs;
use std::path::Path;

use ftiss_core::certificate::{pde_default_envelope, pde_settling_bound};
use ftiss_core::pde::{DisturbanceSpec, InitSpec};
use ftiss_core::{dissipation_audit, envelope_audit, extinction_time, SimConfig, TrajectoryRecord};
use serde_json::{json, Value};

use crate::{write_file, Failure};

pub const REPORT_THRESHOLD: f64 = 1e-6;
pub const AUDIT_SLACK: f64 = ftiss_core::analysis::DEFAULT_AUDIT_SLACK;

pub fn describe(cfg: &SimConfig) -> String {
    let init = match &cfg.init {
        InitSpec::SqrtCosine { a1 } => format!("A1={a1}"),
        InitSpec::Custom { values } => format!("custom[{}]", values.len()),
    };
    let dist = match &cfg.dist {
        DisturbanceSpec::TravelingSine { a2 } => format!("A2={a2}"),
        DisturbanceSpec::Zero => "A2=0".to_string(),
        DisturbanceSpec::Custom(_) => "custom".to_string(),
    };
    format!("k={} r={} {init} {dist} t_end={}", cfg.params.k, cfg.params.r, cfg.t_end)
}

/// Parses and validates a config document; `origin` prefixes diagnostics.
pub fn parse_config(text: &str, origin: &str) -> Result<SimConfig, Failure> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: SimConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.inner();
        let at = if inner.line() == 0 { String::new() } else { format!(":{}:{}", inner.line(), inner.column()) };
        if path == "." {
            Failure::Input(format!("{origin}{at}: {inner}"))
        } else {
            Failure::Input(format!("{origin}{at}: field `{path}`: {inner}"))
        }
    })?;
    let issues = cfg.issues();
    if !issues.is_empty() {
        let lines: Vec<String> = issues.iter().map(|i| format!("{origin}: field `{}`: {}", i.field, i.reason)).collect();
        return Err(Failure::Input(format!("invalid config\n{}", lines.join("\n"))));
    }
    Ok(cfg)
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

/// Audit summary written next to the CSV output.
pub fn audit_json(cfg: &SimConfig, rec: &TrajectoryRecord, threshold: f64) -> Value {
    let ext = extinction_time(rec, threshold);
    let mut out = json!({
        "config": cfg,
        "recorded_steps": rec.len(),
        "initial_l2_norm": num(rec.l2_norms[0]),
        "final_l2_norm": num(*rec.l2_norms.last().unwrap()),
        "dist_sup_norm": num(rec.dist_sup_norm),
        "dist_analytic_bound": rec.dist_analytic_bound,
        "extinction_threshold": threshold,
        "extinction_time": ext,
    });
    // The certificate needs a positive reaction gain.
    if let Ok(env) = pde_default_envelope(cfg.params) {
        let settling = pde_settling_bound(cfg.params, rec.l2_norms[0]).ok();
        out["settling_bound"] = json!(settling);
        out["envelope"] = json!({ "m": env.m, "sigma0": env.sigma0, "mu1": env.mu1, "mu2": env.mu2, "chi": env.chi });
        if let Ok(rep) = dissipation_audit(rec, &env, AUDIT_SLACK) {
            out["dissipation"] = rep.to_json();
        }
        if let Ok(ratio) = envelope_audit(rec, &env) {
            out["envelope_ratio"] = num(ratio);
        }
    }
    out
}

pub fn write_outputs(dir: &Path, cfg: &SimConfig, rec: &TrajectoryRecord, threshold: f64) -> Result<Value, Failure> {
    let mut traj = Vec::new();
    rec.write_trajectory_csv(&mut traj).expect("in-memory write");
    write_file(&dir.join("trajectory.csv"), &traj)?;
    let mut snaps = Vec::new();
    rec.write_snapshots_csv(&mut snaps).expect("in-memory write");
    write_file(&dir.join("snapshots.csv"), &snaps)?;
    let audit = audit_json(cfg, rec, threshold);
    let mut text = serde_json::to_string_pretty(&audit).expect("plain json");
    text.push('\n');
    write_file(&dir.join("audit.json"), text.as_bytes())?;
    Ok(audit)
}

pub fn run(path: &Path, dir: &Path, threshold: f64) -> Result<(), Failure> {
    if !(threshold > 0.0) {
        return Err(Failure::Input(format!("--threshold must be positive, got {threshold}")));
    }
    let origin = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read config {origin}: {e}")))?;
    let cfg = parse_config(&text, &origin)?;
    let rec = ftiss_core::simulate(&cfg)?;
    let audit = write_outputs(dir, &cfg, &rec, threshold)?;
    println!("{}", describe(&cfg));
    match audit["extinction_time"].as_f64() {
        Some(t) => println!("extinction (||w|| <= {threshold:e}) at t = {}", ftiss_core::fmt_f64(t)),
        None => println!("no extinction (||w|| <= {threshold:e}) within t_end"),
    }
    if let Some(ratio) = audit["envelope_ratio"].as_f64() {
        println!("envelope ratio = {}", ftiss_core::fmt_f64(ratio));
    }
    println!("wrote {}", dir.display());
    Ok(())
}
