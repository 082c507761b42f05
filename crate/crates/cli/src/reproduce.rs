use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Mutex;
use std::thread;

use ftiss_core::presets::{self, Figure};
use ftiss_core::{extinction_time, fmt_f64, TrajectoryRecord};
use serde_json::json;

use crate::simulate::REPORT_THRESHOLD;
use crate::{write_file, Failure};

#[derive(Debug, Clone)]
pub struct Target(pub Vec<Figure>);

pub fn parse_target(s: &str) -> Result<Target, String> {
    if s == "all" {
        Ok(Target(Figure::ALL.to_vec()))
    } else {
        Ok(Target(vec![s.parse()?]))
    }
}

/// Runs the named presets on up to `jobs` threads.
fn run_presets(names: Vec<&'static str>, jobs: usize) -> Result<BTreeMap<&'static str, TrajectoryRecord>, Failure> {
    let queue = Mutex::new(names);
    let results = Mutex::new(BTreeMap::new());
    let errors = Mutex::new(Vec::new());
    thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let Some(name) = queue.lock().unwrap().pop() else { break };
                let preset = presets::by_name(name).expect("figure presets exist");
                match ftiss_core::simulate(&preset.config) {
                    Ok(rec) => {
                        results.lock().unwrap().insert(name, rec);
                    }
                    Err(e) => errors.lock().unwrap().push(Failure::from(e)),
                }
            });
        }
    });
    if let Some(e) = errors.into_inner().unwrap().into_iter().next() {
        return Err(e);
    }
    Ok(results.into_inner().unwrap())
}

/// `t,preset,l2_norm,log10_l2_norm`; the log column is floored at the
/// record's extinction threshold.
fn norm_series(names: &[&str], runs: &BTreeMap<&'static str, TrajectoryRecord>) -> Vec<u8> {
    let mut out = String::from("t,preset,l2_norm,log10_l2_norm\n");
    for name in names {
        let rec = &runs[name];
        for (t, n) in rec.times.iter().zip(&rec.l2_norms) {
            let log = n.max(rec.extinction_threshold).log10();
            out.push_str(&format!("{},{name},{},{}\n", fmt_f64(*t), fmt_f64(*n), fmt_f64(log)));
        }
    }
    out.into_bytes()
}

pub fn run(target: &Target, dir: &Path, jobs: usize) -> Result<(), Failure> {
    let mut needed: Vec<&'static str> = target.0.iter().flat_map(|f| f.presets()).collect();
    needed.sort();
    needed.dedup();
    let runs = run_presets(needed, jobs)?;
    for fig in &target.0 {
        let fig_dir = dir.join(fig.id());
        let names = fig.presets();
        if fig.is_surface() {
            let mut csv = Vec::new();
            runs[names[0]].write_snapshots_csv(&mut csv).expect("in-memory write");
            write_file(&fig_dir.join("surface.csv"), &csv)?;
        } else {
            write_file(&fig_dir.join("norms.csv"), &norm_series(&names, &runs))?;
        }
        let summary: BTreeMap<&str, _> = names
            .iter()
            .map(|n| {
                let rec = &runs[n];
                let cfg = presets::by_name(n).unwrap().config;
                let entry = json!({
                    "config": cfg,
                    "extinction_threshold": REPORT_THRESHOLD,
                    "extinction_time": extinction_time(rec, REPORT_THRESHOLD),
                    "max_l2_norm": rec.l2_norms.iter().copied().fold(0.0, f64::max),
                    "final_l2_norm": rec.l2_norms.last(),
                });
                (*n, entry)
            })
            .collect();
        let mut text = serde_json::to_string_pretty(&summary).expect("plain json");
        text.push('\n');
        write_file(&fig_dir.join("summary.json"), text.as_bytes())?;
        println!("{}: wrote {}", fig.id(), fig_dir.display());
    }
    Ok(())
}
