use std::fmt::Write as _;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Method, MissionConfig};
use super::episode::run_episode;
use super::MissionError;
use crate::numeric::mean_std;

/// Outcome of one benchmark episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub config: String,
    pub method: Method,
    pub seed: u64,
    pub distance: f64,
    pub steps: usize,
    pub complete: bool,
    pub revisits: usize,
}

/// Mean and sample standard deviation per (config, method).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub config: String,
    pub method: Method,
    pub runs: usize,
    pub distance_mean: f64,
    pub distance_std: f64,
    pub steps_mean: f64,
    pub steps_std: f64,
    pub completed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    /// Sorted by (config, method, seed).
    pub episodes: Vec<EpisodeResult>,
    /// Sorted by (config, method), one per listed method.
    pub rows: Vec<BenchRow>,
}

/// Label identifying a config independent of its repetition seed.
pub fn config_label(cfg: &MissionConfig) -> String {
    match &cfg.map.file {
        Some(f) => format!("file:{f}"),
        None => format!(
            "{}-{}x{}-seed{}",
            cfg.map.kind.as_str(),
            cfg.map.width,
            cfg.map.height,
            cfg.map.seed
        ),
    }
}

/// Repetition `r` shifts both the map seed and the rng seed by `r`, the same
/// for every method, so methods are compared on paired maps.
pub fn benchmark(
    configs: &[MissionConfig],
    methods: &[Method],
    repetitions: usize,
) -> Result<BenchReport, MissionError> {
    let mut unique_methods = methods.to_vec();
    unique_methods.sort_by_key(|m| m.as_str());
    unique_methods.dedup();
    let mut jobs = Vec::new();
    for cfg in configs {
        for r in 0..repetitions as u64 {
            for &method in &unique_methods {
                let mut c = cfg.clone();
                c.method = method;
                c.map.seed = cfg.map.seed.wrapping_add(r);
                c.rng_seed = cfg.rng_seed.wrapping_add(r);
                jobs.push((config_label(cfg), c));
            }
        }
    }
    let run = |(label, c): &(String, MissionConfig)| -> Result<EpisodeResult, MissionError> {
        let log = run_episode(c)?;
        let s = log.summary().expect("finished logs carry a summary");
        Ok(EpisodeResult {
            config: label.clone(),
            method: c.method,
            seed: c.map.seed,
            distance: s.distance,
            steps: s.steps,
            complete: s.complete,
            revisits: s.revisits,
        })
    };
    #[cfg(feature = "parallel")]
    let results: Vec<Result<EpisodeResult, MissionError>> = jobs.par_iter().map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<EpisodeResult, MissionError>> = jobs.iter().map(run).collect();
    let mut episodes = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    episodes.sort_by(|a, b| {
        (&a.config, a.method.as_str(), a.seed).cmp(&(&b.config, b.method.as_str(), b.seed))
    });
    episodes.dedup();

    let mut labels: Vec<String> = configs.iter().map(config_label).collect();
    labels.sort();
    labels.dedup();
    let mut listed = methods.to_vec();
    listed.sort_by_key(|m| m.as_str());
    let mut rows = Vec::new();
    for label in &labels {
        for &method in &listed {
            let mine: Vec<&EpisodeResult> = episodes
                .iter()
                .filter(|e| &e.config == label && e.method == method)
                .collect();
            let (distance_mean, distance_std) =
                mean_std(&mine.iter().map(|e| e.distance).collect::<Vec<_>>());
            let (steps_mean, steps_std) =
                mean_std(&mine.iter().map(|e| e.steps as f64).collect::<Vec<_>>());
            rows.push(BenchRow {
                config: label.clone(),
                method,
                runs: mine.len(),
                distance_mean,
                distance_std,
                steps_mean,
                steps_std,
                completed: mine.iter().filter(|e| e.complete).count(),
            });
        }
    }
    Ok(BenchReport { episodes, rows })
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "config,method,runs,distance_mean,distance_std,steps_mean,steps_std,completed\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:.3},{:.3},{:.3},{:.3},{}",
                r.config,
                r.method.as_str(),
                r.runs,
                r.distance_mean,
                r.distance_std,
                r.steps_mean,
                r.steps_std,
                r.completed
            );
        }
        out
    }

    /// Human-readable `mean (± std)` lines.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<32} {:<7} distance {:.1} (± {:.1})  steps {:.1} (± {:.1})  completed {}/{}",
                r.config,
                r.method.as_str(),
                r.distance_mean,
                r.distance_std,
                r.steps_mean,
                r.steps_std,
                r.completed,
                r.runs
            );
        }
        out
    }
}
