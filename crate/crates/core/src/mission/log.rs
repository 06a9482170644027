use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::geometry::Point;
use crate::graph::NodeId;

/// One decision step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    /// Pose after the move.
    pub pose: Point,
    pub from: NodeId,
    pub waypoint: NodeId,
    /// Guided waypoint, absent without guidance.
    pub guided: Option<Point>,
    /// Unclamped deviation from the guided waypoint.
    pub deviation: Option<f64>,
    pub r_dev: Option<f64>,
    pub reward: f64,
    pub revealed: usize,
    pub communities: usize,
    pub retained: usize,
    pub coverage: f64,
    /// Moved back onto an already visited node.
    pub revisit: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanRecord {
    pub step: usize,
    pub trigger: String,
    pub communities: Vec<usize>,
    pub waypoints: Vec<NodeId>,
    pub terminal: NodeId,
    /// Position of `terminal`.
    pub target: Point,
    pub route: Vec<NodeId>,
    pub rationale: String,
    /// Why the rule reasoner replaced an external answer.
    pub fallback: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub method: String,
    pub map_kind: String,
    pub map_seed: u64,
    pub distance: f64,
    pub steps: usize,
    pub coverage: f64,
    pub complete: bool,
    pub revisits: usize,
    pub plans: usize,
    /// Set when the episode stopped early on an error.
    pub aborted: Option<String>,
}

/// One line of the JSONL episode log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LogEntry {
    Start {
        pose: Point,
        node: NodeId,
        coverage: f64,
        characterization_fallback: Option<String>,
    },
    Plan(PlanRecord),
    Step(StepRecord),
    Summary(EpisodeSummary),
}

/// Time-ordered record of an episode.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub entries: Vec<LogEntry>,
}

impl EpisodeLog {
    /// Start pose followed by every post-move pose.
    pub fn poses(&self) -> Vec<Point> {
        self.entries
            .iter()
            .filter_map(|e| match e {
                LogEntry::Start { pose, .. } => Some(*pose),
                LogEntry::Step(s) => Some(s.pose),
                _ => None,
            })
            .collect()
    }

    pub fn steps(&self) -> impl Iterator<Item = &StepRecord> {
        self.entries.iter().filter_map(|e| match e {
            LogEntry::Step(s) => Some(s),
            _ => None,
        })
    }

    pub fn plans(&self) -> impl Iterator<Item = &PlanRecord> {
        self.entries.iter().filter_map(|e| match e {
            LogEntry::Plan(p) => Some(p),
            _ => None,
        })
    }

    pub fn summary(&self) -> Option<&EpisodeSummary> {
        self.entries.iter().rev().find_map(|e| match e {
            LogEntry::Summary(s) => Some(s),
            _ => None,
        })
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{}",
                serde_json::to_string(e).expect("log entries serialize")
            );
        }
        out
    }

    /// Reads a log back; a torn final line from a crash is skipped.
    pub fn from_jsonl(text: &str) -> Result<Self, serde_json::Error> {
        let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        let mut entries = Vec::with_capacity(lines.len());
        for (i, line) in lines.iter().enumerate() {
            match serde_json::from_str(line) {
                Ok(e) => entries.push(e),
                Err(_) if i + 1 == lines.len() && !text.ends_with('\n') => break,
                Err(e) => return Err(e),
            }
        }
        Ok(Self { entries })
    }
}
