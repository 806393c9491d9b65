//! JSON file formats.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use manymatch_core::{GridPoint, Instance};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub delta: i64,
    pub red: Vec<[i64; 2]>,
    pub blue: Vec<[i64; 2]>,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        let pts = |ps: &[GridPoint]| ps.iter().map(|p| [p.x, p.y]).collect();
        InstanceFile { delta: inst.delta(), red: pts(inst.red()), blue: pts(inst.blue()) }
    }

    pub fn to_instance(&self) -> Result<Instance, CliError> {
        let pts = |ps: &[[i64; 2]]| ps.iter().map(|&[x, y]| GridPoint::new(x, y)).collect();
        Instance::new(self.delta, pts(&self.red), pts(&self.blue)).map_err(|e| CliError::Input(e.to_string()))
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct Timings {
    pub scaling: f64,
    pub decomposition: f64,
    pub candidates: f64,
    pub divide_and_conquer: f64,
    pub total: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct Checks {
    /// Every point touched by some edge.
    pub cover_valid: bool,
    /// Cover cost equals the prism matching cost it came from.
    pub cover_equals_matching: bool,
    /// 1-feasibility after each scaling phase; absent when not checked.
    pub phases_verified: Option<bool>,
    /// Separator calls within their size bounds; exact mode only.
    pub separator_bounds: Option<bool>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct Summary {
    pub n: usize,
    pub theta_exp: Option<i64>,
    pub phases: usize,
    pub pieces: usize,
    pub skeleton: usize,
    pub candidate_edges: usize,
    pub separator_calls: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ResultRecord {
    pub mode: String,
    pub cost: String,
    /// Sorted squared edge lengths; the cost is the sum of their roots.
    pub squared_lengths: Vec<u64>,
    /// `[red index, blue index]`, sorted.
    pub edges: Vec<[usize; 2]>,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
    pub summary: Summary,
    pub checks: Checks,
    pub timings: Timings,
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Input(format!("{}: {e}", path.display()))
    })
}

pub fn read_instance(path: &Path) -> Result<Instance, CliError> {
    read_json::<InstanceFile>(path)?.to_instance()
}

/// Writes to `out`, or stdout when absent.
pub fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Failure(format!("stdout: {e}")))
        }
    }
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}
