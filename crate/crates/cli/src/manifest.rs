//! JSON-lines run manifests.
//!
//! Each run appends one object to `<out>.manifest.jsonl`:
//!
//! ```text
//! {"command": "depth", "version": "0.1.0", "threads": 4, "seed": null,
//!  "args": {...}, "outputs": ["p.csv"], "results": {...}, "wall_time_secs": 0.12}
//! ```
//!
//! `args` echoes the parsed options, `results` holds command-specific values
//! such as a selected parameter or a precision. Runs writing to stdout have no
//! manifest.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::Instant;

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Serialize)]
pub struct Manifest {
    command: &'static str,
    version: &'static str,
    threads: usize,
    seed: Option<u64>,
    args: Map<String, Value>,
    outputs: Vec<String>,
    results: Map<String, Value>,
    wall_time_secs: f64,
}

static STARTED: OnceLock<Instant> = OnceLock::new();

/// Marks the start of the run; wall time is measured from here.
pub fn start_clock() {
    STARTED.get_or_init(Instant::now);
}

impl Manifest {
    pub fn new(command: &'static str, threads: usize) -> Self {
        Self {
            command,
            version: env!("CARGO_PKG_VERSION"),
            threads,
            seed: None,
            args: Map::new(),
            outputs: Vec::new(),
            results: Map::new(),
            wall_time_secs: 0.0,
        }
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.seed = Some(seed);
        self
    }

    pub fn arg(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.args.insert(key.to_string(), value.into());
        self
    }

    pub fn output(&mut self, path: &Path) -> &mut Self {
        self.outputs.push(path.display().to_string());
        self
    }

    pub fn result(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.results.insert(key.to_string(), value.into());
        self
    }

    /// Appends the manifest next to `primary`, unless it is stdout.
    pub fn write(&mut self, primary: &Path) -> std::io::Result<()> {
        if primary.as_os_str() == "-" {
            return Ok(());
        }
        self.wall_time_secs = STARTED.get().map_or(0.0, |s| s.elapsed().as_secs_f64());
        let mut path = PathBuf::from(primary);
        let mut name = path.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.jsonl");
        path.set_file_name(name);
        let mut f = OpenOptions::new().create(true).append(true).open(path)?;
        let line = serde_json::to_string(self).map_err(std::io::Error::other)?;
        writeln!(f, "{line}")
    }
}
