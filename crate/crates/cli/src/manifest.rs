use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};

fn unix_seconds() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Plain `key = value` record of one run: enough to replay it.
#[derive(Debug)]
pub struct RunManifest {
    entries: Vec<(String, String)>,
}

impl RunManifest {
    pub fn new(command: &str, argv: &[String]) -> Self {
        let mut m = RunManifest { entries: Vec::new() };
        m.set("tool", env!("CARGO_PKG_NAME"));
        m.set("version", env!("CARGO_PKG_VERSION"));
        m.set("command", command);
        m.set("argv", argv.join(" "));
        m.set("started_unix", unix_seconds());
        m
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_owned(), value.to_string()));
    }

    pub fn set_path(&mut self, key: &str, path: &Path) {
        self.set(key, path.display());
    }

    fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Stamps the finish time and writes the manifest to `path`, or to
    /// standard error when there is nowhere else to put it.
    pub fn finish(mut self, path: Option<PathBuf>) -> Result<()> {
        self.set("finished_unix", unix_seconds());
        match path {
            Some(path) => {
                fs::write(&path, self.render()).with_context(|| format!("writing manifest {}", path.display()))
            }
            None => {
                eprint!("{}", self.render());
                Ok(())
            }
        }
    }
}

/// `<path>.manifest`
pub fn beside(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".manifest");
    PathBuf::from(name)
}
