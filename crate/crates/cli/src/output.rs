use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use netspace::{Error, Network};
use serde_json::{json, Value};

use crate::args::Command;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or inputs: exit 2.
    Usage(String),
    Core(Error),
    Io(String),
    /// The computation ran but its check failed: exit 1.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                Error::UnsupportedActivation { .. }
                | Error::Config(_)
                | Error::Contract(_)
                | Error::Shape(_)
                | Error::Parse { .. }
                | Error::Validation(_) => 2,
                Error::ConstructionFailure { .. } => 1,
            },
            CliError::Io(_) | CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Failed(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// What a command produces. `report` goes into the manifest.
pub struct Artifacts {
    pub summary: String,
    pub report: Value,
    pub csv: String,
    pub networks: Vec<(String, Network)>,
    /// Set when the run finished but its check did not hold.
    pub failure: Option<String>,
}

pub struct RunDir {
    root: PathBuf,
}

impl RunDir {
    /// Refuses a non-empty directory unless `force`, in which case the
    /// files this tool writes are removed first.
    pub fn create(root: &Path, force: bool) -> Result<Self, CliError> {
        if root.exists() {
            let non_empty = fs::read_dir(root)
                .map_err(|e| io_err(root, e))?
                .next()
                .is_some();
            if non_empty && !force {
                return Err(CliError::Usage(format!(
                    "output directory {} is not empty (pass --force to overwrite)",
                    root.display()
                )));
            }
            for name in ["manifest.json", "data.csv"] {
                let p = root.join(name);
                if p.exists() {
                    fs::remove_file(&p).map_err(|e| io_err(&p, e))?;
                }
            }
            let nets = root.join("networks");
            if nets.exists() {
                fs::remove_dir_all(&nets).map_err(|e| io_err(&nets, e))?;
            }
        }
        fs::create_dir_all(root).map_err(|e| io_err(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn write(&self, rel: &str, text: &str) -> Result<(), CliError> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
        }
        fs::write(&path, text).map_err(|e| io_err(&path, e))
    }

    /// Writes the data files (on success) and the manifest (always).
    /// Paths in the manifest are relative to the run directory.
    pub fn finish(
        &self,
        cmd: &Command,
        result: &Result<Artifacts, CliError>,
        duration: f64,
    ) -> Result<Value, CliError> {
        let mut outputs = vec!["manifest.json".to_string()];
        let (status, report, error) = match result {
            Ok(art) => {
                self.write("data.csv", &art.csv)?;
                outputs.push("data.csv".into());
                for (name, net) in &art.networks {
                    let rel = format!("networks/{name}.json");
                    self.write(&rel, &net.to_json()?)?;
                    outputs.push(rel);
                }
                match &art.failure {
                    None => ("ok", art.report.clone(), Value::Null),
                    Some(f) => ("failed", art.report.clone(), Value::String(f.clone())),
                }
            }
            Err(e) => {
                let report = match e {
                    CliError::Core(Error::ConstructionFailure { best_error, .. }) => {
                        json!({ "best_error": best_error })
                    }
                    _ => Value::Null,
                };
                ("failed", report, Value::String(e.to_string()))
            }
        };
        let flags = serde_json::to_value(cmd)
            .ok()
            .and_then(|v| v.as_object().and_then(|o| o.values().next().cloned()))
            .unwrap_or(Value::Null);
        let manifest = json!({
            "command": cmd.name(),
            "flags": flags,
            "seed": cmd.common().seed,
            "version": env!("CARGO_PKG_VERSION"),
            "status": status,
            "error": error,
            "outputs": outputs,
            "report": report,
            "duration_seconds": duration,
        });
        self.write(
            "manifest.json",
            &serde_json::to_string_pretty(&manifest).expect("manifest is plain JSON"),
        )?;
        Ok(manifest)
    }
}
