use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Map, Value};

use crate::network::{train_observed, EpochRecord, Network, NetworkError, TrainConfig, TrainRecord};
use crate::spectral::{sig17, SpectralError};
use crate::tasks::TasksError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<TasksError> for CliError {
    fn from(e: TasksError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<NetworkError> for CliError {
    fn from(e: NetworkError) -> Self {
        match e {
            NetworkError::Diverged { .. } | NetworkError::NonFinite { .. } | NetworkError::BoundViolation { .. } => {
                CliError::Numerical(e.to_string())
            }
            NetworkError::Io(_) | NetworkError::Checkpoint(_) => CliError::Input(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::Network(n) => n.into(),
            SpectralError::NonFiniteSample { .. } | SpectralError::Parseval(_) => CliError::Numerical(e.to_string()),
            SpectralError::Io(_) | SpectralError::Csv(_) => CliError::Input(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

/// Default run directory: `$COSMO_OUT/<command>-seed<seed>`, else `runs/…`.
pub(crate) fn default_out(command: &str, seed: u64) -> PathBuf {
    let root = std::env::var_os("COSMO_OUT").map_or_else(|| PathBuf::from("runs"), PathBuf::from);
    root.join(format!("{command}-seed{seed}"))
}

/// Creates the run directory; a non-empty one needs `force`.
pub(crate) fn prepare_dir(dir: &Path, force: bool) -> Result<(), CliError> {
    if dir.exists() {
        let busy = std::fs::read_dir(dir)?.next().is_some();
        if busy && !force {
            return Err(CliError::Usage(format!(
                "{} exists and is not empty (use --force to overwrite)",
                dir.display()
            )));
        }
    }
    std::fs::create_dir_all(dir)?;
    Ok(())
}

/// One run directory and the artifacts written into it.
pub(crate) struct Session {
    pub dir: PathBuf,
    command: &'static str,
    seed: u64,
    config: Value,
    files: Vec<String>,
    start: Instant,
    extra: Map<String, Value>,
}

impl Session {
    pub fn open(command: &'static str, seed: u64, config: Value, dir: PathBuf, force: bool) -> Result<Self, CliError> {
        prepare_dir(&dir, force)?;
        Ok(Session {
            dir,
            command,
            seed,
            config,
            files: Vec::new(),
            start: Instant::now(),
            extra: Map::new(),
        })
    }

    /// Path of an artifact, recorded in the summary's file list.
    pub fn file(&mut self, name: &str) -> PathBuf {
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        self.dir.join(name)
    }

    pub fn note(&mut self, key: &str, value: Value) {
        self.extra.insert(key.to_string(), value);
    }

    /// Trains with `metrics.csv` streamed as epochs complete, so a diverged run
    /// keeps its history.
    pub fn train(
        &mut self,
        net: Network,
        coords: &[f64],
        targets: &[f64],
        tcfg: &TrainConfig,
        mask: Option<&[bool]>,
    ) -> Result<(Network, TrainRecord), CliError> {
        let path = self.file("metrics.csv");
        let mut w = MetricsWriter::create(&path)?;
        let mut write_err = None;
        let result = train_observed(net, coords, targets, tcfg, mask, |rec| {
            if write_err.is_none() {
                write_err = w.push(rec).err();
            }
        });
        w.finish()?;
        if let Some(e) = write_err {
            return Err(e.into());
        }
        match result {
            Ok((net, rec)) => {
                self.note("epochs", json!(tcfg.epochs));
                self.note("config_hash", json!(rec.config_hash));
                self.note("activation_params", activation_params(&net));
                Ok((net, rec))
            }
            Err(e) => {
                let err = CliError::from(e);
                let mut metrics = Map::new();
                metrics.insert("status".into(), json!("failed"));
                self.note("error", json!(err.to_string()));
                self.finish(metrics)?;
                Err(err)
            }
        }
    }

    /// Writes `summary.json`.
    pub fn finish(&mut self, metrics: Map<String, Value>) -> Result<(), CliError> {
        let path = self.file("summary.json");
        let mut doc = Map::new();
        doc.insert("command".into(), json!(self.command));
        doc.insert("seed".into(), json!(self.seed));
        doc.insert("config".into(), self.config.clone());
        doc.insert("metrics".into(), Value::Object(metrics));
        doc.insert("files".into(), json!(self.files));
        doc.insert("wallclock_s".into(), json!(self.start.elapsed().as_secs_f64()));
        for (k, v) in &self.extra {
            doc.insert(k.clone(), v.clone());
        }
        let text = serde_json::to_string_pretty(&Value::Object(doc))?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}

/// `[[T, ζ], …]` per hidden layer.
pub(crate) fn activation_params(net: &Network) -> Value {
    let layers: Vec<Vec<f64>> = (0..net.config().hidden_layers()).map(|h| net.activation_params(h)).collect();
    json!(layers)
}

/// `metrics.csv` with header `epoch,loss,psnr`.
pub(crate) struct MetricsWriter {
    w: csv::Writer<BufWriter<File>>,
}

impl MetricsWriter {
    pub fn create(path: &Path) -> Result<Self, CliError> {
        let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
        w.write_record(["epoch", "loss", "psnr"])?;
        Ok(MetricsWriter { w })
    }

    pub fn push(&mut self, rec: &EpochRecord) -> Result<(), csv::Error> {
        self.w
            .write_record([rec.epoch.to_string(), sig17(rec.loss), sig17(rec.psnr)])
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.w.flush()?;
        Ok(())
    }
}

/// Writes rows of pre-formatted cells.
pub(crate) fn write_csv<W: Write>(out: W, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}
