use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::NetworkConfig;
use super::model::{init_network, Network};
use super::NetworkError;

pub const CHECKPOINT_FORMAT: &str = "cosmo-checkpoint/1";

/// JSON container. Parameters are written as `{:.16e}` strings (17
/// significant digits), which reproduce every `f64` exactly on parse.
#[derive(Serialize, Deserialize)]
struct Checkpoint {
    format: String,
    config: NetworkConfig,
    param_count: usize,
    params: Vec<String>,
}

pub fn save_checkpoint(net: &Network, path: &Path) -> Result<(), NetworkError> {
    let ck = Checkpoint {
        format: CHECKPOINT_FORMAT.to_string(),
        config: net.config().clone(),
        param_count: net.param_count(),
        params: net.params().iter().map(|v| format!("{v:.16e}")).collect(),
    };
    let text = serde_json::to_string_pretty(&ck).map_err(|e| NetworkError::Checkpoint(e.to_string()))?;
    fs::write(path, text)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Network, NetworkError> {
    let text = fs::read_to_string(path)?;
    let ck: Checkpoint = serde_json::from_str(&text).map_err(|e| NetworkError::Checkpoint(e.to_string()))?;
    if ck.format != CHECKPOINT_FORMAT {
        return Err(NetworkError::Checkpoint(format!(
            "unsupported format {:?}, expected {CHECKPOINT_FORMAT:?}",
            ck.format
        )));
    }
    let mut net = init_network(ck.config)?;
    if ck.param_count != net.param_count() || ck.params.len() != net.param_count() {
        return Err(NetworkError::Checkpoint(format!(
            "config implies {} parameters, file declares {} and holds {}",
            net.param_count(),
            ck.param_count,
            ck.params.len()
        )));
    }
    let params = ck
        .params
        .iter()
        .enumerate()
        .map(|(i, s)| {
            s.parse::<f64>()
                .map_err(|e| NetworkError::Checkpoint(format!("parameter {i}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    net.set_params(params)?;
    Ok(net)
}
