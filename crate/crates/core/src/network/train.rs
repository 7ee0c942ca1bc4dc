use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::numerics::{lr_schedule, AdamConfig, AdamState, DEFAULT_DECAY, DEFAULT_LR};

use super::model::Network;
use super::NetworkError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr0: f64,
    /// Final learning rate as a fraction of `lr0`.
    pub decay: f64,
    pub seed: u64,
    /// Record every `log_every` epochs (the last epoch is always recorded).
    pub log_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 500,
            lr0: DEFAULT_LR,
            decay: DEFAULT_DECAY,
            seed: 0,
            log_every: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Training loss before this epoch's update.
    pub loss: f64,
    /// `10·log10(1/loss)`, PSNR at unit peak.
    pub psnr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainRecord {
    pub epochs: Vec<EpochRecord>,
    pub initial_loss: f64,
    pub final_loss: f64,
    pub wallclock_s: f64,
    pub config_hash: String,
    pub seed: u64,
}

impl TrainRecord {
    pub fn final_psnr(&self) -> f64 {
        psnr_from_mse(self.final_loss)
    }
}

pub(crate) fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        -10.0 * mse.log10()
    }
}

fn config_hash(net: &Network, tcfg: &TrainConfig) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(net.config()).expect("config serializes"));
    h.update(serde_json::to_vec(tcfg).expect("config serializes"));
    h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Full-batch Adam on the masked mean squared error, with the learning rate
/// following `lr0·decay^(epoch/epochs)`.
pub fn train(
    net: Network,
    coords: &[f64],
    targets: &[f64],
    tcfg: &TrainConfig,
    mask: Option<&[bool]>,
) -> Result<(Network, TrainRecord), NetworkError> {
    train_observed(net, coords, targets, tcfg, mask, |_| {})
}

/// [`train`], handing each logged epoch to `observe` as soon as it is known.
pub fn train_observed<O: FnMut(&EpochRecord)>(
    mut net: Network,
    coords: &[f64],
    targets: &[f64],
    tcfg: &TrainConfig,
    mask: Option<&[bool]>,
    mut observe: O,
) -> Result<(Network, TrainRecord), NetworkError> {
    if tcfg.log_every == 0 {
        return Err(NetworkError::InvalidTrainConfig("log_every must be positive".into()));
    }
    if !(tcfg.lr0 > 0.0) || !(tcfg.decay > 0.0) {
        return Err(NetworkError::InvalidTrainConfig(format!(
            "lr0 and decay must be positive, got {} and {}",
            tcfg.lr0, tcfg.decay
        )));
    }
    let start = Instant::now();
    let hash = config_hash(&net, tcfg);
    let mut record = TrainRecord {
        epochs: Vec::new(),
        initial_loss: f64::NAN,
        final_loss: f64::NAN,
        wallclock_s: 0.0,
        config_hash: hash,
        seed: tcfg.seed,
    };
    if tcfg.epochs == 0 {
        let loss = net.loss(coords, targets, mask)?;
        record.initial_loss = loss;
        record.final_loss = loss;
        record.wallclock_s = start.elapsed().as_secs_f64();
        return Ok((net, record));
    }

    let mut adam = AdamState::new(net.param_count(), AdamConfig::default());
    let mut last_good = net.clone();
    for epoch in 0..tcfg.epochs {
        let (loss, grad) = match net.loss_and_grad(coords, targets, mask) {
            Ok(v) => v,
            Err(NetworkError::NonFinite { layer, row, input }) => {
                return Err(NetworkError::Diverged {
                    epoch,
                    reason: format!("hidden layer {layer}, sample {row}, input {input}"),
                    last_good: Box::new(last_good),
                })
            }
            Err(e) => return Err(e),
        };
        if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(NetworkError::Diverged {
                epoch,
                reason: format!("loss {loss}"),
                last_good: Box::new(last_good),
            });
        }
        if epoch == 0 {
            record.initial_loss = loss;
        }
        if epoch % tcfg.log_every == 0 || epoch + 1 == tcfg.epochs {
            let rec = EpochRecord {
                epoch,
                loss,
                psnr: psnr_from_mse(loss),
            };
            observe(&rec);
            record.epochs.push(rec);
        }
        last_good.params_mut().copy_from_slice(net.params());
        adam.set_lr(lr_schedule(epoch, tcfg.epochs, tcfg.lr0, tcfg.decay)?);
        adam.step(net.params_mut(), &grad)?;
        check_bounds(&net, epoch)?;
    }
    let final_loss = net.loss(coords, targets, mask).map_err(|e| match e {
        NetworkError::NonFinite { .. } => NetworkError::Diverged {
            epoch: tcfg.epochs,
            reason: e.to_string(),
            last_good: Box::new(last_good.clone()),
        },
        other => other,
    })?;
    record.final_loss = final_loss;
    record.wallclock_s = start.elapsed().as_secs_f64();
    Ok((net, record))
}

fn check_bounds(net: &Network, epoch: usize) -> Result<(), NetworkError> {
    for h in 0..net.config().hidden_layers() {
        for (kind, v) in net.learnable().iter().zip(net.activation_params(h)) {
            if !net.config().bounds.get(*kind).contains_strictly(v) {
                return Err(NetworkError::BoundViolation {
                    epoch,
                    name: format!("{kind} (hidden layer {h})"),
                    value: v,
                });
            }
        }
    }
    Ok(())
}
