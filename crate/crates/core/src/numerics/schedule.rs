use super::NumericsError;

pub const DEFAULT_LR: f64 = 0.01;
pub const DEFAULT_DECAY: f64 = 0.01;

/// Exponential interpolation from `lr0` at epoch 0 to `lr0·decay` at the
/// final epoch: `lr0 · decay^(epoch/total)`.
pub fn lr_schedule(epoch: usize, total_epochs: usize, lr0: f64, decay: f64) -> Result<f64, NumericsError> {
    if total_epochs == 0 {
        return Err(NumericsError::InvalidSchedule("total_epochs must be at least 1".into()));
    }
    if epoch > total_epochs {
        return Err(NumericsError::InvalidSchedule(format!(
            "epoch {epoch} beyond total {total_epochs}"
        )));
    }
    Ok(lr0 * decay.powf(epoch as f64 / total_epochs as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_midpoint() {
        assert_eq!(lr_schedule(0, 100, 0.01, 0.01).unwrap(), 0.01);
        assert!((lr_schedule(100, 100, 0.01, 0.01).unwrap() - 1e-4).abs() < 1e-18);
        assert!((lr_schedule(50, 100, 0.01, 0.01).unwrap() - 1e-3).abs() < 1e-17);
    }

    #[test]
    fn zero_total_rejected() {
        assert!(lr_schedule(0, 0, 0.01, 0.01).is_err());
        assert!(lr_schedule(5, 4, 0.01, 0.01).is_err());
    }

    #[test]
    fn strictly_decreasing() {
        let lrs: Vec<f64> = (0..=200).map(|e| lr_schedule(e, 200, 0.01, 0.01).unwrap()).collect();
        assert!(lrs.windows(2).all(|w| w[1] < w[0]));
    }
}
