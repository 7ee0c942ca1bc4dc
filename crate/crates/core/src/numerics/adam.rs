use serde::{Deserialize, Serialize};

use super::NumericsError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Moment estimates for Adam, one entry per real parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub step: u64,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub hyper: AdamConfig,
}

impl AdamState {
    pub fn new(n_params: usize, hyper: AdamConfig) -> Self {
        AdamState {
            step: 0,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            hyper,
        }
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    pub fn set_lr(&mut self, lr: f64) {
        self.hyper.lr = lr;
    }

    /// One bias-corrected Adam update of `params`.
    ///
    /// Gradients are validated before anything is written, so on error both
    /// the state and the parameters are untouched.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<(), NumericsError> {
        if grads.len() != self.m.len() || params.len() != self.m.len() {
            return Err(NumericsError::LengthMismatch {
                expected: self.m.len(),
                got: grads.len().min(params.len()),
            });
        }
        if let Some(index) = grads.iter().position(|g| !g.is_finite()) {
            return Err(NumericsError::NonFiniteGradient { index });
        }
        self.step += 1;
        let AdamConfig {
            lr,
            beta1,
            beta2,
            eps,
        } = self.hyper;
        let t = self.step as i32;
        let bc1 = 1.0 - beta1.powi(t);
        let bc2 = 1.0 - beta2.powi(t);
        for ((p, &g), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            *m = beta1 * *m + (1.0 - beta1) * g;
            *v = beta2 * *v + (1.0 - beta2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *p -= lr * m_hat / (v_hat.sqrt() + eps);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_gradient_is_a_fixed_point() {
        let mut st = AdamState::new(3, AdamConfig::default());
        let mut p = vec![1.0, -2.0, 0.5];
        st.step(&mut p, &[0.0; 3]).unwrap();
        assert_eq!(p, vec![1.0, -2.0, 0.5]);
        assert_eq!(st.step, 1);
    }

    #[test]
    fn first_step_moves_by_lr() {
        let mut st = AdamState::new(1, AdamConfig::default());
        let mut p = vec![0.0];
        st.step(&mut p, &[0.5]).unwrap();
        // m̂ = g, v̂ = g², so the step is lr·g/(|g|+ε)
        let expected = -0.01 * 0.5 / (0.5 + 1e-8);
        assert!((p[0] - expected).abs() < 1e-15);
        assert!((p[0].abs() - 0.01).abs() < 1e-9);
    }

    #[test]
    fn non_finite_gradient_leaves_state_untouched() {
        let mut st = AdamState::new(2, AdamConfig::default());
        let mut p = vec![1.0, 1.0];
        st.step(&mut p, &[0.1, 0.2]).unwrap();
        let before = st.clone();
        let p_before = p.clone();
        let err = st.step(&mut p, &[0.1, f64::NAN]).unwrap_err();
        assert!(matches!(err, NumericsError::NonFiniteGradient { index: 1 }));
        assert_eq!(st, before);
        assert_eq!(p, p_before);
    }

    /// Straight-line restatement of the Adam recurrences, kept independent
    /// of [`AdamState`].
    fn reference_adam_on_square(p0: f64, lr: f64, steps: usize) -> Vec<f64> {
        let (b1, b2, eps) = (0.9f64, 0.999f64, 1e-8f64);
        let mut p = p0;
        let mut m = 0.0;
        let mut v = 0.0;
        let mut out = Vec::new();
        for t in 1..=steps {
            let g = 2.0 * p;
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g * g;
            let mh = m / (1.0 - b1.powi(t as i32));
            let vh = v / (1.0 - b2.powi(t as i32));
            p -= lr * mh / (vh.sqrt() + eps);
            out.push(p);
        }
        out
    }

    #[test]
    fn matches_reference_recurrence_on_square() {
        let oracle = reference_adam_on_square(1.0, 0.01, 10);
        let mut st = AdamState::new(1, AdamConfig::default());
        let mut p = vec![1.0];
        for expected in oracle {
            let g = 2.0 * p[0];
            st.step(&mut p, &[g]).unwrap();
            assert!((p[0] - expected).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn permutation_invariant(grads in proptest::collection::vec(-5.0..5.0f64, 2..12), rot in 0usize..12) {
            let n = grads.len();
            let rot = rot % n;
            let params: Vec<f64> = (0..n).map(|i| i as f64 * 0.1 - 0.3).collect();
            let mut a = params.clone();
            let mut sa = AdamState::new(n, AdamConfig::default());
            sa.step(&mut a, &grads).unwrap();
            sa.step(&mut a, &grads).unwrap();

            let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
            let mut b: Vec<f64> = perm.iter().map(|&i| params[i]).collect();
            let gb: Vec<f64> = perm.iter().map(|&i| grads[i]).collect();
            let mut sb = AdamState::new(n, AdamConfig::default());
            sb.step(&mut b, &gb).unwrap();
            sb.step(&mut b, &gb).unwrap();
            for (k, &i) in perm.iter().enumerate() {
                prop_assert_eq!(a[i].to_bits(), b[k].to_bits());
            }
        }

        #[test]
        fn second_moment_non_negative(grads in proptest::collection::vec(-100.0..100.0f64, 1..8)) {
            let mut st = AdamState::new(grads.len(), AdamConfig::default());
            let mut p = vec![0.0; grads.len()];
            for _ in 0..3 {
                st.step(&mut p, &grads).unwrap();
            }
            prop_assert!(st.v.iter().all(|&v| v >= 0.0));
        }
    }
}
