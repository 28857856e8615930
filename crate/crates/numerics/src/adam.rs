use crate::{Gradients, NumericsError, ParamStore, Result};

/// Bias-corrected Adam hyperparameters.
#[derive(Debug, Clone, Copy)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn with_lr(lr: f64) -> Self {
        AdamConfig {
            lr,
            ..Default::default()
        }
    }
}

impl ParamStore {
    /// One bias-corrected Adam update. Parameters absent from `grads`
    /// receive a zero gradient; present gradients must shape-match and be
    /// finite.
    pub fn adam_step(&mut self, grads: &Gradients, cfg: &AdamConfig) -> Result<()> {
        for entry in self.entries() {
            if let Some(g) = grads.get(&entry.name) {
                if g.shape() != entry.value.shape() {
                    return Err(NumericsError::shape(
                        "adam_step",
                        format!(
                            "gradient {:?} for parameter {:?} of shape {:?}",
                            g.shape(),
                            entry.name,
                            entry.value.shape()
                        ),
                    ));
                }
                if !g.is_finite() {
                    return Err(NumericsError::NonFiniteGradient(entry.name.clone()));
                }
            }
        }

        let t = self.advance_step();
        let bias1 = 1.0 - cfg.beta1.powi(t as i32);
        let bias2 = 1.0 - cfg.beta2.powi(t as i32);
        for entry in self.entries_mut() {
            let g_owned;
            let g: &[f64] = match grads.get(&entry.name) {
                Some(g) => g.data(),
                None => {
                    g_owned = vec![0.0; entry.value.len()];
                    &g_owned
                }
            };
            let m = entry.m.data_mut();
            let v = entry.v.data_mut();
            let w = entry.value.data_mut();
            for i in 0..w.len() {
                m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
                v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
                let m_hat = m[i] / bias1;
                let v_hat = v[i] / bias2;
                w[i] -= cfg.lr * m_hat / (v_hat.sqrt() + cfg.epsilon);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Tensor;

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        let mut store = ParamStore::new();
        store.insert("w", Tensor::from_rows(&[vec![1.0, -2.0]])).unwrap();
        store.adam_step(&Gradients::new(), &AdamConfig::default()).unwrap();
        assert_eq!(store.get("w").unwrap().data(), &[1.0, -2.0]);
        assert_eq!(store.step(), 1);
    }

    #[test]
    fn first_step_on_quadratic_moves_by_learning_rate() {
        // f(w) = w^2 at w = 1: the bias-corrected first step has magnitude
        // almost exactly lr.
        let mut store = ParamStore::new();
        store.insert("w", Tensor::scalar(1.0)).unwrap();
        let mut grads = Gradients::new();
        grads.insert("w".into(), Tensor::scalar(2.0));
        store.adam_step(&grads, &AdamConfig::with_lr(0.1)).unwrap();
        let w1 = store.get("w").unwrap().item();
        assert!((w1 - 0.9000000005).abs() < 1e-12, "w1 = {w1}");
    }

    #[test]
    fn hundred_steps_converge_near_the_minimum() {
        // f(w) = (w - 3)^2 from w = 0 at lr 0.1; expected endpoint computed
        // with an independent reference implementation.
        let mut store = ParamStore::new();
        store.insert("w", Tensor::scalar(0.0)).unwrap();
        let cfg = AdamConfig::with_lr(0.1);
        for _ in 0..100 {
            let w = store.get("w").unwrap().item();
            let mut grads = Gradients::new();
            grads.insert("w".into(), Tensor::scalar(2.0 * (w - 3.0)));
            store.adam_step(&grads, &cfg).unwrap();
        }
        let w = store.get("w").unwrap().item();
        assert!((w - 3.0).abs() < 0.1, "w = {w}");
        assert!((w - 2.9806554375278123).abs() < 1e-9, "w = {w}");
    }

    #[test]
    fn non_finite_gradient_is_rejected() {
        let mut store = ParamStore::new();
        store.insert("w", Tensor::scalar(1.0)).unwrap();
        let mut grads = Gradients::new();
        grads.insert("w".into(), Tensor::scalar(f64::NAN));
        assert!(matches!(
            store.adam_step(&grads, &AdamConfig::default()),
            Err(NumericsError::NonFiniteGradient(_))
        ));
    }
}
