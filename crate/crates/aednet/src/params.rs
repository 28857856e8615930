use numerics::{ParamStore, Tensor};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{ModelConfig, Result};

/// Pre-activation giving a starting temperature sigmoid(4) ~ 0.982: close
/// to the natural temperature 1 (which sigmoid only reaches in the limit)
/// while keeping a usable gradient.
const TAU_PRE_INIT: f64 = 4.0;

pub(crate) fn input_w() -> String {
    "input.w".into()
}

pub(crate) fn input_b() -> String {
    "input.b".into()
}

pub(crate) fn head_w(layer: usize, head: usize) -> String {
    format!("layer{layer}.head{head}.w")
}

pub(crate) fn head_static_a(head: usize) -> String {
    format!("layer1.head{head}.a")
}

pub(crate) fn q_mlp(layer: usize, head: usize, part: &str) -> String {
    format!("layer{layer}.head{head}.q.{part}")
}

pub(crate) fn layer_mlp(layer: usize, part: &str) -> String {
    format!("layer{layer}.mlp.{part}")
}

/// Temperature pre-activation for the cross-propagation entering layer
/// `site` (sites 2..=T, plus T+1 for the trailing propagation).
pub(crate) fn tau_name(cfg: &ModelConfig, site: usize) -> String {
    if cfg.shared_temperature {
        "tau".into()
    } else {
        format!("tau{site}")
    }
}

fn glorot(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Tensor {
    let std = (2.0 / (rows + cols) as f64).sqrt();
    Tensor::randn(rows, cols, std, rng)
}

/// Create every learnable tensor of the model, seeded, in a fixed order.
pub fn init_params(cfg: &ModelConfig, seed: u64) -> Result<ParamStore> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = cfg.hidden_dim;
    let dh = cfg.per_head_dim();
    let mut store = ParamStore::new();

    store.insert(&input_w(), glorot(cfg.input_dim, d, &mut rng))?;
    store.insert(&input_b(), Tensor::zeros(1, d))?;

    for t in 1..=cfg.layers {
        for k in 1..=cfg.heads {
            store.insert(&head_w(t, k), glorot(d, dh, &mut rng))?;
            if t == 1 {
                store.insert(&head_static_a(k), glorot(1, 2 * dh, &mut rng))?;
            }
            store.insert(&q_mlp(t, k, "w1"), glorot(d, 2 * dh, &mut rng))?;
            store.insert(&q_mlp(t, k, "b1"), Tensor::zeros(1, 2 * dh))?;
            store.insert(&q_mlp(t, k, "w2"), glorot(2 * dh, 2 * dh, &mut rng))?;
            store.insert(&q_mlp(t, k, "b2"), Tensor::zeros(1, 2 * dh))?;
        }
        store.insert(&layer_mlp(t, "w1"), glorot(d, d, &mut rng))?;
        store.insert(&layer_mlp(t, "b1"), Tensor::zeros(1, d))?;
        store.insert(&layer_mlp(t, "w2"), glorot(d, d, &mut rng))?;
        store.insert(&layer_mlp(t, "b2"), Tensor::zeros(1, d))?;
    }

    if cfg.shared_temperature {
        store.insert("tau", Tensor::scalar(TAU_PRE_INIT))?;
    } else {
        for site in 2..=cfg.layers + 1 {
            store.insert(&tau_name(cfg, site), Tensor::scalar(TAU_PRE_INIT))?;
        }
    }
    Ok(store)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn param_layout_matches_config() {
        let cfg = ModelConfig::new(3, 4, 32, 5);
        let store = init_params(&cfg, 1).unwrap();
        assert_eq!(store.get("input.w").unwrap().shape(), (5, 32));
        assert_eq!(store.get("layer1.head4.a").unwrap().shape(), (1, 16));
        assert!(store.get("layer2.head1.a").is_none());
        assert_eq!(store.get("layer3.head2.w").unwrap().shape(), (32, 8));
        assert_eq!(store.get("layer2.head3.q.w2").unwrap().shape(), (16, 16));
        assert_eq!(store.get("layer1.mlp.w1").unwrap().shape(), (32, 32));
        // Temperature sites: entering layers 2..3 plus the trailing one.
        assert!(store.get("tau2").is_some());
        assert!(store.get("tau3").is_some());
        assert!(store.get("tau4").is_some());
        assert!(store.get("tau5").is_none());
    }

    #[test]
    fn shared_temperature_collapses_to_one_scalar() {
        let mut cfg = ModelConfig::new(3, 2, 8, 4);
        cfg.shared_temperature = true;
        let store = init_params(&cfg, 1).unwrap();
        assert!(store.get("tau").is_some());
        assert!(store.get("tau2").is_none());
    }

    #[test]
    fn same_seed_same_params() {
        let cfg = ModelConfig::new(2, 2, 8, 3);
        let a = init_params(&cfg, 9).unwrap();
        let b = init_params(&cfg, 9).unwrap();
        for ((n1, t1), (n2, t2)) in a.iter().zip(b.iter()) {
            assert_eq!(n1, n2);
            assert_eq!(t1.data(), t2.data());
        }
    }
}
