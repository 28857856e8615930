use serde::{Deserialize, Serialize};

use crate::{ModelError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Pooling {
    #[default]
    Mean,
    Sum,
    Max,
}

impl std::str::FromStr for Pooling {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mean" => Ok(Pooling::Mean),
            "sum" => Ok(Pooling::Sum),
            "max" => Ok(Pooling::Max),
            other => Err(format!("unknown pooling {other:?} (expected mean|sum|max)")),
        }
    }
}

/// Model hyperparameters. Serialized into every checkpoint header so
/// evaluation never needs the original configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// Number of layers (at least 2: the loss schedule pairs each interior
    /// layer's edge-deleting loss with the next layer's matching loss).
    pub layers: usize,
    /// Attention heads per layer; must divide `hidden_dim`.
    pub heads: usize,
    pub hidden_dim: usize,
    /// Raw feature width entering the shared input projection.
    pub input_dim: usize,
    /// Weight of the edge-deleting loss against the matching loss.
    pub lambda1: f64,
    /// Weight of the interior layers' losses against the last layer's.
    pub lambda2: f64,
    #[serde(default)]
    pub pooling: Pooling,
    /// Ablation: never substitute cross-information for the query-graph
    /// embeddings; the predicted matrix is still produced for the loss.
    #[serde(default)]
    pub no_cross: bool,
    /// Share one softmax temperature across all cross-propagation sites
    /// instead of one per site.
    #[serde(default)]
    pub shared_temperature: bool,
}

impl ModelConfig {
    pub fn new(layers: usize, heads: usize, hidden_dim: usize, input_dim: usize) -> Self {
        ModelConfig {
            layers,
            heads,
            hidden_dim,
            input_dim,
            lambda1: 0.5,
            lambda2: 0.2,
            pooling: Pooling::Mean,
            no_cross: false,
            shared_temperature: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers < 2 {
            return Err(ModelError::Config(format!(
                "layers must be >= 2, got {}",
                self.layers
            )));
        }
        if self.heads == 0 || self.hidden_dim == 0 || self.input_dim == 0 {
            return Err(ModelError::Config(
                "heads, hidden_dim and input_dim must be >= 1".into(),
            ));
        }
        if self.hidden_dim % self.heads != 0 {
            return Err(ModelError::Config(format!(
                "heads ({}) must divide hidden_dim ({})",
                self.heads, self.hidden_dim
            )));
        }
        if !(0.0..=1.0).contains(&self.lambda1) || !(0.0..=1.0).contains(&self.lambda2) {
            return Err(ModelError::Config(format!(
                "lambda1 ({}) and lambda2 ({}) must lie in [0, 1]",
                self.lambda1, self.lambda2
            )));
        }
        Ok(())
    }

    /// Per-head width: hidden_dim / heads, so concatenating the heads
    /// restores hidden_dim and the residual connection type-checks.
    pub fn per_head_dim(&self) -> usize {
        self.hidden_dim / self.heads
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_catches_bad_configs() {
        assert!(ModelConfig::new(2, 2, 8, 4).validate().is_ok());
        assert!(ModelConfig::new(1, 2, 8, 4).validate().is_err());
        assert!(ModelConfig::new(2, 3, 8, 4).validate().is_err());
        let mut c = ModelConfig::new(2, 2, 8, 4);
        c.lambda1 = 1.5;
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_roundtrips_through_json() {
        let cfg = ModelConfig::new(3, 4, 32, 5);
        let json = serde_json::to_string(&cfg).unwrap();
        let back: ModelConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
    }
}
