use std::fmt;

/// Errors classified by exit code: 1 usage, 2 data, 3 numeric failure.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric error: {m}"),
        }
    }
}

impl From<graph_core::GraphError> for CliError {
    fn from(e: graph_core::GraphError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<exact_match::MatchError> for CliError {
    fn from(e: exact_match::MatchError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<pairgen::GenError> for CliError {
    fn from(e: pairgen::GenError) -> Self {
        match e {
            pairgen::GenError::InvalidConfig(m) => CliError::Usage(m),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<numerics::NumericsError> for CliError {
    fn from(e: numerics::NumericsError) -> Self {
        use numerics::NumericsError as N;
        match &e {
            N::NonFinite { .. }
            | N::NonFiniteGradient(_)
            | N::AllMaskedRow { .. }
            | N::NonPositiveTemperature(_)
            | N::NonScalarLoss { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<aednet::ModelError> for CliError {
    fn from(e: aednet::ModelError) -> Self {
        match e {
            aednet::ModelError::Numerics(n) => n.into(),
            aednet::ModelError::Graph(g) => g.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<harness::HarnessError> for CliError {
    fn from(e: harness::HarnessError) -> Self {
        use harness::HarnessError as H;
        match e {
            H::InvalidConfig(m) => CliError::Usage(m),
            H::Model(m) => m.into(),
            H::Numerics(n) => n.into(),
            H::Graph(g) => g.into(),
            H::Match(m) => m.into(),
            H::TrainStep { pair, source } => {
                let inner: CliError = (*source).into();
                match inner {
                    CliError::Numeric(m) => CliError::Numeric(format!("pair {pair}: {m}")),
                    CliError::Data(m) => CliError::Data(format!("pair {pair}: {m}")),
                    CliError::Usage(m) => CliError::Usage(format!("pair {pair}: {m}")),
                }
            }
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}
