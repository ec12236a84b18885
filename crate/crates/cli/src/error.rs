//! Error classification behind the process exit codes:
//! 1 usage, 2 data, 3 internal.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<railbench_sim_core::SimError> for CliError {
    fn from(e: railbench_sim_core::SimError) -> Self {
        use railbench_sim_core::SimError::*;
        match &e {
            InvalidConfig { .. } | ConfigFile { .. } => CliError::Data(e.to_string()),
            NoNeighbors | Invariant(_) => CliError::Internal(e.to_string()),
        }
    }
}

impl From<railbench_dataset::DatasetError> for CliError {
    fn from(e: railbench_dataset::DatasetError) -> Self {
        use railbench_dataset::DatasetError::*;
        match &e {
            InvalidGrid(_) | Config(_) | Io { .. } | Parse { .. } => CliError::Data(e.to_string()),
            // an invalid per-cell config is bad user input, not a bug
            Simulation { source, .. } => match source {
                railbench_sim_core::SimError::InvalidConfig { .. } => {
                    CliError::Data(e.to_string())
                }
                _ => CliError::Internal(e.to_string()),
            },
        }
    }
}

impl From<railbench_pipeline::PipelineError> for CliError {
    fn from(e: railbench_pipeline::PipelineError) -> Self {
        use railbench_pipeline::PipelineError::*;
        match &e {
            BadFoldCount { .. } | Empty(_) | LengthMismatch(_) => CliError::Data(e.to_string()),
            Model(_) | AllCandidatesFailed(_) | Serialization(_) => {
                CliError::Internal(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}
