use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Validation(String),

    #[error(transparent)]
    Core(#[from] ldm_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("replayed payload differs from the recorded one")]
    ReplayMismatch,
}

impl HarnessError {
    /// 2 for bad input (arguments, input files, unwritable outputs), 3 when a
    /// resource guard refused the run, 1 for a failed replay.
    pub fn exit_code(&self) -> u8 {
        use ldm_core::Error as E;
        match self {
            HarnessError::Core(
                E::BranchTreeTooLarge { .. }
                | E::FieldTooLarge { .. }
                | E::FloatRange { .. }
                | E::MemoryBudget { .. }
                | E::InstanceTooLarge { .. },
            ) => 3,
            HarnessError::ReplayMismatch => 1,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| HarnessError::Io { path, source }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(HarnessError::Validation(msg.into()))
}
