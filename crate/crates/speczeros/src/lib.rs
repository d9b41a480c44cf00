//! Detection, counting and reconstruction of signals from the zeros of
//! Gaussian-window spectrograms.
//!
//! White Gaussian noise fills the time-frequency plane with a rigid,
//! hyperuniform pattern of spectrogram zeros; an additive signal pushes the
//! zeros out of its time-frequency support and leaves a hole. This crate
//! turns that observation into a statistical pipeline:
//!
//! * [`signal`] — signals, the Gaussian-window STFT, spectrogram zeros,
//!   white-noise generation, synthetic test signals and quality metrics.
//! * [`tda`] — alpha-complex filtration over the zero set, persistence
//!   diagrams, the persistence tree, minimum and stable volumes.
//! * [`stats`] — Monte Carlo reference distributions, empirical p-values,
//!   simultaneous/sequential multiple tests, hole-count estimation and the
//!   accumulated-persistence envelope test.
//! * [`reconstruct`] — signal-domain masks and the masked inverse STFT.
//! * [`pipeline`] — glue running a signal end to end through the stages.

pub mod pipeline;
pub mod reconstruct;
pub mod signal;
pub mod stats;
pub mod tda;

use thiserror::Error;

/// Error taxonomy shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Geometric input too degenerate to process (e.g. fewer than 3 points).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    /// An internal structural invariant does not hold for the given input.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    /// I/O failure, wrapped with the operation that caused it.
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    /// Failure inside a named pipeline stage.
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::DegenerateInput(msg.into())
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// Wrap the error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Extension adding stage labels to results bubbling out of pipeline stages.
pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.in_stage(stage))
    }
}
