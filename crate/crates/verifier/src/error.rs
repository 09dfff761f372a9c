use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("state limit of {limit} exceeded with {frontier} states still queued")]
    StateLimit { limit: usize, frontier: usize },
    #[error("a transition changed the robot count from {before} to {after}")]
    Conservation { before: usize, after: usize },
    #[error("ring size {0} is outside the supported range 3..=64")]
    RingSize(usize),
}
