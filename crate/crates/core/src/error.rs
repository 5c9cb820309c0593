use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid tube: {0}")]
    InvalidTube(String),

    #[error("pattern count exceeds the cap of {cap}")]
    StateExplosion { cap: usize },

    #[error("Hamiltonian patterns span {components} strongly connected components, expected one")]
    ConjectureStructureViolation { components: usize },

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("no spectral-radius crossing found for f = {f}")]
    BracketFailure { f: f64 },

    #[error("search exceeded the cap of {cap} nodes")]
    ResourceCap { cap: u64 },

    #[error("polygon type undefined: {0}")]
    TypeUndefined(String),
}
