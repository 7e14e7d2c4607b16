use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("kappa = {kappa} rad/s is inconsistent with n_roundtrips = {n_roundtrips} (c/(2 L N_rt) = {implied} rad/s, relative mismatch {mismatch:.3e})")]
    InconsistentCavity {
        kappa: f64,
        n_roundtrips: f64,
        implied: f64,
        mismatch: f64,
    },

    #[error("polygon loop needs at least 3 kicks, got {0}")]
    TooFewKicks(u32),

    #[error("Fock cutoff {cutoff} misses Poisson mass {missing:.3e} at N_p = {n_photons}; cutoff {required} is required")]
    CutoffTooSmall {
        cutoff: u64,
        required: u64,
        n_photons: f64,
        missing: f64,
    },

    #[error("trajectory has {per_period:.1} samples per mechanical period, at least {minimum} are required")]
    Undersampled { per_period: f64, minimum: usize },

    #[error("trajectory samples must be uniformly spaced and strictly increasing in time (sample {index})")]
    BadTimeGrid { index: usize },

    #[error("config line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error("malformed sweep data: {0}")]
    Decode(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
