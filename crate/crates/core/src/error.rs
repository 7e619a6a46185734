use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("duplicate mode ({beam}, {polarization})")]
    DuplicateMode { beam: String, polarization: char },

    #[error("unknown mode ({beam}, {polarization})")]
    UnknownMode { beam: String, polarization: char },

    #[error("unknown beam `{0}`")]
    UnknownBeam(String),

    #[error("occupation has {found} modes but the registry has {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("states live on different mode registries")]
    RegistryMismatch,

    #[error("registries share the mode ({beam}, {polarization})")]
    OverlappingLabels { beam: String, polarization: char },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("state is not normalized (norm squared {0})")]
    NotNormalized(f64),

    #[error("mode index {index} out of range for {modes} modes")]
    ModeOutOfRange { index: usize, modes: usize },

    #[error("matrix is not unitary (residual {0:e})")]
    NotUnitary(f64),

    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },

    #[error("photon number mismatch: {input} in, {output} out")]
    PhotonNumberMismatch { input: u32, output: u32 },

    #[error("dense basis of {size} states exceeds the ceiling of {limit}")]
    BasisTooLarge { size: u128, limit: usize },

    #[error("term violates the one-photon-per-beam encoding: {0}")]
    QubitEncoding(String),

    #[error("mode `{beam}` carries photons but is absent from the target registry")]
    UnalignedMode { beam: String },

    #[error("circuit field `{field}`: {message}")]
    Circuit { field: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
