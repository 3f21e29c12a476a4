//! Error taxonomy for the whole pipeline.
//!
//! Variants are grouped by the exit codes the CLI maps them to:
//! model-invalid (1), numeric failure (2), internal disagreement (3).

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // -- model-invalid -------------------------------------------------
    #[error("model document violates the schema: {0}")]
    Schema(String),

    #[error("A0 is not Hermitian (residual {residual:.3e} above tolerance)")]
    NonHermitianA0 { residual: f64 },

    #[error("symmetry matrix is not unitary (residual {residual:.3e})")]
    NonUnitarySymmetry { residual: f64 },

    #[error("symmetric models require even fiber dimension, got N = {n}")]
    OddDimensionWithSymmetry { n: usize },

    #[error("hopping {name} is {rows}x{cols}, expected {n}x{n}")]
    HoppingDimensionMismatch {
        name: String,
        rows: usize,
        cols: usize,
        n: usize,
    },

    #[error("hopping list is empty")]
    EmptyHoppings,

    #[error("model has no symmetry descriptor but one is required")]
    MissingSymmetry,

    #[error("symmetry anticommutation fails on the validation grid (residual {residual:.3e})")]
    SymmetryViolation { residual: f64 },

    #[error("not an insulator: |E| = {min_abs:.3e} at k = {k:.6} is below the gap threshold")]
    NotAnInsulator { k: f64, min_abs: f64 },

    #[error("gapless parameters: {0}")]
    GaplessParameters(String),

    #[error("truncated chain needs at least {min} cells, got {cells}")]
    ChainTooShort { cells: usize, min: usize },

    // -- numeric failure ----------------------------------------------
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal {off_norm:.3e})")]
    EigenConvergence { sweeps: usize, off_norm: f64 },

    #[error("eigenvalue {eigenvalue:.3e} at k = {k:.6} lies inside the gap tolerance band")]
    AmbiguousProjection { k: f64, eigenvalue: f64 },

    #[error("resolvent is near-singular on the contour (|z - E| below margin at angle {theta:.4})")]
    ContourNearSingular { theta: f64 },

    #[error("Riesz quadrature needs at least 32 points, got {points}")]
    InvalidQuadrature { points: usize },

    #[error("projector distance {distance:.4} >= 1: Kato-Nagy unitary undefined, refine the path")]
    ProjectorDistance { distance: f64 },

    #[error("transport did not converge: intertwining residual {residual:.3e}; refine the grid")]
    TransportNonConvergence { residual: f64 },

    #[error("frame quality: periodicity residual {residual:.3e} exceeds threshold")]
    FrameQuality { residual: f64 },

    #[error("Berry phase {value:.6} is {residual:.3e} from the nearest integer; frame is broken")]
    BerryResolution { value: f64, residual: f64 },

    #[error("gauge is not block-diagonal for the frame (residual {residual:.3e})")]
    GaugeBlockStructure { residual: f64 },

    #[error("gauge and frame grids are incompatible")]
    GaugeGridMismatch,

    #[error("grid size {got} is invalid: {reason}")]
    GridSize { got: usize, reason: &'static str },

    #[error("adjacent phase step {step:.4} rad risks aliasing; refine the sampling")]
    WindingAliasing { step: f64 },

    #[error("loop value at sample {index} is zero (or below the modulus floor)")]
    WindingZero { index: usize },

    #[error("loop endpoints differ by {gap:.3e}: not a closed loop")]
    LoopNotClosed { gap: f64 },

    #[error("homotopy failed at t = {t:.4}: {source}")]
    HomotopyFailure {
        t: f64,
        #[source]
        source: Box<Error>,
    },

    // -- internal disagreement -----------------------------------------
    #[error(
        "invariant pathways disagree: berry = {berry}, transport = {transport}, \
         winding = {winding}; refusing to vote"
    )]
    PathwayDisagreement {
        berry: i64,
        transport: i64,
        winding: i64,
    },
}

impl Error {
    /// Exit code the CLI maps this error to: 1 model-invalid, 2 numeric
    /// failure, 3 internal disagreement.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            Schema(_)
            | NonHermitianA0 { .. }
            | NonUnitarySymmetry { .. }
            | OddDimensionWithSymmetry { .. }
            | HoppingDimensionMismatch { .. }
            | EmptyHoppings
            | MissingSymmetry
            | SymmetryViolation { .. }
            | NotAnInsulator { .. }
            | GaplessParameters(_)
            | ChainTooShort { .. } => 1,
            PathwayDisagreement { .. } => 3,
            HomotopyFailure { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}
