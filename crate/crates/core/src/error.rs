//! Error type shared by the whole pipeline.

use thiserror::Error;

/// Errors produced by loop arithmetic, factorization and the surface pipeline.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Coefficients discarded by truncation carry too much mass.
    #[error("tail overflow: discarded relative coefficient mass {mass:.3e} exceeds tolerance {tol:.1e} in {context}")]
    TailOverflow { mass: f64, tol: f64, context: &'static str },

    /// A loop cannot be inverted because its determinant degenerates on the grid.
    #[error("singular loop: |det| = {min_abs_det:.3e} at a sample point")]
    SingularLoop { min_abs_det: f64 },

    /// The block-Toeplitz system of the Birkhoff factorization is numerically singular.
    #[error("outside the Birkhoff big cell: condition estimate {cond:.3e} exceeds 1e12")]
    OutsideBigCell { cond: f64 },

    /// The Iwasawa factorization sits on the boundary between the two cells.
    #[error("Iwasawa boundary cell: |B11| = {b11_abs:.3e} below the cell threshold")]
    BoundaryCell { b11_abs: f64 },

    /// The diagonal Birkhoff middle term failed its reality check.
    #[error("middle term not real: |Im b| = {im:.3e}")]
    NonRealMiddle { im: f64 },

    /// A frame was passed with a cell tag inconsistent with its origin.
    #[error("cell mismatch: caller claims {claimed}, frame came from {actual}")]
    CellMismatch { claimed: &'static str, actual: &'static str },

    /// Degree-one potentials require a ≠ 0 (immersion condition).
    #[error("degree-one potential with a = 0 is not an immersion datum")]
    ZeroA,

    /// An eigenvector of D(1) is null for the indefinite form; no diagonalizer exists.
    #[error("sigma3-null eigenvector: det D(1) = {det:.3e} is not positive")]
    NullEigenvector { det: f64 },

    /// Monodromy eigenvalues left the unit circle.
    #[error("non-unimodular monodromy: eigenvalue modulus deviates by {deviation:.3e}")]
    NonUnimodularMonodromy { deviation: f64 },

    /// The support function vanishes: the surface is vertical at the sample.
    #[error("vertical point: support h = {h:.3e} at z = {z_re}+{z_im}i")]
    VerticalPoint { h: f64, z_re: f64, z_im: f64 },

    /// The induced metric degenerates (non-immersed sample).
    #[error("degenerate metric at a sample (gram determinant {gram:.3e})")]
    DegenerateMetric { gram: f64 },

    /// Isometry decomposition needs a nontrivial rotation part.
    #[error("no rotation part: angle {q} is a multiple of 2π, decomposition undefined")]
    NoRotationPart { q: f64 },

    /// Adaptive integration could not meet the tolerance.
    #[error("step underflow during integration near z = {z_re}+{z_im}i")]
    StepUnderflow { z_re: f64, z_im: f64 },

    /// Helicoidal parameters degenerate (ℓ out of the open interval (0, 2)).
    #[error("degenerate rotation rate ℓ = {ell:.6e}: helicoidal closed forms need 0 < ℓ < 2")]
    DegenerateEll { ell: f64 },

    /// The helicoidal axis formula has a pole at b = −1.
    #[error("axis formula pole: b = -1")]
    PoleAtMinusOne,

    /// Configuration / input file problem (CLI layer).
    #[error("config error: {0}")]
    Config(String),

    /// Numeric failure with the failing operation named (CLI layer).
    #[error("numeric failure in {op}: {message}")]
    Numeric { op: &'static str, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
