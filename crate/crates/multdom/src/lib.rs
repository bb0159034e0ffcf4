//! Analysis of quantum channels on the algebra of d×d complex matrices.
//!
//! A channel is given by Kraus operators `{a_j}` acting as
//! `E(x) = Σ_j a_j x a_j*`. For unital trace-preserving channels this crate
//! computes the multiplicative domain `M_E` (the largest subalgebra on which
//! the channel is a homomorphism), the decreasing chain `M_E ⊇ M_{E²} ⊇ …`,
//! the multiplicative index κ at which the chain stabilises, the stabilising
//! algebra `M_{E^∞}` together with a verification that the channel restricts
//! to a *-automorphism there, peripheral spectra, irreducibility and
//! primitivity verdicts, and the unitarily-correctable / noiseless code
//! structure that falls out of the Wedderburn decomposition of those
//! algebras.
//!
//! All numerics are dense and self-contained: matrices are `CMatrix<T>` with
//! `Complex<T>` entries, generic over the real scalar `T` (f32 or f64) via
//! [`Real`]. Concrete `f64` aliases are exported at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

pub mod algebra;
pub mod analysis;
pub mod builders;
pub mod channel;
pub mod domain;
pub mod linalg;
pub mod qec;
pub mod spectral;
pub mod ucp;

pub use algebra::{OperatorSubspace, StarAlgebraStructure};
pub use analysis::AnalysisReport;
pub use builders::ChannelSpec;
pub use channel::{ChoiMatrix, KrausChannel, Superoperator};
pub use domain::MultChainResult;
pub use linalg::{CMatrix, Tolerance};
pub use spectral::PeripheralData;

/// Real scalar underlying the complex matrix entries.
///
/// Implemented for `f32` and `f64`; all core computations are generic over
/// this trait so the same code path backs both precisions.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
}

/// Complex scalar over a generic real type.
pub type C<T> = num_complex::Complex<T>;

/// Double-precision complex scalar.
pub type C64 = num_complex::Complex<f64>;
/// Double-precision complex matrix.
pub type CMatrix64 = CMatrix<f64>;
/// Double-precision Kraus channel.
pub type KrausChannel64 = KrausChannel<f64>;
/// Double-precision tolerance bundle.
pub type Tolerance64 = Tolerance<f64>;

/// Errors reported by the analysis pipeline.
///
/// `Precondition`/`Shape`/`NotCompletelyPositive` flag bad inputs;
/// `Numeric` flags an iteration that failed to converge; `Consistency`
/// flags a violated internal cross-check (two theorems computing the same
/// object disagreed beyond tolerance).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("map is not completely positive: {0}")]
    NotCompletelyPositive(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
