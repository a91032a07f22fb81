//! Discretized fractional maximal operators on uniform grids.
//!
//! The crate works on boxes in one or two dimensions sampled at cell
//! centers. It provides:
//!
//! * [`grid`]: domains, grid functions, cubes, cube families, quadrature
//!   and a corpus of test symbols, plus the `GFN1` binary and CSV formats.
//! * [`maxop`]: the fractional maximal operator `M_γ`, its localized form
//!   `M_{γ,Q₀}`, the maximal commutator `M_{γ,b}` and the nonlinear
//!   commutator `[b, M_γ]`.
//! * [`varlex`]: variable exponents, the modular and the Luxemburg norm.
//! * [`oscfun`]: mean-oscillation seminorms and the commutator
//!   characterization functionals, with per-cube identity checks.
//! * [`verify`]: scaling studies, discrimination verdicts and the TOML
//!   driven check suite.
//!
//! All numerical code is generic over [`Real`]; the `*64` aliases below fix
//! the scalar to `f64`, which is what the file formats and the CLI use.

pub mod error;
pub mod grid;
pub mod maxop;
pub mod oscfun;
pub mod report;
pub mod scalar;
pub mod varlex;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{Cube, CubeFamily, Domain, GridFunction, ScalePolicy, Symbol};
pub use maxop::{CommutatorMode, FracParams};
pub use oscfun::{OscFunctionalSpec, OscKind, SExponent, SupReport};
pub use report::CheckReport;
pub use scalar::Real;
pub use varlex::{Exponent, NormResult};

pub type Domain64 = Domain<f64>;
pub type GridFunction64 = GridFunction<f64>;
pub type FracParams64 = FracParams<f64>;
pub type Exponent64 = Exponent<f64>;
pub type NormResult64 = NormResult<f64>;
pub type OscFunctionalSpec64 = OscFunctionalSpec<f64>;
pub type SExponent64 = SExponent<f64>;
pub type SupReport64 = SupReport<f64>;

pub type Domain32 = Domain<f32>;
pub type GridFunction32 = GridFunction<f32>;
pub type Exponent32 = Exponent<f32>;
