//! Newton strata of affine Deligne-Lusztig varieties for split `GL_n`.
//!
//! The crate covers type `A` Weyl groups and their extended affine
//! counterparts, the quantum Bruhat graph, the poset of isocrystal classes,
//! a search for elements whose Newton strata fail to be equidimensional,
//! and a Monte-Carlo estimator of generic Newton points over `F_p((t))`.

pub mod affine;
pub mod error;
pub mod isocrystal;
pub mod newton;
pub mod qbg;
pub mod strata;
pub mod weyl;

use num_bigint::BigInt;
use num_rational::Ratio;

pub use affine::{AffineElement, NormalForm, Side};
pub use error::{Error, Result};
pub use qbg::{EdgeKind, QuantumBruhatGraph};
pub use weyl::{CartanData, CartanType, Coweight, DiagramAutomorphism, PositiveRoot, WeylElement};

/// Exact rational with arbitrary-precision parts.
pub type Rational = Ratio<BigInt>;
pub type NewtonPoint = newton::NewtonPoint<BigInt>;
pub type IsoClass = newton::IsoClass<BigInt>;
pub type Chain = newton::Chain<BigInt>;

/// Machine-integer variants for small ranks and small translations.
pub type NewtonPoint64 = newton::NewtonPoint<i64>;
pub type IsoClass64 = newton::IsoClass<i64>;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
