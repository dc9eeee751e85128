//! Operator-valued 2-inner products and frame machinery over
//! finite-dimensional C*-algebras.
//!
//! The crate builds up in layers:
//!
//! - [`algebra`]: diagonal, matrix, and spatial-tensor C*-algebras with
//!   involution, spectral norm, positivity, operator order, and inversion;
//! - [`hilbert_module`]: free modules A^m with the A-valued inner product,
//!   A-combinations, and A-independence;
//! - [`two_inner`]: the standard 2-inner product
//!   `<x,y|z> = <x,y><z,z> - <x,z><z,y>`, its axioms as executable checks,
//!   the Cauchy-Schwarz gap, and the induced 2-norm;
//! - [`quotient`]: the complement realization of the space obtained by
//!   modding out an associate direction;
//! - [`frames`]: 2-frames relative to an associate, with optimal bounds,
//!   analysis/synthesis/frame operators, and reconstruction;
//! - [`tensor`]: tensor products of modules and frames, with the factorized
//!   2-inner product and the Kronecker factorization of frame operators.
//!
//! Over a commutative algebra every computation decomposes over points, and
//! that pointwise strategy is the implementation backbone throughout. All
//! values are immutable after construction and all operations are pure
//! functions, so everything here is safe to evaluate in parallel across
//! independent inputs.
//!
//! Randomized checks ([`sample`], [`generate`]) draw from a seeded ChaCha8
//! stream and are bit-reproducible across platforms.

pub mod algebra;
pub mod error;
pub mod frames;
pub mod generate;
pub mod hilbert_module;
pub mod linalg;
pub mod quotient;
pub mod report;
pub mod sample;
pub mod tensor;
pub mod two_inner;

pub use algebra::{AlgebraDescriptor, AlgebraElement};
pub use error::{CoreError, Result};
pub use frames::{BoundsVerdict, BoundsWitness, FrameOperators, TwoFrame};
pub use hilbert_module::{ModuleFrame, ModuleVector};
pub use quotient::QuotientSpace;
pub use report::{AxiomRecord, AxiomReport, AxiomWitness};
pub use tensor::{TensorAssociate, TensorCheckReport, TensorFrame};
pub use two_inner::TwoInnerSpace;
