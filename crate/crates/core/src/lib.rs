//! Biquaternion matrix calculus on Minkowski space.
//!
//! The crate implements the 4x4 complex matrix representation of the
//! biquaternions (two commuting pure-vector copies `S` and `SBar` inside
//! `M4(C)`), the 16-matrix basis of `M4(C)` built from them, the closed-form
//! exponential and a constructive logarithm on `so(3,1)`, the
//! modulus-squared homomorphism onto real matrices (rotations, proper
//! Lorentz transformations, electromagnetic energy-momentum tensors), and
//! closed-form eigenvalue/eigenvector formulas for field tensors including
//! the Doppler factor relating the principal eigenvector seen by two
//! observers.
//!
//! On top of the fixed-size algebra sits [`bundle`], a numerical analyzer
//! for parameterized matrix fields: eigenvalue branch tracking along paths,
//! monodromy at loop closure, degeneracy-event detection, and discrete
//! line-bundle holonomy (sign holonomy for real symmetric fields, Berry
//! phase for complex ones).
//!
//! All types are immutable values and all operations are pure functions,
//! so everything is `Send + Sync` without synchronization.

pub mod alg_core;
pub mod bundle;
pub mod eigen;
pub mod error;
pub mod expmap;
pub mod mink;
pub mod modsq;
pub(crate) mod smallmat;

pub use alg_core::{Biquat, BasisDecomp, CMat4, Chirality, C64};
pub use error::Error;
pub use mink::{CVec4, EMField, RMat4, Vec4};

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
