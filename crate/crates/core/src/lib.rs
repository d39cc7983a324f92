//! Finite-dimensional C*-algebras, Hilbert C*-modules over them, and the
//! structure of orthogonality-preserving, C*-conformal and conformal module
//! operators.
//!
//! An algebra is a direct sum of full matrix blocks `A = ⊕ M_{n_m}(ℂ)`; a
//! module is a finite sum of central ideals `M = ⊕ q_i A`. Bounded A-linear
//! operators on such modules are stored as kernels of algebra elements, which
//! makes adjoints, Gram kernels, and operator norms exact linear algebra.
//! On top of that the crate decides, with certificates:
//!
//! - orthogonality preservation, via centrality of the Gram kernel, together
//!   with the multiplier `κ` satisfying `⟨Tx,Ty⟩ = κ⟨x,y⟩`;
//! - the scaled-isometry decomposition `T = λV` with central positive `λ`;
//! - C*-conformality and conformality, equivalent to `T = t·(isometry)` with
//!   a positive real scalar `t`.
//!
//! Each structural decision is paired with a definitional sampled oracle, and
//! the `lab` module reproduces the commutative grid experiments (the
//! multiplication operator that preserves orthogonality without being
//! conformal, and the phase-winding obstruction to polar decomposition in
//! `C([0,1])`).

pub mod algebra;
pub mod error;
pub mod json;
pub mod lab;
pub mod linalg;
pub mod module;
pub mod operator;
pub mod rng;
pub mod suite;
pub mod theorems;

pub use algebra::{AlgebraElement, AlgebraSignature, CentralElement, CentralProjection};
pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use module::{ModuleSignature, ModuleVector};
pub use operator::{GramKernel, ModuleOperator};
pub use theorems::{LambdaVDecomposition, OpCertificate};
