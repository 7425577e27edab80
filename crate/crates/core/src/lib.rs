//! Exact computations in exterior algebras over `Q` and prime fields:
//! wedge products, annihilators, minimal free resolutions, Betti tables and
//! regularity lower bounds.
//!
//! The algebra is generic over the coefficient type ([`Scalar`]); the
//! aliases below fix it to the two supported fields.

pub mod cli;
pub mod exactla;
pub mod extcore;
pub mod grmod;
pub mod peeva;
pub mod scalars;

pub use exactla::{in_span, kernel_basis, rank, rref, EchelonBasis, Matrix, Rref};
pub use extcore::{basis, wedge_monomials, AlgebraContext, Element, Monomial};
pub use grmod::{
    annihilator, betti_table, minimal_generators, mult_map_matrix, resolve, resolve_bounded,
    syzygy_step, BettiTable, Degree, FreeModule, GradedSubmodule, ModuleMap, Resolution,
    DENSE_COLUMN_BUDGET,
};
pub use scalars::{FieldSpec, Fp, Rational, Scalar};

/// Elements with rational coefficients.
pub type RationalElement = Element<Rational>;
/// Elements with coefficients in a prime field.
pub type FpElement = Element<Fp>;
pub type RationalMatrix = Matrix<Rational>;
pub type FpMatrix = Matrix<Fp>;
pub type RationalModuleMap = ModuleMap<Rational>;
pub type FpModuleMap = ModuleMap<Fp>;
