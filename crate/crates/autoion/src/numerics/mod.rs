//! Shared numerical machinery: small complex linear algebra, polynomial root
//! finding, the 4x4 eigen-solver and the closed-form characteristic quartic.

pub mod eigen;
pub mod linalg;
pub mod poly;
pub mod quartic;

pub use eigen::{characteristic_polynomial, eigen_system, EigenSystem};
pub use linalg::{Mat2, Mat2x4, Mat4, Mat4x2, Vec2, Vec4};
pub use poly::{roots, roots_with, ComplexPolynomial, Root, RootFinderConfig, RootSet};
pub use quartic::{eigenvalue_shift, quartic_coefficients};
