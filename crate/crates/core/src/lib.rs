//! Exact arithmetic for linear cellular automata (LCA) over `Z_m^n` and
//! linear higher-order cellular automata (HOCA) over `Z_m`.
//!
//! A rule is represented by its finite formal power series: an `n x n`
//! matrix of Laurent polynomials over `Z_m`. One step of the dynamics is
//! multiplication of the configuration polynomial vector by that matrix.
//! On top of the representation sit the decision procedures for
//! sensitivity/equicontinuity (via the companion-form degree calculus) and
//! injectivity/surjectivity (via the determinant), each backed by an
//! independent brute-force oracle.
//!
//! All arithmetic is exact: residues are canonical in `[0, m)`, speeds are
//! reduced fractions, distances are dyadic pairs. No floating point.

pub mod decide;
pub mod dynamics;
pub mod laurent;
pub mod lmatrix;
pub mod models;
pub mod modring;
pub mod oracle;
pub mod sample;

pub use laurent::{DegreeReport, DegreeSide, LaurentPoly};
pub use lmatrix::{FrobeniusSpec, LaurentMatrix, SpeedTable};
pub use models::{HocaRule, LcaRule, PnuCaRule};
