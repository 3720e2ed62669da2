//! Brute-force point counts of affine Springer fibers over `F_q`, by enumerating lattices.

pub mod count;
pub mod field;
pub mod gamma;
pub mod lattice;
pub mod search;
pub mod series;

pub use count::{enumerate_lattices, Oracle, OracleReport, Target, DEFAULT_BUDGET};
pub use field::Field;
pub use gamma::GammaMatrix;
pub use lattice::{canonicalize, OLattice};
pub use series::Laurent;
