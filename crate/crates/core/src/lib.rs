//! Exact point counts of truncated affine Springer fibers for `gl_2` and `gl_3`,
//! weighted orbital integrals extracted from them, and a lattice-enumeration oracle.

pub mod closed_forms;
pub mod counting_engine;
pub mod element;
pub mod error;
pub mod geometry;
pub mod lattice_count;
pub mod moment_graph;
pub mod oracle;
pub mod polytopes;
pub mod qpoly;
pub mod root_data;

pub use closed_forms::{eval_formula, FormulaId, HessenbergCase, Params};
pub use counting_engine::{
    ak_count, arthur_j, hn_main_body_count, orbital_integral, solve_weighted_integral, tail_count, ArthurJ,
    CountRequest, FundamentalDomainTable,
};
pub use element::{CaseKind, Group, RegularElementSpec};
pub use error::{Error, Result};
pub use moment_graph::{formal_poincare, min_formal_poincare, poly_less, MomentGraph, OrientedOrder};
pub use oracle::{Oracle, OracleReport, Target};
pub use polytopes::{sigma_gamma, OrthogonalFamily, RegionPartition};

pub use qpoly::{APoly, QPoly, TPoly, TruncationQuasiPoly};
pub use root_data::{CoweightVector, LambdaElement, LeviSpec, ParabolicSpec, Rat, Root, RootDatum};
