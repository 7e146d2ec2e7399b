//! Exact tools for Darboux integrability of planar polynomial systems.

pub mod cofactor;
pub mod elim;
pub mod gaussian;
pub mod linalg;
pub mod minpoly;
pub mod newton;
pub mod parse;
pub mod poly;
pub mod ratfunc;
pub mod ratint;
pub mod search;
pub mod series;
pub mod seriespoly;
pub mod sigma;
pub mod system;
pub mod unipoly;

pub use gaussian::GaussianRational;
pub use poly::{BivarPoly, Var};
pub use ratfunc::RationalFunction;
pub use system::PlanarSystem;
