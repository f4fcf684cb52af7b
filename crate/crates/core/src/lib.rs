//! Discrete conservation laws of finite-difference wave-equation schemes.
//!
//! The symbolic half ([`stencil_algebra`], [`scheme_library`]) works with
//! exact rational polynomials on a uniform lattice; the numeric half
//! ([`solver`], [`audit`]) integrates the schemes in binary64 and measures
//! how well the discrete laws survive rounding.

pub mod stencil_algebra;
pub mod scheme_library;
pub mod numeric;
pub mod solver;
pub mod audit;
pub mod cli;
