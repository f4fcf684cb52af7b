//! Exact symbolic algebra on a uniform orthogonal lattice.
//!
//! [`DiffPoly`] is the universal object: schemes, densities, fluxes and
//! multipliers are all polynomials in grid values `U[k,l]` with
//! coefficients in `Q[t, x, h^{+-1}, tau^{+-1}]`.

use thiserror::Error;

pub mod density_flux;
pub mod jet;
pub mod linalg;
pub mod multipliers;
pub mod notation;
pub mod ops;
pub mod poly;
pub mod sexp;
pub mod var;

pub use density_flux::{find_density_flux, DegreeBounds};
pub use jet::{
    consistency_report, linear_wave_target, nonlinear_wave_target, taylor_expand, taylor_leading,
    ConsistencyReport, JetMonomial, JetPoly,
};
pub use multipliers::{
    find_multipliers, multiplier_space, in_span, pin_by_consistency, same_span, solve_scheme_coefficients,
    span_admits_limit,
    AnsatzSpec, MultiplierSpace, PinnedScheme,
};
pub use ops::{diff_op, euler_op, is_divergence, shift, Dir};
pub use poly::{int, rat, DiffPoly, Rational};
pub use var::{Monomial, Var, DEFAULT_WINDOW};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("grid offset ({k},{l}) leaves the stencil window |k|,|l| <= {window}")]
    WindowOverflow { k: i32, l: i32, window: i32 },
    #[error("cannot substitute for {0}: it appears with a negative exponent")]
    NegativeSubstitution(String),
    #[error("ansatz basis is linearly dependent (rank {rank} < {len})")]
    DependentAnsatz { rank: usize, len: usize },
    #[error("inconsistent scheme: negative-degree terms survive: {0}")]
    Inconsistent(String),
    #[error("no density/flux pair within the given bounds; raise the degree or window bounds")]
    Infeasible,
    #[error("expression is not a divergence (Euler operator image is nonzero)")]
    NotDivergence,
    #[error("auxiliary symbols are not supported here")]
    AuxUnsupported,
    #[error("multiplier {0} failed post-hoc verification")]
    Verification(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}
