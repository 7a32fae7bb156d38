//! Constructive solution of the Cauchy problem for the Liouville equation
//! `(∂t² − ∂x²) F + (m²/2) e^F = 0`, with independent numerical checks.
//!
//! Data `(f1, f2)` produce two Schrödinger-type potentials. Their
//! fundamental solutions give four functions of one variable, and
//! `F(t, x) = −2 log |g1(x+t) g2(x−t) + g3(x+t) g4(x−t)| − 2 log(m/4)`.

pub mod faa_di_bruno;
pub mod fd_oracle;
pub mod liouville_map;
pub mod ode_fundamental;
pub mod seminorm_topology;
pub mod smooth_fn;
mod util;

pub use fd_oracle::{compare_and_order, fd_solve, FdError, GridField, Region};
pub use liouville_map::{
    build_quartet, compute_potentials, diagnostics, evaluate_solution, residual, restrict_initial,
    InitialData, JetField, MapError, PartialTable, PotentialPair, Quartet, SolutionField,
};
pub use ode_fundamental::{integrate_fundamental, FundamentalSolution, OdeError, ScaledReal};
pub use seminorm_topology::{
    convergence_study, seminorm_1d, seminorm_2d, GridSpec, SeminormError, SeminormIndex,
};
pub use smooth_fn::{parse_expression, ExprError, Jet, SmoothExpr};
