//! Numerical engines for sublinear expectations.
//!
//! Everything here is built on one representation choice: a sublinear
//! expectation is the maximum of finitely many discrete linear
//! expectations, so every evaluation is exact and every supremum is
//! attained. On top of that sit the covariance and mean ambiguity sets
//! with their support functions and Hausdorff metric, monotone explicit
//! finite-difference solvers for the two limiting laws, and an exact
//! backward dynamic program for expectations of normalized sums of
//! sequentially independent steps.
//!
//! All types are immutable after construction and all operations are pure
//! functions of their inputs; nothing here touches global state, so
//! everything is safe to call concurrently.

pub mod ambiguity;
pub mod clt;
pub mod error;
pub mod matrices;
pub mod pde;
pub mod scenario;
pub mod testfn;

pub use ambiguity::{
    cesaro_limit_zero, check_condition_iv, g_from_scenarios, hausdorff, hausdorff_interval,
    lipschitz_bound_check, point_to_hull_distance, random_unit_matrices, uniform_gap_on_unit_ball,
    CesaroTrace, CovariancePolytope, DecaySchedule,
};
pub use clt::{
    clt_convergence_experiment, enumerate_oracle, evaluate_sum_expectation, independence_product,
    lln_convergence_experiment, validate_hypotheses, Builder, ConvergenceRow, ConvergenceTable,
    DpMode, DpPolicy, DpValue, HypothesisProbes, HypothesisReport, LimitLaw, Mode, Scaling,
    SequenceSpec,
};
pub use error::{Error, Result};
pub use matrices::SymMatrix;
pub use pde::{
    gnormal_expectation, hopf_lax_value, maximal_expectation, solve_gheat_1d, solve_gheat_2d,
    solve_maximal_pde_1d, solve_maximal_pde_2d, Grid1D, Grid2D, GridResolution, MaximalValue,
    MeanPolytope, PdeSolution,
};
pub use scenario::{AxiomProbe, AxiomReport, DiscreteDistribution, ScenarioSet};
pub use testfn::{Catalog, TestFunction};
