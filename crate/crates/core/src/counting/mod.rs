//! Exact counts of unit-sum equations in Farey fractions and their relatives.
//!
//! `L_n(H)` counts n-tuples over `F(H) ∩ [0, 1]` summing to 1, entries 0 and 1
//! included. Three independent algorithms compute it: a direct enumeration
//! oracle, the prefix-residual ("naive") method, and the admissible-denominator
//! ("fast") method. `S_n(H) = L_n(H)^n` because the row conditions of a
//! stochastic matrix are independent.

mod boxes;
mod constructions;
mod record;
mod unit_sum;

pub use boxes::{
    bound_ratio, BOUND_SEED,
    check_count_bound, count_n_brute, CoefficientVector, IntegerBox, BoundReport,
    BoundSample, BOUND_RATIO_CAP,
};
pub use constructions::{
    count_doubly_brute, doubly_lower_construction, doubly_lower_matrices,
    doubly_stochastic_matrices_brute, lower_bound_construction, lower_bound_solutions,
    row_choices, Matrix,
};
pub(crate) use boxes::{box_points, validate_instance};
pub use record::{CountRecord, Method, SolutionTuple};
pub use unit_sum::{
    count_l, count_l_brute, count_l_fast, count_l_naive, count_s, predicted_candidates,
    solutions_brute,
};
