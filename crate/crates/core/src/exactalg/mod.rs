//! Exact scalars and linear algebra over `ℚ(i)`, `ℚ(i)[ħ]` and `ℤ`.

mod hbarpoly;
mod integer;
mod matrix;
mod module;
mod scalar;

pub use hbarpoly::{smith_normal_form, HbarPoly, HbarPolyMatrix, SmithDecomposition};
pub use integer::{
    column_reduce, int_matrix, integer_alternating_divisors, integer_kernel, integer_smith_diagonal, ColumnReduction,
    IntMatrix,
};
pub use matrix::{solve_in_basis, span_basis, span_rank, subspace_quotient_dim, Matrix};
pub use module::{complex_cohomology_over_pid, CohomologyModule};
pub use scalar::{
    binom, binomial, factorial, format_rational, parse_rational, rat, rat_int, reduce_mod, GaussRat, HbarSeries,
    PiScalar, Rational,
};
