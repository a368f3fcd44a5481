//! Upper bounds on the size of permutation codes under the Kendall tau
//! metric, from integer programs over coset actions of Young subgroups,
//! and nonexistence certificates for 1-perfect codes.

pub mod bounds;
pub mod error;
pub mod exec;
pub mod ilp;
pub mod irreps;
pub mod linalg;
pub mod perfect;
pub mod perm;
pub mod young;

pub use bounds::{
    brute_force_p, ilp_bound, prime_analytic_bound, sphere_packing_bound, tighten_code,
    trivial_values, verify_systemineq_properties, BoundKind, BoundMethod, BoundReport, CodeSet,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use ilp::{
    build_bound_problem, solve_ilp, solve_ilp_with, solve_lp_relaxation, Branching, IlpOptions,
    IlpProblem, IlpSolution, IlpStatus, LpSolution, NodeLp,
};
pub use irreps::{
    hook_length_dimension, irrep_generator_matrices, smallest_abs_eigenvalue, standard_tableaux,
    t_hat_irrep, Form, IrrepEvaluation, StandardTableau,
};
pub use perfect::{
    conjecture_check, modular_invertibility, nonexistence_by_coset_matrix,
    nonexistence_by_dominance, perfect_divisibility_test, verify, Certificate, PerfectOptions,
    Verdict,
};
pub use perm::{
    adjacent_generators, ball, ball_size, compose, inverse, kendall_distance, Ball, GeneratorSet,
    Permutation,
};
pub use young::{
    coset_action_matrix, coset_label, dominates, enumerate_cosets, is_tridiagonal_conjugate,
    CosetActionMatrix, CosetLabel, NumberPartition, YoungSubgroup,
};
