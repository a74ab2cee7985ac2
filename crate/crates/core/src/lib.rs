//! Exact enumeration of genus-g tropical curves on polarized tropical
//! abelian varieties of dimension g = 2, 3.
//!
//! The count of curves in the linear system of a polarization `c_L` of type
//! `(d_1, ..., d_g)` is `n^2 * nu(dual type)` with `n = d_1 * ... * d_g`. This
//! crate computes it both from that closed form and by enumerating the
//! lattice factorizations `X -> I -> Lambda` of the dual polarization, each
//! weighted by its lifting multiplicity. Everything is exact: integers are
//! arbitrary precision and real lattice data lives in `Q(sqrt(D))`.

#![allow(clippy::needless_range_loop)]

pub mod abelian;
pub mod arith;
pub mod count;
pub mod error;
pub mod field;
pub mod field_matrix;
pub mod graph;
pub mod json;
pub mod matrix;
pub mod normal_form;
pub mod oracle;
pub mod theta;
pub mod tori;

pub use abelian::{
    dual_type, enumerate_subgroups, hom_sym_bruteforce, hom_sym_count, normalize_type, nu,
    nu_dagger, nu_direct, AbelianType, SubgroupRep, DEFAULT_BUDGET,
};
pub use error::{Error, Result};
pub use field::FieldScalar;
pub use field_matrix::{is_positive_definite, FieldMatrix};
pub use matrix::IntMatrix;
pub use normal_form::{cokernel_invariants, hnf, snf, SnfResult};
