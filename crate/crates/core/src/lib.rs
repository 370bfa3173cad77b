//! Exact noncommutative rank of linear symbolic matrices
//! `A = A₁x₁ + ⋯ + A_m x_m` over GF(p).
//!
//! The rank is found by a splitting proximal point method on the orthoscheme
//! complex of the subspace lattice, certified from below by random blow-up
//! substitutions. Integer instances are tested for nc-singularity by a
//! p-adic descent that repeatedly solves the problem for the leading matrix
//! modulo p.

pub mod arith;
pub mod bilinear;
pub mod cli;
pub mod frames;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod orthoscheme;
pub mod sppa;
pub mod valdet;

pub use arith::{Gfp, Prime};
pub use bilinear::{SymbolicMatrix, VanishingPair};
pub use linalg::{CoSubspace, Matrix, Subspace};
pub use sppa::{sppa_run, SolverConfig, SolverState};
