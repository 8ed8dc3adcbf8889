//! Exact arithmetic shared by every other module.

mod congruence;
mod rational;

pub use congruence::{
    congruence_solution_by_totient, euler_totient, ext_gcd, gcd, min_congruence_solution,
};
pub use rational::{rational_floor, Rational};
