use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::Rational;

/// A lattice site `(i₁, i₂) ∈ ℤ²`.
pub type Cell = (i64, i64);

/// Periodic two-phase bond medium.
///
/// Strong bonds (coefficient `beta`) fill `n_beta × n_beta` squares repeated
/// with period `n_alpha + n_beta` in both directions; every other
/// nearest-neighbour bond has coefficient `alpha`. `n_beta = 0` is the
/// homogeneous medium.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MediumSpec {
    alpha: Rational,
    beta: Rational,
    n_alpha: i64,
    n_beta: i64,
}

impl MediumSpec {
    pub fn new(alpha: Rational, beta: Rational, n_alpha: i64, n_beta: i64) -> Result<Self> {
        if !alpha.is_positive() {
            return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
        }
        if n_alpha < 1 {
            return Err(Error::InvalidArgument(format!("n_alpha must be ≥ 1, got {n_alpha}")));
        }
        if n_beta < 0 {
            return Err(Error::InvalidArgument(format!("n_beta must be ≥ 0, got {n_beta}")));
        }
        if n_beta > 0 && beta <= alpha {
            return Err(Error::InvalidArgument(format!(
                "need 0 < alpha < beta, got alpha = {alpha}, beta = {beta}"
            )));
        }
        if !beta.is_positive() {
            return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
        }
        Ok(MediumSpec { alpha, beta, n_alpha, n_beta })
    }

    /// The homogeneous medium: every bond has coefficient `alpha`.
    pub fn homogeneous(alpha: Rational) -> Result<Self> {
        Self::new(alpha.clone(), alpha, 1, 0)
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    pub fn n_alpha(&self) -> i64 {
        self.n_alpha
    }

    pub fn n_beta(&self) -> i64 {
        self.n_beta
    }

    /// `N_αβ = N_α + N_β`.
    pub fn period(&self) -> i64 {
        self.n_alpha + self.n_beta
    }

    pub fn is_homogeneous(&self) -> bool {
        self.n_beta == 0
    }

    /// Same medium with a different strong-bond coefficient.
    pub fn with_beta(&self, beta: Rational) -> Result<Self> {
        Self::new(self.alpha.clone(), beta, self.n_alpha, self.n_beta)
    }

    /// Whether `x` reduces into the residue set `{0, …, N_α − 1}` mod `N_αβ`.
    pub fn is_alpha_residue(&self, x: i64) -> bool {
        x.rem_euclid(self.period()) < self.n_alpha
    }

    /// True when the bond `{i, j}` is a β-bond. Panics if `i`, `j` are not neighbours.
    pub(crate) fn is_beta_bond(&self, i: Cell, j: Cell) -> bool {
        debug_assert!((i.0 - j.0).abs() + (i.1 - j.1).abs() == 1);
        if self.n_beta == 0 {
            return false;
        }
        // Doubled midpoint coordinates, reduced into [0, 2 N_αβ).
        let two_period = 2 * self.period();
        let m1 = (i.0 + j.0).rem_euclid(two_period);
        let m2 = (i.1 + j.1).rem_euclid(two_period);
        m1 <= 2 * self.n_beta && m2 <= 2 * self.n_beta
    }

    pub(crate) fn coefficient(&self, beta_bond: bool) -> &Rational {
        if beta_bond {
            &self.beta
        } else {
            &self.alpha
        }
    }
}

/// Coefficient `c_ij` of the nearest-neighbour bond between `i` and `j`.
pub fn bond_coefficient(spec: &MediumSpec, i: Cell, j: Cell) -> Result<Rational> {
    let dist = (i.0 - j.0).abs() + (i.1 - j.1).abs();
    if dist != 1 {
        return Err(Error::InvalidArgument(format!(
            "cells {i:?} and {j:?} are not nearest neighbours"
        )));
    }
    Ok(spec.coefficient(spec.is_beta_bond(i, j)).clone())
}
