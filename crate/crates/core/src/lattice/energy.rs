use super::medium::{Cell, MediumSpec};
use super::set::{check_same_epsilon, CellRect, LatticeSet};
use crate::error::{Error, Result};
use crate::numeric::Rational;

const NEIGHBOURS: [Cell; 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Boundary bond counts `(α-bonds, β-bonds)` of a cell set.
pub fn boundary_bonds(spec: &MediumSpec, set: &LatticeSet) -> (u64, u64) {
    let (mut na, mut nb) = (0, 0);
    for &c in set.cells() {
        for (dx, dy) in NEIGHBOURS {
            let n = (c.0 + dx, c.1 + dy);
            if !set.contains(n) {
                if spec.is_beta_bond(c, n) {
                    nb += 1;
                } else {
                    na += 1;
                }
            }
        }
    }
    (na, nb)
}

/// Boundary bond counts `(α-bonds, β-bonds)` of a rectangle, in `O(perimeter)`.
pub fn rect_boundary_bonds(spec: &MediumSpec, r: &CellRect) -> (i64, i64) {
    let mut nb = 0;
    for y in r.y_min..=r.y_max {
        nb += spec.is_beta_bond((r.x_min - 1, y), (r.x_min, y)) as i64;
        nb += spec.is_beta_bond((r.x_max, y), (r.x_max + 1, y)) as i64;
    }
    for x in r.x_min..=r.x_max {
        nb += spec.is_beta_bond((x, r.y_min - 1), (x, r.y_min)) as i64;
        nb += spec.is_beta_bond((x, r.y_max), (x, r.y_max + 1)) as i64;
    }
    (2 * (r.width() + r.height()) - nb, nb)
}

fn weighted_bonds(spec: &MediumSpec, na: i64, nb: i64) -> Rational {
    spec.alpha() * na + spec.beta() * nb
}

/// `ε Σ c_ij` over bonds with one end in the set and one outside.
pub fn perimeter_energy(spec: &MediumSpec, set: &LatticeSet) -> Rational {
    let (na, nb) = boundary_bonds(spec, set);
    weighted_bonds(spec, na as i64, nb as i64) * set.epsilon()
}

/// Perimeter energy of a rectangle at scale `epsilon`.
pub fn rect_perimeter_energy(spec: &MediumSpec, r: &CellRect, epsilon: &Rational) -> Rational {
    let (na, nb) = rect_boundary_bonds(spec, r);
    weighted_bonds(spec, na, nb) * epsilon
}

/// Discrete ℓ∞ distance, in cells, from `cell` to the boundary of `reference`:
/// the chessboard distance to the nearest cell on the other side. `None` only
/// for a cell outside an empty reference.
pub fn cell_distance(reference: &LatticeSet, cell: Cell) -> Option<i64> {
    let inside = reference.contains(cell);
    if !inside && reference.is_empty() {
        return None;
    }
    let (cx, cy) = cell;
    for r in 1i64.. {
        let differs = |c: Cell| reference.contains(c) != inside;
        for t in -r..=r {
            if differs((cx + t, cy - r))
                || differs((cx + t, cy + r))
                || differs((cx - r, cy + t))
                || differs((cx + r, cy + t))
            {
                return Some(r);
            }
        }
    }
    unreachable!()
}

/// `(1/τ) ∫_{A △ B} d∞^ε(x, ∂A) dx` with `A = reference`, `B = candidate`.
pub fn dissipation(reference: &LatticeSet, candidate: &LatticeSet, tau: &Rational) -> Result<Rational> {
    check_same_epsilon(reference, candidate)?;
    if !tau.is_positive() {
        return Err(Error::InvalidArgument(format!("tau must be positive, got {tau}")));
    }
    let mut sum: i64 = 0;
    let sym = reference.cells().symmetric_difference(candidate.cells());
    for &c in sym {
        let d = cell_distance(reference, c).ok_or_else(|| {
            Error::InvalidArgument("distance to the boundary of an empty set is undefined".into())
        })?;
        sum += d;
    }
    let eps = reference.epsilon();
    Ok(eps * eps * eps * sum / tau)
}

/// `F(candidate, previous) = P(candidate) + dissipation(previous, candidate)`.
pub fn total_functional(
    spec: &MediumSpec,
    candidate: &LatticeSet,
    previous: &LatticeSet,
    tau: &Rational,
) -> Result<Rational> {
    Ok(perimeter_energy(spec, candidate) + dissipation(previous, candidate, tau)?)
}

fn inside_distance(r: &CellRect, (x, y): Cell) -> i64 {
    (x - r.x_min + 1).min(r.x_max - x + 1).min(y - r.y_min + 1).min(r.y_max - y + 1)
}

fn outside_distance(r: &CellRect, (x, y): Cell) -> i64 {
    let dx = (r.x_min - x).max(x - r.x_max).max(0);
    let dy = (r.y_min - y).max(y - r.y_max).max(0);
    dx.max(dy)
}

/// `Σ d` in cells over `reference △ candidate` for two rectangles.
pub fn rect_dissipation_cells(reference: &CellRect, candidate: &CellRect) -> i64 {
    let mut sum = 0;
    for y in reference.y_min.min(candidate.y_min)..=reference.y_max.max(candidate.y_max) {
        let in_ref = reference.y_min <= y && y <= reference.y_max;
        let in_cand = candidate.y_min <= y && y <= candidate.y_max;
        if in_ref {
            for x in reference.x_min..=reference.x_max {
                if !(in_cand && candidate.x_min <= x && x <= candidate.x_max) {
                    sum += inside_distance(reference, (x, y));
                }
            }
        }
        if in_cand {
            for x in candidate.x_min..=candidate.x_max {
                if !(in_ref && reference.x_min <= x && x <= reference.x_max) {
                    sum += outside_distance(reference, (x, y));
                }
            }
        }
    }
    sum
}

/// [`total_functional`] for two rectangles at scale `epsilon`.
pub fn rect_total_functional(
    spec: &MediumSpec,
    candidate: &CellRect,
    previous: &CellRect,
    epsilon: &Rational,
    tau: &Rational,
) -> Rational {
    let d = rect_dissipation_cells(previous, candidate);
    rect_perimeter_energy(spec, candidate, epsilon) + epsilon * epsilon * epsilon * d / tau
}
