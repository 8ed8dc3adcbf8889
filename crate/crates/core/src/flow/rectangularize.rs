//! Set moves that turn a protruded candidate into an α-type rectangle.
//!
//! A candidate is an α-type core with small protrusions sitting in the
//! β-squares along its sides. The moves are, in order: fill the maximal
//! α-type rectangle whose sides all meet the set, envelope or remove the
//! protrusion in each β-square along a side, remove everything outside the
//! core away from the corners, and finally clear the corners.

use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::{AlphaRectangle, Cell, CellRect, LatticeSet, MediumSpec, Side};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    AlphaFill,
    SquareProfile,
    TrimSides,
    TrimCorners,
}

impl Move {
    pub const ALL: [Move; 4] = [Move::AlphaFill, Move::SquareProfile, Move::TrimSides, Move::TrimCorners];

    pub fn as_str(&self) -> &'static str {
        match self {
            Move::AlphaFill => "alpha-fill",
            Move::SquareProfile => "square-profile",
            Move::TrimSides => "trim-sides",
            Move::TrimCorners => "trim-corners",
        }
    }
}

/// Lower-left cell of the β-square containing `cell`, if any.
///
/// A β-square is the block of `(N_β + 1)²` cells whose mutual bonds are all β-bonds.
pub fn beta_square_of(spec: &MediumSpec, (x, y): Cell) -> Option<Cell> {
    if spec.is_homogeneous() {
        return None;
    }
    let p = spec.period();
    let (rx, ry) = (x.rem_euclid(p), y.rem_euclid(p));
    (rx <= spec.n_beta() && ry <= spec.n_beta()).then(|| (x - rx, y - ry))
}

pub fn beta_square(spec: &MediumSpec, corner: Cell) -> CellRect {
    let nb = spec.n_beta();
    CellRect { x_min: corner.0, x_max: corner.0 + nb, y_min: corner.1, y_max: corner.1 + nb }
}

fn side_meets(set: &LatticeSet, r: &CellRect, side: Side) -> bool {
    let hits = |x: i64, y: i64| set.contains((x, y));
    match side {
        Side::Left => (r.y_min..=r.y_max).any(|y| hits(r.x_min, y)),
        Side::Right => (r.y_min..=r.y_max).any(|y| hits(r.x_max, y)),
        Side::Bottom => (r.x_min..=r.x_max).any(|x| hits(x, r.y_min)),
        Side::Top => (r.x_min..=r.x_max).any(|x| hits(x, r.y_max)),
    }
}

/// Largest α-type rectangle inside the bounding box of `set` whose four
/// sides all contain a cell of `set`.
///
/// A side line that misses the set cannot be the side of any such rectangle
/// with a shorter extent either, so pushing sides inward to the next
/// admissible position until all of them meet the set reaches the maximum.
pub fn maximal_alpha_rectangle(spec: &MediumSpec, set: &LatticeSet) -> Option<AlphaRectangle> {
    let mut r = set.bounding_box()?;
    let push = |r: &mut CellRect, side: Side| -> bool {
        loop {
            match r.moved_in(side, 1) {
                None => return false,
                Some(next) => *r = next,
            }
            if spec.is_alpha_residue(r.side_position(spec, side)) {
                return true;
            }
        }
    };
    for side in Side::ALL {
        if !spec.is_alpha_residue(r.side_position(spec, side)) && !push(&mut r, side) {
            return None;
        }
    }
    loop {
        let mut changed = false;
        for side in Side::ALL {
            if !side_meets(set, &r, side) {
                if !push(&mut r, side) {
                    return None;
                }
                changed = true;
            }
        }
        if !changed {
            return AlphaRectangle::new(spec, r).ok();
        }
    }
}

/// Union of `set` with its maximal α-type rectangle.
pub fn alpha_fill(spec: &MediumSpec, set: &LatticeSet) -> Result<(LatticeSet, AlphaRectangle)> {
    let core = maximal_alpha_rectangle(spec, set)
        .ok_or_else(|| Error::InvalidArgument("set has no α-type rectangle with all sides on it".into()))?;
    let filled = set.union(&core.to_lattice_set(set.epsilon().clone())?)?;
    Ok((filled, core))
}

/// The side of `core` a β-square sticks out of, when it sticks out of exactly
/// one side and stays within the extent of that side.
fn side_of_square(core: &CellRect, q: &CellRect) -> Option<Side> {
    let beyond = [q.x_min < core.x_min, q.x_max > core.x_max, q.y_min < core.y_min, q.y_max > core.y_max];
    if beyond.iter().filter(|&&b| b).count() != 1 {
        return None;
    }
    let side = Side::ALL[beyond.iter().position(|&b| b).unwrap()];
    let along_ok = match side {
        Side::Left | Side::Right => q.y_min >= core.y_min && q.y_max <= core.y_max,
        Side::Bottom | Side::Top => q.x_min >= core.x_min && q.x_max <= core.x_max,
    };
    along_ok.then_some(side)
}

/// Depth of `cell` beyond `side` of `core` (1 for the first outer row) and
/// its coordinate along the side.
fn depth_along(core: &CellRect, side: Side, (x, y): Cell) -> (i64, i64) {
    match side {
        Side::Left => (core.x_min - x, y),
        Side::Right => (x - core.x_max, y),
        Side::Bottom => (core.y_min - y, x),
        Side::Top => (y - core.y_max, x),
    }
}

/// For every β-square along one side of `core`: if the protrusion inside it
/// reaches both ends of the square along the side it is enveloped up to its
/// maximal depth, otherwise it is removed.
pub fn square_profile_move(spec: &MediumSpec, set: &LatticeSet, core: &CellRect) -> Result<LatticeSet> {
    let squares: BTreeSet<Cell> = set
        .cells()
        .iter()
        .filter(|c| !core.contains(**c))
        .filter_map(|&c| beta_square_of(spec, c))
        .collect();
    let mut cells = set.cells().clone();
    for corner in squares {
        let q = beta_square(spec, corner);
        let Some(side) = side_of_square(core, &q) else { continue };
        let outside: Vec<Cell> = q.cells().filter(|c| !core.contains(*c)).collect();
        let protrusion: Vec<Cell> = outside.iter().copied().filter(|c| set.contains(*c)).collect();
        let (lo, hi) = match side {
            Side::Left | Side::Right => (q.y_min, q.y_max),
            Side::Bottom | Side::Top => (q.x_min, q.x_max),
        };
        let along: Vec<(i64, i64)> = protrusion.iter().map(|&c| depth_along(core, side, c)).collect();
        let spans = along.iter().any(|a| a.1 == lo) && along.iter().any(|a| a.1 == hi);
        if spans {
            let depth = along.iter().map(|a| a.0).max().unwrap_or(0);
            cells.extend(outside.iter().filter(|&&c| depth_along(core, side, c).0 <= depth));
        } else {
            for c in &protrusion {
                cells.remove(c);
            }
        }
    }
    LatticeSet::new(set.epsilon().clone(), cells)
}

/// Cells outside `core` near one of its corners: within `N_αβ` of the
/// corner along both axes.
pub fn in_corner_zone(spec: &MediumSpec, core: &CellRect, (x, y): Cell) -> bool {
    let p = spec.period();
    let near = |v: i64, lo: i64, hi: i64| v < lo + p || v > hi - p;
    !core.contains((x, y)) && near(x, core.x_min, core.x_max) && near(y, core.y_min, core.y_max)
}

/// Remove every cell outside `core` except those in corner zones.
pub fn trim_sides(spec: &MediumSpec, set: &LatticeSet, core: &CellRect) -> Result<LatticeSet> {
    let cells = set.cells().iter().copied().filter(|&c| core.contains(c) || in_corner_zone(spec, core, c));
    LatticeSet::from_cells(set.epsilon().clone(), cells)
}

/// Remove every cell outside `core`.
pub fn trim_corners(set: &LatticeSet, core: &CellRect) -> Result<LatticeSet> {
    let cells = set.cells().iter().copied().filter(|&c| core.contains(c));
    LatticeSet::from_cells(set.epsilon().clone(), cells)
}

/// Apply the four moves in order; returns the set after each one together
/// with the core rectangle found by the first.
pub fn rectangularize(spec: &MediumSpec, set: &LatticeSet) -> Result<(AlphaRectangle, Vec<(Move, LatticeSet)>)> {
    let (filled, core) = alpha_fill(spec, set)?;
    let profiled = square_profile_move(spec, &filled, &core)?;
    let trimmed = trim_sides(spec, &profiled, &core)?;
    let rect = trim_corners(&trimmed, &core)?;
    let stages = vec![
        (Move::AlphaFill, filled),
        (Move::SquareProfile, profiled),
        (Move::TrimSides, trimmed),
        (Move::TrimCorners, rect),
    ];
    Ok((core, stages))
}

/// Random protruded candidate inside `prev`.
///
/// Each side of `prev` is moved inward so that a row of β-squares lies just
/// outside it; the result is the core. Some of those β-squares get a
/// protrusion no deeper than `N_β`, either reaching both ends of the square or
/// not, and a dent in the top side and a corner blob may be added.
pub fn protruded_candidate<R: Rng>(
    spec: &MediumSpec,
    prev: &AlphaRectangle,
    epsilon: &crate::numeric::Rational,
    rng: &mut R,
) -> Result<(LatticeSet, AlphaRectangle)> {
    if spec.is_homogeneous() {
        return Err(Error::InvalidArgument("protruded candidates need β-squares".into()));
    }
    let (p, nb) = (spec.period(), spec.n_beta());
    let mut core = *prev.rect();
    for side in Side::ALL {
        let mut n = rng.gen_range(1..=p);
        loop {
            let r = core
                .moved_in(side, n)
                .ok_or_else(|| Error::InvalidArgument(format!("{prev} is too small for a candidate")))?;
            let (outer, want) = match side {
                Side::Left => (r.x_min - 1, nb),
                Side::Right => (r.x_max + 1, 0),
                Side::Bottom => (r.y_min - 1, nb),
                Side::Top => (r.y_max + 1, 0),
            };
            if outer.rem_euclid(p) == want && r.is_alpha_type(spec) {
                core = r;
                break;
            }
            n += 1;
        }
    }
    if core.width() < 6 || core.height() < 6 {
        return Err(Error::InvalidArgument(format!("{prev} is too small for a candidate")));
    }
    let outward = |side: Side, along: i64, depth: i64| match side {
        Side::Left => (core.x_min - depth, along),
        Side::Right => (core.x_max + depth, along),
        Side::Bottom => (along, core.y_min - depth),
        Side::Top => (along, core.y_max + depth),
    };
    let mut cells: BTreeSet<Cell> = core.cells().collect();
    for side in Side::ALL {
        let (lo, hi) = match side {
            Side::Left | Side::Right => (core.y_min, core.y_max),
            Side::Bottom | Side::Top => (core.x_min, core.x_max),
        };
        // β-squares along the side, away from the corners
        let first = lo + p + (-(lo + p)).rem_euclid(p);
        for start in (first..=hi - p - nb).step_by(p as usize) {
            if !rng.gen_bool(0.5) {
                continue;
            }
            let (from, to, min_depth) = if rng.gen_bool(0.5) {
                (0, nb, 0)
            } else {
                let s = rng.gen_range(0..nb);
                (s, rng.gen_range(s..nb), 1)
            };
            for k in from..=to {
                let ends = min_depth == 0 && (k == 0 || k == nb);
                let h = rng.gen_range(if ends { 1 } else { min_depth }..=nb);
                cells.extend((1..=h).map(|d| outward(side, start + k, d)));
            }
        }
    }
    if rng.gen_bool(0.5) {
        let x = rng.gen_range(core.x_min + 1..core.x_max - 3);
        let (w, h) = (rng.gen_range(1..3), rng.gen_range(1..3));
        for dx in 0..w {
            for dy in 0..h {
                cells.remove(&(x + dx, core.y_max - dy));
            }
        }
    }
    if rng.gen_bool(0.5) {
        let (w, h) = (rng.gen_range(1..=nb), rng.gen_range(1..=nb));
        for dx in 1..=w {
            for dy in 1..=h {
                cells.insert((core.x_max + dx, core.y_max + dy));
            }
        }
    }
    Ok((LatticeSet::new(epsilon.clone(), cells)?, AlphaRectangle::new(spec, core)?))
}
