use std::collections::BTreeSet;
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use super::medium::{Cell, MediumSpec};
use crate::error::{Error, Result};
use crate::numeric::Rational;

/// A finite set of lattice cells at scale `epsilon`; cell `i` stands for the
/// square of side `epsilon` centred at `epsilon * i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawLatticeSet")]
pub struct LatticeSet {
    epsilon: Rational,
    cells: BTreeSet<Cell>,
}

#[derive(Deserialize)]
struct RawLatticeSet {
    epsilon: Rational,
    cells: BTreeSet<Cell>,
}

impl TryFrom<RawLatticeSet> for LatticeSet {
    type Error = Error;

    fn try_from(raw: RawLatticeSet) -> Result<Self> {
        LatticeSet::new(raw.epsilon, raw.cells)
    }
}

impl LatticeSet {
    pub fn new(epsilon: Rational, cells: BTreeSet<Cell>) -> Result<Self> {
        if !epsilon.is_positive() {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(LatticeSet { epsilon, cells })
    }

    pub fn empty(epsilon: Rational) -> Result<Self> {
        Self::new(epsilon, BTreeSet::new())
    }

    pub fn from_cells<I: IntoIterator<Item = Cell>>(epsilon: Rational, cells: I) -> Result<Self> {
        Self::new(epsilon, cells.into_iter().collect())
    }

    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }

    pub fn cells(&self) -> &BTreeSet<Cell> {
        &self.cells
    }

    pub fn into_cells(self) -> BTreeSet<Cell> {
        self.cells
    }

    pub fn contains(&self, cell: Cell) -> bool {
        self.cells.contains(&cell)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn is_subset(&self, other: &LatticeSet) -> bool {
        self.cells.is_subset(&other.cells)
    }

    /// Smallest cell rectangle containing the set, `None` when empty.
    pub fn bounding_box(&self) -> Option<CellRect> {
        let first = self.cells.iter().next()?;
        let mut r = CellRect { x_min: first.0, x_max: first.0, y_min: first.1, y_max: first.1 };
        for &(x, y) in &self.cells {
            r.x_min = r.x_min.min(x);
            r.x_max = r.x_max.max(x);
            r.y_min = r.y_min.min(y);
            r.y_max = r.y_max.max(y);
        }
        Some(r)
    }

    /// Translate every cell by `v`.
    pub fn translated(&self, v: Cell) -> LatticeSet {
        LatticeSet {
            epsilon: self.epsilon.clone(),
            cells: self.cells.iter().map(|&(x, y)| (x + v.0, y + v.1)).collect(),
        }
    }

    pub fn union(&self, other: &LatticeSet) -> Result<LatticeSet> {
        check_same_epsilon(self, other)?;
        Ok(LatticeSet {
            epsilon: self.epsilon.clone(),
            cells: self.cells.union(&other.cells).copied().collect(),
        })
    }

    pub fn difference(&self, other: &LatticeSet) -> Result<LatticeSet> {
        check_same_epsilon(self, other)?;
        Ok(LatticeSet {
            epsilon: self.epsilon.clone(),
            cells: self.cells.difference(&other.cells).copied().collect(),
        })
    }
}

pub(crate) fn check_same_epsilon(a: &LatticeSet, b: &LatticeSet) -> Result<()> {
    if a.epsilon != b.epsilon {
        return Err(Error::InvalidArgument(format!(
            "lattice sets have different epsilon: {} vs {}",
            a.epsilon, b.epsilon
        )));
    }
    Ok(())
}

/// One of the four sides of a coordinate rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Bottom => "bottom",
            Side::Top => "top",
        };
        f.write_str(s)
    }
}

/// Coordinate rectangle of cells with inclusive index bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellRect {
    pub x_min: i64,
    pub x_max: i64,
    pub y_min: i64,
    pub y_max: i64,
}

impl CellRect {
    pub fn new(x_min: i64, x_max: i64, y_min: i64, y_max: i64) -> Result<Self> {
        if x_min > x_max || y_min > y_max {
            return Err(Error::InvalidArgument(format!(
                "empty rectangle [{x_min}, {x_max}] x [{y_min}, {y_max}]"
            )));
        }
        Ok(CellRect { x_min, x_max, y_min, y_max })
    }

    pub fn width(&self) -> i64 {
        self.x_max - self.x_min + 1
    }

    pub fn height(&self) -> i64 {
        self.y_max - self.y_min + 1
    }

    pub fn area(&self) -> i64 {
        self.width() * self.height()
    }

    pub fn contains(&self, (x, y): Cell) -> bool {
        self.x_min <= x && x <= self.x_max && self.y_min <= y && y <= self.y_max
    }

    pub fn contains_rect(&self, other: &CellRect) -> bool {
        self.x_min <= other.x_min
            && other.x_max <= self.x_max
            && self.y_min <= other.y_min
            && other.y_max <= self.y_max
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (self.x_min..=self.x_max).flat_map(move |x| (self.y_min..=self.y_max).map(move |y| (x, y)))
    }

    pub fn to_lattice_set(&self, epsilon: Rational) -> Result<LatticeSet> {
        LatticeSet::from_cells(epsilon, self.cells())
    }

    /// Number of cells along `side`.
    pub fn side_length(&self, side: Side) -> i64 {
        match side {
            Side::Left | Side::Right => self.height(),
            Side::Bottom | Side::Top => self.width(),
        }
    }

    /// Coordinate of `side` in the 1D picture: it increases by `N` when the
    /// side moves `N` cells inward, and the side crosses only α-bonds
    /// whenever it lies in `{0, …, N_α − 1}` mod `N_αβ`.
    pub fn side_position(&self, spec: &MediumSpec, side: Side) -> i64 {
        let nb = spec.n_beta();
        match side {
            Side::Left => self.x_min - nb - 1,
            Side::Right => -1 - self.x_max,
            Side::Bottom => self.y_min - nb - 1,
            Side::Top => -1 - self.y_max,
        }
    }

    /// Move `side` inward by `n` cells; `None` if nothing would remain.
    pub fn moved_in(&self, side: Side, n: i64) -> Option<CellRect> {
        let mut r = *self;
        match side {
            Side::Left => r.x_min += n,
            Side::Right => r.x_max -= n,
            Side::Bottom => r.y_min += n,
            Side::Top => r.y_max -= n,
        }
        (r.x_min <= r.x_max && r.y_min <= r.y_max).then_some(r)
    }

    /// Inward displacement of each side from `self` to `inner`.
    pub fn displacements_to(&self, inner: &CellRect) -> [i64; 4] {
        [
            inner.x_min - self.x_min,
            self.x_max - inner.x_max,
            inner.y_min - self.y_min,
            self.y_max - inner.y_max,
        ]
    }

    /// Whether every boundary bond is an α-bond.
    pub fn is_alpha_type(&self, spec: &MediumSpec) -> bool {
        super::energy::rect_boundary_bonds(spec, self).1 == 0
    }
}

impl fmt::Display for CellRect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}] x [{}, {}]", self.x_min, self.x_max, self.y_min, self.y_max)
    }
}

/// A [`CellRect`] whose boundary crosses only α-bonds of a given medium.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct AlphaRectangle(CellRect);

impl AlphaRectangle {
    pub fn new(spec: &MediumSpec, rect: CellRect) -> Result<Self> {
        if rect.x_min > rect.x_max || rect.y_min > rect.y_max {
            return Err(Error::InvalidArgument(format!("empty rectangle {rect}")));
        }
        if !rect.is_alpha_type(spec) {
            return Err(Error::InvalidArgument(format!("{rect} is not an α-type rectangle")));
        }
        Ok(AlphaRectangle(rect))
    }

    pub fn from_bounds(spec: &MediumSpec, x_min: i64, x_max: i64, y_min: i64, y_max: i64) -> Result<Self> {
        Self::new(spec, CellRect::new(x_min, x_max, y_min, y_max)?)
    }

    /// The α-type square with lower-left corner at the first admissible
    /// position `≥ (origin, origin)` and side at least `min_side` cells.
    pub fn square_at_least(spec: &MediumSpec, origin: i64, min_side: i64) -> Result<Self> {
        if min_side < 1 {
            return Err(Error::InvalidArgument(format!("side must be ≥ 1, got {min_side}")));
        }
        let probe = |x_min: i64, x_max: i64| CellRect { x_min, x_max, y_min: x_min, y_max: x_max };
        let mut lo = origin;
        while !spec.is_alpha_residue(probe(lo, lo).side_position(spec, Side::Left)) {
            lo += 1;
        }
        let mut hi = lo + min_side - 1;
        while !spec.is_alpha_residue(probe(lo, hi).side_position(spec, Side::Right)) {
            hi += 1;
        }
        Self::new(spec, probe(lo, hi))
    }

    pub fn rect(&self) -> &CellRect {
        &self.0
    }
}

impl Deref for AlphaRectangle {
    type Target = CellRect;

    fn deref(&self) -> &CellRect {
        &self.0
    }
}

impl fmt::Display for AlphaRectangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
