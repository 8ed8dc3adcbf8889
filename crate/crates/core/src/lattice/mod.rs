//! The periodic bond medium, finite cell sets and their energies.

mod energy;
mod medium;
mod set;

pub use energy::{
    boundary_bonds, cell_distance, dissipation, perimeter_energy, rect_boundary_bonds,
    rect_dissipation_cells, rect_perimeter_energy, rect_total_functional, total_functional,
};
pub use medium::{bond_coefficient, Cell, MediumSpec};
pub use set::{AlphaRectangle, CellRect, LatticeSet, Side};
