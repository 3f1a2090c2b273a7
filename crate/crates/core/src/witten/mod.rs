//! Lattice models of the deformed Dirac-type operators and their spectra.

pub mod eigen;
pub mod experiments;
pub mod lattice;
pub mod models;
pub mod spectrum;

pub use eigen::{EigenOptions, Method, SpectralError};
pub use experiments::{localization_experiment, square_decomposition_check, LocalizationTable, SquareCheck};
pub use lattice::{Axis, AxisKind, Profile, SparseOp};
pub use models::{
    circle_operator, deformed_operator, fiber_operator, CircleSpin, DeformedModel, Grid, LatticeOperator, SectionProfile,
};
pub use spectrum::{spectrum, SpectralReport};
