//! Poisson-Lie structures on Drinfel'd doubles and lattice sigma models.

#![allow(clippy::needless_range_loop)]

pub mod bialgebra;
pub mod bivector;
pub mod catalog;
pub mod checks;
pub mod defect;
pub mod error;
pub mod group;
pub mod lattice;
pub mod lie;
pub mod linalg;
pub mod settings;

pub use bialgebra::{build_double, Cocommutator, CoboundaryData, CoboundarySolution, DoubleAlgebra};
pub use bivector::{ChartBivector, FnBivector, LinearBivector};
pub use defect::{Defect, DefectReport};
pub use error::{Error, Result};
pub use group::{GroupBivector, GroupPoint, Subgroup};
pub use lie::{AlgebraElement, LieAlgebra, StructureConstants};
pub use settings::Tolerances;
