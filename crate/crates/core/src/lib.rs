//! Circle-method toolkit over number fields: field arithmetic, ideals,
//! expanded form systems, exponential sums, local densities and the
//! explicit bound tower.

pub mod arch;
pub mod bounds;
pub mod config;
pub mod counting;
pub mod error;
pub mod field;
pub mod forms;
pub mod hasse;
pub mod ideals;
pub mod intarith;
pub mod local;
pub mod lattice;
pub mod linalg;
pub mod poly;
pub mod quadrature;
pub mod report;
pub mod roots;

pub use error::{Error, Result};
