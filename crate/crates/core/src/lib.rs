//! Deterministic no-dimensional Tverberg, colorful Tverberg and
//! ham-sandwich constructions, with exhaustive and geometric oracles for
//! checking their certificates.

pub mod colorful;
pub mod error;
pub mod geom;
pub mod hamsandwich;
pub mod lifting;
pub mod oracle;
pub mod tverberg;

pub use error::{Error, Result};
pub use geom::{Ball, Diameter, DiameterPolicy, Point, PointSet};
pub use lifting::{GraphKind, LiftingGraph};
