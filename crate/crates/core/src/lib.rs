//! Common attractors of generalized iterated function systems in dislocated
//! metric spaces.

pub mod collage;
pub mod error;
pub mod gifs;
pub mod hausdorff;
pub mod io;
pub mod metric;
pub mod wellposed;

pub use collage::{collage_certificate, collage_fit, CollageCertificate, FitConfig, FitFamily, FitResult};
pub use error::{Error, Result};
pub use gifs::{AffineMap, GifsSystem, IterationConfig, IterationTrace, Operator};
pub use hausdorff::{FiniteCompact, SpatialIndex, Strategy};
pub use metric::{DislocatedMetric, DistanceTable, Point};
pub use wellposed::{wellposedness_check, Perturbation, WellposednessReport};
