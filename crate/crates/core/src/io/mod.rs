//! Plain-text point clouds and portable graymap rasters.

mod cloud;
mod raster;

pub use cloud::{parse_cloud, read_cloud, write_cloud};
pub use raster::{cloud_from_raster, parse_pgm, render, Graymap};
