//! Point-to-set distance, directed distance `sigma`, and the Hausdorff
//! dislocated distance `H(R, S) = max{sigma(R, S), sigma(S, R)}` on finite
//! point clouds. Inf and sup are exact min and max over the finite sets.

mod compact;
mod grid;

pub use compact::{snap_coord, FiniteCompact};
pub use grid::SpatialIndex;

pub(crate) use compact::check_snap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::{DislocatedMetric, Point};

/// How set distances are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Plain double loop.
    Exhaustive,
    /// Grid-index pruning where the metric admits it, exhaustive otherwise.
    #[default]
    Accelerated,
}

/// Below this many point pairs the exhaustive loop is cheaper than indexing.
const INDEX_MIN_PAIRS: usize = 4096;
const PAR_MIN_LEN: usize = 32;

pub(crate) fn check_set(metric: &DislocatedMetric, set: &FiniteCompact) -> Result<()> {
    if set.dim() != metric.dimension() {
        return Err(Error::DimensionMismatch {
            expected: metric.dimension(),
            found: set.dim(),
        });
    }
    set.points().try_for_each(|p| metric.check_coords(p))
}

#[inline]
fn min_to_set(metric: &DislocatedMetric, x: &[f64], set: &FiniteCompact) -> f64 {
    set.points().map(|s| metric.eval(x, s)).fold(f64::INFINITY, f64::min)
}

/// `delta(x, R) = min over r in R of delta(x, r)`.
pub fn point_to_set(metric: &DislocatedMetric, x: &Point, set: &FiniteCompact) -> Result<f64> {
    metric.check_coords(x.coords())?;
    check_set(metric, set)?;
    Ok(min_to_set(metric, x.coords(), set))
}

/// `sigma(R, S) = max over r in R of delta(r, S)`, by exhaustive search.
pub fn sigma(metric: &DislocatedMetric, r: &FiniteCompact, s: &FiniteCompact) -> Result<f64> {
    check_set(metric, r)?;
    check_set(metric, s)?;
    Ok(sigma_exhaustive(metric, r, s))
}

pub(crate) fn sigma_exhaustive(metric: &DislocatedMetric, r: &FiniteCompact, s: &FiniteCompact) -> f64 {
    (0..r.len())
        .into_par_iter()
        .with_min_len(PAR_MIN_LEN)
        .map(|i| min_to_set(metric, r.point(i), s))
        .reduce(|| 0.0, f64::max)
}

/// Exhaustive Hausdorff dislocated distance.
pub fn hausdorff_distance(metric: &DislocatedMetric, r: &FiniteCompact, s: &FiniteCompact) -> Result<f64> {
    check_set(metric, r)?;
    check_set(metric, s)?;
    Ok(sigma_exhaustive(metric, r, s).max(sigma_exhaustive(metric, s, r)))
}

/// `sigma(R, S)` using an index over `S`. Points of `R` whose nearest
/// candidate already falls below the running maximum are skipped, which
/// leaves the maximum unchanged.
pub fn sigma_indexed(metric: &DislocatedMetric, r: &FiniteCompact, index_s: &SpatialIndex) -> f64 {
    (0..r.len())
        .into_par_iter()
        .with_min_len(PAR_MIN_LEN)
        .fold(
            || 0.0f64,
            |acc, i| match index_s.min_delta(metric, r.point(i), acc) {
                Some(d) => acc.max(d),
                None => acc,
            },
        )
        .reduce(|| 0.0, f64::max)
}

/// Hausdorff dislocated distance through grid indices over both sets.
/// Table metrics and metrics with `a = 0` are rejected as unsupported.
pub fn hausdorff_accelerated(metric: &DislocatedMetric, r: &FiniteCompact, s: &FiniteCompact) -> Result<f64> {
    check_set(metric, r)?;
    check_set(metric, s)?;
    let index_r = SpatialIndex::build(metric, r)?;
    let index_s = SpatialIndex::build(metric, s)?;
    Ok(sigma_indexed(metric, r, &index_s).max(sigma_indexed(metric, s, &index_r)))
}

/// Hausdorff dislocated distance with the given strategy; unsupported
/// accelerated cases fall back to the exhaustive loop.
pub fn hausdorff_with(
    metric: &DislocatedMetric,
    r: &FiniteCompact,
    s: &FiniteCompact,
    strategy: Strategy,
) -> Result<f64> {
    if strategy == Strategy::Accelerated && r.len() * s.len() >= INDEX_MIN_PAIRS {
        match hausdorff_accelerated(metric, r, s) {
            Err(Error::Unsupported(_)) => {}
            other => return other,
        }
    }
    hausdorff_distance(metric, r, s)
}
