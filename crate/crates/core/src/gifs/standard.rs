//! Ready-made systems used throughout the tests, benches, and CLI docs.

use super::{AffineMap, GifsSystem};
use crate::error::Result;
use crate::metric::DislocatedMetric;

/// Middle-thirds Cantor system `x/3`, `x/3 + 2/3` under `|x - y|` on R.
pub fn cantor_system() -> Result<GifsSystem> {
    cantor_with_translations(0.0, 2.0 / 3.0)
}

/// Two maps of ratio 1/3 with the given translations, `g = f`.
pub fn cantor_with_translations(t1: f64, t2: f64) -> Result<GifsSystem> {
    let third = 1.0 / 3.0;
    GifsSystem::symmetric(
        DislocatedMetric::euclidean(1.0, 0.0, 1)?,
        vec![
            AffineMap::similarity(third, vec![t1])?,
            AffineMap::similarity(third, vec![t2])?,
        ],
        vec![third, third],
    )
}

/// Sierpinski triangle: three half-scale maps with translations `(0,0)`,
/// `(1/2, 0)`, `(1/4, sin(60deg)/2)` under the Euclidean metric.
pub fn sierpinski_system() -> Result<GifsSystem> {
    let h = 0.5 * 60f64.to_radians().sin();
    GifsSystem::symmetric(
        DislocatedMetric::euclidean(1.0, 0.0, 2)?,
        vec![
            AffineMap::similarity(0.5, vec![0.0, 0.0])?,
            AffineMap::similarity(0.5, vec![0.5, 0.0])?,
            AffineMap::similarity(0.5, vec![0.25, h])?,
        ],
        vec![0.5; 3],
    )
}

/// Single pair `f = g = x/2` under `2|x - y| + 4 max{x, y}`.
pub fn halving_abs_max() -> Result<GifsSystem> {
    GifsSystem::symmetric(
        DislocatedMetric::abs_max(2.0, 4.0)?,
        vec![AffineMap::similarity(0.5, vec![0.0])?],
        vec![0.5],
    )
}

/// Pair with `f != g`: `f = x/2`, `g = x/4` under `2|x - y| + 4 max{x, y}`
/// with declared factor 0.7 (`delta(x/2, x/4) = 2.5x` against `delta(x, x) = 4x`
/// forces at least 0.625).
pub fn dislocated_pair() -> Result<GifsSystem> {
    GifsSystem::new(
        DislocatedMetric::abs_max(2.0, 4.0)?,
        vec![AffineMap::similarity(0.5, vec![0.0])?],
        vec![AffineMap::similarity(0.25, vec![0.0])?],
        vec![0.7],
    )
}
