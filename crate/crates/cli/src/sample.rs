//! Deterministic point samples: a lattice plus seeded uniform points.

use gifs_core::{DislocatedMetric, FiniteCompact, GifsSystem, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Lattice per axis for dimensions 1, 2, 3; higher dimensions are random only.
fn lattice_side(d: usize) -> usize {
    match d {
        1 => 17,
        2 => 5,
        3 => 3,
        _ => 0,
    }
}

/// About `total` points in `[lo, hi]^d`.
pub fn box_sample(d: usize, lo: f64, hi: f64, total: usize, seed: u64) -> Vec<Point> {
    let side = lattice_side(d);
    let mut pts = Vec::new();
    if side > 0 {
        let cells = side.pow(d as u32);
        for k in 0..cells {
            let mut rem = k;
            let coords = (0..d)
                .map(|_| {
                    let i = rem % side;
                    rem /= side;
                    lo + (hi - lo) * i as f64 / (side - 1) as f64
                })
                .collect();
            pts.push(Point::new(coords).expect("finite lattice point"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while pts.len() < total {
        let coords = (0..d).map(|_| rng.random_range(lo..=hi)).collect();
        pts.push(Point::new(coords).expect("finite sample point"));
    }
    pts
}

/// Sample for the axiom check; a table metric uses every label.
pub fn axiom_sample(metric: &DislocatedMetric, seed: u64) -> Vec<Point> {
    match metric {
        DislocatedMetric::Table(t) => (0..t.len()).map(Point::label).collect(),
        DislocatedMetric::AbsMax { .. } => box_sample(1, 0.0, 4.0, 40, seed),
        DislocatedMetric::EuclideanDislocated { dimension, .. } => box_sample(*dimension, -2.0, 2.0, 40, seed),
    }
}

/// Points spanning the seed set and the attractor's radius bound.
pub fn domain_sample(sys: &GifsSystem, seed_set: &FiniteCompact, seed: u64) -> Vec<Point> {
    let r = sys
        .attractor_radius_bound()
        .unwrap_or(0.0)
        .max(seed_set.max_norm())
        .max(1.0);
    let lo = match sys.metric() {
        DislocatedMetric::AbsMax { .. } => 0.0,
        _ => -r,
    };
    box_sample(sys.dim(), lo, r, 48, seed)
}

pub fn all_pairs(points: &[Point]) -> Vec<(Point, Point)> {
    points
        .iter()
        .flat_map(|x| points.iter().map(move |y| (x.clone(), y.clone())))
        .collect()
}
