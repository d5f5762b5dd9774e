//! Uniform-grid spatial index for point-to-set queries.
//!
//! Pruning uses the lower bound `delta(x, s) >= a ||x - s|| + b ||x||`, valid for
//! both weighted families. The dislocation term is not translation invariant,
//! so only the difference term shrinks with grid distance.

use crate::error::{Error, Result};
use crate::hausdorff::FiniteCompact;
use crate::metric::DislocatedMetric;

const MAX_DIM: usize = 3;

/// Points of one set bucketed into a dense uniform grid over its bounding box.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    dim: usize,
    origin: [f64; MAX_DIM],
    cell: f64,
    counts: [i64; MAX_DIM],
    starts: Vec<usize>,
    coords: Vec<f64>,
    a: f64,
    b: f64,
}

impl SpatialIndex {
    /// Fails with [`Error::Unsupported`] for table metrics, metrics without a
    /// difference term (`a = 0`), and dimensions above 3.
    pub fn build(metric: &DislocatedMetric, set: &FiniteCompact) -> Result<Self> {
        let (a, b) = supported_weights(metric)?;
        let dim = set.dim();
        if dim > MAX_DIM {
            return Err(Error::Unsupported(format!(
                "grid index supports d <= {MAX_DIM}, got {dim}"
            )));
        }
        if dim != metric.dimension() {
            return Err(Error::DimensionMismatch {
                expected: metric.dimension(),
                found: dim,
            });
        }
        let n = set.len();
        let (lo, hi) = set.bounding_box();
        let extents: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| h - l).collect();
        let positive: Vec<f64> = extents.iter().copied().filter(|&e| e > 0.0).collect();
        let mut cell = if positive.is_empty() {
            1.0
        } else {
            let vol: f64 = positive.iter().product();
            (vol / n as f64).powf(1.0 / positive.len() as f64)
        };
        if !(cell.is_finite() && cell > 0.0) {
            cell = positive.iter().copied().fold(1.0, f64::max);
        }
        let mut origin = [0.0; MAX_DIM];
        origin[..dim].copy_from_slice(&lo);
        let mut counts = [1i64; MAX_DIM];
        let budget = (4 * n + 64) as f64;
        loop {
            let mut total = 1.0;
            for i in 0..dim {
                counts[i] = (extents[i] / cell).floor() as i64 + 1;
                total *= counts[i] as f64;
            }
            if total <= budget {
                break;
            }
            cell *= 1.5;
        }

        let mut index = SpatialIndex {
            dim,
            origin,
            cell,
            counts,
            starts: Vec::new(),
            coords: Vec::with_capacity(set.coords().len()),
            a,
            b,
        };
        let ncells = counts.iter().product::<i64>() as usize;
        let cell_ids: Vec<usize> = set
            .points()
            .map(|p| {
                let c = index.cell_of(p);
                let mut clamped = [0i64; MAX_DIM];
                for i in 0..dim {
                    clamped[i] = c[i].clamp(0, counts[i] - 1);
                }
                index.linear(&clamped)
            })
            .collect();
        let mut starts = vec![0usize; ncells + 1];
        for &id in &cell_ids {
            starts[id + 1] += 1;
        }
        for i in 0..ncells {
            starts[i + 1] += starts[i];
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| cell_ids[i]);
        for i in order {
            index.coords.extend_from_slice(set.point(i));
        }
        index.starts = starts;
        Ok(index)
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    fn cell_of(&self, x: &[f64]) -> [i64; MAX_DIM] {
        let mut c = [0i64; MAX_DIM];
        for i in 0..self.dim {
            c[i] = ((x[i] - self.origin[i]) / self.cell).floor() as i64;
        }
        c
    }

    fn linear(&self, c: &[i64; MAX_DIM]) -> usize {
        let mut id = 0i64;
        for (count, ci) in self.counts.iter().zip(c).take(self.dim) {
            id = id * count + ci;
        }
        id as usize
    }

    fn cell_points(&self, c: &[i64; MAX_DIM]) -> &[f64] {
        let id = self.linear(c);
        &self.coords[self.starts[id] * self.dim..self.starts[id + 1] * self.dim]
    }

    /// Minimum of `delta(x, s)` over the indexed set, or `None` as soon as some
    /// `s` with `delta(x, s) <= threshold` is found.
    pub(crate) fn min_delta(&self, metric: &DislocatedMetric, x: &[f64], threshold: f64) -> Option<f64> {
        let c = self.cell_of(x);
        let mut k0 = 0i64;
        let mut kmax = 0i64;
        for (&count, &ci) in self.counts.iter().zip(&c).take(self.dim) {
            let last = count - 1;
            k0 = k0.max(-ci).max(ci - last);
            kmax = kmax.max(ci).max(last - ci);
        }
        let anchor = self.b * metric.anchor_norm(x);
        let mut best = f64::INFINITY;
        let mut idx = [0i64; MAX_DIM];
        for k in k0..=kmax {
            if self.scan_ring(metric, x, &c, k, 0, false, &mut idx, &mut best, threshold) {
                return None;
            }
            if k == kmax {
                break;
            }
            let mut gap = f64::INFINITY;
            for i in 0..self.dim {
                if c[i] - k > 0 {
                    gap = gap.min(x[i] - (self.origin[i] + (c[i] - k) as f64 * self.cell));
                }
                if c[i] + k < self.counts[i] - 1 {
                    gap = gap.min(self.origin[i] + (c[i] + k + 1) as f64 * self.cell - x[i]);
                }
            }
            let gap = (gap - 1e-9 * self.cell).max(0.0);
            let lower = (self.a * gap + anchor) * (1.0 - 1e-12);
            if best <= lower {
                break;
            }
        }
        Some(best)
    }

    /// Visits cells at Chebyshev distance exactly `k` from `c`. Returns true
    /// when the threshold was reached.
    #[allow(clippy::too_many_arguments)]
    fn scan_ring(
        &self,
        metric: &DislocatedMetric,
        x: &[f64],
        c: &[i64; MAX_DIM],
        k: i64,
        axis: usize,
        on_ring: bool,
        idx: &mut [i64; MAX_DIM],
        best: &mut f64,
        threshold: f64,
    ) -> bool {
        if axis == self.dim {
            if !on_ring {
                return false;
            }
            for s in self.cell_points(idx).chunks_exact(self.dim) {
                let v = metric.eval(x, s);
                if v < *best {
                    *best = v;
                    if v <= threshold {
                        return true;
                    }
                }
            }
            return false;
        }
        let lo = (c[axis] - k).max(0);
        let hi = (c[axis] + k).min(self.counts[axis] - 1);
        if lo > hi {
            return false;
        }
        if axis + 1 == self.dim && !on_ring {
            for v in [c[axis] - k, c[axis] + k] {
                if v < lo || v > hi || (k == 0 && v != c[axis]) {
                    continue;
                }
                idx[axis] = v;
                if self.scan_ring(metric, x, c, k, axis + 1, true, idx, best, threshold) {
                    return true;
                }
                if k == 0 {
                    break;
                }
            }
            return false;
        }
        for v in lo..=hi {
            idx[axis] = v;
            let ring = on_ring || (v - c[axis]).abs() == k;
            if self.scan_ring(metric, x, c, k, axis + 1, ring, idx, best, threshold) {
                return true;
            }
        }
        false
    }
}

fn supported_weights(metric: &DislocatedMetric) -> Result<(f64, f64)> {
    match metric.weights() {
        Some((a, b)) if a > 0.0 => Ok((a, b)),
        Some(_) => Err(Error::Unsupported(
            "grid pruning needs a positive difference weight a".into(),
        )),
        None => Err(Error::Unsupported("table metrics have no geometric lower bound".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute(metric: &DislocatedMetric, x: &[f64], s: &FiniteCompact) -> f64 {
        s.points().map(|p| metric.eval(x, p)).fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn nearest_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in 1..=3 {
            let metric = DislocatedMetric::euclidean(1.0, 0.3, dim).unwrap();
            let coords: Vec<f64> = (0..300 * dim).map(|_| rng.random_range(-2.0..2.0)).collect();
            let set = FiniteCompact::from_flat(dim, coords).unwrap();
            let index = SpatialIndex::build(&metric, &set).unwrap();
            assert_eq!(index.len(), set.len());
            for _ in 0..200 {
                let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-4.0..4.0)).collect();
                let got = index.min_delta(&metric, &x, f64::NEG_INFINITY).unwrap();
                assert_eq!(got, brute(&metric, &x, &set));
            }
        }
    }

    #[test]
    fn unsupported_kinds() {
        let set = FiniteCompact::from_scalars(&[0.0]).unwrap();
        let partial = DislocatedMetric::abs_max(0.0, 1.0).unwrap();
        assert!(matches!(
            SpatialIndex::build(&partial, &set),
            Err(Error::Unsupported(_))
        ));
        let high = DislocatedMetric::euclidean(1.0, 0.0, 4).unwrap();
        let set4 = FiniteCompact::from_flat(4, vec![0.0; 4]).unwrap();
        assert!(matches!(SpatialIndex::build(&high, &set4), Err(Error::Unsupported(_))));
    }

    #[test]
    fn degenerate_set_single_cell() {
        let metric = DislocatedMetric::euclidean(1.0, 0.0, 2).unwrap();
        let set = FiniteCompact::from_flat(2, vec![1.0, 1.0]).unwrap();
        let index = SpatialIndex::build(&metric, &set).unwrap();
        assert_eq!(index.min_delta(&metric, &[4.0, 5.0], -1.0), Some(5.0));
    }
}
