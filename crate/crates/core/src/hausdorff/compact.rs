use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::metric::{lex_cmp, Point};

/// Nonempty finite point set in R^d, the computational stand-in for a
/// nonempty compact set.
///
/// Points are stored flat, sorted lexicographically and deduplicated, so two
/// `FiniteCompact`s represent the same set iff they compare equal. The
/// recorded grid resolution does not take part in equality.
#[derive(Debug, Clone)]
pub struct FiniteCompact {
    dim: usize,
    coords: Vec<f64>,
    grid_resolution: Option<f64>,
}

/// Rounds `x` to the nearest multiple of `h`. Negative zero becomes zero.
#[inline]
pub fn snap_coord(x: f64, h: f64) -> f64 {
    (x / h).round() * h + 0.0
}

impl FiniteCompact {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let dim = points
            .first()
            .map(Point::dim)
            .ok_or_else(|| Error::InvalidInput("compact set must be nonempty".into()))?;
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            coords.extend_from_slice(p.coords());
        }
        Self::from_flat(dim, coords)
    }

    /// Builds a set from row-major coordinates (`dim` values per point).
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if coords.is_empty() {
            return Err(Error::InvalidInput("compact set must be nonempty".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidInput(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint(format!("non-finite coordinate {c}")));
        }
        Ok(Self::canonical(dim, coords, None))
    }

    /// Snaps every coordinate to the lattice of spacing `h` and deduplicates.
    pub fn snapped(dim: usize, mut coords: Vec<f64>, h: f64) -> Result<Self> {
        check_snap(h)?;
        for c in &mut coords {
            *c = snap_coord(*c, h);
        }
        let mut set = Self::from_flat(dim, coords)?;
        set.grid_resolution = Some(h);
        Ok(set)
    }

    /// 1-D convenience constructor.
    pub fn from_scalars(xs: &[f64]) -> Result<Self> {
        Self::from_flat(1, xs.to_vec())
    }

    pub(crate) fn canonical(dim: usize, mut coords: Vec<f64>, grid_resolution: Option<f64>) -> Self {
        for c in &mut coords {
            *c += 0.0;
        }
        let mut rows: Vec<&[f64]> = coords.chunks_exact(dim).collect();
        rows.sort_unstable_by(|a, b| lex_cmp(a, b));
        rows.dedup_by(|a, b| lex_cmp(a, b) == Ordering::Equal);
        let coords = rows.concat();
        FiniteCompact {
            dim,
            coords,
            grid_resolution,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn grid_resolution(&self) -> Option<f64> {
        self.grid_resolution
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_points(&self) -> Vec<Point> {
        self.points()
            .map(|p| Point::new(p.to_vec()).expect("stored coordinates are finite"))
            .collect()
    }

    pub fn union(&self, other: &FiniteCompact) -> Result<FiniteCompact> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Ok(Self::canonical(self.dim, coords, None))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match lex_cmp(self.point(mid), x) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn is_subset_of(&self, other: &FiniteCompact) -> bool {
        self.dim == other.dim && self.points().all(|p| other.contains(p))
    }

    /// Per-axis `(min, max)` of the points.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.points() {
            for (i, &c) in p.iter().enumerate() {
                lo[i] = lo[i].min(c);
                hi[i] = hi[i].max(c);
            }
        }
        (lo, hi)
    }

    /// Euclidean length of the bounding-box diagonal.
    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        lo.iter().zip(&hi).map(|(l, h)| (h - l) * (h - l)).sum::<f64>().sqrt()
    }

    pub fn max_norm(&self) -> f64 {
        self.points().map(crate::metric::norm).fold(0.0, f64::max)
    }
}

impl PartialEq for FiniteCompact {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.coords == other.coords
    }
}

pub(crate) fn check_snap(h: f64) -> Result<()> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidInput(format!(
            "snap spacing must be positive and finite, got {h}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedups_and_sorts() {
        let s = FiniteCompact::from_scalars(&[3.0, 1.0, 3.0, -0.0, 0.0]).unwrap();
        assert_eq!(s.coords(), &[0.0, 1.0, 3.0]);
        assert!(s.coords()[0].is_sign_positive());
    }

    #[test]
    fn snapping_merges_nearby_points() {
        let s = FiniteCompact::snapped(2, vec![0.0, 0.0, 0.01, -0.01, 0.26, 0.0], 0.25).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.point(1), &[0.25, 0.0]);
        assert_eq!(s.grid_resolution(), Some(0.25));
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(FiniteCompact::new(vec![]).is_err());
        assert!(FiniteCompact::from_flat(2, vec![1.0, 2.0, 3.0]).is_err());
        let pts = vec![Point::new(vec![1.0]).unwrap(), Point::new(vec![1.0, 2.0]).unwrap()];
        assert!(FiniteCompact::new(pts).is_err());
        assert!(FiniteCompact::snapped(1, vec![1.0], 0.0).is_err());
    }

    #[test]
    fn union_and_subset() {
        let a = FiniteCompact::from_scalars(&[0.0, 1.0]).unwrap();
        let b = FiniteCompact::from_scalars(&[1.0, 2.0]).unwrap();
        let u = a.union(&b).unwrap();
        assert_eq!(u.coords(), &[0.0, 1.0, 2.0]);
        assert!(a.is_subset_of(&u));
        assert!(!u.is_subset_of(&a));
    }
}
