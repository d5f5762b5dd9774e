use crate::error::{Error, Result};
use crate::hausdorff::{check_snap, FiniteCompact};
use crate::metric::norm;

const POWER_STEPS: usize = 64;

/// Affine map `x -> Mx + t` on R^d.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    dim: usize,
    /// Row-major `d x d`.
    matrix: Vec<f64>,
    translation: Vec<f64>,
    op_norm: f64,
}

impl AffineMap {
    pub fn new(matrix: Vec<Vec<f64>>, translation: Vec<f64>) -> Result<Self> {
        let dim = translation.len();
        if dim == 0 {
            return Err(Error::InvalidSystem("affine map needs dimension >= 1".into()));
        }
        if matrix.len() != dim || matrix.iter().any(|row| row.len() != dim) {
            return Err(Error::InvalidSystem(format!(
                "matrix must be {dim}x{dim} to match a translation of length {dim}"
            )));
        }
        let matrix: Vec<f64> = matrix.into_iter().flatten().collect();
        if matrix.iter().chain(&translation).any(|v| !v.is_finite()) {
            return Err(Error::InvalidSystem("affine map entries must be finite".into()));
        }
        let op_norm = operator_norm(dim, &matrix);
        if !op_norm.is_finite() {
            return Err(Error::InvalidSystem("operator norm is not finite".into()));
        }
        Ok(AffineMap {
            dim,
            matrix,
            translation,
            op_norm,
        })
    }

    /// `x -> factor * x + translation`.
    pub fn similarity(factor: f64, translation: Vec<f64>) -> Result<Self> {
        let dim = translation.len();
        let matrix = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { factor } else { 0.0 }).collect())
            .collect();
        Self::new(matrix, translation)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::similarity(1.0, vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix_row(&self, i: usize) -> &[f64] {
        &self.matrix[i * self.dim..(i + 1) * self.dim]
    }

    pub fn matrix_rows(&self) -> Vec<Vec<f64>> {
        self.matrix.chunks_exact(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn translation(&self) -> &[f64] {
        &self.translation
    }

    /// Spectral norm estimate from 64 power-iteration steps on `M^T M`.
    pub fn op_norm(&self) -> f64 {
        self.op_norm
    }

    #[inline]
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = self.matrix_row(i);
            *o = row.iter().zip(x).map(|(m, v)| m * v).sum::<f64>() + self.translation[i];
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.apply_into(x, &mut out);
        out
    }

    /// Flat coordinates of the image of every point of `set`.
    pub(crate) fn image_coords(&self, set: &FiniteCompact) -> Vec<f64> {
        let mut out = vec![0.0; set.coords().len()];
        for (x, o) in set.points().zip(out.chunks_exact_mut(self.dim)) {
            self.apply_into(x, o);
        }
        out
    }

    fn check_dim(&self, set: &FiniteCompact) -> Result<()> {
        if set.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: set.dim(),
            });
        }
        Ok(())
    }
}

fn operator_norm(dim: usize, m: &[f64]) -> f64 {
    if m.iter().all(|&v| v == 0.0) {
        return 0.0;
    }
    // Start off-axis so the iterate is unlikely to be orthogonal to the top
    // singular vector.
    let mut v: Vec<f64> = (0..dim).map(|i| 1.0 / (i as f64 + 1.0)).collect();
    let mut mv = vec![0.0; dim];
    let mut sigma = 0.0;
    for _ in 0..POWER_STEPS {
        let n = norm(&v);
        if n == 0.0 {
            break;
        }
        v.iter_mut().for_each(|x| *x /= n);
        for i in 0..dim {
            mv[i] = (0..dim).map(|j| m[i * dim + j] * v[j]).sum();
        }
        sigma = norm(&mv);
        for j in 0..dim {
            v[j] = (0..dim).map(|i| m[i * dim + j] * mv[i]).sum();
        }
    }
    sigma
}

/// Image `{Mx + t : x in B}`, snapped to spacing `snap` and deduplicated.
pub fn apply_map(map: &AffineMap, set: &FiniteCompact, snap: f64) -> Result<FiniteCompact> {
    check_snap(snap)?;
    map.check_dim(set)?;
    FiniteCompact::snapped(set.dim(), map.image_coords(set), snap)
}

/// Image without snapping (deduplicated only).
pub fn apply_map_exact(map: &AffineMap, set: &FiniteCompact) -> Result<FiniteCompact> {
    map.check_dim(set)?;
    FiniteCompact::from_flat(set.dim(), map.image_coords(set))
}
