//! Dislocated metrics.
//!
//! A dislocated (metric-like) distance is symmetric and satisfies the triangle
//! inequality, and `delta(x, y) = 0` still forces `x = y`, but the self-distance
//! `delta(x, x)` may be positive. Three concrete families are representable:
//!
//! * [`DislocatedMetric::AbsMax`]: `a|x - y| + b max{x, y}` on the nonnegative reals,
//! * [`DislocatedMetric::Table`]: an explicit symmetric table over a finite label set,
//! * [`DislocatedMetric::EuclideanDislocated`]: `a||x - y|| + b max{||x||, ||y||}` on R^d.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// A point of R^d with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidPoint("point has no coordinates".into()));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint(format!("non-finite coordinate {c}")));
        }
        Ok(Point(coords))
    }

    /// Label index point for [`DislocatedMetric::Table`] metrics.
    pub fn label(index: usize) -> Self {
        Point(vec![index as f64])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::new(vec![x]).expect("finite scalar point")
    }
}

/// Lexicographic order on coordinate slices (total order on floats).
pub fn lex_cmp(x: &[f64], y: &[f64]) -> Ordering {
    for (a, b) in x.iter().zip(y) {
        match a.total_cmp(b) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    x.len().cmp(&y.len())
}

/// Symmetric distance table with labels. Off-diagonal zeros are rejected
/// since `delta(x, y) = 0` must imply `x = y`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTable {
    labels: Vec<String>,
    values: Vec<f64>,
}

impl DistanceTable {
    /// Builds a table from row-major entries. The triangle inequality is not
    /// enforced here; see [`DistanceTable::worst_triangle`] and [`verify_axioms`].
    pub fn new(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidMetric("table has no labels".into()));
        }
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMetric(format!(
                "table must be {n}x{n} to match its labels"
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidMetric(format!(
                        "entry ({}, {}) = {v} must be finite and nonnegative",
                        labels[i], labels[j]
                    )));
                }
                if rows[j][i] != v {
                    return Err(Error::InvalidMetric(format!(
                        "table is not symmetric at ({}, {})",
                        labels[i], labels[j]
                    )));
                }
                if i != j && v == 0.0 {
                    return Err(Error::InvalidMetric(format!(
                        "zero distance between distinct labels {} and {}",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        Ok(DistanceTable {
            labels,
            values: rows.into_iter().flatten().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    /// Largest `delta(i,k) - delta(i,j) - delta(j,k)` over all label triples,
    /// if any is positive.
    pub fn worst_triangle(&self) -> Option<([usize; 3], f64)> {
        let n = self.len();
        let mut worst: Option<([usize; 3], f64)> = None;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.get(i, k) - self.get(i, j) - self.get(j, k);
                    if v > 0.0 && worst.is_none_or(|(_, w)| v > w) {
                        worst = Some(([i, j, k], v));
                    }
                }
            }
        }
        worst
    }
}

/// A concrete, evaluable dislocated metric.
#[derive(Debug, Clone, PartialEq)]
pub enum DislocatedMetric {
    /// `a|x - y| + b max{x, y}` on the nonnegative half line.
    AbsMax { a: f64, b: f64 },
    /// Explicit finite table; points are single-coordinate label indices.
    Table(DistanceTable),
    /// `a||x - y||_2 + b max{||x||_2, ||y||_2}` on R^d.
    EuclideanDislocated { a: f64, b: f64, dimension: usize },
}

fn check_weights(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) || a < 0.0 || b < 0.0 || a + b <= 0.0 {
        return Err(Error::InvalidMetric(format!(
            "weights must satisfy a >= 0, b >= 0, a + b > 0 (got a={a}, b={b})"
        )));
    }
    Ok(())
}

impl DislocatedMetric {
    pub fn abs_max(a: f64, b: f64) -> Result<Self> {
        check_weights(a, b)?;
        Ok(DislocatedMetric::AbsMax { a, b })
    }

    pub fn euclidean(a: f64, b: f64, dimension: usize) -> Result<Self> {
        check_weights(a, b)?;
        if dimension == 0 {
            return Err(Error::InvalidMetric("dimension must be positive".into()));
        }
        Ok(DislocatedMetric::EuclideanDislocated { a, b, dimension })
    }

    pub fn table(table: DistanceTable) -> Self {
        DislocatedMetric::Table(table)
    }

    pub fn dimension(&self) -> usize {
        match self {
            DislocatedMetric::AbsMax { .. } | DislocatedMetric::Table(_) => 1,
            DislocatedMetric::EuclideanDislocated { dimension, .. } => *dimension,
        }
    }

    /// Weights `(a, b)` of the difference and max terms, when the metric has them.
    pub fn weights(&self) -> Option<(f64, f64)> {
        match self {
            DislocatedMetric::AbsMax { a, b } => Some((*a, *b)),
            DislocatedMetric::EuclideanDislocated { a, b, .. } => Some((*a, *b)),
            DislocatedMetric::Table(_) => None,
        }
    }

    /// Checks that `coords` is a member of the underlying space.
    pub fn check_coords(&self, coords: &[f64]) -> Result<()> {
        if coords.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: coords.len(),
            });
        }
        match self {
            DislocatedMetric::AbsMax { .. } => {
                let x = coords[0];
                if !x.is_finite() || x < 0.0 {
                    return Err(Error::InvalidPoint(format!(
                        "abs-max metric is defined on x >= 0, got {x}"
                    )));
                }
            }
            DislocatedMetric::Table(t) => {
                let x = coords[0];
                if x.fract() != 0.0 || x < 0.0 || x >= t.len() as f64 {
                    return Err(Error::InvalidPoint(format!(
                        "table label index {x} out of range 0..{}",
                        t.len()
                    )));
                }
            }
            DislocatedMetric::EuclideanDislocated { .. } => {
                if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
                    return Err(Error::InvalidPoint(format!("non-finite coordinate {c}")));
                }
            }
        }
        Ok(())
    }

    /// `delta(x, y)` with input validation.
    pub fn delta(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check_coords(x.coords())?;
        self.check_coords(y.coords())?;
        Ok(self.eval(x.coords(), y.coords()))
    }

    /// `delta(x, y)` on coordinates already accepted by [`Self::check_coords`].
    ///
    /// Arguments are put in lexicographic order first so the result is
    /// bit-identical under swapping.
    #[inline]
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let (x, y) = if lex_cmp(x, y) == Ordering::Greater {
            (y, x)
        } else {
            (x, y)
        };
        match self {
            DislocatedMetric::AbsMax { a, b } => {
                let (x, y) = (x[0], y[0]);
                a * (x - y).abs() + b * x.max(y)
            }
            DislocatedMetric::Table(t) => t.get(x[0] as usize, y[0] as usize),
            DislocatedMetric::EuclideanDislocated { a, b, .. } => {
                let diff = euclid_dist(x, y);
                let m = norm(x).max(norm(y));
                a * diff + b * m
            }
        }
    }

    /// Norm entering the max term (`|x|` for abs-max, `||x||_2` otherwise).
    #[inline]
    pub(crate) fn anchor_norm(&self, x: &[f64]) -> f64 {
        match self {
            DislocatedMetric::AbsMax { .. } => x[0].abs(),
            _ => norm(x),
        }
    }
}

#[inline]
pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[inline]
pub(crate) fn euclid_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

/// Result of a sampled axiom check.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub sample_size: usize,
    pub pairs_checked: usize,
    pub triples_checked: usize,
    /// Pairs with `delta <= tol` whose coordinates differ by more than `tol`.
    pub identity_violations: usize,
    /// Largest coordinate gap among pairs with `delta <= tol`.
    pub max_identity_gap: f64,
    pub max_symmetry_violation: f64,
    /// Largest `delta(x,z) - delta(x,y) - delta(y,z)`, clipped at zero.
    pub max_triangle_violation: f64,
    /// Sample indices `(x, y, z)` of the worst triangle violation, if positive.
    pub worst_triangle: Option<[usize; 3]>,
    pub tol: f64,
    pub passed: bool,
}

/// Checks the three dislocated-metric axioms on every pair and ordered triple
/// of `sample`. A positive self-distance is never reported as a violation.
pub fn verify_axioms(metric: &DislocatedMetric, sample: &[Point], tol: f64) -> Result<AxiomReport> {
    if sample.is_empty() {
        return Err(Error::InvalidInput("axiom sample is empty".into()));
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidInput(format!("tolerance must be >= 0, got {tol}")));
    }
    for p in sample {
        metric.check_coords(p.coords())?;
    }
    let n = sample.len();
    let mut d = vec![0.0; n * n];
    let mut identity_violations = 0;
    let mut max_identity_gap: f64 = 0.0;
    let mut max_symmetry_violation: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (sample[i].coords(), sample[j].coords());
            let dxy = metric.eval(x, y);
            let dyx = metric.eval(y, x);
            d[i * n + j] = dxy;
            max_symmetry_violation = max_symmetry_violation.max((dxy - dyx).abs());
            if dxy <= tol {
                let gap = x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
                max_identity_gap = max_identity_gap.max(gap);
                if gap > tol {
                    identity_violations += 1;
                }
            }
        }
    }
    let mut max_triangle_violation: f64 = 0.0;
    let mut worst_triangle = None;
    for i in 0..n {
        for j in 0..n {
            let dij = d[i * n + j];
            for k in 0..n {
                let v = d[i * n + k] - dij - d[j * n + k];
                if v > max_triangle_violation {
                    max_triangle_violation = v;
                    worst_triangle = Some([i, j, k]);
                }
            }
        }
    }
    let passed = identity_violations == 0 && max_symmetry_violation <= tol && max_triangle_violation <= tol;
    Ok(AxiomReport {
        sample_size: n,
        pairs_checked: n * n,
        triples_checked: n * n * n,
        identity_violations,
        max_identity_gap,
        max_symmetry_violation,
        max_triangle_violation,
        worst_triangle,
        tol,
        passed,
    })
}

/// Default axiom tolerance `1e-12 * (1 + magnitude)`, where magnitude is the
/// largest distance over the sample.
pub fn default_axiom_tol(metric: &DislocatedMetric, sample: &[Point]) -> f64 {
    let mut m: f64 = 0.0;
    for x in sample {
        for y in sample {
            m = m.max(metric.eval(x.coords(), y.coords()));
        }
    }
    1e-12 * (1.0 + m)
}
