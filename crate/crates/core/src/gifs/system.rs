use std::fmt;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::affine::AffineMap;
use crate::error::{Error, Result};
use crate::hausdorff::{check_snap, hausdorff_with, FiniteCompact, Strategy};
use crate::metric::{DislocatedMetric, Point};

/// Which Hutchinson operator of the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operator {
    T,
    S,
}

impl Operator {
    pub fn other(self) -> Operator {
        match self {
            Operator::T => Operator::S,
            Operator::S => Operator::T,
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operator::T => "T",
            Operator::S => "S",
        })
    }
}

/// A generalized iterated function system: map pairs `(f_n, g_n)` with
/// declared per-pair contraction factors.
#[derive(Debug, Clone, PartialEq)]
pub struct GifsSystem {
    metric: DislocatedMetric,
    f_maps: Vec<AffineMap>,
    g_maps: Vec<AffineMap>,
    alphas: Vec<f64>,
    alpha_star: f64,
}

impl GifsSystem {
    /// Structural validation only; the declared factors are checked by
    /// [`check_pair_contraction`].
    pub fn new(
        metric: DislocatedMetric,
        f_maps: Vec<AffineMap>,
        g_maps: Vec<AffineMap>,
        alphas: Vec<f64>,
    ) -> Result<Self> {
        let n = f_maps.len();
        if n == 0 {
            return Err(Error::InvalidSystem("at least one map pair is required".into()));
        }
        if g_maps.len() != n || alphas.len() != n {
            return Err(Error::InvalidSystem(format!(
                "{n} f-maps need {n} g-maps and {n} alphas (got {} and {})",
                g_maps.len(),
                alphas.len()
            )));
        }
        let d = metric.dimension();
        if let Some(m) = f_maps.iter().chain(&g_maps).find(|m| m.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: m.dim(),
            });
        }
        if let Some(a) = alphas.iter().find(|a| !(0.0..1.0).contains(*a)) {
            return Err(Error::InvalidSystem(format!("contraction factor {a} outside [0, 1)")));
        }
        let alpha_star = alphas.iter().copied().fold(0.0, f64::max);
        Ok(GifsSystem {
            metric,
            f_maps,
            g_maps,
            alphas,
            alpha_star,
        })
    }

    /// Classical IFS: `g_n = f_n`.
    pub fn symmetric(metric: DislocatedMetric, maps: Vec<AffineMap>, alphas: Vec<f64>) -> Result<Self> {
        Self::new(metric, maps.clone(), maps, alphas)
    }

    pub fn metric(&self) -> &DislocatedMetric {
        &self.metric
    }

    pub fn f_maps(&self) -> &[AffineMap] {
        &self.f_maps
    }

    pub fn g_maps(&self) -> &[AffineMap] {
        &self.g_maps
    }

    pub fn maps(&self, op: Operator) -> &[AffineMap] {
        match op {
            Operator::T => &self.f_maps,
            Operator::S => &self.g_maps,
        }
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn alpha_star(&self) -> f64 {
        self.alpha_star
    }

    pub fn len(&self) -> usize {
        self.f_maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f_maps.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.metric.dimension()
    }

    fn union_image(&self, op: Operator, set: &FiniteCompact, snap: Option<f64>) -> Result<FiniteCompact> {
        if set.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: set.dim(),
            });
        }
        let coords: Vec<f64> = self
            .maps(op)
            .par_iter()
            .map(|m| m.image_coords(set))
            .collect::<Vec<_>>()
            .concat();
        match snap {
            Some(h) => {
                check_snap(h)?;
                FiniteCompact::snapped(set.dim(), coords, h)
            }
            None => FiniteCompact::from_flat(set.dim(), coords),
        }
    }

    /// Hutchinson image under `op`, snapped at spacing `snap`.
    pub fn apply(&self, op: Operator, set: &FiniteCompact, snap: f64) -> Result<FiniteCompact> {
        self.union_image(op, set, Some(snap))
    }

    /// Hutchinson image under `op` without snapping.
    pub fn apply_exact(&self, op: Operator, set: &FiniteCompact) -> Result<FiniteCompact> {
        self.union_image(op, set, None)
    }

    /// `T(B) = f_1(B) u ... u f_N(B)`.
    pub fn hutchinson_t(&self, set: &FiniteCompact, snap: f64) -> Result<FiniteCompact> {
        self.apply(Operator::T, set, snap)
    }

    /// `S(B) = g_1(B) u ... u g_N(B)`.
    pub fn hutchinson_s(&self, set: &FiniteCompact, snap: f64) -> Result<FiniteCompact> {
        self.apply(Operator::S, set, snap)
    }

    /// Euclidean radius bound on the attractor, `max ||t_n|| / (1 - ||M_n||)`,
    /// when every map is a Euclidean contraction.
    pub fn attractor_radius_bound(&self) -> Option<f64> {
        self.f_maps
            .iter()
            .chain(&self.g_maps)
            .map(|m| {
                let n = m.op_norm();
                (n < 1.0).then(|| crate::metric::norm(m.translation()) / (1.0 - n))
            })
            .try_fold(0.0, |acc: f64, r| r.map(|r| acc.max(r)))
    }
}

/// Default snap spacing: `2^-9` of the extent covering the seed and the
/// attractor radius bound (extent 1 when both are degenerate).
pub fn default_snap(sys: &GifsSystem, seed: &FiniteCompact) -> f64 {
    let mut extent = seed.diameter().max(seed.max_norm());
    if let Some(r) = sys.attractor_radius_bound() {
        extent = extent.max(2.0 * r);
    }
    if !(extent.is_finite() && extent > 0.0) {
        extent = 1.0;
    }
    extent / 512.0
}

/// Point-level statistics for one map pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairContraction {
    pub index: usize,
    pub alpha: f64,
    /// Largest `delta(f x, g y) / delta(x, y)` over the sample.
    pub max_ratio: f64,
    pub worst: Option<(Point, Point)>,
    pub passed: bool,
}

/// Set-level spot check of `H(T U, S V) <= alpha* H(U, V)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftReport {
    pub trials: usize,
    /// Largest `H(T U, S V) - alpha* H(U, V)`.
    pub max_excess: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    pub pairs: Vec<PairContraction>,
    pub evaluated: usize,
    pub skipped_degenerate: usize,
    pub lift: Option<LiftReport>,
    pub tol: f64,
    pub passed: bool,
}

/// Parameters for the set-level part of [`check_pair_contraction`]. Random
/// sets are drawn as subsets of the sampled points so they stay in the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftCheck {
    pub trials: usize,
    pub max_set_size: usize,
    pub seed: u64,
}

/// Samples `delta(f_n x, g_n y) <= alpha_n delta(x, y)` for each pair and,
/// optionally, the lifted inequality on random set pairs. Images are exact
/// (unsnapped) here.
pub fn check_pair_contraction(
    sys: &GifsSystem,
    sample_pairs: &[(Point, Point)],
    tol: f64,
    lift: Option<LiftCheck>,
) -> Result<ContractionReport> {
    if sample_pairs.is_empty() {
        return Err(Error::InvalidInput("contraction sample is empty".into()));
    }
    let metric = sys.metric();
    for (x, y) in sample_pairs {
        metric.check_coords(x.coords())?;
        metric.check_coords(y.coords())?;
    }
    let usable: Vec<&(Point, Point)> = sample_pairs
        .iter()
        .filter(|(x, y)| metric.eval(x.coords(), y.coords()) > 0.0)
        .collect();
    if usable.is_empty() {
        return Err(Error::DegenerateSample);
    }

    let mut pairs = Vec::with_capacity(sys.len());
    for (index, ((f, g), &alpha)) in sys.f_maps().iter().zip(sys.g_maps()).zip(sys.alphas()).enumerate() {
        let mut max_ratio: f64 = 0.0;
        let mut worst = None;
        for (x, y) in &usable {
            let fx = f.apply(x.coords());
            let gy = g.apply(y.coords());
            metric.check_coords(&fx)?;
            metric.check_coords(&gy)?;
            let ratio = metric.eval(&fx, &gy) / metric.eval(x.coords(), y.coords());
            if ratio > max_ratio || worst.is_none() {
                max_ratio = max_ratio.max(ratio);
                worst = Some((x.clone(), y.clone()));
            }
        }
        pairs.push(PairContraction {
            index,
            alpha,
            max_ratio,
            worst,
            passed: max_ratio <= alpha + tol,
        });
    }

    let lift = match lift {
        Some(cfg) => Some(lift_check(sys, sample_pairs, tol, cfg)?),
        None => None,
    };
    let passed = pairs.iter().all(|p| p.passed) && lift.as_ref().is_none_or(|l| l.passed);
    Ok(ContractionReport {
        pairs,
        evaluated: usable.len(),
        skipped_degenerate: sample_pairs.len() - usable.len(),
        lift,
        tol,
        passed,
    })
}

fn lift_check(sys: &GifsSystem, sample_pairs: &[(Point, Point)], tol: f64, cfg: LiftCheck) -> Result<LiftReport> {
    let pool: Vec<&Point> = sample_pairs.iter().flat_map(|(x, y)| [x, y]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let max_size = cfg.max_set_size.clamp(1, pool.len());
    let draw = |rng: &mut ChaCha8Rng| {
        let k = rng.random_range(1..=max_size);
        let pts: Vec<Point> = pool.choose_multiple(rng, k).map(|p| (*p).clone()).collect();
        FiniteCompact::new(pts)
    };
    let mut max_excess = f64::NEG_INFINITY;
    for _ in 0..cfg.trials {
        let u = draw(&mut rng)?;
        let v = draw(&mut rng)?;
        let tu = sys.apply_exact(Operator::T, &u)?;
        let sv = sys.apply_exact(Operator::S, &v)?;
        let lhs = hausdorff_with(sys.metric(), &tu, &sv, Strategy::Accelerated)?;
        let rhs = sys.alpha_star() * hausdorff_with(sys.metric(), &u, &v, Strategy::Accelerated)?;
        max_excess = max_excess.max(lhs - rhs);
    }
    Ok(LiftReport {
        trials: cfg.trials,
        max_excess,
        passed: cfg.trials == 0 || max_excess <= tol,
    })
}
