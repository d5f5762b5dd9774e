//! Collage bound `H(A, U) <= eps / (1 - alpha)` for a target set `A` and the
//! common attractor `U`, and an inverse search that minimizes the collage
//! distance over a box of affine parameters.

use std::cmp::Ordering;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gifs::{converged_attractor, AffineMap, GifsSystem, IterationConfig, Operator};
use crate::hausdorff::{hausdorff_with, FiniteCompact, Strategy};
use crate::metric::DislocatedMetric;

#[derive(Debug, Clone, PartialEq)]
pub struct CollageCertificate {
    /// `min(eps_t, eps_s)`.
    pub epsilon: f64,
    /// `H(A, T(A))`.
    pub epsilon_t: f64,
    /// `H(A, S(A))`.
    pub epsilon_s: f64,
    pub alpha: f64,
    /// `epsilon / (1 - alpha)`.
    pub bound: f64,
    /// `H(A, U)` against the computed attractor.
    pub measured_error: f64,
    /// `bound - measured_error`.
    pub slack: f64,
    /// Discretization allowance `2 tol + 2 snap`.
    pub allowance: f64,
    pub holds: bool,
    pub attractor_size: usize,
}

impl CollageCertificate {
    /// `key = value` lines.
    pub fn to_report(&self) -> String {
        let mut out = String::new();
        let rows: [(&str, String); 10] = [
            ("epsilon", format!("{:e}", self.epsilon)),
            ("epsilon_t", format!("{:e}", self.epsilon_t)),
            ("epsilon_s", format!("{:e}", self.epsilon_s)),
            ("alpha", format!("{}", self.alpha)),
            ("bound", format!("{:e}", self.bound)),
            ("measured_error", format!("{:e}", self.measured_error)),
            ("slack", format!("{:e}", self.slack)),
            ("allowance", format!("{:e}", self.allowance)),
            ("attractor_size", self.attractor_size.to_string()),
            ("holds", self.holds.to_string()),
        ];
        for (k, v) in rows {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

/// Collage distances use exact images of the target; the attractor comes from
/// iterating the system from the target with the configured snap.
pub fn collage_certificate(
    sys: &GifsSystem,
    target: &FiniteCompact,
    cfg: &IterationConfig,
) -> Result<CollageCertificate> {
    let metric = sys.metric();
    let epsilon_t = hausdorff_with(metric, target, &sys.apply_exact(Operator::T, target)?, cfg.strategy)?;
    let epsilon_s = hausdorff_with(metric, target, &sys.apply_exact(Operator::S, target)?, cfg.strategy)?;
    let epsilon = epsilon_t.min(epsilon_s);
    let alpha = sys.alpha_star();
    let bound = epsilon / (1.0 - alpha);
    let trace = converged_attractor(sys, target, cfg)?;
    let measured_error = hausdorff_with(metric, target, &trace.attractor, cfg.strategy)?;
    let allowance = 2.0 * cfg.tol + 2.0 * cfg.snap;
    Ok(CollageCertificate {
        epsilon,
        epsilon_t,
        epsilon_s,
        alpha,
        bound,
        measured_error,
        slack: bound - measured_error,
        allowance,
        holds: measured_error <= bound + allowance,
        attractor_size: trace.attractor.len(),
    })
}

/// Closed interval of one parameter; `lo == hi` fixes it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
}

impl ParamRange {
    pub fn new(lo: f64, hi: f64) -> Self {
        ParamRange { lo, hi }
    }

    pub fn fixed(v: f64) -> Self {
        ParamRange { lo: v, hi: v }
    }

    fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Parameter box for one affine map.
#[derive(Debug, Clone, PartialEq)]
pub struct MapFamily {
    /// Row-major `d x d` ranges.
    pub matrix: Vec<Vec<ParamRange>>,
    pub translation: Vec<ParamRange>,
}

impl MapFamily {
    /// Similarity with a fixed ratio and searched translations.
    pub fn fixed_ratio(ratio: f64, translation: Vec<ParamRange>) -> Self {
        let d = translation.len();
        let matrix = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| ParamRange::fixed(if i == j { ratio } else { 0.0 }))
                    .collect()
            })
            .collect();
        MapFamily { matrix, translation }
    }
}

/// Search space for [`collage_fit`]. Candidates are classical systems
/// (`g_n = f_n`) with `alpha_n` set to the operator norm of `f_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FitFamily {
    pub metric: DislocatedMetric,
    pub maps: Vec<MapFamily>,
    pub alpha_max: f64,
}

impl FitFamily {
    fn ranges(&self) -> Vec<ParamRange> {
        self.maps
            .iter()
            .flat_map(|m| m.matrix.iter().flatten().chain(&m.translation).copied())
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.maps.is_empty() {
            return Err(Error::EmptyFamily("no maps in family".into()));
        }
        if !(self.alpha_max > 0.0 && self.alpha_max < 1.0) {
            return Err(Error::EmptyFamily(format!(
                "alpha_max must lie in (0, 1), got {}",
                self.alpha_max
            )));
        }
        let d = self.metric.dimension();
        for m in &self.maps {
            if m.translation.len() != d || m.matrix.len() != d || m.matrix.iter().any(|r| r.len() != d) {
                return Err(Error::InvalidInput(format!(
                    "map family shape does not match dimension {d}"
                )));
            }
        }
        if let Some(r) = self
            .ranges()
            .iter()
            .find(|r| !r.lo.is_finite() || !r.hi.is_finite() || r.lo > r.hi)
        {
            return Err(Error::EmptyFamily(format!(
                "empty parameter range [{}, {}]",
                r.lo, r.hi
            )));
        }
        Ok(())
    }

    /// Builds the candidate system, or `None` when some map exceeds `alpha_max`.
    pub fn system(&self, params: &[f64]) -> Result<Option<GifsSystem>> {
        let d = self.metric.dimension();
        let per_map = d * d + d;
        let mut maps = Vec::with_capacity(self.maps.len());
        for chunk in params.chunks_exact(per_map) {
            let matrix = chunk[..d * d].chunks_exact(d).map(<[f64]>::to_vec).collect();
            maps.push(AffineMap::new(matrix, chunk[d * d..].to_vec())?);
        }
        if maps.iter().any(|m| m.op_norm() > self.alpha_max) {
            return Ok(None);
        }
        let alphas = maps.iter().map(AffineMap::op_norm).collect();
        GifsSystem::symmetric(self.metric.clone(), maps, alphas).map(Some)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    /// Maximum number of candidate evaluations.
    pub budget: usize,
    pub starts: usize,
    pub seed: u64,
    /// Used for the final certificate only.
    pub iteration: IterationConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub system: GifsSystem,
    /// Winning parameter vector, maps sorted lexicographically.
    pub params: Vec<f64>,
    /// Collage distance `H(target, T(target))` of the winner.
    pub epsilon: f64,
    pub evaluations: usize,
    pub certificate: CollageCertificate,
}

struct Search<'a> {
    target: &'a FiniteCompact,
    family: &'a FitFamily,
    strategy: Strategy,
    remaining: usize,
    evaluations: usize,
}

impl Search<'_> {
    /// `None` when the budget is spent; `Some(INFINITY)` for infeasible candidates.
    fn score(&mut self, params: &[f64]) -> Result<Option<f64>> {
        if self.remaining == 0 {
            return Ok(None);
        }
        self.remaining -= 1;
        self.evaluations += 1;
        let Some(sys) = self.family.system(params)? else {
            return Ok(Some(f64::INFINITY));
        };
        let image = match sys.apply_exact(Operator::T, self.target) {
            Ok(img) => img,
            Err(Error::InvalidPoint(_)) => return Ok(Some(f64::INFINITY)),
            Err(e) => return Err(e),
        };
        match hausdorff_with(sys.metric(), self.target, &image, self.strategy) {
            Ok(v) => Ok(Some(v)),
            Err(Error::InvalidPoint(_)) => Ok(Some(f64::INFINITY)),
            Err(e) => Err(e),
        }
    }
}

fn better(a: (f64, &[f64]), b: (f64, &[f64])) -> bool {
    match a.0.total_cmp(&b.0) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => a.1.iter().zip(b.1).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()) == Some(Ordering::Less),
    }
}

/// Multi-start coordinate descent on the collage distance
/// `H(target, T(target))`. No attractor is computed during the search; the
/// winner is certified afterwards with [`collage_certificate`].
pub fn collage_fit(target: &FiniteCompact, family: &FitFamily, cfg: &FitConfig) -> Result<FitResult> {
    family.validate()?;
    if cfg.budget == 0 {
        return Err(Error::InvalidInput("budget must be positive".into()));
    }
    let ranges = family.ranges();
    let free: Vec<usize> = (0..ranges.len()).filter(|&i| ranges[i].width() > 0.0).collect();
    let starts = cfg.starts.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut search = Search {
        target,
        family,
        strategy: cfg.iteration.strategy,
        remaining: cfg.budget,
        evaluations: 0,
    };
    let mut best: Option<(f64, Vec<f64>)> = None;

    for start in 0..starts {
        if search.remaining == 0 {
            break;
        }
        let share = search.remaining / (starts - start);
        let stop_at = search.remaining - share.max(1);
        let mut theta: Vec<f64> = ranges
            .iter()
            .map(|r| {
                if start == 0 || r.width() == 0.0 {
                    0.5 * (r.lo + r.hi)
                } else {
                    rng.random_range(r.lo..=r.hi)
                }
            })
            .collect();
        let Some(mut value) = search.score(&theta)? else { break };
        let mut steps: Vec<f64> = free.iter().map(|&i| ranges[i].width() / 4.0).collect();
        let min_steps: Vec<f64> = free.iter().map(|&i| ranges[i].width() * 1e-7).collect();
        'descent: while search.remaining > stop_at && steps.iter().zip(&min_steps).any(|(s, m)| s > m) {
            let mut improved = false;
            for (k, &i) in free.iter().enumerate() {
                for dir in [1.0, -1.0] {
                    let cand = (theta[i] + dir * steps[k]).clamp(ranges[i].lo, ranges[i].hi);
                    if cand == theta[i] {
                        continue;
                    }
                    let mut trial = theta.clone();
                    trial[i] = cand;
                    let Some(v) = search.score(&trial)? else { break 'descent };
                    if v < value {
                        theta = trial;
                        value = v;
                        improved = true;
                        break;
                    }
                    if search.remaining <= stop_at {
                        break 'descent;
                    }
                }
            }
            if !improved {
                steps.iter_mut().for_each(|s| *s *= 0.5);
            }
        }
        let theta = canonical_order(&theta, family.metric.dimension());
        if value.is_finite() && best.as_ref().is_none_or(|(bv, bt)| better((value, &theta), (*bv, bt))) {
            best = Some((value, theta));
        }
    }

    let (epsilon, params) = best.ok_or_else(|| {
        Error::EmptyFamily(format!(
            "no candidate within alpha_max = {} found in {} evaluations",
            family.alpha_max, search.evaluations
        ))
    })?;
    let system = family.system(&params)?.expect("winning candidate was feasible");
    let certificate = collage_certificate(&system, target, &cfg.iteration)?;
    Ok(FitResult {
        system,
        params,
        epsilon,
        evaluations: search.evaluations,
        certificate,
    })
}

/// Sorts per-map parameter blocks lexicographically; the union of images is
/// unchanged.
fn canonical_order(params: &[f64], d: usize) -> Vec<f64> {
    let mut blocks: Vec<&[f64]> = params.chunks_exact(d * d + d).collect();
    // Translation first so maps sort by position.
    blocks.sort_by(|a, b| crate::metric::lex_cmp(&a[d * d..], &b[d * d..]).then_with(|| crate::metric::lex_cmp(a, b)));
    blocks.concat()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gifs::standard::cantor_system;
    use crate::hausdorff::hausdorff_distance;

    fn cfg(snap: f64) -> IterationConfig {
        IterationConfig::new(2.0 * snap, 200, snap)
    }

    #[test]
    fn endpoints_certificate_matches_exhaustive() {
        let sys = cantor_system().unwrap();
        let a = FiniteCompact::from_scalars(&[0.0, 1.0]).unwrap();
        let snap = 3f64.powi(-7);
        let cert = collage_certificate(&sys, &a, &cfg(snap)).unwrap();
        let four = FiniteCompact::from_scalars(&[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]).unwrap();
        let eps = hausdorff_distance(sys.metric(), &a, &four).unwrap();
        assert!((cert.epsilon - eps).abs() < 1e-15);
        assert!((cert.bound - 1.5 * eps).abs() < 1e-12);
        assert!(cert.holds, "{cert:?}");
    }

    #[test]
    fn attractor_has_small_collage() {
        let sys = cantor_system().unwrap();
        let snap = 3f64.powi(-7);
        let c = cfg(snap);
        let a = converged_attractor(&sys, &FiniteCompact::from_scalars(&[0.0]).unwrap(), &c)
            .unwrap()
            .attractor;
        let cert = collage_certificate(&sys, &a, &c).unwrap();
        assert!(cert.epsilon <= 2.0 * c.tol);
        assert!(cert.bound <= 2.0 * c.tol / (1.0 - cert.alpha) + 1e-15);
        assert!(cert.measured_error <= 2.0 * c.tol);
        assert!(cert.holds);
    }

    #[test]
    fn report_lists_all_keys() {
        let sys = cantor_system().unwrap();
        let a = FiniteCompact::from_scalars(&[0.0, 1.0]).unwrap();
        let r = collage_certificate(&sys, &a, &cfg(1e-3)).unwrap().to_report();
        for key in ["epsilon", "alpha", "bound", "measured_error", "slack", "holds"] {
            assert!(r.lines().any(|l| l.starts_with(&format!("{key} = "))), "{key}");
        }
    }

    fn cantor_family() -> FitFamily {
        let third = 1.0 / 3.0;
        FitFamily {
            metric: DislocatedMetric::euclidean(1.0, 0.0, 1).unwrap(),
            maps: vec![
                MapFamily::fixed_ratio(third, vec![ParamRange::new(0.0, 1.0)]),
                MapFamily::fixed_ratio(third, vec![ParamRange::new(0.0, 1.0)]),
            ],
            alpha_max: 0.9,
        }
    }

    #[test]
    fn budget_one_returns_midpoint() {
        let target = FiniteCompact::from_scalars(&[0.0, 0.5, 1.0]).unwrap();
        let fit_cfg = FitConfig {
            budget: 1,
            starts: 4,
            seed: 1,
            iteration: cfg(1e-3),
        };
        let r = collage_fit(&target, &cantor_family(), &fit_cfg).unwrap();
        assert_eq!(r.evaluations, 1);
        let t: Vec<f64> = r.system.f_maps().iter().map(|m| m.translation()[0]).collect();
        assert_eq!(t, vec![0.5, 0.5]);
        assert!(r.certificate.holds);
    }

    #[test]
    fn infeasible_family_rejected() {
        let mut fam = cantor_family();
        fam.alpha_max = 0.2;
        let target = FiniteCompact::from_scalars(&[0.0, 1.0]).unwrap();
        let fit_cfg = FitConfig {
            budget: 10,
            starts: 2,
            seed: 1,
            iteration: cfg(1e-3),
        };
        assert!(matches!(
            collage_fit(&target, &fam, &fit_cfg),
            Err(Error::EmptyFamily(_))
        ));
        let mut bad = cantor_family();
        bad.maps[0].translation[0] = ParamRange::new(1.0, 0.0);
        assert!(matches!(
            collage_fit(&target, &bad, &fit_cfg),
            Err(Error::EmptyFamily(_))
        ));
    }

    #[test]
    fn canonical_order_sorts_by_translation() {
        // Two 1-D maps: [m, t] blocks.
        assert_eq!(canonical_order(&[0.3, 0.6, 0.3, 0.1], 1), vec![0.3, 0.1, 0.3, 0.6]);
        // 2-D: 4 matrix entries then 2 translation entries.
        let p = [1.0, 0.0, 0.0, 1.0, 5.0, 0.0, 0.5, 0.0, 0.0, 0.5, 1.0, 0.0];
        assert_eq!(canonical_order(&p, 2)[4], 1.0);
    }
}
