//! Well-posedness of the common-attractor problem: sets with vanishing
//! residuals `H(T(A_n), A_n)` and `H(S(A_n), A_n)` must approach the attractor.
//! Sequences are jittered copies of the attractor at shrinking scales, plus
//! the alternating iteration sequence itself. Each member is tested against
//! `H(A_n, A*) <= min(res_T, res_S) / (1 - alpha*) + slack`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gifs::{converged_attractor, GifsSystem, IterationConfig, Operator};
use crate::hausdorff::{hausdorff_with, FiniteCompact, Strategy};
use crate::metric::DislocatedMetric;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    pub scale: f64,
    pub seed: u64,
}

/// Scales `start, start/2, ...` (`generations` of them) followed by a zero
/// row, seeded `0, 1, 2, ...`.
pub fn halving_perturbations(start: f64, generations: usize) -> Vec<Perturbation> {
    (0..generations)
        .map(|k| start / 2f64.powi(k as i32))
        .chain(std::iter::once(0.0))
        .enumerate()
        .map(|(i, scale)| Perturbation { scale, seed: i as u64 })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WellposednessRow {
    pub scale: f64,
    pub residual_t: f64,
    pub residual_s: f64,
    pub distance: f64,
    /// `min(residual_t, residual_s) / (1 - alpha*)`.
    pub bound: f64,
    pub size: usize,
}

impl WellposednessRow {
    fn holds(&self, slack: f64) -> bool {
        self.distance <= self.bound + slack
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WellposednessReport {
    pub alpha: f64,
    pub attractor: FiniteCompact,
    pub rows: Vec<WellposednessRow>,
    /// Rows for `B_0, B_1, ...` of the alternating iteration.
    pub sequence_rows: Vec<WellposednessRow>,
    /// Largest `distance (1 - alpha) / residual` over rows whose residual
    /// exceeds the slack.
    pub constant: f64,
    pub slack: f64,
    pub verdict: bool,
}

impl WellposednessReport {
    pub fn residuals_t(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.residual_t).collect()
    }

    pub fn residuals_s(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.residual_s).collect()
    }

    pub fn distances_to_attractor(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.distance).collect()
    }

    /// Comma-delimited `scale,residual_T,residual_S,distance,bound`.
    pub fn to_table(&self) -> String {
        let mut out = String::from("scale,residual_T,residual_S,distance,bound\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:e},{:e},{:e},{:e}",
                r.scale, r.residual_t, r.residual_s, r.distance, r.bound
            );
        }
        out
    }
}

/// Moves every point by a seeded offset of Euclidean length at most `scale`.
/// On the abs-max half line offsets are reflected at zero.
pub fn jitter(metric: &DislocatedMetric, set: &FiniteCompact, scale: f64, seed: u64) -> Result<FiniteCompact> {
    if let DislocatedMetric::Table(_) = metric {
        return Err(Error::Unsupported("cannot jitter points of a table metric".into()));
    }
    let d = set.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = set.coords().to_vec();
    let mut offset = vec![0.0; d];
    for p in coords.chunks_exact_mut(d) {
        // Uniform in the unit ball by rejection.
        loop {
            offset.iter_mut().for_each(|o| *o = rng.random_range(-1.0..1.0));
            if crate::metric::norm(&offset) <= 1.0 {
                break;
            }
        }
        for (c, o) in p.iter_mut().zip(&offset) {
            *c += scale * o;
        }
        if let DislocatedMetric::AbsMax { .. } = metric {
            p[0] = p[0].abs();
        }
    }
    FiniteCompact::from_flat(d, coords)
}

fn row(
    sys: &GifsSystem,
    a_star: &FiniteCompact,
    a_n: &FiniteCompact,
    scale: f64,
    strategy: Strategy,
) -> Result<WellposednessRow> {
    let metric = sys.metric();
    let residual_t = hausdorff_with(metric, &sys.apply_exact(Operator::T, a_n)?, a_n, strategy)?;
    let residual_s = hausdorff_with(metric, &sys.apply_exact(Operator::S, a_n)?, a_n, strategy)?;
    let distance = hausdorff_with(metric, a_n, a_star, strategy)?;
    Ok(WellposednessRow {
        scale,
        residual_t,
        residual_s,
        distance,
        bound: residual_t.min(residual_s) / (1.0 - sys.alpha_star()),
        size: a_n.len(),
    })
}

pub fn wellposedness_check(
    sys: &GifsSystem,
    seed_set: &FiniteCompact,
    perturbations: &[Perturbation],
    cfg: &IterationConfig,
) -> Result<WellposednessReport> {
    if perturbations.is_empty() {
        return Err(Error::InvalidInput("no perturbation scales given".into()));
    }
    if perturbations.iter().any(|p| !(p.scale >= 0.0 && p.scale.is_finite())) {
        return Err(Error::InvalidInput(
            "perturbation scales must be finite and >= 0".into(),
        ));
    }
    if perturbations.windows(2).any(|w| w[1].scale >= w[0].scale) {
        return Err(Error::InvalidInput("perturbation scales must strictly decrease".into()));
    }
    let trace = converged_attractor(sys, seed_set, cfg)?;
    let a_star = trace.attractor;
    let alpha = sys.alpha_star();
    let slack = 2.0 * cfg.tol + 2.0 * cfg.snap;

    let rows = perturbations
        .par_iter()
        .map(|p| {
            let a_n = jitter(sys.metric(), &a_star, p.scale, p.seed)?;
            row(sys, &a_star, &a_n, p.scale, cfg.strategy)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut sequence = vec![seed_set.clone()];
    let mut op = Operator::T;
    for _ in 0..trace.steps.len() {
        let next = sys.apply(op, sequence.last().expect("nonempty"), cfg.snap)?;
        sequence.push(next);
        op = op.other();
    }
    let sequence_rows = sequence
        .par_iter()
        .map(|b| row(sys, &a_star, b, f64::NAN, cfg.strategy))
        .collect::<Result<Vec<_>>>()?;

    let constant = rows
        .iter()
        .chain(&sequence_rows)
        .filter(|r| r.residual_t.min(r.residual_s) > slack)
        .map(|r| r.distance * (1.0 - alpha) / r.residual_t.min(r.residual_s))
        .fold(0.0, f64::max);
    let verdict = rows.iter().chain(&sequence_rows).all(|r| r.holds(slack));
    Ok(WellposednessReport {
        alpha,
        attractor: a_star,
        rows,
        sequence_rows,
        constant,
        slack,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gifs::standard::cantor_system;
    use crate::gifs::AffineMap;

    #[test]
    fn jitter_bounded_and_deterministic() {
        let m = DislocatedMetric::euclidean(1.0, 0.0, 2).unwrap();
        let set = FiniteCompact::from_flat(2, (0..40).map(|i| i as f64 * 0.1).collect()).unwrap();
        let a = jitter(&m, &set, 0.05, 9).unwrap();
        assert_eq!(a, jitter(&m, &set, 0.05, 9).unwrap());
        assert!(hausdorff_with(&m, &a, &set, Strategy::Exhaustive).unwrap() <= 0.05);
        assert_eq!(jitter(&m, &set, 0.0, 9).unwrap(), set);
        let half = DislocatedMetric::abs_max(1.0, 1.0).unwrap();
        let low = FiniteCompact::from_scalars(&[0.0, 0.01]).unwrap();
        let j = jitter(&half, &low, 0.5, 1).unwrap();
        assert!(j.coords().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn zero_perturbation_row() {
        let sys = cantor_system().unwrap();
        let snap = 3f64.powi(-7);
        let cfg = IterationConfig::new(2.0 * snap, 200, snap);
        let seed = FiniteCompact::from_scalars(&[0.0]).unwrap();
        let r = wellposedness_check(&sys, &seed, &[Perturbation { scale: 0.0, seed: 0 }], &cfg).unwrap();
        let row = &r.rows[0];
        assert!(row.residual_t <= 2.0 * cfg.tol && row.residual_s <= 2.0 * cfg.tol);
        assert!(row.distance <= 2.0 * cfg.tol);
        assert!(r.verdict);
    }

    #[test]
    fn identity_maps_leave_perturbations_unrepaired() {
        let sys = GifsSystem::symmetric(
            DislocatedMetric::euclidean(1.0, 0.0, 1).unwrap(),
            vec![AffineMap::identity(1).unwrap()],
            vec![0.9],
        )
        .unwrap();
        let seed = FiniteCompact::from_scalars(&[0.0, 0.5, 1.0]).unwrap();
        let cfg = IterationConfig::new(1e-3, 20, 1e-4);
        let r = wellposedness_check(&sys, &seed, &halving_perturbations(0.1, 3), &cfg).unwrap();
        assert!(!r.verdict);
        assert_eq!(r.rows[0].residual_t, 0.0);
    }

    #[test]
    fn rejects_non_decreasing_scales() {
        let sys = cantor_system().unwrap();
        let seed = FiniteCompact::from_scalars(&[0.0]).unwrap();
        let cfg = IterationConfig::new(1e-3, 50, 1e-4);
        let p = [
            Perturbation { scale: 0.1, seed: 0 },
            Perturbation { scale: 0.1, seed: 1 },
        ];
        assert!(wellposedness_check(&sys, &seed, &p, &cfg).is_err());
    }

    #[test]
    fn table_format() {
        assert_eq!(
            halving_perturbations(0.1, 2)
                .iter()
                .map(|p| p.scale)
                .collect::<Vec<_>>(),
            vec![0.1, 0.05, 0.0]
        );
        let sys = cantor_system().unwrap();
        let seed = FiniteCompact::from_scalars(&[0.0]).unwrap();
        let cfg = IterationConfig::new(2e-3, 50, 1e-3);
        let r = wellposedness_check(&sys, &seed, &halving_perturbations(0.1, 2), &cfg).unwrap();
        let t = r.to_table();
        assert!(t.starts_with("scale,residual_T,residual_S,distance,bound\n0.1,"));
        assert_eq!(t.lines().count(), 4);
    }
}
