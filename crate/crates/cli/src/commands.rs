use std::fmt::Write as _;
use std::path::Path;

use gifs_core::collage::{collage_certificate, collage_fit, FitConfig};
use gifs_core::gifs::{check_pair_contraction, default_snap, iterate_to_attractor, ContractionReport, LiftCheck};
use gifs_core::hausdorff::hausdorff_with;
use gifs_core::io::{cloud_from_raster, parse_cloud, parse_pgm, read_cloud, render as render_cloud, write_cloud};
use gifs_core::metric::{default_axiom_tol, verify_axioms};
use gifs_core::wellposed::{halving_perturbations, wellposedness_check};
use gifs_core::{DislocatedMetric, FiniteCompact, GifsSystem, IterationConfig, Point, Strategy};

use crate::document::SystemDocument;
use crate::output::{emit, trace_path, write_atomic};
use crate::sample::{all_pairs, axiom_sample, domain_sample};
use crate::{CliError, Format, RunFlags};

const DEFAULT_MAX_ITER: usize = 500;

fn strategy(flags: &RunFlags) -> Strategy {
    if flags.exhaustive {
        Strategy::Exhaustive
    } else {
        Strategy::Accelerated
    }
}

fn rng_seed(doc: &SystemDocument, flags: &RunFlags) -> u64 {
    flags.seed.or(doc.run.rng_seed).unwrap_or(0)
}

/// Flags override the document; tol defaults to twice the snap spacing.
fn iteration_config(doc: &SystemDocument, flags: &RunFlags, default_snap: f64) -> Result<IterationConfig, CliError> {
    let snap = flags.snap.or(doc.run.snap).unwrap_or(default_snap);
    let tol = flags.tol.or(doc.run.tol).unwrap_or(2.0 * snap);
    let max_iter = flags.max_iter.or(doc.run.max_iter).unwrap_or(DEFAULT_MAX_ITER);
    if !(snap > 0.0 && snap.is_finite()) {
        return Err(CliError::Input(format!("snap must be positive, got {snap}")));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Input(format!("tol must be positive, got {tol}")));
    }
    Ok(IterationConfig::new(tol, max_iter, snap).with_strategy(strategy(flags)))
}

fn fmt_point(metric: &DislocatedMetric, p: &Point) -> String {
    match metric {
        DislocatedMetric::Table(t) => t.labels()[p.coords()[0] as usize].clone(),
        _ => format!("{:?}", p.coords()),
    }
}

pub fn check_metric(path: &Path, flags: &RunFlags) -> Result<bool, CliError> {
    let doc = SystemDocument::load(path)?;
    let metric = doc.metric()?;
    let sample = axiom_sample(&metric, rng_seed(&doc, flags));
    let tol = flags.tol.unwrap_or_else(|| default_axiom_tol(&metric, &sample));
    let r = verify_axioms(&metric, &sample, tol)?;
    let mut out = String::new();
    let _ = writeln!(out, "sample_size = {}", r.sample_size);
    let _ = writeln!(out, "triples_checked = {}", r.triples_checked);
    let _ = writeln!(out, "identity_violations = {}", r.identity_violations);
    let _ = writeln!(out, "max_symmetry_violation = {:e}", r.max_symmetry_violation);
    let _ = writeln!(out, "max_triangle_violation = {:e}", r.max_triangle_violation);
    if let Some([i, j, k]) = r.worst_triangle {
        let name = |i: usize| fmt_point(&metric, &sample[i]);
        let _ = writeln!(out, "worst_triangle = ({}, {}, {})", name(i), name(j), name(k));
    }
    let _ = writeln!(out, "tol = {:e}", r.tol);
    let _ = writeln!(out, "passed = {}", r.passed);
    emit(None, &out)?;
    Ok(r.passed)
}

fn contraction(sys: &GifsSystem, seed_set: &FiniteCompact, rng: u64) -> Result<ContractionReport, CliError> {
    let pairs = all_pairs(&domain_sample(sys, seed_set, rng));
    let lift = LiftCheck {
        trials: 32,
        max_set_size: 12,
        seed: rng,
    };
    Ok(check_pair_contraction(sys, &pairs, 1e-9, Some(lift))?)
}

/// Prints a failure summary to stderr and reports whether the check passed.
fn require_contraction(sys: &GifsSystem, seed_set: &FiniteCompact, rng: u64) -> Result<bool, CliError> {
    let r = contraction(sys, seed_set, rng)?;
    if !r.passed {
        eprintln!("contraction check failed:");
        for p in r.pairs.iter().filter(|p| !p.passed) {
            eprintln!(
                "  map[{}]: ratio {:e} exceeds alpha {}",
                p.index + 1,
                p.max_ratio,
                p.alpha
            );
        }
        if let Some(l) = r.lift.as_ref().filter(|l| !l.passed) {
            eprintln!("  set-level excess {:e} over {} trials", l.max_excess, l.trials);
        }
    }
    Ok(r.passed)
}

pub fn attractor(
    path: &Path,
    output: Option<&Path>,
    format: Format,
    size: (usize, usize),
    flags: &RunFlags,
) -> Result<bool, CliError> {
    let doc = SystemDocument::load(path)?;
    let sys = doc.system()?;
    let seed_set = doc.seed_set(sys.dim())?;
    let cfg = iteration_config(&doc, flags, default_snap(&sys, &seed_set))?;
    if !require_contraction(&sys, &seed_set, rng_seed(&doc, flags))? {
        return Ok(false);
    }
    let trace = iterate_to_attractor(&sys, &seed_set, &cfg)?;
    let table = trace.to_table();
    match format {
        Format::Cloud => {
            emit(output, &write_cloud(&trace.attractor))?;
            if let Some(p) = output {
                write_atomic(&trace_path(p), table.as_bytes())?;
            }
        }
        Format::Trace => emit(output, &table)?,
        Format::Raster => {
            let p = output.ok_or_else(|| CliError::Input("--format raster needs --output".into()))?;
            write_atomic(p, &render_cloud(&trace.attractor, size.0, size.1)?.to_pgm())?;
            write_atomic(&trace_path(p), table.as_bytes())?;
        }
    }
    eprintln!(
        "steps = {}, points = {}, tail_bound = {:e}, residual_T = {:e}, residual_S = {:e}",
        trace.steps.len(),
        trace.attractor.len(),
        trace.tail_bound,
        trace.residual_t,
        trace.residual_s
    );
    if !trace.converged {
        eprintln!("no convergence within {} iterations", cfg.max_iter);
    } else if !trace.fixed_set_ok {
        eprintln!("fixed-set check failed (allowance {:e})", 2.0 * cfg.tol);
    }
    Ok(trace.converged && trace.fixed_set_ok)
}

fn load_cloud(path: &Path, dim: usize) -> Result<FiniteCompact, CliError> {
    let fail = |e: gifs_core::Error| CliError::Input(format!("{}: {e}", path.display()));
    let set = read_cloud(path).map_err(fail)?;
    if set.dim() != dim {
        return Err(CliError::Input(format!(
            "{}: cloud is {}-dimensional, metric expects {dim}",
            path.display(),
            set.dim()
        )));
    }
    Ok(set)
}

pub fn distance(path: &Path, a: &Path, b: &Path, flags: &RunFlags) -> Result<bool, CliError> {
    let doc = SystemDocument::load(path)?;
    let metric = doc.metric()?;
    let d = metric.dimension();
    let (a, b) = (load_cloud(a, d)?, load_cloud(b, d)?);
    let h = hausdorff_with(&metric, &a, &b, strategy(flags))?;
    emit(None, &format!("{h}\n"))?;
    Ok(true)
}

/// A cloud file, or a PGM whose lit pixels become lattice points.
fn load_target(path: &Path) -> Result<FiniteCompact, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let fail = |e: gifs_core::Error| CliError::Input(format!("{}: {e}", path.display()));
    if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        cloud_from_raster(&parse_pgm(&bytes).map_err(fail)?).map_err(fail)
    } else {
        let text =
            String::from_utf8(bytes).map_err(|_| CliError::Input(format!("{}: not UTF-8 text", path.display())))?;
        parse_cloud(&text).map_err(fail)
    }
}

pub fn collage(
    path: &Path,
    target_path: &Path,
    fit: bool,
    output: Option<&Path>,
    flags: &RunFlags,
) -> Result<bool, CliError> {
    let doc = SystemDocument::load(path)?;
    let target = load_target(target_path)?;
    let rng = rng_seed(&doc, flags);
    let mut out = String::new();
    let cert = if fit {
        let (family, section) = doc.fit_family()?;
        if target.dim() != family.metric.dimension() {
            return Err(CliError::Input("target dimension does not match the metric".into()));
        }
        let extent = target.diameter().max(target.max_norm());
        let snap_default = if extent > 0.0 { extent / 512.0 } else { 1.0 / 512.0 };
        let cfg = FitConfig {
            budget: section.budget.unwrap_or(2000),
            starts: section.starts.unwrap_or(4),
            seed: rng,
            iteration: iteration_config(&doc, flags, snap_default)?,
        };
        let r = collage_fit(&target, &family, &cfg)?;
        for (i, m) in r.system.f_maps().iter().enumerate() {
            let _ = writeln!(out, "map[{}].matrix = {:?}", i + 1, m.matrix_rows());
            let _ = writeln!(out, "map[{}].translation = {:?}", i + 1, m.translation());
        }
        let _ = writeln!(out, "evaluations = {}", r.evaluations);
        r.certificate
    } else {
        let sys = doc.system()?;
        if target.dim() != sys.dim() {
            return Err(CliError::Input("target dimension does not match the metric".into()));
        }
        if !require_contraction(&sys, &target, rng)? {
            return Ok(false);
        }
        let cfg = iteration_config(&doc, flags, default_snap(&sys, &target))?;
        collage_certificate(&sys, &target, &cfg)?
    };
    out.push_str(&cert.to_report());
    emit(output, &out)?;
    Ok(cert.holds)
}

pub fn wellposed(path: &Path, output: Option<&Path>, flags: &RunFlags) -> Result<bool, CliError> {
    let doc = SystemDocument::load(path)?;
    let sys = doc.system()?;
    let seed_set = doc.seed_set(sys.dim())?;
    let rng = rng_seed(&doc, flags);
    if !require_contraction(&sys, &seed_set, rng)? {
        return Ok(false);
    }
    let cfg = iteration_config(&doc, flags, default_snap(&sys, &seed_set))?;
    let w = &doc.wellposed;
    let mut perturbations = halving_perturbations(w.start_scale, w.generations);
    for p in &mut perturbations {
        p.seed = p.seed.wrapping_add(rng);
    }
    let r = wellposedness_check(&sys, &seed_set, &perturbations, &cfg)?;
    emit(output, &r.to_table())?;
    eprintln!(
        "constant = {:e}, slack = {:e}, verdict = {}",
        r.constant, r.slack, r.verdict
    );
    Ok(r.verdict)
}

pub fn render(cloud: &Path, raster: &Path, size: (usize, usize)) -> Result<bool, CliError> {
    let set = read_cloud(cloud).map_err(|e| CliError::Input(format!("{}: {e}", cloud.display())))?;
    write_atomic(raster, &render_cloud(&set, size.0, size.1)?.to_pgm())?;
    Ok(true)
}
