//! TOML system documents.
//!
//! ```toml
//! [metric]
//! kind = "euclidean"   # or "abs-max", "table"
//! a = 1.0
//! b = 0.0
//! dimension = 1
//!
//! [[map]]
//! f_matrix = [[0.3333333333333333]]
//! f_translation = [0.0]
//! # g_matrix / g_translation default to the f side
//! alpha = 0.3333333333333333
//!
//! [run]
//! snap = 1e-3
//! seed = [[0.0]]       # or seed_file = "b0.txt", relative to the document
//! ```

use std::path::{Path, PathBuf};

use gifs_core::collage::{MapFamily, ParamRange};
use gifs_core::{AffineMap, DislocatedMetric, DistanceTable, FiniteCompact, FitFamily, GifsSystem};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub metric: MetricSection,
    #[serde(default, rename = "map")]
    pub maps: Vec<MapSection>,
    #[serde(default)]
    pub run: RunSection,
    pub fit: Option<FitSection>,
    #[serde(default)]
    pub wellposed: WellposedSection,
    #[serde(skip)]
    base_dir: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub enum MetricKind {
    Euclidean,
    AbsMax,
    Table,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSection {
    pub kind: MetricKind,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub dimension: Option<usize>,
    pub labels: Option<Vec<String>>,
    pub table: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSection {
    pub f_matrix: Vec<Vec<f64>>,
    pub f_translation: Vec<f64>,
    pub g_matrix: Option<Vec<Vec<f64>>>,
    pub g_translation: Option<Vec<f64>>,
    pub alpha: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub snap: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub seed: Option<Vec<Vec<f64>>>,
    pub seed_file: Option<PathBuf>,
    pub rng_seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitMapSection {
    /// Fixed similarity ratio; mutually exclusive with `matrix`.
    pub ratio: Option<f64>,
    /// Per-entry `[lo, hi]` ranges.
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    pub translation: Vec<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    #[serde(rename = "map")]
    pub maps: Vec<FitMapSection>,
    pub alpha_max: Option<f64>,
    pub budget: Option<usize>,
    pub starts: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WellposedSection {
    pub start_scale: f64,
    pub generations: usize,
}

impl Default for WellposedSection {
    fn default() -> Self {
        WellposedSection {
            start_scale: 0.1,
            generations: 5,
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn field(path: &str, err: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{path}: {err}"))
}

impl SystemDocument {
    pub fn parse(text: &str, origin: &Path) -> Result<Self, CliError> {
        let mut doc: SystemDocument = toml::from_str(text).map_err(|e| {
            let msg = e.message().trim().to_owned();
            match e.span() {
                Some(span) => CliError::Input(format!("{}:{}: {msg}", origin.display(), line_of(text, span.start))),
                None => CliError::Input(format!("{}: {msg}", origin.display())),
            }
        })?;
        doc.base_dir = origin.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(doc)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path)
    }

    pub fn metric(&self) -> Result<DislocatedMetric, CliError> {
        let m = &self.metric;
        match m.kind {
            MetricKind::Table => {
                let rows = m
                    .table
                    .clone()
                    .ok_or_else(|| field("metric.table", "required for kind = \"table\""))?;
                let labels = m
                    .labels
                    .clone()
                    .unwrap_or_else(|| (0..rows.len()).map(|i| i.to_string()).collect());
                let table = DistanceTable::new(labels, rows).map_err(|e| field("metric.table", e))?;
                Ok(DislocatedMetric::table(table))
            }
            MetricKind::AbsMax => {
                if m.dimension.is_some_and(|d| d != 1) {
                    return Err(field("metric.dimension", "abs-max metrics are one-dimensional"));
                }
                let (a, b) = (self.weight("a")?, self.weight("b")?);
                DislocatedMetric::abs_max(a, b).map_err(|e| field("metric", e))
            }
            MetricKind::Euclidean => {
                let (a, b) = (self.weight("a")?, self.weight("b")?);
                let d = m.dimension.ok_or_else(|| field("metric.dimension", "required"))?;
                DislocatedMetric::euclidean(a, b, d).map_err(|e| field("metric", e))
            }
        }
    }

    fn weight(&self, key: &str) -> Result<f64, CliError> {
        let v = if key == "a" { self.metric.a } else { self.metric.b };
        v.ok_or_else(|| field(&format!("metric.{key}"), "required"))
    }

    pub fn system(&self) -> Result<GifsSystem, CliError> {
        let metric = self.metric()?;
        if let DislocatedMetric::Table(_) = metric {
            return Err(field("metric.kind", "table metrics carry no affine maps"));
        }
        if self.maps.is_empty() {
            return Err(field("map", "at least one [[map]] is required"));
        }
        let mut f = Vec::new();
        let mut g = Vec::new();
        let mut alphas = Vec::new();
        for (i, m) in self.maps.iter().enumerate() {
            let at = |k: &str| format!("map[{}].{k}", i + 1);
            f.push(AffineMap::new(m.f_matrix.clone(), m.f_translation.clone()).map_err(|e| field(&at("f"), e))?);
            let gm = m.g_matrix.clone().unwrap_or_else(|| m.f_matrix.clone());
            let gt = m.g_translation.clone().unwrap_or_else(|| m.f_translation.clone());
            g.push(AffineMap::new(gm, gt).map_err(|e| field(&at("g"), e))?);
            if !(0.0..1.0).contains(&m.alpha) {
                return Err(field(&at("alpha"), format!("{} is outside [0, 1)", m.alpha)));
            }
            alphas.push(m.alpha);
        }
        GifsSystem::new(metric, f, g, alphas).map_err(|e| field("map", e))
    }

    /// `B_0`: inline points, a cloud file, or the origin.
    pub fn seed_set(&self, dim: usize) -> Result<FiniteCompact, CliError> {
        match (&self.run.seed, &self.run.seed_file) {
            (Some(_), Some(_)) => Err(field("run", "give either seed or seed_file, not both")),
            (Some(pts), None) => {
                if let Some(p) = pts.iter().find(|p| p.len() != dim) {
                    return Err(field("run.seed", format!("point {p:?} is not {dim}-dimensional")));
                }
                FiniteCompact::from_flat(dim, pts.concat()).map_err(|e| field("run.seed", e))
            }
            (None, Some(file)) => {
                let path = self.base_dir.join(file);
                let set = gifs_core::io::read_cloud(&path).map_err(|e| field(&path.display().to_string(), e))?;
                if set.dim() != dim {
                    return Err(field(
                        "run.seed_file",
                        format!("cloud is {}-dimensional, expected {dim}", set.dim()),
                    ));
                }
                Ok(set)
            }
            (None, None) => FiniteCompact::from_flat(dim, vec![0.0; dim]).map_err(|e| field("run.seed", e)),
        }
    }

    pub fn fit_family(&self) -> Result<(FitFamily, &FitSection), CliError> {
        let fit = self
            .fit
            .as_ref()
            .ok_or_else(|| field("fit", "a [fit] section is required with --fit"))?;
        let metric = self.metric()?;
        let d = metric.dimension();
        let range = |r: &[f64; 2]| ParamRange::new(r[0], r[1]);
        let mut maps = Vec::new();
        for (i, m) in fit.maps.iter().enumerate() {
            let at = |k: &str| format!("fit.map[{}].{k}", i + 1);
            if m.translation.len() != d {
                return Err(field(&at("translation"), format!("expected {d} ranges")));
            }
            let translation = m.translation.iter().map(range).collect();
            maps.push(match (m.ratio, &m.matrix) {
                (Some(r), None) => MapFamily::fixed_ratio(r, translation),
                (None, Some(rows)) => MapFamily {
                    matrix: rows.iter().map(|row| row.iter().map(range).collect()).collect(),
                    translation,
                },
                _ => return Err(field(&at("ratio"), "give exactly one of ratio or matrix")),
            });
        }
        let family = FitFamily {
            metric,
            maps,
            alpha_max: fit.alpha_max.unwrap_or(0.95),
        };
        Ok((family, fit))
    }
}
