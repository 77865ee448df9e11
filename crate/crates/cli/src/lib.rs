//! Dataset ingestion, run configuration, experiment execution, and
//! plot-ready report emission for the fair-clustering solver.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use serde::{Deserialize, Serialize};

use fcbc::model::{Bounds, InstanceOf, Norm, ObjectiveKind};
use fcbc::pipeline::{pof_sweep, SeedMethod, SolveReportOf};
use fcbc::search::Grid;

/// CLI-level error with the process exit code it maps to: 2 for config
/// errors, 3 for budget infeasibility, 4 for solver failures.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("dataset file {0} is empty")]
    EmptyDataset(PathBuf),
    #[error("column '{0}' not found in header")]
    MissingColumn(String),
    #[error("non-numeric value '{value}' in feature column '{column}', row {row}")]
    NonNumericFeature { column: String, value: String, row: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Solver(#[from] fcbc::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(fcbc::Error::BudgetInfeasible { .. }) => 3,
            CliError::Solver(fcbc::Error::SolverFailure(_))
            | CliError::Solver(fcbc::Error::PropertyViolation(_)) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Clustering objective selector as it appears on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PNorm {
    Center,
    Median,
    Means,
}

impl PNorm {
    pub fn to_norm(self) -> Norm {
        match self {
            PNorm::Center => Norm::Infinity,
            PNorm::Median => Norm::One,
            PNorm::Means => Norm::Two,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Util,
    Egal,
    Leximin,
}

impl Objective {
    pub fn to_kind(self) -> ObjectiveKind {
        match self {
            Objective::Util => ObjectiveKind::Utilitarian,
            Objective::Egal => ObjectiveKind::Egalitarian,
            Objective::Leximin => ObjectiveKind::Leximin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Seeder {
    KMeansPp,
    Gonzalez,
    LocalSearch,
}

impl Seeder {
    pub fn to_method(self) -> SeedMethod {
        match self {
            Seeder::KMeansPp => SeedMethod::KMeansPp,
            Seeder::Gonzalez => SeedMethod::Gonzalez { first: 0 },
            Seeder::LocalSearch => SeedMethod::LocalSearchKMedian,
        }
    }

    /// The natural seeder of each objective exponent.
    pub fn default_for(p: PNorm) -> Self {
        match p {
            PNorm::Center => Seeder::Gonzalez,
            PNorm::Median => Seeder::LocalSearch,
            PNorm::Means => Seeder::KMeansPp,
        }
    }
}

/// One experiment run: dataset coordinates, fairness bounds derived from a
/// proportion slack δ, a violation grid, and a POF sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub dataset: PathBuf,
    pub color_col: String,
    pub features: Vec<String>,
    pub subsample: Option<usize>,
    pub k: usize,
    pub p: PNorm,
    pub objective: Objective,
    /// Proportion slack δ ∈ [0,1): bounds are (1±δ)·r_h.
    pub delta: f64,
    /// Grid step ε = 1/r.
    pub epsilon: f64,
    pub pof_levels: Vec<f64>,
    pub seed_method: Seeder,
    pub expand_budget: bool,
    pub seed: u64,
    pub standardize: bool,
    /// Raw color-label merges applied before dense ids are assigned.
    pub merge: BTreeMap<String, String>,
    pub out: PathBuf,
}

impl RunConfig {
    /// Validate the pure-config invariants (grid shape, δ range, levels).
    pub fn validate(&self) -> Result<Grid> {
        if !(0.0..1.0).contains(&self.delta) {
            return Err(CliError::InvalidConfig(format!(
                "delta must lie in [0,1), got {}",
                self.delta
            )));
        }
        let grid = parse_epsilon(self.epsilon)?;
        if self.pof_levels.is_empty() {
            return Err(CliError::InvalidConfig("at least one POF level is required".into()));
        }
        if self.pof_levels.windows(2).any(|w| w[0] > w[1]) {
            return Err(CliError::InvalidConfig("POF levels must be sorted ascending".into()));
        }
        if self.pof_levels[0] < 1.0 {
            return Err(CliError::InvalidConfig("POF levels must be at least 1".into()));
        }
        if self.k == 0 {
            return Err(CliError::InvalidConfig("k must be positive".into()));
        }
        Ok(grid)
    }
}

/// ε must be 1/r for an integer r >= 2.
pub fn parse_epsilon(epsilon: f64) -> Result<Grid> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(CliError::InvalidConfig(format!(
            "epsilon must lie in (0,1), got {epsilon}"
        )));
    }
    let r = (1.0 / epsilon).round();
    if ((1.0 / epsilon) - r).abs() > 1e-9 {
        return Err(CliError::InvalidConfig(format!(
            "epsilon must be 1/r for an integer r, got {epsilon}"
        )));
    }
    Grid::new(r as usize).map_err(CliError::from)
}

/// A loaded dataset: the instance plus the merged color labels backing the
/// dense color ids (index = color id).
pub struct LoadedDataset {
    pub instance: InstanceOf<f64>,
    pub color_names: Vec<String>,
}

/// Read a delimited text file (comma-separated, header row) into an
/// instance: selected numeric columns become Euclidean coordinates, the
/// color column is mapped to dense ids (after optional label merging), and
/// an optional seeded uniform subsample shrinks the row set. Bounds are
/// (1±δ)·r_h around the loaded proportions.
pub fn load_dataset(
    path: &Path,
    color_col: &str,
    features: &[String],
    subsample: Option<usize>,
    seed: u64,
    merge: &BTreeMap<String, String>,
    standardize: bool,
    delta: f64,
) -> Result<LoadedDataset> {
    let text = fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| CliError::EmptyDataset(path.to_path_buf()))?
        .split(',')
        .map(str::trim)
        .collect();
    let col_index = |name: &str| -> Result<usize> {
        header
            .iter()
            .position(|&h| h == name)
            .ok_or_else(|| CliError::MissingColumn(name.to_string()))
    };
    let color_idx = col_index(color_col)?;
    let feature_idx: Vec<usize> =
        features.iter().map(|f| col_index(f)).collect::<Result<_>>()?;

    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    for (row, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != header.len() {
            return Err(CliError::InvalidConfig(format!(
                "row {} has {} fields, header has {}",
                row + 1,
                fields.len(),
                header.len()
            )));
        }
        let coords: Vec<f64> = feature_idx
            .iter()
            .map(|&i| {
                fields[i].parse::<f64>().map_err(|_| CliError::NonNumericFeature {
                    column: header[i].to_string(),
                    value: fields[i].to_string(),
                    row: row + 1,
                })
            })
            .collect::<Result<_>>()?;
        points.push(coords);
        let raw = fields[color_idx].to_string();
        labels.push(merge.get(&raw).cloned().unwrap_or(raw));
    }
    if points.is_empty() {
        return Err(CliError::EmptyDataset(path.to_path_buf()));
    }

    if let Some(size) = subsample {
        if size == 0 {
            return Err(CliError::InvalidConfig("subsample size must be positive".into()));
        }
        if size < points.len() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut indices: Vec<usize> = (0..points.len()).collect();
            for i in 0..size {
                let j = rng.gen_range(i..indices.len());
                indices.swap(i, j);
            }
            let mut keep: Vec<usize> = indices[..size].to_vec();
            keep.sort_unstable();
            points = keep.iter().map(|&i| points[i].clone()).collect();
            labels = keep.iter().map(|&i| labels[i].clone()).collect();
        }
    }

    if standardize {
        let dim = points[0].len();
        let n = points.len() as f64;
        for d in 0..dim {
            let mean: f64 = points.iter().map(|p| p[d]).sum::<f64>() / n;
            let var: f64 = points.iter().map(|p| (p[d] - mean).powi(2)).sum::<f64>() / n;
            let sd = if var > 0.0 { var.sqrt() } else { 1.0 };
            for p in points.iter_mut() {
                p[d] = (p[d] - mean) / sd;
            }
        }
    }

    let mut color_names: Vec<String> = labels.clone();
    color_names.sort();
    color_names.dedup();
    let colors: Vec<usize> = labels
        .iter()
        .map(|l| color_names.iter().position(|c| c == l).unwrap())
        .collect();

    let n = points.len() as f64;
    let bounds: Vec<Bounds<f64>> = color_names
        .iter()
        .enumerate()
        .map(|(h, name)| {
            let r = colors.iter().filter(|&&c| c == h).count() as f64 / n;
            Bounds::new((1.0 - delta) * r, (1.0 + delta) * r).map_err(|_| {
                CliError::InvalidConfig(format!(
                    "delta {delta} gives invalid bounds for color '{name}' (proportion {r})"
                ))
            })
        })
        .collect::<Result<_>>()?;

    // The p-norm is applied later; build with a placeholder and rebuild when
    // the caller knows. Euclidean instances only carry p as metadata, so the
    // loader takes it up front instead.
    let instance = InstanceOf::euclidean(points, colors, bounds, Norm::Two)
        .map_err(CliError::from)?;
    Ok(LoadedDataset { instance, color_names })
}

/// Sanitize a color label for use in a CSV header cell.
fn header_safe(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

/// Render sweep reports as the results CSV:
/// `pof,budget,cost,objective,delta_<colorname>...,min_cluster,lp_runs,runtime_ms`.
pub fn render_results_csv(reports: &[SolveReportOf<f64>], color_names: &[String]) -> String {
    let mut out = String::from("pof,budget,cost,objective");
    for name in color_names {
        let _ = write!(out, ",delta_{}", header_safe(name));
    }
    out.push_str(",min_cluster,lp_runs,runtime_ms\n");
    for r in reports {
        let _ = write!(
            out,
            "{},{},{},{}",
            r.pof.unwrap_or(f64::NAN),
            r.budget,
            r.cost,
            r.objective_value
        );
        for &d in &r.deltas.delta {
            let _ = write!(out, ",{d}");
        }
        let _ = writeln!(out, ",{},{},{}", r.min_cluster, r.lp_runs, r.runtime_ms);
    }
    out
}

/// Machine-readable run manifest: config echo, crate version, and seeds.
#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub config: &'a RunConfig,
    pub version: &'static str,
    pub rng_seed: u64,
    pub n_points: usize,
    pub color_names: &'a [String],
}

/// Execute a configured run end to end: load, sweep, and write
/// `results.csv` plus `manifest.json` into the output directory.
pub fn run(config: &RunConfig) -> Result<(PathBuf, PathBuf)> {
    let grid = config.validate()?;
    let loaded = load_dataset(
        &config.dataset,
        &config.color_col,
        &config.features,
        config.subsample,
        config.seed,
        &config.merge,
        config.standardize,
        config.delta,
    )?;
    // Rebuild with the requested norm (the loader defaults to p = 2).
    let instance = rebuild_with_norm(&loaded.instance, config.p.to_norm())?;

    let reports = if config.expand_budget {
        // Theoretical mode: each level is still a multiple of the color-blind
        // cost, but the assignment stage receives the (2+α)-expanded budget.
        let seed_method = config.seed_method.to_method();
        let seed = seed_method.run(&instance, config.k, config.seed)?;
        if seed.cost <= 0.0 {
            return Err(CliError::InvalidConfig(
                "color-blind cost is zero; POF ratios are undefined".into(),
            ));
        }
        let mut reports = Vec::new();
        for &ratio in &config.pof_levels {
            let report = fcbc::pipeline::solve_fcbc(
                &instance,
                config.k,
                ratio * seed.cost,
                config.objective.to_kind(),
                &grid,
                seed_method,
                config.seed,
                true,
            )?;
            reports.push(report);
        }
        reports
    } else {
        pof_sweep(
            &instance,
            config.k,
            config.objective.to_kind(),
            &config.pof_levels,
            &grid,
            config.seed_method.to_method(),
            config.seed,
        )?
    };

    fs::create_dir_all(&config.out)
        .map_err(|source| CliError::Io { path: config.out.clone(), source })?;
    let results_path = config.out.join("results.csv");
    let manifest_path = config.out.join("manifest.json");
    fs::write(&results_path, render_results_csv(&reports, &loaded.color_names))
        .map_err(|source| CliError::Io { path: results_path.clone(), source })?;
    let manifest = Manifest {
        config,
        version: env!("CARGO_PKG_VERSION"),
        rng_seed: config.seed,
        n_points: instance.n(),
        color_names: &loaded.color_names,
    };
    let manifest_json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::InvalidConfig(format!("manifest serialization: {e}")))?;
    fs::write(&manifest_path, manifest_json)
        .map_err(|source| CliError::Io { path: manifest_path.clone(), source })?;
    Ok((results_path, manifest_path))
}

fn rebuild_with_norm(instance: &InstanceOf<f64>, p: Norm) -> Result<InstanceOf<f64>> {
    let bounds = (0..instance.num_colors()).map(|h| instance.bounds(h)).collect();
    InstanceOf::euclidean(
        instance.points().to_vec(),
        instance.colors().to_vec(),
        bounds,
        p,
    )
    .map_err(CliError::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_small_file() {
        let f = write_temp("x,y,sex\n1.0,2.0,m\n2.0,3.0,f\n0.0,1.0,m\n");
        let d = load_dataset(
            f.path(),
            "sex",
            &["x".into(), "y".into()],
            None,
            0,
            &BTreeMap::new(),
            false,
            0.5,
        )
        .unwrap();
        assert_eq!(d.instance.n(), 3);
        assert_eq!(d.instance.num_colors(), 2);
        assert_eq!(d.color_names, vec!["f".to_string(), "m".to_string()]);
    }

    #[test]
    fn subsample_is_deterministic() {
        let f = write_temp("x,c\n1,a\n2,b\n3,a\n4,b\n5,a\n");
        let load = || {
            load_dataset(
                f.path(),
                "c",
                &["x".into()],
                Some(2),
                7,
                &BTreeMap::new(),
                false,
                0.5,
            )
            .unwrap()
        };
        let a = load();
        let b = load();
        assert_eq!(a.instance.n(), 2);
        assert_eq!(a.instance.points(), b.instance.points());
        assert_eq!(a.instance.colors(), b.instance.colors());
    }

    #[test]
    fn merge_map_collapses_colors() {
        let f = write_temp("x,age\n1,1\n2,2\n3,3\n");
        let mut merge = BTreeMap::new();
        merge.insert("2".to_string(), "1".to_string());
        merge.insert("3".to_string(), "1".to_string());
        let d = load_dataset(
            f.path(),
            "age",
            &["x".into()],
            None,
            0,
            &merge,
            false,
            0.1,
        )
        .unwrap();
        assert_eq!(d.instance.num_colors(), 1);
    }

    #[test]
    fn missing_column_and_bad_number_are_distinct() {
        let f = write_temp("x,c\n1,a\n2,b\n");
        let missing = load_dataset(
            f.path(),
            "nope",
            &["x".into()],
            None,
            0,
            &BTreeMap::new(),
            false,
            0.5,
        )
        .unwrap_err();
        assert!(matches!(missing, CliError::MissingColumn(_)));
        let bad = load_dataset(
            f.path(),
            "x",
            &["c".into()],
            None,
            0,
            &BTreeMap::new(),
            false,
            0.5,
        )
        .unwrap_err();
        assert!(matches!(bad, CliError::NonNumericFeature { .. }));
        let empty_file = write_temp("");
        let empty = load_dataset(
            empty_file.path(),
            "c",
            &["x".into()],
            None,
            0,
            &BTreeMap::new(),
            false,
            0.5,
        )
        .unwrap_err();
        assert!(matches!(empty, CliError::EmptyDataset(_)));
    }

    #[test]
    fn epsilon_must_be_unit_fraction() {
        assert!(parse_epsilon(1.0 / 128.0).is_ok());
        assert!(parse_epsilon(0.3).is_err());
        assert!(parse_epsilon(0.0).is_err());
    }
}
