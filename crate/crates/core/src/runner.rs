//! Experiment driver behind the `cyclic-rmt` binary.
//!
//! Monte Carlo experiments sample an ensemble in parallel, extract one
//! spacing kind, normalize it to unit mean and measure its Kolmogorov-Smirnov
//! distance to the matching analytic law. The structural experiment runs the
//! exact algebraic checks over a battery of dimensions.
//!
//! Realizations are spread over a dedicated rayon pool and collected in
//! realization order, so every output byte except the timings is fixed by
//! the configuration.

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{
    generalized_parity, materialize_matrix, pseudo_symmetry_residual, realization_rng, sample_first_row,
    EnsembleConfig, Substream,
};
use crate::error::{Error, Result};
use crate::laws::{
    mean_spacing_cc, mean_spacing_rc, quadrature::integrate, rc_raw_density_literal_exponent, truncation_point,
    CdfTable, LawKind, LawSpec,
};
use crate::spacing::{
    build_histogram, extract_cc, extract_generic, extract_rc, ks_critical_value, ks_distance, ks_statistic,
    normalize_to_unit_mean, Histogram, PairingPolicy, SpacingKind, SpacingSample,
};
use crate::spectral::{eigenvalues_dft, fourier_eigenvector, inverse_coefficients, s_matrix};
use crate::symmetry::{symmetry_report, SymmetryReport};

pub const FORMAT_VERSION: u32 = 1;

/// Scales re-run for the A-invariance check.
pub const INVARIANCE_SCALES: [f64; 2] = [0.5, 2.0];
/// Matched substreams make normalized spacings independent of A up to rounding.
pub const INVARIANCE_TOLERANCE: f64 = 1e-12;

pub const STRUCTURAL_DIMENSIONS: [usize; 7] = [2, 3, 4, 8, 16, 64, 100];
pub const STRUCTURAL_SYMMETRY_MATRICES: usize = 1000;
pub const STRUCTURAL_SPECTRAL_MATRICES: usize = 100;
pub const EIGEN_EQUATION_TOLERANCE: f64 = 1e-10;
pub const ROUND_TRIP_TOLERANCE: f64 = 1e-12;
pub const PAIRING_TOLERANCE: f64 = 1e-12;
pub const S_SQUARE_TOLERANCE: f64 = 1e-12;
pub const ETA_TOLERANCE: f64 = 1e-12;
/// Largest dimension covered by the S-matrix and eigenvector checks.
pub const STRUCTURAL_DENSE_MAX: usize = 64;

const DENSITY_TABLE_UPPER: f64 = 6.0;
const DENSITY_TABLE_POINTS: usize = 601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Fig1Cc,
    Fig2Rc,
    Fig3Generic,
    Structural,
    All,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig1Cc => "fig1_cc",
            Experiment::Fig2Rc => "fig2_rc",
            Experiment::Fig3Generic => "fig3_generic",
            Experiment::Structural => "structural",
            Experiment::All => "all",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "fig1_cc" | "fig1" | "cc" => Ok(Experiment::Fig1Cc),
            "fig2_rc" | "fig2" | "rc" => Ok(Experiment::Fig2Rc),
            "fig3_generic" | "fig3" | "generic" => Ok(Experiment::Fig3Generic),
            "structural" => Ok(Experiment::Structural),
            "all" => Ok(Experiment::All),
            other => Err(Error::Config(format!("unknown experiment '{other}'"))),
        }
    }
}

/// Layout of the per-experiment data files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataFormat {
    /// `spacings_*.csv`, `histogram_*.csv`, `density_*.csv` and a gnuplot script.
    #[default]
    Csv,
    /// Everything in one `data.json`.
    Json,
}

impl FromStr for DataFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(DataFormat::Csv),
            "json" => Ok(DataFormat::Json),
            other => Err(Error::Config(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    /// Overrides the experiment's default matrix size.
    pub dimension: Option<usize>,
    pub scale: f64,
    /// Overrides the experiment's default realization count.
    pub realizations: Option<usize>,
    pub seed: u64,
    pub pairing: PairingPolicy,
    pub bins: usize,
    pub out_dir: PathBuf,
    pub workers: usize,
    pub format: DataFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::All,
            dimension: None,
            scale: 1.0,
            realizations: None,
            seed: 20_090_101,
            pairing: PairingPolicy::OnePerRealization,
            bins: 50,
            out_dir: PathBuf::from("out"),
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            format: DataFormat::Csv,
        }
    }
}

/// One Monte Carlo experiment after defaults and overrides are resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloPlan {
    pub id: String,
    pub experiment: Experiment,
    pub kind: SpacingKind,
    pub law: LawKind,
    pub dimension: usize,
    pub realizations: usize,
    pub ks_threshold: f64,
}

fn plan(id_kind: SpacingKind, experiment: Experiment, dimension: usize, realizations: usize, threshold: f64) -> MonteCarloPlan {
    MonteCarloPlan {
        id: format!("{}_n{}", id_kind.name(), dimension),
        experiment,
        kind: id_kind,
        law: match id_kind {
            SpacingKind::Cc => LawKind::CcNorm,
            SpacingKind::Rc => LawKind::RcNorm,
            SpacingKind::Generic => LawKind::Wigner,
        },
        dimension,
        realizations,
        ks_threshold: threshold,
    }
}

/// The three figure experiments at their published sizes.
pub fn default_plans(experiment: Experiment) -> Vec<MonteCarloPlan> {
    match experiment {
        Experiment::Fig1Cc => vec![plan(SpacingKind::Cc, experiment, 3, 10_000, 0.02)],
        Experiment::Fig2Rc => vec![
            plan(SpacingKind::Rc, experiment, 3, 10_000, 0.02),
            plan(SpacingKind::Rc, experiment, 100, 1_000, 0.05),
        ],
        Experiment::Fig3Generic => vec![plan(SpacingKind::Generic, experiment, 100, 5_000, 0.025)],
        Experiment::Structural => Vec::new(),
        Experiment::All => [Experiment::Fig1Cc, Experiment::Fig2Rc, Experiment::Fig3Generic]
            .into_iter()
            .flat_map(default_plans)
            .collect(),
    }
}

fn minimum_dimension(kind: SpacingKind) -> usize {
    match kind {
        SpacingKind::Cc | SpacingKind::Rc => 3,
        SpacingKind::Generic => 5,
    }
}

impl RunConfig {
    /// Resolved Monte Carlo plans. An overridden size replaces every default
    /// size of the experiment and is judged at the 1% Kolmogorov critical value.
    pub fn plans(&self) -> Vec<MonteCarloPlan> {
        let defaults = default_plans(self.experiment);
        if self.dimension.is_none() && self.realizations.is_none() {
            return defaults;
        }
        let mut seen = Vec::new();
        let mut out = Vec::new();
        for p in defaults {
            if seen.contains(&p.kind) {
                continue;
            }
            seen.push(p.kind);
            let dimension = self.dimension.unwrap_or(p.dimension);
            let realizations = self.realizations.unwrap_or(p.realizations);
            let threshold = if dimension == p.dimension && realizations == p.realizations {
                p.ks_threshold
            } else {
                ks_critical_value(realizations, 0.01)
            };
            out.push(plan(p.kind, p.experiment, dimension, realizations, threshold));
        }
        out
    }

    pub fn runs_structural(&self) -> bool {
        matches!(self.experiment, Experiment::Structural | Experiment::All)
    }

    /// Rejects bad settings before any computation.
    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        if self.bins == 0 {
            return Err(Error::Config("bin count must be at least 1".into()));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::Config(format!("scale A must be positive, got {}", self.scale)));
        }
        if self.realizations == Some(0) {
            return Err(Error::Config("realization count must be at least 1".into()));
        }
        for p in self.plans() {
            if p.dimension < minimum_dimension(p.kind) {
                return Err(Error::Config(format!(
                    "{} spacings need N >= {}, got {}",
                    p.kind.name(),
                    minimum_dimension(p.kind),
                    p.dimension
                )));
            }
            EnsembleConfig::new(p.dimension, self.scale, p.realizations, self.seed)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataFiles {
    pub spacings: Option<String>,
    pub histogram: Option<String>,
    pub density: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternatePairing {
    pub pairing: PairingPolicy,
    pub sample_size: usize,
    pub ks_distance: f64,
}

/// Raw real-complex spacings against both readings of the exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RcExponentReadings {
    /// `exp(-(4A/3) S²)`.
    pub ks_scale_in_exponent: f64,
    pub mean_scale_in_exponent: f64,
    /// `exp(-(4/3) S²)`, renormalized numerically; `None` when not normalizable (A >= 2).
    pub ks_literal_exponent: Option<f64>,
    pub literal_exponent_mass: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariancePoint {
    pub scale: f64,
    pub ks_distance: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloResult {
    pub plan: MonteCarloPlan,
    pub scale: f64,
    pub seed: u64,
    pub pairing: PairingPolicy,
    pub sample_size: usize,
    pub empirical_mean_spacing: f64,
    pub analytic_mean_spacing: f64,
    pub ks_distance: f64,
    pub ks_critical_95: f64,
    pub alternate_pairing: Option<AlternatePairing>,
    pub rc_exponent: Option<RcExponentReadings>,
    pub scale_invariance: Vec<InvariancePoint>,
    pub passed: bool,
    pub files: DataFiles,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralRow {
    pub dimension: usize,
    pub symmetry_matrices: usize,
    pub spectral_matrices: usize,
    pub max_pseudo_symmetry_residual: f64,
    /// `max ‖M u_l - E_l u_l‖∞ / (1 + max|a|)`.
    pub max_eigen_equation_residual: f64,
    /// `max |a - a'| / max|a|` after `a → E → a'`.
    pub max_round_trip_error: f64,
    pub max_pairing_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SMatrixRow {
    pub dimension: usize,
    pub symmetric: bool,
    pub max_square_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryRow {
    pub dimension: usize,
    pub max_real_eta_residual: f64,
    pub max_complex_pt_norm: f64,
    pub min_complex_eta_residual: Option<f64>,
    /// `max |⟨u_l, η u_partner⟩ - 1|`
    pub sesquilinear_partner_deviation: Option<f64>,
    /// `max |u_lᵀ η u_partner|`
    pub bilinear_partner_magnitude: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralSummary {
    pub rows: Vec<StructuralRow>,
    pub s_matrix: Vec<SMatrixRow>,
    pub symmetry: Vec<SymmetryRow>,
    pub symmetry_reports: Vec<SymmetryReport<f64>>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Timings {
    pub experiments: Vec<(String, f64)>,
    pub total_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub format_version: u32,
    pub config: RunConfig,
    pub experiments: Vec<MonteCarloResult>,
    pub structural: Option<StructuralSummary>,
    pub plot_script: Option<String>,
    pub warnings: Vec<String>,
    pub passed: bool,
    pub timings: Timings,
}

impl RunReport {
    /// Copy with timings cleared, for reproducibility comparisons.
    pub fn without_timings(&self) -> Self {
        Self {
            timings: Timings::default(),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))
}

/// Spacings of every realization, concatenated in realization order.
pub fn collect_spacings(
    config: &EnsembleConfig,
    kind: SpacingKind,
    policy: PairingPolicy,
) -> Result<Vec<f64>> {
    let per_realization: Vec<Vec<f64>> = (0..config.realizations)
        .into_par_iter()
        .map(|k| {
            let row = sample_first_row::<f64>(config, k)?;
            let spectrum = eigenvalues_dft(&row);
            let mut rng = realization_rng(config.master_seed, k, Substream::Selection);
            Ok(match kind {
                SpacingKind::Cc => extract_cc(&spectrum),
                SpacingKind::Rc => extract_rc(&spectrum, policy, &mut rng),
                SpacingKind::Generic => extract_generic(&spectrum, policy, &mut rng),
            })
        })
        .collect::<Result<_>>()?;
    Ok(per_realization.into_iter().flatten().collect())
}

fn analytic_raw_mean(kind: SpacingKind, a: f64) -> Result<f64> {
    match kind {
        SpacingKind::Cc => mean_spacing_cc(a),
        SpacingKind::Rc => mean_spacing_rc(a),
        // Rayleigh with per-component variance 1/(2A)
        SpacingKind::Generic => Ok(0.5 * (std::f64::consts::PI / a).sqrt()),
    }
}

fn rc_exponent_readings(raw: &SpacingSample<f64>, a: f64) -> Result<RcExponentReadings> {
    let restored = LawSpec::raw(LawKind::RcRaw, a)?;
    let ks_scale_in_exponent = ks_distance(raw, &restored)?;
    let (ks_literal_exponent, literal_exponent_mass) = if a < 2.0 {
        let literal = |s: f64| rc_raw_density_literal_exponent(a, s).unwrap_or(0.0);
        let upper = truncation_point(&literal, mean_spacing_rc(a)?.max(1.0));
        let mass = integrate(literal, 0.0, upper, 1e-12, 0.0).value;
        let normalized = move |s: f64| literal(s) / mass;
        let table = CdfTable::build(&normalized, upper);
        let ks = ks_statistic(raw.values(), |s| table.eval(&normalized, s))?;
        (Some(ks), Some(mass))
    } else {
        (None, None)
    };
    Ok(RcExponentReadings {
        ks_scale_in_exponent,
        mean_scale_in_exponent: restored.analytic_mean(),
        ks_literal_exponent,
        literal_exponent_mass,
    })
}

/// Samples, normalizes and tests one experiment. Data files are not written.
pub fn run_monte_carlo(
    plan: &MonteCarloPlan,
    scale: f64,
    seed: u64,
    pairing: PairingPolicy,
) -> Result<(MonteCarloResult, SpacingSample<f64>)> {
    let ensemble = EnsembleConfig::new(plan.dimension, scale, plan.realizations, seed)?;
    let law = LawSpec::<f64>::normalized(plan.law)?;

    let values = collect_spacings(&ensemble, plan.kind, pairing)?;
    let raw = SpacingSample::raw(plan.kind, values.clone())?;
    let sample = normalize_to_unit_mean(plan.kind, values)?;
    let ks = ks_distance(&sample, &law)?;

    let alternate_pairing = if plan.kind == SpacingKind::Rc {
        let other = match pairing {
            PairingPolicy::OnePerRealization => PairingPolicy::All,
            PairingPolicy::All => PairingPolicy::OnePerRealization,
        };
        let alt = normalize_to_unit_mean(plan.kind, collect_spacings(&ensemble, plan.kind, other)?)?;
        Some(AlternatePairing {
            pairing: other,
            sample_size: alt.len(),
            ks_distance: ks_distance(&alt, &law)?,
        })
    } else {
        None
    };

    let rc_exponent = if plan.kind == SpacingKind::Rc {
        Some(rc_exponent_readings(&raw, scale)?)
    } else {
        None
    };

    let mut scale_invariance = Vec::new();
    for &other in INVARIANCE_SCALES.iter().filter(|&&s| s != scale) {
        let shifted = ensemble.with_scale(other);
        let z = normalize_to_unit_mean(plan.kind, collect_spacings(&shifted, plan.kind, pairing)?)?;
        let d = ks_distance(&z, &law)?;
        scale_invariance.push(InvariancePoint {
            scale: other,
            ks_distance: d,
            delta: (d - ks).abs(),
        });
    }
    let invariant = scale_invariance.iter().all(|p| p.delta <= INVARIANCE_TOLERANCE);

    let result = MonteCarloResult {
        plan: plan.clone(),
        scale,
        seed,
        pairing,
        sample_size: sample.len(),
        empirical_mean_spacing: sample.empirical_mean(),
        analytic_mean_spacing: analytic_raw_mean(plan.kind, scale)?,
        ks_distance: ks,
        ks_critical_95: ks_critical_value(sample.len(), 0.05),
        alternate_pairing,
        rc_exponent,
        scale_invariance,
        passed: ks < plan.ks_threshold && invariant,
        files: DataFiles {
            spacings: None,
            histogram: None,
            density: None,
        },
    };
    Ok((result, sample))
}

/// Exact and near-exact algebraic checks over [`STRUCTURAL_DIMENSIONS`].
pub fn run_structural(seed: u64) -> Result<StructuralSummary> {
    let rows = STRUCTURAL_DIMENSIONS
        .iter()
        .map(|&n| structural_row(n, seed))
        .collect::<Result<Vec<_>>>()?;

    let mut s_rows = Vec::new();
    let mut symmetry_rows = Vec::new();
    let mut symmetry_reports = Vec::new();
    for n in 2..=STRUCTURAL_DENSE_MAX {
        let s = s_matrix::<f64>(n)?;
        s_rows.push(SMatrixRow {
            dimension: n,
            symmetric: s.is_symmetric(),
            max_square_residual: s.square_identity_residual(&generalized_parity(n)?)?,
        });
        let report = symmetry_report::<f64>(n)?;
        let extremes = report.pair_product_extremes();
        symmetry_rows.push(SymmetryRow {
            dimension: n,
            max_real_eta_residual: report.max_real_eigen_residual(),
            max_complex_pt_norm: report.max_complex_pt_norm(),
            min_complex_eta_residual: report.min_complex_eigen_residual(),
            sesquilinear_partner_deviation: extremes.map(|e| e.0),
            bilinear_partner_magnitude: extremes.map(|e| e.3),
        });
        if matches!(n, 3 | 4) {
            symmetry_reports.push(report);
        }
    }

    let passed = rows.iter().all(|r| {
        r.max_pseudo_symmetry_residual == 0.0
            && r.max_eigen_equation_residual < EIGEN_EQUATION_TOLERANCE
            && r.max_round_trip_error < ROUND_TRIP_TOLERANCE
            && r.max_pairing_defect < PAIRING_TOLERANCE
    }) && s_rows
        .iter()
        .all(|r| r.symmetric && r.max_square_residual < S_SQUARE_TOLERANCE * r.dimension as f64)
        && symmetry_rows.iter().all(|r| {
            r.max_real_eta_residual < ETA_TOLERANCE
                && r.max_complex_pt_norm < ETA_TOLERANCE
                && r.min_complex_eta_residual.map_or(true, |m| m > 0.1)
        });

    Ok(StructuralSummary {
        rows,
        s_matrix: s_rows,
        symmetry: symmetry_rows,
        symmetry_reports,
        passed,
    })
}

fn structural_row(n: usize, seed: u64) -> Result<StructuralRow> {
    let ensemble = EnsembleConfig::new(n, 1.0, STRUCTURAL_SYMMETRY_MATRICES, seed ^ n as u64)?;
    let eta = generalized_parity(n)?;
    let basis: Vec<_> = (0..n).map(|l| fourier_eigenvector::<f64>(n, l)).collect::<Result<_>>()?;

    let per_matrix: Vec<(f64, f64, f64, f64)> = (0..ensemble.realizations)
        .into_par_iter()
        .map(|k| {
            let row = sample_first_row::<f64>(&ensemble, k)?;
            let m = materialize_matrix(&row);
            let symmetry = pseudo_symmetry_residual(&m, &eta)?;
            if k >= STRUCTURAL_SPECTRAL_MATRICES {
                return Ok((symmetry, 0.0, 0.0, 0.0));
            }
            let spectrum = eigenvalues_dft(&row);
            let scale = row.max_abs();
            let mut eigen = 0.0f64;
            for (l, u) in basis.iter().enumerate() {
                let mu = m.mul_complex_vec(u)?;
                let e = spectrum.eigenvalue(l);
                for (x, y) in mu.iter().zip(u) {
                    eigen = eigen.max((x - y * e).norm());
                }
            }
            let back = inverse_coefficients(&spectrum)?;
            let round_trip = back
                .coefficients()
                .iter()
                .zip(row.coefficients())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max)
                / scale;
            Ok((symmetry, eigen / (1.0 + scale), round_trip, spectrum.pairing_defect()))
        })
        .collect::<Result<_>>()?;

    let max_of = |f: fn(&(f64, f64, f64, f64)) -> f64| per_matrix.iter().map(f).fold(0.0, f64::max);
    Ok(StructuralRow {
        dimension: n,
        symmetry_matrices: STRUCTURAL_SYMMETRY_MATRICES,
        spectral_matrices: STRUCTURAL_SPECTRAL_MATRICES,
        max_pseudo_symmetry_residual: max_of(|r| r.0),
        max_eigen_equation_residual: max_of(|r| r.1),
        max_round_trip_error: max_of(|r| r.2),
        max_pairing_defect: max_of(|r| r.3),
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn write_lines(path: &Path, lines: impl IntoIterator<Item = String>) -> Result<()> {
    let mut w = create(path)?;
    for line in lines {
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_spacings_csv(path: &Path, sample: &SpacingSample<f64>) -> Result<()> {
    write_lines(
        path,
        std::iter::once("z".to_string()).chain(sample.values().iter().map(|v| v.to_string())),
    )
}

pub fn write_histogram_csv(path: &Path, histogram: &Histogram<f64>) -> Result<()> {
    let rows = histogram
        .bin_edges
        .windows(2)
        .zip(&histogram.density_values)
        .map(|(e, d)| format!("{},{},{}", e[0], e[1], d));
    write_lines(path, std::iter::once("bin_left,bin_right,density".to_string()).chain(rows))
}

pub fn write_density_csv(path: &Path, law: &LawSpec<f64>, upper: f64, points: usize) -> Result<()> {
    let rows = law
        .density_table(upper, points)
        .into_iter()
        .map(|(x, p)| format!("{x},{p}"));
    write_lines(path, std::iter::once("x,p".to_string()).chain(rows))
}

#[derive(Debug, Serialize)]
struct JsonData<'a> {
    format_version: u32,
    spacings: Vec<(&'a str, &'a [f64])>,
    histograms: Vec<(&'a str, &'a Histogram<f64>)>,
    densities: Vec<(&'static str, Vec<(f64, f64)>)>,
}

/// Gnuplot batch script overlaying each histogram with its analytic density.
///
/// Experiments whose data files are missing are skipped; the returned
/// strings describe what was skipped.
pub fn emit_plot_script(report: &RunReport, out_dir: &Path) -> Result<(PathBuf, Vec<String>)> {
    let path = out_dir.join("plots.gp");
    let mut lines = vec![
        format!("# cyclic-rmt plot script, format {FORMAT_VERSION}"),
        "# run with: gnuplot plots.gp".to_string(),
    ];
    let mut warnings = Vec::new();
    let mut body = Vec::new();
    for r in &report.experiments {
        let (Some(hist), Some(density)) = (&r.files.histogram, &r.files.density) else {
            warnings.push(format!("{}: no CSV data, plot skipped", r.plan.id));
            continue;
        };
        let missing: Vec<&String> = [hist, density]
            .into_iter()
            .filter(|f| !out_dir.join(f).is_file())
            .collect();
        if !missing.is_empty() {
            warnings.push(format!("{}: missing {:?}, plot skipped", r.plan.id, missing));
            continue;
        }
        body.push(format!("set output \"{}.png\"", r.plan.id));
        body.push(format!(
            "set title \"{} spacings, N = {}, {} realizations (KS = {:.4})\"",
            r.plan.kind.name(),
            r.plan.dimension,
            r.plan.realizations,
            r.ks_distance
        ));
        body.push(format!(
            "plot \"{hist}\" every ::1 using (($1+$2)/2):3:($2-$1) with boxes fs solid 0.4 title \"Monte Carlo\", \\\n     \"{density}\" every ::1 using 1:2 with lines lw 2 title \"{}\"",
            r.plan.law.name()
        ));
    }
    if !body.is_empty() {
        lines.push("set datafile separator \",\"".into());
        lines.push("set terminal pngcairo size 900,600 noenhanced".into());
        lines.push("set xlabel \"normalized spacing\"".into());
        lines.push("set ylabel \"density\"".into());
        lines.push(format!("set xrange [0:{DENSITY_TABLE_UPPER}]"));
        lines.extend(body);
    }
    write_lines(&path, lines)?;
    Ok((path, warnings))
}

fn prepare_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let probe = dir.join(".write-test");
    File::create(&probe).map_err(|e| Error::io(&probe, e))?;
    fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))
}

/// Runs the configured experiments and writes every output file.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    prepare_out_dir(&config.out_dir)?;
    let pool = thread_pool(config.workers)?;
    let started = Instant::now();
    let mut timings = Timings::default();

    let mut experiments = Vec::new();
    let mut samples = Vec::new();
    for p in config.plans() {
        let t = Instant::now();
        let (result, sample) = pool.install(|| run_monte_carlo(&p, config.scale, config.seed, config.pairing))?;
        timings.experiments.push((p.id.clone(), t.elapsed().as_secs_f64()));
        experiments.push(result);
        samples.push(sample);
    }

    let structural = if config.runs_structural() {
        let t = Instant::now();
        let s = pool.install(|| run_structural(config.seed))?;
        timings.experiments.push(("structural".into(), t.elapsed().as_secs_f64()));
        Some(s)
    } else {
        None
    };

    let histograms = samples
        .iter()
        .map(|s| build_histogram(s, config.bins))
        .collect::<Result<Vec<_>>>()?;
    let mut laws: Vec<LawKind> = experiments.iter().map(|r| r.plan.law).collect();
    laws.sort_by_key(|l| l.name());
    laws.dedup();
    let law_specs = laws
        .iter()
        .map(|&k| LawSpec::<f64>::normalized(k))
        .collect::<Result<Vec<_>>>()?;

    match config.format {
        DataFormat::Csv => {
            for ((result, sample), histogram) in experiments.iter_mut().zip(&samples).zip(&histograms) {
                let spacings = format!("spacings_{}.csv", result.plan.id);
                let hist = format!("histogram_{}.csv", result.plan.id);
                write_spacings_csv(&config.out_dir.join(&spacings), sample)?;
                write_histogram_csv(&config.out_dir.join(&hist), histogram)?;
                result.files = DataFiles {
                    spacings: Some(spacings),
                    histogram: Some(hist),
                    density: Some(format!("density_{}.csv", result.plan.law.name())),
                };
            }
            for law in &law_specs {
                let path = config.out_dir.join(format!("density_{}.csv", law.kind().name()));
                write_density_csv(&path, law, DENSITY_TABLE_UPPER, DENSITY_TABLE_POINTS)?;
            }
        }
        DataFormat::Json => {
            let data = JsonData {
                format_version: FORMAT_VERSION,
                spacings: experiments
                    .iter()
                    .zip(&samples)
                    .map(|(r, s)| (r.plan.id.as_str(), s.values()))
                    .collect(),
                histograms: experiments
                    .iter()
                    .zip(&histograms)
                    .map(|(r, h)| (r.plan.id.as_str(), h))
                    .collect(),
                densities: law_specs
                    .iter()
                    .map(|l| (l.kind().name(), l.density_table(DENSITY_TABLE_UPPER, DENSITY_TABLE_POINTS)))
                    .collect(),
            };
            let path = config.out_dir.join("data.json");
            let json = serde_json::to_string(&data).expect("data is serializable");
            write_lines(&path, [json])?;
        }
    }

    let passed = experiments.iter().all(|r| r.passed) && structural.as_ref().map_or(true, |s| s.passed);
    let mut report = RunReport {
        format_version: FORMAT_VERSION,
        config: config.clone(),
        experiments,
        structural,
        plot_script: None,
        warnings: Vec::new(),
        passed,
        timings: Timings::default(),
    };

    let (script, warnings) = emit_plot_script(&report, &config.out_dir)?;
    report.plot_script = script.file_name().map(|f| f.to_string_lossy().into_owned());
    report.warnings = warnings;
    timings.total_seconds = started.elapsed().as_secs_f64();
    report.timings = timings;

    let report_path = config.out_dir.join("report.json");
    write_lines(&report_path, [report.to_json()])?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_plans_match_published_sizes() {
        let all = default_plans(Experiment::All);
        let sizes: Vec<(usize, usize)> = all.iter().map(|p| (p.dimension, p.realizations)).collect();
        assert_eq!(sizes, vec![(3, 10_000), (3, 10_000), (100, 1_000), (100, 5_000)]);
        assert!(default_plans(Experiment::Structural).is_empty());
    }

    #[test]
    fn overrides_collapse_to_one_plan_per_kind() {
        let config = RunConfig {
            experiment: Experiment::Fig2Rc,
            dimension: Some(7),
            realizations: Some(400),
            ..RunConfig::default()
        };
        let plans = config.plans();
        assert_eq!(plans.len(), 1);
        assert_eq!(plans[0].id, "rc_n7");
        assert!((plans[0].ks_threshold - ks_critical_value(400, 0.01)).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        let bad = |f: fn(&mut RunConfig)| {
            let mut c = RunConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.workers = 0));
        assert!(bad(|c| c.bins = 0));
        assert!(bad(|c| c.scale = -1.0));
        assert!(bad(|c| c.realizations = Some(0)));
        assert!(bad(|c| {
            c.experiment = Experiment::Fig3Generic;
            c.dimension = Some(4);
        }));
        assert!(bad(|c| {
            c.experiment = Experiment::Fig1Cc;
            c.dimension = Some(2);
        }));
        assert!(RunConfig::default().validate().is_ok());
    }

    #[test]
    fn parse_names() {
        assert_eq!("fig1-cc".parse::<Experiment>().unwrap(), Experiment::Fig1Cc);
        assert_eq!("STRUCTURAL".parse::<Experiment>().unwrap(), Experiment::Structural);
        assert!("fig4".parse::<Experiment>().is_err());
        assert_eq!("json".parse::<DataFormat>().unwrap(), DataFormat::Json);
    }

    #[test]
    fn empty_report_gives_header_only_script() {
        let dir = tempfile::tempdir().unwrap();
        let report = RunReport {
            format_version: FORMAT_VERSION,
            config: RunConfig::default(),
            experiments: Vec::new(),
            structural: None,
            plot_script: None,
            warnings: Vec::new(),
            passed: true,
            timings: Timings::default(),
        };
        let (path, warnings) = emit_plot_script(&report, dir.path()).unwrap();
        let text = fs::read_to_string(path).unwrap();
        assert!(warnings.is_empty());
        assert!(text.lines().all(|l| l.starts_with('#')));
        assert!(!text.is_empty());
    }
}
