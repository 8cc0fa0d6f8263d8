//! Parameter sweeps over model parameters and temperature.
//!
//! A sweep evaluates the requested criteria on the thermal state of every
//! grid point. The Hamiltonian, its spectrum and the k-separable energies only
//! depend on the model parameters, so they are computed once per distinct
//! parameter tuple and shared across the temperature axis.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, invalid, Error, Result};
use crate::models::ModelSpec;
use crate::policy::POLICY;
use crate::separability::{ksep_levels_for, KsepResult, OptimizerConfig};
use crate::spectral::{eig_hermitian, SpectralDecomposition};
use crate::tensor::{Operator, PureState};
use crate::thermal::{energy_expectation, thermal_state, vn_entropy};
use crate::witness::{
    entropy_threshold_ksep_with, entropy_witness, gap_witness, gme_concurrence_pure,
    ground_relative_entropy, q_criteria, DetectionVerdict, Direction, EntropySearch,
    EntropyThreshold, QOptions, QReport,
};

/// Name of the temperature axis.
pub const KT_AXIS: &str = "kT";

/// Lower end of a temperature axis when none is given.
pub const DEFAULT_KT_MIN: f64 = 0.01;

/// A detection criterion evaluated at each grid point.
///
/// Written in configs as `gap-k<k>`, `Q`, `concurrence`, `entropy` (k = 2) or
/// `entropy-k<k>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Criterion {
    Gap(usize),
    Q,
    Concurrence,
    Entropy(usize),
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Criterion::Gap(k) => write!(f, "gap-k{k}"),
            Criterion::Q => f.write_str("Q"),
            Criterion::Concurrence => f.write_str("concurrence"),
            Criterion::Entropy(k) => write!(f, "entropy-k{k}"),
        }
    }
}

impl FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let level = |rest: &str| {
            rest.parse::<usize>()
                .map_err(|_| format!("bad level in criterion `{s}`"))
        };
        match s {
            "Q" | "q" => Ok(Criterion::Q),
            "concurrence" => Ok(Criterion::Concurrence),
            "entropy" => Ok(Criterion::Entropy(2)),
            _ => {
                if let Some(rest) = s.strip_prefix("gap-k") {
                    Ok(Criterion::Gap(level(rest)?))
                } else if let Some(rest) = s.strip_prefix("entropy-k") {
                    Ok(Criterion::Entropy(level(rest)?))
                } else {
                    Err(format!("unknown criterion `{s}`"))
                }
            }
        }
    }
}

impl TryFrom<String> for Criterion {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

impl From<Criterion> for String {
    fn from(c: Criterion) -> String {
        c.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    /// A model parameter name or `kT`.
    pub name: String,
    /// Defaults to [`DEFAULT_KT_MIN`] on the temperature axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(name: impl Into<String>, min: f64, max: f64, steps: usize) -> Self {
        Self {
            name: name.into(),
            min: Some(min),
            max,
            steps,
        }
    }

    pub fn is_temperature(&self) -> bool {
        self.name == KT_AXIS
    }

    fn lower(&self) -> f64 {
        self.min.unwrap_or(if self.is_temperature() {
            DEFAULT_KT_MIN
        } else {
            0.0
        })
    }

    /// Evenly spaced grid values; a single step sits at `min`.
    pub fn values(&self) -> Vec<f64> {
        let lo = self.lower();
        if self.steps == 1 {
            return vec![lo];
        }
        let step = (self.max - lo) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.max
                } else {
                    lo + step * i as f64
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
}

/// A complete sweep description, usually read from a JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: ModelSpec,
    pub axes: Vec<Axis>,
    pub criteria: Vec<Criterion>,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub q: QOptions,
    #[serde(default)]
    pub entropy: EntropySearch,
    /// Temperature used when `kT` is not an axis; 0 selects the ground manifold.
    #[serde(default)]
    pub kt: f64,
    /// Permits a temperature axis that starts at 0.
    #[serde(default)]
    pub allow_zero_temperature: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(text).map_err(|e| Error::Config {
            path: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.model.n_sites();
        if n < 2 {
            return config_err("model", "at least two sites are required");
        }
        if let Err(e) = self.model.build() {
            return config_err("model", e.to_string());
        }
        if self.axes.is_empty() || self.axes.len() > 2 {
            return config_err("axes", "one or two axes are required");
        }
        for (i, axis) in self.axes.iter().enumerate() {
            let path = |field: &str| format!("axes[{i}].{field}");
            if !axis.is_temperature() && !self.model.param_names().contains(&axis.name.as_str()) {
                return config_err(
                    path("name"),
                    format!(
                        "`{}` is not a parameter of this model (expected one of {:?} or `{KT_AXIS}`)",
                        axis.name,
                        self.model.param_names()
                    ),
                );
            }
            if self.axes[..i].iter().any(|a| a.name == axis.name) {
                return config_err(path("name"), format!("axis `{}` appears twice", axis.name));
            }
            if axis.steps == 0 {
                return config_err(path("steps"), "steps must be at least 1");
            }
            let lo = axis.lower();
            if !lo.is_finite() || !axis.max.is_finite() {
                return config_err(path("min"), "bounds must be finite");
            }
            if axis.max < lo {
                return config_err(path("max"), format!("max {} is below min {lo}", axis.max));
            }
            if axis.is_temperature() {
                if lo < 0.0 {
                    return config_err(path("min"), "temperature must be non-negative");
                }
                if lo == 0.0 && !self.allow_zero_temperature {
                    return config_err(path("min"), "kT = 0 requires allow_zero_temperature");
                }
            }
        }
        if self.criteria.is_empty() {
            return config_err("criteria", "at least one criterion is required");
        }
        for (i, c) in self.criteria.iter().enumerate() {
            let path = format!("criteria[{i}]");
            if self.criteria[..i].contains(c) {
                return config_err(path, format!("`{c}` appears twice"));
            }
            if let Criterion::Gap(k) | Criterion::Entropy(k) = c {
                if *k < 2 || *k > n {
                    return config_err(path, format!("level {k} outside 2..={n}"));
                }
            }
        }
        if let Err(e) = self.optimizer.validate() {
            return config_err("optimizer", e.to_string());
        }
        if !(self.kt >= 0.0) || !self.kt.is_finite() {
            return config_err("kt", "temperature must be finite and non-negative");
        }
        Ok(())
    }

    fn gap_levels(&self) -> Vec<usize> {
        let mut ks: Vec<usize> = self
            .criteria
            .iter()
            .filter_map(|c| match c {
                Criterion::Gap(k) => Some(*k),
                _ => None,
            })
            .collect();
        ks.sort_unstable();
        ks
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamValue {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KsepValue {
    pub k: usize,
    pub energy: f64,
    pub converged: bool,
    pub consensus: f64,
}

/// Everything recorded for one grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    /// Axis values in axis order.
    pub params: Vec<ParamValue>,
    pub kt: f64,
    pub ground_energy: f64,
    pub degeneracy: usize,
    pub ksep: Vec<KsepValue>,
    /// Tr(ρH).
    pub energy: f64,
    /// Von Neumann entropy of ρ.
    pub entropy: f64,
    /// GME concurrence of the ground state.
    pub concurrence: f64,
    pub verdicts: Vec<DetectionVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<QReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_relative_entropy: Option<f64>,
    pub caveats: Vec<String>,
}

impl SweepRow {
    pub fn verdict(&self, criterion: &str) -> Option<&DetectionVerdict> {
        self.verdicts.iter().find(|v| v.criterion == criterion)
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        if name == KT_AXIS {
            return Some(self.kt);
        }
        self.params.iter().find(|p| p.name == name).map(|p| p.value)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxisGrid {
    pub name: String,
    pub values: Vec<f64>,
}

/// Sweep output in grid order: the first axis varies slowest.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub axes: Vec<AxisGrid>,
    pub criteria: Vec<Criterion>,
    pub gap_levels: Vec<usize>,
    pub rows: Vec<SweepRow>,
}

/// Quantities that depend only on the Hamiltonian.
struct HamiltonianData {
    h: Operator,
    spec: SpectralDecomposition,
    ground: PureState,
    ksep: Vec<KsepResult>,
    concurrence: f64,
    entropy_thresholds: Vec<EntropyThreshold>,
}

fn hamiltonian_data(cfg: &SweepConfig, model: &ModelSpec) -> Result<HamiltonianData> {
    let h = model.build()?;
    let spec = eig_hermitian(&h)?;
    let ground = spec.ground_state();
    let ksep = ksep_levels_for(&h, &cfg.gap_levels(), &cfg.optimizer)?;
    let concurrence = gme_concurrence_pure(&ground)?.value;
    let entropy_thresholds = cfg
        .criteria
        .iter()
        .filter_map(|c| match c {
            Criterion::Entropy(k) => Some(*k),
            _ => None,
        })
        .map(|k| entropy_threshold_ksep_with(&ground, k, &cfg.optimizer, &cfg.entropy))
        .collect::<Result<_>>()?;
    Ok(HamiltonianData {
        h,
        spec,
        ground,
        ksep,
        concurrence,
        entropy_thresholds,
    })
}

struct GridPoint {
    params: Vec<ParamValue>,
    kt: f64,
    model_key: Vec<u64>,
}

fn grid_points(cfg: &SweepConfig) -> Vec<GridPoint> {
    let grids: Vec<Vec<f64>> = cfg.axes.iter().map(Axis::values).collect();
    let mut index = vec![0usize; grids.len()];
    let total: usize = grids.iter().map(Vec::len).product();
    let mut points = Vec::with_capacity(total);
    for _ in 0..total {
        let params: Vec<ParamValue> = cfg
            .axes
            .iter()
            .zip(&index)
            .zip(&grids)
            .map(|((a, &i), g)| ParamValue {
                name: a.name.clone(),
                value: g[i],
            })
            .collect();
        let kt = params
            .iter()
            .find(|p| p.name == KT_AXIS)
            .map_or(cfg.kt, |p| p.value);
        let model_key = params
            .iter()
            .filter(|p| p.name != KT_AXIS)
            .map(|p| p.value.to_bits())
            .collect();
        points.push(GridPoint {
            params,
            kt,
            model_key,
        });
        for d in (0..index.len()).rev() {
            index[d] += 1;
            if index[d] < grids[d].len() {
                break;
            }
            index[d] = 0;
        }
    }
    points
}

fn evaluate(cfg: &SweepConfig, data: &HamiltonianData, point: &GridPoint) -> Result<SweepRow> {
    let thermal = thermal_state(&data.spec, point.kt)?;
    let rho = &thermal.state;
    let degeneracy = data.spec.ground_degeneracy();
    let mut caveats = Vec::new();
    if degeneracy > 1 {
        caveats.push(format!("ground manifold is {degeneracy}-fold degenerate"));
    }
    for r in &data.ksep {
        if !r.converged {
            caveats.push(format!("gap-k{} optimizer did not converge", r.k));
        }
    }
    let mut verdicts = Vec::with_capacity(cfg.criteria.len());
    let mut q = None;
    let mut ground_rel = None;
    for c in &cfg.criteria {
        let v = match c {
            Criterion::Gap(k) => {
                let ksep = data
                    .ksep
                    .iter()
                    .find(|r| r.k == *k)
                    .expect("level computed");
                gap_witness(rho, &data.h, ksep)?
            }
            Criterion::Q => {
                let report = q_criteria(rho, &cfg.q)?;
                let v = report.verdict();
                q = Some(report);
                v
            }
            Criterion::Concurrence => DetectionVerdict::new(
                c.to_string(),
                data.concurrence,
                0.0,
                Direction::Above,
                2,
                (degeneracy > 1).then(|| {
                    "concurrence of one vector of a degenerate ground manifold".to_string()
                }),
            ),
            Criterion::Entropy(k) => {
                let t = data
                    .entropy_thresholds
                    .iter()
                    .find(|t| t.k == *k)
                    .expect("threshold computed");
                ground_rel = Some(ground_relative_entropy(&data.ground, rho)?);
                entropy_witness(rho, &data.ground, *k, t)?
            }
        };
        if let Some(note) = &v.caveat {
            caveats.push(format!("{}: {note}", v.criterion));
        }
        verdicts.push(v);
    }
    Ok(SweepRow {
        params: point.params.clone(),
        kt: point.kt,
        ground_energy: data.spec.ground_energy(),
        degeneracy,
        ksep: data
            .ksep
            .iter()
            .map(|r| KsepValue {
                k: r.k,
                energy: r.energy,
                converged: r.converged,
                consensus: r.consensus,
            })
            .collect(),
        energy: energy_expectation(rho, &data.h)?,
        entropy: vn_entropy(rho),
        concurrence: data.concurrence,
        verdicts,
        q,
        ground_relative_entropy: ground_rel,
        caveats,
    })
}

fn run(cfg: &SweepConfig, share_hamiltonians: bool) -> Result<SweepTable> {
    cfg.validate()?;
    let points = grid_points(cfg);
    let mut key_index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut models: Vec<ModelSpec> = Vec::new();
    let mut slot = Vec::with_capacity(points.len());
    for p in &points {
        let fresh = models.len();
        let i = if share_hamiltonians {
            *key_index.entry(p.model_key.clone()).or_insert(fresh)
        } else {
            fresh
        };
        if i == fresh {
            let mut m = cfg.model.clone();
            for pv in p.params.iter().filter(|pv| pv.name != KT_AXIS) {
                m.set_param(&pv.name, pv.value)?;
            }
            models.push(m);
        }
        slot.push(i);
    }
    log::info!(
        "sweep: {} grid points, {} Hamiltonians",
        points.len(),
        models.len()
    );
    let data: Vec<HamiltonianData> = models
        .par_iter()
        .map(|m| hamiltonian_data(cfg, m))
        .collect::<Result<_>>()?;
    let rows: Vec<SweepRow> = points
        .par_iter()
        .zip(slot.par_iter())
        .map(|(p, &i)| evaluate(cfg, &data[i], p))
        .collect::<Result<_>>()?;
    Ok(SweepTable {
        axes: cfg
            .axes
            .iter()
            .map(|a| AxisGrid {
                name: a.name.clone(),
                values: a.values(),
            })
            .collect(),
        criteria: cfg.criteria.clone(),
        gap_levels: cfg.gap_levels(),
        rows,
    })
}

/// Runs the sweep, sharing Hamiltonian-level work across grid points with the
/// same model parameters.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    run(cfg, true)
}

/// As [`run_sweep`] but rebuilds everything at every grid point.
pub fn run_sweep_uncached(cfg: &SweepConfig) -> Result<SweepTable> {
    run(cfg, false)
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

impl SweepTable {
    /// CSV column names, in order.
    pub fn csv_header(&self) -> Vec<String> {
        let mut h: Vec<String> = self.axes.iter().map(|a| a.name.clone()).collect();
        if !self.axes.iter().any(|a| a.name == KT_AXIS) {
            h.push(KT_AXIS.into());
        }
        h.extend(["E0".into(), "degeneracy".into()]);
        h.extend(self.gap_levels.iter().map(|k| format!("E_sep_k{k}")));
        h.extend(["energy".into(), "entropy".into(), "concurrence".into()]);
        for c in &self.criteria {
            h.extend(["value", "threshold", "detected"].map(|s| format!("{c}_{s}")));
            if *c == Criterion::Q {
                h.push("Q0".into());
                let n_m = self
                    .rows
                    .first()
                    .and_then(|r| r.q.as_ref())
                    .map_or(0, |q| q.qm.len());
                h.extend((1..=n_m).map(|m| format!("Q{m}")));
            }
            if matches!(c, Criterion::Entropy(_))
                && !h.iter().any(|s| s == "ground_relative_entropy")
            {
                h.push("ground_relative_entropy".into());
            }
        }
        h.push("caveats".into());
        h
    }

    fn csv_record(&self, row: &SweepRow) -> Vec<String> {
        let mut r: Vec<String> = row.params.iter().map(|p| num(p.value)).collect();
        if !self.axes.iter().any(|a| a.name == KT_AXIS) {
            r.push(num(row.kt));
        }
        r.push(num(row.ground_energy));
        r.push(row.degeneracy.to_string());
        r.extend(row.ksep.iter().map(|k| num(k.energy)));
        r.extend([num(row.energy), num(row.entropy), num(row.concurrence)]);
        let mut rel_written = false;
        for (c, v) in self.criteria.iter().zip(&row.verdicts) {
            r.extend([num(v.value), num(v.threshold), v.detected.to_string()]);
            if *c == Criterion::Q {
                let q = row.q.as_ref().expect("Q report present");
                r.push(num(q.q0));
                r.extend(q.qm.iter().map(|&x| num(x)));
            }
            if matches!(c, Criterion::Entropy(_)) && !rel_written {
                r.push(num(row.ground_relative_entropy.unwrap_or(f64::NAN)));
                rel_written = true;
            }
        }
        r.push(row.caveats.join("; "));
        r
    }

    /// One line per grid point. Identical tables produce identical bytes.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.csv_header())?;
        for row in &self.rows {
            w.write_record(self.csv_record(row))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
    }

    /// Config echo, rows and a provenance block.
    pub fn to_json(&self, cfg: &SweepConfig, wall_time_seconds: f64) -> Result<String> {
        #[derive(Serialize)]
        struct Provenance<'a> {
            seed: u64,
            version: &'a str,
            wall_time_seconds: f64,
        }
        #[derive(Serialize)]
        struct Document<'a> {
            config: &'a SweepConfig,
            axes: &'a [AxisGrid],
            rows: &'a [SweepRow],
            provenance: Provenance<'a>,
        }
        Ok(serde_json::to_string_pretty(&Document {
            config: cfg,
            axes: &self.axes,
            rows: &self.rows,
            provenance: Provenance {
                seed: cfg.optimizer.seed,
                version: env!("CARGO_PKG_VERSION"),
                wall_time_seconds,
            },
        })?)
    }

    /// Gap verdicts per row, in ascending order of k.
    pub fn gap_detections(&self) -> Vec<Vec<bool>> {
        self.rows
            .iter()
            .map(|row| {
                self.gap_levels
                    .iter()
                    .map(|k| {
                        row.verdict(&format!("gap-k{k}"))
                            .is_some_and(|v| v.detected)
                    })
                    .collect()
            })
            .collect()
    }

    /// Whether, at every grid point, a gap detection at level i implies a
    /// detection at every requested level j > i.
    pub fn nesting_holds(&self) -> bool {
        self.gap_detections()
            .iter()
            .all(|detected| detected.windows(2).all(|w| !w[0] || w[1]))
    }
}

/// Runs `cfg` and writes the result to its output target, if any.
pub fn run_and_write(cfg: &SweepConfig) -> Result<SweepTable> {
    let start = Instant::now();
    let table = run_sweep(cfg)?;
    if let Some(out) = &cfg.output {
        let file = std::fs::File::create(&out.path)?;
        match out.format {
            OutputFormat::Csv => table.write_csv(std::io::BufWriter::new(file))?,
            OutputFormat::Json => {
                let mut w = std::io::BufWriter::new(file);
                w.write_all(
                    table
                        .to_json(cfg, start.elapsed().as_secs_f64())?
                        .as_bytes(),
                )?;
            }
        }
    }
    Ok(table)
}

/// The detection boundary of one criterion on a two-axis grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionBoundary {
    pub criterion: String,
    /// (first-axis value, largest detecting second-axis value); columns with
    /// no detection are omitted.
    pub points: Vec<(f64, f64)>,
    /// First-axis values whose detected set is not an interval starting at
    /// the lowest second-axis value.
    pub non_monotone: Vec<f64>,
}

/// For every first-axis column, the largest second-axis value at which
/// `criterion` still detects, interpolated linearly on the detection margin
/// between the last detecting and the first non-detecting grid point.
pub fn classify_regions(table: &SweepTable, criterion: &str) -> Result<RegionBoundary> {
    if table.axes.len() != 2 {
        return invalid("region classification needs a two-axis grid");
    }
    let (xs, ys) = (&table.axes[0], &table.axes[1]);
    if table.rows.len() != xs.values.len() * ys.values.len() {
        return invalid(format!(
            "{} rows do not fill a {}x{} grid",
            table.rows.len(),
            xs.values.len(),
            ys.values.len()
        ));
    }
    let mut points = Vec::new();
    let mut non_monotone = Vec::new();
    for (i, &x) in xs.values.iter().enumerate() {
        let column = &table.rows[i * ys.values.len()..(i + 1) * ys.values.len()];
        let mut margins = Vec::with_capacity(column.len());
        for (j, row) in column.iter().enumerate() {
            let (rx, ry) = (row.param(&xs.name), row.param(&ys.name));
            if rx != Some(x) || ry != Some(ys.values[j]) {
                return invalid(format!(
                    "row {} is out of grid order",
                    i * ys.values.len() + j
                ));
            }
            let v = row.verdict(criterion).ok_or_else(|| {
                Error::InvalidArgument(format!("criterion `{criterion}` not in table"))
            })?;
            margins.push((v.margin() - POLICY.detection_margin, v.detected));
        }
        let Some(last) = margins.iter().rposition(|(_, d)| *d) else {
            continue;
        };
        if margins[..last].iter().any(|(_, d)| !d) {
            non_monotone.push(x);
        }
        let y = if last + 1 == margins.len() {
            ys.values[last]
        } else {
            let (m0, m1) = (margins[last].0, margins[last + 1].0);
            let (y0, y1) = (ys.values[last], ys.values[last + 1]);
            y0 + (y1 - y0) * m0 / (m0 - m1)
        };
        points.push((x, y));
    }
    Ok(RegionBoundary {
        criterion: criterion.to_string(),
        points,
        non_monotone,
    })
}
