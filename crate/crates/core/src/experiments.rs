//! Monte Carlo conditions, vowel sweeps and the dataset CSV format.
//!
//! Randomness: record `index` of a run draws from `ChaCha8Rng::seed_from_u64(seed)`
//! switched to stream `index`, so each record depends only on `(seed, index)` and
//! serial and parallel runs produce the same bytes.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::acoustics::{formants_of, AcousticConstants, FormantSet, FrequencyGrid};
use crate::analysis::{dct_coefficients, functional_check, relative_deviations, DctPair, DeviationPair, FunctionalReport};
use crate::error::{invalid_config, Result, TractError};
use crate::generic_model::vowel_targets;
use crate::hull::ConvexHull;
use crate::mixing::{CoordinationTriple, CyclePoint};
use crate::model::{ModelKind, ModelSetup};

/// Name of the generator recorded in dataset headers.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng(seed_from_u64(seed), stream=index)";

pub const DATASET_COLUMNS: &str = "condition,index,rho,theta,p1,p2,p3,p4,a1t,a2t,f1,f2,df1,df2,failed";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    /// Parameters independent and uniform on `[Ω − |Ψ1|, Ω + |Ψ1|]`.
    C1,
    /// Ring at `ρ = 1` plus random `(ρ, θ)` draws through the coordination function.
    C2,
    #[serde(rename = "vowel_sweep")]
    VowelSweep,
    #[serde(rename = "ring_sweep")]
    RingSweep,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::C1 => "C1",
            Condition::C2 => "C2",
            Condition::VowelSweep => "vowel_sweep",
            Condition::RingSweep => "ring_sweep",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Condition {
    type Err = TractError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "c1" => Ok(Condition::C1),
            "c2" => Ok(Condition::C2),
            "vowel_sweep" | "vowels" => Ok(Condition::VowelSweep),
            "ring_sweep" | "ring" => Ok(Condition::RingSweep),
            other => Err(invalid_config(format!("unknown condition '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub condition: Condition,
    /// Random draws; C2 adds them to the ring.
    pub sample_count: usize,
    pub rng_seed: u64,
    /// Ring resolution for C2 and the ring sweep.
    pub theta_grid_size: usize,
    pub setup: ModelSetup<f64>,
    pub grid: FrequencyGrid<f64>,
    /// Loss setting; `None` picks the model default.
    pub constants: Option<AcousticConstants<f64>>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::Drm,
            condition: Condition::C2,
            sample_count: 5000,
            rng_seed: 42,
            theta_grid_size: 96,
            setup: ModelSetup::default(),
            grid: FrequencyGrid::default(),
            constants: None,
        }
    }
}

impl ExperimentConfig {
    pub fn new(model: ModelKind, condition: Condition, sample_count: usize, rng_seed: u64) -> Self {
        Self {
            model,
            condition,
            sample_count,
            rng_seed,
            ..Self::default()
        }
    }

    pub fn constants(&self) -> AcousticConstants<f64> {
        self.constants
            .unwrap_or_else(|| self.setup.default_constants(self.model))
    }

    pub fn validate(&self) -> Result<()> {
        self.setup.validate()?;
        self.grid.validate()?;
        self.constants().validate()?;
        if self.condition == Condition::C1 && self.sample_count == 0 {
            return Err(invalid_config("C1 needs sample_count >= 1"));
        }
        if matches!(self.condition, Condition::C2 | Condition::RingSweep) && self.theta_grid_size < 3 {
            return Err(invalid_config("theta_grid_size must be >= 3"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRecord {
    /// `C1`, `C2`, `C2-ring`, `ring` or `vowel:<slug>`.
    pub condition: String,
    pub seed: u64,
    /// Draw index within the record's condition tag.
    pub index: usize,
    pub point: Option<CyclePoint<f64>>,
    pub params: Vec<f64>,
    pub dct: DctPair<f64>,
    pub formants: Option<FormantSet<f64>>,
    pub deviations: Option<DeviationPair<f64>>,
    pub failed: bool,
}

impl SimulationRecord {
    /// Vowel slug of a vowel-sweep record.
    pub fn vowel_slug(&self) -> Option<&str> {
        self.condition.strip_prefix("vowel:")
    }

    pub fn f1_f2(&self) -> Option<(f64, f64)> {
        self.formants.filter(|_| !self.failed).map(|f| (f.f1, f.f2))
    }
}

/// Work item: tag, index and where its parameters come from.
enum Source {
    Uniform,
    Cycle(CyclePoint<f64>),
    RandomCycle,
}

struct Job {
    tag: String,
    index: usize,
    source: Source,
}

fn jobs(cfg: &ExperimentConfig) -> Result<Vec<Job>> {
    let ring = |tag: &str| -> Result<Vec<Job>> {
        (0..cfg.theta_grid_size)
            .map(|i| {
                let theta = std::f64::consts::TAU * i as f64 / cfg.theta_grid_size as f64;
                Ok(Job {
                    tag: tag.to_string(),
                    index: i,
                    source: Source::Cycle(CyclePoint::on_ring(theta)?),
                })
            })
            .collect()
    };
    let random = |source: fn() -> Source, tag: &str| -> Vec<Job> {
        (0..cfg.sample_count)
            .map(|index| Job {
                tag: tag.to_string(),
                index,
                source: source(),
            })
            .collect()
    };
    Ok(match cfg.condition {
        Condition::C1 => random(|| Source::Uniform, "C1"),
        Condition::C2 => {
            let mut all = ring("C2-ring")?;
            all.extend(random(|| Source::RandomCycle, "C2"));
            all
        }
        Condition::RingSweep => ring("ring")?,
        Condition::VowelSweep => vowel_targets::<f64>()
            .into_iter()
            .enumerate()
            .map(|(index, v)| {
                Ok(Job {
                    tag: format!("vowel:{}", v.slug),
                    index,
                    source: Source::Cycle(CyclePoint::on_ring(v.theta)?),
                })
            })
            .collect::<Result<_>>()?,
    })
}

fn record_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Parameters drawn independently and uniformly inside the coordination ranges.
pub fn uniform_parameters(coord: &CoordinationTriple<f64>, seed: u64, index: usize) -> Vec<f64> {
    let mut rng = record_rng(seed, index);
    coord
        .ranges()
        .into_iter()
        .map(|(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
        .collect()
}

/// `ρ` uniform on `[0, 1)`, `θ` uniform on `[0, 2π)`.
pub fn random_cycle_point(seed: u64, index: usize) -> CyclePoint<f64> {
    let mut rng = record_rng(seed, index);
    let rho = rng.random::<f64>();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    CyclePoint::new(rho, theta).expect("draws lie in the cycle domain")
}

/// Shared per-run state.
struct Context {
    cfg: ExperimentConfig,
    coord: CoordinationTriple<f64>,
    constants: AcousticConstants<f64>,
    neutral: FormantSet<f64>,
}

impl Context {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let constants = cfg.constants();
        let neutral = formants_of(&cfg.setup.neutral_area(cfg.model)?, &cfg.grid, &constants)?;
        Ok(Self {
            cfg: cfg.clone(),
            coord: cfg.setup.coordination(cfg.model),
            constants,
            neutral,
        })
    }

    fn simulate(&self, job: &Job) -> Result<SimulationRecord> {
        let seed = self.cfg.rng_seed;
        let (point, params) = match job.source {
            Source::Uniform => (None, uniform_parameters(&self.coord, seed, job.index)),
            Source::Cycle(p) => (Some(p), self.cfg.setup.parameters_at(self.cfg.model, p)),
            Source::RandomCycle => {
                let p = random_cycle_point(seed, job.index);
                (Some(p), self.cfg.setup.parameters_at(self.cfg.model, p))
            }
        };
        let area = self.cfg.setup.area_from_parameters(self.cfg.model, &params)?;
        let dct = dct_coefficients(&area);
        let (formants, deviations, failed) = match formants_of(&area, &self.cfg.grid, &self.constants) {
            Ok(f) => (Some(f), Some(relative_deviations(&f, &self.neutral)?), false),
            Err(TractError::ExtractionFailure { .. }) => (None, None, true),
            Err(e) => return Err(e),
        };
        Ok(SimulationRecord {
            condition: job.tag.clone(),
            seed,
            index: job.index,
            point,
            params,
            dct,
            formants,
            deviations,
            failed,
        })
    }
}

/// Result of a run: the neutral reference plus records in job order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub config: ExperimentConfig,
    pub neutral: FormantSet<f64>,
    pub records: Vec<SimulationRecord>,
}

impl Dataset {
    pub fn failure_count(&self) -> usize {
        self.records.iter().filter(|r| r.failed).count()
    }
}

/// Runs a condition, records evaluated in parallel.
pub fn run_condition(cfg: &ExperimentConfig) -> Result<Dataset> {
    let ctx = Context::new(cfg)?;
    let records = jobs(cfg)?
        .par_iter()
        .map(|job| ctx.simulate(job))
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        config: cfg.clone(),
        neutral: ctx.neutral,
        records,
    })
}

/// Same output as [`run_condition`], on the calling thread.
pub fn run_condition_serial(cfg: &ExperimentConfig) -> Result<Dataset> {
    let ctx = Context::new(cfg)?;
    let records = jobs(cfg)?
        .iter()
        .map(|job| ctx.simulate(job))
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        config: cfg.clone(),
        neutral: ctx.neutral,
        records,
    })
}

/// Bin width on `(ã1, ã2)` used for the functional check.
pub const DEFAULT_BIN_WIDTH: f64 = 0.05;

/// Functional-check threshold per model, calibrated so coordination-driven
/// datasets pass and uniformly sampled ones fail at [`DEFAULT_BIN_WIDTH`].
///
/// The generic model has no independent-parameter condition; its value only
/// bounds the bin-width floor of a smooth surface (slope ≈ 0.5 times 0.05).
pub fn calibrated_threshold(model: ModelKind) -> f64 {
    match model {
        ModelKind::Generic => 0.05,
        ModelKind::Drm => 0.1,
        ModelKind::Fant => 0.6,
    }
}

/// [`functional_check`] over the non-failed records.
pub fn functional_check_records(
    records: &[SimulationRecord],
    bin_width: f64,
    threshold: f64,
) -> Result<FunctionalReport> {
    let points: Vec<(DctPair<f64>, DeviationPair<f64>)> = records
        .iter()
        .filter(|r| !r.failed)
        .filter_map(|r| r.deviations.map(|d| (r.dct, d)))
        .collect();
    functional_check(&points, bin_width, threshold)
}

/// Convex hull of the `(f1, f2)` points of non-failed records.
pub fn vowel_space_hull(records: &[SimulationRecord]) -> Result<ConvexHull<f64>> {
    let pts: Vec<(f64, f64)> = records.iter().filter_map(SimulationRecord::f1_f2).collect();
    ConvexHull::from_points(&pts)
}

/// Fraction of the non-failed `records` whose `(f1, f2)` lies inside `hull`.
pub fn coverage(hull: &ConvexHull<f64>, records: &[SimulationRecord]) -> f64 {
    let pts: Vec<(f64, f64)> = records.iter().filter_map(SimulationRecord::f1_f2).collect();
    hull.coverage(&pts)
}

/// `‖(p − Ω) / |Ψ1|‖₂`: distance from the centre of the parameter box, 1 at
/// a face centre and `√dim` at a corner. Coordinates with zero amplitude are skipped.
pub fn normalized_distance(coord: &CoordinationTriple<f64>, params: &[f64]) -> f64 {
    coord
        .omega()
        .iter()
        .zip(coord.psi1())
        .zip(params)
        .filter(|((_, a), _)| **a != 0.0)
        .map(|((o, a), p)| ((p - o) / a.abs()).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the dataset: `#` header lines echoing the configuration, the column
/// header, then one row per record.
pub fn write_dataset_csv<W: Write>(dataset: &Dataset, mut w: W) -> io::Result<()> {
    let cfg = &dataset.config;
    let c = cfg.constants();
    writeln!(w, "# tractlab dataset")?;
    writeln!(w, "# model={}", cfg.model)?;
    writeln!(w, "# condition={}", cfg.condition)?;
    writeln!(w, "# seed={}", cfg.rng_seed)?;
    writeln!(w, "# rng={RNG_ALGORITHM}")?;
    writeln!(w, "# sample_count={}", cfg.sample_count)?;
    writeln!(w, "# theta_grid_size={}", cfg.theta_grid_size)?;
    let n = match cfg.model {
        ModelKind::Generic => cfg.setup.generic.n_tubelets,
        ModelKind::Drm => cfg.setup.drm.n_tubelets,
        ModelKind::Fant => cfg.setup.fant.n,
    };
    writeln!(w, "# n={n}")?;
    if cfg.model == ModelKind::Fant {
        writeln!(w, "# fant_tube_area={}", cfg.setup.fant.tube_area)?;
    }
    writeln!(
        w,
        "# constants=sound_speed_c:{};air_density:{};loss_model:{};loss_coefficient:{};radiation_load:{}",
        c.sound_speed_c, c.air_density, c.loss_model.name(), c.loss_coefficient, c.radiation_load
    )?;
    writeln!(
        w,
        "# grid=start_hz:{};step_hz:{};count:{}",
        cfg.grid.start_hz, cfg.grid.step_hz, cfg.grid.count
    )?;
    writeln!(w, "# neutral_f1={}", dataset.neutral.f1)?;
    writeln!(w, "# neutral_f2={}", dataset.neutral.f2)?;
    writeln!(w, "# failed={}", dataset.failure_count())?;
    writeln!(w, "{DATASET_COLUMNS}")?;
    for r in &dataset.records {
        let p = |i: usize| opt(r.params.get(i).copied());
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.condition,
            r.index,
            opt(r.point.map(|p| p.rho())),
            opt(r.point.map(|p| p.theta())),
            p(0),
            p(1),
            p(2),
            p(3),
            r.dct.a1_tilde,
            r.dct.a2_tilde,
            opt(r.formants.map(|f| f.f1)),
            opt(r.formants.map(|f| f.f2)),
            opt(r.deviations.map(|d| d.df1)),
            opt(r.deviations.map(|d| d.df2)),
            u8::from(r.failed)
        )?;
    }
    Ok(())
}

/// A dataset read back from CSV: `key=value` header pairs and the records.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedDataset {
    pub header: BTreeMap<String, String>,
    pub records: Vec<SimulationRecord>,
}

impl ParsedDataset {
    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header.get(key).map(String::as_str)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> TractError {
    TractError::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_dataset_csv<R: BufRead>(reader: R) -> Result<ParsedDataset> {
    let mut header = BTreeMap::new();
    let mut records = Vec::new();
    let mut seen_columns = false;
    let mut last_line = 0;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = line.map_err(|e| parse_err(line_no, e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((k, v)) = comment.trim().split_once('=') {
                header.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        if !seen_columns {
            if line.trim() != DATASET_COLUMNS {
                return Err(parse_err(line_no, format!("expected column header '{DATASET_COLUMNS}'")));
            }
            seen_columns = true;
            continue;
        }
        let seed = header
            .get("seed")
            .and_then(|s| s.parse().ok())
            .unwrap_or_default();
        records.push(parse_row(line, line_no, seed)?);
    }
    if !seen_columns {
        return Err(parse_err(last_line.max(1), "no column header found; empty dataset"));
    }
    Ok(ParsedDataset { header, records })
}

fn parse_row(line: &str, line_no: usize, seed: u64) -> Result<SimulationRecord> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != 15 {
        return Err(parse_err(line_no, format!("expected 15 fields, got {}", fields.len())));
    }
    let num = |i: usize| -> Result<Option<f64>> {
        if fields[i].is_empty() {
            return Ok(None);
        }
        fields[i]
            .parse::<f64>()
            .map(Some)
            .map_err(|_| parse_err(line_no, format!("field {} is not a number: '{}'", i + 1, fields[i])))
    };
    let req = |i: usize| -> Result<f64> {
        num(i)?.ok_or_else(|| parse_err(line_no, format!("field {} is empty", i + 1)))
    };
    let index = fields[1]
        .parse::<usize>()
        .map_err(|_| parse_err(line_no, format!("bad index '{}'", fields[1])))?;
    let point = match (num(2)?, num(3)?) {
        (Some(rho), Some(theta)) => {
            Some(CyclePoint::new(rho, theta).map_err(|e| parse_err(line_no, e.to_string()))?)
        }
        (None, None) => None,
        _ => return Err(parse_err(line_no, "rho and theta must both be present or both empty")),
    };
    let params = (4..8).map(num).collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
    let failed = match fields[14] {
        "0" => false,
        "1" => true,
        other => return Err(parse_err(line_no, format!("failed flag must be 0 or 1, got '{other}'"))),
    };
    let formants = match (num(10)?, num(11)?) {
        (Some(f1), Some(f2)) => Some(FormantSet { f1, f2, f3: None }),
        _ => None,
    };
    let deviations = match (num(12)?, num(13)?) {
        (Some(df1), Some(df2)) => Some(DeviationPair { df1, df2 }),
        _ => None,
    };
    if !failed && (formants.is_none() || deviations.is_none()) {
        return Err(parse_err(line_no, "non-failed record without formants"));
    }
    Ok(SimulationRecord {
        condition: fields[0].to_string(),
        seed,
        index,
        point,
        params,
        dct: DctPair {
            a1_tilde: req(8)?,
            a2_tilde: req(9)?,
        },
        formants,
        deviations,
        failed,
    })
}
