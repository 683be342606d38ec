use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;
use tractlab::acoustics::{find_formants, transfer_spectrum};
use tractlab::analysis::{formants_from_deviations, se_estimate, Estimate};
use tractlab::experiments::{
    calibrated_threshold, functional_check_records, parse_dataset_csv, write_dataset_csv, SimulationRecord,
};
use tractlab::generic_model::vowel_by_label;
use tractlab::{run_condition, Condition, CyclePoint, Dataset, ExperimentConfig, ModelKind, SampledAreaFunction};

use crate::config::{CliError, RunConfig, RunManifest};
use crate::svg::{self, Panel, Range};

const RING_COLOR: &str = "#c0392b";
const C1_COLOR: &str = "#9a9a9a";
const C2_COLOR: &str = "#2e6fba";
const SE_COLOR: &str = "#27ae60";
const EST_COLOR: &str = "#8e44ad";

pub struct Context {
    cfg: RunConfig,
    out: PathBuf,
    seed: u64,
    start: Instant,
}

impl Context {
    pub fn new(config: Option<&Path>, out: PathBuf, seed: u64) -> Result<Self, CliError> {
        Ok(Self {
            cfg: RunConfig::load(config)?,
            out,
            seed,
            start: Instant::now(),
        })
    }

    fn experiment(&self, model: ModelKind, condition: Condition, n: usize) -> ExperimentConfig {
        ExperimentConfig {
            model,
            condition,
            sample_count: n,
            rng_seed: self.seed,
            theta_grid_size: self.cfg.theta_grid_size,
            setup: self.cfg.setup,
            grid: self.cfg.grid,
            constants: Some(self.cfg.constants(model)),
        }
    }

    fn write(&self, name: &str, bytes: &[u8], outputs: &mut Vec<PathBuf>) -> Result<(), CliError> {
        fs::create_dir_all(&self.out).map_err(|e| CliError::io(&self.out, e))?;
        let path = self.out.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        outputs.push(PathBuf::from(name));
        Ok(())
    }

    fn write_manifest(
        &self,
        stem: &str,
        command: &str,
        arguments: serde_json::Value,
        mut outputs: Vec<PathBuf>,
    ) -> Result<(), CliError> {
        let name = format!("{stem}.manifest.json");
        outputs.push(PathBuf::from(&name));
        let manifest = RunManifest {
            command: command.into(),
            arguments,
            config: self.cfg.clone(),
            tool_version: env!("CARGO_PKG_VERSION"),
            rng_seed: self.seed,
            outputs: outputs.clone(),
            duration_s: self.start.elapsed().as_secs_f64(),
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        let path = self.out.join(&name);
        fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
        println!("wrote {} files to {}", outputs.len(), self.out.display());
        Ok(())
    }
}

fn dataset_bytes(ds: &Dataset) -> Vec<u8> {
    let mut buf = Vec::new();
    write_dataset_csv(ds, &mut buf).expect("writing to memory");
    buf
}

fn area_bytes(area: &SampledAreaFunction) -> Vec<u8> {
    let mut buf = Vec::new();
    area.write_csv(&mut buf).expect("writing to memory");
    buf
}

fn short(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn points(records: &[SimulationRecord]) -> Vec<(f64, f64)> {
    records.iter().filter_map(SimulationRecord::f1_f2).collect()
}

fn ipa(record: &SimulationRecord) -> String {
    record
        .vowel_slug()
        .and_then(vowel_by_label::<f64>)
        .map(|v| format!("[{}]", v.label))
        .unwrap_or_default()
}

fn area_panel(col: usize, row: usize, area: &SampledAreaFunction, title: &str, yr: Range) -> Panel {
    let d = area.tubelet_length_cm();
    let edges: Vec<f64> = (0..=area.n()).map(|i| i as f64 * d).collect();
    let mut p = svg::cell(col, row, Range::of([0.0, area.total_length_cm()]), yr);
    p.axes(title, "distance from glottis (cm)", "area (cm²)")
        .steps(&edges, area.areas(), C2_COLOR);
    p
}

/// `(f1, f2)` chart: ring, optional scatter, vowel labels.
fn formant_panel(
    col: usize,
    row: usize,
    title: &str,
    ring: &[SimulationRecord],
    vowels: &[SimulationRecord],
    extra: &[(Vec<(f64, f64)>, &str)],
) -> Panel {
    let ring_pts = points(ring);
    let all = ring_pts
        .iter()
        .chain(extra.iter().flat_map(|(pts, _)| pts.iter()))
        .copied()
        .collect::<Vec<_>>();
    let mut p = svg::cell(col, row, Range::of(all.iter().map(|p| p.0)), Range::of(all.iter().map(|p| p.1)));
    p.axes(title, "f1 (Hz)", "f2 (Hz)");
    for (pts, color) in extra {
        p.dots(pts, color, 1.2);
    }
    p.polyline(&ring_pts, RING_COLOR, true);
    for v in vowels {
        if let Some((f1, f2)) = v.f1_f2() {
            p.dots(&[(f1, f2)], "#000", 2.5).label(f1, f2, &ipa(v));
        }
    }
    p
}

fn check_failures(ds: &Dataset, what: &str) -> Result<(), CliError> {
    match ds.failure_count() {
        0 => Ok(()),
        n => Err(CliError::Numeric(format!("formant extraction failed for {n} {what} record(s)"))),
    }
}

pub fn vowels(ctx: &Context, model: ModelKind) -> Result<(), CliError> {
    let vowels = run_condition(&ctx.experiment(model, Condition::VowelSweep, 0))?;
    let ring = run_condition(&ctx.experiment(model, Condition::RingSweep, 0))?;
    let mut outputs = Vec::new();
    let mut areas = Vec::new();
    for r in &vowels.records {
        let area = ctx.cfg.setup.area_from_parameters(model, &r.params)?;
        let slug = r.vowel_slug().unwrap_or("vowel");
        ctx.write(&format!("{model}_vowel_{slug}.csv"), &area_bytes(&area), &mut outputs)?;
        areas.push(area);
    }
    ctx.write(&format!("{model}_vowels.csv"), &dataset_bytes(&vowels), &mut outputs)?;

    let yr = Range::of(areas.iter().flat_map(|a| a.areas().iter().copied()).chain([0.0]));
    let mut panels = Vec::new();
    for (i, (r, area)) in vowels.records.iter().zip(&areas).enumerate() {
        let annotation = match model {
            ModelKind::Generic => format!("({},{})", short(r.params[0]), short(r.params[1])),
            _ => format!("ã=({},{})", short(r.dct.a1_tilde), short(r.dct.a2_tilde)),
        };
        panels.push(area_panel(i % 3, i / 3, area, &format!("{} {annotation}", ipa(r)), yr));
    }
    panels.push(formant_panel(2, 2, &format!("{model} vowel space"), &ring.records, &vowels.records, &[]));
    ctx.write(&format!("{model}_vowels.svg"), svg::document(panels).as_bytes(), &mut outputs)?;
    ctx.write_manifest(&format!("{model}_vowels"), "vowels", json!({ "model": model }), outputs)?;
    check_failures(&vowels, "vowel")
}

pub fn space(ctx: &Context, model: ModelKind) -> Result<(), CliError> {
    let ring = run_condition(&ctx.experiment(model, Condition::RingSweep, 0))?;
    let vowels = run_condition(&ctx.experiment(model, Condition::VowelSweep, 0))?;
    let mut outputs = Vec::new();
    ctx.write(&format!("{model}_space.csv"), &dataset_bytes(&ring), &mut outputs)?;
    let panel = formant_panel(0, 0, &format!("{model} vowel space (ρ = 1)"), &ring.records, &vowels.records, &[]);
    ctx.write(&format!("{model}_space.svg"), svg::document(vec![panel]).as_bytes(), &mut outputs)?;
    ctx.write_manifest(&format!("{model}_space"), "space", json!({ "model": model }), outputs)?;
    check_failures(&ring, "ring")
}

/// Formants predicted from the ring's cosine coefficients by an estimate.
fn estimate_curve(ring: &Dataset, estimate: Estimate) -> Vec<(f64, f64)> {
    ring.records
        .iter()
        .map(|r| formants_from_deviations(se_estimate(r.dct, estimate), &ring.neutral))
        .collect()
}

pub fn mc(ctx: &Context, model: ModelKind, condition: Condition, n: usize) -> Result<(), CliError> {
    if !matches!(condition, Condition::C1 | Condition::C2) {
        return Err(CliError::Usage(format!("mc runs C1 or C2, not {condition}")));
    }
    let ds = run_condition(&ctx.experiment(model, condition, n))?;
    let ring = run_condition(&ctx.experiment(model, Condition::RingSweep, 0))?;
    let vowels = run_condition(&ctx.experiment(model, Condition::VowelSweep, 0))?;
    let stem = format!("{model}_{condition}");
    let mut outputs = Vec::new();
    ctx.write(&format!("{stem}.csv"), &dataset_bytes(&ds), &mut outputs)?;

    let color = if condition == Condition::C1 { C1_COLOR } else { C2_COLOR };
    let scatter: Vec<(f64, f64)> = points(&ds.records);
    let mut panel = formant_panel(
        0,
        0,
        &format!("{model} {condition} ({} draws, {} failed)", n, ds.failure_count()),
        &ring.records,
        &vowels.records,
        &[(scatter, color)],
    );
    let mut legend = vec![(color, condition.name()), (RING_COLOR, "C2 ring")];
    if model != ModelKind::Fant {
        panel
            .polyline(&estimate_curve(&ring, Estimate::FirstOrder), SE_COLOR, true)
            .polyline(&estimate_curve(&ring, Estimate::Biased), EST_COLOR, true);
        legend.extend([(SE_COLOR, "SE"), (EST_COLOR, "est")]);
    }
    panel.legend(&legend);
    ctx.write(&format!("{stem}.svg"), svg::document(vec![panel]).as_bytes(), &mut outputs)?;
    ctx.write_manifest(
        &stem,
        "mc",
        json!({ "model": model, "condition": condition, "n": n }),
        outputs,
    )?;
    if ds.failure_count() > 0 {
        eprintln!("note: {} record(s) flagged as extraction failures", ds.failure_count());
    }
    Ok(())
}

fn deviation_panel(col: usize, records: &[SimulationRecord], second: bool) -> Panel {
    let pick = |r: &SimulationRecord| -> Option<(f64, f64)> {
        let d = r.deviations.filter(|_| !r.failed)?;
        Some(if second {
            (r.dct.a2_tilde, d.df2)
        } else {
            (r.dct.a1_tilde, d.df1)
        })
    };
    let c1: Vec<(f64, f64)> = records.iter().filter(|r| r.condition == "C1").filter_map(pick).collect();
    let c2: Vec<(f64, f64)> = records.iter().filter(|r| r.condition != "C1").filter_map(pick).collect();
    let all: Vec<(f64, f64)> = c1.iter().chain(&c2).copied().collect();
    let xr = Range::of(all.iter().map(|p| p.0));
    let mut p = svg::cell(col, 0, xr, Range::of(all.iter().map(|p| p.1)));
    let (i, name) = if second { (2, "df2") } else { (1, "df1") };
    p.axes(&format!("{name} against ã{i}"), &format!("ã{i}"), name)
        .dots(&c1, C1_COLOR, 1.2)
        .dots(&c2, C2_COLOR, 1.2)
        .polyline(&[(xr.lo, -xr.lo / 2.0), (xr.hi, -xr.hi / 2.0)], SE_COLOR, false)
        .legend(&[(C1_COLOR, "C1"), (C2_COLOR, "C2"), (SE_COLOR, "−ã/2")]);
    p
}

pub fn analyze(ctx: &Context, dataset: &Path, bin_width: f64, threshold: Option<f64>) -> Result<(), CliError> {
    let file = fs::File::open(dataset).map_err(|e| CliError::io(dataset, e))?;
    let parsed = parse_dataset_csv(BufReader::new(file))
        .map_err(|e| CliError::Input(format!("{}: {e}", dataset.display())))?;
    let model = parsed.header_value("model").map(str::parse::<ModelKind>).transpose()?;
    let threshold = match (threshold, model) {
        (Some(t), _) => t,
        (None, Some(m)) => calibrated_threshold(m),
        (None, None) => {
            return Err(CliError::Usage(
                "dataset header names no model; pass --threshold".into(),
            ))
        }
    };
    let report = functional_check_records(&parsed.records, bin_width, threshold)?;
    let stem = dataset
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset")
        .to_string();
    let failed = parsed.records.iter().filter(|r| r.failed).count();
    let mut outputs = Vec::new();
    let doc = json!({
        "dataset": dataset.file_name().and_then(|s| s.to_str()),
        "model": model,
        "condition": parsed.header_value("condition"),
        "records": parsed.records.len(),
        "failed_records": failed,
        "report": report,
    });
    let text = serde_json::to_string_pretty(&doc).expect("report serializes") + "\n";
    ctx.write(&format!("{stem}_report.json"), text.as_bytes(), &mut outputs)?;
    for (second, name) in [(false, "df1"), (true, "df2")] {
        let panel = deviation_panel(0, &parsed.records, second);
        ctx.write(&format!("{stem}_{name}.svg"), svg::document(vec![panel]).as_bytes(), &mut outputs)?;
    }
    println!(
        "functional: {} (p95 spread {:.4}, threshold {threshold}, bin width {bin_width}, {} bins)",
        report.functional,
        report.p95_spread,
        report.bins.len()
    );
    ctx.write_manifest(
        &format!("{stem}_analysis"),
        "analyze",
        json!({ "dataset": dataset, "bin_width": bin_width, "threshold": threshold }),
        outputs,
    )
}

pub fn spectrum(
    ctx: &Context,
    model: ModelKind,
    rho: f64,
    theta: f64,
    params: Option<Vec<f64>>,
) -> Result<(), CliError> {
    let setup = &ctx.cfg.setup;
    let params = match params {
        Some(p) => p,
        None => setup.parameters_at(model, CyclePoint::new(rho, theta)?),
    };
    let area = setup.area_from_parameters(model, &params)?;
    let tf = transfer_spectrum(&area, &ctx.cfg.grid, &ctx.cfg.constants(model))?;
    let formants = find_formants(&tf, 2);
    let mut outputs = Vec::new();
    let stem = format!("{model}_spectrum");
    let mut csv = Vec::new();
    tf.write_csv(&mut csv).expect("writing to memory");
    ctx.write(&format!("{stem}.csv"), &csv, &mut outputs)?;
    ctx.write(&format!("{model}_area.csv"), &area_bytes(&area), &mut outputs)?;

    let yr = Range::of(area.areas().iter().copied().chain([0.0]));
    let left = area_panel(0, 0, &area, &format!("{model} area function"), yr);
    let curve: Vec<(f64, f64)> = tf.frequencies().into_iter().zip(tf.mag_db()).collect();
    let mut right = svg::cell(1, 0, Range::of(curve.iter().map(|p| p.0)), Range::of(curve.iter().map(|p| p.1)));
    right.axes("transfer function", "frequency (Hz)", "|U_lips/U_glottis| (dB)");
    right.polyline(&curve, C2_COLOR, false);
    if let Ok(f) = &formants {
        for (name, fx) in [("f1", f.f1), ("f2", f.f2)] {
            let db = curve
                .iter()
                .min_by(|a, b| (a.0 - fx).abs().total_cmp(&(b.0 - fx).abs()))
                .map(|p| p.1)
                .unwrap_or(0.0);
            right.dots(&[(fx, db)], RING_COLOR, 3.0).label(fx, db, &format!("{name} {fx:.0} Hz"));
        }
    }
    ctx.write(&format!("{stem}.svg"), svg::document(vec![left, right]).as_bytes(), &mut outputs)?;
    ctx.write_manifest(
        &stem,
        "spectrum",
        json!({ "model": model, "rho": rho, "theta": theta, "params": params }),
        outputs,
    )?;
    let f = formants?;
    println!("f1 = {:.2} Hz, f2 = {:.2} Hz", f.f1, f.f2);
    Ok(())
}
