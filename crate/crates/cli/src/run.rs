//! Experiment dispatch.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use multimode_hom::biphoton::{direct_amplitude, Aperture, Analyzer, DEFAULT_APERTURE_SAMPLES};
use multimode_hom::bsa::{self, AnalyzerSetup, BellClass, RNG_ALGORITHM};
use multimode_hom::hom::{dip_curve, CoincidenceMap, DetectionConfig, DipCurve, Interferometer, MapMode};
use multimode_hom::oam::{
    classical_model_falsifier, default_candidate_family, oam_decompose, zero_locus_shift_test, FalsifierOptions,
    Verdict,
};
use serde_json::{json, Value};

use crate::config::{Experiment, Interference, RunConfig};
use crate::emit::{emit_map, write_file};
use crate::CliError;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub experiment: Experiment,
    pub out_dir: PathBuf,
    /// Overrides the configuration seed.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub outputs: Vec<PathBuf>,
    pub results: Value,
    pub metadata: PathBuf,
}

/// Validates the configuration, runs the experiment and writes its files
/// plus `run.json` into the output directory.
pub fn run(config: &RunConfig, opts: &RunOptions) -> Result<RunSummary, CliError> {
    let mut config = config.clone();
    if let Some(seed) = opts.seed {
        config.seed = seed;
    }
    config.validate(opts.experiment)?;
    std::fs::create_dir_all(&opts.out_dir).map_err(|e| CliError::io(&opts.out_dir, e))?;
    let out = &opts.out_dir;
    let (outputs, results) = match opts.experiment {
        Experiment::Dip => dip(&config, out)?,
        Experiment::Map => map(&config, out)?,
        Experiment::SamePort => same_port(&config, out)?,
        Experiment::OamDecompose => oam(&config, out)?,
        Experiment::ZeroLocus => zero_locus(&config, out)?,
        Experiment::Falsifier => falsifier(&config, out)?,
        Experiment::Bsa => bsa_run(&config, out)?,
    };
    let names: Vec<String> = outputs
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    let metadata = json!({
        "tool": "mmhom",
        "cli_version": env!("CARGO_PKG_VERSION"),
        "core_version": multimode_hom::VERSION,
        "experiment": opts.experiment.to_string(),
        "seed": config.seed,
        "rng": RNG_ALGORITHM,
        "config": serde_json::to_value(&config).map_err(|e| CliError::Config(e.to_string()))?,
        "outputs": names,
        "results": results,
    });
    let meta_path = out.join("run.json");
    let text = serde_json::to_string_pretty(&metadata).map_err(|e| CliError::Config(e.to_string()))?;
    write_file(&meta_path, text + "\n")?;
    Ok(RunSummary {
        outputs,
        results,
        metadata: meta_path,
    })
}

type Outcome = (Vec<PathBuf>, Value);

fn interferometer(config: &RunConfig) -> Result<Interferometer, CliError> {
    Ok(Interferometer::new(config.state()?, config.splitter()?, config.detection()?)?)
}

fn analyzers(config: &RunConfig) -> (Analyzer, Analyzer) {
    (config.analyzers.first_rad, config.analyzers.second_rad)
}

fn aperture(config: &RunConfig) -> Result<Aperture, CliError> {
    let d = config.scan.aperture_diameter_mm;
    Ok(if d > 0.0 {
        Aperture::disk(d, DEFAULT_APERTURE_SAMPLES)?
    } else {
        Aperture::point()
    })
}

fn write_dip(curve: &DipCurve, path: &Path) -> Result<(), CliError> {
    let mut text = String::from("delay_um,rate\n");
    for (d, r) in curve.delays_um.iter().zip(&curve.rates) {
        let _ = writeln!(text, "{d},{r}");
    }
    write_file(path, text)
}

fn dip_results(curve: &DipCurve) -> Value {
    json!({ "visibility": curve.visibility, "baseline": curve.baseline })
}

fn dip(config: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let hom = interferometer(config)?;
    let (a1, a2) = analyzers(config);
    let detection = DetectionConfig::Cross {
        analyzer_1: a1,
        analyzer_2: a2,
    };
    let curve = dip_curve(&hom, config.delay_scan(), detection, config.coherence()?)?;
    let path = out.join("dip.csv");
    write_dip(&curve, &path)?;
    Ok((vec![path], dip_results(&curve)))
}

fn scan_map(config: &RunConfig, mode: MapMode) -> Result<CoincidenceMap, CliError> {
    let hom = interferometer(config)?;
    let ap = aperture(config)?;
    let fixed = (config.scan.fixed_x_mm, config.scan.fixed_y_mm);
    Ok(CoincidenceMap::scan(&hom, mode, fixed, config.scan.grid()?, &ap, &ap)?.normalized())
}

fn map_results(map: &CoincidenceMap) -> Value {
    json!({ "nx": map.grid.nx, "ny": map.grid.ny, "peak_normalized": map.peak_normalized })
}

fn map(config: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let (analyzer_1, analyzer_2) = analyzers(config);
    let mode = match config.interference {
        Interference::Balanced => MapMode::Cross {
            analyzer_1,
            analyzer_2,
            gamma: 1.0,
        },
        Interference::Unbalanced => MapMode::Cross {
            analyzer_1,
            analyzer_2,
            gamma: 0.0,
        },
        Interference::None => MapMode::Direct,
    };
    let map = scan_map(config, mode)?;
    let outputs = emit_map(&map, &out.join("map"))?;
    Ok((outputs, map_results(&map)))
}

/// Same-port delay curve and the zero-delay same-port map.
fn same_port(config: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let hom = interferometer(config)?;
    let (analyzer_a, analyzer_b) = analyzers(config);
    let port = config.port.into();
    let detection = DetectionConfig::SamePort {
        port,
        analyzer_a,
        analyzer_b,
    };
    let curve = dip_curve(&hom, config.delay_scan(), detection, config.coherence()?)?;
    let dip_path = out.join("same_port_dip.csv");
    write_dip(&curve, &dip_path)?;
    let gamma = match config.interference {
        Interference::Balanced => 1.0,
        Interference::Unbalanced => 0.0,
        Interference::None => {
            return Err(CliError::Config("same_port needs a beam splitter; set interference to balanced or unbalanced".into()))
        }
    };
    let map = scan_map(
        config,
        MapMode::SamePort {
            port,
            analyzer_a,
            analyzer_b,
            gamma,
        },
    )?;
    let mut outputs = vec![dip_path];
    outputs.extend(emit_map(&map, &out.join("same_port_map"))?);
    Ok((outputs, json!({ "dip": dip_results(&curve), "map": map_results(&map) })))
}

fn oam(config: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let spec = oam_decompose(&config.pump.build()?, config.oam.truncation())?;
    let mut text = String::from("l_s,p_s,l_i,p_i,re,im,probability\n");
    for (&(ls, ps, li, pi), c) in &spec.entries {
        let _ = writeln!(text, "{ls},{ps},{li},{pi},{},{},{}", c.re, c.im, c.norm_sqr());
    }
    let path = out.join("oam.csv");
    write_file(&path, text)?;
    let results = json!({
        "max_off_rule": spec.max_off_rule(),
        "deficit": spec.deficit,
        "doubling_change": spec.doubling_change,
        "basis_waist_mm": spec.basis_waist_mm,
    });
    Ok((vec![path], results))
}

fn delta(config: &RunConfig) -> (f64, f64) {
    (config.locus.delta_x_mm, config.locus.delta_y_mm)
}

fn zero_locus(config: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let pump = config.pump.build()?;
    let geom = config.detection()?;
    let d = delta(config);
    let report = zero_locus_shift_test(&pump, geom, d)?;
    let field = pump.propagated(geom.z_mm);
    let mut text = String::from("signal_x_mm,signal_y_mm,idler_x_mm,idler_y_mm,probability,displaced_probability\n");
    for &(s, i) in &report.locus_points {
        let p0 = direct_amplitude(&field, s, i).norm_sqr() / report.peak;
        let moved = direct_amplitude(&field, (s.0 + d.0, s.1 + d.1), (i.0 - d.0, i.1 - d.1)).norm_sqr() / report.peak;
        let _ = writeln!(text, "{},{},{},{},{p0},{moved}", s.0, s.1, i.0, i.1);
    }
    let path = out.join("zero_locus.csv");
    write_file(&path, text)?;
    let results = json!({
        "max_violation": report.max_violation,
        "undisplaced_max": report.undisplaced_max,
        "null_position_mm": [report.null_position.0, report.null_position.1],
    });
    Ok((vec![path], results))
}

fn falsifier(config: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let pump = config.pump.build()?;
    let l = match pump.kind() {
        multimode_hom::modes::ModeKind::Lg { l, .. } => *l,
        other => return Err(CliError::Config(format!("falsifier needs an LG pump, got {other:?}"))),
    };
    let family = default_candidate_family(l, config.locus.candidate_l_max);
    let opts = FalsifierOptions {
        threshold: config.locus.threshold,
        ..FalsifierOptions::default()
    };
    let report = classical_model_falsifier(&pump, &family, config.detection()?, &opts)?;
    let mut text = String::from("pair,weight\n");
    for (name, w) in report.family.iter().zip(&report.weights) {
        let _ = writeln!(text, "{name},{w}");
    }
    let path = out.join("falsifier.csv");
    write_file(&path, text)?;
    let (verdict, degenerate) = match report.verdict {
        Verdict::Excluded => ("excluded", false),
        Verdict::NotExcluded { degenerate } => ("not_excluded", degenerate),
    };
    let results = json!({
        "verdict": verdict,
        "degenerate": degenerate,
        "min_residual_on_locus": report.min_residual_on_locus,
        "fit_rms": report.fit_rms,
    });
    Ok((vec![path], results))
}

fn bsa_run(config: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let state = config.bsa.state.into();
    let parity = config.bsa.parity.into();
    let setup = AnalyzerSetup {
        splitter: config.splitter()?,
        visibility: config.bsa.visibility,
    };
    let dist = bsa::outcome_distribution_with_visibility(state, parity, setup.splitter, setup.visibility)?;
    let mut text = String::from("signature,probability,assigned_class\n");
    for (sig, p) in &dist.probabilities {
        let class = bsa::classify(*sig, parity).map_or("ambiguous", |c| c.name());
        let _ = writeln!(text, "{sig},{p},{class}");
    }
    let dist_path = out.join("bsa_distribution.csv");
    write_file(&dist_path, text)?;

    let tally = bsa::run_monte_carlo_with(state, parity, setup, &config.detector_model()?, config.bsa.gates)?;
    let mut csv = Vec::new();
    tally.write_csv(&mut csv).map_err(|e| CliError::io(out.join("bsa_tally.csv"), e))?;
    let tally_path = out.join("bsa_tally.csv");
    write_file(&tally_path, csv)?;
    let results = json!({
        "true_class": BellClass::of(state).name(),
        "gates": tally.total_gates,
        "pairs": tally.pairs(),
        "misidentified": tally.misidentified(),
        "error_rate": tally.error_rate(),
    });
    Ok((vec![dist_path, tally_path], results))
}
