use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use memassoc::circuit::{metrics, run_chain};
use memassoc::fit::{self, IvTrace, FIT_PARAM_NAMES};
use memassoc::vision::{array_state, classify, load_image, load_state_grid, train_all, ArrayState, ImageGrid};
use memassoc::{parse_config, Error, ExperimentConfig};
use serde_json::json;

use crate::manifest::{config_from_manifest, RunOutputs};
use crate::plot::PLOT_SCRIPT;

pub const FIT_DEVICE_FILE: &str = "fit_device.toml";
pub const FIT_REPORT_FILE: &str = "fit_report.json";
pub const FIT_HISTORY_FILE: &str = "fit_history.csv";
pub const TRACE_FILE: &str = "trace.csv";
pub const METRICS_FILE: &str = "metrics.txt";
pub const PLOT_FILE: &str = "plot_trace.py";
pub const ARRAY_STATE_FILE: &str = "array_state.csv";
pub const REPORT_FILE: &str = "classification_report.csv";

/// An error with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(msg: impl fmt::Display) -> Self {
        Failure { code: 1, message: msg.to_string() }
    }

    pub fn runtime(msg: impl fmt::Display) -> Self {
        Failure { code: 2, message: msg.to_string() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::ConfigSyntax { .. } => Failure::usage(e),
            _ => Failure::runtime(e),
        }
    }
}

/// Parse a TOML config or the snapshot inside a manifest; no path means all defaults.
pub fn load_config(path: Option<&Path>) -> Result<ExperimentConfig, Failure> {
    let Some(path) = path else {
        return Ok(parse_config("")?);
    };
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|e| e == "json");
    let toml = if is_json {
        config_from_manifest(&text)
            .ok_or_else(|| Failure::usage(format!("{}: not a run manifest (no `config` entry)", path.display())))?
    } else {
        text
    };
    parse_config(&toml).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

pub fn fit(cfg: &ExperimentConfig, trace_path: &Path, out: &Path) -> Result<(), Failure> {
    let real = IvTrace::read_csv(trace_path)?;
    let fit_cfg = cfg.fit_config();
    let initial_rmse =
        fit::simulate_current_with(&fit_cfg.initial, &real, &fit_cfg.simulate).and_then(|m| fit::rmse(&m, &real))?;
    let result = fit::fit(&real, &fit_cfg)?;

    let mut files = RunOutputs::new(out);
    files.input(trace_path)?;
    files.write(FIT_DEVICE_FILE, ExperimentConfig::device_fragment(&result.params))?;

    let fitted = fit::params_to_vec(&result.params);
    let mut report = serde_json::Map::new();
    report.insert("rmse".into(), json!(result.rmse));
    report.insert("initial_rmse".into(), json!(initial_rmse));
    report.insert("iterations".into(), json!(result.iterations));
    report.insert("converged".into(), json!(result.converged));
    report.insert("samples".into(), json!(real.len()));
    for (name, v) in FIT_PARAM_NAMES.iter().zip(fitted) {
        report.insert(format!("fitted.{name}"), json!(v));
    }
    let report = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    files.write(FIT_REPORT_FILE, report)?;

    let mut history = String::from("iteration,rmse\n");
    for (i, f) in result.history.iter().enumerate() {
        let _ = writeln!(history, "{i},{f}");
    }
    files.write(FIT_HISTORY_FILE, history)?;
    files.finish("fit", &cfg.to_toml())?;

    if result.converged {
        Ok(())
    } else {
        Err(Failure::runtime(format!(
            "fit did not converge in {} iterations (rmse {})",
            result.iterations, result.rmse
        )))
    }
}

pub fn pavlov(cfg: &ExperimentConfig, out: &Path) -> Result<(), Failure> {
    let trace = run_chain(&cfg.chain_config()?)?;
    let report = metrics(&trace)?;
    let mut files = RunOutputs::new(out);
    files.write(TRACE_FILE, trace.to_csv())?;
    files.write(METRICS_FILE, report.to_kv())?;
    files.write(PLOT_FILE, PLOT_SCRIPT)?;
    files.finish("pavlov", &cfg.to_toml())
}

fn data_err(path: &Path, msg: impl fmt::Display) -> Failure {
    Failure::runtime(format!("{}: {msg}", path.display()))
}

/// Regular, non-hidden files in name order.
fn list_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| data_err(dir, e))? {
        let entry = entry.map_err(|e| data_err(dir, e))?;
        let hidden = entry.file_name().to_string_lossy().starts_with('.');
        if !hidden && entry.file_type().map_err(|e| data_err(dir, e))?.is_file() {
            out.push(entry.path());
        }
    }
    out.sort();
    Ok(out)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// `(input, teacher)` paths keyed by the shared prefix of `P_input.*` / `P_teacher.*`.
fn training_pairs(dir: &Path) -> Result<Vec<(PathBuf, PathBuf)>, Failure> {
    let mut pairs: BTreeMap<String, (Option<PathBuf>, Option<PathBuf>)> = BTreeMap::new();
    for path in list_files(dir)? {
        let s = stem(&path);
        if let Some(p) = s.strip_suffix("_input") {
            pairs.entry(p.to_string()).or_default().0 = Some(path);
        } else if let Some(p) = s.strip_suffix("_teacher") {
            pairs.entry(p.to_string()).or_default().1 = Some(path);
        } else {
            return Err(data_err(&path, "training files must be named <pair>_input.* or <pair>_teacher.*"));
        }
    }
    if pairs.is_empty() {
        return Err(data_err(dir, "no training pairs found"));
    }
    pairs
        .into_iter()
        .map(|(name, p)| match p {
            (Some(i), Some(t)) => Ok((i, t)),
            _ => Err(data_err(&dir.join(&name), "training pair is missing its input or teacher image")),
        })
        .collect()
}

fn train(cfg: &ExperimentConfig, dir: &Path, files: &mut RunOutputs) -> Result<ArrayState, Failure> {
    let mut images: Vec<(ImageGrid, ImageGrid)> = Vec::new();
    for (i, t) in training_pairs(dir)? {
        images.push((load_image(&i, cfg.vision.allow_resize)?, load_image(&t, cfg.vision.allow_resize)?));
        files.input(&i)?;
        files.input(&t)?;
    }
    let array = ArrayState::standard(cfg.device);
    Ok(train_all(array, images.iter().map(|(i, t)| (i, t)), &cfg.train_config())?)
}

pub fn vision_train(cfg: &ExperimentConfig, train_dir: &Path, out: &Path) -> Result<(), Failure> {
    let mut files = RunOutputs::new(out);
    let array = train(cfg, train_dir, &mut files)?;
    files.write(ARRAY_STATE_FILE, array_state(&array).to_csv())?;
    files.finish("vision-train", &cfg.to_toml())
}

pub fn vision_classify(
    cfg: &ExperimentConfig,
    test_dir: &Path,
    state: Option<&Path>,
    train_dir: Option<&Path>,
    out: &Path,
) -> Result<(), Failure> {
    let mut files = RunOutputs::new(out);
    let array = match (state, train_dir) {
        (Some(s), _) => {
            let grid = load_state_grid(s)?;
            files.input(s)?;
            ArrayState::from_normalized(cfg.device, &grid)
        }
        (None, Some(t)) => {
            let a = train(cfg, t, &mut files)?;
            files.write(ARRAY_STATE_FILE, array_state(&a).to_csv())?;
            a
        }
        (None, None) => return Err(Failure::usage("vision-classify needs --state or --train-dir")),
    };
    let infer = cfg.infer_config();
    let mut report = String::new();
    for path in list_files(test_dir)? {
        let img = load_image(&path, cfg.vision.allow_resize)?;
        files.input(&path)?;
        let c = classify(&array, &img, &infer)?;
        let _ = writeln!(report, "{},{},{},{}", stem(&path), c.similarity, infer.similarity_threshold, c.label);
    }
    files.write(REPORT_FILE, report)?;
    files.finish("vision-classify", &cfg.to_toml())
}
