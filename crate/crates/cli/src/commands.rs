//! Subcommand implementations. Every command validates its inputs,
//! writes only under its `--out` path, and echoes the fully resolved
//! configuration next to its outputs so runs are reproducible.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use vq360_core::config::{feature_version, RunConfig};
use vq360_core::dataset::{
    compute_features, load_manifest, read_feature_cache, write_feature_cache, DatasetManifest,
};
use vq360_core::eval::{eval_report, fit_logistic4};
use vq360_core::geometry::PatternKind;
use vq360_core::harness::{run_repeated_cv, PooledRow, PooledTable, SplitFile};
use vq360_core::metrics::FeatureId;
use vq360_core::pooling::{pool_tensor, PoolingKind};
use vq360_core::regress::{default_grid, sffs, Hyperparams, ModelKind, QualityModel};
use vq360_core::tensor::FeatureMode;

use crate::Command;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Features {
            config,
            manifest,
            out,
            mode,
            pattern,
            fov,
            jobs,
        } => cmd_features(config.config, manifest, out, mode, pattern, fov, jobs),
        Command::Pool {
            config,
            cache,
            manifest,
            out,
            pooling,
            tau,
            p,
            k_percent,
        } => cmd_pool(
            config.config,
            cache,
            manifest,
            out,
            pooling,
            tau,
            p,
            k_percent,
        ),
        Command::Train {
            table,
            kind,
            grid,
            tune_repeats,
            tune_fraction,
            seed,
            out,
        } => cmd_train(table, kind, grid, tune_repeats, tune_fraction, seed, out),
        Command::Predict { model, table, out } => cmd_predict(model, table, out),
        Command::Evaluate {
            input,
            score_col,
            table,
            logistic_fit,
            split,
            out,
        } => cmd_evaluate(input, score_col, table, logistic_fit, split, out),
        Command::Cv {
            table,
            kind,
            model,
            hyperparams,
            repeats,
            fraction,
            seed,
            out,
        } => cmd_cv(
            table,
            kind,
            model,
            hyperparams,
            repeats,
            fraction,
            seed,
            out,
        ),
        Command::Sffs {
            table,
            max_features,
            kind,
            repeats,
            fraction,
            seed,
            out,
        } => cmd_sffs(table, max_features, kind, repeats, fraction, seed, out),
        Command::Sweep {
            config,
            manifest,
            patterns,
            fovs,
            include_projection,
            jobs,
            out,
        } => cmd_sweep(
            config.config,
            manifest,
            patterns,
            fovs,
            include_projection,
            jobs,
            out,
        ),
        Command::Synth {
            out,
            contents,
            levels,
            frames,
            width,
            seed,
        } => cmd_synth(out, contents, levels, frames, width, seed),
    }
}

fn load_config(path: Option<PathBuf>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(&p).with_context(|| format!("loading config {}", p.display())),
        None => Ok(RunConfig::default()),
    }
}

/// Without an explicit config, a command reading a feature cache picks
/// up the resolved config echoed there by `features`.
fn load_config_or_echo(path: Option<PathBuf>, echo_dir: &Path) -> Result<RunConfig> {
    if let Some(p) = path {
        return RunConfig::load(&p).with_context(|| format!("loading config {}", p.display()));
    }
    let echo = echo_dir.join("config.json");
    if echo.exists() {
        let text = std::fs::read_to_string(&echo)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        if let Some(cfg) = value.get("config") {
            return serde_json::from_value(cfg.clone())
                .with_context(|| format!("parsing echoed config {}", echo.display()));
        }
    }
    Ok(RunConfig::default())
}

fn set_jobs(jobs: Option<usize>) {
    if let Some(n) = jobs {
        // Ignore failure: the global pool can only be set once, which
        // is fine for a single-command process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

/// Echo the resolved configuration (plus command parameters) next to
/// the outputs. Deterministic content keeps reruns byte-identical.
fn echo_config<T: Serialize>(dir: &Path, echo: &T) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut json = serde_json::to_string_pretty(echo)?;
    json.push('\n');
    std::fs::write(dir.join("config.json"), json)?;
    Ok(())
}

fn print_warnings(manifest: &DatasetManifest) {
    for w in &manifest.warnings {
        eprintln!("warning: {w}");
    }
}

#[derive(Serialize)]
struct FeaturesEcho<'a> {
    command: &'a str,
    config: &'a RunConfig,
    feature_version: &'a str,
}

fn cmd_features(
    config: Option<PathBuf>,
    manifest_path: PathBuf,
    out: PathBuf,
    mode: Option<FeatureMode>,
    pattern: Option<PatternKind>,
    fov: Option<f64>,
    jobs: Option<usize>,
) -> Result<()> {
    let mut cfg = load_config(config)?;
    if let Some(m) = mode {
        cfg.mode = m;
    }
    if let Some(p) = pattern {
        cfg.pattern = p;
    }
    if let Some(f) = fov {
        cfg.fov_deg = f;
    }
    set_jobs(jobs);
    let manifest = load_manifest(&manifest_path, false)
        .with_context(|| format!("loading manifest {}", manifest_path.display()))?;
    print_warnings(&manifest);
    std::fs::create_dir_all(&out)?;
    manifest
        .videos
        .par_iter()
        .try_for_each(|entry| -> Result<()> {
            let provenance = cfg.provenance(entry.width);
            // Cache hit with matching provenance: nothing to do.
            if read_feature_cache(&out, &entry.video_id, Some(&provenance)).is_ok() {
                return Ok(());
            }
            let pattern = match cfg.mode {
                FeatureMode::Projection => None,
                _ => Some(cfg.sampling_pattern(entry.width)?),
            };
            let tensor = compute_features(entry, pattern.as_ref(), provenance, cfg.sphere_points)
                .with_context(|| format!("computing features for {}", entry.video_id))?;
            write_feature_cache(&out, &tensor)?;
            Ok(())
        })?;
    echo_config(
        &out,
        &FeaturesEcho {
            command: "features",
            config: &cfg,
            feature_version: feature_version(),
        },
    )?;
    println!(
        "features: {} videos cached in {}",
        manifest.videos.len(),
        out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct PoolEcho<'a> {
    command: &'a str,
    config: &'a RunConfig,
}

#[allow(clippy::too_many_arguments)]
fn cmd_pool(
    config: Option<PathBuf>,
    cache: PathBuf,
    manifest_path: PathBuf,
    out: PathBuf,
    pooling: Option<PoolingKind>,
    tau: Option<f64>,
    p: Option<f64>,
    k_percent: Option<f64>,
) -> Result<()> {
    let mut cfg = load_config_or_echo(config, &cache)?;
    if let Some(k) = pooling {
        cfg.pooling.kind = k;
    }
    if tau.is_some() {
        cfg.pooling.tau = tau;
    }
    if let Some(v) = p {
        cfg.pooling.p = v;
    }
    if let Some(v) = k_percent {
        cfg.pooling.k_percent = v;
    }
    cfg.pooling.validate()?;
    let manifest = load_manifest(&manifest_path, false)?;
    print_warnings(&manifest);
    let mut columns: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for entry in &manifest.videos {
        let provenance = cfg.provenance(entry.width);
        let tensor = read_feature_cache(&cache, &entry.video_id, Some(&provenance))
            .with_context(|| format!("reading cache for {}", entry.video_id))?;
        let pooled = pool_tensor(&tensor, &cfg.pooling)?;
        let names = pooled.column_names();
        match &columns {
            None => columns = Some(names),
            Some(existing) if *existing == names => {}
            Some(_) => bail!("inconsistent feature layout across videos"),
        }
        rows.push(PooledRow {
            video_id: entry.video_id.clone(),
            group_id: entry.group_id.clone(),
            dmos: entry.dmos,
            values: pooled.values,
        });
    }
    let table = PooledTable::new(columns.unwrap_or_default(), rows)?;
    if let Some(dir) = out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    table.write_csv(&out)?;
    let echo_dir = out.parent().unwrap_or(Path::new(".")).join(format!(
        "{}.echo",
        out.file_stem().and_then(|s| s.to_str()).unwrap_or("pool")
    ));
    echo_config(
        &echo_dir,
        &PoolEcho {
            command: "pool",
            config: &cfg,
        },
    )?;
    println!("pool: {} rows -> {}", table.rows.len(), out.display());
    Ok(())
}

fn load_grid(kind: ModelKind, path: Option<PathBuf>) -> Result<Vec<Hyperparams>> {
    match path {
        None => Ok(default_grid(kind)),
        Some(p) => {
            let text = std::fs::read_to_string(&p)?;
            let grid: Vec<Hyperparams> = serde_json::from_str(&text)
                .with_context(|| format!("parsing grid {}", p.display()))?;
            Ok(grid)
        }
    }
}

fn cmd_train(
    table_path: PathBuf,
    kind: ModelKind,
    grid: Option<PathBuf>,
    tune_repeats: usize,
    tune_fraction: f64,
    seed: u64,
    out: PathBuf,
) -> Result<()> {
    let table = PooledTable::read_csv(&table_path)?;
    let grid = load_grid(kind, grid)?;
    // Tune and train on the whole provided table; held-out protocols
    // pass a train-side table here and evaluate separately.
    let training = table.to_training_set()?;
    let first_dmos = table.rows.first().and_then(|r| r.dmos);
    if table.rows.iter().all(|r| r.dmos == first_dmos) {
        eprintln!("warning: all dmos values are equal; the model degenerates to a constant");
    }
    let (best, tune_report) = vq360_core::regress::tune_hyperparams(
        &training,
        kind,
        &grid,
        tune_repeats,
        tune_fraction,
        seed,
    )?;
    let model = vq360_core::regress::train(
        &training,
        kind,
        &best,
        vq360_core::eval::derive_seed(seed, 0xF1A7, 0),
        table.columns.clone(),
    )?;
    if let Some(dir) = out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    model.save(&out)?;
    let report_path = out.with_extension("tune.json");
    let mut json = serde_json::to_string_pretty(&tune_report)?;
    json.push('\n');
    std::fs::write(&report_path, json)?;
    println!(
        "train: model -> {} (tuning report -> {})",
        out.display(),
        report_path.display()
    );
    Ok(())
}

fn cmd_predict(model_path: PathBuf, table_path: PathBuf, out: PathBuf) -> Result<()> {
    let model = QualityModel::load(&model_path)?;
    let table = PooledTable::read_csv(&table_path)?;
    model.check_layout(&table.columns)?;
    let mut csv = String::from("video_id,prediction\n");
    for row in &table.rows {
        let pred = model.predict(&row.values)?;
        csv.push_str(&format!("{},{pred:.16e}\n", row.video_id));
    }
    if let Some(dir) = out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(&out, csv)?;
    println!("predict: {} rows -> {}", table.rows.len(), out.display());
    Ok(())
}

/// Generic two-column lookup: any CSV with a `video_id` column and the
/// requested value column.
fn read_column(path: &Path, column: &str) -> Result<BTreeMap<String, f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().context("empty csv")?.split(',').collect();
    let id_col = header
        .iter()
        .position(|c| *c == "video_id")
        .context("csv has no video_id column")?;
    let val_col = header
        .iter()
        .position(|c| *c == column)
        .with_context(|| format!("csv has no `{column}` column"))?;
    let mut map = BTreeMap::new();
    for line in lines {
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() <= id_col.max(val_col) {
            continue;
        }
        if parts[val_col].is_empty() {
            continue;
        }
        map.insert(
            parts[id_col].to_string(),
            parts[val_col]
                .parse()
                .with_context(|| format!("bad value in column {column}"))?,
        );
    }
    Ok(map)
}

#[derive(Serialize)]
struct EvaluateOutput {
    score_column: String,
    logistic_fit: bool,
    report: vq360_core::eval::EvalReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    logistic_params: Option<vq360_core::eval::Logistic4Params>,
}

fn cmd_evaluate(
    input: PathBuf,
    score_col: String,
    table: Option<PathBuf>,
    logistic_fit: bool,
    split: Option<PathBuf>,
    out: PathBuf,
) -> Result<()> {
    let scores = read_column(&input, &score_col)?;
    let dmos_source = table.as_ref().unwrap_or(&input);
    let dmos = read_column(dmos_source, "dmos")?;
    let groups: BTreeMap<String, String> = {
        let text = std::fs::read_to_string(dmos_source)?;
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next().context("empty csv")?.split(',').collect();
        let id_col = header
            .iter()
            .position(|c| *c == "video_id")
            .context("no video_id")?;
        match header.iter().position(|c| *c == "group_id") {
            Some(g) => lines
                .filter_map(|l| {
                    let parts: Vec<&str> = l.split(',').collect();
                    (parts.len() > id_col.max(g))
                        .then(|| (parts[id_col].to_string(), parts[g].to_string()))
                })
                .collect(),
            None => BTreeMap::new(),
        }
    };

    let pairs: Vec<(String, f64, f64)> = scores
        .iter()
        .filter_map(|(id, &s)| dmos.get(id).map(|&d| (id.clone(), s, d)))
        .collect();
    if pairs.is_empty() {
        bail!("no videos with both a `{score_col}` value and a dmos");
    }

    let in_side = |ids: &[String], id: &str| {
        ids.iter()
            .any(|x| x == id || groups.get(id).is_some_and(|g| g == x))
    };
    let (fit_rows, eval_rows): (Vec<_>, Vec<_>) = match &split {
        Some(split_path) => {
            let split = SplitFile::load(split_path)?;
            let fit: Vec<_> = pairs
                .iter()
                .filter(|(id, _, _)| in_side(&split.train, id))
                .collect();
            let eval: Vec<_> = pairs
                .iter()
                .filter(|(id, _, _)| in_side(&split.test, id))
                .collect();
            if fit.is_empty() || eval.is_empty() {
                bail!("split file does not match the input rows");
            }
            (fit, eval)
        }
        None => (pairs.iter().collect(), pairs.iter().collect()),
    };

    let descriptor = match &split {
        Some(p) => format!("{score_col} on test side of {}", p.display()),
        None => format!("{score_col} on all rows"),
    };
    let (report, params) = if logistic_fit {
        let fit_scores: Vec<f64> = fit_rows.iter().map(|(_, s, _)| *s).collect();
        let fit_dmos: Vec<f64> = fit_rows.iter().map(|(_, _, d)| *d).collect();
        let params = fit_logistic4(&fit_scores, &fit_dmos, None)?;
        let mapped: Vec<f64> = eval_rows.iter().map(|(_, s, _)| params.map(*s)).collect();
        let truth: Vec<f64> = eval_rows.iter().map(|(_, _, d)| *d).collect();
        (eval_report(&mapped, &truth, &descriptor)?, Some(params))
    } else {
        let pred: Vec<f64> = eval_rows.iter().map(|(_, s, _)| *s).collect();
        let truth: Vec<f64> = eval_rows.iter().map(|(_, _, d)| *d).collect();
        (eval_report(&pred, &truth, &descriptor)?, None)
    };
    let output = EvaluateOutput {
        score_column: score_col,
        logistic_fit,
        report,
        logistic_params: params,
    };
    if let Some(dir) = out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut json = serde_json::to_string_pretty(&output)?;
    json.push('\n');
    std::fs::write(&out, json)?;
    println!(
        "evaluate: n={} plcc={:.5} srocc={:.5} rmse={:.5} -> {}",
        output.report.n,
        output.report.plcc,
        output.report.srocc,
        output.report.rmse,
        out.display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_cv(
    table_path: PathBuf,
    kind: ModelKind,
    model: Option<PathBuf>,
    hyperparams: Option<PathBuf>,
    repeats: usize,
    fraction: f64,
    seed: u64,
    out: PathBuf,
) -> Result<()> {
    let table = PooledTable::read_csv(&table_path)?;
    let hp = if let Some(model_path) = model {
        let m = QualityModel::load(&model_path)?;
        if m.kind != kind {
            bail!("--model kind {:?} does not match --kind {:?}", m.kind, kind);
        }
        m.hyperparams
    } else if let Some(hp_path) = hyperparams {
        serde_json::from_str(&std::fs::read_to_string(&hp_path)?)
            .with_context(|| format!("parsing hyperparams {}", hp_path.display()))?
    } else {
        Hyperparams::default_for(kind)
    };
    let outcome = run_repeated_cv(&table, kind, &hp, repeats, fraction, seed)?;
    std::fs::create_dir_all(&out)?;
    #[derive(Serialize)]
    struct CvEcho<'a> {
        command: &'a str,
        kind: ModelKind,
        hyperparams: &'a Hyperparams,
        repeats: usize,
        fraction: f64,
        seed: u64,
    }
    echo_config(
        &out,
        &CvEcho {
            command: "cv",
            kind,
            hyperparams: &hp,
            repeats,
            fraction,
            seed,
        },
    )?;
    let mut json = serde_json::to_string_pretty(&outcome)?;
    json.push('\n');
    std::fs::write(out.join("cv_report.json"), json)?;
    let mut csv = String::from("repeat,plcc,srocc,rmse\n");
    for r in &outcome.per_repeat {
        csv.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e}\n",
            r.repeat, r.plcc, r.srocc, r.rmse
        ));
    }
    std::fs::write(out.join("cv_repeats.csv"), csv)?;
    println!(
        "cv: {} repeats ({} excluded) mean plcc={:.5} srocc={:.5} rmse={:.5} -> {}",
        outcome.valid_repeats,
        outcome.excluded_repeats,
        outcome.mean_plcc,
        outcome.mean_srocc,
        outcome.mean_rmse,
        out.display()
    );
    Ok(())
}

fn cmd_sffs(
    table_path: PathBuf,
    max_features: usize,
    kind: ModelKind,
    repeats: usize,
    fraction: f64,
    seed: u64,
    out: PathBuf,
) -> Result<()> {
    let table = PooledTable::read_csv(&table_path)?;
    let training = table.to_training_set()?;
    let ids = table.column_ids()?;
    let steps = sffs(
        &training,
        &ids,
        kind,
        &Hyperparams::default_for(kind),
        max_features,
        repeats,
        fraction,
        seed,
    )?;
    std::fs::create_dir_all(&out)?;
    #[derive(Serialize)]
    struct SffsEcho<'a> {
        command: &'a str,
        kind: ModelKind,
        max_features: usize,
        repeats: usize,
        fraction: f64,
        seed: u64,
        columns: &'a [String],
    }
    echo_config(
        &out,
        &SffsEcho {
            command: "sffs",
            kind,
            max_features,
            repeats,
            fraction,
            seed,
            columns: &table.columns,
        },
    )?;
    let mut json = serde_json::to_string_pretty(&steps)?;
    json.push('\n');
    std::fs::write(out.join("sffs_trace.json"), json)?;
    let mut csv = String::from("step,added,selected,mean_plcc\n");
    for (i, s) in steps.iter().enumerate() {
        let names: Vec<&str> = s.selected.iter().map(|id| id.name()).collect();
        csv.push_str(&format!(
            "{},{},{},{:.16e}\n",
            i + 1,
            s.added.name(),
            names.join("+"),
            s.mean_plcc
        ));
    }
    std::fs::write(out.join("sffs_trace.csv"), csv)?;
    for (i, s) in steps.iter().enumerate() {
        println!(
            "sffs step {}: +{} (mean plcc {:.5})",
            i + 1,
            s.added.name(),
            s.mean_plcc
        );
    }
    Ok(())
}

/// Features evaluated by the sampling sweep (the spatial set).
const SWEEP_FEATURES: [FeatureId; 7] = [
    FeatureId::Sa,
    FeatureId::Psnr,
    FeatureId::PsnrHvs,
    FeatureId::PsnrHvsM,
    FeatureId::Ssim,
    FeatureId::MsSsim,
    FeatureId::Gmsd,
];

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    config: Option<PathBuf>,
    manifest_path: PathBuf,
    patterns: Vec<PatternKind>,
    fovs: Vec<f64>,
    include_projection: bool,
    jobs: Option<usize>,
    out: PathBuf,
) -> Result<()> {
    let base_cfg = load_config(config)?;
    set_jobs(jobs);
    let manifest = load_manifest(&manifest_path, true)?;
    print_warnings(&manifest);
    std::fs::create_dir_all(&out)?;

    let mut configs: Vec<(String, RunConfig)> = Vec::new();
    if include_projection {
        let cfg = RunConfig {
            mode: FeatureMode::Projection,
            features: SWEEP_FEATURES.to_vec(),
            pooling: vq360_core::pooling::PoolingConfig {
                kind: PoolingKind::Mean,
                ..base_cfg.pooling.clone()
            },
            ..base_cfg.clone()
        };
        configs.push(("proj".to_string(), cfg));
    }
    for &pattern in &patterns {
        for &fov in &fovs {
            // Per-metric sweep scores patterns on the collage frame
            // with mean pooling.
            let cfg = RunConfig {
                mode: FeatureMode::Collage,
                pattern,
                fov_deg: fov,
                features: SWEEP_FEATURES.to_vec(),
                pooling: vq360_core::pooling::PoolingConfig {
                    kind: PoolingKind::Mean,
                    ..base_cfg.pooling.clone()
                },
                ..base_cfg.clone()
            };
            configs.push((format!("{}{}", pattern.name(), fov), cfg));
        }
    }

    let mut csv = String::from("config,metric,plcc,srocc\n");
    for (label, cfg) in &configs {
        let cache_dir = out.join(format!("cache_{label}"));
        std::fs::create_dir_all(&cache_dir)?;
        manifest
            .videos
            .par_iter()
            .try_for_each(|entry| -> Result<()> {
                let provenance = cfg.provenance(entry.width);
                if read_feature_cache(&cache_dir, &entry.video_id, Some(&provenance)).is_ok() {
                    return Ok(());
                }
                let pattern = match cfg.mode {
                    FeatureMode::Projection => None,
                    _ => Some(cfg.sampling_pattern(entry.width)?),
                };
                let tensor =
                    compute_features(entry, pattern.as_ref(), provenance, cfg.sphere_points)?;
                write_feature_cache(&cache_dir, &tensor)?;
                Ok(())
            })?;

        let mut rows = Vec::new();
        for entry in &manifest.videos {
            let provenance = cfg.provenance(entry.width);
            let tensor = read_feature_cache(&cache_dir, &entry.video_id, Some(&provenance))?;
            let pooled = pool_tensor(&tensor, &cfg.pooling)?;
            rows.push((entry.dmos.unwrap(), pooled.values));
        }
        for (m, id) in SWEEP_FEATURES.iter().enumerate() {
            let scores: Vec<f64> = rows.iter().map(|(_, v)| v[m]).collect();
            let dmos: Vec<f64> = rows.iter().map(|(d, _)| *d).collect();
            let params = fit_logistic4(&scores, &dmos, None)?;
            let mapped = params.map_all(&scores);
            let report = eval_report(&mapped, &dmos, label)?;
            csv.push_str(&format!(
                "{label},{},{:.16e},{:.16e}\n",
                id.name(),
                report.plcc,
                report.srocc
            ));
        }
    }
    std::fs::write(out.join("sweep.csv"), csv)?;
    echo_config(
        &out,
        &FeaturesEcho {
            command: "sweep",
            config: &base_cfg,
            feature_version: feature_version(),
        },
    )?;
    println!(
        "sweep: {} configurations -> {}",
        configs.len(),
        out.join("sweep.csv").display()
    );
    Ok(())
}

fn cmd_synth(
    out: PathBuf,
    contents: usize,
    levels: usize,
    frames: usize,
    width: usize,
    seed: u64,
) -> Result<()> {
    let spec = vq360_core::synth::SynthSpec {
        contents,
        levels,
        frames,
        width,
        seed,
    };
    let (manifest_path, manifest) = vq360_core::synth::generate(&out, &spec)?;
    println!(
        "synth: {} videos ({} contents x {} levels) -> {}",
        manifest.videos.len(),
        contents,
        levels,
        manifest_path.display()
    );
    Ok(())
}
