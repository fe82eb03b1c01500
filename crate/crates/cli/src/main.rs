use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use transfid_core::analysis::{build_cohort, classify_groups, compare_networks, concordance, rank_networks, CohortTable, Stages};
use transfid_core::iqa::{summarize, MetricSet};
use transfid_core::manifest::parse_manifest;
use transfid_core::nifti::{write_mask, write_nifti};
use transfid_core::phantom::generate_phantom;
use transfid_core::report::{
    group_counts, groups_csv, read_features_csv, read_metrics_csv, summary_json, write_atomic, write_features_csv,
    write_metrics_csv, Comparison, Summary,
};
use transfid_core::{selftest, Error, RunConfig};

#[derive(Parser)]
#[command(name = "transfid", version, about = "Fidelity evaluation of synthetic 3D medical images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the 186 radiomic features for every image in a manifest
    Extract(CohortArgs),
    /// Compute MAE, MSE, SSIM and PSNR of each synthetic image against its original
    Metrics(CohortArgs),
    /// Correlate features across the cohort and group them by network agreement
    Analyze(AnalyzeArgs),
    /// Write a seeded phantom volume and mask
    Phantom(PhantomArgs),
    /// Check the built-in phantom golden files
    Selftest,
}

#[derive(Args)]
struct CohortArgs {
    /// CSV with columns patient_id,source,path
    #[arg(long)]
    manifest: PathBuf,
    /// JSON run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = one per CPU)
    #[arg(long, env = "TRANSFID_JOBS")]
    jobs: Option<usize>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    metrics: PathBuf,
    /// Per-feature groups CSV
    #[arg(long)]
    out: Option<PathBuf>,
    /// Correlation a network must exceed to discover a feature
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Summary JSON
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct PhantomArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, value_parser = parse_dims, default_value = "16,16,16")]
    dims: [usize; 3],
    #[arg(long, value_parser = parse_spacing, default_value = "1,1,1")]
    spacing: [f64; 3],
    #[arg(long)]
    out: PathBuf,
    /// Defaults to the volume path with a `_mask` suffix
    #[arg(long)]
    mask_out: Option<PathBuf>,
}

fn parse_triple<T: std::str::FromStr>(s: &str) -> Result<[T; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated values, got {s:?}"));
    }
    let mut it = parts.into_iter().map(|p| p.parse::<T>().map_err(|_| format!("bad value {p:?}")));
    Ok([it.next().unwrap()?, it.next().unwrap()?, it.next().unwrap()?])
}

fn parse_dims(s: &str) -> Result<[usize; 3], String> {
    let d = parse_triple::<usize>(s)?;
    if d.contains(&0) {
        return Err("dimensions must be positive".into());
    }
    Ok(d)
}

fn parse_spacing(s: &str) -> Result<[f64; 3], String> {
    let v = parse_triple::<f64>(s)?;
    if v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err("spacing must be positive".into());
    }
    Ok(v)
}

enum Failure {
    Usage(String),
    Data(Error),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

type Outcome = Result<(), Failure>;

fn load_config(path: Option<&Path>) -> Result<RunConfig, Error> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn output(flag: Option<PathBuf>, fallback: Option<&PathBuf>, what: &str) -> Result<PathBuf, Failure> {
    flag.or_else(|| fallback.cloned())
        .ok_or_else(|| Failure::Usage(format!("no output path for {what}: pass --out or set outputs.{what} in the config")))
}

fn report_warnings(table: &CohortTable) {
    for w in table.warnings() {
        eprintln!("warning: {w}");
    }
}

fn cohort(args: &CohortArgs, stages: Stages) -> Result<(RunConfig, CohortTable), Failure> {
    let cfg = load_config(args.config.as_deref())?;
    let records = parse_manifest(&args.manifest)?;
    let jobs = args.jobs.unwrap_or(cfg.jobs);
    let table = build_cohort(&records, &cfg, jobs, stages)?;
    report_warnings(&table);
    Ok((cfg, table))
}

fn extract(args: CohortArgs) -> Outcome {
    let (cfg, table) = cohort(&args, Stages::FEATURES)?;
    let out = output(args.out, cfg.outputs.features.as_ref(), "features")?;
    write_features_csv(&out, &table.feature_rows())?;
    eprintln!("{} patients -> {}", table.len(), out.display());
    Ok(())
}

fn metrics(args: CohortArgs) -> Outcome {
    let (cfg, table) = cohort(&args, Stages::METRICS)?;
    let out = output(args.out, cfg.outputs.metrics.as_ref(), "metrics")?;
    write_metrics_csv(&out, &table.metric_rows())?;
    eprintln!("{} patients -> {}", table.len(), out.display());
    Ok(())
}

fn analyze(args: AnalyzeArgs) -> Outcome {
    let mut cfg = load_config(args.config.as_deref())?;
    if let Some(t) = args.threshold {
        cfg.analysis.threshold = t;
        cfg.validate()?;
    }
    let out = output(args.out, cfg.outputs.groups.as_ref(), "groups")?;
    let summary_path = args.summary.or_else(|| cfg.outputs.summary.clone());

    let table = CohortTable::from_rows(read_features_csv(&args.features)?, read_metrics_csv(&args.metrics)?)?;
    report_warnings(&table);
    let records = concordance(&table)?;
    let ranking = rank_networks(&table)?;
    let threshold = cfg.analysis.threshold;
    let groups = classify_groups(&records, &ranking.top_network, threshold)?;
    write_atomic(&out, &groups_csv(&records, &groups))?;

    let (counts, families) = group_counts(&groups);
    let mut warnings = table.warnings().to_vec();
    let mut metric_summaries = std::collections::BTreeMap::new();
    for net in table.networks() {
        let values = table.metric_values(&net);
        if !values.is_empty() {
            metric_summaries.insert(net.clone(), summarize(&values)?);
        }
    }
    let mut comparisons = Vec::new();
    for other in table.networks().iter().filter(|n| **n != ranking.top_network) {
        for metric in MetricSet::NAMES {
            match compare_networks(&table, metric, &ranking.top_network, other) {
                Ok(t) => comparisons.push(Comparison::new(metric, &ranking.top_network, other, t)),
                Err(e) => warnings.push(format!("{metric} {} vs {other}: {e}", ranking.top_network)),
            }
        }
    }
    let summary = Summary {
        threshold,
        top_network: ranking.top_network.clone(),
        ranking,
        patients: table.len(),
        anomalous: groups.iter().filter(|g| g.anomalous).count(),
        groups: counts.clone(),
        families,
        metrics: metric_summaries,
        comparisons,
        warnings,
    };
    if let Some(p) = summary_path {
        write_atomic(&p, &summary_json(&summary))?;
    }
    let sizes: Vec<String> = counts.iter().map(|(g, n)| format!("{g}={n}")).collect();
    println!("top network {}: {}", summary.top_network, sizes.join(" "));
    Ok(())
}

fn phantom(args: PhantomArgs) -> Outcome {
    let p = generate_phantom(args.seed, args.dims, args.spacing)?;
    let mask_out = args.mask_out.unwrap_or_else(|| {
        let stem = args.out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let stem = stem.strip_suffix(".nii").unwrap_or(&stem).to_string();
        args.out.with_file_name(format!("{stem}_mask.nii"))
    });
    write_nifti(&args.out, &p.volume)?;
    write_mask(&mask_out, &p.mask, args.spacing)?;
    println!("{}", p.checksum());
    Ok(())
}

fn run_selftest() -> Outcome {
    let mut ok = true;
    for c in selftest::run()? {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        ok &= c.passed;
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Check("selftest failed".into()))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Extract(a) => extract(a),
        Command::Metrics(a) => metrics(a),
        Command::Analyze(a) => analyze(a),
        Command::Phantom(a) => phantom(a),
        Command::Selftest => run_selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
