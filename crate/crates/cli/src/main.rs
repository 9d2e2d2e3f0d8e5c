//! Command line driver: config parsing, subcommand dispatch, dataset and
//! manifest output. Non-interactive; every run writes into its own directory
//! and the same config + seed produce byte-identical files.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sha2::{Digest, Sha256};

use afc_core::afc::{analytic_efficiency, CombSpec, ToothShape};
use afc_core::error::CoreError;
use afc_core::experiment::{
    derive_channel, pulse_echo_result, reproduce_figure, run_sequence, FigureId,
};
use afc_core::spectral::{burn_hole_with, fit_hole_decay, relax, BurnOptions};
use afc_core::SpectralGrid;

use config::RunConfig;

#[derive(Parser)]
#[command(name = "afc-sim", version, about = "AFC quantum memory simulator")]
struct Cli {
    /// RNG seed; required (no silent entropy). May also come from the config
    /// file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for this run. Defaults to a subdirectory of
    /// AFCSIM_OUT_ROOT (or ./runs) named after the subcommand and seed.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Config file (TOML); omitted fields take the documented defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Named preset; "paper" selects the published-experiment defaults.
    #[arg(long, global = true)]
    preset: Option<String>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Burn a spectral hole, export the spectrum, features, and decay fit.
    Holeburn,
    /// Prepare the comb and report analytic / numeric recall efficiencies.
    Comb,
    /// Run the storage sequence and export the field-level echo result.
    Store,
    /// Run the storage sequence and export coincidence histogram + g2.
    G2,
    /// Regenerate the dataset behind one published figure (2a, 2b, 3, 4).
    Figure { id: String },
    /// Run the built-in invariant suite; nonzero exit on any failure.
    Selftest,
}

fn exit_code_for(err: &CoreError) -> u8 {
    match err.reason_code() {
        "invalid_input" => 2,
        "config" => 3,
        "parse" => 4,
        "degenerate_fit" => 5,
        "fit_failure" => 6,
        "resource" => 7,
        "low_counts" => 8,
        "io" => 9,
        _ => 10,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            // single-line machine-parseable error
            println!("error code={} msg={:?}", err.reason_code(), err.to_string());
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn out_dir(cli: &Cli, label: &str, seed: u64) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| {
        let root = std::env::var_os("AFCSIM_OUT_ROOT")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("runs"));
        root.join(format!("{label}-{seed}"))
    })
}

fn run(cli: Cli) -> Result<ExitCode, CoreError> {
    let cfg = RunConfig::load(cli.config.as_deref(), cli.preset.as_deref(), cli.seed)?;
    let seed = cfg.seed;
    let label = match &cli.cmd {
        Cmd::Holeburn => "holeburn".to_string(),
        Cmd::Comb => "comb".to_string(),
        Cmd::Store => "store".to_string(),
        Cmd::G2 => "g2".to_string(),
        Cmd::Figure { id } => format!("figure{id}"),
        Cmd::Selftest => "selftest".to_string(),
    };
    let dir = out_dir(&cli, &label, seed);
    std::fs::create_dir_all(&dir)?;

    let mut files: Vec<PathBuf> = Vec::new();
    let mut failed_checks = 0usize;
    match &cli.cmd {
        Cmd::Holeburn => files = cmd_holeburn(&cfg, &dir)?,
        Cmd::Comb => files = cmd_comb(&cfg, &dir)?,
        Cmd::Store => files = cmd_store(&cfg, &dir, seed)?,
        Cmd::G2 => files = cmd_g2(&cfg, &dir, seed)?,
        Cmd::Figure { id } => {
            let fig: FigureId = id.parse()?;
            files = reproduce_figure(fig, &dir, seed)?;
        }
        Cmd::Selftest => {
            let results = afc_core::selftest::run_all()?;
            for c in &results {
                println!(
                    "{} {} (measure {:.3e}, bound {:.3e})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.measure,
                    c.bound
                );
            }
            failed_checks = results.iter().filter(|c| !c.passed).count();
            let path = dir.join("selftest.json");
            std::fs::write(&path, serde_json::to_string_pretty(&results)?)?;
            files.push(path);
        }
    }

    write_manifest(&cfg, &label, &dir, &files)?;
    for f in &files {
        println!("wrote {}", f.display());
    }
    if failed_checks > 0 {
        println!("error code=selftest msg=\"{failed_checks} checks failed\"");
        return Ok(ExitCode::from(20));
    }
    Ok(ExitCode::SUCCESS)
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CoreError> {
    std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn cmd_holeburn(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>, CoreError> {
    let exp = &cfg.experiment;
    let burn = &cfg.burn;
    let line = SpectralGrid::flat(burn.span_mhz / 2.0, burn.step_mhz, burn.line_od)?;
    let (burned, features) = burn_hole_with(
        &line,
        burn.center_mhz,
        burn.width_mhz,
        burn.strength,
        &exp.levels,
        burn.branching,
        &BurnOptions::default(),
    )?;
    let spectrum = dir.join("hole_spectrum.csv");
    burned.write_csv(&spectrum)?;

    // forward-model the central hole depth over time and refit it
    let model = cfg.decay_model();
    let ci = burned.index_of(burn.center_mhz)?;
    let depth0 = line.od()[ci] - burned.od()[ci];
    let samples: Vec<(f64, f64)> = (0..40)
        .map(|i| {
            let t = 0.02 * 1.25f64.powi(i);
            let relaxed = relax(&burned, &line, t, &model).unwrap();
            (t, line.od()[ci] - relaxed.od()[ci])
        })
        .collect();
    let decay_csv = dir.join("hole_decay.csv");
    {
        use std::io::Write;
        let mut f = std::io::BufWriter::new(std::fs::File::create(&decay_csv)?);
        writeln!(f, "delay_s,hole_depth_od")?;
        for (t, d) in &samples {
            writeln!(f, "{t},{d}")?;
        }
    }
    let fit = fit_hole_decay(&samples)?;
    let report = dir.join("holeburn.json");
    write_json(
        &report,
        &serde_json::json!({
            "initial_depth_od": depth0,
            "features": features.iter().map(|f| serde_json::json!({
                "kind": format!("{:?}", f.kind),
                "species": f.species,
                "detuning_MHz": f.detuning_mhz,
                "depth_od": f.depth_od,
                "width_MHz": f.width_mhz,
            })).collect::<Vec<_>>(),
            "decay_fit": {
                "fast_lifetime_s": fit.model.fast_lifetime_s,
                "slow_lifetime_s": fit.model.slow_lifetime_s,
                "weight_fast": fit.model.weight_fast,
                "amplitude": fit.amplitude,
                "rms_residual": fit.rms_residual,
            },
        }),
    )?;
    Ok(vec![spectrum, decay_csv, report])
}

fn cmd_comb(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>, CoreError> {
    let exp = &cfg.experiment;
    let comb = exp.recipe.prepare(&exp.levels, &BurnOptions::default())?;
    let spec = exp.recipe.spec();
    let comb_csv = dir.join("comb.csv");
    comb.write_csv(&comb_csv)?;
    let channel = derive_channel(&comb, spec, exp.input_fwhm_ghz)?;
    let echo = pulse_echo_result(&comb, spec)?;

    // ideal ceiling: optimal tooth depth at high finesse, no background
    let ceiling = (0..400)
        .map(|i| {
            let f = 200.0;
            analytic_efficiency(&CombSpec {
                bandwidth_ghz: spec.bandwidth_ghz,
                delta_mhz: spec.delta_mhz,
                finesse: f,
                peak_od: f * (1.0 + i as f64 * 0.005),
                background_od: 0.0,
                tooth_shape: ToothShape::Square,
            })
        })
        .fold(0.0f64, f64::max);

    let report = dir.join("comb_report.json");
    write_json(
        &report,
        &serde_json::json!({
            "storage_time_ns": spec.storage_time_ns(),
            "analytic_center_efficiency": analytic_efficiency(spec),
            "band_averaged_efficiency": channel.echo_prob,
            "transmit_prob": channel.transmit_prob,
            "numeric_first_echo_efficiency": echo.echoes.first().map(|e| e.efficiency),
            "numeric_transmitted_fraction": echo.transmitted_fraction,
            "ideal_ceiling_efficiency": ceiling,
        }),
    )?;
    Ok(vec![comb_csv, report])
}

fn cmd_store(cfg: &RunConfig, dir: &Path, seed: u64) -> Result<Vec<PathBuf>, CoreError> {
    let bundle = run_sequence(&cfg.experiment, seed)?;
    let report = dir.join("store.json");
    write_json(
        &report,
        &serde_json::json!({
            "channel": bundle.channel,
            "echo": bundle.echo,
            "pulses": bundle.pulses,
        }),
    )?;
    Ok(vec![report])
}

fn cmd_g2(cfg: &RunConfig, dir: &Path, seed: u64) -> Result<Vec<PathBuf>, CoreError> {
    let bundle = run_sequence(&cfg.experiment, seed)?;
    let mut files = Vec::new();
    if let Some(h) = &bundle.histogram {
        let path = dir.join("histogram.csv");
        use std::io::Write;
        let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
        writeln!(f, "delay_ns,counts")?;
        for (i, &c) in h.counts.iter().enumerate() {
            writeln!(f, "{},{}", h.bin_center_ns(i), c)?;
        }
        files.push(path);
    }
    let report = dir.join("g2.json");
    write_json(
        &report,
        &serde_json::json!({
            "channel": bundle.channel,
            "pulses": bundle.pulses,
            "g2_transmitted": bundle.g2_transmitted,
            "g2_echo": bundle.g2_echo,
            "nonclassical_echo": bundle.g2_echo.as_ref().map(|e| e.nonclassical()),
        }),
    )?;
    files.push(report);
    Ok(files)
}

fn write_manifest(
    cfg: &RunConfig,
    subcommand: &str,
    dir: &Path,
    files: &[PathBuf],
) -> Result<(), CoreError> {
    let canonical = serde_json::to_string(&cfg.experiment)?;
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    hasher.update(cfg.seed.to_le_bytes());
    let digest = hasher.finalize();
    let hash: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    let names: Vec<String> = files
        .iter()
        .map(|f| f.file_name().unwrap_or_default().to_string_lossy().into_owned())
        .collect();
    write_json(
        &dir.join("manifest.json"),
        &serde_json::json!({
            "subcommand": subcommand,
            "seed": cfg.seed,
            "config_sha256": hash,
            "version": env!("CARGO_PKG_VERSION"),
            "files": names,
        }),
    )?;
    Ok(())
}
