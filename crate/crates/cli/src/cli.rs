//! Command-line interface and the orchestration behind each subcommand.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bundle::{write_bundle, SynthOptions};
use crate::config::{LoadedConfig, ModeName, PipelineConfig, ReportFormat, SwapSection};
use crate::deid::{load_model, run_deid, run_swap_apply, run_swap_train, DeidMethod, StageLogs};
use crate::error::{CliError, CliResult};
use crate::eval::{run_identity_eval, run_keypoint_eval};
use crate::plots::emit_plots;
use crate::report::{Provenance, Report};

#[derive(Debug, Parser)]
#[command(name = "deidkit", version, about = "Face de-identification pipeline and invariance reports")]
pub struct Cli {
    /// Pipeline configuration (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output_dir` from the config.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed for generators and training; overrides the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// AP/AR computation mode.
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeName>,
    /// Resolve multi-person pose files by the largest keypoint box.
    #[arg(long, global = true)]
    pub select_largest: bool,
    /// Report formats to write (repeatable); defaults to the config.
    #[arg(long, global = true, value_enum)]
    pub format: Vec<ReportFormat>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Black out the face box of every frame.
    DeidMask,
    /// Box-blur the face box of every frame.
    DeidBlur,
    /// Train the toy swap model on synthetic identities.
    SwapTrain,
    /// Swap the face box of every frame with a trained model.
    SwapApply {
        #[arg(long, value_name = "PATH")]
        checkpoint: PathBuf,
    },
    /// Keypoint invariance (OKS, AP/AR) of each method against the originals.
    EvalKeypoints,
    /// Descriptor distance table and ROC for swapped subsets.
    EvalIdentity,
    /// Write a synthetic dataset with a ready-to-run config.
    Synth {
        #[arg(long, default_value_t = SynthOptions::default().pose_frames)]
        pose_frames: usize,
        #[arg(long, default_value_t = SynthOptions::default().raster_frames)]
        raster_frames: usize,
        #[arg(long, default_value_t = SynthOptions::default().descriptors_per_subset)]
        descriptors_per_subset: usize,
    },
    /// Every configured evaluation, written as report and plots.
    Report,
    /// De-identify frames, evaluate, and write report and plots.
    RunAll,
}

struct Context {
    config: PipelineConfig,
    provenance: Provenance,
    out: PathBuf,
    formats: Vec<ReportFormat>,
}

impl Context {
    fn new(cli: &Cli) -> CliResult<Self> {
        let (mut config, hash) = match &cli.config {
            Some(path) => {
                let LoadedConfig { config, sha256 } = PipelineConfig::load(path)?;
                (config, Some(sha256))
            }
            None => (PipelineConfig::default(), None),
        };
        if let Some(seed) = cli.seed {
            config.seed = Some(seed);
        }
        if let Some(mode) = cli.mode {
            config.oks.mode = mode;
        }
        if cli.select_largest {
            if let Some(p) = &mut config.pose {
                p.select_largest = true;
            }
        }
        let out = cli
            .out
            .clone()
            .or_else(|| config.output_dir.clone())
            .ok_or_else(|| CliError::config("no output directory: pass --out or set output_dir"))?;
        let formats = if cli.format.is_empty() {
            config.report.formats.clone()
        } else {
            cli.format.clone()
        };
        Ok(Context {
            provenance: Provenance {
                config_sha256: hash,
                seed: config.seed,
            },
            config,
            out,
            formats,
        })
    }

    fn seed(&self) -> u64 {
        self.config.seed.unwrap_or(0)
    }

    fn report(&self) -> Report {
        Report {
            provenance: self.provenance.clone(),
            ..Report::default()
        }
    }

    fn finish(&self, report: &Report) -> CliResult<()> {
        report.emit(&self.out, &self.formats)?;
        if self.config.report.plots {
            emit_plots(report, &self.out)?;
        }
        println!("report written to {}", self.out.display());
        Ok(())
    }
}

fn print_stage(log: &crate::deid::StageLog) {
    println!(
        "{}: {} of {} frames processed, {} skipped",
        log.method.name(),
        log.processed,
        log.input_frames,
        log.skipped.len()
    );
}

fn require_file(path: &Path, what: &str) -> CliResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::config(format!("{what} {} not found", path.display())))
    }
}

pub fn run(cli: &Cli) -> CliResult<()> {
    if let Command::Synth {
        pose_frames,
        raster_frames,
        descriptors_per_subset,
    } = &cli.command
    {
        let out = cli
            .out
            .clone()
            .ok_or_else(|| CliError::config("synth needs --out"))?;
        let opts = SynthOptions {
            seed: cli.seed.unwrap_or(0),
            pose_frames: *pose_frames,
            raster_frames: *raster_frames,
            descriptors_per_subset: *descriptors_per_subset,
            ..SynthOptions::default()
        };
        let config = write_bundle(&opts, &out)?;
        println!("synthetic dataset written; run `deidkit run-all --config {}`", config.display());
        return Ok(());
    }

    let ctx = Context::new(cli)?;
    let cfg = &ctx.config;
    match &cli.command {
        Command::Synth { .. } => unreachable!("handled above"),
        Command::DeidMask | Command::DeidBlur => {
            let frames = cfg.require_frames()?;
            let method = if matches!(cli.command, Command::DeidMask) {
                DeidMethod::Mask
            } else {
                DeidMethod::Blur
            };
            print_stage(&run_deid(frames, method, &ctx.out)?);
        }
        Command::SwapTrain => {
            let section = cfg.swap.clone().unwrap_or_default();
            section.train_config(ctx.seed())?;
            let (_, summary) = run_swap_train(&section, ctx.seed(), &ctx.out)?;
            println!(
                "swap model trained: loss {} -> {} over {} steps",
                summary.initial_loss, summary.final_loss, summary.steps
            );
        }
        Command::SwapApply { checkpoint } => {
            let frames = cfg.require_frames()?;
            require_file(checkpoint, "checkpoint")?;
            let model = load_model(checkpoint)?;
            print_stage(&run_swap_apply(frames, &model, &ctx.out)?);
        }
        Command::EvalKeypoints => {
            let pose = cfg.require_pose()?;
            let oks = cfg.oks.to_oks_config()?;
            let mut report = ctx.report();
            report.keypoints = Some(run_keypoint_eval(pose, &oks, cfg.oks.mode.into())?);
            ctx.finish(&report)?;
        }
        Command::EvalIdentity => {
            let identity = cfg.require_identity()?;
            let mut report = ctx.report();
            report.identity = Some(run_identity_eval(identity)?);
            ctx.finish(&report)?;
        }
        Command::Report | Command::RunAll => {
            let run_all = matches!(cli.command, Command::RunAll);
            let frames = match (&cfg.frames, run_all) {
                (Some(_), true) => Some(cfg.require_frames()?),
                _ => None,
            };
            let swap: Option<&SwapSection> = if run_all { cfg.swap.as_ref() } else { None };
            if let Some(s) = swap {
                s.train_config(ctx.seed())?;
            }
            let pose = cfg.pose.as_ref().map(|_| cfg.require_pose()).transpose()?;
            let identity = cfg.identity.as_ref().map(|_| cfg.require_identity()).transpose()?;
            if pose.is_none() && identity.is_none() && frames.is_none() {
                return Err(CliError::config("nothing to do: configure [pose], [identity] or [frames]"));
            }
            let oks = cfg.oks.to_oks_config()?;

            let mut report = ctx.report();
            let mut stages = StageLogs::new();
            if let Some(frames) = frames {
                for method in [DeidMethod::Mask, DeidMethod::Blur] {
                    let log = run_deid(frames, method, &ctx.out)?;
                    print_stage(&log);
                    stages.insert(method, log);
                }
            }
            if let Some(section) = swap {
                let (model, summary) = run_swap_train(section, ctx.seed(), &ctx.out)?;
                report.swap_training = Some(summary);
                if let Some(frames) = frames {
                    let log = run_swap_apply(frames, &model, &ctx.out)?;
                    print_stage(&log);
                    stages.insert(DeidMethod::Swap, log);
                }
            }
            report.stages = stages;
            if let Some(pose) = pose {
                report.keypoints = Some(run_keypoint_eval(pose, &oks, cfg.oks.mode.into())?);
            }
            if let Some(identity) = identity {
                report.identity = Some(run_identity_eval(identity)?);
            }
            ctx.finish(&report)?;
        }
    }
    Ok(())
}
