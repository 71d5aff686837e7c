//! TOML pipeline configuration. Relative paths resolve against the directory
//! holding the config file; unknown keys are rejected.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use deidkit::faceswap::TrainConfig;
use deidkit::identity::{PairingMode, DEFAULT_MATCH_THRESHOLD};
use deidkit::keypoint::{EvalMode, OksConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frames: Option<FramesSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pose: Option<PoseSection>,
    #[serde(default)]
    pub oks: OksSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<IdentitySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub swap: Option<SwapSection>,
    #[serde(default)]
    pub report: ReportSection,
}

/// Raster frames and the face boxes shared by every transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FramesSection {
    pub dir: PathBuf,
    pub manifest: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseSection {
    /// Pose files of the unmodified frames, used as ground truth.
    pub original: PathBuf,
    /// Method name to pose directory.
    pub methods: BTreeMap<String, PathBuf>,
    #[serde(default)]
    pub select_largest: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    #[default]
    Fraction,
    Ranked,
}

impl From<ModeName> for EvalMode {
    fn from(m: ModeName) -> Self {
        match m {
            ModeName::Fraction => EvalMode::Fraction,
            ModeName::Ranked => EvalMode::Ranked,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OksSection {
    #[serde(default)]
    pub mode: ModeName,
    #[serde(default)]
    pub visibility_threshold: f64,
    #[serde(default = "default_scale_factor")]
    pub scale_factor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappas: Option<Vec<f64>>,
}

fn default_scale_factor() -> f64 {
    0.53
}

impl Default for OksSection {
    fn default() -> Self {
        OksSection {
            mode: ModeName::Fraction,
            visibility_threshold: 0.0,
            scale_factor: default_scale_factor(),
            thresholds: None,
            kappas: None,
        }
    }
}

impl OksSection {
    pub fn to_oks_config(&self) -> CliResult<OksConfig<f64>> {
        let mut cfg = OksConfig {
            visibility_threshold: self.visibility_threshold,
            scale_factor: self.scale_factor,
            ..OksConfig::default()
        };
        if let Some(t) = &self.thresholds {
            cfg.thresholds = t.clone();
        }
        if let Some(k) = &self.kappas {
            cfg.kappas = k
                .as_slice()
                .try_into()
                .map_err(|_| CliError::config(format!("oks.kappas needs 17 values, found {}", k.len())))?;
        }
        cfg.validate().map_err(|e| CliError::config(format!("oks: {e}")))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairingName {
    #[default]
    FramePaired,
    AllPairs,
}

impl From<PairingName> for PairingMode {
    fn from(p: PairingName) -> Self {
        match p {
            PairingName::FramePaired => PairingMode::FramePaired,
            PairingName::AllPairs => PairingMode::AllPairs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitySection {
    pub descriptors: PathBuf,
    /// `swapped_id,original_id` CSV; required for frame-paired distances.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairing: Option<PathBuf>,
    pub target_subset: String,
    #[serde(default = "default_match_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub pairing_mode: PairingName,
}

fn default_match_threshold() -> f64 {
    DEFAULT_MATCH_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwapSection {
    #[serde(default = "default_samples")]
    pub samples_per_identity: usize,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default = "default_momentum")]
    pub momentum: f64,
}

fn default_samples() -> usize {
    256
}
fn default_steps() -> usize {
    TrainConfig::<f64>::default().steps
}
fn default_batch() -> usize {
    TrainConfig::<f64>::default().batch_size
}
fn default_lr() -> f64 {
    TrainConfig::<f64>::default().learning_rate
}
fn default_momentum() -> f64 {
    TrainConfig::<f64>::default().momentum
}

impl Default for SwapSection {
    fn default() -> Self {
        SwapSection {
            samples_per_identity: default_samples(),
            steps: default_steps(),
            batch_size: default_batch(),
            learning_rate: default_lr(),
            momentum: default_momentum(),
        }
    }
}

impl SwapSection {
    pub fn train_config(&self, seed: u64) -> CliResult<TrainConfig<f64>> {
        let cfg = TrainConfig {
            batch_size: self.batch_size,
            learning_rate: self.learning_rate,
            momentum: self.momentum,
            steps: self.steps,
            seed,
        };
        cfg.validate().map_err(|e| CliError::config(format!("swap: {e}")))?;
        if self.samples_per_identity == 0 {
            return Err(CliError::config("swap.samples_per_identity must be at least 1"));
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportSection {
    #[serde(default = "default_formats")]
    pub formats: Vec<ReportFormat>,
    #[serde(default = "default_true")]
    pub plots: bool,
}

fn default_formats() -> Vec<ReportFormat> {
    vec![ReportFormat::Json, ReportFormat::Csv]
}
fn default_true() -> bool {
    true
}

impl Default for ReportSection {
    fn default() -> Self {
        ReportSection {
            formats: default_formats(),
            plots: true,
        }
    }
}

/// A parsed config together with the hash of its source text.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: PipelineConfig,
    pub sha256: String,
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> CliResult<LoadedConfig> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let mut config = Self::from_toml(&text)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.resolve_paths(base);
        Ok(LoadedConfig {
            config,
            sha256: sha256_hex(text.as_bytes()),
        })
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(o) = &mut self.output_dir {
            fix(o);
        }
        if let Some(f) = &mut self.frames {
            fix(&mut f.dir);
            fix(&mut f.manifest);
        }
        if let Some(p) = &mut self.pose {
            fix(&mut p.original);
            p.methods.values_mut().for_each(fix);
        }
        if let Some(i) = &mut self.identity {
            fix(&mut i.descriptors);
            if let Some(p) = &mut i.pairing {
                fix(p);
            }
        }
    }

    pub fn require_frames(&self) -> CliResult<&FramesSection> {
        let f = self
            .frames
            .as_ref()
            .ok_or_else(|| CliError::config("missing [frames] section"))?;
        require_dir(&f.dir, "frames.dir")?;
        require_file(&f.manifest, "frames.manifest")?;
        Ok(f)
    }

    pub fn require_pose(&self) -> CliResult<&PoseSection> {
        let p = self
            .pose
            .as_ref()
            .ok_or_else(|| CliError::config("missing [pose] section"))?;
        require_dir(&p.original, "pose.original")?;
        if p.methods.is_empty() {
            return Err(CliError::config("pose.methods must name at least one method"));
        }
        for (name, dir) in &p.methods {
            require_dir(dir, &format!("pose.methods.{name}"))?;
        }
        self.oks.to_oks_config()?;
        Ok(p)
    }

    pub fn require_identity(&self) -> CliResult<&IdentitySection> {
        let i = self
            .identity
            .as_ref()
            .ok_or_else(|| CliError::config("missing [identity] section"))?;
        require_file(&i.descriptors, "identity.descriptors")?;
        match (&i.pairing, i.pairing_mode) {
            (Some(p), _) => require_file(p, "identity.pairing")?,
            (None, PairingName::FramePaired) => {
                return Err(CliError::config(
                    "identity.pairing is required when pairing_mode is frame-paired",
                ))
            }
            (None, PairingName::AllPairs) => {}
        }
        if !(i.threshold > 0.0 && i.threshold.is_finite()) {
            return Err(CliError::config("identity.threshold must be positive"));
        }
        Ok(i)
    }
}

fn require_dir(p: &Path, key: &str) -> CliResult<()> {
    if p.is_dir() {
        Ok(())
    } else {
        Err(CliError::config(format!("{key}: directory {} not found", p.display())))
    }
}

fn require_file(p: &Path, key: &str) -> CliResult<()> {
    if p.is_file() {
        Ok(())
    } else {
        Err(CliError::config(format!("{key}: file {} not found", p.display())))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
