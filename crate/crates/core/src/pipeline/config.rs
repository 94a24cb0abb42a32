use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relax::{DynamicsParams, ForceParams, Strategy};
use crate::sizing::{BuiltinSurface, ParamDomain, SizingParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Plane,
    Surface,
    Remesh,
    CompareQc,
}

/// Circular hole in the plate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoleConfig {
    pub center: [f64; 2],
    pub radius: f64,
}

/// Refinement around the holes through rings of pre-inserted anchors whose
/// radii grow geometrically from `r_near` to `r_far`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GradedConfig {
    pub r_near: f64,
    pub r_far: f64,
    /// Radius ratio between consecutive rings.
    pub growth: f64,
}

impl Default for GradedConfig {
    fn default() -> Self {
        Self {
            r_near: 0.08,
            r_far: 0.4,
            growth: 1.25,
        }
    }
}

/// Rectangular plate `[0, width] x [0, height]` with circular holes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlateConfig {
    pub width: f64,
    pub height: f64,
    pub holes: Vec<HoleConfig>,
    /// Bubble radius for uniform sizing.
    pub radius: f64,
    /// When set, sizing follows graded anchor rings instead of `radius`.
    pub graded: Option<GradedConfig>,
}

impl Default for PlateConfig {
    fn default() -> Self {
        Self {
            width: 20.0,
            height: 10.0,
            holes: vec![HoleConfig {
                center: [10.0, 5.0],
                radius: 2.0,
            }],
            radius: 0.18,
            graded: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SurfaceConfig {
    pub surface: BuiltinSurface<f64>,
    pub epsilon: f64,
    pub r_min: f64,
    pub r_max: f64,
}

impl Default for SurfaceConfig {
    fn default() -> Self {
        Self {
            surface: BuiltinSurface::sphere(1.0, ParamDomain::new(-0.9, 0.9, -0.9, 0.9)),
            epsilon: 0.0002,
            r_min: 0.01,
            r_max: 0.5,
        }
    }
}

impl SurfaceConfig {
    pub fn sizing(&self) -> Result<SizingParams<f64>> {
        SizingParams::new(self.epsilon, self.r_min, self.r_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum QcKind {
    #[default]
    New,
    Original,
    None,
}

/// Quantity-control settings for both strategies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QcConfig {
    pub strategy: QcKind,
    /// Pairwise overlap limit of the boundary-region strategy.
    pub threshold: f64,
    /// Summed-overlap insertion limit of the original strategy.
    pub low: f64,
    /// Summed-overlap deletion limit of the original strategy.
    pub high: f64,
    /// Sweeps between passes of the original strategy.
    pub period: usize,
}

impl Default for QcConfig {
    fn default() -> Self {
        Self {
            strategy: QcKind::New,
            threshold: 1.0,
            low: 5.0,
            high: 8.0,
            period: 5,
        }
    }
}

impl QcConfig {
    pub fn new_strategy(&self) -> Strategy<f64> {
        Strategy::NewQc {
            threshold: self.threshold,
        }
    }

    pub fn original_strategy(&self) -> Strategy<f64> {
        Strategy::OriginalQc {
            low: self.low,
            high: self.high,
            period: self.period,
        }
    }

    pub fn strategy(&self) -> Strategy<f64> {
        match self.strategy {
            QcKind::New => self.new_strategy(),
            QcKind::Original => self.original_strategy(),
            QcKind::None => Strategy::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CompareCase {
    #[default]
    Plate,
    Surface,
}

/// Complete run configuration. Every field has a default, so an empty file
/// is valid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub mode: Mode,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Write wall-clock times into traces and summaries. Turn off for
    /// byte-identical reruns.
    pub record_time: bool,
    pub plate: PlateConfig,
    pub surface: SurfaceConfig,
    /// Optional CSV of pre-inserted anchors (`x, y, radius`).
    pub anchors_file: Option<PathBuf>,
    /// Input mesh for the remesh mode (OBJ or OFF).
    pub input_mesh: Option<PathBuf>,
    pub qc: QcConfig,
    pub dynamics: DynamicsParams<f64>,
    pub force: ForceParams<f64>,
    /// Which case the compare-qc mode runs on.
    pub compare_case: CompareCase,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Plane,
            seed: 0,
            output_dir: PathBuf::from("out"),
            record_time: true,
            plate: PlateConfig::default(),
            surface: SurfaceConfig::default(),
            anchors_file: None,
            input_mesh: None,
            qc: QcConfig::default(),
            dynamics: DynamicsParams::default(),
            force: ForceParams::default(),
            compare_case: CompareCase::Plate,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        // relative file references are resolved against the config location
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.anchors_file, &mut cfg.input_mesh].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Dynamics with the trace timing switch applied.
    pub fn dynamics(&self) -> DynamicsParams<f64> {
        DynamicsParams {
            record_time: self.record_time,
            ..self.dynamics
        }
    }

    /// Force law seeded from the run seed.
    pub fn force(&self) -> ForceParams<f64> {
        ForceParams {
            seed: self.seed,
            ..self.force
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.dynamics.validate()?;
        self.force.validate()?;
        let p = &self.plate;
        if !(p.width > 0.0 && p.height > 0.0 && p.radius > 0.0) {
            return Err(Error::Config("plate width, height and radius must be positive".into()));
        }
        for h in &p.holes {
            let [x, y] = h.center;
            if !(h.radius > 0.0
                && x - h.radius > 0.0
                && y - h.radius > 0.0
                && x + h.radius < p.width
                && y + h.radius < p.height)
            {
                return Err(Error::Config(format!("hole at ({x}, {y}) does not fit in the plate")));
            }
        }
        if let Some(g) = &p.graded {
            if !(g.r_near > 0.0 && g.r_near <= g.r_far && g.growth > 1.0) {
                return Err(Error::Config(
                    "graded sizing needs 0 < r_near <= r_far and growth > 1".into(),
                ));
            }
        }
        self.surface.sizing()?;
        if !(self.qc.low < self.qc.high) {
            return Err(Error::Config("qc.low must be below qc.high".into()));
        }
        for f in [&self.anchors_file, &self.input_mesh].into_iter().flatten() {
            if !f.exists() {
                return Err(Error::Config(format!("file not found: {}", f.display())));
            }
        }
        Ok(())
    }
}
