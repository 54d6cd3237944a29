//! JSON trajectory configuration.
//!
//! ```json
//! { "kind": "circular", "radius": 1.0, "omega": 0.5 }
//! { "kind": "piecewise-cubic", "t": [0, 1], "position": [[0,0,0],[0.1,0,0]],
//!   "velocity": [[0,0,0],[0.2,0,0]] }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};


use super::{Circular, Oscillation, PiecewiseCubic, Trajectory};
use crate::{Error, Result, Vec3};

fn unit_z() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaticConfig {
    #[serde(default)]
    pub position: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformConfig {
    /// Position at `t = 0`.
    #[serde(default)]
    pub position: [f64; 3],
    pub velocity: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircularConfig {
    #[serde(default)]
    pub center: [f64; 3],
    pub radius: f64,
    pub omega: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub phase: f64,
    #[serde(default = "unit_z")]
    pub normal: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillationConfig {
    #[serde(default)]
    pub center: [f64; 3],
    pub amplitude: [f64; 3],
    pub omega: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplineConfig {
    pub t: Vec<f64>,
    pub position: Vec<[f64; 3]>,
    pub velocity: Vec<[f64; 3]>,
    /// Free-form provenance, e.g. boost parameters and interpolation error.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

/// Parsed trajectory config; the `kind` tag selects the variant.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TrajectoryConfig {
    Static(StaticConfig),
    Uniform(UniformConfig),
    Circular(CircularConfig),
    LinearOscillation(OscillationConfig),
    PiecewiseCubic(SplineConfig),
}

const KINDS: &[&str] = &["static", "uniform", "circular", "linear-oscillation", "piecewise-cubic"];

fn config_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

fn variant<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        config_error(path, e.into_inner().to_string())
    })
}

impl TrajectoryConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| config_error(".", e.to_string()))?;
        let serde_json::Value::Object(mut map) = value else {
            return Err(config_error(".", "expected a JSON object"));
        };
        let kind = match map.remove("kind") {
            Some(serde_json::Value::String(k)) => k,
            Some(_) => return Err(config_error("kind", "expected a string")),
            None => return Err(config_error("kind", "missing field `kind`")),
        };
        let rest = serde_json::Value::Object(map);
        Ok(match kind.as_str() {
            "static" => TrajectoryConfig::Static(variant(rest)?),
            "uniform" => TrajectoryConfig::Uniform(variant(rest)?),
            "circular" => TrajectoryConfig::Circular(variant(rest)?),
            "linear-oscillation" => TrajectoryConfig::LinearOscillation(variant(rest)?),
            "piecewise-cubic" => TrajectoryConfig::PiecewiseCubic(variant(rest)?),
            other => {
                return Err(config_error(
                    "kind",
                    format!("unknown kind `{other}`, expected one of {}", KINDS.join(", ")),
                ))
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(Some(path.to_path_buf()), e))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("trajectory config serializes")
    }

    pub fn build(&self) -> Result<Trajectory> {
        let v = |a: &[f64; 3]| Vec3::from(*a);
        Ok(match self {
            TrajectoryConfig::Static(StaticConfig { position }) => Trajectory::stationary(v(position)),
            TrajectoryConfig::Uniform(UniformConfig { position, velocity }) => {
                super::check_finite_vec("velocity", &v(velocity))?;
                Trajectory::uniform(v(position), v(velocity))
            }
            TrajectoryConfig::Circular(CircularConfig {
                center,
                radius,
                omega,
                phase,
                normal,
            }) => Trajectory::Circular(
                Circular::new(v(center), *radius, *omega, *phase, v(normal)).map_err(at_field)?,
            ),
            TrajectoryConfig::LinearOscillation(OscillationConfig {
                center,
                amplitude,
                omega,
                phase,
            }) => Trajectory::LinearOscillation(
                Oscillation::new(v(center), v(amplitude), *omega, *phase).map_err(at_field)?,
            ),
            TrajectoryConfig::PiecewiseCubic(SplineConfig {
                t,
                position,
                velocity,
                ..
            }) => Trajectory::PiecewiseCubic(PiecewiseCubic::new(
                t.clone(),
                position.iter().map(v).collect(),
                velocity.iter().map(v).collect(),
            )?),
        })
    }
}

fn at_field(e: Error) -> Error {
    match e {
        Error::InvalidArgument { name, message } => Error::InvalidTrajectory {
            path: name.to_string(),
            message,
        },
        other => other,
    }
}

impl Trajectory {
    pub fn from_json(text: &str) -> Result<Self> {
        TrajectoryConfig::from_json_str(text)?.build()
    }

    pub fn load(path: &Path) -> Result<Self> {
        TrajectoryConfig::load(path)?.build()
    }

    pub fn to_config(&self) -> TrajectoryConfig {
        let a = |v: &Vec3| [v.x, v.y, v.z];
        match self {
            Trajectory::Static { position } => TrajectoryConfig::Static(StaticConfig { position: a(position) }),
            Trajectory::Uniform { position, velocity } => TrajectoryConfig::Uniform(UniformConfig {
                position: a(position),
                velocity: a(velocity),
            }),
            Trajectory::Circular(c) => TrajectoryConfig::Circular(CircularConfig {
                center: a(&c.center),
                radius: c.radius,
                omega: c.omega,
                phase: c.phase,
                normal: a(&c.normal),
            }),
            Trajectory::LinearOscillation(o) => TrajectoryConfig::LinearOscillation(OscillationConfig {
                center: a(&o.center),
                amplitude: a(&o.amplitude),
                omega: o.omega,
                phase: o.phase,
            }),
            Trajectory::PiecewiseCubic(s) => TrajectoryConfig::PiecewiseCubic(SplineConfig {
                t: s.knots().to_vec(),
                position: s.positions().iter().map(a).collect(),
                velocity: s.velocities().iter().map(a).collect(),
                metadata: None,
            }),
        }
    }
}
