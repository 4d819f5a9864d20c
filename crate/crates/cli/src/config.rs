//! JSON run configuration and its merge with command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use holoq_core::holonomy::SchemeKind;
use holoq_core::model::{PulseShape, DEFAULT_SIGMA_FRACTION};
use holoq_core::{BlochAxis, IntegratorConfig, PulseEnvelope};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeConfig {
    /// square, gaussian, sin2 or sampled.
    pub shape: String,
    pub duration: Option<f64>,
    pub sigma_fraction: Option<f64>,
    /// Inline samples for `sampled`.
    pub samples: Option<Vec<(f64, f64)>>,
    /// Sample file for `sampled`, relative to the config file.
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSettings {
    pub steps: Option<usize>,
    pub tolerance: Option<f64>,
    pub max_refinements: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub variable: String,
    pub values: Vec<f64>,
}

/// Contents of a `--config` file. Every field is optional; flags win.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scheme: Option<String>,
    pub axis: Option<AxisConfig>,
    /// Second axis of the two-loop scheme.
    pub axis2: Option<AxisConfig>,
    pub angle: Option<f64>,
    pub eta: Option<f64>,
    pub ratio: Option<f64>,
    pub areas: Option<Vec<f64>>,
    pub envelope: Option<EnvelopeConfig>,
    pub integrator: Option<IntegratorSettings>,
    pub strict: Option<bool>,
    pub tolerance: Option<f64>,
    pub sweep: Option<SweepConfig>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::Invalid(format!("cannot read config {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Invalid(format!("bad config {}: {e}", path.display())))
    }
}

/// `x`, `y`, `z` or `theta,phi` in radians.
pub fn parse_axis(s: &str) -> Result<BlochAxis, CliError> {
    match s.trim() {
        "x" => Ok(BlochAxis::x()),
        "y" => Ok(BlochAxis::y()),
        "z" => Ok(BlochAxis::z()),
        other => {
            let parts: Vec<&str> = other.split(',').map(str::trim).collect();
            let [theta, phi] = parts[..] else {
                return Err(CliError::Invalid(format!(
                    "axis `{other}`: expected x, y, z or theta,phi"
                )));
            };
            let theta = parse_f64(theta, "theta")?;
            let phi = parse_f64(phi, "phi")?;
            Ok(BlochAxis::new(theta, phi)?)
        }
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64, CliError> {
    s.parse::<f64>()
        .map_err(|_| CliError::Invalid(format!("{what} `{s}` is not a number")))
}

/// Comma-separated list of numbers; the empty string is the empty list.
pub fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| parse_f64(p, "list entry"))
        .collect()
}

/// Reads `t,value` rows. A non-numeric first row is taken as a header.
pub fn read_samples(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Invalid(format!("cannot read samples {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        if record.len() != 2 {
            return Err(CliError::Invalid(format!(
                "{}: expected two columns, found {}",
                path.display(),
                record.len()
            )));
        }
        let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
        match parsed {
            (Ok(t), Ok(v)) => out.push((t, v)),
            _ if index == 0 => continue,
            _ => {
                return Err(CliError::Invalid(format!(
                    "{}: row {} is not numeric",
                    path.display(),
                    index + 1
                )))
            }
        }
    }
    Ok(out)
}

/// Everything a command needs after flags and config are merged.
#[derive(Debug, Clone, PartialEq)]
pub struct Request {
    pub scheme: Option<SchemeKind>,
    pub axis: Option<BlochAxis>,
    pub axis2: Option<BlochAxis>,
    pub angle: Option<f64>,
    pub eta: Option<f64>,
    pub ratio: Option<f64>,
    pub areas: Option<Vec<f64>>,
    pub envelope: PulseEnvelope,
    pub integrator: IntegratorConfig,
    pub strict: bool,
    pub tolerance: f64,
    pub sweep: Option<SweepConfig>,
}

/// Flag values; `None` means not given on the command line.
#[derive(Debug, Clone, Default)]
pub struct FlagValues {
    pub axis: Option<String>,
    pub axis2: Option<String>,
    pub angle: Option<f64>,
    pub eta: Option<f64>,
    pub ratio: Option<f64>,
    pub scheme: Option<String>,
    pub shape: Option<String>,
    pub duration: Option<f64>,
    pub areas: Option<String>,
    pub steps: Option<usize>,
    pub tol: Option<f64>,
    /// `HOLOQ_TOL`; replaces the built-in default only.
    pub tol_env: Option<f64>,
    pub strict: bool,
    pub variable: Option<String>,
    pub values: Option<String>,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
const DEFAULT_DURATION: f64 = 1.0;

fn envelope_from_shape(
    shape: &str,
    duration: Option<f64>,
    sigma_fraction: Option<f64>,
    inline: Option<Vec<(f64, f64)>>,
    base_dir: Option<&Path>,
) -> Result<PulseEnvelope, CliError> {
    let tau = duration.unwrap_or(DEFAULT_DURATION);
    let env = match shape {
        "square" => PulseEnvelope::square(1.0, tau)?,
        "gaussian" => PulseEnvelope::new(
            PulseShape::Gaussian {
                sigma_fraction: sigma_fraction.unwrap_or(DEFAULT_SIGMA_FRACTION),
            },
            tau,
            1.0,
        )?,
        "sin2" => PulseEnvelope::sin2(1.0, tau)?,
        "sampled" => {
            let samples = inline.ok_or_else(|| {
                CliError::Invalid("sampled envelope needs samples or a file".into())
            })?;
            let env = PulseEnvelope::sampled(samples, 1.0)?;
            match duration {
                Some(d) => env.with_duration(d)?,
                None => env,
            }
        }
        other => match other.strip_prefix("sampled:") {
            Some(file) => {
                let path = match base_dir {
                    Some(dir) => dir.join(file),
                    None => PathBuf::from(file),
                };
                return envelope_from_shape(
                    "sampled",
                    duration,
                    sigma_fraction,
                    Some(read_samples(&path)?),
                    None,
                );
            }
            None => {
                return Err(CliError::Invalid(format!(
                    "shape `{other}`: expected square, gaussian, sin2 or sampled:FILE"
                )))
            }
        },
    };
    Ok(env)
}

fn axis_from(config: Option<AxisConfig>) -> Result<Option<BlochAxis>, CliError> {
    config
        .map(|a| BlochAxis::new(a.theta, a.phi).map_err(CliError::from))
        .transpose()
}

/// Flags override the config file, which overrides defaults.
pub fn merge(
    flags: &FlagValues,
    config: Option<RunConfig>,
    config_dir: Option<&Path>,
) -> Result<Request, CliError> {
    let config = config.unwrap_or_default();

    let scheme = match flags.scheme.as_deref().or(config.scheme.as_deref()) {
        Some(name) => Some(name.parse::<SchemeKind>()?),
        None => None,
    };
    let axis = match &flags.axis {
        Some(s) => Some(parse_axis(s)?),
        None => axis_from(config.axis)?,
    };
    let axis2 = match &flags.axis2 {
        Some(s) => Some(parse_axis(s)?),
        None => axis_from(config.axis2)?,
    };
    let areas = match &flags.areas {
        Some(s) => Some(parse_list(s)?),
        None => config.areas.clone(),
    };

    let env_cfg = config.envelope.clone();
    let duration = flags.duration.or(env_cfg.as_ref().and_then(|e| e.duration));
    let envelope = match (&flags.shape, env_cfg) {
        (Some(shape), _) => envelope_from_shape(shape, duration, None, None, None)?,
        (None, Some(e)) => {
            let shape = match (&e.file, e.shape.as_str()) {
                (Some(file), "sampled") => format!("sampled:{}", file.display()),
                _ => e.shape.clone(),
            };
            envelope_from_shape(&shape, duration, e.sigma_fraction, e.samples, config_dir)?
        }
        (None, None) => envelope_from_shape("square", duration, None, None, None)?,
    };

    let settings = config.integrator.unwrap_or_default();
    let mut integrator = IntegratorConfig::default();
    if let Some(steps) = flags.steps.or(settings.steps) {
        integrator.step_count = steps;
    }
    if let Some(t) = settings.tolerance {
        integrator.tolerance = t;
    }
    if let Some(r) = settings.max_refinements {
        integrator.max_refinements = r;
    }
    integrator.validate()?;

    let tolerance = flags
        .tol
        .or(config.tolerance)
        .or(flags.tol_env)
        .unwrap_or(DEFAULT_TOLERANCE);
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(CliError::Invalid(format!(
            "tolerance {tolerance} must be positive"
        )));
    }

    let sweep = match (&flags.variable, &flags.values) {
        (Some(variable), values) => Some(SweepConfig {
            variable: variable.clone(),
            values: match values {
                Some(v) => parse_list(v)?,
                None => config
                    .sweep
                    .as_ref()
                    .map(|s| s.values.clone())
                    .unwrap_or_default(),
            },
        }),
        (None, Some(values)) => {
            let variable = config
                .sweep
                .as_ref()
                .map(|s| s.variable.clone())
                .ok_or_else(|| CliError::Invalid("--values given without --variable".into()))?;
            Some(SweepConfig {
                variable,
                values: parse_list(values)?,
            })
        }
        (None, None) => config.sweep.clone(),
    };

    Ok(Request {
        scheme,
        axis,
        axis2,
        angle: flags.angle.or(config.angle),
        eta: flags.eta.or(config.eta),
        ratio: flags.ratio.or(config.ratio),
        areas,
        envelope,
        integrator,
        strict: flags.strict || config.strict.unwrap_or(false),
        tolerance,
        sweep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_forms() {
        assert_eq!(parse_axis("z").unwrap(), BlochAxis::z());
        let a = parse_axis("1.0, 0.5").unwrap();
        assert_eq!((a.theta, a.phi), (1.0, 0.5));
        assert!(parse_axis("w").is_err());
        assert!(parse_axis("4.0,0").is_err());
    }

    #[test]
    fn list_parsing() {
        assert_eq!(parse_list("").unwrap(), Vec::<f64>::new());
        assert_eq!(parse_list("0, 0.5,1").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_list("a,1").is_err());
    }

    #[test]
    fn flags_override_config() {
        let config: RunConfig = serde_json::from_str(
            r#"{"scheme": "l2", "axis": {"theta": 0.3, "phi": 0.1}, "eta": 0.7,
                "envelope": {"shape": "gaussian", "duration": 2.0},
                "integrator": {"steps": 128}}"#,
        )
        .unwrap();
        let flags = FlagValues {
            eta: Some(1.1),
            ..FlagValues::default()
        };
        let req = merge(&flags, Some(config), None).unwrap();
        assert_eq!(req.scheme, Some(SchemeKind::MultiPulseL2));
        assert_eq!(req.eta, Some(1.1));
        assert_eq!(req.integrator.step_count, 128);
        assert_eq!(req.envelope.duration, 2.0);
        assert!(matches!(req.envelope.shape, PulseShape::Gaussian { .. }));
        assert_eq!(req.tolerance, DEFAULT_TOLERANCE);
    }

    #[test]
    fn unknown_config_fields_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"shceme": "l2"}"#).is_err());
    }

    #[test]
    fn bad_tolerance_rejected() {
        let flags = FlagValues {
            tol: Some(-1.0),
            ..FlagValues::default()
        };
        assert!(matches!(
            merge(&flags, None, None),
            Err(CliError::Invalid(_))
        ));
    }

    #[test]
    fn env_tolerance_ranks_below_config() {
        let flags = FlagValues {
            tol_env: Some(1e-4),
            ..FlagValues::default()
        };
        assert_eq!(merge(&flags, None, None).unwrap().tolerance, 1e-4);
        let config = RunConfig {
            tolerance: Some(1e-6),
            ..RunConfig::default()
        };
        assert_eq!(merge(&flags, Some(config), None).unwrap().tolerance, 1e-6);
    }
}
