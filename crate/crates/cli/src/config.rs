//! Run configuration: defaults, then a flat key=value config file, then
//! command-line flags, merged in that order.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use coilphase::{GammaConvention, Handedness, HelicitySign, SpinJ};

use crate::RunArgs;

const VALID_KEYS: &[&str] = &[
    "theta",
    "gamma",
    "pitch",
    "radius",
    "index",
    "handedness",
    "sigma",
    "spin",
    "periods",
    "steps_per_period",
    "path_file",
    "gamma_convention",
    "out",
    "k_mag",
    "duration_seconds",
    "record_every",
    "tol_norm_drift",
    "tol_helicity",
    "seed",
];

/// Where the wave vector path comes from.
#[derive(Clone, Debug)]
pub enum PathSource {
    HelixAngles {
        theta: f64,
        gamma: f64,
    },
    HelixPhysical {
        pitch: f64,
        radius: f64,
        index: f64,
        handedness: Handedness,
        theta_override: Option<f64>,
    },
    File(PathBuf),
    /// Commands with a built-in sweep take no source.
    None,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub spin: SpinJ,
    pub sigma: HelicitySign,
    pub source: PathSource,
    pub gamma_convention: GammaConvention,
    pub periods: f64,
    pub duration_seconds: Option<f64>,
    pub steps_per_period: usize,
    pub record_every: usize,
    pub k_mag: f64,
    pub out: PathBuf,
    pub tol_norm_drift: f64,
    pub tol_helicity: f64,
    pub seed: u64,
}

/// Angles are radians by default; a `deg` suffix converts.
pub fn parse_angle(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Some(deg) = s.strip_suffix("deg") {
        let v: f64 = deg
            .trim()
            .parse()
            .with_context(|| format!("bad angle '{s}'"))?;
        Ok(v.to_radians())
    } else {
        s.parse().with_context(|| format!("bad angle '{s}'"))
    }
}

fn parse_key<T, F>(map: &BTreeMap<String, String>, key: &str, parse: F) -> Result<Option<T>>
where
    F: FnOnce(&str) -> Result<T>,
{
    match map.get(key) {
        Some(v) => Ok(Some(
            parse(v).with_context(|| format!("config key '{key}'"))?,
        )),
        None => Ok(None),
    }
}

fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}:{}: expected key = value", path.display(), lineno + 1))?;
        let key = key.trim().to_string();
        if !VALID_KEYS.contains(&key.as_str()) {
            bail!(
                "{}:{}: unknown key '{key}' (valid keys: {})",
                path.display(),
                lineno + 1,
                VALID_KEYS.join(", ")
            );
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

/// Fold the file settings and the flag overrides into one key-value map,
/// flags winning.
fn merged_settings(args: &RunArgs) -> Result<BTreeMap<String, String>> {
    let mut map = match &args.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    let mut set = |key: &str, value: Option<String>| {
        if let Some(v) = value {
            map.insert(key.to_string(), v);
        }
    };
    set("theta", args.theta.clone());
    set("gamma", args.gamma.map(|v| v.to_string()));
    set("pitch", args.pitch.map(|v| v.to_string()));
    set("radius", args.radius.map(|v| v.to_string()));
    set("index", args.index.map(|v| v.to_string()));
    set("handedness", args.handedness.map(|v| v.to_string()));
    set("sigma", args.sigma.clone());
    set("spin", args.spin.clone());
    set("periods", args.periods.map(|v| v.to_string()));
    set(
        "steps_per_period",
        args.steps_per_period.map(|v| v.to_string()),
    );
    set(
        "path_file",
        args.path_file
            .as_ref()
            .map(|p| p.to_string_lossy().into_owned()),
    );
    set("gamma_convention", args.gamma_convention.clone());
    set(
        "out",
        args.out.as_ref().map(|p| p.to_string_lossy().into_owned()),
    );
    Ok(map)
}

impl RunConfig {
    pub fn from_args(args: &RunArgs, needs_source: bool) -> Result<Self> {
        let map = merged_settings(args)?;

        let theta = parse_key(&map, "theta", parse_angle)?;
        let gamma = parse_key(&map, "gamma", |s| Ok(s.parse::<f64>()?))?;
        let pitch = parse_key(&map, "pitch", |s| Ok(s.parse::<f64>()?))?;
        let radius = parse_key(&map, "radius", |s| Ok(s.parse::<f64>()?))?;
        let index = parse_key(&map, "index", |s| Ok(s.parse::<f64>()?))?;
        let handedness = parse_key(&map, "handedness", |s| {
            Ok(Handedness::try_from_int(s.parse::<i32>()?)?)
        })?
        .unwrap_or(Handedness::Right);
        let sigma = parse_key(&map, "sigma", |s| {
            let cleaned = s.trim_start_matches('+');
            Ok(HelicitySign::try_from_int(cleaned.parse::<i32>()?)?)
        })?
        .unwrap_or(HelicitySign::Plus);
        let spin = parse_key(&map, "spin", |s| Ok(s.parse::<SpinJ>()?))?.unwrap_or(SpinJ::One);
        let periods = parse_key(&map, "periods", |s| Ok(s.parse::<f64>()?))?.unwrap_or(1.0);
        let steps_per_period =
            parse_key(&map, "steps_per_period", |s| Ok(s.parse::<usize>()?))?.unwrap_or(6283);
        let path_file = parse_key(&map, "path_file", |s| Ok(PathBuf::from(s)))?;
        let gamma_convention = parse_key(&map, "gamma_convention", |s| {
            Ok(s.parse::<GammaConvention>()?)
        })?
        .unwrap_or(GammaConvention::Paper);
        let out = parse_key(&map, "out", |s| Ok(PathBuf::from(s)))?
            .unwrap_or_else(|| PathBuf::from("out"));
        let k_mag = parse_key(&map, "k_mag", |s| Ok(s.parse::<f64>()?))?.unwrap_or(1.0);
        let duration_seconds = parse_key(&map, "duration_seconds", |s| Ok(s.parse::<f64>()?))?;
        let record_every = parse_key(&map, "record_every", |s| Ok(s.parse::<usize>()?))?.unwrap_or(1);
        let tol_norm_drift = parse_key(&map, "tol_norm_drift", |s| Ok(s.parse::<f64>()?))?
            .unwrap_or(coilphase::tol::NORM_DRIFT);
        let tol_helicity = parse_key(&map, "tol_helicity", |s| Ok(s.parse::<f64>()?))?
            .unwrap_or(coilphase::tol::HELICITY_DRIFT);
        let seed = parse_key(&map, "seed", |s| Ok(s.parse::<u64>()?))?.unwrap_or(0x0f1b_e770);

        if periods <= 0.0 || !periods.is_finite() {
            bail!("periods must be positive, got {periods}");
        }
        if steps_per_period < 100 {
            bail!("steps_per_period must be at least 100, got {steps_per_period}");
        }
        if record_every == 0 {
            bail!("record_every must be at least 1");
        }
        if k_mag <= 0.0 || !k_mag.is_finite() {
            bail!("k_mag must be positive, got {k_mag}");
        }

        // exactly one path source
        let angles_given = theta.is_some() && gamma.is_some();
        let physical_given = pitch.is_some() || radius.is_some() || index.is_some();
        let file_given = path_file.is_some();
        let source = if needs_source {
            match (angles_given, physical_given, file_given) {
                (true, false, false) => PathSource::HelixAngles {
                    theta: theta.unwrap(),
                    gamma: gamma.unwrap(),
                },
                (_, true, false) => {
                    if gamma.is_some() {
                        bail!("--gamma conflicts with physical helix parameters");
                    }
                    let (Some(pitch), Some(radius), Some(index)) = (pitch, radius, index) else {
                        bail!("physical helix needs all of --pitch, --radius, --index");
                    };
                    PathSource::HelixPhysical {
                        pitch,
                        radius,
                        index,
                        handedness,
                        theta_override: theta,
                    }
                }
                (false, false, true) => PathSource::File(path_file.unwrap()),
                (false, false, false) => bail!(
                    "no path source: give --theta with --gamma, or --pitch/--radius/--index, or --path-file"
                ),
                _ => bail!("more than one path source given; pick one"),
            }
        } else {
            PathSource::None
        };

        Ok(Self {
            spin,
            sigma,
            source,
            gamma_convention,
            periods,
            duration_seconds,
            steps_per_period,
            record_every,
            k_mag,
            out,
            tol_norm_drift,
            tol_helicity,
            seed,
        })
    }
}
