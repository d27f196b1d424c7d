use std::path::{Path, PathBuf};

use clap::Args;
use hermite_obs_core::gram::{PrecisionPolicy, MAX_PRECISION_BITS};
use hermite_obs_core::scalar::DEFAULT_PRECISION_BITS;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

pub const PRECISION_ENV: &str = "HERMITE_OBS_PRECISION_BITS";

/// Options shared by every subcommand. All of them may also come from a JSON
/// config file; flags win.
#[derive(Args, Clone, Debug, Default)]
pub struct Flags {
    /// JSON config file merged under the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Region shorthand: `periodic:L=1,gamma=0.5`, `halfline`, `full`, `ball:r=1`, …
    #[arg(long)]
    pub region: Option<String>,
    /// Region JSON file `{n, boxes, …}`.
    #[arg(long)]
    pub region_file: Option<PathBuf>,
    /// Truncation radius for unbounded regions (default `2·c_n√(N+1)`).
    #[arg(long)]
    pub radius: Option<f64>,
    /// Symbol: `harmonic`, `laplacian`, `kfp:a=1`.
    #[arg(long)]
    pub symbol: Option<String>,
    /// Symbol JSON file `{n, Q_re, Q_im}`.
    #[arg(long)]
    pub symbol_file: Option<PathBuf>,
    /// Space dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Cutoff, list `9,16,25` or range `4:64:4`.
    #[arg(long = "N")]
    pub cutoff: Option<String>,
    /// Horizon or list of horizons.
    #[arg(long = "T")]
    pub horizon: Option<String>,
    /// First software-float width (also `HERMITE_OBS_PRECISION_BITS`).
    #[arg(long)]
    pub precision_bits: Option<u32>,
    #[arg(long)]
    pub max_bits: Option<u32>,
    /// Skip the double-precision attempt.
    #[arg(long)]
    pub force_extended: bool,
    /// Use exactly `precision_bits` in control computations, no escalation.
    #[arg(long)]
    pub fixed_precision: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for JSON, CSV and summary files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Create the output directory when missing.
    #[arg(long)]
    pub mkdirs: bool,
    /// Also write `(x, y)` plot series.
    #[arg(long)]
    pub plot_data: bool,
    #[arg(long)]
    pub c_sobolev: Option<f64>,
    #[arg(long)]
    pub c_kov: Option<f64>,
    /// Verification suite name or `all`.
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Control method: `hum` or `staircase`.
    #[arg(long)]
    pub method: Option<String>,
    /// Singular-space index used by blowup fits (default: computed).
    #[arg(long)]
    pub k0: Option<usize>,
    #[arg(long)]
    pub k_base: Option<f64>,
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long)]
    pub max_stages: Option<usize>,
    /// Initial datum: `ground`, `basis:<index>`, `ones` or `random`.
    #[arg(long)]
    pub initial: Option<String>,
    /// Initial datum as an expansion record `{n, N, order, coeffs}`.
    #[arg(long)]
    pub initial_file: Option<PathBuf>,
    /// Include control samples in the JSON report.
    #[arg(long)]
    pub trajectory: bool,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Multi-index such as `1,0`.
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub degree: Option<usize>,
    /// Measure ratio `|E|/|K|`.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Level or list of levels.
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub a: Option<f64>,
    /// Evaluation points, `;`-separated, coordinates `,`-separated.
    #[arg(long)]
    pub points: Option<String>,
    #[arg(long)]
    pub quad_tol: Option<f64>,
}

/// Merged configuration; this is what gets echoed and hashed.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subcommand: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none", deserialize_with = "list_spec")]
    pub cutoff: Option<String>,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none", deserialize_with = "list_spec")]
    pub horizon: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_bits: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_bits: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub force_extended: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_precision: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mkdirs: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot_data: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_sobolev: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_kov: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_base: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_stages: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "list_spec")]
    pub beta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "list_spec")]
    pub k: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_tol: Option<f64>,
}

/// Accepts a number, a string or an array of numbers for list-valued keys.
fn list_spec<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    use serde::de::Error;
    let v = Option::<Value>::deserialize(d)?;
    Ok(match v {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s),
        Some(Value::Number(x)) => Some(x.to_string()),
        Some(Value::Array(items)) => {
            let parts = items
                .iter()
                .map(|x| match x {
                    Value::Number(x) => Ok(x.to_string()),
                    other => Err(D::Error::custom(format!("expected a number in list, found {other}"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Some(parts.join(","))
        }
        Some(other) => return Err(D::Error::custom(format!("expected number, string or list, found {other}"))),
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    if text.trim().is_empty() {
        return Ok(RunConfig::default());
    }
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Overlays `flags` on `file`; each overridden file value produces a warning.
pub fn merge(command: &str, file: RunConfig, flags: &Flags) -> Result<(RunConfig, Vec<String>), CliError> {
    let mut warnings = Vec::new();
    if let Some(sc) = &file.subcommand {
        if sc != command {
            return Err(CliError::Usage(format!("config file is for `{sc}`, not `{command}`")));
        }
    }
    let mut out = file;
    out.subcommand = Some(command.to_string());
    macro_rules! take {
        ($($field:ident),*) => {$(
            if let Some(v) = flags.$field.clone() {
                if let Some(old) = &out.$field {
                    if *old != v {
                        warnings.push(format!(
                            "`{}` from the command line ({:?}) overrides the config file ({:?})",
                            stringify!($field), v, old
                        ));
                    }
                }
                out.$field = Some(v);
            }
        )*};
    }
    take!(
        region, region_file, radius, symbol, symbol_file, n, cutoff, horizon, precision_bits, max_bits, seed, out,
        c_sobolev, c_kov, suite, trials, method, k0, k_base, target, max_stages, initial, initial_file, delta, beta,
        degree, ratio, k, a, points, quad_tol
    );
    macro_rules! switch {
        ($($field:ident),*) => {$(
            if flags.$field {
                out.$field = Some(true);
            }
        )*};
    }
    switch!(force_extended, fixed_precision, mkdirs, plot_data, trajectory);
    Ok((out, warnings))
}

/// `8`, `9,16,25` or `start:stop:step` (inclusive).
pub fn parse_usize_list(spec: &str, what: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("cannot parse {what} `{spec}`"));
    if let Some((a, rest)) = spec.split_once(':') {
        let (b, step) = rest.split_once(':').unwrap_or((rest, "1"));
        let (a, b, step): (usize, usize, usize) = (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
            step.trim().parse().map_err(|_| bad())?,
        );
        if step == 0 || b < a {
            return Err(bad());
        }
        return Ok((a..=b).step_by(step).collect());
    }
    spec.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

/// Same syntax for reals; ranges accumulate `start + i·step` up to `stop`.
pub fn parse_f64_list(spec: &str, what: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("cannot parse {what} `{spec}`"));
    if let Some((a, rest)) = spec.split_once(':') {
        let (b, step) = rest.split_once(':').ok_or_else(bad)?;
        let (a, b, step): (f64, f64, f64) = (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
            step.trim().parse().map_err(|_| bad())?,
        );
        if !(step != 0.0 && (b - a) / step >= 0.0) {
            return Err(bad());
        }
        let count = ((b - a) / step + 1e-9).floor() as usize;
        return Ok((0..=count).map(|i| a + step * i as f64).collect());
    }
    spec.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()).and_then(|v| if v.is_finite() { Ok(v) } else { Err(bad()) }))
        .collect()
}

/// Validated view of a [`RunConfig`].
#[derive(Clone, Debug)]
pub struct Resolved {
    pub config: RunConfig,
    pub n: usize,
    pub cutoffs: Vec<usize>,
    pub horizons: Vec<f64>,
    pub policy: PrecisionPolicy,
    pub seed: u64,
    pub warnings: Vec<String>,
}

impl Resolved {
    pub fn new(config: RunConfig, mut warnings: Vec<String>) -> Result<Self, CliError> {
        let n = config.n.unwrap_or(1);
        if n == 0 || n > 3 {
            return Err(CliError::Usage(format!("dimension n = {n} outside 1..=3")));
        }
        let cutoffs = match &config.cutoff {
            Some(s) => parse_usize_list(s, "N")?,
            None => Vec::new(),
        };
        let horizons = match &config.horizon {
            Some(s) => parse_f64_list(s, "T")?,
            None => Vec::new(),
        };
        if let Some(t) = horizons.iter().find(|t| !(**t > 0.0)) {
            return Err(CliError::Usage(format!("horizon T = {t} must be positive")));
        }
        let env_bits = match std::env::var(PRECISION_ENV) {
            Ok(v) => Some(v.trim().parse::<u32>().map_err(|_| CliError::Usage(format!("{PRECISION_ENV}=`{v}` is not a bit count")))?),
            Err(_) => None,
        };
        if let (Some(e), Some(f)) = (env_bits, config.precision_bits) {
            if e != f {
                warnings.push(format!("precision_bits = {f} overrides {PRECISION_ENV} = {e}"));
            }
        }
        let start_bits = config.precision_bits.or(env_bits).unwrap_or(DEFAULT_PRECISION_BITS);
        let max_bits = config.max_bits.unwrap_or(MAX_PRECISION_BITS.max(start_bits));
        if !(64..=1 << 16).contains(&start_bits) || max_bits < start_bits {
            return Err(CliError::Usage(format!(
                "precision {start_bits} bits (max {max_bits}) outside 64..=65536 or above the maximum"
            )));
        }
        let policy =
            PrecisionPolicy { start_bits, max_bits, force_extended: config.force_extended.unwrap_or(false) };
        for (name, v) in [("c_sobolev", config.c_sobolev), ("c_kov", config.c_kov), ("radius", config.radius)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::Usage(format!("{name} = {v} must be positive")));
                }
            }
        }
        Ok(Resolved { seed: config.seed.unwrap_or(0), config, n, cutoffs, horizons, policy, warnings })
    }

    pub fn single_cutoff(&self) -> Result<usize, CliError> {
        match self.cutoffs.as_slice() {
            [c] => Ok(*c),
            [] => Err(CliError::Usage("missing --N".into())),
            _ => Err(CliError::Usage("this subcommand takes a single N".into())),
        }
    }

    pub fn cutoff_list(&self) -> Result<&[usize], CliError> {
        if self.cutoffs.is_empty() {
            return Err(CliError::Usage("missing --N".into()));
        }
        Ok(&self.cutoffs)
    }

    pub fn horizon_list(&self) -> Result<&[f64], CliError> {
        if self.horizons.is_empty() {
            return Err(CliError::Usage("missing --T".into()));
        }
        Ok(&self.horizons)
    }

    pub fn flag(&self, v: Option<bool>) -> bool {
        v.unwrap_or(false)
    }

    /// The part of the configuration that determines the numbers.
    pub fn hashed_config(&self) -> Value {
        let mut c = self.config.clone();
        c.out = None;
        c.mkdirs = None;
        c.plot_data = None;
        serde_json::to_value(c).expect("config serializes")
    }
}
