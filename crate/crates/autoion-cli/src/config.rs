//! Run configuration: a single JSON document with flat blocks for the
//! parameters, the reporting grid, the workflow and the output targets.
//! Unset fields get defaults; the fully resolved configuration is echoed into
//! the result metadata so a run can be reproduced from its own output.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use autoion::oracle::ContinuumDiscretization;
use autoion::params::ReducedParams;
use autoion::spectra::EnergyGrid;
use autoion::SystemParams;

use crate::CliError;

/// Complex scalar that reads from a bare number or an `[re, im]` pair and
/// always writes the pair form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CNum(pub C64);

impl Serialize for CNum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(s)
    }
}

impl<'de> Deserialize<'de> for CNum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Real(f64),
            Pair([f64; 2]),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Real(x) => CNum(C64::new(x, 0.0)),
            Raw::Pair([re, im]) => CNum(C64::new(re, im)),
        })
    }
}

/// Time instant that accepts the string "inf" for the long-time limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeSpec(pub f64);

impl Serialize for TimeSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            "inf".serialize(s)
        } else {
            self.0.serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for TimeSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(TimeSpec(x)),
            Raw::Word(w) if w == "inf" || w == "infinity" => Ok(TimeSpec(f64::INFINITY)),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "unrecognized time value '{w}' (use a number or \"inf\")"
            ))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub parameters: ParameterBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workflow: Option<WorkflowBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleBlock>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical: Option<PhysicalBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduced: Option<ReducedBlock>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalBlock {
    pub e_a: f64,
    pub e_b: f64,
    pub e_l: f64,
    pub mu_a: CNum,
    pub mu_b: CNum,
    pub mu: CNum,
    pub v: CNum,
    pub j: CNum,
    pub j_ab: CNum,
    pub alpha_l: CNum,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReducedBlock {
    pub q_a: f64,
    pub q_b: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub omega: f64,
    pub e_a: f64,
    pub e_b: f64,
    pub e_l: f64,
    /// Optional transfer coupling overriding the canonical gauge value 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_ab: Option<CNum>,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkflowBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<TimeSpec>>,
    /// Extra pump strengths for multi-curve spectrum runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_count: Option<usize>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_bins: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Spectrum,
    Evolve,
    Zeros,
    Sweep,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Spectrum => "spectrum",
            Mode::Evolve => "evolve",
            Mode::Zeros => "zeros",
            Mode::Sweep => "sweep",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "both" => Ok(Format::Both),
            other => Err(CliError::Config(format!(
                "unknown format '{other}' (expected csv|json|both)"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Both => "both",
        }
    }

    pub fn wants_csv(&self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn wants_json(&self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

/// A fully resolved run: defaults applied, flags folded in, parameters
/// realized. `echo` is a complete configuration document that reproduces the
/// run.
#[derive(Clone, Debug)]
pub struct ResolvedRun {
    pub echo: RunConfig,
    pub mode: Mode,
    pub params: SystemParams,
    pub grid: EnergyGrid,
    pub times: Vec<f64>,
    pub omega_values: Option<Vec<f64>>,
    pub omega_sweep: Vec<f64>,
    pub out_dir: PathBuf,
    pub format: Format,
    pub oracle_disc: ContinuumDiscretization,
}

pub fn load(path: &std::path::Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("cannot parse {}: {e}", path.display())))
}

pub fn resolve(
    config: &RunConfig,
    mode: Mode,
    out_override: Option<PathBuf>,
    format_override: Option<Format>,
) -> Result<ResolvedRun, CliError> {
    // exactly one parameter style
    let params = match (&config.parameters.physical, &config.parameters.reduced) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "exactly one of parameters.physical / parameters.reduced must be present".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Config(
                "missing parameter block (physical or reduced)".into(),
            ))
        }
        (Some(ph), None) => SystemParams {
            e_a: ph.e_a,
            e_b: ph.e_b,
            e_l: ph.e_l,
            mu_a: ph.mu_a.0,
            mu_b: ph.mu_b.0,
            mu: ph.mu.0,
            v: ph.v.0,
            j: ph.j.0,
            j_ab: ph.j_ab.0,
            alpha_l: ph.alpha_l.0,
        },
        (None, Some(rd)) => {
            let reduced = ReducedParams {
                q_a: rd.q_a,
                q_b: rd.q_b,
                gamma_a: rd.gamma_a,
                gamma_b: rd.gamma_b,
                omega: rd.omega,
                de_a: rd.e_a - rd.e_l,
                de_b: rd.e_b - rd.e_l,
            };
            let mut p = reduced
                .realize(rd.e_l)
                .map_err(|e| CliError::Config(format!("cannot realize reduced parameters: {e}")))?;
            if let Some(j_ab) = rd.j_ab {
                p.j_ab = j_ab.0;
            }
            p
        }
    };
    params
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;

    // workflow mode consistency
    let wf = config.workflow.clone().unwrap_or_default();
    if let Some(m) = &wf.mode {
        if m != mode.as_str() {
            return Err(CliError::Config(format!(
                "config workflow.mode '{m}' does not match subcommand '{}'",
                mode.as_str()
            )));
        }
    }

    // grid defaults
    let gb = config.grid.unwrap_or_default();
    let default_grid = EnergyGrid::default_for(&params);
    let e_min = gb.e_min.unwrap_or(default_grid.e_min);
    let e_max = gb.e_max.unwrap_or(default_grid.e_max);
    let n_points = gb.n_points.unwrap_or(default_grid.n_points);
    let grid =
        EnergyGrid::new(e_min, e_max, n_points).map_err(|e| CliError::Config(e.to_string()))?;

    // per-mode workflow fields
    let times: Vec<f64> = wf
        .times
        .as_ref()
        .map(|ts| ts.iter().map(|t| t.0).collect())
        .unwrap_or_default();
    if mode == Mode::Evolve {
        if times.is_empty() {
            return Err(CliError::Config(
                "evolve requires a nonempty workflow.times list".into(),
            ));
        }
        if times.iter().any(|t| !(*t >= 0.0)) {
            return Err(CliError::Config("times must be nonnegative".into()));
        }
    }

    let omega_sweep: Vec<f64> = if mode == Mode::Sweep {
        if let Some(values) = &wf.omega_values {
            if values.len() < 2 {
                return Err(CliError::Config("sweep needs at least 2 samples".into()));
            }
            values.clone()
        } else {
            let (lo, hi, n) = match (wf.omega_min, wf.omega_max, wf.omega_count) {
                (Some(lo), Some(hi), Some(n)) => (lo, hi, n),
                _ => {
                    return Err(CliError::Config(
                        "sweep requires omega_min, omega_max and omega_count (or omega_values)"
                            .into(),
                    ))
                }
            };
            if n < 2 || !(hi > lo) {
                return Err(CliError::Config(
                    "sweep range must be increasing with at least 2 samples".into(),
                ));
            }
            (0..n)
                .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                .collect()
        }
    } else {
        Vec::new()
    };

    // output
    let ob = config.output.clone().unwrap_or_default();
    let out_dir = out_override
        .or_else(|| ob.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let format = match format_override {
        Some(f) => f,
        None => Format::parse(ob.format.as_deref().unwrap_or("both"))?,
    };

    // oracle discretization
    let orc = config.oracle.unwrap_or_default();
    let default_disc = ContinuumDiscretization::default_for(&params);
    let oracle_disc = ContinuumDiscretization {
        e_min: orc.e_min.unwrap_or(default_disc.e_min),
        e_max: orc.e_max.unwrap_or(default_disc.e_max),
        n_bins: orc.n_bins.unwrap_or(default_disc.n_bins),
    };

    // full echo: every default made explicit
    let echo = RunConfig {
        parameters: config.parameters.clone(),
        grid: Some(GridBlock {
            e_min: Some(grid.e_min),
            e_max: Some(grid.e_max),
            n_points: Some(grid.n_points),
        }),
        workflow: Some(WorkflowBlock {
            mode: Some(mode.as_str().to_string()),
            times: if times.is_empty() {
                None
            } else {
                Some(times.iter().map(|&t| TimeSpec(t)).collect())
            },
            omega_values: wf.omega_values.clone(),
            omega_min: None,
            omega_max: None,
            omega_count: None,
        })
        .map(|mut w| {
            if mode == Mode::Sweep {
                w.omega_values = Some(omega_sweep.clone());
            }
            w
        }),
        output: Some(OutputBlock {
            dir: Some(out_dir.display().to_string()),
            format: Some(format.as_str().to_string()),
        }),
        oracle: Some(OracleBlock {
            e_min: Some(oracle_disc.e_min),
            e_max: Some(oracle_disc.e_max),
            n_bins: Some(oracle_disc.n_bins),
        }),
    };

    Ok(ResolvedRun {
        echo,
        mode,
        params,
        grid,
        times,
        omega_values: wf.omega_values,
        omega_sweep,
        out_dir,
        format,
        oracle_disc,
    })
}
