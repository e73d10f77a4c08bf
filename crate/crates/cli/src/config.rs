//! Run configuration: TOML blocks merged as preset < file < flags, then
//! validated into typed parameters before any computation starts.

use std::path::{Path, PathBuf};

use pathstitch::jn::{AngleStrategy, EikonalConfig, JnConfigs, JnMode, QuadratureConfig};
use pathstitch::stitcher::{GaussianState, PaddingConfig};
use pathstitch::{PhysicalParams, PotentialSpec, SpatialLattice};
use serde::{Deserialize, Serialize};
use toml::Table;

use crate::error::CliError;
use crate::presets;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawConfig {
    physical: RawPhysical,
    potential: RawPotential,
    lattice: RawLattice,
    method: RawMethod,
    output: RawOutput,
    field: RawField,
    caustics: RawCaustics,
    converge: RawConverge,
    state: RawState,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawPhysical {
    m: Option<f64>,
    hbar: Option<f64>,
    #[serde(rename = "T")]
    t: Option<f64>,
    #[serde(rename = "N")]
    n: Option<i64>,
    x0: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawPotential {
    name: Option<String>,
    #[serde(rename = "V0")]
    v0: Option<f64>,
    alpha: Option<f64>,
    depth: Option<f64>,
    omega: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawLattice {
    x_min: Option<f64>,
    x_max: Option<f64>,
    #[serde(rename = "M")]
    m: Option<i64>,
    pad_factor: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawMethod {
    mode: Option<String>,
    node_count: Option<i64>,
    angle: Option<String>,
    angle_value: Option<f64>,
    tolerance: Option<f64>,
    refine_tolerance: Option<f64>,
    max_nodes: Option<i64>,
    newton_tol: Option<f64>,
    newton_max_iter: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawOutput {
    directory: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawField {
    x0_min: Option<f64>,
    x0_max: Option<f64>,
    x0_count: Option<i64>,
    x1_min: Option<f64>,
    x1_max: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawCaustics {
    x0_min: Option<f64>,
    x0_max: Option<f64>,
    x0_count: Option<i64>,
    v0_min: Option<f64>,
    v0_max: Option<f64>,
    v0_count: Option<i64>,
    time_steps: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawConverge {
    #[serde(rename = "N_list")]
    n_list: Option<Vec<i64>>,
    #[serde(rename = "A")]
    a: Option<f64>,
    #[serde(rename = "B")]
    b: Option<f64>,
    eikonal_from: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawState {
    mu: Option<f64>,
    sigma: Option<f64>,
    p0: Option<f64>,
    crank_steps: Option<i64>,
    crank_refine: Option<i64>,
}

/// x0 values of a field run and the x1 window written out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldGrid {
    pub x0_min: f64,
    pub x0_max: f64,
    pub x0_count: usize,
    pub x1_min: f64,
    pub x1_max: f64,
}

impl FieldGrid {
    pub fn x0_values(&self) -> Vec<f64> {
        linspace(self.x0_min, self.x0_max, self.x0_count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CausticGrid {
    pub x0: (f64, f64, usize),
    pub v0: (f64, f64, usize),
    /// Caustics are also traced at T·k/time_steps, k = 1…time_steps, when > 0.
    pub time_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergeSweep {
    pub sizes: Vec<usize>,
    pub a: f64,
    pub b: f64,
    /// Sizes at or above this use the eikonal mode regardless of method.mode.
    pub eikonal_from: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateBlock {
    pub packet: Option<GaussianState>,
    pub crank_steps: Option<usize>,
    pub crank_refine: usize,
}

/// A fully validated run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub physical: PhysicalParams,
    pub potential: PotentialSpec,
    pub lattice: SpatialLattice,
    pub padding: PaddingConfig,
    pub mode: JnMode,
    pub method: JnConfigs,
    pub output: PathBuf,
    pub field: FieldGrid,
    pub caustics: CausticGrid,
    pub converge: ConvergeSweep,
    pub state: StateBlock,
}

/// Command-line values that take precedence over the file and the preset.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub mode: Option<String>,
}

pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}

/// Recursive merge; scalars and arrays of `top` replace those of `base`.
fn merge(base: &mut Table, top: Table) {
    for (key, value) in top {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(t)) => merge(b, t),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

fn parse_table(text: &str, origin: &str) -> Result<Table, CliError> {
    text.parse::<Table>().map_err(|e| CliError::Config(format!("{origin}: {}", e.message().trim())))
}

/// The output directory as far as it can be determined without validating
/// anything else, so that meta.json can be written for a rejected config.
pub fn output_hint(path: Option<&Path>, preset: Option<&str>, overrides: &Overrides) -> Option<PathBuf> {
    if let Some(out) = &overrides.out {
        return Some(out.clone());
    }
    let from = |table: &Table| table.get("output")?.get("directory")?.as_str().map(PathBuf::from);
    let file = path.and_then(|p| std::fs::read_to_string(p).ok()).and_then(|t| t.parse::<Table>().ok());
    file.as_ref()
        .and_then(from)
        .or_else(|| preset.and_then(presets::get).and_then(|t| t.parse::<Table>().ok()).as_ref().and_then(from))
        .or_else(|| Some(PathBuf::from(DEFAULT_OUTPUT)))
}

pub const DEFAULT_OUTPUT: &str = "out";

pub fn load(path: Option<&Path>, preset: Option<&str>, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let mut table = Table::new();
    if let Some(name) = preset {
        let text = presets::get(name).ok_or_else(|| {
            CliError::Config(format!("preset: unknown name '{name}' (known: {})", presets::NAMES.join(", ")))
        })?;
        merge(&mut table, parse_table(text, "preset")?);
    }
    if let Some(path) = path {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("config: cannot read {}: {e}", path.display())))?;
        merge(&mut table, parse_table(&text, &path.display().to_string())?);
    }
    let mut flags = Table::new();
    if let Some(out) = &overrides.out {
        let mut block = Table::new();
        block.insert("directory".into(), toml::Value::String(out.display().to_string()));
        flags.insert("output".into(), toml::Value::Table(block));
    }
    if let Some(mode) = &overrides.mode {
        let mut block = Table::new();
        block.insert("mode".into(), toml::Value::String(mode.clone()));
        flags.insert("method".into(), toml::Value::Table(block));
    }
    merge(&mut table, flags);
    let raw: RawConfig =
        toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
    validate(raw, preset.map(str::to_string))
}

fn config_err(field: &str, expected: &str) -> CliError {
    CliError::Config(format!("{field}: {expected}"))
}

fn positive(value: Option<f64>, field: &str) -> Result<f64, CliError> {
    match value {
        Some(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(config_err(field, "required, > 0")),
    }
}

fn finite_or(value: Option<f64>, default: f64, field: &str) -> Result<f64, CliError> {
    match value {
        None => Ok(default),
        Some(v) if v.is_finite() => Ok(v),
        Some(_) => Err(config_err(field, "must be finite")),
    }
}

fn count_or(value: Option<i64>, default: usize, min: usize, field: &str) -> Result<usize, CliError> {
    match value {
        None => Ok(default),
        Some(v) if v >= min as i64 => Ok(v as usize),
        Some(_) => Err(config_err(field, &format!("must be ≥ {min}"))),
    }
}

fn core_err(e: pathstitch::Error) -> CliError {
    match e {
        pathstitch::Error::InvalidParameter { field, reason } => CliError::Config(format!("{field}: {reason}")),
        other => CliError::Config(other.to_string()),
    }
}

fn validate(raw: RawConfig, preset: Option<String>) -> Result<RunConfig, CliError> {
    let p = &raw.physical;
    let mass = positive(p.m, "physical.m")?;
    let hbar = positive(p.hbar, "physical.hbar")?;
    let time = positive(p.t, "physical.T")?;
    let slices = match p.n {
        None => return Err(config_err("physical.N", "required, ≥ 2")),
        Some(n) if n < 2 => return Err(config_err("physical.N", "must be ≥ 2")),
        Some(n) => n as usize,
    };
    let x0 = match p.x0 {
        Some(v) if v.is_finite() => v,
        _ => return Err(config_err("physical.x0", "required, finite")),
    };
    let physical = PhysicalParams::new(mass, hbar, time, slices, x0).map_err(core_err)?;

    let potential = potential(&raw.potential)?;

    let l = &raw.lattice;
    let x_min = finite_or(l.x_min, -50.0, "lattice.x_min")?;
    let x_max = finite_or(l.x_max, 50.0, "lattice.x_max")?;
    if x_max <= x_min {
        return Err(config_err("lattice.x_max", "must exceed lattice.x_min"));
    }
    let points = count_or(l.m, 4096, 2, "lattice.M")?;
    let lattice = SpatialLattice::new(x_min, x_max, points).map_err(core_err)?;
    let padding = PaddingConfig { pad_factor: count_or(l.pad_factor, 2, 1, "lattice.pad_factor")? };

    let (mode, method) = method(&raw.method)?;
    let output = raw.output.directory.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));

    let f = &raw.field;
    let field = FieldGrid {
        x0_min: finite_or(f.x0_min, -15.0, "field.x0_min")?,
        x0_max: finite_or(f.x0_max, 15.0, "field.x0_max")?,
        x0_count: count_or(f.x0_count, 61, 1, "field.x0_count")?,
        x1_min: finite_or(f.x1_min, x_min, "field.x1_min")?,
        x1_max: finite_or(f.x1_max, x_max, "field.x1_max")?,
    };
    if field.x0_max < field.x0_min {
        return Err(config_err("field.x0_max", "must be ≥ field.x0_min"));
    }
    if field.x1_max <= field.x1_min {
        return Err(config_err("field.x1_max", "must exceed field.x1_min"));
    }

    let c = &raw.caustics;
    let caustics = CausticGrid {
        x0: (
            finite_or(c.x0_min, x0, "caustics.x0_min")?,
            finite_or(c.x0_max, x0, "caustics.x0_max")?,
            count_or(c.x0_count, 1, 1, "caustics.x0_count")?,
        ),
        v0: (
            finite_or(c.v0_min, -5.0, "caustics.v0_min")?,
            finite_or(c.v0_max, 5.0, "caustics.v0_max")?,
            count_or(c.v0_count, 1001, 3, "caustics.v0_count")?,
        ),
        time_steps: count_or(c.time_steps, 0, 0, "caustics.time_steps")?,
    };
    if caustics.v0.1 <= caustics.v0.0 {
        return Err(config_err("caustics.v0_max", "must exceed caustics.v0_min"));
    }
    if caustics.x0.1 < caustics.x0.0 {
        return Err(config_err("caustics.x0_max", "must be ≥ caustics.x0_min"));
    }

    let cv = &raw.converge;
    let sizes = match &cv.n_list {
        None => vec![slices],
        Some(list) if list.is_empty() => return Err(config_err("converge.N_list", "must not be empty")),
        Some(list) if list.iter().any(|&n| n < 2) => return Err(config_err("converge.N_list", "entries must be ≥ 2")),
        Some(list) => list.iter().map(|&n| n as usize).collect(),
    };
    let converge = ConvergeSweep {
        sizes,
        a: finite_or(cv.a, x_min, "converge.A")?,
        b: finite_or(cv.b, x_max, "converge.B")?,
        eikonal_from: cv.eikonal_from.map(|n| count_or(Some(n), 2, 2, "converge.eikonal_from")).transpose()?,
    };
    if converge.b <= converge.a {
        return Err(config_err("converge.B", "must exceed converge.A"));
    }

    let s = &raw.state;
    let packet = match (s.mu, s.sigma, s.p0) {
        (None, None, None) => None,
        (mu, sigma, p0) => {
            let mu = mu.filter(|v| v.is_finite()).ok_or_else(|| config_err("state.mu", "required, finite"))?;
            let sigma = positive(sigma, "state.sigma")?;
            let p0 = finite_or(p0, 0.0, "state.p0")?;
            Some(GaussianState::new(mu, sigma, p0).map_err(core_err)?)
        }
    };
    let state = StateBlock {
        packet,
        crank_steps: s.crank_steps.map(|n| count_or(Some(n), 1, 1, "state.crank_steps")).transpose()?,
        crank_refine: count_or(s.crank_refine, 1, 1, "state.crank_refine")?,
    };

    Ok(RunConfig {
        preset,
        physical,
        potential,
        lattice,
        padding,
        mode,
        method,
        output,
        field,
        caustics,
        converge,
        state,
    })
}

fn potential(raw: &RawPotential) -> Result<PotentialSpec, CliError> {
    let name = raw.name.as_deref().ok_or_else(|| config_err("potential.name", "required"))?;
    let spec = match name {
        "free" => PotentialSpec::Free,
        "rosen-morse" => PotentialSpec::RosenMorse { v0: positive(raw.v0, "potential.V0")? },
        "smooth-step" => PotentialSpec::SmoothStep { v0: positive(raw.v0, "potential.V0")? },
        "truncated-double-well" => {
            PotentialSpec::TruncatedDoubleWell { alpha: positive(raw.alpha, "potential.alpha")? }
        }
        "gaussian-double-well" => PotentialSpec::GaussianDoubleWell {
            depth: raw
                .depth
                .filter(|d| d.is_finite())
                .ok_or_else(|| config_err("potential.depth", "required, finite"))?,
        },
        "harmonic" => PotentialSpec::Harmonic {
            omega: raw
                .omega
                .filter(|w| w.is_finite() && *w >= 0.0)
                .ok_or_else(|| config_err("potential.omega", "required, ≥ 0"))?,
        },
        other => {
            return Err(config_err(
                "potential.name",
                &format!(
                    "unknown '{other}', expected free | rosen-morse | smooth-step | truncated-double-well | \
                     gaussian-double-well | harmonic"
                ),
            ))
        }
    };
    spec.validate().map_err(core_err)?;
    Ok(spec)
}

fn method(raw: &RawMethod) -> Result<(JnMode, JnConfigs), CliError> {
    let mode = match raw.mode.as_deref() {
        None | Some("quadrature") => JnMode::Quadrature,
        Some("eikonal") => JnMode::Eikonal,
        Some(_) => return Err(config_err("method.mode", "expected quadrature | eikonal")),
    };
    let defaults = QuadratureConfig::default();
    let angle_value = || raw.angle_value.ok_or_else(|| config_err("method.angle_value", "required for this angle"));
    let angle_strategy = match raw.angle.as_deref() {
        None | Some("adaptive") => AngleStrategy::Adaptive,
        Some("half-max") => AngleStrategy::HalfMax,
        Some("fraction") => AngleStrategy::FractionOfMax(angle_value()?),
        Some("fixed") => AngleStrategy::Fixed(angle_value()?),
        Some(_) => return Err(config_err("method.angle", "expected adaptive | half-max | fraction | fixed")),
    };
    let quadrature = QuadratureConfig {
        node_count: count_or(raw.node_count, defaults.node_count, 8, "method.node_count")?,
        angle_strategy,
        tolerance: raw.tolerance.map_or(Ok(defaults.tolerance), |v| positive(Some(v), "method.tolerance"))?,
        refine_tolerance: raw
            .refine_tolerance
            .map_or(Ok(defaults.refine_tolerance), |v| positive(Some(v), "method.refine_tolerance"))?,
        max_nodes: count_or(raw.max_nodes, defaults.max_nodes, 8, "method.max_nodes")?,
        ..defaults
    };
    quadrature.validate().map_err(core_err)?;
    let eik = EikonalConfig::default();
    let eikonal = EikonalConfig {
        newton_tol: raw.newton_tol.map_or(Ok(eik.newton_tol), |v| positive(Some(v), "method.newton_tol"))?,
        newton_max_iter: count_or(raw.newton_max_iter, eik.newton_max_iter, 1, "method.newton_max_iter")?,
    };
    Ok((mode, JnConfigs { quadrature, eikonal }))
}
