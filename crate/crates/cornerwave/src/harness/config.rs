//! Run configuration: one versioned JSON document per scenario, strictly
//! validated before any arithmetic runs.
//!
//! The schema is deliberately rigid — unknown keys are rejected at parse
//! time, family parameters are checked against a per-family table, and every
//! numerical precondition (grid sizes, CFL window, horizon vs. slab depth,
//! wall-parameter admissibility, compact-support containment) produces an
//! [`Error::InvalidConfig`] naming the violated rule. A config that survives
//! [`ScenarioConfig::validate`] is guaranteed to build a runnable scenario.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gravity::{analytic, GravitoScenario, WallKind};
use crate::grid::CornerGrid;
use crate::scalar::{families, ScalarBc, ScalarScenario};

/// The one schema this build understands.
pub const SCHEMA: &str = "cornerwave/1";

/// Which evolution system a config drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    /// Scalar wave with a Dirichlet / Sommerfeld / Neumann wall.
    Scalar,
    /// Tensor perturbation with the full dotted-normal wall row set.
    GravitoB,
    /// Tensor perturbation with the `(α, β)`-parametrized row set.
    GravitoBc,
    /// Boundary gauge-map components under Dirichlet wall data (the tensor
    /// sector rides along with zero data).
    Gaugemap,
}

impl SystemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SystemKind::Scalar => "scalar",
            SystemKind::GravitoB => "gravito_b",
            SystemKind::GravitoBc => "gravito_bc",
            SystemKind::Gaugemap => "gaugemap",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Interior planes along `x¹`; slab depth is `n1 · dx`.
    pub n1: usize,
    /// Points per periodic transverse direction; period is `n_a · dx`.
    pub n_a: usize,
    pub dx: f64,
}

/// Wall-condition parameters. `kind` names the scalar closure; `alpha`/`beta`
/// parametrize the tensor row set when `system` is `gravito_bc`. The
/// cross-field rules live in [`ScenarioConfig::validate`].
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

/// Data family selector: a family id, its numeric parameters (missing ones
/// take the documented defaults, unknown ones are rejected), and a seed for
/// the families that draw random coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub family: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn default_sobolev() -> u32 {
    1
}

/// A complete run description, deserialized from one JSON file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Must equal [`SCHEMA`].
    pub schema: String,
    pub system: SystemKind,
    pub grid: GridConfig,
    /// Final time; must stay below the slab depth.
    pub horizon: f64,
    /// `dt = cfl · dx`, `cfl ∈ (0, 0.5]`.
    pub cfl: f64,
    #[serde(default)]
    pub bc: BcConfig,
    pub data: DataConfig,
    /// Output file stem (the CLI joins it with the output directory).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// Order of the data norm in the scalar estimate denominator: 1 uses the
    /// tangential-gradient-augmented norm (the default; it is the norm the
    /// wall estimate closes in), 0 uses the plain squared data norm. The
    /// tensor data norm is fixed by the boundary rows, so non-scalar systems
    /// require the default.
    #[serde(default = "default_sobolev")]
    pub sobolev_order: u32,
}

/// Look up family parameters against the allowed table, filling defaults and
/// rejecting unknown names.
fn family_params(data: &DataConfig, family: &str, table: &[(&str, f64)]) -> Result<Vec<f64>> {
    for key in data.params.keys() {
        if !table.iter().any(|(name, _)| name == key) {
            let known: Vec<&str> = table.iter().map(|(n, _)| *n).collect();
            return Err(Error::InvalidConfig(format!(
                "unknown parameter `{key}` for family `{family}` (known: {})",
                known.join(", ")
            )));
        }
    }
    Ok(table
        .iter()
        .map(|(name, default)| data.params.get(*name).copied().unwrap_or(*default))
        .collect())
}

/// Coerce a parameter that is semantically an integer mode index.
fn mode_index(value: f64, name: &str) -> Result<i64> {
    let rounded = value.round();
    if (value - rounded).abs() > 1e-9 || !value.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "parameter `{name}` must be an integer (got {value})"
        )));
    }
    Ok(rounded as i64)
}

/// A transverse mode index must be resolvable on the grid: `|m| ≤ n_a / 2`.
fn transverse_mode(value: f64, name: &str, n_a: usize) -> Result<i64> {
    let m = mode_index(value, name)?;
    if 2 * m.unsigned_abs() as usize > n_a {
        return Err(Error::InvalidConfig(format!(
            "transverse mode `{name}` = {m} exceeds the Nyquist index n_a/2 = {}",
            n_a / 2
        )));
    }
    Ok(m)
}

/// Compact data moving or spreading at unit speed must stay clear of the end
/// planes it is not designed to cross: the support, fattened by the horizon
/// where the family spreads, has to fit inside the open slab.
fn check_support(
    family: &str,
    center: f64,
    width: f64,
    spread_left: f64,
    spread_right: f64,
    depth: f64,
) -> Result<()> {
    if width <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "family `{family}`: width must be positive (got {width})"
        )));
    }
    let lo = center - width - spread_left;
    let hi = center + width + spread_right;
    if lo <= -depth || hi >= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "family `{family}`: support [{:.4}, {:.4}] (including travel over the horizon) \
             must stay inside the open slab (-{depth}, 0)",
            lo, hi
        )));
    }
    Ok(())
}

impl ScenarioConfig {
    /// Parse and validate one JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn grid(&self) -> Result<CornerGrid> {
        CornerGrid::new(self.grid.n1, self.grid.n_a, self.grid.dx)
    }

    /// Full validation: schema tag, grid support rules, bc cross-field
    /// rules, family table, and the scenario-level preconditions (the
    /// builders run their own `validate` internally).
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(Error::InvalidConfig(format!(
                "unsupported schema `{}` (this build reads `{SCHEMA}`)",
                self.schema
            )));
        }
        match self.system {
            SystemKind::Scalar => {
                if self.sobolev_order > 1 {
                    return Err(Error::InvalidConfig(format!(
                        "sobolev_order = {} (scalar runs support 0 or 1)",
                        self.sobolev_order
                    )));
                }
                self.to_scalar().map(|_| ())
            }
            _ => {
                if self.sobolev_order != 1 {
                    return Err(Error::InvalidConfig(
                        "sobolev_order must be 1 for tensor and gauge-map runs \
                         (their data norm is fixed by the boundary rows)"
                            .into(),
                    ));
                }
                self.to_gravito().map(|_| ())
            }
        }
    }

    fn scalar_bc(&self) -> Result<ScalarBc> {
        if self.bc.alpha.is_some() || self.bc.beta.is_some() {
            return Err(Error::InvalidConfig(
                "bc.alpha/bc.beta apply only to system `gravito_bc`".into(),
            ));
        }
        match self.bc.kind.as_deref() {
            Some("dirichlet") => Ok(ScalarBc::Dirichlet),
            Some("sommerfeld") => Ok(ScalarBc::Sommerfeld),
            Some("neumann") => Ok(ScalarBc::Neumann),
            Some(other) => Err(Error::InvalidConfig(format!(
                "unknown scalar bc kind `{other}` (dirichlet | sommerfeld | neumann)"
            ))),
            None => Err(Error::InvalidConfig(
                "scalar runs require bc.kind (dirichlet | sommerfeld | neumann)".into(),
            )),
        }
    }

    /// Build the scalar scenario this config describes.
    pub fn to_scalar(&self) -> Result<ScalarScenario> {
        if self.system != SystemKind::Scalar {
            return Err(Error::InvalidConfig(format!(
                "system `{}` is not a scalar run",
                self.system.as_str()
            )));
        }
        let grid = self.grid()?;
        let bc = self.scalar_bc()?;
        let (horizon, cfl) = (self.horizon, self.cfl);
        let depth = grid.depth();
        let d = &self.data;
        if d.seed.is_some() {
            return Err(Error::InvalidConfig("scalar families do not take a seed".into()));
        }
        let scen = match d.family.as_str() {
            "zero" => families::zero(grid, bc, horizon, cfl),
            "traveling_wave" => {
                let p = family_params(d, &d.family, &[("amp", 1.0), ("k", 2.0), ("phase", 0.5)])?;
                families::traveling_wave(grid, bc, horizon, cfl, p[0], p[1], p[2])
            }
            "outgoing_bump" => {
                let p = family_params(
                    d,
                    &d.family,
                    &[("amp", 1.0), ("center", -0.5 * depth), ("width", 0.125 * depth)],
                )?;
                // travels toward the wall and exits through it; only the
                // trailing edge must stay inside at t = 0
                check_support(&d.family, p[1], p[2], 0.0, 0.0, depth)?;
                families::outgoing_bump(grid, bc, horizon, cfl, p[0], p[1], p[2])
            }
            "standing_transverse" => {
                let p =
                    family_params(d, &d.family, &[("amp", 1.0), ("kappa", 1.0), ("m", 1.0)])?;
                let m = transverse_mode(p[2], "m", grid.na)?;
                families::standing_transverse(grid, bc, horizon, cfl, p[0], p[1], m as usize)
            }
            "interior_bump" => {
                let p = family_params(
                    d,
                    &d.family,
                    &[
                        ("amp", 1.0),
                        ("center", -0.5 * depth),
                        ("width", 0.125 * depth),
                        ("m", 1.0),
                        ("eps", 0.3),
                    ],
                )?;
                // released at rest: spreads both ways at unit speed
                check_support(&d.family, p[1], p[2], horizon, horizon, depth)?;
                let m = transverse_mode(p[3], "m", grid.na)?;
                families::interior_bump(grid, bc, horizon, cfl, p[0], p[1], p[2], m as usize, p[4])
            }
            "wall_pulse" => {
                let p = family_params(d, &d.family, &[("amp", 1.0), ("tau", 0.4), ("m", 1.0)])?;
                if p[1] <= 0.0 {
                    return Err(Error::InvalidConfig("wall_pulse: tau must be positive".into()));
                }
                let m = transverse_mode(p[2], "m", grid.na)?;
                families::wall_pulse(grid, bc, horizon, cfl, p[0], p[1], m as usize)
            }
            "klein_traveling" => {
                let p = family_params(d, &d.family, &[("amp", 1.0), ("k", 2.0)])?;
                families::klein_traveling(grid, bc, horizon, cfl, p[0], p[1])
            }
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown scalar family `{other}` (zero | traveling_wave | outgoing_bump | \
                     standing_transverse | interior_bump | wall_pulse | klein_traveling)"
                )))
            }
        };
        scen.validate()?;
        Ok(scen)
    }

    fn wall_kind(&self) -> Result<WallKind> {
        match self.system {
            SystemKind::GravitoB | SystemKind::Gaugemap => {
                if self.bc.kind.is_some() || self.bc.alpha.is_some() || self.bc.beta.is_some() {
                    return Err(Error::InvalidConfig(format!(
                        "system `{}` takes no bc parameters",
                        self.system.as_str()
                    )));
                }
                Ok(WallKind::B)
            }
            SystemKind::GravitoBc => {
                if self.bc.kind.is_some() {
                    return Err(Error::InvalidConfig(
                        "system `gravito_bc` takes bc.alpha/bc.beta, not bc.kind".into(),
                    ));
                }
                match (self.bc.alpha, self.bc.beta) {
                    (Some(alpha), Some(beta)) => Ok(WallKind::Bc { alpha, beta }),
                    _ => Err(Error::InvalidConfig(
                        "system `gravito_bc` requires both bc.alpha and bc.beta".into(),
                    )),
                }
            }
            SystemKind::Scalar => unreachable!("scalar handled separately"),
        }
    }

    /// Build the tensor / gauge-map scenario this config describes.
    pub fn to_gravito(&self) -> Result<GravitoScenario> {
        if self.system == SystemKind::Scalar {
            return Err(Error::InvalidConfig("system `scalar` is not a tensor run".into()));
        }
        let grid = self.grid()?;
        let kind = self.wall_kind()?;
        let period = grid.period();
        let depth = grid.depth();
        let d = &self.data;
        let mut h_data = analytic::AnalyticPerturbation::zero();
        let mut f_data = analytic::AnalyticGaugeMap::zero();
        let mut h_exact = true; // zero data is its own solution
        let f_exact = true; // zero and gauge_map_mixed both solve the system
        if self.system == SystemKind::Gaugemap {
            match d.family.as_str() {
                "zero" => {}
                "gauge_map_mixed" => {
                    let p = family_params(d, &d.family, &[("amp", 1.0), ("k", 2.0)])?;
                    f_data = analytic::gauge_map_mixed(p[0], p[1]);
                }
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown gauge-map family `{other}` (zero | gauge_map_mixed)"
                    )))
                }
            }
        } else {
            match d.family.as_str() {
                "zero" => {}
                "pure_gauge_profile" => {
                    let p = family_params(
                        d,
                        &d.family,
                        &[("k", 2.0), ("a0", 1.0), ("a1", 0.6), ("a2", 0.4), ("a3", 0.3)],
                    )?;
                    h_data = analytic::pure_gauge_profile(p[0], [p[1], p[2], p[3], p[4]]);
                }
                "pure_gauge_oblique" => {
                    let p = family_params(
                        d,
                        &d.family,
                        &[("kx", 2.0), ("mode", 1.0), ("amp", 1.0)],
                    )?;
                    let m = transverse_mode(p[1], "mode", grid.na)?;
                    h_data = analytic::pure_gauge_oblique(p[0], m as i32, period, p[2]);
                }
                "tt_plane" => {
                    let p = family_params(d, &d.family, &[("amp", 1.0), ("k", 2.0)])?;
                    h_data = analytic::tt_plane(p[0], p[1]);
                }
                "tt_bump" => {
                    let p = family_params(
                        d,
                        &d.family,
                        &[("amp", 1.0), ("center", -0.5 * depth), ("width", 0.125 * depth)],
                    )?;
                    check_support(&d.family, p[1], p[2], 0.0, 0.0, depth)?;
                    h_data = analytic::tt_bump(p[0], p[1], p[2]);
                }
                "tt_transverse" => {
                    let p = family_params(d, &d.family, &[("amp", 1.0), ("mode", 1.0)])?;
                    let m = transverse_mode(p[1], "mode", grid.na)?;
                    h_data = analytic::tt_transverse(p[0], m as i32, period);
                }
                "random" => {
                    let p = family_params(d, &d.family, &[("amp", 0.1)])?;
                    let seed = d.seed.unwrap_or(0);
                    h_data = analytic::random_perturbation(seed, period, p[0]);
                    h_exact = false;
                }
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown tensor family `{other}` (zero | pure_gauge_profile | \
                         pure_gauge_oblique | tt_plane | tt_bump | tt_transverse | random)"
                    )))
                }
            }
        }
        if d.seed.is_some() && d.family != "random" {
            return Err(Error::InvalidConfig(format!(
                "family `{}` does not take a seed",
                d.family
            )));
        }
        let scen = GravitoScenario {
            grid,
            horizon: self.horizon,
            cfl: self.cfl,
            kind,
            h_data,
            h_exact,
            f_data,
            f_exact,
        };
        scen.validate()?;
        Ok(scen)
    }

    /// Derive the same scenario at a different resolution: `n1 = resolution`,
    /// with the slab depth and transverse period held fixed. Fails when the
    /// period is not representable on the new spacing.
    pub fn at_resolution(&self, resolution: usize) -> Result<ScenarioConfig> {
        if resolution == 0 {
            return Err(Error::InvalidConfig("resolution must be positive".into()));
        }
        let depth = self.grid.n1 as f64 * self.grid.dx;
        let period = self.grid.n_a as f64 * self.grid.dx;
        let dx = depth / resolution as f64;
        let na_real = period / dx;
        let n_a = na_real.round() as usize;
        if (na_real - n_a as f64).abs() > 1e-9 * na_real.max(1.0) {
            return Err(Error::InvalidConfig(format!(
                "resolution {resolution}: transverse period {period} is not a whole \
                 multiple of dx = {dx}"
            )));
        }
        let mut cfg = self.clone();
        cfg.grid = GridConfig { n1: resolution, n_a, dx };
        cfg.validate()?;
        Ok(cfg)
    }
}
