//! Job configuration: the JSON schema consumed via `--config` and the
//! flag-overlay that builds the same structure from the command line.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use qem::closed_form::{self, Branch, ExpPowerConstants};
use qem::quadrature;
use qem::report::{check_grid, uniform_grid, DEFAULT_MARGIN};
use qem::{Error, ModelParams, Profile1D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Thm11,
    Homothetic,
    Example14,
    QuadM1,
    QuadMgt1,
}

impl Family {
    pub fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "thm11" => Ok(Family::Thm11),
            "homothetic" => Ok(Family::Homothetic),
            "example14" => Ok(Family::Example14),
            "quad_m1" => Ok(Family::QuadM1),
            "quad_mgt1" => Ok(Family::QuadMgt1),
            other => Err(Error::Constraint(format!(
                "unknown family '{other}' (expected thm11, homothetic, example14, quad_m1, quad_mgt1)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Thm11 => "thm11",
            Family::Homothetic => "homothetic",
            Family::Example14 => "example14",
            Family::QuadM1 => "quad_m1",
            Family::QuadMgt1 => "quad_mgt1",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct XiGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default = "default_margin")]
    pub margin: f64,
}

fn default_margin() -> f64 {
    DEFAULT_MARGIN
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputCfg {
    #[serde(default)]
    pub format: Option<String>,
    #[serde(default)]
    pub path: Option<String>,
}

/// One verification or solve job. Everything a run needs, serializable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JobConfig {
    pub family: Family,
    pub n: usize,
    #[serde(default)]
    pub m: Option<f64>,
    #[serde(default)]
    pub constants: BTreeMap<String, f64>,
    #[serde(default)]
    pub xi_grid: Option<XiGrid>,
    #[serde(default)]
    pub alpha: Option<Vec<f64>>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub output: Option<OutputCfg>,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Verification thresholds, keyed like the `--tol` flags.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub fundamental: f64,
    pub ode: f64,
    pub pde: f64,
    pub hessian_identity: f64,
    pub mu_rel_var: f64,
    pub scalar: f64,
}

impl Tolerances {
    fn defaults(family: Family) -> Self {
        match family {
            Family::Thm11 => Tolerances {
                fundamental: 1e-9,
                ode: 1e-10,
                pde: 1e-10,
                hessian_identity: 1e-10,
                mu_rel_var: 1e-10,
                scalar: 1e-9,
            },
            Family::Homothetic => Tolerances {
                fundamental: 1e-12,
                ode: 1e-12,
                pde: 1e-12,
                hessian_identity: 1e-10,
                mu_rel_var: 1e-10,
                scalar: 1e-12,
            },
            // the scalar gate absorbs the u^2 ~ A^{-2} roundoff
            // amplification when the grid hugs the singular margin
            Family::Example14 => Tolerances {
                fundamental: 1e-9,
                ode: 1e-9,
                pde: 1e-9,
                hessian_identity: 1e-10,
                mu_rel_var: 1e-10,
                scalar: 1e-6,
            },
            Family::QuadM1 | Family::QuadMgt1 => Tolerances {
                fundamental: 1e-6,
                ode: 1e-6,
                pde: 1e-6,
                hessian_identity: 1e-10,
                mu_rel_var: 1e-10,
                scalar: 1e-6,
            },
        }
    }

    fn apply(mut self, map: &BTreeMap<String, f64>) -> Result<Self, Error> {
        for (k, v) in map {
            match k.as_str() {
                "fundamental" => self.fundamental = *v,
                "ode" => self.ode = *v,
                "pde" => self.pde = *v,
                "hessian_identity" => self.hessian_identity = *v,
                "mu_rel_var" => self.mu_rel_var = *v,
                "scalar" => self.scalar = *v,
                other => {
                    return Err(Error::Constraint(format!("unknown tolerance key '{other}'")))
                }
            }
        }
        Ok(self)
    }
}

/// A fully resolved job: model, profile, sample grid, gate thresholds.
pub struct Job {
    pub params: ModelParams,
    pub profile: Profile1D,
    pub grid: Vec<f64>,
    pub tolerances: Tolerances,
}

fn get_const(map: &BTreeMap<String, f64>, key: &str, default: f64) -> f64 {
    map.get(key).copied().unwrap_or(default)
}

fn require_const(map: &BTreeMap<String, f64>, key: &str, family: &str) -> Result<f64, Error> {
    map.get(key)
        .copied()
        .ok_or_else(|| Error::Constraint(format!("family {family} requires constant {key}")))
}

fn known_keys(family: Family) -> &'static [&'static str] {
    match family {
        Family::Thm11 => &["C1", "C2", "C3", "C4", "branch", "C1_u", "C2_u", "C3_u", "C4_u"],
        Family::Homothetic => &["gamma", "a", "b"],
        Family::Example14 => &["C", "C2", "C3"],
        Family::QuadM1 => &["C", "C1", "C2", "C3", "phi0", "xi0"],
        Family::QuadMgt1 => &["C", "C1", "C2", "C3", "phi0", "xi0", "corrected"],
    }
}

impl JobConfig {
    /// The parameter `m` the family forces, if any.
    pub fn forced_m(family: Family, n: usize) -> Option<f64> {
        match family {
            Family::Thm11 => Some(closed_form::exp_power_m(n)),
            Family::Example14 | Family::QuadM1 => Some(1.0),
            Family::Homothetic | Family::QuadMgt1 => None,
        }
    }

    /// Effective `m` after family rules.
    pub fn effective_m(&self) -> Result<f64, Error> {
        match (Self::forced_m(self.family, self.n), self.m) {
            (Some(forced), None) => Ok(forced),
            (Some(forced), Some(given)) => {
                if (given - forced).abs() > 1e-12 {
                    Err(Error::Constraint(format!(
                        "family {} forces m = {forced}, got {given}",
                        self.family.name()
                    )))
                } else {
                    Ok(forced)
                }
            }
            (None, Some(given)) => Ok(given),
            (None, None) => Err(Error::Constraint(format!(
                "family {} requires --m",
                self.family.name()
            ))),
        }
    }

    fn default_grid(&self, profile: &Profile1D, margin: f64) -> XiGrid {
        // 50 points spanning a window inside the first interval, away from
        // the finite endpoints
        let (a, b) = profile.intervals()[0];
        let lo = if a.is_finite() { a + margin } else { b.min(0.0) - 2.0 - margin };
        let hi = if b.is_finite() { (b - margin).min(lo + 2.0) } else { lo + 2.0 };
        XiGrid { min: lo, max: hi, count: 50, margin }
    }

    /// Resolve the configuration into a runnable job.
    pub fn build(&self) -> Result<Job, Error> {
        if self.n < 3 {
            return Err(Error::Constraint(format!("dimension n = {} must be >= 3", self.n)));
        }
        for key in self.constants.keys() {
            if !known_keys(self.family).contains(&key.as_str()) {
                return Err(Error::Constraint(format!(
                    "unknown constant '{key}' for family {}",
                    self.family.name()
                )));
            }
        }
        let m = self.effective_m()?;
        let c = &self.constants;
        let profile = match self.family {
            Family::Thm11 => {
                let branch = if get_const(c, "branch", 1.0) >= 0.0 { Branch::Plus } else { Branch::Minus };
                let phi_consts = ExpPowerConstants::new(
                    get_const(c, "C1", 0.0),
                    get_const(c, "C2", 1.0),
                    get_const(c, "C3", 1.0),
                    get_const(c, "C4", 1.0),
                    branch,
                )?;
                let phi_side = closed_form::exp_power_profile(self.n, &phi_consts)?;
                let u_keys = ["C1_u", "C2_u", "C3_u", "C4_u"];
                if u_keys.iter().any(|k| c.contains_key(*k)) {
                    // u-side overrides build a deliberately mismatched pair
                    let u_consts = ExpPowerConstants::new(
                        get_const(c, "C1_u", phi_consts.c1),
                        get_const(c, "C2_u", phi_consts.c2),
                        get_const(c, "C3_u", phi_consts.c3),
                        get_const(c, "C4_u", phi_consts.c4),
                        branch,
                    )?;
                    let u_side = closed_form::exp_power_profile(self.n, &u_consts)?;
                    Profile1D::splice(&phi_side, &u_side)?
                } else {
                    phi_side
                }
            }
            Family::Homothetic => closed_form::homothetic_profile(
                get_const(c, "gamma", 1.0),
                get_const(c, "a", 1.0),
                get_const(c, "b", 0.0),
            )?,
            Family::Example14 => closed_form::power_law_profile(
                self.n,
                get_const(c, "C", 1.0),
                get_const(c, "C2", 1.0),
                get_const(c, "C3", 0.0),
            )?,
            Family::QuadM1 | Family::QuadMgt1 => {
                let k = if self.family == Family::QuadMgt1 {
                    if m <= 1.0 {
                        return Err(Error::Constraint(format!(
                            "family quad_mgt1 requires m > 1, got {m}"
                        )));
                    }
                    if get_const(c, "corrected", 0.0) != 0.0 {
                        quadrature::corrected_constants(self.n, m)?
                    } else {
                        quadrature::constants(self.n, m)?
                    }
                } else {
                    quadrature::constants(self.n, 1.0)?
                };
                let c1 = if self.family == Family::QuadMgt1 {
                    require_const(c, "C1", "quad_mgt1")?
                } else {
                    get_const(c, "C1", 0.0)
                };
                let c2 = get_const(c, "C2", 1.0);
                let c3 = get_const(c, "C3", 0.0);
                let k = k.with_integration_constants(get_const(c, "C", 1.0), c1, c2, c3)?;
                let phi0 = get_const(c, "phi0", if self.family == Family::QuadMgt1 { 1.5 } else { 1.0 });
                let xi0 = get_const(c, "xi0", -c3 / c2);
                let grid = self.xi_grid.clone().unwrap_or(XiGrid {
                    min: xi0 - 0.05,
                    max: xi0 + 0.2,
                    count: 50,
                    margin: DEFAULT_MARGIN,
                });
                quadrature::invert_profile(&k, (grid.min - 1e-9, grid.max + 1e-9), phi0, xi0, false)?
            }
        };

        let margin = self.xi_grid.as_ref().map(|g| g.margin).unwrap_or(DEFAULT_MARGIN);
        if margin < 0.0 {
            return Err(Error::Constraint(format!("margin {margin} must be >= 0")));
        }
        let grid_cfg = match &self.xi_grid {
            Some(g) => g.clone(),
            None if self.family == Family::Example14 => {
                // u grows like 1/(|C2| dist); stand the default window off
                // the singular plane far enough to keep mu well conditioned
                let c2 = get_const(c, "C2", 1.0);
                let edge = profile.intervals()[0].1;
                let standoff = margin.max(0.35 / c2.abs());
                XiGrid { min: edge - standoff - 2.0, max: edge - standoff, count: 50, margin }
            }
            None => self.default_grid(&profile, margin),
        };
        let grid = uniform_grid(grid_cfg.min, grid_cfg.max, grid_cfg.count)?;
        // quadrature profiles are only certified on the requested window, so
        // the margin check applies to the closed forms' singular loci
        if self.family != Family::QuadM1 && self.family != Family::QuadMgt1 {
            check_grid(&profile, &grid, grid_cfg.margin)?;
        } else {
            check_grid(&profile, &grid, 0.0)?;
        }

        let alpha = match &self.alpha {
            Some(v) => {
                if v.len() != self.n {
                    return Err(Error::Constraint(format!(
                        "alpha has {} components, expected {}",
                        v.len(),
                        self.n
                    )));
                }
                ModelParams::normalize_direction(v)?
            }
            None => {
                let mut a = vec![0.0; self.n];
                a[self.n - 1] = 1.0;
                a
            }
        };
        let params = ModelParams::new(self.n, m, 0.0, alpha)?;
        let tolerances = Tolerances::defaults(self.family).apply(&self.tolerances)?;
        Ok(Job { params, profile, grid, tolerances })
    }
}

/// Parse repeatable `KEY=VAL` pairs.
pub fn parse_kv(pairs: &[String]) -> Result<BTreeMap<String, f64>, Error> {
    let mut map = BTreeMap::new();
    for pair in pairs {
        let Some((k, v)) = pair.split_once('=') else {
            return Err(Error::Constraint(format!("expected KEY=VAL, got '{pair}'")));
        };
        let value: f64 = v
            .parse()
            .map_err(|_| Error::Constraint(format!("bad numeric value in '{pair}'")))?;
        map.insert(k.trim().to_string(), value);
    }
    Ok(map)
}
