//! Flat `key = value` run configuration.
//!
//! One setting per line, `#` starts a comment, unknown keys are errors.
//! Floats are written in shortest round-trip form, so a saved config
//! reproduces its run bit for bit.
//!
//! | key | meaning |
//! |---|---|
//! | `command` | echo of the invoking command line |
//! | `variant` | `mass` or `strip` |
//! | `x`, `y` | box extents `a, b` per axis; omit `y` for a line |
//! | `nx`, `ny` | interior nodes per axis |
//! | `lambda`, `nu`, `alpha_fraction` | model parameters |
//! | `nonlinearity` | `zero`, `saturating_cubic` or `cubic` |
//! | `forcing` | `none` or `bump` |
//! | `forcing_norm`, `forcing_radius` | `‖g‖` and bump radius |
//! | `initial` | `zero`, `bump` or `smooth` |
//! | `initial_radius` | bump radius (`bump`) or bound on `‖w₀‖_X` (`smooth`) |
//! | `initial_amplitude` | bump peak height |
//! | `seed` | RNG seed for `smooth` data |
//! | `t_end`, `dt` | horizon and step; `dt = auto` means `h_min / 2` |
//! | `stride`, `snapshot_stride` | observer strides in steps |
//! | `tail_radii` | comma-separated radii |
//! | `out` | output directory |

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{DomainKind, Grid, GridConfig, ScalarField};
use crate::integrate::ObserverConfig;
use crate::model::{ModelConfig, NonlinearitySpec, Variant};
use crate::phase::{lift, State};
use crate::random::{box_center, bump, normalized, rng, smooth_state};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Forcing {
    None,
    Bump,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Initial {
    Zero,
    Bump,
    Smooth,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub variant: Variant,
    pub x: (f64, f64),
    pub y: Option<(f64, f64)>,
    pub nx: usize,
    pub ny: usize,
    pub lambda: f64,
    pub nu: f64,
    pub alpha_fraction: f64,
    pub nonlinearity: NonlinearitySpec,
    pub forcing: Forcing,
    pub forcing_norm: f64,
    pub forcing_radius: f64,
    pub initial: Initial,
    pub initial_radius: f64,
    pub initial_amplitude: f64,
    pub seed: u64,
    pub t_end: f64,
    pub dt: Option<f64>,
    pub stride: usize,
    pub snapshot_stride: usize,
    pub tail_radii: Vec<f64>,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: String::new(),
            variant: Variant::MassTermWholeSpace,
            x: (-40.0, 40.0),
            y: None,
            nx: 1599,
            ny: 0,
            lambda: 1.0,
            nu: 2.0,
            alpha_fraction: 0.5,
            nonlinearity: NonlinearitySpec::Zero,
            forcing: Forcing::None,
            forcing_norm: 1.0,
            forcing_radius: 5.0,
            initial: Initial::Bump,
            initial_radius: 5.0,
            initial_amplitude: 1.0,
            seed: 0,
            t_end: 50.0,
            dt: None,
            stride: 1,
            snapshot_stride: 0,
            tail_radii: Vec::new(),
            out: PathBuf::from("out"),
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Config(format!("`{key}`: expected a finite number, got `{value}`")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: expected a nonnegative integer, got `{value}`")))
}

fn parse_pair(key: &str, value: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = value.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::Config(format!("`{key}`: expected `a, b`, got `{value}`")));
    }
    Ok((parse_f64(key, parts[0])?, parse_f64(key, parts[1])?))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", n + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        RunConfig::parse(&std::fs::read_to_string(path)?)
    }

    /// Applies one setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "command" => self.command = value.to_string(),
            "variant" => self.variant = value.parse()?,
            "x" => self.x = parse_pair(key, value)?,
            "y" => {
                self.y = if value == "none" {
                    None
                } else {
                    Some(parse_pair(key, value)?)
                };
            }
            "nx" => self.nx = parse_usize(key, value)?,
            "ny" => self.ny = parse_usize(key, value)?,
            "lambda" => self.lambda = parse_f64(key, value)?,
            "nu" => self.nu = parse_f64(key, value)?,
            "alpha_fraction" => self.alpha_fraction = parse_f64(key, value)?,
            "nonlinearity" => self.nonlinearity = value.parse()?,
            "forcing" => {
                self.forcing = match value {
                    "none" => Forcing::None,
                    "bump" => Forcing::Bump,
                    _ => return Err(Error::Config(format!("`forcing`: unknown value `{value}`"))),
                }
            }
            "forcing_norm" => self.forcing_norm = parse_f64(key, value)?,
            "forcing_radius" => self.forcing_radius = parse_f64(key, value)?,
            "initial" => {
                self.initial = match value {
                    "zero" => Initial::Zero,
                    "bump" => Initial::Bump,
                    "smooth" => Initial::Smooth,
                    _ => return Err(Error::Config(format!("`initial`: unknown value `{value}`"))),
                }
            }
            "initial_radius" => self.initial_radius = parse_f64(key, value)?,
            "initial_amplitude" => self.initial_amplitude = parse_f64(key, value)?,
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| Error::Config(format!("`seed`: expected an integer, got `{value}`")))?
            }
            "t_end" => self.t_end = parse_f64(key, value)?,
            "dt" => {
                self.dt = if value == "auto" {
                    None
                } else {
                    Some(parse_f64(key, value)?)
                }
            }
            "stride" => self.stride = parse_usize(key, value)?,
            "snapshot_stride" => self.snapshot_stride = parse_usize(key, value)?,
            "tail_radii" => {
                self.tail_radii = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_f64(key, s))
                    .collect::<Result<_>>()?
            }
            "out" => self.out = PathBuf::from(value),
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let pair = |p: (f64, f64)| format!("{:?}, {:?}", p.0, p.1);
        let _ = writeln!(s, "command = {}", self.command);
        let _ = writeln!(s, "variant = {}", self.variant.name());
        let _ = writeln!(s, "x = {}", pair(self.x));
        let _ = writeln!(s, "y = {}", self.y.map_or("none".to_string(), pair));
        let _ = writeln!(s, "nx = {}", self.nx);
        let _ = writeln!(s, "ny = {}", self.ny);
        let _ = writeln!(s, "lambda = {:?}", self.lambda);
        let _ = writeln!(s, "nu = {:?}", self.nu);
        let _ = writeln!(s, "alpha_fraction = {:?}", self.alpha_fraction);
        let _ = writeln!(s, "nonlinearity = {}", self.nonlinearity.name());
        let forcing = match self.forcing {
            Forcing::None => "none",
            Forcing::Bump => "bump",
        };
        let _ = writeln!(s, "forcing = {forcing}");
        let _ = writeln!(s, "forcing_norm = {:?}", self.forcing_norm);
        let _ = writeln!(s, "forcing_radius = {:?}", self.forcing_radius);
        let initial = match self.initial {
            Initial::Zero => "zero",
            Initial::Bump => "bump",
            Initial::Smooth => "smooth",
        };
        let _ = writeln!(s, "initial = {initial}");
        let _ = writeln!(s, "initial_radius = {:?}", self.initial_radius);
        let _ = writeln!(s, "initial_amplitude = {:?}", self.initial_amplitude);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "t_end = {:?}", self.t_end);
        let _ = writeln!(s, "dt = {}", self.dt.map_or("auto".to_string(), |d| format!("{d:?}")));
        let _ = writeln!(s, "stride = {}", self.stride);
        let _ = writeln!(s, "snapshot_stride = {}", self.snapshot_stride);
        let radii: Vec<String> = self.tail_radii.iter().map(|k| format!("{k:?}")).collect();
        let _ = writeln!(s, "tail_radii = {}", radii.join(", "));
        let _ = writeln!(s, "out = {}", self.out.display());
        s
    }

    pub fn grid_config(&self) -> GridConfig {
        let kind: DomainKind = self.variant.domain_kind();
        match self.y {
            None => GridConfig::line(kind, self.x.0, self.x.1, self.nx),
            Some(y) => GridConfig::plane(kind, self.x, y, (self.nx, self.ny)),
        }
    }

    pub fn grid(&self) -> Result<Arc<Grid>> {
        Grid::new(&self.grid_config())
    }

    pub fn model(&self, grid: &Arc<Grid>) -> Result<ModelConfig> {
        let g = match self.forcing {
            Forcing::None => ScalarField::zeros(grid),
            Forcing::Bump => normalized(&bump(grid, box_center(grid), self.forcing_radius))?.scaled(self.forcing_norm),
        };
        ModelConfig::new(
            self.variant,
            self.lambda,
            self.nu,
            self.alpha_fraction,
            self.nonlinearity.clone(),
            g,
        )
    }

    pub fn initial_state(&self, model: &ModelConfig) -> Result<State> {
        let grid = model.grid();
        let delta = model.constants().delta;
        match self.initial {
            Initial::Zero => Ok(State::zeros(grid)),
            Initial::Bump => {
                let u0 = bump(grid, box_center(grid), self.initial_radius).scaled(self.initial_amplitude);
                lift(&u0, &ScalarField::zeros(grid), delta)
            }
            Initial::Smooth => smooth_state(grid, self.variant, delta, self.initial_radius, &mut rng(self.seed, 0)),
        }
    }

    /// The configured step, or `h_min / 2`.
    pub fn resolved_dt(&self, grid: &Grid) -> f64 {
        self.dt.unwrap_or(0.5 * grid.min_spacing())
    }

    pub fn observer(&self) -> ObserverConfig {
        ObserverConfig {
            stride: self.stride,
            tail_radii: self.tail_radii.clone(),
            snapshot_stride: self.snapshot_stride,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let cfg = RunConfig {
            command: "dampwave simulate".into(),
            y: Some((0.0, std::f64::consts::PI)),
            ny: 31,
            lambda: 0.1 + 0.2,
            dt: Some(1.0 / 3.0),
            tail_radii: vec![20.0, 40.5],
            forcing: Forcing::Bump,
            initial: Initial::Smooth,
            seed: 17,
            ..RunConfig::default()
        };
        let back = RunConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.lambda.to_bits(), cfg.lambda.to_bits());
    }

    #[test]
    fn comments_and_blank_lines() {
        let cfg = RunConfig::parse("# run\n\nlambda = 2 # damping\nnx=99\n").unwrap();
        assert_eq!(cfg.lambda, 2.0);
        assert_eq!(cfg.nx, 99);
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(matches!(RunConfig::parse("lamda = 1"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::parse("lambda"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::parse("lambda = nan"), Err(Error::Config(_))));
    }

    #[test]
    fn builds_a_forced_model() {
        let cfg = RunConfig {
            nx: 199,
            x: (-10.0, 10.0),
            forcing: Forcing::Bump,
            forcing_norm: 2.0,
            ..RunConfig::default()
        };
        let grid = cfg.grid().unwrap();
        let model = cfg.model(&grid).unwrap();
        assert!((model.forcing_norm_sq() - 4.0).abs() < 1e-12);
        assert_eq!(cfg.resolved_dt(&grid), 0.05);
    }

    #[test]
    fn variant_grid_conflict_reported() {
        let cfg = RunConfig {
            variant: Variant::NoMassStrip,
            ..RunConfig::default()
        };
        let grid = Grid::new(&GridConfig::line(DomainKind::TruncatedWholeSpace, -1.0, 1.0, 9)).unwrap();
        assert!(cfg.model(&grid).is_err());
    }
}
