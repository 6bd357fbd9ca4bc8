//! Verification suites: fixed experiment configurations wired to the checks.
//!
//! Every suite has a negative control that perturbs what is being claimed
//! (a constant, a radius, a hypothesis) so that the suite must fail; a suite
//! whose negative control passes is vacuous.

use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::attract::{
    attraction_curve, attractor_approximate, epsilon_net, hausdorff_semidistance, invariance_defect,
    sampling_resolution, seeded_initial, steady_state, AttractorConfig, Ensemble,
};
use crate::diagnose::{
    absorbing_check_scaled, decay_check, dissipative_inequality_check, energy_identity_check, gronwall_verify,
    max_energy_increase, quiet_window_check, tail_check, CheckReport,
};
use crate::error::{Error, Result};
use crate::geometry::{
    dirichlet_eigenvalue, dirichlet_eigenvalue_1d, dirichlet_mode, l2_inner, poincare_constant, DomainKind, Grid,
    GridConfig, ScalarField,
};
use crate::integrate::{linear_mode_oracle, simulate, simulate_with, step_count, ObserverConfig, Stepper, TimeSeries};
use crate::model::{
    absorbing_radius_and_time, verify_growth_conditions, Corruption, ModelConfig, NonlinearitySpec, Variant,
    DEFAULT_RATIO_CAP,
};
use crate::phase::{accretivity_form, lift, State};
use crate::random::{bump, modal_probe, normalized, probe_ratios, rng, smooth_state, unit_state};

/// Allowed negative excess in the accretivity inequality.
pub const ACCRETIVITY_TOL: f64 = 1e-10;
/// Tolerance on the constants identity.
pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Accretivity,
    Energy,
    Decay,
    Absorbing,
    Tail,
    Gronwall,
    Poincare,
    Nonlinearity,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Accretivity,
        Suite::Energy,
        Suite::Decay,
        Suite::Absorbing,
        Suite::Tail,
        Suite::Gronwall,
        Suite::Poincare,
        Suite::Nonlinearity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Accretivity => "accretivity",
            Suite::Energy => "energy",
            Suite::Decay => "decay",
            Suite::Absorbing => "absorbing",
            Suite::Tail => "tail",
            Suite::Gronwall => "gronwall",
            Suite::Poincare => "poincare",
            Suite::Nonlinearity => "nonlinearity",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteOptions {
    /// Damping values swept by the accretivity suite; the first one drives
    /// the single-run suites.
    pub lambdas: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    #[serde(skip)]
    pub corruption: Corruption,
    pub negative_control: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            lambdas: vec![0.5, 1.0, 2.0, 4.0],
            samples: 1000,
            seed: 7,
            corruption: Corruption::default(),
            negative_control: false,
        }
    }
}

impl SuiteOptions {
    fn run_lambda(&self) -> f64 {
        if self.lambdas.len() == 1 {
            self.lambdas[0]
        } else {
            1.0
        }
    }

    fn corrupt(&self, model: ModelConfig) -> ModelConfig {
        model.with_corruption(self.corruption)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub reports: Vec<CheckReport>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        !self.reports.is_empty() && self.reports.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckReport> {
        self.reports.iter().filter(|r| !r.passed)
    }
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<SuiteOutcome> {
    let reports = match suite {
        Suite::Accretivity => accretivity(opts)?,
        Suite::Energy => energy(opts)?,
        Suite::Decay => decay(opts)?,
        Suite::Absorbing => absorbing(opts)?,
        Suite::Tail => tail(opts)?,
        Suite::Gronwall => gronwall(opts)?,
        Suite::Poincare => poincare(opts)?,
        Suite::Nonlinearity => nonlinearity(opts)?,
    };
    Ok(SuiteOutcome { suite, reports })
}

fn scaled(base: Corruption, negative: bool, f: impl Fn(&mut Corruption)) -> Corruption {
    let mut c = base;
    if negative {
        f(&mut c);
    }
    c
}

/// The grids of the accretivity sweep: both variants in 1D and 2D.
pub fn accretivity_grids() -> Result<Vec<(String, Variant, Arc<Grid>)>> {
    let pi = std::f64::consts::PI;
    Ok(vec![
        (
            "mass-1d".into(),
            Variant::MassTermWholeSpace,
            Grid::new(&GridConfig::line(DomainKind::TruncatedWholeSpace, -40.0, 40.0, 1023))?,
        ),
        (
            "strip-1d".into(),
            Variant::NoMassStrip,
            Grid::new(&GridConfig::line(DomainKind::Strip, 0.0, pi, 1023))?,
        ),
        (
            "mass-2d".into(),
            Variant::MassTermWholeSpace,
            Grid::new(&GridConfig::plane(
                DomainKind::TruncatedWholeSpace,
                (-20.0, 20.0),
                (-20.0, 20.0),
                (127, 127),
            ))?,
        ),
        (
            "strip-2d".into(),
            Variant::NoMassStrip,
            Grid::new(&GridConfig::plane(
                DomainKind::Strip,
                (0.0, pi),
                (-20.0, 20.0),
                (127, 127),
            ))?,
        ),
    ])
}

/// `4(δ−σ)(λ/2−δ−σ) = λ²δ²`, `0 < δ²−λδ+1 < 1`, `λ − 3δ > 0` for the
/// constants as the diagnostics see them.
pub fn constants_check(model: &ModelConfig) -> CheckReport {
    let c = model.audit_constants();
    let (l, d, s) = (c.lambda, c.delta, c.sigma);
    let identity = 4.0 * (d - s) * (0.5 * l - d - s) - l * l * d * d;
    let weight = d * d - l * d + 1.0;
    let margin = (IDENTITY_TOL - identity.abs())
        .min(weight)
        .min(1.0 - weight)
        .min(l - 3.0 * d);
    CheckReport::from_margin(&format!("constants[lambda={l}]"), margin)
        .measure("identity_defect", identity)
        .measure("weight", weight)
        .measure("lambda_minus_3delta", l - 3.0 * d)
}

/// Smallest `⟨G_h w, w⟩_X − σ‖w‖²_X − (λ/2)‖v‖²` over seeded random unit
/// states and the modal probes.
#[allow(clippy::too_many_arguments)]
fn accretivity_on_grid(
    label: &str,
    variant: Variant,
    grid: &Arc<Grid>,
    lambda: f64,
    li: u64,
    gi: u64,
    opts: &SuiteOptions,
    corruption: Corruption,
) -> Result<CheckReport> {
    let model = ModelConfig::unforced(variant, grid, lambda, 2.0, NonlinearitySpec::Zero)?.with_corruption(corruption);
    let random: Vec<f64> = (0..opts.samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng(opts.seed, (li << 40) | (gi << 32) | i);
            let w = unit_state(grid, variant, &mut r);
            let (lhs, bound) = accretivity_form(&w, &model);
            lhs - bound
        })
        .collect();
    let probes: Vec<f64> = probe_ratios()
        .into_iter()
        .map(|s| {
            let w = modal_probe(grid, variant, s)?;
            let (lhs, bound) = accretivity_form(&w, &model);
            Ok(lhs - bound)
        })
        .collect::<Result<_>>()?;
    let worst_random = random.iter().copied().fold(f64::INFINITY, f64::min);
    let worst_probe = probes.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(CheckReport::from_margin(
        &format!("accretivity[{label},lambda={lambda}]"),
        worst_random.min(worst_probe) + ACCRETIVITY_TOL,
    )
    .measure("min_random_excess", worst_random)
    .measure("min_probe_excess", worst_probe)
    .with_config("samples", opts.samples)
    .with_config("seed", opts.seed))
}

fn accretivity(opts: &SuiteOptions) -> Result<Vec<CheckReport>> {
    let corruption = scaled(opts.corruption, opts.negative_control, |c| c.sigma_scale *= 1.5);
    let grids = accretivity_grids()?;
    let mut reports = Vec::new();
    for (li, &lambda) in opts.lambdas.iter().enumerate() {
        let probe_grid = &grids[0].2;
        let model = ModelConfig::unforced(
            Variant::MassTermWholeSpace,
            probe_grid,
            lambda,
            2.0,
            NonlinearitySpec::Zero,
        )?
        .with_corruption(corruption);
        reports.push(constants_check(&model));
        for (gi, (label, variant, grid)) in grids.iter().enumerate() {
            reports.push(accretivity_on_grid(
                label, *variant, grid, lambda, li as u64, gi as u64, opts, corruption,
            )?);
        }
    }
    Ok(reports)
}

/// The homogeneous linear decay run on `[−40, 40]`, `n = 1599`, bump radius 5.
pub fn decay_setup(lambda: f64) -> Result<(ModelConfig, State)> {
    let grid = Grid::new(&GridConfig::line(DomainKind::TruncatedWholeSpace, -40.0, 40.0, 1599))?;
    let model = ModelConfig::unforced(Variant::MassTermWholeSpace, &grid, lambda, 2.0, NonlinearitySpec::Zero)?;
    let u0 = bump(&grid, [0.0, 0.0], 5.0);
    let w0 = lift(&u0, &ScalarField::zeros(&grid), model.constants().delta)?;
    Ok((model, w0))
}

/// A small 2D strip run exercising the strip energy rate.
pub fn strip_setup(lambda: f64) -> Result<(ModelConfig, State)> {
    let pi = std::f64::consts::PI;
    let grid = Grid::new(&GridConfig::plane(
        DomainKind::Strip,
        (0.0, pi),
        (-10.0, 10.0),
        (31, 199),
    ))?;
    let model = ModelConfig::unforced(Variant::NoMassStrip, &grid, lambda, 2.0, NonlinearitySpec::Zero)?;
    // lowest cross-section mode times a wide bump along the strip
    let along = bump(&grid, [0.0, 0.0], 4.0);
    let u0 = ScalarField::from_fn(&grid, |x| x[0].sin());
    let u0 = ScalarField::from_values(
        &grid,
        u0.values().iter().zip(along.values()).map(|(a, b)| a * b).collect(),
    )?;
    let w0 = lift(&u0, &ScalarField::zeros(&grid), model.constants().delta)?;
    Ok((model, w0))
}

/// Runs at `dt = h/d, h/2d, h/4d`.
fn halving_runs(model: &ModelConfig, w0: &State, t_end: f64, d: f64) -> Result<Vec<TimeSeries>> {
    let h = model.grid().min_spacing();
    [d, 2.0 * d, 4.0 * d]
        .par_iter()
        .map(|k| Ok(simulate(w0, model, t_end, h / k, &ObserverConfig::default())?.series))
        .collect()
}

fn energy(opts: &SuiteOptions) -> Result<Vec<CheckReport>> {
    let corruption = scaled(opts.corruption, opts.negative_control, |c| c.flux_scale *= 1.5);
    let lambda = opts.run_lambda();
    let mut reports = Vec::new();
    // the strip run is still pre-asymptotic at dt = h, so it starts at h/2
    for (label, (model, w0), t_end, d) in [
        ("mass-1d", decay_setup(lambda)?, 50.0, 1.0),
        ("strip-2d", strip_setup(lambda)?, 5.0, 2.0),
    ] {
        let model = model.with_corruption(corruption);
        let runs = halving_runs(&model, &w0, t_end, d)?;
        let mut r = energy_identity_check(&runs, &model);
        r.name = format!("energy_identity[{label}]");
        reports.push(r);
    }
    Ok(reports)
}

/// Largest `|a_h(t) − a(t)|` over the run for the lowest mode with unit
/// displacement and zero velocity, `a_h` the projection of the numerical `u`.
pub fn mode_oracle_error(model: &ModelConfig, dt: f64, t_end: f64) -> Result<f64> {
    let grid = model.grid();
    let modes = vec![1; grid.dim()];
    let phi = dirichlet_mode(grid, &modes)?;
    let phi_sq = phi.l2_norm_sq();
    let c = model.constants();
    let w0 = lift(&phi, &ScalarField::zeros(grid), c.delta)?;
    let stepper = Stepper::new(model, dt)?;
    let steps = step_count(t_end, dt);
    let mut w = w0;
    let mut worst: f64 = 0.0;
    for k in 1..=steps {
        w = stepper.advance(&w, 1)?;
        let t = k as f64 * dt;
        let (exact, _) = linear_mode_oracle(&modes, grid, c.lambda, model.variant.mass(), t, (1.0, 0.0))?;
        let coeff = l2_inner(&w.u, &phi)? / phi_sq;
        worst = worst.max((coeff - exact).abs());
    }
    Ok(worst)
}

/// Oracle errors at `dt = h, h/2, h/4` and the observed orders.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleStudy {
    /// `(dt, error)` pairs, coarsest first.
    pub errors: Vec<(f64, f64)>,
    pub orders: Vec<f64>,
}

pub fn mode_oracle_study(model: &ModelConfig, t_end: f64) -> Result<OracleStudy> {
    let h = model.grid().min_spacing();
    let errors: Vec<(f64, f64)> = [1.0, 2.0, 4.0]
        .par_iter()
        .map(|k| Ok((h / k, mode_oracle_error(model, h / k, t_end)?)))
        .collect::<Result<_>>()?;
    let orders = errors.windows(2).map(|e| (e[0].1 / e[1].1).log2()).collect();
    Ok(OracleStudy { errors, orders })
}

fn decay(opts: &SuiteOptions) -> Result<Vec<CheckReport>> {
    let corruption = scaled(opts.corruption, opts.negative_control, |c| c.delta_scale *= 1.5);
    let lambda = opts.run_lambda();
    let (model, w0) = decay_setup(lambda)?;
    let model = model.with_corruption(corruption);
    let h = model.grid().min_spacing();
    let t_end = 50.0;
    let mut reports = Vec::new();

    let run = simulate(&w0, &model, t_end, 0.5 * h, &ObserverConfig::default())?;
    reports.push(decay_check(&run.series, &model));
    reports.push(dissipative_inequality_check(&run.series, &model));

    for factor in [1.0, 10.0] {
        let stepper = Stepper::new_unchecked(&model, factor * h)?;
        let series = simulate_with(&stepper, &w0, t_end, &ObserverConfig::default())?.series;
        let rise = max_energy_increase(&series)?;
        // allow one rounding of E per step
        reports.push(
            CheckReport::from_margin(&format!("monotone_energy[dt={factor}h]"), 1e-14 - rise)
                .measure("max_relative_increase", rise),
        );
    }

    let OracleStudy { errors, orders } = mode_oracle_study(&model, t_end)?;
    let worst = orders.iter().copied().fold(f64::INFINITY, f64::min);
    let mut r = CheckReport::from_margin("mode_oracle_order", worst - crate::diagnose::MIN_ORDER);
    for (i, (dt, e)) in errors.iter().enumerate() {
        r = r.measure(&format!("dt_{i}"), *dt).measure(&format!("error_{i}"), *e);
    }
    reports.push(r);
    Ok(reports)
}

/// Forced saturating run of the absorbing-ball experiment.
pub fn absorbing_setup(lambda: f64) -> Result<ModelConfig> {
    let grid = Grid::new(&GridConfig::line(DomainKind::TruncatedWholeSpace, -40.0, 40.0, 799))?;
    let g = normalized(&bump(&grid, [0.0, 0.0], 5.0))?;
    ModelConfig::new(
        Variant::MassTermWholeSpace,
        lambda,
        2.0,
        0.5,
        NonlinearitySpec::SaturatingCubic,
        g,
    )
}

pub const ABSORBING_RADIUS: f64 = 10.0;
pub const ABSORBING_MEMBERS: u64 = 8;

pub fn absorbing_runs(model: &ModelConfig, seed: u64) -> Result<Vec<TimeSeries>> {
    let est = absorbing_radius_and_time(model, ABSORBING_RADIUS)?;
    let t_end = (6.0 * est.entry_time).max(20.0);
    let dt = 0.5 * model.grid().min_spacing();
    let delta = model.constants().delta;
    (0..ABSORBING_MEMBERS)
        .into_par_iter()
        .map(|i| {
            let w0 = smooth_state(
                model.grid(),
                model.variant,
                delta,
                ABSORBING_RADIUS,
                &mut rng(seed + i, 0),
            )?;
            Ok(simulate(&w0, model, t_end, dt, &ObserverConfig::default())?.series)
        })
        .collect()
}

fn absorbing(opts: &SuiteOptions) -> Result<Vec<CheckReport>> {
    let model = opts.corrupt(absorbing_setup(opts.run_lambda())?);
    let runs = absorbing_runs(&model, opts.seed)?;
    let ball = if opts.negative_control { 1e-3 } else { 1.0 };
    let mut reports = vec![absorbing_check_scaled(&runs, &model, ABSORBING_RADIUS, ball)];
    for (i, s) in runs.iter().enumerate() {
        let mut r = dissipative_inequality_check(s, &model);
        r.name = format!("dissipative_inequality[member={i}]");
        reports.push(r);
    }
    Ok(reports)
}

pub const TAIL_RADII: [f64; 3] = [20.0, 40.0, 60.0];

/// Bump of radius 5 on `[−80, 80]` with the saturating nonlinearity.
pub fn tail_setup(lambda: f64) -> Result<(ModelConfig, State)> {
    let grid = Grid::new(&GridConfig::line(DomainKind::TruncatedWholeSpace, -80.0, 80.0, 1599))?;
    let model = ModelConfig::unforced(
        Variant::MassTermWholeSpace,
        &grid,
        lambda,
        2.0,
        NonlinearitySpec::SaturatingCubic,
    )?;
    let u0 = bump(&grid, [0.0, 0.0], 5.0);
    let w0 = lift(&u0, &ScalarField::zeros(&grid), model.constants().delta)?;
    Ok((model, w0))
}

pub fn tail_run(model: &ModelConfig, w0: &State) -> Result<TimeSeries> {
    let obs = ObserverConfig {
        stride: 1,
        tail_radii: TAIL_RADII.to_vec(),
        snapshot_stride: 0,
    };
    Ok(simulate(w0, model, 70.0, 0.5 * model.grid().min_spacing(), &obs)?.series)
}

fn tail(opts: &SuiteOptions) -> Result<Vec<CheckReport>> {
    let (model, w0) = tail_setup(opts.run_lambda())?;
    let model = opts.corrupt(model);
    let series = tail_run(&model, &w0)?;
    let e0 = series.samples[0].energy;
    let mut reports = vec![tail_check(&series, model.grid(), 1e-3 * e0)];
    // support radius 5, unit speed, one unit of slack for the scheme's leakage
    let speed = if opts.negative_control { 0.5 } else { 1.0 };
    for k in TAIL_RADII {
        let until = (k - 6.0) / speed;
        let mut r = quiet_window_check(&series, k, until);
        r.name = format!("finite_speed[k={k}]");
        reports.push(r);
    }
    Ok(reports)
}

fn gronwall(opts: &SuiteOptions) -> Result<Vec<CheckReport>> {
    let dt = 0.01;
    let n = 1001;
    let times: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
    let decay_rate = if opts.negative_control { -2.0 } else { -1.0 };
    let cases: [(&str, Vec<f64>, f64, f64, bool); 3] = [
        (
            "saturating",
            times.iter().map(|t| (-t).exp()).collect(),
            decay_rate,
            0.0,
            true,
        ),
        ("zero", vec![0.0; n], 0.0, 0.0, true),
        (
            "forced",
            times.iter().map(|t| 2.0 * (-t).exp() + 1.0).collect(),
            -1.0,
            1.0,
            true,
        ),
    ];
    let mut reports = Vec::new();
    for (label, y, g, h, tight) in cases {
        let mut r = gronwall_verify(dt, &y, &vec![g; n], &vec![h; n]);
        r.name = format!("gronwall[{label}]");
        let tightness = r.measured.get("tightness").copied();
        reports.push(r);
        if let (true, Some(t)) = (tight, tightness) {
            reports.push(
                CheckReport::from_margin(&format!("gronwall_equality[{label}]"), dt * dt - t).measure("tightness", t),
            );
        }
    }

    // a forced run's recorded dissipative inequality, fed to the Gronwall check
    let grid = Grid::new(&GridConfig::line(DomainKind::TruncatedWholeSpace, -20.0, 20.0, 399))?;
    let g = normalized(&bump(&grid, [0.0, 0.0], 5.0))?;
    let model = opts.corrupt(ModelConfig::new(
        Variant::MassTermWholeSpace,
        opts.run_lambda(),
        2.0,
        0.5,
        NonlinearitySpec::SaturatingCubic,
        g,
    )?);
    let c = model.audit_constants();
    let w0 = smooth_state(&grid, model.variant, c.delta, 5.0, &mut rng(opts.seed, 0))?;
    let series = simulate(&w0, &model, 10.0, 0.05, &ObserverConfig::default())?.series;
    let y: Vec<f64> = series
        .samples
        .iter()
        .map(|s| s.x2 + s.extras.map_or(0.0, |e| e.potential))
        .collect();
    let m = y.len();
    let mut r = gronwall_verify(0.05, &y, &vec![-c.mu; m], &vec![model.forcing_norm_sq() / c.alpha; m]);
    r.name = "gronwall[trajectory]".into();
    reports.push(r);
    Ok(reports)
}

fn poincare(opts: &SuiteOptions) -> Result<Vec<CheckReport>> {
    let pi = std::f64::consts::PI;
    let width = if opts.negative_control { 1.1 * pi } else { pi };
    let mut reports = Vec::new();

    let n = 999;
    let grid = Grid::new(&GridConfig::line(DomainKind::Strip, 0.0, pi, n))?;
    let est = poincare_constant(&grid, true)?;
    let h = width / (n as f64 + 1.0);
    let closed = 1.0 / dirichlet_eigenvalue_1d(h, n, 1).sqrt();
    let continuum = width / pi;
    let d_closed = (est.constant - closed).abs();
    let d_cont = (est.constant - continuum).abs();
    reports.push(
        CheckReport::from_margin("poincare[strip-1d]", (1e-4 - d_closed).min(1e-2 - d_cont))
            .measure("C_h", est.constant)
            .measure("closed_form", closed)
            .measure("continuum", continuum)
            .measure("iterations", est.iterations as f64),
    );

    let grid = Grid::new(&GridConfig::plane(
        DomainKind::Strip,
        (0.0, width),
        (-5.0, 5.0),
        (31, 99),
    ))?;
    let est = poincare_constant(&grid, true)?;
    let expected = dirichlet_eigenvalue(&grid, &[1, 1]);
    let rel = (est.lambda_min - expected).abs() / expected;
    reports.push(
        CheckReport::from_margin("poincare[strip-2d]", 1e-8 - rel)
            .measure("lambda_min", est.lambda_min)
            .measure("separable", expected),
    );

    let whole = Grid::new(&GridConfig::line(DomainKind::TruncatedWholeSpace, -5.0, 5.0, 99))?;
    let strict = poincare_constant(&whole, true);
    let relaxed = poincare_constant(&whole, false)?;
    let ok = matches!(strict, Err(Error::Unsupported(_))) && relaxed.whole_space_warning;
    reports.push(CheckReport::from_margin(
        "poincare[whole-space-flagged]",
        if ok { 0.0 } else { -1.0 },
    ));
    Ok(reports)
}

fn nonlinearity(opts: &SuiteOptions) -> Result<Vec<CheckReport>> {
    let samples = opts.samples.max(1000);
    let mut reports = Vec::new();
    let accepted = if opts.negative_control {
        vec![NonlinearitySpec::SaturatingCubic, NonlinearitySpec::Cubic]
    } else {
        vec![NonlinearitySpec::SaturatingCubic, NonlinearitySpec::Zero]
    };
    for spec in accepted {
        let rep = verify_growth_conditions(&spec, 2.0, (-50.0, 50.0), samples, DEFAULT_RATIO_CAP)?;
        reports.push(
            CheckReport::from_margin(
                &format!("growth_conditions[{}]", spec.name()),
                if rep.passed { 0.0 } else { -1.0 },
            )
            .measure("min_sign_margin", rep.min_sign_margin)
            .measure("max_ratio", rep.max_ratio)
            .measure("max_primitive_defect", rep.max_primitive_defect),
        );
    }
    if !opts.negative_control {
        let rep = verify_growth_conditions(&NonlinearitySpec::Cubic, 2.0, (-50.0, 50.0), samples, DEFAULT_RATIO_CAP)?;
        reports.push(
            CheckReport::from_margin("rejects[cubic]", if rep.passed { -1.0 } else { 0.0 })
                .measure("max_ratio", rep.max_ratio),
        );
    }
    Ok(reports)
}

/// Relative floor on set-level comparisons of converged attractor samples.
pub const ATTRACTOR_TOL: f64 = 1e-6;

/// Grid, forcing and ensemble layout of the attractor experiment.
pub fn attractor_grid() -> Result<Arc<Grid>> {
    Grid::new(&GridConfig::line(DomainKind::TruncatedWholeSpace, -40.0, 40.0, 799))
}

/// Output of [`attractor_experiment`]: the reports and the forced nonlinear
/// attractor sample.
pub struct AttractorOutcome {
    pub reports: Vec<CheckReport>,
    pub ensemble: Ensemble,
    pub model: ModelConfig,
}

/// Attractor sanity checks on three models sharing one grid:
///
/// * homogeneous linear: the sample collapses to 0 at rate `e^{−δ T_tr}`;
/// * forced linear: the sample matches the directly solved steady state;
/// * forced saturating: invariance defects within the sampling resolution,
///   ε-net size stable when the sample doubles, members inside the
///   absorbing ball, seed sets mutually close, and attraction of the seeded
///   initial data.
///
/// The negative control shortens the transient to `2T₁`.
pub fn attractor_experiment(opts: &SuiteOptions, transient: f64) -> Result<AttractorOutcome> {
    let grid = attractor_grid()?;
    let variant = Variant::MassTermWholeSpace;
    let lambda = opts.run_lambda();
    let forcing = normalized(&bump(&grid, [0.0, 0.0], 5.0))?;
    let dt = 0.5 * grid.min_spacing();
    let seeds: Vec<u64> = (opts.seed..opts.seed + ABSORBING_MEMBERS).collect();
    let stride = step_count(1.0, dt);
    let base = AttractorConfig {
        seeds: seeds.clone(),
        radius: ABSORBING_RADIUS,
        transient,
        sample_time: 10.0,
        stride,
        dt,
    };
    let mut reports = Vec::new();

    let homogeneous = opts.corrupt(ModelConfig::unforced(
        variant,
        &grid,
        lambda,
        2.0,
        NonlinearitySpec::Zero,
    )?);
    let a = attractor_approximate(&homogeneous, &base)?;
    let c = homogeneous.audit_constants();
    // ‖w‖²_X ≤ E/(δ²−λδ+1) and E(0) ≤ ‖w₀‖²_X ≤ R²
    let bound = ABSORBING_RADIUS * (-c.delta * transient).exp() / c.energy_weight().sqrt();
    let zero = Ensemble::from_states(vec![State::zeros(&grid)])?;
    let h0 = hausdorff_semidistance(&a, &zero, variant)?;
    reports.push(
        CheckReport::from_margin("attractor[homogeneous]", (bound - h0) / bound)
            .measure("distance_to_zero", h0)
            .measure("bound", bound),
    );

    let linear = opts.corrupt(ModelConfig::new(
        variant,
        lambda,
        2.0,
        0.5,
        NonlinearitySpec::Zero,
        forcing.clone(),
    )?);
    let a = attractor_approximate(&linear, &base)?;
    let star = Ensemble::from_states(vec![steady_state(&linear)?])?;
    let d = hausdorff_semidistance(&a, &star, variant)?.max(hausdorff_semidistance(&star, &a, variant)?);
    reports.push(
        CheckReport::from_margin("attractor[forced-linear]", (ATTRACTOR_TOL - d) / ATTRACTOR_TOL)
            .measure("distance_to_steady_state", d),
    );

    let model = opts.corrupt(ModelConfig::new(
        variant,
        lambda,
        2.0,
        0.5,
        NonlinearitySpec::SaturatingCubic,
        forcing,
    )?);
    let est = absorbing_radius_and_time(&model, ABSORBING_RADIUS)?;
    let transient = if opts.negative_control {
        2.0 * est.entry_time
    } else {
        transient
    };
    let cfg = AttractorConfig {
        transient,
        ..base.clone()
    };
    let a = attractor_approximate(&model, &cfg)?;
    let floor = ATTRACTOR_TOL * est.radius_sq.sqrt();
    let resolution = sampling_resolution(&a, variant).max(floor);
    let (fwd, bwd) = invariance_defect(&a, &model, dt, cfg.sample_time)?;
    reports.push(
        CheckReport::from_margin(
            "invariance[forced-saturating]",
            (resolution - fwd.max(bwd)) / resolution,
        )
        .measure("forward", fwd)
        .measure("backward", bwd)
        .measure("resolution", resolution)
        .measure("transient", transient),
    );

    let eps = 0.05 * est.radius_sq.sqrt();
    let doubled = attractor_approximate(
        &model,
        &AttractorConfig {
            sample_time: 2.0 * cfg.sample_time,
            ..cfg.clone()
        },
    )?;
    let (_, n1) = epsilon_net(&a, eps, variant)?;
    let (_, n2) = epsilon_net(&doubled, eps, variant)?;
    let ratio = n2 as f64 / n1 as f64;
    reports.push(
        CheckReport::from_margin("epsilon_net_ratio", 1.25 - ratio)
            .measure("eps", eps)
            .measure("size_n", n1 as f64)
            .measure("size_2n", n2 as f64),
    );

    let peak = a.max_norm(variant).powi(2);
    reports.push(
        CheckReport::from_margin(
            "inside_absorbing_ball",
            (est.radius_sq * (1.0 + 1e-6) - peak) / est.radius_sq,
        )
        .measure("max_norm_sq", peak)
        .measure("M", est.radius_sq),
    );

    let other_seeds: Vec<u64> = seeds.iter().map(|s| s + 1000).collect();
    let b = attractor_approximate(
        &model,
        &AttractorConfig {
            seeds: other_seeds.clone(),
            ..cfg.clone()
        },
    )?;
    let mutual = hausdorff_semidistance(&a, &b, variant)?.max(hausdorff_semidistance(&b, &a, variant)?);
    reports.push(
        CheckReport::from_margin("seed_independence", (resolution - mutual) / resolution)
            .measure("mutual_distance", mutual)
            .measure("resolution", resolution),
    );

    let initial: Vec<State> = other_seeds
        .iter()
        .map(|&s| seeded_initial(&model, ABSORBING_RADIUS, s))
        .collect::<Result<_>>()?;
    let start = Ensemble::from_states(initial)?;
    let times: Vec<f64> = (0..=8).map(|i| transient * i as f64 / 8.0).collect();
    let curve = attraction_curve(&start, &a, &model, dt, &times)?;
    let last = *curve.distances.last().unwrap();
    reports.push(
        CheckReport::from_margin("attraction_curve", (1e-2 - last) / 1e-2)
            .measure("initial", curve.distances[0])
            .measure("final", last),
    );

    Ok(AttractorOutcome {
        reports,
        ensemble: a,
        model,
    })
}
