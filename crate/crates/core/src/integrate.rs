//! Time integration of `w_t + Gw = R(w)`.
//!
//! The linear part is treated by the trapezoidal rule and `R` by midpoint
//! extrapolation from the two most recent displacements:
//!
//! ```text
//! (I + dt/2 G) w⁺ = (I − dt/2 G) w + dt R(3/2 u − 1/2 u_prev)
//! ```
//!
//! The first step (no history) evaluates `R` at the current state. Eliminating
//! `v⁺` leaves one SPD solve per step,
//!
//! ```text
//! (−a²Δ_h + 1 + aλ + a²c) u⁺ = a r₂ + (1 + a(λ − δ)) r₁,   a = dt/2,
//! v⁺ = ((1 + aδ) u⁺ − r₁) / a,
//! ```
//!
//! with `c` the mass coefficient of the variant.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{dirichlet_eigenvalue, laplacian_raw, Grid, ScalarField};
use crate::model::ModelConfig;
use crate::phase::{EnergySample, Observer, State};
use crate::solve::ShiftedLaplacian;

/// Observer settings for [`simulate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObserverConfig {
    /// Record an energy sample every `stride` steps.
    pub stride: usize,
    pub tail_radii: Vec<f64>,
    /// Keep a full state every `snapshot_stride` steps; 0 disables.
    pub snapshot_stride: usize,
}

impl Default for ObserverConfig {
    fn default() -> Self {
        ObserverConfig {
            stride: 1,
            tail_radii: Vec::new(),
            snapshot_stride: 0,
        }
    }
}

/// Time-ordered energy samples together with the tail radii they refer to.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub tail_radii: Vec<f64>,
    pub samples: Vec<EnergySample>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    /// Uniform spacing of the sample times, if there are at least two.
    pub fn interval(&self) -> Option<f64> {
        (self.samples.len() >= 2).then(|| self.samples[1].t - self.samples[0].t)
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub series: TimeSeries,
    pub snapshots: Vec<State>,
    pub final_state: State,
    pub dt: f64,
    pub stride: usize,
}

/// One-step map of the default scheme for a fixed model and `dt`.
#[derive(Clone, Debug)]
pub struct Stepper {
    model: ModelConfig,
    dt: f64,
    solver: ShiftedLaplacian,
}

impl Stepper {
    /// Validates `0 < dt ≤ h_min`.
    pub fn new(model: &ModelConfig, dt: f64) -> Result<Self> {
        let h = model.grid().min_spacing();
        if !(dt <= h * (1.0 + 1e-12)) {
            return Err(invalid("dt", format!("{dt} exceeds the step limit h_min = {h}")));
        }
        Stepper::new_unchecked(model, dt)
    }

    /// Skips the `dt ≤ h_min` accuracy guard; the scheme stays stable.
    pub fn new_unchecked(model: &ModelConfig, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(invalid("dt", format!("must be positive, got {dt}")));
        }
        let c = model.constants();
        let a = 0.5 * dt;
        let shift = 1.0 + a * c.lambda + a * a * model.variant.mass();
        let solver = ShiftedLaplacian::new(model.grid(), a * a, shift);
        Ok(Stepper {
            model: model.clone(),
            dt,
            solver,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn model(&self) -> &ModelConfig {
        &self.model
    }

    /// Advances `w` by one step. The returned state carries `w.u` as history.
    pub fn step(&self, w: &State) -> Result<State> {
        self.step_at(w, w.t + self.dt)
    }

    fn step_at(&self, w: &State, t_next: f64) -> Result<State> {
        w.u.check_same_grid(self.model.forcing())?;
        let grid = w.grid();
        let c = self.model.constants();
        let a = 0.5 * self.dt;
        let (delta, lambda) = (c.delta, c.lambda);
        let shift = delta * delta - delta * lambda + self.model.variant.mass();
        let u = w.u.values();
        let v = w.v.values();
        let n = u.len();

        let source = match &w.prev_u {
            Some(prev) if !self.model.nonlinearity.is_zero() => {
                let ext: Vec<f64> = u.iter().zip(prev).map(|(x, p)| 1.5 * x - 0.5 * p).collect();
                self.model.source(&ext)
            }
            _ => self.model.source(u),
        };

        let mut lap = vec![0.0; n];
        laplacian_raw(grid, u, &mut lap);
        let beta = 1.0 + a * (lambda - delta);
        let mut r1 = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            r1[i] = (1.0 - a * delta) * u[i] + a * v[i];
            let r2 = v[i] - a * (-lap[i] + (lambda - delta) * v[i] + shift * u[i]) + self.dt * source[i];
            rhs[i] = a * r2 + beta * r1[i];
        }
        let (u_next, _) = self.solver.solve(&rhs, Some(u))?;
        let v_next: Vec<f64> = (0..n).map(|i| ((1.0 + a * delta) * u_next[i] - r1[i]) / a).collect();

        if let Some(index) = u_next.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "u", index });
        }
        if let Some(index) = v_next.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "v", index });
        }
        Ok(State {
            u: ScalarField::from_raw(grid, u_next),
            v: ScalarField::from_raw(grid, v_next),
            t: t_next,
            prev_u: Some(u.to_vec()),
        })
    }

    /// Takes `steps` steps; time stamps are `t₀ + k·dt`.
    pub fn advance(&self, w: &State, steps: usize) -> Result<State> {
        let t0 = w.t;
        let mut cur = w.clone();
        for k in 1..=steps {
            let t = t0 + k as f64 * self.dt;
            cur = self.step_at(&cur, t).map_err(|e| Error::StepFailed {
                t: cur.t,
                source: Box::new(e),
            })?;
        }
        Ok(cur)
    }
}

/// One step of the default scheme; see [`Stepper`] to reuse the factorization.
pub fn step(w: &State, model: &ModelConfig, dt: f64) -> Result<State> {
    Stepper::new(model, dt)?.step(w)
}

/// Number of steps covering `duration`, tolerating round-off in `duration / dt`.
pub fn step_count(duration: f64, dt: f64) -> usize {
    let r = duration / dt;
    if (r - r.round()).abs() <= 1e-9 * r.max(1.0) {
        r.round() as usize
    } else {
        r.ceil() as usize
    }
}

pub fn simulate(
    w0: &State,
    model: &ModelConfig,
    t_end: f64,
    dt: f64,
    observers: &ObserverConfig,
) -> Result<Trajectory> {
    let stepper = Stepper::new(model, dt)?;
    simulate_with(&stepper, w0, t_end, observers)
}

/// [`simulate`] with a prepared stepper.
pub fn simulate_with(stepper: &Stepper, w0: &State, t_end: f64, observers: &ObserverConfig) -> Result<Trajectory> {
    if !(t_end >= 0.0) {
        return Err(invalid("T", format!("must be nonnegative, got {t_end}")));
    }
    if observers.stride == 0 {
        return Err(invalid("stride", "must be at least 1"));
    }
    w0.check_finite()?;
    let model = stepper.model();
    let observer = Observer::new(w0.grid(), &observers.tail_radii)?;
    let dt = stepper.dt();
    let steps = step_count(t_end, dt);
    let t0 = w0.t;

    let mut samples = vec![observer.sample(w0, model)];
    let mut snapshots = Vec::new();
    if observers.snapshot_stride > 0 {
        snapshots.push(w0.clone());
    }
    let mut cur = w0.clone();
    for k in 1..=steps {
        let t = t0 + k as f64 * dt;
        cur = stepper.step_at(&cur, t).map_err(|e| Error::StepFailed {
            t: cur.t,
            source: Box::new(e),
        })?;
        if k % observers.stride == 0 {
            samples.push(observer.sample(&cur, model));
        }
        if observers.snapshot_stride > 0 && k % observers.snapshot_stride == 0 {
            snapshots.push(cur.clone());
        }
    }
    Ok(Trajectory {
        series: TimeSeries {
            tail_radii: observers.tail_radii.clone(),
            samples,
        },
        snapshots,
        final_state: cur,
        dt,
        stride: observers.stride,
    })
}

/// Exact solution of `ü + λu̇ + (κ_h + c)u = 0` with `u(0) = a`, `u̇(0) = b`,
/// where `κ_h` is the discrete Dirichlet eigenvalue of the requested mode.
pub fn linear_mode_oracle(
    modes: &[usize],
    grid: &Arc<Grid>,
    lambda: f64,
    c: f64,
    t: f64,
    initial: (f64, f64),
) -> Result<(f64, f64)> {
    if modes.len() != grid.dim() {
        return Err(invalid("modes", "one mode index per axis required"));
    }
    for (axis, &m) in modes.iter().enumerate() {
        if m == 0 || m > grid.nodes()[axis] {
            return Err(invalid("modes", format!("mode {m} out of range on axis {axis}")));
        }
    }
    let omega2 = dirichlet_eigenvalue(grid, modes) + c;
    Ok(damped_oscillator(lambda, omega2, t, initial))
}

/// Closed form for `ü + λu̇ + ω²u = 0`, all three damping regimes.
pub fn damped_oscillator(lambda: f64, omega2: f64, t: f64, (a, b): (f64, f64)) -> (f64, f64) {
    let half = 0.5 * lambda;
    let disc = half * half - omega2;
    let scale = half * half + omega2.abs();
    if disc.abs() <= 1e-14 * scale {
        // double root −λ/2
        let e = (-half * t).exp();
        let k = b + half * a;
        let u = (a + k * t) * e;
        let ut = (k - half * (a + k * t)) * e;
        (u, ut)
    } else if disc > 0.0 {
        let s = disc.sqrt();
        let (rp, rm) = (-half + s, -half - s);
        let cp = (b - rm * a) / (rp - rm);
        let cm = a - cp;
        let (ep, em) = ((rp * t).exp(), (rm * t).exp());
        (cp * ep + cm * em, cp * rp * ep + cm * rm * em)
    } else {
        let wd = (-disc).sqrt();
        let e = (-half * t).exp();
        let k = (b + half * a) / wd;
        let (sn, cs) = (wd * t).sin_cos();
        let u = e * (a * cs + k * sn);
        let ut = e * (-half * (a * cs + k * sn) + (-a * wd * sn + k * wd * cs));
        (u, ut)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{dirichlet_mode, DomainKind, GridConfig};
    use crate::model::{NonlinearitySpec, Variant};
    use crate::phase::lift;

    fn line(n: usize) -> Arc<Grid> {
        Grid::new(&GridConfig::line(DomainKind::TruncatedWholeSpace, -10.0, 10.0, n)).unwrap()
    }

    #[test]
    fn zero_state_is_fixed() {
        let g = line(99);
        let model = ModelConfig::unforced(
            Variant::MassTermWholeSpace,
            &g,
            1.0,
            2.0,
            NonlinearitySpec::SaturatingCubic,
        )
        .unwrap();
        let w = State::zeros(&g);
        let next = step(&w, &model, 0.1).unwrap();
        assert!(next.u.is_zero() && next.v.is_zero());
    }

    #[test]
    fn oracle_initial_values_and_critical_branch() {
        for &(lambda, omega2) in &[(1.0, 3.0), (5.0, 1.0), (2.0, 1.0)] {
            let (u, ut) = damped_oscillator(lambda, omega2, 0.0, (0.7, -0.3));
            assert!((u - 0.7).abs() < 1e-15 && (ut + 0.3).abs() < 1e-15);
        }
        let (a, b) = (0.4, 1.3);
        for &t in &[0.5, 1.0, 3.0] {
            let (u, _) = damped_oscillator(2.0, 1.0, t, (a, b));
            let exact = (a + (b + a) * t) * (-t).exp();
            assert!((u - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn oracle_solves_the_ode() {
        // central second difference of the closed form vs the ODE, each regime
        for &(lambda, omega2) in &[(1.0, 3.0), (5.0, 1.0), (2.0, 1.0)] {
            let h = 1e-4;
            for &t in &[0.3, 1.7] {
                let u = |s| damped_oscillator(lambda, omega2, s, (0.5, 0.2)).0;
                let (u0, ut) = damped_oscillator(lambda, omega2, t, (0.5, 0.2));
                let utt = (u(t + h) - 2.0 * u0 + u(t - h)) / (h * h);
                let fd = (u(t + h) - u(t - h)) / (2.0 * h);
                assert!((fd - ut).abs() < 1e-7);
                assert!((utt + lambda * ut + omega2 * u0).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn mode_evolution_matches_oracle() {
        let g = line(199);
        let model = ModelConfig::unforced(Variant::MassTermWholeSpace, &g, 1.0, 1.0, NonlinearitySpec::Zero).unwrap();
        let phi = dirichlet_mode(&g, &[2]).unwrap();
        let w0 = lift(&phi, &ScalarField::zeros(&g), model.constants().delta).unwrap();
        let dt = g.spacing()[0] / 2.0;
        let stepper = Stepper::new(&model, dt).unwrap();
        let w = stepper.advance(&w0, 200).unwrap();
        let (ue, _) = linear_mode_oracle(&[2], &g, 1.0, 1.0, w.t, (1.0, 0.0)).unwrap();
        let ratio = w.u.values()[50] / phi.values()[50];
        assert!((ratio - ue).abs() < 1e-4, "{ratio} vs {ue}");
    }

    #[test]
    fn dt_guard() {
        let g = line(99);
        let model = ModelConfig::unforced(Variant::MassTermWholeSpace, &g, 1.0, 1.0, NonlinearitySpec::Zero).unwrap();
        let h = g.spacing()[0];
        assert!(Stepper::new(&model, 2.0 * h).is_err());
        assert!(Stepper::new(&model, 0.0).is_err());
        assert!(Stepper::new_unchecked(&model, 10.0 * h).is_ok());
    }

    #[test]
    fn zero_duration_gives_one_sample() {
        let g = line(49);
        let model = ModelConfig::unforced(Variant::MassTermWholeSpace, &g, 1.0, 1.0, NonlinearitySpec::Zero).unwrap();
        let traj = simulate(&State::zeros(&g), &model, 0.0, 0.1, &ObserverConfig::default()).unwrap();
        assert_eq!(traj.series.len(), 1);
    }

    #[test]
    fn step_counts() {
        assert_eq!(step_count(1.0, 0.1), 10);
        assert_eq!(step_count(1.05, 0.1), 11);
        assert_eq!(step_count(0.0, 0.1), 0);
    }
}
