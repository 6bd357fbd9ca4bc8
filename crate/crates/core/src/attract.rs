//! Finite point clouds standing in for attractors, and the set distances used
//! to compare them.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::Grid;
use crate::integrate::{simulate_with, step_count, ObserverConfig, Stepper};
use crate::model::{absorbing_radius_and_time, ModelConfig, Variant};
use crate::phase::{x_distance, x_norm_sq, State};
use crate::random::{rng, smooth_state};
use crate::solve::ShiftedLaplacian;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub model_digest: String,
    pub transient: f64,
    pub sample_stride: usize,
    pub seeds: Vec<u64>,
}

/// Nonempty set of finite states on one grid.
#[derive(Clone, Debug)]
pub struct Ensemble {
    members: Vec<State>,
    pub provenance: Provenance,
}

impl Ensemble {
    pub fn new(members: Vec<State>, provenance: Provenance) -> Result<Self> {
        let first = members.first().ok_or(Error::EmptyEnsemble)?;
        let grid = Arc::clone(first.grid());
        for m in &members {
            if !Arc::ptr_eq(m.grid(), &grid) && m.grid().config() != grid.config() {
                return Err(Error::GridMismatch("ensemble members live on different grids".into()));
            }
            m.check_finite()?;
        }
        Ok(Ensemble { members, provenance })
    }

    pub fn from_states(members: Vec<State>) -> Result<Self> {
        Ensemble::new(members, Provenance::default())
    }

    pub fn members(&self) -> &[State] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.members[0].grid()
    }

    pub fn max_norm(&self, variant: Variant) -> f64 {
        self.members
            .iter()
            .map(|m| x_norm_sq(m, variant).sqrt())
            .fold(0.0, f64::max)
    }
}

fn check_common_grid(a: &Ensemble, b: &Ensemble) -> Result<()> {
    if Arc::ptr_eq(a.grid(), b.grid()) || a.grid().config() == b.grid().config() {
        Ok(())
    } else {
        Err(Error::GridMismatch("ensembles live on different grids".into()))
    }
}

/// `sup_{a∈A} inf_{b∈B} ‖a − b‖_X`.
///
/// Rows are computed in parallel; the final maximum is taken in member order.
pub fn hausdorff_semidistance(a: &Ensemble, b: &Ensemble, variant: Variant) -> Result<f64> {
    check_common_grid(a, b)?;
    let rows: Vec<f64> = a
        .members
        .par_iter()
        .map(|x| {
            b.members
                .iter()
                .map(|y| x_distance(x, y, variant).expect("common grid checked"))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    Ok(rows.into_iter().fold(0.0, f64::max))
}

/// Half the largest distance from a member to its nearest other member: the
/// radius at which balls around the samples link every member to a
/// neighbour. 0 for a single-member ensemble.
pub fn sampling_resolution(a: &Ensemble, variant: Variant) -> f64 {
    if a.len() < 2 {
        return 0.0;
    }
    let rows: Vec<f64> = (0..a.len())
        .into_par_iter()
        .map(|i| {
            (0..a.len())
                .filter(|&j| j != i)
                .map(|j| x_distance(&a.members[i], &a.members[j], variant).expect("common grid"))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    0.5 * rows.into_iter().fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttractorConfig {
    pub seeds: Vec<u64>,
    /// Bound on `‖w₀‖_X` for the seeded initial data.
    pub radius: f64,
    pub transient: f64,
    pub sample_time: f64,
    /// Steps between collected snapshots.
    pub stride: usize,
    pub dt: f64,
}

/// Seeded initial state used by the ensemble runs.
pub fn seeded_initial(model: &ModelConfig, radius: f64, seed: u64) -> Result<State> {
    let delta = model.constants().delta;
    smooth_state(model.grid(), model.variant, delta, radius, &mut rng(seed, 0))
}

/// Snapshots over `[T_tr, T_tr + T_sample]` of every seeded trajectory.
///
/// For forced models the transient must be at least twice the absorbing time
/// for the configured radius.
pub fn attractor_approximate(model: &ModelConfig, cfg: &AttractorConfig) -> Result<Ensemble> {
    if cfg.seeds.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    if cfg.stride == 0 {
        return Err(invalid("stride", "must be at least 1"));
    }
    if model.is_forced() {
        let est = absorbing_radius_and_time(model, cfg.radius)?;
        if cfg.transient < 2.0 * est.entry_time {
            return Err(invalid(
                "transient",
                format!("{} is shorter than 2·T₁ = {}", cfg.transient, 2.0 * est.entry_time),
            ));
        }
    }
    let stepper = Stepper::new(model, cfg.dt)?;
    let transient_steps = step_count(cfg.transient, cfg.dt);
    let observers = ObserverConfig {
        stride: usize::MAX,
        tail_radii: Vec::new(),
        snapshot_stride: cfg.stride,
    };
    let runs: Vec<Result<Vec<State>>> = cfg
        .seeds
        .par_iter()
        .map(|&seed| {
            let w0 = seeded_initial(model, cfg.radius, seed)?;
            let start = stepper.advance(&w0, transient_steps)?;
            Ok(simulate_with(&stepper, &start, cfg.sample_time, &observers)?.snapshots)
        })
        .collect();
    let mut members = Vec::new();
    for r in runs {
        members.extend(r?);
    }
    Ensemble::new(
        members,
        Provenance {
            model_digest: model.digest(),
            transient: cfg.transient,
            sample_stride: cfg.stride,
            seeds: cfg.seeds.clone(),
        },
    )
}

/// Advances every member by `steps` steps.
pub fn propagate(a: &Ensemble, stepper: &Stepper, steps: usize) -> Result<Ensemble> {
    let moved: Result<Vec<State>> = a.members.par_iter().map(|m| stepper.advance(m, steps)).collect();
    Ensemble::new(moved?, a.provenance.clone())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttractionCurve {
    pub times: Vec<f64>,
    pub distances: Vec<f64>,
}

impl AttractionCurve {
    /// Running maximum taken from the right: the smallest nonincreasing
    /// function above the curve.
    pub fn envelope(&self) -> Vec<f64> {
        let mut out = self.distances.clone();
        for i in (0..out.len().saturating_sub(1)).rev() {
            out[i] = out[i].max(out[i + 1]);
        }
        out
    }

    /// First time after which the curve stays below `tol`.
    pub fn settles_below(&self, tol: f64) -> Option<f64> {
        let env = self.envelope();
        env.iter().position(|&d| d < tol).map(|i| self.times[i])
    }
}

/// `h(S(t)B, A)` at each requested time; times must be nondecreasing
/// multiples of `dt`.
pub fn attraction_curve(
    b: &Ensemble,
    a: &Ensemble,
    model: &ModelConfig,
    dt: f64,
    times: &[f64],
) -> Result<AttractionCurve> {
    check_common_grid(a, b)?;
    let stepper = Stepper::new(model, dt)?;
    let mut distances = Vec::with_capacity(times.len());
    let mut current = b.clone();
    let mut done = 0usize;
    for &t in times {
        let target = step_count(t, dt);
        if target < done {
            return Err(invalid("times", "must be nondecreasing"));
        }
        current = propagate(&current, &stepper, target - done)?;
        done = target;
        distances.push(hausdorff_semidistance(&current, a, model.variant)?);
    }
    Ok(AttractionCurve {
        times: times.to_vec(),
        distances,
    })
}

/// Greedy farthest-point `ε`-cover drawn from `A`.
///
/// Members are visited in order of increasing norm, ties by index; the first
/// is the seed of the net and each further net point is the member farthest
/// from the current net, until every member is within `ε`.
pub fn epsilon_net(a: &Ensemble, eps: f64, variant: Variant) -> Result<(Ensemble, usize)> {
    if !(eps > 0.0) {
        return Err(invalid("eps", format!("must be positive, got {eps}")));
    }
    let mut order: Vec<(f64, usize)> = a
        .members
        .iter()
        .enumerate()
        .map(|(i, m)| (x_norm_sq(m, variant), i))
        .collect();
    order.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let sorted: Vec<&State> = order.iter().map(|&(_, i)| &a.members[i]).collect();

    let mut net = vec![0usize];
    let mut gap: Vec<f64> = sorted
        .par_iter()
        .map(|m| x_distance(m, sorted[0], variant).expect("common grid"))
        .collect();
    loop {
        let (far, d) = gap.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |best, (i, &d)| if d > best.1 { (i, d) } else { best },
        );
        if d <= eps {
            break;
        }
        net.push(far);
        let pivot = sorted[far];
        let update: Vec<f64> = sorted
            .par_iter()
            .map(|m| x_distance(m, pivot, variant).expect("common grid"))
            .collect();
        for (g, u) in gap.iter_mut().zip(update) {
            *g = g.min(u);
        }
    }
    let size = net.len();
    let members = net.into_iter().map(|i| sorted[i].clone()).collect();
    Ok((Ensemble::new(members, a.provenance.clone())?, size))
}

/// `(h(S(t)A, A), h(A, S(t)A))`.
pub fn invariance_defect(a: &Ensemble, model: &ModelConfig, dt: f64, t: f64) -> Result<(f64, f64)> {
    let steps = (t / dt).round();
    if (steps * dt - t).abs() > 1e-9 * t.max(1.0) {
        return Err(invalid("t", format!("{t} is not a multiple of dt = {dt}")));
    }
    let stepper = Stepper::new(model, dt)?;
    let image = propagate(a, &stepper, steps as usize)?;
    Ok((
        hausdorff_semidistance(&image, a, model.variant)?,
        hausdorff_semidistance(a, &image, model.variant)?,
    ))
}

/// Equilibrium of the linear model: `(−Δ_h + c)u* = g`, `v* = δu*`.
///
/// This is the exact fixed point of the discrete scheme when `f = 0`.
pub fn steady_state(model: &ModelConfig) -> Result<State> {
    if !model.nonlinearity.is_zero() {
        return Err(Error::Unsupported("steady state solve needs f = 0".into()));
    }
    let grid = model.grid();
    let solver = ShiftedLaplacian::new(grid, 1.0, model.variant.mass())
        .with_tolerance(1e-14)
        .with_max_iterations(20 * grid.len().max(500));
    let (u, _) = solver.solve(model.forcing().values(), None)?;
    let delta = model.constants().delta;
    let v: Vec<f64> = u.iter().map(|x| delta * x).collect();
    State::new(
        crate::geometry::ScalarField::from_values(grid, u)?,
        crate::geometry::ScalarField::from_values(grid, v)?,
        0.0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DomainKind, GridConfig};
    use crate::model::NonlinearitySpec;
    use crate::random::{bump, normalized, unit_state};

    fn line() -> Arc<Grid> {
        Grid::new(&GridConfig::line(DomainKind::TruncatedWholeSpace, -10.0, 10.0, 99)).unwrap()
    }

    const MASS: Variant = Variant::MassTermWholeSpace;

    #[test]
    fn semidistance_to_self_is_zero() {
        let g = line();
        let mut r = rng(1, 0);
        let a = Ensemble::from_states((0..5).map(|_| unit_state(&g, MASS, &mut r)).collect()).unwrap();
        assert_eq!(hausdorff_semidistance(&a, &a, MASS).unwrap(), 0.0);
    }

    #[test]
    fn semidistance_is_asymmetric() {
        let g = line();
        let s = unit_state(&g, MASS, &mut rng(2, 0));
        let zero = State::zeros(&g);
        let a = Ensemble::from_states(vec![zero.clone(), s]).unwrap();
        let b = Ensemble::from_states(vec![zero]).unwrap();
        assert!((hausdorff_semidistance(&a, &b, MASS).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(hausdorff_semidistance(&b, &a, MASS).unwrap(), 0.0);
    }

    #[test]
    fn empty_ensemble_rejected() {
        assert!(matches!(Ensemble::from_states(vec![]), Err(Error::EmptyEnsemble)));
    }

    #[test]
    fn mismatched_grids_rejected() {
        let a = Ensemble::from_states(vec![State::zeros(&line())]).unwrap();
        let other = Grid::new(&GridConfig::line(DomainKind::TruncatedWholeSpace, -10.0, 10.0, 49)).unwrap();
        let b = Ensemble::from_states(vec![State::zeros(&other)]).unwrap();
        assert!(matches!(
            hausdorff_semidistance(&a, &b, MASS),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn net_of_two_clusters() {
        let g = line();
        let eps = 0.1;
        let mut r = rng(4, 0);
        let far = unit_state(&g, MASS, &mut r).scaled(10.0 * eps);
        let mut members = Vec::new();
        for center in [State::zeros(&g), far] {
            for _ in 0..4 {
                let jitter = unit_state(&g, MASS, &mut r).scaled(0.2 * eps);
                members.push(
                    State::new(
                        center.u.add_scaled(1.0, &jitter.u).unwrap(),
                        center.v.add_scaled(1.0, &jitter.v).unwrap(),
                        0.0,
                    )
                    .unwrap(),
                );
            }
        }
        let a = Ensemble::from_states(members).unwrap();
        let (net, size) = epsilon_net(&a, eps, MASS).unwrap();
        assert_eq!(size, 2);
        assert!(hausdorff_semidistance(&a, &net, MASS).unwrap() <= eps);
    }

    #[test]
    fn net_of_small_set_is_one_point() {
        let g = line();
        let mut r = rng(5, 0);
        let a = Ensemble::from_states((0..6).map(|_| unit_state(&g, MASS, &mut r)).collect()).unwrap();
        let (_, size) = epsilon_net(&a, 2.5, MASS).unwrap();
        assert_eq!(size, 1);
    }

    #[test]
    fn steady_state_is_a_fixed_point() {
        let g = line();
        let forcing = normalized(&bump(&g, [0.0, 0.0], 3.0)).unwrap();
        let model = ModelConfig::new(MASS, 1.0, 2.0, 0.5, NonlinearitySpec::Zero, forcing).unwrap();
        let w = steady_state(&model).unwrap();
        let a = Ensemble::from_states(vec![w]).unwrap();
        let (fwd, bwd) = invariance_defect(&a, &model, 0.1, 5.0).unwrap();
        assert!(fwd < 1e-10 && bwd < 1e-10, "{fwd} {bwd}");
    }

    #[test]
    fn zero_is_invariant_for_homogeneous_model() {
        let g = line();
        let model = ModelConfig::unforced(MASS, &g, 1.0, 2.0, NonlinearitySpec::SaturatingCubic).unwrap();
        let a = Ensemble::from_states(vec![State::zeros(&g)]).unwrap();
        assert_eq!(invariance_defect(&a, &model, 0.1, 1.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn curve_starts_at_zero_for_subset() {
        let g = line();
        let model = ModelConfig::unforced(MASS, &g, 1.0, 2.0, NonlinearitySpec::Zero).unwrap();
        let w = unit_state(&g, MASS, &mut rng(6, 0));
        let a = Ensemble::from_states(vec![w.clone(), State::zeros(&g)]).unwrap();
        let b = Ensemble::from_states(vec![w]).unwrap();
        let c = attraction_curve(&b, &a, &model, 0.1, &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(c.distances[0], 0.0);
    }
}
