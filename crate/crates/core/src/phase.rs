//! Phase space `X = V × H` of the first-order system and the functionals on it.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{dot, grad_density_raw, grad_inner_raw, laplacian_raw, tail_mask, Grid, ScalarField};
use crate::model::{Constants, ModelConfig, Variant};

/// `w = (u, v)` with `v = δu + u_t`.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub u: ScalarField,
    pub v: ScalarField,
    pub t: f64,
    /// Displacement one step back, used by the integrator to extrapolate the
    /// nonlinearity. Carried here so restarts reproduce a run bit-exactly.
    pub(crate) prev_u: Option<Vec<f64>>,
}

impl State {
    pub fn new(u: ScalarField, v: ScalarField, t: f64) -> Result<Self> {
        u.check_same_grid(&v)?;
        for (what, f) in [("u", &u), ("v", &v)] {
            if let Some(index) = f.values().iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite { what, index });
            }
        }
        Ok(State { u, v, t, prev_u: None })
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        State {
            u: ScalarField::zeros(grid),
            v: ScalarField::zeros(grid),
            t: 0.0,
            prev_u: None,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.u.grid()
    }

    pub fn has_history(&self) -> bool {
        self.prev_u.is_some()
    }

    /// Drops the integrator history, as after a reload from disk.
    pub fn without_history(mut self) -> Self {
        self.prev_u = None;
        self
    }

    pub fn check_finite(&self) -> Result<()> {
        for (what, f) in [("u", &self.u), ("v", &self.v)] {
            if let Some(index) = f.values().iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite { what, index });
            }
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> State {
        State {
            u: self.u.scaled(factor),
            v: self.v.scaled(factor),
            t: self.t,
            prev_u: None,
        }
    }
}

/// Initial state `(u₀, u₁ + δu₀)` at `t = 0`.
pub fn lift(u0: &ScalarField, u1: &ScalarField, delta: f64) -> Result<State> {
    let v = u1.add_scaled(delta, u0)?;
    State::new(u0.clone(), v, 0.0)
}

/// Recovers `(u, u_t) = (u, v − δu)`.
pub fn unlift(w: &State, delta: f64) -> (ScalarField, ScalarField) {
    let ut =
        w.v.values()
            .iter()
            .zip(w.u.values())
            .map(|(v, u)| v - delta * u)
            .collect();
    (w.u.clone(), ScalarField::from_raw(w.u.grid(), ut))
}

/// Component norms of a state, the building blocks of every functional.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Norms {
    pub u_l2: f64,
    pub grad_l2: f64,
    pub v_l2: f64,
}

pub fn norms(w: &State) -> Norms {
    Norms {
        u_l2: w.u.l2_norm_sq(),
        grad_l2: grad_inner_raw(w.grid(), w.u.values(), w.u.values()),
        v_l2: w.v.l2_norm_sq(),
    }
}

impl Norms {
    pub fn x_norm_sq(&self, variant: Variant) -> f64 {
        variant.mass() * self.u_l2 + self.grad_l2 + self.v_l2
    }

    pub fn quasi_energy(&self, c: &Constants) -> f64 {
        c.energy_weight() * self.u_l2 + self.grad_l2 + self.v_l2
    }
}

/// `‖w‖²_X`: full `H¹ × L²` for the mass variant, gradient-only `V` for the strip.
pub fn x_norm_sq(w: &State, variant: Variant) -> f64 {
    norms(w).x_norm_sq(variant)
}

/// `‖u‖²₁ = ‖u‖² + ‖∇u‖²`.
pub fn h1_norm_sq(u: &ScalarField) -> f64 {
    u.l2_norm_sq() + grad_inner_raw(u.grid(), u.values(), u.values())
}

pub fn x_inner(a: &State, b: &State, variant: Variant) -> Result<f64> {
    a.u.check_same_grid(&b.u)?;
    let grid = a.grid();
    let vol = grid.cell_volume();
    Ok(variant.mass() * dot(a.u.values(), b.u.values()) * vol
        + grad_inner_raw(grid, a.u.values(), b.u.values())
        + dot(a.v.values(), b.v.values()) * vol)
}

/// `‖a − b‖_X`.
pub fn x_distance(a: &State, b: &State, variant: Variant) -> Result<f64> {
    a.u.check_same_grid(&b.u)?;
    let grid = a.grid();
    let du: Vec<f64> = a.u.values().iter().zip(b.u.values()).map(|(x, y)| x - y).collect();
    let dv: Vec<f64> = a.v.values().iter().zip(b.v.values()).map(|(x, y)| x - y).collect();
    let vol = grid.cell_volume();
    let sq = variant.mass() * dot(&du, &du) * vol + grad_inner_raw(grid, &du, &du) + dot(&dv, &dv) * vol;
    Ok(sq.max(0.0).sqrt())
}

/// `E(w) = (δ² − λδ + 1)‖u‖² + ‖∇u‖² + ‖v‖²`.
pub fn quasi_energy(w: &State, lambda: f64, delta: f64) -> Result<f64> {
    let weight = delta * delta - lambda * delta + 1.0;
    if !(weight > 0.0) {
        return Err(invalid("delta", format!("energy weight {weight} is not positive")));
    }
    let n = norms(w);
    Ok(weight * n.u_l2 + n.grad_l2 + n.v_l2)
}

/// Inner products entering the flux: `(‖v‖², ∫gv, ∫f(u)v, ∫uv)`.
fn flux_terms(w: &State, model: &ModelConfig) -> (f64, f64, f64, f64) {
    let vol = w.grid().cell_volume();
    let v = w.v.values();
    let u = w.u.values();
    let v2 = dot(v, v) * vol;
    let gv = if model.is_forced() {
        dot(model.forcing().values(), v) * vol
    } else {
        0.0
    };
    let fv = if model.nonlinearity.is_zero() {
        0.0
    } else {
        u.iter().zip(v).map(|(&s, &vi)| model.f_apply(s) * vi).sum::<f64>() * vol
    };
    let uv = dot(u, v) * vol;
    (v2, gv, fv, uv)
}

/// `Φ(w) = −2k‖v‖² + 2∫gv − 2∫f(u)v` with `k = λ − 2δ` (mass) or `λ − 3δ` (strip).
pub fn flux(w: &State, model: &ModelConfig) -> f64 {
    let (v2, gv, fv, _) = flux_terms(w, model);
    -2.0 * model.flux_coefficient() * v2 + 2.0 * gv - 2.0 * fv
}

/// Exact `dE/dt + 2δE` along the semi-discrete flow.
///
/// Equal to [`flux`] for the mass variant. For the strip the `(δ² − λδ)u`
/// term does not cancel against the energy weight, leaving
/// `Φ − 2δ‖v‖² + 2∫uv`.
pub fn energy_rate(w: &State, model: &ModelConfig) -> f64 {
    let (v2, gv, fv, uv) = flux_terms(w, model);
    let phi = -2.0 * model.flux_coefficient() * v2 + 2.0 * gv - 2.0 * fv;
    match model.variant {
        Variant::MassTermWholeSpace => phi,
        Variant::NoMassStrip => {
            let delta = model.audit_constants().delta;
            phi - 2.0 * delta * v2 + 2.0 * uv
        }
    }
}

/// `Σ θ(|x|²/k²)·[(δ² − λδ + 1)|u|² + |∇u|² + |v|²]·vol`.
pub fn tail_energy(w: &State, k: f64, lambda: f64, delta: f64) -> Result<f64> {
    let mask = tail_mask(w.grid(), k)?;
    let weight = delta * delta - lambda * delta + 1.0;
    Ok(masked_energy(w, mask.values(), weight))
}

fn masked_energy(w: &State, mask: &[f64], weight: f64) -> f64 {
    let grid = w.grid();
    let mut density = vec![0.0; grid.len()];
    grad_density_raw(grid, w.u.values(), &mut density);
    masked_energy_with_density(w, mask, weight, &density)
}

fn masked_energy_with_density(w: &State, mask: &[f64], weight: f64, density: &[f64]) -> f64 {
    let vol = w.grid().cell_volume();
    let u = w.u.values();
    let v = w.v.values();
    let mut total = 0.0;
    for i in 0..mask.len() {
        if mask[i] != 0.0 {
            total += mask[i] * ((weight * u[i] * u[i] + v[i] * v[i]) * vol + density[i]);
        }
    }
    total
}

/// `G_h w = (δu − v, −Δ_h u + (λ − δ)v + (δ² − δλ + c)u)` with the true constants.
#[allow(non_snake_case)]
pub fn apply_G(w: &State, model: &ModelConfig) -> State {
    apply_linear(w, model.constants(), model.variant)
}

fn apply_linear(w: &State, c: &Constants, variant: Variant) -> State {
    let grid = w.grid();
    let u = w.u.values();
    let v = w.v.values();
    let mut lap = vec![0.0; u.len()];
    laplacian_raw(grid, u, &mut lap);
    let shift = c.delta * c.delta - c.delta * c.lambda + variant.mass();
    let first: Vec<f64> = u.iter().zip(v).map(|(ui, vi)| c.delta * ui - vi).collect();
    let second: Vec<f64> = (0..u.len())
        .map(|i| -lap[i] + (c.lambda - c.delta) * v[i] + shift * u[i])
        .collect();
    State {
        u: ScalarField::from_raw(grid, first),
        v: ScalarField::from_raw(grid, second),
        t: w.t,
        prev_u: None,
    }
}

/// `(⟨G_h w, w⟩_X, σ‖w‖²_X + (λ/2)‖v‖²)` with the audit constants.
pub fn accretivity_form(w: &State, model: &ModelConfig) -> (f64, f64) {
    let c = model.audit_constants();
    let gw = apply_linear(w, &c, model.variant);
    let lhs = x_inner(&gw, w, model.variant).expect("same grid by construction");
    let n = norms(w);
    let bound = c.sigma * n.x_norm_sq(model.variant) + 0.5 * c.lambda * n.v_l2;
    (lhs, bound)
}

/// Quantities not persisted in the time-series file.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleExtras {
    /// `2∫F(u)`.
    pub potential: f64,
    /// Exact `dE/dt + 2δE`; see [`energy_rate`].
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub t: f64,
    /// Quasi-energy `E(w)`.
    pub energy: f64,
    /// `‖w‖²_X`.
    pub x2: f64,
    /// `Φ(w)`.
    pub flux: f64,
    pub u_l2: f64,
    pub grad_l2: f64,
    pub v_l2: f64,
    /// Tail energies, parallel to the observer's radii.
    pub tails: Vec<f64>,
    pub extras: Option<SampleExtras>,
}

impl EnergySample {
    /// Exact energy rate when recorded, otherwise the flux.
    pub fn rate(&self) -> f64 {
        self.extras.map_or(self.flux, |e| e.rate)
    }
}

/// Computes [`EnergySample`]s with masks cached per radius.
#[derive(Clone, Debug)]
pub struct Observer {
    radii: Vec<f64>,
    masks: Vec<Vec<f64>>,
}

impl Observer {
    pub fn new(grid: &Arc<Grid>, radii: &[f64]) -> Result<Self> {
        let masks = radii
            .iter()
            .map(|&k| tail_mask(grid, k).map(ScalarField::into_values))
            .collect::<Result<_>>()?;
        Ok(Observer {
            radii: radii.to_vec(),
            masks,
        })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn sample(&self, w: &State, model: &ModelConfig) -> EnergySample {
        let c = model.audit_constants();
        let n = norms(w);
        let tails = if self.masks.is_empty() {
            Vec::new()
        } else {
            let mut density = vec![0.0; w.grid().len()];
            grad_density_raw(w.grid(), w.u.values(), &mut density);
            self.masks
                .iter()
                .map(|m| masked_energy_with_density(w, m, c.energy_weight(), &density))
                .collect()
        };
        EnergySample {
            t: w.t,
            energy: n.quasi_energy(&c),
            x2: n.x_norm_sq(model.variant),
            flux: flux(w, model),
            u_l2: n.u_l2,
            grad_l2: n.grad_l2,
            v_l2: n.v_l2,
            tails,
            extras: Some(SampleExtras {
                potential: 2.0 * model.potential(&w.u),
                rate: energy_rate(w, model),
            }),
        }
    }
}
