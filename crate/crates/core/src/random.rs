//! Seeded initial data and probe states.
//!
//! Every generator draws from a ChaCha8 stream keyed by `(seed, stream)`, so
//! ensembles are reproducible member by member regardless of evaluation order.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::geometry::{dirichlet_mode, Grid, ScalarField};
use crate::model::Variant;
use crate::phase::{h1_norm_sq, lift, norms, x_norm_sq, State};

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Smooth compactly supported bump `exp(1 − 1/(1 − r²/ρ²))`, peak 1 at `center`.
pub fn bump(grid: &Arc<Grid>, center: [f64; 2], radius: f64) -> ScalarField {
    ScalarField::from_fn(grid, |x| {
        let dx = x[0] - center[0];
        let dy = x[1] - center[1];
        let s = (dx * dx + dy * dy) / (radius * radius);
        if s < 1.0 {
            (1.0 - 1.0 / (1.0 - s)).exp()
        } else {
            0.0
        }
    })
}

/// Center of the box, used as the default bump location.
pub fn box_center(grid: &Grid) -> [f64; 2] {
    let mut c = [0.0; 2];
    for (axis, &(a, b)) in grid.extents().iter().enumerate() {
        c[axis] = 0.5 * (a + b);
    }
    c
}

/// `u` scaled to unit `L²` norm.
pub fn normalized(u: &ScalarField) -> Result<ScalarField> {
    let n = u.l2_norm();
    if !(n > 0.0) {
        return Err(invalid("u", "cannot normalize a zero field"));
    }
    Ok(u.scaled(1.0 / n))
}

/// Random state with `‖w‖_X = 1`: uniform nodal values, with a random split
/// of the norm between the displacement and velocity parts.
pub fn unit_state(grid: &Arc<Grid>, variant: Variant, rng: &mut impl Rng) -> State {
    let n = grid.len();
    let draw = |rng: &mut dyn rand::RngCore| -> Vec<f64> { (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    let u = ScalarField::from_values(grid, draw(rng)).expect("finite draws");
    let v = ScalarField::from_values(grid, draw(rng)).expect("finite draws");
    let share: f64 = rng.gen_range(0.0..1.0);
    let zeros = State::zeros(grid);
    let ux = x_norm_sq(
        &State {
            u: u.clone(),
            ..zeros.clone()
        },
        variant,
    );
    let vx = v.l2_norm_sq();
    let u = u.scaled((share / ux).sqrt());
    let v = v.scaled(((1.0 - share) / vx).sqrt());
    State::new(u, v, 0.0).expect("finite by construction")
}

/// Smooth random data: a few bumps in `u₀` and `u₁` placed in the middle half
/// of the box, lifted with `δ` and scaled to `‖w₀‖_X = radius · s` with `s`
/// uniform in `[1/2, 1]`.
pub fn smooth_state(grid: &Arc<Grid>, variant: Variant, delta: f64, radius: f64, rng: &mut impl Rng) -> Result<State> {
    if !(radius >= 0.0) {
        return Err(invalid("radius", format!("must be nonnegative, got {radius}")));
    }
    let ext = grid.extents().to_vec();
    let field = |rng: &mut dyn rand::RngCore| -> ScalarField {
        let mut total = ScalarField::zeros(grid);
        for _ in 0..3 {
            let mut c = [0.0; 2];
            let mut widest = f64::INFINITY;
            for (axis, &(a, b)) in ext.iter().enumerate() {
                let quarter = 0.25 * (b - a);
                c[axis] = rng.gen_range((a + quarter)..(b - quarter));
                widest = widest.min(quarter);
            }
            let rho = rng.gen_range(0.3..1.0) * widest.min(6.0);
            let amp: f64 = rng.gen_range(-1.0..1.0);
            total = total.add_scaled(amp, &bump(grid, c, rho)).expect("same grid");
        }
        total
    };
    let u0 = field(rng);
    let u1 = field(rng);
    let w = lift(&u0, &u1, delta)?;
    let norm = x_norm_sq(&w, variant).sqrt();
    let target = radius * rng.gen_range(0.5..=1.0);
    if norm == 0.0 {
        return Ok(w);
    }
    Ok(w.scaled(target / norm))
}

/// Modal probe `u = φ₁/‖φ₁‖₁`, `v = s·u`: the lowest Dirichlet mode with a
/// prescribed velocity ratio, normalized to `‖w‖_X = 1`.
pub fn modal_probe(grid: &Arc<Grid>, variant: Variant, ratio: f64) -> Result<State> {
    let modes = vec![1; grid.dim()];
    let phi = dirichlet_mode(grid, &modes)?;
    let phi = phi.scaled(1.0 / h1_norm_sq(&phi).sqrt());
    let w = State::new(phi.clone(), phi.scaled(ratio), 0.0)?;
    let n = norms(&w).x_norm_sq(variant).sqrt();
    Ok(w.scaled(1.0 / n))
}

/// Velocity ratios swept by the modal probes, both signs.
pub fn probe_ratios() -> Vec<f64> {
    let mut out = Vec::new();
    for k in 0..=40 {
        let s = 0.025 * k as f64;
        out.push(s);
        if k > 0 {
            out.push(-s);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DomainKind, GridConfig};

    fn line() -> Arc<Grid> {
        Grid::new(&GridConfig::line(DomainKind::TruncatedWholeSpace, -10.0, 10.0, 199)).unwrap()
    }

    #[test]
    fn unit_state_has_unit_norm() {
        let g = line();
        let mut r = rng(3, 0);
        for _ in 0..20 {
            let w = unit_state(&g, Variant::MassTermWholeSpace, &mut r);
            assert!((x_norm_sq(&w, Variant::MassTermWholeSpace) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let g = line();
        let a = unit_state(&g, Variant::MassTermWholeSpace, &mut rng(9, 2));
        let b = unit_state(&g, Variant::MassTermWholeSpace, &mut rng(9, 2));
        let c = unit_state(&g, Variant::MassTermWholeSpace, &mut rng(9, 3));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn smooth_state_respects_radius() {
        let g = line();
        let mut r = rng(1, 0);
        for _ in 0..10 {
            let w = smooth_state(&g, Variant::MassTermWholeSpace, 0.2, 10.0, &mut r).unwrap();
            let n = x_norm_sq(&w, Variant::MassTermWholeSpace).sqrt();
            assert!((5.0 * (1.0 - 1e-12)..=10.0 * (1.0 + 1e-12)).contains(&n));
        }
    }

    #[test]
    fn bump_is_compact() {
        let g = line();
        let b = bump(&g, [0.0, 0.0], 5.0);
        for (i, x) in b.values().iter().enumerate() {
            if g.coord(0, i).abs() >= 5.0 {
                assert_eq!(*x, 0.0);
            }
        }
        assert!((b.values()[99] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn probe_is_normalized() {
        let g = line();
        let w = modal_probe(&g, Variant::MassTermWholeSpace, -0.3).unwrap();
        assert!((x_norm_sq(&w, Variant::MassTermWholeSpace) - 1.0).abs() < 1e-12);
    }
}
