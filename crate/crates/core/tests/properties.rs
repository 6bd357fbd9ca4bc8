use std::sync::Arc;

use dampwave::geometry::{
    cutoff_theta, grad_inner, l2_inner, laplacian_apply, DomainKind, Grid, GridConfig, ScalarField,
};
use dampwave::integrate::Stepper;
use dampwave::model::{delta_of, sigma_of, ModelConfig, NonlinearitySpec, Variant};
use dampwave::phase::{accretivity_form, lift, tail_energy, unlift, State};
use dampwave::random::{rng, unit_state};
use proptest::prelude::*;

fn line(kind: DomainKind, n: usize) -> Arc<Grid> {
    let (a, b) = match kind {
        DomainKind::TruncatedWholeSpace => (-10.0, 10.0),
        DomainKind::Strip => (0.0, std::f64::consts::PI),
    };
    Grid::new(&GridConfig::line(kind, a, b, n)).unwrap()
}

fn field(grid: &Arc<Grid>, values: &[f64]) -> ScalarField {
    ScalarField::from_values(grid, values[..grid.len()].to_vec()).unwrap()
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn summation_by_parts(a in values(), b in values(), n in 5usize..60) {
        let g = line(DomainKind::TruncatedWholeSpace, n);
        let (f, h) = (field(&g, &a), field(&g, &b));
        let lhs = -l2_inner(&laplacian_apply(&f), &h).unwrap();
        let rhs = grad_inner(&f, &h).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
    }

    #[test]
    fn laplacian_is_symmetric(a in values(), b in values(), n in 5usize..60) {
        let g = line(DomainKind::Strip, n);
        let (f, h) = (field(&g, &a), field(&g, &b));
        let x = l2_inner(&laplacian_apply(&f), &h).unwrap();
        let y = l2_inner(&f, &laplacian_apply(&h)).unwrap();
        prop_assert!((x - y).abs() <= 1e-10 * (1.0 + x.abs()));
    }

    #[test]
    fn closed_form_constants(lambda in 0.05f64..20.0) {
        let d = delta_of(lambda);
        let s = sigma_of(lambda);
        let lhs = 4.0 * (d - s) * (lambda / 2.0 - d - s);
        prop_assert!((lhs - lambda * lambda * d * d).abs() <= 1e-12 * (1.0 + lhs.abs()));
        let w = d * d - lambda * d + 1.0;
        prop_assert!(w > 0.0 && w < 1.0);
        prop_assert!(lambda - 3.0 * d > 0.0);
    }

    #[test]
    fn accretive_for_random_states(lambda in 0.2f64..6.0, seed in any::<u64>(), strip in any::<bool>()) {
        let (kind, variant) = if strip {
            (DomainKind::Strip, Variant::NoMassStrip)
        } else {
            (DomainKind::TruncatedWholeSpace, Variant::MassTermWholeSpace)
        };
        let g = line(kind, 63);
        let model = ModelConfig::unforced(variant, &g, lambda, 2.0, NonlinearitySpec::Zero).unwrap();
        let w = unit_state(&g, variant, &mut rng(seed, 0));
        let (lhs, bound) = accretivity_form(&w, &model);
        prop_assert!(lhs - bound >= -1e-10, "margin {}", lhs - bound);
    }

    #[test]
    fn theta_is_monotone(a in 0.0f64..3.0, b in 0.0f64..3.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (tl, th) = (cutoff_theta(lo).unwrap(), cutoff_theta(hi).unwrap());
        prop_assert!(tl <= th);
        prop_assert!((0.0..=1.0).contains(&tl) && (0.0..=1.0).contains(&th));
    }

    #[test]
    fn tail_energy_decreases_in_radius(seed in any::<u64>(), k in 0.5f64..4.0, dk in 0.0f64..4.0) {
        let g = line(DomainKind::TruncatedWholeSpace, 63);
        let w = unit_state(&g, Variant::MassTermWholeSpace, &mut rng(seed, 1));
        let d = delta_of(1.0);
        let near = tail_energy(&w, k, 1.0, d).unwrap();
        let far = tail_energy(&w, k + dk, 1.0, d).unwrap();
        prop_assert!(far <= near + 1e-14);
        prop_assert!(far >= 0.0);
    }

    #[test]
    fn lift_round_trip(a in values(), b in values(), delta in 0.0f64..0.5) {
        let g = line(DomainKind::TruncatedWholeSpace, 40);
        let (u0, u1) = (field(&g, &a), field(&g, &b));
        let (u, ut) = unlift(&lift(&u0, &u1, delta).unwrap(), delta);
        for (x, y) in ut.values().iter().zip(u1.values()) {
            prop_assert!((x - y).abs() <= 4.0 * f64::EPSILON);
        }
        prop_assert_eq!(u, u0);
    }

    #[test]
    fn linear_step_is_linear(seed in any::<u64>(), scale in -3.0f64..3.0) {
        let g = line(DomainKind::TruncatedWholeSpace, 41);
        let model = ModelConfig::unforced(Variant::MassTermWholeSpace, &g, 1.0, 2.0, NonlinearitySpec::Zero).unwrap();
        let stepper = Stepper::new(&model, 0.5 * g.min_spacing()).unwrap();
        let a = unit_state(&g, Variant::MassTermWholeSpace, &mut rng(seed, 0));
        let b = unit_state(&g, Variant::MassTermWholeSpace, &mut rng(seed, 1));
        let combo = State::new(
            a.u.add_scaled(scale, &b.u).unwrap(),
            a.v.add_scaled(scale, &b.v).unwrap(),
            0.0,
        ).unwrap();
        let (sa, sb, sc) = (stepper.step(&a).unwrap(), stepper.step(&b).unwrap(), stepper.step(&combo).unwrap());
        let expect_u = sa.u.add_scaled(scale, &sb.u).unwrap();
        let expect_v = sa.v.add_scaled(scale, &sb.v).unwrap();
        for (x, y) in sc.u.values().iter().zip(expect_u.values()).chain(sc.v.values().iter().zip(expect_v.values())) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }
}
