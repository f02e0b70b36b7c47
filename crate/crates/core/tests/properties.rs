use fkm_core::clifford::sphere_element;
use fkm_core::fkm::VarietyTag;
use fkm_core::rng::{stream, unit_vector};
use fkm_core::varieties::{h_map, j_map, project_to_level, sample_mplus, sample_sphere, FocalSign};
use fkm_core::{FkmGeometry, Vector};
use proptest::prelude::*;

fn pair() -> impl Strategy<Value = (usize, usize)> {
    prop::sample::select(vec![(1, 3), (2, 2), (3, 2), (1, 5), (4, 2), (5, 2)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn orthogonal_sphere_elements_anticommute((m, k) in pair(), seed in any::<u64>()) {
        let g = FkmGeometry::from_pair(m, k).unwrap();
        let mut rng = stream(seed, "prop", 0);
        let a: Vector = unit_vector(&mut rng, m + 1);
        let mut b: Vector = unit_vector(&mut rng, m + 1);
        b -= &a * a.dot(&b);
        prop_assume!(b.norm() > 1e-3);
        b /= b.norm();
        let pa = sphere_element(g.sys(), &a).unwrap();
        let pb = sphere_element(g.sys(), &b).unwrap();
        let anti = &pa.matrix * &pb.matrix + &pb.matrix * &pa.matrix;
        prop_assert!(anti.amax() < 1e-12);
        let sq = &pa.matrix * &pa.matrix;
        let id = fkm_core::Matrix::identity(g.ambient_dim(), g.ambient_dim());
        prop_assert!((sq - id).amax() < 1e-12);
        prop_assert!(pa.matrix.trace().abs() < 1e-12);
    }

    #[test]
    fn quartic_is_invariant_and_homogeneous((m, k) in pair(), seed in any::<u64>(), scale in 0.1f64..3.0) {
        let g = FkmGeometry::from_pair(m, k).unwrap();
        let x = sample_sphere(&g, seed) * scale;
        let f = g.eval_f(&x);
        prop_assert!((g.eval_f(&-&x) - f).abs() < 1e-10 * (1.0 + f.abs()));
        for p in g.sys().matrices() {
            prop_assert!((g.eval_f(&(p * &x)) - f).abs() < 1e-10 * (1.0 + f.abs()));
        }
        prop_assert!((g.grad_f(&x).dot(&x) - 4.0 * f).abs() < 1e-11 * (1.0 + f.abs()));
        prop_assert!((f - scale.powi(4) * g.eval_f(&(&x / scale))).abs() < 1e-10 * (1.0 + f.abs()));
    }

    #[test]
    fn unit_quartic_stays_in_range((m, k) in pair(), seed in any::<u64>()) {
        let g = FkmGeometry::from_pair(m, k).unwrap();
        let x = sample_sphere(&g, seed);
        let f = g.eval_f(&x);
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&f));
    }

    #[test]
    fn projection_lands_on_requested_level((m, k) in pair(), seed in any::<u64>(), c in -0.95f64..0.95) {
        let g = FkmGeometry::from_pair(m, k).unwrap();
        let x0 = sample_sphere(&g, seed);
        let f0 = g.eval_f(&x0);
        prop_assume!(1.0 - f0 * f0 > 1e-6);
        let proj = project_to_level(&g, &x0, c).unwrap();
        prop_assert!((g.eval_f(&proj.point) - c).abs() < 1e-12);
        prop_assert!((proj.point.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn focal_round_trip((m, k) in pair(), seed in any::<u64>()) {
        let g = FkmGeometry::from_pair(m, k).unwrap();
        let p = fkm_core::varieties::sample_sphere_element(&g, seed);
        let x = sample_mplus(&g, seed ^ 0x5a5a).unwrap();
        for sign in [FocalSign::Plus, FocalSign::Minus] {
            let y = h_map(&g, &p, sign, &x);
            prop_assert!(g.membership(&y, &VarietyTag::Mn) < 1e-10);
            prop_assert!((j_map(&g, &y).unwrap() - &x).amax() < 1e-10);
        }
    }
}
