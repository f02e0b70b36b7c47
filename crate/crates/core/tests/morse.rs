use fkm_core::fkm::{FkmGeometry, VarietyTag};
use fkm_core::morse::*;
use fkm_core::rng::derive_seed;
use fkm_core::spectra::*;
use fkm_core::varieties::*;

const CONFIGS: [(usize, usize); 3] = [(1, 3), (2, 2), (3, 2)];

fn geom(m: usize, k: usize) -> FkmGeometry<f64> {
    FkmGeometry::from_pair(m, k).unwrap()
}

#[test]
fn eight_critical_points_shared_by_phi1_and_phi3() {
    for (m, k) in CONFIGS {
        let g = geom(m, k);
        for d in 0..3 {
            let phi1 = draw_spec(&g, EigenfunctionId::Phi1, derive_seed(1, "d", d)).unwrap();
            let q = phi1.point().unwrap().clone();
            let phi3 =
                EigenfunctionSpec::new(&g, EigenfunctionId::Phi3, Parameter::Point(q.clone()))
                    .unwrap();
            let a = critical_points(&g, &phi1).unwrap();
            let b = critical_points(&g, &phi3).unwrap();
            assert_eq!(a.len(), 8);
            assert_eq!(b.len(), 8);
            for (p1, p3) in a.iter().zip(&b) {
                assert!((&p1.x - &p3.x).norm() < 1e-9);
                assert!(p1.gradient_norm < 1e-9 && p3.gradient_norm < 1e-9);
                assert!(!p1.degenerate && !p3.degenerate);
                assert!(
                    p1.fd_relative_error < 1e-4,
                    "phi1 ({m},{k}) {}",
                    p1.fd_relative_error
                );
                assert!(
                    p3.fd_relative_error < 1e-4,
                    "phi3 ({m},{k}) {}",
                    p3.fd_relative_error
                );
                assert!(span_residual(&g, &p1.x, &q).unwrap() < 1e-9);
                assert!(g.membership(&p1.x, &VarietyTag::Mn) < 1e-12);
            }
        }
    }
}

#[test]
fn phi1_reference_hessian_has_flipped_sign_phi3_does_not() {
    // Derived independently: Hess φ1 = +⟨μξ − x, q1⟩, Hess φ3 = −μ⟨μξ − x, q1⟩.
    let g = geom(2, 2);
    let phi1 = draw_spec(&g, EigenfunctionId::Phi1, 5).unwrap();
    let phi3 = EigenfunctionSpec::new(&g, EigenfunctionId::Phi3, phi1.parameter.clone()).unwrap();
    for p in critical_points(&g, &phi1).unwrap() {
        assert_eq!(p.closed_form_sign, -1);
    }
    for p in critical_points(&g, &phi3).unwrap() {
        assert_eq!(p.closed_form_sign, 1);
    }
}

#[test]
fn morse_index_matches_diagonal_signs() {
    let g = geom(1, 3);
    let spec = draw_spec(&g, EigenfunctionId::Phi1, 8).unwrap();
    let pts = critical_points(&g, &spec).unwrap();
    let mut total = 0;
    for p in &pts {
        assert_eq!(
            p.morse_index,
            p.hessian_diagonal.iter().filter(|v| **v < 0.0).count()
        );
        total += p.morse_index;
    }
    // One maximum and one minimum of ⟨x, q1⟩ exist on the compact M^n.
    assert!(pts.iter().any(|p| p.morse_index == 0));
    assert!(pts.iter().any(|p| p.morse_index == g.n()));
    assert!(total > 0);
}

#[test]
fn four_omega2_critical_points() {
    for (m, k) in CONFIGS {
        let g = geom(m, k);
        for d in 0..3 {
            let spec = draw_spec(&g, EigenfunctionId::Omega2, derive_seed(2, "d", d)).unwrap();
            let pts = critical_points(&g, &spec).unwrap();
            assert_eq!(pts.len(), 4);
            for p in &pts {
                assert!(p.gradient_norm < 1e-9, "({m},{k}) {}", p.gradient_norm);
                assert!(!p.degenerate);
                assert!(
                    p.fd_relative_error < 1e-5,
                    "trace residual {}",
                    p.fd_relative_error
                );
                assert!(g.membership(&p.x, &VarietyTag::Mminus) < 1e-10);
            }
        }
    }
}

#[test]
fn degenerate_parameters_are_rejected() {
    let g = geom(1, 3);
    let on_mplus = sample_mplus(&g, 3).unwrap();
    assert!(matches!(
        find_critical_points_normal_geodesic(&g, &on_mplus),
        Err(fkm_core::Error::DegenerateParameter(_))
    ));
    let on_mminus = sample_mminus(&g, 3).x;
    assert!(matches!(
        find_critical_points_omega2(&g, &on_mminus),
        Err(fkm_core::Error::DegenerateParameter(_))
    ));
}

#[test]
fn hessian_degenerates_when_q1_reaches_focal_sets_only() {
    for (m, k) in CONFIGS {
        let g = geom(m, k);
        let rep = verify_degeneracy_onset(&g, 5, 1).unwrap();
        assert!(rep.pass, "({m},{k}) {}", rep.max_residual);
        let on_mn: f64 = rep.notes["min_diagonal_q1_on_Mn"].parse().unwrap();
        assert!(on_mn > 1e-3, "q1 on M^n gave {on_mn}");
    }
}

#[test]
fn phi2_critical_set_and_focal_maps() {
    for (m, k) in CONFIGS {
        let g = geom(m, k);
        let p = sample_sphere_element(&g, 4);
        let rep = verify_critical_set_phi2(&g, &p, 10, 2, 1e-9).unwrap();
        assert!(rep.pass, "({m},{k}) {}", rep.max_residual);
        for rep in verify_focal_maps(&g, &p, 10, 2, 1e-10).unwrap() {
            assert!(
                rep.pass,
                "({m},{k}) {} {}",
                rep.identity_id, rep.max_residual
            );
        }
    }
}

#[test]
fn vpm_spheres() {
    for (m, k) in CONFIGS {
        let g = geom(m, k);
        let p = sample_sphere_element(&g, 6);
        for rep in verify_vpm_spheres(&g, &p, 5, 3, 1e-10).unwrap() {
            assert!(
                rep.pass,
                "({m},{k}) {} {}",
                rep.identity_id, rep.max_residual
            );
        }
    }
}

#[test]
fn mixed_eigenspace_vector_is_not_in_vplus() {
    let g = geom(1, 3);
    let p = sample_sphere_element(&g, 2);
    let a = sample_eigenspace(&p, true, 1);
    let b = sample_eigenspace(&p, false, 1);
    let x = (a * 0.8 + b * 0.6).normalize();
    assert!(p.form(&x) < 1.0 - 1e-3);
    assert!(g.membership(&x, &VarietyTag::Vplus(p)) > 1e-3);
}

#[test]
fn mean_curvature_profiles() {
    let g = geom(1, 3);
    let p = sample_sphere_element(&g, 9);
    let rep = verify_level_mean_curvature(&g, EigenfunctionId::Phi2, &p, 50, 1, 1e-6).unwrap();
    assert!(rep.pass, "improper case {}", rep.max_residual);
    let g = geom(2, 2);
    let p = sample_sphere_element(&g, 9);
    let rep = verify_level_mean_curvature(&g, EigenfunctionId::Phi2, &p, 50, 1, 1e-5).unwrap();
    assert!(rep.pass, "{}", rep.max_residual);
    assert_eq!(rep.notes["global_sign"], "1");
    let rows = mean_curvature_profile(&g, EigenfunctionId::Phi2, &p, 5, 1).unwrap();
    for r in rows {
        let want = 3.0 * r.t / (1.0 - 1.5 * r.t * r.t).sqrt();
        assert!((r.numeric - want).abs() < 1e-8);
    }
    let rep = verify_level_mean_curvature(&g, EigenfunctionId::Omega1, &p, 20, 1, 1e-6).unwrap();
    assert!(rep.pass);
}

#[test]
fn survey_counts_over_draws() {
    let g = geom(2, 2);
    for id in [
        EigenfunctionId::Phi1,
        EigenfunctionId::Phi3,
        EigenfunctionId::Omega2,
    ] {
        for rep in survey_reports(&g, id, 4, 3, 1e-4).unwrap() {
            assert!(rep.pass, "{} {}", rep.identity_id, rep.max_residual);
        }
    }
}

#[test]
fn csv_dump_has_a_row_per_point() {
    let g = geom(1, 3);
    let spec = draw_spec(&g, EigenfunctionId::Phi1, 1).unwrap();
    let pts = critical_points(&g, &spec).unwrap();
    let csv = critical_points_csv(&pts);
    assert_eq!(csv.lines().count(), 9);
    assert!(csv.starts_with("function,"));
}
