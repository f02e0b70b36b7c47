use fkm_core::fkm::FkmGeometry;
use fkm_core::spectra::*;
use fkm_core::varieties::*;

const CONFIGS: [(usize, usize); 3] = [(1, 3), (2, 2), (3, 2)];

fn geom(m: usize, k: usize) -> FkmGeometry<f64> {
    FkmGeometry::from_pair(m, k).unwrap()
}

fn tol(id: EigenfunctionId) -> f64 {
    if id == EigenfunctionId::Phi3 {
        1e-4
    } else {
        1e-6
    }
}

#[test]
fn all_eigen_identities_hold() {
    for (m, k) in CONFIGS {
        let g = geom(m, k);
        for id in EigenfunctionId::ALL {
            let spec = draw_spec(&g, id, 17).unwrap();
            let rep = verify_eigen_identity(&g, &spec, 40, 5, tol(id)).unwrap();
            assert!(rep.pass, "({m},{k}) {id}: {}", rep.max_residual);
        }
    }
}

#[test]
fn phi3_residual_is_finite_difference_sized() {
    let g = geom(2, 2);
    let spec = draw_spec(&g, EigenfunctionId::Phi3, 4).unwrap();
    let rep = verify_eigen_identity(&g, &spec, 20, 6, 1e-4).unwrap();
    assert!(rep.max_residual < 1e-5);
}

#[test]
fn wrong_eigenvalue_fails() {
    let g = geom(1, 3);
    for id in EigenfunctionId::ALL {
        let spec = draw_spec(&g, id, 9).unwrap();
        let lambda = spec.claimed_eigenvalue + 1.0;
        let rep = verify_eigen_identity(&g, &spec.with_eigenvalue(lambda), 20, 3, tol(id)).unwrap();
        assert!(!rep.pass, "{id} passed with a wrong eigenvalue");
    }
}

#[test]
fn isoparametric_systems_hold() {
    for (m, k) in CONFIGS {
        let g = geom(m, k);
        for id in [EigenfunctionId::Phi2, EigenfunctionId::Omega1] {
            let spec = draw_spec(&g, id, 2).unwrap();
            let rep = verify_isoparametric_system(&g, &spec, 50, 8, 1e-8).unwrap();
            assert!(rep.pass, "({m},{k}) {id}: {}", rep.max_residual);
        }
        let spec = draw_spec(&g, EigenfunctionId::Phi1, 2).unwrap();
        assert!(verify_isoparametric_system(&g, &spec, 5, 8, 1e-8).is_err());
    }
}

#[test]
fn phi2_gradient_and_normal_derivatives() {
    for (m, k) in CONFIGS {
        let g = geom(m, k);
        let p = sample_sphere_element(&g, 33);
        assert!(verify_phi2_gradient(&g, &p, 50, 1, 1e-9).unwrap().pass);
        let (a, b) = verify_phi2_normal_derivatives(&g, &p, 50, 1, 1e-6).unwrap();
        assert!(a.pass, "{}", a.max_residual);
        assert!(b.pass, "{}", b.max_residual);
    }
}

#[test]
fn phi2_range_is_attained_on_focal_sets() {
    let g = geom(2, 2);
    let p = sample_sphere_element(&g, 1);
    let rep = verify_phi2_range(&g, &p, 500, 3, 1e-8).unwrap();
    assert!(rep.pass);
    assert!((g.phi2_focal_level() - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
}

#[test]
fn tangency_claim_holds() {
    for (m, k) in CONFIGS {
        let g = geom(m, k);
        let rep = verify_tangency_claim(&g, 50, 4, 1e-9).unwrap();
        assert!(rep.pass, "({m},{k}) {}", rep.max_residual);
    }
}

#[test]
fn evaluation_examples() {
    let g = geom(1, 3);
    let p = sample_sphere_element(&g, 8);
    let x = sample_eigenspace(&p, true, 2);
    let omega1 =
        EigenfunctionSpec::new(&g, EigenfunctionId::Omega1, Parameter::Element(p.clone())).unwrap();
    assert!((eval(&g, &omega1, &x).unwrap() - 1.0).abs() < 1e-12);

    let s = sample_npm(&g, &p, FocalSign::Plus, 4).unwrap();
    let phi2 = EigenfunctionSpec::new(&g, EigenfunctionId::Phi2, Parameter::Element(p)).unwrap();
    assert!((eval(&g, &phi2, &s.y).unwrap() - g.phi2_focal_level()).abs() < 1e-10);

    let phi1 = draw_spec(&g, EigenfunctionId::Phi1, 3).unwrap();
    let q = phi1.point().unwrap();
    let y = sample_mn(&g, 12).unwrap();
    let mut z = &y - q * y.dot(q);
    z /= z.norm();
    // z ⊥ q1 but is not on M^n: evaluation refuses it.
    assert!(eval(&g, &phi1, &z).is_err());
    assert!(eval(&g, &phi1, &y).unwrap().abs() <= 1.0);
}

#[test]
fn ordering_flags() {
    for (m, k, flag) in [(1, 3, false), (2, 2, false), (3, 2, false), (1, 5, true)] {
        let g = geom(m, k);
        assert_eq!(ordering_report(&g).omega_inverted, flag, "({m},{k})");
    }
}
