//! Acceptance gate: one PASS/FAIL line per criterion, full sample counts.

use std::process::ExitCode;

use fkm_core::calculus::verify_principal_curvatures;
use fkm_core::clifford::verify_clifford;
use fkm_core::fkm::verify_spherical_gradient;
use fkm_core::morse::{
    survey, verify_focal_maps, verify_level_mean_curvature, verify_vpm_spheres, DEGENERACY_TOL,
};
use fkm_core::report::VerificationReport;
use fkm_core::spectra::{
    draw_spec, ordering_report, verify_eigen_identity, verify_isoparametric_system,
    verify_tangency_claim, EigenfunctionId,
};
use fkm_core::varieties::sample_sphere_element;
use fkm_core::FkmGeometry;

const CONFIGS: [(usize, usize); 3] = [(1, 3), (2, 2), (3, 2)];
const SEED: u64 = 20240101;

struct Gate {
    failed: usize,
}

impl Gate {
    fn line(&mut self, n: usize, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failed += 1;
        }
        println!(
            "[{}] {n:>2}. {name}: {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
    }
}

fn geom(m: usize, k: usize) -> FkmGeometry {
    FkmGeometry::from_pair(m, k).expect("valid pair")
}

/// Pass iff every report passes; detail is the worst residual/tolerance.
fn summarize(reports: &[VerificationReport]) -> (bool, String) {
    let pass = !reports.is_empty() && reports.iter().all(|r| r.pass);
    let worst = reports
        .iter()
        .max_by(|a, b| (a.max_residual / a.tol).total_cmp(&(b.max_residual / b.tol)))
        .map(|r| {
            format!(
                "worst {} {} = {:.3e} (tol {:.0e})",
                r.config, r.identity_id, r.max_residual, r.tol
            )
        })
        .unwrap_or_else(|| "no reports".into());
    (pass, worst)
}

fn collect<F: FnMut(&FkmGeometry) -> Result<Vec<VerificationReport>, fkm_core::Error>>(
    mut f: F,
) -> (bool, String) {
    let mut all = Vec::new();
    for (m, k) in CONFIGS {
        match f(&geom(m, k)) {
            Ok(r) => all.extend(r),
            Err(e) => return (false, format!("m{m}k{k}: {e}")),
        }
    }
    summarize(&all)
}

fn main() -> ExitCode {
    let mut gate = Gate { failed: 0 };

    let (p, d) = collect(|g| Ok(vec![verify_clifford(g.sys(), 1e-12)]));
    gate.line(1, "Clifford axioms < 1e-12", p, d);

    let (p, d) = collect(|g| Ok(vec![verify_spherical_gradient(g, 1000, SEED, 1e-9)]));
    gate.line(2, "spherical gradient identity, 1e3 points, < 1e-9", p, d);

    let (p, d) = collect(|g| {
        EigenfunctionId::ALL
            .into_iter()
            .map(|id| {
                let tol = if id == EigenfunctionId::Phi3 {
                    1e-4
                } else {
                    1e-6
                };
                verify_eigen_identity(g, &draw_spec(g, id, SEED)?, 200, SEED, tol)
            })
            .collect()
    });
    gate.line(
        3,
        "eigenvalue equations n, 2n, 3n, 4m, l+m-1 over 200 samples",
        p,
        d,
    );

    let (p, d) = collect(|g| {
        [EigenfunctionId::Phi2, EigenfunctionId::Omega1]
            .into_iter()
            .map(|id| verify_isoparametric_system(g, &draw_spec(g, id, SEED)?, 200, SEED, 1e-8))
            .collect()
    });
    gate.line(4, "isoparametric systems for phi2 and omega1 < 1e-8", p, d);

    let mut counts_ok = true;
    let mut hess_ok = true;
    let mut count_detail = Vec::new();
    let mut worst_hess: f64 = 0.0;
    let mut signs = std::collections::BTreeSet::new();
    for (m, k) in CONFIGS {
        let g = geom(m, k);
        for id in [
            EigenfunctionId::Phi1,
            EigenfunctionId::Phi3,
            EigenfunctionId::Omega2,
        ] {
            match survey(&g, id, 20, SEED) {
                Ok(s) => {
                    let draws_ok = s.counts.len() == 20 && s.counts.max() == 0.0;
                    let nondegenerate = s.degenerate.len() == 20 && s.degenerate.max() == 0.0;
                    counts_ok &= draws_ok && nondegenerate;
                    if !(draws_ok && nondegenerate) {
                        count_detail.push(format!("m{m}k{k} {id}"));
                    }
                    if id != EigenfunctionId::Omega2 {
                        hess_ok &= s.hessian.max() < 1e-4;
                        worst_hess = worst_hess.max(s.hessian.max());
                        for sign in s.signs.keys() {
                            signs.insert(format!("{id}:{sign:+}"));
                        }
                    }
                }
                Err(e) => {
                    counts_ok = false;
                    hess_ok = false;
                    count_detail.push(format!("m{m}k{k} {id}: {e}"));
                }
            }
        }
    }
    let detail = if count_detail.is_empty() {
        format!("8/8/4 points in all 20 draws, min |Hessian| > {DEGENERACY_TOL:.0e}")
    } else {
        format!("failing: {}", count_detail.join(", "))
    };
    gate.line(
        5,
        "critical counts 8 (phi1), 8 (phi3), 4 (omega2), nondegenerate",
        counts_ok,
        detail,
    );
    gate.line(
        6,
        "Hessian closed forms vs finite differences < 1e-4 relative",
        hess_ok,
        format!(
            "worst {worst_hess:.3e}; recorded closed-form signs {}",
            signs.into_iter().collect::<Vec<_>>().join(" ")
        ),
    );

    let (p, d) = collect(|g| {
        let p = sample_sphere_element(g, SEED);
        let reps = verify_focal_maps(g, &p, 50, SEED, 1e-10)?;
        Ok(reps
            .into_iter()
            .filter(|r| {
                [
                    "morse.focal.roundtrip",
                    "morse.focal.level",
                    "morse.focal.rank",
                ]
                .contains(&r.identity_id.as_str())
            })
            .collect())
    });
    gate.line(
        7,
        "focal maps: j o h+ = id, <Ph+,h+> level, rank dh+ = n-m",
        p,
        d,
    );

    let improper = {
        let g = geom(1, 3);
        let p = sample_sphere_element(&g, SEED);
        verify_level_mean_curvature(&g, EigenfunctionId::Phi2, &p, 50, SEED, 1e-6)
    };
    let proper = {
        let g = geom(2, 2);
        let p = sample_sphere_element(&g, SEED);
        verify_level_mean_curvature(&g, EigenfunctionId::Phi2, &p, 50, SEED, 1e-5)
    };
    match (improper, proper) {
        (Ok(a), Ok(b)) => {
            let detail = format!(
                "(1,3) max |h| = {:.3e}; (2,2) max rel err = {:.3e}, global sign {}",
                a.max_residual, b.max_residual, b.notes["global_sign"]
            );
            gate.line(8, "mean curvature of phi2 levels", a.pass && b.pass, detail);
        }
        (a, b) => gate.line(
            8,
            "mean curvature of phi2 levels",
            false,
            format!("{:?} {:?}", a.err(), b.err()),
        ),
    }

    let (p, d) = collect(|g| Ok(vec![verify_tangency_claim(g, 200, SEED, 1e-9)?]));
    gate.line(9, "tangency claim over 200 M- samples < 1e-9", p, d);

    let (p, d) =
        collect(|g| verify_vpm_spheres(g, &sample_sphere_element(g, SEED), 20, SEED, 1e-10));
    gate.line(
        10,
        "V+- spheres: both inclusions < 1e-10, dimension l-1",
        p,
        d,
    );

    let (p, d) = collect(|g| verify_principal_curvatures(g, 200, SEED, 1e-6));
    gate.line(
        11,
        "principal curvatures, multiplicities, trace 0, |B|^2 = 3n",
        p,
        d,
    );

    let rep = ordering_report(&geom(1, 5));
    gate.line(
        12,
        "ordering report flags 4m < l+m-1 for (1,5)",
        rep.omega_inverted,
        format!("4m = 4, l+m-1 = 5, flag = {}", rep.omega_inverted),
    );

    println!("acceptance: {} of 12 criteria failed", gate.failed);
    if gate.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
