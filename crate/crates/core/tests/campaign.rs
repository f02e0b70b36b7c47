use std::collections::BTreeMap;

use fkm_core::campaign::*;

fn temp_dir(name: &str) -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("fkm-lab-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

#[test]
fn default_campaign_passes_and_is_complete() {
    let cfg = RunConfig {
        samples: 20,
        draws: 4,
        levels: 10,
        out: temp_dir("full"),
        ..RunConfig::default()
    };
    let outcome = run_campaign(&cfg).unwrap();
    assert!(outcome.pass(), "failures: {:?}", outcome.failures());
    assert_eq!(outcome.exit_code(), 0);
    assert_eq!(outcome.written.len(), 3 * SUITES.len());
    let mut seen: BTreeMap<(String, String), usize> = BTreeMap::new();
    for r in outcome.reports() {
        *seen
            .entry((r.config.clone(), r.identity_id.clone()))
            .or_default() += 1;
    }
    for cfg_id in ["m1k3", "m2k2", "m3k2"] {
        for id in CHECK_IDS {
            assert_eq!(
                seen.get(&(cfg_id.to_string(), id.to_string())),
                Some(&1),
                "{cfg_id} {id}"
            );
        }
    }
    assert_eq!(seen.len(), 3 * CHECK_IDS.len());
}

#[test]
fn reports_are_reproducible_modulo_header() {
    let run = |name: &str| {
        let cfg = RunConfig {
            pairs: vec![(1, 3)],
            samples: 10,
            draws: 2,
            levels: 5,
            out: temp_dir(name),
            ..RunConfig::default()
        };
        let outcome = run_campaign(&cfg).unwrap();
        outcome
            .written
            .iter()
            .map(|p| {
                let v: serde_json::Value =
                    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
                let mut v = v.as_object().unwrap().clone();
                assert!(v.remove("header").is_some());
                serde_json::to_string(&v).unwrap()
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(run("repro-a"), run("repro-b"));
}

#[test]
fn strict_tolerance_override_fails() {
    let mut cfg = RunConfig {
        pairs: vec![(1, 3)],
        samples: 10,
        draws: 2,
        levels: 5,
        out: temp_dir("strict"),
        ..RunConfig::default()
    };
    cfg.tolerances.insert("spectra.eigen.phi3".into(), 1e-15);
    let outcome = run_campaign(&cfg).unwrap();
    assert_eq!(outcome.exit_code(), 1);
    assert_eq!(
        outcome.failures(),
        vec!["m1k3:spectra.eigen.phi3".to_string()]
    );
}

#[test]
fn invalid_pair_is_rejected_before_running() {
    let out = temp_dir("invalid");
    let cfg = RunConfig {
        pairs: vec![(1, 3), (1, 2)],
        out: out.clone(),
        ..RunConfig::default()
    };
    let e = run_campaign(&cfg).unwrap_err();
    assert_eq!(error_exit_code(&e), 2);
    assert!(!out.exists());
}

#[test]
fn csv_and_human_formats() {
    for (fmt, ext) in [(Format::Csv, "csv"), (Format::Human, "txt")] {
        let cfg = RunConfig {
            pairs: vec![(1, 3)],
            samples: 10,
            draws: 1,
            levels: 3,
            format: fmt,
            out: temp_dir(ext),
            ..RunConfig::default()
        };
        let outcome = run_campaign(&cfg).unwrap();
        for p in &outcome.written {
            assert_eq!(p.extension().unwrap(), ext);
        }
    }
}
