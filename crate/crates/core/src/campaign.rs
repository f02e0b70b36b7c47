//! Verification campaigns: configuration, suite orchestration, tolerance
//! overrides, report files and exit codes.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::calculus::{
    verify_laplacian_cascade, verify_principal_curvatures, verify_two_laplacian,
};
use crate::clifford::verify_clifford;
use crate::error::{Error, Result};
use crate::fkm::{verify_euler, verify_invariance, verify_spherical_gradient, FkmGeometry};
use crate::morse;
use crate::report::{to_csv, to_human, VerificationReport};
use crate::rng::derive_seed;
use crate::spectra::{self, EigenfunctionId, EigenfunctionSpec, Parameter};
use crate::varieties::sample_sphere_element;

/// Environment variable overriding the output directory.
pub const OUT_ENV: &str = "FKM_LAB_OUT";

pub const DEFAULT_PAIRS: [(usize, usize); 3] = [(1, 3), (2, 2), (3, 2)];

/// Every identity id a campaign emits, once per configuration.
pub const CHECK_IDS: &[&str] = &[
    "clifford.axioms",
    "fkm.spherical_gradient",
    "fkm.euler",
    "fkm.invariance",
    "fkm.two_laplacian",
    "fkm.laplacian_cascade",
    "fkm.xi_phi2",
    "fkm.xi_xi_phi2",
    "fkm.principal_curvatures",
    "fkm.minimality",
    "fkm.second_fundamental_norm",
    "spectra.eigen.phi1",
    "spectra.eigen.phi2",
    "spectra.eigen.phi3",
    "spectra.eigen.omega1",
    "spectra.eigen.omega2",
    "spectra.iso.phi2",
    "spectra.iso.omega1",
    "spectra.phi2.gradient",
    "spectra.phi2.range",
    "spectra.tangency",
    "spectra.ordering",
    "morse.count.phi1",
    "morse.degenerate.phi1",
    "morse.gradient.phi1",
    "morse.hessian.phi1",
    "morse.span.phi1",
    "morse.count.phi3",
    "morse.degenerate.phi3",
    "morse.gradient.phi3",
    "morse.hessian.phi3",
    "morse.span.phi3",
    "morse.count.omega2",
    "morse.degenerate.omega2",
    "morse.gradient.omega2",
    "morse.hessian.omega2",
    "morse.degeneracy_onset",
    "morse.phi2.critical_set",
    "morse.focal.roundtrip",
    "morse.focal.level",
    "morse.focal.rank",
    "morse.focal.roundtrip_minus",
    "morse.focal.level_minus",
    "morse.vpm.plus",
    "morse.vpm.plus.dim",
    "morse.vpm.minus",
    "morse.vpm.minus.dim",
    "morse.mean_curvature.phi2",
    "morse.mean_curvature.omega1",
];

/// Default tolerance for an identity id in a configuration with `m`.
pub fn default_tolerance(id: &str, m: usize) -> f64 {
    match id {
        "clifford.axioms" | "fkm.euler" => 1e-12,
        "fkm.invariance"
        | "morse.focal.roundtrip"
        | "morse.focal.level"
        | "morse.focal.roundtrip_minus"
        | "morse.focal.level_minus"
        | "morse.vpm.plus"
        | "morse.vpm.minus" => 1e-10,
        "fkm.spherical_gradient"
        | "fkm.two_laplacian"
        | "fkm.xi_phi2"
        | "fkm.xi_xi_phi2"
        | "spectra.phi2.gradient"
        | "spectra.tangency"
        | "morse.phi2.critical_set" => 1e-9,
        "fkm.laplacian_cascade"
        | "spectra.iso.phi2"
        | "spectra.iso.omega1"
        | "spectra.phi2.range" => 1e-8,
        "spectra.eigen.phi3" | "morse.hessian.phi1" | "morse.hessian.phi3" => 1e-4,
        "morse.hessian.omega2" => 1e-5,
        "morse.mean_curvature.phi2" | "morse.mean_curvature.omega1" if m > 1 => 1e-5,
        id if id.starts_with("morse.gradient.") || id.starts_with("morse.span.") => 1e-9,
        id if id.starts_with("morse.count.")
            || id.starts_with("morse.degenerate.")
            || id.ends_with(".dim")
            || id == "morse.focal.rank"
            || id == "spectra.ordering" =>
        {
            0.5
        }
        _ => 1e-6,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Human,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Human => "txt",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "human" => Ok(Format::Human),
            other => Err(Error::InvalidArgument(format!("unknown format '{other}'"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Human => "human",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub pairs: Vec<(usize, usize)>,
    pub seed: u64,
    pub samples: usize,
    /// Independent parameter draws per critical-point function.
    pub draws: usize,
    /// Levels in the mean-curvature profiles.
    pub levels: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub out: PathBuf,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            pairs: DEFAULT_PAIRS.to_vec(),
            seed: 20240101,
            samples: 200,
            draws: 20,
            levels: 50,
            tolerances: BTreeMap::new(),
            out: PathBuf::from("out"),
            format: Format::Json,
        }
    }
}

/// `CHECK=VAL` tolerance override.
pub fn parse_tolerance(s: &str) -> Result<(String, f64)> {
    let (k, v) = s.split_once('=').ok_or_else(|| {
        Error::InvalidArgument(format!("tolerance override '{s}' is not CHECK=VAL"))
    })?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad tolerance value in '{s}'")))?;
    Ok((k.trim().to_string(), v))
}

/// `1:3, 2:2` or `(1,3) (2,2)`.
pub fn parse_pairs(s: &str) -> Result<Vec<(usize, usize)>> {
    let tokens = s
        .split(|c: char| c.is_whitespace() || matches!(c, ',' | '(' | ')' | ';'))
        .filter(|t| !t.is_empty());
    let mut pairs = Vec::new();
    let mut pending: Option<usize> = None;
    for tok in tokens {
        if let Some((a, b)) = tok.split_once(':') {
            pairs.push((parse_usize(a)?, parse_usize(b)?));
        } else if let Some(a) = pending.take() {
            pairs.push((a, parse_usize(tok)?));
        } else {
            pending = Some(parse_usize(tok)?);
        }
    }
    if pending.is_some() || pairs.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "cannot read (m, k) pairs from '{s}'"
        )));
    }
    Ok(pairs)
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("'{s}' is not a non-negative integer")))
}

impl RunConfig {
    /// Parse `key = value` lines; `#` starts a comment. Keys mirror the CLI
    /// flags: `pairs`, `seed`, `samples`, `draws`, `levels`, `out`, `format`
    /// and `tol.<check id>`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidArgument(format!("line {}: expected key = value", no + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "pairs" => cfg.pairs = parse_pairs(value)?,
                "seed" => {
                    cfg.seed = value
                        .parse()
                        .map_err(|_| Error::InvalidArgument(format!("bad seed '{value}'")))?
                }
                "samples" => cfg.samples = parse_usize(value)?,
                "draws" => cfg.draws = parse_usize(value)?,
                "levels" => cfg.levels = parse_usize(value)?,
                "out" => cfg.out = PathBuf::from(value),
                "format" => cfg.format = value.parse()?,
                k if k.starts_with("tol.") => {
                    let (id, tol) = parse_tolerance(&format!("{}={value}", &k[4..]))?;
                    cfg.tolerances.insert(id, tol);
                }
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "line {}: unknown key '{other}'",
                        no + 1
                    )))
                }
            }
        }
        Ok(cfg)
    }

    /// Apply the output-directory environment override.
    pub fn with_env(mut self) -> Self {
        if let Ok(dir) = std::env::var(OUT_ENV) {
            if !dir.is_empty() {
                self.out = PathBuf::from(dir);
            }
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 10 {
            return Err(Error::InvalidArgument(format!(
                "samples must be at least 10, got {}",
                self.samples
            )));
        }
        if self.draws == 0 || self.levels == 0 {
            return Err(Error::InvalidArgument(
                "draws and levels must be positive".into(),
            ));
        }
        for &(m, k) in &self.pairs {
            FkmGeometry::<f64>::from_pair(m, k)?;
        }
        for (id, tol) in &self.tolerances {
            if !CHECK_IDS.contains(&id.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "tolerance override for unknown check '{id}'"
                )));
            }
            if !(tol.is_finite() && *tol > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "tolerance for '{id}' must be positive"
                )));
            }
        }
        Ok(())
    }

    fn tolerance(&self, id: &str, m: usize) -> f64 {
        self.tolerances
            .get(id)
            .copied()
            .unwrap_or_else(|| default_tolerance(id, m))
    }
}

/// Reports of one suite for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub config: String,
    pub reports: Vec<VerificationReport>,
}

impl SuiteResult {
    pub fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }
}

#[derive(Debug, Serialize)]
struct ReportHeader {
    tool: &'static str,
    version: &'static str,
    generated_unix: u64,
}

#[derive(Debug, Serialize)]
struct ReportFile<'a> {
    header: ReportHeader,
    #[serde(flatten)]
    body: &'a SuiteResult,
}

pub const SUITES: [&str; 4] = ["clifford", "fkm", "spectra", "morse"];

/// All suites for one configuration, in order, with default tolerances
/// replaced by `cfg`'s overrides.
pub fn run_configuration(cfg: &RunConfig, m: usize, k: usize) -> Result<Vec<SuiteResult>> {
    let geom = FkmGeometry::<f64>::from_pair(m, k)?;
    let seed = derive_seed(cfg.seed, &geom.config_id(), 0);
    let n = cfg.samples;
    let tol = |id: &str| default_tolerance(id, m);
    let p = sample_sphere_element(&geom, derive_seed(seed, "suite-element", 0));
    let p_note = p
        .coefficients
        .iter()
        .map(|c| format!("{c:.17e}"))
        .collect::<Vec<_>>()
        .join(" ");

    let clifford = vec![verify_clifford(geom.sys(), tol("clifford.axioms"))
        .with_note("realization", crate::clifford::REALIZATION)];

    let (xi1, xi2) =
        spectra::verify_phi2_normal_derivatives(&geom, &p, n, seed, tol("fkm.xi_phi2"))?;
    let mut fkm = vec![
        verify_spherical_gradient(&geom, n.max(1000), seed, tol("fkm.spherical_gradient")),
        verify_euler(&geom, n, seed, tol("fkm.euler")),
        verify_invariance(&geom, n, seed, tol("fkm.invariance")),
        verify_two_laplacian(&geom, &p, n, seed, tol("fkm.two_laplacian"))?,
        verify_laplacian_cascade(&geom, &p, n, seed, tol("fkm.laplacian_cascade"))?,
        xi1,
        xi2.retolerate(tol("fkm.xi_xi_phi2")),
    ];
    fkm.extend(verify_principal_curvatures(
        &geom,
        n,
        seed,
        tol("fkm.principal_curvatures"),
    )?);

    let mut spectra_reports = Vec::new();
    let mut specs = BTreeMap::new();
    for id in EigenfunctionId::ALL {
        let spec = if id.takes_point() {
            spectra::draw_spec(&geom, id, derive_seed(seed, "spectra-spec", 0))?
        } else {
            EigenfunctionSpec::new(&geom, id, Parameter::Element(p.clone()))?
        };
        let name = format!("spectra.eigen.{id}");
        spectra_reports.push(spectra::verify_eigen_identity(
            &geom,
            &spec,
            n,
            seed,
            tol(&name),
        )?);
        specs.insert(id, spec);
    }
    for id in [EigenfunctionId::Phi2, EigenfunctionId::Omega1] {
        let name = format!("spectra.iso.{id}");
        spectra_reports.push(
            spectra::verify_isoparametric_system(&geom, &specs[&id], n, seed, tol(&name))?
                .with_note("P", &p_note),
        );
    }
    spectra_reports.push(spectra::verify_phi2_gradient(
        &geom,
        &p,
        n,
        seed,
        tol("spectra.phi2.gradient"),
    )?);
    spectra_reports.push(spectra::verify_phi2_range(
        &geom,
        &p,
        50 * n,
        seed,
        tol("spectra.phi2.range"),
    )?);
    spectra_reports.push(spectra::verify_tangency_claim(
        &geom,
        n,
        seed,
        tol("spectra.tangency"),
    )?);
    spectra_reports.push(spectra::verify_ordering(&geom, seed));

    let mut morse_reports = Vec::new();
    for id in [
        EigenfunctionId::Phi1,
        EigenfunctionId::Phi3,
        EigenfunctionId::Omega2,
    ] {
        morse_reports.extend(morse::survey_reports(
            &geom,
            id,
            cfg.draws,
            seed,
            tol(&format!("morse.hessian.{id}")),
        )?);
    }
    let few = (n / 10).max(5);
    morse_reports.push(morse::verify_degeneracy_onset(&geom, few, seed)?);
    morse_reports.push(morse::verify_critical_set_phi2(
        &geom,
        &p,
        few,
        seed,
        tol("morse.phi2.critical_set"),
    )?);
    morse_reports.extend(morse::verify_focal_maps(
        &geom,
        &p,
        few,
        seed,
        tol("morse.focal.roundtrip"),
    )?);
    morse_reports.extend(morse::verify_vpm_spheres(
        &geom,
        &p,
        few,
        seed,
        tol("morse.vpm.plus"),
    )?);
    for id in [EigenfunctionId::Phi2, EigenfunctionId::Omega1] {
        let name = format!("morse.mean_curvature.{id}");
        morse_reports.push(
            morse::verify_level_mean_curvature(&geom, id, &p, cfg.levels, seed, tol(&name))?
                .with_note("P", &p_note),
        );
    }

    let config = geom.config_id();
    let mut suites: Vec<SuiteResult> = [clifford, fkm, spectra_reports, morse_reports]
        .into_iter()
        .zip(SUITES)
        .map(|(reports, suite)| SuiteResult {
            suite: suite.into(),
            config: config.clone(),
            reports,
        })
        .collect();
    for s in &mut suites {
        for r in &mut s.reports {
            let t = cfg.tolerance(&r.identity_id, m);
            if t != r.tol {
                *r = r.clone().retolerate(t);
            }
        }
    }
    Ok(suites)
}

/// Outcome of a campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignOutcome {
    pub suites: Vec<SuiteResult>,
    pub written: Vec<PathBuf>,
}

impl CampaignOutcome {
    pub fn pass(&self) -> bool {
        self.suites.iter().all(SuiteResult::pass)
    }

    pub fn failures(&self) -> Vec<String> {
        self.suites
            .iter()
            .flat_map(|s| {
                s.reports
                    .iter()
                    .filter(|r| !r.pass)
                    .map(move |r| format!("{}:{}", s.config, r.identity_id))
            })
            .collect()
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass() {
            0
        } else {
            1
        }
    }

    pub fn reports(&self) -> Vec<VerificationReport> {
        self.suites
            .iter()
            .flat_map(|s| s.reports.iter().cloned())
            .collect()
    }
}

/// Exit status for an error that prevented a campaign from finishing.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) | Error::InvalidFkmPair { .. } => 2,
        Error::Io(_) => 1,
        _ => 3,
    }
}

/// Validate, run every configuration, and write one file per suite under
/// `out/m{m}k{k}/`.
pub fn run_campaign(cfg: &RunConfig) -> Result<CampaignOutcome> {
    cfg.validate()?;
    let mut suites = Vec::new();
    let mut written = Vec::new();
    for &(m, k) in &cfg.pairs {
        let results = run_configuration(cfg, m, k)?;
        for s in &results {
            written.push(write_suite(&cfg.out, s, cfg.format)?);
        }
        suites.extend(results);
    }
    Ok(CampaignOutcome { suites, written })
}

pub fn render(s: &SuiteResult, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => render_json(s)?,
        Format::Csv => to_csv(&s.reports),
        Format::Human => to_human(&s.reports),
    })
}

fn render_json(s: &SuiteResult) -> Result<String> {
    let generated_unix = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let file = ReportFile {
        header: ReportHeader {
            tool: "fkm-lab",
            version: env!("CARGO_PKG_VERSION"),
            generated_unix,
        },
        body: s,
    };
    serde_json::to_string_pretty(&file).map_err(|e| Error::Io(e.to_string()))
}

pub fn write_suite(out: &Path, s: &SuiteResult, format: Format) -> Result<PathBuf> {
    let dir = out.join(&s.config);
    std::fs::create_dir_all(&dir)?;
    let path = dir.join(format!("{}.{}", s.suite, format.extension()));
    std::fs::write(&path, render(s, format)?)?;
    Ok(path)
}
