//! Verification reports and their serializations.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// One decade bucket of a residual histogram: residuals in
/// `[10^decade, 10^(decade+1))`. Exact zeros and anything below `1e-17`
/// land in decade `-17`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub decade: i32,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity_id: String,
    pub config: String,
    pub seed: u64,
    pub samples: usize,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub histogram: Vec<HistogramBin>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, String>,
}

impl VerificationReport {
    pub fn with_note(mut self, key: &str, value: impl ToString) -> Self {
        self.notes.insert(key.to_string(), value.to_string());
        self
    }

    /// Re-judge against a different tolerance.
    pub fn retolerate(mut self, tol: f64) -> Self {
        self.tol = tol;
        self.pass = self.samples > 0 && self.max_residual.is_finite() && self.max_residual < tol;
        self
    }
}

/// Accumulates residuals for one identity.
#[derive(Debug, Clone, Default)]
pub struct Residuals {
    values: Vec<f64>,
}

impl Residuals {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, r: f64) {
        self.values.push(r.abs());
    }

    pub fn extend<I: IntoIterator<Item = f64>>(&mut self, rs: I) {
        for r in rs {
            self.push(r);
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Maximum residual; NaN propagates so that a NaN sample always fails.
    pub fn max(&self) -> f64 {
        self.values.iter().fold(0.0, |a: f64, &b| {
            if b.is_nan() || a.is_nan() {
                f64::NAN
            } else {
                a.max(b)
            }
        })
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            0.0
        } else {
            self.values.iter().sum::<f64>() / self.values.len() as f64
        }
    }

    fn histogram(&self) -> Vec<HistogramBin> {
        let mut bins: BTreeMap<i32, usize> = BTreeMap::new();
        for &r in &self.values {
            let d = if r.is_finite() && r >= 1e-17 {
                r.log10().floor() as i32
            } else if r.is_finite() {
                -17
            } else {
                i32::MAX
            };
            *bins.entry(d).or_default() += 1;
        }
        bins.into_iter()
            .map(|(decade, count)| HistogramBin { decade, count })
            .collect()
    }

    pub fn finish(
        &self,
        identity_id: &str,
        config: &str,
        seed: u64,
        tol: f64,
    ) -> VerificationReport {
        let max = self.max();
        VerificationReport {
            identity_id: identity_id.to_string(),
            config: config.to_string(),
            seed,
            samples: self.values.len(),
            max_residual: max,
            mean_residual: self.mean(),
            tol,
            pass: !self.values.is_empty() && max.is_finite() && max < tol,
            histogram: self.histogram(),
            notes: BTreeMap::new(),
        }
    }
}

pub const CSV_HEADER: &str = "identity_id,config,seed,samples,max_residual,mean_residual,tol,pass";

pub fn to_csv(reports: &[VerificationReport]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in reports {
        let _ = writeln!(
            s,
            "{},{},{},{},{:e},{:e},{:e},{}",
            r.identity_id,
            r.config,
            r.seed,
            r.samples,
            r.max_residual,
            r.mean_residual,
            r.tol,
            r.pass
        );
    }
    s
}

/// Plain-text residual table: check id, residual, tolerance, verdict.
pub fn to_human(reports: &[VerificationReport]) -> String {
    let width = reports
        .iter()
        .map(|r| r.identity_id.len())
        .max()
        .unwrap_or(8)
        .max(8);
    let mut s = format!(
        "{:<width$}  {:>12}  {:>10}  verdict\n",
        "check", "residual", "tol"
    );
    for r in reports {
        let _ = writeln!(
            s,
            "{:<width$}  {:>12.3e}  {:>10.1e}  {}",
            r.identity_id,
            r.max_residual,
            r.tol,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_requires_strictly_below_tolerance() {
        let mut r = Residuals::new();
        r.extend([1e-13, 3e-12, 0.0]);
        let rep = r.finish("x", "m1k3", 1, 1e-11);
        assert!(rep.pass);
        assert_eq!(rep.samples, 3);
        assert!((rep.max_residual - 3e-12).abs() < 1e-24);
        assert!(!rep.clone().retolerate(1e-12).pass);
        assert_eq!(rep.histogram.iter().map(|b| b.count).sum::<usize>(), 3);
    }

    #[test]
    fn nan_and_empty_fail() {
        let mut r = Residuals::new();
        r.push(f64::NAN);
        r.push(0.0);
        assert!(!r.finish("x", "c", 0, 1.0).pass);
        assert!(!Residuals::new().finish("x", "c", 0, 1.0).pass);
    }

    #[test]
    fn json_schema_fields_present() {
        let mut r = Residuals::new();
        r.push(0.5);
        let v = serde_json::to_value(r.finish("id", "m2k2", 9, 1.0)).unwrap();
        for key in [
            "identity_id",
            "config",
            "seed",
            "samples",
            "max_residual",
            "mean_residual",
            "tol",
            "pass",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }
}
