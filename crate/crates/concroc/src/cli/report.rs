//! Serializable report shapes for the JSON-emitting commands, including
//! the fitted-model format that round-trips through `from_parts`.

use concroc::logcon::LogConcaveFit;
use concroc::sim::{Quantiles, SimReport};
use concroc::smooth::SmoothedFit;
use serde::{Deserialize, Serialize};

/// Identifies the input file a report was computed from.
#[derive(Serialize, Clone)]
pub struct InputInfo {
    pub path: String,
    pub digest: String,
}

/// One fitted group: the piecewise-linear log-density, and the
/// smoothing parameters when a smoothed fit was requested.
#[derive(Serialize, Deserialize)]
pub struct FitGroup {
    pub knots: Vec<f64>,
    pub phi: Vec<f64>,
    pub objective: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_var: Option<f64>,
}

impl FitGroup {
    pub fn from_fit(fit: &LogConcaveFit) -> Self {
        FitGroup {
            knots: fit.knots().to_vec(),
            phi: fit.phi().to_vec(),
            objective: fit.objective(),
            gamma: None,
            sample_var: None,
        }
    }

    pub fn from_smoothed(s: &SmoothedFit) -> Self {
        FitGroup {
            gamma: Some(s.gamma()),
            sample_var: Some(s.sample_var()),
            ..Self::from_fit(s.base())
        }
    }

    /// Rebuild the fit; serde's float round trip is exact, so the
    /// reconstruction evaluates identically to the original.
    #[cfg(test)]
    pub fn to_fit(&self) -> concroc::error::Result<LogConcaveFit> {
        LogConcaveFit::from_parts(self.knots.clone(), self.phi.clone(), self.objective)
    }
}

#[derive(Serialize)]
pub struct FitReport {
    pub version: &'static str,
    pub input: InputInfo,
    pub group: String,
    pub log_transform: bool,
    pub smoothed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub controls: Option<FitGroup>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cases: Option<FitGroup>,
}

#[derive(Serialize)]
pub struct MethodAuc {
    pub method: &'static str,
    pub auc: f64,
    /// Closed-form cross-check, binormal only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<f64>,
}

#[derive(Serialize)]
pub struct AucReport {
    pub version: &'static str,
    pub input: InputInfo,
    pub log_transform: bool,
    pub auc: Vec<MethodAuc>,
}

#[derive(Serialize)]
pub struct CiRow {
    pub t: f64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub replicates: usize,
    pub redraws: usize,
}

#[derive(Serialize)]
pub struct ConfintReport {
    pub version: &'static str,
    pub input: InputInfo,
    pub method: &'static str,
    #[serde(rename = "B")]
    pub b: usize,
    pub alpha: f64,
    pub seed: u64,
    pub log_transform: bool,
    pub entries: Vec<CiRow>,
}

#[derive(Serialize)]
pub struct SummaryJson {
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

impl From<Quantiles> for SummaryJson {
    fn from(q: Quantiles) -> Self {
        SummaryJson {
            min: q.min,
            q25: q.q25,
            median: q.median,
            q75: q.q75,
            max: q.max,
        }
    }
}

#[derive(Serialize)]
pub struct EstimatorJson {
    pub method: &'static str,
    pub ase: Vec<f64>,
    pub ratio: Vec<f64>,
    pub ase_summary: SummaryJson,
    pub ratio_summary: SummaryJson,
}

#[derive(Serialize)]
pub struct ScenarioJson {
    pub id: usize,
    pub controls: String,
    pub cases: String,
    pub m: usize,
    pub n: usize,
}

#[derive(Serialize)]
pub struct SimulateReport {
    pub version: &'static str,
    pub scenario: ScenarioJson,
    #[serde(rename = "M")]
    pub reps: usize,
    pub seed: u64,
    pub failures: usize,
    pub grid: Vec<f64>,
    pub estimators: Vec<EstimatorJson>,
}

impl SimulateReport {
    pub fn from_sim(r: &SimReport) -> Self {
        SimulateReport {
            version: env!("CARGO_PKG_VERSION"),
            scenario: ScenarioJson {
                id: r.scenario,
                controls: r.f_label.clone(),
                cases: r.g_label.clone(),
                m: r.m,
                n: r.n,
            },
            reps: r.reps,
            seed: r.seed,
            failures: r.failures,
            grid: r.grid.clone(),
            estimators: r
                .estimators
                .iter()
                .map(|e| EstimatorJson {
                    method: e.kind.label(),
                    ase: e.ase.clone(),
                    ratio: e.ratio.clone(),
                    ase_summary: e.ase_summary.into(),
                    ratio_summary: e.ratio_summary.into(),
                })
                .collect(),
        }
    }
}

/// Serialize a report followed by a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports contain only finite numbers");
    s.push('\n');
    s
}
