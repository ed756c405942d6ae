//! Machine-readable report schema for the verification pipelines.
//!
//! Field order is fixed by the struct declarations, and all collections are
//! ordered, so serializing the same report twice yields identical bytes.

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// Standing disclaimer carried by every report.
pub const PREAMBLE: &str = "All verdicts are finite-depth, finite-precision evidence, never proof: \
     hypothesis screening refutes within a horizon, combinatorial classes are \
     computed to a depth, and landings are numerical Cauchy estimates. The \
     converse direction can only examine parameters supplied directly or \
     reached as forward landing estimates.";

/// Outcome of one pipeline stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StageOutcome {
    Pass,
    Fail(String),
    Inconclusive(String),
}

impl StageOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, StageOutcome::Pass)
    }
}

/// Aggregated verdict: fail dominates, any unresolved stage blocks a pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

pub fn aggregate(stages: &[&StageOutcome]) -> (Verdict, Vec<String>) {
    let mut reasons = Vec::new();
    let mut verdict = Verdict::Pass;
    for s in stages {
        match s {
            StageOutcome::Pass => {}
            StageOutcome::Fail(r) => {
                reasons.push(format!("fail: {r}"));
                verdict = Verdict::Fail;
            }
            StageOutcome::Inconclusive(r) => {
                reasons.push(format!("inconclusive: {r}"));
                if verdict == Verdict::Pass {
                    verdict = Verdict::Inconclusive;
                }
            }
        }
    }
    (verdict, reasons)
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictSection {
    pub status: Verdict,
    pub reasons: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AngleCertificateSection {
    pub horizon: usize,
    pub delta_angle_lower: Option<String>,
    pub delta_angle_lower_f64: Option<f64>,
    pub argmin: Option<usize>,
    pub periodic_collision: Option<(usize, usize)>,
    pub kneading_depth: usize,
    pub kneading_prefix_head: String,
    pub plus_minus_disagreement: Option<usize>,
    pub refute_horizon: usize,
    pub refuted_period_count: usize,
    pub smallest_unrefuted_period: Option<usize>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClusterRecord {
    pub binary_prefix: String,
    pub decimal_lo: f64,
    pub decimal_hi: f64,
    pub exact_rational: Option<String>,
    pub contains_base_angle: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassSummarySection {
    pub depth: usize,
    pub converged: bool,
    pub characteristic_count: Option<usize>,
    pub critical_count: Option<usize>,
    pub characteristic_clusters: Vec<ClusterRecord>,
    pub separation_horizon: Option<usize>,
    pub delta_class_lower: Option<String>,
    pub delta_class_lower_f64: Option<f64>,
    pub wandering_ok: Option<bool>,
    pub shortest_arc_ok: Option<bool>,
    pub shortest_arc_vacuous: Option<bool>,
    pub error: Option<String>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParamLandingSection {
    pub c_hat_re: f64,
    pub c_hat_im: f64,
    pub tail_diameter: f64,
    pub floor_log2: f64,
    pub converged: bool,
    pub angle_bits_consumed: u64,
    pub failure: Option<String>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DynamicalLandingSection {
    pub z_hat_re: f64,
    pub z_hat_im: f64,
    pub distance_to_critical_value: f64,
    pub char_tol: f64,
    pub converged: bool,
    pub critical_proximity: bool,
    pub failure: Option<String>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParamCertificateSection {
    pub horizon: usize,
    pub delta_param: f64,
    pub argmin: usize,
    pub escaped: bool,
    pub escape_index: Option<usize>,
    pub trusted_iterates: usize,
    /// For escaped orbits: whether the escape index matches the prediction
    /// for a boundary parameter sampled at the achieved ray potential.
    pub escape_consistent_with_potential: Option<bool>,
    pub predicted_escape_index: Option<usize>,
    pub delta_at_tenth: f64,
    pub drift_ratio: f64,
    pub drift_factor_allowed: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleRecord {
    pub period: usize,
    pub multiplier_re: f64,
    pub multiplier_im: f64,
    pub multiplier_abs: f64,
    pub repelling: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CyclesSection {
    pub max_period: usize,
    pub cycles: Vec<CycleRecord>,
    pub expected_cycle_counts: Vec<(usize, usize)>,
    pub found_cycle_counts: Vec<(usize, usize)>,
    pub coverage_complete: bool,
    pub all_repelling: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateRecord {
    pub spec: String,
    pub is_control: bool,
    pub nonrecurrent_screen: Option<bool>,
    pub dynamical_distance: Option<f64>,
    pub dynamical_converged: bool,
    pub characteristic: bool,
    pub param_distance: Option<f64>,
    pub param_lands_at_c: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConverseSection {
    pub c_re: f64,
    pub c_im: f64,
    pub screen_passed: bool,
    pub screen_notes: Vec<String>,
    pub candidates: Vec<CandidateRecord>,
    pub characteristic_count: usize,
    pub at_most_two: bool,
    pub controls_rejected: bool,
    pub characteristic_param_rays_land: bool,
    pub passed: bool,
}

/// Top-level report for one verification pipeline run.
#[derive(Clone, Debug, Serialize)]
pub struct TheoremReport {
    pub schema_version: u32,
    pub kind: String,
    pub preamble: String,
    pub angle_spec: Option<String>,
    pub angle_certificate: Option<AngleCertificateSection>,
    pub class_summary: Option<ClassSummarySection>,
    pub param_landing: Option<ParamLandingSection>,
    pub dynamical_landing: Option<DynamicalLandingSection>,
    pub param_certificate: Option<ParamCertificateSection>,
    pub cycles: Option<CyclesSection>,
    pub converse: Option<ConverseSection>,
    pub verdict: VerdictSection,
}

impl TheoremReport {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// A batch of reports, serialized in run order.
#[derive(Clone, Debug, Serialize)]
pub struct BatchReport {
    pub schema_version: u32,
    pub reports: Vec<TheoremReport>,
}

impl BatchReport {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Worst verdict across the batch, for process exit codes.
    pub fn overall(&self) -> Verdict {
        let mut v = Verdict::Pass;
        for r in &self.reports {
            match r.verdict.status {
                Verdict::Fail => return Verdict::Fail,
                Verdict::Inconclusive => v = Verdict::Inconclusive,
                Verdict::Pass => {}
            }
        }
        v
    }
}
