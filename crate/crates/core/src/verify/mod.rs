//! End-to-end verification pipelines: the forward direction (a non-recurrent
//! angle's parameter ray lands at a non-recurrent parameter taking the angle
//! as characteristic) and the converse (a non-recurrent parameter has at most
//! two characteristic angles, whose parameter rays land back at it).
//!
//! Every stage produces evidence; failures never abort the pipeline. The
//! verdict is `pass` only when all stages pass, and any unresolved stage
//! downgrades it to `inconclusive`, never to `pass`.

mod config;
mod report;

pub use config::{BatchConfig, BatchRun, ConfigError, VerifyConfig};
pub use report::*;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circle::{parse_angle, Angle};
use crate::dynamics::{critical_orbit_separation, find_cycles, Parameter, SeedGrid};
use crate::lamination::{
    characteristic_class, class_orbit_separation, critical_class, shortest_arc_check,
    LaminationClass, PullbackOptions,
};
use crate::ray::{trace_dynamical_ray, trace_param_ray, RayTraceResult};
use crate::symbolic::{angle_nonrecurrence, kneading, refute_periods};

/// Converts a rational in a bounded range to f64 without overflowing the
/// intermediate integer conversions.
fn rational_to_f64(r: &BigRational) -> f64 {
    let scale = BigInt::one() << 53;
    let scaled = (r * BigRational::from(scale)).floor().to_integer();
    scaled.to_f64().unwrap_or(f64::NAN) / (1u64 << 53) as f64
}

fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Seeded control angles: reduced rationals with bounded denominator.
pub fn control_angles(seed: u64, count: usize, max_denominator: u64) -> Vec<(String, Angle)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let q = rng.random_range(3..=max_denominator) as i64;
        let p = rng.random_range(1..q as u64) as i64;
        let angle = Angle::rational(p, q).expect("q > 0");
        let v = angle.exact().expect("rational");
        let spec = format!("rat:{}/{}", v.numer(), v.denom());
        out.push((spec, angle));
    }
    out
}

struct HypothesisStage {
    section: AngleCertificateSection,
    outcome: StageOutcome,
}

fn hypothesis_stage(theta: &Angle, cfg: &VerifyConfig) -> HypothesisStage {
    let mut outcome = StageOutcome::Pass;
    let cert = match angle_nonrecurrence(theta, cfg.angle_horizon, cfg.angle_precision_bits) {
        Ok(c) => Some(c),
        Err(e) => {
            outcome = StageOutcome::Inconclusive(format!("non-recurrence scan: {e}"));
            None
        }
    };
    let kn = match kneading(theta, cfg.kneading_depth, cfg.angle_precision_bits) {
        Ok(k) => Some(k),
        Err(e) => {
            if outcome == StageOutcome::Pass {
                outcome = StageOutcome::Fail(format!("kneading: {e}"));
            }
            None
        }
    };
    let refutation = kn.as_ref().and_then(|k| {
        let p_max = cfg.refute_max.min(k.word.symbols.len() / 2);
        refute_periods(&k.word.symbols, p_max).ok()
    });

    if let Some(c) = &cert {
        if let Some((m, n)) = c.periodic_collision {
            outcome = StageOutcome::Fail(format!(
                "orbit collision tau^{m} = tau^{n}: angle is eventually periodic"
            ));
        } else if !c.passes() {
            outcome = StageOutcome::Fail("no positive separation bound".into());
        }
    }
    if let Some(k) = &kn {
        if let Some(step) = k.disagreement {
            if !matches!(outcome, StageOutcome::Fail(_)) {
                outcome = StageOutcome::Fail(format!(
                    "one-sided itineraries disagree at step {step}: angle is periodic"
                ));
            }
        }
    }

    let head: String = kn
        .as_ref()
        .map(|k| {
            k.word
                .symbols
                .iter()
                .take(64)
                .map(|&b| if b { '1' } else { '0' })
                .collect()
        })
        .unwrap_or_default();
    let section = AngleCertificateSection {
        horizon: cfg.angle_horizon,
        delta_angle_lower: cert
            .as_ref()
            .and_then(|c| c.delta_lower.as_ref().map(rational_string)),
        delta_angle_lower_f64: cert
            .as_ref()
            .and_then(|c| c.delta_lower.as_ref().map(rational_to_f64)),
        argmin: cert.as_ref().and_then(|c| c.argmin),
        periodic_collision: cert.as_ref().and_then(|c| c.periodic_collision),
        kneading_depth: cfg.kneading_depth,
        kneading_prefix_head: head,
        plus_minus_disagreement: kn.as_ref().and_then(|k| k.disagreement),
        refute_horizon: refutation.as_ref().map(|r| r.p_max).unwrap_or(0),
        refuted_period_count: refutation.as_ref().map(|r| r.refuted.len()).unwrap_or(0),
        smallest_unrefuted_period: refutation.as_ref().and_then(|r| r.smallest_unrefuted),
        passed: outcome.passed(),
    };
    HypothesisStage { section, outcome }
}

struct CombinatoricsStage {
    section: ClassSummarySection,
    outcome: StageOutcome,
    class: Option<LaminationClass>,
}

fn combinatorics_stage(theta: &Angle, cfg: &VerifyConfig) -> CombinatoricsStage {
    let opts = PullbackOptions {
        arc_cap: 4096,
        base_bits: cfg.angle_precision_bits,
    };
    let class = match characteristic_class(theta, cfg.class_depth, &opts) {
        Ok(c) => c,
        Err(e) => {
            let section = ClassSummarySection {
                depth: cfg.class_depth,
                converged: false,
                characteristic_count: None,
                critical_count: None,
                characteristic_clusters: Vec::new(),
                separation_horizon: None,
                delta_class_lower: None,
                delta_class_lower_f64: None,
                wandering_ok: None,
                shortest_arc_ok: None,
                shortest_arc_vacuous: None,
                error: Some(e.to_string()),
                passed: false,
            };
            return CombinatoricsStage {
                section,
                outcome: StageOutcome::Inconclusive(format!("class computation: {e}")),
                class: None,
            };
        }
    };

    let mut outcome = StageOutcome::Pass;
    if !class.converged {
        outcome = StageOutcome::Inconclusive(format!(
            "characteristic class not converged at depth {} ({} clusters)",
            class.depth,
            class.clusters.len()
        ));
    } else if class.clusters.len() > 2 {
        outcome = StageOutcome::Fail(format!(
            "characteristic class has {} clusters (more than two)",
            class.clusters.len()
        ));
    }

    let crit = if class.converged {
        critical_class(&class).ok()
    } else {
        None
    };
    let (sep, arc) = if class.converged {
        (
            class_orbit_separation(&class, cfg.separation_horizon),
            shortest_arc_check(&class, cfg.shortest_arc_horizon),
        )
    } else {
        (
            Err(crate::lamination::LaminationError::NotConverged),
            Err(crate::lamination::LaminationError::NotConverged),
        )
    };

    let mut error = None;
    let (delta_s, delta_f, wandering) = match &sep {
        Ok(r) => (
            Some(rational_string(&r.delta_class_lower)),
            Some(rational_to_f64(&r.delta_class_lower)),
            Some(r.wandering_ok),
        ),
        Err(e) => {
            if outcome == StageOutcome::Pass {
                outcome = StageOutcome::Inconclusive(format!("class separation: {e}"));
            }
            error = Some(e.to_string());
            (None, None, None)
        }
    };
    let (arc_ok, arc_vac) = match &arc {
        Ok(r) => (Some(r.ok), Some(r.vacuous)),
        Err(e) => {
            if outcome == StageOutcome::Pass {
                outcome = StageOutcome::Inconclusive(format!("shortest arc: {e}"));
            }
            (None, None)
        }
    };
    if let Ok(r) = &sep {
        if r.delta_class_lower <= BigRational::zero() {
            outcome = StageOutcome::Fail("class orbit separation is not positive".into());
        } else if !r.wandering_ok {
            outcome = StageOutcome::Fail("class orbit coincidence: not wandering".into());
        }
    }
    if let Ok(r) = &arc {
        if !r.ok {
            outcome = StageOutcome::Fail("a later arc is certifiably shorter than S1+".into());
        }
    }

    let bits = (cfg.class_depth as u32) + 16;
    let theta_enc = theta.enclosure(bits);
    let clusters: Vec<ClusterRecord> = class
        .clusters
        .iter()
        .map(|c| ClusterRecord {
            binary_prefix: c
                .dyadic
                .as_ref()
                .map(|d| d.prefix_string())
                .unwrap_or_default(),
            decimal_lo: rational_to_f64(&c.lo),
            decimal_hi: rational_to_f64(&c.hi()),
            exact_rational: c
                .witness
                .as_ref()
                .and_then(|w| w.exact())
                .map(|v| rational_string(&v)),
            contains_base_angle: c.contains_value(&theta_enc.lo),
        })
        .collect();

    let section = ClassSummarySection {
        depth: class.depth,
        converged: class.converged,
        characteristic_count: Some(class.clusters.len()),
        critical_count: crit.as_ref().map(|c| c.clusters.len()),
        characteristic_clusters: clusters,
        separation_horizon: sep.as_ref().ok().map(|r| r.horizon),
        delta_class_lower: delta_s,
        delta_class_lower_f64: delta_f,
        wandering_ok: wandering,
        shortest_arc_ok: arc_ok,
        shortest_arc_vacuous: arc_vac,
        error,
        passed: outcome.passed(),
    };
    CombinatoricsStage {
        section,
        outcome,
        class: Some(class),
    }
}

struct ParamLandingStage {
    section: ParamLandingSection,
    outcome: StageOutcome,
    c_hat: Option<Parameter>,
    trace: Option<RayTraceResult>,
}

fn param_landing_stage(theta: &Angle, cfg: &VerifyConfig) -> ParamLandingStage {
    let sched = cfg.schedule();
    let opts = cfg.trace_options();
    match trace_param_ray(theta, &sched, &opts) {
        Ok(trace) => {
            let est = trace.landing_estimate;
            let c_hat = Parameter::from_complex(est).ok();
            let outcome = if trace.converged && c_hat.is_some() {
                StageOutcome::Pass
            } else {
                StageOutcome::Inconclusive(
                    trace
                        .failure
                        .clone()
                        .unwrap_or_else(|| "parameter ray tail did not converge".into()),
                )
            };
            let section = ParamLandingSection {
                c_hat_re: est.re,
                c_hat_im: est.im,
                tail_diameter: trace.tail_diameter,
                floor_log2: sched.floor_log2,
                converged: trace.converged,
                angle_bits_consumed: trace.angle_bits_consumed,
                failure: trace.failure.clone(),
                passed: outcome.passed(),
            };
            ParamLandingStage {
                section,
                outcome,
                c_hat,
                trace: Some(trace),
            }
        }
        Err(e) => ParamLandingStage {
            section: ParamLandingSection {
                c_hat_re: f64::NAN,
                c_hat_im: f64::NAN,
                tail_diameter: f64::INFINITY,
                floor_log2: sched.floor_log2,
                converged: false,
                angle_bits_consumed: 0,
                failure: Some(e.to_string()),
                passed: false,
            },
            outcome: StageOutcome::Inconclusive(format!("parameter trace: {e}")),
            c_hat: None,
            trace: None,
        },
    }
}

fn characteristic_stage(
    theta: &Angle,
    c_hat: Parameter,
    cfg: &VerifyConfig,
) -> (DynamicalLandingSection, StageOutcome) {
    let sched = cfg.schedule();
    let opts = cfg.trace_options();
    match trace_dynamical_ray(c_hat, theta, &sched, &opts) {
        Ok(trace) => {
            let z = trace.landing_estimate;
            let dist = (z - c_hat.as_complex()).norm();
            let outcome = if trace.converged && dist < cfg.char_tol {
                StageOutcome::Pass
            } else if trace.converged {
                StageOutcome::Fail(format!(
                    "dynamical ray lands {dist:.3e} from the critical value (tol {:.1e})",
                    cfg.char_tol
                ))
            } else {
                StageOutcome::Inconclusive(
                    trace
                        .failure
                        .clone()
                        .unwrap_or_else(|| "dynamical ray tail did not converge".into()),
                )
            };
            let section = DynamicalLandingSection {
                z_hat_re: z.re,
                z_hat_im: z.im,
                distance_to_critical_value: dist,
                char_tol: cfg.char_tol,
                converged: trace.converged,
                critical_proximity: trace.critical_proximity,
                failure: trace.failure,
                passed: outcome.passed(),
            };
            (section, outcome)
        }
        Err(e) => (
            DynamicalLandingSection {
                z_hat_re: f64::NAN,
                z_hat_im: f64::NAN,
                distance_to_critical_value: f64::INFINITY,
                char_tol: cfg.char_tol,
                converged: false,
                critical_proximity: false,
                failure: Some(e.to_string()),
                passed: false,
            },
            StageOutcome::Inconclusive(format!("dynamical trace: {e}")),
        ),
    }
}

/// Escape index expected for a boundary parameter sampled at potential
/// `2^floor_log2`: the orbit of an exterior ray point crosses the escape
/// radius once `2^n G` exceeds `ln R`.
fn predicted_escape_index(floor_log2: f64, escape_radius: f64) -> usize {
    (escape_radius.ln().log2() - floor_log2).ceil().max(1.0) as usize
}

fn orbit_certificate_stage(
    c: Parameter,
    cfg: &VerifyConfig,
    achieved_floor_log2: Option<f64>,
) -> (ParamCertificateSection, StageOutcome) {
    let diag = critical_orbit_separation(c, cfg.orbit_horizon, cfg.escape_radius);
    let predicted = achieved_floor_log2.map(|f| predicted_escape_index(f, cfg.escape_radius));
    let escape_consistent = match (diag.escaped, diag.escape_index, predicted) {
        (true, Some(idx), Some(p)) => Some(idx + 4 >= p),
        (true, _, None) => Some(false),
        _ => None,
    };
    let mut outcome = StageOutcome::Pass;
    if diag.min_critical_distance <= 0.0 {
        outcome = StageOutcome::Fail("critical orbit meets the critical point".into());
    } else if diag.escaped && escape_consistent != Some(true) {
        outcome = StageOutcome::Fail(format!(
            "critical orbit escapes at iterate {:?}, earlier than a boundary landing point \
             sampled at the achieved potential would allow (predicted {:?})",
            diag.escape_index, predicted
        ));
    } else if diag.drift_ratio > cfg.drift_factor {
        outcome = StageOutcome::Inconclusive(format!(
            "separation drift {:.3} exceeds allowed factor {:.3}",
            diag.drift_ratio, cfg.drift_factor
        ));
    }
    let section = ParamCertificateSection {
        horizon: diag.horizon,
        delta_param: diag.min_critical_distance,
        argmin: diag.argmin,
        escaped: diag.escaped,
        escape_index: diag.escape_index,
        trusted_iterates: diag.trusted_iterates,
        escape_consistent_with_potential: escape_consistent,
        predicted_escape_index: predicted,
        delta_at_tenth: diag.delta_at_tenth,
        drift_ratio: diag.drift_ratio,
        drift_factor_allowed: cfg.drift_factor,
        passed: outcome.passed(),
    };
    (section, outcome)
}

fn cycles_stage(c: Parameter, cfg: &VerifyConfig) -> (CyclesSection, StageOutcome) {
    let grid = SeedGrid {
        per_side: cfg.cycle_grid,
        radius: 2.0,
    };
    match find_cycles(c, cfg.cycle_max_period, &grid, cfg.cycle_tol) {
        Ok(scan) => {
            let outcome = if !scan.all_repelling {
                StageOutcome::Fail("a cycle with non-repelling multiplier exists".into())
            } else if !scan.complete {
                StageOutcome::Inconclusive("cycle coverage incomplete".into())
            } else {
                StageOutcome::Pass
            };
            let cycles = scan
                .cycles
                .iter()
                .map(|cy| CycleRecord {
                    period: cy.period,
                    multiplier_re: cy.multiplier.re,
                    multiplier_im: cy.multiplier.im,
                    multiplier_abs: cy.multiplier.norm(),
                    repelling: cy.is_repelling(),
                })
                .collect();
            let section = CyclesSection {
                max_period: scan.max_period,
                cycles,
                expected_cycle_counts: scan.expected_counts,
                found_cycle_counts: scan.found_counts,
                coverage_complete: scan.complete,
                all_repelling: scan.all_repelling,
                passed: outcome.passed(),
            };
            (section, outcome)
        }
        Err(e) => (
            CyclesSection {
                max_period: cfg.cycle_max_period,
                cycles: Vec::new(),
                expected_cycle_counts: Vec::new(),
                found_cycle_counts: Vec::new(),
                coverage_complete: false,
                all_repelling: false,
                passed: false,
            },
            StageOutcome::Inconclusive(format!("cycle scan: {e}")),
        ),
    }
}

/// Result of a forward run together with the data a chained converse needs.
pub struct ForwardRun {
    pub report: TheoremReport,
    pub c_hat: Option<Parameter>,
    pub characteristic_angles: Vec<(String, Angle)>,
    pub achieved_floor_log2: Option<f64>,
}

/// Runs the forward pipeline on a parsed angle.
pub fn verify_forward(theta: &Angle, angle_spec: &str, cfg: &VerifyConfig) -> ForwardRun {
    let hyp = hypothesis_stage(theta, cfg);
    let comb = combinatorics_stage(theta, cfg);
    let param = param_landing_stage(theta, cfg);

    let (dyn_section, dyn_outcome, cert_section, cert_outcome, cyc_section, cyc_outcome) =
        if let Some(c_hat) = param.c_hat {
            let (ds, dout) = characteristic_stage(theta, c_hat, cfg);
            let floor = param
                .trace
                .as_ref()
                .and_then(|t| t.samples.last().map(|s| s.log2_potential));
            let (ps, pout) = orbit_certificate_stage(c_hat, cfg, floor);
            let (cs, cout) = cycles_stage(c_hat, cfg);
            (Some(ds), dout, Some(ps), pout, Some(cs), cout)
        } else {
            let skip = || StageOutcome::Inconclusive("no landing estimate available".into());
            (None, skip(), None, skip(), None, skip())
        };

    let (verdict, reasons) = aggregate(&[
        &hyp.outcome,
        &comb.outcome,
        &param.outcome,
        &dyn_outcome,
        &cert_outcome,
        &cyc_outcome,
    ]);

    // Candidate characteristic angles for a chained converse run: the base
    // angle plus any second cluster's midpoint.
    let mut characteristic_angles = vec![(angle_spec.to_string(), theta.clone())];
    if let Some(class) = &comb.class {
        for c in &class.clusters {
            if c.witness.is_none() {
                let mid = c.midpoint();
                let spec = format!("rat:{}/{}", mid.numer(), mid.denom());
                if let Ok(a) = parse_angle(&spec) {
                    characteristic_angles.push((spec, a));
                }
            }
        }
    }

    let achieved_floor_log2 = param
        .trace
        .as_ref()
        .and_then(|t| t.samples.last().map(|s| s.log2_potential));
    let report = TheoremReport {
        schema_version: SCHEMA_VERSION,
        kind: "forward".into(),
        preamble: PREAMBLE.into(),
        angle_spec: Some(angle_spec.to_string()),
        angle_certificate: Some(hyp.section),
        class_summary: Some(comb.section),
        param_landing: Some(param.section),
        dynamical_landing: dyn_section,
        param_certificate: cert_section,
        cycles: cyc_section,
        converse: None,
        verdict: VerdictSection {
            status: verdict,
            reasons,
        },
    };
    ForwardRun {
        report,
        c_hat: param.c_hat,
        characteristic_angles,
        achieved_floor_log2,
    }
}

/// Parses the spec and runs the forward pipeline; parse failures yield a
/// failed report rather than an error.
pub fn verify_forward_spec(angle_spec: &str, cfg: &VerifyConfig) -> ForwardRun {
    match parse_angle(angle_spec) {
        Ok(theta) => verify_forward(&theta, angle_spec, cfg),
        Err(e) => ForwardRun {
            report: TheoremReport {
                schema_version: SCHEMA_VERSION,
                kind: "forward".into(),
                preamble: PREAMBLE.into(),
                angle_spec: Some(angle_spec.to_string()),
                angle_certificate: None,
                class_summary: None,
                param_landing: None,
                dynamical_landing: None,
                param_certificate: None,
                cycles: None,
                converse: None,
                verdict: VerdictSection {
                    status: Verdict::Fail,
                    reasons: vec![format!("fail: angle spec does not parse: {e}")],
                },
            },
            c_hat: None,
            characteristic_angles: Vec::new(),
            achieved_floor_log2: None,
        },
    }
}

/// Runs the converse pipeline on a parameter and a candidate angle list.
///
/// `assumed_floor_log2` carries the achieved ray potential when `c` is a
/// forward-run landing estimate; exterior escape consistent with that
/// potential then passes the screen.
pub fn verify_converse(
    c: Parameter,
    candidates: &[(String, Angle)],
    cfg: &VerifyConfig,
    assumed_floor_log2: Option<f64>,
) -> TheoremReport {
    let sched = cfg.schedule();
    let opts = cfg.trace_options();

    // Precondition screen: bounded (or potential-consistent) critical orbit
    // with positive separation, and all desk-scale cycles repelling.
    let mut screen_notes = Vec::new();
    let (cert_section, cert_outcome) = orbit_certificate_stage(c, cfg, assumed_floor_log2);
    let (cyc_section, cyc_outcome) = cycles_stage(c, cfg);
    let screen_passed = cert_outcome.passed() && cyc_outcome.passed();
    if let StageOutcome::Fail(r) | StageOutcome::Inconclusive(r) = &cert_outcome {
        screen_notes.push(format!("orbit screen: {r}"));
    }
    if let StageOutcome::Fail(r) | StageOutcome::Inconclusive(r) = &cyc_outcome {
        screen_notes.push(format!("cycle screen: {r}"));
    }

    let controls = control_angles(
        cfg.control_seed,
        cfg.control_count,
        cfg.control_denominator_max,
    );
    let mut records = Vec::new();
    let mut characteristic_count = 0usize;
    let mut controls_rejected = true;
    let mut rays_land = true;
    let mut rays_conclusive = true;
    for (spec, angle, is_control) in candidates
        .iter()
        .map(|(s, a)| (s.clone(), a.clone(), false))
        .chain(controls.into_iter().map(|(s, a)| (s, a, true)))
    {
        let screen = angle_nonrecurrence(&angle, cfg.angle_horizon.min(512), cfg.angle_precision_bits)
            .ok()
            .map(|c| c.passes());
        let dyn_trace = trace_dynamical_ray(c, &angle, &sched, &opts).ok();
        let (dist, dconv) = match &dyn_trace {
            Some(t) => (
                Some((t.landing_estimate - c.as_complex()).norm()),
                t.converged,
            ),
            None => (None, false),
        };
        let characteristic = dconv && dist.map(|d| d < cfg.char_tol).unwrap_or(false);
        let (param_distance, param_lands) = if characteristic {
            characteristic_count += 1;
            if is_control {
                controls_rejected = false;
            }
            match trace_param_ray(&angle, &sched, &opts) {
                Ok(t) if t.converged => {
                    let d = (t.landing_estimate - c.as_complex()).norm();
                    let lands = d < cfg.param_tol;
                    if !lands {
                        rays_land = false;
                    }
                    (Some(d), Some(lands))
                }
                _ => {
                    rays_conclusive = false;
                    (None, None)
                }
            }
        } else {
            (None, None)
        };
        records.push(CandidateRecord {
            spec,
            is_control,
            nonrecurrent_screen: screen,
            dynamical_distance: dist,
            dynamical_converged: dconv,
            characteristic,
            param_distance,
            param_lands_at_c: param_lands,
        });
    }

    let at_most_two = characteristic_count <= 2;
    let mut outcome = StageOutcome::Pass;
    if !screen_passed {
        outcome = StageOutcome::Fail(
            "parameter fails the repelling/non-recurrent precondition screen".into(),
        );
    } else if !at_most_two {
        outcome = StageOutcome::Fail(format!(
            "{characteristic_count} characteristic candidates exceed the bound of two"
        ));
    } else if !controls_rejected {
        outcome = StageOutcome::Fail("a control angle was marked characteristic".into());
    } else if characteristic_count == 0 {
        outcome = StageOutcome::Inconclusive(
            "no candidate angle is characteristic; the candidate list was insufficient".into(),
        );
    } else if !rays_land {
        outcome = StageOutcome::Fail(
            "a characteristic angle's parameter ray does not land at the parameter".into(),
        );
    } else if !rays_conclusive {
        outcome = StageOutcome::Inconclusive("a characteristic parameter ray did not converge".into());
    }

    let section = ConverseSection {
        c_re: c.re(),
        c_im: c.im(),
        screen_passed,
        screen_notes,
        candidates: records,
        characteristic_count,
        at_most_two,
        controls_rejected,
        characteristic_param_rays_land: rays_land,
        passed: outcome.passed(),
    };
    let (verdict, reasons) = aggregate(&[&outcome]);
    TheoremReport {
        schema_version: SCHEMA_VERSION,
        kind: "converse".into(),
        preamble: PREAMBLE.into(),
        angle_spec: None,
        angle_certificate: None,
        class_summary: None,
        param_landing: None,
        dynamical_landing: None,
        param_certificate: Some(cert_section),
        cycles: Some(cyc_section),
        converse: Some(section),
        verdict: VerdictSection {
            status: verdict,
            reasons,
        },
    }
}

/// Runs a batch: forward pipelines in declared order, each optionally chained
/// into a converse run on its own landing estimate. Items are isolated; one
/// failure never aborts the batch.
pub fn batch(config: &BatchConfig) -> BatchReport {
    let cfg = config.effective_config();
    let reports: Vec<Vec<TheoremReport>> = config
        .runs
        .par_iter()
        .map(|run| {
            let mut out = Vec::with_capacity(2);
            let fwd = verify_forward_spec(&run.angle, &cfg);
            let chain = run.converse;
            let c_hat = fwd.c_hat;
            let cands = fwd.characteristic_angles.clone();
            let floor = fwd.achieved_floor_log2;
            out.push(fwd.report);
            if chain {
                if let Some(c) = c_hat {
                    out.push(verify_converse(c, &cands, &cfg, floor));
                }
            }
            out
        })
        .collect();
    BatchReport {
        schema_version: SCHEMA_VERSION,
        reports: reports.into_iter().flatten().collect(),
    }
}
