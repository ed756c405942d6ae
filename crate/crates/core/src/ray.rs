//! Numerical tracing of external and parameter rays by Newton continuation
//! along decreasing potential.
//!
//! A ray point at potential `G` and angle `t` solves `f^n(x) = exp(2^n (G +
//! 2πi t))` for the depth `n` that lifts the target out to the working
//! radius. The potential is tracked as `log2 G`, so a schedule can descend
//! far below the smallest positive f64 while every solved quantity stays in
//! comfortable double range (`2^n G` is clamped to `[ln R, 2 ln R)`).
//! Parabolic landing points need exactly this: their rays approach the
//! landing parameter like `1/log^2(1/G)`.

use num_complex::Complex64;
use thiserror::Error;

use crate::circle::Angle;
use crate::dynamics::Parameter;

#[derive(Debug, Error)]
pub enum RayError {
    #[error("schedule must satisfy log2(g_start) > floor_log2")]
    BadSchedule,
    #[error("subdivisions per halving must be at least 1")]
    BadSubdivisions,
}

/// Geometric descent schedule for the log-potential.
#[derive(Clone, Copy, Debug)]
pub struct PotentialSchedule {
    /// Starting potential (linear scale).
    pub g_start: f64,
    /// Continuation steps per halving of the potential.
    pub subdivisions_per_halving: u32,
    /// Stop potential as `log2 G`; may be far below -1074.
    pub floor_log2: f64,
    /// Hard cap on continuation steps.
    pub max_steps: usize,
}

impl Default for PotentialSchedule {
    fn default() -> Self {
        PotentialSchedule {
            g_start: 100.0f64.ln(),
            subdivisions_per_halving: 8,
            // G_floor = 2^-22 * ln 2
            floor_log2: -22.0 + core::f64::consts::LN_2.log2(),
            max_steps: 200_000,
        }
    }
}

impl PotentialSchedule {
    /// Same defaults with a caller-chosen floor.
    pub fn with_floor_log2(floor_log2: f64) -> Self {
        PotentialSchedule {
            floor_log2,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<(), RayError> {
        if self.subdivisions_per_halving == 0 {
            return Err(RayError::BadSubdivisions);
        }
        if !(self.g_start.log2() > self.floor_log2) {
            return Err(RayError::BadSchedule);
        }
        Ok(())
    }
}

/// Newton and landing tolerances.
#[derive(Clone, Copy, Debug)]
pub struct TraceOptions {
    /// Relative residual target per accepted sample.
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub max_step_halvings: usize,
    /// Working radius the target is lifted out to.
    pub r_work: f64,
    /// Dynamical traces flag samples passing within this of the critical point.
    pub critical_guard: f64,
    /// Landing acceptance: diameter of the last `landing_window` samples.
    pub landing_window: usize,
    pub landing_tol: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            // The double-precision residual floor for these orbit solves sits
            // around 1e-12..1e-11 once escape-tail squarings accumulate.
            newton_tol: 1e-10,
            max_newton_iters: 60,
            max_step_halvings: 6,
            r_work: 100.0,
            critical_guard: 1e-3,
            landing_window: 8,
            landing_tol: 1e-6,
        }
    }
}

/// One accepted continuation sample.
#[derive(Clone, Copy, Debug)]
pub struct RaySample {
    /// `log2` of the potential.
    pub log2_potential: f64,
    pub position: Complex64,
    /// Relative residual `|f^n(x) - target| / |target|`.
    pub residual: f64,
    pub newton_iters: usize,
    /// Tolerance the sample was accepted at: `newton_tol`, widened by the
    /// running rounding-error bound of the orbit when that floor is higher.
    pub accepted_tol: f64,
}

/// Outcome of tracing one ray.
#[derive(Clone, Debug)]
pub struct RayTraceResult {
    pub samples: Vec<RaySample>,
    pub landing_estimate: Complex64,
    pub tail_diameter: f64,
    pub converged: bool,
    pub reached_floor: bool,
    pub angle_bits_consumed: u64,
    /// Dynamical traces only: some sample passed within `critical_guard` of 0.
    pub critical_proximity: bool,
    /// Populated when continuation was truncated by Newton divergence.
    pub failure: Option<String>,
}

#[derive(Clone, Copy)]
enum RayKind {
    /// Solve `f_c^n(c) = target` in the parameter `c`.
    Parameter,
    /// Solve `f_c^n(z) = target` in `z` at fixed `c`.
    Dynamical(Complex64),
}

/// Orbit value, derivative, and a first-order bound on the accumulated
/// rounding error of the value (per-step rounding amplified by `|2z|`).
fn orbit_value_derivative(
    kind: RayKind,
    x: Complex64,
    n: u32,
) -> Option<(Complex64, Complex64, f64)> {
    let eps = f64::EPSILON;
    let mut z = x;
    let mut dz = Complex64::new(1.0, 0.0);
    let mut err = 0.0f64;
    match kind {
        RayKind::Parameter => {
            for _ in 0..n {
                dz = 2.0 * z * dz + Complex64::new(1.0, 0.0);
                let zn = z.norm();
                err = 2.0 * zn * err + eps * (zn * zn + x.norm());
                z = z * z + x;
                if !z.is_finite() || z.norm() > 1e140 || dz.norm() > 1e290 {
                    return None;
                }
            }
        }
        RayKind::Dynamical(c) => {
            for _ in 0..n {
                dz = 2.0 * z * dz;
                let zn = z.norm();
                err = 2.0 * zn * err + eps * (zn * zn + c.norm());
                z = z * z + c;
                if !z.is_finite() || z.norm() > 1e140 || dz.norm() > 1e290 {
                    return None;
                }
            }
        }
    }
    Some((z, dz, err))
}

/// Depth and clamped linear potential for `log2 G = lg`: the smallest
/// `n >= 0` with `2^n G >= ln r_work`.
fn depth_for(lg: f64, ln_r: f64) -> (u32, f64) {
    let n = (ln_r.log2() - lg).ceil().max(0.0) as u32;
    let g = (lg + n as f64).exp2();
    (n, g)
}

struct SolveOutcome {
    x: Complex64,
    residual: f64,
    iters: usize,
    accepted_tol: f64,
}

fn solve_at(
    kind: RayKind,
    angle: &Angle,
    lg: f64,
    seed: Complex64,
    opts: &TraceOptions,
    bits_consumed: &mut u64,
) -> Option<SolveOutcome> {
    let ln_r = opts.r_work.ln();
    let (n, g) = depth_for(lg, ln_r);
    let (t_n, consumed) = angle.shifted_to_f64(n as u64);
    *bits_consumed = (*bits_consumed).max(consumed);
    let target = Complex64::from_polar(g.exp(), core::f64::consts::TAU * t_n);
    let tnorm = target.norm();
    let mut x = seed;
    let mut best: Option<(Complex64, f64)> = None;
    let mut stall = 0usize;
    let mut tol_eff = opts.newton_tol;
    for it in 0..opts.max_newton_iters {
        let (w, dw, err) = orbit_value_derivative(kind, x, n)?;
        // The achievable relative residual is limited by the orbit's own
        // rounding; measured floors sit a factor 4..30 below this bound.
        tol_eff = opts.newton_tol.max(2.0 * err / tnorm);
        let res = (w - target).norm() / tnorm;
        if res <= tol_eff {
            return Some(SolveOutcome {
                x,
                residual: res,
                iters: it,
                accepted_tol: tol_eff,
            });
        }
        match &best {
            Some((_, b)) if res >= *b => stall += 1,
            _ => {
                best = Some((x, res));
                stall = 0;
            }
        }
        if dw.norm() < 1e-280 {
            break;
        }
        let step = (w - target) / dw;
        // Machine-converged in the unknown even though the residual floor
        // was underestimated; accept the iterate.
        if step.norm() <= 1e-15 * x.norm().max(0.25) {
            return Some(SolveOutcome {
                x,
                residual: res,
                iters: it,
                accepted_tol: tol_eff.max(res),
            });
        }
        if stall >= 3 {
            break;
        }
        x -= step;
        if !x.is_finite() || x.norm() > 1e6 {
            return None;
        }
    }
    // A stalled best iterate is accepted only within a modest multiple of
    // the rounding floor; anything worse is treated as divergence.
    match best {
        Some((bx, bres)) if bres <= 8.0 * tol_eff => Some(SolveOutcome {
            x: bx,
            residual: bres,
            iters: opts.max_newton_iters,
            accepted_tol: 8.0 * tol_eff,
        }),
        _ => None,
    }
}

fn trace(
    kind: RayKind,
    angle: &Angle,
    sched: &PotentialSchedule,
    opts: &TraceOptions,
) -> Result<RayTraceResult, RayError> {
    sched.validate()?;
    let mut bits_consumed = 0u64;
    let (t0, consumed0) = angle.shifted_to_f64(0);
    bits_consumed = bits_consumed.max(consumed0);
    let mut lg = sched.g_start.log2();
    let seed = Complex64::from_polar(sched.g_start.exp(), core::f64::consts::TAU * t0);
    let mut samples: Vec<RaySample> = Vec::new();
    let mut failure = None;

    // Anchor sample at the starting potential.
    match solve_at(kind, angle, lg, seed, opts, &mut bits_consumed) {
        Some(s) => samples.push(RaySample {
            log2_potential: lg,
            position: s.x,
            residual: s.residual,
            newton_iters: s.iters,
            accepted_tol: s.accepted_tol,
        }),
        None => failure = Some("newton divergence at the starting potential".to_string()),
    }

    let dlg = 1.0 / sched.subdivisions_per_halving as f64;
    let mut reached_floor = false;
    if failure.is_none() {
        let mut steps = 0usize;
        while lg > sched.floor_log2 {
            if steps >= sched.max_steps {
                failure = Some(format!("step cap {} reached at log2 G = {lg:.2}", sched.max_steps));
                break;
            }
            let proposal = (lg - dlg).max(sched.floor_log2);
            let mut attempt = proposal;
            let mut accepted = None;
            for _ in 0..=opts.max_step_halvings {
                let seed = samples.last().unwrap().position;
                if let Some(s) = solve_at(kind, angle, attempt, seed, opts, &mut bits_consumed) {
                    accepted = Some((attempt, s));
                    break;
                }
                attempt = 0.5 * (lg + attempt);
            }
            match accepted {
                Some((at, s)) => {
                    lg = at;
                    samples.push(RaySample {
                        log2_potential: at,
                        position: s.x,
                        residual: s.residual,
                        newton_iters: s.iters,
                        accepted_tol: s.accepted_tol,
                    });
                }
                None => {
                    failure = Some(format!("newton divergence at log2 G = {proposal:.2}"));
                    break;
                }
            }
            steps += 1;
        }
        reached_floor = lg <= sched.floor_log2;
    }

    let positions: Vec<Complex64> = samples.iter().map(|s| s.position).collect();
    let landing = landing_estimate(
        &positions,
        opts.landing_tol,
        opts.landing_window,
        reached_floor && failure.is_none(),
    );
    let critical_proximity = matches!(kind, RayKind::Dynamical(_))
        && samples.iter().any(|s| s.position.norm() < opts.critical_guard);
    Ok(RayTraceResult {
        landing_estimate: landing.estimate,
        tail_diameter: landing.tail_diameter,
        converged: landing.converged,
        reached_floor,
        angle_bits_consumed: bits_consumed,
        critical_proximity,
        failure,
        samples,
    })
}

/// Traces the parameter ray at `theta`.
pub fn trace_param_ray(
    theta: &Angle,
    sched: &PotentialSchedule,
    opts: &TraceOptions,
) -> Result<RayTraceResult, RayError> {
    trace(RayKind::Parameter, theta, sched, opts)
}

/// Traces the external ray at angle `t` in the dynamical plane of `f_c`.
pub fn trace_dynamical_ray(
    c: Parameter,
    t: &Angle,
    sched: &PotentialSchedule,
    opts: &TraceOptions,
) -> Result<RayTraceResult, RayError> {
    trace(RayKind::Dynamical(c.as_complex()), t, sched, opts)
}

/// Numerical Cauchy criterion over the sample tail.
#[derive(Clone, Copy, Debug)]
pub struct LandingEstimate {
    pub estimate: Complex64,
    pub tail_diameter: f64,
    pub converged: bool,
}

/// Estimate = last sample; tail diameter = diameter of the last `window`
/// positions; converged only when the tail is tight and the floor was reached.
pub fn landing_estimate(
    positions: &[Complex64],
    tol: f64,
    window: usize,
    reached_floor: bool,
) -> LandingEstimate {
    if positions.is_empty() {
        return LandingEstimate {
            estimate: Complex64::new(f64::NAN, f64::NAN),
            tail_diameter: f64::INFINITY,
            converged: false,
        };
    }
    let tail = &positions[positions.len().saturating_sub(window.max(1))..];
    let mut diameter: f64 = 0.0;
    for i in 0..tail.len() {
        for j in i + 1..tail.len() {
            diameter = diameter.max((tail[i] - tail[j]).norm());
        }
    }
    LandingEstimate {
        estimate: *positions.last().unwrap(),
        tail_diameter: diameter,
        converged: reached_floor && diameter < tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::parse_angle;

    fn defaults() -> (PotentialSchedule, TraceOptions) {
        (PotentialSchedule::default(), TraceOptions::default())
    }

    #[test]
    fn param_ray_at_one_half_lands_on_tip() {
        let (sched, opts) = defaults();
        let theta = parse_angle("rat:1/2").unwrap();
        let r = trace_param_ray(&theta, &sched, &opts).unwrap();
        assert!(r.converged, "failure: {:?}", r.failure);
        assert!(
            (r.landing_estimate - Complex64::new(-2.0, 0.0)).norm() < 1e-4,
            "landing {:?}",
            r.landing_estimate
        );
    }

    #[test]
    fn param_ray_at_zero_approaches_cusp() {
        // The cusp landing is logarithmic in the potential; a floor of
        // 2^-320 brings the estimate within (pi/320)^2 ~ 1e-4.
        let sched = PotentialSchedule::with_floor_log2(-320.0);
        let opts = TraceOptions::default();
        let theta = parse_angle("rat:0/1").unwrap();
        let r = trace_param_ray(&theta, &sched, &opts).unwrap();
        assert!(r.converged, "failure: {:?}", r.failure);
        let err = (r.landing_estimate - Complex64::new(0.25, 0.0)).norm();
        assert!(err < 2e-4, "cusp error {err}");
    }

    #[test]
    fn param_ray_symmetry_conjugate() {
        let (sched, opts) = defaults();
        let a = trace_param_ray(&parse_angle("rat:1/3").unwrap(), &sched, &opts).unwrap();
        let b = trace_param_ray(&parse_angle("rat:2/3").unwrap(), &sched, &opts).unwrap();
        let conj = Complex64::new(b.landing_estimate.re, -b.landing_estimate.im);
        assert!((a.landing_estimate - conj).norm() < 1e-6);
    }

    #[test]
    fn dynamical_rays_for_zero_are_radial() {
        let (sched, opts) = defaults();
        let c = Parameter::new(0.0, 0.0).unwrap();
        for spec in ["rat:1/3", "rat:1/7", "rat:5/8"] {
            let t = parse_angle(spec).unwrap();
            let r = trace_dynamical_ray(c, &t, &sched, &opts).unwrap();
            assert!(r.converged);
            // Every sample must sit on the radial ray exp(G + 2 pi i t).
            let angle = t.to_f64() * core::f64::consts::TAU;
            for s in &r.samples {
                let g = s.log2_potential.exp2();
                let expect = Complex64::from_polar(g.exp(), angle);
                assert!(
                    (s.position - expect).norm() <= 1e-8 * expect.norm().max(1.0),
                    "sample off radial ray at log2G={}",
                    s.log2_potential
                );
            }
            let landing = Complex64::from_polar(1.0, angle);
            assert!((r.landing_estimate - landing).norm() < 1e-6);
        }
    }

    #[test]
    fn dynamical_rays_for_minus_two_follow_chebyshev() {
        let (sched, opts) = defaults();
        let c = Parameter::new(-2.0, 0.0).unwrap();
        for (spec, t) in [("rat:0/1", 0.0), ("rat:1/4", 0.25), ("rat:1/2", 0.5)] {
            let a = parse_angle(spec).unwrap();
            let r = trace_dynamical_ray(c, &a, &sched, &opts).unwrap();
            assert!(r.converged, "{spec}: {:?}", r.failure);
            let landing = Complex64::new(2.0 * (core::f64::consts::TAU * t).cos(), 0.0);
            let err = (r.landing_estimate - landing).norm();
            assert!(err < 1e-6, "{spec} err {err}");
        }
    }

    #[test]
    fn residual_contract_holds() {
        let (sched, opts) = defaults();
        let theta = parse_angle("rule:triangular").unwrap();
        let r = trace_param_ray(&theta, &sched, &opts).unwrap();
        assert!(r.converged);
        for s in &r.samples {
            assert!(
                s.residual <= s.accepted_tol,
                "residual {} above accepted tolerance {} at log2G {}",
                s.residual,
                s.accepted_tol,
                s.log2_potential
            );
            // Shallow solves are well-conditioned and must meet the strict
            // Newton tolerance outright.
            if s.log2_potential > -8.0 {
                assert!(s.residual <= opts.newton_tol);
            }
        }
        assert!(r.angle_bits_consumed >= 64);
    }

    #[test]
    fn potentials_strictly_decrease() {
        let (sched, opts) = defaults();
        let r = trace_param_ray(&parse_angle("rat:1/3").unwrap(), &sched, &opts).unwrap();
        for w in r.samples.windows(2) {
            assert!(w[1].log2_potential < w[0].log2_potential);
        }
    }

    #[test]
    fn functoriality_under_doubling() {
        // Applying f_c to the sample at potential G of ray t matches the
        // sample at potential 2G of ray 2t.
        let sched = PotentialSchedule::default();
        let opts = TraceOptions::default();
        let c = Parameter::new(-1.0, 0.0).unwrap();
        let t = parse_angle("rat:1/5").unwrap();
        let t2 = t.double();
        let r1 = trace_dynamical_ray(c, &t, &sched, &opts).unwrap();
        let r2 = trace_dynamical_ray(c, &t2, &sched, &opts).unwrap();
        let k = sched.subdivisions_per_halving as usize;
        // Only compare at moderate potentials where conditioning is mild.
        for idx in [k, 2 * k, 3 * k] {
            let s = &r1.samples[idx];
            let mapped = s.position * s.position + c.as_complex();
            let target = r2.samples[idx - k];
            assert!(
                (target.log2_potential - (s.log2_potential + 1.0)).abs() < 1e-9,
                "schedules misaligned"
            );
            assert!(
                (mapped - target.position).norm() < 1e-6 * target.position.norm().max(1.0),
                "functoriality violated at index {idx}"
            );
        }
    }

    #[test]
    fn refinement_stability_of_landings() {
        let mut sched_fine = PotentialSchedule::default();
        sched_fine.subdivisions_per_halving = 16;
        let opts = TraceOptions::default();
        for spec in ["rat:1/2", "rat:1/3"] {
            let t = parse_angle(spec).unwrap();
            let a = trace_param_ray(&t, &PotentialSchedule::default(), &opts).unwrap();
            let b = trace_param_ray(&t, &sched_fine, &opts).unwrap();
            let d = (a.landing_estimate - b.landing_estimate).norm();
            assert!(d < 1e-9, "{spec}: refinement moved landing by {d}");
        }
    }

    #[test]
    fn landing_estimate_examples() {
        let constant = vec![Complex64::new(1.0, 1.0); 10];
        let l = landing_estimate(&constant, 1e-9, 8, true);
        assert_eq!(l.tail_diameter, 0.0);
        assert!(l.converged);

        let geometric: Vec<Complex64> = (0..20)
            .map(|k| Complex64::new(0.5f64.powi(k), 0.0))
            .collect();
        let l = landing_estimate(&geometric, 1e-2, 4, true);
        assert!(l.converged);
        assert!((l.estimate.re - 0.5f64.powi(19)).abs() < 1e-12);

        // A truncated trace is never converged, whatever the tail looks like.
        let l = landing_estimate(&constant, 1e-9, 8, false);
        assert!(!l.converged);
    }

    #[test]
    fn bad_schedules_rejected() {
        let mut s = PotentialSchedule::default();
        s.subdivisions_per_halving = 0;
        assert!(trace_param_ray(&parse_angle("rat:0/1").unwrap(), &s, &TraceOptions::default())
            .is_err());
        let mut s = PotentialSchedule::default();
        s.floor_log2 = 10.0;
        assert!(trace_param_ray(&parse_angle("rat:0/1").unwrap(), &s, &TraceOptions::default())
            .is_err());
    }
}
