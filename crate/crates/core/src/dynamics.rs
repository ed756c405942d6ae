//! Orbit computation for the quadratic family `f_c(z) = z^2 + c`: escape
//! detection, critical-orbit separation, and periodic cycle location with
//! multiplier classification.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("parameter components must be finite")]
    NonFinite,
    #[error("cycle periods above {max} are out of scope (requested {requested})")]
    PeriodTooLarge { requested: usize, max: usize },
    #[error("tolerance must be positive")]
    BadTolerance,
}

/// Default escape radius; 4 leaves margin over the classical bound 2.
pub const DEFAULT_ESCAPE_RADIUS: f64 = 4.0;
/// Desk-scale cap for cycle periods.
pub const MAX_CYCLE_PERIOD: usize = 8;

/// A parameter `c` of the quadratic family, guaranteed finite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Parameter(Complex64);

impl Parameter {
    pub fn new(re: f64, im: f64) -> Result<Self, DynamicsError> {
        if !(re.is_finite() && im.is_finite()) {
            return Err(DynamicsError::NonFinite);
        }
        Ok(Parameter(Complex64::new(re, im)))
    }

    pub fn from_complex(z: Complex64) -> Result<Self, DynamicsError> {
        Self::new(z.re, z.im)
    }

    pub fn as_complex(self) -> Complex64 {
        self.0
    }

    pub fn re(self) -> f64 {
        self.0.re
    }

    pub fn im(self) -> f64 {
        self.0.im
    }
}

/// Orbit of a seed under `f_c`, stopping at escape.
#[derive(Clone, Debug)]
pub struct OrbitResult {
    /// `z_0, z_1, …` up to the horizon or the first escaping iterate.
    pub samples: Vec<Complex64>,
    pub escaped: bool,
    /// Index of the first iterate with `|z| > escape_radius`.
    pub escape_index: Option<usize>,
}

/// Iterates `z -> z^2 + c` for `n` steps from `z0`.
pub fn iterate(c: Parameter, z0: Complex64, n: usize, escape_radius: f64) -> OrbitResult {
    let c = c.as_complex();
    let mut samples = Vec::with_capacity(n + 1);
    samples.push(z0);
    let mut z = z0;
    for k in 1..=n {
        z = z * z + c;
        samples.push(z);
        // Overflow counts as escape.
        if !z.is_finite() || z.norm_sqr() > escape_radius * escape_radius {
            return OrbitResult {
                samples,
                escaped: true,
                escape_index: Some(k),
            };
        }
    }
    OrbitResult {
        samples,
        escaped: false,
        escape_index: None,
    }
}

/// Separation evidence for the critical orbit of `c`.
#[derive(Clone, Debug)]
pub struct OrbitDiagnostics {
    pub horizon: usize,
    /// `min |f_c^n(0)|` over `1 <= n <= trusted_iterates`.
    pub min_critical_distance: f64,
    pub argmin: usize,
    pub escaped: bool,
    pub escape_index: Option<usize>,
    /// Number of iterates before escape (the full horizon when bounded).
    pub trusted_iterates: usize,
    /// The same minimum restricted to the first `horizon/10` iterates.
    pub delta_at_tenth: f64,
    /// `delta_at_tenth / min_critical_distance` (1 when both windows agree).
    pub drift_ratio: f64,
}

/// Runs the critical orbit to `horizon` and reports `min |f^n(0)|` together
/// with a two-horizon drift comparison. Escape (the parameter lies outside
/// the Mandelbrot set, or is an exterior ray-point approximation of a
/// boundary parameter) is reported distinctly; the minima then refer to the
/// pre-escape window.
pub fn critical_orbit_separation(
    c: Parameter,
    horizon: usize,
    escape_radius: f64,
) -> OrbitDiagnostics {
    let cc = c.as_complex();
    let tenth = (horizon / 10).max(1);
    let mut z = Complex64::new(0.0, 0.0);
    let mut min_dist = f64::INFINITY;
    let mut argmin = 0usize;
    let mut delta_at_tenth = f64::INFINITY;
    let mut escaped = false;
    let mut escape_index = None;
    let mut trusted = horizon;
    for n in 1..=horizon {
        z = z * z + cc;
        if !z.is_finite() || z.norm_sqr() > escape_radius * escape_radius {
            escaped = true;
            escape_index = Some(n);
            trusted = n - 1;
            break;
        }
        let d = z.norm();
        if d < min_dist {
            min_dist = d;
            argmin = n;
        }
        if n == tenth {
            delta_at_tenth = min_dist;
        }
    }
    if trusted < tenth {
        delta_at_tenth = min_dist;
    }
    let drift_ratio = if min_dist > 0.0 && min_dist.is_finite() {
        delta_at_tenth / min_dist
    } else {
        f64::INFINITY
    };
    OrbitDiagnostics {
        horizon,
        min_critical_distance: if min_dist.is_finite() { min_dist } else { 0.0 },
        argmin,
        escaped,
        escape_index,
        trusted_iterates: trusted,
        delta_at_tenth: if delta_at_tenth.is_finite() {
            delta_at_tenth
        } else {
            0.0
        },
        drift_ratio,
    }
}

/// A periodic cycle with its multiplier.
#[derive(Clone, Debug)]
pub struct Cycle {
    pub period: usize,
    pub points: Vec<Complex64>,
    pub multiplier: Complex64,
}

impl Cycle {
    pub fn is_repelling(&self) -> bool {
        self.multiplier.norm() > 1.0
    }
}

/// Newton seed grid over the square `|Re z|, |Im z| <= radius`.
#[derive(Clone, Copy, Debug)]
pub struct SeedGrid {
    pub per_side: usize,
    pub radius: f64,
}

impl Default for SeedGrid {
    fn default() -> Self {
        SeedGrid {
            per_side: 64,
            radius: 2.0,
        }
    }
}

/// Result of a cycle scan up to a maximal period.
#[derive(Clone, Debug)]
pub struct CycleScanReport {
    pub max_period: usize,
    pub cycles: Vec<Cycle>,
    /// `(period, number of cycles of that exact period expected for generic c)`.
    pub expected_counts: Vec<(usize, usize)>,
    pub found_counts: Vec<(usize, usize)>,
    /// Coverage heuristic: every expected cycle count was reached.
    pub complete: bool,
    pub all_repelling: bool,
}

fn moebius(n: usize) -> i64 {
    // Enough for the desk-scale periods.
    const TABLE: [i64; 9] = [0, 1, -1, -1, 0, -1, 1, -1, 0];
    TABLE[n]
}

/// Number of points of exact period `p` for a generic quadratic: by
/// inclusion-exclusion over divisors, `sum_{d|p} mu(p/d) 2^d`.
fn expected_exact_period_points(p: usize) -> usize {
    let mut total: i64 = 0;
    for d in 1..=p {
        if p % d == 0 {
            total += moebius(p / d) * (1i64 << d);
        }
    }
    total.max(0) as usize
}

/// Evaluates `f_c^p(z)` and its derivative in `z` along the orbit.
fn orbit_and_derivative(c: Complex64, z: Complex64, p: usize) -> Option<(Complex64, Complex64)> {
    let mut w = z;
    let mut dw = Complex64::new(1.0, 0.0);
    for _ in 0..p {
        dw = 2.0 * w * dw;
        w = w * w + c;
        if !w.is_finite() || w.norm() > 1e100 {
            return None;
        }
    }
    Some((w, dw))
}

/// Locates all cycles of period up to `max_period` by damped multi-start
/// Newton on `F(z) = f_c^p(z) - z`. Completeness against the generic count
/// is a reported heuristic, never an assertion.
pub fn find_cycles(
    c: Parameter,
    max_period: usize,
    grid: &SeedGrid,
    tol: f64,
) -> Result<CycleScanReport, DynamicsError> {
    if max_period > MAX_CYCLE_PERIOD {
        return Err(DynamicsError::PeriodTooLarge {
            requested: max_period,
            max: MAX_CYCLE_PERIOD,
        });
    }
    if tol <= 0.0 {
        return Err(DynamicsError::BadTolerance);
    }
    let cc = c.as_complex();
    let dedupe_tol = tol.max(1e-9);
    let mut cycles: Vec<Cycle> = Vec::new();
    let mut expected_counts = Vec::new();
    let mut found_counts = Vec::new();

    for p in 1..=max_period {
        let mut roots: Vec<Complex64> = Vec::new();
        for gx in 0..grid.per_side {
            for gy in 0..grid.per_side {
                let fx = (gx as f64 + 0.5) / grid.per_side as f64;
                let fy = (gy as f64 + 0.5) / grid.per_side as f64;
                let mut z = Complex64::new(
                    -grid.radius + 2.0 * grid.radius * fx,
                    -grid.radius + 2.0 * grid.radius * fy,
                );
                let mut converged = false;
                let mut fval = f64::INFINITY;
                for _ in 0..60 {
                    let Some((w, dw)) = orbit_and_derivative(cc, z, p) else {
                        break;
                    };
                    let f = w - z;
                    let df = dw - Complex64::new(1.0, 0.0);
                    let fnorm = f.norm();
                    if fnorm <= 1e-11 * (1.0 + z.norm()) {
                        converged = true;
                        break;
                    }
                    if df.norm() < 1e-18 {
                        break;
                    }
                    // Damped step: halve until the residual does not grow.
                    let mut step = f / df;
                    let mut accepted = false;
                    for _ in 0..=6 {
                        let zn = z - step;
                        if let Some((wn, _)) = orbit_and_derivative(cc, zn, p) {
                            let fn_norm = (wn - zn).norm();
                            if fn_norm < fnorm || fn_norm < 1e-11 * (1.0 + zn.norm()) {
                                z = zn;
                                fval = fn_norm;
                                accepted = true;
                                break;
                            }
                        }
                        step *= 0.5;
                    }
                    if !accepted {
                        break;
                    }
                    if fval <= 1e-11 * (1.0 + z.norm()) {
                        converged = true;
                        break;
                    }
                }
                if !converged {
                    continue;
                }
                // Exact-period filter: reject points of lower true period.
                let mut lower = false;
                for d in 1..p {
                    if p % d == 0 {
                        if let Some((w, _)) = orbit_and_derivative(cc, z, d) {
                            if (w - z).norm() < 1e-8 {
                                lower = true;
                                break;
                            }
                        }
                    }
                }
                if lower {
                    continue;
                }
                if !roots.iter().any(|r| (r - z).norm() < dedupe_tol) {
                    roots.push(z);
                }
            }
        }
        // Group roots into cycles.
        let mut used = vec![false; roots.len()];
        let mut found_here = 0usize;
        for i in 0..roots.len() {
            if used[i] {
                continue;
            }
            let mut points = vec![roots[i]];
            let mut w = roots[i];
            used[i] = true;
            for _ in 1..p {
                w = w * w + cc;
                points.push(w);
                if let Some(j) = roots
                    .iter()
                    .position(|r| (r - w).norm() < dedupe_tol * 10.0)
                {
                    used[j] = true;
                }
            }
            let multiplier = points
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, z| acc * 2.0 * z);
            cycles.push(Cycle {
                period: p,
                points,
                multiplier,
            });
            found_here += 1;
        }
        expected_counts.push((p, expected_exact_period_points(p) / p));
        found_counts.push((p, found_here));
    }

    let complete = expected_counts
        .iter()
        .zip(&found_counts)
        .all(|(&(_, e), &(_, f))| f >= e);
    let all_repelling = cycles.iter().all(Cycle::is_repelling);
    Ok(CycleScanReport {
        max_period,
        cycles,
        expected_counts,
        found_counts,
        complete,
        all_repelling,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn param(re: f64, im: f64) -> Parameter {
        Parameter::new(re, im).unwrap()
    }

    #[test]
    fn rejects_non_finite_parameters() {
        assert!(Parameter::new(f64::NAN, 0.0).is_err());
        assert!(Parameter::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn orbit_of_zero_stays_zero() {
        let r = iterate(param(0.0, 0.0), Complex64::new(0.0, 0.0), 16, 4.0);
        assert!(!r.escaped);
        assert!(r.samples.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn orbit_of_minus_two_hits_fixed_point() {
        let r = iterate(param(-2.0, 0.0), Complex64::new(0.0, 0.0), 8, 4.0);
        assert!(!r.escaped);
        let expect = [0.0, -2.0, 2.0, 2.0, 2.0];
        for (z, e) in r.samples.iter().zip(expect) {
            assert!((z.re - e).abs() < 1e-14 && z.im == 0.0);
        }
    }

    #[test]
    fn orbit_of_i_is_preperiodic() {
        let r = iterate(param(0.0, 1.0), Complex64::new(0.0, 0.0), 100, 4.0);
        assert!(!r.escaped);
        // i, i-1, -i, i-1, -i, ...
        let z = r.samples[1];
        assert!((z - Complex64::new(0.0, 1.0)).norm() < 1e-14);
        let z = r.samples[2];
        assert!((z - Complex64::new(-1.0, 1.0)).norm() < 1e-14);
        let z3 = r.samples[3];
        assert!((z3 - Complex64::new(0.0, -1.0)).norm() < 1e-13);
        let z5 = r.samples[5];
        assert!((z5 - z3).norm() < 1e-12);
    }

    #[test]
    fn separation_of_minus_two() {
        let d = critical_orbit_separation(param(-2.0, 0.0), 1000, 4.0);
        assert!(!d.escaped);
        assert!((d.min_critical_distance - 2.0).abs() < 1e-12);
        assert!(d.drift_ratio <= 1.0 + 1e-12);
    }

    #[test]
    fn separation_of_zero_is_recurrent() {
        let d = critical_orbit_separation(param(0.0, 0.0), 10, 4.0);
        assert_eq!(d.min_critical_distance, 0.0);
        assert!(!d.escaped);
    }

    #[test]
    fn separation_of_i() {
        let d = critical_orbit_separation(param(0.0, 1.0), 1000, 4.0);
        assert!((d.min_critical_distance - 1.0).abs() < 1e-12);
        assert!(!d.escaped);
    }

    #[test]
    fn exterior_parameter_escapes() {
        for c in [param(0.3, 2.1), param(-2.5, 0.0), param(2.0, 2.0)] {
            assert!(c.as_complex().norm() > 2.0);
            let d = critical_orbit_separation(c, 100, 4.0);
            assert!(d.escaped, "orbit of |c| > 2 must escape");
        }
    }

    #[test]
    fn delta_monotone_in_horizon() {
        let c = param(-1.2383925504769249, -0.41714632467298995);
        let mut prev = f64::INFINITY;
        for n in [10usize, 100, 1000] {
            let d = critical_orbit_separation(c, n, 4.0);
            assert!(d.min_critical_distance <= prev + 1e-15);
            prev = d.min_critical_distance;
        }
    }

    #[test]
    fn fixed_points_at_zero() {
        let grid = SeedGrid {
            per_side: 24,
            radius: 2.0,
        };
        let scan = find_cycles(param(0.0, 0.0), 1, &grid, 1e-9).unwrap();
        assert_eq!(scan.cycles.len(), 2);
        let mut mults: Vec<f64> = scan.cycles.iter().map(|c| c.multiplier.norm()).collect();
        mults.sort_by(f64::total_cmp);
        assert!(mults[0] < 1e-8); // z = 0
        assert!((mults[1] - 2.0).abs() < 1e-8); // z = 1
        assert!(!scan.all_repelling);
    }

    #[test]
    fn fixed_points_at_minus_two() {
        let grid = SeedGrid {
            per_side: 24,
            radius: 2.0,
        };
        let scan = find_cycles(param(-2.0, 0.0), 1, &grid, 1e-9).unwrap();
        assert_eq!(scan.cycles.len(), 2);
        let mut mults: Vec<f64> = scan.cycles.iter().map(|c| c.multiplier.norm()).collect();
        mults.sort_by(f64::total_cmp);
        assert!((mults[0] - 2.0).abs() < 1e-8); // z = -1, multiplier -2
        assert!((mults[1] - 4.0).abs() < 1e-8); // z = 2, multiplier 4
        assert!(scan.all_repelling);
    }

    #[test]
    fn superattracting_two_cycle_at_minus_one() {
        let grid = SeedGrid {
            per_side: 32,
            radius: 2.0,
        };
        let scan = find_cycles(param(-1.0, 0.0), 2, &grid, 1e-9).unwrap();
        let two_cycles: Vec<&Cycle> = scan.cycles.iter().filter(|c| c.period == 2).collect();
        assert_eq!(two_cycles.len(), 1);
        let cyc = two_cycles[0];
        assert!(cyc.multiplier.norm() < 1e-7);
        assert!(!scan.all_repelling, "c = -1 has a superattracting cycle");
        // The cycle is {0, -1}.
        let mut pts: Vec<f64> = cyc.points.iter().map(|z| z.re).collect();
        pts.sort_by(f64::total_cmp);
        assert!((pts[0] + 1.0).abs() < 1e-7 && pts[1].abs() < 1e-7);
    }

    #[test]
    fn multiplier_invariant_under_starting_point() {
        let c = param(-0.3, 0.55);
        let grid = SeedGrid {
            per_side: 32,
            radius: 2.0,
        };
        let scan = find_cycles(c, 4, &grid, 1e-9).unwrap();
        for cyc in &scan.cycles {
            for start in &cyc.points {
                let mut z = *start;
                let mut mult = Complex64::new(1.0, 0.0);
                for _ in 0..cyc.period {
                    mult *= 2.0 * z;
                    z = z * z + c.as_complex();
                }
                let rel = (mult - cyc.multiplier).norm() / cyc.multiplier.norm().max(1e-300);
                assert!(rel < 1e-10, "multiplier varies along cycle: {rel}");
            }
        }
    }

    #[test]
    fn expected_counts_match_inclusion_exclusion() {
        assert_eq!(expected_exact_period_points(1), 2);
        assert_eq!(expected_exact_period_points(2), 2);
        assert_eq!(expected_exact_period_points(3), 6);
        assert_eq!(expected_exact_period_points(4), 12);
        assert_eq!(expected_exact_period_points(6), 54);
    }

    #[test]
    fn period_cap_enforced() {
        let grid = SeedGrid::default();
        assert!(find_cycles(param(0.0, 0.0), 9, &grid, 1e-9).is_err());
    }
}
