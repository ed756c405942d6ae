//! Itineraries and kneading sequences under angle doubling.
//!
//! The circle is cut at the two preimages `theta/2`, `(theta+1)/2` of a base
//! angle into closed half circles `L_1` (the one containing `theta`) and
//! `L_0`. Orbit points falling exactly on a cut are resolved by a one-sided
//! rule, giving the two itineraries of a point; they coincide away from the
//! iterated preimages of the base angle.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num::rational::BigRational;
use num::{One, Signed, Zero};
use thiserror::Error;

use crate::circle::{Angle, Arc, CircleError, InArcVerdict, COMPARISON_BIT_CAP};

#[derive(Debug, Error)]
pub enum SymbolicError {
    #[error("base angle must be nonzero")]
    ZeroBaseAngle,
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("refutation horizon {p_max} exceeds half the word length {len}")]
    HorizonTooLarge { p_max: usize, len: usize },
    #[error("membership undecided at step {step} after {bits} bits")]
    Undecided { step: usize, bits: u32 },
    #[error(transparent)]
    Circle(#[from] CircleError),
}

/// One-sided resolution rule for orbit points on the partition boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Symbol of the half circle adjacent in the counterclockwise direction.
    Plus,
    /// Symbol of the half circle adjacent in the clockwise direction.
    Minus,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Plus => write!(f, "+"),
            Side::Minus => write!(f, "-"),
        }
    }
}

/// A finite itinerary word over {0, 1}.
#[derive(Clone, Debug)]
pub struct ItineraryWord {
    pub symbols: Vec<bool>,
    pub base: Angle,
    pub side: Side,
}

impl ItineraryWord {
    pub fn depth(&self) -> usize {
        self.symbols.len()
    }

    pub fn as_string(&self) -> String {
        self.symbols
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

/// The partition of the circle cut at `theta/2` and `(theta+1)/2`.
#[derive(Clone, Debug)]
pub struct HalfCirclePartition {
    pub cut_low: Angle,
    pub cut_high: Angle,
    pub l1: Arc,
    pub l0: Arc,
}

impl HalfCirclePartition {
    pub fn for_base(theta: &Angle) -> Result<Self, SymbolicError> {
        let (cut_low, cut_high) = theta.halves();
        let l1 = Arc::new(cut_low.clone(), cut_high.clone())?;
        let l0 = Arc::new(cut_high.clone(), cut_low.clone())?;
        Ok(HalfCirclePartition {
            cut_low,
            cut_high,
            l1,
            l0,
        })
    }

    /// Symbol of `x`, using `side` to resolve boundary hits.
    fn classify(&self, x: &Angle, side: Side, bits: u32) -> Result<bool, SymbolicError> {
        // Boundary hits: at theta/2 the counterclockwise neighborhood enters
        // L_1; at (theta+1)/2 it enters L_0.
        if let Some(Ordering::Equal) = x.try_cmp(&self.cut_low, COMPARISON_BIT_CAP) {
            return Ok(matches!(side, Side::Plus));
        }
        if let Some(Ordering::Equal) = x.try_cmp(&self.cut_high, COMPARISON_BIT_CAP) {
            return Ok(matches!(side, Side::Minus));
        }
        match self.l1.contains_adaptive(x, bits, COMPARISON_BIT_CAP) {
            InArcVerdict::Inside => Ok(true),
            InArcVerdict::Outside => Ok(false),
            // Exact boundary equality was excluded above.
            InArcVerdict::Boundary => Ok(matches!(side, Side::Plus)),
            InArcVerdict::Undecided => Err(SymbolicError::Undecided {
                step: 0,
                bits: COMPARISON_BIT_CAP,
            }),
        }
    }
}

/// The itinerary of `t` with respect to the partition of `theta`, to depth `n`.
pub fn itinerary(
    t: &Angle,
    theta: &Angle,
    n: usize,
    side: Side,
    bits: u32,
) -> Result<ItineraryWord, SymbolicError> {
    if n == 0 {
        return Err(SymbolicError::ZeroDepth);
    }
    let partition = HalfCirclePartition::for_base(theta)?;
    let mut symbols = Vec::with_capacity(n);
    let mut x = t.clone();
    for step in 0..n {
        let s = partition
            .classify(&x, side, bits)
            .map_err(|e| match e {
                SymbolicError::Undecided { bits, .. } => SymbolicError::Undecided { step, bits },
                other => other,
            })?;
        symbols.push(s);
        x = x.double();
    }
    Ok(ItineraryWord {
        symbols,
        base: theta.clone(),
        side,
    })
}

/// A kneading prefix: the itinerary of the base angle itself.
#[derive(Clone, Debug)]
pub struct KneadingPrefix {
    pub word: ItineraryWord,
    /// First index at which the +/- itineraries disagree; a disagreement
    /// certifies that the base angle is periodic under doubling.
    pub disagreement: Option<usize>,
    pub refuted_periods: BTreeSet<usize>,
}

/// The kneading sequence of `theta` truncated to depth `n`.
pub fn kneading(theta: &Angle, n: usize, bits: u32) -> Result<KneadingPrefix, SymbolicError> {
    if n == 0 {
        return Err(SymbolicError::ZeroDepth);
    }
    if theta.exact().map(|v| v.is_zero()) == Some(true) {
        return Err(SymbolicError::ZeroBaseAngle);
    }
    let partition = HalfCirclePartition::for_base(theta)?;
    let mut symbols = Vec::with_capacity(n);
    let mut disagreement = None;
    let mut x = theta.clone();
    for step in 0..n {
        let plus = partition.classify(&x, Side::Plus, bits).map_err(|e| match e {
            SymbolicError::Undecided { bits, .. } => SymbolicError::Undecided { step, bits },
            other => other,
        })?;
        let minus = partition.classify(&x, Side::Minus, bits).map_err(|e| match e {
            SymbolicError::Undecided { bits, .. } => SymbolicError::Undecided { step, bits },
            other => other,
        })?;
        if plus != minus && disagreement.is_none() {
            disagreement = Some(step);
        }
        symbols.push(plus);
        x = x.double();
    }
    let refutation = refute_periods(&symbols, symbols.len() / 2)?;
    Ok(KneadingPrefix {
        word: ItineraryWord {
            symbols,
            base: theta.clone(),
            side: Side::Plus,
        },
        disagreement,
        refuted_periods: refutation.refuted,
    })
}

/// Outcome of finite-depth period refutation on a word.
#[derive(Clone, Debug)]
pub struct PeriodRefutation {
    pub p_max: usize,
    pub refuted: BTreeSet<usize>,
    pub smallest_unrefuted: Option<usize>,
}

/// Refutes periods `p <= p_max`: `p` is refuted iff some `w[i] != w[i+p]`.
pub fn refute_periods(word: &[bool], p_max: usize) -> Result<PeriodRefutation, SymbolicError> {
    if p_max > word.len() / 2 {
        return Err(SymbolicError::HorizonTooLarge {
            p_max,
            len: word.len(),
        });
    }
    let mut refuted = BTreeSet::new();
    let mut smallest_unrefuted = None;
    for p in 1..=p_max {
        let bad = (0..word.len().saturating_sub(p)).any(|i| word[i] != word[i + p]);
        if bad {
            refuted.insert(p);
        } else if smallest_unrefuted.is_none() {
            smallest_unrefuted = Some(p);
        }
    }
    Ok(PeriodRefutation {
        p_max,
        refuted,
        smallest_unrefuted,
    })
}

/// Finite-horizon evidence for non-recurrence of an angle.
#[derive(Clone, Debug)]
pub struct NonrecurrenceCertificate {
    pub horizon: usize,
    /// Certified lower bound for `min dist(theta, tau^n theta)` over
    /// non-colliding iterates; `None` when every iterate collides.
    pub delta_lower: Option<BigRational>,
    pub delta_upper: Option<BigRational>,
    pub argmin: Option<usize>,
    /// `(m, n)` with `tau^m theta = tau^n theta`, `m < n`, when found.
    pub periodic_collision: Option<(usize, usize)>,
}

impl NonrecurrenceCertificate {
    /// Whether the certificate is consistent with non-recurrence: no
    /// collision and a positive separation bound.
    pub fn passes(&self) -> bool {
        self.periodic_collision.is_none()
            && self
                .delta_lower
                .as_ref()
                .is_some_and(|d| *d > BigRational::zero())
    }
}

/// Scans the orbit of `theta` up to `horizon`, certifying a lower bound on
/// the distance from `theta` to its forward orbit and detecting collisions
/// `tau^m theta = tau^n theta`.
pub fn angle_nonrecurrence(
    theta: &Angle,
    horizon: usize,
    precision: u32,
) -> Result<NonrecurrenceCertificate, SymbolicError> {
    if horizon == 0 {
        return Err(SymbolicError::ZeroDepth);
    }
    let mut collision = None;

    if let Some(v0) = theta.exact() {
        // Exact path: orbit of rationals (or exact streams) with a seen-map.
        let mut seen: HashMap<BigRational, usize> = HashMap::new();
        seen.insert(v0.clone(), 0);
        let two = BigRational::from(num::BigInt::from(2u8));
        let one = BigRational::one();
        let half = BigRational::new(num::BigInt::one(), num::BigInt::from(2u8));
        let mut delta: Option<BigRational> = None;
        let mut argmin = None;
        let mut x = v0.clone();
        for n in 1..=horizon {
            x = {
                let d = &x * &two;
                if d >= one {
                    d - &one
                } else {
                    d
                }
            };
            if collision.is_none() {
                if let Some(&m) = seen.get(&x) {
                    collision = Some((m, n));
                } else {
                    seen.insert(x.clone(), n);
                }
            }
            if x != v0 {
                let diff = {
                    let d = (&x - &v0).abs();
                    if d > half {
                        &one - &d
                    } else {
                        d
                    }
                };
                if delta.as_ref().map(|best| &diff < best).unwrap_or(true) {
                    delta = Some(diff);
                    argmin = Some(n);
                }
            }
        }
        return Ok(NonrecurrenceCertificate {
            horizon,
            delta_lower: delta.clone(),
            delta_upper: delta,
            argmin,
            periodic_collision: collision,
        });
    }

    // Streamed path: enclosure distances plus prefix-keyed collision scan.
    let mut delta_lo: Option<BigRational> = None;
    let mut delta_hi: Option<BigRational> = None;
    let mut argmin = None;
    let mut shifts: Vec<Angle> = Vec::with_capacity(horizon + 1);
    shifts.push(theta.clone());
    let mut x = theta.clone();
    for n in 1..=horizon {
        x = x.double();
        shifts.push(x.clone());
        let mut bits = precision;
        let d = loop {
            let d = theta.dist(&x, bits);
            if d.lo > BigRational::zero() || bits >= COMPARISON_BIT_CAP {
                break d;
            }
            bits = (bits * 2).min(COMPARISON_BIT_CAP);
        };
        if d.lo.is_zero() {
            return Err(SymbolicError::Undecided {
                step: n,
                bits: COMPARISON_BIT_CAP,
            });
        }
        if delta_lo.as_ref().map(|best| d.lo < *best).unwrap_or(true) {
            delta_lo = Some(d.lo);
            delta_hi = Some(d.hi);
            argmin = Some(n);
        }
    }
    // Group orbit points by a 64-bit prefix key; only key collisions need a
    // deep comparison.
    let mut buckets: HashMap<u64, Vec<usize>> = HashMap::new();
    for (n, s) in shifts.iter().enumerate() {
        let mut key = 0u64;
        for i in 1..=64u64 {
            key = (key << 1) | s.bit(i) as u64;
        }
        buckets.entry(key).or_default().push(n);
    }
    'outer: for group in buckets.values() {
        if group.len() < 2 {
            continue;
        }
        for (i, &m) in group.iter().enumerate() {
            for &n in &group[i + 1..] {
                match shifts[m].try_cmp(&shifts[n], COMPARISON_BIT_CAP) {
                    Some(Ordering::Equal) | None => {
                        // Agreement to the cap is reported as a collision
                        // candidate rather than silently dropped.
                        collision = Some((m, n));
                        break 'outer;
                    }
                    Some(_) => {}
                }
            }
        }
    }
    Ok(NonrecurrenceCertificate {
        horizon,
        delta_lower: delta_lo,
        delta_upper: delta_hi,
        argmin,
        periodic_collision: collision,
    })
}

/// Orbit shape of a rational angle under doubling, decided arithmetically:
/// odd denominator means purely periodic, a power of two falls onto the fixed
/// point 0, and even non-dyadic denominators are strictly preperiodic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RationalOrbitKind {
    Fixed,
    PurelyPeriodic,
    DyadicToZero,
    StrictlyPreperiodic,
}

pub fn rational_orbit_kind(theta: &Angle) -> Option<RationalOrbitKind> {
    let v = theta.exact()?;
    let q = v.denom();
    if v.is_zero() {
        return Some(RationalOrbitKind::Fixed);
    }
    if q.bit(0) {
        return Some(RationalOrbitKind::PurelyPeriodic);
    }
    let odd_part_is_one = {
        let mut q = q.clone();
        while !q.bit(0) {
            q >>= 1;
        }
        q.is_one()
    };
    if odd_part_is_one {
        Some(RationalOrbitKind::DyadicToZero)
    } else {
        Some(RationalOrbitKind::StrictlyPreperiodic)
    }
}

/// Preperiod and eventual period of a rational angle's doubling orbit.
pub fn rational_orbit_profile(theta: &Angle) -> Option<(usize, usize)> {
    let v = theta.exact()?;
    let mut seen: HashMap<BigRational, usize> = HashMap::new();
    let two = BigRational::from(num::BigInt::from(2u8));
    let one = BigRational::one();
    let mut x = v;
    let mut n = 0usize;
    loop {
        if let Some(&m) = seen.get(&x) {
            return Some((m, n - m));
        }
        seen.insert(x.clone(), n);
        x = {
            let d = &x * &two;
            if d >= one {
                d - &one
            } else {
                d
            }
        };
        n += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::DEFAULT_PRECISION_BITS as BITS;
    use num::BigInt;

    fn rat(p: i64, q: i64) -> Angle {
        Angle::rational(p, q).unwrap()
    }

    fn big(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn itinerary_of_one_third_both_sides() {
        let t = rat(1, 3);
        let plus = itinerary(&t, &t, 4, Side::Plus, BITS).unwrap();
        assert_eq!(plus.as_string(), "1010");
        let minus = itinerary(&t, &t, 4, Side::Minus, BITS).unwrap();
        assert_eq!(minus.as_string(), "1111");
    }

    #[test]
    fn itinerary_sides_agree_for_triangular() {
        let t = Angle::triangular();
        let plus = itinerary(&t, &t, 64, Side::Plus, BITS).unwrap();
        let minus = itinerary(&t, &t, 64, Side::Minus, BITS).unwrap();
        assert_eq!(plus.symbols, minus.symbols);
    }

    #[test]
    fn kneading_starts_with_one() {
        for theta in [rat(1, 3), rat(5, 7), rat(3, 10), Angle::triangular()] {
            let k = kneading(&theta, 4, BITS).unwrap();
            assert!(k.word.symbols[0]);
        }
    }

    #[test]
    fn kneading_of_triangular_matches_oracle() {
        // Brute-force membership oracle over high-precision enclosures was
        // used to freeze this prefix; see the acceptance suite for the deep
        // aperiodicity statistics.
        let t = Angle::triangular();
        let k = kneading(&t, 12, BITS).unwrap();
        assert_eq!(k.word.as_string(), "101001000100");
        assert!(k.disagreement.is_none());
    }

    #[test]
    fn kneading_flags_periodic_angle() {
        let k = kneading(&rat(1, 3), 4, BITS).unwrap();
        assert_eq!(k.disagreement, Some(1));
    }

    #[test]
    fn kneading_prefix_is_stable() {
        let t = Angle::triangular();
        let short = kneading(&t, 16, BITS).unwrap();
        let long = kneading(&t, 17, BITS).unwrap();
        assert_eq!(short.word.symbols[..], long.word.symbols[..16]);
    }

    #[test]
    fn kneading_rejects_zero() {
        assert!(matches!(
            kneading(&Angle::zero(), 4, BITS),
            Err(SymbolicError::ZeroBaseAngle)
        ));
    }

    #[test]
    fn refute_period_examples() {
        let w: Vec<bool> = "101010".chars().map(|c| c == '1').collect();
        let r = refute_periods(&w, 2).unwrap();
        assert!(r.refuted.contains(&1));
        assert!(!r.refuted.contains(&2));
        assert_eq!(r.smallest_unrefuted, Some(2));

        let w: Vec<bool> = "1001".chars().map(|c| c == '1').collect();
        let r = refute_periods(&w, 2).unwrap();
        assert!(r.refuted.contains(&1) && r.refuted.contains(&2));
        assert_eq!(r.smallest_unrefuted, None);
    }

    #[test]
    fn refutation_horizon_checked() {
        let w = vec![true; 6];
        assert!(refute_periods(&w, 4).is_err());
    }

    #[test]
    fn refutation_is_monotone_in_depth() {
        let t = Angle::triangular();
        let w = kneading(&t, 128, BITS).unwrap().word.symbols;
        let early = refute_periods(&w[..64], 32).unwrap();
        let late = refute_periods(&w, 32).unwrap();
        assert!(early.refuted.is_subset(&late.refuted));
    }

    #[test]
    fn shift_compatibility() {
        // Dropping the first symbol matches the itinerary of the doubled point.
        let theta = Angle::triangular();
        let t = rat(5, 11);
        let w = itinerary(&t, &theta, 12, Side::Plus, BITS).unwrap();
        let shifted = itinerary(&t.double(), &theta, 11, Side::Plus, BITS).unwrap();
        assert_eq!(w.symbols[1..], shifted.symbols[..]);
    }

    #[test]
    fn nonrecurrence_of_one_half() {
        let cert = angle_nonrecurrence(&rat(1, 2), 3, BITS).unwrap();
        assert_eq!(cert.periodic_collision, Some((1, 2)));
        assert_eq!(cert.delta_lower, Some(big(1, 2)));
    }

    #[test]
    fn nonrecurrence_of_one_third() {
        let cert = angle_nonrecurrence(&rat(1, 3), 10, BITS).unwrap();
        assert_eq!(cert.periodic_collision, Some((0, 2)));
        assert_eq!(cert.delta_lower, Some(big(1, 3)));
    }

    #[test]
    fn nonrecurrence_of_triangular() {
        let cert = angle_nonrecurrence(&Angle::triangular(), 256, BITS).unwrap();
        assert!(cert.periodic_collision.is_none());
        let lo = cert.delta_lower.unwrap();
        assert!(lo >= big(1, 16), "delta lower bound {lo} below 1/16");
        assert!(cert.delta_upper.unwrap() < big(1, 8));
        assert_eq!(cert.argmin, Some(2));
    }

    #[test]
    fn orbit_kinds() {
        assert_eq!(
            rational_orbit_kind(&rat(1, 3)),
            Some(RationalOrbitKind::PurelyPeriodic)
        );
        assert_eq!(
            rational_orbit_kind(&rat(1, 6)),
            Some(RationalOrbitKind::StrictlyPreperiodic)
        );
        assert_eq!(
            rational_orbit_kind(&rat(3, 8)),
            Some(RationalOrbitKind::DyadicToZero)
        );
        assert_eq!(rational_orbit_kind(&Angle::zero()), Some(RationalOrbitKind::Fixed));
        assert_eq!(rational_orbit_kind(&Angle::triangular()), None);
    }

    #[test]
    fn orbit_profile_of_one_sixth() {
        // 1/6 -> 1/3 -> 2/3 -> 1/3: preperiod 1, period 2.
        assert_eq!(rational_orbit_profile(&rat(1, 6)), Some((1, 2)));
        assert_eq!(rational_orbit_profile(&rat(1, 3)), Some((0, 2)));
    }
}
